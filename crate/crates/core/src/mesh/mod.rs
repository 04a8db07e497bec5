//! Triangulations: incidence structure, lattice generators, exhaustions and file I/O.

mod exhaustion;
mod hex;
mod io;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub use exhaustion::{exhaustion, Exhaustion, Level};
pub use hex::{hexagonal_disk, tetrahedron};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh, MeshDocument};

/// Dense vertex index in `[0, |V|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

pub type EdgeId = usize;
pub type FaceId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("mesh has no vertices")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("face {face} references vertex {vertex}, which does not exist")]
    DanglingVertex { face: usize, vertex: usize },
    #[error("face {face} repeats a vertex")]
    DegenerateFace { face: usize },
    #[error("face {face} duplicates an earlier face")]
    DuplicateFace { face: usize },
    #[error("edge {a}-{b} is shared by {count} faces")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(usize),
    #[error("vertex ids must be dense in [0, {count}); missing {missing}")]
    NonDenseVertexIds { count: usize, missing: usize },
    #[error("vertex {0} is not in the mesh")]
    UnknownVertex(usize),
    #[error("mesh is not connected ({reached} of {total} vertices reachable)")]
    Disconnected { reached: usize, total: usize },
    #[error("exhaustion needs at least one level")]
    NoLevels,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MeshError {
    fn from(e: std::io::Error) -> Self {
        MeshError::Io(e.to_string())
    }
}

/// A finite triangulation with interior/boundary classification.
///
/// Faces and edges are stored as sorted vertex tuples. Every per-vertex
/// adjacency list is sorted ascending, which fixes the summation order of
/// every downstream reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    edge_lookup: HashMap<(usize, usize), EdgeId>,
    /// `face_edges[f][a]` is the edge opposite the `a`-th vertex of face `f`.
    face_edges: Vec<[EdgeId; 3]>,
    edge_faces: Vec<Vec<FaceId>>,
    vertex_faces: Vec<Vec<FaceId>>,
    /// `(neighbor, edge)` sorted by neighbor id.
    neighbors: Vec<Vec<(usize, EdgeId)>>,
    boundary_vertex: Vec<bool>,
}

impl Triangulation {
    /// Builds a triangulation on `num_vertices` vertices from a face list.
    ///
    /// Vertices not covered by any face are allowed (a radius-0 disk is a
    /// single isolated vertex).
    pub fn from_faces(num_vertices: usize, faces: &[[usize; 3]]) -> Result<Self, MeshError> {
        if num_vertices == 0 {
            return Err(MeshError::Empty);
        }
        let mut sorted_faces = Vec::with_capacity(faces.len());
        let mut seen = HashMap::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= num_vertices {
                    return Err(MeshError::DanglingVertex {
                        face: fi,
                        vertex: v,
                    });
                }
            }
            let mut s = *f;
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(MeshError::DegenerateFace { face: fi });
            }
            if seen.insert(s, fi).is_some() {
                return Err(MeshError::DuplicateFace { face: fi });
            }
            sorted_faces.push(s);
        }

        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut edge_faces: Vec<Vec<FaceId>> = Vec::new();
        let mut face_edges = Vec::with_capacity(sorted_faces.len());
        for (fi, f) in sorted_faces.iter().enumerate() {
            let mut fe = [0; 3];
            for a in 0..3 {
                let p = f[(a + 1) % 3];
                let q = f[(a + 2) % 3];
                let key = (p.min(q), p.max(q));
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                edge_faces[e].push(fi);
                if edge_faces[e].len() > 2 {
                    return Err(MeshError::NonManifoldEdge {
                        a: key.0,
                        b: key.1,
                        count: 3,
                    });
                }
                fe[a] = e;
            }
            face_edges.push(fe);
        }

        let mut vertex_faces = vec![Vec::new(); num_vertices];
        for (fi, f) in sorted_faces.iter().enumerate() {
            for &v in f {
                vertex_faces[v].push(fi);
            }
        }
        let mut neighbors = vec![Vec::new(); num_vertices];
        let mut boundary_vertex = vec![false; num_vertices];
        for (e, &[a, b]) in edges.iter().enumerate() {
            neighbors[a].push((b, e));
            neighbors[b].push((a, e));
            if edge_faces[e].len() == 1 {
                boundary_vertex[a] = true;
                boundary_vertex[b] = true;
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }

        Ok(Triangulation {
            num_vertices,
            edges,
            faces: sorted_faces,
            edge_lookup,
            face_edges,
            edge_faces,
            vertex_faces,
            neighbors,
            boundary_vertex,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices).map(VertexId)
    }

    /// Edge endpoints, smaller id first.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Faces as ascending vertex triples.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edge(&self, e: EdgeId) -> [usize; 2] {
        self.edges[e]
    }

    pub fn face(&self, f: FaceId) -> [usize; 3] {
        self.faces[f]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<EdgeId> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    /// Edges opposite each vertex of `f`, in the face's vertex order.
    pub fn face_edges(&self, f: FaceId) -> [EdgeId; 3] {
        self.face_edges[f]
    }

    pub fn edge_faces(&self, e: EdgeId) -> &[FaceId] {
        &self.edge_faces[e]
    }

    /// Incident faces in ascending id order.
    pub fn vertex_faces(&self, v: usize) -> &[FaceId] {
        &self.vertex_faces[v]
    }

    /// `(neighbor, edge)` pairs in ascending neighbor order.
    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.edge_faces[e].len() == 1
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices)
            .filter(|&v| self.boundary_vertex[v])
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_faces.iter().all(|f| f.len() == 2)
    }

    /// Position of `v` within face `f`, if incident.
    pub fn corner_of(&self, f: FaceId, v: usize) -> Option<usize> {
        self.faces[f].iter().position(|&w| w == v)
    }

    /// `|V| - |E| + |F|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Breadth-first combinatorial distances from `source`; unreachable vertices get `None`.
    pub fn graph_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have a distance");
            for &(w, _) in &self.neighbors[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Multi-source distances to the nearest vertex in `sources`.
    pub fn distances_to_set(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have a distance");
            for &(w, _) in &self.neighbors[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// `|V| - |E| + |F|` of `t`.
pub fn euler_characteristic(t: &Triangulation) -> i64 {
    t.euler_characteristic()
}
