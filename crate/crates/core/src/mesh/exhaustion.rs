use std::collections::HashMap;

use super::{EdgeId, MeshError, Triangulation, VertexId};

/// One finite subcomplex `V_k` of an exhaustion, re-indexed densely.
#[derive(Debug, Clone)]
pub struct Level {
    /// Graph radius around the center that defines this level.
    pub radius: usize,
    pub mesh: Triangulation,
    /// Local vertex index → base vertex index (ascending).
    pub global: Vec<usize>,
    /// Local edge index → base edge index.
    pub base_edges: Vec<EdgeId>,
    /// Per local vertex: evolves under the pinned flow.
    pub interior: Vec<bool>,
}

impl Level {
    pub fn local_of(&self, base_vertex: usize) -> Option<usize> {
        self.global.binary_search(&base_vertex).ok()
    }

    /// Local ids of vertices held fixed by the pinned flow.
    pub fn pinned(&self) -> Vec<usize> {
        (0..self.global.len())
            .filter(|&v| !self.interior[v])
            .collect()
    }
}

/// Nested combinatorial balls `V_1 ⊂ V_2 ⊂ …` around a center vertex.
#[derive(Debug, Clone)]
pub struct Exhaustion {
    pub center: VertexId,
    pub levels: Vec<Level>,
    /// Number of levels asked for; `levels.len()` may be smaller once the base saturates.
    pub requested: usize,
}

/// Builds `count` nested levels: level `k` holds every face whose three
/// vertices lie within graph distance `k` of `center`.
///
/// A level vertex is interior when every base face around it is in the level
/// and it is not on the base mesh's own boundary; the base is treated as a
/// truncation of an unbounded triangulation, so its rim never evolves.
/// Levels stop early once they cover the whole base.
pub fn exhaustion(
    t: &Triangulation,
    center: VertexId,
    count: usize,
) -> Result<Exhaustion, MeshError> {
    if count == 0 {
        return Err(MeshError::NoLevels);
    }
    if center.0 >= t.num_vertices() {
        return Err(MeshError::UnknownVertex(center.0));
    }
    let dist = t.graph_distances(center.0);
    let reached = dist.iter().filter(|d| d.is_some()).count();
    if reached != t.num_vertices() {
        return Err(MeshError::Disconnected {
            reached,
            total: t.num_vertices(),
        });
    }
    let dist: Vec<usize> = dist.into_iter().map(|d| d.unwrap_or(usize::MAX)).collect();
    let face_radius: Vec<usize> = t
        .faces()
        .iter()
        .map(|f| f.iter().map(|&v| dist[v]).max().unwrap_or(0))
        .collect();

    let mut levels = Vec::with_capacity(count);
    for k in 1..=count {
        let level = build_level(t, &dist, &face_radius, k);
        let saturated = level.mesh.num_faces() == t.num_faces();
        levels.push(level);
        if saturated {
            break;
        }
    }
    Ok(Exhaustion {
        center,
        levels,
        requested: count,
    })
}

fn build_level(t: &Triangulation, dist: &[usize], face_radius: &[usize], k: usize) -> Level {
    let face_ids: Vec<usize> = (0..t.num_faces())
        .filter(|&f| face_radius[f] <= k)
        .collect();
    let mut global: Vec<usize> = face_ids.iter().flat_map(|&f| t.face(f)).collect();
    if face_ids.is_empty() {
        // Only possible for an isolated center.
        global.extend((0..t.num_vertices()).filter(|&v| dist[v] == 0));
    }
    global.sort_unstable();
    global.dedup();
    let local: HashMap<usize, usize> = global.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let faces: Vec<[usize; 3]> = face_ids
        .iter()
        .map(|&f| {
            let [a, b, c] = t.face(f);
            [local[&a], local[&b], local[&c]]
        })
        .collect();
    let mesh = Triangulation::from_faces(global.len(), &faces)
        .expect("a subcomplex of a valid triangulation is valid");
    let base_edges = mesh
        .edges()
        .iter()
        .map(|&[a, b]| {
            t.edge_between(global[a], global[b])
                .expect("level edge exists in base")
        })
        .collect();
    let interior = global
        .iter()
        .map(|&g| {
            !t.is_boundary_vertex(g) && t.vertex_faces(g).iter().all(|&f| face_radius[f] <= k)
        })
        .collect();
    Level {
        radius: k,
        mesh,
        global,
        base_edges,
        interior,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{hexagonal_disk, tetrahedron};
    use super::*;

    #[test]
    fn first_level_of_hex_disk_is_the_star_of_the_center() {
        let t = hexagonal_disk(3);
        let ex = exhaustion(&t, VertexId(0), 2).unwrap();
        assert_eq!(ex.levels.len(), 2);
        let l1 = &ex.levels[0];
        assert_eq!(l1.mesh.num_vertices(), 7);
        let interior: Vec<usize> = (0..l1.global.len())
            .filter(|&v| l1.interior[v])
            .map(|v| l1.global[v])
            .collect();
        assert_eq!(interior, vec![0]);
        let l2 = &ex.levels[1];
        assert_eq!(l2.mesh.num_vertices(), 19);
        assert!(l1.global.iter().all(|g| l2.global.contains(g)));
    }

    #[test]
    fn levels_are_nested_and_interior_matches_bfs() {
        let t = hexagonal_disk(5);
        let ex = exhaustion(&t, VertexId(0), 10).unwrap();
        // Level 5 covers the base, so levels stop there.
        assert_eq!(ex.levels.len(), 5);
        assert_eq!(ex.requested, 10);
        let dist = t.graph_distances(0);
        for w in ex.levels.windows(2) {
            assert!(w[0].global.len() < w[1].global.len());
            assert!(w[0].global.iter().all(|g| w[1].global.contains(g)));
            assert!(w[0].mesh.num_faces() < w[1].mesh.num_faces());
        }
        for lvl in &ex.levels {
            for (i, &g) in lvl.global.iter().enumerate() {
                let d = dist[g].unwrap();
                assert!(d <= lvl.radius);
                assert_eq!(lvl.interior[i], d < lvl.radius && d < 5, "vertex {g}");
            }
        }
    }

    #[test]
    fn single_level_on_closed_mesh() {
        let t = tetrahedron();
        let ex = exhaustion(&t, VertexId(2), 1).unwrap();
        assert_eq!(ex.levels.len(), 1);
        assert_eq!(ex.levels[0].mesh.num_faces(), 4);
        assert!(ex.levels[0].interior.iter().all(|&b| b));
    }

    #[test]
    fn rejects_bad_arguments() {
        let t = hexagonal_disk(1);
        assert_eq!(
            exhaustion(&t, VertexId(0), 0).unwrap_err(),
            MeshError::NoLevels
        );
        assert_eq!(
            exhaustion(&t, VertexId(9), 1).unwrap_err(),
            MeshError::UnknownVertex(9)
        );
        let two = Triangulation::from_faces(6, &[[0, 1, 2], [3, 4, 5]]).unwrap();
        assert!(matches!(
            exhaustion(&two, VertexId(0), 1),
            Err(MeshError::Disconnected { .. })
        ));
    }
}
