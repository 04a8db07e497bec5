use std::collections::HashMap;

use super::Triangulation;

fn hex_distance(q: i64, r: i64) -> i64 {
    (q.abs() + r.abs() + (q + r).abs()) / 2
}

/// Combinatorial ball of radius `radius` in the degree-6 triangular lattice.
///
/// Vertex 0 is the center; the remaining vertices are ordered ring by ring.
/// The result has `1 + 3R(R+1)` vertices, `3R(3R+1)` edges and `6R²` faces.
pub fn hexagonal_disk(radius: usize) -> Triangulation {
    let r = radius as i64;
    let mut coords: Vec<(i64, i64, i64)> = Vec::new();
    for q in -r..=r {
        for s in -r..=r {
            let d = hex_distance(q, s);
            if d <= r {
                coords.push((d, q, s));
            }
        }
    }
    coords.sort_unstable();
    let index: HashMap<(i64, i64), usize> = coords
        .iter()
        .enumerate()
        .map(|(i, &(_, q, s))| ((q, s), i))
        .collect();

    let mut faces = Vec::with_capacity(6 * radius * radius);
    // Each lattice point anchors one "up" and one "down" triangle; a "down"
    // triangle does not contain its anchor, so anchors range over a square
    // enclosing the disk, in a fixed order.
    for q in -r - 1..=r {
        for s in -r - 1..=r {
            let up = [(q, s), (q + 1, s), (q, s + 1)];
            let down = [(q + 1, s), (q, s + 1), (q + 1, s + 1)];
            for tri in [up, down] {
                let ids: Option<Vec<usize>> = tri.iter().map(|p| index.get(p).copied()).collect();
                if let Some(ids) = ids {
                    faces.push([ids[0], ids[1], ids[2]]);
                }
            }
        }
    }
    Triangulation::from_faces(coords.len(), &faces).expect("lattice disk is a valid triangulation")
}

/// Boundary of the tetrahedron: the smallest closed test surface (χ = 2).
pub fn tetrahedron() -> Triangulation {
    Triangulation::from_faces(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
        .expect("tetrahedron is a valid triangulation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_is_a_single_vertex() {
        let t = hexagonal_disk(0);
        assert_eq!((t.num_vertices(), t.num_edges(), t.num_faces()), (1, 0, 0));
        assert_eq!(t.euler_characteristic(), 1);
    }

    #[test]
    fn radius_one_is_a_hexagon_fan() {
        let t = hexagonal_disk(1);
        assert_eq!((t.num_vertices(), t.num_edges(), t.num_faces()), (7, 12, 6));
        assert_eq!(t.degree(0), 6);
        assert!(!t.is_boundary_vertex(0));
        assert!((1..7).all(|v| t.is_boundary_vertex(v) && t.degree(v) == 3));
        assert_eq!(t.euler_characteristic(), 1);
    }

    #[test]
    fn counts_match_closed_forms() {
        for r in 0..=8usize {
            let t = hexagonal_disk(r);
            assert_eq!(t.num_vertices(), 1 + 3 * r * (r + 1));
            assert_eq!(t.num_edges(), 3 * r * (3 * r + 1));
            assert_eq!(t.num_faces(), 6 * r * r);
            assert_eq!(t.euler_characteristic(), 1);
        }
    }

    #[test]
    fn inner_rings_have_degree_six() {
        for r in 1..=6usize {
            let t = hexagonal_disk(r);
            let dist = t.graph_distances(0);
            for v in 0..t.num_vertices() {
                let d = dist[v].unwrap();
                if d < r {
                    assert_eq!(t.degree(v), 6, "vertex {v} at distance {d}");
                    assert!(!t.is_boundary_vertex(v));
                } else {
                    assert!(t.is_boundary_vertex(v));
                }
            }
        }
    }
}
