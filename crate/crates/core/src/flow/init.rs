use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::Triangulation;

/// Seeded random conformal factor supported on the combinatorial ball of
/// radius `support` around `center`, rescaled to the given `l²` norm.
///
/// Values outside the ball (and at the mesh boundary) are zero. A zero norm,
/// or a ball without admissible vertices, yields the zero function.
pub fn random_factor(
    mesh: &Triangulation,
    center: usize,
    support: usize,
    l2_norm: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = mesh.graph_distances(center);
    let mut u: Vec<f64> = (0..mesh.num_vertices())
        .map(|v| {
            let draw: f64 = rng.gen_range(-1.0..1.0);
            match dist[v] {
                Some(d) if d <= support && !mesh.is_boundary_vertex(v) => draw,
                _ => 0.0,
            }
        })
        .collect();
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || l2_norm == 0.0 {
        return vec![0.0; mesh.num_vertices()];
    }
    let scale = l2_norm / norm;
    u.iter_mut().for_each(|x| *x *= scale);
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::hexagonal_disk;

    #[test]
    fn support_norm_and_reproducibility() {
        let t = hexagonal_disk(10);
        let u = random_factor(&t, 0, 5, 0.01, 7);
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 0.01).abs() < 1e-15);
        let dist = t.graph_distances(0);
        for v in 0..t.num_vertices() {
            if dist[v].unwrap() > 5 {
                assert_eq!(u[v], 0.0);
            }
        }
        assert_eq!(u, random_factor(&t, 0, 5, 0.01, 7));
        assert_ne!(u, random_factor(&t, 0, 5, 0.01, 8));
        assert!(random_factor(&t, 0, 5, 0.0, 7).iter().all(|&x| x == 0.0));
    }
}
