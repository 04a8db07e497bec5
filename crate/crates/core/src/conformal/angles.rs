use super::{AngleTriple, GeometryError};
use crate::scalar::Real;

fn outside<T: Real>(l: [T; 3]) -> GeometryError {
    GeometryError::OutsideDomain {
        l1: l[0].to_f64_lossy(),
        l2: l[1].to_f64_lossy(),
        l3: l[2].to_f64_lossy(),
    }
}

/// Strict triangle inequalities on positive lengths.
pub fn in_domain<T: Real>(l: [T; 3]) -> bool {
    l.iter().all(|&x| x > T::zero())
        && l[0] < l[1] + l[2]
        && l[1] < l[0] + l[2]
        && l[2] < l[0] + l[1]
}

/// Triangle inequalities with slack: each `l_j + l_k - l_i` must exceed
/// `tol * max(l)`.
pub fn within_domain<T: Real>(l: [T; 3], tol: T) -> bool {
    let scale = l[0].max(l[1]).max(l[2]);
    let slack = tol * scale;
    l.iter().all(|&x| x > T::zero())
        && l[1] + l[2] - l[0] > slack
        && l[0] + l[2] - l[1] > slack
        && l[0] + l[1] - l[2] > slack
}

/// Four times the area, via Kahan's cancellation-free Heron formula.
fn area4<T: Real>(l: [T; 3]) -> T {
    let mut s = l;
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite lengths"));
    let [x, y, z] = s;
    let p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    p.max(T::zero()).sqrt()
}

/// Inner angles of the Euclidean triangle with side lengths `l`; angle `a`
/// is opposite side `l[a]`.
///
/// Each angle is `atan2(4·area, l_b² + l_c² - l_a²)`, the cosine law with the
/// sine supplied by a stable area, so accuracy does not degrade near
/// degenerate triangles.
pub fn inner_angles<T: Real>(l: [T; 3]) -> Result<AngleTriple<T>, GeometryError> {
    if !in_domain(l) {
        return Err(outside(l));
    }
    let a4 = area4(l);
    let sq = [l[0] * l[0], l[1] * l[1], l[2] * l[2]];
    let ang = |a: usize| {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        a4.atan2(sq[b] + sq[c] - sq[a])
    };
    Ok(AngleTriple([ang(0), ang(1), ang(2)]))
}

/// Continuous extension of [`inner_angles`] to all positive length triples:
/// a side at least as long as the other two together gets `π`, the others `0`.
pub fn extended_angles<T: Real>(l: [T; 3]) -> Result<AngleTriple<T>, GeometryError> {
    if let Some(&bad) = l.iter().find(|x| !(x.is_finite() && **x > T::zero())) {
        return Err(GeometryError::NonPositiveLength(bad.to_f64_lossy()));
    }
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        if l[i] >= l[j] + l[k] {
            let mut t = [T::zero(); 3];
            t[i] = T::PI();
            return Ok(AngleTriple(t));
        }
    }
    inner_angles(l)
}

/// `cot θ_a = (l_b² + l_c² - l_a²) / (4·area)` for each corner.
pub fn cotangents<T: Real>(l: [T; 3]) -> Result<[T; 3], GeometryError> {
    if !in_domain(l) {
        return Err(outside(l));
    }
    let a4 = area4(l);
    let sq = [l[0] * l[0], l[1] * l[1], l[2] * l[2]];
    Ok([
        (sq[1] + sq[2] - sq[0]) / a4,
        (sq[0] + sq[2] - sq[1]) / a4,
        (sq[0] + sq[1] - sq[2]) / a4,
    ])
}

/// Closed-form `∂θ_a/∂u_b` for one face under vertex scaling.
///
/// Off-diagonal entries are `½ cot θ_c` with `c` the remaining corner; the
/// diagonal is minus the sum of the row's off-diagonal entries, so the matrix
/// is symmetric and annihilates `(1, 1, 1)`.
pub fn angle_jacobian<T: Real>(l: [T; 3]) -> Result<[[T; 3]; 3], GeometryError> {
    let cot = cotangents(l)?;
    let half = T::lit(0.5);
    let mut j = [[T::zero(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                j[a][b] = half * cot[3 - a - b];
            }
        }
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        j[a][a] = -half * (cot[b] + cot[c]);
    }
    Ok(j)
}

/// Radius `δ(ε)` of the sup-norm ball of conformal factors that moves every
/// angle of an `ε`-nondegenerate triangle by at most `ε/2`:
///
/// `δ = ¼ log(1 + (2 sin²ε / 3)(1 - cos(ε/4)))`.
pub fn delta_of_epsilon<T: Real>(eps: T) -> Result<T, GeometryError> {
    let upper = T::FRAC_PI_3() * (T::one() + T::lit(4.0) * T::epsilon());
    if !(eps > T::zero() && eps <= upper) {
        return Err(GeometryError::EpsilonOutOfRange(eps.to_f64_lossy()));
    }
    let s = eps.sin();
    // 1 - cos(x) = 2 sin²(x/2), kept exact for small eps
    let h = (eps / T::lit(8.0)).sin();
    let one_minus_cos = T::lit(2.0) * h * h;
    Ok(T::lit(0.25) * (T::lit(2.0) * s * s / T::lit(3.0) * one_minus_cos).ln_1p())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn equilateral_and_right_triangles() {
        let t = inner_angles([1.0, 1.0, 1.0]).unwrap();
        for a in t.0 {
            assert_abs_diff_eq!(a, FRAC_PI_3, epsilon = 1e-15);
        }
        let r = inner_angles([3.0, 4.0, 5.0]).unwrap();
        assert_abs_diff_eq!(r[2], FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(r[0], (3.0f64 / 5.0).asin(), epsilon = 1e-15);
    }

    #[test]
    fn inner_angles_reject_degenerate_input() {
        assert!(matches!(
            inner_angles([2.0, 1.0, 1.0]),
            Err(GeometryError::OutsideDomain { .. })
        ));
        assert!(inner_angles([3.0, 1.0, 1.0]).is_err());
        assert!(inner_angles([0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn extended_angles_on_and_off_the_domain() {
        assert_eq!(extended_angles([2.0, 1.0, 1.0]).unwrap().0, [PI, 0.0, 0.0]);
        assert_eq!(extended_angles([1.0, 5.0, 1.0]).unwrap().0, [0.0, PI, 0.0]);
        assert_eq!(
            extended_angles([1.0, 1.0, 1.0]).unwrap(),
            inner_angles([1.0, 1.0, 1.0]).unwrap()
        );
        assert!(matches!(
            extended_angles([1.0, -1.0, 1.0]),
            Err(GeometryError::NonPositiveLength(_))
        ));
        assert!(extended_angles([1.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn extended_angles_continuous_across_boundary() {
        let inside = extended_angles::<f64>([1.0 - 1e-9, 0.5, 0.5]).unwrap();
        let outside = extended_angles::<f64>([1.0 + 1e-9, 0.5, 0.5]).unwrap();
        for a in 0..3 {
            assert!((inside[a] - outside[a]).abs() < 1e-3);
        }
    }

    #[test]
    fn jacobian_of_equilateral_face() {
        let j = angle_jacobian([1.0, 1.0, 1.0]).unwrap();
        let off = 1.0 / (2.0 * 3f64.sqrt());
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { -1.0 / 3f64.sqrt() } else { off };
                assert_abs_diff_eq!(j[a][b], expect, epsilon = 1e-14);
            }
        }
    }

    /// Central differences of the angles of `u * l`, independent of the
    /// closed-form Jacobian.
    fn fd_jacobian(l: [f64; 3], h: f64) -> [[f64; 3]; 3] {
        let scaled = |u: [f64; 3]| {
            let s = [
                l[0] * ((u[1] + u[2]) / 2.0).exp(),
                l[1] * ((u[0] + u[2]) / 2.0).exp(),
                l[2] * ((u[0] + u[1]) / 2.0).exp(),
            ];
            let c = |a: usize| {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                ((s[b] * s[b] + s[c] * s[c] - s[a] * s[a]) / (2.0 * s[b] * s[c])).acos()
            };
            [c(0), c(1), c(2)]
        };
        let mut j = [[0.0; 3]; 3];
        for b in 0..3 {
            let mut up = [0.0; 3];
            let mut dn = [0.0; 3];
            up[b] = h;
            dn[b] = -h;
            let (p, m) = (scaled(up), scaled(dn));
            for a in 0..3 {
                j[a][b] = (p[a] - m[a]) / (2.0 * h);
            }
        }
        j
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for l in [[3.0, 4.0, 5.0], [1.0, 1.2, 0.7], [0.3, 0.35, 0.6]] {
            let j = angle_jacobian(l).unwrap();
            let fd = fd_jacobian(l, 1e-5);
            for a in 0..3 {
                for b in 0..3 {
                    assert_abs_diff_eq!(j[a][b], fd[a][b], epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn delta_closed_form_values() {
        // 0.25 * ln(1 + 0.5 * (1 - cos(pi/12)))
        assert_abs_diff_eq!(
            delta_of_epsilon(FRAC_PI_3).unwrap(),
            4.223_395_829_845_799e-3,
            epsilon = 1e-15
        );
        assert!((delta_of_epsilon(FRAC_PI_3).unwrap() - 4.2234e-3).abs() < 1e-7);
        // small-eps asymptote: delta / eps^4 -> 1/192
        let ratio = delta_of_epsilon(1e-3).unwrap() / 1e-12;
        assert_abs_diff_eq!(ratio, 1.0 / 192.0, epsilon = 1e-8);
        assert!(delta_of_epsilon(0.0).is_err());
        assert!(delta_of_epsilon(1.1).is_err());
        assert!(delta_of_epsilon(-0.1).is_err());
    }

    #[test]
    fn delta_is_increasing() {
        let mut prev = 0.0;
        for k in 1..=200 {
            let d = delta_of_epsilon(FRAC_PI_3 * k as f64 / 200.0).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn works_in_single_precision() {
        let t = inner_angles([1.0f32, 1.0, 1.0]).unwrap();
        assert!((t.sum() - std::f32::consts::PI).abs() < 1e-6);
        assert!(delta_of_epsilon(std::f32::consts::FRAC_PI_3).is_ok());
    }

    fn triangle() -> impl Strategy<Value = [f64; 3]> {
        (0.05f64..10.0, 0.05f64..10.0, 0.01f64..0.99).prop_map(|(a, b, t)| {
            // third side strictly between |a-b| and a+b
            let lo = (a - b).abs();
            let hi = a + b;
            [a, b, lo + (hi - lo) * t]
        })
    }

    proptest! {
        #[test]
        fn angle_sum_is_pi(l in triangle()) {
            let t = inner_angles(l).unwrap();
            prop_assert!((t.sum() - PI).abs() < 1e-12);
            prop_assert_eq!(extended_angles(l).unwrap(), t);
        }

        #[test]
        fn extended_sum_is_pi_everywhere(l in prop::array::uniform3(1e-3f64..10.0)) {
            let t = extended_angles(l).unwrap();
            prop_assert!((t.sum() - PI).abs() < 1e-10);
            prop_assert!(t.0.iter().all(|&a| (0.0..=PI).contains(&a)));
        }

        #[test]
        fn jacobian_symmetric_with_zero_row_sums(l in triangle()) {
            let j = angle_jacobian(l).unwrap();
            for a in 0..3 {
                prop_assert!((j[a][0] + j[a][1] + j[a][2]).abs() <= 1e-9 * (1.0 + j[a][a].abs()));
                for b in 0..3 {
                    prop_assert_eq!(j[a][b], j[b][a]);
                }
            }
        }
    }
}
