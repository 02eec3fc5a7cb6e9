use nalgebra::{DMatrix, DVector};

use crate::vector::Vector;

/// Duality-gap tolerance, relative to the largest squared input norm.
pub const GAP_TOLERANCE: f64 = 1e-10;

// Barycentric weights at or below this are dropped from the corral.
const WEIGHT_FLOOR: f64 = 1e-14;

/// Result of the minimum-norm-point search: the nearest point of the convex
/// hull to the origin and its barycentric weights.
#[derive(Clone, Debug)]
pub struct MinNorm {
    pub point: Vector,
    /// `(input index, weight)` pairs of the final corral.
    pub weights: Vec<(usize, f64)>,
    /// `|x|^2 - min_i <x, p_i>` at termination.
    pub gap: f64,
}

/// Nearest point of `conv(points)` to the origin; the zero vector when the
/// hull contains the origin.
///
/// # Panics
/// On an empty input.
pub fn min_norm_point(points: &[Vector]) -> Vector {
    min_norm(points).point
}

/// Wolfe's corral algorithm, stopping at a duality gap of [`GAP_TOLERANCE`].
pub fn min_norm(points: &[Vector]) -> MinNorm {
    min_norm_to(points, GAP_TOLERANCE)
}

/// [`min_norm`] with a caller-chosen relative gap tolerance.
pub fn min_norm_to(points: &[Vector], rel_gap: f64) -> MinNorm {
    assert!(!points.is_empty(), "minimum norm point of an empty set");
    let dim = points[0].len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let combine = |weights: &[(usize, f64)]| {
        weights.iter().fold(Vector::zeros(dim), |acc, &(i, w)| acc.add_scaled(w, &points[i]))
    };

    let start = (0..points.len()).min_by(|&a, &b| points[a].norm_squared().total_cmp(&points[b].norm_squared())).unwrap();
    let mut corral: Vec<(usize, f64)> = vec![(start, 1.0)];
    let mut x = points[start];
    let mut gap = f64::INFINITY;

    for _ in 0..(50 * (points.len() + dim + 1)) {
        let xx = x.norm_squared();
        if xx <= 1e-24 * scale {
            return MinNorm { point: Vector::zeros(dim), weights: corral, gap: 0.0 };
        }
        let (j, xj) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, x.dot(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        gap = xx - xj;
        if gap <= rel_gap * scale || corral.iter().any(|&(i, _)| i == j) {
            break;
        }
        corral.push((j, 0.0));

        // Minor cycle: move toward the affine minimizer of the corral,
        // dropping points whose weight would go negative.
        loop {
            let Some(alpha) = affine_minimizer(points, &corral) else {
                corral.retain(|&(_, w)| w > WEIGHT_FLOOR);
                break;
            };
            if alpha.iter().all(|&a| a > WEIGHT_FLOOR) {
                for (c, a) in corral.iter_mut().zip(&alpha) {
                    c.1 = *a;
                }
                break;
            }
            let theta = corral
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= WEIGHT_FLOOR)
                .map(|(&(_, w), &a)| if w - a > 0.0 { w / (w - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (c, a) in corral.iter_mut().zip(&alpha) {
                c.1 += theta * (a - c.1);
            }
            corral.retain(|&(_, w)| w > WEIGHT_FLOOR);
            let total: f64 = corral.iter().map(|c| c.1).sum();
            for c in corral.iter_mut() {
                c.1 /= total;
            }
        }
        x = combine(&corral);
    }
    MinNorm { point: x, weights: corral, gap }
}

/// Weights `alpha` (summing to 1) minimizing `|sum alpha_i p_i|` over the
/// affine hull of the corral, from the bordered Gram system.
fn affine_minimizer(points: &[Vector], corral: &[(usize, f64)]) -> Option<Vec<f64>> {
    let k = corral.len();
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (a, &(i, _)) in corral.iter().enumerate() {
        for (b, &(j, _)) in corral.iter().enumerate() {
            m[(a, b)] = points[i].dot(&points[j]);
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.lu().solve(&rhs)?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c)
    }

    #[test]
    fn small_examples() {
        let z = min_norm_point(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]);
        assert!((z - v(&[0.5, 0.5])).norm() < 1e-12);
        let z = min_norm_point(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])]);
        assert_eq!(z, v(&[0.0, 0.0]));
        let z = min_norm_point(&[v(&[2.0, 1.0])]);
        assert_eq!(z, v(&[2.0, 1.0]));
        // Triangle around the origin.
        let z = min_norm_point(&[v(&[1.0, 0.1]), v(&[-0.5, 0.9]), v(&[-0.5, -0.9])]);
        assert_eq!(z, v(&[0.0, 0.0]));
    }

    /// Solves a small dense system by Gaussian elimination with partial pivoting.
    fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-12 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        Some(x)
    }

    /// Exhaustive oracle in R^3: the nearest point of the hull lies in the
    /// relative interior of a face spanned by at most three points, unless a
    /// tetrahedron of the inputs contains the origin.
    fn enumeration_oracle(points: &[Vector]) -> f64 {
        let n = points.len();
        let mut best = points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                subsets.push(vec![a, b]);
                for c in b + 1..n {
                    subsets.push(vec![a, b, c]);
                    for d in c + 1..n {
                        // Origin inside the tetrahedron?
                        let idx = [a, b, c, d];
                        let mut m = vec![vec![0.0; 4]; 4];
                        for (col, &i) in idx.iter().enumerate() {
                            for row in 0..3 {
                                m[row][col] = points[i][row];
                            }
                            m[3][col] = 1.0;
                        }
                        if let Some(w) = solve(m, vec![0.0, 0.0, 0.0, 1.0]) {
                            if w.iter().all(|&x| x >= 0.0) {
                                return 0.0;
                            }
                        }
                    }
                }
            }
        }
        for s in subsets {
            let k = s.len();
            let mut m = vec![vec![0.0; k + 1]; k + 1];
            for (a, &i) in s.iter().enumerate() {
                for (b, &j) in s.iter().enumerate() {
                    m[a][b] = points[i].dot(&points[j]);
                }
                m[a][k] = 1.0;
                m[k][a] = 1.0;
            }
            let mut rhs = vec![0.0; k + 1];
            rhs[k] = 1.0;
            if let Some(w) = solve(m, rhs) {
                if w[..k].iter().all(|&x| x >= 0.0) {
                    let p = s.iter().zip(&w).fold(Vector::zeros(3), |acc, (&i, &x)| acc.add_scaled(x, &points[i]));
                    best = best.min(p.norm());
                }
            }
        }
        best
    }

    #[test]
    fn agrees_with_enumeration_oracle() {
        let mut r = rng::stream(17, 0);
        for trial in 0..6 {
            // Shifted so the origin is usually outside the hull.
            let shift = [1.2, 0.3, 2.0][trial % 3];
            let pts: Vec<Vector> = (0..20)
                .map(|_| v(&[r.gen_range(-1.0..1.0) + shift, r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0) + 0.5 * shift]))
                .collect();
            let res = min_norm(&pts);
            let oracle = enumeration_oracle(&pts);
            assert!((res.point.norm() - oracle).abs() < 1e-6, "{} vs {oracle}", res.point.norm());
            // Variational inequality of the nearest point.
            for p in &pts {
                assert!(res.point.dot(&(*p - res.point)) >= -1e-8);
            }
            let w: f64 = res.weights.iter().map(|c| c.1).sum();
            assert!((w - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_oracle_agrees_to_1e6() {
        // Nearest point on a single segment and triangle, where a fine grid
        // plus closed-form projection gives 1e-6 agreement.
        let a = v(&[1.0, 2.0, 0.5]);
        let b = v(&[2.0, -1.0, 1.0]);
        let c = v(&[1.5, 0.5, -1.0]);
        let z = min_norm_point(&[a, b, c]);
        // Closed form via the 2x2 normal equations of the triangle plane.
        let (u, w) = (b - a, c - a);
        let (uu, uw, ww) = (u.dot(&u), u.dot(&w), w.dot(&w));
        let (au, aw) = (a.dot(&u), a.dot(&w));
        let det = uu * ww - uw * uw;
        let s = (-au * ww + aw * uw) / det;
        let t = (-aw * uu + au * uw) / det;
        assert!(s >= 0.0 && t >= 0.0 && s + t <= 1.0, "projection falls inside: {s} {t}");
        let exact = a.add_scaled(s, &u).add_scaled(t, &w);
        assert!((z - exact).norm() < 1e-9);
    }
}
