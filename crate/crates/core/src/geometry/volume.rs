use std::f64::consts::PI;

use super::quadrature::integrate;
use super::Curvature;

const VOLUME_REL_TOL: f64 = 1e-12;

/// `Gamma(k / 2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    debug_assert!(k >= 1);
    let (mut g, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while 2.0 * x < k as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere `S^k` in `R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    let m = k + 1;
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m)
}

/// `s(t)^(n-1)` with `s = sin, t, sinh` by curvature.
#[inline]
pub(crate) fn radial_density(curvature: Curvature, dim: usize, t: f64) -> f64 {
    let s = match curvature {
        Curvature::Sphere => t.sin().max(0.0),
        Curvature::Euclidean => t,
        Curvature::Hyperbolic => t.sinh(),
    };
    s.powi(dim as i32 - 1)
}

pub(crate) fn ball_volume(curvature: Curvature, dim: usize, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let omega = sphere_area(dim - 1);
    if curvature == Curvature::Euclidean {
        return omega * r.powi(dim as i32) / dim as f64;
    }
    // Split at pi/2 so each panel sees a monotone integrand.
    let f = |t: f64| radial_density(curvature, dim, t);
    let radial = if curvature == Curvature::Sphere && r > PI / 2.0 {
        integrate(f, 0.0, PI / 2.0, VOLUME_REL_TOL) + integrate(f, PI / 2.0, r, VOLUME_REL_TOL)
    } else {
        integrate(f, 0.0, r, VOLUME_REL_TOL)
    };
    omega * radial
}

// 5-point Gauss-Legendre on [-1, 1].
const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

const TABLE_SEGMENTS: usize = 512;

/// Inverse-CDF sampler for the distance from the center of a uniformly
/// distributed point in a ball of radius `r`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    curvature: Curvature,
    dim: usize,
    radius: f64,
    kind: ProfileKind,
}

#[derive(Clone, Debug)]
enum ProfileKind {
    /// `R^n`: `t = r u^(1/n)`.
    Power,
    /// `n = 2` on a curved model: `t = 2 asin(sqrt(u) sin(r/2))` or the sinh analogue.
    HalfAngle { scaled: f64 },
    /// Cumulative table plus safeguarded Newton refinement.
    Table { knots: Vec<f64>, cumulative: Vec<f64> },
}

impl RadialProfile {
    pub fn new(curvature: Curvature, dim: usize, radius: f64) -> Self {
        let kind = match (curvature, dim) {
            (Curvature::Euclidean, _) => ProfileKind::Power,
            (Curvature::Sphere, 2) => ProfileKind::HalfAngle { scaled: (0.5 * radius).sin() },
            (Curvature::Hyperbolic, 2) => ProfileKind::HalfAngle { scaled: (0.5 * radius).sinh() },
            _ => {
                let h = radius / TABLE_SEGMENTS as f64;
                let knots: Vec<f64> = (0..=TABLE_SEGMENTS).map(|k| k as f64 * h).collect();
                let mut cumulative = Vec::with_capacity(knots.len());
                let mut acc = 0.0;
                cumulative.push(0.0);
                for w in knots.windows(2) {
                    acc += integrate(|t| radial_density(curvature, dim, t), w[0], w[1], 1e-13);
                    cumulative.push(acc);
                }
                ProfileKind::Table { knots, cumulative }
            }
        };
        RadialProfile { curvature, dim, radius, kind }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn partial(&self, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        GL5_X.iter().zip(GL5_W).map(|(x, w)| w * radial_density(self.curvature, self.dim, c + h * x)).sum::<f64>() * h
    }

    /// Maps a uniform `u` in `[0, 1)` to a radius.
    pub fn invert(&self, u: f64) -> f64 {
        match &self.kind {
            ProfileKind::Power => self.radius * u.powf(1.0 / self.dim as f64),
            ProfileKind::HalfAngle { scaled } => {
                let s = u.sqrt() * scaled;
                let t = match self.curvature {
                    Curvature::Sphere => 2.0 * s.min(1.0).asin(),
                    _ => 2.0 * s.asinh(),
                };
                t.min(self.radius)
            }
            ProfileKind::Table { knots, cumulative } => {
                let total = *cumulative.last().unwrap();
                let target = u * total;
                let k = match cumulative.binary_search_by(|c| c.total_cmp(&target)) {
                    Ok(i) => return knots[i],
                    Err(i) => i - 1,
                };
                let (mut lo, mut hi) = (knots[k], knots[k + 1]);
                let rem = target - cumulative[k];
                let seg = cumulative[k + 1] - cumulative[k];
                let mut t = lo + (hi - lo) * (rem / seg);
                for _ in 0..8 {
                    let f = self.partial(knots[k], t) - rem;
                    if f.abs() <= 1e-14 * seg {
                        break;
                    }
                    if f > 0.0 {
                        hi = t;
                    } else {
                        lo = t;
                    }
                    let d = radial_density(self.curvature, self.dim, t);
                    let mut next = if d > 0.0 { t - f / d } else { 0.5 * (lo + hi) };
                    if !(next >= lo && next <= hi) {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - t).abs() <= 1e-15 * self.radius.max(1.0) {
                        t = next;
                        break;
                    }
                    t = next;
                }
                t
            }
        }
    }

    /// CDF of the radius, `P(T <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.radius);
        ball_volume(self.curvature, self.dim, t) / ball_volume(self.curvature, self.dim, self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn inversion_matches_cdf() {
        for (c, n, r) in [
            (Curvature::Sphere, 2, 2.5),
            (Curvature::Sphere, 3, 1.3),
            (Curvature::Sphere, 4, 3.0),
            (Curvature::Hyperbolic, 2, 4.0),
            (Curvature::Hyperbolic, 3, 2.0),
            (Curvature::Euclidean, 3, 0.7),
        ] {
            let p = RadialProfile::new(c, n, r);
            for i in 1..50 {
                let u = i as f64 / 50.0;
                let t = p.invert(u);
                assert!((p.cdf(t) - u).abs() < 1e-9, "{c:?} n={n}: cdf({t}) = {} != {u}", p.cdf(t));
            }
        }
    }
}
