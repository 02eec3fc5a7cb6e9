//! Ambient-coordinate kernel for the three model spaces.
//!
//! Points of `S^n` are unit vectors of `R^{n+1}`; points of `H^n` live on the
//! upper sheet of the hyperboloid `B(x, x) = 1` where
//! `B(x, y) = x_n y_n - sum_{i<n} x_i y_i`; points of `R^n` are plain vectors.
//! The distinguished base point `e` is the last coordinate axis (the origin
//! for `R^n`).

mod hyperplane;
pub mod quadrature;
mod volume;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{Vector, MAX_AMBIENT};

pub use hyperplane::{Hyperplane, Orientation, Side, SIDE_TOLERANCE};
pub use volume::{sphere_area, RadialProfile};

/// Tolerance on the model-quadric equation when accepting a point.
pub const POINT_TOLERANCE: f64 = 1e-10;

/// Scale factor `1/sqrt(q)`, or `None` when `q` is already 1 to within a few
/// ulps so that re-validating stored coordinates leaves them bit-identical.
pub(crate) fn unit_scale(q: f64) -> Option<f64> {
    if (q - 1.0).abs() <= 4.0 * f64::EPSILON {
        None
    } else {
        Some(1.0 / q.sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    #[serde(alias = "spherical", alias = "s")]
    Sphere,
    #[serde(alias = "flat", alias = "r")]
    Euclidean,
    #[serde(alias = "hyperbolic_space", alias = "h")]
    Hyperbolic,
}

impl Curvature {
    pub fn sign(self) -> i32 {
        match self {
            Curvature::Sphere => 1,
            Curvature::Euclidean => 0,
            Curvature::Hyperbolic => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(Curvature::Sphere),
            0 => Some(Curvature::Euclidean),
            -1 => Some(Curvature::Hyperbolic),
            _ => None,
        }
    }
}

impl std::fmt::Display for Curvature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Curvature::Sphere => "sphere",
            Curvature::Euclidean => "euclidean",
            Curvature::Hyperbolic => "hyperbolic",
        })
    }
}

impl std::str::FromStr for Curvature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" | "spherical" | "s" | "+1" | "1" => Ok(Curvature::Sphere),
            "euclidean" | "flat" | "r" | "0" => Ok(Curvature::Euclidean),
            "hyperbolic" | "h" | "-1" => Ok(Curvature::Hyperbolic),
            other => Err(Error::InvalidSpace(format!("unknown space `{other}`"))),
        }
    }
}

/// A constant-curvature space of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct Space {
    curvature: Curvature,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    curvature: Curvature,
    dim: usize,
}

impl TryFrom<SpaceRepr> for Space {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        Space::new(r.curvature, r.dim)
    }
}

impl From<Space> for SpaceRepr {
    fn from(s: Space) -> Self {
        SpaceRepr { curvature: s.curvature, dim: s.dim }
    }
}

/// A point on the model of a [`Space`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vector);

impl Point {
    #[inline]
    pub fn coords(&self) -> &Vector {
        &self.0
    }

    /// Wraps coordinates already known to satisfy the model equation.
    #[inline]
    pub(crate) fn from_raw(v: Vector) -> Self {
        Point(v)
    }
}

/// A tangent vector at a base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangent {
    base: Point,
    vec: Vector,
}

impl Tangent {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn vec(&self) -> &Vector {
        &self.vec
    }
}

/// Closed geodesic ball `{x : d(x, center) <= radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Space {
    pub fn new(curvature: Curvature, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpace(format!("dimension must be at least 2, got {dim}")));
        }
        let space = Space { curvature, dim };
        if space.ambient_dim() > MAX_AMBIENT {
            return Err(Error::InvalidSpace(format!(
                "dimension {dim} exceeds the supported ambient size {MAX_AMBIENT}"
            )));
        }
        Ok(space)
    }

    pub fn sphere(dim: usize) -> Self {
        Self::new(Curvature::Sphere, dim).expect("valid sphere dimension")
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(Curvature::Euclidean, dim).expect("valid euclidean dimension")
    }

    pub fn hyperbolic(dim: usize) -> Self {
        Self::new(Curvature::Hyperbolic, dim).expect("valid hyperbolic dimension")
    }

    #[inline]
    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        match self.curvature {
            Curvature::Euclidean => self.dim,
            _ => self.dim + 1,
        }
    }

    /// The ambient bilinear form: `<x, y>` for curvature >= 0, `B(x, y)` for `H^n`.
    #[inline]
    pub fn form(&self, x: &Vector, y: &Vector) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self.curvature {
            Curvature::Hyperbolic => {
                let n = x.len() - 1;
                let spatial: f64 = x.as_slice()[..n].iter().zip(&y.as_slice()[..n]).map(|(a, b)| a * b).sum();
                x[n] * y[n] - spatial
            }
            _ => x.dot(y),
        }
    }

    /// [`Space::form`] with explicit length checks.
    pub fn checked_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.form(&Vector::from_slice(x), &Vector::from_slice(y)))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), got: len });
        }
        Ok(())
    }

    /// The distinguished base point `e` (origin for `R^n`).
    pub fn base_point(&self) -> Point {
        let n = self.ambient_dim();
        match self.curvature {
            Curvature::Euclidean => Point(Vector::zeros(n)),
            _ => Point(Vector::axis(n, n - 1)),
        }
    }

    /// Validates coordinates against the model equation and removes drift.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        self.check_len(coords.len())?;
        let v = Vector::from_slice(coords);
        if !v.is_finite() {
            return Err(Error::InvalidPoint(format!("non-finite coordinates {v:?}")));
        }
        match self.curvature {
            Curvature::Euclidean => Ok(Point(v)),
            Curvature::Sphere => {
                let q = v.norm_squared();
                if (q - 1.0).abs() > POINT_TOLERANCE {
                    return Err(Error::InvalidPoint(format!("<x,x> = {q}, expected 1")));
                }
                Ok(Point(unit_scale(q).map_or(v, |s| v.scale(s))))
            }
            Curvature::Hyperbolic => {
                let q = self.form(&v, &v);
                if (q - 1.0).abs() > POINT_TOLERANCE || v.last() < 1.0 - POINT_TOLERANCE {
                    return Err(Error::InvalidPoint(format!(
                        "B(x,x) = {q}, last coordinate {}; expected 1 and >= 1",
                        v.last()
                    )));
                }
                Ok(Point(unit_scale(q).map_or(v, |s| v.scale(s))))
            }
        }
    }

    /// Rescales `raw` onto the model quadric.
    pub fn normalize_to_space(&self, raw: &Vector) -> Result<Point> {
        self.check_len(raw.len())?;
        if !raw.is_finite() {
            return Err(Error::InvalidPoint(format!("non-finite coordinates {raw:?}")));
        }
        match self.curvature {
            Curvature::Euclidean => Ok(Point(*raw)),
            Curvature::Sphere => {
                let q = raw.norm_squared();
                if q <= f64::MIN_POSITIVE {
                    return Err(Error::InvalidPoint("cannot normalize the zero vector".into()));
                }
                Ok(Point(raw.scale(1.0 / q.sqrt())))
            }
            Curvature::Hyperbolic => {
                let q = self.form(raw, raw);
                if q <= 0.0 || raw.last() == 0.0 {
                    return Err(Error::InvalidPoint(format!(
                        "B(raw, raw) = {q}: not a timelike vector"
                    )));
                }
                let s = raw.last().signum() / q.sqrt();
                Ok(Point(raw.scale(s)))
            }
        }
    }

    /// Like [`Space::normalize_to_space`] for vectors known to be near the quadric.
    #[inline]
    pub(crate) fn renormalize(&self, raw: Vector) -> Point {
        match self.curvature {
            Curvature::Euclidean => Point(raw),
            Curvature::Sphere => Point(raw.scale(1.0 / raw.norm())),
            Curvature::Hyperbolic => {
                // Rescaling far from e moves every coordinate by ~t^2 eps; rebuild t instead.
                let q = self.form(&raw, &raw);
                let mut v = if (q - 1.0).abs() > 1e-6 { raw.scale(1.0 / q.sqrt()) } else { raw };
                let n = v.len() - 1;
                v[n] = (1.0 + v.as_slice()[..n].iter().map(|a| a * a).sum::<f64>()).sqrt();
                Point(v)
            }
        }
    }

    /// A monotone proxy for distance that needs no transcendental functions:
    /// squared chord for `S^n` and `R^n`, `-B(x-y, x-y) = 4 sinh^2(d/2)` for `H^n`.
    #[inline]
    pub fn chord2(&self, x: &Point, y: &Point) -> f64 {
        let d = x.0 - y.0;
        match self.curvature {
            Curvature::Hyperbolic => (-self.form(&d, &d)).max(0.0),
            _ => d.norm_squared(),
        }
    }

    /// Inverse of the [`Space::chord2`] relation.
    #[inline]
    pub fn distance_from_chord2(&self, c2: f64) -> f64 {
        let c = c2.max(0.0).sqrt();
        match self.curvature {
            Curvature::Euclidean => c,
            Curvature::Sphere => 2.0 * (0.5 * c).min(1.0).asin(),
            Curvature::Hyperbolic => 2.0 * (0.5 * c).asinh(),
        }
    }

    /// Chord value corresponding to geodesic distance `d`.
    pub fn chord2_from_distance(&self, d: f64) -> f64 {
        match self.curvature {
            Curvature::Euclidean => d * d,
            Curvature::Sphere => {
                let s = 2.0 * (0.5 * d.min(std::f64::consts::PI)).sin();
                s * s
            }
            Curvature::Hyperbolic => {
                let s = 2.0 * (0.5 * d).sinh();
                s * s
            }
        }
    }

    /// Geodesic distance.
    ///
    /// Evaluated as `2 atan2(|x-y|, |x+y|)` on the sphere and
    /// `2 asinh(sqrt(-B(x-y,x-y))/2)` on the hyperboloid; these agree with the
    /// clamped `arccos <x,y>` / `arcosh B(x,y)` but keep full precision near 0.
    #[inline]
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self.curvature {
            Curvature::Euclidean => (x.0 - y.0).norm(),
            Curvature::Sphere => 2.0 * (x.0 - y.0).norm().atan2((x.0 + y.0).norm()),
            Curvature::Hyperbolic => self.distance_from_chord2(self.chord2(x, y)),
        }
    }

    /// Inner product on tangent spaces (`-B` on `H^n`).
    #[inline]
    pub fn tangent_dot(&self, u: &Vector, v: &Vector) -> f64 {
        match self.curvature {
            Curvature::Hyperbolic => -self.form(u, v),
            _ => u.dot(v),
        }
    }

    /// Orthogonal projection of an ambient vector onto `T_z`.
    #[inline]
    pub fn project_tangent(&self, z: &Point, v: &Vector) -> Vector {
        match self.curvature {
            Curvature::Euclidean => *v,
            // B(z, z) = <z, z> = 1 on both curved models.
            _ => v.add_scaled(-self.form(v, &z.0), &z.0),
        }
    }

    pub fn tangent(&self, base: &Point, vec: &[f64]) -> Result<Tangent> {
        self.check_len(vec.len())?;
        let v = Vector::from_slice(vec);
        if self.curvature != Curvature::Euclidean {
            let off = self.form(&v, &base.0);
            if off.abs() > POINT_TOLERANCE {
                return Err(Error::InvalidTangent(format!("form(vec, base) = {off}, expected 0")));
            }
        }
        Ok(Tangent { base: *base, vec: v })
    }

    /// Unit tangent from an arbitrary ambient direction (projected then normalized).
    pub fn unit_tangent(&self, base: &Point, dir: &Vector) -> Result<Tangent> {
        let v = self.project_tangent(base, dir);
        let q = self.tangent_dot(&v, &v);
        if !(q > 1e-24) {
            return Err(Error::InvalidTangent("direction is normal to the model".into()));
        }
        Ok(Tangent { base: *base, vec: v.scale(1.0 / q.sqrt()) })
    }

    /// An orthonormal basis of `T_z` (with respect to [`Space::tangent_dot`]).
    pub fn tangent_basis(&self, z: &Point) -> Vec<Vector> {
        let n = self.ambient_dim();
        let mut basis: Vec<Vector> = Vec::with_capacity(self.dim);
        // Axes least aligned with z first keeps Gram-Schmidt well conditioned.
        let mut axes: Vec<usize> = (0..n).collect();
        axes.sort_by(|&a, &b| z.0[a].abs().total_cmp(&z.0[b].abs()));
        for i in axes {
            if basis.len() == self.dim {
                break;
            }
            let mut v = self.project_tangent(z, &Vector::axis(n, i));
            for b in &basis {
                v = v.add_scaled(-self.tangent_dot(&v, b), b);
            }
            let q = self.tangent_dot(&v, &v);
            if q > 1e-8 {
                basis.push(v.scale(1.0 / q.sqrt()));
            }
        }
        debug_assert_eq!(basis.len(), self.dim);
        basis
    }

    /// Point at arc length `t` along the geodesic with unit initial velocity `u`.
    pub fn geodesic_point(&self, u: &Tangent, t: f64) -> Result<Point> {
        let q = self.tangent_dot(&u.vec, &u.vec);
        if (q - 1.0).abs() > POINT_TOLERANCE {
            return Err(Error::InvalidTangent(format!("tangent is not unit: |u|^2 = {q}")));
        }
        Ok(self.geodesic_point_unchecked(&u.base, &u.vec, t))
    }

    #[inline]
    pub(crate) fn geodesic_point_unchecked(&self, z: &Point, u: &Vector, t: f64) -> Point {
        if t == 0.0 {
            return *z;
        }
        match self.curvature {
            Curvature::Euclidean => Point(z.0.add_scaled(t, u)),
            Curvature::Sphere => self.renormalize(z.0.scale(t.cos()).add_scaled(t.sin(), u)),
            Curvature::Hyperbolic => self.renormalize(z.0.scale(t.cosh()).add_scaled(t.sinh(), u)),
        }
    }

    /// Unit tangent at `z` pointing at `x`, and the distance `d(z, x)`.
    pub fn tangent_toward(&self, z: &Point, x: &Point) -> Result<(Tangent, f64)> {
        let t = self.distance(z, x);
        let w = match self.curvature {
            Curvature::Euclidean => x.0 - z.0,
            _ => self.project_tangent(z, &x.0),
        };
        let q = self.tangent_dot(&w, &w);
        if !(q > 1e-28) || t == 0.0 {
            return Err(Error::Degenerate(if self.curvature == Curvature::Sphere && t > 1.0 {
                "antipodal points have no unique geodesic".into()
            } else {
                "coincident points".into()
            }));
        }
        Ok((Tangent { base: *z, vec: w.scale(1.0 / q.sqrt()) }, t))
    }

    /// Geodesic midpoint of `[x, y]`.
    pub fn midpoint(&self, x: &Point, y: &Point) -> Result<Point> {
        match self.curvature {
            Curvature::Euclidean => Ok(Point((x.0 + y.0).scale(0.5))),
            // On both quadrics the midpoint is the normalized chord midpoint.
            _ => {
                let s = x.0 + y.0;
                if self.curvature == Curvature::Sphere && s.norm_squared() < 1e-24 {
                    return Err(Error::Degenerate("antipodal points have no unique midpoint".into()));
                }
                Ok(self.renormalize(s))
            }
        }
    }

    /// Gnomonic (Klein) projection `x / <x, e>` into the affine plane `e^perp + e`.
    pub fn project_gnomonic(&self, x: &Point) -> Result<Vector> {
        match self.curvature {
            Curvature::Euclidean => Err(Error::Hypothesis("gnomonic projection is only defined on S^n and H^n".into())),
            _ => {
                let h = x.0.last();
                if !(h > 0.0) {
                    return Err(Error::OutOfRange(format!(
                        "point {:?} is outside the open hemisphere around e",
                        x.0
                    )));
                }
                Ok(x.0.scale(1.0 / h))
            }
        }
    }

    /// Inverse of [`Space::project_gnomonic`] on its image.
    pub fn unproject_gnomonic(&self, y: &Vector) -> Result<Point> {
        self.check_len(y.len())?;
        match self.curvature {
            Curvature::Euclidean => Err(Error::Hypothesis("gnomonic projection is only defined on S^n and H^n".into())),
            Curvature::Sphere => self.normalize_to_space(y),
            Curvature::Hyperbolic => {
                if self.form(y, y) <= 0.0 {
                    return Err(Error::OutOfRange("affine point lies outside the Klein ball".into()));
                }
                self.normalize_to_space(y)
            }
        }
    }

    /// Largest admissible radius of a ball (`pi` on the sphere).
    pub fn max_radius(&self) -> f64 {
        match self.curvature {
            Curvature::Sphere => std::f64::consts::PI,
            _ => f64::INFINITY,
        }
    }

    pub fn ball(&self, center: Point, radius: f64) -> Result<Ball> {
        self.check_len(center.0.len())?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::OutOfRange(format!("ball radius must be positive and finite, got {radius}")));
        }
        if self.curvature == Curvature::Sphere && radius > std::f64::consts::PI {
            return Err(Error::OutOfRange(format!("spherical ball radius must be <= pi, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    /// Volume of a ball of radius `r`, by adaptive quadrature of the radial density.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() || r > self.max_radius() {
            return Err(Error::OutOfRange(format!("ball radius {r} outside (0, {}]", self.max_radius())));
        }
        Ok(volume::ball_volume(self.curvature, self.dim, r))
    }

    /// Radius `r` with `ball_volume(r) == volume`, by bisection to 1e-10.
    pub fn radius_for_volume(&self, volume: f64) -> Result<f64> {
        if !(volume > 0.0) {
            return Err(Error::OutOfRange(format!("volume must be positive, got {volume}")));
        }
        let mut hi = match self.curvature {
            Curvature::Sphere => {
                let total = volume::ball_volume(self.curvature, self.dim, std::f64::consts::PI);
                if volume > total {
                    return Err(Error::OutOfRange(format!("volume {volume} exceeds the sphere's {total}")));
                }
                std::f64::consts::PI
            }
            _ => {
                let mut hi = 1.0;
                while volume::ball_volume(self.curvature, self.dim, hi) < volume {
                    hi *= 2.0;
                }
                hi
            }
        };
        let mut lo = 0.0;
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if volume::ball_volume(self.curvature, self.dim, mid) < volume {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn ball_contains(&self, ball: &Ball, x: &Point) -> bool {
        self.distance(&ball.center, x) <= ball.radius
    }
}

#[cfg(test)]
mod tests;
