use serde::{Deserialize, Serialize};

use super::{Curvature, Point, Space};
use crate::error::{Error, Result};
use crate::vector::Vector;

/// `|form(x, p) - offset|` at or below this is reported as lying on the hyperplane.
pub const SIDE_TOLERANCE: f64 = 1e-12;

/// Which closed side of a hyperplane is `H^+`; serialized as `1` / `-1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl From<Orientation> for i8 {
    fn from(o: Orientation) -> i8 {
        match o {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Orientation {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Orientation::Positive),
            -1 => Ok(Orientation::Negative),
            other => Err(format!("orientation must be 1 or -1, got {other}")),
        }
    }
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Option<Self> {
        if s > 0.0 {
            Some(Orientation::Positive)
        } else if s < 0.0 {
            Some(Orientation::Negative)
        } else {
            None
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Negative = -1,
    On = 0,
    Positive = 1,
}

impl Side {
    pub fn sign(self) -> i8 {
        self as i8
    }
}

/// Totally geodesic hypersurface `{x : form(x, p) = offset}` with the closed
/// positive half-space `H^+ = {x : orientation * (form(x, p) - offset) >= 0}`.
///
/// The normal is stored scaled to `|form(p, p)| = 1`. `offset` is zero except
/// in `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hyperplane {
    normal: Vector,
    offset: f64,
    orientation: Orientation,
}

impl Hyperplane {
    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Same hyperplane with `H^+` and `H^-` exchanged.
    pub fn flipped(&self) -> Self {
        Hyperplane { orientation: self.orientation.flipped(), ..*self }
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Hyperplane { orientation, ..*self }
    }
}

impl Space {
    /// Validates and normalizes a hyperplane.
    pub fn hyperplane(&self, normal: &[f64], offset: f64, orientation: Orientation) -> Result<Hyperplane> {
        self.check_len(normal.len())?;
        let p = Vector::from_slice(normal);
        if !p.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidHyperplane("non-finite normal or offset".into()));
        }
        let q = self.form(&p, &p);
        match self.curvature() {
            Curvature::Hyperbolic if !(q < 0.0) => {
                return Err(Error::InvalidHyperplane(format!(
                    "hyperbolic normal must satisfy B(p,p) < 0, got {q}"
                )))
            }
            Curvature::Sphere | Curvature::Euclidean if !(q > 0.0) => {
                return Err(Error::InvalidHyperplane("normal must be nonzero".into()))
            }
            _ => {}
        }
        if self.curvature() != Curvature::Euclidean && offset != 0.0 {
            return Err(Error::InvalidHyperplane(
                "a nonzero offset does not describe a totally geodesic hypersurface on S^n or H^n".into(),
            ));
        }
        match super::unit_scale(q.abs()) {
            Some(s) => Ok(Hyperplane { normal: p.scale(s), offset: offset * s, orientation }),
            None => Ok(Hyperplane { normal: p, offset, orientation }),
        }
    }

    /// Signed level `orientation * (form(x, p) - offset)`.
    #[inline]
    pub fn level(&self, h: &Hyperplane, x: &Point) -> f64 {
        h.orientation.sign() * (self.form(x.coords(), &h.normal) - h.offset)
    }

    #[inline]
    pub fn side(&self, h: &Hyperplane, x: &Point) -> Side {
        let v = self.level(h, x);
        if v.abs() <= SIDE_TOLERANCE {
            Side::On
        } else if v > 0.0 {
            Side::Positive
        } else {
            Side::Negative
        }
    }

    /// Signed geodesic distance from `x` to the hyperplane, positive on `H^+`.
    pub fn signed_distance(&self, h: &Hyperplane, x: &Point) -> f64 {
        let v = self.level(h, x);
        match self.curvature() {
            Curvature::Sphere => v.clamp(-1.0, 1.0).asin(),
            Curvature::Euclidean => v,
            Curvature::Hyperbolic => v.asinh(),
        }
    }

    /// Reflection `sigma_H` through the hyperplane, renormalized onto the model.
    #[inline]
    pub fn reflect(&self, h: &Hyperplane, x: &Point) -> Point {
        let pp = self.form(&h.normal, &h.normal);
        let c = 2.0 * (self.form(x.coords(), &h.normal) - h.offset) / pp;
        self.renormalize(x.coords().add_scaled(-c, &h.normal))
    }

    /// Perpendicular bisector of `[x, y]`, oriented so that `x` lies in `H^+`.
    pub fn bisector(&self, x: &Point, y: &Point) -> Result<Hyperplane> {
        let p = *x.coords() - *y.coords();
        let offset = match self.curvature() {
            Curvature::Euclidean => 0.5 * (x.coords().norm_squared() - y.coords().norm_squared()),
            _ => 0.0,
        };
        if p.norm_squared() < 1e-28 {
            return Err(Error::Degenerate("bisector of coincident points".into()));
        }
        if self.curvature() == Curvature::Sphere && (*x.coords() + *y.coords()).norm_squared() < 1e-24 {
            return Err(Error::Degenerate("antipodal points are equidistant from a whole sphere".into()));
        }
        let h = self.hyperplane(p.as_slice(), offset, Orientation::Positive)?;
        Ok(if self.level(&h, x) < 0.0 { h.flipped() } else { h })
    }

    /// A hyperplane through `pole` with the given tangent normal at `pole`.
    pub fn hyperplane_through(&self, pole: &Point, tangent_normal: &Vector, orientation: Orientation) -> Result<Hyperplane> {
        let u = self.unit_tangent(pole, tangent_normal)?;
        let offset = match self.curvature() {
            Curvature::Euclidean => u.vec().dot(pole.coords()),
            _ => 0.0,
        };
        self.hyperplane(u.vec().as_slice(), offset, orientation)
    }
}
