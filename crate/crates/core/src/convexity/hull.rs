use rand::seq::index;
use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Curvature, Point, Space};
use crate::regions::{metrics, PointCloud};
use crate::rng;
use crate::vector::Vector;

use super::{certify, min_norm_to, HemisphereCertificate};

/// Distance in the affine model below which a query counts as inside.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

// Relative duality gap for membership; the corral usually terminates exactly first.
const MEMBERSHIP_GAP: f64 = 1e-15;

/// A cloud carried into the affine model where geodesic hulls are Euclidean
/// hulls: the identity on `R^n`, the Klein projection on `H^n`, and on `S^n` a
/// reflection taking the certificate direction to `e` followed by the
/// gnomonic projection.
pub struct ProjectedHull {
    space: Space,
    /// Unit vector `u` of the Householder reflection `x - 2 <u, x> u`.
    mirror: Option<Vector>,
    certificate: Option<HemisphereCertificate>,
    vertices: Vec<Vector>,
}

impl ProjectedHull {
    pub fn new(space: &Space, cloud: &PointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        for p in cloud.points() {
            space.check_len(p.coords().len())?;
        }
        let (mirror, certificate) = match space.curvature() {
            Curvature::Sphere => {
                let cert = certify(space, cloud)?;
                let u = cert.direction() - *space.base_point().coords();
                let mirror = (u.norm() > 1e-15).then(|| u.scale(1.0 / u.norm()));
                (mirror, Some(cert))
            }
            _ => (None, None),
        };
        let mut hull = ProjectedHull { space: *space, mirror, certificate, vertices: Vec::new() };
        hull.vertices = cloud.points().iter().map(|p| hull.project(p)).collect::<Result<_>>()?;
        Ok(hull)
    }

    pub fn certificate(&self) -> Option<&HemisphereCertificate> {
        self.certificate.as_ref()
    }

    /// Projected cloud points.
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    fn reflect(&self, x: &Vector) -> Vector {
        match &self.mirror {
            Some(u) => x.add_scaled(-2.0 * u.dot(x), u),
            None => *x,
        }
    }

    /// Affine-model image of `x`.
    pub fn project(&self, x: &Point) -> Result<Vector> {
        match self.space.curvature() {
            Curvature::Euclidean => Ok(*x.coords()),
            Curvature::Hyperbolic => self.space.project_gnomonic(x),
            Curvature::Sphere => {
                let p = self.space.normalize_to_space(&self.reflect(x.coords()))?;
                self.space.project_gnomonic(&p)
            }
        }
    }

    /// Inverse of [`ProjectedHull::project`].
    pub fn lift(&self, y: &Vector) -> Result<Point> {
        match self.space.curvature() {
            Curvature::Euclidean => self.space.point(y.as_slice()),
            Curvature::Hyperbolic => self.space.unproject_gnomonic(y),
            Curvature::Sphere => {
                let p = self.space.unproject_gnomonic(y)?;
                self.space.normalize_to_space(&self.reflect(p.coords()))
            }
        }
    }

    /// Distance in the affine model from the projected query to the hull.
    pub fn gap(&self, query: &Point) -> Result<f64> {
        let q = self.project(query)?;
        let shifted: Vec<Vector> = self.vertices.iter().map(|v| *v - q).collect();
        Ok(min_norm_to(&shifted, MEMBERSHIP_GAP).point.norm())
    }

    pub fn contains(&self, query: &Point) -> Result<bool> {
        self.space.check_len(query.coords().len())?;
        if let Some(cert) = &self.certificate {
            // The hull lies in the open hemisphere around z.
            if cert.z.dot(query.coords()) <= 0.0 {
                return Ok(false);
            }
        }
        Ok(self.gap(query)? <= MEMBERSHIP_TOLERANCE)
    }
}

/// Geodesic convex hull membership; spherical clouds need a hemisphere
/// certificate.
pub fn hull_contains(space: &Space, cloud: &PointCloud, query: &Point) -> Result<bool> {
    ProjectedHull::new(space, cloud)?.contains(query)
}

/// Result of [`hull_diameter_check`].
#[derive(Clone, Debug, Serialize)]
pub struct HullDiameter {
    pub cloud: f64,
    /// Diameter of the cloud together with the hull samples.
    pub hull: f64,
    pub hull_samples: usize,
}

/// Diameter of the cloud against the diameter of the cloud plus
/// `hull_samples` random convex combinations formed in the affine model.
///
/// Each combination mixes `k` distinct cloud points, `k` uniform in
/// `2..=min(n + 1, m)`, with uniform weights on the simplex.
pub fn hull_diameter_check(space: &Space, cloud: &PointCloud, hull_samples: usize, seed: u64) -> Result<HullDiameter> {
    let (diam, _, _) = metrics::diameter(space, cloud)?;
    if space.curvature() == Curvature::Sphere && diam > std::f64::consts::FRAC_PI_2 {
        return Err(Error::Hypothesis(format!("spherical hull diameter check needs diam <= pi/2, got {diam}")));
    }
    let hull = ProjectedHull::new(space, cloud)?;
    let m = hull.vertices.len();
    let kmax = (space.dim() + 1).min(m);
    let mut points = cloud.points().to_vec();
    if kmax >= 2 {
        let samples = rng::chunked_map(seed, hull_samples, |r, _| {
            let k = r.gen_range(2..=kmax);
            let picks = index::sample(r, m, k);
            let weights: Vec<f64> = (0..k).map(|_| r.sample::<f64, _>(Exp1)).collect();
            let total: f64 = weights.iter().sum();
            let y = picks
                .iter()
                .zip(&weights)
                .fold(Vector::zeros(space.ambient_dim()), |acc, (i, w)| acc.add_scaled(w / total, &hull.vertices[i]));
            hull.lift(&y)
        });
        for p in samples {
            points.push(p?);
        }
    }
    let (hull_diam, _, _) = metrics::point_diameter(space, &points)?;
    Ok(HullDiameter { cloud: diam, hull: hull_diam, hull_samples })
}
