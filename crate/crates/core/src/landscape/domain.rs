use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Region agents live in: an axis-aligned box (2 or 3 axes) or the surface
/// of a sphere centered on the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Box { bounds: Vec<[f64; 2]> },
    SphereSurface { radius: f64 },
}

impl Domain {
    pub fn new_box(bounds: Vec<[f64; 2]>) -> Result<Self> {
        let d = Domain::Box { bounds };
        d.validate()?;
        Ok(d)
    }

    /// `[lo_x, hi_x] x [lo_y, hi_y]`.
    pub fn rect(x: [f64; 2], y: [f64; 2]) -> Result<Self> {
        Domain::new_box(vec![x, y])
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        let d = Domain::SphereSurface { radius };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Box { bounds } => {
                if !(2..=3).contains(&bounds.len()) {
                    return Err(Error::InvalidParams(format!(
                        "box domain needs 2 or 3 axes, got {}",
                        bounds.len()
                    )));
                }
                for (axis, [lo, hi]) in bounds.iter().enumerate() {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(Error::InvalidParams(format!(
                            "axis {axis} bounds [{lo}, {hi}] need lo < hi"
                        )));
                    }
                }
                Ok(())
            }
            Domain::SphereSurface { radius } => {
                if radius.is_finite() && *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(format!(
                        "sphere radius must be positive, got {radius}"
                    )))
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { bounds } => bounds.len(),
            Domain::SphereSurface { .. } => 3,
        }
    }

    /// Largest axis extent (box) or diameter (sphere).
    pub fn width(&self) -> f64 {
        match self {
            Domain::Box { bounds } => bounds.iter().map(|[lo, hi]| hi - lo).fold(0.0, f64::max),
            Domain::SphereSurface { radius } => 2.0 * radius,
        }
    }

    pub fn bounds_2d(&self) -> Option<([f64; 2], [f64; 2])> {
        match self {
            Domain::Box { bounds } if bounds.len() == 2 => Some((bounds[0], bounds[1])),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        match self {
            Domain::Box { bounds } => {
                bounds
                    .iter()
                    .zip(p.0.iter())
                    .all(|([lo, hi], c)| *c >= lo - tol && *c <= hi + tol)
                    && p.0[bounds.len()..].iter().all(|c| *c == 0.0)
            }
            Domain::SphereSurface { radius } => (p.norm() - radius).abs() <= tol,
        }
    }

    /// Nearest point of the domain: component-wise clamp for boxes, radial
    /// projection for the sphere (the origin projects to the north pole).
    pub fn clip(&self, p: Point) -> Point {
        match self {
            Domain::Box { bounds } => {
                let mut c = [0.0; 3];
                for (axis, [lo, hi]) in bounds.iter().enumerate() {
                    c[axis] = p.0[axis].clamp(*lo, *hi);
                }
                Point(c)
            }
            Domain::SphereSurface { radius } => {
                let n = p.norm();
                if n == 0.0 {
                    Point::xyz(0.0, 0.0, *radius)
                } else {
                    p * (radius / n)
                }
            }
        }
    }

    /// Euclidean distance in a box, great-circle distance on the sphere.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match self {
            Domain::Box { .. } => a.distance(b),
            Domain::SphereSurface { radius } => {
                let cos = (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
                radius * cos.acos()
            }
        }
    }
}
