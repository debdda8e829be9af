//! Fitness fields behind a single time-indexed evaluation interface.
//!
//! Every landscape exposes a nonnegative fitness: raw field values plus a
//! fixed affine shift chosen so the minimum over the domain is at least zero.

mod benchmarks;
mod domain;
mod image;
mod light;
pub mod oracle;
pub mod pgm;

use crate::dynamic::{self, Binding};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub use benchmarks::{
    make_gaussians, make_plane, make_rastrigin, make_schwefel, make_three_peaks,
    BenchmarkConstants, GaussianBump,
};
pub use domain::Domain;
pub use image::{image_landscape, load_image_field, ImageField};
pub use light::{make_light_field, LightField, LightSource};

/// Slack allowed when checking that a queried point is inside the domain.
pub const DOMAIN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    /// Sum of isotropic Gaussian bumps.
    Gaussians(Vec<GaussianBump>),
    /// Negated Rastrigin.
    Rastrigin,
    /// Negated Schwefel.
    Schwefel,
    Light(LightField),
    Image(ImageField),
    /// Height `z` on a sphere surface.
    SphereHeight,
    /// `slope . (x, y) + offset`; has no interior maxima.
    Plane {
        slope: [f64; 2],
        offset: f64,
    },
}

impl Field {
    fn name(&self) -> &'static str {
        match self {
            Field::Gaussians(_) => "gaussians",
            Field::Rastrigin => "rastrigin",
            Field::Schwefel => "schwefel",
            Field::Light(_) => "light",
            Field::Image(_) => "image",
            Field::SphereHeight => "sphere",
            Field::Plane { .. } => "plane",
        }
    }

    /// Number of movable features (bump centers or light sources).
    pub fn feature_count(&self) -> usize {
        match self {
            Field::Gaussians(b) => b.len(),
            Field::Light(l) => l.sources.len(),
            _ => 0,
        }
    }

    fn feature_center(&self, k: usize) -> [f64; 2] {
        match self {
            Field::Gaussians(b) => b[k].center,
            Field::Light(l) => l.sources[k].center,
            _ => unreachable!("field has no movable features"),
        }
    }
}

/// A fitness field over a domain, possibly time-dependent through bindings.
#[derive(Clone, Debug, PartialEq)]
pub struct Landscape {
    domain: Domain,
    field: Field,
    shift: f64,
    peaks: Vec<Point>,
    bindings: Vec<Binding>,
}

impl Landscape {
    /// Assembles a landscape. `peaks` is the static ground truth; for fields
    /// with movable features it must list one peak per feature, in order.
    pub fn new(domain: Domain, field: Field, shift: f64, peaks: Vec<Point>) -> Result<Self> {
        domain.validate()?;
        if !shift.is_finite() {
            return Err(Error::NonFinite("affine shift".into()));
        }
        let n = field.feature_count();
        if n > 0 && peaks.len() != n {
            return Err(Error::InvalidParams(format!(
                "{} field has {n} features but {} peaks were listed",
                field.name(),
                peaks.len()
            )));
        }
        Ok(Landscape {
            domain,
            field,
            shift,
            peaks,
            bindings: Vec::new(),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Constant added to raw field values.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn is_dynamic(&self) -> bool {
        !self.bindings.is_empty()
    }

    /// Attaches trajectories to bump centers or light sources, replacing any
    /// earlier bindings. Trajectories are validated over `0..=horizon`.
    pub fn bind(mut self, bindings: Vec<Binding>, horizon: usize) -> Result<Self> {
        let n = self.field.feature_count();
        if n == 0 && !bindings.is_empty() {
            return Err(Error::Unsupported(format!(
                "cannot bind trajectories to a {} field",
                self.field.name()
            )));
        }
        for (pos, b) in bindings.iter().enumerate() {
            if b.index >= n {
                return Err(Error::InvalidParams(format!(
                    "binding {pos} targets feature {} but the field has {n}",
                    b.index
                )));
            }
            if bindings[..pos].iter().any(|o| o.index == b.index) {
                return Err(Error::InvalidParams(format!(
                    "feature {} is bound twice",
                    b.index
                )));
            }
            dynamic::validate_trajectory(
                &b.trajectory,
                self.field.feature_center(b.index),
                &self.domain,
                horizon,
            )?;
        }
        self.bindings = bindings;
        Ok(self)
    }

    /// Center of movable feature `k` at iteration `t`.
    pub fn feature_center(&self, k: usize, t: usize) -> [f64; 2] {
        let base = self.field.feature_center(k);
        match self.bindings.iter().find(|b| b.index == k) {
            Some(b) => dynamic::source_position(&b.trajectory, base, t),
            None => base,
        }
    }

    /// Indices of features that move over time.
    pub fn moving_features(&self) -> Vec<usize> {
        self.bindings.iter().map(|b| b.index).collect()
    }

    /// Shifted fitness at `x` and iteration `t`.
    pub fn evaluate(&self, x: &Point, t: usize) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(format!("query point {x}")));
        }
        if !self.domain.contains(x, DOMAIN_TOLERANCE) {
            return Err(Error::OutOfDomain(*x));
        }
        let v = self.raw(x, t) + self.shift;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!(
                "{} field value at {x}",
                self.field.name()
            )));
        }
        Ok(v)
    }

    fn raw(&self, x: &Point, t: usize) -> f64 {
        match &self.field {
            Field::Gaussians(bumps) => bumps
                .iter()
                .enumerate()
                .map(|(k, b)| b.value_at(x, self.feature_center(k, t)))
                .sum(),
            Field::Rastrigin => benchmarks::rastrigin(&x.0[..self.domain.dim()]),
            Field::Schwefel => benchmarks::schwefel(&x.0[..self.domain.dim()]),
            Field::Light(l) => l
                .sources
                .iter()
                .enumerate()
                .map(|(k, s)| s.intensity_at(x, self.feature_center(k, t)))
                .sum(),
            Field::Image(img) => img.sample(x.x(), x.y()),
            Field::SphereHeight => x.z(),
            Field::Plane { slope, offset } => slope[0] * x.x() + slope[1] * x.y() + offset,
        }
    }

    /// Known local maxima at iteration `t`. For moving features the peak is
    /// re-located by hill climbing from the feature's current center.
    pub fn peaks_at(&self, t: usize) -> Result<Vec<Point>> {
        if self.bindings.is_empty() {
            return Ok(self.peaks.clone());
        }
        let mut peaks = self.peaks.clone();
        for b in &self.bindings {
            let [cx, cy] = self.feature_center(b.index, t);
            let start = self.domain.clip(Point::xy(cx, cy));
            peaks[b.index] = oracle::refine_peak(self, start, t, oracle::default_probe(self))?;
        }
        Ok(peaks)
    }

    /// Static ground-truth peaks (iteration 0 for dynamic landscapes).
    pub fn peaks(&self) -> &[Point] {
        &self.peaks
    }
}

/// Fitness on the sphere surface of radius `radius`: `z + radius`, so the
/// south pole reads 0 and the north pole `2 * radius`.
pub fn make_sphere_field(radius: f64) -> Result<Landscape> {
    let domain = Domain::sphere(radius)?;
    Landscape::new(
        domain,
        Field::SphereHeight,
        radius,
        vec![Point::xyz(0.0, 0.0, radius)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_field_values() {
        let l = make_sphere_field(1.5).unwrap();
        assert_eq!(l.evaluate(&Point::xyz(0.0, 0.0, 1.5), 0).unwrap(), 3.0);
        assert_eq!(l.evaluate(&Point::xyz(0.0, 0.0, -1.5), 0).unwrap(), 0.0);
        assert_eq!(l.evaluate(&Point::xyz(1.5, 0.0, 0.0), 0).unwrap(), 1.5);
        assert!(matches!(
            l.evaluate(&Point::xyz(0.0, 0.0, 0.0), 0),
            Err(Error::OutOfDomain(_))
        ));
        assert!(make_sphere_field(0.0).is_err());
    }

    #[test]
    fn evaluation_rejects_points_outside_the_box() {
        let l = make_three_peaks();
        assert!(l.evaluate(&Point::xy(5.0, 5.0), 0).is_ok());
        assert!(l.evaluate(&Point::xy(10.0 + 1e-7, 5.0), 0).is_ok());
        assert!(matches!(
            l.evaluate(&Point::xy(10.1, 5.0), 0),
            Err(Error::OutOfDomain(_))
        ));
        assert!(matches!(
            l.evaluate(&Point::xy(f64::NAN, 5.0), 0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn binding_a_sphere_is_unsupported() {
        let l = make_sphere_field(1.0).unwrap();
        let b = Binding {
            index: 0,
            trajectory: crate::Trajectory::Static,
        };
        assert!(matches!(l.bind(vec![b], 10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn evaluate_is_pure() {
        let l = make_rastrigin(None).unwrap();
        let p = Point::xy(0.3, -1.7);
        let a = l.evaluate(&p, 3).unwrap();
        let b = l.evaluate(&p, 3).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
