use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::{oracle, Domain, Field, Landscape};

const CONSTANTS_TEXT: &str = include_str!("../../assets/benchmark_constants.txt");

/// Grid resolution used to attach ground-truth peaks to the lattice
/// benchmarks.
const PEAK_GRID: usize = 1000;

/// One isotropic Gaussian bump: `height * exp(-|x - center|^2 / (2 sigma^2))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianBump {
    pub center: [f64; 2],
    pub height: f64,
    pub sigma: f64,
}

impl GaussianBump {
    pub(crate) fn value_at(&self, x: &Point, center: [f64; 2]) -> f64 {
        let dx = x.x() - center[0];
        let dy = x.y() - center[1];
        self.height * (-(dx * dx + dy * dy) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// Parsed contents of `assets/benchmark_constants.txt`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConstants {
    pub three_peaks_bounds: Vec<[f64; 2]>,
    pub three_peaks_bumps: Vec<GaussianBump>,
    pub rastrigin_bounds: Vec<[f64; 2]>,
    pub schwefel_bounds: Vec<[f64; 2]>,
    pub image_gamma: f64,
}

impl BenchmarkConstants {
    /// The constants shipped with the crate.
    pub fn shipped() -> &'static BenchmarkConstants {
        static PARSED: OnceLock<BenchmarkConstants> = OnceLock::new();
        PARSED.get_or_init(|| {
            BenchmarkConstants::parse(CONSTANTS_TEXT).expect("shipped benchmark constants parse")
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut three_peaks_bounds = None;
        let mut three_peaks_bumps = Vec::new();
        let mut rastrigin_bounds = None;
        let mut schwefel_bounds = None;
        let mut image_gamma = None;

        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad =
                |msg: &str| Error::InvalidParams(format!("constants line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value"))?;
            let nums = value
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(&e.to_string()))?;
            match key.trim() {
                "three_peaks.bounds" => {
                    three_peaks_bounds = Some(pairs(&nums).ok_or_else(|| bad("odd bound count"))?)
                }
                "rastrigin.bounds" => {
                    rastrigin_bounds = Some(pairs(&nums).ok_or_else(|| bad("odd bound count"))?)
                }
                "schwefel.bounds" => {
                    schwefel_bounds = Some(pairs(&nums).ok_or_else(|| bad("odd bound count"))?)
                }
                "three_peaks.bump" => match nums[..] {
                    [cx, cy, height, sigma] => three_peaks_bumps.push(GaussianBump {
                        center: [cx, cy],
                        height,
                        sigma,
                    }),
                    _ => return Err(bad("bump needs cx cy height sigma")),
                },
                "image.gamma" => match nums[..] {
                    [g] => image_gamma = Some(g),
                    _ => return Err(bad("gamma takes one value")),
                },
                other => return Err(bad(&format!("unknown key {other}"))),
            }
        }
        let missing = |k: &str| Error::InvalidParams(format!("constants: missing {k}"));
        Ok(BenchmarkConstants {
            three_peaks_bounds: three_peaks_bounds.ok_or_else(|| missing("three_peaks.bounds"))?,
            three_peaks_bumps,
            rastrigin_bounds: rastrigin_bounds.ok_or_else(|| missing("rastrigin.bounds"))?,
            schwefel_bounds: schwefel_bounds.ok_or_else(|| missing("schwefel.bounds"))?,
            image_gamma: image_gamma.ok_or_else(|| missing("image.gamma"))?,
        })
    }
}

fn pairs(nums: &[f64]) -> Option<Vec<[f64; 2]>> {
    if !nums.len().is_multiple_of(2) {
        return None;
    }
    Some(nums.chunks(2).map(|c| [c[0], c[1]]).collect())
}

/// Three Gaussian bumps of distinct heights (see the constants asset).
pub fn make_three_peaks() -> Landscape {
    let c = BenchmarkConstants::shipped();
    make_gaussians(c.three_peaks_bounds.clone(), c.three_peaks_bumps.clone())
        .expect("shipped three-peaks constants are valid")
}

/// A sum of Gaussian bumps; one ground-truth peak per bump, located by hill
/// climbing from the bump center.
pub fn make_gaussians(bounds: Vec<[f64; 2]>, bumps: Vec<GaussianBump>) -> Result<Landscape> {
    if bounds.len() != 2 {
        return Err(Error::InvalidParams("gaussian landscapes are 2-D".into()));
    }
    for b in &bumps {
        if !(b.sigma > 0.0 && b.height > 0.0 && b.center.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidParams(format!(
                "bump {:?} needs positive height and sigma",
                b
            )));
        }
    }
    let domain = Domain::new_box(bounds)?;
    let centers: Vec<Point> = bumps
        .iter()
        .map(|b| Point::xy(b.center[0], b.center[1]))
        .collect();
    for c in &centers {
        if !domain.contains(c, 0.0) {
            return Err(Error::OutOfDomain(*c));
        }
    }
    let mut l = Landscape::new(domain, Field::Gaussians(bumps), 0.0, centers.clone())?;
    l.peaks = refine_all(&l, &centers)?;
    Ok(l)
}

pub(crate) fn refine_all(l: &Landscape, starts: &[Point]) -> Result<Vec<Point>> {
    let probe = oracle::default_probe(l);
    starts
        .iter()
        .map(|s| oracle::refine_peak(l, *s, 0, probe))
        .collect()
}

pub(crate) fn rastrigin(x: &[f64]) -> f64 {
    -(10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>())
}

pub(crate) fn schwefel(x: &[f64]) -> f64 {
    -(418.9829 * x.len() as f64 - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>())
}

/// Negated Rastrigin, shifted nonnegative. `None` uses the shipped bounds,
/// which hold exactly 100 local maxima.
pub fn make_rastrigin(bounds: Option<Vec<[f64; 2]>>) -> Result<Landscape> {
    let bounds = bounds.unwrap_or_else(|| BenchmarkConstants::shipped().rastrigin_bounds.clone());
    // Each axis term x^2 - 10 cos(2 pi x) + 10 is at most x^2 + 20.
    let shift = bounds
        .iter()
        .map(|[lo, hi]| lo.powi(2).max(hi.powi(2)) + 20.0)
        .sum();
    lattice_benchmark(bounds, Field::Rastrigin, shift)
}

/// Negated Schwefel, shifted nonnegative. `None` uses the shipped bounds,
/// which hold 15 local maxima.
pub fn make_schwefel(bounds: Option<Vec<[f64; 2]>>) -> Result<Landscape> {
    let bounds = bounds.unwrap_or_else(|| BenchmarkConstants::shipped().schwefel_bounds.clone());
    // |x sin(sqrt|x|)| <= |x|.
    let shift = bounds
        .iter()
        .map(|[lo, hi]| 418.9829 + lo.abs().max(hi.abs()))
        .sum();
    lattice_benchmark(bounds, Field::Schwefel, shift)
}

fn lattice_benchmark(bounds: Vec<[f64; 2]>, field: Field, shift: f64) -> Result<Landscape> {
    if bounds.len() != 2 {
        return Err(Error::InvalidParams("benchmark landscapes are 2-D".into()));
    }
    let mut l = Landscape::new(Domain::new_box(bounds)?, field, shift, Vec::new())?;
    l.peaks = oracle::grid_local_max_oracle(&l, PEAK_GRID, 0)?;
    Ok(l)
}

/// A tilted plane; monotone, so it has no interior maxima.
pub fn make_plane(bounds: Vec<[f64; 2]>, slope: [f64; 2]) -> Result<Landscape> {
    let domain = Domain::new_box(bounds)?;
    let (bx, by) = domain
        .bounds_2d()
        .ok_or_else(|| Error::InvalidParams("plane landscapes are 2-D".into()))?;
    let lowest = [bx[0], bx[1]]
        .iter()
        .flat_map(|x| [by[0], by[1]].map(|y| slope[0] * x + slope[1] * y))
        .fold(f64::INFINITY, f64::min);
    Landscape::new(
        domain,
        Field::Plane { slope, offset: 0.0 },
        -lowest,
        Vec::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_constants_parse() {
        let c = BenchmarkConstants::shipped();
        assert_eq!(c.three_peaks_bumps.len(), 3);
        assert_eq!(c.rastrigin_bounds, vec![[-4.5, 5.5], [-4.5, 5.5]]);
        assert_eq!(c.image_gamma, 2.0);
    }

    #[test]
    fn constants_parser_reports_bad_lines() {
        let err = BenchmarkConstants::parse("three_peaks.bounds = 0 1 2\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        assert!(BenchmarkConstants::parse("bogus = 1\n").is_err());
        assert!(BenchmarkConstants::parse("# only a comment\n").is_err());
    }

    #[test]
    fn three_peaks_bump_maxima() {
        let l = make_three_peaks();
        let c = BenchmarkConstants::shipped();
        for (peak, bump) in l.peaks().iter().zip(&c.three_peaks_bumps) {
            let center = Point::xy(bump.center[0], bump.center[1]);
            assert!(peak.distance(&center) < 1e-4);
            let v = l.evaluate(&center, 0).unwrap();
            assert!((v - bump.height).abs() < 1e-4, "{v} vs {}", bump.height);
        }
    }

    #[test]
    fn three_peaks_far_field_is_negligible() {
        let l = make_three_peaks();
        let c = BenchmarkConstants::shipped();
        let far = Point::xy(10.0, 10.0);
        for b in &c.three_peaks_bumps {
            assert!(far.distance(&Point::xy(b.center[0], b.center[1])) >= 5.0 * b.sigma);
        }
        assert!(l.evaluate(&far, 0).unwrap() < 1e-5 * 1.0);
    }

    #[test]
    fn symmetric_bumps_give_mirrored_values() {
        let bump = |x| GaussianBump {
            center: [x, 5.0],
            height: 1.0,
            sigma: 1.0,
        };
        let l = make_gaussians(vec![[0.0, 10.0], [0.0, 10.0]], vec![bump(3.0), bump(7.0)]).unwrap();
        for (x, y) in [(1.0, 2.0), (4.2, 8.8), (0.0, 5.0)] {
            let a = l.evaluate(&Point::xy(x, y), 0).unwrap();
            let b = l.evaluate(&Point::xy(10.0 - x, y), 0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rastrigin_global_max_at_origin() {
        let l = make_rastrigin(None).unwrap();
        let top = l.evaluate(&Point::xy(0.0, 0.0), 0).unwrap();
        assert_eq!(top, l.shift());
        for p in l.peaks() {
            assert!(l.evaluate(p, 0).unwrap() <= top);
        }
        assert!(l.evaluate(&Point::xy(0.01, 0.0), 0).unwrap() < top);
    }

    #[test]
    fn plane_is_shifted_nonnegative() {
        let l = make_plane(vec![[-1.0, 2.0], [0.0, 3.0]], [1.0, -2.0]).unwrap();
        assert_eq!(l.evaluate(&Point::xy(-1.0, 3.0), 0).unwrap(), 0.0);
        assert!(l.evaluate(&Point::xy(2.0, 0.0), 0).unwrap() > 0.0);
    }
}
