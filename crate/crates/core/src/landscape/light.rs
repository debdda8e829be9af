use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::benchmarks::refine_all;
use super::{Domain, Field, Landscape};

/// A lamp hung above the arena floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightSource {
    /// Ground projection of the lamp (cm).
    pub center: [f64; 2],
    /// Electrical power (W); a pure scale factor.
    pub power: f64,
    /// Height above the floor (cm).
    pub height: f64,
    #[serde(default)]
    pub color: String,
}

impl LightSource {
    /// Inverse-square intensity at floor point `x` with the lamp over `center`.
    pub(crate) fn intensity_at(&self, x: &Point, center: [f64; 2]) -> f64 {
        let dx = x.x() - center[0];
        let dy = x.y() - center[1];
        self.power / (4.0 * PI * (dx * dx + dy * dy + self.height * self.height))
    }

    fn validate(&self) -> Result<()> {
        if !(self.power > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidParams(format!(
                "light source {:?} needs positive power and height",
                self.color
            )));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("light source center".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightField {
    pub sources: Vec<LightSource>,
}

/// Light intensity over a floor box. Ground-truth peaks are the intensity
/// maxima nearest to each lamp (they sit slightly off-center when lamps
/// overlap).
pub fn make_light_field(bounds: Vec<[f64; 2]>, sources: Vec<LightSource>) -> Result<Landscape> {
    if bounds.len() != 2 {
        return Err(Error::InvalidParams("light fields are 2-D".into()));
    }
    if sources.is_empty() {
        return Err(Error::InvalidParams(
            "light field needs at least one source".into(),
        ));
    }
    for s in &sources {
        s.validate()?;
    }
    let domain = Domain::new_box(bounds)?;
    let centers: Vec<Point> = sources
        .iter()
        .map(|s| Point::xy(s.center[0], s.center[1]))
        .collect();
    for c in &centers {
        if !domain.contains(c, 0.0) {
            return Err(Error::OutOfDomain(*c));
        }
    }
    let mut l = Landscape::new(
        domain,
        Field::Light(LightField { sources }),
        0.0,
        centers.clone(),
    )?;
    l.peaks = refine_all(&l, &centers)?;
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lamp(x: f64, y: f64, power: f64) -> LightSource {
        LightSource {
            center: [x, y],
            power,
            height: 30.0,
            color: String::new(),
        }
    }

    #[test]
    fn single_lamp_peak_is_its_center() {
        let l = make_light_field(
            vec![[0.0, 180.0], [0.0, 180.0]],
            vec![lamp(90.0, 90.0, 14.0)],
        )
        .unwrap();
        assert!(l.peaks()[0].distance(&Point::xy(90.0, 90.0)) < 1e-6);
        let top = l.evaluate(&Point::xy(90.0, 90.0), 0).unwrap();
        assert!((top - 14.0 / (4.0 * PI * 900.0)).abs() < 1e-15);
    }

    #[test]
    fn intensity_decreases_along_rays() {
        let l = make_light_field(
            vec![[0.0, 180.0], [0.0, 180.0]],
            vec![lamp(90.0, 90.0, 14.0)],
        )
        .unwrap();
        for k in 0..16 {
            let a = k as f64 * PI / 8.0;
            let mut prev = f64::INFINITY;
            for step in 0..=80 {
                let r = step as f64;
                let p = Point::xy(90.0 + r * a.cos(), 90.0 + r * a.sin());
                let v = l.evaluate(&p, 0).unwrap();
                assert!(v > 0.0 && v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn overlapping_lamps_shift_peaks_inward() {
        let l = make_light_field(
            vec![[0.0, 230.0], [0.0, 230.0]],
            vec![lamp(60.0, 115.0, 14.0), lamp(170.0, 115.0, 14.0)],
        )
        .unwrap();
        let [left, right] = [l.peaks()[0], l.peaks()[1]];
        assert!(left.x() > 60.0 && left.x() < 62.0);
        assert!(right.x() < 170.0 && right.x() > 168.0);
        assert!((left.x() - 60.0 - (170.0 - right.x())).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_sources() {
        let b = vec![[0.0, 10.0], [0.0, 10.0]];
        assert!(make_light_field(b.clone(), vec![]).is_err());
        assert!(make_light_field(b.clone(), vec![lamp(5.0, 5.0, 0.0)]).is_err());
        assert!(make_light_field(b, vec![lamp(50.0, 5.0, 1.0)]).is_err());
    }
}
