//! Moving peaks and light sources.
//!
//! A [`Trajectory`] maps an iteration index to a ground-plane position; a
//! [`Binding`] attaches one to a bump center or lamp of a landscape (see
//! [`Landscape::bind`](crate::Landscape::bind)).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::landscape::Domain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trajectory {
    /// Stays at the feature's own center.
    Static,
    /// Translates the feature's center by `(k * t, 0)`.
    HorizontalShift { k: f64 },
    /// Back and forth between `a` and `b` at `speed` per iteration, starting
    /// at `a`.
    LinearPingpong {
        a: [f64; 2],
        b: [f64; 2],
        speed: f64,
    },
    /// Counter-clockwise circle starting at angle 0. One revolution takes
    /// `iter_per_minute / rpm` iterations.
    Circular {
        center: [f64; 2],
        radius: f64,
        rpm: f64,
        iter_per_minute: f64,
    },
    /// Vertical triangle wave: `anchor + (0, amplitude * tri(t / period))`,
    /// where `tri` rises 0 -> 1 over half a period and falls back.
    Updown {
        anchor: [f64; 2],
        amplitude: f64,
        period: usize,
    },
}

/// A trajectory attached to feature `index` (bump or light source).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Binding {
    pub index: usize,
    pub trajectory: Trajectory,
}

/// Returns `Some(p)` when `x` is within 1e-9 of a positive integer `p`.
fn integral_period(x: f64) -> Option<usize> {
    let r = x.round();
    (r >= 1.0 && (x - r).abs() < 1e-9).then_some(r as usize)
}

/// Triangle wave on `[0, 1]`: 0 at integer `u`, 1 at half-integers.
fn triangle(u: f64) -> f64 {
    1.0 - (2.0 * u.fract() - 1.0).abs()
}

/// Ground position of a feature following `traj` at iteration `t`; `origin`
/// is the feature's static center.
///
/// Whenever a trajectory's period is a whole number of iterations, `t` is
/// reduced modulo that period first, so `p(t + period) == p(t)` holds exactly.
pub fn source_position(traj: &Trajectory, origin: [f64; 2], t: usize) -> [f64; 2] {
    match *traj {
        Trajectory::Static => origin,
        Trajectory::HorizontalShift { k } => [origin[0] + k * t as f64, origin[1]],
        Trajectory::LinearPingpong { a, b, speed } => {
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            if len == 0.0 || speed == 0.0 {
                return a;
            }
            let t = match integral_period(2.0 * len / speed) {
                Some(p) => t % p,
                None => t,
            };
            let travelled = (speed * t as f64) % (2.0 * len);
            let u = if travelled <= len {
                travelled
            } else {
                2.0 * len - travelled
            } / len;
            [a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u]
        }
        Trajectory::Circular {
            center,
            radius,
            rpm,
            iter_per_minute,
        } => {
            let per_iter = rpm / iter_per_minute;
            let t = match integral_period(1.0 / per_iter) {
                Some(p) if per_iter > 0.0 => t % p,
                _ => t,
            };
            let theta = TAU * per_iter * t as f64;
            [
                center[0] + radius * theta.cos(),
                center[1] + radius * theta.sin(),
            ]
        }
        Trajectory::Updown {
            anchor,
            amplitude,
            period,
        } => {
            let t = t % period.max(1);
            [
                anchor[0],
                anchor[1] + amplitude * triangle(t as f64 / period as f64),
            ]
        }
    }
}

/// Checks trajectory parameters and that the feature stays inside `domain`
/// for every iteration in `0..=horizon`.
pub fn validate_trajectory(
    traj: &Trajectory,
    origin: [f64; 2],
    domain: &Domain,
    horizon: usize,
) -> Result<()> {
    let bad = |m: String| Err(Error::Scenario(m));
    match *traj {
        Trajectory::Static => {}
        Trajectory::HorizontalShift { k } if !k.is_finite() => {
            return bad(format!("shift k = {k}"))
        }
        Trajectory::LinearPingpong { speed, .. } if !(speed >= 0.0 && speed.is_finite()) => {
            return bad(format!("pingpong speed {speed} must be >= 0"))
        }
        Trajectory::Circular {
            radius,
            rpm,
            iter_per_minute,
            ..
        } => {
            if radius.is_nan() || radius <= 0.0 {
                return bad(format!("circle radius {radius} must be > 0"));
            }
            if !(rpm >= 0.0
                && rpm.is_finite()
                && iter_per_minute > 0.0
                && iter_per_minute.is_finite())
            {
                return bad(format!(
                    "rpm {rpm} / iter_per_minute {iter_per_minute} invalid"
                ));
            }
        }
        Trajectory::Updown {
            amplitude, period, ..
        } => {
            if period < 2 {
                return bad(format!("up-down period {period} must be >= 2"));
            }
            if !amplitude.is_finite() {
                return bad(format!("up-down amplitude {amplitude}"));
            }
        }
        _ => {}
    }
    for t in 0..=horizon {
        let [x, y] = source_position(traj, origin, t);
        let p = Point::xy(x, y);
        if !domain.contains(&p, 0.0) {
            return bad(format!(
                "trajectory leaves the domain at iteration {t}: {p}"
            ));
        }
    }
    Ok(())
}
