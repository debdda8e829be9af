//! Ground-truth peak finding by dense grid sampling.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::par::{self, Execution};

use super::{Domain, Landscape};

/// Smallest accepted grid resolution per axis.
pub const MIN_RESOLUTION: usize = 100;

const COMPASS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ),
    (0.0, 1.0),
    (
        -std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ),
    (-1.0, 0.0),
    (
        -std::f64::consts::FRAC_1_SQRT_2,
        -std::f64::consts::FRAC_1_SQRT_2,
    ),
    (0.0, -1.0),
    (
        std::f64::consts::FRAC_1_SQRT_2,
        -std::f64::consts::FRAC_1_SQRT_2,
    ),
];

/// Initial probe length for [`refine_peak`]: a thousandth of the domain width.
pub fn default_probe(landscape: &Landscape) -> f64 {
    landscape.domain().width() / 1000.0
}

/// Compass-search hill climb from `start` at iteration `t`. The probe length
/// halves whenever no neighbor improves and the search stops once it falls
/// below a millionth of its starting value.
pub fn refine_peak(landscape: &Landscape, start: Point, t: usize, probe: f64) -> Result<Point> {
    let domain = landscape.domain();
    if domain.bounds_2d().is_none() {
        return Err(Error::Unsupported(
            "peak refinement needs a 2-D box domain".into(),
        ));
    }
    let mut best = domain.clip(start);
    let mut best_v = landscape.evaluate(&best, t)?;
    let mut h = probe;
    let floor = probe * 1e-6;
    let mut budget = 100_000;
    while h >= floor && budget > 0 {
        budget -= 1;
        let mut moved = false;
        for (dx, dy) in COMPASS {
            let cand = domain.clip(Point::xy(best.x() + h * dx, best.y() + h * dy));
            let v = landscape.evaluate(&cand, t)?;
            if v > best_v {
                best = cand;
                best_v = v;
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(best)
}

/// All grid cells whose value strictly exceeds their 8 neighbors (an exact
/// tie goes to the later cell in row-major order), refined by
/// [`refine_peak`] and deduplicated within one cell. Sorted by fitness,
/// highest first.
pub fn grid_local_max_oracle(
    landscape: &Landscape,
    resolution: usize,
    t: usize,
) -> Result<Vec<Point>> {
    grid_local_max_oracle_with(landscape, resolution, t, Execution::default())
}

pub fn grid_local_max_oracle_with(
    landscape: &Landscape,
    resolution: usize,
    t: usize,
    exec: Execution,
) -> Result<Vec<Point>> {
    let (bx, by) = match landscape.domain() {
        Domain::SphereSurface { .. } => {
            return Err(Error::Unsupported(
                "grid oracle on a sphere; its peak is the north pole".into(),
            ))
        }
        d => d
            .bounds_2d()
            .ok_or_else(|| Error::Unsupported("grid oracle needs a 2-D box".into()))?,
    };
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidParams(format!(
            "oracle resolution {resolution} is below {MIN_RESOLUTION}"
        )));
    }
    let n = resolution;
    let dx = (bx[1] - bx[0]) / n as f64;
    let dy = (by[1] - by[0]) / n as f64;
    let cell = |i: usize, j: usize| {
        Point::xy(bx[0] + (i as f64 + 0.5) * dx, by[0] + (j as f64 + 0.5) * dy)
    };

    let rows: Vec<Result<Vec<f64>>> = par::map_range(exec, n, |j| {
        (0..n).map(|i| landscape.evaluate(&cell(i, j), t)).collect()
    });
    let grid = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut candidates = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let v = grid[j][i];
            // Exact ties (cells placed symmetrically about a peak) go to the
            // later cell in row-major order, so a tied pair yields one maximum.
            let is_max = (j - 1..=j + 1)
                .flat_map(|jj| (i - 1..=i + 1).map(move |ii| (ii, jj)))
                .filter(|&(ii, jj)| (ii, jj) != (i, j))
                .all(|(ii, jj)| {
                    if (jj, ii) < (j, i) {
                        v >= grid[jj][ii]
                    } else {
                        v > grid[jj][ii]
                    }
                });
            if is_max {
                candidates.push(cell(i, j));
            }
        }
    }

    let probe = dx.min(dy) / 2.0;
    let refined: Vec<Result<(Point, f64)>> = par::map_range(exec, candidates.len(), |k| {
        let p = refine_peak(landscape, candidates[k], t, probe)?;
        Ok((p, landscape.evaluate(&p, t)?))
    });
    let mut refined = refined.into_iter().collect::<Result<Vec<_>>>()?;
    refined.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.0.x().total_cmp(&b.0.x()))
            .then(a.0.y().total_cmp(&b.0.y()))
    });

    let min_sep = dx.max(dy);
    let mut peaks: Vec<Point> = Vec::new();
    for (p, _) in refined {
        if peaks.iter().all(|q| q.distance(&p) >= min_sep) {
            peaks.push(p);
        }
    }
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{make_plane, make_sphere_field, make_three_peaks, BenchmarkConstants};

    #[test]
    fn three_peaks_oracle_finds_the_bump_centers() {
        let l = make_three_peaks();
        let peaks = grid_local_max_oracle(&l, 1000, 0).unwrap();
        assert_eq!(peaks.len(), 3);
        let cell = 10.0 / 1000.0;
        for b in &BenchmarkConstants::shipped().three_peaks_bumps {
            let c = Point::xy(b.center[0], b.center[1]);
            assert!(peaks.iter().any(|p| p.distance(&c) <= cell), "{c} missing");
        }
    }

    #[test]
    fn monotone_plane_has_no_interior_peaks() {
        let l = make_plane(vec![[0.0, 1.0], [0.0, 1.0]], [0.3, 0.7]).unwrap();
        assert!(grid_local_max_oracle(&l, 200, 0).unwrap().is_empty());
    }

    #[test]
    fn rejects_sphere_and_coarse_grids() {
        let s = make_sphere_field(1.0).unwrap();
        assert!(matches!(
            grid_local_max_oracle(&s, 200, 0),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            grid_local_max_oracle(&make_three_peaks(), 99, 0),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let l = make_three_peaks();
        let a = grid_local_max_oracle_with(&l, 300, 0, Execution::Sequential).unwrap();
        let b = grid_local_max_oracle_with(&l, 300, 0, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
