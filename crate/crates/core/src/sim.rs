//! Experiment runner: arena geometry, capture and tracking metrics, and
//! replicate batches.

use serde::{Deserialize, Serialize};

use crate::dynamic::{Binding, Trajectory};
use crate::engine::{bmo_step_observed, init_swarm, BmoParams, Placement};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::landscape::{make_light_field, Domain, Landscape, LightSource};
use crate::par::{self, Execution};
use crate::trace::TraceRecord;

/// Circular workspace of the robot experiments. Movement is clipped to the
/// bounding box `[0, 2R] x [0, 2R]` of the outer circle, whose lower-left
/// corner is the origin. Being inside `capture_radius` of a peak counts as
/// detecting it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arena {
    pub outer_radius: f64,
    pub capture_radius: f64,
}

impl Arena {
    pub fn validate(&self) -> Result<()> {
        if self.capture_radius > 0.0
            && self.capture_radius < self.outer_radius
            && self.outer_radius.is_finite()
        {
            Ok(())
        } else {
            Err(Error::Scenario(format!(
                "arena needs 0 < capture_radius ({}) < outer_radius ({})",
                self.capture_radius, self.outer_radius
            )))
        }
    }

    pub fn bounds(&self) -> Vec<[f64; 2]> {
        let d = 2.0 * self.outer_radius;
        vec![[0.0, d], [0.0, d]]
    }

    pub fn center(&self) -> [f64; 2] {
        [self.outer_radius, self.outer_radius]
    }
}

/// A fully resolved experiment.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub landscape: Landscape,
    pub params: BmoParams,
    pub placement: Placement,
    pub arena: Arena,
    /// Consecutive iterations an agent must stay within the capture radius.
    pub dwell: usize,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.arena.validate()?;
        if self.dwell == 0 {
            return Err(Error::Scenario("dwell must be at least 1".into()));
        }
        // Placement problems (wrong explicit count, quadrants on a sphere)
        // surface here rather than at iteration 0.
        init_swarm(&self.params, self.landscape.domain(), &self.placement)?;
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Scenario {
        let mut s = self.clone();
        s.params.rng_seed = seed;
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakCapture {
    pub peak: usize,
    /// First iteration at which the dwell requirement is met.
    pub capture_iteration: Option<usize>,
    /// Agents within the capture radius after the last step.
    pub agents_at_end: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub captures: Vec<PeakCapture>,
    /// First iteration at which every peak is captured at once.
    pub all_captured_iteration: Option<usize>,
    /// Mean over agents of the distance to the nearest peak after the last
    /// step.
    pub final_mean_peak_distance: f64,
    pub final_positions: Vec<Point>,
    /// Per iteration, the distance from each moving feature's peak to the
    /// nearest agent. Empty for static landscapes.
    pub tracking_error_series: Vec<Vec<f64>>,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
}

impl RunResult {
    pub fn captured_count(&self) -> usize {
        self.captures
            .iter()
            .filter(|c| c.capture_iteration.is_some())
            .count()
    }

    /// Agent positions at iteration `t` (before that iteration's move), in
    /// id order.
    pub fn positions_at(&self, t: usize) -> Vec<Point> {
        let n = self.final_positions.len();
        self.trace[t * n..(t + 1) * n]
            .iter()
            .map(|r| r.position)
            .collect()
    }
}

/// Output of [`capture_metrics`].
#[derive(Clone, Debug, PartialEq)]
pub struct CaptureReport {
    pub capture_iteration: Vec<Option<usize>>,
    pub all_captured_iteration: Option<usize>,
}

/// Peak `k` is captured at iteration `t` when one agent has been within
/// `capture_radius` of it for the `dwell` consecutive iterations ending at
/// `t`. `positions[t]` and `peaks[t]` hold agents and peaks at iteration `t`.
pub fn capture_metrics(
    positions: &[Vec<Point>],
    peaks: &[Vec<Point>],
    capture_radius: f64,
    dwell: usize,
    domain: &Domain,
) -> CaptureReport {
    assert!(dwell >= 1, "dwell must be at least 1");
    let n_peaks = peaks.first().map_or(0, Vec::len);
    let n_agents = positions.first().map_or(0, Vec::len);
    let mut streak = vec![vec![0usize; n_agents]; n_peaks];
    let mut first = vec![None; n_peaks];
    let mut all = None;
    for (t, (agents, peaks_t)) in positions.iter().zip(peaks).enumerate() {
        let mut all_now = n_peaks > 0;
        for (k, peak) in peaks_t.iter().enumerate() {
            let mut captured = false;
            for (a, p) in agents.iter().enumerate() {
                if domain.distance(p, peak) <= capture_radius {
                    streak[k][a] += 1;
                } else {
                    streak[k][a] = 0;
                }
                captured |= streak[k][a] >= dwell;
            }
            if captured && first[k].is_none() {
                first[k] = Some(t);
            }
            all_now &= captured;
        }
        if all_now && all.is_none() {
            all = Some(t);
        }
    }
    CaptureReport {
        capture_iteration: first,
        all_captured_iteration: all,
    }
}

fn nearest(domain: &Domain, from: &Point, to: &[Point]) -> f64 {
    to.iter()
        .map(|q| domain.distance(from, q))
        .fold(f64::INFINITY, f64::min)
}

pub fn run_experiment(scenario: &Scenario) -> Result<RunResult> {
    run_experiment_with(scenario, Execution::default())
}

/// Initializes the swarm, runs `max_iters` steps recording a trace row per
/// agent per iteration, then scores the run.
pub fn run_experiment_with(scenario: &Scenario, exec: Execution) -> Result<RunResult> {
    scenario.validate()?;
    let params = &scenario.params;
    let landscape = &scenario.landscape;
    let domain = landscape.domain();
    let mut state = init_swarm(params, domain, &scenario.placement)?;
    let n = state.agents.len();

    let mut trace = Vec::with_capacity(n * params.max_iters);
    let mut positions = Vec::with_capacity(params.max_iters);
    for _ in 0..params.max_iters {
        bmo_step_observed(&mut state, landscape, params, exec, |s| {
            positions.push(s.positions());
            trace.extend(s.agents.iter().map(|a| TraceRecord {
                iter: s.time_index,
                agent_id: a.id,
                position: a.position,
                uv: a.uv,
                fitness: a.fitness,
                lmate_id: a.lmate,
            }));
        })?;
    }

    let peaks = (0..params.max_iters)
        .map(|t| landscape.peaks_at(t))
        .collect::<Result<Vec<_>>>()?;
    let radius = scenario.arena.capture_radius;
    let report = capture_metrics(&positions, &peaks, radius, scenario.dwell, domain);

    let final_positions = state.positions();
    let final_peaks = landscape.peaks_at(params.max_iters)?;
    let captures = report
        .capture_iteration
        .iter()
        .enumerate()
        .map(|(k, &capture_iteration)| PeakCapture {
            peak: k,
            capture_iteration,
            agents_at_end: final_positions
                .iter()
                .filter(|p| domain.distance(p, &final_peaks[k]) <= radius)
                .count(),
        })
        .collect();
    let final_mean_peak_distance = if final_peaks.is_empty() {
        f64::NAN
    } else {
        final_positions
            .iter()
            .map(|p| nearest(domain, p, &final_peaks))
            .sum::<f64>()
            / n as f64
    };

    let moving = landscape.moving_features();
    let tracking_error_series = if moving.is_empty() {
        Vec::new()
    } else {
        positions
            .iter()
            .zip(&peaks)
            .map(|(agents, peaks_t)| {
                moving
                    .iter()
                    .map(|&k| nearest(domain, &peaks_t[k], agents))
                    .collect()
            })
            .collect()
    };

    Ok(RunResult {
        seed: params.rng_seed,
        captures,
        all_captured_iteration: report.all_captured_iteration,
        final_mean_peak_distance,
        final_positions,
        tracking_error_series,
        trace,
    })
}

/// Per-seed line of a [`BatchSummary`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub seed: u64,
    pub all_captured_iteration: Option<usize>,
    pub capture_iterations: Vec<Option<usize>>,
    pub peaks_captured: usize,
    pub final_mean_peak_distance: f64,
}

impl From<&RunResult> for ReplicateSummary {
    fn from(r: &RunResult) -> Self {
        ReplicateSummary {
            seed: r.seed,
            all_captured_iteration: r.all_captured_iteration,
            capture_iterations: r.captures.iter().map(|c| c.capture_iteration).collect(),
            peaks_captured: r.captured_count(),
            final_mean_peak_distance: r.final_mean_peak_distance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub replicates: Vec<ReplicateSummary>,
    /// Fraction of replicates in which every peak was captured at once.
    pub success_fraction: f64,
    /// Median `all_captured_iteration` over the successful replicates.
    pub median_all_captured_iteration: Option<f64>,
    pub mean_final_peak_distance: f64,
    /// Mean fraction of peaks captured at some point.
    pub mean_capture_fraction: f64,
}

impl BatchSummary {
    /// Aggregates replicate summaries. Values are sorted before reduction so
    /// the result does not depend on replicate order.
    pub fn from_replicates(replicates: Vec<ReplicateSummary>) -> Self {
        let n = replicates.len() as f64;
        let mut done: Vec<usize> = replicates
            .iter()
            .filter_map(|r| r.all_captured_iteration)
            .collect();
        done.sort_unstable();
        let median = match done.len() {
            0 => None,
            k if k % 2 == 1 => Some(done[k / 2] as f64),
            k => Some(0.5 * (done[k / 2 - 1] + done[k / 2]) as f64),
        };
        let sorted_mean = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v.iter().sum::<f64>() / n
        };
        let mean_final_peak_distance = sorted_mean(
            replicates
                .iter()
                .map(|r| r.final_mean_peak_distance)
                .collect(),
        );
        let mean_capture_fraction = sorted_mean(
            replicates
                .iter()
                .map(|r| match r.capture_iterations.len() {
                    0 => 0.0,
                    k => r.peaks_captured as f64 / k as f64,
                })
                .collect(),
        );
        BatchSummary {
            success_fraction: done.len() as f64 / n,
            median_all_captured_iteration: median,
            mean_final_peak_distance,
            mean_capture_fraction,
            replicates,
        }
    }
}

pub fn run_batch(scenario: &Scenario, seeds: &[u64]) -> Result<BatchSummary> {
    run_batch_with(scenario, seeds, Execution::default())
}

/// Runs one independent replicate per seed. Replicates fan out over the
/// rayon pool under [`Execution::Parallel`]; each owns its state, and inner
/// loops of a replicate run sequentially.
pub fn run_batch_with(scenario: &Scenario, seeds: &[u64], exec: Execution) -> Result<BatchSummary> {
    if seeds.is_empty() {
        return Err(Error::Scenario("batch needs at least one seed".into()));
    }
    scenario.validate()?;
    let results = par::map_items(exec, seeds, |&seed| {
        run_experiment_with(&scenario.with_seed(seed), Execution::Sequential)
            .map(|r| ReplicateSummary::from(&r))
    });
    let replicates = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BatchSummary::from_replicates(replicates))
}

/// One batch per step size, for time/accuracy tradeoff tables.
pub fn step_size_sweep(
    scenario: &Scenario,
    step_sizes: &[f64],
    seeds: &[u64],
) -> Result<Vec<(f64, BatchSummary)>> {
    step_sizes
        .iter()
        .map(|&step| {
            let mut s = scenario.clone();
            s.params.step_size = step;
            run_batch(&s, seeds).map(|b| (step, b))
        })
        .collect()
}

/// Intensity a fixed observer reads while one lamp circles at a given rpm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RpmReading {
    pub rpm: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Samples the field at `observer` once per iteration for `iterations`
/// iterations while `lamp` circles `center` at each rpm in `rpms`. The lamp's
/// own `center` is ignored. Faster revolutions are sampled at fewer angles,
/// so the brightest reading can miss the lamp's closest pass.
#[allow(clippy::too_many_arguments)]
pub fn rpm_intensity_sweep(
    bounds: Vec<[f64; 2]>,
    lamp: LightSource,
    center: [f64; 2],
    radius: f64,
    observer: Point,
    rpms: &[f64],
    iter_per_minute: f64,
    iterations: usize,
) -> Result<Vec<RpmReading>> {
    if iterations == 0 {
        return Err(Error::InvalidParams(
            "rpm sweep needs at least one iteration".into(),
        ));
    }
    rpms.iter()
        .map(|&rpm| {
            let start = [center[0] + radius, center[1]];
            let field = make_light_field(
                bounds.clone(),
                vec![LightSource {
                    center: start,
                    ..lamp.clone()
                }],
            )?;
            let trajectory = Trajectory::Circular {
                center,
                radius,
                rpm,
                iter_per_minute,
            };
            let field = field.bind(
                vec![Binding {
                    index: 0,
                    trajectory,
                }],
                iterations,
            )?;
            let samples = (0..iterations)
                .map(|t| field.evaluate(&observer, t))
                .collect::<Result<Vec<f64>>>()?;
            Ok(RpmReading {
                rpm,
                mean: samples.iter().sum::<f64>() / iterations as f64,
                min: samples.iter().copied().fold(f64::INFINITY, f64::min),
                max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::make_three_peaks;

    fn still(p: Point, iters: usize) -> Vec<Vec<Point>> {
        vec![vec![p]; iters]
    }

    #[test]
    fn agent_on_a_static_peak_is_captured_after_dwell() {
        let d = Domain::rect([0.0, 10.0], [0.0, 10.0]).unwrap();
        let peak = Point::xy(5.0, 5.0);
        let r = capture_metrics(&still(peak, 10), &vec![vec![peak]; 10], 1.0, 5, &d);
        assert_eq!(r.capture_iteration, vec![Some(4)]);
        assert_eq!(r.all_captured_iteration, Some(4));
    }

    #[test]
    fn grazing_agent_is_not_captured() {
        let d = Domain::rect([0.0, 10.0], [0.0, 10.0]).unwrap();
        let peak = Point::xy(5.0, 5.0);
        let mut pos = still(Point::xy(0.0, 0.0), 10);
        pos[3] = vec![Point::xy(5.5, 5.0)];
        let r = capture_metrics(&pos, &vec![vec![peak]; 10], 1.0, 5, &d);
        assert_eq!(r.capture_iteration, vec![None]);
        assert_eq!(r.all_captured_iteration, None);
    }

    #[test]
    fn fast_source_outruns_distant_agents() {
        let d = Domain::rect([0.0, 1000.0], [0.0, 10.0]).unwrap();
        let agents = still(Point::xy(0.0, 5.0), 50);
        let peaks: Vec<Vec<Point>> = (0..50)
            .map(|t| vec![Point::xy(100.0 + 10.0 * t as f64, 5.0)])
            .collect();
        let r = capture_metrics(&agents, &peaks, 5.0, 3, &d);
        assert_eq!(r.capture_iteration, vec![None]);
    }

    #[test]
    fn all_captured_requires_simultaneity() {
        let d = Domain::rect([0.0, 10.0], [0.0, 10.0]).unwrap();
        let (a, b) = (Point::xy(1.0, 1.0), Point::xy(9.0, 9.0));
        // One agent visits a, then b; never both at once.
        let mut pos = still(a, 5);
        pos.extend(still(b, 5));
        let r = capture_metrics(&pos, &vec![vec![a, b]; 10], 0.5, 1, &d);
        assert_eq!(r.capture_iteration, vec![Some(0), Some(5)]);
        assert_eq!(r.all_captured_iteration, None);
    }

    fn three_peaks_scenario() -> Scenario {
        Scenario {
            name: "three-peaks".into(),
            landscape: make_three_peaks(),
            params: BmoParams {
                n_agents: 12,
                max_iters: 40,
                step_size: 0.2,
                ..BmoParams::default()
            },
            placement: Placement::UniformRandom,
            arena: Arena {
                outer_radius: 5.0,
                capture_radius: 0.5,
            },
            dwell: 3,
        }
    }

    #[test]
    fn run_records_one_row_per_agent_per_iteration() {
        let s = three_peaks_scenario();
        let r = run_experiment(&s).unwrap();
        assert_eq!(r.trace.len(), 12 * 40);
        for (k, rec) in r.trace.iter().enumerate() {
            assert_eq!((rec.iter, rec.agent_id), (k / 12, k % 12));
        }
        assert!(r.tracking_error_series.is_empty());
        assert!(r.final_mean_peak_distance >= 0.0);
        assert_eq!(r.positions_at(0).len(), 12);
    }

    #[test]
    fn invalid_scenarios_fail_before_running() {
        let mut s = three_peaks_scenario();
        s.params.n_agents = 0;
        assert!(run_experiment(&s).is_err());
        let mut s = three_peaks_scenario();
        s.dwell = 0;
        assert!(run_experiment(&s).is_err());
        let mut s = three_peaks_scenario();
        s.arena.capture_radius = 6.0;
        assert!(run_experiment(&s).is_err());
        assert!(run_batch(&three_peaks_scenario(), &[]).is_err());
    }

    #[test]
    fn batch_is_order_independent_and_deterministic() {
        let s = three_peaks_scenario();
        let a = run_batch(&s, &[1, 2, 3, 4]).unwrap();
        let b = run_batch(&s, &[4, 2, 1, 3]).unwrap();
        assert_eq!(a.success_fraction, b.success_fraction);
        assert_eq!(
            a.median_all_captured_iteration,
            b.median_all_captured_iteration
        );
        assert_eq!(
            a.mean_final_peak_distance.to_bits(),
            b.mean_final_peak_distance.to_bits()
        );
        assert_eq!(
            a.mean_capture_fraction.to_bits(),
            b.mean_capture_fraction.to_bits()
        );
        let same = run_batch(&s, &[7, 7]).unwrap();
        assert_eq!(same.replicates[0], same.replicates[1]);
        assert!((0.0..=1.0).contains(&a.success_fraction));
    }

    #[test]
    fn sequential_and_parallel_batches_agree() {
        let s = three_peaks_scenario();
        let a = run_batch_with(&s, &[5, 6, 7], Execution::Sequential).unwrap();
        let b = run_batch_with(&s, &[5, 6, 7], Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uv_exchange_is_global_every_iteration() {
        let arena = Arena {
            outer_radius: 115.0,
            capture_radius: 25.0,
        };
        let lamp = |x| LightSource {
            center: [x, 115.0],
            power: 14.0,
            height: 30.0,
            color: String::new(),
        };
        let landscape = make_light_field(arena.bounds(), vec![lamp(60.0), lamp(170.0)]).unwrap();
        let params = BmoParams {
            n_agents: 8,
            step_size: 10.0,
            max_iters: 30,
            ..BmoParams::default()
        };
        let mut state =
            init_swarm(&params, landscape.domain(), &Placement::QuadrantRandom).unwrap();
        for _ in 0..params.max_iters {
            bmo_step_observed(
                &mut state,
                &landscape,
                &params,
                Execution::Sequential,
                |s| {
                    assert_eq!(s.received_uv.len(), 8);
                    for i in 0..8 {
                        assert!(s.agents[i].uv > 0.0);
                        for j in 0..8 {
                            assert_eq!(s.received_uv.get(i, j) > 0.0, i != j, "entry ({i}, {j})");
                        }
                    }
                },
            )
            .unwrap();
            let bounds = arena.bounds();
            assert!(state.agents.iter().all(|a| {
                (bounds[0][0]..=bounds[0][1]).contains(&a.position.x())
                    && (bounds[1][0]..=bounds[1][1]).contains(&a.position.y())
            }));
        }
    }

    #[test]
    fn fast_rotation_misses_the_closest_pass() {
        let lamp = LightSource {
            center: [0.0, 0.0],
            power: 14.0,
            height: 30.0,
            color: String::new(),
        };
        // Observer just outside the circle at 45 degrees. A 4-iteration
        // revolution only samples 0, 90, 180 and 270 degrees; a slow one
        // passes within a degree of 45.
        let observer = Point::xy(115.0 + 45.0 * 0.5f64.sqrt(), 115.0 + 45.0 * 0.5f64.sqrt());
        let r = rpm_intensity_sweep(
            vec![[0.0, 230.0]; 2],
            lamp,
            [115.0, 115.0],
            40.0,
            observer,
            &[0.5, 15.0],
            60.0,
            480,
        )
        .unwrap();
        let (slow, fast) = (&r[0], &r[1]);
        assert!(slow.max > 1.5 * fast.max, "{slow:?} vs {fast:?}");
        for reading in &r {
            assert!(reading.min <= reading.mean && reading.mean <= reading.max);
        }
        let closest = 14.0 / (4.0 * std::f64::consts::PI * (25.0 + 900.0));
        assert!((slow.max - closest).abs() / closest < 0.01);
    }
}
