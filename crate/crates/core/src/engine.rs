//! The four BMO phases and the synchronous step loop.
//!
//! One iteration, all agents reading the same time-`t` snapshot:
//!
//! 1. sense fitness at the current position,
//! 2. update UV: `uv = max(0, b1 * uv + b2 * fitness)`,
//! 3. distribute UV to every other agent in proportion to inverse distance,
//! 4. pick an l-mate: scan the others by received UV (loudest first) and take
//!    the first that is fitter, or self if none is,
//! 5. step toward the l-mate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::landscape::{Domain, Landscape};
use crate::par::{self, Execution};

/// How an agent steps toward its l-mate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Movement {
    /// Step `min(step_size, distance)`: never overshoots the l-mate.
    #[default]
    Clamped,
    /// Always step exactly `step_size`, passing the l-mate when it is closer
    /// than one step.
    FixedStep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmoParams {
    /// UV retention, `0 <= b1 <= 1`.
    pub b1: f64,
    /// Fitness gain, `b2 > 1`.
    pub b2: f64,
    pub step_size: f64,
    pub n_agents: usize,
    pub max_iters: usize,
    /// Distance floor used when spreading UV between co-located agents.
    pub d_min: f64,
    pub rng_seed: u64,
    /// Random displacement applied to self-mated agents (0 disables).
    pub jitter: f64,
    pub movement: Movement,
}

impl Default for BmoParams {
    fn default() -> Self {
        BmoParams {
            b1: 0.7,
            b2: 2.0,
            step_size: 0.1,
            n_agents: 30,
            max_iters: 500,
            d_min: 1e-6,
            rng_seed: 42,
            jitter: 0.0,
            movement: Movement::Clamped,
        }
    }
}

impl BmoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(0.0..=1.0).contains(&self.b1) {
            return bad(format!("b1 = {} must lie in [0, 1]", self.b1));
        }
        if !(self.b2 > 1.0 && self.b2.is_finite()) {
            return bad(format!("b2 = {} must exceed 1", self.b2));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return bad(format!("step_size = {} must be positive", self.step_size));
        }
        if !(self.d_min > 0.0 && self.d_min.is_finite()) {
            return bad(format!("d_min = {} must be positive", self.d_min));
        }
        if self.n_agents == 0 {
            return bad("n_agents must be at least 1".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return bad(format!("jitter = {} must be >= 0", self.jitter));
        }
        Ok(())
    }
}

/// One agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bfly {
    pub id: usize,
    pub position: Point,
    pub uv: f64,
    /// Fitness sensed at the start of the latest iteration.
    pub fitness: f64,
    pub lmate: usize,
}

/// Square matrix of UV shares; entry `(i, j)` is the UV agent `j` absorbs
/// from agent `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct UvMatrix {
    n: usize,
    data: Vec<f64>,
}

impl UvMatrix {
    pub fn zeros(n: usize) -> Self {
        UvMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "UV matrix must be square"
        );
        UvMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// UV sent by `from` to `to`.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.n + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.data[from * self.n..(from + 1) * self.n]
    }
}

/// All agents at one time index plus the generator driving placement and
/// jitter.
#[derive(Clone, Debug)]
pub struct SwarmState {
    pub time_index: usize,
    pub agents: Vec<Bfly>,
    pub received_uv: UvMatrix,
    pub rng: ChaCha8Rng,
}

impl SwarmState {
    /// A swarm at `t = 0` with zero UV and every agent its own l-mate.
    pub fn from_positions(positions: Vec<Point>, seed: u64) -> Self {
        let n = positions.len();
        SwarmState {
            time_index: 0,
            agents: positions
                .into_iter()
                .enumerate()
                .map(|(id, position)| Bfly {
                    id,
                    position,
                    uv: 0.0,
                    fitness: 0.0,
                    lmate: id,
                })
                .collect(),
            received_uv: UvMatrix::zeros(n),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn positions(&self) -> Vec<Point> {
        self.agents.iter().map(|a| a.position).collect()
    }
}

/// UV recurrence `max(0, b1 * prev + b2 * fitness)`.
pub fn update_uv(prev_uv: f64, fitness: f64, params: &BmoParams) -> Result<f64> {
    if !prev_uv.is_finite() || !fitness.is_finite() {
        return Err(Error::NonFinite(format!(
            "UV update (previous UV {prev_uv}, fitness {fitness})"
        )));
    }
    let uv = (params.b1 * prev_uv + params.b2 * fitness).max(0.0);
    if !uv.is_finite() {
        return Err(Error::NonFinite(format!(
            "UV update overflowed from fitness {fitness}"
        )));
    }
    Ok(uv)
}

/// Splits each agent's UV among the others by inverse distance (floored at
/// `d_min`). Row `i` sums to `uv_i`; the diagonal is zero.
pub fn distribute_uv(agents: &[Bfly], d_min: f64) -> UvMatrix {
    distribute_uv_with(agents, d_min, Execution::default())
}

pub fn distribute_uv_with(agents: &[Bfly], d_min: f64, exec: Execution) -> UvMatrix {
    let n = agents.len();
    let rows = par::map_range(exec, n, |i| {
        let me = &agents[i];
        let mut row: Vec<f64> = agents
            .iter()
            .map(|other| {
                if other.id == me.id {
                    0.0
                } else {
                    1.0 / me.position.distance(&other.position).max(d_min)
                }
            })
            .collect();
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            for w in &mut row {
                *w = me.uv * *w / total;
            }
        }
        row
    });
    UvMatrix::from_rows(rows)
}

/// L-mate of agent `i`: among the other agents, ordered by UV received from
/// them (descending, ties by distance then id), the first one strictly
/// fitter than `i`; `i` itself when none is.
pub fn select_lmate(i: usize, agents: &[Bfly], received: &UvMatrix) -> usize {
    let me = &agents[i];
    // The first qualifying agent in scan order is the scan-order minimum of
    // the qualifying set, so one pass suffices.
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, other) in agents.iter().enumerate() {
        if j == i || other.fitness <= me.fitness {
            continue;
        }
        let heard = received.get(j, i);
        let dist = me.position.distance(&other.position);
        let better = match best {
            None => true,
            Some((bj, bheard, bdist)) => heard
                .total_cmp(&bheard)
                .reverse()
                .then(dist.total_cmp(&bdist))
                .then(j.cmp(&bj))
                .is_lt(),
        };
        if better {
            best = Some((j, heard, dist));
        }
    }
    best.map_or(i, |(j, _, _)| j)
}

/// Clamped step from `from` toward `to`: lands on `to` when it is within
/// `step_size`.
pub fn move_agent(from: Point, to: Point, step_size: f64) -> Point {
    Movement::Clamped.step(from, to, step_size)
}

impl Movement {
    pub fn step(self, from: Point, to: Point, step_size: f64) -> Point {
        let delta = to - from;
        let dist = delta.norm();
        if dist == 0.0 {
            return from;
        }
        match self {
            Movement::Clamped if dist <= step_size => to,
            _ => from + delta * (step_size / dist),
        }
    }
}

/// Initial placement of the swarm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    UniformRandom,
    /// Agent `k` goes to quadrant `k mod 4` (lower-left, lower-right,
    /// upper-left, upper-right), uniformly within it. 2-D boxes only.
    QuadrantRandom,
    Explicit {
        positions: Vec<Point>,
    },
}

fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

fn uniform_point(rng: &mut ChaCha8Rng, domain: &Domain) -> Point {
    match domain {
        Domain::Box { bounds } => {
            let mut c = [0.0; 3];
            for (axis, [lo, hi]) in bounds.iter().enumerate() {
                c[axis] = uniform_in(rng, *lo, *hi);
            }
            Point(c)
        }
        Domain::SphereSurface { radius } => {
            let z = uniform_in(rng, -radius, *radius);
            let phi = uniform_in(rng, 0.0, std::f64::consts::TAU);
            let rho = (radius * radius - z * z).max(0.0).sqrt();
            Point::xyz(rho * phi.cos(), rho * phi.sin(), z)
        }
    }
}

pub fn init_swarm(
    params: &BmoParams,
    domain: &Domain,
    placement: &Placement,
) -> Result<SwarmState> {
    params.validate()?;
    domain.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let positions = match placement {
        Placement::UniformRandom => (0..params.n_agents)
            .map(|_| uniform_point(&mut rng, domain))
            .collect(),
        Placement::QuadrantRandom => {
            let (bx, by) = domain.bounds_2d().ok_or_else(|| {
                Error::InvalidParams("quadrant placement needs a 2-D box domain".into())
            })?;
            let mx = 0.5 * (bx[0] + bx[1]);
            let my = 0.5 * (by[0] + by[1]);
            (0..params.n_agents)
                .map(|k| {
                    let (xs, ys) = match k % 4 {
                        0 => ((bx[0], mx), (by[0], my)),
                        1 => ((mx, bx[1]), (by[0], my)),
                        2 => ((bx[0], mx), (my, by[1])),
                        _ => ((mx, bx[1]), (my, by[1])),
                    };
                    let x = uniform_in(&mut rng, xs.0, xs.1);
                    let y = uniform_in(&mut rng, ys.0, ys.1);
                    Point::xy(x, y)
                })
                .collect()
        }
        Placement::Explicit { positions } => {
            if positions.len() != params.n_agents {
                return Err(Error::InvalidParams(format!(
                    "{} explicit positions for {} agents",
                    positions.len(),
                    params.n_agents
                )));
            }
            if let Some(p) = positions.iter().find(|p| !domain.contains(p, 0.0)) {
                return Err(Error::OutOfDomain(*p));
            }
            positions.clone()
        }
    };
    let mut state = SwarmState::from_positions(positions, params.rng_seed);
    state.rng = rng;
    Ok(state)
}

/// One synchronous iteration; see the module docs.
pub fn bmo_step(state: &mut SwarmState, landscape: &Landscape, params: &BmoParams) -> Result<()> {
    bmo_step_observed(state, landscape, params, Execution::default(), |_| {})
}

/// [`bmo_step`] with an explicit execution mode and a hook that sees the
/// state after l-mate selection and before anyone moves, i.e. positions at
/// `t` together with the fitness, UV and l-mates computed from them.
pub fn bmo_step_observed<F>(
    state: &mut SwarmState,
    landscape: &Landscape,
    params: &BmoParams,
    exec: Execution,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(&SwarmState),
{
    let t = state.time_index;
    let n = state.agents.len();

    let agents = &state.agents;
    let sensed = par::map_range(exec, n, |i| landscape.evaluate(&agents[i].position, t));
    for (agent, fitness) in state.agents.iter_mut().zip(sensed) {
        let fitness = fitness?;
        agent.fitness = fitness;
        agent.uv = update_uv(agent.uv, fitness, params)?;
    }

    state.received_uv = distribute_uv_with(&state.agents, params.d_min, exec);

    let (agents, received) = (&state.agents, &state.received_uv);
    let mates = par::map_range(exec, n, |i| select_lmate(i, agents, received));
    for (agent, lmate) in state.agents.iter_mut().zip(mates) {
        agent.lmate = lmate;
    }

    observe(state);

    let domain = landscape.domain();
    let jitter: Vec<Option<Point>> = if params.jitter > 0.0 {
        let reach = params.jitter.min(params.step_size);
        state
            .agents
            .iter()
            .map(|a| {
                (a.lmate == a.id).then(|| random_direction(&mut state.rng, domain.dim()) * reach)
            })
            .collect()
    } else {
        vec![None; n]
    };
    let agents = &state.agents;
    let moved = par::map_range(exec, n, |i| {
        let a = &agents[i];
        let next = match jitter[i] {
            Some(offset) => a.position + offset,
            None => params
                .movement
                .step(a.position, agents[a.lmate].position, params.step_size),
        };
        domain.clip(next)
    });
    for (agent, p) in state.agents.iter_mut().zip(moved) {
        agent.position = p;
    }
    state.time_index += 1;
    Ok(())
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    loop {
        let mut c = [0.0; 3];
        for v in c.iter_mut().take(dim) {
            *v = uniform_in(rng, -1.0, 1.0);
        }
        let p = Point(c);
        let n = p.norm();
        if n > 1e-3 && n <= 1.0 {
            return p * (1.0 / n);
        }
    }
}
