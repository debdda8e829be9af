//! Butterfly mating optimization (BMO).
//!
//! A swarm of genderless agents ("Bflies") locates every local optimum of a
//! fitness field at once. Each iteration every agent turns its fitness into a
//! UV level, spreads that UV to the rest of the swarm weighted by inverse
//! distance, picks a local mate (l-mate) among the fitter agents it hears
//! loudest, and takes one step toward it.
//!
//! The crate is organized as
//!
//! * [`engine`]: the four phases and the synchronous step loop,
//! * [`landscape`]: fitness fields (benchmarks, light fields, images, sphere),
//! * [`dynamic`]: moving peaks and light sources,
//! * [`sim`]: arena experiments, capture and tracking metrics, batches,
//! * [`config`], [`trace`] and [`registry`]: scenario files, trace CSVs and
//!   the built-in scenario set used by the `bmo` command line tool.
//!
//! With the default `parallel` feature the per-agent inner loops, the grid
//! oracle and batch replicates run on rayon; results are bit-identical to the
//! sequential path.

pub mod config;
pub mod dynamic;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod landscape;
pub mod par;
pub mod registry;
pub mod sim;
pub mod trace;

pub use config::ScenarioConfig;
pub use dynamic::{Binding, Trajectory};
pub use engine::{
    bmo_step, distribute_uv, init_swarm, move_agent, select_lmate, update_uv, Bfly, BmoParams,
    Movement, Placement, SwarmState, UvMatrix,
};
pub use error::{Error, Result};
pub use geometry::Point;
pub use landscape::{Domain, Landscape};
pub use par::Execution;
pub use sim::{run_batch, run_experiment, Arena, BatchSummary, RunResult, Scenario};
pub use trace::TraceRecord;
