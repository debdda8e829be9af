//! Reference run pinned as a trace file. Set `BMO_BLESS=1` to rewrite it
//! after an intentional behavior change.

use std::fs;
use std::path::Path;

use bmo_core::engine::{Movement, Placement};
use bmo_core::landscape::make_three_peaks;
use bmo_core::sim::{run_experiment, Arena, Scenario};
use bmo_core::trace::write_trace;
use bmo_core::BmoParams;

#[test]
fn four_agents_on_three_peaks_seed_42() {
    let s = Scenario {
        name: "golden".into(),
        landscape: make_three_peaks(),
        params: BmoParams {
            n_agents: 4,
            max_iters: 100,
            rng_seed: 42,
            movement: Movement::FixedStep,
            ..BmoParams::default()
        },
        placement: Placement::UniformRandom,
        arena: Arena {
            outer_radius: 5.0,
            capture_radius: 0.5,
        },
        dwell: 3,
    };
    let run = run_experiment(&s).unwrap();
    for p in &run.final_positions {
        let nearest = s
            .landscape
            .peaks()
            .iter()
            .map(|q| q.distance(p))
            .fold(f64::INFINITY, f64::min);
        assert!(
            nearest <= s.arena.capture_radius,
            "{p} is {nearest} from the nearest peak"
        );
    }

    let mut bytes = Vec::new();
    write_trace(&mut bytes, &run.trace, 2).unwrap();
    let golden =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden_three_peaks_seed42.csv");
    if std::env::var_os("BMO_BLESS").is_some() {
        fs::write(&golden, &bytes).unwrap();
    }
    assert!(
        fs::read(&golden).unwrap() == bytes,
        "trace differs from {}",
        golden.display()
    );
}
