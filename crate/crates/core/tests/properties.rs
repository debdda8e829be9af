use std::f64::consts::TAU;

use bmo_core::engine::{bmo_step_observed, init_swarm, Movement, Placement, SwarmState};
use bmo_core::landscape::oracle::grid_local_max_oracle;
use bmo_core::landscape::pgm::{parse_pgm, GrayImage};
use bmo_core::landscape::{
    make_light_field, make_rastrigin, make_schwefel, make_three_peaks, LightSource,
};
use bmo_core::{Binding, BmoParams, Execution, Landscape, Point, Trajectory};
use proptest::prelude::*;

fn params(n: usize, step: f64, movement: Movement, seed: u64) -> BmoParams {
    BmoParams {
        n_agents: n,
        step_size: step,
        movement,
        rng_seed: seed,
        ..BmoParams::default()
    }
}

fn movement() -> impl Strategy<Value = Movement> {
    prop_oneof![Just(Movement::Clamped), Just(Movement::FixedStep)]
}

fn lamps() -> Landscape {
    let lamp = |x, y, power| LightSource {
        center: [x, y],
        power,
        height: 30.0,
        color: String::new(),
    };
    make_light_field(
        vec![[0.0, 230.0]; 2],
        vec![lamp(60.0, 115.0, 14.0), lamp(170.0, 80.0, 10.0)],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_stay_bounded_and_lmates_are_fitter(
        n in 1usize..25,
        step in 0.01f64..2.0,
        mv in movement(),
        seed in any::<u64>(),
    ) {
        let land = make_three_peaks();
        let p = params(n, step, mv, seed);
        let mut state = init_swarm(&p, land.domain(), &Placement::UniformRandom).unwrap();
        for _ in 0..30 {
            let before = state.positions();
            let mut dominance = true;
            bmo_step_observed(&mut state, &land, &p, Execution::Sequential, |s| {
                for a in &s.agents {
                    let mate = &s.agents[a.lmate];
                    dominance &= a.lmate == a.id || mate.fitness > a.fitness;
                    dominance &= a.uv >= 0.0;
                }
            }).unwrap();
            prop_assert!(dominance);
            for (a, b) in before.iter().zip(state.positions()) {
                prop_assert!(a.distance(&b) <= step + 1e-12);
                prop_assert!(land.domain().contains(&b, 0.0));
            }
        }
    }

    #[test]
    fn permuting_agents_permutes_trajectories(seed in any::<u64>(), n in 2usize..12, shuffle in any::<u64>()) {
        let land = lamps();
        let p = params(n, 10.0, Movement::FixedStep, seed);
        let start = init_swarm(&p, land.domain(), &Placement::UniformRandom).unwrap().positions();
        // A permutation from the shuffle seed: sort indices by a hash.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&k| (k as u64 + 1).wrapping_mul(shuffle | 1).rotate_left(17));
        let permuted: Vec<Point> = perm.iter().map(|&k| start[k]).collect();

        let run = |positions: Vec<Point>| {
            let mut s = SwarmState::from_positions(positions, seed);
            for _ in 0..15 {
                bmo_step_observed(&mut s, &land, &p, Execution::Sequential, |_| {}).unwrap();
            }
            s.positions()
        };
        let a = run(start);
        let b = run(permuted);
        for (slot, &k) in perm.iter().enumerate() {
            prop_assert!(a[k].distance(&b[slot]) < 1e-9, "agent {k}: {} vs {}", a[k], b[slot]);
        }
    }

    #[test]
    fn pgm_round_trips_in_both_encodings(
        w in 1usize..9,
        h in 1usize..9,
        maxval in prop_oneof![1u16..=255, 256u16..=u16::MAX],
        raw in prop::collection::vec(any::<u16>(), 64),
    ) {
        let samples: Vec<u16> = raw[..w * h].iter().map(|s| s % (maxval as u32 + 1) as u16).collect();
        let img = GrayImage::new(w, h, maxval, samples).unwrap();
        prop_assert_eq!(parse_pgm(&img.to_p5()).unwrap(), img.clone());
        prop_assert_eq!(parse_pgm(&img.to_p2()).unwrap(), img);
    }

    #[test]
    fn horizontal_shift_is_a_translation(
        k in -0.01f64..0.01,
        t in 0usize..40,
        x in 1.0f64..9.0,
        y in 0.0f64..10.0,
    ) {
        let fixed = make_three_peaks();
        let bindings = (0..3).map(|index| Binding { index, trajectory: Trajectory::HorizontalShift { k } }).collect();
        let moving = make_three_peaks().bind(bindings, 40).unwrap();
        let there = moving.evaluate(&Point::xy(x + k * t as f64, y), t).unwrap();
        let here = fixed.evaluate(&Point::xy(x, y), 0).unwrap();
        prop_assert!((there - here).abs() <= 1e-12, "{there} vs {here}");
    }
}

fn grid(l: &Landscape, n: usize) -> impl Iterator<Item = Point> + '_ {
    let (bx, by) = l.domain().bounds_2d().unwrap();
    (0..=n).flat_map(move |j| {
        (0..=n).map(move |i| {
            Point::xy(
                bx[0] + (bx[1] - bx[0]) * i as f64 / n as f64,
                by[0] + (by[1] - by[0]) * j as f64 / n as f64,
            )
        })
    })
}

#[test]
fn shifted_fields_are_nonnegative_everywhere() {
    for l in [
        make_three_peaks(),
        make_rastrigin(None).unwrap(),
        make_schwefel(None).unwrap(),
        lamps(),
    ] {
        for p in grid(&l, 400) {
            let v = l.evaluate(&p, 0).unwrap();
            assert!(v >= 0.0, "{v} at {p}");
        }
    }
}

#[test]
fn oracle_peaks_beat_sixteen_neighbors() {
    for l in [
        make_three_peaks(),
        make_rastrigin(None).unwrap(),
        make_schwefel(None).unwrap(),
        lamps(),
    ] {
        let eps = l.domain().width() * 1e-4;
        let peaks = grid_local_max_oracle(&l, 500, 0).unwrap();
        assert!(!peaks.is_empty());
        for p in &peaks {
            let top = l.evaluate(p, 0).unwrap();
            for k in 0..16 {
                let a = TAU * k as f64 / 16.0;
                let q = Point::xy(p.x() + eps * a.cos(), p.y() + eps * a.sin());
                if l.domain().contains(&q, 0.0) {
                    assert!(
                        l.evaluate(&q, 0).unwrap() <= top,
                        "{p} is beaten toward {q}"
                    );
                }
            }
        }
    }
}
