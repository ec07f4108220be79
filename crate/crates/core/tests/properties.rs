use proptest::prelude::*;

use wentzell::interval::build_interval_path;
use wentzell::kernels::transition_measure;
use wentzell::laws::v_exit;
use wentzell::path::build_process;
use wentzell::{normalize_wentzell, Absorption, BoundaryModel, Side, TimeGrid};

fn grid() -> TimeGrid {
    TimeGrid::new(1.0, 500).unwrap()
}

fn model() -> impl Strategy<Value = BoundaryModel> {
    prop_oneof![
        Just(BoundaryModel::reflecting()),
        Just(BoundaryModel::absorbing(Absorption::Stop)),
        Just(BoundaryModel::absorbing(Absorption::Kill)),
        (0.05..5.0f64).prop_map(|b| BoundaryModel::elastic(b).unwrap()),
        (0.05..5.0f64).prop_map(|g| BoundaryModel::sticky(g).unwrap()),
        (0.05..5.0f64, 0.05..5.0f64).prop_map(|(b, g)| BoundaryModel::general(b, g).unwrap()),
        (0.05..5.0f64).prop_map(|b| BoundaryModel::trap_kill(b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn same_seed_same_path(m in model(), x in 0.0..2.0f64, seed in any::<u64>()) {
        prop_assert_eq!(build_process(&m, x, grid(), seed).unwrap(), build_process(&m, x, grid(), seed).unwrap());
    }

    #[test]
    fn live_values_are_nonnegative(m in model(), x in 0.0..2.0f64, seed in any::<u64>()) {
        let p = build_process(&m, x, grid(), seed).unwrap();
        for i in 0..p.path.values.len() {
            if p.path.alive(i) {
                prop_assert!(p.path.values[i] >= 0.0);
            }
        }
        prop_assert_eq!(p.path.values[0], x);
    }

    #[test]
    fn local_time_grows_only_near_the_origin(beta in prop::option::of(0.05..5.0f64), seed in any::<u64>()) {
        let m = beta.map_or(BoundaryModel::reflecting(), |b| BoundaryModel::elastic(b).unwrap());
        let g = grid();
        let p = build_process(&m, 0.0, g, seed).unwrap();
        let (l, r) = (&p.local_time, &p.path.values);
        for i in 1..l.len() {
            if !p.path.alive(i) {
                break;
            }
            prop_assert!(l[i] >= l[i - 1]);
            if r[i - 1].min(r[i]) > g.eps_flat() {
                prop_assert_eq!(l[i], l[i - 1]);
            }
        }
    }

    #[test]
    fn sticky_clock_is_strictly_increasing(beta in 0.0..3.0f64, gamma in 0.05..5.0f64, seed in any::<u64>()) {
        let m = BoundaryModel::from_rates(beta, gamma).unwrap();
        let p = build_process(&m, 0.0, grid(), seed).unwrap();
        let tau = p.time_change.expect("sticky paths carry their clock");
        for i in 1..tau.len() {
            if p.path.alive(i) {
                prop_assert!(tau[i] > tau[i - 1]);
                prop_assert!(tau[i] <= grid().time(i) + 1e-12);
            }
        }
    }

    #[test]
    fn stronger_killing_dies_sooner(b in 0.05..3.0f64, factor in 1.0..4.0f64, seed in any::<u64>()) {
        let life = |beta: f64| {
            let p = build_process(&BoundaryModel::elastic(beta).unwrap(), 0.0, grid(), seed).unwrap();
            p.path.lifetime.unwrap_or(f64::INFINITY)
        };
        prop_assert!(life(b * factor) <= life(b));
    }

    #[test]
    fn transition_mass_is_at_most_one(m in model(), t in 0.05..4.0f64, x in 0.0..2.0f64) {
        let mu = transition_measure(&m, t, x).unwrap();
        let total = mu.total_mass();
        prop_assert!(mu.atom_mass() >= 0.0 && mu.atom_mass() <= 1.0 + 1e-12);
        if m.is_conservative() {
            prop_assert!((total - 1.0).abs() < 1e-8, "total {}", total);
        } else {
            prop_assert!(total <= 1.0 + 1e-8, "total {}", total);
        }
    }

    #[test]
    fn interval_paths_stay_in_the_unit_interval(
        m0 in model(),
        m1 in model(),
        x in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let r = build_interval_path(x, &m0, &m1.on_side(Side::AtOne), grid(), seed).unwrap();
        for i in 0..r.path.values.len() {
            if r.path.alive(i) {
                prop_assert!((0.0..=1.0).contains(&r.path.values[i]));
            }
        }
        prop_assert_eq!(r.crossovers.len(), r.segment_kinds.len());
        prop_assert!(r.crossover_times.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.crossovers.windows(2).skip(1).all(|w| w[1] > w[0]));
    }

    #[test]
    fn exit_transform_is_even_and_one_at_the_barrier(
        alpha in 0.01..5.0f64,
        beta in 0.0..5.0f64,
        a in 0.1..3.0f64,
        x in -3.0..3.0f64,
    ) {
        let v = v_exit(alpha, beta, a, x);
        prop_assert!((v - v_exit(alpha, beta, a, -x)).abs() < 1e-12);
        prop_assert!(v > 0.0 && v <= 1.0 + 1e-12);
        prop_assert!((v_exit(alpha, beta, a, a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wentzell_weights_are_scale_free(a in 0.0..3.0f64, b in 0.01..3.0f64, c in 0.0..3.0f64, k in 0.1..10.0f64) {
        let m = normalize_wentzell(a, b, c, Side::AtZero).unwrap();
        let scaled = normalize_wentzell(k * a, k * b, k * c, Side::AtZero).unwrap();
        prop_assert!((m.beta() - scaled.beta()).abs() < 1e-9 * (1.0 + m.beta()));
        prop_assert!((m.gamma() - scaled.gamma()).abs() < 1e-9 * (1.0 + m.gamma()));
    }
}
