mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use gaugewave::cli::io::to_canonical_json;
use gaugewave::functionals::{eval_j, eval_lambda, grad_j};
use gaugewave::gauge_field::{phi_bounds_check, solve_phi};
use gaugewave::minimizer::retract_to_constraint;
use gaugewave::nonlinearity::NonlinearityModel;
use gaugewave::radial::{dirichlet_energy, integrate_volume, radial_laplacian, RadialField, RadialGrid};

fn field(n: usize, r_max: f64, seed: u64, amplitude: f64) -> RadialField {
    let f = common::random_profile(&mut common::rng(seed));
    common::sample(RadialGrid::new(n, r_max).unwrap(), move |r| amplitude * f(r))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn grid_nodes_and_weights_match_their_definition(n in 3usize..3000, r_max in 1.0f64..200.0) {
        let grid = RadialGrid::new(n, r_max).unwrap();
        let (r, w) = common::nodes_and_weights(n, r_max);
        prop_assert_eq!(grid.nodes().len(), n);
        for i in 0..n {
            prop_assert!(rel(grid.node(i), r[i]) < 1e-14);
            prop_assert!(rel(grid.weight(i), w[i]) < 1e-14);
        }
        prop_assert!(rel(grid.node(n - 1), r_max) < 1e-14);
        prop_assert!(grid.weights().iter().all(|&x| x > 0.0));
    }

    #[test]
    fn volume_integral_of_one_converges_to_the_ball(n in 400usize..2000, r_max in 1.0f64..50.0) {
        let grid = RadialGrid::new(n, r_max).unwrap();
        let ball = 4.0 / 3.0 * std::f64::consts::PI * r_max.powi(3);
        let total = integrate_volume(&RadialField::from_fn(grid, |_| 1.0)).unwrap();
        // trapezoid in r² dr: error O(h)
        prop_assert!(rel(total, ball) < 4.0 / n as f64, "{} vs {}", total, ball);
    }

    #[test]
    fn laplacian_is_self_adjoint_and_negative(seed in any::<u64>(), other in any::<u64>(), n in 50usize..800) {
        let f = field(n, 20.0, seed, 1.0);
        let g = field(n, 20.0, other, 1.0);
        let lf = radial_laplacian(&f).unwrap();
        let lg = radial_laplacian(&g).unwrap();
        let scale = lf.dot(&lf).sqrt() * g.dot(&g).sqrt() + lg.dot(&lg).sqrt() * f.dot(&f).sqrt();
        prop_assert!((lf.dot(&g) - f.dot(&lg)).abs() <= 1e-12 * scale);
        prop_assert!(rel(-lf.dot(&f), dirichlet_energy(&f)) < 1e-10);
        let (r, _) = common::nodes_and_weights(n, 20.0);
        prop_assert!(rel(dirichlet_energy(&f), common::dirichlet(&r, f.values())) < 1e-12);
    }

    #[test]
    fn phi_stays_between_zero_and_one_over_q(seed in any::<u64>(), q in 0.001f64..5.0, amplitude in 0.01f64..30.0) {
        let u = field(400, 25.0, seed, amplitude);
        let gs = solve_phi(&u, q).unwrap();
        let report = phi_bounds_check(&gs);
        prop_assert!(report.pass, "{:?}", report.violation);
        prop_assert!(report.min >= -1e-12);
        prop_assert!(q * report.max <= 1.0 + 1e-12);
    }

    #[test]
    fn phi_agrees_with_an_independent_elimination(seed in any::<u64>(), q in 0.0f64..2.0, n in 20usize..600) {
        let u = field(n, 20.0, seed, 2.0);
        let phi = solve_phi(&u, q).unwrap().phi;
        let oracle = common::banded_phi(u.values(), q, 20.0);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for (a, b) in phi.values().iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn phi_is_even_in_u(seed in any::<u64>(), q in 0.0f64..3.0) {
        let u = field(300, 20.0, seed, 1.5);
        let a = solve_phi(&u, q).unwrap().phi;
        let b = solve_phi(&u.scaled(-1.0), q).unwrap().phi;
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn lambda_is_positive_and_below_the_charge_free_value(seed in any::<u64>(), q in 0.0f64..3.0, amplitude in 0.1f64..10.0) {
        let u = field(500, 25.0, seed, amplitude);
        let value = eval_lambda(&u, q).unwrap();
        let free = eval_lambda(&u, 0.0).unwrap();
        prop_assert!(value > 0.0);
        prop_assert!(value <= free * (1.0 + 1e-14));
        prop_assert!(rel(value, common::lambda(u.values(), q, 25.0)) < 1e-11);
    }

    #[test]
    fn retraction_lands_on_the_constraint(seed in any::<u64>(), q in 0.0f64..0.2, ratio in 0.3f64..3.0) {
        // keep the dilated profile well inside the box
        let u = field(800, 40.0, seed, 1.0);
        let sigma2 = ratio * eval_lambda(&u, q).unwrap();
        let (v, lambda) = retract_to_constraint(&u, q, sigma2).unwrap();
        prop_assert!(lambda > 0.0);
        prop_assert!(rel(eval_lambda(&v, q).unwrap(), sigma2) < 1e-10);
    }

    #[test]
    fn saturable_potential_is_nonnegative_and_matches(s in -50.0f64..50.0, m0 in 0.1f64..5.0, s0 in 0.1f64..5.0) {
        let model = NonlinearityModel::saturable(m0, s0).unwrap();
        let w = model.w(s).unwrap();
        prop_assert!(w >= 0.0);
        prop_assert!(w <= 0.5 * m0 * m0 * s0 * s0);
        prop_assert!(rel(w, common::saturable_w(s, m0, s0)) < 1e-13 || w.abs() < 1e-300);
        let dw = model.dw(s).unwrap();
        prop_assert!((dw - common::saturable_dw(s, m0, s0)).abs() <= 1e-13 * (1.0 + dw.abs()));
        prop_assert_eq!(model.w(-s).unwrap(), w);
    }

    #[test]
    fn action_and_its_gradient_are_even(seed in any::<u64>()) {
        let model = NonlinearityModel::saturable(1.0, 1.0).unwrap();
        let u = field(300, 20.0, seed, 2.0);
        let minus = u.scaled(-1.0);
        prop_assert_eq!(eval_j(&u, &model).unwrap(), eval_j(&minus, &model).unwrap());
        let g = grad_j(&u, &model).unwrap();
        let gm = grad_j(&minus, &model).unwrap();
        for (a, b) in g.values().iter().zip(gm.values()) {
            prop_assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn canonical_json_round_trips_every_float(values in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..40)) {
        let doc: BTreeMap<String, Vec<f64>> = [("values".to_string(), values.clone())].into();
        let text = to_canonical_json(&doc).unwrap();
        let back: BTreeMap<String, Vec<f64>> = serde_json::from_str(&text).unwrap();
        for (a, b) in values.iter().zip(&back["values"]) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(to_canonical_json(&back).unwrap(), text);
    }
}
