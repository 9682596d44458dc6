use proptest::prelude::*;

use fqmci::circuits::{build_a, build_amplified, build_state_prep, Circuit, Gate};
use fqmci::distributions::{make_grid, DiscreteDistribution};
use fqmci::estimators::plan_allocation;
use fqmci::fourier::{extend_periodic, fourier_coefficients, integrate, FunctionSpec};
use fqmci::simulator::{good_state_probability, Statevector};
use fqmci::qae::{log_likelihood, maximize_likelihood, mle_schedule, MleConfig, Observation};
use fqmci::simulator::sample_grover_shots;
use fqmci::{QaeBudget, QaeMethod, ShotSampler};

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len)
}

fn joint() -> impl Strategy<Value = DiscreteDistribution<f64>> {
    (1u32..=2, 1u32..=2, -4.0f64..4.0, 0.1f64..2.0)
        .prop_flat_map(|(n0, n1, x_l, d)| (Just((n0, n1, x_l, d)), weights(1usize << (n0 + n1))))
        .prop_map(|((n0, n1, x_l, d), w)| {
            let supports = vec![make_grid(x_l, d, n0).unwrap(), make_grid(-x_l, 2.0 * d, n1).unwrap()];
            DiscreteDistribution::from_weights(supports, w).unwrap()
        })
}

fn univariate() -> impl Strategy<Value = DiscreteDistribution<f64>> {
    (1u32..=4, -5.0f64..5.0, 0.1f64..2.0)
        .prop_flat_map(|(n, x_l, d)| (Just((n, x_l, d)), weights(1usize << n)))
        .prop_map(|((n, x_l, d), w)| {
            DiscreteDistribution::from_weights(vec![make_grid(x_l, d, n).unwrap()], w).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_are_normalised(d in joint()) {
        for axis in 0..2 {
            let total: f64 = d.marginal(axis).unwrap().probs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_is_linear(d in joint(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = |c: &[f64]| c[0] * c[1];
        let g = |c: &[f64]| (c[0] - c[1]).cos();
        let lhs = d.brute_force_expectation(&[0, 1], |c| a * f(c) + b * g(c)).unwrap();
        let rhs = a * d.brute_force_expectation(&[0, 1], f).unwrap() + b * d.brute_force_expectation(&[0, 1], g).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn product_expectation_factorises(x in univariate(), y in univariate()) {
        let joint = DiscreteDistribution::product(&[x.clone(), y.clone()]).unwrap();
        let lhs = joint.brute_force_expectation(&[0, 1], |c| c[0].sin() * c[1] * c[1]).unwrap();
        let rhs = x.expectation(0, f64::sin).unwrap() * y.expectation(0, |v| v * v).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn inverse_restores_ground_state(angles in prop::collection::vec((0usize..3, -6.0f64..6.0), 1..12)) {
        let mut c = Circuit::new(3).unwrap();
        for (k, &(q, a)) in angles.iter().enumerate() {
            c.push(Gate::Ry { target: q, angle: a }).unwrap();
            if k % 2 == 1 {
                c.push(Gate::ControlledRy { control: q, target: (q + 1) % 3, angle: a / 2.0 }).unwrap();
            }
        }
        let mut round = c.clone();
        round.append(&c.inverse()).unwrap();
        let mut sv = Statevector::zero(3).unwrap();
        sv.apply(&round).unwrap();
        prop_assert!((sv.amplitudes()[0].re - 1.0).abs() < 1e-10);
        prop_assert!((sv.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grover_law_to_depth_64(d in univariate(), n in 1usize..6, omega in 0.05f64..2.0, m in 0usize..=64) {
        let p = build_state_prep(&d).unwrap();
        let a = build_a(&p, &d, 0, 0.0, n, omega).unwrap();
        let theta = good_state_probability(&a).unwrap().sqrt().asin();
        let sim = good_state_probability(&build_amplified(&a, m).unwrap()).unwrap();
        prop_assert!((sim - ((2 * m + 1) as f64 * theta).sin().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn bridge_constraints_hold(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=5),
        lo in -3.0f64..0.0,
        len in 0.5f64..3.0,
        stretch in 1.01f64..=3.0,
    ) {
        let f = FunctionSpec::polynomial(coeffs, lo, lo + len).unwrap();
        let ext = extend_periodic(&f, stretch).unwrap();
        for r in ext.continuity_residuals() {
            prop_assert!(r.abs() < 1e-9);
        }
    }

    #[test]
    fn closed_form_matches_quadrature(coeffs in prop::collection::vec(-2.0f64..2.0, 1..=4), n in 1usize..=20) {
        let f = FunctionSpec::polynomial(coeffs, -1.0, 2.0).unwrap();
        let ext = extend_periodic(&f, 2.0).unwrap();
        let series = fourier_coefficients(&ext, n).unwrap();
        let (start, period) = (ext.x_l(), ext.period());
        let k = n as f64 * series.omega;
        let mid = ext.x_u();
        let end = start + period;
        let quad = |g: &dyn Fn(f64) -> f64| {
            integrate(|x| ext.eval(x) * g(x), start, mid, 1e-13).unwrap()
                + integrate(|x| ext.eval(x.min(end - 1e-13)) * g(x), mid, end, 1e-13).unwrap()
        };
        let a = 2.0 / period * quad(&|x| (k * x).cos());
        let b = 2.0 / period * quad(&|x| (k * x).sin());
        prop_assert!((series.a(n) - a).abs() < 1e-10);
        prop_assert!((series.b(n) - b).abs() < 1e-10);
    }

    #[test]
    fn qae_respects_budget(s in 0.0f64..=1.0, q in 1u64..50_000, seed in any::<u64>(), name in prop::sample::select(vec!["classical", "mle", "exact"])) {
        let method = QaeMethod::from_name(name).unwrap();
        let r = method.estimate(s.sqrt().asin(), QaeBudget::new(q).unwrap(), &mut ShotSampler::new(seed, 0));
        prop_assert!((0.0..=1.0).contains(&r.estimate));
        prop_assert!(r.queries_used <= q);
    }

    #[test]
    fn allocation_within_predicted_bound(q0 in 1.0f64..1e6, lambda in prop::sample::select(vec![1.0, 2.0]), delta in 0.1f64..0.9) {
        let f = FunctionSpec::identity(0.0, 1.0).unwrap();
        let plan = plan_allocation(q0, lambda, delta).unwrap();
        let series = fourier_coefficients(&extend_periodic(&f, 2.0).unwrap(), plan.n_max).unwrap();
        prop_assert!((plan.accounted_total(&series) as f64) <= plan.predicted_bound);
    }

    #[test]
    fn mle_maximiser_is_global(theta in 0.0f64..=std::f64::consts::FRAC_PI_2, q in 32u64..200_000, seed in any::<u64>()) {
        let mut sampler = ShotSampler::new(seed, 0);
        let obs: Vec<Observation> = mle_schedule(q, 32)
            .iter()
            .map(|l| Observation {
                factor: (2 * l.m + 1) as f64,
                shots: l.shots as f64,
                hits: sample_grover_shots(theta, l.m, l.shots, &mut sampler) as f64,
            })
            .collect();
        let found = maximize_likelihood(&obs, &MleConfig::default());
        let (at_found, at_truth) = (log_likelihood(&obs, found), log_likelihood(&obs, theta));
        prop_assert!(at_found >= at_truth - 1e-9 * at_truth.abs().max(1.0), "{at_found} < {at_truth}");
    }
}
