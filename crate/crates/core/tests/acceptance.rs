//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion before asserting; run with `-- --nocapture --test-threads 1` to
//! see all lines in order.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fqmci::bench::{find_crossover, run_sweep, Crossover, SweepConfig, SweepReport};
use fqmci::circuits::{build_a, build_a_bivariate, build_amplified, build_rescaled, build_state_prep};
use fqmci::distributions::{make_grid, reference_distribution, DiscreteDistribution};
use fqmci::estimators::{zeta, EstimateReport, ProductQmci, DEFAULT_DELTA};
use fqmci::fourier::{extend_periodic, fourier_coefficients, verify_decay, FunctionSpec, PeriodicExtension};
use fqmci::qae::QaeMethod;
use fqmci::simulator::good_state_probability;
use fqmci::ShotSampler;
use fqmci::{FourierSeries, PeriodicExtension as Extension};

const SEED: u64 = 20_210_310;
const RUNS: usize = 100;

fn verdict(id: u32, pass: bool, detail: &str) {
    println!("criterion {id:>2} {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn sweep_config() -> SweepConfig {
    SweepConfig { runs: RUNS, seed: SEED, ..SweepConfig::default() }
}

fn sweep() -> &'static SweepReport {
    static SWEEP: OnceLock<SweepReport> = OnceLock::new();
    SWEEP.get_or_init(|| run_sweep(&sweep_config()).expect("sweep runs"))
}

fn random_distribution(rng: &mut ChaCha8Rng, max_qubits: u32) -> DiscreteDistribution<f64> {
    let qubits = rng.random_range(1..=max_qubits);
    let x_l = rng.random_range(-5.0..5.0);
    let delta = rng.random_range(0.1..2.0);
    let weights = (0..1usize << qubits).map(|_| rng.random_range(0.0..1.0)).collect();
    DiscreteDistribution::from_weights(vec![make_grid(x_l, delta, qubits).unwrap()], weights).unwrap()
}

#[test]
fn c01_component_amplitudes_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let dist = random_distribution(&mut rng, 4);
        let n = rng.random_range(1..=10);
        let omega = rng.random_range(0.05..3.0);
        let p = build_state_prep(&dist).unwrap();
        let points: Vec<f64> = dist.supports()[0].points().collect();
        let direct = |g: fn(f64) -> f64| -> f64 {
            points.iter().zip(dist.probs()).map(|(&x, &q)| q * g(n as f64 * omega * x)).sum()
        };
        let s_cos = good_state_probability(&build_a(&p, &dist, 0, 0.0, n, omega).unwrap()).unwrap();
        let s_sin = good_state_probability(&build_a(&p, &dist, 0, FRAC_PI_2, n, omega).unwrap()).unwrap();
        worst = worst.max((1.0 - 2.0 * s_cos - direct(f64::cos)).abs());
        worst = worst.max((1.0 - 2.0 * s_sin - direct(f64::sin)).abs());
    }
    let pass = worst <= 1e-10;
    verdict(1, pass, &format!("max |1 - 2s - E[trig]| = {worst:.2e} over 50 cases (tol 1e-10)"));
    assert!(pass);
}

#[test]
fn c02_grover_angle_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for case in 0..24 {
        let a = match case % 3 {
            0 => {
                let dist = random_distribution(&mut rng, 4);
                let p = build_state_prep(&dist).unwrap();
                let beta = rng.random_range(0.0..TAU);
                build_a(&p, &dist, 0, beta, rng.random_range(1..=10), rng.random_range(0.05..2.0)).unwrap()
            }
            1 => {
                let d1 = random_distribution(&mut rng, 2);
                let d2 = random_distribution(&mut rng, 2);
                let joint = DiscreteDistribution::product(&[d1, d2]).unwrap();
                let p = build_state_prep(&joint).unwrap();
                let m = rng.random_range(1..=5) * if rng.random_bool(0.5) { 1 } else { -1 };
                build_a_bivariate(&p, &joint, 0, 1, rng.random_range(0.0..TAU), 2, m, 0.4, 0.7).unwrap()
            }
            _ => {
                let dist = random_distribution(&mut rng, 3);
                let p = build_state_prep(&dist).unwrap();
                build_rescaled(&p, &dist, 0, rng.random_range(0.01..0.8)).unwrap()
            }
        };
        let theta = good_state_probability(&a).unwrap().sqrt().asin();
        for m in 0..=8u64 {
            let sim = good_state_probability(&build_amplified(&a, m as usize).unwrap()).unwrap();
            let law = ((2 * m + 1) as f64 * theta).sin().powi(2);
            worst = worst.max((sim - law).abs());
        }
    }
    let pass = worst <= 1e-9;
    verdict(2, pass, &format!("max |P(Q^m A) - sin^2((2m+1) theta)| = {worst:.2e}, m <= 8 (tol 1e-9)"));
    assert!(pass);
}

fn slope_check(id: u32, method: &str, lo: f64, hi: f64) {
    let slope = sweep().slope(method).unwrap();
    let pass = (lo..=hi).contains(&slope);
    verdict(id, pass, &format!("{method} RMSE slope {slope:.3}, required [{lo}, {hi}]"));
    assert!(pass, "{method} slope {slope} outside [{lo}, {hi}]");
}

#[test]
fn c03_fourier_slope() {
    slope_check(3, "fourier", -1.15, -0.85);
}

#[test]
fn c04_rescaled_slope() {
    slope_check(4, "rescaled", -0.92, -0.60);
}

#[test]
fn c05_classical_slope() {
    slope_check(5, "classical", -0.60, -0.40);
}

/// Within half a decade of `target` in log scale.
fn same_order(value: f64, target: f64) -> bool {
    (value.log10() - target.log10()).abs() <= 0.5
}

#[test]
fn c06_crossover() {
    let c = find_crossover(&sweep().rows, "fourier", "classical").unwrap();
    let (pass, detail) = match c {
        Crossover::At { budget, degenerate, depth } => (
            !degenerate && same_order(budget, 1e3) && same_order(depth.max(1) as f64, 10.0),
            format!("fourier crosses classical at q = {budget:.0} with depth {depth} (need order 1e3 and order 10)"),
        ),
        Crossover::NoneInRange => (false, "no crossover in the budget range".to_string()),
    };
    verdict(6, pass, &detail);
    assert!(pass, "{detail}");
}

fn moment_series(power: i32, n: usize) -> (Extension, FourierSeries) {
    let name = ["identity", "square", "cube"][power as usize - 1];
    let f = FunctionSpec::builtin(name, -8.0, 7.0).unwrap();
    let ext = extend_periodic(&f, 2.0).unwrap();
    let series = fourier_coefficients(&ext, n).unwrap();
    (ext, series)
}

#[test]
fn c07_coefficient_decay() {
    let mut ok = true;
    let mut parts = Vec::new();
    for power in 1..=3 {
        let (_, series) = moment_series(power, 200);
        match verify_decay(&series) {
            Ok(k) => parts.push(format!("x^{power}: K = {k:.3e}")),
            Err(e) => {
                ok = false;
                parts.push(format!("x^{power}: {e}"));
            }
        }
    }
    let saw = FunctionSpec::identity(-8.0, 7.0).unwrap();
    let saw_series = fourier_coefficients(&PeriodicExtension::unbridged(&saw), 200).unwrap();
    let control_fails = verify_decay(&saw_series).is_err();
    parts.push(format!("unbridged sawtooth rejected: {control_fails}"));
    let pass = ok && control_fails;
    verdict(7, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn c08_truncation_tail() {
    let dist = reference_distribution();
    let points: Vec<f64> = dist.supports()[0].points().collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for power in 1..=3 {
        let (_, series) = moment_series(power, 200);
        let k2 = verify_decay(&series).unwrap();
        let mu: f64 = points.iter().zip(dist.probs()).map(|(&x, &p)| p * x.powi(power)).sum();
        for n_max in [8usize, 32, 128] {
            let partial = (1..=n_max).fold(series.dc, |acc, n| {
                let w = n as f64 * series.omega;
                let (ec, es) = points
                    .iter()
                    .zip(dist.probs())
                    .fold((0.0, 0.0), |(c, s), (&x, &p)| (c + p * (w * x).cos(), s + p * (w * x).sin()));
                acc + series.a(n) * ec + series.b(n) * es
            });
            let eta = (mu - partial).abs();
            let bound = k2 / (n_max * n_max) as f64;
            pass &= eta <= bound;
            parts.push(format!("x^{power} n={n_max}: {eta:.1e}<={bound:.1e}"));
        }
    }
    verdict(8, pass, &format!("|eta| <= k2/n_max^2: {}", parts.join(", ")));
    assert!(pass);
}

struct Joint {
    name: &'static str,
    dist: DiscreteDistribution<f64>,
}

fn joints() -> Vec<Joint> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g0 = make_grid(-1.5, 1.0, 2).unwrap();
    let g1 = make_grid(0.0, 0.5, 2).unwrap();
    let w0: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
    let w1: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
    let product = DiscreteDistribution::product(&[
        DiscreteDistribution::from_weights(vec![g0], w0).unwrap(),
        DiscreteDistribution::from_weights(vec![g1], w1).unwrap(),
    ])
    .unwrap();
    let bit = make_grid(0.0, 1.0, 1).unwrap();
    let correlated = DiscreteDistribution::new(vec![bit, bit], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let weights: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
    let general = DiscreteDistribution::from_weights(vec![make_grid(1.0, 0.5, 2).unwrap(), g0], weights).unwrap();
    vec![
        Joint { name: "product 4x4", dist: product },
        Joint { name: "correlated 2x2", dist: correlated },
        Joint { name: "general 4x4", dist: general },
    ]
}

fn product_estimator(dist: &DiscreteDistribution<f64>, cap: usize) -> ProductQmci<f64> {
    let id = |axis: usize| {
        let s = dist.supports()[axis];
        FunctionSpec::identity(s.x_l(), s.x_u()).unwrap()
    };
    ProductQmci::new(dist, 0, 1, &id(0), &id(1), 2.0, cap).unwrap()
}

fn brute_xy(dist: &DiscreteDistribution<f64>) -> f64 {
    dist.brute_force_expectation(&[0, 1], |c| c[0] * c[1]).unwrap()
}

const PRODUCT_Q0: f64 = 1e5;

/// Joint name, exact `E[XY]` and the MLE reports.
type ProductRuns = Vec<(String, f64, Vec<EstimateReport<f64>>)>;

/// MLE runs of the product estimator per joint, shared with the budget check.
fn product_runs() -> &'static ProductRuns {
    static RUNS_CACHE: OnceLock<ProductRuns> = OnceLock::new();
    RUNS_CACHE.get_or_init(|| {
        let mle = QaeMethod::from_name("mle").unwrap();
        let cap = (PRODUCT_Q0.sqrt().ceil()) as usize;
        joints()
            .into_iter()
            .map(|j| {
                let est = product_estimator(&j.dist, cap);
                let root = ShotSampler::new(SEED, 7);
                let reports = (0..RUNS)
                    .map(|r| est.run(PRODUCT_Q0, &mle, DEFAULT_DELTA, None, &root.fork(r as u64)).unwrap())
                    .collect();
                (j.name.to_string(), brute_xy(&j.dist), reports)
            })
            .collect()
    })
}

#[test]
fn c09_bivariate_oracle_equivalence() {
    let exact = QaeMethod::from_name("exact").unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for j in joints() {
        let est = product_estimator(&j.dist, 50);
        let r = est.run(PRODUCT_Q0, &exact, DEFAULT_DELTA, Some(50), &ShotSampler::new(SEED, 0)).unwrap();
        let err = (r.estimate - brute_xy(&j.dist)).abs();
        pass &= err <= 1e-3;
        parts.push(format!("{} exact err {err:.1e}", j.name));
    }
    for (name, mu, reports) in product_runs() {
        let mse = reports.iter().map(|r| (r.estimate - mu).powi(2)).sum::<f64>() / reports.len() as f64;
        let rmse = mse.sqrt();
        pass &= rmse <= 0.05;
        parts.push(format!("{name} MLE RMSE {rmse:.1e}"));
    }
    verdict(9, pass, &format!("{} (tol 1e-3 exact, 0.05 MLE)", parts.join(", ")));
    assert!(pass);
}

#[test]
fn c10_budget_honesty() {
    let report = sweep();
    let kappa = 2.0 - DEFAULT_DELTA;
    let z = zeta(kappa);
    let mut pass = true;
    let mut ratios = Vec::new();
    let mut checked = 0usize;
    for (row, runs) in report.rows.iter().zip(&report.runs) {
        for r in runs {
            checked += 1;
            pass &= r.queries_used <= r.queries_total && r.queries_total <= row.q;
            if row.method == "fourier" {
                let n_max = r.q0.sqrt().ceil();
                pass &= (r.queries_total as f64) <= 2.0 * r.q0 * z + 2.0 * n_max;
                ratios.push(r.queries_total as f64 / r.q0);
            }
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    // 2 zeta(kappa) + 2 n_max / q0 with q0 >= 1 bounds the univariate ratio
    let band = (1.0, 2.0 * z + 2.0 * 2.0);
    pass &= lo >= band.0 && hi <= band.1;

    let product_band = 4.0 * (z * z + 4.0) + 2.0 * (2.0 * z + 4.0);
    let mut product_hi = 0.0f64;
    for (_, _, reports) in product_runs() {
        for r in reports {
            checked += 1;
            pass &= r.queries_used <= r.queries_total;
            product_hi = product_hi.max(r.queries_total as f64 / PRODUCT_Q0);
        }
    }
    pass &= product_hi <= product_band;
    verdict(
        10,
        pass,
        &format!(
            "{checked} calls within allocation; fourier q_total/q0 in [{lo:.2}, {hi:.2}] (band [{:.0}, {:.2}]); product q_total/q0 <= {product_hi:.1} (band {product_band:.1})",
            band.0, band.1
        ),
    );
    assert!(pass);
}

#[test]
fn c11_determinism() {
    let first = sweep().to_csv();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let again = pool.install(|| run_sweep(&sweep_config()).unwrap()).to_csv();
    let pass = first.as_bytes() == again.as_bytes();
    verdict(11, pass, &format!("repeat sweep byte-identical ({} bytes)", first.len()));
    assert!(pass);
}
