//! Estimators of `E[f(X)]`: Fourier QMCI (univariate and bivariate product),
//! plus the classical Monte-Carlo and rescaled-support baselines.
//!
//! A Fourier estimate splits the periodic extension of `f` into harmonics,
//! estimates `E[cos(n omega X)]` and `E[sin(n omega X)]` for each harmonic with
//! amplitude estimation on the circuit `A(P, i, beta, n, omega)`, and
//! recombines them with the Fourier coefficients. Component amplitudes are
//! simulated once per prepared estimator; each run then only draws shots.

use std::f64::consts::FRAC_PI_2;

use crate::circuits::{build_a, build_a_bivariate, build_rescaled, build_state_prep, Circuit};
use crate::distributions::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::fourier::{fourier_coefficients, FourierSeries, FunctionSpec, PeriodicExtension};
use crate::qae::{grover_angle, QaeBudget, QaeMethod};
use crate::scalar::Real;
use crate::simulator::{good_state_probability, ShotSampler};

pub const DEFAULT_DELTA: f64 = 0.5;
pub const DEFAULT_STRETCH: f64 = 2.0;

/// Riemann zeta for `s > 1`: partial sum plus Euler-Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    const N: usize = 64;
    let head: f64 = (1..N).map(|n| (n as f64).powf(-s)).sum();
    let n = N as f64;
    head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
}

/// `ceil(x)`, treating values within rounding noise of an integer as that
/// integer.
fn ceil_clean(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Per-harmonic query allocation `q_n = ceil(q0 n^-kappa)` with
/// `kappa = 2 - delta`, truncated at `n_max = ceil(q0^(lambda/4))`.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationPlan {
    pub q0: f64,
    pub kappa: f64,
    pub delta: f64,
    pub lambda: f64,
    pub n_max: usize,
    /// `(n, q_n)` for `n = 1..=n_max`.
    pub per_component: Vec<(usize, u64)>,
    /// `2 q0 zeta(kappa) + 2 n_max`.
    pub predicted_bound: f64,
}

impl AllocationPlan {
    pub fn q_n(&self, n: usize) -> u64 {
        self.per_component[n - 1].1
    }

    /// Queries charged when harmonic `n` is estimated for each coefficient
    /// flagged non-zero.
    pub fn accounted_total<T: Real>(&self, series: &FourierSeries<T>) -> u64 {
        self.per_component
            .iter()
            .map(|&(n, q)| {
                let live = (series.a(n) != T::zero()) as u64 + (series.b(n) != T::zero()) as u64;
                live * q
            })
            .sum()
    }
}

pub fn plan_allocation(q0: f64, lambda: f64, delta: f64) -> Result<AllocationPlan> {
    plan_allocation_with(q0, lambda, delta, None)
}

/// As [`plan_allocation`], optionally overriding the truncation point.
pub fn plan_allocation_with(q0: f64, lambda: f64, delta: f64, n_max: Option<usize>) -> Result<AllocationPlan> {
    if !(q0 >= 1.0) || !q0.is_finite() {
        return Err(Error::InvalidParameter(format!("q0 must be at least 1, got {q0}")));
    }
    if !(1.0..=2.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda must lie in [1, 2], got {lambda}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let n_max = match n_max {
        Some(0) => return Err(Error::InvalidParameter("n_max must be at least 1".into())),
        Some(n) => n,
        None => ceil_clean(q0.powf(lambda / 4.0)) as usize,
    };
    let kappa = 2.0 - delta;
    let per_component = (1..=n_max).map(|n| (n, ceil_clean(q0 * (n as f64).powf(-kappa)))).collect();
    Ok(AllocationPlan {
        q0,
        kappa,
        delta,
        lambda,
        n_max,
        per_component,
        predicted_bound: 2.0 * q0 * zeta(kappa) + 2.0 * n_max as f64,
    })
}

/// Which expectation a component estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    /// `E[cos(n omega X)]`.
    Cos,
    /// `E[sin(n omega X)]`.
    Sin,
    /// `E[cos(n omega1 X + m omega2 Y)]`, `m` signed.
    CosPair,
    /// `E[sin(n omega1 X + m omega2 Y)]`, `m` signed.
    SinPair,
    /// A univariate component of the second function (axis `j`).
    CosSecond,
    SinSecond,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentEstimate<T> {
    pub kind: ComponentKind,
    pub n: usize,
    pub m: i64,
    /// Weight of the component in the recombined estimate.
    pub weight: T,
    /// `1 - 2 s_hat`, in `[-1, 1]`.
    pub value: T,
    pub queries_allocated: u64,
    pub queries_used: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport<T> {
    pub estimate: T,
    /// Brute-force value, when known to the caller.
    pub true_value: Option<T>,
    /// Queries allocated by the plan (uses of `P`).
    pub queries_total: u64,
    /// Queries actually consumed by amplitude estimation.
    pub queries_used: u64,
    /// Deepest run of sequential Grover iterates.
    pub max_depth: u64,
    pub n_max: usize,
    pub q0: f64,
    pub predicted_bound: Option<f64>,
    pub components: Vec<ComponentEstimate<T>>,
}

impl<T: Real> EstimateReport<T> {
    fn constant(value: T, q0: f64) -> Self {
        Self {
            estimate: value,
            true_value: None,
            queries_total: 0,
            queries_used: 0,
            max_depth: 0,
            n_max: 0,
            q0,
            predicted_bound: None,
            components: Vec::new(),
        }
    }

    pub fn with_true_value(mut self, mu: T) -> Self {
        self.true_value = Some(mu);
        self
    }

    pub fn error(&self) -> Option<T> {
        self.true_value.map(|mu| self.estimate - mu)
    }
}

/// One amplitude-estimation call on a component with known amplitude `s`.
struct ComponentRun {
    value: f64,
    used: u64,
    depth: u64,
}

fn run_component(s: f64, q: u64, method: &QaeMethod, sampler: &mut ShotSampler) -> Result<ComponentRun> {
    let r = method.estimate(grover_angle(s), QaeBudget::new(q)?, sampler);
    Ok(ComponentRun {
        value: 1.0 - 2.0 * r.estimate.clamp(0.0, 1.0),
        used: r.queries_used,
        depth: r.max_sequential_grover,
    })
}

/// Fourier QMCI for one axis and one function, with series and component
/// amplitudes computed up to a fixed harmonic cap.
#[derive(Clone, Debug)]
pub struct FourierQmci<T> {
    extension: PeriodicExtension<T>,
    series: FourierSeries<T>,
    /// Ancilla `|1>` probabilities of `A(P, i, 0, n, omega)` and
    /// `A(P, i, pi/2, n, omega)`, index `n - 1`; `None` for skipped harmonics.
    amp_cos: Vec<Option<f64>>,
    amp_sin: Vec<Option<f64>>,
}

/// Simulated `|1>` probabilities per harmonic; `None` where the coefficient is zero.
type Amplitudes = Vec<Option<f64>>;

fn component_amplitudes<T: Real>(
    p: &Circuit<T>,
    dist: &DiscreteDistribution<T>,
    axis: usize,
    series: &FourierSeries<T>,
) -> Result<(Amplitudes, Amplitudes)> {
    let mut cos = Vec::with_capacity(series.len());
    let mut sin = Vec::with_capacity(series.len());
    for n in 1..=series.len() {
        let amp = |beta: T, coeff: T| -> Result<Option<f64>> {
            if coeff == T::zero() {
                return Ok(None);
            }
            let a = build_a(p, dist, axis, beta, n, series.omega)?;
            Ok(Some(good_state_probability(&a)?.as_f64()))
        };
        cos.push(amp(T::zero(), series.a(n))?);
        sin.push(amp(T::FRAC_PI_2(), series.b(n))?);
    }
    Ok((cos, sin))
}

impl<T: Real> FourierQmci<T> {
    /// Prepares harmonics `1..=n_cap` of `f` restricted to the support of
    /// `axis` and extended with the given stretch.
    pub fn new(
        dist: &DiscreteDistribution<T>,
        axis: usize,
        f: &FunctionSpec<T>,
        stretch: T,
        n_cap: usize,
    ) -> Result<Self> {
        let support = *dist.support(axis)?;
        if support.len() < 2 {
            return Err(Error::InvalidParameter("Fourier QMCI needs at least two grid points".into()));
        }
        let f = f.restricted(support.x_l(), support.x_u())?;
        let extension = PeriodicExtension::extend(&f, stretch)?;
        let series = fourier_coefficients(&extension, n_cap.max(1))?;
        let p = build_state_prep(dist)?;
        let (amp_cos, amp_sin) = component_amplitudes(&p, dist, axis, &series)?;
        Ok(Self { extension, series, amp_cos, amp_sin })
    }

    pub fn extension(&self) -> &PeriodicExtension<T> {
        &self.extension
    }

    pub fn series(&self) -> &FourierSeries<T> {
        &self.series
    }

    pub fn n_cap(&self) -> usize {
        self.series.len()
    }

    /// Exact `E[cos(n omega X)]` and `E[sin(n omega X)]` from the simulated
    /// amplitudes; `None` where the coefficient is zero.
    pub fn oracle_components(&self, n: usize) -> (Option<T>, Option<T>) {
        let v = |s: Option<f64>| s.map(|s| T::of(1.0 - 2.0 * s));
        (v(self.amp_cos[n - 1]), v(self.amp_sin[n - 1]))
    }

    /// Largest integer `q0` whose accounted total does not exceed `budget`.
    pub fn q0_for_budget(&self, budget: u64, lambda: f64, delta: f64) -> Result<f64> {
        let total = |q0: u64| -> Result<Option<u64>> {
            let plan = plan_allocation(q0 as f64, lambda, delta)?;
            if plan.n_max > self.n_cap() {
                return Ok(None);
            }
            Ok(Some(plan.accounted_total(&self.series)))
        };
        let fits = |q0: u64| -> Result<bool> { Ok(matches!(total(q0)?, Some(t) if t <= budget)) };
        if budget == 0 || !fits(1)? {
            return Err(Error::InvalidParameter(format!("budget {budget} is below the smallest allocation")));
        }
        let (mut lo, mut hi) = (1u64, budget.max(1));
        if fits(hi)? {
            return Ok(hi as f64);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo as f64)
    }

    /// One estimate under `plan`; component `k` draws from `sampler.fork(k)`.
    pub fn run(&self, plan: &AllocationPlan, method: &QaeMethod, sampler: &ShotSampler) -> Result<EstimateReport<T>> {
        if plan.n_max > self.n_cap() {
            return Err(Error::InvalidParameter(format!(
                "plan needs {} harmonics but only {} were prepared",
                plan.n_max,
                self.n_cap()
            )));
        }
        let mut report = EstimateReport::constant(self.series.dc, plan.q0);
        report.n_max = plan.n_max;
        report.predicted_bound = Some(plan.predicted_bound);
        let mut acc = self.series.dc.as_f64();
        for &(n, q) in &plan.per_component {
            let parts = [
                (ComponentKind::Cos, self.series.a(n), self.amp_cos[n - 1]),
                (ComponentKind::Sin, self.series.b(n), self.amp_sin[n - 1]),
            ];
            for (k, (kind, weight, amp)) in parts.into_iter().enumerate() {
                let Some(s) = amp else { continue };
                let mut stream = sampler.fork((2 * (n - 1) + k) as u64);
                let r = run_component(s, q, method, &mut stream)?;
                acc += weight.as_f64() * r.value;
                report.queries_total += q;
                report.queries_used += r.used;
                report.max_depth = report.max_depth.max(r.depth);
                report.components.push(ComponentEstimate {
                    kind,
                    n,
                    m: 0,
                    weight,
                    value: T::of(r.value),
                    queries_allocated: q,
                    queries_used: r.used,
                });
            }
        }
        report.estimate = T::of(acc);
        Ok(report)
    }

    /// Estimate with every component amplitude taken exactly, truncated at
    /// `n_max`.
    pub fn truncated_value(&self, n_max: usize) -> T {
        (1..=n_max.min(self.n_cap())).fold(self.series.dc, |acc, n| {
            let (c, s) = self.oracle_components(n);
            acc + c.map_or(T::zero(), |c| self.series.a(n) * c) + s.map_or(T::zero(), |s| self.series.b(n) * s)
        })
    }
}

/// Estimates `E[f(X_axis)]` with Fourier QMCI using `q0` as the allocation
/// scale.
#[allow(clippy::too_many_arguments)]
pub fn fourier_qmci<T: Real>(
    dist: &DiscreteDistribution<T>,
    axis: usize,
    f: &FunctionSpec<T>,
    q0: f64,
    qae_name: &str,
    delta: f64,
    stretch: T,
    sampler: &ShotSampler,
) -> Result<EstimateReport<T>> {
    let method = QaeMethod::from_name(qae_name)?;
    let plan = plan_allocation(q0, method.lambda(), delta)?;
    FourierQmci::new(dist, axis, f, stretch, plan.n_max)?.run(&plan, &method, sampler)
}

/// Bivariate Fourier QMCI for `E[f(X_i) g(X_j)]`.
///
/// With `f = c1 + F`, `g = c2 + G` (series parts `F`, `G`):
/// `E[fg] = c1 c2 + c1 E[G] + c2 E[F] + E[F G]`, where `E[F G]` expands by
/// product-to-sum into `cos`/`sin` of `n omega1 x +- m omega2 y`.
#[derive(Clone, Debug)]
pub struct ProductQmci<T> {
    first: FourierQmci<T>,
    second: FourierQmci<T>,
    /// Amplitudes for `(n, m, sign, beta)`, see [`Self::pair_index`].
    pair_amps: Vec<Option<f64>>,
}

/// One of the four bilinear terms of a harmonic pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairTerm {
    CosDiff,
    CosSum,
    SinSum,
    SinDiff,
}

const PAIR_TERMS: [PairTerm; 4] = [PairTerm::CosDiff, PairTerm::CosSum, PairTerm::SinSum, PairTerm::SinDiff];

impl PairTerm {
    fn sign(self) -> i64 {
        match self {
            PairTerm::CosSum | PairTerm::SinSum => 1,
            PairTerm::CosDiff | PairTerm::SinDiff => -1,
        }
    }

    fn beta(self) -> f64 {
        match self {
            PairTerm::CosDiff | PairTerm::CosSum => 0.0,
            PairTerm::SinSum | PairTerm::SinDiff => FRAC_PI_2,
        }
    }

    fn kind(self) -> ComponentKind {
        match self {
            PairTerm::CosDiff | PairTerm::CosSum => ComponentKind::CosPair,
            PairTerm::SinSum | PairTerm::SinDiff => ComponentKind::SinPair,
        }
    }

    /// Weight of the term given full coefficients `a_n, b_n` of `f` and
    /// `c_m, d_m` of `g`.
    fn weight<T: Real>(self, a: T, b: T, c: T, d: T) -> T {
        let half = T::of(0.5);
        match self {
            PairTerm::CosDiff => half * (a * c + b * d),
            PairTerm::CosSum => half * (a * c - b * d),
            PairTerm::SinSum => half * (a * d + b * c),
            PairTerm::SinDiff => half * (b * c - a * d),
        }
    }
}

impl<T: Real> ProductQmci<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dist: &DiscreteDistribution<T>,
        axis_i: usize,
        axis_j: usize,
        f: &FunctionSpec<T>,
        g: &FunctionSpec<T>,
        stretch: T,
        n_cap: usize,
    ) -> Result<Self> {
        if axis_i == axis_j {
            return Err(Error::InvalidParameter("product estimator needs two distinct axes".into()));
        }
        let first = FourierQmci::new(dist, axis_i, f, stretch, n_cap)?;
        let second = FourierQmci::new(dist, axis_j, g, stretch, n_cap)?;
        let p = build_state_prep(dist)?;
        let (s1, s2) = (&first.series, &second.series);
        let n_cap = s1.len();
        let mut pair_amps = vec![None; 4 * n_cap * n_cap];
        for n in 1..=n_cap {
            for m in 1..=n_cap {
                for (t, term) in PAIR_TERMS.iter().enumerate() {
                    if term.weight(s1.a(n), s1.b(n), s2.a(m), s2.b(m)) == T::zero() {
                        continue;
                    }
                    let a = build_a_bivariate(
                        &p,
                        dist,
                        axis_i,
                        axis_j,
                        T::of(term.beta()),
                        n,
                        term.sign() * m as i64,
                        s1.omega,
                        s2.omega,
                    )?;
                    pair_amps[Self::pair_index(n_cap, n, m, t)] = Some(good_state_probability(&a)?.as_f64());
                }
            }
        }
        Ok(Self { first, second, pair_amps })
    }

    fn pair_index(n_cap: usize, n: usize, m: usize, term: usize) -> usize {
        ((n - 1) * n_cap + (m - 1)) * 4 + term
    }

    pub fn n_cap(&self) -> usize {
        self.first.n_cap()
    }

    pub fn first(&self) -> &FourierQmci<T> {
        &self.first
    }

    pub fn second(&self) -> &FourierQmci<T> {
        &self.second
    }

    /// `E[F G]` truncated at `n_max`, recombined from exact component values.
    pub fn oracle_pair_sum(&self, n_max: usize) -> T {
        let (s1, s2) = (&self.first.series, &self.second.series);
        let cap = self.n_cap();
        let mut acc = T::zero();
        for n in 1..=n_max.min(cap) {
            for m in 1..=n_max.min(cap) {
                for (t, term) in PAIR_TERMS.iter().enumerate() {
                    if let Some(s) = self.pair_amps[Self::pair_index(cap, n, m, t)] {
                        let w = term.weight(s1.a(n), s1.b(n), s2.a(m), s2.b(m));
                        acc = acc + w * T::of(1.0 - 2.0 * s);
                    }
                }
            }
        }
        acc
    }

    /// One estimate with allocation scale `q0`; pairs get
    /// `q_nm = ceil(q0 (n m)^-(2 - delta))`, the cross terms use the
    /// univariate schedule.
    pub fn run(
        &self,
        q0: f64,
        method: &QaeMethod,
        delta: f64,
        n_max: Option<usize>,
        sampler: &ShotSampler,
    ) -> Result<EstimateReport<T>> {
        let plan = plan_allocation_with(q0, method.lambda(), delta, n_max)?;
        let cap = self.n_cap();
        if plan.n_max > cap {
            return Err(Error::InvalidParameter(format!(
                "plan needs {} harmonics but only {} were prepared",
                plan.n_max, cap
            )));
        }
        let (c1, c2) = (self.first.series.dc, self.second.series.dc);
        let mut report = EstimateReport::constant(c1 * c2, q0);
        report.n_max = plan.n_max;
        let mut acc = (c1 * c2).as_f64();

        let cross = [(&self.first, c2, 0u64), (&self.second, c1, 1u64)];
        for (est, scale, tag) in cross {
            if scale == T::zero() {
                continue;
            }
            let r = est.run(&plan, method, &sampler.fork(tag))?;
            acc += scale.as_f64() * (r.estimate - est.series.dc).as_f64();
            report.queries_total += r.queries_total;
            report.queries_used += r.queries_used;
            report.max_depth = report.max_depth.max(r.max_depth);
            report.components.extend(r.components.into_iter().map(|mut c| {
                c.weight = c.weight * scale;
                if tag == 1 {
                    c.kind = match c.kind {
                        ComponentKind::Cos => ComponentKind::CosSecond,
                        _ => ComponentKind::SinSecond,
                    };
                }
                c
            }));
        }

        let pairs = sampler.fork(2);
        let (s1, s2) = (&self.first.series, &self.second.series);
        for n in 1..=plan.n_max {
            for m in 1..=plan.n_max {
                let q = ceil_clean(q0 * ((n * m) as f64).powf(-plan.kappa));
                for (t, term) in PAIR_TERMS.iter().enumerate() {
                    let Some(s) = self.pair_amps[Self::pair_index(cap, n, m, t)] else { continue };
                    let w = term.weight(s1.a(n), s1.b(n), s2.a(m), s2.b(m));
                    let mut stream = pairs.fork(Self::pair_index(cap, n, m, t) as u64);
                    let r = run_component(s, q, method, &mut stream)?;
                    acc += w.as_f64() * r.value;
                    report.queries_total += q;
                    report.queries_used += r.used;
                    report.max_depth = report.max_depth.max(r.depth);
                    report.components.push(ComponentEstimate {
                        kind: term.kind(),
                        n,
                        m: term.sign() * m as i64,
                        weight: w,
                        value: T::of(r.value),
                        queries_allocated: q,
                        queries_used: r.used,
                    });
                }
            }
        }
        report.estimate = T::of(acc);
        Ok(report)
    }
}

/// Estimates `E[f(X_i) g(X_j)]` with bivariate Fourier QMCI.
#[allow(clippy::too_many_arguments)]
pub fn fourier_qmci_product<T: Real>(
    dist: &DiscreteDistribution<T>,
    axis_i: usize,
    axis_j: usize,
    f: &FunctionSpec<T>,
    g: &FunctionSpec<T>,
    q0: f64,
    qae_name: &str,
    delta: f64,
    stretch: T,
    sampler: &ShotSampler,
) -> Result<EstimateReport<T>> {
    let method = QaeMethod::from_name(qae_name)?;
    let plan = plan_allocation(q0, method.lambda(), delta)?;
    ProductQmci::new(dist, axis_i, axis_j, f, g, stretch, plan.n_max)?.run(q0, &method, delta, None, sampler)
}

/// Sample mean of `f` over `q` draws from the marginal of `axis`.
pub fn classical_mci<T: Real>(
    dist: &DiscreteDistribution<T>,
    axis: usize,
    f: &FunctionSpec<T>,
    q: u64,
    sampler: &mut ShotSampler,
) -> Result<EstimateReport<T>> {
    if q == 0 {
        return Err(Error::InvalidParameter("classical MCI needs at least one sample".into()));
    }
    let marginal = dist.marginal(axis)?;
    let support = marginal.supports()[0];
    let counts = multinomial(marginal.probs(), q, sampler);
    let sum = counts
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(v, &k)| f.eval(support.point(v)).as_f64() * k as f64)
        .sum::<f64>();
    let mut report = EstimateReport::constant(T::of(sum / q as f64), q as f64);
    report.queries_total = q;
    report.queries_used = q;
    Ok(report)
}

/// Multinomial counts drawn as a chain of conditional binomials.
fn multinomial<T: Real>(probs: &[T], trials: u64, sampler: &mut ShotSampler) -> Vec<u64> {
    let mut left = trials;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        let k = if i + 1 == probs.len() {
            left
        } else if mass <= 0.0 {
            0
        } else {
            sampler.binomial(left, (p / mass).min(1.0))
        };
        out.push(k);
        left -= k;
        mass -= p;
    }
    out
}

/// Scale rule `c = constant * q^(-1/3)`.
pub fn default_scale(constant: f64) -> impl Fn(u64) -> f64 {
    move |q| constant * (q as f64).powf(-1.0 / 3.0)
}

/// Mean of `X_axis` from one amplitude-estimation call on a rotation bank
/// linearised around `pi/4` over a support compressed by `c = scale(q)`.
pub fn rescaled_qmci<T: Real>(
    dist: &DiscreteDistribution<T>,
    axis: usize,
    q: u64,
    qae_name: &str,
    scale: impl Fn(u64) -> f64,
    sampler: &mut ShotSampler,
) -> Result<EstimateReport<T>> {
    let method = QaeMethod::from_name(qae_name)?;
    RescaledQmci::new(dist, axis, T::of(scale(q)))?.run(q, &method, sampler)
}

/// Rescaled baseline with its circuit amplitude simulated once.
#[derive(Clone, Copy, Debug)]
pub struct RescaledQmci<T> {
    x_l: T,
    width: T,
    scale: T,
    amplitude: f64,
}

impl<T: Real> RescaledQmci<T> {
    pub fn new(dist: &DiscreteDistribution<T>, axis: usize, scale: T) -> Result<Self> {
        let support = *dist.support(axis)?;
        let width = support.x_u() - support.x_l();
        if !(width > T::zero()) {
            return Err(Error::InvalidParameter("rescaled QMCI needs a non-degenerate support".into()));
        }
        if !(scale > T::zero()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        let p = build_state_prep(dist)?;
        let amplitude = good_state_probability(&build_rescaled(&p, dist, axis, scale)?)?.as_f64();
        Ok(Self { x_l: support.x_l(), width, scale, amplitude })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Maps an amplitude estimate back to x-units.
    pub fn invert(&self, a: f64) -> T {
        let c = self.scale.as_f64();
        let unit = (a - 0.5) / c + 0.5;
        self.x_l + self.width * T::of(unit)
    }

    pub fn run(&self, q: u64, method: &QaeMethod, sampler: &mut ShotSampler) -> Result<EstimateReport<T>> {
        let r = method.estimate(grover_angle(self.amplitude), QaeBudget::new(q)?, sampler);
        let mut report = EstimateReport::constant(self.invert(r.estimate), q as f64);
        report.queries_total = q;
        report.queries_used = r.queries_used;
        report.max_depth = r.max_sequential_grover;
        Ok(report)
    }
}
