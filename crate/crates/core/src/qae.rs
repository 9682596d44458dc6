//! Amplitude estimation with explicit query accounting.
//!
//! Every routine receives the Grover angle `theta_a` of the circuit `A` (with
//! `s = sin^2 theta_a`) and draws measurement outcomes through the analytic
//! sampler. One query is one application of `A` or `A^dagger`: a shot of
//! `Q^m A` costs `2m + 1`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::simulator::{sample_grover_shots, ShotSampler};

/// Allowed number of uses of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QaeBudget(u64);

impl QaeBudget {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("QAE budget must be at least 1".into()));
        }
        Ok(Self(q))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QaeResult {
    /// Estimate of `s`, always in `[0, 1]`.
    pub estimate: f64,
    pub queries_used: u64,
    /// Largest number of sequential Grover iterates in any circuit run.
    pub max_sequential_grover: u64,
    /// Convergence exponent of the routine that produced the estimate.
    pub lambda: f64,
}

/// Parameters of the maximum-likelihood schedule and search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleConfig {
    pub shots_per_level: u64,
    /// Bisection steps used to rank every concave interval.
    pub coarse_steps: usize,
    /// Best-ranked intervals that are refined fully.
    pub candidates: usize,
    /// Bisection steps on the likelihood derivative per candidate.
    pub refinements: usize,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self { shots_per_level: 32, coarse_steps: 6, candidates: 4, refinements: 52 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QaeMethod {
    /// Plain sampling of `A` (lambda = 1).
    Classical,
    /// Maximum likelihood over an exponential Grover schedule (lambda = 2).
    Mle(MleConfig),
    /// Returns `s` exactly without using any queries; the infinite-budget limit.
    Exact,
}

impl QaeMethod {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "classical" => Ok(Self::Classical),
            "mle" => Ok(Self::Mle(MleConfig::default())),
            "exact" => Ok(Self::Exact),
            other => Err(Error::Unknown { kind: "QAE algorithm", name: other.to_string() }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::Mle(_) => "mle",
            Self::Exact => "exact",
        }
    }

    /// Declared MSE convergence exponent.
    pub fn lambda(&self) -> f64 {
        match self {
            Self::Classical => 1.0,
            Self::Mle(_) | Self::Exact => 2.0,
        }
    }

    pub fn estimate(&self, theta_a: f64, budget: QaeBudget, sampler: &mut ShotSampler) -> QaeResult {
        match self {
            Self::Classical => qae_classical(theta_a, budget, sampler),
            Self::Mle(cfg) => qae_mle_with(theta_a, budget, cfg, sampler),
            Self::Exact => qae_exact(theta_a),
        }
    }
}

/// Grover angle of an amplitude `s`.
pub fn grover_angle(s: f64) -> f64 {
    s.clamp(0.0, 1.0).sqrt().asin()
}

pub fn qae_exact(theta_a: f64) -> QaeResult {
    let s = theta_a.sin();
    QaeResult { estimate: (s * s).clamp(0.0, 1.0), queries_used: 0, max_sequential_grover: 0, lambda: 2.0 }
}

/// Sample mean of `q` shots of `A`.
pub fn qae_classical(theta_a: f64, budget: QaeBudget, sampler: &mut ShotSampler) -> QaeResult {
    let q = budget.get();
    let hits = sample_grover_shots(theta_a, 0, q, sampler);
    QaeResult { estimate: hits as f64 / q as f64, queries_used: q, max_sequential_grover: 0, lambda: 1.0 }
}

pub fn qae_mle(theta_a: f64, budget: QaeBudget, sampler: &mut ShotSampler) -> QaeResult {
    qae_mle_with(theta_a, budget, &MleConfig::default(), sampler)
}

/// One schedule level: `shots` runs of `Q^m A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level {
    pub m: u64,
    pub shots: u64,
}

impl Level {
    pub fn cost(&self) -> u64 {
        self.shots * (2 * self.m + 1)
    }
}

/// Exponential schedule `m in {0, 1, 2, 4, ...}` with `shots` per level, grown
/// while the cumulative cost fits in `q`; leftover budget buys extra shots on
/// the deepest level. Empty when not even the first level fits.
pub fn mle_schedule(q: u64, shots: u64) -> Vec<Level> {
    let mut levels = Vec::new();
    let mut spent = 0u64;
    let mut m = 0u64;
    loop {
        let level = Level { m, shots };
        if spent + level.cost() > q {
            break;
        }
        spent += level.cost();
        levels.push(level);
        m = if m == 0 { 1 } else { 2 * m };
    }
    if let Some(last) = levels.last_mut() {
        last.shots += (q - spent) / (2 * last.m + 1);
    }
    levels
}

pub fn qae_mle_with(theta_a: f64, budget: QaeBudget, cfg: &MleConfig, sampler: &mut ShotSampler) -> QaeResult {
    let levels = mle_schedule(budget.get(), cfg.shots_per_level);
    if levels.is_empty() {
        return qae_classical(theta_a, budget, sampler);
    }
    let observed: Vec<Observation> = levels
        .iter()
        .map(|l| Observation {
            factor: (2 * l.m + 1) as f64,
            shots: l.shots as f64,
            hits: sample_grover_shots(theta_a, l.m, l.shots, sampler) as f64,
        })
        .collect();
    let theta = maximize_likelihood(&observed, cfg);
    let s = theta.sin();
    QaeResult {
        estimate: (s * s).clamp(0.0, 1.0),
        queries_used: levels.iter().map(Level::cost).sum(),
        max_sequential_grover: levels.last().map_or(0, |l| l.m),
        lambda: 2.0,
    }
}

/// Measurement record of one level: `hits` ones in `shots` runs of a circuit
/// whose angle is `factor * theta`.
#[derive(Clone, Copy, Debug)]
pub struct Observation {
    pub factor: f64,
    pub shots: f64,
    pub hits: f64,
}

/// `sum_k h_k ln sin^2(f_k theta) + (N_k - h_k) ln cos^2(f_k theta)`.
pub fn log_likelihood(obs: &[Observation], theta: f64) -> f64 {
    obs.iter()
        .map(|o| {
            let (s, c) = (o.factor * theta).sin_cos();
            let mut v = 0.0;
            if o.hits > 0.0 {
                v += 2.0 * o.hits * s.abs().ln();
            }
            if o.shots > o.hits {
                v += 2.0 * (o.shots - o.hits) * c.abs().ln();
            }
            v
        })
        .sum()
}

fn log_likelihood_slope(obs: &[Observation], theta: f64) -> f64 {
    obs.iter()
        .map(|o| {
            let (s, c) = (o.factor * theta).sin_cos();
            let mut v = 0.0;
            if o.hits > 0.0 {
                v += o.hits * c / s;
            }
            if o.shots > o.hits {
                v -= (o.shots - o.hits) * s / c;
            }
            2.0 * o.factor * v
        })
        .sum()
}

/// Maximum-likelihood Grover angle in `[0, pi/2]`.
///
/// Each level's log-likelihood is concave between the zeros of
/// `sin(f theta)` (when it has hits) and of `cos(f theta)` (when it has
/// misses), so the total is concave on every interval between consecutive
/// zeros of any level. Every such interval is ranked by a short bisection on
/// the derivative; the best few are then refined fully.
pub fn maximize_likelihood(obs: &[Observation], cfg: &MleConfig) -> f64 {
    if obs.is_empty() {
        return 0.0;
    }
    let mut cuts = vec![0.0, FRAC_PI_2];
    for o in obs {
        let period = std::f64::consts::PI / o.factor;
        let mut push_from = |start: f64| {
            let mut x = start;
            while x < FRAC_PI_2 {
                cuts.push(x);
                x += period;
            }
        };
        if o.hits > 0.0 {
            push_from(period);
        }
        if o.shots > o.hits {
            push_from(0.5 * period);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);

    let mut best = [0.0, FRAC_PI_2]
        .map(|x| (x, log_likelihood(obs, x)))
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("two endpoints");
    let mut ranked: Vec<(f64, f64, f64)> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (a, b) = bisect_slope(obs, w[0], w[1], cfg.coarse_steps);
            (w[0], w[1], log_likelihood(obs, 0.5 * (a + b)))
        })
        .collect();
    ranked.sort_by(|x, y| y.2.total_cmp(&x.2));
    for &(a, b, _) in ranked.iter().take(cfg.candidates.max(1)) {
        let (a, b) = bisect_slope(obs, a, b, cfg.refinements);
        let theta = 0.5 * (a + b);
        let v = log_likelihood(obs, theta);
        if v > best.1 {
            best = (theta, v);
        }
    }
    best.0
}

/// Narrows `[a, b]` around the zero of the (decreasing) likelihood derivative.
fn bisect_slope(obs: &[Observation], mut a: f64, mut b: f64, steps: usize) -> (f64, f64) {
    for _ in 0..steps {
        let mid = 0.5 * (a + b);
        if log_likelihood_slope(obs, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a, b)
}
