//! Discrete probability distributions on regular grids.
//!
//! Probabilities are stored as a dense row-major tensor (the last axis varies
//! fastest). Amplitudes are only derived when a state-preparation circuit is
//! built.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register per axis the statevector simulator accepts.
pub const MAX_AXIS_QUBITS: u32 = 20;
/// Largest register summed over all axes.
pub const MAX_TOTAL_QUBITS: u32 = 24;

/// `2^num_qubits` equally spaced points starting at `x_l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSupport<T> {
    x_l: T,
    delta: T,
    num_qubits: u32,
}

impl<T: Real> GridSupport<T> {
    pub fn new(x_l: T, delta: T, num_qubits: u32) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {delta}")));
        }
        if !x_l.is_finite() {
            return Err(Error::InvalidGrid(format!("first point must be finite, got {x_l}")));
        }
        if !(1..=MAX_AXIS_QUBITS).contains(&num_qubits) {
            return Err(Error::InvalidGrid(format!("num_qubits must lie in 1..={MAX_AXIS_QUBITS}, got {num_qubits}")));
        }
        Ok(Self { x_l, delta, num_qubits })
    }

    pub fn x_l(&self) -> T {
        self.x_l
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    /// Number of mass points, `2^N`.
    pub fn len(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Last point `x_l + (2^N - 1) delta`.
    pub fn x_u(&self) -> T {
        self.point(self.len() - 1)
    }

    /// Value of grid index `v`.
    pub fn point(&self, v: usize) -> T {
        self.x_l + self.delta * T::of_usize(v)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |v| self.point(v))
    }
}

/// Convenience constructor mirroring [`GridSupport::new`].
pub fn make_grid<T: Real>(x_l: T, delta: T, num_qubits: u32) -> Result<GridSupport<T>> {
    GridSupport::new(x_l, delta, num_qubits)
}

/// A (possibly multivariate) probability mass function on a product grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution<T> {
    supports: Vec<GridSupport<T>>,
    probs: Vec<T>,
}

impl<T: Real> DiscreteDistribution<T> {
    /// Validates shape, non-negativity and normalisation.
    pub fn new(supports: Vec<GridSupport<T>>, probs: Vec<T>) -> Result<Self> {
        if supports.is_empty() {
            return Err(Error::InvalidDistribution("at least one axis is required".into()));
        }
        let total_qubits: u32 = supports.iter().map(|s| s.num_qubits).sum();
        if total_qubits > MAX_TOTAL_QUBITS {
            return Err(Error::SizeCap(format!("{total_qubits} qubits across axes exceeds {MAX_TOTAL_QUBITS}")));
        }
        let expected = 1usize << total_qubits;
        if probs.len() != expected {
            return Err(Error::InvalidDistribution(format!("expected {expected} masses, got {}", probs.len())));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= T::zero()) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("mass {i} is invalid: {p}")));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::NORM_TOL {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { supports, probs })
    }

    pub fn univariate(support: GridSupport<T>, probs: Vec<T>) -> Result<Self> {
        Self::new(vec![support], probs)
    }

    /// Builds a distribution from non-negative weights, normalising them.
    pub fn from_weights(supports: Vec<GridSupport<T>>, weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidDistribution("weights must have positive total".into()));
        }
        Self::new(supports, weights.into_iter().map(|w| w / total).collect())
    }

    /// All mass on grid index `index` of a univariate support.
    pub fn point_mass(support: GridSupport<T>, index: usize) -> Result<Self> {
        if index >= support.len() {
            return Err(Error::InvalidDistribution(format!("index {index} outside grid")));
        }
        let mut probs = vec![T::zero(); support.len()];
        probs[index] = T::one();
        Self::univariate(support, probs)
    }

    /// Joint distribution of independent marginals, in axis order.
    pub fn product(factors: &[DiscreteDistribution<T>]) -> Result<Self> {
        let mut supports = Vec::new();
        let mut probs = vec![T::one()];
        for f in factors {
            supports.extend_from_slice(&f.supports);
            probs = probs.iter().flat_map(|&a| f.probs.iter().map(move |&b| a * b)).collect();
        }
        Self::new(supports, probs)
    }

    pub fn dims(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[GridSupport<T>] {
        &self.supports
    }

    pub fn support(&self, axis: usize) -> Result<&GridSupport<T>> {
        self.supports.get(axis).ok_or(Error::AxisOutOfRange { axis, dims: self.dims() })
    }

    /// Flat row-major masses.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.supports.iter().map(GridSupport::len).collect()
    }

    pub fn total_qubits(&self) -> u32 {
        self.supports.iter().map(|s| s.num_qubits).sum()
    }

    /// Mass at a multi-index (one grid index per axis).
    pub fn prob_at(&self, index: &[usize]) -> T {
        let shape = self.shape();
        let flat = index.iter().zip(&shape).fold(0usize, |acc, (&i, &n)| acc * n + i);
        self.probs[flat]
    }

    /// Decomposes a flat row-major index into per-axis grid indices.
    pub(crate) fn unflatten(shape: &[usize], mut flat: usize, out: &mut [usize]) {
        for (slot, &n) in out.iter_mut().zip(shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (k, &a) in axes.iter().enumerate() {
            if a >= self.dims() {
                return Err(Error::AxisOutOfRange { axis: a, dims: self.dims() });
            }
            if axes[..k].contains(&a) {
                return Err(Error::InvalidParameter(format!("axis {a} listed twice")));
            }
        }
        Ok(())
    }

    /// Joint marginal over `axes` (in the given order), as a flat row-major tensor.
    fn marginal_masses(&self, axes: &[usize]) -> Vec<T> {
        let shape = self.shape();
        let out_shape: Vec<usize> = axes.iter().map(|&a| shape[a]).collect();
        let mut out = vec![T::zero(); out_shape.iter().product()];
        let mut idx = vec![0usize; shape.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            if p == T::zero() {
                continue;
            }
            Self::unflatten(&shape, flat, &mut idx);
            let target = axes.iter().zip(&out_shape).fold(0usize, |acc, (&a, &n)| acc * n + idx[a]);
            out[target] = out[target] + p;
        }
        out
    }

    /// Univariate marginal along `axis`.
    pub fn marginal(&self, axis: usize) -> Result<Self> {
        self.marginal_over(&[axis])
    }

    /// Joint marginal over several distinct axes.
    pub fn marginal_over(&self, axes: &[usize]) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("no axes given".into()));
        }
        self.check_axes(axes)?;
        let supports = axes.iter().map(|&a| self.supports[a]).collect();
        let masses = self.marginal_masses(axes);
        Ok(Self { supports, probs: masses })
    }

    /// Exact `sum p(x) f(x)` over the marginal of `axes`; `f` receives the
    /// coordinates of the chosen axes in the order given.
    pub fn brute_force_expectation<F>(&self, axes: &[usize], f: F) -> Result<T>
    where
        F: Fn(&[T]) -> T,
    {
        let marginal = self.marginal_over(axes)?;
        let shape = marginal.shape();
        let mut idx = vec![0usize; shape.len()];
        let mut coords = vec![T::zero(); shape.len()];
        let mut total = T::zero();
        for (flat, &p) in marginal.probs.iter().enumerate() {
            if p == T::zero() {
                continue;
            }
            Self::unflatten(&shape, flat, &mut idx);
            for ((c, &v), s) in coords.iter_mut().zip(&idx).zip(&marginal.supports) {
                *c = s.point(v);
            }
            total = total + p * f(&coords);
        }
        Ok(total)
    }

    /// Univariate shorthand for [`Self::brute_force_expectation`].
    pub fn expectation<F: Fn(T) -> T>(&self, axis: usize, f: F) -> Result<T> {
        self.brute_force_expectation(&[axis], |c| f(c[0]))
    }

    /// Lossy conversion between scalar types; masses are renormalised.
    pub fn cast<U: Real>(&self) -> Result<DiscreteDistribution<U>> {
        let supports = self
            .supports
            .iter()
            .map(|s| GridSupport::new(U::of(s.x_l.as_f64()), U::of(s.delta.as_f64()), s.num_qubits))
            .collect::<Result<Vec<_>>>()?;
        let weights = self.probs.iter().map(|p| U::of(p.as_f64())).collect();
        DiscreteDistribution::from_weights(supports, weights)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisRecord {
    x_l: f64,
    delta: f64,
    num_qubits: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionRecord {
    probs: Vec<f64>,
    axis: Vec<AxisRecord>,
}

impl DiscreteDistribution<f64> {
    /// Parses the key-value distribution format: one `[[axis]]` table per
    /// dimension and a flat row-major `probs` list.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let record: DistributionRecord = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let supports =
            record.axis.iter().map(|a| GridSupport::new(a.x_l, a.delta, a.num_qubits)).collect::<Result<Vec<_>>>()?;
        Self::new(supports, record.probs)
    }

    pub fn to_toml_string(&self) -> String {
        let record = DistributionRecord {
            probs: self.probs.clone(),
            axis: self
                .supports
                .iter()
                .map(|s| AxisRecord { x_l: s.x_l, delta: s.delta, num_qubits: s.num_qubits })
                .collect(),
        };
        toml::to_string(&record).expect("distribution record serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// The checked-in 16-point reference distribution on `{-8, ..., 7}`.
pub fn reference_distribution() -> DiscreteDistribution<f64> {
    DiscreteDistribution::from_toml_str(REFERENCE_TOML).expect("reference distribution is valid")
}

/// Raw text of the reference distribution file.
pub const REFERENCE_TOML: &str = include_str!("../data/reference16.toml");

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(x_l: f64, delta: f64, n: u32) -> DiscreteDistribution<f64> {
        let s = make_grid(x_l, delta, n).unwrap();
        let len = s.len();
        DiscreteDistribution::univariate(s, vec![1.0 / len as f64; len]).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = make_grid(-8.0, 1.0, 4).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts, (-8..8).map(f64::from).collect::<Vec<_>>());

        let g = make_grid(0.0, 1.0, 1).unwrap();
        assert_eq!(g.points().collect::<Vec<_>>(), vec![0.0, 1.0]);

        let g = make_grid(2.5, 0.25, 2).unwrap();
        assert_eq!(g.points().collect::<Vec<_>>(), vec![2.5, 2.75, 3.0, 3.25]);
        assert_eq!(g.x_u(), 3.25);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(matches!(make_grid(0.0, 0.0, 2), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(0.0, -1.0, 2), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(0.0, 1.0, 0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(0.0, 1.0, 21), Err(Error::InvalidGrid(_))));
        assert!(make_grid(0.0, 1.0, 20).is_ok());
    }

    #[test]
    fn distribution_validation() {
        let s = make_grid(0.0, 1.0, 1).unwrap();
        assert!(DiscreteDistribution::univariate(s, vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::univariate(s, vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::univariate(s, vec![1.0]).is_err());
        let big = make_grid(0.0, 1.0, 13).unwrap();
        let err = DiscreteDistribution::new(vec![big, big], vec![]).unwrap_err();
        assert!(matches!(err, Error::SizeCap(_)));
    }

    #[test]
    fn marginal_of_two_by_two() {
        let s = make_grid(0.0f64, 1.0, 1).unwrap();
        let d = DiscreteDistribution::new(vec![s, s], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m0 = d.marginal(0).unwrap();
        assert!((m0.probs()[0] - 0.3).abs() < 1e-15);
        assert!((m0.probs()[1] - 0.7).abs() < 1e-15);
        let m1 = d.marginal(1).unwrap();
        assert!((m1.probs()[0] - 0.4).abs() < 1e-15);
        assert!((m1.probs()[1] - 0.6).abs() < 1e-15);
        assert!(matches!(d.marginal(2), Err(Error::AxisOutOfRange { axis: 2, dims: 2 })));
    }

    #[test]
    fn marginal_identity_and_product() {
        let a = uniform(0.0, 1.0, 2);
        assert_eq!(a.marginal(0).unwrap(), a);

        let p1 = DiscreteDistribution::univariate(make_grid(0.0f64, 1.0, 1).unwrap(), vec![0.25, 0.75]).unwrap();
        let p2 = DiscreteDistribution::univariate(make_grid(-1.0, 0.5, 2).unwrap(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let joint = DiscreteDistribution::product(&[p1.clone(), p2.clone()]).unwrap();
        for (x, y) in joint.marginal(0).unwrap().probs().iter().zip(p1.probs()) {
            assert!((x - y).abs() < 1e-15);
        }
        for (x, y) in joint.marginal(1).unwrap().probs().iter().zip(p2.probs()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn expectation_examples() {
        let s = make_grid(0.0, 1.0, 2).unwrap();
        let delta = DiscreteDistribution::point_mass(s, 3).unwrap();
        assert_eq!(delta.expectation(0, |x| x).unwrap(), 3.0);

        let u = uniform(0.0, 1.0, 1);
        assert_eq!(u.expectation(0, |x| x).unwrap(), 0.5);

        let s = make_grid(0.0f64, 1.0, 1).unwrap();
        let d = DiscreteDistribution::new(vec![s, s], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let v = d.brute_force_expectation(&[0, 1], |c| c[0] * c[1]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(d.brute_force_expectation(&[0, 0], |c| c[0]).is_err());
        assert!(d.brute_force_expectation(&[3], |c| c[0]).is_err());
    }

    #[test]
    fn reference_distribution_file() {
        let d = reference_distribution();
        assert_eq!(d.dims(), 1);
        assert_eq!(d.support(0).unwrap().x_l(), -8.0);
        assert_eq!(d.support(0).unwrap().x_u(), 7.0);
        let mean = d.expectation(0, |x| x).unwrap();
        assert!((mean - (-2.350437)).abs() < 1e-9);
        // median of the support is -0.5; the mean sits well away from it
        assert!((mean + 0.5).abs() > 1.0);
    }

    #[test]
    fn toml_round_trip() {
        let s = make_grid(0.0f64, 1.0, 1).unwrap();
        let d = DiscreteDistribution::new(vec![s, s], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let back = DiscreteDistribution::from_toml_str(&d.to_toml_string()).unwrap();
        assert_eq!(back, d);
        let bad = "probs = [0.5, 0.6]\n[[axis]]\nx_l = 0.0\ndelta = 1.0\nnum_qubits = 1\n";
        assert!(DiscreteDistribution::from_toml_str(bad).is_err());
        let unknown = "probs = [0.5, 0.5]\nfoo = 1\n[[axis]]\nx_l = 0.0\ndelta = 1.0\nnum_qubits = 1\n";
        assert!(DiscreteDistribution::from_toml_str(unknown).is_err());
    }

    #[test]
    fn cast_to_f32() {
        let d = reference_distribution();
        let f: DiscreteDistribution<f32> = d.cast().unwrap();
        let mean = f.expectation(0, |x| x).unwrap();
        assert!((mean as f64 + 2.350437).abs() < 1e-4);
    }
}
