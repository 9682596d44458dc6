//! Smooth periodic extension of a function and its Fourier coefficients.
//!
//! A function `f` given on `[x_l, x_u]` is continued by a cubic bridge on
//! `[x_u, x_~u)` that matches value and slope at both ends (wrapping to
//! `x_l`), and then repeated with period `T = x_~u - x_l`. The result is C1
//! with bounded piecewise second and third derivatives, so its Fourier
//! coefficients decay like `1/n^3`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Polynomial `sum_k coeffs[k] (x - origin)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    origin: T,
    coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(origin: T, coeffs: Vec<T>) -> Self {
        Self { origin, coeffs }
    }

    /// Polynomial with coefficients in powers of `x` itself.
    pub fn monomial(coeffs: Vec<T>) -> Self {
        Self::new(T::zero(), coeffs)
    }

    pub fn origin(&self) -> T {
        self.origin
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: T) -> T {
        let t = x - self.origin;
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * T::of_usize(k)).collect();
        Self::new(self.origin, coeffs)
    }

    /// Same polynomial re-expanded around `origin` (Taylor shift).
    pub fn shifted(&self, origin: T) -> Self {
        let shift = origin - self.origin;
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = c[j] + shift * c[j + 1];
            }
        }
        Self::new(origin, c)
    }

    /// `int_u^v p(x) dx`.
    pub fn integral(&self, u: T, v: T) -> T {
        let anti = |x: T| {
            let t = x - self.origin;
            self.coeffs.iter().enumerate().rev().fold(T::zero(), |acc, (k, &c)| acc * t + c / T::of_usize(k + 1)) * t
        };
        anti(v) - anti(u)
    }
}

/// A polynomial piece on `[start, end)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment<T> {
    pub start: T,
    pub end: T,
    pub poly: Polynomial<T>,
}

impl<T: Real> Segment<T> {
    pub fn derivative(&self) -> Self {
        Self { start: self.start, end: self.end, poly: self.poly.derivative() }
    }
}

type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Repr<T> {
    Piecewise(Vec<Segment<T>>),
    BlackBox { lo: T, hi: T, value: RealFn<T>, slope: RealFn<T> },
}

/// The integrand `f` on a closed interval: contiguous polynomial pieces, or an
/// opaque evaluator paired with its derivative.
#[derive(Clone)]
pub struct FunctionSpec<T> {
    repr: Repr<T>,
}

impl<T: fmt::Debug> fmt::Debug for FunctionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Piecewise(s) => f.debug_tuple("Piecewise").field(s).finish(),
            Repr::BlackBox { lo, hi, .. } => write!(f, "BlackBox[{lo:?}, {hi:?}]"),
        }
    }
}

fn close<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::SMOOTH_TOL * T::one().max(a.abs()).max(b.abs())
}

impl<T: Real> FunctionSpec<T> {
    /// One polynomial (coefficients in powers of `x`) on `[lo, hi]`.
    pub fn polynomial(coeffs: Vec<T>, lo: T, hi: T) -> Result<Self> {
        Self::piecewise(vec![Segment { start: lo, end: hi, poly: Polynomial::monomial(coeffs) }])
    }

    pub fn identity(lo: T, hi: T) -> Result<Self> {
        Self::polynomial(vec![T::zero(), T::one()], lo, hi)
    }

    pub fn constant(k: T, lo: T, hi: T) -> Result<Self> {
        Self::polynomial(vec![k], lo, hi)
    }

    /// Named moments: `identity`, `square`, `cube`.
    pub fn builtin(name: &str, lo: T, hi: T) -> Result<Self> {
        let (z, o) = (T::zero(), T::one());
        let coeffs = match name {
            "identity" => vec![z, o],
            "square" => vec![z, z, o],
            "cube" => vec![z, z, z, o],
            other => return Err(Error::Unknown { kind: "function", name: other.to_string() }),
        };
        Self::polynomial(coeffs, lo, hi)
    }

    /// Contiguous pieces, checked for C1 continuity at every join.
    pub fn piecewise(segments: Vec<Segment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("function needs at least one piece".into()));
        }
        for s in &segments {
            if !(s.end > s.start) {
                return Err(Error::InvalidParameter(format!("empty piece [{}, {}]", s.start, s.end)));
            }
            if s.poly.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("non-finite polynomial coefficient".into()));
            }
        }
        for w in segments.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if !close(a.end, b.start) {
                return Err(Error::InvalidParameter(format!("gap between pieces at {}", a.end)));
            }
            let x = b.start;
            if !close(a.poly.eval(x), b.poly.eval(x)) {
                return Err(Error::NotSmooth(format!("value jumps at x = {x}")));
            }
            if !close(a.poly.derivative().eval(x), b.poly.derivative().eval(x)) {
                return Err(Error::NotSmooth(format!("slope jumps at x = {x}")));
            }
        }
        Ok(Self { repr: Repr::Piecewise(segments) })
    }

    /// Opaque `f` and `f'` on `[lo, hi]`; coefficients are then computed by
    /// quadrature. Smoothness is the caller's contract.
    pub fn black_box<F, D>(lo: T, hi: T, value: F, slope: D) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        if !(hi > lo) {
            return Err(Error::InvalidParameter("empty domain".into()));
        }
        Ok(Self { repr: Repr::BlackBox { lo, hi, value: Arc::new(value), slope: Arc::new(slope) } })
    }

    pub fn domain(&self) -> (T, T) {
        match &self.repr {
            Repr::Piecewise(s) => (s[0].start, s[s.len() - 1].end),
            Repr::BlackBox { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn segments(&self) -> Option<&[Segment<T>]> {
        match &self.repr {
            Repr::Piecewise(s) => Some(s),
            Repr::BlackBox { .. } => None,
        }
    }

    fn segment_at(segments: &[Segment<T>], x: T) -> &Segment<T> {
        segments.iter().find(|s| x < s.end).unwrap_or(&segments[segments.len() - 1])
    }

    pub fn eval(&self, x: T) -> T {
        match &self.repr {
            Repr::Piecewise(s) => Self::segment_at(s, x).poly.eval(x),
            Repr::BlackBox { value, .. } => value(x),
        }
    }

    pub fn slope(&self, x: T) -> T {
        match &self.repr {
            Repr::Piecewise(s) => Self::segment_at(s, x).poly.derivative().eval(x),
            Repr::BlackBox { slope, .. } => slope(x),
        }
    }

    /// Restriction to `[lo, hi]`, which must lie inside the domain.
    pub fn restricted(&self, lo: T, hi: T) -> Result<Self> {
        let (a, b) = self.domain();
        let slack = T::SMOOTH_TOL * T::one().max(a.abs()).max(b.abs());
        if lo < a - slack || hi > b + slack || !(hi > lo) {
            return Err(Error::InvalidParameter(format!("[{lo}, {hi}] is not inside the function domain [{a}, {b}]")));
        }
        Ok(match &self.repr {
            Repr::Piecewise(segs) => {
                let kept = segs
                    .iter()
                    .filter(|s| s.end > lo && s.start < hi)
                    .map(|s| Segment { start: s.start.max(lo), end: s.end.min(hi), poly: s.poly.clone() })
                    .collect();
                Self { repr: Repr::Piecewise(kept) }
            }
            Repr::BlackBox { value, slope, .. } => {
                Self { repr: Repr::BlackBox { lo, hi, value: value.clone(), slope: slope.clone() } }
            }
        })
    }
}

/// Function description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionDef {
    Named(String),
    Pieces { pieces: Vec<PieceDef> },
}

/// One polynomial piece; `coeffs` are in powers of `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDef {
    pub start: f64,
    pub end: f64,
    pub coeffs: Vec<f64>,
}

impl FunctionDef {
    /// Resolves the description on the support `[lo, hi]`.
    pub fn resolve<T: Real>(&self, lo: T, hi: T) -> Result<FunctionSpec<T>> {
        match self {
            FunctionDef::Named(name) => FunctionSpec::builtin(name, lo, hi),
            FunctionDef::Pieces { pieces } => {
                let segments = pieces
                    .iter()
                    .map(|p| Segment {
                        start: T::of(p.start),
                        end: T::of(p.end),
                        poly: Polynomial::monomial(p.coeffs.iter().map(|&c| T::of(c)).collect()),
                    })
                    .collect();
                FunctionSpec::piecewise(segments)?.restricted(lo, hi)
            }
        }
    }
}

impl fmt::Display for FunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionDef::Named(n) => f.write_str(n),
            FunctionDef::Pieces { pieces } => write!(f, "piecewise({} pieces)", pieces.len()),
        }
    }
}

/// `f` on `[x_l, x_u)`, an optional cubic bridge on `[x_u, x_l + T)`, repeated
/// with period `T`.
#[derive(Clone, Debug)]
pub struct PeriodicExtension<T> {
    base: FunctionSpec<T>,
    bridge: Option<Segment<T>>,
    x_l: T,
    x_u: T,
    period: T,
}

/// The unique cubic on `[u, v]` with the given end values and slopes.
pub fn hermite_bridge<T: Real>(u: T, v: T, y0: T, m0: T, y1: T, m1: T) -> Polynomial<T> {
    let h = v - u;
    let (two, three) = (T::of(2.0), T::of(3.0));
    let secant = (y1 - y0) / h;
    let c2 = (three * secant - two * m0 - m1) / h;
    let c3 = (m0 + m1 - two * secant) / (h * h);
    Polynomial::new(u, vec![y0, m0, c2, c3])
}

impl<T: Real> PeriodicExtension<T> {
    /// Bridged extension with `x_~u = x_l + stretch (x_u - x_l)`.
    pub fn extend(f: &FunctionSpec<T>, stretch: T) -> Result<Self> {
        if !(stretch > T::one()) || !stretch.is_finite() {
            return Err(Error::InvalidParameter(format!("stretch must exceed 1, got {stretch}")));
        }
        let (x_l, x_u) = f.domain();
        let x_end = x_l + stretch * (x_u - x_l);
        let poly = hermite_bridge(x_u, x_end, f.eval(x_u), f.slope(x_u), f.eval(x_l), f.slope(x_l));
        Ok(Self {
            base: f.clone(),
            bridge: Some(Segment { start: x_u, end: x_end, poly }),
            x_l,
            x_u,
            period: x_end - x_l,
        })
    }

    /// `f` already covers one full period `[lo, hi)` and joins up smoothly.
    pub fn from_periodic(f: &FunctionSpec<T>) -> Result<Self> {
        let (lo, hi) = f.domain();
        if !close(f.eval(lo), f.eval(hi)) || !close(f.slope(lo), f.slope(hi)) {
            return Err(Error::NotSmooth("function does not wrap smoothly over its domain".into()));
        }
        Ok(Self::unbridged(f))
    }

    /// `f` repeated with period `x_u - x_l` and no smoothing; generally
    /// discontinuous at the wrap.
    pub fn unbridged(f: &FunctionSpec<T>) -> Self {
        let (x_l, x_u) = f.domain();
        Self { base: f.clone(), bridge: None, x_l, x_u, period: x_u - x_l }
    }

    pub fn base(&self) -> &FunctionSpec<T> {
        &self.base
    }

    pub fn bridge(&self) -> Option<&Segment<T>> {
        self.bridge.as_ref()
    }

    pub fn x_l(&self) -> T {
        self.x_l
    }

    pub fn x_u(&self) -> T {
        self.x_u
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn omega(&self) -> T {
        T::TAU() / self.period
    }

    fn reduce(&self, x: T) -> T {
        let r = (x - self.x_l) % self.period;
        let r = if r < T::zero() { r + self.period } else { r };
        self.x_l + r
    }

    pub fn eval(&self, x: T) -> T {
        let y = self.reduce(x);
        match &self.bridge {
            Some(b) if y >= self.x_u => b.poly.eval(y),
            _ => self.base.eval(y),
        }
    }

    pub fn slope(&self, x: T) -> T {
        let y = self.reduce(x);
        match &self.bridge {
            Some(b) if y >= self.x_u => b.poly.derivative().eval(y),
            _ => self.base.slope(y),
        }
    }

    /// Value and slope mismatches `[value at x_u, slope at x_u, value at wrap,
    /// slope at wrap]`.
    pub fn continuity_residuals(&self) -> [T; 4] {
        let end = self.x_l + self.period;
        match &self.bridge {
            Some(b) => {
                let d = b.poly.derivative();
                [
                    (b.poly.eval(self.x_u) - self.base.eval(self.x_u)).abs(),
                    (d.eval(self.x_u) - self.base.slope(self.x_u)).abs(),
                    (b.poly.eval(end) - self.base.eval(self.x_l)).abs(),
                    (d.eval(end) - self.base.slope(self.x_l)).abs(),
                ]
            }
            None => {
                let z = T::zero();
                [
                    z,
                    z,
                    (self.base.eval(self.x_u) - self.base.eval(self.x_l)).abs(),
                    (self.base.slope(self.x_u) - self.base.slope(self.x_l)).abs(),
                ]
            }
        }
    }

    /// Polynomial pieces covering one period, when `f` is piecewise polynomial.
    pub fn segments(&self) -> Option<Vec<Segment<T>>> {
        let mut out = self.base.segments()?.to_vec();
        out.extend(self.bridge.iter().cloned());
        Some(out)
    }
}

/// Free-function form of [`PeriodicExtension::extend`].
pub fn extend_periodic<T: Real>(f: &FunctionSpec<T>, stretch: T) -> Result<PeriodicExtension<T>> {
    PeriodicExtension::extend(f, stretch)
}

/// How the coefficients were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    /// At least one piece was integrated numerically.
    Numeric,
}

/// `c + sum_n a_n cos(n omega x) + b_n sin(n omega x)`, truncated at the
/// number of stored coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries<T> {
    pub dc: T,
    /// `cos_coeffs[n - 1] = a_n`.
    pub cos_coeffs: Vec<T>,
    /// `sin_coeffs[n - 1] = b_n`.
    pub sin_coeffs: Vec<T>,
    pub omega: T,
    pub period: T,
    pub provenance: Provenance,
}

impl<T: Real> FourierSeries<T> {
    pub fn len(&self) -> usize {
        self.cos_coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cos_coeffs.is_empty()
    }

    pub fn a(&self, n: usize) -> T {
        self.cos_coeffs[n - 1]
    }

    pub fn b(&self, n: usize) -> T {
        self.sin_coeffs[n - 1]
    }

    /// Partial sum through harmonic `n_max`.
    pub fn partial_sum(&self, x: T, n_max: usize) -> T {
        (1..=n_max.min(self.len())).fold(self.dc, |acc, n| {
            let (s, c) = (T::of_usize(n) * self.omega * x).sin_cos();
            acc + self.a(n) * c + self.b(n) * s
        })
    }
}

/// `int_u^v p(x) e^{i kappa x} dx` for a polynomial piece, by repeated
/// integration by parts.
fn oscillatory_integral<T: Real>(seg: &Segment<T>, kappa: T) -> Complex<T> {
    let poly = seg.poly.shifted(seg.start);
    let len = seg.end - seg.start;
    let ik = Complex::new(T::zero(), kappa);
    // [e^{i k t} sum_j (-1)^j p^{(j)}(t) / (i k)^{j+1}] from 0 to len
    let boundary = |t: T| {
        let mut sum = Complex::new(T::zero(), T::zero());
        let mut deriv = poly.clone();
        let mut denom = ik;
        let mut sign = T::one();
        loop {
            sum = sum + Complex::new(sign * deriv.eval(seg.start + t), T::zero()) / denom;
            if deriv.coeffs.len() <= 1 {
                break;
            }
            deriv = deriv.derivative();
            denom = denom * ik;
            sign = -sign;
        }
        let (s, c) = (kappa * t).sin_cos();
        Complex::new(c, s) * sum
    };
    let local = boundary(len) - boundary(T::zero());
    let (s, c) = (kappa * seg.start).sin_cos();
    Complex::new(c, s) * local
}

fn zero_small<T: Real>(x: T) -> T {
    if x.abs() < T::COEFF_ZERO {
        T::zero()
    } else {
        x
    }
}

/// Closed-form coefficients of a periodic piecewise polynomial whose pieces
/// tile `[x_l, x_l + period)`. Pieces may be discontinuous.
pub fn segment_series<T: Real>(segments: &[Segment<T>], period: T, n_max: usize) -> FourierSeries<T> {
    let omega = T::TAU() / period;
    let scale = T::of(2.0) / period;
    let dc = segments.iter().map(|s| s.poly.integral(s.start, s.end)).sum::<T>() / period;
    let mut cos_coeffs = Vec::with_capacity(n_max);
    let mut sin_coeffs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let kappa = T::of_usize(n) * omega;
        let total =
            segments.iter().fold(Complex::new(T::zero(), T::zero()), |acc, s| acc + oscillatory_integral(s, kappa));
        cos_coeffs.push(zero_small(total.re * scale));
        sin_coeffs.push(zero_small(total.im * scale));
    }
    FourierSeries { dc: zero_small(dc), cos_coeffs, sin_coeffs, omega, period, provenance: Provenance::ClosedForm }
}

/// Fourier coefficients of the extension up to harmonic `n_max`: closed form
/// for polynomial pieces, adaptive quadrature (absolute tolerance `1e-12`)
/// for an opaque base function.
pub fn fourier_coefficients<T: Real>(ext: &PeriodicExtension<T>, n_max: usize) -> Result<FourierSeries<T>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if let Some(segments) = ext.segments() {
        return Ok(segment_series(&segments, ext.period, n_max));
    }
    let period = ext.period;
    let omega = ext.omega();
    let scale = T::of(2.0) / period;
    let tol = T::of(1e-12).max(T::epsilon() * T::of(64.0));
    let bridge = ext.bridge.as_slice();
    let bridged = if bridge.is_empty() { None } else { Some(segment_series(bridge, period, n_max)) };
    let (lo, hi) = (ext.x_l, ext.x_u);
    let base = &ext.base;
    let mut dc = integrate(|x| base.eval(x), lo, hi, tol)? / period;
    let mut cos_coeffs = Vec::with_capacity(n_max);
    let mut sin_coeffs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let kappa = T::of_usize(n) * omega;
        let a = integrate(|x| base.eval(x) * (kappa * x).cos(), lo, hi, tol)? * scale;
        let b = integrate(|x| base.eval(x) * (kappa * x).sin(), lo, hi, tol)? * scale;
        cos_coeffs.push(a);
        sin_coeffs.push(b);
    }
    if let Some(s) = bridged {
        dc = dc + s.dc;
        for (a, x) in cos_coeffs.iter_mut().zip(&s.cos_coeffs) {
            *a = *a + *x;
        }
        for (b, x) in sin_coeffs.iter_mut().zip(&s.sin_coeffs) {
            *b = *b + *x;
        }
    }
    Ok(FourierSeries {
        dc: zero_small(dc),
        cos_coeffs: cos_coeffs.into_iter().map(zero_small).collect(),
        sin_coeffs: sin_coeffs.into_iter().map(zero_small).collect(),
        omega,
        period,
        provenance: Provenance::Numeric,
    })
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) / T::of(2.0);
    let mid = (a + b) / T::of(2.0);
    let fc = f(mid);
    let mut kronrod = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * T::of(x);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + pair * T::of(w);
        if i % 2 == 1 {
            gauss = gauss + pair * T::of(WG[i / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    fn recurse<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T, depth: u32) -> Result<T> {
        let (value, err) = gk15(f, a, b);
        if err <= tol || (b - a).abs() <= T::epsilon() * T::of(64.0) * a.abs().max(b.abs()) {
            return Ok(value);
        }
        if depth == 0 {
            return Err(Error::Quadrature { lo: a.as_f64(), hi: b.as_f64(), err: err.as_f64() });
        }
        let mid = (a + b) / T::of(2.0);
        let half_tol = tol / T::of(2.0);
        Ok(recurse(f, a, mid, half_tol, depth - 1)? + recurse(f, mid, b, half_tol, depth - 1)?)
    }
    recurse(&f, a, b, tol, 40)
}

/// Checks the `1/n^3` decay law: returns `K = max_n n^3 max(|a_n|, |b_n|)`,
/// and fails when the largest scaled coefficient in the upper half of the
/// computed range exceeds twice the largest in the lower half.
pub fn verify_decay<T: Real>(series: &FourierSeries<T>) -> Result<T> {
    let len = series.len();
    if len < 10 {
        return Err(Error::InvalidParameter(format!("need at least 10 coefficients, got {len}")));
    }
    let scaled: Vec<T> = (1..=len)
        .map(|n| {
            let n3 = T::of_usize(n).powi(3);
            n3 * series.a(n).abs().max(series.b(n).abs())
        })
        .collect();
    let split = len / 2;
    let head = scaled[..split].iter().copied().fold(T::zero(), T::max);
    let (tail_i, tail) =
        scaled[split..]
            .iter()
            .copied()
            .enumerate()
            .fold((0, T::zero()), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    if tail > T::of(2.0) * head {
        let ratio = if head > T::zero() { (tail / head).as_f64() } else { f64::INFINITY };
        return Err(Error::DecayViolation { worst_n: split + tail_i + 1, ratio });
    }
    Ok(head.max(tail))
}
