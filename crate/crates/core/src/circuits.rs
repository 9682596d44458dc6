//! Circuit descriptions: state preparation, rotation banks and the Grover
//! iterate.
//!
//! Qubit layout: the register of axis `j` occupies qubits
//! `offset_j .. offset_j + N_j` with `offset_j = N_0 + ... + N_{j-1}`, bit `k`
//! of a register carrying weight `2^k`. Rotation-bank circuits append one
//! ancilla as the highest qubit.
//!
//! `RY(phi)|0> = cos(phi/2)|0> + sin(phi/2)|1>`.

use std::fmt;
use std::sync::Arc;

use crate::distributions::{DiscreteDistribution, MAX_TOTAL_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Widest circuit the simulator will run: the distribution cap plus one ancilla.
pub const MAX_WIDTH: usize = MAX_TOTAL_QUBITS as usize + 1;

#[derive(Clone, Debug)]
pub enum Gate<T> {
    Ry {
        target: usize,
        angle: T,
    },
    ControlledRy {
        control: usize,
        target: usize,
        angle: T,
    },
    /// Real unitary on `num_qubits` qubits starting at `first` mapping
    /// `|0...0>` to `sum_r amplitudes[r] |r>`.
    StatePrep {
        first: usize,
        num_qubits: usize,
        amplitudes: Arc<[T]>,
    },
    /// `2|0><0| - I` on the given qubit range.
    ReflectZero {
        first: usize,
        num_qubits: usize,
    },
    /// Phase flip on `|1>` of one qubit.
    FlipMarked {
        qubit: usize,
    },
    Inverse(Arc<Circuit<T>>),
}

impl<T: Real> Gate<T> {
    fn max_qubit(&self) -> usize {
        match self {
            Gate::Ry { target, .. } => *target,
            Gate::ControlledRy { control, target, .. } => (*control).max(*target),
            Gate::StatePrep { first, num_qubits, .. } | Gate::ReflectZero { first, num_qubits } => {
                first + num_qubits.saturating_sub(1)
            }
            Gate::FlipMarked { qubit } => *qubit,
            Gate::Inverse(c) => c.width.saturating_sub(1),
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        if self.max_qubit() >= width {
            return Err(Error::InvalidCircuit(format!(
                "gate touches qubit {} of a {width}-qubit circuit",
                self.max_qubit()
            )));
        }
        match self {
            Gate::Ry { angle, .. } if !angle.is_finite() => {
                Err(Error::InvalidCircuit(format!("non-finite angle {angle}")))
            }
            Gate::ControlledRy { control, target, angle } => {
                if control == target {
                    Err(Error::InvalidCircuit("control equals target".into()))
                } else if !angle.is_finite() {
                    Err(Error::InvalidCircuit(format!("non-finite angle {angle}")))
                } else {
                    Ok(())
                }
            }
            Gate::StatePrep { num_qubits, amplitudes, .. } => {
                if amplitudes.len() != 1usize << num_qubits {
                    return Err(Error::InvalidCircuit("amplitude vector length mismatch".into()));
                }
                let norm: T = amplitudes.iter().map(|a| *a * *a).sum();
                if (norm - T::one()).abs() > T::NORM_TOL * T::of(16.0) {
                    return Err(Error::InvalidCircuit(format!("state-prep norm {norm}")));
                }
                Ok(())
            }
            Gate::Inverse(c) if c.width > width => Err(Error::InvalidCircuit("sub-circuit wider than parent".into())),
            _ => Ok(()),
        }
    }
}

/// An ordered gate list on `width` qubits, optionally designating the ancilla
/// whose `|1>` population carries the estimated amplitude.
#[derive(Clone, Debug)]
pub struct Circuit<T> {
    width: usize,
    gates: Vec<Gate<T>>,
    ancilla: Option<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::SizeCap(format!("circuit width {width} outside 1..={MAX_WIDTH}")));
        }
        Ok(Self { width, gates: Vec::new(), ancilla: None })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.ancilla
    }

    pub fn with_ancilla(mut self, qubit: usize) -> Result<Self> {
        if qubit >= self.width {
            return Err(Error::InvalidCircuit(format!("ancilla {qubit} outside circuit")));
        }
        self.ancilla = Some(qubit);
        Ok(self)
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other` (which must not be wider).
    pub fn append(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.width > self.width {
            return Err(Error::InvalidCircuit("appended circuit is wider".into()));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// The adjoint circuit, as a single `Inverse` block.
    pub fn inverse(&self) -> Self {
        Self { width: self.width, gates: vec![Gate::Inverse(Arc::new(self.clone()))], ancilla: self.ancilla }
    }
}

impl<T: Real> fmt::Display for Circuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circuit width={}", self.width)?;
        if let Some(a) = self.ancilla {
            write!(f, " ancilla={a}")?;
        }
        writeln!(f)?;
        dump_gates(f, &self.gates, 1)
    }
}

fn dump_gates<T: Real>(f: &mut fmt::Formatter<'_>, gates: &[Gate<T>], depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    for g in gates {
        match g {
            Gate::Ry { target, angle } => writeln!(f, "{pad}ry q{target} {:.11e}", angle.as_f64())?,
            Gate::ControlledRy { control, target, angle } => {
                writeln!(f, "{pad}cry q{control} -> q{target} {:.11e}", angle.as_f64())?
            }
            Gate::StatePrep { first, num_qubits, amplitudes } => {
                write!(f, "{pad}prep q{first}..q{}", first + num_qubits - 1)?;
                for a in amplitudes.iter() {
                    write!(f, " {:.11e}", a.as_f64())?;
                }
                writeln!(f)?
            }
            Gate::ReflectZero { first, num_qubits } => {
                writeln!(f, "{pad}reflect0 q{first}..q{}", first + num_qubits - 1)?
            }
            Gate::FlipMarked { qubit } => writeln!(f, "{pad}flip q{qubit}")?,
            Gate::Inverse(c) => {
                writeln!(f, "{pad}inverse {{")?;
                dump_gates(f, &c.gates, depth + 1)?;
                writeln!(f, "{pad}}}")?
            }
        }
    }
    Ok(())
}

/// Qubit offset of each axis register.
pub fn register_offsets<T: Real>(dist: &DiscreteDistribution<T>) -> Vec<usize> {
    dist.supports()
        .iter()
        .scan(0usize, |acc, s| {
            let start = *acc;
            *acc += s.num_qubits() as usize;
            Some(start)
        })
        .collect()
}

/// Amplitudes `sqrt(p)` ordered by register basis index.
pub fn encoded_amplitudes<T: Real>(dist: &DiscreteDistribution<T>) -> Vec<T> {
    let shape = dist.shape();
    let offsets = register_offsets(dist);
    let mut amps = vec![T::zero(); dist.probs().len()];
    let mut idx = vec![0usize; shape.len()];
    for (flat, &p) in dist.probs().iter().enumerate() {
        DiscreteDistribution::<T>::unflatten(&shape, flat, &mut idx);
        let reg: usize = idx.iter().zip(&offsets).map(|(&v, &o)| v << o).sum();
        amps[reg] = p.sqrt();
    }
    amps
}

/// State preparation `P` with `P|0...0> = sum sqrt(p(x)) |x>`.
pub fn build_state_prep<T: Real>(dist: &DiscreteDistribution<T>) -> Result<Circuit<T>> {
    let width = dist.total_qubits() as usize;
    let mut c = Circuit::new(width)?;
    c.push(Gate::StatePrep { first: 0, num_qubits: width, amplitudes: encoded_amplitudes(dist).into() })?;
    Ok(c)
}

/// One ancilla rotation term: the register of `axis` controls rotations of
/// `unit_angle * 2^k` per bit `k`.
#[derive(Clone, Copy, Debug)]
pub struct BankTerm<T> {
    pub axis: usize,
    pub unit_angle: T,
}

/// `P` followed by a fresh ancilla rotated by `offset + sum_j unit_j * v_j`,
/// where `v_j` is the grid index of axis `j`.
pub fn build_rotation_bank<T: Real>(
    p: &Circuit<T>,
    dist: &DiscreteDistribution<T>,
    offset: T,
    terms: &[BankTerm<T>],
) -> Result<Circuit<T>> {
    if p.width() != dist.total_qubits() as usize {
        return Err(Error::InvalidCircuit("state preparation does not match distribution".into()));
    }
    let offsets = register_offsets(dist);
    let ancilla = p.width();
    let mut c = Circuit::new(p.width() + 1)?;
    c.append(p)?;
    c.push(Gate::Ry { target: ancilla, angle: offset })?;
    for term in terms {
        let support = dist.support(term.axis)?;
        let mut angle = term.unit_angle;
        for k in 0..support.num_qubits() as usize {
            c.push(Gate::ControlledRy { control: offsets[term.axis] + k, target: ancilla, angle })?;
            angle = angle + angle;
        }
    }
    c.with_ancilla(ancilla)
}

/// The circuit `A(P, i, beta, n, omega)`: ancilla rotated by `n omega x - beta`
/// for grid value `x` of axis `i`, so its `|1>` probability given `x` is
/// `sin^2(n omega x / 2 - beta / 2)`.
pub fn build_a<T: Real>(
    p: &Circuit<T>,
    dist: &DiscreteDistribution<T>,
    axis: usize,
    beta: T,
    n: usize,
    omega: T,
) -> Result<Circuit<T>> {
    let support = *dist.support(axis)?;
    if n == 0 {
        return Err(Error::InvalidParameter("harmonic n must be at least 1".into()));
    }
    if !(omega > T::zero()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let freq = T::of_usize(n) * omega;
    let alpha = freq * support.x_l() - beta;
    let theta = freq * support.delta();
    build_rotation_bank(p, dist, alpha, &[BankTerm { axis, unit_angle: theta }])
}

/// The bivariate circuit `A'(P, i, j, beta, n, m, omega1, omega2)`: ancilla
/// rotated by `n omega1 x + m omega2 y - beta`. Negative `m` yields the
/// difference-frequency terms.
#[allow(clippy::too_many_arguments)]
pub fn build_a_bivariate<T: Real>(
    p: &Circuit<T>,
    dist: &DiscreteDistribution<T>,
    axis_i: usize,
    axis_j: usize,
    beta: T,
    n: usize,
    m: i64,
    omega1: T,
    omega2: T,
) -> Result<Circuit<T>> {
    let si = *dist.support(axis_i)?;
    let sj = *dist.support(axis_j)?;
    if axis_i == axis_j {
        return Err(Error::InvalidParameter("bivariate circuit needs two distinct axes".into()));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("harmonics n and m must be non-zero".into()));
    }
    if !(omega1 > T::zero()) || !(omega2 > T::zero()) {
        return Err(Error::InvalidParameter("frequencies must be positive".into()));
    }
    let f1 = T::of_usize(n) * omega1;
    let f2 = T::of(m as f64) * omega2;
    let alpha = f1 * si.x_l() + f2 * sj.x_l() - beta;
    build_rotation_bank(
        p,
        dist,
        alpha,
        &[
            BankTerm { axis: axis_i, unit_angle: f1 * si.delta() },
            BankTerm { axis: axis_j, unit_angle: f2 * sj.delta() },
        ],
    )
}

/// Rotation bank for the rescaled-support baseline: the `|1>` probability
/// given `x` is `sin^2(c (x~ - 1/2) + pi/4)` with `x~ = (x - x_l)/(x_u - x_l)`.
pub fn build_rescaled<T: Real>(
    p: &Circuit<T>,
    dist: &DiscreteDistribution<T>,
    axis: usize,
    scale: T,
) -> Result<Circuit<T>> {
    let support = *dist.support(axis)?;
    let width = support.x_u() - support.x_l();
    if !(width > T::zero()) {
        return Err(Error::InvalidParameter("degenerate support".into()));
    }
    let two = T::of(2.0);
    let offset = T::FRAC_PI_2() - scale;
    let unit = two * scale * support.delta() / width;
    build_rotation_bank(p, dist, offset, &[BankTerm { axis, unit_angle: unit }])
}

/// Grover iterate `Q = -A S_0 A^dagger S_chi`. The global sign is absorbed
/// into the reflection `2|0><0| - I`.
pub fn build_grover_iterate<T: Real>(a: &Circuit<T>) -> Result<Circuit<T>> {
    let ancilla =
        a.ancilla().ok_or_else(|| Error::InvalidCircuit("Grover iterate needs a designated ancilla".into()))?;
    let mut q = Circuit::new(a.width())?;
    q.push(Gate::FlipMarked { qubit: ancilla })?;
    q.push(Gate::Inverse(Arc::new(a.clone())))?;
    q.push(Gate::ReflectZero { first: 0, num_qubits: a.width() })?;
    q.append(a)?;
    q.with_ancilla(ancilla)
}

/// `Q^m A`: the circuit whose ancilla population is `sin^2((2m+1) theta_a)`.
pub fn build_amplified<T: Real>(a: &Circuit<T>, m: usize) -> Result<Circuit<T>> {
    let q = build_grover_iterate(a)?;
    let mut c = a.clone();
    for _ in 0..m {
        c.append(&q)?;
    }
    Ok(c)
}
