//! Exact statevector simulation and the analytic Grover shot sampler.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuits::{Circuit, Gate, MAX_WIDTH};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Amplitudes of a `width`-qubit register, indexed by computational basis
/// state (qubit `k` is bit `k` of the index).
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector<T> {
    width: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> Statevector<T> {
    /// `|0...0>` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::SizeCap(format!("width {width} outside 1..={MAX_WIDTH}")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << width];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { width, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(width: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(width)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range")));
        }
        s.amps[0] = Complex::new(T::zero(), T::zero());
        s.amps[index] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total probability of basis states with `qubit` set.
    pub fn probability_one(&self, qubit: usize) -> T {
        let bit = 1usize << qubit;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, circuit: &Circuit<T>) -> Result<()> {
        if circuit.width() > self.width {
            return Err(Error::InvalidCircuit(format!(
                "circuit of width {} applied to {} qubits",
                circuit.width(),
                self.width
            )));
        }
        self.apply_gates(circuit.gates(), false);
        Ok(())
    }

    fn apply_gates(&mut self, gates: &[Gate<T>], adjoint: bool) {
        if adjoint {
            for g in gates.iter().rev() {
                self.apply_gate(g, true);
            }
        } else {
            for g in gates {
                self.apply_gate(g, false);
            }
        }
    }

    fn apply_gate(&mut self, gate: &Gate<T>, adjoint: bool) {
        let sign = if adjoint { -T::one() } else { T::one() };
        match gate {
            Gate::Ry { target, angle } => self.ry(None, *target, sign * *angle),
            Gate::ControlledRy { control, target, angle } => self.ry(Some(*control), *target, sign * *angle),
            // Householder reflections and phase flips are self-inverse.
            Gate::StatePrep { first, num_qubits, amplitudes } => self.householder(*first, *num_qubits, amplitudes),
            Gate::ReflectZero { first, num_qubits } => {
                let mask = ((1usize << num_qubits) - 1) << first;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::FlipMarked { qubit } => {
                let bit = 1usize << qubit;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Inverse(c) => self.apply_gates(c.gates(), !adjoint),
        }
    }

    fn ry(&mut self, control: Option<usize>, target: usize, angle: T) {
        let half = angle / T::of(2.0);
        let (s, c) = half.sin_cos();
        let tbit = 1usize << target;
        let cmask = control.map_or(0, |q| 1usize << q);
        for i in 0..self.amps.len() {
            if i & tbit != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | tbit;
            let a0 = self.amps[i];
            let a1 = self.amps[j];
            self.amps[i] = a0 * c - a1 * s;
            self.amps[j] = a0 * s + a1 * c;
        }
    }

    /// Reflection `I - 2 w w^T / (w^T w)` with `w = e_0 - psi`, acting on the
    /// register `first..first+n` of every slice of the other qubits.
    fn householder(&mut self, first: usize, n: usize, psi: &[T]) {
        let psi0 = psi[0];
        let wnorm = T::of(2.0) * (T::one() - psi0);
        if wnorm <= T::zero() {
            return;
        }
        let w: Vec<T> = psi.iter().enumerate().map(|(r, &p)| if r == 0 { T::one() - p } else { -p }).collect();
        let reg_mask = ((1usize << n) - 1) << first;
        let scale = T::of(2.0) / wnorm;
        for base in 0..self.amps.len() {
            if base & reg_mask != 0 {
                continue;
            }
            let mut dot = Complex::new(T::zero(), T::zero());
            for (r, &wr) in w.iter().enumerate() {
                dot = dot + self.amps[base | (r << first)] * wr;
            }
            if dot.re == T::zero() && dot.im == T::zero() {
                continue;
            }
            let dot = dot * scale;
            for (r, &wr) in w.iter().enumerate() {
                let k = base | (r << first);
                self.amps[k] = self.amps[k] - dot * wr;
            }
        }
    }

    /// Debug dump: one `index,real,imag` row per basis state.
    pub fn dump(&self) -> String {
        let mut out = String::from("index,real,imag\n");
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i},{:.12e},{:.12e}", a.re.as_f64(), a.im.as_f64());
        }
        out
    }
}

/// Exact state after applying `circuit` to `|0...0>`.
pub fn run<T: Real>(circuit: &Circuit<T>) -> Result<Statevector<T>> {
    let mut s = Statevector::zero(circuit.width())?;
    s.apply(circuit)?;
    Ok(s)
}

/// Probability that the designated ancilla of `circuit` reads `|1>`.
pub fn good_state_probability<T: Real>(circuit: &Circuit<T>) -> Result<T> {
    let ancilla = circuit.ancilla().ok_or_else(|| Error::InvalidCircuit("circuit has no designated ancilla".into()))?;
    let p = run(circuit)?.probability_one(ancilla);
    Ok(p.max(T::zero()).min(T::one()))
}

/// Reproducible random stream identified by `(seed, stream)`.
///
/// Backed by ChaCha8, whose 64-bit stream parameter gives independent
/// counter-based sequences for the same seed.
#[derive(Clone, Debug)]
pub struct ShotSampler {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finaliser over the combined words
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(a << 6).wrapping_add(a >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl ShotSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Fresh sampler on a sub-stream derived from this one's identity only
    /// (not from how much of it has been consumed).
    pub fn fork(&self, index: u64) -> Self {
        Self::new(self.seed, mix(self.stream, index))
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Number of successes in `trials` Bernoulli(`p`) draws.
    pub fn binomial(&mut self, trials: u64, p: f64) -> u64 {
        let p = p.clamp(0.0, 1.0);
        if trials == 0 || p == 0.0 {
            return 0;
        }
        if p == 1.0 {
            return trials;
        }
        Binomial::new(trials, p).expect("valid binomial parameters").sample(&mut self.rng)
    }
}

/// Success probability after `m` Grover iterates: `sin^2((2m+1) theta_a)`.
pub fn amplified_probability(theta_a: f64, m: u64) -> f64 {
    let s = ((2 * m + 1) as f64 * theta_a).sin();
    (s * s).clamp(0.0, 1.0)
}

/// Counts of `|1>` outcomes in `shots` measurements of `Q^m A`, drawn from the
/// analytic rotation law instead of evolving the statevector.
pub fn sample_grover_shots(theta_a: f64, m: u64, shots: u64, sampler: &mut ShotSampler) -> u64 {
    sampler.binomial(shots, amplified_probability(theta_a, m))
}
