//! Exact statevector simulation of angle-embedding feature maps.
//!
//! The gate set is the minimum the feature maps need: H, RY, RZ and CNOT.
//! Amplitudes are updated in place, one gate at a time, in O(2^n) memory.
//! Qubit `i` addresses bit `i` (least significant) of the amplitude index.

use num_complex::Complex64;
use thiserror::Error;

/// Simulator bound: feature maps address at most this many qubits.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QsimError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit count {0} exceeds the simulator bound of {MAX_QUBITS}")]
    QubitBoundExceeded(usize),
    #[error("invalid feature map: {0}")]
    InvalidSpec(String),
}

/// Rotation axis of the embedding layer. `ZAfterH` prepends one Hadamard
/// layer per repetition so the Z rotations act on superposed states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationAxis {
    Y,
    ZAfterH,
}

/// CNOT entangling topology. Ring applies `CNOT(i, (i+1) mod n)` for every
/// qubit; linear omits the wrap-around gate. Single-qubit maps have no
/// entangler either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    Ring,
    Linear,
}

/// Parameters of one angle-embedding circuit.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureMapSpec {
    pub num_qubits: usize,
    pub reps: usize,
    pub axis: RotationAxis,
    pub scale: f64,
    pub entangler: Entangler,
}

impl FeatureMapSpec {
    pub fn new(
        num_qubits: usize,
        reps: usize,
        axis: RotationAxis,
        scale: f64,
        entangler: Entangler,
    ) -> Result<Self, QsimError> {
        if num_qubits == 0 {
            return Err(QsimError::InvalidSpec("num_qubits must be >= 1".to_string()));
        }
        if num_qubits > MAX_QUBITS {
            return Err(QsimError::QubitBoundExceeded(num_qubits));
        }
        if reps == 0 {
            return Err(QsimError::InvalidSpec("reps must be >= 1".to_string()));
        }
        if scale == 0.0 || !scale.is_finite() {
            return Err(QsimError::InvalidSpec(format!(
                "scale must be finite and nonzero, got {scale}"
            )));
        }
        Ok(FeatureMapSpec {
            num_qubits,
            reps,
            axis,
            scale,
            entangler,
        })
    }
}

/// A normalized pure state over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero(num_qubits: usize) -> Result<Self, QsimError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(QsimError::QubitBoundExceeded(num_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// Visits each (index with qubit bit 0, index with qubit bit 1) pair.
    fn for_each_pair(&mut self, qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        debug_assert!(qubit < self.num_qubits);
        let stride = 1usize << qubit;
        let block = stride << 1;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for offset in 0..stride {
                let i0 = base + offset;
                let i1 = i0 + stride;
                let (lo, hi) = self.amps.split_at_mut(i1);
                f(&mut lo[i0], &mut hi[0]);
            }
            base += block;
        }
    }

    pub fn h(&mut self, qubit: usize) {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        self.for_each_pair(qubit, |a0, a1| {
            let x = *a0;
            let y = *a1;
            *a0 = (x + y) * inv_sqrt2;
            *a1 = (x - y) * inv_sqrt2;
        });
    }

    pub fn ry(&mut self, qubit: usize, theta: f64) {
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        self.for_each_pair(qubit, |a0, a1| {
            let x = *a0;
            let y = *a1;
            *a0 = x * c - y * s;
            *a1 = x * s + y * c;
        });
    }

    pub fn rz(&mut self, qubit: usize, theta: f64) {
        let phase0 = Complex64::from_polar(1.0, -theta / 2.0);
        let phase1 = Complex64::from_polar(1.0, theta / 2.0);
        self.for_each_pair(qubit, |a0, a1| {
            *a0 *= phase0;
            *a1 *= phase1;
        });
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        debug_assert!(control != target);
        let control_mask = 1usize << control;
        let target_mask = 1usize << target;
        for i in 0..self.amps.len() {
            // Swap each (target=0, target=1) pair once, where control is set.
            if i & control_mask != 0 && i & target_mask == 0 {
                self.amps.swap(i, i | target_mask);
            }
        }
    }
}

/// Encodes a feature vector with the angle-embedding circuit: per
/// repetition, a rotation of `scale * x[i]` on qubit `i` for every qubit
/// (preceded by a Hadamard layer for the Z-axis variant), then the CNOT
/// entangler.
pub fn prepare_state(x: &[f64], spec: &FeatureMapSpec) -> Result<StateVector, QsimError> {
    if x.len() != spec.num_qubits {
        return Err(QsimError::DimensionMismatch {
            expected: spec.num_qubits,
            got: x.len(),
        });
    }
    let n = spec.num_qubits;
    let mut state = StateVector::zero(n)?;
    for _ in 0..spec.reps {
        match spec.axis {
            RotationAxis::Y => {
                for (qubit, &value) in x.iter().enumerate() {
                    state.ry(qubit, spec.scale * value);
                }
            }
            RotationAxis::ZAfterH => {
                for qubit in 0..n {
                    state.h(qubit);
                }
                for (qubit, &value) in x.iter().enumerate() {
                    state.rz(qubit, spec.scale * value);
                }
            }
        }
        if n > 1 {
            let last = match spec.entangler {
                Entangler::Ring => n,
                Entangler::Linear => n - 1,
            };
            for i in 0..last {
                state.cnot(i, (i + 1) % n);
            }
        }
    }
    Ok(state)
}

/// State fidelity `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, QsimError> {
    if a.amps.len() != b.amps.len() {
        return Err(QsimError::DimensionMismatch {
            expected: a.amps.len(),
            got: b.amps.len(),
        });
    }
    let overlap: Complex64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr())
}
