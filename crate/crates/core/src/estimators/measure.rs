use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{Gate, Pauli, PauliString, StateVector};

/// How expectation values are obtained from a final state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    /// Exact expectation values (the infinite-shot limit).
    Exact,
    /// Sample means over this many projective measurements.
    Finite(u64),
}

impl Shots {
    pub fn count(self) -> Option<u64> {
        match self {
            Shots::Exact => None,
            Shots::Finite(n) => Some(n),
        }
    }
}

/// Joint readout of qubitwise-commuting Pauli strings by a shared basis
/// change followed by computational-basis sampling.
#[derive(Clone, Debug)]
pub(crate) struct Readout {
    observables: Vec<PauliString>,
    basis_change: Vec<Gate>,
    masks: Vec<(usize, f64)>,
}

impl Readout {
    pub(crate) fn new(observables: &[PauliString]) -> Result<Self> {
        let n = observables.first().map(|o| o.n_qubits()).ok_or(Error::InvalidPerturbation("no observables".into()))?;
        let mut axis = vec![Pauli::I; n];
        let mut masks = Vec::with_capacity(observables.len());
        for o in observables {
            let sign = o.sign().ok_or(Error::NonRealPhase)?;
            for q in o.support() {
                let p = o.get(q);
                if axis[q] != Pauli::I && axis[q] != p {
                    return Err(Error::InvalidPerturbation(format!("{o} is not qubitwise commuting with the readout set")));
                }
                axis[q] = p;
            }
            masks.push((o.support_mask() as usize, sign));
        }
        let mut basis_change = Vec::new();
        for (q, p) in axis.iter().enumerate() {
            match p {
                Pauli::X => basis_change.push(Gate::hadamard(q)),
                Pauli::Y => {
                    basis_change.push(Gate::s_dagger(q));
                    basis_change.push(Gate::hadamard(q));
                }
                _ => {}
            }
        }
        Ok(Self { observables: observables.to_vec(), basis_change, masks })
    }

    pub(crate) fn len(&self) -> usize {
        self.masks.len()
    }

    /// Exact expectation of every observable.
    pub(crate) fn exact(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.observables.iter().map(|o| state.expectation_pauli(o)).collect()
    }

    /// Adds the sum of `shots` ±1 outcomes per observable into `sums`.
    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, state: &StateVector, shots: u64, rng: &mut R, sums: &mut [f64]) {
        if shots == 0 {
            return;
        }
        let mut rotated = state.clone();
        for g in &self.basis_change {
            rotated.apply_unchecked(g);
        }
        let mut record = |b: usize| {
            for (s, &(m, sign)) in sums.iter_mut().zip(&self.masks) {
                *s += if (b & m).count_ones() % 2 == 0 { sign } else { -sign };
            }
        };
        if shots == 1 {
            record(rotated.sample_basis(rng));
            return;
        }
        let mut cdf: Vec<f64> = Vec::with_capacity(rotated.amplitudes().len());
        let mut acc = 0.0;
        for a in rotated.amplitudes() {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        for _ in 0..shots {
            let u = rng.gen::<f64>() * acc;
            let b = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            record(b);
        }
    }

    /// Sample means (or exact values) for each observable.
    pub(crate) fn estimate<R: Rng + ?Sized>(&self, state: &StateVector, shots: Shots, rng: &mut R) -> Result<Vec<f64>> {
        match shots {
            Shots::Exact => self.exact(state),
            Shots::Finite(0) => Err(Error::InvalidConfig("shot count must be positive".into())),
            Shots::Finite(n) => {
                let mut sums = vec![0.0; self.len()];
                self.sample_into(state, n, rng, &mut sums);
                Ok(sums.into_iter().map(|s| s / n as f64).collect())
            }
        }
    }
}
