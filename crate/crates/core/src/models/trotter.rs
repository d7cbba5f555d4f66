use serde::{Deserialize, Serialize};

use super::terms::HamiltonianTerms;
use crate::error::{Error, Result};
use crate::qsim::{Block2, Gate};

/// Uniform time grid of `steps` Trotter steps over `total_time`; the step
/// is `tau = total_time / steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterPlan {
    pub total_time: f64,
    pub steps: usize,
}

impl TrotterPlan {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        let plan = Self { total_time, steps };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidPlan("steps must be >= 1".into()));
        }
        if !self.total_time.is_finite() || self.total_time < 0.0 {
            return Err(Error::InvalidPlan(format!("total_time {} must be finite and >= 0", self.total_time)));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Time after `n` steps.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.total_time / self.steps as f64
    }
}

/// One first-order Trotter step `Π_k exp(-i c_k P_k tau)` in term order.
///
/// Consecutive commuting terms whose joint support is at most two qubits
/// are fused into one block (a Heisenberg bond becomes a single
/// XX+YY+ZZ block). Identity terms only shift the global phase and are
/// dropped. Wider strings become individual Pauli rotations.
pub fn trotter_step_circuit(terms: &HamiltonianTerms, tau: f64) -> Result<Vec<Gate>> {
    if !tau.is_finite() {
        return Err(Error::InvalidPlan(format!("non-finite tau {tau}")));
    }
    let list = terms.terms();
    let mut gates = Vec::new();
    let mut i = 0;
    while i < list.len() {
        let first = &list[i];
        if first.pauli.is_identity() {
            i += 1;
            continue;
        }
        let mut mask = first.pauli.support_mask();
        let mut end = i + 1;
        if mask.count_ones() <= 2 {
            while end < list.len() {
                let next = &list[end].pauli;
                let joint = mask | next.support_mask();
                if next.is_identity()
                    || joint.count_ones() > 2
                    || !list[i..end].iter().all(|t| t.pauli.commutes_with(next))
                {
                    break;
                }
                mask = joint;
                end += 1;
            }
        }
        let group = &list[i..end];
        if mask.count_ones() == 2 {
            let lo = mask.trailing_zeros() as usize;
            let hi = 63 - mask.leading_zeros() as usize;
            let rotations = group.iter().map(|t| (t.pauli.clone(), 2.0 * t.coefficient * tau)).collect();
            gates.push(Gate::Unitary2(Block2::from_rotations([lo, hi], rotations)?));
        } else {
            for t in group {
                gates.push(Gate::rotation(t.pauli.clone(), 2.0 * t.coefficient * tau)?);
            }
        }
        i = end;
    }
    Ok(gates)
}
