use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{compile_native, lower_rotation, lower_wide_rotations, trotter_step_circuit, HamiltonianTerms, TrotterPlan};
use crate::qsim::{apply_depolarizing, Gate, NoiseScope, NoiseSpec, Pauli, PauliString, StateVector};

/// A kick `exp(-i angle/2 generator)` inserted before Trotter step
/// `trotter_index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSlot {
    pub trotter_index: usize,
    pub generator: PauliString,
    pub angle: f64,
}

/// Uniform ±1 entries, one per perturbation slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RademacherVector {
    entries: Vec<i8>,
}

impl RademacherVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidPerturbation("Rademacher entries must be +1 or -1".into()));
        }
        Ok(Self { entries })
    }

    pub fn sample<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self { entries: (0..len).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect() }
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self { entries: self.entries.iter().map(|e| -e).collect() }
    }
}

/// A Trotterized evolution with kick slots and terminal Pauli readouts.
///
/// Steps `first_step..steps` are executed; each slot is applied right
/// before the step with its index. A template whose `first_step` is
/// positive has its pre-kick evolution elided, which is exact when the
/// initial state is an eigenstate of the step.
#[derive(Clone, Debug)]
pub struct CircuitTemplate {
    n_qubits: usize,
    step: Vec<Gate>,
    steps: usize,
    first_step: usize,
    slots: Vec<PerturbationSlot>,
    observables: Vec<PauliString>,
    noise: Option<NoiseSpec>,
    noisy_step: Vec<Gate>,
    tau: f64,
}

impl CircuitTemplate {
    fn new(
        n_qubits: usize,
        step: Vec<Gate>,
        plan: TrotterPlan,
        slots: Vec<PerturbationSlot>,
        obs: PauliString,
    ) -> Result<Self> {
        plan.validate()?;
        for g in &step {
            g.validate(n_qubits)?;
        }
        let mut t = Self {
            n_qubits,
            step,
            steps: plan.steps,
            first_step: 0,
            slots: Vec::new(),
            observables: Vec::new(),
            noise: None,
            noisy_step: Vec::new(),
            tau: plan.tau(),
        };
        for s in slots {
            t.check_slot(&s)?;
            t.slots.push(s);
        }
        t.slots.sort_by_key(|s| s.trotter_index);
        t.add_observable(obs)?;
        Ok(t)
    }

    fn check_slot(&self, s: &PerturbationSlot) -> Result<()> {
        if s.trotter_index >= self.steps {
            return Err(Error::InvalidPerturbation(format!(
                "slot index {} outside [0, {})",
                s.trotter_index, self.steps
            )));
        }
        if s.generator.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: s.generator.n_qubits() });
        }
        if !s.generator.is_hermitian() || s.generator.is_identity() {
            return Err(Error::InvalidPerturbation(format!("generator {} is not a Hermitian Pauli", s.generator)));
        }
        Ok(())
    }

    /// Adds a readout; all readouts must share a measurement basis.
    pub fn add_observable(&mut self, obs: PauliString) -> Result<()> {
        if obs.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: obs.n_qubits() });
        }
        if obs.sign().is_none() {
            return Err(Error::NonRealPhase);
        }
        if let Some(bad) = self.observables.iter().find(|o| !o.qubitwise_commutes(&obs)) {
            return Err(Error::InvalidPerturbation(format!("{obs} is not jointly measurable with {bad}")));
        }
        self.observables.push(obs);
        Ok(())
    }

    pub fn with_observables(mut self, extra: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        for o in extra {
            self.add_observable(o)?;
        }
        Ok(self)
    }

    /// Drops the evolution before the first slot.
    pub fn elided(mut self) -> Self {
        self.first_step = self.slots.first().map_or(0, |s| s.trotter_index);
        self
    }

    /// Attaches depolarizing noise after two-qubit gates.
    pub fn with_noise(mut self, noise: NoiseSpec) -> Result<Self> {
        noise.validate()?;
        let lower = |gates: &[Gate]| match noise.scope {
            NoiseScope::TwoQubitGates => lower_wide_rotations(gates, self.n_qubits),
            NoiseScope::NativeCnots => compile_native(gates, self.n_qubits),
        };
        self.noisy_step = lower(&self.step)?;
        self.noise = Some(noise);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn first_step(&self) -> usize {
        self.first_step
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn step_gates(&self) -> &[Gate] {
        &self.step
    }

    pub fn slots(&self) -> &[PerturbationSlot] {
        &self.slots
    }

    pub fn observables(&self) -> &[PauliString] {
        &self.observables
    }

    pub fn observable(&self) -> &PauliString {
        &self.observables[0]
    }

    pub fn noise(&self) -> Option<&NoiseSpec> {
        self.noise.as_ref()
    }

    /// Time between slot `k`'s kick and the readout.
    pub fn separation(&self, k: usize) -> f64 {
        (self.steps - self.slots[k].trotter_index) as f64 * self.tau
    }

    /// Slot angles as stored in the template.
    pub fn angles(&self) -> Vec<f64> {
        self.slots.iter().map(|s| s.angle).collect()
    }

    fn check_angles(&self, angles: &[f64]) -> Result<()> {
        if angles.len() != self.slots.len() {
            return Err(Error::LengthMismatch { expected: self.slots.len(), got: angles.len() });
        }
        Ok(())
    }

    /// The full noiseless gate list for given slot angles.
    pub fn gates(&self, angles: &[f64]) -> Result<Vec<Gate>> {
        self.check_angles(angles)?;
        let mut out = Vec::new();
        let mut k = 0;
        for n in self.first_step..self.steps {
            while k < self.slots.len() && self.slots[k].trotter_index == n {
                if angles[k] != 0.0 {
                    out.push(Gate::rotation(self.slots[k].generator.clone(), angles[k])?);
                }
                k += 1;
            }
            out.extend(self.step.iter().cloned());
        }
        Ok(out)
    }

    /// Noiseless evolution of `initial` for given slot angles.
    pub fn evolve(&self, initial: &StateVector, angles: &[f64]) -> Result<StateVector> {
        self.check_angles(angles)?;
        if initial.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: initial.n_qubits() });
        }
        let mut state = initial.clone();
        let mut k = 0;
        for n in self.first_step..self.steps {
            while k < self.slots.len() && self.slots[k].trotter_index == n {
                if angles[k] != 0.0 {
                    state.apply_unchecked(&Gate::PauliRotation {
                        generator: self.slots[k].generator.clone(),
                        angle: angles[k],
                    });
                }
                k += 1;
            }
            for g in &self.step {
                state.apply_unchecked(g);
            }
        }
        Ok(state)
    }

    /// One noisy trajectory; identical to [`evolve`](Self::evolve) when
    /// the template has no noise.
    pub fn evolve_noisy<R: Rng + ?Sized>(&self, initial: &StateVector, angles: &[f64], rng: &mut R) -> Result<StateVector> {
        let Some(noise) = self.noise else {
            return self.evolve(initial, angles);
        };
        self.check_angles(angles)?;
        if initial.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: initial.n_qubits() });
        }
        let mut state = initial.clone();
        let apply = |state: &mut StateVector, g: &Gate, rng: &mut R| -> Result<()> {
            state.apply_unchecked(g);
            if let Some(pair) = g.two_qubit_pair() {
                if noise.scope == NoiseScope::TwoQubitGates || matches!(g, Gate::Cnot { .. }) {
                    apply_depolarizing(state, pair, noise.gamma, rng)?;
                }
            }
            Ok(())
        };
        let mut k = 0;
        for n in self.first_step..self.steps {
            while k < self.slots.len() && self.slots[k].trotter_index == n {
                if angles[k] != 0.0 {
                    let generator = &self.slots[k].generator;
                    let kick = match noise.scope {
                        NoiseScope::TwoQubitGates if generator.weight() <= 2 => {
                            vec![Gate::rotation(generator.clone(), angles[k])?]
                        }
                        _ => lower_rotation(generator, angles[k])?,
                    };
                    for g in &kick {
                        apply(&mut state, g, rng)?;
                    }
                }
                k += 1;
            }
            for g in &self.noisy_step {
                apply(&mut state, g, rng)?;
            }
        }
        Ok(state)
    }
}

/// Single-slot template for the local (parameter-shift) estimator: the
/// kick precedes step `n_bar` and the readout follows step `N-1`.
pub fn build_lcp_template(
    plan: TrotterPlan,
    terms: &HamiltonianTerms,
    kick: &PauliString,
    n_bar: usize,
    obs: &PauliString,
) -> Result<CircuitTemplate> {
    let step = trotter_step_circuit(terms, plan.tau())?;
    let slot = PerturbationSlot { trotter_index: n_bar, generator: kick.clone(), angle: 0.0 };
    CircuitTemplate::new(terms.n_qubits(), step, plan, vec![slot], obs.clone())
}

/// Kick immediately followed by readout: the zero-separation point.
pub fn build_equal_time_template(kick: &PauliString, obs: &PauliString) -> Result<CircuitTemplate> {
    let plan = TrotterPlan::new(0.0, 1)?;
    let slot = PerturbationSlot { trotter_index: 0, generator: kick.clone(), angle: 0.0 };
    CircuitTemplate::new(kick.n_qubits(), Vec::new(), plan, vec![slot], obs.clone())
}

/// Template with one kick slot before every Trotter step.
pub fn build_scp_template(
    plan: TrotterPlan,
    terms: &HamiltonianTerms,
    kick: &PauliString,
    obs: &PauliString,
) -> Result<CircuitTemplate> {
    plan.validate()?;
    let step = trotter_step_circuit(terms, plan.tau())?;
    let slots = (0..plan.steps)
        .map(|n| PerturbationSlot { trotter_index: n, generator: kick.clone(), angle: 0.0 })
        .collect();
    CircuitTemplate::new(terms.n_qubits(), step, plan, slots, obs.clone())
}

/// `σ^axis` on one qubit.
pub fn kick_site(n_qubits: usize, qubit: usize, axis: Pauli) -> Result<PauliString> {
    if axis == Pauli::I {
        return Err(Error::InvalidPerturbation("kick axis must be X, Y or Z".into()));
    }
    PauliString::single(n_qubits, qubit, axis)
}

/// Slot angles `sign * epsilon * eta_k`.
pub fn bind_rademacher(template: &CircuitTemplate, eta: &RademacherVector, epsilon: f64, sign: i8) -> Result<Vec<f64>> {
    if eta.len() != template.slots().len() {
        return Err(Error::LengthMismatch { expected: template.slots().len(), got: eta.len() });
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidPerturbation("sign must be +1 or -1".into()));
    }
    Ok(eta.entries().iter().map(|&e| sign as f64 * epsilon * e as f64).collect())
}
