use nalgebra::DMatrix;
use num_complex::Complex64;
use rgf_core::models::{HamiltonianTerms, TrotterPlan};
use rgf_core::qsim::{Gate, Pauli, PauliString, StateVector};
use rgf_core::{Error, Result};

use super::pauli::{apply, conjugate, Stepper};

/// Largest register for density-matrix simulation.
const DENSITY_LIMIT: usize = 8;

fn gate_matrix(gate: &Gate, n: usize) -> Result<DMatrix<Complex64>> {
    gate.validate(n)?;
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        match gate {
            Gate::PauliRotation { generator, angle } => {
                let mut e = vec![Complex64::new(0.0, 0.0); dim];
                e[b] = Complex64::new(1.0, 0.0);
                let pe = apply(generator, &e);
                let (s, c) = (0.5 * angle).sin_cos();
                for i in 0..dim {
                    u[(i, b)] = c * e[i] - Complex64::new(0.0, s) * pe[i];
                }
            }
            Gate::Cnot { control, target } => {
                let t = if b >> control & 1 == 1 { b ^ (1 << target) } else { b };
                u[(t, b)] = Complex64::new(1.0, 0.0);
            }
            Gate::Unitary1(block) => {
                let q = block.qubit;
                let l = b >> q & 1;
                for o in 0..2 {
                    u[((b & !(1 << q)) | (o << q), b)] = block.matrix[o][l];
                }
            }
            Gate::Unitary2(block) => {
                let [q0, q1] = block.qubits();
                let l = 2 * (b >> q0 & 1) + (b >> q1 & 1);
                let rest = b & !(1 << q0) & !(1 << q1);
                for o in 0..4 {
                    u[(rest | (o >> 1) << q0 | (o & 1) << q1, b)] = block.matrix()[o][l];
                }
            }
        }
    }
    Ok(u)
}

fn support(gate: &Gate) -> Vec<usize> {
    match gate {
        Gate::PauliRotation { generator, .. } => generator.support(),
        Gate::Cnot { control, target } => vec![*control, *target],
        Gate::Unitary1(b) => vec![b.qubit],
        Gate::Unitary2(b) => b.qubits().to_vec(),
    }
}

/// `Tr[ρ O]` after running `gates` on `|ψ><ψ|`, with the two-qubit
/// depolarizing channel `(1-γ)ρ + (γ/16) Σ_P P ρ P` after every gate that
/// touches exactly two qubits.
pub fn noisy_expectation(gates: &[Gate], gamma: f64, initial: &StateVector, obs: &PauliString) -> Result<f64> {
    let n = initial.n_qubits();
    if n > DENSITY_LIMIT {
        return Err(Error::RegisterTooLarge { n_qubits: n, limit: DENSITY_LIMIT });
    }
    if obs.n_qubits() != n {
        return Err(Error::SizeMismatch { expected: n, got: obs.n_qubits() });
    }
    let psi = nalgebra::DVector::from_column_slice(initial.amplitudes());
    let mut rho = &psi * psi.adjoint();
    const LABELS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for g in gates {
        let u = gate_matrix(g, n)?;
        rho = &u * rho * u.adjoint();
        let s = support(g);
        if s.len() == 2 && gamma > 0.0 {
            let mut mixed = DMatrix::zeros(rho.nrows(), rho.ncols());
            for a in LABELS {
                for b in LABELS {
                    let p = PauliString::from_factors(n, &[(s[0], a), (s[1], b)])?;
                    mixed += conjugate(&p, &rho);
                }
            }
            rho = rho * Complex64::new(1.0 - gamma, 0.0) + mixed * Complex64::new(gamma / 16.0, 0.0);
        }
    }
    let dim = rho.nrows();
    let mut trace = Complex64::new(0.0, 0.0);
    for j in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[j] = Complex64::new(1.0, 0.0);
        let oe = apply(obs, &e);
        // (ρ O)_{jj} = Σ_i ρ_{ji} O_{ij}
        trace += (0..dim).map(|i| rho[(j, i)] * oe[i]).sum::<Complex64>();
    }
    Ok(trace.re)
}

/// Row-major dense density matrix with gate actions applied column-wise.
struct Density {
    dim: usize,
    data: Vec<Complex64>,
}

impl Density {
    fn pure(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = psi[i] * psi[j].conj();
            }
        }
        Self { dim, data }
    }

    fn from_pauli(p: &PauliString, dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in apply(p, &e).into_iter().enumerate() {
                data[i * dim + j] = v;
            }
        }
        Self { dim, data }
    }

    fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { dim: d, data }
    }

    /// `M -> U M` with `U` given by its action on vectors.
    fn left(&mut self, act: &dyn Fn(&mut [Complex64])) {
        let d = self.dim;
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        for j in 0..d {
            for i in 0..d {
                col[i] = self.data[i * d + j];
            }
            act(&mut col);
            for i in 0..d {
                self.data[i * d + j] = col[i];
            }
        }
    }

    /// `M -> U M U†` for any `M`: `U (U M†)†`.
    fn conjugate_by(&mut self, act: &dyn Fn(&mut [Complex64])) {
        let mut m = self.adjoint();
        m.left(act);
        let mut m = m.adjoint();
        m.left(act);
        *self = m;
    }

    fn depolarize(&mut self, pair: [usize; 2], n: usize, gamma: f64) -> Result<()> {
        const LABELS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let d = self.dim;
        let mut acc = vec![Complex64::new(0.0, 0.0); d * d];
        let m = nalgebra::DMatrix::from_row_slice(d, d, &self.data);
        for a in LABELS {
            for b in LABELS {
                let p = PauliString::from_factors(n, &[(pair[0], a), (pair[1], b)])?;
                let c = conjugate(&p, &m);
                for i in 0..d {
                    for j in 0..d {
                        acc[i * d + j] += c[(i, j)];
                    }
                }
            }
        }
        for (x, y) in self.data.iter_mut().zip(acc) {
            *x = *x * (1.0 - gamma) + y * (gamma / 16.0);
        }
        Ok(())
    }

    fn trace_product(&self, other: &Self) -> Complex64 {
        let d = self.dim;
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                t += self.data[i * d + j] * other.data[j * d + i];
            }
        }
        t
    }
}

/// In-place action of a gate (or its inverse) on a vector.
fn gate_action(gate: &Gate, inverse: bool) -> Box<dyn Fn(&mut [Complex64]) + '_> {
    match gate {
        Gate::PauliRotation { generator, angle } => {
            let a = if inverse { -angle } else { *angle };
            Box::new(move |v: &mut [Complex64]| {
                let pv = apply(generator, v);
                let (s, c) = (0.5 * a).sin_cos();
                for (x, y) in v.iter_mut().zip(pv) {
                    *x = c * *x - Complex64::new(0.0, s) * y;
                }
            })
        }
        Gate::Cnot { control, target } => {
            let (c, t) = (*control, *target);
            Box::new(move |v: &mut [Complex64]| {
                for b in 0..v.len() {
                    if b >> c & 1 == 1 && b >> t & 1 == 0 {
                        v.swap(b, b | (1 << t));
                    }
                }
            })
        }
        Gate::Unitary1(block) => {
            let q = block.qubit;
            let m = block.matrix;
            Box::new(move |v: &mut [Complex64]| {
                for b in 0..v.len() {
                    if b >> q & 1 == 0 {
                        let (x0, x1) = (v[b], v[b | 1 << q]);
                        let el = |o: usize, i: usize| if inverse { m[i][o].conj() } else { m[o][i] };
                        v[b] = el(0, 0) * x0 + el(0, 1) * x1;
                        v[b | 1 << q] = el(1, 0) * x0 + el(1, 1) * x1;
                    }
                }
            })
        }
        Gate::Unitary2(block) => {
            let [q0, q1] = block.qubits();
            let m = *block.matrix();
            Box::new(move |v: &mut [Complex64]| {
                for b in 0..v.len() {
                    if b >> q0 & 1 == 0 && b >> q1 & 1 == 0 {
                        let idx = |l: usize| b | (l >> 1) << q0 | (l & 1) << q1;
                        let x: [Complex64; 4] = std::array::from_fn(|l| v[idx(l)]);
                        for o in 0..4 {
                            v[idx(o)] = (0..4)
                                .map(|i| if inverse { m[i][o].conj() } else { m[o][i] } * x[i])
                                .sum();
                        }
                    }
                }
            })
        }
    }
}

fn pair_of(gate: &Gate) -> Option<[usize; 2]> {
    let s = support(gate);
    (s.len() == 2).then(|| [s[0], s[1]])
}

/// Exact derivative of `Tr[ρ Q]` with respect to every kick angle of a
/// noisy all-slot circuit: before each of the `steps` repetitions of
/// `step` sits a kick `exp(-iθK/2)`, and every gate touching exactly two
/// qubits (the kick included) is followed by the depolarizing channel.
/// Forward density matrices and backward Heisenberg observables give all
/// components in one sweep each. This is the two-qubit-gate noise scope
/// of the trajectory simulator.
pub fn noisy_trotter_gradient(
    step: &[Gate],
    steps: usize,
    initial: &StateVector,
    kick: &PauliString,
    obs: &PauliString,
    gamma: f64,
) -> Result<Vec<f64>> {
    let n = initial.n_qubits();
    if n > DENSITY_LIMIT {
        return Err(Error::RegisterTooLarge { n_qubits: n, limit: DENSITY_LIMIT });
    }
    for p in [kick, obs] {
        if p.n_qubits() != n {
            return Err(Error::SizeMismatch { expected: n, got: p.n_qubits() });
        }
    }
    for g in step {
        g.validate(n)?;
    }
    if gamma > 0.0 && kick.weight() > 2 {
        return Err(Error::InvalidPerturbation("noisy kicks wider than two qubits are lowered to CNOTs; not modelled".into()));
    }
    let dim = 1usize << n;
    let kick_pair = (kick.weight() == 2).then(|| {
        let s = kick.support();
        [s[0], s[1]]
    });
    let run_step = |m: &mut Density| -> Result<()> {
        for g in step {
            m.conjugate_by(&*gate_action(g, false));
            if let Some(pair) = pair_of(g) {
                m.depolarize(pair, n, gamma)?;
            }
        }
        Ok(())
    };
    // States right before each kick; the zero-angle kick only adds its channel.
    let mut rho = Density::pure(initial.amplitudes());
    let mut before = Vec::with_capacity(steps);
    for _ in 0..steps {
        before.push(Density { dim, data: rho.data.clone() });
        if let Some(pair) = kick_pair {
            rho.depolarize(pair, n, gamma)?;
        }
        run_step(&mut rho)?;
    }
    // Heisenberg observable after each kick, walking backwards.
    let mut q = Density::from_pauli(obs, dim);
    let mut g = vec![0.0; steps];
    for k in (0..steps).rev() {
        for gate in step.iter().rev() {
            if let Some(pair) = pair_of(gate) {
                q.depolarize(pair, n, gamma)?;
            }
            q.conjugate_by(&*gate_action(gate, true));
        }
        if let Some(pair) = kick_pair {
            q.depolarize(pair, n, gamma)?;
        }
        // d/dθ Tr[Q e^{-iθK/2} ρ e^{iθK/2}] = Tr[Q (-i/2)(Kρ - ρK)].
        let rho_k = &before[k];
        let mut k_rho = Density { dim, data: rho_k.data.clone() };
        k_rho.left(&|v: &mut [Complex64]| {
            let w = apply(kick, v);
            v.copy_from_slice(&w);
        });
        let rho_k_k = k_rho.adjoint();
        let t = q.trace_product(&k_rho) - q.trace_product(&rho_k_k);
        g[k] = (Complex64::new(0.0, -0.5) * t).re;
    }
    Ok(g)
}

/// Exact mean, over Rademacher directions and infinite shots, of the
/// simultaneous-perturbation estimate `η_k [F(εη) - F(-εη)] / (2ε)` for
/// every slot of the all-slot template, in slot order.
///
/// Averaged over its sign, an undifferentiated slot acts as the channel
/// `ρ -> c²ρ + s²KρK` with `c = cos(ε/2)`, `s = sin(ε/2)`; the slot being
/// differentiated contributes `-ics[K, ρ] / ε`. As `ε -> 0` this tends to
/// [`crate::exact_trotter_gradient`].
pub fn scp_expected_gradient(
    plan: &TrotterPlan,
    terms: &HamiltonianTerms,
    initial: &StateVector,
    kick: &PauliString,
    obs: &PauliString,
    epsilon: f64,
) -> Result<Vec<f64>> {
    plan.validate()?;
    let n = terms.n_qubits();
    if n > DENSITY_LIMIT {
        return Err(Error::RegisterTooLarge { n_qubits: n, limit: DENSITY_LIMIT });
    }
    for p in [kick, obs] {
        if p.n_qubits() != n {
            return Err(Error::SizeMismatch { expected: n, got: p.n_qubits() });
        }
    }
    if initial.n_qubits() != n {
        return Err(Error::SizeMismatch { expected: n, got: initial.n_qubits() });
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidPerturbation(format!("epsilon must be positive, got {epsilon}")));
    }
    let dim = 1usize << n;
    let (s, c) = (0.5 * epsilon).sin_cos();
    let stepper = Stepper::new(terms, plan.tau());
    let forward = |v: &mut [Complex64]| {
        let mut w = v.to_vec();
        stepper.forward(&mut w);
        v.copy_from_slice(&w);
    };
    let backward = |v: &mut [Complex64]| {
        let mut w = v.to_vec();
        stepper.backward(&mut w);
        v.copy_from_slice(&w);
    };
    let flip = |v: &mut [Complex64]| {
        let w = apply(kick, v);
        v.copy_from_slice(&w);
    };
    let average_kick = |m: &mut Density| {
        let mut k = Density { dim, data: m.data.clone() };
        k.conjugate_by(&flip);
        for (x, y) in m.data.iter_mut().zip(k.data) {
            *x = *x * (c * c) + y * (s * s);
        }
    };
    let mut rho = Density::pure(initial.amplitudes());
    let mut before = Vec::with_capacity(plan.steps);
    for _ in 0..plan.steps {
        before.push(Density { dim, data: rho.data.clone() });
        average_kick(&mut rho);
        rho.conjugate_by(&forward);
    }
    let mut q = Density::from_pauli(obs, dim);
    let mut g = vec![0.0; plan.steps];
    for k in (0..plan.steps).rev() {
        q.conjugate_by(&backward);
        let mut k_rho = Density { dim, data: before[k].data.clone() };
        k_rho.left(&flip);
        let rho_k = k_rho.adjoint();
        let t = q.trace_product(&k_rho) - q.trace_product(&rho_k);
        g[k] = (Complex64::new(0.0, -c * s) * t).re / epsilon;
        average_kick(&mut q);
    }
    Ok(g)
}
