use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rgf_core::models::{build_hubbard_terms_jw, Boundary, HubbardSpec, Species, TrotterPlan};
use rgf_core::qsim::StateVector;
use rgf_core::{Error, Result};

use super::pauli::{inner, Stepper};
use super::{check_size, OracleSource, OracleTrace};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

// Occupation basis: bit `mode` set means the mode is occupied, and
// `mode = species * M + site` with spin up first.

fn mode(spec: &HubbardSpec, site: usize, species: Species) -> usize {
    match species {
        Species::Up => site,
        Species::Down => spec.sites + site,
    }
}

fn bonds(spec: &HubbardSpec) -> Vec<(usize, usize)> {
    let m = spec.sites;
    let mut b: Vec<(usize, usize)> = (0..m - 1).map(|i| (i, i + 1)).collect();
    if spec.boundary == Boundary::Periodic && m > 2 {
        b.push((m - 1, 0));
    }
    b
}

fn below(state: usize, mode: usize) -> u32 {
    (state & ((1 << mode) - 1)).count_ones()
}

fn sign(parity: u32) -> f64 {
    if parity % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `c_mode |state>` as `(sign, new state)`.
fn annihilate(state: usize, mode: usize) -> Option<(f64, usize)> {
    (state >> mode & 1 == 1).then(|| (sign(below(state, mode)), state & !(1 << mode)))
}

/// `c†_mode |state>` as `(sign, new state)`.
fn create(state: usize, mode: usize) -> Option<(f64, usize)> {
    (state >> mode & 1 == 0).then(|| (sign(below(state, mode)), state | (1 << mode)))
}

/// Matrix elements `(target, value)` of `H` acting on one occupation state.
fn hamiltonian_column(spec: &HubbardSpec, state: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let m = spec.sites;
    let double = (0..m).filter(|&i| state >> i & 1 == 1 && state >> (m + i) & 1 == 1).count();
    out.push((state, spec.interaction * double as f64));
    for (a, b) in bonds(spec) {
        for species in [Species::Up, Species::Down] {
            let (p, q) = (mode(spec, a, species), mode(spec, b, species));
            for (to, from) in [(p, q), (q, p)] {
                if let Some((s1, mid)) = annihilate(state, from) {
                    if let Some((s2, end)) = create(mid, to) {
                        out.push((end, -spec.hopping * s1 * s2));
                    }
                }
            }
        }
    }
    out
}

/// The Hubbard Hamiltonian on the full Fock space, built from fermion
/// operators directly.
pub fn hubbard_fock_hamiltonian(spec: &HubbardSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    check_size(spec.n_qubits())?;
    let dim = 1 << spec.n_qubits();
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        for (t, v) in hamiltonian_column(spec, s) {
            h[(t, s)] += v;
        }
    }
    Ok(h)
}

/// Fixed `(N↑, N↓)` block with its eigendecomposition.
struct Block {
    states: Vec<usize>,
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Block {
    fn new(spec: &HubbardSpec, up: usize, down: usize) -> Option<Self> {
        let m = spec.sites;
        if up > m || down > m {
            return None;
        }
        let mask = (1usize << m) - 1;
        let states: Vec<usize> = (0..1usize << (2 * m))
            .filter(|s| (s & mask).count_ones() as usize == up && (s >> m).count_ones() as usize == down)
            .collect();
        let index = |s: usize| states.binary_search(&s).ok();
        let mut h = DMatrix::zeros(states.len(), states.len());
        for (j, &s) in states.iter().enumerate() {
            for (t, v) in hamiltonian_column(spec, s) {
                let i = index(t).expect("hopping preserves particle numbers");
                h[(i, j)] += v;
            }
        }
        let eig = SymmetricEigen::new(h);
        Some(Self { states, values: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    fn ground(&self) -> (f64, usize) {
        let mut idx = 0;
        for e in 1..self.values.len() {
            if self.values[e] < self.values[idx] {
                idx = e;
            }
        }
        (self.values[idx], idx)
    }

    /// Eigenbasis components of `op |ψ>` for a sparse `ψ` given as a map
    /// from occupation states to amplitudes.
    fn project(&self, amps: &[(usize, f64)]) -> DVector<f64> {
        let mut v = DVector::zeros(self.states.len());
        for &(s, a) in amps {
            if let Ok(i) = self.states.binary_search(&s) {
                v[i] += a;
            }
        }
        self.vectors.tr_mul(&v)
    }
}

fn ladder(psi: &[(usize, f64)], mode: usize, dagger: bool) -> Vec<(usize, f64)> {
    psi.iter()
        .filter_map(|&(s, a)| if dagger { create(s, mode) } else { annihilate(s, mode) }.map(|(g, t)| (t, g * a)))
        .collect()
}

/// `-i Θ(t) <{a_R(t), a†_r(0)}>` in the ground state of the filling sector,
/// by exact diagonalization of the particle-number blocks. `Θ(0) = 1`.
pub fn exact_fermionic_gf(
    spec: &HubbardSpec,
    readout_site: usize,
    kick_site: usize,
    species: Species,
    times: &[f64],
) -> Result<OracleTrace> {
    spec.validate()?;
    check_size(spec.n_qubits())?;
    if readout_site >= spec.sites || kick_site >= spec.sites {
        return Err(Error::InvalidModel(format!("sites {readout_site}, {kick_site} outside a {}-site chain", spec.sites)));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidPlan(format!("retarded function needs t >= 0, got {t}")));
    }
    let [up, down] = spec.filling_or_half();
    let ground = Block::new(spec, up, down).expect("filling validated");
    let (e0, g) = ground.ground();
    let gap = (0..ground.values.len()).filter(|&e| e != g).map(|e| ground.values[e] - e0).fold(f64::INFINITY, f64::min);
    if gap < 1e-9 {
        return Err(Error::Numerical(format!("ground state of the filling sector is degenerate (gap {gap:e})")));
    }
    let psi: Vec<(usize, f64)> = ground.states.iter().zip(ground.vectors.column(g).iter()).map(|(&s, &a)| (s, a)).collect();
    let (rm, km) = (mode(spec, readout_site, species), mode(spec, kick_site, species));
    let shift = |d: isize| match species {
        Species::Up => ((up as isize + d) as usize, down),
        Species::Down => (up, (down as isize + d) as usize),
    };
    // Particle part <ψ|a_R e^{-i(H-E0)t} a†_r|ψ> and hole part <ψ|a†_r e^{i(H-E0)t} a_R|ψ>.
    let particle = {
        let (u, d) = shift(1);
        Block::new(spec, u, d).map(|b| {
            let l = b.project(&ladder(&psi, rm, true));
            let r = b.project(&ladder(&psi, km, true));
            (b.values.clone(), l.component_mul(&r))
        })
    };
    let hole = if (match species {
        Species::Up => up,
        Species::Down => down,
    }) == 0
    {
        None
    } else {
        let (u, d) = shift(-1);
        Block::new(spec, u, d).map(|b| {
            let l = b.project(&ladder(&psi, km, false));
            let r = b.project(&ladder(&psi, rm, false));
            (b.values.clone(), l.component_mul(&r))
        })
    };
    let values = times
        .iter()
        .map(|&t| {
            let mut acc = Complex64::new(0.0, 0.0);
            if let Some((e, w)) = &particle {
                acc += e.iter().zip(w.iter()).map(|(e, w)| w * Complex64::from_polar(1.0, -(e - e0) * t)).sum::<Complex64>();
            }
            if let Some((e, w)) = &hole {
                acc += e.iter().zip(w.iter()).map(|(e, w)| w * Complex64::from_polar(1.0, (e - e0) * t)).sum::<Complex64>();
            }
            MINUS_I * acc
        })
        .collect();
    Ok(OracleTrace { times: times.to_vec(), values, source: OracleSource::Spectral })
}

/// `-i [e^{-iht}]_{Rr}` for the one-body hopping matrix `h`, the exact
/// Green's function at `U = 0` in any state.
pub fn free_fermion_gf(spec: &HubbardSpec, readout_site: usize, kick_site: usize, times: &[f64]) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let m = spec.sites;
    let mut h = DMatrix::<f64>::zeros(m, m);
    for (a, b) in bonds(spec) {
        h[(a, b)] -= spec.hopping;
        h[(b, a)] -= spec.hopping;
    }
    let eig = SymmetricEigen::new(h);
    Ok(times
        .iter()
        .map(|&t| {
            let s: Complex64 = (0..m)
                .map(|k| {
                    eig.eigenvectors[(readout_site, k)]
                        * eig.eigenvectors[(kick_site, k)]
                        * Complex64::from_polar(1.0, -eig.eigenvalues[k] * t)
                })
                .sum();
            MINUS_I * s
        })
        .collect())
}

// The Trotterized oracle works in the qubit register of the estimators,
// where an occupied mode is a cleared bit and the Jordan-Wigner string
// counts the set (empty) bits below the mode.

fn qubit_ladder(v: &[Complex64], mode: usize, dagger: bool) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, a) in v.iter().enumerate() {
        let set = b >> mode & 1 == 1;
        // a† empties nothing: it maps a set (empty) bit to a cleared one.
        if set == dagger {
            out[b ^ (1 << mode)] = sign(below(b, mode)) * a;
        }
    }
    out
}

/// The Trotterized Green's function of the all-slot geometry, at
/// separations `τ, ..., Nτ`: for the kick before step `k`,
/// `-i <ψ_k| {W† a_R W, a†_r} |ψ_k>` with `ψ_k = U^k ψ` and `W = U^{N-k}`.
pub fn exact_trotter_fermionic_gf(
    spec: &HubbardSpec,
    plan: &TrotterPlan,
    initial: &StateVector,
    readout_site: usize,
    kick_site: usize,
    species: Species,
) -> Result<OracleTrace> {
    plan.validate()?;
    let terms = build_hubbard_terms_jw(spec)?;
    check_size(terms.n_qubits())?;
    if initial.n_qubits() != terms.n_qubits() {
        return Err(Error::SizeMismatch { expected: terms.n_qubits(), got: initial.n_qubits() });
    }
    if readout_site >= spec.sites || kick_site >= spec.sites {
        return Err(Error::InvalidModel(format!("sites {readout_site}, {kick_site} outside a {}-site chain", spec.sites)));
    }
    let (rm, km) = (mode(spec, readout_site, species), mode(spec, kick_site, species));
    let stepper = Stepper::new(&terms, plan.tau());
    let mut psi = initial.amplitudes().to_vec();
    for _ in 0..plan.steps {
        stepper.forward(&mut psi);
    }
    let mut chi = qubit_ladder(&psi, rm, true);
    let mut xi = qubit_ladder(&psi, rm, false);
    let mut values = vec![Complex64::new(0.0, 0.0); plan.steps];
    for k in (0..plan.steps).rev() {
        stepper.backward(&mut psi);
        stepper.backward(&mut chi);
        stepper.backward(&mut xi);
        let anti = inner(&chi, &qubit_ladder(&psi, km, true)) + inner(&qubit_ladder(&psi, km, false), &xi);
        values[plan.steps - 1 - k] = MINUS_I * anti;
    }
    Ok(OracleTrace {
        times: (1..=plan.steps).map(|m| plan.time(m)).collect(),
        values,
        source: OracleSource::DenseTrotter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_operators_anticommute() {
        let n = 4;
        for s in 0..1usize << n {
            for p in 0..n {
                for q in 0..n {
                    // {c_p, c†_q}|s> = δ_pq |s>
                    let mut acc = std::collections::BTreeMap::new();
                    if let Some((g1, t1)) = create(s, q) {
                        if let Some((g2, t2)) = annihilate(t1, p) {
                            *acc.entry(t2).or_insert(0.0) += g1 * g2;
                        }
                    }
                    if let Some((g1, t1)) = annihilate(s, p) {
                        if let Some((g2, t2)) = create(t1, q) {
                            *acc.entry(t2).or_insert(0.0) += g1 * g2;
                        }
                    }
                    acc.retain(|_, v: &mut f64| v.abs() > 1e-15);
                    if p == q {
                        assert_eq!(acc.len(), 1);
                        assert_eq!(acc.get(&s), Some(&1.0));
                    } else {
                        assert!(acc.is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_ladder_matches_occupation_convention() {
        // Empty two-mode register is |11>; a†_1 clears bit 1 with the sign
        // of the empty mode 0 below it.
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        v[0b11] = Complex64::new(1.0, 0.0);
        let w = qubit_ladder(&v, 1, true);
        assert_eq!(w[0b01], Complex64::new(-1.0, 0.0));
        let back = qubit_ladder(&w, 1, false);
        assert_eq!(back[0b11], Complex64::new(1.0, 0.0));
    }
}
