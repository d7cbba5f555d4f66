use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::terms::HamiltonianTerms;
use crate::error::{Error, Result};
use crate::qsim::{PauliString, StateVector};

/// Largest register the dense eigensolver accepts.
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Eigenvalues closer than this are treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-8;

/// Full eigendecomposition of a Hamiltonian, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    /// Column `e` is the eigenvector of `eigenvalues[e]`.
    pub eigenvectors: DMatrix<Complex64>,
    pub ground_index: usize,
}

impl SpectralData {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[self.ground_index]
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn ground_state(&self) -> StateVector {
        let v = self.eigenvectors.column(self.ground_index).iter().copied().collect();
        StateVector::normalized(self.n_qubits(), v).expect("eigenvector is normalized")
    }
}

/// One Lehmann term `⟨ψ0|A|e⟩⟨e|B|ψ0⟩ = a + i b` at excitation energy `omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LehmannTerm {
    pub omega: f64,
    pub a: f64,
    pub b: f64,
}

/// Subspace of basis states with prescribed numbers of set bits inside
/// given masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    constraints: Vec<(u64, usize)>,
}

impl Sector {
    pub fn new(constraints: Vec<(u64, usize)>) -> Self {
        Self { constraints }
    }

    pub fn contains(&self, b: usize) -> bool {
        self.constraints.iter().all(|&(m, k)| (b as u64 & m).count_ones() as usize == k)
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > DENSE_QUBIT_LIMIT {
        return Err(Error::RegisterTooLarge { n_qubits, limit: DENSE_QUBIT_LIMIT });
    }
    Ok(())
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
fn eigh(h: DMatrix<Complex64>, real: bool) -> (Vec<f64>, DMatrix<Complex64>) {
    let dim = h.nrows();
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if real {
        let hr = h.map(|c| c.re);
        let eig = hr.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = h.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(dim, dim, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

/// Replaces the lowest degenerate block by a canonical basis whose first
/// vector is the normalized projection of the lowest-index computational
/// basis state with nonzero overlap, followed by Gram-Schmidt.
fn canonicalize_ground_space(values: &[f64], vectors: &mut DMatrix<Complex64>) {
    let e0 = values[0];
    let g = values.iter().take_while(|&&e| e - e0 <= DEGENERACY_TOL * e0.abs().max(1.0)).count();
    let dim = vectors.nrows();
    let space = vectors.columns(0, g).into_owned();
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(g);
    for j in 0..dim {
        if basis.len() == g {
            break;
        }
        // Projection of e_j onto the ground space.
        let coeffs = space.row(j).adjoint();
        let mut v = &space * coeffs;
        for u in &basis {
            let overlap = u.dotc(&v);
            v -= u * overlap;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    for (c, v) in basis.into_iter().enumerate() {
        vectors.set_column(c, &v);
    }
}

/// Dense ground state and full spectrum of a Hamiltonian.
///
/// A degenerate ground space is resolved by projecting computational basis
/// states `e_0, e_1, ...` onto it and keeping the first nonzero projection.
pub fn ground_state_exact(terms: &HamiltonianTerms) -> Result<(StateVector, SpectralData)> {
    let n = terms.n_qubits();
    check_size(n)?;
    let (values, mut vectors) = eigh(terms.dense(), terms.is_real());
    canonicalize_ground_space(&values, &mut vectors);
    let spectral = SpectralData { eigenvalues: values, eigenvectors: vectors, ground_index: 0 };
    Ok((spectral.ground_state(), spectral))
}

/// Lowest state within a symmetry sector, embedded in the full register.
pub fn ground_state_in_sector(terms: &HamiltonianTerms, sector: &Sector) -> Result<(StateVector, f64)> {
    let n = terms.n_qubits();
    check_size(n)?;
    let basis: Vec<usize> = (0..1usize << n).filter(|&b| sector.contains(b)).collect();
    if basis.is_empty() {
        return Err(Error::InvalidModel("empty symmetry sector".into()));
    }
    let index: std::collections::HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let d = basis.len();
    let mut h = DMatrix::<Complex64>::zeros(d, d);
    let mut column = std::collections::HashMap::new();
    for (col, &b) in basis.iter().enumerate() {
        column.clear();
        for t in terms.terms() {
            *column.entry(b ^ t.pauli.x_mask() as usize).or_insert(Complex64::new(0.0, 0.0)) +=
                t.coefficient * t.pauli.basis_coefficient(b);
        }
        for (target, amp) in &column {
            match index.get(target) {
                Some(&row) => h[(row, col)] += amp,
                None if amp.norm() > 1e-12 => {
                    return Err(Error::InvalidModel("Hamiltonian does not conserve the sector".into()))
                }
                None => {}
            }
        }
    }
    let (values, mut vectors) = eigh(h, terms.is_real());
    canonicalize_ground_space(&values, &mut vectors);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (i, &b) in basis.iter().enumerate() {
        amps[b] = vectors[(i, 0)];
    }
    Ok((StateVector::normalized(n, amps)?, values[0]))
}

/// Lehmann decomposition `⟨ψ0|A|e⟩⟨e|B|ψ0⟩` over all eigenstates, with
/// negligible terms (below 1e-12) dropped.
pub fn lehmann_overlaps(spectral: &SpectralData, op_a: &PauliString, op_b: &PauliString) -> Result<Vec<LehmannTerm>> {
    let n = spectral.n_qubits();
    for p in [op_a, op_b] {
        if p.n_qubits() != n {
            return Err(Error::SizeMismatch { expected: n, got: p.n_qubits() });
        }
    }
    let psi = spectral.ground_state();
    let mut left = psi.clone();
    left.apply_pauli(&op_a.dagger())?;
    let mut right = psi;
    right.apply_pauli(op_b)?;
    let v = &spectral.eigenvectors;
    let l = v.ad_mul(&DVector::from_column_slice(left.amplitudes()));
    let r = v.ad_mul(&DVector::from_column_slice(right.amplitudes()));
    let e0 = spectral.ground_energy();
    Ok((0..spectral.dim())
        .filter_map(|e| {
            let c = l[e].conj() * r[e];
            (c.norm() > 1e-12).then_some(LehmannTerm { omega: spectral.eigenvalues[e] - e0, a: c.re, b: c.im })
        })
        .collect())
}
