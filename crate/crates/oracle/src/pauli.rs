use num_complex::Complex64;
use rgf_core::models::HamiltonianTerms;
use rgf_core::qsim::PauliString;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `<b^x| P |b>` for the basis state `b`.
fn coefficient(p: &PauliString, b: usize) -> Complex64 {
    let y = (p.x_mask() & p.z_mask()).count_ones();
    let power = (p.phase_exponent() as u32 + y) % 4;
    let sign = if (b as u64 & p.z_mask()).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    I.powu(power) * sign
}

pub(crate) fn apply(p: &PauliString, v: &[Complex64]) -> Vec<Complex64> {
    let x = p.x_mask() as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, a) in v.iter().enumerate() {
        out[b ^ x] = coefficient(p, b) * a;
    }
    out
}

/// `P ρ P†` for a dense row-major `dim × dim` matrix.
pub(crate) fn conjugate(p: &PauliString, rho: &nalgebra::DMatrix<Complex64>) -> nalgebra::DMatrix<Complex64> {
    let x = p.x_mask() as usize;
    let dim = rho.nrows();
    let c: Vec<Complex64> = (0..dim).map(|b| coefficient(p, b)).collect();
    let mut out = nalgebra::DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            out[(i ^ x, j ^ x)] = c[i] * c[j].conj() * rho[(i, j)];
        }
    }
    out
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// First-order Trotter step `Π_j exp(-i c_j τ P_j)` in term order, acting
/// on plain vectors.
pub(crate) struct Stepper {
    terms: Vec<(f64, PauliString)>,
    tau: f64,
}

impl Stepper {
    pub(crate) fn new(terms: &HamiltonianTerms, tau: f64) -> Self {
        Self { terms: terms.terms().iter().map(|t| (t.coefficient, t.pauli.clone())).collect(), tau }
    }

    fn rotate(p: &PauliString, phi: f64, v: &mut Vec<Complex64>) {
        if p.is_identity() {
            let f = Complex64::from_polar(1.0, -phi);
            v.iter_mut().for_each(|a| *a *= f);
            return;
        }
        let pv = apply(p, v);
        let (s, c) = phi.sin_cos();
        for (a, b) in v.iter_mut().zip(pv) {
            *a = c * *a - I * s * b;
        }
    }

    pub(crate) fn forward(&self, v: &mut Vec<Complex64>) {
        for (c, p) in &self.terms {
            Self::rotate(p, c * self.tau, v);
        }
    }

    pub(crate) fn backward(&self, v: &mut Vec<Complex64>) {
        for (c, p) in self.terms.iter().rev() {
            Self::rotate(p, -c * self.tau, v);
        }
    }
}

/// Dense Hamiltonian assembled column by column from the Pauli action.
pub(crate) fn dense_hamiltonian(terms: &HamiltonianTerms) -> nalgebra::DMatrix<Complex64> {
    let dim = 1usize << terms.n_qubits();
    let mut h = nalgebra::DMatrix::zeros(dim, dim);
    for t in terms.terms() {
        let x = t.pauli.x_mask() as usize;
        for b in 0..dim {
            h[(b ^ x, b)] += t.coefficient * coefficient(&t.pauli, b);
        }
    }
    h
}
