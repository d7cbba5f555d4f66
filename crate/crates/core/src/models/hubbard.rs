use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::exact::Sector;
use super::terms::{HamiltonianTerms, PauliSum};
use super::{chain_bonds, Boundary};
use crate::error::{Error, Result};
use crate::qsim::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Up,
    Down,
}

/// One-dimensional Fermi-Hubbard chain
/// `-J Σ_<μν>,σ (a†_μσ a_νσ + h.c.) + U Σ_μ n_μ↑ n_μ↓`.
///
/// Modes are laid out blocked, `qubit = species * sites + site` with spin
/// up first. The Jordan-Wigner map uses `a† = Z...Z (X + iY)/2`, so an
/// occupied mode is the qubit state |0> and `n = (1 + Z)/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HubbardSpec {
    pub sites: usize,
    #[serde(default = "one")]
    pub hopping: f64,
    pub interaction: f64,
    #[serde(default)]
    pub boundary: Boundary,
    /// Particle numbers `[n_up, n_down]` of the ground-state sector;
    /// half filling when absent.
    #[serde(default)]
    pub filling: Option<[usize; 2]>,
}

fn one() -> f64 {
    1.0
}

impl HubbardSpec {
    pub fn new(sites: usize, hopping: f64, interaction: f64, boundary: Boundary) -> Self {
        Self { sites, hopping, interaction, boundary, filling: None }
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.sites
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidModel(format!("Hubbard chain needs >= 2 sites, got {}", self.sites)));
        }
        if !self.hopping.is_finite() || !self.interaction.is_finite() {
            return Err(Error::InvalidModel("hopping and interaction must be finite".into()));
        }
        if let Some([u, d]) = self.filling {
            if u > self.sites || d > self.sites {
                return Err(Error::InvalidModel(format!("filling {u}/{d} exceeds {} sites", self.sites)));
            }
        }
        Ok(())
    }

    pub fn mode(&self, site: usize, species: Species) -> usize {
        match species {
            Species::Up => site,
            Species::Down => self.sites + site,
        }
    }

    pub fn filling_or_half(&self) -> [usize; 2] {
        self.filling.unwrap_or([self.sites.div_ceil(2), self.sites / 2])
    }

    /// Fixed-particle-number sector of the ground state.
    pub fn sector(&self) -> Sector {
        let m = self.sites;
        let [up, down] = self.filling_or_half();
        let up_mask = (1u64 << m) - 1;
        let down_mask = up_mask << m;
        // Occupied modes are |0>, so `k` particles leave `m - k` bits set.
        Sector::new(vec![(up_mask, m - up), (down_mask, m - down)])
    }

    /// Fermion parity `Z_0 ... Z_{2M-1}`.
    pub fn parity(&self) -> PauliString {
        let n = self.n_qubits();
        PauliString::from_masks(n, 0, (1u64 << n) - 1, 0)
    }
}

/// `Z_0 ... Z_{mode-1}`.
pub(crate) fn jw_string(n_qubits: usize, mode: usize) -> PauliString {
    PauliString::from_masks(n_qubits, 0, (1u64 << mode) - 1, 0)
}

/// Jordan-Wigner image of `a_mode` (or `a†_mode` when `dagger`).
pub fn jw_ladder(n_qubits: usize, mode: usize, dagger: bool) -> Result<PauliSum> {
    if mode >= n_qubits {
        return Err(Error::QubitOutOfRange { index: mode, n_qubits });
    }
    let z = jw_string(n_qubits, mode);
    let x = &z * &PauliString::single(n_qubits, mode, Pauli::X)?;
    let y = &z * &PauliString::single(n_qubits, mode, Pauli::Y)?;
    let s = if dagger { 0.5 } else { -0.5 };
    Ok(PauliSum::from_pauli(Complex64::new(0.5, 0.0), x).add(&PauliSum::from_pauli(Complex64::new(0.0, s), y)))
}

/// Hubbard terms in Trotter order: hopping on even bonds, hopping on odd
/// bonds (each bond up then down), a constant shift, then the on-site
/// `Z↑, Z↓, Z↑Z↓` triple for every site.
pub fn build_hubbard_terms_jw(spec: &HubbardSpec) -> Result<HamiltonianTerms> {
    spec.validate()?;
    let n = spec.n_qubits();
    let tol = 1e-14;
    let mut terms = Vec::new();
    for (a, b) in chain_bonds(spec.sites, spec.boundary) {
        for species in [Species::Up, Species::Down] {
            let (p, q) = (spec.mode(a, species), spec.mode(b, species));
            let forward = jw_ladder(n, p, true)?.mul(&jw_ladder(n, q, false)?);
            let hop = forward.add(&forward.dagger()).scale(Complex64::new(-spec.hopping, 0.0));
            terms.extend(hop.into_real_terms(tol)?);
        }
    }
    let mut onsite = PauliSum::zero(n);
    for site in 0..spec.sites {
        let (u, d) = (spec.mode(site, Species::Up), spec.mode(site, Species::Down));
        let nu = jw_ladder(n, u, true)?.mul(&jw_ladder(n, u, false)?);
        let nd = jw_ladder(n, d, true)?.mul(&jw_ladder(n, d, false)?);
        onsite = onsite.add(&nu.mul(&nd).scale(Complex64::new(spec.interaction, 0.0)));
    }
    let mut onsite = onsite.into_real_terms(tol)?;
    // Identity first, then per-site groups so each site fuses into one block.
    onsite.sort_by_key(|t| {
        let s = t.pauli.support();
        match s.first() {
            None => (0, 0),
            Some(&q) => (1, q % spec.sites),
        }
    });
    terms.extend(onsite);
    HamiltonianTerms::new(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(sum: &PauliSum) -> DMatrix<Complex64> {
        let n = sum.terms()[0].1.n_qubits();
        let dim = 1 << n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in sum.terms() {
            let x = p.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += c * p.basis_coefficient(b);
            }
        }
        m
    }

    #[test]
    fn canonical_anticommutation() {
        let n = 4;
        let id = DMatrix::<Complex64>::identity(16, 16);
        for r in 0..n {
            for s in 0..n {
                let a = dense(&jw_ladder(n, r, false).unwrap());
                let ad = dense(&jw_ladder(n, s, true).unwrap());
                let anti = &a * &ad + &ad * &a;
                let want = if r == s { id.clone() } else { DMatrix::zeros(16, 16) };
                assert!((anti - want).norm() < 1e-12, "{{a_{r}, a†_{s}}}");
                let b = dense(&jw_ladder(n, s, false).unwrap());
                assert!((&a * &b + &b * &a).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn creation_fills_the_zero_state() {
        let a_dag = dense(&jw_ladder(2, 1, true).unwrap());
        // Empty register is |11>; creating mode 1 clears bit 1.
        let v = a_dag.column(0b11);
        // Z_0 acting on the empty qubit 0 contributes the sign.
        assert!((v[0b01] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_count_is_twice_sites() {
        for m in 2..6 {
            let spec = HubbardSpec::new(m, 1.0, 5.0, Boundary::Periodic);
            assert_eq!(build_hubbard_terms_jw(&spec).unwrap().n_qubits(), 2 * m);
        }
    }

    #[test]
    fn half_filled_dimer_energy() {
        let spec = HubbardSpec::new(2, 1.0, 5.0, Boundary::Open);
        let terms = build_hubbard_terms_jw(&spec).unwrap();
        let (_, e0) = crate::models::ground_state_in_sector(&terms, &spec.sector()).unwrap();
        let u: f64 = 5.0;
        let want = u / 2.0 - (u * u / 4.0 + 4.0).sqrt();
        assert!((e0 - want).abs() < 1e-10, "{e0} vs {want}");
    }
}
