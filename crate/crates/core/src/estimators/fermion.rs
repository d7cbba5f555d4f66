//! Fermionic retarded Green's function `-i Θ <{a_R(T), a†_r(t)}>` from
//! commutator estimators.
//!
//! With a parity operator `𝒫` that commutes with `H`, anticommutes with
//! every ladder operator and has `𝒫|ψ0> = λ|ψ0>`,
//!
//! ```text
//! <{a_R(T), a†_r(t)}> = (1/λ) <[𝒫 a_R(T), a†_r(t)]>.
//! ```
//!
//! Under Jordan-Wigner, `a_R = (A_x - i A_y)/2` and `a†_r = (B_x + i B_y)/2`
//! with Pauli strings `A_α = 𝒵_R σ^α_R`, `B_β = 𝒵_r σ^β_r`. Each product
//! `𝒫 A_α` is a Pauli string `κ_α Q_α` with `Q_α` Hermitian and
//! `κ_α ∈ {±1, ±i}`. Expanding,
//!
//! ```text
//! <[𝒫 a_R, a†_r]> = (1/4) Σ_{α,β} c_α d_β κ_α <[Q_α(T), B_β(t)]>,
//! c = (1, -i),  d = (1, i).
//! ```
//!
//! A circuit with kick generator `B_β` and readout `Q_α` has derivative
//! `g_{αβ} = Im <Q_α(T) B_β(t)>`, and for Hermitian operators
//! `<[Q, B]> = 2i Im <Q B>`. Collecting the factors,
//!
//! ```text
//! G = -i (1/λ) (1/4) Σ c_α d_β κ_α (2i g_{αβ}) = (1/2λ) Σ_{α,β} c_α d_β κ_α g_{αβ}.
//! ```
//!
//! The four `(α, β)` families are independent circuits; their statistical
//! errors add in quadrature into the real and imaginary parts.

use num_complex::Complex64;

use super::config::EstimatorConfig;
use super::local::estimate_lcp;
use super::measure::Shots;
use super::scp::{estimate_scp, ScpSamples};
use super::trace::{ComplexTrace, GreenTrace, TraceMeta};
use crate::error::{Error, Result};
use crate::models::{build_hubbard_terms_jw, ground_state_in_sector, HubbardSpec, Species, TrotterPlan};
use crate::perturbations::{build_equal_time_template, build_fermionic_kick, build_scp_template, Quadrature};
use crate::qsim::{NoiseSpec, PauliString, RngStream, StateVector};

const QUADRATURES: [Quadrature; 2] = [Quadrature::X, Quadrature::Y];

/// A Hubbard Green's-function experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionicSetup {
    pub spec: HubbardSpec,
    pub readout_site: usize,
    pub kick_site: usize,
    pub species: Species,
    pub plan: TrotterPlan,
    pub noise: Option<NoiseSpec>,
}

/// One commutator circuit family.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub readout_quadrature: Quadrature,
    pub kick_quadrature: Quadrature,
    pub readout: PauliString,
    pub kick: PauliString,
    /// Coefficient of `g_{αβ}` in the Green's function.
    pub weight: Complex64,
}

impl FermionicSetup {
    /// Ground state of the filling sector and its parity eigenvalue.
    pub fn ground_state(&self) -> Result<(StateVector, f64)> {
        self.spec.validate()?;
        let terms = build_hubbard_terms_jw(&self.spec)?;
        let (psi, _) = ground_state_in_sector(&terms, &self.spec.sector())?;
        let lambda = psi.expectation_pauli(&self.spec.parity())?;
        if (lambda.abs() - 1.0).abs() > 1e-8 {
            return Err(Error::NotParityEigenstate(lambda));
        }
        Ok((psi, lambda.signum()))
    }

    /// The four circuit families with weights for parity eigenvalue `lambda`.
    pub fn families(&self, lambda: f64) -> Result<Vec<Family>> {
        let parity = self.spec.parity();
        let c = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)];
        let d = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let mut out = Vec::with_capacity(4);
        for (ia, &qa) in QUADRATURES.iter().enumerate() {
            let a = build_fermionic_kick(&self.spec, self.readout_site, self.species, qa)?;
            let product = &parity * &a;
            let kappa = product.phase();
            let readout = product.with_phase_exponent(0);
            for (ib, &qb) in QUADRATURES.iter().enumerate() {
                let kick = build_fermionic_kick(&self.spec, self.kick_site, self.species, qb)?;
                out.push(Family {
                    readout_quadrature: qa,
                    kick_quadrature: qb,
                    readout: readout.clone(),
                    kick,
                    weight: c[ia] * d[ib] * kappa / (2.0 * lambda),
                });
            }
        }
        Ok(out)
    }
}

/// SCP samples of the four families.
#[derive(Clone, Debug)]
pub struct FermionicRun {
    pub lambda: f64,
    pub families: Vec<Family>,
    pub samples: Vec<ScpSamples>,
}

impl FermionicRun {
    /// The Green's function from the first `prefix` directions of every
    /// family.
    pub fn trace(&self, prefix: usize) -> Result<ComplexTrace> {
        let parts: Vec<GreenTrace> = self.samples.iter().map(|s| s.trace(0, prefix)).collect::<Result<_>>()?;
        let times = parts[0].times.clone();
        let n = times.len();
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        let (mut vre, mut vim) = (vec![0.0; n], vec![0.0; n]);
        for (f, t) in self.families.iter().zip(&parts) {
            for i in 0..n {
                re[i] += f.weight.re * t.values[i];
                im[i] += f.weight.im * t.values[i];
                vre[i] += (f.weight.re * t.std_errors[i]).powi(2);
                vim[i] += (f.weight.im * t.std_errors[i]).powi(2);
            }
        }
        let meta = |part: &str| TraceMeta {
            readout: format!("{part} a_R"),
            kick: "a†_r".into(),
            estimator: "scp".into(),
            model: "hubbard".into(),
        };
        Ok(ComplexTrace {
            real: GreenTrace::new(times.clone(), re, vre.into_iter().map(f64::sqrt).collect(), meta("re"))?,
            imag: GreenTrace::new(times, im, vim.into_iter().map(f64::sqrt).collect(), meta("im"))?,
        })
    }
}

/// Runs the four SCP families, each with the full `config` budget.
pub fn estimate_fermionic_gf(setup: &FermionicSetup, config: &EstimatorConfig) -> Result<FermionicRun> {
    config.validate()?;
    let (psi, lambda) = setup.ground_state()?;
    let terms = build_hubbard_terms_jw(&setup.spec)?;
    let families = setup.families(lambda)?;
    let mut samples = Vec::with_capacity(families.len());
    for (i, f) in families.iter().enumerate() {
        let mut template = build_scp_template(setup.plan, &terms, &f.kick, &f.readout)?;
        if let Some(noise) = setup.noise {
            template = template.with_noise(noise)?;
        }
        let seed = RngStream::new(config.seed, 0).family(i as u64 + 1).seed;
        samples.push(estimate_scp(&template, &psi, &EstimatorConfig { seed, ..config.clone() })?);
    }
    Ok(FermionicRun { lambda, families, samples })
}

/// Zero-separation value `G(R, r, t, t)` from parameter-shift circuits.
pub fn estimate_fermionic_equal_time(setup: &FermionicSetup, shots: Shots, seed: u64) -> Result<(Complex64, Complex64)> {
    let (psi, lambda) = setup.ground_state()?;
    let mut value = Complex64::new(0.0, 0.0);
    let (mut vre, mut vim) = (0.0, 0.0);
    for (i, f) in setup.families(lambda)?.iter().enumerate() {
        let template = build_equal_time_template(&f.kick, &f.readout)?;
        let mut rng = RngStream::new(seed, i as u64).rng();
        let p = estimate_lcp(&template, &psi, shots, &mut rng)?;
        value += f.weight * p.values[0];
        vre += (f.weight.re * p.std_errors[0]).powi(2);
        vim += (f.weight.im * p.std_errors[0]).powi(2);
    }
    Ok((value, Complex64::new(vre.sqrt(), vim.sqrt())))
}
