use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rgf_core::models::{lehmann_overlaps, HamiltonianTerms, SpectralData, TrotterPlan};
use rgf_core::qsim::{PauliString, StateVector};
use rgf_core::{Error, Result};
use serde::{Deserialize, Serialize};

use super::pauli::{apply, dense_hamiltonian, inner, Stepper};
use super::{check_size, OracleSource, OracleTrace};

/// What precedes the kick in a single-slot circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prefix {
    /// The first `n̄` Trotter steps run before the kick.
    Evolved,
    /// The kick acts on the initial state directly.
    Elided,
}

fn check_ops(n: usize, ops: &[&PauliString]) -> Result<()> {
    check_size(n)?;
    for p in ops {
        if p.n_qubits() != n {
            return Err(Error::SizeMismatch { expected: n, got: p.n_qubits() });
        }
    }
    Ok(())
}

/// `Im C(t)` with `C(t) = <ψ0| Q(t) K |ψ0> = Σ_e (a_e + i b_e) e^{-iω_e t}`,
/// i.e. `Σ_e (b_e cos ω_e t - a_e sin ω_e t)`, from exact Lehmann data.
pub fn exact_rgf_spectral(
    spectral: &SpectralData,
    readout: &PauliString,
    kick: &PauliString,
    times: &[f64],
) -> Result<OracleTrace> {
    let terms = lehmann_overlaps(spectral, readout, kick)?;
    let values = times
        .iter()
        .map(|&t| {
            let v: f64 = terms.iter().map(|e| e.b * (e.omega * t).cos() - e.a * (e.omega * t).sin()).sum();
            Complex64::new(v, 0.0)
        })
        .collect();
    Ok(OracleTrace { times: times.to_vec(), values, source: OracleSource::Spectral })
}

/// `<ψ| e^{iHt} Q e^{-iHt} K |ψ>` by dense diagonalization of `H`.
pub fn dynamical_correlation(
    terms: &HamiltonianTerms,
    initial: &StateVector,
    readout: &PauliString,
    kick: &PauliString,
    times: &[f64],
) -> Result<Vec<Complex64>> {
    let n = terms.n_qubits();
    check_ops(n, &[readout, kick])?;
    let eig = SymmetricEigen::new(dense_hamiltonian(terms));
    let v = &eig.eigenvectors;
    let psi = DVector::from_column_slice(initial.amplitudes());
    let kpsi = DVector::from_vec(apply(kick, initial.amplitudes()));
    // Σ_{e,f} conj(u_e) e^{iE_e t} (V†QV)_{ef} e^{-iE_f t} w_f with u = V†ψ, w = V†Kψ.
    let u = v.ad_mul(&psi);
    let w = v.ad_mul(&kpsi);
    let qv = {
        let mut m = nalgebra::DMatrix::zeros(v.nrows(), v.ncols());
        for j in 0..v.ncols() {
            let col: Vec<Complex64> = v.column(j).iter().copied().collect();
            m.set_column(j, &DVector::from_vec(apply(readout, &col)));
        }
        v.ad_mul(&m)
    };
    Ok(times
        .iter()
        .map(|&t| {
            let left: DVector<Complex64> =
                DVector::from_fn(u.len(), |e, _| u[e] * Complex64::from_polar(1.0, -eig.eigenvalues[e] * t));
            let right: DVector<Complex64> =
                DVector::from_fn(w.len(), |f, _| w[f] * Complex64::from_polar(1.0, -eig.eigenvalues[f] * t));
            left.dotc(&(&qv * right))
        })
        .collect())
}

fn check_circuit(plan: &TrotterPlan, terms: &HamiltonianTerms, initial: &StateVector, kick: &PauliString, obs: &PauliString) -> Result<()> {
    plan.validate()?;
    let n = terms.n_qubits();
    check_ops(n, &[kick, obs])?;
    if initial.n_qubits() != n {
        return Err(Error::SizeMismatch { expected: n, got: initial.n_qubits() });
    }
    Ok(())
}

/// Derivative at zero angle of `<Q>` after the circuit
/// `U^{N-n̄} exp(-iθK/2) [U^{n̄}] |ψ>`, which is `Im <Vφ| Q |V K φ>` with
/// `φ` the state at the kick and `V = U^{N-n̄}`.
pub fn exact_trotter_rgf(
    plan: &TrotterPlan,
    terms: &HamiltonianTerms,
    initial: &StateVector,
    kick: &PauliString,
    obs: &PauliString,
    n_bar: usize,
    prefix: Prefix,
) -> Result<f64> {
    check_circuit(plan, terms, initial, kick, obs)?;
    if n_bar >= plan.steps {
        return Err(Error::InvalidPerturbation(format!(
            "kick before step {n_bar} cannot precede a readout after {} steps",
            plan.steps
        )));
    }
    let stepper = Stepper::new(terms, plan.tau());
    let mut phi = initial.amplitudes().to_vec();
    if prefix == Prefix::Evolved {
        for _ in 0..n_bar {
            stepper.forward(&mut phi);
        }
    }
    let mut kphi = apply(kick, &phi);
    for _ in n_bar..plan.steps {
        stepper.forward(&mut phi);
        stepper.forward(&mut kphi);
    }
    Ok(inner(&phi, &apply(obs, &kphi)).im)
}

/// Derivative with respect to every slot of the all-slot template (a
/// kick before each step, nothing elided), in slot order, by one forward
/// and one backward sweep: `g_k = Im <χ_k| K |ψ_k>` with `ψ_k = U^k ψ`
/// and `χ_k = U^{-(N-k)} Q U^N ψ`.
pub fn exact_trotter_gradient(
    plan: &TrotterPlan,
    terms: &HamiltonianTerms,
    initial: &StateVector,
    kick: &PauliString,
    obs: &PauliString,
) -> Result<Vec<f64>> {
    check_circuit(plan, terms, initial, kick, obs)?;
    let stepper = Stepper::new(terms, plan.tau());
    let mut psi = initial.amplitudes().to_vec();
    for _ in 0..plan.steps {
        stepper.forward(&mut psi);
    }
    let mut chi = apply(obs, &psi);
    let mut g = vec![0.0; plan.steps];
    for k in (0..plan.steps).rev() {
        stepper.backward(&mut psi);
        stepper.backward(&mut chi);
        g[k] = inner(&chi, &apply(kick, &psi)).im;
    }
    Ok(g)
}

/// Response at separations `τ, 2τ, ..., Nτ`.
///
/// With [`Prefix::Elided`] every point is a kick on the initial state
/// followed by `m` steps; with [`Prefix::Evolved`] the points are the
/// all-slot gradient read from the last slot backwards.
pub fn exact_trotter_trace(
    plan: &TrotterPlan,
    terms: &HamiltonianTerms,
    initial: &StateVector,
    kick: &PauliString,
    obs: &PauliString,
    prefix: Prefix,
) -> Result<OracleTrace> {
    check_circuit(plan, terms, initial, kick, obs)?;
    let times: Vec<f64> = (1..=plan.steps).map(|m| plan.time(m)).collect();
    let values: Vec<f64> = match prefix {
        Prefix::Evolved => {
            let mut g = exact_trotter_gradient(plan, terms, initial, kick, obs)?;
            g.reverse();
            g
        }
        Prefix::Elided => {
            let stepper = Stepper::new(terms, plan.tau());
            let mut phi = initial.amplitudes().to_vec();
            let mut kphi = apply(kick, &phi);
            (0..plan.steps)
                .map(|_| {
                    stepper.forward(&mut phi);
                    stepper.forward(&mut kphi);
                    inner(&phi, &apply(obs, &kphi)).im
                })
                .collect()
        }
    };
    Ok(OracleTrace {
        times,
        values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        source: OracleSource::DenseTrotter,
    })
}
