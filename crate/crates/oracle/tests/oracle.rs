use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgf_core::estimators::{
    estimate_lcp, estimate_scp, EstimatorConfig, FermionicSetup, Shots,
};
use rgf_core::models::{
    build_heisenberg_terms, build_hubbard_terms_jw, ground_state_exact, lower_wide_rotations, Boundary, HamiltonianTerms,
    HubbardSpec, Species, SpinChainSpec, TrotterPlan,
};
use rgf_core::perturbations::{build_lcp_template, build_scp_template, kick_site};
use rgf_core::qsim::{Gate, NoiseScope, NoiseSpec, Pauli, PauliString, RngStream, StateVector};
use rgf_oracle::*;

fn heisenberg(l: usize, boundary: Boundary) -> (HamiltonianTerms, StateVector, rgf_core::models::SpectralData) {
    let terms = build_heisenberg_terms(&SpinChainSpec::new(l, boundary)).unwrap();
    let (psi, spectral) = ground_state_exact(&terms).unwrap();
    (terms, psi, spectral)
}

fn site(n: usize, q: usize, p: Pauli) -> PauliString {
    kick_site(n, q, p).unwrap()
}

fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn sorted_eigenvalues(m: nalgebra::DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn hubbard_qubit_hamiltonian_matches_fock_space_construction() {
    for (sites, boundary) in [(2, Boundary::Open), (3, Boundary::Open), (3, Boundary::Periodic), (4, Boundary::Periodic)] {
        let spec = HubbardSpec::new(sites, 1.0, 5.0, boundary);
        let terms = build_hubbard_terms_jw(&spec).unwrap();
        let qubit = terms.dense().map(|c| c.re);
        assert!(terms.dense().iter().all(|c| c.im.abs() < 1e-14));
        let a = sorted_eigenvalues(qubit);
        let b = sorted_eigenvalues(hubbard_fock_hamiltonian(&spec).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9, "{sites} sites {boundary:?}: {x} vs {y}");
        }
    }
}

#[test]
fn spectral_oracle_is_imaginary_part_of_dense_correlation() {
    let (terms, psi, spectral) = heisenberg(4, Boundary::Periodic);
    let times: Vec<f64> = (0..25).map(|k| 0.13 * k as f64).collect();
    for (q, k) in [(site(4, 1, Pauli::X), site(4, 0, Pauli::X)), (site(4, 2, Pauli::Z), site(4, 0, Pauli::Z)), (site(4, 0, Pauli::Y), site(4, 3, Pauli::Y))] {
        let s = exact_rgf_spectral(&spectral, &q, &k, &times).unwrap();
        let c = dynamical_correlation(&terms, &psi, &q, &k, &times).unwrap();
        for (a, b) in s.values.iter().zip(&c) {
            assert!((a.re - b.im).abs() < 1e-10, "{a} vs {b}");
        }
        assert!(s.values[0].norm() < 1e-12);
    }
    let id = PauliString::identity(4);
    let s = exact_rgf_spectral(&spectral, &id, &id, &times).unwrap();
    assert!(s.values.iter().all(|v| v.norm() < 1e-12));
}

#[test]
fn trotter_oracle_converges_to_spectral_with_slope_one() {
    let (terms, psi, spectral) = heisenberg(4, Boundary::Open);
    let (q, k) = (site(4, 1, Pauli::X), site(4, 0, Pauli::X));
    let t = 1.5;
    let exact = exact_rgf_spectral(&spectral, &q, &k, &[t]).unwrap().values[0].re;
    let steps = [64usize, 128, 256, 512];
    let mut taus = Vec::new();
    let mut errors = Vec::new();
    for &n in &steps {
        let plan = TrotterPlan::new(t, n).unwrap();
        let g = exact_trotter_rgf(&plan, &terms, &psi, &k, &q, 0, Prefix::Evolved).unwrap();
        taus.push(plan.tau());
        errors.push((g - exact).abs());
    }
    let slope = log_slope(&taus, &errors);
    assert!((slope - 1.0).abs() < 0.15, "slope {slope}, errors {errors:?}");
}

#[test]
fn kick_after_readout_is_rejected() {
    let (terms, psi, _) = heisenberg(3, Boundary::Open);
    let plan = TrotterPlan::new(1.0, 4).unwrap();
    let x = site(3, 0, Pauli::X);
    assert!(exact_trotter_rgf(&plan, &terms, &psi, &x, &x, 4, Prefix::Evolved).is_err());
}

#[test]
fn register_limit_is_enforced() {
    let terms = build_heisenberg_terms(&SpinChainSpec::new(13, Boundary::Open)).unwrap();
    let psi = StateVector::zero(13);
    let plan = TrotterPlan::new(1.0, 2).unwrap();
    let x = site(13, 0, Pauli::X);
    assert!(matches!(
        exact_trotter_gradient(&plan, &terms, &psi, &x, &x),
        Err(rgf_core::Error::RegisterTooLarge { .. })
    ));
}

#[test]
fn free_fermions_match_one_body_propagator() {
    let times: Vec<f64> = (0..20).map(|k| 0.31 * k as f64).collect();
    let mut cases = vec![HubbardSpec::new(4, 1.0, 0.0, Boundary::Open), HubbardSpec::new(3, 0.7, 0.0, Boundary::Periodic)];
    cases[1].filling = Some([1, 1]);
    for spec in &cases {
        for (r_read, r_kick) in [(0, 0), (1, 0), (2, 1)] {
            let g = exact_fermionic_gf(spec, r_read, r_kick, Species::Up, &times).unwrap();
            let want = free_fermion_gf(spec, r_read, r_kick, &times).unwrap();
            for (a, b) in g.values.iter().zip(&want) {
                assert!((a - b).norm() < 1e-8, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn fermionic_equal_time_anticommutator() {
    let spec = HubbardSpec::new(4, 1.0, 5.0, Boundary::Periodic);
    for species in [Species::Up, Species::Down] {
        let on = exact_fermionic_gf(&spec, 2, 2, species, &[0.0]).unwrap();
        assert!((on.values[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let off = exact_fermionic_gf(&spec, 1, 2, species, &[0.0]).unwrap();
        assert!(off.values[0].norm() < 1e-12);
    }
}

#[test]
fn trotterized_fermionic_oracle_approaches_continuum() {
    let spec = HubbardSpec::new(4, 1.0, 5.0, Boundary::Periodic);
    let setup = FermionicSetup {
        spec: spec.clone(),
        readout_site: 1,
        kick_site: 0,
        species: Species::Up,
        plan: TrotterPlan::new(1.0, 8).unwrap(),
        noise: None,
    };
    let (psi, _) = setup.ground_state().unwrap();
    let exact = exact_fermionic_gf(&spec, 1, 0, Species::Up, &[1.0]).unwrap().values[0];
    let mut errors = Vec::new();
    for n in [50usize, 100, 200] {
        let plan = TrotterPlan::new(1.0, n).unwrap();
        let tr = exact_trotter_fermionic_gf(&spec, &plan, &psi, 1, 0, Species::Up).unwrap();
        errors.push((tr.values[n - 1] - exact).norm());
    }
    assert!(errors[2] < 0.02 && errors[2] < errors[1] && errors[1] < errors[0], "{errors:?}");
}

/// Gates of one noisy run of a single-slot template, lowered the same way
/// as the trajectory simulator for the two-qubit-gate scope.
fn noisy_circuit(terms: &HamiltonianTerms, plan: TrotterPlan, kick: &PauliString, angle: f64) -> Vec<Gate> {
    let step = rgf_core::models::trotter_step_circuit(terms, plan.tau()).unwrap();
    let mut gates = vec![Gate::rotation(kick.clone(), angle).unwrap()];
    for _ in 0..plan.steps {
        gates.extend(lower_wide_rotations(&step, terms.n_qubits()).unwrap());
    }
    gates
}

#[test]
fn noise_trajectories_average_to_density_matrix() {
    let heis = build_heisenberg_terms(&SpinChainSpec::new(3, Boundary::Open)).unwrap();
    let hub = build_hubbard_terms_jw(&HubbardSpec::new(3, 1.0, 2.0, Boundary::Periodic)).unwrap();
    for (terms, obs) in [(heis, site(3, 2, Pauli::X)), (hub, site(6, 4, Pauli::Z))] {
        let n = terms.n_qubits();
        let plan = TrotterPlan::new(1.0, 3).unwrap();
        let kick = site(n, 0, Pauli::X);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let initial = StateVector::random(n, &mut rng);
        let gamma = 0.15;
        let angle = 0.7;
        let exact = noisy_expectation(&noisy_circuit(&terms, plan, &kick, angle), gamma, &initial, &obs).unwrap();
        let clean = noisy_expectation(&noisy_circuit(&terms, plan, &kick, angle), 0.0, &initial, &obs).unwrap();
        let template = build_lcp_template(plan, &terms, &kick, 0, &obs)
            .unwrap()
            .with_noise(NoiseSpec::new(gamma, NoiseScope::TwoQubitGates).unwrap())
            .unwrap();
        let trajectories = 20_000;
        let mut rng = RngStream::new(5, 0).rng();
        let samples: Vec<f64> = (0..trajectories)
            .map(|_| template.evolve_noisy(&initial, &[angle], &mut rng).unwrap().expectation_pauli(&obs).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / trajectories as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trajectories as f64 - 1.0);
        let err = (var / trajectories as f64).sqrt();
        assert!((mean - exact).abs() < 4.0 * err + 1e-12, "{n} qubits: {mean} vs {exact} ± {err}");
        assert!((clean - exact).abs() > 5.0 * err, "noise should be visible: {clean} vs {exact}");
        let noiseless = template_clean(&terms, plan, &kick, &obs, &initial, angle);
        assert!((noiseless - clean).abs() < 1e-10);
    }
}

fn template_clean(terms: &HamiltonianTerms, plan: TrotterPlan, kick: &PauliString, obs: &PauliString, initial: &StateVector, angle: f64) -> f64 {
    let template = build_lcp_template(plan, terms, kick, 0, obs).unwrap();
    template.evolve(initial, &[angle]).unwrap().expectation_pauli(obs).unwrap()
}

#[test]
fn parameter_shift_equals_analytic_trotter_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for l in [2usize, 3, 4] {
        let (terms, psi, _) = heisenberg(l, Boundary::Periodic);
        let plan = TrotterPlan::new(2.0, 8).unwrap();
        for _ in 0..10 {
            let n_bar = rng.gen_range(0..plan.steps);
            let axes = [Pauli::X, Pauli::Y, Pauli::Z];
            let kick = site(l, rng.gen_range(0..l), axes[rng.gen_range(0..3)]);
            let obs = site(l, rng.gen_range(0..l), axes[rng.gen_range(0..3)]);
            for (prefix, elide) in [(Prefix::Evolved, false), (Prefix::Elided, true)] {
                let mut template = build_lcp_template(plan, &terms, &kick, n_bar, &obs).unwrap();
                if elide {
                    template = template.elided();
                }
                let got = estimate_lcp(&template, &psi, Shots::Exact, &mut rng).unwrap().values[0];
                let want = exact_trotter_rgf(&plan, &terms, &psi, &kick, &obs, n_bar, prefix).unwrap();
                assert!((got - want).abs() < 1e-10, "L={l} n̄={n_bar}: {got} vs {want}");
            }
        }
    }
}

fn scp_setup(l: usize, steps: usize) -> (HamiltonianTerms, StateVector, TrotterPlan, PauliString, PauliString) {
    let (terms, psi, _) = heisenberg(l, Boundary::Open);
    let plan = TrotterPlan::new(1.0, steps).unwrap();
    (terms, psi, plan, site(l, 0, Pauli::X), site(l, l - 1, Pauli::X))
}

#[test]
fn scp_directions_converge_to_directional_derivative() {
    for (l, steps) in [(2usize, 2usize), (3, 6)] {
        let (terms, psi, plan, kick, obs) = scp_setup(l, steps);
        let grad = exact_trotter_gradient(&plan, &terms, &psi, &kick, &obs).unwrap();
        let template = build_scp_template(plan, &terms, &kick, &obs).unwrap();
        let mut config = EstimatorConfig::scp(16, 1, 1e-5, 9);
        config.exact_expectations = true;
        let run = estimate_scp(&template, &psi, &config).unwrap();
        for p in 0..run.directions() {
            let eta = run.eta(p);
            let want: f64 = grad.iter().zip(&eta).map(|(g, e)| g * e).sum();
            assert!((run.difference(p, 0) - want).abs() < 1e-8, "{} vs {want}", run.difference(p, 0));
        }
    }
}

#[test]
fn scp_bias_is_second_order_in_epsilon() {
    let (terms, psi, plan, kick, obs) = scp_setup(3, 6);
    let grad = exact_trotter_gradient(&plan, &terms, &psi, &kick, &obs).unwrap();
    let template = build_scp_template(plan, &terms, &kick, &obs).unwrap();
    let eps = [0.2, 0.1, 0.05];
    let bias: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let mut config = EstimatorConfig::scp(64, 1, e, 4);
            config.exact_expectations = true;
            let run = estimate_scp(&template, &psi, &config).unwrap();
            (0..run.directions())
                .map(|p| {
                    let want: f64 = grad.iter().zip(run.eta(p)).map(|(g, e)| g * e).sum();
                    (run.difference(p, 0) - want).abs()
                })
                .sum::<f64>()
                / run.directions() as f64
        })
        .collect();
    let slope = log_slope(&eps, &bias);
    assert!((slope - 2.0).abs() < 0.2, "slope {slope}, bias {bias:?}");
}

#[test]
fn scp_mean_matches_exhaustive_direction_average() {
    let (terms, psi, plan, kick, obs) = scp_setup(3, 6);
    let template = build_scp_template(plan, &terms, &kick, &obs).unwrap();
    let eps = 0.4;
    let f = |eta: &[f64], sign: f64| {
        let angles: Vec<f64> = eta.iter().map(|e| sign * eps * e).collect();
        template.evolve(&psi, &angles).unwrap().expectation_pauli(&obs).unwrap()
    };
    let mut mean = vec![0.0; plan.steps];
    for bits in 0..1u32 << plan.steps {
        let eta: Vec<f64> = (0..plan.steps).map(|k| if bits >> k & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let d = (f(&eta, 1.0) - f(&eta, -1.0)) / (2.0 * eps);
        for k in 0..plan.steps {
            mean[k] += eta[k] * d / (1u32 << plan.steps) as f64;
        }
    }
    let want = scp_expected_gradient(&plan, &terms, &psi, &kick, &obs, eps).unwrap();
    for k in 0..plan.steps {
        assert!((mean[k] - want[k]).abs() < 1e-12, "{k}: {} vs {}", mean[k], want[k]);
    }
    let grad = exact_trotter_gradient(&plan, &terms, &psi, &kick, &obs).unwrap();
    let small = scp_expected_gradient(&plan, &terms, &psi, &kick, &obs, 1e-4).unwrap();
    for k in 0..plan.steps {
        assert!((small[k] - grad[k]).abs() < 1e-7);
    }
}

#[test]
fn elided_and_evolved_traces_agree_for_eigenstates_at_small_tau() {
    let (terms, psi, spectral) = heisenberg(4, Boundary::Periodic);
    let plan = TrotterPlan::new(1.0, 200).unwrap();
    let (k, q) = (site(4, 0, Pauli::Z), site(4, 1, Pauli::Z));
    let a = exact_trotter_trace(&plan, &terms, &psi, &k, &q, Prefix::Elided).unwrap();
    let b = exact_trotter_trace(&plan, &terms, &psi, &k, &q, Prefix::Evolved).unwrap();
    let s = exact_rgf_spectral(&spectral, &q, &k, &a.times).unwrap();
    for i in 0..a.len() {
        assert!((a.values[i].re - s.values[i].re).abs() < 0.05);
        assert!((b.values[i].re - s.values[i].re).abs() < 0.05);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_components_equal_single_slot_derivatives(
        seed in 0u64..1000,
        l in 2usize..5,
        steps in 1usize..6,
        axes in (0usize..3, 0usize..3),
    ) {
        let terms = build_heisenberg_terms(&SpinChainSpec::new(l, Boundary::Open)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(l, &mut rng);
        let plan = TrotterPlan::new(0.9, steps).unwrap();
        let labels = [Pauli::X, Pauli::Y, Pauli::Z];
        let kick = site(l, 0, labels[axes.0]);
        let obs = site(l, l - 1, labels[axes.1]);
        let grad = exact_trotter_gradient(&plan, &terms, &psi, &kick, &obs).unwrap();
        for (n_bar, g) in grad.iter().enumerate() {
            let single = exact_trotter_rgf(&plan, &terms, &psi, &kick, &obs, n_bar, Prefix::Evolved).unwrap();
            prop_assert!((g - single).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_trace_is_odd_for_hermitian_same_axis_pairs(t in 0.0f64..6.0, r in 0usize..4) {
        let (_, _, spectral) = heisenberg(4, Boundary::Periodic);
        let q = site(4, r, Pauli::X);
        let k = site(4, 0, Pauli::X);
        let f = exact_rgf_spectral(&spectral, &q, &k, &[t, -t]).unwrap();
        prop_assert!((f.values[0].re + f.values[1].re).abs() < 1e-10);
    }
}

#[test]
fn noisy_gradient_matches_finite_differences_of_density_matrix() {
    let terms = build_hubbard_terms_jw(&HubbardSpec::new(2, 1.0, 3.0, Boundary::Open)).unwrap();
    let n = terms.n_qubits();
    let plan = TrotterPlan::new(1.0, 3).unwrap();
    let step = lower_wide_rotations(&rgf_core::models::trotter_step_circuit(&terms, plan.tau()).unwrap(), n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let initial = StateVector::random(n, &mut rng);
    let obs = site(n, 1, Pauli::X);
    for kick in [site(n, 0, Pauli::Y), PauliString::from_factors(n, &[(0, Pauli::Z), (1, Pauli::X)]).unwrap()] {
        let gamma = 0.1;
        let g = noisy_trotter_gradient(&step, plan.steps, &initial, &kick, &obs, gamma).unwrap();
        let h = 1e-4;
        for k in 0..plan.steps {
            let circuit = |theta: f64| {
                let mut gates = Vec::new();
                for j in 0..plan.steps {
                    let a = if j == k { theta } else { 0.0 };
                    gates.push(Gate::rotation(kick.clone(), a).unwrap());
                    gates.extend(step.iter().cloned());
                }
                noisy_expectation(&gates, gamma, &initial, &obs).unwrap()
            };
            let fd = (circuit(h) - circuit(-h)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6, "slot {k}: {fd} vs {}", g[k]);
        }
        let clean = noisy_trotter_gradient(&step, plan.steps, &initial, &kick, &obs, 0.0).unwrap();
        let want = exact_trotter_gradient(&plan, &terms, &initial, &kick, &obs).unwrap();
        for (a, b) in clean.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
