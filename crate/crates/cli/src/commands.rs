use std::f64::consts::FRAC_PI_2;

use rgf_core::estimators::{
    estimate_fd, estimate_fermionic_gf, estimate_lcp, estimate_scp, lcp_point_variance, predicted_variance,
    ComplexTrace, EstimatorConfig, EstimatorMode, FermionicSetup, GreenTrace, LocalPoint, Shots, TraceMeta,
    VarianceModel,
};
use rgf_core::models::{
    build_heisenberg_terms, build_hubbard_terms_jw, ground_state_exact, ground_state_in_sector, lehmann_overlaps,
    HamiltonianTerms, HubbardSpec, SpinChainSpec, TrotterPlan,
};
use rgf_core::perturbations::{build_lcp_template, build_scp_template, kick_site, CircuitTemplate};
use rgf_core::qsim::{PauliString, RngStream, StateVector};
use rgf_core::spectra::{assemble_dsf, fit_sinusoids_bic, FitOptions, SpectralModel};
use rgf_oracle::{
    exact_fermionic_gf, exact_rgf_spectral, exact_trotter_fermionic_gf, exact_trotter_gradient, exact_trotter_trace,
    OracleTrace, Prefix,
};
use serde::Serialize;

use crate::config::{Axis, ModelConfig, RunConfig};
use crate::output::{dsf_csv, num, trace_csv, FileEntry, OutputDir};
use crate::CliError;

type CliResult<T> = Result<T, CliError>;

struct Spin {
    terms: HamiltonianTerms,
    psi: StateVector,
}

fn spin(spec: &SpinChainSpec) -> CliResult<Spin> {
    let terms = build_heisenberg_terms(spec)?;
    let (psi, _) = ground_state_exact(&terms)?;
    Ok(Spin { terms, psi })
}

fn heisenberg(config: &RunConfig) -> CliResult<&SpinChainSpec> {
    match &config.model {
        ModelConfig::Heisenberg(s) => Ok(s),
        ModelConfig::Hubbard(_) => Err(CliError::config("this command needs model.kind = \"heisenberg\"")),
    }
}

fn single(n: usize, site: usize, axis: Axis) -> CliResult<PauliString> {
    Ok(kick_site(n, site, axis.pauli())?)
}

/// Seed of the `index`-th independent experiment of a run.
fn group_seed(seed: u64, index: u64) -> u64 {
    RngStream::new(seed, 0).family(index + 1).seed
}

/// One kick with every readout site measured jointly.
struct SpinGroup {
    kick_site: usize,
    kick_axis: Axis,
    readout_axis: Axis,
    kick: PauliString,
    readouts: Vec<(usize, PauliString)>,
}

fn spin_groups(config: &RunConfig, n: usize) -> CliResult<Vec<SpinGroup>> {
    let obs = &config.observables;
    let mut out = Vec::new();
    for &r in &obs.kick_sites {
        for &beta in &obs.kick_axes {
            for &alpha in &obs.readout_axes {
                let readouts =
                    obs.readout_sites.iter().map(|&s| Ok((s, single(n, s, alpha)?))).collect::<CliResult<_>>()?;
                out.push(SpinGroup { kick_site: r, kick_axis: beta, readout_axis: alpha, kick: single(n, r, beta)?, readouts });
            }
        }
    }
    Ok(out)
}

fn spin_name(prefix: &str, g: &SpinGroup, readout_site: usize) -> String {
    format!("{prefix}_{}{}_R{readout_site}_r{}.csv", g.readout_axis.label(), g.kick_axis.label(), g.kick_site)
}

fn with_readouts(mut t: CircuitTemplate, readouts: &[(usize, PauliString)], config: &RunConfig) -> CliResult<CircuitTemplate> {
    t = t.with_observables(readouts[1..].iter().map(|(_, p)| p.clone()))?;
    if let Some(noise) = config.noise {
        t = t.with_noise(noise)?;
    }
    Ok(t)
}

/// A single-slot estimate at every kick step, as traces over the
/// kick-to-readout separation.
fn local_traces(
    config: &RunConfig,
    plan: TrotterPlan,
    terms: &HamiltonianTerms,
    psi: &StateVector,
    kick: &PauliString,
    readouts: &[(usize, PauliString)],
    mode: EstimatorMode,
    seed: u64,
) -> CliResult<Vec<GreenTrace>> {
    let est = config.estimator()?.config(mode, seed);
    est.validate()?;
    let shots = est.local_shots(plan.steps);
    let mut points: Vec<(f64, LocalPoint)> = Vec::with_capacity(plan.steps);
    for n_bar in 0..plan.steps {
        let template = build_lcp_template(plan, terms, kick, n_bar, &readouts[0].1)?.elided();
        let template = with_readouts(template, readouts, config)?;
        let mut rng = RngStream::new(seed, n_bar as u64).rng();
        let p = match mode {
            EstimatorMode::Lcp => estimate_lcp(&template, psi, shots, &mut rng)?,
            EstimatorMode::Fd => estimate_fd(&template, psi, est.epsilon, shots, &mut rng)?,
            EstimatorMode::Scp => unreachable!("local traces are LCP or FD"),
        };
        points.push((plan.time(plan.steps - n_bar), p));
    }
    points.reverse();
    let times: Vec<f64> = points.iter().map(|p| p.0).collect();
    readouts
        .iter()
        .enumerate()
        .map(|(o, (_, obs))| {
            let meta = TraceMeta {
                readout: obs.to_string(),
                kick: kick.to_string(),
                estimator: format!("{mode:?}").to_lowercase(),
                model: config.model.name().into(),
            };
            Ok(GreenTrace::new(
                times.clone(),
                points.iter().map(|p| p.1.values[o]).collect(),
                points.iter().map(|p| p.1.std_errors[o]).collect(),
                meta,
            )?)
        })
        .collect()
}

fn scp_traces(
    config: &RunConfig,
    plan: TrotterPlan,
    sys: &Spin,
    g: &SpinGroup,
    seed: u64,
) -> CliResult<Vec<GreenTrace>> {
    let est = config.estimator()?.config(EstimatorMode::Scp, seed);
    let template = build_scp_template(plan, &sys.terms, &g.kick, &g.readouts[0].1)?;
    let template = with_readouts(template, &g.readouts, config)?;
    let samples = estimate_scp(&template, &sys.psi, &est)?;
    let mut traces = samples.traces()?;
    for t in &mut traces {
        t.meta.model = config.model.name().into();
    }
    Ok(traces)
}

fn fermionic_setups(config: &RunConfig, spec: &HubbardSpec) -> Vec<(usize, usize, FermionicSetup)> {
    let obs = &config.observables;
    let plan = config.plan.plan().expect("validated plan");
    let mut out = Vec::new();
    for &r in &obs.kick_sites {
        for &big_r in &obs.readout_sites {
            let setup = FermionicSetup {
                spec: spec.clone(),
                readout_site: big_r,
                kick_site: r,
                species: obs.species,
                plan,
                noise: config.noise,
            };
            out.push((big_r, r, setup));
        }
    }
    out
}

fn species_label(config: &RunConfig) -> &'static str {
    match config.observables.species {
        rgf_core::models::Species::Up => "up",
        rgf_core::models::Species::Down => "down",
    }
}

fn write_complex(out: &mut OutputDir, stem: &str, trace: &ComplexTrace) -> CliResult<()> {
    out.write(&format!("{stem}_re.csv"), &trace_csv(&trace.real))?;
    out.write(&format!("{stem}_im.csv"), &trace_csv(&trace.imag))
}

/// Fermionic Green's function from single-slot circuits of the four
/// commutator families.
fn fermionic_local(config: &RunConfig, setup: &FermionicSetup, seed: u64) -> CliResult<ComplexTrace> {
    let (psi, lambda) = setup.ground_state()?;
    let terms = build_hubbard_terms_jw(&setup.spec)?;
    let families = setup.families(lambda)?;
    let plan = setup.plan;
    let n = plan.steps;
    let (mut re, mut im, mut vre, mut vim) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut times = Vec::new();
    for (i, f) in families.iter().enumerate() {
        let part = local_traces(
            config,
            plan,
            &terms,
            &psi,
            &f.kick,
            &[(setup.readout_site, f.readout.clone())],
            EstimatorMode::Lcp,
            group_seed(seed, i as u64),
        )?
        .remove(0);
        for k in 0..n {
            re[k] += f.weight.re * part.values[k];
            im[k] += f.weight.im * part.values[k];
            vre[k] += (f.weight.re * part.std_errors[k]).powi(2);
            vim[k] += (f.weight.im * part.std_errors[k]).powi(2);
        }
        times = part.times;
    }
    let meta = |p: &str| TraceMeta { readout: format!("{p} a_R"), kick: "a†_r".into(), estimator: "lcp".into(), model: "hubbard".into() };
    let sqrt = |v: Vec<f64>| v.into_iter().map(f64::sqrt).collect::<Vec<_>>();
    Ok(ComplexTrace {
        real: GreenTrace::new(times.clone(), re, sqrt(vre), meta("re"))?,
        imag: GreenTrace::new(times, im, sqrt(vim), meta("im"))?,
    })
}

/// `lcp`, `fd` and `scp`: one CSV per `(R, r, α, β)` trace.
pub fn run_traces(config: &RunConfig, mode: EstimatorMode) -> CliResult<Vec<FileEntry>> {
    config.validate()?;
    let est = config.estimator()?.config(mode, config.seed);
    est.validate()?;
    let plan = config.plan.plan()?;
    let label = format!("{mode:?}").to_lowercase();
    let mut out = OutputDir::create(&config.outputs)?;
    match &config.model {
        ModelConfig::Heisenberg(spec) => {
            let sys = spin(spec)?;
            for (i, g) in spin_groups(config, spec.length)?.iter().enumerate() {
                let seed = group_seed(config.seed, i as u64);
                let traces = match mode {
                    EstimatorMode::Scp => scp_traces(config, plan, &sys, g, seed)?,
                    _ => local_traces(config, plan, &sys.terms, &sys.psi, &g.kick, &g.readouts, mode, seed)?,
                };
                for ((site, _), t) in g.readouts.iter().zip(&traces) {
                    out.write(&spin_name(&label, g, *site), &trace_csv(t))?;
                }
            }
        }
        ModelConfig::Hubbard(spec) => {
            if mode == EstimatorMode::Fd {
                return Err(CliError::config(
                    "fd is unavailable for hubbard models: the fermionic kick needs both quadratures, use lcp or scp",
                ));
            }
            for (i, (big_r, r, setup)) in fermionic_setups(config, spec).iter().enumerate() {
                let seed = group_seed(config.seed, i as u64);
                let trace = match mode {
                    EstimatorMode::Scp => estimate_fermionic_gf(setup, &EstimatorConfig { seed, ..est.clone() })?.trace(est.perturbations())?,
                    _ => fermionic_local(config, setup, seed)?,
                };
                write_complex(&mut out, &format!("{label}_{}_R{big_r}_r{r}", species_label(config)), &trace)?;
            }
        }
    }
    out.finish(&label, config)
}

#[derive(Debug, Serialize)]
struct GroundStateReport {
    model: &'static str,
    n_qubits: usize,
    energy: f64,
    /// Parity eigenvalue of a Hubbard ground state.
    parity: Option<f64>,
    /// `<σ^α_r>` for each readout axis and site.
    expectations: Vec<(char, usize, f64)>,
}

/// `ground-state`: energy and single-site expectations.
pub fn run_ground_state(config: &RunConfig) -> CliResult<Vec<FileEntry>> {
    config.validate()?;
    let n = config.model.n_qubits();
    let (psi, energy, parity) = match &config.model {
        ModelConfig::Heisenberg(spec) => {
            let terms = build_heisenberg_terms(spec)?;
            let (psi, spectral) = ground_state_exact(&terms)?;
            (psi, spectral.ground_energy(), None)
        }
        ModelConfig::Hubbard(spec) => {
            let terms = build_hubbard_terms_jw(spec)?;
            let (psi, energy) = ground_state_in_sector(&terms, &spec.sector())?;
            let parity = psi.expectation_pauli(&spec.parity())?;
            (psi, energy, Some(parity))
        }
    };
    let mut expectations = Vec::new();
    for &a in &config.observables.readout_axes {
        for q in 0..n {
            expectations.push((a.label(), q, psi.expectation_pauli(&single(n, q, a)?)?));
        }
    }
    let mut out = OutputDir::create(&config.outputs)?;
    out.write_json("ground_state.json", &GroundStateReport { model: config.model.name(), n_qubits: n, energy, parity, expectations })?;
    out.finish("ground-state", config)
}

fn oracle_csv(times: &[f64], values: &[f64]) -> String {
    let zeros = vec![0.0; times.len()];
    let t = GreenTrace::new(times.to_vec(), values.to_vec(), zeros, TraceMeta::default()).expect("oracle grid is valid");
    trace_csv(&t)
}

fn write_oracle(out: &mut OutputDir, stem: &str, trace: &OracleTrace, complex: bool) -> CliResult<()> {
    if complex {
        out.write(&format!("{stem}_re.csv"), &oracle_csv(&trace.times, &trace.real()))?;
        out.write(&format!("{stem}_im.csv"), &oracle_csv(&trace.times, &trace.imag()))
    } else {
        out.write(&format!("{stem}.csv"), &oracle_csv(&trace.times, &trace.real()))
    }
}

/// `oracle`: exact references for the configured traces, both for the
/// Trotterized SCP circuit and for the continuum Hamiltonian.
pub fn run_oracle(config: &RunConfig) -> CliResult<Vec<FileEntry>> {
    config.validate()?;
    let plan = config.plan.plan()?;
    let mut out = OutputDir::create(&config.outputs)?;
    match &config.model {
        ModelConfig::Heisenberg(spec) => {
            let terms = build_heisenberg_terms(spec)?;
            let (psi, spectral) = ground_state_exact(&terms)?;
            for g in spin_groups(config, spec.length)? {
                for (site, obs) in &g.readouts {
                    let trotter = exact_trotter_trace(&plan, &terms, &psi, &g.kick, obs, Prefix::Evolved)?;
                    let exact = exact_rgf_spectral(&spectral, obs, &g.kick, &trotter.times)?;
                    write_oracle(&mut out, spin_name("oracle_trotter", &g, *site).trim_end_matches(".csv"), &trotter, false)?;
                    write_oracle(&mut out, spin_name("oracle_exact", &g, *site).trim_end_matches(".csv"), &exact, false)?;
                }
            }
        }
        ModelConfig::Hubbard(spec) => {
            for (big_r, r, setup) in fermionic_setups(config, spec) {
                let (psi, _) = setup.ground_state()?;
                let trotter = exact_trotter_fermionic_gf(spec, &plan, &psi, big_r, r, setup.species)?;
                let exact = exact_fermionic_gf(spec, big_r, r, setup.species, &trotter.times)?;
                let s = species_label(config);
                write_oracle(&mut out, &format!("oracle_trotter_{s}_R{big_r}_r{r}"), &trotter, true)?;
                write_oracle(&mut out, &format!("oracle_exact_{s}_R{big_r}_r{r}"), &exact, true)?;
            }
        }
    }
    out.finish("oracle", config)
}

#[derive(Debug, Serialize)]
struct SiteModel {
    displacement: usize,
    readout_site: usize,
    model: SpectralModel,
}

/// Per-displacement spectral models, `models[d]` for readout site
/// `kick_site + d`.
pub fn dsf_models(config: &RunConfig, oracle: bool) -> CliResult<Vec<SpectralModel>> {
    let spec = heisenberg(config)?;
    let l = spec.length;
    if l < 2 {
        return Err(CliError::config("dsf needs a chain of at least two sites"));
    }
    let dsf = config.dsf.as_ref().ok_or_else(|| CliError::config("missing [dsf] table"))?;
    let obs = &config.observables;
    let (alpha, beta, r0) = (obs.readout_axes[0], obs.kick_axes[0], obs.kick_sites[0]);
    let kick = single(l, r0, beta)?;
    let readouts: Vec<(usize, PauliString)> =
        (0..l).map(|d| Ok(((r0 + d) % l, single(l, (r0 + d) % l, alpha)?))).collect::<CliResult<_>>()?;
    if oracle {
        let terms = build_heisenberg_terms(spec)?;
        let (_, spectral) = ground_state_exact(&terms)?;
        return readouts
            .iter()
            .map(|(_, q)| Ok(SpectralModel::from_lehmann(&lehmann_overlaps(&spectral, q, &kick)?)))
            .collect();
    }
    let plan = config.plan.plan()?;
    let sys = spin(spec)?;
    let group = SpinGroup { kick_site: r0, kick_axis: beta, readout_axis: alpha, kick, readouts };
    let traces = scp_traces(config, plan, &sys, &group, group_seed(config.seed, 0))?;
    let options = FitOptions { seed: config.seed, ..FitOptions::new(dsf.max_modes) };
    traces
        .iter()
        .zip(&group.readouts)
        .map(|(t, (site, _))| {
            fit_sinusoids_bic(t, &options).map_err(|e| CliError::Numerical(format!("fit of readout site {site} failed: {e}")))
        })
        .collect()
}

/// `dsf`: fitted structure factor on the configured frequency grid.
pub fn run_dsf(config: &RunConfig, oracle: bool) -> CliResult<Vec<FileEntry>> {
    config.validate()?;
    let models = dsf_models(config, oracle)?;
    let dsf = config.dsf.as_ref().expect("checked by dsf_models");
    let grid = assemble_dsf(&models, dsf.sigma, &dsf.omega_grid())?;
    let l = models.len();
    let r0 = config.observables.kick_sites[0];
    let sites: Vec<SiteModel> = models
        .into_iter()
        .enumerate()
        .map(|(d, model)| SiteModel { displacement: d, readout_site: (r0 + d) % l, model })
        .collect();
    let mut out = OutputDir::create(&config.outputs)?;
    out.write("dsf.csv", &dsf_csv(&grid))?;
    out.write_json("models.json", &sites)?;
    out.finish("dsf", config)
}

/// One row of the variance comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceRow {
    pub estimator: EstimatorMode,
    pub steps: usize,
    pub total_shots: u64,
    /// `S` for SCP, the per-evaluation share `floor(𝒮/N)` for LCP.
    pub shots_per_evaluation: u64,
    /// Mean over time points of the empirical variance of a point.
    pub empirical_variance: f64,
    /// SCP: the `c = 1` model. LCP: the binomial variance at the exact
    /// expectation values.
    pub predicted_variance: f64,
    /// SCP only: the direction-sampling term alone.
    pub floor_variance: Option<f64>,
    /// LCP only: `(1 - <σ>)² / (2 floor(𝒮/N))` with `<σ>` the ground-state
    /// expectation of the readout.
    pub ground_state_form: Option<f64>,
}

fn mean(x: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = x.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

/// Empirical and modelled variances of both estimators over the
/// configured grid of budgets and step counts.
pub fn variance_rows(config: &RunConfig) -> CliResult<Vec<VarianceRow>> {
    config.validate()?;
    let spec = heisenberg(config)?;
    let v = config.variance.as_ref().ok_or_else(|| CliError::config("missing [variance] table"))?;
    let est = config.estimator()?;
    let sys = spin(spec)?;
    let n = spec.length;
    let obs = &config.observables;
    let kick = single(n, obs.kick_sites[0], obs.kick_axes[0])?;
    let readout = single(n, obs.readout_sites[0], obs.readout_axes[0])?;
    let sigma = sys.psi.expectation_pauli(&readout)?;
    let mut rows = Vec::new();
    for (ni, &steps) in v.steps.iter().enumerate() {
        let plan = TrotterPlan::new(config.plan.total_time, steps)?;
        let grad = exact_trotter_gradient(&plan, &sys.terms, &sys.psi, &kick, &readout)?;
        let norm_sq: f64 = grad.iter().map(|g| g * g).sum();
        let scp_template = build_scp_template(plan, &sys.terms, &kick, &readout)?;
        let lcp_indices: Vec<usize> =
            (0..v.lcp_points.min(steps)).map(|i| i * steps / v.lcp_points.min(steps)).collect();
        let exact_shifts: Vec<(f64, f64)> = lcp_indices
            .iter()
            .map(|&n_bar| {
                let t = build_lcp_template(plan, &sys.terms, &kick, n_bar, &readout)?.elided();
                let f = |a: f64| t.evolve(&sys.psi, &[a]).and_then(|s| s.expectation_pauli(&readout));
                Ok((f(FRAC_PI_2)?, f(-FRAC_PI_2)?))
            })
            .collect::<CliResult<_>>()?;
        for (si, &budget) in v.total_shots.iter().enumerate() {
            for (ki, &s) in v.shots_per_perturbation.iter().enumerate() {
                if budget % s != 0 || budget / s < 2 {
                    return Err(CliError::config(format!(
                        "variance: shots_per_perturbation {s} must divide total_shots {budget} at least twice"
                    )));
                }
                let seed = group_seed(config.seed, ((ni * 64 + si) * 64 + ki) as u64);
                let cfg = EstimatorConfig::scp(budget, s, est.epsilon, seed);
                let samples = estimate_scp(&scp_template, &sys.psi, &cfg)?;
                let p = cfg.perturbations();
                let (_, var) = samples.gradient(0, p)?;
                let model = |c: f64, g2: f64| VarianceModel {
                    c_scp: c,
                    perturbations: p as u64,
                    shots_per_perturbation: s,
                    epsilon: est.epsilon,
                    grad_norm_sq: norm_sq,
                    grad_component_sq: g2,
                };
                let predicted = mean(grad.iter().map(|g| predicted_variance(&model(1.0, g * g)).unwrap()));
                let floor = mean(grad.iter().map(|g| model(1.0, g * g).direction_term()));
                rows.push(VarianceRow {
                    estimator: EstimatorMode::Scp,
                    steps,
                    total_shots: budget,
                    shots_per_evaluation: s,
                    empirical_variance: mean(var),
                    predicted_variance: predicted,
                    floor_variance: Some(floor),
                    ground_state_form: None,
                });
            }
            let share = budget / steps as u64;
            if share == 0 {
                continue;
            }
            let seed = group_seed(config.seed, ((ni * 64 + si) * 64 + 63) as u64);
            let mut empirical = Vec::with_capacity(lcp_indices.len());
            for (pi, &n_bar) in lcp_indices.iter().enumerate() {
                let t = build_lcp_template(plan, &sys.terms, &kick, n_bar, &readout)?.elided();
                let mut rng = RngStream::new(seed, pi as u64).rng();
                let values: Vec<f64> = (0..v.repetitions)
                    .map(|_| Ok(estimate_lcp(&t, &sys.psi, Shots::Finite(share), &mut rng)?.values[0]))
                    .collect::<CliResult<_>>()?;
                let m = mean(values.iter().copied());
                empirical.push(values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64);
            }
            let predicted = mean(exact_shifts.iter().map(|&(fp, fm)| {
                (lcp_point_variance(fp, share).unwrap() + lcp_point_variance(fm, share).unwrap()) / 4.0
            }));
            rows.push(VarianceRow {
                estimator: EstimatorMode::Lcp,
                steps,
                total_shots: budget,
                shots_per_evaluation: share,
                empirical_variance: mean(empirical),
                predicted_variance: predicted,
                floor_variance: None,
                ground_state_form: Some((1.0 - sigma).powi(2) / (2 * share) as f64),
            });
        }
    }
    Ok(rows)
}

/// Step count at which the mean LCP variance first reaches the SCP one,
/// interpolated linearly in the log of the variance ratio.
pub fn crossover(rows: &[VarianceRow], total_shots: u64) -> Option<f64> {
    let pick = |mode: EstimatorMode, steps: usize| {
        rows.iter()
            .find(|r| r.estimator == mode && r.steps == steps && r.total_shots == total_shots && (mode == EstimatorMode::Lcp || r.shots_per_evaluation == 1))
            .map(|r| r.empirical_variance)
    };
    let mut steps: Vec<usize> = rows.iter().filter(|r| r.total_shots == total_shots).map(|r| r.steps).collect();
    steps.sort_unstable();
    steps.dedup();
    let ratios: Vec<(f64, f64)> = steps
        .iter()
        .filter_map(|&n| Some((n as f64, (pick(EstimatorMode::Lcp, n)? / pick(EstimatorMode::Scp, n)?).ln())))
        .collect();
    if ratios.first().map_or(true, |r| r.1 >= 0.0) {
        return None;
    }
    ratios.windows(2).find(|w| w[1].1 >= 0.0).map(|w| w[0].0 + (w[1].0 - w[0].0) * (-w[0].1) / (w[1].1 - w[0].1))
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `variance-study`: the comparison table and the crossover estimates.
pub fn run_variance_study(config: &RunConfig) -> CliResult<Vec<FileEntry>> {
    let rows = variance_rows(config)?;
    let mut csv = String::from(
        "estimator,steps,total_shots,shots_per_evaluation,empirical_variance,predicted_variance,floor_variance,ground_state_form\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format!("{:?}", r.estimator).to_lowercase(),
            r.steps,
            r.total_shots,
            r.shots_per_evaluation,
            num(r.empirical_variance),
            num(r.predicted_variance),
            opt(r.floor_variance),
            opt(r.ground_state_form)
        ));
    }
    let budgets = &config.variance.as_ref().expect("checked by variance_rows").total_shots;
    let crossovers: Vec<(u64, Option<f64>)> = budgets.iter().map(|&b| (b, crossover(&rows, b))).collect();
    let mut out = OutputDir::create(&config.outputs)?;
    out.write("variance.csv", &csv)?;
    out.write_json("crossover.json", &crossovers)?;
    out.finish("variance-study", config)
}
