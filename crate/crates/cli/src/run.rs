//! Maps a [`RunConfig`] onto the core checks and experiments.

use std::path::Path;

use bo4lab_core::diagnostics::commutators::commutator_bound_check;
use bo4lab_core::diagnostics::experiments::{
    bona_smith_convergence, bona_smith_data, conservation_check, conservation_sweep, derivative_loss_experiment,
    two_solution_experiment, BonaSmithConfig, LossConfig, TwoSolutionConfig,
};
use bo4lab_core::diagnostics::fit::corpus;
use bo4lab_core::diagnostics::gn::{calibration_corpus, gn_alpha, gn_check};
use bo4lab_core::diagnostics::mollifier::{algebraic_field, mollifier_rate_check};
use bo4lab_core::diagnostics::operators::operator_algebra_check;
use bo4lab_core::diagnostics::sandwich::sandwich_check;
use bo4lab_core::diagnostics::{check_identity, symbol_scan, IdentityId, SymbolScanSpec};
use bo4lab_core::energy::{choose_big_constant, EnergyKind};
use bo4lab_core::evolve::{evolve, Monitor};
use bo4lab_core::spectral::{make_grid, norm_hs, seeded_field, RandomSpectrum};
use bo4lab_core::{CheckReport, EnergyParams, Field, SolverParams, StepperConfig, TimeStep, TorusGrid, Trajectory};

use crate::config::{Command, InitialData, RunConfig};
use crate::error::{CliError, Result};
use crate::output::write_outputs;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub reports: Vec<CheckReport>,
    pub trajectory: Option<Trajectory>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.passed)
    }
}

/// Initial data described by the `initial` keys.
pub fn initial_data(cfg: &RunConfig, grid: TorusGrid) -> Field {
    match cfg.initial {
        InitialData::Cos => Field::cos_mode(grid, cfg.mode, cfg.amplitude),
        InitialData::Random => {
            let decay = cfg.decay.unwrap_or(cfg.s + 1.0);
            let u = seeded_field(grid, &RandomSpectrum::new(1.0, decay, cfg.cutoff).mean_free(), cfg.seed);
            u.scale(cfg.amplitude / norm_hs(&u, cfg.s))
        }
    }
}

fn single_epsilon(cfg: &RunConfig) -> Result<f64> {
    match cfg.epsilons().as_slice() {
        [e] => Ok(*e),
        _ => Err(CliError::Config {
            key: "epsilon".to_string(),
            reason: format!("`{}` takes a single value", cfg.command),
        }),
    }
}

fn stepper(cfg: &RunConfig) -> StepperConfig {
    StepperConfig {
        dt: cfg.dt.map_or(TimeStep::Auto { cfl: cfg.cfl }, TimeStep::Fixed),
        scheme: cfg.scheme,
        ..StepperConfig::fixed(0.0, cfg.t_end, cfg.sample_every)
    }
}

fn run_evolve(cfg: &RunConfig) -> Result<Outcome> {
    let grid = make_grid(cfg.n)?;
    let u0 = initial_data(cfg, grid);
    let mut p = SolverParams::new(cfg.coeffs, single_epsilon(cfg)?)?;
    p.time_direction = cfg.time_direction;
    let zero = Field::zeros(grid);
    let cs = if cfg.s >= 1.0 {
        choose_big_constant(&u0, &zero, EnergyKind::Hs(cfg.s), &cfg.coeffs)?
    } else {
        1.0
    };
    let c0 = choose_big_constant(&u0, &zero, EnergyKind::L2, &cfg.coeffs)?;
    let ep = EnergyParams::new(cfg.s, cfg.s0)?.with_constants(cs, c0)?;
    let mut sc = stepper(cfg);
    sc.monitor = Monitor {
        hs_indices: vec![cfg.s],
        energy: Some((ep, cfg.coeffs)),
    };
    let traj = evolve(&u0, &p, &sc)?;
    let report = conservation_check(&traj)
        .with_column("energy_constants_s_l2", vec![cs, c0])
        .with_column("dt", vec![traj.dt]);
    Ok(Outcome {
        reports: vec![report],
        trajectory: Some(traj),
    })
}

fn run_identities(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let grid = make_grid(cfg.n)?;
    let mut out = vec![operator_algebra_check(grid, cfg.corpus_size(), cfg.seed)];
    let fields = corpus(grid, 30, grid.k_max(), cfg.seed);
    for id in IdentityId::ALL {
        let mut parts = Vec::new();
        for &s in &cfg.s_values() {
            for chunk in fields.chunks(3) {
                let refs: Vec<&Field> = chunk[..id.arity()].iter().collect();
                parts.push(check_identity(id, &refs, s)?);
            }
        }
        out.push(CheckReport::all(id.name(), &parts));
    }
    out.push(sandwich_check(cfg.n, cfg.corpus_size(), cfg.s, &cfg.coeffs, cfg.seed)?);
    Ok(out)
}

fn run_commutators(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &kind in &cfg.kinds {
        for &s in &cfg.s_values() {
            out.push(commutator_bound_check(kind, s, cfg.s0, cfg.seed)?);
        }
    }
    Ok(out)
}

fn run_symbols(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &inequality in &cfg.inequalities {
        for &s in &cfg.s_values() {
            out.push(symbol_scan(&SymbolScanSpec {
                inequality,
                s,
                box_radius: cfg.box_radius,
                fit_radius: cfg.fit_radius,
            })?);
        }
    }
    Ok(out)
}

fn run_gn(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let fields = calibration_corpus(cfg.n, cfg.seed)?;
    let mut out = Vec::new();
    for &s in &cfg.s_values() {
        let orders = cfg.gn_l.clone().unwrap_or_else(|| (0..=s.floor() as u32).collect());
        for &l in &orders {
            for &p in &cfg.gn_p {
                if gn_alpha(l, p, s).is_err() {
                    continue;
                }
                let parts: Vec<CheckReport> = fields
                    .iter()
                    .map(|f| gn_check(f, l, p, s))
                    .collect::<bo4lab_core::Result<_>>()?;
                let worst = parts.iter().map(|r| r.measured).fold(0.0, f64::max);
                let mut r = CheckReport::at_most(format!("gn_l{l}_p{p}_s{s}"), worst, parts[0].bound);
                r.passed = parts.iter().all(|x| x.passed);
                out.push(r.with_column("fields", vec![parts.len() as f64]));
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Config {
            key: "gn_l".to_string(),
            reason: "no (l, p, s) combination lies in the admissible range".to_string(),
        });
    }
    Ok(out)
}

fn run_mollifier(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &s in &cfg.s_values() {
        let f = algebraic_field(s, cfg.seed);
        let alphas = cfg
            .alphas
            .clone()
            .unwrap_or_else(|| (1..=s.floor() as i64).map(|a| a as f64).collect());
        for alpha in alphas {
            out.push(mollifier_rate_check(&f, s, alpha)?);
        }
    }
    Ok(out)
}

fn run_loss(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let d = LossConfig::default();
    let lc = LossConfig {
        k0_list: cfg.k0.clone(),
        s: cfg.s,
        s0: cfg.s0,
        coeffs: cfg.coeffs,
        epsilon: single_epsilon(cfg)?,
        horizon: cfg.horizon.unwrap_or(d.horizon),
        steps: cfg.steps.unwrap_or(d.steps),
        n: cfg.n,
        ..d
    };
    Ok(vec![derivative_loss_experiment(&lc)?])
}

fn run_two_solution(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let d = TwoSolutionConfig::default();
    let eps = cfg.epsilons();
    let (eps1, eps2) = match eps.as_slice() {
        [e] => (*e, *e),
        [a, b] => (*a, *b),
        _ => {
            return Err(CliError::Config {
                key: "epsilon".to_string(),
                reason: "two-solution takes one or two values".to_string(),
            })
        }
    };
    let tc = TwoSolutionConfig {
        s_prime: cfg.s_prime,
        s0: cfg.s0,
        coeffs: cfg.coeffs,
        eps1,
        eps2,
        horizon: cfg.horizon.unwrap_or(d.horizon),
        n: cfg.n,
        steps: cfg.steps.unwrap_or(d.steps),
    };
    Ok(vec![two_solution_experiment(&tc, cfg.seed)?])
}

fn run_bona_smith(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let d = BonaSmithConfig::default();
    let bc = BonaSmithConfig {
        s: cfg.s,
        s0: cfg.s0,
        coeffs: cfg.coeffs,
        eps_list: cfg.epsilons(),
        horizon: cfg.horizon.unwrap_or(d.horizon),
        alphas: cfg.alphas.clone().unwrap_or(vec![cfg.s]),
        samples: cfg.steps.unwrap_or(d.samples),
    };
    let u0 = bona_smith_data(make_grid(cfg.n)?, cfg.s, cfg.seed);
    Ok(vec![bona_smith_convergence(&u0, &bc)?])
}

fn run_conserve(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let u0 = initial_data(cfg, make_grid(cfg.n)?);
    Ok(vec![conservation_sweep(
        &u0,
        cfg.coeffs,
        &cfg.epsilons(),
        &stepper(cfg),
    )?])
}

/// Runs the configured command without writing anything.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let reports = match cfg.command {
        Command::Evolve => return run_evolve(cfg),
        Command::Identities => run_identities(cfg)?,
        Command::Commutators => run_commutators(cfg)?,
        Command::Symbols => run_symbols(cfg)?,
        Command::Gn => run_gn(cfg)?,
        Command::Mollifier => run_mollifier(cfg)?,
        Command::Loss => run_loss(cfg)?,
        Command::TwoSolution => run_two_solution(cfg)?,
        Command::BonaSmith => run_bona_smith(cfg)?,
        Command::Conserve => run_conserve(cfg)?,
    };
    Ok(Outcome {
        reports,
        trajectory: None,
    })
}

/// Runs the configured command and writes its outputs into `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let outcome = run(cfg)?;
    write_outputs(out, cfg, &outcome.reports, outcome.trajectory.as_ref())?;
    Ok(outcome)
}
