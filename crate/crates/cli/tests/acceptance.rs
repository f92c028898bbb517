//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Runs with `harness = false` so the lines are printed even when everything
//! passes. Criteria 1-9 call the library directly; criterion 10 drives the
//! `bo4lab` binary.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use bo4lab_core::diagnostics::commutators::commutator_bound_check;
use bo4lab_core::diagnostics::experiments::{
    bona_smith_convergence, bona_smith_data, conservation_check, derivative_loss_experiment, two_solution_experiment,
    BonaSmithConfig, LossConfig, TwoSolutionConfig,
};
use bo4lab_core::diagnostics::fit::corpus;
use bo4lab_core::diagnostics::operators::operator_algebra_check;
use bo4lab_core::diagnostics::sandwich::sandwich_check;
use bo4lab_core::diagnostics::{check_identity, symbol_scan, IdentityId, InequalityId, SymbolScanSpec};
use bo4lab_core::evolve::evolve;
use bo4lab_core::spectral::{make_grid, norm_l2};
use bo4lab_core::{CheckReport, CoefficientSet, Field, SolverParams, StepperConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn require(r: &CheckReport) -> Result<(), String> {
    if r.passed {
        Ok(())
    } else {
        let failing: Vec<&String> = r.notes.iter().filter(|n| n.contains("FAIL")).collect();
        Err(format!(
            "{}: measured {:.4e} vs bound {:.4e} {:?}",
            r.name, r.measured, r.bound, failing
        ))
    }
}

fn core<T>(r: bo4lab_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn operator_algebra() -> Outcome {
    let mut worst = 0.0_f64;
    for n in [64, 256] {
        let r = operator_algebra_check(core(make_grid(n))?, 1000, n as u64);
        require(&r)?;
        worst = worst.max(r.measured);
    }
    Ok(format!("2 x 1000 fields, worst relative residual {worst:.1e}"))
}

fn identities() -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for n in [64, 128, 256] {
        let g = core(make_grid(n))?;
        let fields = corpus(g, 30, g.k_max(), n as u64);
        for id in IdentityId::ALL {
            for s in [1.0, 2.5, 4.0] {
                for chunk in fields.chunks(3) {
                    let refs: Vec<&Field> = chunk[..id.arity()].iter().collect();
                    let r = core(check_identity(id, &refs, s))?;
                    require(&r).map_err(|e| format!("N={n} s={s}: {e}"))?;
                    worst = worst.max(r.measured);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} evaluations, worst relative residual {worst:.1e}"))
}

fn sandwich() -> Outcome {
    let r = core(sandwich_check(64, 1000, 4.0, &CoefficientSet::INTEGRABLE, 3))?;
    require(&r)?;
    let pairs = r.details["pairs"][0];
    let largest = &r.details["largest_constant_hs_l2"];
    Ok(format!(
        "{pairs} pairs, largest selected constants {largest:?}, N -> 2N jump <= 1 step"
    ))
}

fn symbol_scans() -> Outcome {
    let mut worst: f64 = 0.0;
    for inequality in [InequalityId::ThirdOrderSymbol, InequalityId::PowerDifference] {
        for s in [0.0, 1.0, 2.0, 2.5, 3.7] {
            let spec = SymbolScanSpec {
                inequality,
                s,
                box_radius: 256,
                fit_radius: 64,
            };
            let r = core(symbol_scan(&spec))?;
            require(&r).map_err(|e| format!("{inequality:?} s={s}: {e}"))?;
            if r.details["hard_failures"][0] != 0.0 {
                return Err(format!("{inequality:?} s={s}: hard failures"));
            }
            let growth = r.details["full_box_max_ratio"][0] / r.details["fitted_constant"][0].max(f64::MIN_POSITIVE);
            worst = worst.max(growth);
        }
    }
    Ok(format!(
        "10 scans, largest full-box / fit-box constant ratio {worst:.4}"
    ))
}

fn commutators() -> Outcome {
    let mut worst = 0.0_f64;
    for kind in 1..=9u8 {
        for s in [0.0, 2.0, 4.0] {
            let r = core(commutator_bound_check(kind, s, 3.6, 0))?;
            require(&r).map_err(|e| format!("P{kind} s={s}: {e}"))?;
            worst = worst.max(r.measured);
        }
    }
    Ok(format!("27 cases, largest N=64 -> 256 constant growth {worst:.3}"))
}

fn terminal(u0: &Field, p: &SolverParams, dt: f64, t: f64) -> Result<Field, String> {
    let traj = core(evolve(u0, p, &StepperConfig::fixed(dt, t, usize::MAX)))?;
    if !traj.completed() {
        return Err(format!("run blew up: {:?}", traj.status));
    }
    Ok(traj.last().clone())
}

fn solver() -> Outcome {
    let g = core(make_grid(64))?;
    let linear = core(SolverParams::new(CoefficientSet::ZERO, 0.0))?;

    let wave = terminal(&Field::cos_mode(g, 1, 1.0), &linear, 1e-2, 1.0)?;
    let wave_err = norm_l2(&(&wave - &Field::from_fn(g, |x| (x - 1.0).cos())));
    if wave_err > 1e-8 {
        return Err(format!("travelling wave error {wave_err:.2e}"));
    }

    let u0 = &(&Field::cos_mode(g, 1, 0.3) + &Field::sin_mode(g, 2, 0.2)) + &Field::cos_mode(g, 3, 0.1);
    let full = core(SolverParams::new(CoefficientSet::INTEGRABLE, 1e-3))?;
    let (t, dt) = (0.05, 5e-5);
    let reference = terminal(&u0, &full, dt / 8.0, t)?;
    let e1 = norm_l2(&(&terminal(&u0, &full, dt, t)? - &reference));
    let e2 = norm_l2(&(&terminal(&u0, &full, dt / 2.0, t)? - &reference));
    let order = (e1 / e2).log2();
    if !(3.5..=4.5).contains(&order) {
        return Err(format!("temporal order {order:.3}"));
    }

    let mut mass: f64 = 0.0;
    for f in corpus(g, 3, 8, 5) {
        let traj = core(evolve(&f.scale(0.2), &full, &StepperConfig::auto(0.05, 10)))?;
        let r = conservation_check(&traj);
        require(&r)?;
        mass = mass.max(r.measured);
    }

    let f0 = corpus(g, 1, 20, 9).pop().unwrap();
    let cfg = StepperConfig::fixed(1e-3, 0.5, 100);
    let fwd = core(evolve(&f0, &linear, &cfg))?;
    let back = core(evolve(fwd.last(), &linear.reversed(), &cfg))?;
    let rev = norm_l2(&(back.last() - &f0)) / norm_l2(&f0);
    if rev > 1e-8 {
        return Err(format!("reversibility error {rev:.2e}"));
    }
    Ok(format!(
        "wave error {wave_err:.1e}, order {order:.2}, mass drift {mass:.1e}, reversal error {rev:.1e}"
    ))
}

fn derivative_loss() -> Outcome {
    let r = core(derivative_loss_experiment(&LossConfig::default()))?;
    require(&r)?;
    Ok(format!(
        "slopes naive {:.3}, corrected {:.3}, step-halving change {:.1e}",
        r.details["slope_naive"][0], r.details["slope_corrected"][0], r.details["step_halving_change"][0]
    ))
}

fn two_solution() -> Outcome {
    let r = core(two_solution_experiment(&TwoSolutionConfig::default(), 0))?;
    require(&r)?;
    let c = &r.details["c_star"];
    Ok(format!(
        "C* = {:.3e} -> {:.3e} under refinement (ratio {:.3})",
        c[0],
        c[1],
        c[1] / c[0]
    ))
}

fn bona_smith() -> Outcome {
    let cfg = BonaSmithConfig::default();
    let u0 = bona_smith_data(core(make_grid(256))?, cfg.s, 0);
    let r = core(bona_smith_convergence(&u0, &cfg))?;
    require(&r)?;
    Ok(format!(
        "L2 order {:.3}, H^(s-alpha) orders {:?}",
        r.details["l2_order"][0], r.details["order"]
    ))
}

fn run_binary(dir: &Path, command: &str, config: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).map_err(|e| e.to_string())?;
    let status = Command::new(env!("CARGO_BIN_EXE_bo4lab"))
        .args([command, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(["--seed", "42"])
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.code() != Some(0) {
        return Err(format!("{command} exited with {:?}", status.status.code()));
    }
    Ok(())
}

fn determinism() -> Outcome {
    let root = std::env::temp_dir().join(format!("bo4lab-acceptance-{}", std::process::id()));
    let runs = [
        ("evolve", "n = 128\namplitude = 0.3\nt_end = 0.2\nsample_every = 5\n"),
        ("identities", "n = 64\ncount = 200\n"),
        ("two-solution", "n = 64\nsteps = 100\nhorizon = 0.02\n"),
    ];
    let mut compared = 0;
    let result = (|| {
        for (command, config) in runs {
            let a = root.join(command).join("a");
            let b = root.join(command).join("b");
            run_binary(&a, command, config)?;
            run_binary(&b, command, config)?;
            let mut names: Vec<_> = fs::read_dir(a.join("out"))
                .map_err(|e| e.to_string())?
                .map(|e| e.unwrap().file_name())
                .collect();
            names.sort();
            for name in names {
                let x = fs::read(a.join("out").join(&name)).map_err(|e| e.to_string())?;
                let y = fs::read(b.join("out").join(&name)).map_err(|e| e.to_string())?;
                if x != y {
                    return Err(format!("{command}: {name:?} differs between runs"));
                }
                compared += 1;
            }
        }
        Ok(())
    })();
    let _ = fs::remove_dir_all(&root);
    result.map(|()| format!("{compared} files byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("operator algebra", operator_algebra),
        ("exact identities", identities),
        ("energy comparison", sandwich),
        ("symbol scans", symbol_scans),
        ("commutator bounds", commutators),
        ("solver correctness", solver),
        ("derivative-loss cancellation", derivative_loss),
        ("two-solution inequality", two_solution),
        ("viscosity convergence", bona_smith),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({msg}) [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({msg}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
