use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use rieffel::harness::doc::{self, InstanceDocument, Kind, Loaded};
use rieffel::harness::generate;
use rieffel::harness::report::{self, Report};
use rieffel::induction::{induce_module_rep, InducedSetup};
use rieffel::morita::{dual_module, roundtrip_verify};
use rieffel::{Error, Tolerance};

#[derive(Parser)]
#[command(name = "rieffel", about = "Check Hilbert module, imprimitivity and induction instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a document and validate it through its constructor.
    Validate { file: PathBuf },
    /// Induce a module representation and check its postconditions.
    Induce {
        /// Module V over the left algebra.
        #[arg(long)]
        v: PathBuf,
        /// Bimodule supplying the left action (or a left_action document).
        #[arg(long)]
        x: PathBuf,
        /// Optional left_action document overriding the one in --x.
        #[arg(long)]
        rho: Option<PathBuf>,
        /// Module representation of W over the right algebra.
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the induce-and-return round trip on a scenario document.
    Roundtrip {
        scenario: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Write a seeded instance document.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every check on a range of seeded scenarios, e.g. `1..50`.
    Suite {
        #[arg(long)]
        seeds: String,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
        /// Destination for the structured report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_postcondition() { 2 } else { 1 })
}

fn tolerance(rel: Option<f64>) -> rieffel::Result<Tolerance> {
    match rel {
        Some(r) => Tolerance::new(r, Tolerance::default().abs),
        None => Ok(Tolerance::default()),
    }
}

/// `A..B` inclusive.
fn seed_range(s: &str) -> Option<(u64, u64)> {
    let (a, b) = s.split_once("..")?;
    let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    (a <= b).then_some((a, b))
}

fn load_valid(path: &Path) -> rieffel::Result<(InstanceDocument, Loaded)> {
    let d = doc::load(path)?;
    let loaded = doc::validate(&d)?;
    Ok((d, loaded))
}

fn run(command: Command) -> rieffel::Result<ExitCode> {
    match command {
        Command::Validate { file } => {
            let (d, loaded) = load_valid(&file)?;
            let detail = match &loaded {
                Loaded::Algebra(a) => format!("algebra of dimension {} in M_{}", a.dim(), a.ambient_dim()),
                Loaded::Module(m) => format!("module of dimension {}", m.dim()),
                Loaded::LeftAction(_) => "left action".to_string(),
                Loaded::AlgebraRep(r) => format!("representation on C^{}", r.space_dim()),
                Loaded::ModuleRep(r) => format!("module representation C^{} -> C^{}", r.space_dim(), r.target_dim()),
                Loaded::Bimodule(x) => format!("imprimitivity bimodule, axiom residual {:.3e}", x.residuals().max()),
                Loaded::Scenario(_) => "scenario".to_string(),
            };
            println!("valid {:?} '{}': {detail}", d.kind, d.meta.name);
            Ok(ExitCode::SUCCESS)
        }
        Command::Induce { v, x, rho, rep, tol } => {
            let tol = tolerance(tol)?;
            let (_, v) = load_valid(&v)?;
            let (_, x) = load_valid(&x)?;
            let (_, rep) = load_valid(&rep)?;
            let Loaded::Module(v) = v else { return Err(Error::Parse { path: "--v".into(), message: "expected a module".into() }) };
            let Loaded::ModuleRep(rep) = rep else {
                return Err(Error::Parse { path: "--rep".into(), message: "expected a module_rep".into() });
            };
            let action = match (rho, x) {
                (Some(r), _) => match load_valid(&r)?.1 {
                    Loaded::LeftAction(a) => a,
                    _ => return Err(Error::Parse { path: "--rho".into(), message: "expected a left_action".into() }),
                },
                (None, Loaded::Bimodule(b)) => b.left_action().clone(),
                (None, Loaded::LeftAction(a)) => a,
                _ => return Err(Error::Parse { path: "--x".into(), message: "expected a bimodule or left_action".into() }),
            };
            let setup = InducedSetup::new(&v, &action, &rep, tol)?;
            let induced = induce_module_rep(&setup, tol)?;
            let mut r = Report::default();
            r.push("inner-product relation", report::ANCHOR_INNER, induced.inner_product_residual, induced.threshold);
            r.push("norm bound", report::ANCHOR_NORM, induced.norm_excess, induced.threshold);
            if let Some(nd) = induced.nondegenerate {
                r.push_flag("non-degenerate", report::ANCHOR_NONDEG, nd);
            }
            println!("induced representation C^{} -> C^{}", induced.rep.space_dim(), induced.rep.target_dim());
            print!("{}", r.to_text());
            Ok(if r.overall() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Roundtrip { scenario, tol } => {
            let d = doc::load(&scenario)?;
            let tol = match tol {
                Some(_) => tolerance(tol)?,
                None => d.tolerance()?,
            };
            let s = doc::scenario_from(&d.payload(Kind::Scenario)?, "payload", tol)?;
            let mut runs = vec![("through X", roundtrip_verify(&s.bimodule, &s.v, &s.w, &s.phi, tol)?)];
            if let Some(psi) = &s.psi {
                let dual = dual_module(&s.bimodule, tol)?;
                runs.push(("through the dual", roundtrip_verify(&dual.bimodule, &s.w, &s.v, psi, tol)?));
            }
            let mut r = Report::default();
            for (name, rt) in runs {
                r.push(format!("U1 unitary ({name})"), report::ANCHOR_ROUNDTRIP, rt.u1_unitarity, rt.threshold);
                r.push(format!("U2 unitary ({name})"), report::ANCHOR_ROUNDTRIP, rt.u2_unitarity, rt.threshold);
                r.push(format!("U2 descends ({name})"), report::ANCHOR_ROUNDTRIP, rt.u2_descent, rt.threshold);
                r.push(format!("intertwining ({name})"), report::ANCHOR_ROUNDTRIP, rt.intertwining, rt.threshold);
            }
            print!("{}", r.to_text());
            let worst = r.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
            println!("max residual: {worst:.3e}");
            Ok(if r.overall() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Gen { kind, seed, preset, out } => {
            let k = Kind::parse(&kind).ok_or_else(|| Error::Parse { path: "--kind".into(), message: format!("unknown kind {kind:?}") })?;
            let d = generate::document(k, seed, preset.as_deref(), Tolerance::default())?;
            doc::save(&d, &out)?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { seeds, report: format, out } => {
            let (a, b) = seed_range(&seeds).ok_or_else(|| Error::Parse { path: "--seeds".into(), message: "expected A..B".into() })?;
            let tol = Tolerance::default();
            let results: Vec<rieffel::Result<Report>> = (a..=b).into_par_iter().map(|s| report::scenario_checks(s, tol)).collect();
            let mut all = Report::default();
            for (seed, r) in (a..=b).zip(results) {
                match r {
                    Ok(r) => all.extend(r),
                    Err(e) => all.push_flag(format!("seed {seed}: {e}"), "scenario construction", false),
                }
            }
            let text = match format {
                Format::Json => all.to_json() + "\n",
                Format::Text => all.to_text(),
            };
            match out {
                Some(path) => std::fs::write(&path, &text)?,
                None => print!("{text}"),
            }
            if matches!(format, Format::Json) {
                eprintln!("{} checks, overall {}", all.checks.len(), if all.overall() { "PASS" } else { "FAIL" });
            }
            Ok(if all.overall() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}
