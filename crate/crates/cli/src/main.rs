use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regge_core::io_model::{
    generate_hard_sphere_tables_with, parse_run_config, write_energy_file, HardSphereParams,
    ReconstructionParams, RunConfig,
};
use regge_core::regge_analysis::{PoleCandidates, ReggePole, Selection};
use regge_core::workflow::{
    clean_aux, run_step1, run_step2, script_selector, RunManifest, SelectionScript, Session,
};
use regge_core::Error;

/// Complex angular momentum analysis of reactive S-matrix elements.
#[derive(Debug, Parser)]
#[command(name = "regge", version)]
struct Cli {
    /// Run configuration (key = value, or the legacy colon layout).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit every energy and write poles, zeros, cross sections and
    /// decompositions.
    Step1,
    /// Follow one Regge trajectory and write its resonance contributions.
    Step2 {
        /// Scripted picks; without it the picks are read from stdin.
        #[arg(long)]
        select_file: Option<PathBuf>,
        /// Trajectory label (overrides the one in the selections file).
        #[arg(long)]
        label: Option<String>,
    },
    /// Forget the trajectories accumulated by earlier step2 runs.
    CleanAux,
    /// Write S-matrix files for the hard-sphere model.
    GenerateModel(GenerateArgs),
    /// Serve the analysis over HTTP on a local address.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Output directory; files are named 1, 2, ... in energy order.
    #[arg(long)]
    out: PathBuf,
    /// Collision energies in meV.
    #[arg(long, value_delimiter = ',', required = true)]
    energies: Vec<f64>,
    /// Preset parameters: 1 (weak barrier) or 2 (strong barrier).
    #[arg(long, default_value_t = 1)]
    example: u8,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    delta_j: Option<f64>,
    /// Highest J written.
    #[arg(long, default_value_t = 29)]
    jmax: usize,
    /// First and last partial waves used by the fit (1-based).
    #[arg(long, default_value_t = 1)]
    jstart: usize,
    #[arg(long, default_value_t = 15)]
    jfin: usize,
    #[arg(long, default_value_t = 1)]
    niter: usize,
    #[arg(long, default_value_t = 0.1)]
    dxl: f64,
}

fn preset(example: u8) -> Result<HardSphereParams, Error> {
    let base = HardSphereParams {
        r: 2.045,
        d: 0.592,
        v: 165.0,
        omega: 1.023,
        mu: 1.0,
        delta_j: 5.0,
    };
    match example {
        1 => Ok(base),
        2 => Ok(HardSphereParams {
            omega: 66.463,
            ..base
        }),
        n => Err(Error::Validation(format!("unknown example {n}; use 1 or 2"))),
    }
}

fn generate(args: &GenerateArgs) -> Result<(), Error> {
    let mut p = preset(args.example)?;
    p.r = args.r.unwrap_or(p.r);
    p.d = args.d.unwrap_or(p.d);
    p.v = args.v.unwrap_or(p.v);
    p.omega = args.omega.unwrap_or(p.omega);
    p.mu = args.mu.unwrap_or(p.mu);
    p.delta_j = args.delta_j.unwrap_or(p.delta_j);
    let recon = ReconstructionParams {
        niter: args.niter,
        jstart: args.jstart,
        jfin: Some(args.jfin),
        dxl: args.dxl,
        ..ReconstructionParams::default()
    };
    let mut energies = args.energies.clone();
    energies.sort_by(f64::total_cmp);
    let tables = generate_hard_sphere_tables_with(&p, &energies, args.jmax, &recon)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    for (i, t) in tables.iter().enumerate() {
        t.validate()?;
        write_energy_file(t, &args.out.join((i + 1).to_string()))?;
    }
    println!("wrote {} files to {}", tables.len(), args.out.display());
    Ok(())
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    let mut cfg = parse_run_config(path)?;
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k, v)?;
        if k.trim() == "data_dir" || k.trim() == "output_dir" {
            cfg.rebase(&std::env::current_dir().map_err(|e| Error::io(".", e))?);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

// The subcommand decides the step, whatever the file says.
fn for_step(mut cfg: RunConfig, step: u8) -> RunConfig {
    let first = step == 1;
    if cfg.first_run != first {
        log::info!("first_run set to {first} for step {step}");
        cfg.first_run = first;
    }
    cfg
}

fn print_candidates(out: &mut impl Write, cands: &PoleCandidates, last: Option<&ReggePole>) {
    let _ = writeln!(out, "E = {} meV", cands.energy);
    if let Some(p) = last {
        let j = p.j();
        let _ = writeln!(out, "  previous pole: {:.6} {:+.6}i", j.re, j.im);
    }
    for (i, p) in cands.poles.iter().enumerate() {
        let j = p.j();
        let _ = writeln!(out, "  [{i}] {:.6} {:+.6}i", j.re, j.im);
    }
    let _ = write!(out, "pick (index | re im | skip): ");
    let _ = out.flush();
}

fn parse_answer(line: &str) -> Result<Selection, Error> {
    let line = line.trim();
    let text = if line.parse::<usize>().is_ok() {
        format!("seed id {line}")
    } else {
        format!("seed {line}")
    };
    SelectionScript::parse(&text)?
        .seed
        .ok_or_else(|| Error::Validation("empty pick".into()))
}

fn interactive_selector(
    mut input: impl BufRead,
) -> impl FnMut(&PoleCandidates, Option<&ReggePole>) -> Result<Selection, Error> {
    move |cands, last| {
        let mut err = std::io::stderr();
        loop {
            print_candidates(&mut err, cands, last);
            let mut line = String::new();
            let n = input.read_line(&mut line).map_err(|e| Error::io("<stdin>", e))?;
            if n == 0 {
                return Err(Error::Selection {
                    message: format!("input ended before a pick for E = {} meV", cands.energy),
                    candidates: cands.poles.iter().map(|p| p.j()).collect(),
                });
            }
            match parse_answer(&line) {
                Ok(sel) => return Ok(sel),
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                }
            }
        }
    }
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn step2(
    cfg: RunConfig,
    select_file: Option<&Path>,
    label: Option<&str>,
) -> Result<(), Error> {
    let mut manifest = RunManifest::resolve(for_step(cfg, 2), 2)?;
    let mut script = match select_file {
        Some(p) => Some(SelectionScript::read(p)?),
        None => None,
    };
    if let Some(l) = label {
        script.get_or_insert_with(SelectionScript::default).label = Some(l.to_string());
    }
    manifest.selections = script.clone();
    let report = match select_file {
        Some(_) => {
            let s = script.unwrap_or_default();
            run_step2(&manifest, script_selector(&s))?
        }
        None => run_step2(&manifest, interactive_selector(std::io::stdin().lock()))?,
    };
    let t = &report.trajectory;
    eprintln!(
        "trajectory '{}': {} poles, {} gaps; accumulated: {}",
        t.label,
        t.points.len(),
        t.gaps.len(),
        report.accumulated.join(", ")
    );
    report_written(&report.written);
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::GenerateModel(args) => generate(args),
        Command::Step1 => {
            let manifest = RunManifest::resolve(for_step(load_config(cli)?, 1), 1)?;
            let report = run_step1(&manifest)?;
            for (f, e) in &report.skipped {
                eprintln!("skipped E = {} meV (file {}): {e}", f.energy, f.index);
            }
            report_written(&report.written);
            Ok(())
        }
        Command::Step2 { select_file, label } => {
            step2(load_config(cli)?, select_file.as_deref(), label.as_deref())
        }
        Command::CleanAux => {
            let cfg = load_config(cli)?;
            let removed = clean_aux(&cfg.output_dir)?;
            if removed.is_empty() {
                eprintln!("nothing to remove");
            }
            report_written(&removed);
            Ok(())
        }
        Command::Serve { addr } => {
            let manifest = RunManifest::resolve(for_step(load_config(cli)?, 2), 2)?;
            let session = Session::open(manifest)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
            eprintln!("serving {} energies on http://{addr}", session.energies().len());
            runtime
                .block_on(regge_api::serve(regge_api::shared(Some(session)), *addr))
                .map_err(|e| Error::io(addr.to_string(), e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Selection { candidates, .. } = &e {
                for (i, z) in candidates.iter().enumerate() {
                    eprintln!("  [{i}] {:.6} {:+.6}i", z.re, z.im);
                }
            }
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
