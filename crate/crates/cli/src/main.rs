//! Batch front-end: `simulate`, `estimates`, `bridge` and `compare`
//! subcommands over one TOML run configuration.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on
//! runtime/numerics errors.

mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use bgkmix::estimates::suite::{run_suite, SuiteConfig};
use bgkmix::macroscopic::{bridged_rates, c_range, c_symmetric, integrate_relaxation, TwoFluidState};
use bgkmix::mixture::ModelVariant;
use bgkmix::solver::run_simulation;
use clap::{Args, Parser, Subcommand};

use config::{parse_config, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<bgkmix::KineticError> for CliError {
    fn from(e: bgkmix::KineticError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "bgkmix",
    about = "Discrete-velocity two-species BGK mixture solver and verification harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config's suite master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's model variant.
    #[arg(long, value_parser = ["two-term", "single-term"])]
    variant: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Advance the kinetic state and write diagnostics.csv.
    Simulate(CommonArgs),
    /// Run the randomized inequality suite and write estimates.csv.
    Estimates(CommonArgs),
    /// Print the two-fluid parameter bridge for the configured mixture.
    Bridge(CommonArgs),
    /// Run the kinetic solver and the bridged two-fluid system side by
    /// side; write kinetic.csv and macroscopic.csv.
    Compare(CommonArgs),
}

fn load(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let mut text = text;
    if let Some(variant) = &args.variant {
        // The override rewrites the variant key before parsing so every
        // consistency check sees the effective value.
        let mut raw: toml::Value =
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        raw["model"]["variant"] = toml::Value::String(variant.clone());
        text = toml::to_string(&raw).map_err(|e| CliError::Config(e.to_string()))?;
    }
    parse_config(&text)
}

fn simulate(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(args)?;
    let sim = cfg
        .sim
        .clone()
        .ok_or_else(|| CliError::Config("missing [time] block".into()))?;
    let state = cfg.initial_state()?;
    let (records, _) = run_simulation(state, &cfg.params, &cfg.grid, &sim)?;
    let csv = output::diagnostics_csv(&records, cfg.grid.velocity_dim());
    let path = args.out.join("diagnostics.csv");
    output::write_file(&path, &csv)?;
    let last = records.last().unwrap();
    println!(
        "simulate: {} steps to t = {}, {} records -> {}",
        sim.n_steps,
        last.t,
        records.len(),
        path.display()
    );
    println!(
        "  final: u1x = {:.6e}, u2x = {:.6e}, T1 = {:.6e}, T2 = {:.6e}, entropy = {:.6e}",
        last.bulk_velocity[0][0],
        last.bulk_velocity[1][0],
        last.mean_temperature[0],
        last.mean_temperature[1],
        last.entropy
    );
    Ok(())
}

fn estimates(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(args)?;
    let suite = cfg
        .suite
        .clone()
        .ok_or_else(|| CliError::Config("missing [suite] block".into()))?;
    let mut sc = SuiteConfig::new(args.seed.unwrap_or(suite.master_seed), suite.samples);
    sc.velocity_dim = cfg.grid.velocity_dim();
    sc.v_max = cfg.grid.v_max();
    sc.nodes_per_axis = suite.nodes_per_axis.unwrap_or(cfg.grid.nodes_per_axis());
    sc.q_tail = suite.q_tail;
    sc.q_ratio = suite.q_ratio;
    if let Some(qs) = suite.lemma_qs {
        sc.lemma_qs = qs;
    }
    sc.starred = suite.starred;
    let outcomes = run_suite(&sc)?;
    let rows: usize = outcomes.iter().map(|o| o.report.rows.len()).sum();
    let failures: usize = outcomes
        .iter()
        .map(|o| o.report.rows.iter().filter(|r| !r.pass).count())
        .sum();
    let path = args.out.join("estimates.csv");
    output::write_file(&path, &output::estimates_csv(&outcomes))?;
    println!(
        "estimates: {} samples, {rows} rows, {failures} failures -> {}",
        outcomes.len(),
        path.display()
    );
    if failures > 0 {
        return Err(CliError::Runtime(format!(
            "{failures} inequality rows failed"
        )));
    }
    Ok(())
}

fn bridge(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(args)?;
    let p = &cfg.params;
    let (n1, n2) = cfg
        .initial
        .as_ref()
        .map(|(s1, s2)| {
            (
                s1.iter().map(|c| c.density).sum::<f64>(),
                s2.iter().map(|c| c.density).sum::<f64>(),
            )
        })
        .unwrap_or((1.0, 1.0));
    let rates = bridged_rates(p, n1, n2)?;
    let (clo, chi) = c_range(p);
    let cs = c_symmetric(p);
    let gamma_s = bgkmix::macroscopic::gamma_from_c(p.m1, p.delta, cs);
    println!("bridge (mean densities n1 = {n1}, n2 = {n2}):");
    println!("  delta        = {:.17e}", p.delta);
    println!("  gamma        = {:.17e}", p.gamma);
    println!("  lambda_u     = {:.17e}", rates.lambda_u);
    println!("  lambda_T     = {:.17e}", rates.lambda_t);
    println!("  c range      = [{clo:.17e}, {chi:.17e}]");
    println!("  c_symmetric  = {cs:.17e}");
    println!("  gamma(c_sym) = {gamma_s:.17e}");
    let csv = format!(
        "delta,gamma,lambda_u,lambda_t,c_lo,c_hi,c_symmetric,gamma_c_symmetric\n\
         {},{},{},{},{},{},{},{}\n",
        p.delta, p.gamma, rates.lambda_u, rates.lambda_t, clo, chi, cs, gamma_s
    );
    output::write_file(&args.out.join("bridge.csv"), &csv)?;
    Ok(())
}

fn compare(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(args)?;
    if cfg.grid.velocity_dim() != 3 {
        return Err(CliError::Config(
            "key `grid.velocity_dim`: the two-fluid comparison is three-dimensional".into(),
        ));
    }
    if cfg.grid.n_cells() != 1 {
        return Err(CliError::Config(
            "key `grid.n_cells`: the two-fluid comparison is space-homogeneous".into(),
        ));
    }
    if cfg.params.variant != ModelVariant::TwoTerm {
        return Err(CliError::Config(
            "key `model.variant`: the two-fluid comparison uses the two-term model".into(),
        ));
    }
    let sim = cfg
        .sim
        .clone()
        .ok_or_else(|| CliError::Config("missing [time] block".into()))?;
    let dt_macro = cfg.compare.as_ref().map(|c| c.dt_macro).unwrap_or(1e-3);

    let state = cfg.initial_state()?;
    let first = bgkmix::solver::diagnose(&state, &cfg.params, &cfg.grid, sim.nq_exponent, 0, 0.0)?;
    let (records, _) = run_simulation(state, &cfg.params, &cfg.grid, &sim)?;

    let masses = [cfg.params.m1, cfg.params.m2];
    let rates = bridged_rates(&cfg.params, first.mean_density[0], first.mean_density[1])?;
    let macro0 = TwoFluidState::from_primitives(
        first.mean_density,
        [first.bulk_velocity[0], first.bulk_velocity[1]],
        first.mean_temperature,
        masses,
    );
    let t_end = sim.dt * sim.n_steps as f64;
    let macro_steps = (t_end / dt_macro).round() as usize;
    let tick = sim.cadence as f64 * sim.dt;
    let macro_cadence = (tick / dt_macro).round().max(1.0) as usize;
    let trajectory =
        integrate_relaxation(&macro0, &rates, masses, dt_macro, macro_steps, macro_cadence)?;

    output::write_file(
        &args.out.join("kinetic.csv"),
        &output::diagnostics_csv(&records, 3),
    )?;
    output::write_file(
        &args.out.join("macroscopic.csv"),
        &output::two_fluid_csv(&trajectory, masses),
    )?;

    let mut max_dev: f64 = 0.0;
    for (r, (t, s)) in records.iter().zip(&trajectory) {
        if (r.t - t).abs() > 1e-9 {
            continue;
        }
        for k in 0..2 {
            max_dev = max_dev.max((r.bulk_velocity[k][0] - s.velocity[k][0]).abs());
            max_dev = max_dev.max((r.mean_temperature[k] - s.temperature(k, masses[k])).abs());
        }
    }
    println!(
        "compare: kinetic dt = {}, two-fluid dt = {dt_macro}, max moment deviation = {max_dev:.6e}",
        sim.dt
    );
    println!("  wrote {}/kinetic.csv and macroscopic.csv", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimates(a) => estimates(a),
        Command::Bridge(a) => bridge(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
