//! Command-line front end for the blockfade library.
//!
//! Five subcommands: `waterfill` (water level and capacity), `bounds`
//! (second-order rates for one constraint), `figure` (sweep reproduction as
//! CSV plus a metadata sidecar), `simulate` (seeded Monte Carlo runs), and
//! `moddev` (moderate-deviation bracket endpoints).
//!
//! Parameters are `key=value` pairs, from a `--config` file and/or the
//! command line (command line wins). Exit codes: 0 success, 1 domain error
//! (solver, quadrature, simulation — including a simulation whose recorded
//! statistical assertions fired), 2 usage error. Failures print one
//! machine-readable line: `error: kind=<usage|domain|io> msg="..."`.

mod figures;
mod output;
mod params;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use blockfade::bounds::{
    ap_bounds, c_eps, default_alpha_grid, eh_bounds, eh_bounds_refined, moddev_bracket,
    no_csit_bounds, pp_bounds, pp_bounds_best_alpha, Constraint, RateBoundResult,
};
use blockfade::dispersion::dispersion_set;
use blockfade::quadrature::Quadrature;
use blockfade::simulate::{
    info_density_moments, power_violation_prob, save_and_transmit, save_and_transmit_trace, SimConfig,
};
use blockfade::waterfilling::{solve_waterfill, ChannelConfig};

use output::{fmt_sig, meta_path, render_kv, write_atomic, Cell, Table};
use params::Params;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) => m,
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "blockfade",
    version,
    about = "Finite-blocklength rate bounds for block-fading channels with transmitter CSI"
)]
struct Cli {
    /// Config file of key=value lines; command-line pairs take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file. Scalar commands print to stdout when omitted; `figure`
    /// defaults to `<name>.csv` under $BLOCKFADE_OUT_DIR (or the working
    /// directory).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Tab-separated output instead of commas.
    #[arg(long, global = true)]
    tsv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the water level and ergodic capacity.
    Waterfill {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Second-order rate bounds (constraint=pp|ap|eh|nocsit).
    Bounds {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Reproduce a figure sweep (fig1..fig4) as CSV with a metadata sidecar.
    Figure {
        #[arg(value_name = "NAME")]
        name: String,
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Run a Monte Carlo oracle (save-transmit | info-density | power-violation).
    Simulate {
        #[arg(value_name = "KIND")]
        kind: String,
        /// Dump a per-slot CSV trace of trial 0 (save-transmit only).
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Moderate-deviation bracket endpoints (constraint=pp|ap|eh).
    Moddev {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: kind={} msg=\"{}\"", e.kind(), e.message());
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let q = Quadrature::default();
    match &cli.command {
        Command::Waterfill { params } => {
            let mut p = Params::from_sources(cli.config.as_deref(), params)?;
            let law = p.fading_law()?;
            let sigma_n2 = p.f64_required("sigmaN2")?;
            let pbar = p.power_required("pbar")?;
            p.finish()?;
            let sol = solve_waterfill(&law, sigma_n2, pbar, &q).map_err(domain)?;
            let pairs = vec![
                kv("lambda", sol.lambda),
                kv("pbar", sol.pbar),
                kv("capacity", sol.capacity),
                kv("threshold", sol.threshold()),
            ];
            emit_scalar(&cli, &pairs)
        }
        Command::Bounds { params } => {
            let mut p = Params::from_sources(cli.config.as_deref(), params)?;
            let result = run_bounds(&mut p, &q)?;
            p.finish()?;
            emit_scalar(&cli, &bound_pairs(&result))
        }
        Command::Moddev { params } => {
            let mut p = Params::from_sources(cli.config.as_deref(), params)?;
            let (constraint, bracket) = run_moddev(&mut p, &q)?;
            p.finish()?;
            let pairs = vec![
                ("constraint".to_string(), constraint),
                kv("lo", bracket.lo),
                kv("hi", bracket.hi),
            ];
            emit_scalar(&cli, &pairs)
        }
        Command::Figure { name, params } => {
            let mut p = Params::from_sources(cli.config.as_deref(), params)?;
            let fig = figures::run_figure(name, &mut p)?;
            let out = match &cli.out {
                Some(path) => path.clone(),
                None => default_out_dir().join(format!("{name}.csv")),
            };
            write_atomic(&out, &fig.table.render(cli.tsv))?;
            write_atomic(&meta_path(&out), &render_kv(&fig.meta))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Simulate { kind, trace, params } => {
            let mut p = Params::from_sources(cli.config.as_deref(), params)?;
            run_simulate(&cli, kind, trace.as_deref(), &mut p)
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn kv(key: &str, value: f64) -> (String, String) {
    (key.to_string(), fmt_sig(value))
}

fn default_out_dir() -> PathBuf {
    std::env::var_os("BLOCKFADE_OUT_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Print key=value lines; mirror them as a one-row CSV when --out is given.
fn emit_scalar(cli: &Cli, pairs: &[(String, String)]) -> Result<(), CliError> {
    print!("{}", render_kv(pairs));
    if let Some(out) = &cli.out {
        let mut table = Table::new(&pairs.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>());
        table.push(pairs.iter().map(|(_, v)| Cell::Text(v.clone())).collect());
        write_atomic(out, &table.render(cli.tsv))?;
    }
    Ok(())
}

fn channel_config(p: &mut Params) -> Result<ChannelConfig, CliError> {
    let sigma_n2 = p.f64_required("sigmaN2")?;
    let nc = u32::try_from(p.u64_required("nc")?)
        .map_err(|_| CliError::Usage("nc is too large".into()))?;
    let blocks = u32::try_from(p.u64_required("B")?)
        .map_err(|_| CliError::Usage("B is too large".into()))?;
    let eps = p.f64_required("eps")?;
    ChannelConfig::new(sigma_n2, nc, blocks, eps).map_err(domain)
}

fn run_bounds(p: &mut Params, q: &Quadrature) -> Result<RateBoundResult, CliError> {
    let constraint = p
        .str_opt("constraint")
        .ok_or_else(|| CliError::Usage("missing required key: constraint".into()))?;
    let law = p.fading_law()?;
    let cfg = channel_config(p)?;

    match constraint.as_str() {
        "pp" | "ap" => {
            let pbar = p.power_required("pbar")?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, pbar, q).map_err(domain)?;
            let disp = dispersion_set(&sol, &cfg, None, q).map_err(domain)?;
            if constraint == "ap" {
                Ok(ap_bounds(&sol, &cfg, &disp))
            } else if let Some(alpha) = p.f64_opt("alpha")? {
                pp_bounds(&sol, &cfg, &disp, alpha).map_err(domain)
            } else {
                pp_bounds_best_alpha(&sol, &cfg, &disp, &default_alpha_grid()).map_err(domain)
            }
        }
        "eh" => {
            let energy = p.energy_law()?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, energy.mean(), q).map_err(domain)?;
            let disp = dispersion_set(&sol, &cfg, Some(&energy), q).map_err(domain)?;
            if let Some(alpha) = p.f64_opt("alpha")? {
                eh_bounds(&sol, &cfg, &disp, &energy, &[alpha]).map_err(domain)
            } else {
                eh_bounds_refined(&sol, &cfg, &disp, &energy).map_err(domain)
            }
        }
        "nocsit" => {
            let pbar = p.power_required("pbar")?;
            no_csit_bounds(&law, &cfg, pbar, q).map_err(domain)
        }
        other => Err(CliError::Usage(format!(
            "constraint must be pp, ap, eh, or nocsit, got {other}"
        ))),
    }
}

fn bound_pairs(r: &RateBoundResult) -> Vec<(String, String)> {
    let mut pairs = vec![
        ("constraint".to_string(), r.constraint.to_string()),
        ("n".to_string(), r.n.to_string()),
        kv("capacity", r.capacity),
        kv("lower", r.lower),
        kv("upper", r.upper),
    ];
    let c = &r.constants;
    if let Some(v) = c.c_eps {
        pairs.push(kv("c_eps", v));
    }
    if let Some(v) = c.alpha {
        pairs.push(kv("alpha", v));
    }
    if let Some(v) = c.k_eps_alpha {
        pairs.push(kv("k_eps_alpha", v));
    }
    if let Some(v) = c.v_eps_alpha {
        pairs.push(kv("v_eps_alpha", v));
    }
    if let Some(v) = c.save_slots {
        pairs.push(kv("save_slots", v));
    }
    pairs.push(kv("dispersion_lower", c.dispersion_lower));
    pairs.push(kv("dispersion_upper", c.dispersion_upper));
    pairs.push(("lower_remainder".to_string(), r.lower_remainder.to_string()));
    pairs.push(("upper_remainder".to_string(), r.upper_remainder.to_string()));
    if let Some(n0) = r.crossover_n0 {
        pairs.push(("crossover_n0".to_string(), n0.to_string()));
    }
    pairs
}

fn run_moddev(p: &mut Params, q: &Quadrature) -> Result<(String, blockfade::ModDevBracket), CliError> {
    let constraint = p
        .str_opt("constraint")
        .ok_or_else(|| CliError::Usage("missing required key: constraint".into()))?;
    let law = p.fading_law()?;
    let cfg = channel_config(p)?;
    match constraint.as_str() {
        "pp" | "ap" => {
            let pbar = p.power_required("pbar")?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, pbar, q).map_err(domain)?;
            let disp = dispersion_set(&sol, &cfg, None, q).map_err(domain)?;
            let which = if constraint == "pp" { Constraint::PeakPower } else { Constraint::AveragePower };
            Ok((constraint, moddev_bracket(&disp, which).map_err(domain)?))
        }
        "eh" => {
            let energy = p.energy_law()?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, energy.mean(), q).map_err(domain)?;
            let disp = dispersion_set(&sol, &cfg, Some(&energy), q).map_err(domain)?;
            Ok((constraint, moddev_bracket(&disp, Constraint::EnergyHarvest).map_err(domain)?))
        }
        other => Err(CliError::Usage(format!("constraint must be pp, ap, or eh, got {other}"))),
    }
}

fn run_simulate(cli: &Cli, kind: &str, trace: Option<&Path>, p: &mut Params) -> Result<(), CliError> {
    let q = Quadrature::default();
    let seed = p.u64_required("seed")?;
    let trials = p.u64_or("trials", 100_000)?;
    let law = p.fading_law()?;
    let cfg = channel_config(p)?;

    let (report, extra): (blockfade::SimReport, Vec<(String, String)>) = match kind {
        "info-density" => {
            let pbar = p.power_required("pbar")?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, pbar, &q).map_err(domain)?;
            p.finish()?;
            let sim = SimConfig::new(seed, trials, cfg, sol).map_err(domain)?;
            (info_density_moments(&sim).map_err(domain)?, Vec::new())
        }
        "power-violation" => {
            let pbar = p.power_required("pbar")?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, pbar, &q).map_err(domain)?;
            let delta_n = match p.f64_opt("delta_n")? {
                Some(d) => d,
                None => {
                    // The achievability analysis backs the sphere off by
                    // δ_n = 2λ c_ε / (P̄ √n).
                    let alpha = p.f64_or("alpha", 0.5)?;
                    2.0 * sol.lambda * c_eps(cfg.nc, cfg.eps, alpha) / (pbar * (cfg.n() as f64).sqrt())
                }
            };
            p.finish()?;
            let sim = SimConfig::new(seed, trials, cfg, sol)
                .map_err(domain)?
                .with_delta_n(delta_n)
                .map_err(domain)?;
            (power_violation_prob(&sim).map_err(domain)?, Vec::new())
        }
        "save-transmit" => {
            let energy = p.energy_law()?;
            let sol = solve_waterfill(&law, cfg.sigma_n2, energy.mean(), &q).map_err(domain)?;
            let save_slots = match p.u64_opt("save_slots")? {
                Some(s) => s,
                None => {
                    let disp = dispersion_set(&sol, &cfg, Some(&energy), &q).map_err(domain)?;
                    let r = eh_bounds_refined(&sol, &cfg, &disp, &energy).map_err(domain)?;
                    r.constants.save_slots.expect("eh bounds record save slots").ceil() as u64
                }
            };
            p.finish()?;
            let sim = SimConfig::new(seed, trials, cfg, sol)
                .map_err(domain)?
                .with_energy(energy)
                .with_save_slots(save_slots);
            if let Some(path) = trace {
                let mut buf = Vec::new();
                save_and_transmit_trace(&sim, 0, &mut buf).map_err(domain)?;
                write_atomic(path, &String::from_utf8_lossy(&buf))?;
            }
            (save_and_transmit(&sim).map_err(domain)?, Vec::new())
        }
        other => {
            return Err(CliError::Usage(format!(
                "simulate kind must be save-transmit, info-density, or power-violation, got {other}"
            )));
        }
    };

    let mut pairs: Vec<(String, String)> = vec![
        ("kind".to_string(), kind.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("trials".to_string(), report.trials.to_string()),
        kv("estimate", report.estimate),
        kv("std_error", report.std_error),
    ];
    for (k, v) in &report.details {
        pairs.push(kv(k, *v));
    }
    pairs.extend(extra);
    pairs.push(("violated_assertions".to_string(), report.violated_assertions.len().to_string()));

    print!("{}", render_kv(&pairs));
    for msg in &report.violated_assertions {
        println!("violation=\"{msg}\"");
    }
    if let Some(out) = &cli.out {
        let mut table = Table::new(&pairs.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>());
        table.push(pairs.iter().map(|(_, v)| Cell::Text(v.clone())).collect());
        write_atomic(out, &table.render(cli.tsv))?;
    }
    if report.violated_assertions.is_empty() {
        Ok(())
    } else {
        Err(CliError::Domain(format!(
            "{} statistical assertion(s) violated; see report",
            report.violated_assertions.len()
        )))
    }
}
