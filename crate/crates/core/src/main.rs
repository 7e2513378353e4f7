use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use strongcert::certify::{bisect_radius, strong_stability_test, BisectConfig, TestConfig};
use strongcert::evp::upper_bound_hierarchy;
use strongcert::gridscan::{export_surface, scan, ScanConfig};
use strongcert::hermite::hermite_of_system;
use strongcert::sosgram::{build_relaxation, dump_json, export_sdpa, RelaxationMode};
use strongcert::{DelaySystem, Error};

#[derive(Parser)]
#[command(name = "strongcert", version, about = "Strong stability of delay difference equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit timings so that reports are reproducible byte for byte.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Grid estimate of the strong-stability radius.
    Scan {
        input: PathBuf,
        /// Points per dimension.
        #[arg(long, default_value_t = 360)]
        points: usize,
        /// Scan every angle instead of fixing the last one at zero.
        #[arg(long)]
        full: bool,
        /// Local refinement passes.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        /// Write every grid value to this CSV file.
        #[arg(long)]
        surface: Option<PathBuf>,
    },
    /// Certify or refute positivity of the Hermite matrix at one scaling.
    Certify {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Initial relaxation order (default: n).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Certified bracket of the strong-stability radius.
    Bisect {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long)]
        order: Option<usize>,
        /// Grid points per dimension of the initial scan.
        #[arg(long, default_value_t = 360)]
        points: usize,
    },
    /// Write the relaxation without solving it.
    Export {
        input: PathBuf,
        /// Destination file.
        #[arg(long, short = 'o')]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Sdpa)]
        format: Format,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        order: Option<usize>,
        /// Export the feasibility form instead of the bound form.
        #[arg(long)]
        feasibility: bool,
    },
    /// Upper-bound hierarchy of the minimum eigenvalue of the Hermite matrix.
    Bounds {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Sdpa,
    Json,
}

fn emit(report: &Value, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let timing = !cli.no_timing;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Scan {
            input,
            points,
            full,
            refine,
            surface,
        } => {
            let sys = DelaySystem::from_json_file(&input)?;
            let cfg = ScanConfig {
                n_points: points,
                use_simplified: !full,
                refine,
                keep_surface: surface.is_some(),
            };
            let t = Instant::now();
            let res = scan(&sys, &cfg)?;
            let elapsed = t.elapsed().as_secs_f64() * 1e3;
            if let Some(p) = &surface {
                export_surface(&res, p)?;
            }
            let mut v = json!({ "gamma0_scan": res.refined_estimate, "scan": res });
            if timing {
                v["timings"] = json!({ "scan_ms": elapsed });
            }
            emit(&v, out)?;
            Ok(0)
        }
        Command::Certify { input, gamma, order } => {
            let sys = DelaySystem::from_json_file(&input)?;
            let cfg = TestConfig {
                gamma,
                order,
                ..TestConfig::default()
            };
            let r = strong_stability_test(&sys, &cfg)?;
            emit(&r.to_json(timing), out)?;
            Ok(r.verdict.exit_code() as u8)
        }
        Command::Bisect {
            input,
            tol,
            order,
            points,
        } => {
            let sys = DelaySystem::from_json_file(&input)?;
            let mut cfg = BisectConfig {
                tol,
                ..BisectConfig::default()
            };
            cfg.test.order = order;
            cfg.scan.n_points = points;
            let r = bisect_radius(&sys, &cfg)?;
            emit(&r.to_json(timing), out)?;
            Ok(r.verdict.exit_code() as u8)
        }
        Command::Export {
            input,
            file,
            format,
            gamma,
            order,
            feasibility,
        } => {
            let sys = DelaySystem::from_json_file(&input)?;
            let h = hermite_of_system(&sys, gamma)?;
            let k = order.unwrap_or(sys.n());
            let mode = if feasibility {
                RelaxationMode::Feasibility
            } else {
                RelaxationMode::MaximizeLowerBound
            };
            let r = build_relaxation(&h.h, k, mode)?;
            match format {
                Format::Sdpa => export_sdpa(&r.problem, &file)?,
                Format::Json => {
                    let text = serde_json::to_string(&dump_json(&r.problem))?;
                    std::fs::write(&file, text).map_err(|e| Error::io(&file, e))?;
                }
            }
            let v = json!({
                "file": file,
                "gamma": gamma,
                "mode": mode,
                "dims": r.dims,
                "N": r.dims.n_vec,
                "M": r.dims.constraints,
                "S": r.dims.s,
            });
            emit(&v, out)?;
            Ok(0)
        }
        Command::Bounds { input, gamma, k_max } => {
            let sys = DelaySystem::from_json_file(&input)?;
            let h = hermite_of_system(&sys, gamma)?;
            let rows: Vec<Value> = upper_bound_hierarchy(&h.h, k_max)?
                .into_iter()
                .map(|(k, v)| json!({ "k": k, "upper_bound": v }))
                .collect();
            emit(&json!({ "gamma": gamma, "bounds": rows }), out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = std::env::var("STRONGCERT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
