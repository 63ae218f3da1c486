use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conestab::axioms::{check_axioms, standard_scalars, AxiomReport};
use conestab::harness::{run, run_timed, BaseMap, Engine, ExperimentConfig, NoiseKind, NoiseSpec, RunReport};
use conestab::{instances, Tabulation};

#[derive(Parser)]
#[command(name = "conestab", version, about = "Stabilize approximately additive maps into locally convex cones")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Attach wall-clock timing to run reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Cone,
    Normed,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Cone => Engine::Cone,
            EngineArg::Normed => Engine::Normed,
            EngineArg::Both => Engine::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML or JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the cone, preorder and neighborhood laws on a seeded sample.
    CheckAxioms {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        scalars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stabilize a hash-perturbed linear map `x ↦ c·x`.
    Stabilize {
        #[arg(long)]
        instance: String,
        /// Coefficient `c` of the base map.
        #[arg(long, allow_negative_numbers = true)]
        base: f64,
        /// Noise magnitude.
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = EngineArg::Cone)]
        engine: EngineArg,
        /// Neighborhood scale; defaults to `max(1, 3·eps)`.
        #[arg(long)]
        v_scale: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> io::Result<u8> {
    match &cli.command {
        Command::Run { config, out } => {
            let report = match ExperimentConfig::from_path(config) {
                Ok(cfg) => execute(&cfg, cli.timing),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(exit_code(e.exit_code()));
                }
            };
            emit_run(&report, cli.format, out.as_ref())?;
            Ok(exit_code(report.exit_code))
        }
        Command::CheckAxioms {
            instance,
            samples,
            scalars,
            seed,
            out,
        } => {
            let target = match instances::from_name(instance) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(1);
                }
            };
            let report = check_axioms(&target, &target.sample(*seed, *samples), &standard_scalars(*seed, *scalars));
            emit_axioms(&report, cli.format, out.as_ref())?;
            Ok(if report.all_passed() { 0 } else { 2 })
        }
        Command::Stabilize {
            instance,
            base,
            eps,
            seed,
            depth,
            engine,
            v_scale,
            out,
        } => {
            let mut cfg = ExperimentConfig::new(instance.clone(), BaseMap::Coefficient(*base));
            cfg.noise = NoiseSpec::new(NoiseKind::BoundedHash, *eps, *seed);
            cfg.v_scale = v_scale.unwrap_or_else(|| (3.0 * eps).max(1.0));
            cfg.depth = *depth;
            cfg.fixed_depth = true;
            cfg.engine = (*engine).into();
            let report = execute(&cfg, cli.timing);
            emit_run(&report, cli.format, out.as_ref())?;
            Ok(exit_code(report.exit_code))
        }
    }
}

fn execute(cfg: &ExperimentConfig, timing: bool) -> RunReport {
    if timing {
        run_timed(cfg)
    } else {
        run(cfg)
    }
}

fn exit_code(code: i32) -> u8 {
    u8::try_from(code).unwrap_or(1)
}

fn sink(out: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn emit_run(report: &RunReport, format: Format, out: Option<&PathBuf>) -> io::Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Json => writeln!(w, "{}", report.to_json()),
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            if let Some(failure) = &report.failure {
                csv.write_record(["status", "exit_code", "kind", "message"]).map_err(csv_err)?;
                csv.write_record(["failure", &report.exit_code.to_string(), failure.kind, &failure.message])
                    .map_err(csv_err)?;
                return csv.flush();
            }
            csv.write_record(["engine", "x", "value"]).map_err(csv_err)?;
            let mut rows = |engine: &str, table: &Tabulation| -> io::Result<()> {
                for (x, a) in table.entries() {
                    csv.write_record([engine, &x.to_string(), &a.to_string()]).map_err(csv_err)?;
                }
                Ok(())
            };
            if let Some(cone) = &report.cone {
                rows("cone", &cone.table)?;
            }
            if let Some(normed) = &report.normed {
                rows("normed", &normed.table)?;
            }
            csv.flush()
        }
    }
}

fn emit_axioms(report: &AxiomReport, format: Format, out: Option<&PathBuf>) -> io::Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
            writeln!(w, "{text}")
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["law", "checked", "failures", "witness"]).map_err(csv_err)?;
            for law in &report.laws {
                csv.write_record([
                    law.law.as_str(),
                    &law.checked.to_string(),
                    &law.failures.to_string(),
                    law.witness.as_deref().unwrap_or(""),
                ])
                .map_err(csv_err)?;
            }
            csv.flush()
        }
    }
}

