use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halfmass::catalog::{MetricSpec, CATALOG};
use halfmass::field::Backend;
use halfmass::invariants::{Functional, Ladder};
use halfmass::quad::QuadratureRule;
use halfmass::run::{self, Format, Report, RunConfig};
use halfmass::Error;

/// Mass, center of mass and hyperbolic mass of catalog metrics on half-spaces.
///
/// Settings are taken from `--config` first; every flag given on the command
/// line overrides the corresponding config field.
#[derive(Parser)]
#[command(name = "halfmass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flat mass functionals (mass_adm, mass_geometric; mass_bulk on request).
    Mass(RunArgs),
    /// Center of mass, both formulas, every tangential component.
    Center(RunArgs),
    /// Hyperbolic mass functional, charge and geometric forms.
    Hypmass(RunArgs),
    /// Pohozaev, Codazzi and static-potential residual checks.
    Identities(RunArgs),
    /// Decay report of a metric against its model.
    Decay(RunArgs),
    /// Catalog of metrics.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    #[arg(long)]
    metric: Option<String>,
    /// KEY=VAL, repeatable.
    #[arg(long = "param", value_name = "KEY=VAL")]
    params: Vec<String>,
    #[arg(long)]
    n: Option<usize>,
    /// START,FACTOR,COUNT
    #[arg(long)]
    radii: Option<String>,
    /// POLAR,AZIMUTH,RADIAL
    #[arg(long)]
    quad: Option<String>,
    /// analytic | fd2 | fd4
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json | csv | both
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict to these functionals (e.g. mass_bulk), repeatable.
    #[arg(long = "functional")]
    functionals: Vec<String>,
}

fn split3(flag: &str, s: &str) -> Result<[String; 3], Error> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    parts
        .try_into()
        .map_err(|_| Error::Config(format!("--{flag} expects three comma-separated values, got `{s}`")))
}

fn num<T: std::str::FromStr>(flag: &str, s: &str) -> Result<T, Error> {
    s.parse()
        .map_err(|_| Error::Config(format!("--{flag}: cannot parse `{s}`")))
}

impl RunArgs {
    /// Config file (if any) with the flags applied on top.
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => {
                let name = self
                    .metric
                    .clone()
                    .ok_or_else(|| Error::Config("--metric is required without --config".into()))?;
                RunConfig::new(MetricSpec::new(&name, 3))
            }
        };
        if let Some(m) = &self.metric {
            cfg.metric.name = m.clone();
        }
        if let Some(n) = self.n {
            cfg.metric.n = n;
        }
        for kv in &self.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--param expects KEY=VAL, got `{kv}`")))?;
            cfg.metric.params.insert(k.trim().to_string(), num("param", v.trim())?);
        }
        if let Some(s) = &self.radii {
            let [a, b, c] = split3("radii", s)?;
            cfg.radii = Some(Ladder {
                start: num("radii", &a)?,
                factor: num("radii", &b)?,
                count: num("radii", &c)?,
            });
        }
        if let Some(s) = &self.quad {
            let [a, b, c] = split3("quad", s)?;
            cfg.quad = Some(QuadratureRule {
                polar: num("quad", &a)?,
                azimuth: num("quad", &b)?,
                radial: num("quad", &c)?,
            });
        }
        if let Some(b) = &self.backend {
            cfg.backend = b.parse::<Backend>()?;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse::<Format>()?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if !self.functionals.is_empty() {
            cfg.functionals = self
                .functionals
                .iter()
                .map(|f| {
                    serde_json::from_value::<Functional>(serde_json::Value::String(f.clone()))
                        .map_err(|_| Error::Config(format!("unknown functional `{f}`")))
                })
                .collect::<Result<_, _>>()?;
        }
        Ok(cfg)
    }
}

enum Outcome {
    Ok,
    Flagged(String),
}

fn emit(cfg: &RunConfig, reports: &[Report]) -> Result<Outcome, Error> {
    match &cfg.out {
        Some(dir) => {
            for p in run::write_reports(reports, dir, cfg.format)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => match cfg.format {
            Format::Csv => {
                for r in reports {
                    println!("# {}", r.functional);
                    print!("{}", r.to_csv());
                }
            }
            _ => println!("{}", serde_json::to_string_pretty(reports)?),
        },
    }
    for r in reports {
        eprintln!(
            "{:22} limit {:+.9e}  error {:.2e}  rate {}{}",
            r.functional,
            r.limit,
            r.error,
            r.rate.map_or("-".into(), |v| format!("{v:.3}")),
            if r.flagged { "  FLAGGED" } else { "" }
        );
    }
    let flagged: Vec<&str> = reports.iter().filter(|r| r.flagged).map(|r| r.functional.as_str()).collect();
    Ok(if flagged.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Flagged(format!("not converged: {}", flagged.join(", ")))
    })
}

fn emit_value<T: serde::Serialize>(cfg: &RunConfig, name: &str, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let p = dir.join(format!("{name}.json"));
            std::fs::write(&p, text + "\n")?;
            eprintln!("wrote {}", p.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Catalog {
            action: CatalogAction::List,
        } => {
            for e in CATALOG {
                let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{:24} {:10} {}  [{}]", e.name, format!("{:?}", e.model).to_lowercase(), e.summary, params.join(" "));
            }
            Ok(Outcome::Ok)
        }
        Command::Mass(a) => {
            let cfg = a.config()?;
            emit(&cfg, &run::run_mass(&cfg)?)
        }
        Command::Center(a) => {
            let cfg = a.config()?;
            emit(&cfg, &run::run_center(&cfg)?)
        }
        Command::Hypmass(a) => {
            let cfg = a.config()?;
            emit(&cfg, &run::run_hypmass(&cfg)?)
        }
        Command::Identities(a) => {
            let cfg = a.config()?;
            let reports = run::run_identities(&cfg)?;
            emit_value(&cfg, "identities", &reports)?;
            for r in &reports {
                eprintln!("{:10} max {:.3e}  tolerance {:.0e}  {}", r.identity, r.max, r.tolerance, if r.pass { "pass" } else { "FAIL" });
            }
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.identity.as_str()).collect();
            Ok(if failed.is_empty() {
                Outcome::Ok
            } else {
                Outcome::Flagged(format!("residuals above tolerance: {}", failed.join(", ")))
            })
        }
        Command::Decay(a) => {
            let cfg = a.config()?;
            let report = run::run_decay(&cfg)?;
            emit_value(&cfg, "decay", &report)?;
            Ok(match report.violation() {
                None => Outcome::Ok,
                Some(v) => Outcome::Flagged(v),
            })
        }
    }
}

/// Configuration and admission problems exit with 2; numerical failures with 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnknownMetric(_)
        | Error::Inadmissible(_)
        | Error::Incompatible(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::Dimension { .. }
        | Error::Arity { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("error: {}", msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}
