use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sfcavail::config::{ConfigError, ConfigFile};
use sfcavail::optimizer::{self, Outcome};
use sfcavail::report::{self, AnalysisReport};
use sfcavail::sensitivity::{self, Parameter, SweepSpec};
use sfcavail::sim::{simulate_chain, SimConfig};
use sfcavail::{evaluate_chain, ChainSpec, PerfVector, RedundancyVector};

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "sfcavail", version, about = "Availability of multi-tenant service function chains")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Chain configuration (JSON).
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Override every subsystem's redundancy bound.
    #[arg(long = "max-redundancy")]
    max_redundancy: Option<u32>,
}

#[derive(Args)]
struct Target {
    /// Availability requirement; defaults to the config's targets.A0.
    #[arg(long = "A0")]
    a0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one redundancy configuration.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Redundancy vector such as 2,3,3,3,3 (default: all ones).
        #[arg(short = 'l', long = "redundancy")]
        l: Option<RedundancyVector>,
    },
    /// Find every minimal-cost configuration meeting the target.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
    },
    /// Re-optimize for a list of demand vectors.
    DemandSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        /// Demand vector such as 20000,30000; repeatable.
        #[arg(long = "demand", required = true)]
        demands: Vec<String>,
        /// Reset instance counts to ceil(w_i / capacity) for each demand.
        #[arg(long)]
        recompute_instances: bool,
    },
    /// Availability as one rate varies, all others nominal.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        param: Parameter,
        /// Mean-time range FROM:TO in the parameter's unit (hours, or
        /// minutes for mu_s and mu_v); default nominal/2 to 2x nominal.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Configuration to sweep (default: first optimum for the target).
        #[arg(short = 'l', long = "redundancy")]
        l: Option<RedundancyVector>,
    },
    /// Rate at which the configuration stops meeting the target.
    Threshold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        /// Parameter to search; every parameter when omitted.
        #[arg(long)]
        param: Option<Parameter>,
        #[arg(short = 'l', long = "redundancy")]
        l: Option<RedundancyVector>,
    },
    /// Monte Carlo estimate of availability.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'l', long = "redundancy")]
        l: Option<RedundancyVector>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Model seconds per replication.
        #[arg(long, default_value_t = 1e8)]
        horizon: f64,
        /// Discarded model seconds (default 1% of the horizon).
        #[arg(long)]
        warmup: Option<f64>,
        #[arg(long, default_value_t = 20)]
        replications: u32,
    },
}

enum Failure {
    Config(String),
    Infeasible,
    Other(String),
}

impl From<sfcavail::Error> for Failure {
    fn from(e: sfcavail::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

struct Context {
    config: ConfigFile,
    spec: ChainSpec,
    out: Option<PathBuf>,
    format: Format,
}

impl Context {
    fn load(common: &Common) -> Result<Self, Failure> {
        let mut config = ConfigFile::load(&common.config).map_err(|e| match e {
            ConfigError::Io { .. } => Failure::Config(e.to_string()),
            _ => Failure::Config(format!("{}: {e}", common.config.display())),
        })?;
        if let Some(max) = common.max_redundancy {
            config.set_max_redundancy(max);
        }
        let spec = config.chain_spec();
        spec.validate()?;
        Ok(Self { config, spec, out: common.out.clone(), format: common.format })
    }

    fn target(&self, t: &Target) -> f64 {
        t.a0.unwrap_or(self.config.targets.a0)
    }

    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Other(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn emit_text(&self, text: &str) -> Result<(), Failure> {
        let mut w = self.writer()?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    fn no_csv(&self, what: &str) -> Result<(), Failure> {
        if self.format == Format::Csv {
            return Err(Failure::Config(format!("{what} has no CSV output")));
        }
        Ok(())
    }

    /// Explicit configuration, or the first optimum for the target.
    fn config_or_optimum(&self, l: Option<RedundancyVector>, target: f64) -> Result<RedundancyVector, Failure> {
        if let Some(l) = l {
            return Ok(l);
        }
        match optimizer::optimize(&self.spec, target)? {
            Outcome::Optimal(r) => Ok(r.optima[0].clone()),
            Outcome::Infeasible(_) => Err(Failure::Infeasible),
        }
    }
}

fn parse_demand(text: &str) -> Result<PerfVector, Failure> {
    text.split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| Failure::Config(format!("demand '{text}': {e}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(PerfVector::new)
}

fn parse_range(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Config(format!("range '{text}' must be FROM:TO with positive numbers"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(a > 0.0 && b > 0.0) {
        return Err(bad());
    }
    Ok((a, b))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common, l } => {
            let ctx = Context::load(&common)?;
            ctx.no_csv("analyze")?;
            let l = l.unwrap_or_else(|| ctx.spec.minimal_redundancy());
            let result = evaluate_chain(&ctx.spec, &l)?;
            let report = AnalysisReport::new(&ctx.spec, &l, &result);
            match ctx.format {
                Format::Json => ctx.emit_json(&report),
                _ => ctx.emit_text(&report.to_text()),
            }
        }
        Command::Optimize { common, target } => {
            let ctx = Context::load(&common)?;
            let outcome = optimizer::optimize(&ctx.spec, ctx.target(&target))?;
            match ctx.format {
                Format::Json => ctx.emit_json(&outcome)?,
                Format::Csv => {
                    let mut w = ctx.writer()?;
                    report::write_evaluations_csv(outcome.evaluations(), &mut w)?;
                    w.flush()?;
                }
                Format::Text => ctx.emit_text(&report::outcome_text(&outcome))?,
            }
            match outcome {
                Outcome::Optimal(_) => Ok(()),
                Outcome::Infeasible(_) => Err(Failure::Infeasible),
            }
        }
        Command::DemandSweep { common, target, demands, recompute_instances } => {
            let ctx = Context::load(&common)?;
            ctx.no_csv("demand-sweep")?;
            let demands = demands.iter().map(|d| parse_demand(d)).collect::<Result<Vec<_>, _>>()?;
            let rows = optimizer::demand_sweep(&ctx.spec, &demands, ctx.target(&target), recompute_instances)?;
            match ctx.format {
                Format::Json => ctx.emit_json(&rows)?,
                _ => ctx.emit_text(&report::demand_rows_text(&rows))?,
            }
            if rows.iter().any(|r| matches!(r.outcome, Outcome::Infeasible(_))) {
                return Err(Failure::Infeasible);
            }
            Ok(())
        }
        Command::Sweep { common, target, param, range, points, l } => {
            let ctx = Context::load(&common)?;
            let a0 = ctx.target(&target);
            let l = ctx.config_or_optimum(l, a0)?;
            let nominal = param.to_human(param.nominal(&ctx.spec));
            let (from, to) = match range {
                Some(r) => parse_range(&r)?,
                None => (nominal / 2.0, nominal * 2.0),
            };
            let mut times = sensitivity::log_spaced(from, to, points.max(1));
            times.dedup();
            let sweep = SweepSpec::from_mean_times(param, &times, l.clone(), a0)?;
            let points = sensitivity::sweep(&ctx.spec, &sweep)?;
            match ctx.format {
                Format::Json => ctx.emit_json(&points),
                Format::Csv => {
                    let mut w = ctx.writer()?;
                    sensitivity::write_csv(&points, &mut w)?;
                    w.flush()?;
                    Ok(())
                }
                Format::Text => {
                    let mut s = format!("sweep of {param} on {l}, target {a0}\n");
                    let unit = param.human_unit().as_str();
                    for p in &points {
                        let mark = if p.availability >= a0 { ' ' } else { '*' };
                        s += &format!("  1/{param} = {:>12.4} {unit:<7}  U = {:.4e} {mark}\n", p.value_human, p.unavailability);
                    }
                    if let Some(c) = crossing(&points, a0) {
                        s += &format!("target crossed near 1/{param} = {c:.4} {unit}\n");
                    }
                    ctx.emit_text(&s)
                }
            }
        }
        Command::Threshold { common, target, param, l } => {
            let ctx = Context::load(&common)?;
            ctx.no_csv("threshold")?;
            let a0 = ctx.target(&target);
            let l = ctx.config_or_optimum(l, a0)?;
            let params: Vec<Parameter> = match param {
                Some(p) => vec![p],
                None => Parameter::ALL.to_vec(),
            };
            let found = params
                .iter()
                .map(|&p| sensitivity::find_threshold(&ctx.spec, &l, p, a0))
                .collect::<Result<Vec<_>, _>>()?;
            match ctx.format {
                Format::Json => ctx.emit_json(&found),
                _ => {
                    let mut s = format!("thresholds for {l}, target {a0}\n");
                    for t in &found {
                        s += &format!(
                            "  {:<9} {:.6e} /s   1/rate = {:.4} {}\n",
                            t.parameter.name(),
                            t.per_second,
                            t.human,
                            t.unit.as_str()
                        );
                    }
                    ctx.emit_text(&s)
                }
            }
        }
        Command::Simulate { common, l, seed, horizon, warmup, replications } => {
            let ctx = Context::load(&common)?;
            ctx.no_csv("simulate")?;
            let l = l.unwrap_or_else(|| ctx.spec.minimal_redundancy());
            let mut cfg = SimConfig::new(horizon, seed, replications);
            if let Some(w) = warmup {
                cfg.warmup = w;
            }
            let est = simulate_chain(&ctx.spec, &l, &cfg)?;
            match ctx.format {
                Format::Json => ctx.emit_json(&est),
                _ => ctx.emit_text(&format!(
                    "configuration  {l}\navailability   {:.12} ± {:.3e} (1 s.e., {} replications, horizon {:e} s, seed {})\n",
                    est.availability_mean, est.std_error, est.replications, est.horizon, est.seed
                )),
            }
        }
    }
}

/// Mean time at which availability first crosses the target, by log-linear
/// interpolation between adjacent sweep points.
fn crossing(points: &[sensitivity::SweepPoint], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if (a.availability >= target) == (b.availability >= target) {
            return None;
        }
        let t = (target - a.availability) / (b.availability - a.availability);
        Some((a.value_human.ln() + t * (b.value_human.ln() - a.value_human.ln())).exp())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Infeasible) => {
            eprintln!("no configuration meets the availability target");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
