//! Command-line front end for the excess-functional laboratory.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 violation found by
//! `check` or `sweep`, 3 infeasible moment spec in `maximize`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use excesslab::extremal::{compactify, maximize, MaximizeOptions, MaximizeResult, MomentSpec};
use excesslab::inequalities::{check_excess_holder, check_excess_minkowski, sweep, SweepConfig};
use excesslab::report::{format_f64, gap_csv, scalar_csv, to_json};
use excesslab::scalar_analysis::h_chain;
use excesslab::search::{minkowski_counterexample, paper_counterexample, random_violation_search, SearchConfig};
use excesslab::{Exponents, GapReport, Inequality, JointDistribution};

const EXIT_VIOLATION: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "excesslab", version)]
#[command(about = "Check, sweep and stress the excess Minkowski and Hölder inequalities")]
struct Cli {
    /// Seed for every random choice; runs are reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "EXCESSLAB_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    #[value(name = "1st")]
    First,
    #[value(name = "2nd")]
    Second,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Bernoulli,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate both excess inequalities on a distribution file.
    Check {
        /// JSON file `{"atoms": [{"x": .., "y": .., "w": ..}, ...]}`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        inequality: Which,
    },
    /// Random-instance sweep of both inequalities.
    Sweep {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_atoms: usize,
        #[arg(long, default_value_t = 1.01)]
        p_min: f64,
        #[arg(long, default_value_t = 2.0)]
        p_max: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        theta_max: f64,
        #[arg(long, default_value_t = 10.0)]
        value_scale: f64,
    },
    /// Maximise the compactified objective for fixed moments.
    Maximize {
        /// Distribution whose moments fix the problem; also used as a warm start.
        #[arg(long, conflicts_with_all = ["m11", "m1p", "m21", "m2p"])]
        input: Option<PathBuf>,
        #[arg(long)]
        p: f64,
        #[arg(long, requires_all = ["m1p", "m21", "m2p"])]
        m11: Option<f64>,
        #[arg(long)]
        m1p: Option<f64>,
        #[arg(long)]
        m21: Option<f64>,
        #[arg(long)]
        m2p: Option<f64>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 6)]
        n_support: usize,
    },
    /// Emit a violation certificate for p > 2.
    Counterexample {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = Which::Second)]
        inequality: Which,
        #[arg(long, value_enum, default_value_t = Method::Bernoulli)]
        method: Method,
        /// Trials for `--method random`.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Tabulate h, h1, h2 and h2' on a (p, s) grid.
    Scalar {
        #[arg(long, default_value_t = 1.05)]
        p_min: f64,
        #[arg(long, default_value_t = 1.95)]
        p_max: f64,
        #[arg(long, default_value_t = 19)]
        p_steps: usize,
        #[arg(long, default_value_t = 50.0)]
        s_max: f64,
        #[arg(long, default_value_t = 2000)]
        s_steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configure thread pool")?;
    }
    let out = Output { format: cli.format, path: cli.output.clone() };
    match cli.command {
        Command::Check { input, p, theta, inequality } => {
            let dist = read_dist(&input)?;
            let e = Exponents::new(p, theta)?;
            let mut reports = Vec::new();
            if matches!(inequality, Which::First | Which::Both) {
                reports.push(check_excess_minkowski(&dist, &e)?);
            }
            if matches!(inequality, Which::Second | Which::Both) {
                reports.push(check_excess_holder(&dist, &e)?);
            }
            out.gap_reports(&reports)?;
            Ok(if reports.iter().all(|r| r.holds) { 0 } else { EXIT_VIOLATION })
        }
        Command::Sweep { trials, max_atoms, p_min, p_max, theta_min, theta_max, value_scale } => {
            let config = SweepConfig {
                trials,
                max_atoms,
                p_range: (p_min, p_max),
                theta_range: (theta_min, theta_max),
                seed: cli.seed,
                value_scale,
            };
            let summary = sweep(&config)?;
            match out.format {
                Format::Json => out.write(&to_json(&summary)?)?,
                Format::Csv => {
                    let rows: Vec<GapReport<f64>> = summary
                        .worst_instance
                        .iter()
                        .map(|w| {
                            let e = Exponents::new(w.p, w.theta).ok();
                            GapReport::new(w.inequality, w.lhs, w.rhs, e)
                        })
                        .collect();
                    out.write(&gap_csv(&rows))?
                }
            }
            Ok(if summary.violations == 0 { 0 } else { EXIT_VIOLATION })
        }
        Command::Maximize { input, p, m11, m1p, m21, m2p, restarts, n_support } => {
            let e = Exponents::new(p, 1.0)?;
            let mut options = MaximizeOptions { n_support, restarts, seed: cli.seed, ..MaximizeOptions::default() };
            let spec = match (input, m11, m1p, m21, m2p) {
                (Some(path), ..) => {
                    let (point, spec) = compactify(&read_dist(&path)?, &e)?;
                    options.warm_start = Some(point);
                    spec
                }
                (None, Some(a), Some(b), Some(c), Some(d)) => MomentSpec::new(a, b, c, d)?,
                _ => bail!("maximize needs --input or all of --m11 --m1p --m21 --m2p"),
            };
            let result = maximize(&spec, &e, &options)?;
            out.maximize(p, &spec, &result)?;
            Ok(if result.feasible { 0 } else { EXIT_INFEASIBLE })
        }
        Command::Counterexample { p, theta, inequality, method, trials } => {
            let e = Exponents::new(p, theta)?;
            let kinds: Vec<Inequality> = match inequality {
                Which::First => vec![Inequality::Minkowski],
                Which::Second => vec![Inequality::Holder],
                Which::Both => vec![Inequality::Minkowski, Inequality::Holder],
            };
            let mut certs = Vec::new();
            for kind in kinds {
                let cert = match (method, kind) {
                    (Method::Bernoulli, Inequality::Minkowski) => minkowski_counterexample(&e)?,
                    (Method::Bernoulli, _) => paper_counterexample(&e)?,
                    (Method::Random, _) => {
                        let config = SearchConfig { trials, seed: cli.seed, inequality: kind, ..SearchConfig::default() };
                        match random_violation_search(&e, &config)? {
                            Some(c) => c,
                            None => bail!("no violation of {kind} found in {trials} trials"),
                        }
                    }
                };
                cert.verify()?;
                certs.push(cert);
            }
            match out.format {
                Format::Json if certs.len() == 1 => out.write(&to_json(&certs[0])?)?,
                Format::Json => out.write(&to_json(&certs)?)?,
                Format::Csv => {
                    let rows: Vec<GapReport<f64>> = certs.iter().map(|c| c.replay()).collect::<excesslab::Result<_>>()?;
                    out.write(&gap_csv(&rows))?
                }
            }
            Ok(0)
        }
        Command::Scalar { p_min, p_max, p_steps, s_max, s_steps } => {
            if p_steps == 0 || s_steps == 0 {
                bail!("grid sizes must be at least 1");
            }
            let mut rows = Vec::with_capacity(p_steps * s_steps);
            for i in 0..p_steps {
                let p = grid(p_min, p_max, p_steps, i);
                for j in 0..s_steps {
                    let s = grid(0.0, s_max, s_steps, j);
                    rows.push((p, s, h_chain(p, s)?));
                }
            }
            match out.format {
                Format::Json => {
                    let rows: Vec<ScalarRow> = rows
                        .iter()
                        .map(|(p, s, c)| ScalarRow { p: *p, s: *s, h: c.h, h1: c.h1, h2: c.h2, h2_prime: c.h2_prime })
                        .collect();
                    out.write(&to_json(&rows)?)?
                }
                Format::Csv => out.write(&scalar_csv(&rows))?,
            }
            Ok(0)
        }
    }
}

fn grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

#[derive(Serialize)]
struct ScalarRow {
    p: f64,
    s: f64,
    h: f64,
    h1: f64,
    h2: f64,
    h2_prime: f64,
}

#[derive(Serialize)]
struct MaximizeOutput<'a> {
    p: f64,
    spec: &'a MomentSpec<f64>,
    #[serde(flatten)]
    result: &'a MaximizeResult,
}

fn read_dist(path: &Path) -> Result<JointDistribution<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    JointDistribution::from_json(&text).with_context(|| format!("parse {}", path.display()))
}

struct Output {
    format: Format,
    path: Option<PathBuf>,
}

impl Output {
    fn write(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("write {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn gap_reports(&self, reports: &[GapReport<f64>]) -> Result<()> {
        match self.format {
            Format::Json => self.write(&to_json(reports)?),
            Format::Csv => self.write(&gap_csv(reports)),
        }
    }

    fn maximize(&self, p: f64, spec: &MomentSpec<f64>, result: &MaximizeResult) -> Result<()> {
        match self.format {
            Format::Json => {
                self.write(&to_json(&MaximizeOutput { p, spec, result })?)
            }
            Format::Csv => {
                let mut text = String::from("index,u,v,w\n");
                if let Some(pt) = &result.point {
                    for i in 0..pt.len() {
                        text.push_str(&format!(
                            "{i},{},{},{}\n",
                            format_f64(pt.u[i]),
                            format_f64(pt.v[i]),
                            format_f64(pt.w[i])
                        ));
                    }
                }
                self.write(&text)
            }
        }
    }
}
