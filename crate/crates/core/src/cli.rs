//! Command-line front end: argument parsing, validation and dispatch.
//!
//! Every command writes one artifact, CSV or JSON, to standard output or to
//! `--out`. Failures print a single JSON object `{"error", "message"}` to
//! standard error and exit with the code of the error class.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, SweepRow};
use crate::error::{check_m, check_positive, invalid, Error, Result};
use crate::evolve::{self, EvolutionTrace, PeakSearch};
use crate::fullspace;
use crate::graph::build_linked_complete_capped;
use crate::output::fmt_sig;
use crate::perturbation::{self, medium_eigensystem, PredictionRecord, Thresholds};
use crate::reduced::{critical_gamma, gamma_first_order, gamma_linked_leading, gamma_unlinked};

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "qwsearch", version, about = "Quantum walk search on weight-linked complete graphs")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Success probability over time for one instance.
    Evolve {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        timing: Timing,
        #[command(flatten)]
        output: Output,
    },
    /// Analytic runtime and success probability for the weight scale of (M, w).
    Predict {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// Exact and predicted first peaks along w = k√M.
    SweepK {
        #[arg(long = "M")]
        m: usize,
        /// Comma-separated values of k.
        #[arg(long = "k", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        k: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Success probability traces for several weights, in long format.
    SweepTime {
        #[arg(long = "M")]
        m: usize,
        /// Comma-separated link weights.
        #[arg(long = "w", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        w: Vec<f64>,
        #[command(flatten)]
        timing: Timing,
        #[command(flatten)]
        output: Output,
    },
    /// Weight scale of (M, w).
    Classify {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// Largest gap between full-space and reduced success probabilities.
    VerifySubspace {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// End of the sampled window, default 2π√M.
        #[arg(long = "t-max", allow_negative_numbers = true)]
        t_max: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Operator norms of the search Hamiltonian at the critical rate.
    Energy {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// Data behind one figure or table, at M = 1000 unless overridden.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long = "M", default_value_t = 1000)]
        m: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Instance {
    /// Vertices per clique.
    #[arg(long = "M")]
    pub m: usize,
    /// Weight of the links between the cliques.
    #[arg(long, allow_negative_numbers = true)]
    pub w: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Timing {
    /// Hopping rate, default critical.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// End of the time window, default 3π√M.
    #[arg(long = "t-max", allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Sampling step, default t_max / 2000.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output format; the default depends on the command.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6,
    Table1,
}

/// Samples compared by `verify-subspace`.
pub const VERIFY_SAMPLES: usize = 20;

/// Default number of steps in a trace window.
const TRACE_STEPS: f64 = 2000.0;

/// Time window and step for the traces behind the time-domain figures.
const FIGURE_T_MAX: f64 = 150.0;
const FIGURE_DT: f64 = 0.05;

/// Values of k in the k-sweep figures.
pub fn figure_k_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 * 0.05).collect()
}

impl Timing {
    fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma {
            check_positive("gamma", g)?;
        }
        if let Some(t) = self.t_max {
            check_positive("t-max", t)?;
        }
        if let Some(dt) = self.dt {
            check_positive("dt", dt)?;
        }
        if let (Some(t), Some(dt)) = (self.t_max, self.dt) {
            if dt >= t {
                return Err(invalid(format!("dt ({dt}) must be smaller than t-max ({t})")));
            }
        }
        Ok(())
    }

    fn window(&self, m: usize) -> (f64, f64) {
        let t_max = self.t_max.unwrap_or_else(|| PeakSearch::for_m(m).t_max);
        (t_max, self.dt.unwrap_or(t_max / TRACE_STEPS))
    }
}

impl Instance {
    fn validate(&self) -> Result<()> {
        check_m(self.m)?;
        check_positive("w", self.w)
    }
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::Evolve { output, .. }
            | Command::Predict { output, .. }
            | Command::SweepK { output, .. }
            | Command::SweepTime { output, .. }
            | Command::Classify { output, .. }
            | Command::VerifySubspace { output, .. }
            | Command::Energy { output, .. }
            | Command::Reproduce { output, .. } => output,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Predict { .. }
            | Command::Classify { .. }
            | Command::VerifySubspace { .. }
            | Command::Energy { .. } => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn format(&self) -> Format {
        self.command.output().format.unwrap_or_else(|| self.command.default_format())
    }

    /// Checks every numeric argument. Called by [`run`] before any work.
    pub fn validate(&self) -> Result<()> {
        match &self.command {
            Command::Evolve { instance, timing, .. } => {
                instance.validate()?;
                timing.validate()
            }
            Command::Predict { instance, .. }
            | Command::Classify { instance, .. }
            | Command::Energy { instance, .. } => instance.validate(),
            Command::SweepK { m, k, .. } => {
                check_m(*m)?;
                k.iter().try_for_each(|&k| check_positive("k", k))
            }
            Command::SweepTime { m, w, timing, .. } => {
                check_m(*m)?;
                w.iter().try_for_each(|&w| check_positive("w", w))?;
                timing.validate()
            }
            Command::VerifySubspace { instance, gamma, t_max, .. } => {
                instance.validate()?;
                if let Some(g) = gamma {
                    check_positive("gamma", *g)?;
                }
                if let Some(t) = t_max {
                    check_positive("t-max", *t)?;
                }
                let cap = fullspace::max_m_from_env()?;
                if instance.m > cap {
                    return Err(Error::SizeLimit { m: instance.m, cap });
                }
                Ok(())
            }
            Command::Reproduce { m, .. } => check_m(*m),
        }
    }
}

/// Runs a validated configuration, writing the artifact to `--out` or to
/// `stdout`. Nothing is written when the command fails.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    config.validate()?;
    let format = config.format();
    let mut buf = Vec::new();
    match &config.command {
        Command::Evolve { instance: Instance { m, w }, timing, .. } => {
            let gamma = timing.gamma.unwrap_or_else(|| critical_gamma(*m, *w));
            let (t_max, dt) = timing.window(*m);
            let trace = evolve::trace(*m, *w, gamma, t_max, dt)?;
            match format {
                Format::Csv => trace.write_csv(&mut buf)?,
                Format::Json => write_json(&mut buf, &Series { m: *m, w: *w, gamma, trace })?,
            }
        }
        Command::Predict { instance: Instance { m, w }, .. } => {
            let record = perturbation::predict(*m, *w, &Thresholds::default())?.record();
            match format {
                Format::Csv => write_prediction_csv(&mut buf, &[record])?,
                Format::Json => write_json(&mut buf, &record)?,
            }
        }
        Command::SweepK { m, k, .. } => {
            let rows = analysis::sweep_k(*m, k)?;
            write_sweep(&mut buf, &rows, format)?;
        }
        Command::SweepTime { m, w, timing, .. } => {
            let (t_max, dt) = timing.window(*m);
            let series = w
                .iter()
                .map(|&w| {
                    let gamma = timing.gamma.unwrap_or_else(|| critical_gamma(*m, w));
                    Ok(Series { m: *m, w, gamma, trace: evolve::trace(*m, w, gamma, t_max, dt)? })
                })
                .collect::<Result<Vec<_>>>()?;
            write_series(&mut buf, &series, format)?;
        }
        Command::Classify { instance: Instance { m, w }, .. } => {
            let r = perturbation::classify(*m, *w, &Thresholds::default())?;
            let record = ClassifyRecord { m: *m, w: *w, regime: r.tag.as_str(), k: r.k, r: r.r };
            match format {
                Format::Csv => {
                    writeln!(buf, "M,w,regime,k,r")?;
                    writeln!(buf, "{},{},{},{},{}", m, fmt_sig(*w), record.regime, fmt_sig(r.k), fmt_sig(r.r))?;
                }
                Format::Json => write_json(&mut buf, &record)?,
            }
        }
        Command::VerifySubspace { instance: Instance { m, w }, gamma, t_max, .. } => {
            let record = verify_subspace(*m, *w, *gamma, *t_max)?;
            match format {
                Format::Csv => {
                    writeln!(buf, "M,w,gamma,samples,t_max,max_residual")?;
                    writeln!(
                        buf,
                        "{},{},{},{},{},{:e}",
                        m,
                        fmt_sig(*w),
                        fmt_sig(record.gamma),
                        record.samples,
                        fmt_sig(record.t_max),
                        record.max_residual
                    )?;
                }
                Format::Json => write_json(&mut buf, &record)?,
            }
        }
        Command::Energy { instance: Instance { m, w }, .. } => {
            let e = analysis::energy_report(*m, *w)?;
            match format {
                Format::Csv => {
                    writeln!(buf, "M,w,walk_norm,oracle_norm,total_bound")?;
                    writeln!(
                        buf,
                        "{},{},{},{},{}",
                        m,
                        fmt_sig(*w),
                        fmt_sig(e.walk_norm),
                        fmt_sig(e.oracle_norm),
                        fmt_sig(e.total_bound)
                    )?;
                }
                Format::Json => write_json(&mut buf, &e)?,
            }
        }
        Command::Reproduce { figure, m, .. } => reproduce(*figure, *m, format, &mut buf)?,
    }
    match &config.command.output().out {
        Some(path) => std::fs::write(path, &buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Series {
    #[serde(rename = "M")]
    m: usize,
    w: f64,
    gamma: f64,
    #[serde(flatten)]
    trace: EvolutionTrace,
}

#[derive(Debug, Serialize)]
struct ClassifyRecord {
    #[serde(rename = "M")]
    m: usize,
    w: f64,
    regime: &'static str,
    k: f64,
    r: f64,
}

#[derive(Debug, Serialize)]
pub struct SubspaceCheck {
    #[serde(rename = "M")]
    pub m: usize,
    pub w: f64,
    pub gamma: f64,
    pub samples: usize,
    pub t_max: f64,
    pub max_residual: f64,
}

/// Full-space against reduced evolution at [`VERIFY_SAMPLES`] evenly spaced
/// times in `[0, t_max]`, with the size cap taken from the environment.
pub fn verify_subspace(m: usize, w: f64, gamma: Option<f64>, t_max: Option<f64>) -> Result<SubspaceCheck> {
    let cap = fullspace::max_m_from_env()?;
    let g = build_linked_complete_capped(m, w, cap)?;
    let gamma = gamma.unwrap_or_else(|| critical_gamma(m, w));
    let t_max = t_max.unwrap_or(2.0 * PI * (m as f64).sqrt());
    let last = (VERIFY_SAMPLES - 1) as f64;
    let times: Vec<f64> = (0..VERIFY_SAMPLES).map(|i| t_max * i as f64 / last).collect();
    let max_residual = fullspace::subspace_residual_capped(&g, gamma, &times, cap)?;
    Ok(SubspaceCheck { m, w, gamma, samples: VERIFY_SAMPLES, t_max, max_residual })
}

fn write_json<T: Serialize>(out: &mut Vec<u8>, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.push(b'\n');
    Ok(())
}

const PREDICTION_CSV_HEADER: &str = "regime,k,r,gamma_c,t_star,p_star,p_effective,expected_runtime,\
a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im,phase_unspecified";

fn write_prediction_csv(out: &mut Vec<u8>, records: &[PredictionRecord]) -> Result<()> {
    writeln!(out, "{PREDICTION_CSV_HEADER}")?;
    for r in records {
        let head = [r.k, r.r, r.gamma_c, r.t_star, r.p_star, r.p_effective, r.expected_runtime];
        let fields: Vec<String> =
            head.iter().chain(r.final_state_amplitudes.iter().flatten()).map(|&x| fmt_sig(x)).collect();
        writeln!(out, "{},{},{}", r.regime, fields.join(","), r.final_state_phase_unspecified)?;
    }
    Ok(())
}

fn write_sweep(out: &mut Vec<u8>, rows: &[SweepRow], format: Format) -> Result<()> {
    match format {
        Format::Csv => analysis::write_sweep_csv(rows, out),
        Format::Json => write_json(out, &rows),
    }
}

fn write_series(out: &mut Vec<u8>, series: &[Series], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "w,gamma,t,p_a,p_inferred")?;
            for s in series {
                let (w, gamma) = (fmt_sig(s.w), fmt_sig(s.gamma));
                for i in 0..s.trace.len() {
                    writeln!(
                        out,
                        "{w},{gamma},{},{},{}",
                        fmt_sig(s.trace.times[i]),
                        fmt_sig(s.trace.p_a[i]),
                        fmt_sig(s.trace.p_inferred[i])
                    )?;
                }
            }
            Ok(())
        }
        Format::Json => write_json(out, &series),
    }
}

fn figure_traces(m: usize, params: &[(f64, f64)]) -> Result<Vec<Series>> {
    params
        .iter()
        .map(|&(w, gamma)| Ok(Series { m, w, gamma, trace: evolve::trace(m, w, gamma, FIGURE_T_MAX, FIGURE_DT)? }))
        .collect()
}

#[derive(Debug, Serialize)]
struct KPoint {
    k: f64,
    exact: Option<f64>,
    predicted: Option<f64>,
}

#[derive(Debug, Serialize)]
struct LhsPoint {
    t: f64,
    lhs: f64,
}

fn reproduce(figure: Figure, m: usize, format: Format, out: &mut Vec<u8>) -> Result<()> {
    let critical = |ws: &[f64]| ws.iter().map(|&w| (w, critical_gamma(m, w))).collect::<Vec<_>>();
    match figure {
        Figure::Fig2a => write_series(out, &figure_traces(m, &critical(&[1.0, 10.0, 20.0, 30.0, 40.0]))?, format),
        Figure::Fig2b => {
            let ws = [100.0, 500.0, 1000.0, 3000.0, 20000.0];
            write_series(out, &figure_traces(m, &critical(&ws))?, format)
        }
        Figure::Fig4 => {
            let w = (m as f64).sqrt();
            let params = [gamma_unlinked(m), gamma_linked_leading(m, w), gamma_first_order(m, w)].map(|g| (w, g));
            write_series(out, &figure_traces(m, &params)?, format)
        }
        Figure::Fig5a | Figure::Fig5b => {
            let rows = analysis::sweep_k(m, &figure_k_grid())?;
            let probability = figure == Figure::Fig5a;
            let points: Vec<KPoint> = rows
                .iter()
                .map(|r| {
                    let (exact, predicted) = if probability {
                        (r.p_star_exact, r.p_star_predicted)
                    } else {
                        (r.t_star_exact, r.t_star_predicted)
                    };
                    KPoint { k: r.k, exact, predicted }
                })
                .collect();
            match format {
                Format::Csv => {
                    let quantity = if probability { "p" } else { "t" };
                    writeln!(out, "k,{quantity}_exact,{quantity}_pred")?;
                    let cell = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
                    for p in &points {
                        writeln!(out, "{},{},{}", fmt_sig(p.k), cell(p.exact), cell(p.predicted))?;
                    }
                    Ok(())
                }
                Format::Json => write_json(out, &points),
            }
        }
        Figure::Fig6 => {
            let es = medium_eigensystem(1.0)?;
            let points: Vec<LhsPoint> = (0..=600)
                .map(|i| {
                    let t = i as f64 * 0.01;
                    LhsPoint { t, lhs: es.runtime_lhs(t) }
                })
                .collect();
            match format {
                Format::Csv => {
                    writeln!(out, "t,lhs")?;
                    for p in &points {
                        writeln!(out, "{},{}", fmt_sig(p.t), fmt_sig(p.lhs))?;
                    }
                    Ok(())
                }
                Format::Json => write_json(out, &points),
            }
        }
        Figure::Table1 => {
            let weights = table_weights(m);
            let rows = analysis::regime_summary(m, &weights, &Thresholds::default())?;
            match format {
                Format::Csv => analysis::write_summary_csv(&rows, out),
                Format::Json => write_json(out, &rows),
            }
        }
    }
}

/// One representative weight per regime; the fixed set at `M = 1000`,
/// otherwise the same multiples of `√M` and `M`.
fn table_weights(m: usize) -> Vec<f64> {
    if m == 1000 {
        return analysis::SUMMARY_WEIGHTS.iter().map(|&(_, w)| w).collect();
    }
    let mf = m as f64;
    vec![1.0, mf.sqrt(), 100.0 / 1000f64.sqrt() * mf.sqrt(), 3.0 * mf, 20.0 * mf]
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

fn report(stderr: &mut dyn Write, code: &str, message: String) {
    let record = ErrorRecord { error: code, message };
    // nothing sensible is left to do if standard error is gone
    let _ = serde_json::to_writer(&mut *stderr, &record);
    let _ = writeln!(stderr);
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or_default();
            let message = first.strip_prefix("error: ").unwrap_or(first);
            let err = Error::InvalidArgument(message.to_string());
            report(stderr, err.code(), message.to_string());
            return err.exit_code();
        }
    };
    match run(&config, stdout) {
        Ok(()) => 0,
        Err(e) => {
            report(stderr, e.code(), e.to_string());
            e.exit_code()
        }
    }
}
