//! Batch verification tool: JSON jobs in, JSON summaries (plus CSV where a
//! scan produces rows) out.
//!
//! Exit codes: `0` when the run verified/validated its claim (vanishing
//! means within tolerance, definitive classification, recursion holding,
//! closed mirror system, issued certificate, valid configuration), `1` when
//! the claim failed or stayed inconclusive, `2` when the input could not be
//! read or parsed — with a diagnostic naming the offending JSON path.
//!
//! The environment variable `SPHERMEAN_THREADS` bounds worker parallelism
//! for batch scans; reports are byte-identical for a fixed input and seed
//! regardless of the thread count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sphermean::generators::EigenFamily;
use sphermean::json as schema;
use sphermean::means::{report_from_rows, scan_means, write_means_csv};
use sphermean::moments::{common_zero_sample, family_satisfies_recursion, MomentFamily};
use sphermean::quad::sphere_rule;
use sphermean::ruled::chart::classify_singularity;
use sphermean::series::VecSeries;
use sphermean::symmetry::{coxeter_closure, injectivity_certificate, validate_cone_configuration};
use sphermean::Error;

/// Number of random support samples behind every sup-norm estimate.
const SUP_SAMPLES: usize = 100_000;

#[derive(Parser)]
#[command(
    name = "sphermean",
    version,
    about = "Desk-scale verifier for spherical-mean vanishing, moment families, \
             ruled-surface singularities, mirror closures, and cone configurations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Input job file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Output basename: writes `{base}.json`, and `{base}.csv` for
    /// commands that emit rows. Without it the summary goes to stdout only.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan spherical means of a compactly supported source over a grid of
    /// centers and radii, and compare the largest mean against a relative
    /// tolerance.
    VerifyCone {
        #[command(flatten)]
        io: IoArgs,
        /// Pass threshold for max |mean| relative to the estimated sup-norm.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Override the quadrature order of the job file.
        #[arg(long)]
        quad_order: Option<usize>,
        /// Override the sampling seed of generated center sets.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Classify the singular point of a truncated ruled chart.
    Classify {
        #[command(flatten)]
        io: IoArgs,
        /// Re-truncate the chart to this order before classifying.
        #[arg(long)]
        series_order: Option<usize>,
    },
    /// Build the moment family of a discrete measure: recursion check,
    /// harmonic minor, and sampled common zeros.
    Moments {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Close a concurrent mirror system under its own reflections.
    Coxeter {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the antipodal support-shrinking certificate.
    Certify {
        #[command(flatten)]
        io: IoArgs,
        /// Override the iteration cap of the job file.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Evaluate the eigenfunction family of a discrete measure on a lambda
    /// grid at chosen points, checking that every value stays small.
    Spectral {
        #[command(flatten)]
        io: IoArgs,
        /// Absolute pass threshold on max |phi_lambda|.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Validate a labeled configuration of vertex-meeting cones.
    ValidateConfig {
        #[command(flatten)]
        io: IoArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_job(io: &IoArgs) -> Result<Value, Error> {
    let text = fs::read_to_string(&io.input)?;
    schema::parse_document(&text)
}

/// Prints the summary and, when an output base is given, writes
/// `{base}.json`.
fn emit_summary(io: &IoArgs, summary: &Value) -> Result<(), Error> {
    let text = format!("{}\n", serde_json::to_string_pretty(summary).expect("serializable"));
    print!("{text}");
    if let Some(base) = &io.output {
        fs::write(with_ext(base, "json"), text)?;
    }
    Ok(())
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::VerifyCone {
            io,
            tol,
            quad_order,
            seed,
        } => {
            let mut doc = read_job(&io)?;
            if let Some(s) = seed {
                if let Some(centers) = doc.get_mut("centers").and_then(Value::as_object_mut) {
                    if centers.get("kind").and_then(Value::as_str) == Some("zero_sample") {
                        centers.insert("seed".into(), json!(s));
                    }
                }
            }
            let job = schema::means_job_from_json(&doc, "$")?;
            let order = quad_order.unwrap_or(job.quad_order);
            let rule = sphere_rule(job.function.dim(), order)?;
            let rows = scan_means(&job.function, &job.centers, &job.radii, &rule)?;
            let report = report_from_rows(&rows);
            let sup = job.function.sup_abs_estimate(SUP_SAMPLES)?;
            let passed = sup > 0.0 && report.max_abs <= tol * sup;
            let mut summary = schema::mean_report_to_json(&report, Some(sup));
            let obj = summary.as_object_mut().expect("report is an object");
            obj.insert("quad_order".into(), json!(order));
            obj.insert("tolerance".into(), json!(tol));
            obj.insert("passed".into(), json!(passed));
            if let Some(base) = &io.output {
                let mut csv = Vec::new();
                write_means_csv(&mut csv, job.function.dim(), &rows)?;
                fs::write(with_ext(base, "csv"), csv)?;
                obj.insert(
                    "rows_csv".into(),
                    json!(with_ext(base, "csv").display().to_string()),
                );
            }
            emit_summary(&io, &summary)?;
            Ok(exit(passed))
        }
        Command::Classify { io, series_order } => {
            let doc = read_job(&io)?;
            let input = schema::chart_input_from_json(&doc, "$")?;
            let chart = match series_order {
                Some(m) => {
                    if m == 0 {
                        return Err(Error::invalid("series order must be at least 1"));
                    }
                    let truncate = |s: &VecSeries| s.truncate(m + 1);
                    sphermean::ruled::chart::RuledChart::new(
                        truncate(&input.chart.u),
                        truncate(&input.chart.e),
                    )?
                }
                None => input.chart,
            };
            let verdict = classify_singularity(&chart, &input.t0, &input.lambda0);
            let definitive = verdict.is_definitive();
            emit_summary(&io, &schema::verdict_to_json(&verdict))?;
            Ok(exit(definitive))
        }
        Command::Moments { io } => {
            let doc = read_job(&io)?;
            let job = schema::moments_job_from_json(&doc, "$")?;
            let family = MomentFamily::new(&job.measure, job.kmax)?;
            let recursion_ok = family_satisfies_recursion(&family);
            let minor = sphermean::moments::harmonic_minor(&job.measure, job.kmax)?;
            let zeros = common_zero_sample(&family, &job.grid, job.tol)?;
            let mut summary = json!({
                "recursion_ok": recursion_ok,
                "kmax": job.kmax,
                "k0": minor.as_ref().map(|(k0, _)| *k0),
                "minor": minor.as_ref().map(|(_, h)| schema::poly_to_json(h)),
                "zero_count": zeros.len(),
            });
            if let Some(base) = &io.output {
                let mut csv = Vec::new();
                write_points_csv(&mut csv, job.measure.dim(), &zeros, None)?;
                fs::write(with_ext(base, "csv"), csv)?;
                summary.as_object_mut().expect("object").insert(
                    "zeros_csv".into(),
                    json!(with_ext(base, "csv").display().to_string()),
                );
            }
            emit_summary(&io, &summary)?;
            Ok(exit(recursion_ok))
        }
        Command::Coxeter { io } => {
            let doc = read_job(&io)?;
            let sys = schema::reflection_system_from_json(&doc, "$")?;
            let closure = coxeter_closure(&sys);
            let closed = matches!(closure, sphermean::symmetry::Closure::Closed { .. });
            emit_summary(&io, &schema::closure_to_json(&closure, sys.dim()))?;
            Ok(exit(closed))
        }
        Command::Certify { io, max_iter } => {
            let doc = read_job(&io)?;
            let input = schema::certify_input_from_json(&doc, "$")?;
            let cert = injectivity_certificate(
                input.a,
                input.b,
                input.normal_a,
                input.normal_b,
                input.support_radius,
                max_iter.unwrap_or(input.max_iter),
            );
            let certified = cert.is_certified();
            emit_summary(&io, &schema::certificate_to_json(&cert))?;
            Ok(exit(certified))
        }
        Command::Spectral { io, tol } => {
            let doc = read_job(&io)?;
            let job = schema::spectral_job_from_json(&doc, "$")?;
            let points = match &job.points {
                schema::SpectralPoints::List(pts) => pts.clone(),
                schema::SpectralPoints::CommonZeros { kmax, grid, tol } => {
                    let family = MomentFamily::new(&job.measure, *kmax)?;
                    common_zero_sample(&family, grid, *tol)?
                }
            };
            let family = EigenFamily::new(job.measure.clone());
            let mut rows: Vec<(f64, &Vec<f64>, f64)> = Vec::new();
            let mut max_abs = 0.0f64;
            let mut argmax: Option<(f64, Vec<f64>)> = None;
            for p in &points {
                for &lambda in &job.lambdas {
                    let value = family.eval(lambda, p)?;
                    rows.push((lambda, p, value));
                    if value.abs() > max_abs {
                        max_abs = value.abs();
                        argmax = Some((lambda, p.clone()));
                    }
                }
            }
            let passed = max_abs <= tol;
            let mut summary = json!({
                "count_points": points.len(),
                "count_lambdas": job.lambdas.len(),
                "max_abs": max_abs,
                "argmax_lambda": argmax.as_ref().map(|(l, _)| *l),
                "argmax_point": argmax.as_ref().map(|(_, p)| p.clone()),
                "tolerance": tol,
                "passed": passed,
            });
            if let Some(base) = &io.output {
                let mut csv = Vec::new();
                write_spectral_csv(&mut csv, job.measure.dim(), &rows)?;
                fs::write(with_ext(base, "csv"), csv)?;
                summary.as_object_mut().expect("object").insert(
                    "rows_csv".into(),
                    json!(with_ext(base, "csv").display().to_string()),
                );
            }
            emit_summary(&io, &summary)?;
            Ok(exit(passed))
        }
        Command::ValidateConfig { io } => {
            let doc = read_job(&io)?;
            let cfg = schema::cone_config_from_json(&doc, "$")?;
            let verdict = validate_cone_configuration(&cfg)?;
            let valid = matches!(verdict, sphermean::symmetry::ConfigVerdict::Valid { .. });
            emit_summary(&io, &schema::config_verdict_to_json(&verdict))?;
            Ok(exit(valid))
        }
    }
}

/// CSV of points: header `x1,..` (dimension-many columns), one row per
/// point; an optional extra column name appends per-row values.
fn write_points_csv<W: Write>(
    out: &mut W,
    dim: usize,
    points: &[Vec<f64>],
    values: Option<(&str, &[f64])>,
) -> std::io::Result<()> {
    for k in 0..dim {
        if k > 0 {
            write!(out, ",")?;
        }
        write!(out, "x{}", k + 1)?;
    }
    if let Some((name, _)) = values {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for (i, p) in points.iter().enumerate() {
        for (k, c) in p.iter().enumerate() {
            if k > 0 {
                write!(out, ",")?;
            }
            write!(out, "{c}")?;
        }
        if let Some((_, vals)) = values {
            write!(out, ",{}", vals[i])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// CSV of eigenfunction samples: `lambda,x1,..,value`.
fn write_spectral_csv<W: Write>(
    out: &mut W,
    dim: usize,
    rows: &[(f64, &Vec<f64>, f64)],
) -> std::io::Result<()> {
    write!(out, "lambda")?;
    for k in 0..dim {
        write!(out, ",x{}", k + 1)?;
    }
    writeln!(out, ",value")?;
    for (lambda, p, value) in rows {
        write!(out, "{lambda}")?;
        for c in p.iter() {
            write!(out, ",{c}")?;
        }
        writeln!(out, ",{value}")?;
    }
    Ok(())
}
