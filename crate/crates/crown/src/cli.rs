//! Subcommands, flag grammar and exit codes.
//!
//! Exit codes: 0 clean, 1 I/O failure, 2 violations or failed aggregate
//! checks, 3 indeterminate samples only, 64 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crown_core::convexity::{
    ComplexConvexityProbe, CriticalPointsProbe, GradientProbe, KostantProbe, NonRealUnipotentProbe,
    SamplingMode, DEFAULT_ASCENT_TOL, DEFAULT_MAX_ITER,
};
use crown_core::domains::{self, ImageProbe, TubeProbe, DEFAULT_BOUNDARY_STEPS};
use crown_core::report::{
    Metric, MetricSummary, Outcome, Probe, ReportHeader, Tally, VerificationReport, Witness,
};
use crown_core::sampling::{self, Stream};
use crown_core::siegel::{CrossCheckProbe, SiegelProbe};
use crown_core::{
    build_group, iwasawa, linalg, weyl, CartanVector, CrownError, GroupContext, GroupSpec,
    OmegaSpec,
};
use serde::Serialize;

use crate::output::{render, Format};
use crate::parse;
use crate::runner;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "crown",
    version,
    about = "Complexified Iwasawa projection and crown-domain verifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Report path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Batch {
    /// `sl:<n>` or `sp:<n>`.
    #[arg(long, default_value = "sl:3")]
    group: GroupSpec,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = weyl::HULL_TOL, allow_negative_numbers = true)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    K,
    FullG,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iwasawa factors of g (real) or g·exp(iX).
    Decompose {
        #[arg(long, default_value = "sl:3")]
        group: GroupSpec,
        /// Frame matrix, rows separated by `;`.
        #[arg(long)]
        g: String,
        /// Direction X ∈ Ω in 𝔞-coordinates.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = iwasawa::DEFAULT_STEPS)]
        steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Is Y in the convex hull of the Weyl orbit of X?
    Hull {
        #[arg(long, default_value = "sl:3")]
        group: GroupSpec,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = weyl::HULL_TOL, allow_negative_numbers = true)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Complex convexity: Im log a(g·exp(iX)) ∈ conv(W·X).
    VerifyConvexity {
        #[command(flatten)]
        batch: Batch,
        /// `scale:<c>` or `ball:<rho>`.
        #[arg(long, default_value = "scale:1")]
        omega: OmegaSpec,
        #[arg(long, value_enum, default_value = "k")]
        mode: Mode,
    },
    /// Real convexity and vertex attainment.
    VerifyKostant {
        #[command(flatten)]
        batch: Batch,
    },
    /// Analytic gradient of f_(a,λ) against finite differences.
    GradientCheck {
        #[command(flatten)]
        batch: Batch,
    },
    /// Gradient ascent of f_(a,λ) to its maximum.
    CriticalPoints {
        #[command(flatten)]
        batch: Batch,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = DEFAULT_ASCENT_TOL)]
        ascent_tol: f64,
    },
    /// Crown points against horospherical tubes.
    Tubes {
        #[arg(long, default_value = "sl:3")]
        group: GroupSpec,
        #[arg(long, default_value = "scale:0.8")]
        omega: OmegaSpec,
        #[arg(long, default_value_t = 1000)]
        z_count: u64,
        #[arg(long, default_value_t = 100)]
        k_count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = weyl::HULL_TOL, allow_negative_numbers = true)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Image of the crown domain under a(·).
    Image {
        #[command(flatten)]
        batch: Batch,
        #[arg(long, default_value = "scale:1")]
        omega: OmegaSpec,
    },
    /// Im log a along a path of directions approaching ∂ω.
    Boundary {
        #[arg(long, default_value = "sl:3")]
        group: GroupSpec,
        #[arg(long, default_value = "scale:1")]
        omega: OmegaSpec,
        /// Ray direction (random when omitted).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BOUNDARY_STEPS)]
        steps: usize,
        /// Use g = 1 instead of a random group element.
        #[arg(long)]
        identity: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = weyl::HULL_TOL, allow_negative_numbers = true)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Leading-minor ratios on the Siegel upper half-space.
    Siegel {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare the crown projection of Sp(n,ℝ) with the Siegel-side values.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        output: Output,
    },
    /// n(k·exp(iX)) is not real for k away from the normalizer of 𝔞.
    #[command(name = "lemma24")]
    NonRealUnipotent {
        #[command(flatten)]
        batch: Batch,
        /// Fixed regular direction (random per sample when omitted).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
}

/// Result of a command, before any I/O.
#[derive(Debug, Clone)]
pub struct Execution {
    pub code: i32,
    /// The rendered document (empty on usage errors).
    pub document: String,
    pub out: Option<PathBuf>,
    pub message: Option<String>,
}

impl Execution {
    fn usage(message: String) -> Self {
        Self {
            code: EXIT_USAGE,
            document: String::new(),
            out: None,
            message: Some(message),
        }
    }
}

fn usage_error(e: &CrownError) -> bool {
    matches!(
        e,
        CrownError::UnsupportedFamily(_)
            | CrownError::InvalidSpec(_)
            | CrownError::InvalidOmega(_)
            | CrownError::DimensionMismatch { .. }
            | CrownError::NotInGroup { .. }
            | CrownError::OmegaViolation { .. }
            | CrownError::InvalidArgument(_)
            | CrownError::SingularInput
    )
}

fn fail(e: CrownError) -> Execution {
    if usage_error(&e) {
        Execution::usage(e.to_string())
    } else {
        Execution {
            code: EXIT_INDETERMINATE,
            document: String::new(),
            out: None,
            message: Some(e.to_string()),
        }
    }
}

fn context(spec: GroupSpec) -> Result<GroupContext, Execution> {
    build_group(spec).map_err(fail)
}

fn finish<T: Serialize>(doc: &T, output: &Output, code: i32) -> Execution {
    match render(doc, output.format) {
        Ok(document) => Execution {
            code,
            document,
            out: output.out.clone(),
            message: None,
        },
        Err(e) => Execution {
            code: EXIT_IO,
            document: String::new(),
            out: None,
            message: Some(e),
        },
    }
}

fn report(report: VerificationReport, output: &Output) -> Execution {
    let code = report.exit_code();
    finish(&report, output, code)
}

fn batch_run(probe: &dyn Probe, output: &Output) -> Execution {
    match runner::thread_cap() {
        Ok(threads) => report(runner::run_parallel(probe, threads), output),
        Err(e) => Execution::usage(e),
    }
}

fn cartan_arg(ctx: &GroupContext, s: &str) -> Result<CartanVector, Execution> {
    let v = parse::vector(s).map_err(Execution::usage)?;
    if v.len() != ctx.coord_len() {
        return Err(Execution::usage(format!(
            "expected {} coordinates for {}, got {}",
            ctx.coord_len(),
            ctx.spec,
            v.len()
        )));
    }
    Ok(CartanVector::new(v))
}

#[derive(Serialize)]
struct Decomposition {
    group: GroupSpec,
    n_part: crown_core::report::WitnessValue,
    log_a: crown_core::report::WitnessValue,
    k_part: crown_core::report::WitnessValue,
    path_steps: usize,
    max_arg_step: f64,
    reconstruction_residual: f64,
    branch_residual: f64,
}

#[derive(Serialize)]
struct HullAnswer {
    group: GroupSpec,
    x: Vec<f64>,
    y: Vec<f64>,
    verdict: &'static str,
    margin: f64,
    dominant_x: Vec<f64>,
    dominant_y: Vec<f64>,
    tol: f64,
}

fn decompose(
    spec: GroupSpec,
    g: &str,
    x: Option<&str>,
    steps: usize,
    output: &Output,
) -> Result<Execution, Execution> {
    let ctx = context(spec)?;
    let g = parse::matrix(g).map_err(Execution::usage)?;
    let (factors, z) = match x {
        None => (
            iwasawa::decompose_real(&ctx, &g).map_err(fail)?,
            linalg::to_complex(&g),
        ),
        Some(x) => {
            let x = cartan_arg(&ctx, x)?;
            let f = iwasawa::project_complex(&ctx, &g, &x, steps).map_err(fail)?;
            (
                f,
                linalg::to_complex(&g) * ctx.exp_cartan(&x.to_complex_imag()),
            )
        }
    };
    let doc = Decomposition {
        group: spec,
        n_part: (&factors.n_part).into(),
        log_a: (&factors.log_a).into(),
        k_part: (&factors.k_part).into(),
        path_steps: factors.path_steps,
        max_arg_step: factors.max_arg_step,
        reconstruction_residual: linalg::rel_residual(&factors.reconstruct(), &z),
        branch_residual: factors.branch_residual(&ctx),
    };
    Ok(finish(&doc, output, EXIT_OK))
}

fn hull(
    spec: GroupSpec,
    x: &str,
    y: &str,
    tol: f64,
    output: &Output,
) -> Result<Execution, Execution> {
    let ctx = context(spec)?;
    let (x, y) = (cartan_arg(&ctx, x)?, cartan_arg(&ctx, y)?);
    let verdict = weyl::hull_contains(&ctx, &x, &y, tol);
    let doc = HullAnswer {
        group: spec,
        verdict: if verdict.inside { "inside" } else { "outside" },
        margin: verdict.margin,
        dominant_x: weyl::dominant_rep(&ctx, &x).coords,
        dominant_y: weyl::dominant_rep(&ctx, &y).coords,
        x: x.coords,
        y: y.coords,
        tol,
    };
    Ok(finish(&doc, output, EXIT_OK))
}

#[allow(clippy::too_many_arguments)]
fn boundary(
    spec: GroupSpec,
    omega: OmegaSpec,
    x: Option<&str>,
    steps: usize,
    identity: bool,
    seed: u64,
    tol: f64,
    output: &Output,
) -> Result<Execution, Execution> {
    let ctx = context(spec)?;
    let start = std::time::Instant::now();
    let direction = match x {
        Some(x) => cartan_arg(&ctx, x)?,
        None => {
            let mut rng = sampling::substream(seed, Stream::Direction, 0);
            ctx.normalize_coords(CartanVector::new(
                (0..ctx.coord_len())
                    .map(|_| sampling::gaussian(&mut rng))
                    .collect(),
            ))
        }
    };
    let g = if identity {
        linalg::RMat::identity(ctx.ambient_size, ctx.ambient_size)
    } else {
        crown_core::convexity::sample_base(&ctx, SamplingMode::FullG, seed, 0)
    };
    let path = domains::boundary_path(&ctx, &omega, &direction, steps).map_err(fail)?;
    let header = ReportHeader::new("boundary", spec, Some(omega), seed)
        .tol("membership", tol)
        .tol("steps", steps as f64);
    let mut tally = Tally::default();
    let mut input = Vec::new();
    let mut output_d = Vec::new();
    match domains::boundary_probe(&ctx, &omega, &g, &path) {
        Ok(trace) => {
            for (s, x) in trace.iter().zip(&path) {
                input.push(s.input_distance);
                output_d.push(s.output_distance);
                let witness = Witness::new(s.step as u64)
                    .with("g", &g)
                    .with("x", x)
                    .with("input_distance", s.input_distance);
                tally.push(Outcome::from_margin(s.output_distance, tol, witness));
            }
            // the last step decides the monitored final distance
            tally.metrics.insert(
                "final_distance",
                Metric::Max(*output_d.last().unwrap_or(&f64::NAN)),
            );
        }
        Err(e) => tally.push(Outcome::indeterminate(
            Witness::new(0).with("g", &g).with("x", &direction),
            e,
        )),
    }
    let mut rep = VerificationReport::from_tally(header, steps as u64, tally, Default::default());
    if input.len() >= 2 {
        rep.metrics.insert(
            "spearman".to_string(),
            MetricSummary::Scalar(domains::spearman(&input, &output_d)),
        );
    }
    rep.series.insert("input_distance".to_string(), input);
    rep.series.insert("output_distance".to_string(), output_d);
    rep.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report(rep, output))
}

fn dispatch(cli: Cli) -> Result<Execution, Execution> {
    match cli.command {
        Command::Decompose {
            group,
            g,
            x,
            steps,
            output,
        } => decompose(group, &g, x.as_deref(), steps, &output),
        Command::Hull {
            group,
            x,
            y,
            tol,
            output,
        } => hull(group, &x, &y, tol, &output),
        Command::VerifyConvexity { batch, omega, mode } => {
            let ctx = context(batch.group)?;
            let mode = match mode {
                Mode::K => SamplingMode::K,
                Mode::FullG => SamplingMode::FullG,
            };
            let probe = ComplexConvexityProbe {
                ctx: &ctx,
                omega,
                mode,
                samples: batch.samples,
                seed: batch.seed,
                tol: batch.tol,
            };
            Ok(batch_run(&probe, &batch.output))
        }
        Command::VerifyKostant { batch } => {
            let ctx = context(batch.group)?;
            let probe = KostantProbe {
                ctx: &ctx,
                samples: batch.samples,
                seed: batch.seed,
                tol: batch.tol,
            };
            Ok(batch_run(&probe, &batch.output))
        }
        Command::GradientCheck { batch } => {
            let ctx = context(batch.group)?;
            Ok(batch_run(
                &GradientProbe {
                    ctx: &ctx,
                    samples: batch.samples,
                    seed: batch.seed,
                },
                &batch.output,
            ))
        }
        Command::CriticalPoints {
            batch,
            max_iter,
            ascent_tol,
        } => {
            let ctx = context(batch.group)?;
            let probe = CriticalPointsProbe {
                ctx: &ctx,
                samples: batch.samples,
                seed: batch.seed,
                max_iter,
                tol: ascent_tol,
            };
            Ok(batch_run(&probe, &batch.output))
        }
        Command::Tubes {
            group,
            omega,
            z_count,
            k_count,
            seed,
            tol,
            output,
        } => {
            if z_count == 0 || k_count == 0 {
                return Err(Execution::usage(
                    "--z-count and --k-count must be positive".to_string(),
                ));
            }
            let ctx = context(group)?;
            Ok(batch_run(
                &TubeProbe {
                    ctx: &ctx,
                    omega,
                    z_count,
                    k_count,
                    seed,
                    tol,
                },
                &output,
            ))
        }
        Command::Image { batch, omega } => {
            let ctx = context(batch.group)?;
            let probe = ImageProbe {
                ctx: &ctx,
                omega,
                samples: batch.samples,
                seed: batch.seed,
                tol: batch.tol,
            };
            Ok(batch_run(&probe, &batch.output))
        }
        Command::Boundary {
            group,
            omega,
            x,
            steps,
            identity,
            seed,
            tol,
            output,
        } => {
            if steps == 0 {
                return Err(Execution::usage("--steps must be positive".to_string()));
            }
            boundary(
                group,
                omega,
                x.as_deref(),
                steps,
                identity,
                seed,
                tol,
                &output,
            )
        }
        Command::Siegel {
            n,
            samples,
            seed,
            cross_check,
            output,
        } => {
            if cross_check {
                let ctx = context(GroupSpec::symplectic(n).map_err(fail)?)?;
                Ok(batch_run(
                    &CrossCheckProbe {
                        ctx: &ctx,
                        samples,
                        seed,
                    },
                    &output,
                ))
            } else {
                let probe = SiegelProbe::new(n, samples, seed).map_err(fail)?;
                Ok(batch_run(&probe, &output))
            }
        }
        Command::NonRealUnipotent { batch, x } => {
            let ctx = context(batch.group)?;
            let x = match x {
                Some(x) => {
                    let x = cartan_arg(&ctx, &x)?;
                    if ctx.root_datum.min_abs_root(&x) <= crown_core::convexity::REGULARITY_FLOOR {
                        return Err(Execution::usage("--x must be regular".to_string()));
                    }
                    if weyl::omega_margin(&ctx, &OmegaSpec::full(), &x) <= 0.0 {
                        return Err(Execution::usage("--x must lie in Ω".to_string()));
                    }
                    Some(x)
                }
                None => None,
            };
            let probe = NonRealUnipotentProbe {
                ctx: &ctx,
                x,
                samples: batch.samples,
                seed: batch.seed,
            };
            Ok(batch_run(&probe, &batch.output))
        }
    }
}

fn check_samples(cli: &Cli) -> Result<(), Execution> {
    let samples = match &cli.command {
        Command::VerifyConvexity { batch, .. }
        | Command::VerifyKostant { batch }
        | Command::GradientCheck { batch }
        | Command::CriticalPoints { batch, .. }
        | Command::Image { batch, .. }
        | Command::NonRealUnipotent { batch, .. } => batch.samples,
        Command::Siegel { samples, .. } => *samples,
        _ => 1,
    };
    if samples == 0 {
        return Err(Execution::usage("--samples must be at least 1".to_string()));
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command without
/// touching stdout, stderr or the file system.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            return Execution {
                code,
                document: String::new(),
                out: None,
                message: Some(e.render().to_string()),
            };
        }
    };
    if let Err(e) = check_samples(&cli) {
        return e;
    }
    dispatch(cli).unwrap_or_else(|e| e)
}

/// Runs the CLI: writes the document to `--out` or stdout and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let exec = execute(args);
    if let Some(m) = &exec.message {
        if exec.code == EXIT_OK {
            print!("{m}");
        } else {
            eprint!("{m}");
            if !m.ends_with('\n') {
                eprintln!();
            }
        }
    }
    if exec.document.is_empty() {
        return exec.code;
    }
    match &exec.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &exec.document) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_IO;
            }
        }
        None => print!("{}", exec.document),
    }
    exec.code
}
