//! Subcommand implementations.
//!
//! Each command resolves its parameters through [`Context`] (flags over
//! config file over defaults), runs the corresponding core routine, and
//! emits one [`Report`]. Functions return the process exit code; errors
//! bubble up as [`CliError`] and map to exit codes 2 (configuration) or
//! 3 (numerical).

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fraczero_core::decaylab::{
    envelope_predict, fit_decay, scenario_classify, FitModel, SolutionTraits,
};
use fraczero_core::fraclap::{self, EigenfunctionField};
use fraczero_core::levysim::{
    exit_law_check, expected_exit_time, extrapolate_dt, fk_functional, lifetime_lambda,
    mean_exit_time, Ball, Domain,
};
use fraczero_core::potential::PotentialModel;
use fraczero_core::{run_criterion, PathConfig, ProcessSpec, Suite, SuiteReport, VerifyOptions};

use crate::config::{Context, PotentialChoice};
use crate::output::{debug, fmt_f64, info, Report, Table};
use crate::CliError;

// ---------------------------------------------------------------------
// shared flag groups

/// Eigenpair selection (`φ = P(x) (1+|x|²)^{-κ}`).
#[derive(Args, Debug)]
pub(crate) struct SpecArgs {
    /// Ambient dimension (1..=3)
    #[arg(long)]
    pub d: Option<usize>,
    /// Operator order α in (0, 2)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Polynomial degree: 0 radial, 1 antisymmetric
    #[arg(long)]
    pub l: Option<usize>,
    /// 1-based coordinate carrying the antisymmetry (l = 1 only)
    #[arg(long)]
    pub axis: Option<usize>,
    /// Decay parameter κ
    #[arg(long)]
    pub kappa: Option<f64>,
}

/// Eigenpair selection for commands whose `--d`/`--alpha` already belong
/// to the process: the remaining spec fields only.
#[derive(Args, Debug)]
pub(crate) struct SpecTailArgs {
    /// Polynomial degree: 0 radial, 1 antisymmetric
    #[arg(long)]
    pub l: Option<usize>,
    /// 1-based coordinate carrying the antisymmetry (l = 1 only)
    #[arg(long)]
    pub axis: Option<usize>,
    /// Decay parameter κ
    #[arg(long)]
    pub kappa: Option<f64>,
}

impl SpecTailArgs {
    /// Full spec-flag group sharing the process's dimension and order.
    fn with_process(&self, p: &ProcessArgs) -> SpecArgs {
        SpecArgs {
            d: p.d,
            alpha: p.alpha,
            l: self.l,
            axis: self.axis,
            kappa: self.kappa,
        }
    }
}

/// Evaluation grid along a coordinate ray.
#[derive(Args, Debug)]
pub(crate) struct GridArgs {
    /// Grid spec `log:LO:HI:N` or `lin:LO:HI:N`
    #[arg(long)]
    pub grid: Option<String>,
    /// 1-based coordinate the grid points lie on
    #[arg(long, default_value_t = 1)]
    pub direction: usize,
}

/// Quadrature resolution overrides.
#[derive(Args, Debug)]
pub(crate) struct QuadArgs {
    /// Radial Gauss–Legendre nodes per decade
    #[arg(long)]
    pub nodes_per_decade: Option<usize>,
    /// Spherical resolution budget per shell
    #[arg(long)]
    pub angular_nodes: Option<usize>,
    /// Radius below which the fitted inner expansion replaces quadrature
    #[arg(long)]
    pub inner_radius: Option<f64>,
    /// Radius beyond which the analytic tail model replaces quadrature
    #[arg(long)]
    pub outer_radius: Option<f64>,
}

/// Jump-process selection.
#[derive(Args, Debug)]
pub(crate) struct ProcessArgs {
    /// State-space dimension (1..=3)
    #[arg(long)]
    pub d: Option<usize>,
    /// Stability index α in (0, 2)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Process family: stable or layered
    #[arg(long)]
    pub family: Option<String>,
    /// Large-jump exponent of the layered family (γ > 2)
    #[arg(long)]
    pub gamma: Option<f64>,
}

/// Potential selection.
#[derive(Args, Debug)]
pub(crate) struct PotentialArgs {
    /// Potential family: power, power-log, hypergeometric, or none
    #[arg(long, value_name = "FAMILY")]
    pub potential: Option<String>,
    /// Tail exponent β of the power family
    #[arg(long)]
    pub beta: Option<f64>,
    /// Power exponent of the power-log family
    #[arg(long, value_name = "A")]
    pub pot_alpha: Option<f64>,
    /// Log exponent δ of the power-log family
    #[arg(long)]
    pub delta: Option<f64>,
    /// Reference radius beyond which the closed form applies
    #[arg(long, value_name = "R")]
    pub pot_r0: Option<f64>,
    /// Flip the potential's sign
    #[arg(long)]
    pub negate: bool,
}

/// Path-simulation knobs.
#[derive(Args, Debug)]
pub(crate) struct PathArgs {
    /// Number of Monte Carlo paths
    #[arg(long)]
    pub paths: Option<usize>,
    /// Exit-detection time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Hard time cap per path
    #[arg(long)]
    pub horizon: Option<f64>,
}

// ---------------------------------------------------------------------
// grid helpers

/// Parses `log:LO:HI:N` / `lin:LO:HI:N` into N grid radii.
fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Config(format!("grid '{s}': {msg}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(bad("expected KIND:LO:HI:N, e.g. log:1e-1:1e4:50"));
    }
    let lo: f64 = parts[1].parse().map_err(|_| bad("LO is not a number"))?;
    let hi: f64 = parts[2].parse().map_err(|_| bad("HI is not a number"))?;
    let n: usize = parts[3].parse().map_err(|_| bad("N is not an integer"))?;
    if n < 2 {
        return Err(bad("need at least 2 points"));
    }
    if !(hi > lo) {
        return Err(bad("need LO < HI"));
    }
    match parts[0] {
        "log" => {
            if !(lo > 0.0) {
                return Err(bad("log spacing needs LO > 0"));
            }
            let step = (hi / lo).ln() / (n - 1) as f64;
            Ok((0..n).map(|i| lo * (i as f64 * step).exp()).collect())
        }
        "lin" => {
            let step = (hi - lo) / (n - 1) as f64;
            Ok((0..n).map(|i| lo + i as f64 * step).collect())
        }
        other => Err(bad(&format!("unknown spacing '{other}'; use log or lin"))),
    }
}

/// The point at distance `r` along the 1-based coordinate `direction`.
fn embed(d: usize, direction: usize, r: f64) -> Result<Vec<f64>, CliError> {
    if direction < 1 || direction > d {
        return Err(CliError::Config(format!(
            "--direction {direction} is out of range for dimension {d}"
        )));
    }
    let mut x = vec![0.0; d];
    x[direction - 1] = r;
    Ok(x)
}

/// Parses `--x`: comma-separated coordinates, or a single value placed on
/// the first coordinate.
fn parse_point(s: &str, d: usize) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|_| CliError::Config(format!("--x '{s}' is not a number list")))?;
    match vals.len() {
        1 => embed(d, 1, vals[0]),
        n if n == d => Ok(vals),
        n => Err(CliError::Config(format!(
            "--x has {n} coordinates, the process has dimension {d}"
        ))),
    }
}

fn grid_string<'a>(ctx: &'a Context, args: &'a GridArgs, default: &'a str) -> &'a str {
    args.grid
        .as_deref()
        .or_else(|| ctx.grid_default())
        .unwrap_or(default)
}

// ---------------------------------------------------------------------
// eigenpair

#[derive(Args, Debug)]
pub(crate) struct EigenpairArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Attach the decay classification (rejects κ outside the table range)
    #[arg(long)]
    pub classify: bool,
}

pub(crate) fn eigenpair(ctx: &Context, args: &EigenpairArgs) -> Result<ExitCode, CliError> {
    let spec = ctx.resolve_spec(&args.spec)?;
    let grid_str = grid_string(ctx, &args.grid, "log:1e-1:1e4:50");
    let radii = parse_grid(grid_str)?;
    let class = if args.classify {
        Some(spec.decay_class()?)
    } else {
        None
    };

    let mut rows_json = Vec::with_capacity(radii.len());
    let mut rows_csv = Vec::with_capacity(radii.len());
    for &r in &radii {
        let x = embed(spec.d, args.grid.direction, r)?;
        let phi = spec.eigenfunction_value(&x);
        let v = spec.potential_value(&x)?;
        rows_json.push(json!({ "r": r, "phi": phi, "V": v }));
        rows_csv.push(vec![fmt_f64(r), fmt_f64(phi), fmt_f64(v)]);
    }

    let config = json!({
        "spec": spec,
        "grid": grid_str,
        "direction": args.grid.direction,
        "classify": args.classify,
    });
    let mut comments = vec![format!(
        "spec: d={} alpha={} l={} axis={} kappa={}",
        spec.d, spec.alpha, spec.l, spec.axis, spec.kappa
    )];
    if let Some(c) = &class {
        comments.push(format!(
            "decay_class: {}",
            serde_json::to_string(c).expect("class serialization")
        ));
    }
    let mut result = json!({ "spec": spec, "rows": rows_json });
    if let Some(c) = &class {
        result["decay_class"] = serde_json::to_value(c).expect("class serialization");
    }
    Report {
        command: "eigenpair",
        config,
        result,
        table: Some(Table {
            comments,
            header: vec!["r", "phi", "V"],
            rows: rows_csv,
        }),
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------
// residual

#[derive(Args, Debug)]
pub(crate) struct ResidualArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

pub(crate) fn residual(ctx: &Context, args: &ResidualArgs) -> Result<ExitCode, CliError> {
    let spec = ctx.resolve_spec(&args.spec)?;
    let quad = ctx.resolve_quad(&args.quad);
    let grid_str = grid_string(ctx, &args.grid, "log:1e-1:1e2:20");
    let radii = parse_grid(grid_str)?;
    let points = radii
        .iter()
        .map(|&r| embed(spec.d, args.grid.direction, r))
        .collect::<Result<Vec<_>, _>>()?;
    debug(format!("evaluating residual at {} points", points.len()));
    let rep = fraclap::residual(&spec, &points, &quad)?;

    let rows_csv = radii
        .iter()
        .zip(&rep.rows)
        .map(|(&r, row)| {
            vec![
                fmt_f64(r),
                fmt_f64(row.frac_lap),
                fmt_f64(row.v_phi),
                fmt_f64(row.residual_abs),
                row.residual_rel.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect();

    let config = json!({
        "spec": spec,
        "grid": grid_str,
        "direction": args.grid.direction,
        "quad": quad,
    });
    let result = json!({
        "max_abs": rep.max_abs,
        "max_rel": rep.max_rel,
        "rows": rep.rows,
    });
    Report {
        command: "residual",
        config,
        result,
        table: Some(Table {
            comments: vec![format!("max_abs={} max_rel={}", rep.max_abs, rep.max_rel)],
            header: vec!["r", "frac_lap", "v_phi", "residual_abs", "residual_rel"],
            rows: rows_csv,
        }),
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------
// classify

#[derive(Args, Debug)]
pub(crate) struct ClassifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Also report L^p membership for these comma-separated p values
    #[arg(long, value_name = "LIST")]
    pub p: Option<String>,
}

pub(crate) fn classify(ctx: &Context, args: &ClassifyArgs) -> Result<ExitCode, CliError> {
    let spec = ctx.resolve_spec(&args.spec)?;
    let class = spec.decay_class()?;
    let mut result = json!({
        "spec": spec,
        "mu": spec.mu(),
        "decay_class": class,
    });
    if let Some(list) = &args.p {
        let mut lp = Vec::new();
        for part in list.split(',') {
            let p: f64 = part
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--p '{list}' is not a number list")))?;
            lp.push(json!({ "p": p, "member": spec.lp_membership(p) }));
        }
        result["lp"] = Value::Array(lp);
    }
    Report {
        command: "classify",
        config: json!({ "spec": spec, "p": args.p }),
        result,
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------
// predict

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TraitsArg {
    /// Strictly positive bound state
    Positive,
    /// Odd under reflection of the trait axis
    Antisymmetric,
    /// Potential negative near infinity, controlled through an L^p norm
    NegativePotential,
}

#[derive(Args, Debug)]
pub(crate) struct PredictArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub spec: SpecTailArgs,
    /// Structural knowledge about the solution
    #[arg(long, value_enum, default_value_t = TraitsArg::Positive)]
    pub traits: TraitsArg,
    /// L^p knowledge for the upper envelope, where one is needed
    #[arg(long)]
    pub p_norm: Option<f64>,
}

pub(crate) fn predict(ctx: &Context, args: &PredictArgs) -> Result<ExitCode, CliError> {
    let proc = ctx.resolve_process(&args.process)?;
    let spec_args = args.spec.with_process(&args.process);
    let pot = match ctx.resolve_potential(&args.potential, Some(&spec_args))? {
        PotentialChoice::Model(m) => m,
        _ => {
            return Err(CliError::Config(
                "predict needs a potential; pass --potential power|power-log|hypergeometric".into(),
            ))
        }
    };
    let traits = match args.traits {
        TraitsArg::Positive => SolutionTraits::Positive,
        TraitsArg::Antisymmetric => SolutionTraits::Antisymmetric {
            axis: spec_args.axis.unwrap_or(1),
        },
        TraitsArg::NegativePotential => SolutionTraits::NegativePotential,
    };
    let scenario = scenario_classify(&proc, &pot)?;
    let prediction = envelope_predict(&proc, &pot, traits, args.p_norm)?;
    let config = json!({
        "process": proc,
        "potential": pot,
        "traits": traits,
        "p_norm": args.p_norm,
    });
    let result = json!({
        "scenario": scenario,
        "prediction": prediction,
    });
    Report {
        command: "predict",
        config,
        result,
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------
// simulate

#[derive(Subcommand, Debug)]
pub(crate) enum SimulateCmd {
    /// Mean exit time from a centered ball
    Exit(SimExitArgs),
    /// Killed Feynman–Kac functional against the eigenfunction payoff
    Fk(SimFkArgs),
    /// Discounted mean lifetime in the ball B(x, |x|/2)
    Lambda(SimLambdaArgs),
    /// Exit-position law against the closed-form stable density
    Exitlaw(SimExitlawArgs),
}

pub(crate) fn simulate(ctx: &Context, cmd: &SimulateCmd) -> Result<ExitCode, CliError> {
    match cmd {
        SimulateCmd::Exit(a) => sim_exit(ctx, a),
        SimulateCmd::Fk(a) => sim_fk(ctx, a),
        SimulateCmd::Lambda(a) => sim_lambda(ctx, a),
        SimulateCmd::Exitlaw(a) => sim_exitlaw(ctx, a),
    }
}

#[derive(Args, Debug)]
pub(crate) struct SimExitArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub paths: PathArgs,
    /// Ball radius
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Pair the run with one at 4·dt and Richardson-extrapolate
    #[arg(long)]
    pub extrapolate: bool,
}

fn sim_exit(ctx: &Context, args: &SimExitArgs) -> Result<ExitCode, CliError> {
    let proc = ctx.resolve_process(&args.process)?;
    let cfg = ctx.resolve_paths(&args.paths);
    let ball = Ball::new(vec![0.0; proc.d], args.radius);
    info(format!("simulating {} exits at dt={}", cfg.n_paths, cfg.dt));
    let fine = mean_exit_time(&proc, &ball, &cfg)?;
    let reference = expected_exit_time(&proc, args.radius).ok();

    let mut result = json!({
        "estimate": fine.estimate,
        "censored": fine.censored,
        "censored_fraction": fine.censored as f64 / cfg.n_paths as f64,
        "n": cfg.n_paths,
        "dt": cfg.dt,
        "seed": cfg.seed,
        "horizon": cfg.horizon,
    });
    if args.extrapolate {
        let coarse_cfg = PathConfig {
            dt: 4.0 * cfg.dt,
            seed: cfg.seed ^ 0x9E37_79B9_7F4A_7C15,
            ..cfg
        };
        let coarse = mean_exit_time(&proc, &ball, &coarse_cfg)?;
        let extrapolated = extrapolate_dt(&fine.estimate, &coarse.estimate);
        result["coarse"] = json!({
            "estimate": coarse.estimate,
            "censored": coarse.censored,
            "dt": coarse_cfg.dt,
            "seed": coarse_cfg.seed,
        });
        result["extrapolated"] = json!(extrapolated);
    }
    if let Some(exact) = reference {
        result["reference"] = json!(exact);
        let est = if args.extrapolate {
            result["extrapolated"]["mean"].as_f64().unwrap_or(f64::NAN)
        } else {
            fine.estimate.mean
        };
        result["relative_error"] = json!((est - exact).abs() / exact);
    }

    let config = json!({
        "process": proc,
        "radius": args.radius,
        "paths": cfg,
        "extrapolate": args.extrapolate,
    });
    Report {
        command: "simulate exit",
        config,
        result,
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub(crate) struct SimFkArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub paths: PathArgs,
    /// Domain shape: the ball or its complement
    #[arg(long, value_parser = ["ball", "complement"], default_value = "complement")]
    pub domain: String,
    /// Domain ball radius
    #[arg(long, default_value_t = 5.0)]
    pub radius: f64,
    /// Start point: comma-separated coordinates (a single value lies on
    /// the first coordinate)
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
}

fn sim_fk(ctx: &Context, args: &SimFkArgs) -> Result<ExitCode, CliError> {
    let spec = ctx.resolve_spec(&args.spec)?;
    let proc = ProcessSpec::isotropic_stable(spec.d, spec.alpha)?;
    let cfg = ctx.resolve_paths(&args.paths);
    let start = parse_point(&args.x, spec.d)?;
    let ball = Ball::new(vec![0.0; spec.d], args.radius);
    let domain = match args.domain.as_str() {
        "ball" => Domain::Ball(ball),
        _ => Domain::BallComplement(ball),
    };
    // unless told otherwise, weight paths by the eigenpair's own potential
    let potential = match ctx.resolve_potential(&args.potential, Some(&args.spec))? {
        PotentialChoice::Unspecified => Some(PotentialModel::hypergeometric(spec)?),
        PotentialChoice::Off => None,
        PotentialChoice::Model(m) => Some(m),
    };
    let payoff = EigenfunctionField(spec);
    info(format!(
        "running {} Feynman-Kac paths from {:?}",
        cfg.n_paths, start
    ));
    let rep = fk_functional(&proc, potential.as_ref(), &domain, &start, &payoff, &cfg)?;
    let reference = spec.eigenfunction_value(&start);

    let config = json!({
        "spec": spec,
        "process": proc,
        "potential": potential,
        "domain": domain,
        "x": start,
        "paths": cfg,
    });
    let gap = (rep.estimate.mean - reference).abs();
    let result = json!({
        "estimate": rep.estimate,
        "censored_fraction": rep.censored_fraction,
        "reliable": rep.reliable,
        "reference": reference,
        "abs_error": gap,
        "std_errors_off": gap / rep.estimate.std_error.max(1e-300),
        "n": cfg.n_paths,
        "dt": cfg.dt,
        "seed": cfg.seed,
    });
    Report {
        command: "simulate fk",
        config,
        result,
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub(crate) struct SimLambdaArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub spec: SpecTailArgs,
    #[command(flatten)]
    pub paths: PathArgs,
    /// Center point: comma-separated coordinates (a single value lies on
    /// the first coordinate)
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
}

fn sim_lambda(ctx: &Context, args: &SimLambdaArgs) -> Result<ExitCode, CliError> {
    let proc = ctx.resolve_process(&args.process)?;
    let cfg = ctx.resolve_paths(&args.paths);
    let x = parse_point(&args.x, proc.d)?;
    let spec_args = args.spec.with_process(&args.process);
    let potential = match ctx.resolve_potential(&args.potential, Some(&spec_args))? {
        PotentialChoice::Model(m) => Some(m),
        _ => None,
    };
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let discount = match &potential {
        Some(m) => m.v_star_sup(xnorm / 2.0)?,
        None => 0.0,
    };
    info(format!(
        "running {} discounted-lifetime paths from {:?}",
        cfg.n_paths, x
    ));
    let rep = lifetime_lambda(&proc, potential.as_ref(), &x, &cfg)?;

    let config = json!({
        "process": proc,
        "potential": potential,
        "x": x,
        "paths": cfg,
    });
    let result = json!({
        "estimate": rep.estimate,
        "censored_fraction": rep.censored_fraction,
        "reliable": rep.reliable,
        "discount": discount,
        "n": cfg.n_paths,
        "dt": cfg.dt,
        "seed": cfg.seed,
    });
    Report {
        command: "simulate lambda",
        config,
        result,
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub(crate) struct SimExitlawArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub paths: PathArgs,
    /// Ball radius
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

fn sim_exitlaw(ctx: &Context, args: &SimExitlawArgs) -> Result<ExitCode, CliError> {
    let proc = ctx.resolve_process(&args.process)?;
    let cfg = ctx.resolve_paths(&args.paths);
    info(format!(
        "comparing {} exit positions with the closed-form law",
        cfg.n_paths
    ));
    let rep = exit_law_check(&proc, args.radius, &cfg)?;
    let config = json!({
        "process": proc,
        "radius": args.radius,
        "paths": cfg,
    });
    let result = json!({
        "report": rep,
        "n": cfg.n_paths,
        "dt": cfg.dt,
        "seed": cfg.seed,
    });
    Report {
        command: "simulate exitlaw",
        config,
        result,
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------
// fit

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ModelArg {
    Power,
    PowerLog,
    Stretched,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FitTarget {
    /// Eigenfunction values along its axis
    Phi,
    /// Absolute potential values
    Potential,
}

#[derive(Args, Debug)]
pub(crate) struct FitArgs {
    /// CSV file of (r, value) samples; `#` comments and a header line are
    /// skipped
    #[arg(long, value_name = "PATH", conflicts_with = "of")]
    pub input: Option<std::path::PathBuf>,
    /// Sample an eigenpair quantity instead of reading a file
    #[arg(long, value_enum)]
    pub of: Option<FitTarget>,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Rate family to fit
    #[arg(long, value_enum, default_value_t = ModelArg::Power)]
    pub model: ModelArg,
}

fn read_samples(path: &std::path::Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut samples = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() < 2 {
            continue;
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(r), Ok(v)) => samples.push((r, v)),
            // a non-numeric line is a header; skip it
            _ => continue,
        }
    }
    if samples.is_empty() {
        return Err(CliError::Config(format!(
            "{} contains no numeric (r, value) rows",
            path.display()
        )));
    }
    Ok(samples)
}

pub(crate) fn fit(ctx: &Context, args: &FitArgs) -> Result<ExitCode, CliError> {
    let model = match args.model {
        ModelArg::Power => FitModel::Power,
        ModelArg::PowerLog => FitModel::PowerLog,
        ModelArg::Stretched => FitModel::Stretched,
    };
    let (samples, source) = match (&args.input, args.of) {
        (Some(path), None) => (read_samples(path)?, json!(path.display().to_string())),
        (None, Some(target)) => {
            let spec = ctx.resolve_spec(&args.spec)?;
            let grid_str = grid_string(ctx, &args.grid, "log:1e2:1e6:40");
            let radii = parse_grid(grid_str)?;
            let mut samples = Vec::with_capacity(radii.len());
            for &r in &radii {
                let v = match target {
                    FitTarget::Phi => spec.eigenfunction_on_axis(r).abs(),
                    FitTarget::Potential => spec.potential_radial(r)?.abs(),
                };
                samples.push((r, v));
            }
            let name = match target {
                FitTarget::Phi => "phi",
                FitTarget::Potential => "potential",
            };
            (
                samples,
                json!({ "of": name, "spec": spec, "grid": grid_str }),
            )
        }
        _ => {
            return Err(CliError::Config(
                "fit needs exactly one sample source: --input FILE or --of phi|potential".into(),
            ))
        }
    };
    let fit = fit_decay(&samples, Some(model))?;

    let rows_csv = fit
        .params
        .iter()
        .map(|p| vec![p.name.clone(), fmt_f64(p.value), fmt_f64(p.std_error)])
        .collect();
    let config = json!({
        "source": source,
        "model": model,
        "samples": samples.len(),
    });
    let result = json!(fit);
    Report {
        command: "fit",
        config,
        result,
        table: Some(Table {
            comments: vec![format!(
                "rss={} rms_log_residual={}",
                fit.rss, fit.rms_log_residual
            )],
            header: vec!["param", "value", "std_error"],
            rows: rows_csv,
        }),
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------
// verify

#[derive(Args, Debug)]
pub(crate) struct VerifyArgs {
    /// Criterion suite: residual, exit, scenarios, envelopes, iterations,
    /// or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Keep only criteria exercising this potential family
    /// (power, power-log, hypergeometric)
    #[arg(long)]
    pub family: Option<String>,
    /// Override the path count of every Monte Carlo criterion
    #[arg(long)]
    pub paths: Option<usize>,
}

/// Potential family a criterion exercises, for `--family` filtering.
fn criterion_family(id: u32) -> Option<&'static str> {
    match id {
        1 | 2 | 3 | 4 | 7 | 9 => Some("hypergeometric"),
        10 => Some("power"),
        _ => None,
    }
}

pub(crate) fn verify(ctx: &Context, args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let suite = Suite::from_str(&args.suite).map_err(CliError::Config)?;
    let mut ids: Vec<u32> = suite.criteria().to_vec();
    if let Some(family) = &args.family {
        if !matches!(family.as_str(), "power" | "power-log" | "hypergeometric") {
            return Err(CliError::Config(format!(
                "unknown potential family '{family}'; use power, power-log, or \
                 hypergeometric"
            )));
        }
        ids.retain(|&id| criterion_family(id) == Some(family.as_str()));
        if ids.is_empty() {
            return Err(CliError::Config(format!(
                "no criterion in suite '{}' exercises the {family} family",
                suite.name()
            )));
        }
    }
    let opts = VerifyOptions {
        seed: ctx.seed.unwrap_or_else(|| VerifyOptions::default().seed),
        workers: ctx.workers.unwrap_or(1),
        paths: args.paths,
    };

    let mut criteria = Vec::with_capacity(ids.len());
    for &id in &ids {
        let rep = run_criterion(id, &opts);
        eprintln!("{}", rep.summary_line());
        criteria.push(rep);
    }
    let pass = criteria.iter().all(|c| c.pass);
    let report = SuiteReport {
        suite: suite.name().to_string(),
        criteria,
        pass,
    };

    let config = json!({
        "suite": suite.name(),
        "family": args.family,
        "seed": opts.seed,
        "workers": opts.workers,
        "paths": opts.paths,
    });
    Report {
        command: "verify",
        config,
        result: json!(report),
        table: None,
    }
    .emit(ctx.format, ctx.out.as_deref())?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
