//! Implementations behind the subcommands: flag resolution, dispatch,
//! and deterministic file output.
//!
//! Every command validates its numeric inputs against the operation's
//! preconditions before dispatching, so precondition violations surface
//! as usage errors (exit 2) rather than panics or solver failures. File
//! bodies contain no timestamps or machine-specific content; reruns with
//! identical inputs are byte-identical.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bomber_analysis::{
    asymptotics_table_in_mode, check_conjecture, report_to_json, verify_spend_boundary,
    write_asymptotics_csv, Conjecture, ASYM_MAX_STOCK,
};
use bomber_core::{
    asymptotic_K, classify_spend_it_all, region_of_point, BoundaryCase, ModelParams,
};
use bomber_sim::{simulate, Policy};
use bomber_solver::{solve, FieldKind, Grid, SolutionField, SolveMode};

use crate::config::Resolver;
use crate::{
    AsymptoticsArgs, BoundaryArgs, CheckArgs, Cli, CliError, ClassifyArgs, Command, FigureArgs,
    OutputFormat, PolicyKind, SimulateArgs, SolveArgs, SurfaceKind,
};

/// Relative half-width of the sample pair bracketing each regime
/// boundary in `figure` output.
const BRACKET: f64 = 1e-7;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Resolver::load(cli.config.as_deref())?;
    match cli.command {
        Command::Solve(a) => cmd_solve(a, &cfg),
        Command::Boundary(a) => cmd_boundary(a, &cfg),
        Command::Classify(a) => cmd_classify(a, &cfg),
        Command::Check(a) => cmd_check(a, &cfg),
        Command::Asymptotics(a) => cmd_asymptotics(a, &cfg),
        Command::Simulate(a) => cmd_simulate(a, &cfg),
        Command::Figure(a) => cmd_figure(a, &cfg),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve_v(flag: Option<f64>, cfg: &Resolver) -> Result<f64, CliError> {
    let v = Resolver::require(cfg.f64(flag, "v")?, "v")?;
    if !(v.is_finite() && v > 0.0 && v <= 1.0) {
        return Err(usage(format!("--v must lie in (0, 1], got {v}")));
    }
    Ok(v)
}

fn resolve_mode(flag: Option<f64>, cfg: &Resolver) -> Result<SolveMode, CliError> {
    match cfg.f64(flag, "discrete-step")? {
        None => Ok(SolveMode::Continuous),
        Some(step) if step.is_finite() && step > 0.0 => Ok(SolveMode::DiscreteUnit { step }),
        Some(step) => Err(usage(format!(
            "--discrete-step must be positive and finite, got {step}"
        ))),
    }
}

/// Writes `body` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, body)
                .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", p.display())))?;
            println!("wrote {} ({} bytes)", p.display(), body.len());
            Ok(())
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read_field(path: &Path) -> Result<SolutionField, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Failed(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "json" => Ok(SolutionField::read_json(&mut reader)?),
        "csv" => Err(usage(
            "csv files hold a single exported surface and cannot be read back; \
             use a binary or json field",
        )),
        _ => Ok(SolutionField::read_binary(&mut reader)?),
    }
}

fn case_label(case: BoundaryCase) -> &'static str {
    match case {
        BoundaryCase::I => "I",
        BoundaryCase::II => "II",
        BoundaryCase::III => "III",
        BoundaryCase::IV => "IV",
    }
}

fn mode_label(mode: SolveMode) -> String {
    match mode {
        SolveMode::Continuous => "continuous allocations".to_string(),
        SolveMode::DiscreteUnit { step } => format!("discrete units of {step}"),
    }
}

/// Fully resolved `solve` invocation: flags and config merged, every
/// parameter validated against the solver's preconditions.
struct RunConfig {
    params: ModelParams,
    grid: Grid,
    mode: SolveMode,
    out: PathBuf,
    format: OutputFormat,
    kind: FieldKind,
}

fn infer_format(path: &Path) -> OutputFormat {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        _ => OutputFormat::Binary,
    }
}

fn field_kind(kind: SurfaceKind) -> FieldKind {
    match kind {
        SurfaceKind::P => FieldKind::P,
        SurfaceKind::K => FieldKind::K,
        SurfaceKind::H => FieldKind::H,
    }
}

fn resolve_solve(a: SolveArgs, cfg: &Resolver) -> Result<RunConfig, CliError> {
    let v = resolve_v(a.v, cfg)?;
    let defaults = Grid::default();
    let x_max = cfg.f64(a.xmax, "xmax")?.unwrap_or(defaults.x_max);
    let nx = cfg.usize(a.nx, "nx")?.unwrap_or(defaults.nx);
    let t_max = cfg.f64(a.tmax, "tmax")?.unwrap_or(defaults.t_max);
    let nt = cfg.usize(a.nt, "nt")?.unwrap_or(defaults.nt);
    let grid = Grid::new(x_max, nx, t_max, nt).map_err(|e| usage(e.to_string()))?;
    let mode = resolve_mode(a.discrete_step, cfg)?;
    let out = Resolver::require(cfg.path(a.out, "out"), "out")?;
    let format = match cfg.value_enum::<OutputFormat>(a.format, "format")? {
        Some(f) => f,
        None => infer_format(&out),
    };
    let kind = field_kind(
        cfg.value_enum::<SurfaceKind>(a.kind, "kind")?
            .unwrap_or(SurfaceKind::P),
    );
    Ok(RunConfig {
        params: ModelParams::new(v),
        grid,
        mode,
        out,
        format,
        kind,
    })
}

fn write_field(
    field: &SolutionField,
    path: &Path,
    format: OutputFormat,
    kind: FieldKind,
) -> Result<usize, CliError> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Binary => field.write_binary(&mut buf)?,
        OutputFormat::Json => field.write_json(&mut buf)?,
        OutputFormat::Csv => field.write_csv(kind, &mut buf)?,
    }
    std::fs::write(path, &buf)
        .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))?;
    Ok(buf.len())
}

fn cmd_solve(a: SolveArgs, cfg: &Resolver) -> Result<(), CliError> {
    let run = resolve_solve(a, cfg)?;
    let started = Instant::now();
    let field = solve(run.params, run.grid, run.mode)?;
    let runtime = started.elapsed().as_secs_f64();
    let bytes = write_field(&field, &run.out, run.format, run.kind)?;

    let grid = field.grid();
    let top = field.p_slice(grid.nt - 1);
    let mut ix_best = 0;
    for (ix, &p) in top.iter().enumerate() {
        if p > top[ix_best] {
            ix_best = ix;
        }
    }
    println!(
        "grid: x in [0, {}] with {} nodes (dx = {:.6}), t in [0, {}] with {} nodes (dt = {:.6})",
        grid.x_max,
        grid.nx,
        grid.dx(),
        grid.t_max,
        grid.nt,
        grid.dt()
    );
    println!("mode: {}", mode_label(field.mode()));
    println!("runtime: {runtime:.2} s");
    println!(
        "max P(., t = {}) = {:.9} at x = {}",
        grid.t_max,
        top[ix_best],
        grid.x(ix_best)
    );
    println!("wrote {} ({bytes} bytes)", run.out.display());
    Ok(())
}

fn cmd_boundary(a: BoundaryArgs, cfg: &Resolver) -> Result<(), CliError> {
    let v = resolve_v(a.v, cfg)?;
    let tmin = Resolver::require(cfg.f64(a.tmin, "tmin")?, "tmin")?;
    let tmax = Resolver::require(cfg.f64(a.tmax, "tmax")?, "tmax")?;
    let steps = Resolver::require(cfg.usize(a.steps, "steps")?, "steps")?;
    if !(tmin.is_finite() && tmin > 0.0) {
        return Err(usage(format!("--tmin must be positive, got {tmin}")));
    }
    if !(tmax.is_finite() && tmax > tmin) {
        return Err(usage(format!(
            "--tmax must exceed --tmin, got {tmax} vs {tmin}"
        )));
    }
    if steps < 2 {
        return Err(usage(format!("--steps must be at least 2, got {steps}")));
    }
    let params = ModelParams::new(v);
    let mut body = String::from("t,f_u,g_u,case\n");
    for i in 0..steps {
        let t = tmin + (tmax - tmin) * i as f64 / (steps - 1) as f64;
        // f, g, and the case do not depend on the stock; query at x = 1.
        let verdict = classify_spend_it_all(1.0, t, &params, false);
        writeln!(
            body,
            "{},{},{},{}",
            t,
            verdict.f_value,
            verdict.g_value,
            case_label(verdict.case)
        )
        .expect("writing to a string cannot fail");
    }
    emit(cfg.path(a.out, "out").as_deref(), &body)
}

fn cmd_classify(a: ClassifyArgs, cfg: &Resolver) -> Result<(), CliError> {
    let v = resolve_v(a.v, cfg)?;
    let x = Resolver::require(cfg.f64(a.x, "x")?, "x")?;
    let t = Resolver::require(cfg.f64(a.t, "t")?, "t")?;
    if !(x.is_finite() && x > 0.0) {
        return Err(usage(format!("--x must be positive, got {x}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(usage(format!("--t must be positive, got {t}")));
    }
    let verdict = classify_spend_it_all(x, t, &ModelParams::new(v), a.exact);
    print!("{}", report_to_json(&verdict));
    Ok(())
}

fn cmd_check(a: CheckArgs, cfg: &Resolver) -> Result<(), CliError> {
    let path = Resolver::require(cfg.path(a.field, "field"), "field")?;
    let factor = cfg.f64(a.tolerance_factor, "tolerance-factor")?.unwrap_or(2.0);
    if !(factor.is_finite() && factor >= 0.0) {
        return Err(usage(format!(
            "--tolerance-factor must be nonnegative, got {factor}"
        )));
    }
    let field = read_field(&path)?;
    let grid = field.grid();
    let tol = factor * grid.dx();
    println!(
        "field: {} | v = {} | {} x {} nodes | {}",
        path.display(),
        field.params().v,
        grid.nx,
        grid.nt,
        mode_label(field.mode())
    );
    println!("allocation tolerance: {tol} ({factor} dx)");
    println!();

    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for which in [Conjecture::A, Conjecture::B, Conjecture::C] {
        let report = check_conjecture(&field, which, tol)?;
        println!("{report}");
        println!();
        // B is an open conjecture: violations are findings, not failures.
        if which != Conjecture::B && !report.is_clean() {
            failed.push(format!(
                "{which} ({} violations)",
                report.violations.len()
            ));
        }
        reports.push(report);
    }
    let boundary = if a.boundary {
        let report = verify_spend_boundary(&field)?;
        println!("{report}");
        println!();
        Some(report)
    } else {
        None
    };

    if let Some(json_path) = cfg.path(a.json, "json") {
        let doc = serde_json::json!({
            "a": reports[0],
            "b": reports[1],
            "c": reports[2],
            "boundary": boundary,
        });
        let body = format!("{:#}\n", doc);
        std::fs::write(&json_path, &body).map_err(|e| {
            CliError::Failed(format!("cannot write {}: {e}", json_path.display()))
        })?;
        println!("wrote {} ({} bytes)", json_path.display(), body.len());
    }

    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "proven monotonicity violated: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_asymptotics(a: AsymptoticsArgs, cfg: &Resolver) -> Result<(), CliError> {
    let v = resolve_v(a.v, cfg)?;
    let rho = Resolver::require(cfg.f64(a.rho, "rho")?, "rho")?;
    if !(rho.is_finite() && rho > 0.0) {
        return Err(usage(format!("--rho must be positive, got {rho}")));
    }
    let ts = cfg.f64_list(&a.t, "t")?;
    if ts.is_empty() {
        return Err(usage("--t is required (as a flag or a config entry)"));
    }
    for &t in &ts {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(usage(format!("--t values must lie in (0, 1), got {t}")));
        }
        let x_req = -t.ln() / rho;
        if x_req > ASYM_MAX_STOCK {
            return Err(usage(format!(
                "t = {t} at rho = {rho} needs a stock of {x_req:.1}, \
                 beyond the supported {ASYM_MAX_STOCK}"
            )));
        }
    }
    let mode = resolve_mode(a.discrete_step, cfg)?;
    let rows = asymptotics_table_in_mode(&ModelParams::new(v), rho, &ts, mode)?;
    let mut buf = Vec::new();
    write_asymptotics_csv(&rows, &mut buf)?;
    let body = String::from_utf8(buf).expect("csv output is ascii");
    emit(cfg.path(a.out, "out").as_deref(), &body)
}

fn cmd_simulate(a: SimulateArgs, cfg: &Resolver) -> Result<(), CliError> {
    let kind = Resolver::require(cfg.value_enum::<PolicyKind>(a.policy, "policy")?, "policy")?;
    let v = resolve_v(a.v, cfg)?;
    let x0 = Resolver::require(cfg.f64(a.x0, "x0")?, "x0")?;
    let t0 = Resolver::require(cfg.f64(a.t0, "t0")?, "t0")?;
    if !(x0.is_finite() && x0 >= 0.0) {
        return Err(usage(format!("--x0 must be nonnegative, got {x0}")));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(usage(format!("--t0 must be positive, got {t0}")));
    }
    let trials = cfg.u64(a.trials, "trials")?.unwrap_or(200_000);
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let seed = cfg.u64(a.seed, "seed")?.unwrap_or(0);
    let params = ModelParams::new(v);

    let field_storage;
    let policy = match kind {
        PolicyKind::FromField => {
            let path = Resolver::require(cfg.path(a.field, "field"), "field")?;
            field_storage = read_field(&path)?;
            Policy::FromField(&field_storage)
        }
        PolicyKind::SpendItAll => Policy::SpendItAll,
        PolicyKind::FixedFraction => {
            let phi = Resolver::require(cfg.f64(a.fraction, "fraction")?, "fraction")?;
            if !(phi.is_finite() && phi > 0.0 && phi <= 1.0) {
                return Err(usage(format!(
                    "--fraction must lie in (0, 1], got {phi}"
                )));
            }
            Policy::FixedFraction(phi)
        }
        PolicyKind::TwoStage => Policy::TwoStage,
    };

    // Both simulator errors are configuration problems (start point off
    // the stored field, or a field solved under a different v).
    let report = simulate(&policy, x0, t0, &params, trials, seed)
        .map_err(|e| usage(e.to_string()))?;
    println!("{report}");
    if let Some(path) = cfg.path(a.out, "out") {
        let body = report_to_json(&report);
        std::fs::write(&path, &body)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {} ({} bytes)", path.display(), body.len());
    }
    Ok(())
}

fn cmd_figure(a: FigureArgs, cfg: &Resolver) -> Result<(), CliError> {
    let t = Resolver::require(cfg.f64(a.t, "t")?, "t")?;
    if !(t.is_finite() && t > 0.0 && t < 1.0) {
        return Err(usage(format!(
            "--t must lie in (0, 1) — the approximation is a small-time statement, got {t}"
        )));
    }
    let log_abs = -t.ln();
    let x_max = cfg.f64(a.xmax, "xmax")?.unwrap_or(11.0 * log_abs);
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(usage(format!("--xmax must be positive, got {x_max}")));
    }
    let samples = cfg.usize(a.samples, "samples")?.unwrap_or(400);
    if samples < 2 {
        return Err(usage(format!("--samples must be at least 2, got {samples}")));
    }

    let mut xs: Vec<f64> = (1..=samples)
        .map(|i| x_max * i as f64 / samples as f64)
        .collect();
    // The approximation has a kink where |log t|/x crosses into the next
    // regime, at x = |log t|·j(j+1)/2. Bracket each crossing inside the
    // range with a tight pair of extra samples so the continuity of the
    // curve across the kink is visible in the emitted data.
    for j in 1..=4u32 {
        let xb = log_abs * (j * (j + 1)) as f64 / 2.0;
        if xb * (1.0 + BRACKET) <= x_max {
            xs.extend([xb * (1.0 - BRACKET), xb, xb * (1.0 + BRACKET)]);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut body = String::from("x,t,j,K_asym\n");
    for &x in &xs {
        let label = region_of_point(x, t);
        writeln!(body, "{},{},{},{}", x, t, label.j, asymptotic_K(x, t))
            .expect("writing to a string cannot fail");
    }
    emit(cfg.path(a.out, "out").as_deref(), &body)
}
