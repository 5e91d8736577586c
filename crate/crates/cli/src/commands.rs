use std::fmt::Write as _;
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use vmkdv_core::hierarchy::{FlowTable, DEFAULT_CAP};
use vmkdv_core::numerics::{flow_residual, ClosedForm, Grid, ResidualConfig, SolutionField, TimeMethod};
use vmkdv_core::solutions::*;
use vmkdv_core::suite::{run_suite, Golden, SuiteConfig};
use vmkdv_core::{Error, Result as CoreResult, VerificationReport};

use crate::config::{self, BreatherFile, FileConfig, Format, SolitonFile};
use crate::{Cli, CliError, Command, SolitonArgs, TimeArgs};

struct Context {
    file: FileConfig,
    format: Format,
    out_dir: Option<PathBuf>,
    grid: Grid,
    accuracy: u32,
}

/// One output file. Without `--out-dir` only the first artifact is printed, to stdout.
struct Artifact {
    name: String,
    body: String,
}

struct Outcome {
    artifacts: Vec<Artifact>,
    reports: Vec<VerificationReport>,
    /// The printed artifact is sampled data, so report lines go to stderr rather than
    /// being part of it.
    data: bool,
}

impl Outcome {
    fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

pub fn run(cli: Cli) -> Result<bool, CliError> {
    let g = cli.global;
    let file = match &g.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = Context {
        format: g.format.or(file.format).unwrap_or_default(),
        out_dir: g.out_dir.or(file.out_dir.clone()),
        grid: config::grid(&file.grid, g.x0, g.x1, g.nx)?,
        accuracy: config::accuracy(&file.grid, g.accuracy)?,
        file,
    };
    let outcome = match cli.command {
        Command::DeriveFlow { n, cap } => derive_flow(&ctx, n, cap)?,
        Command::Lax { n, cap } => lax(&ctx, n, cap)?,
        Command::CheckZcr { n, cap } => check_zcr(&ctx, n, cap)?,
        Command::Soliton { params, times, tolerance } => soliton(&ctx, &params, &times, tolerance)?,
        Command::Breather { params, unit, mu, times, tolerance } => breather(&ctx, params, unit, mu, &times, tolerance)?,
        Command::BacklundCheck { params, times, scale, tolerance } => backlund(&ctx, &params, &times, scale, tolerance)?,
        Command::VerifyAll { quick, golden_dir, seed } => verify_all(&ctx, quick, golden_dir, seed)?,
    };
    emit(&ctx, &outcome)?;
    Ok(outcome.pass())
}

fn emit(ctx: &Context, outcome: &Outcome) -> Result<(), CliError> {
    match &ctx.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            for a in &outcome.artifacts {
                let path = dir.join(&a.name);
                std::fs::write(&path, &a.body).map_err(|e| CliError::io(&path, e))?;
                println!("wrote {}", path.display());
            }
            for r in &outcome.reports {
                println!("{r}");
            }
        }
        None => {
            if let Some(a) = outcome.artifacts.first() {
                print!("{}", a.body);
            }
            if outcome.data && ctx.format != Format::Json {
                for r in &outcome.reports {
                    eprintln!("{r}");
                }
            }
        }
    }
    Ok(())
}

fn unsupported(ctx: &Context, command: &str) -> CliError {
    CliError::Config(format!("format {:?} is not available for {command}", ctx.format).to_lowercase())
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn table(ctx: &Context, cap: Option<u32>) -> FlowTable {
    FlowTable::with_cap(cap.or(ctx.file.cap).unwrap_or(DEFAULT_CAP))
}

fn derive_flow(ctx: &Context, n: Option<u32>, cap: Option<u32>) -> Result<Outcome, CliError> {
    let n = n.or(ctx.file.n).unwrap_or(1);
    let flow = table(ctx, cap).flow(n)?;
    let time = format!("t{}", 2 * n + 1);
    let (name, body) = match ctx.format {
        Format::Text => (format!("flow_{time}.txt"), format!("u_{time} = {flow}\n")),
        Format::Json => (
            format!("flow_{time}.json"),
            pretty(&serde_json::json!({ "n": n, "time": time, "flow": flow.to_string() })),
        ),
        Format::Csv => return Err(unsupported(ctx, "derive-flow")),
    };
    Ok(Outcome { artifacts: vec![Artifact { name, body }], reports: vec![], data: false })
}

fn lax(ctx: &Context, n: Option<u32>, cap: Option<u32>) -> Result<Outcome, CliError> {
    let n = n.or(ctx.file.n).unwrap_or(1);
    let v = table(ctx, cap).lax_v(n)?;
    let k = 2 * n + 1;
    let (name, body) = match ctx.format {
        Format::Text => (format!("lax_v{k}.txt"), format!("V{k}:\n{v}")),
        Format::Json => (format!("lax_v{k}.json"), pretty(&v.to_json())),
        Format::Csv => return Err(unsupported(ctx, "lax")),
    };
    Ok(Outcome { artifacts: vec![Artifact { name, body }], reports: vec![], data: false })
}

fn check_zcr(ctx: &Context, n: Option<u32>, cap: Option<u32>) -> Result<Outcome, CliError> {
    let n = n.or(ctx.file.n).unwrap_or(1);
    let residual = table(ctx, cap).zero_curvature_residual(n)?;
    let nonzero = residual.coeffs().filter(|(_, c)| !c.is_zero()).count();
    let report = VerificationReport::new(format!("zero curvature n={n}"), nonzero as f64, 0.0)
        .with("residual", residual.to_json());
    let (name, body) = match ctx.format {
        Format::Text if report.pass => ("zcr.txt", format!("check-zcr n={n}: residual: exact zero\n")),
        Format::Text => ("zcr.txt", format!("check-zcr n={n}: residual is not zero\n{residual}")),
        Format::Json => ("zcr.json", pretty(&report)),
        Format::Csv => return Err(unsupported(ctx, "check-zcr")),
    };
    Ok(Outcome { artifacts: vec![Artifact { name: name.into(), body }], reports: vec![report], data: false })
}

/// Times from the config file, then the parameter file, then flags.
fn merge_times(ctx: &Context, from_params: &std::collections::BTreeMap<String, f64>, flags: &TimeArgs) -> Result<TimeVector, CliError> {
    let mut map = ctx.file.times.clone();
    map.extend(from_params.iter().map(|(k, v)| (k.clone(), *v)));
    for (k, v) in [("t1", flags.t1), ("t3", flags.t3), ("t5", flags.t5), ("t7", flags.t7)] {
        if let Some(v) = v {
            map.insert(k.into(), v);
        }
    }
    config::parse_times(&map)
}

fn soliton_params(ctx: &Context, args: &SolitonArgs, times: &TimeArgs) -> Result<(SolitonParams, TimeVector), CliError> {
    let path = args.params.clone().or(ctx.file.params.clone());
    let mut f = match path {
        Some(p) => SolitonFile::load(&p)?,
        None => SolitonFile::default(),
    };
    f.mu = args.mu.or(f.mu);
    f.c0 = args.c0.or(f.c0);
    f.c = args.c.clone().or(f.c);
    Ok((f.params(args.normalize)?, merge_times(ctx, &f.times, times)?))
}

/// A solution viewed with x shifted by `t1`.
struct Shifted<'a, S: ?Sized> {
    inner: &'a S,
    dx: f64,
}

impl<S: ClosedForm + ?Sized> Shifted<'_, S> {
    fn at(&self, t: &TimeVector) -> TimeVector {
        t.clone().with(0, t.x() + self.dx)
    }
}

impl<S: ClosedForm + ?Sized> ClosedForm for Shifted<'_, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn label(&self) -> String {
        self.inner.label()
    }
    fn value(&self, t: &TimeVector) -> CoreResult<DVector<f64>> {
        self.inner.value(&self.at(t))
    }
    fn time_derivative(&self, t: &TimeVector, n: u32) -> Option<CoreResult<DVector<f64>>> {
        self.inner.time_derivative(&self.at(t), n)
    }
}

fn field_artifacts(ctx: &Context, field: &SolutionField, reports: &[VerificationReport]) -> Result<Vec<Artifact>, CliError> {
    let n = field.dim();
    let header: Vec<String> = (1..=n).map(|k| format!("u{k}")).collect();
    let row = |i: usize, sep: &str| {
        std::iter::once(field.grid.x(i))
            .chain(field.row(i).iter().copied())
            // adding 0.0 maps -0.0 to 0.0
            .map(|v| format!("{:.16e}", v + 0.0))
            .collect::<Vec<_>>()
            .join(sep)
    };
    let mut out = String::new();
    let artifact = match ctx.format {
        Format::Csv => {
            writeln!(out, "x,{}", header.join(",")).unwrap();
            for i in 0..field.grid.nx {
                writeln!(out, "{}", row(i, ",")).unwrap();
            }
            Artifact { name: "field.csv".into(), body: out }
        }
        Format::Text => {
            writeln!(out, "# {}\n# x {}", field.provenance, header.join(" ")).unwrap();
            for i in 0..field.grid.nx {
                writeln!(out, "{}", row(i, " ")).unwrap();
            }
            Artifact { name: "field.dat".into(), body: out }
        }
        Format::Json => {
            let u: Vec<Vec<f64>> = (0..field.grid.nx).map(|i| field.row(i).iter().copied().collect()).collect();
            let x: Vec<f64> = field.grid.points().collect();
            let body = pretty(&serde_json::json!({
                "solution": field.provenance, "grid": field.grid, "x": x, "u": u, "reports": reports,
            }));
            return Ok(vec![Artifact { name: "field.json".into(), body }]);
        }
    };
    Ok(vec![artifact, Artifact { name: "report.json".into(), body: pretty(&reports) }])
}

fn sample_and_verify<S: ClosedForm>(
    ctx: &Context,
    sol: &S,
    times: &TimeVector,
    checks: &[(u32, f64)],
    method: TimeMethod,
) -> Result<Outcome, CliError> {
    let shifted = Shifted { inner: sol, dx: times.x() };
    let field = SolutionField::sample(ctx.grid, sol.dim(), sol.label(), |x| shifted.value(&times.clone().with(0, x)))?;
    let table = FlowTable::new();
    let reports = checks
        .iter()
        .map(|&(n, tolerance)| {
            let config = ResidualConfig { grid: ctx.grid, accuracy: ctx.accuracy, method, tolerance };
            let flow = table.flow(n)?;
            flow_residual(&shifted, &flow, n, times, &config)
        })
        .collect::<CoreResult<Vec<_>>>()?;
    Ok(Outcome { artifacts: field_artifacts(ctx, &field, &reports)?, reports, data: true })
}

fn soliton(ctx: &Context, args: &SolitonArgs, times: &TimeArgs, tolerance: Option<f64>) -> Result<Outcome, CliError> {
    let (p, t) = soliton_params(ctx, args, times)?;
    let tol = tolerance.or(ctx.file.tolerance).unwrap_or(1e-6);
    let mut checks = vec![(1, tol)];
    if t.get(2) != 0.0 {
        checks.push((2, 10.0 * tol));
    }
    sample_and_verify(ctx, &p, &t, &checks, TimeMethod::AnalyticXi)
}

fn breather(
    ctx: &Context,
    params: Option<PathBuf>,
    unit: Option<(usize, usize)>,
    mu: Option<[f64; 2]>,
    times: &TimeArgs,
    tolerance: Option<f64>,
) -> Result<Outcome, CliError> {
    let (p, file_times) = match (params.or(ctx.file.params.clone()), unit) {
        (_, Some((n, j))) => {
            let [re, im] = mu.ok_or_else(|| CliError::Config("--unit needs --mu re,im".into()))?;
            let p = BreatherParams::unit_example(Complex64::new(re, im), n, j).map_err(|e| CliError::Config(e.to_string()))?;
            (p, Default::default())
        }
        (Some(path), None) => {
            let mut f = BreatherFile::load(&path)?;
            f.mu = mu.or(f.mu);
            (f.params()?, f.times)
        }
        (None, None) => return Err(CliError::Config("breather needs --params FILE or --unit N,j".into())),
    };
    let t = merge_times(ctx, &file_times, times)?;
    let tol = tolerance.or(ctx.file.tolerance).unwrap_or(1e-6);
    sample_and_verify(ctx, &p, &t, &[(1, tol)], TimeMethod::Fd { delta: 1e-3 })
}

fn backlund(ctx: &Context, args: &SolitonArgs, times: &TimeArgs, scale: f64, tolerance: Option<f64>) -> Result<Outcome, CliError> {
    let (p, t) = soliton_params(ctx, args, times)?;
    let tol = tolerance.or(ctx.file.tolerance).unwrap_or(1e-10);
    let (nx, dim) = (ctx.grid.nx, p.dim());
    let at = |i: usize| t.clone().with(0, ctx.grid.x(i) + t.x());
    let values = DMatrix::from_fn(nx, dim, |i, j| scale * one_soliton(&p, &at(i))[j]);
    let dx = DMatrix::from_fn(nx, dim, |i, j| scale * p.mu * one_soliton_dxi(&p, &at(i))[j]);
    let zero = FieldSamples { values: DMatrix::zeros(nx, dim), dx: DMatrix::zeros(nx, dim) };
    let name = "backlund vacuum -> soliton";
    let report = match backlund_residual(&zero, &FieldSamples { values, dx }, p.mu, &Branch::Best) {
        Ok(r) => VerificationReport::new(name, r.residual.max(r.constraint), tol)
            .with("residual", r.residual)
            .with("constraint", r.constraint),
        Err(Error::ConstraintViolation { excess }) => {
            // |ũ - u|² exceeds 4μ², so no real a₀ exists; the excess is the failure size
            VerificationReport::new(name, excess.max(f64::MIN_POSITIVE), tol).with("constraint_excess", excess)
        }
        Err(e) => return Err(e.into()),
    }
    .with("scale", scale)
    .with("grid", ctx.grid);
    let body = match ctx.format {
        Format::Json => pretty(&report),
        Format::Text => format!("{report}\n"),
        Format::Csv => return Err(unsupported(ctx, "backlund-check")),
    };
    let name = if ctx.format == Format::Json { "backlund.json" } else { "backlund.txt" };
    Ok(Outcome { artifacts: vec![Artifact { name: name.into(), body }], reports: vec![report], data: false })
}

fn verify_all(ctx: &Context, quick: bool, golden_dir: Option<PathBuf>, seed: Option<u64>) -> Result<Outcome, CliError> {
    let golden = match golden_dir.or(ctx.file.golden_dir.clone()) {
        Some(dir) => Golden::from_dir(&dir).map_err(|e| CliError::io(&dir, e))?,
        None => Golden::embedded(),
    };
    let defaults = SuiteConfig::default();
    let config = SuiteConfig {
        quick: quick || ctx.file.quick.unwrap_or(false),
        seed: seed.or(ctx.file.seed).unwrap_or(defaults.seed),
        golden,
    };
    let reports = run_suite(&config);
    let body = match ctx.format {
        Format::Json => pretty(&reports),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                writeln!(s, "{r}").unwrap();
                if let Some(e) = r.metadata.get("error") {
                    writeln!(s, "      error: {e}").unwrap();
                }
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            writeln!(s, "{passed}/{} criteria passed{}", reports.len(), if config.quick { " (quick)" } else { "" }).unwrap();
            s
        }
        Format::Csv => return Err(unsupported(ctx, "verify-all")),
    };
    let name = if ctx.format == Format::Json { "verify_all.json" } else { "verify_all.txt" };
    // the table already lists every criterion, so only the verdict is repeated
    let failed = reports.iter().filter(|r| !r.pass).count();
    let summary = VerificationReport::new("acceptance suite failures", failed as f64, 0.0);
    Ok(Outcome { artifacts: vec![Artifact { name: name.into(), body }], reports: vec![summary], data: false })
}
