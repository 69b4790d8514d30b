use clap::{Args, Parser, Subcommand, ValueEnum};
use ehhk::catalog::{existence_condition, fmt_ratios, Catalog, CatalogEntry, SpaceSpec};
use ehhk::diagonal::{
    log_axis, normal_to_diagonal, slice_critical_points, standard_metric, surface_grid,
    NormalMetric,
};
use ehhk::emit::{num, write_csv, write_json};
use ehhk::flow::{basin_sweep, trajectory, BasinOptions, FlowOptions, FlowState};
use ehhk::numeric::fmt_rational;
use ehhk::symmetric::{classify_symmetric, ScTable};
use ehhk::verify::{run_verification, Level};
use ehhk::{solve_diagonal, stability_report, Error};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ehhk", version, about = "Einstein metrics on H×H/ΔK")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Selector {
    /// space id or instance name, e.g. "E6/F4" or "SU(5)/SO(5)"
    #[arg(long, alias = "id")]
    space: Option<String>,
    /// family id, e.g. "Sp(mk)/Sp(k)^m"
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    d: Option<i64>,
}

impl Selector {
    fn params(&self) -> Vec<(String, i64)> {
        [("m", self.m), ("k", self.k), ("d", self.d)]
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| (n.to_string(), v)))
            .collect()
    }

    fn is_empty(&self) -> bool {
        self.space.is_none() && self.family.is_none()
    }

    fn resolve(&self, cat: &Catalog) -> Result<SpaceSpec, Failure> {
        let name = self
            .space
            .as_deref()
            .or(self.family.as_deref())
            .ok_or_else(|| Failure::Usage("--space or --family is required".into()))?;
        Ok(cat.resolve(name, &self.params())?)
    }
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(Error::from)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// List catalog rows with n, d, a, κ, ρ and the existence condition
    Catalog {
        #[command(flatten)]
        sel: Selector,
        /// only the irreducible symmetric rows
        #[arg(long)]
        symmetric: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Invariant Einstein metrics of one space
    Einstein {
        #[command(flatten)]
        sel: Selector,
        /// skip the non-diagonal solutions of symmetric pairs
        #[arg(long)]
        diagonal_only: bool,
        /// fail (exit 2) when a residual exceeds this
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Block spectrum of L against 2ρ at the diagonal solutions
    Stability {
        #[command(flatten)]
        sel: Selector,
        #[command(flatten)]
        out: Output,
    },
    /// Normalized scalar curvature tables
    Tables {
        #[arg(value_enum)]
        which: Which,
        /// parameter for the parametric rows
        #[arg(long)]
        m: Option<i64>,
        #[command(flatten)]
        out: Output,
    },
    /// Run the Lie-algebra oracle suite
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: VerifyLevel,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// random metrics per pair
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// replace every check's tolerance
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// scal_N over (x1, x2) at unit volume
    Surface {
        #[command(flatten)]
        sel: Selector,
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        /// print the critical points of the x1 = x2 slice instead
        #[arg(long)]
        critical: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Integrate the Ricci flow from one diagonal metric
    Flow {
        #[command(flatten)]
        sel: Selector,
        /// start (x1, x2, x3); defaults to the normal metric (z, 1/z)
        #[arg(long, num_args = 3, value_names = ["X1", "X2", "X3"])]
        x: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.2)]
        z: f64,
        #[arg(long, default_value_t = 2.0)]
        t_end: f64,
        #[arg(long)]
        unnormalized: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Terminal behaviour of the normalized flow over a grid
    Basin {
        #[command(flatten)]
        sel: Selector,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, default_value_t = 0.25)]
        lo: f64,
        #[arg(long, default_value_t = 4.0)]
        hi: f64,
        #[arg(long, default_value_t = 60.0)]
        t_max: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Sc1,
    Sc2,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Fast,
    Full,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn load_catalog() -> Result<Catalog, Failure> {
    match std::env::var_os("EHHK_CATALOG") {
        Some(p) => Ok(Catalog::load(PathBuf::from(p))?),
        None => Ok(Catalog::builtin()),
    }
}

fn emit<T: Serialize>(
    out: &Output,
    default: Format,
    header: &[&str],
    rows: Vec<Vec<String>>,
    json: &T,
) -> Result<(), Failure> {
    let mut w = out.writer()?;
    match out.format(default) {
        Format::Csv => write_csv(&mut w, header, &rows)?,
        Format::Json => write_json(&mut w, json)?,
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct CatalogRow {
    id: String,
    table: String,
    n: String,
    d: String,
    a: String,
    kappa: String,
    rho: String,
    cond2: String,
}

fn spec_row(s: &SpaceSpec) -> Result<CatalogRow, Failure> {
    let cond2 = match existence_condition(s) {
        Ok(c) => c.as_cond2().label().to_string(),
        Err(_) => "-".into(),
    };
    Ok(CatalogRow {
        id: s.id.clone(),
        table: s.table.clone(),
        n: s.n.to_string(),
        d: s.d.to_string(),
        a: fmt_ratios(s),
        kappa: fmt_rational(&s.kappa),
        rho: fmt_rational(&s.rho),
        cond2,
    })
}

fn template_row(e: &CatalogEntry) -> CatalogRow {
    CatalogRow {
        id: e.family_id.clone(),
        table: e.table.clone(),
        n: e.column(4).into(),
        d: e.column(3).into(),
        a: e.column(5).into(),
        kappa: e.column(8).into(),
        rho: format!("({}+1/2)/2", e.column(8)),
        cond2: e.column(7).into(),
    }
}

fn cmd_catalog(
    cat: &Catalog,
    sel: &Selector,
    symmetric: bool,
    out: &Output,
) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let name = sel.space.as_deref().or(sel.family.as_deref());
    let template = name
        .and_then(|n| cat.find_entry(n))
        .filter(|e| e.is_family() && sel.params().is_empty());
    if let Some(e) = template {
        rows.push(template_row(e));
    } else if !sel.is_empty() {
        rows.push(spec_row(&sel.resolve(cat)?)?);
    } else {
        for e in &cat.entries {
            if symmetric && !(e.symmetric() && !e.provisional()) {
                continue;
            }
            if e.is_family() {
                rows.push(template_row(e));
            } else {
                rows.push(spec_row(&e.instantiate(&[])?)?);
            }
        }
    }
    let csv = rows
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                r.table.clone(),
                r.n.clone(),
                r.d.clone(),
                r.a.clone(),
                r.kappa.clone(),
                r.rho.clone(),
                r.cond2.clone(),
            ]
        })
        .collect();
    emit(
        out,
        Format::Csv,
        &["id", "table", "n", "d", "a", "kappa", "rho", "cond2"],
        csv,
        &rows,
    )
}

fn cmd_einstein(
    cat: &Catalog,
    sel: &Selector,
    diagonal_only: bool,
    tol: Option<f64>,
    out: &Output,
) -> Result<(), Failure> {
    let spec = sel.resolve(cat)?;
    let mut sols = match solve_diagonal(&spec) {
        Ok(v) => v,
        Err(Error::Unsupported { .. }) if spec.flags.symmetric => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    if !diagonal_only && spec.flags.symmetric {
        match classify_symmetric(&spec) {
            Ok(v) => sols.extend(v.into_iter().filter(|s| !s.label.is_diagonal())),
            Err(Error::Unsupported { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let rows = sols
        .iter()
        .map(|s| {
            vec![
                s.label.name().to_string(),
                num(s.x1),
                num(s.x2),
                num(s.x3),
                num(s.x4),
                num(s.rho),
                num(s.scal_n),
                num(s.residual),
            ]
        })
        .collect();
    emit(
        out,
        Format::Json,
        &["label", "x1", "x2", "x3", "x4", "rho", "scal_n", "residual"],
        rows,
        &sols,
    )?;
    if let Some(t) = tol {
        if let Some(s) = sols.iter().find(|s| s.residual > t) {
            return Err(Failure::Verification(format!(
                "{} {}: residual {:e} > {t:e}",
                spec.id,
                s.label.name(),
                s.residual
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StabilityJson {
    space_id: String,
    label: &'static str,
    lambda1: f64,
    lambda2: f64,
    two_rho: f64,
    classification: ehhk::Classification,
}

fn cmd_stability(cat: &Catalog, sel: &Selector, out: &Output) -> Result<(), Failure> {
    let spec = sel.resolve(cat)?;
    let mut reps = Vec::new();
    for s in solve_diagonal(&spec)? {
        let r = stability_report(&spec, &s)?;
        reps.push(StabilityJson {
            space_id: r.space_id,
            label: r.label.name(),
            lambda1: r.lambda1,
            lambda2: r.lambda2,
            two_rho: r.two_rho,
            classification: r.classification,
        });
    }
    let rows = reps
        .iter()
        .map(|r| {
            vec![
                r.space_id.clone(),
                r.label.into(),
                num(r.lambda1),
                num(r.lambda2),
                num(r.two_rho),
                serde_json::to_value(r.classification)
                    .map(|v| v.as_str().unwrap_or_default().to_string())
                    .unwrap_or_default(),
            ]
        })
        .collect();
    emit(
        out,
        Format::Json,
        &[
            "space_id",
            "label",
            "lambda1",
            "lambda2",
            "two_rho",
            "classification",
        ],
        rows,
        &reps,
    )
}

fn cmd_tables(cat: &Catalog, which: Which, m: Option<i64>, out: &Output) -> Result<(), Failure> {
    let t = match which {
        Which::Sc1 => ScTable::Sc1,
        Which::Sc2 => ScTable::Sc2,
    };
    let table = t.reproduce(cat, m)?;
    // the tables are printed at 4 decimals, so the CSV matches them
    let rows = table
        .iter()
        .map(|r| {
            let mut v = vec![
                r.space.clone(),
                r.m.map(|m| m.to_string()).unwrap_or_default(),
            ];
            v.extend(r.values.iter().map(|x| format!("{x:.4}")));
            v
        })
        .collect();
    emit(out, Format::Csv, t.header(), rows, &table)
}

fn cmd_verify(
    cat: &Catalog,
    level: VerifyLevel,
    seed: u64,
    samples: usize,
    tol: Option<f64>,
    out: &Output,
) -> Result<(), Failure> {
    let level = match level {
        VerifyLevel::Fast => Level::Fast,
        VerifyLevel::Full => Level::Full,
    };
    let mut rep = run_verification(cat, level, seed, samples)?;
    if let Some(t) = tol {
        for c in &mut rep.checks {
            c.tol = t;
            c.passed = c.value.is_finite() && c.value < t;
        }
    }
    let rows = rep
        .checks
        .iter()
        .map(|c| {
            vec![
                c.case.clone(),
                c.name.clone(),
                format!("{:e}", c.value),
                format!("{:e}", c.tol),
                if c.passed { "pass" } else { "fail" }.into(),
            ]
        })
        .collect();
    emit(
        out,
        Format::Csv,
        &["case", "check", "value", "tol", "result"],
        rows,
        &rep,
    )?;
    match rep.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Verification(format!(
            "{}: {} = {:e} exceeds {:e}",
            c.case, c.name, c.value, c.tol
        ))),
    }
}

fn cmd_surface(
    cat: &Catalog,
    sel: &Selector,
    grid: usize,
    lo: f64,
    hi: f64,
    critical: bool,
    out: &Output,
) -> Result<(), Failure> {
    let spec = sel.resolve(cat)?;
    if critical {
        let pts = slice_critical_points(&spec, 4000);
        let rows = pts.iter().map(|x| vec![num(*x)]).collect();
        return emit(out, Format::Json, &["x"], rows, &pts);
    }
    let cells = surface_grid(&spec, grid, lo, hi)?;
    let rows = cells
        .iter()
        .map(|c| c.iter().map(|v| num(*v)).collect())
        .collect();
    emit(out, Format::Csv, &["x1", "x2", "scal_n"], rows, &cells)
}

fn cmd_flow(
    cat: &Catalog,
    sel: &Selector,
    x: Option<Vec<f64>>,
    z: f64,
    t_end: f64,
    unnormalized: bool,
    out: &Output,
) -> Result<(), Failure> {
    let spec = sel.resolve(cat)?;
    let x0 = match x {
        Some(v) => [v[0], v[1], v[2]],
        None => normal_to_diagonal(&NormalMetric::new(z, 1.0 / z)?, &standard_metric()).array(),
    };
    let opts = FlowOptions {
        normalized: !unnormalized,
        ..Default::default()
    };
    let pts = trajectory(&spec, FlowState { t: 0.0, x: x0 }, t_end, &opts)?;
    let rows = pts
        .iter()
        .map(|p| vec![num(p.t), num(p.x1), num(p.x2), num(p.x3), num(p.scal)])
        .collect();
    emit(
        out,
        Format::Csv,
        &["t", "x1", "x2", "x3", "scal"],
        rows,
        &pts,
    )
}

fn cmd_basin(
    cat: &Catalog,
    sel: &Selector,
    grid: usize,
    lo: f64,
    hi: f64,
    t_max: f64,
    out: &Output,
) -> Result<(), Failure> {
    let spec = sel.resolve(cat)?;
    if grid < 2 || !(lo > 0.0 && hi > lo) {
        return Err(Failure::Usage(format!(
            "grid needs >= 2 points on 0 < lo < hi, got {grid} on [{lo}, {hi}]"
        )));
    }
    let axis = log_axis(grid, lo, hi);
    let map = basin_sweep(
        &spec,
        &axis,
        &BasinOptions {
            t_max,
            ..Default::default()
        },
    )?;
    let mut rows = Vec::new();
    for (i, x1) in map.axis.iter().enumerate() {
        for (j, x2) in map.axis.iter().enumerate() {
            rows.push(vec![num(*x1), num(*x2), map.labels[i][j].as_str().into()]);
        }
    }
    emit(out, Format::Csv, &["x1", "x2", "label"], rows, &map)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cat = load_catalog()?;
    match cli.cmd {
        Cmd::Catalog {
            sel,
            symmetric,
            out,
        } => cmd_catalog(&cat, &sel, symmetric, &out),
        Cmd::Einstein {
            sel,
            diagonal_only,
            tol,
            out,
        } => cmd_einstein(&cat, &sel, diagonal_only, tol, &out),
        Cmd::Stability { sel, out } => cmd_stability(&cat, &sel, &out),
        Cmd::Tables { which, m, out } => cmd_tables(&cat, which, m, &out),
        Cmd::Verify {
            level,
            seed,
            samples,
            tol,
            out,
        } => cmd_verify(&cat, level, seed, samples, tol, &out),
        Cmd::Surface {
            sel,
            grid,
            lo,
            hi,
            critical,
            out,
        } => cmd_surface(&cat, &sel, grid, lo, hi, critical, &out),
        Cmd::Flow {
            sel,
            x,
            z,
            t_end,
            unnormalized,
            out,
        } => cmd_flow(&cat, &sel, x, z, t_end, unnormalized, &out),
        Cmd::Basin {
            sel,
            grid,
            lo,
            hi,
            t_max,
            out,
        } => cmd_basin(&cat, &sel, grid, lo, hi, t_max, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(2)
        }
    }
}
