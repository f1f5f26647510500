//! Command-line front end: argument parsing, dispatch to the solvers, and
//! JSON / CSV / plot-text rendering.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::eigensolver::{EigenClass, SpectrumReport};
use crate::lognls::{
    first_excited_presets, second_excited_presets, solve_many, solve_state, HistoryEntry, LogNlsConfig, LogNlsError,
    LogNlsSolution, Normalization,
};
use crate::ptspec::{
    infinite_wavefunction, lowest_real_states, scan_confined, solve_confined, solve_infinite, confined_wavefunction,
    ConfinedProblem, Flip, InfiniteProblem, InfiniteState, PtError,
};
use crate::quadrature::{QuadError, QuadratureRule, WeightSpec};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "NHSPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    PlotText,
}

#[derive(Debug, Parser)]
#[command(name = "nhspec", version, about = "Spectral solvers for the logarithmic radial equation and PT-symmetric potentials")]
pub struct Cli {
    /// Output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent solves
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Also write two-column plot series to this file
    #[arg(long, global = true)]
    pub emit_plot: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gauss rule for exp(-c x^2) on an interval
    Quad(QuadArgs),
    /// Ground or excited state of the logarithmic radial equation
    Lognls(LogNlsArgs),
    /// PT-symmetric box problem -D^2 + i x^m on [-T, T]
    PtConfined(ConfinedArgs),
    /// PT-symmetric problem on the line in a scaled Hermite basis
    PtInfinite(InfiniteArgs),
    /// Regenerate one of the reference tables
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct QuadArgs {
    #[arg(long)]
    pub c: f64,
    /// `a,b`; either end may be `inf` / `-inf`
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval: (f64, f64),
    #[arg(long)]
    pub order: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LogNlsArgs {
    #[arg(long, required_unless_present_any = ["table1", "table2"])]
    pub s: Option<f64>,
    /// 1 = ground state
    #[arg(long, default_value_t = 2)]
    pub state: usize,
    #[arg(long, default_value_t = 20)]
    pub basis: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.8)]
    pub nu: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 40)]
    pub quad_order: usize,
    /// First excited state over the built-in s grid
    #[arg(long, conflicts_with = "table2")]
    pub table1: bool,
    /// Second excited state over the built-in s grid
    #[arg(long)]
    pub table2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Potential {
    X,
    X3,
}

impl Potential {
    fn power(self) -> u32 {
        match self {
            Potential::X => 1,
            Potential::X3 => 3,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConfinedArgs {
    #[arg(long, value_enum, default_value = "x")]
    pub potential: Potential,
    #[arg(long = "T", required_unless_present = "scan_t")]
    pub t: Option<f64>,
    #[arg(long = "N", required_unless_present = "scan_n")]
    pub n: Option<usize>,
    /// `start:end:step`, inclusive
    #[arg(long = "scan-T", value_parser = parse_range)]
    pub scan_t: Option<Grid>,
    /// Comma-separated basis sizes
    #[arg(long = "scan-N", value_delimiter = ',')]
    pub scan_n: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct InfiniteArgs {
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long = "N", default_value_t = 90)]
    pub n: usize,
    /// Number of lowest real states to report
    #[arg(long, default_value_t = 10)]
    pub states: usize,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub table: u8,
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

/// Inclusive arithmetic grid parsed from `start:end:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_range(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected `start:end:step`, got `{s}`"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let (a, b, h) = (v[0], v[1], v[2]);
    if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(format!("bad range `{s}`"));
    }
    let count = ((b - a) / h + 1e-9).floor() as usize;
    Ok(Grid((0..=count).map(|k| a + k as f64 * h).collect()))
}

// ---------------------------------------------------------------------------
// JSON records

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadRecord {
    pub c: f64,
    /// Endpoints as text so that infinities survive JSON.
    pub interval: [String; 2],
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogNlsRecord {
    pub s: f64,
    pub state: usize,
    pub basis: usize,
    pub c: f64,
    pub nu: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_hat")]
    pub e_hat: f64,
    #[serde(rename = "E_unit")]
    pub e_unit: f64,
    #[serde(rename = "E_origin")]
    pub e_origin: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
    pub nodes_r: Vec<f64>,
    pub iterations: usize,
    pub history: Vec<HistoryEntry>,
}

impl From<&LogNlsSolution> for LogNlsRecord {
    fn from(s: &LogNlsSolution) -> Self {
        LogNlsRecord {
            s: s.config.s,
            state: s.config.state,
            basis: s.config.basis_size,
            c: s.config.c,
            nu: s.config.nu,
            e: s.e,
            e_hat: s.e_hat,
            e_unit: s.e_unit,
            e_origin: s.e_origin,
            n0: s.n0,
            nodes_r: s.nodes_r.clone(),
            iterations: s.iterations,
            history: s.history.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub re: f64,
    pub im: f64,
    /// `REAL` or `PAIR`
    pub class: String,
    pub partner: Option<usize>,
}

fn eigen_records(values: &[crate::eigensolver::Complex], classes: &[EigenClass]) -> Vec<EigenRecord> {
    values
        .iter()
        .zip(classes)
        .map(|(z, c)| EigenRecord {
            re: z.re,
            im: z.im,
            class: class_name(c).into(),
            partner: match c {
                EigenClass::Real => None,
                EigenClass::Pair(j) => Some(*j),
            },
        })
        .collect()
}

fn class_name(c: &EigenClass) -> &'static str {
    match c {
        EigenClass::Real => "REAL",
        EigenClass::Pair(_) => "PAIR",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfinedRecord {
    pub m_pow: u32,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub pair_count: usize,
    pub eigenvalues: Vec<EigenRecord>,
}

impl ConfinedRecord {
    fn new(p: &ConfinedProblem, r: &SpectrumReport) -> Self {
        ConfinedRecord {
            m_pow: p.m_pow,
            t: p.t,
            n: p.size,
            pair_count: r.pair_count(),
            eigenvalues: eigen_records(&r.eigenvalues, r.classes.as_deref().unwrap_or(&[])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub m_pow: u32,
    pub cells: Vec<ConfinedRecord>,
    pub flips: Vec<Flip>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteRecord {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_im")]
    pub e_im: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub class: String,
}

impl From<&InfiniteState> for InfiniteRecord {
    fn from(s: &InfiniteState) -> Self {
        InfiniteRecord { e: s.e.re, e_im: s.e.im, delta: s.delta, class: class_name(&s.class).into() }
    }
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Empty,
}

#[derive(Debug, Default)]
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Debug)]
struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

struct Report {
    json: serde_json::Value,
    table: Table,
    series: Vec<Series>,
    default_format: Format,
    /// Diagnostics for solves that did not converge.
    failures: Vec<String>,
}

/// Six significant digits, plain decimal where reasonable.
pub fn six_significant(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

fn render_csv(t: &Table) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|c| match c {
            Cell::Num(x) => six_significant(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn render_plot(series: &[Series]) -> String {
    let mut out = String::new();
    for (i, s) in series.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# {}", s.label);
        for (x, y) in &s.points {
            let _ = writeln!(out, "{x} {y}");
        }
    }
    out
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Errors and exit codes

#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::ChainBreakdown { .. } | QuadError::RootNotConverged { .. } | QuadError::NonFiniteIntegrand { .. } => {
                Failure::Solver(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<LogNlsError> for Failure {
    fn from(e: LogNlsError) -> Self {
        match e {
            LogNlsError::InvalidConfig(_) | LogNlsError::Basis(_) => Failure::Usage(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<PtError> for Failure {
    fn from(e: PtError) -> Self {
        match e {
            PtError::Eigen(_) => Failure::Solver(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Parse `args` (program name first), run, and return the process exit code:
/// 0 on success, 2 on usage errors, 1 when a solver fails to converge.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // a pool may already exist when run() is called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let report = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return 2;
        }
        Err(Failure::Solver(m)) => {
            eprintln!("solver failure: {m}");
            return 1;
        }
    };
    let format = cli.format.unwrap_or(report.default_format);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report.json).map(|mut s| {
            s.push('\n');
            s
        }),
        Format::Csv => match render_csv(&report.table) {
            Ok(s) => Ok(s),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        Format::PlotText => Ok(render_plot(&report.series)),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = write_output(cli.out.as_deref(), &text) {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    if let Some(p) = &cli.emit_plot {
        if let Err(e) = std::fs::write(p, render_plot(&report.series)) {
            eprintln!("error: cannot write plot data to {}: {e}", p.display());
            return 1;
        }
    }
    for f in &report.failures {
        eprintln!("solver failure: {f}");
    }
    if report.failures.is_empty() {
        0
    } else {
        1
    }
}

fn dispatch(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Quad(a) => quad(a),
        Command::Lognls(a) if a.table1 || a.table2 => {
            let cfgs: Vec<LogNlsConfig> = if a.table1 { first_excited_presets() } else { second_excited_presets() }
                .iter()
                .map(|p| p.config())
                .collect();
            lognls_table(&cfgs)
        }
        Command::Lognls(a) => lognls_single(a),
        Command::PtConfined(a) => confined(a),
        Command::PtInfinite(a) => infinite(a),
        Command::Reproduce(a) => reproduce(a.table),
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("records serialize")
}

fn quad(a: &QuadArgs) -> Result<Report, Failure> {
    let spec = WeightSpec::new(a.c, a.interval.0, a.interval.1)?;
    let rule = QuadratureRule::from_spec(spec, a.order)?;
    let rec = QuadRecord {
        c: a.c,
        interval: [a.interval.0.to_string(), a.interval.1.to_string()],
        order: a.order,
        nodes: rule.nodes.clone(),
        weights: rule.weights.clone(),
    };
    let table = Table {
        header: vec!["node".into(), "weight".into()],
        rows: rule.nodes.iter().zip(&rule.weights).map(|(x, w)| vec![Cell::Num(*x), Cell::Num(*w)]).collect(),
    };
    let series = vec![Series {
        label: "node weight".into(),
        points: rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect(),
    }];
    Ok(Report { json: to_json(&rec), table, series, default_format: Format::Json, failures: vec![] })
}

fn lognls_single(a: &LogNlsArgs) -> Result<Report, Failure> {
    let mut cfg = LogNlsConfig::new(a.s.unwrap_or(f64::NAN), a.state, a.basis, a.c);
    cfg.nu = a.nu;
    cfg.tol_coeff = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.quad_order = a.quad_order;
    let sol = solve_state(&cfg)?;
    let rec = LogNlsRecord::from(&sol);
    let mut header: Vec<String> = ["s", "state", "E", "E_hat", "E_unit", "E_origin", "N0", "iterations"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut row = vec![
        Cell::Num(rec.s),
        Cell::Int(rec.state),
        Cell::Num(rec.e),
        Cell::Num(rec.e_hat),
        Cell::Num(rec.e_unit),
        Cell::Num(rec.e_origin),
        Cell::Num(rec.n0),
        Cell::Int(rec.iterations),
    ];
    for (k, z) in rec.nodes_r.iter().enumerate() {
        header.push(format!("zero{}", k + 1));
        row.push(Cell::Num(*z));
    }
    let r_end = 12.0 / (cfg.c.sqrt() * cfg.mu());
    let points = (0..=400)
        .map(|k| {
            let r = r_end * k as f64 / 400.0;
            (r, sol.psi(Normalization::Physical, r).abs())
        })
        .collect();
    Ok(Report {
        json: to_json(&rec),
        table: Table { header, rows: vec![row] },
        series: vec![Series { label: format!("r |psi(r)|  s={} state={}", cfg.s, cfg.state), points }],
        default_format: Format::Json,
        failures: vec![],
    })
}

fn lognls_table(cfgs: &[LogNlsConfig]) -> Result<Report, Failure> {
    let results = solve_many(cfgs);
    let zeros = cfgs.first().map(|c| c.state - 1).unwrap_or(0);
    let mut header = vec!["s".to_string(), "E".to_string()];
    if zeros == 1 {
        header.push("zero".into());
    } else {
        header.extend((1..=zeros).map(|k| format!("zero{k}")));
    }
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut points = Vec::new();
    for (cfg, r) in cfgs.iter().zip(results) {
        match r {
            Ok(sol) => {
                let mut row = vec![Cell::Num(cfg.s), Cell::Num(sol.e)];
                row.extend(sol.nodes_r.iter().map(|z| Cell::Num(*z)));
                rows.push(row);
                points.push((cfg.s, sol.e));
                records.push(LogNlsRecord::from(&sol));
            }
            Err(e) => {
                let f = Failure::from(e);
                match f {
                    Failure::Usage(m) => return Err(Failure::Usage(m)),
                    Failure::Solver(m) => failures.push(format!("s={}: {m}", cfg.s)),
                }
            }
        }
    }
    Ok(Report {
        json: to_json(&records),
        table: Table { header, rows },
        series: vec![Series { label: "s E".into(), points }],
        default_format: Format::Csv,
        failures,
    })
}

fn lowest_confined_series(p: &ConfinedProblem, r: &SpectrumReport) -> Result<Series, Failure> {
    let v = r.eigenvectors.first().ok_or_else(|| Failure::Solver("empty spectrum".into()))?;
    let mut points = Vec::with_capacity(401);
    for k in 0..=400 {
        let x = -p.t + 2.0 * p.t * k as f64 / 400.0;
        points.push((x, confined_wavefunction(p, v, x)?.norm()));
    }
    Ok(Series { label: format!("x |psi(x)|  T={} N={}", p.t, p.size), points })
}

fn confined(a: &ConfinedArgs) -> Result<Report, Failure> {
    let m = a.potential.power();
    if a.scan_t.is_none() && a.scan_n.is_none() {
        let (t, n) = (a.t.unwrap_or(f64::NAN), a.n.unwrap_or(0));
        let p = ConfinedProblem::new(t, n, m)?;
        let r = solve_confined(&p)?;
        let rec = ConfinedRecord::new(&p, &r);
        let table = Table {
            header: ["index", "re", "im", "class"].iter().map(|s| s.to_string()).collect(),
            rows: rec
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(k, e)| vec![Cell::Int(k), Cell::Num(e.re), Cell::Num(e.im), Cell::Text(e.class.clone())])
                .collect(),
        };
        let series = vec![lowest_confined_series(&p, &r)?];
        return Ok(Report { json: to_json(&rec), table, series, default_format: Format::Json, failures: vec![] });
    }
    let t_list = a.scan_t.clone().map(|g| g.0).unwrap_or_else(|| a.t.into_iter().collect());
    let n_list = a.scan_n.clone().unwrap_or_else(|| a.n.into_iter().collect());
    let scan = scan_confined(m, &t_list, &n_list)?;
    let cells: Vec<ConfinedRecord> = scan
        .cells
        .iter()
        .map(|c| ConfinedRecord {
            m_pow: m,
            t: c.t,
            n: c.size,
            pair_count: c.pair_count,
            eigenvalues: eigen_records(&c.eigenvalues, &c.classes),
        })
        .collect();
    let mut rows = Vec::new();
    for c in &cells {
        for (k, e) in c.eigenvalues.iter().enumerate() {
            rows.push(vec![
                Cell::Num(c.t),
                Cell::Int(c.n),
                Cell::Int(k),
                Cell::Num(e.re),
                Cell::Num(e.im),
                Cell::Text(e.class.clone()),
            ]);
        }
    }
    let series = n_list
        .iter()
        .map(|&n| Series {
            label: format!("T pair_count  N={n}"),
            points: cells.iter().filter(|c| c.n == n).map(|c| (c.t, c.pair_count as f64)).collect(),
        })
        .collect();
    let rec = ScanRecord { m_pow: m, cells, flips: scan.flips };
    Ok(Report {
        json: to_json(&rec),
        table: Table {
            header: ["T", "N", "index", "re", "im", "class"].iter().map(|s| s.to_string()).collect(),
            rows,
        },
        series,
        default_format: Format::Json,
        failures: vec![],
    })
}

fn infinite(a: &InfiniteArgs) -> Result<Report, Failure> {
    let p = InfiniteProblem::new(a.m, a.alpha, a.gamma, a.n)?;
    infinite_report(&p, a.states)
}

fn infinite_report(p: &InfiniteProblem, k: usize) -> Result<Report, Failure> {
    let states = solve_infinite(p)?;
    let low = lowest_real_states(&states, k);
    let recs: Vec<InfiniteRecord> = low.iter().map(InfiniteRecord::from).collect();
    let table = Table {
        header: ["E", "E_im", "Delta", "class"].iter().map(|s| s.to_string()).collect(),
        rows: recs
            .iter()
            .map(|r| vec![Cell::Num(r.e), Cell::Num(r.e_im), Cell::Num(r.delta), Cell::Text(r.class.clone())])
            .collect(),
    };
    let mut series = Vec::new();
    if let Some(s) = low.first() {
        series.push(Series {
            label: format!("x |psi(x)|  E={}", s.e.re),
            points: (0..=600)
                .map(|j| {
                    let x = -6.0 + 12.0 * j as f64 / 600.0;
                    (x, infinite_wavefunction(p, &s.coefficients, x).norm())
                })
                .collect(),
        });
    }
    series.push(Series {
        label: "index E".into(),
        points: recs.iter().enumerate().map(|(j, r)| ((j + 1) as f64, r.e)).collect(),
    });
    Ok(Report { json: to_json(&recs), table, series, default_format: Format::Json, failures: vec![] })
}

/// Columns of real parts, one per problem, padded with empty cells.
fn real_part_columns(problems: &[(String, ConfinedProblem)], rows: usize) -> Result<Report, Failure> {
    let mut recs = Vec::new();
    let mut series = Vec::new();
    for (label, p) in problems {
        let r = solve_confined(p)?;
        let rec = ConfinedRecord::new(p, &r);
        series.push(Series {
            label: format!("index re  {label}"),
            points: rec.eigenvalues.iter().take(rows).enumerate().map(|(k, e)| ((k + 1) as f64, e.re)).collect(),
        });
        recs.push(rec);
    }
    let mut header = vec!["index".to_string()];
    header.extend(problems.iter().map(|(l, _)| l.clone()));
    let table_rows = (0..rows)
        .map(|k| {
            let mut row = vec![Cell::Int(k + 1)];
            row.extend(recs.iter().map(|r| r.eigenvalues.get(k).map(|e| Cell::Num(e.re)).unwrap_or(Cell::Empty)));
            row
        })
        .collect();
    Ok(Report {
        json: to_json(&recs),
        table: Table { header, rows: table_rows },
        series,
        default_format: Format::Csv,
        failures: vec![],
    })
}

fn reproduce(table: u8) -> Result<Report, Failure> {
    match table {
        1 | 2 => {
            let presets = if table == 1 { first_excited_presets() } else { second_excited_presets() };
            let cfgs: Vec<LogNlsConfig> = presets.iter().map(|p| p.config()).collect();
            lognls_table(&cfgs)
        }
        3 => {
            let problems = [1.0, 3.0, 4.0]
                .iter()
                .map(|&t| Ok((format!("T={t}"), ConfinedProblem::new(t, 4, 1)?)))
                .collect::<Result<Vec<_>, PtError>>()?;
            real_part_columns(&problems, 4)
        }
        4 => {
            let problems = [4, 8, 16, 32]
                .iter()
                .map(|&n| Ok((format!("N={n}"), ConfinedProblem::new(5.0, n, 1)?)))
                .collect::<Result<Vec<_>, PtError>>()?;
            real_part_columns(&problems, 10)
        }
        _ => {
            let p = InfiniteProblem::new(3, 1.0, 0.5, 90)?;
            infinite_report(&p, 10)
        }
    }
}
