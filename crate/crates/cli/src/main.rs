use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entrimur::bounds::bound_report;
use entrimur::field::FiniteField;
use entrimur::gallery::{self, GalleryCase};
use entrimur::io::{multi_observable_to_json, parse_observable, state_to_json};
use entrimur::mub::mub_bound_sandwich;
use entrimur::objects::Observable;
use entrimur::solver::{self, Bracket, SolverConfig};
use entrimur::spin;
use entrimur::Error;
use serde_json::{json, Map, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "entrimur", version, about = "Entropic measurement uncertainty for finite-dimensional observables")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Seed for the randomized state searches.
    #[arg(long, global = true, default_value_t = SolverConfig::default().seed)]
    seed: u64,
    #[arg(long, global = true, default_value_t = SolverConfig::default().restarts)]
    restarts: usize,
    #[arg(long, global = true, default_value_t = SolverConfig::default().outer_tol)]
    outer_tol: f64,
    #[arg(long, global = true, default_value_t = SolverConfig::default().inner_tol)]
    inner_tol: f64,
    /// Exchange round limit; hitting it gives exit status 3.
    #[arg(long, global = true, default_value_t = SolverConfig::default().max_exchange_rounds)]
    max_rounds: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the exchange rounds as JSON lines to this file.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound, optimum and two earlier proposals for a pair of spin components.
    SpinTable {
        #[arg(long, default_value_t = FRAC_PI_4)]
        alpha: f64,
    },
    /// Lower bound and optimum on an angle grid over [0, pi/2].
    SpinScan {
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
    /// Bound sandwich for the conjugate bases over GF(p^n).
    Mub {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Three orthogonal spin components.
    ThreeSpin,
    /// Incompatibility bracket of two or more observables read from JSON files.
    Icomp {
        #[arg(required = true, num_args = 2..)]
        targets: Vec<PathBuf>,
    },
    /// Error-disturbance bracket: measure A by an instrument, then B.
    Iad { a: PathBuf, b: PathBuf },
    /// Closed-form and preparation bounds for observables read from JSON files.
    Bounds {
        #[arg(required = true, num_args = 2..)]
        targets: Vec<PathBuf>,
    },
    /// The two compatible pairs without a nondisturbing sequential implementation.
    Appendix {
        #[arg(long, default_value_t = 0.6)]
        lambda: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SpinTable { .. } => "spin-table",
            Command::SpinScan { .. } => "spin-scan",
            Command::Mub { .. } => "mub",
            Command::ThreeSpin => "three-spin",
            Command::Icomp { .. } => "icomp",
            Command::Iad { .. } => "iad",
            Command::Bounds { .. } => "bounds",
            Command::Appendix { .. } => "appendix",
        }
    }
}

enum Failure {
    Parse(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            // bad command-line values are reported like malformed input
            Error::Parse(_) | Error::Domain(_) | Error::InvalidParameter(_) => Failure::Parse(e.to_string()),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

/// Rounds to 9 significant digits.
fn sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float")
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(sig(x))
    } else {
        Value::Null
    }
}

fn cell(x: f64) -> String {
    if x.is_finite() {
        let r = sig(x);
        if r != 0.0 && !(1e-4..1e9).contains(&r.abs()) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    } else if x > 0.0 {
        "inf".into()
    } else {
        "nan".into()
    }
}

/// Table with named columns; rendered as CSV or a JSON list of records.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn records(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect(),
        )
    }

    fn csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|v| match v {
                    Value::Number(n) => cell(n.as_f64().expect("finite")),
                    Value::Null => "inf".into(),
                    Value::String(t) => t.clone(),
                    other => other.to_string(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

struct Output {
    table: Table,
    /// Extra fields for the JSON form.
    extra: Map<String, Value>,
    saturated: bool,
}

impl Output {
    fn table(table: Table) -> Self {
        Output { table, extra: Map::new(), saturated: false }
    }
}

fn header(command: &str, cfg: &SolverConfig) -> Value {
    json!({
        "version": VERSION,
        "command": command,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "inner_tol": cfg.inner_tol,
        "outer_tol": cfg.outer_tol,
        "max_exchange_rounds": cfg.max_exchange_rounds,
    })
}

fn render(out: &Output, format: Format, head: &Value) -> String {
    match format {
        Format::Csv => {
            let h = head.as_object().expect("object");
            let fields: Vec<String> = h
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    v => format!("{k}={v}"),
                })
                .collect();
            format!("# entrimur {}\n{}", fields.join(" "), out.table.csv())
        }
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("header".into(), head.clone());
            obj.insert("rows".into(), out.table.records());
            for (k, v) in &out.extra {
                obj.insert(k.clone(), v.clone());
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("plain values");
            s.push('\n');
            s
        }
    }
}

fn read_observable(path: &Path) -> Result<Observable, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    parse_observable(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn bracket_row(b: &Bracket) -> Vec<Value> {
    vec![num(b.lower), num(b.upper), num(b.width()), json!(b.rounds_used), json!(b.saturated)]
}

const BRACKET_COLUMNS: [&str; 5] = ["lower", "upper", "width", "rounds", "saturated"];

fn bracket_output(b: &Bracket) -> Output {
    let mut table = Table::new(&BRACKET_COLUMNS);
    table.push(bracket_row(b));
    let mut extra = Map::new();
    extra.insert("witness_measurement".into(), multi_observable_to_json(&b.witness_measurement));
    extra.insert("worst_state".into(), state_to_json(&b.worst_state));
    Output { table, extra, saturated: b.saturated }
}

fn write_trace(path: &Path, brackets: &[&Bracket]) -> Result<(), Failure> {
    let mut f = fs::File::create(path)?;
    for b in brackets {
        b.write_trace(&mut f)?;
    }
    Ok(())
}

fn spin_table(alpha: f64) -> Result<Output, Failure> {
    let cols = spin::comparison_table(alpha)?;
    let mut table = Table::new(&["row", "LB", "Icomp", "BLW", "NV"]);
    for (name, get) in [
        ("gamma", (|p: &spin::SpinPoint| p.gamma) as fn(&spin::SpinPoint) -> f64),
        ("phi", |p| p.phi),
        ("value", |p| p.value),
    ] {
        let mut row = vec![json!(name)];
        row.extend(cols.iter().map(|c| num(get(&c.point))));
        table.push(row);
    }
    let mut out = Output::table(table);
    out.extra.insert("alpha".into(), num(alpha));
    Ok(out)
}

fn spin_scan(grid: usize) -> Result<Output, Failure> {
    let mut table = Table::new(&["alpha", "lb", "icomp_value", "gamma_star", "phi_star"]);
    for r in spin::scan(grid)? {
        table.push(vec![num(r.alpha), num(r.lb), num(r.icomp_value), num(r.gamma_star), num(r.phi_star)]);
    }
    Ok(Output::table(table))
}

fn mub(p: usize, n: usize, cfg: &SolverConfig) -> Result<Output, Failure> {
    let f = FiniteField::new(p, n)?;
    let s = mub_bound_sandwich(&f, cfg)?;
    let mut table = Table::new(&["d", "p", "n", "lambda0", "lower", "value", "upper"]);
    table.push(vec![json!(s.d), json!(s.p), json!(s.n), num(s.lambda0), num(s.lower), num(s.value), num(s.upper)]);
    Ok(Output::table(table))
}

fn three_spin() -> Output {
    let r = spin::three_spin_icomp();
    let mut table = Table::new(&["c", "icomp", "pauli_value", "scan_value"]);
    table.push(vec![num(r.c), num(r.value), num(r.pauli_value), num(r.scan_value)]);
    Output::table(table)
}

fn bounds(targets: &[Observable], cfg: &SolverConfig) -> Result<Output, Failure> {
    let refs: Vec<&Observable> = targets.iter().collect();
    let r = bound_report(&refs, cfg)?;
    let mut table = Table::new(&["cloning2", "cloningN", "shannon_cap", "kp_lower", "prep_coeff", "tradeoff_rhs"]);
    table.push(vec![num(r.cloning2), num(r.cloning_n), num(r.shannon_cap), num(r.kp_lower), num(r.prep_coeff), num(r.tradeoff_rhs)]);
    Ok(Output::table(table))
}

struct AppendixRun {
    case: GalleryCase,
    icomp: Bracket,
    /// Sequential order, "AB" or "BA", and its bracket.
    iad: (&'static str, Bracket),
}

fn appendix(lambda: f64, cfg: &SolverConfig) -> Result<(Output, Vec<Bracket>), Failure> {
    let one = gallery::hw_example_1();
    let two = gallery::hw_example_2_default(lambda)?;
    let runs = [
        AppendixRun {
            icomp: solver::icomp(&one.a, &one.b, cfg)?,
            iad: ("BA", solver::iad(&one.b, &one.a, cfg)?),
            case: one,
        },
        AppendixRun {
            icomp: solver::icomp(&two.a, &two.b, cfg)?,
            iad: ("AB", solver::iad(&two.a, &two.b, cfg)?),
            case: two,
        },
    ];
    let mut table = Table::new(&[
        "case",
        "marginal_defect",
        "icomp_lower",
        "icomp_upper",
        "iad_order",
        "iad_lower",
        "iad_upper",
        "saturated",
    ]);
    let mut notes = Map::new();
    for r in &runs {
        table.push(vec![
            json!(r.case.name),
            r.case.marginal_defect().map_or(Value::Null, num),
            num(r.icomp.lower),
            num(r.icomp.upper),
            json!(r.iad.0),
            num(r.iad.1.lower),
            num(r.iad.1.upper),
            json!(r.icomp.saturated || r.iad.1.saturated),
        ]);
        notes.insert(r.case.name.clone(), json!(r.case.notes));
    }
    let mut out = Output::table(table);
    out.saturated = runs.iter().any(|r| r.icomp.saturated || r.iad.1.saturated);
    out.extra.insert("lambda".into(), num(lambda));
    out.extra.insert("notes".into(), Value::Object(notes));
    let brackets = runs.into_iter().flat_map(|r| [r.icomp, r.iad.1]).collect();
    Ok((out, brackets))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let o = &cli.opts;
    let cfg = SolverConfig {
        seed: o.seed,
        restarts: o.restarts,
        outer_tol: o.outer_tol,
        inner_tol: o.inner_tol,
        max_exchange_rounds: o.max_rounds,
        ..SolverConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Parse(e.to_string()))?;
    let default_format = if matches!(cli.command, Command::Appendix { .. }) { Format::Json } else { Format::Csv };
    let format = o.format.unwrap_or(default_format);
    let mut brackets = Vec::new();
    let out = match &cli.command {
        Command::SpinTable { alpha } => spin_table(*alpha)?,
        Command::SpinScan { grid } => spin_scan(*grid)?,
        Command::Mub { p, n } => mub(*p, *n, &cfg)?,
        Command::ThreeSpin => three_spin(),
        Command::Icomp { targets } => {
            let obs = targets.iter().map(|p| read_observable(p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Observable> = obs.iter().collect();
            let b = solver::icomp_multi(&refs, &cfg)?;
            let out = bracket_output(&b);
            brackets.push(b);
            out
        }
        Command::Iad { a, b } => {
            let (a, b) = (read_observable(a)?, read_observable(b)?);
            let br = solver::iad(&a, &b, &cfg)?;
            let out = bracket_output(&br);
            brackets.push(br);
            out
        }
        Command::Bounds { targets } => {
            let obs = targets.iter().map(|p| read_observable(p)).collect::<Result<Vec<_>, _>>()?;
            bounds(&obs, &cfg)?
        }
        Command::Appendix { lambda } => {
            let (out, b) = appendix(*lambda, &cfg)?;
            brackets = b;
            out
        }
    };
    let text = render(&out, format, &header(cli.command.name(), &cfg));
    match &o.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    if let Some(path) = &o.trace {
        write_trace(path, &brackets.iter().collect::<Vec<_>>())?;
    }
    Ok(out.saturated)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("entrimur: exchange round limit reached before the bracket closed");
            ExitCode::from(3)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("entrimur: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("entrimur: {msg}");
            ExitCode::from(1)
        }
    }
}
