//! `hankel`: certify continuity and compactness of Hankel and Toeplitz
//! operators between power series spaces, run the regression suites and
//! benchmark the apply paths.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hankel_kothe::certify::{
    certify_compactness, certify_continuity, check_condition, dense_oracle, ergodic_cases, ergodicity_check, hankel_family, tameness_scan,
    theorem_suite, CaseOutcome, ConditionInputs, Gauge, SuiteInstance, TamenessVerdict, TheoremSuite,
};
use hankel_kothe::operators::{apply, fast_apply, OperatorSpec, ShiftKind};
use hankel_kothe::presets::{parse_element, parse_space, parse_symbol};
use hankel_kothe::sequences::{
    check_domination, check_shifted_subadditivity, check_stability, check_weak_stability, DominationKind, DominationVerdict, StabilityVerdict,
};
use hankel_kothe::spaces::{dual_membership, nuclearity};
use hankel_kothe::{basis_element, CertifyError, Condition, ExponentSequence, IndexWindow, SearchBounds, SequenceError, SpaceError, Status, Symbol};

const EX_USAGE: u8 = 64;
const EX_NON_MONTEL: u8 = 65;
const EX_IOERR: u8 = 74;

#[derive(Parser)]
#[command(name = "hankel", version, about = "At-scale certificates for Hankel and Toeplitz operators on Köthe spaces")]
struct Cli {
    /// Worker threads for the column tables (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Recorded in every report; drives the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpKind {
    Hankel,
    Toeplitz,
    Backward,
    Forward,
}

#[derive(Args, Clone, Copy)]
struct BoundsArgs {
    #[arg(long, default_value_t = SearchBounds::default().k_max)]
    k_max: usize,
    #[arg(long, default_value_t = SearchBounds::default().m_max)]
    m_max: usize,
    #[arg(long, default_value_t = SearchBounds::default().n_max)]
    n_max: usize,
    #[arg(long, default_value_t = SearchBounds::default().j_max)]
    j_max: usize,
}

impl From<BoundsArgs> for SearchBounds {
    fn from(b: BoundsArgs) -> Self {
        SearchBounds { k_max: b.k_max, m_max: b.m_max, n_max: b.n_max, j_max: b.j_max }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exponent sequence checks.
    #[command(subcommand)]
    Seq(SeqCommand),
    /// Column-criterion certificate for an operator.
    Certify {
        #[arg(long, value_enum)]
        op: OpKind,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        domain: String,
        #[arg(long)]
        codomain: String,
        /// Certify compactness instead of continuity.
        #[arg(long)]
        compact: bool,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Check one of the weight conditions.
    Condition {
        #[arg(long)]
        name: Condition,
        #[arg(long)]
        alpha: Option<ExponentSequence>,
        #[arg(long)]
        beta: Option<ExponentSequence>,
        /// Domain matrix for the weight conditions, codomain for membership ones.
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "1:512")]
        window: IndexWindow,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Grothendieck-Pietsch nuclearity search.
    Nuclear {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value_t = 12)]
        l_max: usize,
        #[arg(long, default_value_t = 4096)]
        truncation: usize,
    },
    /// Dual-space membership of a symbol.
    Dual {
        #[arg(long)]
        space: String,
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, default_value = "1:512")]
        window: IndexWindow,
    },
    /// Apply an operator to an element; prints the first rows.
    Apply {
        #[arg(long, value_enum)]
        op: OpKind,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 16)]
        rows: usize,
        #[arg(long, default_value_t = 1024)]
        truncation: usize,
        #[arg(long)]
        fast: bool,
    },
    /// Regression suites.
    #[command(subcommand)]
    Suite(SuiteCommand),
    /// Timing table for apply versus fast_apply.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![256, 1024, 4096])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

#[derive(Subcommand)]
enum SeqCommand {
    Stability {
        #[arg(long)]
        family: ExponentSequence,
        #[arg(long, default_value = "1:512")]
        window: IndexWindow,
    },
    WeakStability {
        #[arg(long)]
        family: ExponentSequence,
        #[arg(long, default_value = "1:512")]
        window: IndexWindow,
    },
    Dominate {
        #[arg(long)]
        kind: DominationKind,
        #[arg(long)]
        alpha: ExponentSequence,
        #[arg(long)]
        beta: ExponentSequence,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value = "1:4096")]
        window: IndexWindow,
    },
    Subadditive {
        #[arg(long)]
        beta: ExponentSequence,
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long, default_value = "1:512")]
        window: IndexWindow,
    },
}

#[derive(Subcommand)]
enum SuiteCommand {
    /// T1, T2, T3, T4, nalpha, ergodic, tameness or oracle.
    Run {
        name: String,
        #[arg(long)]
        alpha: Option<ExponentSequence>,
        #[arg(long)]
        beta: Option<ExponentSequence>,
        /// Symbol preset; repeat to replace the shipped list.
        #[arg(long = "symbol")]
        symbols: Vec<String>,
        /// Random cases for the oracle suite.
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EX_USAGE, message: message.into() }
    }
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        let code = if e == CertifyError::NonMontel { EX_NON_MONTEL } else { EX_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<SequenceError> for Failure {
    fn from(e: SequenceError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Rendered report plus exit code.
struct Outcome {
    json: Value,
    csv: String,
    code: u8,
}

fn stability_code(v: StabilityVerdict) -> u8 {
    match v {
        StabilityVerdict::StableAtScale => 0,
        StabilityVerdict::RefutedAtScale => 1,
        StabilityVerdict::Inconclusive => 2,
    }
}

fn status_code(s: Status) -> u8 {
    s.exit_code() as u8
}

fn with_seed(mut v: Value, seed: u64) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("seed".into(), json!(seed));
    }
    v
}

fn op_spec(op: OpKind, symbol: Option<&str>, alpha: Option<&ExponentSequence>) -> Result<OperatorSpec, Failure> {
    let sym = |s: Option<&str>| -> Result<Symbol, Failure> {
        let s = s.ok_or_else(|| Failure::usage("--symbol is required for hankel and toeplitz"))?;
        Ok(parse_symbol(s, alpha)?)
    };
    Ok(match op {
        OpKind::Hankel => OperatorSpec::hankel(sym(symbol)?),
        OpKind::Toeplitz => OperatorSpec::toeplitz(sym(symbol)?),
        OpKind::Backward => OperatorSpec::shift(ShiftKind::Backward),
        OpKind::Forward => OperatorSpec::shift(ShiftKind::Forward),
    })
}

fn run_seq(cmd: SeqCommand, seed: u64) -> Result<Outcome, Failure> {
    Ok(match cmd {
        SeqCommand::Stability { family, window } => {
            let r = check_stability(&family, window)?;
            let csv = format!("family,verdict,window_sup,argmax,m_const\n{family},{:?},{},{},{}\n", r.verdict, r.window_sup, r.argmax, r.m_const);
            Outcome { code: stability_code(r.verdict), json: with_seed(json!({ "family": family.to_string(), "report": r }), seed), csv }
        }
        SeqCommand::WeakStability { family, window } => {
            let r = check_weak_stability(&family, window)?;
            let csv = format!("family,verdict,window_sup,argmax,m_const\n{family},{:?},{},{},{}\n", r.verdict, r.window_sup, r.argmax, r.m_const);
            Outcome { code: stability_code(r.verdict), json: with_seed(json!({ "family": family.to_string(), "report": r }), seed), csv }
        }
        SeqCommand::Dominate { kind, alpha, beta, a, b, window } => domination_outcome(check_domination(kind, &alpha, &beta, a, b, window)?, seed),
        SeqCommand::Subadditive { beta, m, window } => domination_outcome(check_shifted_subadditivity(&beta, m, window)?, seed),
    })
}

fn domination_outcome(c: hankel_kothe::sequences::DominationCertificate, seed: u64) -> Outcome {
    let code = if c.verdict == DominationVerdict::HoldsAtScale { 0 } else { 1 };
    let violation = c.first_violation.map(|n| n.to_string()).unwrap_or_default();
    let csv = format!("kind,verdict,a,b,first_violation\n{:?},{:?},{},{},{violation}\n", c.kind, c.verdict, c.a, c.b);
    Outcome { code, json: with_seed(json!(c), seed), csv }
}

fn run_suite(name: &str, alpha: Option<ExponentSequence>, beta: Option<ExponentSequence>, symbols: Vec<String>, cases: usize, bounds: SearchBounds, seed: u64) -> Result<Outcome, Failure> {
    match name.to_ascii_lowercase().as_str() {
        "ergodic" => return ergodic_suite(seed),
        "tameness" => return tameness_suite(bounds, seed),
        "oracle" => {
            let r = dense_oracle(cases, 64, seed)?;
            let csv = format!("cases,max_row_error,max_fast_error,outcome\n{},{},{},{}\n", r.cases.len(), r.max_row_error, r.max_fast_error, pass(r.passed));
            return Ok(Outcome { code: u8::from(!r.passed), json: json!(r), csv });
        }
        _ => {}
    }
    let suite: TheoremSuite = name.parse().map_err(|_| Failure::usage(format!("unknown suite {name:?}")))?;
    let mut inst = SuiteInstance::shipped(suite);
    if let Some(a) = alpha {
        inst.alpha = a;
    }
    if let Some(b) = beta {
        inst.beta = b;
    }
    if !symbols.is_empty() {
        inst.symbols = symbols;
    }
    let r = theorem_suite(&inst, bounds, Some(seed))?;
    let json = serde_json::to_value(&r).expect("suite report serializes");
    Ok(Outcome { code: u8::from(!r.passed()), csv: r.to_csv(), json })
}

fn pass(ok: bool) -> CaseOutcome {
    if ok {
        CaseOutcome::Pass
    } else {
        CaseOutcome::Fail
    }
}

/// Decay tables for both shifts on `Λ₁(n)` and `Λ∞(n)`.
fn ergodic_suite(seed: u64) -> Result<Outcome, Failure> {
    let probes: Vec<usize> = (0..=10).map(|i| 1 << i).collect();
    let samples = (1..=32).map(basis_element).collect::<Result<Vec<_>, _>>()?;
    let mut cases = Vec::new();
    let mut csv = String::from("kind,space,symbol,n,log_cesaro_norm,log_single_iterate,path_discrepancy,outcome\n");
    let mut all = true;
    for (kind, space, sym) in ergodic_cases() {
        let theta = parse_symbol(sym, None)?;
        let r = ergodicity_check(kind, &theta, &space, 1, &probes, &samples)?;
        let ok = r.mean_ergodic_at_scale && r.max_path_discrepancy <= 1e-12;
        all &= ok;
        for p in &r.probes {
            csv.push_str(&format!(
                "{kind},{},{sym},{},{},{},{},{}\n",
                r.space,
                p.n,
                p.cesaro_norm.ln(),
                p.single_iterate.ln(),
                p.path_discrepancy,
                pass(ok)
            ));
        }
        cases.push(json!({ "outcome": pass(ok), "decay_ratio": r.decay_ratio(), "report": r }));
    }
    Ok(Outcome { code: u8::from(!all), json: json!({ "suite": "ergodic", "seed": seed, "cases": cases }), csv })
}

/// The four Hankel families with `S = identity`, and the lagged identity
/// Toeplitz control.
fn tameness_suite(bounds: SearchBounds, seed: u64) -> Result<Outcome, Failure> {
    let mut rows = Vec::new();
    let mut csv = String::from("family,operator,k0,log_constant,verdict,outcome\n");
    let mut all = true;
    for (label, suite) in [("A", TheoremSuite::T1), ("B", TheoremSuite::T2), ("C", TheoremSuite::T3), ("D", TheoremSuite::T4)] {
        let (domain, codomain, ops) = hankel_family(suite)?;
        let r = tameness_scan(&ops, &domain, &codomain, &Gauge::Identity, bounds)?;
        let ok = r.verdict == TamenessVerdict::STameAtScale;
        all &= ok;
        for o in &r.operators {
            let k0 = o.k0.map(|k| k.to_string()).unwrap_or_default();
            let c = o.constant.map(|c| c.ln().to_string()).unwrap_or_default();
            csv.push_str(&format!("{label},{},{k0},{c},{:?},{}\n", o.operator, o.verdict, pass(ok)));
        }
        rows.push(json!({ "family": label, "gauge": Gauge::Identity.describe(), "outcome": pass(ok), "report": r }));
    }
    let space = parse_space("Linf:linear")?;
    let control = OperatorSpec::toeplitz(parse_symbol("delta", None)?);
    let r = tameness_scan(std::slice::from_ref(&control), &space, &space, &Gauge::Lag(1), bounds)?;
    let ok = r.verdict == TamenessVerdict::NotSTameAtScale;
    all &= ok;
    csv.push_str(&format!("control,{},,,{:?},{}\n", control.describe(), r.verdict, pass(ok)));
    rows.push(json!({ "family": "control", "gauge": Gauge::Lag(1).describe(), "outcome": pass(ok), "report": r }));
    Ok(Outcome { code: u8::from(!all), json: json!({ "suite": "tameness", "seed": seed, "families": rows }), csv })
}

fn run_bench(sizes: &[usize], reps: usize, seed: u64) -> Result<Outcome, Failure> {
    let mut csv = String::from("size,op,direct_ms,fast_ms,speedup\n");
    let mut rows = Vec::new();
    for &size in sizes {
        let theta: Vec<f64> = (0..2 * size).map(|j| ((j * 7919 + 13) % 101) as f64 / 101.0 - 0.5).collect();
        let x = hankel_kothe::SequenceElement::from_dense(&(0..size).map(|j| ((j * 104729 + 7) % 97) as f64 / 97.0 - 0.5).collect::<Vec<_>>());
        for op in [OperatorSpec::hankel(Symbol::finite(&theta)), OperatorSpec::toeplitz(Symbol::finite(&theta))] {
            let time = |fast: bool| -> Result<f64, Failure> {
                let mut best = f64::INFINITY;
                for _ in 0..reps.max(1) {
                    let t = Instant::now();
                    if fast {
                        fast_apply(&op, &x, size, size)?;
                    } else {
                        apply(&op, &x, size, size)?;
                    }
                    best = best.min(t.elapsed().as_secs_f64() * 1e3);
                }
                Ok(best)
            };
            let (direct, fast) = (time(false)?, time(true)?);
            let name = op.kind().name();
            csv.push_str(&format!("{size},{name},{direct:.3},{fast:.3},{:.1}\n", direct / fast));
            rows.push(json!({ "size": size, "op": name, "direct_ms": direct, "fast_ms": fast, "speedup": direct / fast }));
        }
    }
    Ok(Outcome { code: 0, json: json!({ "bench": rows, "seed": seed }), csv })
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let seed = cli.seed;
    match cli.command {
        Command::Seq(cmd) => run_seq(cmd, seed),
        Command::Certify { op, symbol, domain, codomain, compact, bounds } => {
            let domain = parse_space(&domain)?;
            let codomain = parse_space(&codomain)?;
            let spec = op_spec(op, symbol.as_deref(), domain.exponent())?;
            let bounds = bounds.into();
            let cert = if compact {
                certify_compactness(&spec, &domain, &codomain, bounds)?
            } else {
                certify_continuity(&spec, &domain, &codomain, bounds)?
            };
            Ok(Outcome { code: status_code(cert.status), json: cert.to_json(Some(seed)), csv: cert.evidence_csv() })
        }
        Command::Condition { name, alpha, beta, space, window, bounds } => {
            let matrix = parse_space(&space)?;
            let inputs = ConditionInputs { alpha: alpha.as_ref(), beta: beta.as_ref(), matrix: Some(&matrix) };
            let cert = check_condition(name, inputs, window, bounds.into())?;
            Ok(Outcome { code: status_code(cert.status), json: cert.to_json(Some(seed)), csv: cert.evidence_csv() })
        }
        Command::Nuclear { space, k_max, l_max, truncation } => {
            let cert = nuclearity(&parse_space(&space)?, k_max, l_max, truncation)?;
            Ok(Outcome { code: status_code(cert.status), json: cert.to_json(Some(seed)), csv: cert.evidence_csv() })
        }
        Command::Dual { space, symbol, k_max, window } => {
            let space = parse_space(&space)?;
            let theta = parse_symbol(&symbol, space.exponent())?;
            let cert = dual_membership(&space, &theta, k_max, window)?;
            Ok(Outcome { code: status_code(cert.status), json: cert.to_json(Some(seed)), csv: cert.evidence_csv() })
        }
        Command::Apply { op, symbol, x, rows, truncation, fast } => {
            let spec = op_spec(op, symbol.as_deref(), None)?;
            let x = parse_element(&x)?;
            let r = if fast { fast_apply(&spec, &x, truncation, rows)? } else { apply(&spec, &x, truncation, rows)? };
            let json = json!({ "operator": spec.describe(), "rows": r.values, "residual": format!("{:?}", r.residual), "seed": seed });
            Ok(Outcome { code: 0, json, csv: r.to_csv() })
        }
        Command::Suite(SuiteCommand::Run { name, alpha, beta, symbols, cases, bounds }) => run_suite(&name, alpha, beta, symbols, cases, bounds.into(), seed),
        Command::Bench { sizes, reps } => run_bench(&sizes, reps, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EX_USAGE);
        }
    }
    let (format, output) = (cli.format, cli.output.clone());
    match run(cli) {
        Ok(out) => {
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("report serializes") + "\n",
                Format::Csv => out.csv,
            };
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(EX_IOERR);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
