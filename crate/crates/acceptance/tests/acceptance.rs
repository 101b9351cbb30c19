//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hankel_kothe::certify::{
    certify_compactness, certify_continuity, column_seminorm, dense_oracle, ergodic_cases, ergodicity_check, hankel_family, tameness_scan,
    theorem_suite, CaseOutcome, Gauge, SuiteInstance, SuiteReport, TamenessVerdict, TheoremSuite, ORACLE_FAST_TOL, ORACLE_ROW_TOL,
};
use hankel_kothe::operators::{hankel_column, shift, toeplitz_column, OperatorSpec, ShiftKind};
use hankel_kothe::presets::{parse_space, parse_symbol};
use hankel_kothe::sequences::{check_domination, DominationKind, DominationVerdict};
use hankel_kothe::spaces::{dual_membership, gp_ratio_series, nuclearity};
use hankel_kothe::{ExponentSequence, IndexWindow, KotheMatrix, SearchBounds, Status, Symbol};

const SEED: u64 = 20_240_601;
/// Decay required between the first and last Cesàro probe.
const DECAY_FACTOR: f64 = 1e-3;
const CLOSED_FORM_TOL: f64 = 1e-10;
const PATH_TOL: f64 = 1e-12;
const GP_SPOT_TOL: f64 = 1e-9;
const COLUMN_DEPTH: usize = 256;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn linear() -> ExponentSequence {
    ExponentSequence::Linear { c: 1.0 }
}

fn suite(s: TheoremSuite) -> SuiteReport {
    theorem_suite(&SuiteInstance::shipped(s), SearchBounds::default(), Some(SEED)).expect("suite runs")
}

fn all_pass(r: &SuiteReport) -> bool {
    !r.cases.is_empty() && r.cases.iter().all(|c| c.outcome == CaseOutcome::Pass)
}

fn dense_oracle_equivalence() -> Verdict {
    let r = dense_oracle(200, 64, SEED).expect("oracle runs");
    verdict(
        r.passed && r.cases.len() == 200,
        format!("max row error {:.2e} (tol {ORACLE_ROW_TOL:.0e}), max fast error {:.2e} (tol {ORACLE_FAST_TOL:.0e})", r.max_row_error, r.max_fast_error),
    )
}

fn column_laws() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = 0usize;
    for _ in 0..50 {
        let len = rng.gen_range(1..=64);
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let theta = Symbol::finite(&v);
        let first = hankel_column(&theta, 1);
        bad += (1..=COLUMN_DEPTH).filter(|&i| first.coord(i) != theta.get(i - 1)).count();
        for n in 1..=64 {
            let (h0, h1) = (hankel_column(&theta, n), hankel_column(&theta, n + 1));
            bad += (1..=COLUMN_DEPTH).filter(|&j| h1.coord(j) != h0.coord(j + 1)).count();
            let (t0, t1) = (toeplitz_column(&theta, n), toeplitz_column(&theta, n + 1));
            let shifted = shift(ShiftKind::Forward, &t0);
            bad += (1..=COLUMN_DEPTH).filter(|&j| t1.coord(j) != shifted.coord(j)).count();
        }
    }
    verdict(bad == 0, format!("50 symbols, n <= 64, {bad} coordinate mismatches"))
}

fn uniform_witness(r: &SuiteReport, k_max: usize) -> bool {
    r.cases.iter().all(|c| {
        let Some(m) = c.compact_witness else { return false };
        let Some(w) = c.certificate.as_ref().and_then(|v| v["witness"].as_array().cloned()) else { return false };
        w.len() == k_max && w.iter().all(|pair| pair[1].as_u64() == Some(m as u64))
    })
}

fn compact_infinite_type() -> Verdict {
    let mut inst = SuiteInstance::shipped(TheoremSuite::T1);
    inst.symbols = vec!["gauss".into(), "rapid:0.1,1.5".into()];
    let r = theorem_suite(&inst, SearchBounds::default(), Some(SEED)).expect("suite runs");
    let witnesses: Vec<_> = r.cases.iter().map(|c| c.compact_witness).collect();
    verdict(all_pass(&r) && uniform_witness(&r, 8), format!("gauss and rapid:0.1,1.5, compact witnesses {witnesses:?}, k <= 8"))
}

fn compact_finite_to_infinite() -> Verdict {
    let w = IndexWindow::new(1, 1 << 16).expect("window");
    let c1 = check_domination(DominationKind::C1, &ExponentSequence::Log, &linear(), Some(1.0), Some(1.0), w).expect("domination");
    let r = suite(TheoremSuite::T2);
    let n = r.cases.len();
    verdict(
        c1.verdict == DominationVerdict::HoldsAtScale && all_pass(&r) && n == 3,
        format!("log(n+1) <= n + 1 on [1, 2^16]: {:?}; {n} symbols compact: {}", c1.verdict, all_pass(&r)),
    )
}

fn compact_finite_type_nuclear() -> Verdict {
    let l1 = KotheMatrix::finite_type(linear());
    let nuc = nuclearity(&l1, 8, 16, 4096).expect("nuclearity");
    let spot = gp_ratio_series(&KotheMatrix::infinite_type(linear()), 1, 2, 4096).expect("series");
    // independent closed form: Σ_{n ≥ 1} e^{−n} = 1/(e − 1)
    let expect = 1.0 / (std::f64::consts::E - 1.0);
    let got = spot.upper(hankel_kothe::spaces::Reduce::Sum).exp();
    let mut inst = SuiteInstance::shipped(TheoremSuite::T4);
    inst.symbols = vec!["dualdecay:3".into()];
    let r = theorem_suite(&inst, SearchBounds::default(), Some(SEED)).expect("suite runs");
    verdict(
        nuc.status == Status::CertifiedAtScale && (got - expect).abs() <= GP_SPOT_TOL && all_pass(&r),
        format!("nuclear: {}; GP spot {got:.12} vs {expect:.12}; dualdecay:3 compact: {}", nuc.status, all_pass(&r)),
    )
}

fn negative_controls() -> Verdict {
    let linf = KotheMatrix::infinite_type(linear());
    let b = SearchBounds::default();
    let ones = OperatorSpec::hankel(parse_symbol("ones", None).expect("preset"));
    let c = certify_continuity(&ones, &linf, &linf, b).expect("certify");
    let ones_ok = c.status == Status::RefutedAtScale && c.divergent_column == Some(1);
    let id = OperatorSpec::toeplitz(parse_symbol("delta", None).expect("preset"));
    let c = certify_compactness(&id, &linf, &linf, b).expect("certify");
    let id_ok = c.status == Status::RefutedAtScale;
    let l1log = KotheMatrix::finite_type(ExponentSequence::Log);
    let mut certified = 0;
    for k in 1..12 {
        for l in k + 1..=12 {
            if gp_ratio_series(&l1log, k, l, 1 << 16).expect("series").is_certified_finite() {
                certified += 1;
            }
        }
    }
    verdict(
        ones_ok && id_ok && certified == 0,
        format!("ones refuted at column 1: {ones_ok}; identity Toeplitz not compact: {id_ok}; L1(log) certified pairs: {certified}"),
    )
}

fn necessity_harness() -> Verdict {
    let b = SearchBounds::default();
    let mut checked = 0;
    let mut failures = Vec::new();
    for s in [TheoremSuite::T1, TheoremSuite::T2, TheoremSuite::T4] {
        let (domain, codomain, ops) = hankel_family(s).expect("family");
        let report = suite(s);
        for (op, case) in ops.iter().zip(&report.cases) {
            if case.outcome != CaseOutcome::Pass {
                continue;
            }
            checked += 1;
            let theta = op.symbol().expect("hankel symbol");
            let dual = dual_membership(&domain, theta, b.m_max, IndexWindow::new(1, b.n_max).expect("window")).expect("dual");
            let first = (1..=b.k_max).all(|k| column_seminorm(&codomain, op, 1, k, b.j_max).expect("column").is_certified_finite());
            if dual.status != Status::CertifiedAtScale || !first {
                failures.push(format!("{s}:{}", case.symbol));
            }
        }
    }
    verdict(checked > 0 && failures.is_empty(), format!("{checked} certified instances, failures {failures:?}"))
}

fn ergodicity() -> Verdict {
    let probes: Vec<usize> = (0..=10).map(|i| 1 << i).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for (kind, space, sym) in ergodic_cases() {
        let theta = parse_symbol(sym, None).expect("preset");
        let r = ergodicity_check(kind, &theta, &space, 1, &probes, &[]).expect("ergodicity");
        let first = r.probes[0].cesaro_norm;
        let last = r.probes.last().expect("probes").cesaro_norm;
        let decays = (first.is_zero() && last.is_zero()) || last.div(first).ln() < DECAY_FACTOR.ln();
        let paths = r.max_path_discrepancy <= PATH_TOL;
        ok &= decays && paths;
        if !(decays && paths) {
            lines.push(format!("{kind} {} {sym}: ratio {:.3e}, path gap {:.1e}", r.space, r.decay_ratio(), r.max_path_discrepancy));
        }
    }
    let l1 = KotheMatrix::finite_type(linear());
    let delta = parse_symbol("delta", None).expect("preset");
    let r = ergodicity_check(ShiftKind::Forward, &delta, &l1, 1, &probes, &[]).expect("ergodicity");
    let worst = r
        .probes
        .iter()
        .map(|p| {
            let n = p.n as f64;
            let exact: f64 = (1..=p.n).map(|m| (-((m + 1) as f64)).exp()).sum::<f64>() / n;
            (p.cesaro_norm.exp() - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    ok &= worst <= CLOSED_FORM_TOL;
    lines.push(format!("closed-form forward table max rel error {worst:.1e}"));
    verdict(ok, lines.join("; "))
}

fn tameness() -> Verdict {
    let b = SearchBounds::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, s) in [("A", TheoremSuite::T1), ("B", TheoremSuite::T2), ("C", TheoremSuite::T3), ("D", TheoremSuite::T4)] {
        let (domain, codomain, ops) = hankel_family(s).expect("family");
        let r = tameness_scan(&ops, &domain, &codomain, &Gauge::Identity, b).expect("scan");
        ok &= r.verdict == TamenessVerdict::STameAtScale && ops.len() == 3;
        parts.push(format!("{label}: {:?}", r.verdict));
    }
    let linf = parse_space("Linf:linear").expect("space");
    let id = OperatorSpec::toeplitz(parse_symbol("delta", None).expect("preset"));
    let r = tameness_scan(&[id], &linf, &linf, &Gauge::Lag(1), b).expect("scan");
    ok &= r.verdict == TamenessVerdict::NotSTameAtScale;
    parts.push(format!("lagged identity control: {:?}", r.verdict));
    verdict(ok, parts.join(", "))
}

fn reproducibility() -> Verdict {
    let run = || {
        let mut out = Vec::new();
        for s in [TheoremSuite::T1, TheoremSuite::T4] {
            out.push(suite(s).to_json_string());
        }
        out.push(serde_json::to_string(&dense_oracle(50, 64, SEED).expect("oracle")).expect("json"));
        out
    };
    let (a, b) = (run(), run());
    let same = a == b;
    verdict(same, format!("{} reports byte-identical: {same}", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("dense-oracle equivalence", dense_oracle_equivalence),
        ("column-law invariants", column_laws),
        ("compactness, infinite type to infinite type", compact_infinite_type),
        ("compactness, finite type to infinite type", compact_finite_to_infinite),
        ("compactness, finite type to nuclear finite type", compact_finite_type_nuclear),
        ("negative controls", negative_controls),
        ("necessity harness", necessity_harness),
        ("shift ergodicity", ergodicity),
        ("identity-gauge tameness of the Hankel families", tameness),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = f();
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {tag} {name} ({:.1}s): {}", i + 1, t.elapsed().as_secs_f64(), v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
