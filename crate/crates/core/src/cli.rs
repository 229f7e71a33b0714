//! `gtl` command-line entry point.
//!
//! Exit codes: 0 all checks pass, 1 some check fails, 2 input error,
//! 3 precondition rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::duality::{find_selfdual_functional, nondegenerate_products, selfdual_check, SearchStrategy};
use crate::error::{Error, Result};
use crate::gallery::{self, build_truncated_ci, TruncatedCISpec};
use crate::graded::{GradedElement, WindowedGradedAlgebra};
use crate::report::{CertifiedReport, Verdict};
use crate::stmod::{default_strategy, duality_functional, ordinary_ext_dims, tate_ring, FDAlgebra, FDModule, TateRing};
use crate::structure::{
    check_periodicity, find_regular_sequence2, negative_product_sweep, regularity, tor_part, verify_depth1,
    verify_depth2, RegularityReport,
};

pub const MAX_WINDOW: i32 = 32;
pub const DEFAULT_DEPTH: usize = 5;

#[derive(Parser, Debug)]
#[command(name = "gtl", version, about = "Graded rings with duality and Tate cohomology over prime fields")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a graded algebra file.
    Analyze(AnalyzeArgs),
    /// Compute a Tate cohomology ring.
    Tate(TateArgs),
    /// Recompute a gallery example and compare with its oracle.
    Reproduce {
        /// hh-truncated, klein-four, trivial-extension, ci-ext-dims,
        /// hypersurface-periodic or gorenstein0
        name: String,
    },
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub alg: PathBuf,
    /// Degree of the pairing to check.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i32>,
    /// Element named by label or as `e[d][i]`.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub rtilde: Option<String>,
    #[arg(long)]
    pub depth1: bool,
    #[arg(long)]
    pub depth2: bool,
    /// Functional on degree n, comma separated. Searched for when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub functional: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct TateArgs {
    /// Exponents of k[x1..xc]/(x1^a1, ..., xc^ac), comma separated.
    #[arg(long)]
    pub truncated: Option<String>,
    #[arg(long = "char")]
    pub field_char: Option<u64>,
    /// Finite-dimensional algebra file.
    #[arg(long, conflicts_with = "truncated")]
    pub alg: Option<PathBuf>,
    /// Use M = the algebra as a bimodule instead of the residue field.
    #[arg(long)]
    pub hochschild: bool,
    #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Write the computed ring as a graded algebra file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a command before rendering.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precondition(_) => 3,
        _ => 2,
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let json = cli.json;
    match run(cli.command) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            if json {
                println!("{}", json!({ "error": e.to_string(), "exit_code": exit_code(&e) }));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Caps the rayon pool at `GTL_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("GTL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("GTL_THREADS must be a positive integer, got {v:?}")))?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Tate(t) => cmd_tate(&t),
        Command::Reproduce { name } => cmd_reproduce(&name),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::InvalidInput(format!("bad {what} entry {t:?} in {s:?}"))))
        .collect()
}

pub fn parse_window(s: &str) -> Result<(i32, i32)> {
    let v: Vec<i32> = parse_list(s, "window")?;
    match v[..] {
        [lo, hi] if lo <= hi && lo >= -MAX_WINDOW && hi <= MAX_WINDOW => Ok((lo, hi)),
        [_, _] => Err(Error::InvalidInput(format!("window {s:?} must satisfy -{MAX_WINDOW} <= lo <= hi <= {MAX_WINDOW}"))),
        _ => Err(Error::InvalidInput(format!("window {s:?} must be lo,hi"))),
    }
}

fn element(alg: &WindowedGradedAlgebra, name: &str) -> Result<GradedElement> {
    let (d, k) = alg
        .find_label(name)
        .ok_or_else(|| Error::InvalidInput(format!("no basis element named {name:?}")))?;
    Ok(GradedElement::basis(alg, d, k))
}

fn regularity_report(rep: RegularityReport) -> CertifiedReport {
    let mut out = CertifiedReport::new("regularity");
    out.note(format!("element of degree {}", rep.degree));
    if let Some((d, v)) = &rep.first_failure {
        out.note(format!("kills {v:?} in degree {d}"));
    }
    out.add_clause(rep.central);
    out.add_clause(rep.regular_on_nonneg);
    out
}

fn functional_for(alg: &WindowedGradedAlgebra, n: i32, args: &AnalyzeArgs) -> Result<Option<Vec<u32>>> {
    if let Some(s) = &args.functional {
        let raw: Vec<i64> = parse_list(s, "functional")?;
        if raw.len() != alg.dim(n) {
            return Err(Error::InvalidInput(format!("functional has {} entries, degree {n} has dimension {}", raw.len(), alg.dim(n))));
        }
        return Ok(Some(raw.iter().map(|&x| alg.field().reduce(x)).collect()));
    }
    if !alg.in_window(n) {
        return Ok(None);
    }
    let strategy = default_strategy(alg, args.seed, args.samples);
    let strategy = if n == -1 { strategy } else { SearchStrategy::Randomized { seed: args.seed, samples: args.samples } };
    Ok(find_selfdual_functional(alg, n, strategy)?.functional)
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let text = read(&args.alg)?;
    let alg = WindowedGradedAlgebra::from_json(&text)?;
    let mut report = CertifiedReport::new("analyze");
    report.note(format!("{}: window {:?} over F_{}", args.alg.display(), alg.window(), alg.field().p()));
    report.add_clause(alg.validate()?);
    if let Some(n) = args.n {
        report.add_clause(nondegenerate_products(&alg, n).to_report());
    }
    let r = args.r.as_deref().map(|s| element(&alg, s)).transpose()?;
    let rt = args.rtilde.as_deref().map(|s| element(&alg, s)).transpose()?;
    let need_n = |flag: &str| args.n.ok_or_else(|| Error::InvalidInput(format!("{flag} needs --n")));
    if args.depth2 {
        let n = need_n("--depth2")?;
        let (Some(r), Some(rt)) = (&r, &rt) else {
            return Err(Error::InvalidInput("--depth2 needs --r and --rtilde".into()));
        };
        let lambda = if n == -1 { functional_for(&alg, -1, args)? } else { None };
        if n == -1 && lambda.is_none() {
            report.note("no selfdual functional found; duality clauses skipped");
        }
        report.add_clause(verify_depth2(&alg, r, rt, n, lambda.as_deref())?);
    } else if args.depth1 {
        let n = need_n("--depth1")?;
        let r = r.as_ref().ok_or_else(|| Error::InvalidInput("--depth1 needs --r".into()))?;
        report.add_clause(verify_depth1(&alg, r, n)?);
    } else if let Some(r) = &r {
        report.add_clause(regularity_report(regularity(&alg, r)?));
        let tor = tor_part(&alg, r)?;
        let mut t = CertifiedReport::new("tor_part dimensions");
        for d in alg.degrees() {
            let tag = if tor.uncertain.contains(&d) { " (lower bound)" } else { "" };
            t.note(format!("{d}: {} of {}{tag}", tor.dim(d), alg.dim(d)));
        }
        report.add_clause(t);
    }
    let ok = report.passed();
    Ok(Outcome { ok, text: report.render(), json: serde_json::to_value(&report).expect("serializable") })
}

fn tate_algebra(args: &TateArgs) -> Result<FDAlgebra> {
    match (&args.truncated, &args.alg) {
        (Some(ex), None) => {
            let p = args.field_char.ok_or_else(|| Error::InvalidInput("--truncated needs --char".into()))?;
            let exps: Vec<usize> = parse_list(ex, "exponent")?;
            build_truncated_ci(&TruncatedCISpec::new(p, &exps))
        }
        (None, Some(path)) => FDAlgebra::from_json(&read(path)?),
        _ => Err(Error::InvalidInput("give exactly one of --truncated or --alg".into())),
    }
}

#[derive(Serialize)]
struct DualitySummary {
    functional: Option<Vec<u32>>,
    tried: u64,
    proven_absent: bool,
    report: Option<CertifiedReport>,
}

pub fn cmd_tate(args: &TateArgs) -> Result<Outcome> {
    let window = parse_window(&args.window)?;
    let radius = window.0.unsigned_abs().max(window.1.unsigned_abs()) as usize;
    let depth = match args.depth {
        Some(d) if d < radius => {
            return Err(Error::InvalidInput(format!("--depth {d} is below the window radius {radius}")));
        }
        Some(d) => d,
        None => DEFAULT_DEPTH.max(radius),
    };
    let alg = tate_algebra(args)?;
    if alg.symmetrizing().is_none() {
        return Err(Error::Precondition("the algebra has no symmetrizing form".into()));
    }
    let sym = alg.validate_symmetric();
    if !sym.passed() {
        return Err(Error::Precondition(format!("the supplied form is not symmetrizing\n{}", sym.render())));
    }
    let t = if args.hochschild {
        let env = alg.enveloping();
        let m = FDModule::bimodule(&alg, &env)?;
        tate_ring(&env, &m, window, Some(depth))?
    } else {
        tate_ring(&alg, &FDModule::residue_field(&alg), window, Some(depth))?
    };
    let ring = &t.ring;
    let validate = ring.validate()?;
    let duality = if ring.in_window(-1) {
        let s = duality_functional(ring, default_strategy(ring, args.seed, args.samples))?;
        let report = s.functional.as_ref().map(|l| selfdual_check(ring, -1, l)).transpose()?;
        DualitySummary { functional: s.functional, tried: s.tried, proven_absent: s.proven_absent, report }
    } else {
        DualitySummary { functional: None, tried: 0, proven_absent: false, report: None }
    };
    if let Some(path) = &args.out {
        std::fs::write(path, ring.to_json()).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    }
    let ok = validate.passed() && !duality.proven_absent && duality.report.as_ref().map_or(true, |r| r.passed());

    let module = if args.hochschild { "the algebra over its enveloping algebra" } else { "the residue field" };
    let mut text = format!("Tate cohomology of {module}, algebra dimension {}, window {window:?}, depth {depth}\n", alg.dim());
    text.push_str(&dim_table(&ring.dims()));
    text.push_str(&validate.render());
    match (&duality.functional, &duality.report) {
        (Some(l), Some(r)) => {
            text.push_str(&format!("duality functional on degree -1: {l:?}\n"));
            text.push_str(&r.render());
        }
        _ if duality.proven_absent => text.push_str("no duality functional exists on degree -1\n"),
        _ if ring.in_window(-1) => text.push_str(&format!("no duality functional found after {} tries\n", duality.tried)),
        _ => text.push_str("degree -1 outside the window; duality not checked\n"),
    }
    let json = json!({
        "window": [window.0, window.1],
        "depth": depth,
        "hochschild": args.hochschild,
        "dims": ring.dims(),
        "validate": validate,
        "duality": duality,
    });
    Ok(Outcome { ok, text, json })
}

fn dim_table(dims: &BTreeMap<i32, usize>) -> String {
    let degs: Vec<String> = dims.keys().map(|d| format!("{d:>4}")).collect();
    let vals: Vec<String> = dims.values().map(|v| format!("{v:>4}")).collect();
    format!("degree {}\ndim    {}\n", degs.join(""), vals.join(""))
}

/// One line of a reproduction table.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub item: String,
    pub computed: String,
    pub expected: String,
    pub matched: bool,
}

fn row(item: impl Into<String>, computed: impl ToString, expected: impl ToString, matched: bool) -> Row {
    Row { item: item.into(), computed: computed.to_string(), expected: expected.to_string(), matched }
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub const REPRODUCE_NAMES: [&str; 6] =
    ["hh-truncated", "klein-four", "trivial-extension", "ci-ext-dims", "hypersurface-periodic", "gorenstein0"];

pub fn reproduce_rows(name: &str) -> Result<Vec<Row>> {
    match name {
        "hh-truncated" => hh_truncated(),
        "klein-four" => klein_four(),
        "trivial-extension" => trivial_extension(),
        "ci-ext-dims" => ci_ext_dims(),
        "hypersurface-periodic" => hypersurface_periodic(),
        "gorenstein0" => gorenstein0(),
        _ => Err(Error::InvalidInput(format!("unknown example {name:?}; known: {}", REPRODUCE_NAMES.join(", ")))),
    }
}

pub fn cmd_reproduce(name: &str) -> Result<Outcome> {
    let rows = reproduce_rows(name)?;
    let ok = rows.iter().all(|r| r.matched);
    let w = rows.iter().map(|r| r.item.len()).max().unwrap_or(4).max(4);
    let mut text = format!("{name}\n");
    for r in &rows {
        let tag = if r.matched { "MATCH" } else { "MISMATCH" };
        text.push_str(&format!("  {:<w$}  {tag:<8}  computed {}  expected {}\n", r.item, r.computed, r.expected));
    }
    let json = json!({ "name": name, "all_match": ok, "rows": rows });
    Ok(Outcome { ok, text, json })
}

fn truncated(p: u64, exps: &[usize]) -> Result<FDAlgebra> {
    build_truncated_ci(&TruncatedCISpec::new(p, exps))
}

fn residue_ring(p: u64, exps: &[usize], window: (i32, i32)) -> Result<TateRing> {
    let alg = truncated(p, exps)?;
    tate_ring(&alg, &FDModule::residue_field(&alg), window, None)
}

fn hh_truncated() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (a, p) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        let alg = truncated(p, &[a])?;
        let env = alg.enveloping();
        let m = FDModule::bimodule(&alg, &env)?;
        let t = tate_ring(&env, &m, (-2, 2), None)?;
        let want = gallery::expected_tate_hh_dim(a, p);
        let dims: Vec<usize> = t.ring.dims().values().copied().collect();
        let ok = dims.iter().all(|&d| d == want);
        rows.push(row(format!("k[x]/(x^{a}), p = {p}, degrees -2..2"), format!("{dims:?}"), format!("all {want}"), ok));
    }
    Ok(rows)
}

fn sweep_row(ring: &WindowedGradedAlgebra, want_zero: bool) -> Row {
    let s = negative_product_sweep(ring, -1);
    let computed = format!("{} of {} nonzero", s.nonzero.len(), s.pairs_checked);
    if want_zero {
        row("negative x negative products", computed, "all zero", s.all_zero() && s.pairs_checked > 0)
    } else {
        row("negative x negative products", computed, "some nonzero", !s.all_zero())
    }
}

fn depth2_row(ring: &WindowedGradedAlgebra, r: &GradedElement, rt: &GradedElement, item: &str) -> Result<Row> {
    let lambda = if ring.in_window(-1) {
        duality_functional(ring, default_strategy(ring, 0, 1000))?.functional
    } else {
        None
    };
    let computed = match verify_depth2(ring, r, rt, -1, lambda.as_deref()) {
        Ok(rep) => pass_str(rep.passed()).to_string(),
        Err(e @ Error::Precondition(_)) => format!("rejected ({e})"),
        Err(e) => return Err(e),
    };
    let ok = computed == "PASS" && lambda.is_some();
    Ok(row(item, computed, "PASS", ok))
}

fn klein_four() -> Result<Vec<Row>> {
    let t = residue_ring(2, &[2, 2], (-4, 4))?;
    let ring = &t.ring;
    let y1 = GradedElement::basis(ring, 1, 0);
    let y2 = GradedElement::basis(ring, 1, 1);
    let z1 = ring.multiply(&y1, &y1)?;
    let z2 = ring.multiply(&y2, &y2)?;
    let dims: Vec<usize> = ring.dims().values().copied().collect();
    let want: Vec<usize> = (-4..=4i32).map(|n| if n >= 0 { n as usize + 1 } else { (-n) as usize }).collect();
    Ok(vec![
        row("dimensions, degrees -4..4", format!("{dims:?}"), format!("{want:?}"), dims == want),
        sweep_row(ring, true),
        depth2_row(ring, &z1, &z2, "verify_depth2(y1^2, y2^2, n = -1)")?,
    ])
}

fn trivial_extension() -> Result<Vec<Row>> {
    let f = crate::exactlin::PrimeField::new(2)?;
    let t = gallery::trivial_extension(f, 2, (-4, 3))?;
    let w1 = element(&t, "w1")?;
    let w2 = element(&t, "w2")?;
    let tor = tor_part(&t, &w1)?;
    let tor_ok = t.degrees().all(|d| tor.dim(d) == if d < 0 { t.dim(d) } else { 0 })
        && tor.uncertain.iter().all(|&d| d >= 0);
    let tor_text = match tor.uncertain.iter().map(|d| d.to_string()).collect::<Vec<_>>() {
        u if !tor_ok => format!("other (lower bound in degrees [{}])", u.join(", ")),
        u if u.is_empty() => "A^{<0}".to_string(),
        u => format!("A^{{<0}} (lower bound in degrees [{}])", u.join(", ")),
    };
    let dual_ok = (0..=3).all(|i| t.dim(-1 - i) == t.dim(i));
    let v = verify_depth2(&t, &w1, &w2, -1, Some(&[1]))?;
    Ok(vec![
        row("verify_depth2(w1, w2, n = -1)", pass_str(v.passed()), "PASS", v.passed()),
        row("Tor of w1", tor_text, "A^{<0}", tor_ok),
        sweep_row(&t, true),
        row("dim A^{-1-i} = dim A^i", dual_ok, true, dual_ok),
    ])
}

fn ci_ext_dims() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (p, exps) in [(2u64, vec![2]), (2, vec![2, 2]), (3, vec![3, 3]), (2, vec![2, 2, 2])] {
        let alg = truncated(p, &exps)?;
        let got = ordinary_ext_dims(&alg, &FDModule::residue_field(&alg), 4);
        let want: Vec<usize> = (0..=4).map(|n| gallery::expected_ext_dim_ci(exps.len(), n)).collect();
        rows.push(row(format!("exponents {exps:?}, p = {p}, n = 0..4"), format!("{got:?}"), format!("{want:?}"), got == want));
    }
    Ok(rows)
}

fn hypersurface_periodic() -> Result<Vec<Row>> {
    let t = residue_ring(3, &[3], (-4, 4))?;
    let ring = &t.ring;
    let z = GradedElement::basis(ring, 2, 0);
    let per = check_periodicity(ring, &z)?;
    let ok = per.passed() && per.count(Verdict::Pass) > 0;
    Ok(vec![row("periodicity of the degree 2 class", pass_str(ok), "PASS", ok), sweep_row(ring, false)])
}

fn gorenstein0() -> Result<Vec<Row>> {
    let t = residue_ring(3, &[3, 3], (-4, 4))?;
    let ring = &t.ring;
    let mut rows = vec![sweep_row(ring, true)];
    match find_regular_sequence2(ring, 2, 2, 256)? {
        Some((r, rt)) => rows.push(depth2_row(ring, &r, &rt, "verify_depth2 on a degree (2, 2) sequence")?),
        None => rows.push(row("regular sequence in degrees (2, 2)", "none found", "found", false)),
    }
    Ok(rows)
}
