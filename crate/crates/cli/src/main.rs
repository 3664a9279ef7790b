//! `mkpoly`: compute, tabulate and certify `m(k)`.
//!
//! Exit codes: 0 ok, 1 verification mismatch, 2 usage, 3 partial certification,
//! 4 I/O, network or enumeration cap.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mk_core::algebra::{parse_ring, Poly};
use mk_core::certify::{certify, CertStatus, CertifyConfig, CertifyError, HigherDegree};
use mk_core::checks;
use mk_core::formula::{self, FormulaVariant};
use mk_core::subgroup::{span_j, span_k, OracleLimits, SubgroupError};
use mk_core::tables::{self, Column, Format, TableError};

use config::Config;

const OK: u8 = 0;
const MISMATCH: u8 = 1;
const USAGE: u8 = 2;
const PARTIAL: u8 = 3;
const IO: u8 = 4;

const LEGACY_BANNER: &str = "WARNING: --legacy-1976 uses the 1976 rule for alpha_k(2), which is wrong from k = 14 on. Demonstration only.";

/// Env var that makes `selftest` run the table check under the 1976 rule.
const FORCE_LEGACY_ENV: &str = "MKPOLY_FORCE_LEGACY";

#[derive(Parser)]
#[command(name = "mkpoly", version, about = "Compute and certify m(k), the least m with m*x a sum of k-th powers in Z[x]")]
struct Cli {
    /// TOML file with defaults, one table per subcommand; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// a(k), b(k), m(k)/k and m(k) for one k or a range `FROM..TO`.
    Compute(ComputeArgs),
    /// Generate the table and cross-check it.
    Table(TableArgs),
    /// Upper-bound identity plus per-prime lower-bound witnesses.
    Certify(CertifyArgs),
    /// J(k, R) or K(k, R) for a finite ring.
    Oracle(OracleArgs),
    /// Run the built-in invariant sweeps.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// `k` or `FROM..TO`.
    range: String,
    #[arg(long)]
    legacy_1976: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    from: Option<u64>,
    #[arg(long)]
    to: Option<u64>,
    /// csv, json or markdown.
    #[arg(long)]
    format: Option<String>,
    /// Compare against the bundled appendix table.
    #[arg(long)]
    check_fixture: bool,
    /// Compare against an OEIS sequence (repeatable).
    #[arg(long = "oeis", value_name = "A-NUMBER")]
    oeis: Vec<String>,
    /// Download b-files instead of using the bundled copies.
    #[arg(long)]
    fetch: bool,
    /// Where fetched b-files are cached.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Use a local b-file for the single `--oeis` sequence.
    #[arg(long)]
    bfile: Option<PathBuf>,
    #[arg(long)]
    legacy_1976: bool,
    /// Write the table here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    k: u64,
    /// Write the certificate JSON to this path (`-` for stdout).
    #[arg(long)]
    json: Option<String>,
    /// Largest ring the witnesses may enumerate.
    #[arg(long)]
    max_ring_size: Option<u64>,
    /// Largest `a` in the `(a x + b)^k` generators.
    #[arg(long)]
    gen_a: Option<i64>,
    /// Largest `|b|` in the `(a x + b)^k` generators (default k).
    #[arg(long)]
    gen_b: Option<i64>,
    /// Highest degree of the extra generators; 1 turns them off.
    #[arg(long)]
    gen_degree: Option<usize>,
    /// Coefficient bound of the extra generators.
    #[arg(long)]
    gen_coeff: Option<i64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    J,
    K,
}

#[derive(Args)]
struct OracleArgs {
    /// e.g. `Z/8[x]/(x^2+x+1)` or `GF(2^4)`.
    #[arg(long)]
    ring: String,
    #[arg(long)]
    k: u64,
    #[arg(long, value_enum, default_value = "j", ignore_case = true)]
    kind: Kind,
    #[arg(long)]
    max_ring_size: Option<u64>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long)]
    max_ring_size: Option<u64>,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(if e.is_io() { IO } else { USAGE });
            }
        },
        None => Config::default(),
    };
    let code = match cli.command {
        Command::Compute(a) => cmd_compute(a, &cfg),
        Command::Table(a) => cmd_table(a, &cfg),
        Command::Certify(a) => cmd_certify(a, &cfg),
        Command::Oracle(a) => cmd_oracle(a, &cfg),
        Command::Selftest(a) => cmd_selftest(a, &cfg),
    };
    ExitCode::from(code)
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    USAGE
}

fn parse_range(s: &str) -> Option<(u64, u64)> {
    match s.split_once("..") {
        Some((a, b)) => Some((a.trim().parse().ok()?, b.trim().trim_start_matches('=').parse().ok()?)),
        None => s.trim().parse().ok().map(|k| (k, k)),
    }
}

fn variant(legacy: bool) -> FormulaVariant {
    if legacy {
        FormulaVariant::Legacy1976
    } else {
        FormulaVariant::Corrected
    }
}

fn cmd_compute(a: ComputeArgs, cfg: &Config) -> u8 {
    let legacy = a.legacy_1976 || cfg.flag("compute", "legacy-1976");
    let json = a.json || cfg.flag("compute", "json");
    let Some((from, to)) = parse_range(&a.range) else {
        return usage(format!("expected k or FROM..TO, got {:?}", a.range));
    };
    let rows = match tables::build_rows(from, to, variant(legacy)) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    if legacy {
        if json {
            eprintln!("{LEGACY_BANNER}");
        } else {
            println!("{LEGACY_BANNER}");
        }
    }
    if json {
        print!("{}", tables::render(&rows, Format::Json));
    } else {
        for r in &rows {
            println!("k={} a={} b={} m/k={} m={}", r.k, r.a_factored, r.b_factored, r.m_over_k, r.m);
        }
    }
    OK
}

fn cmd_table(a: TableArgs, cfg: &Config) -> u8 {
    let from = a.from.or(cfg.u64("table", "from")).unwrap_or(1);
    let to = a.to.or(cfg.u64("table", "to")).unwrap_or(150);
    let format = match a.format.or(cfg.string("table", "format")).as_deref().unwrap_or("csv").parse::<Format>() {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let check_fixture = a.check_fixture || cfg.flag("table", "check-fixture");
    let fetch = a.fetch || cfg.flag("table", "fetch");
    let legacy = a.legacy_1976 || cfg.flag("table", "legacy-1976");
    let mut oeis = a.oeis;
    if oeis.is_empty() {
        oeis = cfg.strings("table", "oeis");
    }
    if a.bfile.is_some() && oeis.len() != 1 {
        return usage("--bfile needs exactly one --oeis sequence");
    }
    let cache_dir = a
        .cache_dir
        .or(cfg.string("table", "cache-dir").map(PathBuf::from))
        .unwrap_or_else(|| std::env::temp_dir().join("mkpoly-bfiles"));

    let rows = match tables::build_rows(from, to, variant(legacy)) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    if legacy {
        eprintln!("{LEGACY_BANNER}");
    }
    let checking = check_fixture || !oeis.is_empty();
    let rendered = tables::render(&rows, format);
    match &a.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("error: {}: {e}", path.display());
                return IO;
            }
        }
        None if !checking => print!("{rendered}"),
        None => {}
    }

    let mut code = OK;
    if check_fixture {
        let report = tables::compare_fixture(&rows);
        for m in &report.mismatches {
            println!("MISMATCH {m}");
        }
        for k in &report.missing {
            println!("MISSING row {k}");
        }
        println!(
            "fixture: {} rows compared, {} mismatched cells, {} missing rows",
            report.compared,
            report.mismatches.len(),
            report.missing.len()
        );
        if !report.is_clean() {
            code = MISMATCH;
        }
    }
    for id in &oeis {
        let Some(column) = Column::for_sequence(id) else {
            return usage(format!("{id} is not one of A370252, A005729, A005730, A005731"));
        };
        let bfile = if let Some(path) = &a.bfile {
            tables::load_bfile(path)
        } else if fetch {
            tables::fetch_bfile(id, None, &cache_dir, Duration::from_secs(30))
        } else {
            tables::bundled_bfile(id)
        };
        let bfile = match bfile {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: {e}");
                return if e.is_io() || matches!(e, TableError::Parse { .. }) { IO } else { USAGE };
            }
        };
        match tables::compare_oeis(&rows, &bfile, column) {
            Ok(rep) => {
                for m in &rep.mismatches {
                    println!("MISMATCH {} {m}", rep.sequence);
                }
                println!("{} ({column}): {} compared, {} mismatches", rep.sequence, rep.compared, rep.mismatches.len());
                if !rep.mismatches.is_empty() {
                    code = MISMATCH;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = MISMATCH;
            }
        }
    }
    code
}

fn limits(max_ring_size: Option<u64>) -> OracleLimits {
    let mut l = OracleLimits::default();
    if let Some(n) = max_ring_size {
        l.enumeration_cap = n;
    }
    l
}

fn cmd_certify(a: CertifyArgs, cfg: &Config) -> u8 {
    if a.k == 0 || a.k > formula::MAX_K {
        return usage(format!("k must be in 1..={}", formula::MAX_K));
    }
    let mut config = CertifyConfig {
        limits: limits(a.max_ring_size.or(cfg.u64("certify", "max-ring-size"))),
        ..CertifyConfig::default()
    };
    if let Some(v) = a.gen_a.or(cfg.i64("certify", "gen-a")) {
        config.generators.a_max = v;
    }
    if let Some(v) = a.gen_b.or(cfg.i64("certify", "gen-b")) {
        config.generators.b_max = Some(v);
    }
    let degree = a.gen_degree.or(cfg.u64("certify", "gen-degree").map(|d| d as usize));
    let coeff = a.gen_coeff.or(cfg.i64("certify", "gen-coeff"));
    if degree.is_some() || coeff.is_some() {
        let base = config.generators.higher_degree.unwrap_or(HigherDegree { max_degree: 1, coeff_bound: 1 });
        let h = HigherDegree {
            max_degree: degree.unwrap_or(base.max_degree),
            coeff_bound: coeff.unwrap_or(base.coeff_bound),
        };
        config.generators.higher_degree = (h.max_degree >= 2).then_some(h);
    }
    if config.generators.a_max < 1 || config.generators.b_max.is_some_and(|b| b < 0) || coeff.is_some_and(|c| c < 0) {
        return usage("generator bounds must be nonnegative and --gen-a at least 1");
    }
    let json_target = a.json.or(cfg.string("certify", "json"));

    let bundle = match certify(a.k, &config) {
        Ok(b) => b,
        Err(e @ CertifyError::FormulaFalsified { .. }) => {
            eprintln!("{e}");
            return MISMATCH;
        }
        Err(e) => return usage(e),
    };
    let doc = serde_json::to_string_pretty(&bundle.to_json()).expect("json");
    let to_stdout = json_target.as_deref() == Some("-");
    match json_target.as_deref() {
        Some("-") => println!("{doc}"),
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{doc}\n")) {
                eprintln!("error: {path}: {e}");
                return IO;
            }
        }
        None => {}
    }
    let mut out: Box<dyn Write> = if to_stdout { Box::new(std::io::stderr()) } else { Box::new(std::io::stdout()) };
    let _ = writeln!(out, "k = {}, m(k) = {}", bundle.k, bundle.m_formula);
    let _ = writeln!(
        out,
        "upper: {} from {} terms, verified: {}",
        Poly::new(vec![bundle.upper.c.clone(), bundle.upper.m.clone()]),
        bundle.upper.terms.len(),
        bundle.upper_verified
    );
    let _ = writeln!(out, "x-coefficient fact: {} ({} points)", bundle.x_coefficient.holds, bundle.x_coefficient.points);
    for w in &bundle.witnesses {
        let ring = w.ring.as_ref().map_or_else(|| "-".to_string(), ToString::to_string);
        let _ = writeln!(
            out,
            "p = {}: target {}, achieved {} via {ring} {}",
            w.p,
            w.target_valuation,
            w.achieved_valuation,
            if w.is_success() { "ok" } else { "FAILED" }
        );
    }
    match &bundle.status {
        CertStatus::Full => {
            let _ = writeln!(out, "FULL");
            OK
        }
        CertStatus::Partial { uncertified } => {
            let ps: Vec<String> = uncertified.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "PARTIAL: uncertified primes {}", ps.join(", "));
            PARTIAL
        }
    }
}

fn cmd_oracle(a: OracleArgs, cfg: &Config) -> u8 {
    let ring = match parse_ring(&a.ring) {
        Ok(r) => r,
        Err(e) => return usage(format!("bad ring {:?}: {e}", a.ring)),
    };
    let limits = limits(a.max_ring_size.or(cfg.u64("oracle", "max-ring-size")));
    let report = match a.kind {
        Kind::J => span_j(&ring, a.k, &limits),
        Kind::K => span_k(&ring, a.k, &limits),
    };
    match report {
        Ok(rep) => {
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).expect("json"));
            OK
        }
        Err(e @ SubgroupError::NotCharacteristicTwo(_)) => usage(e),
        Err(e) => {
            eprintln!("error: {e}");
            IO
        }
    }
}

fn cmd_selftest(a: SelftestArgs, cfg: &Config) -> u8 {
    let limits = limits(a.max_ring_size.or(cfg.u64("selftest", "max-ring-size")));
    let legacy = std::env::var(FORCE_LEGACY_ENV).is_ok_and(|v| !v.is_empty() && v != "0");
    let outcomes = checks::selftest(variant(legacy), &limits);
    if a.json {
        println!("{}", json!(outcomes));
    } else {
        for c in &outcomes {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if outcomes.iter().all(|c| c.passed) {
        OK
    } else {
        MISMATCH
    }
}
