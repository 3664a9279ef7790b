//! The `k <= 150` table of `a(k)`, `b(k)`, `m(k)/k`, `m(k)`: generation,
//! rendering, comparison against the bundled appendix fixture, and OEIS b-files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{self, FormulaError, FormulaVariant};

/// Rows set in bold in the published table: the values that differ from the 1976 rule.
pub const CORRECTED_ROWS: [u64; 9] = [14, 28, 56, 62, 70, 98, 112, 124, 140];

const APPENDIX: &str = include_str!("../data/appendix_table.txt");

/// Environment variable holding the b-file URL template; `{id}` expands to
/// `A370252`, `{num}` to `370252`.
pub const ENDPOINT_ENV: &str = "MKPOLY_OEIS_ENDPOINT";
pub const DEFAULT_ENDPOINT: &str = "https://oeis.org/{id}/b{num}.txt";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("invalid range {from}..={to}: need 1 <= from <= to")]
    InvalidRange { from: u64, to: u64 },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("b-file {0} does not overlap the rows")]
    EmptyOverlap(String),
    #[error("unknown sequence {0}")]
    UnknownSequence(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("timed out fetching {url}")]
    Timeout { url: String },
    #[error("network error fetching {url}: {msg}")]
    Network { url: String, msg: String },
    #[error("malformed response from {url}: {msg}")]
    Malformed { url: String, msg: String },
}

impl TableError {
    /// I/O and network failures, as opposed to bad input.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            TableError::Io { .. } | TableError::Timeout { .. } | TableError::Network { .. } | TableError::Malformed { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u64,
    pub a: BigInt,
    pub a_factored: String,
    pub b: BigInt,
    pub b_factored: String,
    pub m_over_k: BigInt,
    pub m: BigInt,
    pub corrected: bool,
}

/// `"4·3=12"`, or the bare value when there is at most one factor.
pub fn factored(parts: &[u64]) -> String {
    let value: BigInt = parts.iter().map(|&p| BigInt::from(p)).product();
    match parts.len() {
        0 | 1 => value.to_string(),
        _ => {
            let s: Vec<String> = parts.iter().map(u64::to_string).collect();
            format!("{}={value}", s.join("·"))
        }
    }
}

/// Value of a factored string; `None` if it is inconsistent.
pub fn parse_factored(s: &str) -> Option<BigInt> {
    let (lhs, rhs) = match s.split_once('=') {
        Some((l, r)) => (l, Some(r)),
        None => (s, None),
    };
    let product = lhs.split('·').map(|t| t.trim().parse::<BigInt>().ok()).product::<Option<BigInt>>()?;
    match rhs {
        Some(r) if r.trim().parse::<BigInt>().ok()? != product => None,
        _ => Some(product),
    }
}

pub fn build_rows(from: u64, to: u64, variant: FormulaVariant) -> Result<Vec<TableRow>, TableError> {
    if from < 1 || from > to {
        return Err(TableError::InvalidRange { from, to });
    }
    (from..=to)
        .into_par_iter()
        .map(|k| {
            let p = formula::profile_with(k, variant)?;
            Ok(TableRow {
                k,
                a_factored: factored(&p.a_factors()),
                b_factored: factored(&p.b_factors()),
                m_over_k: p.m_over_k(),
                a: p.a,
                b: p.b,
                m: p.m,
                corrected: CORRECTED_ROWS.contains(&k),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(format!("unknown format {s:?} (csv, json, markdown)")),
        }
    }
}

pub const CSV_HEADER: &str = "k,a,b,m_over_k,m,corrected";

pub fn render(rows: &[TableRow], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!("{},{},{},{},{},{}\n", r.k, r.a, r.b, r.m_over_k, r.m, r.corrected));
            }
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "k": r.k,
                        "a": r.a.to_string(),
                        "a_factored": r.a_factored,
                        "b": r.b.to_string(),
                        "b_factored": r.b_factored,
                        "m_over_k": r.m_over_k.to_string(),
                        "m": r.m.to_string(),
                        "corrected": r.corrected,
                    })
                })
                .collect();
            out = serde_json::to_string_pretty(&v).expect("plain data serializes");
            out.push('\n');
        }
        Format::Markdown => {
            out.push_str("| k | a(k) | b(k) | m(k)/k | m(k) |\n|---:|---:|---:|---:|---:|\n");
            for r in rows {
                let cells = [r.k.to_string(), r.a_factored.clone(), r.b_factored.clone(), r.m_over_k.to_string(), r.m.to_string()];
                let cells: Vec<String> = if r.corrected {
                    cells.iter().map(|c| format!("**{c}**")).collect()
                } else {
                    cells.to_vec()
                };
                out.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
        }
    }
    out
}

/// One line of the bundled appendix table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureRow {
    pub k: u64,
    pub a_factored: String,
    pub b_factored: String,
    pub a: BigInt,
    pub b: BigInt,
    pub m_over_k: BigInt,
    pub m: BigInt,
    pub bold: bool,
}

pub fn appendix_fixture() -> Vec<FixtureRow> {
    parse_fixture(APPENDIX).expect("bundled fixture parses")
}

fn parse_fixture(text: &str) -> Result<Vec<FixtureRow>, TableError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| TableError::Parse { line: i + 1, msg: msg.to_string() };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 5 {
            return Err(err("expected k a(k) b(k) m(k)/k m(k)"));
        }
        let int = |s: &str| s.parse::<BigInt>().map_err(|_| err(&format!("bad integer {s:?}")));
        rows.push(FixtureRow {
            k: f[0].parse().map_err(|_| err("bad k"))?,
            a: parse_factored(f[1]).ok_or_else(|| err("bad a(k)"))?,
            b: parse_factored(f[2]).ok_or_else(|| err("bad b(k)"))?,
            a_factored: f[1].to_string(),
            b_factored: f[2].to_string(),
            m_over_k: int(f[3])?,
            m: int(f[4])?,
            bold: f.get(5) == Some(&"*"),
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    A,
    B,
    MOverK,
    M,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::A, Column::B, Column::MOverK, Column::M];

    pub fn of(self, r: &TableRow) -> &BigInt {
        match self {
            Column::A => &r.a,
            Column::B => &r.b,
            Column::MOverK => &r.m_over_k,
            Column::M => &r.m,
        }
    }

    /// The OEIS sequence holding this column.
    pub fn sequence(self) -> &'static str {
        match self {
            Column::A => "A005730",
            Column::B => "A005731",
            Column::MOverK => "A005729",
            Column::M => "A370252",
        }
    }

    pub fn for_sequence(id: &str) -> Option<Column> {
        Column::ALL.into_iter().find(|c| c.sequence().eq_ignore_ascii_case(id))
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Column::A => "a",
            Column::B => "b",
            Column::MOverK => "m_over_k",
            Column::M => "m",
        })
    }
}

impl FromStr for Column {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "a" => Ok(Column::A),
            "b" => Ok(Column::B),
            "m_over_k" | "m/k" => Ok(Column::MOverK),
            "m" => Ok(Column::M),
            _ => Err(format!("unknown column {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub k: u64,
    pub column: Column,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k = {}, {}: expected {}, got {}", self.k, self.column, self.expected, self.got)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FixtureReport {
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
    /// Fixture rows with no generated counterpart.
    pub missing: Vec<u64>,
}

impl FixtureReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty() && self.missing.is_empty()
    }

    /// Distinct `k` with at least one mismatch, ascending.
    pub fn mismatched_rows(&self) -> Vec<u64> {
        let mut ks: Vec<u64> = self.mismatches.iter().map(|m| m.k).collect();
        ks.dedup();
        ks
    }
}

/// Cell-by-cell comparison of `a`, `b`, `m/k`, `m` against the appendix table.
pub fn compare_fixture(rows: &[TableRow]) -> FixtureReport {
    let mut report = FixtureReport::default();
    for fx in appendix_fixture() {
        let Some(r) = rows.iter().find(|r| r.k == fx.k) else {
            report.missing.push(fx.k);
            continue;
        };
        report.compared += 1;
        let expected = [&fx.a, &fx.b, &fx.m_over_k, &fx.m];
        for (col, want) in Column::ALL.into_iter().zip(expected) {
            let got = col.of(r);
            if got != want {
                report.mismatches.push(Mismatch { k: fx.k, column: col, expected: want.to_string(), got: got.to_string() });
            }
        }
    }
    report
}

/// `k` in range where the 1976 rule and the corrected rule disagree on `m(k)`.
pub fn legacy_diff(from: u64, to: u64) -> Result<Vec<u64>, TableError> {
    let new = build_rows(from, to, FormulaVariant::Corrected)?;
    let old = build_rows(from, to, FormulaVariant::Legacy1976)?;
    Ok(new.iter().zip(&old).filter(|(n, o)| n.m != o.m).map(|(n, _)| n.k).collect())
}

/// An OEIS b-file: `index value` lines, `#` comments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BFile {
    pub id: String,
    pub entries: Vec<(u64, BigInt)>,
}

impl BFile {
    pub fn offset(&self) -> Option<u64> {
        self.entries.first().map(|e| e.0)
    }

    pub fn get(&self, n: u64) -> Option<&BigInt> {
        let i = n.checked_sub(self.offset()?)?;
        self.entries.get(i as usize).map(|e| &e.1)
    }
}

pub fn parse_bfile(id: &str, text: &str) -> Result<BFile, TableError> {
    let mut entries: Vec<(u64, BigInt)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| TableError::Parse { line: i + 1, msg };
        let mut it = line.split_whitespace();
        let (Some(n), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(err(format!("expected \"<index> <value>\", got {line:?}")));
        };
        let n: u64 = n.parse().map_err(|_| err(format!("bad index {n:?}")))?;
        let v: BigInt = v.parse().map_err(|_| err(format!("bad value {v:?}")))?;
        if let Some(&(prev, _)) = entries.last() {
            if n != prev + 1 {
                return Err(err(format!("index {n} does not follow {prev}")));
            }
        }
        entries.push((n, v));
    }
    Ok(BFile { id: id.to_string(), entries })
}

pub fn load_bfile(path: &Path) -> Result<BFile, TableError> {
    let text = std::fs::read_to_string(path).map_err(|e| TableError::Io { path: path.display().to_string(), source: e })?;
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.strip_prefix('b'))
        .map(|n| format!("A{n}"))
        .unwrap_or_default();
    parse_bfile(&id, &text)
}

pub fn bundled_bfile(id: &str) -> Result<BFile, TableError> {
    let text = match id.to_ascii_uppercase().as_str() {
        "A370252" => include_str!("../data/b370252.txt"),
        "A005729" => include_str!("../data/b005729.txt"),
        "A005730" => include_str!("../data/b005730.txt"),
        "A005731" => include_str!("../data/b005731.txt"),
        _ => return Err(TableError::UnknownSequence(id.to_string())),
    };
    parse_bfile(&id.to_ascii_uppercase(), text)
}

fn sequence_number(id: &str) -> Result<&str, TableError> {
    let n = id.strip_prefix('A').or_else(|| id.strip_prefix('a'));
    match n {
        Some(n) if n.len() == 6 && n.bytes().all(|b| b.is_ascii_digit()) => Ok(n),
        _ => Err(TableError::UnknownSequence(id.to_string())),
    }
}

pub fn endpoint_url(template: &str, id: &str) -> Result<String, TableError> {
    let num = sequence_number(id)?;
    Ok(template.replace("{id}", &format!("A{num}")).replace("{num}", num))
}

/// Downloads a b-file into `cache_dir`, or reads it from there if already present.
/// `template` defaults to `$MKPOLY_OEIS_ENDPOINT`, then [`DEFAULT_ENDPOINT`].
pub fn fetch_bfile(id: &str, template: Option<&str>, cache_dir: &Path, timeout: Duration) -> Result<BFile, TableError> {
    let num = sequence_number(id)?;
    let cached: PathBuf = cache_dir.join(format!("b{num}.txt"));
    if cached.exists() {
        return load_bfile(&cached);
    }
    let template = template
        .map(str::to_string)
        .or_else(|| std::env::var(ENDPOINT_ENV).ok())
        .unwrap_or_else(|| DEFAULT_ENDPOINT.to_string());
    let url = endpoint_url(&template, id)?;
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let body = match agent.get(&url).call() {
        Ok(resp) => resp.into_string().map_err(|e| classify_io(&url, e))?,
        Err(ureq::Error::Status(code, _)) => {
            return Err(TableError::Network { url, msg: format!("HTTP status {code}") })
        }
        Err(ureq::Error::Transport(t)) => {
            let msg = t.to_string();
            return Err(if msg.contains("timed out") || msg.contains("Timeout") {
                TableError::Timeout { url }
            } else {
                TableError::Network { url, msg }
            });
        }
    };
    let bfile = parse_bfile(&format!("A{num}"), &body).map_err(|e| TableError::Malformed { url: url.clone(), msg: e.to_string() })?;
    if bfile.entries.is_empty() {
        return Err(TableError::Malformed { url, msg: "no entries".into() });
    }
    std::fs::create_dir_all(cache_dir).map_err(|e| TableError::Io { path: cache_dir.display().to_string(), source: e })?;
    std::fs::write(&cached, body).map_err(|e| TableError::Io { path: cached.display().to_string(), source: e })?;
    Ok(bfile)
}

fn classify_io(url: &str, e: std::io::Error) -> TableError {
    if matches!(e.kind(), std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock) {
        TableError::Timeout { url: url.to_string() }
    } else {
        TableError::Malformed { url: url.to_string(), msg: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OeisReport {
    pub sequence: String,
    pub column: Column,
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Index-aligned comparison over the overlap of `rows` and `bfile`.
pub fn compare_oeis(rows: &[TableRow], bfile: &BFile, column: Column) -> Result<OeisReport, TableError> {
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for r in rows {
        let Some(want) = bfile.get(r.k) else { continue };
        compared += 1;
        let got = column.of(r);
        if got != want {
            mismatches.push(Mismatch { k: r.k, column, expected: want.to_string(), got: got.to_string() });
        }
    }
    if compared == 0 {
        return Err(TableError::EmptyOverlap(bfile.id.clone()));
    }
    Ok(OeisReport { sequence: bfile.id.clone(), column, compared, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<TableRow> {
        build_rows(1, 150, FormulaVariant::Corrected).unwrap()
    }

    #[test]
    fn example_rows() {
        let r = rows();
        assert_eq!(r[5].a_factored, "4·3=12");
        assert_eq!((r[5].b.clone(), r[5].m.clone()), (5.into(), 360.into()));
        let r14 = &r[13];
        assert_eq!((r14.a_factored.as_str(), r14.b_factored.as_str()), ("2·7=14", "13"));
        assert_eq!(r14.m_over_k, BigInt::from(182));
        assert!(r14.corrected);
        assert_eq!(r[149].m, BigInt::from(272223000));
        assert!(matches!(build_rows(5, 4, FormulaVariant::Corrected), Err(TableError::InvalidRange { .. })));
        assert!(build_rows(0, 4, FormulaVariant::Corrected).is_err());
    }

    #[test]
    fn factored_strings() {
        assert_eq!(factored(&[]), "1");
        assert_eq!(factored(&[2]), "2");
        assert_eq!(factored(&[4, 3]), "4·3=12");
        assert_eq!(parse_factored("4·3=12"), Some(12.into()));
        assert_eq!(parse_factored("4·3=13"), None);
        for r in rows() {
            assert_eq!(parse_factored(&r.a_factored), Some(r.a.clone()));
            assert_eq!(parse_factored(&r.b_factored), Some(r.b.clone()));
        }
    }

    #[test]
    fn fixture_matches_including_factored_text() {
        let r = rows();
        let rep = compare_fixture(&r);
        assert!(rep.is_clean(), "{:?}", rep.mismatches);
        assert_eq!(rep.compared, 150);
        for (fx, row) in appendix_fixture().iter().zip(&r) {
            assert_eq!(fx.a_factored, row.a_factored, "k = {}", fx.k);
            assert_eq!(fx.b_factored, row.b_factored, "k = {}", fx.k);
            assert_eq!(fx.bold, row.corrected, "k = {}", fx.k);
        }
    }

    #[test]
    fn legacy_against_fixture() {
        let old = build_rows(1, 150, FormulaVariant::Legacy1976).unwrap();
        let rep = compare_fixture(&old);
        assert_eq!(rep.mismatched_rows(), CORRECTED_ROWS);
        let first = rep.mismatches.iter().find(|m| m.column == Column::M).unwrap();
        assert_eq!((first.k, first.expected.as_str(), first.got.as_str()), (14, "2548", "5096"));
        assert_eq!(legacy_diff(1, 150).unwrap(), CORRECTED_ROWS);
    }

    #[test]
    fn missing_rows_reported() {
        let rep = compare_fixture(&build_rows(1, 100, FormulaVariant::Corrected).unwrap());
        assert!(rep.mismatches.is_empty());
        assert_eq!(rep.missing, (101..=150).collect::<Vec<_>>());
        assert!(!rep.is_clean());
    }

    #[test]
    fn legacy_diff_characterization() {
        let expected: Vec<u64> = (3..=150u64)
            .filter(|k| k % 2 == 0 && k % 6 != 0 && (2..8).any(|j| k % ((1u64 << j) - 1) == 0))
            .collect();
        assert_eq!(legacy_diff(1, 150).unwrap(), expected);
    }

    /// Minimal reader for the csv produced by [`render`].
    fn read_csv(text: &str) -> Vec<(u64, BigInt, BigInt, BigInt, BigInt, bool)> {
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                assert_eq!(f.len(), 6);
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap(), f[5].parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn csv_round_trip() {
        let r = rows();
        let back = read_csv(&render(&r, Format::Csv));
        assert_eq!(back.len(), r.len());
        for (row, (k, a, b, mk, m, c)) in r.iter().zip(back) {
            assert_eq!((row.k, &row.a, &row.b, &row.m_over_k, &row.m, row.corrected), (k, &a, &b, &mk, &m, c));
            assert_eq!(&m, &(BigInt::from(k) * &a * &b));
        }
        assert_eq!(render(&[], Format::Csv), format!("{CSV_HEADER}\n"));
        assert!(render(&r[..1], Format::Csv).lines().nth(1).unwrap().starts_with("1,1,1,1,1"));
    }

    #[test]
    fn markdown_and_json() {
        let r = rows();
        let md = render(&r[12..14], Format::Markdown);
        assert!(md.contains("| 13 | 1 | 3 | 3 | 39 |"));
        assert!(md.contains("| **14** | **2·7=14** | **13** | **182** | **2548** |"));
        let v: serde_json::Value = serde_json::from_str(&render(&r[5..6], Format::Json)).unwrap();
        assert_eq!(v[0]["m"], "360");
        assert_eq!(v[0]["a_factored"], "4·3=12");
        assert_eq!(render(&r, Format::Json), render(&r, Format::Json));
    }

    #[test]
    fn bfiles() {
        let m = bundled_bfile("A370252").unwrap();
        assert_eq!(m.get(14), Some(&BigInt::from(2548)));
        assert_eq!(bundled_bfile("A005729").unwrap().get(6), Some(&BigInt::from(60)));
        let err = parse_bfile("A1", "1 1\nabc\n").unwrap_err();
        assert!(matches!(err, TableError::Parse { line: 2, .. }), "{err}");
        assert!(matches!(parse_bfile("A1", "1 1\n3 4\n"), Err(TableError::Parse { line: 2, .. })));
        assert!(matches!(bundled_bfile("A000001"), Err(TableError::UnknownSequence(_))));
    }

    #[test]
    fn oeis_columns() {
        let r = rows();
        for col in Column::ALL {
            let rep = compare_oeis(&r, &bundled_bfile(col.sequence()).unwrap(), col).unwrap();
            assert_eq!(rep.compared, 150);
            assert!(rep.mismatches.is_empty(), "{col}: {:?}", rep.mismatches);
        }
        let m = bundled_bfile("A370252").unwrap();
        let shifted = BFile { id: m.id.clone(), entries: m.entries.iter().map(|(n, v)| (n + 1, v.clone())).collect() };
        let rep = compare_oeis(&r, &shifted, Column::M).unwrap();
        assert_eq!(rep.mismatches.len(), rep.compared);
        let far = BFile { id: "A370252".into(), entries: vec![(1000, BigInt::from(1))] };
        assert!(matches!(compare_oeis(&r, &far, Column::M), Err(TableError::EmptyOverlap(_))));
    }

    #[test]
    fn offset_is_honoured() {
        let b = parse_bfile("A370252", "# comment\n0 7\n1 1\n2 2\n").unwrap();
        assert_eq!(b.offset(), Some(0));
        assert_eq!(b.get(1), Some(&BigInt::from(1)));
        assert_eq!(b.get(0), Some(&BigInt::from(7)));
    }

    #[test]
    fn fetch_uses_cache_and_reports_failures() {
        let dir = std::env::temp_dir().join(format!("mk-fetch-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("b370252.txt"), "1 1\n2 2\n").unwrap();
        // the cache wins, the unroutable endpoint is never contacted
        let b = fetch_bfile("A370252", Some("http://127.0.0.1:9/{id}"), &dir, Duration::from_millis(200)).unwrap();
        assert_eq!(b.entries.len(), 2);
        let err = fetch_bfile("A005729", Some("http://127.0.0.1:9/{id}"), &dir, Duration::from_millis(200)).unwrap_err();
        assert!(err.is_io(), "{err}");
        assert_eq!(endpoint_url(DEFAULT_ENDPOINT, "A005729").unwrap(), "https://oeis.org/A005729/b005729.txt");
        std::fs::remove_dir_all(&dir).ok();
    }

    fn serve_once(reply: Option<&'static str>) -> String {
        use std::io::{Read, Write};
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            let (mut s, _) = listener.accept().unwrap();
            let mut buf = [0u8; 1024];
            let _ = s.read(&mut buf);
            match reply {
                Some(body) => {
                    let resp = format!("HTTP/1.1 200 OK\r\nContent-Length: {}\r\n\r\n{body}", body.len());
                    let _ = s.write_all(resp.as_bytes());
                }
                None => std::thread::sleep(Duration::from_secs(3)),
            }
        });
        format!("http://{addr}/{{id}}")
    }

    #[test]
    fn fetch_distinguishes_timeout_and_malformed() {
        let dir = std::env::temp_dir().join(format!("mk-fetch2-{}", std::process::id()));
        let slow = serve_once(None);
        let err = fetch_bfile("A005730", Some(&slow), &dir, Duration::from_millis(300)).unwrap_err();
        assert!(matches!(err, TableError::Timeout { .. }), "{err}");
        let junk = serve_once(Some("<html>not a b-file</html>"));
        let err = fetch_bfile("A005730", Some(&junk), &dir, Duration::from_secs(2)).unwrap_err();
        assert!(matches!(err, TableError::Malformed { .. }), "{err}");
        let good = serve_once(Some("# A005731\n1 1\n2 1\n3 2\n"));
        let b = fetch_bfile("A005731", Some(&good), &dir, Duration::from_secs(2)).unwrap();
        assert_eq!(b.get(3), Some(&BigInt::from(2)));
        // second call is served from the cache; the one-shot server is gone
        assert_eq!(fetch_bfile("A005731", Some(&good), &dir, Duration::from_secs(2)).unwrap(), b);
        std::fs::remove_dir_all(&dir).ok();
    }
}
