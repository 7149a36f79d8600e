//! Reproduction of the result tables. Each cell is computed from the
//! numerics or from a duel and compared with its stored golden value.

use std::fmt::Write as _;

use optiwind_core::duel::duel_by_name;
use optiwind_core::game::run_instance;
use optiwind_core::numerics::{alpha, beta, i0, phi, regimes, thresholds, tree_minimax, TreeMode};
use optiwind_core::offline::solve;
use optiwind_core::policies::{policy_by_name, PolicyParams};
use optiwind_core::{competitive_ratio, performance};
use serde::Serialize;

use crate::corpus::{corpus, CorpusSpec};
use crate::error::CliError;

pub const TABLE_IDS: [&str; 4] = ["summary", "n3", "n4", "alpha"];

/// Instances per corpus-backed cell.
pub const CORPUS_SIZE: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|value - golden| <= tol`.
    Equal,
    /// `value >= golden - tol`.
    AtLeast,
    /// `value > golden`.
    Above,
    /// Rendered only.
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub row: String,
    pub column: &'static str,
    pub value: f64,
    pub golden: Option<f64>,
    pub tol: f64,
    pub check: Check,
    /// How the value was obtained.
    pub source: String,
}

impl Cell {
    pub fn ok(&self) -> bool {
        let Some(g) = self.golden else { return true };
        match self.check {
            Check::Equal => (self.value - g).abs() <= self.tol,
            Check::AtLeast => self.value >= g - self.tol,
            Check::Above => self.value > g,
            Check::Info => true,
        }
    }

    fn rendered(&self) -> String {
        let g = self.golden.unwrap_or(self.value);
        match self.check {
            Check::Equal | Check::Info => format!("{:.4}", self.value),
            Check::AtLeast => format!(">= {:.4} ({:.4})", g, self.value),
            Check::Above => format!("> {:.4} ({:.4})", g, self.value),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub id: String,
    pub title: String,
    /// Header of the row-label column.
    pub key: &'static str,
    pub cells: Vec<Cell>,
}

impl Table {
    pub fn failures(&self) -> Vec<&Cell> {
        self.cells.iter().filter(|c| !c.ok()).collect()
    }

    /// Rows in first-seen order with their performance and ratio cells.
    pub fn render(&self) -> String {
        let mut rows: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !rows.contains(&c.row.as_str()) {
                rows.push(&c.row);
            }
        }
        let columns: Vec<&str> = {
            let mut v: Vec<&str> = Vec::new();
            for c in &self.cells {
                if !v.contains(&c.column) {
                    v.push(c.column);
                }
            }
            v
        };
        let mut out = format!("# {}\n{:<22}", self.title, self.key);
        for col in &columns {
            let _ = write!(out, " | {col:<26}");
        }
        out.push('\n');
        for row in rows {
            let _ = write!(out, "{row:<22}");
            for col in &columns {
                let text = self
                    .cells
                    .iter()
                    .find(|c| c.row == row && c.column == *col)
                    .map(|c| format!("{}{}", c.rendered(), if c.ok() { "" } else { " FAIL" }))
                    .unwrap_or_default();
                let _ = write!(out, " | {text:<26}");
            }
            out.push('\n');
        }
        out
    }
}

const PERF: &str = "performance";
const CR: &str = "competitive ratio";

fn cell(row: &str, column: &'static str, value: f64, golden: Option<f64>, tol: f64, check: Check, source: String) -> Cell {
    Cell { row: row.to_string(), column, value, golden, tol, check, source }
}

fn duel_value(policy: &str, adversary: &str, n: usize, t: f64, eps: Option<f64>, tol: f64, ratio: bool) -> Result<f64, CliError> {
    let r = duel_by_name(policy, adversary, n, t, eps, tol)?;
    Ok(if ratio { r.ratio.unwrap_or(1.0) } else { r.performance })
}

/// Smallest performance and competitive ratio of a policy over a seeded
/// corpus.
pub fn corpus_minimum(policy: &str, n: usize, t: f64, seed: u64, count: usize, tol: f64) -> Result<(f64, f64), CliError> {
    let params = PolicyParams::new(n, t, None)?;
    let spec = CorpusSpec { vary_len: true, ..CorpusSpec::segment(n, t) };
    let mut worst = (f64::INFINITY, f64::INFINITY);
    for inst in corpus(seed, count, &spec) {
        let mut p = policy_by_name(policy, &params, None)?;
        let trace = run_instance(&inst, &mut p)?;
        let opt = solve(&inst, tol)?.value;
        worst.0 = worst.0.min(performance(&trace));
        worst.1 = worst.1.min(competitive_ratio(&trace, opt)?);
    }
    Ok(worst)
}

fn summary(n: usize, seed: u64, tol: f64) -> Result<Table, CliError> {
    if !(4..=8).contains(&n) {
        return Err(CliError::Usage(format!("the summary table needs 4 <= n <= 8, got {n}")));
    }
    let th = thresholds(n)?;
    let inv = 1.0 / n as f64;
    let mut cells = Vec::new();

    let t = th.t1 / 2.0;
    let row = "T < T1";
    cells.push(cell(row, PERF, duel_value("gr0", "small_delay_perf", n, t, None, tol, false)?, Some(inv), tol, Check::Equal, format!("small_delay_perf vs gr0 at T={t}")));
    cells.push(cell(row, CR, duel_value("gr0", "small_delay_cr", n, t, None, tol, true)?, Some(inv), tol, Check::Equal, format!("small_delay_cr vs gr0 at T={t}")));

    let t = (th.t1 + th.t0) / 2.0;
    let row = "T1 <= T < T0";
    cells.push(cell(row, PERF, duel_value("gr0", "small_delay_perf", n, t, None, tol, false)?, Some(inv), tol, Check::Equal, format!("small_delay_perf vs gr0 at T={t}")));
    let (_, cr) = corpus_minimum("al3", n, th.t1, seed, CORPUS_SIZE, tol)?;
    cells.push(cell(row, CR, cr, Some(inv), tol, Check::Above, format!("al3 minimum over {CORPUS_SIZE} instances at T=T1")));

    let row = "T0 <= T < 1/2";
    let (perf, cr) = corpus_minimum("al1", n, th.t0, seed, CORPUS_SIZE, tol)?;
    let bound = inv + th.epsilon;
    cells.push(cell(row, PERF, perf, Some(bound), tol, Check::AtLeast, format!("al1 minimum over {CORPUS_SIZE} instances at T=T0")));
    cells.push(cell(row, CR, cr, Some(bound), tol, Check::AtLeast, format!("al1 minimum over {CORPUS_SIZE} instances at T=T0")));

    let row = "1/2 <= T < 1";
    let b = beta(n)?;
    cells.push(cell(row, PERF, b, None, tol, Check::Info, format!("beta({n})")));
    cells.push(cell(row, CR, b, Some(b), tol, Check::AtLeast, format!("beta({n}) lower bound")));

    let row = "1 <= T < 2-1/(n-1)";
    let eps = 1e-4;
    let a = alpha(n - i0(1.0)?)?.alpha;
    cells.push(cell(row, PERF, duel_value("gr1", "large_delay", n, 1.0, Some(eps), tol, false)?, Some(a), 10.0 * eps, Check::Equal, "large_delay vs gr1 at T=1".into()));
    cells.push(cell(row, CR, duel_value("gr1", "large_delay", n, 1.0, Some(eps), tol, true)?, Some(a), 10.0 * eps, Check::Equal, "large_delay vs gr1 at T=1".into()));

    let row = "T >= 2-1/(n-1)";
    let t = 2.0 - 1.0 / (n as f64 - 1.0) + 1e-9;
    let top = alpha((n - i0(t)?).max(1))?.alpha;
    cells.push(cell(row, PERF, top, Some(1.0), tol, Check::Equal, format!("alpha(n - i0) at T={t}")));
    cells.push(cell(row, CR, top, Some(1.0), tol, Check::Equal, format!("alpha(n - i0) at T={t}")));

    Ok(Table { id: "summary".into(), title: format!("performance and competitive ratio, n = {n}"), key: "delay", cells })
}

fn n3(tol: f64) -> Result<Table, CliError> {
    let g = 1.0 / (phi() * phi());
    let mut cells = Vec::new();
    let row = "T < 1/2";
    cells.push(cell(row, PERF, duel_value("gr0", "small_delay_perf", 3, 0.25, None, tol, false)?, Some(1.0 / 3.0), tol, Check::Equal, "small_delay_perf vs gr0 at T=0.25".into()));
    cells.push(cell(row, CR, duel_value("gr0", "small_delay_cr", 3, 0.25, None, tol, true)?, Some(1.0 / 3.0), tol, Check::Equal, "small_delay_cr vs gr0 at T=0.25".into()));
    let row = "1/2 <= T < 1";
    cells.push(cell(row, PERF, beta(3)?, Some(g), tol, Check::Equal, "beta(3)".into()));
    cells.push(cell(row, CR, duel_value("gr0", "n3_golden", 3, 0.6, None, tol, true)?, Some(g), tol, Check::Equal, "n3_golden vs gr0 at T=0.6".into()));
    for (row, t, want) in [("1 <= T < 1.5", 1.0, 0.5), ("T >= 1.5", 1.5, 1.0)] {
        let a = alpha((3 - i0(t)?).max(1))?.alpha;
        cells.push(cell(row, PERF, a, Some(want), tol, Check::Equal, format!("alpha(3 - i0) at T={t}")));
        cells.push(cell(row, CR, a, Some(want), tol, Check::Equal, format!("alpha(3 - i0) at T={t}")));
    }
    Ok(Table { id: "n3".into(), title: "three requests".into(), key: "delay", cells })
}

const N4_ROWS: [&str; 6] = ["T < 1/6", "1/6 <= T < 1/5", "1/5 <= T < 1/4", "1/4 <= T < 1/3", "1/3 <= T < 1/2", "1/2 <= T < 1"];

/// Printed values of the four-request table; the 4-decimal entries carry
/// their own tolerance.
fn n4_golden(mode: TreeMode) -> [(f64, Option<f64>); 6] {
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    match mode {
        TreeMode::Performance => [(0.25, None), (0.25, None), (0.25, None), (0.25, None), (2.0 - s3, None), (1.0 - s2 / 2.0, None)],
        TreeMode::Competitive => [(0.25, None), (0.2578, Some(5e-4)), (2.0 - s3, Some(5e-4)), (0.2803, Some(5e-4)), (1.0 - s2 / 2.0, Some(5e-4)), (0.3177, Some(5e-4))],
    }
}

fn n4(tol: f64) -> Result<Table, CliError> {
    let mut cells = Vec::new();
    for (i, row) in N4_ROWS.iter().enumerate() {
        for (mode, column) in [(TreeMode::Performance, PERF), (TreeMode::Competitive, CR)] {
            let reg = regimes(mode)[i];
            let (golden, own) = n4_golden(mode)[i];
            let v = tree_minimax(&reg).value;
            cells.push(cell(row, column, v, Some(golden), own.unwrap_or(1e-8_f64.max(tol)), Check::Equal, format!("tree_minimax {}", reg.id)));
        }
    }
    let g = 1.0 / (phi() * phi());
    for (row, t, want) in [("1 <= T < 1.5", 1.0, g), ("1.5 <= T < 5/3", 1.5, 0.5), ("T >= 5/3", 5.0 / 3.0 + 1e-9, 1.0)] {
        let a = alpha((4 - i0(t)?).max(1))?.alpha;
        cells.push(cell(row, PERF, a, Some(want), tol, Check::Equal, format!("alpha(4 - i0) at T={t}")));
        cells.push(cell(row, CR, a, Some(want), tol, Check::Equal, format!("alpha(4 - i0) at T={t}")));
    }
    Ok(Table { id: "n4".into(), title: "four requests".into(), key: "delay", cells })
}

fn alpha_table(n: usize, tol: f64) -> Result<Table, CliError> {
    let golden = [1.0, 0.5, 1.0 / (phi() * phi()), 1.0 / 3.0];
    let mut cells = Vec::new();
    for k in 1..=n.max(4) {
        let v = alpha(k)?.alpha;
        let g = golden.get(k - 1).copied();
        let check = if g.is_some() { Check::Equal } else { Check::Info };
        cells.push(cell(&k.to_string(), "alpha", v, g, tol, check, format!("alpha({k})")));
    }
    Ok(Table { id: "alpha".into(), title: "alpha sequence".into(), key: "n", cells })
}

/// Builds one table. `n` applies to `summary` and `alpha`.
pub fn build(id: &str, n: usize, seed: u64, tol: f64) -> Result<Table, CliError> {
    match id {
        "summary" => summary(n, seed, tol),
        "n3" => n3(tol),
        "n4" => n4(tol),
        "alpha" => alpha_table(n, tol),
        other => Err(CliError::Usage(format!("unknown table {other}; expected one of {}", TABLE_IDS.join(", ")))),
    }
}
