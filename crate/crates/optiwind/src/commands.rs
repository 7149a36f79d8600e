//! Command implementations behind the binary. Each returns its text and JSON
//! forms; the caller decides which to print and where `--out` goes.

use std::path::{Path, PathBuf};

use optiwind_core::adversaries::{adversary_by_name, space_for};
use optiwind_core::duel::{best_scripted_response, duel, DuelReport};
use optiwind_core::game::run_instance;
use optiwind_core::numerics::{
    alpha, i0, reference_values, regime_by_id, regimes, thresholds, tree_minimax, weighted_lambda_with, LambdaMode,
    TreeMode, BETA_CAP,
};
use optiwind_core::offline::{brute_force, solve};
use optiwind_core::policies::{policy_by_name, PolicyParams};
use optiwind_core::{competitive_ratio, performance, GameConfig};
use serde_json::{json, Value};

use crate::corpus::{corpus, CorpusSpec};
use crate::error::CliError;
use crate::format::{instance_to_json, read_instance, trace_lines, trace_summary};
use crate::tables::{self, TABLE_IDS};

#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub json: Value,
    /// Written to `--out` when given.
    pub artifact: Option<String>,
    /// Reported after printing; decides the exit code.
    pub failure: Option<CliError>,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Self { text, json, ..Default::default() }
    }
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn simulate(path: &Path, policy: &str, n: Option<usize>, eps: Option<f64>, with_offline: bool, tol: f64) -> Result<Output, CliError> {
    let instance = read_instance(path)?;
    let n = n.unwrap_or(instance.len().max(1));
    if instance.len() > n {
        return Err(CliError::Usage(format!("instance has {} requests but --n is {n}", instance.len())));
    }
    let params = PolicyParams::new(n, instance.delay, eps)?;
    let mut p = policy_by_name(policy, &params, eps)?;
    let trace = run_instance(&instance, &mut p)?;
    trace.verify()?;
    let perf = performance(&trace);
    let mut text = trace_summary(&trace);
    let mut js = json!({
        "policy": policy,
        "served": trace.served.iter().map(|s| s.0).collect::<Vec<_>>(),
        "performance": perf,
    });
    if with_offline {
        let opt = solve(&instance, tol)?;
        let ratio = if opt.value > 0.0 { competitive_ratio(&trace, opt.value)? } else { 1.0 };
        text.push_str(&format!("offline={} ratio={}\n", opt.value, ratio));
        js["offline"] = json!(opt.value);
        js["ratio"] = json!(ratio);
    }
    let mut out = Output::new(text, js);
    out.artifact = Some(trace_lines(&trace));
    Ok(out)
}

fn report_text(adversary: &str, policy: &str, n: usize, t: f64, r: &DuelReport) -> String {
    let ratio = r.ratio.map_or("none".to_string(), |x| x.to_string());
    format!(
        "adversary={adversary}\npolicy={policy}\nn={n}\nT={t}\nreleased={}\nserved={}\nperformance={}\noffline={}\nratio={ratio}\ncertified={}\n",
        r.trace.requests.len(),
        list(&r.trace.served.iter().map(|s| s.0).collect::<Vec<_>>()),
        r.performance,
        r.offline.value,
        r.certified
    )
}

/// `policy = "best"` searches every keep/switch script of length `n - 1`.
pub fn duel_cmd(adversary: &str, policy: &str, n: usize, t: f64, eps: Option<f64>, tol: f64) -> Result<Output, CliError> {
    let config = GameConfig::new(n, t, space_for(adversary)).with_tol(tol);
    let (label, report) = if policy == "best" {
        let (script, r) = best_scripted_response(&config, n.saturating_sub(1), || adversary_by_name(adversary, n, t, eps))?;
        let s: String = script.iter().map(|&b| if b { 's' } else { 'k' }).collect();
        (format!("best[{s}]"), r)
    } else {
        let mut adv = adversary_by_name(adversary, n, t, eps)?;
        let params = PolicyParams::new(n, t, None)?;
        let mut p = policy_by_name(policy, &params, eps.filter(|_| policy == "al3"))?;
        (policy.to_string(), duel(&config, &mut p, &mut adv)?)
    };
    let js = json!({
        "adversary": adversary,
        "policy": label,
        "n": n,
        "T": t,
        "released": report.trace.requests.len(),
        "served": report.trace.served.iter().map(|s| s.0).collect::<Vec<_>>(),
        "performance": report.performance,
        "offline": report.offline.value,
        "ratio": report.ratio,
        "certified": report.certified,
    });
    let mut out = Output::new(report_text(adversary, &label, n, t, &report), js);
    out.artifact = Some(instance_to_json(&report.trace.instance()) + "\n");
    Ok(out)
}

pub fn offline_cmd(path: &Path, brute: bool, tol: f64) -> Result<Output, CliError> {
    let instance = read_instance(path)?;
    let s = if brute { brute_force(&instance, tol)? } else { solve(&instance, tol)? };
    let text = format!("value={}\norder={}\nserve_times={}\n", s.value, list(&s.order), list(&s.serve_times));
    Ok(Output::new(text, json!({ "value": s.value, "order": s.order, "serve_times": s.serve_times })))
}

pub fn alpha_cmd(n: usize, vector: bool) -> Result<Output, CliError> {
    let s = alpha(n)?;
    let mut text = format!("n={n}\nalpha={}\nresidual={:e}\n", s.alpha, s.residual);
    if vector {
        text.push_str(&format!("deltas={}\n", list(&s.deltas)));
    }
    Ok(Output::new(text, json!({ "n": n, "alpha": s.alpha, "residual": s.residual, "deltas": s.deltas })))
}

pub fn parse_lambda_mode(s: &str) -> Result<LambdaMode, CliError> {
    match s {
        "raw" => Ok(LambdaMode::Raw),
        "closed" => Ok(LambdaMode::ClosedBase),
        "simplified" => Ok(LambdaMode::Simplified),
        _ => Err(CliError::Usage(format!("unknown recursion mode {s}; expected raw, closed or simplified"))),
    }
}

pub fn beta_cmd(n: usize, delta0: f64, mode: LambdaMode) -> Result<Output, CliError> {
    if n > BETA_CAP {
        return Err(CliError::Usage(format!("beta is computed for n <= {BETA_CAP}, got {n}")));
    }
    let q = weighted_lambda_with(n, delta0, mode)?;
    let d2 = q.delta2.map_or("none".to_string(), |x| x.to_string());
    let text = format!("n={n}\ndelta0={delta0}\nvalue={}\ndelta2={d2}\n", q.value);
    Ok(Output::new(text, json!({ "n": n, "delta0": delta0, "value": q.value, "delta2": q.delta2 })))
}

pub fn parse_tree_mode(s: &str) -> Result<TreeMode, CliError> {
    match s {
        "perf" | "performance" => Ok(TreeMode::Performance),
        "cr" | "competitive" => Ok(TreeMode::Competitive),
        _ => Err(CliError::Usage(format!("unknown mode {s}; expected perf or cr"))),
    }
}

pub fn minimax_cmd(regime: &str, mode: TreeMode) -> Result<Output, CliError> {
    let reg = regime_by_id(mode, regime).map_err(|_| {
        let ids: Vec<&str> = regimes(mode).iter().map(|r| r.id).collect();
        CliError::Usage(format!("unknown regime {regime}; expected one of {}", ids.join(", ")))
    })?;
    let idx = regimes(mode).iter().position(|r| r.id == reg.id).expect("listed");
    let s = tree_minimax(&reg);
    let reference = reference_values(mode)[idx];
    let d3 = s.delta3.map_or("none".to_string(), |x| x.to_string());
    let text = format!(
        "regime={}\nvalue={}\nreference={}\ndelta2={}\ndelta3={d3}\ndelta3p={}\ndropped={}\n",
        reg.id,
        s.value,
        reference,
        s.delta2,
        s.delta3p,
        reg.drops.names().join(",")
    );
    Ok(Output::new(
        text,
        json!({ "regime": reg.id, "value": s.value, "reference": reference, "delta2": s.delta2, "delta3": s.delta3, "delta3p": s.delta3p }),
    ))
}

pub fn thresholds_cmd(n: usize, t: Option<f64>) -> Result<Output, CliError> {
    let th = thresholds(n)?;
    let mut text = format!("n={n}\nT0={}\nT1={}\nepsilon={}\n", th.t0, th.t1, th.epsilon);
    let mut js = json!({ "n": n, "T0": th.t0, "T1": th.t1, "epsilon": th.epsilon });
    if let Some(t) = t {
        let k = i0(t)?;
        text.push_str(&format!("i0={k}\n"));
        js["i0"] = json!(k);
    }
    Ok(Output::new(text, js))
}

/// `id = "all"` builds every table.
pub fn tables_cmd(id: &str, n: usize, seed: u64, tol: f64) -> Result<Output, CliError> {
    let ids: Vec<&str> = if id == "all" { TABLE_IDS.to_vec() } else { vec![id] };
    let mut text = String::new();
    let mut js = Vec::new();
    let mut failed = Vec::new();
    for id in ids {
        let t = tables::build(id, n, seed, tol)?;
        text.push_str(&t.render());
        text.push('\n');
        for c in t.failures() {
            failed.push(format!("{}/{}/{}: {} vs {:?}", t.id, c.row, c.column, c.value, c.golden));
        }
        js.push(serde_json::to_value(&t).expect("table serializes"));
    }
    let mut out = Output::new(text, Value::Array(js));
    if !failed.is_empty() {
        out.failure = Some(CliError::Tolerance(format!("cells outside tolerance:\n{}", failed.join("\n"))));
    }
    Ok(out)
}

/// Writes `count` seeded segment instances into `dir`.
pub fn generate_cmd(dir: &Path, n: usize, t: f64, count: usize, seed: u64) -> Result<Output, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<PathBuf> = Vec::new();
    for (k, inst) in corpus(seed, count, &CorpusSpec::segment(n, t)).iter().enumerate() {
        let path = dir.join(format!("instance_{k:04}.json"));
        std::fs::write(&path, instance_to_json(inst) + "\n")?;
        files.push(path);
    }
    let text = format!("wrote={}\ndir={}\n", files.len(), dir.display());
    Ok(Output::new(text, json!({ "files": files })))
}
