//! Policy against adversary, scored against the offline optimum of whatever
//! the adversary released.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::adversaries::{adversary_by_name, space_for};
use crate::error::{Error, Result};
use crate::game::{competitive_ratio, performance, run_game, Adversary, GameConfig, GameTrace, Policy};
use crate::offline::{self, OfflineSolution};
use crate::policies::{policy_by_name, PolicyParams, Scripted};

#[derive(Clone, Debug, PartialEq)]
pub struct DuelReport {
    pub trace: GameTrace,
    pub offline: OfflineSolution,
    pub performance: f64,
    /// `None` when nothing could be served offline.
    pub ratio: Option<f64>,
    /// Whether the adversary promised an offline schedule serving everything.
    pub certified: bool,
}

/// Plays one game and scores it. A broken certificate is an error.
pub fn duel<P: Policy + ?Sized, A: Adversary + ?Sized>(
    config: &GameConfig,
    policy: &mut P,
    adversary: &mut A,
) -> Result<DuelReport> {
    let trace = run_game(config, policy, adversary)?;
    trace.verify()?;
    let instance = trace.instance();
    let offline = offline::solve(&instance, config.tol)?;
    let certified = adversary.offline_serves_all();
    if certified && !offline.serves_all(&instance) {
        return Err(Error::Numeric(format!(
            "{}: offline schedule serves {} of {} requests",
            adversary.name(),
            offline.order.len(),
            instance.len()
        )));
    }
    let ratio = if offline.value > 0.0 { Some(competitive_ratio(&trace, offline.value)?) } else { None };
    Ok(DuelReport { performance: performance(&trace), trace, offline, ratio, certified })
}

/// [`duel`] with both sides taken from the registries.
pub fn duel_by_name(
    policy: &str,
    adversary: &str,
    n: usize,
    delay: f64,
    eps: Option<f64>,
    tol: f64,
) -> Result<DuelReport> {
    let mut adv = adversary_by_name(adversary, n, delay, eps)?;
    let params = PolicyParams::new(n, delay, None)?;
    let mut pol = policy_by_name(policy, &params, None)?;
    let config = GameConfig::new(n, delay, space_for(adversary)).with_tol(tol);
    duel(&config, &mut pol, &mut adv)
}

/// Best performance any keep/switch script of length `depth` reaches against
/// fresh copies of an adversary. Ties keep the first script in
/// [`Scripted::all`] order.
pub fn best_scripted_response(
    config: &GameConfig,
    depth: usize,
    mut make: impl FnMut() -> Result<Box<dyn Adversary>>,
) -> Result<(Vec<bool>, DuelReport)> {
    let mut best: Option<(Vec<bool>, DuelReport)> = None;
    for script in Scripted::all(depth) {
        let mut adv = make()?;
        let report = duel(config, &mut Scripted::new(script.clone()), &mut adv)?;
        if best.as_ref().is_none_or(|(_, b)| report.performance > b.performance) {
            best = Some((script, report));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("no scripts to try".into()))
}
