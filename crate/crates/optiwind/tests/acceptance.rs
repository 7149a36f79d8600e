//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion with its
//! runtime, then fails if any criterion failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::{Duration, Instant};

use optiwind::corpus::{corpus, mixed_corpus, CorpusSpec};
use optiwind::format::{instance_to_json, parse_instance, trace_lines};
use optiwind_core::adversaries::{adversary_by_name, Driver, StarCounterexample};
use optiwind_core::duel::{best_scripted_response, duel, duel_by_name};
use optiwind_core::game::{can_serve_two, run_game, run_instance, EventKind, FixedInstance, GameView, Policy};
use optiwind_core::numerics::{
    alpha, alpha_sequence, beta, i0, regimes, thresholds, tree_minimax, weighted_lambda_with, LambdaMode, TreeMode,
};
use optiwind_core::offline::{brute_force, solve};
use optiwind_core::policies::{policy_by_name, Gr0, PolicyParams, Scripted, POLICY_NAMES};
use optiwind_core::{performance, scale_weights, GameConfig, Instance, MetricSpace, Point, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (u32, Duration, fn() -> Check);

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn inv_phi_sq() -> f64 {
    1.0 / (golden() * golden())
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, want {want} within {tol}"))
    }
}

fn criterion_1() -> Check {
    let want = [1.0, 0.5, inv_phi_sq(), 1.0 / 3.0];
    for (n, w) in (1..=4).zip(want) {
        close(&format!("alpha({n})"), alpha(n).map_err(|e| e.to_string())?.alpha, w, 1e-9)?;
    }
    let vectors: [(usize, Vec<f64>); 3] = [(2, vec![1.0, 1.0]), (3, vec![1.0, golden(), golden()]), (4, vec![1.0, 2.0, 3.0, 3.0])];
    for (n, v) in vectors {
        let d = alpha(n).map_err(|e| e.to_string())?.deltas;
        for (i, (a, b)) in d.iter().zip(&v).enumerate() {
            close(&format!("alpha({n}) delta[{i}]"), *a, *b, 1e-8)?;
        }
    }
    Ok("alpha(1..4) and realizing vectors".into())
}

fn criterion_2() -> Check {
    let seq = alpha_sequence(25).map_err(|e| e.to_string())?;
    for w in seq.windows(2) {
        if !(w[1].alpha < w[0].alpha) {
            return Err(format!("alpha({}) = {} is not below alpha({}) = {}", w[1].n, w[1].alpha, w[0].n, w[0].alpha));
        }
    }
    if let Some(s) = seq.iter().find(|s| !(s.alpha > 0.25)) {
        return Err(format!("alpha({}) = {} <= 1/4", s.n, s.alpha));
    }
    let (a10, a25) = (seq[9].alpha, seq[24].alpha);
    if !(a25 - 0.25 < a10 - 0.25) {
        return Err(format!("alpha(25) - 1/4 = {} not below alpha(10) - 1/4 = {}", a25 - 0.25, a10 - 0.25));
    }
    Ok(format!("alpha(25) = {a25:.10}"))
}

fn criterion_3() -> Check {
    let l3 = |d: f64| 2.0 / (3.0 + d + (d * d + 2.0 * d + 5.0).sqrt());
    let l4 = |d: f64| 2.0 / (4.0 + d + (d * d + 8.0).sqrt());
    let proof_variant = |d: f64| 2.0 / (3.0 + d + (d * d + 4.0 * d + 5.0).sqrt());
    let mut worst: f64 = 0.0;
    for d in [0.0, 0.5, 1.0, 2.0] {
        let r3 = weighted_lambda_with(3, d, LambdaMode::Raw).map_err(|e| e.to_string())?.value;
        let r4 = weighted_lambda_with(4, d, LambdaMode::Raw).map_err(|e| e.to_string())?.value;
        close(&format!("lambda(3, {d})"), r3, l3(d), 1e-8)?;
        close(&format!("lambda(4, {d})"), r4, l4(d), 1e-8)?;
        worst = worst.max((r3 - l3(d)).abs()).max((r4 - l4(d)).abs());
        if d > 0.0 && (r3 - proof_variant(d)).abs() < 1e-6 {
            return Err(format!("recursion does not separate the 2δ0 and 4δ0 variants at δ0 = {d}"));
        }
    }
    Ok(format!("raw recursion vs closed forms, max deviation {worst:.1e}; 2δ0 coefficient confirmed"))
}

fn criterion_4() -> Check {
    close("beta(3)", beta(3).map_err(|e| e.to_string())?, inv_phi_sq(), 1e-9)?;
    close("beta(4)", beta(4).map_err(|e| e.to_string())?, 1.0 - 2f64.sqrt() / 2.0, 1e-9)?;
    let b5 = beta(5).map_err(|e| e.to_string())?;
    let full = weighted_lambda_with(5, 0.0, LambdaMode::Raw).map_err(|e| e.to_string())?.value;
    let simple = weighted_lambda_with(5, 0.0, LambdaMode::Simplified).map_err(|e| e.to_string())?.value;
    close("beta(5) raw vs closed base", full, b5, 1e-9)?;
    close("beta(5) simplified vs full", simple, full, 1e-9)?;
    Ok(format!("beta(5) = {b5:.10}"))
}

/// Independent grid oracle for the four-request tree.
mod grid {
    use optiwind_core::numerics::TreeMode;

    #[derive(Clone, Copy)]
    pub struct Released {
        f3: bool,
        f4: bool,
        f4p: bool,
        f4pp: bool,
        f4ppp: bool,
    }

    pub fn released(mode: TreeMode, idx: usize) -> Released {
        let all = Released { f3: true, f4: true, f4p: true, f4pp: true, f4ppp: true };
        match (mode, idx) {
            (TreeMode::Performance, 0..=3) => all,
            (TreeMode::Performance, 4) => Released { f4: false, ..all },
            (TreeMode::Performance, _) => Released { f3: false, f4: false, f4p: false, ..all },
            (TreeMode::Competitive, 0) => all,
            (TreeMode::Competitive, 1) => Released { f4pp: false, ..all },
            (TreeMode::Competitive, 2) => Released { f4: false, ..all },
            (TreeMode::Competitive, 3) => Released { f4: false, f4pp: false, ..all },
            (TreeMode::Competitive, 4) => Released { f4: false, f4ppp: false, ..all },
            (TreeMode::Competitive, _) => Released { f3: false, f4: false, f4p: false, f4pp: false, ..all },
        }
    }

    fn w(on: bool, x: f64) -> f64 {
        if on {
            x
        } else {
            0.0
        }
    }

    fn keep(r: Released, d2: f64, d3: f64) -> f64 {
        if !r.f3 {
            return 1.0 / (1.0 + d2);
        }
        (1.0 / (1.0 + d2 + d3 + w(r.f4, 1.0))).max(d3 / (1.0 + d2 + d3 + w(r.f4p, d3)))
    }

    fn switch(r: Released, d2: f64, d3p: f64) -> f64 {
        (d3p / (1.0 + d2 + d3p + w(r.f4pp, d3p))).max(d2 / (1.0 + d2 + d3p + w(r.f4ppp, d2)))
    }

    fn grid_min(f: impl Fn(f64) -> f64, points: usize) -> f64 {
        let (mut a, mut b) = (1e-3f64.ln(), 1e3f64.ln());
        let mut best = f64::INFINITY;
        for _ in 0..4 {
            let h = (b - a) / (points - 1) as f64;
            let mut k_best = 0;
            for k in 0..points {
                let v = f((a + h * k as f64).exp());
                if v < best {
                    best = v;
                    k_best = k;
                }
            }
            let c = a + h * k_best as f64;
            a = c - h;
            b = c + h;
        }
        best
    }

    pub fn value(r: Released) -> f64 {
        grid_min(|d2| grid_min(|d3| keep(r, d2, d3), 200).max(grid_min(|d3p| switch(r, d2, d3p), 200)), 200)
    }
}

fn criterion_5() -> Check {
    let perf = regimes(TreeMode::Performance);
    let cr = regimes(TreeMode::Competitive);
    let exact = [(3, 0.25), (4, 2.0 - 3f64.sqrt()), (5, 1.0 - 2f64.sqrt() / 2.0)];
    for (i, want) in exact {
        close(&format!("performance {}", perf[i].id), tree_minimax(&perf[i]).value, want, 1e-8)?;
    }
    let printed = [0.2578, 0.2679, 0.2803, 0.2929, 0.3177];
    for (i, want) in printed.iter().enumerate() {
        close(&format!("competitive {}", cr[i + 1].id), tree_minimax(&cr[i + 1]).value, *want, 5e-4)?;
    }
    let mut worst: f64 = 0.0;
    for (mode, regs) in [(TreeMode::Performance, &perf), (TreeMode::Competitive, &cr)] {
        for (i, reg) in regs.iter().enumerate() {
            let eq = tree_minimax(reg).value;
            let g = grid::value(grid::released(mode, i));
            close(&format!("{mode:?} {} grid oracle", reg.id), eq, g, 5e-4)?;
            worst = worst.max((eq - g).abs());
        }
    }
    Ok(format!("equalization vs grid max gap {worst:.1e}"))
}

struct Probe<P> {
    inner: P,
    two: bool,
}

impl<P: Policy> Policy for Probe<P> {
    fn name(&self) -> &str {
        "probe"
    }
    fn decide(&mut self, view: &GameView<'_>) -> Point {
        if matches!(view.event, EventKind::RequestReleased(_)) {
            self.two |= can_serve_two(&view.vehicle, &view.open_list(), view.space(), view.tol());
        }
        self.inner.decide(view)
    }
}

fn criterion_6() -> Check {
    let e = |e: optiwind_core::Error| e.to_string();
    let tol = DEFAULT_TOL;
    for n in 3..=5 {
        let r = duel_by_name("gr0", "no_delay", n, 0.0, None, tol).map_err(e)?;
        if r.offline.order.len() != n {
            return Err(format!("(a) offline serves {} of {n}", r.offline.order.len()));
        }
        close(&format!("(a) no_delay n={n}"), r.ratio.unwrap_or(f64::NAN), 1.0 / n as f64, 1e-12)?;
    }
    let r = duel_by_name("gr0", "small_delay_perf", 5, 0.1, None, tol).map_err(e)?;
    close("(b) small_delay_perf", r.performance, 0.2, 1e-12)?;
    let r = duel_by_name("gr0", "small_delay_cr", 4, 0.15, Some(0.01), tol).map_err(e)?;
    close("(c) small_delay_cr", r.ratio.unwrap_or(f64::NAN), 0.25, 1e-12)?;
    let eps = 1e-4;
    let r = duel_by_name("gr1", "large_delay", 4, 1.0, Some(eps), tol).map_err(e)?;
    let a3 = alpha(3).map_err(e)?.alpha;
    if !(r.performance >= a3 && r.performance <= a3 + 10.0 * eps) {
        return Err(format!("(d) large_delay performance {} outside [{a3}, {}]", r.performance, a3 + 10.0 * eps));
    }
    let cfg = GameConfig::new(3, 0.6, MetricSpace::segment());
    for script in [vec![false], vec![true]] {
        let mut adv = adversary_by_name("n3_golden", 3, 0.6, None).map_err(e)?;
        let r = duel(&cfg, &mut Scripted::new(script.clone()), &mut adv).map_err(e)?;
        close(&format!("(e) n3_golden {script:?}"), r.ratio.unwrap_or(f64::NAN), inv_phi_sq(), 1e-9)?;
    }
    let cfg = GameConfig::new(4, 0.4, MetricSpace::segment());
    let (_, best) = best_scripted_response(&cfg, 3, || adversary_by_name("n4_medium", 4, 0.4, None)).map_err(e)?;
    close("(f) n4_medium best response", best.performance, 2.0 - 3f64.sqrt(), 1e-8)?;
    let r = duel_by_name("gr0", "star_counterexample", 5, 0.22, None, tol).map_err(e)?;
    close("(g) star_counterexample", r.performance, 0.2, 1e-12)?;
    let cfg = GameConfig::new(5, 0.22, MetricSpace::segment());
    let mut adv = Driver::new(StarCounterexample::on_segment(0.22, None).map_err(e)?);
    let mut probe = Probe { inner: Gr0, two: false };
    duel(&cfg, &mut probe, &mut adv).map_err(e)?;
    if !probe.two {
        return Err("(g) segment embedding never offered two serves".into());
    }
    Ok("(a)-(g)".into())
}

const SEED: u64 = 2024;

fn random_instances(rng: &mut ChaCha8Rng, count: usize, mut draw: impl FnMut(&mut ChaCha8Rng) -> (usize, f64)) -> Vec<Instance> {
    (0..count)
        .map(|_| {
            let (n, t) = draw(rng);
            let spec = CorpusSpec { vary_len: true, ..CorpusSpec::segment(n, t) };
            corpus(rng.gen(), 1, &spec).pop().expect("one")
        })
        .collect()
}

fn min_performance(policy: &str, n_of: impl Fn(&Instance) -> usize, insts: &[Instance]) -> Result<Vec<(f64, usize, f64)>, String> {
    let mut out = Vec::new();
    for inst in insts {
        let n = n_of(inst);
        let params = PolicyParams::new(n, inst.delay, None).map_err(|e| e.to_string())?;
        let mut p = policy_by_name(policy, &params, None).map_err(|e| e.to_string())?;
        let tr = run_instance(inst, &mut p).map_err(|e| e.to_string())?;
        out.push((performance(&tr), n, inst.delay));
    }
    Ok(out)
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let budget: Vec<usize> = (0..1000).map(|_| rng.gen_range(2..=8)).collect();
    let mut k = 0;
    let gr0 = random_instances(&mut rng, 1000, |r| {
        k += 1;
        (budget[k - 1], r.gen_range(0.0..2.5))
    });
    for (perf, n, t) in min_performance("gr0", |i| i.len().max(2), &gr0)? {
        if perf < 1.0 / n as f64 - 1e-9 {
            return Err(format!("GR0 performance {perf} < 1/{n} at T={t}"));
        }
    }

    let gr1 = random_instances(&mut rng, 1000, |r| (r.gen_range(2..=8), r.gen_range(1.0..2.0)));
    let mut gr1_min = f64::INFINITY;
    for inst in &gr1 {
        let n = inst.len().max(2);
        let bound = alpha(n.saturating_sub(i0(inst.delay).map_err(|e| e.to_string())?).max(1)).map_err(|e| e.to_string())?.alpha;
        let params = PolicyParams::new(n, inst.delay, None).map_err(|e| e.to_string())?;
        let mut p = policy_by_name("gr1", &params, None).map_err(|e| e.to_string())?;
        let perf = performance(&run_instance(inst, &mut p).map_err(|e| e.to_string())?);
        if perf < bound - 1e-9 {
            return Err(format!("GR1 performance {perf} < alpha = {bound} at n={n}, T={}: {}", inst.delay, instance_to_json(inst)));
        }
        gr1_min = gr1_min.min(perf - bound);
    }

    let mut al1_margin = f64::INFINITY;
    for n in [4usize, 5, 6] {
        let th = thresholds(n).map_err(|e| e.to_string())?;
        let insts = random_instances(&mut rng, 1000, |_| (n, th.t0));
        for (perf, _, _) in min_performance("al1", |_| n, &insts)? {
            let bound = 1.0 / n as f64 + th.epsilon;
            if perf < bound - 1e-9 {
                return Err(format!("Al1 performance {perf} < 1/{n} + eps = {bound} at T0"));
            }
            al1_margin = al1_margin.min(perf - bound);
        }
    }
    Ok(format!("GR0 x1000, GR1 x1000 (min slack {gr1_min:.3}), Al1 x3000 (min slack {al1_margin:.3})"))
}

fn criterion_8() -> Check {
    let mut insts = mixed_corpus(SEED + 1, 500, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    insts.extend((0..500).map(|_| {
        let spec = CorpusSpec::segment(rng.gen_range(1..=8), rng.gen_range(0.0..1.0));
        corpus(rng.gen(), 1, &spec).pop().expect("one")
    }));
    for inst in &insts {
        let a = solve(inst, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let b = brute_force(inst, DEFAULT_TOL).map_err(|e| e.to_string())?;
        if a.value != b.value {
            return Err(format!("solve {} != brute force {} on {}", a.value, b.value, instance_to_json(inst)));
        }
    }
    Ok(format!("{} instances, exact equality", insts.len()))
}

fn criterion_9() -> Check {
    let insts = mixed_corpus(SEED + 3, 1000, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut games = 0;
    for inst in &insts {
        inst.validate(DEFAULT_TOL).map_err(|e| format!("generated instance rejected: {e}"))?;
        if inst.len() >= 2 && inst.delay > 0.01 {
            let mut bad = inst.clone();
            bad.requests[1].release = bad.requests[0].release + inst.delay / 2.0;
            for r in 2..bad.requests.len() {
                bad.requests[r].release = bad.requests[r - 1].release + inst.delay;
            }
            if bad.validate(DEFAULT_TOL).is_ok() {
                return Err("delay violation accepted by validate".into());
            }
            let cfg = GameConfig::for_instance(&bad);
            if run_game(&cfg, &mut Gr0, &mut FixedInstance::new(&bad)).is_ok() {
                return Err("engine accepted a release inside the delay".into());
            }
        }

        let back = parse_instance(&instance_to_json(inst)).map_err(|e| e.to_string())?;
        let c = [0.5, 3.0, rng.gen_range(0.01..100.0)][rng.gen_range(0..3)];
        let scaled = scale_weights(inst, c).map_err(|e| e.to_string())?;
        let params = PolicyParams::new(inst.len().max(3), inst.delay, None).map_err(|e| e.to_string())?;
        for name in POLICY_NAMES {
            let mk = || policy_by_name(name, &params, None).map_err(|e| e.to_string());
            let tr = run_instance(inst, &mut mk()?).map_err(|e| e.to_string())?;
            tr.verify().map_err(|e| format!("{name}: {e}"))?;
            let tb = run_instance(&back, &mut mk()?).map_err(|e| e.to_string())?;
            if trace_lines(&tr) != trace_lines(&tb) {
                return Err(format!("{name}: round trip changed the game"));
            }
            games += 2;
        }
        let mut g0 = Gr0;
        let mut g1 = Gr0;
        let ha = run_instance(inst, &mut g0).map_err(|e| e.to_string())?.headings();
        let hb = run_instance(&scaled, &mut g1).map_err(|e| e.to_string())?.headings();
        if ha != hb {
            return Err(format!("GR0 headings changed under scaling by {c}"));
        }
        let a = solve(inst, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let b = solve(&scaled, DEFAULT_TOL).map_err(|e| e.to_string())?;
        if a.order != b.order {
            return Err(format!("offline argmax changed under scaling by {c}"));
        }
    }
    Ok(format!("{} instances, {games} games", insts.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        (1, Duration::from_secs(1), criterion_1),
        (2, Duration::from_secs(5), criterion_2),
        (3, Duration::from_secs(10), criterion_3),
        (4, Duration::from_secs(60), criterion_4),
        (5, Duration::from_secs(60), criterion_5),
        (6, Duration::from_secs(30), criterion_6),
        (7, Duration::from_secs(120), criterion_7),
        (8, Duration::from_secs(120), criterion_8),
        (9, Duration::from_secs(120), criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, limit, f) in criteria {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let res = match res {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:?}, limit {limit:?}")),
            other => other,
        };
        match res {
            Ok(msg) => println!("criterion {id}: PASS ({:.3} s) {msg}", took.as_secs_f64()),
            Err(msg) => {
                println!("criterion {id}: FAIL ({:.3} s) {msg}", took.as_secs_f64());
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
