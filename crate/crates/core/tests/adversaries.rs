use optiwind_core::adversaries::{adversary_by_name, space_for, N4Medium, StarCounterexample, Driver, ADVERSARY_NAMES};
use optiwind_core::duel::{best_scripted_response, duel, duel_by_name};
use optiwind_core::game::{can_serve_two, EventKind, GameView, Policy};
use optiwind_core::policies::{Gr0, Scripted};
use optiwind_core::{Error, GameConfig, MetricSpace, Point};

const TOL: f64 = 1e-9;

fn golden_inv_sq() -> f64 {
    // 1/φ² = (3 - √5)/2
    (3.0 - 5f64.sqrt()) / 2.0
}

#[test]
fn zero_delay_ratio_is_one_over_n() {
    for n in 3..=5 {
        let r = duel_by_name("gr0", "no_delay", n, 0.0, None, TOL).unwrap();
        assert!(r.certified && r.offline.order.len() == n);
        assert!((r.ratio.unwrap() - 1.0 / n as f64).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn zero_delay_holds_against_every_policy() {
    for p in ["gr1", "al1", "al2", "al3"] {
        let r = duel_by_name(p, "no_delay", 4, 0.0, None, TOL).unwrap();
        assert!(r.ratio.unwrap() <= 0.25 + 1e-12, "{p}");
    }
}

#[test]
fn small_delay_performance_fifth() {
    let r = duel_by_name("gr0", "small_delay_perf", 5, 0.1, None, TOL).unwrap();
    assert_eq!(r.trace.requests.len(), 5);
    assert!((r.performance - 0.2).abs() < 1e-12);
}

#[test]
fn small_delay_ratio_quarter() {
    for p in ["gr0", "gr1", "al1", "al2", "al3"] {
        let r = duel_by_name(p, "small_delay_cr", 4, 0.15, Some(0.01), TOL).unwrap();
        assert!(r.certified);
        assert!((r.ratio.unwrap() - 0.25).abs() < 1e-12, "{p}: {:?}", r.ratio);
    }
}

#[test]
fn large_delay_pins_gr1_near_alpha3() {
    let eps = 1e-4;
    let r = duel_by_name("gr1", "large_delay", 4, 1.0, Some(eps), TOL).unwrap();
    let a3 = golden_inv_sq();
    assert!(r.performance >= a3 - 1e-6 && r.performance <= a3 + 10.0 * eps, "{}", r.performance);
}

#[test]
fn golden_both_branches() {
    let cfg = GameConfig::new(3, 0.6, MetricSpace::segment());
    for script in [vec![false], vec![true]] {
        let mut adv = adversary_by_name("n3_golden", 3, 0.6, None).unwrap();
        let r = duel(&cfg, &mut Scripted::new(script.clone()), &mut adv).unwrap();
        assert!((r.ratio.unwrap() - golden_inv_sq()).abs() < 1e-9, "{script:?}: {:?}", r.ratio);
    }
}

#[test]
fn medium_best_response() {
    for t in [1.0 / 3.0, 0.4, 0.49] {
        let cfg = GameConfig::new(4, t, MetricSpace::segment());
        let (_, best) = best_scripted_response(&cfg, 3, || adversary_by_name("n4_medium", 4, t, None)).unwrap();
        assert!((best.performance - (2.0 - 3f64.sqrt())).abs() < 1e-8, "T={t}: {}", best.performance);
    }
    let d2 = N4Medium::delta2();
    assert!((2.0 * d2.powi(3) - 3.0 * d2 - 1.0).abs() < 1e-12);
}

#[test]
fn star_holds_gr0_to_a_fifth() {
    let r = duel_by_name("gr0", "star_counterexample", 5, 0.22, None, TOL).unwrap();
    assert_eq!(r.trace.requests.len(), 5);
    assert!((r.performance - 0.2).abs() < 1e-12);
}

/// Wraps a policy and records whether two open requests were ever jointly
/// servable at a decision.
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

#[test]
fn star_schedule_on_segment_allows_two() {
    let cfg = GameConfig::new(5, 0.22, MetricSpace::segment());
    let mut adv = Driver::new(StarCounterexample::on_segment(0.22, None).unwrap());
    let mut probe = Probe { inner: Gr0, two: false };
    duel(&cfg, &mut probe, &mut adv).unwrap();
    assert!(probe.two);
}

#[test]
fn hypotheses_are_enforced() {
    let e = duel_by_name("gr0", "small_delay_perf", 5, 0.6, None, TOL).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)));
    assert!(matches!(adversary_by_name("large_delay", 4, 1.8, None), Err(Error::Precondition(_))));
    assert!(matches!(adversary_by_name("n4_medium", 4, 0.3, None), Err(Error::Precondition(_))));
    assert!(matches!(adversary_by_name("star_counterexample", 5, 0.3, None), Err(Error::Precondition(_))));
}

#[test]
fn every_registered_adversary_produces_valid_traces() {
    let cases = [
        ("no_delay", 4, 0.0),
        ("small_delay_perf", 4, 0.2),
        ("small_delay_cr", 5, 0.05),
        ("large_delay", 5, 1.2),
        ("n3_golden", 3, 0.75),
        ("n4_medium", 4, 0.45),
        ("star_counterexample", 5, 0.1),
    ];
    assert_eq!(cases.len(), ADVERSARY_NAMES.len());
    for (name, n, t) in cases {
        assert!(space_for(name) == MetricSpace::segment() || name == "star_counterexample");
        for p in ["gr0", "gr1", "al1", "al2", "al3", "idle"] {
            let r = duel_by_name(p, name, n, t, None, TOL).unwrap_or_else(|e| panic!("{name}/{p}: {e}"));
            assert!(r.trace.requests.len() <= n);
            assert!((0.0..=1.0).contains(&r.performance));
        }
    }
}
