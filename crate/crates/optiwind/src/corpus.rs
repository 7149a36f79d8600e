//! Seeded random instances. Locations favour the extreme points, where the
//! lower-bound constructions live, and gaps are often exactly the delay.

use optiwind_core::{Instance, MetricSpace, Point, RequestSpec, SpaceKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusSpec {
    pub space: MetricSpace,
    /// Exact request count, or up to it when `vary_len` is set.
    pub n: usize,
    pub vary_len: bool,
    pub delay: f64,
    /// Largest slack added on top of the delay between releases.
    pub max_extra: f64,
}

impl CorpusSpec {
    pub fn segment(n: usize, delay: f64) -> Self {
        Self { space: MetricSpace::segment(), n, vary_len: false, delay, max_extra: 1.5 }
    }
}

fn random_point(rng: &mut impl Rng, space: &MetricSpace) -> Point {
    let extremes = space.extreme_points();
    let roll: f64 = rng.gen();
    if roll < 0.5 && !extremes.is_empty() {
        return extremes[rng.gen_range(0..extremes.len())];
    }
    if roll < 0.6 {
        return space.origin();
    }
    match space.kind() {
        SpaceKind::Segment => Point::Segment(rng.gen_range(-1.0..=1.0)),
        SpaceKind::Star { branches } => Point::star(rng.gen_range(0..branches), rng.gen_range(0.0..=1.0)),
        SpaceKind::Circle => Point::Circle(rng.gen_range(0.0..4.0)),
    }
}

pub fn random_instance(rng: &mut impl Rng, spec: &CorpusSpec) -> Instance {
    let len = if spec.vary_len { rng.gen_range(1..=spec.n) } else { spec.n };
    let mut t = rng.gen_range(0.0..2.0);
    let mut requests = Vec::with_capacity(len);
    for i in 0..len {
        if i > 0 {
            let extra = if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.0..spec.max_extra) };
            t += spec.delay + extra;
        }
        let weight = if rng.gen_bool(0.4) { 1.0 } else { rng.gen_range(0.1..5.0) };
        requests.push(RequestSpec { location: random_point(rng, &spec.space), release: t, weight });
    }
    Instance::new(spec.space, spec.delay, requests)
}

/// `count` instances from one seed.
pub fn corpus(seed: u64, count: usize, spec: &CorpusSpec) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, spec)).collect()
}

/// A mixed corpus over all three spaces and a spread of delays, used for the
/// infrastructure checks.
pub fn mixed_corpus(seed: u64, count: usize, max_n: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces = [MetricSpace::segment(), MetricSpace::star(3).expect("valid"), MetricSpace::circle()];
    (0..count)
        .map(|_| {
            let spec = CorpusSpec {
                space: spaces[rng.gen_range(0..spaces.len())],
                n: max_n,
                vary_len: true,
                delay: rng.gen_range(0.0..2.5),
                max_extra: 1.5,
            };
            random_instance(&mut rng, &spec)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_valid() {
        let spec = CorpusSpec::segment(6, 0.3);
        let a = corpus(7, 50, &spec);
        assert_eq!(a, corpus(7, 50, &spec));
        for i in &a {
            assert_eq!(i.len(), 6);
            i.validate(1e-9).unwrap();
        }
        for i in mixed_corpus(3, 100, 8) {
            i.validate(1e-9).unwrap();
        }
    }
}
