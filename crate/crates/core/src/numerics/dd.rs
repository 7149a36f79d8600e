//! Minimal double-double arithmetic for the α recurrence, where the last two
//! terms nearly cancel.

use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, Float::mul_add(a, b, -p))
}

impl Dd {
    pub const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.sub(Dd::new(q1).mul_f64(b));
        let q2 = r.hi / b;
        let r = r.sub(Dd::new(q2).mul_f64(b));
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::new(q3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_low_bits() {
        let a = Dd::new(1.0).add(Dd::new(1e-20));
        let b = a.sub(Dd::new(1.0));
        assert!((b.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn division_round_trip() {
        let x = Dd::new(1.0).div_f64(3.0).mul_f64(3.0);
        assert!((x.sub(Dd::new(1.0))).to_f64().abs() < 1e-30);
    }
}
