//! Minimal double-double arithmetic (about 106 significant bits) for the
//! cancellation-prone hypergeometric sums.

use std::ops::{Add, Div, Mul};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    DoubleDouble { hi: s, lo: err }
}

fn quick_two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    DoubleDouble {
        hi: s,
        lo: b - (s - a),
    }
}

fn two_prod(a: f64, b: f64) -> DoubleDouble {
    let p = a * b;
    DoubleDouble {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl DoubleDouble {
    pub(crate) fn hi(self) -> f64 {
        self.hi
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;

    fn add(self, rhs: DoubleDouble) -> DoubleDouble {
        let s = two_sum(self.hi, rhs.hi);
        let t = two_sum(self.lo, rhs.lo);
        let v = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(v.hi, v.lo + t.lo)
    }
}

impl Add<f64> for DoubleDouble {
    type Output = DoubleDouble;

    fn add(self, rhs: f64) -> DoubleDouble {
        self + DoubleDouble::from(rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;

    fn mul(self, rhs: DoubleDouble) -> DoubleDouble {
        let p = two_prod(self.hi, rhs.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * rhs.lo + self.lo * rhs.hi))
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;

    /// Long division with one correction step.
    fn div(self, rhs: DoubleDouble) -> DoubleDouble {
        let q1 = self.hi / rhs.hi;
        let r = self + DoubleDouble::from(-1.0) * (rhs * DoubleDouble::from(q1));
        let q2 = r.hi / rhs.hi;
        let r = r + DoubleDouble::from(-1.0) * (rhs * DoubleDouble::from(q2));
        let q3 = r.hi / rhs.hi;
        quick_two_sum(q1, q2) + q3
    }
}

pub(crate) fn sum(a: f64, b: f64) -> DoubleDouble {
    two_sum(a, b)
}

pub(crate) fn product(a: f64, b: f64) -> DoubleDouble {
    two_prod(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_f64() {
        let big = DoubleDouble::from(1e16);
        let x = (big + 1.0) + (-1e16);
        assert_eq!(x.to_f64(), 1.0);
        let third = DoubleDouble::from(1.0) / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0) + (-1.0);
        assert!(back.to_f64().abs() < 1e-31);
        let p = product(1.0 + f64::EPSILON, 1.0 - f64::EPSILON) + (-1.0);
        assert_eq!(p.to_f64(), -f64::EPSILON * f64::EPSILON);
        assert_eq!(sum(0.1, 0.2).hi(), 0.1 + 0.2);
    }
}
