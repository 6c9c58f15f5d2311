//! Double-double scalar (about 32 significant digits) used as a
//! high-precision finite-difference oracle.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use hexrl::scalar::Scalar;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DD {
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

impl DD {
    pub fn new(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    fn norm(hi: f64, lo: f64) -> DD {
        let (hi, lo) = quick_two_sum(hi, lo);
        DD { hi, lo }
    }

    fn scale(self, s: f64) -> DD {
        DD { hi: self.hi * s, lo: self.lo * s }
    }
}

impl PartialEq for DD {
    fn eq(&self, o: &DD) -> bool {
        self.hi == o.hi && self.lo == o.lo
    }
}

impl PartialOrd for DD {
    fn partial_cmp(&self, o: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            ord => ord,
        }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        DD::norm(s, e + f)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, o: DD) -> DD {
        self + -o
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        DD::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        // Long division: two f64 quotient digits plus a correction.
        let q1 = self.hi / o.hi;
        let r = self - o * DD::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DD::new(q2);
        let q3 = r.hi / o.hi;
        DD::norm(q1, q2) + DD::new(q3)
    }
}

impl Rem for DD {
    type Output = DD;
    fn rem(self, o: DD) -> DD {
        let q = (self / o).hi.trunc();
        self - o * DD::new(q)
    }
}

macro_rules! assign {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DD {
            fn $m(&mut self, o: DD) { *self = *self $op o; }
        }
    )*};
}

assign!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Zero for DD {
    fn zero() -> DD {
        DD::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DD {
    fn one() -> DD {
        DD::new(1.0)
    }
}

impl Num for DD {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<DD, Self::FromStrRadixErr> {
        s.parse().map(DD::new)
    }
}

impl FromPrimitive for DD {
    fn from_i64(n: i64) -> Option<DD> {
        Some(DD::new(n as f64))
    }
    fn from_u64(n: u64) -> Option<DD> {
        Some(DD::new(n as f64))
    }
    fn from_f64(n: f64) -> Option<DD> {
        Some(DD::new(n))
    }
}

impl ToPrimitive for DD {
    fn to_i64(&self) -> Option<i64> {
        Some(self.hi as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        Some(self.hi as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

const LN2: DD = DD { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

impl Scalar for DD {
    fn exp(self) -> DD {
        if self.hi < -700.0 {
            return DD::zero();
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * DD::new(k)).scale(1.0 / 1024.0);
        let mut term = DD::one();
        let mut sum = DD::one();
        for n in 1..=14 {
            term = (term * r) / DD::new(n as f64);
            sum += term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.scale(2f64.powi(k as i32))
    }

    fn ln(self) -> DD {
        // Newton on e^y = x starting from the f64 logarithm; two steps reach full precision.
        let mut y = DD::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DD::one();
        }
        y
    }

    fn sqrt(self) -> DD {
        if self.hi <= 0.0 {
            return DD::zero();
        }
        let y = DD::new(self.hi.sqrt());
        y + (self - y * y) / (y + y)
    }

    fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    // The acceptance binary has no test harness, so nothing here is used there.
    #[allow(unused_imports)]
    use super::*;

    #[test]
    fn arithmetic_and_exp_are_double_double_accurate() {
        let third = DD::one() / DD::new(3.0);
        assert!((third * DD::new(3.0) - DD::one()).abs().hi < 1e-31);
        // e to 32 digits: 2.7182818284590452353602874713527. The ten squarings
        // in exp amplify the series error by about 2^10.
        let e = DD::one().exp();
        let want = DD { hi: std::f64::consts::E, lo: 1.4456468917292502e-16 };
        assert!((e - want).abs().hi < 1e-28);
        let x = DD::new(0.37);
        assert!((x.exp().ln() - x).abs().hi < 1e-28);
        assert!((DD::new(-3.5).exp() * DD::new(3.5).exp() - DD::one()).abs().hi < 1e-28);
        let s = DD::new(2.0).sqrt();
        assert!((s * s - DD::new(2.0)).abs().hi < 1e-30);
    }
}
