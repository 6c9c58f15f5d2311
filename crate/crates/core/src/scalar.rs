//! Scalar abstraction shared by the network, update-rule and oracle code.
//!
//! Everything numeric in the crate is written against [`Scalar`], which is
//! implemented for `f32`, `f64` and for the forward-mode [`Dual`] number. Running
//! the reverse-mode gradient code on `Dual<f64>` with tangents set to a direction
//! `w` yields the Hessian-vector product `H·w` exactly (forward-over-reverse).

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{FromPrimitive, Num, NumAssign, One, ToPrimitive, Zero};

/// A real-like number type usable throughout the crate.
pub trait Scalar:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + NumAssign
    + Neg<Output = Self>
    + FromPrimitive
    + ToPrimitive
{
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;

    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("scalar conversion from f64")
    }

    /// The primal (real) part as `f64`.
    fn real(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar conversion to f64")
    }

    /// Logistic sigmoid, evaluated without overflowing `exp`.
    fn sigmoid(self) -> Self {
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
    }

    /// `2·sigmoid(x) − 1`, the squashing used for every bounded layer; range (−1, 1).
    fn squash(self) -> Self {
        Self::lit(2.0) * self.sigmoid() - Self::one()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn exp(self) -> Self { num_traits::Float::exp(self) }
            #[inline]
            fn ln(self) -> Self { num_traits::Float::ln(self) }
            #[inline]
            fn sqrt(self) -> Self { num_traits::Float::sqrt(self) }
            #[inline]
            fn abs(self) -> Self { num_traits::Float::abs(self) }
            #[inline]
            fn lit(x: f64) -> Self { x as $t }
            #[inline]
            fn real(self) -> f64 { self as f64 }
        }
    )*};
}

impl_float_scalar!(f32, f64);

/// Forward-mode dual number `re + du·ε` with `ε² = 0`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, du: T) -> Self {
        Dual { re, du }
    }

    pub fn constant(re: T) -> Self {
        Dual { re, du: T::zero() }
    }
}

impl<T: Debug> Debug for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+{:?}ε", self.re, self.du)
    }
}

impl<T: Display> Display for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}ε", self.re, self.du)
    }
}

impl<T: Scalar> PartialOrd for Dual<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.re.partial_cmp(&other.re) {
            Some(Ordering::Equal) => self.du.partial_cmp(&other.du),
            ord => ord,
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.du + o.du)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.du - o.du)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.du + self.du * o.re)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        Dual::new(self.re * inv, (self.du * o.re - self.re * o.du) * inv * inv)
    }
}

impl<T: Scalar> Rem for Dual<T> {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        // x mod y = x − y·trunc(x/y); the truncated quotient is locally constant.
        let r = self.re % o.re;
        let q = (self.re - r) / o.re;
        Dual::new(r, self.du - q * o.du)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.du)
    }
}

macro_rules! impl_assign {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl<T: Scalar> $tr for Dual<T> {
            #[inline]
            fn $m(&mut self, o: Self) { *self = *self $op o; }
        }
    )*};
}

impl_assign!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.du.is_zero()
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Scalar> Num for Dual<T> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Dual::constant)
    }
}

impl<T: Scalar> FromPrimitive for Dual<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Dual::constant)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Dual::constant)
    }
    fn from_f64(n: f64) -> Option<Self> {
        <T as FromPrimitive>::from_f64(n).map(Dual::constant)
    }
}

impl<T: Scalar> ToPrimitive for Dual<T> {
    fn to_i64(&self) -> Option<i64> {
        self.re.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.re.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        ToPrimitive::to_f64(&self.re)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.du * e)
    }

    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.du / self.re)
    }

    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.du / (T::lit(2.0) * s))
    }

    fn abs(self) -> Self {
        if self.re < T::zero() {
            -self
        } else {
            self
        }
    }

    fn lit(x: f64) -> Self {
        Dual::constant(T::lit(x))
    }

    fn real(self) -> f64 {
        self.re.real()
    }
}

/// Dot product of two equally sized slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `y ← y + s·x`.
pub fn axpy<T: Scalar>(s: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_derivatives_of_elementary_functions() {
        let x = Dual::new(0.7_f64, 1.0);
        assert!((x.exp().du - 0.7_f64.exp()).abs() < 1e-15);
        assert!((x.ln().du - 1.0 / 0.7).abs() < 1e-15);
        assert!((x.sqrt().du - 0.5 / 0.7_f64.sqrt()).abs() < 1e-15);
        let s = x.sigmoid();
        assert!((s.du - s.re * (1.0 - s.re)).abs() < 1e-15);
        let q = (x * x) / (x + Dual::constant(1.0));
        // d/dx x²/(x+1) = (x² + 2x)/(x+1)²
        assert!((q.du - (0.49 + 1.4) / 1.7_f64.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn sigmoid_is_stable_for_large_inputs() {
        assert_eq!(800.0_f64.sigmoid(), 1.0);
        assert_eq!((-800.0_f64).sigmoid(), 0.0);
        let d = Dual::new(-800.0_f64, 1.0).sigmoid();
        assert!(d.du.is_finite());
        assert!(0.0_f64.squash().abs() < 1e-300);
    }
}
