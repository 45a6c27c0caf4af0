//! Number types shared by the expression evaluator and the tensor engine.
//!
//! The geometry code is written once, generically over [`Field`], and runs on
//! plain reals, on complex numbers (holomorphic calculus) and on dual numbers
//! (one extra directional derivative, used where third derivatives of a metric
//! are needed).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Minimal arithmetic needed by the dense linear algebra and tensor code.
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Size of the primal part. Used for pivoting and tolerance tests.
    fn magnitude(&self) -> f64;

    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }

    fn is_finite(&self) -> bool;

    fn powi(self, k: i32) -> Self {
        if k < 0 {
            return Self::one() / self.powi(-k);
        }
        let mut base = self;
        let mut acc = Self::one();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Field for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Field for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// First-order dual number `value + tangent·δ` with `δ² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub tangent: T,
}

impl<T: Field> Dual<T> {
    pub fn new(value: T, tangent: T) -> Self {
        Self { value, tangent }
    }

    pub fn constant(value: T) -> Self {
        Self { value, tangent: T::zero() }
    }

    fn chain(self, f: T, df: T) -> Self {
        Self { value: f, tangent: df * self.tangent }
    }
}

impl<T: Field> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.tangent + o.tangent)
    }
}

impl<T: Field> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.tangent - o.tangent)
    }
}

impl<T: Field> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.value * o.value, self.value * o.tangent + self.tangent * o.value)
    }
}

impl<T: Field> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        Self::new(q, (self.tangent - q * o.tangent) / o.value)
    }
}

impl<T: Field> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.tangent)
    }
}

impl<T: Field> Field for Dual<T> {
    fn from_f64(x: f64) -> Self {
        Self::constant(T::from_f64(x))
    }
    fn magnitude(&self) -> f64 {
        self.value.magnitude()
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.tangent.is_finite()
    }
}

/// Complex-valued scalars the expression language can be evaluated on.
pub trait Analytic: Field {
    /// Primal value, used for domain guards.
    fn primal(&self) -> Complex64;
    fn imaginary_unit() -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn re(self) -> Self;
    fn im(self) -> Self;
    fn conj(self) -> Self;
}

impl Analytic for Complex64 {
    fn primal(&self) -> Complex64 {
        *self
    }
    fn imaginary_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn re(self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    fn im(self) -> Self {
        Complex64::new(self.im, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

impl<T: Analytic> Analytic for Dual<T> {
    fn primal(&self) -> Complex64 {
        self.value.primal()
    }
    fn imaginary_unit() -> Self {
        Self::constant(T::imaginary_unit())
    }
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, T::one() / (r + r))
    }
    fn ln(self) -> Self {
        self.chain(self.value.ln(), T::one() / self.value)
    }
    fn re(self) -> Self {
        Self::new(self.value.re(), self.tangent.re())
    }
    fn im(self) -> Self {
        Self::new(self.value.im(), self.tangent.im())
    }
    fn conj(self) -> Self {
        Self::new(self.value.conj(), self.tangent.conj())
    }
}

/// Real scalar types with a complex counterpart the evaluator runs on.
pub trait RealField: Field + PartialOrd {
    type Complex: Analytic;

    fn complexify(self) -> Self::Complex;
    /// Real part of a complex counterpart value.
    fn real_part(c: Self::Complex) -> Self;
    /// Largest imaginary component carried by `c` (primal and tangents).
    fn imag_size(c: &Self::Complex) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn primal_f64(&self) -> f64;
}

impl RealField for f64 {
    type Complex = Complex64;

    fn complexify(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn real_part(c: Complex64) -> Self {
        c.re
    }
    fn imag_size(c: &Complex64) -> f64 {
        c.im.abs()
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn primal_f64(&self) -> f64 {
        *self
    }
}

impl PartialOrd for Dual<f64> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl RealField for Dual<f64> {
    type Complex = Dual<Complex64>;

    fn complexify(self) -> Dual<Complex64> {
        Dual::new(self.value.complexify(), self.tangent.complexify())
    }
    fn real_part(c: Dual<Complex64>) -> Self {
        Dual::new(c.value.re, c.tangent.re)
    }
    fn imag_size(c: &Dual<Complex64>) -> f64 {
        c.value.im.abs().max(c.tangent.im.abs())
    }
    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        Dual::new(r, self.tangent / (2.0 * r))
    }
    fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }
    fn primal_f64(&self) -> f64 {
        self.value
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_tracks_directional_derivative() {
        let x = Dual::new(Complex64::new(0.7, 0.0), Complex64::new(1.0, 0.0));
        let y = (x * x).sin();
        let expect = 2.0 * 0.7 * (0.49f64).cos();
        assert!((y.tangent.re - expect).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_products() {
        assert_eq!(3.0f64.powi(4), 81.0);
        assert_eq!(Field::powi(2.0f64, -2), 0.25);
        assert_eq!(Field::powi(0.0f64, 0), 1.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.total(), 1.0);
    }
}
