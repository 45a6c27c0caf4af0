//! Degree-2 truncated Taylor arithmetic in `n` variables.

use crate::scalar::Field;

/// Value, gradient and Hessian of a scalar at a point.
///
/// The Hessian is stored dense and row-major; it is symmetric by construction
/// of every operation below.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<S> {
    pub value: S,
    pub grad: Vec<S>,
    pub hess: Vec<S>,
}

/// Real jet returned by [`super::eval_jet2`].
pub type Jet2Value = Jet2<f64>;

impl<S: Field> Jet2<S> {
    pub fn constant(value: S, n: usize) -> Self {
        Self { value, grad: vec![S::zero(); n], hess: vec![S::zero(); n * n] }
    }

    pub fn variable(value: S, index: usize, n: usize) -> Self {
        let mut j = Self::constant(value, n);
        j.grad[index] = S::one();
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn d(&self, i: usize) -> S {
        self.grad[i]
    }

    pub fn dd(&self, i: usize, j: usize) -> S {
        self.hess[i * self.dim() + j]
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            value: f(self.value),
            grad: self.grad.iter().map(|&x| f(x)).collect(),
            hess: self.hess.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    fn zip(&self, o: &Self, f: impl Fn(S, S) -> S) -> Self {
        Self {
            value: f(self.value, o.value),
            grad: self.grad.iter().zip(&o.grad).map(|(&a, &b)| f(a, b)).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.dim();
        let (a, b) = (self.value, o.value);
        let grad = (0..n).map(|i| a * o.grad[i] + b * self.grad[i]).collect();
        let mut hess = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                hess.push(a * o.hess[k] + b * self.hess[k] + self.grad[i] * o.grad[j] + o.grad[i] * self.grad[j]);
            }
        }
        Self { value: a * b, grad, hess }
    }

    /// Applies a scalar function given its value and first two derivatives at
    /// `self.value`.
    pub fn compose(&self, f: S, df: S, ddf: S) -> Self {
        let n = self.dim();
        let grad = self.grad.iter().map(|&g| df * g).collect();
        let mut hess = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                hess.push(df * self.hess[i * n + j] + ddf * self.grad[i] * self.grad[j]);
            }
        }
        Self { value: f, grad, hess }
    }

    pub fn recip(&self) -> Self {
        let u = self.value;
        let r = S::one() / u;
        self.compose(r, -(r * r), (r * r * r).scale(2.0))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::constant(S::one(), self.dim()),
            1 => self.clone(),
            k if k < 0 => self.powi(-k).recip(),
            k => {
                let u = self.value;
                let lower = u.powi(k - 2);
                let kf = k as f64;
                self.compose(lower * u * u, (lower * u).scale(kf), lower.scale(kf * (kf - 1.0)))
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|x| x.is_finite()) && self.hess.iter().all(|x| x.is_finite())
    }

    /// Drops the Hessian.
    pub fn first_order(&self) -> (S, Vec<S>) {
        (self.value, self.grad.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_bilinear() {
        let x = Jet2::variable(2.0, 0, 2);
        let y = Jet2::variable(3.0, 1, 2);
        let p = x.mul(&y);
        assert_eq!(p.value, 6.0);
        assert_eq!(p.grad, vec![3.0, 2.0]);
        assert_eq!(p.hess, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn powers_match_products() {
        let x = Jet2::variable(1.5, 0, 1);
        let cube = x.mul(&x).mul(&x);
        let p = x.powi(3);
        assert!((cube.value - p.value).abs() < 1e-15);
        assert!((cube.grad[0] - p.grad[0]).abs() < 1e-14);
        assert!((cube.hess[0] - p.hess[0]).abs() < 1e-14);
        let inv = x.powi(-2);
        assert!((inv.grad[0] + 2.0 / 1.5f64.powi(3)).abs() < 1e-14);
    }
}
