//! Second-order forward-mode differentiation.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to up to [`MAX_DIM`] independent variables. Field expressions are
//! written once against the [`Real`] trait and evaluated either on plain
//! `f64` (values only) or on `Jet` (exact first and second partials).

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Largest chart dimension supported by exact (jet) derivatives. Fields in
/// higher dimension fall back to finite differences.
pub const MAX_DIM: usize = 6;

/// Scalar arithmetic shared by `f64` and [`Jet`].
pub trait Real:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, p: i32) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn recip(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
}

impl Real for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    #[inline]
    fn powi(self, p: i32) -> Self {
        f64::powi(self, p)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// Value, gradient and Hessian of a scalar function of the chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; MAX_DIM],
    pub h: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet {
    pub const ZERO: Jet = Jet {
        v: 0.0,
        d: [0.0; MAX_DIM],
        h: [[0.0; MAX_DIM]; MAX_DIM],
    };

    pub fn constant(v: f64) -> Self {
        Jet { v, ..Jet::ZERO }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn var(value: f64, i: usize) -> Self {
        let mut j = Jet::constant(value);
        j.d[i] = 1.0;
        j
    }

    /// Seeds all coordinates of a point.
    pub fn seed(x: &[f64]) -> Vec<Jet> {
        assert!(x.len() <= MAX_DIM, "jet dimension {} exceeds {MAX_DIM}", x.len());
        x.iter().enumerate().map(|(i, &v)| Jet::var(v, i)).collect()
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    #[inline]
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Jet::constant(f0);
        for i in 0..MAX_DIM {
            out.d[i] = f1 * self.d[i];
        }
        for i in 0..MAX_DIM {
            for j in 0..MAX_DIM {
                out.h[i][j] = f1 * self.h[i][j] + f2 * self.d[i] * self.d[j];
            }
        }
        out
    }

    #[inline]
    fn scale(mut self, s: f64) -> Self {
        self.v *= s;
        for i in 0..MAX_DIM {
            self.d[i] *= s;
            for j in 0..MAX_DIM {
                self.h[i][j] *= s;
            }
        }
        self
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, o: Jet) -> Jet {
        self += o;
        self
    }
}

impl AddAssign for Jet {
    #[inline]
    fn add_assign(&mut self, o: Jet) {
        self.v += o.v;
        for i in 0..MAX_DIM {
            self.d[i] += o.d[i];
            for j in 0..MAX_DIM {
                self.h[i][j] += o.h[i][j];
            }
        }
    }
}

impl SubAssign for Jet {
    #[inline]
    fn sub_assign(&mut self, o: Jet) {
        self.v -= o.v;
        for i in 0..MAX_DIM {
            self.d[i] -= o.d[i];
            for j in 0..MAX_DIM {
                self.h[i][j] -= o.h[i][j];
            }
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, o: Jet) -> Jet {
        self -= o;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..MAX_DIM {
            out.d[i] = self.v * o.d[i] + o.v * self.d[i];
        }
        for i in 0..MAX_DIM {
            for j in 0..MAX_DIM {
                out.h[i][j] = self.v * o.h[i][j]
                    + o.v * self.h[i][j]
                    + self.d[i] * o.d[j]
                    + o.d[i] * self.d[j];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, o: f64) -> Jet {
        self.v += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, o: f64) -> Jet {
        self.v -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: f64) -> Jet {
        self.scale(o)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, o: f64) -> Jet {
        self.scale(1.0 / o)
    }
}

impl Real for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn powf(self, p: f64) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    fn powi(self, p: i32) -> Self {
        let x = self.v;
        let pf = p as f64;
        let f1 = if p == 0 { 0.0 } else { pf * x.powi(p - 1) };
        let f2 = if p == 0 || p == 1 {
            0.0
        } else {
            pf * (pf - 1.0) * x.powi(p - 2)
        };
        self.chain(x.powi(p), f1, f2)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn recip(self) -> Self {
        let x = self.v;
        let r = 1.0 / x;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

/// Squared Euclidean norm of a coordinate tuple.
pub fn norm2<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &xi| acc + xi * xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Real>(x: &[T]) -> T {
        (x[0] * x[1]).sin() + x[2].exp() / (x[0] * x[0] + 1.0) + x[1].powf(1.5) * x[2].sqrt()
    }

    #[test]
    fn jet_matches_finite_differences() {
        let x = [0.3, 1.7, 0.9];
        let j = f(&Jet::seed(&x));
        let h = 1e-4;
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((j.d[i] - fd).abs() < 1e-7, "d{i}: {} vs {}", j.d[i], fd);
            for k in 0..3 {
                let mut a = [x; 4];
                a[0][i] += h;
                a[0][k] += h;
                a[1][i] += h;
                a[1][k] -= h;
                a[2][i] -= h;
                a[2][k] += h;
                a[3][i] -= h;
                a[3][k] -= h;
                let fd2 = (f(&a[0]) - f(&a[1]) - f(&a[2]) + f(&a[3])) / (4.0 * h * h);
                assert!((j.h[i][k] - fd2).abs() < 1e-5, "h{i}{k}");
            }
        }
    }

    #[test]
    fn powi_edge_cases() {
        let x = Jet::var(2.0, 0);
        assert_eq!(x.powi(0).d[0], 0.0);
        assert_eq!(x.powi(1).d[0], 1.0);
        assert_eq!(x.powi(1).h[0][0], 0.0);
        assert_eq!(x.powi(3).h[0][0], 12.0);
    }
}
