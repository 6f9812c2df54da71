//! Truncated univariate Taylor series.
//!
//! A [`Jet`] of order `K` stores the coefficients `c_0..c_K` of
//! `s -> f(X + sY)` around `s = 0`. Generators evaluate their formulas on
//! jets to obtain exact directional derivatives of any order.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<C64>,
}

impl Jet {
    pub fn constant(v: C64, order: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = v;
        Jet { c }
    }

    pub fn real(v: f64, order: usize) -> Self {
        Self::constant(C64::new(v, 0.0), order)
    }

    /// The affine jet `x0 + s * dir`.
    pub fn variable(x0: f64, dir: f64, order: usize) -> Self {
        let mut j = Self::real(x0, order);
        if order >= 1 {
            j.c[1] = C64::new(dir, 0.0);
        }
        j
    }

    pub fn zero(order: usize) -> Self {
        Self::real(0.0, order)
    }

    pub fn from_coeffs(c: Vec<C64>) -> Self {
        assert!(!c.is_empty());
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    /// `d^k/ds^k f(X + sY)` at `s = 0`.
    pub fn derivative(&self, k: usize) -> C64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn scale(&self, a: C64) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add_const(&self, a: C64) -> Jet {
        let mut out = self.clone();
        out.c[0] += a;
        out
    }

    pub fn exp(&self) -> Jet {
        let k_max = self.order();
        let mut e = vec![C64::new(0.0, 0.0); k_max + 1];
        e[0] = self.c[0].exp();
        for k in 1..=k_max {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Jet { c: e }
    }

    /// Principal power `f^alpha`; requires a nonzero constant term.
    pub fn powf(&self, alpha: f64) -> Jet {
        let k_max = self.order();
        let f0 = self.c[0];
        let mut p = vec![C64::new(0.0, 0.0); k_max + 1];
        p[0] = f0.powf(alpha);
        for k in 1..=k_max {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * p[k - j] * ((alpha + 1.0) * j as f64 - k as f64);
            }
            p[k] = acc / (f0 * k as f64);
        }
        Jet { c: p }
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Jet {
        self.powf(-1.0)
    }

    pub fn powi(&self, e: u32) -> Jet {
        let mut out = Jet::real(1.0, self.order());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let k_max = self.order().min(rhs.order());
        let mut c = vec![C64::new(0.0, 0.0); k_max + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * rhs.c[k - j];
            }
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_linear_matches_series() {
        // exp(2 + 3s) = e^2 * sum (3s)^k / k!
        let j = Jet::variable(2.0, 3.0, 5).exp();
        let mut fact = 1.0;
        for k in 0..=5 {
            if k > 0 {
                fact *= k as f64;
            }
            let want = 2f64.exp() * 3f64.powi(k as i32) / fact;
            assert!((j.coeffs()[k].re - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn powf_matches_binomial() {
        // (1 + s)^(-1/2)
        let j = Jet::variable(1.0, 1.0, 4).powf(-0.5);
        let want = [1.0, -0.5, 0.375, -0.3125, 0.2734375];
        for (c, w) in j.coeffs().iter().zip(want) {
            assert!((c.re - w).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_scales_by_factorial() {
        let x = Jet::variable(0.5, 1.0, 3);
        let cube = &(&x * &x) * &x;
        assert!((cube.derivative(3).re - 6.0).abs() < 1e-14);
        assert!((cube.derivative(1).re - 0.75).abs() < 1e-14);
    }
}
