//! B-splines `H_j` as exact piecewise polynomials and iterated forward
//! differences `T^j_h`.

use crate::error::{invalid, Error, Result};
use crate::smooth::{directional_derivative, Smooth};
use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

/// `H_j` on `[0, j]`: piece `i` is a polynomial in `u = t - i`, `u ∈ [0, 1]`,
/// stored by ascending coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSpline {
    pub j: u32,
    pieces: Vec<Vec<f64>>,
}

fn poly_eval(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * u + k)
}

/// Antiderivative vanishing at zero.
fn poly_integral(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (k, &v) in c.iter().enumerate() {
        out[k + 1] = v / (k + 1) as f64;
    }
    out
}

impl BSpline {
    pub fn new(j: u32) -> Result<Self> {
        if j < 1 {
            return Err(invalid("j", "B-spline order must be at least 1"));
        }
        let mut pieces = vec![vec![1.0]];
        for _ in 1..j {
            // H_{k+1}(i + u) = Q_i(u) + Q_{i-1}(1) - Q_{i-1}(u), Q_i = ∫_0^u piece_i
            let prims: Vec<Vec<f64>> = pieces.iter().map(|p| poly_integral(p)).collect();
            let k = pieces.len();
            let mut next = Vec::with_capacity(k + 1);
            for i in 0..=k {
                let mut c = vec![0.0; k + 1];
                if i < k {
                    for (d, v) in prims[i].iter().enumerate() {
                        c[d] += v;
                    }
                }
                if i > 0 {
                    let q = &prims[i - 1];
                    c[0] += poly_eval(q, 1.0);
                    for (d, v) in q.iter().enumerate() {
                        c[d] -= v;
                    }
                }
                next.push(c);
            }
            pieces = next;
        }
        Ok(BSpline { j, pieces })
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn eval(&self, t: f64) -> f64 {
        // H_1 is the indicator of the open interval (0, 1)
        if self.j == 1 {
            return if t > 0.0 && t < 1.0 { 1.0 } else { 0.0 };
        }
        if !(t > 0.0 && t < self.j as f64) {
            return 0.0;
        }
        let i = (t.floor() as usize).min(self.pieces.len() - 1);
        poly_eval(&self.pieces[i], t - i as f64)
    }

    /// Exact integral over `[0, j]` from the piece antiderivatives.
    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| poly_eval(&poly_integral(p), 1.0)).sum()
    }

    /// `∫ g(t) H_j(t) dt`, Gauss–Legendre on each unit piece.
    pub fn integrate_against(&self, nodes: usize, g: impl Fn(f64) -> f64) -> f64 {
        let rule = GaussLegendre::new(nodes.max(2).try_into().expect("nonzero node count"));
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| rule.integrate(0.0, 1.0, |u| g(i as f64 + u) * poly_eval(p, u)))
            .sum()
    }

    /// `(H_1 * H_j)(t) = ∫_{t-1}^{t} H_j(s) ds`, evaluated from the piece
    /// antiderivatives; used to check the recursion.
    pub fn convolve_indicator(&self, t: f64) -> f64 {
        let cumulative = |s: f64| -> f64 {
            if s <= 0.0 {
                return 0.0;
            }
            let top = s.min(self.j as f64);
            let full = top.floor() as usize;
            let mut acc: f64 = self.pieces[..full.min(self.pieces.len())]
                .iter()
                .map(|p| poly_eval(&poly_integral(p), 1.0))
                .sum();
            if full < self.pieces.len() {
                acc += poly_eval(&poly_integral(&self.pieces[full]), top - full as f64);
            }
            acc
        };
        cumulative(t) - cumulative(t - 1.0)
    }
}

pub fn bspline_eval(j: i64, t: f64) -> Result<f64> {
    if j < 1 {
        return Err(invalid("j", "B-spline order must be at least 1"));
    }
    Ok(BSpline::new(j as u32)?.eval(t))
}

/// `T^j_h f(x)` by the recursion `T^{j+1}_h = T^j_h ∘ T^1_h`.
pub fn difference_op(f: &dyn Fn(&[f64]) -> f64, h: &[f64], j: u32, x: &[f64]) -> f64 {
    if j == 0 {
        return f(x);
    }
    let step = |y: &[f64]| -> f64 {
        let shifted: Vec<f64> = y.iter().zip(h).map(|(a, b)| a + b).collect();
        f(&shifted) - f(y)
    };
    difference_op(&step, h, j - 1, x)
}

pub fn difference_op_1d(f: impl Fn(f64) -> f64, h: f64, j: u32, x: f64) -> f64 {
    difference_op(&|y: &[f64]| f(y[0]), &[h], j, &[x])
}

/// Both sides of `T^j_h f(x) = ∫ f^{(j)}(x + t h) h^j H_j(t) dt` for a
/// one-variable generator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SplineIdentity {
    pub recursion: f64,
    pub quadrature: f64,
}

impl SplineIdentity {
    pub fn gap(&self) -> f64 {
        (self.recursion - self.quadrature).abs()
    }
}

pub fn spline_identity(f: &dyn Smooth, h: f64, j: u32, x: f64) -> Result<SplineIdentity> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("spline identity is one-dimensional".into()));
    }
    let spline = BSpline::new(j)?;
    let recursion = difference_op_1d(|y| f.value(&[y]).re, h, j, x);
    let nodes = 24 + j as usize;
    let quadrature = h.powi(j as i32)
        * spline.integrate_against(nodes, |t| directional_derivative(f, &[x + t * h], &[1.0], j as usize).re);
    Ok(SplineIdentity { recursion, quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Polynomial;
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    #[test]
    fn low_orders() {
        assert_eq!(bspline_eval(1, 0.5).unwrap(), 1.0);
        assert_eq!(bspline_eval(1, 1.5).unwrap(), 0.0);
        assert_eq!(bspline_eval(2, 1.0).unwrap(), 1.0);
        assert_eq!(bspline_eval(2, 0.5).unwrap(), 0.5);
        assert!(bspline_eval(0, 0.5).is_err());
        // cubic B-spline at its centre: 2/3
        assert!((bspline_eval(4, 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unit_integral_and_support() {
        for j in 1..=8 {
            let s = BSpline::new(j).unwrap();
            assert!((s.integral() - 1.0).abs() <= 1e-12, "j={j}");
            assert_eq!(s.eval(-1e-9), 0.0);
            assert_eq!(s.eval(j as f64 + 1e-9), 0.0);
            assert!(s.eval(j as f64 / 2.0) > 0.0);
        }
    }

    #[test]
    fn convolution_recursion() {
        for j in 1..8 {
            let s = BSpline::new(j).unwrap();
            let next = BSpline::new(j + 1).unwrap();
            for k in 1..200 {
                let t = k as f64 * (j + 1) as f64 / 200.0;
                assert!((next.eval(t) - s.convolve_indicator(t)).abs() <= 1e-12, "j={j} t={t}");
            }
        }
    }

    #[test]
    fn differences() {
        let sq = difference_op_1d(|x| x * x, 0.5, 1, 1.0);
        assert!((sq - 1.25).abs() < 1e-15);
        let cubic = |x: f64| 3.0 * x * x * x - 2.0 * x * x + 5.0 * x - 7.0;
        assert_eq!(difference_op_1d(cubic, 0.25, 4, 1.5), 0.0);
        // two variables: x y is annihilated by T^3
        let f = |p: &[f64]| p[0] * p[1];
        assert_eq!(difference_op(&f, &[0.5, 0.25], 3, &[1.0, -2.0]), 0.0);
    }

    #[test]
    fn identity_on_cubic() {
        let f = Polynomial::monomial(1, &[3], C64::new(1.0, 0.0));
        let r = spline_identity(&f, 0.3, 2, 0.7).unwrap();
        // T^2 x^3 = 6 h^2 (x + h)
        assert!((r.recursion - 6.0 * 0.09 * 1.0).abs() < 1e-12);
        assert!(r.gap() <= 1e-10);
    }

    proptest! {
        #[test]
        fn annihilates_low_degree(coeffs in prop::collection::vec(-4i32..=4, 1..6), x in -8i32..8, h in 1i32..8) {
            // dyadic data keep every operation exact
            let deg = coeffs.len() - 1;
            let f = |t: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64);
            let (x, h) = (x as f64 / 4.0, h as f64 / 8.0);
            prop_assert_eq!(difference_op_1d(f, h, deg as u32 + 1, x), 0.0);
        }

        #[test]
        fn identity_on_polynomials(coeffs in prop::collection::vec(-2.0f64..2.0, 1..8), j in 1u32..=3, x in -1.0f64..1.0, h in -0.8f64..0.8) {
            let mut p = Polynomial::zero(1);
            for (d, &c) in coeffs.iter().enumerate() {
                p.add_term(vec![d as u32], C64::new(c, 0.0));
            }
            let r = spline_identity(&p, h, j, x).unwrap();
            prop_assert!(r.gap() <= 1e-10, "gap {}", r.gap());
        }
    }
}
