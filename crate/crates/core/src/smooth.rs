//! Analytic generators: functions that can be evaluated anywhere together
//! with exact derivatives of any order.

use crate::jet::Jet;
use crate::symbols::Polynomial;
use num_complex::Complex64 as C64;
use std::fmt;

/// A smooth complex function on `R^dim` evaluated through Taylor jets.
pub trait Smooth: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Taylor jet of `s -> f(point + s * dir)` to the given order.
    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet;

    fn value(&self, point: &[f64]) -> C64 {
        let zero = vec![0.0; point.len()];
        self.jet(point, &zero, 0).value()
    }

    /// Radius of a closed origin-centred ball containing the support, when known.
    fn support_radius(&self) -> Option<f64> {
        None
    }

    /// Exact polynomial representation, if this generator is a polynomial.
    fn as_polynomial(&self) -> Option<&Polynomial> {
        None
    }
}

/// Coordinates of `point + s * dir` as jets.
pub fn coordinate_jets(point: &[f64], dir: &[f64], order: usize) -> Vec<Jet> {
    point
        .iter()
        .zip(dir)
        .map(|(&p, &d)| Jet::variable(p, d, order))
        .collect()
}

/// `d^k/ds^k f(point + s * dir)` at `s = 0`.
pub fn directional_derivative(f: &dyn Smooth, point: &[f64], dir: &[f64], k: usize) -> C64 {
    f.jet(point, dir, k).derivative(k)
}

/// Mixed partial derivative `∂^alpha f(point)` via polarization of directional
/// derivatives.
pub fn partial(f: &dyn Smooth, point: &[f64], alpha: &[u32]) -> C64 {
    let dim = point.len();
    assert_eq!(alpha.len(), dim);
    let axes: Vec<usize> = alpha
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| std::iter::repeat(i).take(a as usize))
        .collect();
    let order = axes.len();
    if order == 0 {
        return f.value(point);
    }
    if order == 1 {
        let mut e = vec![0.0; dim];
        e[axes[0]] = 1.0;
        return directional_derivative(f, point, &e, 1);
    }
    // F(v_1..v_N) = 2^{-(N-1)} sum_{eps, eps_1 = +1} (prod eps) * c_N(v_eps)
    let mut acc = C64::new(0.0, 0.0);
    let mut dir = vec![0.0; dim];
    for mask in 0u32..(1u32 << (order - 1)) {
        dir.iter_mut().for_each(|d| *d = 0.0);
        let mut sign = 1.0;
        for (slot, &axis) in axes.iter().enumerate() {
            let eps = if slot > 0 && (mask >> (slot - 1)) & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            sign *= eps;
            dir[axis] += eps;
        }
        let jet = f.jet(point, &dir, order);
        acc += jet.coeffs()[order] * sign;
    }
    acc / (1u64 << (order - 1)) as f64
}

/// All multi-indices of total order `k` in `dim` variables, in lexicographic order.
pub fn multi_indices(dim: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == dim - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            rec(dim, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, k, &mut Vec::new(), &mut out);
    out
}
