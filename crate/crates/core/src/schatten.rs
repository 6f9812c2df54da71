//! Singular spectra of kernel matrices and Schatten–von Neumann norms.

use crate::error::{Error, Result};
use crate::grid::{check_p, lp_norm, pairing, SymbolField};
use crate::quantization::{build_kernel, OperatorKernel};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Descending singular values of `h^n K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub sigma: Vec<f64>,
    /// Quadrature factor absorbed into the matrix before decomposition.
    pub scale: f64,
    /// `max |U Σ V* - M|` of the decomposition.
    pub residual: f64,
}

/// Singular values together with singular vectors, `M = U diag(σ) V*`.
#[derive(Clone, Debug)]
pub struct SingularTriplets {
    pub spectrum: SingularSpectrum,
    pub u: DMatrix<C64>,
    pub v: DMatrix<C64>,
}

/// SVD of an explicit matrix; `scale` is recorded, not applied.
pub fn decompose(m: &DMatrix<C64>, scale: f64) -> Result<SingularTriplets> {
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("kernel matrix".into()));
    }
    let (rows, cols) = m.shape();
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence { rows, cols })?;
    let u = svd.u.ok_or(Error::NoConvergence { rows, cols })?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence { rows, cols })?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k].max(0.0)).collect();
    let u = DMatrix::from_fn(rows, order.len(), |i, j| u[(i, order[j])]);
    let v = DMatrix::from_fn(cols, order.len(), |i, j| v_t[(order[j], i)].conj());

    let s = DMatrix::from_fn(sigma.len(), sigma.len(), |i, j| {
        if i == j {
            C64::new(sigma[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let rebuilt = &u * s * v.adjoint();
    let residual = (rebuilt - m).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let top = sigma.first().copied().unwrap_or(0.0);
    if residual > 1e-10 * top.max(f64::MIN_POSITIVE) && residual > 1e-300 {
        return Err(Error::Numeric(format!(
            "SVD of {rows}x{cols} matrix reconstructs with residual {residual:e} (σ1 = {top:e})"
        )));
    }
    Ok(SingularTriplets {
        spectrum: SingularSpectrum {
            sigma,
            scale,
            residual,
        },
        u,
        v,
    })
}

pub fn singular_triplets(kernel: &OperatorKernel) -> Result<SingularTriplets> {
    let scale = kernel.grid.grid().cell_volume();
    decompose(&kernel.scaled_matrix(), scale)
}

pub fn singular_values(kernel: &OperatorKernel) -> Result<SingularSpectrum> {
    Ok(singular_triplets(kernel)?.spectrum)
}

/// `(Σ σ^p)^{1/p}`, or `σ_1` for `p = ∞`.
pub fn schatten_norm(spec: &SingularSpectrum, p: f64) -> Result<f64> {
    check_p(p)?;
    let top = spec.sigma.iter().copied().fold(0.0, f64::max);
    if top == 0.0 || p.is_infinite() {
        return Ok(top);
    }
    let s: f64 = spec.sigma.iter().map(|s| (s / top).powf(p)).sum();
    Ok(top * s.powf(1.0 / p))
}

/// `s_p(a)`: the Schatten norm of the Weyl operator of `a`.
pub fn weyl_schatten(a: &SymbolField, p: f64) -> Result<f64> {
    check_p(p)?;
    schatten_norm(&singular_values(&build_kernel(a, 0.5)?)?, p)
}

/// Relative gap between `s_2(a)` and `(2π)^{-n/2} |a|_{L²}`.
pub fn hs_identity_gap(a: &SymbolField) -> Result<f64> {
    let rhs = (2.0 * PI).powf(-(a.grid.n as f64) / 2.0) * lp_norm(a, 2.0)?;
    if rhs == 0.0 {
        return Err(Error::Domain("relative gap undefined for the zero symbol".into()));
    }
    let lhs = weyl_schatten(a, 2.0)?;
    Ok((lhs - rhs).abs() / rhs)
}

/// `(Σ_j |(K f_j, g_j)|^p)^{1/p}` for matched columns of `f` and `g`.
pub fn on_sequence_value(m: &DMatrix<C64>, f: &DMatrix<C64>, g: &DMatrix<C64>, p: f64) -> Result<f64> {
    check_p(p)?;
    if f.ncols() != g.ncols() || f.nrows() != m.ncols() || g.nrows() != m.nrows() {
        return Err(Error::GridMismatch("sequence shapes do not match the kernel".into()));
    }
    let kf = m * f;
    let vals: Vec<f64> = (0..f.ncols())
        .map(|j| g.column(j).dotc(&kf.column(j)).norm())
        .collect();
    if p.is_infinite() {
        return Ok(vals.into_iter().fold(0.0, f64::max));
    }
    Ok(vals.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p))
}

fn random_orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let z = DMatrix::from_fn(rows, cols, |_, _| {
        let (re, im): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
        C64::new(re, im)
    });
    z.qr().q()
}

/// Largest `(Σ|(Kf_j, g_j)|^p)^{1/p}` over `trials` pairs of random
/// orthonormal sequences. Never exceeds the Schatten norm.
pub fn on_sequence_lower_bound(kernel: &OperatorKernel, p: f64, trials: usize, seed: u64) -> Result<f64> {
    check_p(p)?;
    if trials == 0 {
        return Err(crate::error::invalid("trials", "must be at least 1"));
    }
    let m = kernel.scaled_matrix();
    let size = m.nrows();
    let len = size.min(256);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let f = random_orthonormal(size, len, &mut rng);
        let g = random_orthonormal(size, len, &mut rng);
        best = best.max(on_sequence_value(&m, &f, &g, p)?);
    }
    Ok(best)
}

/// `tr(Op(a) Op(b)*) = (2π)^{-n} ∫ a conj(b)`, the pairing under which
/// `s_p` and `s_p'` are dual.
pub fn weyl_pairing(a: &SymbolField, b: &SymbolField) -> Result<C64> {
    Ok(pairing(a, b)? * (2.0 * PI).powi(-(a.grid.n as i32)))
}

/// `2^n s_1(a) - |a|_∞`.
pub fn lone_infinity_bound_gap(a: &SymbolField) -> Result<f64> {
    let s1 = weyl_schatten(a, 1.0)?;
    Ok(2f64.powi(a.grid.n as i32) * s1 - lp_norm(a, f64::INFINITY)?)
}
