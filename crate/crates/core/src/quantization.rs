//! Dense kernels of `Op_t(a)`, their action on grid functions, changes of
//! quantization and the truncated exponential expansion.
//!
//! The kernel of `Op_t(a)` is
//! `K(x, y) = (2π)^{-n} ∫ a((1-t)x + ty, ξ) e^{i<x-y, ξ>} dξ`, discretized by
//! a Riemann sum over a frequency lattice chosen by [`FrequencyRule`].

use crate::error::{invalid, Error, Result};
use crate::fourier::{fourier, Direction};
use crate::grid::{ConfigGrid, Field, FunctionField, Grid, SymbolField};
use crate::symbols::{arc, Generator};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Frequency lattice used for the `ξ` integral of the kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyRule {
    /// The `ξ` axes of the symbol's phase grid (spacing `h`, range `[-L, L)`).
    /// No wrap-around in `x - y` as long as `N > 2L²/π`; accurate for
    /// symbols that decay inside the box.
    #[default]
    PhaseGrid,
    /// The DFT-dual lattice of the configuration grid (spacing `π/L`). The
    /// kernel is `2L`-periodic in `x - y`, and `Op_t(1)` is exactly the
    /// identity. Needs a generator unless the grid is self-dual (`h²N = 2π`).
    Periodic,
}

/// Dense kernel `K(x, y)` on an `N^n x N^n` configuration lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorKernel {
    pub grid: ConfigGrid,
    pub t: f64,
    /// Row-major, `rows = cols = N^n`.
    pub matrix: Vec<C64>,
    /// Whether the quadrature weight `h^n` is already folded into `matrix`.
    pub scaled: bool,
}

impl OperatorKernel {
    pub fn size(&self) -> usize {
        self.grid.grid().len()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[row * self.size() + col]
    }

    /// `h^n K` as a dense matrix (the operator acting on coefficient vectors).
    pub fn scaled_matrix(&self) -> DMatrix<C64> {
        let m = self.size();
        let w = if self.scaled {
            1.0
        } else {
            self.grid.grid().cell_volume()
        };
        DMatrix::from_fn(m, m, |i, j| self.matrix[i * m + j] * w)
    }

    /// Build from an operator matrix that already includes `h^n`.
    pub fn from_scaled(grid: ConfigGrid, t: f64, m: &DMatrix<C64>) -> Self {
        let size = grid.grid().len();
        assert_eq!(m.nrows(), size);
        let matrix = (0..size * size).map(|k| m[(k / size, k % size)]).collect();
        OperatorKernel {
            grid,
            t,
            matrix,
            scaled: true,
        }
    }

    pub fn max_abs_diff(&self, other: &OperatorKernel) -> f64 {
        let (a, b) = (self.scaled_matrix(), other.scaled_matrix());
        let w = self.grid.grid().cell_volume();
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max) / w
    }
}

/// Real weights of trigonometric interpolation on an `N`-periodic lattice
/// (symmetric Nyquist term), evaluated at `x`.
pub fn trig_weights(g: &Grid, x: f64) -> Vec<f64> {
    let n = g.points;
    (0..n)
        .map(|k| {
            let theta = PI * (x - g.coord(k)) / g.half_width;
            let s = (theta / 2.0).sin();
            let dirichlet = if s.abs() < 1e-14 {
                (n - 1) as f64
            } else {
                ((n - 1) as f64 * theta / 2.0).sin() / s
            };
            (dirichlet + (n as f64 * theta / 2.0).cos()) / n as f64
        })
        .collect()
}

/// Contract `mat` (`out_len x len`) along `axis` of a row-major array.
fn apply_along_axis(
    values: &[C64],
    shape: &[usize],
    axis: usize,
    mat: &[f64],
    out_len: usize,
) -> (Vec<C64>, Vec<usize>) {
    let len = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); outer * out_len * inner];
    out.par_chunks_mut(out_len * inner)
        .enumerate()
        .for_each(|(o, chunk)| {
            let src = &values[o * len * inner..(o + 1) * len * inner];
            for r in 0..out_len {
                let row = &mat[r * len..(r + 1) * len];
                for i in 0..inner {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, w) in row.iter().enumerate() {
                        acc += src[k * inner + i] * *w;
                    }
                    chunk[r * inner + i] = acc;
                }
            }
        });
    let mut new_shape = shape.to_vec();
    new_shape[axis] = out_len;
    (out, new_shape)
}

/// Distinct points `(1-t) x_i + t x_j` on one axis and the map `(i, j) -> target`.
struct MidpointTable {
    coords: Vec<f64>,
    pair: Vec<usize>,
}

fn midpoint_table(g: &Grid, t: f64) -> MidpointTable {
    let n = g.points;
    let two_t = 2.0 * t;
    let h = g.spacing();
    let mut pair = vec![0usize; n * n];
    if (two_t - two_t.round()).abs() < 1e-12 {
        let s = two_t.round() as i64;
        // key = 2i + s (j - i) indexes the half-step lattice
        let keys: Vec<i64> = (0..n * n)
            .map(|p| {
                let (i, j) = ((p / n) as i64, (p % n) as i64);
                2 * i + s * (j - i)
            })
            .collect();
        let lo = *keys.iter().min().unwrap();
        let hi = *keys.iter().max().unwrap();
        let coords = (lo..=hi).map(|k| -g.half_width + k as f64 * h / 2.0).collect();
        for (p, k) in keys.iter().enumerate() {
            pair[p] = (k - lo) as usize;
        }
        MidpointTable { coords, pair }
    } else {
        let coords = (0..n * n)
            .map(|p| (1.0 - t) * g.coord(p / n) + t * g.coord(p % n))
            .collect();
        for (p, slot) in pair.iter_mut().enumerate() {
            *slot = p;
        }
        MidpointTable { coords, pair }
    }
}

/// `Op_t(a)` with the default [`FrequencyRule::PhaseGrid`] quadrature.
pub fn build_kernel(a: &SymbolField, t: f64) -> Result<OperatorKernel> {
    build_kernel_with(a, t, FrequencyRule::PhaseGrid)
}

pub fn build_kernel_with(a: &SymbolField, t: f64, rule: FrequencyRule) -> Result<OperatorKernel> {
    let pg = a.grid;
    let g = pg.grid();
    let (n, pts) = (pg.n, g.points);
    if pts % 2 != 0 {
        return Err(Error::OddGrid(pts));
    }
    if !t.is_finite() {
        return Err(invalid("t", "must be finite"));
    }
    if let Some(bad) = a.values().iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite(format!("symbol sample {bad}")));
    }
    let h = g.spacing();
    let cfg = pg.config();
    let axis_grid = cfg.grid();
    let one_axis = Grid {
        dim: 1,
        ..axis_grid
    };

    // frequency lattice and weight
    let (freq, weight) = match rule {
        FrequencyRule::PhaseGrid => (g.axis(), h),
        FrequencyRule::Periodic => {
            let dual = one_axis.dual();
            (dual.axis(), dual.spacing())
        }
    };
    let self_dual = (PI / g.half_width - h).abs() <= 1e-12 * h;
    if rule == FrequencyRule::Periodic && a.generator().is_none() && !self_dual {
        return Err(Error::Unsupported(
            "the periodic frequency rule needs an analytic generator or a self-dual grid (h^2 N = 2π)"
                .into(),
        ));
    }

    let table = midpoint_table(&one_axis, t);
    let n_targets = table.coords.len();

    // symbol table S[m_1..m_n, ξ_1..ξ_n]
    let sym: Vec<C64> = match a.generator() {
        Some(gen) => {
            let shape: Vec<usize> = std::iter::repeat(n_targets)
                .take(n)
                .chain(std::iter::repeat(pts).take(n))
                .collect();
            let total: usize = shape.iter().product();
            (0..total)
                .into_par_iter()
                .map(|flat| {
                    let mut rem = flat;
                    let mut point = vec![0.0; 2 * n];
                    for d in (0..2 * n).rev() {
                        let k = rem % shape[d];
                        rem /= shape[d];
                        point[d] = if d < n { table.coords[k] } else { freq[k] };
                    }
                    gen.value(&point)
                })
                .collect()
        }
        None => {
            let weights: Vec<f64> = table
                .coords
                .iter()
                .flat_map(|&x| trig_weights(&one_axis, x))
                .collect();
            let mut vals = a.values().to_vec();
            let mut shape = vec![pts; 2 * n];
            for d in 0..n {
                let (v, s) = apply_along_axis(&vals, &shape, d, &weights, n_targets);
                vals = v;
                shape = s;
            }
            vals
        }
    };
    if sym.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("symbol evaluated off-grid".into()));
    }

    // phase table e^{i d h ξ_k}, d = -(N-1)..N-1
    let phase: Vec<C64> = (0..2 * pts - 1)
        .flat_map(|d| {
            let z = (d as f64 - (pts as f64 - 1.0)) * h;
            freq.iter().map(move |&xi| C64::from_polar(1.0, z * xi)).collect::<Vec<_>>()
        })
        .collect();

    let size = axis_grid.len();
    let nfreq = pts.pow(n as u32);
    let pref = (weight / (2.0 * PI)).powi(n as i32);
    let matrix: Vec<C64> = (0..size)
        .into_par_iter()
        .flat_map_iter(|row| {
            let xi_idx = axis_grid.unravel(row);
            let sym = &sym;
            let phase = &phase;
            let table = &table;
            (0..size).map(move |col| {
                let yj_idx = axis_grid.unravel(col);
                let mut m_flat = 0usize;
                let mut shifts = Vec::with_capacity(n);
                for d in 0..n {
                    m_flat = m_flat * n_targets + table.pair[xi_idx[d] * pts + yj_idx[d]];
                    shifts.push(xi_idx[d] + pts - 1 - yj_idx[d]);
                }
                let row_sym = &sym[m_flat * nfreq..(m_flat + 1) * nfreq];
                let mut acc = C64::new(0.0, 0.0);
                if n == 1 {
                    let ph = &phase[shifts[0] * pts..(shifts[0] + 1) * pts];
                    for (s, p) in row_sym.iter().zip(ph) {
                        acc += s * p;
                    }
                } else {
                    for (k, s) in row_sym.iter().enumerate() {
                        let mut rem = k;
                        let mut p = C64::new(1.0, 0.0);
                        for d in (0..n).rev() {
                            let kd = rem % pts;
                            rem /= pts;
                            p *= phase[shifts[d] * pts + kd];
                        }
                        acc += s * p;
                    }
                }
                acc * pref
            })
        })
        .collect();

    Ok(OperatorKernel {
        grid: cfg,
        t,
        matrix,
        scaled: false,
    })
}

/// `(Kf)(x) = h^n Σ_y K(x, y) f(y)`.
pub fn apply(kernel: &OperatorKernel, f: &FunctionField) -> Result<FunctionField> {
    if !kernel.grid.grid().same_as(&f.grid.grid()) {
        return Err(Error::GridMismatch(format!(
            "kernel on {:?}, function on {:?}",
            kernel.grid, f.grid
        )));
    }
    let size = kernel.size();
    let w = if kernel.scaled {
        1.0
    } else {
        kernel.grid.grid().cell_volume()
    };
    let fv = f.values();
    let out = (0..size)
        .into_par_iter()
        .map(|i| {
            let row = &kernel.matrix[i * size..(i + 1) * size];
            row.iter().zip(fv).map(|(k, v)| k * v).sum::<C64>() * w
        })
        .collect();
    FunctionField::from_values(f.grid, out)
}

/// Apply the Fourier multiplier `m(Φ(ζ))` to a symbol, `Φ(ζ) = <ζ_x, ζ_ξ>`.
fn phi_multiplier(a: &SymbolField, m: impl Fn(f64) -> Result<C64> + Sync) -> Result<SymbolField> {
    let n = a.grid.n;
    let spec = fourier(a, Direction::Forward);
    let dual = spec.lattice();
    let vals: Result<Vec<C64>> = spec
        .values()
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let z = dual.point(k);
            let phi: f64 = (0..n).map(|j| z[j] * z[n + j]).sum();
            Ok(v * m(phi)?)
        })
        .collect();
    let spec = spec.rebuild(dual, vals?);
    let back = fourier(&spec, Direction::Inverse);
    SymbolField::from_values(a.grid, back.into_values())
}

/// Symbol `b` with `Op_t(b) = Op_s(a)`, i.e. `b = e^{i(s-t)Φ(D)} a`.
///
/// Polynomial generators are converted exactly (the series terminates);
/// everything else goes through the unimodular multiplier `e^{i(s-t)Φ(ζ)}`
/// on the DFT of the samples.
pub fn convert_quantization(a: &SymbolField, s: f64, t: f64) -> Result<SymbolField> {
    if s == t {
        return Ok(a.clone());
    }
    if let Some(p) = a.generator().and_then(|g| g.as_polynomial()) {
        let b: Generator = arc(p.exp_phi_tail(s - t, 0));
        return SymbolField::from_generator(a.grid, b);
    }
    let c = s - t;
    phi_multiplier(a, |phi| Ok(C64::from_polar(1.0, c * phi)))
}

/// Remainder `e^{itΦ(D)} a - Σ_{k<terms} (itΦ(D))^k a / k!`.
pub fn expansion_remainder(a: &SymbolField, t: f64, terms: usize) -> Result<SymbolField> {
    if terms == 0 {
        return Err(invalid("N_terms", "must be at least 1"));
    }
    if let Some(p) = a.generator().and_then(|g| g.as_polynomial()) {
        let b: Generator = arc(p.exp_phi_tail(t, terms));
        return SymbolField::from_generator(a.grid, b);
    }
    let dual = a.grid.grid().dual();
    let phi_max = a.grid.n as f64 * dual.half_width * dual.half_width;
    let log_term = (terms as f64 - 1.0) * (t.abs() * phi_max).max(1.0).ln();
    if log_term > 700.0 {
        return Err(Error::Overflow(format!(
            "|tΦ|^{} reaches e^{log_term:.0} on this grid; reduce N_terms",
            terms - 1
        )));
    }
    phi_multiplier(a, |phi| {
        let theta = t * phi;
        let mut partial = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for k in 0..terms {
            partial += term;
            term = term * C64::new(0.0, theta) / (k + 1) as f64;
        }
        let r = C64::from_polar(1.0, theta) - partial;
        if r.re.is_finite() && r.im.is_finite() {
            Ok(r)
        } else {
            Err(Error::Overflow("multiplier overflow; reduce N_terms".into()))
        }
    })
}
