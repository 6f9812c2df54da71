//! Fourier transform `(2π)^{-d/2} ∫ f(x) e^{∓i<x,ξ>} dx` on centred grids and
//! the symplectic Fourier transform `π^{-n} ∫ a(Y) e^{2iσ(X,Y)} dY`.

use crate::grid::{Field, Grid, SymbolField};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Apply `line_op` to every 1-D line along `axis` of a row-major cube array.
pub(crate) fn for_each_line(
    values: &mut [C64],
    dim: usize,
    points: usize,
    axis: usize,
    line_op: &(dyn Fn(&mut [C64]) + Sync),
) {
    let stride = points.pow((dim - 1 - axis) as u32);
    let block = stride * points;
    values.par_chunks_mut(block).for_each(|chunk| {
        let mut line = vec![C64::new(0.0, 0.0); points];
        for offset in 0..stride {
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = chunk[offset + k * stride];
            }
            line_op(&mut line);
            for (k, v) in line.iter().enumerate() {
                chunk[offset + k * stride] = *v;
            }
        }
    });
}

/// Continuous Fourier transform realised by a scaled DFT.
///
/// The output lives on the dual lattice (spacing `π/L`, frequencies in
/// `[-π/h, π/h)`), so `fourier(fourier(f, Forward), Inverse)` returns to the
/// original grid.
pub fn fourier<F: Field>(field: &F, direction: Direction) -> F {
    let g = field.lattice();
    let n = g.points;
    let mut values = field.values().to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    let scale = g.spacing() / (2.0 * PI).sqrt();
    let half_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let op = move |line: &mut [C64]| {
        for (k, v) in line.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
        fft.process(line);
        for (m, v) in line.iter_mut().enumerate() {
            let s = if m % 2 == 1 { -half_sign } else { half_sign };
            *v *= scale * s;
        }
    };
    for axis in 0..g.dim {
        for_each_line(&mut values, g.dim, n, axis, &op);
    }
    field.rebuild(g.dual(), values)
}

/// Frequency coordinates of the dual lattice, one axis.
pub fn frequency_axis(g: &Grid) -> Vec<f64> {
    g.dual().axis()
}

/// Symplectic Fourier transform by direct separable quadrature.
///
/// `F_σ a(x, ξ) = π^{-n} h^{2n} Σ a(y, η) e^{2i(<y,ξ> - <x,η>)}`; the result is
/// sampled on the same phase grid as the input.
pub fn symplectic_fourier(a: &SymbolField) -> SymbolField {
    let pg = a.grid;
    let g = pg.grid();
    let (n, pts) = (pg.n, g.points);
    let axis = g.axis();
    let build = |sign: f64| -> Vec<C64> {
        let mut m = vec![C64::new(0.0, 0.0); pts * pts];
        for (o, &co) in axis.iter().enumerate() {
            for (i, &ci) in axis.iter().enumerate() {
                m[o * pts + i] = C64::from_polar(1.0, 2.0 * sign * co * ci);
            }
        }
        m
    };
    let plus = build(1.0);
    let minus = build(-1.0);
    fn apply(mat: &[C64], pts: usize) -> impl Fn(&mut [C64]) + Sync + '_ {
        move |line: &mut [C64]| {
            let input = line.to_vec();
            for (o, out) in line.iter_mut().enumerate() {
                let row = &mat[o * pts..(o + 1) * pts];
                *out = row.iter().zip(&input).map(|(m, v)| m * v).sum();
            }
        }
    }
    let mut values = a.values().to_vec();
    let op_plus = apply(&plus, pts);
    let op_minus = apply(&minus, pts);
    for j in 0..n {
        // y_j -> ξ_j and η_j -> x_j
        for_each_line(&mut values, 2 * n, pts, j, &op_plus);
        for_each_line(&mut values, 2 * n, pts, n + j, &op_minus);
    }
    // swap the x and ξ blocks of axes
    let scale = g.cell_volume() / PI.powi(n as i32);
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    for (flat, v) in values.iter().enumerate() {
        let idx = g.unravel(flat);
        let mut swapped = idx[n..].to_vec();
        swapped.extend_from_slice(&idx[..n]);
        out[g.ravel(&swapped)] = v * scale;
    }
    a.rebuild(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, ConfigGrid, FunctionField, PhaseGrid};
    use crate::symbols::{arc, random_gaussian_mix, Gaussian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gauss_1d(grid: ConfigGrid) -> FunctionField {
        FunctionField::from_fn(grid, |x| C64::new((-x[0] * x[0] / 2.0).exp(), 0.0))
    }

    #[test]
    fn gaussian_is_self_dual() {
        let grid = ConfigGrid::new(1, 8.0, 128).unwrap();
        let f = gauss_1d(grid);
        let ff = fourier(&f, Direction::Forward);
        let freq = ff.lattice();
        for (k, v) in ff.values().iter().enumerate() {
            let xi = freq.coord(k);
            assert!((v - C64::new((-xi * xi / 2.0).exp(), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_round_trip_linearity_and_parseval() {
        let grid = ConfigGrid::new(2, 5.0, 16).unwrap();
        let f = FunctionField::from_fn(grid, |x| C64::new(x[0].sin() + 0.3, x[1] * 0.1));
        let g = FunctionField::from_fn(grid, |x| C64::new((-x[0] * x[0]).exp(), x[1].cos()));
        let back = fourier(&fourier(&f, Direction::Forward), Direction::Inverse);
        assert!(back.lattice().same_as(&f.lattice()));
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        let (al, be) = (C64::new(0.7, -1.2), C64::new(-2.0, 0.4));
        let combo = FunctionField::from_values(
            grid,
            f.values().iter().zip(g.values()).map(|(x, y)| al * x + be * y).collect(),
        )
        .unwrap();
        let lhs = fourier(&combo, Direction::Forward);
        let (ff, fg) = (fourier(&f, Direction::Forward), fourier(&g, Direction::Forward));
        for ((l, x), y) in lhs.values().iter().zip(ff.values()).zip(fg.values()) {
            assert!((l - (al * x + be * y)).norm() < 1e-12);
        }
        let n0 = lp_norm(&f, 2.0).unwrap();
        let n1 = lp_norm(&ff, 2.0).unwrap();
        assert!((n0 - n1).abs() < 1e-12 * n0);
    }

    #[test]
    fn grid_translation_is_a_phase() {
        let grid = ConfigGrid::new(1, 4.0, 32).unwrap();
        let f = FunctionField::from_fn(grid, |x| C64::new(x[0].cos(), 0.2 * x[0]));
        let mut shifted = f.values().to_vec();
        shifted.rotate_right(1);
        let fs = fourier(&FunctionField::from_values(grid, shifted).unwrap(), Direction::Forward);
        let ff = fourier(&f, Direction::Forward);
        let h = grid.spacing();
        let freq = ff.lattice();
        for (k, (a, b)) in fs.values().iter().zip(ff.values()).enumerate() {
            let phase = C64::from_polar(1.0, -h * freq.coord(k));
            assert!((a - phase * b).norm() < 1e-12);
        }
    }

    #[test]
    fn symplectic_gaussian_fixed_point() {
        let grid = PhaseGrid::new(1, 8.0, 128).unwrap();
        let a = SymbolField::from_generator(grid, arc(Gaussian::standard(2, 1.0))).unwrap();
        let fa = symplectic_fourier(&a);
        for (x, y) in fa.values().iter().zip(a.values()) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn symplectic_involution_and_translation() {
        let grid = PhaseGrid::new(1, 8.0, 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = SymbolField::from_generator(grid, random_gaussian_mix(2, &mut rng)).unwrap();
        let twice = symplectic_fourier(&symplectic_fourier(&a));
        let norm = lp_norm(&a, 2.0).unwrap();
        let diff: Vec<C64> = twice.values().iter().zip(a.values()).map(|(x, y)| x - y).collect();
        let err = crate::grid::lp_of(&diff, grid.grid().cell_volume(), 2.0).unwrap();
        assert!(err <= 1e-10 * norm, "involution error {err}");

        // shift by one step along x: F_σ picks up e^{2iσ(X, Y0)} = e^{-2i x η0... }
        let g = grid.grid();
        let h = g.spacing();
        let mut shifted = vec![C64::new(0.0, 0.0); g.len()];
        for flat in 0..g.len() {
            let idx = g.unravel(flat);
            if idx[0] + 1 < g.points {
                shifted[g.ravel(&[idx[0] + 1, idx[1]])] = a.values()[flat];
            }
        }
        let sa = symplectic_fourier(&SymbolField::from_values(grid, shifted).unwrap());
        let fa = symplectic_fourier(&a);
        for flat in 0..g.len() {
            let p = g.point(flat);
            // σ(X, Y0) with Y0 = (h, 0): <y0, ξ> - <x, η0> = h ξ
            let phase = C64::from_polar(1.0, 2.0 * h * p[1]);
            assert!((sa.values()[flat] - phase * fa.values()[flat]).norm() < 1e-9);
        }
    }
}
