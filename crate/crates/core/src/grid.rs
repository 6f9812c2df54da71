//! Uniform grids on `[-L, L)^d` and complex fields sampled on them.

use crate::error::{invalid, Error, Result};
use crate::symbols::Generator;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Cube lattice `x_k = -L + k h`, `k = 0..N-1`, on every one of `dim` axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid("L", format!("must be positive and finite, got {half_width}")));
        }
        if points < 2 || points % 2 != 0 {
            return Err(invalid("N", format!("must be a positive even integer, got {points}")));
        }
        Ok(Grid {
            dim,
            half_width,
            points,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.coord(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Row-major multi-index of a flat index (first axis slowest).
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).into_iter().map(|k| self.coord(k)).collect()
    }

    /// Flat index of the grid point nearest to `p` (clamped to the box).
    pub fn nearest(&self, p: &[f64]) -> usize {
        let idx: Vec<usize> = p
            .iter()
            .map(|&x| {
                let i = ((x + self.half_width) / self.spacing()).round();
                i.clamp(0.0, (self.points - 1) as f64) as usize
            })
            .collect();
        self.ravel(&idx)
    }

    /// The centred frequency lattice paired with this grid by the DFT:
    /// spacing `π/L`, same point count.
    pub fn dual(&self) -> Grid {
        Grid {
            dim: self.dim,
            half_width: std::f64::consts::PI * self.points as f64 / (2.0 * self.half_width),
            points: self.points,
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

/// Phase space `W = R^n x R^n`, coordinates ordered `(x_1..x_n, ξ_1..ξ_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub n: usize,
    pub half_width: f64,
    pub points: usize,
}

impl PhaseGrid {
    pub fn new(n: usize, half_width: f64, points: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Grid::new(2 * n, half_width, points)?;
        Ok(PhaseGrid {
            n,
            half_width,
            points,
        })
    }

    pub fn grid(&self) -> Grid {
        Grid {
            dim: 2 * self.n,
            half_width: self.half_width,
            points: self.points,
        }
    }

    pub fn config(&self) -> ConfigGrid {
        ConfigGrid {
            n: self.n,
            half_width: self.half_width,
            points: self.points,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.grid().spacing()
    }

    fn from_grid(n: usize, g: Grid) -> Self {
        PhaseGrid {
            n,
            half_width: g.half_width,
            points: g.points,
        }
    }
}

/// Configuration space `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigGrid {
    pub n: usize,
    pub half_width: f64,
    pub points: usize,
}

impl ConfigGrid {
    pub fn new(n: usize, half_width: f64, points: usize) -> Result<Self> {
        Grid::new(n, half_width, points)?;
        Ok(ConfigGrid {
            n,
            half_width,
            points,
        })
    }

    pub fn grid(&self) -> Grid {
        Grid {
            dim: self.n,
            half_width: self.half_width,
            points: self.points,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.grid().spacing()
    }
}

/// Common view over sampled fields.
pub trait Field: Sized {
    fn lattice(&self) -> Grid;
    fn values(&self) -> &[C64];
    /// A field of the same kind on `lattice` carrying `values`.
    fn rebuild(&self, lattice: Grid, values: Vec<C64>) -> Self;
}

/// Samples of a symbol `a(x, ξ)`, optionally backed by its analytic generator.
#[derive(Clone, Debug)]
pub struct SymbolField {
    pub grid: PhaseGrid,
    values: Vec<C64>,
    generator: Option<Generator>,
}

impl SymbolField {
    pub fn from_values(grid: PhaseGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.grid().len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.grid().len(),
                values.len()
            )));
        }
        Ok(SymbolField {
            grid,
            values,
            generator: None,
        })
    }

    pub fn from_generator(grid: PhaseGrid, generator: Generator) -> Result<Self> {
        if generator.dim() != 2 * grid.n {
            return Err(Error::GridMismatch(format!(
                "generator acts on R^{} but phase space is R^{}",
                generator.dim(),
                2 * grid.n
            )));
        }
        let g = grid.grid();
        let values = (0..g.len())
            .into_par_iter()
            .map(|k| generator.value(&g.point(k)))
            .collect();
        Ok(SymbolField {
            grid,
            values,
            generator: Some(generator),
        })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        SymbolField {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.grid().len()],
            generator: None,
        }
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn without_generator(mut self) -> Self {
        self.generator = None;
        self
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> SymbolField {
        SymbolField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            generator: None,
        }
    }

    /// Largest relative deviation between the stored samples and a fresh
    /// resampling of the generator; `None` without a generator.
    pub fn resample_error(&self) -> Option<f64> {
        let gen = self.generator.as_ref()?;
        let g = self.grid.grid();
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        Some(
            (0..g.len())
                .map(|k| (gen.value(&g.point(k)) - self.values[k]).norm() / scale)
                .fold(0.0, f64::max),
        )
    }
}

impl Field for SymbolField {
    fn lattice(&self) -> Grid {
        self.grid.grid()
    }

    fn values(&self) -> &[C64] {
        &self.values
    }

    fn rebuild(&self, lattice: Grid, values: Vec<C64>) -> Self {
        SymbolField {
            grid: PhaseGrid::from_grid(self.grid.n, lattice),
            values,
            generator: None,
        }
    }
}

/// Samples of a function on configuration space.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionField {
    pub grid: ConfigGrid,
    values: Vec<C64>,
}

impl FunctionField {
    pub fn from_values(grid: ConfigGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.grid().len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.grid().len(),
                values.len()
            )));
        }
        Ok(FunctionField { grid, values })
    }

    pub fn from_fn(grid: ConfigGrid, f: impl Fn(&[f64]) -> C64) -> Self {
        let g = grid.grid();
        let values = (0..g.len()).map(|k| f(&g.point(k))).collect();
        FunctionField { grid, values }
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }
}

impl Field for FunctionField {
    fn lattice(&self) -> Grid {
        self.grid.grid()
    }

    fn values(&self) -> &[C64] {
        &self.values
    }

    fn rebuild(&self, lattice: Grid, values: Vec<C64>) -> Self {
        FunctionField {
            grid: ConfigGrid {
                n: lattice.dim,
                half_width: lattice.half_width,
                points: lattice.points,
            },
            values,
        }
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("must satisfy p >= 1 or p = inf, got {p}")));
    }
    Ok(())
}

/// Riemann-sum `L^p` norm of raw samples with cell volume `w`.
pub fn lp_of(values: &[C64], w: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let s: f64 = values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((w * s).powf(1.0 / p))
}

/// `(h^d Σ |v|^p)^{1/p}`, or `max |v|` for `p = ∞`.
pub fn lp_norm<F: Field>(field: &F, p: f64) -> Result<f64> {
    lp_of(field.values(), field.lattice().cell_volume(), p)
}

/// `sup |a(X)|` over grid points with `|X| >= radius`.
pub fn linf_tail<F: Field>(field: &F, radius: f64) -> Result<f64> {
    let g = field.lattice();
    let diag = g.half_width * (g.dim as f64).sqrt();
    if !(radius >= 0.0) || radius >= diag {
        return Err(Error::EmptyRegion(format!(
            "radius {radius} is outside [0, {diag}) for this grid"
        )));
    }
    let mut best: Option<f64> = None;
    for (k, v) in field.values().iter().enumerate() {
        let r2: f64 = g.point(k).iter().map(|x| x * x).sum();
        if r2.sqrt() >= radius {
            best = Some(best.unwrap_or(0.0).max(v.norm()));
        }
    }
    best.ok_or_else(|| Error::EmptyRegion(format!("no grid point with |X| >= {radius}")))
}

/// Quadrature value of `∫ a conj(b)`.
pub fn pairing<F: Field>(a: &F, b: &F) -> Result<C64> {
    let (ga, gb) = (a.lattice(), b.lattice());
    if !ga.same_as(&gb) {
        return Err(Error::GridMismatch(format!("{ga:?} vs {gb:?}")));
    }
    let s: C64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x * y.conj())
        .sum();
    Ok(s * ga.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{arc, Bump, Gaussian, Polynomial};

    fn ones(grid: PhaseGrid) -> SymbolField {
        let len = grid.grid().len();
        SymbolField::from_values(grid, vec![C64::new(1.0, 0.0); len]).unwrap()
    }

    #[test]
    fn grid_invariants() {
        let g = PhaseGrid::new(1, 8.0, 128).unwrap().grid();
        assert_eq!(g.spacing() * g.points as f64, 2.0 * g.half_width);
        assert_eq!(g.coord(0), -8.0);
        assert_eq!(g.len(), 128 * 128);
        assert!(PhaseGrid::new(1, 8.0, 127).is_err());
        assert!(PhaseGrid::new(1, -1.0, 128).is_err());
        assert_eq!(g.ravel(&g.unravel(1234)), 1234);
    }

    #[test]
    fn lp_norm_cases() {
        let grid = PhaseGrid::new(1, 2.0, 16).unwrap();
        assert_eq!(lp_norm(&SymbolField::zeros(grid), 3.0).unwrap(), 0.0);
        assert!((lp_norm(&ones(grid), 1.0).unwrap() - 16.0).abs() < 1e-12);
        assert!(lp_norm(&ones(grid), 0.5).is_err());
        assert_eq!(lp_norm(&ones(grid), f64::INFINITY).unwrap(), 1.0);

        let grid = PhaseGrid::new(1, 8.0, 128).unwrap();
        let a = SymbolField::from_generator(grid, arc(Gaussian::standard(2, 1.0))).unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!((lp_norm(&a, 2.0).unwrap() - want).abs() < 1e-6);
    }

    #[test]
    fn tail_cases() {
        let grid = PhaseGrid::new(1, 4.0, 32).unwrap();
        let bump = SymbolField::from_generator(grid, arc(Bump::centered(2, 1.5))).unwrap();
        assert_eq!(linf_tail(&bump, 1.5).unwrap(), 0.0);
        assert_eq!(linf_tail(&ones(grid), 2.0).unwrap(), 1.0);
        assert!(linf_tail(&ones(grid), 6.0).is_err());

        let grid = PhaseGrid::new(1, 8.0, 128).unwrap();
        let g = SymbolField::from_generator(grid, arc(Gaussian::standard(2, 1.0))).unwrap();
        let tail = linf_tail(&g, 2.0).unwrap();
        // grid points on |X| >= 2 come within one cell of the circle
        assert!(tail <= (-4.0f64).exp() + 1e-12);
        assert!(tail >= (-(2.0f64 + grid.spacing()).powi(2)).exp());
        // monotone in R
        let mut last = f64::INFINITY;
        for r in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let t = linf_tail(&g, r).unwrap();
            assert!(t <= last);
            last = t;
        }
    }

    #[test]
    fn pairing_cases() {
        let grid = PhaseGrid::new(1, 8.0, 128).unwrap();
        let g = SymbolField::from_generator(grid, arc(Gaussian::standard(2, 1.0))).unwrap();
        let p = pairing(&g, &ones(grid)).unwrap();
        assert!((p.re - std::f64::consts::PI).abs() < 1e-6);
        let l2 = lp_norm(&g, 2.0).unwrap();
        assert!((pairing(&g, &g).unwrap().re - l2 * l2).abs() < 1e-12);

        // pure grid frequencies e^{iπ k x / L}
        let wave = |k: f64| {
            arc(Gaussian {
                amp: C64::new(1.0, 0.0),
                center: vec![0.0, 0.0],
                width: 1e9,
                freq: vec![std::f64::consts::PI * k / 8.0, 0.0],
            })
        };
        let a = SymbolField::from_generator(grid, wave(3.0)).unwrap();
        let b = SymbolField::from_generator(grid, wave(5.0)).unwrap();
        assert!(pairing(&a, &b).unwrap().norm() < 1e-12 * 256.0);

        let other = PhaseGrid::new(1, 4.0, 128).unwrap();
        assert!(pairing(&g, &ones(other)).is_err());
    }

    #[test]
    fn generator_resampling_is_exact() {
        let grid = PhaseGrid::new(1, 3.0, 16).unwrap();
        let p = Polynomial::linear(&[1.0, -2.0]);
        let a = SymbolField::from_generator(grid, arc(p)).unwrap();
        assert!(a.resample_error().unwrap() <= 1e-12);
    }
}
