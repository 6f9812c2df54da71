//! Both sides of derivative-bound inequalities with unnamed constants, and
//! ratio-stability statistics across test families.

use crate::classes::generator_seminorm;
use crate::error::{invalid, Error, Result};
use crate::metric::QuadFormField;
use crate::smooth::{directional_derivative, multi_indices, partial, Smooth};
use crate::symbols::{arc, Gaussian, Generator, Sum};
use nalgebra::{Cholesky, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default max/min ratio band for empirical-constant suites.
pub const DEFAULT_BAND: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when the right-hand side vanishes.
    pub ratio: Option<f64>,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 { Some(lhs / rhs) } else { None };
        BoundReport { lhs, rhs, ratio }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandStats {
    pub count: usize,
    /// Reports with a vanishing right-hand side, left out of the ratios.
    pub skipped: usize,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub band: f64,
    pub within: bool,
}

pub fn band_stats(reports: &[BoundReport], band: f64) -> BandStats {
    let ratios: Vec<f64> = reports.iter().filter_map(|r| r.ratio).collect();
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let spread = if ratios.is_empty() {
        f64::NAN
    } else if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    };
    BandStats {
        count: ratios.len(),
        skipped: reports.len() - ratios.len(),
        min,
        max,
        spread,
        band,
        within: spread.is_finite() && spread <= band && ratios.iter().all(|r| r.is_finite()),
    }
}

/// Random trigonometric polynomial `Σ c_k e^{i <w_k, x>}` with `|w_k| <= max_freq`.
pub fn random_trig_polynomial<R: Rng>(dim: usize, terms: usize, max_freq: f64, rng: &mut R) -> Generator {
    let parts = (0..terms)
        .map(|_| {
            let wave = Gaussian {
                amp: C64::new(1.0, 0.0),
                center: vec![0.0; dim],
                width: f64::INFINITY,
                freq: (0..dim).map(|_| rng.random_range(-max_freq..max_freq)).collect(),
            };
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, arc(wave))
        })
        .collect();
    arc(Sum { parts })
}

/// `max_{[0, r]} |f|`, sampled on `samples + 1` points.
fn sup_on_interval(f: impl Fn(f64) -> f64, r: f64, samples: usize) -> f64 {
    (0..=samples).map(|k| f(r * k as f64 / samples as f64)).fold(0.0, f64::max)
}

/// `|f'(0)| <= 4 (1/r + 1) (max_{[0,r]} |f| + max_{[0,r]} |f''|)` for a
/// one-variable generator.
pub fn fderest_report(f: &dyn Smooth, r: f64) -> Result<BoundReport> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("fderest is one-dimensional".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r", "must be positive and finite"));
    }
    let lhs = directional_derivative(f, &[0.0], &[1.0], 1).norm();
    let samples = 4000;
    let fmax = sup_on_interval(|t| f.value(&[t]).norm(), r, samples);
    let f2max = sup_on_interval(|t| directional_derivative(f, &[t], &[1.0], 2).norm(), r, samples);
    Ok(BoundReport::new(lhs, 4.0 * (1.0 / r + 1.0) * (fmax + f2max)))
}

/// Axis-parallel box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("domain", "corner dimensions differ"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::EmptyRegion("box has an empty side".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// `Ω + (H ∩ B_ε)` with `H` the closed positive orthant.
    pub fn contains_extended(&self, z: &[f64], eps: f64) -> bool {
        let mut excess = 0.0;
        for ((&zi, &a), &b) in z.iter().zip(&self.lo).zip(&self.hi) {
            if zi < a {
                return false;
            }
            excess += (zi - b).max(0.0).powi(2);
        }
        excess <= eps * eps * (1.0 + 1e-12)
    }

    /// Midpoints of a `per_axis^d` partition of the bounding box of the
    /// extended region, kept if they lie in it, with the cell volume.
    fn cells(&self, eps: f64, per_axis: usize) -> (Vec<Vec<f64>>, f64) {
        let d = self.dim();
        let steps: Vec<f64> = self.lo.iter().zip(&self.hi).map(|(a, b)| (b + eps - a) / per_axis as f64).collect();
        let total = per_axis.pow(d as u32);
        let pts = (0..total)
            .map(|mut flat| {
                (0..d)
                    .map(|i| {
                        let k = flat % per_axis;
                        flat /= per_axis;
                        self.lo[i] + (k as f64 + 0.5) * steps[i]
                    })
                    .collect::<Vec<f64>>()
            })
            .filter(|z| self.contains_extended(z, eps))
            .collect();
        (pts, steps.iter().product())
    }
}

fn lp_samples(vals: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        vals.iter().copied().fold(0.0, f64::max)
    } else {
        (vals.iter().map(|v| v.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

/// `|f|_{W^p_N(Ω)} = Σ_{|β|=N} ||∂^β f||_{L^p(Ω)}` for a generator on a box,
/// midpoint rule with `per_axis` cells per side.
pub fn generator_sobolev(f: &dyn Smooth, order: u32, p: f64, domain: &BoxDomain, per_axis: usize) -> Result<f64> {
    crate::grid::check_p(p)?;
    let (pts, cell) = domain.cells(0.0, per_axis);
    Ok(sobolev_on(f, order, p, &pts, cell))
}

fn sobolev_on(f: &dyn Smooth, order: u32, p: f64, pts: &[Vec<f64>], cell: f64) -> f64 {
    multi_indices(f.dim(), order)
        .par_iter()
        .map(|beta| {
            let vals: Vec<f64> = pts.iter().map(|z| partial(f, z, beta).norm()).collect();
            lp_samples(&vals, cell, p)
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// `||∂^α f||_{L^p(Ω)}` against `||f||_{L^p(Ω')} + Σ_{|β|=N} ||∂^β f||_{L^p(Ω')}`
/// where `Ω' = Ω + (H ∩ B_ε)` for the positive orthant `H`; `|α| < N`.
pub fn lemma_a1_report(
    f: &dyn Smooth,
    domain: &BoxDomain,
    alpha: &[u32],
    order: u32,
    p: f64,
    eps: f64,
    per_axis: usize,
) -> Result<BoundReport> {
    crate::grid::check_p(p)?;
    if f.dim() != domain.dim() || alpha.len() != domain.dim() {
        return Err(Error::GridMismatch("function, box and multi-index dimensions differ".into()));
    }
    if alpha.iter().sum::<u32>() >= order {
        return Err(invalid("alpha", "must have order below N"));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", "must be nonnegative and finite"));
    }
    let (inner, cell_in) = domain.cells(0.0, per_axis);
    let (outer, cell_out) = domain.cells(eps, per_axis);
    let lhs_vals: Vec<f64> = inner.iter().map(|z| partial(f, z, alpha).norm()).collect();
    let lhs = lp_samples(&lhs_vals, cell_in, p);
    let base_vals: Vec<f64> = outer.iter().map(|z| f.value(z).norm()).collect();
    let rhs = lp_samples(&base_vals, cell_out, p) + sobolev_on(f, order, p, &outer, cell_out);
    Ok(BoundReport::new(lhs, rhs))
}

/// The `L^∞` estimate on the box itself: `ε = 0`.
pub fn prop_a2_report(f: &dyn Smooth, domain: &BoxDomain, alpha: &[u32], order: u32, per_axis: usize) -> Result<BoundReport> {
    lemma_a1_report(f, domain, alpha, order, f64::INFINITY, 0.0, per_axis)
}

/// `sup_{k<=N} sup_{Ū_X} |a|_k^g` against `sup_{Ū_X} |a| + sup_{Ū_X} |a|_N^g`
/// with `U_X = {g_X(Y - X) < c}`, sampled at `samples` points of `Ū_X`
/// (half on the boundary).
pub fn lemma1_report<R: Rng>(
    a: &dyn Smooth,
    g: &dyn QuadFormField,
    x: &[f64],
    c: f64,
    order: u32,
    samples: usize,
    rng: &mut R,
) -> Result<BoundReport> {
    let dim = a.dim();
    if 2 * g.n() != dim || x.len() != dim {
        return Err(Error::GridMismatch("metric, symbol and base point dimensions differ".into()));
    }
    if !(c > 0.0 && c.is_finite()) || samples == 0 {
        return Err(invalid("c", "radius must be positive and samples nonempty"));
    }
    let gx = g.at(x)?;
    let root_inv = Cholesky::new(gx.matrix())
        .and_then(|ch| ch.l().transpose().try_inverse())
        .ok_or_else(|| Error::Numeric("metric not positive definite".into()))?;
    let mut probes = vec![x.to_vec()];
    for s in 0..samples {
        let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = u.iter().map(|t| t * t).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let radius = if s % 2 == 0 { 1.0 } else { rng.random::<f64>().powf(1.0 / dim as f64) };
        let w = DVector::from_iterator(dim, u.iter().map(|t| t / norm * radius * c.sqrt()));
        let y = &root_inv * w;
        probes.push(x.iter().zip(y.iter()).map(|(a, b)| a + b).collect());
    }
    let mut lhs: f64 = 0.0;
    let mut top = 0.0;
    for k in 0..=order {
        let vals = generator_seminorm(a, g, k, &probes)?;
        let m = vals.iter().copied().fold(0.0, f64::max);
        lhs = lhs.max(m);
        if k == order {
            top = m;
        }
    }
    let base = probes.iter().map(|y| a.value(y).norm()).fold(0.0, f64::max);
    Ok(BoundReport::new(lhs, base + top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{ConstantMetric, QuadForm};
    use crate::symbols::{random_gaussian_mix, Polynomial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fderest_linear() {
        let f = Polynomial::monomial(1, &[1], C64::new(1.0, 0.0));
        let r = fderest_report(&f, 1.0).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15);
        assert!((r.rhs - 8.0).abs() < 1e-12);
        assert!((r.ratio.unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn fderest_cubics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut p = Polynomial::zero(1);
            for d in 0..4 {
                p.add_term(vec![d], C64::new(rng.random_range(-3.0..3.0), 0.0));
            }
            for r in [0.5, 1.0, 2.0] {
                assert!(fderest_report(&p, r).unwrap().holds());
            }
        }
    }

    #[test]
    fn extended_box() {
        let b = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains_extended(&[1.2, 0.5], 0.25));
        assert!(!b.contains_extended(&[1.2, 1.2], 0.25));
        assert!(!b.contains_extended(&[-0.01, 0.5], 0.25));
        assert!(BoxDomain::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn sobolev_of_linear() {
        // a(x, ξ) = x on [-1, 1]^2: one unit derivative over area 4
        let f = Polynomial::monomial(2, &[1, 0], C64::new(1.0, 0.0));
        let b = BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert!((generator_sobolev(&f, 1, 1.0, &b, 16).unwrap() - 4.0).abs() < 1e-12);
        let c = Polynomial::constant(2, C64::new(3.0, 0.0));
        assert_eq!(generator_sobolev(&c, 1, 2.0, &b, 8).unwrap(), 0.0);
    }

    #[test]
    fn a1_suite_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = BoxDomain::new(vec![0.0], vec![1.0]).unwrap();
        let reports: Vec<BoundReport> = (0..50)
            .map(|_| {
                let f = random_trig_polynomial(1, 4, 6.0, &mut rng);
                lemma_a1_report(f.as_ref(), &b, &[1], 2, f64::INFINITY, 0.5, 400).unwrap()
            })
            .collect();
        let stats = band_stats(&reports, DEFAULT_BAND);
        assert!(stats.within, "{stats:?}");
        let a2 = prop_a2_report(random_trig_polynomial(1, 3, 4.0, &mut rng).as_ref(), &b, &[1], 2, 400).unwrap();
        assert!(a2.ratio.unwrap().is_finite());
    }

    #[test]
    fn lemma1_constant_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = ConstantMetric(QuadForm::identity(1));
        let a = random_gaussian_mix(2, &mut rng);
        let r = lemma1_report(a.as_ref(), &g, &[0.2, -0.1], 0.5, 2, 16, &mut rng).unwrap();
        // k = 0 and k = N terms sit on both sides
        assert!(r.lhs >= r.rhs / 2.0 - 1e-12);
        assert!(r.ratio.unwrap().is_finite());
    }

    #[test]
    fn band_statistics() {
        let r = [BoundReport::new(1.0, 2.0), BoundReport::new(3.0, 1.0), BoundReport::new(0.0, 0.0)];
        let s = band_stats(&r, 10.0);
        assert_eq!((s.count, s.skipped), (2, 1));
        assert!((s.spread - 6.0).abs() < 1e-15);
        assert!(s.within);
        assert!(!band_stats(&r, 5.0).within);
    }
}
