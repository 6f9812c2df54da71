//! Quadratic forms on phase space: dual metrics, symplectic eigenvalues,
//! Planck's function, the symplectic core, and sampled checks of the
//! slowly-varying, temperate and feasible conditions.
//!
//! Coordinates are `(z_1..z_n, ζ_1..ζ_n)` and `J = [[0, I], [-I, 0]]`.

use crate::error::{invalid, Error, Result};
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub fn j_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            1.0
        } else if i == j + n {
            -1.0
        } else {
            0.0
        }
    })
}

/// Symmetric positive definite form `g(Z) = Zᵀ A Z` on `R^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadForm {
    pub n: usize,
    /// Row-major `2n x 2n`.
    pub a: Vec<f64>,
}

impl QuadForm {
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        let d = 2 * n;
        if a.len() != d * d {
            return Err(invalid("A", format!("expected {} entries, got {}", d * d, a.len())));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadratic form entries".into()));
        }
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (a[i * d + j] - a[j * d + i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(invalid("A", "must be symmetric"));
                }
            }
        }
        let q = QuadForm { n, a };
        if Cholesky::new(q.matrix()).is_none() {
            return Err(invalid("A", "must be positive definite"));
        }
        Ok(q)
    }

    pub fn from_matrix(n: usize, m: &DMatrix<f64>) -> Result<Self> {
        let d = 2 * n;
        let sym = (m + m.transpose()) * 0.5;
        Self::new(n, (0..d * d).map(|k| sym[(k / d, k % d)]).collect())
    }

    pub fn identity(n: usize) -> Self {
        let d = 2 * n;
        let a = (0..d * d).map(|k| if k / d == k % d { 1.0 } else { 0.0 }).collect();
        QuadForm { n, a }
    }

    /// Diagonal form with entries `d` (length `2n`).
    pub fn diagonal(d: &[f64]) -> Result<Self> {
        if d.len() % 2 != 0 || d.is_empty() {
            return Err(invalid("diag", "needs an even, nonzero number of entries"));
        }
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d));
        Self::from_matrix(d.len() / 2, &m)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.a)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|i| z[i] * (0..d).map(|j| self.a[i * d + j] * z[j]).sum::<f64>())
            .sum()
    }

    pub fn max_abs_diff(&self, other: &QuadForm) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// `λ_1 >= ... >= λ_n > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub lambda: Vec<f64>,
}

fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let d = e.eigenvalues.map(|v| v.max(0.0).sqrt());
    &e.eigenvectors * DMatrix::from_diagonal(&d) * e.eigenvectors.transpose()
}

/// `A^σ = Jᵀ A^{-1} J`.
pub fn dual_metric(a: &QuadForm) -> Result<QuadForm> {
    let m = a.matrix();
    let eig = SymmetricEigen::new(m.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    if hi / lo > 1e12 {
        log::warn!("dual_metric: condition number {:.3e} exceeds 1e12", hi / lo);
    }
    let inv = Cholesky::new(m)
        .ok_or_else(|| invalid("A", "must be positive definite"))?
        .inverse();
    let j = j_matrix(a.n);
    QuadForm::from_matrix(a.n, &(j.transpose() * inv * j))
}

/// Williamson coefficients: square roots of the (doubly degenerate)
/// eigenvalues of `-(A^{1/2} J A^{1/2})^2`, which is similar to `-(JA)^2`.
pub fn symplectic_eigenvalues(a: &QuadForm) -> Result<SymplecticSpectrum> {
    let s = sym_sqrt(&a.matrix());
    let k = &s * j_matrix(a.n) * &s;
    let m = k.transpose() * &k;
    let mut mu: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    mu.sort_by(|x, y| y.total_cmp(x));
    if let Some(&low) = mu.last() {
        if low < -1e-10 {
            return Err(Error::Numeric(format!("negative eigenvalue {low:e} of -(JA)^2")));
        }
    }
    let lambda = mu
        .chunks(2)
        .map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt())
        .collect();
    Ok(SymplecticSpectrum { lambda })
}

/// `h_g = λ_1`.
pub fn planck(a: &QuadForm) -> Result<f64> {
    Ok(symplectic_eigenvalues(a)?.lambda[0])
}

/// `λ_1 ... λ_n`.
pub fn capacity(a: &QuadForm) -> Result<f64> {
    Ok(symplectic_eigenvalues(a)?.lambda.iter().product())
}

/// `sup_Z (g(Z)/g^σ(Z))^{1/2}` over `directions` unit vectors of the half
/// circle; `n = 1` only.
pub fn planck_sampled(a: &QuadForm, directions: usize) -> Result<f64> {
    if a.n != 1 {
        return Err(Error::Unsupported("the sampled sup formula is implemented for n = 1".into()));
    }
    let dual = dual_metric(a)?;
    Ok((0..directions)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / directions as f64;
            let z = [th.cos(), th.sin()];
            (a.eval(&z) / dual.eval(&z)).sqrt()
        })
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoreResult {
    pub form: QuadForm,
    pub iterations: usize,
    pub residual: f64,
}

/// Iterate `A <- (A + A^σ)/2` until successive iterates agree to `tol`.
pub fn symplectic_core(a: &QuadForm, tol: f64, max_iter: usize) -> Result<CoreResult> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let mut cur = a.clone();
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let dual = dual_metric(&cur)?;
        let next = QuadForm::from_matrix(cur.n, &((cur.matrix() + dual.matrix()) * 0.5))?;
        residual = next.max_abs_diff(&cur);
        cur = next;
        if residual <= tol {
            return Ok(CoreResult {
                form: cur,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        residual,
    })
}

/// Random SPD `B Bᵀ + 0.1 I` with Gaussian `B`.
pub fn random_spd<R: Rng>(n: usize, rng: &mut R) -> QuadForm {
    let d = 2 * n;
    let b = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let m = &b * b.transpose() + DMatrix::<f64>::identity(d, d) * 0.1;
    QuadForm::from_matrix(n, &m).expect("B Bᵀ + 0.1 I is SPD")
}

/// A metric `X -> g_X` on phase space.
pub trait QuadFormField: Send + Sync {
    fn n(&self) -> usize;
    fn at(&self, x: &[f64]) -> Result<QuadForm>;
}

#[derive(Clone, Debug)]
pub struct ConstantMetric(pub QuadForm);

impl QuadFormField for ConstantMetric {
    fn n(&self) -> usize {
        self.0.n
    }

    fn at(&self, _: &[f64]) -> Result<QuadForm> {
        Ok(self.0.clone())
    }
}

/// `w(X) |Z|^2`.
pub struct ScalarMetric {
    pub n: usize,
    pub weight: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl ScalarMetric {
    /// `<X>^s |Z|^2` with `<X> = (1 + |X|^2)^{1/2}`.
    pub fn bracket_power(n: usize, s: f64) -> Self {
        ScalarMetric {
            n,
            weight: Box::new(move |x| (1.0 + x.iter().map(|v| v * v).sum::<f64>()).powf(s / 2.0)),
        }
    }

    /// `e^{x_1^2} |Z|^2`.
    pub fn exp_square(n: usize) -> Self {
        ScalarMetric {
            n,
            weight: Box::new(|x| (x[0] * x[0]).exp()),
        }
    }
}

impl QuadFormField for ScalarMetric {
    fn n(&self) -> usize {
        self.n
    }

    fn at(&self, x: &[f64]) -> Result<QuadForm> {
        let w = (self.weight)(x);
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::NonFinite(format!("metric weight {w} at {x:?}")));
        }
        let d = 2 * self.n;
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = w;
        }
        Ok(QuadForm { n: self.n, a })
    }
}

/// Sample points drawn uniformly from `[-half_width, half_width]^{2n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub half_width: f64,
    pub count: usize,
    pub seed: u64,
}

impl Sampling {
    pub fn points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        if self.count == 0 {
            return Err(invalid("samples", "must be nonempty"));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(invalid("box", "must be positive and finite"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let l = self.half_width;
        Ok((0..self.count)
            .map(|_| (0..dim).map(|_| rng.random_range(-l..=l)).collect())
            .collect())
    }
}

/// Extreme generalized eigenvalues of `(B, A)`: the range of `Zᵀ B Z / Zᵀ A Z`.
pub fn relative_bounds(a: &QuadForm, b: &QuadForm) -> Result<(f64, f64)> {
    let l = Cholesky::new(a.matrix())
        .ok_or_else(|| invalid("A", "must be positive definite"))?
        .l();
    let li = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let m = &li * b.matrix() * li.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let e = SymmetricEigen::new(m);
    let lo = e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = e.eigenvalues.iter().copied().fold(0.0, f64::max);
    Ok((lo, hi))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlowlyVaryingReport {
    /// Least `C` with `C^{-1} g_Y <= g_X <= C g_Y` over the sampled pairs.
    pub c_est: f64,
    pub pairs: usize,
    /// Pairs where the metric could not be evaluated.
    pub failures: usize,
    /// Largest `max_j max(λ_j(X)/λ_j(Y), λ_j(Y)/λ_j(X))` over the pairs.
    pub lambda_ratio_max: f64,
    pub worst_pair: Option<(Vec<f64>, Vec<f64>)>,
}

/// Sampled slowly-varying constant. For every base point `X` the partner
/// points `Y` lie on the boundary sphere `g_X(Y - X) = c` in `directions`
/// random directions, where the ratio is extremal.
pub fn slowly_varying_report(g: &dyn QuadFormField, samples: &Sampling, c: f64) -> Result<SlowlyVaryingReport> {
    slowly_varying_report_with(g, samples, c, 8)
}

pub fn slowly_varying_report_with(
    g: &dyn QuadFormField,
    samples: &Sampling,
    c: f64,
    directions: usize,
) -> Result<SlowlyVaryingReport> {
    if !(c > 0.0) {
        return Err(invalid("c", "must be positive"));
    }
    let dim = 2 * g.n();
    let base = samples.points(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed ^ 0x5157_4c59);
    let units: Vec<Vec<Vec<f64>>> = base
        .iter()
        .map(|_| {
            (0..directions.max(1))
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                    v.into_iter().map(|x| x / r).collect()
                })
                .collect()
        })
        .collect();

    struct Acc {
        c: f64,
        lam: f64,
        fail: usize,
        worst: Option<(Vec<f64>, Vec<f64>)>,
    }
    let per: Vec<Acc> = base
        .par_iter()
        .zip(units.par_iter())
        .map(|(x, dirs)| {
            let mut acc = Acc {
                c: 1.0,
                lam: 1.0,
                fail: 0,
                worst: None,
            };
            let gx = match g.at(x) {
                Ok(q) => q,
                Err(_) => {
                    acc.fail += dirs.len();
                    acc.c = f64::INFINITY;
                    return acc;
                }
            };
            let root_inv = match Cholesky::new(gx.matrix()) {
                Some(ch) => ch.l().transpose().try_inverse(),
                None => None,
            };
            let Some(root_inv) = root_inv else {
                acc.fail += dirs.len();
                return acc;
            };
            let lx = symplectic_eigenvalues(&gx).ok();
            for u in dirs {
                // g_X(root_inv u) = |u|^2 = 1
                let step = &root_inv * nalgebra::DVector::from_column_slice(u) * c.sqrt();
                let y: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let ok = g.at(&y).and_then(|gy| {
                    let (lo, hi) = relative_bounds(&gx, &gy)?;
                    let ly = symplectic_eigenvalues(&gy)?;
                    Ok((hi.max(1.0 / lo), ly))
                });
                match ok {
                    Ok((ratio, ly)) => {
                        if ratio > acc.c || !ratio.is_finite() {
                            acc.c = ratio;
                            acc.worst = Some((x.clone(), y.clone()));
                        }
                        if let Some(lx) = &lx {
                            for (p, q) in lx.lambda.iter().zip(&ly.lambda) {
                                acc.lam = acc.lam.max(p / q).max(q / p);
                            }
                        }
                    }
                    Err(_) => {
                        acc.fail += 1;
                        acc.c = f64::INFINITY;
                    }
                }
            }
            acc
        })
        .collect();
    let mut report = SlowlyVaryingReport {
        c_est: 1.0,
        pairs: base.len() * directions.max(1),
        failures: 0,
        lambda_ratio_max: 1.0,
        worst_pair: None,
    };
    for a in per {
        report.failures += a.fail;
        report.lambda_ratio_max = report.lambda_ratio_max.max(a.lam);
        if a.c > report.c_est || (a.c.is_infinite() && report.c_est.is_finite()) {
            report.c_est = a.c;
            report.worst_pair = a.worst;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TemperateReport {
    /// `C(N_est)`, or the `N = 8` value if no exponent met the threshold.
    pub c_est: f64,
    pub n_est: Option<u32>,
    /// `(N, C(N))` with `C(N) = max ρ(X, Y) / (1 + g^σ_Y(X - Y))^N`.
    pub curve: Vec<(u32, f64)>,
    pub pairs: usize,
    pub threshold: f64,
}

const MAX_TEMPERATE_N: u32 = 8;

fn fit_curve(samples: &[(f64, f64)], threshold: f64) -> TemperateReport {
    let curve: Vec<(u32, f64)> = (0..=MAX_TEMPERATE_N)
        .map(|n| {
            let c = samples
                .iter()
                .map(|(rho, w)| rho / w.powi(n as i32))
                .fold(0.0, f64::max);
            (n, c)
        })
        .collect();
    let n_est = curve.iter().find(|(_, c)| *c <= threshold).map(|(n, _)| *n);
    let c_est = match n_est {
        Some(n) => curve[n as usize].1,
        None => curve.last().unwrap().1,
    };
    TemperateReport {
        c_est,
        n_est,
        curve,
        pairs: samples.len(),
        threshold,
    }
}

fn pair_points(g: &dyn QuadFormField, samples: &Sampling) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let dim = 2 * g.n();
    let xs = samples.points(dim)?;
    let ys = Sampling {
        seed: samples.seed.wrapping_add(0x7E4F),
        ..*samples
    }
    .points(dim)?;
    Ok(xs.into_iter().zip(ys).collect())
}

/// Fit of `g_Y(Z) <= C g_X(Z) (1 + g^σ_Y(X - Y))^N` over sampled pairs;
/// `N_est` is the least `N <= 8` whose `C(N)` is at most `threshold`.
pub fn temperate_report(g: &dyn QuadFormField, samples: &Sampling, threshold: f64) -> Result<TemperateReport> {
    let pairs = pair_points(g, samples)?;
    let data: Result<Vec<(f64, f64)>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let (gx, gy) = (g.at(x)?, g.at(y)?);
            let (_, rho) = relative_bounds(&gx, &gy)?;
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            Ok((rho, 1.0 + dual_metric(&gy)?.eval(&d)))
        })
        .collect();
    Ok(fit_curve(&data?, threshold))
}

/// Weight version: `m(Y) <= C m(X) (1 + g^σ_Y(X - Y))^N`.
pub fn temperate_weight_report(
    g: &dyn QuadFormField,
    m: &(dyn Fn(&[f64]) -> f64 + Sync),
    samples: &Sampling,
    threshold: f64,
) -> Result<TemperateReport> {
    let pairs = pair_points(g, samples)?;
    let data: Result<Vec<(f64, f64)>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let gy = g.at(y)?;
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let (mx, my) = (m(x), m(y));
            if !(mx > 0.0 && my.is_finite()) {
                return Err(Error::NonFinite(format!("weight at {x:?} or {y:?}")));
            }
            Ok((my / mx, 1.0 + dual_metric(&gy)?.eval(&d)))
        })
        .collect();
    Ok(fit_curve(&data?, threshold))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibleVerdict {
    pub slow_ok: bool,
    pub planck_ok: bool,
    pub c_est: f64,
    pub max_planck: f64,
    pub slow_cap: f64,
}

/// Default bound on the sampled slowly-varying constant accepted as "slowly varying".
pub const DEFAULT_SLOW_CAP: f64 = 100.0;

pub fn feasible_check(g: &dyn QuadFormField, samples: &Sampling, c: f64) -> Result<FeasibleVerdict> {
    feasible_check_with(g, samples, c, DEFAULT_SLOW_CAP)
}

pub fn feasible_check_with(
    g: &dyn QuadFormField,
    samples: &Sampling,
    c: f64,
    slow_cap: f64,
) -> Result<FeasibleVerdict> {
    let slow = slowly_varying_report(g, samples, c)?;
    let pts = samples.points(2 * g.n())?;
    let max_planck = pts
        .par_iter()
        .map(|x| g.at(x).and_then(|q| planck(&q)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(FeasibleVerdict {
        slow_ok: slow.c_est.is_finite() && slow.failures == 0 && slow.c_est <= slow_cap,
        planck_ok: max_planck <= 1.0 + 1e-12,
        c_est: slow.c_est,
        max_planck,
        slow_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag2(a: f64, b: f64) -> QuadForm {
        QuadForm::diagonal(&[a, b]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(QuadForm::new(1, vec![1.0, 0.5, 0.4, 1.0]).is_err());
        assert!(QuadForm::new(1, vec![1.0, 0.0, 0.0, -1.0]).is_err());
        assert!(QuadForm::new(1, vec![1.0, 0.0, 0.0]).is_err());
        assert!(QuadForm::new(1, vec![f64::NAN, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn dual_cases() {
        let i = QuadForm::identity(2);
        assert!(dual_metric(&i).unwrap().max_abs_diff(&i) < 1e-15);
        let d = dual_metric(&diag2(3.0, 3.0)).unwrap();
        assert!(d.max_abs_diff(&diag2(1.0 / 3.0, 1.0 / 3.0)) < 1e-15);
        let d = dual_metric(&diag2(4.0, 0.25)).unwrap();
        assert!(d.max_abs_diff(&diag2(4.0, 0.25)) < 1e-14);
        let d = dual_metric(&diag2(5.0, 2.0)).unwrap();
        assert!(d.max_abs_diff(&diag2(0.5, 0.2)) < 1e-15);
    }

    #[test]
    fn eigen_cases() {
        assert_eq!(symplectic_eigenvalues(&QuadForm::identity(3)).unwrap().lambda.len(), 3);
        assert!((planck(&QuadForm::identity(2)).unwrap() - 1.0).abs() < 1e-14);
        assert!((planck(&diag2(4.0, 1.0)).unwrap() - 2.0).abs() < 1e-14);
        assert!((capacity(&diag2(4.0, 1.0)).unwrap() - 2.0).abs() < 1e-14);
        // (z1, z2, ζ1, ζ2) with blocks diag(4,1) on (z1,ζ1) and diag(9,1) on (z2,ζ2)
        let q = QuadForm::diagonal(&[4.0, 9.0, 1.0, 1.0]).unwrap();
        assert!((capacity(&q).unwrap() - 6.0).abs() < 1e-12);
        let s = symplectic_eigenvalues(&q).unwrap();
        assert!((s.lambda[0] - 3.0).abs() < 1e-12 && (s.lambda[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn core_cases() {
        let i = QuadForm::identity(1);
        let r = symplectic_core(&i, 1e-12, 60).unwrap();
        assert_eq!(r.iterations, 1);
        let r = symplectic_core(&diag2(4.0, 1.0), 1e-12, 60).unwrap();
        assert!(r.form.max_abs_diff(&diag2(2.0, 0.5)) < 1e-8);
        assert!(r.iterations <= 60);
        assert!(matches!(
            symplectic_core(&diag2(1e6, 1.0), 1e-12, 2),
            Err(Error::IterationLimit { .. })
        ));
        assert!(symplectic_core(&i, 0.0, 5).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..50 {
            let a = random_spd(1 + k % 2, &mut rng);
            let r = symplectic_core(&a, 1e-12, 60).unwrap();
            assert!((planck(&r.form).unwrap() - 1.0).abs() < 1e-8);
            let again = symplectic_core(&r.form, 1e-12, 60).unwrap();
            assert!(again.form.max_abs_diff(&r.form) <= 1e-11);
            assert!(dual_metric(&r.form).unwrap().max_abs_diff(&r.form) <= 1e-11);
        }
    }

    #[test]
    fn sampled_sup_oracle_n1() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = random_spd(1, &mut rng);
            let (exact, sampled) = (planck(&a).unwrap(), planck_sampled(&a, 720).unwrap());
            assert!((exact - sampled).abs() <= 1e-3 * exact);
        }
        assert!(planck_sampled(&QuadForm::identity(2), 720).is_err());
    }

    #[test]
    fn slowly_varying_cases() {
        let s = Sampling {
            half_width: 10.0,
            count: 100,
            seed: 4,
        };
        let r = slowly_varying_report(&ConstantMetric(random_spd(1, &mut ChaCha8Rng::seed_from_u64(3))), &s, 0.25).unwrap();
        assert!((r.c_est - 1.0).abs() < 1e-9);
        // <X>^{-4} |Z|^2 lets Y reach the origin from far away
        let bad = ScalarMetric::bracket_power(1, -4.0);
        let small = slowly_varying_report(&bad, &Sampling { half_width: 3.0, ..s }, 0.25).unwrap();
        let large = slowly_varying_report(&bad, &Sampling { half_width: 30.0, ..s }, 0.25).unwrap();
        assert!(large.c_est > 10.0 * small.c_est, "{} vs {}", small.c_est, large.c_est);
        // e^{x^2}|Z|^2 stays bounded: |y - x| <= sqrt(c) e^{-x^2/2}
        let e = ScalarMetric::exp_square(1);
        let r = slowly_varying_report(&e, &Sampling { half_width: 5.0, ..s }, 0.25).unwrap();
        assert!(r.c_est <= (2.0 * 0.5 * (-0.5f64).exp() + 0.25).exp() + 1e-9);
    }

    #[test]
    fn temperate_and_feasible_cases() {
        let s = Sampling {
            half_width: 5.0,
            count: 200,
            seed: 8,
        };
        let r = temperate_report(&ConstantMetric(QuadForm::identity(1)), &s, 100.0).unwrap();
        assert_eq!(r.n_est, Some(0));
        assert!((r.c_est - 1.0).abs() < 1e-12);
        let v = feasible_check(&ConstantMetric(QuadForm::identity(1)), &s, 0.25).unwrap();
        assert!(v.slow_ok && v.planck_ok);
        let big = ConstantMetric(diag2(4.0, 1.0));
        assert!(!feasible_check(&big, &s, 0.25).unwrap().planck_ok);
        let w = temperate_weight_report(&ConstantMetric(QuadForm::identity(1)), &|_| 1.0, &s, 100.0).unwrap();
        assert_eq!(w.n_est, Some(0));
        assert!(Sampling { count: 0, ..s }.points(2).is_err());
    }

    fn spd_strategy() -> impl Strategy<Value = QuadForm> {
        (1usize..=2, any::<u64>()).prop_map(|(n, seed)| random_spd(n, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dual_is_an_involution(a in spd_strategy()) {
            let back = dual_metric(&dual_metric(&a).unwrap()).unwrap();
            let scale = a.a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!(back.max_abs_diff(&a) <= 1e-10 * scale);
        }

        #[test]
        fn dual_inverts_symplectic_spectrum(a in spd_strategy()) {
            let s = symplectic_eigenvalues(&a).unwrap().lambda;
            let mut d = symplectic_eigenvalues(&dual_metric(&a).unwrap()).unwrap().lambda;
            d.reverse();
            for (x, y) in s.iter().zip(&d) {
                prop_assert!((x * y - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn capacity_is_root_det(a in spd_strategy()) {
            let det = a.matrix().determinant();
            let cap = capacity(&a).unwrap();
            prop_assert!((cap - det.sqrt()).abs() <= 1e-10 * cap);
        }

        #[test]
        fn diagonal_planck(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            let p = planck(&diag2(a, b)).unwrap();
            prop_assert!((p - (a * b).sqrt()).abs() <= 1e-10 * p);
            let core = symplectic_core(&diag2(a, b), 1e-12, 60).unwrap().form;
            prop_assert!(core.max_abs_diff(&diag2((a / b).sqrt(), (b / a).sqrt())) <= 1e-8 * (a / b).sqrt().max((b / a).sqrt()));
        }
    }
}
