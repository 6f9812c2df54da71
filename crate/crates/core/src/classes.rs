//! Anisotropic symbol classes `S^{r,s}_{ρ,δ}`: their metric and weight,
//! closed forms for Planck's function and `Λ_G`, sampled seminorms, test
//! symbols, and the integer thresholds `κ_p`, `κ'_p`, `n_p`.

use crate::error::{invalid, Error, Result};
use crate::fourier::{fourier, Direction};
use crate::grid::{Field, PhaseGrid, SymbolField};
use crate::metric::{QuadForm, QuadFormField};
use crate::smooth::{directional_derivative, multi_indices, Smooth};
use crate::symbols::{arc, product, Bump, ClassPlain, Generator, Oscillatory};
use nalgebra::{Cholesky, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::sync::Arc;

/// Parameters `r, s, ρ, δ` of `S^{r,s}_{ρ,δ}(R^{2n})`. Index `j < n`
/// acts on `ξ_j`, index `n + j` on `x_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub n: usize,
    pub r: f64,
    pub s: f64,
    pub rho: Vec<f64>,
    pub delta: Vec<f64>,
}

fn bracket(v: &[f64]) -> f64 {
    (1.0 + v.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

impl ClassSpec {
    pub fn new(n: usize, r: f64, s: f64, rho: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if rho.len() != 2 * n || delta.len() != 2 * n {
            return Err(invalid("rho/delta", format!("need length 2n = {}", 2 * n)));
        }
        if ![r, s].iter().chain(&rho).chain(&delta).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("class parameters".into()));
        }
        Ok(ClassSpec { n, r, s, rho, delta })
    }

    /// `S^r_{ρ0,δ0}` embedded as `ρ = (ρ0,..,ρ0, 0,..,0)`, `δ = (δ0,..,δ0, 0,..,0)`, `s = 0`.
    pub fn hormander(n: usize, r: f64, rho0: f64, delta0: f64) -> Self {
        let half = |v: f64| (0..2 * n).map(|j| if j < n { v } else { 0.0 }).collect();
        ClassSpec {
            n,
            r,
            s: 0.0,
            rho: half(rho0),
            delta: half(delta0),
        }
    }

    /// Random spec with `r, s ∈ [-3, 3]` and `ρ, δ ∈ [-0.5, 1.5]`.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        ClassSpec {
            n,
            r: rng.random_range(-3.0..3.0),
            s: rng.random_range(-3.0..3.0),
            rho: (0..2 * n).map(|_| rng.random_range(-0.5..1.5)).collect(),
            delta: (0..2 * n).map(|_| rng.random_range(-0.5..1.5)).collect(),
        }
    }

    /// Diagonal of the class metric at `(x, ξ)`.
    pub fn metric_diagonal(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (bx, bxi) = (bracket(&p[..n]), bracket(&p[n..2 * n]));
        let mut d = vec![0.0; 2 * n];
        for j in 0..n {
            d[j] = bx.powf(-2.0 * self.rho[n + j]) * bxi.powf(2.0 * self.delta[j]);
            d[n + j] = bx.powf(2.0 * self.delta[n + j]) * bxi.powf(-2.0 * self.rho[j]);
        }
        d
    }

    /// Closed-form diagonal of `g^σ` at `(x, ξ)`.
    pub fn dual_diagonal(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (bx, bxi) = (bracket(&p[..n]), bracket(&p[n..2 * n]));
        let mut d = vec![0.0; 2 * n];
        for j in 0..n {
            d[j] = bx.powf(-2.0 * self.delta[n + j]) * bxi.powf(2.0 * self.rho[j]);
            d[n + j] = bx.powf(2.0 * self.rho[n + j]) * bxi.powf(-2.0 * self.delta[j]);
        }
        d
    }

    fn block_planck(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (bx, bxi) = (bracket(&p[..n]), bracket(&p[n..2 * n]));
        (0..n)
            .map(|j| {
                bx.powf(self.delta[n + j] - self.rho[n + j]) * bxi.powf(self.delta[j] - self.rho[j])
            })
            .collect()
    }

    /// Which hypotheses of the feasibility lemma hold.
    pub fn hypotheses(&self) -> Hypotheses {
        let rho_le_1 = self.rho.iter().all(|&r| r <= 1.0);
        let delta_ge_0 = self.delta.iter().all(|&d| d >= 0.0);
        let ordered = self.delta.iter().zip(&self.rho).all(|(d, r)| d <= r);
        let feasible = rho_le_1 && delta_ge_0 && ordered;
        Hypotheses {
            slowly_varying: rho_le_1 && delta_ge_0,
            feasible,
            strongly_feasible: feasible && self.delta.iter().all(|&d| d < 1.0),
            weight_continuous: rho_le_1 && delta_ge_0,
        }
    }
}

impl FromStr for ClassSpec {
    type Err = Error;

    /// `"n:r,s,rho_1..rho_2n,delta_1..delta_2n"`, or without `n:` for `n = 1`.
    fn from_str(text: &str) -> Result<Self> {
        let (n, rest) = match text.split_once(':') {
            Some((n, rest)) => (
                n.trim().parse::<usize>().map_err(|_| invalid("spec", "bad n"))?,
                rest,
            ),
            None => (1, text),
        };
        let v: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| invalid("spec", e.to_string()))?;
        if v.len() != 2 + 4 * n {
            return Err(invalid("spec", format!("expected {} numbers, got {}", 2 + 4 * n, v.len())));
        }
        ClassSpec::new(n, v[0], v[1], v[2..2 + 2 * n].to_vec(), v[2 + 2 * n..].to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// `ρ <= 1` and `0 <= δ`.
    pub slowly_varying: bool,
    /// `0 <= δ <= ρ <= 1`.
    pub feasible: bool,
    /// feasible and `δ < 1`.
    pub strongly_feasible: bool,
    /// `ρ <= 1` and `0 <= δ`.
    pub weight_continuous: bool,
}

/// A positive function on phase space.
#[derive(Clone)]
pub struct WeightField {
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl WeightField {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        WeightField { f: Arc::new(f) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl std::fmt::Debug for WeightField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("WeightField")
    }
}

/// The diagonal class metric as a [`QuadFormField`].
#[derive(Clone, Debug)]
pub struct ClassMetric(pub ClassSpec);

impl QuadFormField for ClassMetric {
    fn n(&self) -> usize {
        self.0.n
    }

    fn at(&self, x: &[f64]) -> Result<QuadForm> {
        let d = self.0.metric_diagonal(x);
        if d.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonFinite(format!("class metric at {x:?}")));
        }
        QuadForm::diagonal(&d)
    }
}

pub fn class_metric(spec: &ClassSpec) -> ClassMetric {
    ClassMetric(spec.clone())
}

/// `m(x, ξ) = <x>^s <ξ>^r`.
pub fn class_weight(spec: &ClassSpec) -> WeightField {
    let (n, r, s) = (spec.n, spec.r, spec.s);
    WeightField::new(move |p| bracket(&p[..n]).powf(s) * bracket(&p[n..2 * n]).powf(r))
}

/// `h_g = max_j <x>^{δ_{n+j}-ρ_{n+j}} <ξ>^{δ_j-ρ_j}`.
pub fn class_planck(spec: &ClassSpec) -> WeightField {
    let spec = spec.clone();
    WeightField::new(move |p| spec.block_planck(p).into_iter().fold(0.0, f64::max))
}

/// `Λ_G = Π_j (<x>^{δ_{n+j}-ρ_{n+j}} <ξ>^{δ_j-ρ_j} + 1)` for `G = g + g⁰`.
pub fn lambda_g(spec: &ClassSpec) -> WeightField {
    let spec = spec.clone();
    WeightField::new(move |p| spec.block_planck(p).into_iter().map(|h| h + 1.0).product())
}

/// Low-discrepancy points on the unit sphere of `R^dim`: equally spaced
/// half-circle angles for `dim = 2`, otherwise Halton points pushed
/// through Box–Muller and normalized. Antipodes are redundant for the
/// even functionals sampled here.
pub fn sphere_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0]];
    }
    if dim == 2 {
        return (0..count)
            .map(|i| {
                let th = std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
    }
    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let halton = |mut i: u64, b: u64| {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= b as f64;
            r += f * (i % b) as f64;
            i /= b;
        }
        r
    };
    let pairs = dim.div_ceil(2);
    (1..=count as u64)
        .map(|i| {
            let mut v = Vec::with_capacity(2 * pairs);
            for k in 0..pairs {
                let u1 = halton(i, PRIMES[2 * k]).max(1e-300);
                let u2 = halton(i, PRIMES[2 * k + 1]);
                let rad = (-2.0 * u1.ln()).sqrt();
                let th = 2.0 * std::f64::consts::PI * u2;
                v.push(rad * th.cos());
                v.push(rad * th.sin());
            }
            v.truncate(dim);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

/// Spectral partial derivative `∂^alpha a` of a sampled symbol.
pub fn spectral_partial(a: &SymbolField, alpha: &[u32]) -> SymbolField {
    let spec = fourier(a, Direction::Forward);
    let dual = spec.lattice();
    let vals: Vec<C64> = spec
        .values()
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let idx = dual.unravel(k);
            let mut m = C64::new(1.0, 0.0);
            for (d, &ad) in alpha.iter().enumerate() {
                // the Nyquist mode has no consistent derivative; drop it
                if ad > 0 && idx[d] == 0 {
                    return C64::new(0.0, 0.0);
                }
                m *= C64::new(0.0, dual.coord(idx[d])).powu(ad);
            }
            v * m
        })
        .collect();
    let spec = spec.rebuild(dual, vals);
    let back = fourier(&spec, Direction::Inverse);
    SymbolField::from_values(a.grid, back.into_values()).expect("same grid")
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `sup_{g_X(Y) <= 1} eval(Y)` for an even functional `eval`, over
/// `max(64k, 64)` low-discrepancy directions on the `g_X`-unit sphere,
/// refined locally around the best few.
fn sphere_sup(gx: &QuadForm, k: u32, eval: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let dim = gx.dim();
    if k == 0 {
        return Ok(eval(&vec![0.0; dim]));
    }
    let root_inv = Cholesky::new(gx.matrix())
        .and_then(|c| c.l().transpose().try_inverse())
        .ok_or_else(|| Error::Numeric("metric not positive definite".into()))?;
    let to_y = |u: &[f64]| -> Vec<f64> { (&root_inv * DVector::from_column_slice(u)).iter().copied().collect() };
    let units = sphere_points(dim, (64 * k as usize).max(64));
    let mut scored: Vec<(f64, Vec<f64>)> = units.into_iter().map(|u| (eval(&to_y(&u)), u)).collect();
    scored.sort_by(|p, q| q.0.total_cmp(&p.0));
    let mut best = scored[0].0;
    for (mut val, mut u) in scored.into_iter().take(4) {
        let mut step = 0.1;
        while step > 1e-4 {
            let mut improved = false;
            for axis in 0..dim {
                for sign in [-1.0, 1.0] {
                    let mut w = u.clone();
                    w[axis] += sign * step;
                    let norm = w.iter().map(|t| t * t).sum::<f64>().sqrt();
                    w.iter_mut().for_each(|t| *t /= norm);
                    let v = eval(&to_y(&w));
                    if v > val {
                        val = v;
                        u = w;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// `|f|_k^g(X)` for an analytic generator, exact derivatives.
pub fn generator_seminorm(f: &dyn Smooth, g: &dyn QuadFormField, k: u32, probes: &[Vec<f64>]) -> Result<Vec<f64>> {
    let dim = f.dim();
    if 2 * g.n() != dim || probes.iter().any(|p| p.len() != dim) {
        return Err(Error::GridMismatch("metric, generator and probe dimensions differ".into()));
    }
    probes
        .par_iter()
        .map(|x| sphere_sup(&g.at(x)?, k, |y| directional_derivative(f, x, y, k as usize).norm()))
        .collect()
}

/// `|a|_k^g(X) = sup_{g_X(Y) <= 1} |a^{(k)}(X; Y, ..., Y)|` at each probe.
///
/// Analytic generators give exact directional derivatives; sampled fields
/// use spectral partials (`k <= 4`) at the grid point nearest each probe.
pub fn seminorm_estimate(
    a: &SymbolField,
    g: &dyn QuadFormField,
    k: u32,
    probes: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let dim = 2 * a.grid.n;
    if g.n() != a.grid.n {
        return Err(Error::GridMismatch("metric and symbol dimensions differ".into()));
    }
    if probes.iter().any(|p| p.len() != dim) {
        return Err(invalid("probes", format!("points must have {dim} coordinates")));
    }
    if let Some(gen) = a.generator() {
        return generator_seminorm(gen.as_ref(), g, k, probes);
    }
    if k > 4 {
        return Err(Error::Unsupported(format!(
            "order {k} seminorms of sampled symbols (no generator) are limited to k <= 4"
        )));
    }
    let parts: Vec<(Vec<u32>, SymbolField)> = multi_indices(dim, k)
        .into_iter()
        .map(|alpha| {
            let d = spectral_partial(a, &alpha);
            (alpha, d)
        })
        .collect();
    let grid = a.grid.grid();
    probes
        .par_iter()
        .map(|x| {
            let at = grid.nearest(x);
            sphere_sup(&g.at(x)?, k, |y| {
                let mut acc = C64::new(0.0, 0.0);
                for (alpha, field) in &parts {
                    let mut mono = factorial(k);
                    for (ad, yd) in alpha.iter().zip(y) {
                        mono *= yd.powi(*ad as i32) / factorial(*ad);
                    }
                    acc += field.values()[at] * mono;
                }
                acc.norm()
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    /// `sup_probes |a|_k^g / m` for `k = 0..=N`.
    pub sup_ratios: Vec<f64>,
    /// Their sum, the sampled `|a|^g_{m,N}`.
    pub total: f64,
    pub probes: usize,
}

pub fn membership_report(a: &SymbolField, spec: &ClassSpec, order: u32, probes: &[Vec<f64>]) -> Result<MembershipReport> {
    if probes.is_empty() {
        return Err(invalid("probes", "must be nonempty"));
    }
    let g = class_metric(spec);
    let m = class_weight(spec);
    let mut sup_ratios = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        let vals = seminorm_estimate(a, &g, k, probes)?;
        let sup = vals
            .iter()
            .zip(probes)
            .map(|(v, p)| v / m.eval(p))
            .fold(0.0, f64::max);
        sup_ratios.push(sup);
    }
    Ok(MembershipReport {
        total: sup_ratios.iter().sum(),
        sup_ratios,
        probes: probes.len(),
    })
}

/// Test-symbol families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TestKind {
    /// `<x>^s <ξ>^r`.
    Plain,
    /// `<x>^s <ξ>^r e^{iω<ξ>}`.
    Oscillatory { omega: f64 },
    /// `<x>^s <ξ>^r` times a bump supported in `B_radius(0)`.
    Truncated { radius: f64 },
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "plain" => Ok(TestKind::Plain),
            "oscillatory" => Ok(TestKind::Oscillatory { omega: 1.0 }),
            "truncated" => Ok(TestKind::Truncated { radius: 1.5 }),
            other => Err(invalid("kind", format!("unknown kind '{other}' (plain|oscillatory|truncated)"))),
        }
    }
}

pub fn test_generator(spec: &ClassSpec, kind: TestKind) -> Result<Generator> {
    let plain = arc(ClassPlain {
        n: spec.n,
        r: spec.r,
        s: spec.s,
    });
    Ok(match kind {
        TestKind::Plain => plain,
        TestKind::Oscillatory { omega } => arc(Oscillatory {
            inner: plain,
            n: spec.n,
            omega,
        }),
        TestKind::Truncated { radius } => {
            if !(radius > 0.0) {
                return Err(invalid("radius", "must be positive"));
            }
            product(plain, arc(Bump::centered(2 * spec.n, radius)))
        }
    })
}

pub fn make_test_symbol(grid: PhaseGrid, spec: &ClassSpec, kind: TestKind) -> Result<SymbolField> {
    if grid.n != spec.n {
        return Err(Error::GridMismatch("grid and class dimensions differ".into()));
    }
    SymbolField::from_generator(grid, test_generator(spec, kind)?)
}

fn threshold_base(p: f64, n: usize) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("must lie in [1, ∞], got {p}")));
    }
    // nudge exact integers that rounding pushes just below
    Ok((2.0 * n as f64 * (1.0 / p - 0.5) + 1e-12).floor())
}

/// `κ_p = 2[2n(1/p - 1/2)] + 1` for `p < 2`, else `0`.
pub fn kappa(p: f64, n: usize) -> Result<u32> {
    let b = threshold_base(p, n)?;
    Ok(if p < 2.0 { 2 * b as u32 + 1 } else { 0 })
}

/// `κ'_p = [2n(1/p - 1/2)] + 1` for `p < 2`, `0` at `p = 2`; undefined beyond.
pub fn kappa_prime(p: f64, n: usize) -> Result<u32> {
    let b = threshold_base(p, n)?;
    if p < 2.0 {
        Ok(b as u32 + 1)
    } else if p == 2.0 {
        Ok(0)
    } else {
        Err(Error::Domain(format!("κ'_p is only defined for 1 <= p <= 2, got {p}")))
    }
}

/// `n_p = [2n(1/p - 1/2)]`.
pub fn n_p(p: f64, n: usize) -> Result<i64> {
    Ok(threshold_base(p, n)? as i64)
}
