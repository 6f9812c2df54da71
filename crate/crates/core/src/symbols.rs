//! Concrete generators used as symbols and test functions, plus seeded
//! random families.

use crate::jet::Jet;
use crate::smooth::{coordinate_jets, Smooth};
use num_complex::Complex64 as C64;
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Generator = Arc<dyn Smooth>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn bracket_sq(coords: &[Jet], order: usize) -> Jet {
    coords
        .iter()
        .fold(Jet::real(1.0, order), |acc, c| &acc + &(c * c))
}

/// Complex polynomial in `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        Self::monomial(dim, &vec![0; dim], c)
    }

    pub fn monomial(dim: usize, exps: &[u32], c: C64) -> Self {
        assert_eq!(exps.len(), dim);
        let mut p = Self::zero(dim);
        p.add_term(exps.to_vec(), c);
        p
    }

    /// The linear form `<v, X>`.
    pub fn linear(v: &[f64]) -> Self {
        let dim = v.len();
        let mut p = Self::zero(dim);
        for (i, &vi) in v.iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = 1;
            p.add_term(e, C64::new(vi, 0.0));
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C64) {
        let entry = self.terms.entry(exps).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        self.terms.retain(|_, v| *v != C64::new(0.0, 0.0));
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, a: C64) -> Polynomial {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * a);
        }
        out
    }

    pub fn differentiate(&self, axis: usize) -> Polynomial {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut e2 = e.clone();
                e2[axis] -= 1;
                out.add_term(e2, c * e[axis] as f64);
            }
        }
        out
    }

    /// `Φ(D) p = -Σ_j ∂_{x_j} ∂_{ξ_j} p` with coordinates ordered `(x, ξ)`.
    pub fn apply_phi(&self) -> Polynomial {
        let n = self.dim / 2;
        let mut out = Self::zero(self.dim);
        for j in 0..n {
            out = out.add(&self.differentiate(j).differentiate(n + j));
        }
        out.scale(C64::new(-1.0, 0.0))
    }

    /// Exact `e^{icΦ(D)} p`, minus the first `skip` terms of the series.
    pub fn exp_phi_tail(&self, c: f64, skip: usize) -> Polynomial {
        let mut out = Self::zero(self.dim);
        let mut term = self.clone();
        let mut k = 0usize;
        let mut coeff = C64::new(1.0, 0.0);
        while !term.is_zero() {
            if k >= skip {
                out = out.add(&term.scale(coeff));
            }
            k += 1;
            coeff = coeff * I * c / k as f64;
            term = term.apply_phi();
        }
        out
    }
}

impl Smooth for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        let xs = coordinate_jets(point, dir, order);
        let mut acc = Jet::zero(order);
        for (e, c) in &self.terms {
            let mut t = Jet::constant(*c, order);
            for (x, &p) in xs.iter().zip(e) {
                if p > 0 {
                    t = &t * &x.powi(p);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    fn as_polynomial(&self) -> Option<&Polynomial> {
        Some(self)
    }
}

/// `amp * exp(-|X - c|^2 / (2 w^2) + i <freq, X>)`.
#[derive(Clone, Debug)]
pub struct Gaussian {
    pub amp: C64,
    pub center: Vec<f64>,
    pub width: f64,
    pub freq: Vec<f64>,
}

impl Gaussian {
    /// `amp * exp(-|X|^2)` in `dim` variables.
    pub fn standard(dim: usize, amp: f64) -> Self {
        Gaussian {
            amp: C64::new(amp, 0.0),
            center: vec![0.0; dim],
            width: std::f64::consts::FRAC_1_SQRT_2,
            freq: vec![0.0; dim],
        }
    }
}

impl Smooth for Gaussian {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        let xs = coordinate_jets(point, dir, order);
        let mut arg = Jet::zero(order);
        let inv = -0.5 / (self.width * self.width);
        for ((x, &c), &f) in xs.iter().zip(&self.center).zip(&self.freq) {
            let d = x.add_const(C64::new(-c, 0.0));
            arg = &arg + &(&d * &d).scale(C64::new(inv, 0.0));
            arg = &arg + &x.scale(I * f);
        }
        arg.exp().scale(self.amp)
    }
}

/// `Σ c_k f_k`.
#[derive(Clone, Debug)]
pub struct Sum {
    pub parts: Vec<(C64, Generator)>,
}

impl Smooth for Sum {
    fn dim(&self) -> usize {
        self.parts[0].1.dim()
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        self.parts.iter().fold(Jet::zero(order), |acc, (c, f)| {
            &acc + &f.jet(point, dir, order).scale(*c)
        })
    }

    fn support_radius(&self) -> Option<f64> {
        self.parts
            .iter()
            .map(|(_, f)| f.support_radius())
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
    }
}

#[derive(Clone, Debug)]
pub struct Product {
    pub left: Generator,
    pub right: Generator,
}

impl Smooth for Product {
    fn dim(&self) -> usize {
        self.left.dim()
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        &self.left.jet(point, dir, order) * &self.right.jet(point, dir, order)
    }

    fn support_radius(&self) -> Option<f64> {
        match (self.left.support_radius(), self.right.support_radius()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// `exp(f)`.
#[derive(Clone, Debug)]
pub struct ExpOf {
    pub inner: Generator,
}

impl Smooth for ExpOf {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        self.inner.jet(point, dir, order).exp()
    }
}

/// `f(T X)` for a linear map `T` given row-major.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub inner: Generator,
    pub matrix: Vec<f64>,
}

impl Pullback {
    fn map(&self, v: &[f64]) -> Vec<f64> {
        let d = v.len();
        (0..d)
            .map(|i| (0..d).map(|j| self.matrix[i * d + j] * v[j]).sum())
            .collect()
    }
}

impl Smooth for Pullback {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        self.inner.jet(&self.map(point), &self.map(dir), order)
    }
}

/// The class weight `<x>^s <ξ>^r` on `R^{2n}`.
#[derive(Clone, Debug)]
pub struct ClassPlain {
    pub n: usize,
    pub r: f64,
    pub s: f64,
}

impl Smooth for ClassPlain {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        let xs = coordinate_jets(point, dir, order);
        let bx = bracket_sq(&xs[..self.n], order).powf(self.s / 2.0);
        let bxi = bracket_sq(&xs[self.n..], order).powf(self.r / 2.0);
        &bx * &bxi
    }
}

/// `f * exp(i ω <ξ>)`.
#[derive(Clone, Debug)]
pub struct Oscillatory {
    pub inner: Generator,
    pub n: usize,
    pub omega: f64,
}

impl Smooth for Oscillatory {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        let xs = coordinate_jets(point, dir, order);
        let phase = bracket_sq(&xs[self.n..], order)
            .sqrt()
            .scale(I * self.omega)
            .exp();
        &self.inner.jet(point, dir, order) * &phase
    }
}

/// Smooth bump `exp(1 - 1/(1 - |X - c|^2/ρ^2))` supported in `B_ρ(c)`, with
/// peak value one.
#[derive(Clone, Debug)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Bump {
    pub fn centered(dim: usize, radius: f64) -> Self {
        Bump {
            center: vec![0.0; dim],
            radius,
        }
    }
}

impl Smooth for Bump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn jet(&self, point: &[f64], dir: &[f64], order: usize) -> Jet {
        let xs = coordinate_jets(point, dir, order);
        let inv = 1.0 / (self.radius * self.radius);
        let mut u = Jet::zero(order);
        for (x, &c) in xs.iter().zip(&self.center) {
            let d = x.add_const(C64::new(-c, 0.0));
            u = &u + &(&d * &d).scale(C64::new(inv, 0.0));
        }
        if u.value().re >= 1.0 {
            return Jet::zero(order);
        }
        // 1 - 1/(1 - u)
        let one_minus = (-&u).add_const(C64::new(1.0, 0.0));
        (-&one_minus.recip()).add_const(C64::new(1.0, 0.0)).exp()
    }

    fn support_radius(&self) -> Option<f64> {
        Some(self.center.iter().map(|c| c * c).sum::<f64>().sqrt() + self.radius)
    }
}

pub fn arc<S: Smooth + 'static>(s: S) -> Generator {
    Arc::new(s)
}

pub fn product(a: Generator, b: Generator) -> Generator {
    Arc::new(Product { left: a, right: b })
}

pub fn scaled(a: Generator, c: f64) -> Generator {
    Arc::new(Sum {
        parts: vec![(C64::new(c, 0.0), a)],
    })
}

/// Rank-one Gaussian projector symbol `2 exp(-|X|^2)`.
pub fn projector_symbol(n: usize) -> Generator {
    arc(Gaussian::standard(2 * n, 2f64.powi(n as i32)))
}

/// Random smooth, rapidly decaying symbol: a sum of three modulated Gaussians.
///
/// Centres lie in `|c_i| <= 1`, widths in `[0.5, 0.85]` and modulations in
/// `|f_i| <= 1.5`, so that the symbol and its Fourier transforms are
/// negligible at the edge of an `L = 8` box.
pub fn random_gaussian_mix<R: Rng>(dim: usize, rng: &mut R) -> Generator {
    let parts = (0..3)
        .map(|_| {
            let g = Gaussian {
                amp: C64::new(1.0, 0.0),
                center: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
                width: rng.random_range(0.5..0.85),
                freq: (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect(),
            };
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, arc(g))
        })
        .collect();
    arc(Sum { parts })
}

/// Random real symbol from the same family (real parts, no modulation).
pub fn random_real_mix<R: Rng>(dim: usize, rng: &mut R) -> Generator {
    let parts = (0..3)
        .map(|_| {
            let g = Gaussian {
                amp: C64::new(1.0, 0.0),
                center: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
                width: rng.random_range(0.5..0.85),
                freq: vec![0.0; dim],
            };
            (C64::new(rng.random_range(-1.0..1.0), 0.0), arc(g))
        })
        .collect();
    arc(Sum { parts })
}

/// Random smooth symbol supported in `B_radius(0)`: a bump of random
/// centre and size times a random modulated polynomial factor.
pub fn random_compact_bump<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> Generator {
    let r = rng.random_range(0.5 * radius..radius);
    let room = radius - r;
    let center: Vec<f64> = (0..dim)
        .map(|_| rng.random_range(-1.0..1.0) * room / (dim as f64).sqrt())
        .collect();
    let bump = arc(Bump { center, radius: r });
    let mut poly = Polynomial::constant(dim, C64::new(1.0, 0.0));
    for i in 0..dim {
        let mut e = vec![0; dim];
        e[i] = 1;
        poly.add_term(e, C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)));
    }
    let wave = Gaussian {
        amp: C64::new(1.0, 0.0),
        center: vec![0.0; dim],
        width: 1e6,
        freq: (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect(),
    };
    product(product(bump, arc(poly)), arc(wave))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::partial;

    #[test]
    fn weyl_to_kohn_nirenberg_of_x_xi() {
        // e^{icΦ(D)}(xξ) = xξ - ic
        let p = Polynomial::monomial(2, &[1, 1], C64::new(1.0, 0.0));
        let q = p.exp_phi_tail(0.5, 0);
        let mut want = p.clone();
        want.add_term(vec![0, 0], C64::new(0.0, -0.5));
        assert_eq!(q, want);
        assert!(p.exp_phi_tail(0.5, 2).is_zero());
    }

    #[test]
    fn bump_is_flat_outside_support() {
        let b = Bump::centered(2, 1.5);
        assert_eq!(b.value(&[1.5, 0.0]), C64::new(0.0, 0.0));
        assert!((b.value(&[0.0, 0.0]).re - 1.0).abs() < 1e-15);
        assert_eq!(b.support_radius(), Some(1.5));
    }

    #[test]
    fn class_plain_first_derivative() {
        let a = ClassPlain { n: 1, r: 2.0, s: 0.0 };
        // ∂ξ <ξ>^2 = 2ξ
        let d = partial(&a, &[0.3, 1.7], &[0, 1]);
        assert!((d.re - 3.4).abs() < 1e-12);
    }
}
