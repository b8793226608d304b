//! Concrete homogeneous bounded domains: the unit disk, the unit ball `Bⁿ`
//! and the polydisk `Δⁿ`, each with the potential
//! `Φ(z) = -μ log(1 - |z|²)` (summed per factor on the polydisk).
//!
//! Points are slices of complex coordinates. The volume measure used across
//! the crate is `det(∂²Φ/∂z_i∂z̄_j) dV_Lebesgue`.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::{symmetric_root_data, RootSystemData, SymmetricDomainParams};
use crate::scalar::Real;

pub type Point<T> = Vec<Complex<T>>;

/// Sampling radius used for test points and automorphism targets.
pub const SAMPLE_RADIUS: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Disk,
    Ball,
    Polydisk,
}

/// JSON descriptor `{"kind": ..., "n": ..., "mu": ...}`.
///
/// `n` defaults to 1 and `mu` to the Bergman genus of the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDescriptor {
    pub kind: DomainKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainModel<T> {
    kind: DomainKind,
    dim: usize,
    mu: T,
}

pub(crate) fn inner<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    z.iter()
        .zip(w)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj())
}

pub(crate) fn norm_sqr<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> DomainModel<T> {
    pub fn new(kind: DomainKind, dim: usize, mu: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DomainError("dimension must be positive".into()));
        }
        if kind == DomainKind::Disk && dim != 1 {
            return Err(Error::DomainError("the disk is one-dimensional".into()));
        }
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::DomainError(format!("mu = {mu} must be positive")));
        }
        Ok(Self { kind, dim, mu })
    }

    pub fn disk(mu: T) -> Result<Self> {
        Self::new(DomainKind::Disk, 1, mu)
    }

    pub fn ball(n: usize, mu: T) -> Result<Self> {
        Self::new(DomainKind::Ball, n, mu)
    }

    pub fn polydisk(n: usize, mu: T) -> Result<Self> {
        Self::new(DomainKind::Polydisk, n, mu)
    }

    /// The model with `mu` equal to its Bergman genus.
    pub fn bergman(kind: DomainKind, dim: usize) -> Result<Self> {
        let genus = match kind {
            DomainKind::Disk | DomainKind::Polydisk => 2,
            DomainKind::Ball => dim + 1,
        };
        Self::new(kind, dim, T::from_usize_lossy(genus))
    }

    pub fn from_descriptor(desc: &DomainDescriptor) -> Result<Self> {
        let dim = desc.n.unwrap_or(1);
        match desc.mu {
            Some(mu) => Self::new(desc.kind, dim, T::lit(mu)),
            None => Self::bergman(desc.kind, dim),
        }
    }

    pub fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor {
            kind: self.kind,
            n: Some(self.dim),
            mu: self.mu.to_f64(),
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// Genus of the Bergman metric: 2 for disk and polydisk, `n + 1` for the ball.
    pub fn genus(&self) -> T {
        match self.kind {
            DomainKind::Disk | DomainKind::Polydisk => T::lit(2.0),
            DomainKind::Ball => T::from_usize_lossy(self.dim + 1),
        }
    }

    /// Root multiplicities with `γ` rescaled by `mu / genus`.
    pub fn root_data(&self) -> RootSystemData<T> {
        let (r, b) = match self.kind {
            DomainKind::Disk => (1, T::zero()),
            DomainKind::Ball => (1, T::from_usize_lossy(self.dim - 1)),
            DomainKind::Polydisk => (self.dim, T::zero()),
        };
        let params = SymmetricDomainParams { r, a: T::zero(), b };
        symmetric_root_data(&params)
            .expect("model multiplicities are valid")
            .scaled(self.mu / self.genus())
    }

    pub fn contains(&self, z: &[Complex<T>]) -> bool {
        z.len() == self.dim
            && z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
            && match self.kind {
                DomainKind::Disk | DomainKind::Ball => norm_sqr(z) < T::one(),
                DomainKind::Polydisk => z.iter().all(|c| c.norm_sqr() < T::one()),
            }
    }

    fn check(&self, z: &[Complex<T>]) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain)
        }
    }

    /// Euclidean distance to the boundary (per-coordinate minimum on the polydisk).
    pub fn distance_to_boundary(&self, z: &[Complex<T>]) -> Result<T> {
        self.check(z)?;
        Ok(match self.kind {
            DomainKind::Disk | DomainKind::Ball => T::one() - norm_sqr(z).sqrt(),
            DomainKind::Polydisk => z.iter().map(|c| T::one() - c.norm()).fold(T::infinity(), T::min),
        })
    }

    /// Largest coordinate radius relevant to kernel truncation.
    pub fn radius(&self, z: &[Complex<T>]) -> T {
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => norm_sqr(z).sqrt(),
            DomainKind::Polydisk => z.iter().map(|c| c.norm()).fold(T::zero(), T::max),
        }
    }

    pub fn potential(&self, z: &[Complex<T>]) -> Result<T> {
        self.check(z)?;
        Ok(match self.kind {
            DomainKind::Disk | DomainKind::Ball => -self.mu * (-norm_sqr(z)).ln_1p(),
            DomainKind::Polydisk => z
                .iter()
                .fold(T::zero(), |acc, c| acc - self.mu * (-c.norm_sqr()).ln_1p()),
        })
    }

    /// Sesquianalytic extension `Φ(z, w̄)`: holomorphic in `z`, antiholomorphic in `w`.
    pub fn potential_ext(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>> {
        self.check(z)?;
        self.check(w)?;
        let one = Complex::new(T::one(), T::zero());
        let mu = Complex::new(self.mu, T::zero());
        Ok(match self.kind {
            DomainKind::Disk | DomainKind::Ball => -mu * (one - inner(z, w)).ln(),
            DomainKind::Polydisk => z
                .iter()
                .zip(w)
                .fold(czero(), |acc, (a, b)| acc - mu * (one - a * b.conj()).ln()),
        })
    }

    /// Complex Hessian `∂²Φ/∂z_i∂z̄_j`.
    pub fn metric_hessian(&self, z: &[Complex<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        self.check(z)?;
        let n = self.dim;
        let mut h = vec![vec![czero(); n]; n];
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => {
                let gap = T::one() - norm_sqr(z);
                for i in 0..n {
                    for j in 0..n {
                        let mut v = z[i].conj() * z[j] / (gap * gap);
                        if i == j {
                            v += Complex::new(T::one() / gap, T::zero());
                        }
                        h[i][j] = v * self.mu;
                    }
                }
            }
            DomainKind::Polydisk => {
                for (i, c) in z.iter().enumerate() {
                    let gap = T::one() - c.norm_sqr();
                    h[i][i] = Complex::new(self.mu / (gap * gap), T::zero());
                }
            }
        }
        Ok(h)
    }

    /// `det(∂²Φ/∂z_i∂z̄_j)`, the density of the invariant volume against Lebesgue measure.
    pub fn metric_density(&self, z: &[Complex<T>]) -> Result<T> {
        self.check(z)?;
        Ok(match self.kind {
            DomainKind::Disk | DomainKind::Ball => {
                let gap = T::one() - norm_sqr(z);
                self.mu.powi(self.dim as i32) / gap.powi(self.dim as i32 + 1)
            }
            DomainKind::Polydisk => z.iter().fold(T::one(), |acc, c| {
                let gap = T::one() - c.norm_sqr();
                acc * self.mu / (gap * gap)
            }),
        })
    }

    /// Uniformly distributed interior point with (coordinate) radius at most `max_radius`.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, max_radius: T) -> Point<T> {
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => sample_ball(rng, self.dim, max_radius),
            DomainKind::Polydisk => (0..self.dim).flat_map(|_| sample_ball(rng, 1, max_radius)).collect(),
        }
    }
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re), T::lit(im))
}

fn sample_ball<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, max_radius: T) -> Point<T> {
    let dir: Point<T> = (0..n).map(|_| gaussian(rng)).collect();
    let len = norm_sqr(&dir).sqrt();
    let u: f64 = rng.random();
    let radius = max_radius * T::lit(u.powf(1.0 / (2 * n) as f64));
    dir.into_iter().map(|c| c * (radius / len)).collect()
}

/// A Kähler potential on a domain model together with its sesquianalytic extension.
pub trait KahlerPotential<T: Real> {
    fn model(&self) -> &DomainModel<T>;
    fn potential(&self, z: &[Complex<T>]) -> Result<T>;
    fn potential_ext(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>>;
}

impl<T: Real> KahlerPotential<T> for DomainModel<T> {
    fn model(&self) -> &DomainModel<T> {
        self
    }

    fn potential(&self, z: &[Complex<T>]) -> Result<T> {
        DomainModel::potential(self, z)
    }

    fn potential_ext(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>> {
        DomainModel::potential_ext(self, z, w)
    }
}

/// The potential `Φ - Re φ` for a holomorphic gauge `φ`; same metric as `Φ`.
#[derive(Debug, Clone)]
pub struct Gauged<'a, T, F> {
    pub model: &'a DomainModel<T>,
    pub gauge: F,
}

impl<'a, T: Real, F: Fn(&[Complex<T>]) -> Complex<T>> Gauged<'a, T, F> {
    pub fn new(model: &'a DomainModel<T>, gauge: F) -> Self {
        Self { model, gauge }
    }
}

impl<T: Real, F: Fn(&[Complex<T>]) -> Complex<T>> KahlerPotential<T> for Gauged<'_, T, F> {
    fn model(&self) -> &DomainModel<T> {
        self.model
    }

    fn potential(&self, z: &[Complex<T>]) -> Result<T> {
        Ok(self.model.potential(z)? - (self.gauge)(z).re)
    }

    fn potential_ext(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>> {
        let half = T::lit(0.5);
        Ok(self.model.potential_ext(z, w)? - ((self.gauge)(z) + (self.gauge)(w).conj()) * half)
    }
}

/// Linear-fractional map `z ↦ (A z + b) / (c·z + d)` given by a `(k+1)×(k+1)`
/// matrix in `U(k, 1)`, acting on `k` consecutive coordinates.
#[derive(Debug, Clone, PartialEq)]
struct Block<T> {
    k: usize,
    m: Vec<Complex<T>>,
}

impl<T: Real> Block<T> {
    fn identity(k: usize) -> Self {
        let mut m = vec![czero(); (k + 1) * (k + 1)];
        for i in 0..=k {
            m[i * (k + 1) + i] = Complex::new(T::one(), T::zero());
        }
        Self { k, m }
    }

    fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.m[i * (self.k + 1) + j]
    }

    /// Boost in `U(k, 1)` sending 0 to `a`.
    fn transvection(a: &[Complex<T>]) -> Self {
        let k = a.len();
        let s2 = norm_sqr(a);
        let c = T::one() / (T::one() - s2).sqrt();
        let mut out = Self::identity(k);
        let n = k + 1;
        if s2 > T::zero() {
            let f = (c - T::one()) / s2;
            for i in 0..k {
                for j in 0..k {
                    out.m[i * n + j] += a[i] * a[j].conj() * f;
                }
            }
        }
        for i in 0..k {
            out.m[i * n + k] = a[i] * c;
            out.m[k * n + i] = a[i].conj() * c;
        }
        out.m[k * n + k] = Complex::new(c, T::zero());
        out
    }

    fn unitary(u: &[Vec<Complex<T>>]) -> Self {
        let k = u.len();
        let mut out = Self::identity(k);
        for i in 0..k {
            for j in 0..k {
                out.m[i * (k + 1) + j] = u[i][j];
            }
        }
        out
    }

    fn apply(&self, z: &[Complex<T>]) -> Point<T> {
        let k = self.k;
        let denom = (0..k).fold(self.at(k, k), |acc, j| acc + self.at(k, j) * z[j]);
        (0..k)
            .map(|i| (0..k).fold(self.at(i, k), |acc, j| acc + self.at(i, j) * z[j]) / denom)
            .collect()
    }

    fn compose(&self, inner: &Self) -> Self {
        let n = self.k + 1;
        let mut m = vec![czero(); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).fold(czero(), |acc, l| acc + self.at(i, l) * inner.at(l, j));
            }
        }
        Self { k: self.k, m }
    }

    /// `J M† J`, the inverse of `M ∈ U(k, 1)` with `J = diag(1, …, 1, -1)`.
    fn inverse(&self) -> Self {
        let n = self.k + 1;
        let sign = |i: usize| if i == self.k { -T::one() } else { T::one() };
        let mut m = vec![czero(); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.at(j, i).conj() * (sign(i) * sign(j));
            }
        }
        Self { k: self.k, m }
    }

    /// Complex Jacobian determinant `det(M) / (c·z + d)^{k+1}`.
    fn jacobian_det(&self, z: &[Complex<T>]) -> Complex<T> {
        let k = self.k;
        let denom = (0..k).fold(self.at(k, k), |acc, j| acc + self.at(k, j) * z[j]);
        determinant(self.k + 1, self.m.clone()) / denom.powi(k as i32 + 1)
    }
}

fn determinant<T: Real>(n: usize, mut m: Vec<Complex<T>>) -> Complex<T> {
    let mut det = Complex::new(T::one(), T::zero());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a * n + col]
                    .norm()
                    .partial_cmp(&m[b * n + col].norm())
                    .expect("finite")
            })
            .expect("nonempty");
        if m[pivot * n + col].norm() == T::zero() {
            return czero();
        }
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            for j in col..n {
                let v = m[col * n + j];
                m[row * n + j] -= f * v;
            }
        }
    }
    det
}

/// Holomorphic automorphism of a domain model.
///
/// Disk and ball automorphisms are a single `U(n, 1)` block; polydisk
/// automorphisms act factorwise with one `U(1, 1)` block per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Automorphism<T> {
    kind: DomainKind,
    blocks: Vec<Block<T>>,
}

impl<T: Real> Automorphism<T> {
    pub fn identity(model: &DomainModel<T>) -> Self {
        let blocks = match model.kind {
            DomainKind::Disk | DomainKind::Ball => vec![Block::identity(model.dim)],
            DomainKind::Polydisk => (0..model.dim).map(|_| Block::identity(1)).collect(),
        };
        Self {
            kind: model.kind,
            blocks,
        }
    }

    fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.k).sum()
    }

    fn split<'a>(&'a self, z: &'a [Complex<T>]) -> impl Iterator<Item = (&'a Block<T>, &'a [Complex<T>])> + 'a {
        let mut offset = 0;
        self.blocks.iter().map(move |b| {
            let part = &z[offset..offset + b.k];
            offset += b.k;
            (b, part)
        })
    }

    /// `h ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.kind, other.kind, "automorphisms of different domains");
        Self {
            kind: self.kind,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.compose(b))
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            kind: self.kind,
            blocks: self.blocks.iter().map(Block::inverse).collect(),
        }
    }

    /// Complex Jacobian determinant of the map at `z`.
    pub fn jacobian_det(&self, z: &[Complex<T>]) -> Complex<T> {
        self.split(z).fold(Complex::new(T::one(), T::zero()), |acc, (b, part)| {
            acc * b.jacobian_det(part)
        })
    }
}

/// Applies `h` to an interior point.
pub fn apply_automorphism<T: Real>(h: &Automorphism<T>, z: &[Complex<T>]) -> Result<Point<T>> {
    if z.len() != h.dim() {
        return Err(Error::OutsideDomain);
    }
    let inside = match h.kind {
        DomainKind::Disk | DomainKind::Ball => norm_sqr(z) < T::one(),
        DomainKind::Polydisk => z.iter().all(|c| c.norm_sqr() < T::one()),
    };
    if !inside {
        return Err(Error::OutsideDomain);
    }
    Ok(h.split(z).flat_map(|(b, part)| b.apply(part)).collect())
}

/// Automorphism mapping the origin to `target`.
pub fn transvection_to<T: Real>(model: &DomainModel<T>, target: &[Complex<T>]) -> Result<Automorphism<T>> {
    model.check(target)?;
    let blocks = match model.kind {
        DomainKind::Disk | DomainKind::Ball => vec![Block::transvection(target)],
        DomainKind::Polydisk => target
            .iter()
            .map(|c| Block::transvection(std::slice::from_ref(c)))
            .collect(),
    };
    Ok(Automorphism {
        kind: model.kind,
        blocks,
    })
}

/// Disk Möbius map `z ↦ (z - a) / (1 - ā z)`, sending `a` to the origin.
pub fn mobius<T: Real>(model: &DomainModel<T>, a: Complex<T>) -> Result<Automorphism<T>> {
    if model.kind != DomainKind::Disk {
        return Err(Error::UnsupportedModel("Möbius maps outside the disk".into()));
    }
    transvection_to(model, &[-a])
}

/// Haar-distributed unitary matrix by Gram–Schmidt on complex Gaussian columns.
fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Vec<Complex<T>>> {
    let mut cols: Vec<Point<T>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Point<T> = (0..k).map(|_| gaussian(rng)).collect();
        for c in &cols {
            let proj = inner(&v, c);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= ci * proj;
            }
        }
        let len = norm_sqr(&v).sqrt();
        if len > T::lit(1e-6) {
            cols.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    (0..k).map(|i| (0..k).map(|j| cols[j][i]).collect()).collect()
}

/// A uniformly phased rotation followed by a transvection to a uniformly
/// sampled interior point of radius at most [`SAMPLE_RADIUS`].
pub fn random_automorphism_with<T: Real, R: Rng + ?Sized>(model: &DomainModel<T>, rng: &mut R) -> Automorphism<T> {
    let cap = T::lit(SAMPLE_RADIUS);
    let blocks = match model.kind {
        DomainKind::Disk | DomainKind::Ball => {
            let rot = Block::unitary(&random_unitary(rng, model.dim));
            let target = sample_ball(rng, model.dim, cap);
            vec![Block::transvection(&target).compose(&rot)]
        }
        DomainKind::Polydisk => (0..model.dim)
            .map(|_| {
                let rot = Block::unitary(&random_unitary(rng, 1));
                Block::transvection(&sample_ball(rng, 1, cap)).compose(&rot)
            })
            .collect(),
    };
    Automorphism {
        kind: model.kind,
        blocks,
    }
}

pub fn random_automorphism<T: Real>(model: &DomainModel<T>, seed: u64) -> Automorphism<T> {
    random_automorphism_with(model, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fd_del_delbar;
    use crate::rootdata::is_nontrivial;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn potential_examples() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        assert_eq!(disk.potential(&[c(0.0, 0.0)]).unwrap(), 0.0);
        assert_relative_eq!(
            disk.potential(&[c(0.5, 0.0)]).unwrap(),
            -2.0 * 0.75_f64.ln(),
            max_relative = 1e-14
        );
        assert!((disk.potential(&[c(0.5, 0.0)]).unwrap() - 0.575364).abs() < 1e-6);
        let ball = DomainModel::<f64>::ball(2, 3.0).unwrap();
        assert!((ball.potential(&[c(0.3, 0.0), c(0.4, 0.0)]).unwrap() - 0.863046).abs() < 1e-6);
        let poly = DomainModel::<f64>::polydisk(2, 2.0).unwrap();
        assert_relative_eq!(
            poly.potential(&[c(0.5, 0.0), c(0.0, 0.5)]).unwrap(),
            -4.0 * 0.75_f64.ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn potential_blows_up_at_boundary_and_rejects_exterior() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        let near = disk.potential(&[c(1.0 - 1e-12, 0.0)]).unwrap();
        assert!(near > 50.0);
        assert_eq!(disk.potential(&[c(1.0, 0.0)]), Err(Error::OutsideDomain));
        assert_eq!(disk.potential(&[c(0.8, 0.8)]), Err(Error::OutsideDomain));
        let poly = DomainModel::<f64>::polydisk(2, 2.0).unwrap();
        assert!(poly.potential(&[c(0.9, 0.0), c(0.0, 0.9)]).is_ok());
        let ball = DomainModel::<f64>::ball(2, 3.0).unwrap();
        assert_eq!(ball.potential(&[c(0.9, 0.0), c(0.0, 0.9)]), Err(Error::OutsideDomain));
        assert_eq!(ball.potential(&[c(0.1, 0.0)]), Err(Error::OutsideDomain));
    }

    #[test]
    fn extension_examples() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        let z = [c(0.5, 0.0)];
        assert_eq!(disk.potential_ext(&z, &[c(0.0, 0.0)]).unwrap(), c(0.0, 0.0));
        // ⟨0.5, 0.5i⟩ = 0.5 · conj(0.5i) = -0.25i
        let got = disk.potential_ext(&z, &[c(0.0, 0.5)]).unwrap();
        let want = c(-2.0, 0.0) * c(1.0, 0.25).ln();
        assert!((got - want).norm() < 1e-15);
        let swapped = disk.potential_ext(&[c(0.0, 0.5)], &z).unwrap();
        assert!((swapped - want.conj()).norm() < 1e-15);
    }

    #[test]
    fn extension_is_hermitian_and_restricts_to_potential() {
        let mut rng = rng();
        for model in [
            DomainModel::<f64>::disk(2.0).unwrap(),
            DomainModel::<f64>::ball(3, 4.0).unwrap(),
            DomainModel::<f64>::polydisk(2, 1.5).unwrap(),
        ] {
            for _ in 0..100 {
                let z = model.sample_point(&mut rng, 0.95);
                let w = model.sample_point(&mut rng, 0.95);
                let zw = model.potential_ext(&z, &w).unwrap();
                let wz = model.potential_ext(&w, &z).unwrap();
                assert!((zw - wz.conj()).norm() < 1e-13);
                let diag = model.potential_ext(&z, &z).unwrap();
                assert!((diag.re - model.potential(&z).unwrap()).abs() < 1e-13);
                assert!(diag.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn density_examples() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        assert_eq!(disk.metric_density(&[c(0.0, 0.0)]).unwrap(), 2.0);
        assert!((disk.metric_density(&[c(0.5, 0.0)]).unwrap() - 2.0 / 0.5625).abs() < 1e-12);
    }

    #[test]
    fn density_matches_fd_of_potential() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        let mut rng = rng();
        for _ in 0..50 {
            let z = disk.sample_point(&mut rng, 0.9)[0];
            let h = 1e-3 * (1.0 - z.norm()).min(1.0);
            let fd = fd_del_delbar(|w| disk.potential(&[w]).unwrap(), z, h.max(1e-4), |w| w.norm() < 1.0).unwrap();
            let exact = disk.metric_density(&[z]).unwrap();
            assert!((fd - exact).abs() / exact < 1e-5, "{fd} vs {exact}");
        }
    }

    #[test]
    fn ball_density_is_hessian_determinant() {
        let ball = DomainModel::<f64>::ball(2, 3.0).unwrap();
        let z = [c(0.2, -0.1), c(0.3, 0.4)];
        let h = ball.metric_hessian(&z).unwrap();
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        assert!(det.im.abs() < 1e-12);
        assert_relative_eq!(det.re, ball.metric_density(&z).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn bergman_root_data_thresholds() {
        let disk = DomainModel::<f64>::bergman(DomainKind::Disk, 1).unwrap();
        let rd = disk.root_data();
        assert_eq!(rd.gamma, vec![2.0]);
        assert!(is_nontrivial(&rd, 0.6).unwrap());
        assert!(!is_nontrivial(&rd, 0.5).unwrap());

        let ball = DomainModel::<f64>::bergman(DomainKind::Ball, 2).unwrap();
        assert_eq!(ball.root_data().gamma, vec![3.0]);
        assert_eq!(ball.root_data().b, vec![1.0]);

        let poly = DomainModel::<f64>::bergman(DomainKind::Polydisk, 3).unwrap();
        assert_eq!(poly.root_data().gamma, vec![2.0; 3]);

        // mu = 4 on the disk halves the threshold
        let scaled = DomainModel::<f64>::disk(4.0).unwrap();
        assert!(is_nontrivial(&scaled.root_data(), 0.26).unwrap());
        assert!(!is_nontrivial(&scaled.root_data(), 0.25).unwrap());
    }

    #[test]
    fn descriptor_defaults_to_bergman_genus() {
        let desc = DomainDescriptor {
            kind: DomainKind::Ball,
            n: Some(3),
            mu: None,
        };
        let m = DomainModel::<f64>::from_descriptor(&desc).unwrap();
        assert_eq!(m.mu(), 4.0);
        assert_eq!(m.dim(), 3);
        assert!(DomainModel::<f64>::from_descriptor(&DomainDescriptor {
            kind: DomainKind::Disk,
            n: Some(2),
            mu: None
        })
        .is_err());
    }

    #[test]
    fn transvection_and_mobius() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        let t = transvection_to(&disk, &[c(0.5, 0.0)]).unwrap();
        let img = apply_automorphism(&t, &[c(0.0, 0.0)]).unwrap();
        assert!((img[0] - c(0.5, 0.0)).norm() < 1e-15);

        let h = mobius(&disk, c(0.5, 0.0)).unwrap();
        assert!(apply_automorphism(&h, &[c(0.5, 0.0)]).unwrap()[0].norm() < 1e-15);

        let mut rng = rng();
        for _ in 0..100 {
            let a = disk.sample_point(&mut rng, 0.9)[0];
            let z = disk.sample_point(&mut rng, 0.99);
            let h = mobius(&disk, a).unwrap();
            let direct = (z[0] - a) / (c(1.0, 0.0) - a.conj() * z[0]);
            let img = apply_automorphism(&h, &z).unwrap();
            assert!((img[0] - direct).norm() < 1e-12);
            let back = apply_automorphism(&h.inverse(), &img).unwrap();
            assert!((back[0] - z[0]).norm() < 1e-10);
        }
    }

    #[test]
    fn automorphisms_preserve_domain_and_invert() {
        let mut rng = rng();
        for model in [
            DomainModel::<f64>::disk(2.0).unwrap(),
            DomainModel::<f64>::ball(2, 3.0).unwrap(),
            DomainModel::<f64>::ball(3, 4.0).unwrap(),
            DomainModel::<f64>::polydisk(2, 2.0).unwrap(),
        ] {
            for _ in 0..1000 {
                let h = random_automorphism_with(&model, &mut rng);
                let z = model.sample_point(&mut rng, 0.999);
                let img = apply_automorphism(&h, &z).unwrap();
                assert!(model.contains(&img));
                let back = apply_automorphism(&h.inverse(), &img).unwrap();
                assert!(norm_sqr(&back.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>()).sqrt() < 1e-8);
            }
            let h1 = random_automorphism(&model, 1);
            let h2 = random_automorphism(&model, 2);
            let z = model.sample_point(&mut rng, 0.8);
            let seq = apply_automorphism(&h1, &apply_automorphism(&h2, &z).unwrap()).unwrap();
            let comp = apply_automorphism(&h1.compose(&h2), &z).unwrap();
            for (a, b) in seq.iter().zip(&comp) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn seeded_automorphisms_are_deterministic() {
        let ball = DomainModel::<f64>::ball(2, 3.0).unwrap();
        assert_eq!(random_automorphism(&ball, 99), random_automorphism(&ball, 99));
        assert_ne!(random_automorphism(&ball, 99), random_automorphism(&ball, 100));
    }

    #[test]
    fn invariant_volume() {
        // density(h z) |det J_h(z)|² = density(z)
        let mut rng = rng();
        for model in [
            DomainModel::<f64>::disk(2.0).unwrap(),
            DomainModel::<f64>::ball(2, 3.0).unwrap(),
            DomainModel::<f64>::polydisk(2, 2.0).unwrap(),
        ] {
            for _ in 0..200 {
                let h = random_automorphism_with(&model, &mut rng);
                let z = model.sample_point(&mut rng, 0.9);
                let hz = apply_automorphism(&h, &z).unwrap();
                let lhs = model.metric_density(&hz).unwrap() * h.jacobian_det(&z).norm_sqr();
                let rhs = model.metric_density(&z).unwrap();
                assert!((lhs - rhs).abs() / rhs < 1e-6, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn potential_changes_by_pluriharmonic_term_under_automorphisms() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        let mut rng = rng();
        for _ in 0..20 {
            let h = random_automorphism_with(&disk, &mut rng);
            let z = disk.sample_point(&mut rng, 0.6)[0];
            let diff = |w: C| {
                let hw = apply_automorphism(&h, &[w]).unwrap();
                disk.potential(&hw).unwrap() - disk.potential(&[w]).unwrap()
            };
            let v = fd_del_delbar(diff, z, 1e-3, |w| w.norm() < 0.999).unwrap();
            assert!(v.abs() < 1e-5, "{v}");
        }
    }

    #[test]
    fn gauged_potential_keeps_extension_properties() {
        let disk = DomainModel::<f64>::disk(2.0).unwrap();
        let gauged = Gauged::new(&disk, |z: &[C]| z[0].powi(3));
        let mut rng = rng();
        for _ in 0..50 {
            let z = disk.sample_point(&mut rng, 0.9);
            let w = disk.sample_point(&mut rng, 0.9);
            let diag = gauged.potential_ext(&z, &z).unwrap();
            assert!((diag.re - gauged.potential(&z).unwrap()).abs() < 1e-13);
            let zw = gauged.potential_ext(&z, &w).unwrap();
            assert!((zw - gauged.potential_ext(&w, &z).unwrap().conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn single_precision_model() {
        let disk = DomainModel::<f32>::disk(2.0).unwrap();
        let v = disk.potential(&[Complex::new(0.5f32, 0.0)]).unwrap();
        assert!((v - 0.575_364).abs() < 1e-5);
    }
}
