//! Calabi's diastasis, the Fubini–Study diastasis on truncated projective
//! space, and the coherent-states map `φ_λ: Ω → ℂP^N`.

use num_complex::Complex;
use serde::Serialize;

use crate::bergman::{flatten, BergmanBasis};
use crate::domain::{DomainKind, DomainModel, KahlerPotential};
use crate::error::{Error, Result};
use crate::numerics::{default_step, fd_complex_hessian};
use crate::scalar::Real;

/// Euclidean tolerance below which two points are treated as equal.
/// A pair of points in `ℂⁿ`.
pub type PointPair<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

pub const POINT_TOL: f64 = 1e-12;
/// Pairs closer than this are excluded from injectivity sampling.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Representative of a point of `ℂP^N` with its squared norm cached.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint<T> {
    coords: Vec<Complex<T>>,
    norm_sq: T,
}

impl<T: Real> ProjectivePoint<T> {
    pub fn new(coords: Vec<Complex<T>>) -> Result<Self> {
        let norm_sq = coords.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
        if !(norm_sq > T::zero()) || !norm_sq.is_finite() {
            return Err(Error::InvalidProjectivePoint);
        }
        Ok(Self { coords, norm_sq })
    }

    pub fn coords(&self) -> &[Complex<T>] {
        &self.coords
    }

    pub fn norm_sq(&self) -> T {
        self.norm_sq
    }

    /// Another representative `c·v` of the same point.
    pub fn rescaled(&self, c: Complex<T>) -> Result<Self> {
        Self::new(self.coords.iter().map(|&v| v * c).collect())
    }
}

/// `D(x, y) = Φ(x) + Φ(y) - 2 Re Φ(x, ȳ)` for any potential in the gauge class.
pub fn diastasis<T: Real, P: KahlerPotential<T>>(potential: &P, x: &[Complex<T>], y: &[Complex<T>]) -> Result<T> {
    let model = potential.model();
    if !model.contains(x) || !model.contains(y) {
        return Err(Error::OutsideDomain);
    }
    let mixed = potential.potential_ext(x, y)?;
    Ok(potential.potential(x)? + potential.potential(y)? - T::lit(2.0) * mixed.re)
}

/// `|⟨p, q⟩|² / (‖p‖² ‖q‖²)`, i.e. `e^{-D_FS(p, q)}`; zero on the cut locus.
pub fn fs_exp_neg_diastasis<T: Real>(p: &ProjectivePoint<T>, q: &ProjectivePoint<T>) -> Result<T> {
    if p.coords.len() != q.coords.len() {
        return Err(Error::ContextMismatch {
            left: p.coords.len(),
            right: q.coords.len(),
        });
    }
    let inner = p
        .coords
        .iter()
        .zip(&q.coords)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj());
    Ok((inner.norm_sqr() / (p.norm_sq * q.norm_sq)).min(T::one()))
}

/// `φ_λ(z) = [s_0(z) : s_1(z) : …]` in the truncated orthonormal basis.
pub fn coherent_map<T: Real>(basis: &BergmanBasis<T>, z: &[Complex<T>]) -> Result<ProjectivePoint<T>> {
    ProjectivePoint::new(basis.values(z)?)
}

/// `|e^{-D_FS(φx, φy)} - e^{-λ D(x, y)}|`.
pub fn hereditary_check<T: Real>(basis: &BergmanBasis<T>, x: &[Complex<T>], y: &[Complex<T>]) -> Result<T> {
    let fs = fs_exp_neg_diastasis(&coherent_map(basis, x)?, &coherent_map(basis, y)?)?;
    let d = diastasis(basis.model(), x, y)?;
    Ok((fs - (-basis.lambda() * d).exp()).abs())
}

/// Entrywise relative residual between the finite-difference Hessian of
/// `log_k` and `λ ∂∂̄Φ`. Off-diagonal entries are scaled by the larger of
/// their own modulus and the geometric mean of the matching diagonal entries.
pub fn pullback_residual<T, L>(
    model: &DomainModel<T>,
    lambda: T,
    log_k: L,
    z: &[Complex<T>],
    h: T,
) -> Result<Vec<Vec<T>>>
where
    T: Real,
    L: Fn(&[Complex<T>]) -> T,
{
    if !model.contains(z) {
        return Err(Error::OutsideDomain);
    }
    let fd = fd_complex_hessian(log_k, z, h, |p| model.contains(p))?;
    let exact = model.metric_hessian(z)?;
    let n = z.len();
    let scaled = |i: usize, j: usize| exact[i][j] * lambda;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let want = scaled(i, j);
                    let scale = if i == j {
                        want.norm()
                    } else {
                        want.norm().max((scaled(i, i).norm() * scaled(j, j).norm()).sqrt())
                    };
                    (fd[i][j] - want).norm() / scale
                })
                .collect()
        })
        .collect())
}

/// Checks `φ_λ^* g_FS = λ g` at `z`; `h = None` uses the default step.
pub fn pullback_check<T: Real>(basis: &BergmanBasis<T>, z: &[Complex<T>], h: Option<T>) -> Result<Vec<Vec<T>>> {
    let model = basis.model();
    let h = match h {
        Some(h) => h,
        None => default_step(model.distance_to_boundary(z)?),
    };
    let log_k = |p: &[Complex<T>]| basis.kernel_diag(p).map(T::ln).unwrap_or_else(|_| T::nan());
    pullback_residual(model, basis.lambda(), log_k, z, h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    pub index: usize,
    pub value: T,
    pub kind: String,
}

/// Outcome of checking `0 < e^{-D} ≤ 1` with equality only on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpNegDiastasisReport<T> {
    pub pairs: usize,
    pub min: T,
    pub max: T,
    pub violations: Vec<Violation<T>>,
    pub values: Vec<T>,
}

impl<T> ExpNegDiastasisReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn separation<T: Real>(model: &DomainModel<T>, x: &[Complex<T>], y: &[Complex<T>]) -> T {
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr());
    match model.kind() {
        DomainKind::Disk | DomainKind::Ball => diffs.fold(T::zero(), |a, d| a + d).sqrt(),
        DomainKind::Polydisk => diffs.fold(T::zero(), T::max).sqrt(),
    }
}

/// Evaluates `e^{-D}` on each pair and records every departure from `(0, 1]`
/// and every value of 1 at distinct points.
pub fn exp_neg_diastasis_check<T: Real, P: KahlerPotential<T>>(
    potential: &P,
    pairs: &[PointPair<T>],
) -> Result<ExpNegDiastasisReport<T>> {
    let tol = T::lit(POINT_TOL);
    let mut values = Vec::with_capacity(pairs.len());
    let mut violations = Vec::new();
    for (index, (x, y)) in pairs.iter().enumerate() {
        let value = (-diastasis(potential, x, y)?).exp();
        let same = separation(potential.model(), x, y) <= tol;
        let kind = if !(value > T::zero()) {
            Some("nonpositive")
        } else if value > T::one() + tol {
            Some("exceeds one")
        } else if same && (value - T::one()).abs() > tol {
            Some("not one on the diagonal")
        } else if !same && value >= T::one() - tol {
            Some("one at distinct points")
        } else {
            None
        };
        if let Some(kind) = kind {
            violations.push(Violation {
                index,
                value,
                kind: kind.into(),
            });
        }
        values.push(value);
    }
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(ExpNegDiastasisReport {
        pairs: pairs.len(),
        min,
        max,
        violations,
        values,
    })
}

/// Outcome of the injectivity sampling of `φ_λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityReport<T> {
    pub pairs: usize,
    pub skipped: usize,
    pub min_separation: Option<T>,
    pub max_value: Option<T>,
    pub violations: Vec<Violation<T>>,
    pub values: Vec<T>,
}

impl<T> InjectivityReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Required gap below 1 for a pair at separation `sep`: half of the bound
/// `1 - (1 - sep²/4)^{λμ}` implied by the pseudo-hyperbolic distance.
pub fn injectivity_margin<T: Real>(lambda: T, mu: T, sep: T) -> T {
    let q = (T::one() - sep * sep / T::lit(4.0)).max(T::zero());
    T::lit(0.5) * (T::one() - q.powf(lambda * mu))
}

/// Checks `e^{-D_FS(φx, φy)} < 1 - margin` for distinct pairs.
pub fn injectivity_sample<T: Real>(basis: &BergmanBasis<T>, pairs: &[PointPair<T>]) -> Result<InjectivityReport<T>> {
    let model = basis.model();
    let mut values = Vec::with_capacity(pairs.len());
    let mut violations = Vec::new();
    let mut skipped = 0;
    let mut min_sep: Option<T> = None;
    for (index, (x, y)) in pairs.iter().enumerate() {
        let sep = separation(model, x, y);
        if sep < T::lit(MIN_SEPARATION) {
            skipped += 1;
            continue;
        }
        min_sep = Some(min_sep.map_or(sep, |m| m.min(sep)));
        let value = fs_exp_neg_diastasis(&coherent_map(basis, x)?, &coherent_map(basis, y)?)?;
        if !(value < T::one() - injectivity_margin(basis.lambda(), model.mu(), sep)) {
            violations.push(Violation {
                index,
                value,
                kind: "not separated".into(),
            });
        }
        values.push(value);
    }
    let max_value = values.iter().copied().reduce(T::max);
    Ok(InjectivityReport {
        pairs: pairs.len(),
        skipped,
        min_separation: min_sep,
        max_value,
        violations,
        values,
    })
}

/// Per-pair residuals of the hereditary identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidualReport<T> {
    pub lambda: T,
    pub max_residual: T,
    pub residuals: Vec<T>,
    pub pairs: Vec<(Vec<T>, Vec<T>)>,
}

pub fn hereditary_report<T: Real>(basis: &BergmanBasis<T>, pairs: &[PointPair<T>]) -> Result<PairResidualReport<T>> {
    let residuals = pairs
        .iter()
        .map(|(x, y)| hereditary_check(basis, x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(PairResidualReport {
        lambda: basis.lambda(),
        max_residual: residuals.iter().copied().fold(T::zero(), T::max),
        residuals,
        pairs: pairs.iter().map(|(x, y)| (flatten(x), flatten(y))).collect(),
    })
}
