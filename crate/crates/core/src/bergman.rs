//! Weighted Bergman spaces `ℋ_λ` of holomorphic functions square-integrable
//! against `e^{-λΦ} det(∂∂̄Φ) dV`.
//!
//! On the disk, ball and polydisk the monomials `z^m` are orthogonal, with
//! squared norms given by (products of) Beta integrals:
//!
//! * ball `Bⁿ`, `α = λμ - n - 1`: `‖z^m‖² = (πμ)ⁿ m! Γ(α+1) / Γ(n + |m| + α + 1)`
//! * polydisk: the product of one-dimensional disk norms
//!
//! The reproducing kernel is then `K(z, w̄) = c_λ e^{λΦ(z, w̄)}` with
//! `c_λ = Γ(λμ) / ((πμ)ⁿ Γ(λμ - n))` on the ball (and the per-factor product on
//! the polydisk), so Rawnsley's `ε = e^{-λΦ} K(z, z̄)` is the constant `c_λ`.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{
    apply_automorphism, random_automorphism_with, DomainKind, DomainModel, KahlerPotential, Point, SAMPLE_RADIUS,
};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::numerics::{gauss_jacobi, log_gamma, log_gamma_ratio};
use crate::rootdata::{is_nontrivial, lambda0};
use crate::scalar::Real;

/// Hard cap on the truncation degree.
pub const MAX_DEGREE: usize = 400;
/// Default relative tail tolerance for kernel truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Number of automorphism-orbit points sampled by [`balanced_verdict`].
pub const ORBIT_SAMPLES: usize = 20;

/// How monomial norms are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormBackend {
    /// Gamma-ratio closed forms.
    ClosedForm,
    /// Nested Gauss–Jacobi quadrature. The order is raised automatically when
    /// a monomial's degree would exceed the rule's polynomial exactness.
    Quadrature { order: usize },
}

/// Fails with [`Error::TrivialSpace`] unless the strict nontriviality criterion holds.
pub fn require_nontrivial<T: Real>(model: &DomainModel<T>, lambda: T) -> Result<()> {
    let rd = model.root_data();
    if is_nontrivial(&rd, lambda)? {
        Ok(())
    } else {
        Err(Error::TrivialSpace {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            lambda0: lambda0(&rd)?.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn check_index<T: Real>(model: &DomainModel<T>, m: &[usize]) -> Result<()> {
    if m.len() == model.dim() {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "multi-degree has {} entries, domain dimension is {}",
            m.len(),
            model.dim()
        )))
    }
}

/// `ln ‖z^m‖²` in closed form.
pub fn log_monomial_norm_sq<T: Real>(model: &DomainModel<T>, lambda: T, m: &[usize]) -> Result<T> {
    require_nontrivial(model, lambda)?;
    check_index(model, m)?;
    let mu = model.mu();
    let pi_mu = (T::PI() * mu).ln();
    let ln_fact = |k: usize| log_gamma(T::from_usize_lossy(k + 1));
    match model.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            let n = model.dim();
            let alpha1 = lambda * mu - T::from_usize_lossy(n);
            let total: usize = m.iter().sum();
            let mut acc =
                T::from_usize_lossy(n) * pi_mu + log_gamma_ratio(alpha1, alpha1 + T::from_usize_lossy(n + total))?;
            for &k in m {
                acc += ln_fact(k)?;
            }
            Ok(acc)
        }
        DomainKind::Polydisk => {
            let a = lambda * mu - T::one();
            m.iter().try_fold(T::zero(), |acc, &k| {
                Ok(acc + pi_mu + ln_fact(k)? + log_gamma_ratio(a, a + T::from_usize_lossy(k + 1))?)
            })
        }
    }
}

/// `∫_{simplex} Π t_i^{m_i} (1 - Σ t)^α dt` by peeling one coordinate at a time.
fn dirichlet_by_quadrature<T: Real>(m: &[usize], alpha: T, order: usize) -> Result<T> {
    let mut acc = T::one();
    let mut remaining: usize = m.iter().sum();
    for (i, &mi) in m.iter().enumerate() {
        remaining -= mi;
        let dims_left = m.len() - i - 1;
        let a = alpha + T::from_usize_lossy(remaining + dims_left);
        let rule = gauss_jacobi(order.max(mi / 2 + 2), a)?;
        acc *= rule.integrate(|t| t.powi(mi as i32));
    }
    Ok(acc)
}

/// Squared norm `‖z^m‖²` in `ℋ_λ`.
pub fn monomial_norm_sq<T: Real>(model: &DomainModel<T>, lambda: T, m: &[usize], backend: NormBackend) -> Result<T> {
    match backend {
        NormBackend::ClosedForm => Ok(log_monomial_norm_sq(model, lambda, m)?.exp()),
        NormBackend::Quadrature { order } => {
            require_nontrivial(model, lambda)?;
            check_index(model, m)?;
            let mu = model.mu();
            let pi_mu = T::PI() * mu;
            match model.kind() {
                DomainKind::Disk | DomainKind::Ball => {
                    let n = model.dim();
                    let alpha = lambda * mu - T::from_usize_lossy(n + 1);
                    Ok(pi_mu.powi(n as i32) * dirichlet_by_quadrature(m, alpha, order)?)
                }
                DomainKind::Polydisk => {
                    let alpha = lambda * mu - T::lit(2.0);
                    m.iter().try_fold(T::one(), |acc, &k| {
                        Ok(acc * pi_mu * dirichlet_by_quadrature(&[k], alpha, order)?)
                    })
                }
            }
        }
    }
}

/// Analytic constant `c_λ` of `K = c_λ e^{λΦ}`.
pub fn kernel_constant<T: Real>(model: &DomainModel<T>, lambda: T) -> Result<T> {
    require_nontrivial(model, lambda)?;
    let mu = model.mu();
    let n = model.dim();
    match model.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            let lm = lambda * mu;
            let log_c =
                log_gamma_ratio(lm, lm - T::from_usize_lossy(n))? - T::from_usize_lossy(n) * (T::PI() * mu).ln();
            Ok(log_c.exp())
        }
        DomainKind::Polydisk => Ok(((lambda * mu - T::one()) / (T::PI() * mu)).powi(n as i32)),
    }
}

/// Closed-form kernel `c_λ exp(λ Φ(z, w̄))`.
pub fn kernel_closed<T: Real>(
    model: &DomainModel<T>,
    lambda: T,
    z: &[Complex<T>],
    w: &[Complex<T>],
) -> Result<Complex<T>> {
    let c = kernel_constant(model, lambda)?;
    Ok((model.potential_ext(z, w)? * lambda).exp() * c)
}

/// Exponent `κ` with `K(z, z̄)/c_λ ≤ Σ_k (κ)_k/k! ρ^{2k}` at coordinate radius `ρ`.
pub fn tail_exponent<T: Real>(model: &DomainModel<T>, lambda: T) -> T {
    match model.kind() {
        DomainKind::Disk | DomainKind::Ball => lambda * model.mu(),
        DomainKind::Polydisk => T::from_usize_lossy(model.dim()) * lambda * model.mu(),
    }
}

/// Smallest degree `N` whose kernel tail beyond `N` is below `tol` relative to
/// the diagonal kernel, for points of coordinate radius at most `rho`.
///
/// With `a_k = (κ)_k/k! ρ^{2k}` the term ratio `ρ²(κ+k)/(k+1)` is monotone in
/// `k`, so the tail past `N` is bounded geometrically by `a_{N+1} / (1 - q)`.
pub fn truncation_degree<T: Real>(kappa: T, rho: T, tol: T, cap: usize) -> Result<usize> {
    if !(rho >= T::zero() && rho < T::one()) {
        return Err(Error::OutsideDomain);
    }
    let s = rho * rho;
    if s == T::zero() {
        return Ok(0);
    }
    let ln_s = s.ln();
    let ln_tol = tol.ln();
    // ln a_{k}, starting at a_0 = 1
    let mut ln_a = T::zero();
    let search_limit = cap.max(1) * 50;
    for n in 0..search_limit {
        let k1 = T::from_usize_lossy(n + 1);
        let ln_next = ln_a + ((kappa + k1 - T::one()) / k1).ln() + ln_s;
        let ratio = s * (kappa + k1) / (k1 + T::one());
        let q = ratio.max(s);
        if q < T::one() && ln_next - (T::one() - q).ln() < ln_tol {
            if n > cap {
                return Err(Error::TruncationInsufficient { needed: n, cap });
            }
            return Ok(n);
        }
        ln_a = ln_next;
    }
    Err(Error::TruncationInsufficient {
        needed: search_limit,
        cap,
    })
}

/// Multi-indices of total degree `≤ degree`, graded then lexicographic.
pub fn multi_indices(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            rec(dim - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=degree {
        rec(dim, total, &mut Vec::with_capacity(dim), &mut out);
    }
    out
}

/// Truncation policy: points up to `max_radius`, tail below `tol`, degree at most `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy<T> {
    pub max_radius: T,
    pub tol: T,
    pub cap: usize,
}

impl<T: Real> Default for TruncationPolicy<T> {
    fn default() -> Self {
        Self {
            max_radius: T::lit(SAMPLE_RADIUS),
            tol: T::lit(DEFAULT_TAIL_TOL),
            cap: MAX_DEGREE,
        }
    }
}

/// Truncated orthonormal monomial basis of `ℋ_λ`.
#[derive(Debug, Clone)]
pub struct BergmanBasis<T> {
    model: DomainModel<T>,
    lambda: T,
    degree: usize,
    max_radius: T,
    indices: Vec<Vec<usize>>,
    log_norms: Vec<T>,
    c_lambda_observed: T,
}

impl<T: Real> BergmanBasis<T> {
    /// Closed-form norms, degree from the tail rule.
    pub fn new(model: &DomainModel<T>, lambda: T, policy: TruncationPolicy<T>) -> Result<Self> {
        Self::with_backend(model, lambda, policy, NormBackend::ClosedForm)
    }

    pub fn with_backend(
        model: &DomainModel<T>,
        lambda: T,
        policy: TruncationPolicy<T>,
        backend: NormBackend,
    ) -> Result<Self> {
        require_nontrivial(model, lambda)?;
        let degree = truncation_degree(tail_exponent(model, lambda), policy.max_radius, policy.tol, policy.cap)?;
        Self::build(model, lambda, degree, policy.max_radius, backend)
    }

    /// Fixed truncation degree.
    pub fn with_degree(model: &DomainModel<T>, lambda: T, degree: usize, backend: NormBackend) -> Result<Self> {
        Self::build(model, lambda, degree, T::lit(SAMPLE_RADIUS), backend)
    }

    fn build(model: &DomainModel<T>, lambda: T, degree: usize, max_radius: T, backend: NormBackend) -> Result<Self> {
        require_nontrivial(model, lambda)?;
        let indices = multi_indices(model.dim(), degree);
        let log_norms = indices
            .iter()
            .map(|m| match backend {
                NormBackend::ClosedForm => log_monomial_norm_sq(model, lambda, m),
                NormBackend::Quadrature { .. } => monomial_norm_sq(model, lambda, m, backend).map(T::ln),
            })
            .collect::<Result<Vec<_>>>()?;
        if log_norms.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationError("non-finite monomial norm".into()));
        }
        let mut basis = Self {
            model: model.clone(),
            lambda,
            degree,
            max_radius,
            indices,
            log_norms,
            c_lambda_observed: T::zero(),
        };
        // ε sampled on a ring of half the admissible radius
        let ring = 8;
        let mut sum = T::zero();
        for j in 0..ring {
            let angle = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(ring);
            let mut z = vec![Complex::new(T::zero(), T::zero()); model.dim()];
            z[0] = Complex::from_polar(max_radius * T::lit(0.5), angle);
            sum += basis.epsilon(&z)?;
        }
        basis.c_lambda_observed = sum / T::from_usize_lossy(ring);
        Ok(basis)
    }

    pub fn model(&self) -> &DomainModel<T> {
        &self.model
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn max_radius(&self) -> T {
        self.max_radius
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn norms_sq(&self) -> Vec<T> {
        self.log_norms.iter().map(|v| v.exp()).collect()
    }

    pub fn log_norms_sq(&self) -> &[T] {
        &self.log_norms
    }

    /// Mean ε measured on a ring at half the admissible radius.
    pub fn c_lambda_observed(&self) -> T {
        self.c_lambda_observed
    }

    /// Orthonormal basis values `s_j(z) = z^{m_j} / ‖z^{m_j}‖`.
    pub fn values(&self, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if !self.model.contains(z) {
            return Err(Error::OutsideDomain);
        }
        let one = Complex::new(T::one(), T::zero());
        let powers: Vec<Vec<Complex<T>>> = z
            .iter()
            .map(|&c| {
                std::iter::successors(Some(one), |&p| Some(p * c))
                    .take(self.degree + 1)
                    .collect()
            })
            .collect();
        let half = T::lit(0.5);
        Ok(self
            .indices
            .iter()
            .zip(&self.log_norms)
            .map(|(m, &ln)| {
                let mono = m.iter().enumerate().fold(one, |acc, (i, &k)| acc * powers[i][k]);
                mono * (-half * ln).exp()
            })
            .collect())
    }

    /// Truncated kernel `Σ_j s_j(z) conj(s_j(w))`.
    pub fn kernel_series(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>> {
        let sz = self.values(z)?;
        let sw = self.values(w)?;
        Ok(sz
            .iter()
            .zip(&sw)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj()))
    }

    /// Diagonal kernel `Σ_j |s_j(z)|²`.
    pub fn kernel_diag(&self, z: &[Complex<T>]) -> Result<T> {
        Ok(self.values(z)?.iter().fold(T::zero(), |acc, s| acc + s.norm_sqr()))
    }

    /// Rawnsley's `ε(z) = e^{-λΦ(z)} K(z, z̄)`.
    pub fn epsilon(&self, z: &[Complex<T>]) -> Result<T> {
        Ok((-self.lambda * self.model.potential(z)?).exp() * self.kernel_diag(z)?)
    }
}

fn policy_for<T: Real>(model: &DomainModel<T>, points: &[&[Complex<T>]]) -> TruncationPolicy<T> {
    let r = points
        .iter()
        .map(|z| model.radius(z))
        .fold(T::lit(SAMPLE_RADIUS), T::max);
    TruncationPolicy {
        max_radius: r,
        ..TruncationPolicy::default()
    }
}

/// Series kernel with a truncation sized for `z` and `w`.
pub fn kernel_series<T: Real>(
    model: &DomainModel<T>,
    lambda: T,
    z: &[Complex<T>],
    w: &[Complex<T>],
) -> Result<Complex<T>> {
    if !model.contains(z) || !model.contains(w) {
        return Err(Error::OutsideDomain);
    }
    BergmanBasis::new(model, lambda, policy_for(model, &[z, w]))?.kernel_series(z, w)
}

/// Rawnsley's ε at a single point.
pub fn epsilon<T: Real>(model: &DomainModel<T>, lambda: T, z: &[Complex<T>]) -> Result<T> {
    require_nontrivial(model, lambda)?;
    if !model.contains(z) {
        return Err(Error::OutsideDomain);
    }
    BergmanBasis::new(model, lambda, policy_for(model, &[z]))?.epsilon(z)
}

/// Matrix `A_jk = ∫ f(w) s_k(w) conj(s_j(w)) e^{-λΦ} det(∂∂̄Φ) dV` over the
/// first `dim` orthonormal monomials of the disk.
///
/// Quadrature factorizes as Gauss–Jacobi in `t = |w|²` (weight
/// `(1-t)^{λμ-2}`) times a trapezoid rule in the angle. The angular sums are
/// computed once per radial node and Fourier mode.
pub fn weighted_gram<T, F>(model: &DomainModel<T>, lambda: T, dim: usize, order: usize, f: F) -> Result<CMatrix<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    if model.kind() != DomainKind::Disk {
        return Err(Error::UnsupportedModel(format!(
            "{:?} quadrature of operator matrices",
            model.kind()
        )));
    }
    require_nontrivial(model, lambda)?;
    if dim == 0 {
        return Ok(CMatrix::zeros(0));
    }
    let alpha = lambda * model.mu() - T::lit(2.0);
    let order = order.max(dim / 2 + 8);
    let rule = gauss_jacobi(order, alpha)?;
    let angles = (4 * order).max(2 * dim + 32);
    let log_norms = (0..dim)
        .map(|k| log_monomial_norm_sq(model, lambda, &[k]))
        .collect::<Result<Vec<_>>>()?;

    let modes = 2 * dim - 1; // d = j - k in -(dim-1)..=(dim-1)
    let czero = Complex::new(T::zero(), T::zero());
    let inv_l = T::one() / T::from_usize_lossy(angles);
    let mut fourier = vec![czero; rule.order * modes];
    for (i, (t, _)) in rule.iter().enumerate() {
        let r = t.sqrt();
        for l in 0..angles {
            let theta = T::TAU() * T::from_usize_lossy(l) * inv_l;
            let fv = f(Complex::from_polar(r, theta));
            if !(fv.re.is_finite() && fv.im.is_finite()) {
                return Err(Error::IntegrationError(
                    "symbol is not finite on the quadrature grid".into(),
                ));
            }
            let step = Complex::from_polar(T::one(), -theta);
            // e^{-i d θ} for d = -(dim-1)
            let mut phase = Complex::from_polar(T::one(), theta * T::from_usize_lossy(dim - 1));
            for slot in fourier[i * modes..(i + 1) * modes].iter_mut() {
                *slot += fv * phase * inv_l;
                phase *= step;
            }
        }
    }

    let ln_t: Vec<T> = rule.nodes.iter().map(|t| t.ln()).collect();
    let ln_w: Vec<T> = rule.weights.iter().map(|w| w.ln()).collect();
    let pi_mu = T::PI() * model.mu();
    let half = T::lit(0.5);
    let mut out = CMatrix::zeros(dim);
    for j in 0..dim {
        for k in 0..dim {
            let d = j + dim - 1 - k;
            let shift = half * (T::from_usize_lossy(j + k) * T::one());
            let scale = half * (log_norms[j] + log_norms[k]);
            let mut acc = czero;
            for i in 0..rule.order {
                let w = (ln_w[i] + shift * ln_t[i] - scale).exp();
                acc += fourier[i * modes + d] * w;
            }
            out[(j, k)] = acc * pi_mu;
        }
    }
    Ok(out)
}

/// Kernel of the disk space for the gauged potential `Φ - Re φ`, obtained by
/// orthonormalizing monomials of degree `≤ degree` against the gauged weight
/// with quadrature. No closed form is used for the gauged norms.
#[derive(Debug, Clone)]
pub struct GaugedKernel<T> {
    model: DomainModel<T>,
    lambda: T,
    basis: BergmanBasis<T>,
    gram: CMatrix<T>,
}

impl<T: Real> GaugedKernel<T> {
    pub fn new<G>(model: &DomainModel<T>, lambda: T, gauge: G, degree: usize, order: usize) -> Result<Self>
    where
        G: Fn(Complex<T>) -> Complex<T>,
    {
        let basis = BergmanBasis::with_degree(model, lambda, degree, NormBackend::ClosedForm)?;
        // e^{-λ(Φ - Re φ)} = e^{-λΦ} e^{λ Re φ}
        let gram = weighted_gram(model, lambda, basis.len(), order, |w| {
            Complex::new((lambda * gauge(w).re).exp(), T::zero())
        })?;
        Ok(Self {
            model: model.clone(),
            lambda,
            basis,
            gram,
        })
    }

    /// `v* G⁻¹ v` with `v_j = s_j(z)` the closed-form orthonormal monomials.
    pub fn kernel_diag(&self, z: &[Complex<T>]) -> Result<T> {
        let v = self.basis.values(z)?;
        let x = self.gram.solve_hpd(&v)?;
        Ok(v.iter().zip(&x).fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re))
    }

    /// ε computed from the gauged potential and its own kernel.
    pub fn epsilon<P: KahlerPotential<T>>(&self, potential: &P, z: &[Complex<T>]) -> Result<T> {
        if potential.model() != &self.model {
            return Err(Error::UnsupportedModel("potential on a different domain".into()));
        }
        Ok((-self.lambda * potential.potential(z)?).exp() * self.kernel_diag(z)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSample<T> {
    pub z: Vec<T>,
    pub epsilon: T,
}

/// Balanced-metric verdict for `λg`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancedReport<T> {
    pub lambda: T,
    pub is_balanced: bool,
    pub mean_epsilon: Option<T>,
    pub max_rel_dev: Option<T>,
    pub reason: Option<String>,
    pub samples: Vec<EpsilonSample<T>>,
}

pub(crate) fn flatten<T: Real>(z: &[Complex<T>]) -> Vec<T> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// `sample_count` uniform points of radius `≤ 0.9` plus [`ORBIT_SAMPLES`] points
/// of the form `h·z₀`; the first random point is `z₀`.
pub fn sample_with_orbit<T: Real, R: Rng + ?Sized>(
    model: &DomainModel<T>,
    sample_count: usize,
    rng: &mut R,
) -> Result<Vec<Point<T>>> {
    let cap = T::lit(SAMPLE_RADIUS);
    let mut points: Vec<Point<T>> = (0..sample_count).map(|_| model.sample_point(rng, cap)).collect();
    let base = points.first().cloned().unwrap_or_else(|| model.sample_point(rng, cap));
    let mut orbit = 0;
    while orbit < ORBIT_SAMPLES {
        let h = random_automorphism_with(model, rng);
        let image = apply_automorphism(&h, &base)?;
        if model.radius(&image) <= cap {
            points.push(image);
            orbit += 1;
        }
    }
    Ok(points)
}

/// Samples ε and decides whether it is a positive constant to relative tolerance `tol`.
pub fn balanced_verdict<T: Real>(
    model: &DomainModel<T>,
    lambda: T,
    sample_count: usize,
    tol: T,
    seed: u64,
) -> Result<BalancedReport<T>> {
    if sample_count < 2 {
        return Err(Error::DomainError("balanced verdict needs at least two samples".into()));
    }
    let trivial = |reason: String| BalancedReport {
        lambda,
        is_balanced: false,
        mean_epsilon: None,
        max_rel_dev: None,
        reason: Some(reason),
        samples: Vec::new(),
    };
    match require_nontrivial(model, lambda) {
        Ok(()) => {}
        Err(Error::TrivialSpace { lambda0, .. }) => {
            let at_threshold = (lambda.to_f64().unwrap_or(f64::NAN) - lambda0).abs() <= 1e-12 * lambda0.abs().max(1.0);
            let reason = if at_threshold {
                format!("TrivialSpace: lambda equals the threshold lambda0 = {lambda0}; the strict criterion fails")
            } else {
                format!("TrivialSpace: lambda below the threshold lambda0 = {lambda0}")
            };
            return Ok(trivial(reason));
        }
        Err(e) => return Err(e),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_with_orbit(model, sample_count, &mut rng)?;
    let basis = BergmanBasis::new(model, lambda, TruncationPolicy::default())?;
    let samples = points
        .iter()
        .map(|z| {
            Ok(EpsilonSample {
                z: flatten(z),
                epsilon: basis.epsilon(z)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = samples.iter().fold(T::zero(), |a, s| a + s.epsilon) / T::from_usize_lossy(samples.len());
    let max_rel_dev = samples
        .iter()
        .fold(T::zero(), |m, s| m.max((s.epsilon - mean).abs() / mean));
    let is_balanced = mean > T::zero() && max_rel_dev < tol;
    Ok(BalancedReport {
        lambda,
        is_balanced,
        mean_epsilon: Some(mean),
        max_rel_dev: Some(max_rel_dev),
        reason: if is_balanced {
            None
        } else {
            Some(format!("epsilon varies by {max_rel_dev} relative"))
        },
        samples,
    })
}
