//! Berezin quantization data at finite truncation: Toeplitz-type operators on
//! `ℋ_λ`, their covariant symbols, the induced star product, and numerical
//! checks of the correspondence principle and point separation.
//!
//! Operators are `N_op × N_op` matrices in the orthonormal monomial basis
//! `{s_j}`. The coherent vector at `z` has coefficients `conj(s_j(z))`, so
//! `σ(A)(z) = v* A v / v* v` with `v_j = conj(s_j(z))`.

use num_complex::Complex;
use serde::Serialize;

use crate::bergman::{
    require_nontrivial, tail_exponent, truncation_degree, weighted_gram, BergmanBasis, NormBackend, MAX_DEGREE,
};
use crate::domain::{DomainKind, DomainModel};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::numerics::default_step;
use crate::projective::diastasis;
use crate::scalar::Real;

/// Extra degrees kept beyond the kernel tail rule so that low-degree symbols
/// do not see the truncation edge.
pub const SYMBOL_MARGIN: usize = 10;
/// Default Gauss–Jacobi order for operator matrices.
pub const DEFAULT_QUAD_ORDER: usize = 64;

/// Quantization at a fixed `λ = 1/ħ`.
#[derive(Debug, Clone)]
pub struct QuantContext<T> {
    basis: BergmanBasis<T>,
    hbar: T,
    order: usize,
}

impl<T: Real> QuantContext<T> {
    /// Truncation from the tail rule for points up to `max_radius`, plus
    /// [`SYMBOL_MARGIN`] degrees.
    pub fn new(model: &DomainModel<T>, lambda: T, max_radius: T, order: usize) -> Result<Self> {
        require_nontrivial(model, lambda)?;
        let tol = T::lit(crate::bergman::DEFAULT_TAIL_TOL);
        let degree = truncation_degree(tail_exponent(model, lambda), max_radius, tol, MAX_DEGREE)? + SYMBOL_MARGIN;
        if degree > MAX_DEGREE {
            return Err(Error::TruncationInsufficient {
                needed: degree,
                cap: MAX_DEGREE,
            });
        }
        Self::with_degree(model, lambda, degree, order)
    }

    pub fn with_degree(model: &DomainModel<T>, lambda: T, degree: usize, order: usize) -> Result<Self> {
        let basis = BergmanBasis::with_degree(model, lambda, degree, NormBackend::ClosedForm)?;
        Ok(Self {
            basis,
            hbar: T::one() / lambda,
            order,
        })
    }

    pub fn basis(&self) -> &BergmanBasis<T> {
        &self.basis
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn lambda(&self) -> T {
        self.basis.lambda()
    }

    /// Operator dimension `N_op`.
    pub fn n_op(&self) -> usize {
        self.basis.len()
    }

    pub fn quad_order(&self) -> usize {
        self.order
    }

    /// Coherent vector `v_j = conj(s_j(z))`.
    pub fn coherent_vector(&self, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        Ok(self.basis.values(z)?.into_iter().map(|s| s.conj()).collect())
    }
}

/// `A_jk = ⟨T_f s_k, s_j⟩` by quadrature; disk only.
pub fn toeplitz_operator<T, F>(ctx: &QuantContext<T>, f: F) -> Result<CMatrix<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Complex<T>,
{
    let basis = ctx.basis();
    weighted_gram(basis.model(), basis.lambda(), ctx.n_op(), ctx.order, |w| f(&[w]))
}

/// Covariant (Berezin) symbol of `a` at `z`.
pub fn covariant_symbol<T: Real>(ctx: &QuantContext<T>, a: &CMatrix<T>, z: &[Complex<T>]) -> Result<Complex<T>> {
    if a.dim() != ctx.n_op() {
        return Err(Error::ContextMismatch {
            left: a.dim(),
            right: ctx.n_op(),
        });
    }
    let v = ctx.coherent_vector(z)?;
    let norm = v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr());
    Ok(a.quadratic_form(&v) / norm)
}

/// `f * g` for `f = σ(A)`, `g = σ(B)`: the symbol of `AB`.
pub fn star<'a, T: Real>(
    ctx: &'a QuantContext<T>,
    a: &CMatrix<T>,
    b: &CMatrix<T>,
) -> Result<impl Fn(&[Complex<T>]) -> Result<Complex<T>> + 'a> {
    let product = a.checked_mul(b)?;
    if product.dim() != ctx.n_op() {
        return Err(Error::ContextMismatch {
            left: product.dim(),
            right: ctx.n_op(),
        });
    }
    Ok(move |z: &[Complex<T>]| covariant_symbol(ctx, &product, z))
}

/// Poisson bracket of the Kähler form, fixed so that
/// `λ σ([T_f, T_g]) → i {f, g}`:
///
/// `{f, g} = -(f_x g_y - f_y g_x) / (2 Φ_{zz̄})`,
///
/// summed over coordinates on the polydisk. Derivatives are central
/// differences with the default step.
pub fn poisson<T, F, G>(model: &DomainModel<T>, f: F, g: G, z: &[Complex<T>]) -> Result<T>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> T,
    G: Fn(&[Complex<T>]) -> T,
{
    if model.kind() == DomainKind::Ball && model.dim() > 1 {
        return Err(Error::UnsupportedModel(
            "Poisson bracket on the ball in dimension > 1".into(),
        ));
    }
    if !model.contains(z) {
        return Err(Error::OutsideDomain);
    }
    let h = default_step(model.distance_to_boundary(z)?);
    let hess = model.metric_hessian(z)?;
    let two_h = T::lit(2.0) * h;
    let partial = |u: &dyn Fn(&[Complex<T>]) -> T, i: usize, dir: Complex<T>| {
        let mut p = z.to_vec();
        let mut m = z.to_vec();
        p[i] += dir * h;
        m[i] -= dir * h;
        (u(&p) - u(&m)) / two_h
    };
    let (ex, ey) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::one()));
    let mut acc = T::zero();
    for i in 0..z.len() {
        let (fx, fy) = (partial(&f, i, ex), partial(&f, i, ey));
        let (gx, gy) = (partial(&g, i, ex), partial(&g, i, ey));
        acc -= (fx * gy - fy * gx) / (T::lit(2.0) * hess[i][i].re);
    }
    Ok(acc)
}

/// Decay of the correspondence-principle defects along increasing `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport<T> {
    pub lambdas: Vec<T>,
    #[serde(rename = "E1")]
    pub e1: Vec<T>,
    #[serde(rename = "E2")]
    pub e2: Vec<T>,
    /// `None` when some defect vanishes and the log-log fit is undefined.
    pub slope_e1: Option<T>,
    pub slope_e2: Option<T>,
}

/// Least-squares slope of `ln e` against `ln(1/λ)`.
pub fn loglog_slope<T: Real>(lambdas: &[T], e: &[T]) -> Option<T> {
    if lambdas.len() < 2 || e.iter().any(|&v| !(v > T::zero())) {
        return None;
    }
    let xs: Vec<T> = lambdas.iter().map(|&l| -l.ln()).collect();
    let ys: Vec<T> = e.iter().map(|&v| v.ln()).collect();
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Some(sxy / sxx)
}

/// Like [`correspondence_check`], with the bracket multiplied by `bracket_scale`.
/// Scale 1 is the canonical bracket; other values exist to show they fail.
pub fn correspondence_check_scaled<T, F, G>(
    model: &DomainModel<T>,
    f: F,
    g: G,
    lambdas: &[T],
    samples: &[Vec<Complex<T>>],
    order: usize,
    bracket_scale: T,
) -> Result<DecayReport<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> T,
    G: Fn(&[Complex<T>]) -> T,
{
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::DomainError("lambda list must be strictly increasing".into()));
    }
    if samples.is_empty() {
        return Err(Error::DomainError("no sample points".into()));
    }
    for &lambda in lambdas {
        require_nontrivial(model, lambda)?;
    }
    let radius = samples.iter().map(|z| model.radius(z)).fold(T::zero(), T::max);
    if !(radius < T::one()) {
        return Err(Error::OutsideDomain);
    }
    let brackets = samples
        .iter()
        .map(|z| poisson(model, &f, &g, z))
        .collect::<Result<Vec<_>>>()?;
    let (mut e1, mut e2) = (Vec::new(), Vec::new());
    for &lambda in lambdas {
        let ctx = QuantContext::new(model, lambda, radius, order)?;
        let a = toeplitz_operator(&ctx, |z: &[Complex<T>]| Complex::new(f(z), T::zero()))?;
        let b = toeplitz_operator(&ctx, |z: &[Complex<T>]| Complex::new(g(z), T::zero()))?;
        let ab = a.checked_mul(&b)?;
        let ba = b.checked_mul(&a)?;
        let (mut m1, mut m2) = (T::zero(), T::zero());
        for (z, &pb) in samples.iter().zip(&brackets) {
            let s_ab = covariant_symbol(&ctx, &ab, z)?;
            let s_ba = covariant_symbol(&ctx, &ba, z)?;
            let s_a = covariant_symbol(&ctx, &a, z)?;
            let s_b = covariant_symbol(&ctx, &b, z)?;
            m1 = m1.max((s_ab - s_a * s_b).norm());
            let i_bracket = Complex::new(T::zero(), pb * bracket_scale);
            m2 = m2.max(((s_ab - s_ba) * lambda - i_bracket).norm());
        }
        e1.push(m1);
        e2.push(m2);
    }
    Ok(DecayReport {
        lambdas: lambdas.to_vec(),
        slope_e1: loglog_slope(lambdas, &e1),
        slope_e2: loglog_slope(lambdas, &e2),
        e1,
        e2,
    })
}

/// `E₁(λ) = max |σ(AB) - σ(A)σ(B)|` and `E₂(λ) = max |λ σ([A, B]) - i{f, g}|`
/// over the samples, with `A = T_f`, `B = T_g`.
pub fn correspondence_check<T, F, G>(
    model: &DomainModel<T>,
    f: F,
    g: G,
    lambdas: &[T],
    samples: &[Vec<Complex<T>>],
    order: usize,
) -> Result<DecayReport<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> T,
    G: Fn(&[Complex<T>]) -> T,
{
    correspondence_check_scaled(model, f, g, lambdas, samples, order, T::one())
}

/// Coherent-projector separation of two points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport<T> {
    pub lambda: T,
    pub x1: Vec<T>,
    pub x2: Vec<T>,
    pub sigma_at_x1: T,
    pub sigma_at_x2: T,
    pub gap: T,
    /// `1 - e^{-λ D(x1, x2)}`, the value the gap converges to.
    pub expected_gap: T,
    pub separated: bool,
}

/// Projector `P = k k* / ‖k‖²` onto the coherent vector at `x`.
pub fn coherent_projector<T: Real>(ctx: &QuantContext<T>, x: &[Complex<T>]) -> Result<CMatrix<T>> {
    let v = ctx.coherent_vector(x)?;
    let norm = v.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
    Ok(CMatrix::outer(&v).scale(Complex::new(T::one() / norm, T::zero())))
}

/// `σ(P)(z)` for `P = k k*/‖k‖²` without forming `P`:
/// `|⟨k, v_z⟩|² / (‖k‖² ‖v_z‖²)`.
pub fn projector_symbol<T: Real>(ctx: &QuantContext<T>, x: &[Complex<T>], z: &[Complex<T>]) -> Result<T> {
    let k = ctx.coherent_vector(x)?;
    let v = ctx.coherent_vector(z)?;
    let dot = k
        .iter()
        .zip(&v)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
    let nk = k.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
    let nv = v.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
    Ok(dot.norm_sqr() / (nk * nv))
}

/// Checks `σ(P)(x1) = 1 > σ(P)(x2)` for the coherent projector at `x1`.
pub fn separation_check<T: Real>(
    ctx: &QuantContext<T>,
    x1: &[Complex<T>],
    x2: &[Complex<T>],
) -> Result<SeparationReport<T>> {
    let model = ctx.basis().model();
    let sep = x1
        .iter()
        .zip(x2)
        .fold(T::zero(), |a, (p, q)| a + (p - q).norm_sqr())
        .sqrt();
    if sep < T::lit(crate::projective::MIN_SEPARATION) {
        return Err(Error::DomainError("separation check needs distinct points".into()));
    }
    let s1 = projector_symbol(ctx, x1, x1)?;
    let s2 = projector_symbol(ctx, x1, x2)?;
    let expected_gap = T::one() - (-ctx.lambda() * diastasis(model, x1, x2)?).exp();
    let gap = s1 - s2;
    Ok(SeparationReport {
        lambda: ctx.lambda(),
        x1: crate::bergman::flatten(x1),
        x2: crate::bergman::flatten(x2),
        sigma_at_x1: s1,
        sigma_at_x2: s2,
        gap,
        expected_gap,
        separated: gap > T::zero() && (s1 - T::one()).abs() < T::lit(1e-10),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{coherent_map, fs_exp_neg_diastasis};
    use approx::assert_relative_eq;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn disk() -> DomainModel<f64> {
        DomainModel::disk(2.0).unwrap()
    }

    fn ctx(lambda: f64, radius: f64) -> QuantContext<f64> {
        QuantContext::new(&disk(), lambda, radius, DEFAULT_QUAD_ORDER).unwrap()
    }

    fn re_z(z: &[C]) -> f64 {
        z[0].re
    }

    fn im_z(z: &[C]) -> f64 {
        z[0].im
    }

    #[test]
    fn hbar_is_inverse_lambda() {
        let q = ctx(4.0, 0.5);
        assert_eq!(q.hbar() * q.lambda(), 1.0);
        assert_eq!(q.n_op(), q.basis().degree() + 1);
    }

    #[test]
    fn constant_symbol_gives_identity() {
        let q = ctx(2.0, 0.9);
        let one = toeplitz_operator(&q, |_| c(1.0, 0.0)).unwrap();
        assert!((&one - &CMatrix::identity(q.n_op())).max_abs() < 1e-8);
        let three = toeplitz_operator(&q, |_| c(3.0, 0.0)).unwrap();
        assert_relative_eq!(
            covariant_symbol(&q, &three, &[c(0.4, -0.3)]).unwrap().re,
            3.0,
            max_relative = 1e-8
        );
        let id = CMatrix::identity(q.n_op());
        assert_relative_eq!(
            covariant_symbol(&q, &id, &[c(-0.7, 0.1)]).unwrap().re,
            1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn radial_symbol_matches_beta_ratios() {
        // A_mm = ‖z^{m+1}‖²/‖z^m‖² = (m+1)/(m+λμ), off-diagonal zero
        let lambda = 2.0;
        let q = ctx(lambda, 0.9);
        let a = toeplitz_operator(&q, |z| c(z[0].norm_sqr(), 0.0)).unwrap();
        for j in 0..q.n_op() {
            for k in 0..q.n_op() {
                let want = if j == k {
                    (j as f64 + 1.0) / (j as f64 + 2.0 * lambda)
                } else {
                    0.0
                };
                assert!((a[(j, k)] - c(want, 0.0)).norm() < 1e-10, "{j} {k}");
            }
        }
    }

    #[test]
    fn real_symbol_gives_hermitian_operator() {
        let q = ctx(3.0, 0.9);
        let a = toeplitz_operator(&q, |z| c(z[0].re, 0.0)).unwrap();
        assert!((&a - &a.adjoint()).norm() < 1e-10);
    }

    #[test]
    fn radial_symbol_localizes_at_origin() {
        let values: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&l| {
                let q = ctx(l, 0.5);
                let a = toeplitz_operator(&q, |z| c(z[0].norm_sqr(), 0.0)).unwrap();
                covariant_symbol(&q, &a, &[c(0.0, 0.0)]).unwrap().re
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        // σ(T_{|z|²})(0) = A_00 = 1/(λμ)
        assert_relative_eq!(values[2], 1.0 / 40.0, max_relative = 1e-10);
    }

    #[test]
    fn star_product_properties() {
        let q = ctx(5.0, 0.5);
        let a = toeplitz_operator(&q, |z| c(z[0].re, 0.0)).unwrap();
        let b = toeplitz_operator(&q, |z| c(z[0].im, 0.0)).unwrap();
        let cc = toeplitz_operator(&q, |z| c(z[0].norm_sqr(), z[0].re)).unwrap();
        let id = CMatrix::identity(q.n_op());
        let z = [c(0.2, -0.1)];
        let left = star(&q, &id, &a).unwrap();
        assert!((left(&z).unwrap() - covariant_symbol(&q, &a, &z).unwrap()).norm() < 1e-15);
        let ab_c = star(&q, &a.checked_mul(&b).unwrap(), &cc).unwrap()(&z).unwrap();
        let a_bc = star(&q, &a, &b.checked_mul(&cc).unwrap()).unwrap()(&z).unwrap();
        assert!((ab_c - a_bc).norm() < 1e-14);
        let ab = star(&q, &a, &b).unwrap()(&z).unwrap();
        let ba = star(&q, &b, &a).unwrap()(&z).unwrap();
        assert!((ab - ba).norm() > 1e-3);
        let small = CMatrix::<f64>::identity(3);
        assert!(matches!(star(&q, &a, &small), Err(Error::ContextMismatch { .. })));
        assert!(matches!(
            covariant_symbol(&q, &small, &z),
            Err(Error::ContextMismatch { .. })
        ));
    }

    #[test]
    fn symbol_is_star_compatible_and_bounded() {
        let q = ctx(3.0, 0.9);
        let a = toeplitz_operator(&q, |z| c(z[0].re * z[0].im, z[0].norm_sqr())).unwrap();
        let f = |z: &[C]| (3.0 * z[0].re).sin();
        let t = toeplitz_operator(&q, |z| c(f(z), 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let z = disk().sample_point(&mut rng, 0.9);
            let s = covariant_symbol(&q, &a, &z).unwrap();
            let s_adj = covariant_symbol(&q, &a.adjoint(), &z).unwrap();
            assert!((s.conj() - s_adj).norm() < 1e-13);
            let st = covariant_symbol(&q, &t, &z).unwrap();
            assert!(st.im.abs() < 1e-12 && st.re.abs() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn poisson_examples() {
        let d = disk();
        let z0 = [c(0.0, 0.0)];
        assert_relative_eq!(poisson(&d, re_z, im_z, &z0).unwrap(), -0.25, max_relative = 1e-8);
        assert_eq!(poisson(&d, re_z, re_z, &z0).unwrap(), 0.0);
        let f = |z: &[C]| z[0].re * z[0].im + z[0].norm_sqr();
        let g = |z: &[C]| (z[0].re - 2.0 * z[0].im).cos();
        let h = |z: &[C]| z[0].im.exp();
        let gh = |z: &[C]| g(z) * h(z);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let z = d.sample_point(&mut rng, 0.8);
            assert_eq!(poisson(&d, f, f, &z).unwrap(), 0.0);
            let lhs = poisson(&d, f, gh, &z).unwrap();
            let rhs = g(&z) * poisson(&d, f, h, &z).unwrap() + poisson(&d, f, g, &z).unwrap() * h(&z);
            assert!((lhs - rhs).abs() < 1e-6 * (1.0 + lhs.abs()));
        }
        assert_eq!(poisson(&d, f, g, &[c(1.1, 0.0)]), Err(Error::OutsideDomain));
        let ball = DomainModel::ball(2, 3.0).unwrap();
        assert!(matches!(
            poisson(&ball, f, g, &[c(0.0, 0.0); 2]),
            Err(Error::UnsupportedModel(_))
        ));
        let poly = DomainModel::polydisk(2, 2.0).unwrap();
        let sum = poisson(&poly, |z| z[0].re + z[1].re, |z| z[0].im + z[1].im, &[c(0.0, 0.0); 2]).unwrap();
        assert_relative_eq!(sum, -0.5, max_relative = 1e-8);
    }

    fn samples() -> Vec<Vec<C>> {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut pts = vec![vec![c(0.0, 0.0)]];
        pts.extend((0..7).map(|_| disk().sample_point(&mut rng, 0.5)));
        pts
    }

    #[test]
    fn correspondence_decays_for_re_im() {
        let lambdas = [5.0, 10.0, 20.0, 40.0];
        let report = correspondence_check(&disk(), re_z, im_z, &lambdas, &samples(), DEFAULT_QUAD_ORDER).unwrap();
        let slope = report.slope_e1.unwrap();
        assert!((slope - 1.0).abs() < 0.2, "{report:?}");
        assert!(report.e2[3] < report.e2[0] / 4.0, "{report:?}");
        for e in [&report.e1, &report.e2] {
            assert!(e.windows(2).all(|w| w[1] <= w[0] * 1.05));
        }
    }

    #[test]
    fn other_bracket_normalizations_fail() {
        // Opposite sign and the unhalved bracket leave an O(1) residual.
        let lambdas = [5.0, 10.0, 20.0, 40.0];
        let pts = samples();
        let canonical = correspondence_check(&disk(), re_z, im_z, &lambdas, &pts, DEFAULT_QUAD_ORDER).unwrap();
        for scale in [-1.0, 2.0, -2.0] {
            let other =
                correspondence_check_scaled(&disk(), re_z, im_z, &lambdas, &pts, DEFAULT_QUAD_ORDER, scale).unwrap();
            assert!(other.e2[3] > 0.1, "scale {scale}: {other:?}");
            assert!(other.e2[3] > 10.0 * canonical.e2[3]);
        }
    }

    #[test]
    fn correspondence_degenerate_pairs() {
        let lambdas = [5.0, 10.0];
        let pts = samples();
        let same = correspondence_check(&disk(), re_z, re_z, &lambdas, &pts, DEFAULT_QUAD_ORDER).unwrap();
        assert!(same.e2.iter().all(|&v| v == 0.0));
        assert!(same.slope_e2.is_none());
        let consts = correspondence_check(&disk(), |_| 2.0, |_| -1.0, &lambdas, &pts, DEFAULT_QUAD_ORDER).unwrap();
        assert!(consts.e1.iter().all(|&v| v < 1e-12));
        assert!(matches!(
            correspondence_check(&disk(), re_z, im_z, &[0.4, 1.0], &pts, DEFAULT_QUAD_ORDER),
            Err(Error::TrivialSpace { .. })
        ));
        assert!(correspondence_check(&disk(), re_z, im_z, &[2.0, 1.0], &pts, DEFAULT_QUAD_ORDER).is_err());
    }

    #[test]
    fn separation_examples() {
        let q = ctx(1.0, 0.9);
        let r = separation_check(&q, &[c(0.0, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert!(r.separated);
        assert!((r.gap - 0.4375).abs() < 1e-6, "{r:?}");
        let anti = separation_check(&q, &[c(0.5, 0.0)], &[c(-0.5, 0.0)]).unwrap();
        assert!(anti.gap > 0.0);
        let gaps: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&d| separation_check(&q, &[c(0.3, 0.2)], &[c(0.3 + d, 0.2)]).unwrap().gap)
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]) && gaps[2] > 0.0);
        assert!(separation_check(&q, &[c(0.3, 0.2)], &[c(0.3, 0.2)]).is_err());
    }

    #[test]
    fn projector_symbol_is_fs_diastasis() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let q = ctx(1.0, 0.9);
        for _ in 0..20 {
            let x1 = disk().sample_point(&mut rng, 0.9);
            let x2 = disk().sample_point(&mut rng, 0.9);
            let p = coherent_projector(&q, &x1).unwrap();
            let dense = covariant_symbol(&q, &p, &x2).unwrap();
            assert!(dense.im.abs() < 1e-14);
            assert!((dense.re - projector_symbol(&q, &x1, &x2).unwrap()).abs() < 1e-12);
        }
        for model in [
            disk(),
            DomainModel::ball(2, 3.0).unwrap(),
            DomainModel::polydisk(2, 2.0).unwrap(),
        ] {
            let q = QuantContext::new(&model, 1.0, 0.9, DEFAULT_QUAD_ORDER).unwrap();
            for _ in 0..20 {
                let x1 = model.sample_point(&mut rng, 0.9);
                let x2 = model.sample_point(&mut rng, 0.9);
                let sigma = projector_symbol(&q, &x1, &x2).unwrap();
                let fs = fs_exp_neg_diastasis(
                    &coherent_map(q.basis(), &x1).unwrap(),
                    &coherent_map(q.basis(), &x2).unwrap(),
                )
                .unwrap();
                assert!((sigma - fs).abs() < 1e-10);
                assert!(separation_check(&q, &x1, &x2).unwrap().separated);
            }
        }
        let ball = DomainModel::ball(2, 3.0).unwrap();
        let q = QuantContext::new(&ball, 1.0, 0.5, DEFAULT_QUAD_ORDER).unwrap();
        assert!(matches!(
            toeplitz_operator(&q, |_| c(1.0, 0.0)),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let l = [1.0, 2.0, 4.0, 8.0];
        let e: Vec<f64> = l.iter().map(|x: &f64| 3.0 / x.powf(1.5)).collect();
        assert_relative_eq!(loglog_slope(&l, &e).unwrap(), 1.5, max_relative = 1e-12);
        assert!(loglog_slope(&l, &[1.0, 0.0, 1.0, 1.0]).is_none());
    }
}
