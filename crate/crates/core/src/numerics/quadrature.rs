//! Gauss–Jacobi quadrature on `[0, 1]` for the weight `(1 - t)^alpha`.
//!
//! Nodes are seeded from the eigenvalues of the Jacobi matrix (implicit QL) and
//! then polished by Newton iteration on the three-term recurrence of the
//! orthonormal polynomials. Weights come from the Christoffel function
//! `w_i = 1 / sum_k p_k(t_i)^2`, which never forms the large unnormalized
//! Jacobi polynomials and therefore stays finite for large `alpha`.

use crate::error::{Error, Result};
use crate::scalar::Real;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 50;

/// A Gauss–Jacobi rule on `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub alpha: T,
    pub order: usize,
}

impl<T: Real> QuadratureRule<T> {
    /// `sum_i w_i f(t_i)`, i.e. the approximation of `∫_0^1 (1-t)^alpha f(t) dt`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&t, &w)| acc + w * f(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Recurrence coefficients (diagonal, off-diagonal) of the orthonormal
/// polynomials for `(1-t)^alpha` on `[0, 1]`. `off[k]` couples degree `k` and `k + 1`.
fn jacobi_matrix<T: Real>(order: usize, alpha: T) -> (Vec<T>, Vec<T>) {
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    // beta = 0 on the (1 + x) side of [-1, 1]
    let mut diag = Vec::with_capacity(order);
    let mut off = Vec::with_capacity(order.saturating_sub(1));
    for k in 0..order {
        let kf = T::from_usize_lossy(k);
        let s = two * kf + alpha;
        let a = if k == 0 {
            -alpha / (alpha + two)
        } else {
            -(alpha * alpha) / (s * (s + two))
        };
        diag.push((a + one) / two);
        if k + 1 < order {
            let k1 = kf + one;
            let s1 = two * k1 + alpha;
            let b2 = four * k1 * (k1 + alpha) * k1 * (k1 + alpha) / (s1 * s1 * (s1 + one) * (s1 - one));
            off.push(b2.sqrt() / two);
        }
    }
    (diag, off)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson shifts.
fn tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T]) -> Vec<T> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..off.len()].copy_from_slice(off);
    let two = T::lit(2.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    d
}

/// Evaluates the degree-`order` orthonormal polynomial, its derivative, and the
/// Christoffel sum `sum_{k<order} p_k(t)^2` (with `p_0 = 1`).
fn recurrence<T: Real>(diag: &[T], off: &[T], off_last: T, t: T) -> (T, T, T) {
    let order = diag.len();
    let (mut p_prev, mut p) = (T::zero(), T::one());
    let (mut dp_prev, mut dp) = (T::zero(), T::zero());
    let mut christoffel = T::zero();
    for k in 0..order {
        christoffel += p * p;
        let b_next = if k + 1 < order { off[k] } else { off_last };
        let b_prev = if k == 0 { T::zero() } else { off[k - 1] };
        let p_next = ((t - diag[k]) * p - b_prev * p_prev) / b_next;
        let dp_next = (p + (t - diag[k]) * dp - b_prev * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp, christoffel)
}

/// Gauss–Jacobi rule of the given order for `(1 - t)^alpha` on `[0, 1]`.
pub fn gauss_jacobi<T: Real>(order: usize, alpha: T) -> Result<QuadratureRule<T>> {
    if !(alpha > -T::one()) || !alpha.is_finite() {
        return Err(Error::NonIntegrableWeight {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
        });
    }
    if order == 0 {
        return Err(Error::IntegrationError("quadrature order must be positive".into()));
    }

    let (diag, off) = jacobi_matrix(order + 1, alpha);
    let (diag, off_last, off) = (&diag[..order], off[order - 1], &off[..order - 1]);
    let mut nodes = tridiagonal_eigenvalues(diag, off);

    let tol = T::lit(NEWTON_TOL).max(T::epsilon() * T::lit(4.0));
    let mu0 = T::one() / (alpha + T::one());
    let mut weights = Vec::with_capacity(order);
    for t in nodes.iter_mut() {
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp, _) = recurrence(diag, off, off_last, *t);
            let step = p / dp;
            *t -= step;
            if step.abs() <= tol * t.abs().max(T::lit(1e-3)) {
                break;
            }
        }
        let (_, _, christoffel) = recurrence(diag, off, off_last, *t);
        weights.push(mu0 / christoffel);
    }

    if nodes.iter().any(|&t| !(t > T::zero() && t < T::one()))
        || weights.iter().any(|&w| !(w > T::zero()) || !w.is_finite())
    {
        return Err(Error::IntegrationError(format!(
            "degenerate Gauss-Jacobi rule (order {order}, alpha {alpha})"
        )));
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        alpha,
        order,
    })
}

/// `∫_0^1 (1-t)^alpha f(t) dt` with the `gauss_jacobi(order, alpha)` rule.
pub fn integrate_radial<T: Real, F: FnMut(T) -> T>(f: F, alpha: T, order: usize) -> Result<T> {
    Ok(gauss_jacobi(order, alpha)?.integrate(f))
}
