//! Finite-difference complex Hessians `∂²u/∂z_i∂z̄_j`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default step: `1e-3` times the distance to the boundary, capped at `1e-3`.
pub fn default_step<T: Real>(distance_to_boundary: T) -> T {
    let cap = T::lit(1e-3);
    (cap * distance_to_boundary).min(cap)
}

/// Five-point approximation of `∂²u/∂z∂z̄ = Δu / 4` at `z`.
///
/// `inside` declares the domain; every stencil point must satisfy it.
pub fn fd_del_delbar<T, U, D>(u: U, z: Complex<T>, h: T, inside: D) -> Result<T>
where
    T: Real,
    U: Fn(Complex<T>) -> T,
    D: Fn(Complex<T>) -> bool,
{
    let hx = Complex::new(h, T::zero());
    let hy = Complex::new(T::zero(), h);
    let stencil = [z + hx, z - hx, z + hy, z - hy];
    if !inside(z) || stencil.iter().any(|&p| !inside(p)) {
        return Err(Error::StencilOutOfDomain);
    }
    let sum = stencil.iter().fold(T::zero(), |acc, &p| acc + u(p));
    Ok((sum - T::lit(4.0) * u(z)) / (T::lit(4.0) * h * h))
}

/// Full complex Hessian `H_ij = ∂²u/∂z_i∂z̄_j` by central differences.
///
/// Diagonal entries use the five-point Laplacian per coordinate; off-diagonal
/// entries combine four-point mixed stencils over the real and imaginary parts:
/// `H_ij = (u_{x_i x_j} + u_{y_i y_j} + i (u_{x_i y_j} - u_{y_i x_j})) / 4`.
pub fn fd_complex_hessian<T, U, D>(u: U, z: &[Complex<T>], h: T, inside: D) -> Result<Vec<Vec<Complex<T>>>>
where
    T: Real,
    U: Fn(&[Complex<T>]) -> T,
    D: Fn(&[Complex<T>]) -> bool,
{
    let n = z.len();
    if !inside(z) {
        return Err(Error::StencilOutOfDomain);
    }
    // Real direction index d in 0..2n: coordinate d / 2, real part if d even.
    let shifted = |moves: &[(usize, T)]| -> Result<T> {
        let mut p = z.to_vec();
        for &(d, s) in moves {
            let delta = if d % 2 == 0 {
                Complex::new(s, T::zero())
            } else {
                Complex::new(T::zero(), s)
            };
            p[d / 2] += delta;
        }
        if !inside(&p) {
            return Err(Error::StencilOutOfDomain);
        }
        Ok(u(&p))
    };
    let center = u(z);
    let h2 = h * h;
    let second = |a: usize, b: usize| -> Result<T> {
        if a == b {
            Ok((shifted(&[(a, h)])? + shifted(&[(a, -h)])? - T::lit(2.0) * center) / h2)
        } else {
            let pp = shifted(&[(a, h), (b, h)])?;
            let pm = shifted(&[(a, h), (b, -h)])?;
            let mp = shifted(&[(a, -h), (b, h)])?;
            let mm = shifted(&[(a, -h), (b, -h)])?;
            Ok((pp - pm - mp + mm) / (T::lit(4.0) * h2))
        }
    };

    let quarter = T::lit(0.25);
    let mut hess = vec![vec![Complex::new(T::zero(), T::zero()); n]; n];
    for i in 0..n {
        for j in i..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            let re = second(xi, xj)? + second(yi, yj)?;
            let im = if i == j {
                T::zero()
            } else {
                second(xi, yj)? - second(yi, xj)?
            };
            let v = Complex::new(re * quarter, im * quarter);
            hess[i][j] = v;
            hess[j][i] = v.conj();
        }
    }
    Ok(hess)
}
