//! Log-Gamma and Gamma ratios.

use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Above this shift the ratio is evaluated as a difference of log-Gammas.
const MAX_RECURRENCE_SHIFT: usize = 64;

fn positive<T: Real>(x: T, name: &str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{name} = {x} must be positive and finite")))
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    positive(x, "x")?;
    Ok(lanczos(x))
}

fn lanczos<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x) Γ(1 - x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - lanczos(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// `ln(Γ(a) / Γ(b))` for `a, b > 0`.
///
/// Integer shifts up to 64 use the recurrence `Γ(x + 1) = x Γ(x)` directly,
/// which keeps the ratio accurate when `a` and `b` are large and close.
pub fn log_gamma_ratio<T: Real>(a: T, b: T) -> Result<T> {
    positive(a, "a")?;
    positive(b, "b")?;
    let shift = a - b;
    let rounded = shift.round();
    if shift == rounded && rounded.abs() <= T::from_usize_lossy(MAX_RECURRENCE_SHIFT) {
        let steps = rounded.abs().to_usize().unwrap_or(0);
        let (lo, sign) = if rounded >= T::zero() {
            (b, T::one())
        } else {
            (a, -T::one())
        };
        let sum = (0..steps).fold(T::zero(), |acc, k| acc + (lo + T::from_usize_lossy(k)).ln());
        return Ok(sign * sum);
    }
    Ok(lanczos(a) - lanczos(b))
}

/// `ln B(a, b)`.
pub fn log_beta<T: Real>(a: T, b: T) -> Result<T> {
    positive(a, "a")?;
    positive(b, "b")?;
    Ok(log_gamma_ratio(a, a + b)? + lanczos(b))
}
