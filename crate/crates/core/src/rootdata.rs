//! Root multiplicities of a homogeneous bounded domain and the threshold
//! formulas built on them.
//!
//! For rank `r`, index `k = 1..r` carries the multiplicities `p_k`, `q_k`,
//! `b_k` and the coefficient `γ_k` of the metric. Everything here is pure
//! ordered-field arithmetic, so it runs unchanged on `f64` or on
//! [`Rational64`](num_rational::Rational64), where thresholds come out exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Multiplicities `(r, p_k, q_k, b_k)` and coefficients `γ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemData<S> {
    pub r: usize,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub b: Vec<S>,
    pub gamma: Vec<S>,
}

/// Parameters `(r, a, b)` of a bounded symmetric domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricDomainParams<S> {
    pub r: usize,
    pub a: S,
    pub b: S,
}

/// Lower and upper descriptions of the projectively induced range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveRange<S> {
    /// `max_k q_k / (2 γ_k)`; every scale above it is projectively induced.
    pub c0: S,
    /// Sorted, deduplicated `q_k / (2 γ_k)`; the only possible scales at or below `c0`.
    pub discrete_candidates: Vec<S>,
}

fn from_u32<S: Field>(v: u32) -> S {
    S::from_u32(v).expect("small integers are representable")
}

fn two<S: Field>() -> S {
    S::one() + S::one()
}

impl<S: Field> RootSystemData<S> {
    pub fn new(p: Vec<u32>, q: Vec<u32>, b: Vec<S>, gamma: Vec<S>) -> Result<Self> {
        let data = Self {
            r: p.len(),
            p,
            q,
            b,
            gamma,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.r;
        if r == 0 {
            return Err(Error::InvalidRootData("rank must be positive".into()));
        }
        if self.p.len() != r || self.q.len() != r || self.b.len() != r || self.gamma.len() != r {
            return Err(Error::InvalidRootData(format!(
                "rank {r} but |p|={}, |q|={}, |b|={}, |gamma|={}",
                self.p.len(),
                self.q.len(),
                self.b.len(),
                self.gamma.len()
            )));
        }
        if self.p[0] != 0 || self.q[r - 1] != 0 {
            return Err(Error::InvalidRootData("p_1 and q_r must vanish (empty sums)".into()));
        }
        if let Some(k) = self.gamma.iter().position(|g| !(*g > S::zero())) {
            return Err(Error::InvalidRootData(format!("gamma_{} must be positive", k + 1)));
        }
        if let Some(k) = self.b.iter().position(|v| *v < S::zero()) {
            return Err(Error::InvalidRootData(format!("b_{} must be nonnegative", k + 1)));
        }
        Ok(())
    }

    /// `1 + p_k + b_k + q_k / 2` for each `k`.
    pub fn critical_values(&self) -> Vec<S> {
        (0..self.r)
            .map(|k| S::one() + from_u32::<S>(self.p[k]) + self.b[k].clone() + from_u32::<S>(self.q[k]) / two())
            .collect()
    }

    /// Same multiplicities with every `γ_k` multiplied by `factor` (metric rescaling).
    pub fn scaled(&self, factor: S) -> Self {
        Self {
            gamma: self.gamma.iter().map(|g| g.clone() * factor.clone()).collect(),
            ..self.clone()
        }
    }

    /// `max_k (1 + p_k + b_k + q_k/2) / γ_k` without the ordering checks.
    pub(crate) fn threshold_unchecked(&self) -> S {
        let ratios = self
            .critical_values()
            .into_iter()
            .zip(&self.gamma)
            .map(|(c, g)| c / g.clone());
        max_of(ratios).expect("rank is positive")
    }
}

fn max_of<S: Field>(values: impl IntoIterator<Item = S>) -> Option<S> {
    values.into_iter().fold(None, |best, v| match best {
        Some(b) if b >= v => Some(b),
        _ => Some(v),
    })
}

/// `λ₀ = max_k (1 + p_k + b_k + q_k/2) / γ_k`.
pub fn lambda0<S: Field>(data: &RootSystemData<S>) -> Result<S> {
    data.validate()?;
    Ok(data.threshold_unchecked())
}

/// Strict nontriviality criterion for the weighted Bergman space of `λ·Φ`:
/// `λ γ_k > 1 + p_k + b_k + q_k/2` for every `k`.
pub fn is_nontrivial<S: Field>(data: &RootSystemData<S>, lambda: S) -> Result<bool> {
    data.validate()?;
    if !(lambda > S::zero()) {
        return Err(Error::DomainError(format!("lambda = {lambda:?} must be positive")));
    }
    Ok(data
        .critical_values()
        .into_iter()
        .zip(&data.gamma)
        .all(|(c, g)| lambda.clone() * g.clone() > c))
}

/// `p_k = (k-1)a`, `q_k = (r-k)a`, `b_k = b`, `γ_k = (r-1)a + b + 2`.
///
/// `a` is ignored for rank one. Multiplicities must be integral once multiplied
/// by the index gaps, which holds for the integer `a` of every symmetric domain.
pub fn symmetric_root_data<S: Field>(params: &SymmetricDomainParams<S>) -> Result<RootSystemData<S>> {
    let r = params.r;
    if r == 0 {
        return Err(Error::InvalidRootData("rank must be positive".into()));
    }
    if params.a < S::zero() || params.b < S::zero() {
        return Err(Error::InvalidRootData("a and b must be nonnegative".into()));
    }
    let a = if r == 1 { S::zero() } else { params.a.clone() };
    let mult = |count: usize| -> Result<u32> {
        let v = S::from_usize(count).expect("index fits") * a.clone();
        let mut i = 0u32;
        while from_u32::<S>(i) < v {
            i += 1;
        }
        if from_u32::<S>(i) == v {
            Ok(i)
        } else {
            Err(Error::InvalidRootData(format!("multiplicity {v:?} is not an integer")))
        }
    };
    let p = (1..=r).map(|k| mult(k - 1)).collect::<Result<Vec<_>>>()?;
    let q = (1..=r).map(|k| mult(r - k)).collect::<Result<Vec<_>>>()?;
    let genus = S::from_usize(r - 1).expect("rank fits") * a + params.b.clone() + two();
    RootSystemData::new(p, q, vec![params.b.clone(); r], vec![genus; r])
}

/// Bergman-metric coefficients `γ_k = 2 + p_k + q_k + b_k`.
pub fn bergman_gamma<S: Field>(p: &[u32], q: &[u32], b: &[S]) -> Result<Vec<S>> {
    if p.len() != q.len() || p.len() != b.len() {
        return Err(Error::InvalidRootData(format!(
            "length mismatch: |p|={}, |q|={}, |b|={}",
            p.len(),
            q.len(),
            b.len()
        )));
    }
    Ok(p.iter()
        .zip(q)
        .zip(b)
        .map(|((&pk, &qk), bk)| two::<S>() + from_u32::<S>(pk) + from_u32::<S>(qk) + bk.clone())
        .collect())
}

/// `c0 = max_k q_k/(2γ_k)` and the candidate set `{q_k/(2γ_k)}`.
pub fn projective_range_bounds<S: Field>(data: &RootSystemData<S>) -> Result<ProjectiveRange<S>> {
    data.validate()?;
    let mut candidates: Vec<S> = data
        .q
        .iter()
        .zip(&data.gamma)
        .map(|(&qk, g)| from_u32::<S>(qk) / (two::<S>() * g.clone()))
        .collect();
    candidates.sort_by(|x, y| x.partial_cmp(y).expect("ordered field"));
    candidates.dedup();
    let c0 = candidates.last().cloned().expect("rank is positive");
    Ok(ProjectiveRange {
        c0,
        discrete_candidates: candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn disk() -> RootSystemData<Rational64> {
        RootSystemData::new(vec![0], vec![0], vec![q(0, 1)], vec![q(2, 1)]).unwrap()
    }

    fn rank_two() -> RootSystemData<Rational64> {
        RootSystemData::new(vec![0, 1], vec![1, 0], vec![q(0, 1); 2], vec![q(3, 1); 2]).unwrap()
    }

    #[test]
    fn lambda0_examples() {
        assert_eq!(lambda0(&disk()).unwrap(), q(1, 2));
        let ball2 = RootSystemData::new(vec![0], vec![0], vec![q(1, 1)], vec![q(3, 1)]).unwrap();
        assert_eq!(lambda0(&ball2).unwrap(), q(2, 3));
        // max(3/2, 2) / 3
        assert_eq!(lambda0(&rank_two()).unwrap(), q(2, 3));
    }

    #[test]
    fn nontriviality_is_strict() {
        assert!(is_nontrivial(&disk(), q(3, 5)).unwrap());
        assert!(!is_nontrivial(&disk(), q(1, 2)).unwrap());
        assert!(is_nontrivial(&rank_two(), q(7, 10)).unwrap());
        assert!(!is_nontrivial(&rank_two(), q(66, 100)).unwrap());
        assert!(!is_nontrivial(&rank_two(), q(2, 3)).unwrap());
    }

    #[test]
    fn nonpositive_lambda_is_a_domain_error() {
        assert!(matches!(is_nontrivial(&disk(), q(0, 1)), Err(Error::DomainError(_))));
        assert!(matches!(is_nontrivial(&disk(), q(-1, 3)), Err(Error::DomainError(_))));
    }

    #[test]
    fn symmetric_examples() {
        let d = symmetric_root_data(&SymmetricDomainParams {
            r: 1,
            a: q(5, 1),
            b: q(0, 1),
        })
        .unwrap();
        assert_eq!(d, disk());
        let d = symmetric_root_data(&SymmetricDomainParams {
            r: 2,
            a: q(1, 1),
            b: q(0, 1),
        })
        .unwrap();
        assert_eq!(d, rank_two());
        let d = symmetric_root_data(&SymmetricDomainParams {
            r: 3,
            a: q(2, 1),
            b: q(1, 1),
        })
        .unwrap();
        assert_eq!(d.p, vec![0, 2, 4]);
        assert_eq!(d.q, vec![4, 2, 0]);
        assert_eq!(d.b, vec![q(1, 1); 3]);
        assert_eq!(d.gamma, vec![q(7, 1); 3]);
        assert_eq!(lambda0(&d).unwrap(), q(6, 7));
    }

    #[test]
    fn half_integer_b_is_exact() {
        // b_k = ½ dim of a one-dimensional root space
        let d = symmetric_root_data(&SymmetricDomainParams {
            r: 2,
            a: q(2, 1),
            b: q(1, 2),
        })
        .unwrap();
        assert_eq!(d.gamma, vec![q(9, 2); 2]);
        assert_eq!(lambda0(&d).unwrap(), q(7, 9));
    }

    #[test]
    fn bergman_gamma_examples() {
        assert_eq!(bergman_gamma(&[0], &[0], &[q(0, 1)]).unwrap(), vec![q(2, 1)]);
        for n in 1..6 {
            assert_eq!(bergman_gamma(&[0], &[0], &[q(n - 1, 1)]).unwrap(), vec![q(n + 1, 1)]);
        }
        assert_eq!(
            bergman_gamma(&[0, 1], &[1, 0], &[q(0, 1); 2]).unwrap(),
            vec![q(3, 1); 2]
        );
        assert!(matches!(
            bergman_gamma(&[0, 1], &[0], &[q(0, 1)]),
            Err(Error::InvalidRootData(_))
        ));
    }

    #[test]
    fn projective_range_examples() {
        let disk_range = projective_range_bounds(&disk()).unwrap();
        assert_eq!(disk_range.c0, q(0, 1));
        assert_eq!(disk_range.discrete_candidates, vec![q(0, 1)]);

        let two_range = projective_range_bounds(&rank_two()).unwrap();
        assert_eq!(two_range.c0, q(1, 6));
        assert_eq!(two_range.discrete_candidates, vec![q(0, 1), q(1, 6)]);

        let d = symmetric_root_data(&SymmetricDomainParams {
            r: 3,
            a: q(2, 1),
            b: q(1, 1),
        })
        .unwrap();
        assert_eq!(projective_range_bounds(&d).unwrap().c0, q(2, 7));
    }

    #[test]
    fn invalid_data_rejected() {
        let bad_len = RootSystemData {
            r: 2,
            p: vec![0],
            q: vec![0, 0],
            b: vec![0.0; 2],
            gamma: vec![1.0; 2],
        };
        assert!(matches!(lambda0(&bad_len), Err(Error::InvalidRootData(_))));
        assert!(RootSystemData::new(vec![1], vec![0], vec![0.0], vec![2.0]).is_err());
        assert!(RootSystemData::new(vec![0], vec![0], vec![0.0], vec![0.0]).is_err());
        assert!(RootSystemData::new(vec![0, 0], vec![1, 1], vec![0.0; 2], vec![2.0; 2]).is_err());
    }

    #[test]
    fn float_and_exact_agree() {
        let d = symmetric_root_data(&SymmetricDomainParams { r: 4, a: 2.0, b: 1.0 }).unwrap();
        let l = lambda0(&d).unwrap();
        assert!((l - 8.0 / 9.0_f64).abs() < 1e-15);
    }

    fn arb_root_data() -> impl Strategy<Value = RootSystemData<Rational64>> {
        (1usize..6).prop_flat_map(|r| {
            (
                prop::collection::vec(0u32..6, r),
                prop::collection::vec(0u32..6, r),
                prop::collection::vec(0i64..8, r),
                prop::collection::vec(1i64..40, r),
                prop::collection::vec(1i64..5, r),
            )
                .prop_map(move |(mut p, mut qq, b2, gn, gd)| {
                    p[0] = 0;
                    qq[r - 1] = 0;
                    RootSystemData::new(
                        p,
                        qq,
                        b2.into_iter().map(|v| q(v, 2)).collect(),
                        gn.into_iter().zip(gd).map(|(n, d)| q(n, d)).collect(),
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn symmetric_threshold_closed_form(r in 1usize..8, a in 0i64..6, b2 in 0i64..10) {
            let params = SymmetricDomainParams { r, a: q(a, 1), b: q(b2, 2) };
            let genus = q((r as i64 - 1) * if r == 1 { 0 } else { a }, 1) + q(b2, 2) + q(2, 1);
            let d = symmetric_root_data(&params).unwrap();
            prop_assert_eq!(lambda0(&d).unwrap(), (genus - q(1, 1)) / genus);
        }

        #[test]
        fn nontriviality_is_monotone(d in arb_root_data(), l in 1i64..200, dl in 1i64..50) {
            let lam = q(l, 40);
            if is_nontrivial(&d, lam).unwrap() {
                prop_assert!(is_nontrivial(&d, lam + q(dl, 40)).unwrap());
            }
        }

        #[test]
        fn nontriviality_flips_at_threshold(d in arb_root_data(), num in 1i64..1000) {
            let l0 = lambda0(&d).unwrap();
            let delta = q(num, 1000);
            prop_assert!(is_nontrivial(&d, l0 + delta).unwrap());
            if l0 > delta {
                prop_assert!(!is_nontrivial(&d, l0 - delta).unwrap());
            }
            prop_assert!(!is_nontrivial(&d, l0).unwrap());
        }

        #[test]
        fn lambda0_permutation_invariant(d in arb_root_data(), seed in any::<u64>()) {
            let mut perm: Vec<usize> = (0..d.r).collect();
            // deterministic shuffle from the seed
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            // a permutation may break the p_1 = q_r = 0 convention, so skip validation
            let shuffled = RootSystemData { r: d.r, p: perm.iter().map(|&i| d.p[i]).collect(),
                q: perm.iter().map(|&i| d.q[i]).collect(), b: perm.iter().map(|&i| d.b[i]).collect(),
                gamma: perm.iter().map(|&i| d.gamma[i]).collect() };
            prop_assert_eq!(shuffled.threshold_unchecked(), lambda0(&d).unwrap());
        }
    }
}
