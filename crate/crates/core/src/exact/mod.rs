//! Exact scalar arithmetic: big rationals and the surd field `Σ q_m √m`.

mod rational;
mod surd;

pub use rational::{double_factorial, factorial, int, parse_rational, pochhammer, pow2, rat, sign_pow, Rational};
pub use surd::{square_split, SurdValue, DEFAULT_RADICAL_LIMIT};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor has {found} distinct prime radicals, limit is {limit}")]
    RadicalLimit { limit: usize, found: usize },
    #[error("double factorial is defined for -1 and odd positive integers, got {0}")]
    InvalidDoubleFactorial(i64),
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("square root is not a single surd term")]
    NotRepresentable,
    #[error("radicand does not fit in 64 bits")]
    RadicandOverflow,
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// `surd_add`
pub fn surd_add(x: &SurdValue, y: &SurdValue) -> SurdValue {
    x + y
}

/// `surd_mul`
pub fn surd_mul(x: &SurdValue, y: &SurdValue) -> SurdValue {
    x * y
}

/// Exact quotient, rationalizing the divisor with the default radical limit.
pub fn surd_div(x: &SurdValue, y: &SurdValue) -> Result<SurdValue, ExactError> {
    x.checked_div(y)
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    const RADS: [u64; 6] = [1, 2, 3, 5, 6, 15];

    fn small_surd() -> impl Strategy<Value = SurdValue> {
        prop::collection::vec((0usize..RADS.len(), -6i64..=6, 1i64..=5), 0..4)
            .prop_map(|terms| SurdValue::from_terms(terms.into_iter().map(|(k, p, q)| (RADS[k], rat(p, q)))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_axioms(x in small_surd(), y in small_surd(), z in small_surd()) {
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            prop_assert_eq!(&x * &y, &y * &x);
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.recip().unwrap(), SurdValue::one());
                prop_assert_eq!(surd_div(&(&y * &x), &x).unwrap(), y.clone());
            }
        }

        #[test]
        fn canonical_is_idempotent(raw in prop::collection::vec((1u64..200, -9i64..=9, 1i64..=7), 0..5)) {
            let x = SurdValue::from_terms(raw.into_iter().map(|(m, p, q)| (m, rat(p, q))));
            prop_assert_eq!(x.canonical(), x.clone());
            prop_assert_eq!(x.canonical().canonical(), x.canonical());
            for (m, _) in x.terms() {
                prop_assert_eq!(square_split(m).0, 1);
            }
        }

        #[test]
        fn zero_iff_empty(x in small_surd()) {
            let d = &x - &x;
            prop_assert_eq!(d.term_count(), 0);
            prop_assert_eq!(x.is_zero(), x.term_count() == 0);
            prop_assert_eq!(x.signum() == 0, x.is_zero());
        }

        #[test]
        fn sign_matches_float(x in small_surd()) {
            let f = x.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum() as f64, f.signum());
            }
        }
    }
}
