//! Exact evaluation of terminating generalized hypergeometric series
//! `pFq(a_1..a_p; b_1..b_q; t)` at rational arguments.

use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::exact::{int, pochhammer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergeomError {
    #[error("no numerator parameter is a nonpositive integer; the series does not terminate")]
    NonTerminating,
    #[error("denominator parameter {param} vanishes inside the summation range 0..={length}")]
    ZeroDenominator { param: Rational, length: usize },
}

/// A terminating series. The termination length is the smallest `-a` over
/// the nonpositive-integer numerator parameters `a`, so denominator
/// parameters that are nonpositive integers below `-length` never produce a
/// zero factor.
#[derive(Debug, Clone, PartialEq)]
pub struct HypTerminatingSpec {
    numerator: Vec<Rational>,
    denominator: Vec<Rational>,
    argument: Rational,
    length: usize,
}

fn nonpositive_integer(q: &Rational) -> Option<usize> {
    if q.is_integer() && !q.is_positive() {
        (-q.to_integer()).to_usize()
    } else {
        None
    }
}

impl HypTerminatingSpec {
    pub fn new(
        numerator: Vec<Rational>,
        denominator: Vec<Rational>,
        argument: Rational,
    ) -> Result<Self, HypergeomError> {
        let length = numerator.iter().filter_map(nonpositive_integer).min().ok_or(HypergeomError::NonTerminating)?;
        if let Some(bad) = denominator.iter().find(|b| nonpositive_integer(b).is_some_and(|m| m < length)) {
            return Err(HypergeomError::ZeroDenominator { param: bad.clone(), length });
        }
        Ok(HypTerminatingSpec { numerator, denominator, argument, length })
    }

    /// `2F1(a, b; c; t)`
    pub fn f21(a: Rational, b: Rational, c: Rational, t: Rational) -> Result<Self, HypergeomError> {
        Self::new(vec![a, b], vec![c], t)
    }

    /// Index of the last term; the series has `length + 1` terms.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn numerator(&self) -> &[Rational] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Rational] {
        &self.denominator
    }

    pub fn argument(&self) -> &Rational {
        &self.argument
    }

    /// Balanced (Saalschützian): at argument 1, the denominator parameters
    /// sum to one more than the numerator parameters.
    pub fn is_balanced(&self) -> bool {
        let num: Rational = self.numerator.iter().cloned().sum();
        let den: Rational = self.denominator.iter().cloned().sum();
        self.argument.is_one() && num + Rational::one() == den
    }

    /// The individual terms, built with the running ratio
    /// `term_{i+1} = term_i · Π(a+i) / (Π(b+i) (i+1)) · t`.
    pub fn terms(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.length + 1);
        let mut term = Rational::one();
        out.push(term.clone());
        for i in 0..self.length {
            let k = int(i as i64);
            let mut num = self.argument.clone();
            for a in &self.numerator {
                num *= a + &k;
            }
            let mut den = int(i as i64 + 1);
            for b in &self.denominator {
                den *= b + &k;
            }
            term = term * num / den;
            out.push(term.clone());
        }
        out
    }

    pub fn eval(&self) -> Rational {
        self.terms().into_iter().sum()
    }
}

/// `hyp_eval`
pub fn hyp_eval(spec: &HypTerminatingSpec) -> Rational {
    spec.eval()
}

/// Checks `2F1(-j, j+1; k+2; 1) = (k-j+1)_j / (k+2)_j` exactly.
pub fn verify_chu_vandermonde(j: u32, k: u32) -> bool {
    let (j, k) = (j as i64, k as i64);
    let spec = HypTerminatingSpec::f21(int(-j), int(j + 1), int(k + 2), int(1)).expect("valid Chu-Vandermonde series");
    let rhs = pochhammer(&int(k - j + 1), j as usize) / pochhammer(&int(k + 2), j as usize);
    spec.eval() == rhs
}

/// Checks the balanced `3F2(-j, j+1, 2m+1; 1, 2m+2; 1)` against its
/// Pfaff-Saalschütz closed form `(-j)_j (2m-j+1)_j / ((1)_j (2m+2)_j)`.
pub fn verify_saalschutz(j: u32, m: u32) -> bool {
    let (j, m) = (j as i64, m as i64);
    let spec = HypTerminatingSpec::new(vec![int(-j), int(j + 1), int(2 * m + 1)], vec![int(1), int(2 * m + 2)], int(1))
        .expect("valid Saalschütz series");
    debug_assert!(spec.is_balanced());
    let ju = j as usize;
    let rhs = pochhammer(&int(-j), ju) * pochhammer(&int(2 * m - j + 1), ju)
        / (pochhammer(&int(1), ju) * pochhammer(&int(2 * m + 2), ju));
    spec.eval() == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn trivial_and_small_series() {
        let s = HypTerminatingSpec::f21(int(0), rat(7, 3), int(5), rat(2, 9)).unwrap();
        assert_eq!(s.eval(), int(1));
        // 1 + (-1)(2)/(2·1) = 0
        let s = HypTerminatingSpec::f21(int(-1), int(2), int(2), int(1)).unwrap();
        assert_eq!(hyp_eval(&s), int(0));
    }

    #[test]
    fn chu_vandermonde_at_j2_k3() {
        let s = HypTerminatingSpec::f21(int(-2), int(3), int(5), int(1)).unwrap();
        let rhs = pochhammer(&int(2), 2) / pochhammer(&int(5), 2);
        // 1 - 6/5 + 2/5 = 1/5 and (2)_2/(5)_2 = 6/30
        assert_eq!(s.eval(), rat(1, 5));
        assert_eq!(rhs, rat(1, 5));
    }

    #[test]
    fn identities() {
        assert!(verify_chu_vandermonde(0, 0));
        assert!(verify_chu_vandermonde(3, 1));
        assert!(verify_chu_vandermonde(2, 5));
        assert!(verify_saalschutz(0, 0));
        assert!(verify_saalschutz(1, 1));
        assert!(verify_saalschutz(2, 3));
        for j in 0..12 {
            for k in 0..12 {
                assert!(verify_chu_vandermonde(j, k), "chu-vandermonde ({j},{k})");
                assert!(verify_saalschutz(j, k), "saalschutz ({j},{k})");
            }
        }
    }

    #[test]
    fn termination_rules() {
        assert_eq!(HypTerminatingSpec::f21(rat(1, 2), int(1), int(1), int(1)), Err(HypergeomError::NonTerminating));
        // denominator -2 with 4 terms hits (−2)(−1)(0)
        assert!(matches!(
            HypTerminatingSpec::f21(int(-4), int(1), int(-2), int(1)),
            Err(HypergeomError::ZeroDenominator { .. })
        ));
        // -2i denominators are fine when the series stops at i - j ≤ 2i
        let s = HypTerminatingSpec::f21(int(-1), int(-6), int(-4), int(2)).unwrap();
        assert_eq!(s.length(), 1);
        assert_eq!(s.eval(), int(1) + int(-1) * int(-6) * int(2) / int(-4));
        // the smallest |a| wins
        let s = HypTerminatingSpec::f21(int(-5), int(-2), int(-3), int(1)).unwrap();
        assert_eq!(s.length(), 2);
    }

    #[test]
    fn zero_argument_is_one() {
        let s = HypTerminatingSpec::new(vec![int(-6), rat(1, 2)], vec![rat(3, 2), int(4)], int(0)).unwrap();
        assert_eq!(s.eval(), int(1));
    }

    proptest! {
        #[test]
        fn reverse_order_sum_matches(n in 0i64..15, b in -20i64..20, c in 1i64..20, tn in -6i64..6, td in 1i64..6) {
            let s = HypTerminatingSpec::f21(int(-n), rat(b, 3), rat(c, 2), rat(tn, td)).unwrap();
            let forward = s.eval();
            let backward: Rational = s.terms().into_iter().rev().sum();
            prop_assert_eq!(forward, backward);
        }
    }
}
