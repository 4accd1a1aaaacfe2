//! The refinement matrices `(C_1, C_{-1})` of the Alpert scaling vector.
//!
//! `C_1` is lower triangular and every entry depends only on its `(i, j)`
//! position, so the order-`m` matrix is the leading block of any larger one.
//! Entries are produced by four independent routes: two `2F1`
//! representations, a parity-split balanced `4F3` representation, and the
//! defining integral. `C_{-1}` follows from `(C_{-1})_{ij} = (-1)^{i+j}(C_1)_{ij}`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{double_factorial, factorial, int, pochhammer, pow2, rat, sign_pow, Rational, SurdValue};
use crate::hypergeom::{HypTerminatingSpec, HypergeomError};
use crate::legendre::{eval_orthonormal_all, integrate_shifted_product_with, monic_legendre_table};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefinementError {
    #[error("entry ({i}, {j}) lies above the diagonal and is structurally zero")]
    AboveDiagonal { i: usize, j: usize },
    #[error(transparent)]
    Hypergeom(#[from] HypergeomError),
    #[error("unknown formula path `{0}` (expected 2f1-half, 2f1-two, 4f3 or oracle)")]
    UnknownPath(String),
}

/// Which representation fills the lower triangle of `C_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum FormulaPath {
    /// `2F1(-i+j, i+j+1; 2j+2; 1/2)`
    #[default]
    #[serde(rename = "2f1-half")]
    TwoF1Half,
    /// `2F1(-i+j, -i-j-1; -2i; 2)`
    #[serde(rename = "2f1-two")]
    TwoF1Two,
    /// Balanced `4F3` at unit argument, split by row and column parity.
    #[serde(rename = "4f3")]
    FourF3,
    /// Exact integration of the defining integral.
    #[serde(rename = "oracle")]
    Oracle,
}

impl FormulaPath {
    pub const ALL: [FormulaPath; 4] =
        [FormulaPath::TwoF1Half, FormulaPath::TwoF1Two, FormulaPath::FourF3, FormulaPath::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            FormulaPath::TwoF1Half => "2f1-half",
            FormulaPath::TwoF1Two => "2f1-two",
            FormulaPath::FourF3 => "4f3",
            FormulaPath::Oracle => "oracle",
        }
    }
}

impl fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaPath {
    type Err = RefinementError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormulaPath::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| RefinementError::UnknownPath(s.to_string()))
    }
}

fn check_lower(i: usize, j: usize) -> Result<(), RefinementError> {
    if j > i {
        Err(RefinementError::AboveDiagonal { i, j })
    } else {
        Ok(())
    }
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n as u64))
}

/// `√((2i+1)(2j+1))`
fn radical(i: usize, j: usize) -> SurdValue {
    SurdValue::sqrt(((2 * i + 1) * (2 * j + 1)) as u64)
}

/// `√((2i+1)(2j+1)) (i+j)! / (2^j (2j+1)! (i-j)!) · 2F1(-i+j, i+j+1; 2j+2; 1/2)`
pub fn c1_entry_2f1_half(i: usize, j: usize) -> Result<SurdValue, RefinementError> {
    check_lower(i, j)?;
    let (ii, jj) = (i as i64, j as i64);
    let f = HypTerminatingSpec::f21(int(jj - ii), int(ii + jj + 1), int(2 * jj + 2), rat(1, 2))?;
    let q = fact(i + j) / (pow2(jj) * fact(2 * j + 1) * fact(i - j)) * f.eval();
    Ok(radical(i, j).scale(&q))
}

/// `(-1)^{i-j} √((2i+1)(2j+1)) (2i)! / (2^i (i+j+1)! (i-j)!) · 2F1(-i+j, -i-j-1; -2i; 2)`
pub fn c1_entry_2f1_two(i: usize, j: usize) -> Result<SurdValue, RefinementError> {
    check_lower(i, j)?;
    let (ii, jj) = (i as i64, j as i64);
    let f = HypTerminatingSpec::f21(int(jj - ii), int(-ii - jj - 1), int(-2 * ii), int(2))?;
    let q = sign_pow(ii - jj) * fact(2 * i) / (pow2(ii) * fact(i + j + 1) * fact(i - j)) * f.eval();
    Ok(radical(i, j).scale(&q))
}

/// `(2i-1)!! (2j-1)!! / (i! j!)`; the entry is this times `√((2i+1)(2j+1))`
/// times the monic-polynomial integral.
fn k_weight(i: usize, j: usize) -> Rational {
    let di = double_factorial(2 * i as i64 - 1).expect("odd");
    let dj = double_factorial(2 * j as i64 - 1).expect("odd");
    Rational::new(di * dj, factorial(i as u64) * factorial(j as u64))
}

fn balanced_4f3(num: [Rational; 4], den: [Rational; 3]) -> Result<Rational, RefinementError> {
    let spec = HypTerminatingSpec::new(num.to_vec(), den.to_vec(), int(1))?;
    assert!(spec.is_balanced(), "4F3 representation must be balanced");
    Ok(spec.eval())
}

/// Parity-dispatched balanced `4F3` representation. Writing the row as `2I`
/// or `2I+1` and the column as `2J`, `2J-1` or `2J+1`, each of the four
/// parity classes has its own prefactor and a balanced `4F3` whose
/// terminating parameter is `-(I-J)`.
pub fn c1_entry_4f3(i: usize, j: usize) -> Result<SurdValue, RefinementError> {
    check_lower(i, j)?;
    let h = rat(1, 2);
    let big_i = (i / 2) as i64;
    let bi = int(big_i);
    let p = |a: Rational, k: i64| pochhammer(&a, k as usize);
    let integral = match (i % 2, j % 2) {
        (0, 0) => {
            let jj = (j / 2) as i64;
            let pre = pow2(2 * jj - 1) * p(-&bi, jj) * p(-&bi + &h, jj) * fact(2 * jj as usize)
                / (p(&bi + &h, jj + 1) * p(&bi + int(1), jj) * p(int(2 * jj + 1), 2 * jj));
            let f = balanced_4f3(
                [int(jj - big_i), int(jj - big_i) + &h, int(-big_i - jj) - &h, int(-big_i - jj)],
                [int(-2 * big_i) + &h, -&bi, -&bi + &h],
            )?;
            pre * f
        }
        (0, 1) => {
            // column 2J-1
            let jj = (j / 2 + 1) as i64;
            let pre = pow2(2 * jj - 2) * p(-&bi, jj) * p(-&bi + &h, jj - 1) * fact(2 * jj as usize - 1)
                / (p(&bi + &h, jj) * p(int(2 * jj), 2 * jj - 1) * p(&bi + int(1), jj));
            let f = balanced_4f3(
                [int(jj - big_i), int(jj - big_i) - &h, int(-big_i - jj) + &h, int(-big_i - jj)],
                [int(-2 * big_i) + &h, -&bi, -&bi + &h],
            )?;
            -(pre * f)
        }
        (1, 0) => {
            let jj = (j / 2) as i64;
            let pre = pow2(2 * jj - 1) * p(-&bi, jj) * p(-&bi - &h, jj) * fact(2 * jj as usize)
                / (p(&bi + rat(3, 2), jj) * p(&bi + int(1), jj + 1) * p(int(2 * jj + 1), 2 * jj));
            let f = balanced_4f3(
                [int(jj - big_i), int(jj - big_i) - &h, int(-big_i - jj - 1), int(-big_i - jj) - &h],
                [int(-2 * big_i) - &h, -&bi, -&bi - &h],
            )?;
            pre * f
        }
        _ => {
            // column 2J+1
            let jj = (j / 2) as i64;
            let pre = pow2(2 * jj) * p(-&bi, jj) * p(-&bi - &h, jj + 1) * fact(2 * jj as usize + 1)
                / (p(&bi + rat(3, 2), jj + 1) * p(&bi + int(1), jj + 1) * p(int(2 * jj + 2), 2 * jj + 1));
            let f = balanced_4f3(
                [int(jj - big_i), int(jj - big_i) + &h, int(-big_i - jj - 1), int(-big_i - jj) - rat(3, 2)],
                [int(-2 * big_i) - &h, -&bi, -&bi - &h],
            )?;
            -(pre * f)
        }
    };
    Ok(radical(i, j).scale(&(k_weight(i, j) * integral)))
}

/// First column from Kummer's theorem: zero for even `i > 0`, and
/// `(-1)^{(i-1)/2} (√(2i+1)/2) (1/2)_{(i-1)/2} / ((i+1)/2)!` for odd `i`.
/// At `i = 0` the Gamma-function form gives 1.
pub fn c1_entry_first_column(i: usize) -> SurdValue {
    if i == 0 {
        return SurdValue::one();
    }
    if i.is_multiple_of(2) {
        return SurdValue::zero();
    }
    let m = (i - 1) / 2;
    let q = sign_pow(m as i64) * pochhammer(&rat(1, 2), m) / (fact(i.div_ceil(2)) * int(2));
    SurdValue::term(q, (2 * i + 1) as u64)
}

/// The pair `(C_1, C_{-1})` for order `n`, both `(n+1) × (n+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffMatrixPair {
    #[serde(rename = "n")]
    pub order: usize,
    #[serde(rename = "C1")]
    pub c1: Matrix<SurdValue>,
    #[serde(rename = "Cm1")]
    pub cm1: Matrix<SurdValue>,
}

/// `(-1)^{i+j} m_{ij}`
pub(crate) fn checkerboard(m: &Matrix<SurdValue>, flip_diagonal: bool) -> Matrix<SurdValue> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        let odd = (i + j) % 2 == 1;
        if odd != flip_diagonal {
            -m[(i, j)].clone()
        } else {
            m[(i, j)].clone()
        }
    })
}

impl CoeffMatrixPair {
    /// Derives `C_{-1}` from `C_1`.
    pub fn from_c1(c1: Matrix<SurdValue>) -> Self {
        let cm1 = checkerboard(&c1, false);
        CoeffMatrixPair { order: c1.rows() - 1, c1, cm1 }
    }

    /// `C_1` entry with the zero convention for indices outside the lower
    /// triangle or the matrix.
    pub fn entry(&self, i: i64, j: i64) -> SurdValue {
        if j > i {
            return SurdValue::zero();
        }
        self.c1.get(i, j).cloned().unwrap_or_default()
    }

    pub fn leading(&self, m: usize) -> CoeffMatrixPair {
        CoeffMatrixPair::from_c1(self.c1.leading_block(m + 1))
    }

    /// `C_1` is lower triangular with positive diagonal and the `C_{-1}`
    /// sign rule holds.
    pub fn is_structurally_valid(&self) -> bool {
        self.c1.is_lower_triangular()
            && (0..=self.order).all(|i| self.c1[(i, i)].is_positive())
            && self.cm1 == checkerboard(&self.c1, false)
    }
}

/// Single entry through the chosen route (lower triangle only).
pub fn c1_entry(path: FormulaPath, i: usize, j: usize) -> Result<SurdValue, RefinementError> {
    match path {
        FormulaPath::TwoF1Half => c1_entry_2f1_half(i, j),
        FormulaPath::TwoF1Two => c1_entry_2f1_two(i, j),
        FormulaPath::FourF3 => c1_entry_4f3(i, j),
        FormulaPath::Oracle => {
            check_lower(i, j)?;
            Ok(crate::legendre::integrate_shifted_product(i, j))
        }
    }
}

/// Fills the lower triangle through `path` (entries computed in parallel and
/// merged in index order), leaves exact zeros above the diagonal, and
/// derives `C_{-1}`.
pub fn build_coeff_matrices(n: usize, path: FormulaPath) -> Result<CoeffMatrixPair, RefinementError> {
    let positions: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let table = (path == FormulaPath::Oracle).then(|| monic_legendre_table(n));
    let values: Vec<SurdValue> = positions
        .par_iter()
        .map(|&(i, j)| match &table {
            Some(t) => Ok(integrate_shifted_product_with(t, i, j)),
            None => c1_entry(path, i, j),
        })
        .collect::<Result<_, _>>()?;
    let mut c1 = Matrix::zeros(n + 1, n + 1);
    for (&(i, j), v) in positions.iter().zip(values) {
        c1[(i, j)] = v;
    }
    Ok(CoeffMatrixPair::from_c1(c1))
}

/// Outcome of checking `p̂_i(t) = Σ_j (C_{-1})_{ij} p̂_j(2t+1)[t<0] + Σ_j (C_1)_{ij} p̂_j(2t-1)[t≥0]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseReport {
    pub samples: usize,
    /// `(t, row)` pairs where the identity fails.
    pub failures: Vec<(String, usize)>,
}

impl PointwiseReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_refinement_pointwise_with(c: &CoeffMatrixPair, sample_count: usize) -> PointwiseReport {
    let n = c.order;
    let count = sample_count.max(2);
    let mut failures = Vec::new();
    for k in 0..count {
        let t = int(-1) + rat(2 * k as i64, count as i64 - 1);
        let lhs = eval_orthonormal_all(n, &t);
        let (m, x) = if t < int(0) { (&c.cm1, &t * int(2) + int(1)) } else { (&c.c1, &t * int(2) - int(1)) };
        let rhs = m.apply(&eval_orthonormal_all(n, &x));
        for (row, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
            if a != b {
                failures.push((t.to_string(), row));
            }
        }
    }
    PointwiseReport { samples: count, failures }
}

pub fn verify_refinement_pointwise(n: usize, sample_count: usize) -> Result<PointwiseReport, RefinementError> {
    let c = build_coeff_matrices(n, FormulaPath::default())?;
    Ok(verify_refinement_pointwise_with(&c, sample_count))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    /// `C_1 C_1ᵀ + C_{-1} C_{-1}ᵀ = 2I`
    pub sum_is_two_identity: bool,
    /// Rows of the same parity are orthogonal.
    pub same_parity_orthogonal: bool,
    /// Every row of `C_1` has unit norm.
    pub unit_rows: bool,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.sum_is_two_identity && self.same_parity_orthogonal && self.unit_rows
    }
}

pub fn check_orthogonality(c: &CoeffMatrixPair) -> OrthogonalityReport {
    let n = c.order;
    let gram = &c.c1 * &c.c1.transpose();
    let total = &gram + &(&c.cm1 * &c.cm1.transpose());
    let two_i = Matrix::identity(n + 1).scale(&SurdValue::from_integer(2));
    let same_parity_orthogonal = (0..=n).all(|i| (i + 2..=n).step_by(2).all(|k| gram[(i, k)].is_zero()));
    OrthogonalityReport {
        sum_is_two_identity: total == two_i,
        same_parity_orthogonal,
        unit_rows: (0..=n).all(|i| gram[(i, i)] == SurdValue::one()),
    }
}

pub fn verify_orthogonality(n: usize) -> Result<bool, RefinementError> {
    Ok(check_orthogonality(&build_coeff_matrices(n, FormulaPath::default())?).passed())
}

/// `(C_1)_{ii} = 2^{-i}`
pub fn closed_form_diagonal(i: usize) -> SurdValue {
    SurdValue::from_rational(pow2(-(i as i64)))
}

/// `(C_1)_{i,i-1} = √((2i+1)(2i-1)) / 2^i`
pub fn closed_form_subdiagonal(i: usize) -> SurdValue {
    assert!(i >= 1);
    SurdValue::term(pow2(-(i as i64)), ((2 * i + 1) * (2 * i - 1)) as u64)
}

/// `(i-2) √((2i+1) r) / 2^i` for the candidate second radicand factor `r`.
pub fn sub_subdiagonal_candidate(i: usize, second_factor: usize) -> SurdValue {
    assert!(i >= 2);
    SurdValue::term(int(i as i64 - 2) * pow2(-(i as i64)), ((2 * i + 1) * second_factor) as u64)
}

/// Which radicand makes `(C_1)_{i,i-2} = (i-2)√((2i+1)·r)/2^i` hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubSubdiagonalReport {
    pub checked_rows: Vec<usize>,
    /// Rows where the nominal radicand `(2i+1)(2i-1)` matches the oracle.
    pub nominal_radicand_rows: Vec<usize>,
    /// Rows where `(2i+1)(2i-3)` matches the oracle.
    pub alternate_radicand_rows: Vec<usize>,
    /// The radicand that holds on every checked row, if any.
    pub resolved_radicand: Option<String>,
}

/// Compares the oracle-built sub-subdiagonal against both candidate radicands.
pub fn resolve_sub_subdiagonal(oracle: &CoeffMatrixPair) -> SubSubdiagonalReport {
    let rows: Vec<usize> = (2..=oracle.order).collect();
    let matches = |factor: fn(usize) -> usize| -> Vec<usize> {
        rows.iter().copied().filter(|&i| oracle.c1[(i, i - 2)] == sub_subdiagonal_candidate(i, factor(i))).collect()
    };
    let nominal = matches(|i| 2 * i - 1);
    let alternate = matches(|i| 2 * i - 3);
    let resolved = if !rows.is_empty() && alternate.len() == rows.len() {
        Some("(2i+1)(2i-3)".to_string())
    } else if !rows.is_empty() && nominal.len() == rows.len() {
        Some("(2i+1)(2i-1)".to_string())
    } else {
        None
    };
    SubSubdiagonalReport {
        checked_rows: rows,
        nominal_radicand_rows: nominal,
        alternate_radicand_rows: alternate,
        resolved_radicand: resolved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::integrate_shifted_product;

    fn s(q: Rational, m: u64) -> SurdValue {
        SurdValue::term(q, m)
    }

    #[test]
    fn two_f1_half_examples() {
        assert_eq!(c1_entry_2f1_half(1, 0).unwrap(), s(rat(1, 2), 3));
        assert_eq!(c1_entry_2f1_half(4, 4).unwrap(), s(rat(1, 16), 1));
        assert_eq!(c1_entry_2f1_half(3, 1).unwrap(), s(rat(1, 8), 21));
        assert_eq!(c1_entry_2f1_half(0, 1), Err(RefinementError::AboveDiagonal { i: 0, j: 1 }));
    }

    #[test]
    fn two_f1_two_examples() {
        assert_eq!(c1_entry_2f1_two(2, 1).unwrap(), s(rat(1, 4), 15));
        assert_eq!(c1_entry_2f1_two(3, 3).unwrap(), s(rat(1, 8), 1));
        assert_eq!(c1_entry_2f1_two(5, 2).unwrap(), integrate_shifted_product(5, 2));
    }

    #[test]
    fn four_f3_examples() {
        assert_eq!(c1_entry_4f3(2, 2).unwrap(), s(rat(1, 4), 1));
        assert_eq!(c1_entry_4f3(3, 0).unwrap(), s(rat(-1, 8), 7));
        assert_eq!(c1_entry_4f3(6, 3).unwrap(), c1_entry_2f1_half(6, 3).unwrap());
        assert_eq!(c1_entry_4f3(0, 0).unwrap(), SurdValue::one());
    }

    #[test]
    fn first_column_examples() {
        assert!(c1_entry_first_column(2).is_zero());
        assert_eq!(c1_entry_first_column(1), s(rat(1, 2), 3));
        assert_eq!(c1_entry_first_column(3), s(rat(-1, 8), 7));
        for i in 0..=12 {
            assert_eq!(c1_entry_first_column(i), integrate_shifted_product(i, 0), "i={i}");
        }
    }

    #[test]
    fn paths_agree_small() {
        for i in 0..=7 {
            for j in 0..=i {
                let oracle = integrate_shifted_product(i, j);
                for path in [FormulaPath::TwoF1Half, FormulaPath::TwoF1Two, FormulaPath::FourF3] {
                    assert_eq!(c1_entry(path, i, j).unwrap(), oracle, "{path} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn small_matrices_match_reference() {
        let c3 = build_coeff_matrices(3, FormulaPath::TwoF1Half).unwrap();
        let expected = vec![
            vec![SurdValue::one(), SurdValue::zero(), SurdValue::zero(), SurdValue::zero()],
            vec![s(rat(1, 2), 3), s(rat(1, 2), 1), SurdValue::zero(), SurdValue::zero()],
            vec![SurdValue::zero(), s(rat(1, 4), 15), s(rat(1, 4), 1), SurdValue::zero()],
            vec![s(rat(-1, 8), 7), s(rat(1, 8), 21), s(rat(1, 8), 35), s(rat(1, 8), 1)],
        ];
        assert_eq!(c3.c1.to_rows(), expected);
        assert_eq!(c3.cm1[(3, 0)], s(rat(1, 8), 7));
        assert_eq!(c3.cm1[(2, 1)], s(rat(-1, 4), 15));
        assert!(c3.is_structurally_valid());
    }

    #[test]
    fn path_names_round_trip() {
        for p in FormulaPath::ALL {
            assert_eq!(p.name().parse::<FormulaPath>().unwrap(), p);
        }
        assert!("3f2".parse::<FormulaPath>().is_err());
    }

    #[test]
    fn pointwise_refinement() {
        for n in 0..=4 {
            let r = verify_refinement_pointwise(n, 9).unwrap();
            assert!(r.passed(), "n={n}: {:?}", r.failures);
        }
        let c = build_coeff_matrices(2, FormulaPath::Oracle).unwrap();
        let mut broken = c.clone();
        broken.c1[(2, 1)] = SurdValue::zero();
        broken = CoeffMatrixPair::from_c1(broken.c1);
        assert!(!verify_refinement_pointwise_with(&broken, 5).passed());
    }

    #[test]
    fn orthogonality_small() {
        for n in 0..=4 {
            assert!(verify_orthogonality(n).unwrap());
        }
        let c = build_coeff_matrices(3, FormulaPath::Oracle).unwrap();
        let cross: SurdValue = (0..4).map(|j| &c.c1[(3, j)] * &c.c1[(1, j)]).sum();
        assert!(cross.is_zero());
    }

    #[test]
    fn sub_subdiagonal_resolution() {
        let c = build_coeff_matrices(6, FormulaPath::Oracle).unwrap();
        let r = resolve_sub_subdiagonal(&c);
        assert_eq!(r.alternate_radicand_rows, vec![2, 3, 4, 5, 6]);
        // only the degenerate i = 2 row (value 0) satisfies the nominal form
        assert_eq!(r.nominal_radicand_rows, vec![2]);
        assert_eq!(r.resolved_radicand.as_deref(), Some("(2i+1)(2i-3)"));
    }

    #[test]
    fn json_schema() {
        let c = build_coeff_matrices(1, FormulaPath::TwoF1Half).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["n"], 1);
        assert_eq!(v["C1"][1][0]["terms"][0]["rad"], 3);
        assert_eq!(v["C1"][1][0]["terms"][0]["num"], "1");
        assert_eq!(v["C1"][1][0]["terms"][0]["den"], "2");
        assert_eq!(v["C1"][0][1]["terms"].as_array().unwrap().len(), 0);
        let back: CoeffMatrixPair = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }
}
