//! The wavelet matrices `(D_1, D_{-1})`: the unique upper-triangular pair
//! with positive diagonal that completes `(C_1, C_{-1})` to an orthogonal
//! two-scale system under the symmetry rule `(D_{-1})_{ij} = (-1)^{i+j+1}(D_1)_{ij}`.
//!
//! Rows are solved from the bottom up. Row `r` is supported on columns
//! `r..=n` and must be orthogonal to the `C_1` rows `i > r` of opposite
//! parity and to the already solved `D_1` rows `s > r` of the same parity.
//! That leaves a one-dimensional solution space, fixed by unit norm and a
//! positive leading entry.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, rat, ExactError, Rational, SurdValue, DEFAULT_RADICAL_LIMIT};
use crate::legendre::{monic_legendre_table, orthonormal_factor, PolyExact};
use crate::matrix::Matrix;
use crate::refinement::{checkerboard, CoeffMatrixPair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveletError {
    #[error("row {row}: solution space has dimension {dimension}, expected 1")]
    NullspaceDimension { row: usize, dimension: usize },
    #[error("row {row}: leading entry vanished")]
    ZeroLeadingEntry { row: usize },
    #[error("order mismatch: refinement order {coeff}, wavelet order {wavelet}")]
    OrderMismatch { coeff: usize, wavelet: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Bits kept when a row falls back to rational approximation.
const FALLBACK_BITS: u32 = 320;
/// Bits of the square root taken in the fallback normalization.
const FALLBACK_SQRT_BITS: usize = 300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletMatrixPair {
    #[serde(rename = "n")]
    pub order: usize,
    #[serde(rename = "D1")]
    pub d1: Matrix<SurdValue>,
    #[serde(rename = "Dm1")]
    pub dm1: Matrix<SurdValue>,
    /// Rows whose exact solve hit the radical limit and were computed from
    /// high-precision rational approximations instead.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inexact_rows: Vec<usize>,
}

impl WaveletMatrixPair {
    /// Derives `D_{-1}` from `D_1`.
    pub fn from_d1(d1: Matrix<SurdValue>) -> Self {
        let dm1 = checkerboard(&d1, true);
        WaveletMatrixPair { order: d1.rows() - 1, d1, dm1, inexact_rows: Vec::new() }
    }

    /// The Haar pair `D_1 = (-1)`, `D_{-1} = (1)`.
    pub fn haar() -> Self {
        let d1 = Matrix::from_fn(1, 1, |_, _| SurdValue::from_integer(-1));
        let dm1 = Matrix::from_fn(1, 1, |_, _| SurdValue::one());
        WaveletMatrixPair { order: 0, d1, dm1, inexact_rows: Vec::new() }
    }

    pub fn is_exact(&self) -> bool {
        self.inexact_rows.is_empty()
    }
}

/// Gauss-Jordan elimination returning the null vector with the free
/// variable set to 1. Pivots are chosen by largest approximate magnitude.
fn null_vector<T: Clone + Zero + One + PartialEq>(
    mut rows: Vec<Vec<T>>,
    unknowns: usize,
    row_label: usize,
    div: impl Fn(&T, &T) -> Result<T, ExactError>,
    magnitude: impl Fn(&T) -> f64,
    sub_mul: impl Fn(&T, &T, &T) -> T,
) -> Result<Vec<T>, WaveletError> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..unknowns {
        let best = (rank..rows.len())
            .filter(|&k| !rows[k][col].is_zero())
            .max_by(|&a, &b| magnitude(&rows[a][col]).total_cmp(&magnitude(&rows[b][col])));
        let Some(p) = best else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        let normalized: Vec<T> = rows[rank].iter().map(|x| div(x, &pivot)).collect::<Result<_, _>>()?;
        rows[rank] = normalized;
        for k in 0..rows.len() {
            if k != rank && !rows[k][col].is_zero() {
                let factor = rows[k][col].clone();
                let updated: Vec<T> = rows[k].iter().zip(&rows[rank]).map(|(a, b)| sub_mul(a, &factor, b)).collect();
                rows[k] = updated;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let dimension = unknowns - rank;
    if dimension != 1 {
        return Err(WaveletError::NullspaceDimension { row: row_label, dimension });
    }
    let free = (0..unknowns).find(|c| !pivots.contains(c)).expect("one free column");
    let mut x = vec![T::zero(); unknowns];
    x[free] = T::one();
    for (k, &pc) in pivots.iter().enumerate() {
        // x_pc + a_free x_free = 0
        x[pc] = sub_mul(&T::zero(), &rows[k][free], &T::one());
    }
    Ok(x)
}

fn constraint_rows(c: &CoeffMatrixPair, d1: &Matrix<SurdValue>, r: usize) -> Vec<Vec<SurdValue>> {
    let n = c.order;
    let mut rows = Vec::new();
    for i in (r + 1..=n).step_by(2) {
        rows.push(c.c1.row(i)[r..].to_vec());
    }
    for s in (r + 2..=n).step_by(2) {
        rows.push(d1.row(s)[r..].to_vec());
    }
    rows
}

fn solve_row_exact(rows: Vec<Vec<SurdValue>>, r: usize, limit: usize) -> Result<Vec<SurdValue>, WaveletError> {
    let unknowns = rows.first().map_or(1, Vec::len);
    let x =
        null_vector(rows, unknowns, r, |a, b| a.div_with_limit(b, limit), |a| a.to_f64().abs(), |a, f, b| a - f * b)?;
    let norm2: SurdValue = x.iter().map(SurdValue::square).sum();
    let norm2 = norm2.as_rational().ok_or(ExactError::NotRepresentable)?;
    let mut norm = SurdValue::sqrt_rational(&norm2)?;
    match x[0].signum() {
        0 => return Err(WaveletError::ZeroLeadingEntry { row: r }),
        s if s < 0 => norm = -norm,
        _ => {}
    }
    Ok(x.iter().map(|v| v.div_with_limit(&norm, limit)).collect::<Result<_, _>>()?)
}

fn sqrt_approx(q: &Rational) -> Rational {
    let shift = 2 * FALLBACK_SQRT_BITS;
    let scaled = (q.numer() << shift) / q.denom();
    Rational::new(scaled.sqrt(), BigInt::one() << FALLBACK_SQRT_BITS)
}

fn solve_row_approx(rows: &[Vec<SurdValue>], r: usize) -> Result<Vec<SurdValue>, WaveletError> {
    let approx: Vec<Vec<Rational>> =
        rows.iter().map(|row| row.iter().map(|v| v.approx_rational(FALLBACK_BITS)).collect()).collect();
    let unknowns = approx.first().map_or(1, Vec::len);
    let x = null_vector(
        approx,
        unknowns,
        r,
        |a, b| Ok(a / b),
        |a| num_traits::ToPrimitive::to_f64(&a.abs()).unwrap_or(f64::INFINITY),
        |a, f, b| a - f * b,
    )?;
    let norm2: Rational = x.iter().map(|v| v * v).sum();
    let mut norm = sqrt_approx(&norm2);
    if x[0].is_zero() {
        return Err(WaveletError::ZeroLeadingEntry { row: r });
    }
    if x[0].is_negative() {
        norm = -norm;
    }
    Ok(x.iter().map(|v| SurdValue::from_rational(v / &norm)).collect())
}

/// Solves with the default radical limit.
pub fn build_wavelet_matrices(c: &CoeffMatrixPair) -> Result<WaveletMatrixPair, WaveletError> {
    build_wavelet_matrices_with_limit(c, DEFAULT_RADICAL_LIMIT)
}

/// Row-by-row solve. A row whose exact elimination would divide by a
/// surd with more than `radical_limit` distinct primes is recomputed from
/// rational approximations and listed in `inexact_rows`.
pub fn build_wavelet_matrices_with_limit(
    c: &CoeffMatrixPair,
    radical_limit: usize,
) -> Result<WaveletMatrixPair, WaveletError> {
    let n = c.order;
    if n == 0 {
        return Ok(WaveletMatrixPair::haar());
    }
    let mut d1 = Matrix::zeros(n + 1, n + 1);
    d1[(n, n)] = SurdValue::one();
    let mut inexact = Vec::new();
    for r in (0..n).rev() {
        let rows = constraint_rows(c, &d1, r);
        let solution = match solve_row_exact(rows.clone(), r, radical_limit) {
            Ok(x) => x,
            Err(WaveletError::Exact(_)) => {
                inexact.push(r);
                solve_row_approx(&rows, r)?
            }
            Err(e) => return Err(e),
        };
        for (k, v) in solution.into_iter().enumerate() {
            d1[(r, r + k)] = v;
        }
    }
    inexact.sort_unstable();
    let mut pair = WaveletMatrixPair::from_d1(d1);
    pair.inexact_rows = inexact;
    Ok(pair)
}

/// `C_{-1}D_{-1}ᵀ + C_1D_1ᵀ = 0`, `D_{-1}D_{-1}ᵀ + D_1D_1ᵀ = 2I`, and the
/// stacked one-level matrix `(1/√2)[[C_{-1}, C_1], [D_{-1}, D_1]]` is
/// orthogonal, all checked exactly.
pub fn verify_wavelet_orthogonality(c: &CoeffMatrixPair, d: &WaveletMatrixPair) -> Result<bool, WaveletError> {
    if c.order != d.order {
        return Err(WaveletError::OrderMismatch { coeff: c.order, wavelet: d.order });
    }
    let size = c.order + 1;
    let cross = &(&c.cm1 * &d.dm1.transpose()) + &(&c.c1 * &d.d1.transpose());
    let gram = &(&d.dm1 * &d.dm1.transpose()) + &(&d.d1 * &d.d1.transpose());
    let two = SurdValue::from_integer(2);
    let stacked = Matrix::block2x2(&c.cm1, &c.c1, &d.dm1, &d.d1);
    let full = &stacked * &stacked.transpose();
    Ok(cross == Matrix::zeros(size, size)
        && gram == Matrix::identity(size).scale(&two)
        && full == Matrix::identity(2 * size).scale(&two))
}

/// For each parity `p`, the `C_1` rows with index `≡ p` together with the
/// `D_1` rows with index `≢ p` form an orthonormal set of `n+1` vectors.
pub fn parity_basis_orthonormal(c: &CoeffMatrixPair, d: &WaveletMatrixPair) -> bool {
    let n = c.order;
    (0..2).all(|p| {
        let vectors: Vec<&[SurdValue]> = (0..=n).map(|i| if i % 2 == p { c.c1.row(i) } else { d.d1.row(i) }).collect();
        vectors.iter().enumerate().all(|(a, u)| {
            vectors.iter().enumerate().all(|(b, v)| {
                let dot: SurdValue = u.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                dot == if a == b { SurdValue::one() } else { SurdValue::zero() }
            })
        })
    })
}

/// Every row of `D_1` has unit Euclidean norm.
pub fn rows_have_unit_norm(d: &WaveletMatrixPair) -> bool {
    (0..=d.order).all(|i| d.d1.row(i).iter().map(SurdValue::square).sum::<SurdValue>() == SurdValue::one())
}

/// Order-stability of the wavelet rows at even offsets from the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvenRowReport {
    pub order: usize,
    /// Rows `n-2j` (`j ≥ 1`) checked.
    pub rows: Vec<usize>,
    /// `(D^n_1)_{n-2j, n} = 0` for every checked row.
    pub last_column_vanishes: bool,
    /// `(D^n_1)_{n-2j, c} = (D^{n-1}_1)_{n-2j, c}` for every `c ≤ n-1`.
    pub same_index_agreement: bool,
    /// `(D^n_1)_{n-2j, c} = (D^{n-1}_1)_{n-1-2j, c-1}`, the shifted reading.
    pub shifted_index_agreement: bool,
}

impl EvenRowReport {
    pub fn passed(&self) -> bool {
        self.last_column_vanishes && (self.same_index_agreement || self.shifted_index_agreement)
    }
}

pub fn check_even_rows(big: &WaveletMatrixPair, small: &WaveletMatrixPair) -> EvenRowReport {
    let n = big.order;
    assert_eq!(small.order + 1, n, "consecutive orders required");
    let rows: Vec<usize> = (1..=n / 2).map(|j| n - 2 * j).collect();
    let last_column_vanishes = rows.iter().all(|&r| big.d1[(r, n)].is_zero());
    let same_index_agreement = rows.iter().all(|&r| (0..n).all(|c| big.d1[(r, c)] == small.d1[(r, c)]));
    let shifted_index_agreement = rows
        .iter()
        .all(|&r| r >= 1 && (1..n).all(|c| big.d1[(r, c)] == small.d1[(r - 1, c - 1)]) && big.d1[(r, 0)].is_zero());
    EvenRowReport { order: n, rows, last_column_vanishes, same_index_agreement, shifted_index_agreement }
}

pub fn verify_even_row_embedding(n: usize) -> Result<EvenRowReport, WaveletError> {
    assert!(n >= 2, "needs n >= 2");
    let build = |m: usize| -> Result<WaveletMatrixPair, WaveletError> {
        let c = crate::refinement::build_coeff_matrices(m, Default::default()).expect("valid order");
        build_wavelet_matrices(&c)
    };
    Ok(check_even_rows(&build(n)?, &build(n - 1)?))
}

/// Row `n-1` in columns `n-1, n`: `(1/(2n), -√((2n+1)(2n-1))/(2n))`.
pub fn wavelet_row_nm1_closed_form(n: usize) -> Vec<SurdValue> {
    assert!(n >= 1);
    let m = n as i64;
    vec![SurdValue::from_rational(rat(1, 2 * m)), SurdValue::term(rat(-1, 2 * m), ((2 * m + 1) * (2 * m - 1)) as u64)]
}

/// Row `n-2` in columns `n-2..=n`: `(1/(2n-2), -√((2n-1)(2n-3))/(2n-2), 0)`.
pub fn wavelet_row_nm2_closed_form(n: usize) -> Vec<SurdValue> {
    assert!(n >= 2);
    let m = n as i64;
    vec![
        SurdValue::from_rational(rat(1, 2 * m - 2)),
        SurdValue::term(rat(-1, 2 * m - 2), ((2 * m - 1) * (2 * m - 3)) as u64),
        SurdValue::zero(),
    ]
}

/// Row `n-3` in columns `n-3..=n`.
pub fn wavelet_row_nm3_closed_form(n: usize) -> Vec<SurdValue> {
    assert!(n >= 3);
    let m = n as i64;
    let a = 4 * (m - 1) * (m - 2);
    let b = 4 * m * (m - 1);
    vec![
        SurdValue::from_rational(rat(3, a)),
        SurdValue::term(rat(-3, a), ((2 * m - 3) * (2 * m - 5)) as u64),
        SurdValue::term(rat(2 * m + 1, b), ((2 * m - 1) * (2 * m - 5)) as u64),
        SurdValue::term(rat(1, b), ((2 * m + 1) * (2 * m - 5)) as u64),
    ]
}

/// `D_{-1} P(2t+1)` for `-1 ≤ t < 0` and `D_1 P(2t-1)` for `0 ≤ t ≤ 1`,
/// where `P` is the orthonormal Legendre vector on `[-1, 1]`; zero outside.
/// This is the wavelet vector on `[0, 1]` evaluated at `(t+1)/2`.
pub fn eval_wavelet_vector(d: &WaveletMatrixPair, t: &Rational) -> Vec<SurdValue> {
    let n = d.order;
    if t < &int(-1) || t > &int(1) {
        return vec![SurdValue::zero(); n + 1];
    }
    let (m, x) = if t < &Rational::zero() { (&d.dm1, t * int(2) + int(1)) } else { (&d.d1, t * int(2) - int(1)) };
    m.apply(&crate::legendre::eval_orthonormal_all(n, &x))
}

/// `∫_{-1}^{1} t^m ψ_i(t) dt` for every row `i` and every `m ≤ max_power`,
/// computed by exact polynomial integration of the two halves.
pub fn wavelet_moments(d: &WaveletMatrixPair, max_power: usize) -> Vec<Vec<SurdValue>> {
    let n = d.order;
    let table = monic_legendre_table(n);
    let half = |k: usize, m: usize, left: bool| -> Rational {
        let shift = if left { int(1) } else { int(-1) };
        let p = table[k].compose_affine(&int(2), &shift);
        let (lo, hi) = if left { (int(-1), int(0)) } else { (int(0), int(1)) };
        (&PolyExact::monomial(m) * &p).integrate(&lo, &hi)
    };
    (0..=n)
        .map(|i| {
            (0..=max_power)
                .map(|m| {
                    (0..=n)
                        .map(|k| {
                            let left = d.dm1[(i, k)].scale(&half(k, m, true));
                            let right = d.d1[(i, k)].scale(&half(k, m, false));
                            (left + right) * orthonormal_factor(k)
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// All moments up to degree `n` vanish.
pub fn has_vanishing_moments(d: &WaveletMatrixPair) -> bool {
    wavelet_moments(d, d.order).iter().flatten().all(SurdValue::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::{build_coeff_matrices, FormulaPath};

    fn coeffs(n: usize) -> CoeffMatrixPair {
        build_coeff_matrices(n, FormulaPath::TwoF1Half).unwrap()
    }

    fn wavelets(n: usize) -> WaveletMatrixPair {
        build_wavelet_matrices(&coeffs(n)).unwrap()
    }

    #[test]
    fn order_one_matches_reference() {
        let d = wavelets(1);
        assert_eq!(d.d1[(0, 0)], SurdValue::from_rational(rat(1, 2)));
        assert_eq!(d.d1[(0, 1)], SurdValue::term(rat(-1, 2), 3));
        assert!(d.d1[(1, 0)].is_zero());
        assert_eq!(d.d1[(1, 1)], SurdValue::one());
        assert_eq!(d.dm1[(0, 0)], SurdValue::from_rational(rat(-1, 2)));
        assert_eq!(d.dm1[(0, 1)], SurdValue::term(rat(-1, 2), 3));
        assert_eq!(d.dm1[(1, 1)], SurdValue::from_integer(-1));
        assert!(d.is_exact());
    }

    #[test]
    fn haar_case() {
        let d = wavelets(0);
        assert_eq!(d, WaveletMatrixPair::haar());
        assert!(verify_wavelet_orthogonality(&coeffs(0), &d).unwrap());
    }

    #[test]
    fn orthogonality_and_structure() {
        for n in 1..=5 {
            let (c, d) = (coeffs(n), wavelets(n));
            assert!(verify_wavelet_orthogonality(&c, &d).unwrap(), "n={n}");
            assert!(d.d1.is_upper_triangular());
            assert!((0..=n).all(|i| d.d1[(i, i)].is_positive()));
            assert!(parity_basis_orthonormal(&c, &d));
            assert!(rows_have_unit_norm(&d));
        }
    }

    #[test]
    fn explicit_rows() {
        let d4 = wavelets(4);
        assert_eq!(d4.d1.row(3)[3..].to_vec(), wavelet_row_nm1_closed_form(4));
        let d5 = wavelets(5);
        assert_eq!(d5.d1.row(3)[3..].to_vec(), wavelet_row_nm2_closed_form(5));
        let d3 = wavelets(3);
        assert_eq!(d3.d1.row(0).to_vec(), wavelet_row_nm3_closed_form(3));
        assert_eq!(d4.d1.row(1)[1..].to_vec(), wavelet_row_nm3_closed_form(4));
        for n in 3..=10 {
            let norm: SurdValue = wavelet_row_nm3_closed_form(n).iter().map(SurdValue::square).sum();
            assert_eq!(norm, SurdValue::one(), "n={n}");
        }
    }

    #[test]
    fn even_rows() {
        assert!(wavelets(3).d1[(1, 3)].is_zero());
        assert!(wavelets(2).d1[(0, 2)].is_zero());
        for n in 2..=6 {
            let r = verify_even_row_embedding(n).unwrap();
            assert!(r.last_column_vanishes, "n={n}");
            assert!(r.same_index_agreement, "n={n}");
        }
    }

    #[test]
    fn moments_vanish() {
        for n in 0..=4 {
            assert!(has_vanishing_moments(&wavelets(n)), "n={n}");
        }
        // the degree n+1 moment does not vanish in general
        let d = wavelets(1);
        assert!(!wavelet_moments(&d, 2).iter().all(|row| row[2].is_zero()));
    }

    #[test]
    fn evaluation_support() {
        let d = wavelets(0);
        let v = eval_wavelet_vector(&d, &rat(-1, 2));
        // Haar: p̂_0 = 1/√2 on each half, with opposite signs
        assert_eq!(v, vec![SurdValue::term(rat(1, 2), 2)]);
        assert_eq!(eval_wavelet_vector(&d, &rat(1, 2)), vec![SurdValue::term(rat(-1, 2), 2)]);
        assert_eq!(eval_wavelet_vector(&d, &rat(3, 2)), vec![SurdValue::zero()]);
        let d1 = wavelets(1);
        assert_eq!(eval_wavelet_vector(&d1, &int(0)).len(), 2);
    }

    #[test]
    fn deterministic_rebuild() {
        let c = coeffs(5);
        assert_eq!(build_wavelet_matrices(&c).unwrap(), build_wavelet_matrices(&c).unwrap());
    }

    #[test]
    fn fallback_is_flagged_and_close() {
        let c = coeffs(4);
        let exact = build_wavelet_matrices(&c).unwrap();
        let approx = build_wavelet_matrices_with_limit(&c, 0).unwrap();
        assert!(!approx.inexact_rows.is_empty());
        for i in 0..=4 {
            for j in 0..=4 {
                let diff = (&exact.d1[(i, j)] - &approx.d1[(i, j)]).to_f64().abs();
                assert!(diff < 1e-60, "({i},{j}) diff {diff}");
            }
        }
        let json = serde_json::to_value(&approx).unwrap();
        assert!(json["inexact_rows"].is_array());
        assert!(serde_json::to_value(&exact).unwrap().get("inexact_rows").is_none());
    }
}
