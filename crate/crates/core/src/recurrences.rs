//! Three-term shift operators acting on `C_1` entries, the recurrence
//! checks they define, and regeneration of `C_1` from its diagonal seeds.
//!
//! Taps that land outside the lower triangle read the structural zero, and
//! a tap whose entry is zero never evaluates its coefficient (some
//! coefficients are undefined exactly where the entry vanishes, e.g.
//! `1/√((2i+1)(2i-1))` at `i = 0`).

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{int, pow2, rat, Rational, SurdValue};
use crate::matrix::Matrix;
use crate::refinement::{
    build_coeff_matrices, c1_entry_first_column, closed_form_subdiagonal, CoeffMatrixPair, FormulaPath, RefinementError,
};

/// Which index a shift operator moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Row,
    Col,
}

type Coefficient = fn(i64) -> SurdValue;

/// `backward(k) E_- + center(k) + forward(k) E_+` along one axis, where `k`
/// is the index on that axis.
#[derive(Clone, Copy)]
pub struct ShiftOperator {
    pub axis: Axis,
    pub backward: Coefficient,
    pub center: Coefficient,
    pub forward: Coefficient,
}

impl fmt::Debug for ShiftOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftOperator").field("axis", &self.axis).finish_non_exhaustive()
    }
}

/// `1/√(a·b)` as a single surd term.
fn inv_sqrt(a: i64, b: i64) -> SurdValue {
    let m = a * b;
    SurdValue::term(rat(1, m), m as u64)
}

/// `√(a/b)`
fn sqrt_ratio(a: i64, b: i64) -> SurdValue {
    SurdValue::term(rat(1, b), (a * b) as u64)
}

fn rational(q: Rational) -> SurdValue {
    SurdValue::from_rational(q)
}

fn zero(_: i64) -> SurdValue {
    SurdValue::zero()
}

fn one(_: i64) -> SurdValue {
    SurdValue::one()
}

impl ShiftOperator {
    /// Applies the operator at `(i, j)` to a matrix given by its entry lookup.
    pub fn apply(&self, entry: impl Fn(i64, i64) -> SurdValue, i: i64, j: i64) -> SurdValue {
        let (k, at): (i64, Box<dyn Fn(i64) -> SurdValue>) = match self.axis {
            Axis::Row => (i, Box::new(|r| entry(r, j))),
            Axis::Col => (j, Box::new(|c| entry(i, c))),
        };
        let mut total = SurdValue::zero();
        for (offset, coeff) in [(-1, self.backward), (0, self.center), (1, self.forward)] {
            let v = at(k + offset);
            if !v.is_zero() {
                total += coeff(k) * v;
            }
        }
        total
    }

    /// `i(i+1)(i+2)/√((2i+3)(2i+1)) E_+ + (i-1)i(i+1)/√((2i+1)(2i-1)) E_-`
    pub fn eigen_row_lhs() -> Self {
        ShiftOperator {
            axis: Axis::Row,
            backward: |i| inv_sqrt(2 * i + 1, 2 * i - 1).scale(&int((i - 1) * i * (i + 1))),
            center: zero,
            forward: |i| inv_sqrt(2 * i + 3, 2 * i + 1).scale(&int(i * (i + 1) * (i + 2))),
        }
    }

    /// `i/√((2i+3)(2i+1)) E_+ + 1 + (i+1)/√((2i+1)(2i-1)) E_-`
    pub fn eigen_row_rhs() -> Self {
        ShiftOperator {
            axis: Axis::Row,
            backward: |i| inv_sqrt(2 * i + 1, 2 * i - 1).scale(&int(i + 1)),
            center: one,
            forward: |i| inv_sqrt(2 * i + 3, 2 * i + 1).scale(&int(i)),
        }
    }

    /// `j(j+1)(j+2)/√((2j+3)(2j+1)) Ê_+ + 3j(j+1) + (j-1)j(j+1)/√((2j+1)(2j-1)) Ê_-`
    pub fn eigen_col_lhs() -> Self {
        ShiftOperator {
            axis: Axis::Col,
            backward: |j| inv_sqrt(2 * j + 1, 2 * j - 1).scale(&int((j - 1) * j * (j + 1))),
            center: |j| rational(int(3 * j * (j + 1))),
            forward: |j| inv_sqrt(2 * j + 3, 2 * j + 1).scale(&int(j * (j + 1) * (j + 2))),
        }
    }

    /// `j/√((2j+3)(2j+1)) Ê_+ + 1 + (j+1)/√((2j+1)(2j-1)) Ê_-`
    pub fn eigen_col_rhs() -> Self {
        ShiftOperator {
            axis: Axis::Col,
            backward: |j| inv_sqrt(2 * j + 1, 2 * j - 1).scale(&int(j + 1)),
            center: one,
            forward: |j| inv_sqrt(2 * j + 3, 2 * j + 1).scale(&int(j)),
        }
    }

    /// `j/√((2j+1)(2j-1)) Ê_- + 1 + (j+1)/√((2j+3)(2j+1)) Ê_+`
    pub fn mixed_col() -> Self {
        ShiftOperator {
            axis: Axis::Col,
            backward: |j| inv_sqrt(2 * j + 1, 2 * j - 1).scale(&int(j)),
            center: one,
            forward: |j| inv_sqrt(2 * j + 3, 2 * j + 1).scale(&int(j + 1)),
        }
    }

    /// `2i/√((2i+1)(2i-1)) E_- + 2(i+1)/√((2i+3)(2i+1)) E_+`
    pub fn mixed_row() -> Self {
        ShiftOperator {
            axis: Axis::Row,
            backward: |i| inv_sqrt(2 * i + 1, 2 * i - 1).scale(&int(2 * i)),
            center: zero,
            forward: |i| inv_sqrt(2 * i + 3, 2 * i + 1).scale(&int(2 * (i + 1))),
        }
    }

    /// `√((2i+1)/(2i-1)) E_- + √((2i+1)/(2i+3)) E_+`
    pub fn bessel_row() -> Self {
        ShiftOperator {
            axis: Axis::Row,
            backward: |i| sqrt_ratio(2 * i + 1, 2 * i - 1),
            center: zero,
            forward: |i| sqrt_ratio(2 * i + 1, 2 * i + 3),
        }
    }

    /// `½√((2j-1)/(2j+1)) Ê_- + 1 + ½√((2j+3)/(2j+1)) Ê_+`
    pub fn bessel_col() -> Self {
        ShiftOperator {
            axis: Axis::Col,
            backward: |j| sqrt_ratio(2 * j - 1, 2 * j + 1).scale(&rat(1, 2)),
            center: one,
            forward: |j| sqrt_ratio(2 * j + 3, 2 * j + 1).scale(&rat(1, 2)),
        }
    }
}

/// The four recurrence systems satisfied by `C_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Equation {
    /// Generalized eigenproblem in the row index.
    #[serde(rename = "row-eigen")]
    EigenRow,
    /// Generalized eigenproblem in the column index.
    #[serde(rename = "column-eigen")]
    EigenCol,
    /// Mixed row/column three-term relation.
    #[serde(rename = "mixed")]
    Mixed,
    /// Difference equation from the Bessel-function side.
    #[serde(rename = "bessel-difference")]
    BesselDifference,
}

impl Equation {
    pub const ALL: [Equation; 4] =
        [Equation::EigenRow, Equation::EigenCol, Equation::Mixed, Equation::BesselDifference];

    pub fn name(self) -> &'static str {
        match self {
            Equation::EigenRow => "row-eigen",
            Equation::EigenCol => "column-eigen",
            Equation::Mixed => "mixed",
            Equation::BesselDifference => "bessel-difference",
        }
    }

    /// Both sides at `(i, j)`.
    pub fn sides(self, entry: impl Fn(i64, i64) -> SurdValue + Copy, i: i64, j: i64) -> (SurdValue, SurdValue) {
        match self {
            Equation::EigenRow => {
                let lhs = ShiftOperator::eigen_row_lhs().apply(entry, i, j);
                let rhs = ShiftOperator::eigen_row_rhs().apply(entry, i, j).scale(&int(j * (j + 1)));
                (lhs, rhs)
            }
            Equation::EigenCol => {
                let lhs = ShiftOperator::eigen_col_lhs().apply(entry, i, j);
                let rhs = ShiftOperator::eigen_col_rhs().apply(entry, i, j).scale(&int(i * (i + 1)));
                (lhs, rhs)
            }
            Equation::Mixed => {
                (ShiftOperator::mixed_col().apply(entry, i, j), ShiftOperator::mixed_row().apply(entry, i, j))
            }
            Equation::BesselDifference => {
                (ShiftOperator::bessel_row().apply(entry, i, j), ShiftOperator::bessel_col().apply(entry, i, j))
            }
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub equation: Equation,
    pub i: usize,
    pub j: usize,
    pub lhs: String,
    pub rhs: String,
}

/// `C_1` of order `n` padded with two extra rows and columns taken from a
/// fresh build, so row-`n` taps reaching `n+1` read real entries. Entries
/// inside the original order come from the caller's matrix.
struct Window<'a> {
    inner: &'a CoeffMatrixPair,
    outer: CoeffMatrixPair,
}

impl<'a> Window<'a> {
    fn new(c: &'a CoeffMatrixPair) -> Self {
        let outer = build_coeff_matrices(c.order + 2, FormulaPath::TwoF1Half).expect("valid order");
        Window { inner: c, outer }
    }

    fn entry(&self, i: i64, j: i64) -> SurdValue {
        let n = self.inner.order as i64;
        if i <= n && j <= n {
            self.inner.entry(i, j)
        } else {
            self.outer.entry(i, j)
        }
    }
}

fn check_cells(c: &CoeffMatrixPair, eq: Equation, cells: Vec<(usize, usize)>) -> Vec<Violation> {
    let w = Window::new(c);
    let entry = |i: i64, j: i64| w.entry(i, j);
    cells
        .into_par_iter()
        .filter_map(|(i, j)| {
            let (lhs, rhs) = eq.sides(entry, i as i64, j as i64);
            (lhs != rhs).then(|| Violation { equation: eq, i, j, lhs: lhs.to_string(), rhs: rhs.to_string() })
        })
        .collect()
}

fn triangle(n: usize, strict: bool, min_j: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (min_j..=i).filter(move |&j| !strict || j < i).map(move |j| (i, j))).collect()
}

/// Row eigenproblem over `0 ≤ j ≤ i < n`.
pub fn check_gen_eig_i(c: &CoeffMatrixPair) -> Vec<Violation> {
    check_cells(c, Equation::EigenRow, triangle(c.order, false, 0))
}

/// Column eigenproblem over `0 < j ≤ i < n`.
pub fn check_gen_eig_j(c: &CoeffMatrixPair) -> Vec<Violation> {
    check_cells(c, Equation::EigenCol, triangle(c.order, false, 1))
}

/// Mixed relation over `0 ≤ j ≤ i < n`.
pub fn check_mixed_recurrence(c: &CoeffMatrixPair) -> Vec<Violation> {
    check_cells(c, Equation::Mixed, triangle(c.order, false, 0))
}

/// Outcome of the Bessel difference equation on the two candidate ranges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesselDifferenceReport {
    /// `0 < i < j < n`, where every tap but one reads a structural zero.
    pub nominal_range: Vec<Violation>,
    /// `0 < j < i < n`
    pub triangular_range: Vec<Violation>,
    /// Failing cells over the whole square `0 ≤ i, j < n`.
    pub probe: RangeProbe,
}

impl BesselDifferenceReport {
    pub fn passed(&self) -> bool {
        self.nominal_range.is_empty() && self.triangular_range.is_empty()
    }
}

pub fn check_bessel_difference(c: &CoeffMatrixPair) -> BesselDifferenceReport {
    let n = c.order;
    let nominal: Vec<_> = (1..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let tri: Vec<_> = (1..n).flat_map(|i| (1..i).map(move |j| (i, j))).collect();
    BesselDifferenceReport {
        nominal_range: check_cells(c, Equation::BesselDifference, nominal),
        triangular_range: check_cells(c, Equation::BesselDifference, tri),
        probe: probe_range(c, Equation::BesselDifference),
    }
}

/// Where an equation holds over the full square `0 ≤ i, j < n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeProbe {
    pub equation: Equation,
    pub order: usize,
    pub cells_checked: usize,
    pub failing_cells: Vec<(usize, usize)>,
}

impl RangeProbe {
    /// Every failing cell lies in the given column.
    pub fn fails_only_in_column(&self, col: usize) -> bool {
        self.failing_cells.iter().all(|&(_, j)| j == col)
    }

    /// Short description of the validated region.
    pub fn summary(&self) -> String {
        if self.failing_cells.is_empty() {
            return format!("holds for all 0 <= i, j < {}", self.order);
        }
        let cols: std::collections::BTreeSet<usize> = self.failing_cells.iter().map(|c| c.1).collect();
        let rows: std::collections::BTreeSet<usize> = self.failing_cells.iter().map(|c| c.0).collect();
        format!(
            "fails at {} cells (rows {:?}, columns {:?}); holds elsewhere in 0 <= i, j < {}",
            self.failing_cells.len(),
            rows,
            cols,
            self.order
        )
    }
}

pub fn probe_range(c: &CoeffMatrixPair, eq: Equation) -> RangeProbe {
    let n = c.order;
    let cells: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let count = cells.len();
    let mut failing: Vec<_> = check_cells(c, eq, cells).into_iter().map(|v| (v.i, v.j)).collect();
    failing.sort_unstable();
    RangeProbe { equation: eq, order: n, cells_checked: count, failing_cells: failing }
}

/// Rebuilds `C_1` column by column: seed the diagonal `2^{-j}` and the
/// subdiagonal, then march down with the row eigenproblem solved for the
/// `E_+` tap,
/// `C_{i+1,j} = [j(j+1) C_{ij} - (i+1)(i+j)(i-j-1)/√((2i+1)(2i-1)) C_{i-1,j}]
///              · √((2i+3)(2i+1)) / (i (i+j+2)(i-j+1))`.
/// Column 0 comes from the closed form since the march needs `j(j+1) ≠ 0`.
pub fn regenerate_via_recurrence(n: usize) -> Result<CoeffMatrixPair, RefinementError> {
    let columns: Vec<Vec<SurdValue>> = (0..=n)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                return (0..=n).map(c1_entry_first_column).collect();
            }
            let mut col = vec![SurdValue::zero(); n + 1];
            col[j] = SurdValue::from_rational(pow2(-(j as i64)));
            if j < n {
                col[j + 1] = closed_form_subdiagonal(j + 1);
            }
            let (jj, jj1) = (j as i64, j as i64 * (j as i64 + 1));
            for i in j + 1..n {
                let ii = i as i64;
                let back = inv_sqrt(2 * ii + 1, 2 * ii - 1).scale(&int((ii + 1) * (ii + jj) * (ii - jj - 1)));
                let num = col[i].scale(&int(jj1)) - back * &col[i - 1];
                let factor =
                    SurdValue::term(rat(1, ii * (ii + jj + 2) * (ii - jj + 1)), ((2 * ii + 3) * (2 * ii + 1)) as u64);
                col[i + 1] = num * factor;
            }
            col
        })
        .collect();
    Ok(CoeffMatrixPair::from_c1(Matrix::from_fn(n + 1, n + 1, |i, j| columns[j][i].clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn built(n: usize) -> CoeffMatrixPair {
        build_coeff_matrices(n, FormulaPath::Oracle).unwrap()
    }

    #[test]
    fn row_eigenproblem_small() {
        for n in 1..=6 {
            assert!(check_gen_eig_i(&built(n)).is_empty(), "n={n}");
        }
        let c = built(3);
        let w = Window::new(&c);
        let (lhs, rhs) = Equation::EigenRow.sides(|i, j| w.entry(i, j), 2, 0);
        assert!(rhs.is_zero());
        assert!(lhs.is_zero());
    }

    #[test]
    fn col_eigenproblem_and_boundary() {
        for n in 1..=6 {
            assert!(check_gen_eig_j(&built(n)).is_empty(), "n={n}");
        }
        let p = probe_range(&built(6), Equation::EigenCol);
        assert!(p.failing_cells.contains(&(1, 0)));
        assert!(p.fails_only_in_column(0));
        // j = 0 fails exactly for odd rows
        assert!(p.failing_cells.iter().all(|&(i, _)| i % 2 == 1));
    }

    #[test]
    fn mixed_relation_small() {
        for n in 1..=6 {
            assert!(check_mixed_recurrence(&built(n)).is_empty(), "n={n}");
        }
    }

    #[test]
    fn bessel_difference_ranges() {
        let r = check_bessel_difference(&built(7));
        assert!(r.passed());
        assert!(!r.probe.failing_cells.is_empty());
        assert!(r.probe.fails_only_in_column(0));
    }

    #[test]
    fn corrupted_matrix_is_caught() {
        let mut c = built(4);
        c.c1[(3, 1)] = c.c1[(3, 1)].clone() + SurdValue::one();
        let c = CoeffMatrixPair::from_c1(c.c1);
        let v = check_gen_eig_i(&c);
        assert!(!v.is_empty());
        let json = serde_json::to_value(&v[0]).unwrap();
        assert_eq!(json["equation"], "row-eigen");
        assert!(json["lhs"].is_string());
    }

    #[test]
    fn regeneration_matches_build() {
        for n in [0, 1, 3, 7] {
            assert_eq!(regenerate_via_recurrence(n).unwrap(), built(n), "n={n}");
        }
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<SurdValue>> {
        prop::collection::vec((-5i64..=5, 0usize..3), 16).prop_map(|v| {
            Matrix::from_fn(4, 4, |i, j| {
                let (p, r) = v[i * 4 + j];
                SurdValue::term(int(p), [1, 2, 3][r])
            })
        })
    }

    fn lookup(m: &Matrix<SurdValue>) -> impl Fn(i64, i64) -> SurdValue + '_ {
        move |r, c| m.get(r, c).cloned().unwrap_or_default()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn operators_are_linear(a in small_matrix(), b in small_matrix(), i in 1i64..3, j in 1i64..3) {
            let sum = &a + &b;
            for op in [ShiftOperator::eigen_row_lhs(), ShiftOperator::eigen_col_lhs(), ShiftOperator::mixed_row(), ShiftOperator::bessel_col()] {
                let lhs = op.apply(lookup(&sum), i, j);
                let rhs = op.apply(lookup(&a), i, j) + op.apply(lookup(&b), i, j);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
