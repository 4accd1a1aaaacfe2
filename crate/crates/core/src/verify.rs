//! Cumulative verification over orders `0..=n`, assembled into one
//! deterministic report.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::fourier::{default_grid, fourier_report, FourierReport};
use crate::recurrences::{
    check_bessel_difference, check_gen_eig_i, check_gen_eig_j, check_mixed_recurrence, probe_range,
    regenerate_via_recurrence, Equation, Violation,
};
use crate::refinement::{
    build_coeff_matrices, c1_entry, check_orthogonality, resolve_sub_subdiagonal, verify_refinement_pointwise_with,
    CoeffMatrixPair, FormulaPath, OrthogonalityReport, SubSubdiagonalReport,
};
use crate::waveletsolve::{
    build_wavelet_matrices, check_even_rows, has_vanishing_moments, parity_basis_orthonormal, rows_have_unit_norm,
    verify_wavelet_orthogonality, wavelet_row_nm1_closed_form, wavelet_row_nm2_closed_form,
    wavelet_row_nm3_closed_form, WaveletMatrixPair,
};

/// Orders at or below which the exact vanishing-moment check runs.
const MOMENT_ORDER_LIMIT: usize = 8;
/// Smallest order used to populate the discrepancy entries.
const DISCREPANCY_MIN_ORDER: usize = 6;
/// Violations kept verbatim per equation; the rest are only counted.
const VIOLATION_SAMPLE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyScope {
    Orthogonality,
    Recurrences,
    Fourier,
    Wavelets,
    Oracle,
}

impl VerifyScope {
    pub const ALL: [VerifyScope; 5] = [
        VerifyScope::Orthogonality,
        VerifyScope::Recurrences,
        VerifyScope::Fourier,
        VerifyScope::Wavelets,
        VerifyScope::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerifyScope::Orthogonality => "orthogonality",
            VerifyScope::Recurrences => "recurrences",
            VerifyScope::Fourier => "fourier",
            VerifyScope::Wavelets => "wavelets",
            VerifyScope::Oracle => "oracle",
        }
    }
}

impl fmt::Display for VerifyScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerifyScope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        VerifyScope::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| format!("unknown verify scope `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalitySection {
    pub matrix: OrthogonalityReport,
    pub structure: bool,
    pub pointwise_failures: usize,
}

impl OrthogonalitySection {
    fn passed(&self) -> bool {
        self.matrix.passed() && self.structure && self.pointwise_failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationOutcome {
    pub equation: Equation,
    pub violations: usize,
    pub sample: Vec<Violation>,
}

fn outcome(equation: Equation, mut v: Vec<Violation>) -> EquationOutcome {
    let violations = v.len();
    v.truncate(VIOLATION_SAMPLE);
    EquationOutcome { equation, violations, sample: v }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceSection {
    pub equations: Vec<EquationOutcome>,
    pub regenerated_matches: bool,
}

impl RecurrenceSection {
    fn passed(&self) -> bool {
        self.regenerated_matches && self.equations.iter().all(|e| e.violations == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveletSection {
    pub orthogonality: bool,
    pub upper_triangular_positive: bool,
    pub parity_basis: bool,
    pub unit_rows: bool,
    /// `None` where the closed form does not apply at this order.
    pub row_nm1: Option<bool>,
    pub row_nm2: Option<bool>,
    pub row_nm3: Option<bool>,
    pub even_rows: Option<bool>,
    pub vanishing_moments: Option<bool>,
    pub inexact_rows: Vec<usize>,
}

impl WaveletSection {
    fn passed(&self) -> bool {
        let opt = |x: Option<bool>| x.unwrap_or(true);
        self.orthogonality
            && self.upper_triangular_positive
            && self.parity_basis
            && self.unit_rows
            && opt(self.row_nm1)
            && opt(self.row_nm2)
            && opt(self.row_nm3)
            && opt(self.even_rows)
            && opt(self.vanishing_moments)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSection {
    /// Entries of the newest row where some path disagrees with the integral.
    pub mismatches: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonality: Option<OrthogonalitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrences: Option<RecurrenceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelets: Option<WaveletSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierReport>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceRangeEntry {
    pub order: usize,
    pub nominal_range_holds: bool,
    pub triangular_range_holds: bool,
    pub failing_cells: Vec<(usize, usize)>,
    pub validated_range: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColEigenBoundaryEntry {
    pub order: usize,
    pub diagonal_included: bool,
    pub failing_cells: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancies {
    pub sub_subdiagonal_radicand: SubSubdiagonalReport,
    pub difference_equation_range: DifferenceRangeEntry,
    pub column_eigen_boundary: ColEigenBoundaryEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub order: usize,
    pub scopes: Vec<VerifyScope>,
    pub orders: Vec<OrderReport>,
    pub discrepancies: Discrepancies,
    pub passed: bool,
}

fn orthogonality_section(c: &CoeffMatrixPair) -> OrthogonalitySection {
    OrthogonalitySection {
        matrix: check_orthogonality(c),
        structure: c.is_structurally_valid(),
        pointwise_failures: verify_refinement_pointwise_with(c, 9).failures.len(),
    }
}

fn recurrence_section(c: &CoeffMatrixPair) -> RecurrenceSection {
    let bessel = check_bessel_difference(c);
    let mut bessel_violations = bessel.nominal_range;
    bessel_violations.extend(bessel.triangular_range);
    RecurrenceSection {
        equations: vec![
            outcome(Equation::EigenRow, check_gen_eig_i(c)),
            outcome(Equation::EigenCol, check_gen_eig_j(c)),
            outcome(Equation::Mixed, check_mixed_recurrence(c)),
            outcome(Equation::BesselDifference, bessel_violations),
        ],
        regenerated_matches: regenerate_via_recurrence(c.order).map(|r| &r == c).unwrap_or(false),
    }
}

fn row_matches(d: &WaveletMatrixPair, row: usize, expected: Vec<crate::SurdValue>) -> bool {
    let n = d.order;
    let tail = &d.d1.row(row)[n + 1 - expected.len()..];
    if d.inexact_rows.contains(&row) {
        tail.iter().zip(&expected).all(|(a, b)| (a - b).to_f64().abs() < 1e-30)
    } else {
        tail == expected.as_slice()
    }
}

fn wavelet_section(c: &CoeffMatrixPair, d: &WaveletMatrixPair, previous: Option<&WaveletMatrixPair>) -> WaveletSection {
    let n = c.order;
    WaveletSection {
        orthogonality: verify_wavelet_orthogonality(c, d).unwrap_or(false),
        upper_triangular_positive: n == 0
            || (d.d1.is_upper_triangular() && (0..=n).all(|i| d.d1[(i, i)].is_positive())),
        parity_basis: n == 0 || parity_basis_orthonormal(c, d),
        unit_rows: rows_have_unit_norm(d),
        row_nm1: (n >= 1).then(|| row_matches(d, n - 1, wavelet_row_nm1_closed_form(n))),
        row_nm2: (n >= 2).then(|| row_matches(d, n - 2, wavelet_row_nm2_closed_form(n))),
        row_nm3: (n >= 3).then(|| row_matches(d, n - 3, wavelet_row_nm3_closed_form(n))),
        even_rows: previous.filter(|_| n >= 2).map(|p| check_even_rows(d, p).passed()),
        vanishing_moments: (n <= MOMENT_ORDER_LIMIT).then(|| has_vanishing_moments(d)),
        inexact_rows: d.inexact_rows.clone(),
    }
}

fn oracle_section(c: &CoeffMatrixPair) -> OracleSection {
    let i = c.order;
    let mismatches = (0..=i)
        .into_par_iter()
        .flat_map_iter(|j| {
            [FormulaPath::TwoF1Half, FormulaPath::TwoF1Two, FormulaPath::FourF3]
                .into_iter()
                .filter(move |&p| c1_entry(p, i, j).ok().as_ref() != Some(&c.c1[(i, j)]))
                .map(move |p| (j, p.name().to_string()))
        })
        .collect();
    OracleSection { mismatches }
}

/// Discrepancy entries, evaluated at order `max(n, 6)` so they are always
/// populated.
pub fn discrepancies(n: usize) -> Discrepancies {
    let order = n.max(DISCREPANCY_MIN_ORDER);
    let c = build_coeff_matrices(order, FormulaPath::Oracle).expect("valid order");
    let bessel = check_bessel_difference(&c);
    let column_eigen = probe_range(&c, Equation::EigenCol);
    let diagonal_included = !column_eigen.failing_cells.iter().any(|&(i, j)| i == j && j > 0);
    Discrepancies {
        sub_subdiagonal_radicand: resolve_sub_subdiagonal(&c),
        difference_equation_range: DifferenceRangeEntry {
            order,
            nominal_range_holds: bessel.nominal_range.is_empty(),
            triangular_range_holds: bessel.triangular_range.is_empty(),
            validated_range: if bessel.probe.fails_only_in_column(0) {
                format!("0 <= i < {order}, 1 <= j < {order} (fails only in column j = 0)")
            } else {
                bessel.probe.summary()
            },
            failing_cells: bessel.probe.failing_cells,
        },
        column_eigen_boundary: ColEigenBoundaryEntry {
            order,
            diagonal_included,
            failing_cells: column_eigen.failing_cells,
        },
    }
}

/// Runs the selected suites for every order `0..=n`.
pub fn run_verification(n: usize, scopes: &[VerifyScope]) -> VerifyReport {
    let mut scopes = scopes.to_vec();
    scopes.sort();
    scopes.dedup();
    let has = |s: VerifyScope| scopes.contains(&s);
    let grid = default_grid();
    let mut orders = Vec::with_capacity(n + 1);
    let mut previous_wavelets: Option<WaveletMatrixPair> = None;
    for k in 0..=n {
        let c = build_coeff_matrices(k, FormulaPath::Oracle).expect("valid order");
        let wavelets = if has(VerifyScope::Wavelets) {
            let d = build_wavelet_matrices(&c).expect("wavelet solve");
            let section = wavelet_section(&c, &d, previous_wavelets.as_ref());
            previous_wavelets = Some(d);
            Some(section)
        } else {
            None
        };
        let orthogonality = has(VerifyScope::Orthogonality).then(|| orthogonality_section(&c));
        let recurrences = has(VerifyScope::Recurrences).then(|| recurrence_section(&c));
        let oracle = has(VerifyScope::Oracle).then(|| oracle_section(&c));
        let fourier = has(VerifyScope::Fourier).then(|| fourier_report(&c, &grid).expect("positive grid"));
        let passed = orthogonality.as_ref().is_none_or(OrthogonalitySection::passed)
            && recurrences.as_ref().is_none_or(RecurrenceSection::passed)
            && wavelets.as_ref().is_none_or(WaveletSection::passed)
            && oracle.as_ref().is_none_or(|o| o.mismatches.is_empty())
            && fourier.as_ref().is_none_or(FourierReport::passed);
        orders.push(OrderReport { order: k, orthogonality, recurrences, wavelets, oracle, fourier, passed });
    }
    let discrepancies = discrepancies(n);
    let passed = orders.iter().all(|o| o.passed)
        && discrepancies.sub_subdiagonal_radicand.resolved_radicand.is_some()
        && discrepancies.difference_equation_range.nominal_range_holds
        && discrepancies.difference_equation_range.triangular_range_holds;
    VerifyReport { order: n, scopes, orders, discrepancies, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_report_small_order() {
        let r = run_verification(3, &VerifyScope::ALL);
        assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        assert_eq!(r.orders.len(), 4);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["discrepancies"]["sub_subdiagonal_radicand"]["resolved_radicand"], "(2i+1)(2i-3)");
        assert!(json["discrepancies"]["difference_equation_range"]["validated_range"]
            .as_str()
            .unwrap()
            .contains("column j = 0"));
        assert_eq!(json["scopes"][0], "orthogonality");
    }

    #[test]
    fn scope_selection_and_parsing() {
        let r = run_verification(2, &[VerifyScope::Oracle, VerifyScope::Oracle]);
        assert_eq!(r.scopes, vec![VerifyScope::Oracle]);
        assert!(r.orders.iter().all(|o| o.fourier.is_none() && o.oracle.is_some()));
        assert_eq!("wavelets".parse::<VerifyScope>().unwrap(), VerifyScope::Wavelets);
        assert!("everything".parse::<VerifyScope>().is_err());
    }

    #[test]
    fn discrepancies_are_always_populated() {
        let d = discrepancies(0);
        assert_eq!(d.sub_subdiagonal_radicand.checked_rows.len(), 5);
        assert!(d.column_eigen_boundary.diagonal_included);
        assert!(!d.difference_equation_range.failing_cells.is_empty());
    }
}
