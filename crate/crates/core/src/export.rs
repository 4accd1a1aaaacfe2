//! Long-form CSV export of exact matrices.

use std::fmt::Write as _;

use crate::exact::SurdValue;
use crate::matrix::Matrix;
use crate::refinement::CoeffMatrixPair;
use crate::waveletsolve::WaveletMatrixPair;

pub const MIN_DIGITS: usize = 1;
pub const MAX_DIGITS: usize = 50;

/// One `matrix,row,col,value` line per entry, values rounded half-even to
/// `digits` places after the point.
pub fn matrices_to_csv(named: &[(&str, &Matrix<SurdValue>)], digits: usize) -> String {
    let mut out = String::from("matrix,row,col,value\n");
    for (name, m) in named {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                writeln!(out, "{name},{i},{j},{}", m[(i, j)].to_decimal_string(digits)).expect("string write");
            }
        }
    }
    out
}

pub fn coeff_matrices_csv(c: &CoeffMatrixPair, digits: usize) -> String {
    matrices_to_csv(&[("C1", &c.c1), ("Cm1", &c.cm1)], digits)
}

pub fn wavelet_matrices_csv(d: &WaveletMatrixPair, digits: usize) -> String {
    matrices_to_csv(&[("D1", &d.d1), ("Dm1", &d.dm1)], digits)
}

/// `label,index,value` lines for a vector of exact values.
pub fn vector_to_csv(label: &str, values: &[SurdValue], digits: usize) -> String {
    let mut out = String::new();
    for (k, v) in values.iter().enumerate() {
        writeln!(out, "{label},{k},{}", v.to_decimal_string(digits)).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::{build_coeff_matrices, FormulaPath};

    #[test]
    fn order_one_csv() {
        let c = build_coeff_matrices(1, FormulaPath::Oracle).unwrap();
        let csv = coeff_matrices_csv(&c, 5);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "matrix,row,col,value");
        assert_eq!(lines[1], "C1,0,0,1.00000");
        assert_eq!(lines[3], "C1,1,0,0.86603");
        assert_eq!(lines[7], "Cm1,1,0,-0.86603");
    }
}
