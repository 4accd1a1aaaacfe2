//! Fourier-side identities of the scaling vector.
//!
//! With `P̃(a) = ∫_{-1}^{1} e^{-iat} P(t) dt`, component `k` equals
//! `√(2k+1) (-i)^k √(π/a) J_{k+1/2}(a)`, and the refinement relation
//! becomes `P̃(a) = T(a) P̃(a/2)` with the two-scale symbol
//! `T(a) = (C_{-1} e^{ia/2} + C_1 e^{-ia/2}) / 2`.

mod bessel;

pub use bessel::{bessel_half_range, bessel_half_vector, BesselHalfVector};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::Matrix;
use crate::refinement::{build_coeff_matrices, CoeffMatrixPair, FormulaPath};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FourierError {
    #[error("argument must be positive and finite, got {0}")]
    NonPositiveArgument(f64),
}

type CMatrix = Matrix<Complex64>;

/// `C_1` and `C_{-1}` rounded once to doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatCoeffs {
    pub order: usize,
    pub c1: Matrix<f64>,
    pub cm1: Matrix<f64>,
}

impl FloatCoeffs {
    pub fn from_exact(c: &CoeffMatrixPair) -> Self {
        FloatCoeffs { order: c.order, c1: c.c1.map(|x| x.to_f64()), cm1: c.cm1.map(|x| x.to_f64()) }
    }

    pub fn build(n: usize) -> Self {
        Self::from_exact(&build_coeff_matrices(n, FormulaPath::default()).expect("valid order"))
    }

    /// Copy with `(C_1)_{ij}` shifted by `delta` and the matching
    /// `C_{-1}` entry shifted by `(-1)^{i+j} delta`.
    pub fn perturbed(&self, i: usize, j: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.c1[(i, j)] += delta;
        out.cm1[(i, j)] += if (i + j).is_multiple_of(2) { delta } else { -delta };
        out
    }
}

/// The symbol `T(a)` at one argument.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoScaleSymbol {
    pub order: usize,
    pub argument: f64,
    pub matrix: CMatrix,
}

pub fn two_scale_symbol(c: &FloatCoeffs, a: f64) -> TwoScaleSymbol {
    let (e_plus, e_minus) = (Complex64::cis(a / 2.0) * 0.5, Complex64::cis(-a / 2.0) * 0.5);
    let matrix = Matrix::from_fn(c.order + 1, c.order + 1, |i, j| c.cm1[(i, j)] * e_plus + c.c1[(i, j)] * e_minus);
    TwoScaleSymbol { order: c.order, argument: a, matrix }
}

/// `dT/da = (i C_{-1} e^{ia/2} - i C_1 e^{-ia/2}) / 4`
fn two_scale_derivative(c: &FloatCoeffs, a: f64) -> CMatrix {
    let i = Complex64::i();
    let (e_plus, e_minus) = (Complex64::cis(a / 2.0) * i * 0.25, Complex64::cis(-a / 2.0) * i * 0.25);
    Matrix::from_fn(c.order + 1, c.order + 1, |r, s| c.cm1[(r, s)] * e_plus - c.c1[(r, s)] * e_minus)
}

/// `(-i)^k`
fn minus_i_pow(k: usize) -> Complex64 {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0)][k % 4]
}

/// `diag((-i)^k √(2k+1))`
fn gamma_diag(n: usize) -> Vec<Complex64> {
    (0..=n).map(|k| minus_i_pow(k) * ((2 * k + 1) as f64).sqrt()).collect()
}

/// `P̃(a)`: component `k` is `√(2k+1) (-i)^k √(π/a) J_{k+1/2}(a)`.
pub fn scaling_fourier_vector(n: usize, a: f64) -> Result<Vec<Complex64>, FourierError> {
    let j = bessel_half_vector(n, a)?.values;
    let s = (PI / a).sqrt();
    Ok(gamma_diag(n).into_iter().zip(j).map(|(g, v)| g * v * s).collect())
}

fn max_abs(v: impl IntoIterator<Item = Complex64>) -> f64 {
    v.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// 100 logarithmically spaced points in `(1e-3, 20]`.
pub fn default_grid() -> Vec<f64> {
    let (lo, hi) = (1e-3f64, 20.0f64);
    let ratio = hi / lo;
    (1..=100).map(|k| if k == 100 { hi } else { lo * ratio.powf(k as f64 / 100.0) }).collect()
}

fn max_over(samples: &[f64], f: impl Fn(f64) -> Result<f64, FourierError> + Sync) -> Result<f64, FourierError> {
    samples.par_iter().map(|&a| f(a)).collect::<Result<Vec<f64>, _>>().map(|v| v.into_iter().fold(0.0, f64::max))
}

/// `max_a ‖P̃(a) - T(a) P̃(a/2)‖_∞`
pub fn two_scale_residual(c: &FloatCoeffs, samples: &[f64]) -> Result<f64, FourierError> {
    max_over(samples, |a| {
        let lhs = scaling_fourier_vector(c.order, a)?;
        let rhs = two_scale_symbol(c, a).matrix.apply(&scaling_fourier_vector(c.order, a / 2.0)?);
        Ok(max_abs(sub(&lhs, &rhs)))
    })
}

pub fn verify_two_scale(n: usize, samples: &[f64]) -> Result<f64, FourierError> {
    two_scale_residual(&FloatCoeffs::build(n), samples)
}

/// Residuals of the addition formula: the complex row identity
/// `√(2j+1)(-i)^j J_{j+1/2}(a)/√a = ½ Σ_k C_{jk}((-1)^{j+k} e^{ia/2} + e^{-ia/2})(-i)^k √(2k+1) J_{k+1/2}(a/2)/√(a/2)`
/// and its real forms for even and odd rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdditionResiduals {
    pub complex_rows: f64,
    pub even_rows: f64,
    pub odd_rows: f64,
}

impl AdditionResiduals {
    pub fn max(&self) -> f64 {
        self.complex_rows.max(self.even_rows).max(self.odd_rows)
    }
}

fn addition_at(c: &FloatCoeffs, a: f64) -> Result<AdditionResiduals, FourierError> {
    let n = c.order;
    let full = bessel_half_vector(n, a)?.values;
    let half = bessel_half_vector(n, a / 2.0)?.values;
    let lhs_real = |j: usize| ((2 * j + 1) as f64).sqrt() * full[j] / a.sqrt();
    let rhs_term = |k: usize| ((2 * k + 1) as f64).sqrt() * half[k] / (a / 2.0).sqrt();
    let (cos, sin) = ((a / 2.0).cos(), (a / 2.0).sin());
    let sign = |e: usize| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut res = AdditionResiduals { complex_rows: 0.0, even_rows: 0.0, odd_rows: 0.0 };
    for j in 0..=n {
        let lhs = minus_i_pow(j) * lhs_real(j);
        let rhs: Complex64 = (0..=j)
            .map(|k| {
                let phase = Complex64::cis(a / 2.0) * sign(j + k) + Complex64::cis(-a / 2.0);
                phase * minus_i_pow(k) * (0.5 * c.c1[(j, k)] * rhs_term(k))
            })
            .sum();
        res.complex_rows = res.complex_rows.max((lhs - rhs).norm());
        if j % 2 == 0 {
            let real: f64 = (0..=j)
                .map(|k| {
                    if k % 2 == 0 {
                        c.c1[(j, k)] * sign(k / 2) * cos * rhs_term(k)
                    } else {
                        -c.c1[(j, k)] * sign((k - 1) / 2) * sin * rhs_term(k)
                    }
                })
                .sum();
            res.even_rows = res.even_rows.max((sign(j / 2) * lhs_real(j) - real).abs());
        } else {
            let real: f64 = (0..=j)
                .map(|k| {
                    if k % 2 == 0 {
                        c.c1[(j, k)] * sign(k / 2) * sin * rhs_term(k)
                    } else {
                        c.c1[(j, k)] * sign((k - 1) / 2) * cos * rhs_term(k)
                    }
                })
                .sum();
            res.odd_rows = res.odd_rows.max((sign((j - 1) / 2) * lhs_real(j) - real).abs());
        }
    }
    Ok(res)
}

pub fn addition_residuals(c: &FloatCoeffs, samples: &[f64]) -> Result<AdditionResiduals, FourierError> {
    let all = samples.par_iter().map(|&a| addition_at(c, a)).collect::<Result<Vec<_>, _>>()?;
    Ok(all.into_iter().fold(AdditionResiduals { complex_rows: 0.0, even_rows: 0.0, odd_rows: 0.0 }, |acc, r| {
        AdditionResiduals {
            complex_rows: acc.complex_rows.max(r.complex_rows),
            even_rows: acc.even_rows.max(r.even_rows),
            odd_rows: acc.odd_rows.max(r.odd_rows),
        }
    }))
}

pub fn verify_addition_formula(n: usize, samples: &[f64]) -> Result<f64, FourierError> {
    Ok(addition_residuals(&FloatCoeffs::build(n), samples)?.max())
}

/// Residual of
/// `2T'(a) Q(a/2) = (H T(a) - ½ T(a) H) Q(a/2) + Γe(a)/√2 - ½ T(a) Γe(a/2)`,
/// where `Q(x) = Γ J(x)` with `Γ = diag((-i)^k √(2k+1))`, `J(x)` the vector of
/// `J_{k+1/2}(x)`, `H = Γ L Γ^{-1}` for the tridiagonal `L` with `+1` below
/// and `-1` above the diagonal, and `e(x) = (J_{-1/2}(x), 0, …, 0, -J_{n+3/2}(x))`.
/// The two sides come from differentiating `Q(a) = √2 T(a) Q(a/2)` and
/// using `2J'_ν = J_{ν-1} - J_{ν+1}`.
fn derivative_at(c: &FloatCoeffs, a: f64) -> Result<f64, FourierError> {
    let n = c.order;
    let g = gamma_diag(n);
    let q = |x: f64| -> Result<(Vec<Complex64>, Vec<Complex64>), FourierError> {
        let r = bessel_half_range(n + 1, x)?;
        let qv: Vec<Complex64> = (0..=n).map(|k| g[k] * r[k + 1]).collect();
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] += g[0] * r[0];
        e[n] -= g[n] * r[n + 2];
        Ok((qv, e))
    };
    let (q_half, e_half) = q(a / 2.0)?;
    let (_, e_full) = q(a)?;
    let t = two_scale_symbol(c, a).matrix;
    let dt = two_scale_derivative(c, a);
    let h = Matrix::from_fn(n + 1, n + 1, |r, s| {
        let l = if s + 1 == r {
            1.0
        } else if r + 1 == s {
            -1.0
        } else {
            return Complex64::new(0.0, 0.0);
        };
        g[r] * l / g[s]
    });
    let lhs: Vec<Complex64> = dt.apply(&q_half).into_iter().map(|z| z * 2.0).collect();
    let t_q = t.apply(&q_half);
    let h_t_q = h.apply(&t_q);
    let t_h_q = t.apply(&h.apply(&q_half));
    let t_e = t.apply(&e_half);
    let rhs: Vec<Complex64> =
        (0..=n).map(|k| h_t_q[k] - t_h_q[k] * 0.5 + e_full[k] * FRAC_1_SQRT_2 - t_e[k] * 0.5).collect();
    Ok(max_abs(sub(&lhs, &rhs)))
}

pub fn derivative_residual(c: &FloatCoeffs, samples: &[f64]) -> Result<f64, FourierError> {
    max_over(samples, |a| derivative_at(c, a))
}

pub fn verify_derivative_relation(n: usize, samples: &[f64]) -> Result<f64, FourierError> {
    derivative_residual(&FloatCoeffs::build(n), samples)
}

/// Derivative-relation residual after shifting one `C_1` entry by each
/// `delta`; the residual grows linearly in `delta`.
pub fn derivative_sensitivity(
    c: &FloatCoeffs,
    entry: (usize, usize),
    deltas: &[f64],
    samples: &[f64],
) -> Result<Vec<(f64, f64)>, FourierError> {
    deltas.iter().map(|&d| Ok((d, derivative_residual(&c.perturbed(entry.0, entry.1, d), samples)?))).collect()
}

/// `max_a ‖T(a)T(a)* + T(a+π)T(a+π)* - I‖_max`
pub fn qmf_residual(c: &FloatCoeffs, samples: &[f64]) -> f64 {
    let n = c.order;
    samples
        .par_iter()
        .map(|&a| {
            let gram = |x: f64| {
                let t = two_scale_symbol(c, x).matrix;
                let tc = t.transpose().map(|z| z.conj());
                &t * &tc
            };
            let total = &gram(a) + &gram(a + PI);
            let diff = &total - &Matrix::identity(n + 1);
            max_abs((0..=n).flat_map(|i| diff.row(i).to_vec()))
        })
        .reduce(|| 0.0, f64::max)
}

/// Max residuals of each identity, as reported by `verify`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierReport {
    pub order: usize,
    pub samples: usize,
    pub two_scale: f64,
    pub addition: AdditionResiduals,
    pub derivative: f64,
    pub qmf: f64,
}

impl FourierReport {
    pub const TWO_SCALE_TOL: f64 = 1e-10;
    pub const ADDITION_TOL: f64 = 1e-10;
    pub const DERIVATIVE_TOL: f64 = 1e-9;
    pub const QMF_TOL: f64 = 1e-10;

    pub fn passed(&self) -> bool {
        self.two_scale < Self::TWO_SCALE_TOL
            && self.addition.max() < Self::ADDITION_TOL
            && self.derivative < Self::DERIVATIVE_TOL
            && self.qmf < Self::QMF_TOL
    }
}

pub fn fourier_report(c: &CoeffMatrixPair, samples: &[f64]) -> Result<FourierReport, FourierError> {
    let f = FloatCoeffs::from_exact(c);
    Ok(FourierReport {
        order: c.order,
        samples: samples.len(),
        two_scale: two_scale_residual(&f, samples)?,
        addition: addition_residuals(&f, samples)?,
        derivative: derivative_residual(&f, samples)?,
        qmf: qmf_residual(&f, samples),
    })
}
