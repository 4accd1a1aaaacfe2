//! Floating-point multiwavelet filter bank on `[0, 1)`.
//!
//! Level `p` tiles the interval with `2^p` blocks, each holding `n+1`
//! coefficients. One analysis step maps the block pair `(2k, 2k+1)` at
//! level `p+1` to block `k` at level `p`:
//!
//! ```text
//! s^p_k = (C_{-1} s^{p+1}_{2k} + C_1 s^{p+1}_{2k+1}) / √2
//! d^p_k = (D_{-1} s^{p+1}_{2k} + D_1 s^{p+1}_{2k+1}) / √2
//! ```
//!
//! and synthesis applies the transpose.

use std::fmt::Debug;

use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, pow2, SurdValue};
use crate::legendre::{monic_legendre_table, orthonormal_factor, PolyExact};
use crate::matrix::Matrix;
use crate::refinement::CoeffMatrixPair;
use crate::waveletsolve::WaveletMatrixPair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("finest level {0} has no coefficient blocks")]
    MissingFinestLevel(usize),
    #[error("level {level}: expected {expected} blocks, found {found}")]
    BlockCount { level: usize, expected: usize, found: usize },
    #[error("level {level}: block {block} has length {found}, expected {expected}")]
    BlockLength { level: usize, block: usize, expected: usize, found: usize },
    #[error("filter bank order {bank} does not match signal order {signal}")]
    OrderMismatch { bank: usize, signal: usize },
    #[error("expected {expected} input values (2^m blocks of n+1), found {found}")]
    InputLength { expected: usize, found: usize },
}

/// Scalar usable by the filter bank.
pub trait Real: Float + Debug + Send + Sync {}
impl<T: Float + Debug + Send + Sync> Real for T {}

fn cast<T: Real>(x: f64) -> T {
    T::from(x).expect("representable")
}

/// The four filter matrices rounded to `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank<T> {
    pub order: usize,
    pub cm1: Matrix<T>,
    pub c1: Matrix<T>,
    pub dm1: Matrix<T>,
    pub d1: Matrix<T>,
}

impl<T: Real> FilterBank<T> {
    pub fn from_exact(c: &CoeffMatrixPair, d: &WaveletMatrixPair) -> Result<Self, TransformError> {
        if c.order != d.order {
            return Err(TransformError::OrderMismatch { bank: c.order, signal: d.order });
        }
        let conv = |m: &Matrix<SurdValue>| m.map(|x| cast::<T>(x.to_f64()));
        Ok(FilterBank { order: c.order, cm1: conv(&c.cm1), c1: conv(&c.c1), dm1: conv(&d.dm1), d1: conv(&d.d1) })
    }

    /// Builds `C` and `D` exactly for order `n` and rounds them.
    pub fn build(n: usize) -> Self {
        let c = crate::refinement::build_coeff_matrices(n, Default::default()).expect("valid order");
        let d = crate::waveletsolve::build_wavelet_matrices(&c).expect("wavelet solve");
        Self::from_exact(&c, &d).expect("matching orders")
    }

    /// `max |M Mᵀ - I|` for `M = (1/√2)[[C_{-1}, C_1], [D_{-1}, D_1]]`.
    pub fn one_level_orthogonality_error(&self) -> T {
        let m = Matrix::block2x2(&self.cm1, &self.c1, &self.dm1, &self.d1);
        let g = &m * &m.transpose();
        let size = 2 * (self.order + 1);
        let half = cast::<T>(0.5);
        (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .map(|(i, j)| {
                let target = if i == j { T::one() } else { T::zero() };
                (g[(i, j)] * half - target).abs()
            })
            .fold(T::zero(), T::max)
    }
}

type Blocks<T> = Vec<Vec<T>>;

/// Coefficients of a signal across levels. `s_blocks[p]` holds the `2^p`
/// scaling blocks at level `p` (empty until computed), `d_blocks[p]` the
/// `2^p` detail blocks for `p < finest_level`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalTree<T> {
    pub order: usize,
    pub finest_level: usize,
    pub s_blocks: Vec<Blocks<T>>,
    pub d_blocks: Vec<Blocks<T>>,
}

fn check_level<T>(blocks: &Blocks<T>, level: usize, width: usize) -> Result<(), TransformError> {
    let expected = 1usize << level;
    if blocks.len() != expected {
        return Err(TransformError::BlockCount { level, expected, found: blocks.len() });
    }
    if let Some((block, b)) = blocks.iter().enumerate().find(|(_, b)| b.len() != width) {
        return Err(TransformError::BlockLength { level, block, expected: width, found: b.len() });
    }
    Ok(())
}

impl<T: Real> SignalTree<T> {
    /// A tree holding only the finest level.
    pub fn from_finest(order: usize, finest_level: usize, finest: Blocks<T>) -> Result<Self, TransformError> {
        check_level(&finest, finest_level, order + 1)?;
        let mut s_blocks = vec![Vec::new(); finest_level + 1];
        s_blocks[finest_level] = finest;
        Ok(SignalTree { order, finest_level, s_blocks, d_blocks: vec![Vec::new(); finest_level] })
    }

    /// Splits a flat block-major list into `2^m` blocks of `n+1`.
    pub fn from_flat(order: usize, finest_level: usize, values: &[T]) -> Result<Self, TransformError> {
        let expected = (order + 1) << finest_level;
        if values.len() != expected {
            return Err(TransformError::InputLength { expected, found: values.len() });
        }
        Self::from_finest(order, finest_level, values.chunks(order + 1).map(<[T]>::to_vec).collect())
    }

    pub fn finest(&self) -> &Blocks<T> {
        &self.s_blocks[self.finest_level]
    }

    /// Sum of squares of the finest scaling coefficients.
    pub fn finest_energy(&self) -> T {
        sum_squares(self.finest())
    }

    /// Sum of squares of the level-0 scaling block and every detail block.
    pub fn decomposed_energy(&self) -> T {
        self.d_blocks.iter().fold(sum_squares(&self.s_blocks[0]), |acc, level| acc + sum_squares(level))
    }

    pub fn detail_count(&self) -> usize {
        self.d_blocks.iter().map(|l| l.iter().map(Vec::len).sum::<usize>()).sum()
    }

    /// Largest absolute detail coefficient over all levels.
    pub fn max_detail(&self) -> T {
        self.d_blocks.iter().flatten().flatten().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

fn sum_squares<T: Real>(blocks: &Blocks<T>) -> T {
    blocks.iter().flatten().fold(T::zero(), |acc, &x| acc + x * x)
}

fn combine<T: Real>(a: &Matrix<T>, x: &[T], b: &Matrix<T>, y: &[T], scale: T) -> Vec<T> {
    a.apply(x).into_iter().zip(b.apply(y)).map(|(u, v)| (u + v) * scale).collect()
}

fn combine_t<T: Real>(a: &Matrix<T>, x: &[T], b: &Matrix<T>, y: &[T], scale: T) -> Vec<T> {
    a.apply_transpose(x).into_iter().zip(b.apply_transpose(y)).map(|(u, v)| (u + v) * scale).collect()
}

/// Runs the analysis bank from the finest level down to level 0.
pub fn analyze<T: Real>(tree: &SignalTree<T>, bank: &FilterBank<T>) -> Result<SignalTree<T>, TransformError> {
    if bank.order != tree.order {
        return Err(TransformError::OrderMismatch { bank: bank.order, signal: tree.order });
    }
    let m = tree.finest_level;
    if tree.s_blocks.get(m).is_none_or(Vec::is_empty) {
        return Err(TransformError::MissingFinestLevel(m));
    }
    check_level(&tree.s_blocks[m], m, tree.order + 1)?;
    let r = cast::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let mut out = SignalTree::from_finest(tree.order, m, tree.s_blocks[m].clone())?;
    for p in (0..m).rev() {
        let fine = &out.s_blocks[p + 1];
        let (s, d): (Blocks<T>, Blocks<T>) = fine
            .par_chunks(2)
            .map(|pair| {
                let s = combine(&bank.cm1, &pair[0], &bank.c1, &pair[1], r);
                let d = combine(&bank.dm1, &pair[0], &bank.d1, &pair[1], r);
                (s, d)
            })
            .unzip();
        out.s_blocks[p] = s;
        out.d_blocks[p] = d;
    }
    Ok(out)
}

/// Runs the synthesis bank from level 0 up and returns the finest blocks.
pub fn synthesize<T: Real>(tree: &SignalTree<T>, bank: &FilterBank<T>) -> Result<Blocks<T>, TransformError> {
    if bank.order != tree.order {
        return Err(TransformError::OrderMismatch { bank: bank.order, signal: tree.order });
    }
    let width = tree.order + 1;
    let coarse = tree.s_blocks.first().ok_or(TransformError::MissingFinestLevel(0))?;
    check_level(coarse, 0, width)?;
    for (p, level) in tree.d_blocks.iter().enumerate() {
        check_level(level, p, width)?;
    }
    let r = cast::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let mut current = coarse.clone();
    for details in &tree.d_blocks {
        current = current
            .par_iter()
            .zip(details)
            .flat_map_iter(|(s, d)| {
                let left = combine_t(&bank.cm1, s, &bank.dm1, d, r);
                let right = combine_t(&bank.c1, s, &bank.d1, d, r);
                [left, right]
            })
            .collect();
    }
    Ok(current)
}

/// Zeroes detail coefficients with `|d| < eps`; returns the new tree and
/// the number of detail coefficients kept.
pub fn threshold_compress<T: Real>(tree: &SignalTree<T>, eps: T) -> (SignalTree<T>, usize) {
    let mut out = tree.clone();
    let mut kept = 0;
    for x in out.d_blocks.iter_mut().flatten().flatten() {
        if x.abs() < eps {
            *x = T::zero();
        } else {
            kept += 1;
        }
    }
    (out, kept)
}

/// `s_{i,k} = 2^{m/2} ∫_{k/2^m}^{(k+1)/2^m} f(t) φ_i(2^m t - k) dt` with
/// `φ_i(u) = p̂_i(2u-1)` on `[0, 1)`, integrated exactly and then rounded.
pub fn project_polynomial_exact(f: &PolyExact, n: usize, m: usize) -> Vec<Vec<SurdValue>> {
    let table = monic_legendre_table(n);
    let shifted: Vec<PolyExact> = table.iter().map(|p| p.compose_affine(&int(2), &int(-1))).collect();
    let h = pow2(-(m as i64));
    // 2^{-m/2}
    let level_scale = if m.is_multiple_of(2) {
        SurdValue::from_rational(pow2(-(m as i64) / 2))
    } else {
        SurdValue::term(pow2(-(m as i64 + 1) / 2), 2)
    };
    let factors: Vec<SurdValue> = (0..=n).map(|i| &orthonormal_factor(i) * &level_scale).collect();
    (0..1usize << m)
        .into_par_iter()
        .map(|k| {
            let local = f.compose_affine(&h, &(&h * int(k as i64)));
            (0..=n).map(|i| factors[i].scale(&(&local * &shifted[i]).integrate(&int(0), &int(1)))).collect()
        })
        .collect()
}

pub fn project_polynomial<T: Real>(f: &PolyExact, n: usize, m: usize) -> Blocks<T> {
    project_polynomial_exact(f, n, m).into_iter().map(|b| b.iter().map(|x| cast::<T>(x.to_f64())).collect()).collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    let nf = points as f64;
    for i in 0..points.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(points, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(points, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[points - 1 - i] = x;
        weights[i] = w;
        weights[points - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` for the classical Legendre polynomial.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// `(p̂_0(x), …, p̂_n(x))` in floating point.
pub fn orthonormal_legendre_f64(n: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p.iter().enumerate().map(|(k, v)| v * ((2 * k + 1) as f64 / 2.0).sqrt()).collect()
}

/// Points where `project_samples` expects its input: for each of the `2^m`
/// blocks, the `n+1` Gauss-Legendre nodes mapped into that block.
pub fn sample_points(n: usize, m: usize) -> Vec<f64> {
    let (nodes, _) = gauss_legendre(n + 1);
    let h = 1.0 / (1u64 << m) as f64;
    (0..1usize << m)
        .flat_map(|k| nodes.iter().map(move |x| (k as f64 + (x + 1.0) / 2.0) * h).collect::<Vec<_>>())
        .collect()
}

/// Projection from samples at [`sample_points`], by the matching Gauss
/// rule; exact when the data come from a polynomial of degree `≤ n`.
pub fn project_samples<T: Real>(samples: &[T], n: usize, m: usize) -> Result<Blocks<T>, TransformError> {
    let expected = (n + 1) << m;
    if samples.len() != expected {
        return Err(TransformError::InputLength { expected, found: samples.len() });
    }
    let (nodes, weights) = gauss_legendre(n + 1);
    let basis: Vec<Vec<f64>> = nodes.iter().map(|&x| orthonormal_legendre_f64(n, x)).collect();
    let scale = 0.5 * (0.5f64).powf(m as f64 / 2.0);
    Ok(samples
        .chunks(n + 1)
        .map(|block| {
            (0..=n)
                .map(|i| {
                    let s: f64 = block
                        .iter()
                        .zip(&weights)
                        .zip(&basis)
                        .map(|((v, w), b)| v.to_f64().unwrap_or(f64::NAN) * w * b[i])
                        .sum();
                    cast::<T>(s * scale)
                })
                .collect()
        })
        .collect())
}
