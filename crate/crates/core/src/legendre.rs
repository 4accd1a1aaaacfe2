//! Exact Legendre polynomial algebra on `[-1, 1]`, the Alpert scaling vector
//! on `[0, 1)`, and the integral that defines the refinement coefficients.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{double_factorial, factorial, int, pochhammer, rat, Rational, SurdValue};
use crate::hypergeom::HypTerminatingSpec;

/// Polynomial with rational coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolyExact {
    coeffs: Vec<Rational>,
}

impl PolyExact {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyExact { coeffs }
    }

    pub fn zero() -> Self {
        PolyExact { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `t`.
    pub fn identity() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Rational::zero(); k + 1];
        c[k] = Rational::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// `p(a t + b)`
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Self {
        let inner = Self::new(vec![b.clone(), a.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * &inner) + &Self::constant(c.clone()))
    }

    /// Exact `∫_lo^hi p(t) dt`.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Rational {
        let mut total = Rational::zero();
        let (mut hp, mut lp) = (hi.clone(), lo.clone());
        for (k, c) in self.coeffs.iter().enumerate() {
            total += c * (&hp - &lp) / int(k as i64 + 1);
            hp *= hi;
            lp *= lo;
        }
        total
    }

    /// `p(-t) = (-1)^d p(t)`, i.e. only powers of the parity of `d` appear.
    pub fn has_parity(&self, d: usize) -> bool {
        self.coeffs.iter().enumerate().all(|(k, c)| (k + d).is_multiple_of(2) || c.is_zero())
    }
}

impl Add for &PolyExact {
    type Output = PolyExact;
    fn add(self, rhs: &PolyExact) -> PolyExact {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        PolyExact::new(
            (0..n).map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero)).collect(),
        )
    }
}

impl Sub for &PolyExact {
    type Output = PolyExact;
    fn sub(self, rhs: &PolyExact) -> PolyExact {
        self + &rhs.scale(&int(-1))
    }
}

impl Mul for &PolyExact {
    type Output = PolyExact;
    fn mul(self, rhs: &PolyExact) -> PolyExact {
        if self.is_zero() || rhs.is_zero() {
            return PolyExact::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyExact::new(out)
    }
}

/// Polynomial with surd coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolySurd {
    coeffs: Vec<SurdValue>,
}

impl PolySurd {
    pub fn new(mut coeffs: Vec<SurdValue>) -> Self {
        while coeffs.last().is_some_and(SurdValue::is_zero) {
            coeffs.pop();
        }
        PolySurd { coeffs }
    }

    /// `s · p` for a rational polynomial `p`.
    pub fn from_scaled(p: &PolyExact, s: &SurdValue) -> Self {
        Self::new(p.coeffs().iter().map(|c| s.scale(c)).collect())
    }

    pub fn coeffs(&self) -> &[SurdValue] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> SurdValue {
        self.coeffs.iter().rev().fold(SurdValue::zero(), |acc, c| acc.scale(t) + c)
    }

    pub fn mul(&self, rhs: &PolySurd) -> PolySurd {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return PolySurd::default();
        }
        let mut out = vec![SurdValue::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolySurd::new(out)
    }

    /// Exact `∫_lo^hi p(t) dt`.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> SurdValue {
        let mut total = SurdValue::zero();
        let (mut hp, mut lp) = (hi.clone(), lo.clone());
        for (k, c) in self.coeffs.iter().enumerate() {
            total += c.scale(&((&hp - &lp) / int(k as i64 + 1)));
            hp *= hi;
            lp *= lo;
        }
        total
    }
}

/// Monic Legendre polynomials `p_0..=p_n` from
/// `p_{k+1} = t p_k - k²/((2k+1)(2k-1)) p_{k-1}`.
pub fn monic_legendre_table(n: usize) -> Vec<PolyExact> {
    let mut table = vec![PolyExact::constant(Rational::one())];
    if n == 0 {
        return table;
    }
    table.push(PolyExact::identity());
    let t = PolyExact::identity();
    for k in 1..n {
        let k = k as i64;
        let c = rat(k * k, (2 * k + 1) * (2 * k - 1));
        let next = &(&t * &table[k as usize]) - &table[k as usize - 1].scale(&c);
        table.push(next);
    }
    table
}

pub fn monic_legendre(n: usize) -> PolyExact {
    monic_legendre_table(n).pop().expect("table is never empty")
}

/// `√(2n+1) (2n-1)!! / (√2 n!)`, the factor taking `p_n` to the orthonormal
/// `p̂_n`, carried as `((2n-1)!!/n!)·½√(2(2n+1))`.
pub fn orthonormal_factor(n: usize) -> SurdValue {
    let n64 = n as i64;
    let df = double_factorial(2 * n64 - 1).expect("2n-1 is odd or -1");
    let q = Rational::new(df, factorial(n as u64)) / int(2);
    SurdValue::term(q, 2 * (2 * n as u64 + 1))
}

pub fn orthonormal_legendre(n: usize) -> PolySurd {
    PolySurd::from_scaled(&monic_legendre(n), &orthonormal_factor(n))
}

/// `(φ_0(t), …, φ_n(t))` with `φ_j(t) = p̂_j(2t-1)` on `[0, 1)` and zero
/// elsewhere.
pub fn eval_scaling_vector(n: usize, t: &Rational) -> Vec<SurdValue> {
    if t < &Rational::zero() || t >= &Rational::one() {
        return vec![SurdValue::zero(); n + 1];
    }
    let x = t * int(2) - int(1);
    eval_orthonormal_all(n, &x)
}

/// `(p̂_0(x), …, p̂_n(x))` with no support restriction.
pub fn eval_orthonormal_all(n: usize, x: &Rational) -> Vec<SurdValue> {
    monic_legendre_table(n).iter().enumerate().map(|(k, p)| orthonormal_factor(k).scale(&p.eval(x))).collect()
}

/// The refinement coefficient from its defining integral,
/// `2 ∫_0^1 p̂_i(t) p̂_j(2t-1) dt`, by exact polynomial multiplication and
/// monomial-wise integration.
///
/// The factor 2 is the normalization under which the refinement relation
/// `p̂_i(t) = Σ_j (C_1)_{ij} p̂_j(2t-1)` holds on `[0, 1]`.
pub fn integrate_shifted_product(i: usize, j: usize) -> SurdValue {
    let table = monic_legendre_table(i.max(j));
    integrate_shifted_product_with(&table, i, j)
}

pub(crate) fn integrate_shifted_product_with(table: &[PolyExact], i: usize, j: usize) -> SurdValue {
    let shifted = table[j].compose_affine(&int(2), &int(-1));
    let integral = (&table[i] * &shifted).integrate(&Rational::zero(), &Rational::one());
    (orthonormal_factor(i) * orthonormal_factor(j)).scale(&(integral * int(2)))
}

/// `p_n(t)` through `2^n n!/(n+1)_n · 2F1(-n, n+1; 1; (1-t)/2)`.
pub fn monic_legendre_via_hypergeometric(n: usize, t: &Rational) -> Rational {
    let n64 = n as i64;
    let x = (int(1) - t) / int(2);
    let spec = HypTerminatingSpec::f21(int(-n64), int(n64 + 1), int(1), x).expect("terminating Legendre series");
    let prefactor = Rational::from_integer((BigInt::one() << n) * factorial(n as u64)) / pochhammer(&int(n64 + 1), n);
    prefactor * spec.eval()
}

/// The parity-manifest forms in `x²`:
/// `p_{2m}(x) = (-1)^m (1/2)_m/(m+1/2)_m · 2F1(-m, m+1/2; 1/2; x²)` and
/// `p_{2m+1}(x) = (-1)^m (3/2)_m x/(m+3/2)_m · 2F1(-m, m+3/2; 3/2; x²)`.
pub fn monic_legendre_via_symmetric_form(n: usize, x: &Rational) -> Rational {
    let m = (n / 2) as i64;
    let x2 = x * x;
    let sign = if m % 2 == 0 { int(1) } else { int(-1) };
    let mu = m as usize;
    if n.is_multiple_of(2) {
        let f = HypTerminatingSpec::f21(int(-m), rat(2 * m + 1, 2), rat(1, 2), x2).expect("terminating series");
        sign * pochhammer(&rat(1, 2), mu) / pochhammer(&rat(2 * m + 1, 2), mu) * f.eval()
    } else {
        let f = HypTerminatingSpec::f21(int(-m), rat(2 * m + 3, 2), rat(3, 2), x2).expect("terminating series");
        sign * pochhammer(&rat(3, 2), mu) * x / pochhammer(&rat(2 * m + 3, 2), mu) * f.eval()
    }
}
