//! Bessel functions of half-integer order `J_{k+1/2}(a)` for real `a > 0`.
//!
//! Three regimes:
//! - `a < 1`: the power series, which has no cancellation there;
//! - `k ≤ a`: upward recurrence from the closed forms of `J_{±1/2}`;
//! - otherwise: Miller's downward recurrence, scaled by a least-squares fit
//!   of the two lowest computed orders to the closed forms.

use std::f64::consts::PI;

use serde::Serialize;

use super::FourierError;

/// Values `J_{k+1/2}(a)` for `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BesselHalfVector {
    pub order_count: usize,
    pub argument: f64,
    pub values: Vec<f64>,
}

/// `J_{k+1/2}(a)` for `k = -1..=kmax`, returned as a vector indexed by `k + 1`.
pub fn bessel_half_range(kmax: usize, a: f64) -> Result<Vec<f64>, FourierError> {
    if !a.is_finite() || a <= 0.0 {
        return Err(FourierError::NonPositiveArgument(a));
    }
    Ok(if a < 1.0 {
        series_range(kmax, a)
    } else if (kmax as f64) <= a {
        upward_range(kmax, a)
    } else {
        let mut out = miller_range(kmax, a);
        // upward recurrence is as good as Miller's below the turning point
        let up = upward_range(a.floor() as usize, a);
        out[..up.len()].copy_from_slice(&up);
        out
    })
}

pub fn bessel_half_vector(n: usize, a: f64) -> Result<BesselHalfVector, FourierError> {
    let range = bessel_half_range(n, a)?;
    Ok(BesselHalfVector { order_count: n + 1, argument: a, values: range[1..].to_vec() })
}

fn closed_forms(a: f64) -> (f64, f64) {
    let scale = (2.0 / (PI * a)).sqrt();
    (scale * a.cos(), scale * a.sin())
}

fn upward_range(kmax: usize, a: f64) -> Vec<f64> {
    let (jm, j0) = closed_forms(a);
    let mut out = Vec::with_capacity(kmax + 2);
    out.push(jm);
    out.push(j0);
    for k in 0..kmax {
        // J_{ν+1} = (2ν/a) J_ν - J_{ν-1} with ν = k + 1/2
        let next = (2 * k + 1) as f64 / a * out[k + 1] - out[k];
        out.push(next);
    }
    out
}

fn miller_range(kmax: usize, a: f64) -> Vec<f64> {
    let start = 2 * kmax.max(a.ceil() as usize) + 40;
    // vals[idx] holds the order idx - 1/2; seed far above kmax
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1.0;
    for idx in (0..start).rev() {
        // J_{ν-1} = (2ν/a) J_ν - J_{ν+1} with ν = idx + 1/2
        vals[idx] = (2 * idx + 1) as f64 / a * vals[idx + 1] - vals[idx + 2];
        if vals[idx].abs() > 1e250 {
            for v in &mut vals[idx..] {
                *v *= 1e-250;
            }
        }
    }
    let (jm, j0) = closed_forms(a);
    let big = vals[0].abs().max(vals[1].abs());
    let (fm, f0) = (vals[0] / big, vals[1] / big);
    let scale = (fm * jm + f0 * j0) / (fm * fm + f0 * f0) / big;
    vals.truncate(kmax + 2);
    vals.iter().map(|v| v * scale).collect()
}

fn series_range(kmax: usize, a: f64) -> Vec<f64> {
    let (jm, _) = closed_forms(a);
    let x = -a * a / 4.0;
    // lead = (a/2)^{k+1/2} / Γ(k+3/2); Γ(3/2) = √π/2
    let mut lead = (a / 2.0).sqrt() * 2.0 / PI.sqrt();
    let mut out = Vec::with_capacity(kmax + 2);
    out.push(jm);
    for k in 0..=kmax {
        let nu1 = k as f64 + 1.5; // ν + 1
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut m = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            m += 1.0;
            term *= x / (m * (nu1 + m - 1.0));
            sum += term;
        }
        out.push(lead * sum);
        lead *= a / 2.0 / nu1;
    }
    out
}
