//! Decay-ratio tables for the non-universality conditions.
//!
//! Asymptotic `o(·)` conditions are not machine-decidable from finite data,
//! so these operations emit exact value columns plus display-only real
//! ratios and a monotonicity flag over the computed window. The verdict is
//! left to the reader.

use serde::{Deserialize, Serialize};

use crate::cantor::CantorSpec;
use crate::error::Error;
use crate::rational::Rational;

/// One table row: the exact quantity and its rendered decay ratio.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub n: u32,
    /// Exact value of the tracked quantity (`delta_n` or `ell_n`).
    pub value: Rational,
    /// Display-only real approximation of the tested ratio.
    pub ratio: f64,
}

/// A decay table plus window-level flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayDiagnostic {
    pub rows: Vec<DiagnosticRow>,
    /// Whether `d_n > ell_n` for all n (spec-level flag); None when the
    /// diagnostic is not about a Cantor spec.
    pub thin: Option<bool>,
    /// Smallest row index `n` such that the ratio strictly decreases from
    /// that row to the end of the window; None when the tail still rises
    /// (evidence of a non-vanishing ratio).
    pub monotone_decreasing_from: Option<u32>,
}

fn monotone_from(rows: &[DiagnosticRow]) -> Option<u32> {
    if rows.is_empty() {
        return None;
    }
    let mut from = rows.last().unwrap().n;
    for w in rows.windows(2).rev() {
        if w[1].ratio < w[0].ratio {
            from = w[0].n;
        } else {
            break;
        }
    }
    if from == rows.last().unwrap().n && rows.len() > 1 {
        None
    } else {
        Some(from)
    }
}

/// Normalized minimum gap of a strictly decreasing sequence:
/// `min_i (a_i - a_{i+1}) / (a_1 - a_n)`.
pub fn delta(points: &[Rational]) -> Result<Rational, Error> {
    if points.len() < 2 {
        return Err(Error::NonMonotone);
    }
    if !points.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::NonMonotone);
    }
    let span = points.first().unwrap() - points.last().unwrap();
    let min_gap = points
        .windows(2)
        .map(|w| &w[0] - &w[1])
        .min()
        .unwrap();
    Ok(&min_gap / &span)
}

/// Slow-decay diagnostic for an explicit decreasing sequence: rows
/// `(n, delta_n, -log(delta_n)/n)` over prefixes of length `2..=max_n`.
pub fn slow_decay_sequence(seq: &[Rational], max_n: u32) -> Result<DecayDiagnostic, Error> {
    if max_n < 2 {
        return Err(Error::InvalidParams("need max_n >= 2".into()));
    }
    let upto = (max_n as usize).min(seq.len());
    let mut rows = Vec::new();
    for n in 2..=upto {
        let d = delta(&seq[..n])?;
        rows.push(DiagnosticRow {
            n: n as u32,
            ratio: -d.ln_f64() / n as f64,
            value: d,
        });
    }
    Ok(DecayDiagnostic {
        rows,
        thin: None,
        monotone_decreasing_from: None,
    })
    .map(|mut d| {
        d.monotone_decreasing_from = monotone_from(&d.rows);
        d
    })
}

/// Slow-decay diagnostic over the boundary sets of a spec: rows
/// `(n, delta(∂C_n), -log(delta)/|∂C_n|)` for `n = 1..=max_n`.
pub fn slow_decay_spec(spec: &CantorSpec, max_n: u32) -> Result<DecayDiagnostic, Error> {
    if max_n < 1 {
        return Err(Error::InvalidParams("need max_n >= 1".into()));
    }
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let eps = spec.endpoints(n)?;
        let mut decreasing = eps.points.clone();
        decreasing.reverse();
        let d = delta(&decreasing)?;
        rows.push(DiagnosticRow {
            n,
            ratio: -d.ln_f64() / eps.len() as f64,
            value: d,
        });
    }
    let mono = monotone_from(&rows);
    Ok(DecayDiagnostic {
        rows,
        thin: Some(spec.is_thin()),
        monotone_decreasing_from: mono,
    })
}

/// Subsequence-decay diagnostic: rows `(n, ell_n, -log(ell_n)/2^n)` plus the
/// thin flag the hypothesis requires.
pub fn interval_decay(spec: &CantorSpec, max_n: u32) -> Result<DecayDiagnostic, Error> {
    if max_n < 1 {
        return Err(Error::InvalidParams("need max_n >= 1".into()));
    }
    let mut rows = Vec::new();
    let mut ell = Rational::one();
    for n in 1..=max_n {
        ell = &ell * &spec.ratio(n);
        let neg_log = -ell.ln_f64();
        rows.push(DiagnosticRow {
            n,
            value: ell.clone(),
            ratio: neg_log / 2f64.powi(n as i32),
        });
    }
    let mono = monotone_from(&rows);
    Ok(DecayDiagnostic {
        rows,
        thin: Some(spec.is_thin()),
        monotone_decreasing_from: mono,
    })
}

/// Epsilon-weighted decay diagnostic: rows `(n, ell_n, -log(ell_n)/2^(n(1-eps)))`
/// for `0 < eps < 1`, plus the thin flag.
pub fn weighted_interval_decay(
    spec: &CantorSpec,
    max_n: u32,
    eps: &Rational,
) -> Result<DecayDiagnostic, Error> {
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::EpsilonRange(eps.clone()));
    }
    if max_n < 1 {
        return Err(Error::InvalidParams("need max_n >= 1".into()));
    }
    let eps_f = eps.to_f64();
    let mut rows = Vec::new();
    let mut ell = Rational::one();
    for n in 1..=max_n {
        ell = &ell * &spec.ratio(n);
        let neg_log = -ell.ln_f64();
        let denom = 2f64.powf(n as f64 * (1.0 - eps_f));
        rows.push(DiagnosticRow {
            n,
            value: ell.clone(),
            ratio: neg_log / denom,
        });
    }
    let mono = monotone_from(&rows);
    Ok(DecayDiagnostic {
        rows,
        thin: Some(spec.is_thin()),
        monotone_decreasing_from: mono,
    })
}
