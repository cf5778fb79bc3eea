//! Periodicity-aware growth-rate fit shared by word counts and transition
//! probabilities.
//!
//! Sequences such as return counts on the integer line vanish on a residue
//! class (odd lengths), so a plain regression over all indices is useless.
//! The fit first detects the period `p` of the support, then regresses
//! `log a_n` against `n` separately on each residue class mod `p` inside the
//! tail window and reports the largest slope, which estimates the limsup.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::serialize_real;

/// Natural logarithm of a big integer, `None` for zero.
pub fn log_biguint(x: &BigUint) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return Some(x.to_f64().expect("fits in f64").ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits fit in f64");
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueSlope {
    pub residue: usize,
    #[serde(serialize_with = "serialize_real")]
    pub slope: f64,
    pub points: usize,
}

/// Result of [`fit_tail`]. A finite sequence (support ends before the tail
/// window) has `slope = -inf`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailFit {
    #[serde(serialize_with = "serialize_real")]
    pub slope: f64,
    pub period: usize,
    pub window_start: usize,
    pub window_end: usize,
    /// RMS residual of the winning regression.
    #[serde(serialize_with = "serialize_real")]
    pub residual: f64,
    /// Slope between the last two points of the winning class; a cross-check.
    #[serde(serialize_with = "serialize_real")]
    pub last_ratio: f64,
    pub residues: Vec<ResidueSlope>,
}

impl TailFit {
    pub fn is_finite_sequence(&self) -> bool {
        self.slope == f64::NEG_INFINITY
    }
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

/// Fits the growth rate of a sequence given as logarithms (`None` = zero
/// entry), using the last `tail` indices.
///
/// The window is widened to at least two periods so that every residue
/// class has a chance to be represented.
pub fn fit_tail(logs: &[Option<f64>], tail: usize) -> Result<TailFit> {
    if tail < 2 {
        return Err(Error::InsufficientData(format!(
            "tail window {tail} is shorter than 2"
        )));
    }
    if logs.is_empty() {
        return Err(Error::InsufficientData("empty sequence".into()));
    }
    let last = logs.len() - 1;
    let support: Vec<usize> = logs
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|_| i))
        .collect();
    let period = support
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0usize, |g, d| g.gcd(&d))
        .max(1);
    let width = tail.max(2 * period).min(logs.len());
    let window_start = last + 1 - width;

    if support.last().is_none_or(|&i| i < window_start) {
        return Ok(TailFit {
            slope: f64::NEG_INFINITY,
            period,
            window_start,
            window_end: last,
            residual: 0.0,
            last_ratio: f64::NEG_INFINITY,
            residues: Vec::new(),
        });
    }

    let mut best: Option<(f64, f64, f64)> = None;
    let mut residues = Vec::new();
    for r in 0..period {
        let points: Vec<(f64, f64)> = (window_start..=last)
            .filter(|n| n % period == r)
            .filter_map(|n| logs[n].map(|l| (n as f64, l)))
            .collect();
        if points.len() < 2 {
            continue;
        }
        let (slope, residual) = least_squares(&points);
        let (a, b) = (points[points.len() - 2], points[points.len() - 1]);
        let last_ratio = (b.1 - a.1) / (b.0 - a.0);
        residues.push(ResidueSlope {
            residue: r,
            slope,
            points: points.len(),
        });
        if best.is_none_or(|(s, _, _)| slope > s) {
            best = Some((slope, residual, last_ratio));
        }
    }
    let (slope, residual, last_ratio) = best.ok_or_else(|| {
        Error::InsufficientData(format!(
            "no residue class mod {period} has two nonzero points in [{window_start}, {last}]"
        ))
    })?;
    Ok(TailFit {
        slope,
        period,
        window_start,
        window_end: last,
        residual,
        last_ratio,
        residues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logs(xs: &[f64]) -> Vec<Option<f64>> {
        xs.iter()
            .map(|&x| if x == 0.0 { None } else { Some(x.ln()) })
            .collect()
    }

    #[test]
    fn perfect_exponential_is_recovered_exactly() {
        let seq: Vec<f64> = (0..=40).map(|n| 2f64.powi(n)).collect();
        let fit = fit_tail(&logs(&seq), 20).unwrap();
        assert!((fit.slope - 2f64.ln()).abs() < 1e-12);
        assert_eq!(fit.period, 1);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn period_two_support() {
        let seq: Vec<f64> = (0..=20)
            .map(|n| if n % 2 == 0 { 3f64.powi(n) } else { 0.0 })
            .collect();
        let fit = fit_tail(&logs(&seq), 10).unwrap();
        assert_eq!(fit.period, 2);
        assert_eq!(fit.residues.len(), 1);
        assert!((fit.slope - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn vanishing_tail_is_a_finite_sequence() {
        let mut seq = vec![1.0, 2.0, 1.0];
        seq.extend(std::iter::repeat_n(0.0, 10));
        let fit = fit_tail(&logs(&seq), 5).unwrap();
        assert!(fit.is_finite_sequence());
    }

    #[test]
    fn bad_inputs() {
        assert!(fit_tail(&logs(&[1.0, 1.0]), 1).is_err());
        assert!(fit_tail(&[], 3).is_err());
        // one nonzero point in the window is not enough for a slope
        assert!(matches!(
            fit_tail(&logs(&[0.0, 0.0, 0.0, 5.0]), 2),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn log_of_huge_integers() {
        let x = BigUint::from(3u32).pow(2000);
        let l = log_biguint(&x).unwrap();
        assert!((l - 2000.0 * 3f64.ln()).abs() < 1e-9 * l);
        assert_eq!(log_biguint(&BigUint::zero()), None);
    }
}
