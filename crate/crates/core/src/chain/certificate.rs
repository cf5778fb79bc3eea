//! The certified entropy-gap bound and the row-sum check behind it.
//!
//! With `k = D + R`, every vertex is at most `D` steps from the start of a
//! path reading a forbidden word of length at most `R`. Each such path of
//! length `k` has probability at least `alpha^k`, and none of it survives in
//! the restricted chain, so the `k`-step restricted rows sum to at most
//! `1 - alpha^k`. That gives `rho_F <= (1 - alpha^k)^(1/k)` for a stochastic
//! chain. A substochastic chain is first made stochastic by an h-transform,
//! which divides `rho` out and lowers the floor to
//! `alpha_bar = (alpha/rho)^(conn_K + 1)`.

use num_rational::BigRational;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::Serialize;

use super::{distributions, spectral_rho, WeightedChain};
use crate::error::{Error, Result};
use crate::factor::{estimate_denseness_constant, ForbiddenSet};
use crate::graph::{
    estimate_connectivity_constant, forward_ball, materialize, Budget, LabelledGraph, Scope,
    VertexId, Window,
};
use crate::num::{serialize_opt_real, serialize_real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundPath {
    /// Rows already sum to 1 and `rho = 1`; the floor is `alpha` itself.
    Stochastic,
    /// Goes through the h-transform; the floor is `alpha_bar`.
    General,
}

/// Everything [`certified_gap_bound`] needs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateInputs {
    pub alpha: f64,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "conn_K")]
    pub conn_k: Option<usize>,
    pub rho: f64,
    pub path: BoundPath,
    /// Alphabet size, for the entropy form of the bound.
    pub sigma_size: Option<usize>,
}

impl CertificateInputs {
    pub fn general(alpha: f64, d: usize, r: usize, conn_k: usize, rho: f64) -> Self {
        CertificateInputs {
            alpha,
            d,
            r,
            conn_k: Some(conn_k),
            rho,
            path: BoundPath::General,
            sigma_size: None,
        }
    }

    pub fn stochastic(alpha: f64, d: usize, r: usize) -> Self {
        CertificateInputs {
            alpha,
            d,
            r,
            conn_k: None,
            rho: 1.0,
            path: BoundPath::Stochastic,
            sigma_size: None,
        }
    }

    pub fn with_sigma(mut self, sigma_size: usize) -> Self {
        self.sigma_size = Some(sigma_size);
        self
    }

    pub fn with_r(&self, r: usize) -> Self {
        CertificateInputs { r, ..self.clone() }
    }
}

/// A machine-checkable upper bound on the restricted spectral radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCertificate {
    pub path: BoundPath,
    pub alpha: f64,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "R")]
    pub r: usize,
    pub k: usize,
    /// `alpha^k`.
    pub eps0: f64,
    #[serde(rename = "conn_K")]
    pub conn_k: Option<usize>,
    /// `(alpha/rho)^(conn_K + 1)` on the general path.
    #[serde(serialize_with = "serialize_opt_real")]
    pub alpha_bar: Option<f64>,
    /// The floor actually used raised to the `k`: `alpha^k` on the
    /// stochastic path, `alpha_bar^k` on the general path.
    pub eps0_prime: f64,
    /// `1 - (1 - eps0_prime)^(1/k)`.
    pub epsilon: f64,
    pub rho: f64,
    /// `rho · (1 - eps0_prime)^(1/k)`.
    pub bound: f64,
    pub sigma_size: Option<usize>,
    /// `log(bound · |Σ|)`, an upper bound on the restricted entropy.
    #[serde(serialize_with = "serialize_opt_real")]
    pub h_bound: Option<f64>,
}

fn out_of_range(msg: String) -> Error {
    Error::ParameterOutOfRange(msg)
}

/// Computes the bound from its inputs. An `eps0_prime` of exactly 1 (every
/// path of length `k` is forbidden) is accepted and gives bound 0.
pub fn certified_gap_bound(inputs: &CertificateInputs) -> Result<GapCertificate> {
    let CertificateInputs {
        alpha,
        d,
        r,
        conn_k,
        rho,
        path,
        sigma_size,
    } = inputs.clone();
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(out_of_range(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    if r < 1 {
        return Err(out_of_range("R must be at least 1".into()));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(out_of_range(format!("rho = {rho} must lie in (0, 1]")));
    }
    if sigma_size == Some(0) {
        return Err(out_of_range("alphabet size must be positive".into()));
    }
    let k = d + r;
    let eps0 = alpha.powi(k as i32);
    let (alpha_bar, floor) = match path {
        BoundPath::Stochastic => {
            if (rho - 1.0).abs() > 1e-12 {
                return Err(out_of_range(format!(
                    "the stochastic path needs rho = 1, got {rho}"
                )));
            }
            (None, alpha)
        }
        BoundPath::General => {
            let conn_k = conn_k.ok_or(Error::MissingConnK)?;
            if conn_k < 1 {
                return Err(out_of_range("conn_K must be at least 1".into()));
            }
            let ab = (alpha / rho).powi(conn_k as i32 + 1);
            if ab > 1.0 {
                return Err(out_of_range(format!(
                    "alpha_bar = {ab} exceeds 1 (alpha > rho)"
                )));
            }
            (Some(ab), ab)
        }
    };
    let eps0_prime = floor.powi(k as i32);
    let survive = (1.0 - eps0_prime).max(0.0).powf(1.0 / k as f64);
    let bound = rho * survive;
    let h_bound = sigma_size.map(|s| {
        let b = bound * s as f64;
        if b > 0.0 {
            b.ln()
        } else {
            f64::NEG_INFINITY
        }
    });
    Ok(GapCertificate {
        path,
        alpha,
        d,
        r,
        k,
        eps0,
        conn_k,
        alpha_bar,
        eps0_prime,
        epsilon: 1.0 - survive,
        rho,
        bound,
        sigma_size,
        h_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowSum {
    pub vertex: String,
    #[serde(serialize_with = "serialize_real")]
    pub value: f64,
    /// Exact value as `p/q`, in exact mode.
    pub exact: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowSumReport {
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "R")]
    pub r: usize,
    pub k: usize,
    /// `1 - alpha^k`.
    pub threshold: f64,
    pub exact: bool,
    pub scope: Scope,
    pub rows: Vec<RowSum>,
    /// Rows above the threshold; a wrong `D` or a window-boundary effect.
    pub counterexamples: Vec<RowSum>,
}

impl RowSumReport {
    pub fn is_ok(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks `sum_y p_F^(k)(x, y) <= 1 - alpha^k` for every window vertex `x`.
///
/// In exact mode the comparison is made in rational arithmetic and the
/// chain's weights and floor must be exact; otherwise a slack of `1e-12` is
/// allowed.
pub fn k_step_restricted_rowsum_check<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    forbidden: &ForbiddenSet,
    d: usize,
    k: usize,
    window: &Window<G::Vertex>,
    exact: bool,
    budget: Budget,
) -> Result<RowSumReport> {
    let r = forbidden.max_len();
    if k < d + r {
        return Err(out_of_range(format!(
            "k = {k} is smaller than D + R = {}",
            d + r
        )));
    }
    let threshold = 1.0 - chain.alpha().powi(k as i32);
    let vertices: Vec<&G::Vertex> = window.vertices().collect();
    let rows: Vec<(RowSum, bool)> = if exact {
        let alpha = chain
            .alpha_exact()
            .ok_or_else(|| Error::InexactWeight("alpha".into()))?
            .clone();
        let limit = BigRational::one() - Pow::pow(alpha, k);
        vertices
            .par_iter()
            .map(|x| {
                let ds = distributions::<G, BigRational>(chain, x, k, Some(forbidden), budget)?;
                let total = ds[k].total();
                let bad = total > limit;
                Ok((
                    RowSum {
                        vertex: x.canonical(),
                        value: crate::num::rational_to_f64(&total),
                        exact: Some(total.to_string()),
                    },
                    bad,
                ))
            })
            .collect::<Result<_>>()?
    } else {
        vertices
            .par_iter()
            .map(|x| {
                let ds = distributions::<G, f64>(chain, x, k, Some(forbidden), budget)?;
                let total = ds[k].total();
                Ok((
                    RowSum {
                        vertex: x.canonical(),
                        value: total,
                        exact: None,
                    },
                    total > threshold + 1e-12,
                ))
            })
            .collect::<Result<_>>()?
    };
    let counterexamples = rows
        .iter()
        .filter(|(_, bad)| *bad)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(RowSumReport {
        d,
        r,
        k,
        threshold,
        exact,
        scope: Scope::of(window),
        rows: rows.into_iter().map(|(r, _)| r).collect(),
        counterexamples,
    })
}

/// Constants of a finite chain measured on everything reachable from the
/// graph's first root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteConstants {
    pub vertices: usize,
    /// Smallest denseness constant, if `F` is relatively dense at all.
    #[serde(rename = "D")]
    pub d: Option<usize>,
    /// Smallest connectivity constant, if every edge can be undone.
    #[serde(rename = "conn_K")]
    pub conn_k: Option<usize>,
    pub rho: f64,
}

pub fn measure_finite_constants<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    forbidden: &ForbiddenSet,
    budget: Budget,
) -> Result<FiniteConstants> {
    let g = chain.graph();
    let root = g
        .roots()
        .into_iter()
        .next()
        .ok_or_else(|| Error::Parse("graph has no root".into()))?;
    let n = materialize(g, std::slice::from_ref(&root), budget)?.len();
    let window = forward_ball(g, &root, n, budget)?;
    let d = estimate_denseness_constant(g, forbidden, &window, n, budget)?;
    let conn_k = estimate_connectivity_constant(g, &window, n, budget)?;
    let rho = spectral_rho(chain, &[root], None, budget)?.value;
    Ok(FiniteConstants {
        vertices: n,
        d,
        conn_k,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schreier::{LineZ, SchreierGraph};

    #[test]
    fn bound_examples() {
        let c = certified_gap_bound(&CertificateInputs::stochastic(0.5, 0, 2)).unwrap();
        assert_eq!((c.k, c.eps0), (2, 0.25));
        assert!((c.bound - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((c.epsilon - (1.0 - 0.75f64.sqrt())).abs() < 1e-15);

        let c = certified_gap_bound(&CertificateInputs::stochastic(0.5, 1, 1)).unwrap();
        assert!((c.bound - 0.75f64.sqrt()).abs() < 1e-15);

        let c = certified_gap_bound(&CertificateInputs::general(0.5, 0, 2, 1, 1.0).with_sigma(2))
            .unwrap();
        assert_eq!(c.alpha_bar, Some(0.25));
        assert_eq!(c.eps0_prime, 1.0 / 16.0);
        assert!((c.bound - (15.0f64 / 16.0).sqrt()).abs() < 1e-15);
        assert!((c.h_bound.unwrap() - (2.0 * c.bound).ln()).abs() < 1e-15);
        assert!(c.bound < c.rho);
    }

    #[test]
    fn bound_rejects_bad_parameters() {
        for inputs in [
            CertificateInputs::stochastic(0.0, 0, 2),
            CertificateInputs::stochastic(1.5, 0, 2),
            CertificateInputs::stochastic(0.5, 0, 0),
            CertificateInputs::general(0.5, 0, 1, 1, 0.0),
            CertificateInputs::general(0.5, 0, 1, 0, 1.0),
            CertificateInputs::general(0.5, 0, 1, 1, 0.25),
            CertificateInputs {
                rho: 0.9,
                ..CertificateInputs::stochastic(0.5, 0, 1)
            },
        ] {
            assert!(certified_gap_bound(&inputs).is_err(), "{inputs:?}");
        }
        let missing = CertificateInputs {
            conn_k: None,
            ..CertificateInputs::general(0.5, 0, 1, 1, 1.0)
        };
        assert_eq!(certified_gap_bound(&missing), Err(Error::MissingConnK));
    }

    #[test]
    fn everything_forbidden_gives_bound_zero() {
        let c =
            certified_gap_bound(&CertificateInputs::stochastic(1.0, 0, 1).with_sigma(1)).unwrap();
        assert_eq!(c.bound, 0.0);
        assert_eq!(c.h_bound, Some(f64::NEG_INFINITY));
    }

    #[test]
    fn row_sums_for_full_shift_and_line() {
        let b2 = fixtures::full_shift(2);
        let c = WeightedChain::uniform(&b2);
        let f = ForbiddenSet::parse(b2.alphabet(), &["aa"]).unwrap();
        let w = forward_ball(&b2, &"v".to_string(), 1, Budget::DEFAULT).unwrap();
        let r = k_step_restricted_rowsum_check(&c, &f, 0, 2, &w, true, Budget::DEFAULT).unwrap();
        assert!(r.is_ok());
        assert_eq!(r.rows[0].exact.as_deref(), Some("3/4"));

        let z = SchreierGraph::new(LineZ);
        let c = WeightedChain::uniform(&z);
        let f = ForbiddenSet::parse(z.alphabet(), &["rr"]).unwrap();
        let w = forward_ball(&z, &0, 3, Budget::DEFAULT).unwrap();
        let r = k_step_restricted_rowsum_check(&c, &f, 0, 2, &w, false, Budget::DEFAULT).unwrap();
        assert!(r.is_ok());
        assert!(r.rows.iter().all(|row| (row.value - 0.75).abs() < 1e-15));
        assert!(k_step_restricted_rowsum_check(&c, &f, 0, 1, &w, false, Budget::DEFAULT).is_err());
    }

    #[test]
    fn unreachable_factor_yields_a_counterexample() {
        // a single a-loop carrying all the mass; b is never read
        let mut g =
            crate::graph::FiniteGraph::new(crate::graph::Alphabet::new("ab".chars()).unwrap());
        g.add_edge("v".to_string(), 'a', "v".to_string()).unwrap();
        let e = g.edges().next().unwrap();
        let one = BigRational::one();
        let c = WeightedChain::with_exact_weights(&g, [(e, one.clone())].into(), one);
        let f = ForbiddenSet::parse(g.alphabet(), &["b"]).unwrap();
        let w = forward_ball(&g, &"v".to_string(), 1, Budget::DEFAULT).unwrap();
        let r = k_step_restricted_rowsum_check(&c, &f, 0, 1, &w, true, Budget::DEFAULT).unwrap();
        assert!(!r.is_ok());
        assert_eq!(r.counterexamples[0].exact.as_deref(), Some("1"));
    }

    #[test]
    fn measured_constants_of_the_golden_mean_graph() {
        let g = fixtures::golden_mean();
        let c = WeightedChain::uniform(&g);
        let f = ForbiddenSet::parse(g.alphabet(), &["b"]).unwrap();
        let m = measure_finite_constants(&c, &f, Budget::DEFAULT).unwrap();
        assert_eq!(m.vertices, 2);
        assert_eq!(m.d, Some(0));
        assert_eq!(m.conn_k, Some(1));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.rho - phi / 2.0).abs() < 1e-12);
    }
}
