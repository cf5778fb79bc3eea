//! Perron roots of sparse nonnegative matrices by shifted power iteration.
//!
//! Iterating `A + cI` instead of `A` makes an irreducible periodic matrix
//! primitive without moving its eigenvectors, so plain power iteration
//! converges. Convergence is judged on the Collatz–Wielandt bracket
//! `min_i (Ax)_i/x_i <= lambda <= max_i (Ax)_i/x_i`, which is rigorous for a
//! positive `x`.

use serde::Serialize;

use crate::graph::tarjan;
use crate::num::serialize_real;

/// Sparse rows `(column, value)` of a nonnegative square matrix.
pub type SparseRows = [Vec<(usize, f64)>];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerronOptions {
    /// Relative width of the eigenvalue bracket at which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronResult {
    #[serde(serialize_with = "serialize_real")]
    pub value: f64,
    #[serde(serialize_with = "serialize_real")]
    pub lower: f64,
    #[serde(serialize_with = "serialize_real")]
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Eigenvector estimate scaled to maximum 1.
    #[serde(skip)]
    pub vector: Vec<f64>,
}

fn multiply(rows: &SparseRows, x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|row| row.iter().map(|&(j, a)| a * x[j]).sum())
        .collect()
}

/// Perron root and vector of an irreducible matrix.
///
/// On a reducible matrix the iteration still returns the bracket it
/// reached, but zero entries in the vector make the bracket meaningless;
/// use [`spectral_radius`] there.
pub fn perron_root(rows: &SparseRows, opts: PerronOptions) -> PerronResult {
    let n = rows.len();
    let max_row: f64 = rows
        .iter()
        .map(|r| r.iter().map(|e| e.1).sum::<f64>())
        .fold(0.0, f64::max);
    if n == 0 || max_row == 0.0 {
        return PerronResult {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
            vector: vec![1.0; n],
        };
    }
    let shift = max_row / 2.0;
    let mut x = vec![1.0; n];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    for it in 1..=opts.max_iterations {
        let ax = multiply(rows, &x);
        lower = f64::INFINITY;
        upper = 0.0f64;
        for i in 0..n {
            if x[i] > 0.0 {
                let r = ax[i] / x[i];
                lower = lower.min(r);
                upper = upper.max(r);
            }
        }
        if upper - lower <= opts.tolerance * upper {
            return PerronResult {
                value: 0.5 * (lower + upper),
                lower,
                upper,
                iterations: it,
                converged: true,
                vector: x,
            };
        }
        let mut y: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a + shift * b).collect();
        let top = y.iter().copied().fold(0.0, f64::max);
        y.iter_mut().for_each(|v| *v /= top);
        x = y;
    }
    PerronResult {
        value: 0.5 * (lower + upper),
        lower,
        upper,
        iterations: opts.max_iterations,
        converged: false,
        vector: x,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralRadius {
    #[serde(serialize_with = "serialize_real")]
    pub value: f64,
    /// Vertices of the component attaining the maximum (empty if nilpotent).
    pub component: Vec<usize>,
    pub components: usize,
    pub converged: bool,
}

/// Spectral radius of an arbitrary nonnegative matrix: the largest Perron
/// root over its strongly connected components. Only components accepted by
/// `keep` take part.
pub fn spectral_radius_where<K: Fn(&[usize]) -> bool>(
    rows: &SparseRows,
    opts: PerronOptions,
    keep: K,
) -> SpectralRadius {
    let adj: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| r.iter().filter(|e| e.1 > 0.0).map(|e| e.0).collect())
        .collect();
    let comps = tarjan(&adj);
    let mut best = SpectralRadius {
        value: 0.0,
        component: Vec::new(),
        components: comps.len(),
        converged: true,
    };
    for comp in &comps {
        if !keep(comp) {
            continue;
        }
        let mut local = vec![usize::MAX; rows.len()];
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        let sub: Vec<Vec<(usize, f64)>> = comp
            .iter()
            .map(|&v| {
                rows[v]
                    .iter()
                    .filter(|e| e.1 > 0.0 && local[e.0] != usize::MAX)
                    .map(|&(j, a)| (local[j], a))
                    .collect()
            })
            .collect();
        if sub.iter().all(Vec::is_empty) {
            continue;
        }
        let r = perron_root(&sub, opts);
        best.converged &= r.converged;
        if r.value > best.value {
            best.value = r.value;
            best.component = comp.clone();
        }
    }
    best
}

pub fn spectral_radius(rows: &SparseRows, opts: PerronOptions) -> SpectralRadius {
    spectral_radius_where(rows, opts, |_| true)
}
