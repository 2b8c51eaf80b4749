//! Gauss–Hermite rules for expectations under Gaussian priors.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Rule for `E[g(Z)]`, `Z ~ N(0, 1)`: `Σ w_k g(x_k)` with `Σ w_k = 1`.
/// Exact for polynomials of degree `< 2n`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch on the Jacobi matrix of the probabilists' Hermite
    /// polynomials (zero diagonal, off-diagonal `√k`).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // symmetrize: the exact rule is symmetric about zero
        for k in 0..n / 2 {
            let (a, b) = (pairs[k], pairs[n - 1 - k]);
            let x = 0.5 * (b.0 - a.0);
            let w = 0.5 * (a.1 + b.1);
            pairs[k] = (-x, w);
            pairs[n - 1 - k] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        GaussHermite {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        }
    }

    /// Cached rules for `n = 16 · 2^k`, `k < 5`.
    pub fn cached(level: usize) -> &'static GaussHermite {
        static RULES: [OnceLock<GaussHermite>; 5] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        RULES[level].get_or_init(|| GaussHermite::new(16 << level))
    }

    pub const LEVELS: usize = 5;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
