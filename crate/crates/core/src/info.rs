use std::fmt;

/// One of the two rotation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Theta,
    Gamma,
}

impl Param {
    pub fn other(self) -> Param {
        match self {
            Param::Theta => Param::Gamma,
            Param::Gamma => Param::Theta,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Theta => "theta",
            Param::Gamma => "gamma",
        }
    }
}

/// Which parameter a stepwise protocol estimates first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    ThetaFirst,
    GammaFirst,
}

impl Ordering {
    pub fn first(self) -> Param {
        match self {
            Ordering::ThetaFirst => Param::Theta,
            Ordering::GammaFirst => Param::Gamma,
        }
    }

    pub fn second(self) -> Param {
        self.first().other()
    }

    pub fn label(self) -> &'static str {
        match self {
            Ordering::ThetaFirst => "theta-first",
            Ordering::GammaFirst => "gamma-first",
        }
    }

    pub const BOTH: [Ordering; 2] = [Ordering::GammaFirst, Ordering::ThetaFirst];
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Ordering {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theta-first" => Ok(Ordering::ThetaFirst),
            "gamma-first" => Ok(Ordering::GammaFirst),
            other => Err(format!("unknown ordering `{other}` (expected theta-first or gamma-first)")),
        }
    }
}

/// Symmetric 2×2 real matrix tagged with the parameter occupying index 1.
///
/// Used for quantum and classical Fisher information, Van Trees matrices and
/// the covariance bounds derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
    pub first: Param,
}

impl InfoMatrix {
    /// Matrix in the natural `(θ, γ)` order.
    pub fn new(m11: f64, m12: f64, m22: f64) -> Self {
        InfoMatrix { m11, m12, m22, first: Param::Theta }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, b)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn frobenius(&self) -> f64 {
        (self.m11 * self.m11 + 2.0 * self.m12 * self.m12 + self.m22 * self.m22).sqrt()
    }

    /// Entry for the pair `(a, b)` regardless of the storage order.
    pub fn get(&self, a: Param, b: Param) -> f64 {
        if a != b {
            self.m12
        } else if a == self.first {
            self.m11
        } else {
            self.m22
        }
    }

    /// Same matrix with `first` at index 1.
    pub fn with_first(&self, first: Param) -> Self {
        if first == self.first {
            *self
        } else {
            InfoMatrix { m11: self.m22, m12: self.m12, m22: self.m11, first }
        }
    }

    /// Same matrix relabelled into the order an [`Ordering`] estimates in.
    pub fn ordered(&self, ordering: Ordering) -> Self {
        self.with_first(ordering.first())
    }

    pub fn scale(&self, s: f64) -> Self {
        InfoMatrix { m11: self.m11 * s, m12: self.m12 * s, m22: self.m22 * s, first: self.first }
    }

    pub fn add(&self, other: &InfoMatrix) -> Self {
        let o = other.with_first(self.first);
        InfoMatrix {
            m11: self.m11 + o.m11,
            m12: self.m12 + o.m12,
            m22: self.m22 + o.m22,
            first: self.first,
        }
    }

    /// Plain inverse via the adjugate; no singularity check.
    pub fn inverse_unchecked(&self) -> Self {
        let d = self.det();
        InfoMatrix { m11: self.m22 / d, m12: -self.m12 / d, m22: self.m11 / d, first: self.first }
    }

    /// Eigenvalues in ascending order with unit eigenvectors.
    pub fn eigen(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let mean = 0.5 * (self.m11 + self.m22);
        let half_diff = 0.5 * (self.m11 - self.m22);
        let radius = half_diff.hypot(self.m12);
        let lo = mean - radius;
        let hi = mean + radius;
        if self.m12 == 0.0 {
            return if self.m11 <= self.m22 {
                ([self.m11, self.m22], [[1.0, 0.0], [0.0, 1.0]])
            } else {
                ([self.m22, self.m11], [[0.0, 1.0], [1.0, 0.0]])
            };
        }
        // (hi - m22, m12) and (lo - m22, m12) are eigenvectors; pick the better
        // conditioned form for the larger one and take the orthogonal partner.
        let v_hi = if half_diff >= 0.0 {
            [half_diff + radius, self.m12]
        } else {
            [self.m12, radius - half_diff]
        };
        let n = v_hi[0].hypot(v_hi[1]);
        let v_hi = [v_hi[0] / n, v_hi[1] / n];
        let v_lo = [-v_hi[1], v_hi[0]];
        ([lo, hi], [v_lo, v_hi])
    }

    /// `self · other` as a plain 2×2 array (not necessarily symmetric).
    pub fn matmul(&self, other: &InfoMatrix) -> [[f64; 2]; 2] {
        let a = self.as_array();
        let b = other.with_first(self.first).as_array();
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.m11, self.m12], [self.m12, self.m22]]
    }

    pub fn max_abs_diff(&self, other: &InfoMatrix) -> f64 {
        let o = other.with_first(self.first);
        (self.m11 - o.m11)
            .abs()
            .max((self.m12 - o.m12).abs())
            .max((self.m22 - o.m22).abs())
    }
}
