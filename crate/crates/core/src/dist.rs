//! Finite trivariate joint distributions over `(Y, B, A)`.
//!
//! `Y` is the output, `B` the basal (driving) input and `A` the apical
//! (contextual) input. Tables are dense and row-major in that order, so the
//! flat index of `(y, b, a)` is `(y * |B| + b) * |A| + a`. Zero cells are
//! stored explicitly.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three variables of a trivariate system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Y,
    B,
    A,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::Y, Var::B, Var::A];

    pub fn axis(self) -> usize {
        match self {
            Var::Y => 0,
            Var::B => 1,
            Var::A => 2,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Var::Y => "Y",
            Var::B => "B",
            Var::A => "A",
        };
        f.write_str(s)
    }
}

/// Ordered set of distinct symbolic values taken by one variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Alphabet { labels })
    }

    /// Labels `"0"`, `"1"`, ..., `"n-1"`.
    pub fn indexed(n: usize) -> Result<Self> {
        Alphabet::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Normalized probability table over `(Y, B, A)`.
///
/// Immutable once built: every constructor validates the weights and divides
/// by their sum, so entries are non-negative and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    alphabets: [Alphabet; 3],
    pmf: Vec<f64>,
}

impl JointDistribution {
    /// Normalizes a table of non-negative weights laid out in `(Y, B, A)`
    /// row-major order.
    pub fn new(
        alpha_y: Alphabet,
        alpha_b: Alphabet,
        alpha_a: Alphabet,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let expected = alpha_y.len() * alpha_b.len() * alpha_a.len();
        if weights.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: weights.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let pmf = weights.into_iter().map(|w| w / total).collect();
        Ok(JointDistribution {
            alphabets: [alpha_y, alpha_b, alpha_a],
            pmf,
        })
    }

    /// Builds a distribution with integer-indexed alphabets of the given shape.
    pub fn from_weights(shape: [usize; 3], weights: Vec<f64>) -> Result<Self> {
        JointDistribution::new(
            Alphabet::indexed(shape[0])?,
            Alphabet::indexed(shape[1])?,
            Alphabet::indexed(shape[2])?,
            weights,
        )
    }

    /// A table over the same alphabets with new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        let [y, b, a] = self.alphabets.clone();
        JointDistribution::new(y, b, a, weights)
    }

    pub fn shape(&self) -> [usize; 3] {
        [
            self.alphabets[0].len(),
            self.alphabets[1].len(),
            self.alphabets[2].len(),
        ]
    }

    pub fn alphabet(&self, var: Var) -> &Alphabet {
        &self.alphabets[var.axis()]
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    #[inline]
    pub fn index(&self, y: usize, b: usize, a: usize) -> usize {
        let [_, nb, na] = self.shape();
        (y * nb + b) * na + a
    }

    #[inline]
    pub fn p(&self, y: usize, b: usize, a: usize) -> f64 {
        self.pmf[self.index(y, b, a)]
    }

    /// Iterates over `((y, b, a), p)` for every cell, zero cells included.
    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        let [_, nb, na] = self.shape();
        self.pmf.iter().enumerate().map(move |(i, &p)| {
            let a = i % na;
            let b = (i / na) % nb;
            let y = i / (na * nb);
            ((y, b, a), p)
        })
    }

    /// Sums out every variable not in `keep`. The result's axes follow the
    /// order of `keep`.
    pub fn marginal(&self, keep: &[Var]) -> Result<Marginal> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        for (i, v) in keep.iter().enumerate() {
            if keep[..i].contains(v) {
                return Err(Error::RepeatedVariable(*v));
            }
        }
        let full = self.shape();
        let shape: Vec<usize> = keep.iter().map(|v| full[v.axis()]).collect();
        let mut pmf = vec![0.0; shape.iter().product()];
        for ((y, b, a), p) in self.cells() {
            if p == 0.0 {
                continue;
            }
            let coords = [y, b, a];
            let mut idx = 0;
            for (v, &n) in keep.iter().zip(&shape) {
                idx = idx * n + coords[v.axis()];
            }
            pmf[idx] += p;
        }
        Ok(Marginal {
            vars: keep.to_vec(),
            shape,
            pmf,
        })
    }

    /// Two-way `(Y, B)` table, row-major in `y`.
    pub(crate) fn table_yb(&self) -> Vec<f64> {
        let [ny, nb, na] = self.shape();
        let mut out = vec![0.0; ny * nb];
        for y in 0..ny {
            for b in 0..nb {
                let base = (y * nb + b) * na;
                out[y * nb + b] = self.pmf[base..base + na].iter().sum();
            }
        }
        out
    }

    /// Two-way `(Y, A)` table, row-major in `y`.
    pub(crate) fn table_ya(&self) -> Vec<f64> {
        let [ny, nb, na] = self.shape();
        let mut out = vec![0.0; ny * na];
        for y in 0..ny {
            for b in 0..nb {
                let base = (y * nb + b) * na;
                for a in 0..na {
                    out[y * na + a] += self.pmf[base + a];
                }
            }
        }
        out
    }

    /// Two-way `(B, A)` table, row-major in `b`.
    pub(crate) fn table_ba(&self) -> Vec<f64> {
        let [ny, nb, na] = self.shape();
        let mut out = vec![0.0; nb * na];
        for y in 0..ny {
            let base = y * nb * na;
            for (o, p) in out.iter_mut().zip(&self.pmf[base..base + nb * na]) {
                *o += p;
            }
        }
        out
    }
}

/// Lower-arity distribution produced by [`JointDistribution::marginal`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marginal {
    vars: Vec<Var>,
    shape: Vec<usize>,
    pmf: Vec<f64>,
}

impl Marginal {
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }
}
