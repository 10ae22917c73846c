//! Shannon measures in bits, plus local (pointwise) mutual information.
//!
//! Zero-probability cells contribute nothing to any sum. Measures that must
//! be non-negative are snapped to zero when rounding leaves them within
//! [`ROUNDING_ALLOWANCE`] below zero; anything more negative is reported as an
//! internal-consistency error rather than hidden.

use serde::{Deserialize, Serialize};

use crate::dist::{JointDistribution, Var};
use crate::error::{Error, Result};

pub const ROUNDING_ALLOWANCE: f64 = 1e-12;

/// Shannon entropy in bits of any probability table.
pub fn entropy(pmf: &[f64]) -> f64 {
    -pmf.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

pub(crate) fn non_negative(measure: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -ROUNDING_ALLOWANCE {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency { measure, value })
    }
}

fn distinct(vars: &[Var]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::RepeatedVariable(*v));
        }
    }
    Ok(())
}

fn h(dist: &JointDistribution, vars: &[Var]) -> Result<f64> {
    if vars.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy(dist.marginal(vars)?.pmf()))
}

/// `I(X1; X2)` for two distinct variables.
pub fn mutual_information(dist: &JointDistribution, x1: Var, x2: Var) -> Result<f64> {
    distinct(&[x1, x2])?;
    let value = h(dist, &[x1])? + h(dist, &[x2])? - h(dist, &[x1, x2])?;
    non_negative("mutual information", value)
}

/// `I(X1; X2 | X3)` for three distinct variables.
pub fn conditional_mi(dist: &JointDistribution, x1: Var, x2: Var, given: Var) -> Result<f64> {
    distinct(&[x1, x2, given])?;
    let value = h(dist, &[x1, given])? + h(dist, &[x2, given])?
        - h(dist, &[given])?
        - h(dist, &[x1, x2, given])?;
    non_negative("conditional mutual information", value)
}

/// `I(Y; B, A)`.
pub fn joint_mi(dist: &JointDistribution) -> Result<f64> {
    let value = h(dist, &[Var::Y])? + h(dist, &[Var::B, Var::A])? - entropy(dist.pmf());
    non_negative("joint mutual information", value)
}

/// `I(Y; B, A) - I(Y; B) - I(Y; A)`; either sign is possible.
pub fn interaction_information(dist: &JointDistribution) -> Result<f64> {
    Ok(summarize(dist)?.ii)
}

/// A local mutual-information value attached to one realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTerm {
    pub realization: (usize, usize, usize),
    pub probability: f64,
    pub local_value: f64,
}

/// `i(u; v) = log2 p(u | v) / p(u)` at `realization = (y, b, a)`, where `u`
/// and `v` are disjoint groups of variables. `probability` is the joint
/// probability of the full realization, so summing `probability *
/// local_value` over the support reproduces `I(U; V)`.
pub fn local_mi(
    dist: &JointDistribution,
    u: &[Var],
    v: &[Var],
    realization: (usize, usize, usize),
) -> Result<LocalTerm> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptySubset);
    }
    let all: Vec<Var> = u.iter().chain(v).copied().collect();
    distinct(&all)?;
    let (y, b, a) = realization;
    let probability = dist.p(y, b, a);
    if probability <= 0.0 {
        return Err(Error::ZeroProbabilityRealization);
    }
    let coords = [y, b, a];
    let prob_of = |vars: &[Var]| -> Result<f64> {
        let m = dist.marginal(vars)?;
        let idx = vars
            .iter()
            .zip(m.shape())
            .fold(0, |acc, (var, &n)| acc * n + coords[var.axis()]);
        Ok(m.pmf()[idx])
    };
    let p_uv = prob_of(&all)?;
    let p_u = prob_of(u)?;
    let p_v = prob_of(v)?;
    Ok(LocalTerm {
        realization,
        probability,
        local_value: (p_uv / (p_u * p_v)).log2(),
    })
}

/// Local terms for every realization in the support, in table order.
pub fn local_terms(dist: &JointDistribution, u: &[Var], v: &[Var]) -> Result<Vec<LocalTerm>> {
    dist.cells()
        .filter(|&(_, p)| p > 0.0)
        .map(|(r, _)| local_mi(dist, u, v, r))
        .collect()
}

/// The classical measures of a trivariate system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoSummary {
    pub h_y: f64,
    pub mi_yb: f64,
    pub mi_ya: f64,
    pub cmi_yb_given_a: f64,
    pub cmi_ya_given_b: f64,
    pub jmi: f64,
    pub ii: f64,
    pub normalized: bool,
}

impl InfoSummary {
    /// `I(Y;B) - I(Y;A)`, the method-independent difference of the uniques.
    pub fn uia(&self) -> f64 {
        self.mi_yb - self.mi_ya
    }
}

/// The seven entropies needed for every classical measure.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entropies {
    pub y: f64,
    pub b: f64,
    pub a: f64,
    pub yb: f64,
    pub ya: f64,
    pub ba: f64,
    pub yba: f64,
}

impl Entropies {
    pub fn of(dist: &JointDistribution) -> Self {
        let yb = dist.table_yb();
        let ya = dist.table_ya();
        let ba = dist.table_ba();
        let [ny, nb, na] = dist.shape();
        let mut py = vec![0.0; ny];
        let mut pb = vec![0.0; nb];
        let mut pa = vec![0.0; na];
        for y in 0..ny {
            for b in 0..nb {
                py[y] += yb[y * nb + b];
                pb[b] += yb[y * nb + b];
            }
        }
        for b in 0..nb {
            for a in 0..na {
                pa[a] += ba[b * na + a];
            }
        }
        Entropies {
            y: entropy(&py),
            b: entropy(&pb),
            a: entropy(&pa),
            yb: entropy(&yb),
            ya: entropy(&ya),
            ba: entropy(&ba),
            yba: entropy(dist.pmf()),
        }
    }

    pub fn jmi(&self) -> f64 {
        self.y + self.ba - self.yba
    }
}

pub fn summarize(dist: &JointDistribution) -> Result<InfoSummary> {
    let e = Entropies::of(dist);
    let jmi = non_negative("I(Y;B,A)", e.jmi())?;
    let mi_yb = non_negative("I(Y;B)", e.y + e.b - e.yb)?;
    let mi_ya = non_negative("I(Y;A)", e.y + e.a - e.ya)?;
    let cmi_yb_given_a = non_negative("I(Y;B|A)", e.ya + e.ba - e.a - e.yba)?;
    let cmi_ya_given_b = non_negative("I(Y;A|B)", e.yb + e.ba - e.b - e.yba)?;
    Ok(InfoSummary {
        h_y: non_negative("H(Y)", e.y)?,
        mi_yb,
        mi_ya,
        cmi_yb_given_a,
        cmi_ya_given_b,
        jmi,
        ii: jmi - mi_yb - mi_ya,
        normalized: false,
    })
}

/// Divides every measure by the joint mutual information.
pub fn normalize_summary(s: &InfoSummary) -> Result<InfoSummary> {
    if s.normalized {
        return Err(Error::AlreadyNormalized);
    }
    if !(s.jmi > 0.0) {
        return Err(Error::NotNormalizable);
    }
    let n = |x: f64| x / s.jmi;
    Ok(InfoSummary {
        h_y: n(s.h_y),
        mi_yb: n(s.mi_yb),
        mi_ya: n(s.mi_ya),
        cmi_yb_given_a: n(s.cmi_yb_given_a),
        cmi_ya_given_b: n(s.cmi_ya_given_b),
        jmi: 1.0,
        ii: n(s.ii),
        normalized: true,
    })
}
