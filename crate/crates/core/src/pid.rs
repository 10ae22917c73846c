//! The four-part decomposition of `I(Y; B, A)` and the identities tying it to
//! the classical measures:
//!
//! ```text
//! I(Y;B)   = UnqB + Shd        I(Y;B|A) = UnqB + Syn
//! I(Y;A)   = UnqA + Shd        I(Y;A|B) = UnqA + Syn
//! ```
//!
//! Every method supplies a single free quantity (the shared information, or
//! the pair of unique informations) and the remaining components are closed
//! through these identities, so they hold by construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::info::{self, InfoSummary};

/// Closure tolerance for methods computed in closed form.
pub const POINTWISE_TOLERANCE: f64 = 1e-9;
/// Closure tolerance for methods that rely on an iterative fit or solver.
pub const OPTIMIZER_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ibroja,
    Idep,
    Iccs,
    Ipm,
    Isx,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ibroja,
        Method::Idep,
        Method::Iccs,
        Method::Ipm,
        Method::Isx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ibroja => "ibroja",
            Method::Idep => "idep",
            Method::Iccs => "iccs",
            Method::Ipm => "ipm",
            Method::Isx => "isx",
        }
    }

    /// Default closure tolerance in bits.
    pub fn tolerance(self) -> f64 {
        match self {
            Method::Ibroja | Method::Idep | Method::Iccs => OPTIMIZER_TOLERANCE,
            Method::Ipm | Method::Isx => POINTWISE_TOLERANCE,
        }
    }

    /// Whether the method guarantees non-negative components.
    pub fn is_nonnegative(self) -> bool {
        matches!(self, Method::Ibroja | Method::Idep)
    }

    /// Parses a comma-separated list; `all` selects every method.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if tok.eq_ignore_ascii_case("all") {
                return Ok(Method::ALL.to_vec());
            }
            let m: Method = tok.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no PID method selected".into()));
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix('i').unwrap_or(&t);
        match t {
            "broja" => Ok(Method::Ibroja),
            "dep" => Ok(Method::Idep),
            "ccs" => Ok(Method::Iccs),
            "pm" => Ok(Method::Ipm),
            "sx" => Ok(Method::Isx),
            _ => Err(Error::InvalidArgument(format!("unknown PID method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    UnqB,
    UnqA,
    Shd,
    Syn,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::UnqB,
        Component::UnqA,
        Component::Shd,
        Component::Syn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::UnqB => "unq_b",
            Component::UnqA => "unq_a",
            Component::Shd => "shd",
            Component::Syn => "syn",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidComponents {
    pub unq_b: f64,
    pub unq_a: f64,
    pub shd: f64,
    pub syn: f64,
    pub method: Method,
    pub normalized: bool,
}

impl PidComponents {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::UnqB => self.unq_b,
            Component::UnqA => self.unq_a,
            Component::Shd => self.shd,
            Component::Syn => self.syn,
        }
    }

    pub fn total(&self) -> f64 {
        self.unq_b + self.unq_a + self.shd + self.syn
    }

    /// `UnqB - UnqA`.
    pub fn uia(&self) -> f64 {
        self.unq_b - self.unq_a
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.unq_b, self.unq_a, self.shd, self.syn]
    }
}

/// Closes a decomposition from its shared information.
pub fn from_shared(s: &InfoSummary, shd: f64, method: Method) -> PidComponents {
    let unq_b = s.mi_yb - shd;
    let unq_a = s.mi_ya - shd;
    PidComponents {
        unq_b,
        unq_a,
        shd,
        syn: s.cmi_yb_given_a - unq_b,
        method,
        normalized: s.normalized,
    }
}

/// Closes a decomposition from its two unique informations, checking that
/// they differ by exactly `I(Y;B) - I(Y;A)` within `tolerance`.
pub fn from_uniques(
    s: &InfoSummary,
    unq_b: f64,
    unq_a: f64,
    method: Method,
    tolerance: f64,
) -> Result<PidComponents> {
    let shd = s.mi_yb - unq_b;
    let residual = (s.mi_ya - shd) - unq_a;
    if residual.abs() > tolerance {
        return Err(Error::InconsistentUniques {
            unq_b,
            unq_a,
            residual,
        });
    }
    Ok(PidComponents {
        unq_b,
        unq_a,
        shd,
        syn: s.cmi_yb_given_a - unq_b,
        method,
        normalized: s.normalized,
    })
}

/// Expresses each component as a fraction of the joint mutual information.
/// No clamping: pointwise methods can legitimately exceed one.
pub fn normalize_components(c: &PidComponents, jmi: f64) -> Result<PidComponents> {
    if c.normalized {
        return Err(Error::AlreadyNormalized);
    }
    if !(jmi > 0.0) {
        return Err(Error::NotNormalizable);
    }
    Ok(PidComponents {
        unq_b: c.unq_b / jmi,
        unq_a: c.unq_a / jmi,
        shd: c.shd / jmi,
        syn: c.syn / jmi,
        method: c.method,
        normalized: true,
    })
}

/// `I(Y;B) - I(Y;A)`, equal to `UnqB - UnqA` under every method.
pub fn unique_info_asymmetry(dist: &JointDistribution) -> Result<f64> {
    Ok(info::summarize(dist)?.uia())
}

/// Signed residuals `lhs - rhs` of the four linking identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `I(Y;B) - (UnqB + Shd)`
    pub mi_yb: f64,
    /// `I(Y;A) - (UnqA + Shd)`
    pub mi_ya: f64,
    /// `I(Y;B|A) - (UnqB + Syn)`
    pub cmi_yb_given_a: f64,
    /// `I(Y;A|B) - (UnqA + Syn)`
    pub cmi_ya_given_b: f64,
}

impl Residuals {
    pub fn max_abs(&self) -> f64 {
        [
            self.mi_yb,
            self.mi_ya,
            self.cmi_yb_given_a,
            self.cmi_ya_given_b,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

pub fn consistency_residuals(c: &PidComponents, s: &InfoSummary) -> Residuals {
    Residuals {
        mi_yb: s.mi_yb - (c.unq_b + c.shd),
        mi_ya: s.mi_ya - (c.unq_a + c.shd),
        cmi_yb_given_a: s.cmi_yb_given_a - (c.unq_b + c.syn),
        cmi_ya_given_b: s.cmi_ya_given_b - (c.unq_a + c.syn),
    }
}

/// For methods with non-negative components, a positive interaction
/// information bounds the synergy from below.
pub fn synergy_lower_bound(s: &InfoSummary) -> Option<f64> {
    (s.ii > 0.0).then_some(s.ii)
}
