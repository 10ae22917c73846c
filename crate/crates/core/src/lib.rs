//! Partial information decompositions of discrete trivariate systems.
//!
//! A system is a joint distribution over an output `Y` and two inputs, a
//! driving input `B` and a contextual input `A`. The crate builds such
//! distributions from trial recordings or simulation grids, computes the
//! classical Shannon measures, and splits `I(Y; B, A)` into unique, shared and
//! synergistic parts with five methods:
//!
//! | method   | module        | free quantity                                   |
//! |----------|---------------|-------------------------------------------------|
//! | `Ibroja` | [`broja`]     | uniques from a constrained minimization          |
//! | `Idep`   | [`dep`]       | uniques from the dependency-constraint lattice   |
//! | `Iccs`   | [`pointwise`] | shared from local co-information                 |
//! | `Ipm`    | [`pointwise`] | shared from specificity and ambiguity            |
//! | `Isx`    | [`pointwise`] | shared from shared exclusions                    |
//!
//! ```
//! use pidcmp::{canonical, decompose, Method};
//!
//! let c = decompose(&canonical::xor(), Method::Ipm).unwrap();
//! assert!((c.syn - 1.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod broja;
pub mod canonical;
pub mod dep;
pub mod dist;
pub mod error;
pub mod info;
pub mod ingest;
pub mod pid;
pub mod pointwise;
pub mod report;
pub mod stats;
mod support;
pub mod synthetic;

pub use dist::{Alphabet, JointDistribution, Var};
pub use error::{Error, Result};
pub use info::InfoSummary;
pub use pid::{Component, Method, PidComponents};

/// Runs one method with default settings.
pub fn decompose(dist: &JointDistribution, method: Method) -> Result<PidComponents> {
    match method {
        Method::Ibroja => broja::pid_broja(dist),
        Method::Idep => dep::pid_dep(dist),
        Method::Iccs => Ok(pointwise::pid_ccs_with(dist, &dep::MaxentConfig::default(), false)?.0),
        Method::Ipm => Ok(pointwise::pid_pm_with(dist, false)?.0),
        Method::Isx => Ok(pointwise::pid_sx_with(dist, false)?.0),
    }
}

/// Pointwise ledger for the three local methods; `None` for the others.
pub fn ledger(
    dist: &JointDistribution,
    method: Method,
) -> Result<Option<pointwise::PointwiseLedger>> {
    Ok(match method {
        Method::Iccs => pointwise::pid_ccs(dist)?.1,
        Method::Ipm => pointwise::pid_pm(dist)?.1,
        Method::Isx => pointwise::pid_sx(dist)?.1,
        Method::Ibroja | Method::Idep => None,
    })
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/framework.md")]
    mod framework {}
    #[doc = include_str!("../../../book/src/broja.md")]
    mod broja {}
    #[doc = include_str!("../../../book/src/dep.md")]
    mod dep {}
    #[doc = include_str!("../../../book/src/pointwise.md")]
    mod pointwise {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/analyses.md")]
    mod analyses {}
}
