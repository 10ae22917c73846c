use thiserror::Error;

use crate::broja::SolverReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table has {found} entries but the alphabets require {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("all weights are zero")]
    ZeroMass,

    #[error("weight {value} at flat index {index} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },

    #[error("alphabet label {0:?} appears more than once")]
    DuplicateLabel(String),

    #[error("alphabet must contain at least one label")]
    EmptyAlphabet,

    #[error("variable subset must be non-empty")]
    EmptySubset,

    #[error("variable {0} requested more than once")]
    RepeatedVariable(crate::dist::Var),

    #[error("cannot form {bins} bins from {distinct} distinct values")]
    UnachievableBinning { distinct: usize, bins: usize },

    #[error("bin count must be at least 2, got {0}")]
    TooFewBins(usize),

    #[error("spike count {0} lies outside every output category")]
    CountOutsideCategories(u64),

    #[error("invalid output categories: {0}")]
    InvalidCategories(String),

    #[error("no records to ingest: {0}")]
    EmptyInput(&'static str),

    #[error("value {value} in field {field} is not finite")]
    NonFinite { field: &'static str, value: f64 },

    #[error("grid cell (basal {basal}, apical {apical}) appears more than once")]
    DuplicateGridCell { basal: u32, apical: u32 },

    #[error("range {lo}-{hi} is not aligned to the grid step {step}")]
    MisalignedRange { lo: u32, hi: u32, step: u32 },

    #[error("no grid records fall inside basal {basal:?} and apical {apical:?}")]
    EmptyRange { basal: (u32, u32), apical: (u32, u32) },

    #[error("the two conditions share no stimulus combinations")]
    EmptySupportIntersection,

    #[error("realization has zero probability")]
    ZeroProbabilityRealization,

    #[error("joint mutual information is zero; the system cannot be normalized")]
    NotNormalizable,

    #[error("{measure} evaluated to {value}, below the rounding allowance")]
    InternalConsistency { measure: &'static str, value: f64 },

    #[error("unique pair ({unq_b}, {unq_a}) disagrees with I(Y;B) - I(Y;A) by {residual}")]
    InconsistentUniques {
        unq_b: f64,
        unq_a: f64,
        residual: f64,
    },

    #[error("components are already normalized")]
    AlreadyNormalized,

    #[error("BROJA solver did not converge: {0:?}")]
    SolverDidNotConverge(Box<SolverReport>),

    #[error("maximum-entropy fit did not converge after {sweeps} sweeps (deviation {deviation:e})")]
    MaxentDidNotConverge { sweeps: usize, deviation: f64 },

    #[error("support search failed: {0}")]
    SupportSearch(String),

    #[error("invalid constraint set: {0}")]
    InvalidConstraintSet(String),

    #[error("no test possible: all differences are zero")]
    NoTestPossible,

    #[error("exact enumeration supports at most {max} non-zero differences, got {n}")]
    TooManyForEnumeration { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
