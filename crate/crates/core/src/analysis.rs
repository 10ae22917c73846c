//! The three batch analyses: paired condition comparison over recorded units,
//! sweeps over sub-ranges of a simulated input grid, and classification of
//! grid cells against the cooperative context-sensitivity properties.
//!
//! Units and cells are processed in parallel; results are assembled in a
//! fixed order (units by id, cells by the order of the requested ranges) so
//! reports are reproducible byte for byte.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dep::MaxentConfig;
use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::info::{self, InfoSummary};
use crate::ingest::{
    self, BinningConfig, Condition, GridRecord, LevelRange, OutputCategories, TrialRecord,
};
use crate::pid::{self, Component, Method, PidComponents};
use crate::pointwise::{self, PointwiseLedger};
use crate::stats::{self, Quartiles, WilcoxonResult};
use crate::{broja, dep};

/// Runs one method, keeping the pointwise ledger when asked for and
/// available.
pub fn run_method(
    dist: &JointDistribution,
    method: Method,
    want_ledger: bool,
) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    match method {
        Method::Ibroja => Ok((broja::pid_broja(dist)?, None)),
        Method::Idep => Ok((dep::pid_dep(dist)?, None)),
        Method::Iccs => pointwise::pid_ccs_with(dist, &MaxentConfig::default(), want_ledger),
        Method::Ipm => pointwise::pid_pm_with(dist, want_ledger),
        Method::Isx => pointwise::pid_sx_with(dist, want_ledger),
    }
}

/// Measures and decompositions of one distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposed {
    pub summary: InfoSummary,
    pub normalized_summary: InfoSummary,
    /// One entry per requested method, in request order, as fractions of
    /// the joint mutual information.
    pub pids: Vec<PidComponents>,
    #[serde(skip)]
    pub ledgers: Vec<PointwiseLedger>,
}

impl Decomposed {
    pub fn of(dist: &JointDistribution, methods: &[Method], want_ledger: bool) -> Result<Self> {
        let summary = info::summarize(dist)?;
        let normalized_summary = info::normalize_summary(&summary)?;
        let mut pids = Vec::with_capacity(methods.len());
        let mut ledgers = Vec::new();
        for &m in methods {
            let (c, l) = run_method(dist, m, want_ledger)?;
            pids.push(pid::normalize_components(&c, summary.jmi)?);
            ledgers.extend(l);
        }
        Ok(Decomposed {
            summary,
            normalized_summary,
            pids,
            ledgers,
        })
    }

    pub fn pid(&self, method: Method) -> Option<&PidComponents> {
        self.pids.iter().find(|c| c.method == method)
    }
}

/// A per-unit or per-cell problem that did not stop the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub subject: String,
    pub message: String,
}

// ---------------------------------------------------------------------------
// Condition comparison
// ---------------------------------------------------------------------------

/// A named group of tests corrected together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// The unique information asymmetry under each condition and their
    /// difference: three tests.
    Uia,
    /// The four component differences of one method: four tests per method.
    Components,
}

impl Family {
    pub fn size(self) -> usize {
        match self {
            Family::Uia => 3,
            Family::Components => Component::ALL.len(),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Uia => "uia",
            Family::Components => "components",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uia" => Ok(Family::Uia),
            "components" => Ok(Family::Components),
            other => Err(Error::InvalidArgument(format!("unknown test family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionsConfig {
    pub binning: BinningConfig,
    pub methods: Vec<Method>,
    /// Drop stimulus combinations that produced no spikes before binning.
    pub omit_silent: bool,
    /// Families whose tests are Bonferroni-corrected.
    pub families: Vec<Family>,
}

impl ConditionsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("at least one method is required".into()));
        }
        Ok(())
    }
}

/// One unit under one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionBlock {
    pub condition: Condition,
    pub n_records: usize,
    #[serde(flatten)]
    pub decomposed: Decomposed,
    /// Unique information asymmetry as a fraction of the joint mutual
    /// information.
    pub uia: f64,
}

/// Treatment minus control for one method, in fractions of the joint mutual
/// information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentDifference {
    pub method: Method,
    pub unq_b: f64,
    pub unq_a: f64,
    pub shd: f64,
    pub syn: f64,
}

impl ComponentDifference {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::UnqB => self.unq_b,
            Component::UnqA => self.unq_a,
            Component::Shd => self.shd,
            Component::Syn => self.syn,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitReport {
    pub unit: String,
    pub control: ConditionBlock,
    pub treatment: ConditionBlock,
    pub differences: Vec<ComponentDifference>,
    pub uia_difference: f64,
}

impl UnitReport {
    pub fn block(&self, c: Condition) -> &ConditionBlock {
        match c {
            Condition::Control => &self.control,
            Condition::Treatment => &self.treatment,
        }
    }
}

/// A signed-rank test of zero median with its correction, or the reason no
/// test was possible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub wilcoxon: Option<WilcoxonResult>,
    pub error: Option<String>,
    pub family: Option<Family>,
    pub family_size: Option<usize>,
    pub p_corrected: Option<f64>,
}

impl TestOutcome {
    fn run(values: &[f64], family: Option<Family>) -> Result<Self> {
        let family_size = family.map(Family::size);
        match stats::wilcoxon_exact(values) {
            Ok(w) => Ok(TestOutcome {
                p_corrected: family_size.map(|m| stats::bonferroni(w.p_value, m)).transpose()?,
                wilcoxon: Some(w),
                error: None,
                family,
                family_size,
            }),
            Err(e @ (Error::NoTestPossible | Error::TooManyForEnumeration { .. })) => {
                Ok(TestOutcome {
                    wilcoxon: None,
                    error: Some(e.to_string()),
                    family,
                    family_size,
                    p_corrected: None,
                })
            }
            Err(e) => Err(e),
        }
    }
}

/// Across-unit summary and test of one component difference of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentTest {
    pub method: Method,
    pub component: Component,
    pub n_units: usize,
    pub control: Quartiles,
    pub treatment: Quartiles,
    pub difference: Quartiles,
    pub test: TestOutcome,
}

/// Which per-unit UIA sample a test is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UiaSample {
    Control,
    Treatment,
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiaTest {
    pub sample: UiaSample,
    pub n_units: usize,
    pub quartiles: Quartiles,
    pub test: TestOutcome,
}

/// Conventions the statistics depend on, recorded with every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub zero_differences: String,
    pub ties: String,
    pub quantiles: String,
    pub units: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            zero_differences: "dropped before ranking".into(),
            ties: "mid-ranks, exact null over all sign assignments".into(),
            quantiles: "linear interpolation of order statistics (type 7)".into(),
            units: "fractions of the joint mutual information".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub config: ConditionsConfig,
    pub conventions: Conventions,
    pub units: Vec<UnitReport>,
    pub component_tests: Vec<ComponentTest>,
    pub uia_tests: Vec<UiaTest>,
    pub warnings: Vec<Warning>,
}

fn condition_block(
    condition: Condition,
    records: &[TrialRecord],
    cfg: &ConditionsConfig,
    want_ledger: bool,
) -> Result<ConditionBlock> {
    let dist = ingest::ingest_trials(records, &cfg.binning)?;
    let decomposed = Decomposed::of(&dist, &cfg.methods, want_ledger)?;
    let uia = decomposed.normalized_summary.uia();
    Ok(ConditionBlock {
        condition,
        n_records: records.len(),
        decomposed,
        uia,
    })
}

fn unit_report(
    unit: &str,
    control: &[TrialRecord],
    treatment: &[TrialRecord],
    cfg: &ConditionsConfig,
    want_ledger: bool,
) -> Result<UnitReport> {
    let (control, treatment) = if cfg.omit_silent {
        (
            ingest::omit_silent_trials(control),
            ingest::omit_silent_trials(treatment),
        )
    } else {
        (control.to_vec(), treatment.to_vec())
    };
    let (control, treatment) = ingest::match_support(&control, &treatment)?;
    let control = condition_block(Condition::Control, &control, cfg, want_ledger)?;
    let treatment = condition_block(Condition::Treatment, &treatment, cfg, want_ledger)?;
    let differences = control
        .decomposed
        .pids
        .iter()
        .zip(&treatment.decomposed.pids)
        .map(|(c, t)| ComponentDifference {
            method: c.method,
            unq_b: t.unq_b - c.unq_b,
            unq_a: t.unq_a - c.unq_a,
            shd: t.shd - c.shd,
            syn: t.syn - c.syn,
        })
        .collect();
    let uia_difference = treatment.uia - control.uia;
    Ok(UnitReport {
        unit: unit.to_string(),
        control,
        treatment,
        differences,
        uia_difference,
    })
}

/// Groups records by unit and condition, ordered by unit id.
fn group_by_unit(records: &[TrialRecord]) -> BTreeMap<&str, [Vec<TrialRecord>; 2]> {
    let mut units: BTreeMap<&str, [Vec<TrialRecord>; 2]> = BTreeMap::new();
    for r in records {
        let slot = match r.condition {
            Condition::Control => 0,
            Condition::Treatment => 1,
        };
        units.entry(r.unit_id.as_str()).or_default()[slot].push(r.clone());
    }
    units
}

/// Paired comparison of every unit's two conditions.
///
/// Units that lack a condition, or whose distributions cannot be built or
/// decomposed, are skipped with a warning. Tests that cannot be run (all
/// differences zero) are reported with their reason and also raise a
/// warning.
pub fn run_conditions(
    records: &[TrialRecord],
    cfg: &ConditionsConfig,
    want_ledger: bool,
) -> Result<ConditionsReport> {
    cfg.validate()?;
    let grouped: Vec<(&str, [Vec<TrialRecord>; 2])> = group_by_unit(records).into_iter().collect();
    if grouped.is_empty() {
        return Err(Error::EmptyInput("no trial records"));
    }
    let outcomes: Vec<(String, Result<UnitReport>)> = grouped
        .par_iter()
        .map(|(unit, [control, treatment])| {
            let r = if control.is_empty() || treatment.is_empty() {
                Err(Error::EmptyInput("unit lacks one of the two conditions"))
            } else {
                unit_report(unit, control, treatment, cfg, want_ledger)
            };
            (unit.to_string(), r)
        })
        .collect();

    let mut units = Vec::new();
    let mut warnings = Vec::new();
    for (unit, r) in outcomes {
        match r {
            Ok(u) => units.push(u),
            Err(e) => warnings.push(Warning {
                subject: unit,
                message: format!("unit skipped: {e}"),
            }),
        }
    }
    if units.is_empty() {
        return Err(Error::EmptyInput("no unit could be analysed"));
    }

    let family_for = |f: Family| cfg.families.contains(&f).then_some(f);
    let mut component_tests = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        for component in Component::ALL {
            let control: Vec<f64> = units
                .iter()
                .map(|u| u.control.decomposed.pids[mi].get(component))
                .collect();
            let treatment: Vec<f64> = units
                .iter()
                .map(|u| u.treatment.decomposed.pids[mi].get(component))
                .collect();
            let difference: Vec<f64> = units.iter().map(|u| u.differences[mi].get(component)).collect();
            let test = TestOutcome::run(&difference, family_for(Family::Components))?;
            if let Some(e) = &test.error {
                warnings.push(Warning {
                    subject: format!("{method} {component} difference"),
                    message: e.clone(),
                });
            }
            component_tests.push(ComponentTest {
                method,
                component,
                n_units: units.len(),
                control: stats::median_quartiles(&control)?,
                treatment: stats::median_quartiles(&treatment)?,
                difference: stats::median_quartiles(&difference)?,
                test,
            });
        }
    }

    let mut uia_tests = Vec::new();
    for sample in [UiaSample::Control, UiaSample::Treatment, UiaSample::Difference] {
        let values: Vec<f64> = units
            .iter()
            .map(|u| match sample {
                UiaSample::Control => u.control.uia,
                UiaSample::Treatment => u.treatment.uia,
                UiaSample::Difference => u.uia_difference,
            })
            .collect();
        let test = TestOutcome::run(&values, family_for(Family::Uia))?;
        if let Some(e) = &test.error {
            warnings.push(Warning {
                subject: format!("uia {sample:?}").to_lowercase(),
                message: e.clone(),
            });
        }
        uia_tests.push(UiaTest {
            sample,
            n_units: units.len(),
            quartiles: stats::median_quartiles(&values)?,
            test,
        });
    }

    Ok(ConditionsReport {
        config: cfg.clone(),
        conventions: Conventions::default(),
        units,
        component_tests,
        uia_tests,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Grid sweeps
// ---------------------------------------------------------------------------

fn default_normalize() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub basal_ranges: Vec<LevelRange>,
    pub apical_ranges: Vec<LevelRange>,
    pub output_categories: OutputCategories,
    pub methods: Vec<Method>,
    /// Report components as fractions of each cell's joint mutual
    /// information rather than in bits.
    #[serde(default = "default_normalize")]
    pub normalize: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.basal_ranges.is_empty() || self.apical_ranges.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one range of each input".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("at least one method is required".into()));
        }
        Ok(())
    }

    fn binning(&self) -> BinningConfig {
        // Grid inputs are used level by level; only the output categories
        // matter.
        BinningConfig {
            n_input_bins: 2,
            output_categories: self.output_categories.clone(),
        }
    }
}

/// Methods' UIA values in one cell and whether they agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiaCheck {
    /// Largest minus smallest UIA over the methods, in bits.
    pub spread: f64,
    /// Loosest tolerance among the methods run.
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub basal_range: LevelRange,
    pub apical_range: LevelRange,
    pub n_records: usize,
    pub summary: InfoSummary,
    pub normalized_summary: InfoSummary,
    /// In request order; normalized when the spec asks for it, else bits.
    pub pids: Vec<PidComponents>,
    /// `I(Y;B) - I(Y;A)` in bits.
    pub uia: f64,
    pub uia_check: UiaCheck,
    #[serde(skip)]
    pub ledgers: Vec<PointwiseLedger>,
}

/// A change of UIA sign between neighbouring basal ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChange {
    pub apical_range: LevelRange,
    pub from_basal: LevelRange,
    pub to_basal: LevelRange,
    pub from_uia: f64,
    pub to_uia: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub cells: Vec<SweepCell>,
    /// Sign changes of UIA along the basal ranges, in the order given, for
    /// each apical range.
    pub bifurcations: Vec<SignChange>,
    pub warnings: Vec<Warning>,
}

impl SweepReport {
    pub fn cell(&self, basal: LevelRange, apical: LevelRange) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.basal_range == basal && c.apical_range == apical)
    }
}

/// UIA values closer to zero than this have no sign.
pub const UIA_ZERO: f64 = 1e-12;

fn sign(x: f64) -> i8 {
    if x > UIA_ZERO {
        1
    } else if x < -UIA_ZERO {
        -1
    } else {
        0
    }
}

fn sweep_cell(
    records: &[GridRecord],
    spec: &SweepSpec,
    basal: LevelRange,
    apical: LevelRange,
    want_ledger: bool,
) -> Result<SweepCell> {
    let dist = ingest::ingest_grid(records, &spec.binning(), basal, apical)?;
    let n_records = records
        .iter()
        .filter(|r| basal.contains(r.n_basal) && apical.contains(r.n_apical))
        .count();
    let summary = info::summarize(&dist)?;
    let normalized_summary = info::normalize_summary(&summary)?;
    let mut pids = Vec::with_capacity(spec.methods.len());
    let mut ledgers = Vec::new();
    let mut uias = Vec::with_capacity(spec.methods.len());
    for &m in &spec.methods {
        let (c, l) = run_method(&dist, m, want_ledger)?;
        uias.push(c.uia());
        pids.push(if spec.normalize {
            pid::normalize_components(&c, summary.jmi)?
        } else {
            c
        });
        ledgers.extend(l);
    }
    let max = uias.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = uias.iter().copied().fold(f64::INFINITY, f64::min);
    let tolerance = spec
        .methods
        .iter()
        .map(|m| m.tolerance())
        .fold(0.0, f64::max);
    let spread = max - min;
    Ok(SweepCell {
        basal_range: basal,
        apical_range: apical,
        n_records,
        summary,
        normalized_summary,
        pids,
        uia: summary.uia(),
        uia_check: UiaCheck {
            spread,
            tolerance,
            agree: spread <= tolerance,
        },
        ledgers,
    })
}

/// Decomposes every (basal range, apical range) cell. Cells that select no
/// grid records or carry no information are skipped with a warning.
pub fn run_sweep(records: &[GridRecord], spec: &SweepSpec, want_ledger: bool) -> Result<SweepReport> {
    spec.validate()?;
    ingest::check_unique_cells(records)?;
    let pairs: Vec<(LevelRange, LevelRange)> = spec
        .apical_ranges
        .iter()
        .flat_map(|&a| spec.basal_ranges.iter().map(move |&b| (b, a)))
        .collect();
    let outcomes: Vec<Result<SweepCell>> = pairs
        .par_iter()
        .map(|&(b, a)| sweep_cell(records, spec, b, a, want_ledger))
        .collect();

    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    for (&(b, a), r) in pairs.iter().zip(outcomes) {
        match r {
            Ok(c) => cells.push(c),
            // Misaligned ranges are a spec error, not a property of a cell.
            Err(e @ Error::MisalignedRange { .. }) => return Err(e),
            Err(e) => warnings.push(Warning {
                subject: format!("basal {b}, apical {a}"),
                message: format!("cell skipped: {e}"),
            }),
        }
    }
    for c in &cells {
        if !c.uia_check.agree {
            warnings.push(Warning {
                subject: format!("basal {}, apical {}", c.basal_range, c.apical_range),
                message: format!(
                    "methods disagree on UIA by {:e} bits (tolerance {:e})",
                    c.uia_check.spread, c.uia_check.tolerance
                ),
            });
        }
    }

    let mut bifurcations = Vec::new();
    for &a in &spec.apical_ranges {
        let series: Vec<&SweepCell> = spec
            .basal_ranges
            .iter()
            .filter_map(|&b| cells.iter().find(|c| c.basal_range == b && c.apical_range == a))
            .collect();
        for w in series.windows(2) {
            if sign(w[0].uia) != sign(w[1].uia) {
                bifurcations.push(SignChange {
                    apical_range: a,
                    from_basal: w[0].basal_range,
                    to_basal: w[1].basal_range,
                    from_uia: w[0].uia,
                    to_uia: w[1].uia,
                });
            }
        }
    }

    Ok(SweepReport {
        spec: spec.clone(),
        cells,
        bifurcations,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Cooperative context-sensitivity
// ---------------------------------------------------------------------------

/// Thresholds for the component-based properties, as fractions of the joint
/// mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcsThresholds {
    /// Minimum unique drive information.
    pub theta_b: f64,
    /// Largest tolerated unique context information or misinformation.
    pub theta_a: f64,
    /// Minimum synergy or shared information.
    pub theta_s: f64,
    /// Minimum rise and fall of shared plus synergy along the basal series.
    pub rise_fall: f64,
}

impl Default for CcsThresholds {
    fn default() -> Self {
        CcsThresholds {
            theta_b: 0.20,
            theta_a: 0.05,
            theta_s: 0.10,
            rise_fall: 0.01,
        }
    }
}

impl CcsThresholds {
    /// Context transmits no unique information: large `UnqB`, negligible
    /// `|UnqA|`, and some synergy or shared information. Takes normalized
    /// components.
    pub fn ccs3(&self, unq_b: f64, unq_a: f64, shd: f64, syn: f64) -> bool {
        unq_b >= self.theta_b && unq_a.abs() <= self.theta_a && (syn >= self.theta_s || shd >= self.theta_s)
    }

    /// Context strengthens weak drive: along increasing basal ranges the
    /// combined shared plus synergistic share peaks strictly inside the
    /// series, rising from the first value and falling to the last by more
    /// than `rise_fall`. `None` with fewer than three points.
    pub fn ccs4(&self, combined: &[f64]) -> Option<bool> {
        if combined.len() < 3 {
            return None;
        }
        let (peak, &max) = combined
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let interior = peak > 0 && peak + 1 < combined.len();
        Some(
            interior
                && max - combined[0] > self.rise_fall
                && max - combined[combined.len() - 1] > self.rise_fall,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcsSpec {
    #[serde(flatten)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub thresholds: CcsThresholds,
}

/// Evidence from zero-input rows inside one cell's ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroInputRows {
    /// Rows with no apical input, and the most spikes among them.
    pub apical_zero_rows: usize,
    pub apical_zero_max_count: Option<u64>,
    /// Rows with no basal input, and the most spikes among them.
    pub basal_zero_rows: usize,
    pub basal_zero_max_count: Option<u64>,
}

impl ZeroInputRows {
    pub fn collect(records: &[GridRecord], basal: LevelRange, apical: LevelRange) -> Self {
        let inside = records
            .iter()
            .filter(|r| basal.contains(r.n_basal) && apical.contains(r.n_apical));
        let apical_zero: Vec<u64> = inside
            .clone()
            .filter(|r| r.n_apical == 0)
            .map(|r| r.spike_count)
            .collect();
        let basal_zero: Vec<u64> = inside.filter(|r| r.n_basal == 0).map(|r| r.spike_count).collect();
        ZeroInputRows {
            apical_zero_rows: apical_zero.len(),
            apical_zero_max_count: apical_zero.iter().copied().max(),
            basal_zero_rows: basal_zero.len(),
            basal_zero_max_count: basal_zero.iter().copied().max(),
        }
    }

    /// Drive is sufficient: some output without context. `None` when no
    /// context-free rows were recorded.
    pub fn ccs1(&self) -> Option<bool> {
        self.apical_zero_max_count.map(|m| m > 0)
    }

    /// Drive is necessary: no output without drive. `None` when no
    /// drive-free rows were recorded.
    pub fn ccs2(&self) -> Option<bool> {
        self.basal_zero_max_count.map(|m| m == 0)
    }
}

/// The shared-plus-synergy series of one method along the basal ranges at
/// one apical range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcsSeries {
    pub apical_range: LevelRange,
    pub method: Method,
    pub basal_ranges: Vec<LevelRange>,
    pub combined: Vec<f64>,
    pub ccs4: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcsVerdict {
    pub basal_range: LevelRange,
    pub apical_range: LevelRange,
    pub method: Method,
    pub zero_inputs: ZeroInputRows,
    /// Normalized components the component-based flags are read from.
    pub unq_b: f64,
    pub unq_a: f64,
    pub shd: f64,
    pub syn: f64,
    pub ccs1: Option<bool>,
    pub ccs2: Option<bool>,
    pub ccs3: bool,
    /// Shared by every cell of the cell's series.
    pub ccs4: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcsReport {
    pub spec: CcsSpec,
    pub verdicts: Vec<CcsVerdict>,
    pub series: Vec<CcsSeries>,
    pub warnings: Vec<Warning>,
}

/// Classifies every sweep cell against the four properties. Components are
/// always normalized here, whatever the spec's normalization flag.
pub fn classify_ccs(records: &[GridRecord], spec: &CcsSpec) -> Result<CcsReport> {
    let sweep_spec = SweepSpec {
        normalize: true,
        ..spec.sweep.clone()
    };
    let sweep = run_sweep(records, &sweep_spec, false)?;
    let t = spec.thresholds;

    let mut series = Vec::new();
    for &a in &sweep_spec.apical_ranges {
        let cells: Vec<&SweepCell> = sweep.cells.iter().filter(|c| c.apical_range == a).collect();
        for (mi, &method) in sweep_spec.methods.iter().enumerate() {
            let combined: Vec<f64> = cells.iter().map(|c| c.pids[mi].shd + c.pids[mi].syn).collect();
            series.push(CcsSeries {
                apical_range: a,
                method,
                basal_ranges: cells.iter().map(|c| c.basal_range).collect(),
                ccs4: t.ccs4(&combined),
                combined,
            });
        }
    }

    let mut verdicts = Vec::new();
    for c in &sweep.cells {
        let zero_inputs = ZeroInputRows::collect(records, c.basal_range, c.apical_range);
        for p in &c.pids {
            let ccs4 = series
                .iter()
                .find(|s| s.apical_range == c.apical_range && s.method == p.method)
                .and_then(|s| s.ccs4);
            verdicts.push(CcsVerdict {
                basal_range: c.basal_range,
                apical_range: c.apical_range,
                method: p.method,
                zero_inputs,
                unq_b: p.unq_b,
                unq_a: p.unq_a,
                shd: p.shd,
                syn: p.syn,
                ccs1: zero_inputs.ccs1(),
                ccs2: zero_inputs.ccs2(),
                ccs3: t.ccs3(p.unq_b, p.unq_a, p.shd, p.syn),
                ccs4,
            });
        }
    }

    Ok(CcsReport {
        spec: CcsSpec {
            sweep: sweep_spec,
            thresholds: t,
        },
        verdicts,
        series,
        warnings: sweep.warnings,
    })
}
