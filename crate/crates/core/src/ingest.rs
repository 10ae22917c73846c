//! Turning raw recordings and simulation grids into joint distributions.
//!
//! Two pipelines are supported. Trial data (one row per time bin of a
//! recorded trial) has its mean basal and apical currents binned into
//! equal-mass quantile bins and its spike counts grouped into output
//! categories. Grid data (one row per simulated basal/apical synapse-count
//! combination) keeps the input levels as they are and gives every retained
//! combination the same probability.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{Alphabet, JointDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Control,
    #[serde(alias = "baclofen")]
    Treatment,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Control => "control",
            Condition::Treatment => "treatment",
        })
    }
}

/// One time bin of one recorded trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub unit_id: String,
    pub condition: Condition,
    pub bin_index: u32,
    pub mean_basal: f64,
    pub mean_apical: f64,
    pub spike_count: u64,
}

impl TrialRecord {
    /// The stimulus combination this row belongs to, keyed on the raw
    /// amplitude pair.
    fn combination(&self) -> (u64, u64) {
        (canonical_bits(self.mean_basal), canonical_bits(self.mean_apical))
    }
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0.0f64.to_bits()
    } else {
        x.to_bits()
    }
}

/// One cell of a simulated synapse-count grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRecord {
    pub n_basal: u32,
    pub n_apical: u32,
    pub spike_count: u64,
}

/// Inclusive range of spike counts; `hi == None` means open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputCategory {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl OutputCategory {
    pub fn contains(&self, count: u64) -> bool {
        count >= self.lo && self.hi.is_none_or(|hi| count <= hi)
    }

    pub fn label(&self) -> String {
        match self.hi {
            None => format!("{}+", self.lo),
            Some(hi) if hi == self.lo => self.lo.to_string(),
            Some(hi) => format!("{}-{}", self.lo, hi),
        }
    }
}

/// Ordered, disjoint output categories, written as e.g. `"0,1,2+"` or
/// `"0,1-2,3-4"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputCategories(Vec<OutputCategory>);

impl OutputCategories {
    pub fn new(cats: Vec<OutputCategory>) -> Result<Self> {
        if cats.len() < 2 {
            return Err(Error::InvalidCategories(
                "at least two categories are required".into(),
            ));
        }
        for (i, c) in cats.iter().enumerate() {
            if let Some(hi) = c.hi {
                if hi < c.lo {
                    return Err(Error::InvalidCategories(format!(
                        "empty range {}-{hi}",
                        c.lo
                    )));
                }
            }
            if let Some(next) = cats.get(i + 1) {
                match c.hi {
                    Some(hi) if hi < next.lo => {}
                    _ => {
                        return Err(Error::InvalidCategories(format!(
                            "{} overlaps or does not precede {}",
                            c.label(),
                            next.label()
                        )))
                    }
                }
            }
        }
        Ok(OutputCategories(cats))
    }

    pub fn as_slice(&self) -> &[OutputCategory] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.0.iter().map(OutputCategory::label).collect()
    }
}

impl FromStr for OutputCategories {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::InvalidCategories(format!("cannot parse {t:?}"));
        let mut cats = Vec::new();
        for tok in s.split(',').map(str::trim) {
            let cat = if let Some(lo) = tok.strip_suffix('+') {
                OutputCategory {
                    lo: lo.trim().parse().map_err(|_| bad(tok))?,
                    hi: None,
                }
            } else if let Some((lo, hi)) = tok.split_once('-') {
                OutputCategory {
                    lo: lo.trim().parse().map_err(|_| bad(tok))?,
                    hi: Some(hi.trim().parse().map_err(|_| bad(tok))?),
                }
            } else {
                let v = tok.parse().map_err(|_| bad(tok))?;
                OutputCategory { lo: v, hi: Some(v) }
            };
            cats.push(cat);
        }
        OutputCategories::new(cats)
    }
}

impl fmt::Display for OutputCategories {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels().join(","))
    }
}

impl Serialize for OutputCategories {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OutputCategories {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningConfig {
    pub n_input_bins: usize,
    pub output_categories: OutputCategories,
}

impl BinningConfig {
    pub fn new(n_input_bins: usize, output_categories: OutputCategories) -> Result<Self> {
        if n_input_bins < 2 {
            return Err(Error::TooFewBins(n_input_bins));
        }
        Ok(BinningConfig {
            n_input_bins,
            output_categories,
        })
    }
}

/// Assigns each value to one of `k` ordered, as-equal-mass-as-possible bins.
///
/// Values are sorted stably; the cut after bin `j - 1` is placed at sorted
/// position `ceil(n * j / k)` and, when that would split a run of equal
/// values, moved up to the end of the run. Cuts are clamped so that every bin
/// keeps at least one distinct value. Equal values always share a bin.
pub fn bin_quantile(values: &[f64], k: usize) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no values to bin"));
    }
    if k < 2 {
        return Err(Error::TooFewBins(k));
    }
    if let Some(&value) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            field: "binned value",
            value,
        });
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    // End position (exclusive) of each run of equal values in sorted order.
    let mut run_ends = Vec::new();
    for pos in 1..=n {
        if pos == n || values[order[pos]] != values[order[pos - 1]] {
            run_ends.push(pos);
        }
    }
    let runs = run_ends.len();
    if runs < k {
        return Err(Error::UnachievableBinning {
            distinct: runs,
            bins: k,
        });
    }

    // last_run[j] = index of the final run belonging to bin j.
    let mut last_run = Vec::with_capacity(k);
    let mut prev: Option<usize> = None;
    for j in 1..k {
        let target = (n * j).div_ceil(k);
        let mut r = run_ends.partition_point(|&end| end < target);
        let lo = prev.map_or(0, |p| p + 1);
        let hi = runs - 1 - (k - j);
        r = r.clamp(lo, hi);
        last_run.push(r);
        prev = Some(r);
    }
    last_run.push(runs - 1);

    let mut bins = vec![0; n];
    let mut bin = 0;
    let mut run = 0;
    for (pos, &idx) in order.iter().enumerate() {
        if pos == run_ends[run] {
            run += 1;
            if run > last_run[bin] {
                bin += 1;
            }
        }
        bins[idx] = bin;
    }
    Ok(bins)
}

/// Index of the output category containing `count`.
pub fn categorize_output(count: u64, cfg: &BinningConfig) -> Result<usize> {
    cfg.output_categories
        .as_slice()
        .iter()
        .position(|c| c.contains(count))
        .ok_or(Error::CountOutsideCategories(count))
}

/// Builds the `|outputs| x k x k` distribution for one unit under one
/// condition. Every record carries equal weight.
pub fn ingest_trials(records: &[TrialRecord], cfg: &BinningConfig) -> Result<JointDistribution> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no trial records"));
    }
    let k = cfg.n_input_bins;
    let basal: Vec<f64> = records.iter().map(|r| r.mean_basal).collect();
    let apical: Vec<f64> = records.iter().map(|r| r.mean_apical).collect();
    let b_bins = bin_quantile(&basal, k)?;
    let a_bins = bin_quantile(&apical, k)?;

    let ny = cfg.output_categories.len();
    let mut weights = vec![0.0; ny * k * k];
    for ((r, &b), &a) in records.iter().zip(&b_bins).zip(&a_bins) {
        let y = categorize_output(r.spike_count, cfg)?;
        weights[(y * k + b) * k + a] += 1.0;
    }
    let quantile_labels = || (1..=k).map(|q| format!("Q{q}"));
    JointDistribution::new(
        Alphabet::new(cfg.output_categories.labels())?,
        Alphabet::new(quantile_labels())?,
        Alphabet::new(quantile_labels())?,
        weights,
    )
}

/// Inclusive synapse-count range, written `lo-hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelRange {
    pub lo: u32,
    pub hi: u32,
}

impl LevelRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty range {lo}-{hi}")));
        }
        Ok(LevelRange { lo, hi })
    }

    pub fn contains(&self, level: u32) -> bool {
        (self.lo..=self.hi).contains(&level)
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl FromStr for LevelRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse range {s:?}"));
        let (lo, hi) = s.trim().split_once('-').ok_or_else(bad)?;
        LevelRange::new(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl Serialize for LevelRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LevelRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Common spacing of all synapse-count levels in the grid (0 if every level
/// is 0).
pub fn grid_step(records: &[GridRecord]) -> u32 {
    records
        .iter()
        .flat_map(|r| [r.n_basal, r.n_apical])
        .fold(0, gcd)
}

/// Rejects duplicated `(n_basal, n_apical)` cells.
pub fn check_unique_cells(records: &[GridRecord]) -> Result<()> {
    let mut seen = HashSet::with_capacity(records.len());
    for r in records {
        if !seen.insert((r.n_basal, r.n_apical)) {
            return Err(Error::DuplicateGridCell {
                basal: r.n_basal,
                apical: r.n_apical,
            });
        }
    }
    Ok(())
}

/// Builds the equal-probability distribution over the grid cells falling in
/// both ranges. Input levels become the `B` and `A` alphabets unchanged.
pub fn ingest_grid(
    records: &[GridRecord],
    cfg: &BinningConfig,
    basal: LevelRange,
    apical: LevelRange,
) -> Result<JointDistribution> {
    check_unique_cells(records)?;
    let step = grid_step(records);
    if step > 0 {
        for r in [basal, apical] {
            if r.lo % step != 0 || r.hi % step != 0 {
                return Err(Error::MisalignedRange {
                    lo: r.lo,
                    hi: r.hi,
                    step,
                });
            }
        }
    }
    let kept: Vec<&GridRecord> = records
        .iter()
        .filter(|r| basal.contains(r.n_basal) && apical.contains(r.n_apical))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyRange {
            basal: (basal.lo, basal.hi),
            apical: (apical.lo, apical.hi),
        });
    }
    let b_levels: Vec<u32> = kept
        .iter()
        .map(|r| r.n_basal)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let a_levels: Vec<u32> = kept
        .iter()
        .map(|r| r.n_apical)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (nb, na) = (b_levels.len(), a_levels.len());
    let ny = cfg.output_categories.len();
    let mut weights = vec![0.0; ny * nb * na];
    for r in &kept {
        let y = categorize_output(r.spike_count, cfg)?;
        let b = b_levels.binary_search(&r.n_basal).expect("level present");
        let a = a_levels.binary_search(&r.n_apical).expect("level present");
        weights[(y * nb + b) * na + a] += 1.0;
    }
    JointDistribution::new(
        Alphabet::new(cfg.output_categories.labels())?,
        Alphabet::new(b_levels.iter().map(u32::to_string))?,
        Alphabet::new(a_levels.iter().map(u32::to_string))?,
        weights,
    )
}

/// Restricts both conditions of one unit to the stimulus combinations they
/// have in common, so the two input distributions cover the same support.
pub fn match_support(
    control: &[TrialRecord],
    treatment: &[TrialRecord],
) -> Result<(Vec<TrialRecord>, Vec<TrialRecord>)> {
    if control.is_empty() || treatment.is_empty() {
        return Err(Error::EmptyInput("both conditions need records"));
    }
    let left: HashSet<_> = control.iter().map(TrialRecord::combination).collect();
    let right: HashSet<_> = treatment.iter().map(TrialRecord::combination).collect();
    let common: HashSet<_> = left.intersection(&right).copied().collect();
    if common.is_empty() {
        return Err(Error::EmptySupportIntersection);
    }
    let keep = |rs: &[TrialRecord]| {
        rs.iter()
            .filter(|r| common.contains(&r.combination()))
            .cloned()
            .collect::<Vec<_>>()
    };
    Ok((keep(control), keep(treatment)))
}

/// Drops every stimulus combination whose rows carry no spikes at all.
pub fn omit_silent_trials(records: &[TrialRecord]) -> Vec<TrialRecord> {
    let mut totals: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for r in records {
        *totals.entry(r.combination()).or_default() += r.spike_count;
    }
    records
        .iter()
        .filter(|r| totals[&r.combination()] > 0)
        .cloned()
        .collect()
}

fn check_trial(r: &TrialRecord) -> Result<()> {
    for (field, value) in [("mean_basal", r.mean_basal), ("mean_apical", r.mean_apical)] {
        if !value.is_finite() {
            return Err(Error::NonFinite { field, value });
        }
    }
    Ok(())
}

pub fn read_trials_from<R: Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let r: TrialRecord = row?;
        check_trial(&r)?;
        out.push(r);
    }
    Ok(out)
}

pub fn read_trials(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    read_trials_from(std::fs::File::open(path)?)
}

pub fn read_grid_from<R: Read>(reader: R) -> Result<Vec<GridRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let out = rdr.deserialize().collect::<std::result::Result<Vec<GridRecord>, _>>()?;
    check_unique_cells(&out)?;
    Ok(out)
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<Vec<GridRecord>> {
    read_grid_from(std::fs::File::open(path)?)
}

fn write_records<W: Write, T: Serialize>(out: W, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes records in the format [`read_trials_from`] reads.
pub fn write_trials_to<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    write_records(out, records)
}

/// Writes records in the format [`read_grid_from`] reads.
pub fn write_grid_to<W: Write>(out: W, records: &[GridRecord]) -> Result<()> {
    write_records(out, records)
}
