//! The cells a polytope of probability tables can put mass on.
//!
//! Tables constrained to given sums over groups of cells form a polytope;
//! every table in it vanishes outside a common set of cells, which can be
//! strictly smaller than the cells each constraint allows on its own.
//! Fixed-point fits and scalings started outside that set only approach the
//! boundary slowly, so callers restrict themselves to it up front.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

/// Slack on each equality, absorbing rounding in the targets (in units where
/// a uniform table has unit cells).
const SLACK: f64 = 1e-12;
/// Smallest mass, in the same units, that counts as reaching a cell.
const MIN_MASS: f64 = 1e-7;

/// One linear constraint: the cells it sums and their required total.
pub(crate) struct GroupSum {
    pub cells: Vec<usize>,
    pub target: f64,
}

/// Cells among `allowed` that some nonnegative table meeting every group sum
/// puts mass on. `known` must be the support of one such table.
///
/// Repeatedly maximizes the mass on cells not yet known to be reachable,
/// adding every cell the optimum reaches, until no further cell gains mass.
pub(crate) fn reachable_cells(
    allowed: &[bool],
    known: &[bool],
    groups: &[GroupSum],
) -> Result<Vec<bool>> {
    let n = allowed.len();
    let scale = n as f64;
    let mut support = known.to_vec();
    loop {
        if support.iter().zip(allowed).all(|(&s, &ok)| s || !ok) {
            return Ok(support);
        }
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<Option<minilp::Variable>> = (0..n)
            .map(|c| {
                allowed[c].then(|| {
                    let gain = if support[c] { 0.0 } else { 1.0 };
                    lp.add_var(gain, (0.0, f64::INFINITY))
                })
            })
            .collect();
        for g in groups {
            let row: Vec<(minilp::Variable, f64)> = g
                .cells
                .iter()
                .filter_map(|&c| vars[c].map(|v| (v, 1.0)))
                .collect();
            if row.is_empty() {
                continue;
            }
            let target = g.target * scale;
            lp.add_constraint(row.as_slice(), ComparisonOp::Ge, target - SLACK);
            lp.add_constraint(row.as_slice(), ComparisonOp::Le, target + SLACK);
        }
        let solution = lp.solve().map_err(|e| Error::SupportSearch(e.to_string()))?;
        let mut grew = false;
        for (c, v) in vars.iter().enumerate() {
            if let Some(v) = v {
                if !support[c] && solution[*v] > MIN_MASS {
                    support[c] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(support);
        }
    }
}
