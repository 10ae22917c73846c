//! Unique information as the minimum of `I(Y; B, A)` over all tables sharing
//! the observed `(Y, B)` and `(Y, A)` marginals.
//!
//! The feasible set splits into one transportation polytope per output value
//! `y`: the slice `q(y, ., .)` must have row sums `p(y, b)` and column sums
//! `p(y, a)`. Writing `s(b, a)` for the column mass, the objective is
//! `H(Y) + sum q ln(q / s)` (in nats before conversion), a convex function
//! whose minimizer often lies on the boundary of the polytope.
//!
//! The solver is a primal log-barrier method. For an increasing weight `t`
//! it minimizes `t f(q) - sum ln q` over the polytope by Newton steps. The
//! Hessian of `f` is block diagonal with one `|Y| x |Y|` block per `(b, a)`
//! column, so each step reduces to a dense system in the marginal
//! constraints alone. Cells no feasible table reaches are removed first, so
//! the barrier always has a strictly feasible interior to work in.
//!
//! Every centring step also yields Lagrange multipliers for the marginal
//! constraints, which give a rigorous lower bound on the optimum; the solver
//! stops once the gap between the current objective and that bound is below
//! [`SolverConfig::gap_tolerance`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::info::{self, entropy};
use crate::pid::{self, Method, PidComponents};
use crate::support::{self, GroupSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Newton-step budget.
    pub max_iterations: usize,
    /// Certified optimality gap, in bits.
    pub gap_tolerance: f64,
    /// Largest allowed deviation of the `(Y, B)` and `(Y, A)` marginals.
    pub feasibility_tolerance: f64,
    /// Sweep budget of the scaling that builds the starting point.
    pub max_scaling_sweeps: usize,
    /// Keep the objective value at the end of every centring in the report.
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 50_000,
            gap_tolerance: 1e-7,
            feasibility_tolerance: 1e-10,
            max_scaling_sweeps: 10_000,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    /// `I_Q(Y; B, A)` at the returned table, in bits.
    pub objective: f64,
    /// Certified lower bound on the minimum, in bits.
    pub lower_bound: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub max_constraint_violation: f64,
    pub converged: bool,
    /// Objective after every centring, when requested.
    pub trace: Vec<f64>,
}

impl SolverReport {
    pub fn gap(&self) -> f64 {
        self.objective - self.lower_bound
    }
}

/// The two pairwise marginals every feasible table must reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraints {
    shape: [usize; 3],
    /// `p(y, b)`, row-major in `y`.
    pub target_yb: Vec<f64>,
    /// `p(y, a)`, row-major in `y`.
    pub target_ya: Vec<f64>,
}

impl MarginalConstraints {
    pub fn of(dist: &JointDistribution) -> Self {
        MarginalConstraints {
            shape: dist.shape(),
            target_yb: dist.table_yb(),
            target_ya: dist.table_ya(),
        }
    }

    /// Largest absolute deviation of `q`'s pairwise marginals from the
    /// targets.
    pub fn violation(&self, q: &[f64]) -> f64 {
        let [ny, nb, na] = self.shape;
        let mut worst: f64 = 0.0;
        let mut col = vec![0.0; na];
        for y in 0..ny {
            col.iter_mut().for_each(|c| *c = 0.0);
            for b in 0..nb {
                let base = (y * nb + b) * na;
                let row: f64 = q[base..base + na].iter().sum();
                worst = worst.max((row - self.target_yb[y * nb + b]).abs());
                for a in 0..na {
                    col[a] += q[base + a];
                }
            }
            for a in 0..na {
                worst = worst.max((col[a] - self.target_ya[y * na + a]).abs());
            }
        }
        worst
    }

    fn p_y(&self) -> Vec<f64> {
        let [ny, nb, _] = self.shape;
        (0..ny)
            .map(|y| self.target_yb[y * nb..(y + 1) * nb].iter().sum())
            .collect()
    }

    /// The feasible table of maximal entropy, `p(y) p(b | y) p(a | y)`.
    pub fn max_entropy_point(&self) -> Vec<f64> {
        let [ny, nb, na] = self.shape;
        let py = self.p_y();
        let mut q = vec![0.0; ny * nb * na];
        for y in 0..ny {
            if py[y] <= 0.0 {
                continue;
            }
            for b in 0..nb {
                let pb = self.target_yb[y * nb + b];
                for a in 0..na {
                    q[(y * nb + b) * na + a] = pb * self.target_ya[y * na + a] / py[y];
                }
            }
        }
        q
    }
}

/// Cells of the feasible polytope's face: those some table with the target
/// marginals puts mass on. The polytope splits into one transportation
/// polytope per output value, each searched separately.
fn feasible_face(dist: &JointDistribution, cons: &MarginalConstraints) -> Result<Vec<bool>> {
    let [ny, nb, na] = dist.shape();
    let mut face = Vec::with_capacity(ny * nb * na);
    for y in 0..ny {
        let rows = &cons.target_yb[y * nb..(y + 1) * nb];
        let cols = &cons.target_ya[y * na..(y + 1) * na];
        let allowed: Vec<bool> = (0..nb * na)
            .map(|i| rows[i / na] > 0.0 && cols[i % na] > 0.0)
            .collect();
        let known: Vec<bool> = dist.pmf()[y * nb * na..(y + 1) * nb * na]
            .iter()
            .map(|&v| v > 0.0)
            .collect();
        let mut groups: Vec<GroupSum> = (0..nb)
            .map(|b| GroupSum {
                cells: (0..na).map(|a| b * na + a).collect(),
                target: rows[b],
            })
            .collect();
        groups.extend((0..na).map(|a| GroupSum {
            cells: (0..nb).map(|b| b * na + a).collect(),
            target: cols[a],
        }));
        face.extend(support::reachable_cells(&allowed, &known, &groups)?);
    }
    Ok(face)
}

/// Scales one `nb x na` slice in place to the given row and column sums.
fn scale_slice(m: &mut [f64], rows: &[f64], cols: &[f64], tol: f64, max_sweeps: usize) {
    let (nb, na) = (rows.len(), cols.len());
    for _ in 0..max_sweeps {
        for b in 0..nb {
            let s: f64 = m[b * na..(b + 1) * na].iter().sum();
            if s > 0.0 {
                let f = rows[b] / s;
                m[b * na..(b + 1) * na].iter_mut().for_each(|x| *x *= f);
            }
        }
        for a in 0..na {
            let s: f64 = (0..nb).map(|b| m[b * na + a]).sum();
            if s > 0.0 {
                let f = cols[a] / s;
                for b in 0..nb {
                    m[b * na + a] *= f;
                }
            }
        }
        let deviation = (0..nb)
            .map(|b| (m[b * na..(b + 1) * na].iter().sum::<f64>() - rows[b]).abs())
            .fold(0.0, f64::max);
        if deviation <= tol {
            break;
        }
    }
}

/// The free cells of the problem and the independent marginal constraints
/// on them.
struct Layout {
    /// Flat table index of each free cell, grouped by `(b, a)` column.
    cells: Vec<usize>,
    /// `cells[columns[k].0 .. columns[k].1]` share one column.
    columns: Vec<(usize, usize)>,
    /// Constraint row of each cell's `(y, b)` marginal.
    row_yb: Vec<usize>,
    /// Constraint row of each cell's `(y, a)` marginal, unless that row was
    /// dropped as implied by the others.
    row_ya: Vec<Option<usize>>,
    /// Right-hand side of every kept row.
    targets: Vec<f64>,
}

impl Layout {
    fn new(face: &[bool], cons: &MarginalConstraints) -> Self {
        let [ny, nb, na] = cons.shape;
        let mut targets = Vec::new();
        let mut yb_index = vec![usize::MAX; ny * nb];
        for (i, &t) in cons.target_yb.iter().enumerate() {
            if t > 0.0 {
                yb_index[i] = targets.len();
                targets.push(t);
            }
        }
        // Within each y slice the row and column sums of one connected block
        // of cells share a total, so one column constraint per block is
        // implied by the rest. Find the blocks with a union-find over the
        // nb row nodes and na column nodes.
        let mut ya_index = vec![None; ny * na];
        for y in 0..ny {
            let mut parent: Vec<usize> = (0..nb + na).collect();
            fn root(parent: &mut [usize], mut i: usize) -> usize {
                while parent[i] != i {
                    parent[i] = parent[parent[i]];
                    i = parent[i];
                }
                i
            }
            for b in 0..nb {
                for a in 0..na {
                    if face[(y * nb + b) * na + a] {
                        let (rb, ra) = (root(&mut parent, b), root(&mut parent, nb + a));
                        parent[rb] = ra;
                    }
                }
            }
            let mut dropped = vec![false; nb + na];
            for a in 0..na {
                if cons.target_ya[y * na + a] <= 0.0 {
                    continue;
                }
                let r = root(&mut parent, nb + a);
                if !dropped[r] {
                    dropped[r] = true;
                } else {
                    ya_index[y * na + a] = Some(targets.len());
                    targets.push(cons.target_ya[y * na + a]);
                }
            }
        }

        let mut cells = Vec::new();
        let mut columns = Vec::new();
        let mut row_yb = Vec::new();
        let mut row_ya = Vec::new();
        for b in 0..nb {
            for a in 0..na {
                let start = cells.len();
                for y in 0..ny {
                    let i = (y * nb + b) * na + a;
                    if face[i] {
                        cells.push(i);
                        row_yb.push(yb_index[y * nb + b]);
                        row_ya.push(ya_index[y * na + a]);
                    }
                }
                if cells.len() > start {
                    columns.push((start, cells.len()));
                }
            }
        }
        Layout {
            cells,
            columns,
            row_yb,
            row_ya,
            targets,
        }
    }

    fn rows(&self) -> usize {
        self.targets.len()
    }

    /// `A v`: constraint-row sums of a cell vector.
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        for (k, &x) in v.iter().enumerate() {
            out[self.row_yb[k]] += x;
            if let Some(r) = self.row_ya[k] {
                out[r] += x;
            }
        }
        out
    }

    /// `A^T w`: per-cell sum of its rows' entries.
    fn spread(&self, w: &[f64]) -> Vec<f64> {
        (0..self.cells.len())
            .map(|k| w[self.row_yb[k]] + self.row_ya[k].map_or(0.0, |r| w[r]))
            .collect()
    }

    /// `f(x) = sum x ln(x / s)` in nats.
    fn objective(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for &(lo, hi) in &self.columns {
            let s: f64 = x[lo..hi].iter().sum();
            for &v in &x[lo..hi] {
                if v > 0.0 {
                    total += v * (v / s).ln();
                }
            }
        }
        total
    }

    fn barrier(&self, x: &[f64], t: f64) -> f64 {
        t * self.objective(x) - x.iter().map(|v| v.ln()).sum::<f64>()
    }

    /// Lower bound on `f` from multipliers `c = A^T w'`: the dual function
    /// `sum targets w' - max(0, max over columns of logsumexp c)`.
    fn dual_bound(&self, w: &[f64]) -> f64 {
        let c = self.spread(w);
        let mut worst = f64::NEG_INFINITY;
        for &(lo, hi) in &self.columns {
            let m = c[lo..hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + c[lo..hi].iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            worst = worst.max(lse);
        }
        self.targets.iter().zip(w).map(|(t, w)| t * w).sum::<f64>() - worst.max(0.0)
    }
}

/// Column log-sum-exps of `c = A^T w` and the per-column softmax of `c`.
fn column_lse(layout: &Layout, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let c = layout.spread(w);
    let mut lse = Vec::with_capacity(layout.columns.len());
    let mut soft = vec![0.0; c.len()];
    for &(lo, hi) in &layout.columns {
        let m = c[lo..hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = c[lo..hi].iter().map(|v| (v - m).exp()).sum();
        for k in lo..hi {
            soft[k] = (c[k] - m).exp() / total;
        }
        lse.push(m + total.ln());
    }
    (lse, soft)
}

/// Tightens a lower bound by path-following on the dual barrier problem
/// `max b^T w + mu sum_j ln(-L_j(w))`, `L_j` the log-sum-exp of column `j`
/// of `A^T w`. Every strictly feasible `w` certifies `f >= b^T w`; the
/// gradient `A x(w) - b` involves only quantities of order one, so the
/// multipliers stay accurate where the primal ones lose digits. Returns the
/// best bound found, in nats, stopping once it is within `slack` of
/// `objective`.
fn refine_bound(layout: &Layout, start: &[f64], objective: f64, slack: f64) -> Result<f64> {
    let m = layout.rows();
    let cols = layout.columns.len() as f64;
    let dot_b = |w: &[f64]| layout.targets.iter().zip(w).map(|(b, w)| b * w).sum::<f64>();
    let mut w = start.to_vec();
    // Shift into the strict interior: lowering every `(y, b)` multiplier by
    // `d` lowers every cell's `c` and every `L_j` by `d`.
    let (lse, _) = column_lse(layout, &w);
    let worst = lse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut mu = (objective - (dot_b(&w) - worst.max(0.0))).max(slack) / cols;
    let shift = worst + mu;
    let mut yb_row = vec![false; m];
    for &r in &layout.row_yb {
        yb_row[r] = true;
    }
    for (wi, &is_yb) in w.iter_mut().zip(&yb_row) {
        if is_yb {
            *wi -= shift;
        }
    }
    let mut best = dot_b(&w);
    let barrier = |w: &[f64], mu: f64| -> Option<f64> {
        let (lse, _) = column_lse(layout, w);
        if lse.iter().any(|&l| l >= 0.0) {
            return None;
        }
        Some(-dot_b(w) - mu * lse.iter().map(|l| (-l).ln()).sum::<f64>())
    };
    for _ in 0..DUAL_STEPS {
        if objective - best <= slack {
            break;
        }
        let (lse, soft) = column_lse(layout, &w);
        // x(w): column j carries mass mu / (-L_j), spread by the softmax.
        let mut xw = vec![0.0; soft.len()];
        let mut gram = DMatrix::<f64>::zeros(m, m);
        for (j, &(lo, hi)) in layout.columns.iter().enumerate() {
            let s = mu / -lse[j];
            for k in lo..hi {
                xw[k] = s * soft[k];
            }
            let outer = 1.0 / mu - 1.0 / s;
            for k in lo..hi {
                for l in lo..hi {
                    let h = if k == l { xw[k] } else { 0.0 } + outer * xw[k] * xw[l];
                    let rk = [Some(layout.row_yb[k]), layout.row_ya[k]];
                    let rl = [Some(layout.row_yb[l]), layout.row_ya[l]];
                    for i in rk.iter().flatten() {
                        for jj in rl.iter().flatten() {
                            gram[(*i, *jj)] += h;
                        }
                    }
                }
            }
        }
        let ax = layout.apply(&xw);
        let grad = DVector::from_iterator(m, (0..m).map(|i| ax[i] - layout.targets[i]));
        let step_dir: Vec<f64> = solve_refined(&gram, &(-&grad))?.iter().copied().collect();
        let decrement: f64 = -grad.iter().zip(&step_dir).map(|(g, d)| g * d).sum::<f64>();
        let current = barrier(&w, mu).expect("iterate is strictly feasible");
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-10 {
            let trial: Vec<f64> = w.iter().zip(&step_dir).map(|(a, d)| a + step * d).collect();
            if let Some(v) = barrier(&trial, mu) {
                if v <= current - 0.25 * step * decrement {
                    w = trial;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        best = best.max(dot_b(&w));
        if !moved || decrement / 2.0 <= CENTRING_TOLERANCE {
            if mu * cols <= slack * 1e-3 {
                break;
            }
            mu /= T_GROWTH;
        }
    }
    Ok(best)
}

/// Solves the symmetric positive definite system `s w = rhs`.
///
/// Jacobi scaling evens out rows whose cells differ by many orders of
/// magnitude; a few refinement passes then drive the residual to rounding
/// level.
fn solve_refined(s: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let m = s.nrows();
    let scale = DVector::from_iterator(
        m,
        (0..m).map(|i| {
            let v = s[(i, i)];
            if v > 0.0 {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        }),
    );
    let mut scaled = s.clone();
    for i in 0..m {
        for j in 0..m {
            scaled[(i, j)] *= scale[i] * scale[j];
        }
    }
    let factor = match scaled.clone().cholesky() {
        Some(ch) => ch,
        // Nearly dependent rows: regularize slightly.
        None => (scaled + DMatrix::<f64>::identity(m, m) * 1e-13)
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("singular Newton system".into()))?,
    };
    let solve = |r: &DVector<f64>| factor.solve(&r.component_mul(&scale)).component_mul(&scale);
    let mut w = solve(rhs);
    for _ in 0..REFINEMENTS {
        let residual = rhs - s * &w;
        w += solve(&residual);
    }
    Ok(w)
}

/// Moves `x` back onto the marginal constraints by the nearest table in
/// relative entropy, `x exp(A^T z)`. Newton steps drift off the constraints
/// at large barrier weights through cancellation in the gradient; the
/// multiplicative form removes the drift while staying strictly positive,
/// even when the correction has to pass through cells near zero.
///
/// `z` solves `A (x exp(A^T z)) = b` by Newton's method with Jacobian
/// `A diag(x') A^T`, halving steps until the largest residual shrinks.
fn project_feasible(layout: &Layout, x: &mut [f64]) -> Result<()> {
    let m = layout.rows();
    let residual = |x: &[f64]| -> DVector<f64> {
        let ax = layout.apply(x);
        DVector::from_iterator(m, (0..m).map(|i| layout.targets[i] - ax[i]))
    };
    let mut r = residual(x);
    for _ in 0..PROJECTIONS {
        if r.amax() <= PROJECTION_TOLERANCE {
            break;
        }
        let mut gram = DMatrix::<f64>::zeros(m, m);
        for (k, &v) in x.iter().enumerate() {
            let rows = [Some(layout.row_yb[k]), layout.row_ya[k]];
            for i in rows.iter().flatten() {
                for j in rows.iter().flatten() {
                    gram[(*i, *j)] += v;
                }
            }
        }
        let dz: Vec<f64> = solve_refined(&gram, &r)?.iter().copied().collect();
        let spread = layout.spread(&dz);
        let mut step = 1.0;
        let mut next: Vec<f64>;
        let mut next_r: DVector<f64>;
        loop {
            next = x.iter().zip(&spread).map(|(v, c)| v * (step * c).exp()).collect();
            next_r = residual(&next);
            if next_r.amax() < r.amax() || step < 1e-6 {
                break;
            }
            step *= 0.5;
        }
        if next_r.amax() >= r.amax() {
            break;
        }
        x.copy_from_slice(&next);
        r = next_r;
    }
    Ok(())
}

/// One Newton step of the barrier problem at weight `t`: the step, the
/// multipliers of the constraint rows and the squared Newton decrement.
fn newton_step(layout: &Layout, x: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = x.len();
    let m = layout.rows();
    // Gradient of t f - sum ln x.
    let mut g = vec![0.0; n];
    // Hessian blocks: diag(t / x + 1 / x^2) - (t / s) 11^T, inverted by
    // Sherman-Morrison as diag(d) + gamma d d^T.
    let mut d = vec![0.0; n];
    let mut gamma = vec![0.0; layout.columns.len()];
    for (ci, &(lo, hi)) in layout.columns.iter().enumerate() {
        let s: f64 = x[lo..hi].iter().sum();
        let mut den = 0.0;
        for k in lo..hi {
            g[k] = t * (x[k] / s).ln() - 1.0 / x[k];
            d[k] = x[k] * x[k] / (t * x[k] + 1.0);
            den += (x[k] / s) / (t * x[k] + 1.0);
        }
        gamma[ci] = (t / s) / den;
    }
    let h_inv = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (ci, &(lo, hi)) in layout.columns.iter().enumerate() {
            let dv: f64 = (lo..hi).map(|k| d[k] * v[k]).sum();
            for k in lo..hi {
                out[k] = d[k] * v[k] + gamma[ci] * d[k] * dv;
            }
        }
        out
    };

    // Schur complement A H^-1 A^T.
    let mut schur = DMatrix::<f64>::zeros(m, m);
    for (ci, &(lo, hi)) in layout.columns.iter().enumerate() {
        for k in lo..hi {
            for l in lo..hi {
                let h = if k == l { d[k] } else { 0.0 } + gamma[ci] * d[k] * d[l];
                let rk = [Some(layout.row_yb[k]), layout.row_ya[k]];
                let rl = [Some(layout.row_yb[l]), layout.row_ya[l]];
                for i in rk.iter().flatten() {
                    for j in rl.iter().flatten() {
                        schur[(*i, *j)] += h;
                    }
                }
            }
        }
    }
    // Right-hand side (A x - b) - A H^-1 g also restores feasibility lost to
    // rounding.
    let hg = h_inv(&g);
    let ahg = layout.apply(&hg);
    let ax = layout.apply(x);
    let rhs = DVector::from_iterator(
        m,
        (0..m).map(|i| (ax[i] - layout.targets[i]) - ahg[i]),
    );
    let w = solve_refined(&schur, &rhs)?;
    let w: Vec<f64> = w.iter().copied().collect();
    let at_w = layout.spread(&w);
    let rhs_x: Vec<f64> = g.iter().zip(&at_w).map(|(a, b)| a + b).collect();
    let dx: Vec<f64> = h_inv(&rhs_x).into_iter().map(|v| -v).collect();
    let decrement = -g.iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>();
    Ok((dx, w, decrement))
}

/// Newton steps spent tightening the final lower bound.
const DUAL_STEPS: usize = 200;
/// Newton iterations of each feasibility projection, and the largest
/// constraint residual it stops at.
const PROJECTIONS: usize = 30;
const PROJECTION_TOLERANCE: f64 = 1e-15;
/// Iterative-refinement passes on each linear system.
const REFINEMENTS: usize = 2;
/// The last centring is at this multiple of the weight whose path gap
/// `n / t` equals the tolerance.
const FINAL_WEIGHT_MARGIN: f64 = 1.5;
/// Barrier weight growth per centring.
const T_GROWTH: f64 = 10.0;
/// The start is returned when it is within this many nats of the final
/// iterate, far below any gap tolerance, so exact starts stay exact.
const START_PREFERENCE: f64 = 1e-13;
/// Centring stops once half the squared Newton decrement is below this.
const CENTRING_TOLERANCE: f64 = 1e-10;

/// Finds `Q* = argmin I_Q(Y; B, A)` over tables with the same `(Y, B)` and
/// `(Y, A)` marginals as `dist`.
pub fn minimize_joint_mi(
    dist: &JointDistribution,
    cfg: &SolverConfig,
) -> Result<(JointDistribution, SolverReport)> {
    let shape = dist.shape();
    let [ny, nb, na] = shape;
    let cons = MarginalConstraints::of(dist);
    let h_y = entropy(&cons.p_y());
    let to_bits = |nats: f64| h_y + nats / std::f64::consts::LN_2;

    // Start from the maximum-entropy table on the reachable cells: the
    // product point when every cell the marginals allow is reachable,
    // otherwise the scaled uniform table on the reachable ones.
    let needs_search = dist.cells().any(|((y, b, a), p)| {
        p == 0.0 && cons.target_yb[y * nb + b] > 0.0 && cons.target_ya[y * na + a] > 0.0
    });
    let mut q = cons.max_entropy_point();
    let face: Vec<bool> = if needs_search {
        let face = feasible_face(dist, &cons)?;
        for y in 0..ny {
            let slice = &mut q[y * nb * na..(y + 1) * nb * na];
            for (i, v) in slice.iter_mut().enumerate() {
                *v = if face[y * nb * na + i] { 1.0 } else { 0.0 };
            }
            scale_slice(
                slice,
                &cons.target_yb[y * nb..(y + 1) * nb],
                &cons.target_ya[y * na..(y + 1) * na],
                cfg.feasibility_tolerance * 1e-3,
                cfg.max_scaling_sweeps,
            );
        }
        face
    } else {
        q.iter().map(|&v| v > 0.0).collect()
    };

    let layout = Layout::new(&face, &cons);
    let mut x: Vec<f64> = layout.cells.iter().map(|&i| q[i]).collect();
    project_feasible(&layout, &mut x)?;
    let n = x.len() as f64;
    let gap_nats = cfg.gap_tolerance * std::f64::consts::LN_2;

    let mut t = 1.0;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut objective;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut converged = false;
    let start = x.clone();
    'outer: loop {
        // Centre at weight t.
        let w = loop {
            let (dx, w, decrement) = newton_step(&layout, &x, t)?;
            if decrement / 2.0 <= CENTRING_TOLERANCE {
                break w;
            }
            if iterations == cfg.max_iterations {
                break 'outer;
            }
            iterations += 1;
            let mut step = 1.0f64;
            for (v, dv) in x.iter().zip(&dx) {
                if *dv < 0.0 {
                    step = step.min(-0.99 * v / dv);
                }
            }
            let phi = layout.barrier(&x, t);
            let slope = -decrement;
            let mut trial: Vec<f64>;
            loop {
                trial = x.iter().zip(&dx).map(|(v, dv)| v + step * dv).collect();
                if layout.barrier(&trial, t) <= phi + 0.25 * step * slope || step < 1e-12 {
                    break;
                }
                step *= 0.5;
            }
            x = trial;
        };
        project_feasible(&layout, &mut x)?;
        objective = to_bits(layout.objective(&x));
        if cfg.record_trace {
            trace.push(objective);
        }
        let multipliers: Vec<f64> = w.iter().map(|v| -v / t).collect();
        lower_bound = lower_bound.max(to_bits(layout.dual_bound(&multipliers)));
        if n / t <= T_GROWTH * gap_nats && objective - lower_bound > cfg.gap_tolerance {
            let refined = refine_bound(
                &layout,
                &multipliers,
                layout.objective(&x),
                0.5 * gap_nats,
            )?;
            lower_bound = lower_bound.max(to_bits(refined));
        }
        if n / t <= gap_nats && objective - lower_bound <= cfg.gap_tolerance {
            converged = true;
            break;
        }
        if iterations == cfg.max_iterations {
            break;
        }
        // The multipliers lose accuracy as t grows, so stop short of
        // overshooting the weight at which the path gap meets the tolerance.
        let needed = FINAL_WEIGHT_MARGIN * n / gap_nats;
        t = if t < needed { (t * T_GROWTH).min(needed) } else { t * T_GROWTH };
    }

    // Keep the start when it is already at least as good (it is exactly
    // feasible and often exactly optimal, e.g. for independent systems).
    if layout.objective(&start) <= layout.objective(&x) + START_PREFERENCE {
        x = start;
    }
    let mut table = vec![0.0; ny * nb * na];
    for (&i, &v) in layout.cells.iter().zip(&x) {
        table[i] = v;
    }
    objective = to_bits(layout.objective(&x));
    let max_constraint_violation = cons.violation(&table);
    let report = SolverReport {
        objective,
        lower_bound,
        iterations,
        max_constraint_violation,
        converged: converged && max_constraint_violation <= cfg.feasibility_tolerance,
        trace,
    };
    if !report.converged {
        return Err(Error::SolverDidNotConverge(Box::new(report)));
    }
    Ok((dist.with_weights(table)?, report))
}

/// Components from the optimal table: the uniques are the conditional
/// mutual informations under `Q*`, and the synergy is what `Q*` loses
/// relative to the observed joint mutual information.
pub fn pid_broja_with(dist: &JointDistribution, cfg: &SolverConfig) -> Result<PidComponents> {
    let s = info::summarize(dist)?;
    let (q, _) = minimize_joint_mi(dist, cfg)?;
    let sq = info::summarize(&q)?;
    pid::from_uniques(
        &s,
        sq.cmi_yb_given_a,
        sq.cmi_ya_given_b,
        Method::Ibroja,
        Method::Ibroja.tolerance(),
    )
}

pub fn pid_broja(dist: &JointDistribution) -> Result<PidComponents> {
    pid_broja_with(dist, &SolverConfig::default())
}
