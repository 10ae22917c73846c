//! Unique information from the lattice of marginal-constraint sets.
//!
//! Each node of the lattice is a set of marginals to preserve; its model is
//! the maximum-entropy table matching them. The unique information of an
//! input is the smallest increase of `I(Y; B, A)` along any covering edge of
//! the lattice that adds that input's coupling to the output.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::{JointDistribution, Var};
use crate::error::{Error, Result};
use crate::info;
use crate::pid::{self, Method, PidComponents};
use crate::support::{self, GroupSum};

/// One marginal: a set of one or two variables, kept sorted.
pub type Subset = BTreeSet<Var>;

/// An antichain of one- and two-variable subsets covering `{Y, B, A}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintSet {
    members: BTreeSet<Subset>,
}

impl ConstraintSet {
    pub fn new<I, S>(members: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = Var>,
    {
        let members: BTreeSet<Subset> = members
            .into_iter()
            .map(|s| s.into_iter().collect::<Subset>())
            .collect();
        for m in &members {
            if m.is_empty() || m.len() > 2 {
                return Err(Error::InvalidConstraintSet(format!(
                    "member {m:?} must hold one or two variables"
                )));
            }
        }
        for m in &members {
            if members.iter().any(|o| o != m && m.is_subset(o)) {
                return Err(Error::InvalidConstraintSet(format!(
                    "member {m:?} is implied by another member"
                )));
            }
        }
        let covered: Subset = members.iter().flatten().copied().collect();
        if covered.len() != 3 {
            return Err(Error::InvalidConstraintSet(
                "members must cover Y, B and A".into(),
            ));
        }
        Ok(ConstraintSet { members })
    }

    /// `{Y,B}, {Y,A}, {B,A}`.
    pub fn pairwise() -> Self {
        ConstraintSet::new([[Var::Y, Var::B], [Var::Y, Var::A], [Var::B, Var::A]])
            .expect("valid")
    }

    pub fn members(&self) -> impl Iterator<Item = &Subset> {
        self.members.iter()
    }

    pub fn contains_member(&self, s: &Subset) -> bool {
        self.members.contains(s)
    }

    /// Every member of `self` is contained in some member of `other`, so
    /// preserving `other`'s marginals preserves `self`'s.
    pub fn implied_by(&self, other: &ConstraintSet) -> bool {
        self.members
            .iter()
            .all(|m| other.members.iter().any(|o| m.is_subset(o)))
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.members {
            f.write_str("{")?;
            for v in m {
                write!(f, "{v}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// All constraint sets of a trivariate system, ordered by implication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyLattice {
    nodes: Vec<ConstraintSet>,
    /// Covering pairs `(lower, upper)` as indices into `nodes`.
    edges: Vec<(usize, usize)>,
}

impl DependencyLattice {
    pub fn trivariate() -> Self {
        use Var::*;
        let candidates: [&[Var]; 6] = [&[Y], &[B], &[A], &[Y, B], &[Y, A], &[B, A]];
        let mut nodes = Vec::new();
        for mask in 1u32..(1 << candidates.len()) {
            let members = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.iter().copied());
            if let Ok(cs) = ConstraintSet::new(members) {
                nodes.push(cs);
            }
        }
        // Bottom first, then by number of pairwise members, then lexically.
        nodes.sort_by_key(|cs| (cs.members.iter().filter(|m| m.len() == 2).count(), cs.clone()));

        let below = |i: usize, j: usize| i != j && nodes[i].implied_by(&nodes[j]);
        let mut edges = Vec::new();
        for lo in 0..nodes.len() {
            for hi in 0..nodes.len() {
                if below(lo, hi) && !(0..nodes.len()).any(|m| below(lo, m) && below(m, hi)) {
                    edges.push((lo, hi));
                }
            }
        }
        DependencyLattice { nodes, edges }
    }

    pub fn nodes(&self) -> &[ConstraintSet] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges whose upper end gains the given two-variable constraint.
    pub fn edges_adding(&self, constraint: &Subset) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(lo, hi)| {
                !self.nodes[lo].contains_member(constraint)
                    && self.nodes[hi].contains_member(constraint)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxentConfig {
    /// Largest allowed deviation of any constrained marginal.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for MaxentConfig {
    fn default() -> Self {
        MaxentConfig {
            tolerance: 1e-10,
            max_sweeps: 10_000,
        }
    }
}

/// Flat-index groups for one marginal: `groups[k]` lists the cells summing
/// to marginal entry `k`.
struct MarginalIndex {
    cell_to_entry: Vec<usize>,
    entries: usize,
}

impl MarginalIndex {
    fn new(shape: [usize; 3], vars: &Subset) -> Self {
        let [ny, nb, na] = shape;
        let mut cell_to_entry = Vec::with_capacity(ny * nb * na);
        let mut entries = 1;
        for v in vars {
            entries *= shape[v.axis()];
        }
        for y in 0..ny {
            for b in 0..nb {
                for a in 0..na {
                    let coords = [y, b, a];
                    let idx = vars
                        .iter()
                        .fold(0, |acc, v| acc * shape[v.axis()] + coords[v.axis()]);
                    cell_to_entry.push(idx);
                }
            }
        }
        MarginalIndex {
            cell_to_entry,
            entries,
        }
    }

    fn sum(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.entries];
        for (&e, &v) in self.cell_to_entry.iter().zip(q) {
            out[e] += v;
        }
        out
    }
}

/// The closed-form maximum-entropy table of a constraint set without a
/// cycle: the product of its marginals divided by the marginal of the
/// variable two pairs share, if any. `None` for the pairwise set.
fn decomposable_fit(dist: &JointDistribution, cs: &ConstraintSet) -> Option<Vec<f64>> {
    let pairs: Vec<&Subset> = cs.members().filter(|m| m.len() == 2).collect();
    if pairs.len() == 3 {
        return None;
    }
    let shape = dist.shape();
    let factor = |vars: &Subset| {
        let ix = MarginalIndex::new(shape, vars);
        let m = ix.sum(dist.pmf());
        ix.cell_to_entry.into_iter().map(move |e| m[e]).collect::<Vec<f64>>()
    };
    let mut q = vec![1.0; dist.pmf().len()];
    for m in cs.members() {
        q.iter_mut().zip(factor(m)).for_each(|(v, f)| *v *= f);
    }
    if let [first, second] = pairs[..] {
        let shared: Subset = first.intersection(second).copied().collect();
        for (v, f) in q.iter_mut().zip(factor(&shared)) {
            *v = if f > 0.0 { *v / f } else { 0.0 };
        }
    }
    Some(q)
}

/// The maximum-entropy table matching `dist`'s marginals on every member of
/// `cs`. Constraint sets without a cycle have a closed form; the pairwise
/// set is fitted by iterative proportional fitting from the uniform table on the
/// cells those marginals allow.
///
/// When `dist` leaves some of those cells empty, the cells no table with the
/// same marginals can reach are found first and excluded, so the fit
/// converges geometrically instead of creeping towards the boundary.
pub fn maxent_fit(
    dist: &JointDistribution,
    cs: &ConstraintSet,
    cfg: &MaxentConfig,
) -> Result<JointDistribution> {
    if let Some(q) = decomposable_fit(dist, cs) {
        return dist.with_weights(q);
    }
    let shape = dist.shape();
    let index: Vec<MarginalIndex> = cs.members().map(|m| MarginalIndex::new(shape, m)).collect();
    let targets: Vec<Vec<f64>> = index.iter().map(|ix| ix.sum(dist.pmf())).collect();

    let mut allowed: Vec<bool> = (0..dist.pmf().len())
        .map(|cell| {
            index
                .iter()
                .zip(&targets)
                .all(|(ix, t)| t[ix.cell_to_entry[cell]] > 0.0)
        })
        .collect();
    if allowed.iter().zip(dist.pmf()).any(|(&ok, &v)| ok && v == 0.0) {
        let known: Vec<bool> = dist.pmf().iter().map(|&v| v > 0.0).collect();
        let mut groups = Vec::new();
        for (ix, t) in index.iter().zip(&targets) {
            let mut cells = vec![Vec::new(); ix.entries];
            for (c, &e) in ix.cell_to_entry.iter().enumerate() {
                cells[e].push(c);
            }
            groups.extend(cells.into_iter().zip(t).map(|(cells, &target)| GroupSum { cells, target }));
        }
        allowed = support::reachable_cells(&allowed, &known, &groups)?;
    }
    let mut q: Vec<f64> = allowed.iter().map(|&ok| if ok { 1.0 } else { 0.0 }).collect();
    let total: f64 = q.iter().sum();
    q.iter_mut().for_each(|v| *v /= total);

    let deviation = |q: &[f64]| {
        index
            .iter()
            .zip(&targets)
            .flat_map(|(ix, t)| {
                ix.sum(q)
                    .into_iter()
                    .zip(t)
                    .map(|(c, t)| (c - t).abs())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    };

    let mut dev = deviation(&q);
    let mut sweeps = 0;
    while dev > cfg.tolerance {
        if sweeps == cfg.max_sweeps {
            return Err(Error::MaxentDidNotConverge {
                sweeps,
                deviation: dev,
            });
        }
        sweeps += 1;
        for (ix, t) in index.iter().zip(&targets) {
            let current = ix.sum(&q);
            for (v, &e) in q.iter_mut().zip(&ix.cell_to_entry) {
                if *v > 0.0 {
                    *v *= t[e] / current[e];
                }
            }
        }
        dev = deviation(&q);
    }
    dist.with_weights(q)
}

/// Joint mutual information of the max-ent model at every lattice node.
pub fn node_joint_mi(
    dist: &JointDistribution,
    lattice: &DependencyLattice,
    cfg: &MaxentConfig,
) -> Result<Vec<f64>> {
    lattice
        .nodes()
        .iter()
        .map(|cs| info::summarize(&maxent_fit(dist, cs, cfg)?).map(|s| s.jmi))
        .collect()
}

pub fn pid_dep_with(dist: &JointDistribution, cfg: &MaxentConfig) -> Result<PidComponents> {
    let s = info::summarize(dist)?;
    let lattice = DependencyLattice::trivariate();
    let jmi = node_joint_mi(dist, &lattice, cfg)?;
    let least_gain = |constraint: Subset| {
        lattice
            .edges_adding(&constraint)
            .into_iter()
            .map(|(lo, hi)| jmi[hi] - jmi[lo])
            .fold(f64::INFINITY, f64::min)
    };
    let unq_b = least_gain([Var::Y, Var::B].into_iter().collect()).max(0.0);
    let unq_a = least_gain([Var::Y, Var::A].into_iter().collect()).max(0.0);
    pid::from_uniques(&s, unq_b, unq_a, Method::Idep, Method::Idep.tolerance())
}

pub fn pid_dep(dist: &JointDistribution) -> Result<PidComponents> {
    pid_dep_with(dist, &MaxentConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{copy, unq, xor};

    #[test]
    fn lattice_shape() {
        let l = DependencyLattice::trivariate();
        assert_eq!(l.nodes().len(), 8);
        assert_eq!(l.edges().len(), 12);
        assert_eq!(l.nodes()[0].to_string(), "{Y}{B}{A}");
        assert_eq!(l.nodes()[7], ConstraintSet::pairwise());
        let yb: Subset = [Var::Y, Var::B].into_iter().collect();
        assert_eq!(l.edges_adding(&yb).len(), 4);
        assert_eq!(DependencyLattice::trivariate(), l);
    }

    #[test]
    fn invalid_constraint_sets() {
        assert!(ConstraintSet::new([vec![Var::Y, Var::B]]).is_err());
        assert!(ConstraintSet::new([vec![Var::Y, Var::B], vec![Var::B], vec![Var::A]]).is_err());
        assert!(ConstraintSet::new([vec![Var::Y, Var::B, Var::A]]).is_err());
    }

    #[test]
    fn singletons_give_product_of_marginals() {
        let w: Vec<f64> = (1..=12).map(f64::from).collect();
        let d = JointDistribution::from_weights([2, 3, 2], w).unwrap();
        let cs = ConstraintSet::new([[Var::Y], [Var::B], [Var::A]]).unwrap();
        let m = maxent_fit(&d, &cs, &MaxentConfig::default()).unwrap();
        let py = d.marginal(&[Var::Y]).unwrap();
        let pb = d.marginal(&[Var::B]).unwrap();
        let pa = d.marginal(&[Var::A]).unwrap();
        for ((y, b, a), p) in m.cells() {
            let want = py.pmf()[y] * pb.pmf()[b] * pa.pmf()[a];
            assert!((p - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pairwise_fit_of_xor_is_uniform() {
        let m = maxent_fit(&xor(), &ConstraintSet::pairwise(), &MaxentConfig::default()).unwrap();
        assert!(m.pmf().iter().all(|&p| (p - 0.125).abs() < 1e-12));
    }

    #[test]
    fn canonical_components() {
        let check = |d: &JointDistribution, want: [f64; 4]| {
            let c = pid_dep(d).unwrap();
            for (g, w) in c.as_array().iter().zip(want) {
                assert!((g - w).abs() < 1e-9, "{c:?}");
            }
        };
        check(&xor(), [0.0, 0.0, 0.0, 1.0]);
        check(&copy(), [0.0, 0.0, 1.0, 0.0]);
        check(&unq(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sweep_budget_exhaustion() {
        let w = vec![0.1, 0.05, 0.2, 0.02, 0.08, 0.15, 0.1, 0.3];
        let d = JointDistribution::from_weights([2, 2, 2], w).unwrap();
        let cfg = MaxentConfig {
            tolerance: 1e-16,
            max_sweeps: 3,
        };
        assert!(matches!(
            maxent_fit(&d, &ConstraintSet::pairwise(), &cfg),
            Err(Error::MaxentDidNotConverge { sweeps: 3, .. })
        ));
    }
}
