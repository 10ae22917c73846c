//! Reference computations for the integration suites, written from the
//! definitions and sharing nothing with the library but the probability
//! table itself. Everything is brute force: marginals by summation,
//! p-values by listing every sign assignment, the constrained minimum by
//! searching a grid over the feasible tables.

#![allow(dead_code)]

use pidcmp::JointDistribution;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// A plain `(Y, B, A)` table.
#[derive(Debug, Clone)]
pub struct Table {
    pub shape: [usize; 3],
    pub p: Vec<f64>,
}

impl Table {
    pub fn of(d: &JointDistribution) -> Self {
        Table {
            shape: d.shape(),
            p: d.pmf().to_vec(),
        }
    }

    pub fn at(&self, y: usize, b: usize, a: usize) -> f64 {
        let [_, nb, na] = self.shape;
        self.p[(y * nb + b) * na + a]
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let [ny, nb, na] = self.shape;
        (0..ny).flat_map(move |y| {
            (0..nb).flat_map(move |b| (0..na).map(move |a| (y, b, a, self.at(y, b, a))))
        })
    }

    /// Marginal over the kept axes, indexed by the full coordinate.
    pub fn marginal(&self, keep: [bool; 3]) -> impl Fn(usize, usize, usize) -> f64 + '_ {
        let [ny, nb, na] = self.shape;
        let dims = [ny, nb, na];
        let mut sums = vec![0.0; ny * nb * na];
        let key = move |c: [usize; 3]| {
            let mut k = 0;
            for axis in 0..3 {
                k = k * dims[axis] + if keep[axis] { c[axis] } else { 0 };
            }
            k
        };
        for (y, b, a, v) in self.cells() {
            sums[key([y, b, a])] += v;
        }
        move |y, b, a| sums[key([y, b, a])]
    }

    pub fn entropy(&self, keep: [bool; 3]) -> f64 {
        let [ny, nb, na] = self.shape;
        let m = self.marginal(keep);
        let mut seen = std::collections::BTreeSet::new();
        let mut h = 0.0;
        for y in 0..ny {
            for b in 0..nb {
                for a in 0..na {
                    let c = [y, b, a];
                    let k: Vec<usize> = (0..3).map(|i| if keep[i] { c[i] } else { 0 }).collect();
                    if seen.insert(k) {
                        let v = m(y, b, a);
                        if v > 0.0 {
                            h -= v * v.log2();
                        }
                    }
                }
            }
        }
        h
    }

    pub fn shannon(&self) -> Shannon {
        let h = |k: [bool; 3]| self.entropy(k);
        let (y, b, a) = (h([true, false, false]), h([false, true, false]), h([false, false, true]));
        let (yb, ya, ba) = (h([true, true, false]), h([true, false, true]), h([false, true, true]));
        let yba = h([true, true, true]);
        let mi_yb = y + b - yb;
        let mi_ya = y + a - ya;
        let jmi = y + ba - yba;
        Shannon {
            h_y: y,
            mi_yb,
            mi_ya,
            cmi_yb_given_a: ya + ba - yba - a,
            cmi_ya_given_b: yb + ba - yba - b,
            jmi,
            ii: jmi - mi_yb - mi_ya,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Shannon {
    pub h_y: f64,
    pub mi_yb: f64,
    pub mi_ya: f64,
    pub cmi_yb_given_a: f64,
    pub cmi_ya_given_b: f64,
    pub jmi: f64,
    pub ii: f64,
}

/// Completes a decomposition from its shared part.
pub fn from_shared(s: &Shannon, shd: f64) -> [f64; 4] {
    [s.mi_yb - shd, s.mi_ya - shd, shd, s.jmi - s.mi_yb - s.mi_ya + shd]
}

/// A table drawn from the flat Dirichlet distribution.
pub fn dirichlet(rng: &mut impl Rng, shape: [usize; 3]) -> JointDistribution {
    let gamma = Gamma::new(1.0, 1.0).unwrap();
    let n = shape.iter().product();
    let w: Vec<f64> = (0..n).map(|_| {
        let g: f64 = gamma.sample(rng);
        g.max(1e-300)
    }).collect();
    JointDistribution::from_weights(shape, w).unwrap()
}

/// Shared information as the expected minimum specificity less the
/// expected minimum ambiguity.
pub fn pm_shared(t: &Table) -> f64 {
    let pb = t.marginal([false, true, false]);
    let pa = t.marginal([false, false, true]);
    let pyb = t.marginal([true, true, false]);
    let pya = t.marginal([true, false, true]);
    let py = t.marginal([true, false, false]);
    t.cells()
        .filter(|c| c.3 > 0.0)
        .map(|(y, b, a, p)| {
            let spec = (-pb(y, b, a).log2()).min(-pa(y, b, a).log2());
            let amb = (-(pyb(y, b, a) / py(y, b, a)).log2()).min(-(pya(y, b, a) / py(y, b, a)).log2());
            p * (spec - amb)
        })
        .sum()
}

/// Shared information from the union event `{B = b} or {A = a}`.
pub fn sx_shared(t: &Table) -> f64 {
    let pb = t.marginal([false, true, false]);
    let pa = t.marginal([false, false, true]);
    let pba = t.marginal([false, true, true]);
    let pyb = t.marginal([true, true, false]);
    let pya = t.marginal([true, false, true]);
    let py = t.marginal([true, false, false]);
    t.cells()
        .filter(|c| c.3 > 0.0)
        .map(|(y, b, a, p)| {
            let union = pb(y, b, a) + pa(y, b, a) - pba(y, b, a);
            let joint = pyb(y, b, a) + pya(y, b, a) - p;
            p * ((joint / union) / py(y, b, a)).log2()
        })
        .sum()
}

/// Maximum-entropy table with the three pairwise marginals, by plain
/// alternating rescaling from the uniform table.
pub fn pairwise_maxent(t: &Table) -> Table {
    let [ny, nb, na] = t.shape;
    let targets = [[true, true, false], [true, false, true], [false, true, true]];
    let mut q = Table {
        shape: t.shape,
        p: vec![1.0 / (ny * nb * na) as f64; ny * nb * na],
    };
    for _ in 0..20_000 {
        let mut worst: f64 = 0.0;
        for keep in targets {
            let want: Vec<f64> = {
                let m = t.marginal(keep);
                q.cells().map(|(y, b, a, _)| m(y, b, a)).collect()
            };
            let have: Vec<f64> = {
                let m = q.marginal(keep);
                q.cells().map(|(y, b, a, _)| m(y, b, a)).collect()
            };
            for ((v, w), h) in q.p.iter_mut().zip(&want).zip(&have) {
                worst = worst.max((w - h).abs());
                *v = if *h > 0.0 { *v * w / h } else { 0.0 };
            }
        }
        if worst < 1e-14 {
            break;
        }
    }
    q
}

/// Shared information as the co-information of the realizations whose
/// local terms agree in sign, on the pairwise maximum-entropy surrogate.
pub fn ccs_shared(t: &Table) -> f64 {
    let q = pairwise_maxent(t);
    let py = q.marginal([true, false, false]);
    let pb = q.marginal([false, true, false]);
    let pa = q.marginal([false, false, true]);
    let pba = q.marginal([false, true, true]);
    let pyb = q.marginal([true, true, false]);
    let pya = q.marginal([true, false, true]);
    q.cells()
        .filter(|c| c.3 > 0.0)
        .map(|(y, b, a, p)| {
            let iy_b = (pyb(y, b, a) / (py(y, b, a) * pb(y, b, a))).log2();
            let iy_a = (pya(y, b, a) / (py(y, b, a) * pa(y, b, a))).log2();
            let iy_ba = (p / (py(y, b, a) * pba(y, b, a))).log2();
            let c = iy_b + iy_a - iy_ba;
            let agree = [iy_b, iy_a, iy_ba]
                .iter()
                .all(|v| *v == 0.0 || v.signum() == c.signum());
            if c != 0.0 && agree {
                p * c
            } else {
                0.0
            }
        })
        .sum()
}

/// Product of the given marginals of `t`, divided by the marginal of the
/// variables two of them share.
fn product_fit(t: &Table, factors: &[[bool; 3]], shared: Option<[bool; 3]>) -> Table {
    let ms: Vec<_> = factors.iter().map(|&k| t.marginal(k)).collect();
    let sep = shared.map(|k| t.marginal(k));
    let p = t
        .cells()
        .map(|(y, b, a, _)| {
            let num: f64 = ms.iter().map(|m| m(y, b, a)).product();
            match &sep {
                Some(s) if s(y, b, a) > 0.0 => num / s(y, b, a),
                Some(_) => 0.0,
                None => num,
            }
        })
        .collect();
    Table { shape: t.shape, p }
}

/// Unique informations from the dependency lattice: for each input, the
/// smallest rise in `I(Y; B, A)` along the four lattice edges that add that
/// input's pairing with `Y`.
pub fn dep_uniques(t: &Table) -> (f64, f64) {
    const Y: [bool; 3] = [true, false, false];
    const B: [bool; 3] = [false, true, false];
    const A: [bool; 3] = [false, false, true];
    const YB: [bool; 3] = [true, true, false];
    const YA: [bool; 3] = [true, false, true];
    const BA: [bool; 3] = [false, true, true];
    let jmi = |q: Table| joint_mi(&q);
    let y_b_a = jmi(product_fit(t, &[Y, B, A], None));
    let y_ba = jmi(product_fit(t, &[Y, BA], None));
    let yb_a = jmi(product_fit(t, &[YB, A], None));
    let ya_b = jmi(product_fit(t, &[YA, B], None));
    let yb_ya = jmi(product_fit(t, &[YB, YA], Some(Y)));
    let yb_ba = jmi(product_fit(t, &[YB, BA], Some(B)));
    let ya_ba = jmi(product_fit(t, &[YA, BA], Some(A)));
    let top = jmi(pairwise_maxent(t));
    let unq_b = [yb_a - y_b_a, yb_ya - ya_b, yb_ba - y_ba, top - ya_ba]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let unq_a = [ya_b - y_b_a, yb_ya - yb_a, ya_ba - y_ba, top - yb_ba]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    (unq_b, unq_a)
}

/// `I(Y; B, A)` of a table.
pub fn joint_mi(t: &Table) -> f64 {
    t.shannon().jmi
}

/// Smallest `I(Y; B, A)` over tables sharing the `(Y, B)` and `(Y, A)`
/// marginals of `t`, found by searching the free entries of every
/// `Y`-slice on a grid. Each slice is a `nb x na` table with fixed row and
/// column sums; its free entries are those outside the last row and column.
///
/// With at most two free entries in total the whole grid at `step` is
/// searched. Otherwise the search starts at a coarse grid and repeatedly
/// re-centres a finer one on the best point until it reaches `step`.
pub fn grid_min_joint_mi(t: &Table, step: f64) -> (f64, Table) {
    let [ny, nb, na] = t.shape;
    let rows = t.marginal([true, true, false]);
    let cols = t.marginal([true, false, true]);
    let free: Vec<(usize, usize, usize)> = (0..ny)
        .flat_map(|y| (0..nb - 1).flat_map(move |b| (0..na - 1).map(move |a| (y, b, a))))
        .collect();
    let upper: Vec<f64> = free
        .iter()
        .map(|&(y, b, a)| rows(y, b, 0).min(cols(y, 0, a)))
        .collect();

    let build = |x: &[f64]| -> Option<Table> {
        let mut q = vec![0.0; ny * nb * na];
        let idx = |y: usize, b: usize, a: usize| (y * nb + b) * na + a;
        for (&(y, b, a), &v) in free.iter().zip(x) {
            q[idx(y, b, a)] = v;
        }
        for y in 0..ny {
            for b in 0..nb - 1 {
                let used: f64 = (0..na - 1).map(|a| q[idx(y, b, a)]).sum();
                q[idx(y, b, na - 1)] = rows(y, b, 0) - used;
            }
            for a in 0..na {
                let used: f64 = (0..nb - 1).map(|b| q[idx(y, b, a)]).sum();
                q[idx(y, nb - 1, a)] = cols(y, 0, a) - used;
            }
        }
        if q.iter().any(|&v| v < -1e-15) {
            return None;
        }
        Some(Table {
            shape: t.shape,
            p: q.into_iter().map(|v| v.max(0.0)).collect(),
        })
    };

    let mut best = (f64::INFINITY, t.clone());
    let mut consider = |x: &[f64], best: &mut (f64, Table)| {
        if let Some(q) = build(x) {
            let v = joint_mi(&q);
            if v < best.0 {
                *best = (v, q);
            }
        }
    };
    let search = |lo: &[f64], hi: &[f64], h: f64, best: &mut (f64, Table), consider: &mut dyn FnMut(&[f64], &mut (f64, Table))| {
        let counts: Vec<usize> = lo.iter().zip(hi).map(|(l, u)| ((u - l) / h).floor() as usize + 1).collect();
        let mut i = vec![0usize; lo.len()];
        loop {
            let x: Vec<f64> = i.iter().zip(lo).map(|(&k, &l)| l + k as f64 * h).collect();
            consider(&x, best);
            let mut d = 0;
            loop {
                if d == i.len() {
                    return;
                }
                i[d] += 1;
                if i[d] < counts[d] {
                    break;
                }
                i[d] = 0;
                d += 1;
            }
        }
    };

    if free.len() <= 2 {
        let lo = vec![0.0; free.len()];
        search(&lo, &upper, step, &mut best, &mut consider);
        return best;
    }
    let widest = upper.iter().cloned().fold(0.0, f64::max);
    let mut h = widest / 16.0;
    let lo = vec![0.0; free.len()];
    search(&lo, &upper, h, &mut best, &mut consider);
    loop {
        let centre: Vec<f64> = free.iter().map(|&(y, b, a)| best.1.at(y, b, a)).collect();
        let next = (h / 4.0).max(step);
        let lo: Vec<f64> = centre.iter().map(|c| (c - 2.0 * h).max(0.0)).collect();
        let hi: Vec<f64> = centre.iter().zip(&upper).map(|(c, u)| (c + 2.0 * h).min(*u)).collect();
        search(&lo, &hi, next, &mut best, &mut consider);
        if next <= step {
            return best;
        }
        h = next;
    }
}

/// Twice the mid-rank of every magnitude, by counting.
fn doubled_midranks(abs: &[f64]) -> Vec<u64> {
    abs.iter()
        .map(|&x| {
            let below = abs.iter().filter(|&&y| y < x).count() as u64;
            let equal = abs.iter().filter(|&&y| y == x).count() as u64;
            2 * below + equal + 1
        })
        .collect()
}

/// Exact two-sided signed-rank p-value and `W+` by listing all `2^n` sign
/// assignments of the non-zero differences.
pub fn wilcoxon_by_enumeration(diffs: &[f64]) -> (f64, f64) {
    let nz: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    let n = nz.len();
    let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
    let r = doubled_midranks(&abs);
    let total: u64 = r.iter().sum();
    let observed: u64 = r.iter().zip(&nz).filter(|(_, &d)| d > 0.0).map(|(r, _)| r).sum();
    let far = |s: u64| (2 * s).abs_diff(total);
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let s: u64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| r[i]).sum();
        if far(s) >= far(observed) {
            extreme += 1;
        }
    }
    (extreme as f64 / (1u64 << n) as f64, observed as f64 / 2.0)
}
