//! Decompositions defined realization by realization: common change in
//! surprisal (`Iccs`), specificity/ambiguity minima (`Ipm`) and shared
//! exclusions (`Isx`).
//!
//! Each method yields a local shared term per realization; its expectation is
//! the shared information and the other components follow from the linking
//! identities. Local terms can be negative, so components can be too.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dep::{self, ConstraintSet, MaxentConfig};
use crate::dist::JointDistribution;
use crate::error::Result;
use crate::info::{self, InfoSummary};
use crate::pid::{self, Method, PidComponents};

/// Local values closer to zero than this are treated as exactly zero when
/// comparing signs.
pub const LOCAL_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub y: usize,
    pub b: usize,
    pub a: usize,
    /// Weight of the realization in the expectations below.
    pub p: f64,
    pub local_shd: f64,
    pub local_unqb: f64,
    pub local_unqa: f64,
    pub local_syn: f64,
}

/// Per-realization contributions whose `p`-weighted column sums are the
/// reported components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseLedger {
    pub method: Method,
    pub rows: Vec<LedgerRow>,
}

impl PointwiseLedger {
    pub fn column_sums(&self) -> [f64; 4] {
        let mut s = [0.0; 4];
        for r in &self.rows {
            s[0] += r.p * r.local_unqb;
            s[1] += r.p * r.local_unqa;
            s[2] += r.p * r.local_shd;
            s[3] += r.p * r.local_syn;
        }
        s
    }

    /// Writes `y,b,a,p,local_shd,local_unqb,local_unqa,local_syn`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "y",
            "b",
            "a",
            "p",
            "local_shd",
            "local_unqb",
            "local_unqa",
            "local_syn",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.y.to_string(),
                r.b.to_string(),
                r.a.to_string(),
                r.p.to_string(),
                r.local_shd.to_string(),
                r.local_unqb.to_string(),
                r.local_unqa.to_string(),
                r.local_syn.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Marginal tables of one distribution, for local lookups.
struct Tables {
    shape: [usize; 3],
    p: Vec<f64>,
    y: Vec<f64>,
    b: Vec<f64>,
    a: Vec<f64>,
    yb: Vec<f64>,
    ya: Vec<f64>,
    ba: Vec<f64>,
}

impl Tables {
    fn of(d: &JointDistribution) -> Self {
        let [ny, nb, na] = d.shape();
        let yb = d.table_yb();
        let ya = d.table_ya();
        let ba = d.table_ba();
        let mut y = vec![0.0; ny];
        let mut b = vec![0.0; nb];
        let mut a = vec![0.0; na];
        for yi in 0..ny {
            for bi in 0..nb {
                y[yi] += yb[yi * nb + bi];
                b[bi] += yb[yi * nb + bi];
            }
        }
        for bi in 0..nb {
            for ai in 0..na {
                a[ai] += ba[bi * na + ai];
            }
        }
        Tables {
            shape: d.shape(),
            p: d.pmf().to_vec(),
            y,
            b,
            a,
            yb,
            ya,
            ba,
        }
    }

    fn support(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let [ny, nb, na] = self.shape;
        (0..ny).flat_map(move |y| {
            (0..nb).flat_map(move |b| {
                (0..na).filter_map(move |a| {
                    let p = self.p[(y * nb + b) * na + a];
                    (p > 0.0).then_some((y, b, a, p))
                })
            })
        })
    }

    fn p_yb(&self, y: usize, b: usize) -> f64 {
        self.yb[y * self.shape[1] + b]
    }

    fn p_ya(&self, y: usize, a: usize) -> f64 {
        self.ya[y * self.shape[2] + a]
    }

    fn p_ba(&self, b: usize, a: usize) -> f64 {
        self.ba[b * self.shape[2] + a]
    }

    /// `i(y; b)`
    fn i_yb(&self, y: usize, b: usize) -> f64 {
        (self.p_yb(y, b) / (self.y[y] * self.b[b])).log2()
    }

    /// `i(y; a)`
    fn i_ya(&self, y: usize, a: usize) -> f64 {
        (self.p_ya(y, a) / (self.y[y] * self.a[a])).log2()
    }

    /// `i(y; b, a)`
    fn i_yba(&self, y: usize, b: usize, a: usize, p: f64) -> f64 {
        (p / (self.y[y] * self.p_ba(b, a))).log2()
    }
}

fn row(y: usize, b: usize, a: usize, p: f64, shd: f64, ib: f64, ia: f64, iba: f64) -> LedgerRow {
    LedgerRow {
        y,
        b,
        a,
        p,
        local_shd: shd,
        local_unqb: ib - shd,
        local_unqa: ia - shd,
        local_syn: iba - ib - ia + shd,
    }
}

/// A local co-information counts as shared only when it is non-zero and
/// every non-zero local term agrees with its sign.
fn ccs_contribution(ib: f64, ia: f64, iba: f64) -> f64 {
    let c = ib + ia - iba;
    if c.abs() <= LOCAL_ZERO {
        return 0.0;
    }
    let agrees = |t: f64| t.abs() <= LOCAL_ZERO || t.signum() == c.signum();
    if agrees(ib) && agrees(ia) && agrees(iba) {
        c
    } else {
        0.0
    }
}

fn finish(
    s: &InfoSummary,
    shd: f64,
    method: Method,
    rows: Option<Vec<LedgerRow>>,
) -> (PidComponents, Option<PointwiseLedger>) {
    (
        pid::from_shared(s, shd, method),
        rows.map(|rows| PointwiseLedger { method, rows }),
    )
}

/// `Iccs`: expected local co-information over realizations where it agrees
/// in sign with all three local mutual informations, evaluated on the
/// pairwise maximum-entropy surrogate of `dist`.
pub fn pid_ccs_with(
    dist: &JointDistribution,
    cfg: &MaxentConfig,
    ledger: bool,
) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    let s = info::summarize(dist)?;
    let surrogate = dep::maxent_fit(dist, &ConstraintSet::pairwise(), cfg)?;
    let t = Tables::of(&surrogate);
    let observed = Tables::of(dist);
    let [_, nb, na] = t.shape;
    let mut shd = 0.0;
    let mut rows = ledger.then(Vec::new);
    for (y, b, a, p) in t.support() {
        let ib = t.i_yb(y, b);
        let ia = t.i_ya(y, a);
        let iba = t.i_yba(y, b, a, p);
        let local = ccs_contribution(ib, ia, iba);
        shd += p * local;
        if let Some(rows) = rows.as_mut() {
            // The synergy column carries the observed joint term, reweighted
            // to the surrogate, so the column still sums to the synergy.
            let p_obs = observed.p[(y * nb + b) * na + a];
            let iba_obs = if p_obs > 0.0 {
                p_obs / p * observed.i_yba(y, b, a, p_obs)
            } else {
                0.0
            };
            rows.push(row(y, b, a, p, local, ib, ia, iba_obs));
        }
    }
    Ok(finish(&s, shd, Method::Iccs, rows))
}

pub fn pid_ccs(dist: &JointDistribution) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    pid_ccs_with(dist, &MaxentConfig::default(), true)
}

/// `Ipm`: expected difference between the smaller specificity
/// `min(h(b), h(a))` and the smaller ambiguity `min(h(b|y), h(a|y))`.
pub fn pid_pm_with(
    dist: &JointDistribution,
    ledger: bool,
) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    let s = info::summarize(dist)?;
    let t = Tables::of(dist);
    let mut shd = 0.0;
    let mut rows = ledger.then(Vec::new);
    for (y, b, a, p) in t.support() {
        let spec_b = -t.b[b].log2();
        let spec_a = -t.a[a].log2();
        let amb_b = -(t.p_yb(y, b) / t.y[y]).log2();
        let amb_a = -(t.p_ya(y, a) / t.y[y]).log2();
        let local = spec_b.min(spec_a) - amb_b.min(amb_a);
        shd += p * local;
        if let Some(rows) = rows.as_mut() {
            rows.push(row(y, b, a, p, local, t.i_yb(y, b), t.i_ya(y, a), t.i_yba(y, b, a, p)));
        }
    }
    Ok(finish(&s, shd, Method::Ipm, rows))
}

pub fn pid_pm(dist: &JointDistribution) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    pid_pm_with(dist, true)
}

/// `Isx`: expected log-ratio of `p(y | B = b or A = a)` to `p(y)`.
pub fn pid_sx_with(
    dist: &JointDistribution,
    ledger: bool,
) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    let s = info::summarize(dist)?;
    let t = Tables::of(dist);
    let mut shd = 0.0;
    let mut rows = ledger.then(Vec::new);
    for (y, b, a, p) in t.support() {
        let union = t.b[b] + t.a[a] - t.p_ba(b, a);
        let joint = t.p_yb(y, b) + t.p_ya(y, a) - p;
        let local = (joint / union / t.y[y]).log2();
        shd += p * local;
        if let Some(rows) = rows.as_mut() {
            rows.push(row(y, b, a, p, local, t.i_yb(y, b), t.i_ya(y, a), t.i_yba(y, b, a, p)));
        }
    }
    Ok(finish(&s, shd, Method::Isx, rows))
}

pub fn pid_sx(dist: &JointDistribution) -> Result<(PidComponents, Option<PointwiseLedger>)> {
    pid_sx_with(dist, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{copy, unq, xor};

    type Pid = fn(&JointDistribution) -> Result<(PidComponents, Option<PointwiseLedger>)>;

    fn check(f: Pid, d: &JointDistribution, want: [f64; 4], tol: f64) {
        let (c, ledger) = f(d).unwrap();
        for (g, w) in c.as_array().iter().zip(want) {
            assert!((g - w).abs() <= tol, "{c:?} vs {want:?}");
        }
        let sums = ledger.unwrap().column_sums();
        for (g, w) in sums.iter().zip(c.as_array()) {
            assert!((g - w).abs() <= 1e-9, "{sums:?} vs {c:?}");
        }
    }

    #[test]
    fn ccs_canonical() {
        check(pid_ccs, &xor(), [0.0, 0.0, 0.0, 1.0], 1e-9);
        check(pid_ccs, &copy(), [0.0, 0.0, 1.0, 0.0], 1e-9);
        check(pid_ccs, &unq(), [1.0, 0.0, 0.0, 0.0], 1e-9);
    }

    #[test]
    fn pm_canonical() {
        check(pid_pm, &xor(), [0.0, 0.0, 0.0, 1.0], 1e-12);
        check(pid_pm, &copy(), [0.0, 0.0, 1.0, 0.0], 1e-12);
        // Both inputs are equally specific and B is unambiguous, so the
        // independent input is charged a bit of misinformation.
        check(pid_pm, &unq(), [0.0, -1.0, 1.0, 1.0], 1e-12);
    }

    #[test]
    fn sx_canonical() {
        let l = (2.0f64 / 3.0).log2();
        check(pid_sx, &xor(), [-l, -l, l, 1.0 + l], 1e-12);
        check(pid_sx, &copy(), [0.0, 0.0, 1.0, 0.0], 1e-12);
    }

    #[test]
    fn ccs_sign_rule() {
        assert_eq!(ccs_contribution(1.0, 1.0, 1.0), 1.0);
        assert_eq!(ccs_contribution(1.0, 0.0, 0.5), 0.5);
        // c > 0 but i(y;b,a) < 0 disagrees.
        assert_eq!(ccs_contribution(1.0, 0.5, -0.2), 0.0);
        assert_eq!(ccs_contribution(-1.0, -1.0, -0.5), -1.5);
        assert_eq!(ccs_contribution(0.5, 0.5, 1.0), 0.0);
    }

    #[test]
    fn ledger_csv_header() {
        let (_, ledger) = pid_sx(&xor()).unwrap();
        let mut buf = Vec::new();
        ledger.unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("y,b,a,p,local_shd,local_unqb,local_unqa,local_syn\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
