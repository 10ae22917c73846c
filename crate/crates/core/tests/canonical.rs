//! The three logic gates against values worked out by hand, each hand value
//! first confirmed by a brute-force oracle.

mod common;

use common::{ccs_shared, dep_uniques, from_shared, grid_min_joint_mi, pm_shared, sx_shared, Table};
use pidcmp::{canonical, decompose, JointDistribution, Method};

/// `log2(3) - 1`: the union event `{B = b} or {A = a}` covers three of the
/// four equally likely XOR triples, and `Y = y` holds in one of those three
/// other than the observed one, so `p(y | union) = 1/3`.
fn xor_sx_shared() -> f64 {
    (1.0f64 / 3.0 / 0.5).log2()
}

fn hand_values() -> Vec<(&'static str, JointDistribution, Method, [f64; 4])> {
    let gates = [
        ("xor", canonical::xor(), [0.0, 0.0, 0.0, 1.0]),
        ("copy", canonical::copy(), [0.0, 0.0, 1.0, 0.0]),
        ("unq", canonical::unq(), [1.0, 0.0, 0.0, 0.0]),
    ];
    let mut out = Vec::new();
    for (name, d, expected) in gates {
        for m in [Method::Ibroja, Method::Idep, Method::Iccs] {
            out.push((name, d.clone(), m, expected));
        }
    }
    out.push(("xor", canonical::xor(), Method::Ipm, [0.0, 0.0, 0.0, 1.0]));
    out.push(("copy", canonical::copy(), Method::Ipm, [0.0, 0.0, 1.0, 0.0]));
    let s = -xor_sx_shared();
    out.push(("xor", canonical::xor(), Method::Isx, [s, s, -s, 1.0 - s]));
    out.push(("copy", canonical::copy(), Method::Isx, [0.0, 0.0, 1.0, 0.0]));
    out
}

fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn hand_values_agree_with_the_oracles() {
    for (name, d, m, expected) in hand_values() {
        let t = Table::of(&d);
        let s = t.shannon();
        let oracle = match m {
            Method::Ibroja => {
                let (min_jmi, _) = grid_min_joint_mi(&t, 1e-3);
                [min_jmi - s.mi_ya, min_jmi - s.mi_yb, s.mi_yb + s.mi_ya - min_jmi, s.jmi - min_jmi]
            }
            Method::Iccs => from_shared(&s, ccs_shared(&t)),
            Method::Ipm => from_shared(&s, pm_shared(&t)),
            Method::Isx => from_shared(&s, sx_shared(&t)),
            Method::Idep => {
                let (ub, ua) = dep_uniques(&t);
                let shd = s.mi_yb - ub;
                [ub, ua, shd, s.jmi - ub - ua - shd]
            }
        };
        assert!(close(oracle, expected, 1e-9), "{name} {m}: oracle {oracle:?} vs hand {expected:?}");
    }
}

#[test]
fn library_matches_hand_values() {
    for (name, d, m, expected) in hand_values() {
        let tol = if matches!(m, Method::Isx) { 1e-6 } else { 1e-4 };
        let got = decompose(&d, m).unwrap().as_array();
        assert!(close(got, expected, tol), "{name} {m}: {got:?} vs {expected:?}");
    }
}

#[test]
fn isx_shared_on_xor_is_log_two_thirds() {
    assert!((xor_sx_shared() - (2.0f64 / 3.0).log2()).abs() < 1e-15);
    let t = Table::of(&canonical::xor());
    assert!((sx_shared(&t) - (2.0f64 / 3.0).log2()).abs() < 1e-12);
}

#[test]
fn pm_on_unq_follows_its_definition() {
    // Minimum specificity is one bit at every realization (both inputs are
    // uniform bits) and minimum ambiguity is zero (B pins Y), so the shared
    // part is a full bit and A's unique part is minus one.
    let t = Table::of(&canonical::unq());
    assert!((pm_shared(&t) - 1.0).abs() < 1e-12);
    let got = decompose(&canonical::unq(), Method::Ipm).unwrap().as_array();
    assert!(close(got, [0.0, -1.0, 1.0, 1.0], 1e-12), "{got:?}");
}
