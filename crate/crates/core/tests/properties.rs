//! Property tests over generated tables, samples and trial sets.

mod common;

use common::wilcoxon_by_enumeration;
use pidcmp::ingest::{self, BinningConfig, Condition, TrialRecord};
use pidcmp::stats::{bonferroni, wilcoxon_exact};
use pidcmp::{info, ledger, Var, JointDistribution, Method};
use proptest::prelude::*;

/// Tables up to 4 x 4 x 4 with some empty cells.
fn table() -> impl Strategy<Value = JointDistribution> {
    (2usize..=4, 2usize..=4, 2usize..=4)
        .prop_flat_map(|(ny, nb, na)| {
            let cell = prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0];
            (Just([ny, nb, na]), prop::collection::vec(cell, ny * nb * na))
        })
        .prop_filter_map("some mass", |(shape, w)| JointDistribution::from_weights(shape, w).ok())
}

/// Paired differences with ties and zeros.
fn differences(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-4i32..=4).prop_map(|k| k as f64 * 0.25), 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn chain_rule(d in table()) {
        let s = info::summarize(&d).unwrap();
        prop_assert!((s.jmi - s.mi_yb - s.cmi_ya_given_b).abs() < 1e-10);
        prop_assert!((s.jmi - s.mi_ya - s.cmi_yb_given_a).abs() < 1e-10);
        prop_assert!((s.ii - (s.jmi - s.mi_yb - s.mi_ya)).abs() < 1e-12);
    }

    #[test]
    fn local_terms_average_to_the_mutual_information(d in table()) {
        for (u, v) in [(&[Var::Y][..], &[Var::B][..]), (&[Var::Y], &[Var::A]), (&[Var::Y], &[Var::B, Var::A])] {
            let mean: f64 = info::local_terms(&d, u, v)
                .unwrap()
                .iter()
                .map(|t| t.probability * t.local_value)
                .sum();
            let mi = if v.len() == 2 {
                info::joint_mi(&d).unwrap()
            } else {
                info::mutual_information(&d, u[0], v[0]).unwrap()
            };
            prop_assert!((mean - mi).abs() < 1e-10, "{mean} vs {mi}");
        }
    }

    #[test]
    fn ledger_columns_sum_to_components(d in table()) {
        for m in [Method::Iccs, Method::Ipm, Method::Isx] {
            let c = pidcmp::decompose(&d, m).unwrap();
            let sums = ledger(&d, m).unwrap().expect("pointwise method").column_sums();
            for (s, v) in sums.iter().zip(c.as_array()) {
                prop_assert!((s - v).abs() <= 1e-9, "{m}: {sums:?} vs {:?}", c.as_array());
            }
        }
    }

    #[test]
    fn wilcoxon_matches_enumeration(d in differences(10)) {
        match wilcoxon_exact(&d) {
            Ok(r) => {
                let (p, w) = wilcoxon_by_enumeration(&d);
                prop_assert_eq!(r.p_value, p);
                prop_assert_eq!(r.w_plus, w);
            }
            Err(_) => prop_assert!(d.iter().all(|&x| x == 0.0)),
        }
    }

    #[test]
    fn wilcoxon_is_sign_symmetric(d in differences(30)) {
        prop_assume!(d.iter().any(|&x| x != 0.0));
        let flipped: Vec<f64> = d.iter().map(|x| -x).collect();
        let (r, s) = (wilcoxon_exact(&d).unwrap(), wilcoxon_exact(&flipped).unwrap());
        prop_assert_eq!(r.p_value, s.p_value);
        let n = r.n as f64;
        prop_assert_eq!(r.w_plus + s.w_plus, n * (n + 1.0) / 2.0);
        prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn bonferroni_is_min_mp_one(p in 0.0f64..=1.0, q in 0.0f64..=1.0, m in 1usize..20) {
        prop_assert_eq!(bonferroni(p, m).unwrap(), (m as f64 * p).min(1.0));
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(bonferroni(lo, m).unwrap() <= bonferroni(hi, m).unwrap());
        prop_assert!(bonferroni(p, m).unwrap() <= bonferroni(p, m + 1).unwrap());
        prop_assert!(bonferroni(p, m).unwrap() >= p);
    }

    #[test]
    fn quantile_bins_keep_order(values in prop::collection::vec(0u8..12, 4..60), k in 2usize..5) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let distinct = values.iter().map(|v| v.to_bits()).collect::<std::collections::BTreeSet<_>>().len();
        match ingest::bin_quantile(&values, k) {
            Ok(bins) => {
                prop_assert!(distinct >= k);
                for i in 0..values.len() {
                    for j in 0..values.len() {
                        if values[i] < values[j] {
                            prop_assert!(bins[i] <= bins[j]);
                        }
                        if values[i] == values[j] {
                            prop_assert_eq!(bins[i], bins[j]);
                        }
                    }
                }
                for b in 0..k {
                    prop_assert!(bins.contains(&b), "bin {b} empty");
                }
            }
            Err(_) => prop_assert!(distinct < k),
        }
    }

    #[test]
    fn distinct_values_fill_bins_evenly(
        order in (8usize..80).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle()),
        k in 2usize..6,
    ) {
        let values: Vec<f64> = order.into_iter().map(|i| i as f64).collect();
        let bins = ingest::bin_quantile(&values, k).unwrap();
        let sizes: Vec<usize> = (0..k).map(|b| bins.iter().filter(|&&x| x == b).count()).collect();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(hi - lo <= 1, "{sizes:?}");
    }

    #[test]
    fn ingested_trials_are_count_frequencies(
        rows in prop::collection::vec((0u8..6, 0u8..6, 0u64..5), 8..80),
    ) {
        let records: Vec<TrialRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, &(b, a, s))| TrialRecord {
                unit_id: "u".into(),
                condition: Condition::Control,
                bin_index: i as u32,
                mean_basal: b as f64,
                mean_apical: a as f64,
                spike_count: s,
            })
            .collect();
        let cfg = BinningConfig::new(2, "0,1,2+".parse().unwrap()).unwrap();
        if let Ok(d) = ingest::ingest_trials(&records, &cfg) {
            prop_assert_eq!(d.shape(), [3, 2, 2]);
            let n = records.len() as f64;
            let total: f64 = d.pmf().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for &p in d.pmf() {
                prop_assert!(((p * n) - (p * n).round()).abs() < 1e-9);
            }
            let silent = records.iter().filter(|r| r.spike_count == 0).count() as f64;
            let p_silent: f64 = (0..2).flat_map(|b| (0..2).map(move |a| (b, a))).map(|(b, a)| d.p(0, b, a)).sum();
            prop_assert!((p_silent - silent / n).abs() < 1e-12);
        }
    }
}
