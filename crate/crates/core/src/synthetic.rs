//! Synthetic datasets with known qualitative structure, for demonstrations
//! and tests. Neither is a recording or a published simulation output.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Poisson};

use crate::ingest::{Condition, GridRecord, TrialRecord};

/// Spikes of a toy layer-5 cell driven by `basal` synapses and modulated by
/// `apical` ones: silent below 20 basal synapses, firing from 150 basal
/// synapses without context, and with context lowering that threshold once
/// some drive is present. At most four spikes.
pub fn toy_spike_count(basal: u32, apical: u32) -> u64 {
    if basal < 20 {
        return 0;
    }
    let effective = basal as f64 + if basal >= 30 { apical as f64 } else { 0.0 };
    if effective < 150.0 {
        0
    } else {
        (((effective - 150.0) / 40.0).floor() as u64 + 1).min(4)
    }
}

/// A 31 x 21 grid of basal 0..=300 and apical 0..=200 synapses in steps of
/// ten, filled by [`toy_spike_count`].
pub fn shai_like_grid() -> Vec<GridRecord> {
    let mut out = Vec::with_capacity(31 * 21);
    for b in (0..=300).step_by(10) {
        for a in (0..=200).step_by(10) {
            out.push(GridRecord {
                n_basal: b,
                n_apical: a,
                spike_count: toy_spike_count(b, a),
            });
        }
    }
    out
}

/// Trials of `n_units` units under both conditions. Each unit sees an
/// 8 x 8 set of stimulus amplitudes, five time bins each; spike counts are
/// Poisson with a rate dominated by the basal amplitude. The treatment
/// weakens the apical contribution. Units are named `u01`, `u02`, ...
pub fn basal_dominant_trials(n_units: usize, seed: u64) -> Vec<TrialRecord> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    for u in 0..n_units {
        let unit_id = format!("u{:02}", u + 1);
        let offset = 5.0 * u as f64;
        for condition in [Condition::Control, Condition::Treatment] {
            let apical_gain = match condition {
                Condition::Control => 0.4,
                Condition::Treatment => 0.1,
            };
            for bi in 0..8u32 {
                for ai in 0..8u32 {
                    let rate = 0.1 + 2.5 * bi as f64 / 7.0 + apical_gain * ai as f64 / 7.0;
                    let poisson = Poisson::new(rate).expect("positive rate");
                    for bin_index in 0..5 {
                        out.push(TrialRecord {
                            unit_id: unit_id.clone(),
                            condition,
                            bin_index,
                            mean_basal: 50.0 * (bi + 1) as f64 + offset,
                            mean_apical: 40.0 * (ai + 1) as f64 + offset,
                            spike_count: poisson.sample(&mut rng) as u64,
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_rules() {
        let g = shai_like_grid();
        assert_eq!(g.len(), 651);
        assert!(g.iter().filter(|r| r.n_basal <= 10).all(|r| r.spike_count == 0));
        assert_eq!(toy_spike_count(140, 0), 0);
        assert_eq!(toy_spike_count(150, 0), 1);
        assert_eq!(toy_spike_count(40, 110), 1);
        assert_eq!(toy_spike_count(300, 200), 4);
    }

    #[test]
    fn trials_are_reproducible() {
        assert_eq!(basal_dominant_trials(2, 9), basal_dominant_trials(2, 9));
        assert_eq!(basal_dominant_trials(3, 1).len(), 3 * 2 * 64 * 5);
    }
}
