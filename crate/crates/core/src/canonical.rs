//! Small textbook systems with known decompositions.

use crate::dist::JointDistribution;

fn from_triples(triples: &[(usize, usize, usize)]) -> JointDistribution {
    let mut w = vec![0.0; 8];
    for &(y, b, a) in triples {
        w[(y * 2 + b) * 2 + a] += 1.0;
    }
    JointDistribution::from_weights([2, 2, 2], w).expect("valid table")
}

/// `Y = B xor A` with independent uniform bits: one bit of pure synergy.
pub fn xor() -> JointDistribution {
    from_triples(&[(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)])
}

/// `Y = B = A`, a uniform bit: one bit of shared information.
pub fn copy() -> JointDistribution {
    from_triples(&[(0, 0, 0), (1, 1, 1)])
}

/// `Y = B` with `A` an independent uniform bit: one bit unique to `B`.
pub fn unq() -> JointDistribution {
    from_triples(&[(0, 0, 0), (0, 0, 1), (1, 1, 0), (1, 1, 1)])
}
