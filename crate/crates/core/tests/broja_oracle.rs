//! The constrained minimizer against an exhaustive grid over the tables
//! sharing the two input-output marginals.

mod common;

use common::{dirichlet, grid_min_joint_mi, joint_mi, Table};
use pidcmp::broja::{minimize_joint_mi, SolverConfig};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn no_grid_point_beats_the_solver() {
    let mut rng = StdRng::seed_from_u64(21);
    for draw in 0..8 {
        let shape = if draw % 2 == 0 { [2, 2, 2] } else { [2, 2, 3] };
        let d = dirichlet(&mut rng, shape);
        let (q, report) = minimize_joint_mi(&d, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let solver = joint_mi(&Table::of(&q));
        let (grid, _) = grid_min_joint_mi(&Table::of(&d), 1e-3);
        assert!(grid >= solver - 1e-4, "draw {draw}: grid {grid} vs solver {solver}");
        // The grid is coarse, so it may sit above the optimum, but not far.
        assert!(grid - solver < 1e-2, "draw {draw}: grid {grid} vs solver {solver}");
    }
}

#[test]
fn solution_keeps_both_marginals() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..20 {
        let d = dirichlet(&mut rng, [3, 4, 3]);
        let (q, report) = minimize_joint_mi(&d, &SolverConfig::default()).unwrap();
        assert!(report.max_constraint_violation <= 1e-10);
        let (t, u) = (Table::of(&d), Table::of(&q));
        for keep in [[true, true, false], [true, false, true]] {
            let (m, n) = (t.marginal(keep), u.marginal(keep));
            for y in 0..3 {
                for b in 0..4 {
                    for a in 0..3 {
                        assert!((m(y, b, a) - n(y, b, a)).abs() <= 1e-10);
                    }
                }
            }
        }
        assert!(report.objective - report.lower_bound <= 1e-7);
    }
}
