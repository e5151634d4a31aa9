//! Shared fixtures for the criterion benches.

use hsnake_core::planner::CircleHead;
use hsnake_core::snake::SnakeConfig;
use hsnake_core::{random, LorentzMatrix};

/// Seeded SO0 target in dimension `n`.
pub fn target(n: usize, seed: u64) -> LorentzMatrix {
    random::random_so0(&mut random::rng(seed), n, 1.5)
}

/// Seeded three-segment config together with a small circle through its head.
pub fn config_and_head(n: usize, seed: u64) -> (SnakeConfig, CircleHead) {
    let mut rng = random::rng(seed);
    let u = random::random_config(&mut rng, n, 3).expect("random config");
    let head = random::random_circle_head(&mut rng, &u, 0.05, 1.0);
    (u, head)
}
