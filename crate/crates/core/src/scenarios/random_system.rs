use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::graphs::{build_connectivity_graph, build_hierarchy_graph, build_spatial_graph, distance, Hierarchy, Point};
use crate::error::{Error, Result};
use crate::graph::GraphBundle;

/// Rejection-sampling budget for placing each cluster seed.
pub const PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSystemSpec {
    pub n: usize,
    /// Side of the square arena, meters.
    pub arena: f64,
    pub comm_radius: f64,
    pub n_teams_hint: usize,
    pub seed: u64,
}

impl RandomSystemSpec {
    pub const DEFAULT_ARENA: f64 = 100.0;
    pub const DEFAULT_COMM_RADIUS: f64 = 15.0;

    pub fn new(n: usize, n_teams_hint: usize, seed: u64) -> Self {
        Self { n, arena: Self::DEFAULT_ARENA, comm_radius: Self::DEFAULT_COMM_RADIUS, n_teams_hint, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("a system needs at least 2 robots, got {}", self.n)));
        }
        if !(self.arena > 0.0 && self.arena.is_finite()) {
            return Err(Error::InvalidArgument(format!("arena must be positive, got {}", self.arena)));
        }
        if !(self.comm_radius > 0.0 && self.comm_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("comm radius must be positive, got {}", self.comm_radius)));
        }
        if self.n_teams_hint == 0 {
            return Err(Error::InvalidArgument("team hint must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSystem {
    pub bundle: GraphBundle,
    pub positions: Vec<Point>,
    pub cluster_seeds: Vec<Point>,
}

/// Robots scattered around well-separated cluster seeds.
///
/// Robot `i` belongs to seed `i mod n_teams_hint`. No ground truth is
/// attached; these systems are scored by silhouette only.
pub fn generate_random_system(spec: &RandomSystemSpec) -> Result<RandomSystem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let min_sep = spec.arena / (2.0 * spec.n_teams_hint as f64);
    let mut seeds: Vec<Point> = Vec::with_capacity(spec.n_teams_hint);
    while seeds.len() < spec.n_teams_hint {
        let placed = (0..PLACEMENT_ATTEMPTS).find_map(|_| {
            let p = [rng.random_range(0.0..spec.arena), rng.random_range(0.0..spec.arena)];
            seeds.iter().all(|&q| distance(p, q) >= min_sep).then_some(p)
        });
        match placed {
            Some(p) => seeds.push(p),
            None => {
                return Err(Error::Generation(format!(
                    "could not place cluster seed {} with separation {min_sep} after {PLACEMENT_ATTEMPTS} attempts",
                    seeds.len()
                )))
            }
        }
    }
    let spread = Normal::new(0.0, spec.comm_radius / 2.0).expect("positive spread");
    let positions: Vec<Point> = (0..spec.n)
        .map(|i| {
            let c = seeds[i % seeds.len()];
            [c[0] + spread.sample(&mut rng), c[1] + spread.sample(&mut rng)]
        })
        .collect();
    let graphs = vec![
        build_spatial_graph(&positions)?,
        build_connectivity_graph(&positions, spec.comm_radius, &[])?,
        build_hierarchy_graph(&positions, &Hierarchy::CentralityHeuristic)?,
    ];
    Ok(RandomSystem { bundle: GraphBundle::uniform(graphs, None)?, positions, cluster_seeds: seeds })
}
