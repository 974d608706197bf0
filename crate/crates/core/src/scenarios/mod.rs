//! Procedural multi-robot systems with their modality graphs.

mod formation;
mod graphs;
mod random_system;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use formation::{generate_formation, Formation, FormationFamily, FormationSpec, COMM_RANGE, JITTER};
pub use graphs::{
    apply_distance_noise, build_connectivity_graph, build_hierarchy_graph, build_spatial_graph, distance,
    distance_matrix, gaussian_weight, median_pairwise, perturb_distances, segments_intersect,
    spatial_graph_from_distances, tier_one_count, Hierarchy, NoiseModel, NoiseSpec, Point, Segment,
};
pub use random_system::{generate_random_system, RandomSystem, RandomSystemSpec, PLACEMENT_ATTEMPTS};

use crate::error::{Error, Result};
use crate::graph::GraphBundle;

pub const DEFAULT_SPACING: f64 = 5.0;

fn default_spacing() -> f64 {
    DEFAULT_SPACING
}

fn default_arena() -> f64 {
    RandomSystemSpec::DEFAULT_ARENA
}

fn default_comm_radius() -> f64 {
    RandomSystemSpec::DEFAULT_COMM_RADIUS
}

/// Scenario spec document: which generator to run and with what parameters.
///
/// ```json
/// {"generator": "formation", "family": "platoon_vee", "spacing": 5.0, "seed": 1}
/// {"generator": "random_system", "n": 50, "n_teams_hint": 3, "seed": 1}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Formation {
        family: FormationFamily,
        #[serde(default = "default_spacing")]
        spacing: f64,
        #[serde(default)]
        seed: u64,
    },
    RandomSystem {
        n: usize,
        n_teams_hint: usize,
        #[serde(default = "default_arena")]
        arena: f64,
        #[serde(default = "default_comm_radius")]
        comm_radius: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl ScenarioSpec {
    /// Parses a shorthand: a formation name (`platoon_vee`) or
    /// `random:<n>:<teams>`.
    pub fn parse_shorthand(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("random:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let parse = |p: &str| p.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad scenario `{s}`")));
            return match parts.as_slice() {
                [n, h] => Ok(ScenarioSpec::RandomSystem {
                    n: parse(n)?,
                    n_teams_hint: parse(h)?,
                    arena: default_arena(),
                    comm_radius: default_comm_radius(),
                    seed: 0,
                }),
                _ => Err(Error::InvalidArgument(format!("expected random:<n>:<teams>, got `{s}`"))),
            };
        }
        Ok(ScenarioSpec::Formation { family: s.parse()?, spacing: DEFAULT_SPACING, seed: 0 })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario spec: {e}")))
    }

    /// Reads a spec file, or falls back to the shorthand when no such file exists.
    pub fn load_or_parse(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            Self::from_json(&fs::read_to_string(path)?)
        } else {
            Self::parse_shorthand(arg)
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ScenarioSpec::Formation { seed, .. } | ScenarioSpec::RandomSystem { seed, .. } => *seed,
        }
    }

    pub fn with_seed(self, new_seed: u64) -> Self {
        match self {
            ScenarioSpec::Formation { family, spacing, .. } => ScenarioSpec::Formation { family, spacing, seed: new_seed },
            ScenarioSpec::RandomSystem { n, n_teams_hint, arena, comm_radius, .. } => {
                ScenarioSpec::RandomSystem { n, n_teams_hint, arena, comm_radius, seed: new_seed }
            }
        }
    }

    /// Stable identifier used in result tables.
    pub fn id(&self) -> String {
        match self {
            ScenarioSpec::Formation { family, .. } => family.name().to_string(),
            ScenarioSpec::RandomSystem { n, n_teams_hint, .. } => format!("random_n{n}_t{n_teams_hint}"),
        }
    }

    pub fn generate(&self) -> Result<Scenario> {
        match *self {
            ScenarioSpec::Formation { family, spacing, seed } => {
                let f = generate_formation(&FormationSpec::new(family, spacing, seed))?;
                Ok(Scenario { bundle: f.bundle, positions: Some(f.positions), truth_by_k: f.truth_by_k })
            }
            ScenarioSpec::RandomSystem { n, n_teams_hint, arena, comm_radius, seed } => {
                let s = generate_random_system(&RandomSystemSpec { n, arena, comm_radius, n_teams_hint, seed })?;
                Ok(Scenario { bundle: s.bundle, positions: Some(s.positions), truth_by_k: BTreeMap::new() })
            }
        }
    }
}

/// A concrete system ready for embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bundle: GraphBundle,
    /// Known when generated; needed for sensor-noise experiments.
    pub positions: Option<Vec<Point>>,
    /// Expert divisions per team count, when known.
    pub truth_by_k: BTreeMap<usize, Vec<usize>>,
}

impl Scenario {
    pub fn from_bundle(bundle: GraphBundle) -> Self {
        Self { bundle, positions: None, truth_by_k: BTreeMap::new() }
    }

    /// Ground truth for `c` teams: the division for that count if known,
    /// otherwise whatever the bundle carries.
    pub fn truth(&self, c: usize) -> Option<&[usize]> {
        self.truth_by_k.get(&c).map(Vec::as_slice).or_else(|| self.bundle.ground_truth())
    }

    pub fn with_noise(&self, noise: &NoiseSpec) -> Result<GraphBundle> {
        if noise.level == 0.0 {
            return Ok(self.bundle.clone());
        }
        let positions = self
            .positions
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("distance noise needs robot positions; load a scenario, not a bundle".into()))?;
        apply_distance_noise(&self.bundle, positions, noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_documents() {
        let f = ScenarioSpec::from_json(r#"{"generator": "formation", "family": "squad_line"}"#).unwrap();
        assert_eq!(f, ScenarioSpec::Formation { family: FormationFamily::SquadLine, spacing: 5.0, seed: 0 });
        let r = ScenarioSpec::from_json(r#"{"generator": "random_system", "n": 20, "n_teams_hint": 4, "seed": 3}"#).unwrap();
        assert_eq!(r.id(), "random_n20_t4");
        assert_eq!(r.seed(), 3);
        assert_eq!(r.generate().unwrap().bundle.n(), 20);
        assert!(ScenarioSpec::from_json(r#"{"generator": "mystery"}"#).is_err());
    }

    #[test]
    fn shorthands() {
        assert_eq!(ScenarioSpec::parse_shorthand("random:50:3").unwrap().id(), "random_n50_t3");
        assert_eq!(ScenarioSpec::parse_shorthand("platoon_vee").unwrap().id(), "platoon_vee");
        assert!(ScenarioSpec::parse_shorthand("random:50").is_err());
        assert!(ScenarioSpec::parse_shorthand("company_line").is_err());
    }

    #[test]
    fn noise_needs_positions() {
        let s = ScenarioSpec::parse_shorthand("squad_file").unwrap().generate().unwrap();
        let bare = Scenario::from_bundle(s.bundle.clone());
        assert!(bare.with_noise(&NoiseSpec::new(0.1, 0)).is_err());
        assert_eq!(bare.with_noise(&NoiseSpec::new(0.0, 0)).unwrap(), s.bundle);
        assert!(s.with_noise(&NoiseSpec::new(0.1, 0)).is_ok());
        assert_eq!(s.truth(2).unwrap().len(), 9);
    }
}
