//! Squad and platoon formations with expert team structure.
//!
//! A squad is 9 robots: a squad leader (index 0) and two fire teams of four
//! (indices 1..=4 and 5..=8, team leader first). A platoon is 29 robots: the
//! platoon leader (0), the platoon sergeant (1), then three squads of nine at
//! indices 2..=10, 11..=19 and 20..=28.
//!
//! Layouts are given in units of the spacing, x lateral and y along the
//! direction of travel, and every robot is jittered by Gaussian noise of
//! [`JITTER`] spacings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::graphs::{build_connectivity_graph, build_hierarchy_graph, build_spatial_graph, distance, Hierarchy, Point};
use crate::error::{Error, Result};
use crate::graph::GraphBundle;

/// Per-axis position jitter, in spacings.
pub const JITTER: f64 = 0.15;
/// Communication range, in spacings.
pub const COMM_RANGE: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormationFamily {
    SquadColumn,
    SquadFile,
    SquadLine,
    PlatoonColumn,
    PlatoonVee,
    PlatoonWedge,
}

impl FormationFamily {
    pub const ALL: [FormationFamily; 6] = [
        FormationFamily::PlatoonColumn,
        FormationFamily::PlatoonVee,
        FormationFamily::PlatoonWedge,
        FormationFamily::SquadColumn,
        FormationFamily::SquadFile,
        FormationFamily::SquadLine,
    ];

    pub fn is_platoon(self) -> bool {
        matches!(self, Self::PlatoonColumn | Self::PlatoonVee | Self::PlatoonWedge)
    }

    pub fn size(self) -> usize {
        if self.is_platoon() { 29 } else { 9 }
    }

    /// Team counts with an expert division: coarse first, then full.
    pub fn team_counts(self) -> [usize; 2] {
        if self.is_platoon() { [3, 5] } else { [2, 3] }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SquadColumn => "squad_column",
            Self::SquadFile => "squad_file",
            Self::SquadLine => "squad_line",
            Self::PlatoonColumn => "platoon_column",
            Self::PlatoonVee => "platoon_vee",
            Self::PlatoonWedge => "platoon_wedge",
        }
    }
}

impl fmt::Display for FormationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown formation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormationSpec {
    pub family: FormationFamily,
    /// Meters between adjacent robots.
    pub spacing: f64,
    pub seed: u64,
}

impl FormationSpec {
    pub fn new(family: FormationFamily, spacing: f64, seed: u64) -> Self {
        Self { family, spacing, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!("spacing must be positive, got {}", self.spacing)));
        }
        Ok(())
    }
}

/// A generated formation: the bundle (carrying the full expert division as
/// ground truth), robot positions and the division for each team count.
#[derive(Debug, Clone, PartialEq)]
pub struct Formation {
    pub family: FormationFamily,
    pub bundle: GraphBundle,
    pub positions: Vec<Point>,
    pub truth_by_k: BTreeMap<usize, Vec<usize>>,
}

impl Formation {
    pub fn truth(&self, k: usize) -> Option<&[usize]> {
        self.truth_by_k.get(&k).map(Vec::as_slice)
    }
}

/// Fire team in wedge: team leader at the apex.
const WEDGE: [Point; 4] = [[0.0, 0.0], [-1.0, -1.0], [1.0, -1.0], [2.0, -2.0]];

fn offset(points: &[Point], dx: f64, dy: f64) -> Vec<Point> {
    points.iter().map(|p| [p[0] + dx, p[1] + dy]).collect()
}

/// Squad layout: squad leader first, then fire team A, then fire team B.
fn squad_layout(family: FormationFamily) -> Vec<Point> {
    let mut out = Vec::with_capacity(9);
    match family {
        FormationFamily::SquadFile => {
            // single file at uniform interval, leader between the teams
            out.push([0.0, -4.0]);
            out.extend((0..4).map(|i| [0.0, -(i as f64)]));
            out.extend((5..9).map(|i| [0.0, -(i as f64)]));
        }
        FormationFamily::SquadLine => {
            // teams abreast, leader just behind the center
            out.push([0.0, -1.0]);
            out.extend((0..4).map(|i| [-1.0 - i as f64, 0.0]));
            out.extend((0..4).map(|i| [1.0 + i as f64, 0.0]));
        }
        _ => {
            // column: wedges one behind the other, leader in the gap
            out.push([0.0, -3.5]);
            out.extend(offset(&WEDGE, 0.0, 0.0));
            out.extend(offset(&WEDGE, 0.0, -5.0));
        }
    }
    out
}

/// Platoon layout: platoon leader, platoon sergeant, then three squads in column.
fn platoon_layout(family: FormationFamily) -> Vec<Point> {
    let (leader, sergeant, squads): (Point, Point, [Point; 3]) = match family {
        FormationFamily::PlatoonColumn => ([0.0, -9.0], [0.0, -20.0], [[0.0, 0.0], [0.0, -11.0], [0.0, -22.0]]),
        FormationFamily::PlatoonVee => ([0.0, -6.0], [0.0, -20.0], [[-8.0, 0.0], [8.0, 0.0], [0.0, -11.0]]),
        _ => ([0.0, -8.0], [0.0, -19.0], [[0.0, 0.0], [-8.0, -8.0], [8.0, -8.0]]),
    };
    let squad = squad_layout(FormationFamily::SquadColumn);
    let mut out = vec![leader, sergeant];
    for origin in squads {
        out.extend(offset(&squad, origin[0], origin[1]));
    }
    out
}

fn squad_hierarchy(base: usize) -> Vec<(usize, Vec<usize>)> {
    vec![(base, (base + 1..base + 9).collect())]
}

fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    [points.iter().map(|p| p[0]).sum::<f64>() / n, points.iter().map(|p| p[1]).sum::<f64>() / n]
}

/// Generates the three modality graphs and expert divisions of a formation.
pub fn generate_formation(spec: &FormationSpec) -> Result<Formation> {
    spec.validate()?;
    let family = spec.family;
    let layout = if family.is_platoon() { platoon_layout(family) } else { squad_layout(family) };

    let mut truth_by_k = BTreeMap::new();
    let links;
    if family.is_platoon() {
        // squads 0..3, platoon leader 3, platoon sergeant 4
        let mut full = vec![3, 4];
        for s in 0..3 {
            full.extend(std::iter::repeat_n(s, 9));
        }
        let squad_centers: Vec<Point> = (0..3).map(|s| centroid(&layout[2 + 9 * s..11 + 9 * s])).collect();
        let mut coarse = full.clone();
        for leader in 0..2 {
            coarse[leader] = (0..3)
                .min_by(|&a, &b| distance(layout[leader], squad_centers[a]).total_cmp(&distance(layout[leader], squad_centers[b])))
                .expect("three squads");
        }
        truth_by_k.insert(3, coarse);
        truth_by_k.insert(5, full);

        let squad_leaders: Vec<usize> = (0..3).map(|s| 2 + 9 * s).collect();
        let mut l = vec![(0, squad_leaders.clone()), (1, squad_leaders.clone())];
        for &sl in &squad_leaders {
            l.extend(squad_hierarchy(sl));
        }
        links = l;
    } else {
        // fire team A 0, fire team B 1, squad leader 2
        let full = vec![2, 0, 0, 0, 0, 1, 1, 1, 1];
        let mut coarse = full.clone();
        coarse[0] = 0;
        truth_by_k.insert(2, coarse);
        truth_by_k.insert(3, full);
        links = squad_hierarchy(0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let jitter = Normal::new(0.0, JITTER * spec.spacing).expect("positive jitter");
    let positions: Vec<Point> = layout
        .iter()
        .map(|p| [p[0] * spec.spacing + jitter.sample(&mut rng), p[1] * spec.spacing + jitter.sample(&mut rng)])
        .collect();

    let graphs = vec![
        build_spatial_graph(&positions)?,
        build_connectivity_graph(&positions, COMM_RANGE * spec.spacing, &[])?,
        build_hierarchy_graph(&positions, &Hierarchy::Explicit(links))?,
    ];
    let full = truth_by_k[&family.team_counts()[1]].clone();
    let bundle = GraphBundle::uniform(graphs, Some(full))?;
    Ok(Formation { family, bundle, positions, truth_by_k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(labels: &[usize]) -> Vec<usize> {
        let c = labels.iter().max().unwrap() + 1;
        let mut s = vec![0; c];
        for &l in labels {
            s[l] += 1;
        }
        s
    }

    #[test]
    fn squad_structure() {
        for family in [FormationFamily::SquadColumn, FormationFamily::SquadFile, FormationFamily::SquadLine] {
            let f = generate_formation(&FormationSpec::new(family, 5.0, 1)).unwrap();
            assert_eq!(f.bundle.n(), 9);
            assert_eq!(f.bundle.m(), 3);
            assert_eq!(sizes(f.truth(3).unwrap()), vec![4, 4, 1]);
            assert_eq!(sizes(f.truth(2).unwrap()), vec![5, 4]);
            assert_eq!(f.bundle.ground_truth(), f.truth(3));
        }
    }

    #[test]
    fn platoon_structure() {
        for family in [FormationFamily::PlatoonColumn, FormationFamily::PlatoonVee, FormationFamily::PlatoonWedge] {
            let f = generate_formation(&FormationSpec::new(family, 5.0, 1)).unwrap();
            assert_eq!(f.bundle.n(), 29);
            assert_eq!(sizes(f.truth(5).unwrap()), vec![9, 9, 9, 1, 1]);
            let coarse = sizes(f.truth(3).unwrap());
            assert_eq!(coarse.len(), 3);
            assert_eq!(coarse.iter().sum::<usize>(), 29);
            assert!(coarse.iter().all(|&s| s >= 9));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = FormationSpec::new(FormationFamily::PlatoonWedge, 4.0, 77);
        assert_eq!(generate_formation(&spec).unwrap(), generate_formation(&spec).unwrap());
        let other = FormationSpec { seed: 78, ..spec };
        assert_ne!(generate_formation(&spec).unwrap().positions, generate_formation(&other).unwrap().positions);
    }

    #[test]
    fn graph_shapes() {
        let f = generate_formation(&FormationSpec::new(FormationFamily::PlatoonVee, 5.0, 3)).unwrap();
        let g = f.bundle.graphs();
        assert!(g[0].is_symmetric() && g[1].is_symmetric());
        let h = g[2].adjacency();
        for i in 0..29 {
            for j in 0..29 {
                if i != j {
                    assert_eq!(h[(i, j)] * h[(j, i)], 0.0);
                }
            }
        }
        // leaders command the three squad leaders
        assert_eq!((0..29).filter(|&j| h[(0, j)] > 0.0).collect::<Vec<_>>(), vec![2, 11, 20]);
    }

    #[test]
    fn bad_spacing() {
        assert!(generate_formation(&FormationSpec::new(FormationFamily::SquadLine, 0.0, 0)).is_err());
        assert!("platoon_vee".parse::<FormationFamily>().is_ok());
        assert!("platoon_x".parse::<FormationFamily>().is_err());
    }
}
