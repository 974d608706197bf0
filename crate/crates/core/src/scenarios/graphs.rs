//! Modality graph constructions from robot positions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBundle, ModalityGraph, ModalityKind};

/// Planar robot position in meters.
pub type Point = [f64; 2];

/// Line-of-sight blocker between two endpoints.
pub type Segment = (Point, Point);

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn distance_matrix(positions: &[Point]) -> DMatrix<f64> {
    let n = positions.len();
    DMatrix::from_fn(n, n, |i, j| distance(positions[i], positions[j]))
}

/// Gaussian proximity `exp(-d^2 / (2 sigma^2))`.
pub fn gaussian_weight(d: f64, sigma: f64) -> f64 {
    (-(d * d) / (2.0 * sigma * sigma)).exp()
}

/// Median of the strictly upper-triangular entries.
pub fn median_pairwise(distances: &DMatrix<f64>) -> f64 {
    let n = distances.nrows();
    let mut d: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| distances[(i, j)]).collect();
    if d.is_empty() {
        return 0.0;
    }
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    if d.len() % 2 == 1 {
        d[mid]
    } else {
        0.5 * (d[mid - 1] + d[mid])
    }
}

/// Undirected Gaussian-kernel graph over a symmetric distance matrix, with the
/// bandwidth set to the median pairwise distance. Coincident rosters fall
/// back to unit weights.
pub fn spatial_graph_from_distances(distances: &DMatrix<f64>) -> Result<ModalityGraph> {
    let n = distances.nrows();
    if !distances.is_square() || distances.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidArgument("distances must be a square matrix of finite non-negative values".into()));
    }
    let sigma = median_pairwise(distances);
    let a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if sigma == 0.0 {
            1.0
        } else {
            // both triangles read the same entry so the result is exactly symmetric
            let d = distances[(i.min(j), i.max(j))];
            gaussian_weight(d, sigma)
        }
    });
    ModalityGraph::new(ModalityKind::Spatial, false, a)
}

pub fn build_spatial_graph(positions: &[Point]) -> Result<ModalityGraph> {
    check_finite(positions)?;
    spatial_graph_from_distances(&distance_matrix(positions))
}

/// Binary undirected line-of-sight graph: robots within `comm_radius`
/// (inclusive) whose connecting segment touches no obstacle are linked.
pub fn build_connectivity_graph(positions: &[Point], comm_radius: f64, obstacles: &[Segment]) -> Result<ModalityGraph> {
    check_finite(positions)?;
    if comm_radius.is_nan() || comm_radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("communication radius must be positive, got {comm_radius}")));
    }
    let n = positions.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (positions[i], positions[j]);
            if distance(p, q) <= comm_radius && !obstacles.iter().any(|&(s, t)| segments_intersect(p, q, s, t)) {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
        }
    }
    ModalityGraph::new(ModalityKind::Connectivity, false, a)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, touching endpoints included.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Command structure for [`build_hierarchy_graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Hierarchy {
    /// Each `(leader, subordinates)` entry adds unit edges leader -> subordinate.
    Explicit(Vec<(usize, Vec<usize>)>),
    /// The `ceil(N/10)` robots nearest the centroid lead; every other robot
    /// reports to its nearest leader.
    CentralityHeuristic,
}

/// Number of top-tier robots under the centrality heuristic.
pub fn tier_one_count(n: usize) -> usize {
    n.div_ceil(10)
}

pub fn build_hierarchy_graph(positions: &[Point], hierarchy: &Hierarchy) -> Result<ModalityGraph> {
    check_finite(positions)?;
    let n = positions.len();
    let mut a = DMatrix::zeros(n, n);
    match hierarchy {
        Hierarchy::Explicit(links) => {
            for (leader, subs) in links {
                for &s in subs {
                    if *leader >= n || s >= n || *leader == s {
                        return Err(Error::InvalidArgument(format!("bad hierarchy link {leader} -> {s} for {n} robots")));
                    }
                    a[(*leader, s)] = 1.0;
                }
            }
        }
        Hierarchy::CentralityHeuristic => {
            if n == 0 {
                return ModalityGraph::new(ModalityKind::Hierarchy, true, a);
            }
            let cx = positions.iter().map(|p| p[0]).sum::<f64>() / n as f64;
            let cy = positions.iter().map(|p| p[1]).sum::<f64>() / n as f64;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| {
                distance(positions[i], [cx, cy]).total_cmp(&distance(positions[j], [cx, cy])).then(i.cmp(&j))
            });
            let leaders = &order[..tier_one_count(n)];
            for &r in &order[leaders.len()..] {
                let nearest = leaders
                    .iter()
                    .copied()
                    .min_by(|&x, &y| distance(positions[r], positions[x]).total_cmp(&distance(positions[r], positions[y])).then(x.cmp(&y)))
                    .expect("at least one leader");
                a[(nearest, r)] = 1.0;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if a[(i, j)] != 0.0 && a[(j, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!("hierarchy has edges both ways between {i} and {j}")));
            }
        }
    }
    ModalityGraph::new(ModalityKind::Hierarchy, true, a)
}

fn check_finite(positions: &[Point]) -> Result<()> {
    if positions.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("positions must be finite".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// `eps ~ U[-eta, eta]`.
    #[default]
    Uniform,
    /// `eps ~ N(0, eta^2 / 3)` (same variance as the uniform model), clamped to `[-eta, eta]`.
    Gaussian,
}

/// Multiplicative sensor noise on inter-robot distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub level: f64,
    pub seed: u64,
    #[serde(default)]
    pub model: NoiseModel,
}

impl NoiseSpec {
    pub const MAX_LEVEL: f64 = 0.5;

    pub fn new(level: f64, seed: u64) -> Self {
        Self { level, seed, model: NoiseModel::Uniform }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=Self::MAX_LEVEL).contains(&self.level) {
            return Err(Error::InvalidArgument(format!("noise level {} outside [0, 0.5]", self.level)));
        }
        Ok(())
    }
}

/// Distances `d_ij (1 + eps_ij)` with symmetric draws `eps_ij = eps_ji`.
pub fn perturb_distances(positions: &[Point], noise: &NoiseSpec) -> Result<DMatrix<f64>> {
    noise.validate()?;
    let mut d = distance_matrix(positions);
    if noise.level == 0.0 {
        return Ok(d);
    }
    let n = positions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let eta = noise.level;
    let normal = Normal::new(0.0, eta / 3f64.sqrt()).expect("positive deviation");
    for i in 0..n {
        for j in i + 1..n {
            let eps = match noise.model {
                NoiseModel::Uniform => rng.random_range(-eta..=eta),
                NoiseModel::Gaussian => normal.sample(&mut rng).clamp(-eta, eta),
            };
            let v = d[(i, j)] * (1.0 + eps);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(d)
}

/// Rebuilds every spatial graph of the bundle from noisy distances; other
/// modalities are untouched.
pub fn apply_distance_noise(bundle: &GraphBundle, positions: &[Point], noise: &NoiseSpec) -> Result<GraphBundle> {
    noise.validate()?;
    if positions.len() != bundle.n() {
        return Err(Error::Structure(format!("{} positions for {} robots", positions.len(), bundle.n())));
    }
    if noise.level == 0.0 {
        return Ok(bundle.clone());
    }
    let spatial = spatial_graph_from_distances(&perturb_distances(positions, noise)?)?;
    let mut out = bundle.clone();
    for (m, g) in bundle.graphs().iter().enumerate() {
        if g.kind() == &ModalityKind::Spatial {
            out = out.with_graph(m, spatial.clone())?;
        }
    }
    Ok(out)
}
