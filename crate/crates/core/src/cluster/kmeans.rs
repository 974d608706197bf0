use nalgebra::{DMatrix, RowDVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, SeedPart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMethod {
    /// D^2-weighted seeding.
    PlusPlus,
    /// `c` distinct rows drawn uniformly.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub c: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub init: InitMethod,
}

impl KMeansConfig {
    pub fn new(c: usize, seed: u64) -> Self {
        Self { c, seed, restarts: 10, max_iter: 300, init: InitMethod::PlusPlus }
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn init(mut self, init: InitMethod) -> Self {
        self.init = init;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// Result of clustering `N` rows into `C` teams.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamAssignment {
    pub labels: Vec<usize>,
    /// `C x D` centroid matrix.
    pub centroids: DMatrix<f64>,
    /// Sum of squared distances from each row to its centroid.
    pub inertia: f64,
    pub n_iter: usize,
    pub converged: bool,
}

impl TeamAssignment {
    pub fn c(&self) -> usize {
        self.centroids.nrows()
    }

    pub fn team_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.c()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Best-of-`restarts` Lloyd clustering of the rows of `points`.
///
/// Restart `r` draws its initialization from a generator seeded by
/// `(seed, r)`; the lowest-inertia run wins, earliest restart on ties.
pub fn kmeans(points: &DMatrix<f64>, cfg: &KMeansConfig) -> Result<TeamAssignment> {
    let n = points.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("cannot cluster an empty set of points".into()));
    }
    if cfg.c == 0 || cfg.c > n {
        return Err(Error::InvalidArgument(format!("team count {} must lie in [1, {n}]", cfg.c)));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("points contain non-finite values".into()));
    }
    let mut best: Option<TeamAssignment> = None;
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[SeedPart::Str("restart"), SeedPart::Int(r as u64)]));
        let init = match cfg.init {
            InitMethod::PlusPlus => init_plus_plus(points, cfg.c, &mut rng),
            InitMethod::Random => init_random(points, cfg.c, &mut rng),
        };
        let (run, _) = lloyd(points, init, cfg.max_iter);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist(points: &DMatrix<f64>, row: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    points.row(row).iter().zip(centroids.row(c).iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn init_plus_plus(points: &DMatrix<f64>, c: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = vec![f64::INFINITY; n];
    while chosen.len() < c {
        let last = *chosen.last().unwrap();
        for (i, d) in nearest.iter_mut().enumerate() {
            let dist: f64 = points.row(i).iter().zip(points.row(last).iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            *d = d.min(dist);
        }
        let next = match WeightedIndex::new(&nearest) {
            Ok(dist) => dist.sample(rng),
            // every point coincides with a chosen centroid
            Err(_) => {
                let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                free[rng.random_range(0..free.len())]
            }
        };
        chosen.push(next);
    }
    rows(points, &chosen)
}

fn init_random(points: &DMatrix<f64>, c: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let chosen = rand::seq::index::sample(rng, points.nrows(), c).into_vec();
    rows(points, &chosen)
}

fn rows(points: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_rows(&idx.iter().map(|&i| RowDVector::from(points.row(i))).collect::<Vec<_>>())
}

/// One Lloyd run from explicit initial centroids.
///
/// Returns the assignment and the inertia measured after every assignment
/// step. Ties go to the lowest-indexed centroid; an emptied cluster is
/// re-seeded at the point farthest from its own centroid.
pub fn lloyd(points: &DMatrix<f64>, init: DMatrix<f64>, max_iter: usize) -> (TeamAssignment, Vec<f64>) {
    let n = points.nrows();
    let c = init.nrows();
    let mut centroids = init;
    let mut labels = vec![usize::MAX; n];
    let mut dists = vec![0.0; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iter = 0;

    while n_iter < max_iter {
        n_iter += 1;
        let mut changed = false;
        for i in 0..n {
            let mut best = 0;
            let mut best_d = sq_dist(points, i, &centroids, 0);
            for k in 1..c {
                let d = sq_dist(points, i, &centroids, k);
                if d < best_d {
                    best = k;
                    best_d = d;
                }
            }
            changed |= labels[i] != best;
            labels[i] = best;
            dists[i] = best_d;
        }
        trace.push(dists.iter().sum());
        if !changed {
            converged = true;
            break;
        }
        update_centroids(points, &labels, &dists, &mut centroids);
    }
    if !converged {
        // centroids were updated after the last assignment; reassign for consistency
        for i in 0..n {
            dists[i] = sq_dist(points, i, &centroids, labels[i]);
        }
    }
    let inertia = dists.iter().sum();
    (TeamAssignment { labels, centroids, inertia, n_iter, converged }, trace)
}

fn update_centroids(points: &DMatrix<f64>, labels: &[usize], dists: &[f64], centroids: &mut DMatrix<f64>) {
    let c = centroids.nrows();
    let mut counts = vec![0usize; c];
    let mut sums = DMatrix::zeros(c, points.ncols());
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        let mut row = sums.row_mut(l);
        row += points.row(i);
    }
    let mut taken = vec![false; labels.len()];
    for (k, &count) in counts.iter().enumerate() {
        if count > 0 {
            centroids.set_row(k, &(sums.row(k) / count as f64));
            continue;
        }
        let far = (0..labels.len())
            .filter(|&i| !taken[i])
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(j) if dists[j] >= dists[i] => Some(j),
                _ => Some(i),
            });
        if let Some(i) = far {
            taken[i] = true;
            centroids.set_row(k, &points.row(i));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[[f64; 2]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j])
    }

    #[test]
    fn separated_pairs() {
        let x = pts(&[[0.0, 0.0], [0.1, 0.0], [10.0, 0.0], [10.1, 0.0]]);
        let t = kmeans(&x, &KMeansConfig::new(2, 1)).unwrap();
        assert_eq!(t.labels[0], t.labels[1]);
        assert_eq!(t.labels[2], t.labels[3]);
        assert_ne!(t.labels[0], t.labels[2]);
        assert!((t.inertia - 0.01).abs() < 1e-12, "{}", t.inertia);
        assert!(t.converged);
    }

    #[test]
    fn one_team_per_point() {
        let x = pts(&[[0.0, 0.0], [1.0, 3.0], [4.0, 1.0], [2.0, 2.0], [-1.0, 0.5]]);
        let t = kmeans(&x, &KMeansConfig::new(5, 9)).unwrap();
        assert_eq!(t.inertia, 0.0);
        let mut l = t.labels.clone();
        l.sort();
        assert_eq!(l, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn single_team_is_global_mean() {
        let x = pts(&[[0.0, 0.0], [1.0, 3.0], [4.0, 1.0], [2.0, 2.0], [-1.0, 0.5]]);
        let t = kmeans(&x, &KMeansConfig::new(1, 0)).unwrap();
        let mean = [6.0 / 5.0, 6.5 / 5.0];
        assert!((t.centroids[(0, 0)] - mean[0]).abs() < 1e-12);
        assert!((t.centroids[(0, 1)] - mean[1]).abs() < 1e-12);
        // N times the per-point variance
        let total: f64 = (0..5).map(|i| (x[(i, 0)] - mean[0]).powi(2) + (x[(i, 1)] - mean[1]).powi(2)).sum();
        assert!((t.inertia - total).abs() < 1e-12);
    }

    #[test]
    fn argument_errors() {
        let x = pts(&[[0.0, 0.0], [1.0, 1.0]]);
        assert!(kmeans(&x, &KMeansConfig::new(3, 0)).is_err());
        assert!(kmeans(&x, &KMeansConfig::new(0, 0)).is_err());
        assert!(kmeans(&x, &KMeansConfig::new(1, 0).restarts(0)).is_err());
        assert!(kmeans(&DMatrix::zeros(0, 2), &KMeansConfig::new(1, 0)).is_err());
    }

    #[test]
    fn coincident_points_terminate() {
        let x = DMatrix::zeros(6, 4);
        for init in [InitMethod::PlusPlus, InitMethod::Random] {
            let t = kmeans(&x, &KMeansConfig::new(3, 2).init(init)).unwrap();
            assert_eq!(t.inertia, 0.0);
            assert!(t.converged);
        }
    }

    #[test]
    fn ties_go_to_lowest_centroid() {
        let x = pts(&[[0.0, 0.0]]);
        let init = pts(&[[1.0, 0.0], [-1.0, 0.0]]);
        let (t, _) = lloyd(&x, init, 10);
        assert_eq!(t.labels, vec![0]);
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        let x = pts(&[[0.0, 0.0], [0.0, 1.0], [5.0, 0.0]]);
        // second centroid starts far from everything and empties immediately
        let init = pts(&[[1.0, 0.0], [100.0, 100.0]]);
        let (t, trace) = lloyd(&x, init, 50);
        assert_eq!(t.team_sizes().iter().filter(|&&s| s > 0).count(), 2);
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(t.converged);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let x = DMatrix::from_fn(30, 3, |i, j| ((i * 7 + j * 13) % 11) as f64);
        let a = kmeans(&x, &KMeansConfig::new(4, 42)).unwrap();
        let b = kmeans(&x, &KMeansConfig::new(4, 42)).unwrap();
        assert_eq!(a, b);
    }
}
