use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Mean silhouette coefficient of a labelling under Euclidean distance.
///
/// Singleton clusters score 0, as does a point with `a = b = 0`.
pub fn silhouette(points: &DMatrix<f64>, labels: &[usize]) -> Result<f64> {
    let n = points.nrows();
    if labels.len() != n {
        return Err(Error::Structure(format!("{} labels for {n} points", labels.len())));
    }
    // compact label ids in ascending order
    let ids: BTreeMap<usize, usize> = {
        let mut distinct: Vec<usize> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.into_iter().enumerate().map(|(i, l)| (l, i)).collect()
    };
    let c = ids.len();
    if c < 2 {
        return Err(Error::UndefinedScore(format!("silhouette needs at least 2 clusters, got {c}")));
    }
    let compact: Vec<usize> = labels.iter().map(|l| ids[l]).collect();
    let mut sizes = vec![0usize; c];
    for &l in &compact {
        sizes[l] += 1;
    }

    let mut total = 0.0;
    let mut sums = vec![0.0; c];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[compact[j]] += (points.row(i) - points.row(j)).norm();
            }
        }
        let own = compact[i];
        if sizes[own] == 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..c)
            .filter(|&k| k != own)
            .map(|k| sums[k] / sizes[k] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}
