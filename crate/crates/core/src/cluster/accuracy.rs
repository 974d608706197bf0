use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Fraction of positions on which `labels` agrees with `truth` under the best
/// one-to-one matching of predicted clusters to true teams.
///
/// With unequal cluster counts the matching is injective from the smaller
/// side; unmatched clusters contribute nothing.
pub fn accuracy(labels: &[usize], truth: &[usize]) -> Result<f64> {
    if labels.len() != truth.len() {
        return Err(Error::Structure(format!(
            "{} predicted labels for {} ground-truth labels",
            labels.len(),
            truth.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty labelling".into()));
    }
    let table = contingency(labels, truth);
    Ok(max_matching(&table) as f64 / labels.len() as f64)
}

/// Counts `table[p][t]` of positions with predicted cluster `p` and true team `t`,
/// over compacted label ids in ascending order.
pub fn contingency(labels: &[usize], truth: &[usize]) -> Vec<Vec<usize>> {
    let compact = |v: &[usize]| -> BTreeMap<usize, usize> {
        let mut d = v.to_vec();
        d.sort_unstable();
        d.dedup();
        d.into_iter().enumerate().map(|(i, l)| (l, i)).collect()
    };
    let pred_ids = compact(labels);
    let true_ids = compact(truth);
    let mut table = vec![vec![0; true_ids.len()]; pred_ids.len()];
    for (p, t) in labels.iter().zip(truth) {
        table[pred_ids[p]][true_ids[t]] += 1;
    }
    table
}

/// Maximum total weight of a matching in a rectangular count table.
fn max_matching(table: &[Vec<usize>]) -> usize {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    let size = rows.max(cols);
    let top = table.iter().flatten().copied().max().unwrap_or(0) as i64;
    // square cost matrix; padding rows/columns have zero profit
    let mut cost = vec![vec![top; size]; size];
    for (r, row) in table.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            cost[r][c] = top - v as i64;
        }
    }
    let assignment = hungarian(&cost);
    assignment
        .iter()
        .enumerate()
        .filter(|&(r, &c)| r < rows && c < cols)
        .map(|(r, &c)| table[r][c])
        .sum()
}

/// Minimum-cost perfect assignment on a square matrix (shortest augmenting
/// path with potentials). Returns the column assigned to each row.
fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = i64::MAX / 4;
    // 1-based arrays; index 0 is the virtual root
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}
