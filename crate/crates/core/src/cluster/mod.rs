//! Team assignment by k-means and partition scoring.

mod accuracy;
mod kmeans;
mod silhouette;

pub use accuracy::{accuracy, contingency};
pub use kmeans::{kmeans, lloyd, InitMethod, KMeansConfig, TeamAssignment};
pub use silhouette::silhouette;

/// Quality of a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionScore {
    pub silhouette: f64,
    pub accuracy: Option<f64>,
}
