//! Multimodal graph embedding for dividing multi-robot systems into teams.
//!
//! Each relationship between robots (spatial proximity, communication links,
//! command hierarchy) is a directed weighted [`graph::ModalityGraph`]. A
//! [`graph::GraphBundle`] blends them with modality weights, the blended
//! adjacency is turned into a Katz proximity matrix, and a truncated SVD of
//! that matrix gives one vector per robot. Teams are then found with k-means
//! and scored by silhouette and, when ground truth is known, matched accuracy.
//!
//! ```
//! use teamsplit::prelude::*;
//!
//! let bundle = generate_formation(&FormationSpec::new(FormationFamily::SquadColumn, 5.0, 7)).unwrap();
//! let emb = embed_bundle(&bundle.bundle, &KatzConfig::default(), 3, false).unwrap();
//! let teams = kmeans(emb.matrix(), &KMeansConfig::new(3, 7)).unwrap();
//! assert_eq!(teams.labels.len(), 9);
//! ```

pub mod cluster;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod scenarios;
pub mod seed;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::cluster::{accuracy, kmeans, silhouette, InitMethod, KMeansConfig, TeamAssignment};
    pub use crate::embed::{
        embed, embed_bundle, embed_concatenated, embed_single_modality, katz_similarity,
        spectral_radius, AlphaPolicy, EmbeddingMatrix, KatzConfig, SimilarityMatrix,
    };
    pub use crate::graph::{blend_adjacency, load_bundle, save_bundle, GraphBundle, ModalityGraph, ModalityKind};
    pub use crate::scenarios::{
        generate_formation, generate_random_system, FormationFamily, FormationSpec, NoiseSpec,
        RandomSystemSpec,
    };
}
