//! Katz proximity, truncated SVD and per-robot representations.

mod katz;
mod spectral;
mod svd;

use nalgebra::DMatrix;

pub use katz::{katz_from_adjacency, katz_similarity, AlphaPolicy, KatzConfig, SimilarityMatrix, MAX_CONDITION};
pub use spectral::{spectral_radius, SpectralRadius, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use svd::{truncated_svd, TruncatedSvd};

use crate::error::{Error, Result};
use crate::graph::GraphBundle;

/// `N x 2K` matrix whose row `n` is the representation of robot `n`.
///
/// The first `K` columns come from left singular vectors (outgoing proximity),
/// the last `K` from right singular vectors (incoming proximity). With
/// `scaled` both halves are multiplied by `sqrt(sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    x: DMatrix<f64>,
    k: usize,
    scaled: bool,
}

impl EmbeddingMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn scaled(&self) -> bool {
        self.scaled
    }

    /// Row-wise concatenation of several embeddings of the same roster.
    pub fn concat(parts: &[EmbeddingMatrix]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("nothing to concatenate".into()))?;
        let n = first.n();
        if parts.iter().any(|p| p.n() != n) {
            return Err(Error::Structure("embeddings cover different rosters".into()));
        }
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        let mut x = DMatrix::zeros(n, dim);
        let mut offset = 0;
        for p in parts {
            x.columns_mut(offset, p.dim()).copy_from(&p.x);
            offset += p.dim();
        }
        Ok(Self { x, k: dim / 2, scaled: first.scaled })
    }
}

/// Builds the representation from the leading `k` singular pairs of `s`.
pub fn embed(s: &SimilarityMatrix, k: usize, scaled: bool) -> Result<EmbeddingMatrix> {
    let n = s.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in [1, {n}]")));
    }
    let svd = truncated_svd(s.matrix(), k)?;
    let mut x = DMatrix::zeros(n, 2 * k);
    x.columns_mut(0, k).copy_from(&svd.u);
    x.columns_mut(k, k).copy_from(&svd.v);
    if scaled {
        for (c, sigma) in svd.singular_values.iter().enumerate() {
            let root = sigma.sqrt();
            x.column_mut(c).scale_mut(root);
            x.column_mut(k + c).scale_mut(root);
        }
    }
    Ok(EmbeddingMatrix { x, k, scaled })
}

/// Multimodal pipeline: Katz index of the blended bundle, then [`embed`].
pub fn embed_bundle(bundle: &GraphBundle, cfg: &KatzConfig, k: usize, scaled: bool) -> Result<EmbeddingMatrix> {
    embed(&katz_similarity(bundle, cfg)?, k, scaled)
}

/// Single-modality baseline on graph `modality_index` alone.
pub fn embed_single_modality(
    bundle: &GraphBundle,
    modality_index: usize,
    cfg: &KatzConfig,
    k: usize,
    scaled: bool,
) -> Result<EmbeddingMatrix> {
    embed_bundle(&bundle.single(modality_index)?, cfg, k, scaled)
}

/// Concatenation baseline: embeds every modality separately and joins the
/// per-robot vectors, giving `2 * k_per_graph * M` columns.
pub fn embed_concatenated(
    bundle: &GraphBundle,
    cfg: &KatzConfig,
    k_per_graph: usize,
    scaled: bool,
) -> Result<EmbeddingMatrix> {
    let parts = (0..bundle.m())
        .map(|m| embed_single_modality(bundle, m, cfg, k_per_graph, scaled))
        .collect::<Result<Vec<_>>>()?;
    EmbeddingMatrix::concat(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ModalityGraph, ModalityKind};

    fn path_bundle() -> GraphBundle {
        let n = 5;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = 1.0;
            a[(i + 1, i)] = 1.0;
        }
        let mut h = DMatrix::zeros(n, n);
        for j in 1..n {
            h[(0, j)] = 1.0;
        }
        GraphBundle::uniform(
            vec![
                ModalityGraph::new(ModalityKind::Connectivity, false, a).unwrap(),
                ModalityGraph::new(ModalityKind::Hierarchy, true, h).unwrap(),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn dimensions() {
        let b = path_bundle();
        let cfg = KatzConfig::default();
        let e = embed_bundle(&b, &cfg, 2, false).unwrap();
        assert_eq!((e.n(), e.dim(), e.k()), (5, 4, 2));
        assert!(embed_bundle(&b, &cfg, 6, false).is_err());
        assert!(embed_bundle(&b, &cfg, 0, false).is_err());
        let cc = embed_concatenated(&b, &cfg, 2, false).unwrap();
        assert_eq!(cc.dim(), 8);
    }

    #[test]
    fn scaled_columns_carry_root_sigma() {
        let b = path_bundle();
        let cfg = KatzConfig::default();
        let s = katz_similarity(&b, &cfg).unwrap();
        let raw = embed(&s, 2, false).unwrap();
        let scaled = embed(&s, 2, true).unwrap();
        let svd = truncated_svd(s.matrix(), 2).unwrap();
        for c in 0..2 {
            let root = svd.singular_values[c].sqrt();
            for r in 0..5 {
                assert!((scaled.matrix()[(r, c)] - root * raw.matrix()[(r, c)]).abs() < 1e-14);
                assert!((scaled.matrix()[(r, c + 2)] - root * raw.matrix()[(r, c + 2)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn empty_graphs_embed_to_zero() {
        let b = GraphBundle::uniform(vec![ModalityGraph::empty(ModalityKind::Spatial, false, 4)], None).unwrap();
        let e = embed_bundle(&b, &KatzConfig::default(), 2, false).unwrap();
        assert!(e.matrix().iter().all(|&v| v == 0.0));
    }
}
