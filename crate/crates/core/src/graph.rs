//! Robot rosters, modality graphs and weighted graph bundles.
//!
//! Adjacency matrices are dense: entry `(i, j)` is the weight of the edge
//! from robot `i` to robot `j`. Weights are finite and non-negative and the
//! diagonal is zero.

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum of modality weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Dense index of a robot within a roster of `n` robots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RobotId(pub usize);

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// The relationship a graph encodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalityKind {
    Spatial,
    Connectivity,
    Hierarchy,
    Custom(String),
}

impl ModalityKind {
    pub fn as_str(&self) -> &str {
        match self {
            ModalityKind::Spatial => "spatial",
            ModalityKind::Connectivity => "connectivity",
            ModalityKind::Hierarchy => "hierarchy",
            ModalityKind::Custom(name) => name,
        }
    }

    pub fn parse(s: &str) -> Self {
        match s {
            "spatial" => ModalityKind::Spatial,
            "connectivity" => ModalityKind::Connectivity,
            "hierarchy" => ModalityKind::Hierarchy,
            other => ModalityKind::Custom(other.to_string()),
        }
    }
}

impl fmt::Display for ModalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One directed weighted relationship graph over `n` robots.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalityGraph {
    kind: ModalityKind,
    directed: bool,
    adjacency: DMatrix<f64>,
}

impl ModalityGraph {
    /// Validates and wraps an adjacency matrix.
    ///
    /// Undirected graphs must be symmetric. Errors name the offending entry;
    /// `graph` in the error is 0 since the graph is not yet part of a bundle.
    pub fn new(kind: ModalityKind, directed: bool, adjacency: DMatrix<f64>) -> Result<Self> {
        validate_adjacency(0, directed, &adjacency)?;
        Ok(Self { kind, directed, adjacency })
    }

    pub fn empty(kind: ModalityKind, directed: bool, n: usize) -> Self {
        Self { kind, directed, adjacency: DMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn kind(&self) -> &ModalityKind {
        &self.kind
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn weight(&self, from: RobotId, to: RobotId) -> f64 {
        self.adjacency[(from.0, to.0)]
    }

    pub fn is_symmetric(&self) -> bool {
        is_symmetric(&self.adjacency)
    }
}

fn is_symmetric(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| a[(i, j)] == a[(j, i)]))
}

fn validate_adjacency(graph: usize, directed: bool, a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Structure(format!(
            "graph {graph}: adjacency is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    for i in 0..n {
        for j in 0..n {
            let w = a[(i, j)];
            let problem = if !w.is_finite() {
                Some(format!("is not finite ({w})"))
            } else if w < 0.0 {
                Some(format!("has negative weight {w}"))
            } else if i == j && w != 0.0 {
                Some(format!("is a self-loop with weight {w}"))
            } else if !directed && j > i && w != a[(j, i)] {
                Some(format!("breaks symmetry of an undirected graph ({w} vs {})", a[(j, i)]))
            } else {
                None
            };
            if let Some(problem) = problem {
                return Err(Error::InvalidEntry { graph, row: i, col: j, problem });
            }
        }
    }
    Ok(())
}

/// `M` modality graphs over a shared roster plus their blending weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphBundle {
    graphs: Vec<ModalityGraph>,
    weights: Vec<f64>,
    ground_truth: Option<Vec<usize>>,
}

impl GraphBundle {
    pub fn new(
        graphs: Vec<ModalityGraph>,
        weights: Vec<f64>,
        ground_truth: Option<Vec<usize>>,
    ) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::Structure("a bundle needs at least one graph".into()));
        }
        let n = graphs[0].n();
        for (m, g) in graphs.iter().enumerate() {
            if g.n() != n {
                return Err(Error::Structure(format!(
                    "graph {m} has {} robots, graph 0 has {n}",
                    g.n()
                )));
            }
            validate_adjacency(m, g.directed, &g.adjacency)?;
        }
        validate_weights(&weights, graphs.len())?;
        if let Some(truth) = &ground_truth {
            if truth.len() != n {
                return Err(Error::Structure(format!(
                    "ground truth has {} labels for {n} robots",
                    truth.len()
                )));
            }
        }
        Ok(Self { graphs, weights, ground_truth })
    }

    /// Bundle with equal weights `1/M`.
    pub fn uniform(graphs: Vec<ModalityGraph>, ground_truth: Option<Vec<usize>>) -> Result<Self> {
        let m = graphs.len().max(1);
        Self::new(graphs, vec![1.0 / m as f64; m], ground_truth)
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }

    pub fn m(&self) -> usize {
        self.graphs.len()
    }

    pub fn graphs(&self) -> &[ModalityGraph] {
        &self.graphs
    }

    pub fn graph(&self, index: usize) -> Option<&ModalityGraph> {
        self.graphs.get(index)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ground_truth(&self) -> Option<&[usize]> {
        self.ground_truth.as_deref()
    }

    /// Index of the first graph of the given kind.
    pub fn find_kind(&self, kind: &ModalityKind) -> Option<usize> {
        self.graphs.iter().position(|g| g.kind() == kind)
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.graphs.clone(), weights, self.ground_truth.clone())
    }

    pub fn with_ground_truth(&self, ground_truth: Option<Vec<usize>>) -> Result<Self> {
        Self::new(self.graphs.clone(), self.weights.clone(), ground_truth)
    }

    /// Replaces graph `index`, keeping weights and ground truth.
    pub fn with_graph(&self, index: usize, graph: ModalityGraph) -> Result<Self> {
        if index >= self.graphs.len() {
            return Err(Error::InvalidArgument(format!(
                "graph index {index} out of range for {} graphs",
                self.graphs.len()
            )));
        }
        let mut graphs = self.graphs.clone();
        graphs[index] = graph;
        Self::new(graphs, self.weights.clone(), self.ground_truth.clone())
    }

    /// The one-graph bundle holding graph `index` with weight 1.
    pub fn single(&self, index: usize) -> Result<Self> {
        let graph = self.graphs.get(index).cloned().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "modality index {index} out of range for {} graphs",
                self.graphs.len()
            ))
        })?;
        Self::new(vec![graph], vec![1.0], self.ground_truth.clone())
    }
}

fn validate_weights(weights: &[f64], m: usize) -> Result<()> {
    if weights.len() != m {
        return Err(Error::Structure(format!("{} weights for {m} graphs", weights.len())));
    }
    for (index, &weight) in weights.iter().enumerate() {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight { index, weight });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSum { weights: weights.to_vec(), sum });
    }
    Ok(())
}

/// Element-wise weighted sum of the bundle's adjacency matrices.
pub fn blend_adjacency(bundle: &GraphBundle) -> DMatrix<f64> {
    let n = bundle.n();
    let mut blended = DMatrix::zeros(n, n);
    for (g, &w) in bundle.graphs.iter().zip(&bundle.weights) {
        blended += g.adjacency() * w;
    }
    blended
}

#[derive(Debug, Serialize, Deserialize)]
struct BundleDoc {
    n: usize,
    weights: Vec<f64>,
    graphs: Vec<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ground_truth: Option<Vec<usize>>,
}

/// `edges` entries are `[from, to, weight]`; an undirected edge is listed
/// once and applies both ways. `matrix` gives the full adjacency row-major.
#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    kind: String,
    directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

impl GraphDoc {
    fn into_graph(self, index: usize, n: usize) -> Result<ModalityGraph> {
        let mut adjacency = DMatrix::zeros(n, n);
        match (self.edges, self.matrix) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(format!(
                    "graph {index}: give either `edges` or `matrix`, not both"
                )))
            }
            (None, None) => {
                return Err(Error::Parse(format!("graph {index}: missing `edges` or `matrix`")))
            }
            (Some(edges), None) => {
                for (e, (i, j, w)) in edges.into_iter().enumerate() {
                    if i >= n || j >= n {
                        return Err(Error::Parse(format!(
                            "graph {index}: edge {e} ({i}, {j}) is outside a roster of {n} robots"
                        )));
                    }
                    if adjacency[(i, j)] != 0.0 {
                        return Err(Error::Parse(format!(
                            "graph {index}: duplicate edge ({i}, {j})"
                        )));
                    }
                    adjacency[(i, j)] = w;
                    if !self.directed {
                        adjacency[(j, i)] = w;
                    }
                }
            }
            (None, Some(rows)) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!(
                        "graph {index}: `matrix` must be {n} rows of {n} values"
                    )));
                }
                for (i, row) in rows.iter().enumerate() {
                    for (j, &w) in row.iter().enumerate() {
                        adjacency[(i, j)] = w;
                    }
                }
            }
        }
        validate_adjacency(index, self.directed, &adjacency)?;
        Ok(ModalityGraph { kind: ModalityKind::parse(&self.kind), directed: self.directed, adjacency })
    }

    fn from_graph(g: &ModalityGraph) -> Self {
        let n = g.n();
        let mut edges = Vec::new();
        for i in 0..n {
            let from = if g.directed { 0 } else { i + 1 };
            for j in from..n {
                let w = g.adjacency[(i, j)];
                if w != 0.0 {
                    edges.push((i, j, w));
                }
            }
        }
        GraphDoc { kind: g.kind.as_str().to_string(), directed: g.directed, edges: Some(edges), matrix: None }
    }
}

/// Parses a bundle document from JSON text.
pub fn bundle_from_json(text: &str) -> Result<GraphBundle> {
    let doc: BundleDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = doc.n;
    if n == 0 {
        return Err(Error::Parse("`n` must be at least 1".into()));
    }
    let graphs = doc
        .graphs
        .into_iter()
        .enumerate()
        .map(|(m, g)| g.into_graph(m, n))
        .collect::<Result<Vec<_>>>()?;
    GraphBundle::new(graphs, doc.weights, doc.ground_truth)
}

/// Serializes a bundle as pretty-printed JSON with edge lists.
pub fn bundle_to_json(bundle: &GraphBundle) -> String {
    let doc = BundleDoc {
        n: bundle.n(),
        weights: bundle.weights.clone(),
        graphs: bundle.graphs.iter().map(GraphDoc::from_graph).collect(),
        ground_truth: bundle.ground_truth.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("bundle documents always serialize")
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<GraphBundle> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    bundle_from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_bundle(bundle: &GraphBundle, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, bundle_to_json(bundle) + "\n")?;
    Ok(())
}
