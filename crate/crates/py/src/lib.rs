//! Python bindings for the teamsplit core library.
//!
//! Matrices cross the boundary as lists of rows (`list[list[float]]`); reports
//! come back as plain dicts.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use teamsplit_core::cluster::{self, KMeansConfig};
use teamsplit_core::embed::{self as core_embed, KatzConfig, SimilarityMatrix};
use teamsplit_core::experiment::{self, DivideOptions, ExperimentConfig, ResultRow};
use teamsplit_core::graph::{self, GraphBundle, ModalityGraph, ModalityKind};
use teamsplit_core::scenarios::{self, FormationSpec, RandomSystemSpec, DEFAULT_SPACING};

create_exception!(teamsplit, TeamsplitError, PyValueError);

fn err(e: teamsplit_core::Error) -> PyErr {
    TeamsplitError::new_err(e.to_string())
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != d) {
        return Err(TeamsplitError::new_err(format!("row {i} has {} entries, expected {d}", rows[i].len())));
    }
    Ok(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn katz_config(alpha: Option<f64>, beta: Option<f64>) -> KatzConfig {
    match (alpha, beta) {
        (Some(a), _) => KatzConfig::explicit(a),
        (None, Some(b)) => KatzConfig::relative(b),
        (None, None) => KatzConfig::default(),
    }
}

/// A set of modality graphs over the same robots plus blend weights.
#[pyclass(name = "Bundle", module = "teamsplit", frozen)]
pub struct PyBundle {
    inner: GraphBundle,
}

#[pymethods]
impl PyBundle {
    /// Builds a bundle from `N x N` adjacency matrices, one per modality.
    #[new]
    #[pyo3(signature = (adjacencies, kinds, directed=None, weights=None, ground_truth=None))]
    fn new(
        adjacencies: Vec<Vec<Vec<f64>>>,
        kinds: Vec<String>,
        directed: Option<Vec<bool>>,
        weights: Option<Vec<f64>>,
        ground_truth: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        if kinds.len() != adjacencies.len() {
            return Err(TeamsplitError::new_err(format!(
                "{} kinds for {} adjacency matrices",
                kinds.len(),
                adjacencies.len()
            )));
        }
        let directed = directed.unwrap_or_else(|| vec![true; adjacencies.len()]);
        if directed.len() != adjacencies.len() {
            return Err(TeamsplitError::new_err(format!(
                "{} directed flags for {} adjacency matrices",
                directed.len(),
                adjacencies.len()
            )));
        }
        let graphs = adjacencies
            .iter()
            .zip(&kinds)
            .zip(&directed)
            .map(|((a, k), &d)| ModalityGraph::new(ModalityKind::parse(k), d, to_matrix(a)?).map_err(err))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = match weights {
            Some(w) => GraphBundle::new(graphs, w, ground_truth),
            None => GraphBundle::uniform(graphs, ground_truth),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: graph::load_bundle(path).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: graph::bundle_from_json(text).map_err(err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        graph::save_bundle(&self.inner, path).map_err(err)
    }

    fn to_json(&self) -> String {
        graph::bundle_to_json(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn kinds(&self) -> Vec<String> {
        self.inner.graphs().iter().map(|g| g.kind().to_string()).collect()
    }

    #[getter]
    fn ground_truth(&self) -> Option<Vec<usize>> {
        self.inner.ground_truth().map(<[usize]>::to_vec)
    }

    fn adjacency(&self, index: usize) -> PyResult<Vec<Vec<f64>>> {
        let g = self
            .inner
            .graph(index)
            .ok_or_else(|| TeamsplitError::new_err(format!("no modality {index} in a bundle of {}", self.inner.m())))?;
        Ok(to_rows(g.adjacency()))
    }

    /// Weighted sum of the modality adjacencies.
    fn blend(&self) -> Vec<Vec<f64>> {
        to_rows(&graph::blend_adjacency(&self.inner))
    }

    fn with_weights(&self, weights: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_weights(weights).map_err(err)? })
    }

    fn with_ground_truth(&self, ground_truth: Option<Vec<usize>>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_ground_truth(ground_truth).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Bundle(n={}, kinds={:?}, weights={:?})", self.inner.n(), self.kinds(), self.inner.weights())
    }
}

/// Katz proximity of the blended graph. Returns `(matrix, alpha, spectral_radius)`.
#[pyfunction]
#[pyo3(signature = (bundle, alpha=None, beta=None))]
fn katz_similarity(bundle: &PyBundle, alpha: Option<f64>, beta: Option<f64>) -> PyResult<(Vec<Vec<f64>>, f64, f64)> {
    let s = core_embed::katz_similarity(&bundle.inner, &katz_config(alpha, beta)).map_err(err)?;
    Ok((to_rows(s.matrix()), s.alpha(), s.spectral_radius()))
}

/// Embeds a proximity matrix as `N x 2K` rows of left and right singular vectors.
#[pyfunction]
#[pyo3(signature = (similarity, k, scaled=false))]
fn embed(similarity: Vec<Vec<f64>>, k: usize, scaled: bool) -> PyResult<Vec<Vec<f64>>> {
    let s = SimilarityMatrix::from_matrix(to_matrix(&similarity)?).map_err(err)?;
    Ok(to_rows(core_embed::embed(&s, k, scaled).map_err(err)?.matrix()))
}

/// Katz proximity followed by the embedding, for a whole bundle.
#[pyfunction]
#[pyo3(signature = (bundle, k, alpha=None, beta=None, scaled=false))]
fn embed_bundle(bundle: &PyBundle, k: usize, alpha: Option<f64>, beta: Option<f64>, scaled: bool) -> PyResult<Vec<Vec<f64>>> {
    let e = core_embed::embed_bundle(&bundle.inner, &katz_config(alpha, beta), k, scaled).map_err(err)?;
    Ok(to_rows(e.matrix()))
}

/// k-means++ with restarts. Returns a dict with labels, centroids, inertia,
/// n_iter and converged.
#[pyfunction]
#[pyo3(signature = (points, c, seed=0, restarts=10, max_iter=300))]
fn kmeans<'py>(
    py: Python<'py>,
    points: Vec<Vec<f64>>,
    c: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = KMeansConfig { restarts, max_iter, ..KMeansConfig::new(c, seed) };
    let t = cluster::kmeans(&to_matrix(&points)?, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("labels", &t.labels)?;
    d.set_item("centroids", to_rows(&t.centroids))?;
    d.set_item("inertia", t.inertia)?;
    d.set_item("n_iter", t.n_iter)?;
    d.set_item("converged", t.converged)?;
    Ok(d)
}

/// Mean Euclidean silhouette.
#[pyfunction]
fn silhouette(points: Vec<Vec<f64>>, labels: Vec<usize>) -> PyResult<f64> {
    cluster::silhouette(&to_matrix(&points)?, &labels).map_err(err)
}

/// Fraction of robots on the right team under the best label matching.
#[pyfunction]
fn accuracy(labels: Vec<usize>, truth: Vec<usize>) -> PyResult<f64> {
    cluster::accuracy(&labels, &truth).map_err(err)
}

fn positions(points: &[[f64; 2]]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p[0], p[1])).collect()
}

/// Generates a military formation. Returns a dict with bundle, positions and
/// truth (team labels keyed by team count).
#[pyfunction]
#[pyo3(signature = (family, spacing=DEFAULT_SPACING, seed=0))]
fn generate_formation<'py>(py: Python<'py>, family: &str, spacing: f64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let family = family.parse().map_err(err)?;
    let f = scenarios::generate_formation(&FormationSpec::new(family, spacing, seed)).map_err(err)?;
    let truth: BTreeMap<usize, Vec<usize>> = f.truth_by_k.clone();
    let d = PyDict::new(py);
    d.set_item("bundle", PyBundle { inner: f.bundle })?;
    d.set_item("positions", positions(&f.positions))?;
    d.set_item("truth", truth)?;
    Ok(d)
}

/// Generates robots scattered around random cluster seeds. Returns a dict with
/// bundle, positions and cluster_seeds.
#[pyfunction]
#[pyo3(signature = (n, n_teams_hint, seed=0, arena=None, comm_radius=None))]
fn generate_random_system<'py>(
    py: Python<'py>,
    n: usize,
    n_teams_hint: usize,
    seed: u64,
    arena: Option<f64>,
    comm_radius: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut spec = RandomSystemSpec::new(n, n_teams_hint, seed);
    if let Some(a) = arena {
        spec.arena = a;
    }
    if let Some(r) = comm_radius {
        spec.comm_radius = r;
    }
    let r = scenarios::generate_random_system(&spec).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("bundle", PyBundle { inner: r.bundle })?;
    d.set_item("positions", positions(&r.positions))?;
    d.set_item("cluster_seeds", positions(&r.cluster_seeds))?;
    Ok(d)
}

/// Embeds a bundle and divides it into `c` teams. Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (bundle, c, weights=None, alpha=None, beta=None, dim=None, seed=0, restarts=10, scaled=false))]
#[allow(clippy::too_many_arguments)]
fn divide<'py>(
    py: Python<'py>,
    bundle: &PyBundle,
    c: usize,
    weights: Option<Vec<f64>>,
    alpha: Option<f64>,
    beta: Option<f64>,
    dim: Option<usize>,
    seed: u64,
    restarts: usize,
    scaled: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = DivideOptions { c, weights, katz: katz_config(alpha, beta), k: dim, seed, restarts, scaled };
    let r = experiment::divide(&bundle.inner, &opts).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("teams", r.teams)?;
    d.set_item("labels", r.labels)?;
    d.set_item("team_sizes", r.team_sizes)?;
    d.set_item("silhouette", r.silhouette)?;
    d.set_item("accuracy", r.accuracy)?;
    d.set_item("inertia", r.inertia)?;
    d.set_item("converged", r.converged)?;
    d.set_item("n_iter", r.n_iter)?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("spectral_radius", r.spectral_radius)?;
    d.set_item("diagnostics", r.diagnostics)?;
    Ok(d)
}

fn row_dict<'py>(py: Python<'py>, r: &ResultRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scenario", &r.scenario)?;
    d.set_item("method", &r.method)?;
    d.set_item("c", r.c)?;
    d.set_item("eta", r.eta)?;
    d.set_item("trial", r.trial)?;
    d.set_item("silhouette", r.silhouette)?;
    d.set_item("accuracy", r.accuracy)?;
    d.set_item("n_iter", r.n_iter)?;
    d.set_item("wall_time_ms", r.wall_time_ms)?;
    d.set_item("seed", r.seed)?;
    d.set_item("error", &r.error)?;
    Ok(d)
}

/// Runs an experiment sweep from a JSON config (same schema as the CLI's
/// `--config`). Returns one dict per result row.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config_json: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err)?;
    let rows = py.detach(|| experiment::run_experiment(&cfg)).map_err(err)?;
    rows.iter().map(|r| row_dict(py, r)).collect()
}

#[pymodule]
pub fn teamsplit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TeamsplitError", m.py().get_type::<TeamsplitError>())?;
    m.add_class::<PyBundle>()?;
    m.add_function(wrap_pyfunction!(katz_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(embed_bundle, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(silhouette, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(generate_formation, m)?)?;
    m.add_function(wrap_pyfunction!(generate_random_system, m)?)?;
    m.add_function(wrap_pyfunction!(divide, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
