use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Power-iteration estimate of the spectral radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRadius {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Estimates the spectral radius of a square matrix by power iteration.
///
/// Non-negative matrices are iterated with a positive diagonal shift, which
/// keeps the iterate strictly positive and makes the Perron root the unique
/// dominant eigenvalue even for periodic (e.g. bipartite) graphs. The
/// Collatz-Wielandt ratios `min (Bx)_i/x_i <= rho(B) <= max (Bx)_i/x_i` then
/// bracket the answer. Nilpotent non-negative matrices are detected exactly.
///
/// Matrices with negative entries start from `x_i = 1/(i+1)` instead of the
/// all-ones vector, which is often orthogonal to their dominant eigenvector.
pub fn spectral_radius(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> SpectralRadius {
    assert!(a.is_square(), "spectral radius needs a square matrix");
    let n = a.nrows();
    if n == 0 || a.iter().all(|&v| v == 0.0) {
        return SpectralRadius { value: 0.0, converged: true, iterations: 0 };
    }
    if a.iter().all(|&v| v >= 0.0) {
        non_negative(a, tol, max_iter)
    } else {
        general(a, tol, max_iter)
    }
}

fn non_negative(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> SpectralRadius {
    let n = a.nrows();

    // A^k 1 = 0 for some k <= n iff A is nilpotent, when A >= 0.
    let mut x = DVector::from_element(n, 1.0);
    for k in 1..=n {
        x = a * &x;
        let norm = x.amax();
        if norm == 0.0 {
            return SpectralRadius { value: 0.0, converged: true, iterations: k };
        }
        x /= norm;
    }

    let shift = a.amax();
    let mut x = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut prev_hi = f64::INFINITY;
    let mut hi = f64::INFINITY;
    let mut lo = 0.0;
    for it in 1..=max_iter {
        let y = a * &x + &x * shift;
        // Entries that decayed to noise belong to slower-growing parts of a
        // reducible matrix and carry no information about the Perron root.
        let floor = 1e-12 * x.amax();
        lo = f64::INFINITY;
        hi = 0.0;
        for (yi, xi) in y.iter().zip(x.iter()).filter(|(_, &xi)| xi > floor) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let scale = hi.max(f64::MIN_POSITIVE);
        if hi - lo <= tol * scale {
            return SpectralRadius { value: 0.5 * (lo + hi) - shift, converged: true, iterations: it };
        }
        // Reducible matrices never close the bracket; the upper bound still
        // decreases monotonically to the Perron root.
        if (prev_hi - hi).abs() <= 1e-3 * tol * scale && it > 10 {
            return SpectralRadius { value: hi - shift, converged: true, iterations: it };
        }
        prev_hi = hi;
        let norm = y.norm();
        x = y / norm;
    }
    SpectralRadius { value: (0.5 * (lo + hi) - shift).max(0.0), converged: false, iterations: max_iter }
}

fn general(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> SpectralRadius {
    let n = a.nrows();
    let mut x = DVector::from_fn(n, |i, _| 1.0 / (i + 1) as f64);
    x.normalize_mut();
    let mut estimate = 0.0;
    for it in 1..=max_iter {
        let y = a * &x;
        let norm = y.norm();
        if norm == 0.0 {
            return SpectralRadius { value: 0.0, converged: true, iterations: it };
        }
        if (norm - estimate).abs() <= tol * norm {
            return SpectralRadius { value: norm, converged: true, iterations: it };
        }
        estimate = norm;
        x = y / norm;
    }
    SpectralRadius { value: estimate, converged: false, iterations: max_iter }
}

/// Largest eigenvalue modulus from a dense eigendecomposition, or `None` if
/// the Schur iteration does not converge.
pub(crate) fn dense_spectral_radius(a: &DMatrix<f64>) -> Option<f64> {
    if a == &a.transpose() {
        let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, DEFAULT_MAX_ITER)?;
        return Some(eig.eigenvalues.amax());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, DEFAULT_MAX_ITER)?;
    Some(schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rho(a: &DMatrix<f64>) -> SpectralRadius {
        spectral_radius(a, DEFAULT_TOL, DEFAULT_MAX_ITER)
    }

    #[test]
    fn zero_matrix() {
        let r = rho(&DMatrix::zeros(2, 2));
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn swap_matrix_has_unit_radius() {
        let r = rho(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!((r.value - 1.0).abs() <= DEFAULT_TOL);
        assert!(r.converged);
    }

    #[test]
    fn periodic_graph_with_unequal_weights() {
        // eigenvalues +-sqrt(2): plain power iteration from ones oscillates
        let r = rho(&DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 1.0, 0.0]));
        assert!((r.value - 2f64.sqrt()).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn nilpotent_is_exactly_zero() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let r = rho(&a);
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn reducible_block_diagonal() {
        let mut a = DMatrix::zeros(4, 4);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 1.0;
        a[(2, 3)] = 3.0;
        a[(3, 2)] = 3.0;
        let r = rho(&a);
        assert!((r.value - 3.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn random_non_negative_matches_dense_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = DMatrix::from_fn(8, 8, |i, j| if i == j { 0.0 } else { rng.random_range(0.0..1.0) });
            let expected = dense_spectral_radius(&a).unwrap();
            let r = rho(&a);
            assert!(r.converged);
            assert!((r.value - expected).abs() <= 1e-7 * expected, "{} vs {expected}", r.value);
        }
    }

    #[test]
    fn sparse_random_directed_matches_dense_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = DMatrix::from_fn(10, 10, |i, j| {
                if i != j && rng.random_bool(0.2) { rng.random_range(0.1..2.0) } else { 0.0 }
            });
            let expected = dense_spectral_radius(&a).unwrap();
            let r = rho(&a);
            assert!((r.value - expected).abs() <= 1e-6 * expected.max(1.0), "{} vs {expected}", r.value);
        }
    }

    #[test]
    fn disconnected_graphs_with_isolated_robots() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let n = 40;
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0))).collect();
            let a = DMatrix::from_fn(n, n, |i, j| {
                let d = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
                if i != j && d <= 15.0 { 1.0 } else { 0.0 }
            });
            let r = rho(&a);
            let expected = dense_spectral_radius(&a).unwrap();
            assert!(r.value.is_finite());
            assert!((r.value - expected).abs() <= 1e-6 * expected.max(1.0), "{} vs {expected}", r.value);
        }
    }

    #[test]
    fn signed_symmetric_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let r = rho(&a);
        assert!((r.value - 3.0).abs() < 1e-6, "{r:?}");
    }
}
