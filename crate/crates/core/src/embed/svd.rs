use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};

const SVD_MAX_SWEEPS: usize = 10_000;
const SVD_EPS: f64 = 5.0 * f64::EPSILON;

/// Leading `k` singular triplets, ordered by non-increasing singular value.
///
/// Each pair is sign-normalized so that the largest-magnitude entry of the
/// left vector is positive (lowest index wins ties). Pairs whose singular
/// value is numerically zero carry no information about the matrix and are
/// stored as zero vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `U_K diag(sigma_K) V_K^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (mut col, s) in us.column_iter_mut().zip(self.singular_values.iter()) {
            col *= *s;
        }
        us * self.v.transpose()
    }
}

pub fn truncated_svd(s: &DMatrix<f64>, k: usize) -> Result<TruncatedSvd> {
    let n = s.nrows();
    if !s.is_square() {
        return Err(Error::Structure(format!("expected a square matrix, got {}x{}", n, s.ncols())));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("rank k = {k} must lie in [1, {n}]")));
    }
    let svd = SVD::try_new(s.clone(), false, true, SVD_EPS, SVD_MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let vt_full = svd.v_t.expect("right vectors requested");
    let sigma = svd.singular_values;

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));

    let sigma_max = order.first().map_or(0.0, |&i| sigma[i]);
    let null_cutoff = sigma_max * n as f64 * f64::EPSILON;

    let mut u = DMatrix::zeros(n, k);
    let mut v = DMatrix::zeros(n, k);
    let mut values = DVector::zeros(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let value = sigma[idx];
        if value <= null_cutoff {
            continue;
        }
        // one refinement sweep against s
        let left = s * vt_full.row(idx).transpose();
        let left = &left / left.norm();
        let right = s.tr_mul(&left);
        let right = &right / right.norm();
        let pivot = left.iamax();
        let sign = if left[pivot] < 0.0 { -1.0 } else { 1.0 };
        u.set_column(col, &(left * sign));
        v.set_column(col, &(right * sign));
        values[col] = value;
    }
    Ok(TruncatedSvd { u, singular_values: values, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_bounds() {
        let s = DMatrix::<f64>::identity(3, 3);
        assert!(truncated_svd(&s, 0).is_err());
        assert!(truncated_svd(&s, 4).is_err());
        assert!(truncated_svd(&DMatrix::zeros(2, 3), 1).is_err());
    }

    #[test]
    fn left_vectors_match_right_vectors_on_rank_deficient_input() {
        #[rustfmt::skip]
        let s = DMatrix::from_row_slice(6, 6, &[
            0.0, 0.43611467760838, 0.24890859422643, 0.62037401616921, 0.29804401378837, 0.67997048023191,
            0.0, 0.04811684568275, 0.02746226401547, 0.06844631087699, 0.03288341015433, 0.07502163157077,
            0.0, 1.25832341207823, 0.03296999747851, 1.00333920805678, 1.04443929864426, 0.09006770171347,
            0.0, 0.17275381366940, 0.00452641407321, 0.13774731752751, 0.14338990298924, 0.01236529401749,
            0.0, 1.41046110416341, 0.03695623764243, 1.12464801470150, 0.17071731500602, 0.10095734434316,
            0.0, 0.67223380064228, 0.38367149490808, 0.95625394906709, 0.45940957833927, 0.04811684568275,
        ]);
        let t = truncated_svd(&s, 4).unwrap();
        for c in 0..4 {
            let sv = &s * t.v.column(c) / t.singular_values[c];
            let e = (sv - t.u.column(c)).amax();
            assert!(e < 1e-12, "pair {c}: {e:e}");
        }
    }

    #[test]
    fn zero_matrix_gives_zero_factors() {
        let t = truncated_svd(&DMatrix::zeros(4, 4), 2).unwrap();
        assert_eq!(t.u, DMatrix::zeros(4, 2));
        assert_eq!(t.v, DMatrix::zeros(4, 2));
        assert_eq!(t.singular_values, DVector::zeros(2));
    }

    #[test]
    fn sign_convention_makes_left_pivot_positive() {
        let s = DMatrix::from_row_slice(3, 3, &[0.0, -2.0, 0.0, 1.0, 0.0, 0.3, 0.0, 0.0, -0.5]);
        let t = truncated_svd(&s, 3).unwrap();
        for col in t.u.column_iter() {
            let p = col.iamax();
            assert!(col[p] > 0.0);
        }
        assert!((t.reconstruct() - &s).amax() < 1e-12);
        let sv = t.singular_values.as_slice();
        assert!(sv.windows(2).all(|w| w[0] >= w[1]));
    }
}
