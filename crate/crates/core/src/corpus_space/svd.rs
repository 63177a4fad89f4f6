use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Result of projecting rows onto the leading right-singular directions.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// `X V_k`, one row per input row.
    pub projected: DMatrix<f64>,
    /// Leading singular values, non-increasing; zero-padded past the rank.
    pub singular_values: Vec<f64>,
    /// `V_k`, columns are right-singular vectors (cols × k).
    pub directions: DMatrix<f64>,
}

/// Projects the rows of `x` onto its top-`k` right-singular vectors.
///
/// Each singular vector is sign-fixed so that its largest-magnitude entry
/// (first one on ties) is positive. Components beyond the available
/// singular vectors are zero.
pub fn reduce_svd(x: &DMatrix<f64>, k: usize) -> Result<Reduction> {
    if k == 0 {
        return Err(Error::InvalidArgument("SVD target dimension must be positive".into()));
    }
    let (rows, cols) = x.shape();
    let mut directions = DMatrix::zeros(cols, k);
    let mut singular_values = vec![0.0; k];

    if rows > 0 && cols > 0 {
        let svd = x.clone().svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .total_cmp(&svd.singular_values[a])
                .then(a.cmp(&b))
        });
        for (j, &src) in order.iter().take(k).enumerate() {
            let mut v = v_t.row(src).transpose();
            let pivot = v
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
            if v[pivot] < 0.0 {
                v.neg_mut();
            }
            directions.set_column(j, &v);
            singular_values[j] = svd.singular_values[src];
        }
    }
    let projected = x * &directions;
    Ok(Reduction {
        projected,
        singular_values,
        directions,
    })
}
