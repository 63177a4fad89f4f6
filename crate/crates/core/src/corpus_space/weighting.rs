use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::CooccurrenceMatrix;

/// Local mutual information: `count · log(p(t,c) / (p(t) p(c)))`, with
/// probabilities taken from the matrix marginals. Zero counts stay zero.
pub fn weight_lmi(counts: &CooccurrenceMatrix, log_base: f64, clip_negative: bool) -> Result<DMatrix<f64>> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::ZeroGrandTotal);
    }
    let total = total as f64;
    let row_sums = counts.row_sums();
    let col_sums = counts.col_sums();
    let ln_base = log_base.ln();

    let mut out = DMatrix::zeros(counts.nrows(), counts.ncols());
    for (r, &row_sum) in row_sums.iter().enumerate() {
        for (c, n) in counts.row(r) {
            let n = n as f64;
            // p(t,c) / (p(t) p(c)) = n N / (n_t n_c)
            let ratio = n * total / (row_sum as f64 * col_sums[c] as f64);
            let mut w = n * ratio.ln() / ln_base;
            if clip_negative && w < 0.0 {
                w = 0.0;
            }
            out[(r, c)] = w;
        }
    }
    Ok(out)
}

/// Scales every nonzero row to unit L2 norm in place.
pub fn normalize_rows(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn counts(cells: &[&[u64]]) -> CooccurrenceMatrix {
        let mut m = CooccurrenceMatrix::zeros(cells.len(), cells[0].len());
        for (r, row) in cells.iter().enumerate() {
            for (c, &n) in row.iter().enumerate() {
                m.add(r, c, n);
            }
        }
        m
    }

    #[test]
    fn independent_counts_weigh_zero() {
        let w = weight_lmi(&counts(&[&[1, 1], &[1, 1]]), std::f64::consts::E, false).unwrap();
        assert!(w.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn diagonal_counts() {
        let w = weight_lmi(&counts(&[&[4, 0], &[0, 4]]), std::f64::consts::E, false).unwrap();
        assert_abs_diff_eq!(w[(0, 0)], 4.0 * 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(w[(0, 0)], 2.772588722239781, epsilon = 1e-12);
        assert_eq!(w[(0, 1)], 0.0);
    }

    #[test]
    fn zero_total_is_an_error() {
        assert!(matches!(
            weight_lmi(&CooccurrenceMatrix::zeros(2, 2), std::f64::consts::E, false),
            Err(Error::ZeroGrandTotal)
        ));
    }

    #[test]
    fn clipping_removes_negatives() {
        let c = counts(&[&[5, 1], &[1, 5], &[3, 3]]);
        let raw = weight_lmi(&c, std::f64::consts::E, false).unwrap();
        assert!(raw.iter().any(|&x| x < 0.0));
        let clipped = weight_lmi(&c, std::f64::consts::E, true).unwrap();
        assert!(clipped.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn normalize_examples() {
        let mut m = DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 0.0, 0.0]);
        normalize_rows(&mut m);
        assert_abs_diff_eq!(m[(0, 0)], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)], 0.8, epsilon = 1e-15);
        assert_eq!(m[(1, 0)], 0.0);
        assert_eq!(m[(1, 1)], 0.0);
    }

    proptest! {
        #[test]
        fn lmi_sign_follows_pmi(cells in proptest::collection::vec(0u64..20, 12)) {
            let mut c = CooccurrenceMatrix::zeros(3, 4);
            for (i, &n) in cells.iter().enumerate() {
                c.add(i / 4, i % 4, n);
            }
            prop_assume!(c.total() > 0);
            let w = weight_lmi(&c, std::f64::consts::E, false).unwrap();
            let (rs, cs, tot) = (c.row_sums(), c.col_sums(), c.total() as f64);
            for r in 0..3 {
                for k in 0..4 {
                    let n = c.get(r, k) as f64;
                    if n == 0.0 {
                        prop_assert_eq!(w[(r, k)], 0.0);
                    } else {
                        let pmi = ((n / tot) / ((rs[r] as f64 / tot) * (cs[k] as f64 / tot))).ln();
                        prop_assert!((w[(r, k)] - n * pmi).abs() < 1e-9);
                    }
                }
            }
        }

        #[test]
        fn normalize_is_idempotent(vals in proptest::collection::vec(-5.0f64..5.0, 12)) {
            let mut m = DMatrix::from_row_slice(4, 3, &vals);
            normalize_rows(&mut m);
            for row in m.row_iter() {
                let n = row.norm();
                prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-9);
            }
            let once = m.clone();
            normalize_rows(&mut m);
            prop_assert!((m - once).amax() < 1e-15);
        }
    }
}
