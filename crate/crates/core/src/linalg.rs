//! Small vector helpers shared across modules.

use nalgebra::{DVector, DVectorView};

/// Cosine similarity; `None` when either vector is zero.
pub fn cosine(a: DVectorView<'_, f64>, b: DVectorView<'_, f64>) -> Option<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((a.dot(&b) / (na * nb)).clamp(-1.0, 1.0))
}

pub fn cosine_vec(a: &DVector<f64>, b: &DVector<f64>) -> Option<f64> {
    cosine(a.as_view(), b.as_view())
}

/// Formats a float with 17 significant digits; round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
