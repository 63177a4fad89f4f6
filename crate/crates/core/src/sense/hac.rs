use std::cmp::Ordering;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{ClusterConfig, Distance};

/// One agglomeration step. Leaves are `0..n`; the cluster formed by merge
/// `t` gets id `n + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    /// Smaller of the two merged cluster ids.
    pub a: usize,
    pub b: usize,
    pub cost: f64,
    /// Leaf count of the merged cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

fn pearson_r(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let n = a.len() as f64;
    let ma = a.sum() / n;
    let mb = b.sum() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        // no variance to correlate
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

/// Base dissimilarity between two context vectors.
pub fn dissimilarity(distance: Distance, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    match distance {
        Distance::Pearson => 1.0 - pearson_r(a, b),
        Distance::Cosine => 1.0 - crate::linalg::cosine_vec(a, b).unwrap_or(0.0),
        Distance::Euclidean => (a - b).norm_squared(),
    }
}

/// Lance–Williams update for Ward's method: dissimilarity between cluster
/// `k` and the union of `i` and `j`.
fn ward_update(d_ki: f64, d_kj: f64, d_ij: f64, n_i: usize, n_j: usize, n_k: usize) -> f64 {
    let (n_i, n_j, n_k) = (n_i as f64, n_j as f64, n_k as f64);
    ((n_k + n_i) * d_ki + (n_k + n_j) * d_kj - n_k * d_ij) / (n_i + n_j + n_k)
}

/// Relative tolerance under which two linkage costs count as tied.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

/// Orders candidate merges by cost, then by (smaller id, larger id).
/// Costs within [`TIE_TOLERANCE`] are treated as equal.
pub(crate) fn candidate_order(c1: f64, key1: (usize, usize), c2: f64, key2: (usize, usize)) -> Ordering {
    let scale = c1.abs().max(c2.abs()).max(1.0);
    if (c1 - c2).abs() <= TIE_TOLERANCE * scale {
        key1.cmp(&key2)
    } else {
        c1.total_cmp(&c2)
    }
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

struct Workspace {
    n: usize,
    dist: Vec<f64>,
    ids: Vec<usize>,
    sizes: Vec<usize>,
    active: Vec<bool>,
    nn: Vec<usize>,
}

impl Workspace {
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.dist[i * self.n + j] = v;
        self.dist[j * self.n + i] = v;
    }

    fn key(&self, i: usize, j: usize) -> (usize, usize) {
        pair_key(self.ids[i], self.ids[j])
    }

    fn better(&self, i: usize, j1: usize, j2: usize) -> bool {
        candidate_order(self.d(i, j1), self.key(i, j1), self.d(i, j2), self.key(i, j2)) == Ordering::Less
    }

    fn nearest(&self, i: usize) -> usize {
        let mut best = usize::MAX;
        for j in 0..self.n {
            if j == i || !self.active[j] {
                continue;
            }
            if best == usize::MAX || self.better(i, j, best) {
                best = j;
            }
        }
        best
    }
}

/// Ward agglomeration over the configured base dissimilarity, using the
/// Lance–Williams recurrence and a nearest-neighbour cache.
///
/// Deterministic: among equally cheap merges the one with the smallest
/// (smaller id, larger id) pair wins. Fewer than two vectors yield a
/// dendrogram without merges.
pub fn hac_cluster(vectors: &[DVector<f64>], cfg: &ClusterConfig) -> Dendrogram {
    let n = vectors.len();
    if n < 2 {
        return Dendrogram {
            leaves: n,
            merges: Vec::new(),
        };
    }
    let mut ws = Workspace {
        n,
        dist: vec![0.0; n * n],
        ids: (0..n).collect(),
        sizes: vec![1; n],
        active: vec![true; n],
        nn: vec![0; n],
    };
    for i in 0..n {
        for j in (i + 1)..n {
            ws.set(i, j, dissimilarity(cfg.distance, &vectors[i], &vectors[j]));
        }
    }
    for i in 0..n {
        ws.nn[i] = ws.nearest(i);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..(n - 1) {
        let mut best = usize::MAX;
        for i in 0..n {
            if !ws.active[i] {
                continue;
            }
            if best == usize::MAX {
                best = i;
                continue;
            }
            let (bi, bj) = (best, ws.nn[best]);
            let (ci, cj) = (i, ws.nn[i]);
            if candidate_order(ws.d(ci, cj), ws.key(ci, cj), ws.d(bi, bj), ws.key(bi, bj)) == Ordering::Less {
                best = i;
            }
        }
        let (p, q) = (best, ws.nn[best]);
        let (keep, gone) = (p.min(q), p.max(q));
        let cost = ws.d(p, q);
        let (a, b) = ws.key(p, q);
        let (n_keep, n_gone) = (ws.sizes[keep], ws.sizes[gone]);
        merges.push(Merge {
            a,
            b,
            cost,
            size: n_keep + n_gone,
        });

        ws.active[gone] = false;
        for k in 0..n {
            if !ws.active[k] || k == keep {
                continue;
            }
            let updated = ward_update(ws.d(k, keep), ws.d(k, gone), cost, n_keep, n_gone, ws.sizes[k]);
            ws.set(k, keep, updated);
        }
        ws.ids[keep] = n + step;
        ws.sizes[keep] = n_keep + n_gone;

        if step + 2 == n {
            break;
        }
        ws.nn[keep] = ws.nearest(keep);
        for k in 0..n {
            if !ws.active[k] || k == keep {
                continue;
            }
            if ws.nn[k] == keep || ws.nn[k] == gone {
                ws.nn[k] = ws.nearest(k);
            } else if ws.better(k, keep, ws.nn[k]) {
                ws.nn[k] = keep;
            }
        }
    }
    Dendrogram { leaves: n, merges }
}
