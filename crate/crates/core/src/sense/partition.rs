use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{ClusterConfig, Dendrogram};

/// Cluster label per input vector, labels `0..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub k: usize,
    pub labels: Vec<usize>,
    /// Variance ratio of the chosen cut, when one was evaluated.
    pub score: Option<f64>,
}

impl Partition {
    pub fn single(n: usize) -> Self {
        Partition {
            k: 1,
            labels: vec![0; n],
            score: None,
        }
    }
}

fn mean(vectors: &[DVector<f64>]) -> DVector<f64> {
    let mut m = DVector::zeros(vectors[0].len());
    for v in vectors {
        m += v;
    }
    m / vectors.len() as f64
}

/// Sum of squared distances to the grand mean.
pub fn total_dispersion(vectors: &[DVector<f64>]) -> f64 {
    if vectors.is_empty() {
        return 0.0;
    }
    let mu = mean(vectors);
    vectors.iter().map(|v| (v - &mu).norm_squared()).sum()
}

/// Caliński–Harabasz index `(B/(k−1)) / (W/(n−k))` in Euclidean geometry.
/// Returns `+∞` when the within-cluster dispersion is zero.
pub fn variance_ratio(vectors: &[DVector<f64>], labels: &[usize], k: usize) -> Result<f64> {
    let n = vectors.len();
    if labels.len() != n {
        return Err(Error::ShapeMismatch {
            context: "partition labels",
            expected: (n, 1),
            found: (labels.len(), 1),
        });
    }
    if k < 2 || k + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "variance ratio needs 2 <= k <= n - 1 (k = {k}, n = {n})"
        )));
    }
    let dim = vectors[0].len();
    let mut sums = vec![DVector::zeros(dim); k];
    let mut counts = vec![0usize; k];
    for (v, &l) in vectors.iter().zip(labels) {
        if l >= k {
            return Err(Error::InvalidArgument(format!("label {l} out of range for k = {k}")));
        }
        sums[l] += v;
        counts[l] += 1;
    }
    if counts.contains(&0) {
        return Err(Error::InvalidArgument("partition has an empty cluster".into()));
    }
    let centroids: Vec<DVector<f64>> = sums.into_iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let grand = mean(vectors);
    let between: f64 = centroids
        .iter()
        .zip(&counts)
        .map(|(c, &nc)| nc as f64 * (c - &grand).norm_squared())
        .sum();
    let within: f64 = vectors
        .iter()
        .zip(labels)
        .map(|(v, &l)| (v - &centroids[l]).norm_squared())
        .sum();
    if within == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((between / (k - 1) as f64) / (within / (n - k) as f64))
}

/// Labels obtained by stopping the agglomeration at `k` clusters. Labels are
/// numbered in order of each cluster's smallest leaf.
pub fn cut_dendrogram(dendrogram: &Dendrogram, k: usize) -> Vec<usize> {
    let n = dendrogram.leaves;
    let k = k.clamp(1.min(n), n);
    // union-find over leaves and internal nodes
    let mut parent: Vec<usize> = (0..(2 * n).saturating_sub(1).max(n)).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (t, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        let new = n + t;
        parent[m.a] = new;
        parent[m.b] = new;
    }
    let mut root_label = std::collections::HashMap::new();
    (0..n)
        .map(|leaf| {
            let root = find(&mut parent, leaf);
            let next = root_label.len();
            *root_label.entry(root).or_insert(next)
        })
        .collect()
}

/// Evaluates every cut with `k_min <= k <= min(k_max, n − 1)` and keeps the
/// highest variance ratio; ties go to the smaller k. Two or fewer vectors,
/// or vectors without any spread, give a single cluster.
pub fn select_partition(dendrogram: &Dendrogram, vectors: &[DVector<f64>], cfg: &ClusterConfig) -> Result<Partition> {
    let n = vectors.len();
    if dendrogram.leaves != n {
        return Err(Error::InvalidArgument(format!(
            "dendrogram has {} leaves for {n} vectors",
            dendrogram.leaves
        )));
    }
    if n <= 2 || total_dispersion(vectors) == 0.0 {
        return Ok(Partition::single(n));
    }
    let k_hi = cfg.k_max.min(n - 1);
    let mut best: Option<Partition> = None;
    for k in cfg.k_min..=k_hi {
        let labels = cut_dendrogram(dendrogram, k);
        let score = variance_ratio(vectors, &labels, k)?;
        let better = match &best {
            None => true,
            Some(b) => score > b.score.unwrap_or(f64::NEG_INFINITY),
        };
        if better {
            best = Some(Partition {
                k,
                labels,
                score: Some(score),
            });
        }
    }
    Ok(best.unwrap_or_else(|| Partition::single(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sense::{hac_cluster, Distance};

    fn pts(xs: &[f64]) -> Vec<DVector<f64>> {
        xs.iter().map(|&x| DVector::from_element(1, x)).collect()
    }

    #[test]
    fn hand_computed_ratio() {
        let v = pts(&[0.0, 0.1, 10.0, 10.1]);
        let ch = variance_ratio(&v, &[0, 0, 1, 1], 2).unwrap();
        // B = 4 * 5^2 = 100, W = 4 * 0.05^2 = 0.01, CH = 100 / (0.01 / 2)
        assert!((ch - 20000.0).abs() < 1e-6, "{ch}");
    }

    #[test]
    fn identical_points_are_infinite() {
        let v = pts(&[3.0, 3.0, 3.0]);
        assert_eq!(variance_ratio(&v, &[0, 1, 1], 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ratio_argument_errors() {
        let v = pts(&[0.0, 1.0, 2.0]);
        assert!(variance_ratio(&v, &[0, 0, 0], 1).is_err());
        assert!(variance_ratio(&v, &[0, 1, 2], 3).is_err());
        assert!(variance_ratio(&v, &[0, 0], 2).is_err());
        assert!(variance_ratio(&v, &[0, 0, 2], 2).is_err());
    }

    #[test]
    fn cut_labels() {
        let v = pts(&[0.0, 1.0, 10.0, 11.2]);
        let cfg = ClusterConfig {
            distance: Distance::Euclidean,
            ..ClusterConfig::default()
        };
        let d = hac_cluster(&v, &cfg);
        assert_eq!(cut_dendrogram(&d, 4), vec![0, 1, 2, 3]);
        assert_eq!(cut_dendrogram(&d, 2), vec![0, 0, 1, 1]);
        assert_eq!(cut_dendrogram(&d, 1), vec![0, 0, 0, 0]);
        let p = select_partition(&d, &v, &cfg).unwrap();
        assert_eq!(p.k, 2);
        assert_eq!(p.labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn two_points_short_circuit() {
        let v = pts(&[0.0, 5.0]);
        let d = hac_cluster(&v, &ClusterConfig::default());
        let p = select_partition(&d, &v, &ClusterConfig::default()).unwrap();
        assert_eq!(p, Partition::single(2));
    }

    #[test]
    fn identical_points_single_cluster() {
        let v = pts(&[1.0; 6]);
        let d = hac_cluster(&v, &ClusterConfig::default());
        assert_eq!(select_partition(&d, &v, &ClusterConfig::default()).unwrap().k, 1);
    }
}
