//! Rank correlation and the paired permutation test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default number of Monte Carlo resamples for [`paired_significance`].
pub const DEFAULT_PERMUTATIONS: usize = 100_000;

/// Pair counts up to this size are enumerated exactly.
pub const EXACT_PERMUTATION_LIMIT: usize = 16;

/// 1-based ranks; tied values share the mean of their rank range.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let mean = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = mean;
        }
        i = j;
    }
    ranks
}

fn check_pair_lengths(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch {
            context: "correlation inputs",
            expected: (xs.len(), 1),
            found: (ys.len(), 1),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPairs {
            found: xs.len(),
            required: 2,
        });
    }
    Ok(())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair_lengths(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair_lengths(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Two-sided paired permutation (sign-flip) test on the mean difference.
///
/// Enumerates all sign patterns when there are at most
/// [`EXACT_PERMUTATION_LIMIT`] pairs, otherwise draws `resamples` seeded
/// patterns and reports `(1 + hits) / (1 + resamples)`.
pub fn paired_significance(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            context: "paired significance",
            expected: (a.len(), 1),
            found: (b.len(), 1),
        });
    }
    if a.len() < 6 {
        return Err(Error::TooFewPairs {
            found: a.len(),
            required: 6,
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let observed = diffs.iter().sum::<f64>().abs();
    let scale: f64 = diffs.iter().map(|d| d.abs()).sum();
    let threshold = observed - 1e-12 * scale.max(f64::MIN_POSITIVE);
    let n = diffs.len();

    if n <= EXACT_PERMUTATION_LIMIT {
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: f64 = diffs
                .iter()
                .enumerate()
                .map(|(i, d)| if mask >> i & 1 == 1 { -d } else { *d })
                .sum();
            if s.abs() >= threshold {
                hits += 1;
            }
        }
        return Ok(hits as f64 / (1u64 << n) as f64);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..resamples {
        let s: f64 = diffs.iter().map(|d| if rng.random::<bool>() { -d } else { *d }).sum();
        if s.abs() >= threshold {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + resamples) as f64)
}

/// Stable per-label seed: FNV-1a of the label mixed into `seed` with a
/// SplitMix64 finalizer.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
