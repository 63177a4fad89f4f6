use std::collections::BTreeSet;

use verbsense::experiment::{build_spaces, evaluate_supervised, induce_senses, Inputs};
use verbsense::synth::{generate_synthetic, SyntheticSpec, NOISE_LEVELS};
use verbsense::PipelineConfig;

fn partition(groups: impl IntoIterator<Item = Vec<String>>) -> BTreeSet<BTreeSet<String>> {
    groups.into_iter().map(|g| g.into_iter().collect()).collect()
}

#[test]
fn noiseless_disjoint_senses_are_recovered_exactly() {
    let spec = SyntheticSpec {
        noise: 0.0,
        disjointness: 1.0,
        ..SyntheticSpec::default()
    };
    let cfg = PipelineConfig::for_synthetic(&spec);
    let data = generate_synthetic(&spec).unwrap();
    let inputs = Inputs::from(&data);
    let spaces = build_spaces(&inputs, &cfg).unwrap();
    let verbs: Vec<String> = data.truth.verbs.iter().map(|v| v.verb.clone()).collect();
    let induced = induce_senses(&verbs, &inputs, &spaces.words, &cfg.cluster, &BTreeSet::new()).unwrap();
    for planted in &data.truth.verbs {
        let want = partition(planted.senses.iter().map(|s| [s.training.clone(), s.heldout.clone()].concat()));
        let got = partition(induced[&planted.verb].senses.iter().map(|s| s.objects.clone()));
        assert_eq!(got, want, "verb {}", planted.verb);
    }
}

struct Gain {
    mean: f64,
    /// Standard error of the difference between the two models' means.
    se: f64,
}

/// Gain of the disambiguated over the ambiguous model in mean per-phrase
/// cosine.
fn cosine_gain(spec: &SyntheticSpec) -> Gain {
    let cfg = PipelineConfig::for_synthetic(spec);
    let data = generate_synthetic(spec).unwrap();
    let spaces = build_spaces(&Inputs::from(&data), &cfg).unwrap();
    let report = evaluate_supervised(&spaces, &data.supervised, &cfg).unwrap();
    let stats = |xs: Vec<f64>| {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var / n)
    };
    let (amb, amb_var) = stats(report.phrases.iter().map(|p| p.ambiguous_cosine).collect());
    let (dis, dis_var) = stats(report.phrases.iter().map(|p| p.disambiguated_cosine).collect());
    Gain {
        mean: dis - amb,
        se: (amb_var + dis_var).sqrt(),
    }
}

#[test]
fn shared_generating_map_gives_no_gain() {
    // Per-sense matrices see half the objects, so a small loss is expected.
    let g = cosine_gain(&SyntheticSpec {
        disjointness: 0.0,
        ..SyntheticSpec::default()
    });
    assert!(g.mean <= 2.0 * g.se, "gain {} against standard error {}", g.mean, g.se);
    assert!(g.mean.abs() < 0.03, "loss {}", g.mean);
}

#[test]
fn disambiguation_gain_shrinks_with_noise() {
    let levels = [NOISE_LEVELS[0], NOISE_LEVELS[1], NOISE_LEVELS[2], 2.0 * NOISE_LEVELS[2]];
    let gains: Vec<f64> = levels
        .iter()
        .map(|&noise| {
            (0..2)
                .map(|seed| {
                    cosine_gain(&SyntheticSpec {
                        noise,
                        seed,
                        ..SyntheticSpec::default()
                    })
                    .mean
                })
                .sum::<f64>()
                / 2.0
        })
        .collect();
    assert!(gains.windows(2).all(|w| w[1] <= w[0] + 0.01), "{gains:?}");
    assert!(gains[3] < gains[0] - 0.02, "{gains:?}");
}
