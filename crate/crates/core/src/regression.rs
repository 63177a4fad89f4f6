//! Verb matrices by ridge regression from object vectors to holistic phrase
//! vectors, trained with gradient descent.
//!
//! Objective, for `W` of shape `d_p × d_n`, rows of `X` the object vectors
//! and rows of `Y` the phrase vectors:
//!
//! ```text
//! L(W) = 1/(2m) · ( ‖W Xᵀ − Yᵀ‖²_F + λ ‖W‖²_F )
//! ```

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fmt_f64;
use crate::vectors::{header_field, parse_header};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    /// `m × d_n`, one object vector per row.
    pub x: DMatrix<f64>,
    /// `m × d_p`, the holistic vector of the matching phrase per row.
    pub y: DMatrix<f64>,
}

impl TrainingSet {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::ShapeMismatch {
                context: "training set rows",
                expected: (x.nrows(), y.ncols()),
                found: y.shape(),
            });
        }
        if x.nrows() == 0 {
            return Err(Error::EmptyInput("training set"));
        }
        Ok(TrainingSet { x, y })
    }

    pub fn from_rows(xs: &[DVector<f64>], ys: &[DVector<f64>]) -> Result<Self> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::EmptyInput("training set"));
        }
        let x = DMatrix::from_rows(&xs.iter().map(|v| v.transpose()).collect::<Vec<_>>());
        let y = DMatrix::from_rows(&ys.iter().map(|v| v.transpose()).collect::<Vec<_>>());
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.y.ncols()
    }

    fn check_shape(&self, w: &DMatrix<f64>) -> Result<()> {
        let expected = (self.output_dim(), self.input_dim());
        if w.shape() != expected {
            return Err(Error::ShapeMismatch {
                context: "verb matrix vs training set",
                expected,
                found: w.shape(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Zero,
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    FullBatch,
    /// One update per example, examples reshuffled every epoch.
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressionConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop once the relative loss change falls below this.
    pub tol: f64,
    pub init: Init,
    /// Set from the pipeline's global seed, never from a config section.
    #[serde(skip)]
    pub seed: u64,
    pub mode: TrainMode,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            lambda: 1.0,
            learning_rate: 0.1,
            max_iters: 5000,
            tol: 1e-7,
            init: Init::Zero,
            seed: 0,
            mode: TrainMode::FullBatch,
        }
    }
}

impl RegressionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(Error::Config("lambda must be non-negative".into()));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Config("tol must be non-negative".into()));
        }
        if let Init::Gaussian { sigma } = self.init {
            if sigma.is_nan() || sigma < 0.0 {
                return Err(Error::Config("init sigma must be non-negative".into()));
            }
        }
        Ok(())
    }
}

fn residual(w: &DMatrix<f64>, ts: &TrainingSet) -> DMatrix<f64> {
    // (W Xᵀ − Yᵀ)ᵀ = X Wᵀ − Y
    &ts.x * w.transpose() - &ts.y
}

pub fn loss(w: &DMatrix<f64>, ts: &TrainingSet, lambda: f64) -> Result<f64> {
    ts.check_shape(w)?;
    let m = ts.len() as f64;
    Ok((residual(w, ts).norm_squared() + lambda * w.norm_squared()) / (2.0 * m))
}

/// Exact gradient of [`loss`]: `(1/m)((W Xᵀ − Yᵀ) X + λ W)`.
pub fn gradient(w: &DMatrix<f64>, ts: &TrainingSet, lambda: f64) -> Result<DMatrix<f64>> {
    ts.check_shape(w)?;
    let m = ts.len() as f64;
    let r = residual(w, ts);
    Ok((r.transpose() * &ts.x + w * lambda) / m)
}

/// Outcome of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub w: DMatrix<f64>,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn initial_weights(rows: usize, cols: usize, cfg: &RegressionConfig, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    match cfg.init {
        Init::Zero => DMatrix::zeros(rows, cols),
        Init::Gaussian { sigma } => {
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            DMatrix::from_fn(rows, cols, |_, _| normal.sample(rng))
        }
    }
}

fn relative_change(prev: f64, cur: f64) -> f64 {
    if prev == 0.0 {
        return (prev - cur).abs();
    }
    (prev - cur).abs() / prev.abs()
}

/// Gradient descent on the ridge objective.
///
/// Full-batch mode uses the precomputed Gram matrices `XᵀX` and `YᵀX`, so
/// each step is independent of the row order of the training set.
/// Stochastic mode takes one step per example and reshuffles every epoch
/// with a ChaCha RNG seeded from `cfg.seed`; an iteration is one epoch.
pub fn train_gd(ts: &TrainingSet, cfg: &RegressionConfig) -> Result<Fit> {
    cfg.validate()?;
    let m = ts.len();
    let mf = m as f64;
    let lambda = cfg.lambda;
    let lr = cfg.learning_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = initial_weights(ts.output_dim(), ts.input_dim(), cfg, &mut rng);

    let initial_loss = loss(&w, ts, lambda)?;
    let mut prev = initial_loss;
    let mut iterations = 0;
    let mut converged = false;

    let gram = ts.x.transpose() * &ts.x;
    let cross = ts.y.transpose() * &ts.x;
    let mut order: Vec<usize> = (0..m).collect();

    for it in 1..=cfg.max_iters {
        match cfg.mode {
            TrainMode::FullBatch => {
                let grad = (&w * &gram - &cross + &w * lambda) / mf;
                w -= grad * lr;
            }
            TrainMode::Stochastic => {
                order.shuffle(&mut rng);
                for &i in &order {
                    let x = ts.x.row(i);
                    let err = &w * x.transpose() - ts.y.row(i).transpose();
                    let grad = err * x + &w * (lambda / mf);
                    w -= grad * lr;
                }
            }
        }
        let cur = loss(&w, ts, lambda)?;
        iterations = it;
        if !cur.is_finite() {
            return Err(Error::Divergence { iteration: it });
        }
        if relative_change(prev, cur) < cfg.tol {
            prev = cur;
            converged = true;
            break;
        }
        prev = cur;
    }
    Ok(Fit {
        w,
        initial_loss,
        final_loss: prev,
        iterations,
        converged,
    })
}

/// The unique minimizer `W = YᵀX (XᵀX + λI)⁻¹`, via Cholesky.
pub fn closed_form(ts: &TrainingSet, lambda: f64) -> Result<DMatrix<f64>> {
    let d = ts.input_dim();
    let a = ts.x.transpose() * &ts.x + DMatrix::identity(d, d) * lambda;
    let chol = a.cholesky().ok_or(Error::Singular)?;
    let cross_t = ts.x.transpose() * &ts.y; // (YᵀX)ᵀ
    let w_t = chol.solve(&cross_t);
    if w_t.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(w_t.transpose())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerbMatrix {
    pub verb: String,
    pub sense_id: Option<usize>,
    /// `d_p × d_n`.
    pub w: DMatrix<f64>,
    pub final_loss: Option<f64>,
    pub iterations: Option<usize>,
    pub config_hash: Option<String>,
}

impl VerbMatrix {
    pub fn new(verb: impl Into<String>, sense_id: Option<usize>, w: DMatrix<f64>) -> Self {
        VerbMatrix {
            verb: verb.into(),
            sense_id,
            w,
            final_loss: None,
            iterations: None,
            config_hash: None,
        }
    }

    pub fn from_fit(verb: impl Into<String>, sense_id: Option<usize>, fit: Fit) -> Self {
        VerbMatrix {
            final_loss: Some(fit.final_loss),
            iterations: Some(fit.iterations),
            ..VerbMatrix::new(verb, sense_id, fit.w)
        }
    }

    pub fn train(verb: &str, sense_id: Option<usize>, ts: &TrainingSet, cfg: &RegressionConfig) -> Result<Self> {
        Ok(Self::from_fit(verb, sense_id, train_gd(ts, cfg)?))
    }

    pub fn output_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn write_tsv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let sense = self.sense_id.map_or_else(|| "-".to_string(), |s| s.to_string());
        write!(
            out,
            "#verb {} #sense {} #rows {} #cols {}",
            self.verb,
            sense,
            self.w.nrows(),
            self.w.ncols()
        )?;
        if let Some(h) = &self.config_hash {
            write!(out, " #config {h}")?;
        }
        if let Some(l) = self.final_loss {
            write!(out, " #loss {}", fmt_f64(l))?;
        }
        if let Some(n) = self.iterations {
            write!(out, " #iters {n}")?;
        }
        writeln!(out)?;
        for row in self.w.row_iter() {
            let cells: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
            writeln!(out, "{}", cells.join("\t"))?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format(1, "missing matrix header"))??;
        let fields = parse_header(&header, 1)?;
        let num = |key: &str| -> Result<usize> {
            header_field(&fields, key, 1)?
                .parse()
                .map_err(|_| Error::format(1, format!("bad #{key} value")))
        };
        let verb = header_field(&fields, "verb", 1)?.to_string();
        let sense_id = match header_field(&fields, "sense", 1)? {
            "-" => None,
            s => Some(s.parse().map_err(|_| Error::format(1, "bad #sense value"))?),
        };
        let (rows, cols) = (num("rows")?, num("cols")?);
        let optional = |key: &str| fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let before = data.len();
            for p in line.split('\t') {
                data.push(
                    p.parse::<f64>()
                        .map_err(|_| Error::format(i + 2, format!("bad float `{p}`")))?,
                );
            }
            if data.len() - before != cols {
                return Err(Error::format(i + 2, format!("expected {cols} values")));
            }
            seen += 1;
        }
        if seen != rows {
            return Err(Error::format(rows + 1, format!("expected {rows} rows, found {seen}")));
        }
        Ok(VerbMatrix {
            verb,
            sense_id,
            w: DMatrix::from_row_slice(rows, cols, &data),
            final_loss: optional("loss").and_then(|s| s.parse().ok()),
            iterations: optional("iters").and_then(|s| s.parse().ok()),
            config_hash: optional("config"),
        })
    }
}

/// Composes a noun vector with a verb matrix: `W · noun`.
pub fn apply_verb(vm: &VerbMatrix, noun: &DVector<f64>) -> Result<DVector<f64>> {
    if noun.len() != vm.input_dim() {
        return Err(Error::ShapeMismatch {
            context: "noun vector vs verb matrix",
            expected: (vm.input_dim(), 1),
            found: (noun.len(), 1),
        });
    }
    Ok(&vm.w * noun)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn scalar(x: f64, y: f64) -> TrainingSet {
        TrainingSet::new(DMatrix::from_element(1, 1, x), DMatrix::from_element(1, 1, y)).unwrap()
    }

    fn random_set(m: usize, dn: usize, dp: usize, seed: u64) -> TrainingSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(m, dn, |_, _| rng.random_range(-1.0..1.0));
        let y = DMatrix::from_fn(m, dp, |_, _| rng.random_range(-1.0..1.0));
        TrainingSet::new(x, y).unwrap()
    }

    #[test]
    fn loss_hand_values() {
        let zero = DMatrix::zeros(2, 3);
        let ts = TrainingSet::new(DMatrix::from_element(4, 3, 0.7), DMatrix::zeros(4, 2)).unwrap();
        assert_eq!(loss(&zero, &ts, 5.0).unwrap(), 0.0);

        let ts = scalar(2.0, 4.0);
        assert_eq!(loss(&DMatrix::from_element(1, 1, 1.0), &ts, 0.0).unwrap(), 2.0);
        assert_eq!(loss(&DMatrix::from_element(1, 1, 2.0), &ts, 4.0).unwrap(), 8.0);
        assert!(loss(&DMatrix::zeros(2, 2), &ts, 0.0).is_err());
    }

    #[test]
    fn gradient_hand_values() {
        let ts = scalar(2.0, 4.0);
        assert_eq!(
            gradient(&DMatrix::from_element(1, 1, 1.0), &ts, 0.0).unwrap()[(0, 0)],
            -4.0
        );
        assert_eq!(
            gradient(&DMatrix::from_element(1, 1, 2.0), &ts, 0.0).unwrap()[(0, 0)],
            0.0
        );
        assert!(gradient(&DMatrix::zeros(1, 2), &ts, 0.0).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let ts = random_set(5, 4, 3, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = DMatrix::from_fn(3, 4, |_, _| rng.random_range(-1.0..1.0));
        let g = gradient(&w, &ts, 0.3).unwrap();
        let h = 1e-5;
        let mut fd = DMatrix::zeros(3, 4);
        for i in 0..3 {
            for j in 0..4 {
                let mut wp = w.clone();
                wp[(i, j)] += h;
                let mut wm = w.clone();
                wm[(i, j)] -= h;
                fd[(i, j)] = (loss(&wp, &ts, 0.3).unwrap() - loss(&wm, &ts, 0.3).unwrap()) / (2.0 * h);
            }
        }
        assert!((&g - &fd).norm() / g.norm() < 1e-5);
    }

    #[test]
    fn scalar_training() {
        let cfg = RegressionConfig {
            lambda: 0.0,
            tol: 1e-14,
            ..RegressionConfig::default()
        };
        let fit = train_gd(&scalar(2.0, 4.0), &cfg).unwrap();
        assert_abs_diff_eq!(fit.w[(0, 0)], 2.0, epsilon = 1e-4);
        let fit = train_gd(&scalar(2.0, 4.0), &RegressionConfig { lambda: 4.0, ..cfg }).unwrap();
        assert_abs_diff_eq!(fit.w[(0, 0)], 1.0, epsilon = 1e-4);
        assert!(fit.final_loss <= fit.initial_loss);
    }

    #[test]
    fn divergence_names_iteration() {
        let cfg = RegressionConfig {
            learning_rate: 10.0,
            lambda: 0.0,
            ..RegressionConfig::default()
        };
        let err = train_gd(&scalar(10.0, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::Divergence { iteration } if iteration > 1), "{err}");
    }

    #[test]
    fn closed_form_cases() {
        assert_abs_diff_eq!(
            closed_form(&scalar(2.0, 4.0), 4.0).unwrap()[(0, 0)],
            1.0,
            epsilon = 1e-15
        );

        let ts = random_set(4, 4, 3, 5);
        let w = closed_form(&ts, 0.0).unwrap();
        assert!((&w * ts.x.transpose() - ts.y.transpose()).amax() < 1e-8);

        let under = random_set(2, 4, 3, 5);
        assert!(matches!(closed_form(&under, 0.0), Err(Error::Singular)));

        let mut last = f64::INFINITY;
        for lambda in [0.01, 0.1, 1.0, 10.0, 100.0, 1e4] {
            let n = closed_form(&ts, lambda).unwrap().norm();
            assert!(n < last);
            last = n;
        }
    }

    #[test]
    fn stochastic_mode_is_reproducible() {
        let ts = random_set(12, 4, 3, 8);
        let cfg = RegressionConfig {
            mode: TrainMode::Stochastic,
            seed: 99,
            max_iters: 200,
            learning_rate: 0.05,
            ..RegressionConfig::default()
        };
        let a = train_gd(&ts, &cfg).unwrap();
        let b = train_gd(&ts, &cfg).unwrap();
        assert_eq!(a.w, b.w);
        let cf = closed_form(&ts, cfg.lambda).unwrap();
        assert!((&a.w - &cf).norm() / cf.norm() < 0.2);
    }

    #[test]
    fn gaussian_init_depends_on_seed() {
        let ts = random_set(6, 3, 2, 1);
        let cfg = RegressionConfig {
            init: Init::Gaussian { sigma: 0.01 },
            max_iters: 1,
            ..RegressionConfig::default()
        };
        let a = train_gd(&ts, &cfg).unwrap();
        let b = train_gd(&ts, &RegressionConfig { seed: 1, ..cfg.clone() }).unwrap();
        assert_ne!(a.w, b.w);
        assert_eq!(a.w, train_gd(&ts, &cfg).unwrap().w);
    }

    #[test]
    fn apply_verb_cases() {
        let id = VerbMatrix::new("v", None, DMatrix::identity(3, 3));
        let u = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        assert_eq!(apply_verb(&id, &u).unwrap(), u);
        let two = VerbMatrix::new("v", None, DMatrix::from_element(1, 1, 2.0));
        assert_eq!(apply_verb(&two, &DVector::from_element(1, 3.0)).unwrap()[0], 6.0);
        assert!(apply_verb(&two, &u).is_err());
    }

    #[test]
    fn matrix_tsv_round_trip() {
        let mut vm = VerbMatrix::new(
            "play",
            Some(1),
            DMatrix::from_row_slice(2, 3, &[0.1, -0.2, 1.0 / 3.0, 4.0, 5.0, 6.5]),
        );
        vm.config_hash = Some("deadbeef".into());
        vm.final_loss = Some(0.25);
        vm.iterations = Some(42);
        let mut buf = Vec::new();
        vm.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#verb play #sense 1 #rows 2 #cols 3 #config deadbeef"));
        assert_eq!(VerbMatrix::read_tsv(buf.as_slice()).unwrap(), vm);

        let amb = VerbMatrix::new("draw", None, DMatrix::zeros(1, 1));
        let mut buf = Vec::new();
        amb.write_tsv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("#verb draw #sense - #rows 1 #cols 1\n"));
        assert_eq!(VerbMatrix::read_tsv(buf.as_slice()).unwrap(), amb);
        assert!(VerbMatrix::read_tsv("#verb a #sense - #rows 2 #cols 1\n1.0\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn full_batch_is_row_permutation_invariant(seed in 0u64..1000, shift in 1usize..7) {
            let ts = random_set(8, 4, 3, seed);
            let n = ts.len();
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let px = DMatrix::from_fn(n, 4, |i, j| ts.x[(perm[i], j)]);
            let py = DMatrix::from_fn(n, 3, |i, j| ts.y[(perm[i], j)]);
            let permuted = TrainingSet::new(px, py).unwrap();
            let cfg = RegressionConfig { max_iters: 300, ..RegressionConfig::default() };
            let a = train_gd(&ts, &cfg).unwrap();
            let b = train_gd(&permuted, &cfg).unwrap();
            prop_assert!((&a.w - &b.w).amax() < 1e-12);
        }

        #[test]
        fn closed_form_minimizes(seed in 0u64..1000, lambda in 0.01f64..5.0) {
            let ts = random_set(7, 4, 3, seed);
            let best = closed_form(&ts, lambda).unwrap();
            let best_loss = loss(&best, &ts, lambda).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            for _ in 0..5 {
                let d = DMatrix::from_fn(3, 4, |_, _| rng.random_range(-0.1..0.1));
                prop_assert!(best_loss <= loss(&(&best + d), &ts, lambda).unwrap() + 1e-15);
            }
        }

        #[test]
        fn apply_verb_is_linear(
            vals in proptest::collection::vec(-2.0f64..2.0, 12),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let vm = VerbMatrix::new("v", None, DMatrix::from_row_slice(3, 2, &vals[..6]));
            let u = DVector::from_row_slice(&vals[6..8]);
            let v = DVector::from_row_slice(&vals[8..10]);
            let lhs = apply_verb(&vm, &(&u * a + &v * b)).unwrap();
            let rhs = apply_verb(&vm, &u).unwrap() * a + apply_verb(&vm, &v).unwrap() * b;
            prop_assert!((lhs - rhs).amax() < 1e-9);
        }
    }
}
