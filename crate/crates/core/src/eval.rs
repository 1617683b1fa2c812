//! Multi-label node classification: random train/test splits, one-vs-rest
//! L2-regularized logistic regression, top-k label assignment with known
//! label counts, and micro/macro F1 over repeated trials.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::NodeIdMap;
use crate::rng::{derive_seed, stream_rng, streams};

pub const DEFAULT_L2: f64 = 1.0;
pub const DEFAULT_TRIALS: usize = 10;
const GRADIENT_TOL: f64 = 1e-6;
const MAX_NEWTON_STEPS: usize = 100;
/// Score given to labels that never (or always) occur in the training set.
const FALLBACK_SCORE: f64 = 1e9;

/// Labels per node, aligned to a [`NodeIdMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    /// Sorted label ids of each node; empty for unlabeled nodes.
    pub node_labels: Vec<Vec<usize>>,
    /// External name of each label id.
    pub vocabulary: Vec<String>,
}

impl LabelSet {
    pub fn new(node_labels: Vec<Vec<usize>>, vocabulary_size: usize) -> Result<Self> {
        let mut node_labels = node_labels;
        for labels in node_labels.iter_mut() {
            labels.sort_unstable();
            labels.dedup();
            if labels.iter().any(|&l| l >= vocabulary_size) {
                return Err(Error::validation("label id outside the vocabulary"));
            }
        }
        Ok(LabelSet {
            node_labels,
            vocabulary: (0..vocabulary_size).map(|l| l.to_string()).collect(),
        })
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    /// Nodes carrying at least one label, in index order.
    pub fn labeled_nodes(&self) -> Vec<usize> {
        (0..self.node_labels.len())
            .filter(|&i| !self.node_labels[i].is_empty())
            .collect()
    }

    /// Parse `node_label label1 label2 …` lines. A node listed twice gets the
    /// union of its labels; label ids follow first appearance.
    pub fn read<R: BufRead>(reader: R, ids: &NodeIdMap) -> Result<Self> {
        let mut node_labels = vec![Vec::new(); ids.len()];
        let mut vocabulary: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, usize> = HashMap::new();
        let mut unknown = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let node = fields.next().expect("nonempty line has a field");
            let labels: Vec<&str> = fields.collect();
            if labels.is_empty() {
                return Err(Error::parse(lineno + 1, format!("node `{node}` has no labels")));
            }
            let Some(index) = ids.index_of(node) else {
                unknown.push(node.to_owned());
                continue;
            };
            for label in labels {
                let id = *lookup.entry(label.to_owned()).or_insert_with(|| {
                    vocabulary.push(label.to_owned());
                    vocabulary.len() - 1
                });
                node_labels[index].push(id);
            }
        }
        if !unknown.is_empty() {
            return Err(Error::Alignment {
                missing: Vec::new(),
                missing_count: 0,
                extra_count: unknown.len(),
                extra: unknown.into_iter().take(10).collect(),
            });
        }
        let mut set = LabelSet::new(node_labels, vocabulary.len())?;
        set.vocabulary = vocabulary;
        Ok(set)
    }
}

/// Shuffle the labeled nodes and put the first `⌊ratio · n⌋` into the training set.
pub fn split(labels: &LabelSet, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::validation(format!("training ratio {ratio} outside (0, 1)")));
    }
    let mut nodes = labels.labeled_nodes();
    let train = (ratio * nodes.len() as f64 + 1e-9).floor() as usize;
    if train == 0 || train == nodes.len() {
        return Err(Error::validation(format!(
            "ratio {ratio} on {} labeled nodes leaves one side of the split empty",
            nodes.len()
        )));
    }
    nodes.shuffle(&mut stream_rng(seed, streams::SPLIT));
    let test = nodes.split_off(train);
    Ok((nodes, test))
}

/// One-vs-rest logistic regression.
#[derive(Debug, Clone)]
pub struct OvrClassifier {
    /// Row `l` holds the weights of label `l`.
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

impl OvrClassifier {
    pub fn label_count(&self) -> usize {
        self.weights.nrows()
    }

    /// Decision values, one row per sample and one column per label.
    pub fn scores(&self, features: &DMatrix<f64>) -> DMatrix<f64> {
        let mut s = features * self.weights.transpose();
        for mut row in s.row_iter_mut() {
            row += self.bias.transpose();
        }
        s
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Regularized logistic loss `Σ softplus(z_i) − y_i z_i + ½ l2 ‖w‖²` with
/// `z = Xw + b`, and its gradient with respect to `w` and `b`. The bias is
/// not penalized.
pub fn logistic_loss_and_gradient(
    x: &DMatrix<f64>,
    y: &[bool],
    l2: f64,
    w: &DVector<f64>,
    b: f64,
) -> (f64, DVector<f64>, f64) {
    let z = x * w;
    let mut residual = DVector::zeros(y.len());
    let mut loss = 0.5 * l2 * w.norm_squared();
    for i in 0..y.len() {
        let zi = z[i] + b;
        let yi = if y[i] { 1.0 } else { 0.0 };
        loss += softplus(zi) - yi * zi;
        residual[i] = sigmoid(zi) - yi;
    }
    let mut grad_w = x.tr_mul(&residual);
    grad_w.axpy(l2, w, 1.0);
    (loss, grad_w, residual.sum())
}

/// Fit one binary problem by damped Newton iterations until the gradient norm
/// drops below `1e-6`.
pub fn fit_binary(x: &DMatrix<f64>, y: &[bool], l2: f64) -> (DVector<f64>, f64) {
    let (n, d) = x.shape();
    let positives = y.iter().filter(|&&v| v).count() as f64;
    let prevalence = (positives / n as f64).clamp(1e-12, 1.0 - 1e-12);
    let mut w = DVector::zeros(d);
    let mut b = (prevalence / (1.0 - prevalence)).ln();
    let (mut loss, mut gw, mut gb) = logistic_loss_and_gradient(x, y, l2, &w, b);
    for _ in 0..MAX_NEWTON_STEPS {
        let grad_norm = (gw.norm_squared() + gb * gb).sqrt();
        if grad_norm <= GRADIENT_TOL {
            break;
        }
        // Hessian of the augmented problem [X 1]
        let z = x * &w;
        let mut scaled = DMatrix::zeros(n, d + 1);
        for i in 0..n {
            let p = sigmoid(z[i] + b);
            let s = (p * (1.0 - p)).sqrt();
            for j in 0..d {
                scaled[(i, j)] = x[(i, j)] * s;
            }
            scaled[(i, d)] = s;
        }
        let mut hessian = scaled.tr_mul(&scaled);
        for j in 0..d {
            hessian[(j, j)] += l2;
        }
        hessian[(d, d)] = hessian[(d, d)].max(1e-12);
        let mut grad = DVector::zeros(d + 1);
        grad.rows_mut(0, d).copy_from(&gw);
        grad[d] = gb;
        let step = match hessian.clone().cholesky() {
            Some(chol) => chol.solve(&grad),
            None => {
                for j in 0..=d {
                    hessian[(j, j)] += 1e-8;
                }
                match hessian.cholesky() {
                    Some(chol) => chol.solve(&grad),
                    None => grad.clone(),
                }
            }
        };
        let slope = step.dot(&grad);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_new = &w - step.rows(0, d) * t;
            let b_new = b - step[d] * t;
            let (l_new, gw_new, gb_new) = logistic_loss_and_gradient(x, y, l2, &w_new, b_new);
            if l_new <= loss - 1e-4 * t * slope || (l_new <= loss && t < 1e-6) {
                w = w_new;
                b = b_new;
                loss = l_new;
                gw = gw_new;
                gb = gb_new;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (w, b)
}

/// Train one classifier per label. `targets[i]` are the labels of training row `i`.
pub fn train_ovr_logreg(
    features: &DMatrix<f64>,
    targets: &[Vec<usize>],
    label_count: usize,
    l2: f64,
) -> Result<OvrClassifier> {
    if features.nrows() != targets.len() {
        return Err(Error::validation("feature rows and label rows differ in count"));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("features contain non-finite values"));
    }
    if !(l2 > 0.0) || !l2.is_finite() {
        return Err(Error::validation(format!("l2 strength must be positive, got {l2}")));
    }
    let n = features.nrows();
    let fits: Vec<(DVector<f64>, f64)> = (0..label_count)
        .into_par_iter()
        .map(|label| {
            let y: Vec<bool> = targets.iter().map(|t| t.contains(&label)).collect();
            let positives = y.iter().filter(|&&v| v).count();
            if positives == 0 {
                (DVector::zeros(features.ncols()), -FALLBACK_SCORE)
            } else if positives == n {
                (DVector::zeros(features.ncols()), FALLBACK_SCORE)
            } else {
                fit_binary(features, &y, l2)
            }
        })
        .collect();
    let mut weights = DMatrix::zeros(label_count, features.ncols());
    let mut bias = DVector::zeros(label_count);
    for (l, (w, b)) in fits.into_iter().enumerate() {
        weights.row_mut(l).copy_from(&w.transpose());
        bias[l] = b;
    }
    Ok(OvrClassifier { weights, bias })
}

/// The `k[i]` highest-scoring labels of each row; ties go to the smaller label id.
pub fn rank_top_k(scores: &DMatrix<f64>, k: &[usize]) -> Result<Vec<Vec<usize>>> {
    if scores.nrows() != k.len() {
        return Err(Error::validation("one label count per row is required"));
    }
    let labels = scores.ncols();
    (0..scores.nrows())
        .map(|i| {
            if k[i] == 0 || k[i] > labels {
                return Err(Error::validation(format!(
                    "row {i} asks for {} labels out of {labels}",
                    k[i]
                )));
            }
            let mut order: Vec<usize> = (0..labels).collect();
            order.sort_by(|&a, &b| scores[(i, b)].total_cmp(&scores[(i, a)]).then(a.cmp(&b)));
            let mut chosen = order[..k[i]].to_vec();
            chosen.sort_unstable();
            Ok(chosen)
        })
        .collect()
}

/// Predict `k[i]` labels for each feature row.
pub fn predict_topk(classifier: &OvrClassifier, features: &DMatrix<f64>, k: &[usize]) -> Result<Vec<Vec<usize>>> {
    rank_top_k(&classifier.scores(features), k)
}

/// Micro-F1 over pooled counts and macro-F1 over labels that occur in the
/// truth or the prediction.
pub fn micro_macro_f1(predicted: &[Vec<usize>], truth: &[Vec<usize>]) -> (f64, f64) {
    assert_eq!(predicted.len(), truth.len(), "prediction and truth must be aligned");
    let mut per_label: HashMap<usize, (usize, usize, usize)> = HashMap::new();
    for (p, t) in predicted.iter().zip(truth) {
        for &l in p {
            let e = per_label.entry(l).or_default();
            if t.contains(&l) {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        for &l in t {
            if !p.contains(&l) {
                per_label.entry(l).or_default().2 += 1;
            }
        }
    }
    let f1 = |tp: usize, fp: usize, fn_: usize| {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let (tp, fp, fn_) = per_label
        .values()
        .fold((0, 0, 0), |acc, &(a, b, c)| (acc.0 + a, acc.1 + b, acc.2 + c));
    let micro = f1(tp, fp, fn_);
    let macro_ = if per_label.is_empty() {
        0.0
    } else {
        per_label.values().map(|&(a, b, c)| f1(a, b, c)).sum::<f64>() / per_label.len() as f64
    };
    (micro, macro_)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub ratio: f64,
    pub trial: usize,
    pub micro_f1: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub ratio: f64,
    pub micro_mean: f64,
    /// Population standard deviation over trials.
    pub micro_std: f64,
    pub macro_mean: f64,
    pub macro_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub trials: Vec<TrialResult>,
    pub summary: Vec<RatioSummary>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl EvalReport {
    fn from_trials(trials: Vec<TrialResult>, ratios: &[f64]) -> Self {
        let summary = ratios
            .iter()
            .map(|&ratio| {
                let micro: Vec<f64> = trials.iter().filter(|t| t.ratio == ratio).map(|t| t.micro_f1).collect();
                let macro_: Vec<f64> = trials.iter().filter(|t| t.ratio == ratio).map(|t| t.macro_f1).collect();
                let (micro_mean, micro_std) = mean_std(&micro);
                let (macro_mean, macro_std) = mean_std(&macro_);
                RatioSummary {
                    ratio,
                    micro_mean,
                    micro_std,
                    macro_mean,
                    macro_std,
                }
            })
            .collect();
        EvalReport { trials, summary }
    }

    /// Tab-separated trial table followed by a summary block.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "ratio\ttrial\tmicro_f1\tmacro_f1")?;
        for t in &self.trials {
            writeln!(w, "{}\t{}\t{:.6}\t{:.6}", t.ratio, t.trial, t.micro_f1, t.macro_f1)?;
        }
        writeln!(w)?;
        writeln!(w, "# summary")?;
        writeln!(w, "ratio\tmicro_mean\tmicro_std\tmacro_mean\tmacro_std")?;
        for s in &self.summary {
            writeln!(
                w,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                s.ratio, s.micro_mean, s.micro_std, s.macro_mean, s.macro_std
            )?;
        }
        Ok(())
    }
}

/// Seed of the split for trial `trial` at ratio position `ratio_index`.
pub fn trial_seed(seed: u64, ratio_index: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(seed, ratio_index as u64), trial as u64)
}

/// Run `trials` random splits per training ratio. `features` has one row per
/// node index of `labels`.
pub fn evaluate(
    features: &DMatrix<f64>,
    labels: &LabelSet,
    ratios: &[f64],
    trials: usize,
    seed: u64,
    l2: f64,
) -> Result<EvalReport> {
    if features.nrows() != labels.node_labels.len() {
        return Err(Error::validation(format!(
            "{} feature rows for {} nodes",
            features.nrows(),
            labels.node_labels.len()
        )));
    }
    if trials == 0 || ratios.is_empty() {
        return Err(Error::validation("need at least one ratio and one trial"));
    }
    let gather = |nodes: &[usize]| DMatrix::from_fn(nodes.len(), features.ncols(), |r, c| features[(nodes[r], c)]);
    let mut results = Vec::with_capacity(ratios.len() * trials);
    for (ri, &ratio) in ratios.iter().enumerate() {
        for trial in 0..trials {
            let (train, test) = split(labels, ratio, trial_seed(seed, ri, trial))?;
            let train_targets: Vec<Vec<usize>> = train.iter().map(|&i| labels.node_labels[i].clone()).collect();
            let classifier = train_ovr_logreg(&gather(&train), &train_targets, labels.vocabulary_size(), l2)?;
            let truth: Vec<Vec<usize>> = test.iter().map(|&i| labels.node_labels[i].clone()).collect();
            let k: Vec<usize> = truth.iter().map(Vec::len).collect();
            let predicted = predict_topk(&classifier, &gather(&test), &k)?;
            let (micro_f1, macro_f1) = micro_macro_f1(&predicted, &truth);
            results.push(TrialResult {
                ratio,
                trial,
                micro_f1,
                macro_f1,
            });
        }
    }
    Ok(EvalReport::from_trials(results, ratios))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn labels_of(n: usize) -> LabelSet {
        LabelSet::new((0..n).map(|i| vec![i % 2]).collect(), 2).unwrap()
    }

    #[test]
    fn split_sizes() {
        let (train, test) = split(&labels_of(10), 0.5, 1).unwrap();
        assert_eq!((train.len(), test.len()), (5, 5));
        let (train, _) = split(&labels_of(3890), 0.1, 1).unwrap();
        assert_eq!(train.len(), 389);
    }

    #[test]
    fn split_is_deterministic_disjoint_and_covering() {
        let labels = labels_of(50);
        let a = split(&labels, 0.3, 9).unwrap();
        assert_eq!(a, split(&labels, 0.3, 9).unwrap());
        assert_ne!(a, split(&labels, 0.3, 10).unwrap());
        let mut all: Vec<usize> = a.0.iter().chain(&a.1).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn degenerate_split_is_rejected() {
        assert!(split(&labels_of(3), 0.1, 0).is_err());
        assert!(split(&labels_of(10), 1.0, 0).is_err());
        assert!(split(&labels_of(10), 0.0, 0).is_err());
    }

    #[test]
    fn separable_one_dimensional_data() {
        let x = DMatrix::from_column_slice(8, 1, &[-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]);
        let y: Vec<bool> = (0..8).map(|i| i >= 4).collect();
        let (w, b) = fit_binary(&x, &y, 1.0);
        for i in 0..8 {
            assert_eq!(x[(i, 0)] * w[0] + b > 0.0, y[i]);
        }
        let (_, gw, gb) = logistic_loss_and_gradient(&x, &y, 1.0, &w, b);
        assert!((gw.norm_squared() + gb * gb).sqrt() <= 1e-6);
    }

    #[test]
    fn identical_features_give_prevalence_logit() {
        let x = DMatrix::from_element(20, 3, 0.7);
        let y: Vec<bool> = (0..20).map(|i| i < 5).collect();
        let (w, b) = fit_binary(&x, &y, 1.0);
        let score = (x.row(0) * &w)[0] + b;
        let expect = (0.25f64 / 0.75).ln();
        assert!((score - expect).abs() < 1e-3);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = stream_rng(3, 0);
        let x = DMatrix::from_fn(20, 8, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let y: Vec<bool> = (0..20).map(|_| rng.random::<bool>()).collect();
        let w = DVector::from_fn(8, |_, _| rng.random::<f64>() - 0.5);
        let b = 0.3;
        let (_, gw, gb) = logistic_loss_and_gradient(&x, &y, 0.7, &w, b);
        let h = 1e-5;
        for j in 0..8 {
            let mut plus = w.clone();
            plus[j] += h;
            let mut minus = w.clone();
            minus[j] -= h;
            let fd = (logistic_loss_and_gradient(&x, &y, 0.7, &plus, b).0
                - logistic_loss_and_gradient(&x, &y, 0.7, &minus, b).0)
                / (2.0 * h);
            assert!((fd - gw[j]).abs() <= 1e-6 * gw[j].abs().max(1.0), "coordinate {j}");
        }
        let fd = (logistic_loss_and_gradient(&x, &y, 0.7, &w, b + h).0
            - logistic_loss_and_gradient(&x, &y, 0.7, &w, b - h).0)
            / (2.0 * h);
        assert!((fd - gb).abs() <= 1e-6 * gb.abs().max(1.0));
    }

    #[test]
    fn training_rejects_bad_input() {
        let x = DMatrix::from_element(2, 1, f64::NAN);
        assert!(train_ovr_logreg(&x, &[vec![0], vec![1]], 2, 1.0).is_err());
        let x = DMatrix::from_element(2, 1, 1.0);
        assert!(train_ovr_logreg(&x, &[vec![0], vec![1]], 2, 0.0).is_err());
        assert!(train_ovr_logreg(&x, &[vec![0]], 2, 1.0).is_err());
    }

    #[test]
    fn missing_label_uses_constant_score() {
        let x = DMatrix::from_fn(4, 1, |r, _| r as f64);
        let clf = train_ovr_logreg(&x, &[vec![0], vec![0], vec![0], vec![0]], 2, 1.0).unwrap();
        let s = clf.scores(&x);
        for i in 0..4 {
            assert!(s[(i, 0)] > s[(i, 1)]);
        }
    }

    #[test]
    fn top_k_examples() {
        let s = DMatrix::from_row_slice(1, 3, &[0.9, 0.1, 0.5]);
        assert_eq!(rank_top_k(&s, &[1]).unwrap(), vec![vec![0]]);
        let s = DMatrix::from_row_slice(1, 2, &[0.5, 0.5]);
        assert_eq!(rank_top_k(&s, &[1]).unwrap(), vec![vec![0]]);
        assert_eq!(rank_top_k(&s, &[2]).unwrap(), vec![vec![0, 1]]);
        assert!(rank_top_k(&s, &[3]).is_err());
        assert!(rank_top_k(&s, &[0]).is_err());
    }

    #[test]
    fn f1_examples() {
        let truth = vec![vec![0], vec![1, 2]];
        assert_eq!(micro_macro_f1(&truth, &truth), (1.0, 1.0));
        assert_eq!(micro_macro_f1(&[vec![], vec![]], &truth).0, 0.0);
        let (micro, macro_) = micro_macro_f1(&[vec![0], vec![0]], &[vec![0], vec![1]]);
        assert_eq!(micro, 0.5);
        // label 0: tp 1 fp 1 → 2/3; label 1: fn 1 → 0
        assert!((macro_ - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn label_file_parsing() {
        let mut ids = NodeIdMap::new();
        for l in ["a", "b", "c"] {
            ids.insert(l);
        }
        let set = LabelSet::read("a x y\nc y\n# note\na z\n".as_bytes(), &ids).unwrap();
        assert_eq!(set.vocabulary, vec!["x", "y", "z"]);
        assert_eq!(set.node_labels, vec![vec![0, 1, 2], vec![], vec![1]]);
        assert_eq!(set.labeled_nodes(), vec![0, 2]);
        assert!(matches!(
            LabelSet::read("q x\n".as_bytes(), &ids),
            Err(Error::Alignment { .. })
        ));
        assert!(matches!(LabelSet::read("a\n".as_bytes(), &ids), Err(Error::Parse { .. })));
    }

    #[test]
    fn report_shape() {
        let features = DMatrix::from_fn(40, 2, |r, c| if c == r % 2 { 1.0 } else { 0.0 });
        let report = evaluate(&features, &labels_of(40), &[0.1, 0.5, 0.9], 10, 5, 1.0).unwrap();
        assert_eq!(report.trials.len(), 30);
        assert_eq!(report.summary.len(), 3);
        // four training nodes may all share one class at ratio 0.1
        assert!(report.trials.iter().filter(|t| t.ratio >= 0.5).all(|t| t.micro_f1 == 1.0));
        let mut buf = Vec::new();
        report.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("0.")).count(), 33);
    }
}
