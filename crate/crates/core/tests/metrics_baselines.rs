//! Oracle checks for the metrics and the two baseline classifiers:
//! exhaustive enumeration for the confusion matrix, a direct density
//! evaluation for naive Bayes, and a brute-force reference for kNN.

use std::time::{Duration, Instant};

use evofs::{
    accuracy, aggregate, confusion, format_percent, gnb_fit, gnb_log_scores, gnb_predict,
    knn_predict, ConfusionMatrix, Dataset64, KnnModel, Label,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn labels_from_mask(mask: u32, len: usize) -> Vec<Label> {
    (0..len)
        .map(|i| {
            if mask >> i & 1 == 1 {
                Label::Normal
            } else {
                Label::Tumor
            }
        })
        .collect()
}

#[test]
fn confusion_matches_exhaustive_enumeration_up_to_length_six() {
    let started = Instant::now();
    let mut checked = 0u64;
    for len in 1..=6usize {
        for pred_mask in 0..1u32 << len {
            for actual_mask in 0..1u32 << len {
                let predicted = labels_from_mask(pred_mask, len);
                let actual = labels_from_mask(actual_mask, len);
                let cm = confusion(&predicted, &actual).unwrap();

                let mut expected = ConfusionMatrix::default();
                for (&p, &a) in predicted.iter().zip(&actual) {
                    match (a, p) {
                        (Label::Tumor, Label::Tumor) => expected.true_positive += 1,
                        (Label::Tumor, Label::Normal) => expected.false_negative += 1,
                        (Label::Normal, Label::Normal) => expected.true_negative += 1,
                        (Label::Normal, Label::Tumor) => expected.false_positive += 1,
                    }
                }
                assert_eq!(cm, expected, "pred {pred_mask:b} actual {actual_mask:b}");
                assert_eq!(cm.total(), len);

                let matches = predicted
                    .iter()
                    .zip(&actual)
                    .filter(|(p, a)| p == a)
                    .count();
                assert_eq!(cm.correct(), matches);
                let acc = accuracy(&cm).unwrap();
                assert!((acc - matches as f64 / len as f64).abs() < 1e-15);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, (1..=6).map(|l| 1u64 << (2 * l)).sum::<u64>());
    assert!(started.elapsed() < Duration::from_secs(10));
    println!("confusion oracle: {checked} enumerated cases agreed");
}

#[test]
fn accuracy_and_percent_formatting_reproduce_known_values() {
    let perfect = ConfusionMatrix {
        true_positive: 40,
        false_negative: 0,
        true_negative: 22,
        false_positive: 0,
    };
    assert_eq!(accuracy(&perfect).unwrap(), 1.0);

    // 58 of 62 correct formats as 93.55% under half-up rounding.
    assert_eq!(format_percent(58.0 / 62.0), "93.55%");
    assert_eq!(format_percent(1.0), "100.00%");
    assert_eq!(format_percent(0.99865), "99.87%");
}

#[test]
fn aggregate_matches_a_two_pass_reference() {
    let values = [0.9, 0.95, 1.0, 0.85, 0.9];
    let agg = aggregate(&values).unwrap();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    assert!((agg.mean - mean).abs() < 1e-15);
    assert!((agg.std_dev - var.sqrt()).abs() < 1e-15);
    assert_eq!(agg.min, 0.85);
    assert_eq!(agg.max, 1.0);
}

fn random_labeled(rng: &mut ChaCha8Rng, n: usize, genes: usize) -> Dataset64 {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..genes).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    // Guarantee both classes regardless of the draw.
    let labels: Vec<Label> = (0..n)
        .map(|i| {
            if i < 2 {
                [Label::Tumor, Label::Normal][i]
            } else if rng.gen_bool(0.6) {
                Label::Tumor
            } else {
                Label::Normal
            }
        })
        .collect();
    Dataset64::from_rows(rows).unwrap().with_labels(labels).unwrap()
}

#[test]
fn gnb_log_scores_match_a_direct_density_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let ds = random_labeled(&mut rng, 25, 4);
    let model = gnb_fit(&ds).unwrap();
    assert!((model.priors[0] + model.priors[1] - 1.0).abs() < 1e-15);

    for _ in 0..20 {
        let point: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let scores = gnb_log_scores(&model, &point).unwrap();
        for c in 0..2 {
            // Reference: log of prior times the product of Gaussian pdfs,
            // evaluating each pdf before taking its logarithm.
            let mut reference = model.priors[c].ln();
            for j in 0..4 {
                let var = model.variances[c][j];
                let d = point[j] - model.means[c][j];
                let pdf = (1.0 / (2.0 * std::f64::consts::PI * var).sqrt())
                    * (-d * d / (2.0 * var)).exp();
                reference += pdf.ln();
            }
            assert!(
                (scores[c] - reference).abs() < 1e-9,
                "class {c}: {} vs {reference}",
                scores[c]
            );
        }
        let predicted = gnb_predict(&model, &point).unwrap();
        let expected = if scores[0] >= scores[1] {
            Label::Tumor
        } else {
            Label::Normal
        };
        assert_eq!(predicted, expected);
    }
}

#[test]
fn knn_agrees_with_a_brute_force_reference_on_fifty_queries() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let train = random_labeled(&mut rng, 30, 5);
    let labels = train.labels().unwrap().to_vec();

    for k in [1usize, 3, 5] {
        let model = KnnModel::new(train.clone(), k).unwrap();
        for q in 0..50 {
            let query: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            // Reference: full pairwise distances, stable sort, majority vote.
            let mut dist: Vec<(f64, usize)> = (0..train.n_samples())
                .map(|i| {
                    let d = train
                        .row(i)
                        .iter()
                        .zip(&query)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    (d, i)
                })
                .collect();
            dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let tumor = dist[..k].iter().filter(|&&(_, i)| labels[i] == Label::Tumor).count();
            let expected = if tumor > k / 2 {
                Label::Tumor
            } else {
                Label::Normal
            };
            assert_eq!(
                knn_predict(&model, &query).unwrap(),
                expected,
                "k={k} query {q}"
            );
        }
    }
}
