//! Property tests for the data layer: scaling bounds, split partitions,
//! mask projection, and canonical-file round trips.

use evofs::{stratified_holdout_indices, Dataset64, FeatureMask, Label};
use proptest::collection::vec;
use proptest::prelude::*;

fn label_vec(max: usize) -> impl Strategy<Value = Vec<Label>> {
    // At least one sample per class, up to `max` total.
    (1..max / 2, 1..max / 2).prop_flat_map(|(t, n)| {
        let mut labels: Vec<Label> = Vec::new();
        labels.extend(std::iter::repeat(Label::Tumor).take(t));
        labels.extend(std::iter::repeat(Label::Normal).take(n));
        Just(labels).prop_shuffle()
    })
}

fn matrix(n_samples: usize, n_genes: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    vec(vec(-1e3..1e3f64, n_genes), n_samples)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_bounds_every_column_and_zeroes_constant_ones(
        (rows, constant_col) in (2usize..12, 1usize..6).prop_flat_map(|(n, g)| {
            (matrix(n, g), 0..g)
        })
    ) {
        let mut rows = rows;
        for row in &mut rows {
            row[constant_col] = 4.2;
        }
        let n_genes = rows[0].len();
        let ds = Dataset64::from_rows(rows.clone()).unwrap();
        let (scaled, params) = ds.scale_features().unwrap();

        for j in 0..n_genes {
            let column = scaled.column(j);
            if j == constant_col {
                prop_assert!(column.iter().all(|&v| v == 0.0));
                continue;
            }
            let raw: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                prop_assert!(column.iter().all(|&v| v == 0.0));
                continue;
            }
            for &v in &column {
                prop_assert!((-1.0..=1.0).contains(&v), "gene {j} value {v}");
            }
            // The extremes map exactly onto the interval endpoints.
            prop_assert!(column.iter().any(|&v| v == -1.0));
            prop_assert!(column.iter().any(|&v| v == 1.0));
        }

        // Reapplying the fitted parameters to the raw data reproduces the
        // scaled dataset bit for bit.
        let reapplied = params.apply_to(&ds, false).unwrap();
        prop_assert_eq!(reapplied.values(), scaled.values());
    }

    #[test]
    fn holdout_indices_partition_the_samples_with_stratified_counts(
        labels in label_vec(40),
        fraction in 0.5f64..0.95,
        seed in any::<u64>(),
    ) {
        let (train, test, _) = stratified_holdout_indices(&labels, fraction, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(test.iter()).cloned().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());

        for class in [Label::Tumor, Label::Normal] {
            let members = labels.iter().filter(|&&l| l == class).count();
            let in_train = train.iter().filter(|&&i| labels[i] == class).count();
            let expected = ((fraction * members as f64).round() as usize).min(members);
            prop_assert_eq!(in_train, expected, "class {} at fraction {}", class, fraction);
        }
    }

    #[test]
    fn kfold_assignments_partition_and_balance_each_class(
        labels in label_vec(30),
        k in 2usize..6,
        seed in any::<u64>(),
    ) {
        prop_assume!(k <= labels.len());
        let ds = Dataset64::from_rows(vec![vec![0.0; 3]; labels.len()])
            .unwrap()
            .with_labels(labels.clone())
            .unwrap();
        let folds = ds.stratified_kfold(k, seed).unwrap();

        let mut seen = vec![false; labels.len()];
        for fold in 0..k {
            for idx in folds.test_indices(fold) {
                prop_assert!(!seen[idx], "sample {} in two folds", idx);
                seen[idx] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));

        for class in [Label::Tumor, Label::Normal] {
            let per_fold: Vec<usize> = (0..k)
                .map(|fold| {
                    folds
                        .test_indices(fold)
                        .iter()
                        .filter(|&&i| labels[i] == class)
                        .count()
                })
                .collect();
            let lo = per_fold.iter().min().unwrap();
            let hi = per_fold.iter().max().unwrap();
            prop_assert!(hi - lo <= 1, "class {} spread {:?}", class, per_fold);
        }
    }

    #[test]
    fn mask_projection_filters_each_row_in_order(
        (rows, bits) in (2usize..8, 1usize..10).prop_flat_map(|(n, g)| {
            (matrix(n, g), vec(any::<bool>(), g))
        })
    ) {
        prop_assume!(bits.iter().any(|&b| b));
        let mask = FeatureMask::from_bits(bits.clone());
        let ds = Dataset64::from_rows(rows.clone()).unwrap();
        let projected = ds.apply_mask(&mask).unwrap();
        prop_assert_eq!(projected.n_genes(), mask.popcount());
        for (i, row) in rows.iter().enumerate() {
            let expected: Vec<f64> = row
                .iter()
                .zip(&bits)
                .filter_map(|(&v, &keep)| keep.then_some(v))
                .collect();
            prop_assert_eq!(projected.row(i), &expected[..]);
        }
    }

    #[test]
    fn canonical_files_round_trip_values_labels_and_gene_ids(
        (rows, labels) in (2usize..8, 1usize..6).prop_flat_map(|(n, g)| {
            (matrix(n, g), label_vec(20).prop_map(move |mut l| { l.truncate(n); l }))
        })
    ) {
        prop_assume!(labels.len() == rows.len());
        prop_assume!(labels.contains(&Label::Tumor) && labels.contains(&Label::Normal));
        let ds = Dataset64::from_rows(rows)
            .unwrap()
            .with_labels(labels)
            .unwrap();
        let text = ds.to_canonical_string().unwrap();
        let back = Dataset64::canonical_from_str(&text).unwrap();
        prop_assert_eq!(back.values(), ds.values());
        prop_assert_eq!(back.labels(), ds.labels());
        prop_assert_eq!(back.gene_ids(), ds.gene_ids());
        // Serializing again is byte-stable.
        prop_assert_eq!(back.to_canonical_string().unwrap(), text);
    }
}
