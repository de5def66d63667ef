//! A one-tree forest that may split only at the root must pick the split a
//! brute-force Gini search picks on the same bootstrap sample.

use botminer_core::forest::{bootstrap_sample, Dataset, ForestConfig, Label, Node, RandomForestModel};
use proptest::prelude::*;

/// Weighted child Gini times two, as an exact fraction: `2 b h / n` summed
/// over both sides. Smaller is better.
fn impurity(left: (u64, u64), right: (u64, u64)) -> (u128, u128) {
    let side = |(b, h): (u64, u64)| -> (u128, u128) {
        let n = (b + h) as u128;
        (2 * b as u128 * h as u128, n.max(1))
    };
    let (a, da) = side(left);
    let (c, dc) = side(right);
    (a * dc + c * da, da * dc)
}

fn less(x: (u128, u128), y: (u128, u128)) -> bool {
    x.0 * y.1 < y.0 * x.1
}

#[derive(Debug, PartialEq)]
enum Expected {
    Leaf(u64, u64),
    Split { feature: usize, threshold: f64, left: (u64, u64), right: (u64, u64) },
}

fn brute_force(rows: &[(Vec<f64>, Label)], sample: &[usize], dim: usize) -> Expected {
    let count = |pred: &dyn Fn(&[f64]) -> bool| {
        let mut c = (0u64, 0u64);
        for &i in sample {
            if pred(&rows[i].0) {
                match rows[i].1 {
                    Label::Bot => c.0 += 1,
                    Label::Human => c.1 += 1,
                }
            }
        }
        c
    };
    let all = count(&|_| true);
    if all.0 == 0 || all.1 == 0 {
        return Expected::Leaf(all.0, all.1);
    }
    let parent = impurity(all, (0, 0));
    let mut best: Option<((u128, u128), Expected)> = None;
    for f in 0..dim {
        let mut values: Vec<f64> = sample.iter().map(|&i| rows[i].0[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let left = count(&|x| x[f] <= w[0]);
            let right = (all.0 - left.0, all.1 - left.1);
            let score = impurity(left, right);
            if !less(score, parent) {
                continue;
            }
            if best.as_ref().is_none_or(|(b, _)| less(score, *b)) {
                let threshold = (w[0] + w[1]) / 2.0;
                best = Some((score, Expected::Split { feature: f, threshold, left, right }));
            }
        }
    }
    best.map_or(Expected::Leaf(all.0, all.1), |(_, e)| e)
}

fn dataset() -> impl Strategy<Value = (usize, Vec<(Vec<f64>, Label)>)> {
    (1usize..=4).prop_flat_map(|dim| {
        let row = (prop::collection::vec(0u8..6, dim), any::<bool>()).prop_map(|(x, bot)| {
            (
                x.into_iter().map(f64::from).collect::<Vec<_>>(),
                if bot { Label::Bot } else { Label::Human },
            )
        });
        (Just(dim), prop::collection::vec(row, 2..40))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn root_split_matches_brute_force((dim, rows) in dataset(), seed in any::<u64>()) {
        prop_assume!(rows.iter().any(|r| r.1 == Label::Bot) && rows.iter().any(|r| r.1 == Label::Human));
        let data = Dataset::from_rows(dim, rows.iter().map(|(x, l)| (x.as_slice(), *l))).unwrap();
        let config = ForestConfig { ntree: 1, mtry: dim, min_node_size: rows.len(), seed };
        let names = (0..dim).map(|i| format!("f{i}")).collect();
        let model = RandomForestModel::fit(&data, config, names).unwrap();
        let nodes = model.trees()[0].nodes();

        let sample = bootstrap_sample(rows.len(), &config, 0);
        match brute_force(&rows, &sample, dim) {
            Expected::Leaf(b, h) => {
                prop_assert_eq!(nodes.len(), 1);
                prop_assert_eq!(nodes[0], Node::Leaf { bot: b as u32, human: h as u32 });
            }
            Expected::Split { feature, threshold, left, right } => {
                prop_assert_eq!(nodes.len(), 3);
                match nodes[0] {
                    Node::Split { feature: f, threshold: t, right: r, .. } => {
                        prop_assert_eq!(f, feature);
                        prop_assert!((t - threshold).abs() < 1e-12);
                        prop_assert_eq!(r, 2);
                    }
                    Node::Leaf { .. } => prop_assert!(false, "expected a split"),
                }
                prop_assert_eq!(nodes[1], Node::Leaf { bot: left.0 as u32, human: left.1 as u32 });
                prop_assert_eq!(nodes[2], Node::Leaf { bot: right.0 as u32, human: right.1 as u32 });
            }
        }
    }
}
