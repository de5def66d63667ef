use alloc::vec::Vec;
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{stream_rng, Dataset, ForestConfig, ForestError, Label};

/// A tree node. Trees are stored in preorder, so a split's left child is
/// always the node right after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        /// Index of the right child.
        right: usize,
        /// Gini decrease of this split, in units of rows.
        decrease: f64,
    },
    /// Bootstrap class counts that reached this leaf.
    Leaf { bot: u32, human: u32 },
}

impl Node {
    /// Leaf majority; equal counts go to human.
    pub fn leaf_label(bot: u32, human: u32) -> Label {
        if bot > human {
            Label::Bot
        } else {
            Label::Human
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    /// Wraps a preorder node list, checking that it forms one complete tree
    /// over `dim` features.
    pub fn from_nodes(nodes: Vec<Node>, dim: usize) -> Result<Self, ForestError> {
        let tree = Self { nodes };
        tree.check(dim)?;
        Ok(tree)
    }

    pub(crate) fn check(&self, dim: usize) -> Result<(), ForestError> {
        fn walk(nodes: &[Node], at: usize, dim: usize) -> Result<usize, ForestError> {
            match nodes.get(at) {
                None => Err(ForestError::InvalidTree("child index out of range")),
                Some(Node::Leaf { .. }) => Ok(at + 1),
                Some(&Node::Split { feature, threshold, right, .. }) => {
                    if feature >= dim {
                        return Err(ForestError::InvalidTree("split feature out of range"));
                    }
                    if threshold.is_nan() {
                        return Err(ForestError::InvalidTree("NaN threshold"));
                    }
                    let left_end = walk(nodes, at + 1, dim)?;
                    if right != left_end {
                        return Err(ForestError::InvalidTree("right child is not in preorder position"));
                    }
                    walk(nodes, right, dim)
                }
            }
        }
        if self.nodes.is_empty() {
            return Err(ForestError::InvalidTree("empty tree"));
        }
        let end = walk(&self.nodes, 0, dim)?;
        if end != self.nodes.len() {
            return Err(ForestError::InvalidTree("trailing nodes"));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// The leaf `x` falls into.
    pub fn leaf(&self, x: &[f64]) -> &Node {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split { feature, threshold, right, .. } => {
                    at = if x[*feature] <= *threshold { at + 1 } else { *right };
                }
                leaf => return leaf,
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        match *self.leaf(x) {
            Node::Leaf { bot, human } => Node::leaf_label(bot, human),
            Node::Split { .. } => unreachable!("leaf() only returns leaves"),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 1,
                Node::Split { right, .. } => 1 + go(nodes, at + 1).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

/// Row indices drawn with replacement for tree `tree_index`.
///
/// This is the first thing [`grow_tree`] draws from the tree's stream.
pub fn bootstrap_sample(n: usize, config: &ForestConfig, tree_index: usize) -> Vec<usize> {
    let mut rng = stream_rng(config.seed, tree_index as u64);
    draw_bootstrap(&mut rng, n)
}

fn draw_bootstrap(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Grows tree number `tree_index` of a forest. The result depends only on
/// `data`, `config` and `tree_index`.
///
/// Callers are expected to have validated `data` and `config` (see
/// [`RandomForestModel::check_fit`](super::RandomForestModel::check_fit)).
pub fn grow_tree(data: &Dataset, config: &ForestConfig, tree_index: usize) -> DecisionTree {
    let mut rng = stream_rng(config.seed, tree_index as u64);
    let mut rows = draw_bootstrap(&mut rng, data.len());
    let mut nodes: Vec<Node> = Vec::new();
    let mut scratch: Vec<(f64, Label)> = Vec::with_capacity(rows.len());

    // (lo, hi, parent split waiting for its right index)
    let mut stack: Vec<(usize, usize, Option<usize>)> = alloc::vec![(0, rows.len(), None)];
    while let Some((lo, hi, parent)) = stack.pop() {
        let here = nodes.len();
        if let Some(p) = parent {
            if let Node::Split { right, .. } = &mut nodes[p] {
                *right = here;
            }
        }

        let slice = &mut rows[lo..hi];
        let (bot, human) = class_counts(data, slice);
        let size = hi - lo;
        let split = if bot == 0 || human == 0 || size < config.min_node_size {
            None
        } else {
            let features = candidate_features(&mut rng, data.dim(), config.mtry);
            best_split(data, slice, &features, &mut scratch)
        };

        match split {
            None => nodes.push(Node::Leaf { bot: bot as u32, human: human as u32 }),
            Some(s) => {
                let mid = lo + partition(data, slice, s.feature, s.threshold);
                nodes.push(Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    right: usize::MAX,
                    decrease: s.decrease,
                });
                stack.push((mid, hi, Some(here)));
                stack.push((lo, mid, None));
            }
        }
    }
    DecisionTree { nodes }
}

fn class_counts(data: &Dataset, rows: &[usize]) -> (usize, usize) {
    let bot = rows.iter().filter(|&&r| data.label(r).is_bot()).count();
    (bot, rows.len() - bot)
}

/// `mtry` distinct feature indices, returned in ascending order so that
/// ties between equally good splits resolve to the lowest feature.
fn candidate_features(rng: &mut ChaCha8Rng, dim: usize, mtry: usize) -> Vec<usize> {
    let mut features = index::sample(rng, dim, mtry).into_vec();
    features.sort_unstable();
    features
}

fn partition(data: &Dataset, rows: &mut [usize], feature: usize, threshold: f64) -> usize {
    let mut left = 0;
    for i in 0..rows.len() {
        if data.value(rows[i], feature) <= threshold {
            rows.swap(i, left);
            left += 1;
        }
    }
    left
}

#[derive(Debug, Clone, Copy)]
struct Split {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

/// Exact split quality `(b_l² + h_l²)/n_l + (b_r² + h_r²)/n_r`, kept as a
/// fraction. Larger is better; it is `n` minus the weighted child Gini.
#[derive(Debug, Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn node(bot: usize, human: usize) -> Self {
        let (b, h) = (bot as u128, human as u128);
        Self { num: b * b + h * h, den: b + h }
    }

    fn children(left: (usize, usize), right: (usize, usize)) -> Self {
        let l = Self::node(left.0, left.1);
        let r = Self::node(right.0, right.1);
        Self { num: l.num * r.den + r.num * l.den, den: l.den * r.den }
    }

    fn gt(self, other: Self) -> bool {
        self.num * other.den > other.num * self.den
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn best_split(
    data: &Dataset,
    rows: &[usize],
    features: &[usize],
    scratch: &mut Vec<(f64, Label)>,
) -> Option<Split> {
    let (bot, human) = class_counts(data, rows);
    let parent = Purity::node(bot, human);
    let mut best: Option<(Purity, usize, f64)> = None;

    for &feature in features {
        scratch.clear();
        scratch.extend(rows.iter().map(|&r| (data.value(r, feature), data.label(r))));
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0));

        let (mut lb, mut lh) = (0usize, 0usize);
        for i in 0..scratch.len() - 1 {
            match scratch[i].1 {
                Label::Bot => lb += 1,
                Label::Human => lh += 1,
            }
            let (here, next) = (scratch[i].0, scratch[i + 1].0);
            if here == next {
                continue;
            }
            let purity = Purity::children((lb, lh), (bot - lb, human - lh));
            if !purity.gt(parent) {
                continue;
            }
            if best.is_none_or(|(b, _, _)| purity.gt(b)) {
                best = Some((purity, feature, midpoint(here, next)));
            }
        }
    }

    best.map(|(purity, feature, threshold)| Split {
        feature,
        threshold,
        decrease: purity.to_f64() - parent.to_f64(),
    })
}

/// Midpoint of two adjacent sorted values, nudged so that `a <= t < b`.
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}
