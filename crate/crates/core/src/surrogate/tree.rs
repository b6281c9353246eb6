//! Binary classification tree with greedy Gini splits.
//!
//! Stands in for CART in the surrogate refinement pipeline. Training is
//! deterministic: features are scanned in index order, candidate
//! thresholds in ascending order, and a split must strictly improve the
//! weighted impurity, so ties resolve to the lowest feature index and
//! lowest threshold.

use super::FeatureVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("training data empty")]
    Empty,
    #[error("features and labels differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("single-class training data (all labels {0})")]
    SingleClass(bool),
    #[error("invalid hyperparameters: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Feature indices the tree may split on; `None` means all.
    pub features: Option<Vec<usize>>,
}

impl Default for TreeConfig {
    fn default() -> TreeConfig {
        TreeConfig {
            max_depth: 8,
            min_leaf: 5,
            features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        prob_positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    /// Probability of the positive class at the sample's leaf.
    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { prob_positive } => return *prob_positive,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x.0[*feature] < *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> bool {
        self.predict_proba(x) >= 0.5
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a [FeatureVector],
    y: &'a [bool],
    cfg: &'a TreeConfig,
    features: Vec<usize>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn build(&mut self, indices: &[u32], depth: usize) -> u32 {
        let total = indices.len();
        let pos = indices.iter().filter(|&&i| self.y[i as usize]).count();
        let parent_gini = gini(pos, total);
        let make_leaf = |nodes: &mut Vec<Node>| {
            nodes.push(Node::Leaf {
                prob_positive: pos as f64 / total as f64,
            });
            (nodes.len() - 1) as u32
        };
        if pos == 0
            || pos == total
            || depth >= self.cfg.max_depth
            || total < 2 * self.cfg.min_leaf
        {
            return make_leaf(&mut self.nodes);
        }

        // Best split: lowest weighted impurity, ties to the lowest feature
        // index then lowest threshold (guaranteed by scan order + strict
        // improvement).
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted: Vec<(f64, bool)> = Vec::with_capacity(total);
        for &feature in &self.features {
            sorted.clear();
            sorted.extend(
                indices
                    .iter()
                    .map(|&i| (self.x[i as usize].0[feature], self.y[i as usize])),
            );
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0usize;
            for i in 0..total - 1 {
                if sorted[i].1 {
                    left_pos += 1;
                }
                if sorted[i].0 == sorted[i + 1].0 {
                    continue;
                }
                let left_n = i + 1;
                let right_n = total - left_n;
                if left_n < self.cfg.min_leaf || right_n < self.cfg.min_leaf {
                    continue;
                }
                let weighted = (left_n as f64 * gini(left_pos, left_n)
                    + right_n as f64 * gini(pos - left_pos, right_n))
                    / total as f64;
                if best.is_none_or(|(b, _, _)| weighted < b - 1e-12) {
                    let threshold = 0.5 * (sorted[i].0 + sorted[i + 1].0);
                    best = Some((weighted, feature, threshold));
                }
            }
        }
        let Some((weighted, feature, threshold)) = best else {
            return make_leaf(&mut self.nodes);
        };
        if weighted >= parent_gini - 1e-12 {
            return make_leaf(&mut self.nodes);
        }

        let (left_idx, right_idx): (Vec<u32>, Vec<u32>) = indices
            .iter()
            .partition(|&&i| self.x[i as usize].0[feature] < threshold);
        // Reserve the split slot before recursing so child indices are
        // known after.
        self.nodes.push(Node::Leaf { prob_positive: 0.0 });
        let slot = (self.nodes.len() - 1) as u32;
        let left = self.build(&left_idx, depth + 1);
        let right = self.build(&right_idx, depth + 1);
        self.nodes[slot as usize] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }
}

/// Train a Gini classification tree.
pub fn train_tree(
    x: &[FeatureVector],
    y: &[bool],
    cfg: &TreeConfig,
) -> Result<DecisionTree, TreeError> {
    if x.is_empty() {
        return Err(TreeError::Empty);
    }
    if x.len() != y.len() {
        return Err(TreeError::LengthMismatch(x.len(), y.len()));
    }
    if cfg.min_leaf == 0 || cfg.max_depth == 0 {
        return Err(TreeError::InvalidConfig(
            "min_leaf and max_depth must be >= 1".into(),
        ));
    }
    let pos = y.iter().filter(|&&l| l).count();
    if pos == 0 || pos == y.len() {
        return Err(TreeError::SingleClass(pos > 0));
    }
    let features = match &cfg.features {
        Some(f) => {
            if f.is_empty() || f.iter().any(|&i| i >= super::FEATURE_COUNT) {
                return Err(TreeError::InvalidConfig(
                    "feature subset empty or out of range".into(),
                ));
            }
            f.clone()
        }
        None => (0..super::FEATURE_COUNT).collect(),
    };
    let mut builder = Builder {
        x,
        y,
        cfg,
        features,
        nodes: Vec::new(),
    };
    let indices: Vec<u32> = (0..x.len() as u32).collect();
    let root = builder.build(&indices, 0);
    debug_assert_eq!(root, 0);
    Ok(DecisionTree {
        nodes: builder.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::super::FEATURE_COUNT;
    use super::*;

    fn fv(age: f64, income: f64) -> FeatureVector {
        let mut f = [0.0; FEATURE_COUNT];
        f[0] = age;
        f[2] = income;
        FeatureVector(f)
    }

    #[test]
    fn linearly_separable_age_gives_depth_one_perfect_tree() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for age in 5..21 {
            x.push(fv(age as f64, 0.0));
            y.push(true);
        }
        for age in 41..80 {
            x.push(fv(age as f64, 50_000.0));
            y.push(false);
        }
        let tree = train_tree(&x, &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.depth(), 1);
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(f, &l)| tree.predict(f) == l)
            .count();
        assert_eq!(correct, x.len());
    }

    #[test]
    fn random_labels_with_large_min_leaf_stay_near_root() {
        let mut rng = crate::rng::stream_rng(5, 0);
        use rand::Rng;
        let x: Vec<FeatureVector> = (0..100)
            .map(|_| fv(rng.random_range(0.0..90.0), rng.random_range(0.0..1e5)))
            .collect();
        let y: Vec<bool> = (0..100).map(|_| rng.random::<f64>() < 0.6).collect();
        let cfg = TreeConfig {
            max_depth: 8,
            min_leaf: 40,
            features: None,
        };
        let tree = train_tree(&x, &y, &cfg).unwrap();
        assert!(tree.depth() <= 1, "depth {}", tree.depth());
        let majority = y.iter().filter(|&&l| l).count().max(
            y.iter().filter(|&&l| !l).count(),
        ) as f64
            / y.len() as f64;
        let acc = x
            .iter()
            .zip(&y)
            .filter(|(f, &l)| tree.predict(f) == l)
            .count() as f64
            / y.len() as f64;
        assert!(
            (acc - majority).abs() <= 0.15,
            "accuracy {acc} vs majority {majority}"
        );
    }

    #[test]
    fn retraining_on_own_predictions_is_a_fixed_point() {
        let mut rng = crate::rng::stream_rng(9, 0);
        use rand::Rng;
        let x: Vec<FeatureVector> = (0..200)
            .map(|_| fv(rng.random_range(0.0..90.0), rng.random_range(0.0..1e5)))
            .collect();
        let y: Vec<bool> = x
            .iter()
            .map(|f| f.0[0] < 30.0 || f.0[2] > 70_000.0)
            .collect();
        let cfg = TreeConfig {
            max_depth: 8,
            min_leaf: 1,
            features: None,
        };
        let tree = train_tree(&x, &y, &cfg).unwrap();
        let predicted: Vec<bool> = x.iter().map(|f| tree.predict(f)).collect();
        let retrained = train_tree(&x, &predicted, &cfg).unwrap();
        for f in &x {
            assert_eq!(retrained.predict(f), tree.predict(f));
        }
    }

    #[test]
    fn training_is_deterministic() {
        let mut rng = crate::rng::stream_rng(12, 0);
        use rand::Rng;
        let x: Vec<FeatureVector> = (0..150)
            .map(|_| fv(rng.random_range(0.0..90.0), rng.random_range(0.0..1e5)))
            .collect();
        let y: Vec<bool> = x.iter().map(|f| f.0[0] * 3.0 + f.0[2] / 1e4 > 60.0).collect();
        let a = train_tree(&x, &y, &TreeConfig::default()).unwrap();
        let b = train_tree(&x, &y, &TreeConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![fv(10.0, 0.0), fv(20.0, 0.0)];
        assert!(matches!(
            train_tree(&x, &[true, true], &TreeConfig::default()),
            Err(TreeError::SingleClass(true))
        ));
    }

    #[test]
    fn feature_subset_is_honored() {
        // Labels depend only on age; restricting the tree to income makes
        // it unable to separate, restricting to age keeps it perfect.
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let age = if i % 2 == 0 { 10.0 } else { 60.0 };
            x.push(fv(age, 1000.0));
            y.push(age < 30.0);
        }
        let age_only = TreeConfig {
            features: Some(vec![0]),
            min_leaf: 1,
            ..TreeConfig::default()
        };
        let income_only = TreeConfig {
            features: Some(vec![2]),
            min_leaf: 1,
            ..TreeConfig::default()
        };
        let t_age = train_tree(&x, &y, &age_only).unwrap();
        assert!(x.iter().zip(&y).all(|(f, &l)| t_age.predict(f) == l));
        let t_income = train_tree(&x, &y, &income_only).unwrap();
        assert_eq!(t_income.depth(), 0);
    }
}
