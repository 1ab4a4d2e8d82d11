use serde::{Deserialize, Serialize};

/// One regression tree. A sample goes left when `x[feature] <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        #[serde(rename = "f")]
        feature: usize,
        #[serde(rename = "t")]
        threshold: f64,
        #[serde(rename = "l")]
        left: Box<TreeNode>,
        #[serde(rename = "r")]
        right: Box<TreeNode>,
    },
    Leaf {
        #[serde(rename = "v")]
        value: f64,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { feature, left, right, .. } => {
                Some((*feature).max(left.max_feature().unwrap_or(0)).max(right.max_feature().unwrap_or(0)))
            }
        }
    }

    pub(crate) fn all_finite(&self) -> bool {
        match self {
            TreeNode::Leaf { value } => value.is_finite(),
            TreeNode::Split { threshold, left, right, .. } => {
                threshold.is_finite() && left.all_finite() && right.all_finite()
            }
        }
    }
}

/// How leaf values are derived from the node's gradient statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LeafRule {
    /// Mean residual.
    Mean,
    /// Newton step `sum(g) / (sum(h) + 1e-12)`.
    Newton,
}

const HESSIAN_GUARD: f64 = 1e-12;

pub(crate) struct TreeBuilder<'a> {
    /// Column-major feature values.
    pub columns: &'a [Vec<f64>],
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub leaf_rule: LeafRule,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl TreeBuilder<'_> {
    /// `sorted[f]` lists the sample indices ordered by feature `f` (stable on
    /// ties), which every node keeps through stable partitioning.
    pub fn build(&self, sorted: Vec<Vec<usize>>) -> TreeNode {
        self.grow(sorted, 0)
    }

    fn grow(&self, sorted: Vec<Vec<usize>>, depth: usize) -> TreeNode {
        let members = &sorted[0];
        let n = members.len();
        if depth >= self.max_depth || n < self.min_samples_split {
            return self.leaf(members);
        }
        let Some(best) = self.best_split(&sorted) else {
            return self.leaf(members);
        };

        let column = &self.columns[best.feature];
        let (left, right): (Vec<Vec<usize>>, Vec<Vec<usize>>) =
            sorted.into_iter().map(|list| list.into_iter().partition(|&i| column[i] <= best.threshold)).unzip();

        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(left, depth + 1)),
            right: Box::new(self.grow(right, depth + 1)),
        }
    }

    fn leaf(&self, members: &[usize]) -> TreeNode {
        let g: f64 = members.iter().map(|&i| self.grad[i]).sum();
        let value = match self.leaf_rule {
            LeafRule::Mean => g / members.len() as f64,
            LeafRule::Newton => {
                let h: f64 = members.iter().map(|&i| self.hess[i]).sum();
                g / (h + HESSIAN_GUARD)
            }
        };
        TreeNode::Leaf { value }
    }

    /// Exhaustive search over features and midpoints between consecutive
    /// distinct values, maximizing the squared-error reduction of the
    /// gradients. Strict improvement keeps the lowest feature, then the lowest
    /// threshold, on ties.
    fn best_split(&self, sorted: &[Vec<usize>]) -> Option<BestSplit> {
        let n = sorted[0].len() as f64;
        let total: f64 = sorted[0].iter().map(|&i| self.grad[i]).sum();
        let parent_score = total * total / n;

        let mut best: Option<BestSplit> = None;
        for (feature, order) in sorted.iter().enumerate() {
            let column = &self.columns[feature];
            let mut left_sum = 0.0;
            for pos in 0..order.len() - 1 {
                let i = order[pos];
                left_sum += self.grad[i];
                let here = column[i];
                let next = column[order[pos + 1]];
                if next <= here {
                    continue;
                }
                let n_left = (pos + 1) as f64;
                let n_right = n - n_left;
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / n_left + right_sum * right_sum / n_right - parent_score;
                let beats = match &best {
                    None => gain > 0.0,
                    Some(b) => gain > b.gain,
                };
                if beats {
                    let mut threshold = here + (next - here) / 2.0;
                    if threshold >= next {
                        threshold = here;
                    }
                    best = Some(BestSplit { feature, threshold, gain });
                }
            }
        }
        best
    }
}
