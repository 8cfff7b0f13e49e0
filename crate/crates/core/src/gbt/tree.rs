use crate::prelude::*;

/// One tree node. Children are indices into the owning tree's node array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// Samples with `x[feature] < threshold` go left.
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
    /// Contribution to the class margin, learning rate already applied.
    Leaf { value: f64 },
}

/// Binary regression tree; the root is `nodes[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        Self { nodes: vec![Node::Leaf { value }] }
    }

    pub fn predict<T: Copy + Into<f64>>(&self, x: &[T]) -> f64 {
        let mut i = 0usize;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature as usize].into() < threshold { left } else { right } as usize;
                }
            }
        }
    }

    pub fn n_internal(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.len() - self.n_internal()
    }

    /// Number of splits on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left as usize).max(go(nodes, right as usize)),
            }
        }
        go(&self.nodes, 0)
    }

    /// 3 values per split (feature, threshold, child link) plus 1 per leaf.
    pub fn param_count(&self) -> usize {
        3 * self.n_internal() + self.n_leaves()
    }

    /// Largest feature index referenced, if any.
    pub fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature as usize),
                Node::Leaf { .. } => None,
            })
            .max()
    }

    /// Structural validity: children in range, acyclic (children after parent),
    /// every node reachable exactly once, leaves finite.
    pub fn is_well_formed(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.nodes.len()];
        seen[0] = true;
        for (i, n) in self.nodes.iter().enumerate() {
            match *n {
                Node::Leaf { value } => {
                    if !value.is_finite() {
                        return false;
                    }
                }
                Node::Split { threshold, left, right, .. } => {
                    let (l, r) = (left as usize, right as usize);
                    if threshold.is_nan() || l <= i || r <= i || l >= self.nodes.len() || r >= self.nodes.len() {
                        return false;
                    }
                    if seen[l] || seen[r] || l == r {
                        return false;
                    }
                    seen[l] = true;
                    seen[r] = true;
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}
