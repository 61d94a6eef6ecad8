//! Labeled dependency trees over path morphemes plus an artificial root.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepEdge {
    pub head: usize,
    pub dependent: usize,
    pub label: String,
}

impl DepEdge {
    pub fn new(head: usize, dependent: usize, label: impl Into<String>) -> Self {
        DepEdge {
            head,
            dependent,
            label: label.into(),
        }
    }
}

/// A dependency tree over nodes `1..=len`, rooted at node 0.
///
/// Edges are kept sorted by dependent, so `edges()[d - 1]` is the edge of
/// node `d`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepTree {
    len: usize,
    edges: Vec<DepEdge>,
}

impl DepTree {
    /// Validates single-headedness, head range, and acyclicity.
    pub fn new(len: usize, mut edges: Vec<DepEdge>) -> Result<Self> {
        edges.sort_by_key(|e| e.dependent);
        if edges.len() != len {
            return Err(Error::InvalidTree(format!(
                "{} edges for {len} nodes",
                edges.len()
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.dependent != i + 1 {
                return Err(Error::InvalidTree(format!(
                    "node {} has no head or more than one head",
                    i + 1
                )));
            }
            if e.head > len {
                return Err(Error::InvalidTree(format!(
                    "head {} of node {} out of range",
                    e.head, e.dependent
                )));
            }
            if e.head == e.dependent {
                return Err(Error::InvalidTree(format!("node {} heads itself", e.head)));
            }
        }
        let tree = DepTree { len, edges };
        for d in 1..=len {
            let mut node = d;
            let mut steps = 0;
            while node != 0 {
                node = tree.head(node);
                steps += 1;
                if steps > len {
                    return Err(Error::InvalidTree(format!("cycle through node {d}")));
                }
            }
        }
        Ok(tree)
    }

    /// Builds a tree from per-node `(head, label)` pairs for nodes `1..=n`.
    pub fn from_heads<S: Into<String>>(
        heads: impl IntoIterator<Item = (usize, S)>,
    ) -> Result<Self> {
        let edges: Vec<DepEdge> = heads
            .into_iter()
            .enumerate()
            .map(|(i, (h, l))| DepEdge::new(h, i + 1, l))
            .collect();
        DepTree::new(edges.len(), edges)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn edges(&self) -> &[DepEdge] {
        &self.edges
    }

    pub fn head(&self, dependent: usize) -> usize {
        self.edges[dependent - 1].head
    }

    pub fn label(&self, dependent: usize) -> &str {
        &self.edges[dependent - 1].label
    }

    /// `heads()[d]` is the head of node `d`; index 0 is unused.
    pub fn heads(&self) -> Vec<usize> {
        std::iter::once(0)
            .chain(self.edges.iter().map(|e| e.head))
            .collect()
    }

    pub fn set_head(&mut self, dependent: usize, head: usize) {
        self.edges[dependent - 1].head = head;
    }

    pub fn is_ancestor(&self, ancestor: usize, mut node: usize) -> bool {
        while node != 0 {
            node = self.head(node);
            if node == ancestor {
                return true;
            }
        }
        false
    }
}

/// True iff no two edges cross when nodes are laid out in path order with
/// the root leftmost. Checked through dominance: every node strictly inside
/// an edge's span must descend from the edge's head.
pub fn check_projective(tree: &DepTree) -> bool {
    first_nonprojective_edge(tree).is_none()
}

/// The shortest edge whose span contains a node its head does not dominate.
pub(crate) fn first_nonprojective_edge(tree: &DepTree) -> Option<usize> {
    let mut worst: Option<(usize, usize)> = None;
    for e in tree.edges() {
        let (lo, hi) = if e.head < e.dependent {
            (e.head, e.dependent)
        } else {
            (e.dependent, e.head)
        };
        let covered_ok = (lo + 1..hi).all(|k| e.head == 0 || tree.is_ancestor(e.head, k));
        if !covered_ok {
            let span = hi - lo;
            if worst.is_none_or(|(_, s)| span < s) {
                worst = Some((e.dependent, span));
            }
        }
    }
    worst.map(|(d, _)| d)
}
