use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::query::{JoinEdge, TriplePattern};

/// A join tree over triple patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expression {
    Leaf(TriplePattern),
    Join {
        left: Box<Expression>,
        right: Box<Expression>,
        /// Query edges with one endpoint on each side; empty for a
        /// cartesian product.
        edges: Vec<JoinEdge>,
    },
}

impl Expression {
    pub fn leaf(tp: TriplePattern) -> Self {
        Expression::Leaf(tp)
    }

    /// Joins two expressions, keeping the edges of `query_edges` that cross
    /// between them.
    pub fn join(left: Expression, right: Expression, query_edges: &[JoinEdge]) -> Self {
        let l = left.ordinals();
        let r = right.ordinals();
        let edges = query_edges
            .iter()
            .filter(|e| {
                (l.contains(&e.left) && r.contains(&e.right))
                    || (r.contains(&e.left) && l.contains(&e.right))
            })
            .cloned()
            .collect();
        Expression::Join {
            left: Box::new(left),
            right: Box::new(right),
            edges,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expression::Leaf(_))
    }

    pub fn as_leaf(&self) -> Option<&TriplePattern> {
        match self {
            Expression::Leaf(tp) => Some(tp),
            Expression::Join { .. } => None,
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&TriplePattern> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expression, out: &mut Vec<&'a TriplePattern>) {
            match e {
                Expression::Leaf(tp) => out.push(tp),
                Expression::Join { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn ordinals(&self) -> BTreeSet<usize> {
        self.leaves().iter().map(|tp| tp.ordinal).collect()
    }

    pub fn find_leaf(&self, ordinal: usize) -> Option<&TriplePattern> {
        self.leaves().into_iter().find(|tp| tp.ordinal == ordinal)
    }

    pub fn join_count(&self) -> usize {
        match self {
            Expression::Leaf(_) => 0,
            Expression::Join { left, right, .. } => 1 + left.join_count() + right.join_count(),
        }
    }

    /// Join nodes in post-order (children before parents, left before right).
    pub fn join_nodes(&self) -> Vec<&Expression> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expression, out: &mut Vec<&'a Expression>) {
            if let Expression::Join { left, right, .. } = e {
                walk(left, out);
                walk(right, out);
                out.push(e);
            }
        }
        walk(self, &mut out);
        out
    }

    /// All join edges inside this expression.
    pub fn internal_edges(&self) -> Vec<&JoinEdge> {
        let mut out = Vec::new();
        for node in self.join_nodes() {
            if let Expression::Join { edges, .. } = node {
                out.extend(edges.iter());
            }
        }
        out
    }

    pub fn is_left_deep(&self) -> bool {
        match self {
            Expression::Leaf(_) => true,
            Expression::Join { left, right, .. } => right.is_leaf() && left.is_left_deep(),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Leaf(tp) => write!(f, "tp{}", tp.ordinal),
            Expression::Join { left, right, .. } => write!(f, "({left} ⋈ {right})"),
        }
    }
}
