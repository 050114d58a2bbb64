//! Orthogonality (compatibility) structure of a ray set.

use serde::{Deserialize, Serialize};

use super::rays::{yu_oh_rays, Ray};

/// Rays as nodes; edges join exactly orthogonal rays; triples are complete
/// orthogonal bases found among the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityGraph {
    rays: Vec<Ray>,
    edges: Vec<(usize, usize)>,
    triples: Vec<[usize; 3]>,
}

impl CompatibilityGraph {
    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rays.iter().map(|r| r.label.as_str())
    }

    /// Unordered pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Mutually orthogonal triples `[i, j, k]` with `i < j < k`.
    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.rays.iter().position(|r| r.label == label)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == node || *b == node)
            .count()
    }

    pub fn to_document(&self) -> GraphDocument {
        let label = |i: usize| self.rays[i].label.clone();
        GraphDocument {
            rays: self.rays.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [label(a), label(b)])
                .collect(),
            triples: self.triples.iter().map(|t| t.map(label)).collect(),
        }
    }
}

/// Builds the graph from exact integer dot products.
pub fn compatibility(rays: &[Ray]) -> CompatibilityGraph {
    let n = rays.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rays[i].is_orthogonal(&rays[j]) {
                edges.push((i, j));
            }
        }
    }
    let orth = |a: usize, b: usize| rays[a].is_orthogonal(&rays[b]);
    let mut triples = Vec::new();
    for &(i, j) in &edges {
        for k in j + 1..n {
            if orth(i, k) && orth(j, k) {
                triples.push([i, j, k]);
            }
        }
    }
    CompatibilityGraph {
        rays: rays.to_vec(),
        edges,
        triples,
    }
}

/// The graph of the canonical 13 rays.
pub fn yu_oh_graph() -> CompatibilityGraph {
    compatibility(&yu_oh_rays())
}

/// JSON export of a ray set and its structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub rays: Vec<Ray>,
    pub edges: Vec<[String; 2]>,
    pub triples: Vec<[String; 3]>,
}
