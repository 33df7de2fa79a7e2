//! Hard partitions of a node set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of every node to one community.
///
/// Labels are always canonical: `0..n_communities`, numbered in order of
/// first appearance when scanning nodes by index. Two partitions describing
/// the same grouping therefore compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    assignment: Vec<usize>,
    n_communities: usize,
}

impl Partition {
    /// Canonicalizes an arbitrary labelling.
    pub fn from_labels<L>(labels: &[L]) -> Self
    where
        L: Copy + Eq + std::hash::Hash,
    {
        let mut remap = std::collections::HashMap::with_capacity(labels.len() / 2 + 1);
        let mut assignment = Vec::with_capacity(labels.len());
        for &label in labels {
            let next = remap.len();
            assignment.push(*remap.entry(label).or_insert(next));
        }
        Partition {
            n_communities: remap.len(),
            assignment,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            n_communities: n,
        }
    }

    pub fn all_in_one(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            n_communities: usize::from(n > 0),
        }
    }

    pub fn from_communities(n: usize, communities: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, members) in communities.iter().enumerate() {
            for &node in members {
                if node >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: node + 1,
                    });
                }
                if labels[node] != usize::MAX {
                    return Err(Error::InvalidGraph(format!(
                        "node {node} appears in more than one community"
                    )));
                }
                labels[node] = c;
            }
        }
        if let Some(node) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidGraph(format!(
                "node {node} is not assigned to a community"
            )));
        }
        Ok(Self::from_labels(&labels))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    #[inline]
    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    #[inline]
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    /// Members of each community, in label order.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_communities];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len(), "permutation length");
        let mut labels = vec![0; self.len()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.assignment[i];
        }
        Self::from_labels(&labels)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = String;

    fn try_from(labels: Vec<usize>) -> std::result::Result<Self, Self::Error> {
        let p = Partition::from_labels(&labels);
        if p.assignment != labels {
            return Err("partition labels are not canonical".to_string());
        }
        Ok(p)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.assignment
    }
}
