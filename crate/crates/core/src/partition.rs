//! Surjective state-to-group labelings. A partition map `g` sends each of the
//! `N` chain states to one of `M` groups and defines the projected process
//! `Y_n = g(X_n)`. Labels are zero-based internally; the JSON form is
//! one-based (see [`crate::io`]).

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionMap {
    labels: Vec<usize>,
    n_groups: usize,
}

impl PartitionMap {
    pub fn new(labels: Vec<usize>, n_groups: usize) -> Result<Self> {
        if n_groups == 0 || labels.is_empty() {
            return Err(Error::InvalidPartition(
                "need at least one state and one group".into(),
            ));
        }
        if labels.len() < n_groups {
            return Err(Error::InvalidPartition(format!(
                "{} states cannot cover {} groups",
                labels.len(),
                n_groups
            )));
        }
        let mut seen = vec![false; n_groups];
        for (state, &label) in labels.iter().enumerate() {
            if label >= n_groups {
                return Err(Error::InvalidPartition(format!(
                    "state {state} has label {label} >= {n_groups}"
                )));
            }
            seen[label] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!(
                "group {missing} is empty (labeling must be surjective)"
            )));
        }
        Ok(PartitionMap { labels, n_groups })
    }

    pub fn identity(n_states: usize) -> Self {
        PartitionMap {
            labels: (0..n_states).collect(),
            n_groups: n_states,
        }
    }

    pub fn constant(n_states: usize) -> Self {
        PartitionMap {
            labels: vec![0; n_states],
            n_groups: 1,
        }
    }

    /// Surjective random labeling: one distinct anchor state per group first,
    /// the remaining states uniformly.
    pub fn random_surjective<R: Rng + ?Sized>(
        n_states: usize,
        n_groups: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if n_groups == 0 || n_states < n_groups {
            return Err(Error::InvalidPartition(format!(
                "cannot partition {n_states} states into {n_groups} groups"
            )));
        }
        let mut states: Vec<usize> = (0..n_states).collect();
        states.shuffle(rng);
        let mut labels = vec![0; n_states];
        for (group, &state) in states.iter().take(n_groups).enumerate() {
            labels[state] = group;
        }
        for &state in states.iter().skip(n_groups) {
            labels[state] = rng.random_range(0..n_groups);
        }
        Ok(PartitionMap { labels, n_groups })
    }

    pub fn n_states(&self) -> usize {
        self.labels.len()
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn group_of(&self, state: usize) -> usize {
        self.labels[state]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        self.n_groups == self.labels.len()
    }

    /// States of one group, ascending.
    pub fn preimage(&self, group: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == group)
            .map(|(s, _)| s)
            .collect()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_groups];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Groups as sorted state lists, by group index.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_groups];
        for (state, &l) in self.labels.iter().enumerate() {
            groups[l].push(state);
        }
        groups
    }

    /// Push a distribution on states through `g`.
    pub fn project_dist(&self, dist: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_groups);
        for (state, &l) in self.labels.iter().enumerate() {
            out[l] += dist[state];
        }
        out
    }

    /// Relabel groups by order of first appearance. Two partitions induce the
    /// same grouping iff their canonical forms are equal.
    pub fn canonical(&self) -> PartitionMap {
        let mut remap = vec![usize::MAX; self.n_groups];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if remap[l] == usize::MAX {
                    remap[l] = next;
                    next += 1;
                }
                remap[l]
            })
            .collect();
        PartitionMap {
            labels,
            n_groups: self.n_groups,
        }
    }

    /// Whether `self` and `other` induce the same grouping up to relabeling.
    pub fn same_grouping(&self, other: &PartitionMap) -> bool {
        self.n_states() == other.n_states()
            && self.n_groups == other.n_groups
            && self.canonical().labels == other.canonical().labels
    }

    /// Render 1-based groups like `{{1,2},{3,4}}`.
    pub fn display_groups(&self) -> String {
        let body = self
            .groups()
            .iter()
            .map(|g| {
                let inner = g
                    .iter()
                    .map(|s| (s + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("{{{inner}}}")
            })
            .collect::<Vec<_>>()
            .join(",");
        format!("{{{body}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_surjective_labels() {
        assert!(PartitionMap::new(vec![0, 0, 0], 2).is_err());
        assert!(PartitionMap::new(vec![0, 2, 1], 2).is_err());
        assert!(PartitionMap::new(vec![0, 1], 3).is_err());
    }

    #[test]
    fn random_init_is_surjective() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = PartitionMap::random_surjective(9, 4, &mut rng).unwrap();
            assert_eq!(g.group_sizes().iter().filter(|&&s| s > 0).count(), 4);
        }
    }

    #[test]
    fn canonical_is_relabel_invariant() {
        let a = PartitionMap::new(vec![2, 2, 0, 1, 0], 3).unwrap();
        let b = PartitionMap::new(vec![0, 0, 1, 2, 1], 3).unwrap();
        assert!(a.same_grouping(&b));
        let c = PartitionMap::new(vec![0, 1, 0, 2, 1], 3).unwrap();
        assert!(!a.same_grouping(&c));
    }

    #[test]
    fn display_groups_is_one_based() {
        let g = PartitionMap::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        assert_eq!(g.display_groups(), "{{1,2},{3,4},{5,6}}");
    }
}
