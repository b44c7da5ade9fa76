//! JSON file formats.
//!
//! Chains: `{ "order": k, "n_states": M, "transitions": [[...], ...],
//! "stationary": [...] }` with `M^k` rows of `M` probabilities each and an
//! optional invariant distribution. Row sums are renormalized on load when
//! they deviate by at most `1e-3` (with a logged warning beyond `1e-9`);
//! larger deviations are a hard error.
//!
//! Partitions: `{ "n_states": N, "n_groups": M, "labels": [...] }` with
//! one-based group labels.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::{FirstOrderChain, HigherOrderChain};
use crate::error::{Error, Result};
use crate::partition::PartitionMap;

const RENORMALIZE_WARN: f64 = 1e-9;
const RENORMALIZE_MAX: f64 = 1e-3;

#[derive(Debug, Serialize, Deserialize)]
struct ChainFile {
    order: usize,
    n_states: usize,
    transitions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stationary: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PartitionFile {
    n_states: usize,
    n_groups: usize,
    labels: Vec<usize>,
}

fn renormalize(rows: &mut [Vec<f64>]) -> Result<()> {
    for (i, row) in rows.iter_mut().enumerate() {
        let sum: f64 = row.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev > RENORMALIZE_MAX {
            return Err(Error::RowNotStochastic {
                row: i,
                sum,
                tol: RENORMALIZE_MAX,
            });
        }
        if dev > RENORMALIZE_WARN {
            log::warn!("row {i} sums to {sum}; renormalizing");
        }
        if dev > 0.0 && sum > 0.0 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
    }
    Ok(())
}

fn parse_chain(text: &str) -> Result<HigherOrderChain> {
    let mut file: ChainFile = serde_json::from_str(text)?;
    let contexts = file
        .n_states
        .checked_pow(file.order as u32)
        .ok_or_else(|| Error::TooLarge("context count overflows".into()))?;
    if file.transitions.len() != contexts
        || file.transitions.iter().any(|r| r.len() != file.n_states)
    {
        return Err(Error::DimensionMismatch(format!(
            "expected {contexts} rows of {} entries",
            file.n_states
        )));
    }
    renormalize(&mut file.transitions)?;
    let flat: Vec<f64> = file.transitions.concat();
    let transitions = DMatrix::from_row_slice(contexts, file.n_states, &flat);
    match file.stationary {
        Some(stationary) => HigherOrderChain::with_context_dist(
            file.order,
            file.n_states,
            transitions,
            DVector::from_vec(stationary),
        ),
        None => HigherOrderChain::new(file.order, file.n_states, transitions),
    }
}

/// Parse a chain of any order from JSON text.
pub fn chain_from_json(text: &str) -> Result<HigherOrderChain> {
    parse_chain(text)
}

/// Parse a first-order chain from JSON text; rejects files with `order > 1`.
pub fn first_order_from_json(text: &str) -> Result<FirstOrderChain> {
    let chain = parse_chain(text)?;
    if chain.order() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected a first-order chain, file has order {}",
            chain.order()
        )));
    }
    let transitions = chain.transitions().clone();
    match chain.context_dist_cached() {
        Some(mu) => FirstOrderChain::with_stationary(transitions, mu.clone()),
        None => FirstOrderChain::new(transitions),
    }
}

pub fn read_chain(path: impl AsRef<Path>) -> Result<HigherOrderChain> {
    chain_from_json(&fs::read_to_string(path)?)
}

pub fn read_first_order(path: impl AsRef<Path>) -> Result<FirstOrderChain> {
    first_order_from_json(&fs::read_to_string(path)?)
}

fn chain_file(
    order: usize,
    n_states: usize,
    transitions: &DMatrix<f64>,
    stationary: Option<&DVector<f64>>,
) -> ChainFile {
    ChainFile {
        order,
        n_states,
        transitions: (0..transitions.nrows())
            .map(|i| transitions.row(i).iter().copied().collect())
            .collect(),
        stationary: stationary.map(|v| v.iter().copied().collect()),
    }
}

pub fn first_order_to_json(chain: &FirstOrderChain) -> String {
    let file = chain_file(
        1,
        chain.n_states(),
        chain.transitions(),
        chain.stationary_cached(),
    );
    serde_json::to_string_pretty(&file).expect("chain serialization cannot fail")
}

pub fn chain_to_json(chain: &HigherOrderChain) -> String {
    let file = chain_file(
        chain.order(),
        chain.n_states(),
        chain.transitions(),
        chain.context_dist_cached(),
    );
    serde_json::to_string_pretty(&file).expect("chain serialization cannot fail")
}

pub fn write_first_order(path: impl AsRef<Path>, chain: &FirstOrderChain) -> Result<()> {
    fs::write(path, first_order_to_json(chain))?;
    Ok(())
}

pub fn write_chain(path: impl AsRef<Path>, chain: &HigherOrderChain) -> Result<()> {
    fs::write(path, chain_to_json(chain))?;
    Ok(())
}

/// Parse a partition from JSON text (one-based labels).
pub fn partition_from_json(text: &str) -> Result<PartitionMap> {
    let file: PartitionFile = serde_json::from_str(text)?;
    if file.labels.len() != file.n_states {
        return Err(Error::InvalidPartition(format!(
            "{} labels for {} states",
            file.labels.len(),
            file.n_states
        )));
    }
    let labels: Vec<usize> = file
        .labels
        .iter()
        .map(|&l| {
            if l == 0 || l > file.n_groups {
                Err(Error::InvalidPartition(format!(
                    "label {l} outside 1..={}",
                    file.n_groups
                )))
            } else {
                Ok(l - 1)
            }
        })
        .collect::<Result<_>>()?;
    PartitionMap::new(labels, file.n_groups)
}

pub fn partition_to_json(partition: &PartitionMap) -> String {
    let file = PartitionFile {
        n_states: partition.n_states(),
        n_groups: partition.n_groups(),
        labels: partition.labels().iter().map(|&l| l + 1).collect(),
    };
    serde_json::to_string_pretty(&file).expect("partition serialization cannot fail")
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<PartitionMap> {
    partition_from_json(&fs::read_to_string(path)?)
}

pub fn write_partition(path: impl AsRef<Path>, partition: &PartitionMap) -> Result<()> {
    fs::write(path, partition_to_json(partition))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_round_trip() {
        let chain =
            FirstOrderChain::new(DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.2, 0.8])).unwrap();
        chain.stationary_distribution().unwrap();
        let json = first_order_to_json(&chain);
        let back = first_order_from_json(&json).unwrap();
        assert_eq!(back.transitions(), chain.transitions());
        assert!(back.stationary_cached().is_some());
    }

    #[test]
    fn higher_order_round_trip() {
        let t = DMatrix::from_row_slice(4, 2, &[0.5, 0.5, 0.3, 0.7, 0.9, 0.1, 0.2, 0.8]);
        let chain = HigherOrderChain::new(2, 2, t).unwrap();
        let json = chain_to_json(&chain);
        let back = chain_from_json(&json).unwrap();
        assert_eq!(back.order(), 2);
        assert_eq!(back.transitions(), chain.transitions());
    }

    #[test]
    fn load_renormalizes_small_deviations() {
        let json = r#"{"order":1,"n_states":2,"transitions":[[0.90001,0.1],[0.2,0.8]]}"#;
        let chain = first_order_from_json(json).unwrap();
        let sum: f64 = chain.transitions().row(0).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn load_rejects_large_deviations() {
        let json = r#"{"order":1,"n_states":2,"transitions":[[0.7,0.1],[0.2,0.8]]}"#;
        assert!(matches!(
            first_order_from_json(json),
            Err(Error::RowNotStochastic { row: 0, .. })
        ));
    }

    #[test]
    fn partition_labels_are_one_based() {
        let json = r#"{"n_states":4,"n_groups":2,"labels":[1,1,2,2]}"#;
        let g = partition_from_json(json).unwrap();
        assert_eq!(g.labels(), &[0, 0, 1, 1]);
        let back = partition_to_json(&g);
        let again = partition_from_json(&back).unwrap();
        assert!(again.same_grouping(&g));
        let bad = r#"{"n_states":2,"n_groups":2,"labels":[0,1]}"#;
        assert!(partition_from_json(bad).is_err());
    }
}
