//! Aggregations and liftings between the large and small alphabets.
//!
//! [`optimal_aggregation`] builds the `k`-th order chain `Q` on the partition
//! alphabet that minimizes the KLDR to the projection: its rows are the exact
//! conditionals `Q_{i_1..i_k -> j} = p(Y_{k+1}=j | Y_1^k)`. The liftings embed
//! such a chain back on the original alphabet: the mu-lifting spreads each
//! group's mass according to the original stationary distribution, the
//! P-lifting (first order only) according to the original transition rows.

use nalgebra::{DMatrix, DVector};

use crate::chain::{FirstOrderChain, HigherOrderChain};
use crate::error::{Error, Result};
use crate::joint::{project_joint, JointDist};
use crate::partition::PartitionMap;

/// An optimal `k`-th order aggregation together with the contexts that carry
/// zero probability and were padded with uniform rows.
#[derive(Debug, Clone)]
pub struct Aggregation {
    pub chain: HigherOrderChain,
    pub zero_contexts: Vec<usize>,
}

/// The KLDR-optimal `k`-th order chain on the partition alphabet.
///
/// Contexts with zero window probability get a uniform row; they never
/// contribute to any cost since they carry no mass.
pub fn optimal_aggregation(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
) -> Result<Aggregation> {
    let window = project_joint(chain, g, order + 1)?;
    aggregation_from_window(&window, g.n_groups(), order)
}

/// Same construction, from an existing window joint of length `order + 1`.
pub fn aggregation_from_window(
    window: &JointDist,
    n_groups: usize,
    order: usize,
) -> Result<Aggregation> {
    if window.window_len() != order + 1 || window.key_states().is_some() {
        return Err(Error::DimensionMismatch(
            "aggregation needs a plain window joint of length order + 1".into(),
        ));
    }
    let m = n_groups;
    let contexts = m.pow(order as u32);
    let mut transitions = DMatrix::zeros(contexts, m);
    let mut context_dist = DVector::zeros(contexts);
    let mut zero_contexts = Vec::new();
    for c in 0..contexts {
        let block = &window.probs()[c * m..(c + 1) * m];
        let mass: f64 = block.iter().sum();
        context_dist[c] = mass;
        if mass > 0.0 {
            for j in 0..m {
                transitions[(c, j)] = block[j] / mass;
            }
        } else {
            zero_contexts.push(c);
            for j in 0..m {
                transitions[(c, j)] = 1.0 / m as f64;
            }
        }
    }
    let chain = HigherOrderChain::with_context_dist(order, m, transitions, context_dist)?;
    Ok(Aggregation {
        chain,
        zero_contexts,
    })
}

/// Lift a `k`-th order chain on the partition alphabet back to the original
/// alphabet, spreading each target group's mass proportionally to `mu`:
/// `P^_{i_1..i_k -> j} = mu_j / mu(g^{-1}(g(j))) * Q_{g(i_1)..g(i_k) -> g(j)}`.
pub fn mu_lift(
    q: &HigherOrderChain,
    g: &PartitionMap,
    mu: &DVector<f64>,
) -> Result<HigherOrderChain> {
    if g.n_groups() != q.n_states() {
        return Err(Error::DimensionMismatch(format!(
            "partition has {} groups, aggregation alphabet is {}",
            g.n_groups(),
            q.n_states()
        )));
    }
    if mu.len() != g.n_states() {
        return Err(Error::DimensionMismatch(
            "stationary vector does not match the partition".into(),
        ));
    }
    let n = g.n_states();
    let k = q.order();
    let group_mass = g.project_dist(mu);
    for group in 0..g.n_groups() {
        if group_mass[group] <= 0.0 {
            return Err(Error::InvalidStationary(format!(
                "group {group} carries no stationary mass; mu-lifting undefined"
            )));
        }
    }

    let contexts = n
        .checked_pow(k as u32)
        .ok_or_else(|| Error::TooLarge(format!("{n}^{k} lifted contexts overflow")))?;
    let mut lifted = DMatrix::zeros(contexts, n);
    let mut ctx = vec![0usize; k];
    for c in 0..contexts {
        let q_row = {
            let mut idx = 0;
            for &x in &ctx {
                idx = idx * q.n_states() + g.group_of(x);
            }
            idx
        };
        for j in 0..n {
            let b = g.group_of(j);
            lifted[(c, j)] = mu[j] / group_mass[b] * q.transitions()[(q_row, b)];
        }
        // odometer over the lifted context
        for slot in ctx.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    HigherOrderChain::new(k, n, lifted)
}

/// Lift a first-order aggregation back to the original alphabet using the
/// original transition matrix: the mass `Q_{g(i) -> b}` leaving state `i`
/// toward group `b` is split across `j` in `g^{-1}(b)` proportionally to
/// `P_{i -> j}`. The lifted chain `X''` satisfies `KLDR(X, X'') = Delta_L^1`.
pub fn p_lift_first_order(
    q: &HigherOrderChain,
    g: &PartitionMap,
    chain: &FirstOrderChain,
) -> Result<FirstOrderChain> {
    if q.order() != 1 {
        return Err(Error::InvalidConfig(
            "the P-lifting is defined for first-order aggregations only".into(),
        ));
    }
    if g.n_groups() != q.n_states() || g.n_states() != chain.n_states() {
        return Err(Error::DimensionMismatch(
            "partition, aggregation, and chain dimensions disagree".into(),
        ));
    }
    let n = chain.n_states();
    let m = g.n_groups();
    let p = chain.transitions();
    let mu = chain.stationary_distribution()?;

    let mut lifted = DMatrix::zeros(n, n);
    for i in 0..n {
        // conditional arrival mass into each group from state i
        let mut arrival = vec![0.0; m];
        for j in 0..n {
            arrival[g.group_of(j)] += p[(i, j)];
        }
        let gi = g.group_of(i);
        for (b, &arrival_mass) in arrival.iter().enumerate() {
            let q_mass = q.transitions()[(gi, b)];
            if q_mass == 0.0 {
                continue;
            }
            if arrival_mass == 0.0 {
                if mu[i] > 0.0 {
                    return Err(Error::SupportViolation {
                        context: vec![i],
                        symbol: b,
                    });
                }
                // unvisited state: spread uniformly to keep the row stochastic
                for j in g.preimage(b) {
                    lifted[(i, j)] = q_mass / g.group_sizes()[b] as f64;
                }
                continue;
            }
            for j in 0..n {
                if g.group_of(j) == b {
                    lifted[(i, j)] = q_mass * p[(i, j)] / arrival_mass;
                }
            }
        }
    }
    FirstOrderChain::new(lifted)
}

/// View a first-order chain as a trivial `k`-th order chain on the same
/// alphabet: the tensor depends only on the most recent symbol, and the
/// context distribution is the stationary window product
/// `mu_{i_1} P_{i_1 i_2} ... P_{i_{k-1} i_k}`.
pub fn viewed_as_order_k(chain: &FirstOrderChain, order: usize) -> Result<HigherOrderChain> {
    if order == 0 {
        return Err(Error::InvalidConfig("order must be positive".into()));
    }
    if order == 1 {
        let mu = chain.stationary_distribution()?.clone();
        return HigherOrderChain::with_context_dist(
            1,
            chain.n_states(),
            chain.transitions().clone(),
            mu,
        );
    }
    let n = chain.n_states();
    let contexts = n
        .checked_pow(order as u32)
        .ok_or_else(|| Error::TooLarge(format!("{n}^{order} contexts overflow")))?;
    let mu = chain.stationary_distribution()?;
    let p = chain.transitions();

    let mut transitions = DMatrix::zeros(contexts, n);
    let mut dist = DVector::zeros(contexts);
    let mut ctx = vec![0usize; order];
    for c in 0..contexts {
        let last = ctx[order - 1];
        for j in 0..n {
            transitions[(c, j)] = p[(last, j)];
        }
        let mut w = mu[ctx[0]];
        for t in 1..order {
            if w == 0.0 {
                break;
            }
            w *= p[(ctx[t - 1], ctx[t])];
        }
        dist[c] = w;
        for slot in ctx.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    HigherOrderChain::with_context_dist(order, n, transitions, dist)
}
