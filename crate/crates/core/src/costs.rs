//! Aggregation cost functions and their bounds.
//!
//! Two families, both in bits and both computed from exact projected joints:
//!
//! * the lumpability cost `Delta_L^k = H(Y_{k+1}|Y_1^k) - H(Y_{k+1}|Y_2^k, X_1)`,
//!   zero iff the chain is `k`-lumpable w.r.t. the partition;
//! * the predictability cost `Delta_P^k = I(X_2;X_1) - I(Y_{k+1};Y_1^k)`,
//!   which for `k = 1` is the decomposability cost of nearly-completely-
//!   decomposable aggregation.
//!
//! They satisfy `Delta_P^1 >= ... >= Delta_P^k >= Delta_L^1 >= ... >=
//! Delta_L^k >= KLDR(Y || Y^(k)) >= 0`, which [`cost_chain_report`] asserts
//! instance-wise. The exact KLDR between the projection and its best `k`-th
//! order approximation needs the entropy rate of the (hidden-Markov)
//! projection, which has no closed form; [`kldr_bracket`] brackets it instead.

use serde::Serialize;

use crate::chain::{FirstOrderChain, HigherOrderChain};
use crate::error::{Error, Result};
use crate::info::{binary_entropy_bits, clamp_cost, entropy_bits};
use crate::joint::{project_joint, project_joint_keyed, JointDist};
use crate::lifting::optimal_aggregation;
use crate::partition::PartitionMap;

/// Tolerance for the asserted cost-ordering chain.
pub const INEQUALITY_TOL: f64 = 1e-10;

/// All costs of one `(chain, partition, order)` triple.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub order: usize,
    /// `Delta_P^k` in bits.
    pub pred_cost: f64,
    /// `Delta_L^k` in bits.
    pub lump_cost: f64,
    /// Lower end of the bracket on `KLDR(Y || Y^(k))`; always zero.
    pub kldr_lower: f64,
    /// Upper end of the bracket; `Delta_L^k` by default.
    pub kldr_upper: f64,
    /// Exact error probability of the MAP predictor on the aggregation.
    pub map_error: f64,
    /// Slack of the Fano-type bound at this order.
    pub fano_slack: f64,
    pub fano_bound_satisfied: bool,
}

/// `H(Y_{k+1} | Y_1^k)` in bits.
pub fn window_conditional_entropy(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
) -> Result<f64> {
    Ok(project_joint(chain, g, order + 1)?.conditional_entropy_last())
}

/// `H(Y_{k+1} | Y_2^k, X_1)` in bits.
pub fn keyed_conditional_entropy(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
) -> Result<f64> {
    Ok(project_joint_keyed(chain, g, order)?.conditional_entropy_last())
}

/// `I(Y_{k+1}; Y_1^k)` in bits.
pub fn projected_mutual_info(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
) -> Result<f64> {
    let mu = chain.stationary_distribution()?;
    let marginal = g.project_dist(mu);
    Ok(entropy_bits(marginal.as_slice()) - window_conditional_entropy(chain, g, order)?)
}

/// Lumpability cost `Delta_L^k(X, g)`.
pub fn lump_cost(chain: &FirstOrderChain, g: &PartitionMap, order: usize) -> Result<f64> {
    let h_window = window_conditional_entropy(chain, g, order)?;
    let h_keyed = keyed_conditional_entropy(chain, g, order)?;
    Ok(clamp_cost(h_window - h_keyed))
}

/// Predictability cost `Delta_P^k(X, g)`; equals the decomposability cost
/// `Delta_D` at `k = 1`.
pub fn pred_cost(chain: &FirstOrderChain, g: &PartitionMap, order: usize) -> Result<f64> {
    let i_chain = chain.redundancy_rate()?;
    let i_projected = projected_mutual_info(chain, g, order)?;
    Ok(clamp_cost(i_chain - i_projected))
}

/// Bracket `[lo, hi]` on `KLDR(Y || Y^(k)) = H(Y_{k+1}|Y_1^k) - H(Y)-rate`.
///
/// The upper end replaces the unknown entropy rate of `Y` by its standard
/// lower bound `H(Y_{k'+1} | Y_2^{k'}, X_1)` (conditioning on `X_1` subsumes
/// `Y_1`), so `tighten = None` gives `[0, Delta_L^k]` and larger `k'` can only
/// shrink the bracket.
pub fn kldr_bracket(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
    tighten: Option<usize>,
) -> Result<(f64, f64)> {
    let conditioning = tighten.unwrap_or(order);
    if conditioning < order {
        return Err(Error::InvalidConfig(
            "tightening order must not be smaller than the aggregation order".into(),
        ));
    }
    let h_window = window_conditional_entropy(chain, g, order)?;
    let rate_lower = keyed_conditional_entropy(chain, g, conditioning)?;
    Ok((0.0, clamp_cost(h_window - rate_lower)))
}

/// A maximum-a-posteriori predictor for the next symbol of an aggregation,
/// with its exact error probability.
#[derive(Debug, Clone)]
pub struct MapPredictor {
    /// Predicted symbol per context row.
    pub table: Vec<usize>,
    /// `p_e = sum_ctx p(ctx) (1 - max_j Q_{ctx -> j})`.
    pub error: f64,
}

impl MapPredictor {
    pub fn predict(&self, context_index: usize) -> usize {
        self.table[context_index]
    }
}

/// Build the MAP predictor of a `k`-th order chain; ties go to the lowest
/// symbol index.
pub fn map_predictor(q: &HigherOrderChain) -> Result<MapPredictor> {
    let dist = q.stationary_context_dist()?.clone();
    let t = q.transitions();
    let mut table = Vec::with_capacity(q.n_contexts());
    let mut error = 0.0;
    for c in 0..q.n_contexts() {
        let mut best = 0;
        let mut best_p = t[(c, 0)];
        for j in 1..q.n_states() {
            if t[(c, j)] > best_p {
                best = j;
                best_p = t[(c, j)];
            }
        }
        table.push(best);
        error += dist[c] * (1.0 - best_p);
    }
    Ok(MapPredictor {
        table,
        error: error.max(0.0),
    })
}

/// Result of checking the Fano-type bound
/// `I(Y_{k+1}; Y_1^k) >= -log(max_y p_Y(y)) (1 - p_e) - h(p_e)`.
#[derive(Debug, Clone, Serialize)]
pub struct FanoCheck {
    pub mutual_info: f64,
    pub map_error: f64,
    pub bound: f64,
    pub slack: f64,
    pub satisfied: bool,
}

pub fn fano_check(chain: &FirstOrderChain, g: &PartitionMap, order: usize) -> Result<FanoCheck> {
    let agg = optimal_aggregation(chain, g, order)?;
    let predictor = map_predictor(&agg.chain)?;
    let mutual_info = projected_mutual_info(chain, g, order)?;
    let mu = chain.stationary_distribution()?;
    let marginal = g.project_dist(mu);
    let p_max = marginal.iter().cloned().fold(f64::MIN, f64::max);
    let bound = -p_max.log2() * (1.0 - predictor.error) - binary_entropy_bits(predictor.error);
    let slack = mutual_info - bound;
    Ok(FanoCheck {
        mutual_info,
        map_error: predictor.error,
        bound,
        slack,
        satisfied: slack >= -INEQUALITY_TOL,
    })
}

/// Full cost report for one order, sharing the window joint across the cost
/// functions.
pub fn cost_report(chain: &FirstOrderChain, g: &PartitionMap, order: usize) -> Result<CostReport> {
    let window = project_joint(chain, g, order + 1)?;
    let keyed = project_joint_keyed(chain, g, order)?;
    report_from_joints(chain, g, order, &window, &keyed)
}

fn report_from_joints(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
    window: &JointDist,
    keyed: &JointDist,
) -> Result<CostReport> {
    let mu = chain.stationary_distribution()?;
    let marginal = g.project_dist(mu);
    let h_window = window.conditional_entropy_last();
    let h_keyed = keyed.conditional_entropy_last();
    let lump = clamp_cost(h_window - h_keyed);
    let mutual_info = entropy_bits(marginal.as_slice()) - h_window;
    let pred = clamp_cost(chain.redundancy_rate()? - mutual_info);

    let agg = crate::lifting::aggregation_from_window(window, g.n_groups(), order)?;
    let predictor = map_predictor(&agg.chain)?;
    let p_max = marginal.iter().cloned().fold(f64::MIN, f64::max);
    let bound = -p_max.log2() * (1.0 - predictor.error) - binary_entropy_bits(predictor.error);
    let fano_slack = mutual_info - bound;

    Ok(CostReport {
        order,
        pred_cost: pred,
        lump_cost: lump,
        kldr_lower: 0.0,
        kldr_upper: lump,
        map_error: predictor.error,
        fano_slack,
        fano_bound_satisfied: fano_slack >= -INEQUALITY_TOL,
    })
}

/// Cost reports for `k = 1..=k_max`, with the ordering chain
/// `Delta_P^1 >= ... >= Delta_P^{k_max} >= Delta_L^1 >= ... >= Delta_L^{k_max} >= 0`
/// asserted instance-wise. A violation signals an implementation bug, not a
/// data error.
pub fn cost_chain_report(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    k_max: usize,
) -> Result<Vec<CostReport>> {
    if k_max == 0 {
        return Err(Error::InvalidConfig("k_max must be at least 1".into()));
    }
    let reports: Vec<CostReport> = (1..=k_max)
        .map(|k| cost_report(chain, g, k))
        .collect::<Result<_>>()?;

    let mut ordered: Vec<(String, f64)> = Vec::with_capacity(2 * k_max + 1);
    for r in &reports {
        ordered.push((format!("pred k={}", r.order), r.pred_cost));
    }
    for r in &reports {
        ordered.push((format!("lump k={}", r.order), r.lump_cost));
    }
    ordered.push(("zero".into(), 0.0));
    for pair in ordered.windows(2) {
        let (ref name_hi, hi) = pair[0];
        let (ref name_lo, lo) = pair[1];
        if hi < lo - INEQUALITY_TOL {
            return Err(Error::InequalityViolation(format!(
                "{name_hi} = {hi} < {name_lo} = {lo}"
            )));
        }
    }
    Ok(reports)
}
