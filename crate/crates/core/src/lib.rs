//! Reduce a first-order Markov chain on a large alphabet to a `k`-th order
//! chain on a small one.
//!
//! The pipeline: pick a partition `g` of the state space, project the chain
//! onto it (`Y_n = g(X_n)`), and approximate the projection by the `k`-th
//! order chain minimizing the KL divergence rate. Partitions are scored by
//! information-theoretic costs — how far the projection is from being Markov
//! (lumpability) and how much predictive information it loses
//! (predictability) — and searched by sequential or agglomerative heuristics.
//!
//! * [`chain`] — chain types, stationary solves, entropy and KLDR
//! * [`partition`] — state-to-group labelings
//! * [`joint`] — exact joint distributions of projected windows
//! * [`lifting`] — optimal aggregations and liftings back to the large alphabet
//! * [`costs`] — the cost functions, their brackets, and predictors
//! * [`search`] — sequential, agglomerative, and exhaustive partition search
//! * [`models`] — generators for the synthetic and reliability models, bi-gram training
//! * [`io`] — JSON file formats

pub mod chain;
pub mod costs;
pub mod error;
pub mod info;
pub mod io;
pub mod joint;
pub mod lifting;
pub mod models;
pub mod partition;
pub mod search;

pub use chain::{kldr, FirstOrderChain, HigherOrderChain, Kldr};
pub use costs::{
    cost_chain_report, cost_report, fano_check, kldr_bracket, lump_cost, map_predictor, pred_cost,
    CostReport,
};
pub use error::{Error, Result};
pub use joint::{project_joint, project_joint_keyed, JointDist, DEFAULT_WINDOW_CAP};
pub use lifting::{mu_lift, optimal_aggregation, p_lift_first_order, viewed_as_order_k};
pub use partition::PartitionMap;
pub use search::{
    agglomerative_aggregate, exhaustive_aggregate, sequential_aggregate, sequential_refine,
    CostKind, SearchConfig, SearchTrace,
};
