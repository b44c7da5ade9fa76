//! First- and higher-order Markov chains on finite alphabets.
//!
//! A first-order chain is a row-stochastic `N x N` matrix `P` with stationary
//! distribution `mu` satisfying `mu^T = mu^T P`. A `k`-th order chain on `M`
//! symbols is stored as a row-stochastic `M^k x M` matrix whose row index
//! encodes the length-`k` context `(z_1, ..., z_k)` in base `M`, most recent
//! symbol least significant. Both carry a write-once cache for their invariant
//! distribution, so values stay immutable and cheap to share.

use nalgebra::{DMatrix, DVector};
use once_cell::sync::OnceCell;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::info::entropy_bits;

/// Row-sum tolerance enforced by every constructor.
pub const ROW_SUM_TOL: f64 = 1e-9;
/// Residual tolerance for stationary distributions produced by the solver.
pub const STATIONARY_SOLVE_TOL: f64 = 1e-12;
/// Residual tolerance for stationary distributions supplied by the caller.
pub const STATIONARY_INPUT_TOL: f64 = 1e-10;

fn validate_rows(transitions: &mut DMatrix<f64>) -> Result<()> {
    let (rows, cols) = transitions.shape();
    for i in 0..rows {
        let mut sum = 0.0;
        for j in 0..cols {
            let v = transitions[(i, j)];
            if v < 0.0 {
                if v < -1e-12 || !v.is_finite() {
                    return Err(Error::InvalidProbability {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                // negative dust from upstream arithmetic
                transitions[(i, j)] = 0.0;
            } else if v.is_nan() || v > 1.0 + ROW_SUM_TOL {
                return Err(Error::InvalidProbability {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            sum += transitions[(i, j)];
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::RowNotStochastic {
                row: i,
                sum,
                tol: ROW_SUM_TOL,
            });
        }
    }
    Ok(())
}

/// l1 residual of the balance equation, `||mu^T P - mu^T||_1`.
pub fn invariance_residual(transitions: &DMatrix<f64>, dist: &DVector<f64>) -> f64 {
    let pushed = transitions.tr_mul(dist);
    (pushed - dist).abs().sum()
}

/// Indices of every closed communicating class of the support digraph,
/// i.e. strongly connected components with no outgoing edge.
fn closed_classes(transitions: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = transitions.nrows();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if transitions[(i, j)] > 0.0 && i != j {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let sccs = tarjan_scc(&graph);
    let mut scc_of = vec![0usize; n];
    for (id, scc) in sccs.iter().enumerate() {
        for node in scc {
            scc_of[node.index()] = id;
        }
    }
    let mut closed = vec![true; sccs.len()];
    for edge in graph.raw_edges() {
        let (u, v) = (edge.source().index(), edge.target().index());
        if scc_of[u] != scc_of[v] {
            closed[scc_of[u]] = false;
        }
    }
    sccs.iter()
        .enumerate()
        .filter(|(id, _)| closed[*id])
        .map(|(_, scc)| {
            let mut states: Vec<usize> = scc.iter().map(|n| n.index()).collect();
            states.sort_unstable();
            states
        })
        .collect()
}

/// Direct dense solve of the balance equations with the normalization
/// constraint replacing one redundant row.
fn balance_solve(transitions: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = transitions.nrows();
    let mut a = transitions.transpose() - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b)
}

/// Power iteration on the damped kernel `(P + I)/2`, which shares the
/// stationary distribution of `P` but is aperiodic.
fn damped_power_iteration(transitions: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = transitions.nrows();
    let mut v = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..200_000 {
        let pushed = transitions.tr_mul(&v);
        let next = 0.5 * (&v + pushed);
        let diff = (&next - &v).abs().sum();
        v = next;
        let mass: f64 = v.sum();
        v /= mass;
        if diff < 1e-15 {
            break;
        }
    }
    if invariance_residual(transitions, &v) <= STATIONARY_SOLVE_TOL {
        Some(v)
    } else {
        None
    }
}

/// Solve for the unique invariant distribution of `transitions`.
///
/// Transient states are allowed: the solve is restricted to the unique closed
/// communicating class and zeros are assigned elsewhere. Fails with
/// `NotIrreducible` when more than one closed class exists.
fn solve_stationary(transitions: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = transitions.nrows();
    let classes = closed_classes(transitions);
    if classes.len() != 1 {
        return Err(Error::NotIrreducible {
            closed_classes: classes.len(),
        });
    }
    let class = &classes[0];
    let sub = if class.len() == n {
        transitions.clone()
    } else {
        DMatrix::from_fn(class.len(), class.len(), |i, j| {
            transitions[(class[i], class[j])]
        })
    };

    let mut mu_sub = balance_solve(&sub)
        .filter(|mu| {
            mu.iter().all(|&x| x > -1e-9) && invariance_residual(&sub, mu) <= STATIONARY_SOLVE_TOL
        })
        .or_else(|| damped_power_iteration(&sub))
        .ok_or_else(|| Error::Numerical("stationary solve did not converge".into()))?;

    for x in mu_sub.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let mass: f64 = mu_sub.sum();
    mu_sub /= mass;

    let mut mu = DVector::zeros(n);
    for (sub_idx, &state) in class.iter().enumerate() {
        mu[state] = mu_sub[sub_idx];
    }
    Ok(mu)
}

/// A stationary first-order Markov chain.
#[derive(Debug, Clone)]
pub struct FirstOrderChain {
    transitions: DMatrix<f64>,
    stationary: OnceCell<DVector<f64>>,
}

impl FirstOrderChain {
    pub fn new(mut transitions: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = transitions.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        validate_rows(&mut transitions)?;
        Ok(FirstOrderChain {
            transitions,
            stationary: OnceCell::new(),
        })
    }

    /// Construct with a caller-supplied stationary distribution, validated
    /// against the balance equation.
    pub fn with_stationary(transitions: DMatrix<f64>, stationary: DVector<f64>) -> Result<Self> {
        let chain = Self::new(transitions)?;
        if stationary.len() != chain.n_states() {
            return Err(Error::InvalidStationary(format!(
                "length {} for a {}-state chain",
                stationary.len(),
                chain.n_states()
            )));
        }
        let sum: f64 = stationary.sum();
        if (sum - 1.0).abs() > STATIONARY_INPUT_TOL || stationary.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidStationary(format!("mass sums to {sum}")));
        }
        let residual = invariance_residual(&chain.transitions, &stationary);
        if residual > STATIONARY_INPUT_TOL {
            return Err(Error::InvalidStationary(format!(
                "balance residual {residual}"
            )));
        }
        chain.stationary.set(stationary).ok();
        Ok(chain)
    }

    pub fn n_states(&self) -> usize {
        self.transitions.nrows()
    }

    pub fn transitions(&self) -> &DMatrix<f64> {
        &self.transitions
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.transitions[(from, to)]
    }

    /// Structural irreducibility: the support digraph is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n_states();
        closed_classes(&self.transitions)
            .first()
            .is_some_and(|c| c.len() == n)
    }

    /// The invariant distribution, solved on first use and cached.
    pub fn stationary_distribution(&self) -> Result<&DVector<f64>> {
        self.stationary
            .get_or_try_init(|| solve_stationary(&self.transitions))
    }

    /// The cached stationary distribution, if it has been computed or supplied.
    pub fn stationary_cached(&self) -> Option<&DVector<f64>> {
        self.stationary.get()
    }

    /// Entropy rate `H(X_2 | X_1)` in bits.
    pub fn entropy_rate(&self) -> Result<f64> {
        let mu = self.stationary_distribution()?;
        let mut rate = 0.0;
        for i in 0..self.n_states() {
            if mu[i] > 0.0 {
                rate += mu[i] * entropy_bits(self.transitions.row(i).transpose().as_slice());
            }
        }
        Ok(rate)
    }

    /// Redundancy rate `H(X) - H(X_2|X_1) = I(X_2; X_1)` in bits.
    pub fn redundancy_rate(&self) -> Result<f64> {
        let mu = self.stationary_distribution()?;
        Ok(entropy_bits(mu.as_slice()) - self.entropy_rate()?)
    }

    /// The same chain viewed as an order-1 chain on the same alphabet.
    pub fn as_higher_order(&self) -> HigherOrderChain {
        let chain = HigherOrderChain::new(1, self.n_states(), self.transitions.clone())
            .expect("first-order chain is a valid order-1 chain");
        if let Some(mu) = self.stationary.get() {
            chain.context_dist.set(mu.clone()).ok();
        }
        chain
    }
}

/// A stationary `k`-th order Markov chain on `M` symbols.
///
/// `transitions` has `M^k` rows (contexts) and `M` columns; `context_dist` is
/// the invariant distribution of length-`k` windows.
#[derive(Debug, Clone)]
pub struct HigherOrderChain {
    order: usize,
    n_states: usize,
    transitions: DMatrix<f64>,
    context_dist: OnceCell<DVector<f64>>,
}

impl HigherOrderChain {
    pub fn new(order: usize, n_states: usize, mut transitions: DMatrix<f64>) -> Result<Self> {
        if order == 0 || n_states == 0 {
            return Err(Error::InvalidConfig(
                "order and alphabet size must be positive".into(),
            ));
        }
        let contexts = n_states
            .checked_pow(order as u32)
            .ok_or_else(|| Error::TooLarge(format!("{n_states}^{order} contexts overflow")))?;
        if transitions.nrows() != contexts || transitions.ncols() != n_states {
            return Err(Error::DimensionMismatch(format!(
                "expected {contexts}x{n_states} transition tensor, got {}x{}",
                transitions.nrows(),
                transitions.ncols()
            )));
        }
        validate_rows(&mut transitions)?;
        Ok(HigherOrderChain {
            order,
            n_states,
            transitions,
            context_dist: OnceCell::new(),
        })
    }

    /// Construct with a known invariant context distribution, validated
    /// against the stationarity equation.
    pub fn with_context_dist(
        order: usize,
        n_states: usize,
        transitions: DMatrix<f64>,
        dist: DVector<f64>,
    ) -> Result<Self> {
        let chain = Self::new(order, n_states, transitions)?;
        if dist.len() != chain.n_contexts() {
            return Err(Error::InvalidStationary(format!(
                "context distribution has length {}, expected {}",
                dist.len(),
                chain.n_contexts()
            )));
        }
        let sum: f64 = dist.sum();
        if (sum - 1.0).abs() > STATIONARY_INPUT_TOL || dist.iter().any(|&x| x < -1e-12) {
            return Err(Error::InvalidStationary(format!("mass sums to {sum}")));
        }
        let residual = chain.context_invariance_residual(&dist);
        if residual > STATIONARY_INPUT_TOL {
            return Err(Error::InvalidStationary(format!(
                "context invariance residual {residual}"
            )));
        }
        chain.context_dist.set(dist).ok();
        Ok(chain)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_contexts(&self) -> usize {
        self.transitions.nrows()
    }

    pub fn transitions(&self) -> &DMatrix<f64> {
        &self.transitions
    }

    /// Encode a context `(z_1, ..., z_k)` as a row index, base `M`,
    /// most recent symbol least significant.
    pub fn context_index(&self, context: &[usize]) -> usize {
        debug_assert_eq!(context.len(), self.order);
        context.iter().fold(0, |acc, &z| acc * self.n_states + z)
    }

    pub fn decode_context(&self, mut index: usize) -> Vec<usize> {
        let mut ctx = vec![0; self.order];
        for slot in ctx.iter_mut().rev() {
            *slot = index % self.n_states;
            index /= self.n_states;
        }
        ctx
    }

    /// Row index of the context reached from `context` after emitting `symbol`.
    pub fn successor_context(&self, context: usize, symbol: usize) -> usize {
        let stride = self.n_contexts() / self.n_states;
        (context % stride) * self.n_states + symbol
    }

    /// The first-order transition chain on length-`k` windows: entry
    /// `((i_1..i_k), (j_1..j_k))` is `P_{i_1..i_k -> j_k}` when the windows
    /// overlap consistently and zero otherwise.
    pub fn expand_transition_chain(&self) -> Result<FirstOrderChain> {
        if self.order == 1 {
            return FirstOrderChain::new(self.transitions.clone());
        }
        let nc = self.n_contexts();
        let mut expanded = DMatrix::zeros(nc, nc);
        for c in 0..nc {
            for j in 0..self.n_states {
                expanded[(c, self.successor_context(c, j))] = self.transitions[(c, j)];
            }
        }
        FirstOrderChain::new(expanded)
    }

    fn context_invariance_residual(&self, dist: &DVector<f64>) -> f64 {
        let nc = self.n_contexts();
        let mut pushed = DVector::zeros(nc);
        for c in 0..nc {
            if dist[c] == 0.0 {
                continue;
            }
            for j in 0..self.n_states {
                pushed[self.successor_context(c, j)] += dist[c] * self.transitions[(c, j)];
            }
        }
        (pushed - dist).abs().sum()
    }

    /// The invariant distribution over length-`k` contexts, solved through the
    /// transition chain on first use and cached. Unreachable contexts get zero
    /// mass; the solve is restricted to the reachable closed class.
    pub fn stationary_context_dist(&self) -> Result<&DVector<f64>> {
        self.context_dist.get_or_try_init(|| {
            if self.order == 1 {
                return solve_stationary(&self.transitions);
            }
            solve_stationary(self.expand_transition_chain()?.transitions())
        })
    }

    /// The cached context distribution, if computed or supplied.
    pub fn context_dist_cached(&self) -> Option<&DVector<f64>> {
        self.context_dist.get()
    }

    /// Conditional entropy `H(Z_{k+1} | Z_1^k)` in bits under the invariant
    /// context distribution.
    pub fn conditional_entropy(&self) -> Result<f64> {
        let dist = self.stationary_context_dist()?;
        let mut h = 0.0;
        for c in 0..self.n_contexts() {
            if dist[c] > 0.0 {
                h += dist[c] * entropy_bits(self.transitions.row(c).transpose().as_slice());
            }
        }
        Ok(h)
    }
}

/// Kullback-Leibler divergence rate between two chains of equal order and
/// alphabet. Diverges (reported as `+inf` with the offending transition) when
/// the second chain assigns zero probability where the first walks.
#[derive(Debug, Clone, PartialEq)]
pub enum Kldr {
    Finite(f64),
    Diverged { context: Vec<usize>, symbol: usize },
}

impl Kldr {
    pub fn value(&self) -> f64 {
        match self {
            Kldr::Finite(v) => *v,
            Kldr::Diverged { .. } => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Kldr::Finite(_))
    }
}

/// Evaluate the KLDR between `a` and `b` with contexts weighted by `a`'s
/// invariant context distribution.
pub fn kldr(a: &HigherOrderChain, b: &HigherOrderChain) -> Result<Kldr> {
    if a.order() != b.order() || a.n_states() != b.n_states() {
        return Err(Error::DimensionMismatch(format!(
            "kldr between Mar({},{}) and Mar({},{})",
            a.order(),
            a.n_states(),
            b.order(),
            b.n_states()
        )));
    }
    let weights = a.stationary_context_dist()?;
    let mut total = 0.0;
    for c in 0..a.n_contexts() {
        let w = weights[c];
        if w <= 0.0 {
            continue;
        }
        for j in 0..a.n_states() {
            let p = a.transitions[(c, j)];
            if p <= 0.0 {
                continue;
            }
            let q = b.transitions[(c, j)];
            if q <= 0.0 {
                return Ok(Kldr::Diverged {
                    context: a.decode_context(c),
                    symbol: j,
                });
            }
            total += w * p * (p / q).log2();
        }
    }
    Ok(Kldr::Finite(total.max(0.0)))
}
