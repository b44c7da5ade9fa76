//! Exact joint distributions of projected windows.
//!
//! For a stationary chain `X` and partition `g`, [`project_joint`] computes
//! the distribution of `(Y_1, ..., Y_L)` with `Y_n = g(X_n)` by forward
//! dynamic programming over pairs (projected prefix, current hidden state):
//! `O(N^2 M^{L-1})` time, no simulation. [`project_joint_keyed`] keeps the
//! first hidden state explicit, producing the joint of `(X_1, Y_2, ...,
//! Y_{k+1})` needed by the lumpability cost.

use crate::chain::FirstOrderChain;
use crate::error::{Error, Result};
use crate::info::entropy_bits;
use crate::partition::PartitionMap;

/// Default cap on window lengths; guards against accidental `M^L` blowups.
pub const DEFAULT_WINDOW_CAP: usize = 6;

const NORMALIZATION_TOL: f64 = 1e-10;

/// A dense joint distribution over a window of projected symbols, optionally
/// keyed by the hidden state in the first coordinate.
#[derive(Debug, Clone)]
pub struct JointDist {
    window_len: usize,
    n_symbols: usize,
    key_states: Option<usize>,
    probs: Vec<f64>,
}

impl JointDist {
    fn new(
        window_len: usize,
        n_symbols: usize,
        key_states: Option<usize>,
        probs: Vec<f64>,
    ) -> Self {
        let mass: f64 = probs.iter().sum();
        assert!(
            (mass - 1.0).abs() <= NORMALIZATION_TOL,
            "joint distribution mass {mass} is not normalized"
        );
        JointDist {
            window_len,
            n_symbols,
            key_states,
            probs,
        }
    }

    /// Number of coordinates in the window (the key counts as one).
    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    /// `Some(N)` when the first coordinate ranges over hidden states.
    pub fn key_states(&self) -> Option<usize> {
        self.key_states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Flat index of a window; coordinates are given in time order.
    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.window_len);
        let mut idx = 0;
        for (t, &c) in coords.iter().enumerate() {
            let radix = match (t, self.key_states) {
                (0, Some(n)) => n,
                _ => self.n_symbols,
            };
            debug_assert!(c < radix);
            idx = idx * radix + c;
        }
        idx
    }

    pub fn prob(&self, coords: &[usize]) -> f64 {
        self.probs[self.index(coords)]
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Marginal over everything but the last coordinate.
    pub fn drop_last(&self) -> JointDist {
        assert!(
            self.window_len > 1,
            "cannot marginalize a single coordinate"
        );
        let probs: Vec<f64> = self
            .probs
            .chunks(self.n_symbols)
            .map(|block| block.iter().sum())
            .collect();
        JointDist::new(self.window_len - 1, self.n_symbols, self.key_states, probs)
    }

    /// Conditional entropy of the last coordinate given the rest,
    /// `H(joint) - H(marginal)`.
    pub fn conditional_entropy_last(&self) -> f64 {
        self.entropy() - self.drop_last().entropy()
    }

    /// Collapse a keyed first coordinate through `g`, yielding the plain
    /// window joint over `M^L`.
    pub fn unkey(&self, g: &PartitionMap) -> Result<JointDist> {
        let n = self.key_states.ok_or_else(|| {
            Error::DimensionMismatch("unkey on a joint without a hidden-state key".into())
        })?;
        if g.n_states() != n || g.n_groups() != self.n_symbols {
            return Err(Error::DimensionMismatch(
                "partition does not match the keyed joint".into(),
            ));
        }
        let tail = self.probs.len() / n;
        let mut probs = vec![0.0; self.n_symbols * tail];
        for x in 0..n {
            let group = g.group_of(x);
            let src = &self.probs[x * tail..(x + 1) * tail];
            let dst = &mut probs[group * tail..(group + 1) * tail];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        Ok(JointDist::new(self.window_len, self.n_symbols, None, probs))
    }
}

fn check_cap(len: usize, cap: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::InvalidConfig(
            "window length must be positive".into(),
        ));
    }
    if len > cap {
        return Err(Error::WindowTooLarge {
            requested: len,
            cap,
        });
    }
    Ok(())
}

/// Forward DP: joint of the next `len` projected symbols when the hidden
/// state starts with (unnormalized) weights `seed`.
fn prefix_dp(chain: &FirstOrderChain, g: &PartitionMap, seed: &[f64], len: usize) -> Vec<f64> {
    let n = chain.n_states();
    let m = g.n_groups();
    let p = chain.transitions();

    // alpha[prefix * n + x] = Pr[window prefix, current state x]
    let mut alpha = vec![0.0; m * n];
    for (x, &w) in seed.iter().enumerate() {
        alpha[g.group_of(x) * n + x] = w;
    }
    let mut prefixes = m;
    for _ in 1..len {
        let mut next = vec![0.0; prefixes * m * n];
        for prefix in 0..prefixes {
            let row = &alpha[prefix * n..(prefix + 1) * n];
            for (x, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for x2 in 0..n {
                    let v = p[(x, x2)];
                    if v > 0.0 {
                        next[(prefix * m + g.group_of(x2)) * n + x2] += a * v;
                    }
                }
            }
        }
        alpha = next;
        prefixes *= m;
    }

    alpha.chunks(n).map(|block| block.iter().sum()).collect()
}

/// Exact distribution of `(g(X_1), ..., g(X_L))` under stationarity.
pub fn project_joint(chain: &FirstOrderChain, g: &PartitionMap, len: usize) -> Result<JointDist> {
    project_joint_capped(chain, g, len, DEFAULT_WINDOW_CAP)
}

pub fn project_joint_capped(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    len: usize,
    cap: usize,
) -> Result<JointDist> {
    check_cap(len, cap)?;
    check_compat(chain, g)?;
    let mu = chain.stationary_distribution()?;
    let probs = prefix_dp(chain, g, mu.as_slice(), len);
    Ok(JointDist::new(len, g.n_groups(), None, probs))
}

/// Exact joint of `(X_1, g(X_2), ..., g(X_{k+1}))` under stationarity.
pub fn project_joint_keyed(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
) -> Result<JointDist> {
    project_joint_keyed_capped(chain, g, order, DEFAULT_WINDOW_CAP)
}

pub fn project_joint_keyed_capped(
    chain: &FirstOrderChain,
    g: &PartitionMap,
    order: usize,
    cap: usize,
) -> Result<JointDist> {
    check_cap(order + 1, cap)?;
    check_compat(chain, g)?;
    let n = chain.n_states();
    let m = g.n_groups();
    let mu = chain.stationary_distribution()?;
    let p = chain.transitions();

    let tail = m.pow(order as u32);
    let mut probs = vec![0.0; n * tail];
    let mut seed = vec![0.0; n];
    for x1 in 0..n {
        if mu[x1] == 0.0 {
            continue;
        }
        for (x2, w) in seed.iter_mut().enumerate() {
            *w = mu[x1] * p[(x1, x2)];
        }
        let block = prefix_dp(chain, g, &seed, order);
        probs[x1 * tail..(x1 + 1) * tail].copy_from_slice(&block);
    }
    Ok(JointDist::new(order + 1, m, Some(n), probs))
}

fn check_compat(chain: &FirstOrderChain, g: &PartitionMap) -> Result<()> {
    if g.n_states() != chain.n_states() {
        return Err(Error::DimensionMismatch(format!(
            "partition over {} states, chain has {}",
            g.n_states(),
            chain.n_states()
        )));
    }
    Ok(())
}
