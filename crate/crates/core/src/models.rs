//! Generators for the synthetic, linguistic, and reliability models, plus the
//! bi-gram trainer.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;

use crate::chain::FirstOrderChain;
use crate::error::{Error, Result};
use crate::partition::PartitionMap;

/// Row-stochastic matrix with entries drawn uniformly from `[0,1)` and rows
/// normalized afterwards.
pub fn random_stochastic_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
    for i in 0..n {
        let sum: f64 = m.row(i).sum();
        for j in 0..n {
            m[(i, j)] /= sum;
        }
    }
    m
}

fn validate_weights(weights: &DMatrix<f64>) -> Result<()> {
    for i in 0..weights.nrows() {
        let mut sum = 0.0;
        for j in 0..weights.ncols() {
            let v = weights[(i, j)];
            if !(0.0..=1.0 + 1e-9).contains(&v) {
                return Err(Error::InvalidProbability {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::RowNotStochastic {
                row: i,
                sum,
                tol: 1e-9,
            });
        }
    }
    Ok(())
}

/// Assemble the block-stochastic matrix whose `(a, b)` block is
/// `weights[a][b] * blocks[a][b]`, together with the natural partition into
/// consecutive blocks. When `blocks` is `None`, random row-stochastic blocks
/// are drawn from `seed`.
///
/// The result is exactly 1-lumpable w.r.t. the natural partition whenever it
/// is irreducible; it may be reducible or periodic (e.g. for permutation
/// weights), which is fine for later perturbation.
pub fn gen_block_stochastic(
    block_sizes: &[usize],
    weights: &DMatrix<f64>,
    blocks: Option<&[Vec<DMatrix<f64>>]>,
    seed: u64,
) -> Result<(FirstOrderChain, PartitionMap)> {
    let m = block_sizes.len();
    if m == 0 || block_sizes.contains(&0) {
        return Err(Error::InvalidConfig("block sizes must be positive".into()));
    }
    if weights.nrows() != m || weights.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "weight matrix is {}x{}, expected {m}x{m}",
            weights.nrows(),
            weights.ncols()
        )));
    }
    validate_weights(weights)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generated: Vec<Vec<DMatrix<f64>>>;
    let blocks: &[Vec<DMatrix<f64>>] = match blocks {
        Some(b) => b,
        None => {
            generated = block_sizes
                .iter()
                .map(|&rows| {
                    block_sizes
                        .iter()
                        .map(|&cols| {
                            let mut block =
                                DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>());
                            for r in 0..rows {
                                let sum: f64 = block.row(r).sum();
                                for c in 0..cols {
                                    block[(r, c)] /= sum;
                                }
                            }
                            block
                        })
                        .collect()
                })
                .collect();
            &generated
        }
    };

    if blocks.len() != m || blocks.iter().any(|row| row.len() != m) {
        return Err(Error::DimensionMismatch(format!(
            "expected an {m}x{m} grid of intra-block matrices"
        )));
    }
    let offsets: Vec<usize> = block_sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let n: usize = block_sizes.iter().sum();

    let mut p = DMatrix::zeros(n, n);
    for a in 0..m {
        for b in 0..m {
            let block = &blocks[a][b];
            if block.nrows() != block_sizes[a] || block.ncols() != block_sizes[b] {
                return Err(Error::DimensionMismatch(format!(
                    "block ({a},{b}) is {}x{}, expected {}x{}",
                    block.nrows(),
                    block.ncols(),
                    block_sizes[a],
                    block_sizes[b]
                )));
            }
            let mut row_check = vec![0.0; block.nrows()];
            for r in 0..block.nrows() {
                for c in 0..block.ncols() {
                    let v = block[(r, c)];
                    if v < 0.0 {
                        return Err(Error::InvalidProbability {
                            row: r,
                            col: c,
                            value: v,
                        });
                    }
                    row_check[r] += v;
                    p[(offsets[a] + r, offsets[b] + c)] = weights[(a, b)] * v;
                }
            }
            if weights[(a, b)] > 0.0 {
                for (r, sum) in row_check.iter().enumerate() {
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(Error::RowNotStochastic {
                            row: offsets[a] + r,
                            sum: *sum,
                            tol: 1e-9,
                        });
                    }
                }
            }
        }
    }

    let mut labels = Vec::with_capacity(n);
    for (group, &size) in block_sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(group, size));
    }
    Ok((FirstOrderChain::new(p)?, PartitionMap::new(labels, m)?))
}

/// Block-stochastic chain with random weights and random intra-block
/// matrices, all drawn from `seed`.
pub fn gen_random_block_stochastic(
    block_sizes: &[usize],
    seed: u64,
) -> Result<(FirstOrderChain, PartitionMap)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = random_stochastic_matrix(block_sizes.len(), &mut rng);
    let block_seed = rng.random::<u64>();
    gen_block_stochastic(block_sizes, &weights, None, block_seed)
}

/// Perturbation noise: an explicit row-stochastic irreducible matrix, or a
/// seed to draw one (uniform entries, normalized rows, hence strictly
/// positive).
#[derive(Debug, Clone)]
pub enum PerturbNoise<'a> {
    Matrix(&'a DMatrix<f64>),
    Seed(u64),
}

/// Convex combination `(1 - epsilon) P' + epsilon E`.
pub fn perturb(
    base: &FirstOrderChain,
    epsilon: f64,
    noise: PerturbNoise<'_>,
) -> Result<FirstOrderChain> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} outside [0, 1]"
        )));
    }
    let n = base.n_states();
    let owned;
    let e: &DMatrix<f64> = match noise {
        PerturbNoise::Matrix(m) => m,
        PerturbNoise::Seed(seed) => {
            owned = random_stochastic_matrix(n, &mut ChaCha8Rng::seed_from_u64(seed));
            &owned
        }
    };
    if e.nrows() != n || e.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "noise matrix is {}x{}, chain has {n} states",
            e.nrows(),
            e.ncols()
        )));
    }
    let noise_chain = FirstOrderChain::new(e.clone())?;
    if !noise_chain.is_irreducible() {
        return Err(Error::NotIrreducible { closed_classes: 0 });
    }
    let combined = base.transitions() * (1.0 - epsilon) + e * epsilon;
    FirstOrderChain::new(combined)
}

/// The unperturbed quasi-periodic model: zero diagonal blocks and random
/// row-stochastic off-diagonal blocks of the given size, with its natural
/// two-group partition. Periodic with period 2 until perturbed.
pub fn gen_quasi_periodic(block_size: usize, seed: u64) -> Result<(FirstOrderChain, PartitionMap)> {
    let weights = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    gen_block_stochastic(&[block_size, block_size], &weights, None, seed)
}

/// The six-state synthetic toy chain: a deterministic skeleton (with branch
/// probability `p` out of state 5) mixed with `epsilon` of noise.
pub fn gen_toy(p: f64, epsilon: f64, noise: PerturbNoise<'_>) -> Result<FirstOrderChain> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("p {p} outside [0, 1]")));
    }
    #[rustfmt::skip]
    let skeleton = DMatrix::from_row_slice(6, 6, &[
        0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
        p, 1.0 - p, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
    ]);
    perturb(&FirstOrderChain::new(skeleton)?, epsilon, noise)
}

/// Transition rates of the maintenance model.
#[derive(Debug, Clone, Copy)]
pub struct MaintenanceRates {
    /// Spontaneous failure rate out of working and deteriorated states.
    pub lambda_0: f64,
    /// Deterioration rate.
    pub lambda_1: f64,
    /// Maintenance initiation rate.
    pub lambda_m: f64,
    /// Repair rate after spontaneous failure.
    pub mu_0: f64,
    /// Repair rate after failure through deterioration.
    pub mu_1: f64,
    /// Maintenance completion rate.
    pub mu_m: f64,
}

impl Default for MaintenanceRates {
    /// Defaults in the reliable regime `lambda_m < lambda_1`.
    fn default() -> Self {
        MaintenanceRates {
            lambda_0: 0.05,
            lambda_1: 1.0,
            lambda_m: 0.3,
            mu_0: 1.0,
            mu_1: 1.0,
            mu_m: 2.0,
        }
    }
}

/// Continuous-time rate matrix: nonnegative off-diagonal rates, each diagonal
/// entry the negative row sum.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    rates: DMatrix<f64>,
}

impl RateMatrix {
    pub fn new(rates: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = rates.shape();
        if rows != cols || rows == 0 {
            return Err(Error::InvalidRates(format!("matrix is {rows}x{cols}")));
        }
        for i in 0..rows {
            let mut sum = 0.0;
            for j in 0..cols {
                let v = rates[(i, j)];
                if i != j && v < 0.0 {
                    return Err(Error::InvalidRates(format!(
                        "negative off-diagonal rate at ({i},{j})"
                    )));
                }
                sum += v;
            }
            if sum.abs() > 1e-9 {
                return Err(Error::InvalidRates(format!("row {i} sums to {sum}")));
            }
        }
        Ok(RateMatrix { rates })
    }

    /// Build from off-diagonal rates, filling the diagonal.
    pub fn from_off_diagonal(mut rates: DMatrix<f64>) -> Result<Self> {
        let n = rates.nrows();
        for i in 0..n {
            rates[(i, i)] = 0.0;
            let exit: f64 = rates.row(i).sum();
            rates[(i, i)] = -exit;
        }
        Self::new(rates)
    }

    pub fn n_states(&self) -> usize {
        self.rates.nrows()
    }

    pub fn rates(&self) -> &DMatrix<f64> {
        &self.rates
    }

    /// Exit rate of a state (the negative diagonal entry).
    pub fn exit_rate(&self, state: usize) -> f64 {
        -self.rates[(state, state)]
    }
}

/// Embedded discrete-time jump chain: `P_ij = q_ij / sum_{l != i} q_il`,
/// zero diagonal.
pub fn embed_jump_chain(rates: &RateMatrix) -> Result<FirstOrderChain> {
    let n = rates.n_states();
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let exit = rates.exit_rate(i);
        if exit <= 0.0 {
            return Err(Error::AbsorbingState { state: i });
        }
        for j in 0..n {
            if i != j {
                p[(i, j)] = rates.rates()[(i, j)] / exit;
            }
        }
    }
    FirstOrderChain::new(p)
}

/// The maintenance model with `k` deterioration steps: states `W`,
/// `D_1..D_k`, `M_1..M_{k+1}`, `F_1`, `F_0` (`N = 2k + 4`). Maintenance
/// revokes the last deterioration step: `M_1` and `M_2` return to `W`,
/// `M_i` returns to `D_{i-2}` for `i >= 3`. The reference partition pairs
/// each maintenance state with the deterioration state it protects,
/// `{W}, (M_1,D_1), ..., (M_k,D_k), (M_{k+1},F_1), {F_0}` (`M = k + 3`).
pub fn gen_maintenance(k: usize, rates: &MaintenanceRates) -> Result<(RateMatrix, PartitionMap)> {
    if k == 0 {
        return Err(Error::InvalidRates(
            "need at least one deterioration step".into(),
        ));
    }
    let all = [
        rates.lambda_0,
        rates.lambda_1,
        rates.lambda_m,
        rates.mu_0,
        rates.mu_1,
        rates.mu_m,
    ];
    if all.iter().any(|&r| !r.is_finite() || r <= 0.0) {
        return Err(Error::InvalidRates("all rates must be positive".into()));
    }

    let n = 2 * k + 4;
    let w = 0;
    let d = |i: usize| i; // D_i, i = 1..=k
    let m_state = |i: usize| k + i; // M_i, i = 1..=k+1
    let f1 = 2 * k + 2;
    let f0 = 2 * k + 3;

    let mut q = DMatrix::zeros(n, n);
    // working state: maintenance, deterioration, spontaneous failure
    q[(w, m_state(1))] = rates.lambda_m;
    q[(w, d(1))] = rates.lambda_1;
    q[(w, f0)] = rates.lambda_0;
    // deteriorated states
    for i in 1..=k {
        let next = if i < k { d(i + 1) } else { f1 };
        q[(d(i), next)] = rates.lambda_1;
        q[(d(i), m_state(i + 1))] = rates.lambda_m;
        q[(d(i), f0)] = rates.lambda_0;
    }
    // maintenance revokes one deterioration step
    q[(m_state(1), w)] = rates.mu_m;
    q[(m_state(2), w)] = rates.mu_m;
    for i in 3..=k + 1 {
        q[(m_state(i), d(i - 2))] = rates.mu_m;
    }
    // repairs
    q[(f0, w)] = rates.mu_0;
    q[(f1, w)] = rates.mu_1;

    let rate_matrix = RateMatrix::from_off_diagonal(q)?;

    let mut labels = vec![0usize; n];
    labels[w] = 0;
    for i in 1..=k {
        labels[d(i)] = i;
        labels[m_state(i)] = i;
    }
    labels[m_state(k + 1)] = k + 1;
    labels[f1] = k + 1;
    labels[f0] = k + 2;
    Ok((rate_matrix, PartitionMap::new(labels, k + 3)?))
}

/// Default pattern for chapter-heading lines: a line that is nothing but a
/// roman numeral (optionally dotted) or a `CHAPTER ...` title.
pub const DEFAULT_HEADING_PATTERN: &str = r"(?m)^[ \t]*(?:[IVXLCDM]+\.?|CHAPTER\b[^\n]*)[ \t]*$";

/// Corpus preprocessing: drop chapter-heading lines, then replace line breaks
/// by single spaces. Punctuation is kept untouched.
#[derive(Debug, Clone)]
pub struct TextPrep {
    pub strip_linebreaks: bool,
    pub heading_pattern: Option<Regex>,
}

impl Default for TextPrep {
    fn default() -> Self {
        TextPrep {
            strip_linebreaks: true,
            heading_pattern: Some(Regex::new(DEFAULT_HEADING_PATTERN).unwrap()),
        }
    }
}

impl TextPrep {
    pub fn apply(&self, text: &str) -> String {
        let mut out: String = match &self.heading_pattern {
            Some(re) => text
                .lines()
                .filter(|line| !re.is_match(line))
                .collect::<Vec<_>>()
                .join("\n"),
            None => text.to_string(),
        };
        if self.strip_linebreaks {
            let breaks = Regex::new(r"[ \t]*[\r\n]+[ \t]*").unwrap();
            out = breaks.replace_all(&out, " ").trim().to_string();
        }
        out
    }
}

/// Train a letter bi-gram chain from a character stream.
///
/// The alphabet lists distinct characters in order of first appearance;
/// `P_ij = (count_ij + delta) / (row_count_i + delta * N)`. Any positive
/// `delta` makes every row strictly positive, hence the chain irreducible.
/// With `delta = 0`, rows without outgoing counts fall back to uniform and a
/// warning is logged.
pub fn bigram_train(text: &str, smoothing: f64) -> Result<(FirstOrderChain, Vec<char>)> {
    if smoothing < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "smoothing {smoothing} must be nonnegative"
        )));
    }
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Err(Error::EmptyText);
    }
    let mut alphabet: Vec<char> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for &ch in &chars {
        index.entry(ch).or_insert_with(|| {
            alphabet.push(ch);
            alphabet.len() - 1
        });
    }
    let n = alphabet.len();
    let mut counts = DMatrix::<f64>::zeros(n, n);
    for pair in chars.windows(2) {
        counts[(index[&pair[0]], index[&pair[1]])] += 1.0;
    }

    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let row_total: f64 = counts.row(i).sum();
        let denom = row_total + smoothing * n as f64;
        if denom == 0.0 {
            log::warn!(
                "character {:?} has no outgoing transitions and no smoothing; using a uniform row",
                alphabet[i]
            );
            for j in 0..n {
                p[(i, j)] = 1.0 / n as f64;
            }
            continue;
        }
        for j in 0..n {
            p[(i, j)] = (counts[(i, j)] + smoothing) / denom;
        }
    }
    if smoothing == 0.0 {
        log::warn!("bigram model trained without smoothing may not be irreducible");
    }
    Ok((FirstOrderChain::new(p)?, alphabet))
}

/// Sample a trajectory from a chain, mapping states through `alphabet`.
/// Starts from the stationary distribution.
pub fn sample_text(
    chain: &FirstOrderChain,
    alphabet: &[char],
    len: usize,
    seed: u64,
) -> Result<String> {
    if alphabet.len() != chain.n_states() {
        return Err(Error::DimensionMismatch(
            "alphabet does not match the chain".into(),
        ));
    }
    let mu = chain.stationary_distribution()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = sample_categorical(mu.as_slice(), &mut rng);
    let mut out = String::with_capacity(len);
    for _ in 0..len {
        out.push(alphabet[state]);
        state = sample_categorical(
            chain.transitions().row(state).transpose().as_slice(),
            &mut rng,
        );
    }
    Ok(out)
}

pub(crate) fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let mut u = rng.random::<f64>();
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{lump_cost, map_predictor};
    use crate::joint::project_joint;
    use crate::lifting::optimal_aggregation;

    #[test]
    fn single_block_is_the_block_itself() {
        let weights = DMatrix::from_row_slice(1, 1, &[1.0]);
        let block = vec![vec![DMatrix::from_row_slice(2, 2, &[0.3, 0.7, 0.6, 0.4])]];
        let (chain, g) = gen_block_stochastic(&[2], &weights, Some(&block), 0).unwrap();
        assert_eq!(chain.transitions(), &block[0][0]);
        assert_eq!(g.n_groups(), 1);
    }

    #[test]
    fn block_chain_is_one_lumpable() {
        let weights = DMatrix::from_row_slice(2, 2, &[0.8, 0.2, 0.3, 0.7]);
        let (chain, g) = gen_block_stochastic(&[3, 2], &weights, None, 42).unwrap();
        assert!(chain.is_irreducible());
        assert!(lump_cost(&chain, &g, 1).unwrap() < 1e-10);
    }

    #[test]
    fn permutation_weights_give_deterministic_projection() {
        let weights = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let (chain, g) = gen_block_stochastic(&[2, 2, 2], &weights, None, 7).unwrap();
        let agg = optimal_aggregation(&chain, &g, 1).unwrap();
        let predictor = map_predictor(&agg.chain).unwrap();
        assert!(predictor.error < 1e-12);
    }

    #[test]
    fn perturb_endpoints() {
        let (base, _) = gen_quasi_periodic(3, 1).unwrap();
        let same = perturb(&base, 0.0, PerturbNoise::Seed(2)).unwrap();
        assert_eq!(same.transitions(), base.transitions());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = random_stochastic_matrix(6, &mut rng);
        let full = perturb(&base, 1.0, PerturbNoise::Matrix(&e)).unwrap();
        assert_eq!(full.transitions(), &e);
    }

    #[test]
    fn perturb_rejects_reducible_noise() {
        let (base, _) = gen_quasi_periodic(2, 1).unwrap();
        let e = DMatrix::<f64>::identity(4, 4);
        assert!(matches!(
            perturb(&base, 0.5, PerturbNoise::Matrix(&e)),
            Err(Error::NotIrreducible { .. })
        ));
    }

    #[test]
    fn quasi_periodic_alternates_deterministically() {
        let (chain, g) = gen_quasi_periodic(10, 3).unwrap();
        assert_eq!(chain.n_states(), 20);
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(chain.prob(i, j), 0.0);
                assert_eq!(chain.prob(10 + i, 10 + j), 0.0);
            }
        }
        // natural projection is the deterministic alternator: zero MAP error
        let agg = optimal_aggregation(&chain, &g, 1).unwrap();
        let predictor = map_predictor(&agg.chain).unwrap();
        assert!(predictor.error < 1e-12);
    }

    #[test]
    fn toy_skeleton_rows() {
        let chain = gen_toy(0.3, 0.0, PerturbNoise::Seed(5)).unwrap();
        let expected_row5 = [0.3, 0.7, 0.0, 0.0, 0.0, 0.0];
        for (j, expected) in expected_row5.iter().enumerate() {
            assert!((chain.prob(4, j) - expected).abs() < 1e-15);
        }
        assert_eq!(chain.prob(5, 5), 1.0);
        assert_eq!(chain.prob(2, 4), 1.0);
    }

    #[test]
    fn maintenance_dimensions_and_row_sums() {
        let (rates, g) = gen_maintenance(4, &MaintenanceRates::default()).unwrap();
        assert_eq!(rates.n_states(), 12);
        assert_eq!(g.n_groups(), 7);
        for i in 0..12 {
            assert!(rates.rates().row(i).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn maintenance_jump_chain_working_row() {
        let r = MaintenanceRates::default();
        let (rates, _) = gen_maintenance(3, &r).unwrap();
        let chain = embed_jump_chain(&rates).unwrap();
        let exit = r.lambda_m + r.lambda_1 + r.lambda_0;
        // W = 0, D_1 = 1, M_1 = 4, F_0 = 9 for k = 3
        assert!((chain.prob(0, 4) - r.lambda_m / exit).abs() < 1e-12);
        assert!((chain.prob(0, 1) - r.lambda_1 / exit).abs() < 1e-12);
        assert!((chain.prob(0, 9) - r.lambda_0 / exit).abs() < 1e-12);
        assert_eq!(chain.prob(0, 0), 0.0);
    }

    #[test]
    fn maintenance_reference_partition_predicts_two_steps_back() {
        let k = 3;
        let (rates, g) = gen_maintenance(k, &MaintenanceRates::default()).unwrap();
        let chain = embed_jump_chain(&rates).unwrap();
        let joint = project_joint(&chain, &g, 3).unwrap();
        // with 1-based groups: Y_1 = l+1 and Y_2 = l-1 imply Y_3 = l
        for l in 2..=k + 1 {
            let (y1, y2, y3) = (l, l - 2, l - 1); // 0-based group labels
            let mut ctx_mass = 0.0;
            let mut hit = 0.0;
            for y in 0..g.n_groups() {
                let v = joint.prob(&[y1, y2, y]);
                ctx_mass += v;
                if y == y3 {
                    hit += v;
                }
            }
            assert!(ctx_mass > 0.0);
            assert!(hit / ctx_mass > 0.9, "l = {l}: {}", hit / ctx_mass);
        }
    }

    #[test]
    fn jump_chain_two_state() {
        let rates =
            RateMatrix::from_off_diagonal(DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 0.5, 0.0]))
                .unwrap();
        let chain = embed_jump_chain(&rates).unwrap();
        assert_eq!(chain.prob(0, 1), 1.0);
        assert_eq!(chain.prob(1, 0), 1.0);
    }

    #[test]
    fn jump_chain_rejects_absorbing_state() {
        let rates = RateMatrix::new(DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(
            embed_jump_chain(&rates),
            Err(Error::AbsorbingState { state: 1 })
        ));
    }

    #[test]
    fn bigram_alternating_text_without_smoothing() {
        let (chain, alphabet) = bigram_train("abababababab", 0.0).unwrap();
        assert_eq!(alphabet, vec!['a', 'b']);
        assert_eq!(chain.prob(0, 1), 1.0);
        assert_eq!(chain.prob(1, 0), 1.0);
    }

    #[test]
    fn bigram_counts_match_direct_counting() {
        let (chain, alphabet) = bigram_train("aab", 0.0).unwrap();
        assert_eq!(alphabet, vec!['a', 'b']);
        assert!((chain.prob(0, 0) - 0.5).abs() < 1e-12);
        assert!((chain.prob(0, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bigram_smoothing_gives_positive_rows() {
        let (chain, _) = bigram_train("abcabc", 1e-3).unwrap();
        assert!(chain.is_irreducible());
        for i in 0..3 {
            for j in 0..3 {
                assert!(chain.prob(i, j) > 0.0);
            }
        }
    }

    #[test]
    fn text_prep_strips_headings_and_linebreaks() {
        let prep = TextPrep::default();
        let text = "I.\nIt was a\ndark night.\n\nCHAPTER TWO\nMore text.";
        assert_eq!(prep.apply(text), "It was a dark night. More text.");
    }
}
