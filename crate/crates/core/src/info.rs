//! Shared entropy helpers. Base-2 logarithms throughout, so every quantity
//! in this crate is measured in bits. `0 log 0 = 0` by convention.

/// Shannon entropy (bits) of a nonnegative weight vector. The input is
/// assumed to be normalized; zero entries contribute nothing.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Binary entropy h(p) in bits.
pub fn binary_entropy_bits(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Floor tiny negative entropy differences to zero. The cost functions are
/// nonnegative in exact arithmetic; roundoff can push them slightly below.
pub fn clamp_cost(v: f64) -> f64 {
    debug_assert!(v > -1e-10, "cost {v} below the numerical noise floor");
    v.max(0.0)
}
