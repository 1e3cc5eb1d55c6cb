use crate::netmodel::Hypernetwork;
use crate::{Error, Result};

/// Fraction of packets injected on hyperarc `e` received by at least one
/// node of `subset`, with independent per-receiver losses.
pub fn reception_prob_b(hyper: &Hypernetwork, e: usize, subset: &[usize]) -> Result<f64> {
    let h = hyper.hyperarc(e);
    if let Some(k) = subset.iter().find(|k| h.heads.binary_search(k).is_err()) {
        return Err(Error::InvalidArgument(format!(
            "node `{}` is not an end node of the hyperarc",
            hyper.name(*k)
        )));
    }
    let miss: f64 = subset.iter().map(|&k| 1.0 - hyper.reception_prob(h.tail, k)).product();
    Ok(if subset.is_empty() { 0.0 } else { 1.0 - miss })
}

/// Same quantity by summing the probabilities of all reception outcomes
/// that hit `subset`. Exponential in `probs.len()`.
pub fn reception_prob_enumerated(probs: &[f64], subset: &[usize]) -> f64 {
    let n = probs.len();
    let mut total = 0.0;
    for outcome in 0u32..(1 << n) {
        let p: f64 = (0..n)
            .map(|i| if outcome >> i & 1 == 1 { probs[i] } else { 1.0 - probs[i] })
            .product();
        if subset.iter().any(|&i| outcome >> i & 1 == 1) {
            total += p;
        }
    }
    total
}
