use crate::{Error, Result};

/// Euclidean projection of `u` onto `{v >= 0, sum v = a}` by the
/// sort-and-threshold rule.
pub fn project_price_simplex(u: &[f64], a: f64) -> Result<Vec<f64>> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("simplex budget {a} must be finite and nonnegative")));
    }
    let n = u.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut sorted = u.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let mut prefix = 0.0;
    let mut k_hat = n;
    let mut tau = 0.0;
    for k in 1..=n {
        prefix += sorted[k - 1];
        tau = (a - prefix) / k as f64;
        if k == n || tau <= -sorted[k] {
            k_hat = k;
            break;
        }
    }
    debug_assert!(k_hat >= 1);
    Ok(u.iter().map(|&x| (x + tau).max(0.0)).collect())
}
