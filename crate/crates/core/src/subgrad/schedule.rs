use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Step sizes `theta[n]` and convex combination weights `mu_l[n]`,
/// iterations counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `theta[n] = a / (b + n)`, `mu_l[n] = theta[l] / sum_k theta[k]`.
    HarmonicFamily { a: f64, b: f64 },
    /// `theta[n] = a / (b + c n)`, `mu_l[n] = 1 / n`.
    RatioWeights { a: f64, b: f64, c: f64 },
    /// `theta[n] = n^-alpha`, `mu_l[n] = 1 / n`.
    PowerAlpha { alpha: f64 },
    /// `theta[n] = n^-alpha`; the recovered primal is the plain average of
    /// the last `window` iterates.
    ModifiedRecovery { alpha: f64, window: usize },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::ModifiedRecovery { alpha: 0.8, window: 30 }
    }
}

/// `theta[n]`, the weights `mu_1[n] .. mu_n[n]` and `phi[n] =
/// mu_l[n+1] / mu_l[n]` when that ratio does not depend on `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleValues {
    pub theta: f64,
    pub mu: Vec<f64>,
    pub phi: Option<f64>,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Schedule::HarmonicFamily { a, b } => a > 0.0 && b >= 0.0,
            Schedule::RatioWeights { a, b, c } => a > 0.0 && b >= 0.0 && c > 0.0,
            Schedule::PowerAlpha { alpha } => alpha > 0.0 && alpha < 1.0,
            Schedule::ModifiedRecovery { alpha, window } => alpha > 0.0 && alpha < 1.0 && window >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("schedule parameters violate positivity: {self:?}")))
        }
    }

    pub fn theta(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            Schedule::HarmonicFamily { a, b } => a / (b + n),
            Schedule::RatioWeights { a, b, c } => a / (b + c * n),
            Schedule::PowerAlpha { alpha } | Schedule::ModifiedRecovery { alpha, .. } => n.powf(-alpha),
        }
    }

    /// `mu_l[n]` for `1 <= l <= n`.
    pub fn mu(&self, l: usize, n: usize) -> f64 {
        match *self {
            Schedule::HarmonicFamily { .. } => {
                let total: f64 = (1..=n).map(|k| self.theta(k)).sum();
                self.theta(l) / total
            }
            Schedule::RatioWeights { .. } | Schedule::PowerAlpha { .. } => 1.0 / n as f64,
            Schedule::ModifiedRecovery { window, .. } => {
                if n < window {
                    1.0 / n as f64
                } else if l + window > n {
                    1.0 / window as f64
                } else {
                    0.0
                }
            }
        }
    }

    /// `phi[n]`, or `None` for the windowed rule once the window is full.
    pub fn phi(&self, n: usize) -> Option<f64> {
        match *self {
            Schedule::HarmonicFamily { .. } => {
                let s_n: f64 = (1..=n).map(|k| self.theta(k)).sum();
                Some(s_n / (s_n + self.theta(n + 1)))
            }
            Schedule::RatioWeights { .. } | Schedule::PowerAlpha { .. } => Some(n as f64 / (n + 1) as f64),
            Schedule::ModifiedRecovery { window, .. } => {
                (n + 1 < window).then(|| n as f64 / (n + 1) as f64)
            }
        }
    }

    pub fn values(&self, n: usize) -> Result<ScheduleValues> {
        if n == 0 {
            return Err(Error::InvalidArgument("iterations are counted from 1".into()));
        }
        self.validate()?;
        Ok(ScheduleValues { theta: self.theta(n), mu: (1..=n).map(|l| self.mu(l, n)).collect(), phi: self.phi(n) })
    }

    /// `gamma_ln = mu_l[n] / theta[l]` for `l = 1..n`.
    pub fn gammas(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|l| self.mu(l, n) / self.theta(l)).collect()
    }
}

/// Convenience wrapper returning `(theta[n], mu_.[n], phi[n])`.
pub fn schedule_values(schedule: &Schedule, n: usize) -> Result<ScheduleValues> {
    schedule.values(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_weights_example() {
        let v = schedule_values(&Schedule::RatioWeights { a: 1.0, b: 0.0, c: 1.0 }, 4).unwrap();
        assert_eq!(v.theta, 0.25);
        assert_eq!(v.mu, vec![0.25; 4]);
    }

    #[test]
    fn power_first_step() {
        assert_eq!(schedule_values(&Schedule::PowerAlpha { alpha: 0.8 }, 1).unwrap().theta, 1.0);
    }

    #[test]
    fn phi_is_the_weight_ratio() {
        let kinds = [
            Schedule::HarmonicFamily { a: 2.0, b: 1.0 },
            Schedule::RatioWeights { a: 1.0, b: 2.0, c: 0.5 },
            Schedule::PowerAlpha { alpha: 0.8 },
        ];
        for s in kinds {
            for n in 1..40 {
                let phi = s.phi(n).unwrap();
                for l in 1..=n {
                    let ratio = s.mu(l, n + 1) / s.mu(l, n);
                    assert!((ratio - phi).abs() < 1e-12, "{s:?} n={n} l={l}");
                }
            }
        }
        assert_eq!(Schedule::PowerAlpha { alpha: 0.8 }.phi(3), Some(0.75));
    }

    #[test]
    fn weights_are_convex() {
        for s in [
            Schedule::HarmonicFamily { a: 1.0, b: 0.0 },
            Schedule::RatioWeights { a: 1.0, b: 0.0, c: 1.0 },
            Schedule::PowerAlpha { alpha: 0.5 },
            Schedule::default(),
        ] {
            for n in [1, 2, 29, 30, 31, 80] {
                let v = s.values(n).unwrap();
                assert!((v.mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(v.mu.iter().all(|m| *m >= 0.0) && v.theta > 0.0);
            }
        }
    }

    #[test]
    fn modified_window() {
        let s = Schedule::default();
        let v = s.values(40).unwrap();
        assert_eq!(v.mu[..10], [0.0; 10]);
        assert!(v.mu[10..].iter().all(|m| (*m - 1.0 / 30.0).abs() < 1e-15));
        assert_eq!(s.phi(40), None);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Schedule::PowerAlpha { alpha: 1.0 }.validate().is_err());
        assert!(Schedule::RatioWeights { a: 1.0, b: 0.0, c: 0.0 }.validate().is_err());
        assert!(Schedule::HarmonicFamily { a: 0.0, b: 0.0 }.validate().is_err());
        assert!(schedule_values(&Schedule::default(), 0).is_err());
    }

    #[test]
    fn sherali_choi_conditions() {
        for s in [
            Schedule::HarmonicFamily { a: 1.0, b: 0.0 },
            Schedule::RatioWeights { a: 1.0, b: 1.0, c: 1.0 },
            Schedule::PowerAlpha { alpha: 0.8 },
        ] {
            let mut last_first = f64::INFINITY;
            for n in [10, 100, 1000] {
                let g = s.gammas(n);
                assert!(g.windows(2).all(|w| w[1] >= w[0] - 1e-15), "{s:?}: gamma not nondecreasing");
                assert!(g[0] < last_first, "{s:?}: gamma_1n not decreasing");
                last_first = g[0];
                assert!(g[n - 1] <= 2.0);
            }
        }
    }
}
