use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A per-arc convex, increasing cost function of the arc rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ConvexFamily {
    /// `scale * exp(z)`
    Exp { scale: f64 },
    /// `scale * z^exponent`; an exponent of 1 is linear.
    Power { scale: f64, exponent: f64 },
}

impl ConvexFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ConvexFamily::Exp { scale } => scale >= 0.0 && scale.is_finite(),
            ConvexFamily::Power { scale, exponent } => {
                scale >= 0.0 && scale.is_finite() && exponent >= 1.0 && exponent.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad cost function {self:?}")))
        }
    }

    pub fn value(&self, z: f64) -> f64 {
        match *self {
            ConvexFamily::Exp { scale } => scale * z.exp(),
            ConvexFamily::Power { scale, exponent } => scale * z.max(0.0).powf(exponent),
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            ConvexFamily::Exp { scale } => scale * z.exp(),
            ConvexFamily::Power { scale, exponent } => {
                if exponent == 1.0 {
                    scale
                } else {
                    scale * exponent * z.max(0.0).powf(exponent - 1.0)
                }
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(*self, ConvexFamily::Power { exponent, .. } if exponent == 1.0)
    }
}

/// One convex function per arc, with the smoothing exponent `n` used when
/// `max_t x` is relaxed to `(sum_t x^n)^(1/n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCost {
    pub functions: Vec<ConvexFamily>,
    pub smoothing: u32,
}

impl ConvexCost {
    pub fn new(functions: Vec<ConvexFamily>, smoothing: u32) -> Result<Self> {
        if smoothing < 1 {
            return Err(Error::InvalidArgument("smoothing exponent must be at least 1".into()));
        }
        for f in &functions {
            f.validate()?;
        }
        Ok(ConvexCost { functions, smoothing })
    }

    /// `a_e * exp(z)` on every arc.
    pub fn exponential(scales: &[f64], smoothing: u32) -> Result<Self> {
        Self::new(scales.iter().map(|&scale| ConvexFamily::Exp { scale }).collect(), smoothing)
    }

    /// `a_e * z^k` on every arc.
    pub fn power(scales: &[f64], exponent: f64, smoothing: u32) -> Result<Self> {
        Self::new(
            scales.iter().map(|&scale| ConvexFamily::Power { scale, exponent }).collect(),
            smoothing,
        )
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// `sum_e f_e(z_e)`.
    pub fn total(&self, z: &[f64]) -> f64 {
        self.functions.iter().zip(z).map(|(f, &z)| f.value(z)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostModel {
    Linear { coefficients: Vec<f64> },
    Convex(ConvexCost),
}

impl CostModel {
    pub fn linear(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidArgument("linear costs must be finite and nonnegative".into()));
        }
        Ok(CostModel::Linear { coefficients })
    }

    pub fn total(&self, z: &[f64]) -> f64 {
        match self {
            CostModel::Linear { coefficients } => coefficients.iter().zip(z).map(|(a, z)| a * z).sum(),
            CostModel::Convex(c) => c.total(z),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CostModel::Linear { coefficients } => coefficients.len(),
            CostModel::Convex(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
