use serde::{Deserialize, Serialize};

use crate::netmodel::{ConvexCost, FlowSet, MulticastRequest, Network};
use crate::{Error, Result};

/// Constant positive gains multiplying each update.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Gains {
    pub k: f64,
    pub h: f64,
    pub m: f64,
    pub k_rate: f64,
    pub m_rate: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Gains { k: 1.0, h: 1.0, m: 1.0, k_rate: 1.0, m_rate: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PDParams {
    /// Flow and rate step.
    pub alpha: f64,
    /// Potential step.
    pub beta: f64,
    /// Multiplier step.
    pub gamma: f64,
    pub gains: Gains,
    pub iterations: usize,
    /// Trace every this many steps; 0 disables the trace.
    pub record_every: usize,
    /// Starting rate in elastic mode.
    pub initial_rate: f64,
}

impl PDParams {
    /// `beta = 20 alpha`, `gamma = 1000 alpha`.
    pub fn with_alpha(alpha: f64, iterations: usize) -> Self {
        PDParams { alpha, beta: 20.0 * alpha, gamma: 1e3 * alpha, iterations, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.gains;
        let pos = [self.alpha, self.beta, self.gamma, g.k, g.h, g.m, g.k_rate, g.m_rate, self.initial_rate];
        if pos.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("step sizes and gains must be positive: {self:?}")))
        }
    }

    /// Step times gain for each block, the gains of the continuous system
    /// that one discrete step integrates over unit time.
    pub fn effective_gains(&self) -> Gains {
        let g = &self.gains;
        Gains {
            k: self.alpha * g.k,
            h: self.beta * g.h,
            m: self.gamma * g.m,
            k_rate: self.alpha * g.k_rate,
            m_rate: self.gamma * g.m_rate,
        }
    }
}

impl Default for PDParams {
    fn default() -> Self {
        PDParams {
            alpha: 1e-3,
            beta: 2e-2,
            gamma: 1.0,
            gains: Gains::default(),
            iterations: 20_000,
            record_every: 10,
            initial_rate: 1.0,
        }
    }
}

/// Concave increasing utility of an elastic rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Utility {
    /// `w ln(1 + R)`
    LogOnePlus { w: f64 },
    /// `w ln R`
    Log { w: f64 },
}

/// Smallest rate at which a logarithmic utility is evaluated.
const RATE_FLOOR: f64 = 1e-9;

impl Utility {
    pub fn validate(&self) -> Result<()> {
        let w = match *self {
            Utility::LogOnePlus { w } | Utility::Log { w } => w,
        };
        if w > 0.0 && w.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("utility weight {w} must be positive")))
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Utility::LogOnePlus { w } => w * (1.0 + r.max(0.0)).ln(),
            Utility::Log { w } => w * r.max(RATE_FLOOR).ln(),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            Utility::LogOnePlus { w } => w / (1.0 + r.max(0.0)),
            Utility::Log { w } => w / r.max(RATE_FLOOR),
        }
    }
}

/// Fixed rate or utility-driven rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Demand {
    Fixed(f64),
    Elastic(Utility),
}

/// A convex multicast instance; arc capacities are ignored.
#[derive(Clone, Debug)]
pub struct PDProblem<'a> {
    pub net: &'a Network,
    pub source: usize,
    pub sinks: Vec<usize>,
    pub costs: &'a ConvexCost,
    pub demand: Demand,
}

impl<'a> PDProblem<'a> {
    pub fn fixed(net: &'a Network, req: &MulticastRequest, costs: &'a ConvexCost) -> Result<Self> {
        let p = PDProblem { net, source: req.source, sinks: req.sinks.clone(), costs, demand: Demand::Fixed(req.rate) };
        p.validate()?;
        Ok(p)
    }

    pub fn elastic(net: &'a Network, source: usize, sinks: &[usize], costs: &'a ConvexCost, utility: Utility) -> Result<Self> {
        utility.validate()?;
        // The request constructor checks the endpoints; its rate is unused.
        let req = MulticastRequest::new(net.node_count(), source, sinks, 1.0)?;
        let p = PDProblem { net, source, sinks: req.sinks, costs, demand: Demand::Elastic(utility) };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.costs.len() != self.net.arc_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} cost functions, got {}",
                self.net.arc_count(),
                self.costs.len()
            )));
        }
        if self.costs.smoothing < 2 {
            return Err(Error::InvalidArgument("smoothing exponent must be at least 2".into()));
        }
        Ok(())
    }

    pub fn is_elastic(&self) -> bool {
        matches!(self.demand, Demand::Elastic(_))
    }

    /// Supply of node `i` towards sink index `k` at rate `r`.
    pub fn sigma(&self, i: usize, k: usize, r: f64) -> f64 {
        if i == self.source {
            r
        } else if i == self.sinks[k] {
            -r
        } else {
            0.0
        }
    }
}

/// Flows, node potentials and multipliers, all indexed `[sink][..]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PDState {
    pub x: FlowSet,
    pub p: Vec<Vec<f64>>,
    pub lambda: Vec<Vec<f64>>,
    /// Current rate in elastic mode.
    pub rate: Option<f64>,
    pub lambda_rate: f64,
}

impl PDState {
    /// All-zero flows, potentials and multipliers.
    pub fn initial(problem: &PDProblem<'_>, params: &PDParams) -> Self {
        let k = problem.sinks.len();
        let arcs = problem.net.arc_count();
        PDState {
            x: FlowSet::zeros(&problem.sinks, arcs),
            p: vec![vec![0.0; problem.net.node_count()]; k],
            lambda: vec![vec![0.0; arcs]; k],
            rate: problem.is_elastic().then_some(params.initial_rate),
            lambda_rate: 0.0,
        }
    }

    /// Rate used for the supplies: the fixed demand or the elastic state.
    pub fn current_rate(&self, problem: &PDProblem<'_>) -> f64 {
        match problem.demand {
            Demand::Fixed(r) => r,
            Demand::Elastic(_) => self.rate.unwrap_or(0.0),
        }
    }

    pub fn min_lambda(&self) -> f64 {
        self.lambda.iter().flatten().copied().fold(self.lambda_rate, f64::min)
    }
}
