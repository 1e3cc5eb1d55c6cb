use crate::{Error, Result};

/// Rate-`R` multicast from `source` to a nonempty sink set.
#[derive(Clone, Debug, PartialEq)]
pub struct MulticastRequest {
    pub source: usize,
    /// Sorted, distinct, never containing `source`.
    pub sinks: Vec<usize>,
    pub rate: f64,
}

impl MulticastRequest {
    pub fn new(node_count: usize, source: usize, sinks: &[usize], rate: f64) -> Result<Self> {
        let mut sinks = sinks.to_vec();
        sinks.sort_unstable();
        sinks.dedup();
        if sinks.is_empty() {
            return Err(Error::InvalidRequest("sink set is empty".into()));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidRequest(format!("rate must be positive, got {rate}")));
        }
        if source >= node_count {
            return Err(Error::UnknownNode(source.to_string()));
        }
        if let Some(&t) = sinks.iter().find(|&&t| t >= node_count) {
            return Err(Error::UnknownNode(t.to_string()));
        }
        if sinks.contains(&source) {
            return Err(Error::InvalidRequest("source cannot be a sink".into()));
        }
        Ok(MulticastRequest { source, sinks, rate })
    }

    /// Supply of node `i` in the flow towards `sink`: `R` at the source,
    /// `-R` at the sink, zero elsewhere.
    pub fn sigma(&self, i: usize, sink: usize) -> f64 {
        if i == self.source {
            self.rate
        } else if i == sink {
            -self.rate
        } else {
            0.0
        }
    }

    pub fn sink_count(&self) -> usize {
        self.sinks.len()
    }

    /// Conservation tolerance `1e-9 * max(1, R)`.
    pub fn tolerance(&self) -> f64 {
        crate::FEASIBILITY_TOL * self.rate.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MulticastRequest::new(4, 0, &[], 1.0).is_err());
        assert!(MulticastRequest::new(4, 0, &[1], 0.0).is_err());
        assert!(MulticastRequest::new(4, 0, &[0, 1], 1.0).is_err());
        assert!(MulticastRequest::new(4, 0, &[9], 1.0).is_err());
        let r = MulticastRequest::new(4, 0, &[3, 1, 3], 2.0).unwrap();
        assert_eq!(r.sinks, vec![1, 3]);
        assert_eq!(r.sigma(0, 1), 2.0);
        assert_eq!(r.sigma(1, 1), -2.0);
        assert_eq!(r.sigma(3, 1), 0.0);
    }
}
