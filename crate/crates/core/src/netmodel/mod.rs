//! Network data model: wireline graphs, wireless hypernetworks, multicast
//! requests, subgraphs, flows, cost models, random instances and file I/O.

mod cost;
mod generate;
mod hyper;
pub mod io;
mod network;
mod request;
mod subgraph;

pub use cost::{ConvexCost, ConvexFamily, CostModel};
pub use generate::{
    build_from_positions, build_geometric_network, place_uniform, random_wireline, GeometricParams, LinkModel,
    WirelineParams,
};
pub use hyper::{Hyperarc, Hypernetwork, PseudoArc, ReceptionMap};
pub use network::{Arc, Network};
pub use request::MulticastRequest;
pub use subgraph::{
    conservation_residual, merge_flows_to_subgraph, quantize_subgraph, FlowSet, HyperFlowSet, Subgraph,
};

/// Round `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

/// Render a float with 12 significant digits in its shortest form.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round_sig(x, 12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(9.5), "9.5");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(123456789.123456789), "123456789.123");
    }
}
