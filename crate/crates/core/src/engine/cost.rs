//! Analytical cost models for the two operators, in abstract edge-read units.

use serde::{Deserialize, Serialize};

use super::{Depth, EngineError};
use crate::storage::GraphStats;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// `C_e`: cost of reading one edge record.
    pub edge_read_cost: f64,
    /// Average synopsis false-positive rate `p`.
    pub false_positive_rate: f64,
    /// Fragment size `ξ` in edge records.
    pub fragment_size: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            edge_read_cost: 1.0,
            false_positive_rate: 0.01,
            fragment_size: 1024.0,
        }
    }
}

impl CostParams {
    pub fn new(edge_read_cost: f64, false_positive_rate: f64, fragment_size: f64) -> Result<Self, EngineError> {
        let cp = Self {
            edge_read_cost,
            false_positive_rate,
            fragment_size,
        };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.edge_read_cost > 0.0 && self.edge_read_cost.is_finite()) {
            return Err(EngineError::InvalidCostParams(format!(
                "edge read cost must be positive, got {}",
                self.edge_read_cost
            )));
        }
        if !(self.false_positive_rate > 0.0 && self.false_positive_rate < 1.0) {
            return Err(EngineError::InvalidCostParams(format!(
                "false-positive rate must lie in (0, 1), got {}",
                self.false_positive_rate
            )));
        }
        if !(self.fragment_size >= 1.0 && self.fragment_size.is_finite()) {
            return Err(EngineError::InvalidCostParams(format!(
                "fragment size must be at least 1, got {}",
                self.fragment_size
            )));
        }
        Ok(())
    }
}

/// Useful depth: `min(r, δ̃)`, with an unbounded `r` collapsing to `δ̃`.
fn effective_depth(r: Depth, stats: &GraphStats) -> f64 {
    match r {
        Depth::Finite(r) => f64::from(r).min(stats.est_diameter),
        Depth::Unbounded => stats.est_diameter,
    }
}

/// `min(r, δ̃) · |E| · C_e`: one full column scan per level.
pub fn cost_ls(r: Depth, stats: &GraphStats, cp: &CostParams) -> f64 {
    effective_depth(r, stats) * stats.edge_count as f64 * cp.edge_read_cost
}

/// `Σ_{i=0}^{⌊min(r, δ̃)⌋} (1 + p) · d̄^i · ξ · C_e`: one fragment per expected
/// frontier vertex per level, inflated by synopsis false positives.
pub fn cost_fi(r: Depth, stats: &GraphStats, cp: &CostParams) -> f64 {
    let levels = effective_depth(r, stats).floor().max(0.0) as u32;
    let per_fragment = (1.0 + cp.false_positive_rate) * cp.fragment_size * cp.edge_read_cost;
    let mut fanout = 1.0;
    let mut total = 0.0;
    for _ in 0..=levels {
        total += per_fragment * fanout;
        fanout *= stats.avg_outdegree;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(edges: usize, avg: f64, diameter: f64) -> GraphStats {
        GraphStats {
            vertex_count: 1,
            edge_count: edges,
            avg_outdegree: avg,
            max_outdegree: 0,
            est_diameter: diameter,
        }
    }

    fn params(p: f64, xi: f64) -> CostParams {
        CostParams {
            edge_read_cost: 1.0,
            false_positive_rate: p,
            fragment_size: xi,
        }
    }

    #[test]
    fn ls_formula() {
        let cp = CostParams::default();
        assert_eq!(cost_ls(3.into(), &stats(1000, 1.0, 6.5), &cp), 3000.0);
        assert_eq!(cost_ls(Depth::Unbounded, &stats(10, 1.0, 4.0), &cp), 40.0);
        assert_eq!(cost_ls(1.into(), &stats(77, 1.0, 9.0), &cp), 77.0);
        // Non-integral diameter caps the depth.
        assert_eq!(cost_ls(8.into(), &stats(100, 1.0, 2.5), &cp), 250.0);
    }

    #[test]
    fn fi_formula() {
        let c = cost_fi(2.into(), &stats(0, 2.0, 10.0), &params(0.01, 64.0));
        assert!((c - 452.48).abs() < 1e-9, "{c}");
        assert_eq!(cost_fi(0.into(), &stats(0, 5.0, 10.0), &params(0.5, 8.0)), 12.0);
        assert_eq!(cost_fi(3.into(), &stats(0, 1.0, 10.0), &CostParams { false_positive_rate: 0.0, ..params(0.1, 10.0) }), 40.0);
        // Depth floored at the diameter.
        let capped = cost_fi(9.into(), &stats(0, 2.0, 2.7), &params(0.01, 64.0));
        assert!((capped - 452.48).abs() < 1e-9);
    }

    #[test]
    fn linear_in_edge_cost() {
        let s = stats(5000, 3.0, 7.2);
        let base = params(0.05, 128.0);
        let scaled = CostParams {
            edge_read_cost: 3.5,
            ..base
        };
        for r in 1..10 {
            assert!((cost_ls(r.into(), &s, &scaled) - 3.5 * cost_ls(r.into(), &s, &base)).abs() < 1e-6);
            assert!((cost_fi(r.into(), &s, &scaled) - 3.5 * cost_fi(r.into(), &s, &base)).abs() < 1e-6);
        }
    }

    #[test]
    fn validation() {
        assert!(CostParams::new(1.0, 0.01, 64.0).is_ok());
        assert!(CostParams::new(0.0, 0.01, 64.0).is_err());
        assert!(CostParams::new(1.0, 0.0, 64.0).is_err());
        assert!(CostParams::new(1.0, 1.0, 64.0).is_err());
        assert!(CostParams::new(1.0, 0.01, 0.5).is_err());
    }
}
