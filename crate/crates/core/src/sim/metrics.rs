use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean utilization per tier over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TierUtilization {
    pub private: f64,
    /// Averaged over ticks with public capacity provisioned; 0 if there were none.
    pub public: f64,
}

/// End-of-run figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub total_cost: f64,
    /// `None` when nothing completed.
    pub mean_latency: Option<f64>,
    pub p95_latency: Option<f64>,
    /// Completions per second of simulated time.
    pub throughput: f64,
    pub mean_utilization: TierUtilization,
    /// Completed requests whose response time exceeded their target, over completions.
    pub sla_violation_rate: f64,
    /// Sensitive admitted / (admitted + rejected); 1 when no sensitive work arrived.
    pub availability: f64,
    pub peak_public_units: u32,
    pub requests_generated: u64,
    pub requests_completed: u64,
    pub requests_rejected: u64,
    pub running_at_end: u64,
    pub queued_at_end: u64,
    pub sla_violations: u64,
    pub sensitive_rejected: u64,
    pub sensitive_on_public: u64,
    pub ticks: u64,
    pub elapsed: f64,
    pub within_cost_budget: bool,
    pub meets_availability_target: bool,
}

/// Traditional cost over candidate cost; above 1 the candidate is cheaper.
pub fn cost_efficiency(baseline_cost: f64, candidate_cost: f64) -> Result<f64> {
    if candidate_cost.is_nan() || candidate_cost <= 0.0 {
        return Err(Error::NonPositive {
            quantity: "candidate_cost",
            value: candidate_cost,
        });
    }
    Ok(baseline_cost / candidate_cost)
}

/// Total response time over total requests.
pub fn latency_metric(total_response_time: f64, total_requests: u64) -> Result<f64> {
    if total_requests == 0 {
        return Err(Error::Empty("request set"));
    }
    Ok(total_response_time / total_requests as f64)
}

/// Throughput under increased load over throughput under base load.
pub fn scalability_metric(throughput_increased: f64, throughput_base: f64) -> Result<f64> {
    if throughput_base.is_nan() || throughput_base <= 0.0 {
        return Err(Error::NonPositive {
            quantity: "throughput_base",
            value: throughput_base,
        });
    }
    Ok(throughput_increased / throughput_base)
}

/// Nearest-rank percentile of unsorted samples.
pub fn percentile(samples: &[f64], p: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut s = alloc::vec::Vec::from(samples);
    s.sort_by(f64::total_cmp);
    let rank = libm::ceil(p / 100.0 * s.len() as f64) as usize;
    Some(s[rank.clamp(1, s.len()) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1e-300)
    }

    #[test]
    fn cost_efficiency_examples() {
        assert!(close(cost_efficiency(100.0, 100.0).unwrap(), 1.0));
        assert!(close(cost_efficiency(100.0, 80.0).unwrap(), 1.25));
        assert!(close(cost_efficiency(80.0, 100.0).unwrap(), 0.8));
        assert!(cost_efficiency(80.0, 0.0).is_err());
        assert!(cost_efficiency(80.0, -1.0).is_err());
    }

    #[test]
    fn latency_examples() {
        assert!(close(latency_metric(10.0, 100).unwrap(), 0.1));
        assert_eq!(latency_metric(0.0, 5).unwrap(), 0.0);
        assert!(latency_metric(1.0, 0).is_err());
    }

    #[test]
    fn scalability_examples() {
        assert!(close(scalability_metric(50.0, 50.0).unwrap(), 1.0));
        assert!(close(scalability_metric(200.0, 100.0).unwrap(), 2.0));
        assert!(scalability_metric(200.0, 0.0).is_err());
    }

    #[test]
    fn percentile_nearest_rank() {
        let v: alloc::vec::Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(percentile(&v, 95.0), Some(19.0));
        assert_eq!(percentile(&[3.0], 95.0), Some(3.0));
        assert_eq!(percentile(&[], 95.0), None);
    }
}
