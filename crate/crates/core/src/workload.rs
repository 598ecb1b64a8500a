//! Seeded workload traces: Poisson arrivals with burst windows, per-class
//! demand and duration drawn from zero-truncated normals.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RequestClass, ResourceVector, ServiceRequest};

/// Shape of the arrival-rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Constant `base_rate`; burst windows are ignored.
    Steady,
    /// `base_rate * burst_multiplier` inside each window (square pulses).
    Bursty,
    /// Triangular spikes: the rate ramps linearly from `base_rate` up to the
    /// full multiplier at a window's midpoint and back down by its end.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstWindow {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandDistribution {
    pub mean: ResourceVector,
    pub stddev: ResourceVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassDemand {
    pub sensitive: DemandDistribution,
    pub scalable: DemandDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationDistribution {
    pub mean: f64,
    pub stddev: f64,
}

/// Response-time allowance on top of a request's own service duration.
/// A request's latency target is `service_duration + slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencySlack {
    pub sensitive: f64,
    pub scalable: f64,
}

impl Default for LatencySlack {
    fn default() -> Self {
        Self {
            sensitive: 0.010,
            scalable: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub pattern: Pattern,
    /// Requests per second outside bursts.
    pub base_rate: f64,
    pub burst_multiplier: f64,
    #[serde(default)]
    pub burst_windows: Vec<BurstWindow>,
    pub sensitive_fraction: f64,
    pub demand: ClassDemand,
    pub duration: DurationDistribution,
    #[serde(default)]
    pub latency_slack: LatencySlack,
    /// Seconds.
    pub horizon: f64,
    pub seed: u64,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            alloc::format!("must be > 0, got {v}"),
        ))
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        positive("base_rate", self.base_rate)?;
        positive("horizon", self.horizon)?;
        if !(self.burst_multiplier.is_finite() && self.burst_multiplier >= 1.0) {
            return Err(Error::invalid("burst_multiplier", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.sensitive_fraction) {
            return Err(Error::invalid("sensitive_fraction", "must be in [0, 1]"));
        }
        let mut windows = self.burst_windows.clone();
        windows.sort_by(|a, b| a.start.total_cmp(&b.start));
        for (i, w) in windows.iter().enumerate() {
            if !(w.start >= 0.0 && w.start < w.end && w.end <= self.horizon) {
                return Err(Error::invalid(
                    "burst_windows",
                    alloc::format!(
                        "window [{}, {}) must satisfy 0 <= start < end <= horizon",
                        w.start,
                        w.end
                    ),
                ));
            }
            if i > 0 && windows[i - 1].end > w.start {
                return Err(Error::invalid("burst_windows", "windows overlap"));
            }
        }
        for (name, d) in [
            ("demand.sensitive", &self.demand.sensitive),
            ("demand.scalable", &self.demand.scalable),
        ] {
            if !d.mean.is_positive() {
                return Err(Error::invalid(
                    alloc::format!("{name}.mean"),
                    "every component must be > 0",
                ));
            }
            d.stddev
                .validate_non_negative(&alloc::format!("{name}.stddev"))?;
        }
        positive("duration.mean", self.duration.mean)?;
        if !(self.duration.stddev.is_finite() && self.duration.stddev >= 0.0) {
            return Err(Error::invalid("duration.stddev", "must be >= 0"));
        }
        positive("latency_slack.sensitive", self.latency_slack.sensitive)?;
        positive("latency_slack.scalable", self.latency_slack.scalable)?;
        Ok(())
    }

    /// Instantaneous arrival rate at time `t`.
    pub fn rate_at(&self, t: f64) -> f64 {
        if self.pattern == Pattern::Steady {
            return self.base_rate;
        }
        let Some(w) = self
            .burst_windows
            .iter()
            .find(|w| t >= w.start && t < w.end)
        else {
            return self.base_rate;
        };
        let extra = self.burst_multiplier - 1.0;
        match self.pattern {
            Pattern::Bursty => self.base_rate * self.burst_multiplier,
            Pattern::Mixed => {
                let half = (w.end - w.start) / 2.0;
                let dist = (t - (w.start + half)).abs();
                self.base_rate * (1.0 + extra * (1.0 - dist / half))
            }
            Pattern::Steady => unreachable!(),
        }
    }

    fn peak_rate(&self) -> f64 {
        match self.pattern {
            Pattern::Steady => self.base_rate,
            _ if self.burst_windows.is_empty() => self.base_rate,
            _ => self.base_rate * self.burst_multiplier,
        }
    }
}

/// A validated, time-ordered list of requests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    /// The spec the trace was generated from, when known.
    pub spec: Option<WorkloadSpec>,
    requests: Vec<ServiceRequest>,
}

impl Trace {
    /// Build a trace, checking per-request contracts, id order and arrival order.
    pub fn new(spec: Option<WorkloadSpec>, requests: Vec<ServiceRequest>) -> Result<Self> {
        for (i, r) in requests.iter().enumerate() {
            r.validate().map_err(|e| match e {
                Error::Invalid { field, reason } => {
                    Error::invalid(alloc::format!("requests[{i}].{field}"), reason)
                }
                other => other,
            })?;
            if i > 0 {
                let prev = &requests[i - 1];
                if r.id <= prev.id {
                    return Err(Error::invalid(
                        alloc::format!("requests[{i}].id"),
                        "ids must be strictly increasing",
                    ));
                }
                if r.arrival_time < prev.arrival_time {
                    return Err(Error::invalid(
                        alloc::format!("requests[{i}].arrival_time"),
                        "arrivals must be non-decreasing",
                    ));
                }
            }
        }
        Ok(Self { spec, requests })
    }

    pub fn requests(&self) -> &[ServiceRequest] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Spec horizon if known, else the last arrival time.
    pub fn horizon(&self) -> f64 {
        let last = self.requests.last().map_or(0.0, |r| r.arrival_time);
        match &self.spec {
            Some(s) => s.horizon.max(last),
            None => last,
        }
    }
}

fn truncated_sample<R: Rng>(rng: &mut R, mean: f64, stddev: f64, strictly_positive: bool) -> f64 {
    if stddev == 0.0 {
        return mean;
    }
    let normal = Normal::new(mean, stddev).expect("validated stddev");
    loop {
        let v = normal.sample(rng);
        if v > 0.0 || (!strictly_positive && v == 0.0) {
            return v;
        }
    }
}

fn sample_demand<R: Rng>(rng: &mut R, d: &DemandDistribution) -> ResourceVector {
    ResourceVector::new(
        truncated_sample(rng, d.mean.cpu, d.stddev.cpu, false),
        truncated_sample(rng, d.mean.memory, d.stddev.memory, false),
        truncated_sample(rng, d.mean.bandwidth, d.stddev.bandwidth, false),
    )
}

/// Generate a trace from `spec`. Identical specs yield identical traces.
///
/// Arrivals come from a non-homogeneous Poisson process sampled by thinning:
/// candidates at the peak rate, each kept with probability `rate(t) / peak`.
pub fn generate_trace(spec: &WorkloadSpec) -> Result<Trace> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let peak = spec.peak_rate();
    let gaps = Exp::new(peak).map_err(|_| Error::invalid("base_rate", "bad rate"))?;

    let mut requests = Vec::new();
    let mut t = 0.0;
    let mut next_id = 0u64;
    loop {
        t += gaps.sample(&mut rng);
        if t >= spec.horizon {
            break;
        }
        let rate = spec.rate_at(t);
        if rate < peak && rng.random::<f64>() * peak >= rate {
            continue;
        }
        let class = if rng.random_bool(spec.sensitive_fraction) {
            RequestClass::Sensitive
        } else {
            RequestClass::Scalable
        };
        let (dist, slack) = match class {
            RequestClass::Sensitive => (&spec.demand.sensitive, spec.latency_slack.sensitive),
            RequestClass::Scalable => (&spec.demand.scalable, spec.latency_slack.scalable),
        };
        let demand = sample_demand(&mut rng, dist);
        let duration = truncated_sample(&mut rng, spec.duration.mean, spec.duration.stddev, true);
        requests.push(ServiceRequest {
            id: next_id,
            arrival_time: t,
            class,
            demand,
            service_duration: duration,
            latency_target: duration + slack,
        });
        next_id += 1;
    }
    Trace::new(Some(spec.clone()), requests)
}

/// Named workload archetypes. Parameter values are illustrative defaults,
/// not measurements of any real system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    /// Many small, short requests; sharp sale-event bursts.
    ECommerce,
    /// Fewer, long and memory-heavy batch queries; mostly steady.
    Analytics,
    /// Compute-heavy inference with ramped spikes.
    MlInference,
}

impl Archetype {
    pub fn spec(self, horizon: f64, seed: u64) -> WorkloadSpec {
        let third = horizon / 3.0;
        let window = |s: f64, len: f64| BurstWindow {
            start: s,
            end: (s + len).min(horizon),
        };
        match self {
            Archetype::ECommerce => WorkloadSpec {
                pattern: Pattern::Bursty,
                base_rate: 4.0,
                burst_multiplier: 3.0,
                burst_windows: alloc::vec![
                    window(third, horizon / 12.0),
                    window(2.0 * third, horizon / 12.0)
                ],
                sensitive_fraction: 0.3,
                demand: ClassDemand {
                    sensitive: DemandDistribution {
                        mean: ResourceVector::new(0.5, 1.0, 20.0),
                        stddev: ResourceVector::new(0.1, 0.25, 5.0),
                    },
                    scalable: DemandDistribution {
                        mean: ResourceVector::new(1.0, 2.0, 40.0),
                        stddev: ResourceVector::new(0.25, 0.5, 10.0),
                    },
                },
                duration: DurationDistribution {
                    mean: 5.0,
                    stddev: 1.5,
                },
                latency_slack: LatencySlack::default(),
                horizon,
                seed,
            },
            Archetype::Analytics => WorkloadSpec {
                pattern: Pattern::Steady,
                base_rate: 0.5,
                burst_multiplier: 1.0,
                burst_windows: Vec::new(),
                sensitive_fraction: 0.1,
                demand: ClassDemand {
                    sensitive: DemandDistribution {
                        mean: ResourceVector::new(2.0, 16.0, 50.0),
                        stddev: ResourceVector::new(0.5, 4.0, 10.0),
                    },
                    scalable: DemandDistribution {
                        mean: ResourceVector::new(4.0, 32.0, 100.0),
                        stddev: ResourceVector::new(1.0, 8.0, 20.0),
                    },
                },
                duration: DurationDistribution {
                    mean: 60.0,
                    stddev: 20.0,
                },
                latency_slack: LatencySlack {
                    sensitive: 0.010,
                    scalable: 30.0,
                },
                horizon,
                seed,
            },
            Archetype::MlInference => WorkloadSpec {
                pattern: Pattern::Mixed,
                base_rate: 2.0,
                burst_multiplier: 4.0,
                burst_windows: alloc::vec![window(third, third / 2.0)],
                sensitive_fraction: 0.2,
                demand: ClassDemand {
                    sensitive: DemandDistribution {
                        mean: ResourceVector::new(2.0, 4.0, 10.0),
                        stddev: ResourceVector::new(0.5, 1.0, 2.0),
                    },
                    scalable: DemandDistribution {
                        mean: ResourceVector::new(4.0, 8.0, 20.0),
                        stddev: ResourceVector::new(1.0, 2.0, 5.0),
                    },
                },
                duration: DurationDistribution {
                    mean: 3.0,
                    stddev: 1.0,
                },
                latency_slack: LatencySlack::default(),
                horizon,
                seed,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn base_spec() -> WorkloadSpec {
        WorkloadSpec {
            pattern: Pattern::Bursty,
            base_rate: 10.0,
            burst_multiplier: 1.0,
            burst_windows: alloc::vec![BurstWindow {
                start: 200.0,
                end: 400.0
            }],
            sensitive_fraction: 0.3,
            demand: ClassDemand {
                sensitive: DemandDistribution {
                    mean: ResourceVector::new(1.0, 2.0, 10.0),
                    stddev: ResourceVector::new(0.5, 1.0, 5.0),
                },
                scalable: DemandDistribution {
                    mean: ResourceVector::new(2.0, 4.0, 20.0),
                    stddev: ResourceVector::new(1.0, 2.0, 10.0),
                },
            },
            duration: DurationDistribution {
                mean: 2.0,
                stddev: 2.0,
            },
            latency_slack: LatencySlack::default(),
            horizon: 1000.0,
            seed: 7,
        }
    }

    #[test]
    fn deterministic() {
        let s = base_spec();
        assert_eq!(generate_trace(&s).unwrap(), generate_trace(&s).unwrap());
        let other = WorkloadSpec {
            seed: 8,
            ..s.clone()
        };
        assert_ne!(generate_trace(&s).unwrap(), generate_trace(&other).unwrap());
    }

    #[test]
    fn ordered_and_positive() {
        let t = generate_trace(&base_spec()).unwrap();
        for w in t.requests().windows(2) {
            assert!(w[1].id > w[0].id);
            assert!(w[1].arrival_time >= w[0].arrival_time);
        }
        for r in t.requests() {
            assert!(r.service_duration > 0.0);
            assert!(r.demand.is_non_negative());
            assert!(r.arrival_time < 1000.0);
        }
    }

    #[test]
    fn all_sensitive() {
        let s = WorkloadSpec {
            sensitive_fraction: 1.0,
            ..base_spec()
        };
        let t = generate_trace(&s).unwrap();
        assert!(!t.is_empty());
        assert!(t
            .requests()
            .iter()
            .all(|r| r.class == RequestClass::Sensitive));
    }

    #[test]
    fn poisson_count_matches_expectation() {
        // 10/s over 1000 s, averaged over 20 seeds, counted directly.
        let mut total = 0usize;
        for seed in 0..20 {
            let s = WorkloadSpec {
                pattern: Pattern::Steady,
                burst_windows: Vec::new(),
                seed,
                ..base_spec()
            };
            total += generate_trace(&s).unwrap().len();
        }
        let mean = total as f64 / 20.0;
        assert!((mean - 10_000.0).abs() <= 500.0, "mean count {mean}");
    }

    #[test]
    fn multiplier_one_keeps_rate_inside_windows() {
        // 200 s window vs 800 s outside; with multiplier 1 the per-second rates agree.
        let mut inside = 0usize;
        let mut outside = 0usize;
        for seed in 0..10 {
            let t = generate_trace(&WorkloadSpec {
                seed,
                ..base_spec()
            })
            .unwrap();
            for r in t.requests() {
                if (200.0..400.0).contains(&r.arrival_time) {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
        let rin = inside as f64 / (10.0 * 200.0);
        let rout = outside as f64 / (10.0 * 800.0);
        // 5 sigma of a Poisson count of ~20_000 is ~0.1 req/s here.
        assert!((rin - rout).abs() < 0.25, "{rin} vs {rout}");
    }

    #[test]
    fn bursts_raise_rate() {
        let s = WorkloadSpec {
            burst_multiplier: 3.0,
            ..base_spec()
        };
        let t = generate_trace(&s).unwrap();
        let inside = t
            .requests()
            .iter()
            .filter(|r| (200.0..400.0).contains(&r.arrival_time))
            .count() as f64
            / 200.0;
        assert!((inside - 30.0).abs() < 3.0, "{inside}");
    }

    #[test]
    fn sensitive_fraction_tracks_spec() {
        let t = generate_trace(&base_spec()).unwrap();
        assert!(t.len() >= 10_000 - 500);
        let frac = t
            .requests()
            .iter()
            .filter(|r| r.class == RequestClass::Sensitive)
            .count() as f64
            / t.len() as f64;
        assert!((frac - 0.3).abs() <= 0.03, "{frac}");
    }

    #[test]
    fn validation_names_field() {
        let s = WorkloadSpec {
            base_rate: -1.0,
            ..base_spec()
        };
        assert!(
            matches!(generate_trace(&s), Err(Error::Invalid { field, .. }) if field == "base_rate")
        );
        let s = WorkloadSpec {
            burst_windows: alloc::vec![
                BurstWindow {
                    start: 10.0,
                    end: 50.0
                },
                BurstWindow {
                    start: 40.0,
                    end: 60.0
                }
            ],
            ..base_spec()
        };
        assert!(
            matches!(s.validate(), Err(Error::Invalid { field, .. }) if field == "burst_windows")
        );
        let s = WorkloadSpec {
            burst_windows: alloc::vec![BurstWindow {
                start: 900.0,
                end: 1100.0
            }],
            ..base_spec()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn mixed_ramps_peak_at_midpoint() {
        let s = WorkloadSpec {
            pattern: Pattern::Mixed,
            burst_multiplier: 3.0,
            ..base_spec()
        };
        assert_eq!(s.rate_at(100.0), 10.0);
        assert!((s.rate_at(300.0) - 30.0).abs() < 1e-9);
        assert!((s.rate_at(250.0) - 20.0).abs() < 1e-9);
    }

    #[test]
    fn archetypes_validate() {
        for a in [
            Archetype::ECommerce,
            Archetype::Analytics,
            Archetype::MlInference,
        ] {
            a.spec(3600.0, 1).validate().unwrap();
        }
    }

    #[test]
    fn trace_rejects_unsorted() {
        let t = generate_trace(&base_spec()).unwrap();
        let mut reqs = t.requests().to_vec();
        reqs.swap(0, 1);
        assert!(Trace::new(None, reqs).is_err());
    }
}
