//! Tick-driven hybrid-cloud engine.
//!
//! Each tick runs a fixed sequence: complete finished work, apply ready
//! provisions, admit and route arrivals, drain the FIFO queue, ask the
//! policy for a scaling action, enact it, bill provisioned capacity, record a
//! monitoring sample, and (when training) update the Q-table. Any other
//! order changes results, so it is part of the contract.

mod metrics;

pub use metrics::{
    cost_efficiency, latency_metric, percentile, scalability_metric, MetricsReport, TierUtilization,
};

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use serde::{Deserialize, Serialize};

use crate::allocator::{
    compute_reward, route_request, Decision, PolicyKind, RewardInputs, RewardWeights, Route,
    ScaleAction,
};
use crate::error::{Error, Result};
use crate::forecast::DemandModel;
use crate::model::{
    CloudTier, Constraints, RequestClass, ResourceVector, ServiceRequest, TierKind,
};
use crate::pipeline::RawSample;
use crate::workload::Trace;

const SECONDS_PER_HOUR: f64 = 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivateTierConfig {
    pub capacity: ResourceVector,
    /// Price per core-hour, GiB-hour and Mbps-hour.
    pub unit_cost: ResourceVector,
    #[serde(default)]
    pub base_latency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublicTierConfig {
    /// Capacity added or removed by one scaling step.
    pub instance_unit: ResourceVector,
    pub unit_cost: ResourceVector,
    #[serde(default)]
    pub base_latency: f64,
    #[serde(default = "default_provision_delay")]
    pub provision_delay: f64,
    #[serde(default)]
    pub initial_units: u32,
    pub max_units: u32,
}

fn default_provision_delay() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default = "default_tick")]
    pub tick: f64,
    pub private: PrivateTierConfig,
    pub public: PublicTierConfig,
    #[serde(default)]
    pub constraints: Constraints,
    /// Bound on queued scalable requests; overflow is rejected.
    #[serde(default = "default_queue_capacity")]
    pub queue_capacity: usize,
    /// Seconds past the trace horizon allowed for in-flight work to finish.
    #[serde(default = "default_drain_limit")]
    pub drain_limit: f64,
    /// Weights for the logged per-tick reward of non-learning policies.
    #[serde(default)]
    pub reward: RewardWeights,
    /// Ticks between policy decisions; the ticks in between hold.
    #[serde(default = "default_decision_interval")]
    pub decision_interval: u32,
    /// Exploration seed for training runs.
    #[serde(default)]
    pub seed: u64,
}

fn default_tick() -> f64 {
    1.0
}
fn default_queue_capacity() -> usize {
    1000
}
fn default_drain_limit() -> f64 {
    3600.0
}
fn default_decision_interval() -> u32 {
    1
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return Err(Error::invalid("tick", "must be > 0"));
        }
        if !self.public.instance_unit.is_positive() {
            return Err(Error::invalid(
                "public.instance_unit",
                "every component must be > 0",
            ));
        }
        if self.public.initial_units > self.public.max_units {
            return Err(Error::invalid("public.initial_units", "exceeds max_units"));
        }
        if !(self.drain_limit.is_finite() && self.drain_limit >= 0.0) {
            return Err(Error::invalid("drain_limit", "must be >= 0"));
        }
        if self.decision_interval == 0 {
            return Err(Error::invalid("decision_interval", "must be >= 1"));
        }
        self.constraints.validate()?;
        self.reward.validate()?;
        self.build_tiers(self.public.initial_units)?;
        Ok(())
    }

    fn build_tiers(&self, public_units: u32) -> Result<(CloudTier, CloudTier)> {
        let private = CloudTier::new(
            TierKind::Private,
            self.private.capacity,
            self.private.unit_cost,
            0.0,
            self.private.base_latency,
        )?;
        let public = CloudTier::new(
            TierKind::Public,
            self.public.instance_unit.scale(f64::from(public_units)),
            self.public.unit_cost,
            self.public.provision_delay,
            self.public.base_latency,
        )?;
        Ok((private, public))
    }
}

/// Training updates the Q-table and explores; evaluation acts greedily.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Evaluate,
}

/// One row of the per-tick history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub clock: f64,
    pub private_util: ResourceVector,
    pub public_util: ResourceVector,
    pub public_units: u32,
    pub queue_len: u64,
    pub arrivals: u64,
    pub completions: u64,
    pub rejections: u64,
    pub tick_cost: f64,
    pub reward: f64,
    pub action: ScaleAction,
}

/// Engine counters and occupancy at the end of a tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickSnapshot {
    pub tick: u64,
    pub clock: f64,
    pub generated: u64,
    pub completed: u64,
    pub running: u64,
    pub queued: u64,
    pub rejected: u64,
    pub private_capacity: ResourceVector,
    pub private_allocated: ResourceVector,
    pub public_capacity: ResourceVector,
    pub public_allocated: ResourceVector,
    pub sensitive_on_public: u64,
}

/// A finished request as recorded by the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completion {
    pub id: u64,
    pub class: RequestClass,
    pub tier: TierKind,
    pub start: f64,
    pub finish: f64,
    pub response_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub report: MetricsReport,
    pub ticks: Vec<TickRecord>,
    /// Monitoring series for the preprocessing pipeline.
    pub samples: Vec<RawSample>,
    pub completions: Vec<Completion>,
    /// Mean per-tick reward.
    pub mean_reward: f64,
}

#[derive(Debug, Clone, Copy)]
struct Running {
    finish: f64,
    id: u64,
    arrival: f64,
    start: f64,
    class: RequestClass,
    tier: TierKind,
    demand: ResourceVector,
    latency_target: f64,
}

impl PartialEq for Running {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Running {}
impl PartialOrd for Running {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Running {
    fn cmp(&self, other: &Self) -> Ordering {
        self.finish
            .total_cmp(&other.finish)
            .then(self.id.cmp(&other.id))
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct TickStats {
    arrivals: u64,
    completions: u64,
    rejections: u64,
    sensitive_rejections: u64,
    response_sum: f64,
    /// Admitted straight on arrival (not via the queue).
    direct: u64,
    direct_violations: u64,
    direct_latency_sum: f64,
    direct_target_sum: f64,
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    clock: f64,
    private: CloudTier,
    public: CloudTier,
    public_units: u32,
    pending_units: u32,
    pending: VecDeque<(f64, u32)>,
    queue: VecDeque<ServiceRequest>,
    running: BinaryHeap<Reverse<Running>>,
    generated: u64,
    completed: [u64; 2],
    rejected: [u64; 2],
    admitted_sensitive: u64,
    sensitive_on_public: u64,
    sla_violations: u64,
    response_total: f64,
    completions: Vec<Completion>,
    stats: TickStats,
}

impl Engine<'_> {
    fn start(&mut self, r: &ServiceRequest, tier: TierKind, from_queue: bool) {
        let t = match tier {
            TierKind::Private => &mut self.private,
            TierKind::Public => &mut self.public,
        };
        t.allocate(&r.demand).expect("routing checked capacity");
        let latency = t.base_latency;
        if r.class == RequestClass::Sensitive {
            assert_eq!(
                tier,
                TierKind::Private,
                "sensitive request {} placed on public tier",
                r.id
            );
            self.admitted_sensitive += 1;
        }
        let start = self.clock.max(r.arrival_time);
        let finish = start + r.service_duration + latency;
        let response = finish - r.arrival_time;
        if !from_queue {
            self.stats.direct += 1;
            self.stats.direct_latency_sum += response;
            self.stats.direct_target_sum += r.latency_target;
            if response > r.latency_target {
                self.stats.direct_violations += 1;
            }
        }
        self.running.push(Reverse(Running {
            finish,
            id: r.id,
            arrival: r.arrival_time,
            start,
            class: r.class,
            tier,
            demand: r.demand,
            latency_target: r.latency_target,
        }));
    }

    fn reject(&mut self, r: &ServiceRequest) {
        self.rejected[r.class.index()] += 1;
        self.stats.rejections += 1;
        if r.class == RequestClass::Sensitive {
            self.stats.sensitive_rejections += 1;
        }
    }

    fn complete_due(&mut self) {
        while let Some(Reverse(top)) = self.running.peek() {
            if top.finish > self.clock {
                break;
            }
            let done = self.running.pop().expect("peeked").0;
            let tier = match done.tier {
                TierKind::Private => &mut self.private,
                TierKind::Public => &mut self.public,
            };
            tier.release(&done.demand)
                .expect("released demand was allocated");
            let response = done.finish - done.arrival;
            self.completed[done.class.index()] += 1;
            self.response_total += response;
            if response > done.latency_target {
                self.sla_violations += 1;
            }
            if done.class == RequestClass::Sensitive && done.tier == TierKind::Public {
                self.sensitive_on_public += 1;
            }
            self.stats.completions += 1;
            self.stats.response_sum += response;
            self.completions.push(Completion {
                id: done.id,
                class: done.class,
                tier: done.tier,
                start: done.start,
                finish: done.finish,
                response_time: response,
            });
        }
    }

    fn public_capacity(&self, units: u32) -> ResourceVector {
        self.cfg.public.instance_unit.scale(f64::from(units))
    }

    fn apply_ready_provisions(&mut self) {
        while let Some(&(ready, units)) = self.pending.front() {
            if ready > self.clock {
                break;
            }
            self.pending.pop_front();
            self.pending_units -= units;
            self.public_units += units;
            let cap = self.public_capacity(self.public_units);
            self.public.set_capacity(cap).expect("growing capacity");
        }
    }

    fn admit(&mut self, r: &ServiceRequest) {
        self.generated += 1;
        self.stats.arrivals += 1;
        match route_request(r, &self.private, &self.public) {
            Route::Private => self.start(r, TierKind::Private, false),
            Route::Public => self.start(r, TierKind::Public, false),
            Route::Reject => {
                if r.class == RequestClass::Scalable && self.queue.len() < self.cfg.queue_capacity {
                    self.queue.push_back(*r);
                } else {
                    self.reject(r);
                }
            }
        }
    }

    fn drain_queue(&mut self) {
        while let Some(head) = self.queue.front().copied() {
            let tier = if self.private.can_host(&head.demand) {
                TierKind::Private
            } else if self.public.can_host(&head.demand) {
                TierKind::Public
            } else {
                break;
            };
            self.queue.pop_front();
            self.start(&head, tier, true);
        }
    }

    fn enact(&mut self, d: Decision) {
        for _ in 0..d.units {
            match d.action {
                ScaleAction::Hold => break,
                ScaleAction::ScaleUpPublic => {
                    if self.public_units + self.pending_units >= self.cfg.public.max_units {
                        break;
                    }
                    self.pending
                        .push_back((self.clock + self.cfg.public.provision_delay, 1));
                    self.pending_units += 1;
                }
                ScaleAction::ScaleDownPublic => {
                    // Cancel capacity still on order before releasing ready units.
                    if let Some((_, units)) = self.pending.pop_back() {
                        self.pending_units -= units;
                        continue;
                    }
                    if self.public_units == 0 {
                        break;
                    }
                    let smaller = self.public_capacity(self.public_units - 1);
                    if self.public.set_capacity(smaller).is_err() {
                        break;
                    }
                    self.public_units -= 1;
                }
            }
        }
    }

    /// Requests this tick's reward is about: those admitted on arrival,
    /// those rejected, and those still waiting. A waiting request is scored
    /// by the response time it has already guaranteed itself (wait so far
    /// plus service), so a growing backlog is penalized while it grows
    /// rather than when it finally drains.
    fn reward_inputs(&self, tick_cost: f64, mean_util: f64) -> RewardInputs {
        let st = &self.stats;
        let horizon = self.clock + self.cfg.tick;
        let mut n = st.direct;
        let mut latency = st.direct_latency_sum;
        let mut target = st.direct_target_sum;
        let mut violations = st.direct_violations + st.rejections;
        for r in &self.queue {
            let projected = horizon - r.arrival_time + r.service_duration;
            n += 1;
            latency += projected;
            target += r.latency_target;
            if projected > r.latency_target {
                violations += 1;
            }
        }
        let (mean_latency, latency_target) = if n > 0 {
            (latency / n as f64, target / n as f64)
        } else {
            (0.0, 0.0)
        };
        RewardInputs {
            tick_cost,
            mean_latency,
            latency_target,
            sla_violations: violations,
            served: n + st.rejections,
            mean_util,
        }
    }

    /// Dominant public utilization against committed capacity (ready plus
    /// on order). `None` while nothing is committed. Counting ordered units
    /// lets a policy see its own scale-up before the capacity is ready.
    fn committed_public_util(&self) -> Option<f64> {
        let committed = self.public_units + self.pending_units;
        (committed > 0).then(|| {
            self.public
                .allocated()
                .ratio(&self.public_capacity(committed))
                .max_component()
        })
    }

    fn running(&self) -> u64 {
        self.running.len() as u64
    }

    fn snapshot(&self, tick: u64) -> TickSnapshot {
        TickSnapshot {
            tick,
            clock: self.clock,
            generated: self.generated,
            completed: self.completed.iter().sum(),
            running: self.running(),
            queued: self.queue.len() as u64,
            rejected: self.rejected.iter().sum(),
            private_capacity: self.private.capacity(),
            private_allocated: self.private.allocated(),
            public_capacity: self.public.capacity(),
            public_allocated: self.public.allocated(),
            sensitive_on_public: self.sensitive_on_public,
        }
    }

    fn check_invariants(&self, s: &TickSnapshot) {
        assert_eq!(
            s.generated,
            s.completed + s.running + s.queued + s.rejected,
            "request conservation broken at t={}",
            s.clock
        );
        assert!(
            s.private_allocated.fits(&s.private_capacity),
            "private over-allocated at t={}",
            s.clock
        );
        assert!(
            s.public_allocated.fits(&s.public_capacity),
            "public over-allocated at t={}",
            s.clock
        );
        assert_eq!(s.sensitive_on_public, 0);
    }
}

/// Run a full trace under `policy`.
pub fn run(
    cfg: &SimConfig,
    trace: &Trace,
    policy: &mut PolicyKind,
    forecaster: Option<&DemandModel>,
    mode: Mode,
) -> Result<SimOutcome> {
    run_observed(cfg, trace, policy, forecaster, mode, |_| {})
}

/// [`run`], calling `observe` with the engine's counters after every tick.
pub fn run_observed(
    cfg: &SimConfig,
    trace: &Trace,
    policy: &mut PolicyKind,
    forecaster: Option<&DemandModel>,
    mode: Mode,
    mut observe: impl FnMut(&TickSnapshot),
) -> Result<SimOutcome> {
    cfg.validate()?;
    let initial_units = match policy {
        PolicyKind::Static { units } => *units,
        _ => cfg.public.initial_units,
    };
    match policy {
        PolicyKind::Threshold(p) => {
            p.validate()?;
            p.reset();
        }
        PolicyKind::QLearning(agent) => {
            agent.validate()?;
            if mode == Mode::Train {
                agent.table.reseed(cfg.seed);
            }
        }
        PolicyKind::Static { .. } => {}
    }
    let (private, public) = cfg.build_tiers(initial_units)?;
    let mut eng = Engine {
        cfg,
        clock: 0.0,
        private,
        public,
        public_units: initial_units,
        pending_units: 0,
        pending: VecDeque::new(),
        queue: VecDeque::new(),
        running: BinaryHeap::new(),
        generated: 0,
        completed: [0; 2],
        rejected: [0; 2],
        admitted_sensitive: 0,
        sensitive_on_public: 0,
        sla_violations: 0,
        response_total: 0.0,
        completions: Vec::new(),
        stats: TickStats::default(),
    };

    let requests = trace.requests();
    let horizon = trace.horizon();
    let mut next = 0usize;
    let mut ticks = Vec::new();
    let mut samples: Vec<RawSample> = Vec::new();
    let mut total_cost = 0.0;
    let mut reward_sum = 0.0;
    let mut private_util_sum = 0.0;
    let mut public_util_sum = 0.0;
    let mut public_ticks = 0u64;
    let mut peak_units = initial_units;
    // (state, action, summed reward, ticks) of the decision in force.
    let mut pending_transition: Option<(usize, usize, f64, u32)> = None;
    let mut k: u64 = 0;

    loop {
        eng.clock = k as f64 * cfg.tick;
        let idle = next == requests.len() && eng.running.is_empty() && eng.queue.is_empty();
        if (eng.clock >= horizon && idle) || eng.clock >= horizon + cfg.drain_limit {
            break;
        }
        eng.stats = TickStats::default();

        // 1. completions
        eng.complete_due();
        // 2. provisioning that became ready
        eng.apply_ready_provisions();
        // 3. arrivals
        let window_end = eng.clock + cfg.tick;
        while next < requests.len() && requests[next].arrival_time < window_end {
            let r = requests[next];
            eng.admit(&r);
            next += 1;
        }
        // 4. FIFO drain
        eng.drain_queue();

        // 5. observe and decide
        let mut state = None;
        let decision = if !k.is_multiple_of(u64::from(cfg.decision_interval)) {
            Decision::HOLD
        } else {
            let private_util = eng.private.utilization().max_component();
            let public_util = eng.committed_public_util();
            match policy {
                PolicyKind::Static { .. } => Decision::HOLD,
                PolicyKind::Threshold(p) => p.step(private_util, public_util, eng.clock),
                PolicyKind::QLearning(agent) => {
                    let forecast = forecaster
                        .and_then(|m| m.forecast_from_history(&samples))
                        .map(|f| f.utilization.max_component())
                        .or_else(|| samples.last().map(|s| s.utilization.max_component()))
                        .unwrap_or(0.0);
                    let code = agent.space.encode(
                        private_util,
                        public_util.unwrap_or(1.0),
                        forecast,
                        eng.queue.len(),
                    );
                    let s = agent.space.index(&code);
                    let a = match mode {
                        Mode::Train => agent.table.choose(s),
                        Mode::Evaluate => agent.table.greedy(s),
                    };
                    state = Some((s, a));
                    Decision::single(ScaleAction::from_index(a).expect("three actions"))
                }
            }
        };

        // 6. enact
        eng.enact(decision);
        peak_units = peak_units.max(eng.public_units);

        // 7. billing on provisioned capacity
        let tick_cost =
            (eng.private.hourly_cost() + eng.public.hourly_cost()) * cfg.tick / SECONDS_PER_HOUR;
        total_cost += tick_cost;

        // 8. monitoring sample
        let queued = eng
            .queue
            .iter()
            .fold(ResourceVector::ZERO, |acc, r| acc + r.demand);
        let load = (eng.private.allocated() + eng.public.allocated() + queued)
            .ratio(&eng.private.capacity());
        let st = eng.stats;
        samples.push(RawSample {
            timestamp: eng.clock,
            utilization: load,
            request_rate: st.arrivals as f64 / cfg.tick,
            mean_response_time: if st.completions > 0 {
                st.response_sum / st.completions as f64
            } else {
                0.0
            },
            anomaly: st.sensitive_rejections > 0,
        });

        // 9. reward and learning
        let total_cap = eng.private.capacity() + eng.public.capacity();
        let in_use = eng.private.allocated() + eng.public.allocated();
        let inputs = eng.reward_inputs(tick_cost, in_use.ratio(&total_cap).max_component());
        let weights = match policy {
            PolicyKind::QLearning(agent) => agent.reward,
            _ => cfg.reward,
        };
        let reward = compute_reward(&weights, &inputs);
        reward_sum += reward;
        if let (Mode::Train, PolicyKind::QLearning(agent)) = (mode, &mut *policy) {
            if let Some((s, a)) = state {
                if let Some((ps, pa, sum, n)) = pending_transition.take() {
                    agent.table.update(ps, pa, sum / f64::from(n), s)?;
                }
                pending_transition = Some((s, a, 0.0, 0));
            }
            if let Some((_, _, sum, n)) = pending_transition.as_mut() {
                *sum += reward;
                *n += 1;
            }
        }

        let pu = eng.private.utilization();
        private_util_sum += pu.mean_component();
        if eng.public_units > 0 {
            public_util_sum += eng.public.utilization().mean_component();
            public_ticks += 1;
        }
        ticks.push(TickRecord {
            tick: k,
            clock: eng.clock,
            private_util: pu,
            public_util: eng.public.utilization(),
            public_units: eng.public_units,
            queue_len: eng.queue.len() as u64,
            arrivals: st.arrivals,
            completions: st.completions,
            rejections: st.rejections,
            tick_cost,
            reward,
            action: decision.action,
        });

        let snap = eng.snapshot(k);
        eng.check_invariants(&snap);
        observe(&snap);
        k += 1;
    }

    let elapsed = k as f64 * cfg.tick;
    let completed: u64 = eng.completed.iter().sum();
    let rejected: u64 = eng.rejected.iter().sum();
    let latencies: Vec<f64> = eng.completions.iter().map(|c| c.response_time).collect();
    let sens_rej = eng.rejected[RequestClass::Sensitive.index()];
    let availability = if eng.admitted_sensitive + sens_rej == 0 {
        1.0
    } else {
        eng.admitted_sensitive as f64 / (eng.admitted_sensitive + sens_rej) as f64
    };
    let report = MetricsReport {
        total_cost,
        mean_latency: latency_metric(eng.response_total, completed).ok(),
        p95_latency: percentile(&latencies, 95.0),
        throughput: if elapsed > 0.0 {
            completed as f64 / elapsed
        } else {
            0.0
        },
        mean_utilization: TierUtilization {
            private: if k > 0 {
                private_util_sum / k as f64
            } else {
                0.0
            },
            public: if public_ticks > 0 {
                public_util_sum / public_ticks as f64
            } else {
                0.0
            },
        },
        sla_violation_rate: if completed > 0 {
            eng.sla_violations as f64 / completed as f64
        } else {
            0.0
        },
        availability,
        peak_public_units: peak_units,
        requests_generated: eng.generated,
        requests_completed: completed,
        requests_rejected: rejected,
        running_at_end: eng.running(),
        queued_at_end: eng.queue.len() as u64,
        sla_violations: eng.sla_violations,
        sensitive_rejected: sens_rej,
        sensitive_on_public: eng.sensitive_on_public,
        ticks: k,
        elapsed,
        within_cost_budget: cfg.constraints.cost_budget.is_none_or(|b| total_cost <= b),
        meets_availability_target: availability >= cfg.constraints.availability_target,
    };
    Ok(SimOutcome {
        report,
        ticks,
        samples,
        completions: eng.completions,
        mean_reward: if k > 0 { reward_sum / k as f64 } else { 0.0 },
    })
}
