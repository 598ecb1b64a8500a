//! Domain types shared by every other module: resource vectors, requests,
//! cloud tiers and operating constraints.

use core::fmt;
use core::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when a subtraction lands a hair below zero from float drift.
const DRIFT_TOLERANCE: f64 = 1e-9;

/// A `(cpu, memory, bandwidth)` triple in cores, GiB and Mbps.
///
/// Used for demand, capacity, allocation and per-dimension ratios alike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceVector {
    pub cpu: f64,
    pub memory: f64,
    pub bandwidth: f64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector::new(0.0, 0.0, 0.0);
    pub const DIMENSIONS: [&'static str; 3] = ["cpu", "memory", "bandwidth"];

    pub const fn new(cpu: f64, memory: f64, bandwidth: f64) -> Self {
        Self {
            cpu,
            memory,
            bandwidth,
        }
    }

    pub const fn splat(v: f64) -> Self {
        Self::new(v, v, v)
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.cpu, self.memory, self.bandwidth]
    }

    /// True iff `self` fits inside `free` in every dimension (equality admits).
    pub fn fits(&self, free: &ResourceVector) -> bool {
        self.cpu <= free.cpu && self.memory <= free.memory && self.bandwidth <= free.bandwidth
    }

    /// Component-wise `self - other`. Results within float drift of zero are
    /// clamped to zero; anything more negative is an error.
    pub fn checked_sub(&self, other: &ResourceVector) -> Result<ResourceVector> {
        let a = self.to_array();
        let b = other.to_array();
        let mut out = [0.0; 3];
        for i in 0..3 {
            let d = a[i] - b[i];
            let tol = DRIFT_TOLERANCE * a[i].abs().max(b[i].abs()).max(1.0);
            if d < -tol {
                return Err(Error::NegativeResource {
                    dimension: Self::DIMENSIONS[i],
                });
            }
            out[i] = d.max(0.0);
        }
        Ok(Self::from_array(out))
    }

    pub fn scale(&self, k: f64) -> ResourceVector {
        Self::new(self.cpu * k, self.memory * k, self.bandwidth * k)
    }

    /// Per-dimension `self / denom`, with 0 wherever the denominator is 0.
    pub fn ratio(&self, denom: &ResourceVector) -> ResourceVector {
        let div = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
        Self::new(
            div(self.cpu, denom.cpu),
            div(self.memory, denom.memory),
            div(self.bandwidth, denom.bandwidth),
        )
    }

    pub fn dot(&self, other: &ResourceVector) -> f64 {
        self.cpu * other.cpu + self.memory * other.memory + self.bandwidth * other.bandwidth
    }

    pub fn max_component(&self) -> f64 {
        self.cpu.max(self.memory).max(self.bandwidth)
    }

    pub fn mean_component(&self) -> f64 {
        (self.cpu + self.memory + self.bandwidth) / 3.0
    }

    pub fn is_non_negative(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite() && *v >= 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite() && *v > 0.0)
    }

    pub(crate) fn validate_non_negative(&self, field: &str) -> Result<()> {
        if self.is_non_negative() {
            Ok(())
        } else {
            Err(Error::invalid(
                field,
                "every component must be finite and >= 0",
            ))
        }
    }
}

impl Add for ResourceVector {
    type Output = ResourceVector;

    fn add(self, rhs: ResourceVector) -> ResourceVector {
        ResourceVector::new(
            self.cpu + rhs.cpu,
            self.memory + rhs.memory,
            self.bandwidth + rhs.bandwidth,
        )
    }
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.cpu, self.memory, self.bandwidth)
    }
}

/// Workload class. `Sensitive` requests are critical and never leave the private tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestClass {
    Sensitive,
    Scalable,
}

impl RequestClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RequestClass::Sensitive => "sensitive",
            RequestClass::Scalable => "scalable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sensitive" => Some(RequestClass::Sensitive),
            "scalable" => Some(RequestClass::Scalable),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            RequestClass::Sensitive => 0,
            RequestClass::Scalable => 1,
        }
    }
}

impl fmt::Display for RequestClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One unit of workload. Its demand is held for the whole service duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceRequest {
    pub id: u64,
    /// Seconds on the simulation clock.
    pub arrival_time: f64,
    pub class: RequestClass,
    pub demand: ResourceVector,
    pub service_duration: f64,
    /// Maximum acceptable response time (completion minus arrival).
    pub latency_target: f64,
}

impl ServiceRequest {
    pub fn validate(&self) -> Result<()> {
        if !(self.arrival_time.is_finite() && self.arrival_time >= 0.0) {
            return Err(Error::invalid("arrival_time", "must be finite and >= 0"));
        }
        self.demand.validate_non_negative("demand")?;
        if !(self.service_duration.is_finite() && self.service_duration > 0.0) {
            return Err(Error::invalid("duration", "must be finite and > 0"));
        }
        if !(self.latency_target.is_finite() && self.latency_target > 0.0) {
            return Err(Error::invalid("latency_target", "must be finite and > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TierKind {
    Private,
    Public,
}

/// A private or public resource pool.
///
/// `unit_cost` is the price of one core-hour, GiB-hour and Mbps-hour of
/// *provisioned* capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudTier {
    pub kind: TierKind,
    capacity: ResourceVector,
    allocated: ResourceVector,
    pub unit_cost: ResourceVector,
    pub provision_delay: f64,
    pub base_latency: f64,
}

impl CloudTier {
    pub fn new(
        kind: TierKind,
        capacity: ResourceVector,
        unit_cost: ResourceVector,
        provision_delay: f64,
        base_latency: f64,
    ) -> Result<Self> {
        let name = match kind {
            TierKind::Private => "private",
            TierKind::Public => "public",
        };
        capacity.validate_non_negative(&alloc::format!("{name}.capacity"))?;
        unit_cost.validate_non_negative(&alloc::format!("{name}.unit_cost"))?;
        if !(provision_delay.is_finite() && provision_delay >= 0.0) {
            return Err(Error::invalid(
                alloc::format!("{name}.provision_delay"),
                "must be finite and >= 0",
            ));
        }
        if kind == TierKind::Private && provision_delay != 0.0 {
            return Err(Error::invalid(
                "private.provision_delay",
                "private capacity is always ready (delay must be 0)",
            ));
        }
        if !(base_latency.is_finite() && base_latency >= 0.0) {
            return Err(Error::invalid(
                alloc::format!("{name}.base_latency"),
                "must be finite and >= 0",
            ));
        }
        Ok(Self {
            kind,
            capacity,
            allocated: ResourceVector::ZERO,
            unit_cost,
            provision_delay,
            base_latency,
        })
    }

    pub fn capacity(&self) -> ResourceVector {
        self.capacity
    }

    pub fn allocated(&self) -> ResourceVector {
        self.allocated
    }

    pub fn free(&self) -> ResourceVector {
        self.capacity
            .checked_sub(&self.allocated)
            .unwrap_or(ResourceVector::ZERO)
    }

    /// Whether `demand` can be added without exceeding capacity.
    ///
    /// Tested on the post-allocation sum so that the stored allocation is
    /// exactly the value compared against capacity.
    pub fn can_host(&self, demand: &ResourceVector) -> bool {
        (self.allocated + *demand).fits(&self.capacity)
    }

    pub fn allocate(&mut self, demand: &ResourceVector) -> Result<()> {
        let next = self.allocated + *demand;
        if !next.fits(&self.capacity) {
            return Err(Error::invalid("allocation", "demand exceeds free capacity"));
        }
        self.allocated = next;
        Ok(())
    }

    pub fn release(&mut self, demand: &ResourceVector) -> Result<()> {
        self.allocated = self.allocated.checked_sub(demand)?;
        Ok(())
    }

    /// Replace the capacity ceiling. Refuses to shrink below the current allocation.
    pub fn set_capacity(&mut self, capacity: ResourceVector) -> Result<()> {
        if !self.allocated.fits(&capacity) {
            return Err(Error::invalid(
                "capacity",
                "would drop below allocated resources",
            ));
        }
        self.capacity = capacity;
        Ok(())
    }

    /// Allocated / capacity per dimension; 0 where capacity is 0.
    pub fn utilization(&self) -> ResourceVector {
        self.allocated.ratio(&self.capacity)
    }

    /// Provisioned-capacity price per hour.
    pub fn hourly_cost(&self) -> f64 {
        self.capacity.dot(&self.unit_cost)
    }
}

/// Run-level operating constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constraints {
    /// Currency units per run; `None` means unbounded.
    pub cost_budget: Option<f64>,
    /// Latency allowance for sensitive workloads, in seconds.
    pub latency_target_sensitive: f64,
    pub availability_target: f64,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            cost_budget: None,
            latency_target_sensitive: 0.010,
            availability_target: 0.999,
        }
    }
}

impl Constraints {
    pub fn validate(&self) -> Result<()> {
        if let Some(b) = self.cost_budget {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::invalid("constraints.cost_budget", "must be > 0"));
            }
        }
        if !(self.latency_target_sensitive.is_finite() && self.latency_target_sensitive > 0.0) {
            return Err(Error::invalid(
                "constraints.latency_target_sensitive",
                "must be > 0",
            ));
        }
        if !(self.availability_target > 0.0 && self.availability_target <= 1.0) {
            return Err(Error::invalid(
                "constraints.availability_target",
                "must be in (0, 1]",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(c: f64, m: f64, b: f64) -> ResourceVector {
        ResourceVector::new(c, m, b)
    }

    #[test]
    fn add_examples() {
        assert_eq!(rv(0.0, 0.0, 0.0) + rv(1.0, 2.0, 3.0), rv(1.0, 2.0, 3.0));
        assert_eq!(rv(1.0, 1.0, 1.0) + rv(1.0, 1.0, 1.0), rv(2.0, 2.0, 2.0));
        assert_eq!(rv(0.5, 2.0, 10.0) + rv(0.5, 2.0, 10.0), rv(1.0, 4.0, 20.0));
    }

    #[test]
    fn fits_examples() {
        assert!(rv(1.0, 1.0, 1.0).fits(&rv(1.0, 1.0, 1.0)));
        assert!(!rv(2.0, 1.0, 1.0).fits(&rv(1.0, 9.0, 9.0)));
        assert!(ResourceVector::ZERO.fits(&ResourceVector::ZERO));
    }

    #[test]
    fn checked_sub_rejects_negative() {
        assert_eq!(
            rv(1.0, 1.0, 1.0).checked_sub(&rv(0.0, 2.0, 0.0)),
            Err(Error::NegativeResource {
                dimension: "memory"
            })
        );
        assert_eq!(
            rv(0.3, 1.0, 1.0).checked_sub(&rv(0.1 + 0.2, 1.0, 1.0)),
            Ok(ResourceVector::ZERO)
        );
    }

    #[test]
    fn tier_never_over_allocates() {
        let mut t = CloudTier::new(
            TierKind::Private,
            rv(4.0, 8.0, 100.0),
            rv(1.0, 1.0, 1.0),
            0.0,
            0.001,
        )
        .unwrap();
        assert!(t.allocate(&rv(3.0, 4.0, 50.0)).is_ok());
        assert!(!t.can_host(&rv(2.0, 1.0, 1.0)));
        assert!(t.allocate(&rv(2.0, 1.0, 1.0)).is_err());
        assert!(t.allocated().fits(&t.capacity()));
        assert!(t.set_capacity(rv(2.0, 8.0, 100.0)).is_err());
        t.release(&rv(3.0, 4.0, 50.0)).unwrap();
        assert_eq!(t.allocated(), ResourceVector::ZERO);
    }

    #[test]
    fn private_tier_rejects_delay() {
        let err = CloudTier::new(
            TierKind::Private,
            rv(1.0, 1.0, 1.0),
            rv(1.0, 1.0, 1.0),
            5.0,
            0.0,
        );
        assert!(
            matches!(err, Err(Error::Invalid { field, .. }) if field == "private.provision_delay")
        );
    }

    #[test]
    fn constraint_defaults() {
        let c = Constraints::default();
        assert_eq!(c.latency_target_sensitive, 0.010);
        assert_eq!(c.availability_target, 0.999);
        assert!(c.cost_budget.is_none());
        assert!(c.validate().is_ok());
        let bad = Constraints {
            availability_target: 1.5,
            ..c
        };
        assert!(bad.validate().is_err());
    }

    fn arb_rv() -> impl Strategy<Value = ResourceVector> {
        (0.0..1e3f64, 0.0..1e3f64, 0.0..1e3f64).prop_map(|(c, m, b)| rv(c, m, b))
    }

    proptest! {
        #[test]
        fn add_commutative_associative(a in arb_rv(), b in arb_rv(), c in arb_rv()) {
            prop_assert_eq!(a + b, b + a);
            let l = (a + b) + c;
            let r = a + (b + c);
            for (x, y) in l.to_array().iter().zip(r.to_array().iter()) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }

        #[test]
        fn fits_composes(d in arb_rv(), d2 in arb_rv(), f in arb_rv()) {
            if d.fits(&f) {
                if let Ok(rest) = f.checked_sub(&d) {
                    if d2.fits(&rest) {
                        // Composition holds up to one rounding step per component.
                        let sum = d + d2;
                        for (s, cap) in sum.to_array().iter().zip(f.to_array().iter()) {
                            prop_assert!(*s <= cap + 1e-9 * cap.max(1.0));
                        }
                    }
                }
            }
        }
    }
}
