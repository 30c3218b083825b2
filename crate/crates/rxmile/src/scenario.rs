//! What-if transforms over an instance: patient-count scaling, tighter
//! order synchronization, restriction to fee-free patient types, and a
//! longer ordering horizon.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{CoolingClass, Instance, MedClass};

/// Order-synchronization level of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncLevel {
    /// Keep the observed minimum-order counts.
    Base77,
    /// Every patient type drops one order, floored at one.
    Realistic87,
    /// Every patient type orders exactly once.
    Ideal100,
}

/// Which patient types stay in the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatientFilter {
    All,
    /// Keep only patient types that need at least one fee-free medication.
    OnlyK0,
}

/// Length of the ordering horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonMonths {
    Four,
    Six,
}

impl HorizonMonths {
    pub fn periods(self) -> u32 {
        match self {
            HorizonMonths::Four => 4,
            HorizonMonths::Six => 6,
        }
    }
}

/// A single what-if scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub label: String,
    /// Rescale patient multiplicities so they sum to this total; `None`
    /// keeps the instance as is.
    pub target_patient_total: Option<u64>,
    pub sync_level: SyncLevel,
    pub patient_filter: PatientFilter,
    pub horizon_months: HorizonMonths,
}

impl ScenarioSpec {
    /// The identity scenario.
    pub fn base(label: &str) -> ScenarioSpec {
        ScenarioSpec {
            label: label.to_string(),
            target_patient_total: None,
            sync_level: SyncLevel::Base77,
            patient_filter: PatientFilter::All,
            horizon_months: HorizonMonths::Four,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("target patient total {target} is below the {surviving} surviving patient types")]
    TargetTooSmall { target: u64, surviving: usize },
}

/// Apply a scenario to an instance, returning the transformed copy.
///
/// Transforms run in a fixed order: patient scaling, synchronization
/// mapping, patient-type filter, horizon change. Scaling distributes the
/// target total proportionally with largest-remainder rounding, so the new
/// multiplicities sum to the target exactly and each differs from its exact
/// proportional share by less than one.
pub fn apply_scenario(instance: &Instance, spec: &ScenarioSpec) -> Result<Instance, ScenarioError> {
    let mut out = instance.clone();

    if let Some(target) = spec.target_patient_total {
        let surviving = out.patients.iter().filter(|p| p.multiplicity > 0).count();
        if target < surviving as u64 {
            return Err(ScenarioError::TargetTooSmall { target, surviving });
        }
        let rhos: Vec<u64> = out.patients.iter().map(|p| p.multiplicity as u64).collect();
        let scaled = largest_remainder_scale(&rhos, target);
        for (p, rho) in out.patients.iter_mut().zip(scaled) {
            p.multiplicity = rho as u32;
        }
    }

    match spec.sync_level {
        SyncLevel::Base77 => {}
        SyncLevel::Realistic87 => {
            for p in &mut out.patients {
                p.min_orders = p.min_orders.saturating_sub(1).max(1);
            }
        }
        SyncLevel::Ideal100 => {
            for p in &mut out.patients {
                p.min_orders = 1;
            }
        }
    }

    if spec.patient_filter == PatientFilter::OnlyK0 {
        for p in &mut out.patients {
            let has_k0 = CoolingClass::ALL
                .iter()
                .any(|&c| p.need_of(c, MedClass::NoFee) > 0);
            if !has_k0 {
                p.multiplicity = 0;
            }
        }
    }

    out.periods = spec.horizon_months.periods();

    Ok(out)
}

/// Proportional integer apportionment: floor every share, then hand the
/// remaining units to the largest fractional parts (ties to the lower index).
/// The result sums to `target` exactly.
fn largest_remainder_scale(values: &[u64], target: u64) -> Vec<u64> {
    let total: u64 = values.iter().sum();
    if total == 0 {
        return vec![0; values.len()];
    }
    let mut out = Vec::with_capacity(values.len());
    let mut fracs = Vec::with_capacity(values.len());
    let mut assigned = 0u64;
    for (i, &v) in values.iter().enumerate() {
        let num = (v as u128) * (target as u128);
        let floor = (num / total as u128) as u64;
        let rem = num % total as u128;
        out.push(floor);
        assigned += floor;
        fracs.push((rem, i));
    }
    let mut leftover = target - assigned;
    fracs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in &fracs {
        if leftover == 0 {
            break;
        }
        out[i] += 1;
        leftover -= 1;
    }
    out
}

/// The full 24-scenario grid: {no scaling, 10,000 patients} ×
/// {base, realistic, ideal synchronization} × {all, fee-free-only patients}
/// × {four, six months}, labelled "0" through "23" in grid order.
pub fn table10() -> Vec<ScenarioSpec> {
    let mut out = Vec::with_capacity(24);
    let mut idx = 0;
    for target in [None, Some(10_000)] {
        for sync in [SyncLevel::Base77, SyncLevel::Realistic87, SyncLevel::Ideal100] {
            for filter in [PatientFilter::All, PatientFilter::OnlyK0] {
                for months in [HorizonMonths::Four, HorizonMonths::Six] {
                    out.push(ScenarioSpec {
                        label: idx.to_string(),
                        target_patient_total: target,
                        sync_level: sync,
                        patient_filter: filter,
                        horizon_months: months,
                    });
                    idx += 1;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scenario_is_identity() {
        let inst = Instance::bundled();
        let out = apply_scenario(&inst, &ScenarioSpec::base("base")).unwrap();
        assert_eq!(out, inst);
    }

    #[test]
    fn ideal_sets_all_sigma_to_one() {
        let inst = Instance::bundled();
        let mut spec = ScenarioSpec::base("ideal");
        spec.sync_level = SyncLevel::Ideal100;
        let out = apply_scenario(&inst, &spec).unwrap();
        assert!(out.patients.iter().all(|p| p.min_orders == 1));
    }

    #[test]
    fn realistic_decrements_with_floor_one() {
        let inst = Instance::bundled();
        let mut spec = ScenarioSpec::base("realistic");
        spec.sync_level = SyncLevel::Realistic87;
        let out = apply_scenario(&inst, &spec).unwrap();
        for (before, after) in inst.patients.iter().zip(&out.patients) {
            assert_eq!(after.min_orders, before.min_orders.saturating_sub(1).max(1));
        }
        // Idempotent once everything is at one.
        let again = apply_scenario(&out, &spec).unwrap();
        let ideal = apply_scenario(&inst, &{
            let mut s = ScenarioSpec::base("i");
            s.sync_level = SyncLevel::Ideal100;
            s
        })
        .unwrap();
        let twice = apply_scenario(&again, &spec).unwrap();
        assert_eq!(
            twice.patients.iter().map(|p| p.min_orders).collect::<Vec<_>>(),
            apply_scenario(&ideal, &spec)
                .unwrap()
                .patients
                .iter()
                .map(|p| p.min_orders)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn only_k0_zeroes_fee_only_types() {
        let inst = Instance::bundled();
        let mut spec = ScenarioSpec::base("k0");
        spec.patient_filter = PatientFilter::OnlyK0;
        let out = apply_scenario(&inst, &spec).unwrap();
        assert!(out.total_patients() < inst.total_patients());
        for p in out.patients.iter().filter(|p| p.multiplicity > 0) {
            assert!(p.need[0][0] + p.need[1][0] > 0);
        }
        // Anyone zeroed had no fee-free medication.
        for (before, after) in inst.patients.iter().zip(&out.patients) {
            if after.multiplicity == 0 && before.multiplicity > 0 {
                assert_eq!(before.need[0][0] + before.need[1][0], 0);
            }
        }
    }

    #[test]
    fn six_months_changes_horizon_only() {
        let inst = Instance::bundled();
        let mut spec = ScenarioSpec::base("six");
        spec.horizon_months = HorizonMonths::Six;
        let out = apply_scenario(&inst, &spec).unwrap();
        assert_eq!(out.periods, 6);
        assert!((out.annualization() - 2.0).abs() < 1e-12);
        assert_eq!(out.patients, inst.patients);
        assert_eq!(out.costs, inst.costs);
        assert_eq!(out.modes, inst.modes);
    }

    #[test]
    fn scaling_hits_target_exactly() {
        let inst = Instance::bundled();
        let mut spec = ScenarioSpec::base("grow");
        spec.target_patient_total = Some(10_000);
        let out = apply_scenario(&inst, &spec).unwrap();
        assert_eq!(out.total_patients(), 10_000);
        let total = inst.total_patients() as f64;
        for (before, after) in inst.patients.iter().zip(&out.patients) {
            let exact = before.multiplicity as f64 * 10_000.0 / total;
            assert!((after.multiplicity as f64 - exact).abs() < 1.0);
        }
        // Structure untouched.
        for (before, after) in inst.patients.iter().zip(&out.patients) {
            assert_eq!(before.need, after.need);
            assert_eq!(before.min_orders, after.min_orders);
        }
    }

    #[test]
    fn target_below_type_count_errors() {
        let inst = Instance::bundled();
        let mut spec = ScenarioSpec::base("tiny");
        spec.target_patient_total = Some(100);
        assert_eq!(
            apply_scenario(&inst, &spec).unwrap_err(),
            ScenarioError::TargetTooSmall { target: 100, surviving: 225 }
        );
    }

    #[test]
    fn grid_has_24_unique_labels() {
        let specs = table10();
        assert_eq!(specs.len(), 24);
        let mut labels: Vec<_> = specs.iter().map(|s| s.label.clone()).collect();
        labels.dedup();
        assert_eq!(labels.len(), 24);
        assert_eq!(specs[0], ScenarioSpec::base("0"));
        assert_eq!(specs[12].target_patient_total, Some(10_000));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = table10().remove(23);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ScenarioSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
