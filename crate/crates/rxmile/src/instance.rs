//! Domain types for a pharmacy last-mile planning instance and their
//! validation rules.

use serde::{Deserialize, Serialize};

/// Cooling requirement of a medication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoolingClass {
    /// Must be kept refrigerated in transit (`c0`).
    Cooled = 0,
    /// No refrigeration needed (`c1`).
    NonCooled = 1,
}

impl CoolingClass {
    pub const ALL: [CoolingClass; 2] = [CoolingClass::Cooled, CoolingClass::NonCooled];

    pub fn label(self) -> &'static str {
        match self {
            CoolingClass::Cooled => "cooled medication",
            CoolingClass::NonCooled => "non-cooled medication",
        }
    }
}

/// Cooling regime of a transported batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransportCooling {
    /// Refrigerated packaging only (`a0`).
    Cooled = 0,
    /// Unrefrigerated packaging only (`a1`).
    NonCooled = 1,
    /// Mixed packaging carrying both classes (`a2`).
    Combination = 2,
}

impl TransportCooling {
    pub const ALL: [TransportCooling; 3] = [
        TransportCooling::Cooled,
        TransportCooling::NonCooled,
        TransportCooling::Combination,
    ];

    /// Whether a batch under this regime may contain medication of class `med`.
    pub fn carries(self, med: CoolingClass) -> bool {
        match (self, med) {
            (TransportCooling::Combination, _) => true,
            (TransportCooling::Cooled, CoolingClass::Cooled) => true,
            (TransportCooling::NonCooled, CoolingClass::NonCooled) => true,
            _ => false,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TransportCooling::Cooled => "cooled transport",
            TransportCooling::NonCooled => "non-cooled transport",
            TransportCooling::Combination => "combination transport",
        }
    }
}

/// Prescription-line fee class of a medication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MedClass {
    /// No fee is collected (`k0`).
    NoFee = 0,
    /// A fee is collected per batch containing it (`k1`).
    Fee = 1,
}

impl MedClass {
    pub const ALL: [MedClass; 2] = [MedClass::NoFee, MedClass::Fee];
}

/// A delivery channel with a per-period batch capacity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeliveryMode {
    pub name: String,
    /// Maximum number of batches deliverable per period, uniform over periods.
    pub capacity_per_period: u32,
}

/// An employee category with handling times and working-hour limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmployeeType {
    pub name: String,
    /// Hours to process one batch, indexed by `TransportCooling`.
    pub handling_hours: [f64; 3],
    /// Maximum working hours per period.
    pub max_hours_per_period: f64,
    pub hourly_wage: f64,
}

impl EmployeeType {
    /// Salary of one employee of this type over a horizon of `periods` periods,
    /// a full-time-equivalent figure: wage × max hours × periods.
    pub fn horizon_salary(&self, periods: u32) -> f64 {
        self.hourly_wage * self.max_hours_per_period * periods as f64
    }
}

/// An aggregated patient class.
///
/// `need[c][k]` is the number of distinct medications of cooling class `c`
/// and fee class `k` the class consumes over the horizon; `multiplicity` is
/// the number of patients aggregated into the class; `min_orders` is the
/// number of batches each of them places over the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatientType {
    pub need: [[u32; 2]; 2],
    pub multiplicity: u32,
    pub min_orders: u32,
}

impl PatientType {
    pub fn need_of(&self, c: CoolingClass, k: MedClass) -> u32 {
        self.need[c as usize][k as usize]
    }

    /// Total distinct medications over the horizon.
    pub fn total_meds(&self) -> u32 {
        self.need.iter().flatten().sum()
    }

    /// Whether any medication of cooling class `c` is needed.
    pub fn needs_class(&self, c: CoolingClass) -> bool {
        self.need[c as usize].iter().any(|&q| q > 0)
    }

    /// Distinct fee-bearing medications over the horizon.
    pub fn fee_meds(&self) -> u32 {
        self.need[0][1] + self.need[1][1]
    }
}

/// Per-batch transport costs and prescription-line fees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSchedule {
    /// `transport[d][a]`: cost of one batch on delivery mode `d` under
    /// transport cooling `a`.
    pub transport: Vec<[f64; 3]>,
    /// `fee[k]`: prescription-line fee per distinct medication of class `k`.
    pub fee: [f64; 2],
}

impl CostSchedule {
    pub fn transport_cost(&self, a: TransportCooling, mode: usize) -> f64 {
        self.transport[mode][a as usize]
    }
}

/// A complete, immutable problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub patients: Vec<PatientType>,
    pub modes: Vec<DeliveryMode>,
    pub employees: Vec<EmployeeType>,
    pub costs: CostSchedule,
    pub periods: u32,
    pub big_m1: u32,
    pub big_m2: u32,
    pub periods_per_year: u32,
}

impl Instance {
    /// Horizon-to-year scaling factor.
    pub fn annualization(&self) -> f64 {
        self.periods_per_year as f64 / self.periods as f64
    }

    /// Total patients across all classes.
    pub fn total_patients(&self) -> u64 {
        self.patients.iter().map(|p| p.multiplicity as u64).sum()
    }

    /// Total batches the instance forces over the horizon.
    pub fn total_min_orders(&self) -> u64 {
        self.patients
            .iter()
            .map(|p| p.multiplicity as u64 * p.min_orders as u64)
            .sum()
    }

    /// Largest per-patient medication count, the reference for big-M validity.
    pub fn max_total_meds(&self) -> u32 {
        self.patients.iter().map(|p| p.total_meds()).max().unwrap_or(0)
    }

    /// Check every instance invariant; an empty list means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        if self.patients.is_empty() {
            out.push(Violation { path: "patients".to_string(), message: "no patient types".into() });
        }
        if self.modes.is_empty() {
            out.push(Violation { path: "modes".to_string(), message: "no delivery modes".into() });
        }
        if self.employees.is_empty() {
            out.push(Violation { path: "employees".to_string(), message: "no employee types".into() });
        }
        if self.periods == 0 {
            out.push(Violation { path: "meta.periods".to_string(), message: "periods must be >= 1".into() });
        }
        if self.periods_per_year == 0 {
            out.push(Violation { path: "meta.periods_per_year".to_string(), message: "periods per year must be >= 1".into() });
        }

        let max_meds = self.max_total_meds();
        if self.big_m1 < max_meds {
            let p = self
                .patients
                .iter()
                .position(|p| p.total_meds() == max_meds)
                .unwrap_or(0);
            out.push(Violation { path: "meta.big_m1".to_string(), message: format!("big-M too small for patient p{p}") });
        }
        if self.big_m2 < max_meds {
            let p = self
                .patients
                .iter()
                .position(|p| p.total_meds() == max_meds)
                .unwrap_or(0);
            out.push(Violation { path: "meta.big_m2".to_string(), message: format!("big-M too small for patient p{p}") });
        }

        for (i, pt) in self.patients.iter().enumerate() {
            if pt.min_orders == 0 {
                out.push(Violation {
                    path: format!("patients[{i}].sigma"),
                    message: "\u{3c3} must be \u{2265} 1".into(),
                });
            }
            if pt.min_orders > self.periods {
                out.push(Violation {
                    path: format!("patients[{i}].sigma"),
                    message: format!(
                        "\u{3c3} = {} exceeds the {} available periods",
                        pt.min_orders, self.periods
                    ),
                });
            }
        }

        if self.costs.transport.len() != self.modes.len() {
            out.push(Violation {
                path: "costs.transport".to_string(),
                message: format!(
                    "{} transport-cost rows for {} delivery modes",
                    self.costs.transport.len(),
                    self.modes.len()
                ),
            });
        }
        for (d, row) in self.costs.transport.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                if !(t > 0.0) || !t.is_finite() {
                    out.push(Violation {
                        path: format!("costs.transport[{d}][{a}]"),
                        message: format!("transport cost must be positive, got {t}"),
                    });
                }
            }
        }
        if self.costs.fee[MedClass::NoFee as usize] != 0.0 {
            out.push(Violation { path: "fees.k0".to_string(), message: "fee for the no-fee class must be 0".into() });
        }
        if !(self.costs.fee[MedClass::Fee as usize] > 0.0) {
            out.push(Violation { path: "fees.k1".to_string(), message: "fee for the fee class must be positive".into() });
        }

        for (e, emp) in self.employees.iter().enumerate() {
            for (a, &u) in emp.handling_hours.iter().enumerate() {
                if !(u > 0.0) || !u.is_finite() {
                    out.push(Violation {
                        path: format!("employees[{e}].u[{a}]"),
                        message: format!("handling hours must be positive, got {u}"),
                    });
                }
            }
            if !(emp.max_hours_per_period > 0.0) {
                out.push(Violation {
                    path: format!("employees[{e}].theta"),
                    message: "maximum hours per period must be positive".into(),
                });
            }
            if !(emp.hourly_wage > 0.0) {
                out.push(Violation {
                    path: format!("employees[{e}].hourly_wage"),
                    message: "hourly wage must be positive".into(),
                });
            }
        }

        // Throughput: some mode must be able to absorb the forced batch volume.
        if self.periods > 0 && !self.modes.is_empty() {
            let forced = self.total_min_orders();
            let per_period = forced.div_ceil(self.periods as u64);
            let max_cap = self
                .modes
                .iter()
                .map(|m| m.capacity_per_period as u64)
                .max()
                .unwrap_or(0);
            let total_cap: u64 = self
                .modes
                .iter()
                .map(|m| m.capacity_per_period as u64)
                .sum();
            if max_cap < per_period && total_cap < per_period {
                out.push(Violation {
                    path: "modes".to_string(),
                    message: format!(
                        "no delivery mode can absorb the forced volume of {per_period} batches per period"
                    ),
                });
            }
        }

        out
    }
}

/// A single validation finding, carrying the offending field and a message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compatibility_map() {
        let table = [
            (TransportCooling::Cooled, [true, false]),
            (TransportCooling::NonCooled, [false, true]),
            (TransportCooling::Combination, [true, true]),
        ];
        for (a, expect) in table {
            assert_eq!(a.carries(CoolingClass::Cooled), expect[0]);
            assert_eq!(a.carries(CoolingClass::NonCooled), expect[1]);
        }
    }

    #[test]
    fn bundled_is_valid() {
        let inst = Instance::bundled();
        assert_eq!(inst.patients.len(), 225);
        assert_eq!(inst.total_patients(), 6_783);
        assert_eq!(inst.total_min_orders(), 7_580);
        assert_eq!(inst.validate(), Vec::new());
    }

    #[test]
    fn big_m_violation_names_patient() {
        let mut inst = Instance::bundled();
        inst.big_m1 = 3;
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "big-M too small for patient p193");
    }

    #[test]
    fn zero_sigma_flagged() {
        let mut inst = Instance::bundled();
        inst.patients[10].min_orders = 0;
        let v = inst.validate();
        assert!(v.iter().any(|v| v.message.contains("\u{3c3} must be \u{2265} 1")));
    }

    #[test]
    fn horizon_salary() {
        let inst = Instance::bundled();
        let s0 = inst.employees[0].horizon_salary(inst.periods);
        let s1 = inst.employees[1].horizon_salary(inst.periods);
        assert!((s0 - 33.0 * 126.667 * 4.0).abs() < 1e-9);
        assert!((s1 - 40.0 * 126.667 * 4.0).abs() < 1e-9);
    }
}
