//! Sparse MILP construction for a planning instance: decision columns,
//! bounds, objective and constraint rows for the base formulation and its
//! two relaxed variants.

use thiserror::Error;

use crate::instance::{CoolingClass, Instance, MedClass, TransportCooling, Violation};
use crate::simplex::{LpProblem, Sense};

/// Domain of a model column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

/// A model column: bounds, kind, objective coefficient and a unique name.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
    pub objective: f64,
}

/// A model row: sparse coefficients (sorted by column), sense and right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Which formulation to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// Demands met exactly; staffing in whole employees.
    Base,
    /// Demands become lower bounds so batches may repeat medications.
    RelaxedOrders,
    /// Staffing charged by the hour instead of by headcount.
    HoursStaffing,
}

impl ModelVariant {
    pub fn label(self) -> &'static str {
        match self {
            ModelVariant::Base => "base",
            ModelVariant::RelaxedOrders => "relaxed-orders",
            ModelVariant::HoursStaffing => "hours-staffing",
        }
    }
}

/// Structured identity of a column.
///
/// `p` is the model-local patient slot (see [`StructuredVars::patient_ids`]
/// for the mapping back to instance indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRef {
    /// Batch placement: one order for patient slot `p` in period `w`,
    /// shipped on mode `d` under transport cooling `a`.
    Batch { a: TransportCooling, d: usize, p: usize, w: usize },
    /// Distinct medications of class (`c`,`k`) inside the period-`w` batch.
    Meds { c: CoolingClass, k: MedClass, p: usize, w: usize },
    /// Employees of type `e` staffed in period `w`.
    StaffPeriod { e: usize, w: usize },
    /// Employees of type `e` hired over the horizon.
    StaffLevel { e: usize },
    /// Handling hours of type `e` consumed in period `w` (hours-staffing
    /// variant only).
    StaffHours { e: usize, w: usize },
}

/// Bijection between structured variable keys and column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredVars {
    pub variant: ModelVariant,
    pub modes: usize,
    pub employees: usize,
    pub patients: usize,
    pub periods: usize,
    /// Model patient slot -> instance patient index.
    pub patient_ids: Vec<usize>,
}

pub const TRANSPORT_COOLINGS: usize = 3;
pub const MED_COOLINGS: usize = 2;
pub const MED_CLASSES: usize = 2;

impl StructuredVars {
    pub fn num_batch_cols(&self) -> usize {
        TRANSPORT_COOLINGS * self.modes * self.patients * self.periods
    }

    pub fn num_meds_cols(&self) -> usize {
        MED_COOLINGS * MED_CLASSES * self.patients * self.periods
    }

    pub fn num_staff_cols(&self) -> usize {
        match self.variant {
            ModelVariant::Base | ModelVariant::RelaxedOrders => {
                self.employees * self.periods + self.employees
            }
            ModelVariant::HoursStaffing => self.employees * self.periods,
        }
    }

    pub fn num_cols(&self) -> usize {
        self.num_batch_cols() + self.num_meds_cols() + self.num_staff_cols()
    }

    /// Column index of a structured key, if it exists in this model.
    pub fn index(&self, r: VarRef) -> Option<usize> {
        let (modes, pats, periods) = (self.modes, self.patients, self.periods);
        match r {
            VarRef::Batch { a, d, p, w } if d < modes && p < pats && w < periods => {
                Some(((a as usize * modes + d) * pats + p) * periods + w)
            }
            VarRef::Meds { c, k, p, w } if p < pats && w < periods => Some(
                self.num_batch_cols()
                    + ((c as usize * MED_CLASSES + k as usize) * pats + p) * periods
                    + w,
            ),
            VarRef::StaffPeriod { e, w }
                if e < self.employees
                    && w < periods
                    && self.variant != ModelVariant::HoursStaffing =>
            {
                Some(self.num_batch_cols() + self.num_meds_cols() + e * periods + w)
            }
            VarRef::StaffLevel { e }
                if e < self.employees && self.variant != ModelVariant::HoursStaffing =>
            {
                Some(
                    self.num_batch_cols()
                        + self.num_meds_cols()
                        + self.employees * periods
                        + e,
                )
            }
            VarRef::StaffHours { e, w }
                if e < self.employees
                    && w < periods
                    && self.variant == ModelVariant::HoursStaffing =>
            {
                Some(self.num_batch_cols() + self.num_meds_cols() + e * periods + w)
            }
            _ => None,
        }
    }

    /// Structured key of a column index.
    pub fn var_of(&self, idx: usize) -> Option<VarRef> {
        let (modes, pats, periods) = (self.modes, self.patients, self.periods);
        let nb = self.num_batch_cols();
        let no = self.num_meds_cols();
        if idx < nb {
            let w = idx % periods;
            let rest = idx / periods;
            let p = rest % pats;
            let rest = rest / pats;
            let d = rest % modes;
            let a = rest / modes;
            return Some(VarRef::Batch { a: TransportCooling::ALL[a], d, p, w });
        }
        let idx = idx - nb;
        if idx < no {
            let w = idx % periods;
            let rest = idx / periods;
            let p = rest % pats;
            let rest = rest / pats;
            let k = rest % MED_CLASSES;
            let c = rest / MED_CLASSES;
            return Some(VarRef::Meds {
                c: CoolingClass::ALL[c],
                k: MedClass::ALL[k],
                p,
                w,
            });
        }
        let idx = idx - no;
        match self.variant {
            ModelVariant::HoursStaffing => {
                if idx < self.employees * periods {
                    Some(VarRef::StaffHours { e: idx / periods, w: idx % periods })
                } else {
                    None
                }
            }
            _ => {
                if idx < self.employees * periods {
                    Some(VarRef::StaffPeriod { e: idx / periods, w: idx % periods })
                } else if idx < self.employees * periods + self.employees {
                    Some(VarRef::StaffLevel { e: idx - self.employees * periods })
                } else {
                    None
                }
            }
        }
    }
}

/// Variable identity information attached to a model.
#[derive(Clone, Debug, PartialEq)]
pub enum VarTable {
    /// No structured identities (hand-built or parsed models).
    Plain,
    Structured(StructuredVars),
}

impl VarTable {
    pub fn structured(&self) -> Option<&StructuredVars> {
        match self {
            VarTable::Structured(s) => Some(s),
            VarTable::Plain => None,
        }
    }
}

/// A sparse mixed-integer linear program.
#[derive(Clone, Debug)]
pub struct MilpModel {
    pub name: String,
    pub maximize: bool,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub vars: VarTable,
    /// Horizon-to-year factor carried along for reporting.
    pub annualization: f64,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid instance:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidInstance(Vec<Violation>),
    #[error("variable {0:?} does not exist in this model")]
    UnknownVar(VarRef),
    #[error("model has no structured variable table")]
    NotStructured,
}

/// Build the MILP for `instance` under the chosen variant.
///
/// Patient types with zero multiplicity (filtered out by a scenario) get no
/// columns. Medication counts per batch are bounded above by the horizon
/// demand in every variant, and staffing columns carry finite upper bounds
/// derived from the worst-case period workload.
pub fn build(instance: &Instance, variant: ModelVariant) -> Result<MilpModel, ModelError> {
    let violations = instance.validate();
    if !violations.is_empty() {
        return Err(ModelError::InvalidInstance(violations));
    }

    let patient_ids: Vec<usize> = instance
        .patients
        .iter()
        .enumerate()
        .filter(|(_, p)| p.multiplicity > 0)
        .map(|(i, _)| i)
        .collect();
    let vars = StructuredVars {
        variant,
        modes: instance.modes.len(),
        employees: instance.employees.len(),
        patients: patient_ids.len(),
        periods: instance.periods as usize,
        patient_ids: patient_ids.clone(),
    };
    let periods = vars.periods;
    let modes = vars.modes;

    let mut columns = Vec::with_capacity(vars.num_cols());
    for a in TransportCooling::ALL {
        for d in 0..modes {
            for &pid in &patient_ids {
                let rho = instance.patients[pid].multiplicity as f64;
                let cost = instance.costs.transport_cost(a, d);
                for w in 0..periods {
                    columns.push(Column {
                        name: format!("x_a{}_d{}_p{}_w{}", a as usize, d, pid, w),
                        lower: 0.0,
                        upper: 1.0,
                        kind: VarKind::Binary,
                        objective: -cost * rho,
                    });
                }
            }
        }
    }
    for c in CoolingClass::ALL {
        for k in MedClass::ALL {
            for &pid in &patient_ids {
                let pt = &instance.patients[pid];
                let q = pt.need_of(c, k) as f64;
                let fee = instance.costs.fee[k as usize] * pt.multiplicity as f64;
                for w in 0..periods {
                    columns.push(Column {
                        name: format!("o_c{}_k{}_p{}_w{}", c as usize, k as usize, pid, w),
                        lower: 0.0,
                        upper: q,
                        kind: VarKind::Integer,
                        objective: fee,
                    });
                }
            }
        }
    }
    // Worst-case period workload per employee type: every patient orders with
    // the slowest-handled cooling regime.
    let max_staff: Vec<f64> = instance
        .employees
        .iter()
        .map(|e| {
            let load: f64 = patient_ids
                .iter()
                .map(|&pid| {
                    let u = e.handling_hours.iter().cloned().fold(0.0, f64::max);
                    instance.patients[pid].multiplicity as f64 * u
                })
                .sum();
            (load / e.max_hours_per_period - 1e-9).ceil().max(1.0)
        })
        .collect();
    match variant {
        ModelVariant::Base | ModelVariant::RelaxedOrders => {
            for (e, _) in instance.employees.iter().enumerate() {
                for w in 0..periods {
                    columns.push(Column {
                        name: format!("m_e{e}_w{w}"),
                        lower: 0.0,
                        upper: max_staff[e],
                        kind: VarKind::Integer,
                        objective: 0.0,
                    });
                }
            }
            for (e, emp) in instance.employees.iter().enumerate() {
                columns.push(Column {
                    name: format!("M_e{e}"),
                    lower: 0.0,
                    upper: max_staff[e],
                    kind: VarKind::Integer,
                    objective: -emp.horizon_salary(instance.periods),
                });
            }
        }
        ModelVariant::HoursStaffing => {
            for (e, emp) in instance.employees.iter().enumerate() {
                let cap = max_staff[e] * emp.max_hours_per_period;
                for w in 0..periods {
                    columns.push(Column {
                        name: format!("h_e{e}_w{w}"),
                        lower: 0.0,
                        upper: cap,
                        kind: VarKind::Continuous,
                        objective: -emp.hourly_wage,
                    });
                }
            }
        }
    }
    debug_assert_eq!(columns.len(), vars.num_cols());

    let col = |r: VarRef| vars.index(r).expect("structured key in range");
    let mut rows = Vec::new();

    // One batch per patient slot and period.
    for (p, &pid) in patient_ids.iter().enumerate() {
        for w in 0..periods {
            let mut coeffs = Vec::with_capacity(TRANSPORT_COOLINGS * modes);
            for a in TransportCooling::ALL {
                for d in 0..modes {
                    coeffs.push((col(VarRef::Batch { a, d, p, w }), 1.0));
                }
            }
            rows.push(Row {
                name: format!("one_batch_p{pid}_w{w}"),
                coeffs: sorted(coeffs),
                sense: Sense::Le,
                rhs: 1.0,
            });
        }
    }
    // Medication contents force a compatible transport cooling. The linking
    // constant per patient is the tightest valid one: the patient's own
    // class total, capped by the instance-wide big-M.
    for (c, m_big, tag) in [
        (CoolingClass::Cooled, instance.big_m1 as f64, "cool"),
        (CoolingClass::NonCooled, instance.big_m2 as f64, "noncool"),
    ] {
        for (p, &pid) in patient_ids.iter().enumerate() {
            let pt = &instance.patients[pid];
            let class_total: u32 = MedClass::ALL.iter().map(|&k| pt.need_of(c, k)).sum();
            let link = m_big.min(class_total as f64);
            for w in 0..periods {
                let mut coeffs = Vec::new();
                for k in MedClass::ALL {
                    coeffs.push((col(VarRef::Meds { c, k, p, w }), 1.0));
                }
                if link > 0.0 {
                    for a in TransportCooling::ALL.into_iter().filter(|a| a.carries(c)) {
                        for d in 0..modes {
                            coeffs.push((col(VarRef::Batch { a, d, p, w }), -link));
                        }
                    }
                }
                rows.push(Row {
                    name: format!("{tag}_link_p{pid}_w{w}"),
                    coeffs: sorted(coeffs),
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
        }
    }
    // Horizon demand per medication cell.
    let demand_sense = match variant {
        ModelVariant::RelaxedOrders => Sense::Ge,
        _ => Sense::Eq,
    };
    for c in CoolingClass::ALL {
        for k in MedClass::ALL {
            for (p, &pid) in patient_ids.iter().enumerate() {
                let coeffs = (0..periods)
                    .map(|w| (col(VarRef::Meds { c, k, p, w }), 1.0))
                    .collect();
                rows.push(Row {
                    name: format!("demand_c{}_k{}_p{}", c as usize, k as usize, pid),
                    coeffs: sorted(coeffs),
                    sense: demand_sense,
                    rhs: instance.patients[pid].need_of(c, k) as f64,
                });
            }
        }
    }
    // Synchronization floor on batches per patient.
    for (p, &pid) in patient_ids.iter().enumerate() {
        let mut coeffs = Vec::new();
        for a in TransportCooling::ALL {
            for d in 0..modes {
                for w in 0..periods {
                    coeffs.push((col(VarRef::Batch { a, d, p, w }), 1.0));
                }
            }
        }
        rows.push(Row {
            name: format!("min_orders_p{pid}"),
            coeffs: sorted(coeffs),
            sense: Sense::Ge,
            rhs: instance.patients[pid].min_orders as f64,
        });
    }
    // Delivery capacity per mode and period, weighted by patients served.
    for d in 0..modes {
        for w in 0..periods {
            let mut coeffs = Vec::new();
            for a in TransportCooling::ALL {
                for (p, &pid) in patient_ids.iter().enumerate() {
                    coeffs.push((
                        col(VarRef::Batch { a, d, p, w }),
                        instance.patients[pid].multiplicity as f64,
                    ));
                }
            }
            rows.push(Row {
                name: format!("capacity_d{d}_w{w}"),
                coeffs: sorted(coeffs),
                sense: Sense::Le,
                rhs: instance.modes[d].capacity_per_period as f64,
            });
        }
    }
    // Handling workload versus staffed hours.
    for (e, emp) in instance.employees.iter().enumerate() {
        for w in 0..periods {
            let mut coeffs = Vec::new();
            for a in TransportCooling::ALL {
                for d in 0..modes {
                    for (p, &pid) in patient_ids.iter().enumerate() {
                        coeffs.push((
                            col(VarRef::Batch { a, d, p, w }),
                            emp.handling_hours[a as usize]
                                * instance.patients[pid].multiplicity as f64,
                        ));
                    }
                }
            }
            match variant {
                ModelVariant::HoursStaffing => {
                    coeffs.push((col(VarRef::StaffHours { e, w }), -1.0));
                }
                _ => {
                    coeffs.push((
                        col(VarRef::StaffPeriod { e, w }),
                        -emp.max_hours_per_period,
                    ));
                }
            }
            rows.push(Row {
                name: format!("hours_e{e}_w{w}"),
                coeffs: sorted(coeffs),
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    // Horizon headcount covers every period.
    if variant != ModelVariant::HoursStaffing {
        for (e, _) in instance.employees.iter().enumerate() {
            for w in 0..periods {
                let coeffs = vec![
                    (col(VarRef::StaffPeriod { e, w }), 1.0),
                    (col(VarRef::StaffLevel { e }), -1.0),
                ];
                rows.push(Row {
                    name: format!("staff_e{e}_w{w}"),
                    coeffs: sorted(coeffs),
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
        }
    }

    Ok(MilpModel {
        name: format!("rxmile_{}", variant.label()),
        maximize: true,
        columns,
        rows,
        vars: VarTable::Structured(vars),
        annualization: instance.annualization(),
    })
}

fn sorted(mut coeffs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    coeffs.sort_by_key(|&(c, _)| c);
    coeffs
}

/// Signed objective coefficient of a structured variable.
pub fn objective_coefficient(model: &MilpModel, r: VarRef) -> Result<f64, ModelError> {
    let vars = model.vars.structured().ok_or(ModelError::NotStructured)?;
    let idx = vars.index(r).ok_or(ModelError::UnknownVar(r))?;
    Ok(model.columns[idx].objective)
}

impl MilpModel {
    /// LP relaxation of this model.
    pub fn to_lp(&self) -> LpProblem {
        let mut lp = LpProblem::new(self.rows.len(), self.maximize);
        let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.columns.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in &row.coeffs {
                per_col[c].push((i, v));
            }
        }
        for (j, colmeta) in self.columns.iter().enumerate() {
            lp.add_column(colmeta.objective, colmeta.lower, colmeta.upper, &per_col[j]);
        }
        for (i, row) in self.rows.iter().enumerate() {
            lp.set_constraint(i, row.sense, row.rhs);
        }
        lp
    }

    /// Indices of integer-constrained columns.
    pub fn integer_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind != VarKind::Continuous)
            .map(|(i, _)| i)
    }

    /// Structural sanity: finite coefficients, bounds, unique names,
    /// non-empty rows. Returns a description of the first defect found.
    pub fn check(&self) -> Result<(), String> {
        let mut names = std::collections::BTreeSet::new();
        for c in &self.columns {
            if !c.lower.is_finite() && c.lower != f64::NEG_INFINITY {
                return Err(format!("column {}: bad lower bound", c.name));
            }
            if !c.upper.is_finite() && c.upper != f64::INFINITY {
                return Err(format!("column {}: bad upper bound", c.name));
            }
            if c.lower > c.upper {
                return Err(format!("column {}: lower exceeds upper", c.name));
            }
            if !c.objective.is_finite() {
                return Err(format!("column {}: non-finite objective", c.name));
            }
            if c.kind == VarKind::Binary && (c.lower < 0.0 || c.upper > 1.0) {
                return Err(format!("column {}: binary outside [0,1]", c.name));
            }
            if !names.insert(&c.name) {
                return Err(format!("duplicate column name {}", c.name));
            }
        }
        let mut row_names = std::collections::BTreeSet::new();
        for r in &self.rows {
            if r.coeffs.is_empty() {
                return Err(format!("row {} is empty", r.name));
            }
            if !r.rhs.is_finite() {
                return Err(format!("row {}: non-finite rhs", r.name));
            }
            for &(c, v) in &r.coeffs {
                if c >= self.columns.len() || !v.is_finite() {
                    return Err(format!("row {}: bad coefficient", r.name));
                }
            }
            if !row_names.insert(&r.name) {
                return Err(format!("duplicate row name {}", r.name));
            }
        }
        Ok(())
    }

    /// Exact structural equality of the linear program, ignoring variable
    /// tables and reporting metadata.
    pub fn same_coefficients(&self, other: &MilpModel) -> bool {
        self.maximize == other.maximize
            && self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| {
                    a.name == b.name && a.sense == b.sense && a.rhs == b.rhs && a.coeffs == b.coeffs
                })
    }

    /// Check an assignment against bounds, integrality and all rows.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> Result<(), String> {
        if x.len() != self.columns.len() {
            return Err(format!(
                "assignment has {} entries for {} columns",
                x.len(),
                self.columns.len()
            ));
        }
        for (j, c) in self.columns.iter().enumerate() {
            if x[j] < c.lower - tol || x[j] > c.upper + tol {
                return Err(format!("column {} = {} outside bounds", c.name, x[j]));
            }
            if c.kind != VarKind::Continuous && (x[j] - x[j].round()).abs() > tol {
                return Err(format!("column {} = {} not integral", c.name, x[j]));
            }
        }
        for r in &self.rows {
            let lhs: f64 = r.coeffs.iter().map(|&(c, v)| v * x[c]).sum();
            let ok = match r.sense {
                Sense::Le => lhs <= r.rhs + tol,
                Sense::Ge => lhs >= r.rhs - tol,
                Sense::Eq => (lhs - r.rhs).abs() <= tol,
            };
            if !ok {
                return Err(format!("row {} violated: {} vs {}", r.name, lhs, r.rhs));
            }
        }
        Ok(())
    }

    /// Objective value of an assignment.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, &v)| c.objective * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{CostSchedule, DeliveryMode, EmployeeType, PatientType};

    #[test]
    fn base_model_dimensions() {
        let inst = Instance::bundled();
        let model = build(&inst, ModelVariant::Base).unwrap();
        assert_eq!(model.columns.len(), 14_410);
        assert_eq!(model.rows.len(), 3_857);
        model.check().unwrap();
    }

    #[test]
    fn variant_dimensions() {
        let inst = Instance::bundled();
        let relaxed = build(&inst, ModelVariant::RelaxedOrders).unwrap();
        assert_eq!(relaxed.columns.len(), 14_410);
        assert_eq!(relaxed.rows.len(), 3_857);
        let hours = build(&inst, ModelVariant::HoursStaffing).unwrap();
        assert_eq!(hours.columns.len(), 14_408);
        assert_eq!(hours.rows.len(), 3_849);
        hours.check().unwrap();
    }

    #[test]
    fn objective_coefficients_match_schedule() {
        let inst = Instance::bundled();
        let model = build(&inst, ModelVariant::Base).unwrap();
        // p82 has multiplicity 10.
        assert_eq!(inst.patients[82].multiplicity, 10);
        let c = objective_coefficient(
            &model,
            VarRef::Batch { a: TransportCooling::NonCooled, d: 3, p: 82, w: 1 },
        )
        .unwrap();
        assert!((c - (-16.50)).abs() < 1e-9);
        let zero = objective_coefficient(
            &model,
            VarRef::Meds { c: CoolingClass::Cooled, k: MedClass::NoFee, p: 0, w: 0 },
        )
        .unwrap();
        assert_eq!(zero, 0.0);
        // p131 has multiplicity 5.
        assert_eq!(inst.patients[131].multiplicity, 5);
        let fee = objective_coefficient(
            &model,
            VarRef::Meds { c: CoolingClass::NonCooled, k: MedClass::Fee, p: 131, w: 2 },
        )
        .unwrap();
        assert!((fee - 39.70).abs() < 1e-9);
    }

    #[test]
    fn batch_columns_in_exactly_one_batch_row() {
        let inst = Instance::bundled();
        let model = build(&inst, ModelVariant::Base).unwrap();
        let vars = model.vars.structured().unwrap();
        let mut batch_row_hits = vec![0usize; model.columns.len()];
        for row in model.rows.iter().filter(|r| r.name.starts_with("one_batch_")) {
            for &(c, _) in &row.coeffs {
                batch_row_hits[c] += 1;
            }
        }
        for j in 0..vars.num_batch_cols() {
            assert_eq!(batch_row_hits[j], 1);
        }
        let mut demand_hits = vec![0usize; model.columns.len()];
        for row in model.rows.iter().filter(|r| r.name.starts_with("demand_")) {
            for &(c, _) in &row.coeffs {
                demand_hits[c] += 1;
            }
        }
        for j in vars.num_batch_cols()..vars.num_batch_cols() + vars.num_meds_cols() {
            assert_eq!(demand_hits[j], 1);
        }
    }

    #[test]
    fn var_map_round_trips() {
        let inst = Instance::bundled();
        for variant in [ModelVariant::Base, ModelVariant::HoursStaffing] {
            let model = build(&inst, variant).unwrap();
            let vars = model.vars.structured().unwrap();
            for idx in [0, 1, 7_777, 10_800, 13_000, model.columns.len() - 1] {
                let r = vars.var_of(idx).unwrap();
                assert_eq!(vars.index(r), Some(idx));
            }
            assert_eq!(vars.var_of(model.columns.len()), None);
        }
    }

    #[test]
    fn zero_multiplicity_patients_get_no_columns() {
        let mut inst = Instance::bundled();
        inst.patients[5].multiplicity = 0;
        let model = build(&inst, ModelVariant::Base).unwrap();
        let vars = model.vars.structured().unwrap();
        assert_eq!(vars.patients, 224);
        assert!(!vars.patient_ids.contains(&5));
        assert!(model.columns.iter().all(|c| !c.name.contains("_p5_")));
    }

    /// One patient with no medications still owes its synchronization
    /// batches; the model prices them at the cheapest transport cell plus
    /// one employee of each type.
    #[test]
    fn single_patient_zero_need() {
        let inst = tiny_instance();
        let model = build(&inst, ModelVariant::Base).unwrap();
        model.check().unwrap();
        assert_eq!(
            model.columns.len(),
            3 * 2 * 1 * 2 + 2 * 2 * 1 * 2 + 2 * 2 + 2
        );
        let vars = model.vars.structured().unwrap();
        assert_eq!(vars.patients, 1);
    }

    fn tiny_instance() -> Instance {
        Instance {
            patients: vec![PatientType { need: [[0, 0], [0, 0]], multiplicity: 1, min_orders: 1 }],
            modes: vec![
                DeliveryMode { name: "van".into(), capacity_per_period: 10 },
                DeliveryMode { name: "counter".into(), capacity_per_period: 2 },
            ],
            employees: vec![
                EmployeeType {
                    name: "packer".into(),
                    handling_hours: [0.1, 0.12, 0.15],
                    max_hours_per_period: 100.0,
                    hourly_wage: 30.0,
                },
                EmployeeType {
                    name: "checker".into(),
                    handling_hours: [0.02, 0.02, 0.02],
                    max_hours_per_period: 100.0,
                    hourly_wage: 40.0,
                },
            ],
            costs: CostSchedule {
                transport: vec![[10.0, 8.0, 11.0], [2.0, 2.0, 2.5]],
                fee: [0.0, 5.0],
            },
            periods: 2,
            big_m1: 4,
            big_m2: 4,
            periods_per_year: 12,
        }
    }
}
