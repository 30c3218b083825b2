//! (build in progress)
pub mod bnb;
pub mod dataset;
pub mod instance;
pub mod model;
pub mod scenario;
pub mod simplex;

pub use bnb::{presolve, solve_milp, BnbConfig, BnbResult, BnbStatus, BranchRule, NodeSelection};
pub use dataset::{load_instance, DataError};
pub use instance::{
    CoolingClass, CostSchedule, DeliveryMode, EmployeeType, Instance, MedClass, PatientType,
    TransportCooling, Violation,
};
pub use model::{build, objective_coefficient, MilpModel, ModelVariant, VarKind, VarRef};
pub use scenario::{apply_scenario, table10, HorizonMonths, PatientFilter, ScenarioSpec, SyncLevel};
pub use simplex::{solve_lp, warm_solve, LpProblem, LpResult, LpStatus, SolveLimits};
