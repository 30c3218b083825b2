//! CSV ingestion for problem instances, plus the bundled case-study dataset.
//!
//! A data directory holds six files: `patients.csv`, `transport_costs.csv`,
//! `capacities.csv`, `employees.csv`, `fees.csv` and `meta.csv`. All are
//! UTF-8, comma-separated, with a header row. Column layouts are documented
//! in the README.

use std::path::Path;

use thiserror::Error;

use crate::instance::{
    CostSchedule, DeliveryMode, EmployeeType, Instance, PatientType, Violation,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: no patient types")]
    Empty { file: String },
    #[error("invalid instance:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

/// Load and validate an instance from a directory of CSV files.
pub fn load_instance(data_dir: &Path) -> Result<Instance, DataError> {
    let read = |name: &str| -> Result<String, DataError> {
        std::fs::read_to_string(data_dir.join(name)).map_err(|source| DataError::Io {
            file: data_dir.join(name).display().to_string(),
            source,
        })
    };
    let instance = parse_instance(
        &read("patients.csv")?,
        &read("transport_costs.csv")?,
        &read("capacities.csv")?,
        &read("employees.csv")?,
        &read("fees.csv")?,
        &read("meta.csv")?,
    )?;
    let violations = instance.validate();
    if violations.is_empty() {
        Ok(instance)
    } else {
        Err(DataError::Invalid(violations))
    }
}

impl Instance {
    /// The case-study dataset shipped with the crate: 225 aggregated patient
    /// types (6,783 patients), four delivery modes, two employee types and a
    /// four-month horizon.
    pub fn bundled() -> Instance {
        parse_instance(
            include_str!("../data/patients.csv"),
            include_str!("../data/transport_costs.csv"),
            include_str!("../data/capacities.csv"),
            include_str!("../data/employees.csv"),
            include_str!("../data/fees.csv"),
            include_str!("../data/meta.csv"),
        )
        .expect("bundled dataset parses")
    }
}

fn parse_instance(
    patients_csv: &str,
    transport_csv: &str,
    capacities_csv: &str,
    employees_csv: &str,
    fees_csv: &str,
    meta_csv: &str,
) -> Result<Instance, DataError> {
    let patients = parse_patients(patients_csv)?;
    let (modes, transport) = parse_modes(transport_csv, capacities_csv)?;
    let employees = parse_employees(employees_csv)?;
    let fee = parse_fees(fees_csv)?;
    let meta = parse_meta(meta_csv)?;

    Ok(Instance {
        patients,
        modes,
        employees,
        costs: CostSchedule { transport, fee },
        periods: meta.0,
        big_m1: meta.1,
        big_m2: meta.2,
        periods_per_year: meta.3,
    })
}

struct CsvFile<'a> {
    name: &'a str,
    headers: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_csv<'a>(name: &'a str, text: &str) -> Result<CsvFile<'a>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| DataError::Malformed {
            file: name.into(),
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| DataError::Malformed {
            file: name.into(),
            line: i + 2,
            message: e.to_string(),
        })?;
        rows.push((i + 2, rec.iter().map(|f| f.to_string()).collect()));
    }
    Ok(CsvFile { name, headers, rows })
}

impl CsvFile<'_> {
    fn column(&self, header: &str) -> Result<usize, DataError> {
        self.headers
            .iter()
            .position(|h| h == header)
            .ok_or_else(|| DataError::Malformed {
                file: self.name.into(),
                line: 1,
                message: format!("missing column `{header}`"),
            })
    }

    fn field<'r>(&self, row: &'r (usize, Vec<String>), col: usize) -> Result<&'r str, DataError> {
        row.1.get(col).map(|s| s.as_str()).ok_or_else(|| DataError::Malformed {
            file: self.name.into(),
            line: row.0,
            message: format!("row has {} fields, expected at least {}", row.1.len(), col + 1),
        })
    }

    fn parse_u32(&self, row: &(usize, Vec<String>), col: usize) -> Result<u32, DataError> {
        let s = self.field(row, col)?;
        s.parse().map_err(|_| DataError::Malformed {
            file: self.name.into(),
            line: row.0,
            message: format!("`{s}` is not a non-negative integer"),
        })
    }

    fn parse_f64(&self, row: &(usize, Vec<String>), col: usize) -> Result<f64, DataError> {
        let s = self.field(row, col)?;
        let v: f64 = s.parse().map_err(|_| DataError::Malformed {
            file: self.name.into(),
            line: row.0,
            message: format!("`{s}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(DataError::Malformed {
                file: self.name.into(),
                line: row.0,
                message: format!("`{s}` is not finite"),
            });
        }
        Ok(v)
    }

    /// Monetary fields must carry at most two decimals.
    fn parse_money(&self, row: &(usize, Vec<String>), col: usize) -> Result<f64, DataError> {
        let v = self.parse_f64(row, col)?;
        let cents = v * 100.0;
        if (cents - cents.round()).abs() > 1e-6 {
            return Err(DataError::Malformed {
                file: self.name.into(),
                line: row.0,
                message: format!("monetary value `{v}` has more than two decimals"),
            });
        }
        Ok(v)
    }
}

fn parse_patients(text: &str) -> Result<Vec<PatientType>, DataError> {
    let f = read_csv("patients.csv", text)?;
    if f.rows.is_empty() {
        return Err(DataError::Empty { file: "patients.csv".into() });
    }
    let cols = [
        f.column("p")?,
        f.column("q_c0k0")?,
        f.column("q_c0k1")?,
        f.column("q_c1k0")?,
        f.column("q_c1k1")?,
        f.column("rho")?,
        f.column("sigma")?,
    ];
    let mut out = Vec::with_capacity(f.rows.len());
    for row in &f.rows {
        let id = f.parse_u32(row, cols[0])? as usize;
        if id != out.len() {
            return Err(DataError::Malformed {
                file: "patients.csv".into(),
                line: row.0,
                message: format!("patient ids must be consecutive from 0, got {id}"),
            });
        }
        out.push(PatientType {
            need: [
                [f.parse_u32(row, cols[1])?, f.parse_u32(row, cols[2])?],
                [f.parse_u32(row, cols[3])?, f.parse_u32(row, cols[4])?],
            ],
            multiplicity: f.parse_u32(row, cols[5])?,
            min_orders: f.parse_u32(row, cols[6])?,
        });
    }
    Ok(out)
}

fn parse_modes(
    transport_text: &str,
    capacities_text: &str,
) -> Result<(Vec<DeliveryMode>, Vec<[f64; 3]>), DataError> {
    let tf = read_csv("transport_costs.csv", transport_text)?;
    let name_col = tf.column("delivery_mode")?;
    let cost_cols = [
        tf.column("cooled")?,
        tf.column("non_cooled")?,
        tf.column("combination")?,
    ];
    let mut names = Vec::new();
    let mut transport = Vec::new();
    for row in &tf.rows {
        names.push(tf.field(row, name_col)?.to_string());
        transport.push([
            tf.parse_money(row, cost_cols[0])?,
            tf.parse_money(row, cost_cols[1])?,
            tf.parse_money(row, cost_cols[2])?,
        ]);
    }

    let cf = read_csv("capacities.csv", capacities_text)?;
    let cname = cf.column("delivery_mode")?;
    let cdelta = cf.column("delta_per_period")?;
    let mut capacity = vec![None; names.len()];
    for row in &cf.rows {
        let name = cf.field(row, cname)?;
        let idx = names.iter().position(|n| n == name).ok_or_else(|| DataError::Malformed {
            file: "capacities.csv".into(),
            line: row.0,
            message: format!("unknown delivery mode `{name}`"),
        })?;
        capacity[idx] = Some(cf.parse_u32(row, cdelta)?);
    }
    let mut modes = Vec::new();
    for (i, name) in names.into_iter().enumerate() {
        let capacity_per_period = capacity[i].ok_or_else(|| DataError::Malformed {
            file: "capacities.csv".into(),
            line: 1,
            message: format!("no capacity row for delivery mode `{name}`"),
        })?;
        modes.push(DeliveryMode { name, capacity_per_period });
    }
    Ok((modes, transport))
}

fn parse_employees(text: &str) -> Result<Vec<EmployeeType>, DataError> {
    let f = read_csv("employees.csv", text)?;
    let cols = [
        f.column("name")?,
        f.column("u_cooled")?,
        f.column("u_non_cooled")?,
        f.column("u_combination")?,
        f.column("theta")?,
        f.column("hourly_wage")?,
    ];
    let mut out = Vec::new();
    for row in &f.rows {
        out.push(EmployeeType {
            name: f.field(row, cols[0])?.to_string(),
            handling_hours: [
                f.parse_f64(row, cols[1])?,
                f.parse_f64(row, cols[2])?,
                f.parse_f64(row, cols[3])?,
            ],
            max_hours_per_period: f.parse_f64(row, cols[4])?,
            hourly_wage: f.parse_money(row, cols[5])?,
        });
    }
    Ok(out)
}

fn parse_fees(text: &str) -> Result<[f64; 2], DataError> {
    let f = read_csv("fees.csv", text)?;
    let class_col = f.column("med_class")?;
    let fee_col = f.column("fee")?;
    let mut fee = [None, None];
    for row in &f.rows {
        let class = f.field(row, class_col)?;
        let idx = match class {
            "k0" => 0,
            "k1" => 1,
            other => {
                return Err(DataError::Malformed {
                    file: "fees.csv".into(),
                    line: row.0,
                    message: format!("medication class must be k0 or k1, got `{other}`"),
                })
            }
        };
        fee[idx] = Some(f.parse_money(row, fee_col)?);
    }
    match fee {
        [Some(f0), Some(f1)] => Ok([f0, f1]),
        _ => Err(DataError::Malformed {
            file: "fees.csv".into(),
            line: 1,
            message: "fees.csv must define both k0 and k1".into(),
        }),
    }
}

fn parse_meta(text: &str) -> Result<(u32, u32, u32, u32), DataError> {
    let f = read_csv("meta.csv", text)?;
    let row = f.rows.first().ok_or_else(|| DataError::Malformed {
        file: "meta.csv".into(),
        line: 2,
        message: "meta.csv must have exactly one data row".into(),
    })?;
    Ok((
        f.parse_u32(row, f.column("periods")?)?,
        f.parse_u32(row, f.column("big_m1")?)?,
        f.parse_u32(row, f.column("big_m2")?)?,
        f.parse_u32(row, f.column("periods_per_year")?)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_shape() {
        let inst = Instance::bundled();
        assert_eq!(inst.periods, 4);
        assert_eq!(inst.modes.len(), 4);
        assert_eq!(inst.employees.len(), 2);
        assert_eq!(inst.big_m1, 15);
        assert_eq!(inst.big_m2, 15);
        assert!((inst.annualization() - 3.0).abs() < 1e-12);
        assert_eq!(inst.costs.fee, [0.0, 7.94]);
        assert_eq!(inst.patients[193].need, [[1, 0], [0, 14]]);
    }

    #[test]
    fn empty_patients_rejected() {
        let err = parse_patients("p,q_c0k0,q_c0k1,q_c1k0,q_c1k1,rho,sigma\n").unwrap_err();
        assert!(matches!(err, DataError::Empty { .. }));
    }

    #[test]
    fn malformed_row_reports_location() {
        let err = parse_patients("p,q_c0k0,q_c0k1,q_c1k0,q_c1k1,rho,sigma\n0,1,0,0,x,5,1\n")
            .unwrap_err();
        match err {
            DataError::Malformed { file, line, .. } => {
                assert_eq!(file, "patients.csv");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn money_must_have_two_decimals() {
        let text = "delivery_mode,cooled,non_cooled,combination\ntruck,16.625,11.64,17.32\n";
        let err = parse_modes(text, "delivery_mode,delta_per_period\ntruck,10\n").unwrap_err();
        assert!(err.to_string().contains("two decimals"));
    }

    #[test]
    fn load_from_missing_dir() {
        let err = load_instance(Path::new("/nonexistent-rxmile-data")).unwrap_err();
        assert!(matches!(err, DataError::Io { .. }));
    }
}
