//! Exact MILP solving by branch-and-bound over the LP relaxation, with
//! best-bound node selection, warm-started dual re-solves and a
//! bound-propagation presolve.

use std::io::Write;
use std::path::PathBuf;
use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{MilpModel, VarKind, VarRef, VarTable};
use crate::simplex::{
    solve_lp, warm_solve, Basis, LpError, LpProblem, LpStatus, Sense, SolveLimits,
};

/// How the branching variable is picked among fractional integer columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchRule {
    /// Globally most fractional value.
    MostFractional,
    /// Staffing columns first, then batch placements, then medication
    /// counts; most fractional within the class.
    StructuredPriority,
}

/// Order in which open nodes are explored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeSelection {
    /// Highest LP bound first (ties to the deepest, then newest node).
    BestBound,
    /// Depth-first, preferring the child on the rounded side.
    DepthFirstDive,
}

/// Branch-and-bound controls.
#[derive(Clone, Debug)]
pub struct BnbConfig {
    pub integrality_tol: f64,
    /// Relative gap at which the search may stop; 0 proves optimality.
    pub gap_target: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    pub branching: BranchRule,
    pub node_selection: NodeSelection,
    pub presolve: bool,
    pub lp_limits: SolveLimits,
    /// When set, one CSV line per processed node is appended here.
    pub node_log: Option<PathBuf>,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            integrality_tol: 1e-6,
            gap_target: 0.0,
            node_limit: 2_000_000,
            time_limit: None,
            branching: BranchRule::StructuredPriority,
            node_selection: NodeSelection::BestBound,
            presolve: true,
            lp_limits: SolveLimits::default(),
            node_log: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnbStatus {
    /// Incumbent proved optimal.
    Optimal,
    /// Search stopped at the requested gap with an incumbent in hand.
    FeasibleGapLimit,
    Infeasible,
    /// Node or time limit reached.
    Limit,
}

/// Outcome of a MILP solve.
#[derive(Clone, Debug)]
pub struct BnbResult {
    pub status: BnbStatus,
    /// Incumbent assignment (empty when none was found).
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best valid dual bound on the optimum.
    pub bound: f64,
    /// (bound - objective) / max(1, |objective|), maximization.
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall: Duration,
}

#[derive(Debug, Error)]
pub enum BnbError {
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("node LP hit the iteration limit; raise lp_limits.max_iterations")]
    NodeIterationLimit,
    #[error("node log: {0}")]
    NodeLog(std::io::Error),
}

/// One presolve bound change that pinned a column.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixing {
    pub column: usize,
    /// Row whose activity bounds forced the fixing, if any.
    pub forced_by_row: Option<usize>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PresolveError {
    #[error("row {row} cannot be satisfied within current bounds")]
    Infeasible { row: usize },
}

/// Iterated bound propagation. Returns a model with tightened (possibly
/// fixed) column bounds and the log of columns it pinned; the feasible set
/// and hence the optimum are unchanged.
pub fn presolve(model: &MilpModel) -> Result<(MilpModel, Vec<Fixing>), PresolveError> {
    let mut out = model.clone();
    let n = out.columns.len();
    let tol = 1e-9;
    let mut forced_by: Vec<Option<usize>> = vec![None; n];

    for c in out.columns.iter_mut() {
        if c.kind != VarKind::Continuous {
            c.lower = (c.lower - tol).ceil();
            c.upper = (c.upper + tol).floor();
        }
    }

    for _pass in 0..10 {
        let mut changed = false;
        for (ri, row) in model.rows.iter().enumerate() {
            // Work against <= forms: Ge rows are negated, Eq rows run both ways.
            let forms: &[(f64, f64)] = match row.sense {
                Sense::Le => &[(1.0, row.rhs)],
                Sense::Ge => &[(-1.0, -row.rhs)],
                Sense::Eq => &[(1.0, row.rhs), (-1.0, -row.rhs)],
            };
            for &(flip, rhs) in forms {
                let mut min_act = 0.0f64;
                let mut finite = true;
                for &(j, a) in &row.coeffs {
                    let a = a * flip;
                    let contrib = if a > 0.0 { a * out.columns[j].lower } else { a * out.columns[j].upper };
                    if contrib.is_finite() {
                        min_act += contrib;
                    } else {
                        finite = false;
                        break;
                    }
                }
                if row.coeffs.is_empty() {
                    if 0.0 > rhs + tol {
                        return Err(PresolveError::Infeasible { row: ri });
                    }
                    continue;
                }
                if !finite {
                    continue;
                }
                if min_act > rhs + 1e-7 {
                    return Err(PresolveError::Infeasible { row: ri });
                }
                for &(j, a) in &row.coeffs {
                    let a = a * flip;
                    let col = &mut out.columns[j];
                    let slack = rhs - min_act;
                    if a > 0.0 {
                        let mut new_u = col.lower + slack / a;
                        if col.kind != VarKind::Continuous {
                            new_u = (new_u + tol).floor();
                        }
                        if new_u < col.upper - 1e-9 {
                            col.upper = new_u;
                            forced_by[j] = Some(ri);
                            changed = true;
                            if col.lower > col.upper + 1e-9 {
                                return Err(PresolveError::Infeasible { row: ri });
                            }
                        }
                    } else {
                        let mut new_l = col.upper + slack / a;
                        if col.kind != VarKind::Continuous {
                            new_l = (new_l - tol).ceil();
                        }
                        if new_l > col.lower + 1e-9 {
                            col.lower = new_l;
                            forced_by[j] = Some(ri);
                            changed = true;
                            if col.lower > col.upper + 1e-9 {
                                return Err(PresolveError::Infeasible { row: ri });
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut fixings = Vec::new();
    for j in 0..n {
        let was = &model.columns[j];
        let now = &out.columns[j];
        if was.lower < was.upper && now.lower >= now.upper {
            fixings.push(Fixing {
                column: j,
                forced_by_row: forced_by[j],
                lower: now.lower,
                upper: now.upper,
            });
        }
    }
    Ok((out, fixings))
}

struct Node {
    parent: Option<usize>,
    depth: u32,
    bound: f64,
    change: Option<(usize, f64, f64)>,
    basis: Rc<Basis>,
}

#[derive(PartialEq)]
struct HeapKey {
    bound: f64,
    depth: u32,
    id: usize,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct NodeLog {
    out: std::io::BufWriter<std::fs::File>,
}

impl NodeLog {
    fn open(path: &PathBuf) -> Result<NodeLog, BnbError> {
        let file = std::fs::File::create(path).map_err(BnbError::NodeLog)?;
        let mut out = std::io::BufWriter::new(file);
        writeln!(out, "node,depth,action,bound,incumbent,detail").map_err(BnbError::NodeLog)?;
        Ok(NodeLog { out })
    }

    fn line(
        &mut self,
        id: usize,
        depth: u32,
        action: &str,
        bound: f64,
        incumbent: Option<f64>,
        detail: &str,
    ) -> Result<(), BnbError> {
        let inc = incumbent.map(|v| format!("{v}")).unwrap_or_default();
        writeln!(self.out, "{id},{depth},{action},{bound},{inc},{detail}")
            .map_err(BnbError::NodeLog)
    }
}

/// Solve a MILP exactly.
///
/// Deterministic under a fixed configuration without a time limit: node
/// ordering, branching and all simplex tie-breaks are index-based.
pub fn solve_milp(model: &MilpModel, config: &BnbConfig) -> Result<BnbResult, BnbError> {
    let start = Instant::now();
    let mut log = match &config.node_log {
        Some(path) => Some(NodeLog::open(path)?),
        None => None,
    };

    let presolved;
    let work: &MilpModel = if config.presolve {
        match presolve(model) {
            Ok((m, _)) => {
                presolved = m;
                &presolved
            }
            Err(PresolveError::Infeasible { .. }) => {
                return Ok(infeasible_result(start, 0));
            }
        }
    } else {
        model
    };

    let mut lp = work.to_lp();
    let prune_eps = 1e-7;
    let int_cols: Vec<usize> = work.integer_columns().collect();
    let classes = branch_classes(work, &int_cols);

    let root = solve_lp(&lp, &config.lp_limits)?;
    let mut lp_iterations = root.iterations;
    match root.status {
        LpStatus::Infeasible => {
            if let Some(log) = &mut log {
                log.line(0, 0, "infeasible", f64::NAN, None, "root")?;
            }
            return Ok(infeasible_result(start, 1));
        }
        LpStatus::Unbounded => return Err(BnbError::Unbounded),
        LpStatus::IterationLimit => return Err(BnbError::NodeIterationLimit),
        LpStatus::Optimal => {}
    }

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    // Root rounding: cheap first incumbent when rounding happens to be feasible.
    {
        let mut rounded = root.x.clone();
        for &j in &int_cols {
            rounded[j] = rounded[j].round();
        }
        if work.check_feasible(&rounded, 1e-6).is_ok() {
            let obj = work.objective_value(&rounded);
            if obj < root.objective - prune_eps {
                incumbent = Some((obj, rounded));
            }
        }
    }

    let mut nodes: Vec<Node> = vec![Node {
        parent: None,
        depth: 0,
        bound: root.objective,
        change: None,
        basis: Rc::new(root.basis.clone()),
    }];
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(HeapKey { bound: root.objective, depth: 0, id: 0 });
    let mut stack: Vec<usize> = vec![0];

    let mut processed = 0usize;
    let mut limit_hit = false;

    while let Some(idx) = match config.node_selection {
        NodeSelection::BestBound => heap.pop().map(|k| k.id),
        NodeSelection::DepthFirstDive => stack.pop(),
    } {
        let inc_obj = incumbent.as_ref().map(|(o, _)| *o);
        if let Some(inc) = inc_obj {
            if nodes[idx].bound <= inc + prune_eps {
                if config.node_selection == NodeSelection::BestBound {
                    // Best-bound order: every remaining node is dominated.
                    break;
                }
                if let Some(log) = &mut log {
                    log.line(idx, nodes[idx].depth, "pruned-bound", nodes[idx].bound, inc_obj, "")?;
                }
                continue;
            }
            if config.gap_target > 0.0 {
                let bound = open_bound(&heap, &stack, &nodes, config.node_selection, inc);
                if relative_gap(bound, inc) <= config.gap_target {
                    let (objective, values) = incumbent.unwrap();
                    return Ok(BnbResult {
                        status: BnbStatus::FeasibleGapLimit,
                        gap: relative_gap(bound, objective),
                        values,
                        objective,
                        bound,
                        nodes: processed,
                        lp_iterations,
                        wall: start.elapsed(),
                    });
                }
            }
        }
        if processed >= config.node_limit
            || config.time_limit.is_some_and(|t| start.elapsed() >= t)
        {
            limit_hit = true;
            // Unexplored: keep it for the final bound computation.
            match config.node_selection {
                NodeSelection::BestBound => {
                    heap.push(HeapKey { bound: nodes[idx].bound, depth: nodes[idx].depth, id: idx })
                }
                NodeSelection::DepthFirstDive => stack.push(idx),
            }
            break;
        }
        processed += 1;

        // Apply the branch path onto the LP, warm-solve, then restore.
        let mut trail: Vec<(usize, f64, f64)> = Vec::new();
        let mut path: Vec<(usize, f64, f64)> = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            if let Some(ch) = nodes[i].change {
                path.push(ch);
            }
            cur = nodes[i].parent;
        }
        for &(col, lo, hi) in path.iter().rev() {
            let (ol, ou) = lp.bounds(col);
            trail.push((col, ol, ou));
            lp.set_bounds(col, lo.max(ol), hi.min(ou));
        }
        let res = warm_solve(&lp, &config.lp_limits, &nodes[idx].basis);
        for &(col, ol, ou) in trail.iter().rev() {
            lp.set_bounds(col, ol, ou);
        }
        let res = res?;
        lp_iterations += res.iterations;
        let depth = nodes[idx].depth;

        match res.status {
            LpStatus::Infeasible => {
                if let Some(log) = &mut log {
                    log.line(idx, depth, "infeasible", f64::NAN, inc_obj, "")?;
                }
                continue;
            }
            LpStatus::Unbounded => return Err(BnbError::Unbounded),
            LpStatus::IterationLimit => return Err(BnbError::NodeIterationLimit),
            LpStatus::Optimal => {}
        }
        // A child bound can never exceed its parent's.
        let bound = res.objective.min(nodes[idx].bound);
        if let Some(inc) = inc_obj {
            if bound <= inc + prune_eps {
                if let Some(log) = &mut log {
                    log.line(idx, depth, "pruned-bound", bound, inc_obj, "")?;
                }
                continue;
            }
        }

        if let Some(values) = repair_staff_rounding(work, &int_cols, &classes, &res.x, config.integrality_tol)
        {
            let obj = work.objective_value(&values);
            let better = incumbent.as_ref().map_or(true, |(best, _)| obj > *best);
            if better {
                incumbent = Some((obj, values));
            }
            if let Some(log) = &mut log {
                log.line(idx, depth, "integral", bound, Some(obj), "staff-rounding")?;
            }
            continue;
        }
        let frac = select_branch(&int_cols, &classes, &res.x, config);
        match frac {
            None => {
                let mut values = res.x.clone();
                for &j in &int_cols {
                    values[j] = values[j].round();
                }
                let obj = work.objective_value(&values);
                let better = incumbent.as_ref().map_or(true, |(best, _)| obj > *best);
                if better {
                    incumbent = Some((obj, values));
                }
                if let Some(log) = &mut log {
                    log.line(idx, depth, "integral", bound, Some(obj), "")?;
                }
            }
            Some(j) => {
                let v = res.x[j];
                if let Some(log) = &mut log {
                    log.line(idx, depth, "branched", bound, inc_obj, &work.columns[j].name)?;
                }
                let basis = Rc::new(res.basis);
                let (lj, uj) = (work.columns[j].lower, work.columns[j].upper);
                let down = Node {
                    parent: Some(idx),
                    depth: depth + 1,
                    bound,
                    change: Some((j, lj, v.floor())),
                    basis: Rc::clone(&basis),
                };
                let up = Node {
                    parent: Some(idx),
                    depth: depth + 1,
                    bound,
                    change: Some((j, v.ceil(), uj)),
                    basis,
                };
                let down_first = v.fract() < 0.5;
                let children = if down_first { [down, up] } else { [up, down] };
                for child in children {
                    nodes.push(child);
                    let id = nodes.len() - 1;
                    match config.node_selection {
                        NodeSelection::BestBound => {
                            heap.push(HeapKey { bound, depth: depth + 1, id })
                        }
                        // Pushed in reverse preference order for LIFO pop.
                        NodeSelection::DepthFirstDive => stack.push(id),
                    }
                }
                if config.node_selection == NodeSelection::DepthFirstDive {
                    let len = stack.len();
                    stack.swap(len - 1, len - 2);
                }
            }
        }
    }

    let wall = start.elapsed();
    match incumbent {
        Some((objective, values)) => {
            let bound = if limit_hit {
                open_bound(&heap, &stack, &nodes, config.node_selection, objective)
            } else {
                objective
            };
            let gap = relative_gap(bound, objective);
            let status = if limit_hit { BnbStatus::Limit } else { BnbStatus::Optimal };
            Ok(BnbResult {
                status,
                values,
                objective,
                bound,
                gap,
                nodes: processed,
                lp_iterations,
                wall,
            })
        }
        None => {
            if limit_hit {
                let bound =
                    open_bound(&heap, &stack, &nodes, config.node_selection, f64::NEG_INFINITY);
                Ok(BnbResult {
                    status: BnbStatus::Limit,
                    values: Vec::new(),
                    objective: f64::NEG_INFINITY,
                    bound,
                    gap: f64::INFINITY,
                    nodes: processed,
                    lp_iterations,
                    wall,
                })
            } else {
                Ok(infeasible_result_with(start, processed, lp_iterations))
            }
        }
    }
}

fn infeasible_result(start: Instant, nodes: usize) -> BnbResult {
    infeasible_result_with(start, nodes, 0)
}

fn infeasible_result_with(start: Instant, nodes: usize, lp_iterations: usize) -> BnbResult {
    BnbResult {
        status: BnbStatus::Infeasible,
        values: Vec::new(),
        objective: f64::NEG_INFINITY,
        bound: f64::NEG_INFINITY,
        gap: 0.0,
        nodes,
        lp_iterations,
        wall: start.elapsed(),
    }
}

fn relative_gap(bound: f64, objective: f64) -> f64 {
    ((bound - objective) / objective.abs().max(1.0)).max(0.0)
}

fn open_bound(
    heap: &std::collections::BinaryHeap<HeapKey>,
    stack: &[usize],
    nodes: &[Node],
    selection: NodeSelection,
    incumbent: f64,
) -> f64 {
    let open_max = match selection {
        NodeSelection::BestBound => heap.peek().map(|k| k.bound),
        NodeSelection::DepthFirstDive => {
            stack.iter().map(|&i| nodes[i].bound).fold(None, |acc: Option<f64>, b| {
                Some(acc.map_or(b, |a| a.max(b)))
            })
        }
    };
    match open_max {
        Some(b) => b.max(incumbent),
        None => incumbent,
    }
}

/// Branching class per column: lower sorts earlier. Headcount levels come
/// first (they carry the large objective steps), then batch binaries, then
/// medication counts. Per-period staffing goes last: it has no objective
/// coefficient and usually rounds up for free.
fn branch_classes(model: &MilpModel, int_cols: &[usize]) -> Vec<u8> {
    let mut classes = vec![2u8; model.columns.len()];
    if let VarTable::Structured(vars) = &model.vars {
        for &j in int_cols {
            classes[j] = match vars.var_of(j) {
                Some(VarRef::StaffLevel { .. }) => 0,
                Some(VarRef::Batch { .. }) => 1,
                Some(VarRef::StaffPeriod { .. }) => 3,
                _ => 2,
            };
        }
    } else {
        for &j in int_cols {
            classes[j] = 1;
        }
    }
    classes
}

/// When the only fractional integers are per-period staffing counts,
/// rounding them up is feasible whenever the headcount level covers the
/// ceiling; that turns the node into an incumbent without branching.
fn repair_staff_rounding(
    model: &MilpModel,
    int_cols: &[usize],
    classes: &[u8],
    x: &[f64],
    tol: f64,
) -> Option<Vec<f64>> {
    let mut out = x.to_vec();
    let mut repaired = false;
    for &j in int_cols {
        let frac = (out[j] - out[j].round()).abs();
        if frac <= tol {
            out[j] = out[j].round();
        } else if classes[j] == 3 {
            out[j] = out[j].ceil();
            repaired = true;
        } else {
            return None;
        }
    }
    if !repaired {
        return None;
    }
    model.check_feasible(&out, 1e-6).ok().map(|_| out)
}

fn select_branch(
    int_cols: &[usize],
    classes: &[u8],
    x: &[f64],
    config: &BnbConfig,
) -> Option<usize> {
    let tol = config.integrality_tol;
    let mut best: Option<(u8, f64, usize)> = None;
    for &j in int_cols {
        let v = x[j];
        let frac = (v - v.round()).abs();
        if frac <= tol {
            continue;
        }
        let score = (v - v.floor()).min(v.ceil() - v);
        let class = match config.branching {
            BranchRule::MostFractional => 1,
            BranchRule::StructuredPriority => classes[j],
        };
        let better = match &best {
            None => true,
            Some((bc, bs, bj)) => {
                class < *bc
                    || (class == *bc && score > *bs + 1e-12)
                    || (class == *bc && (score - *bs).abs() <= 1e-12 && j < *bj)
            }
        };
        if better {
            best = Some((class, score, j));
        }
    }
    best.map(|(_, _, j)| j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Column, MilpModel, Row, VarTable};
    use crate::simplex::Sense;

    fn knapsack() -> MilpModel {
        // maximize 5a + 4b + 3c s.t. 2a + 3b + c <= 5, binaries.
        let columns = vec![
            Column { name: "a".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 5.0 },
            Column { name: "b".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 4.0 },
            Column { name: "c".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 3.0 },
        ];
        let rows = vec![Row {
            name: "w".into(),
            coeffs: vec![(0, 2.0), (1, 3.0), (2, 1.0)],
            sense: Sense::Le,
            rhs: 5.0,
        }];
        MilpModel {
            name: "knapsack".into(),
            maximize: true,
            columns,
            rows,
            vars: VarTable::Plain,
            annualization: 1.0,
        }
    }

    #[test]
    fn knapsack_optimum() {
        let model = knapsack();
        let res = solve_milp(&model, &BnbConfig::default()).unwrap();
        assert_eq!(res.status, BnbStatus::Optimal);
        assert!((res.objective - 9.0).abs() < 1e-9);
        assert_eq!(res.values, vec![1.0, 1.0, 0.0]);
        assert!(res.gap <= 1e-9);
    }

    #[test]
    fn integral_root_needs_one_node() {
        // Assignment-like LP whose relaxation is already integral.
        let columns = vec![
            Column { name: "x00".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 3.0 },
            Column { name: "x01".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 1.0 },
            Column { name: "x10".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 1.0 },
            Column { name: "x11".into(), lower: 0.0, upper: 1.0, kind: VarKind::Binary, objective: 3.0 },
        ];
        let rows = vec![
            Row { name: "r0".into(), coeffs: vec![(0, 1.0), (1, 1.0)], sense: Sense::Eq, rhs: 1.0 },
            Row { name: "r1".into(), coeffs: vec![(2, 1.0), (3, 1.0)], sense: Sense::Eq, rhs: 1.0 },
            Row { name: "c0".into(), coeffs: vec![(0, 1.0), (2, 1.0)], sense: Sense::Le, rhs: 1.0 },
            Row { name: "c1".into(), coeffs: vec![(1, 1.0), (3, 1.0)], sense: Sense::Le, rhs: 1.0 },
        ];
        let model = MilpModel {
            name: "assign".into(),
            maximize: true,
            columns,
            rows,
            vars: VarTable::Plain,
            annualization: 1.0,
        };
        let res = solve_milp(&model, &BnbConfig::default()).unwrap();
        assert_eq!(res.status, BnbStatus::Optimal);
        assert!((res.objective - 6.0).abs() < 1e-9);
        assert_eq!(res.nodes, 1);
    }

    #[test]
    fn infeasible_binaries() {
        let columns = vec![Column {
            name: "x".into(),
            lower: 0.0,
            upper: 1.0,
            kind: VarKind::Binary,
            objective: 1.0,
        }];
        let rows = vec![Row {
            name: "need2".into(),
            coeffs: vec![(0, 1.0)],
            sense: Sense::Ge,
            rhs: 2.0,
        }];
        let model = MilpModel {
            name: "no".into(),
            maximize: true,
            columns,
            rows,
            vars: VarTable::Plain,
            annualization: 1.0,
        };
        let res = solve_milp(&model, &BnbConfig::default()).unwrap();
        assert_eq!(res.status, BnbStatus::Infeasible);
    }

    #[test]
    fn presolve_fixes_forced_columns() {
        let model = knapsack();
        let mut tight = model.clone();
        // With rhs 1 only column c fits; a and b are forced off.
        tight.rows[0].rhs = 1.0;
        let (reduced, fixings) = presolve(&tight).unwrap();
        assert!(reduced.columns[0].upper == 0.0);
        assert!(reduced.columns[1].upper == 0.0);
        assert_eq!(fixings.len(), 2);
        assert!(fixings.iter().all(|f| f.forced_by_row == Some(0)));
        // Optimum unchanged by presolve.
        let a = solve_milp(&tight, &BnbConfig { presolve: false, ..Default::default() }).unwrap();
        let b = solve_milp(&tight, &BnbConfig::default()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }

    #[test]
    fn presolve_detects_violated_empty_row() {
        let mut model = knapsack();
        model.rows.push(Row {
            name: "void".into(),
            coeffs: vec![],
            sense: Sense::Le,
            rhs: -1.0,
        });
        assert_eq!(presolve(&model).unwrap_err(), PresolveError::Infeasible { row: 1 });
        let res = solve_milp(&model, &BnbConfig::default()).unwrap();
        assert_eq!(res.status, BnbStatus::Infeasible);
    }

    #[test]
    fn dive_matches_best_bound() {
        let model = knapsack();
        let dive = solve_milp(
            &model,
            &BnbConfig { node_selection: NodeSelection::DepthFirstDive, ..Default::default() },
        )
        .unwrap();
        assert_eq!(dive.status, BnbStatus::Optimal);
        assert!((dive.objective - 9.0).abs() < 1e-9);
    }
}
