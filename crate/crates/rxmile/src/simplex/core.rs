//! The working solver: primal and dual bounded-variable simplex over a
//! shared basis representation.

use super::lu::LuFactors;
use super::{Basis, BasisStatus, LpError, LpProblem, LpResult, LpStatus, Sense, SolveLimits};

const PIVOT_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 100;
const DEGEN_STREAK_FOR_BLAND: usize = 60;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    Basic(u32),
    Lower,
    Upper,
    Free,
}

struct Eta {
    pos: usize,
    pivot: f64,
    col: Vec<(usize, f64)>,
}

struct Solver<'a> {
    p: &'a LpProblem,
    n: usize,
    m: usize,
    ntot: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    obj: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    lu: LuFactors,
    etas: Vec<Eta>,
    // Row-major view of the structural columns, for pivotal-row pricing.
    row_ptr: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    feas_tol: f64,
    opt_tol: f64,
    degen_streak: usize,
    banned: Vec<usize>,
}

enum LoopEnd {
    Done,
    Unbounded,
    PrimalInfeasible,
    IterationLimit,
}

impl<'a> Solver<'a> {
    fn new(p: &'a LpProblem, limits: &SolveLimits) -> Solver<'a> {
        let n = p.num_cols();
        let m = p.num_rows();
        let ntot = n + m;
        let mut lower = Vec::with_capacity(ntot);
        let mut upper = Vec::with_capacity(ntot);
        let mut obj = Vec::with_capacity(ntot);
        for j in 0..n {
            let (l, u) = p.bounds(j);
            lower.push(l);
            upper.push(u);
            obj.push(if p.maximize() { p.objective_coef(j) } else { -p.objective_coef(j) });
        }
        for i in 0..m {
            let (l, u) = match p.sense(i) {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(l);
            upper.push(u);
            obj.push(0.0);
        }
        let mut row_counts = vec![0usize; m];
        for j in 0..n {
            let (rows, _) = p.column(j);
            for &r in rows {
                row_counts[r] += 1;
            }
        }
        let mut row_ptr = vec![0usize; m + 1];
        for i in 0..m {
            row_ptr[i + 1] = row_ptr[i] + row_counts[i];
        }
        let mut row_cols = vec![0u32; row_ptr[m]];
        let mut row_vals = vec![0.0f64; row_ptr[m]];
        let mut fill = row_ptr.clone();
        for j in 0..n {
            let (rows, vals) = p.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                row_cols[fill[r]] = j as u32;
                row_vals[fill[r]] = v;
                fill[r] += 1;
            }
        }
        Solver {
            p,
            n,
            m,
            ntot,
            lower,
            upper,
            obj,
            state: vec![State::Lower; ntot],
            basis: Vec::new(),
            xb: vec![0.0; m],
            lu: LuFactors::factor(0, |_| (Vec::new(), Vec::new())).unwrap(),
            etas: Vec::new(),
            row_ptr,
            row_cols,
            row_vals,
            iterations: 0,
            max_iterations: limits.max_iterations,
            feas_tol: limits.feas_tol,
            opt_tol: limits.opt_tol,
            degen_streak: 0,
            banned: Vec::new(),
        }
    }

    fn col_entries(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if j < self.n {
            let (rows, vals) = self.p.column(j);
            out.extend(rows.iter().copied().zip(vals.iter().copied()));
        } else {
            out.push((j - self.n, 1.0));
        }
    }

    fn default_nonbasic_state(&self, j: usize) -> State {
        let (l, u) = (self.lower[j], self.upper[j]);
        let c = self.obj[j];
        if l.is_finite() && u.is_finite() {
            if c > self.opt_tol {
                State::Upper
            } else {
                State::Lower
            }
        } else if l.is_finite() {
            State::Lower
        } else if u.is_finite() {
            State::Upper
        } else {
            State::Free
        }
    }

    fn slack_basis(&mut self) {
        for j in 0..self.n {
            self.state[j] = self.default_nonbasic_state(j);
        }
        self.basis = (self.n..self.ntot).collect();
        for (pos, &j) in self.basis.iter().enumerate() {
            self.state[j] = State::Basic(pos as u32);
        }
    }

    fn install_basis(&mut self, basis: &Basis) -> bool {
        if basis.statuses.len() != self.ntot {
            return false;
        }
        let mut cols = Vec::new();
        for (j, &s) in basis.statuses.iter().enumerate() {
            if s == BasisStatus::Basic {
                cols.push(j);
            }
        }
        if cols.len() != self.m {
            return false;
        }
        for (j, &s) in basis.statuses.iter().enumerate() {
            self.state[j] = match s {
                BasisStatus::Basic => State::Basic(0),
                BasisStatus::Lower => {
                    if self.lower[j].is_finite() {
                        State::Lower
                    } else if self.upper[j].is_finite() {
                        State::Upper
                    } else {
                        State::Free
                    }
                }
                BasisStatus::Upper => {
                    if self.upper[j].is_finite() {
                        State::Upper
                    } else if self.lower[j].is_finite() {
                        State::Lower
                    } else {
                        State::Free
                    }
                }
                BasisStatus::Free => State::Free,
            };
        }
        self.basis = cols;
        for (pos, &j) in self.basis.iter().enumerate() {
            self.state[j] = State::Basic(pos as u32);
        }
        true
    }

    fn factorize(&mut self) -> Result<(), LpError> {
        let lu = LuFactors::factor(self.m, |k| {
            let j = self.basis[k];
            if j < self.n {
                let (rows, vals) = self.p.column(j);
                (rows.to_vec(), vals.to_vec())
            } else {
                (vec![j - self.n], vec![1.0])
            }
        });
        match lu {
            Ok(f) => {
                self.lu = f;
                self.etas.clear();
                Ok(())
            }
            Err(e) => Err(LpError::Numerical(format!(
                "singular basis at elimination stage {}",
                e.stage
            ))),
        }
    }

    fn ftran(&self, v: &mut Vec<f64>) {
        self.lu.ftran(v);
        for eta in &self.etas {
            let xr = v[eta.pos] / eta.pivot;
            v[eta.pos] = xr;
            if xr != 0.0 {
                for &(i, w) in &eta.col {
                    v[i] -= w * xr;
                }
            }
        }
    }

    fn btran(&self, v: &mut Vec<f64>) {
        for eta in self.etas.iter().rev() {
            let mut acc = v[eta.pos];
            for &(i, w) in &eta.col {
                acc -= w * v[i];
            }
            v[eta.pos] = acc / eta.pivot;
        }
        self.lu.btran(v);
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            State::Lower => self.lower[j],
            State::Upper => self.upper[j],
            State::Free => 0.0,
            State::Basic(pos) => self.xb[pos as usize],
        }
    }

    fn compute_xb(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for i in 0..self.m {
            rhs[i] = self.p.rhs(i);
        }
        let mut entries = Vec::new();
        for j in 0..self.ntot {
            if matches!(self.state[j], State::Basic(_)) {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                self.col_entries(j, &mut entries);
                for &(r, a) in &entries {
                    rhs[r] -= a * v;
                }
            }
        }
        self.ftran(&mut rhs);
        self.xb = rhs;
    }

    fn duals(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.m];
        for (pos, &j) in self.basis.iter().enumerate() {
            c[pos] = self.obj[j];
        }
        self.btran(&mut c);
        c
    }

    fn reduced_cost(&self, j: usize, y: &[f64], entries: &mut Vec<(usize, f64)>) -> f64 {
        self.col_entries(j, entries);
        let mut d = self.obj[j];
        for &(r, a) in entries.iter() {
            d -= y[r] * a;
        }
        d
    }

    fn primal_infeasibility(&self) -> f64 {
        let mut total = 0.0;
        for (pos, &j) in self.basis.iter().enumerate() {
            let x = self.xb[pos];
            if x < self.lower[j] - self.feas_tol {
                total += self.lower[j] - x;
            } else if x > self.upper[j] + self.feas_tol {
                total += x - self.upper[j];
            }
        }
        total
    }

    fn dual_feasible(&self) -> bool {
        let y = self.duals();
        let mut entries = Vec::new();
        for j in 0..self.ntot {
            if matches!(self.state[j], State::Basic(_)) || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.reduced_cost(j, &y, &mut entries);
            let ok = match self.state[j] {
                State::Lower => d <= self.opt_tol.max(1e-7),
                State::Upper => d >= -self.opt_tol.max(1e-7),
                State::Free => d.abs() <= self.opt_tol.max(1e-7),
                State::Basic(_) => true,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn maybe_refactor(&mut self) -> Result<(), LpError> {
        if self.etas.len() >= REFACTOR_EVERY {
            self.factorize()?;
            self.compute_xb();
        }
        Ok(())
    }

    /// One primal simplex run. `phase1` minimizes total bound violation with
    /// a composite objective instead of optimizing `obj`.
    fn primal(&mut self, phase1: bool) -> Result<LoopEnd, LpError> {
        let mut entries = Vec::new();
        loop {
            if self.iterations >= self.max_iterations {
                return Ok(LoopEnd::IterationLimit);
            }
            self.maybe_refactor()?;

            let mut cb = vec![0.0; self.m];
            let mut infeasible = false;
            for (pos, &j) in self.basis.iter().enumerate() {
                if phase1 {
                    let x = self.xb[pos];
                    if x < self.lower[j] - self.feas_tol {
                        cb[pos] = 1.0;
                        infeasible = true;
                    } else if x > self.upper[j] + self.feas_tol {
                        cb[pos] = -1.0;
                        infeasible = true;
                    }
                } else {
                    cb[pos] = self.obj[j];
                }
            }
            if phase1 && !infeasible {
                return Ok(LoopEnd::Done);
            }
            let mut y = cb;
            self.btran(&mut y);

            // Pricing.
            let bland = self.degen_streak >= DEGEN_STREAK_FOR_BLAND;
            let mut best: Option<(usize, f64, i8)> = None;
            for j in 0..self.ntot {
                if matches!(self.state[j], State::Basic(_))
                    || self.lower[j] == self.upper[j]
                    || self.banned.contains(&j)
                {
                    continue;
                }
                let c = if phase1 { 0.0 } else { self.obj[j] };
                self.col_entries(j, &mut entries);
                let mut d = c;
                for &(r, a) in &entries {
                    d -= y[r] * a;
                }
                let dir: i8 = match self.state[j] {
                    State::Lower if d > self.opt_tol => 1,
                    State::Upper if d < -self.opt_tol => -1,
                    State::Free if d > self.opt_tol => 1,
                    State::Free if d < -self.opt_tol => -1,
                    _ => continue,
                };
                match &best {
                    _ if bland => {
                        best = Some((j, d, dir));
                        break;
                    }
                    None => best = Some((j, d, dir)),
                    Some((_, bd, _)) if d.abs() > bd.abs() => best = Some((j, d, dir)),
                    _ => {}
                }
            }
            let Some((q, _, dir)) = best else {
                return Ok(if phase1 { LoopEnd::PrimalInfeasible } else { LoopEnd::Done });
            };
            let sigma = dir as f64;

            let mut w = vec![0.0; self.m];
            self.col_entries(q, &mut entries);
            for &(r, a) in &entries {
                w[r] = a;
            }
            self.ftran(&mut w);

            // Ratio test.
            let own_range = self.upper[q] - self.lower[q];
            let mut t_best = if own_range.is_finite() { own_range } else { f64::INFINITY };
            let mut leave: Option<(usize, f64, bool)> = None; // (pos, |w|, to_upper)
            for pos in 0..self.m {
                let wv = w[pos];
                if wv.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basis[pos];
                let eff = sigma * wv;
                let x = self.xb[pos];
                let (l, u) = (self.lower[j], self.upper[j]);
                let below = phase1 && x < l - self.feas_tol;
                let above = phase1 && x > u + self.feas_tol;
                let (t, to_upper) = if below {
                    if eff < 0.0 {
                        ((l - x) / -eff, false)
                    } else {
                        continue;
                    }
                } else if above {
                    if eff > 0.0 {
                        ((x - u) / eff, true)
                    } else {
                        continue;
                    }
                } else if eff > 0.0 {
                    if l.is_finite() {
                        ((x - l) / eff, false)
                    } else {
                        continue;
                    }
                } else if u.is_finite() {
                    ((u - x) / -eff, true)
                } else {
                    continue;
                };
                let t = t.max(0.0);
                let replace = if t < t_best - 1e-10 {
                    true
                } else if t <= t_best + 1e-10 {
                    match &leave {
                        None => false,
                        Some((_, bw, _)) => wv.abs() > *bw,
                    }
                } else {
                    false
                };
                if replace {
                    t_best = t.min(t_best);
                    leave = Some((pos, wv.abs(), to_upper));
                }
            }

            if t_best.is_infinite() {
                return Ok(LoopEnd::Unbounded);
            }
            self.iterations += 1;
            if t_best <= 1e-10 {
                self.degen_streak += 1;
            } else {
                self.degen_streak = 0;
            }

            match leave {
                None => {
                    // Bound flip across the entering variable's own range.
                    for pos in 0..self.m {
                        if w[pos] != 0.0 {
                            self.xb[pos] -= own_range * sigma * w[pos];
                        }
                    }
                    self.state[q] =
                        if sigma > 0.0 { State::Upper } else { State::Lower };
                }
                Some((r, _, to_upper)) => {
                    if w[r].abs() < PIVOT_TOL * 10.0 && !self.etas.is_empty() {
                        // Suspicious pivot through a stale factorization.
                        self.factorize()?;
                        self.compute_xb();
                        continue;
                    }
                    let entering_value = self.nonbasic_value(q) + sigma * t_best;
                    for pos in 0..self.m {
                        if pos != r && w[pos] != 0.0 {
                            self.xb[pos] -= t_best * sigma * w[pos];
                        }
                    }
                    let leaving = self.basis[r];
                    self.state[leaving] = if to_upper { State::Upper } else { State::Lower };
                    self.basis[r] = q;
                    self.state[q] = State::Basic(r as u32);
                    self.xb[r] = entering_value;
                    self.push_eta(r, w);
                }
            }
        }
    }

    /// Dual simplex from a dual-feasible basis. Dual values are maintained
    /// incrementally and refreshed at every refactorization.
    fn dual(&mut self) -> Result<LoopEnd, LpError> {
        let mut entries = Vec::new();
        let mut y = self.duals();
        let mut alpha_dense = vec![0.0f64; self.ntot];
        let mut touched: Vec<u32> = Vec::new();
        loop {
            if self.iterations >= self.max_iterations {
                return Ok(LoopEnd::IterationLimit);
            }
            if self.etas.len() >= REFACTOR_EVERY {
                self.factorize()?;
                self.compute_xb();
                y = self.duals();
            }

            // Leaving: the most violated basic variable.
            let bland = self.degen_streak >= DEGEN_STREAK_FOR_BLAND;
            let mut leave: Option<(usize, f64, bool)> = None; // (pos, violation, below)
            for pos in 0..self.m {
                let j = self.basis[pos];
                let x = self.xb[pos];
                let below = self.lower[j] - x;
                let above = x - self.upper[j];
                let (v, is_below) = if below > above { (below, true) } else { (above, false) };
                if v <= self.feas_tol {
                    continue;
                }
                let better = match &leave {
                    None => true,
                    _ if bland => false,
                    Some((_, bv, _)) => v > *bv,
                };
                if better {
                    leave = Some((pos, v, is_below));
                    if bland {
                        break;
                    }
                }
            }
            let Some((r, _, below)) = leave else {
                return Ok(LoopEnd::Done);
            };

            let mut rho = vec![0.0; self.m];
            rho[r] = 1.0;
            self.btran(&mut rho);

            // Pivotal row, scattered over the rows rho actually touches.
            for &j in &touched {
                alpha_dense[j as usize] = 0.0;
            }
            touched.clear();
            for (i, &ri) in rho.iter().enumerate() {
                if ri.abs() <= 1e-13 {
                    continue;
                }
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    let j = self.row_cols[k];
                    if alpha_dense[j as usize] == 0.0 {
                        touched.push(j);
                    }
                    alpha_dense[j as usize] += ri * self.row_vals[k];
                }
                let slack = (self.n + i) as u32;
                if alpha_dense[slack as usize] == 0.0 {
                    touched.push(slack);
                }
                alpha_dense[slack as usize] += ri;
            }

            // Breakpoints of the dual step: sign-eligible nonbasics sorted
            // by |d/alpha|. Boxed candidates crossed while the slope stays
            // positive get bound-flipped; the one that exhausts the slope
            // enters the basis.
            let mut cands: Vec<(f64, usize, f64)> = Vec::new(); // (ratio, j, alpha)
            for &jt in &touched {
                let j = jt as usize;
                if matches!(self.state[j], State::Basic(_))
                    || self.lower[j] == self.upper[j]
                    || self.banned.contains(&j)
                {
                    continue;
                }
                let alpha = alpha_dense[j];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let eligible = match (self.state[j], below) {
                    (State::Lower, true) => alpha < 0.0,
                    (State::Lower, false) => alpha > 0.0,
                    (State::Upper, true) => alpha > 0.0,
                    (State::Upper, false) => alpha < 0.0,
                    (State::Free, _) => true,
                    (State::Basic(_), _) => false,
                };
                if !eligible {
                    continue;
                }
                self.col_entries(j, &mut entries);
                let mut d = self.obj[j];
                for &(row, a) in &entries {
                    d -= y[row] * a;
                }
                cands.push(((d / alpha).abs(), j, alpha));
            }
            if cands.is_empty() {
                return Ok(LoopEnd::PrimalInfeasible);
            }
            if bland {
                cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            } else {
                cands.sort_by(|a, b| {
                    a.0.total_cmp(&b.0)
                        .then(b.2.abs().total_cmp(&a.2.abs()))
                        .then(a.1.cmp(&b.1))
                });
            }

            let jl = self.basis[r];
            let viol_mag = if below {
                self.lower[jl] - self.xb[r]
            } else {
                self.xb[r] - self.upper[jl]
            };
            let mut slope = viol_mag;
            let mut flips: Vec<usize> = Vec::new();
            let mut entering: Option<(usize, f64)> = None;
            for &(ratio, j, alpha) in &cands {
                let range = self.upper[j] - self.lower[j];
                let drop = if range.is_finite() { alpha.abs() * range } else { f64::INFINITY };
                if !bland && drop < slope - 1e-12 && matches!(self.state[j], State::Lower | State::Upper)
                {
                    flips.push(j);
                    slope -= drop;
                } else {
                    entering = Some((j, ratio));
                    break;
                }
            }
            let Some((q, ratio)) = entering else {
                // Every candidate flipped and the row stays violated.
                return Ok(LoopEnd::PrimalInfeasible);
            };

            // Apply flips in one batched right-hand-side update.
            if !flips.is_empty() {
                let mut delta = vec![0.0; self.m];
                for &j in &flips {
                    let range = self.upper[j] - self.lower[j];
                    let step = match self.state[j] {
                        State::Lower => range,
                        _ => -range,
                    };
                    self.col_entries(j, &mut entries);
                    for &(row, a) in &entries {
                        delta[row] += a * step;
                    }
                    self.state[j] = match self.state[j] {
                        State::Lower => State::Upper,
                        _ => State::Lower,
                    };
                }
                self.ftran(&mut delta);
                for pos in 0..self.m {
                    self.xb[pos] -= delta[pos];
                }
            }

            let mut w = vec![0.0; self.m];
            self.col_entries(q, &mut entries);
            let mut d_q = self.obj[q];
            for &(row, a) in &entries {
                w[row] = a;
                d_q -= y[row] * a;
            }
            self.ftran(&mut w);
            if w[r].abs() <= PIVOT_TOL {
                if !self.etas.is_empty() {
                    self.factorize()?;
                    self.compute_xb();
                    y = self.duals();
                    continue;
                }
                self.banned.push(q);
                continue;
            }

            let target = if below { self.lower[jl] } else { self.upper[jl] };
            let s = (self.xb[r] - target) / w[r];

            self.iterations += 1;
            if ratio <= 1e-12 {
                self.degen_streak += 1;
            } else {
                self.degen_streak = 0;
            }

            let entering_value = self.nonbasic_value(q) + s;
            for pos in 0..self.m {
                if pos != r && w[pos] != 0.0 {
                    self.xb[pos] -= s * w[pos];
                }
            }
            self.state[jl] = if below { State::Lower } else { State::Upper };
            self.basis[r] = q;
            self.state[q] = State::Basic(r as u32);
            self.xb[r] = entering_value;
            // Keep y consistent with the new basis: the entering reduced
            // cost must vanish.
            let theta = d_q / w[r];
            self.push_eta(r, w);
            if theta != 0.0 {
                for (i, &ri) in rho.iter().enumerate() {
                    if ri != 0.0 {
                        y[i] += theta * ri;
                    }
                }
            }
        }
    }

    fn push_eta(&mut self, pos: usize, w: Vec<f64>) {
        let pivot = w[pos];
        let col: Vec<(usize, f64)> = w
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i != pos && v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        self.etas.push(Eta { pos, pivot, col });
    }

    fn snapshot(&self) -> Basis {
        let statuses = self
            .state
            .iter()
            .map(|s| match s {
                State::Basic(_) => BasisStatus::Basic,
                State::Lower => BasisStatus::Lower,
                State::Upper => BasisStatus::Upper,
                State::Free => BasisStatus::Free,
            })
            .collect();
        Basis { statuses }
    }

    fn extract(&self, status: LpStatus, cold_fallback: bool) -> LpResult {
        let sign = if self.p.maximize() { 1.0 } else { -1.0 };
        let mut x = vec![0.0; self.n];
        for (j, xv) in x.iter_mut().enumerate() {
            *xv = self.nonbasic_value(j);
        }
        let y = self.duals();
        let mut entries = Vec::new();
        let mut reduced = vec![0.0; self.n];
        for j in 0..self.n {
            reduced[j] = if matches!(self.state[j], State::Basic(_)) {
                0.0
            } else {
                self.reduced_cost(j, &y, &mut entries)
            };
        }
        let objective: f64 = (0..self.n).map(|j| self.p.objective_coef(j) * x[j]).sum();
        LpResult {
            status,
            x,
            objective,
            duals: y.iter().map(|v| sign * v).collect(),
            reduced_costs: reduced.iter().map(|v| sign * v).collect(),
            iterations: self.iterations,
            basis: self.snapshot(),
            cold_fallback,
        }
    }
}

pub(crate) fn solve(
    p: &LpProblem,
    limits: &SolveLimits,
    warm: Option<&Basis>,
) -> Result<LpResult, LpError> {
    let mut s = Solver::new(p, limits);
    let mut cold_fallback = false;
    let mut installed = false;
    if let Some(basis) = warm {
        if s.install_basis(basis) && s.factorize().is_ok() {
            installed = true;
        } else {
            cold_fallback = true;
        }
    }
    if !installed {
        s.slack_basis();
        s.factorize()?;
    }
    s.compute_xb();

    // Up to a few polish rounds: after a simplex run ends Optimal, refresh
    // the factorization and re-check both feasibilities on exact values.
    for _round in 0..6 {
        let end = if s.primal_infeasibility() <= s.feas_tol {
            s.primal(false)?
        } else if s.dual_feasible() {
            s.dual()?
        } else {
            match s.primal(true)? {
                LoopEnd::Done => s.primal(false)?,
                other => other,
            }
        };
        match end {
            LoopEnd::Done => {
                s.factorize()?;
                s.compute_xb();
                s.banned.clear();
                if s.primal_infeasibility() <= s.feas_tol * (1.0 + s.m as f64).sqrt() {
                    return Ok(s.extract(LpStatus::Optimal, cold_fallback));
                }
                // Drift uncovered by the refresh: loop again.
            }
            LoopEnd::Unbounded => return Ok(s.extract(LpStatus::Unbounded, cold_fallback)),
            LoopEnd::PrimalInfeasible => {
                return Ok(s.extract(LpStatus::Infeasible, cold_fallback))
            }
            LoopEnd::IterationLimit => {
                return Ok(s.extract(LpStatus::IterationLimit, cold_fallback))
            }
        }
    }
    Err(LpError::Numerical("polish rounds exhausted without a stable optimum".into()))
}

/// Check an `Optimal` result against the problem: primal feasibility of the
/// reported point, sign conditions on reduced costs, and the Lagrangian
/// duality gap.
pub fn verify_certificate(
    p: &LpProblem,
    r: &LpResult,
    feas_tol: f64,
    gap_tol: f64,
) -> Result<(), String> {
    if r.status != LpStatus::Optimal {
        return Err(format!("certificate requires Optimal, got {:?}", r.status));
    }
    let n = p.num_cols();
    if r.x.len() != n || r.duals.len() != p.num_rows() {
        return Err("result dimensions do not match the problem".into());
    }
    for j in 0..n {
        let (l, u) = p.bounds(j);
        if r.x[j] < l - feas_tol || r.x[j] > u + feas_tol {
            return Err(format!("column {j} value {} outside [{l}, {u}]", r.x[j]));
        }
    }
    let act = p.row_activity(&r.x);
    for i in 0..p.num_rows() {
        let resid = match p.sense(i) {
            Sense::Le => act[i] - p.rhs(i),
            Sense::Ge => p.rhs(i) - act[i],
            Sense::Eq => (act[i] - p.rhs(i)).abs(),
        };
        if resid > feas_tol {
            return Err(format!("row {i} violated by {resid:e}"));
        }
    }

    // Work in maximization space.
    let sign = if p.maximize() { 1.0 } else { -1.0 };
    let y: Vec<f64> = r.duals.iter().map(|v| sign * v).collect();
    let obj_user: f64 = (0..n).map(|j| p.objective_coef(j) * r.x[j]).sum();
    let obj = sign * obj_user;

    let mut dual_value: f64 = (0..p.num_rows()).map(|i| y[i] * p.rhs(i)).sum();
    // Slack contributions and sign conditions.
    for i in 0..p.num_rows() {
        let d = -y[i];
        match p.sense(i) {
            Sense::Le => {
                // slack in [0, inf): requires d <= tol, no dual contribution
                if d > gap_tol {
                    return Err(format!("row {i}: dual sign violated ({})", y[i]));
                }
            }
            Sense::Ge => {
                if d < -gap_tol {
                    return Err(format!("row {i}: dual sign violated ({})", y[i]));
                }
            }
            Sense::Eq => {}
        }
    }
    for j in 0..n {
        let (rows, vals) = p.column(j);
        let mut d = sign * p.objective_coef(j);
        for (&row, &a) in rows.iter().zip(vals) {
            d -= y[row] * a;
        }
        let (l, u) = p.bounds(j);
        if l < u {
            match r.basis.statuses[j] {
                BasisStatus::Lower if d > gap_tol => {
                    return Err(format!("column {j}: nonbasic at lower with reduced cost {d}"));
                }
                BasisStatus::Upper if d < -gap_tol => {
                    return Err(format!("column {j}: nonbasic at upper with reduced cost {d}"));
                }
                BasisStatus::Free if d.abs() > gap_tol => {
                    return Err(format!("column {j}: free nonbasic with reduced cost {d}"));
                }
                _ => {}
            }
        }
        if d > gap_tol {
            if !u.is_finite() {
                return Err(format!("column {j}: positive reduced cost with free upper bound"));
            }
            dual_value += d * u;
        } else if d < -gap_tol {
            if !l.is_finite() {
                return Err(format!("column {j}: negative reduced cost with free lower bound"));
            }
            dual_value += d * l;
        }
        let d_user = sign * r.reduced_costs[j];
        if (d_user - d).abs() > 1e-6 * (1.0 + d.abs()) {
            return Err(format!(
                "column {j}: reported reduced cost {} disagrees with {}",
                r.reduced_costs[j], d
            ));
        }
    }
    let gap = (obj - dual_value).abs();
    if gap > gap_tol * (1.0 + obj.abs()) {
        return Err(format!("duality gap {gap:e} exceeds tolerance"));
    }
    Ok(())
}
