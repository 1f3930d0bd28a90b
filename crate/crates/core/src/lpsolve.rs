//! Self-contained LP and MIP solving.
//!
//! The LP code is a two-phase primal simplex for bounded variables with an
//! explicit dense basis inverse. It returns basic optimal solutions, which
//! is what the polytope experiments need: every reported optimum is a vertex
//! of the feasible region. Branch and bound fixes binary variables, selects
//! nodes best-bound first, and can strengthen the root with the valid
//! inequality families, either all upfront or lazily via separation.

use crate::error::{Error, Result};
use crate::formulation::{Cut, CutPool, Model, Sense};
use crate::scalar::{Rat, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Basis membership of a structural variable in the returned solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// A basic optimal solution (a vertex of the LP feasible region).
#[derive(Clone, Debug)]
pub struct LpResult<R> {
    pub status: SolveStatus,
    /// Structural variable values; empty unless optimal.
    pub values: Vec<R>,
    pub value: R,
    /// Per-structural-variable basis status; empty unless optimal.
    pub basis: Vec<VarStatus>,
    pub pivots: usize,
}

#[derive(Clone, Debug, Default)]
pub struct LpOptions<R> {
    /// Replaces the model objective when present.
    pub objective: Option<Vec<R>>,
    /// Temporary bound changes (variable, lower, upper), used by branching.
    pub bound_overrides: Vec<(usize, Rat, Rat)>,
}

pub fn solve_lp<R: Scalar>(model: &Model) -> Result<LpResult<R>> {
    solve_lp_opts(model, &LpOptions::default())
}

pub fn solve_lp_opts<R: Scalar>(model: &Model, opts: &LpOptions<R>) -> Result<LpResult<R>> {
    let mut simplex = Simplex::build(model, opts);
    simplex.solve()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ColState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Simplex<R> {
    rows: usize,
    structural: usize,
    artificial_start: usize,
    cols: Vec<Vec<(usize, R)>>,
    lower: Vec<R>,
    upper: Vec<Option<R>>,
    cost: Vec<R>,
    rhs: Vec<R>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    x_basic: Vec<R>,
    binv: Vec<Vec<R>>,
    bland: bool,
    degenerate: usize,
    pivots: usize,
    max_pivots: usize,
}

impl<R: Scalar> Simplex<R> {
    fn build(model: &Model, opts: &LpOptions<R>) -> Self {
        let rows = model.constraints.len();
        let structural = model.vars.len();

        let mut lower: Vec<R> = Vec::new();
        let mut upper: Vec<Option<R>> = Vec::new();
        for (j, var) in model.vars.iter().enumerate() {
            let (lo, hi) = opts
                .bound_overrides
                .iter()
                .rev()
                .find(|(v, _, _)| *v == j)
                .map(|(_, lo, hi)| (lo.clone(), hi.clone()))
                .unwrap_or_else(|| (var.lower.clone(), var.upper.clone()));
            lower.push(R::from_rat(&lo));
            upper.push(Some(R::from_rat(&hi)));
        }

        let mut cost: Vec<R> = match &opts.objective {
            Some(obj) => {
                assert_eq!(obj.len(), structural);
                obj.clone()
            }
            None => model.objective.iter().map(|c| R::from_rat(c)).collect(),
        };

        let mut cols: Vec<Vec<(usize, R)>> = vec![Vec::new(); structural];
        for (i, con) in model.constraints.iter().enumerate() {
            for (j, coef) in &con.terms {
                cols[*j].push((i, R::from_rat(coef)));
            }
        }
        // Merge duplicate terms within a column (parsed models may repeat vars).
        for col in cols.iter_mut() {
            col.sort_by_key(|(i, _)| *i);
            let mut merged: Vec<(usize, R)> = Vec::with_capacity(col.len());
            for (i, a) in col.drain(..) {
                match merged.last_mut() {
                    Some((li, lv)) if *li == i => *lv = lv.clone() + a,
                    _ => merged.push((i, a)),
                }
            }
            *col = merged;
        }

        let rhs: Vec<R> = model
            .constraints
            .iter()
            .map(|c| R::from_rat(&c.rhs))
            .collect();

        // Residual of each row with every structural variable at its lower bound.
        let mut residual = rhs.clone();
        for (j, col) in cols.iter().enumerate() {
            if !lower[j].is_zero() {
                for (i, a) in col {
                    residual[*i] = residual[*i].clone() - a.clone() * lower[j].clone();
                }
            }
        }

        let mut state = vec![ColState::AtLower; structural];
        let mut basis = vec![usize::MAX; rows];
        let mut x_basic = vec![R::zero(); rows];
        let mut binv = vec![vec![R::zero(); rows]; rows];

        // Slack columns for inequality rows; artificial columns wherever the
        // slack cannot start feasible (and for every equality row).
        let mut need_artificial = Vec::new();
        for (i, con) in model.constraints.iter().enumerate() {
            let slack_sign = match con.sense {
                Sense::Le => Some(R::one()),
                Sense::Ge => Some(-R::one()),
                Sense::Eq => None,
            };
            if let Some(sign) = slack_sign {
                let j = cols.len();
                cols.push(vec![(i, sign.clone())]);
                lower.push(R::zero());
                upper.push(None);
                cost.push(R::zero());
                let value = residual[i].clone() * sign;
                if value >= R::zero() {
                    basis[i] = j;
                    x_basic[i] = value;
                    state.push(ColState::Basic(i));
                    continue;
                }
                state.push(ColState::AtLower);
            }
            need_artificial.push(i);
        }

        let artificial_start = cols.len();
        for i in need_artificial {
            let sign = if residual[i] >= R::zero() {
                R::one()
            } else {
                -R::one()
            };
            let j = cols.len();
            cols.push(vec![(i, sign.clone())]);
            lower.push(R::zero());
            upper.push(None);
            cost.push(R::zero());
            basis[i] = j;
            x_basic[i] = residual[i].clone() * sign;
            state.push(ColState::Basic(i));
        }

        // The initial basis matrix is diagonal with entries +/-1.
        for i in 0..rows {
            let sign = cols[basis[i]][0].1.clone();
            binv[i][i] = sign;
        }

        let total_cols = cols.len();
        Simplex {
            rows,
            structural,
            artificial_start,
            cols,
            lower,
            upper,
            cost,
            rhs,
            basis,
            state,
            x_basic,
            binv,
            bland: false,
            degenerate: 0,
            pivots: 0,
            max_pivots: 50_000 + 200 * (total_cols + rows),
        }
    }

    fn has_artificials(&self) -> bool {
        self.artificial_start < self.cols.len()
    }

    fn solve(&mut self) -> Result<LpResult<R>> {
        if self.has_artificials() {
            let phase1_cost: Vec<R> = (0..self.cols.len())
                .map(|j| {
                    if j >= self.artificial_start {
                        R::one()
                    } else {
                        R::zero()
                    }
                })
                .collect();
            match self.run_phase(&phase1_cost)? {
                PhaseEnd::Optimal => {}
                // Phase 1 minimizes a sum of nonnegative variables.
                PhaseEnd::Unbounded => unreachable!("phase 1 objective is bounded below"),
            }
            let infeasibility = self.phase_objective(&phase1_cost);
            if infeasibility > R::feas_tol() {
                return Ok(self.finish(SolveStatus::Infeasible));
            }
            // Lock the artificials at zero for phase 2.
            for j in self.artificial_start..self.cols.len() {
                self.upper[j] = Some(R::zero());
            }
            self.refresh_basics();
        }

        let phase2_cost = self.cost.clone();
        match self.run_phase(&phase2_cost)? {
            PhaseEnd::Optimal => {
                self.refresh_basics();
                Ok(self.finish(SolveStatus::Optimal))
            }
            PhaseEnd::Unbounded => Ok(self.finish(SolveStatus::Unbounded)),
        }
    }

    fn phase_objective(&self, cost: &[R]) -> R {
        let mut total = R::zero();
        for j in 0..self.cols.len() {
            if !cost[j].is_zero() {
                total = total + cost[j].clone() * self.col_value(j);
            }
        }
        total
    }

    fn col_value(&self, j: usize) -> R {
        match self.state[j] {
            ColState::Basic(r) => self.x_basic[r].clone(),
            ColState::AtLower => self.lower[j].clone(),
            ColState::AtUpper => self.upper[j].clone().expect("bounded"),
        }
    }

    /// Recompute basic values from the inverse; clears float drift.
    fn refresh_basics(&mut self) {
        let mut rhs_eff = self.rhs.clone();
        for j in 0..self.cols.len() {
            if matches!(self.state[j], ColState::Basic(_)) {
                continue;
            }
            let v = self.col_value(j);
            if v.is_zero() {
                continue;
            }
            for (i, a) in &self.cols[j] {
                rhs_eff[*i] = rhs_eff[*i].clone() - a.clone() * v.clone();
            }
        }
        for r in 0..self.rows {
            let mut acc = R::zero();
            for k in 0..self.rows {
                if !self.binv[r][k].is_zero() && !rhs_eff[k].is_zero() {
                    acc = acc + self.binv[r][k].clone() * rhs_eff[k].clone();
                }
            }
            self.x_basic[r] = acc;
        }
    }

    fn run_phase(&mut self, cost: &[R]) -> Result<PhaseEnd> {
        loop {
            self.pivots += 1;
            if self.pivots > self.max_pivots {
                return Err(Error::SolverLimit(format!(
                    "simplex exceeded {} pivots",
                    self.max_pivots
                )));
            }

            // Duals y = c_B B^-1.
            let mut duals = vec![R::zero(); self.rows];
            for r in 0..self.rows {
                let cb = cost[self.basis[r]].clone();
                if cb.is_zero() {
                    continue;
                }
                for k in 0..self.rows {
                    if !self.binv[r][k].is_zero() {
                        duals[k] = duals[k].clone() + cb.clone() * self.binv[r][k].clone();
                    }
                }
            }

            // Entering variable.
            let tol = pricing_tol::<R>();
            let mut entering: Option<(usize, R, bool)> = None; // (col, score, increase)
            for j in 0..self.cols.len() {
                let increase = match self.state[j] {
                    ColState::Basic(_) => continue,
                    ColState::AtLower => true,
                    ColState::AtUpper => false,
                };
                if let Some(u) = &self.upper[j] {
                    if *u == self.lower[j] {
                        continue; // fixed
                    }
                }
                let mut reduced = cost[j].clone();
                for (i, a) in &self.cols[j] {
                    reduced = reduced - duals[*i].clone() * a.clone();
                }
                let improving = if increase {
                    reduced < -tol.clone()
                } else {
                    reduced > tol.clone()
                };
                if !improving {
                    continue;
                }
                if self.bland {
                    entering = Some((j, R::zero(), increase));
                    break;
                }
                let score = reduced.abs();
                match &entering {
                    Some((_, best, _)) if score <= *best => {}
                    _ => entering = Some((j, score, increase)),
                }
            }

            let Some((j, _, increase)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            // Column direction w = B^-1 A_j.
            let mut w = vec![R::zero(); self.rows];
            for (i, a) in &self.cols[j] {
                for r in 0..self.rows {
                    if !self.binv[r][*i].is_zero() {
                        w[r] = w[r].clone() + self.binv[r][*i].clone() * a.clone();
                    }
                }
            }

            // Ratio test: how far can the entering variable move?
            let elem_tol = pivot_tol::<R>();
            let range = self
                .upper[j]
                .as_ref()
                .map(|u| u.clone() - self.lower[j].clone());
            let mut best_t: Option<R> = range;
            let mut leaving: Option<(usize, R)> = None; // (row, |rate|)
            for r in 0..self.rows {
                let rate = if increase {
                    -w[r].clone()
                } else {
                    w[r].clone()
                };
                let basic_col = self.basis[r];
                let limit = if rate < -elem_tol.clone() {
                    let room = self.x_basic[r].clone() - self.lower[basic_col].clone();
                    Some(clamp_nonneg(room / -rate.clone()))
                } else if rate > elem_tol {
                    self.upper[basic_col].as_ref().map(|u| {
                        clamp_nonneg((u.clone() - self.x_basic[r].clone()) / rate.clone())
                    })
                } else {
                    None
                };
                let Some(limit) = limit else { continue };
                let replace = match &best_t {
                    None => true,
                    Some(current) => {
                        if limit < *current {
                            true
                        } else if limit == *current {
                            match &leaving {
                                None => false, // keep the bound flip on exact ties
                                Some((lr, lrate)) => {
                                    if self.bland {
                                        self.basis[r] < self.basis[*lr]
                                    } else {
                                        w[r].abs() > *lrate
                                    }
                                }
                            }
                        } else {
                            false
                        }
                    }
                };
                if replace {
                    best_t = Some(limit);
                    leaving = Some((r, w[r].abs()));
                }
            }

            let Some(step) = best_t else {
                return Ok(PhaseEnd::Unbounded);
            };

            if step <= elem_tol_step::<R>() {
                self.degenerate += 1;
                if self.degenerate > 1000 {
                    self.bland = true;
                }
            }

            // Move the entering variable and update the basics.
            let entering_value = if increase {
                self.lower[j].clone() + step.clone()
            } else {
                self.upper[j].clone().expect("bounded") - step.clone()
            };
            for r in 0..self.rows {
                if w[r].is_zero() {
                    continue;
                }
                let rate = if increase {
                    -w[r].clone()
                } else {
                    w[r].clone()
                };
                self.x_basic[r] = self.x_basic[r].clone() + rate * step.clone();
            }

            match leaving {
                None => {
                    // Bound flip: no basis change.
                    self.state[j] = if increase {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                }
                Some((r, _)) => {
                    let out_col = self.basis[r];
                    let rate_negative = if increase {
                        w[r] > R::zero()
                    } else {
                        w[r] < R::zero()
                    };
                    self.state[out_col] = if rate_negative {
                        ColState::AtLower
                    } else {
                        ColState::AtUpper
                    };
                    self.basis[r] = j;
                    self.state[j] = ColState::Basic(r);
                    self.x_basic[r] = entering_value;
                    self.pivot_binv(r, &w);
                }
            }
        }
    }

    /// Gauss-Jordan update of the dense inverse after `j` replaces row `r`.
    fn pivot_binv(&mut self, r: usize, w: &[R]) {
        let piv = w[r].clone();
        for k in 0..self.rows {
            if !self.binv[r][k].is_zero() {
                self.binv[r][k] = self.binv[r][k].clone() / piv.clone();
            }
        }
        for i in 0..self.rows {
            if i == r || w[i].is_zero() {
                continue;
            }
            for k in 0..self.rows {
                if !self.binv[r][k].is_zero() {
                    self.binv[i][k] =
                        self.binv[i][k].clone() - w[i].clone() * self.binv[r][k].clone();
                }
            }
        }
    }

    fn finish(&self, status: SolveStatus) -> LpResult<R> {
        if status != SolveStatus::Optimal {
            return LpResult {
                status,
                values: Vec::new(),
                value: R::zero(),
                basis: Vec::new(),
                pivots: self.pivots,
            };
        }
        let mut values = Vec::with_capacity(self.structural);
        let mut basis = Vec::with_capacity(self.structural);
        for j in 0..self.structural {
            values.push(self.col_value(j));
            basis.push(match self.state[j] {
                ColState::Basic(_) => VarStatus::Basic,
                ColState::AtLower => VarStatus::AtLower,
                ColState::AtUpper => VarStatus::AtUpper,
            });
        }
        let mut value = R::zero();
        for j in 0..self.structural {
            if !self.cost[j].is_zero() {
                value = value + self.cost[j].clone() * values[j].clone();
            }
        }
        LpResult {
            status,
            values,
            value,
            basis,
            pivots: self.pivots,
        }
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

fn pricing_tol<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64_exact(1e-9)
    }
}

fn pivot_tol<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64_exact(1e-10)
    }
}

fn elem_tol_step<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64_exact(1e-12)
    }
}

fn clamp_nonneg<R: Scalar>(v: R) -> R {
    if v < R::zero() {
        R::zero()
    } else {
        v
    }
}

// ---------------------------------------------------------------------------
// Cutting planes at the root

/// Iteratively solve the LP and add violated cuts from `pool` until no cut
/// is violated by more than `tol` or `max_rounds` is reached. Returns the
/// strengthened model together with the last LP result.
pub fn cutting_plane_root<R: Scalar>(
    model: &Model,
    pool: &CutPool,
    max_rounds: usize,
    tol: &R,
) -> Result<(Model, LpResult<R>)> {
    let mut current = model.clone();
    let mut added = vec![false; pool.cuts.len()];
    let mut result = solve_lp::<R>(&current)?;
    for _ in 0..max_rounds {
        if result.status != SolveStatus::Optimal {
            break;
        }
        let mut violated: Vec<(usize, R)> = Vec::new();
        for (i, cut) in pool.cuts.iter().enumerate() {
            if added[i] {
                continue;
            }
            let v = cut.violation(&result.values);
            if v > *tol {
                violated.push((i, v));
            }
        }
        if violated.is_empty() {
            break;
        }
        violated.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        for (i, _) in violated {
            current.add_constraint(pool.cuts[i].to_constraint());
            added[i] = true;
        }
        result = solve_lp::<R>(&current)?;
    }
    Ok((current, result))
}

// ---------------------------------------------------------------------------
// Branch and bound

#[derive(Clone, Debug)]
pub enum CutMode {
    /// Append every cut of the pool before solving the root.
    Upfront,
    /// Root-lazy: separation rounds at the root only.
    RootLazy { max_rounds: usize },
}

#[derive(Clone, Debug)]
pub struct CutConfig {
    pub pool: CutPool,
    pub mode: CutMode,
}

impl CutConfig {
    pub fn none() -> Self {
        CutConfig {
            pool: CutPool::default(),
            mode: CutMode::Upfront,
        }
    }

    pub fn upfront(pool: CutPool) -> Self {
        CutConfig {
            pool,
            mode: CutMode::Upfront,
        }
    }

    pub fn root_lazy(pool: CutPool, max_rounds: usize) -> Self {
        CutConfig {
            pool,
            mode: CutMode::RootLazy { max_rounds },
        }
    }
}

#[derive(Clone, Debug)]
pub struct MipResult<R> {
    pub status: SolveStatus,
    pub incumbent: Option<Vec<R>>,
    pub value: Option<R>,
    /// Nodes dequeued after the root; 0 means the root LP was already integral.
    pub node_count: usize,
    /// Root LP value after cut generation.
    pub root_bound: Option<R>,
}

struct BranchNode<R> {
    overrides: Vec<(usize, Rat, Rat)>,
    bound: R,
    depth: usize,
    seq: usize,
}

/// Integrality tolerance: binaries within 1e-6 of a bit count as integral
/// (exactly 0 or 1 in exact mode).
pub fn int_tol<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64_exact(1e-6)
    }
}

fn fractional_var<R: Scalar>(model: &Model, values: &[R]) -> Option<usize> {
    use crate::point::VarRole;
    let tol = int_tol::<R>();
    let mut best: Option<(u8, f64, usize)> = None;
    for (j, var) in model.vars.iter().enumerate() {
        if !var.integral {
            continue;
        }
        if values[j].binary_gap() <= tol {
            continue;
        }
        let rank = match var.role {
            Some(VarRole::Placement { .. }) => 0u8,
            _ => 1u8,
        };
        let dist_half = (values[j].to_f64() - 0.5).abs();
        let key = (rank, dist_half, j);
        let better = match &best {
            None => true,
            Some(b) => key < *b,
        };
        if better {
            best = Some(key);
        }
    }
    best.map(|(_, _, j)| j)
}

/// Solve the binary program to proven optimality.
///
/// Branching is most-fractional with placement variables preferred; node
/// selection is best-bound with depth-first tie-breaking. Everything is
/// deterministic for a fixed model.
pub fn solve_mip<R: Scalar>(model: &Model, cuts: &CutConfig) -> Result<MipResult<R>> {
    let tol = if R::EXACT {
        R::zero()
    } else {
        R::from_f64_exact(1e-6)
    };
    let (root_model, root_lp) = match cuts.mode {
        CutMode::Upfront => {
            let mut m = model.clone();
            for cut in &cuts.pool.cuts {
                m.add_constraint(cut.to_constraint());
            }
            let lp = solve_lp::<R>(&m)?;
            (m, lp)
        }
        CutMode::RootLazy { max_rounds } => {
            cutting_plane_root::<R>(model, &cuts.pool, max_rounds, &tol)?
        }
    };

    match root_lp.status {
        SolveStatus::Infeasible => {
            return Ok(MipResult {
                status: SolveStatus::Infeasible,
                incumbent: None,
                value: None,
                node_count: 0,
                root_bound: None,
            })
        }
        SolveStatus::Unbounded => {
            return Ok(MipResult {
                status: SolveStatus::Unbounded,
                incumbent: None,
                value: None,
                node_count: 0,
                root_bound: None,
            })
        }
        SolveStatus::Optimal => {}
    }

    let root_bound = root_lp.value.clone();
    let mut incumbent: Option<(Vec<R>, R)> = None;
    let mut active: Vec<BranchNode<R>> = Vec::new();
    let mut node_count = 0usize;
    let mut seq = 0usize;

    if let Some(branch_var) = fractional_var(model, &root_lp.values) {
        for bit in [1i64, 0] {
            seq += 1;
            active.push(BranchNode {
                overrides: vec![(branch_var, crate::scalar::rint(bit), crate::scalar::rint(bit))],
                bound: root_lp.value.clone(),
                depth: 1,
                seq,
            });
        }
    } else {
        incumbent = Some((root_lp.values.clone(), root_lp.value.clone()));
    }

    while !active.is_empty() {
        // Best bound, ties broken deepest-first then most recent.
        let mut pick = 0usize;
        for i in 1..active.len() {
            let a = &active[i];
            let b = &active[pick];
            let better = a.bound < b.bound
                || (a.bound == b.bound
                    && (a.depth > b.depth || (a.depth == b.depth && a.seq > b.seq)));
            if better {
                pick = i;
            }
        }
        let node = active.remove(pick);
        node_count += 1;

        if let Some((_, best)) = &incumbent {
            if node.bound.clone() >= best.clone() - prune_slack::<R>() {
                continue;
            }
        }

        let lp = solve_lp_opts::<R>(
            &root_model,
            &LpOptions {
                objective: None,
                bound_overrides: node.overrides.clone(),
            },
        )?;
        if lp.status != SolveStatus::Optimal {
            continue;
        }
        if let Some((_, best)) = &incumbent {
            if lp.value.clone() >= best.clone() - prune_slack::<R>() {
                continue;
            }
        }

        match fractional_var(model, &lp.values) {
            None => {
                let better = match &incumbent {
                    None => true,
                    Some((_, best)) => lp.value < *best,
                };
                if better {
                    incumbent = Some((lp.values.clone(), lp.value.clone()));
                }
            }
            Some(branch_var) => {
                for bit in [1i64, 0] {
                    let mut overrides = node.overrides.clone();
                    overrides.push((
                        branch_var,
                        crate::scalar::rint(bit),
                        crate::scalar::rint(bit),
                    ));
                    seq += 1;
                    active.push(BranchNode {
                        overrides,
                        bound: lp.value.clone(),
                        depth: node.depth + 1,
                        seq,
                    });
                }
            }
        }
    }

    Ok(match incumbent {
        Some((values, value)) => MipResult {
            status: SolveStatus::Optimal,
            incumbent: Some(values),
            value: Some(value),
            node_count,
            root_bound: Some(root_bound),
        },
        None => MipResult {
            status: SolveStatus::Infeasible,
            incumbent: None,
            value: None,
            node_count,
            root_bound: Some(root_bound),
        },
    })
}

fn prune_slack<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64_exact(1e-9)
    }
}

/// Convenience: evaluate one cut family pool against a solution vector.
pub fn violated_cuts<'p, R: Scalar>(
    pool: &'p CutPool,
    values: &[R],
    tol: &R,
) -> Vec<(&'p Cut, R)> {
    let mut out: Vec<(&Cut, R)> = pool
        .cuts
        .iter()
        .filter_map(|c| {
            let v = c.violation(values);
            if v > *tol {
                Some((c, v))
            } else {
                None
            }
        })
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{build_flow_formulation, prefix_variables, CutFamily};
    use crate::samples;
    use crate::scalar::{rint, Rat};

    fn two_node_instance() -> crate::instance::Instance {
        samples::edge_on_path(2, &[1, 1], &[1], &[1, 2], &[1])
    }

    #[test]
    fn lp_on_two_nodes_is_integral_and_cheap() {
        let inst = two_node_instance();
        let model = build_flow_formulation(&inst);
        let res = solve_lp::<Rat>(&model).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.value, rint(4));
    }

    #[test]
    fn contradictory_fixings_are_infeasible() {
        let inst = two_node_instance();
        let mut model = build_flow_formulation(&inst);
        let idx = inst.indexing();
        for u in 0..2 {
            let var = &mut model.vars[idx.placement(0, u)];
            var.upper = Rat::zero();
            var.fixed_zero = true;
        }
        let res = solve_lp::<Rat>(&model).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
    }

    #[test]
    fn blocked_middle_lp_is_fractional_under_departure_only() {
        // Minimizing total y over the blocked-middle path with the departure
        // family reaches 2 at a fractional vertex; the integral optimum is 3.
        let inst = samples::blocked_middle_path();
        let model = prefix_variables(build_flow_formulation(&inst), &inst).unwrap();
        let pool = crate::formulation::CutPool::new(&inst, &[CutFamily::FlowDeparture]);
        let mut with_cuts = model.clone();
        for cut in &pool.cuts {
            with_cuts.add_constraint(cut.to_constraint());
        }
        let res = solve_lp::<Rat>(&with_cuts).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.value, rint(2));
        let frac = res
            .values
            .iter()
            .any(|v| *v > Rat::zero() && *v < rint(1));
        assert!(frac, "expected a fractional basic optimum");

        let mip = solve_mip::<Rat>(&model, &CutConfig::none()).unwrap();
        assert_eq!(mip.value.unwrap(), rint(3));
    }

    #[test]
    fn mip_matches_enumerated_two_node_optimum() {
        let inst = two_node_instance();
        let model = build_flow_formulation(&inst);
        let res = solve_mip::<Rat>(&model, &CutConfig::none()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.value.unwrap(), rint(4));
        assert!(res.root_bound.unwrap() <= rint(4));
    }

    #[test]
    fn infeasible_when_virtual_exceeds_substrate() {
        // Three virtual nodes, two substrate nodes.
        let virtual_net = crate::instance::VirtualNetwork::new(
            vec![("a".into(), 1), ("b".into(), 1), ("c".into(), 1)],
            vec![
                ("a".into(), "b".into(), 1),
                ("b".into(), "c".into(), 1),
            ],
        )
        .unwrap();
        let substrate = crate::instance::SubstrateNetwork::new(
            vec![("u".into(), 1, rint(1)), ("v".into(), 1, rint(1))],
            vec![("u".into(), "v".into(), 5, rint(1))],
        )
        .unwrap();
        let inst = crate::instance::Instance::new(virtual_net, substrate);
        let model = build_flow_formulation(&inst);
        let res = solve_mip::<Rat>(&model, &CutConfig::none()).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
    }

    #[test]
    fn cutting_plane_loop_cuts_off_end_split_pattern() {
        let inst = samples::blocked_middle_path();
        let model = prefix_variables(build_flow_formulation(&inst), &inst).unwrap();
        let pool = crate::formulation::CutPool::new(
            &inst,
            &[CutFamily::FlowDeparture, CutFamily::FlowContinuity],
        );
        let (_, lp) = cutting_plane_root::<Rat>(&model, &pool, 50, &Rat::zero()).unwrap();
        assert_eq!(lp.status, SolveStatus::Optimal);
        // With departure + continuity the LP reaches the integral optimum.
        assert_eq!(lp.value, rint(3));
    }

    #[test]
    fn empty_cut_config_keeps_model() {
        let inst = two_node_instance();
        let model = build_flow_formulation(&inst);
        let pool = crate::formulation::CutPool::default();
        let (m2, lp) = cutting_plane_root::<Rat>(&model, &pool, 10, &Rat::zero()).unwrap();
        assert_eq!(m2.constraint_count(), model.constraint_count());
        assert_eq!(lp.value, rint(4));
    }

    #[test]
    fn float_mode_agrees_with_exact_on_small_instances() {
        let inst = samples::blocked_middle_path();
        let model = prefix_variables(build_flow_formulation(&inst), &inst).unwrap();
        let exact = solve_mip::<Rat>(&model, &CutConfig::none()).unwrap();
        let float = solve_mip::<f64>(&model, &CutConfig::none()).unwrap();
        let ev = exact.value.unwrap();
        let fv = float.value.unwrap();
        assert!((crate::scalar::Scalar::to_f64(&ev) - fv).abs() < 1e-7);
    }

    #[test]
    fn basic_solution_respects_constraints() {
        let (inst, _) = samples::mesh_demo();
        let model = build_flow_formulation(&inst);
        let res = solve_lp::<Rat>(&model).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(model.first_violated(&res.values, &Rat::zero()), None);
    }
}
