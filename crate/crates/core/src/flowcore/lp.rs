//! Dense two-phase tableau simplex, the exact oracle for the linear
//! formulations at desk scale.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min (or max) c x` subject to the rows, `0 <= x <= upper`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub maximize: bool,
    pub rows: Vec<Constraint>,
    /// Upper bounds, `f64::INFINITY` where absent.
    pub upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a variable with objective coefficient `cost`; returns its index.
    pub fn add_var(&mut self, cost: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Constraint { coeffs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.var_count();
        if self.upper.len() != n {
            return Err(Error::InvalidArgument("one upper bound per variable required".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("objective coefficients must be finite".into()));
        }
        if self.upper.iter().any(|u| !(*u >= 0.0)) {
            return Err(Error::InvalidArgument("upper bounds must be nonnegative".into()));
        }
        for r in &self.rows {
            if !r.rhs.is_finite() || r.coeffs.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(Error::InvalidArgument("constraint refers to a missing variable or is not finite".into()));
            }
        }
        Ok(())
    }

    /// `sum_j a_j x_j` for row `r`.
    pub fn row_activity(&self, r: usize, x: &[f64]) -> f64 {
        self.rows[r].coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Largest constraint or bound violation of `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(-v).max(v - self.upper[j]);
        }
        for (r, row) in self.rows.iter().enumerate() {
            let ax = self.row_activity(r, x);
            let v = match row.sense {
                Sense::Le => ax - row.rhs,
                Sense::Ge => row.rhs - ax,
                Sense::Eq => (ax - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// One multiplier per row, signed for the problem as stated.
    pub duals: Vec<f64>,
    /// Multipliers of the upper bounds (zero where unbounded).
    pub bound_duals: Vec<f64>,
    pub dual_value: f64,
    /// `|primal - dual| / max(1, |primal|)`.
    pub gap: f64,
    /// Largest complementary-slackness product, relative to the objective scale.
    pub slackness: f64,
    /// Largest dual infeasibility.
    pub dual_infeasibility: f64,
    pub pivots: usize,
}

const PIVOT_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;

/// Pivots between recomputations of the reduced-cost row.
const REFRESH_EVERY: usize = 100;

struct Tableau {
    t: Vec<Vec<f64>>,
    /// Reduced costs, updated by each pivot.
    obj: Vec<f64>,
    /// Costs of the current phase.
    cost: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    /// Column holding the perturbed right-hand side.
    fn pert(&self) -> usize {
        self.cols
    }

    /// Column holding the exact right-hand side.
    fn exact(&self) -> usize {
        self.cols + 1
    }

    /// Recompute the reduced-cost row from the tableau, discarding the
    /// round-off that pivots accumulate in it.
    fn refresh(&mut self) {
        self.obj = vec![0.0; self.cols + 2];
        self.obj[..self.cols].copy_from_slice(&self.cost);
        for (row, &b) in self.t.iter().zip(&self.basis) {
            let cb = self.cost[b];
            if cb != 0.0 {
                for (o, v) in self.obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
        for &b in &self.basis {
            self.obj[b] = 0.0;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.t[r][c];
        let mut prow = std::mem::take(&mut self.t[r]);
        let mut nz = Vec::new();
        for (j, v) in prow.iter_mut().enumerate() {
            if *v != 0.0 {
                *v /= piv;
                nz.push(j);
            }
        }
        prow[c] = 1.0;
        for other in self.t.iter_mut() {
            if other.is_empty() {
                continue;
            }
            let f = other[c];
            if f == 0.0 {
                continue;
            }
            for &j in &nz {
                let v = other[j] - f * prow[j];
                other[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            other[c] = 0.0;
        }
        let f = self.obj[c];
        if f != 0.0 {
            for &j in &nz {
                self.obj[j] -= f * prow[j];
            }
            self.obj[c] = 0.0;
        }
        self.t[r] = prow;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Primal simplex on the current objective row with ratio tests on
    /// right-hand side column `rhs`. Columns with `blocked[j]` never enter.
    fn optimise(&mut self, blocked: &[bool], dtol: f64, rhs: usize, limit: usize) -> Result<()> {
        let m = self.t.len();
        let mut degenerate = 0usize;
        let mut noise = vec![false; self.cols];
        // Optimality and unboundedness are only declared on a fresh row.
        self.refresh();
        let mut fresh = true;
        let mut since = 0usize;
        loop {
            if since >= REFRESH_EVERY {
                self.refresh();
                since = 0;
                fresh = true;
            }
            if self.pivots > limit {
                return Err(Error::Numerical("simplex iteration limit reached".into()));
            }
            // Bland's rule once the objective stalls.
            let bland = degenerate > 50;
            let mut enter = None;
            let mut best = -dtol;
            for j in 0..self.cols {
                if blocked[j] || noise[j] {
                    continue;
                }
                let d = self.obj[j];
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else {
                if fresh {
                    return Ok(());
                }
                self.refresh();
                fresh = true;
                noise.iter_mut().for_each(|v| *v = false);
                continue;
            };
            // Harris two-pass ratio test: bound the step with a small
            // feasibility slack, then take the largest pivot within it.
            let mut theta = f64::INFINITY;
            for i in 0..m {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    theta = theta.min((self.t[i][rhs].max(0.0) + HARRIS_TOL) / a);
                }
            }
            if theta.is_infinite() {
                // A barely negative reduced cost on a column with no usable
                // pivot is round-off, not a ray.
                if self.obj[c] > -1e3 * dtol {
                    noise[c] = true;
                    continue;
                }
                if !fresh {
                    self.refresh();
                    fresh = true;
                    noise.iter_mut().for_each(|v| *v = false);
                    continue;
                }
                return Err(Error::LpUnbounded);
            }
            let mut leave: Option<usize> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > PIVOT_TOL && self.t[i][rhs].max(0.0) / a <= theta {
                    leave = match leave {
                        Some(k) if self.t[k][c] > a || (self.t[k][c] == a && self.basis[k] < self.basis[i]) => Some(k),
                        _ => Some(i),
                    };
                }
            }
            let r = leave.expect("a row attains the Harris bound");
            if self.t[r][rhs].max(0.0) / self.t[r][c] <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
            fresh = false;
            since += 1;
            noise.iter_mut().for_each(|v| *v = false);
        }
    }

    /// Dual simplex on the exact right-hand side, restoring primal
    /// feasibility after the perturbation is removed.
    fn clean_up(&mut self, blocked: &[bool], ptol: f64, limit: usize) -> Result<()> {
        let m = self.t.len();
        let rhs = self.exact();
        loop {
            if self.pivots > limit {
                return Err(Error::Numerical("simplex iteration limit reached".into()));
            }
            let mut worst = None;
            let mut low = -ptol;
            for i in 0..m {
                if self.t[i][rhs] < low {
                    low = self.t[i][rhs];
                    worst = Some(i);
                }
            }
            let Some(r) = worst else { return Ok(()) };
            let mut enter = None;
            let mut best = f64::INFINITY;
            for j in 0..self.cols {
                let a = self.t[r][j];
                if blocked[j] || a >= -PIVOT_TOL {
                    continue;
                }
                let ratio = self.obj[j].max(0.0) / -a;
                if ratio < best {
                    best = ratio;
                    enter = Some(j);
                }
            }
            let Some(c) = enter else { return Err(Error::LpInfeasible) };
            self.pivot(r, c);
        }
    }
}

/// Solve a linear program to a vertex optimum with a verified dual
/// certificate.
pub fn solve_lp_exact(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.var_count();
    let sign = if lp.maximize { -1.0 } else { 1.0 };
    let cost: Vec<f64> = lp.objective.iter().map(|c| sign * c).collect();

    // Rows: the stated constraints followed by finite upper bounds.
    let mut rows: Vec<(Vec<(usize, f64)>, Sense, f64)> =
        lp.rows.iter().map(|r| (r.coeffs.clone(), r.sense, r.rhs)).collect();
    let mut bound_row = vec![usize::MAX; n];
    for (j, &u) in lp.upper.iter().enumerate() {
        if u.is_finite() {
            bound_row[j] = rows.len();
            rows.push((vec![(j, 1.0)], Sense::Le, u));
        }
    }
    let m = rows.len();
    let mut flip = vec![1.0; m];
    for (r, row) in rows.iter_mut().enumerate() {
        let negate = row.2 < 0.0 || (row.2 == 0.0 && row.1 == Sense::Ge);
        if negate {
            flip[r] = -1.0;
            row.0.iter_mut().for_each(|(_, a)| *a = -*a);
            row.2 = -row.2;
            row.1 = match row.1 {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let mut cols = n;
    let mut unit = vec![0usize; m];
    let mut extra: Vec<(usize, usize, f64)> = Vec::new();
    let mut artificial = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        match row.1 {
            Sense::Le => {
                extra.push((r, cols, 1.0));
                unit[r] = cols;
                cols += 1;
            }
            Sense::Ge => {
                extra.push((r, cols, -1.0));
                extra.push((r, cols + 1, 1.0));
                unit[r] = cols + 1;
                artificial.push(cols + 1);
                cols += 2;
            }
            Sense::Eq => {
                extra.push((r, cols, 1.0));
                unit[r] = cols;
                artificial.push(cols);
                cols += 1;
            }
        }
    }
    let mut is_art = vec![false; cols];
    for &a in &artificial {
        is_art[a] = true;
    }
    let no_block = vec![false; cols];
    let rhs_scale = rows.iter().fold(1.0f64, |s, r| s.max(r.2.abs()));
    let mut t = vec![vec![0.0; cols + 2]; m];
    for (r, row) in rows.iter().enumerate() {
        for &(j, a) in &row.0 {
            t[r][j] += a;
        }
        // Loosening every inequality by a distinct tiny amount removes the
        // degeneracy of the many zero right-hand sides.
        let jitter = if row.1 == Sense::Le { 1e-9 * rhs_scale * (1.0 + (r * 7919 % 997) as f64 / 997.0) } else { 0.0 };
        t[r][cols] = row.2 + jitter;
        t[r][cols + 1] = row.2;
    }
    for &(r, j, a) in &extra {
        t[r][j] = a;
    }
    let mut tab = Tableau { t, obj: vec![0.0; cols + 2], cost: vec![0.0; cols], basis: unit.clone(), cols, pivots: 0 };
    let limit = 50 * (m + cols) + 1000;

    // Phase 1: minimise the sum of artificials.
    if !artificial.is_empty() {
        for &a in &artificial {
            tab.cost[a] = 1.0;
        }
        tab.optimise(&no_block, 1e-10, tab.pert(), limit)?;
        if -tab.obj[tab.pert()] > 1e-7 * rhs_scale {
            return Err(Error::LpInfeasible);
        }
        // Drive remaining artificials out of the basis where possible.
        for r in 0..m {
            if is_art[tab.basis[r]] {
                let best = (0..cols)
                    .filter(|&j| !is_art[j])
                    .max_by(|&a, &b| tab.t[r][a].abs().total_cmp(&tab.t[r][b].abs()));
                if let Some(j) = best {
                    if tab.t[r][j].abs() > 1e-7 {
                        tab.pivot(r, j);
                    }
                }
            }
        }
    }

    // Phase 2.
    let mut full_cost = vec![0.0; cols];
    full_cost[..n].copy_from_slice(&cost);
    tab.cost = full_cost;
    let cscale = cost.iter().fold(1.0f64, |s, c| s.max(c.abs()));
    let dtol = 1e-10 * cscale;
    tab.optimise(&is_art, dtol, tab.pert(), limit)?;
    // Drop the perturbation and repair any basic variable it pushed negative.
    for _ in 0..5 {
        tab.clean_up(&is_art, 1e-11 * rhs_scale, limit)?;
        let before = tab.pivots;
        tab.optimise(&is_art, dtol, tab.exact(), limit)?;
        if tab.pivots == before {
            break;
        }
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[r][tab.exact()].max(0.0);
        }
    }
    // y on the normalised rows is minus the reduced cost of each unit column.
    let y: Vec<f64> = (0..m).map(|r| -tab.obj[unit[r]] * flip[r]).collect();
    let primal: f64 = cost.iter().zip(&x).map(|(c, x)| c * x).sum();
    let orig_rhs: Vec<f64> = rows.iter().zip(&flip).map(|(r, f)| r.2 * f).collect();
    let dual: f64 = y.iter().zip(&orig_rhs).map(|(y, b)| y * b).sum();

    // Certificate on the stated (un-normalised) rows.
    let mut reduced = cost.clone();
    for (r, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            reduced[j] -= y[r] * a;
        }
    }
    for j in 0..n {
        if bound_row[j] != usize::MAX {
            reduced[j] -= y[bound_row[j]];
        }
    }
    let scale = primal.abs().max(1.0);
    let mut slack = 0.0f64;
    let mut infeas = 0.0f64;
    for j in 0..n {
        slack = slack.max((x[j] * reduced[j]).abs());
        infeas = infeas.max(-reduced[j]);
    }
    for (r, row) in lp.rows.iter().enumerate() {
        let ax: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
        slack = slack.max((y[r] * (ax - row.rhs)).abs());
        let wrong = match row.sense {
            Sense::Le => y[r].max(0.0),
            Sense::Ge => (-y[r]).max(0.0),
            Sense::Eq => 0.0,
        };
        infeas = infeas.max(wrong);
    }
    for j in 0..n {
        if bound_row[j] != usize::MAX {
            let w = y[bound_row[j]];
            slack = slack.max((w * (x[j] - lp.upper[j])).abs());
            infeas = infeas.max(w.max(0.0));
        }
    }
    let gap = (primal - dual).abs() / scale;
    if gap > 1e-6 {
        return Err(Error::Numerical(format!("duality gap {gap:e} after simplex")));
    }
    let duals = y[..lp.row_count()].iter().map(|v| sign * v).collect();
    let bound_duals = (0..n)
        .map(|j| if bound_row[j] == usize::MAX { 0.0 } else { sign * y[bound_row[j]] })
        .collect();
    Ok(LpSolution {
        value: sign * primal,
        x,
        duals,
        bound_duals,
        dual_value: sign * dual,
        gap,
        slackness: slack / scale,
        dual_infeasibility: infeas / cscale,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_variable_max() {
        let mut lp = LinearProgram::new();
        lp.maximize = true;
        let x = lp.add_var(1.0, f64::INFINITY);
        let y = lp.add_var(1.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 2.0);
        lp.add_row(vec![(y, 1.0)], Sense::Le, 3.0);
        let s = solve_lp_exact(&lp).unwrap();
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!(s.gap < 1e-12 && s.slackness < 1e-12 && s.dual_infeasibility < 1e-12);
    }

    #[test]
    fn empty_objective() {
        let mut lp = LinearProgram::new();
        lp.add_var(0.0, 1.0);
        lp.add_var(0.0, 2.0);
        assert_eq!(solve_lp_exact(&lp).unwrap().value, 0.0);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 1.0);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 2.0);
        assert!(matches!(solve_lp_exact(&lp), Err(Error::LpInfeasible)));
        let mut lp = LinearProgram::new();
        lp.maximize = true;
        let x = lp.add_var(1.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 1.0);
        assert!(matches!(solve_lp_exact(&lp), Err(Error::LpUnbounded)));
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + 2y, x + y = 3, x - y <= -1  -> x = 1, y = 2, value 5.
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, f64::INFINITY);
        let y = lp.add_var(2.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Le, -1.0);
        let s = solve_lp_exact(&lp).unwrap();
        assert!((s.value - 5.0).abs() < 1e-12, "{}", s.value);
        assert!((s.dual_value - 5.0).abs() < 1e-12);
        assert!(s.duals[1] <= 0.0);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, f64::INFINITY);
        let y = lp.add_var(1.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 2.0);
        lp.add_row(vec![(x, 2.0), (y, 2.0)], Sense::Eq, 4.0);
        let s = solve_lp_exact(&lp).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }
}
