//! Two-phase primal simplex over arbitrary-precision rationals.
//!
//! Dense tableau with Bland's rule, so every pivot is exact and the method
//! terminates without cycling. Problem sizes here are small (tens of
//! variables and rows), which a dense rational tableau handles comfortably.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Sparse (variable, coefficient) pairs; variables may repeat and are summed.
    pub coeffs: Vec<(usize, Rat)>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rat)>, cmp: Cmp, rhs: Rat) -> Self {
        Constraint { coeffs, cmp, rhs }
    }
}

/// A linear program over nonnegative variables `x_0..x_{num_vars-1}`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub maximize: bool,
    /// Sparse objective; missing variables have coefficient zero.
    pub objective: Vec<(usize, Rat)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: Rat,
    pub values: Vec<Rat>,
}

impl LpSolution {
    /// Exact feasibility re-check of a solution against the program.
    pub fn is_feasible_for(&self, lp: &LinearProgram) -> bool {
        if self.values.len() != lp.num_vars {
            return false;
        }
        if self.values.iter().any(|v| v.is_negative()) {
            return false;
        }
        lp.constraints.iter().all(|c| {
            let lhs: Rat = c
                .coeffs
                .iter()
                .map(|(j, a)| a.clone() * &self.values[*j])
                .fold(rat(0), |acc, t| acc + t);
            match c.cmp {
                Cmp::Le => lhs <= c.rhs,
                Cmp::Ge => lhs >= c.rhs,
                Cmp::Eq => lhs == c.rhs,
            }
        })
    }
}

struct Tableau {
    /// rows[i][j] for j in 0..width, last column is the rhs.
    rows: Vec<Vec<Rat>>,
    /// Objective row (reduced costs), same width as `rows` entries.
    cost: Vec<Rat>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        debug_assert!(!piv.is_zero());
        for j in 0..self.width {
            self.rows[row][j] = &self.rows[row][j] / &piv;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.width {
                let delta = &factor * &self.rows[row][j];
                self.rows[i][j] = &self.rows[i][j] - &delta;
            }
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for j in 0..self.width {
                let delta = &factor * &self.rows[row][j];
                self.cost[j] = &self.cost[j] - &delta;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering variable is the lowest-index column with a
    /// negative reduced cost; leaving row is the minimum-ratio row with the
    /// lowest basic variable index on ties. Returns false at optimality.
    fn bland_step(&mut self, num_cols: usize) -> Result<bool> {
        let rhs = self.width - 1;
        let Some(col) = (0..num_cols).find(|&j| self.cost[j].is_negative()) else {
            return Ok(false);
        };
        let mut best: Option<(Rat, usize, usize)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[rhs] / &row[col];
                let candidate = (ratio, self.basis[i], i);
                if best.as_ref().is_none_or(|b| (&candidate.0, candidate.1) < (&b.0, b.1)) {
                    best = Some(candidate);
                }
            }
        }
        match best {
            Some((_, _, row)) => {
                self.pivot(row, col);
                Ok(true)
            }
            None => Err(Error::Unbounded("no leaving row for entering column".into())),
        }
    }
}

/// Solves the program exactly, returning the optimal objective and one
/// basic optimal solution.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars;
    let m = lp.constraints.len();

    // Dense constraint matrix with nonnegative right-hand sides.
    let mut dense: Vec<(Vec<Rat>, Cmp, Rat)> = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut row = vec![rat(0); n];
        for (j, a) in &c.coeffs {
            if *j >= n {
                return Err(Error::InvalidInput(format!("variable {j} out of range")));
            }
            row[*j] = &row[*j] + a;
        }
        let (row, cmp, rhs) = if c.rhs.is_negative() {
            let flipped = match c.cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
            (row.into_iter().map(|a| -a).collect(), flipped, -c.rhs.clone())
        } else {
            (row, c.cmp, c.rhs.clone())
        };
        dense.push((row, cmp, rhs));
    }

    // Column layout: structural | slack/surplus | artificial | rhs.
    let num_slack = dense.iter().filter(|(_, cmp, _)| *cmp != Cmp::Eq).count();
    let num_artificial = dense.iter().filter(|(_, cmp, _)| *cmp != Cmp::Le).count();
    let total_cols = n + num_slack + num_artificial;
    let width = total_cols + 1;
    let mut artificial_cols = Vec::new();
    let mut slack_idx = 0usize;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_idx = 0usize;
    for (coeffs, cmp, rhs) in dense.iter() {
        let mut row = vec![rat(0); width];
        row[..n].clone_from_slice(coeffs);
        row[width - 1] = rhs.clone();
        match cmp {
            Cmp::Le => {
                let col = n + slack_idx;
                row[col] = rat(1);
                basis.push(col);
                slack_idx += 1;
            }
            Cmp::Ge => {
                row[n + slack_idx] = rat(-1);
                slack_idx += 1;
                let col = n + num_slack + art_idx;
                row[col] = rat(1);
                artificial_cols.push(col);
                basis.push(col);
                art_idx += 1;
            }
            Cmp::Eq => {
                let col = n + num_slack + art_idx;
                row[col] = rat(1);
                artificial_cols.push(col);
                basis.push(col);
                art_idx += 1;
            }
        }
        rows.push(row);
    }

    let mut tab = Tableau { rows, cost: vec![rat(0); width], basis, width };

    // Phase 1: minimize the sum of artificial variables.
    if num_artificial > 0 {
        for &col in &artificial_cols {
            tab.cost[col] = rat(1);
        }
        // Price out the artificial basis.
        for i in 0..m {
            if artificial_cols.contains(&tab.basis[i]) {
                for j in 0..width {
                    let delta = tab.rows[i][j].clone();
                    tab.cost[j] = &tab.cost[j] - &delta;
                }
            }
        }
        while tab.bland_step(total_cols)? {}
        let phase1_value = -tab.cost[width - 1].clone();
        if !phase1_value.is_zero() {
            return Err(Error::Infeasible("artificial variables remain positive".into()));
        }
        // Drive any degenerate artificial out of the basis.
        for i in 0..m {
            if artificial_cols.contains(&tab.basis[i]) {
                if let Some(col) =
                    (0..n + num_slack).find(|&j| !tab.rows[i][j].is_zero())
                {
                    tab.pivot(i, col);
                }
            }
        }
    }

    // Phase 2: the real objective, as a minimization.
    let mut cost = vec![rat(0); width];
    for (j, a) in &lp.objective {
        if *j >= n {
            return Err(Error::InvalidInput(format!("objective variable {j} out of range")));
        }
        let signed = if lp.maximize { -a.clone() } else { a.clone() };
        cost[*j] = &cost[*j] + &signed;
    }
    // Blank out artificial columns so they never re-enter. A degenerate
    // artificial stuck in the basis sits on an all-zero row and stays at
    // zero.
    tab.cost = cost;
    for &col in &artificial_cols {
        tab.cost[col] = rat(0);
    }
    // Price out the current basis.
    for i in 0..m {
        let b = tab.basis[i];
        let factor = tab.cost[b].clone();
        if !factor.is_zero() {
            for j in 0..width {
                let delta = &factor * &tab.rows[i][j];
                tab.cost[j] = &tab.cost[j] - &delta;
            }
        }
    }
    loop {
        // Restrict entering columns to structural and slack variables.
        let rhs = width - 1;
        let entering = (0..n + num_slack)
            .find(|&j| tab.cost[j].is_negative() && !artificial_cols.contains(&j));
        let Some(col) = entering else { break };
        let mut best: Option<(Rat, usize, usize)> = None;
        for (i, row) in tab.rows.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[rhs] / &row[col];
                let candidate = (ratio, tab.basis[i], i);
                if best.as_ref().is_none_or(|b| (&candidate.0, candidate.1) < (&b.0, b.1)) {
                    best = Some(candidate);
                }
            }
        }
        match best {
            Some((_, _, row)) => tab.pivot(row, col),
            None => return Err(Error::Unbounded("objective improves without limit".into())),
        }
    }

    let mut values = vec![rat(0); n];
    for i in 0..m {
        if tab.basis[i] < n {
            values[tab.basis[i]] = tab.rows[i][width - 1].clone();
        }
    }
    let mut objective: Rat = -tab.cost[width - 1].clone();
    if lp.maximize {
        objective = -objective;
    }

    let solution = LpSolution { objective, values };
    debug_assert!(solution.is_feasible_for(lp), "simplex returned infeasible point");
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn c(coeffs: &[(usize, i64)], cmp: Cmp, rhs: i64) -> Constraint {
        Constraint::new(coeffs.iter().map(|&(j, a)| (j, rat(a))).collect(), cmp, rat(rhs))
    }

    #[test]
    fn simple_maximization() {
        // max y1 + y2 s.t. y1 + y2 <= 1.
        let lp = LinearProgram {
            num_vars: 2,
            maximize: true,
            objective: vec![(0, rat(1)), (1, rat(1))],
            constraints: vec![c(&[(0, 1), (1, 1)], Cmp::Le, 1)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.objective, rat(1));
        assert!(sol.is_feasible_for(&lp));
    }

    #[test]
    fn four_cycle_edge_cover() {
        // min x0+x1+x2+x3 covering each cycle vertex by its two edges.
        let lp = LinearProgram {
            num_vars: 4,
            maximize: false,
            objective: (0..4).map(|j| (j, rat(1))).collect(),
            constraints: vec![
                c(&[(0, 1), (3, 1)], Cmp::Ge, 1),
                c(&[(0, 1), (1, 1)], Cmp::Ge, 1),
                c(&[(1, 1), (2, 1)], Cmp::Ge, 1),
                c(&[(2, 1), (3, 1)], Cmp::Ge, 1),
            ],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.objective, rat(2));
    }

    #[test]
    fn triangle_fractional_optimum() {
        // Fractional vertex packing on a triangle: optimum 3/2.
        let lp = LinearProgram {
            num_vars: 3,
            maximize: true,
            objective: (0..3).map(|j| (j, rat(1))).collect(),
            constraints: vec![
                c(&[(0, 1), (1, 1)], Cmp::Le, 1),
                c(&[(1, 1), (2, 1)], Cmp::Le, 1),
                c(&[(0, 1), (2, 1)], Cmp::Le, 1),
            ],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.objective, ratio(3, 2));
    }

    #[test]
    fn detects_infeasible() {
        let lp = LinearProgram {
            num_vars: 1,
            maximize: false,
            objective: vec![(0, rat(1))],
            constraints: vec![c(&[(0, 1)], Cmp::Le, 1), c(&[(0, 1)], Cmp::Ge, 2)],
        };
        assert!(matches!(solve_lp(&lp), Err(Error::Infeasible(_))));
    }

    #[test]
    fn detects_unbounded() {
        let lp = LinearProgram {
            num_vars: 2,
            maximize: true,
            objective: vec![(0, rat(1))],
            constraints: vec![c(&[(1, 1)], Cmp::Le, 1)],
        };
        assert!(matches!(solve_lp(&lp), Err(Error::Unbounded(_))));
    }

    #[test]
    fn equality_constraints() {
        // min x0 + x1 s.t. x0 + 2 x1 = 3, x0 - x1 = 0 -> x = (1, 1).
        let lp = LinearProgram {
            num_vars: 2,
            maximize: false,
            objective: vec![(0, rat(1)), (1, rat(1))],
            constraints: vec![c(&[(0, 1), (1, 2)], Cmp::Eq, 3), c(&[(0, 1), (1, -1)], Cmp::Eq, 0)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.values, vec![rat(1), rat(1)]);
        assert_eq!(sol.objective, rat(2));
    }

    #[test]
    fn negative_rhs_normalization() {
        // x0 >= 2 written as -x0 <= -2.
        let lp = LinearProgram {
            num_vars: 1,
            maximize: false,
            objective: vec![(0, rat(1))],
            constraints: vec![c(&[(0, -1)], Cmp::Le, -2)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.objective, rat(2));
    }
}
