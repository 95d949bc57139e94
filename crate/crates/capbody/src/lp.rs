//! A small dense two-phase simplex solver.
//!
//! Solves `maximize cᵀx subject to Ax ≤ b, x ≥ 0` for the desk-scale
//! problems this crate needs (≤ ~30 constraints, ≤ 5 variables). Written
//! here so the hemisphere-cover test has no external optimization
//! dependency.
//!
//! Phase 1 introduces an artificial variable for every row with negative
//! right-hand side and drives their sum to zero; phase 2 optimizes the real
//! objective over the remaining columns. Bland's rule is used throughout, so
//! the iteration cannot cycle.

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize, // structural + slack + artificial, excluding rhs
    structural: usize,
    artificial_start: usize,
    t: Vec<Vec<f64>>, // rows × (cols + 1); last entry is rhs
    obj: Vec<f64>,    // cols + 1; stores negated reduced costs, rhs = objective
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        for r in 0..self.rows {
            if r != row {
                let f = self.t[r][col];
                if f != 0.0 {
                    for j in 0..=self.cols {
                        self.t[r][j] -= f * self.t[row][j];
                    }
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for j in 0..=self.cols {
                self.obj[j] -= f * self.t[row][j];
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations until optimal or unbounded. Columns at or
    /// past `col_limit` are ignored (used to exclude artificials in phase 2).
    fn optimize(&mut self, col_limit: usize) -> bool {
        loop {
            // Bland: the lowest-index column with a negative objective entry.
            let entering = (0..col_limit).find(|&j| self.obj[j] < -EPS);
            let Some(col) = entering else { return true };

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.t[r][col];
                if a > EPS {
                    let ratio = self.t[r][self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - EPS
                                || (ratio < lratio + EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false, // unbounded in this column
            }
        }
    }
}

/// Maximize `cᵀx` subject to `rows·x ≤ b`, `x ≥ 0`.
pub(crate) fn maximize(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = rows.len();
    assert_eq!(b.len(), m);

    let n_art = b.iter().filter(|&&bi| bi < 0.0).count();
    let cols = n + m + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut art = n + m;

    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), n);
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * row[j];
        }
        t[i][n + i] = flip; // slack
        t[i][cols] = flip * b[i];
        if b[i] < 0.0 {
            t[i][art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        structural: n,
        artificial_start: n + m,
        t,
        obj: vec![0.0; cols + 1],
        basis,
    };

    if n_art > 0 {
        // Phase 1: maximize -Σ artificials, i.e. negated cost +1 per
        // artificial, then cancel the reduced costs of the starting basis.
        for j in tab.artificial_start..cols {
            tab.obj[j] = 1.0;
        }
        for r in 0..m {
            if tab.basis[r] >= tab.artificial_start {
                for j in 0..=cols {
                    tab.obj[j] -= tab.t[r][j];
                }
            }
        }
        tab.optimize(cols);
        let infeas: f64 = (0..m)
            .filter(|&r| tab.basis[r] >= tab.artificial_start)
            .map(|r| tab.t[r][cols])
            .sum();
        if infeas > 1e-7 {
            return LpOutcome::Infeasible;
        }
        // Pivot any remaining zero-level artificials out of the basis where
        // possible; rows that cannot pivot are redundant and stay at zero.
        for r in 0..m {
            if tab.basis[r] >= tab.artificial_start {
                if let Some(j) = (0..tab.artificial_start).find(|&j| tab.t[r][j].abs() > EPS) {
                    tab.pivot(r, j);
                }
            }
        }
    }

    // Phase 2 objective.
    tab.obj = vec![0.0; cols + 1];
    for j in 0..n {
        tab.obj[j] = -c[j];
    }
    for r in 0..m {
        let bv = tab.basis[r];
        if bv < n && c[bv] != 0.0 {
            let f = -c[bv];
            for j in 0..=cols {
                tab.obj[j] -= f * tab.t[r][j];
            }
        }
    }
    if !tab.optimize(tab.artificial_start) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < tab.structural {
            x[tab.basis[r]] = tab.t[r][cols];
        }
    }
    LpOutcome::Optimal {
        objective: tab.obj[cols],
        x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(out: LpOutcome) -> (f64, Vec<f64>) {
        match out {
            LpOutcome::Optimal { objective, x } => (objective, x),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn box_maximum() {
        let (obj, x) = optimal(maximize(
            &[1.0, 1.0],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[1.0, 2.0],
        ));
        assert!((obj - 3.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // x ≥ 1 encoded as -x ≤ -1, maximize x with x ≤ 3.
        let (obj, x) = optimal(maximize(&[1.0], &[vec![-1.0], vec![1.0]], &[-1.0, 3.0]));
        assert!((obj - 3.0).abs() < 1e-9);
        assert!((x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn minimize_via_negated_objective() {
        // minimize x subject to x ≥ 1, x ≤ 3.
        let (obj, x) = optimal(maximize(&[-1.0], &[vec![-1.0], vec![1.0]], &[-1.0, 3.0]));
        assert!((obj + 1.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x ≤ 1 and x ≥ 2.
        let out = maximize(&[1.0], &[vec![1.0], vec![-1.0]], &[1.0, -2.0]);
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let out = maximize(&[1.0, 0.0], &[vec![0.0, 1.0]], &[1.0]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn mixed_constraints() {
        // maximize x + 2y, s.t. x + y ≤ 4, x - y ≥ -2 (i.e. -x + y ≤ 2), y ≥ 1.
        let (obj, x) = optimal(maximize(
            &[1.0, 2.0],
            &[vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.0, -1.0]],
            &[4.0, 2.0, -1.0],
        ));
        assert!((x[0] - 1.0).abs() < 1e-8);
        assert!((x[1] - 3.0).abs() < 1e-8);
        assert!((obj - 7.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // Several redundant constraints through the optimum.
        let (obj, _) = optimal(maximize(
            &[1.0, 1.0],
            &[
                vec![1.0, 1.0],
                vec![1.0, 1.0],
                vec![2.0, 2.0],
                vec![1.0, 0.0],
            ],
            &[2.0, 2.0, 4.0, 1.0],
        ));
        assert!((obj - 2.0).abs() < 1e-9);
    }
}
