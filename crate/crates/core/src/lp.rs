//! Dense two-phase simplex for small equality-form linear programs
//!
//!   minimize cᵀx  subject to  A x = b,  x ≥ 0.
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, ties in
//! the ratio test go to the lowest basic index), which both rules out
//! cycling on the highly degenerate transportation polytopes used here and
//! makes the returned vertex a deterministic function of the input.

/// Pivot and zero-detection tolerance.
const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    /// The smallest achievable `‖A x − b‖₁` over `x ≥ 0` exceeds the
    /// feasibility tolerance.
    Infeasible { residual: f64 },
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl LinearProgram {
    /// `a` is row-major with one row per equality constraint.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Self {
        assert_eq!(a.len(), b.len(), "one right-hand side per constraint row");
        assert!(a.iter().all(|row| row.len() == c.len()), "every row needs one entry per variable");
        Self { a, b, c }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// Solves the program. `feas_tol` bounds the ℓ₁ constraint residual
    /// accepted as feasible at the end of phase one.
    pub fn solve(&self, feas_tol: f64) -> LpOutcome {
        let m = self.a.len();
        let n = self.c.len();
        if m == 0 {
            return if self.c.iter().any(|&c| c < -PIVOT_EPS) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal { x: vec![0.0; n], objective: 0.0 }
            };
        }

        // Tableau columns: n structural, m artificial, then the rhs.
        let width = n + m + 1;
        let mut t = vec![vec![0.0; width]; m];
        for (i, row) in t.iter_mut().enumerate() {
            let sign = if self.b[i] < 0.0 { -1.0 } else { 1.0 };
            for (dst, src) in row.iter_mut().zip(&self.a[i]) {
                *dst = sign * src;
            }
            row[n + i] = 1.0;
            row[n + m] = sign * self.b[i];
        }
        let mut basis: Vec<usize> = (n..n + m).collect();

        // Phase one: minimize the sum of artificials.
        let mut phase1 = vec![0.0; n + m];
        for v in phase1.iter_mut().skip(n) {
            *v = 1.0;
        }
        if !run_simplex(&mut t, &mut basis, &phase1, n + m) {
            unreachable!("phase one objective is bounded below by zero");
        }
        let residual: f64 = basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv >= n)
            .map(|(i, _)| t[i][n + m].abs())
            .sum();
        if residual > feas_tol {
            return LpOutcome::Infeasible { residual };
        }

        // Drive remaining (zero-level) artificials out of the basis, dropping
        // rows that turn out to be redundant.
        let mut row = 0;
        while row < t.len() {
            if basis[row] >= n {
                match (0..n).find(|&j| t[row][j].abs() > 1e-9) {
                    Some(j) => pivot(&mut t, &mut basis, row, j),
                    None => {
                        t.remove(row);
                        basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }

        // Phase two on the structural columns only.
        let mut cost = self.c.clone();
        cost.extend(std::iter::repeat_n(0.0, m));
        if !run_simplex(&mut t, &mut basis, &cost, n) {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![0.0; n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[i][n + m].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.c).map(|(xi, ci)| xi * ci).sum();
        LpOutcome::Optimal { x, objective }
    }
}

/// Runs primal simplex iterations with Bland's rule. Only columns below
/// `eligible` may enter. Returns `false` if the objective is unbounded.
fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], eligible: usize) -> bool {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    loop {
        // Reduced cost d_j = c_j − c_Bᵀ B⁻¹ A_j, read off the tableau.
        let entering = (0..eligible).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let d = cost[j] - t.iter().zip(basis.iter()).map(|(row, &bv)| cost[bv] * row[j]).sum::<f64>();
            d < -PIVOT_EPS
        });
        let Some(j) = entering else {
            return true;
        };
        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j] > PIVOT_EPS {
                let ratio = row[rhs] / row[j];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        match leave {
            Some((i, _)) => pivot(t, basis, i, j),
            None => return false,
        }
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            r[col] = 0.0;
        }
    }
    basis[row] = col;
}
