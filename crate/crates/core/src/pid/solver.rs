//! Minimization of `I_Q(T; A | B)` over the marginal polytope.
//!
//! On the polytope `H(T|B)` is fixed, so the objective equals
//! `f(Q) = Σ q(t,a,b) ln(q(t,a,b) / q(a,b)) + const`, i.e. the negative
//! conditional entropy `-H_Q(T | A, B)`, which is convex.
//!
//! The minimizer is a primal log-barrier path-following method: starting
//! from `Q₀` (strictly positive on every cell that can carry mass), each
//! stage centers `f − μ Σ ln q` with damped Newton steps restricted to the
//! affine hull of the polytope, then shrinks `μ`. Each centered point is
//! certified with the Frank–Wolfe duality gap
//! `max_S ⟨∇f(Q), Q − S⟩`, evaluated with an exact linear-program oracle
//! over the polytope (one transportation problem per target symbol). The
//! gap bounds `f(Q) − min f` from above.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};
use ndarray::Array3;
use serde::{Deserialize, Serialize};

use super::polytope::MarginalPolytope;
use crate::dist::{conditional_mutual_information, JointDist, Var};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Certified-gap threshold in bits.
    pub tol: f64,
    /// Cap on Newton iterations across all barrier stages.
    pub max_iters: usize,
    /// Lower clamp for log arguments when evaluating gradients.
    pub boundary_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 10_000,
            boundary_eps: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if !(self.boundary_eps > 0.0 && self.boundary_eps < 1e-6) {
            return Err(Error::InvalidArgument(format!(
                "boundary_eps must lie in (0, 1e-6), got {}",
                self.boundary_eps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    /// The minimizer, with `(T, A, B)` in the `(Z, Ŷ, Y)` slots.
    pub optimal_q: JointDist,
    /// `I_Q(T; A | B)` in bits at `optimal_q`.
    pub objective: f64,
    /// Frank–Wolfe gap in bits at `optimal_q`; `objective − certified_gap`
    /// is a lower bound on the true minimum.
    pub certified_gap: f64,
    /// Newton iterations performed.
    pub iterations: usize,
    pub converged: bool,
    /// Objective in bits at the end of each barrier stage.
    pub trace: Vec<f64>,
}

/// Cells that can carry mass, grouped for the Newton system.
struct Layout {
    cells: Vec<[usize; 3]>,
    /// Cell indices sharing the same `(a, b)`.
    columns: Vec<Vec<usize>>,
    column_of: Vec<usize>,
    /// Independent equality constraints as lists of cell indices, with
    /// their right-hand sides.
    constraints: Vec<Vec<usize>>,
    rhs: Vec<f64>,
}

impl Layout {
    fn new(poly: &MarginalPolytope) -> Self {
        let (nt, na, nb) = poly.dim();
        let mut cells = Vec::new();
        let mut index = Array3::<usize>::from_elem((nt, na, nb), usize::MAX);
        for t in 0..nt {
            for a in 0..na {
                for b in 0..nb {
                    if poly.is_free(t, a, b) {
                        index[[t, a, b]] = cells.len();
                        cells.push([t, a, b]);
                    }
                }
            }
        }
        let mut columns = Vec::new();
        let mut column_of = vec![0; cells.len()];
        for a in 0..na {
            for b in 0..nb {
                let members: Vec<usize> = (0..nt).map(|t| index[[t, a, b]]).filter(|&i| i != usize::MAX).collect();
                if !members.is_empty() {
                    for &i in &members {
                        column_of[i] = columns.len();
                    }
                    columns.push(members);
                }
            }
        }
        let mut constraints = Vec::new();
        let mut rhs = Vec::new();
        for t in 0..nt {
            let free_a: Vec<usize> = (0..na).filter(|&a| poly.p_ta()[[t, a]] > 0.0).collect();
            let free_b: Vec<usize> = (0..nb).filter(|&b| poly.p_tb()[[t, b]] > 0.0).collect();
            for &a in &free_a {
                constraints.push(free_b.iter().map(|&b| index[[t, a, b]]).collect());
                rhs.push(poly.p_ta()[[t, a]]);
            }
            // The last column sum is implied by the row sums.
            for &b in free_b.iter().take(free_b.len().saturating_sub(1)) {
                constraints.push(free_a.iter().map(|&a| index[[t, a, b]]).collect());
                rhs.push(poly.p_tb()[[t, b]]);
            }
        }
        Self {
            cells,
            columns,
            column_of,
            constraints,
            rhs,
        }
    }

    fn column_sums(&self, q: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|c| c.iter().map(|&i| q[i]).sum()).collect()
    }

    /// `Σ q ln(q / q_col)` in nats.
    fn neg_cond_entropy(&self, q: &[f64]) -> f64 {
        let sums = self.column_sums(q);
        q.iter()
            .zip(&self.column_of)
            .filter(|(&v, _)| v > 0.0)
            .map(|(&v, &c)| v * (v / sums[c]).ln())
            .sum()
    }

    fn barrier_value(&self, q: &[f64], mu: f64) -> f64 {
        self.neg_cond_entropy(q) - mu * q.iter().map(|v| v.ln()).sum::<f64>()
    }

    fn to_tensor(&self, poly: &MarginalPolytope, q: &[f64]) -> Array3<f64> {
        let mut out = Array3::zeros(poly.dim());
        for (cell, &v) in self.cells.iter().zip(q) {
            out[*cell] = v;
        }
        out
    }
}

/// Computes `Uni(T : A | B) = min over the polytope of I_Q(T; A | B)`.
///
/// Failing to reach `cfg.tol` within `cfg.max_iters` is not an error: the
/// result comes back with `converged = false` and its gap.
pub fn unique_information(poly: &MarginalPolytope, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let layout = Layout::new(poly);
    let q0 = poly.q0();
    let mut q: Vec<f64> = layout.cells.iter().map(|c| q0[*c]).collect();

    let tol_nats = cfg.tol * LN_2;
    let n = q.len().max(1) as f64;
    let mut mu = 0.1;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut gap = f64::INFINITY;

    loop {
        iterations += center(&layout, &mut q, mu, cfg.max_iters - iterations.min(cfg.max_iters));
        let tensor = layout.to_tensor(poly, &q);
        trace.push(objective_bits(poly, &tensor)?);
        // n·μ bounds the gap at an exactly centered point.
        if n * mu <= tol_nats {
            gap = frank_wolfe_gap(poly, &tensor, cfg.boundary_eps)?;
            if gap <= cfg.tol {
                break;
            }
        }
        if iterations >= cfg.max_iters || mu < 1e-20 {
            if !gap.is_finite() || n * mu > tol_nats {
                gap = frank_wolfe_gap(poly, &tensor, cfg.boundary_eps)?;
            }
            break;
        }
        mu *= 0.1;
    }

    let tensor = layout.to_tensor(poly, &q);
    let objective = objective_bits(poly, &tensor)?;
    Ok(SolverResult {
        optimal_q: poly.to_dist(tensor)?,
        objective,
        certified_gap: gap,
        iterations,
        converged: gap <= cfg.tol,
        trace,
    })
}

fn objective_bits(poly: &MarginalPolytope, q: &Array3<f64>) -> Result<f64> {
    let dist = poly.to_dist(q.clone())?;
    conditional_mutual_information(&dist, Var::Z, Var::Yhat, Var::Y)
}

/// Damped Newton centering of `f − μ Σ ln q` on the polytope's affine hull.
/// Returns the number of Newton steps taken.
fn center(layout: &Layout, q: &mut [f64], mu: f64, budget: usize) -> usize {
    const MAX_STEPS: usize = 60;
    let mut steps = 0;
    while steps < budget.min(MAX_STEPS) {
        let Some(step) = newton_direction(layout, q, mu) else {
            break;
        };
        steps += 1;
        if step.decrement.is_nan() || step.decrement <= 1e-20 {
            break;
        }
        let max_step = step
            .u
            .iter()
            .filter(|&&ui| ui < 0.0)
            .map(|&ui| -1.0 / ui)
            .fold(f64::INFINITY, f64::min);
        let mut alpha = (0.95 * max_step).min(1.0);
        if step.decrement > 1e-12 && step.slope < 0.0 {
            let current = layout.barrier_value(q, mu);
            loop {
                let cand = scaled_step(q, &step.u, alpha);
                if layout.barrier_value(&cand, mu) <= current + 0.25 * alpha * step.slope {
                    q.copy_from_slice(&cand);
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-16 {
                    return steps;
                }
            }
        } else {
            // Inside the quadratic-convergence region the barrier value is
            // flat to rounding, so take the step without a line search.
            let cand = scaled_step(q, &step.u, alpha);
            q.copy_from_slice(&cand);
        }
        if step.decrement < 1e-18 {
            break;
        }
    }
    steps
}

fn scaled_step(q: &[f64], u: &[f64], alpha: f64) -> Vec<f64> {
    q.iter().zip(u).map(|(qi, ui)| qi * (1.0 + alpha * ui)).collect()
}

struct NewtonStep {
    /// Step in scaled coordinates: `dq = q ∘ u`.
    u: Vec<f64>,
    /// Squared Newton decrement on the affine hull.
    decrement: f64,
    /// Directional derivative of the barrier objective along `u`.
    slope: f64,
}

/// Newton step for `f − μ Σ ln q` in the scaled coordinates `dq = q ∘ u`,
/// where the Hessian is `M = D∇²f D + μI` with `D = diag(q)`.
///
/// The step is split as `u = u_r + N v`: `u_r` is the least-norm
/// correction of any marginal drift (`A D u_r = b − A q`) and `N` is an
/// orthonormal basis of the null space of `A D`, obtained from a
/// Householder QR of `[(A D)ᵀ | I]`. The reduced system `Nᵀ M N v =
/// −Nᵀ(h + M u_r)` with `h = D∇f − μ1` is solved by Cholesky.
fn newton_direction(layout: &Layout, q: &[f64], mu: f64) -> Option<NewtonStep> {
    let n = q.len();
    if n == 0 {
        return None;
    }
    let m = layout.constraints.len();
    let sums = layout.column_sums(q);
    let h = DVector::from_fn(n, |i, _| q[i] * (q[i] / sums[layout.column_of[i]]).ln() - mu);

    let mut mat = DMatrix::from_fn(n, n, |i, j| if i == j { q[i] + mu } else { 0.0 });
    for (col, &s) in layout.columns.iter().zip(&sums) {
        for &i in col {
            for &j in col {
                mat[(i, j)] -= q[i] * q[j] / s;
            }
        }
    }

    let mut aug = DMatrix::zeros(n, m + n);
    for (k, cells) in layout.constraints.iter().enumerate() {
        for &i in cells {
            aug[(i, k)] = q[i];
        }
    }
    for i in 0..n {
        aug[(i, m + i)] = 1.0;
    }
    let qr = aug.qr();
    let basis = qr.q();
    let r = qr.r();

    let mut u_r = DVector::zeros(n);
    if m > 0 {
        let resid = DVector::from_fn(m, |k, _| {
            layout.rhs[k] - layout.constraints[k].iter().map(|&i| q[i]).sum::<f64>()
        });
        let r1t = r.view((0, 0), (m, m)).transpose();
        let y = r1t.solve_lower_triangular(&resid)?;
        u_r = basis.columns(0, m) * y;
    }

    let k = n.saturating_sub(m);
    let mut u = u_r.clone();
    let mut decrement = 0.0;
    if k > 0 {
        let null = basis.columns(m, k);
        let reduced = null.transpose() * &mat * null;
        let rhs = -(null.transpose() * (&h + &mat * &u_r));
        let v = match reduced.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => reduced.lu().solve(&rhs)?,
        };
        decrement = v.dot(&rhs);
        u += null * v;
    }
    if u.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let slope = h.dot(&u);
    Some(NewtonStep {
        u: u.iter().copied().collect(),
        decrement,
        slope,
    })
}

/// Gradient of `Σ q ln(q / q_col)` (nats), with log arguments clamped at
/// `boundary_eps`. Columns with no mass use the `Q₀` conditional, which is
/// a valid subgradient there.
pub fn objective_gradient(poly: &MarginalPolytope, q: &Array3<f64>, boundary_eps: f64) -> Array3<f64> {
    let (nt, na, nb) = poly.dim();
    let q0 = poly.q0();
    let mut g = Array3::zeros(poly.dim());
    for a in 0..na {
        for b in 0..nb {
            let col: f64 = (0..nt).map(|t| q[[t, a, b]]).sum();
            let col0: f64 = (0..nt).map(|t| q0[[t, a, b]]).sum();
            for t in 0..nt {
                if !poly.is_free(t, a, b) {
                    continue;
                }
                g[[t, a, b]] = if col > boundary_eps {
                    (q[[t, a, b]].max(boundary_eps) / col).ln()
                } else {
                    (q0[[t, a, b]] / col0).ln()
                };
            }
        }
    }
    g
}

/// Exact minimizer of `⟨cost, S⟩` over the polytope: one transportation
/// problem per target symbol. Ties resolve to the lowest-index vertex.
pub fn lp_oracle(poly: &MarginalPolytope, cost: &Array3<f64>) -> Result<Array3<f64>> {
    let (nt, na, nb) = poly.dim();
    let mut vertex = Array3::zeros(poly.dim());
    for t in 0..nt {
        let rows: Vec<usize> = (0..na).filter(|&a| poly.p_ta()[[t, a]] > 0.0).collect();
        let cols: Vec<usize> = (0..nb).filter(|&b| poly.p_tb()[[t, b]] > 0.0).collect();
        if rows.is_empty() || cols.is_empty() {
            continue;
        }
        let nv = rows.len() * cols.len();
        let mut a_mat = Vec::with_capacity(rows.len() + cols.len());
        let mut rhs = Vec::with_capacity(rows.len() + cols.len());
        for (ri, &a) in rows.iter().enumerate() {
            let mut row = vec![0.0; nv];
            for ci in 0..cols.len() {
                row[ri * cols.len() + ci] = 1.0;
            }
            a_mat.push(row);
            rhs.push(poly.p_ta()[[t, a]]);
        }
        for (ci, &b) in cols.iter().enumerate() {
            let mut row = vec![0.0; nv];
            for ri in 0..rows.len() {
                row[ri * cols.len() + ci] = 1.0;
            }
            a_mat.push(row);
            rhs.push(poly.p_tb()[[t, b]]);
        }
        let c: Vec<f64> = rows
            .iter()
            .flat_map(|&a| cols.iter().map(move |&b| (a, b)))
            .map(|(a, b)| cost[[t, a, b]])
            .collect();
        match LinearProgram::new(a_mat, rhs, c).solve(1e-9) {
            LpOutcome::Optimal { x, .. } => {
                for (ri, &a) in rows.iter().enumerate() {
                    for (ci, &b) in cols.iter().enumerate() {
                        vertex[[t, a, b]] = x[ri * cols.len() + ci];
                    }
                }
            }
            other => {
                return Err(Error::InvalidDistribution(format!(
                    "transportation slice {t} has no optimal vertex: {other:?}"
                )))
            }
        }
    }
    Ok(vertex)
}

/// Frank–Wolfe gap `⟨∇f(Q), Q − S*⟩` in bits, where `S*` is the oracle
/// vertex for the gradient at `Q`.
pub fn frank_wolfe_gap(poly: &MarginalPolytope, q: &Array3<f64>, boundary_eps: f64) -> Result<f64> {
    let g = objective_gradient(poly, q, boundary_eps);
    let s = lp_oracle(poly, &g)?;
    let gap: f64 = g.iter().zip(q.iter().zip(s.iter())).map(|(gi, (qi, si))| gi * (qi - si)).sum();
    Ok((gap / LN_2).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Alphabet;
    use ndarray::Array2;

    fn poly(p_ta: [f64; 4], p_tb: [f64; 4]) -> MarginalPolytope {
        MarginalPolytope::new(
            Alphabet::binary(),
            Alphabet::binary(),
            Alphabet::binary(),
            Array2::from_shape_vec((2, 2), p_ta.to_vec()).unwrap(),
            Array2::from_shape_vec((2, 2), p_tb.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { max_iters: 0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { boundary_eps: 1e-3, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn copy_channel_has_zero_unique_information() {
        // A = B = a noisy copy of T.
        let p = [0.45, 0.05, 0.05, 0.45];
        let res = unique_information(&poly(p, p), &SolverConfig::default()).unwrap();
        assert!(res.converged);
        assert!(res.objective < 1e-8, "{}", res.objective);
    }

    #[test]
    fn determined_polytope_returns_q0() {
        // A is a copy of T, so every slice has a single row and Q is pinned.
        let res = unique_information(&poly([0.5, 0.0, 0.0, 0.5], [0.25; 4]), &SolverConfig::default()).unwrap();
        assert!(res.converged);
        assert!((res.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_is_zero_at_a_vertex_optimum_and_positive_elsewhere() {
        let p = [0.45, 0.05, 0.05, 0.45];
        let pl = poly(p, p);
        let mut diag = Array3::zeros((2, 2, 2));
        diag[[0, 0, 0]] = 0.45;
        diag[[0, 1, 1]] = 0.05;
        diag[[1, 0, 0]] = 0.05;
        diag[[1, 1, 1]] = 0.45;
        assert!(frank_wolfe_gap(&pl, &diag, 1e-12).unwrap() < 1e-12);
        assert!(frank_wolfe_gap(&pl, &pl.q0(), 1e-12).unwrap() > 1e-3);
    }

    #[test]
    fn oracle_returns_polytope_vertex() {
        let pl = poly([0.3, 0.2, 0.1, 0.4], [0.25, 0.25, 0.35, 0.15]);
        let cost = Array3::from_shape_fn((2, 2, 2), |(t, a, b)| ((t * 7 + a * 3 + b) % 5) as f64 - 2.0);
        let v = lp_oracle(&pl, &cost).unwrap();
        assert!(pl.contains(&v, 1e-12));
        // A vertex of a 2x2 transportation slice has a zero cell.
        for t in 0..2 {
            assert!((0..4).any(|k| v[[t, k / 2, k % 2]] == 0.0));
        }
    }
}
