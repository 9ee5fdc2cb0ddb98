//! Bivariate partial information decomposition of `I(T; A, B)`.
//!
//! Unique information is the minimum of `I_Q(T; A | B)` over all joints
//! `Q` sharing the `(T, A)` and `(T, B)` marginals of the input. Redundancy
//! and synergy follow from it:
//!
//! ```text
//! Red = I(T;A) − Uni(T:A|B)
//! Syn = I(T;A,B) − Uni(T:A|B) − Uni(T:B|A) − Red
//! ```

mod blackwell;
mod brute;
mod polytope;
mod solver;

pub use blackwell::{blackwell_check, BlackwellVerdict, BLACKWELL_TOL};
pub use brute::brute_force_unique;
pub use polytope::{construct_q0, MarginalPolytope, CONSISTENCY_TOL};
pub use solver::{
    frank_wolfe_gap, lp_oracle, objective_gradient, unique_information, SolverConfig, SolverResult,
};

use serde::{Deserialize, Serialize};

use crate::dist::{joint_mutual_information, mutual_information, JointDist, Var};
use crate::error::Result;

/// Convergence record of one unique-information solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub iterations: usize,
    pub certified_gap: f64,
    pub converged: bool,
}

impl From<&SolverResult> for SolveSummary {
    fn from(r: &SolverResult) -> Self {
        Self {
            iterations: r.iterations,
            certified_gap: r.certified_gap,
            converged: r.converged,
        }
    }
}

/// PID terms before zero-clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawTerms {
    pub uni_a: f64,
    pub uni_b: f64,
    pub red: f64,
    pub syn: f64,
}

/// The four PID regions of `I(T; A, B)`, in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidDecomposition {
    pub target: Var,
    pub source_a: Var,
    pub source_b: Var,
    /// `Uni(T : A | B)`.
    pub uni_a: f64,
    /// `Uni(T : B | A)`.
    pub uni_b: f64,
    pub red: f64,
    pub syn: f64,
    /// `I(T; A, B)`.
    pub total: f64,
    pub mi_a: f64,
    pub mi_b: f64,
    /// `|Uni(T:B|A) + Red − I(T;B)|` from the raw terms. The two unique
    /// informations come from separate solves, so this measures how well
    /// they agree.
    pub residual: f64,
    pub raw: RawTerms,
    pub solve_a: SolveSummary,
    pub solve_b: SolveSummary,
}

impl PidDecomposition {
    pub fn converged(&self) -> bool {
        self.solve_a.converged && self.solve_b.converged
    }

    pub fn iterations(&self) -> usize {
        self.solve_a.iterations + self.solve_b.iterations
    }

    pub fn max_gap(&self) -> f64 {
        self.solve_a.certified_gap.max(self.solve_b.certified_gap)
    }

    pub fn sum(&self) -> f64 {
        self.uni_a + self.uni_b + self.red + self.syn
    }
}

/// Decomposes `I(target; A, B)` where `A, B` are the other two variables
/// in axis order (for `target = Z`: `A = Ŷ`, `B = Y`).
///
/// Terms within `cfg.tol` of zero are reported as exactly zero; the
/// unclamped values are kept in [`PidDecomposition::raw`].
pub fn decompose(dist: &JointDist, target: Var, cfg: &SolverConfig) -> Result<PidDecomposition> {
    let (a, b) = target.others();
    let poly = MarginalPolytope::from_dist(dist, target)?;
    let solve_a = unique_information(&poly, cfg)?;
    let solve_b = unique_information(&poly.swapped(), cfg)?;

    let total = joint_mutual_information(dist, target)?;
    let mi_a = mutual_information(dist, target, a)?;
    let mi_b = mutual_information(dist, target, b)?;

    let uni_a = solve_a.objective;
    let uni_b = solve_b.objective;
    let red = mi_a - uni_a;
    let syn = total - uni_a - uni_b - red;
    let raw = RawTerms { uni_a, uni_b, red, syn };
    let clamp = |v: f64| if v.abs() <= cfg.tol { 0.0 } else { v };

    Ok(PidDecomposition {
        target,
        source_a: a,
        source_b: b,
        uni_a: clamp(uni_a),
        uni_b: clamp(uni_b),
        red: clamp(red),
        syn: clamp(syn),
        total,
        mi_a,
        mi_b,
        residual: (uni_b + red - mi_b).abs(),
        raw,
        solve_a: SolveSummary::from(&solve_a),
        solve_b: SolveSummary::from(&solve_b),
    })
}
