use serde::{Deserialize, Serialize};

use crate::dist::{Alphabet, JointDist, Var};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};

/// Feasibility tolerance on the ℓ₁ residual of the degradation system.
pub const BLACKWELL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackwellVerdict {
    pub target: Var,
    /// The variable whose channel is tested for sufficiency.
    pub sufficient: Var,
    /// The variable whose channel must be reproduced.
    pub degraded: Var,
    pub feasible: bool,
    /// Smallest achievable ℓ₁ residual of `P_{S|T} K = P_{D|T}`.
    pub residual: f64,
    /// Row-stochastic witness `K[s][d]`, rows indexed by the sufficient
    /// variable's alphabet, present when feasible.
    pub channel: Option<Vec<Vec<f64>>>,
    pub sufficient_alphabet: Alphabet,
    pub degraded_alphabet: Alphabet,
}

/// Decides whether the channel `P_{S|T}` of `candidate_sufficient` can be
/// stochastically degraded into the channel of the remaining source, i.e.
/// whether a row-stochastic `K` exists with `P_{S|T=t} K = P_{D|T=t}` for
/// every target symbol `t` of positive probability.
///
/// Target symbols with zero probability impose no constraint.
pub fn blackwell_check(dist: &JointDist, target: Var, candidate_sufficient: Var) -> Result<BlackwellVerdict> {
    let (a, b) = target.others();
    let degraded = if candidate_sufficient == a {
        b
    } else if candidate_sufficient == b {
        a
    } else {
        return Err(Error::InvalidArgument(format!(
            "candidate {candidate_sufficient} must differ from the target {target}"
        )));
    };
    let p_ts = dist.marginal(&[target, candidate_sufficient])?;
    let p_td = dist.marginal(&[target, degraded])?;
    let nt = dist.alphabet(target).len();
    let ns = dist.alphabet(candidate_sufficient).len();
    let nd = dist.alphabet(degraded).len();
    let get = |arr: &ndarray::ArrayD<f64>, other: Var, t: usize, o: usize| {
        if target.axis() < other.axis() {
            arr[[t, o].as_slice()]
        } else {
            arr[[o, t].as_slice()]
        }
    };

    // Unknowns K[s][d] flattened row-major.
    let nv = ns * nd;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for s in 0..ns {
        let mut row = vec![0.0; nv];
        for d in 0..nd {
            row[s * nd + d] = 1.0;
        }
        rows.push(row);
        rhs.push(1.0);
    }
    for t in 0..nt {
        let pt: f64 = (0..ns).map(|s| get(&p_ts, candidate_sufficient, t, s)).sum();
        if pt <= 0.0 {
            continue;
        }
        for d in 0..nd {
            let mut row = vec![0.0; nv];
            for s in 0..ns {
                row[s * nd + d] = get(&p_ts, candidate_sufficient, t, s) / pt;
            }
            rows.push(row);
            rhs.push(get(&p_td, degraded, t, d) / pt);
        }
    }

    let outcome = LinearProgram::new(rows, rhs, vec![0.0; nv]).solve(BLACKWELL_TOL);
    let (feasible, residual, channel) = match outcome {
        LpOutcome::Optimal { x, .. } => {
            let k: Vec<Vec<f64>> = x.chunks(nd).map(<[f64]>::to_vec).collect();
            (true, 0.0, Some(k))
        }
        LpOutcome::Infeasible { residual } => (false, residual, None),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    };
    Ok(BlackwellVerdict {
        target,
        sufficient: candidate_sufficient,
        degraded,
        feasible,
        residual,
        channel,
        sufficient_alphabet: dist.alphabet(candidate_sufficient).clone(),
        degraded_alphabet: dist.alphabet(degraded).clone(),
    })
}
