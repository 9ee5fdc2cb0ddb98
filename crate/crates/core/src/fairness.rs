//! Information-theoretic fairness gaps and their decomposition.
//!
//! With sensitive attribute `Z`, prediction `Ŷ` and label `Y`:
//!
//! | gap                | quantity     | PID regions                  |
//! |--------------------|--------------|------------------------------|
//! | statistical parity | `I(Z;Ŷ)`     | `Uni(Z:Ŷ|Y) + Red`           |
//! | equalized odds     | `I(Z;Ŷ|Y)`   | `Uni(Z:Ŷ|Y) + Syn`           |
//! | predictive parity  | `I(Z;Y|Ŷ)`   | `Uni(Z:Y|Ŷ) + Syn`           |
//! | dataset            | `I(Z;Y)`     | `Uni(Z:Y|Ŷ) + Red`           |
//!
//! Every audit also runs five structural checks on the result. They
//! use vacuous-pass semantics: when a premise does not hold the check is
//! reported with `premise = false, holds = true`.

use serde::{Deserialize, Serialize};

use crate::dist::{conditional_mutual_information, joint_mutual_information, mutual_information, JointDist, Var};
use crate::error::Result;
use crate::pid::{decompose, PidDecomposition, SolverConfig};

/// Threshold separating zero from positive information, in bits. Also the
/// tolerance for the identities checked by the theorem checkers.
pub const POSITIVITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairnessGaps {
    /// `I(Z; Ŷ)`.
    pub sp_gap: f64,
    /// `I(Z; Ŷ | Y)`.
    pub eo_gap: f64,
    /// `I(Z; Y | Ŷ)`.
    pub pp_gap: f64,
    /// `I(Z; Y)`.
    pub dataset_mi: f64,
}

impl FairnessGaps {
    /// `sp + pp − eo − dataset_mi`; zero up to rounding since both sides
    /// expand `I(Z; Ŷ, Y)` by the chain rule.
    pub fn chain_rule_defect(&self) -> f64 {
        self.sp_gap + self.pp_gap - self.eo_gap - self.dataset_mi
    }
}

/// The three fairness gaps plus `I(Z;Y)`. Solver-free.
pub fn compute_gaps(dist: &JointDist) -> Result<FairnessGaps> {
    Ok(FairnessGaps {
        sp_gap: mutual_information(dist, Var::Z, Var::Yhat)?,
        eo_gap: conditional_mutual_information(dist, Var::Z, Var::Yhat, Var::Y)?,
        pp_gap: conditional_mutual_information(dist, Var::Z, Var::Y, Var::Yhat)?,
        dataset_mi: mutual_information(dist, Var::Z, Var::Y)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gap {
    Sp,
    Eo,
    Pp,
}

/// Outcome of one theorem check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub premise: bool,
    pub holds: bool,
    /// Smallest slack among the asserted conclusions, in bits; negative
    /// exactly when `holds` is false. Zero when the premise fails.
    pub margin: f64,
    /// Gaps above the positivity threshold at the time of the check.
    pub positive_gaps: Vec<Gap>,
}

impl TheoremVerdict {
    fn vacuous(gaps: &FairnessGaps) -> Self {
        Self {
            premise: false,
            holds: true,
            margin: 0.0,
            positive_gaps: positive_gaps(gaps),
        }
    }

    fn from_margin(premise: bool, margin: f64, gaps: &FairnessGaps) -> Self {
        Self {
            premise,
            holds: margin >= 0.0,
            margin,
            positive_gaps: positive_gaps(gaps),
        }
    }

    /// `"vacuous"`, `"held"` or `"breached"`.
    pub fn status(&self) -> &'static str {
        match (self.premise, self.holds) {
            (_, false) => "breached",
            (false, true) => "vacuous",
            (true, true) => "held",
        }
    }
}

fn positive_gaps(g: &FairnessGaps) -> Vec<Gap> {
    [(Gap::Sp, g.sp_gap), (Gap::Eo, g.eo_gap), (Gap::Pp, g.pp_gap)]
        .into_iter()
        .filter(|(_, v)| *v > POSITIVITY_THRESHOLD)
        .map(|(k, _)| k)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremFlags {
    pub t1: TheoremVerdict,
    pub t2: TheoremVerdict,
    pub t3: TheoremVerdict,
    pub t4: TheoremVerdict,
    pub t5: TheoremVerdict,
}

impl TheoremFlags {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &TheoremVerdict)> {
        [("t1", &self.t1), ("t2", &self.t2), ("t3", &self.t3), ("t4", &self.t4), ("t5", &self.t5)].into_iter()
    }

    pub fn breached(&self) -> Vec<&'static str> {
        self.iter().filter(|(_, v)| !v.holds).map(|(k, _)| k).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessAudit {
    pub gaps: FairnessGaps,
    /// Decomposition of `I(Z; Ŷ, Y)` with `A = Ŷ`, `B = Y`.
    pub pid: PidDecomposition,
    pub theorems: TheoremFlags,
}

impl FairnessAudit {
    /// Largest deviation among the four gap/PID identities.
    pub fn identity_defect(&self) -> f64 {
        let p = &self.pid;
        let g = &self.gaps;
        [
            g.sp_gap - (p.uni_a + p.red),
            g.eo_gap - (p.uni_a + p.syn),
            g.pp_gap - (p.uni_b + p.syn),
            g.dataset_mi - (p.uni_b + p.red),
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

/// Gaps, decomposition, and all five theorem checks for one distribution.
pub fn audit(dist: &JointDist, cfg: &SolverConfig) -> Result<FairnessAudit> {
    let gaps = compute_gaps(dist)?;
    let pid = decompose(dist, Var::Z, cfg)?;
    let total = joint_mutual_information(dist, Var::Z)?;
    let mut out = FairnessAudit {
        gaps,
        pid,
        theorems: TheoremFlags {
            t1: TheoremVerdict::vacuous(&gaps),
            t2: TheoremVerdict::vacuous(&gaps),
            t3: TheoremVerdict::vacuous(&gaps),
            t4: TheoremVerdict::vacuous(&gaps),
            t5: TheoremVerdict::vacuous(&gaps),
        },
    };
    out.theorems = TheoremFlags {
        t1: check_impossibility(&out, total),
        t2: check_dataset_relation(&out),
        t3: check_sp_zero_regime(&out),
        t4: check_pp_zero_regime(&out),
        t5: check_eo_zero_tradeoff(&out),
    };
    Ok(out)
}

/// Positive `I(Z; Ŷ, Y)` forces at least one positive gap; zero total
/// forces all gaps to zero.
pub fn check_impossibility(audit: &FairnessAudit, total_mi: f64) -> TheoremVerdict {
    let g = &audit.gaps;
    let largest = g.sp_gap.max(g.eo_gap).max(g.pp_gap);
    if total_mi > POSITIVITY_THRESHOLD {
        // Strict positivity: a gap sitting exactly at the threshold fails.
        let margin = largest - POSITIVITY_THRESHOLD;
        TheoremVerdict {
            premise: true,
            holds: margin > 0.0,
            margin,
            positive_gaps: positive_gaps(g),
        }
    } else {
        TheoremVerdict::from_margin(false, POSITIVITY_THRESHOLD - largest, g)
    }
}

/// `I(Z;Y) = Uni(Z:Y|Ŷ) + Red` always; when `I(Z;Y) > 0`, the statistical
/// parity gap or the predictive parity gap must be positive.
pub fn check_dataset_relation(audit: &FairnessAudit) -> TheoremVerdict {
    let g = &audit.gaps;
    let p = &audit.pid;
    let identity = POSITIVITY_THRESHOLD - (g.dataset_mi - (p.uni_b + p.red)).abs();
    if g.dataset_mi > POSITIVITY_THRESHOLD {
        let positivity = g.sp_gap.max(g.pp_gap) - POSITIVITY_THRESHOLD;
        TheoremVerdict {
            premise: true,
            holds: identity >= 0.0 && positivity > 0.0,
            margin: identity.min(positivity),
            positive_gaps: positive_gaps(g),
        }
    } else {
        TheoremVerdict::from_margin(false, identity, g)
    }
}

/// Statistical parity satisfied: predictive parity gap dominates the
/// equalized odds gap, with equality when `I(Z;Y) = 0`.
pub fn check_sp_zero_regime(audit: &FairnessAudit) -> TheoremVerdict {
    let g = &audit.gaps;
    if g.sp_gap > POSITIVITY_THRESHOLD {
        return TheoremVerdict::vacuous(g);
    }
    let mut margin = g.pp_gap - g.eo_gap + POSITIVITY_THRESHOLD;
    if g.dataset_mi <= POSITIVITY_THRESHOLD {
        margin = margin.min(POSITIVITY_THRESHOLD - (g.pp_gap - g.eo_gap).abs());
    }
    TheoremVerdict::from_margin(true, margin, g)
}

/// Predictive parity satisfied: statistical parity gap dominates the
/// equalized odds gap, with `sp = eo` when `I(Z;Y) = 0`.
pub fn check_pp_zero_regime(audit: &FairnessAudit) -> TheoremVerdict {
    let g = &audit.gaps;
    if g.pp_gap > POSITIVITY_THRESHOLD {
        return TheoremVerdict::vacuous(g);
    }
    let mut margin = g.sp_gap - g.eo_gap + POSITIVITY_THRESHOLD;
    if g.dataset_mi <= POSITIVITY_THRESHOLD {
        margin = margin.min(POSITIVITY_THRESHOLD - (g.sp_gap - g.eo_gap).abs());
    }
    TheoremVerdict::from_margin(true, margin, g)
}

/// Equalized odds satisfied on a dataset with `I(Z;Y) > 0`: statistical
/// parity and predictive parity trade off, `sp + pp = I(Z;Y)`.
pub fn check_eo_zero_tradeoff(audit: &FairnessAudit) -> TheoremVerdict {
    let g = &audit.gaps;
    if g.eo_gap > POSITIVITY_THRESHOLD || g.dataset_mi <= POSITIVITY_THRESHOLD {
        return TheoremVerdict::vacuous(g);
    }
    let margin = POSITIVITY_THRESHOLD - (g.sp_gap + g.pp_gap - g.dataset_mi).abs();
    TheoremVerdict::from_margin(true, margin, g)
}
