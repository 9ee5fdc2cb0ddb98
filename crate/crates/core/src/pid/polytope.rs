use ndarray::{Array2, Array3};

use crate::dist::{Alphabet, JointDist, Var};
use crate::error::{Error, Result};

/// Tolerance for the two pairwise marginals agreeing on the target marginal.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// All joint distributions of `(T, A, B)` whose `(T, A)` and `(T, B)`
/// marginals equal fixed tables.
///
/// Distributions in the polytope are tensors indexed `[t, a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalPolytope {
    target: Alphabet,
    source_a: Alphabet,
    source_b: Alphabet,
    p_ta: Array2<f64>,
    p_tb: Array2<f64>,
}

impl MarginalPolytope {
    pub fn new(
        target: Alphabet,
        source_a: Alphabet,
        source_b: Alphabet,
        p_ta: Array2<f64>,
        p_tb: Array2<f64>,
    ) -> Result<Self> {
        if p_ta.dim() != (target.len(), source_a.len()) || p_tb.dim() != (target.len(), source_b.len()) {
            return Err(Error::InvalidDistribution(format!(
                "marginal shapes {:?} and {:?} do not match alphabets ({}, {}, {})",
                p_ta.dim(),
                p_tb.dim(),
                target.len(),
                source_a.len(),
                source_b.len()
            )));
        }
        for table in [&p_ta, &p_tb] {
            if table.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidDistribution("marginal entries must be nonnegative".into()));
            }
            let total = table.sum();
            if (total - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidDistribution(format!("marginal sums to {total}, not 1")));
            }
        }
        for t in 0..target.len() {
            let from_a = p_ta.row(t).sum();
            let from_b = p_tb.row(t).sum();
            if (from_a - from_b).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "pairwise marginals disagree on the target marginal at '{}': {from_a} vs {from_b}",
                    target.label(t)
                )));
            }
        }
        Ok(Self {
            target,
            source_a,
            source_b,
            p_ta,
            p_tb,
        })
    }

    /// The polytope of `dist` with `target` as `T` and the remaining two
    /// variables, in axis order, as `A` and `B`.
    pub fn from_dist(dist: &JointDist, target: Var) -> Result<Self> {
        let (a, b) = target.others();
        let local = dist.permuted([target, a, b])?;
        let p = local.probs();
        let (nt, na, nb) = p.dim();
        let mut p_ta = Array2::zeros((nt, na));
        let mut p_tb = Array2::zeros((nt, nb));
        for ((t, i, j), &v) in p.indexed_iter() {
            p_ta[[t, i]] += v;
            p_tb[[t, j]] += v;
        }
        let [ta, aa, ba] = local.alphabets().clone();
        Self::new(ta, aa, ba, p_ta, p_tb)
    }

    /// The same polytope with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            target: self.target.clone(),
            source_a: self.source_b.clone(),
            source_b: self.source_a.clone(),
            p_ta: self.p_tb.clone(),
            p_tb: self.p_ta.clone(),
        }
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn source_a(&self) -> &Alphabet {
        &self.source_a
    }

    pub fn source_b(&self) -> &Alphabet {
        &self.source_b
    }

    pub fn p_ta(&self) -> &Array2<f64> {
        &self.p_ta
    }

    pub fn p_tb(&self) -> &Array2<f64> {
        &self.p_tb
    }

    pub fn dim(&self) -> (usize, usize, usize) {
        (self.target.len(), self.source_a.len(), self.source_b.len())
    }

    pub fn target_marginal(&self) -> Vec<f64> {
        self.p_ta.rows().into_iter().map(|r| r.sum()).collect()
    }

    /// Whether cell `(t, a, b)` can carry mass somewhere in the polytope.
    pub fn is_free(&self, t: usize, a: usize, b: usize) -> bool {
        self.p_ta[[t, a]] > 0.0 && self.p_tb[[t, b]] > 0.0
    }

    /// Largest absolute deviation of `q`'s pairwise marginals from the
    /// fixed ones, or `None` if `q` has the wrong shape.
    pub fn marginal_defect(&self, q: &Array3<f64>) -> Option<f64> {
        if q.dim() != self.dim() {
            return None;
        }
        let (nt, na, nb) = self.dim();
        let mut worst: f64 = 0.0;
        for t in 0..nt {
            for a in 0..na {
                let s: f64 = (0..nb).map(|b| q[[t, a, b]]).sum();
                worst = worst.max((s - self.p_ta[[t, a]]).abs());
            }
            for b in 0..nb {
                let s: f64 = (0..na).map(|a| q[[t, a, b]]).sum();
                worst = worst.max((s - self.p_tb[[t, b]]).abs());
            }
        }
        Some(worst)
    }

    /// Membership test: nonnegative and both marginals within `tol`.
    pub fn contains(&self, q: &Array3<f64>, tol: f64) -> bool {
        q.iter().all(|&v| v >= 0.0) && self.marginal_defect(q).is_some_and(|d| d <= tol)
    }

    /// `Q₀(t, a, b) = P(t, a) P(t, b) / P(t)`, zero where `P(t) = 0`.
    /// Under `Q₀`, `A` and `B` are independent given `T`.
    pub fn q0(&self) -> Array3<f64> {
        let pt = self.target_marginal();
        Array3::from_shape_fn(self.dim(), |(t, a, b)| {
            if pt[t] > 0.0 {
                self.p_ta[[t, a]] * self.p_tb[[t, b]] / pt[t]
            } else {
                0.0
            }
        })
    }

    /// Wraps a tensor of this polytope as a [`JointDist`] whose `(Z, Ŷ, Y)`
    /// slots hold `(T, A, B)`.
    pub fn to_dist(&self, q: Array3<f64>) -> Result<JointDist> {
        JointDist::from_weights([self.target.clone(), self.source_a.clone(), self.source_b.clone()], q)
    }
}

/// Inverse of the axis relabelling done by [`JointDist::permuted`] with
/// `[target, a, b]`.
pub(crate) fn restore_order(target: Var) -> [Var; 3] {
    let (a, b) = target.others();
    let order = [target, a, b];
    let mut inv = [Var::Z; 3];
    for (slot, var) in Var::ALL.iter().enumerate() {
        let pos = order.iter().position(|v| v == var).expect("order is a permutation");
        inv[slot] = Var::ALL[pos];
    }
    inv
}

/// The `Q₀` construction for `dist`, returned in `dist`'s own axis layout.
pub fn construct_q0(dist: &JointDist, target: Var) -> Result<JointDist> {
    let poly = MarginalPolytope::from_dist(dist, target)?;
    poly.to_dist(poly.q0())?.permuted(restore_order(target))
}
