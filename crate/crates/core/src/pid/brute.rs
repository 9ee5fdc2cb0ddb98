//! Grid-search reference for unique information on all-binary alphabets.
//!
//! With binary `T`, `A`, `B`, each target slice of a polytope member is a
//! 2×2 table with fixed margins, so it has one free entry `q(t, 0, 0)`
//! ranging over its Fréchet interval
//! `[max(0, P(t,a₀) + P(t,b₀) − P(t)), min(P(t,a₀), P(t,b₀))]`.
//! The polytope is therefore a rectangle in two parameters and can be
//! scanned directly. Shares no code with the Newton solver.

use rayon::prelude::*;

use super::polytope::MarginalPolytope;
use crate::error::{Error, Result};

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// One 2×2 slice as a function of its free entry.
struct Slice {
    ra0: f64,
    cb0: f64,
    total: f64,
    lo: f64,
    hi: f64,
}

impl Slice {
    /// Cells `[q00, q01, q10, q11]` for free entry `x`.
    fn cells(&self, x: f64) -> [f64; 4] {
        [
            x,
            (self.ra0 - x).max(0.0),
            (self.cb0 - x).max(0.0),
            (self.total - self.ra0 - self.cb0 + x).max(0.0),
        ]
    }

    fn point(&self, k: usize, steps: usize) -> f64 {
        if steps == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (steps - 1) as f64
        }
    }
}

/// Minimum of `I_Q(T; A | B)` in bits over a `grid_steps × grid_steps`
/// grid spanning both Fréchet intervals (endpoints included).
pub fn brute_force_unique(poly: &MarginalPolytope, grid_steps: usize) -> Result<f64> {
    if poly.dim() != (2, 2, 2) {
        return Err(Error::UnsupportedShape(format!(
            "grid reference needs binary alphabets, got {:?}",
            poly.dim()
        )));
    }
    if grid_steps == 0 {
        return Err(Error::InvalidArgument("grid_steps must be positive".into()));
    }
    let ta = poly.p_ta();
    let tb = poly.p_tb();
    let slices: Vec<Slice> = (0..2)
        .map(|t| {
            let total = ta[[t, 0]] + ta[[t, 1]];
            let (ra0, cb0) = (ta[[t, 0]], tb[[t, 0]]);
            let lo = (ra0 + cb0 - total).max(0.0);
            let hi = ra0.min(cb0).max(lo);
            Slice { ra0, cb0, total, lo, hi }
        })
        .collect();

    // I(T;A|B) = H(T,B) + H(A,B) − H(B) − H(T,A,B); H(T,B) and H(B) are
    // fixed on the polytope, H(T,A,B) separates over slices.
    let h_tb: f64 = -tb.iter().map(|&p| xlogx(p)).sum::<f64>();
    let h_b: f64 = -(0..2).map(|b| xlogx(tb[[0, b]] + tb[[1, b]])).sum::<f64>();
    let per_slice: Vec<Vec<([f64; 4], f64)>> = slices
        .iter()
        .map(|s| {
            (0..grid_steps)
                .map(|k| {
                    let c = s.cells(s.point(k, grid_steps));
                    (c, -c.iter().map(|&v| xlogx(v)).sum::<f64>())
                })
                .collect()
        })
        .collect();

    let best = per_slice[0]
        .par_iter()
        .map(|(c0, h0)| {
            per_slice[1]
                .iter()
                .map(|(c1, h1)| {
                    let h_ab = -(0..4).map(|i| xlogx(c0[i] + c1[i])).sum::<f64>();
                    h_tb + h_ab - h_b - h0 - h1
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best.max(0.0))
}
