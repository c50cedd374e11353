//! Successive convex approximation for the two ends of the NOMA region.
//!
//! Both bound problems read `min / max r  s.t.  r >= 1,  p(r) - q(r) >= 0`
//! with `p`, `q` concave, i.e. a difference-of-concave constraint. Each
//! iteration replaces `q` by its tangent at the previous iterate. Since a
//! concave function lies below its tangents, the surrogate constraint
//! `p(r) - q_tan(r) >= 0` defines a convex subset of the true feasible set
//! that still contains the previous iterate. The surrogate problem is a
//! one-dimensional convex program: its optimum is the outermost root of the
//! concave function `p - q_tan` in the requested direction, found by
//! bracketing and bisection.

use std::io::Write;

use crate::error::{ensure, Error, Result};
use crate::rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScaTrace {
    /// `r(0)` (the seed) followed by every surrogate solution.
    pub iterates: Vec<f64>,
    pub converged: bool,
}

impl ScaTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    /// Writes `iter,r,f` rows for `snr`.
    pub fn write_csv<W: Write>(&self, snr: f64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "r", "f"])?;
        for (i, &r) in self.iterates.iter().enumerate() {
            w.write_record([i.to_string(), r.to_string(), rate::gap(snr, r).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lowest ratio the surrogate problems may return.
const RATIO_FLOOR: f64 = 1.0;

const INNER_REL_WIDTH: f64 = 1e-15;

/// `p(r) - [q(r0) + q'(r0)(r - r0)]`.
fn surrogate(snr: f64, anchor: f64) -> impl Fn(f64) -> f64 {
    let q0 = rate::tdma_sum(snr, anchor);
    let dq0 = rate::tdma_sum_slope(snr, anchor);
    move |r| rate::noma_sum(snr, r) - (q0 + dq0 * (r - anchor))
}

/// Root of `g` between a point where `g >= 0` and one where `g < 0`; returns
/// the end that stays feasible.
fn bisect_root(g: &impl Fn(f64) -> f64, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..300 {
        if (inside - outside).abs() <= INNER_REL_WIDTH * inside.abs().max(outside.abs()) {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if g(mid) >= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Optimum of the surrogate problem built around `anchor`, or `None` when
/// the surrogate is unbounded in the requested direction.
fn solve_surrogate(snr: f64, anchor: f64, objective: Objective) -> Option<f64> {
    let g = surrogate(snr, anchor);
    match objective {
        Objective::Min => {
            if g(RATIO_FLOOR) >= 0.0 {
                Some(RATIO_FLOOR)
            } else {
                Some(bisect_root(&g, anchor, RATIO_FLOOR))
            }
        }
        Objective::Max => {
            // q' > 0 while p saturates, so g eventually turns negative.
            let mut hi = anchor * 2.0;
            while g(hi) >= 0.0 {
                hi *= 2.0;
                if !hi.is_finite() {
                    return None;
                }
            }
            Some(bisect_root(&g, anchor, hi))
        }
    }
}

/// Runs the SCA iteration for one bound from a feasible `seed`.
pub fn sca_solve(
    snr: f64,
    objective: Objective,
    seed: f64,
    settings: &super::ScaSettings,
) -> Result<(f64, ScaTrace)> {
    settings.validate()?;
    ensure(snr > 0.0 && snr.is_finite(), "SNR", snr, "finite and > 0")?;
    ensure(
        seed >= RATIO_FLOOR && seed.is_finite(),
        "SCA seed",
        seed,
        "finite and >= 1",
    )?;
    let gap = rate::gap(snr, seed);
    if gap < 0.0 {
        return Err(Error::InfeasibleSeed { seed, gap });
    }

    let mut trace = ScaTrace {
        iterates: vec![seed],
        converged: false,
    };
    let mut current = seed;
    for _ in 0..settings.max_iterations {
        let next = solve_surrogate(snr, current, objective).ok_or(Error::NotConverged {
            iterations: trace.iterations(),
            last: current,
        })?;
        // Rounding can push a converged iterate a hair outside the surrogate
        // set; never step backwards past the anchor.
        let next = match objective {
            Objective::Min => next.min(current),
            Objective::Max => next.max(current),
        };
        trace.iterates.push(next);
        let step = (next - current).abs();
        current = next;
        if step < settings.tolerance * current.abs().max(1.0) {
            trace.converged = true;
            return Ok((current, trace));
        }
    }
    Err(Error::NotConverged {
        iterations: trace.iterations(),
        last: current,
    })
}
