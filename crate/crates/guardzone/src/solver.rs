//! Guard-zone width solver.
//!
//! Both link directions reduce to the same question: the smallest
//! separation D at which a scalar objective first becomes non-negative.
//! The objective is decreasing-to-satisfied in D apart from small steps
//! where the surrounding ring picks up an extra site, so the solver first
//! scans coarsely from zero to catch the earliest satisfying bracket and
//! then bisects inside it. Every evaluation is recorded for diagnostics.

use crate::units::Distance;

/// Bisection stops once the bracket is narrower than this, in miles.
pub const GUARD_SOLVE_TOLERANCE_MILES: f64 = 0.01;
/// Coarse scan step used to locate the first sign change, in miles.
pub const GUARD_SCAN_STEP_MILES: f64 = 0.25;
/// The search gives up beyond this many FM tiers of separation.
pub const GUARD_SEARCH_LIMIT_TIERS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub distance_miles: f64,
    pub objective: f64,
}

/// Outcome of a guard-zone search.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardZoneResult {
    /// Smallest separation meeting the criterion, or the search limit if
    /// the criterion was never met.
    pub min_distance: Distance,
    /// The separation expressed in FM tiers (center spacing sqrt(3)·r).
    pub in_fm_tiers: f64,
    pub converged: bool,
    /// Number of objective evaluations spent.
    pub iterations: u32,
    /// Every (distance, objective) pair evaluated, in evaluation order.
    pub trace: Vec<TracePoint>,
}

/// Finds the smallest D in [0, limit] with `objective(D) >= 0`.
///
/// `objective` returns a signed margin: negative while the criterion is
/// violated, non-negative once met. `fm_tier_miles` fixes both the search
/// limit and the tier units of the result.
pub fn solve_guard_zone<E>(
    mut objective: impl FnMut(f64) -> Result<f64, E>,
    fm_tier_miles: f64,
) -> Result<GuardZoneResult, E> {
    let limit = GUARD_SEARCH_LIMIT_TIERS * fm_tier_miles;
    let mut trace = Vec::new();
    let mut eval = |d: f64, trace: &mut Vec<TracePoint>| -> Result<f64, E> {
        let value = objective(d)?;
        trace.push(TracePoint {
            distance_miles: d,
            objective: value,
        });
        Ok(value)
    };

    let result = |d: f64, converged: bool, trace: Vec<TracePoint>| GuardZoneResult {
        min_distance: Distance::from_miles(d).expect("solver distances are finite"),
        in_fm_tiers: d / fm_tier_miles,
        converged,
        iterations: trace.len() as u32,
        trace,
    };

    if eval(0.0, &mut trace)? >= 0.0 {
        return Ok(result(0.0, true, trace));
    }

    // Coarse scan for the first bracket [violated, satisfied].
    let mut lo = 0.0;
    let mut hi = None;
    let steps = (limit / GUARD_SCAN_STEP_MILES).ceil() as u64;
    for k in 1..=steps {
        let d = (k as f64 * GUARD_SCAN_STEP_MILES).min(limit);
        if eval(d, &mut trace)? >= 0.0 {
            hi = Some(d);
            break;
        }
        lo = d;
    }
    let Some(mut hi) = hi else {
        return Ok(result(limit, false, trace));
    };

    while hi - lo > GUARD_SOLVE_TOLERANCE_MILES {
        let mid = 0.5 * (lo + hi);
        if eval(mid, &mut trace)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(result(hi, true, trace))
}
