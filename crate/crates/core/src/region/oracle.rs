//! Brute-force reference for the NOMA region.
//!
//! Unimodality of the gap means each end of the region is the only sign
//! change on its side of any feasible point, so plain bisection on the gap
//! itself brackets it. No tangents or surrogates are involved.

use super::{feasibility_scan, NomaRegion, ScaSettings};
use crate::error::{Error, Result};
use crate::rate;

/// Relative bracket width at which bisection stops.
pub const ORACLE_REL_WIDTH: f64 = 1e-12;

/// Largest upper bracket tried when searching for `r_max`.
pub const BRACKET_LIMIT: f64 = 1e30;

/// Bisects `f` between a feasible (`f >= 0`) end and an infeasible end and
/// returns the feasible end of the final bracket.
fn bisect_boundary(f: impl Fn(f64) -> f64, mut feasible: f64, mut infeasible: f64) -> f64 {
    for _ in 0..400 {
        let width = (feasible - infeasible).abs();
        if width <= ORACLE_REL_WIDTH * feasible.abs().max(infeasible.abs()) {
            break;
        }
        let mid = 0.5 * (feasible + infeasible);
        if mid == feasible || mid == infeasible {
            break;
        }
        if f(mid) >= 0.0 {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    feasible
}

pub fn oracle_region(snr: f64, settings: &ScaSettings) -> Result<NomaRegion> {
    let Some(seed) = feasibility_scan(snr, settings)? else {
        return Ok(NomaRegion::empty(snr));
    };
    let f = |r: f64| rate::gap(snr, r);

    let lo = settings.scan_lo.max(1.0);
    let r_min = if f(lo) >= 0.0 {
        lo
    } else {
        bisect_boundary(f, seed, lo)
    };

    let mut hi = settings.scan_hi.max(seed);
    while f(hi) >= 0.0 {
        hi *= 10.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::BracketOverflow {
                snr,
                limit: BRACKET_LIMIT,
            });
        }
    }
    let r_max = bisect_boundary(f, seed, hi);
    Ok(NomaRegion::new(snr, r_min, r_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_at_snr_100() {
        let reg = oracle_region(100.0, &ScaSettings::default()).unwrap();
        let iv = reg.interval.unwrap();
        // f(3) < 0 < f(3.2) and f(1000) > 0 > f(3000)
        assert!(rate::gap(100.0, 3.0) < 0.0 && rate::gap(100.0, 3.2) > 0.0);
        assert!(rate::gap(100.0, 1000.0) > 0.0 && rate::gap(100.0, 3000.0) < 0.0);
        assert!(iv.r_min > 3.0 && iv.r_min < 3.2);
        assert!(iv.r_max > 1000.0 && iv.r_max < 3000.0);
        assert!((iv.r_min - 3.1270664967622728).abs() < 1e-9);
        assert!((iv.r_max / 1799.6925145612536 - 1.0).abs() < 1e-9);
        assert!(rate::gap(100.0, iv.r_min).abs() < 1e-6);
        assert!(rate::gap(100.0, iv.r_max).abs() < 1e-6);
    }

    #[test]
    fn oracle_empty_at_unit_snr() {
        assert!(oracle_region(1.0, &ScaSettings::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn oracle_expands_small_upper_bracket() {
        let s = ScaSettings {
            scan_hi: 1e3,
            ..Default::default()
        };
        let iv = oracle_region(100.0, &s).unwrap().interval.unwrap();
        assert!((iv.r_max / 1799.6925145612536 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_reports_bracket_overflow() {
        // r_max grows roughly like 0.19 * snr^2, so snr = 1e17 puts it past 1e30.
        let err = oracle_region(1e17, &ScaSettings::default()).unwrap_err();
        assert!(matches!(err, Error::BracketOverflow { .. }));
    }
}
