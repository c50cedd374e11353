//! Ratio interval on which NOMA beats TDMA for a given weak-user SNR.
//!
//! The gap `f(r)` is unimodal on `r > 0`, negative at `r -> 0` and tending to
//! `-inf`, so its non-negative set is a single (possibly empty) interval
//! `[r_min, r_max]`. [`sca`] finds both ends with successive convex
//! approximation, [`oracle`] by plain bisection; [`region_for_snr`] runs the
//! former and optionally checks it against the latter.

pub mod oracle;
pub mod sca;

use crate::error::{ensure, Error, Result};
use crate::rate;

pub use oracle::oracle_region;
pub use sca::{sca_solve, Objective, ScaTrace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioInterval {
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaRegion {
    pub snr: f64,
    pub interval: Option<RatioInterval>,
}

impl NomaRegion {
    pub fn empty(snr: f64) -> Self {
        Self {
            snr,
            interval: None,
        }
    }

    pub fn new(snr: f64, r_min: f64, r_max: f64) -> Self {
        Self {
            snr,
            interval: Some(RatioInterval { r_min, r_max }),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.interval.is_none()
    }

    pub fn contains(&self, ratio: f64) -> bool {
        self.interval
            .is_some_and(|iv| iv.r_min <= ratio && ratio <= iv.r_max)
    }

    pub fn r_min(&self) -> Option<f64> {
        self.interval.map(|iv| iv.r_min)
    }

    pub fn r_max(&self) -> Option<f64> {
        self.interval.map(|iv| iv.r_max)
    }

    /// `10 log10(r_max / r_min)`, zero when empty.
    pub fn width_db(&self) -> f64 {
        self.interval
            .map_or(0.0, |iv| 10.0 * (iv.r_max / iv.r_min).log10())
    }

    /// `n` ratios log-spaced strictly inside the interval.
    pub fn interior_points(&self, n: usize) -> Vec<f64> {
        let Some(iv) = self.interval else {
            return Vec::new();
        };
        let (a, b) = (iv.r_min.ln(), iv.r_max.ln());
        (1..=n)
            .map(|k| (a + (b - a) * k as f64 / (n + 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaSettings {
    /// Stop once consecutive iterates differ by less than
    /// `tolerance * max(1, r)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub scan_points: usize,
    pub scan_lo: f64,
    pub scan_hi: f64,
    /// Re-solve every region with the bisection oracle and fail on a relative
    /// disagreement above [`ORACLE_AGREEMENT`].
    pub validate_with_oracle: bool,
}

pub const ORACLE_AGREEMENT: f64 = 1e-3;

impl Default for ScaSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100,
            scan_points: 400,
            scan_lo: 1.0,
            scan_hi: 1e12,
            validate_with_oracle: false,
        }
    }
}

impl ScaSettings {
    pub fn validate(&self) -> Result<()> {
        ensure(self.tolerance > 0.0, "SCA tolerance", self.tolerance, "> 0")?;
        ensure(
            self.max_iterations >= 1,
            "SCA max iterations",
            self.max_iterations as f64,
            ">= 1",
        )?;
        ensure(
            self.scan_points >= 16,
            "scan points",
            self.scan_points as f64,
            ">= 16",
        )?;
        ensure(
            self.scan_lo >= 1.0,
            "scan lower ratio",
            self.scan_lo,
            ">= 1",
        )?;
        ensure(
            self.scan_hi > self.scan_lo && self.scan_hi.is_finite(),
            "scan upper ratio",
            self.scan_hi,
            "finite and > scan lower ratio",
        )
    }
}

/// Best point of a log-spaced scan of the ratio range, if the gap is positive
/// there.
pub fn feasibility_scan(snr: f64, settings: &ScaSettings) -> Result<Option<f64>> {
    settings.validate()?;
    ensure(snr > 0.0, "SNR", snr, "> 0")?;
    let (a, b) = (settings.scan_lo.ln(), settings.scan_hi.ln());
    let n = settings.scan_points;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..n {
        let r = if k + 1 == n {
            settings.scan_hi
        } else {
            (a + (b - a) * k as f64 / (n - 1) as f64).exp()
        };
        let f = rate::gap(snr, r);
        if best.is_none_or(|(_, fb)| f > fb) {
            best = Some((r, f));
        }
    }
    Ok(best.filter(|&(_, f)| f > 0.0).map(|(r, _)| r))
}

/// Region for one SNR via two SCA runs seeded by the feasibility scan.
pub fn region_for_snr(snr: f64, settings: &ScaSettings) -> Result<NomaRegion> {
    let Some(seed) = feasibility_scan(snr, settings)? else {
        if settings.validate_with_oracle {
            let check = oracle_region(snr, settings)?;
            if let Some(iv) = check.interval {
                return Err(Error::OracleMismatch {
                    snr,
                    bound: "emptiness",
                    sca: f64::NAN,
                    oracle: iv.r_min,
                });
            }
        }
        return Ok(NomaRegion::empty(snr));
    };
    let (r_min, _) = sca_solve(snr, Objective::Min, seed, settings)?;
    let (r_max, _) = sca_solve(snr, Objective::Max, seed, settings)?;
    let region = NomaRegion::new(snr, r_min, r_max);

    if settings.validate_with_oracle {
        let check = oracle_region(snr, settings)?;
        let iv = check.interval.ok_or(Error::OracleMismatch {
            snr,
            bound: "emptiness",
            sca: r_min,
            oracle: f64::NAN,
        })?;
        for (bound, sca, oracle) in [("r_min", r_min, iv.r_min), ("r_max", r_max, iv.r_max)] {
            if ((sca - oracle) / oracle).abs() > ORACLE_AGREEMENT {
                return Err(Error::OracleMismatch {
                    snr,
                    bound,
                    sca,
                    oracle,
                });
            }
        }
    }
    Ok(region)
}
