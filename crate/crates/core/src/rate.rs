//! Two-user rate model.
//!
//! Everything is expressed through two scalars: the weak user's linear SNR
//! `snr` and the squared gain ratio `ratio = h_strong^2 / h_weak^2`. Rates use
//! the lower bound `log2(1 + t * SINR)` with `t = e / (2 pi)`, FTPA power
//! allocation with unit exponent and equal noise power at both receivers.
//!
//! With those substitutions the NOMA pair sum-rate per unit slot is
//!
//! ```text
//! p(r) = log2(1 + t r g / (r + g + 1)) + log2(1 + t r g / (r + 1))
//! ```
//!
//! and TDMA with an even half/half split gives
//!
//! ```text
//! q(r) = 0.5 log2(1 + t g) + 0.5 log2(1 + t r g)
//! ```
//!
//! NOMA is preferred wherever the gap `f(r) = p(r) - q(r)` is non-negative.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{ensure, Result};

/// `e / (2 pi)`.
pub const T: f64 = E / (2.0 * PI);

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Weak-user SNR and squared gain ratio of a canonicalised pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState {
    snr: f64,
    ratio: f64,
}

impl PairState {
    pub fn new(snr: f64, ratio: f64) -> Result<Self> {
        ensure(
            snr > 0.0 && snr.is_finite(),
            "weak-user SNR",
            snr,
            "finite and > 0",
        )?;
        ensure(
            ratio >= 1.0 && ratio.is_finite(),
            "gain ratio",
            ratio,
            "finite and >= 1",
        )?;
        Ok(Self { snr, ratio })
    }

    /// Orders the two SNRs so the weaker one is the reference.
    pub fn from_snrs(a: f64, b: f64) -> Result<Self> {
        let (weak, strong) = if a <= b { (a, b) } else { (b, a) };
        ensure(weak > 0.0, "weak-user SNR", weak, "> 0")?;
        Self::new(weak, strong / weak)
    }

    /// Pair state from raw gains, LED power and the common noise power.
    pub fn from_gains(h1: f64, h2: f64, p_led: f64, noise_power: f64) -> Result<Self> {
        let (weak, strong) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
        ensure(weak > 0.0, "weak-user gain", weak, "> 0")?;
        ensure(p_led > 0.0, "LED power", p_led, "> 0")?;
        ensure(noise_power > 0.0, "noise power", noise_power, "> 0")?;
        let ratio = (strong / weak).powi(2);
        Self::new(p_led * weak * weak / noise_power, ratio)
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn t(&self) -> f64 {
        T
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub weak: f64,
    pub strong: f64,
}

/// FTPA split with unit decay exponent: `(r/(r+1), 1/(r+1))`.
pub fn ftpa_allocation(ratio: f64) -> Result<PowerAllocation> {
    ensure(
        ratio >= 1.0 && ratio.is_finite(),
        "gain ratio",
        ratio,
        "finite and >= 1",
    )?;
    let strong = 1.0 / (ratio + 1.0);
    Ok(PowerAllocation {
        weak: 1.0 - strong,
        strong,
    })
}

/// `p(r)`: NOMA sum-rate of the pair over a unit slot. Valid for any `r > 0`.
pub fn noma_sum(snr: f64, ratio: f64) -> f64 {
    let rg = ratio * snr;
    log2_1p(T * rg / (ratio + snr + 1.0)) + log2_1p(T * rg / (ratio + 1.0))
}

/// `q(r)`: TDMA sum-rate of the pair over a unit slot split in half.
pub fn tdma_sum(snr: f64, ratio: f64) -> f64 {
    0.5 * log2_1p(T * snr) + 0.5 * log2_1p(T * ratio * snr)
}

/// `f(r) = p(r) - q(r)`.
pub fn gap(snr: f64, ratio: f64) -> f64 {
    noma_sum(snr, ratio) - tdma_sum(snr, ratio)
}

/// `dp/dr`, differentiated term by term.
pub fn noma_sum_slope(snr: f64, ratio: f64) -> f64 {
    let tg = T * snr;
    let a = ratio + snr + 1.0;
    let b = ratio + 1.0;
    // d/dr log(1 + tg r / a) = tg (g + 1) / (a (a + tg r))
    let weak = tg * (snr + 1.0) / (a * (a + tg * ratio));
    // d/dr log(1 + tg r / b) = tg / (b (b + tg r))
    let strong = tg / (b * (b + tg * ratio));
    (weak + strong) / LN_2
}

/// `dq/dr`.
pub fn tdma_sum_slope(snr: f64, ratio: f64) -> f64 {
    let tg = T * snr;
    0.5 * tg / (1.0 + tg * ratio) / LN_2
}

/// `f'(r)`.
pub fn gap_slope(snr: f64, ratio: f64) -> f64 {
    noma_sum_slope(snr, ratio) - tdma_sum_slope(snr, ratio)
}

/// Rate of a user served alone for a slot fraction `tau`.
pub fn single_user_rate(snr: f64, tau: f64) -> f64 {
    tau * log2_1p(T * snr)
}

/// NOMA sum-rate of a pair over slot fraction `tau`.
pub fn noma_pair_rate(state: &PairState, tau: f64) -> f64 {
    tau * noma_sum(state.snr, state.ratio)
}

/// TDMA sum-rate of a pair whose slot `tau` is split evenly.
pub fn tdma_pair_rate(state: &PairState, tau: f64) -> f64 {
    tau * tdma_sum(state.snr, state.ratio)
}

pub fn rate_gap(state: &PairState) -> f64 {
    gap(state.snr, state.ratio)
}

pub fn rate_gap_derivative(state: &PairState) -> f64 {
    gap_slope(state.snr, state.ratio)
}

/// Per-user NOMA rates `(weak, strong)` computed from the two SNRs directly.
///
/// Unlike [`noma_pair_rate`] this accepts a zero-gain member: FTPA then hands
/// the whole power budget to the dead user and both rates vanish.
pub fn noma_user_rates(weak_snr: f64, strong_snr: f64, tau: f64) -> (f64, f64) {
    let total = weak_snr + strong_snr;
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let alpha_weak = strong_snr / total;
    let alpha_strong = weak_snr / total;
    let weak = tau * log2_1p(T * alpha_weak * weak_snr / (alpha_strong * weak_snr + 1.0));
    let strong = tau * log2_1p(T * alpha_strong * strong_snr);
    (weak, strong)
}

/// Coefficients `f1..f5` of the published quartic numerator `u(r)` of the
/// gap slope (`f1` multiplies `r^4`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoefficients {
    pub f: [f64; 5],
}

impl QuarticCoefficients {
    pub fn eval(&self, r: f64) -> f64 {
        self.f.iter().fold(0.0, |acc, c| acc * r + c)
    }

    pub fn second_derivative(&self, r: f64) -> f64 {
        let [f1, f2, f3, _, _] = self.f;
        12.0 * f1 * r * r + 6.0 * f2 * r + 2.0 * f3
    }

    /// `(-, -, -, +, +)`.
    pub fn has_expected_signs(&self) -> bool {
        let [f1, f2, f3, f4, f5] = self.f;
        f1 < 0.0 && f2 < 0.0 && f3 < 0.0 && f4 > 0.0 && f5 > 0.0
    }
}

pub fn quartic_coefficients(snr: f64) -> Result<QuarticCoefficients> {
    ensure(snr > 0.0, "SNR", snr, "> 0")?;
    let g = snr;
    let t = T;
    let tg1 = t * g + 1.0;
    let f1 = -0.5 * tg1 * tg1;
    let f2 = tg1 * ((t * t - 0.5 * t) * g * g + (t - 1.0) * g - 2.0);
    let f3 = (t * t * t + 0.5 * t * t - 0.5 * t) * g.powi(3)
        + (4.5 * t * t - t - 0.5) * g * g
        + (4.0 * t - 3.0) * g
        - 1.0;
    let f4 =
        0.5 * t * g.powi(3) + (2.0 * t * t + 1.5 * t - 1.0) * g * g + (5.0 * t - 1.0) * g + 2.0;
    let f5 = 0.5 * (g + 1.0) * (g + 1.0) + t * g;
    Ok(QuarticCoefficients {
        f: [f1, f2, f3, f4, f5],
    })
}

/// Gap slope in its published closed form, whose second term
/// carries `t g (1 + t g)` where differentiating `p` gives `t g (1 + g)`.
/// Kept only to quantify that discrepancy; use [`gap_slope`].
pub fn transcribed_gap_slope(snr: f64, ratio: f64) -> f64 {
    let tg = T * snr;
    let r = ratio;
    let a = tg / ((1.0 + r + tg * r) * (1.0 + r));
    let b = tg * (1.0 + tg) / ((1.0 + r + snr + tg * r) * (1.0 + r + snr));
    let c = 0.5 * tg / (1.0 + tg * r);
    (a + b - c) / LN_2
}

/// Denominator `v(r)` of the published form `f'(r) = u(r) / v(r)`.
pub fn quartic_denominator(snr: f64, ratio: f64) -> f64 {
    let tg = T * snr;
    let r = ratio;
    LN_2 * (1.0 + r + tg * r)
        * (1.0 + r)
        * (1.0 + r + snr + tg * r)
        * (1.0 + r + snr)
        * (1.0 + tg * r)
        / tg
}

/// Relative mismatch between the published `u(r)/v(r)` and the verified
/// [`gap_slope`]. Diagnostic only.
pub fn quartic_slope_mismatch(snr: f64, ratio: f64) -> Result<f64> {
    let u = quartic_coefficients(snr)?.eval(ratio);
    let claimed = u / quartic_denominator(snr, ratio);
    let verified = gap_slope(snr, ratio);
    Ok(((claimed - verified) / verified).abs())
}
