//! Experiment drivers: NOMA region map, user-count sweep and LED power sweep.
//!
//! Every row is computed from library calls only, so any cell can be
//! re-derived by hand. Monte Carlo drops run in parallel but are collected in
//! trial order and reduced sequentially, so the CSV bytes depend only on the
//! configuration and seed.

pub mod config;
pub mod table;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{ExperimentConfig, ExperimentKind};
pub use table::{Cell, ResultTable};

use crate::channel::{from_db, los_channel_gain, to_db, RoomGeometry, UserPosition};
use crate::error::Result;
use crate::region::region_for_snr;
use crate::scheduler::{evaluate_schedule, RegionCache, RegionSource, Scheme, UserChannelSet};

pub const REGION_HEADER: [&str; 8] = [
    "snr_db",
    "snr",
    "status",
    "r_min",
    "r_max",
    "width_db",
    "strong_snr_min_db",
    "strong_snr_max_db",
];

pub const SWEEP_USERS_HEADER: [&str; 8] = [
    "users",
    "trials",
    "tdma_mean",
    "tdma_stderr",
    "forced_mean",
    "forced_stderr",
    "proposed_mean",
    "proposed_stderr",
];

pub const SWEEP_POWER_HEADER: [&str; 5] = [
    "p_led_w",
    "tdma",
    "forced",
    "proposed",
    "proposed_minus_forced",
];

pub fn run(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<ResultTable> {
    match kind {
        ExperimentKind::Region => run_region_map(cfg),
        ExperimentKind::SweepUsers => run_sweep_users(cfg),
        ExperimentKind::SweepPower => run_sweep_power(cfg),
    }
}

/// One row per weak-user SNR in `snr_grid_db`.
pub fn run_region_map(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let settings = cfg.sca_settings();
    let regions = cfg
        .snr_grid_db
        .par_iter()
        .map(|&db| region_for_snr(from_db(db), &settings))
        .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(REGION_HEADER.to_vec());
    for (&db, region) in cfg.snr_grid_db.iter().zip(&regions) {
        let mut row = vec![Cell::Num(db), Cell::Num(region.snr)];
        match region.interval {
            Some(iv) => row.extend([
                Cell::Text("nonempty".into()),
                Cell::Num(iv.r_min),
                Cell::Num(iv.r_max),
                Cell::Num(region.width_db()),
                Cell::Num(to_db(region.snr * iv.r_min)),
                Cell::Num(to_db(region.snr * iv.r_max)),
            ]),
            None => row.extend([
                Cell::Text("empty".into()),
                Cell::Blank,
                Cell::Blank,
                Cell::Num(0.0),
                Cell::Blank,
                Cell::Blank,
            ]),
        }
        table.push(row);
    }
    Ok(table)
}

/// `k` i.i.d. uniform points on the room floor.
pub fn sample_user_positions<R: Rng>(
    rng: &mut R,
    room: &RoomGeometry,
    k: usize,
) -> Vec<UserPosition> {
    (0..k)
        .map(|_| {
            let x = rng.random_range(0.0..=room.length);
            let y = rng.random_range(0.0..=room.width);
            UserPosition::new(x, y)
        })
        .collect()
}

/// Deterministic generator for drop `trial` of the `users`-user sweep.
pub fn drop_rng(seed: u64, users: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((users as u64) << 40) | trial as u64);
    rng
}

/// Channel set for users at `positions`, ids `1..=K` in position order.
pub fn users_at(
    cfg: &ExperimentConfig,
    positions: &[UserPosition],
    p_led: f64,
) -> Result<UserChannelSet> {
    let led = cfg.led()?.with_power(p_led);
    let pd = cfg.photodiode();
    let gains = positions
        .iter()
        .enumerate()
        .map(|(i, p)| Ok((i + 1, los_channel_gain(&led, &pd, p)?.channel_gain)))
        .collect::<Result<Vec<_>>>()?;
    UserChannelSet::from_gains(&gains, p_led, pd.noise_power)
}

/// Frame sum-rates of one user drop, indexed like [`Scheme::ALL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropOutcome {
    pub tdma: f64,
    pub forced: f64,
    pub proposed: f64,
}

impl DropOutcome {
    pub fn get(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Tdma => self.tdma,
            Scheme::Forced => self.forced,
            Scheme::Proposed => self.proposed,
        }
    }
}

pub fn evaluate_drop(users: &UserChannelSet, regions: &impl RegionSource) -> Result<DropOutcome> {
    let rate = |s: Scheme| -> Result<f64> {
        Ok(evaluate_schedule(&s.plan(users, regions)?, users)?.sum_rate)
    };
    Ok(DropOutcome {
        tdma: rate(Scheme::Tdma)?,
        forced: rate(Scheme::Forced)?,
        proposed: rate(Scheme::Proposed)?,
    })
}

/// All `cfg.trials` random drops of `users` users, in trial order.
pub fn simulate_drops(
    cfg: &ExperimentConfig,
    users: usize,
    regions: &(impl RegionSource + Sync),
) -> Result<Vec<DropOutcome>> {
    let room = cfg.room()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = drop_rng(cfg.seed, users, trial);
            let positions = sample_user_positions(&mut rng, &room, users);
            evaluate_drop(&users_at(cfg, &positions, cfg.led_power_w)?, regions)
        })
        .collect()
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One row per entry of `user_counts`: mean and standard error of each
/// scheme's sum-rate over `trials` uniform drops.
pub fn run_sweep_users(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let regions = RegionCache::new(cfg.sca_settings());
    let mut table = ResultTable::new(SWEEP_USERS_HEADER.to_vec());
    for &k in &cfg.user_counts {
        let drops = simulate_drops(cfg, k, &regions)?;
        let mut row = vec![Cell::Int(k as u64), Cell::Int(cfg.trials as u64)];
        for scheme in Scheme::ALL {
            let xs: Vec<f64> = drops.iter().map(|d| d.get(scheme)).collect();
            let (mean, se) = mean_and_stderr(&xs);
            row.extend([Cell::Num(mean), Cell::Num(se)]);
        }
        table.push(row);
    }
    Ok(table)
}

/// Sum-rate of the fixed `positions` layout at every LED power.
pub fn run_sweep_power(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let regions = RegionCache::new(cfg.sca_settings());
    let positions = cfg.fixed_positions();
    let mut table = ResultTable::new(SWEEP_POWER_HEADER.to_vec());
    for &p in &cfg.power_grid_w {
        let d = evaluate_drop(&users_at(cfg, &positions, p)?, &regions)?;
        table.push(vec![
            Cell::Num(p),
            Cell::Num(d.tdma),
            Cell::Num(d.forced),
            Cell::Num(d.proposed),
            Cell::Num(d.proposed - d.forced),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_reproducible_and_inside() {
        let room = RoomGeometry::default();
        let a = sample_user_positions(&mut drop_rng(7, 4, 3), &room, 4);
        let b = sample_user_positions(&mut drop_rng(7, 4, 3), &room, 4);
        assert_eq!(a, b);
        let c = sample_user_positions(&mut drop_rng(7, 4, 4), &room, 4);
        assert_ne!(a, c);
        assert!(a.iter().all(|p| room.contains_floor_point(p.x, p.y)));
    }

    #[test]
    fn uniform_mean_is_room_center() {
        let room = RoomGeometry::default();
        let n = 100_000;
        let pts = sample_user_positions(&mut ChaCha8Rng::seed_from_u64(11), &room, n);
        // Uniform on [0, 6]: sd = 6 / sqrt(12).
        let se = 6.0 / 12f64.sqrt() / (n as f64).sqrt();
        let mx = pts.iter().map(|p| p.x).sum::<f64>() / n as f64;
        let my = pts.iter().map(|p| p.y).sum::<f64>() / n as f64;
        assert!((mx - 3.0).abs() < 3.0 * se, "mean x {mx}");
        assert!((my - 3.0).abs() < 3.0 * se, "mean y {my}");
        assert!(pts.iter().all(|p| room.contains_floor_point(p.x, p.y)));
    }

    #[test]
    fn stats() {
        assert_eq!(mean_and_stderr(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_user_drop_is_scheme_independent() {
        let cfg = ExperimentConfig {
            trials: 20,
            ..Default::default()
        };
        let regions = RegionCache::new(cfg.sca_settings());
        for d in simulate_drops(&cfg, 1, &regions).unwrap() {
            assert_eq!(d.tdma, d.forced);
            assert_eq!(d.tdma, d.proposed);
        }
    }
}
