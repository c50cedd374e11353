//! Flat TOML experiment configuration. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{LedConfig, PhotodiodeConfig, RoomGeometry, UserPosition};
use crate::error::{Error, Result};
use crate::region::ScaSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// NOMA region against weak-user SNR.
    Region,
    /// Mean sum-rate against the number of users.
    SweepUsers,
    /// Sum-rate of a fixed layout against LED power.
    SweepPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,

    pub room_length_m: f64,
    pub room_width_m: f64,
    pub room_height_m: f64,

    pub led_power_w: f64,
    pub led_semi_angle_deg: f64,
    pub led_dc_offset_w: f64,

    pub pd_area_m2: f64,
    pub pd_responsivity_a_per_w: f64,
    pub pd_fov_deg: f64,
    pub filter_gain: f64,
    pub concentrator_index: f64,
    pub conversion_efficiency: f64,
    pub noise_power_w: f64,

    pub snr_grid_db: Vec<f64>,
    pub user_counts: Vec<usize>,
    pub power_grid_w: Vec<f64>,
    /// Floor `[x, y]` positions for the power sweep.
    pub positions: Vec<[f64; 2]>,

    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,

    pub sca_tolerance: f64,
    pub sca_max_iterations: usize,
    pub scan_points: usize,
    pub scan_ratio_lo: f64,
    pub scan_ratio_hi: f64,
    pub validate_oracle: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let room = RoomGeometry::default();
        let led = LedConfig::default();
        let pd = PhotodiodeConfig::default();
        let sca = ScaSettings::default();
        Self {
            experiment: None,
            room_length_m: room.length,
            room_width_m: room.width,
            room_height_m: room.height,
            led_power_w: led.transmit_power,
            led_semi_angle_deg: led.semi_angle.to_degrees().round(),
            led_dc_offset_w: led.dc_offset,
            pd_area_m2: pd.active_area,
            pd_responsivity_a_per_w: pd.responsivity,
            pd_fov_deg: pd.fov.to_degrees().round(),
            filter_gain: pd.filter_gain,
            concentrator_index: pd.concentrator_index,
            conversion_efficiency: pd.conversion_efficiency,
            noise_power_w: pd.noise_power,
            snr_grid_db: (-10..=60).map(f64::from).collect(),
            user_counts: (2..=10).collect(),
            power_grid_w: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            positions: vec![
                [2.5, 5.5],
                [4.0, 0.0],
                [5.0, 1.0],
                [5.0, 5.5],
                [5.0, 6.0],
                [6.0, 1.0],
            ],
            trials: 10_000,
            seed: 1,
            output: None,
            sca_tolerance: sca.tolerance,
            sca_max_iterations: sca.max_iterations,
            scan_points: sca.scan_points,
            scan_ratio_lo: sca.scan_lo,
            scan_ratio_hi: sca.scan_hi,
            validate_oracle: false,
        }
    }
}

fn strictly_ascending<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse {
            path: PathBuf::from("<string>"),
            source: e,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::ConfigParse {
            path: path.to_path_buf(),
            source: e,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.trials < 1 {
            return fail("trials must be >= 1");
        }
        if self.snr_grid_db.is_empty() || !strictly_ascending(&self.snr_grid_db) {
            return fail("snr_grid_db must be non-empty and strictly ascending");
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return fail("snr_grid_db must be finite");
        }
        if self.user_counts.is_empty() || !strictly_ascending(&self.user_counts) {
            return fail("user_counts must be non-empty and strictly ascending");
        }
        if self.user_counts[0] < 1 {
            return fail("user_counts must be >= 1");
        }
        if self.power_grid_w.is_empty() || !strictly_ascending(&self.power_grid_w) {
            return fail("power_grid_w must be non-empty and strictly ascending");
        }
        if self
            .power_grid_w
            .iter()
            .any(|&p| !(p > 0.0 && p.is_finite()))
        {
            return fail("power_grid_w entries must be finite and > 0");
        }
        if self.positions.is_empty() {
            return fail("positions must not be empty");
        }
        let room = self.room()?;
        if self
            .positions
            .iter()
            .any(|&[x, y]| !room.contains_floor_point(x, y))
        {
            return fail("every position must lie on the room floor");
        }
        self.led()?.validate()?;
        self.photodiode().validate()?;
        self.sca_settings().validate()
    }

    pub fn room(&self) -> Result<RoomGeometry> {
        RoomGeometry::new(self.room_length_m, self.room_width_m, self.room_height_m)
    }

    /// LED at the ceiling centre with `led_power_w`.
    pub fn led(&self) -> Result<LedConfig> {
        Ok(LedConfig {
            position: self.room()?.ceiling_center(),
            transmit_power: self.led_power_w,
            semi_angle: self.led_semi_angle_deg.to_radians(),
            dc_offset: self.led_dc_offset_w,
        })
    }

    pub fn photodiode(&self) -> PhotodiodeConfig {
        PhotodiodeConfig {
            active_area: self.pd_area_m2,
            responsivity: self.pd_responsivity_a_per_w,
            fov: self.pd_fov_deg.to_radians(),
            filter_gain: self.filter_gain,
            concentrator_index: self.concentrator_index,
            conversion_efficiency: self.conversion_efficiency,
            noise_power: self.noise_power_w,
        }
    }

    pub fn sca_settings(&self) -> ScaSettings {
        ScaSettings {
            tolerance: self.sca_tolerance,
            max_iterations: self.sca_max_iterations,
            scan_points: self.scan_points,
            scan_lo: self.scan_ratio_lo,
            scan_hi: self.scan_ratio_hi,
            validate_with_oracle: self.validate_oracle,
        }
    }

    pub fn fixed_positions(&self) -> Vec<UserPosition> {
        self.positions
            .iter()
            .map(|&[x, y]| UserPosition::new(x, y))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.led().unwrap().position, [3.0, 3.0, 3.0]);
        assert_eq!(cfg.photodiode(), PhotodiodeConfig::default());
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = ExperimentConfig::from_toml_str(
            "experiment = \"sweep-users\"\ntrials = 50\nuser_counts = [2, 4]\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Some(ExperimentKind::SweepUsers));
        assert_eq!(cfg.trials, 50);
        assert_eq!(cfg.user_counts, vec![2, 4]);
        assert_eq!(cfg.noise_power_w, 1e-14);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = ExperimentConfig::from_toml_str("noise_powr_w = 1e-13\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { .. }), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "trials = 0",
            "snr_grid_db = []",
            "snr_grid_db = [3.0, 1.0]",
            "power_grid_w = [0.0, 1.0]",
            "positions = [[7.0, 1.0]]",
            "pd_fov_deg = 120.0",
            "scan_points = 4",
            "concentrator_index = 0.5",
        ] {
            assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
