//! Line-of-sight VLC channel between one ceiling LED and floor-level photodiodes.
//!
//! Coordinates use a floor-corner origin: the room spans `[0, length] x [0, width]`
//! on the floor (`z = 0`) and the LED hangs at the ceiling centre facing straight
//! down. Photodiodes face straight up, so the irradiance and incidence angles
//! coincide.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure, Result};

/// Cartesian point in metres.
pub type Point3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomGeometry {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl RoomGeometry {
    pub fn new(length: f64, width: f64, height: f64) -> Result<Self> {
        ensure(length > 0.0, "room length", length, "> 0")?;
        ensure(width > 0.0, "room width", width, "> 0")?;
        ensure(height > 0.0, "room height", height, "> 0")?;
        Ok(Self {
            length,
            width,
            height,
        })
    }

    /// Ceiling centre, where the LED is mounted.
    pub fn ceiling_center(&self) -> Point3 {
        [self.length / 2.0, self.width / 2.0, self.height]
    }

    pub fn contains_floor_point(&self, x: f64, y: f64) -> bool {
        (0.0..=self.length).contains(&x) && (0.0..=self.width).contains(&y)
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.contains_floor_point(p[0], p[1]) && (0.0..=self.height).contains(&p[2])
    }
}

impl Default for RoomGeometry {
    fn default() -> Self {
        Self {
            length: 6.0,
            width: 6.0,
            height: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedConfig {
    pub position: Point3,
    /// Modulated optical power `P_LED` in watts.
    pub transmit_power: f64,
    /// Semi-angle at half illuminance, radians.
    pub semi_angle: f64,
    /// DC bias keeping the drive signal non-negative. Not used by the rate model.
    pub dc_offset: f64,
}

impl LedConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.transmit_power > 0.0,
            "LED power",
            self.transmit_power,
            "> 0",
        )?;
        ensure(
            self.semi_angle > 0.0 && self.semi_angle < FRAC_PI_2,
            "LED semi-angle",
            self.semi_angle,
            "in (0, pi/2)",
        )?;
        ensure(
            self.dc_offset >= 0.0,
            "LED DC offset",
            self.dc_offset,
            ">= 0",
        )
    }

    /// Same LED with a different modulated power.
    pub fn with_power(mut self, watts: f64) -> Self {
        self.transmit_power = watts;
        self
    }
}

impl Default for LedConfig {
    fn default() -> Self {
        Self {
            position: RoomGeometry::default().ceiling_center(),
            transmit_power: 1.0,
            semi_angle: 60f64.to_radians(),
            dc_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotodiodeConfig {
    /// Detector area in m^2.
    pub active_area: f64,
    /// A/W.
    pub responsivity: f64,
    /// Field of view, radians.
    pub fov: f64,
    pub filter_gain: f64,
    /// Refractive index of the non-imaging concentrator.
    pub concentrator_index: f64,
    /// Optical-to-electrical conversion efficiency. Kept for reference; SNR
    /// follows `P_LED h^2 / sigma^2` without it.
    pub conversion_efficiency: f64,
    /// Receiver noise power in W, shared by all users.
    pub noise_power: f64,
}

impl PhotodiodeConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.active_area > 0.0, "PD area", self.active_area, "> 0")?;
        ensure(
            self.responsivity > 0.0,
            "PD responsivity",
            self.responsivity,
            "> 0",
        )?;
        ensure(
            self.fov > 0.0 && self.fov <= FRAC_PI_2,
            "PD field of view",
            self.fov,
            "in (0, pi/2]",
        )?;
        ensure(
            self.filter_gain > 0.0,
            "filter gain",
            self.filter_gain,
            "> 0",
        )?;
        ensure(
            self.concentrator_index >= 1.0,
            "concentrator index",
            self.concentrator_index,
            ">= 1",
        )?;
        ensure(
            self.noise_power > 0.0,
            "noise power",
            self.noise_power,
            "> 0",
        )
    }
}

impl Default for PhotodiodeConfig {
    fn default() -> Self {
        Self {
            active_area: 1e-4,
            responsivity: 0.54,
            fov: 60f64.to_radians(),
            filter_gain: 1.0,
            concentrator_index: 1.5,
            conversion_efficiency: 0.44,
            noise_power: 1e-14,
        }
    }
}

/// Receiver location on the floor plane, photodiode facing up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPosition {
    pub x: f64,
    pub y: f64,
}

impl UserPosition {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn point(&self) -> Point3 {
        [self.x, self.y, 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub channel_gain: f64,
    pub distance: f64,
    pub irradiance_angle: f64,
    pub incidence_angle: f64,
    pub noise_power: f64,
}

impl LinkBudget {
    pub fn snr(&self, p_led: f64) -> f64 {
        snr(self, p_led)
    }
}

/// Lambertian order `m = -1 / log2(cos(semi_angle))`.
pub fn lambertian_order(semi_angle: f64) -> Result<f64> {
    ensure(
        semi_angle > 0.0 && semi_angle < FRAC_PI_2,
        "semi-angle",
        semi_angle,
        "in (0, pi/2)",
    )?;
    Ok(-1.0 / semi_angle.cos().log2())
}

/// Non-imaging concentrator gain: `kappa^2 / sin^2(fov)` inside the field of
/// view, zero outside.
pub fn concentrator_gain(incidence: f64, fov: f64, kappa: f64) -> Result<f64> {
    ensure(
        (0.0..=FRAC_PI_2).contains(&incidence),
        "incidence angle",
        incidence,
        "in [0, pi/2]",
    )?;
    ensure(
        fov > 0.0 && fov <= FRAC_PI_2,
        "field of view",
        fov,
        "in (0, pi/2]",
    )?;
    ensure(kappa >= 1.0, "concentrator index", kappa, ">= 1")?;
    if incidence > fov {
        return Ok(0.0);
    }
    let s = fov.sin();
    Ok(kappa * kappa / (s * s))
}

/// DC gain of the direct path from `led` to a photodiode at `user`.
pub fn los_channel_gain(
    led: &LedConfig,
    pd: &PhotodiodeConfig,
    user: &UserPosition,
) -> Result<LinkBudget> {
    led.validate()?;
    pd.validate()?;
    let m = lambertian_order(led.semi_angle)?;

    let [lx, ly, lz] = led.position;
    let dx = user.x - lx;
    let dy = user.y - ly;
    let dz = lz;
    ensure(dz > 0.0, "LED height above receiver", dz, "> 0")?;
    let d2 = dx * dx + dy * dy + dz * dz;
    let distance = d2.sqrt();
    // Downward LED and upward photodiode share the vertical axis.
    let cos_angle = dz / distance;
    let angle = cos_angle.clamp(-1.0, 1.0).acos();

    let concentrator = concentrator_gain(angle, pd.fov, pd.concentrator_index)?;
    let channel_gain = if angle <= pd.fov {
        (m + 1.0) * pd.active_area * pd.responsivity / (2.0 * PI * d2)
            * cos_angle.powf(m)
            * pd.filter_gain
            * concentrator
            * cos_angle
    } else {
        0.0
    };

    Ok(LinkBudget {
        channel_gain,
        distance,
        irradiance_angle: angle,
        incidence_angle: angle,
        noise_power: pd.noise_power,
    })
}

/// Linear SNR `P_LED h^2 / sigma^2`.
pub fn snr(link: &LinkBudget, p_led: f64) -> f64 {
    snr_from_gain(link.channel_gain, p_led, link.noise_power)
}

pub fn snr_from_gain(gain: f64, p_led: f64, noise_power: f64) -> f64 {
    p_led * gain * gain / noise_power
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn lambertian_order_values() {
        assert!((lambertian_order(60f64.to_radians()).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambertian_order(30f64.to_radians()).unwrap() - 4.818841679306418).abs() < 1e-9);
        assert!(lambertian_order(0.0).is_err());
        assert!(lambertian_order(FRAC_PI_2).is_err());
    }

    #[test]
    fn concentrator_values() {
        let g = concentrator_gain(0.0, 60f64.to_radians(), 1.5).unwrap();
        assert!((g - 3.0).abs() < 1e-12);
        assert_eq!(
            concentrator_gain(70f64.to_radians(), 60f64.to_radians(), 1.5).unwrap(),
            0.0
        );
        let g = concentrator_gain(30f64.to_radians(), FRAC_PI_2, 1.0).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert!(concentrator_gain(0.1, 1.0, 0.9).is_err());
    }

    #[test]
    fn nadir_gain_and_snr() {
        let led = LedConfig::default();
        let pd = PhotodiodeConfig::default();
        let link = los_channel_gain(&led, &pd, &UserPosition::new(3.0, 3.0)).unwrap();
        // 2 * 1e-4 * 0.54 / (2 pi 9) * 3
        let hand = 2.0 * 1e-4 * 0.54 / (2.0 * PI * 9.0) * 3.0;
        assert!(rel(link.channel_gain, hand) < 1e-12);
        assert!(rel(link.channel_gain, 5.73e-6) < 1e-3);
        assert_eq!(link.distance, 3.0);
        let g = link.snr(1.0);
        assert!(rel(g, 3282.806350011744) < 1e-10);
        assert!((to_db(g) - 35.1624526).abs() < 1e-6);
    }

    #[test]
    fn corner_user_gain() {
        let link = los_channel_gain(
            &LedConfig::default(),
            &PhotodiodeConfig::default(),
            &UserPosition::new(5.0, 6.0),
        )
        .unwrap();
        assert!((link.distance - 22f64.sqrt()).abs() < 1e-12);
        assert!(rel(link.channel_gain, 9.588756488759645e-7) < 1e-10);
    }

    #[test]
    fn outside_fov_is_zero() {
        let pd = PhotodiodeConfig {
            fov: 30f64.to_radians(),
            ..Default::default()
        };
        let link =
            los_channel_gain(&LedConfig::default(), &pd, &UserPosition::new(0.0, 0.0)).unwrap();
        assert_eq!(link.channel_gain, 0.0);
        assert_eq!(snr(&link, 1.0), 0.0);
    }

    #[test]
    fn gain_monotone_in_radius() {
        let led = LedConfig::default();
        let pd = PhotodiodeConfig::default();
        let mut prev = f64::INFINITY;
        for k in 0..100 {
            let rho = 6.0 * k as f64 / 99.0;
            let h = los_channel_gain(&led, &pd, &UserPosition::new(3.0 + rho, 3.0))
                .unwrap()
                .channel_gain;
            assert!(h <= prev, "gain increased at radius {rho}");
            prev = h;
        }
        // 6 m out is beyond the 60 degree cone (3 tan 60 = 5.196 m).
        assert_eq!(prev, 0.0);
    }

    #[test]
    fn area_scaling_and_distance_law() {
        let led = LedConfig::default();
        let pd = PhotodiodeConfig::default();
        let user = UserPosition::new(4.0, 2.0);
        let base = los_channel_gain(&led, &pd, &user).unwrap().channel_gain;
        let big = PhotodiodeConfig {
            active_area: 2.5e-4,
            ..pd
        };
        let scaled = los_channel_gain(&led, &big, &user).unwrap().channel_gain;
        assert!(rel(scaled, 2.5 * base) < 1e-12);

        // Doubling every offset keeps the angles and quarters the gain.
        let high = LedConfig {
            position: [3.0, 3.0, 6.0],
            ..led
        };
        let far = los_channel_gain(&high, &pd, &UserPosition::new(5.0, 1.0))
            .unwrap()
            .channel_gain;
        assert!(rel(far, base / 4.0) < 1e-12);
    }

    #[test]
    fn snr_doubling_adds_3db() {
        let link = los_channel_gain(
            &LedConfig::default(),
            &PhotodiodeConfig::default(),
            &UserPosition::new(1.0, 2.0),
        )
        .unwrap();
        let a = to_db(link.snr(1.0));
        let b = to_db(link.snr(2.0));
        assert!((b - a - 3.0103).abs() < 1e-4);
        assert!(rel(link.snr(2.0), 2.0 * link.snr(1.0)) < 1e-15);
    }
}
