//! Room layout, LED lattice, user placement and the Lambertian line-of-sight
//! channel gain.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Rectangular room. `height` is the ceiling height measured from the floor;
/// receivers sit on a horizontal plane at `receiver_plane_height`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub receiver_plane_height: f64,
}

impl Room {
    pub fn new(width: f64, depth: f64, height: f64, receiver_plane_height: f64) -> Result<Self> {
        let room = Self {
            width,
            depth,
            height,
            receiver_plane_height,
        };
        room.validate()?;
        Ok(room)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [self.width, self.depth, self.height];
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::Config(format!(
                "room dimensions must be positive: {self:?}"
            )));
        }
        if !(self.receiver_plane_height >= 0.0 && self.receiver_plane_height < self.height) {
            return Err(Error::Config(format!(
                "receiver plane {} m must lie below the ceiling at {} m",
                self.receiver_plane_height, self.height
            )));
        }
        Ok(())
    }

    pub fn contains_footprint(&self, p: &Point3) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.depth).contains(&p.y)
    }

    /// Vertical LED-to-receiver separation.
    pub fn drop_height(&self) -> f64 {
        self.height - self.receiver_plane_height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Led {
    pub position: Point3,
    /// Semi-angle at half illumination, degrees.
    pub semi_angle_half: f64,
    pub lambertian_order: f64,
}

impl Led {
    pub fn new(position: Point3, semi_angle_half: f64) -> Result<Self> {
        Ok(Self {
            position,
            semi_angle_half,
            lambertian_order: lambertian_order(semi_angle_half)?,
        })
    }
}

/// Photodiode receiver. The detector normal points straight up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserTerminal {
    pub position: Point3,
    /// Field-of-view semi-angle, degrees.
    pub fov_semi_angle: f64,
    /// Detector area, m².
    pub pd_area: f64,
    pub optical_filter_gain: f64,
    pub refractive_index: f64,
}

impl UserTerminal {
    pub fn validate(&self) -> Result<()> {
        if !(self.fov_semi_angle > 0.0 && self.fov_semi_angle <= 90.0) {
            return Err(Error::Config(format!(
                "FoV semi-angle {}° outside (0°, 90°]",
                self.fov_semi_angle
            )));
        }
        // Negated so NaN is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.pd_area > 0.0) {
            return Err(Error::Config(format!(
                "PD area {} must be positive",
                self.pd_area
            )));
        }
        Ok(())
    }
}

/// One user-location realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub room: Room,
    pub leds: Vec<Led>,
    pub users: Vec<UserTerminal>,
    pub rng_seed: u64,
}

/// Receiver properties shared by every user of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverSpec {
    pub fov_semi_angle: f64,
    pub pd_area: f64,
    pub optical_filter_gain: f64,
    pub refractive_index: f64,
}

impl ReceiverSpec {
    pub fn at(&self, position: Point3) -> UserTerminal {
        UserTerminal {
            position,
            fov_semi_angle: self.fov_semi_angle,
            pd_area: self.pd_area,
            optical_filter_gain: self.optical_filter_gain,
            refractive_index: self.refractive_index,
        }
    }
}

impl Scenario {
    /// Square LED lattice on the ceiling plus `user_count` users drawn
    /// uniformly over the receiver plane from `rng`.
    pub fn lattice<R: Rng + ?Sized>(
        room: Room,
        led_count: usize,
        led_semi_angle: f64,
        receiver: &ReceiverSpec,
        user_count: usize,
        rng_seed: u64,
        rng: &mut R,
    ) -> Result<Self> {
        room.validate()?;
        let leds = place_leds_lattice(&room, led_count)?
            .into_iter()
            .map(|p| Led::new(p, led_semi_angle))
            .collect::<Result<Vec<_>>>()?;
        let users = sample_users(&room, user_count, rng)
            .into_iter()
            .map(|p| receiver.at(p))
            .collect::<Vec<_>>();
        let scenario = Self {
            room,
            leds,
            users,
            rng_seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        self.room.validate()?;
        for u in &self.users {
            u.validate()?;
            if !self.room.contains_footprint(&u.position) {
                return Err(Error::Config(format!(
                    "user at {:?} outside the room footprint",
                    u.position
                )));
            }
        }
        Ok(())
    }

    pub fn led_count(&self) -> usize {
        self.leds.len()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }
}

/// Lambertian emission order `m = -1 / log2(cos φ½)`.
pub fn lambertian_order(semi_angle_half: f64) -> Result<f64> {
    if !(semi_angle_half > 0.0 && semi_angle_half < 90.0) {
        return Err(Error::AngleDomain(semi_angle_half));
    }
    Ok(-1.0 / semi_angle_half.to_radians().cos().log2())
}

/// Cell centres of a `√count × √count` partition of the ceiling.
pub fn place_leds_lattice(room: &Room, count: usize) -> Result<Vec<Point3>> {
    let side = (count as f64).sqrt().round() as usize;
    if count == 0 || side * side != count {
        return Err(Error::NotSquare(count));
    }
    let mut positions = Vec::with_capacity(count);
    for ix in 0..side {
        for iy in 0..side {
            positions.push(Point3::new(
                (2 * ix + 1) as f64 * room.width / (2 * side) as f64,
                (2 * iy + 1) as f64 * room.depth / (2 * side) as f64,
                room.height,
            ));
        }
    }
    Ok(positions)
}

pub fn sample_users<R: Rng + ?Sized>(room: &Room, count: usize, rng: &mut R) -> Vec<Point3> {
    (0..count)
        .map(|_| {
            let x = rng.gen::<f64>() * room.width;
            let y = rng.gen::<f64>() * room.depth;
            Point3::new(x, y, room.receiver_plane_height)
        })
        .collect()
}

/// LoS DC gain between an LED facing down and a PD facing up. The irradiance
/// and incidence angles coincide for this geometry.
pub fn channel_gain(led: &Led, user: &UserTerminal) -> Result<f64> {
    let d = led.position.distance(&user.position);
    if d == 0.0 {
        return Err(Error::CoincidentPositions);
    }
    let cos_incidence = (led.position.z - user.position.z) / d;
    if cos_incidence <= 0.0 {
        return Ok(0.0);
    }
    let incidence = cos_incidence.min(1.0).acos().to_degrees();
    if incidence > user.fov_semi_angle {
        return Ok(0.0);
    }
    let m = led.lambertian_order;
    let fov = user.fov_semi_angle.to_radians().sin();
    let chi = user.refractive_index;
    let scale = (m + 1.0) * user.pd_area * chi * chi * user.optical_filter_gain
        / (2.0 * PI * d * d * fov * fov);
    Ok(scale * cos_incidence.powf(m) * cos_incidence)
}

/// `N × L` matrix of LoS gains, row `j` = user `j`, column `i` = LED `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    users: usize,
    leds: usize,
    gains: Vec<f64>,
}

impl ChannelMatrix {
    pub fn from_scenario(scenario: &Scenario) -> Result<Self> {
        let mut gains = Vec::with_capacity(scenario.user_count() * scenario.led_count());
        for user in &scenario.users {
            for led in &scenario.leds {
                gains.push(channel_gain(led, user)?);
            }
        }
        Ok(Self {
            users: scenario.user_count(),
            leds: scenario.led_count(),
            gains,
        })
    }

    /// Build directly from rows of per-LED gains. Rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let leds = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != leds) {
            return Err(Error::Config("ragged channel matrix rows".into()));
        }
        if rows.iter().flatten().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Config(
                "channel gains must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            users: rows.len(),
            leds,
            gains: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn user_count(&self) -> usize {
        self.users
    }

    pub fn led_count(&self) -> usize {
        self.leds
    }

    #[inline]
    pub fn gain(&self, user: usize, led: usize) -> f64 {
        self.gains[user * self.leds + led]
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.gains[user * self.leds..(user + 1) * self.leds]
    }
}

pub fn channel_matrix(scenario: &Scenario) -> Result<ChannelMatrix> {
    ChannelMatrix::from_scenario(scenario)
}
