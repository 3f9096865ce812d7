//! Scenario configuration.
//!
//! All arithmetic downstream of this module is linear: powers in milliwatts,
//! gains dimensionless, positions in multiples of the carrier wavelength.
//! The JSON ingestion path accepts dBm or mW and metres or wavelengths, and
//! normalizes once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;

/// Converts a dBm value to linear milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts linear milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Every constant that defines a downlink scenario.
///
/// Positions (region bounds) are in wavelengths and `wavelength` is kept at
/// 1.0 after ingestion; it is retained so the steering phase keeps its
/// physical form `2π/λ · tᵀa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_antennas: usize,
    pub num_users: usize,
    pub wavelength: f64,
    /// Per-user transmit power, mW.
    pub tx_power: Vec<f64>,
    /// Per-user large-scale fading gain.
    pub large_scale_gain: Vec<f64>,
    /// Per-user Rician K-factor.
    pub rician_k: Vec<f64>,
    /// Receiver noise power, mW.
    pub noise_power: f64,
    /// Elevation angle of departure per user, radians.
    pub elevation_aod: Vec<f64>,
    /// Azimuth angle of departure per user, radians.
    pub azimuth_aod: Vec<f64>,
    pub outage_target: f64,
    /// One moving region per antenna.
    pub regions: Vec<Region>,
}

impl SystemConfig {
    /// Checks every scenario invariant and returns the config unchanged if
    /// they all hold.
    pub fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    /// Same checks as [`SystemConfig::validate`] but by reference.
    pub fn check(&self) -> Result<()> {
        let n = self.num_antennas;
        let m = self.num_users;
        if n == 0 || m == 0 {
            return Err(Error::InvalidConfig(
                "antenna and user counts must be positive".into(),
            ));
        }
        if n < m {
            return Err(Error::TooFewAntennas {
                antennas: n,
                users: m,
            });
        }
        let per_user: [(&str, usize); 5] = [
            ("tx_power", self.tx_power.len()),
            ("large_scale_gain", self.large_scale_gain.len()),
            ("rician_k", self.rician_k.len()),
            ("elevation_aod", self.elevation_aod.len()),
            ("azimuth_aod", self.azimuth_aod.len()),
        ];
        for (name, len) in per_user {
            if len != m {
                return Err(Error::InvalidConfig(format!(
                    "{name} has {len} entries, expected one per user ({m})"
                )));
            }
        }
        if self.regions.len() != n {
            return Err(Error::InvalidConfig(format!(
                "{} regions given for {n} antennas",
                self.regions.len()
            )));
        }
        positive("wavelength", self.wavelength)?;
        for &p in &self.tx_power {
            positive("tx_power", p)?;
        }
        for &b in &self.large_scale_gain {
            positive("large_scale_gain", b)?;
        }
        positive("noise_power", self.noise_power)?;
        for &k in &self.rician_k {
            if !(k >= 0.0) || !k.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "rician_k must be finite and non-negative (got {k})"
                )));
            }
        }
        let half_pi = std::f64::consts::FRAC_PI_2 + 1e-12;
        for &a in self.elevation_aod.iter().chain(&self.azimuth_aod) {
            if !(a.abs() <= half_pi) {
                return Err(Error::InvalidConfig(format!(
                    "angle of departure {a} outside [-pi/2, pi/2]"
                )));
            }
        }
        if !(self.outage_target > 0.0 && self.outage_target < 1.0) {
            return Err(Error::OutageTargetOutOfRange(self.outage_target));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if !r.is_well_formed() {
                return Err(Error::InvalidConfig(format!(
                    "region {i} has inverted or non-finite bounds"
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.regions[i].overlaps(&self.regions[j]) {
                    return Err(Error::OverlappingRegions {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(())
    }

    /// Steering direction `a_m = [cosθ sinφ, sinθ]` of user `m`.
    pub fn direction(&self, m: usize) -> [f64; 2] {
        let theta = self.elevation_aod[m];
        let phi = self.azimuth_aod[m];
        [theta.cos() * phi.sin(), theta.sin()]
    }

    /// Wavenumber `2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Sets the same K-factor for every user.
    pub fn with_rician_k(mut self, k: f64) -> Self {
        self.rician_k = vec![k; self.num_users];
        self
    }

    pub fn with_outage_target(mut self, delta: f64) -> Self {
        self.outage_target = delta;
        self
    }

    /// Replaces the regions with the square-grid arrangement of
    /// [`square_regions`].
    pub fn with_square_regions(mut self, side: f64) -> Self {
        self.regions = square_regions(self.num_antennas, side, 0.5);
        self
    }

    /// Changes the antenna count, rebuilding square regions of `side`.
    pub fn with_antennas(mut self, n: usize, side: f64) -> Self {
        self.num_antennas = n;
        self.regions = square_regions(n, side, 0.5);
        self
    }
}

fn positive(what: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: what.to_string(),
            value,
        })
    }
}

/// Square moving regions of side `side` laid out along x with `gap` between
/// neighbours: antenna n (0-based) moves in
/// `[n(side+gap), n(side+gap)+side] × [0, side]`.
pub fn square_regions(n: usize, side: f64, gap: f64) -> Vec<Region> {
    (0..n)
        .map(|i| {
            let x0 = i as f64 * (side + gap);
            Region::new(x0, x0 + side, 0.0, side)
        })
        .collect()
}

/// Elevation AoDs of the four-user reference downlink.
pub const REFERENCE_ELEVATION: [f64; 4] = [0.8676, 0.9879, 1.2720, 0.4021];
/// Azimuth AoDs of the four-user reference downlink.
pub const REFERENCE_AZIMUTH: [f64; 4] = [0.2852, 1.1165, 1.0048, 1.2045];

/// The four-user reference downlink: users on a 1 km circle with
/// `β = 10⁻³ · 1000⁻² = 10⁻⁹`, 10 dBm per user, −90 dBm noise, and square
/// moving regions of side `side` (wavelengths) separated by 0.5λ.
pub fn reference_scenario(num_antennas: usize, side: f64, rician_k: f64, delta: f64) -> SystemConfig {
    let m = 4;
    let beta = 1e-3 * 1000f64.powf(-2.0);
    SystemConfig {
        num_antennas,
        num_users: m,
        wavelength: 1.0,
        tx_power: vec![dbm_to_mw(10.0); m],
        large_scale_gain: vec![beta; m],
        rician_k: vec![rician_k; m],
        noise_power: dbm_to_mw(-90.0),
        elevation_aod: REFERENCE_ELEVATION.to_vec(),
        azimuth_aod: REFERENCE_AZIMUTH.to_vec(),
        outage_target: delta,
        regions: square_regions(num_antennas, side, 0.5),
    }
}

/// Fixed five-antenna layout used for the SINR-distribution validation.
pub const VALIDATION_POSITIONS: [[f64; 2]; 5] =
    [[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5], [1.0, 0.0]];

/// The SINR-distribution validation point: five antennas pinned at
/// [`VALIDATION_POSITIONS`], four users with `θ_m = φ_m ∈ {0, 0.5, 1, 1.5}`,
/// 10 dBm per user, `β = 10⁻⁹` and a noise power of `10⁻⁹` mW.
///
/// The noise value is quoted with a dBm unit where this point is usually
/// described, which is not physically meaningful next to a −90 dBm
/// reference; it is read here as 10⁻⁹ mW linear. Use
/// [`validation_scenario_with_noise`] to evaluate the −90 dBm reading.
pub fn validation_scenario(rician_k: f64) -> SystemConfig {
    validation_scenario_with_noise(rician_k, 1e-9)
}

pub fn validation_scenario_with_noise(rician_k: f64, noise_mw: f64) -> SystemConfig {
    let m = 4;
    let angles = vec![0.0, 0.5, 1.0, 1.5];
    SystemConfig {
        num_antennas: 5,
        num_users: m,
        wavelength: 1.0,
        tx_power: vec![dbm_to_mw(10.0); m],
        large_scale_gain: vec![1e-9; m],
        rician_k: vec![rician_k; m],
        noise_power: noise_mw,
        elevation_aod: angles.clone(),
        azimuth_aod: angles,
        outage_target: 0.2,
        regions: VALIDATION_POSITIONS
            .iter()
            .map(|p| Region::point(p[0], p[1]))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// JSON ingestion
// ---------------------------------------------------------------------------

/// A scalar broadcast to every user, or one value per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerUser {
    All(f64),
    Each(Vec<f64>),
}

impl PerUser {
    fn expand(&self, m: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            PerUser::All(v) => Ok(vec![*v; m]),
            PerUser::Each(v) if v.len() == m => Ok(v.clone()),
            PerUser::Each(v) => Err(Error::InvalidConfig(format!(
                "{name} lists {} values for {m} users",
                v.len()
            ))),
        }
    }
}

/// A power given either in dBm or in linear milliwatts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_dbm: Option<PerUser>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_mw: Option<PerUser>,
}

impl PowerSpec {
    pub fn dbm(v: f64) -> Self {
        PowerSpec {
            p_dbm: Some(PerUser::All(v)),
            p_mw: None,
        }
    }

    pub fn mw(v: f64) -> Self {
        PowerSpec {
            p_dbm: None,
            p_mw: Some(PerUser::All(v)),
        }
    }

    fn to_mw(&self, m: usize, name: &str) -> Result<Vec<f64>> {
        match (&self.p_dbm, &self.p_mw) {
            (Some(d), None) => Ok(d.expand(m, name)?.into_iter().map(dbm_to_mw).collect()),
            (None, Some(w)) => w.expand(m, name),
            _ => Err(Error::InvalidConfig(format!(
                "{name} needs exactly one of \"p_dbm\" or \"p_mw\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    #[default]
    Wavelength,
    Meter,
}

/// Region description in a config file: explicit rectangles, or the square
/// grid of [`square_regions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionsSpec {
    Grid { side: f64, gap: f64 },
    Explicit(Vec<Region>),
}

/// On-disk form of [`SystemConfig`]. Field names mirror the in-memory type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub num_antennas: usize,
    pub num_users: usize,
    /// Carrier wavelength in metres; only used when `position_unit` is
    /// `"meter"`.
    #[serde(default = "one")]
    pub wavelength: f64,
    #[serde(default)]
    pub position_unit: LengthUnit,
    pub tx_power: PowerSpec,
    pub large_scale_gain: PerUser,
    pub rician_k: PerUser,
    pub noise_power: PowerSpec,
    pub elevation_aod: Vec<f64>,
    pub azimuth_aod: Vec<f64>,
    pub outage_target: f64,
    pub regions: RegionsSpec,
    /// Free-form remarks carried through to run manifests.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn one() -> f64 {
    1.0
}

impl ConfigFile {
    /// Normalizes to linear units and wavelength coordinates, then validates.
    pub fn into_config(self) -> Result<SystemConfig> {
        let m = self.num_users;
        if !(self.wavelength > 0.0) {
            return Err(Error::NonPositive {
                what: "wavelength".into(),
                value: self.wavelength,
            });
        }
        let scale = match self.position_unit {
            LengthUnit::Wavelength => 1.0,
            LengthUnit::Meter => 1.0 / self.wavelength,
        };
        let regions = match self.regions {
            RegionsSpec::Grid { side, gap } => {
                square_regions(self.num_antennas, side * scale, gap * scale)
            }
            RegionsSpec::Explicit(rs) => rs.into_iter().map(|r| r.scaled(scale)).collect(),
        };
        let noise = self.noise_power.to_mw(1, "noise_power")?[0];
        SystemConfig {
            num_antennas: self.num_antennas,
            num_users: m,
            wavelength: 1.0,
            tx_power: self.tx_power.to_mw(m, "tx_power")?,
            large_scale_gain: self.large_scale_gain.expand(m, "large_scale_gain")?,
            rician_k: self.rician_k.expand(m, "rician_k")?,
            noise_power: noise,
            elevation_aod: self.elevation_aod,
            azimuth_aod: self.azimuth_aod,
            outage_target: self.outage_target,
            regions,
        }
        .validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// File form of an in-memory config (linear mW, wavelength units).
    pub fn from_config(cfg: &SystemConfig) -> Self {
        ConfigFile {
            num_antennas: cfg.num_antennas,
            num_users: cfg.num_users,
            wavelength: 1.0,
            position_unit: LengthUnit::Wavelength,
            tx_power: PowerSpec {
                p_dbm: None,
                p_mw: Some(PerUser::Each(cfg.tx_power.clone())),
            },
            large_scale_gain: PerUser::Each(cfg.large_scale_gain.clone()),
            rician_k: PerUser::Each(cfg.rician_k.clone()),
            noise_power: PowerSpec::mw(cfg.noise_power),
            elevation_aod: cfg.elevation_aod.clone(),
            azimuth_aod: cfg.azimuth_aod.clone(),
            outage_target: cfg.outage_target,
            regions: RegionsSpec::Explicit(cfg.regions.clone()),
            notes: Vec::new(),
        }
    }
}

/// Reads and validates a JSON config document.
pub fn load_config(path: &std::path::Path) -> Result<(SystemConfig, ConfigFile)> {
    let text = std::fs::read_to_string(path)?;
    let file = ConfigFile::from_json(&text)?;
    let cfg = file.clone().into_config()?;
    Ok((cfg, file))
}
