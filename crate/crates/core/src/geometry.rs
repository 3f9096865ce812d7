//! Antenna geometry: moving regions, layouts and LoS steering rows.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`, in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Region {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// Degenerate region pinning an antenna to a single point.
    pub fn point(x: f64, y: f64) -> Self {
        Region::new(x, x, y, y)
    }

    pub fn is_well_formed(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min <= self.x_max
            && self.y_min <= self.y_max
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    pub fn clamp(&self, p: [f64; 2]) -> [f64; 2] {
        [
            p[0].max(self.x_min).min(self.x_max),
            p[1].max(self.y_min).min(self.y_max),
        ]
    }

    /// True when the two rectangles share positive area, or are the same
    /// (possibly degenerate) rectangle.
    pub fn overlaps(&self, other: &Region) -> bool {
        if self == other {
            return true;
        }
        let dx = self.x_max.min(other.x_max) - self.x_min.max(other.x_min);
        let dy = self.y_max.min(other.y_max) - self.y_min.max(other.y_min);
        dx > 0.0 && dy > 0.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        [
            self.x_min + u * (self.x_max - self.x_min),
            self.y_min + v * (self.y_max - self.y_min),
        ]
    }

    pub(crate) fn scaled(self, s: f64) -> Self {
        Region::new(self.x_min * s, self.x_max * s, self.y_min * s, self.y_max * s)
    }
}

/// Positions of the N transmit antennas, one `[x, y]` per antenna, in
/// wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaLayout {
    positions: Vec<[f64; 2]>,
}

impl AntennaLayout {
    pub fn new(positions: Vec<[f64; 2]>) -> Self {
        AntennaLayout { positions }
    }

    /// Builds a layout from the two rows of the 2×N coordinate matrix.
    pub fn from_rows(xs: &[f64], ys: &[f64]) -> Self {
        assert_eq!(xs.len(), ys.len(), "coordinate rows differ in length");
        AntennaLayout::new(xs.iter().zip(ys).map(|(&x, &y)| [x, y]).collect())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn position(&self, n: usize) -> [f64; 2] {
        self.positions[n]
    }

    pub fn xs(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p[0]).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p[1]).collect()
    }

    /// Coordinate `axis` (0 = x, 1 = y) of antenna `n`, mutably.
    pub fn coord_mut(&mut self, n: usize, axis: usize) -> &mut f64 {
        &mut self.positions[n][axis]
    }

    /// Every antenna lies inside its own region.
    pub fn is_feasible(&self, regions: &[Region]) -> bool {
        self.positions.len() == regions.len()
            && self
                .positions
                .iter()
                .zip(regions)
                .all(|(p, r)| r.contains(*p))
    }

    /// Adds the same offset to every antenna.
    pub fn translated(&self, offset: [f64; 2]) -> Self {
        AntennaLayout::new(
            self.positions
                .iter()
                .map(|p| [p[0] + offset[0], p[1] + offset[1]])
                .collect(),
        )
    }

    /// Rigid rotation by `angle` radians about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        AntennaLayout::new(
            self.positions
                .iter()
                .map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
                .collect(),
        )
    }

    /// Uniform random layout with each antenna drawn inside its region.
    pub fn random<R: Rng + ?Sized>(regions: &[Region], rng: &mut R) -> Self {
        AntennaLayout::new(regions.iter().map(|r| r.sample(rng)).collect())
    }

    /// Region centres.
    pub fn centers(regions: &[Region]) -> Self {
        AntennaLayout::new(
            regions
                .iter()
                .map(|r| [(r.x_min + r.x_max) / 2.0, (r.y_min + r.y_max) / 2.0])
                .collect(),
        )
    }

    /// Collinear array along x with the given spacing, first element at the
    /// origin.
    pub fn linear(n: usize, spacing: f64) -> Self {
        AntennaLayout::new((0..n).map(|i| [i as f64 * spacing, 0.0]).collect())
    }
}

/// LoS steering row of user `m`: entry n is `exp(j·2π/λ·t_nᵀa_m)`.
pub fn steering_row(layout: &AntennaLayout, cfg: &SystemConfig, m: usize) -> Vec<Complex64> {
    let a = cfg.direction(m);
    let k = cfg.wavenumber();
    layout
        .positions()
        .iter()
        .map(|p| Complex64::from_polar(1.0, k * (p[0] * a[0] + p[1] * a[1])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{reference_scenario, validation_scenario};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn origin_layout_gives_ones() {
        let cfg = reference_scenario(5, 1.0, 15.0, 0.2);
        let layout = AntennaLayout::new(vec![[0.0, 0.0]; 5]);
        for m in 0..4 {
            for h in steering_row(&layout, &cfg, m) {
                assert!((h - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn broadside_user_gives_ones() {
        // user 0 of the validation point has θ = φ = 0
        let cfg = validation_scenario(15.0);
        let layout = AntennaLayout::linear(5, 0.37);
        for h in steering_row(&layout, &cfg, 0) {
            assert!((h - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn half_wavelength_endfire_phase() {
        let mut cfg = validation_scenario(15.0);
        cfg.elevation_aod[1] = 0.0;
        cfg.azimuth_aod[1] = std::f64::consts::FRAC_PI_2;
        let layout = AntennaLayout::new(vec![[0.5, 0.0]; 5]);
        let row = steering_row(&layout, &cfg, 1);
        assert!((row[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn projection_helpers() {
        let r = Region::new(0.0, 1.0, 0.0, 2.0);
        assert_eq!(r.clamp([-1.0, 3.0]), [0.0, 2.0]);
        assert_eq!(r.clamp([0.5, 1.0]), [0.5, 1.0]);
        assert!(r.contains([1.0, 2.0]));
        assert!(!r.contains([1.0 + 1e-12, 2.0]));
    }

    #[test]
    fn touching_regions_do_not_overlap() {
        let a = Region::new(0.0, 1.0, 0.0, 1.0);
        let b = Region::new(1.0, 2.0, 0.0, 1.0);
        assert!(!a.overlaps(&b));
        assert!(a.overlaps(&Region::new(0.5, 1.5, 0.5, 1.5)));
    }

    #[test]
    fn rotation_preserves_distances() {
        let l = AntennaLayout::linear(4, 0.5);
        let r = l.rotated(1.1);
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!((d(r.position(0), r.position(3)) - 1.5).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn steering_entries_unit_modulus(seed in any::<u64>(), side in 0.05f64..3.0) {
            let cfg = reference_scenario(6, side, 15.0, 0.2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let layout = AntennaLayout::random(&cfg.regions, &mut rng);
            prop_assert!(layout.is_feasible(&cfg.regions));
            for m in 0..cfg.num_users {
                for h in steering_row(&layout, &cfg, m) {
                    prop_assert!((h.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
