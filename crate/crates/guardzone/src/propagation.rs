//! Log-distance power-law path loss with antenna-height gain corrections.
//!
//! The model is calibrated as a loss at a reference distance plus
//! `10·gamma·log10(d/d0)` beyond it. Height terms add a fixed number of dB
//! per doubling of base or mobile antenna height relative to the calibration
//! heights, so they shift the whole gain curve without changing its slope.
//! Distances inside the reference distance are clamped to the reference
//! value rather than extrapolated.

use thiserror::Error;

use crate::units::{db_to_ratio, Distance};

pub const DEFAULT_EXPONENT: f64 = 4.0;
pub const DEFAULT_REFERENCE_DISTANCE_MILES: f64 = 1.0;
pub const DEFAULT_REFERENCE_LOSS_DB: f64 = 105.0;
pub const DEFAULT_BASE_HEIGHT_FEET: f64 = 150.0;
pub const DEFAULT_MOBILE_HEIGHT_FEET: f64 = 5.0;
pub const DEFAULT_BASE_HEIGHT_GAIN_PER_DOUBLING_DB: f64 = 6.0;
pub const DEFAULT_MOBILE_HEIGHT_GAIN_PER_DOUBLING_DB: f64 = 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    #[error("path gain is undefined at zero distance")]
    ZeroDistance,
    #[error("invalid propagation model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),
}

/// Power-law path loss between a cell site and a mobile.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationModel {
    /// Path-loss exponent gamma (4 reproduces the classic reuse-7 carrier
    /// to interference ratio of about 18 dB).
    pub exponent: f64,
    /// Distance at which `reference_loss_db` is calibrated.
    pub reference_distance: Distance,
    /// Median loss in dB at the reference distance for the calibration
    /// antenna heights.
    pub reference_loss_db: f64,
    pub base_height: Distance,
    pub mobile_height: Distance,
    pub base_height_gain_per_doubling_db: f64,
    pub mobile_height_gain_per_doubling_db: f64,
}

impl Default for PropagationModel {
    fn default() -> Self {
        PropagationModel {
            exponent: DEFAULT_EXPONENT,
            reference_distance: Distance::from_miles(DEFAULT_REFERENCE_DISTANCE_MILES).unwrap(),
            reference_loss_db: DEFAULT_REFERENCE_LOSS_DB,
            base_height: Distance::from_feet(DEFAULT_BASE_HEIGHT_FEET).unwrap(),
            mobile_height: Distance::from_feet(DEFAULT_MOBILE_HEIGHT_FEET).unwrap(),
            base_height_gain_per_doubling_db: DEFAULT_BASE_HEIGHT_GAIN_PER_DOUBLING_DB,
            mobile_height_gain_per_doubling_db: DEFAULT_MOBILE_HEIGHT_GAIN_PER_DOUBLING_DB,
        }
    }
}

impl PropagationModel {
    /// Checks every model invariant, returning the full list of violations.
    pub fn validate(&self) -> Result<(), PropagationError> {
        let mut issues = Vec::new();
        if !(2.0..=6.0).contains(&self.exponent) {
            issues.push(format!("exponent must lie in [2, 6], got {}", self.exponent));
        }
        if self.reference_distance.miles() <= 0.0 {
            issues.push(format!(
                "reference_distance must be positive, got {} miles",
                self.reference_distance.miles()
            ));
        }
        if !self.reference_loss_db.is_finite() || self.reference_loss_db <= 0.0 {
            issues.push(format!(
                "reference_loss_db must be a positive loss, got {}",
                self.reference_loss_db
            ));
        }
        if self.base_height.feet() <= 0.0 {
            issues.push(format!(
                "base_height must be positive, got {} feet",
                self.base_height.feet()
            ));
        }
        if self.mobile_height.feet() <= 0.0 {
            issues.push(format!(
                "mobile_height must be positive, got {} feet",
                self.mobile_height.feet()
            ));
        }
        if !self.base_height_gain_per_doubling_db.is_finite()
            || self.base_height_gain_per_doubling_db < 0.0
        {
            issues.push(format!(
                "base_height_gain_per_doubling_db must be non-negative, got {}",
                self.base_height_gain_per_doubling_db
            ));
        }
        if !self.mobile_height_gain_per_doubling_db.is_finite()
            || self.mobile_height_gain_per_doubling_db < 0.0
        {
            issues.push(format!(
                "mobile_height_gain_per_doubling_db must be non-negative, got {}",
                self.mobile_height_gain_per_doubling_db
            ));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(PropagationError::InvalidModel(issues))
        }
    }

    /// Combined height-gain offset in dB relative to the calibration heights.
    fn height_gain_db(&self) -> f64 {
        let base_octaves = (self.base_height.feet() / DEFAULT_BASE_HEIGHT_FEET).log2();
        let mobile_octaves = (self.mobile_height.feet() / DEFAULT_MOBILE_HEIGHT_FEET).log2();
        self.base_height_gain_per_doubling_db * base_octaves
            + self.mobile_height_gain_per_doubling_db * mobile_octaves
    }

    /// Path gain in dB (a large negative number) at distance `d`.
    pub fn path_gain_db(&self, d: Distance) -> Result<f64, PropagationError> {
        if d.miles() == 0.0 {
            return Err(PropagationError::ZeroDistance);
        }
        let d0 = self.reference_distance.miles();
        let effective = d.miles().max(d0);
        Ok(-self.reference_loss_db - 10.0 * self.exponent * (effective / d0).log10()
            + self.height_gain_db())
    }

    /// Path gain as a linear power ratio (received over radiated).
    pub fn path_gain(&self, d: Distance) -> Result<f64, PropagationError> {
        Ok(db_to_ratio(self.path_gain_db(d)?))
    }

    /// Linear path gain at the reference distance, including height terms.
    pub fn reference_gain(&self) -> f64 {
        db_to_ratio(-self.reference_loss_db + self.height_gain_db())
    }
}
