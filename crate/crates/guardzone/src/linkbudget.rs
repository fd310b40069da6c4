//! Forward-link power budget of a CDMA carrier.
//!
//! All powers refer to the transmit combiner output (the point where the
//! carrier's 25 W rating applies) unless explicitly converted to radiated
//! power through the antenna gain. Digital channel gains relate channel
//! powers quadratically: a traffic channel at digital gain g carries
//! pilot_power·(g/pilot_gain)^2.

use thiserror::Error;

use crate::units::{Decibels, PowerQuantity};

pub const DEFAULT_TOTAL_TRANSMIT_POWER_WATTS: f64 = 25.0;
pub const DEFAULT_PILOT_FRACTION: f64 = 0.16;
pub const DEFAULT_PILOT_DIGITAL_GAIN: f64 = 108.0;
pub const DEFAULT_TRAFFIC_DIGITAL_GAIN: f64 = 80.0;
pub const DEFAULT_VOICE_ACTIVITY: f64 = 0.6;
pub const DEFAULT_PROCESSING_GAIN: f64 = 128.0;
pub const DEFAULT_BASE_ANTENNA_GAIN_DB: f64 = 9.0;
pub const DEFAULT_MOBILE_ANTENNA_GAIN_DB: f64 = 0.0;
pub const DEFAULT_MOBILE_NOISE_FLOOR_DBM: f64 = -105.0;
pub const DEFAULT_MAX_TRAFFIC_THRESHOLD_DBM: f64 = 32.0;

#[derive(Debug, Error, PartialEq)]
pub enum BudgetError {
    #[error("invalid link budget: {}", .0.join("; "))]
    InvalidBudget(Vec<String>),
}

/// Transmit-side budget of one CDMA carrier plus the mobile-side noise
/// floor it is judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct CdmaForwardBudget {
    /// Average total carrier power at the combiner output.
    pub total_transmit_power: PowerQuantity,
    /// Share of the total power assigned to the pilot channel.
    pub pilot_fraction: f64,
    pub pilot_digital_gain: f64,
    pub traffic_digital_gain: f64,
    /// Voice activity factor applied to interference-producing power.
    pub voice_activity: f64,
    /// Spreading bandwidth over information rate.
    pub processing_gain: f64,
    /// Cell-site antenna gain net of cable loss.
    pub base_antenna_gain_net: Decibels,
    pub mobile_antenna_gain_net: Decibels,
    pub mobile_noise_floor: PowerQuantity,
    /// Operating ceiling for one traffic channel at the combiner output.
    pub max_traffic_power_threshold: PowerQuantity,
}

impl Default for CdmaForwardBudget {
    fn default() -> Self {
        CdmaForwardBudget {
            total_transmit_power: PowerQuantity::from_watts(DEFAULT_TOTAL_TRANSMIT_POWER_WATTS)
                .unwrap(),
            pilot_fraction: DEFAULT_PILOT_FRACTION,
            pilot_digital_gain: DEFAULT_PILOT_DIGITAL_GAIN,
            traffic_digital_gain: DEFAULT_TRAFFIC_DIGITAL_GAIN,
            voice_activity: DEFAULT_VOICE_ACTIVITY,
            processing_gain: DEFAULT_PROCESSING_GAIN,
            base_antenna_gain_net: Decibels::new(DEFAULT_BASE_ANTENNA_GAIN_DB).unwrap(),
            mobile_antenna_gain_net: Decibels::new(DEFAULT_MOBILE_ANTENNA_GAIN_DB).unwrap(),
            mobile_noise_floor: PowerQuantity::from_dbm(DEFAULT_MOBILE_NOISE_FLOOR_DBM),
            max_traffic_power_threshold: PowerQuantity::from_dbm(
                DEFAULT_MAX_TRAFFIC_THRESHOLD_DBM,
            ),
        }
    }
}

impl CdmaForwardBudget {
    pub fn validate(&self) -> Result<(), BudgetError> {
        let mut issues = Vec::new();
        if self.total_transmit_power.milliwatts() <= 0.0 {
            issues.push("total_transmit_power must be positive".to_string());
        }
        if !(0.0..=1.0).contains(&self.pilot_fraction) || self.pilot_fraction == 0.0 {
            issues.push(format!(
                "pilot_fraction must lie in (0, 1], got {}",
                self.pilot_fraction
            ));
        }
        if self.pilot_digital_gain <= 0.0 {
            issues.push(format!(
                "pilot_digital_gain must be positive, got {}",
                self.pilot_digital_gain
            ));
        }
        if self.traffic_digital_gain <= 0.0 {
            issues.push(format!(
                "traffic_digital_gain must be positive, got {}",
                self.traffic_digital_gain
            ));
        }
        if !(0.0..=1.0).contains(&self.voice_activity) || self.voice_activity == 0.0 {
            issues.push(format!(
                "voice_activity must lie in (0, 1], got {}",
                self.voice_activity
            ));
        }
        if self.processing_gain < 1.0 {
            issues.push(format!(
                "processing_gain must be at least 1, got {}",
                self.processing_gain
            ));
        }
        if self.mobile_noise_floor.milliwatts() <= 0.0 {
            issues.push("mobile_noise_floor must be positive".to_string());
        }
        if self.max_traffic_power_threshold.milliwatts() <= 0.0 {
            issues.push("max_traffic_power_threshold must be positive".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(BudgetError::InvalidBudget(issues))
        }
    }

    /// Non-fatal configuration oddities worth surfacing to the operator.
    pub fn warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        let ceiling = self.max_traffic_channel_power();
        if self.max_traffic_power_threshold.milliwatts() >= ceiling.milliwatts() {
            notes.push(format!(
                "max_traffic_power_threshold ({:.2} dBm) is at or above the digital-gain \
                 ceiling ({:.2} dBm); the threshold normally bites first",
                self.max_traffic_power_threshold.dbm().unwrap_or(f64::NAN),
                ceiling.dbm().unwrap_or(f64::NAN),
            ));
        }
        if self.traffic_digital_gain > self.pilot_digital_gain {
            notes.push(format!(
                "traffic_digital_gain {} exceeds pilot_digital_gain {}",
                self.traffic_digital_gain, self.pilot_digital_gain
            ));
        }
        notes
    }

    /// Pilot channel power at the combiner output.
    pub fn pilot_power(&self) -> PowerQuantity {
        self.total_transmit_power.scaled(self.pilot_fraction)
    }

    /// Largest power one traffic channel can take at full digital gain.
    pub fn max_traffic_channel_power(&self) -> PowerQuantity {
        let ratio = self.traffic_digital_gain / self.pilot_digital_gain;
        self.pilot_power().scaled(ratio * ratio)
    }

    /// Fraction of the carrier total that a given channel power represents.
    pub fn average_traffic_power_fraction(&self, channel_power: PowerQuantity) -> f64 {
        channel_power.milliwatts() / self.total_transmit_power.milliwatts()
    }
}
