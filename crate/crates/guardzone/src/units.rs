//! Unit-safe power, ratio, and distance arithmetic.
//!
//! Powers are carried internally in milliwatts and only converted to dB
//! at explicit call sites, so accidental dB-domain addition of powers is
//! impossible by construction.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub const FEET_PER_MILE: f64 = 5280.0;

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("power must be finite and non-negative, got {0} mW")]
    InvalidPower(f64),
    #[error("cannot express zero or negative power ({0} mW) in dBm")]
    NonPositivePowerInDb(f64),
    #[error("ratio must be finite and strictly positive, got {0}")]
    NonPositiveRatio(f64),
    #[error("distance must be finite and non-negative, got {0} miles")]
    InvalidDistance(f64),
    #[error("decibel value must not be NaN")]
    NanDecibels,
}

/// A non-negative RF power stored in linear milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerQuantity {
    mw: f64,
}

impl PowerQuantity {
    pub const ZERO: PowerQuantity = PowerQuantity { mw: 0.0 };

    pub fn from_milliwatts(mw: f64) -> Result<Self, UnitsError> {
        if !mw.is_finite() || mw < 0.0 {
            return Err(UnitsError::InvalidPower(mw));
        }
        Ok(PowerQuantity { mw })
    }

    pub fn from_watts(w: f64) -> Result<Self, UnitsError> {
        Self::from_milliwatts(w * 1000.0)
    }

    pub fn from_dbm(dbm: f64) -> Self {
        // Any finite dBm value maps to a positive number of milliwatts.
        PowerQuantity {
            mw: 10f64.powf(dbm / 10.0),
        }
    }

    pub fn milliwatts(&self) -> f64 {
        self.mw
    }

    pub fn watts(&self) -> f64 {
        self.mw / 1000.0
    }

    /// Converts to dBm. Zero power has no dB representation and errors.
    pub fn dbm(&self) -> Result<f64, UnitsError> {
        milliwatts_to_dbm(self.mw)
    }

    /// Scales by a linear (not dB) factor such as an antenna gain ratio.
    pub fn scaled(&self, factor: f64) -> Self {
        debug_assert!(factor.is_finite() && factor >= 0.0);
        PowerQuantity {
            mw: self.mw * factor,
        }
    }
}

impl Add for PowerQuantity {
    type Output = PowerQuantity;

    fn add(self, rhs: PowerQuantity) -> PowerQuantity {
        PowerQuantity {
            mw: self.mw + rhs.mw,
        }
    }
}

impl Mul<f64> for PowerQuantity {
    type Output = PowerQuantity;

    fn mul(self, rhs: f64) -> PowerQuantity {
        self.scaled(rhs)
    }
}

impl Sum for PowerQuantity {
    fn sum<I: Iterator<Item = PowerQuantity>>(iter: I) -> PowerQuantity {
        iter.fold(PowerQuantity::ZERO, Add::add)
    }
}

impl fmt::Display for PowerQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mW", self.mw)
    }
}

/// A dimensionless ratio expressed in decibels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Decibels {
    db: f64,
}

impl Decibels {
    pub const ZERO: Decibels = Decibels { db: 0.0 };

    pub fn new(db: f64) -> Result<Self, UnitsError> {
        if db.is_nan() {
            return Err(UnitsError::NanDecibels);
        }
        Ok(Decibels { db })
    }

    pub fn db(&self) -> f64 {
        self.db
    }

    pub fn to_ratio(&self) -> f64 {
        db_to_ratio(self.db)
    }

    pub fn from_ratio(ratio: f64) -> Result<Self, UnitsError> {
        Ok(Decibels {
            db: ratio_to_db(ratio)?,
        })
    }
}

impl Add for Decibels {
    type Output = Decibels;

    fn add(self, rhs: Decibels) -> Decibels {
        Decibels {
            db: self.db + rhs.db,
        }
    }
}

impl Sub for Decibels {
    type Output = Decibels;

    fn sub(self, rhs: Decibels) -> Decibels {
        Decibels {
            db: self.db - rhs.db,
        }
    }
}

impl Neg for Decibels {
    type Output = Decibels;

    fn neg(self) -> Decibels {
        Decibels { db: -self.db }
    }
}

impl fmt::Display for Decibels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dB", self.db)
    }
}

/// A non-negative distance stored in miles.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Distance {
    miles: f64,
}

impl Distance {
    pub const ZERO: Distance = Distance { miles: 0.0 };

    pub fn from_miles(miles: f64) -> Result<Self, UnitsError> {
        if !miles.is_finite() || miles < 0.0 {
            return Err(UnitsError::InvalidDistance(miles));
        }
        Ok(Distance { miles })
    }

    pub fn from_feet(feet: f64) -> Result<Self, UnitsError> {
        Self::from_miles(feet / FEET_PER_MILE)
    }

    pub fn miles(&self) -> f64 {
        self.miles
    }

    pub fn feet(&self) -> f64 {
        self.miles * FEET_PER_MILE
    }
}

impl Add for Distance {
    type Output = Distance;

    fn add(self, rhs: Distance) -> Distance {
        Distance {
            miles: self.miles + rhs.miles,
        }
    }
}

impl Mul<f64> for Distance {
    type Output = Distance;

    fn mul(self, rhs: f64) -> Distance {
        debug_assert!(rhs.is_finite() && rhs >= 0.0);
        Distance {
            miles: self.miles * rhs,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mi", self.miles)
    }
}

pub fn milliwatts_to_dbm(mw: f64) -> Result<f64, UnitsError> {
    if !mw.is_finite() || mw <= 0.0 {
        return Err(UnitsError::NonPositivePowerInDb(mw));
    }
    Ok(10.0 * mw.log10())
}

pub fn dbm_to_milliwatts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn ratio_to_db(ratio: f64) -> Result<f64, UnitsError> {
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(UnitsError::NonPositiveRatio(ratio));
    }
    Ok(10.0 * ratio.log10())
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
