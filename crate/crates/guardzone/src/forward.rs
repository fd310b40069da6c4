//! Forward-link analysis: interference into a CDMA mobile at the overlay
//! edge and the traffic-channel power the cell must spend to reach it.
//!
//! The victim is a cell-edge mobile of a boundary overlay cell, facing the
//! nearest ring of surrounding FM sites. The required traffic power solves
//! the despread signal-to-interference balance
//!
//!   target = PG · P_t·L(R)·G_m / (I_fm + I_other + N_m + I_own)
//!
//! where I_own is the serving cell's own average transmit power seen
//! through the same path and I_other aggregates the six neighbor CDMA
//! cells. Powers returned to callers are referred back to the combiner
//! output so they compare directly against the budget threshold.

use thiserror::Error;

use crate::layout::{CellLayout, InterfererRing, LayoutError, SQRT_3};
use crate::linkbudget::{BudgetError, CdmaForwardBudget};
use crate::propagation::{PropagationError, PropagationModel};
use crate::solver::{solve_guard_zone, GuardZoneResult};
use crate::units::{Decibels, Distance, PowerQuantity, UnitsError};

/// FM effective radiated power per channel, taken per cell for omni sites.
pub const DEFAULT_FM_ERP_PER_CHANNEL_WATTS: f64 = 100.0;
pub const DEFAULT_FORWARD_TARGET_EB_N0_DB: f64 = 5.5;
/// Radius at which the nominal FM ERP is calibrated when ERP is allowed to
/// scale with cell size.
pub const FM_ERP_REFERENCE_RADIUS_MILES: f64 = 14.0;

/// Fixed trapezoid resolution for averaging the path gain around the FM
/// ring. The integrand is smooth and periodic, so this is converged far
/// below the other tolerances in play for every geometry in range.
const RING_QUADRATURE_POINTS: u32 = 2048;

#[derive(Debug, Error, PartialEq)]
pub enum ForwardError {
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Units(#[from] UnitsError),
    #[error("invalid forward scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
}

/// Source of other-cell CDMA interference at the victim mobile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OtherCellInterference {
    /// Six neighbor CDMA sites one cell spacing away, each radiating the
    /// voice-activity-weighted carrier total.
    Computed,
    /// A fixed received power, for sensitivity studies.
    Fixed(PowerQuantity),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardScenario {
    pub budget: CdmaForwardBudget,
    pub layout: CellLayout,
    pub propagation: PropagationModel,
    pub fm_erp_per_channel: PowerQuantity,
    pub target_eb_n0: Decibels,
    pub other_cell_cdma_interference: OtherCellInterference,
    pub include_own_cell_interference: bool,
    /// Scale the FM ERP with (r / 14 mi)^gamma so smaller FM cells radiate
    /// proportionally less.
    pub fm_erp_scales_with_radius: bool,
}

impl ForwardScenario {
    pub fn validate(&self) -> Result<(), ForwardError> {
        self.budget.validate()?;
        self.layout.validate()?;
        self.propagation.validate()?;
        let mut issues = Vec::new();
        if self.fm_erp_per_channel.milliwatts() <= 0.0 {
            issues.push("fm_erp_per_channel must be positive".to_string());
        }
        if !self.target_eb_n0.db().is_finite() {
            issues.push(format!(
                "target_eb_n0 must be finite, got {}",
                self.target_eb_n0.db()
            ));
        }
        if let OtherCellInterference::Fixed(p) = self.other_cell_cdma_interference {
            if !p.milliwatts().is_finite() {
                issues.push("fixed other-cell interference must be finite".to_string());
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ForwardError::InvalidScenario(issues))
        }
    }

    /// ERP per interfering FM channel after optional radius scaling.
    fn effective_fm_erp_mw(&self) -> f64 {
        let mut erp = self.fm_erp_per_channel.milliwatts();
        if self.fm_erp_scales_with_radius {
            let ratio = self.layout.fm_radius.miles() / FM_ERP_REFERENCE_RADIUS_MILES;
            erp *= ratio.powf(self.propagation.exponent);
        }
        erp
    }

    /// Power collected from an explicit list of ring entries, site by
    /// site. Companion to [`fm_interference_at_mobile`], which integrates
    /// a smooth site density instead of summing a rounded count.
    ///
    /// [`fm_interference_at_mobile`]: ForwardScenario::fm_interference_at_mobile
    pub fn ring_power_mw(
        &self,
        ring: &InterfererRing,
        per_site_erp_mw: f64,
    ) -> Result<f64, ForwardError> {
        let mobile_gain = self.budget.mobile_antenna_gain_net.to_ratio();
        let mut total = 0.0;
        for entry in &ring.entries {
            let gain = self.propagation.path_gain(entry.distance)?;
            total += per_site_erp_mw * entry.site_count as f64 * gain * mobile_gain;
        }
        Ok(total)
    }

    /// Total FM power received by the victim mobile from the first ring of
    /// in-band FM sites outside a guard zone of width `guard_distance`.
    ///
    /// The ring is treated as a uniform density of one site per lattice
    /// spacing (at least six sites' worth), with the path gain averaged
    /// around the circle, rather than as a rounded whole number of
    /// discrete sites. The received total then shrinks strictly as the
    /// guard widens; a rounded count would jump up by 10·log10((n+1)/n)
    /// dB every time one more site fits on the ring, which at fine guard
    /// resolution would swamp the decay between neighboring distances.
    /// [`CellLayout::surrounding_fm_ring`] still reports the discrete
    /// placement for inspection.
    pub fn fm_interference_at_mobile(
        &self,
        guard_distance: Distance,
    ) -> Result<PowerQuantity, ForwardError> {
        let extent = self.layout.overlay_extent()?;
        let ring = extent + guard_distance + self.layout.fm_radius;
        let sites = (std::f64::consts::TAU * ring.miles() / self.layout.fm_tier().miles())
            .max(6.0);

        let victim = extent.miles();
        let circle = ring.miles();
        let mut mean_gain = 0.0;
        for k in 0..RING_QUADRATURE_POINTS {
            let theta = std::f64::consts::TAU * k as f64 / RING_QUADRATURE_POINTS as f64;
            let d2 = circle * circle + victim * victim - 2.0 * circle * victim * theta.cos();
            mean_gain += self.propagation.path_gain(Distance::from_miles(d2.sqrt())?)?;
        }
        mean_gain /= RING_QUADRATURE_POINTS as f64;

        let per_site =
            self.effective_fm_erp_mw() * self.layout.fm_channels_in_cdma_band as f64;
        let mobile_gain = self.budget.mobile_antenna_gain_net.to_ratio();
        let mw = per_site * sites * mean_gain * mobile_gain;
        Ok(PowerQuantity::from_milliwatts(mw)?)
    }

    /// Received power at the victim from one neighbor CDMA carrier plus the
    /// serving cell itself, both weighted by voice activity.
    fn cdma_interference_mw(&self) -> Result<(f64, f64), ForwardError> {
        let erp_total = self.budget.total_transmit_power.milliwatts()
            * self.budget.base_antenna_gain_net.to_ratio();
        let mobile_gain = self.budget.mobile_antenna_gain_net.to_ratio();
        let edge_gain = self.propagation.path_gain(self.layout.cdma_radius)?;
        let own = if self.include_own_cell_interference {
            self.budget.voice_activity * erp_total * edge_gain * mobile_gain
        } else {
            0.0
        };
        let other = match self.other_cell_cdma_interference {
            OtherCellInterference::Fixed(p) => p.milliwatts(),
            OtherCellInterference::Computed => {
                let spacing = self.layout.cdma_radius * SQRT_3;
                let gain = self.propagation.path_gain(spacing)?;
                6.0 * self.budget.voice_activity * erp_total * gain * mobile_gain
            }
        };
        Ok((own, other))
    }

    /// Traffic-channel power, referred to the combiner output, needed to
    /// hold the despread energy target at the cell edge with a guard zone
    /// of width `guard_distance`.
    pub fn required_traffic_power(
        &self,
        guard_distance: Distance,
    ) -> Result<PowerQuantity, ForwardError> {
        let rho = self.target_eb_n0.to_ratio();
        let pg = self.budget.processing_gain;
        let edge_gain = self.propagation.path_gain(self.layout.cdma_radius)?;
        let mobile_gain = self.budget.mobile_antenna_gain_net.to_ratio();
        let i_fm = self.fm_interference_at_mobile(guard_distance)?.milliwatts();
        let (i_own, i_other) = self.cdma_interference_mw()?;
        let noise = self.budget.mobile_noise_floor.milliwatts();

        let denominator_mw = i_fm + i_other + noise + i_own;
        let erp = rho / pg * denominator_mw / (edge_gain * mobile_gain);
        let at_combiner = erp / self.budget.base_antenna_gain_net.to_ratio();
        Ok(PowerQuantity::from_milliwatts(at_combiner)?)
    }

    /// Required power in dBm at the combiner output over a grid of guard
    /// distances, for plotting.
    pub fn forward_power_curve(
        &self,
        guard_distances_miles: &[f64],
    ) -> Result<Vec<(f64, f64)>, ForwardError> {
        let mut points = Vec::with_capacity(guard_distances_miles.len());
        for &d in guard_distances_miles {
            let power = self.required_traffic_power(Distance::from_miles(d)?)?;
            points.push((d, power.dbm()?));
        }
        Ok(points)
    }

    /// Smallest guard-zone width keeping the required traffic power at or
    /// below the budget threshold.
    pub fn forward_guard_zone(&self) -> Result<GuardZoneResult, ForwardError> {
        self.validate()?;
        let threshold_dbm = self.budget.max_traffic_power_threshold.dbm()?;
        let tier = self.layout.fm_tier().miles();
        solve_guard_zone(
            |d_miles| {
                let required = self.required_traffic_power(Distance::from_miles(d_miles)?)?;
                Ok::<f64, ForwardError>(threshold_dbm - required.dbm()?)
            },
            tier,
        )
    }
}

/// Noise-floor rise, in dB, caused by adding external interference power
/// on top of the receiver's own floor.
pub fn external_interference_penalty(
    external: PowerQuantity,
    noise_floor: PowerQuantity,
) -> Result<Decibels, ForwardError> {
    let floor = noise_floor.milliwatts();
    if floor <= 0.0 {
        return Err(ForwardError::InvalidScenario(vec![
            "noise floor must be positive for a penalty".to_string(),
        ]));
    }
    let rise = 10.0 * (1.0 + external.milliwatts() / floor).log10();
    Ok(Decibels::new(rise).expect("penalty is finite"))
}
