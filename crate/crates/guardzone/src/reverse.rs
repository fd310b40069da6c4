//! Reverse-link analysis: CDMA mobiles as an interference source into a
//! surrounding FM cell site, and the carrier-to-interference ratio that
//! site sees.
//!
//! The seven-cell overlay's mobile population is approximated as one disc
//! of uniformly distributed, power-controlled transmitters centered on the
//! overlay. Two independent routes evaluate the disc's aggregate power at
//! an outside victim: a closed-form integral of the fourth-power law over
//! the disc, and a Monte Carlo estimator that samples mobile positions
//! directly. The estimator exists to validate the closed form and must not
//! share its math.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::layout::{cochannel_reuse_distance, CellLayout, LayoutError};
use crate::propagation::{PropagationError, PropagationModel};
use crate::solver::{solve_guard_zone, GuardZoneResult};
use crate::units::{Decibels, Distance, PowerQuantity, UnitsError};

pub const DEFAULT_COCHANNEL_INTERFERER_COUNT: u32 = 5;
/// One FM channel bandwidth over the CDMA spreading bandwidth.
pub const DEFAULT_BANDWIDTH_RATIO: f64 = 30.0 / 1228.8;
pub const DEFAULT_USERS_PER_CELL: u32 = 20;
pub const DEFAULT_REVERSE_TARGET_EB_N0_DB: f64 = 7.0;
pub const DEFAULT_CDMA_SITE_NOISE_FLOOR_DBM: f64 = -107.0;
pub const DEFAULT_OTHER_CELL_FACTOR: f64 = 0.45;
pub const DEFAULT_ACCEPTABLE_CIR_DB: f64 = 17.0;

/// Monte Carlo draws per RNG stream; batches combine in index order so the
/// result is independent of how batches are scheduled.
const MONTE_CARLO_BATCH: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum ReverseError {
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Units(#[from] UnitsError),
    #[error("invalid reverse scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error(
        "reverse link beyond the capacity pole: requires processing_gain > eb_n0 × \
         (users_per_cell − 1) × voice_activity × (1 + other_cell_factor), \
         but {pg} ≤ {load:.3}"
    )]
    CapacityPole { pg: f64, load: f64 },
    #[error(
        "closed-form disc interference assumes the fourth-power path-loss law, \
         got exponent {0}"
    )]
    ClosedFormExponent(f64),
    #[error("victim at {victim} miles lies inside the source disc of radius {disc} miles")]
    VictimInsideDisc { victim: f64, disc: f64 },
    #[error("monte carlo sample count must be positive")]
    NoSamples,
}

/// Reverse-direction scenario: the FM site as victim, the CDMA mobile
/// population as aggressor.
#[derive(Debug, Clone, PartialEq)]
pub struct ReverseScenario {
    pub layout: CellLayout,
    pub propagation: PropagationModel,
    /// ERP used for both the victim's own mobile and its FM co-channel
    /// interferers; it cancels inside the FM-only ratio.
    pub fm_erp_per_channel: PowerQuantity,
    /// Tier-1 FM co-channel cells still interfering (five once the guard
    /// zone displaces the sixth, six without it).
    pub cochannel_interferer_count: u32,
    /// Share of a CDMA mobile's power that lands inside one FM channel.
    pub bandwidth_ratio: f64,
    /// Active CDMA users per cell (per sector for three-sector sites).
    pub users_per_cell: u32,
    pub voice_activity: f64,
    pub target_reverse_eb_n0: Decibels,
    pub cdma_site_noise_floor: PowerQuantity,
    /// Other-cell interference at the CDMA site as a fraction of in-cell.
    pub other_cell_factor: f64,
    pub processing_gain: f64,
    /// CDMA cell-site antenna gain net of cable loss, applied when power
    /// control is referred back to mobile ERP.
    pub site_antenna_gain_net: Decibels,
    pub acceptable_cir: Decibels,
}

impl ReverseScenario {
    pub fn validate(&self) -> Result<(), ReverseError> {
        self.layout.validate()?;
        self.propagation.validate()?;
        let mut issues = Vec::new();
        if !(self.cochannel_interferer_count == 5 || self.cochannel_interferer_count == 6) {
            issues.push(format!(
                "cochannel_interferer_count must be 5 or 6, got {}",
                self.cochannel_interferer_count
            ));
        }
        if !(0.0..=1.0).contains(&self.bandwidth_ratio) || self.bandwidth_ratio == 0.0 {
            issues.push(format!(
                "bandwidth_ratio must lie in (0, 1], got {}",
                self.bandwidth_ratio
            ));
        }
        if self.users_per_cell == 0 {
            issues.push("users_per_cell must be positive".to_string());
        }
        if !(0.0..=1.0).contains(&self.voice_activity) || self.voice_activity == 0.0 {
            issues.push(format!(
                "voice_activity must lie in (0, 1], got {}",
                self.voice_activity
            ));
        }
        if self.fm_erp_per_channel.milliwatts() <= 0.0 {
            issues.push("fm_erp_per_channel must be positive".to_string());
        }
        if self.cdma_site_noise_floor.milliwatts() <= 0.0 {
            issues.push("cdma_site_noise_floor must be positive".to_string());
        }
        if self.other_cell_factor < 0.0 {
            issues.push(format!(
                "other_cell_factor must be non-negative, got {}",
                self.other_cell_factor
            ));
        }
        if self.processing_gain < 1.0 {
            issues.push(format!(
                "processing_gain must be at least 1, got {}",
                self.processing_gain
            ));
        }
        if !self.target_reverse_eb_n0.db().is_finite() {
            issues.push("target_reverse_eb_n0 must be finite".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ReverseError::InvalidScenario(issues))
        }
    }

    /// Per-mobile received power target S at the serving CDMA site under
    /// perfect power control, from the despread balance
    /// target = PG·S / (noise + (N−1)·activity·(1+f)·S).
    pub fn power_control_target(&self) -> Result<PowerQuantity, ReverseError> {
        let rho = self.target_reverse_eb_n0.to_ratio();
        let q = rho / self.processing_gain;
        let reuse_load = (self.users_per_cell.saturating_sub(1)) as f64
            * self.voice_activity
            * (1.0 + self.other_cell_factor);
        if self.processing_gain <= rho * reuse_load {
            return Err(ReverseError::CapacityPole {
                pg: self.processing_gain,
                load: rho * reuse_load,
            });
        }
        let s = q * self.cdma_site_noise_floor.milliwatts() / (1.0 - q * reuse_load);
        Ok(PowerQuantity::from_milliwatts(s)?)
    }

    /// Worst-case (cell-edge) mobile ERP: the power-control target referred
    /// back out through the edge path loss and the site antenna gain.
    pub fn mobile_transmit_power(&self) -> Result<PowerQuantity, ReverseError> {
        let s = self.power_control_target()?.milliwatts();
        let edge_gain = self.propagation.path_gain(self.layout.cdma_radius)?;
        let erp = s / (edge_gain * self.site_antenna_gain_net.to_ratio());
        Ok(PowerQuantity::from_milliwatts(erp)?)
    }

    /// Mobiles radiating from the whole overlay.
    pub fn overlay_user_count(&self) -> u32 {
        self.users_per_cell * self.layout.overlay_cells * self.layout.sectors
    }

    /// Distance from the overlay center to the victim FM site at guard
    /// width D: the site sits on the nearest surrounding ring.
    pub fn victim_site_distance(&self, guard_distance: Distance) -> Result<Distance, ReverseError> {
        let extent = self.layout.overlay_extent()?;
        Ok(extent + guard_distance + self.layout.fm_radius)
    }

    /// Carrier-to-interference ratio at the victim FM cell site with a
    /// guard zone of width `guard_distance`.
    ///
    /// Numerator: the site's own mobile at the cell edge. Denominator:
    /// tier-1 FM co-channel mobiles at the reuse distance plus the
    /// in-channel share of the CDMA mobile disc.
    pub fn fm_cell_cir(&self, guard_distance: Distance) -> Result<Decibels, ReverseError> {
        let erp = self.fm_erp_per_channel.milliwatts();
        let carrier = erp * self.propagation.path_gain(self.layout.fm_radius)?;
        let reuse = cochannel_reuse_distance(self.layout.fm_radius, self.layout.reuse_pattern);
        let fm_interference = self.cochannel_interferer_count as f64
            * erp
            * self.propagation.path_gain(reuse)?;

        let d_bar = self.victim_site_distance(guard_distance)?;
        let disc = self.layout.overlay_extent()?;
        let cdma = aggregate_mobile_interference(
            d_bar,
            disc,
            self.voice_activity,
            self.overlay_user_count(),
            self.mobile_transmit_power()?,
            &self.propagation,
        )?;
        let total = fm_interference + self.bandwidth_ratio * cdma.milliwatts();
        Ok(Decibels::new(10.0 * (carrier / total).log10()).expect("finite ratio"))
    }

    /// C/I in dB over a grid of guard widths, for plotting.
    pub fn cir_degradation_curve(
        &self,
        guard_distances_miles: &[f64],
    ) -> Result<Vec<(f64, f64)>, ReverseError> {
        let mut points = Vec::with_capacity(guard_distances_miles.len());
        for &d in guard_distances_miles {
            let cir = self.fm_cell_cir(Distance::from_miles(d)?)?;
            points.push((d, cir.db()));
        }
        Ok(points)
    }

    /// Smallest guard width at which the victim FM site's C/I reaches the
    /// acceptable level.
    pub fn reverse_guard_zone(&self) -> Result<GuardZoneResult, ReverseError> {
        self.validate()?;
        let acceptable = self.acceptable_cir.db();
        let tier = self.layout.fm_tier().miles();
        solve_guard_zone(
            |d_miles| {
                let cir = self.fm_cell_cir(Distance::from_miles(d_miles)?)?;
                Ok::<f64, ReverseError>(cir.db() - acceptable)
            },
            tier,
        )
    }

    /// FM-only C/I in dB once the CDMA term vanishes (the large-D limit).
    pub fn fm_only_cir(&self) -> Result<Decibels, ReverseError> {
        let reuse = cochannel_reuse_distance(self.layout.fm_radius, self.layout.reuse_pattern);
        let ratio = self.propagation.path_gain(self.layout.fm_radius)?
            / (self.cochannel_interferer_count as f64 * self.propagation.path_gain(reuse)?);
        Ok(Decibels::new(10.0 * ratio.log10()).expect("finite ratio"))
    }
}

/// Dimensionless disc factor
///
///   c(x) = x⁴ · [ 2x²·ln(x²/(x²−1)) − (4x⁴−6x²+1) / (2(x²−1)²) ]
///
/// for x = victim distance over disc radius. Near the disc the direct
/// expression is well conditioned; far away its two terms agree to many
/// digits and cancel catastrophically, so a series in t = 1/x² takes
/// over. c diverges as x → 1 and falls to 1/6 as x → ∞.
fn disc_integral_factor(x: f64) -> f64 {
    let t = 1.0 / (x * x);
    if t > 0.1 {
        let x2 = x * x;
        let gap = x2 - 1.0;
        let b = 2.0 * x2 * (x2 / gap).ln()
            - (4.0 * x2 * x2 - 6.0 * x2 + 1.0) / (2.0 * gap * gap);
        b / (t * t)
    } else {
        // c = sum over n >= 2 of (2/(n+1) + (n−3)/2)·t^(n−2); at t <= 0.1
        // the n = 30 truncation error is below 1e-18 of the leading term.
        let mut sum = 0.0;
        let mut power = 1.0;
        for n in 2..=30u32 {
            sum += (2.0 / (n as f64 + 1.0) + (n as f64 - 3.0) / 2.0) * power;
            power *= t;
        }
        sum
    }
}

/// Closed-form aggregate received power at a victim `d_bar` from the
/// center of a disc of radius `disc_radius` filled with `users` uniformly
/// placed, power-controlled mobiles whose cell-edge ERP is `edge_power`.
///
/// Power control against the disc center scales a mobile at radius rho by
/// (rho/disc_radius)^4, which folds into the disc integral of the
/// fourth-power law as
///
///   2·a·N·P · G(d̄) · c(d̄/R)
///
/// where G is the unclamped fourth-power path gain at the victim and c is
/// [`disc_integral_factor`]. The victim must lie outside the disc and
/// beyond the model's reference distance; a zero-radius disc degenerates
/// to a point source at one third of the direct-path power (the mean of
/// the power-control weight).
pub fn aggregate_mobile_interference(
    d_bar: Distance,
    disc_radius: Distance,
    voice_activity: f64,
    users: u32,
    edge_power: PowerQuantity,
    propagation: &PropagationModel,
) -> Result<PowerQuantity, ReverseError> {
    if propagation.exponent != 4.0 {
        return Err(ReverseError::ClosedFormExponent(propagation.exponent));
    }
    let d = d_bar.miles();
    let r = disc_radius.miles();
    if d <= r {
        return Err(ReverseError::VictimInsideDisc { victim: d, disc: r });
    }
    let d0 = propagation.reference_distance.miles();
    let victim_gain = propagation.reference_gain() * (d0 / d).powi(4);
    let mw = 2.0 * voice_activity * users as f64 * edge_power.milliwatts()
        * victim_gain
        * disc_integral_factor(d / r);
    Ok(PowerQuantity::from_milliwatts(mw)?)
}

/// Monte Carlo estimate of the same disc aggregate: draws mobile positions
/// area-uniformly, weights each by the power-control law and the path gain
/// to the victim, and averages. Returns (mean, standard error). Identical
/// seeds give bit-identical results regardless of batching.
///
/// Takes the same flat argument list as [`aggregate_mobile_interference`]
/// so the two stay callable side by side without sharing a scenario type.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_interference(
    d_bar: Distance,
    disc_radius: Distance,
    voice_activity: f64,
    users: u32,
    edge_power: PowerQuantity,
    propagation: &PropagationModel,
    samples: u64,
    seed: u64,
) -> Result<(PowerQuantity, PowerQuantity), ReverseError> {
    if samples == 0 {
        return Err(ReverseError::NoSamples);
    }
    let d = d_bar.miles();
    let r = disc_radius.miles();
    let scale = voice_activity * users as f64 * edge_power.milliwatts();
    let half_gamma = propagation.exponent / 2.0;

    let batches = samples.div_ceil(MONTE_CARLO_BATCH);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for batch in 0..batches {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let in_batch = MONTE_CARLO_BATCH.min(samples - batch * MONTE_CARLO_BATCH);
        let mut batch_sum = 0.0;
        let mut batch_sum_sq = 0.0;
        for _ in 0..in_batch {
            let u: f64 = rng.gen();
            let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let rho = r * u.sqrt();
            let dist2 = d * d + rho * rho - 2.0 * d * rho * phi.cos();
            let dist = dist2.max(0.0).sqrt().max(f64::MIN_POSITIVE);
            // (rho/r)^gamma written through u so a degenerate disc still
            // carries the power-control weight.
            let weight = u.powf(half_gamma);
            let gain = propagation.path_gain(Distance::from_miles(dist)?)?;
            let value = scale * weight * gain;
            batch_sum += value;
            batch_sum_sq += value * value;
        }
        sum += batch_sum;
        sum_sq += batch_sum_sq;
    }

    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    let stderr = (variance / n).sqrt();
    Ok((
        PowerQuantity::from_milliwatts(mean)?,
        PowerQuantity::from_milliwatts(stderr)?,
    ))
}
