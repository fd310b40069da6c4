//! Configuration: built-in presets, TOML overrides, and the layered
//! resolution that turns both into ready-to-run scenarios.
//!
//! Resolution order is preset first, then the optional config file. Every
//! resolved field remembers where its value came from so `--explain` can
//! print the full picture. Unknown keys anywhere in the file are hard
//! errors; silent typos in an interference study are worse than a crash.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::forward::{
    ForwardScenario, OtherCellInterference, DEFAULT_FM_ERP_PER_CHANNEL_WATTS,
    DEFAULT_FORWARD_TARGET_EB_N0_DB,
};
use crate::layout::CellLayout;
use crate::linkbudget::CdmaForwardBudget;
use crate::propagation::PropagationModel;
use crate::reverse::{
    ReverseScenario, DEFAULT_ACCEPTABLE_CIR_DB, DEFAULT_BANDWIDTH_RATIO,
    DEFAULT_CDMA_SITE_NOISE_FLOOR_DBM, DEFAULT_COCHANNEL_INTERFERER_COUNT,
    DEFAULT_OTHER_CELL_FACTOR, DEFAULT_REVERSE_TARGET_EB_N0_DB, DEFAULT_USERS_PER_CELL,
};
use crate::units::{Decibels, Distance, PowerQuantity};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// Built-in starting points for the two site architectures studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Omnidirectional CDMA sites: 9 dB net antenna gain, six FM channels
    /// falling inside the CDMA band per cell.
    OmniDefault,
    /// Three-sector CDMA sites: 12 dB net antenna gain, two FM channels
    /// inside the band per facing sector, per-sector user loading.
    Sector3Default,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::OmniDefault => "omni-default",
            Preset::Sector3Default => "sector3-default",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn db(v: f64) -> Decibels {
    Decibels::new(v).expect("preset decibels")
}

fn watts(v: f64) -> PowerQuantity {
    PowerQuantity::from_watts(v).expect("preset power")
}

fn dbm(v: f64) -> PowerQuantity {
    PowerQuantity::from_dbm(v)
}

fn omni_layout() -> CellLayout {
    CellLayout {
        // A 1.23 MHz CDMA carrier straddles about 41 of the 30 kHz FM
        // channels; across a 7-cell reuse pattern that is 6 per cell.
        fm_channels_in_cdma_band: 6,
        ..CellLayout::default()
    }
}

fn sector3_layout() -> CellLayout {
    CellLayout {
        sectors: 3,
        // Only the sector facing the victim matters, and a sector carries
        // a third of the cell's co-band FM channels.
        fm_channels_in_cdma_band: 2,
        ..CellLayout::default()
    }
}

pub fn preset_omni_forward() -> ForwardScenario {
    ForwardScenario {
        budget: CdmaForwardBudget::default(),
        layout: omni_layout(),
        propagation: PropagationModel::default(),
        fm_erp_per_channel: watts(DEFAULT_FM_ERP_PER_CHANNEL_WATTS),
        target_eb_n0: db(DEFAULT_FORWARD_TARGET_EB_N0_DB),
        other_cell_cdma_interference: OtherCellInterference::Computed,
        include_own_cell_interference: true,
        fm_erp_scales_with_radius: false,
    }
}

pub fn preset_sector3_forward() -> ForwardScenario {
    ForwardScenario {
        budget: CdmaForwardBudget {
            base_antenna_gain_net: db(12.0),
            ..CdmaForwardBudget::default()
        },
        layout: sector3_layout(),
        ..preset_omni_forward()
    }
}

pub fn preset_omni_reverse() -> ReverseScenario {
    ReverseScenario {
        layout: omni_layout(),
        propagation: PropagationModel::default(),
        fm_erp_per_channel: watts(DEFAULT_FM_ERP_PER_CHANNEL_WATTS),
        cochannel_interferer_count: DEFAULT_COCHANNEL_INTERFERER_COUNT,
        bandwidth_ratio: DEFAULT_BANDWIDTH_RATIO,
        users_per_cell: DEFAULT_USERS_PER_CELL,
        voice_activity: 0.6,
        target_reverse_eb_n0: db(DEFAULT_REVERSE_TARGET_EB_N0_DB),
        cdma_site_noise_floor: dbm(DEFAULT_CDMA_SITE_NOISE_FLOOR_DBM),
        other_cell_factor: DEFAULT_OTHER_CELL_FACTOR,
        processing_gain: 128.0,
        site_antenna_gain_net: db(9.0),
        acceptable_cir: db(DEFAULT_ACCEPTABLE_CIR_DB),
    }
}

pub fn preset_sector3_reverse() -> ReverseScenario {
    ReverseScenario {
        layout: sector3_layout(),
        site_antenna_gain_net: db(12.0),
        ..preset_omni_reverse()
    }
}

/// Sweep definitions for the CSV outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub guard_distance_max_miles: f64,
    pub guard_distance_step_miles: f64,
    /// CDMA cell radii swept when studying how geometry scales.
    pub scan_radii_miles: Vec<f64>,
    pub penalty_min_dbm: f64,
    pub penalty_max_dbm: f64,
    pub penalty_step_db: f64,
    /// Victim-distance-to-disc-radius ratios for the closed-form versus
    /// Monte Carlo cross-check.
    pub validation_ratios: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            guard_distance_max_miles: 30.0,
            guard_distance_step_miles: 0.25,
            scan_radii_miles: vec![1.0, 2.0, 4.0, 7.0, 10.0, 14.0],
            penalty_min_dbm: -140.0,
            penalty_max_dbm: -90.0,
            penalty_step_db: 1.0,
            validation_ratios: vec![1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0],
        }
    }
}

impl Grids {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut issues = Vec::new();
        if !self.guard_distance_max_miles.is_finite() || self.guard_distance_max_miles <= 0.0 {
            issues.push("grids.guard_distance_max_miles must be positive".to_string());
        }
        if !self.guard_distance_step_miles.is_finite() || self.guard_distance_step_miles <= 0.0 {
            issues.push("grids.guard_distance_step_miles must be positive".to_string());
        }
        if self.scan_radii_miles.is_empty() || self.scan_radii_miles.iter().any(|r| *r <= 0.0) {
            issues.push("grids.scan_radii_miles must be a non-empty list of positive radii".into());
        }
        if !self.penalty_step_db.is_finite() || self.penalty_step_db <= 0.0 {
            issues.push("grids.penalty_step_db must be positive".to_string());
        }
        if self.penalty_min_dbm > self.penalty_max_dbm {
            issues.push("grids.penalty_min_dbm must not exceed grids.penalty_max_dbm".into());
        }
        if self.validation_ratios.is_empty() || self.validation_ratios.iter().any(|x| *x <= 1.0) {
            issues.push("grids.validation_ratios must be a non-empty list of ratios above 1".into());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(issues))
        }
    }

    pub fn guard_distances(&self) -> Vec<f64> {
        let steps = (self.guard_distance_max_miles / self.guard_distance_step_miles).round() as u64;
        (0..=steps)
            .map(|k| k as f64 * self.guard_distance_step_miles)
            .collect()
    }

    pub fn penalty_levels_dbm(&self) -> Vec<f64> {
        let steps =
            ((self.penalty_max_dbm - self.penalty_min_dbm) / self.penalty_step_db).round() as u64;
        (0..=steps)
            .map(|k| self.penalty_min_dbm + k as f64 * self.penalty_step_db)
            .collect()
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    layout: Option<RawLayout>,
    propagation: Option<RawPropagation>,
    budget: Option<RawBudget>,
    forward: Option<RawForward>,
    reverse: Option<RawReverse>,
    grids: Option<RawGrids>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    cdma_radius_miles: Option<f64>,
    fm_radius_miles: Option<f64>,
    sectors: Option<u32>,
    reuse_pattern: Option<u32>,
    overlay_cells: Option<u32>,
    fm_channels_in_cdma_band: Option<u32>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPropagation {
    exponent: Option<f64>,
    reference_distance_miles: Option<f64>,
    reference_loss_db: Option<f64>,
    base_height_feet: Option<f64>,
    mobile_height_feet: Option<f64>,
    base_height_gain_per_doubling_db: Option<f64>,
    mobile_height_gain_per_doubling_db: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    total_transmit_power_watts: Option<f64>,
    pilot_fraction: Option<f64>,
    pilot_digital_gain: Option<f64>,
    traffic_digital_gain: Option<f64>,
    voice_activity: Option<f64>,
    processing_gain: Option<f64>,
    base_antenna_gain_net_db: Option<f64>,
    mobile_antenna_gain_net_db: Option<f64>,
    mobile_noise_floor_dbm: Option<f64>,
    max_traffic_power_threshold_dbm: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawForward {
    fm_erp_per_channel_watts: Option<f64>,
    target_eb_n0_db: Option<f64>,
    other_cell_mode: Option<String>,
    other_cell_fixed_dbm: Option<f64>,
    include_own_cell_interference: Option<bool>,
    fm_erp_scales_with_radius: Option<bool>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawReverse {
    fm_erp_per_channel_watts: Option<f64>,
    cochannel_interferer_count: Option<u32>,
    bandwidth_ratio: Option<f64>,
    users_per_cell: Option<u32>,
    voice_activity: Option<f64>,
    target_eb_n0_db: Option<f64>,
    site_noise_floor_dbm: Option<f64>,
    other_cell_factor: Option<f64>,
    processing_gain: Option<f64>,
    site_antenna_gain_net_db: Option<f64>,
    acceptable_cir_db: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    guard_distance_max_miles: Option<f64>,
    guard_distance_step_miles: Option<f64>,
    scan_radii_miles: Option<Vec<f64>>,
    penalty_min_dbm: Option<f64>,
    penalty_max_dbm: Option<f64>,
    penalty_step_db: Option<f64>,
    validation_ratios: Option<Vec<f64>>,
}

/// One resolved field with the layer that set it, for `--explain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceEntry {
    pub field: String,
    pub value: String,
    pub source: String,
}

/// Fully resolved run setup: both directions plus sweep grids.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub forward: ForwardScenario,
    pub reverse: ReverseScenario,
    pub grids: Grids,
    provenance: BTreeMap<String, (String, String)>,
}

impl ResolvedConfig {
    pub fn provenance(&self) -> Vec<ProvenanceEntry> {
        self.provenance
            .iter()
            .map(|(field, (value, source))| ProvenanceEntry {
                field: field.clone(),
                value: value.clone(),
                source: source.clone(),
            })
            .collect()
    }

    fn note(&mut self, field: &str, value: impl fmt::Display, source: &str) {
        self.provenance
            .insert(field.to_string(), (value.to_string(), source.to_string()));
    }
}

fn list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn seed_provenance(resolved: &mut ResolvedConfig, source: &str) {
    let f = resolved.forward.clone();
    let r = resolved.reverse.clone();
    let g = resolved.grids.clone();
    resolved.note("layout.cdma_radius_miles", f.layout.cdma_radius.miles(), source);
    resolved.note("layout.fm_radius_miles", f.layout.fm_radius.miles(), source);
    resolved.note("layout.sectors", f.layout.sectors, source);
    resolved.note("layout.reuse_pattern", f.layout.reuse_pattern, source);
    resolved.note("layout.overlay_cells", f.layout.overlay_cells, source);
    resolved.note(
        "layout.fm_channels_in_cdma_band",
        f.layout.fm_channels_in_cdma_band,
        source,
    );
    resolved.note("propagation.exponent", f.propagation.exponent, source);
    resolved.note(
        "propagation.reference_distance_miles",
        f.propagation.reference_distance.miles(),
        source,
    );
    resolved.note(
        "propagation.reference_loss_db",
        f.propagation.reference_loss_db,
        source,
    );
    resolved.note(
        "propagation.base_height_feet",
        f.propagation.base_height.feet(),
        source,
    );
    resolved.note(
        "propagation.mobile_height_feet",
        f.propagation.mobile_height.feet(),
        source,
    );
    resolved.note(
        "propagation.base_height_gain_per_doubling_db",
        f.propagation.base_height_gain_per_doubling_db,
        source,
    );
    resolved.note(
        "propagation.mobile_height_gain_per_doubling_db",
        f.propagation.mobile_height_gain_per_doubling_db,
        source,
    );
    resolved.note(
        "budget.total_transmit_power_watts",
        f.budget.total_transmit_power.watts(),
        source,
    );
    resolved.note("budget.pilot_fraction", f.budget.pilot_fraction, source);
    resolved.note("budget.pilot_digital_gain", f.budget.pilot_digital_gain, source);
    resolved.note(
        "budget.traffic_digital_gain",
        f.budget.traffic_digital_gain,
        source,
    );
    resolved.note("budget.voice_activity", f.budget.voice_activity, source);
    resolved.note("budget.processing_gain", f.budget.processing_gain, source);
    resolved.note(
        "budget.base_antenna_gain_net_db",
        f.budget.base_antenna_gain_net.db(),
        source,
    );
    resolved.note(
        "budget.mobile_antenna_gain_net_db",
        f.budget.mobile_antenna_gain_net.db(),
        source,
    );
    resolved.note(
        "budget.mobile_noise_floor_dbm",
        f.budget.mobile_noise_floor.dbm().unwrap_or(f64::NAN),
        source,
    );
    resolved.note(
        "budget.max_traffic_power_threshold_dbm",
        f.budget.max_traffic_power_threshold.dbm().unwrap_or(f64::NAN),
        source,
    );
    resolved.note(
        "forward.fm_erp_per_channel_watts",
        f.fm_erp_per_channel.watts(),
        source,
    );
    resolved.note("forward.target_eb_n0_db", f.target_eb_n0.db(), source);
    let mode = match f.other_cell_cdma_interference {
        OtherCellInterference::Computed => "computed".to_string(),
        OtherCellInterference::Fixed(p) => format!("fixed ({} mW)", p.milliwatts()),
    };
    resolved.note("forward.other_cell_mode", mode, source);
    resolved.note(
        "forward.include_own_cell_interference",
        f.include_own_cell_interference,
        source,
    );
    resolved.note(
        "forward.fm_erp_scales_with_radius",
        f.fm_erp_scales_with_radius,
        source,
    );
    resolved.note(
        "reverse.fm_erp_per_channel_watts",
        r.fm_erp_per_channel.watts(),
        source,
    );
    resolved.note(
        "reverse.cochannel_interferer_count",
        r.cochannel_interferer_count,
        source,
    );
    resolved.note("reverse.bandwidth_ratio", r.bandwidth_ratio, source);
    resolved.note("reverse.users_per_cell", r.users_per_cell, source);
    resolved.note("reverse.voice_activity", r.voice_activity, source);
    resolved.note("reverse.target_eb_n0_db", r.target_reverse_eb_n0.db(), source);
    resolved.note(
        "reverse.site_noise_floor_dbm",
        r.cdma_site_noise_floor.dbm().unwrap_or(f64::NAN),
        source,
    );
    resolved.note("reverse.other_cell_factor", r.other_cell_factor, source);
    resolved.note("reverse.processing_gain", r.processing_gain, source);
    resolved.note(
        "reverse.site_antenna_gain_net_db",
        r.site_antenna_gain_net.db(),
        source,
    );
    resolved.note("reverse.acceptable_cir_db", r.acceptable_cir.db(), source);
    resolved.note(
        "grids.guard_distance_max_miles",
        g.guard_distance_max_miles,
        source,
    );
    resolved.note(
        "grids.guard_distance_step_miles",
        g.guard_distance_step_miles,
        source,
    );
    resolved.note("grids.scan_radii_miles", list(&g.scan_radii_miles), source);
    resolved.note("grids.penalty_min_dbm", g.penalty_min_dbm, source);
    resolved.note("grids.penalty_max_dbm", g.penalty_max_dbm, source);
    resolved.note("grids.penalty_step_db", g.penalty_step_db, source);
    resolved.note(
        "grids.validation_ratios",
        list(&g.validation_ratios),
        source,
    );
}

/// Build the run setup from a preset plus an optional TOML override file.
pub fn resolve(preset: Preset, config_path: Option<&Path>) -> Result<ResolvedConfig, ConfigError> {
    let (forward, reverse) = match preset {
        Preset::OmniDefault => (preset_omni_forward(), preset_omni_reverse()),
        Preset::Sector3Default => (preset_sector3_forward(), preset_sector3_reverse()),
    };
    let mut resolved = ResolvedConfig {
        forward,
        reverse,
        grids: Grids::default(),
        provenance: BTreeMap::new(),
    };
    let preset_source = format!("preset {}", preset.name());
    seed_provenance(&mut resolved, &preset_source);

    if let Some(path) = config_path {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let raw: RawConfig = toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        apply(&mut resolved, raw, &format!("file {}", path.display()))?;
    }

    resolved
        .forward
        .validate()
        .map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?;
    resolved
        .reverse
        .validate()
        .map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?;
    resolved.grids.validate()?;
    Ok(resolved)
}

fn non_negative_power(
    field: &str,
    milliwatts: f64,
) -> Result<PowerQuantity, ConfigError> {
    PowerQuantity::from_milliwatts(milliwatts)
        .map_err(|e| ConfigError::Invalid(vec![format!("{field}: {e}")]))
}

fn finite_db(field: &str, value: f64) -> Result<Decibels, ConfigError> {
    Decibels::new(value).map_err(|e| ConfigError::Invalid(vec![format!("{field}: {e}")]))
}

fn positive_miles(field: &str, value: f64) -> Result<Distance, ConfigError> {
    Distance::from_miles(value).map_err(|e| ConfigError::Invalid(vec![format!("{field}: {e}")]))
}

fn positive_feet(field: &str, value: f64) -> Result<Distance, ConfigError> {
    Distance::from_feet(value).map_err(|e| ConfigError::Invalid(vec![format!("{field}: {e}")]))
}

#[allow(clippy::too_many_lines)]
fn apply(resolved: &mut ResolvedConfig, raw: RawConfig, source: &str) -> Result<(), ConfigError> {
    if let Some(l) = raw.layout {
        if let Some(v) = l.cdma_radius_miles {
            let d = positive_miles("layout.cdma_radius_miles", v)?;
            resolved.forward.layout.cdma_radius = d;
            resolved.reverse.layout.cdma_radius = d;
            resolved.note("layout.cdma_radius_miles", v, source);
        }
        if let Some(v) = l.fm_radius_miles {
            let d = positive_miles("layout.fm_radius_miles", v)?;
            resolved.forward.layout.fm_radius = d;
            resolved.reverse.layout.fm_radius = d;
            resolved.note("layout.fm_radius_miles", v, source);
        }
        if let Some(v) = l.sectors {
            resolved.forward.layout.sectors = v;
            resolved.reverse.layout.sectors = v;
            resolved.note("layout.sectors", v, source);
        }
        if let Some(v) = l.reuse_pattern {
            resolved.forward.layout.reuse_pattern = v;
            resolved.reverse.layout.reuse_pattern = v;
            resolved.note("layout.reuse_pattern", v, source);
        }
        if let Some(v) = l.overlay_cells {
            resolved.forward.layout.overlay_cells = v;
            resolved.reverse.layout.overlay_cells = v;
            resolved.note("layout.overlay_cells", v, source);
        }
        if let Some(v) = l.fm_channels_in_cdma_band {
            resolved.forward.layout.fm_channels_in_cdma_band = v;
            resolved.reverse.layout.fm_channels_in_cdma_band = v;
            resolved.note("layout.fm_channels_in_cdma_band", v, source);
        }
    }

    if let Some(p) = raw.propagation {
        if let Some(v) = p.exponent {
            resolved.forward.propagation.exponent = v;
            resolved.reverse.propagation.exponent = v;
            resolved.note("propagation.exponent", v, source);
        }
        if let Some(v) = p.reference_distance_miles {
            let d = positive_miles("propagation.reference_distance_miles", v)?;
            resolved.forward.propagation.reference_distance = d;
            resolved.reverse.propagation.reference_distance = d;
            resolved.note("propagation.reference_distance_miles", v, source);
        }
        if let Some(v) = p.reference_loss_db {
            resolved.forward.propagation.reference_loss_db = v;
            resolved.reverse.propagation.reference_loss_db = v;
            resolved.note("propagation.reference_loss_db", v, source);
        }
        if let Some(v) = p.base_height_feet {
            let d = positive_feet("propagation.base_height_feet", v)?;
            resolved.forward.propagation.base_height = d;
            resolved.reverse.propagation.base_height = d;
            resolved.note("propagation.base_height_feet", v, source);
        }
        if let Some(v) = p.mobile_height_feet {
            let d = positive_feet("propagation.mobile_height_feet", v)?;
            resolved.forward.propagation.mobile_height = d;
            resolved.reverse.propagation.mobile_height = d;
            resolved.note("propagation.mobile_height_feet", v, source);
        }
        if let Some(v) = p.base_height_gain_per_doubling_db {
            resolved.forward.propagation.base_height_gain_per_doubling_db = v;
            resolved.reverse.propagation.base_height_gain_per_doubling_db = v;
            resolved.note("propagation.base_height_gain_per_doubling_db", v, source);
        }
        if let Some(v) = p.mobile_height_gain_per_doubling_db {
            resolved.forward.propagation.mobile_height_gain_per_doubling_db = v;
            resolved.reverse.propagation.mobile_height_gain_per_doubling_db = v;
            resolved.note("propagation.mobile_height_gain_per_doubling_db", v, source);
        }
    }

    if let Some(b) = raw.budget {
        if let Some(v) = b.total_transmit_power_watts {
            resolved.forward.budget.total_transmit_power =
                non_negative_power("budget.total_transmit_power_watts", v * 1000.0)?;
            resolved.note("budget.total_transmit_power_watts", v, source);
        }
        if let Some(v) = b.pilot_fraction {
            resolved.forward.budget.pilot_fraction = v;
            resolved.note("budget.pilot_fraction", v, source);
        }
        if let Some(v) = b.pilot_digital_gain {
            resolved.forward.budget.pilot_digital_gain = v;
            resolved.note("budget.pilot_digital_gain", v, source);
        }
        if let Some(v) = b.traffic_digital_gain {
            resolved.forward.budget.traffic_digital_gain = v;
            resolved.note("budget.traffic_digital_gain", v, source);
        }
        if let Some(v) = b.voice_activity {
            resolved.forward.budget.voice_activity = v;
            resolved.note("budget.voice_activity", v, source);
        }
        if let Some(v) = b.processing_gain {
            resolved.forward.budget.processing_gain = v;
            resolved.note("budget.processing_gain", v, source);
        }
        if let Some(v) = b.base_antenna_gain_net_db {
            resolved.forward.budget.base_antenna_gain_net =
                finite_db("budget.base_antenna_gain_net_db", v)?;
            resolved.note("budget.base_antenna_gain_net_db", v, source);
        }
        if let Some(v) = b.mobile_antenna_gain_net_db {
            resolved.forward.budget.mobile_antenna_gain_net =
                finite_db("budget.mobile_antenna_gain_net_db", v)?;
            resolved.note("budget.mobile_antenna_gain_net_db", v, source);
        }
        if let Some(v) = b.mobile_noise_floor_dbm {
            resolved.forward.budget.mobile_noise_floor = PowerQuantity::from_dbm(v);
            resolved.note("budget.mobile_noise_floor_dbm", v, source);
        }
        if let Some(v) = b.max_traffic_power_threshold_dbm {
            resolved.forward.budget.max_traffic_power_threshold = PowerQuantity::from_dbm(v);
            resolved.note("budget.max_traffic_power_threshold_dbm", v, source);
        }
    }

    if let Some(fw) = raw.forward {
        if let Some(v) = fw.fm_erp_per_channel_watts {
            resolved.forward.fm_erp_per_channel =
                non_negative_power("forward.fm_erp_per_channel_watts", v * 1000.0)?;
            resolved.note("forward.fm_erp_per_channel_watts", v, source);
        }
        if let Some(v) = fw.target_eb_n0_db {
            resolved.forward.target_eb_n0 = finite_db("forward.target_eb_n0_db", v)?;
            resolved.note("forward.target_eb_n0_db", v, source);
        }
        match (fw.other_cell_mode.as_deref(), fw.other_cell_fixed_dbm) {
            (None, None) => {}
            (Some("computed"), None) => {
                resolved.forward.other_cell_cdma_interference = OtherCellInterference::Computed;
                resolved.note("forward.other_cell_mode", "computed", source);
            }
            (Some("fixed"), Some(dbm_value)) => {
                let p = PowerQuantity::from_dbm(dbm_value);
                resolved.forward.other_cell_cdma_interference = OtherCellInterference::Fixed(p);
                resolved.note(
                    "forward.other_cell_mode",
                    format!("fixed ({dbm_value} dBm)"),
                    source,
                );
            }
            (Some("computed"), Some(_)) => {
                return Err(ConfigError::Invalid(vec![
                    "forward.other_cell_fixed_dbm is only meaningful with other_cell_mode = \"fixed\""
                        .to_string(),
                ]));
            }
            (Some("fixed"), None) => {
                return Err(ConfigError::Invalid(vec![
                    "forward.other_cell_mode = \"fixed\" requires forward.other_cell_fixed_dbm"
                        .to_string(),
                ]));
            }
            (Some(other), _) => {
                return Err(ConfigError::Invalid(vec![format!(
                    "forward.other_cell_mode must be \"computed\" or \"fixed\", got {other:?}"
                )]));
            }
            (None, Some(_)) => {
                return Err(ConfigError::Invalid(vec![
                    "forward.other_cell_fixed_dbm requires forward.other_cell_mode = \"fixed\""
                        .to_string(),
                ]));
            }
        }
        if let Some(v) = fw.include_own_cell_interference {
            resolved.forward.include_own_cell_interference = v;
            resolved.note("forward.include_own_cell_interference", v, source);
        }
        if let Some(v) = fw.fm_erp_scales_with_radius {
            resolved.forward.fm_erp_scales_with_radius = v;
            resolved.note("forward.fm_erp_scales_with_radius", v, source);
        }
    }

    if let Some(rv) = raw.reverse {
        if let Some(v) = rv.fm_erp_per_channel_watts {
            resolved.reverse.fm_erp_per_channel =
                non_negative_power("reverse.fm_erp_per_channel_watts", v * 1000.0)?;
            resolved.note("reverse.fm_erp_per_channel_watts", v, source);
        }
        if let Some(v) = rv.cochannel_interferer_count {
            resolved.reverse.cochannel_interferer_count = v;
            resolved.note("reverse.cochannel_interferer_count", v, source);
        }
        if let Some(v) = rv.bandwidth_ratio {
            resolved.reverse.bandwidth_ratio = v;
            resolved.note("reverse.bandwidth_ratio", v, source);
        }
        if let Some(v) = rv.users_per_cell {
            resolved.reverse.users_per_cell = v;
            resolved.note("reverse.users_per_cell", v, source);
        }
        if let Some(v) = rv.voice_activity {
            resolved.reverse.voice_activity = v;
            resolved.note("reverse.voice_activity", v, source);
        }
        if let Some(v) = rv.target_eb_n0_db {
            resolved.reverse.target_reverse_eb_n0 = finite_db("reverse.target_eb_n0_db", v)?;
            resolved.note("reverse.target_eb_n0_db", v, source);
        }
        if let Some(v) = rv.site_noise_floor_dbm {
            resolved.reverse.cdma_site_noise_floor = PowerQuantity::from_dbm(v);
            resolved.note("reverse.site_noise_floor_dbm", v, source);
        }
        if let Some(v) = rv.other_cell_factor {
            resolved.reverse.other_cell_factor = v;
            resolved.note("reverse.other_cell_factor", v, source);
        }
        if let Some(v) = rv.processing_gain {
            resolved.reverse.processing_gain = v;
            resolved.note("reverse.processing_gain", v, source);
        }
        if let Some(v) = rv.site_antenna_gain_net_db {
            resolved.reverse.site_antenna_gain_net =
                finite_db("reverse.site_antenna_gain_net_db", v)?;
            resolved.note("reverse.site_antenna_gain_net_db", v, source);
        }
        if let Some(v) = rv.acceptable_cir_db {
            resolved.reverse.acceptable_cir =
                Decibels::new(v).map_err(|e| ConfigError::Invalid(vec![format!(
                    "reverse.acceptable_cir_db: {e}"
                )]))?;
            resolved.note("reverse.acceptable_cir_db", v, source);
        }
    }

    if let Some(g) = raw.grids {
        if let Some(v) = g.guard_distance_max_miles {
            resolved.grids.guard_distance_max_miles = v;
            resolved.note("grids.guard_distance_max_miles", v, source);
        }
        if let Some(v) = g.guard_distance_step_miles {
            resolved.grids.guard_distance_step_miles = v;
            resolved.note("grids.guard_distance_step_miles", v, source);
        }
        if let Some(v) = g.scan_radii_miles {
            resolved.note("grids.scan_radii_miles", list(&v), source);
            resolved.grids.scan_radii_miles = v;
        }
        if let Some(v) = g.penalty_min_dbm {
            resolved.grids.penalty_min_dbm = v;
            resolved.note("grids.penalty_min_dbm", v, source);
        }
        if let Some(v) = g.penalty_max_dbm {
            resolved.grids.penalty_max_dbm = v;
            resolved.note("grids.penalty_max_dbm", v, source);
        }
        if let Some(v) = g.penalty_step_db {
            resolved.grids.penalty_step_db = v;
            resolved.note("grids.penalty_step_db", v, source);
        }
        if let Some(v) = g.validation_ratios {
            resolved.note("grids.validation_ratios", list(&v), source);
            resolved.grids.validation_ratios = v;
        }
    }

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        file
    }

    #[test]
    fn presets_validate() {
        preset_omni_forward().validate().unwrap();
        preset_sector3_forward().validate().unwrap();
        preset_omni_reverse().validate().unwrap();
        preset_sector3_reverse().validate().unwrap();
        Grids::default().validate().unwrap();
    }

    #[test]
    fn presets_differ_where_the_architecture_differs() {
        let omni = preset_omni_forward();
        let sector = preset_sector3_forward();
        assert_eq!(omni.layout.sectors, 1);
        assert_eq!(sector.layout.sectors, 3);
        assert_eq!(omni.layout.fm_channels_in_cdma_band, 6);
        assert_eq!(sector.layout.fm_channels_in_cdma_band, 2);
        assert_eq!(omni.budget.base_antenna_gain_net.db(), 9.0);
        assert_eq!(sector.budget.base_antenna_gain_net.db(), 12.0);
        assert_eq!(
            preset_omni_reverse().site_antenna_gain_net.db(),
            9.0
        );
        assert_eq!(preset_sector3_reverse().site_antenna_gain_net.db(), 12.0);
    }

    #[test]
    fn resolve_without_a_file_matches_the_preset_constructors() {
        let resolved = resolve(Preset::OmniDefault, None).unwrap();
        assert_eq!(resolved.forward, preset_omni_forward());
        assert_eq!(resolved.reverse, preset_omni_reverse());
        assert_eq!(resolved.grids, Grids::default());
    }

    #[test]
    fn file_overrides_land_and_are_attributed() {
        let file = write_config(
            "[layout]\ncdma_radius_miles = 7.0\n\n[reverse]\nusers_per_cell = 12\n",
        );
        let resolved = resolve(Preset::OmniDefault, Some(file.path())).unwrap();
        assert_eq!(resolved.forward.layout.cdma_radius.miles(), 7.0);
        assert_eq!(resolved.reverse.layout.cdma_radius.miles(), 7.0);
        assert_eq!(resolved.reverse.users_per_cell, 12);
        let prov = resolved.provenance();
        let radius = prov.iter().find(|p| p.field == "layout.cdma_radius_miles").unwrap();
        assert!(radius.source.starts_with("file "));
        let untouched = prov.iter().find(|p| p.field == "budget.pilot_fraction").unwrap();
        assert_eq!(untouched.source, "preset omni-default");
        assert_eq!(untouched.value, "0.16");
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let file = write_config("[layout]\ncdma_radius_mils = 7.0\n");
        let err = resolve(Preset::OmniDefault, Some(file.path())).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cdma_radius_mils"), "{msg}");
        let file = write_config("[laytout]\n");
        let err = resolve(Preset::OmniDefault, Some(file.path())).unwrap_err();
        assert!(err.to_string().contains("laytout"));
    }

    #[test]
    fn invalid_values_name_the_field() {
        let file = write_config("[layout]\ncdma_radius_miles = -3.0\n");
        let err = resolve(Preset::OmniDefault, Some(file.path())).unwrap_err();
        assert!(err.to_string().contains("layout.cdma_radius_miles"));
        let file = write_config("[reverse]\ncochannel_interferer_count = 4\n");
        let err = resolve(Preset::OmniDefault, Some(file.path())).unwrap_err();
        assert!(err.to_string().contains("cochannel_interferer_count"));
    }

    #[test]
    fn fixed_other_cell_mode_requires_a_level() {
        let file = write_config("[forward]\nother_cell_mode = \"fixed\"\n");
        let err = resolve(Preset::OmniDefault, Some(file.path())).unwrap_err();
        assert!(err.to_string().contains("other_cell_fixed_dbm"));

        let file = write_config(
            "[forward]\nother_cell_mode = \"fixed\"\nother_cell_fixed_dbm = -40.0\n",
        );
        let resolved = resolve(Preset::OmniDefault, Some(file.path())).unwrap();
        match resolved.forward.other_cell_cdma_interference {
            OtherCellInterference::Fixed(p) => {
                assert!((p.dbm().unwrap() + 40.0).abs() < 1e-9)
            }
            OtherCellInterference::Computed => panic!("expected fixed mode"),
        }

        let file = write_config("[forward]\nother_cell_fixed_dbm = -40.0\n");
        assert!(resolve(Preset::OmniDefault, Some(file.path())).is_err());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = resolve(
            Preset::OmniDefault,
            Some(Path::new("/definitely/not/here.toml")),
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));
    }

    #[test]
    fn guard_distance_grid_covers_the_whole_span() {
        let g = Grids::default();
        let d = g.guard_distances();
        assert_eq!(d.first().copied(), Some(0.0));
        assert_eq!(d.last().copied(), Some(30.0));
        assert_eq!(d.len(), 121);
        let levels = g.penalty_levels_dbm();
        assert_eq!(levels.first().copied(), Some(-140.0));
        assert_eq!(levels.last().copied(), Some(-90.0));
        assert_eq!(levels.len(), 51);
    }

    #[test]
    fn grid_validation_rejects_nonsense() {
        let g = Grids {
            guard_distance_step_miles: 0.0,
            validation_ratios: vec![0.9],
            ..Grids::default()
        };
        let err = g.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("guard_distance_step_miles"));
        assert!(msg.contains("validation_ratios"));
    }
}
