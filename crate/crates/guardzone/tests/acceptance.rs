//! Acceptance gate: every release-blocking numerical claim in one place,
//! one test per criterion, each printing a single PASS/FAIL line (visible
//! with `cargo test --test acceptance -- --nocapture`).
//!
//! Tolerances are pinned here, next to the claims they protect, so a
//! change in behavior has to touch this file to pass review.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use guardzone::config::{
    preset_omni_forward, preset_omni_reverse, preset_sector3_forward, preset_sector3_reverse,
    Grids,
};
use guardzone::forward::{external_interference_penalty, ForwardScenario};
use guardzone::reverse::{aggregate_mobile_interference, monte_carlo_interference, ReverseScenario};
use guardzone::solver::GuardZoneResult;
use guardzone::units::{Distance, PowerQuantity};

/// Max traffic channel power, dBm, and its allowed deviation.
const MAX_TRAFFIC_DBM: f64 = 33.42;
const MAX_TRAFFIC_DBM_TOL: f64 = 0.01;
/// Threshold share of total transmit power, percent.
const THRESHOLD_SHARE_PCT: f64 = 6.3;
const THRESHOLD_SHARE_PCT_TOL: f64 = 0.1;
/// Reuse-7 baseline C/I with six tier-1 interferers.
const SIX_INTERFERER_CIR_DB: f64 = 18.66;
const FIVE_INTERFERER_GAIN_DB: f64 = 0.79;
/// Monte Carlo cross-check settings.
const MC_SAMPLES: u64 = 1_000_000;
const MC_SEED: u64 = 0x6A2D_20E5;
const MC_RATIOS: [f64; 6] = [1.2, 1.5, 2.0, 3.0, 5.0, 10.0];
/// Forward guard zone window for the omni 14-mile case, miles.
const OMNI_ZONE_MIN_MILES: f64 = 3.5;
const OMNI_ZONE_MAX_MILES: f64 = 10.5;
/// Expected guard-zone window for the half-radius FM scenarios, FM tiers.
const TIER_WINDOW: (f64, f64) = (0.5, 1.5);

fn mi(value: f64) -> Distance {
    Distance::from_miles(value).unwrap()
}

fn check(failures: &mut Vec<String>, ok: bool, clause: String) {
    if !ok {
        failures.push(clause);
    }
}

/// Prints the one-line verdict and fails the test if any clause failed.
fn verdict(index: u32, title: &str, detail: String, failures: Vec<String>) {
    if failures.is_empty() {
        println!("[acceptance {index}] PASS - {title}: {detail}");
    } else {
        let text = failures.join("; ");
        println!("[acceptance {index}] FAIL - {title}: {text}");
        panic!("acceptance {index} ({title}): {text}");
    }
}

#[test]
fn acceptance_1_link_budget_arithmetic() {
    let budget = preset_omni_forward().budget;
    let mut failures = Vec::new();

    let max_traffic = budget.max_traffic_channel_power();
    let dbm = max_traffic.dbm().unwrap();
    check(
        &mut failures,
        (dbm - MAX_TRAFFIC_DBM).abs() <= MAX_TRAFFIC_DBM_TOL,
        format!("max traffic {dbm:.4} dBm not within {MAX_TRAFFIC_DBM_TOL} dB of {MAX_TRAFFIC_DBM}"),
    );

    let pilot = budget.pilot_power().watts();
    check(
        &mut failures,
        pilot == 4.0,
        format!("pilot power {pilot} W, expected exactly 4"),
    );

    let share = 100.0 * budget.average_traffic_power_fraction(budget.max_traffic_power_threshold);
    check(
        &mut failures,
        (share - THRESHOLD_SHARE_PCT).abs() <= THRESHOLD_SHARE_PCT_TOL,
        format!(
            "threshold share {share:.4} % not within {THRESHOLD_SHARE_PCT_TOL} of {THRESHOLD_SHARE_PCT}"
        ),
    );

    verdict(
        1,
        "link budget arithmetic",
        format!(
            "max traffic {:.4} W = {dbm:.4} dBm, pilot {pilot} W, threshold share {share:.4} %",
            max_traffic.watts()
        ),
        failures,
    );
}

#[test]
fn acceptance_2_reuse7_baseline() {
    let five = preset_omni_reverse();
    let six = ReverseScenario {
        cochannel_interferer_count: 6,
        ..preset_omni_reverse()
    };
    let six_db = six.fm_only_cir().unwrap().db();
    let five_db = five.fm_only_cir().unwrap().db();
    let gain = five_db - six_db;
    let exact_gain = 10.0 * (6.0f64 / 5.0).log10();

    let mut failures = Vec::new();
    check(
        &mut failures,
        (six_db - SIX_INTERFERER_CIR_DB).abs() <= 0.01,
        format!("six-interferer C/I {six_db:.4} dB, expected {SIX_INTERFERER_CIR_DB}"),
    );
    check(
        &mut failures,
        (six_db - 18.0).abs() <= 1.0,
        format!("six-interferer C/I {six_db:.4} dB not within 1 dB of 18"),
    );
    check(
        &mut failures,
        (gain - exact_gain).abs() <= 1e-12 && (gain - FIVE_INTERFERER_GAIN_DB).abs() <= 0.005,
        format!("five-interferer gain {gain:.6} dB, expected {exact_gain:.6}"),
    );

    verdict(
        2,
        "frequency reuse baseline",
        format!("six interferers {six_db:.4} dB, removing one adds {gain:.4} dB"),
        failures,
    );
}

#[test]
fn acceptance_3_disc_closed_form_vs_monte_carlo() {
    let start = Instant::now();
    let scenario = preset_omni_reverse();
    let disc = scenario.layout.overlay_extent().unwrap();
    let users = scenario.overlay_user_count();
    let mobile = scenario.mobile_transmit_power().unwrap();
    let activity = scenario.voice_activity;
    let prop = &scenario.propagation;

    let mut failures = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for (index, &ratio) in MC_RATIOS.iter().enumerate() {
        let d_bar = disc * ratio;
        let closed = aggregate_mobile_interference(d_bar, disc, activity, users, mobile, prop)
            .unwrap()
            .milliwatts();
        let (mean, stderr) = monte_carlo_interference(
            d_bar,
            disc,
            activity,
            users,
            mobile,
            prop,
            MC_SAMPLES,
            MC_SEED.wrapping_add(index as u64),
        )
        .unwrap();
        let err = (mean.milliwatts() - closed).abs();
        let allowed = (3.0 * stderr.milliwatts()).max(0.01 * closed);
        worst_rel = worst_rel.max(err / closed);
        check(
            &mut failures,
            err <= allowed,
            format!(
                "at distance ratio {ratio}: |MC - closed| = {err:.3e} mW exceeds \
                 max(3 stderr, 1%) = {allowed:.3e} mW"
            ),
        );
    }

    // Far-field normalization: the closed form must approach one third of
    // the all-mobiles-at-center value.
    let far = disc * 100.0;
    let closed_far = aggregate_mobile_interference(far, disc, activity, users, mobile, prop)
        .unwrap()
        .milliwatts();
    let kappa = prop.reference_gain()
        * (prop.reference_distance.miles() / disc.miles()).powi(4);
    let center = activity
        * users as f64
        * mobile.milliwatts()
        * kappa
        * (disc.miles() / far.miles()).powi(4);
    let third = closed_far / center;
    check(
        &mut failures,
        (third - 1.0 / 3.0).abs() <= 0.001 / 3.0,
        format!("far-field ratio {third:.6}, expected 1/3 within 0.1%"),
    );

    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, secs <= 60.0, format!("took {secs:.1} s, limit 60"));
    verdict(
        3,
        "closed form vs Monte Carlo",
        format!(
            "worst relative gap {worst_rel:.5} over {} ratios at {MC_SAMPLES} samples, \
             far-field ratio {third:.6} ({secs:.1} s)",
            MC_RATIOS.len()
        ),
        failures,
    );
}

#[test]
fn acceptance_4_external_interference_penalty() {
    let floor = PowerQuantity::from_dbm(-105.0);
    let low = external_interference_penalty(PowerQuantity::from_dbm(-120.0), floor)
        .unwrap()
        .db();
    let equal = external_interference_penalty(floor, floor).unwrap().db();

    let mut failures = Vec::new();
    check(
        &mut failures,
        (low - 0.135).abs() <= 0.001,
        format!("penalty at -120 dBm is {low:.5} dB, expected 0.135 +- 0.001"),
    );
    check(
        &mut failures,
        (equal - 3.01).abs() <= 0.001,
        format!("penalty at the floor is {equal:.5} dB, expected 3.01"),
    );
    verdict(
        4,
        "external interference penalty",
        format!("-120 dBm costs {low:.4} dB, floor-level interference costs {equal:.4} dB"),
        failures,
    );
}

#[test]
fn acceptance_5_forward_guard_zone_omni() {
    let start = Instant::now();
    let zone = preset_omni_forward().forward_guard_zone().unwrap();
    let miles = zone.min_distance.miles();
    let tier = 3f64.sqrt() * 14.0;

    let mut failures = Vec::new();
    check(&mut failures, zone.converged, "search did not converge".into());
    check(
        &mut failures,
        (OMNI_ZONE_MIN_MILES..=OMNI_ZONE_MAX_MILES).contains(&miles),
        format!(
            "guard zone {miles:.4} mi outside [{OMNI_ZONE_MIN_MILES}, {OMNI_ZONE_MAX_MILES}]"
        ),
    );
    check(
        &mut failures,
        miles < tier,
        format!("guard zone {miles:.4} mi not below one FM tier ({tier:.4} mi)"),
    );
    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, secs <= 5.0, format!("took {secs:.1} s, limit 5"));
    verdict(
        5,
        "forward guard zone, omni 14 mi",
        format!("D = {miles:.4} mi = {:.4} FM tiers ({secs:.2} s)", zone.in_fm_tiers),
        failures,
    );
}

fn forward_zone(base: ForwardScenario, cdma_miles: f64, fm_miles: f64) -> GuardZoneResult {
    let mut scenario = base;
    scenario.layout.cdma_radius = mi(cdma_miles);
    scenario.layout.fm_radius = mi(fm_miles);
    scenario.forward_guard_zone().unwrap()
}

fn reverse_zone(base: ReverseScenario, cdma_miles: f64, fm_miles: f64) -> GuardZoneResult {
    let mut scenario = base;
    scenario.layout.cdma_radius = mi(cdma_miles);
    scenario.layout.fm_radius = mi(fm_miles);
    scenario.reverse_guard_zone().unwrap()
}

#[test]
fn acceptance_6_forward_scenario_ordering() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let omni_wide = forward_zone(preset_omni_forward(), 14.0, 28.0);
    check(
        &mut failures,
        omni_wide.converged && omni_wide.min_distance.miles() == 0.0,
        format!(
            "omni with doubled FM radius needs {:.4} mi, expected exactly 0",
            omni_wide.min_distance.miles()
        ),
    );

    for fm in [14.0, 28.0] {
        let zone = forward_zone(preset_sector3_forward(), 14.0, fm);
        check(
            &mut failures,
            zone.converged && zone.min_distance.miles() == 0.0,
            format!(
                "sectored, FM radius {fm} mi, needs {:.4} mi, expected exactly 0",
                zone.min_distance.miles()
            ),
        );
    }

    let sector_half = forward_zone(preset_sector3_forward(), 14.0, 7.0);
    check(
        &mut failures,
        sector_half.converged
            && (TIER_WINDOW.0..=TIER_WINDOW.1).contains(&sector_half.in_fm_tiers),
        format!(
            "sectored, half FM radius: {:.4} FM tiers outside [{}, {}]",
            sector_half.in_fm_tiers, TIER_WINDOW.0, TIER_WINDOW.1
        ),
    );

    for fm in [7.0, 14.0, 28.0] {
        let omni = forward_zone(preset_omni_forward(), 14.0, fm);
        let sector = forward_zone(preset_sector3_forward(), 14.0, fm);
        check(
            &mut failures,
            sector.min_distance.miles() <= omni.min_distance.miles(),
            format!(
                "FM radius {fm} mi: sectored zone {:.4} mi exceeds omni zone {:.4} mi",
                sector.min_distance.miles(),
                omni.min_distance.miles()
            ),
        );
    }

    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, secs <= 30.0, format!("took {secs:.1} s, limit 30"));
    verdict(
        6,
        "forward scenario ordering",
        format!(
            "wide-FM zones are 0, sectored half-radius zone {:.4} tiers, sectored never \
             exceeds omni ({secs:.2} s)",
            sector_half.in_fm_tiers
        ),
        failures,
    );
}

#[test]
fn acceptance_7_reverse_link() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let omni = preset_omni_reverse();
    let cir0 = omni.fm_cell_cir(Distance::ZERO).unwrap().db();
    check(
        &mut failures,
        cir0 > 18.0,
        format!("omni C/I at zero separation {cir0:.4} dB, expected above 18"),
    );
    let omni_zone = reverse_zone(preset_omni_reverse(), 14.0, 14.0);
    check(
        &mut failures,
        omni_zone.converged && omni_zone.min_distance.miles() == 0.0,
        format!(
            "omni reverse zone {:.4} mi, expected 0",
            omni_zone.min_distance.miles()
        ),
    );

    for fm in [7.0, 14.0, 28.0] {
        let zone = reverse_zone(preset_sector3_reverse(), 14.0, fm);
        let mut sector = preset_sector3_reverse();
        sector.layout.cdma_radius = mi(14.0);
        sector.layout.fm_radius = mi(fm);
        let sector_cir0 = sector.fm_cell_cir(Distance::ZERO).unwrap().db();
        check(
            &mut failures,
            (TIER_WINDOW.0..=TIER_WINDOW.1).contains(&zone.in_fm_tiers),
            format!(
                "sectored reverse zone at FM radius {fm} mi is {:.4} FM tiers \
                 (C/I at zero separation {sector_cir0:.4} dB, already above the 17 dB \
                 threshold), outside [{}, {}]",
                zone.in_fm_tiers, TIER_WINDOW.0, TIER_WINDOW.1
            ),
        );

        let omni_same = reverse_zone(preset_omni_reverse(), 14.0, fm);
        check(
            &mut failures,
            zone.min_distance.miles() >= omni_same.min_distance.miles(),
            format!(
                "FM radius {fm} mi: sectored reverse zone {:.4} mi below omni {:.4} mi",
                zone.min_distance.miles(),
                omni_same.min_distance.miles()
            ),
        );
    }

    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, secs <= 30.0, format!("took {secs:.1} s, limit 30"));
    verdict(
        7,
        "reverse link",
        format!("omni C/I(0) = {cir0:.4} dB, omni reverse zone 0 mi ({secs:.2} s)"),
        failures,
    );
}

fn run_cli(out: &Path, args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_guardzone"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "cli {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        files.insert(
            entry.file_name().into_string().unwrap(),
            std::fs::read(entry.path()).unwrap(),
        );
    }
    files
}

#[test]
fn acceptance_8_monotonicity_and_determinism() {
    let start = Instant::now();
    let mut failures = Vec::new();

    // Required forward power falls strictly as the guard zone widens.
    let grid = Grids::default().guard_distances();
    let curve = preset_omni_forward().forward_power_curve(&grid).unwrap();
    let strictly_down = curve.windows(2).all(|w| w[1].1 < w[0].1);
    check(
        &mut failures,
        strictly_down,
        "required forward power is not strictly decreasing in guard distance".into(),
    );

    // Guard zones grow with the CDMA radius at a fixed radius ratio.
    let mut last = -1.0;
    let mut zones = Vec::new();
    for radius in [1.0, 2.0, 4.0, 8.0, 14.0] {
        let zone = forward_zone(preset_omni_forward(), radius, radius);
        check(
            &mut failures,
            zone.min_distance.miles() >= last,
            format!(
                "guard zone shrank from {last:.4} to {:.4} mi at radius {radius} mi",
                zone.min_distance.miles()
            ),
        );
        last = zone.min_distance.miles();
        zones.push(format!("{:.2}", last));
    }

    // Victim C/I only improves with separation and tends to the
    // five-interferer FM-only ceiling.
    let omni = preset_omni_reverse();
    let cir = omni.cir_degradation_curve(&grid).unwrap();
    let non_decreasing = cir.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
    check(
        &mut failures,
        non_decreasing,
        "victim C/I is not non-decreasing in guard distance".into(),
    );
    let limit = omni.fm_cell_cir(mi(1.0e5)).unwrap().db();
    let ceiling = omni.fm_only_cir().unwrap().db();
    check(
        &mut failures,
        (limit - ceiling).abs() <= 1e-6,
        format!("C/I limit {limit:.6} dB differs from FM-only ceiling {ceiling:.6} dB"),
    );

    // Byte-identical reruns of the CLI, seed included.
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [dir_a.path(), dir_b.path()] {
        run_cli(dir, &["budget"]);
        run_cli(dir, &["forward-curve"]);
        run_cli(dir, &["validate-disc", "--seed", "7", "--samples", "20000"]);
    }
    let a = dir_bytes(dir_a.path());
    let b = dir_bytes(dir_b.path());
    check(
        &mut failures,
        a.keys().eq(b.keys()),
        format!("output file sets differ: {:?} vs {:?}", a.keys(), b.keys()),
    );
    for (name, bytes) in &a {
        check(
            &mut failures,
            b.get(name) == Some(bytes),
            format!("rerun changed the bytes of {name}"),
        );
    }

    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, secs <= 60.0, format!("took {secs:.1} s, limit 60"));
    verdict(
        8,
        "monotonicity and determinism",
        format!(
            "power curve strictly falls, zones grow with radius ({} mi), C/I rises to its \
             ceiling, reruns byte-identical ({secs:.1} s)",
            zones.join(" / ")
        ),
        failures,
    );
}
