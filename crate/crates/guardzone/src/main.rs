//! Command-line front end: resolves a scenario, runs one analysis, and
//! writes machine-readable CSV series plus a `report.txt` summary.
//!
//! Exit codes: 0 on success, 1 on any configuration or computation error,
//! 2 when a guard-zone search fails to converge (the search trace is
//! written out for inspection before exiting).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use guardzone::config::{resolve, Preset, ResolvedConfig};
use guardzone::forward::external_interference_penalty;
use guardzone::report::{write_csv, write_text};
use guardzone::reverse::{aggregate_mobile_interference, monte_carlo_interference};
use guardzone::solver::GuardZoneResult;
use guardzone::units::{Distance, PowerQuantity};

/// FM-to-CDMA radius ratios covered by the guard-zone scan commands.
const RADIUS_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Parser)]
#[command(
    name = "guardzone",
    version,
    about = "Guard zones and interference levels for a CDMA overlay sharing \
             spectrum with an FM cellular network"
)]
struct Cli {
    /// Built-in scenario to start from.
    #[arg(long, value_enum, default_value_t = Preset::OmniDefault, global = true)]
    preset: Preset,

    /// TOML file overriding preset values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for output files.
    #[arg(long, default_value = ".", global = true)]
    out: PathBuf,

    /// Print every resolved setting and the layer it came from.
    #[arg(long, global = true)]
    explain: bool,

    /// RNG seed; required by Monte Carlo subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo draws per grid point; required by Monte Carlo
    /// subcommands.
    #[arg(long, global = true)]
    samples: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the forward link budget breakdown and write report.txt.
    Budget,
    /// Write required forward traffic power versus guard distance
    /// (forward_power_curve.csv).
    ForwardCurve {
        /// Also write the surrounding FM ring composition per guard
        /// distance (fm_ring.csv).
        #[arg(long)]
        dump_ring: bool,
    },
    /// Solve the forward guard zone for every scanned CDMA radius at FM
    /// radius ratios 0.5, 1, and 2 (forward_guard_zones.csv).
    ForwardGuardzone,
    /// Write the victim FM site's carrier-to-interference ratio versus
    /// guard distance (reverse_cir_curve.csv).
    ReverseCir {
        /// Also write the surrounding FM ring composition per guard
        /// distance (fm_ring.csv).
        #[arg(long)]
        dump_ring: bool,
    },
    /// Solve the reverse guard zone for every scanned CDMA radius at FM
    /// radius ratios 0.5, 1, and 2 (reverse_guard_zones.csv).
    ReverseGuardzone,
    /// Write the receiver noise-floor rise versus external interference
    /// level (external_penalty.csv).
    ExternalPenalty,
    /// Cross-check the closed-form mobile-disc interference against a
    /// Monte Carlo estimate (disc_crosscheck.csv); needs --seed and
    /// --samples.
    ValidateDisc,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let resolved = resolve(cli.preset, cli.config.as_deref())?;
    if cli.explain {
        print_provenance(&resolved);
    }
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output directory {}", cli.out.display()))?;

    let preset = cli.preset;
    match cli.command {
        Command::Budget => budget(&resolved, &cli.out, preset),
        Command::ForwardCurve { dump_ring } => forward_curve(&resolved, &cli.out, preset, dump_ring),
        Command::ForwardGuardzone => forward_guardzone(&resolved, &cli.out, preset),
        Command::ReverseCir { dump_ring } => reverse_cir(&resolved, &cli.out, preset, dump_ring),
        Command::ReverseGuardzone => reverse_guardzone(&resolved, &cli.out, preset),
        Command::ExternalPenalty => external_penalty(&resolved, &cli.out, preset),
        Command::ValidateDisc => {
            let seed = cli.seed.context("validate-disc requires --seed")?;
            let samples = cli.samples.context("validate-disc requires --samples")?;
            validate_disc(&resolved, &cli.out, preset, seed, samples)
        }
    }
}

/// Prints to stdout, swallowing broken-pipe errors so that piping into
/// `head` does not abort the run.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn print_provenance(resolved: &ResolvedConfig) {
    emit("resolved settings:");
    for entry in resolved.provenance() {
        emit(&format!(
            "  {:<42} = {:<24} [{}]",
            entry.field, entry.value, entry.source
        ));
    }
}

fn dbm_text(power: PowerQuantity) -> String {
    match power.dbm() {
        Ok(dbm) => format!("{dbm:.6} dBm"),
        Err(_) => "no dBm value".to_string(),
    }
}

fn bool_cell(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

fn write_report(out: &Path, lines: &[String]) -> anyhow::Result<()> {
    write_text(&out.join("report.txt"), &lines.join("\n"))?;
    Ok(())
}

fn budget(resolved: &ResolvedConfig, out: &Path, preset: Preset) -> anyhow::Result<ExitCode> {
    let b = &resolved.forward.budget;
    let max_traffic = b.max_traffic_channel_power();
    let mut lines = vec![
        format!("forward link budget ({preset})"),
        format!(
            "  total transmit power        {:.6} W ({})",
            b.total_transmit_power.watts(),
            dbm_text(b.total_transmit_power)
        ),
        format!(
            "  pilot power                 {:.6} W ({})",
            b.pilot_power().watts(),
            dbm_text(b.pilot_power())
        ),
        format!(
            "  max traffic channel power   {:.6} W ({})",
            max_traffic.watts(),
            dbm_text(max_traffic)
        ),
        format!(
            "  traffic power threshold     {:.6} W ({})",
            b.max_traffic_power_threshold.watts(),
            dbm_text(b.max_traffic_power_threshold)
        ),
        format!(
            "  max traffic share of total  {:.4} %",
            100.0 * b.average_traffic_power_fraction(max_traffic)
        ),
        format!(
            "  threshold share of total    {:.4} %",
            100.0 * b.average_traffic_power_fraction(b.max_traffic_power_threshold)
        ),
        format!("  processing gain             {:.1}", b.processing_gain),
        format!(
            "  forward target Eb/N0        {:.2} dB",
            resolved.forward.target_eb_n0.db()
        ),
    ];
    for warning in b.warnings() {
        lines.push(format!("  warning: {warning}"));
    }
    emit(&lines.join("\n"));
    write_report(out, &lines)?;
    Ok(ExitCode::SUCCESS)
}

fn dump_ring_csv(resolved: &ResolvedConfig, out: &Path) -> anyhow::Result<()> {
    let layout = &resolved.forward.layout;
    let mut rows = Vec::new();
    for d in resolved.grids.guard_distances() {
        let ring = layout.surrounding_fm_ring(Distance::from_miles(d)?, true)?;
        for entry in &ring.entries {
            rows.push(vec![d, entry.distance.miles(), entry.site_count as f64]);
        }
    }
    write_csv(
        &out.join("fm_ring.csv"),
        &["guard_distance_miles", "site_distance_miles", "site_count"],
        &rows,
    )?;
    Ok(())
}

fn forward_curve(
    resolved: &ResolvedConfig,
    out: &Path,
    preset: Preset,
    dump_ring: bool,
) -> anyhow::Result<ExitCode> {
    let grid = resolved.grids.guard_distances();
    let curve = resolved.forward.forward_power_curve(&grid)?;
    let rows: Vec<Vec<f64>> = curve.iter().map(|&(d, p)| vec![d, p]).collect();
    write_csv(
        &out.join("forward_power_curve.csv"),
        &["guard_distance_miles", "required_traffic_power_dbm"],
        &rows,
    )?;

    let threshold = resolved.forward.budget.max_traffic_power_threshold;
    let mut lines = vec![
        format!("forward required power curve ({preset})"),
        format!(
            "  at zero separation          {:.4} dBm",
            curve.first().map(|p| p.1).unwrap_or(f64::NAN)
        ),
        format!(
            "  at {:.2} miles              {:.4} dBm",
            curve.last().map(|p| p.0).unwrap_or(f64::NAN),
            curve.last().map(|p| p.1).unwrap_or(f64::NAN)
        ),
    ];
    if let Ok(threshold_dbm) = threshold.dbm() {
        match curve.iter().find(|&&(_, p)| p <= threshold_dbm) {
            Some(&(d, _)) => lines.push(format!(
                "  meets the {threshold_dbm:.2} dBm threshold from {d:.2} miles"
            )),
            None => lines.push(format!(
                "  stays above the {threshold_dbm:.2} dBm threshold on this grid"
            )),
        }
    }
    write_report(out, &lines)?;

    if dump_ring {
        dump_ring_csv(resolved, out)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// One solved scan row: radii in miles, solved zone, and for the reverse
/// direction the zero-separation C/I in dB.
struct ScanRow {
    cdma_radius: f64,
    fm_radius: f64,
    zone: GuardZoneResult,
    cir_at_zero_db: Option<f64>,
}

/// Writes the scan CSV and report; on a non-converged search also writes
/// the trace and reports exit code 2.
fn finish_scan(
    out: &Path,
    file: &str,
    title: String,
    rows: Vec<ScanRow>,
) -> anyhow::Result<ExitCode> {
    let with_cir = rows.iter().any(|row| row.cir_at_zero_db.is_some());
    let mut headers = vec![
        "cdma_radius_miles",
        "fm_radius_miles",
        "fm_to_cdma_radius_ratio",
        "guard_zone_miles",
        "guard_zone_fm_tiers",
        "converged",
    ];
    if with_cir {
        headers.push("cir_at_zero_separation_db");
    }

    let mut cells = Vec::new();
    let mut lines = vec![title];
    for row in &rows {
        let mut cell = vec![
            row.cdma_radius,
            row.fm_radius,
            row.fm_radius / row.cdma_radius,
            row.zone.min_distance.miles(),
            row.zone.in_fm_tiers,
            bool_cell(row.zone.converged),
        ];
        if let Some(cir) = row.cir_at_zero_db {
            cell.push(cir);
        }
        cells.push(cell);
        lines.push(format!(
            "  R {:>5.2} mi, r {:>5.2} mi: D = {:>8.4} mi ({:.4} FM tiers){}",
            row.cdma_radius,
            row.fm_radius,
            row.zone.min_distance.miles(),
            row.zone.in_fm_tiers,
            if row.zone.converged {
                String::new()
            } else {
                "  [not converged]".to_string()
            },
        ));
    }
    let failed = rows.iter().find(|row| !row.zone.converged);
    lines.push(match failed {
        None => "  all searches converged".to_string(),
        Some(row) => format!(
            "  search did not converge at R {:.2} mi, r {:.2} mi",
            row.cdma_radius, row.fm_radius
        ),
    });

    write_csv(&out.join(file), &headers, &cells)?;
    write_report(out, &lines)?;

    if let Some(row) = failed {
        let trace_path = out.join("guard_zone_trace.csv");
        let trace_rows: Vec<Vec<f64>> = row
            .zone
            .trace
            .iter()
            .map(|p| vec![p.distance_miles, p.objective])
            .collect();
        write_csv(&trace_path, &["guard_distance_miles", "objective"], &trace_rows)?;
        eprintln!(
            "guard-zone search did not converge at CDMA radius {} miles, FM radius {} miles; \
             search trace written to {}",
            row.cdma_radius,
            row.fm_radius,
            trace_path.display()
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn forward_guardzone(
    resolved: &ResolvedConfig,
    out: &Path,
    preset: Preset,
) -> anyhow::Result<ExitCode> {
    let mut rows = Vec::new();
    for &radius in &resolved.grids.scan_radii_miles {
        for ratio in RADIUS_RATIOS {
            let mut scenario = resolved.forward.clone();
            scenario.layout.cdma_radius = Distance::from_miles(radius)?;
            scenario.layout.fm_radius = Distance::from_miles(radius * ratio)?;
            let zone = scenario.forward_guard_zone()?;
            rows.push(ScanRow {
                cdma_radius: radius,
                fm_radius: radius * ratio,
                zone,
                cir_at_zero_db: None,
            });
        }
    }
    finish_scan(
        out,
        "forward_guard_zones.csv",
        format!("forward guard zones ({preset})"),
        rows,
    )
}

fn reverse_cir(
    resolved: &ResolvedConfig,
    out: &Path,
    preset: Preset,
    dump_ring: bool,
) -> anyhow::Result<ExitCode> {
    let grid = resolved.grids.guard_distances();
    let curve = resolved.reverse.cir_degradation_curve(&grid)?;
    let rows: Vec<Vec<f64>> = curve.iter().map(|&(d, cir)| vec![d, cir]).collect();
    write_csv(
        &out.join("reverse_cir_curve.csv"),
        &["guard_distance_miles", "cir_db"],
        &rows,
    )?;

    let lines = vec![
        format!("FM site carrier-to-interference ratio ({preset})"),
        format!(
            "  at zero separation          {:.4} dB",
            curve.first().map(|p| p.1).unwrap_or(f64::NAN)
        ),
        format!(
            "  at {:.2} miles              {:.4} dB",
            curve.last().map(|p| p.0).unwrap_or(f64::NAN),
            curve.last().map(|p| p.1).unwrap_or(f64::NAN)
        ),
        format!(
            "  FM-only ceiling             {:.4} dB",
            resolved.reverse.fm_only_cir()?.db()
        ),
        format!(
            "  acceptance threshold        {:.2} dB",
            resolved.reverse.acceptable_cir.db()
        ),
    ];
    write_report(out, &lines)?;

    if dump_ring {
        dump_ring_csv(resolved, out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn reverse_guardzone(
    resolved: &ResolvedConfig,
    out: &Path,
    preset: Preset,
) -> anyhow::Result<ExitCode> {
    let mut rows = Vec::new();
    for &radius in &resolved.grids.scan_radii_miles {
        for ratio in RADIUS_RATIOS {
            let mut scenario = resolved.reverse.clone();
            scenario.layout.cdma_radius = Distance::from_miles(radius)?;
            scenario.layout.fm_radius = Distance::from_miles(radius * ratio)?;
            let zone = scenario.reverse_guard_zone()?;
            let cir0 = scenario.fm_cell_cir(Distance::ZERO)?.db();
            rows.push(ScanRow {
                cdma_radius: radius,
                fm_radius: radius * ratio,
                zone,
                cir_at_zero_db: Some(cir0),
            });
        }
    }
    finish_scan(
        out,
        "reverse_guard_zones.csv",
        format!("reverse guard zones ({preset})"),
        rows,
    )
}

fn external_penalty(
    resolved: &ResolvedConfig,
    out: &Path,
    preset: Preset,
) -> anyhow::Result<ExitCode> {
    let floor = resolved.forward.budget.mobile_noise_floor;
    let mut rows = Vec::new();
    for level_dbm in resolved.grids.penalty_levels_dbm() {
        let external = PowerQuantity::from_dbm(level_dbm);
        let penalty = external_interference_penalty(external, floor)?;
        rows.push(vec![level_dbm, penalty.db()]);
    }
    write_csv(
        &out.join("external_penalty.csv"),
        &["external_interference_dbm", "noise_rise_db"],
        &rows,
    )?;
    let lines = vec![
        format!("external interference penalty ({preset})"),
        format!("  receiver noise floor        {}", dbm_text(floor)),
        format!(
            "  at {:.1} dBm              {:.4} dB rise",
            rows.first().map(|r| r[0]).unwrap_or(f64::NAN),
            rows.first().map(|r| r[1]).unwrap_or(f64::NAN)
        ),
        format!(
            "  at {:.1} dBm               {:.4} dB rise",
            rows.last().map(|r| r[0]).unwrap_or(f64::NAN),
            rows.last().map(|r| r[1]).unwrap_or(f64::NAN)
        ),
    ];
    write_report(out, &lines)?;
    Ok(ExitCode::SUCCESS)
}

fn validate_disc(
    resolved: &ResolvedConfig,
    out: &Path,
    preset: Preset,
    seed: u64,
    samples: u64,
) -> anyhow::Result<ExitCode> {
    let scenario = &resolved.reverse;
    let disc = scenario.layout.overlay_extent()?;
    let users = scenario.overlay_user_count();
    let mobile = scenario.mobile_transmit_power()?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (index, &ratio) in resolved.grids.validation_ratios.iter().enumerate() {
        let d_bar = disc * ratio;
        let closed = aggregate_mobile_interference(
            d_bar,
            disc,
            scenario.voice_activity,
            users,
            mobile,
            &scenario.propagation,
        )?
        .milliwatts();
        let (mean, stderr) = monte_carlo_interference(
            d_bar,
            disc,
            scenario.voice_activity,
            users,
            mobile,
            &scenario.propagation,
            samples,
            seed.wrapping_add(index as u64),
        )?;
        let rel = (mean.milliwatts() - closed) / closed;
        worst = worst.max(rel.abs());
        rows.push(vec![
            ratio,
            closed,
            mean.milliwatts(),
            stderr.milliwatts(),
            rel,
        ]);
    }
    write_csv(
        &out.join("disc_crosscheck.csv"),
        &[
            "victim_distance_over_disc_radius",
            "closed_form_mw",
            "monte_carlo_mw",
            "monte_carlo_stderr_mw",
            "relative_error",
        ],
        &rows,
    )?;
    let lines = vec![
        format!("closed form versus Monte Carlo ({preset})"),
        format!("  seed                        {seed}"),
        format!("  samples per point           {samples}"),
        format!("  grid points                 {}", rows.len()),
        format!("  worst |relative error|      {worst:.6}"),
    ];
    write_report(out, &lines)?;
    Ok(ExitCode::SUCCESS)
}
