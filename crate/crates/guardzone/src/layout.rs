//! Hexagonal-lattice geometry for a CDMA overlay embedded in an FM network.
//!
//! The overlay occupies a seven-cell cluster; surrounding FM cells that
//! still use the shared band form a ring just outside the guard zone. All
//! geometry reduces to distances on the plane through the overlay center.

use thiserror::Error;

use crate::units::Distance;

pub const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Tolerance used to merge ring sites whose victim distances agree, in miles.
const RING_GROUP_RESOLUTION_MILES: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("invalid layout: {}", .0.join("; "))]
    InvalidLayout(Vec<String>),
    #[error("overlay extent is only defined for a 7-cell overlay, got {0} cells")]
    UnsupportedOverlay(u32),
}

/// Co-channel reuse distance for a hexagonal layout: sqrt(3K) times the
/// cell radius.
pub fn cochannel_reuse_distance(cell_radius: Distance, reuse_pattern: u32) -> Distance {
    cell_radius * f64::sqrt(3.0 * reuse_pattern as f64)
}

/// Cell dimensions and composition of the mixed CDMA/FM deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub cdma_radius: Distance,
    pub fm_radius: Distance,
    /// 1 for omnidirectional sites, 3 for three-sector sites.
    pub sectors: u32,
    /// FM frequency reuse pattern K.
    pub reuse_pattern: u32,
    /// Number of cells converted to CDMA; the geometry assumes 7.
    pub overlay_cells: u32,
    /// Interfering FM channels that fall inside the CDMA band, per cell for
    /// omni sites or per facing sector for three-sector sites.
    pub fm_channels_in_cdma_band: u32,
}

impl Default for CellLayout {
    fn default() -> Self {
        CellLayout {
            cdma_radius: Distance::from_miles(14.0).unwrap(),
            fm_radius: Distance::from_miles(14.0).unwrap(),
            sectors: 1,
            reuse_pattern: 7,
            overlay_cells: 7,
            fm_channels_in_cdma_band: 2,
        }
    }
}

/// One distance group in the first ring of in-band FM sites: `site_count`
/// sites all at `distance` from the victim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingEntry {
    pub distance: Distance,
    pub site_count: u32,
}

/// First ring of surrounding FM sites, grouped by victim distance and
/// sorted nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfererRing {
    pub entries: Vec<RingEntry>,
}

impl InterfererRing {
    pub fn total_sites(&self) -> u32 {
        self.entries.iter().map(|e| e.site_count).sum()
    }

    pub fn nearest_distance(&self) -> Distance {
        self.entries[0].distance
    }
}

impl CellLayout {
    pub fn validate(&self) -> Result<(), LayoutError> {
        let mut issues = Vec::new();
        if self.cdma_radius.miles() <= 0.0 {
            issues.push(format!(
                "cdma_radius must be positive, got {} miles",
                self.cdma_radius.miles()
            ));
        }
        if self.fm_radius.miles() <= 0.0 {
            issues.push(format!(
                "fm_radius must be positive, got {} miles",
                self.fm_radius.miles()
            ));
        }
        if self.sectors != 1 && self.sectors != 3 {
            issues.push(format!("sectors must be 1 or 3, got {}", self.sectors));
        }
        if self.reuse_pattern == 0 {
            issues.push("reuse_pattern must be a positive integer".to_string());
        }
        if self.overlay_cells == 0 {
            issues.push("overlay_cells must be a positive integer".to_string());
        }
        if self.fm_channels_in_cdma_band == 0 {
            issues.push("fm_channels_in_cdma_band must be a positive integer".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(LayoutError::InvalidLayout(issues))
        }
    }

    /// Co-channel reuse distance for the FM cells of this layout.
    pub fn fm_reuse_distance(&self) -> Distance {
        cochannel_reuse_distance(self.fm_radius, self.reuse_pattern)
    }

    /// One tier of FM cells: the center spacing sqrt(3) times the FM radius.
    pub fn fm_tier(&self) -> Distance {
        self.fm_radius * SQRT_3
    }

    /// Outer radius of the seven-cell CDMA overlay: the center cell's six
    /// neighbors sit at sqrt(3)·R, and their far edges reach one more R.
    pub fn overlay_extent(&self) -> Result<Distance, LayoutError> {
        if self.overlay_cells != 7 {
            return Err(LayoutError::UnsupportedOverlay(self.overlay_cells));
        }
        Ok(self.cdma_radius * (SQRT_3 + 1.0))
    }

    /// First ring of in-band FM sites outside a guard zone of width
    /// `guard_distance`.
    ///
    /// The ring sits one FM radius beyond the guard boundary; the number
    /// of sites is what a hex lattice with center spacing sqrt(3)·r packs
    /// onto that circumference, never fewer than the six immediate
    /// neighbors. With `victim_at_edge` the victim mobile sits on the
    /// overlay boundary on the line toward the nearest site (the worst
    /// case); otherwise it sits at the overlay center.
    pub fn surrounding_fm_ring(
        &self,
        guard_distance: Distance,
        victim_at_edge: bool,
    ) -> Result<InterfererRing, LayoutError> {
        let extent = self.overlay_extent()?.miles();
        let r = self.fm_radius.miles();
        let ring_radius = extent + guard_distance.miles() + r;
        let site_count = ring_site_count(ring_radius, r);
        let victim_radius = if victim_at_edge { extent } else { 0.0 };

        // Group symmetric site pairs whose distances coincide.
        let mut groups: Vec<(i64, f64, u32)> = Vec::new();
        for k in 0..site_count {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / site_count as f64;
            let d2 = ring_radius * ring_radius + victim_radius * victim_radius
                - 2.0 * ring_radius * victim_radius * theta.cos();
            let d = d2.max(0.0).sqrt();
            let key = (d / RING_GROUP_RESOLUTION_MILES).round() as i64;
            match groups.iter_mut().find(|(k0, _, _)| *k0 == key) {
                Some((_, _, count)) => *count += 1,
                None => groups.push((key, d, 1)),
            }
        }
        groups.sort_by(|a, b| a.1.total_cmp(&b.1));
        let entries = groups
            .into_iter()
            .map(|(_, d, count)| RingEntry {
                distance: Distance::from_miles(d).expect("ring distance is finite"),
                site_count: count,
            })
            .collect();
        Ok(InterfererRing { entries })
    }
}

fn ring_site_count(ring_radius: f64, fm_radius: f64) -> u32 {
    let packed = (2.0 * std::f64::consts::PI * ring_radius / (SQRT_3 * fm_radius)).round();
    (packed as u32).max(6)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(m: f64) -> Distance {
        Distance::from_miles(m).unwrap()
    }

    fn layout(cdma: f64, fm: f64) -> CellLayout {
        CellLayout {
            cdma_radius: mi(cdma),
            fm_radius: mi(fm),
            ..CellLayout::default()
        }
    }

    #[test]
    fn reuse_distance_examples() {
        let d = cochannel_reuse_distance(mi(14.0), 7);
        assert!((d.miles() - 64.16).abs() < 0.005);
        let adjacent = cochannel_reuse_distance(mi(1.0), 1);
        assert!((adjacent.miles() - SQRT_3).abs() < 1e-12);
    }

    #[test]
    fn overlay_extent_examples() {
        assert!((layout(14.0, 14.0).overlay_extent().unwrap().miles() - 38.25).abs() < 0.005);
        assert!((layout(1.0, 1.0).overlay_extent().unwrap().miles() - 2.732).abs() < 0.001);
    }

    #[test]
    fn overlay_extent_requires_seven_cells() {
        let mut l = layout(14.0, 14.0);
        l.overlay_cells = 19;
        assert_eq!(
            l.overlay_extent(),
            Err(LayoutError::UnsupportedOverlay(19))
        );
    }

    #[test]
    fn nearest_site_at_zero_guard_is_one_fm_radius() {
        for (cdma, fm) in [(14.0, 14.0), (14.0, 7.0), (14.0, 28.0), (4.0, 2.0)] {
            let ring = layout(cdma, fm)
                .surrounding_fm_ring(Distance::ZERO, true)
                .unwrap();
            assert!(
                (ring.nearest_distance().miles() - fm).abs() < 1e-9,
                "cdma {cdma}, fm {fm}"
            );
        }
    }

    #[test]
    fn ring_counts_grow_as_fm_cells_shrink() {
        let big = layout(14.0, 28.0)
            .surrounding_fm_ring(mi(5.0), true)
            .unwrap();
        let small = layout(14.0, 7.0)
            .surrounding_fm_ring(mi(5.0), true)
            .unwrap();
        assert!(small.total_sites() > big.total_sites());
        // Roughly inversely proportional to the FM radius.
        let ratio = small.total_sites() as f64 / big.total_sites() as f64;
        assert!(ratio > 2.0 && ratio < 8.0, "ratio {ratio}");
    }

    #[test]
    fn ring_has_at_least_six_sites() {
        let ring = layout(1.0, 10.0)
            .surrounding_fm_ring(Distance::ZERO, true)
            .unwrap();
        assert_eq!(ring.total_sites(), 6);
    }

    #[test]
    fn entries_sorted_and_counts_match() {
        let ring = layout(14.0, 14.0).surrounding_fm_ring(mi(7.0), true).unwrap();
        let expected = ring_site_count(38.248711 + 7.0 + 14.0, 14.0);
        assert_eq!(ring.total_sites(), expected);
        for pair in ring.entries.windows(2) {
            assert!(pair[0].distance < pair[1].distance);
        }
        // Opposite-angle sites collapse into shared entries.
        assert!(ring.entries.iter().any(|e| e.site_count == 2));
    }

    #[test]
    fn victim_at_center_sees_one_distance() {
        let ring = layout(14.0, 14.0)
            .surrounding_fm_ring(mi(3.0), false)
            .unwrap();
        assert_eq!(ring.entries.len(), 1);
        assert!((ring.nearest_distance().miles() - (38.2487 + 3.0 + 14.0)).abs() < 0.001);
    }

    #[test]
    fn min_distance_strictly_increases_with_guard_width() {
        let l = layout(14.0, 14.0);
        let mut last = -1.0;
        for step in 0..40 {
            let d = l
                .surrounding_fm_ring(mi(step as f64 * 0.5), true)
                .unwrap()
                .nearest_distance()
                .miles();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn all_distances_at_least_guard_width() {
        let l = layout(14.0, 7.0);
        for guard in [0.0, 1.0, 13.0, 40.0] {
            let ring = l.surrounding_fm_ring(mi(guard), true).unwrap();
            for e in &ring.entries {
                assert!(e.distance.miles() >= guard);
            }
        }
    }

    /// Brute-force check over every ring angle: widening the guard zone by
    /// delta moves each site away by at most delta (the victim stays put
    /// while the whole ring expands radially).
    #[test]
    fn doubling_guard_width_moves_sites_by_at_most_that_much() {
        let l = layout(14.0, 14.0);
        for base in [2.0f64, 5.0, 11.0] {
            let near = l.surrounding_fm_ring(mi(base), true).unwrap();
            let far = l.surrounding_fm_ring(mi(2.0 * base), true).unwrap();
            let extent = l.overlay_extent().unwrap().miles();
            // Compare per angle, not per sorted entry, so counts may differ.
            let worst = worst_angle_shift(extent, base, 2.0 * base, 14.0);
            assert!(worst <= base + 1e-9, "base {base}: worst shift {worst}");
            // The grouped rings respect the same bound on their extremes.
            assert!(
                far.nearest_distance().miles() - near.nearest_distance().miles() <= base + 1e-9
            );
        }
    }

    fn worst_angle_shift(extent: f64, d1: f64, d2: f64, r: f64) -> f64 {
        let ring1 = extent + d1 + r;
        let ring2 = extent + d2 + r;
        let mut worst: f64 = 0.0;
        for k in 0..3600 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 3600.0;
            let d_at = |ring: f64| {
                (ring * ring + extent * extent - 2.0 * ring * extent * theta.cos())
                    .sqrt()
            };
            worst = worst.max(d_at(ring2) - d_at(ring1));
        }
        worst
    }

    #[test]
    fn validation_rejects_bad_compositions() {
        let mut l = layout(14.0, 14.0);
        l.sectors = 2;
        l.fm_channels_in_cdma_band = 0;
        match l.validate().unwrap_err() {
            LayoutError::InvalidLayout(issues) => {
                assert_eq!(issues.len(), 2);
                assert!(issues[0].contains("sectors"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
