//! Vortex gaps across ladder sizes.

use rayon::prelude::*;
use serde::Serialize;

use super::{big_loop_gap_transfer, sector_energy, TransferOptions};
use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::gauge::VortexSector;
use crate::lattice::{build_ladder, Boundary, Ladder, LadderSpec};
use crate::presets::{make_couplings, PresetName};

pub const GAP_SCAN_MAX_CELLS: usize = 100;

/// `E(pattern) - E(vortex-free)`; closed ladders go through the transfer route.
pub fn vortex_gap(ladder: &Ladder, j: &CouplingConfig, pattern: &VortexSector) -> Result<f64> {
    pattern.check(ladder)?;
    let vf = VortexSector::vortex_free(ladder);
    if *pattern == vf {
        return Ok(0.0);
    }
    if ladder.is_closed() {
        big_loop_gap_transfer(ladder, j, pattern, &TransferOptions::default())
    } else {
        Ok(sector_energy(ladder, j, pattern)? - sector_energy(ladder, j, &vf)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub pattern: String,
    pub delta_e: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanPreset {
    pub preset: PresetName,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

/// Gaps for every N in `n_lo..=n_hi` and every pattern, ordered by N then pattern order.
pub fn gap_scan(boundary: Boundary, preset: ScanPreset, n_lo: usize, n_hi: usize, patterns: &[String]) -> Result<Vec<GapRow>> {
    if n_hi > GAP_SCAN_MAX_CELLS {
        return Err(Error::Guard(format!("N = {n_hi} exceeds the scan limit of {GAP_SCAN_MAX_CELLS}")));
    }
    if n_lo > n_hi {
        return Err(Error::InvalidInput(format!("empty range {n_lo}..={n_hi}")));
    }
    let per_n: Vec<Vec<GapRow>> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let ladder = build_ladder(LadderSpec::new(n, boundary)?)?;
            let j = make_couplings(&ladder, preset.preset, preset.jx, preset.jy, preset.jz)?;
            patterns
                .iter()
                .map(|p| {
                    let v = VortexSector::from_pattern(&ladder, p)?;
                    Ok(GapRow { n, pattern: p.clone(), delta_e: vortex_gap(&ladder, &j, &v)? })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySummary {
    pub pattern: String,
    pub strictly_decreasing: bool,
    pub fit_from_n: usize,
    /// Least-squares fit of ln(gap) against N.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn decay_summary(rows: &[GapRow], pattern: &str, fit_from_n: usize) -> Option<DecaySummary> {
    let series: Vec<(usize, f64)> = rows.iter().filter(|r| r.pattern == pattern).map(|r| (r.n, r.delta_e)).collect();
    let strictly_decreasing = series.windows(2).all(|w| w[1].1 < w[0].1);
    let pts: Vec<(f64, f64)> =
        series.iter().filter(|&&(n, g)| n >= fit_from_n && g > 0.0).map(|&(n, g)| (n as f64, g.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(DecaySummary { pattern: pattern.to_string(), strictly_decreasing, fit_from_n, slope, intercept: my - slope * mx, r_squared })
}
