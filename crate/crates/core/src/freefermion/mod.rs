//! Quadratic Majorana Hamiltonians `(i/2) sum A_kl c_k c_l` for fixed link variables.

mod scan;
mod twist;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use scan::{decay_summary, gap_scan, vortex_gap, DecaySummary, GapRow, ScanPreset, GAP_SCAN_MAX_CELLS};
pub use twist::{twist_energy_shift, TransferOptions};

use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::gauge::{enumerate_sectors_limited, GaugeConfig, SectorSolver, VortexSector, SWEEP_CYCLE_LIMIT};
use crate::lattice::Ladder;
use crate::linalg;

/// Largest mode count `many_body_spectrum` will expand.
pub const MANY_BODY_MODE_LIMIT: usize = 24;
/// Absolute tolerance for comparing ground energies of order-one couplings.
pub const ENERGY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SkewAdjacency {
    pub a: Mat<f64>,
}

impl SkewAdjacency {
    pub fn zeros(n: usize) -> Self {
        SkewAdjacency { a: Mat::zeros(n, n) }
    }

    /// Sets `A_ij = v` and `A_ji = -v` (0-based indices).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[(i, j)] = v;
        self.a[(j, i)] = -v;
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0f64, |m, (i, j)| m.max(self.a[(i, j)].abs()))
    }
}

pub fn assemble_skew(ladder: &Ladder, j: &CouplingConfig, g: &GaugeConfig) -> SkewAdjacency {
    let mut a = SkewAdjacency::zeros(ladder.n_sites());
    for ((b, &jv), &u) in ladder.bonds.iter().zip(&j.j).zip(&g.u) {
        a.set(b.i - 1, b.j - 1, jv * f64::from(u));
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeSpectrum {
    /// Nonincreasing, nonnegative.
    pub eps: Vec<f64>,
}

pub fn mode_spectrum(a: &SkewAdjacency) -> Result<ModeSpectrum> {
    let n = a.dim();
    if n % 2 == 1 {
        return Err(Error::MalformedMatrix(format!("odd dimension {n}")));
    }
    let scale = a.max_abs().max(1.0);
    for i in 0..n {
        for k in 0..=i {
            if (a.a[(i, k)] + a.a[(k, i)]).abs() > 1e-12 * scale {
                return Err(Error::MalformedMatrix(format!("not antisymmetric at ({i},{k})")));
            }
        }
    }
    if n == 0 {
        return Ok(ModeSpectrum { eps: Vec::new() });
    }
    let s = match linalg::singular_values(&a.a) {
        Ok(s) => s,
        // iA is Hermitian with eigenvalues +-s.
        Err(_) => {
            let ia = Mat::from_fn(n, n, |i, k| Complex64::new(0.0, a.a[(i, k)]));
            let mut s: Vec<f64> = linalg::herm_eigenvalues(&ia)?.into_iter().map(f64::abs).collect();
            s.sort_by(|x, y| y.total_cmp(x));
            s
        }
    };
    let mut eps = Vec::with_capacity(n / 2);
    for pair in s.chunks(2) {
        let (x, y) = (pair[0], pair[1]);
        if (x - y).abs() > 1e-8 * x.max(1.0) {
            return Err(Error::MalformedMatrix(format!("singular values {x} and {y} do not pair")));
        }
        eps.push(0.5 * (x + y));
    }
    Ok(ModeSpectrum { eps })
}

pub fn ground_energy(m: &ModeSpectrum) -> f64 {
    -m.eps.iter().sum::<f64>()
}

/// All `sum_k s_k eps_k`, ascending, with multiplicity.
pub fn many_body_spectrum(m: &ModeSpectrum) -> Result<Vec<f64>> {
    if m.eps.len() > MANY_BODY_MODE_LIMIT {
        return Err(Error::Guard(format!("{} modes exceed the expansion limit {MANY_BODY_MODE_LIMIT}", m.eps.len())));
    }
    let mut levels = vec![0.0];
    for &e in &m.eps {
        let mut next = Vec::with_capacity(2 * levels.len());
        next.extend(levels.iter().map(|v| v - e));
        next.extend(levels.iter().map(|v| v + e));
        levels = next;
    }
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

/// Ground energy of the representative gauge of a sector.
pub fn sector_energy(ladder: &Ladder, j: &CouplingConfig, v: &VortexSector) -> Result<f64> {
    let g = crate::gauge::gauge_for_sector(ladder, v)?;
    Ok(ground_energy(&mode_spectrum(&assemble_skew(ladder, j, &g))?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub sector_id: u64,
    pub values: Vec<i8>,
    pub ground_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub cycle_ids: Vec<String>,
    /// Ascending energy, ties by sector id.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn min_energy(&self) -> f64 {
        self.rows.first().map_or(f64::NAN, |r| r.ground_energy)
    }

    /// Rows within `tol` of the minimum, in table order.
    pub fn argmin(&self, tol: f64) -> &[SweepRow] {
        let min = self.min_energy();
        let end = self.rows.iter().position(|r| r.ground_energy > min + tol).unwrap_or(self.rows.len());
        &self.rows[..end]
    }
}

pub fn sector_sweep(ladder: &Ladder, j: &CouplingConfig) -> Result<SweepTable> {
    sector_sweep_limited(ladder, j, SWEEP_CYCLE_LIMIT)
}

pub fn sector_sweep_limited(ladder: &Ladder, j: &CouplingConfig, limit: usize) -> Result<SweepTable> {
    j.check(ladder)?;
    let count = enumerate_sectors_limited(ladder, limit)?.len() as u64;
    let solver = SectorSolver::new(ladder);
    let mut rows = (0..count)
        .into_par_iter()
        .map(|id| {
            let v = VortexSector::from_id(ladder, id);
            let g = solver.gauge(ladder, &v);
            let e = ground_energy(&mode_spectrum(&assemble_skew(ladder, j, &g))?);
            Ok(SweepRow { sector_id: id, values: v.values, ground_energy: e })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.ground_energy.total_cmp(&b.ground_energy).then(a.sector_id.cmp(&b.sector_id)));
    Ok(SweepTable { cycle_ids: ladder.cycle_ids().iter().map(|s| s.to_string()).collect(), rows })
}

/// Union over all sectors of the many-body spectra, one entry per sector.
pub fn sector_spectra(ladder: &Ladder, j: &CouplingConfig) -> Result<Vec<(VortexSector, Vec<f64>)>> {
    j.check(ladder)?;
    let count = enumerate_sectors_limited(ladder, SWEEP_CYCLE_LIMIT)?.len() as u64;
    let solver = SectorSolver::new(ladder);
    (0..count)
        .into_par_iter()
        .map(|id| {
            let v = VortexSector::from_id(ladder, id);
            let g = solver.gauge(ladder, &v);
            let levels = many_body_spectrum(&mode_spectrum(&assemble_skew(ladder, j, &g))?)?;
            Ok((v, levels))
        })
        .collect()
}

fn require_closed(ladder: &Ladder) -> Result<()> {
    if !ladder.is_closed() {
        return Err(Error::InvalidInput("big-loop gaps need a closed ladder".into()));
    }
    Ok(())
}

/// `E(pattern) - E(vortex-free)` from two dense mode spectra.
///
/// Roundoff limits this to gaps well above 1e-13 times the total energy.
pub fn big_loop_gap(ladder: &Ladder, j: &CouplingConfig, pattern: &VortexSector) -> Result<f64> {
    require_closed(ladder)?;
    pattern.check(ladder)?;
    let vf = VortexSector::vortex_free(ladder);
    Ok(sector_energy(ladder, j, pattern)? - sector_energy(ladder, j, &vf)?)
}

/// Same quantity as [`big_loop_gap`], resolving the big-loop part exactly.
///
/// The pattern is split into its local plaquette part, handled densely, and
/// the big-loop flip, which equals flipping both closing links and is
/// evaluated as a twist of the transfer matrix around the ring.
pub fn big_loop_gap_transfer(
    ladder: &Ladder,
    j: &CouplingConfig,
    pattern: &VortexSector,
    options: &TransferOptions,
) -> Result<f64> {
    require_closed(ladder)?;
    pattern.check(ladder)?;
    let big = ladder.cycle_index("big").expect("closed ladders have a big loop");
    let mut local = pattern.clone();
    local.values[big] = 1;
    let vf = VortexSector::vortex_free(ladder);
    let local_gap =
        if local == vf { 0.0 } else { sector_energy(ladder, j, &local)? - sector_energy(ladder, j, &vf)? };
    if pattern.values[big] == 1 {
        return Ok(local_gap);
    }
    let g = crate::gauge::gauge_for_sector(ladder, &local)?;
    let a = assemble_skew(ladder, j, &g);
    Ok(local_gap + twist_energy_shift(&a, options)?)
}
