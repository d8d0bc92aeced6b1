//! Effective Hamiltonians for strong uniform x bonds and the resulting single-vortex gaps.
//!
//! Site labels follow the chain form of the ladder: z bonds (2j-1, 2j), y
//! bonds (2j-1, 2j+2), x bonds (2j, 2j+1); plaquette p_k has sites 2k-1..2k+2.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::lattice::{BondType, Ladder};
use crate::spin_ed::{build_spin_hamiltonian, vortex_operators, SymmetrySectors};

pub const RATIO_GUARD: f64 = 0.1;
pub const PERTURBATION_SPIN_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSplit {
    pub jx: f64,
    pub jy: BTreeMap<(usize, usize), f64>,
    pub jz: BTreeMap<(usize, usize), f64>,
}

impl PerturbationSplit {
    pub fn uniform(ladder: &Ladder, jx: f64, ty: f64, tz: f64) -> Self {
        let pick = |kind, v| ladder.bonds_of_type(kind).map(|b| ((b.i, b.j), v)).collect();
        PerturbationSplit { jx, jy: pick(BondType::Y, ty), jz: pick(BondType::Z, tz) }
    }

    /// Reads a coupling config whose x bonds all share one value.
    pub fn from_couplings(ladder: &Ladder, j: &CouplingConfig) -> Result<Self> {
        j.check(ladder)?;
        let mut jx = None;
        let mut split = PerturbationSplit { jx: 0.0, jy: BTreeMap::new(), jz: BTreeMap::new() };
        for (b, &v) in ladder.bonds.iter().zip(&j.j) {
            match b.kind {
                BondType::X => match jx {
                    None => jx = Some(v),
                    Some(w) if w == v => {}
                    Some(_) => return Err(Error::Precondition("x couplings must be uniform".into())),
                },
                BondType::Y => {
                    split.jy.insert((b.i, b.j), v);
                }
                BondType::Z => {
                    split.jz.insert((b.i, b.j), v);
                }
            }
        }
        split.jx = jx.unwrap_or(0.0);
        Ok(split)
    }

    pub fn to_couplings(&self, ladder: &Ladder) -> CouplingConfig {
        CouplingConfig::from_fn(ladder, |b| match b.kind {
            BondType::X => self.jx,
            BondType::Y => self.jy[&(b.i, b.j)],
            BondType::Z => self.jz[&(b.i, b.j)],
        })
    }

    /// Multiplies every y and z coupling by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let f = |m: &BTreeMap<(usize, usize), f64>| m.iter().map(|(&k, &v)| (k, v * s)).collect();
        PerturbationSplit { jx: self.jx, jy: f(&self.jy), jz: f(&self.jz) }
    }

    /// Largest y or z coupling.
    pub fn scale(&self) -> f64 {
        self.jy.values().chain(self.jz.values()).fold(0.0, |m, &v| m.max(v))
    }

    pub fn check(&self, ladder: &Ladder, ratio_guard: f64) -> Result<()> {
        let ny = ladder.bonds_of_type(BondType::Y).count();
        let nz = ladder.bonds_of_type(BondType::Z).count();
        if self.jy.len() != ny || self.jz.len() != nz {
            return Err(Error::Precondition("split must cover every y and z bond".into()));
        }
        for &(i, j) in self.jy.keys().chain(self.jz.keys()) {
            if ladder.bond(i, j).is_none() {
                return Err(Error::Precondition(format!("({i},{j}) is not a bond")));
            }
        }
        if !(self.jx > 0.0) {
            return Err(Error::Precondition("jx must be positive".into()));
        }
        if self.jy.values().chain(self.jz.values()).any(|&v| !(v >= 0.0)) {
            return Err(Error::Precondition("y and z couplings must be nonnegative".into()));
        }
        let ratio = self.scale() / self.jx;
        if ratio >= ratio_guard {
            return Err(Error::Precondition(format!("coupling ratio {ratio} is not below {ratio_guard}")));
        }
        Ok(())
    }

    fn y(&self, i: usize, j: usize) -> f64 {
        self.jy[&(i.min(j), i.max(j))]
    }

    fn z(&self, i: usize, j: usize) -> f64 {
        self.jz[&(i.min(j), i.max(j))]
    }

    /// J(2k-1,2k) J(2k-1,2k+2) J(2k+1,2k+2) for plaquette k.
    fn triple(&self, k: usize) -> f64 {
        self.z(2 * k - 1, 2 * k) * self.y(2 * k - 1, 2 * k + 2) * self.z(2 * k + 1, 2 * k + 2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveResult {
    pub e0: f64,
    pub e2: f64,
    /// Per plaquette c_k with e3 = -sum c_k B_k.
    pub e3_coefficients: BTreeMap<String, f64>,
    /// Plaquette id to single-vortex gap.
    pub gaps: BTreeMap<String, f64>,
}

impl EffectiveResult {
    /// Third-order energy for the given plaquette values; unlisted plaquettes contribute nothing.
    pub fn e3(&self, values: &BTreeMap<String, i8>) -> f64 {
        -self.e3_coefficients.iter().map(|(id, c)| c * f64::from(values.get(id).copied().unwrap_or(1))).sum::<f64>()
    }

    pub fn e3_vortex_free(&self) -> f64 {
        -self.e3_coefficients.values().sum::<f64>()
    }
}

fn finish(e0: f64, e2: f64, coeffs: Vec<(usize, f64)>) -> EffectiveResult {
    let e3_coefficients: BTreeMap<String, f64> = coeffs.iter().map(|&(k, c)| (format!("p{k}"), c)).collect();
    let gaps = coeffs.iter().map(|&(k, c)| (format!("p{k}"), 2.0 * c)).collect();
    EffectiveResult { e0, e2, e3_coefficients, gaps }
}

pub fn effective_open(ladder: &Ladder, split: &PerturbationSplit) -> Result<EffectiveResult> {
    effective_open_with(ladder, split, RATIO_GUARD)
}

pub fn effective_open_with(ladder: &Ladder, split: &PerturbationSplit, ratio_guard: f64) -> Result<EffectiveResult> {
    if ladder.is_closed() {
        return Err(Error::InvalidInput("open-ladder formulas need an open ladder".into()));
    }
    split.check(ladder, ratio_guard)?;
    let n = ladder.n_cells();
    let jx = split.jx;
    let e0 = -jx * (2 * n - 1) as f64;
    let mut sq = 0.0;
    for j in 1..=2 * n - 1 {
        sq += split.y(2 * j - 1, 2 * j + 2).powi(2);
    }
    for j in 1..=2 * n {
        sq += split.z(2 * j - 1, 2 * j).powi(2);
    }
    // The four end couplings are counted a second time.
    sq += split.y(1, 4).powi(2) + split.y(4 * n - 3, 4 * n).powi(2);
    sq += split.z(1, 2).powi(2) + split.z(4 * n - 1, 4 * n).powi(2);
    let e2 = -sq / (4.0 * jx);
    let mut coeffs = vec![(1, split.triple(1) / (2.0 * jx * jx))];
    for k in 2..=2 * n - 2 {
        coeffs.push((k, split.triple(k) / (8.0 * jx * jx)));
    }
    coeffs.push((2 * n - 1, split.triple(2 * n - 1) / (2.0 * jx * jx)));
    Ok(finish(e0, e2, coeffs))
}

pub fn effective_closed(ladder: &Ladder, split: &PerturbationSplit) -> Result<EffectiveResult> {
    effective_closed_with(ladder, split, RATIO_GUARD)
}

pub fn effective_closed_with(ladder: &Ladder, split: &PerturbationSplit, ratio_guard: f64) -> Result<EffectiveResult> {
    if !ladder.is_closed() {
        return Err(Error::InvalidInput("closed-ladder formulas need a closed ladder".into()));
    }
    let n = ladder.n_cells();
    if n <= 2 {
        return Err(Error::Precondition("closed-ladder formulas need more than two cells".into()));
    }
    split.check(ladder, ratio_guard)?;
    let jx = split.jx;
    let e0 = -jx * (2 * n) as f64;
    let mut sq = 0.0;
    for j in 1..=2 * n - 1 {
        sq += split.y(2 * j - 1, 2 * j + 2).powi(2);
    }
    for j in 1..=2 * n {
        sq += split.z(2 * j - 1, 2 * j).powi(2);
    }
    sq += split.y(2, 4 * n - 1).powi(2);
    let e2 = -sq / (4.0 * jx);
    // p_2N carries no third-order term.
    let coeffs = (1..=2 * n - 1).map(|k| (k, split.triple(k) / (8.0 * jx * jx))).collect();
    Ok(finish(e0, e2, coeffs))
}

pub fn effective(ladder: &Ladder, split: &PerturbationSplit, ratio_guard: f64) -> Result<EffectiveResult> {
    if ladder.is_closed() {
        effective_closed_with(ladder, split, ratio_guard)
    } else {
        effective_open_with(ladder, split, ratio_guard)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub plaquette: String,
    pub delta_e_formula: Option<f64>,
    pub delta_e_exact: f64,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub plaquette: String,
    /// Exact gap at half scale over exact gap at full scale (1/8 for pure cubic behaviour).
    pub exact_gap_ratio: f64,
    /// Absolute formula error at half scale over that at full scale.
    pub abs_err_ratio: Option<f64>,
    /// Error falls faster than the cubic gap itself.
    pub error_shrinks_faster_than_cubic: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<GapRow>,
    pub scaling: Vec<ScalingRow>,
    pub ground_vortex_free: bool,
}

/// Exact single-vortex gaps: lowest energy of each one-vortex label sector minus that of the
/// vortex-free sector. Big-loop vortices (closed ladders) are not counted as single vortices.
pub fn exact_gaps(ladder: &Ladder, split: &PerturbationSplit) -> Result<(BTreeMap<String, f64>, bool)> {
    if ladder.n_sites() > PERTURBATION_SPIN_LIMIT {
        return Err(Error::Guard(format!(
            "{} spins exceed the validation limit of {PERTURBATION_SPIN_LIMIT}",
            ladder.n_sites()
        )));
    }
    let h = build_spin_hamiltonian(ladder, &split.to_couplings(ladder))?;
    let ops = vortex_operators(ladder)?;
    let sectors = SymmetrySectors::new(h.n_spins, ops.iter().map(|(_, p)| *p).collect())?;
    let spectra = sectors.all_spectra(&h)?;
    let ground = |signs: &[i8]| -> f64 {
        spectra.iter().find(|(s, _)| s == signs).map(|(_, v)| v[0]).expect("every sector is listed")
    };
    let m = ops.len();
    let free = vec![1i8; m];
    let e_free = ground(&free);
    let global = spectra.iter().map(|(_, v)| v[0]).fold(f64::INFINITY, f64::min);
    let ground_vortex_free = e_free <= global + 1e-12 * global.abs().max(1.0);
    let mut gaps = BTreeMap::new();
    for (k, lp) in ladder.plaquettes().iter().enumerate() {
        let mut signs = free.clone();
        signs[k] = -1;
        gaps.insert(lp.id.clone(), ground(&signs) - e_free);
    }
    Ok((gaps, ground_vortex_free))
}

fn plaquette_order(id: &str) -> usize {
    id.trim_start_matches('p').parse().unwrap_or(usize::MAX)
}

/// Compares formula gaps with exact gaps at the split's scale and at half of it.
pub fn validate_against_ed(ladder: &Ladder, split: &PerturbationSplit) -> Result<ValidationReport> {
    validate_against_ed_with(ladder, split, RATIO_GUARD)
}

pub fn validate_against_ed_with(ladder: &Ladder, split: &PerturbationSplit, ratio_guard: f64) -> Result<ValidationReport> {
    let mut rows = Vec::new();
    let mut per_scale = Vec::new();
    let mut ground_vortex_free = true;
    for s in [1.0, 0.5] {
        let sp = split.scaled(s);
        let formula = effective(ladder, &sp, ratio_guard)?;
        let (exact, vf) = exact_gaps(ladder, &sp)?;
        if s == 1.0 {
            ground_vortex_free = vf;
        }
        let mut ids: Vec<&String> = exact.keys().collect();
        ids.sort_by_key(|id| plaquette_order(id));
        let mut scale_rows = BTreeMap::new();
        for id in ids {
            let e = exact[id];
            let f = formula.gaps.get(id).copied();
            let abs_err = f.map(|f| (e - f).abs());
            let rel_err = f.and_then(|f| abs_err.map(|a| if f != 0.0 { a / f.abs() } else if a == 0.0 { 0.0 } else { f64::INFINITY }));
            let row = GapRow { plaquette: id.clone(), delta_e_formula: f, delta_e_exact: e, abs_err, rel_err, scale: sp.scale() };
            scale_rows.insert(id.clone(), row.clone());
            rows.push(row);
        }
        per_scale.push(scale_rows);
    }
    let mut ids: Vec<&String> = per_scale[0].keys().collect();
    ids.sort_by_key(|id| plaquette_order(id));
    let scaling = ids
        .into_iter()
        .map(|id| {
            let (full, half) = (&per_scale[0][id], &per_scale[1][id]);
            let abs_err_ratio = match (full.abs_err, half.abs_err) {
                (Some(a), Some(b)) if a > 0.0 => Some(b / a),
                _ => None,
            };
            ScalingRow {
                plaquette: id.clone(),
                exact_gap_ratio: half.delta_e_exact / full.delta_e_exact,
                abs_err_ratio,
                error_shrinks_faster_than_cubic: abs_err_ratio.map(|r| r < 0.125),
            }
        })
        .collect();
    Ok(ValidationReport { rows, scaling, ground_vortex_free })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ladder, LadderSpec};

    fn open(n: usize) -> Ladder {
        build_ladder(LadderSpec::open(n).unwrap()).unwrap()
    }

    #[test]
    fn zero_perturbation() {
        let l = open(3);
        let r = effective_open(&l, &PerturbationSplit::uniform(&l, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(r.e0, -5.0);
        assert_eq!(r.e2, 0.0);
        assert!(r.gaps.values().all(|&g| g == 0.0));
    }

    #[test]
    fn published_gap_values() {
        let l = open(3);
        let r = effective_open(&l, &PerturbationSplit::uniform(&l, 1.0, 0.01, 0.01)).unwrap();
        assert!((r.gaps["p1"] - 1e-6).abs() < 1e-20);
        assert!((r.gaps["p5"] - 1e-6).abs() < 1e-20);
        for k in 2..=4 {
            assert!((r.gaps[&format!("p{k}")] - 2.5e-7).abs() < 1e-20);
        }
        assert_eq!(r.gaps.len(), 5);
    }

    #[test]
    fn open_second_order_counts_boundaries_twice() {
        let l = open(2);
        let r = effective_open(&l, &PerturbationSplit::uniform(&l, 2.0, 0.1, 0.05)).unwrap();
        // 3 y + 4 z bonds, plus y(1,4), y(5,8), z(1,2), z(7,8) again.
        let sq = 5.0 * 0.01 + 6.0 * 0.0025;
        assert!((r.e2 + sq / 8.0).abs() < 1e-15);
    }

    #[test]
    fn closed_formulas() {
        let l = build_ladder(LadderSpec::closed(3).unwrap()).unwrap();
        let t = 0.05;
        let r = effective_closed(&l, &PerturbationSplit::uniform(&l, 1.0, t, t)).unwrap();
        assert_eq!(r.gaps.len(), 5);
        assert!(r.gaps.values().all(|&g| (g - t * t * t / 4.0).abs() < 1e-18));
        assert!(!r.gaps.contains_key("p6"));
        assert_eq!(r.e0, -6.0);
        let two = build_ladder(LadderSpec::closed(2).unwrap()).unwrap();
        assert!(effective_closed(&two, &PerturbationSplit::uniform(&two, 1.0, t, t)).is_err());
        let mut values = BTreeMap::new();
        values.insert("big".to_string(), -1i8);
        assert_eq!(r.e3(&values), r.e3_vortex_free());
    }

    #[test]
    fn guards() {
        let l = open(2);
        assert!(effective_open(&l, &PerturbationSplit::uniform(&l, 1.0, 0.2, 0.0)).is_err());
        assert!(effective_open(&l, &PerturbationSplit::uniform(&l, -1.0, 0.0, 0.0)).is_err());
        assert!(effective_open(&l, &PerturbationSplit::uniform(&l, 1.0, -0.01, 0.0)).is_err());
        let c = build_ladder(LadderSpec::closed(3).unwrap()).unwrap();
        assert!(effective_open(&c, &PerturbationSplit::uniform(&c, 1.0, 0.01, 0.01)).is_err());
    }

    #[test]
    fn split_round_trip() {
        let l = open(2);
        let s = PerturbationSplit::uniform(&l, 1.0, 0.03, 0.02);
        let j = s.to_couplings(&l);
        assert_eq!(PerturbationSplit::from_couplings(&l, &j).unwrap(), s);
        let mut bad = j.clone();
        bad.set(&l, 2, 3, 0.5).unwrap();
        assert!(PerturbationSplit::from_couplings(&l, &bad).is_err());
    }
}
