use serde::Serialize;
use serde_json::json;
use vortex_ladder::freefermion::{
    decay_summary, gap_scan, sector_spectra, sector_sweep, ScanPreset, ENERGY_TOL,
};
use vortex_ladder::lattice::{reflection, ReflectionCase};
use vortex_ladder::perturbation::{validate_against_ed, PerturbationSplit};
use vortex_ladder::rp::{self, RpOptions, ReflectionSetup};
use vortex_ladder::solvers::{MethodRegistry, SpectrumRequest};
use vortex_ladder::spin_ed::{
    build_spin_hamiltonian, compare_spectra, dense_spectrum, lowest_eigenvalues, DENSE_SPIN_LIMIT, ITERATIVE_SPIN_LIMIT,
};
use vortex_ladder::gauge::GaugeConfig;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_bytes, json_bytes, num, opt_num, Format};

pub const DEFAULT_K: usize = 10;
pub const COMPARE_TOL: f64 = 1e-8;
pub const PERTURB_REL_TOL: f64 = 1e-2;
pub const DECAY_FIT_FROM_N: usize = 10;

fn labels_text(map: &std::collections::BTreeMap<String, i8>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v:+}")).collect::<Vec<_>>().join(";")
}

pub fn spectrum(cfg: &RunConfig, format: Format) -> Result<Vec<u8>, CliError> {
    let ladder = cfg.build_ladder()?;
    let j = cfg.couplings(&ladder)?;
    let sector = cfg.sector(&ladder)?;
    let registry = MethodRegistry::with_defaults();
    let name = cfg.method.as_deref().unwrap_or("spin-dense");
    let method = registry
        .get(name)
        .ok_or_else(|| CliError::Config(format!("at method: unknown {name}; known: {}", registry.names().join(", "))))?;
    let seed = if name == "spin-iterative" { cfg.require_seed("spin-iterative")? } else { cfg.seed.unwrap_or(0) };
    let req = SpectrumRequest { ladder: &ladder, couplings: &j, sector: sector.as_ref(), k: cfg.k.unwrap_or(DEFAULT_K), seed };
    let report = method.run(&req)?;
    match format {
        Format::Json => json_bytes(&report),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let label = report.labels.as_ref().and_then(|l| l.get(&i)).map(labels_text).unwrap_or_default();
                    vec![i.to_string(), num(v), label]
                })
                .collect();
            csv_bytes(&["index", "eigenvalue", "sector"], &rows)
        }
    }
}

#[derive(Serialize)]
struct ReflectionStatus {
    case: ReflectionCase,
    symmetric: bool,
}

pub fn sweep(cfg: &RunConfig, format: Format, tolerance: Option<f64>) -> Result<Vec<u8>, CliError> {
    let ladder = cfg.build_ladder()?;
    let j = cfg.couplings(&ladder)?;
    let tol = tolerance.unwrap_or(ENERGY_TOL);
    let table = sector_sweep(&ladder, &j)?;
    let argmin = table.argmin(tol);
    let reflections: Vec<ReflectionStatus> = ReflectionCase::ALL
        .iter()
        .filter(|c| c.applies_to(ladder.spec.boundary))
        .map(|&case| {
            let r = reflection(&ladder, case)?;
            Ok(ReflectionStatus { case, symmetric: j.is_reflection_symmetric(&ladder, &r, 1e-12) })
        })
        .collect::<Result<_, vortex_ladder::Error>>()?;
    match format {
        Format::Json => json_bytes(&json!({
            "cycle_ids": table.cycle_ids,
            "rows": table.rows,
            "argmin": argmin.iter().map(|r| r.sector_id).collect::<Vec<_>>(),
            "degenerate": argmin.len() > 1,
            "reflections": reflections,
        })),
        Format::Csv => {
            let mut header = vec!["kind", "sector_id"];
            header.extend(table.cycle_ids.iter().map(String::as_str));
            header.extend(["ground_energy", "note"]);
            let row = |kind: &str, r: &vortex_ladder::freefermion::SweepRow, note: String| {
                let mut v = vec![kind.to_string(), r.sector_id.to_string()];
                v.extend(r.values.iter().map(|s| format!("{s:+}")));
                v.push(num(r.ground_energy));
                v.push(note);
                v
            };
            let mut rows: Vec<Vec<String>> = table.rows.iter().map(|r| row("sector", r, String::new())).collect();
            let note = if argmin.len() > 1 { format!("degenerate:{}", argmin.len()) } else { String::new() };
            rows.extend(argmin.iter().map(|r| row("argmin", r, note.clone())));
            for s in &reflections {
                let case = serde_json::to_value(s.case).expect("enum serializes");
                let mut v = vec!["reflection".to_string(), String::new()];
                v.extend(std::iter::repeat_n(String::new(), table.cycle_ids.len() + 1));
                v.push(format!("{}:{}", case.as_str().unwrap_or_default(), if s.symmetric { "symmetric" } else { "asymmetric" }));
                rows.push(v);
            }
            csv_bytes(&header, &rows)
        }
    }
}

fn default_patterns(closed: bool) -> Vec<String> {
    let p: &[&str] = if closed { &["BL", "BL+p2N", "BL+p2N-1+p2N"] } else { &["p1", "pN", "p2N-2+p2N-1"] };
    p.iter().map(|s| s.to_string()).collect()
}

pub fn gap_scan_cmd(cfg: &RunConfig, format: Format) -> Result<Vec<u8>, CliError> {
    let [lo, hi] = cfg.n_range.ok_or_else(|| CliError::Config("at n_range: missing".into()))?;
    if cfg.method.as_deref().is_some_and(|m| m != "fermion") {
        return Err(CliError::Config("at method: gap-scan supports fermion only".into()));
    }
    let (preset, jx, jy, jz) = cfg.preset()?;
    let closed = cfg.ladder.boundary == vortex_ladder::lattice::Boundary::Closed;
    let patterns = cfg.patterns.clone().unwrap_or_else(|| default_patterns(closed));
    let rows = gap_scan(cfg.ladder.boundary, ScanPreset { preset, jx, jy, jz }, lo, hi, &patterns)?;
    let summary = if closed { decay_summary(&rows, "BL", DECAY_FIT_FROM_N) } else { None };
    match format {
        Format::Json => json_bytes(&json!({ "rows": rows, "summary": summary })),
        Format::Csv => {
            let mut out: Vec<Vec<String>> = rows.iter().map(|r| vec![r.n.to_string(), r.pattern.clone(), num(r.delta_e)]).collect();
            if let Some(s) = &summary {
                let decreasing = if s.strictly_decreasing { "1" } else { "0" };
                out.push(vec![String::new(), format!("{}:strictly_decreasing", s.pattern), decreasing.into()]);
                out.push(vec![String::new(), format!("{}:log_slope", s.pattern), num(s.slope)]);
                out.push(vec![String::new(), format!("{}:r_squared", s.pattern), num(s.r_squared)]);
            }
            csv_bytes(&["n", "pattern", "delta_e"], &out)
        }
    }
}

pub fn compare(cfg: &RunConfig, format: Format, tolerance: Option<f64>) -> Result<Vec<u8>, CliError> {
    let ladder = cfg.build_ladder()?;
    let j = cfg.couplings(&ladder)?;
    let tol = tolerance.unwrap_or(COMPARE_TOL);
    let h = build_spin_hamiltonian(&ladder, &j)?;
    let fermion: Vec<f64> = sector_spectra(&ladder, &j)?.into_iter().flat_map(|(_, v)| v).collect();
    let value = if ladder.n_sites() <= DENSE_SPIN_LIMIT {
        let spin = dense_spectrum(&h)?;
        let r = compare_spectra(&spin.eigenvalues, &fermion, tol);
        json!({
            "mode": "full",
            "boundary": ladder.spec.boundary,
            "tol": tol,
            "spectra_equal": r.equal,
            "ground_energies_equal": r.ground_delta.abs() <= tol,
            "ground_delta": r.ground_delta,
            "spin_levels": r.spin_levels,
            "fermion_levels": r.fermion_levels,
            "only_spin": r.only_spin,
            "only_fermion": r.only_fermion,
        })
    } else if ladder.n_sites() <= ITERATIVE_SPIN_LIMIT {
        let spin = lowest_eigenvalues(&h, 1, cfg.require_seed("ground-only compare")?)?;
        let fmin = fermion.iter().copied().fold(f64::INFINITY, f64::min);
        let delta = spin.eigenvalues[0] - fmin;
        json!({
            "mode": "ground-only",
            "boundary": ladder.spec.boundary,
            "tol": tol,
            "spectra_equal": null,
            "ground_energies_equal": delta.abs() <= tol,
            "ground_delta": delta,
        })
    } else {
        return Err(vortex_ladder::Error::Guard(format!("{} spins exceed the iterative limit", ladder.n_sites())).into());
    };
    match format {
        Format::Json => json_bytes(&value),
        Format::Csv => {
            let fields = ["mode", "spectra_equal", "ground_energies_equal", "ground_delta", "spin_levels", "fermion_levels"];
            let rows: Vec<Vec<String>> = fields
                .iter()
                .filter_map(|&k| {
                    let v = value.get(k)?;
                    let text = match v {
                        serde_json::Value::Number(n) if n.is_f64() => n.as_f64().map(num).unwrap_or_default(),
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Null => String::new(),
                        other => other.to_string(),
                    };
                    Some(vec![k.to_string(), text])
                })
                .collect();
            csv_bytes(&["key", "value"], &rows)
        }
    }
}

pub fn perturb(cfg: &RunConfig, format: Format, tolerance: Option<f64>) -> Result<Vec<u8>, CliError> {
    let ladder = cfg.build_ladder()?;
    let split = match (&cfg.perturbation, &cfg.couplings) {
        (Some(p), None) => {
            let (ty, tz) = p.ty_tz()?;
            PerturbationSplit::uniform(&ladder, p.jx, ty, tz)
        }
        (None, Some(_)) => PerturbationSplit::from_couplings(&ladder, &cfg.couplings(&ladder)?)?,
        _ => return Err(CliError::Config("give exactly one of perturbation, couplings".into())),
    };
    let tol = tolerance.unwrap_or(PERTURB_REL_TOL);
    let report = validate_against_ed(&ladder, &split)?;
    let full_scale = split.scale();
    let max_rel = report
        .rows
        .iter()
        .filter(|r| r.scale == full_scale)
        .filter_map(|r| r.rel_err)
        .fold(0.0f64, f64::max);
    match format {
        Format::Json => json_bytes(&json!({
            "rows": report.rows,
            "scaling": report.scaling,
            "ground_vortex_free": report.ground_vortex_free,
            "max_rel_err": max_rel,
            "rel_tol": tol,
            "within_tolerance": max_rel < tol,
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.plaquette.clone(),
                        num(r.scale),
                        opt_num(r.delta_e_formula),
                        num(r.delta_e_exact),
                        opt_num(r.abs_err),
                        opt_num(r.rel_err),
                    ]
                })
                .collect();
            csv_bytes(&["plaquette", "scale", "delta_e_formula", "delta_e_exact", "abs_err", "rel_err"], &rows)
        }
    }
}

pub fn rp_verify(cfg: &RunConfig, format: Format) -> Result<Vec<u8>, CliError> {
    let ladder = cfg.build_ladder()?;
    let j = cfg.couplings(&ladder)?;
    let case = cfg.reflection.unwrap_or(ReflectionCase::Horizontal);
    let setup = ReflectionSetup::from_ladder(&ladder, case)?;
    let opts = RpOptions {
        betas: cfg.betas.clone().unwrap_or_else(|| RpOptions::default().betas),
        samples: cfg.samples.unwrap_or(RpOptions::default().samples),
        seed: cfg.require_seed("rp-verify")?,
        max_degree: RpOptions::default().max_degree,
    };
    if opts.betas.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(CliError::Config("at betas: need finite nonnegative values".into()));
    }
    let (g, _) = rp::fix_cross_signs_ladder(&ladder, &j, &GaugeConfig::uniform(&ladder), &setup)?;
    let h = rp::ladder_hamiltonian(&ladder, &j, &g);
    let value = if cfg.probe {
        let split = rp::split_hamiltonian(&h, &setup)?;
        let (h1, _) = rp::doubled_hamiltonians(&split.minus, &split.cross, &split.plus, &setup)?;
        let p = rp::probe_violation(&h1, &setup, &opts)?;
        json!({
            "samples": p.samples,
            "min_functional": p.min_functional,
            "trace_margin": null,
            "energy_gap": null,
            "verdict": p.verdict,
            "flipped_cross_bond": [p.flipped.0, p.flipped.1],
            "gram_minimum": p.gram_minimum,
        })
    } else {
        serde_json::to_value(rp::verify(&h, &setup, &opts)?).expect("report serializes")
    };
    match format {
        Format::Json => json_bytes(&value),
        Format::Csv => {
            let obj = value.as_object().expect("object");
            let rows: Vec<Vec<String>> = obj
                .iter()
                .map(|(k, v)| {
                    let text = match v {
                        serde_json::Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Null => String::new(),
                        other => other.to_string(),
                    };
                    vec![k.clone(), text]
                })
                .collect();
            csv_bytes(&["key", "value"], &rows)
        }
    }
}
