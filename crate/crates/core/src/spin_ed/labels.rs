//! Vortex labels for eigenvectors via simultaneous diagonalization inside degenerate clusters.

use std::collections::BTreeMap;

use faer::Mat;

use super::{Eigenvectors, SpectrumReport};
use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{PauliString, SpinOperator};

const LABEL_TOL: f64 = 1e-6;

fn apply_string(p: &PauliString, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (s, &a) in v.iter().enumerate() {
        let (t, ph) = p.apply_basis(s as u64);
        out[t as usize] += a * ph.to_complex().re;
    }
    out
}

fn projected(op: impl Fn(&[f64]) -> Vec<f64>, cols: &[Vec<f64>]) -> Mat<f64> {
    let images: Vec<Vec<f64>> = cols.iter().map(|c| op(c)).collect();
    let d = cols.len();
    Mat::from_fn(d, d, |i, j| cols[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum())
}

fn combine(cols: &[Vec<f64>], coeffs: &Mat<f64>, col: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols[0].len()];
    for (i, c) in cols.iter().enumerate() {
        let w = coeffs[(i, col)];
        out.iter_mut().zip(c).for_each(|(o, x)| *o += w * x);
    }
    out
}

/// Chain clusters of ascending values: consecutive gaps at most `tol`.
pub(crate) fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Attach per-cycle vortex values to each eigenvector of `report`.
///
/// Within each cluster of nearly equal eigenvalues the projected vortex
/// operators are diagonalized one after another on the subspaces already
/// split by the previous ones; every projected eigenvalue must be within 1e-6
/// of +1 or -1. The Hamiltonian is then diagonalized inside each label block.
pub fn label_eigenstates(
    h: &SpinOperator,
    vortex_ops: &[(String, PauliString)],
    report: &SpectrumReport,
    degeneracy_tol: f64,
) -> Result<SpectrumReport> {
    for (id, b) in vortex_ops {
        if !h.commutes_with_string(b) {
            return Err(Error::NonCommuting(format!("vortex operator {id} and the Hamiltonian")));
        }
        if !b.is_real() {
            return Err(Error::Labeling(format!("vortex operator {id} is not a real matrix")));
        }
    }
    if !h.is_real() {
        return Err(Error::Labeling("labeling handles real Hamiltonians only".into()));
    }
    let Some(Eigenvectors(vecs)) = &report.vectors else {
        return Err(Error::Labeling("the report carries no eigenvectors".into()));
    };
    let dim = vecs.nrows();
    let apply_h = |v: &[f64]| {
        let mut out = vec![0.0; dim];
        h.apply_real(v, &mut out).expect("dimensions match");
        out
    };

    let mut eigenvalues = Vec::with_capacity(report.eigenvalues.len());
    let mut labels = BTreeMap::new();
    let mut new_vectors: Vec<Vec<f64>> = Vec::with_capacity(report.eigenvalues.len());
    for range in clusters(&report.eigenvalues, degeneracy_tol) {
        let cols: Vec<Vec<f64>> = range.clone().map(|c| (0..dim).map(|r| vecs[(r, c)]).collect()).collect();
        // groups of (vectors, labels so far)
        let mut groups: Vec<(Vec<Vec<f64>>, Vec<i8>)> = vec![(cols, Vec::new())];
        for (id, b) in vortex_ops {
            let mut next = Vec::new();
            for (vs, lab) in groups {
                let m = projected(|v| apply_string(b, v), &vs);
                let (vals, w) = linalg::sym_eigen(&m)?;
                let mut plus = Vec::new();
                let mut minus = Vec::new();
                for (c, &val) in vals.iter().enumerate() {
                    let v = combine(&vs, &w, c);
                    if (val - 1.0).abs() <= LABEL_TOL {
                        plus.push(v);
                    } else if (val + 1.0).abs() <= LABEL_TOL {
                        minus.push(v);
                    } else {
                        return Err(Error::Labeling(format!(
                            "cluster at {:.12} has projected {id} eigenvalue {val:.3e}",
                            report.eigenvalues[range.start]
                        )));
                    }
                }
                for (part, sign) in [(minus, -1i8), (plus, 1i8)] {
                    if !part.is_empty() {
                        let mut l = lab.clone();
                        l.push(sign);
                        next.push((part, l));
                    }
                }
            }
            groups = next;
        }
        let mut states: Vec<(f64, Vec<i8>, Vec<f64>)> = Vec::new();
        for (vs, lab) in groups {
            let m = projected(&apply_h, &vs);
            let (vals, w) = linalg::sym_eigen(&m)?;
            for (c, &val) in vals.iter().enumerate() {
                states.push((val, lab.clone(), combine(&vs, &w, c)));
            }
        }
        states.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        for (val, lab, v) in states {
            let idx = eigenvalues.len();
            eigenvalues.push(val);
            labels.insert(idx, vortex_ops.iter().map(|(id, _)| id.clone()).zip(lab).collect());
            new_vectors.push(v);
        }
    }
    let mut out = SpectrumReport::new(report.method.clone(), eigenvalues);
    out.labels = Some(labels);
    out.residuals = report.residuals.clone();
    let n = new_vectors.len();
    out.vectors = Some(Eigenvectors(Mat::from_fn(dim, n, |r, c| new_vectors[c][r])));
    Ok(out)
}
