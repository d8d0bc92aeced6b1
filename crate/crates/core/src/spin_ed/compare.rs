//! Comparison of eigenvalue sets ignoring multiplicity.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unmatched {
    pub value: f64,
    pub nearest_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub tol: f64,
    pub spin_levels: usize,
    pub fermion_levels: usize,
    pub only_spin: Vec<Unmatched>,
    pub only_fermion: Vec<Unmatched>,
    /// min(spin) - min(fermion).
    pub ground_delta: f64,
    pub equal: bool,
}

/// Distinct levels: ascending chain clusters with gaps at most `tol`, each replaced by its mean.
pub fn dedup_levels(values: &[f64], tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return v;
    }
    super::labels::clusters(&v, tol).into_iter().map(|r| v[r.clone()].iter().sum::<f64>() / r.len() as f64).collect()
}

fn nearest(sorted: &[f64], x: f64) -> f64 {
    let i = sorted.partition_point(|&v| v < x);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - x).abs());
    }
    if i > 0 {
        best = best.min((x - sorted[i - 1]).abs());
    }
    best
}

pub fn compare_spectra(spin: &[f64], fermion: &[f64], tol: f64) -> ComparisonReport {
    let a = dedup_levels(spin, tol);
    let b = dedup_levels(fermion, tol);
    let unmatched = |from: &[f64], to: &[f64]| -> Vec<Unmatched> {
        from.iter()
            .map(|&value| Unmatched { value, nearest_distance: nearest(to, value) })
            .filter(|u| u.nearest_distance > tol)
            .collect()
    };
    let only_spin = unmatched(&a, &b);
    let only_fermion = unmatched(&b, &a);
    let ground_delta = match (a.first(), b.first()) {
        (Some(x), Some(y)) => x - y,
        _ => f64::NAN,
    };
    ComparisonReport {
        tol,
        spin_levels: a.len(),
        fermion_levels: b.len(),
        equal: only_spin.is_empty() && only_fermion.is_empty(),
        only_spin,
        only_fermion,
        ground_delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_shifted() {
        let r = compare_spectra(&[1.0, 1.0, 2.0], &[2.0, 1.0], 1e-8);
        assert!(r.equal);
        assert_eq!((r.spin_levels, r.fermion_levels), (2, 2));
        let r = compare_spectra(&[1.0, 2.0], &[1.0, 2.0, 3.5], 1e-8);
        assert!(!r.equal);
        assert_eq!(r.only_fermion, vec![Unmatched { value: 3.5, nearest_distance: 1.5 }]);
        assert_eq!(r.ground_delta, 0.0);
    }
}
