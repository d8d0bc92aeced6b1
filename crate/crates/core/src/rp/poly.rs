//! Polynomials in Majorana operators with monomials kept in increasing site order.

use std::collections::{BTreeMap, BTreeSet};

use faer::Mat;
use num_complex::Complex64;

use super::fock::MajoranaRep;

/// Sorts a Majorana word, returning the canonical word and the sign picked up.
/// Repeated sites cancel in pairs since c_j^2 = 1.
pub fn canonicalize(word: &[usize]) -> (Vec<usize>, f64) {
    let mut w = word.to_vec();
    let mut sign = 1.0;
    for i in 1..w.len() {
        let mut k = i;
        while k > 0 && w[k - 1] > w[k] {
            w.swap(k - 1, k);
            sign = -sign;
            k -= 1;
        }
    }
    let mut out = Vec::with_capacity(w.len());
    for s in w {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    (out, sign)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MajoranaPolynomial {
    pub terms: BTreeMap<Vec<usize>, Complex64>,
}

impl MajoranaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(&[], c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn monomial(word: &[usize], c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(word, c);
        p
    }

    pub fn add_term(&mut self, word: &[usize], c: Complex64) {
        let (w, sign) = canonicalize(word);
        *self.terms.entry(w).or_default() += c * sign;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (w, &c) in &other.terms {
            *p.terms.entry(w.clone()).or_default() += c;
        }
        p
    }

    pub fn scale(&self, s: Complex64) -> Self {
        MajoranaPolynomial { terms: self.terms.iter().map(|(w, &c)| (w.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let word: Vec<usize> = a.iter().chain(b).copied().collect();
                p.add_term(&word, ca * cb);
            }
        }
        p
    }

    /// Drops terms with magnitude at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        MajoranaPolynomial { terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(w, &c)| (w.clone(), c)).collect() }
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|w| w.len() % 2 == 0)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest coefficient difference over the union of both term sets.
    pub fn distance(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&Vec<usize>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|w| {
                let a = self.terms.get(w).copied().unwrap_or_default();
                let b = other.terms.get(w).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Matrix in `rep`, with site k carried by Majorana slot `slot(k)`.
    pub fn to_matrix(&self, rep: &MajoranaRep, slot: impl Fn(usize) -> usize) -> Mat<Complex64> {
        let dim = rep.dim();
        let mut m = Mat::<Complex64>::zeros(dim, dim);
        for (w, &c) in &self.terms {
            let slots: Vec<usize> = w.iter().map(|&s| slot(s)).collect();
            let p = rep.product(&slots);
            m += Mat::from_fn(dim, dim, |i, j| p[(i, j)] * c);
        }
        m
    }
}
