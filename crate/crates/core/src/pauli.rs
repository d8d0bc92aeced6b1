//! Pauli strings as (x, z) bit masks with an exact Z4 phase, and sparse spin operators.
//!
//! Site k (1-based) is bit k-1. A string is `i^phase * prod X^x_k Z^z_k`, so
//! sigma^y = i X Z. Basis state bit 1 means Z eigenvalue -1.

use std::collections::BTreeMap;
use std::fmt;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::BondType;

pub const MAX_SPINS: usize = 64;

/// Power of i, modulo 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(power: u32) -> Self {
        Phase((power % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub phase: Phase,
}

fn parity(v: u64) -> u32 {
    v.count_ones() & 1
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0, phase: Phase::ONE };

    pub fn new(x: u64, z: u64, phase: Phase) -> Self {
        PauliString { x, z, phase }
    }

    /// sigma^kind on a 1-based site.
    pub fn single(site: usize, kind: BondType) -> Self {
        assert!((1..=MAX_SPINS).contains(&site), "site {site} out of range");
        let bit = 1u64 << (site - 1);
        match kind {
            BondType::X => PauliString::new(bit, 0, Phase::ONE),
            BondType::Z => PauliString::new(0, bit, Phase::ONE),
            BondType::Y => PauliString::new(bit, bit, Phase::I),
        }
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        // Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
        let sign = 2 * parity(self.z & other.x);
        PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: self.phase.mul(other.phase).mul(Phase::new(sign)),
        }
    }

    pub fn scale(&self, p: Phase) -> PauliString {
        PauliString { phase: self.phase.mul(p), ..*self }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        (parity(self.x & other.z) + parity(self.z & other.x)) % 2 == 0
    }

    pub fn dagger(&self) -> PauliString {
        // (X^x Z^z)^dagger = Z^z X^x = (-1)^{|x & z|} X^x Z^z
        PauliString { phase: self.phase.conj().mul(Phase::new(2 * parity(self.x & self.z))), ..*self }
    }

    pub fn is_hermitian(&self) -> bool {
        self.dagger() == *self
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == Phase::ONE
    }

    pub fn same_operator_up_to_phase(&self, other: &PauliString) -> bool {
        self.x == other.x && self.z == other.z
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// The matrix of X^x Z^z (without the phase) is real; the string is real iff its phase is.
    pub fn is_real(&self) -> bool {
        self.phase.is_real()
    }

    /// `self |s> = amplitude |s ^ x>`.
    pub fn apply_basis(&self, s: u64) -> (u64, Phase) {
        (s ^ self.x, self.phase.mul(Phase::new(2 * parity(self.z & s))))
    }

    /// Coefficient c such that the string equals c * prod sigma^{a_k}.
    fn sigma_form(&self) -> (Phase, Vec<(usize, char)>) {
        let mut ys = 0u32;
        let mut letters = Vec::new();
        for k in 0..MAX_SPINS {
            let (xb, zb) = ((self.x >> k) & 1, (self.z >> k) & 1);
            let c = match (xb, zb) {
                (1, 1) => {
                    ys += 1;
                    'Y'
                }
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => continue,
            };
            letters.push((k + 1, c));
        }
        // X Z = -i Y on every Y site.
        (self.phase.mul(Phase::new(3 * ys)), letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, letters) = self.sigma_form();
        f.write_str(["+", "+i", "-", "-i"][c.power() as usize])?;
        if letters.is_empty() {
            return f.write_str("I");
        }
        let body: Vec<String> = letters.iter().map(|(k, c)| format!("{c}{k}")).collect();
        f.write_str(&body.join(" "))
    }
}

/// Sum of Pauli strings with complex coefficients, keyed by `(x, z)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpinOperator {
    pub n_spins: usize,
    pub terms: BTreeMap<(u64, u64), Complex64>,
}

impl SpinOperator {
    pub fn zero(n_spins: usize) -> Self {
        assert!(n_spins <= MAX_SPINS);
        SpinOperator { n_spins, terms: BTreeMap::new() }
    }

    pub fn from_string(n_spins: usize, p: &PauliString) -> Self {
        let mut op = Self::zero(n_spins);
        op.add_string(p, Complex64::new(1.0, 0.0));
        op
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_spins
    }

    pub fn add_string(&mut self, p: &PauliString, coeff: Complex64) {
        let c = coeff * p.phase.to_complex();
        let entry = self.terms.entry((p.x, p.z)).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(p.x, p.z));
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn strings(&self) -> impl Iterator<Item = (PauliString, Complex64)> + '_ {
        self.terms.iter().map(|(&(x, z), &c)| (PauliString::new(x, z, Phase::ONE), c))
    }

    pub fn add(&self, other: &SpinOperator) -> SpinOperator {
        let mut out = self.clone();
        for (p, c) in other.strings() {
            out.add_string(&p, c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> SpinOperator {
        let mut out = SpinOperator::zero(self.n_spins);
        for (p, c) in self.strings() {
            out.add_string(&p, c * s);
        }
        out
    }

    pub fn mul(&self, other: &SpinOperator) -> SpinOperator {
        let mut out = SpinOperator::zero(self.n_spins.max(other.n_spins));
        for (p, a) in self.strings() {
            for (q, b) in other.strings() {
                out.add_string(&p.mul(&q), a * b);
            }
        }
        out
    }

    pub fn commutator(&self, other: &SpinOperator) -> SpinOperator {
        self.mul(other).add(&other.mul(self).scale(Complex64::new(-1.0, 0.0)))
    }

    /// Exact test: a string commutes with a sum of distinct strings iff it commutes with every term.
    pub fn commutes_with_string(&self, p: &PauliString) -> bool {
        self.strings().all(|(q, _)| q.commutes_with(p))
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_coefficient() <= tol
    }

    /// Largest deviation between a coefficient and the one its adjoint term requires.
    pub fn hermitian_defect(&self) -> f64 {
        self.strings()
            .map(|(p, c)| {
                let d = p.dagger();
                // (c X^x Z^z)^dagger = conj(c) * d.phase * X^x Z^z
                (c - c.conj() * d.phase.to_complex()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    fn grouped(&self) -> Vec<(u64, Vec<(u64, Complex64)>)> {
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for (&(x, z), &c) in &self.terms {
            groups.entry(x).or_default().push((z, c));
        }
        groups.into_iter().collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::InvalidInput(format!("vector length {len} != dimension {}", self.dim())));
        }
        Ok(())
    }

    /// `out = self * v` for a real operator, in gather form.
    pub fn apply_real(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        if !self.is_real() {
            return Err(Error::InvalidInput("operator has complex coefficients".into()));
        }
        let groups: Vec<(u64, Vec<(u64, f64)>)> =
            self.grouped().into_iter().map(|(x, zs)| (x, zs.into_iter().map(|(z, c)| (z, c.re)).collect())).collect();
        const CHUNK: usize = 1 << 12;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
            let base = (ci * CHUNK) as u64;
            for (off, o) in chunk.iter_mut().enumerate() {
                let t = base + off as u64;
                let mut acc = 0.0;
                for (x, zs) in &groups {
                    let s = t ^ x;
                    let mut f = 0.0;
                    for &(z, c) in zs {
                        f += if parity(z & s) == 0 { c } else { -c };
                    }
                    acc += f * v[s as usize];
                }
                *o = acc;
            }
        });
        Ok(())
    }

    pub fn apply_complex(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        let groups = self.grouped();
        out.par_iter_mut().enumerate().for_each(|(t, o)| {
            let t = t as u64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, zs) in &groups {
                let s = t ^ x;
                let mut f = Complex64::new(0.0, 0.0);
                for &(z, c) in zs {
                    f += if parity(z & s) == 0 { c } else { -c };
                }
                acc += f * v[s as usize];
            }
            *o = acc;
        });
        Ok(())
    }

    pub fn to_dense_complex(&self) -> Mat<Complex64> {
        let n = self.dim();
        let mut m = Mat::<Complex64>::zeros(n, n);
        for (p, c) in self.strings() {
            for s in 0..n as u64 {
                let (t, ph) = p.apply_basis(s);
                m[(t as usize, s as usize)] += c * ph.to_complex();
            }
        }
        m
    }

    /// Real part of the dense matrix; callers check `is_real` first.
    pub fn to_dense_real(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::<f64>::zeros(n, n);
        for (p, c) in self.strings() {
            for s in 0..n as u64 {
                let (t, ph) = p.apply_basis(s);
                m[(t as usize, s as usize)] += (c * ph.to_complex()).re;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(p: &PauliString, n: usize) -> Mat<Complex64> {
        SpinOperator::from_string(n, p).to_dense_complex()
    }

    fn close(a: &Mat<Complex64>, b: &Mat<Complex64>) -> bool {
        (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| (a[(i, j)] - b[(i, j)]).norm() < 1e-14))
    }

    #[test]
    fn single_site_matrices() {
        let y = dense(&PauliString::single(1, BondType::Y), 1);
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
        let z = dense(&PauliString::single(1, BondType::Z), 1);
        assert_eq!(z[(1, 1)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn products_match_matrices() {
        let labels = [BondType::X, BondType::Y, BondType::Z];
        for a in labels {
            for b in labels {
                let (p, q) = (PauliString::single(1, a), PauliString::single(1, b));
                let prod = &dense(&p, 1) * &dense(&q, 1);
                assert!(close(&dense(&p.mul(&q), 1), &prod));
                assert_eq!(p.commutes_with(&q), a == b);
            }
        }
        let xy = PauliString::single(1, BondType::X).mul(&PauliString::single(2, BondType::Y));
        assert!(xy.is_hermitian());
        assert_eq!(format!("{xy}"), "+X1 Y2");
        assert!(xy.mul(&xy).is_identity());
    }

    #[test]
    fn operator_algebra() {
        let mut h = SpinOperator::zero(2);
        let zz = PauliString::single(1, BondType::Z).mul(&PauliString::single(2, BondType::Z));
        h.add_string(&zz, Complex64::new(-1.0, 0.0));
        assert_eq!(h.hermitian_defect(), 0.0);
        let xx = PauliString::single(1, BondType::X).mul(&PauliString::single(2, BondType::X));
        assert!(h.commutes_with_string(&xx));
        assert!(h.commutator(&SpinOperator::from_string(2, &xx)).is_zero(0.0));
        let x1 = PauliString::single(1, BondType::X);
        assert!(!h.commutes_with_string(&x1));
        let v = vec![1.0, 2.0, 3.0, 4.0];
        let mut out = vec![0.0; 4];
        h.apply_real(&v, &mut out).unwrap();
        assert_eq!(out, vec![-1.0, 2.0, 3.0, -4.0]);
        let mut anti = SpinOperator::zero(1);
        anti.add_string(&PauliString::single(1, BondType::Y), Complex64::new(0.0, 1.0));
        assert!(anti.hermitian_defect() > 1.0);
    }
}
