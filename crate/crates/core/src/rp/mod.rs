//! Reflection positivity of quadratic Majorana Hamiltonians, checked in a Fock representation.
//!
//! The reflection acts on the abstract algebra as the antilinear map
//! `c_j -> c_theta(j)`. Every quantity computed here is a trace, so the choice
//! of Fock representation does not enter the results.

mod fock;
mod poly;

use std::collections::BTreeSet;

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use fock::{fock_majoranas, MajoranaRep, FOCK_MAJORANA_LIMIT};
pub use poly::{canonicalize, MajoranaPolynomial};

use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::freefermion::{assemble_skew, ground_energy, mode_spectrum, SkewAdjacency};
use crate::gauge::{apply_gauge, GaugeConfig, SignAssignment};
use crate::lattice::{reflection, Ladder, ReflectionCase};
use crate::linalg;

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const FUNCTIONAL_TOL: f64 = 1e-10;
pub const VIOLATION_TOL: f64 = 1e-6;
pub const TRACE_TOL: f64 = 1e-8;
pub const ENERGY_TOL: f64 = 1e-9;
pub const FREE_FERMION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionSetup {
    pub n: usize,
    /// `theta[k - 1]` is the image of site k.
    pub theta: Vec<usize>,
    pub negative_half: BTreeSet<usize>,
    /// `(i, theta(i))` with i in the negative half.
    pub cross: Vec<(usize, usize)>,
    slots: Vec<usize>,
}

impl ReflectionSetup {
    pub fn new(theta: Vec<usize>, negative_half: BTreeSet<usize>, cross: Vec<(usize, usize)>) -> Result<Self> {
        let n = theta.len();
        if n % 2 == 1 || negative_half.len() * 2 != n {
            return Err(Error::InvalidInput("the negative half must hold exactly half of an even site count".into()));
        }
        for k in 1..=n {
            let t = theta[k - 1];
            if t == 0 || t > n || theta[t - 1] != k || t == k {
                return Err(Error::InvalidInput(format!("theta is not a fixed-point-free involution at {k}")));
            }
            if negative_half.contains(&k) == negative_half.contains(&t) {
                return Err(Error::InvalidInput(format!("theta keeps {k} on its own side")));
            }
        }
        for &(i, t) in &cross {
            if !negative_half.contains(&i) || theta[i - 1] != t {
                return Err(Error::InvalidInput(format!("({i},{t}) is not a reflected pair")));
            }
        }
        let mut slots = vec![0; n];
        for (k, &s) in negative_half.iter().enumerate() {
            slots[s - 1] = k;
            slots[theta[s - 1] - 1] = n / 2 + k;
        }
        Ok(ReflectionSetup { n, theta, negative_half, cross, slots })
    }

    pub fn from_ladder(ladder: &Ladder, case: ReflectionCase) -> Result<Self> {
        let r = reflection(ladder, case)?;
        let mut cross = Vec::new();
        for b in &r.cross_bonds {
            let (i, o) = if r.in_negative(b.i) { (b.i, b.j) } else { (b.j, b.i) };
            if r.image(i) != o {
                return Err(Error::UnsupportedReflection(format!("cross bond ({},{}) is not a reflected pair", b.i, b.j)));
            }
            cross.push((i, o));
        }
        ReflectionSetup::new(r.theta, r.negative_half, cross)
    }

    pub fn image(&self, site: usize) -> usize {
        self.theta[site - 1]
    }

    /// Fock slot of a site; negative-half sites come first.
    pub fn slot(&self, site: usize) -> usize {
        self.slots[site - 1]
    }

    fn in_negative(&self, site: usize) -> bool {
        self.negative_half.contains(&site)
    }

    fn check_sites(&self, p: &MajoranaPolynomial) -> Result<()> {
        match p.support().into_iter().find(|&s| s == 0 || s > self.n) {
            Some(s) => Err(Error::InvalidInput(format!("site {s} is outside 1..={}", self.n))),
            None => Ok(()),
        }
    }

    pub fn matrix(&self, rep: &MajoranaRep, p: &MajoranaPolynomial) -> Result<Mat<Complex64>> {
        self.check_sites(p)?;
        Ok(p.to_matrix(rep, |s| self.slot(s)))
    }
}

/// Applies the reflection to every term without restricting the support.
pub fn reflect_extended(p: &MajoranaPolynomial, setup: &ReflectionSetup) -> MajoranaPolynomial {
    let mut out = MajoranaPolynomial::zero();
    for (w, c) in &p.terms {
        let image: Vec<usize> = w.iter().map(|&s| setup.image(s)).collect();
        out.add_term(&image, c.conj());
    }
    out
}

/// Reflection of a polynomial supported on one side of the cut.
pub fn reflect(p: &MajoranaPolynomial, setup: &ReflectionSetup) -> Result<MajoranaPolynomial> {
    setup.check_sites(p)?;
    let support = p.support();
    let negative = support.iter().filter(|&&s| setup.in_negative(s)).count();
    if negative != 0 && negative != support.len() {
        return Err(Error::InvalidInput("polynomial support straddles the reflection plane".into()));
    }
    Ok(reflect_extended(p, setup))
}

/// Largest coefficient of `theta(H) - H`.
pub fn symmetry_defect(h: &MajoranaPolynomial, setup: &ReflectionSetup) -> f64 {
    reflect_extended(h, setup).distance(h)
}

/// `i sum_{k<l} A_kl c_k c_l` over 1-based sites.
pub fn quadratic_polynomial(a: &SkewAdjacency) -> MajoranaPolynomial {
    let mut p = MajoranaPolynomial::zero();
    let n = a.dim();
    for k in 0..n {
        for l in k + 1..n {
            let v = a.a[(k, l)];
            if v != 0.0 {
                p.add_term(&[k + 1, l + 1], Complex64::new(0.0, v));
            }
        }
    }
    p
}

/// Inverse of [`quadratic_polynomial`] when every term is a Hermitian bilinear.
pub fn quadratic_adjacency(p: &MajoranaPolynomial, n: usize) -> Option<SkewAdjacency> {
    let mut a = SkewAdjacency::zeros(n);
    for (w, c) in &p.terms {
        if c.norm() == 0.0 {
            continue;
        }
        if w.len() != 2 || c.re.abs() > 1e-14 * c.norm() || w[1] > n {
            return None;
        }
        a.set(w[0] - 1, w[1] - 1, c.im);
    }
    Some(a)
}

pub fn ladder_hamiltonian(ladder: &Ladder, j: &CouplingConfig, g: &GaugeConfig) -> MajoranaPolynomial {
    quadratic_polynomial(&assemble_skew(ladder, j, g))
}

/// Effective coupling `A_(i, theta i)` of a cross pair, read from the `c_i c_theta(i)` term.
pub fn cross_coupling(h: &MajoranaPolynomial, setup: &ReflectionSetup, i: usize) -> f64 {
    let (w, sign) = canonicalize(&[i, setup.image(i)]);
    h.terms.get(&w).map_or(0.0, |c| sign * c.im)
}

/// Site signs on the negative half making every cross coupling positive.
pub fn fix_cross_signs(a: &SkewAdjacency, setup: &ReflectionSetup) -> Result<(SkewAdjacency, SignAssignment)> {
    if a.dim() != setup.n {
        return Err(Error::InvalidInput(format!("matrix size {} does not match {} sites", a.dim(), setup.n)));
    }
    let mut s = SignAssignment::identity(setup.n);
    for &(i, t) in &setup.cross {
        let v = a.a[(i - 1, t - 1)];
        if v == 0.0 {
            return Err(Error::Precondition(format!("cross bond ({i},{t}) has zero coupling")));
        }
        if v < 0.0 {
            s.flip(i);
        }
    }
    let n = setup.n;
    let mut out = SkewAdjacency::zeros(n);
    for k in 0..n {
        for l in 0..n {
            out.a[(k, l)] = a.a[(k, l)] * f64::from(s.s[k] * s.s[l]);
        }
    }
    Ok((out, s))
}

/// Gauge field with all cross couplings of a ladder made positive.
pub fn fix_cross_signs_ladder(
    ladder: &Ladder,
    j: &CouplingConfig,
    g: &GaugeConfig,
    setup: &ReflectionSetup,
) -> Result<(GaugeConfig, SignAssignment)> {
    let (_, s) = fix_cross_signs(&assemble_skew(ladder, j, g), setup)?;
    Ok((apply_gauge(g, ladder, &s), s))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSplit {
    pub minus: MajoranaPolynomial,
    /// Cross bonds and the constant term.
    pub cross: MajoranaPolynomial,
    pub plus: MajoranaPolynomial,
}

pub fn split_hamiltonian(h: &MajoranaPolynomial, setup: &ReflectionSetup) -> Result<HamiltonianSplit> {
    setup.check_sites(h)?;
    let mut out =
        HamiltonianSplit { minus: MajoranaPolynomial::zero(), cross: MajoranaPolynomial::zero(), plus: MajoranaPolynomial::zero() };
    for (w, &c) in &h.terms {
        let neg = w.iter().filter(|&&s| setup.in_negative(s)).count();
        let target = if w.is_empty() {
            &mut out.cross
        } else if neg == w.len() {
            &mut out.minus
        } else if neg == 0 {
            &mut out.plus
        } else if w.len() == 2 && setup.image(w[0]) == w[1] {
            &mut out.cross
        } else {
            return Err(Error::InvalidInput(format!("term {w:?} couples the halves outside a reflected pair")));
        };
        target.terms.insert(w.clone(), c);
    }
    Ok(out)
}

/// `H1 = H- + H0 + theta(H-)` and `H2 = theta(H+) + H0 + H+`.
pub fn doubled_hamiltonians(
    minus: &MajoranaPolynomial,
    cross: &MajoranaPolynomial,
    plus: &MajoranaPolynomial,
    setup: &ReflectionSetup,
) -> Result<(MajoranaPolynomial, MajoranaPolynomial)> {
    let split = split_hamiltonian(&minus.add(cross).add(plus), setup)?;
    if split.minus.distance(minus) > 0.0 || split.plus.distance(plus) > 0.0 || split.cross.distance(cross) > 0.0 {
        return Err(Error::InvalidInput("parts are not supported on their halves".into()));
    }
    let h1 = minus.add(cross).add(&reflect(minus, setup)?);
    let h2 = reflect(plus, setup)?.add(cross).add(plus);
    for h in [&h1, &h2] {
        let d = symmetry_defect(h, setup);
        if d > SYMMETRY_TOL * h.max_coefficient().max(1.0) {
            return Err(Error::Precondition(format!("doubled Hamiltonian is not reflection symmetric ({d:.1e})")));
        }
    }
    Ok((h1, h2))
}

fn spectrum(h: &MajoranaPolynomial, setup: &ReflectionSetup, rep: &MajoranaRep) -> Result<Vec<f64>> {
    let m = setup.matrix(rep, h)?;
    let d = linalg::hermitian_defect(&m);
    if d > 1e-10 * h.max_coefficient().max(1.0) {
        return Err(Error::NotHermitian(d));
    }
    linalg::herm_eigenvalues(&m)
}

/// Evaluates `Tr(B theta(B) exp(-beta H))` for a fixed Hamiltonian.
pub struct RpEvaluator<'a> {
    setup: &'a ReflectionSetup,
    rep: MajoranaRep,
    values: Vec<f64>,
    vectors: Mat<Complex64>,
}

impl<'a> RpEvaluator<'a> {
    /// Requires a reflection-symmetric H whose cross couplings are all positive.
    pub fn new(setup: &'a ReflectionSetup, h: &MajoranaPolynomial) -> Result<Self> {
        if let Some(&(i, t)) = setup.cross.iter().find(|&&(i, _)| !(cross_coupling(h, setup, i) > 0.0)) {
            return Err(Error::Precondition(format!("cross coupling ({i},{t}) is not positive")));
        }
        Self::without_sign_check(setup, h)
    }

    /// Skips the cross-sign precondition; used to show that it is needed.
    pub fn without_sign_check(setup: &'a ReflectionSetup, h: &MajoranaPolynomial) -> Result<Self> {
        let d = symmetry_defect(h, setup);
        if d > SYMMETRY_TOL * h.max_coefficient().max(1.0) {
            return Err(Error::Precondition(format!("Hamiltonian is not reflection symmetric ({d:.1e})")));
        }
        let rep = fock_majoranas(setup.n)?;
        let m = setup.matrix(&rep, h)?;
        let defect = linalg::hermitian_defect(&m);
        if defect > 1e-10 * h.max_coefficient().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let (values, vectors) = linalg::herm_eigen(&m)?;
        Ok(RpEvaluator { setup, rep, values, vectors })
    }

    pub fn boltzmann(&self, beta: f64) -> Mat<Complex64> {
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = (-beta * lam).exp();
            for i in 0..scaled.nrows() {
                scaled[(i, k)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    fn check_element(&self, b: &MajoranaPolynomial) -> Result<()> {
        if !b.is_even() {
            return Err(Error::InvalidInput("B must be even".into()));
        }
        if b.support().iter().any(|s| !self.setup.in_negative(*s)) {
            return Err(Error::InvalidInput("B must be supported on the negative half".into()));
        }
        Ok(())
    }

    /// Functional against a precomputed `exp(-beta H)`.
    pub fn functional_with(&self, b: &MajoranaPolynomial, boltzmann: &Mat<Complex64>) -> Result<f64> {
        self.check_element(b)?;
        let bm = self.setup.matrix(&self.rep, b)?;
        let tb = self.setup.matrix(&self.rep, &reflect(b, self.setup)?)?;
        let prod = &(&bm * &tb) * boltzmann;
        let tr: Complex64 = (0..prod.nrows()).map(|i| prod[(i, i)]).sum();
        if tr.im.abs() > FUNCTIONAL_TOL * tr.re.abs().max(1.0) {
            return Err(Error::Precondition(format!("functional has imaginary part {:.3e}", tr.im)));
        }
        Ok(tr.re)
    }

    pub fn functional(&self, b: &MajoranaPolynomial, beta: f64) -> Result<f64> {
        self.functional_with(b, &self.boltzmann(beta))
    }

    /// Lowest eigenvalue of the Hermitian form `B -> Tr(B theta(B) e^{-beta H})` on even
    /// monomials up to `max_degree`, with a minimizing B.
    pub fn gram_minimum(&self, beta: f64, max_degree: usize) -> Result<(f64, MajoranaPolynomial)> {
        let words = even_words(self.setup, max_degree);
        let e = self.boltzmann(beta);
        let mats: Vec<Mat<Complex64>> =
            words.iter().map(|w| self.setup.matrix(&self.rep, &MajoranaPolynomial::monomial(w, Complex64::new(1.0, 0.0)))).collect::<Result<_>>()?;
        let refl: Vec<Mat<Complex64>> = words
            .iter()
            .map(|w| {
                let p = reflect(&MajoranaPolynomial::monomial(w, Complex64::new(1.0, 0.0)), self.setup)?;
                self.setup.matrix(&self.rep, &p)
            })
            .collect::<Result<_>>()?;
        let k = words.len();
        let mut g = Mat::<Complex64>::zeros(k, k);
        for s in 0..k {
            let left = &mats[s] * &e;
            for t in 0..k {
                let prod = &refl[t] * &left;
                g[(s, t)] = (0..prod.nrows()).map(|i| prod[(i, i)]).sum();
            }
        }
        // Tr(B theta(B) E) = v^dagger G v with v = conj(z) for B = sum z_S c_S.
        let herm = Mat::from_fn(k, k, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
        let (values, vectors) = linalg::herm_eigen(&herm)?;
        let mut b = MajoranaPolynomial::zero();
        for (i, w) in words.iter().enumerate() {
            b.add_term(w, vectors[(i, 0)].conj());
        }
        Ok((values[0], b))
    }
}

pub fn rp_functional(b: &MajoranaPolynomial, h: &MajoranaPolynomial, setup: &ReflectionSetup, beta: f64) -> Result<f64> {
    RpEvaluator::new(setup, h)?.functional(b, beta)
}

fn even_words(setup: &ReflectionSetup, max_degree: usize) -> Vec<Vec<usize>> {
    let sites: Vec<usize> = setup.negative_half.iter().copied().collect();
    let mut words: Vec<Vec<usize>> = (0u32..1 << sites.len())
        .filter(|m| m.count_ones() % 2 == 0 && m.count_ones() as usize <= max_degree)
        .map(|m| sites.iter().enumerate().filter(|(k, _)| (m >> k) & 1 == 1).map(|(_, &s)| s).collect())
        .collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    words
}

/// Even element on the negative half with independent uniform complex coefficients in the unit
/// square on every monomial of degree at most `max_degree`.
pub fn random_even_element<R: Rng + ?Sized>(rng: &mut R, setup: &ReflectionSetup, max_degree: usize) -> MajoranaPolynomial {
    let mut b = MajoranaPolynomial::zero();
    for w in even_words(setup, max_degree) {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        b.add_term(&w, c);
    }
    b
}

fn log_trace_exp(values: &[f64], beta: f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    -beta * lo + values.iter().map(|v| (-beta * (v - lo)).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceBound {
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// margin / rhs
    pub relative_margin: f64,
    pub holds: bool,
}

/// `Tr e^{-beta H}` against `(Tr e^{-beta H1})^{1/2} (Tr e^{-beta H2})^{1/2}`.
pub fn trace_bound_check(
    h: &MajoranaPolynomial,
    h1: &MajoranaPolynomial,
    h2: &MajoranaPolynomial,
    setup: &ReflectionSetup,
    beta: f64,
) -> Result<TraceBound> {
    let rep = fock_majoranas(setup.n)?;
    let l0 = log_trace_exp(&spectrum(h, setup, &rep)?, beta);
    let lr = 0.5 * (log_trace_exp(&spectrum(h1, setup, &rep)?, beta) + log_trace_exp(&spectrum(h2, setup, &rep)?, beta));
    let relative_margin = (l0 - lr).exp_m1();
    let rhs = lr.exp();
    Ok(TraceBound { beta, lhs: l0.exp(), rhs, margin: relative_margin * rhs, relative_margin, holds: relative_margin <= TRACE_TOL })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    /// `E0(H) - (E0(H1) + E0(H2)) / 2`, nonnegative when the inequality holds.
    pub gap: f64,
    pub holds: bool,
    /// Matrix ground energy minus the free-fermion value, for quadratic H.
    pub free_fermion_delta: Option<f64>,
}

pub fn energy_inequality_check(
    h: &MajoranaPolynomial,
    h1: &MajoranaPolynomial,
    h2: &MajoranaPolynomial,
    setup: &ReflectionSetup,
) -> Result<EnergyCheck> {
    let rep = fock_majoranas(setup.n)?;
    let e0 = spectrum(h, setup, &rep)?[0];
    let e1 = spectrum(h1, setup, &rep)?[0];
    let e2 = spectrum(h2, setup, &rep)?[0];
    let gap = e0 - 0.5 * (e1 + e2);
    let free_fermion_delta = match quadratic_adjacency(h, setup.n) {
        Some(a) => Some(e0 - ground_energy(&mode_spectrum(&a)?)),
        None => None,
    };
    let holds = e0 <= ENERGY_TOL && gap >= -ENERGY_TOL && free_fermion_delta.is_none_or(|d| d.abs() <= FREE_FERMION_TOL);
    Ok(EnergyCheck { e0, e1, e2, gap, holds, free_fermion_delta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct RpOptions {
    pub betas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub max_degree: usize,
}

impl Default for RpOptions {
    fn default() -> Self {
        RpOptions { betas: vec![0.5, 1.0, 2.0], samples: 200, seed: 0, max_degree: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RpReport {
    pub samples: usize,
    pub min_functional: f64,
    /// Largest relative trace-bound margin over the beta grid.
    pub trace_margin: f64,
    pub energy_gap: f64,
    pub verdict: Verdict,
}

fn sample_minimum(eval: &RpEvaluator, opts: &RpOptions, rng: &mut ChaCha8Rng) -> Result<f64> {
    let elements: Vec<MajoranaPolynomial> =
        (0..opts.samples).map(|_| random_even_element(rng, eval.setup, opts.max_degree)).collect();
    let mut worst = f64::INFINITY;
    for &beta in &opts.betas {
        let e = eval.boltzmann(beta);
        let values: Vec<f64> = elements.par_iter().map(|b| eval.functional_with(b, &e)).collect::<Result<_>>()?;
        worst = values.into_iter().fold(worst, f64::min);
    }
    Ok(worst)
}

/// Full check for an H with positive cross couplings: sampled functional on both doubled
/// Hamiltonians, the trace bound on the beta grid and the ground-energy inequality.
pub fn verify(h: &MajoranaPolynomial, setup: &ReflectionSetup, opts: &RpOptions) -> Result<RpReport> {
    if let Some(&(i, t)) = setup.cross.iter().find(|&&(i, _)| !(cross_coupling(h, setup, i) > 0.0)) {
        return Err(Error::Precondition(format!("cross coupling ({i},{t}) is not positive")));
    }
    let split = split_hamiltonian(h, setup)?;
    let (h1, h2) = doubled_hamiltonians(&split.minus, &split.cross, &split.plus, setup)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut min_functional = f64::INFINITY;
    for hd in [&h1, &h2] {
        let eval = RpEvaluator::new(setup, hd)?;
        min_functional = min_functional.min(sample_minimum(&eval, opts, &mut rng)?);
    }
    let mut trace_margin = f64::NEG_INFINITY;
    let mut trace_ok = true;
    for &beta in &opts.betas {
        let t = trace_bound_check(h, &h1, &h2, setup, beta)?;
        trace_margin = trace_margin.max(t.relative_margin);
        trace_ok &= t.holds;
    }
    let energy = energy_inequality_check(h, &h1, &h2, setup)?;
    let pass = min_functional >= -FUNCTIONAL_TOL && trace_ok && energy.holds;
    Ok(RpReport {
        samples: opts.samples,
        min_functional,
        trace_margin,
        energy_gap: energy.gap,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationProbe {
    pub samples: usize,
    pub flipped: (usize, usize),
    pub min_functional: f64,
    pub gram_minimum: f64,
    /// Pass when a sampled B shows a violation beyond the tolerance.
    pub verdict: Verdict,
}

/// Negates one cross coupling of a symmetric H (so the cross signs are mixed) and samples the
/// functional without the sign precondition, looking for a negative value.
pub fn probe_violation(h: &MajoranaPolynomial, setup: &ReflectionSetup, opts: &RpOptions) -> Result<ViolationProbe> {
    let &(i, t) = setup.cross.first().ok_or_else(|| Error::InvalidInput("no cross bonds".into()))?;
    if setup.cross.len() < 2 {
        return Err(Error::InvalidInput("a single cross bond cannot carry mixed signs".into()));
    }
    let (w, _) = canonicalize(&[i, t]);
    let mut flipped = h.clone();
    if let Some(c) = flipped.terms.get_mut(&w) {
        *c = -*c;
    }
    let eval = RpEvaluator::without_sign_check(setup, &flipped)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let min_functional = sample_minimum(&eval, opts, &mut rng)?;
    let mut gram_minimum = f64::INFINITY;
    for &beta in &opts.betas {
        gram_minimum = gram_minimum.min(eval.gram_minimum(beta, opts.max_degree)?.0);
    }
    let verdict = if min_functional < -VIOLATION_TOL { Verdict::Pass } else { Verdict::Inconclusive };
    Ok(ViolationProbe { samples: opts.samples, flipped: (i, t), min_functional, gram_minimum, verdict })
}
