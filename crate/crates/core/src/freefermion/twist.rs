//! Energy shift from flipping the links that close a ring of two-site cells.
//!
//! With `A` periodic block-tridiagonal over cells (2c-1, 2c), the shift is
//!
//!   E(A twisted) - E(A) = (1/pi) int_0^inf log[det(w + A) / det(w + A twisted)] dw,
//!
//! and the determinant ratio reduces to det(T - 1) / det(T + 1) for the ring
//! transfer matrix T. Its traces are tracked through the exterior powers of T
//! with separate log scales, so the ratio stays accurate even when the shift
//! is far below double-precision roundoff of the total energy.

use super::SkewAdjacency;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TransferOptions {
    /// Frequency scale of the substitution w = s t / (1 - t); `None` uses the largest |A_ij|.
    pub scale: Option<f64>,
    /// Absolute error target handed to the quadrature; zero refines to the finest level.
    pub abs_tol: f64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { scale: None, abs_tol: 0.0 }
    }
}

#[derive(Clone, Debug)]
struct Small {
    n: usize,
    d: Vec<f64>,
}

impl Small {
    fn identity(n: usize) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            d[i * n + i] = 1.0;
        }
        Small { n, d }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    fn mul(&self, other: &Small) -> Small {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a != 0.0 {
                    for j in 0..n {
                        d[i * n + j] += a * other.at(k, j);
                    }
                }
            }
        }
        Small { n, d }
    }

    fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    /// Divides by the largest entry and returns its logarithm.
    fn normalize(&mut self) -> f64 {
        let m = self.d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 || !m.is_finite() {
            return 0.0;
        }
        self.d.iter_mut().for_each(|v| *v /= m);
        m.ln()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn minor(m: &Small, rows: &[usize], cols: &[usize]) -> f64 {
    let e = |a: usize, b: usize| m.at(rows[a], cols[b]);
    match rows.len() {
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        _ => unreachable!("only 2- and 3-minors are needed"),
    }
}

fn compound(m: &Small, sets: &[Vec<usize>]) -> Small {
    let k = sets.len();
    let mut d = Vec::with_capacity(k * k);
    for r in sets {
        for c in sets {
            d.push(minor(m, r, c));
        }
    }
    Small { n: k, d }
}

struct Ring {
    /// Per cell: (D without the frequency, C to the next cell, B to the previous cell), 2x2 row-major.
    cells: Vec<([f64; 4], [f64; 4], [f64; 4])>,
    pairs: Vec<Vec<usize>>,
    triples: Vec<Vec<usize>>,
}

impl Ring {
    fn new(a: &SkewAdjacency) -> Result<Ring> {
        let n = a.dim();
        if n % 2 != 0 || n < 8 {
            return Err(Error::Precondition(format!("ring transfer needs at least four two-site cells, got dim {n}")));
        }
        let nc = n / 2;
        let block = |p: usize, q: usize| -> [f64; 4] {
            [a.a[(2 * p, 2 * q)], a.a[(2 * p, 2 * q + 1)], a.a[(2 * p + 1, 2 * q)], a.a[(2 * p + 1, 2 * q + 1)]]
        };
        for p in 0..nc {
            for q in 0..nc {
                let dist = (p + nc - q) % nc;
                if dist > 1 && dist < nc - 1 && block(p, q).iter().any(|&v| v != 0.0) {
                    return Err(Error::Precondition(format!("cells {p} and {q} couple beyond nearest neighbours")));
                }
            }
        }
        let cells: Vec<_> = (0..nc).map(|c| (block(c, c), block(c, (c + 1) % nc), block(c, (c + nc - 1) % nc))).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for (c, (_, cm, _)) in cells.iter().enumerate() {
            let det = cm[0] * cm[3] - cm[1] * cm[2];
            if det.abs() <= 1e-12 * scale * scale {
                return Err(Error::Precondition(format!("coupling block between cells {c} and {} is singular", (c + 1) % nc)));
            }
        }
        Ok(Ring { cells, pairs: subsets(4, 2), triples: subsets(4, 3) })
    }

    /// log[det(w + A) / det(w + A twisted)].
    fn log_ratio(&self, w: f64) -> f64 {
        let mut p1 = Small::identity(4);
        let mut p2 = Small::identity(6);
        let mut p3 = Small::identity(4);
        let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
        for (dm, cm, bm) in &self.cells {
            let det = cm[0] * cm[3] - cm[1] * cm[2];
            let ci = [cm[3] / det, -cm[1] / det, -cm[2] / det, cm[0] / det];
            let d = [dm[0] + w, dm[1], dm[2], dm[3] + w];
            let mul = |x: &[f64; 4], y: &[f64; 4]| {
                [
                    x[0] * y[0] + x[1] * y[2],
                    x[0] * y[1] + x[1] * y[3],
                    x[2] * y[0] + x[3] * y[2],
                    x[2] * y[1] + x[3] * y[3],
                ]
            };
            let cd = mul(&ci, &d);
            let cb = mul(&ci, bm);
            let t = Small {
                n: 4,
                d: vec![
                    -cd[0], -cd[1], -cb[0], -cb[1], //
                    -cd[2], -cd[3], -cb[2], -cb[3], //
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0,
                ],
            };
            p1 = t.mul(&p1);
            p2 = compound(&t, &self.pairs).mul(&p2);
            p3 = compound(&t, &self.triples).mul(&p3);
            s1 += p1.normalize();
            s2 += p2.normalize();
            s3 += p3.normalize();
        }
        // det(T -/+ 1) = 1 -/+ e1 + e2 -/+ e3 + e4 with e_k = tr of the k-th exterior
        // power; e4 = det T = 1 because the B blocks are minus transposes of the C blocks.
        let e1 = p1.trace() * (s1 - s2).exp();
        let e3 = p3.trace() * (s3 - s2).exp();
        let num = -2.0 * (e1 + e3);
        let den = p2.trace() + 2.0 * (-s2).exp() + e1 + e3;
        (num / den).ln_1p()
    }
}

/// `E(A with the ring closing links negated) - E(A)` for a ring of two-site cells.
pub fn twist_energy_shift(a: &SkewAdjacency, options: &TransferOptions) -> Result<f64> {
    let ring = Ring::new(a)?;
    let s = options.scale.unwrap_or_else(|| a.max_abs()).max(f64::MIN_POSITIVE);
    let integrand = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let w = s * t / (1.0 - t);
        ring.log_ratio(w) * s / ((1.0 - t) * (1.0 - t))
    };
    let out = quadrature::double_exponential::integrate(integrand, 0.0, 1.0, options.abs_tol);
    if !out.integral.is_finite() {
        return Err(Error::Convergence { message: "twist integral is not finite".into(), residuals: vec![] });
    }
    Ok(out.integral / std::f64::consts::PI)
}
