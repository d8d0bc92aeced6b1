//! Restarted Lanczos with full reorthogonalization and locking of converged pairs.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_hermitian, Eigenvectors, Method, SpectrumReport, ITERATIVE_K_LIMIT, ITERATIVE_SPIN_LIMIT};
use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::SpinOperator;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub keep_vectors: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-8, krylov_dim: 40, max_restarts: 400, keep_vectors: false }
    }
}

const CHUNK: usize = 1 << 14;

// Chunked partial sums combined in a fixed order keep results independent of the thread count.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let parts: Vec<f64> =
        a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum()).collect();
    parts.iter().sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK).zip(x.par_chunks(CHUNK)).for_each(|(ys, xs)| {
        for (v, u) in ys.iter_mut().zip(xs) {
            *v += alpha * u;
        }
    });
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    a.par_iter_mut().for_each(|v| *v *= s);
}

/// Two passes of classical Gram-Schmidt against every vector in `basis`.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize, locked: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..4 {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, locked);
        let nv = norm(&v);
        if nv > 1e-8 {
            scale(&mut v, 1.0 / nv);
            return Some(v);
        }
    }
    None
}

pub fn lowest_eigenvalues(op: &SpinOperator, k: usize, seed: u64) -> Result<SpectrumReport> {
    lowest_eigenvalues_with(op, k, seed, &LanczosOptions::default())
}

pub fn lowest_eigenvalues_with(op: &SpinOperator, k: usize, seed: u64, opts: &LanczosOptions) -> Result<SpectrumReport> {
    if op.n_spins > ITERATIVE_SPIN_LIMIT {
        return Err(Error::Guard(format!("{} spins exceed the iterative limit of {ITERATIVE_SPIN_LIMIT}", op.n_spins)));
    }
    if k == 0 || k > ITERATIVE_K_LIMIT {
        return Err(Error::Guard(format!("k = {k} must lie in 1..={ITERATIVE_K_LIMIT}")));
    }
    check_hermitian(op)?;
    if !op.is_real() {
        return Err(Error::InvalidInput("the iterative solver handles real operators only".into()));
    }
    let dim = op.dim();
    if k > dim {
        return Err(Error::Guard(format!("k = {k} exceeds the dimension {dim}")));
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; dim];
        op.apply_real(v, &mut out).expect("dimensions match");
        out
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut locked_values: Vec<f64> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    let mut start = random_unit(&mut rng, dim, &locked).expect("nonzero dimension");
    let mut last_residual = f64::INFINITY;

    for _ in 0..opts.max_restarts {
        let m = opts.krylov_dim.min(dim - locked.len()).max(1);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        loop {
            let j = basis.len() - 1;
            let mut w = apply(&basis[j]);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            orthogonalize(&mut w, &locked);
            orthogonalize(&mut w, &basis);
            let b = norm(&w);
            if basis.len() == m || b <= 1e-12 * a.abs().max(1.0) {
                beta.push(b);
                break;
            }
            scale(&mut w, 1.0 / b);
            beta.push(b);
            basis.push(w);
        }
        let size = basis.len();
        let t = Mat::from_fn(size, size, |i, j| {
            if i == j {
                alpha[i]
            } else if i == j + 1 {
                beta[j]
            } else if j == i + 1 {
                beta[i]
            } else {
                0.0
            }
        });
        let (theta, y) = linalg::sym_eigen(&t)?;
        let ritz = |col: usize| -> Vec<f64> {
            let mut x = vec![0.0; dim];
            for (i, q) in basis.iter().enumerate() {
                axpy(y[(i, col)], q, &mut x);
            }
            let nx = norm(&x);
            scale(&mut x, 1.0 / nx);
            x
        };

        let mut restart = None;
        for col in 0..theta.len() {
            let mut x = ritz(col);
            orthogonalize(&mut x, &locked);
            let nx = norm(&x);
            scale(&mut x, 1.0 / nx);
            let hx = apply(&x);
            let lam = dot(&x, &hx);
            let mut r = hx;
            axpy(-lam, &x, &mut r);
            let res = norm(&r);
            if res <= opts.tol {
                locked.push(x);
                locked_values.push(lam);
                residuals.push(res);
                if locked.len() == k {
                    break;
                }
            } else {
                last_residual = res;
                restart = Some(x);
                break;
            }
        }
        if locked.len() >= k {
            break;
        }
        start = match restart {
            Some(mut x) => {
                // A small random admixture keeps every symmetry sector reachable after restarts.
                let noise = random_unit(&mut rng, dim, &locked).expect("complement is nonempty");
                axpy(1e-4, &noise, &mut x);
                orthogonalize(&mut x, &locked);
                let nx = norm(&x);
                scale(&mut x, 1.0 / nx);
                x
            }
            None => match random_unit(&mut rng, dim, &locked) {
                Some(v) => v,
                None => break,
            },
        };
    }

    if locked.len() < k {
        let mut all = residuals.clone();
        all.push(last_residual);
        return Err(Error::Convergence {
            message: format!("{} of {k} eigenpairs converged to {:.1e}", locked.len(), opts.tol),
            residuals: all,
        });
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| locked_values[a].total_cmp(&locked_values[b]));
    let mut report = SpectrumReport::new(Method::IterativeLowest(k), order.iter().map(|&i| locked_values[i]).collect());
    report.residuals = Some(order.iter().map(|&i| residuals[i]).collect());
    if opts.keep_vectors {
        report.vectors = Some(Eigenvectors(Mat::from_fn(dim, k, |r, c| locked[order[c]][r])));
    }
    Ok(report)
}
