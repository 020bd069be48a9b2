//! Normalized-Laplacian spectrum.
//!
//! `L_ij = 1` on the diagonal, `-1/sqrt(k_i k_j)` where `i ~ j`, else 0. All
//! eigenvalues lie in `[0, 2]`; a connected graph has exactly one zero mode.

use crate::error::{domain, Result};
use crate::graph::Graph;
use nalgebra::DMatrix;

/// Eigenvalues below this are treated as the zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-8;

/// Above this size, [`lambda_extremes_auto`] switches from the dense solver
/// to the iterative estimator.
const DENSE_LIMIT: usize = 2048;

fn check_input(g: &Graph) -> Result<()> {
    if g.n() < 2 {
        return Err(domain("spectrum requires at least two nodes"));
    }
    if (0..g.n() as u32).any(|v| g.degree_of(v) == 0) {
        return Err(domain("spectrum requires no isolated nodes"));
    }
    if !g.is_connected() {
        return Err(domain(
            "graph is disconnected (multiple zero modes); extract the giant connected component first",
        ));
    }
    Ok(())
}

pub fn normalized_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n as u32)
        .map(|v| {
            let k = g.degree_of(v) as f64;
            if k > 0.0 {
                1.0 / k.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut l = DMatrix::<f64>::identity(n, n);
    for (u, v) in g.edges() {
        let w = -inv_sqrt[u as usize] * inv_sqrt[v as usize];
        l[(u as usize, v as usize)] = w;
        l[(v as usize, u as usize)] = w;
    }
    l
}

/// Full spectrum, ascending. Dense symmetric eigendecomposition; fine up to
/// a few thousand nodes.
pub fn laplacian_spectrum(g: &Graph) -> Result<Vec<f64>> {
    check_input(g)?;
    let eig = nalgebra::SymmetricEigen::new(normalized_laplacian(g));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// `(λ1, λ_{n-1})`: the smallest nonzero and the largest eigenvalue.
pub fn laplacian_extremes(g: &Graph) -> Result<(f64, f64)> {
    let vals = laplacian_spectrum(g)?;
    extremes_from_spectrum(&vals)
}

fn extremes_from_spectrum(vals: &[f64]) -> Result<(f64, f64)> {
    let zero_modes = vals.iter().filter(|&&v| v.abs() < ZERO_MODE_TOL).count();
    if zero_modes != 1 {
        return Err(domain(format!(
            "expected exactly one zero eigenvalue, found {zero_modes}"
        )));
    }
    let lambda1 = vals
        .iter()
        .copied()
        .find(|&v| v.abs() >= ZERO_MODE_TOL)
        .ok_or_else(|| domain("no nonzero eigenvalue"))?;
    Ok((lambda1, *vals.last().unwrap()))
}

/// Extremes via the dense solver for small graphs, or deflated power
/// iteration for large ones (estimate, relative accuracy ~1e-6).
pub fn lambda_extremes_auto(g: &Graph) -> Result<(f64, f64)> {
    if g.n() <= DENSE_LIMIT {
        laplacian_extremes(g)
    } else {
        check_input(g)?;
        Ok((estimate_lambda1(g), estimate_lambda_max(g)))
    }
}

fn matvec_laplacian(g: &Graph, inv_sqrt: &[f64], x: &[f64], y: &mut [f64]) {
    for v in 0..g.n() {
        let mut acc = 0.0;
        for &w in g.neighbors(v as u32) {
            acc += x[w as usize] * inv_sqrt[w as usize];
        }
        y[v] = x[v] - acc * inv_sqrt[v];
    }
}

fn inv_sqrt_degrees(g: &Graph) -> Vec<f64> {
    (0..g.n() as u32)
        .map(|v| 1.0 / (g.degree_of(v) as f64).sqrt())
        .collect()
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

fn estimate_lambda_max(g: &Graph) -> f64 {
    let n = g.n();
    let inv_sqrt = inv_sqrt_degrees(g);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 13) as f64 / 13.0).collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut last = 0.0;
    for _ in 0..2000 {
        matvec_laplacian(g, &inv_sqrt, &x, &mut y);
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        std::mem::swap(&mut x, &mut y);
        normalize(&mut x);
        if (rq - last).abs() < 1e-9 * rq.abs().max(1.0) {
            return rq;
        }
        last = rq;
    }
    last
}

fn estimate_lambda1(g: &Graph) -> f64 {
    // power iteration on 2I - L, deflating the known zero mode of L
    // (v0 proportional to sqrt(k)); the top remaining eigenvalue is 2 - λ1
    let n = g.n();
    let inv_sqrt = inv_sqrt_degrees(g);
    let mut v0: Vec<f64> = (0..n as u32).map(|v| (g.degree_of(v) as f64).sqrt()).collect();
    normalize(&mut v0);
    let deflate = |x: &mut [f64]| {
        let dot: f64 = x.iter().zip(&v0).map(|(a, b)| a * b).sum();
        for (xi, v0i) in x.iter_mut().zip(&v0) {
            *xi -= dot * v0i;
        }
    };
    let mut x: Vec<f64> = (0..n).map(|i| ((i * 31 + 7) % 101) as f64 / 101.0 - 0.5).collect();
    deflate(&mut x);
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut last = 0.0;
    for _ in 0..5000 {
        matvec_laplacian(g, &inv_sqrt, &x, &mut y);
        // y := 2x - Lx
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi = 2.0 * xi - *yi;
        }
        deflate(&mut y);
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        std::mem::swap(&mut x, &mut y);
        normalize(&mut x);
        if (rq - last).abs() < 1e-9 * rq.abs().max(1.0) {
            return 2.0 - rq;
        }
        last = rq;
    }
    2.0 - last
}
