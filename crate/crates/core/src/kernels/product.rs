//! Environment products evaluated in log space.
//!
//! `K_m(t) = Π_j (|α_j|² e^{i m g_j t} + |β_j|² e^{-i m g_j t})` is the
//! common factor of every Decomposition-1 expectation value: `K_{-1}` is the
//! overlap `r(t)`, `K_{l-l'}` the block kernel `T_{l,l'}` and `K_{2l-M}` the
//! mirror-block kernel `T_{l,M-l}`.
//!
//! Particles are processed in chunks of [`CHUNK`]. Each chunk accumulates
//! `Σ ln|z_j|` and `Σ arg z_j` sequentially, reduces its phase into
//! `[0, 2π)`, and chunk partials are folded in chunk order. Results are
//! therefore identical for any number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

use super::logcomplex::{reduce_phase, LogComplex};
use crate::error::{Error, Result};
use crate::model::{CouplingMode, EnsembleStream, EnvironmentEnsemble, Hermitian2};

pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    log: f64,
    phase: f64,
}

fn fold_partials(n_times: usize, chunks: impl IntoIterator<Item = Vec<Partial>>) -> Vec<LogComplex> {
    let mut acc = vec![Partial::default(); n_times];
    for chunk in chunks {
        for (a, c) in acc.iter_mut().zip(chunk) {
            a.log += c.log;
            a.phase = reduce_phase(a.phase + c.phase);
        }
    }
    acc.into_iter()
        .map(|p| LogComplex::new(p.log, p.phase))
        .collect()
}

/// Partial sums of `ln|z|` and `arg z` for `z_j = p e^{iθ} + q e^{-iθ}`,
/// `θ = m g_j t`, over one chunk of particles.
fn kernel_chunk(
    alpha: &[Complex64],
    beta: &[Complex64],
    g: &[f64],
    m: i64,
    times: &[f64],
    with_phase: bool,
) -> Vec<Partial> {
    let mf = m as f64;
    let mut acc = vec![Partial::default(); times.len()];
    let mut sin2 = vec![0.0; times.len()];
    let mut sin = vec![0.0; times.len()];
    let mut cos = vec![0.0; times.len()];
    let mut cached_g = f64::NAN;
    for j in 0..alpha.len() {
        if g[j] != cached_g {
            cached_g = g[j];
            for (k, &t) in times.iter().enumerate() {
                let (s, c) = (mf * cached_g * t).sin_cos();
                sin[k] = s;
                cos[k] = c;
                sin2[k] = s * s;
            }
        }
        let p = alpha[j].norm_sqr();
        let q = beta[j].norm_sqr();
        let four_pq = 4.0 * p * q;
        let diff = p - q;
        for k in 0..times.len() {
            // |z|² = 1 - 4pq sin²θ
            acc[k].log += 0.5 * (-four_pq * sin2[k]).ln_1p();
            if with_phase {
                acc[k].phase += (diff * sin[k]).atan2(cos[k]);
            }
        }
    }
    for a in &mut acc {
        a.phase = reduce_phase(a.phase);
    }
    acc
}

fn kernel_series_impl(ens: &EnvironmentEnsemble, m: i64, times: &[f64], with_phase: bool) -> Vec<LogComplex> {
    if m == 0 {
        return vec![LogComplex::ONE; times.len()];
    }
    let partials: Vec<Vec<Partial>> = ens
        .alpha()
        .par_chunks(CHUNK)
        .zip(ens.beta().par_chunks(CHUNK))
        .zip(ens.g().par_chunks(CHUNK))
        .map(|((a, b), g)| kernel_chunk(a, b, g, m, times, with_phase))
        .collect();
    fold_partials(times.len(), partials)
}

/// `K_m(t_k)` for every time in `times`.
///
/// Negative `m` is evaluated as the conjugate of `K_{|m|}`, so
/// `K_{-m} = conj(K_m)` holds bit for bit.
pub fn kernel_k_series(m: i64, ens: &EnvironmentEnsemble, times: &[f64]) -> Vec<LogComplex> {
    let out = kernel_series_impl(ens, m.abs(), times, true);
    if m < 0 {
        out.into_iter().map(|z| z.conj()).collect()
    } else {
        out
    }
}

pub fn kernel_k(m: i64, ens: &EnvironmentEnsemble, t: f64) -> LogComplex {
    kernel_k_series(m, ens, &[t])[0]
}

/// `ln |K_m(t_k)|` without the phase bookkeeping.
pub fn kernel_log_abs_series(m: i64, ens: &EnvironmentEnsemble, times: &[f64]) -> Vec<f64> {
    kernel_series_impl(ens, m.abs(), times, false)
        .into_iter()
        .map(|z| z.log_mag())
        .collect()
}

/// `|r(t)|²`.
pub fn r2_of_t(ens: &EnvironmentEnsemble, t: f64) -> f64 {
    r2_log_of_t(ens, t).exp()
}

/// `ln |r(t)|²`.
pub fn r2_log_of_t(ens: &EnvironmentEnsemble, t: f64) -> f64 {
    2.0 * kernel_log_abs_series(1, ens, &[t])[0]
}

/// `ln |r(t_k)|²` for a freshly generated random ensemble, without storing it.
///
/// Particles are drawn from the same stream as
/// [`make_random_ensemble`](crate::model::make_random_ensemble) and reduced
/// with the same chunking, so the result is bit-identical to building the
/// ensemble first. Memory stays at one chunk, which makes `N = 10⁹` feasible.
pub fn r2_log_series_streaming(n: usize, seed: u64, mode: CouplingMode, times: &[f64]) -> Result<Vec<f64>> {
    // Drawing is sequential; a batch of chunks is then reduced in parallel
    // and folded in chunk order.
    const BATCH: usize = 64;
    struct Chunk {
        a: Vec<Complex64>,
        b: Vec<Complex64>,
        g: Vec<f64>,
    }
    let mut stream = EnsembleStream::new(n, seed, mode)?;
    let mut acc = vec![0.0f64; times.len()];
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            let mut c = Chunk { a: Vec::with_capacity(CHUNK), b: Vec::with_capacity(CHUNK), g: Vec::with_capacity(CHUNK) };
            if stream.fill(CHUNK, &mut c.a, &mut c.b, &mut c.g) == 0 {
                break;
            }
            batch.push(c);
        }
        if batch.is_empty() {
            break;
        }
        let parts: Vec<Vec<Partial>> = batch
            .par_iter()
            .map(|c| kernel_chunk(&c.a, &c.b, &c.g, 1, times, false))
            .collect();
        for part in parts {
            for (x, p) in acc.iter_mut().zip(part) {
                *x += p.log;
            }
        }
    }
    Ok(acc.into_iter().map(|x| 2.0 * x).collect())
}

/// Product `Π_j [p ε↑↑ e^{iθ₁} + q ε↓↓ e^{-iθ₁} + 2 Re(α β* ε↓↑ e^{iθ₂})]`
/// with `θ₁ = w1 g_j t`, `θ₂ = w2 g_j t`: the ε-decorated block kernel.
pub fn decorated_kernel_series(
    ens: &EnvironmentEnsemble,
    eps: &[Hermitian2],
    w1: i64,
    w2: i64,
    times: &[f64],
) -> Result<Vec<LogComplex>> {
    if eps.len() != ens.n() {
        return Err(Error::invalid(format!(
            "{} observable factors for {} environment particles",
            eps.len(),
            ens.n()
        )));
    }
    let (w1, w2) = (w1 as f64, w2 as f64);
    let idx: Vec<usize> = (0..ens.n()).collect();
    let partials: Vec<Vec<Partial>> = idx
        .par_chunks(CHUNK)
        .map(|js| {
            let mut acc = vec![Partial::default(); times.len()];
            for &j in js {
                let p = ens.alpha()[j].norm_sqr();
                let q = ens.beta()[j].norm_sqr();
                let e = &eps[j];
                let cross = ens.alpha()[j] * ens.beta()[j].conj() * e.du;
                for (k, &t) in times.iter().enumerate() {
                    let th1 = w1 * ens.g()[j] * t;
                    let th2 = w2 * ens.g()[j] * t;
                    let z = p * e.uu * Complex64::cis(th1)
                        + q * e.dd * Complex64::cis(-th1)
                        + 2.0 * (cross * Complex64::cis(th2)).re;
                    let r = z.norm();
                    acc[k].log += r.ln();
                    if r > 0.0 {
                        acc[k].phase += z.im.atan2(z.re);
                    }
                }
            }
            for a in &mut acc {
                a.phase = reduce_phase(a.phase);
            }
            acc
        })
        .collect();
    Ok(fold_partials(times.len(), partials))
}

/// `T_{l,l'}(t)` for an `M`-particle system with per-particle environment
/// operators `eps`.
pub fn block_kernel(
    l: usize,
    lp: usize,
    m: usize,
    ens: &EnvironmentEnsemble,
    eps: &[Hermitian2],
    times: &[f64],
) -> Result<Vec<LogComplex>> {
    if l > m || lp > m {
        return Err(Error::invalid(format!("block pair ({l}, {lp}) outside 0..={m}")));
    }
    let w1 = l as i64 - lp as i64;
    let w2 = l as i64 + lp as i64 - m as i64;
    decorated_kernel_series(ens, eps, w1, w2, times)
}

/// `Γ₀(t) = Π_j [p ε↑↑ + q ε↓↓ + 2 Re(α β* ε↓↑ e^{i g t})]`, the
/// environment factor attached to the `|⇓⟩⟨⇓|` component of `P`. The
/// `|⇑⟩⟨⇑|` component uses `Γ₀(-t)`.
pub fn gamma0(ens: &EnvironmentEnsemble, eps: &[Hermitian2], t: f64) -> Result<Complex64> {
    Ok(decorated_kernel_series(ens, eps, 0, 1, &[t])?[0].to_complex())
}

/// `Γ₁(t) = ⟨E_⇓(t)| ⊗ε |E_⇑(t)⟩ = Π_j [p ε↑↑ e^{-igt} + q ε↓↓ e^{igt} + 2 Re(α β* ε↓↑)]`.
/// Reduces to `r(t)` for identity operators.
pub fn gamma1(ens: &EnvironmentEnsemble, eps: &[Hermitian2], t: f64) -> Result<Complex64> {
    Ok(decorated_kernel_series(ens, eps, -1, 0, &[t])?[0].to_complex())
}
