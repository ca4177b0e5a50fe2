//! Randomized quasi-Monte Carlo integration with digital shifts.
//!
//! A single digitally shifted estimate averages `f` over `ψ(P + σ)`; the
//! RMS error estimator draws `K` independent shifts and takes the sample
//! standard deviation of the `K` estimates around their mean.  Shift `k` of
//! lane `l` always comes from the stream `(seed, SHIFT, l, k)`, so results
//! are reproducible bit for bit no matter how the work is scheduled: the
//! parallel loops collect per-shift values in index order and reduce them
//! sequentially.

use crate::accum::Neumaier;
use crate::error::{Error, Result};
use crate::integrands::Integrand;
use crate::net::{
    scan_span_digits, scan_span_packed, DigitMatrix, DigitalNet, DigitalShift, NetParams,
};
use crate::rng::{stream_rng, DOMAIN_SHIFT};
use rand::Rng;
use rayon::prelude::*;

/// One shifted QMC estimate.
#[derive(Clone, Copy, Debug)]
pub struct QmcEstimate {
    pub value: f64,
    pub n_points: u64,
}

/// RMS error estimate over independent digital shifts.
#[derive(Clone, Copy, Debug)]
pub struct RmseReport {
    /// Mean of the shifted estimates.
    pub mean_of_estimates: f64,
    /// Sample standard deviation of the estimates (divisor `n_shifts − 1`).
    pub e_value: f64,
    /// `log2` of the above; `-inf` when the estimates are exactly equal.
    pub lg_e: f64,
    pub n_shifts: usize,
    pub seed: u64,
}

/// Draw a uniform digital shift from the given generator.
pub fn sample_shift_with(params: NetParams, rng: &mut impl Rng) -> DigitalShift {
    let mut sigma = DigitMatrix::zero(params.s, params.n);
    for i in 0..params.s {
        for j in 0..params.n {
            sigma.set(i, j, rng.random_range(0..params.b) as u8);
        }
    }
    DigitalShift { sigma }
}

/// Shift `index` of lane `lane`: the canonical stream assignment used by the
/// RMSE estimators.
pub fn sample_shift(params: NetParams, seed: u64, lane: u64, index: u64) -> DigitalShift {
    sample_shift_with(params, &mut stream_rng(seed, DOMAIN_SHIFT, lane, index))
}

/// Mean of `f` over the shifted point set `ψ(P + σ)` (multiset semantics on
/// a deficient basis).  Base-2 nets with `n ≤ 53` walk packed words.
pub fn qmc_integrate(net: &DigitalNet, sigma: &DigitalShift, f: &Integrand) -> Result<QmcEstimate> {
    integrate_impl(net, sigma, &[f], false).map(|v| v[0])
}

fn check_shapes(net: &DigitalNet, sigma: &DigitalShift, fns: &[&Integrand]) -> Result<()> {
    let p = net.params();
    if sigma.sigma.s() != p.s || sigma.sigma.n() != p.n {
        return Err(Error::ShapeMismatch(format!(
            "shift is {}x{}, net is {}x{}",
            sigma.sigma.s(),
            sigma.sigma.n(),
            p.s,
            p.n
        )));
    }
    for f in fns {
        if f.dimension() != p.s {
            return Err(Error::ShapeMismatch(format!(
                "integrand {} has dimension {}, net has s = {}",
                f.id(),
                f.dimension(),
                p.s
            )));
        }
    }
    Ok(())
}

fn integrate_impl(
    net: &DigitalNet,
    sigma: &DigitalShift,
    fns: &[&Integrand],
    force_digit_path: bool,
) -> Result<Vec<QmcEstimate>> {
    let p = net.params();
    check_shapes(net, sigma, fns)?;
    let mut sums = vec![Neumaier::new(); fns.len()];
    let mut count = 0u64;
    let mut x = vec![0.0f64; p.s];
    let mut bad: Option<Error> = None;
    let visit = |x: &[f64], sums: &mut [Neumaier], bad: &mut Option<Error>| {
        for (f, acc) in fns.iter().zip(sums.iter_mut()) {
            match f.eval(x) {
                Ok(v) => acc.add(v),
                Err(e) => {
                    if bad.is_none() {
                        *bad = Some(e);
                    }
                }
            }
        }
    };
    if p.b == 2 && p.m < 64 && p.n <= 53 && !force_digit_path {
        let packed = net.packed_basis();
        let sigma_words = sigma.sigma.pack_rows();
        let scale = (-(p.n as f64)).exp2();
        scan_span_packed(&packed, p.s, |words| {
            if bad.is_some() {
                return;
            }
            for ((xi, &w), &sw) in x.iter_mut().zip(words).zip(&sigma_words) {
                *xi = (w ^ sw) as f64 * scale;
            }
            count += 1;
            visit(&x, &mut sums, &mut bad);
        });
    } else {
        let bf = f64::from(p.b);
        let sd = sigma.sigma.digits();
        scan_span_digits(net, |flat| {
            if bad.is_some() {
                return;
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = flat[i * p.n..(i + 1) * p.n]
                    .iter()
                    .zip(&sd[i * p.n..(i + 1) * p.n])
                    .rev()
                    .fold(0.0, |a, (&d, &o)| {
                        (a + f64::from((u32::from(d) + u32::from(o)) % p.b)) / bf
                    });
            }
            count += 1;
            visit(&x, &mut sums, &mut bad);
        });
    }
    if let Some(e) = bad {
        return Err(e);
    }
    Ok(sums
        .into_iter()
        .map(|acc| QmcEstimate { value: acc.value() / count as f64, n_points: count })
        .collect())
}

/// Signed error of the unshifted estimate: `I_{ψ(P)}(f) − I(f)`.
pub fn plain_error(net: &DigitalNet, f: &Integrand) -> Result<f64> {
    let p = net.params();
    let zero = DigitalShift { sigma: DigitMatrix::zero(p.s, p.n) };
    Ok(qmc_integrate(net, &zero, f)?.value - f.exact_integral())
}

/// RMS error of `f` over `n_shifts` independent digital shifts, lane 0.
pub fn rmse_estimate(
    net: &DigitalNet,
    f: &Integrand,
    n_shifts: usize,
    seed: u64,
) -> Result<RmseReport> {
    rmse_estimate_lane(net, f, n_shifts, seed, 0)
}

/// RMS error with an explicit stream lane (scatter runs use the net id).
pub fn rmse_estimate_lane(
    net: &DigitalNet,
    f: &Integrand,
    n_shifts: usize,
    seed: u64,
    lane: u64,
) -> Result<RmseReport> {
    Ok(rmse_multi_lane(net, &[f], n_shifts, seed, lane)?[0])
}

/// RMS errors of several integrands in one pass: each shifted point is
/// generated once and fed to every function.  Reports align with `fns`.
pub fn rmse_multi_lane(
    net: &DigitalNet,
    fns: &[&Integrand],
    n_shifts: usize,
    seed: u64,
    lane: u64,
) -> Result<Vec<RmseReport>> {
    if n_shifts < 2 {
        return Err(Error::InvalidParams(format!(
            "RMS estimation needs at least 2 shifts, got {n_shifts}"
        )));
    }
    if fns.is_empty() {
        return Ok(Vec::new());
    }
    let p = net.params();
    // Per-shift estimate rows, in shift order regardless of scheduling.
    let rows: Vec<Vec<QmcEstimate>> = (0..n_shifts)
        .into_par_iter()
        .map(|k| {
            let sigma = sample_shift(p, seed, lane, k as u64);
            integrate_impl(net, &sigma, fns, false)
        })
        .collect::<Result<_>>()?;
    Ok((0..fns.len())
        .map(|fi| {
            let mut mean_acc = Neumaier::new();
            for row in &rows {
                mean_acc.add(row[fi].value);
            }
            let mean = mean_acc.value() / n_shifts as f64;
            let mut var_acc = Neumaier::new();
            for row in &rows {
                let d = row[fi].value - mean;
                var_acc.add(d * d);
            }
            let e = (var_acc.value() / (n_shifts - 1) as f64).max(0.0).sqrt();
            RmseReport {
                mean_of_estimates: mean,
                e_value: e,
                lg_e: e.log2(),
                n_shifts,
                seed,
            }
        })
        .collect())
}

/// Closure-based core of the RMSE estimator, for callers with a function
/// that is not one of the named integrands.
pub fn rmse_estimate_fn(
    net: &DigitalNet,
    f: impl Fn(&[f64]) -> Result<f64> + Sync,
    n_shifts: usize,
    seed: u64,
    lane: u64,
) -> Result<RmseReport> {
    if n_shifts < 2 {
        return Err(Error::InvalidParams(format!(
            "RMS estimation needs at least 2 shifts, got {n_shifts}"
        )));
    }
    let p = net.params();
    let estimates: Vec<f64> = (0..n_shifts)
        .into_par_iter()
        .map(|k| {
            let sigma = sample_shift(p, seed, lane, k as u64);
            let mut acc = Neumaier::new();
            let mut count = 0u64;
            let mut bad: Option<Error> = None;
            let bf = f64::from(p.b);
            let sd = sigma.sigma.digits();
            let mut x = vec![0.0f64; p.s];
            scan_span_digits(net, |flat| {
                if bad.is_some() {
                    return;
                }
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = flat[i * p.n..(i + 1) * p.n]
                        .iter()
                        .zip(&sd[i * p.n..(i + 1) * p.n])
                        .rev()
                        .fold(0.0, |a, (&d, &o)| {
                            (a + f64::from((u32::from(d) + u32::from(o)) % p.b)) / bf
                        });
                }
                count += 1;
                match f(&x) {
                    Ok(v) => acc.add(v),
                    Err(e) => {
                        if bad.is_none() {
                            bad = Some(e);
                        }
                    }
                }
            });
            match bad {
                Some(e) => Err(e),
                None => Ok(acc.value() / count as f64),
            }
        })
        .collect::<Result<_>>()?;
    let mut mean_acc = Neumaier::new();
    for &v in &estimates {
        mean_acc.add(v);
    }
    let mean = mean_acc.value() / n_shifts as f64;
    let mut var_acc = Neumaier::new();
    for &v in &estimates {
        let d = v - mean;
        var_acc.add(d * d);
    }
    let e = (var_acc.value() / (n_shifts - 1) as f64).max(0.0).sqrt();
    Ok(RmseReport { mean_of_estimates: mean, e_value: e, lg_e: e.log2(), n_shifts, seed })
}
