//! Closed-form parameter maps behind the usefulness analysis: q-ary entropy
//! and its inverse, the Fourier crossover tau -> tau-perp, the easy-weight
//! threshold, Bernoulli dual profiles and the spread-out obstruction, and the
//! grid scans that classify (rate, tau) points as useful, easy or vacuous.
//!
//! Everything here treats q as a plain integer >= 2 and rates as reals; no
//! field arithmetic is involved, so non-prime q is fine.

use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};

const ENTROPY_INV_TOL: f64 = 1e-12;

fn check_q(q: u32) -> Result<()> {
    if q < 2 {
        return Err(Error::ModulusTooSmall { q });
    }
    Ok(())
}

/// The q-ary entropy h_q(x) = -x log_q(x/(q-1)) - (1-x) log_q(1-x) on
/// [0, (q-1)/q], with h_q(0) = 0 by continuity.
pub fn entropy(q: u32, x: f64) -> Result<f64> {
    check_q(q)?;
    let top = (q as f64 - 1.0) / q as f64;
    if !(0.0..=top + 1e-15).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[0, (q-1)/q]",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let lnq = (q as f64).ln();
    let mut h = -x * (x / (q as f64 - 1.0)).ln() / lnq;
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).ln() / lnq;
    }
    Ok(h)
}

/// Inverse of h_q on [0, (q-1)/q], by bisection to |h(x) - y| <= 1e-12.
pub fn entropy_inverse(q: u32, y: f64) -> Result<f64> {
    check_q(q)?;
    if !(0.0..=1.0 + 1e-15).contains(&y) {
        return Err(Error::Domain {
            what: "y",
            value: y,
            domain: "[0, 1]",
        });
    }
    let mut lo = 0.0f64;
    let mut hi = (q as f64 - 1.0) / q as f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let h = entropy(q, mid)?;
        if (h - y).abs() <= ENTROPY_INV_TOL {
            return Ok(mid);
        }
        if h < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The Fourier crossover shared by the sphere and Bernoulli analyses:
/// x -> (sqrt((q-1)(1-x)) - sqrt(x))^2 / q, decreasing on [0, (q-1)/q].
fn fourier_crossover(q: u32, x: f64) -> Result<f64> {
    check_q(q)?;
    let top = (q as f64 - 1.0) / q as f64;
    if !(-1e-15..=top + 1e-15).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[0, (q-1)/q]",
        });
    }
    let x = x.clamp(0.0, top);
    let s = ((q as f64 - 1.0) * (1.0 - x)).sqrt() - x.sqrt();
    Ok(s * s / q as f64)
}

/// Dual relative weight targeted by the reduction when decoding at relative
/// distance tau.
pub fn tau_perp(q: u32, tau: f64) -> Result<f64> {
    fourier_crossover(q, tau)
}

/// Relative weight above which short codewords in a dimension-`dim` code of
/// length n are produced in polynomial time by zeroing coordinates.
pub fn omega_easy(q: u32, n: usize, dim: usize) -> f64 {
    (q as f64 - 1.0) / q as f64 * (1.0 - dim as f64 / n as f64)
}

/// Verdict for one (rate, tau) point: where tau-perp lands relative to the
/// dual code's hard band [delta_GV_dual, omega_easy_dual).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// tau-perp falls inside the hard band: the reduction outputs weights
    /// that are believed hard to find.
    Useful,
    /// tau-perp is at or above omega_easy for the dual: such codewords are
    /// easy to produce classically.
    Easy,
    /// tau-perp is below the dual Gilbert-Varshamov bound: typically no dual
    /// codeword of that weight exists.
    Vacuous,
}

/// The analytic tuple describing one scan point. All fields are asymptotic
/// (normalized) quantities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParamPoint {
    pub q: u32,
    pub rate: f64,
    pub tau: f64,
    pub tau_perp: f64,
    pub delta_gv_primal: f64,
    pub delta_gv_dual: f64,
    pub omega_easy_dual: f64,
    pub verdict: Verdict,
}

/// Classify a single (q, R, tau) point.
pub fn classify(q: u32, rate: f64, tau: f64) -> Result<ParamPoint> {
    if !(0.0 < rate && rate < 1.0) {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
            domain: "(0, 1)",
        });
    }
    let delta_gv_primal = entropy_inverse(q, 1.0 - rate)?;
    let delta_gv_dual = entropy_inverse(q, rate)?;
    let omega_easy_dual = (q as f64 - 1.0) / q as f64 * rate;
    let tp = tau_perp(q, tau)?;
    let verdict = if tp >= omega_easy_dual {
        Verdict::Easy
    } else if tp >= delta_gv_dual {
        Verdict::Useful
    } else {
        Verdict::Vacuous
    };
    Ok(ParamPoint {
        q,
        rate,
        tau,
        tau_perp: tp,
        delta_gv_primal,
        delta_gv_dual,
        omega_easy_dual,
        verdict,
    })
}

/// Per-rate outcome of a scan: whether any tau at or below the primal GV
/// bound lands in the hard band, and the first tau that does.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateSummary {
    pub q: u32,
    pub rate: f64,
    pub any_useful: bool,
    pub first_useful_tau: Option<f64>,
}

/// Scan tau over [0, delta_GV_primal] in steps of `tau_step` for each rate.
/// Returns every classified point plus one summary per rate.
pub fn usefulness_scan(
    q: u32,
    rates: &[f64],
    tau_step: f64,
) -> Result<(Vec<ParamPoint>, Vec<RateSummary>)> {
    if tau_step <= 0.0 {
        return Err(Error::Domain {
            what: "tau_step",
            value: tau_step,
            domain: "(0, inf)",
        });
    }
    let mut points = Vec::new();
    let mut summaries = Vec::new();
    for &rate in rates {
        let delta_gv = entropy_inverse(q, 1.0 - rate)?;
        let mut any_useful = false;
        let mut first_useful_tau = None;
        let mut i = 0usize;
        loop {
            let tau = (i as f64) * tau_step;
            if tau > delta_gv {
                break;
            }
            let p = classify(q, rate, tau)?;
            if p.verdict == Verdict::Useful && first_useful_tau.is_none() {
                any_useful = true;
                first_useful_tau = Some(tau);
            }
            points.push(p);
            i += 1;
        }
        // include the GV endpoint itself
        let p = classify(q, rate, delta_gv)?;
        if p.verdict == Verdict::Useful && first_useful_tau.is_none() {
            any_useful = true;
            first_useful_tau = Some(delta_gv);
        }
        points.push(p);
        summaries.push(RateSummary {
            q,
            rate,
            any_useful,
            first_useful_tau,
        });
    }
    Ok((points, summaries))
}

/// Crossover pair of the q-ary symmetric channel: p and its Fourier dual.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BernoulliProfile {
    pub p: f64,
    pub p_perp: f64,
}

/// p-perp of a q-ary symmetric channel of crossover p; shares its formula
/// with `tau_perp` by construction.
pub fn bernoulli_dual(q: u32, p: f64) -> Result<BernoulliProfile> {
    Ok(BernoulliProfile {
        p,
        p_perp: fourier_crossover(q, p)?,
    })
}

/// The spread-out obstruction exponent for the Bernoulli attempt:
/// log_q of <pi_try|1>^2 / q^{n-k} = k + n log_q(1 - tau_perp).
pub fn bernoulli_obstruction(q: u32, n: usize, k: usize, tau: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} > n = {n}")));
    }
    let tp = tau_perp(q, tau)?;
    if tp >= 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(k as f64 + n as f64 * (1.0 - tp).ln() / (q as f64).ln())
}

/// Scan tau for a simultaneous solution of the three Bernoulli conditions:
/// (i) tau <= delta_GV_primal, (ii) tau_perp <= omega_easy of the dual,
/// (iii) negative obstruction exponent (normalized: R + log_q(1-tau_perp) < 0).
/// Returns the first feasible tau, or None when the attempt is impossible.
pub fn bernoulli_obstruction_scan(q: u32, rate: f64, tau_step: f64) -> Result<Option<f64>> {
    let delta_gv = entropy_inverse(q, 1.0 - rate)?;
    let omega_dual = (q as f64 - 1.0) / q as f64 * rate;
    let top = (q as f64 - 1.0) / q as f64;
    let mut i = 0usize;
    loop {
        let tau = i as f64 * tau_step;
        if tau > top {
            return Ok(None);
        }
        let tp = tau_perp(q, tau)?;
        let exponent = rate + (1.0 - tp).ln() / (q as f64).ln();
        if tau <= delta_gv && tp <= omega_dual && exponent < 0.0 {
            return Ok(Some(tau));
        }
        i += 1;
    }
}

/// The decay exponent of S_t / q^{n-k} at tau = (1-delta) delta_GV:
/// alpha = h_q((1-delta) delta_GV) - h_q(delta_GV), negative for delta > 0.
pub fn gv_lemma_exponent(q: u32, rate: f64, delta: f64) -> Result<f64> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Domain {
            what: "delta",
            value: delta,
            domain: "(0, 1)",
        });
    }
    let dgv = entropy_inverse(q, 1.0 - rate)?;
    Ok(entropy(q, (1.0 - delta) * dgv)? - entropy(q, dgv)?)
}

fn fmt12(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Tau-sweep figure data for one (q, rate): tau against tau_perp with the
/// dual hard band. Columns: q, R, tau, tau_perp, omega_easy_dual,
/// delta_gv_dual, verdict; 12 significant digits.
pub fn write_fig1_csv<W: Write>(out: &mut W, q: u32, rate: f64, tau_step: f64) -> Result<()> {
    writeln!(
        out,
        "q,R,tau,tau_perp,omega_easy_dual,delta_gv_dual,verdict"
    )?;
    let (points, _) = usefulness_scan(q, &[rate], tau_step)?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.q,
            fmt12(p.rate),
            fmt12(p.tau),
            fmt12(p.tau_perp),
            fmt12(p.omega_easy_dual),
            fmt12(p.delta_gv_dual),
            verdict_str(p.verdict),
        )?;
    }
    Ok(())
}

/// Rate-sweep figure data: tau fixed at the primal GV bound per rate.
/// Columns: q, R, tau_star, tau_perp_at_star, band_low, band_high, verdict.
pub fn write_fig2_csv<W: Write>(out: &mut W, q: u32, rates: &[f64]) -> Result<()> {
    writeln!(
        out,
        "q,R,tau_star,tau_perp_at_star,band_low,band_high,verdict"
    )?;
    for &rate in rates {
        let tau_star = entropy_inverse(q, 1.0 - rate)?;
        let p = classify(q, rate, tau_star)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            q,
            fmt12(rate),
            fmt12(tau_star),
            fmt12(p.tau_perp),
            fmt12(p.delta_gv_dual),
            fmt12(p.omega_easy_dual),
            verdict_str(p.verdict),
        )?;
    }
    Ok(())
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Useful => "useful",
        Verdict::Easy => "easy",
        Verdict::Vacuous => "vacuous",
    }
}

/// The default rate grid of the figures: 0.05 to 0.95 in steps of 0.05.
pub fn default_rate_grid() -> Vec<f64> {
    (1..20).map(|i| i as f64 * 0.05).collect()
}
