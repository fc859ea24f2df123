//! Command-line entrypoint: parameter scans, Krawtchouk reports, pipeline
//! simulation and the lemma verifiers, each emitting deterministic CSV or
//! JSON. Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 budget exceeded.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use crate::analytic;
use crate::codes::{sample_code_g_model, LinearCode, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::kravchuk::{write_kravchuk_csv, KrawtchoukContext};
use crate::presets;
use crate::quantum::{
    amplify, weights_table, RadialErrorDistribution, Register, StateVector,
};
use crate::reduction::{
    self, run_pipeline, DecoderSpec, Mode, QEstMode, ReductionParams,
};
use crate::rng::substream;

#[derive(Parser, Debug)]
#[command(
    name = "qreduce",
    about = "Desk-scale laboratory for the quantum short-codeword-to-decoding reduction",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit figure data: tau-perp curves and usefulness verdicts as CSV.
    Params(ParamsArgs),
    /// Emit the Krawtchouk root/gap/mass report as CSV.
    Kravchuk(KravchukArgs),
    /// Run the reduction pipeline on one code and write the JSON transcript.
    Simulate(SimulateArgs),
    /// Run a named verifier and write its JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ParamsArgs {
    /// Alphabet size (any integer >= 2 for the analytic maps).
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Code rate for the tau sweep.
    #[arg(long, default_value_t = 0.5)]
    pub rate: f64,
    /// Emit the rate-sweep table (tau fixed at the GV bound) instead.
    #[arg(long)]
    pub fig2: bool,
    /// Tau grid step for the sweep.
    #[arg(long, default_value_t = 1e-3)]
    pub tau_step: f64,
    /// Rate grid step for --fig2.
    #[arg(long, default_value_t = 0.05)]
    pub r_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct KravchukArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Largest degree to report; defaults to floor(n/q).
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// Fixed fixture: repetition3, hamming6 or ternary. Overrides q/n/k.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Decoding radius; defaults to the preset radius or 1.
    #[arg(long)]
    pub t: Option<usize>,
    /// Force the target dual weight instead of selecting it.
    #[arg(long)]
    pub u: Option<usize>,
    /// Coin bits of the decoder register.
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    /// exhaustive, constant, or unreliable:EPS.
    #[arg(long, default_value = "exhaustive", value_parser = parse_decoder)]
    pub decoder: DecoderSpec,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// strict or exploratory.
    #[arg(long, default_value = "strict", value_parser = parse_mode)]
    pub mode: Mode,
    /// analytic or exact: source of the amplification estimate.
    #[arg(long = "q-est", default_value = "exact", value_parser = parse_qest)]
    pub q_est: QEstMode,
    /// Skip the amplification stage.
    #[arg(long)]
    pub no_amplify: bool,
    /// Enumeration budget (basis states); REDUCE_BUDGET overrides.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// One of: qft-radial, lemma-measure, kravchuk-suite, first-root,
    /// figures, obstruction, amplify, theorem-main, step1, nperp, gv-lemma.
    pub name: String,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub u: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Decoder for pipeline-backed verifiers.
    #[arg(long, value_parser = parse_decoder)]
    pub decoder: Option<DecoderSpec>,
    #[arg(long)]
    pub codes: Option<u64>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// True success probability for the amplification toy.
    #[arg(long)]
    pub p: Option<f64>,
    /// Assumed success probability for the amplification toy.
    #[arg(long = "q-est")]
    pub q_est: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_decoder(s: &str) -> std::result::Result<DecoderSpec, String> {
    match s {
        "exhaustive" => Ok(DecoderSpec::Exhaustive),
        "constant" => Ok(DecoderSpec::Constant),
        other => other
            .strip_prefix("unreliable:")
            .and_then(|e| e.parse::<f64>().ok())
            .map(|epsilon_target| DecoderSpec::Unreliable { epsilon_target })
            .ok_or_else(|| {
                format!("expected exhaustive, constant or unreliable:EPS, got '{other}'")
            }),
    }
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "strict" => Ok(Mode::Strict),
        "exploratory" => Ok(Mode::Exploratory),
        other => Err(format!("expected strict or exploratory, got '{other}'")),
    }
}

fn parse_qest(s: &str) -> std::result::Result<QEstMode, String> {
    match s {
        "analytic" => Ok(QEstMode::Analytic),
        "exact" => Ok(QEstMode::ExactPerCode),
        other => Err(format!("expected analytic or exact, got '{other}'")),
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn effective_budget(flag: u128) -> u128 {
    match std::env::var("REDUCE_BUDGET") {
        Ok(v) => v.parse().unwrap_or(flag),
        Err(_) => flag,
    }
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Params(args) => cmd_params(args),
        Command::Kravchuk(args) => cmd_kravchuk(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_params(args: ParamsArgs) -> Result<i32> {
    if args.tau_step <= 0.0 || args.r_step <= 0.0 {
        return Err(Error::InvalidParameter(
            "grid steps must be positive".into(),
        ));
    }
    let mut out = writer(&args.out)?;
    if args.fig2 {
        let mut rates = Vec::new();
        let mut r = args.r_step;
        while r < 1.0 - 1e-12 {
            rates.push(r);
            r += args.r_step;
        }
        analytic::write_fig2_csv(&mut out, args.q, &rates)?;
    } else {
        analytic::write_fig1_csv(&mut out, args.q, args.rate, args.tau_step)?;
    }
    out.flush()?;
    Ok(0)
}

fn cmd_kravchuk(args: KravchukArgs) -> Result<i32> {
    let ctx = KrawtchoukContext::new(args.q, args.n)?;
    let t_max = args.t_max.unwrap_or(args.n / args.q as usize);
    let mut out = writer(&args.out)?;
    write_kravchuk_csv(&mut out, &ctx, t_max)?;
    out.flush()?;
    Ok(0)
}

fn resolve_code(
    preset: &Option<String>,
    q: u32,
    n: usize,
    k: usize,
    t_flag: Option<usize>,
    seed: u64,
) -> Result<(LinearCode, usize)> {
    match preset {
        Some(name) => {
            let p = presets::by_name(name)?;
            Ok((p.code, t_flag.unwrap_or(p.t)))
        }
        None => {
            let mut rng = substream(seed, 0);
            let sampled = sample_code_g_model(q, n, k, &mut rng)?;
            Ok((sampled.code, t_flag.unwrap_or(1)))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let budget = effective_budget(args.budget);
    let (code, t) = resolve_code(&args.preset, args.q, args.n, args.k, args.t, args.seed)?;
    let params = ReductionParams {
        q: code.q(),
        n: code.n(),
        k: code.k(),
        t,
        coin_bits: args.l,
        u_override: args.u,
        decoder: args.decoder,
        shots: args.shots,
        seed: args.seed,
        mode: args.mode,
        q_est_mode: args.q_est,
        amplify: !args.no_amplify,
        budget,
    };
    let transcript = run_pipeline(&code, &params)?;
    eprintln!(
        "Z = {:.6}, eps_G = {:.6}, D_tr = {:.6}, u = {}, success = {}/{}",
        transcript.z,
        transcript.epsilon_g,
        transcript.d_tr_decode,
        transcript.selected_u,
        transcript.success_count,
        transcript.shots
    );
    let mut out = writer(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &transcript)?;
    writeln!(out)?;
    out.flush()?;
    Ok(0)
}

fn report_and_exit<W: Write>(mut out: W, report: &serde_json::Value, pass: bool) -> Result<i32> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let budget = effective_budget(args.budget);
    let out = writer(&args.out)?;
    match args.name.as_str() {
        "qft-radial" => {
            let q = args.q.unwrap_or(2);
            let n = args.n.unwrap_or(6);
            let max_dev = qft_radial_max_deviation(q, n, budget)?;
            let pass = max_dev <= 1e-10;
            report_and_exit(
                out,
                &json!({
                    "verifier": "qft-radial",
                    "q": q, "n": n,
                    "max_abs_deviation": max_dev,
                    "tolerance": 1e-10,
                    "pass": pass,
                }),
                pass,
            )
        }
        "lemma-measure" => {
            let (code, t) = resolve_code(
                &args.preset,
                args.q.unwrap_or(2),
                args.n.unwrap_or(6),
                args.k.unwrap_or(3),
                args.t,
                args.seed,
            )?;
            let rep =
                reduction::verify_lemma_measure(&code, t, args.l.unwrap_or(0), budget)?;
            let pass = rep.pass;
            report_and_exit(out, &serde_json::to_value(&rep)?, pass)
        }
        "kravchuk-suite" => {
            let q = args.q.unwrap_or(2);
            let n = args.n.unwrap_or(30);
            let rep = kravchuk_suite(q, n)?;
            let pass = rep["pass"].as_bool().unwrap_or(false);
            report_and_exit(out, &rep, pass)
        }
        "first-root" => {
            let q = args.q.unwrap_or(2);
            let n = args.n.unwrap_or(100);
            let t = args.t.unwrap_or(25);
            let ctx = KrawtchoukContext::new(q, n)?;
            let x1 = ctx.roots(t)?.roots[0].root;
            let tau = t as f64 / n as f64;
            let asymptotic = n as f64 / 2.0 - (t as f64 * (n - t) as f64).sqrt();
            let tau_perp = analytic::tau_perp(q, tau)?;
            let gap = (x1 / n as f64 - tau_perp).abs();
            report_and_exit(
                out,
                &json!({
                    "verifier": "first-root",
                    "q": q, "n": n, "t": t,
                    "x1": x1,
                    "asymptotic": asymptotic,
                    "abs_diff_from_asymptotic": (x1 - asymptotic).abs(),
                    "tau_perp": tau_perp,
                    "relative_gap": gap,
                }),
                true,
            )
        }
        "figures" => {
            let (_, q2) = analytic::usefulness_scan(2, &analytic::default_rate_grid(), 1e-3)?;
            let q2_all = q2.iter().all(|s| s.any_useful);
            let (_, q57) = analytic::usefulness_scan(57, &[0.5], 1e-3)?;
            let q57_none = !q57[0].any_useful;
            let pass = q2_all && q57_none;
            report_and_exit(
                out,
                &json!({
                    "verifier": "figures",
                    "q2_useful_for_all_rates": q2_all,
                    "q57_never_useful_at_half": q57_none,
                    "pass": pass,
                }),
                pass,
            )
        }
        "obstruction" => {
            let q = args.q.unwrap_or(2);
            let rate = args.rate.unwrap_or(0.5);
            let feasible = analytic::bernoulli_obstruction_scan(q, rate, 1e-3)?;
            let hellinger_dev = hellinger_identity_max_dev(q, args.n.unwrap_or(8))?;
            let pass = feasible.is_none() && hellinger_dev <= 1e-10;
            report_and_exit(
                out,
                &json!({
                    "verifier": "obstruction",
                    "q": q, "rate": rate,
                    "feasible_tau": feasible,
                    "hellinger_identity_max_dev": hellinger_dev,
                    "pass": pass,
                }),
                pass,
            )
        }
        "amplify" => {
            let p = args.p.unwrap_or(0.25);
            let q_est = args.q_est.unwrap_or(0.25);
            if !(0.0 < p && p < 1.0) {
                return Err(Error::Domain {
                    what: "p",
                    value: p,
                    domain: "(0, 1)",
                });
            }
            let amps = [
                num_complex::Complex64::new(p.sqrt(), 0.0),
                num_complex::Complex64::new((1.0 - p).sqrt(), 0.0),
            ];
            let res = amplify(&amps, |i| i == 0, q_est)?;
            report_and_exit(
                out,
                &json!({
                    "verifier": "amplify",
                    "p_true": p,
                    "q_est": q_est,
                    "alpha": res.plan.alpha,
                    "iterations": res.plan.iterations,
                    "success_probability": res.success_probability,
                }),
                true,
            )
        }
        "theorem-main" => {
            let params = ReductionParams {
                q: args.q.unwrap_or(2),
                n: args.n.unwrap_or(3),
                k: args.k.unwrap_or(1),
                t: args.t.unwrap_or(1),
                coin_bits: args.l.unwrap_or_else(|| {
                    match args.decoder {
                        Some(DecoderSpec::Unreliable { epsilon_target }) => {
                            (1.0 / epsilon_target).log2().ceil() as usize
                        }
                        _ => 0,
                    }
                }),
                u_override: args.u,
                decoder: args.decoder.unwrap_or(DecoderSpec::Exhaustive),
                shots: 0,
                seed: args.seed,
                mode: Mode::Strict,
                q_est_mode: QEstMode::ExactPerCode,
                amplify: true,
                budget,
            };
            let rep = reduction::verify_theorem_main(
                &params,
                args.codes.unwrap_or(100),
                args.shots.unwrap_or(100),
            )?;
            let pass = rep.pass;
            report_and_exit(out, &serde_json::to_value(&rep)?, pass)
        }
        "step1" => {
            let params = ReductionParams {
                q: args.q.unwrap_or(2),
                n: args.n.unwrap_or(6),
                k: args.k.unwrap_or(3),
                t: args.t.unwrap_or(1),
                coin_bits: args.l.unwrap_or(0),
                u_override: None,
                decoder: args.decoder.unwrap_or(DecoderSpec::Exhaustive),
                shots: 0,
                seed: args.seed,
                mode: Mode::Exploratory,
                q_est_mode: QEstMode::ExactPerCode,
                amplify: false,
                budget,
            };
            let rep = reduction::verify_step1_bound(&params, args.codes.unwrap_or(60))?;
            let pass = rep.pass;
            report_and_exit(out, &serde_json::to_value(&rep)?, pass)
        }
        "nperp" => {
            let rep = reduction::verify_nperp(
                args.q.unwrap_or(2),
                args.n.unwrap_or(14),
                args.k.unwrap_or(4),
                args.u.unwrap_or(7),
                args.codes.unwrap_or(200),
                args.seed,
                budget,
            )?;
            let pass = rep.pass;
            report_and_exit(out, &serde_json::to_value(&rep)?, pass)
        }
        "gv-lemma" => {
            let rep = reduction::verify_gv_lemma(
                args.q.unwrap_or(2),
                args.rate.unwrap_or(0.5),
                args.delta.unwrap_or(0.1),
                args.n.unwrap_or(10),
                args.n.map_or(20, |n| n + 10),
            )?;
            let pass = rep.pass;
            report_and_exit(out, &serde_json::to_value(&rep)?, pass)
        }
        other => Err(Error::UnknownVerifier(other.to_string())),
    }
}

/// Exhaustive check that the word-register QFT of every sphere state matches
/// the Krawtchouk closed form entrywise; returns the largest deviation.
pub fn qft_radial_max_deviation(q: u32, n: usize, budget: u128) -> Result<f64> {
    let mut max_dev = 0.0f64;
    let table = weights_table(q, n);
    for t in 0..=n {
        let dist = RadialErrorDistribution::uniform_sphere(q, n, t)?;
        let fperp = dist.dual_profile()?;
        let mut st: StateVector = dist.embed_on_word(0, budget)?;
        st.qft_register(Register::Word, false)?;
        let shape = st.shape();
        for w_idx in 0..shape.register_len() {
            let got = st.amplitudes()[shape.index(0, w_idx, 0)];
            let expect = fperp[table[w_idx] as usize];
            let dev = (got - num_complex::Complex64::new(expect, 0.0)).norm();
            max_dev = max_dev.max(dev);
        }
    }
    Ok(max_dev)
}

/// |<pi_try|1>|^2 / q^n against (1 - H^2(mu_tau, U))^2 on full product
/// distributions; returns the largest absolute deviation over a tau grid.
pub fn hellinger_identity_max_dev(q: u32, n_max: usize) -> Result<f64> {
    use crate::quantum::hellinger;
    let mut max_dev = 0.0f64;
    for n in 1..=n_max {
        let table = weights_table(q, n);
        let qn = table.len();
        for tau_pct in [5usize, 11, 25, 40] {
            let tau = tau_pct as f64 / 100.0;
            let dist = RadialErrorDistribution::bernoulli(q, n, tau)?;
            // direct summation of <pi|1> over all q^n vectors
            let dot: f64 = (0..qn).map(|i| dist.f(table[i] as usize)).sum();
            let lhs = dot * dot / qn as f64;
            // Hellinger route on the measured distribution vs uniform
            let mu: Vec<f64> = (0..qn)
                .map(|i| {
                    let f = dist.f(table[i] as usize);
                    f * f
                })
                .collect();
            let uniform = vec![1.0 / qn as f64; qn];
            let h = hellinger(&mu, &uniform);
            let rhs = (1.0 - h * h) * (1.0 - h * h);
            max_dev = max_dev.max((lhs - rhs).abs());
        }
    }
    Ok(max_dev)
}

/// The full Krawtchouk acceptance battery at one (q, n): exact recurrence and
/// orthogonality, root counts, spacing, and per-bracket mass bounds.
pub fn kravchuk_suite(q: u32, n: usize) -> Result<serde_json::Value> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;
    let ctx = KrawtchoukContext::new(q, n)?;
    let mut recurrence_ok = true;
    for t in 0..=n {
        for x in 1..n {
            if !ctx.recurrence_residual(t, x)?.is_zero() {
                recurrence_ok = false;
            }
        }
    }
    let mut orthogonality_ok = true;
    for s in 0..=n {
        for t in s..=n {
            let v = ctx.orthogonality_check(s, t)?;
            let expect = if s == t {
                BigRational::from_integer(ctx.norm_sq(t))
            } else {
                BigRational::zero()
            };
            if v != expect {
                orthogonality_ok = false;
            }
        }
    }
    let mut roots_ok = true;
    let mut spacing_ok = true;
    let mut mass_ok = true;
    let threshold = BigRational::new(
        BigInt::from(1),
        BigInt::from(q as i64 - 1) * BigInt::from(n as i64).pow(5),
    );
    for t in 1..=(n / q as usize) {
        let list = ctx.roots(t)?;
        if list.roots.len() != t {
            roots_ok = false;
            continue;
        }
        if !ctx.root_spacing_certificate(t)? {
            spacing_ok = false;
        }
        let brackets = if t == 1 { 1 } else { t - 1 };
        for b in 0..brackets {
            let (_, mass) = ctx.mass_between_roots(t, b)?;
            if mass < threshold {
                mass_ok = false;
            }
        }
    }
    let pass = recurrence_ok && orthogonality_ok && roots_ok && spacing_ok && mass_ok;
    Ok(json!({
        "verifier": "kravchuk-suite",
        "q": q, "n": n,
        "recurrence_exact": recurrence_ok,
        "orthogonality_exact": orthogonality_ok,
        "root_counts_match_degree": roots_ok,
        "min_gap_at_least_two": spacing_ok,
        "mass_bound_every_bracket": mass_ok,
        "pass": pass,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoder_flag_parsing() {
        assert_eq!(parse_decoder("exhaustive").unwrap(), DecoderSpec::Exhaustive);
        assert_eq!(parse_decoder("constant").unwrap(), DecoderSpec::Constant);
        match parse_decoder("unreliable:0.25").unwrap() {
            DecoderSpec::Unreliable { epsilon_target } => {
                assert_eq!(epsilon_target, 0.25)
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_decoder("unreliable:x").is_err());
        assert!(parse_decoder("best-effort").is_err());
    }

    #[test]
    fn qft_radial_deviation_is_tiny() {
        let dev = qft_radial_max_deviation(2, 5, DEFAULT_BUDGET).unwrap();
        assert!(dev <= 1e-10, "dev = {dev}");
    }

    #[test]
    fn hellinger_identity_holds() {
        let dev = hellinger_identity_max_dev(2, 6).unwrap();
        assert!(dev <= 1e-10, "dev = {dev}");
    }

    #[test]
    fn kravchuk_suite_small() {
        let rep = kravchuk_suite(2, 12).unwrap();
        assert_eq!(rep["pass"], true);
    }
}
