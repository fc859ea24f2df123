//! The end-to-end reduction pipeline: prepare the error/codeword
//! superposition, disentangle with the quantized decoder, Fourier-transform
//! the word register, optionally amplify toward the selected dual weight, and
//! measure. Alongside it, executable verifiers for the quantitative lemmas
//! the proof rests on, each checking its inequality on sampled codes with
//! exact per-code quantities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::codes::{
    empirical_epsilon, gv_distance, sample_code_g_model, sphere_size, DecoderOracle,
    EpsilonEstimate, LinearCode,
};
use crate::error::{Error, Result};
use crate::field::FqVector;
use crate::kravchuk::KrawtchoukContext;
use crate::quantum::{
    amplify, trace_distance, weights_table, AmplificationPlan, RadialErrorDistribution, Register,
    RegisterShape, StateVector,
};
use crate::rng::substream;

/// Strict mode enforces every hypothesis of the finite-n theorem; exploratory
/// mode allows any radius for figure-style experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Strict,
    Exploratory,
}

/// Where the amplification success estimate comes from: the random-code
/// analytic value S_u |f_perp(u)|^2, or the exact per-code probability
/// computed from the dual weight distribution and Z. Desk-scale codes are too
/// small for the concentration the analytic value relies on, so the
/// theorem-level verifier uses the exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QEstMode {
    Analytic,
    ExactPerCode,
}

/// Decoder configuration, mirroring the CLI flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderSpec {
    Exhaustive,
    Unreliable { epsilon_target: f64 },
    Constant,
}

impl DecoderSpec {
    pub fn build(&self, radius: usize, coin_bits: usize) -> Result<DecoderOracle> {
        match self {
            DecoderSpec::Exhaustive => Ok(DecoderOracle::exhaustive(radius, coin_bits)),
            DecoderSpec::Unreliable { epsilon_target } => {
                DecoderOracle::unreliable(radius, *epsilon_target, coin_bits)
            }
            DecoderSpec::Constant => Ok(DecoderOracle::adversarial(radius, coin_bits)),
        }
    }

    pub fn epsilon_target(&self) -> f64 {
        match self {
            DecoderSpec::Unreliable { epsilon_target } => *epsilon_target,
            _ => 1.0,
        }
    }
}

/// Full parameter set for one pipeline run.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionParams {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub coin_bits: usize,
    pub u_override: Option<usize>,
    pub decoder: DecoderSpec,
    pub shots: u64,
    pub seed: u64,
    pub mode: Mode,
    pub q_est_mode: QEstMode,
    pub amplify: bool,
    pub budget: u128,
}

impl ReductionParams {
    /// Check the strict-theorem radius window 1 <= t <= min(n/q, (1-delta) d_GV).
    /// Exploratory mode accepts any 1 <= t <= n.
    pub fn validate(&self) -> Result<()> {
        if self.t < 1 || self.t > self.n {
            return Err(Error::OutOfRange {
                what: "t",
                value: self.t as i64,
                lo: 1,
                hi: self.n as i64,
            });
        }
        if self.mode == Mode::Strict {
            let cap = (self.n / self.q as usize).min(gv_distance(self.q, self.n, self.k));
            if self.t > cap {
                return Err(Error::InvalidParameter(format!(
                    "strict mode requires t <= min(n/q, d_GV) = {cap}, got t = {}",
                    self.t
                )));
            }
        }
        Ok(())
    }
}

/// The three quantities of the dual-weight assumption, reported for the
/// selected u. Strict mode requires exponent1 < 0, exponent2 < 0 and
/// mass >= 1/((q-1) n^5).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AssumptionReport {
    pub u: usize,
    /// log_q of <pi|1>^2 / q^{n-k} = log_q(S_t) - (n-k) for the sphere.
    pub exponent1: f64,
    /// log_q of q^k / S_u.
    pub exponent2: f64,
    /// S_u |f_perp(u)|^2.
    pub mass: f64,
    pub mass_threshold: f64,
    pub passes: bool,
}

fn assumption_for(
    ctx: &KrawtchoukContext,
    q: u32,
    n: usize,
    k: usize,
    t: usize,
    u: usize,
) -> Result<AssumptionReport> {
    let lnq = (q as f64).ln();
    let s_t = sphere_size(q, n, t).to_f64().unwrap();
    let s_u = sphere_size(q, n, u).to_f64().unwrap();
    let exponent1 = s_t.ln() / lnq - (n - k) as f64;
    let exponent2 = k as f64 - s_u.ln() / lnq;
    let mass = ctx.normalized_mass(t, u)?.to_f64().unwrap();
    let mass_threshold = 1.0 / ((q as f64 - 1.0) * (n as f64).powi(5));
    let passes = exponent1 < 0.0 && exponent2 < 0.0 && mass >= mass_threshold;
    Ok(AssumptionReport {
        u,
        exponent1,
        exponent2,
        mass,
        mass_threshold,
        passes,
    })
}

/// Select the target dual weight u: the mass-maximizing integer in the first
/// inter-root interval of K_t (or above the single root when t = 1). Strict
/// mode only admits candidates satisfying the assumption conditions and
/// errors when none do.
pub fn select_u(q: u32, n: usize, k: usize, t: usize, mode: Mode) -> Result<(usize, AssumptionReport)> {
    let ctx = KrawtchoukContext::new(q, n)?;
    let list = ctx.roots(t)?;
    let lo = list.roots[0].root;
    let (hi, hi_inclusive) = if t == 1 {
        (n as f64, true)
    } else {
        (list.roots[1].root, false)
    };
    let mut candidates: Vec<(usize, AssumptionReport)> = Vec::new();
    let u_start = (lo.floor() as isize + 1).max(0) as usize;
    for u in u_start..=n {
        let uf = u as f64;
        if uf <= lo {
            continue;
        }
        if uf > hi || (!hi_inclusive && uf >= hi) {
            break;
        }
        candidates.push((u, assumption_for(&ctx, q, n, k, t, u)?));
    }
    if candidates.is_empty() {
        return Err(Error::RootSearch(format!(
            "no integer in the first inter-root interval ({lo}, {hi}) for t = {t}"
        )));
    }
    let admissible: Vec<&(usize, AssumptionReport)> = match mode {
        Mode::Strict => candidates.iter().filter(|(_, a)| a.passes).collect(),
        Mode::Exploratory => candidates.iter().collect(),
    };
    if admissible.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "strict mode: no u in ({lo:.3}, {hi:.3}) satisfies the dual-weight assumption"
        )));
    }
    // max mass; ties go to the smaller weight
    let best = admissible
        .iter()
        .max_by(|a, b| {
            a.1.mass
                .partial_cmp(&b.1.mass)
                .unwrap()
                .then(b.0.cmp(&a.0))
        })
        .unwrap();
    Ok((best.0, best.1))
}

/// Normalization data of the disentangled state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdealNorm {
    /// Z: squared norm of the unnormalized disentangled state.
    pub z: f64,
    /// X = Z / (2^l q^k) - 1, the collision excess. Exactly 0 below half the
    /// minimum distance.
    pub x_collision: f64,
}

/// Build |psi_ideal> = (1/sqrt(Z)) sum_{e,c,w} pi_e |0>|c+e>|w> and return it
/// with Z. For sphere profiles Z is assembled from exact collision counts.
pub fn build_ideal_state(
    code: &LinearCode,
    dist: &RadialErrorDistribution,
    coin_bits: usize,
    budget: u128,
) -> Result<(StateVector, IdealNorm)> {
    let q = code.q();
    let n = code.n();
    let shape = RegisterShape::new(q, n, coin_bits, budget)?;
    let reg = shape.register_len();
    let table = weights_table(q, n);
    // coeff[y] = sum over codewords c of f(|y - c|)
    let mut coeff = vec![0.0f64; reg];
    let mut counts: Option<Vec<u64>> = match dist.kind() {
        crate::quantum::RadialKind::UniformSphere { .. } => Some(vec![0u64; reg]),
        _ => None,
    };
    let t_sphere = match dist.kind() {
        crate::quantum::RadialKind::UniformSphere { t } => Some(*t),
        _ => None,
    };
    for c in code.codewords() {
        let c_idx = shape.vector_index(&c);
        for (y_idx, cf) in coeff.iter_mut().enumerate() {
            let diff = sub_indices(q, n, y_idx, c_idx);
            let w = table[diff] as usize;
            *cf += dist.f(w);
            if let (Some(cnt), Some(t)) = (counts.as_mut(), t_sphere) {
                if w == t {
                    cnt[y_idx] += 1;
                }
            }
        }
    }
    let coin_len = shape.coin_len() as f64;
    let (z, x_collision) = if let (Some(cnt), Some(t)) = (counts, t_sphere) {
        // exact: Z = 2^l sum counts^2 / S_t, X = sum counts^2/(q^k S_t) - 1
        let sumsq: u128 = cnt.iter().map(|&c| (c as u128) * (c as u128)).sum();
        let s_t = sphere_size(q, n, t).to_u128().expect("desk scale");
        let qk = (q as u128).pow(code.k() as u32);
        let z = coin_len * sumsq as f64 / s_t as f64;
        let x = (sumsq as f64 - (qk * s_t) as f64) / ((qk * s_t) as f64);
        (z, x)
    } else {
        let sumsq: f64 = coeff.iter().map(|c| c * c).sum();
        let z = coin_len * sumsq;
        let qk = (q as f64).powi(code.k() as i32);
        (z, z / (coin_len * qk) - 1.0)
    };
    let scale = 1.0 / z.sqrt();
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); shape.len()];
    for (y_idx, &cf) in coeff.iter().enumerate() {
        if cf == 0.0 {
            continue;
        }
        for w in 0..shape.coin_len() {
            amps[shape.index(0, y_idx, w)] = num_complex::Complex64::new(cf * scale, 0.0);
        }
    }
    Ok((
        StateVector::from_amplitudes(shape, amps)?,
        IdealNorm { z, x_collision },
    ))
}

/// Digit-wise (a - b) mod q on register indices.
pub fn sub_indices(q: u32, n: usize, a: usize, b: usize) -> usize {
    let q = q as usize;
    let mut out = 0usize;
    let mut pow = 1usize;
    let (mut a, mut b) = (a, b);
    let mut digits = vec![0usize; n];
    for d in digits.iter_mut().rev() {
        let da = a % q;
        let db = b % q;
        *d = (da + q - db) % q;
        a /= q;
        b /= q;
    }
    for d in digits {
        out = out * q + d;
        pow *= 1; // keep shape of the loop obvious
    }
    let _ = pow;
    out
}

/// Digit-wise (a + b) mod q on register indices.
pub fn add_indices(q: u32, n: usize, a: usize, b: usize) -> usize {
    let q = q as usize;
    let mut digits = vec![0usize; n];
    let (mut a, mut b) = (a, b);
    for d in digits.iter_mut().rev() {
        *d = (a % q + b % q) % q;
        a /= q;
        b /= q;
    }
    digits.into_iter().fold(0, |acc, d| acc * q + d)
}

/// One measured shot: the observed word-register vector with its
/// verification bits.
#[derive(Clone, Debug, Serialize)]
pub struct ShotRecord {
    pub c_perp: Vec<u32>,
    pub weight: usize,
    pub in_dual: bool,
    /// in_dual and weight == selected u
    pub success: bool,
    /// in_dual, nonzero, and weight inside the dual hard band
    pub in_band: bool,
}

/// Everything one pipeline run produces.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineTranscript {
    pub schema_version: u32,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub coin_bits: usize,
    pub mode: Mode,
    pub decoder: DecoderSpec,
    pub q_est_mode: QEstMode,
    pub seed: u64,
    pub generator_row_major: Vec<u32>,
    pub min_distance: usize,
    pub z: f64,
    pub x_collision: f64,
    pub epsilon_target: f64,
    pub epsilon_g: f64,
    pub epsilon_g_fraction: Option<(u64, u64)>,
    /// Trace distance of the decoded state from the disentangled state.
    pub d_tr_decode: f64,
    /// The lemma bound sqrt(1 - 2^l q^k p_t^2 eps_G^2 / Z) it must respect.
    pub d_tr_bound: f64,
    pub d_tr_qft: f64,
    pub d_tr_amplified: Option<f64>,
    pub selected_u: usize,
    pub assumption: AssumptionReport,
    pub q_est: f64,
    /// Probability of measuring word weight u from the ideal post-QFT state.
    pub p_u_ideal: f64,
    /// Same probability from the actual post-QFT state.
    pub p_u_actual: f64,
    pub plan: Option<AmplificationPlan>,
    pub amplified: bool,
    pub weight_dist_qft: Vec<f64>,
    pub weight_dist_ideal_qft: Vec<f64>,
    pub lemma_measure_formula: Vec<f64>,
    pub lemma_measure_max_dev: f64,
    pub weight_dist_final: Vec<f64>,
    pub band_low: usize,
    pub band_high: f64,
    pub shots: u64,
    pub success_count: u64,
    pub band_count: u64,
    pub dual_member_count: u64,
    pub samples: Vec<ShotRecord>,
}

/// Quantized decoder step: |e>|y>|w> -> |e - A(G,y,w)>|y>|w> as a basis
/// permutation, using a precomputed decode table indexed by (y, w).
fn apply_quantized_decoder(state: &mut StateVector, decode_table: &[usize]) {
    let shape = state.shape();
    let coin_len = shape.coin_len();
    let (q, n) = (shape.q, shape.n);
    state.permute_basis(|e, y, w| {
        let a = decode_table[y * coin_len + w];
        (sub_indices(q, n, e, a), y, w)
    });
}

fn decode_table(code: &LinearCode, oracle: &DecoderOracle, shape: RegisterShape) -> Vec<usize> {
    let coin_len = shape.coin_len();
    let mut table = vec![0usize; shape.register_len() * coin_len];
    for y_idx in 0..shape.register_len() {
        let y = FqVector::from_residues(code.q(), shape.index_vector(y_idx)).expect("prime q");
        for w in 0..coin_len {
            let a = oracle.decode(code, &y, w as u32);
            table[y_idx * coin_len + w] = shape.vector_index(&a);
        }
    }
    table
}

/// The initial superposition sum pi_e |e>|c>|w> / sqrt(2^l q^k).
pub fn build_initial_state(
    code: &LinearCode,
    dist: &RadialErrorDistribution,
    coin_bits: usize,
    budget: u128,
) -> Result<StateVector> {
    let q = code.q();
    let n = code.n();
    let shape = RegisterShape::new(q, n, coin_bits, budget)?;
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); shape.len()];
    let table = weights_table(q, n);
    let norm0 = 1.0 / ((shape.coin_len() as f64) * (q as f64).powi(code.k() as i32)).sqrt();
    let codeword_indices: Vec<usize> = code.codewords().map(|c| shape.vector_index(&c)).collect();
    for e_idx in 0..shape.register_len() {
        let fe = dist.f(table[e_idx] as usize);
        if fe == 0.0 {
            continue;
        }
        for &c_idx in &codeword_indices {
            for w in 0..shape.coin_len() {
                amps[shape.index(e_idx, c_idx, w)] = num_complex::Complex64::new(fe * norm0, 0.0);
            }
        }
    }
    StateVector::from_amplitudes(shape, amps)
}

/// Steps one to three of the boxed algorithm: prepare, entangle, decode.
pub fn build_decoded_state(
    code: &LinearCode,
    oracle: &DecoderOracle,
    dist: &RadialErrorDistribution,
    coin_bits: usize,
    budget: u128,
) -> Result<StateVector> {
    let q = code.q();
    let n = code.n();
    let mut psi = build_initial_state(code, dist, coin_bits, budget)?;
    psi.permute_basis(|e, y, w| (e, add_indices(q, n, y, e), w));
    let dtable = decode_table(code, oracle, psi.shape());
    apply_quantized_decoder(&mut psi, &dtable);
    Ok(psi)
}

/// Build |psi_0> and run it through the boxed algorithm for one code.
pub fn run_pipeline(code: &LinearCode, params: &ReductionParams) -> Result<PipelineTranscript> {
    params.validate()?;
    let q = code.q();
    let n = code.n();
    let k = code.k();
    let t = params.t;
    let shape = RegisterShape::new(q, n, params.coin_bits, params.budget)?;
    let dist = RadialErrorDistribution::uniform_sphere(q, n, t)?;
    let oracle = params.decoder.build(t, params.coin_bits)?;
    let table = weights_table(q, n);
    let psi = build_decoded_state(code, &oracle, &dist, params.coin_bits, params.budget)?;

    // disentangled reference state
    let (psi_ideal, norm) = build_ideal_state(code, &dist, params.coin_bits, params.budget)?;
    let d_tr_decode = trace_distance(&psi, &psi_ideal)?;

    // exact decoder quality for this code
    let mut eps_rng = substream(params.seed, 0x5eed);
    let eps = empirical_epsilon(&oracle, code, params.budget, 20_000, &mut eps_rng);
    let epsilon_g = eps.value();
    let epsilon_g_fraction = match &eps {
        EpsilonEstimate::Exact { successes, trials } => Some((*successes, *trials)),
        _ => None,
    };
    let p_t = dist.mass_at(t);
    let d_tr_bound = (1.0
        - (shape.coin_len() as f64) * (q as f64).powi(k as i32) * p_t * p_t * epsilon_g
            * epsilon_g
            / norm.z)
        .max(0.0)
        .sqrt();

    // QFT on the word register of both states
    let mut psi_qft = psi;
    psi_qft.qft_register(Register::Word, false)?;
    let mut ideal_qft = psi_ideal;
    ideal_qft.qft_register(Register::Word, false)?;
    let d_tr_qft = trace_distance(&psi_qft, &ideal_qft)?;

    let weight_dist_qft = psi_qft.measure_weight_distribution(Register::Word);
    let weight_dist_ideal_qft = ideal_qft.measure_weight_distribution(Register::Word);

    // the measurement formula for the ideal state
    let dual_wd = code.dual().weight_distribution(params.budget)?;
    let fperp = dist.dual_profile()?;
    let coin_len = shape.coin_len() as f64;
    let q2k = (q as f64).powi(2 * k as i32);
    let lemma_measure_formula: Vec<f64> = (0..=n)
        .map(|u| coin_len * q2k / norm.z * dual_wd.count(u) as f64 * fperp[u] * fperp[u])
        .collect();
    let lemma_measure_max_dev = weight_dist_ideal_qft
        .iter()
        .zip(&lemma_measure_formula)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    // dual weight target
    let (selected_u, assumption) = match params.u_override {
        Some(u) => {
            let ctx = KrawtchoukContext::new(q, n)?;
            let rep = assumption_for(&ctx, q, n, k, t, u)?;
            if params.mode == Mode::Strict && !rep.passes {
                return Err(Error::InvalidParameter(format!(
                    "strict mode: forced u = {u} fails the dual-weight assumption"
                )));
            }
            (u, rep)
        }
        None => select_u(q, n, k, t, params.mode)?,
    };

    let p_u_ideal = weight_dist_ideal_qft[selected_u];
    let p_u_actual = weight_dist_qft[selected_u];
    let q_est = match params.q_est_mode {
        QEstMode::Analytic => assumption.mass,
        QEstMode::ExactPerCode => lemma_measure_formula[selected_u],
    };

    // amplification toward word weight u
    let weight_of_word: Vec<u8> = table;
    let good = |idx: usize| {
        let (_, w_idx, _) = shape.split(idx);
        weight_of_word[w_idx] as usize == selected_u
    };
    let mut plan = None;
    let mut d_tr_amplified = None;
    let mut amplified = false;
    let (final_probs, weight_dist_final): (Vec<f64>, Vec<f64>) = if params.amplify
        && q_est > 0.0
        && q_est < 1.0
    {
        let out = amplify(psi_qft.amplitudes(), good, q_est)?;
        let ideal_out = amplify(ideal_qft.amplitudes(), good, q_est)?;
        let ip: num_complex::Complex64 = out
            .amps
            .iter()
            .zip(&ideal_out.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        d_tr_amplified = Some((1.0 - ip.norm_sqr()).max(0.0).sqrt());
        plan = Some(out.plan);
        amplified = true;
        let probs: Vec<f64> = out.amps.iter().map(|a| a.norm_sqr()).collect();
        let mut by_weight = vec![0.0f64; n + 1];
        for (j, p) in probs.iter().enumerate() {
            if *p > 0.0 {
                let (_, w_idx, _) = shape.split(j >> 1);
                by_weight[weight_of_word[w_idx] as usize] += p;
            }
        }
        (probs, by_weight)
    } else {
        let probs = psi_qft.probabilities();
        (probs, weight_dist_qft.clone())
    };

    // measurement shots
    let band_low = gv_distance(q, n, n - k);
    let band_high = (q as f64 - 1.0) / q as f64 * k as f64;
    let mut cdf = Vec::with_capacity(final_probs.len());
    let mut acc = 0.0f64;
    for p in &final_probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = substream(params.seed, 1);
    let mut samples = Vec::new();
    let mut success_count = 0u64;
    let mut band_count = 0u64;
    let mut dual_member_count = 0u64;
    let gen = code.generator();
    for _ in 0..params.shots {
        let r: f64 = rng.gen::<f64>() * total;
        let j = cdf.partition_point(|&c| c < r).min(final_probs.len() - 1);
        let base = if amplified { j >> 1 } else { j };
        let (_, w_idx, _) = shape.split(base);
        let c_perp_digits = shape.index_vector(w_idx);
        let v = FqVector::from_residues(q, c_perp_digits.clone())?;
        let weight = v.hamming_weight();
        let in_dual = gen.mul_vector(&v)?.is_zero();
        let success = in_dual && weight == selected_u;
        let in_band = in_dual && weight > 0 && weight >= band_low && (weight as f64) < band_high;
        success_count += success as u64;
        band_count += in_band as u64;
        dual_member_count += in_dual as u64;
        samples.push(ShotRecord {
            c_perp: c_perp_digits,
            weight,
            in_dual,
            success,
            in_band,
        });
    }

    Ok(PipelineTranscript {
        schema_version: 1,
        q,
        n,
        k,
        t,
        coin_bits: params.coin_bits,
        mode: params.mode,
        decoder: params.decoder,
        q_est_mode: params.q_est_mode,
        seed: params.seed,
        generator_row_major: code.generator().entries_row_major().to_vec(),
        min_distance: code.min_distance(params.budget)?,
        z: norm.z,
        x_collision: norm.x_collision,
        epsilon_target: params.decoder.epsilon_target(),
        epsilon_g,
        epsilon_g_fraction,
        d_tr_decode,
        d_tr_bound,
        d_tr_qft,
        d_tr_amplified,
        selected_u,
        assumption,
        q_est,
        p_u_ideal,
        p_u_actual,
        plan,
        amplified,
        weight_dist_qft,
        weight_dist_ideal_qft,
        lemma_measure_formula,
        lemma_measure_max_dev,
        weight_dist_final,
        band_low,
        band_high,
        shots: params.shots,
        success_count,
        band_count,
        dual_member_count,
        samples,
    })
}

/// Compare the measured weight distribution of the transformed disentangled
/// state against the closed-form (2^l q^{2k} / Z) N_perp_u |f_perp(u)|^2.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaMeasureReport {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub max_abs_deviation: f64,
    pub simulated: Vec<f64>,
    pub formula: Vec<f64>,
    pub pass: bool,
}

pub fn verify_lemma_measure(
    code: &LinearCode,
    t: usize,
    coin_bits: usize,
    budget: u128,
) -> Result<LemmaMeasureReport> {
    let q = code.q();
    let n = code.n();
    let k = code.k();
    let dist = RadialErrorDistribution::uniform_sphere(q, n, t)?;
    let (mut ideal, norm) = build_ideal_state(code, &dist, coin_bits, budget)?;
    ideal.qft_register(Register::Word, false)?;
    let simulated = ideal.measure_weight_distribution(Register::Word);
    let dual_wd = code.dual().weight_distribution(budget)?;
    let fperp = dist.dual_profile()?;
    let coin_len = (1u64 << coin_bits) as f64;
    let q2k = (q as f64).powi(2 * k as i32);
    let formula: Vec<f64> = (0..=n)
        .map(|u| coin_len * q2k / norm.z * dual_wd.count(u) as f64 * fperp[u] * fperp[u])
        .collect();
    let max_abs_deviation = simulated
        .iter()
        .zip(&formula)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(LemmaMeasureReport {
        q,
        n,
        k,
        t,
        max_abs_deviation,
        simulated,
        formula,
        pass: max_abs_deviation <= 1e-8,
    })
}

/// The end-to-end theorem check: over sampled codes, run the full pipeline
/// with an unreliable decoder and compare the success frequency of measuring
/// a weight-u dual codeword against p_t^2 eps^3 / 16 minus a Monte Carlo
/// margin.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremMainReport {
    pub epsilon_target: f64,
    pub codes: u64,
    pub shots_per_code: u64,
    pub total_shots: u64,
    pub mean_epsilon_g: f64,
    pub success_frequency: f64,
    pub mean_success_probability: f64,
    pub bound: f64,
    pub monte_carlo_margin: f64,
    pub pass: bool,
    /// Success statistics restricted to codes where t is within unique
    /// decoding (d_min > 2t); empty when no sampled code qualifies.
    pub unique_regime_codes: u64,
    pub unique_regime_success: f64,
    pub vacuous: bool,
}

pub fn verify_theorem_main(
    params: &ReductionParams,
    n_codes: u64,
    shots_per_code: u64,
) -> Result<TheoremMainReport> {
    let mut eps_sum = 0.0;
    let mut succ = 0u64;
    let mut psucc_sum = 0.0;
    let mut uniq_codes = 0u64;
    let mut uniq_succ = 0u64;
    let mut uniq_shots = 0u64;
    for i in 0..n_codes {
        let mut code_rng = substream(params.seed, 0x100 + i);
        let sampled = sample_code_g_model(params.q, params.n, params.k, &mut code_rng)?;
        let mut p = params.clone();
        p.shots = shots_per_code;
        p.seed = params.seed ^ (0x9e37 + i);
        let tr = run_pipeline(&sampled.code, &p)?;
        eps_sum += tr.epsilon_g;
        succ += tr.success_count;
        psucc_sum += tr.weight_dist_final[tr.selected_u].min(1.0);
        if tr.min_distance > 2 * params.t {
            uniq_codes += 1;
            uniq_succ += tr.success_count;
            uniq_shots += tr.shots;
        }
    }
    let total_shots = n_codes * shots_per_code;
    let mean_epsilon_g = eps_sum / n_codes as f64;
    let success_frequency = succ as f64 / total_shots as f64;
    let p_t = 1.0; // sphere profile
    let bound = p_t * p_t * mean_epsilon_g.powi(3) / 16.0;
    let monte_carlo_margin = 3.0
        * (success_frequency * (1.0 - success_frequency) / total_shots as f64)
            .sqrt()
            .max(1e-6);
    let vacuous = bound <= 0.0;
    let pass = vacuous || success_frequency >= bound - monte_carlo_margin;
    Ok(TheoremMainReport {
        epsilon_target: params.decoder.epsilon_target(),
        codes: n_codes,
        shots_per_code,
        total_shots,
        mean_epsilon_g,
        success_frequency,
        mean_success_probability: psucc_sum / n_codes as f64,
        bound,
        monte_carlo_margin,
        pass,
        unique_regime_codes: uniq_codes,
        unique_regime_success: if uniq_shots > 0 {
            uniq_succ as f64 / uniq_shots as f64
        } else {
            0.0
        },
        vacuous,
    })
}

/// Empirical check of the step-1 proposition: the fraction of codes whose
/// decode-stage trace distance exceeds sqrt(1 - p_t^2 eps_G^2 / 2) must stay
/// below <pi|1>^2 / q^{n-k} plus the model-comparison and sampling slack.
#[derive(Clone, Debug, Serialize)]
pub struct Step1Report {
    pub codes: u64,
    pub violations: u64,
    pub violation_rate: f64,
    pub allowed: f64,
    pub slack: f64,
    pub pass: bool,
}

pub fn verify_step1_bound(params: &ReductionParams, n_codes: u64) -> Result<Step1Report> {
    let mut violations = 0u64;
    let dist = RadialErrorDistribution::uniform_sphere(params.q, params.n, params.t)?;
    let p_t = dist.mass_at(params.t);
    for i in 0..n_codes {
        let mut code_rng = substream(params.seed, 0x200 + i);
        let sampled = sample_code_g_model(params.q, params.n, params.k, &mut code_rng)?;
        let mut p = params.clone();
        p.shots = 0;
        let tr = run_pipeline(&sampled.code, &p)?;
        let bound = (1.0 - p_t * p_t * tr.epsilon_g * tr.epsilon_g / 2.0)
            .max(0.0)
            .sqrt();
        if tr.d_tr_decode > bound + 1e-9 {
            violations += 1;
        }
    }
    let s_t = sphere_size(params.q, params.n, params.t).to_f64().unwrap();
    let allowed =
        s_t / (params.q as f64).powi((params.n - params.k) as i32);
    let model_slack = (params.q as f64).powi(-(params.k.min(params.n - params.k) as i32));
    let rate = violations as f64 / n_codes as f64;
    let sampling = 3.0 * (allowed.min(1.0) * (1.0 - allowed.min(1.0)) / n_codes as f64).sqrt();
    let slack = model_slack + sampling.max(0.02);
    Ok(Step1Report {
        codes: n_codes,
        violations,
        violation_rate: rate,
        allowed,
        slack,
        pass: rate <= allowed + slack,
    })
}

/// Concentration of the dual weight count N_perp_u around S_u / q^k.
#[derive(Clone, Debug, Serialize)]
pub struct NperpReport {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub u: usize,
    pub codes: u64,
    pub deviation_rate: f64,
    pub allowed: f64,
    pub slack: f64,
    pub pass: bool,
}

pub fn verify_nperp(
    q: u32,
    n: usize,
    k: usize,
    u: usize,
    n_codes: u64,
    seed: u64,
    budget: u128,
) -> Result<NperpReport> {
    let s_u = sphere_size(q, n, u).to_f64().unwrap();
    let qk = (q as f64).powi(k as i32);
    let mean = s_u / qk;
    let dev = mean.powf(0.75);
    let allowed = (q as f64 - 1.0) * (qk / s_u).sqrt();
    let mut violations = 0u64;
    for i in 0..n_codes {
        let mut rng = substream(seed, 0x300 + i);
        let sampled = sample_code_g_model(q, n, k, &mut rng)?;
        let wd = sampled.code.dual().weight_distribution(budget)?;
        if (wd.count(u) as f64 - mean).abs() >= dev {
            violations += 1;
        }
    }
    let rate = violations as f64 / n_codes as f64;
    let slack = (3.0 * (allowed.min(1.0) / n_codes as f64).sqrt()).max(0.02);
    Ok(NperpReport {
        q,
        n,
        k,
        u,
        codes: n_codes,
        deviation_rate: rate,
        allowed,
        slack,
        pass: rate <= allowed + slack,
    })
}

/// The sphere-over-cube ratio S_t / q^{n-k} must decay q-exponentially in n
/// at fixed rate and relative radius below GV.
#[derive(Clone, Debug, Serialize)]
pub struct GvLemmaReport {
    pub q: u32,
    pub rate: f64,
    pub delta: f64,
    pub rows: Vec<GvLemmaRow>,
    pub analytic_exponent: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GvLemmaRow {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub log_q_ratio: f64,
}

pub fn verify_gv_lemma(
    q: u32,
    rate: f64,
    delta: f64,
    n_lo: usize,
    n_hi: usize,
) -> Result<GvLemmaReport> {
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let k = ((rate * n as f64).round() as usize).clamp(1, n - 1);
        let d_gv = gv_distance(q, n, k);
        let t = (((1.0 - delta) * d_gv as f64).floor() as usize).max(1);
        let ratio = BigRational::new(
            BigInt::from(sphere_size(q, n, t)),
            BigInt::from(q).pow((n - k) as u32),
        );
        let log_q_ratio = ratio.to_f64().unwrap().ln() / (q as f64).ln();
        rows.push(GvLemmaRow {
            n,
            k,
            t,
            log_q_ratio,
        });
    }
    let analytic_exponent = crate::analytic::gv_lemma_exponent(q, rate, delta)?;
    // negative exponents throughout, trending down with n
    let all_negative = rows.iter().all(|r| r.log_q_ratio < 0.0);
    let trend_down = rows.first().map_or(true, |first| {
        rows.last().unwrap().log_q_ratio < first.log_q_ratio
    });
    Ok(GvLemmaReport {
        q,
        rate,
        delta,
        rows,
        analytic_exponent,
        pass: all_negative && trend_down && analytic_exponent < 0.0,
    })
}
