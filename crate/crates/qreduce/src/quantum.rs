//! Dense statevector engine over the three-register basis
//! F_q^n (error) x F_q^n (word) x {0,1}^l (coins), the QFT over F_q^n applied
//! register-wise, distance measures between states and distributions, radial
//! error profiles with their Fourier duals, and exact Grover-style amplitude
//! amplification with the known-probability rotation tweak.
//!
//! Basis ordering is mixed-radix with the error register most significant:
//! index = (e_index * q^n + word_index) * 2^l + coins, and within a register
//! the first coordinate is the most significant digit. Measurement marginals
//! are therefore reproducible bit-exactly at fixed float semantics.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::codes::sphere_size;
use crate::error::{Error, Result};
use crate::field::FqVector;
use crate::kravchuk::KrawtchoukContext;
use num_traits::ToPrimitive;

/// Which register an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    /// First register: the error e.
    Error,
    /// Second register: the noisy word c+e, later the dual codeword.
    Word,
}

/// Shape of the three-register system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegisterShape {
    pub q: u32,
    pub n: usize,
    pub coin_bits: usize,
}

impl RegisterShape {
    pub fn new(q: u32, n: usize, coin_bits: usize, budget: u128) -> Result<Self> {
        let qn = (q as u128)
            .checked_pow(n as u32)
            .ok_or_else(|| Error::InvalidParameter("q^n overflows".into()))?;
        let total = qn
            .checked_mul(qn)
            .and_then(|v| v.checked_mul(1u128 << coin_bits));
        match total {
            Some(t) if t <= budget => Ok(RegisterShape { q, n, coin_bits }),
            _ => Err(Error::BudgetExceeded {
                limiting: format!("q^(2n)*2^l = {q}^{}*2^{coin_bits}", 2 * n),
                required: total.unwrap_or(u128::MAX),
                budget,
            }),
        }
    }

    /// Size of one F_q^n register.
    pub fn register_len(&self) -> usize {
        (self.q as usize).pow(self.n as u32)
    }

    pub fn coin_len(&self) -> usize {
        1 << self.coin_bits
    }

    pub fn len(&self) -> usize {
        self.register_len() * self.register_len() * self.coin_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, e_idx: usize, word_idx: usize, coins: usize) -> usize {
        (e_idx * self.register_len() + word_idx) * self.coin_len() + coins
    }

    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let coins = idx % self.coin_len();
        let rest = idx / self.coin_len();
        let word = rest % self.register_len();
        let e = rest / self.register_len();
        (e, word, coins)
    }

    /// Rank of a vector in the register ordering (first coordinate most
    /// significant).
    pub fn vector_index(&self, v: &FqVector) -> usize {
        debug_assert_eq!(v.len(), self.n);
        v.entries()
            .iter()
            .fold(0usize, |acc, &d| acc * self.q as usize + d as usize)
    }

    pub fn index_vector(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.n];
        for i in (0..self.n).rev() {
            out[i] = (idx % self.q as usize) as u32;
            idx /= self.q as usize;
        }
        out
    }
}

/// Hamming weight of every register index, in index order.
pub fn weights_table(q: u32, n: usize) -> Vec<u8> {
    let len = (q as usize).pow(n as u32);
    let mut table = vec![0u8; len];
    for idx in 1..len {
        let parent = idx / q as usize;
        let digit = idx % q as usize;
        table[idx] = table[parent] + (digit != 0) as u8;
    }
    table
}

/// A pure state over the three-register basis. Mutable while a pipeline owns
/// it; analysis methods take shared references.
#[derive(Clone, Debug)]
pub struct StateVector {
    shape: RegisterShape,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(shape: RegisterShape) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); shape.len()];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { shape, amps }
    }

    pub fn from_amplitudes(shape: RegisterShape, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != shape.len() {
            return Err(Error::ShapeMismatch {
                context: format!("{} amplitudes for shape of {}", amps.len(), shape.len()),
            });
        }
        Ok(StateVector { shape, amps })
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                context: "inner product of differently shaped states".into(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply a basis permutation given as a map on (e, word, coins) triples.
    /// The map must be a bijection; amplitudes are gathered accordingly.
    pub fn permute_basis<F>(&mut self, f: F)
    where
        F: Fn(usize, usize, usize) -> (usize, usize, usize),
    {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (e, w, c) = self.shape.split(idx);
            let (e2, w2, c2) = f(e, w, c);
            out[self.shape.index(e2, w2, c2)] += a;
        }
        self.amps = out;
    }

    /// QFT on the chosen register, as n sequential q-point transforms, one
    /// per coordinate: amp'[y] = q^{-n/2} sum_x chi_y(x) amp[x] with
    /// chi_y(x) = exp(2 pi i x.y / q). `inverse` conjugates the kernel.
    pub fn qft_register(&mut self, reg: Register, inverse: bool) -> Result<()> {
        let q = self.shape.q as usize;
        let sign = if inverse { -1.0 } else { 1.0 };
        let scale = 1.0 / (q as f64).sqrt();
        // q x q DFT kernel
        let mut kernel = vec![Complex64::new(0.0, 0.0); q * q];
        for a in 0..q {
            for b in 0..q {
                let angle = sign * TAU * (a * b % q) as f64 / q as f64;
                kernel[a * q + b] = Complex64::new(angle.cos(), angle.sin()) * scale;
            }
        }
        let coin_len = self.shape.coin_len();
        let reg_len = self.shape.register_len();
        let mut scratch = vec![Complex64::new(0.0, 0.0); q];
        for coord in 0..self.shape.n {
            // stride of this coordinate inside the full index
            let digit_stride_in_reg = q.pow((self.shape.n - 1 - coord) as u32);
            let stride = match reg {
                Register::Word => digit_stride_in_reg * coin_len,
                Register::Error => digit_stride_in_reg * reg_len * coin_len,
            };
            let block = stride * q;
            let total = self.amps.len();
            let mut base = 0usize;
            while base < total {
                for offset in 0..stride {
                    let start = base + offset;
                    for (d, s) in scratch.iter_mut().enumerate() {
                        *s = self.amps[start + d * stride];
                    }
                    for b in 0..q {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (a, s) in scratch.iter().enumerate() {
                            acc += kernel[a * q + b] * s;
                        }
                        self.amps[start + b * stride] = acc;
                    }
                }
                base += block;
            }
        }
        Ok(())
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal probability of observing each Hamming weight on the chosen
    /// register.
    pub fn measure_weight_distribution(&self, reg: Register) -> Vec<f64> {
        let table = weights_table(self.shape.q, self.shape.n);
        let mut out = vec![0.0f64; self.shape.n + 1];
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let (e, w, _) = self.shape.split(idx);
            let r = match reg {
                Register::Error => e,
                Register::Word => w,
            };
            out[table[r] as usize] += p;
        }
        out
    }
}

impl StateVector {
    /// Dump the state: one JSON header line {q, n, l, shape}, then the
    /// amplitudes as little-endian float64 (re, im) pairs. Test fixture
    /// format, not a public interchange file.
    pub fn dump<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        let header = serde_json::json!({
            "q": self.shape.q,
            "n": self.shape.n,
            "l": self.shape.coin_bits,
            "shape": [self.shape.register_len(), self.shape.register_len(), self.shape.coin_len()],
        });
        serde_json::to_writer(&mut *out, &header)?;
        out.write_all(b"\n")?;
        for a in &self.amps {
            out.write_all(&a.re.to_le_bytes())?;
            out.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load<R: std::io::BufRead>(input: &mut R) -> Result<StateVector> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let v: serde_json::Value = serde_json::from_str(header.trim())?;
        let q = v["q"].as_u64().ok_or_else(|| Error::ShapeMismatch {
            context: "dump header missing q".into(),
        })? as u32;
        let n = v["n"].as_u64().unwrap_or(0) as usize;
        let l = v["l"].as_u64().unwrap_or(0) as usize;
        let shape = RegisterShape::new(q, n, l, u128::MAX)?;
        let mut amps = Vec::with_capacity(shape.len());
        let mut buf = [0u8; 16];
        for _ in 0..shape.len() {
            let mut read = 0;
            while read < 16 {
                let got = input.read(&mut buf[read..])?;
                if got == 0 {
                    return Err(Error::ShapeMismatch {
                        context: "dump truncated".into(),
                    });
                }
                read += got;
            }
            amps.push(Complex64::new(
                f64::from_le_bytes(buf[0..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..16].try_into().unwrap()),
            ));
        }
        StateVector::from_amplitudes(shape, amps)
    }
}

/// sqrt(1 - |<a|b>|^2) for pure states.
pub fn trace_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ip = a.inner(b)?;
    Ok((1.0 - ip.norm_sqr()).max(0.0).sqrt())
}

/// Total variation distance (1/2) sum |p - q| over a common index set.
pub fn stat_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Hellinger distance sqrt(1 - sum sqrt(p_i q_i)).
pub fn hellinger(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    (1.0 - bc).max(0.0).sqrt()
}

/// A radial amplitude profile: the error-state amplitude depends only on the
/// Hamming weight. Nonnegative by construction.
#[derive(Clone, Debug)]
pub struct RadialErrorDistribution {
    q: u32,
    n: usize,
    kind: RadialKind,
    amplitude: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RadialKind {
    /// Uniform over the weight-t sphere: f(w) = 1/sqrt(S_t) at w = t.
    UniformSphere { t: usize },
    /// Product q-ary symmetric channel state of crossover p.
    Bernoulli { p: f64 },
}

impl RadialErrorDistribution {
    pub fn uniform_sphere(q: u32, n: usize, t: usize) -> Result<Self> {
        if t > n {
            return Err(Error::OutOfRange {
                what: "t",
                value: t as i64,
                lo: 0,
                hi: n as i64,
            });
        }
        let s_t = sphere_size(q, n, t)
            .to_f64()
            .ok_or_else(|| Error::InvalidParameter("sphere size overflows f64".into()))?;
        let mut amplitude = vec![0.0; n + 1];
        amplitude[t] = 1.0 / s_t.sqrt();
        Ok(RadialErrorDistribution {
            q,
            n,
            kind: RadialKind::UniformSphere { t },
            amplitude,
        })
    }

    pub fn bernoulli(q: u32, n: usize, p: f64) -> Result<Self> {
        let top = (q as f64 - 1.0) / q as f64;
        if !(0.0..=top).contains(&p) {
            return Err(Error::Domain {
                what: "p",
                value: p,
                domain: "[0, (q-1)/q]",
            });
        }
        let amplitude = (0..=n)
            .map(|w| {
                (1.0 - p).powf((n - w) as f64 / 2.0) * (p / (q as f64 - 1.0)).powf(w as f64 / 2.0)
            })
            .collect();
        Ok(RadialErrorDistribution {
            q,
            n,
            kind: RadialKind::Bernoulli { p },
            amplitude,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &RadialKind {
        &self.kind
    }

    /// Amplitude at weight w.
    pub fn f(&self, w: usize) -> f64 {
        self.amplitude[w]
    }

    /// Probability mass of the whole weight-w sphere: S_w f(w)^2.
    pub fn mass_at(&self, w: usize) -> f64 {
        sphere_size(self.q, self.n, w).to_f64().unwrap() * self.amplitude[w] * self.amplitude[w]
    }

    /// p_t of the theorem statement: the mass at the concentration weight.
    /// 1 for a sphere profile.
    pub fn concentration_mass(&self) -> f64 {
        match self.kind {
            RadialKind::UniformSphere { t } => self.mass_at(t),
            RadialKind::Bernoulli { p } => {
                self.mass_at((p * self.n as f64).round() as usize)
            }
        }
    }

    /// Sum of all amplitudes <pi|1> = sum_w S_w f(w).
    pub fn inner_with_ones(&self) -> f64 {
        (0..=self.n)
            .map(|w| sphere_size(self.q, self.n, w).to_f64().unwrap() * self.amplitude[w])
            .sum()
    }

    /// The Fourier dual profile f_perp by weight. Sphere profiles transform
    /// through Krawtchouk values, Bernoulli profiles stay Bernoulli at the
    /// dual crossover.
    pub fn dual_profile(&self) -> Result<Vec<f64>> {
        match self.kind {
            RadialKind::UniformSphere { t } => {
                let ctx = KrawtchoukContext::new(self.q, self.n)?;
                let qn = (self.q as f64).powi(self.n as i32);
                let s_t = sphere_size(self.q, self.n, t).to_f64().unwrap();
                let denom = (qn * s_t).sqrt();
                (0..=self.n)
                    .map(|u| Ok(ctx.eval(t, u)?.to_f64().unwrap() / denom))
                    .collect()
            }
            RadialKind::Bernoulli { p } => {
                let p_perp = crate::analytic::bernoulli_dual(self.q, p)?.p_perp;
                Ok((0..=self.n)
                    .map(|u| {
                        (1.0 - p_perp).powf((self.n - u) as f64 / 2.0)
                            * (p_perp / (self.q as f64 - 1.0)).powf(u as f64 / 2.0)
                    })
                    .collect())
            }
        }
    }

    /// The state |0> tensor |pi> tensor |0...0>: the profile embedded on the
    /// word register with the error and coin registers at zero.
    pub fn embed_on_word(&self, coin_bits: usize, budget: u128) -> Result<StateVector> {
        let shape = RegisterShape::new(self.q, self.n, coin_bits, budget)?;
        let table = weights_table(self.q, self.n);
        let mut amps = vec![Complex64::new(0.0, 0.0); shape.len()];
        for w_idx in 0..shape.register_len() {
            let a = self.amplitude[table[w_idx] as usize];
            if a != 0.0 {
                amps[shape.index(0, w_idx, 0)] = Complex64::new(a, 0.0);
            }
        }
        StateVector::from_amplitudes(shape, amps)
    }
}

/// The rotation plan of the known-probability amplification tweak: the
/// largest alpha in [0, 1] making T = pi/(4 arcsin sqrt(alpha q_est)) - 1/2 a
/// nonnegative integer, found by scanning T upward.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AmplificationPlan {
    pub q_est: f64,
    pub alpha: f64,
    pub rho: f64,
    pub iterations: u32,
    /// False when no T up to the cap was feasible; the plan then degrades to
    /// the identity (T = 0, alpha untouched at 1).
    pub feasible: bool,
}

const MAX_AMPLIFICATION_STEPS: u32 = 1_000_000;

pub fn plan_amplification(q_est: f64) -> Result<AmplificationPlan> {
    if !(q_est > 0.0 && q_est < 1.0) {
        return Err(Error::Domain {
            what: "q_est",
            value: q_est,
            domain: "(0, 1)",
        });
    }
    for t in 0..MAX_AMPLIFICATION_STEPS {
        let rho = PI / (4.0 * t as f64 + 2.0);
        let alpha = rho.sin().powi(2) / q_est;
        if alpha <= 1.0 {
            return Ok(AmplificationPlan {
                q_est,
                alpha,
                rho,
                iterations: t,
                feasible: true,
            });
        }
    }
    Ok(AmplificationPlan {
        q_est,
        alpha: 1.0,
        rho: 0.0,
        iterations: 0,
        feasible: false,
    })
}

/// Result of amplification: the final state over the doubled basis (one
/// ancilla qubit appended, least significant), its plan, and the probability
/// of the marked subspace (good and ancilla = 1).
#[derive(Clone, Debug)]
pub struct Amplified {
    pub amps: Vec<Complex64>,
    pub plan: AmplificationPlan,
    pub success_probability: f64,
}

/// Amplitude amplification with the alpha-rotation tweak, executed exactly at
/// statevector level. `good` marks basis indices of the input vector; the
/// marked subspace after adding the ancilla is good(i) and ancilla = 1.
/// Reflections are about the built state itself, so the input must be the
/// state the preparation unitary produces.
pub fn amplify<F>(amps: &[Complex64], good: F, q_est: f64) -> Result<Amplified>
where
    F: Fn(usize) -> bool,
{
    let plan = plan_amplification(q_est)?;
    Ok(amplify_with_plan(amps, good, plan))
}

/// The iteration loop itself, for a caller-supplied plan. With zero
/// iterations this is the identity on the built state (up to the ancilla
/// rotation).
pub fn amplify_with_plan<F>(amps: &[Complex64], good: F, plan: AmplificationPlan) -> Amplified
where
    F: Fn(usize) -> bool,
{
    let n = amps.len();
    let mut state = vec![Complex64::new(0.0, 0.0); 2 * n];
    let a1 = plan.alpha.sqrt();
    let a0 = (1.0 - plan.alpha).max(0.0).sqrt();
    for (i, &a) in amps.iter().enumerate() {
        state[2 * i] = a * a0;
        state[2 * i + 1] = a * a1;
    }
    let built = state.clone();
    let good_mask: Vec<bool> = (0..2 * n).map(|j| j & 1 == 1 && good(j >> 1)).collect();
    for _ in 0..plan.iterations {
        // reflect about the marked subspace (phase oracle)
        for (s, &g) in state.iter_mut().zip(&good_mask) {
            if g {
                *s = -*s;
            }
        }
        // reflect about the built state: 2 |psi><psi| - I
        let ov: Complex64 = built.iter().zip(&state).map(|(b, s)| b.conj() * s).sum();
        for (s, b) in state.iter_mut().zip(&built) {
            *s = 2.0 * ov * b - *s;
        }
    }
    let success_probability = state
        .iter()
        .zip(&good_mask)
        .filter(|(_, &g)| g)
        .map(|(s, _)| s.norm_sqr())
        .sum();
    Amplified {
        amps: state,
        plan,
        success_probability,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::DEFAULT_BUDGET;
    use crate::field::Fq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_bit_qft() {
        // q=2, n=1: |1> -> (|0> - |1>)/sqrt(2), embedded on the word register
        let shape = RegisterShape::new(2, 1, 0, DEFAULT_BUDGET).unwrap();
        let mut amps = vec![c(0.0, 0.0); shape.len()];
        amps[shape.index(0, 1, 0)] = c(1.0, 0.0);
        let mut st = StateVector::from_amplitudes(shape, amps).unwrap();
        st.qft_register(Register::Word, false).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert!((st.amplitudes()[shape.index(0, 0, 0)] - c(r, 0.0)).norm() < 1e-12);
        assert!((st.amplitudes()[shape.index(0, 1, 0)] - c(-r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn uniform_superposition_transforms_to_zero() {
        for (q, n) in [(2u32, 3usize), (3, 2), (5, 1)] {
            let shape = RegisterShape::new(q, n, 0, DEFAULT_BUDGET).unwrap();
            let reg = shape.register_len();
            let amp = 1.0 / (reg as f64).sqrt();
            let mut amps = vec![c(0.0, 0.0); shape.len()];
            for w in 0..reg {
                amps[shape.index(0, w, 0)] = c(amp, 0.0);
            }
            let mut st = StateVector::from_amplitudes(shape, amps).unwrap();
            st.qft_register(Register::Word, false).unwrap();
            for w in 0..reg {
                let expect = if w == 0 { 1.0 } else { 0.0 };
                assert!(
                    (st.amplitudes()[shape.index(0, w, 0)] - c(expect, 0.0)).norm() < 1e-10,
                    "q={q} n={n} w={w}"
                );
            }
        }
    }

    #[test]
    fn qft_of_coset_indicator_lands_on_dual_with_characters() {
        // repetition code q=2 n=3: QFT(sum_c |c+e>) =
        // (q^k/sqrt(q^n)) sum_{cp in dual} chi_cp(e) |cp>
        use crate::codes::LinearCode;
        use crate::field::character;
        let f2 = Fq::new(2).unwrap();
        let code = LinearCode::from_generator(f2.matrix(1, 3, &[1, 1, 1]).unwrap()).unwrap();
        let shape = RegisterShape::new(2, 3, 0, DEFAULT_BUDGET).unwrap();
        for e_entries in [[0i64, 0, 0], [1, 0, 0], [0, 1, 1]] {
            let e = f2.vector(&e_entries);
            let mut amps = vec![c(0.0, 0.0); shape.len()];
            for cw in code.codewords() {
                let y = cw.add(&e).unwrap();
                amps[shape.index(0, shape.vector_index(&y), 0)] = c(1.0, 0.0);
            }
            let mut st = StateVector::from_amplitudes(shape, amps).unwrap();
            st.qft_register(Register::Word, false).unwrap();
            let scale = 2.0 / 8.0f64.sqrt(); // q^k / sqrt(q^n)
            for w_idx in 0..shape.register_len() {
                let v = FqVector::from_residues(2, shape.index_vector(w_idx)).unwrap();
                let got = st.amplitudes()[shape.index(0, w_idx, 0)];
                let expect = if code.dual().contains(&v).unwrap() {
                    character(&v, &e).unwrap() * scale
                } else {
                    c(0.0, 0.0)
                };
                assert!((got - expect).norm() < 1e-10, "e={e_entries:?} w={w_idx}");
            }
        }
    }

    #[test]
    fn qft_inverse_is_identity_and_unitary() {
        let shape = RegisterShape::new(3, 2, 1, DEFAULT_BUDGET).unwrap();
        let mut amps = vec![c(0.0, 0.0); shape.len()];
        // arbitrary normalized state
        let mut norm = 0.0;
        for (i, a) in amps.iter_mut().enumerate() {
            *a = c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
            norm += a.norm_sqr();
        }
        let norm = norm.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        let st0 = StateVector::from_amplitudes(shape, amps).unwrap();
        let mut st = st0.clone();
        st.qft_register(Register::Word, false).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-9);
        st.qft_register(Register::Word, true).unwrap();
        let d = trace_distance(&st, &st0).unwrap();
        assert!(d < 1e-9, "round trip distance {d}");
        // error register too
        let mut st = st0.clone();
        st.qft_register(Register::Error, false).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-9);
        st.qft_register(Register::Error, true).unwrap();
        assert!(trace_distance(&st, &st0).unwrap() < 1e-9);
    }

    #[test]
    fn qft_preserves_radial_states() {
        // exhaustive shape check at q=2 n<=6 and q=3 n<=4: QFT of any radial
        // profile is radial
        for (q, nmax) in [(2u32, 6usize), (3, 4)] {
            for n in 1..=nmax {
                let mut profile = vec![0.0f64; n + 1];
                for (w, p) in profile.iter_mut().enumerate() {
                    *p = ((w + 1) as f64 * 0.61).sin().abs();
                }
                let table = weights_table(q, n);
                let shape = RegisterShape::new(q, n, 0, DEFAULT_BUDGET).unwrap();
                let mut amps = vec![c(0.0, 0.0); shape.len()];
                for w_idx in 0..shape.register_len() {
                    amps[shape.index(0, w_idx, 0)] = c(profile[table[w_idx] as usize], 0.0);
                }
                let mut st = StateVector::from_amplitudes(shape, amps).unwrap();
                st.normalize();
                st.qft_register(Register::Word, false).unwrap();
                // all amplitudes of equal weight must agree
                let mut by_weight: Vec<Option<Complex64>> = vec![None; n + 1];
                for w_idx in 0..shape.register_len() {
                    let a = st.amplitudes()[shape.index(0, w_idx, 0)];
                    match by_weight[table[w_idx] as usize] {
                        None => by_weight[table[w_idx] as usize] = Some(a),
                        Some(b) => assert!((a - b).norm() < 1e-10, "q={q} n={n}"),
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_dual_profile_matches_statevector_qft() {
        for (q, nmax) in [(2u32, 8usize), (3, 5)] {
            for n in 1..=nmax {
                for t in 0..=n {
                    let dist = RadialErrorDistribution::uniform_sphere(q, n, t).unwrap();
                    let fperp = dist.dual_profile().unwrap();
                    let mut st = dist.embed_on_word(0, 1 << 22).unwrap();
                    st.qft_register(Register::Word, false).unwrap();
                    let table = weights_table(q, n);
                    let shape = st.shape();
                    for w_idx in 0..shape.register_len() {
                        let got = st.amplitudes()[shape.index(0, w_idx, 0)];
                        let expect = fperp[table[w_idx] as usize];
                        assert!(
                            (got - c(expect, 0.0)).norm() <= 1e-10,
                            "q={q} n={n} t={t} idx={w_idx}: {got} vs {expect}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tiny_sphere_dual_profile() {
        // n=1, q=2, t=1: f_perp(0) = 1/sqrt(2), f_perp(1) = -1/sqrt(2)
        let dist = RadialErrorDistribution::uniform_sphere(2, 1, 1).unwrap();
        let fperp = dist.dual_profile().unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert!((fperp[0] - r).abs() < 1e-12);
        assert!((fperp[1] + r).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_profile_endpoints() {
        let q = 3;
        let dist = RadialErrorDistribution::bernoulli(q, 4, 0.0).unwrap();
        // p=0 concentrates on the zero error
        assert_eq!(dist.f(0), 1.0);
        assert_eq!(dist.f(1), 0.0);
        // and its dual is the Bernoulli profile at (q-1)/q
        let dual = dist.dual_profile().unwrap();
        let far = RadialErrorDistribution::bernoulli(q, 4, 2.0 / 3.0).unwrap();
        for u in 0..=4 {
            assert!((dual[u] - far.f(u)).abs() < 1e-12);
        }
        // normalization: sum_w S_w f(w)^2 = 1
        let dist = RadialErrorDistribution::bernoulli(2, 6, 0.3).unwrap();
        let total: f64 = (0..=6).map(|w| dist.mass_at(w)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_measures() {
        let shape = RegisterShape::new(2, 1, 0, DEFAULT_BUDGET).unwrap();
        let a = StateVector::zero_state(shape);
        assert!(trace_distance(&a, &a).unwrap() < 1e-15);
        let mut amps = vec![c(0.0, 0.0); shape.len()];
        amps[1] = c(1.0, 0.0);
        let b = StateVector::from_amplitudes(shape, amps).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        // overlap 1/sqrt(2) -> distance 1/sqrt(2)
        let r = 1.0 / 2.0f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); shape.len()];
        amps[0] = c(r, 0.0);
        amps[1] = c(r, 0.0);
        let h = StateVector::from_amplitudes(shape, amps).unwrap();
        assert!((trace_distance(&a, &h).unwrap() - r).abs() < 1e-12);
        assert!((stat_distance(&[1.0, 0.0], &[0.5, 0.5]) - 0.5).abs() < 1e-15);
        assert_eq!(hellinger(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
    }

    #[test]
    fn weight_marginals() {
        let shape = RegisterShape::new(2, 3, 0, DEFAULT_BUDGET).unwrap();
        let st = StateVector::zero_state(shape);
        let p = st.measure_weight_distribution(Register::Word);
        assert_eq!(p[0], 1.0);
        // uniform over F_2^3: binomial weights
        let amp = 1.0 / 8.0f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); shape.len()];
        for w in 0..8 {
            amps[shape.index(0, w, 0)] = c(amp, 0.0);
        }
        let st = StateVector::from_amplitudes(shape, amps).unwrap();
        let p = st.measure_weight_distribution(Register::Word);
        let expect = [1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_estimate_amplifies_to_one() {
        // p_true = q_est = 1/4: alpha = 1, T = 1, success exactly 1
        let half = 0.5f64;
        let amps = vec![c(half, 0.0), c((1.0f64 - half * half).sqrt(), 0.0)];
        let out = amplify(&amps, |i| i == 0, 0.25).unwrap();
        assert_eq!(out.plan.iterations, 1);
        assert!((out.plan.alpha - 1.0).abs() < 1e-12);
        assert!((out.success_probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_estimate_is_one_for_other_probabilities_too() {
        for p in [0.1f64, 0.2, 0.6, 0.9] {
            let amps = vec![c(p.sqrt(), 0.0), c((1.0 - p).sqrt(), 0.0)];
            let out = amplify(&amps, |i| i == 0, p).unwrap();
            assert!(
                (out.success_probability - 1.0).abs() < 1e-9,
                "p={p}: {}",
                out.success_probability
            );
        }
    }

    #[test]
    fn small_misestimate_degrades_gently() {
        let q_est = 0.25f64;
        for rel in [-0.01, 0.01] {
            let p = q_est * (1.0 + rel);
            let amps = vec![c(p.sqrt(), 0.0), c((1.0f64 - p).sqrt(), 0.0)];
            let out = amplify(&amps, |i| i == 0, q_est).unwrap();
            assert!(
                out.success_probability >= 1.0 - 1e-2,
                "rel={rel}: {}",
                out.success_probability
            );
        }
    }

    #[test]
    fn zero_iterations_is_identity() {
        let p = 0.9f64;
        let amps = vec![c(p.sqrt(), 0.0), c((1.0 - p).sqrt(), 0.0)];
        let plan = AmplificationPlan {
            q_est: p,
            alpha: 1.0,
            rho: 0.0,
            iterations: 0,
            feasible: false,
        };
        let out = amplify_with_plan(&amps, |i| i == 0, plan);
        // alpha = 1 puts all mass on ancilla 1; state otherwise untouched
        assert!((out.amps[1] - amps[0]).norm() < 1e-15);
        assert!((out.amps[3] - amps[1]).norm() < 1e-15);
        assert!((out.success_probability - p).abs() < 1e-12);
    }

    #[test]
    fn plan_scans_upward_for_the_largest_alpha() {
        // q_est = 0.95: T=0 needs alpha > 1, so the first feasible is T=1
        let plan = plan_amplification(0.95).unwrap();
        assert_eq!(plan.iterations, 1);
        assert!((plan.alpha - 0.25 / 0.95).abs() < 1e-12);
        // q_est in [sin^2(pi/6), 1) always plans T=1
        let plan = plan_amplification(0.25).unwrap();
        assert_eq!(plan.iterations, 1);
        assert!((plan.alpha - 1.0).abs() < 1e-12);
        // smaller q_est needs more iterations
        let plan = plan_amplification(0.01).unwrap();
        assert!(plan.iterations > 1);
        assert!(plan.alpha <= 1.0);
        assert!(plan_amplification(1.0).is_err());
        assert!(plan_amplification(0.0).is_err());
        assert!(plan_amplification(-0.5).is_err());
    }

    #[test]
    fn state_dump_round_trip_is_bit_exact() {
        let shape = RegisterShape::new(3, 2, 1, DEFAULT_BUDGET).unwrap();
        let mut amps = vec![c(0.0, 0.0); shape.len()];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = c((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos());
        }
        let st = StateVector::from_amplitudes(shape, amps).unwrap();
        let mut buf = Vec::new();
        st.dump(&mut buf).unwrap();
        let mut cursor = std::io::Cursor::new(buf);
        let back = StateVector::load(&mut cursor).unwrap();
        assert_eq!(back.shape(), st.shape());
        for (a, b) in st.amplitudes().iter().zip(back.amplitudes()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn budget_refusal_names_the_dimension() {
        match RegisterShape::new(2, 20, 4, 1 << 22) {
            Err(Error::BudgetExceeded { limiting, .. }) => {
                assert!(limiting.contains("2^40"), "{limiting}");
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
