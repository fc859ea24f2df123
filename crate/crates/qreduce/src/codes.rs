//! Linear codes over F_q: generator/parity-check views, duals, exact weight
//! distributions, random sampling in the generator and parity-check models,
//! Gilbert-Varshamov distances, and the decoder oracles that stand in for the
//! decoding algorithm under study.

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fq, FqMatrix, FqVector};

/// Default cap on the number of basis states any exhaustive enumeration may
/// touch.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// A k-dimensional linear code of length n with both matrix views kept in
/// sync: `generator` is k x n of rank k, `parity_check` is (n-k) x n of rank
/// n-k, and G H^T = 0 exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: Fq,
    n: usize,
    k: usize,
    generator: FqMatrix,
    parity_check: FqMatrix,
}

/// Serialized form: {q, n, k, generator row-major}. Bit-exact round-trip.
#[derive(Serialize, Deserialize)]
struct CodeJson {
    q: u32,
    n: usize,
    k: usize,
    generator: Vec<u32>,
}

impl LinearCode {
    /// Build from a full-rank generator matrix; the parity check is the
    /// kernel basis of G.
    pub fn from_generator(generator: FqMatrix) -> Result<Self> {
        let k = generator.rows();
        let n = generator.cols();
        if k > n {
            return Err(Error::InvalidParameter(format!("k = {k} > n = {n}")));
        }
        if generator.rank() != k {
            return Err(Error::InvalidParameter(format!(
                "generator matrix is not full rank (rank < {k})"
            )));
        }
        let parity_check = generator.kernel_basis();
        Ok(LinearCode {
            field: Fq::new(generator.q())?,
            n,
            k,
            generator,
            parity_check,
        })
    }

    /// Build from a full-rank parity-check matrix; the generator is the
    /// kernel basis of H.
    pub fn from_parity_check(parity_check: FqMatrix) -> Result<Self> {
        let r = parity_check.rows();
        let n = parity_check.cols();
        if r > n {
            return Err(Error::InvalidParameter(format!("n-k = {r} > n = {n}")));
        }
        if parity_check.rank() != r {
            return Err(Error::InvalidParameter(
                "parity-check matrix is not full rank".into(),
            ));
        }
        let generator = parity_check.kernel_basis();
        Ok(LinearCode {
            field: Fq::new(parity_check.q())?,
            n,
            k: n - r,
            generator,
            parity_check,
        })
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &FqMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &FqMatrix {
        &self.parity_check
    }

    /// The dual code: generator and parity check swap roles.
    pub fn dual(&self) -> LinearCode {
        LinearCode {
            field: self.field,
            n: self.n,
            k: self.n - self.k,
            generator: self.parity_check.clone(),
            parity_check: self.generator.clone(),
        }
    }

    pub fn contains(&self, v: &FqVector) -> Result<bool> {
        Ok(self.parity_check.mul_vector(v)?.is_zero())
    }

    /// Encode a length-k message.
    pub fn encode(&self, message: &FqVector) -> Result<FqVector> {
        self.generator.vector_mul(message)
    }

    /// All q^k codewords, in lexicographic message order.
    pub fn codewords(&self) -> impl Iterator<Item = FqVector> + '_ {
        MessageIter::new(self.field, self.k).map(move |m| self.encode(&m).expect("length k"))
    }

    /// Exact weight distribution by exhaustive enumeration. Refuses when q^k
    /// exceeds the budget; there is no sampling fallback.
    pub fn weight_distribution(&self, budget: u128) -> Result<WeightDistribution> {
        let total = (self.q() as u128).checked_pow(self.k as u32);
        match total {
            Some(t) if t <= budget => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    limiting: format!("q^k = {}^{}", self.q(), self.k),
                    required: total.unwrap_or(u128::MAX),
                    budget,
                });
            }
        }
        let mut counts = vec![0u64; self.n + 1];
        for c in self.codewords() {
            counts[c.hamming_weight()] += 1;
        }
        Ok(WeightDistribution { counts })
    }

    /// Minimum nonzero codeword weight; n+1 for the zero code by convention.
    pub fn min_distance(&self, budget: u128) -> Result<usize> {
        let wd = self.weight_distribution(budget)?;
        Ok((1..=self.n)
            .find(|&w| wd.counts[w] > 0)
            .unwrap_or(self.n + 1))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CodeJson {
            q: self.q(),
            n: self.n,
            k: self.k,
            generator: self.generator.entries_row_major().to_vec(),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CodeJson = serde_json::from_str(s)?;
        let field = Fq::new(j.q)?;
        let entries: Vec<i64> = j.generator.iter().map(|&v| v as i64).collect();
        let g = field.matrix(j.k, j.n, &entries)?;
        LinearCode::from_generator(g)
    }
}

/// Exact codeword counts by weight: counts[w] = number of codewords of
/// Hamming weight w. Sums to q^dim and counts[0] = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    counts: Vec<u64>,
}

impl WeightDistribution {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, w: usize) -> u64 {
        self.counts[w]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Iterate all vectors of F_q^k in lexicographic order (first coordinate most
/// significant).
pub struct MessageIter {
    field: Fq,
    current: Option<Vec<u32>>,
}

impl MessageIter {
    pub fn new(field: Fq, k: usize) -> Self {
        MessageIter {
            field,
            current: Some(vec![0; k]),
        }
    }
}

impl Iterator for MessageIter {
    type Item = FqVector;

    fn next(&mut self) -> Option<FqVector> {
        let cur = self.current.take()?;
        let out = self
            .field
            .vector(&cur.iter().map(|&v| v as i64).collect::<Vec<_>>());
        let q = self.field.q();
        let mut next = cur;
        let mut i = next.len();
        loop {
            if i == 0 {
                return Some(out); // current was the last one
            }
            i -= 1;
            next[i] += 1;
            if next[i] < q {
                break;
            }
            next[i] = 0;
        }
        self.current = Some(next);
        Some(out)
    }
}

/// A freshly sampled code together with how many draws full-rank resampling
/// took.
#[derive(Clone, Debug)]
pub struct SampledCode {
    pub code: LinearCode,
    pub resample_attempts: u32,
}

fn random_matrix<R: Rng>(field: Fq, rows: usize, cols: usize, rng: &mut R) -> FqMatrix {
    let mut m = field.zero_matrix(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.gen_range(0..field.q()));
        }
    }
    m
}

/// Uniform G over F_q^{k x n}, resampled until rank k.
pub fn sample_code_g_model<R: Rng>(q: u32, n: usize, k: usize, rng: &mut R) -> Result<SampledCode> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < n, got k={k}, n={n}"
        )));
    }
    let field = Fq::new(q)?;
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        let g = random_matrix(field, k, n, rng);
        if g.rank() == k {
            return Ok(SampledCode {
                code: LinearCode::from_generator(g)?,
                resample_attempts: attempts,
            });
        }
    }
}

/// Uniform H over F_q^{(n-k) x n}, resampled until rank n-k.
pub fn sample_code_h_model<R: Rng>(q: u32, n: usize, k: usize, rng: &mut R) -> Result<SampledCode> {
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= k < n, got k={k}, n={n}"
        )));
    }
    let field = Fq::new(q)?;
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        let h = random_matrix(field, n - k, n, rng);
        if h.rank() == n - k {
            return Ok(SampledCode {
                code: LinearCode::from_parity_check(h)?,
                resample_attempts: attempts,
            });
        }
    }
}

/// |S_w| = C(n,w) (q-1)^w, exact.
pub fn sphere_size(q: u32, n: usize, w: usize) -> BigUint {
    if w > n {
        return BigUint::zero();
    }
    binomial(BigUint::from(n), BigUint::from(w))
        * BigUint::from(q as u64 - 1).pow(w as u32)
}

/// |B_t| = sum of sphere sizes up to t, exact.
pub fn ball_size(q: u32, n: usize, t: usize) -> BigUint {
    (0..=t.min(n)).map(|w| sphere_size(q, n, w)).sum()
}

/// Gilbert-Varshamov distance for a length-n code of dimension `dim`: the
/// largest t with q^dim * B_t <= q^n.
pub fn gv_distance(q: u32, n: usize, dim: usize) -> usize {
    assert!(dim <= n);
    let rhs = BigUint::from(q).pow(n as u32);
    let qd = BigUint::from(q).pow(dim as u32);
    let mut acc = BigUint::zero();
    let mut last_ok = 0usize;
    for t in 0..=n {
        acc += sphere_size(q, n, t);
        if &qd * &acc <= rhs {
            last_ok = t;
        } else {
            break;
        }
    }
    last_ok
}

/// Upper Gilbert-Varshamov weight: the largest t with q^dim * S_t >= q^n.
/// Spheres shrink again past their peak, so scan all t.
pub fn gv_distance_plus(q: u32, n: usize, dim: usize) -> usize {
    assert!(dim <= n);
    let rhs = BigUint::from(q).pow(n as u32);
    let qd = BigUint::from(q).pow(dim as u32);
    (0..=n)
        .filter(|&t| &qd * sphere_size(q, n, t) >= rhs)
        .max()
        .unwrap_or(0)
}

/// Decoding oracle: a total, deterministic function of (code, received,
/// coins). The `coin_bits` register feeds the unreliable wrapper; the
/// exhaustive and constant kinds ignore the coins.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderOracle {
    kind: DecoderKind,
    radius: usize,
    coin_bits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecoderKind {
    /// Enumerate all q^k codewords; unique closest within the radius wins,
    /// ties break to the lexicographically smallest codeword, and failure
    /// falls back to the received word as the error estimate.
    BoundedDistanceExhaustive,
    /// Wraps the exhaustive decoder behind a coin gate: it runs only when the
    /// first `gate_bits` coins are all zero, otherwise it reports the zero
    /// error estimate (never correct for t >= 1). Wrapping a perfect decoder
    /// yields success probability exactly 2^-gate_bits.
    Unreliable { epsilon_target: f64, gate_bits: usize },
    /// Always reports the zero error estimate; negative control.
    AdversarialConstant,
}

impl DecoderOracle {
    pub fn exhaustive(radius: usize, coin_bits: usize) -> Self {
        DecoderOracle {
            kind: DecoderKind::BoundedDistanceExhaustive,
            radius,
            coin_bits,
        }
    }

    pub fn adversarial(radius: usize, coin_bits: usize) -> Self {
        DecoderOracle {
            kind: DecoderKind::AdversarialConstant,
            radius,
            coin_bits,
        }
    }

    /// epsilon_target must be in (0, 1]; the gate uses
    /// ceil(log2(1/epsilon_target)) coin bits, which must fit in coin_bits.
    pub fn unreliable(radius: usize, epsilon_target: f64, coin_bits: usize) -> Result<Self> {
        if !(epsilon_target > 0.0 && epsilon_target <= 1.0) {
            return Err(Error::Domain {
                what: "epsilon_target",
                value: epsilon_target,
                domain: "(0, 1]",
            });
        }
        let gate_bits = (1.0 / epsilon_target).log2().ceil() as usize;
        if gate_bits > coin_bits {
            return Err(Error::InvalidParameter(format!(
                "unreliable decoder needs {gate_bits} coin bits, oracle has {coin_bits}"
            )));
        }
        Ok(DecoderOracle {
            kind: DecoderKind::Unreliable {
                epsilon_target,
                gate_bits,
            },
            radius,
            coin_bits,
        })
    }

    pub fn kind(&self) -> &DecoderKind {
        &self.kind
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn coin_bits(&self) -> usize {
        self.coin_bits
    }

    /// The error estimate A(G, received, coins). Total: always returns a
    /// vector, so the quantum embedding e -> e - A(G, c+e, w) stays a basis
    /// permutation.
    pub fn decode(&self, code: &LinearCode, received: &FqVector, coins: u32) -> FqVector {
        debug_assert!(received.len() == code.n());
        debug_assert!(self.coin_bits >= 32 - coins.leading_zeros() as usize);
        match &self.kind {
            DecoderKind::AdversarialConstant => code.field().zero_vector(code.n()),
            DecoderKind::Unreliable { gate_bits, .. } => {
                if coins & ((1u32 << gate_bits) - 1) != 0 {
                    code.field().zero_vector(code.n())
                } else {
                    self.exhaustive_decode(code, received)
                }
            }
            DecoderKind::BoundedDistanceExhaustive => self.exhaustive_decode(code, received),
        }
    }

    fn exhaustive_decode(&self, code: &LinearCode, received: &FqVector) -> FqVector {
        let mut best: Option<FqVector> = None;
        for c in code.codewords() {
            let err = received.sub(&c).expect("same length");
            if err.hamming_weight() <= self.radius {
                // codewords arrive in lexicographic message order, which is
                // not codeword-lexicographic; compare explicitly
                match &best {
                    Some(b) if b.entries() <= c.entries() => {}
                    _ => best = Some(c),
                }
            }
        }
        match best {
            Some(c) => received.sub(&c).expect("same length"),
            None => received.clone(),
        }
    }
}

/// Measured decoder success probability for a fixed code: the fraction of
/// (codeword, weight-t error, coins) triples on which the oracle returns the
/// planted error.
#[derive(Clone, Debug, Serialize)]
pub enum EpsilonEstimate {
    Exact {
        successes: u64,
        trials: u64,
    },
    MonteCarlo {
        estimate: f64,
        half_width: f64,
        samples: u64,
    },
}

impl EpsilonEstimate {
    pub fn value(&self) -> f64 {
        match self {
            EpsilonEstimate::Exact { successes, trials } => *successes as f64 / *trials as f64,
            EpsilonEstimate::MonteCarlo { estimate, .. } => *estimate,
        }
    }
}

/// Enumerate all weight-t vectors of F_q^n in lexicographic order.
pub fn sphere_iter(q: u32, n: usize, t: usize) -> Vec<FqVector> {
    let field = Fq::new(q).expect("prime q");
    let mut out = Vec::new();
    let mut support = Vec::new();
    fn rec(
        field: Fq,
        n: usize,
        t: usize,
        start: usize,
        support: &mut Vec<usize>,
        out: &mut Vec<FqVector>,
    ) {
        if support.len() == t {
            let q = field.q();
            let mut values = vec![1u32; t];
            loop {
                let mut entries = vec![0i64; n];
                for (i, &pos) in support.iter().enumerate() {
                    entries[pos] = values[i] as i64;
                }
                out.push(field.vector(&entries));
                let mut i = t;
                loop {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                    values[i] += 1;
                    if values[i] < q {
                        break;
                    }
                    values[i] = 1;
                }
            }
        }
        for pos in start..n {
            support.push(pos);
            rec(field, n, t, pos + 1, support, out);
            support.pop();
        }
    }
    if t == 0 {
        out.push(field.zero_vector(n));
    } else if t <= n {
        rec(field, n, t, 0, &mut support, &mut out);
    }
    out
}

/// Exact epsilon_G when the full (c, e, w) enumeration fits in the budget,
/// else a Monte Carlo estimate with a reported 99% confidence half-width.
pub fn empirical_epsilon<R: Rng>(
    oracle: &DecoderOracle,
    code: &LinearCode,
    budget: u128,
    mc_samples: u64,
    rng: &mut R,
) -> EpsilonEstimate {
    let q = code.q();
    let n = code.n();
    let t = oracle.radius();
    let coins = 1u128 << oracle.coin_bits();
    let sphere = sphere_size(q, n, t);
    let total = BigUint::from(q).pow(code.k() as u32) * &sphere * BigUint::from(coins);
    if total.to_u128().map(|v| v <= budget).unwrap_or(false) {
        let sphere_vecs = sphere_iter(q, n, t);
        let mut successes = 0u64;
        let mut trials = 0u64;
        for c in code.codewords() {
            for e in &sphere_vecs {
                let y = c.add(e).expect("same length");
                for w in 0..coins as u32 {
                    trials += 1;
                    if &oracle.decode(code, &y, w) == e {
                        successes += 1;
                    }
                }
            }
        }
        EpsilonEstimate::Exact { successes, trials }
    } else {
        let mut successes = 0u64;
        for _ in 0..mc_samples {
            let inst = DecodingInstance::sample(code, t, rng).expect("valid instance");
            let e = inst.planted_error.as_ref().expect("planted");
            let w = rng.gen_range(0..coins as u32);
            if &oracle.decode(code, &inst.received, w) == e {
                successes += 1;
            }
        }
        let p = successes as f64 / mc_samples as f64;
        EpsilonEstimate::MonteCarlo {
            estimate: p,
            // 99% normal-approximation half-width
            half_width: 2.576 * (p * (1.0 - p) / mc_samples as f64).sqrt(),
            samples: mc_samples,
        }
    }
}

/// True iff H c^T = 0 and 0 < |c| <= w: a valid short-codeword witness.
pub fn verify_scp_solution(h: &FqMatrix, c: &FqVector, w: usize) -> bool {
    let weight = c.hamming_weight();
    weight > 0
        && weight <= w
        && h.mul_vector(c).map(|s| s.is_zero()).unwrap_or(false)
}

/// A decoding-problem instance, optionally carrying its planted error for
/// verification.
#[derive(Clone, Debug)]
pub struct DecodingInstance {
    pub code: LinearCode,
    pub received: FqVector,
    pub planted_error: Option<FqVector>,
}

impl DecodingInstance {
    /// Sample c uniformly from the code and e uniformly from the weight-t
    /// sphere; received = c + e.
    pub fn sample<R: Rng>(code: &LinearCode, t: usize, rng: &mut R) -> Result<Self> {
        let q = code.q();
        let msg_entries: Vec<i64> = (0..code.k()).map(|_| rng.gen_range(0..q) as i64).collect();
        let c = code.encode(&code.field().vector(&msg_entries))?;
        let mut positions: Vec<usize> = (0..code.n()).collect();
        for i in 0..t {
            let j = rng.gen_range(i..positions.len());
            positions.swap(i, j);
        }
        let mut entries = vec![0i64; code.n()];
        for &pos in positions.iter().take(t) {
            entries[pos] = rng.gen_range(1..q) as i64;
        }
        let e = code.field().vector(&entries);
        let received = c.add(&e)?;
        Ok(DecodingInstance {
            code: code.clone(),
            received,
            planted_error: Some(e),
        })
    }

    /// Check a candidate error: received - candidate must be a codeword.
    pub fn verify(&self, candidate: &FqVector) -> Result<bool> {
        let c = self.received.sub(candidate)?;
        self.code.contains(&c)
    }
}
