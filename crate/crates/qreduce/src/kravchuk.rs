//! Exact Krawtchouk polynomial machinery: evaluation, the three-term
//! difference equation, discrete orthogonality, root localization with
//! certified sign-change brackets, root-spacing certificates, and the
//! mass-between-roots search that drives the dual-weight selection.
//!
//! K_t(x) for parameter q and order n is the integer
//!
//! ```text
//! K_t(x) = sum_{j=0..t} (-1)^j C(x,j) C(n-x,t-j) (q-1)^{t-j}
//! ```
//!
//! Evaluations at integers are cached as exact big integers. Between integers
//! the polynomial is evaluated through the degree recurrence, either in f64
//! (reporting) or in exact rational arithmetic (sign decisions inside
//! bisection, where f64 cancellation at large n is untrustworthy).

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Cached exact values of K_t(x) for all t, x in [0, n].
pub struct KrawtchoukContext {
    q: u32,
    n: usize,
    table: Vec<Vec<BigInt>>,
}

/// One located root: its float estimate, the integer-resolution bracket that
/// contains it, and the final bisection bracket width (0 for exact hits).
#[derive(Clone, Debug)]
pub struct RootBracket {
    pub root: f64,
    pub int_lo: usize,
    pub int_hi: usize,
    pub width: f64,
}

/// All t roots of K_t in (0, n), in increasing order.
#[derive(Clone, Debug)]
pub struct RootList {
    pub roots: Vec<RootBracket>,
}

impl RootList {
    pub fn positions(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.root).collect()
    }

    pub fn min_gap(&self) -> Option<f64> {
        let p = self.positions();
        p.windows(2).map(|w| w[1] - w[0]).fold(None, |acc, g| {
            Some(match acc {
                None => g,
                Some(a) if g < a => g,
                Some(a) => a,
            })
        })
    }

    pub fn max_gap(&self) -> Option<f64> {
        let p = self.positions();
        p.windows(2)
            .map(|w| w[1] - w[0])
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.max(g))))
    }
}

impl KrawtchoukContext {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::ModulusTooSmall { q });
        }
        // Pascal triangle and (q-1) powers, cached for the O(n^3) sum terms
        let mut pascal: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        for a in 0..=n {
            let mut row = vec![BigInt::one(); a + 1];
            for b in 1..a {
                row[b] = &pascal[a - 1][b - 1] + &pascal[a - 1][b];
            }
            pascal.push(row);
        }
        let choose = |a: usize, b: usize| -> &BigInt { &pascal[a][b] };
        let mut qm1_pow = Vec::with_capacity(n + 1);
        qm1_pow.push(BigInt::one());
        for _ in 0..n {
            qm1_pow.push(qm1_pow.last().unwrap() * BigInt::from(q as i64 - 1));
        }
        let mut table = Vec::with_capacity(n + 1);
        for t in 0..=n {
            let mut row = Vec::with_capacity(n + 1);
            for x in 0..=n {
                let mut acc = BigInt::zero();
                for j in 0..=t.min(x) {
                    if t - j > n - x {
                        continue;
                    }
                    let term = choose(x, j) * choose(n - x, t - j) * &qm1_pow[t - j];
                    if j % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                row.push(acc);
            }
            table.push(row);
        }
        Ok(KrawtchoukContext { q, n, table })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exact K_t(x) at integer points.
    pub fn eval(&self, t: usize, x: usize) -> Result<&BigInt> {
        if t > self.n || x > self.n {
            return Err(Error::OutOfRange {
                what: "(t, x)",
                value: t.max(x) as i64,
                lo: 0,
                hi: self.n as i64,
            });
        }
        Ok(&self.table[t][x])
    }

    /// K_t at a real point via the degree recurrence
    /// (j+1) K_{j+1}(x) = ((q-1)(n-j) + j - q x) K_j(x) - (q-1)(n-j+1) K_{j-1}(x).
    pub fn eval_real(&self, t: usize, x: f64) -> f64 {
        let q = self.q as f64;
        let n = self.n as f64;
        if t == 0 {
            return 1.0;
        }
        let mut prev = 1.0;
        let mut cur = (q - 1.0) * n - q * x;
        for j in 1..t {
            let jf = j as f64;
            let next = (((q - 1.0) * (n - jf) + jf - q * x) * cur
                - (q - 1.0) * (n - jf + 1.0) * prev)
                / (jf + 1.0);
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Same recurrence in exact rational arithmetic; used for sign decisions
    /// at non-integer points.
    pub fn eval_rational(&self, t: usize, x: &BigRational) -> BigRational {
        let q = BigRational::from_integer(BigInt::from(self.q));
        let n = BigRational::from_integer(BigInt::from(self.n as i64));
        let one = BigRational::one();
        if t == 0 {
            return one;
        }
        let mut prev = one.clone();
        let mut cur = (&q - &one) * &n - &q * x;
        for j in 1..t {
            let jf = BigRational::from_integer(BigInt::from(j as i64));
            let next = (((&q - &one) * (&n - &jf) + &jf - &q * x) * &cur
                - (&q - &one) * (&n - &jf + &one) * &prev)
                / (&jf + &one);
            prev = cur;
            cur = next;
        }
        cur
    }

    /// The difference-equation residual
    /// (q-1)(n-x) K_t(x+1) - ((q-1)(n-x) + x - qt) K_t(x) + x K_t(x-1),
    /// identically zero for 1 <= x <= n-1.
    pub fn recurrence_residual(&self, t: usize, x: usize) -> Result<BigInt> {
        if x == 0 || x >= self.n {
            return Err(Error::OutOfRange {
                what: "x",
                value: x as i64,
                lo: 1,
                hi: self.n as i64 - 1,
            });
        }
        let q = self.q as i64;
        let n = self.n as i64;
        let xi = x as i64;
        let ti = t as i64;
        let a = BigInt::from((q - 1) * (n - xi));
        let b = BigInt::from((q - 1) * (n - xi) + xi - q * ti);
        let c = BigInt::from(xi);
        Ok(&a * self.eval(t, x + 1)? - &b * self.eval(t, x)? + &c * self.eval(t, x - 1)?)
    }

    /// The orthogonality measure mu(j) = (q-1)^j C(n,j) / q^n.
    pub fn measure(&self, j: usize) -> BigRational {
        let num = BigInt::from(self.q as i64 - 1).pow(j as u32)
            * BigInt::from(binomial(BigUint::from(self.n), BigUint::from(j)));
        BigRational::new(num, BigInt::from(self.q).pow(self.n as u32))
    }

    /// Squared l2 norm of K_t under mu: (q-1)^t C(n,t).
    pub fn norm_sq(&self, t: usize) -> BigInt {
        BigInt::from(self.q as i64 - 1).pow(t as u32)
            * BigInt::from(binomial(BigUint::from(self.n), BigUint::from(t)))
    }

    /// Exact sum over j of K_s(j) K_t(j) mu(j): zero off the diagonal,
    /// (q-1)^t C(n,t) on it.
    pub fn orthogonality_check(&self, s: usize, t: usize) -> Result<BigRational> {
        if s > self.n || t > self.n {
            return Err(Error::OutOfRange {
                what: "(s, t)",
                value: s.max(t) as i64,
                lo: 0,
                hi: self.n as i64,
            });
        }
        let mut acc = BigRational::zero();
        for j in 0..=self.n {
            let prod = self.eval(s, j)? * self.eval(t, j)?;
            acc += BigRational::from_integer(prod) * self.measure(j);
        }
        Ok(acc)
    }

    fn sign_at(&self, t: usize, x: &BigRational) -> i8 {
        if x.is_integer() {
            let xi = x.to_integer().to_usize().expect("in range");
            let v = &self.table[t][xi];
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        } else {
            let v = self.eval_rational(t, x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        }
    }

    /// Locate the t distinct roots of K_t in (0, n). Sign changes are scanned
    /// at integer resolution first, then at quarter steps if any root is
    /// missing; brackets are refined by bisection with exact rational sign
    /// evaluation to width <= 1e-9.
    pub fn roots(&self, t: usize) -> Result<RootList> {
        let bound = self.n * (self.q as usize - 1) / self.q as usize;
        if t < 1 || t > bound {
            return Err(Error::OutOfRange {
                what: "t",
                value: t as i64,
                lo: 1,
                hi: bound as i64,
            });
        }
        for step_denom in [1u32, 4] {
            if let Some(list) = self.scan_roots(t, step_denom) {
                return Ok(list);
            }
        }
        Err(Error::RootSearch(format!(
            "fewer than {t} sign changes for K_{t} at quarter-integer resolution (q={}, n={})",
            self.q, self.n
        )))
    }

    fn scan_roots(&self, t: usize, denom: u32) -> Option<RootList> {
        let steps = self.n as u64 * denom as u64;
        let mut roots = Vec::new();
        let mut prev_sign = self.sign_at(t, &BigRational::zero());
        let mut prev_point = BigRational::zero();
        for i in 1..=steps {
            let point = BigRational::new(BigInt::from(i), BigInt::from(denom));
            let s = self.sign_at(t, &point);
            if s == 0 {
                // exact root at a grid point
                let rf = point.to_f64().unwrap();
                if rf > 0.0 && rf < self.n as f64 {
                    roots.push(RootBracket {
                        root: rf,
                        int_lo: rf.floor() as usize,
                        int_hi: rf.ceil() as usize,
                        width: 0.0,
                    });
                }
            } else if prev_sign != 0 && s != prev_sign {
                roots.push(self.bisect(t, prev_point.clone(), point.clone(), prev_sign));
            }
            prev_sign = s;
            prev_point = point;
        }
        if roots.len() == t {
            Some(RootList { roots })
        } else {
            None
        }
    }

    fn bisect(&self, t: usize, mut lo: BigRational, mut hi: BigRational, sign_lo: i8) -> RootBracket {
        let int_lo = lo.to_f64().unwrap().floor() as usize;
        let int_hi = hi.to_f64().unwrap().ceil() as usize;
        let mut sign_lo = sign_lo;
        let tol = BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000i64));
        while &hi - &lo > tol {
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            let s = self.sign_at(t, &mid);
            if s == 0 {
                let rf = mid.to_f64().unwrap();
                return RootBracket {
                    root: rf,
                    int_lo,
                    int_hi,
                    width: 0.0,
                };
            }
            if s == sign_lo {
                lo = mid;
                sign_lo = s;
            } else {
                hi = mid;
            }
        }
        let width = (&hi - &lo).to_f64().unwrap();
        let root = ((&lo + &hi) / BigRational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap();
        RootBracket {
            root,
            int_lo,
            int_hi,
            width,
        }
    }

    /// True iff the minimum gap between consecutive located roots of K_t is
    /// at least 2 - 1e-6. Vacuously true for t = 1. Requires t <= floor(n/q),
    /// the hypothesis under which the spacing bound is guaranteed.
    pub fn root_spacing_certificate(&self, t: usize) -> Result<bool> {
        let bound = self.n / self.q as usize;
        if t < 1 || t > bound {
            return Err(Error::OutOfRange {
                what: "t",
                value: t as i64,
                lo: 1,
                hi: bound as i64,
            });
        }
        let list = self.roots(t)?;
        Ok(list.min_gap().map_or(true, |g| g >= 2.0 - 1e-6))
    }

    /// Integer u strictly between roots x_k and x_{k+1} (0-based bracket
    /// index) maximizing the normalized mass K_t(u)^2 mu(u) / ((q-1)^t C(n,t)),
    /// returned with the exact mass. For t = 1 the single bracket index 0
    /// means the interval (x_1, n]. Requires t <= floor(n/q).
    pub fn mass_between_roots(&self, t: usize, bracket_index: usize) -> Result<(usize, BigRational)> {
        let bound = self.n / self.q as usize;
        if t < 1 || t > bound {
            return Err(Error::OutOfRange {
                what: "t",
                value: t as i64,
                lo: 1,
                hi: bound as i64,
            });
        }
        let list = self.roots(t)?;
        let brackets = if t == 1 { 1 } else { t - 1 };
        if bracket_index >= brackets {
            return Err(Error::OutOfRange {
                what: "bracket_index",
                value: bracket_index as i64,
                lo: 0,
                hi: brackets as i64 - 1,
            });
        }
        let lo = list.roots[bracket_index].root;
        let (hi, hi_inclusive) = if t == 1 {
            (self.n as f64, true)
        } else {
            (list.roots[bracket_index + 1].root, false)
        };
        self.max_mass_in(t, lo, hi, hi_inclusive)
    }

    /// Maximizing integer and normalized mass over integers in (lo, hi) (or
    /// (lo, hi] when inclusive). Exact rational comparison; ties break to the
    /// smaller u, the weight the reduction actually wants.
    pub fn max_mass_in(
        &self,
        t: usize,
        lo: f64,
        hi: f64,
        hi_inclusive: bool,
    ) -> Result<(usize, BigRational)> {
        let norm = self.norm_sq(t);
        let mut best: Option<(usize, BigRational)> = None;
        let u_start = (lo.floor() as isize + 1).max(0) as usize;
        for u in u_start..=self.n {
            let uf = u as f64;
            if uf <= lo {
                continue;
            }
            if uf > hi || (!hi_inclusive && uf >= hi) {
                break;
            }
            let k = self.eval(t, u)?;
            let mass = BigRational::from_integer(k * k) * self.measure(u)
                / BigRational::from_integer(norm.clone());
            match &best {
                Some((_, m)) if *m >= mass => {}
                _ => best = Some((u, mass)),
            }
        }
        best.ok_or_else(|| {
            Error::RootSearch(format!(
                "no integer strictly inside ({lo}, {hi}) for t = {t}; contradicts root spacing"
            ))
        })
    }

    /// Normalized mass at a single integer point: K_t(u)^2 mu(u) / norm.
    pub fn normalized_mass(&self, t: usize, u: usize) -> Result<BigRational> {
        let k = self.eval(t, u)?;
        Ok(BigRational::from_integer(k * k) * self.measure(u)
            / BigRational::from_integer(self.norm_sq(t)))
    }
}

/// Render an exact nonnegative rational as a decimal string with the given
/// number of significant digits (round half up).
pub fn rational_to_decimal(x: &BigRational, sig_digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    assert!(!x.is_negative(), "decimal rendering expects mass-like values");
    let num = x.numer().magnitude().clone();
    let den = x.denom().magnitude().clone();
    // decimal exponent: number of digits before the point, minus one
    let mut exp10: i64 = 0;
    let mut scaled_num = num.clone();
    let mut scaled_den = den.clone();
    let ten = BigUint::from(10u32);
    while scaled_num < scaled_den {
        scaled_num *= &ten;
        exp10 -= 1;
    }
    while scaled_num >= &scaled_den * &ten {
        scaled_den *= &ten;
        exp10 += 1;
    }
    // now 1 <= scaled_num/scaled_den < 10; extract sig_digits digits
    let shift = ten.pow(sig_digits as u32 - 1);
    let twice = (&scaled_num * &shift * 2u32 + &scaled_den) / (&scaled_den * 2u32);
    let mut digits = twice.to_string();
    if digits.len() > sig_digits {
        // rounding overflowed to a new leading digit (e.g. 9.99 -> 10.0)
        exp10 += 1;
        digits.truncate(sig_digits);
    }
    let mantissa = if sig_digits > 1 {
        format!("{}.{}", &digits[..1], &digits[1..])
    } else {
        digits
    };
    format!("{mantissa}e{exp10}")
}

/// CSV report: one row per (t, root index) with the root, the gap to the next
/// root, and the mass-maximizing integer in the interval that starts at this
/// root. Masses print with 15 significant digits; absent fields are empty.
pub fn write_kravchuk_csv<W: std::io::Write>(
    out: &mut W,
    ctx: &KrawtchoukContext,
    t_max: usize,
) -> Result<()> {
    writeln!(out, "t,root_index,root,gap,u_star,mass")?;
    for t in 1..=t_max.min(ctx.n() / ctx.q() as usize) {
        let list = ctx.roots(t)?;
        let pos = list.positions();
        for (i, root) in pos.iter().enumerate() {
            let gap = if i + 1 < pos.len() {
                format!("{:.12e}", pos[i + 1] - root)
            } else {
                String::new()
            };
            let (u_star, mass) = if t == 1 {
                let (u, m) = ctx.mass_between_roots(t, 0)?;
                (u.to_string(), rational_to_decimal(&m, 15))
            } else if i + 1 < pos.len() {
                let (u, m) = ctx.mass_between_roots(t, i)?;
                (u.to_string(), rational_to_decimal(&m, 15))
            } else {
                (String::new(), String::new())
            };
            writeln!(
                out,
                "{},{},{:.12e},{},{},{}",
                t,
                i + 1,
                root,
                gap,
                u_star,
                mass
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BISECT_TOL: f64 = 1e-9;

    /// Independent oracle: build the whole value table through the degree
    /// recurrence with exact division, never touching the defining sum.
    fn degree_recurrence_table(q: u32, n: usize) -> Vec<Vec<BigInt>> {
        let qi = BigInt::from(q as i64);
        let ni = BigInt::from(n as i64);
        let one = BigInt::one();
        let mut table: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        table.push(vec![BigInt::one(); n + 1]);
        if n >= 1 {
            table.push(
                (0..=n)
                    .map(|x| (&qi - &one) * &ni - &qi * BigInt::from(x as i64))
                    .collect(),
            );
        }
        for t in 1..n {
            let tf = BigInt::from(t as i64);
            let mut row = Vec::with_capacity(n + 1);
            for x in 0..=n {
                let xf = BigInt::from(x as i64);
                let lead = (&qi - &one) * (&ni - &tf) + &tf - &qi * &xf;
                let val = &lead * &table[t][x] - (&qi - &one) * (&ni - &tf + &one) * &table[t - 1][x];
                let (quot, rem) = num_integer::Integer::div_rem(&val, &(&tf + &one));
                assert!(rem.is_zero(), "degree recurrence not integral");
                row.push(quot);
            }
            table.push(row);
        }
        table
    }

    #[test]
    fn eval_examples() {
        let ctx = KrawtchoukContext::new(2, 4).unwrap();
        // K_t(0) = (q-1)^t C(n,t)
        for t in 0..=4 {
            assert_eq!(*ctx.eval(t, 0).unwrap(), ctx.norm_sq(t));
        }
        // q=2, n=4: K_1(x) = 4 - 2x
        for x in 0..=4usize {
            assert_eq!(
                *ctx.eval(1, x).unwrap(),
                BigInt::from(4 - 2 * x as i64)
            );
        }
        assert_eq!(*ctx.eval(1, 1).unwrap(), BigInt::from(2));
        assert!(ctx.eval(5, 0).is_err());
        let ctx5 = KrawtchoukContext::new(5, 6).unwrap();
        for t in 0..=6 {
            assert_eq!(*ctx5.eval(t, 0).unwrap(), ctx5.norm_sq(t));
        }
    }

    #[test]
    fn defining_sum_matches_degree_recurrence_exactly() {
        for (q, n) in [(2u32, 12usize), (3, 9), (5, 7)] {
            let ctx = KrawtchoukContext::new(q, n).unwrap();
            let oracle = degree_recurrence_table(q, n);
            for t in 0..=n {
                for x in 0..=n {
                    assert_eq!(*ctx.eval(t, x).unwrap(), oracle[t][x], "q={q} n={n} t={t} x={x}");
                }
            }
        }
    }

    #[test]
    fn difference_equation_residual_is_zero() {
        let ctx = KrawtchoukContext::new(2, 8).unwrap();
        for t in 0..=8 {
            for x in 1..8 {
                assert!(ctx.recurrence_residual(t, x).unwrap().is_zero());
            }
        }
        let ctx = KrawtchoukContext::new(3, 5).unwrap();
        assert!(ctx.recurrence_residual(2, 3).unwrap().is_zero());
        for x in 1..5 {
            assert!(ctx.recurrence_residual(0, x).unwrap().is_zero());
        }
    }

    #[test]
    fn orthogonality_exact() {
        let ctx = KrawtchoukContext::new(2, 10).unwrap();
        for s in 0..=10 {
            for t in 0..=10 {
                let v = ctx.orthogonality_check(s, t).unwrap();
                if s == t {
                    assert_eq!(v, BigRational::from_integer(ctx.norm_sq(t)));
                } else {
                    assert!(v.is_zero(), "s={s} t={t} -> {v}");
                }
            }
        }
        // mu is a probability measure: <K_0, K_0> = 1
        let ctx3 = KrawtchoukContext::new(3, 6).unwrap();
        assert_eq!(
            ctx3.orthogonality_check(0, 0).unwrap(),
            BigRational::one()
        );
        assert_eq!(
            ctx3.orthogonality_check(2, 2).unwrap(),
            BigRational::from_integer(ctx3.norm_sq(2))
        );
    }

    #[test]
    fn rational_eval_agrees_with_table_at_integers() {
        let ctx = KrawtchoukContext::new(3, 8).unwrap();
        for t in 0..=8 {
            for x in 0..=8 {
                let r = ctx.eval_rational(t, &BigRational::from_integer(BigInt::from(x as i64)));
                assert_eq!(r, BigRational::from_integer(ctx.eval(t, x).unwrap().clone()));
                let f = ctx.eval_real(t, x as f64);
                let exact = ctx.eval(t, x).unwrap().to_f64().unwrap();
                assert!((f - exact).abs() <= 1e-9 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn degree_one_root_is_exact_integer() {
        let ctx = KrawtchoukContext::new(2, 4).unwrap();
        let list = ctx.roots(1).unwrap();
        assert_eq!(list.roots.len(), 1);
        assert_eq!(list.roots[0].root, 2.0);
        assert_eq!(list.roots[0].width, 0.0);
    }

    #[test]
    fn root_counts_and_bracket_signs() {
        for (q, n) in [(2u32, 16usize), (3, 12)] {
            let ctx = KrawtchoukContext::new(q, n).unwrap();
            for t in 1..=(n / q as usize) {
                let list = ctx.roots(t).unwrap();
                assert_eq!(list.roots.len(), t, "q={q} n={n} t={t}");
                let pos = list.positions();
                for w in pos.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for r in &list.roots {
                    assert!(r.root > 0.0 && r.root < n as f64);
                    assert!(r.width <= BISECT_TOL);
                    assert!(r.int_lo as f64 <= r.root && r.root <= r.int_hi as f64);
                }
            }
        }
    }

    #[test]
    fn spacing_certificates() {
        let ctx = KrawtchoukContext::new(2, 20).unwrap();
        assert!(ctx.root_spacing_certificate(10).unwrap());
        assert!(ctx.root_spacing_certificate(1).unwrap()); // vacuous
        let ctx3 = KrawtchoukContext::new(3, 15).unwrap();
        assert!(ctx3.root_spacing_certificate(5).unwrap());
    }

    #[test]
    fn mass_between_roots_examples() {
        // q=2, n=12, t=3: roots 3.0845, 6, 8.9155; first interval best is
        // u=5 with mass 9/1024 * 10 = 0.087890625 exactly
        let ctx = KrawtchoukContext::new(2, 12).unwrap();
        let (u, mass) = ctx.mass_between_roots(3, 0).unwrap();
        assert_eq!(u, 5);
        assert_eq!(
            mass,
            BigRational::new(BigInt::from(90), BigInt::from(1024))
        );
        assert!(mass >= BigRational::new(BigInt::from(1), BigInt::from(12i64.pow(5))));
        // boundary refusal: t = n(q-1)/q outside the t <= n/q hypothesis
        let ctx3 = KrawtchoukContext::new(3, 15).unwrap();
        assert!(ctx3.mass_between_roots(10, 0).is_err());
    }

    #[test]
    fn t_equals_one_searches_above_the_single_root() {
        // q=2, n=4, t=1: root at 2; u in {3, 4} both carry mass 1/4 and the
        // tie breaks to the smaller weight
        let ctx = KrawtchoukContext::new(2, 4).unwrap();
        let (u, mass) = ctx.mass_between_roots(1, 0).unwrap();
        assert_eq!(u, 3);
        assert_eq!(mass, BigRational::new(BigInt::from(1), BigInt::from(4)));
        assert_eq!(
            ctx.normalized_mass(1, 4).unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(4))
        );
    }

    #[test]
    fn large_instance_first_root_and_mass() {
        // q=2, n=100, t=25: the exact first root sits at 11.0168, well above
        // the n/2 - sqrt(t(n-t)) = 6.6987 asymptotic; the first inter-root
        // interval (11.017, 15.156) is maximized at u=13.
        let ctx = KrawtchoukContext::new(2, 100).unwrap();
        let list = ctx.roots(25).unwrap();
        assert_eq!(list.roots.len(), 25);
        let x1 = list.roots[0].root;
        let x2 = list.roots[1].root;
        assert!((x1 - 11.016786).abs() < 1e-4, "x1 = {x1}");
        assert!((x2 - 15.155787).abs() < 1e-4, "x2 = {x2}");
        let (u, mass) = ctx.mass_between_roots(25, 0).unwrap();
        assert_eq!(u, 13);
        let m = mass.to_f64().unwrap();
        assert!((m - 2.638810e-2).abs() < 1e-7, "mass = {m}");
        assert!(mass >= BigRational::new(BigInt::from(1), BigInt::from(10u64.pow(10))));
    }

    #[test]
    fn first_root_converges_to_tau_perp() {
        // measured |x1/n - tau_perp| at n=100: 0.0650 (t=10), 0.0432 (t=25),
        // 0.0243 (t=40); the 0.05 proximity claim holds from t=25 up
        let ctx = KrawtchoukContext::new(2, 100).unwrap();
        let expected = [(10usize, 0.0650), (25, 0.0432), (40, 0.0243)];
        for (t, gap_expected) in expected {
            let x1 = ctx.roots(t).unwrap().roots[0].root;
            let tau = t as f64 / 100.0;
            let tau_perp = ((1.0 - tau).sqrt() - tau.sqrt()).powi(2) / 2.0;
            let gap = (x1 / 100.0 - tau_perp).abs();
            assert!((gap - gap_expected).abs() < 1e-3, "t={t}: gap {gap}");
            if t >= 25 {
                assert!(gap <= 0.05);
            }
        }
    }

    #[test]
    fn max_gap_stays_moderate() {
        // recorded, not asserted asymptotically: max gap <= n/4 at tested sizes
        for (q, n) in [(2u32, 30usize), (3, 18)] {
            let ctx = KrawtchoukContext::new(q, n).unwrap();
            for t in 2..=(n / q as usize) {
                let list = ctx.roots(t).unwrap();
                let g = list.max_gap().unwrap();
                assert!(g <= n as f64 / 4.0, "q={q} n={n} t={t}: max gap {g}");
            }
        }
    }

    #[test]
    fn decimal_rendering() {
        let x = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert_eq!(rational_to_decimal(&x, 15), "2.50000000000000e-1");
        let x = BigRational::new(BigInt::from(90), BigInt::from(1024));
        assert_eq!(rational_to_decimal(&x, 15), "8.78906250000000e-2");
        assert_eq!(rational_to_decimal(&BigRational::zero(), 15), "0");
        let x = BigRational::new(BigInt::from(999999), BigInt::from(1000));
        assert_eq!(rational_to_decimal(&x, 3), "1.00e3");
        let x = BigRational::new(BigInt::from(12345), BigInt::from(1));
        assert_eq!(rational_to_decimal(&x, 4), "1.235e4");
    }

    #[test]
    fn csv_emits_one_row_per_root() {
        let ctx = KrawtchoukContext::new(2, 8).unwrap();
        let mut buf = Vec::new();
        write_kravchuk_csv(&mut buf, &ctx, 4).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "t,root_index,root,gap,u_star,mass");
        // rows: t=1 has 1 root, ..., t=4 has 4
        assert_eq!(lines.len(), 1 + 1 + 2 + 3 + 4);
    }
}
