//! Representation counting for `4(pp')^g = u^2 + d v^2` and the derived
//! quantities: the pair count `S_g(d;Z)`, square-root counts `M(w;v)`
//! modulo `v^2`, the window triple count `N(Z,X;V0)`, the triple count
//! `R_g(d;Z)`, the pair-correlation sum `T_g` with its stratifications,
//! cube-pair detection, and odd square-free kernels.
//!
//! Every witness equation is checked in exact integer arithmetic; no
//! witness is admitted through floating point.

use crate::arith;
use crate::sieve;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use std::collections::BTreeMap;

/// Window parameters derived from `(X, Z, g)`:
/// `W = Z^2`, `U = 2^{g+1} Z^g`, `V = 2^{g+1} Z^g X^{-1/2}`.
#[derive(Debug, Clone, Copy)]
pub struct WindowParams {
    pub x: u64,
    pub z: u64,
    pub g: u64,
    /// `W = Z^2`
    pub w_lo: u64,
    /// `U = 2^{g+1} Z^g`
    pub u_bound: u128,
    /// The parameter set satisfies only the relaxed lower bound
    /// `Z >= X^{1/(2g)} / 4` rather than `Z >= X^{1/(2g)}`.
    pub relaxed: bool,
}

fn check_odd_prime(g: u64) -> Result<()> {
    if g < 3 || g.is_multiple_of(2) || !arith::is_prime_u64(g) {
        return Err(Error::NotOddPrime(g));
    }
    Ok(())
}

fn pow_u128(base: u128, exp: u64, what: &'static str) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(Error::Overflow(what))?;
    }
    Ok(acc)
}

impl WindowParams {
    pub fn new(x: u64, z: u64, g: u64) -> Result<Self> {
        check_odd_prime(g)?;
        if x < 1 || z < 1 {
            return Err(Error::InvalidParameter("X and Z must be >= 1".into()));
        }
        if z > x {
            return Err(Error::InvalidParameter(format!("Z = {z} exceeds X = {x}")));
        }
        // Z >= X^{1/(2g)} exactly: z^{2g} >= x; the relaxed variant allows
        // Z >= X^{1/(2g)} / 4, i.e. (4z)^{2g} >= x.
        let z2g = pow_u128(z as u128, 2 * g, "Z^(2g)").unwrap_or(u128::MAX);
        let relaxed = z2g < x as u128;
        if relaxed {
            let z42g = pow_u128(4 * z as u128, 2 * g, "(4Z)^(2g)").unwrap_or(u128::MAX);
            if z42g < x as u128 {
                return Err(Error::InvalidParameter(format!(
                    "Z = {z} is below the relaxed lower bound X^(1/2g)/4 for X = {x}, g = {g}"
                )));
            }
        }
        let zg = pow_u128(z as u128, g, "Z^g")?;
        let u_bound = zg
            .checked_mul(1u128 << (g + 1))
            .ok_or(Error::Overflow("U = 2^(g+1) Z^g"))?;
        Ok(WindowParams {
            x,
            z,
            g,
            w_lo: z * z,
            u_bound,
            relaxed,
        })
    }

    /// `V = 2^{g+1} Z^g X^{-1/2}` as a float, for display.
    pub fn v_bound(&self) -> f64 {
        self.u_bound as f64 / (self.x as f64).sqrt()
    }

    /// Largest integer `v <= V`, i.e. with `v^2 X <= 2^{2g+2} Z^{2g}`.
    pub fn v_floor(&self) -> u64 {
        let ub2 = BigUint::from(self.u_bound) * BigUint::from(self.u_bound);
        let fits = |v: u64| BigUint::from(v) * BigUint::from(v) * BigUint::from(self.x) <= ub2;
        let mut v = self.v_bound().max(0.0) as u64;
        while v > 0 && !fits(v) {
            v -= 1;
        }
        while fits(v + 1) {
            v += 1;
        }
        v
    }

    /// Does the dyadic parameter satisfy `1 <= V0 <= V/2`?
    pub fn v0_admissible(&self, v0: u64) -> bool {
        if v0 < 1 {
            return false;
        }
        let ub2 = BigUint::from(self.u_bound) * BigUint::from(self.u_bound);
        BigUint::from(4u32) * BigUint::from(v0) * BigUint::from(v0) * BigUint::from(self.x) <= ub2
    }

    fn four_w_g(&self, w: u64) -> Result<u128> {
        pow_u128(w as u128, self.g, "w^g")?
            .checked_mul(4)
            .ok_or(Error::Overflow("4 w^g"))
    }
}

/// A solution of `4 (p p')^g = u^2 + d v^2` with `p < p'` window primes,
/// `u, v >= 1` after sign normalization, and `gcd(v, p p') = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RepWitness {
    pub d: u64,
    pub p: u64,
    pub p_prime: u64,
    pub u: u128,
    pub v: u64,
}

impl RepWitness {
    /// Re-checks the defining equation in arbitrary precision.
    pub fn verify(&self, g: u64) -> bool {
        let pp = BigUint::from(self.p) * BigUint::from(self.p_prime);
        let lhs = BigUint::from(4u32) * pp.pow(g as u32);
        let rhs = BigUint::from(self.u) * BigUint::from(self.u)
            + BigUint::from(self.d) * BigUint::from(self.v) * BigUint::from(self.v);
        self.p != self.p_prime
            && self.u >= 1
            && self.v >= 1
            && arith::gcd_u64(self.v, self.p * self.p_prime) == 1
            && lhs == rhs
    }
}

pub const SG_CONVENTION: &str =
    "pairs counted ordered (p != p'); witnesses listed once with p < p', u,v >= 1";

/// `S_g(d; Z)` with its witness list. The headline count is over ordered
/// pairs `p != p'`; the unordered count is exactly half of it.
#[derive(Debug, Clone)]
pub struct SgCount {
    pub d: u64,
    pub z: u64,
    pub g: u64,
    /// Pairs `{p, p'}` (unordered) admitting at least one `(u, v)`.
    pub unordered_pairs: u64,
    /// Ordered count: `2 * unordered_pairs`.
    pub ordered_pairs: u64,
    /// Every solution tuple, sorted, with `p < p_prime`.
    pub witnesses: Vec<RepWitness>,
    /// Counting convention recorded in output metadata.
    pub convention: &'static str,
}

/// Exhaustive `S_g(d; Z)`: for every unordered pair of distinct split
/// window primes and every admissible `v`, test whether
/// `4(pp')^g - d v^2` is a positive perfect square.
pub fn s_g_direct(d: u64, z: u64, g: u64) -> Result<SgCount> {
    check_odd_prime(g)?;
    if !arith::is_squarefree_u64(d) {
        return Err(Error::NotSquareFree(d));
    }
    if z < 1 {
        return Err(Error::InvalidParameter("Z must be >= 1".into()));
    }
    let split = sieve::split_primes(d, z)?;
    let mut witnesses = Vec::new();
    let mut unordered_pairs = 0u64;
    for (i, &p) in split.iter().enumerate() {
        for &q in &split[i + 1..] {
            let w = p * q;
            let fourwg = pow_u128(w as u128, g, "4(pp')^g")?
                .checked_mul(4)
                .ok_or(Error::Overflow("4(pp')^g"))?;
            let mut found = false;
            let mut v = 1u64;
            while (d as u128) * (v as u128) * (v as u128) < fourwg {
                if arith::gcd_u64(v, w) == 1 {
                    let rem = fourwg - (d as u128) * (v as u128) * (v as u128);
                    if let Some(u) = arith::exact_sqrt_u128(rem) {
                        if u >= 1 {
                            let wit = RepWitness {
                                d,
                                p,
                                p_prime: q,
                                u,
                                v,
                            };
                            debug_assert!(wit.verify(g));
                            witnesses.push(wit);
                            found = true;
                        }
                    }
                }
                v += 1;
            }
            if found {
                unordered_pairs += 1;
            }
        }
    }
    witnesses.sort_unstable();
    Ok(SgCount {
        d,
        z,
        g,
        unordered_pairs,
        ordered_pairs: 2 * unordered_pairs,
        witnesses,
        convention: SG_CONVENTION,
    })
}

// square roots of odd `n` modulo 2^s, as residues mod 2^s
fn sqrt_mod_two_pow(n: u64, s: u32) -> Vec<u64> {
    match s {
        0 => vec![0],
        1 => vec![1],
        2 => {
            if n % 4 == 1 {
                vec![1, 3]
            } else {
                vec![]
            }
        }
        _ => {
            if n % 8 != 1 {
                return vec![];
            }
            let modulus = 1u64 << s;
            let nn = n % modulus;
            // lift a root upward from 2^3 one bit at a time
            let mut x = 1u64;
            for j in 3..s {
                let m_next = 1u64 << (j + 1);
                if (x * x) % m_next != nn % m_next {
                    x += 1 << (j - 1);
                }
            }
            let half = modulus >> 1;
            let mut roots = vec![
                x % modulus,
                (modulus - x) % modulus,
                (x + half) % modulus,
                (modulus - x + half) % modulus,
            ];
            roots.sort_unstable();
            roots.dedup();
            roots
        }
    }
}

// square roots of a unit `c` modulo the odd prime power q^e,
// each root mod q lifting uniquely by Hensel
fn sqrt_mod_odd_prime_pow(c: u64, q: u64, e: u32) -> Vec<u64> {
    let modulus = q.pow(e);
    let c = c % modulus;
    debug_assert!(!c.is_multiple_of(q));
    let Some(x0) = arith::sqrt_mod_prime(c % q, q) else {
        return vec![];
    };
    let mut x = x0;
    let mut m = q;
    for _ in 1..e {
        let m_next = m * q;
        let diff = (c as i128 - (x as i128) * (x as i128)).rem_euclid(m_next as i128) as u64;
        debug_assert_eq!(diff % m, 0);
        let t = arith::mul_mod(diff / m % q, arith::inv_mod(2 * x % q, q).unwrap(), q);
        x += t * m;
        m = m_next;
    }
    let mut roots = vec![x % modulus, (modulus - x) % modulus];
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// `M(w; v)`: the complete set of residues `u (mod v^2)` with
/// `u^2 = 4 w^g (mod v^2)`, for coprime `w, v`. Solved prime by prime
/// (Hensel lifting at odd primes, the 2-part by descent to `u = 2t`) and
/// recombined by CRT. The result has at most `2^{2 + omega(v)}` classes.
pub fn m_solve(w: u64, v: u64, g: u64) -> Result<Vec<u64>> {
    check_odd_prime(g)?;
    if v < 1 || w < 1 {
        return Err(Error::InvalidParameter("w and v must be >= 1".into()));
    }
    if arith::gcd_u64(w, v) != 1 {
        return Err(Error::NotCoprime {
            a: w,
            b: v,
            context: "m_solve requires gcd(w, v) = 1",
        });
    }
    if v == 1 {
        return Ok(vec![0]);
    }
    if v > (1u64 << 31) {
        return Err(Error::InvalidParameter(
            "v too large: v^2 must fit in u64".into(),
        ));
    }
    let mut residues: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    for (q, r) in arith::factorize(v) {
        let e = 2 * r;
        let mq = q.pow(e);
        let part: Vec<u64> = if q == 2 {
            // u must be even; with u = 2t the congruence becomes
            // t^2 = w^g (mod 2^{e-2}) and each t-class yields two u-classes
            let s = e - 2;
            let target = if s == 0 {
                1
            } else {
                arith::pow_mod(w, g, 1u64 << s)
            };
            let mut us = Vec::new();
            for t in sqrt_mod_two_pow(target, s) {
                us.push((2 * t) % mq);
                us.push((2 * t + (mq >> 1)) % mq);
            }
            us.sort_unstable();
            us.dedup();
            us
        } else {
            let c = arith::mul_mod(4 % mq, arith::pow_mod(w, g, mq), mq);
            sqrt_mod_odd_prime_pow(c, q, e)
        };
        if part.is_empty() {
            return Ok(vec![]);
        }
        let mut next = Vec::with_capacity(residues.len() * part.len());
        for &a in &residues {
            for &b in &part {
                let (rr, _) = arith::crt_pair(a, modulus, b, mq).ok_or(Error::Overflow("CRT"))?;
                next.push(rr);
            }
        }
        residues = next;
        modulus *= mq;
    }
    debug_assert_eq!(modulus, v * v);
    residues.sort_unstable();
    Ok(residues)
}

/// The interval `I_w` around `2 w^{g/2}` containing every `u` for which
/// `(4w^g - u^2)/v^2` lands in `[X, 2X)` for some `v` in `[V0, 2V0)`.
/// Half-width `C W^{g/2} V0^2 V^{-2}` with `C = 2^{2g+4}`, which equals
/// the exact rational `4 V0^2 X / Z^g`.
pub fn u_interval(w: u64, v0: u64, params: &WindowParams) -> Result<(u128, u128)> {
    if !params.v0_admissible(v0) {
        return Err(Error::InvalidParameter(format!(
            "V0 = {v0} outside (0, V/2] for these window parameters"
        )));
    }
    let w_lo = params.w_lo;
    if w < w_lo || w >= 4 * w_lo {
        return Err(Error::InvalidParameter(format!(
            "w = {w} outside [W, 4W) = [{w_lo}, {})",
            4 * w_lo
        )));
    }
    let fourwg = params.four_w_g(w)?;
    let center = arith::isqrt_u128(fourwg);
    let zg = pow_u128(params.z as u128, params.g, "Z^g")?;
    let num = 4u128 * (v0 as u128) * (v0 as u128) * params.x as u128;
    let width = num.div_ceil(zg);
    let lo = center.saturating_sub(width).max(1);
    let hi = center + 1 + width;
    Ok((lo, hi))
}

/// Counting strategy for `N(Z, X; V0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Triple loop over `(w, v, u)` with a divisibility test per `u`.
    Direct,
    /// Residue classes from `m_solve` intersected with `u_interval`.
    Congruence,
}

/// Result of one `N(Z, X; V0)` evaluation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NCount {
    pub x: u64,
    pub z: u64,
    pub g: u64,
    pub v0: u64,
    pub count: u64,
    pub strategy: Strategy,
    pub work_spent: u64,
    pub budget_exhausted: bool,
}

struct Budget {
    spent: u64,
    cap: u64,
}

impl Budget {
    fn new(cap: Option<u64>) -> Self {
        Budget {
            spent: 0,
            cap: cap.unwrap_or(u64::MAX),
        }
    }

    fn charge(&mut self, units: u64) -> Result<()> {
        self.spent += units;
        if self.spent > self.cap {
            Err(Error::WorkBudgetExceeded {
                spent: self.spent,
                budget: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

/// `N(Z, X; V0)`: triples `(w, u, v)` with `W <= w < 4W`, `1 <= u <= U`,
/// `V0 <= v < 2 V0`, `gcd(v, w) = 1`, `v^2 | 4w^g - u^2`, and quotient in
/// `[X, 2X)`. The two strategies are interchangeable and must agree
/// exactly.
pub fn n_count(
    params: &WindowParams,
    v0: u64,
    strategy: Strategy,
    budget: Option<u64>,
) -> Result<NCount> {
    if !params.v0_admissible(v0) {
        return Err(Error::InvalidParameter(format!(
            "V0 = {v0} outside (0, V/2]"
        )));
    }
    let mut budget = Budget::new(budget);
    let x = params.x as u128;
    let mut count = 0u64;
    for w in params.w_lo..4 * params.w_lo {
        let fourwg = params.four_w_g(w)?;
        let interval = match strategy {
            Strategy::Congruence => Some(u_interval(w, v0, params)?),
            Strategy::Direct => None,
        };
        for v in v0..2 * v0 {
            budget.charge(1)?;
            if arith::gcd_u64(v, w) != 1 {
                continue;
            }
            let v2 = (v as u128) * (v as u128);
            // quotient in [X, 2X) means u^2 in (4w^g - 2X v^2, 4w^g - X v^2]
            let hi_sq = match fourwg.checked_sub(x * v2) {
                Some(s) if s >= 1 => s,
                _ => continue,
            };
            let lo_sq = fourwg.saturating_sub(2 * x * v2);
            let u_hi = arith::isqrt_u128(hi_sq).min(params.u_bound);
            let u_lo = arith::isqrt_u128(lo_sq) + 1;
            if u_lo > u_hi {
                continue;
            }
            match strategy {
                Strategy::Direct => {
                    for u in u_lo..=u_hi {
                        budget.charge(1)?;
                        let rem = fourwg - u * u;
                        if rem % v2 == 0 {
                            debug_assert!((x..2 * x).contains(&(rem / v2)));
                            count += 1;
                        }
                    }
                }
                Strategy::Congruence => {
                    let (ilo, ihi) = interval.unwrap();
                    let lo = u_lo.max(ilo);
                    let hi = u_hi.min(ihi);
                    if lo > hi {
                        continue;
                    }
                    for r in m_solve(w, v, params.g)? {
                        let r = r as u128;
                        let mut u = lo + (r + v2 - lo % v2) % v2;
                        while u <= hi {
                            budget.charge(1)?;
                            let rem = fourwg - u * u;
                            debug_assert_eq!(rem % v2, 0);
                            if (x..2 * x).contains(&(rem / v2)) {
                                count += 1;
                            }
                            u += v2;
                        }
                    }
                }
            }
        }
    }
    Ok(NCount {
        x: params.x,
        z: params.z,
        g: params.g,
        v0,
        count,
        strategy,
        work_spent: budget.spent,
        budget_exhausted: false,
    })
}

/// A triple `(w, u, v)` counted by `R_g(d; Z)`: `w = p1 p2` with
/// distinct window primes, `u <= U`, `v <= V`, `gcd(w, v) = 1`, and
/// `4 w^g = u^2 + d v^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TripleWitness {
    pub d: u64,
    pub w: u64,
    pub p1: u64,
    pub p2: u64,
    pub u: u128,
    pub v: u64,
}

impl TripleWitness {
    pub fn verify(&self, g: u64) -> bool {
        let lhs = BigUint::from(4u32) * BigUint::from(self.w).pow(g as u32);
        let rhs = BigUint::from(self.u) * BigUint::from(self.u)
            + BigUint::from(self.d) * BigUint::from(self.v) * BigUint::from(self.v);
        self.p1 < self.p2
            && self.p1 * self.p2 == self.w
            && arith::gcd_u64(self.v, self.w) == 1
            && lhs == rhs
    }
}

/// `R_g(d; Z)` under the given window parameters; zero for
/// non-square-free `d` by definition.
pub fn r_g(d: u64, params: &WindowParams) -> Result<(u64, Vec<TripleWitness>)> {
    if d == 0 || !arith::is_squarefree_u64(d) {
        return Ok((0, Vec::new()));
    }
    let window = sieve::prime_window(params.z)?;
    let v_cap = params.v_floor();
    let mut witnesses = Vec::new();
    for (i, &p1) in window.primes.iter().enumerate() {
        for &p2 in &window.primes[i + 1..] {
            let w = p1 * p2;
            let fourwg = params.four_w_g(w)?;
            let mut v = 1u64;
            while v <= v_cap && (d as u128) * (v as u128) * (v as u128) < fourwg {
                if arith::gcd_u64(v, w) == 1 {
                    let rem = fourwg - (d as u128) * (v as u128) * (v as u128);
                    if let Some(u) = arith::exact_sqrt_u128(rem) {
                        if u >= 1 && u <= params.u_bound {
                            let wit = TripleWitness { d, w, p1, p2, u, v };
                            debug_assert!(wit.verify(params.g));
                            witnesses.push(wit);
                        }
                    }
                }
                v += 1;
            }
        }
    }
    witnesses.sort_unstable();
    Ok((witnesses.len() as u64, witnesses))
}

/// `T_g` over `[X, 2X)` with full pair bookkeeping.
#[derive(Debug, Clone)]
pub struct TgReport {
    pub x: u64,
    pub z: u64,
    pub g: u64,
    /// `sum R_g(d)` over square-free `d` in `[X, 2X)`.
    pub sum_r: u128,
    /// `sum R_g(d) (R_g(d) - 1)`.
    pub sum_rr1: u128,
    /// Ordered pairs of distinct triples passing the side conditions;
    /// always equals `sum_rr1`.
    pub pair_count: u128,
    /// Pairs with `gcd(w1, w2) != 1`.
    pub t0: u128,
    /// For `g = 3`: coprime-`w` pairs stratified by `delta = gcd(v1, v2)`.
    pub t_delta: BTreeMap<u64, u128>,
    /// `(d, R_g(d))` for every `d` with `R_g(d) >= 1`.
    pub per_d: Vec<(u64, u64)>,
    /// All triples found, sorted.
    pub witnesses: Vec<TripleWitness>,
    pub work_spent: u64,
}

/// Computes `T_g = sum R_g(d)(R_g(d)-1)` two ways: from the per-`d`
/// counts and by enumerating ordered pairs of distinct triples under the
/// side conditions (distinctness, the gcd conditions, the divisibility
/// conditions, and the nonzero cross relation). The key factorization
/// `4(v2^2 w1^g - v1^2 w2^g) = (v2 u1 - v1 u2)(v2 u1 + v1 u2)` and the
/// nonvanishing of `v1^2 w2^g - v2^2 w1^g` are asserted pair by pair.
pub fn t_g(x: u64, z: u64, g: u64, budget: u64) -> Result<TgReport> {
    let params = WindowParams::new(x, z, g)?;
    let window = sieve::prime_window(z)?;
    let n_pairs = window.primes.len() * window.primes.len().saturating_sub(1) / 2;
    let per_d_cost = (n_pairs as u64) * params.v_floor().max(1) + 1;
    let flags = sieve::squarefree_flags(x, 2 * x)?;
    let mut budget = Budget::new(Some(budget));

    let mut sum_r: u128 = 0;
    let mut sum_rr1: u128 = 0;
    let mut per_d = Vec::new();
    let mut all: Vec<Vec<TripleWitness>> = Vec::new();
    for (i, &sf) in flags.iter().enumerate() {
        if !sf {
            continue;
        }
        budget.charge(per_d_cost)?;
        let d = x + i as u64;
        let (count, wits) = r_g(d, &params)?;
        if count > 0 {
            sum_r += count as u128;
            sum_rr1 += (count as u128) * (count as u128 - 1);
            per_d.push((d, count));
            all.push(wits);
        }
    }

    let mut pair_count: u128 = 0;
    let mut t0: u128 = 0;
    let mut t_delta: BTreeMap<u64, u128> = BTreeMap::new();
    for wits in &all {
        for (i, t1) in wits.iter().enumerate() {
            for (j, t2) in wits.iter().enumerate() {
                if i == j {
                    continue;
                }
                budget.charge(1)?;
                // side conditions that every counted pair must satisfy
                assert!(
                    (t1.u, t1.v, t1.w) != (t2.u, t2.v, t2.w),
                    "distinctness violated"
                );
                assert_eq!(arith::gcd_u64(t1.w, t1.v), 1);
                assert_eq!(arith::gcd_u64(t2.w, t2.v), 1);
                let w1g = BigInt::from(t1.w).pow(g as u32);
                let w2g = BigInt::from(t2.w).pow(g as u32);
                let (u1, u2) = (BigInt::from(t1.u), BigInt::from(t2.u));
                let (v1, v2) = (BigInt::from(t1.v), BigInt::from(t2.v));
                let r1 = 4 * &w1g - &u1 * &u1;
                let r2 = 4 * &w2g - &u2 * &u2;
                assert!(
                    (&r1 % (&v1 * &v1)) == BigInt::ZERO,
                    "v1^2 divisibility violated"
                );
                assert!(
                    (&r2 % (&v2 * &v2)) == BigInt::ZERO,
                    "v2^2 divisibility violated"
                );
                let cross1 = &v1 * &v1 * &r2;
                let cross2 = &v2 * &v2 * &r1;
                assert!(
                    cross1 == cross2 && cross1 != BigInt::ZERO,
                    "cross relation violated"
                );
                let vvww = &v1 * &v1 * &w2g - &v2 * &v2 * &w1g;
                assert!(
                    vvww != BigInt::ZERO,
                    "v1^2 w2^g = v2^2 w1^g for a distinct pair"
                );
                // key factorization, exactly
                let key_lhs = 4 * (&v2 * &v2 * &w1g - &v1 * &v1 * &w2g);
                let s = &v2 * &u1;
                let t = &v1 * &u2;
                assert_eq!(key_lhs, (&s - &t) * (&s + &t), "key factorization violated");

                pair_count += 1;
                if arith::gcd_u64(t1.w, t2.w) != 1 {
                    t0 += 1;
                } else if g == 3 {
                    let delta = arith::gcd_u64(t1.v, t2.v);
                    *t_delta.entry(delta).or_insert(0) += 1;
                }
            }
        }
    }
    assert_eq!(
        pair_count, sum_rr1,
        "pairwise enumeration disagrees with sum R(R-1)"
    );
    if g == 3 {
        let strat: u128 = t0 + t_delta.values().sum::<u128>();
        assert_eq!(
            strat, pair_count,
            "delta stratification does not partition the pairs"
        );
    }

    let mut witnesses: Vec<TripleWitness> = all.into_iter().flatten().collect();
    witnesses.sort_unstable();
    Ok(TgReport {
        x,
        z,
        g,
        sum_r,
        sum_rr1,
        pair_count,
        t0,
        t_delta,
        per_d,
        witnesses,
        work_spent: budget.spent,
    })
}

/// The congruence-sieve aggregation of `S_g` witnesses over a dyadic
/// range: for each window-prime product `w = p1 p2` and each `v`, the
/// residues from `m_solve` pin down the admissible `u`, and each `u`
/// maps back to `d = (4w^g - u^2)/v^2`. Returns per-`d` witness lists
/// for square-free `d` in `[X, 2X)`, which must match `s_g_direct`
/// witness by witness.
pub fn s_g_window_aggregate(x: u64, z: u64, g: u64) -> Result<BTreeMap<u64, Vec<RepWitness>>> {
    check_odd_prime(g)?;
    if x < 1 || z < 1 {
        return Err(Error::InvalidParameter("X and Z must be >= 1".into()));
    }
    let window = sieve::prime_window(z)?;
    let flags = sieve::squarefree_flags(x, 2 * x)?;
    let mut out: BTreeMap<u64, Vec<RepWitness>> = BTreeMap::new();
    let x128 = x as u128;
    for (i, &p1) in window.primes.iter().enumerate() {
        if p1 == 2 {
            // split primes never divide 2d, so p = 2 cannot participate
            continue;
        }
        for &p2 in &window.primes[i + 1..] {
            let w = p1 * p2;
            let fourwg = pow_u128(w as u128, g, "4w^g")?
                .checked_mul(4)
                .ok_or(Error::Overflow("4w^g"))?;
            let v_max = arith::isqrt_u128((fourwg - 1) / x128) as u64;
            for v in 1..=v_max {
                if arith::gcd_u64(v, w) != 1 {
                    continue;
                }
                let v2 = (v as u128) * (v as u128);
                let hi_sq = match fourwg.checked_sub(x128 * v2) {
                    Some(s) if s >= 1 => s,
                    _ => continue,
                };
                let lo_sq = fourwg.saturating_sub(2 * x128 * v2);
                let u_hi = arith::isqrt_u128(hi_sq);
                let u_lo = arith::isqrt_u128(lo_sq) + 1;
                if u_lo > u_hi {
                    continue;
                }
                for r in m_solve(w, v, g)? {
                    let r = r as u128;
                    let mut u = u_lo + (r + v2 - u_lo % v2) % v2;
                    while u <= u_hi {
                        let rem = fourwg - u * u;
                        debug_assert_eq!(rem % v2, 0);
                        let d128 = rem / v2;
                        debug_assert!((x128..2 * x128).contains(&d128));
                        let d = d128 as u64;
                        if flags[(d - x) as usize] {
                            let wit = RepWitness {
                                d,
                                p: p1,
                                p_prime: p2,
                                u,
                                v,
                            };
                            debug_assert!(wit.verify(g));
                            debug_assert_eq!(sieve::chi(d, p1).unwrap(), 1);
                            debug_assert_eq!(sieve::chi(d, p2).unwrap(), 1);
                            out.entry(d).or_default().push(wit);
                        }
                        u += v2;
                    }
                }
            }
        }
    }
    for wits in out.values_mut() {
        wits.sort_unstable();
    }
    Ok(out)
}

fn icbrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).cbrt() as u64;
    while r
        .checked_mul(r)
        .and_then(|s| s.checked_mul(r))
        .is_none_or(|c| c > n)
    {
        r -= 1;
    }
    while (r + 1)
        .checked_mul(r + 1)
        .and_then(|s| s.checked_mul(r + 1))
        .is_some_and(|c| c <= n)
    {
        r += 1;
    }
    r
}

fn is_cube(n: u64) -> bool {
    let r = icbrt(n);
    r * r * r == n
}

/// Are coprime `y1, y2` related by `y1^2 m2^3 = y2^2 m1^3` for nonzero
/// integers `m1, m2`? Under coprimality this holds exactly when both are
/// perfect cubes.
pub fn cube_pair_related(y1: u64, y2: u64) -> Result<bool> {
    if y1 < 1 || y2 < 1 {
        return Err(Error::InvalidParameter("y1 and y2 must be >= 1".into()));
    }
    if arith::gcd_u64(y1, y2) != 1 {
        return Err(Error::NotCoprime {
            a: y1,
            b: y2,
            context: "cube_pair_related",
        });
    }
    Ok(is_cube(y1) && is_cube(y2))
}

/// The odd square-free kernel: the product of the distinct odd primes
/// dividing `k`.
pub fn kernel(k: u64) -> u64 {
    kernel_general(k, &[2])
}

/// Square-free kernel away from a finite excluded prime set: the product
/// of the distinct primes of `k` outside `excluded`.
pub fn kernel_general(k: u64, excluded: &[u64]) -> u64 {
    arith::factorize(k)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| !excluded.contains(p))
        .product()
}

// products of (mandatory primes, each >= 1 time) and (optional primes,
// each >= 0 times) that stay <= k_max
fn count_products(k_max: u64, primes: &[(u64, bool)], idx: usize, acc: u64) -> u64 {
    if idx == primes.len() {
        return 1;
    }
    let (p, mandatory) = primes[idx];
    let mut total = 0u64;
    let mut val = acc;
    if mandatory {
        if val > k_max / p {
            return 0;
        }
        val *= p;
    }
    loop {
        total += count_products(k_max, primes, idx + 1, val);
        if val > k_max / p {
            break;
        }
        val *= p;
    }
    total
}

/// `#{k <= K : k(P) = kappa}` where `k(P)` is the square-free kernel of
/// `k` away from the excluded prime set `P`. Zero when `kappa` is not
/// square-free, shares a factor with `P`, or exceeds `K`.
pub fn kernel_count(k_max: u64, kappa: u64, excluded: &[u64]) -> u64 {
    if kappa == 0 || kappa > k_max || !arith::is_squarefree_u64(kappa) {
        return 0;
    }
    if excluded.iter().any(|&p| kappa.is_multiple_of(p)) {
        return 0;
    }
    let mut primes: Vec<(u64, bool)> = arith::factorize(kappa)
        .into_iter()
        .map(|(p, _)| (p, true))
        .collect();
    primes.extend(excluded.iter().map(|&p| (p, false)));
    count_products(k_max, &primes, 0, 1)
}

/// Max over `kappa` of the kernel count, by per-`kappa` enumeration of
/// the admissible `k`: every `k <= K` is generated exactly once, under
/// its own kernel. Ties resolve to the smallest `kappa`.
pub fn kernel_count_max_enumerative(k_max: u64, excluded: &[u64]) -> (u64, u64) {
    let spf = arith::spf_table(k_max as usize);
    let mut best = (1u64, 0u64);
    'kappa: for kappa in 1..=k_max {
        let mut primes: Vec<(u64, bool)> = Vec::new();
        let mut n = kappa;
        while n > 1 {
            let p = spf[n as usize] as u64;
            n /= p;
            if n % p == 0 || excluded.contains(&p) {
                continue 'kappa; // not square-free, or meets P
            }
            primes.push((p, true));
        }
        primes.extend(excluded.iter().map(|&p| (p, false)));
        let count = count_products(k_max, &primes, 0, 1);
        if count > best.1 {
            best = (kappa, count);
        }
    }
    best
}

/// Max over `kappa` of the kernel count, by a single sieve pass: kernels
/// for all `k <= K` built multiplicatively and tallied. Ties resolve to
/// the smallest `kappa`.
pub fn kernel_count_max_scan(k_max: u64, excluded: &[u64]) -> (u64, u64) {
    let n = k_max as usize;
    let mut kern = vec![1u64; n + 1];
    for p in arith::primes_up_to(k_max) {
        if excluded.contains(&p) {
            continue;
        }
        let mut m = p as usize;
        while m <= n {
            kern[m] *= p;
            m += p as usize;
        }
    }
    let mut tally = vec![0u64; n + 1];
    for k in 1..=n {
        tally[kern[k] as usize] += 1;
    }
    let mut best = (1u64, 0u64);
    for (kappa, &count) in tally.iter().enumerate().skip(1) {
        if count > best.1 {
            best = (kappa as u64, count);
        }
    }
    best
}
