//! Class groups of imaginary quadratic fields via reduced binary quadratic
//! forms.
//!
//! A positive-definite form `(a, b, c)` stands for `ax^2 + bxy + cy^2` with
//! discriminant `delta = b^2 - 4ac < 0`. Each ideal class of the maximal
//! order of discriminant `delta` contains exactly one reduced form, so the
//! class group is enumerated exhaustively and its law realised by Gauss
//! composition. On top of that sit the class number `h`, the elementary
//! divisors of the group, and the g-part data (Sylow order and g-torsion
//! count) for odd primes `g`.

use crate::arith;
use crate::{Error, Result};
use std::collections::HashSet;

/// A square-free `d >= 1` together with the fundamental discriminant of
/// the imaginary quadratic field of radicand `-d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discriminant {
    d: u64,
    delta: i64,
}

impl Discriminant {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }
}

/// Maps square-free `d >= 1` to the fundamental discriminant:
/// `-d` when `d = 3 (mod 4)`, and `-4d` otherwise.
pub fn fundamental_discriminant(d: u64) -> Result<Discriminant> {
    if d < 1 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    if !arith::is_squarefree_u64(d) {
        return Err(Error::NotSquareFree(d));
    }
    let delta = if d % 4 == 3 {
        -(d as i64)
    } else {
        -(4 * d as i64)
    };
    debug_assert!(delta.rem_euclid(4) == 0 || delta.rem_euclid(4) == 1);
    Ok(Discriminant { d, delta })
}

/// Is `delta` a negative fundamental discriminant?
pub fn is_fundamental(delta: i64) -> bool {
    if delta >= 0 {
        return false;
    }
    match delta.rem_euclid(4) {
        1 => arith::is_squarefree_u64(delta.unsigned_abs()),
        0 => {
            let m = delta / 4;
            matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree_u64(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A reduced positive-definite binary quadratic form.
///
/// Reduced means `|b| <= a <= c` with `b >= 0` whenever `|b| = a` or
/// `a = c`; each class contains exactly one such form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormClass {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl FormClass {
    pub fn discriminant(&self) -> i64 {
        (self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128) as i64
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a >= 1 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The inverse class `(a, -b, c)`, re-normalised at the boundary.
    pub fn inverse(&self) -> FormClass {
        if self.b.abs() == self.a || self.a == self.c {
            *self
        } else {
            FormClass {
                a: self.a,
                b: -self.b,
                c: self.c,
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1
    }
}

/// The principal form of discriminant `delta`.
pub fn identity_form(delta: i64) -> FormClass {
    let b0 = delta.rem_euclid(2);
    FormClass {
        a: 1,
        b: b0,
        c: ((b0 * b0 - delta) / 4),
    }
}

fn reduce_raw(mut a: i128, mut b: i128, mut c: i128) -> FormClass {
    loop {
        if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        }
        if b.abs() > a || b == -a {
            let delta = b * b - 4 * a * c;
            let two_a = 2 * a;
            // normalise b into (-a, a]
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            c = (b * b - delta) / (4 * a);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
            continue;
        }
        break;
    }
    FormClass {
        a: a as i64,
        b: b as i64,
        c: c as i64,
    }
}

/// Reduces a raw triple `(a, b, c)` of discriminant `delta` to the unique
/// reduced representative of its class. Idempotent on reduced forms.
pub fn reduce(a: i64, b: i64, c: i64, delta: i64) -> Result<FormClass> {
    if a <= 0 {
        return Err(Error::NotPositiveDefinite);
    }
    let found = (b as i128 * b as i128 - 4 * a as i128 * c as i128) as i64;
    if found != delta {
        return Err(Error::DiscriminantMismatch {
            expected: delta,
            found,
        });
    }
    Ok(reduce_raw(a as i128, b as i128, c as i128))
}

// extended gcd over i128: g = u*a + v*b with g = gcd(a, b) >= 0
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

// g = u*a + v*b + w*c
fn ext_gcd3(a: i128, b: i128, c: i128) -> (i128, i128, i128, i128) {
    let (g1, u1, v1) = ext_gcd(a, b);
    let (g, x, w) = ext_gcd(g1, c);
    (g, x * u1, x * v1, w)
}

pub(crate) fn compose_unchecked(f1: FormClass, f2: FormClass, delta: i64) -> FormClass {
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let (g, _, v, w) = ext_gcd3(a1, a2, s);
    let a3 = (a1 / g) * (a2 / g);
    let inner = v * ((b1 - b2) / 2) - w * c2;
    let b_raw = b2 + 2 * (a2 / g) * inner;
    let two_a = 2 * a3;
    let mut b3 = b_raw.rem_euclid(two_a);
    if b3 > a3 {
        b3 -= two_a;
    }
    let c3 = (b3 * b3 - delta as i128) / (4 * a3);
    reduce_raw(a3, b3, c3)
}

/// Gauss composition of two classes of the same discriminant, returned
/// reduced. The identity form and `inverse()` behave as group identity
/// and inverse under this law.
pub fn compose(f1: FormClass, f2: FormClass, delta: i64) -> Result<FormClass> {
    for f in [&f1, &f2] {
        let found = f.discriminant();
        if found != delta {
            return Err(Error::DiscriminantMismatch {
                expected: delta,
                found,
            });
        }
    }
    Ok(compose_unchecked(f1, f2, delta))
}

/// `f` composed with itself `e` times (`e = 0` gives the identity).
pub fn power(f: FormClass, e: u64, delta: i64) -> FormClass {
    let mut acc = identity_form(delta);
    let mut base = f;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = compose_unchecked(acc, base, delta);
        }
        base = compose_unchecked(base, base, delta);
        e >>= 1;
    }
    acc
}

// f^g == id tested through f^{(g-1)/2 + 1} == (f^{(g-1)/2})^{-1},
// halving the composition count for odd g
fn is_g_torsion(f: FormClass, g: u64, delta: i64) -> bool {
    let half = power(f, (g - 1) / 2, delta);
    compose_unchecked(half, f, delta) == half.inverse()
}

/// The g-part of a class group: order of the Sylow g-subgroup and the
/// number of classes killed by g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GPart {
    pub g: u64,
    /// `g^{v_g(h)}`, the order of the Sylow g-subgroup.
    pub sylow_order: u64,
    /// Number of classes `f` with `f^g` principal; equals `g^r` where `r`
    /// is the number of elementary divisors divisible by `g`.
    pub torsion_count: u64,
}

/// A fully enumerated class group of a negative fundamental discriminant.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub disc: i64,
    /// All reduced forms, sorted by `(a, b, c)`.
    pub forms: Vec<FormClass>,
    pub h: u64,
    /// Elementary divisors `d_1 | d_2 | ... | d_r` with product `h`;
    /// `[1]` for the trivial group.
    pub divisors: Vec<u64>,
}

fn enumerate_forms(delta: i64) -> Vec<FormClass> {
    let abs = delta.unsigned_abs() as i64;
    let a_max = arith::isqrt_u64(abs as u64 / 3) as i64;
    let mut forms = Vec::new();
    for a in 1..=a_max.max(1) {
        for b in (1 - a)..=a {
            let num = b * b + abs;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            forms.push(FormClass { a, b, c });
        }
    }
    forms.sort_unstable();
    forms
}

/// Order of `f` in a group of order `h`.
fn order_of(f: FormClass, h: u64, h_factors: &[(u64, u32)], delta: i64) -> u64 {
    let id = identity_form(delta);
    let mut ord = h;
    for &(q, _) in h_factors {
        while ord.is_multiple_of(q) && power(f, ord / q, delta) == id {
            ord /= q;
        }
    }
    ord
}

fn log_exact(mut n: u64, q: u64) -> u32 {
    let mut t = 0;
    while n > 1 {
        debug_assert_eq!(n % q, 0, "element count is not a power of {q}");
        n /= q;
        t += 1;
    }
    t
}

// elementary divisors from the multiset of element orders
fn divisors_from_orders(orders: &[u64], h: u64, h_factors: &[(u64, u32)]) -> Vec<u64> {
    if h == 1 {
        return vec![1];
    }
    // per prime q: cyclic factor sizes q^a of the q-type, descending
    let mut types: Vec<Vec<u64>> = Vec::new();
    for &(q, e) in h_factors {
        // cnt[j] = #{f : ord(f) divides q^j}
        let mut cnt = vec![0u64; e as usize + 1];
        for &ord in orders {
            // ord | q^j iff ord is a pure q-power with exponent <= j
            let mut o = ord;
            let mut j = 0u32;
            while o % q == 0 {
                o /= q;
                j += 1;
            }
            if o == 1 {
                for jj in j..=e {
                    cnt[jj as usize] += 1;
                }
            }
        }
        // m_j = #divisors with q-valuation >= j (conjugate partition)
        let mut m = Vec::new();
        for j in 1..=e as usize {
            m.push(log_exact(cnt[j], q) - log_exact(cnt[j - 1], q));
        }
        let rank = m[0];
        let mut exps = Vec::new();
        for i in 1..=rank {
            exps.push(m.iter().filter(|&&mj| mj >= i).count() as u32);
        }
        types.push(exps.into_iter().map(|a| q.pow(a)).collect());
    }
    let rank = types.iter().map(|t| t.len()).max().unwrap_or(0);
    let mut divisors = Vec::new();
    for slot in 0..rank {
        let mut dval = 1u64;
        for t in &types {
            if slot < t.len() {
                dval *= t[slot];
            }
        }
        divisors.push(dval);
    }
    divisors.reverse();
    divisors
}

/// Enumerates the full class group of a negative fundamental discriminant:
/// all reduced forms, the class number, and the elementary divisors of the
/// group under composition.
pub fn enumerate_class_group(delta: i64) -> Result<ClassGroup> {
    if !is_fundamental(delta) {
        return Err(Error::NotFundamental(delta));
    }
    let forms = enumerate_forms(delta);
    let h = forms.len() as u64;
    let h_factors = arith::factorize(h);
    let orders: Vec<u64> = forms
        .iter()
        .map(|&f| order_of(f, h, &h_factors, delta))
        .collect();
    let divisors = divisors_from_orders(&orders, h, &h_factors);
    debug_assert_eq!(divisors.iter().product::<u64>(), h);
    Ok(ClassGroup {
        disc: delta,
        forms,
        h,
        divisors,
    })
}

impl ClassGroup {
    /// Order of a class by Lagrange descent.
    pub fn order_of(&self, f: FormClass) -> u64 {
        order_of(f, self.h, &arith::factorize(self.h), self.disc)
    }

    /// Sylow order and g-torsion count for an odd prime `g`.
    pub fn g_part(&self, g: u64) -> Result<GPart> {
        if g < 3 || g.is_multiple_of(2) || !arith::is_prime_u64(g) {
            return Err(Error::NotOddPrime(g));
        }
        let mut sylow_order = 1u64;
        let mut h = self.h;
        while h.is_multiple_of(g) {
            sylow_order *= g;
            h /= g;
        }
        let torsion_count = if sylow_order == 1 {
            1
        } else {
            self.forms
                .iter()
                .filter(|&&f| is_g_torsion(f, g, self.disc))
                .count() as u64
        };
        Ok(GPart {
            g,
            sylow_order,
            torsion_count,
        })
    }

    /// Class number recomputed by composition closure: starting from the
    /// identity, saturate the subgroup generated by each form in turn.
    /// Independent of the plain count of `forms`, so the two must agree.
    pub fn class_number_by_saturation(&self) -> u64 {
        let delta = self.disc;
        let id = identity_form(delta);
        let mut sub: HashSet<FormClass> = HashSet::with_capacity(self.forms.len());
        sub.insert(id);
        for &f in &self.forms {
            if sub.contains(&f) {
                continue;
            }
            let snapshot: Vec<FormClass> = sub.iter().copied().collect();
            let mut pw = f;
            while !sub.contains(&pw) {
                for &s in &snapshot {
                    sub.insert(compose_unchecked(s, pw, delta));
                }
                pw = compose_unchecked(pw, f, delta);
            }
        }
        sub.len() as u64
    }
}

/// The form class of the prime ideal above a split prime `p` (odd,
/// `chi(p) = 1`): the reduced representative of `(p, b, (b^2-delta)/4p)`
/// with `b^2 = delta (mod 4p)`. Returns `None` when `p` is not split.
pub fn prime_form(delta: i64, p: u64) -> Option<FormClass> {
    if p < 3 || delta.rem_euclid(p as i64) == 0 {
        return None;
    }
    let a = delta.rem_euclid(p as i64) as u64;
    let x = arith::sqrt_mod_prime(a, p)?;
    // pick the root with the parity of delta; x and p-x differ in parity
    let want_odd = delta.rem_euclid(2) == 1;
    let b = if (x % 2 == 1) == want_odd { x } else { p - x };
    let b = b as i64;
    let c = (b * b - delta) / (4 * p as i64);
    debug_assert_eq!((b * b - delta) % (4 * p as i64), 0);
    Some(reduce_raw(p as i128, b as i128, c as i128))
}

/// Per-discriminant output of the bulk engine: class number plus
/// `(torsion, sylow)` per requested `g`.
#[derive(Debug, Clone)]
pub struct BulkRow {
    pub h: u64,
    pub gparts: Vec<(u64, u64)>,
}

/// Class numbers and g-part columns for many discriminants at once.
///
/// `entries` holds `|delta|` values (negative fundamental discriminants);
/// the result is parallel to the input. Forms for a whole window of
/// discriminants are generated in one pass of the `(a, b, c)` triple loop
/// per segment, which is what makes sweeps to 10^6 feasible.
pub fn bulk_class_data(entries: &[u64], g_list: &[u64], jobs: usize) -> Vec<BulkRow> {
    use rayon::prelude::*;

    const SEG: u64 = 1 << 15;
    let n = entries.len();
    let mut idx: Vec<u32> = (0..n as u32).collect();
    idx.sort_unstable_by_key(|&i| entries[i as usize]);

    // chunk index list by segment of |delta| space
    let mut chunks: Vec<(u64, std::ops::Range<usize>)> = Vec::new();
    let mut start = 0usize;
    while start < n {
        let seg_lo = (entries[idx[start] as usize] / SEG) * SEG;
        let mut end = start;
        while end < n && entries[idx[end] as usize] < seg_lo + SEG {
            end += 1;
        }
        chunks.push((seg_lo, start..end));
        start = end;
    }

    let run = || -> Vec<Vec<(u32, BulkRow)>> {
        chunks
            .par_iter()
            .map(|(seg_lo, range)| {
                let members = &idx[range.clone()];
                bulk_segment(*seg_lo, SEG, members, entries, g_list)
            })
            .collect()
    };
    let partials = if jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .unwrap();
        pool.install(run)
    } else {
        run()
    };

    let mut out: Vec<BulkRow> = vec![
        BulkRow {
            h: 0,
            gparts: Vec::new()
        };
        n
    ];
    for part in partials {
        for (i, row) in part {
            out[i as usize] = row;
        }
    }
    out
}

fn bulk_segment(
    seg_lo: u64,
    seg_width: u64,
    members: &[u32],
    entries: &[u64],
    g_list: &[u64],
) -> Vec<(u32, BulkRow)> {
    let lo = seg_lo.max(3);
    let hi = seg_lo + seg_width;
    let mut slot = vec![u32::MAX; seg_width as usize];
    for (k, &i) in members.iter().enumerate() {
        slot[(entries[i as usize] - seg_lo) as usize] = k as u32;
    }

    // one (slot, a, b) record per reduced form in the segment
    let mut flat: Vec<(u32, u32, i32)> = Vec::new();
    let a_max = arith::isqrt_u64((hi - 1) / 3) as i64;
    let (lo_i, hi_i) = (lo as i64, hi as i64);
    for a in 1..=a_max.max(1) {
        let four_a = 4 * a;
        for b in (1 - a)..=a {
            let bb = b * b;
            let c_min = ((lo_i + bb + four_a - 1) / four_a).max(a);
            let c_max = (hi_i - 1 + bb) / four_a;
            for c in c_min..=c_max {
                let dabs = (four_a * c - bb) as u64;
                let s = slot[(dabs - seg_lo) as usize];
                if s == u32::MAX || (a == c && b < 0) {
                    continue;
                }
                flat.push((s, a as u32, b as i32));
            }
        }
    }

    // group the flat list by slot with a counting sort
    let m = members.len();
    let mut counts = vec![0u32; m + 1];
    for &(s, _, _) in &flat {
        counts[s as usize + 1] += 1;
    }
    for k in 1..=m {
        counts[k] += counts[k - 1];
    }
    let mut ordered: Vec<(u32, i32)> = vec![(0, 0); flat.len()];
    let mut cursor = counts.clone();
    for &(s, a, b) in &flat {
        ordered[cursor[s as usize] as usize] = (a, b);
        cursor[s as usize] += 1;
    }

    members
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let dabs = entries[i as usize];
            let delta = -(dabs as i64);
            let forms = &ordered[counts[k] as usize..counts[k + 1] as usize];
            let h = forms.len() as u64;
            let gparts = g_list
                .iter()
                .map(|&g| {
                    let mut sylow = 1u64;
                    let mut hh = h;
                    while hh.is_multiple_of(g) {
                        sylow *= g;
                        hh /= g;
                    }
                    if sylow == 1 {
                        return (1, 1);
                    }
                    let torsion = forms
                        .iter()
                        .filter(|&&(a, b)| {
                            let (a, b) = (a as i64, b as i64);
                            let c = (b * b + dabs as i64) / (4 * a);
                            is_g_torsion(FormClass { a, b, c }, g, delta)
                        })
                        .count() as u64;
                    (torsion, sylow)
                })
                .collect();
            (i, BulkRow { h, gparts })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_discriminant_rule() {
        assert_eq!(fundamental_discriminant(3).unwrap().delta(), -3);
        assert_eq!(fundamental_discriminant(1).unwrap().delta(), -4);
        assert_eq!(fundamental_discriminant(5).unwrap().delta(), -20);
        assert!(matches!(
            fundamental_discriminant(4),
            Err(Error::NotSquareFree(4))
        ));
        assert!(matches!(
            fundamental_discriminant(12),
            Err(Error::NotSquareFree(12))
        ));
        assert!(fundamental_discriminant(0).is_err());
    }

    #[test]
    fn fundamental_recognition() {
        assert!(is_fundamental(-3));
        assert!(is_fundamental(-4));
        assert!(is_fundamental(-8));
        assert!(is_fundamental(-20));
        assert!(is_fundamental(-23));
        assert!(!is_fundamental(-12)); // -3 * 4
        assert!(!is_fundamental(-16));
        assert!(!is_fundamental(5));
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(1, 0, 1, -4).unwrap(), FormClass { a: 1, b: 0, c: 1 });
        assert_eq!(
            reduce(2, 2, 3, -20).unwrap(),
            FormClass { a: 2, b: 2, c: 3 }
        );
        assert_eq!(reduce(3, 2, 1, -8).unwrap(), FormClass { a: 1, b: 0, c: 2 });
        assert!(matches!(
            reduce(1, 0, 1, -8),
            Err(Error::DiscriminantMismatch { .. })
        ));
        assert!(matches!(
            reduce(-1, 0, 2, 8),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn reduce_is_idempotent_over_small_range() {
        for abs in 3..=2000u64 {
            let delta = -(abs as i64);
            if !is_fundamental(delta) {
                continue;
            }
            for f in enumerate_forms(delta) {
                assert!(f.is_reduced());
                assert_eq!(reduce(f.a, f.b, f.c, delta).unwrap(), f);
            }
        }
    }

    #[test]
    fn compose_examples_disc_23() {
        let delta = -23;
        let f = FormClass { a: 2, b: 1, c: 3 };
        let finv = FormClass { a: 2, b: -1, c: 3 };
        let id = identity_form(delta);
        assert_eq!(id, FormClass { a: 1, b: 1, c: 6 });
        assert_eq!(compose(f, finv, delta).unwrap(), id);
        assert_eq!(compose(f, f, delta).unwrap(), finv);
        for g in enumerate_forms(delta) {
            assert_eq!(compose(id, g, delta).unwrap(), g);
        }
        assert!(matches!(
            compose(f, FormClass { a: 1, b: 0, c: 1 }, -23),
            Err(Error::DiscriminantMismatch { .. })
        ));
    }

    #[test]
    fn enumerate_examples() {
        let g4 = enumerate_class_group(-4).unwrap();
        assert_eq!(g4.h, 1);
        assert_eq!(g4.divisors, vec![1]);

        let g23 = enumerate_class_group(-23).unwrap();
        assert_eq!(g23.h, 3);
        assert_eq!(g23.divisors, vec![3]);
        assert_eq!(
            g23.forms,
            vec![
                FormClass { a: 1, b: 1, c: 6 },
                FormClass { a: 2, b: -1, c: 3 },
                FormClass { a: 2, b: 1, c: 3 }
            ]
        );

        let g20 = enumerate_class_group(-20).unwrap();
        assert_eq!(g20.h, 2);
        assert_eq!(g20.divisors, vec![2]);

        assert!(matches!(
            enumerate_class_group(-12),
            Err(Error::NotFundamental(-12))
        ));
        assert!(matches!(
            enumerate_class_group(20),
            Err(Error::NotFundamental(20))
        ));
    }

    #[test]
    fn known_class_numbers() {
        // h(-d) for the first few fundamental discriminants
        for (delta, h) in [
            (-3i64, 1u64),
            (-4, 1),
            (-7, 1),
            (-8, 1),
            (-11, 1),
            (-15, 2),
            (-20, 2),
            (-23, 3),
            (-24, 2),
            (-31, 3),
            (-35, 2),
            (-39, 4),
            (-40, 2),
            (-43, 1),
            (-47, 5),
            (-163, 1),
            (-5460, 16),
        ] {
            assert_eq!(enumerate_class_group(delta).unwrap().h, h, "delta={delta}");
        }
    }

    #[test]
    fn g_part_examples() {
        let g23 = enumerate_class_group(-23).unwrap();
        let p3 = g23.g_part(3).unwrap();
        assert_eq!((p3.sylow_order, p3.torsion_count), (3, 3));
        let p5 = g23.g_part(5).unwrap();
        assert_eq!((p5.sylow_order, p5.torsion_count), (1, 1));

        let g4 = enumerate_class_group(-4).unwrap();
        let p3 = g4.g_part(3).unwrap();
        assert_eq!((p3.sylow_order, p3.torsion_count), (1, 1));

        assert!(matches!(g4.g_part(2), Err(Error::NotOddPrime(2))));
        assert!(matches!(g4.g_part(9), Err(Error::NotOddPrime(9))));
    }

    #[test]
    fn group_law_and_lagrange_small_range() {
        for abs in 3..=1500u64 {
            let delta = -(abs as i64);
            if !is_fundamental(delta) {
                continue;
            }
            let group = enumerate_class_group(delta).unwrap();
            assert_eq!(group.divisors.iter().product::<u64>(), group.h);
            let id = identity_form(delta);
            for &f in &group.forms {
                assert_eq!(compose_unchecked(f, f.inverse(), delta), id);
                assert_eq!(power(f, group.h, delta), id, "Lagrange fails for {f:?}");
            }
        }
    }

    #[test]
    fn saturation_matches_enumeration_small_range() {
        for abs in 3..=1200u64 {
            let delta = -(abs as i64);
            if !is_fundamental(delta) {
                continue;
            }
            let group = enumerate_class_group(delta).unwrap();
            assert_eq!(group.class_number_by_saturation(), group.h, "delta={delta}");
        }
    }

    #[test]
    fn torsion_counts_match_divisor_structure() {
        for abs in 3..=2500u64 {
            let delta = -(abs as i64);
            if !is_fundamental(delta) {
                continue;
            }
            let group = enumerate_class_group(delta).unwrap();
            for g in [3u64, 5, 7] {
                let part = group.g_part(g).unwrap();
                let rank = group.divisors.iter().filter(|&&dv| dv % g == 0).count() as u32;
                assert_eq!(part.torsion_count, g.pow(rank), "delta={delta} g={g}");
                assert_eq!(part.sylow_order % part.torsion_count, 0);
                assert_eq!(group.h % part.sylow_order, 0);
            }
        }
    }

    #[test]
    fn noncyclic_three_part() {
        // |delta| = 3299 is the first with 3-rank 2: Cl = Z/3 x Z/9, and the
        // Sylow 3-subgroup is not elementary, so torsion and Sylow differ
        let group = enumerate_class_group(-3299).unwrap();
        assert_eq!(group.h, 27);
        assert_eq!(group.divisors, vec![3, 9]);
        let p3 = group.g_part(3).unwrap();
        assert_eq!(p3.sylow_order, 27);
        assert_eq!(p3.torsion_count, 9);

        // first elementary (Z/3)^2 group
        let group = enumerate_class_group(-4027).unwrap();
        assert_eq!(group.divisors, vec![3, 3]);
        let p3 = group.g_part(3).unwrap();
        assert_eq!((p3.sylow_order, p3.torsion_count), (9, 9));
    }

    #[test]
    fn bulk_matches_per_discriminant() {
        let mut entries = Vec::new();
        let mut expect = Vec::new();
        for abs in 3..=4000u64 {
            if !is_fundamental(-(abs as i64)) {
                continue;
            }
            entries.push(abs);
            let group = enumerate_class_group(-(abs as i64)).unwrap();
            let p3 = group.g_part(3).unwrap();
            let p5 = group.g_part(5).unwrap();
            expect.push((group.h, p3, p5));
        }
        let rows = bulk_class_data(&entries, &[3, 5], 0);
        for (row, (h, p3, p5)) in rows.iter().zip(&expect) {
            assert_eq!(row.h, *h);
            assert_eq!(row.gparts[0], (p3.torsion_count, p3.sylow_order));
            assert_eq!(row.gparts[1], (p5.torsion_count, p5.sylow_order));
        }
    }

    #[test]
    fn prime_form_lands_in_group() {
        let delta = -23;
        let group = enumerate_class_group(delta).unwrap();
        // 59 splits in disc -23: x^2 = -23 (mod 59) solvable
        let f = prime_form(delta, 59).unwrap();
        assert!(group.forms.contains(&f));
        assert_eq!(prime_form(delta, 23), None); // ramified
    }
}
