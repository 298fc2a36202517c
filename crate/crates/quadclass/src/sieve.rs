//! Square-free enumeration, the quadratic character `chi_d`, prime
//! windows `[Z, 2Z)`, window character sums `M(d; Z)`, and the
//! exceptional set of discriminants whose character sum is abnormally
//! large.

use crate::arith;
use crate::quadforms::fundamental_discriminant;
use crate::{Error, Result};
use std::io::Write;

/// Square-free flags for the half-open range `[lo, hi)`, by striking
/// multiples of squared primes.
pub fn squarefree_flags(lo: u64, hi: u64) -> Result<Vec<bool>> {
    if lo < 1 || lo >= hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let len = (hi - lo) as usize;
    let mut flags = vec![true; len];
    let root = arith::isqrt_u64(hi - 1);
    for p in arith::primes_up_to(root) {
        let p2 = p * p;
        let mut q = lo.div_ceil(p2) * p2;
        while q < hi {
            flags[(q - lo) as usize] = false;
            q += p2;
        }
    }
    Ok(flags)
}

/// The square-free integers in `[lo, hi)`.
pub fn squarefree_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    let flags = squarefree_flags(lo, hi)?;
    Ok(flags
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(lo + i as u64) } else { None })
        .collect())
}

/// Kronecker symbol `(a | b)`, extending the Jacobi symbol to all
/// integers. Completely multiplicative in both arguments.
pub fn kronecker(a: i64, b: i64) -> i8 {
    if b == 0 {
        return if a.unsigned_abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut b = b;
    let mut acc: i8 = 1;
    // strip the 2-part of b; (a|2) depends on a mod 8
    let mut v = 0u32;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
        acc = -acc;
    }
    if b < 0 {
        b = -b;
        if a < 0 {
            acc = -acc;
        }
    }
    // Jacobi symbol (a|b) with b odd positive
    a = a.rem_euclid(b);
    while a != 0 {
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 && matches!(b % 8, 3 | 5) {
            acc = -acc;
        }
        if a % 4 == 3 && b % 4 == 3 {
            acc = -acc;
        }
        let t = b % a;
        b = a;
        a = t;
    }
    if b == 1 {
        acc
    } else {
        0
    }
}

/// The quadratic character of the field of radicand `-d`:
/// `chi_d(n) = (delta | n)` for the fundamental discriminant `delta`.
/// Zero exactly when `gcd(n, delta) > 1`.
pub fn chi(d: u64, n: u64) -> Result<i8> {
    let disc = fundamental_discriminant(d)?;
    Ok(kronecker(disc.delta(), n as i64))
}

/// The complete list of primes in `[Z, 2Z)`.
#[derive(Debug, Clone)]
pub struct PrimeWindow {
    pub z: u64,
    pub primes: Vec<u64>,
}

/// Primes in `[Z, 2Z)`; an empty window (e.g. `Z = 1`) is allowed.
pub fn prime_window(z: u64) -> Result<PrimeWindow> {
    if z == 0 {
        return Err(Error::InvalidParameter("Z must be >= 1".into()));
    }
    Ok(PrimeWindow {
        z,
        primes: arith::primes_in(z, 2 * z),
    })
}

/// Window primes `p` with `p` not dividing `2d` and `chi_d(p) = +1`.
pub fn split_primes(d: u64, z: u64) -> Result<Vec<u64>> {
    let disc = fundamental_discriminant(d)?;
    let window = prime_window(z)?;
    Ok(window
        .primes
        .into_iter()
        .filter(|&p| !(2 * d).is_multiple_of(p) && kronecker(disc.delta(), p as i64) == 1)
        .collect())
}

/// The exact window character sum `M(d; Z) = sum of chi_d(p)` over all
/// primes `Z <= p < 2Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacterSum {
    pub d: u64,
    pub z: u64,
    pub value: i64,
}

pub fn character_sum_m(d: u64, z: u64) -> Result<CharacterSum> {
    let disc = fundamental_discriminant(d)?;
    let window = prime_window(z)?;
    let value = window
        .primes
        .iter()
        .map(|&p| kronecker(disc.delta(), p as i64) as i64)
        .sum();
    Ok(CharacterSum { d, z, value })
}

/// The square-free `d` in `[X, 2X)` whose window character sum is large:
/// `|M(d; Z)| >= Z / (4 ln Z)`.
#[derive(Debug, Clone)]
pub struct ExceptionalSet {
    pub z: u64,
    pub x: u64,
    pub threshold: f64,
    pub members: Vec<u64>,
    /// `(d, M(d; Z))` for every square-free d in the range.
    pub sums: Vec<(u64, i64)>,
}

pub fn exceptional_set(z: u64, x: u64) -> Result<ExceptionalSet> {
    if z < 3 {
        return Err(Error::InvalidParameter(
            "Z must be >= 3 so that ln Z > 1".into(),
        ));
    }
    if x < 1 {
        return Err(Error::InvalidParameter("X must be >= 1".into()));
    }
    let threshold = 0.25 * z as f64 / (z as f64).ln();
    let window = prime_window(z)?;
    let flags = squarefree_flags(x, 2 * x)?;
    let mut members = Vec::new();
    let mut sums = Vec::new();
    for (i, &sf) in flags.iter().enumerate() {
        if !sf {
            continue;
        }
        let d = x + i as u64;
        let delta = fundamental_discriminant(d)
            .expect("sieved square-free")
            .delta();
        let m: i64 = window
            .primes
            .iter()
            .map(|&p| kronecker(delta, p as i64) as i64)
            .sum();
        sums.push((d, m));
        if (m.unsigned_abs() as f64) >= threshold {
            members.push(d);
        }
    }
    Ok(ExceptionalSet {
        z,
        x,
        threshold,
        members,
        sums,
    })
}

/// CSV export of `(d, Z, M, is_exceptional)` rows for sweep audits.
pub fn write_character_csv<W: Write>(out: &mut W, set: &ExceptionalSet) -> std::io::Result<()> {
    writeln!(out, "d,Z,M,is_exceptional")?;
    for &(d, m) in &set.sums {
        let exceptional = (m.unsigned_abs() as f64) >= set.threshold;
        writeln!(out, "{d},{},{m},{}", set.z, exceptional as u8)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_range(1, 11).unwrap(), vec![1, 2, 3, 5, 6, 7, 10]);
        assert_eq!(squarefree_range(8, 10).unwrap(), Vec::<u64>::new());
        assert_eq!(squarefree_range(48, 51).unwrap(), Vec::<u64>::new());
        assert!(matches!(
            squarefree_range(5, 5),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            squarefree_range(7, 3),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            squarefree_range(0, 3),
            Err(Error::InvalidRange { .. })
        ));
    }

    #[test]
    fn squarefree_matches_trial_division() {
        let got = squarefree_range(1, 3000).unwrap();
        let expect: Vec<u64> = (1..3000).filter(|&n| arith::is_squarefree_u64(n)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(1, 5).unwrap(), 1);
        assert_eq!(chi(1, 2).unwrap(), 0);
        assert_eq!(chi(3, 7).unwrap(), 1);
    }

    #[test]
    fn kronecker_is_euler_criterion_at_odd_primes() {
        let ds: Vec<u64> = squarefree_range(1, 40).unwrap();
        for p in arith::primes_up_to(1000) {
            if p == 2 {
                continue;
            }
            for &d in &ds {
                let delta = fundamental_discriminant(d).unwrap().delta();
                let got = kronecker(delta, p as i64);
                let a = delta.rem_euclid(p as i64) as u64;
                let expect = if a == 0 {
                    0
                } else if arith::pow_mod(a, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(got as i64, expect as i64, "delta={delta} p={p}");
            }
        }
    }

    #[test]
    fn chi_completely_multiplicative() {
        for d in [1u64, 2, 3, 5, 6, 7, 10, 11, 15] {
            let delta = fundamental_discriminant(d).unwrap().delta();
            for m in 1..=1000u64 {
                for n in [2u64, 3, 5, 7, 16, 45, 1000] {
                    let lhs = kronecker(delta, (m * n) as i64);
                    let rhs = kronecker(delta, m as i64) * kronecker(delta, n as i64);
                    assert_eq!(lhs, rhs, "d={d} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn chi_zero_exactly_on_delta_divisors() {
        for d in [1u64, 3, 5, 7, 13, 21, 30] {
            let delta = fundamental_discriminant(d).unwrap().delta();
            for p in arith::primes_up_to(200) {
                let value = kronecker(delta, p as i64);
                if delta.rem_euclid(p as i64) == 0 {
                    assert_eq!(value, 0);
                } else {
                    assert!(value == 1 || value == -1);
                }
            }
        }
    }

    #[test]
    fn split_primes_examples() {
        assert_eq!(split_primes(1, 3).unwrap(), vec![5]);
        assert_eq!(split_primes(3, 5).unwrap(), vec![7]);
        assert_eq!(split_primes(1, 2).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn window_partition_into_split_inert_ramified() {
        for d in [1u64, 3, 5, 14, 23, 55] {
            let delta = fundamental_discriminant(d).unwrap().delta();
            for z in [2u64, 5, 10, 50, 200] {
                let window = prime_window(z).unwrap();
                let total = window.primes.len();
                let mut split = 0;
                let mut inert = 0;
                let mut ramified = 0;
                for &p in &window.primes {
                    match kronecker(delta, p as i64) {
                        1 => split += 1,
                        -1 => inert += 1,
                        _ => ramified += 1,
                    }
                }
                assert_eq!(split + inert + ramified, total);
            }
        }
    }

    #[test]
    fn character_sum_examples() {
        assert_eq!(character_sum_m(1, 3).unwrap().value, 0);
        assert_eq!(character_sum_m(3, 5).unwrap().value, 0);
        // window [1, 2) holds no primes at all
        assert!(prime_window(1).unwrap().primes.is_empty());
    }

    #[test]
    fn exceptional_set_small_case() {
        // Z = 3: threshold 0.75 / ln 3 < 1, so d is exceptional iff |M| >= 1
        let set = exceptional_set(3, 100).unwrap();
        assert!(set.threshold < 1.0);
        for &(d, m) in &set.sums {
            assert_eq!(set.members.contains(&d), m != 0);
        }
        assert!(exceptional_set(2, 100).is_err());
    }

    #[test]
    fn exceptional_set_monotone_in_threshold() {
        let set = exceptional_set(7, 200).unwrap();
        let count_at = |t: f64| {
            set.sums
                .iter()
                .filter(|&&(_, m)| m.unsigned_abs() as f64 >= t)
                .count()
        };
        // lowering the threshold can only add members
        let mut prev = 0usize;
        for t in [4.0, 3.0, 2.0, 1.0, 0.5] {
            let c = count_at(t);
            assert!(c >= prev);
            prev = c;
        }
        assert_eq!(count_at(set.threshold), set.members.len());
    }

    #[test]
    fn split_count_dichotomy_for_non_exceptional() {
        // For d outside the exceptional set, the split-prime count obeys
        // #split = (P + M - R) / 2 > (P - threshold - R) / 2 exactly.
        let set = exceptional_set(20, 50).unwrap();
        let window = prime_window(20).unwrap();
        let p_total = window.primes.len() as f64;
        for &(d, m) in &set.sums {
            if set.members.contains(&d) {
                continue;
            }
            let delta = fundamental_discriminant(d).unwrap().delta();
            let split = window
                .primes
                .iter()
                .filter(|&&p| kronecker(delta, p as i64) == 1)
                .count();
            let ramified = window
                .primes
                .iter()
                .filter(|&&p| kronecker(delta, p as i64) == 0)
                .count();
            assert_eq!(2 * split as i64, p_total as i64 + m - ramified as i64);
            assert!((split as f64) >= (p_total - set.threshold - ramified as f64) / 2.0);
        }
    }

    #[test]
    fn character_csv_shape() {
        let set = exceptional_set(3, 10).unwrap();
        let mut buf = Vec::new();
        write_character_csv(&mut buf, &set).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("d,Z,M,is_exceptional"));
        assert_eq!(lines.count(), set.sums.len());
    }
}
