//! Shared integer helpers: exact square roots, gcds, modular arithmetic,
//! primality, sieves, and factorization at desk scale.

/// Floor of the square root, exact for all `u64`.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    // f64 seed can be off by one in either direction
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Floor of the square root, exact for all `u128`.
pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    if r == 0 {
        r = 1;
    }
    // Newton iterations to converge, then exact fix-up
    for _ in 0..4 {
        r = (r + n / r) / 2;
    }
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Returns `Some(sqrt(n))` when `n` is a perfect square.
pub fn exact_sqrt_u128(n: u128) -> Option<u128> {
    // quick residue filter: squares mod 64 take only 12 values
    const SQ64: u64 = {
        let mut mask = 0u64;
        let mut i = 0u64;
        while i < 64 {
            mask |= 1 << ((i * i) % 64);
            i += 1;
        }
        mask
    };
    if SQ64 & (1 << ((n % 64) as u64)) == 0 {
        return None;
    }
    let r = isqrt_u128(n);
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `a * b mod m` without overflow for `m < 2^64`.
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` for `m >= 1`.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod `m`, when it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        let tr = old_r - q * r;
        old_r = r;
        r = tr;
        let ts = old_s - q * s;
        old_s = s;
        s = ts;
    }
    if old_r.abs() != 1 {
        return None;
    }
    let inv = (old_s * old_r.signum()).rem_euclid(m as i128);
    Some(inv as u64)
}

/// Combine `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)` for coprime moduli.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    debug_assert_eq!(gcd_u64(m1, m2), 1);
    let m = m1.checked_mul(m2)?;
    let inv = inv_mod(m1 % m2, m2)?;
    // x = r1 + m1 * ((r2 - r1) * inv mod m2)
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u64;
    let t = mul_mod(diff, inv, m2);
    Some((r1 + m1 * t, m))
}

/// Deterministic Miller-Rabin, valid for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
/// Returns the smaller of the two roots; `None` when `a` is a non-residue.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    debug_assert!(p > 2 && is_prime_u64(p));
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        // write p - 1 = q * 2^s with q odd
        let mut q = p - 1;
        let mut s = 0u32;
        while q & 1 == 0 {
            q >>= 1;
            s += 1;
        }
        // any quadratic non-residue serves as the generator
        let mut z = 2;
        while pow_mod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod(tt, tt, p);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = mul_mod(b, b, p);
            }
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    Some(root.min(p - root))
}

/// Primes up to and including `n`, by Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// Primes in the half-open range `[lo, hi)`, by segmented sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo || hi <= 2 {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = primes_up_to(isqrt_u64(hi - 1));
    let len = (hi - lo) as usize;
    let mut flags = vec![true; len];
    for &p in &base {
        if p * p >= hi {
            break;
        }
        let start = std::cmp::max(p * p, lo.div_ceil(p) * p);
        let mut q = start;
        while q < hi {
            flags[(q - lo) as usize] = false;
            q += p;
        }
    }
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| {
            let n = lo + i as u64;
            if b && n >= 2 {
                Some(n)
            } else {
                None
            }
        })
        .collect()
}

/// Trial-division factorization; adequate for desk-scale arguments.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut p = 3u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    out
}

/// Square-free test by trial division.
pub fn is_squarefree_u64(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Smallest-prime-factor table for `0..=n` (`spf[0] = spf[1] = 0`).
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}
