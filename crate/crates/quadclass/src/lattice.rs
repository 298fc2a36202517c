//! Rank-2 integer lattices: congruence lattices, Lagrange-Gauss
//! reduction with successive minima, exact point counts in discs, cube
//! roots modulo odd square-free numbers, and the coset-lattice systems
//! that encode the cubic congruence conditions on pairs `(w1, w2)`.

use crate::arith;
use crate::repcount::kernel;
use crate::{Error, Result};
use std::str::FromStr;

/// An exact nonnegative rational radius, e.g. `10` or `21/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Radius {
    pub num: u64,
    pub den: u64,
}

impl Radius {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("radius denominator is zero".into()));
        }
        Ok(Radius { num, den })
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Is `sqrt(norm_sq) <= self`, exactly?
    pub fn admits_norm_sq(&self, norm_sq: u128) -> bool {
        let d2 = (self.den as u128) * (self.den as u128);
        norm_sq
            .checked_mul(d2)
            .is_some_and(|lhs| lhs <= (self.num as u128) * (self.num as u128))
    }
}

impl FromStr for Radius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse radius {s:?} as p or p/q"));
        match s.split_once('/') {
            Some((n, d)) => Radius::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Radius::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

/// A rank-2 integer lattice given by a basis, with an optional coset
/// shift for lattice translates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice2D {
    pub b1: (i64, i64),
    pub b2: (i64, i64),
    pub shift: Option<(i64, i64)>,
}

fn norm_sq(v: (i64, i64)) -> u128 {
    let x = v.0 as i128;
    let y = v.1 as i128;
    (x * x + y * y) as u128
}

fn dot(a: (i64, i64), b: (i64, i64)) -> i128 {
    a.0 as i128 * b.0 as i128 + a.1 as i128 * b.1 as i128
}

// sign-canonical representative of {v, -v}
fn canonical(v: (i64, i64)) -> (i64, i64) {
    if v.0 < 0 || (v.0 == 0 && v.1 < 0) {
        (-v.0, -v.1)
    } else {
        v
    }
}

impl Lattice2D {
    pub fn new(b1: (i64, i64), b2: (i64, i64)) -> Result<Self> {
        let lat = Lattice2D {
            b1,
            b2,
            shift: None,
        };
        if lat.det() == 0 {
            return Err(Error::DegenerateBasis);
        }
        Ok(lat)
    }

    /// `|det(b1, b2)|`.
    pub fn det(&self) -> u64 {
        (self.b1.0 as i128 * self.b2.1 as i128 - self.b1.1 as i128 * self.b2.0 as i128)
            .unsigned_abs() as u64
    }

    /// Does the (shifted) lattice contain the point `p`?
    pub fn contains(&self, p: (i64, i64)) -> bool {
        let c = self.shift.unwrap_or((0, 0));
        let z = (p.0 as i128 - c.0 as i128, p.1 as i128 - c.1 as i128);
        let det = self.b1.0 as i128 * self.b2.1 as i128 - self.b1.1 as i128 * self.b2.0 as i128;
        // Cramer coordinates must be integral
        let m_num = z.0 * self.b2.1 as i128 - z.1 * self.b2.0 as i128;
        let n_num = self.b1.0 as i128 * z.1 - self.b1.1 as i128 * z.0;
        m_num % det == 0 && n_num % det == 0
    }
}

/// The congruence lattice `{(z1, z2) : z2 = b z1 (mod ell)}` of
/// determinant `ell`, with basis `{(1, b), (0, ell)}` before reduction.
pub fn lattice_from_congruence(ell: u64, b: u64) -> Result<Lattice2D> {
    if ell < 1 {
        return Err(Error::InvalidParameter("ell must be >= 1".into()));
    }
    let b = (b % ell) as i64;
    Lattice2D::new((1, b), (0, ell as i64))
}

/// Successive minima of a rank-2 lattice with attaining vectors.
/// Ties break lexicographically on `(|z|, z1, z2)` after sign
/// canonicalization, so the result is deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minima {
    pub lambda1: f64,
    pub lambda2: f64,
    pub norm1_sq: u128,
    pub norm2_sq: u128,
    pub v1: (i64, i64),
    pub v2: (i64, i64),
}

// nearest integer to a/b with ties rounded down, for b > 0
fn round_div(a: i128, b: i128) -> i128 {
    (2 * a + b).div_euclid(2 * b)
}

/// Lagrange-Gauss reduction. The returned basis satisfies
/// `|b1| <= |b2|` and `2 |b1.b2| <= |b1|^2`, attains the successive
/// minima, and preserves the determinant and the coset shift.
pub fn gauss_reduce(lat: &Lattice2D) -> Result<(Lattice2D, Minima)> {
    if lat.det() == 0 {
        return Err(Error::DegenerateBasis);
    }
    let mut b1 = lat.b1;
    let mut b2 = lat.b2;
    loop {
        if norm_sq(b2) < norm_sq(b1) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = round_div(dot(b1, b2), norm_sq(b1) as i128);
        if mu == 0 {
            break;
        }
        b2 = (b2.0 - (mu as i64) * b1.0, b2.1 - (mu as i64) * b1.1);
    }
    debug_assert!(2 * dot(b1, b2).unsigned_abs() <= norm_sq(b1));

    // in a reduced basis the minima are attained among these candidates
    let mut cands = [
        b1,
        b2,
        (b1.0 + b2.0, b1.1 + b2.1),
        (b1.0 - b2.0, b1.1 - b2.1),
    ]
    .map(canonical)
    .to_vec();
    cands.sort_unstable_by_key(|&v| (norm_sq(v), v.0, v.1));
    let v1 = cands[0];
    let v2 = *cands
        .iter()
        .find(|&&v| v.0 as i128 * v1.1 as i128 != v.1 as i128 * v1.0 as i128)
        .expect("nondegenerate basis has an independent candidate");

    let reduced = Lattice2D {
        b1,
        b2,
        shift: lat.shift,
    };
    let n1 = norm_sq(v1);
    let n2 = norm_sq(v2);
    let det = reduced.det() as u128;
    debug_assert!(det * det <= n1 * n2 && 3 * n1 * n2 <= 4 * det * det);
    Ok((
        reduced,
        Minima {
            lambda1: (n1 as f64).sqrt(),
            lambda2: (n2 as f64).sqrt(),
            norm1_sq: n1,
            norm2_sq: n2,
            v1,
            v2,
        },
    ))
}

/// Exact number of points of the (shifted) lattice with Euclidean norm
/// at most `radius`, the origin included for the unshifted lattice.
/// Enumerates the coefficient box of the reduced basis; errors out when
/// the enumeration would exceed the work budget.
pub fn count_points(lat: &Lattice2D, radius: Radius, budget: Option<u64>) -> Result<u64> {
    let (red, minima) = gauss_reduce(lat)?;
    let budget = budget.unwrap_or(100_000_000);
    let c = red.shift.unwrap_or((0, 0));
    let r = radius.as_f64();
    let det = red.det() as f64;
    let b1 = red.b1;
    let b2 = red.b2;
    let n1 = norm_sq(b1) as f64;
    let b1n = n1.sqrt();
    let c_norm = (norm_sq(c) as f64).sqrt();

    // |n| det / |b1| <= r + |c| bounds the b2-coefficient
    let n_max = ((r + c_norm) * b1n / det).floor() as i64 + 2;
    let mut spent = 0u64;
    let mut count = 0u64;
    for n in -n_max..=n_max {
        // p = c + n b2 + m b1; bound m from |p| <= r + slack
        let base = (
            c.0 as i128 + n as i128 * b2.0 as i128,
            c.1 as i128 + n as i128 * b2.1 as i128,
        );
        let proj = (base.0 * b1.0 as i128 + base.1 * b1.1 as i128) as f64 / n1;
        let half = (r / b1n) + 2.0;
        let m_lo = (-proj - half).floor() as i128;
        let m_hi = (-proj + half).ceil() as i128;
        spent += (m_hi - m_lo + 1) as u64;
        if spent > budget {
            return Err(Error::WorkBudgetExceeded { spent, budget });
        }
        for m in m_lo..=m_hi {
            let x = base.0 + m * b1.0 as i128;
            let y = base.1 + m * b1.1 as i128;
            let nsq = (x * x + y * y) as u128;
            if radius.admits_norm_sq(nsq) {
                count += 1;
            }
        }
    }
    let _ = minima;
    Ok(count)
}

/// All residues `x (mod q)` with `x^3 = a (mod q)`, for odd square-free
/// `q`. Solved prime by prime and recombined by CRT; at most
/// `3^{omega(q)}` classes, with 3 classes mod `p` only when
/// `p = 1 (mod 3)` and `a` is a cubic residue.
pub fn cube_roots_mod(a: u64, q: u64) -> Result<Vec<u64>> {
    if q < 1 || q.is_multiple_of(2) || !arith::is_squarefree_u64(q) {
        return Err(Error::InvalidParameter(format!(
            "q = {q} must be odd and square-free"
        )));
    }
    if q == 1 {
        return Ok(vec![0]);
    }
    let mut residues: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    for (p, _) in arith::factorize(q) {
        let ap = a % p;
        let part: Vec<u64> = if ap == 0 {
            vec![0]
        } else if p == 3 {
            // cubing is the identity mod 3
            vec![ap]
        } else if p % 3 == 2 {
            // cubing is a bijection: the root is a^{3^{-1} mod p-1}
            let inv3 = arith::inv_mod(3, p - 1).expect("gcd(3, p-1) = 1");
            vec![arith::pow_mod(ap, inv3, p)]
        } else {
            if arith::pow_mod(ap, (p - 1) / 3, p) != 1 {
                vec![]
            } else {
                if p > 10_000_000 {
                    return Err(Error::InvalidParameter(format!(
                        "prime factor {p} too large for root search"
                    )));
                }
                let root = (1..p)
                    .find(|&x| arith::pow_mod(x, 3, p) == ap)
                    .expect("cubic residue has a root");
                let omega = (2..)
                    .map(|h| arith::pow_mod(h, (p - 1) / 3, p))
                    .find(|&w| w != 1)
                    .expect("p = 1 mod 3 has a primitive cube root of unity");
                let mut roots = vec![
                    root,
                    arith::mul_mod(root, omega, p),
                    arith::mul_mod(root, arith::mul_mod(omega, omega, p), p),
                ];
                roots.sort_unstable();
                roots
            }
        };
        if part.is_empty() {
            return Ok(vec![]);
        }
        let mut next = Vec::with_capacity(residues.len() * part.len());
        for &r in &residues {
            for &s in &part {
                let (x, _) = arith::crt_pair(r, modulus, s, p).expect("coprime moduli");
                next.push(x);
            }
        }
        residues = next;
        modulus *= p;
    }
    residues.sort_unstable();
    Ok(residues)
}

/// One coset of the determinant-`q1 q2 ell` lattice carrying the
/// congruence system: `w1 = r1 (mod q1)`, `w2 = r2 (mod q2)`,
/// `w2 = b w1 (mod ell)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosetLattice {
    pub q1: u64,
    pub r1: u64,
    pub q2: u64,
    pub r2: u64,
    pub ell: u64,
    pub b: u64,
}

impl CosetLattice {
    pub fn contains(&self, w1: u64, w2: u64) -> bool {
        w1 % self.q1 == self.r1
            && w2 % self.q2 == self.r2
            && (w2 % self.ell + self.ell - arith::mul_mod(self.b, w1 % self.ell, self.ell))
                .is_multiple_of(self.ell)
    }

    /// Basis-and-shift form: the underlying lattice has determinant
    /// `q1 q2 ell`.
    pub fn to_lattice(&self) -> Lattice2D {
        let (q1, q2, ell) = (self.q1, self.q2, self.ell);
        // e1 = (q1, t) with t = 0 (mod q2), t = b q1 (mod ell)
        let (t, _) = arith::crt_pair(0, q2, arith::mul_mod(self.b, q1 % ell, ell), ell)
            .expect("coprime moduli");
        let e1 = (q1 as i64, t as i64);
        let e2 = (0i64, (q2 * ell) as i64);
        // shift: c1 = r1 (mod q1), 1 (mod ell); c2 = r2 (mod q2), b (mod ell)
        let (c1, _) = arith::crt_pair(self.r1, q1, 1 % ell, ell).expect("coprime moduli");
        let (c2, _) = arith::crt_pair(self.r2, q2, self.b % ell, ell).expect("coprime moduli");
        let lat = Lattice2D {
            b1: e1,
            b2: e2,
            shift: Some((c1 as i64, c2 as i64)),
        };
        debug_assert_eq!(lat.det(), q1 * q2 * ell);
        debug_assert!(lat.contains((c1 as i64, c2 as i64)));
        lat
    }

    /// Basis-and-shift form with the shift translated by lattice vectors
    /// into `[w_lo, w_hi)^2`, the box the pair variables live in. Fails
    /// when a basis period exceeds the box width.
    pub fn to_lattice_in_range(&self, w_lo: u64, w_hi: u64) -> Result<Lattice2D> {
        let lat = self.to_lattice();
        let width = w_hi as i64 - w_lo as i64;
        let p1 = lat.b1.0; // z1-period is q1
        let p2 = lat.b2.1; // z2-period is q2 ell, at fixed z1
        if width < p1 || width < p2 {
            return Err(Error::InvalidParameter(format!(
                "box [{w_lo}, {w_hi}) narrower than the coset periods ({p1}, {p2})"
            )));
        }
        let (c1, c2) = lat.shift.unwrap();
        let k1 =
            (w_lo as i64 - c1).div_euclid(p1) + i64::from((w_lo as i64 - c1).rem_euclid(p1) != 0);
        let c1 = c1 + k1 * lat.b1.0;
        let c2 = c2 + k1 * lat.b1.1;
        let k2 =
            (w_lo as i64 - c2).div_euclid(p2) + i64::from((w_lo as i64 - c2).rem_euclid(p2) != 0);
        let c2 = c2 + k2 * lat.b2.1;
        debug_assert!((w_lo as i64..w_hi as i64).contains(&c1));
        debug_assert!((w_lo as i64..w_hi as i64).contains(&c2));
        Ok(Lattice2D {
            shift: Some((c1, c2)),
            ..lat
        })
    }
}

/// The coset-lattice system carrying the congruences
/// `w1^3 = a1 (mod q1)`, `w2^3 = a2 (mod q2)`,
/// `y2^2 w1^3 = y1^2 w2^3 (mod ell)` for coprime `y1, y2` and `k`, where
/// `q_i` is the odd square-free kernel of `y_i` and `ell` that of `k`.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    pub y1: u64,
    pub y2: u64,
    pub k: u64,
    pub q1: u64,
    pub q2: u64,
    pub ell: u64,
    pub a1: u64,
    pub a2: u64,
    /// cube target for `w2 w1^{-1} (mod ell)`
    pub a_ratio: u64,
    pub det: u64,
    pub cosets: Vec<CosetLattice>,
}

impl LatticeSystem {
    /// Does some coset contain `(w1, w2)`?
    pub fn member(&self, w1: u64, w2: u64) -> bool {
        self.cosets.iter().any(|c| c.contains(w1, w2))
    }

    /// The smallest first minimum across the coset lattices (the
    /// per-tuple choice the downstream counting takes). `None` when the
    /// system has no cosets.
    pub fn min_lambda1(&self) -> Option<Minima> {
        self.cosets
            .iter()
            .map(|c| {
                gauss_reduce(&c.to_lattice())
                    .expect("coset lattices are nondegenerate")
                    .1
            })
            .min_by(|a, b| (a.norm1_sq, a.v1).cmp(&(b.norm1_sq, b.v1)))
    }

    /// Do the three congruences hold for `(w1, w2)`?
    pub fn congruences_hold(&self, w1: u64, w2: u64) -> bool {
        let c1 = arith::pow_mod(w1, 3, self.q1) == self.a1 % self.q1;
        let c2 = arith::pow_mod(w2, 3, self.q2) == self.a2 % self.q2;
        let lhs = arith::mul_mod(
            arith::mul_mod(self.y2 % self.ell, self.y2 % self.ell, self.ell),
            arith::pow_mod(w1, 3, self.ell),
            self.ell,
        );
        let rhs = arith::mul_mod(
            arith::mul_mod(self.y1 % self.ell, self.y1 % self.ell, self.ell),
            arith::pow_mod(w2, 3, self.ell),
            self.ell,
        );
        c1 && c2 && lhs == rhs
    }
}

/// Builds the coset lattices for the cubic congruence system attached to
/// `(y1, y2, k)`. The moduli `q1, q2, ell` must be pairwise coprime
/// (automatic for data arising from genuine triple pairs); violations
/// are rejected with a diagnostic. At most
/// `3^{omega(q1) + omega(q2) + omega(ell)}` cosets are produced, each of
/// determinant `q1 q2 ell`; membership in their union is equivalent to
/// the congruence system on coprime pairs `(w1, w2)`.
pub fn lattice_system(y1: u64, y2: u64, k: u64) -> Result<LatticeSystem> {
    if y1 < 1 || y2 < 1 || k < 1 {
        return Err(Error::InvalidParameter("y1, y2, k must be >= 1".into()));
    }
    if arith::gcd_u64(y1, y2) != 1 {
        return Err(Error::NotCoprime {
            a: y1,
            b: y2,
            context: "lattice_system requires coprime y1, y2",
        });
    }
    let q1 = kernel(y1);
    let q2 = kernel(y2);
    let ell = kernel(k);
    debug_assert_eq!(arith::gcd_u64(q1, q2), 1);
    if arith::gcd_u64(q1, ell) != 1 {
        return Err(Error::NotCoprime {
            a: q1,
            b: ell,
            context: "kernels of y1 and k share a prime; no valid triple pair produces this",
        });
    }
    if arith::gcd_u64(q2, ell) != 1 {
        return Err(Error::NotCoprime {
            a: q2,
            b: ell,
            context: "kernels of y2 and k share a prime; no valid triple pair produces this",
        });
    }

    // a1 = k^2 (4 y2^2)^{-1} mod q1, a2 = k^2 (4 y1^2)^{-1} mod q2
    let inv_sq = |y: u64, q: u64| -> Result<u64> {
        let t = arith::mul_mod(4 % q.max(1), arith::mul_mod(y % q, y % q, q), q);
        arith::inv_mod(t, q).ok_or(Error::NotCoprime {
            a: 4 * y,
            b: q,
            context: "constant of the cubic congruence is undefined",
        })
    };
    let a1 = if q1 == 1 {
        0
    } else {
        arith::mul_mod(arith::mul_mod(k % q1, k % q1, q1), inv_sq(y2, q1)?, q1)
    };
    let a2 = if q2 == 1 {
        0
    } else {
        arith::mul_mod(arith::mul_mod(k % q2, k % q2, q2), inv_sq(y1, q2)?, q2)
    };
    let a_ratio = if ell == 1 {
        0
    } else {
        let inv_y1 = arith::inv_mod(y1 % ell, ell).ok_or(Error::NotCoprime {
            a: y1,
            b: ell,
            context: "y1 is not invertible modulo ell",
        })?;
        let ratio = arith::mul_mod(y2 % ell, inv_y1, ell);
        arith::mul_mod(ratio, ratio, ell)
    };

    let roots1 = cube_roots_mod(a1, q1)?;
    let roots2 = cube_roots_mod(a2, q2)?;
    let roots_w = cube_roots_mod(a_ratio, ell)?;
    let mut cosets = Vec::with_capacity(roots1.len() * roots2.len() * roots_w.len());
    for &r1 in &roots1 {
        for &r2 in &roots2 {
            for &b in &roots_w {
                cosets.push(CosetLattice {
                    q1,
                    r1,
                    q2,
                    r2,
                    ell,
                    b,
                });
            }
        }
    }
    Ok(LatticeSystem {
        y1,
        y2,
        k,
        q1,
        q2,
        ell,
        a1,
        a2,
        a_ratio,
        det: q1 * q2 * ell,
        cosets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_parsing() {
        assert_eq!("10".parse::<Radius>().unwrap(), Radius { num: 10, den: 1 });
        assert_eq!(
            "21/2".parse::<Radius>().unwrap(),
            Radius { num: 21, den: 2 }
        );
        assert!("x".parse::<Radius>().is_err());
        assert!("3/0".parse::<Radius>().is_err());
        assert!(Radius::new(3, 1).unwrap().admits_norm_sq(9));
        assert!(!Radius::new(3, 1).unwrap().admits_norm_sq(10));
        assert!(Radius::new(7, 2).unwrap().admits_norm_sq(12)); // 12 <= 49/4
    }

    #[test]
    fn congruence_lattice_examples() {
        let z2 = lattice_from_congruence(1, 0).unwrap();
        assert_eq!(z2.det(), 1);
        let (_, m) = gauss_reduce(&z2).unwrap();
        assert_eq!((m.norm1_sq, m.norm2_sq), (1, 1));

        let l5 = lattice_from_congruence(5, 2).unwrap();
        assert_eq!(l5.det(), 5);
        let (_, m) = gauss_reduce(&l5).unwrap();
        assert_eq!(m.norm1_sq, 5);
        assert_eq!(m.v1, (1, 2));

        let l7 = lattice_from_congruence(7, 0).unwrap();
        let (_, m) = gauss_reduce(&l7).unwrap();
        assert_eq!(m.norm1_sq, 1);
        assert_eq!(m.v1, (1, 0));

        assert!(lattice_from_congruence(0, 0).is_err());
    }

    #[test]
    fn gauss_reduce_examples() {
        let lat = Lattice2D::new((1, 2), (0, 5)).unwrap();
        let (red, m) = gauss_reduce(&lat).unwrap();
        assert_eq!(red.det(), 5);
        assert_eq!((m.norm1_sq, m.norm2_sq), (5, 5));
        assert_eq!((m.v1, m.v2), ((1, 2), (2, -1)));

        // reduction reaches lambda1 = 1; the tie-break rule picks (0, 1)
        // among the norm-1 vectors
        let lat = Lattice2D::new((100, 1), (99, 1)).unwrap();
        let (_, m) = gauss_reduce(&lat).unwrap();
        assert_eq!(m.norm1_sq, 1);
        assert_eq!(m.v1, (0, 1));

        assert!(Lattice2D::new((2, 4), (1, 2)).is_err());
    }

    #[test]
    fn gauss_reduce_matches_brute_force_minima() {
        // deterministic xorshift stream for reproducible random bases
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut tried = 0;
        while tried < 200 {
            let b1 = ((next() % 41) as i64 - 20, (next() % 41) as i64 - 20);
            let b2 = ((next() % 41) as i64 - 20, (next() % 41) as i64 - 20);
            let Ok(lat) = Lattice2D::new(b1, b2) else {
                continue;
            };
            tried += 1;
            let (red, m) = gauss_reduce(&lat).unwrap();
            assert_eq!(red.det(), lat.det());
            // brute-force shortest vectors over a generous coefficient box
            let mut best1 = u128::MAX;
            for i in -40i64..=40 {
                for j in -40i64..=40 {
                    if (i, j) == (0, 0) {
                        continue;
                    }
                    let v = (i * b1.0 + j * b2.0, i * b1.1 + j * b2.1);
                    best1 = best1.min(norm_sq(v));
                }
            }
            assert_eq!(m.norm1_sq, best1, "lattice {lat:?}");
            let det = red.det() as u128;
            assert!(det * det <= m.norm1_sq * m.norm2_sq);
            assert!(3 * m.norm1_sq * m.norm2_sq <= 4 * det * det);
        }
    }

    #[test]
    fn count_points_examples() {
        let z2 = lattice_from_congruence(1, 0).unwrap();
        let n = count_points(&z2, Radius::new(10, 1).unwrap(), None).unwrap();
        assert_eq!(n, 317);

        // radius below lambda1 leaves only the origin
        let l5 = lattice_from_congruence(5, 2).unwrap();
        let n = count_points(&l5, Radius::new(2, 1).unwrap(), None).unwrap();
        assert_eq!(n, 1);

        assert!(matches!(
            count_points(&z2, Radius::new(1_000_000, 1).unwrap(), Some(100)),
            Err(Error::WorkBudgetExceeded { .. })
        ));
    }

    #[test]
    fn count_points_matches_congruence_scan() {
        // direct scan of the disc, filtered by the congruence
        for (ell, b, r) in [(5u64, 2u64, 10u64), (7, 3, 12), (12, 5, 20), (9, 0, 15)] {
            let lat = lattice_from_congruence(ell, b).unwrap();
            let fast = count_points(&lat, Radius::new(r, 1).unwrap(), None).unwrap();
            let mut direct = 0u64;
            let ri = r as i64;
            for x in -ri..=ri {
                for y in -ri..=ri {
                    if x * x + y * y <= ri * ri && (y - (b as i64) * x).rem_euclid(ell as i64) == 0
                    {
                        direct += 1;
                    }
                }
            }
            assert_eq!(fast, direct, "ell={ell} b={b} r={r}");
        }
    }

    #[test]
    fn count_points_shifted_coset() {
        let lat = Lattice2D {
            b1: (3, 0),
            b2: (0, 3),
            shift: Some((1, 1)),
        };
        let fast = count_points(&lat, Radius::new(10, 1).unwrap(), None).unwrap();
        let mut direct = 0u64;
        for x in -12i64..=12 {
            for y in -12i64..=12 {
                if x * x + y * y <= 100 && (x - 1).rem_euclid(3) == 0 && (y - 1).rem_euclid(3) == 0
                {
                    direct += 1;
                }
            }
        }
        assert_eq!(fast, direct);
    }

    #[test]
    fn cube_roots_examples() {
        assert_eq!(cube_roots_mod(1, 7).unwrap(), vec![1, 2, 4]);
        assert_eq!(cube_roots_mod(2, 5).unwrap(), vec![3]);
        assert_eq!(cube_roots_mod(0, 3).unwrap(), vec![0]);
        assert!(cube_roots_mod(1, 4).is_err());
        assert!(cube_roots_mod(1, 9).is_err());
    }

    #[test]
    fn cube_roots_match_scan_to_1000() {
        for q in (1..=1000u64).step_by(2) {
            if !arith::is_squarefree_u64(q) {
                continue;
            }
            for a in 0..q.min(60) {
                let got = cube_roots_mod(a, q).unwrap();
                let expect: Vec<u64> = (0..q)
                    .filter(|&x| arith::mul_mod(arith::mul_mod(x, x, q), x, q) == a % q)
                    .collect();
                assert_eq!(got, expect, "a={a} q={q}");
                let omega = arith::factorize(q).len() as u32;
                assert!(got.len() <= 3usize.pow(omega));
            }
        }
    }

    #[test]
    fn lattice_system_trivial() {
        let sys = lattice_system(1, 1, 1).unwrap();
        assert_eq!(sys.det, 1);
        assert_eq!(sys.cosets.len(), 1);
        for w1 in 0..5 {
            for w2 in 0..5 {
                assert!(sys.member(w1, w2));
            }
        }
    }

    #[test]
    fn lattice_system_toy_ell7() {
        // q1 = q2 = 1, ell = 7: at most 3 det-7 lattices; membership
        // must match the direct congruence scan on coprime pairs
        let sys = lattice_system(2, 1, 7).unwrap();
        assert_eq!((sys.q1, sys.q2, sys.ell), (1, 1, 7));
        assert!(sys.cosets.len() <= 3);
        for c in &sys.cosets {
            assert_eq!(c.to_lattice().det(), 7);
        }
        for w1 in 0..7u64 {
            for w2 in 0..7u64 {
                if arith::gcd_u64(w1, w2) != 1 {
                    continue;
                }
                assert_eq!(
                    sys.member(w1, w2),
                    sys.congruences_hold(w1, w2),
                    "({w1},{w2})"
                );
            }
        }
    }

    #[test]
    fn lattice_system_rejects_shared_kernel() {
        // kernel(y1) = 3 and kernel(k) = 3 share a prime
        assert!(matches!(
            lattice_system(3, 2, 9),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            lattice_system(6, 9, 5),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn coset_to_lattice_membership_agrees() {
        let sys = lattice_system(5, 3, 14).unwrap();
        let m = sys.det;
        for c in &sys.cosets {
            let lat = c.to_lattice();
            assert_eq!(lat.det(), m);
            for w1 in 0..2 * m {
                for w2 in 0..2 * m {
                    assert_eq!(
                        c.contains(w1, w2),
                        lat.contains((w1 as i64, w2 as i64)),
                        "({w1},{w2})"
                    );
                }
            }
        }
    }

    #[test]
    fn coset_shift_normalizes_into_box() {
        let sys = lattice_system(5, 3, 14).unwrap();
        let (w_lo, w_hi) = (400u64, 1600u64); // [W, 4W) for W = 400
        for c in &sys.cosets {
            let lat = c.to_lattice_in_range(w_lo, w_hi).unwrap();
            let (c1, c2) = lat.shift.unwrap();
            assert!((w_lo as i64..w_hi as i64).contains(&c1));
            assert!((w_lo as i64..w_hi as i64).contains(&c2));
            // translation by lattice vectors leaves the point set alone
            for w1 in 0..2 * sys.det {
                for w2 in 0..2 * sys.det {
                    assert_eq!(c.contains(w1, w2), lat.contains((w1 as i64, w2 as i64)));
                }
            }
            assert!(c.to_lattice_in_range(0, 3).is_err());
        }
    }

    #[test]
    fn system_min_lambda1_is_minimum_over_cosets() {
        // a_ratio = 1 is a cube mod 7, so this system has three cosets
        let sys = lattice_system(1, 1, 7).unwrap();
        assert_eq!(sys.cosets.len(), 3);
        let best = sys.min_lambda1().unwrap();
        for c in &sys.cosets {
            let (_, m) = gauss_reduce(&c.to_lattice()).unwrap();
            assert!(best.norm1_sq <= m.norm1_sq);
        }
        // an empty system (non-cube target) has no minima to take
        let empty = lattice_system(2, 1, 7).unwrap();
        assert!(empty.cosets.is_empty());
        assert!(empty.min_lambda1().is_none());
    }
}
