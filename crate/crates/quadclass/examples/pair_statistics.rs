//! The pair-correlation sum T_g = sum R(R-1) with its breakdown: the
//! shared-prime part T0, the stratification by delta = gcd(v1, v2), and
//! the replay of a coprime pair into its coset-lattice system.
//!
//! Run: `cargo run --example pair_statistics`

use quadclass::lattice::lattice_system;
use quadclass::repcount::t_g;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn main() {
    let (x, z) = (4_000u64, 16u64);
    let report = t_g(x, z, 3, 200_000_000).expect("within budget");
    println!("T_3 over [{}, {}) with Z = {}:", x, 2 * x, z);
    println!("  sum R           = {}", report.sum_r);
    println!("  sum R(R-1)      = {}", report.sum_rr1);
    println!("  enumerated pairs = {} (must match)", report.pair_count);
    println!("  T0 (shared w-prime pairs) = {}", report.t0);
    for (&delta, &count) in &report.t_delta {
        println!("  T_3(delta = {delta}) = {count}");
    }
    println!(
        "  d with R >= 1: {:?}",
        &report.per_d[..report.per_d.len().min(8)]
    );

    // replay one coprime-w pair through its congruence lattice system
    let mut by_d: std::collections::BTreeMap<u64, Vec<_>> = Default::default();
    for w in &report.witnesses {
        by_d.entry(w.d).or_default().push(*w);
    }
    'outer: for wits in by_d.values() {
        for t1 in wits {
            for t2 in wits {
                if (t1.u, t1.v, t1.w) == (t2.u, t2.v, t2.w) || gcd(t1.w, t2.w) != 1 {
                    continue;
                }
                let delta = gcd(t1.v, t2.v);
                let (y1, y2) = (t1.v / delta, t2.v / delta);
                let k = (y2 as u128 * t1.u + y1 as u128 * t2.u) as u64;
                let sys = lattice_system(y1, y2, k).expect("genuine pair");
                println!(
                    "\npair at d = {}: (w1, w2) = ({}, {}), delta = {delta}, (y1, y2, k) = ({y1}, {y2}, {k})",
                    t1.d, t1.w, t2.w
                );
                println!(
                    "  kernels (q1, q2, ell) = ({}, {}, {}), {} coset(s) of determinant {}",
                    sys.q1,
                    sys.q2,
                    sys.ell,
                    sys.cosets.len(),
                    sys.det
                );
                println!("  pair lies in a coset: {}", sys.member(t1.w, t2.w));
                if let Some(best) = sys.min_lambda1() {
                    println!(
                        "  smallest first minimum over the cosets: lambda1 = {:.3} at {:?}",
                        best.lambda1, best.v1
                    );
                }
                break 'outer;
            }
        }
    }
}
