//! Quadratic characters over prime windows: split primes, window
//! character sums M(d; Z), and the exceptional set of discriminants
//! with abnormally large sums.
//!
//! Run: `cargo run --example character_windows`

use quadclass::sieve::{character_sum_m, chi, exceptional_set, prime_window, split_primes};

fn main() {
    let z = 30;
    let window = prime_window(z).unwrap();
    println!("prime window [{}, {}): {:?}", z, 2 * z, window.primes);

    for d in [1u64, 3, 10, 23, 55] {
        let split = split_primes(d, z).unwrap();
        let m = character_sum_m(d, z).unwrap();
        let values: Vec<i8> = window.primes.iter().map(|&p| chi(d, p).unwrap()).collect();
        println!(
            "d = {d:>3}: chi over window = {values:?}  M = {:>3}  split = {split:?}",
            m.value
        );
    }

    // the exceptional set at desk scale: membership is exact, and the
    // cardinality is recorded (the asymptotic smallness claim only bites
    // far beyond desk scale)
    let set = exceptional_set(100, 10_000).unwrap();
    println!(
        "\nE(Z=100; X=10^4): {} exceptional d of {} square-free in [10^4, 2*10^4), threshold |M| >= {:.3}",
        set.members.len(),
        set.sums.len(),
        set.threshold
    );
    println!(
        "first few members: {:?}",
        &set.members[..set.members.len().min(10)]
    );
}
