//! Theoretical moment exponents across g and k, the case boundaries,
//! and the balancing window size Z = X^{3/(2g+2)}.
//!
//! Run: `cargo run --example exponent_tables`

use quadclass::moments::{optimal_z, theoretical_exponent};

fn main() {
    println!("exponent sigma with sum h_g^k << X^(sigma + eps):");
    print!("{:>5}", "k\\g");
    let gs = [3u64, 5, 7, 11];
    for g in gs {
        print!("{:>14}", g);
    }
    println!();
    for k10 in (10..=80).step_by(5) {
        let k = k10 as f64 / 10.0;
        print!("{k:>5.1}");
        for g in gs {
            let (sigma, case) = theoretical_exponent(g, k).unwrap();
            print!(
                "{:>9.4} {:<4}",
                sigma,
                case.to_string().replace("sigma", "s").replace("g3_", "")
            );
        }
        println!();
    }

    println!("\ncase boundaries for g >= 5: k1 = (g^2-1)/(2g-1), k2 = g+1");
    for g in [5u64, 7, 11] {
        let gf = g as f64;
        let k1 = (gf * gf - 1.0) / (2.0 * gf - 1.0);
        println!("  g = {g:>2}: k1 = {k1:.4}, k2 = {}", g + 1);
    }

    println!("\nbalancing window Z = X^(3/(2g+2)):");
    for g in [3u64, 5, 7] {
        for x in [1u64 << 8, 1 << 12, 1_000_000] {
            println!("  g = {g}, X = {x:>8}: Z = {}", optimal_z(x, g).unwrap());
        }
    }
}
