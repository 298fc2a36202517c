//! Representation counting: S_g(d; Z) pair counts with witnesses, the
//! triple counts R_g(d; Z), square-root classes M(w; v), and the window
//! count N(Z, X; V0) computed by both strategies.
//!
//! Run: `cargo run --example representations`

use quadclass::repcount::{m_solve, n_count, r_g, s_g_direct, u_interval, Strategy, WindowParams};

fn main() {
    // pair counts with witnesses over a small grid
    let (z, g) = (5, 3);
    println!("S_{g}(d; {z}) over d in [50, 100):");
    for d in 50..100u64 {
        let Ok(count) = s_g_direct(d, z, g) else {
            continue;
        };
        if count.unordered_pairs == 0 {
            continue;
        }
        println!(
            "  d = {d}: {} ordered pairs, witnesses {:?}",
            count.ordered_pairs,
            count
                .witnesses
                .iter()
                .map(|w| (w.p, w.p_prime, w.u, w.v))
                .collect::<Vec<_>>()
        );
    }

    // square-root classes modulo v^2
    println!("\nM(w; v): u^2 = 4 w^3 (mod v^2)");
    for (w, v) in [(1u64, 3u64), (5, 3), (7, 12), (11, 20)] {
        println!("  w = {w:>2}, v = {v:>2}: {:?}", m_solve(w, v, 3).unwrap());
    }

    // the short interval around 2 w^{3/2} and the two N strategies
    let params = WindowParams::new(10_000, 10, 3).unwrap();
    println!(
        "\nwindow parameters: W = {}, U = {}, V = {:.1}",
        params.w_lo,
        params.u_bound,
        params.v_bound()
    );
    let (lo, hi) = u_interval(150, 1, &params).unwrap();
    println!(
        "I_w for w = 150, V0 = 1: [{lo}, {hi}] around 2*150^(3/2) = {:.1}",
        2.0 * 150f64.powf(1.5)
    );
    for v0 in [1u64, 4, 16, 64] {
        let direct = n_count(&params, v0, Strategy::Direct, None).unwrap();
        let cong = n_count(&params, v0, Strategy::Congruence, None).unwrap();
        assert_eq!(direct.count, cong.count);
        println!(
            "  N(Z=10, X=10^4; V0={v0:>2}) = {} (both strategies)",
            direct.count
        );
    }

    // triples counted by R_g
    let params = WindowParams::new(5_000, 10, 3).unwrap();
    println!("\nR_3(d; 10) over d in [5000, 5100):");
    for d in 5_000..5_100u64 {
        let (count, wits) = r_g(d, &params).unwrap();
        if count > 0 {
            println!(
                "  d = {d}: {count} triples, first (w, u, v) = {:?}",
                wits.first().map(|t| (t.w, t.u, t.v)).unwrap()
            );
        }
    }
}
