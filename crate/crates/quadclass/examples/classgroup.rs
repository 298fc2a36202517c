//! Enumerate class groups of imaginary quadratic fields and read off
//! class numbers, elementary divisors, and g-part columns.
//!
//! Run: `cargo run --example classgroup`

use quadclass::quadforms::{compose, enumerate_class_group, fundamental_discriminant};

fn main() {
    println!(
        "{:>6} {:>8} {:>5}  {:<12} {:>10} {:>8}",
        "d", "delta", "h", "divisors", "h3_tors", "h3_syl"
    );
    for d in [1u64, 5, 23, 47, 71, 89, 101, 149, 1871, 3299, 4027] {
        let disc = fundamental_discriminant(d).expect("square-free");
        let group = enumerate_class_group(disc.delta()).expect("fundamental");
        let p3 = group.g_part(3).expect("odd prime");
        println!(
            "{:>6} {:>8} {:>5}  {:<12} {:>10} {:>8}",
            d,
            disc.delta(),
            group.h,
            format!("{:?}", group.divisors),
            p3.torsion_count,
            p3.sylow_order,
        );
    }

    // the group law in action: the order-3 class group of delta = -23
    let delta = -23;
    let group = enumerate_class_group(delta).unwrap();
    println!("\ncomposition table for delta = {delta} (h = {}):", group.h);
    for &f in &group.forms {
        for &g in &group.forms {
            let fg = compose(f, g, delta).unwrap();
            println!(
                "  ({},{},{}) * ({},{},{}) = ({},{},{})",
                f.a, f.b, f.c, g.a, g.b, g.c, fg.a, fg.b, fg.c
            );
        }
    }
}
