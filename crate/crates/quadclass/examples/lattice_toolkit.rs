//! Rank-2 lattice machinery: congruence lattices, Lagrange-Gauss
//! reduction with successive minima, exact point counts in discs, and
//! cube roots modulo odd square-free numbers.
//!
//! Run: `cargo run --example lattice_toolkit`

use quadclass::lattice::{
    count_points, cube_roots_mod, gauss_reduce, lattice_from_congruence, Lattice2D, Radius,
};

fn main() {
    // z2 = b z1 (mod ell) as a determinant-ell lattice
    for (ell, b) in [(5u64, 2u64), (7, 0), (12, 5)] {
        let lat = lattice_from_congruence(ell, b).unwrap();
        let (reduced, minima) = gauss_reduce(&lat).unwrap();
        println!(
            "z2 = {b} z1 (mod {ell}): det {} reduced basis {:?},{:?}  lambda = ({:.3}, {:.3}) at {:?},{:?}",
            reduced.det(),
            reduced.b1,
            reduced.b2,
            minima.lambda1,
            minima.lambda2,
            minima.v1,
            minima.v2
        );
    }

    // exact disc counts, including a coset translate
    let z2 = lattice_from_congruence(1, 0).unwrap();
    for r in [1u64, 2, 5, 10, 100] {
        let n = count_points(&z2, Radius::new(r, 1).unwrap(), None).unwrap();
        println!("lattice points of Z^2 with |z| <= {r:>3}: {n}");
    }
    let shifted = Lattice2D {
        b1: (3, 0),
        b2: (0, 3),
        shift: Some((1, 1)),
    };
    let n = count_points(&shifted, Radius::new(10, 1).unwrap(), None).unwrap();
    println!("points of (1,1) + 3Z^2 with |z| <= 10: {n}");

    // Minkowski bracket: det <= l1 l2 <= (2/sqrt 3) det, exactly
    let lat = Lattice2D::new((13, 4), (-2, 9)).unwrap();
    let (_, m) = gauss_reduce(&lat).unwrap();
    let det = lat.det() as u128;
    println!(
        "\ndet = {det}: det^2 = {} <= l1^2 l2^2 = {} <= (4/3) det^2 = {:.1}",
        det * det,
        m.norm1_sq * m.norm2_sq,
        4.0 * (det * det) as f64 / 3.0
    );

    // cube roots modulo odd square-free q
    println!();
    for (a, q) in [(1u64, 7u64), (2, 5), (0, 3), (10, 105), (8, 91)] {
        println!("x^3 = {a} (mod {q}): {:?}", cube_roots_mod(a, q).unwrap());
    }
}
