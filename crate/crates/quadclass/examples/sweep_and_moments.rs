//! Sweep class-group data over a range, then aggregate: the 3-torsion
//! average over fundamental discriminants, moment sums, tail counts
//! N_g(H; X), and the dyadic majorant.
//!
//! Run: `cargo run --example sweep_and_moments`

use quadclass::moments::{
    dh_average, dyadic_moment, dyadic_tails, moment_report, moment_sum, sweep, Column, DiscMode,
};

fn main() {
    let cap = 100_000;
    eprintln!("sweeping square-free d in [1, {cap}) ...");
    let table = sweep(1, cap, &[3], 0).expect("sweep");
    println!("{} rows", table.rows.len());

    // the 3-torsion average over fundamental discriminants climbs
    // toward 2 from below
    for x in [1_000u64, 10_000, 100_000] {
        println!(
            "average 3-torsion over |delta| < {x:>6}: {:.4}",
            dh_average(&table, x).unwrap()
        );
    }

    // moments of the torsion column in both range conventions
    for k in [1.0, 2.0] {
        let sf = moment_sum(&table, 3, k, Column::Torsion, DiscMode::SquarefreeD, cap).unwrap();
        let fd = moment_sum(
            &table,
            3,
            k,
            Column::Torsion,
            DiscMode::FundamentalDisc,
            cap,
        )
        .unwrap();
        println!("sum h3^{k} below {cap}: square-free mode {sf:.0}, fundamental mode {fd:.0}");
    }

    // tail counts and the dyadic majorant at X = 10^4
    let x = 10_000;
    let tails = dyadic_tails(&table, 3, x, Column::Torsion, DiscMode::SquarefreeD).unwrap();
    for t in &tails {
        println!("N_3(H = {:>2}; X = {x}) = {}", t.h_threshold, t.count);
    }
    println!(
        "dyadic majorant at k = 4: {:.0}",
        dyadic_moment(&tails, 4.0)
    );

    // fitted versus theoretical exponent for the first moment
    let report = moment_report(
        &table,
        3,
        1.0,
        Column::Torsion,
        DiscMode::SquarefreeD,
        &[1_000, 10_000, 100_000],
    )
    .unwrap();
    println!(
        "first-moment fit: slope {:.4} (theoretical exponent {:.4}, case {})",
        report.fitted_exponent, report.theoretical_exponent, report.case
    );
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
