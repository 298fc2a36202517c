//! Sweeps of class-group data over ranges of square-free `d`, and the
//! statistics built on them: moment sums of the g-part columns, tail
//! counts `N_g(H; X)`, dyadic majorants, theoretical moment exponents,
//! least-squares exponent fits, and the 3-torsion average over
//! fundamental discriminants.

use crate::quadforms;
use crate::sieve;
use crate::{Error, Result};
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

/// Which g-part column an aggregation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    /// Number of classes killed by `g` (the column the 3-torsion
    /// average is stated for).
    Torsion,
    /// Order of the Sylow g-subgroup.
    Sylow,
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torsion" => Ok(Column::Torsion),
            "sylow" => Ok(Column::Sylow),
            _ => Err(Error::InvalidParameter(format!("unknown column {s:?}"))),
        }
    }
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Column::Torsion => "torsion",
            Column::Sylow => "sylow",
        })
    }
}

/// Whether an aggregation ranges over square-free `d` or over
/// fundamental discriminants `|delta|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscMode {
    SquarefreeD,
    FundamentalDisc,
}

impl FromStr for DiscMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squarefree" => Ok(DiscMode::SquarefreeD),
            "fundamental" => Ok(DiscMode::FundamentalDisc),
            _ => Err(Error::InvalidParameter(format!(
                "unknown discriminant mode {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for DiscMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiscMode::SquarefreeD => "squarefree",
            DiscMode::FundamentalDisc => "fundamental",
        })
    }
}

/// One sweep row: `(d, delta, h)` plus `(torsion, sylow)` per requested g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub d: u64,
    pub delta: i64,
    pub h: u64,
    pub gparts: Vec<(u64, u64)>,
}

/// Class-group data for every square-free `d` in `[x_lo, x_hi)`,
/// sorted by `d`.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub x_lo: u64,
    pub x_hi: u64,
    pub g_list: Vec<u64>,
    pub rows: Vec<SweepRow>,
}

/// Sweeps class-group data for all square-free `d` in `[x_lo, x_hi)`.
/// `jobs = 0` uses the global thread pool.
pub fn sweep(x_lo: u64, x_hi: u64, g_list: &[u64], jobs: usize) -> Result<SweepTable> {
    if x_lo < 1 || x_lo >= x_hi {
        return Err(Error::InvalidRange { lo: x_lo, hi: x_hi });
    }
    for &g in g_list {
        if g < 3 || g % 2 == 0 || !crate::arith::is_prime_u64(g) {
            return Err(Error::NotOddPrime(g));
        }
    }
    let ds = sieve::squarefree_range(x_lo, x_hi)?;
    let mut deltas_abs = Vec::with_capacity(ds.len());
    let mut deltas = Vec::with_capacity(ds.len());
    for &d in &ds {
        let delta = if d % 4 == 3 {
            -(d as i64)
        } else {
            -(4 * d as i64)
        };
        deltas.push(delta);
        deltas_abs.push(delta.unsigned_abs());
    }
    let bulk = quadforms::bulk_class_data(&deltas_abs, g_list, jobs);
    let rows = ds
        .iter()
        .zip(deltas)
        .zip(bulk)
        .map(|((&d, delta), row)| SweepRow {
            d,
            delta,
            h: row.h,
            gparts: row.gparts,
        })
        .collect();
    Ok(SweepTable {
        x_lo,
        x_hi,
        g_list: g_list.to_vec(),
        rows,
    })
}

impl SweepTable {
    fn g_index(&self, g: u64) -> Result<usize> {
        self.g_list.iter().position(|&x| x == g).ok_or_else(|| {
            Error::CoverageGap(format!("g = {g} not in the swept g list {:?}", self.g_list))
        })
    }

    /// Checks the table covers `[lo, hi)` in `d` with exactly the
    /// square-free integers present, in order.
    pub fn check_coverage(&self, lo: u64, hi: u64) -> Result<()> {
        if self.x_lo > lo || self.x_hi < hi {
            return Err(Error::CoverageGap(format!(
                "table covers [{}, {}) but [{lo}, {hi}) is required",
                self.x_lo, self.x_hi
            )));
        }
        let expect = sieve::squarefree_range(self.x_lo, self.x_hi)?;
        if expect.len() != self.rows.len()
            || self.rows.iter().zip(&expect).any(|(row, &d)| row.d != d)
        {
            return Err(Error::CoverageGap(
                "rows do not match the square-free sieve".into(),
            ));
        }
        Ok(())
    }

    fn magnitude(&self, row: &SweepRow, mode: DiscMode) -> u64 {
        match mode {
            DiscMode::SquarefreeD => row.d,
            DiscMode::FundamentalDisc => row.delta.unsigned_abs(),
        }
    }

    fn column_value(&self, row: &SweepRow, gi: usize, column: Column) -> u64 {
        match column {
            Column::Torsion => row.gparts[gi].0,
            Column::Sylow => row.gparts[gi].1,
        }
    }

    /// CSV header: `d,delta,h` then `h{g}_torsion,h{g}_sylow` per g.
    pub fn csv_header(&self) -> String {
        let mut header = String::from("d,delta,h");
        for &g in &self.g_list {
            header.push_str(&format!(",h{g}_torsion,h{g}_sylow"));
        }
        header
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|t| t.as_secs())
            .unwrap_or(0);
        writeln!(
            out,
            "# quadclass sweep range_lo={} range_hi={} g={}",
            self.x_lo,
            self.x_hi,
            self.g_list
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )?;
        writeln!(out, "# generated={stamp}")?;
        writeln!(out, "{}", self.csv_header())?;
        for row in &self.rows {
            write!(out, "{},{},{}", row.d, row.delta, row.h)?;
            for &(t, s) in &row.gparts {
                write!(out, ",{t},{s}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load_csv(path: &Path) -> Result<SweepTable> {
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        let mut x_lo = 0u64;
        let mut x_hi = 0u64;
        let mut g_list: Vec<u64> = Vec::new();
        let mut rows = Vec::new();
        let mut saw_header = false;
        for line in reader.lines() {
            let line = line?;
            if let Some(meta) = line.strip_prefix('#') {
                for token in meta.split_whitespace() {
                    if let Some(v) = token.strip_prefix("range_lo=") {
                        x_lo = v.parse().map_err(|_| bad_csv("range_lo"))?;
                    } else if let Some(v) = token.strip_prefix("range_hi=") {
                        x_hi = v.parse().map_err(|_| bad_csv("range_hi"))?;
                    } else if let Some(v) = token.strip_prefix("g=") {
                        g_list = v
                            .split(',')
                            .map(|t| t.parse().map_err(|_| bad_csv("g list")))
                            .collect::<Result<_>>()?;
                    }
                }
                continue;
            }
            if !saw_header {
                saw_header = true; // column header
                continue;
            }
            let mut it = line.split(',');
            let mut next = || it.next().ok_or_else(|| bad_csv("row arity"));
            let d: u64 = next()?.parse().map_err(|_| bad_csv("d"))?;
            let delta: i64 = next()?.parse().map_err(|_| bad_csv("delta"))?;
            let h: u64 = next()?.parse().map_err(|_| bad_csv("h"))?;
            let mut gparts = Vec::with_capacity(g_list.len());
            for _ in 0..g_list.len() {
                let t: u64 = next()?.parse().map_err(|_| bad_csv("torsion"))?;
                let s: u64 = next()?.parse().map_err(|_| bad_csv("sylow"))?;
                gparts.push((t, s));
            }
            rows.push(SweepRow {
                d,
                delta,
                h,
                gparts,
            });
        }
        if x_lo == 0 || x_hi == 0 || g_list.is_empty() {
            return Err(bad_csv("missing metadata line"));
        }
        let table = SweepTable {
            x_lo,
            x_hi,
            g_list,
            rows,
        };
        table.check_coverage(table.x_lo, table.x_hi)?;
        Ok(table)
    }
}

fn bad_csv(what: &str) -> Error {
    Error::CoverageGap(format!("malformed sweep CSV: {what}"))
}

/// Sweeps `[x_lo, x_hi)`, resuming from a previously saved table at
/// `path` when one is present (the existing rows are kept and only the
/// missing upper range is computed). The result is saved back to `path`.
pub fn sweep_resume(
    path: &Path,
    x_lo: u64,
    x_hi: u64,
    g_list: &[u64],
    jobs: usize,
) -> Result<SweepTable> {
    let mut table = match SweepTable::load_csv(path) {
        Ok(existing) if existing.x_lo == x_lo && existing.g_list == g_list => existing,
        _ => sweep(x_lo, x_lo + 1, g_list, jobs).map(|mut t| {
            t.rows.clear();
            t.x_hi = x_lo;
            t
        })?,
    };
    if table.x_hi < x_hi {
        let extension = sweep(table.x_hi.max(x_lo), x_hi, g_list, jobs)?;
        table.rows.extend(extension.rows);
        table.x_hi = x_hi;
    }
    table.save_csv(path)?;
    Ok(table)
}

/// `sum_{0 < d < X} h_g(-d)^k` for integer `k`, exactly.
pub fn moment_sum_exact(
    table: &SweepTable,
    g: u64,
    k: u32,
    column: Column,
    mode: DiscMode,
    x: u64,
) -> Result<u128> {
    table.check_coverage(1, x)?;
    let gi = table.g_index(g)?;
    let mut sum: u128 = 0;
    for row in &table.rows {
        if table.magnitude(row, mode) < x {
            sum += (table.column_value(row, gi, column) as u128).pow(k);
        }
    }
    Ok(sum)
}

/// `sum_{0 < d < X} h_g(-d)^k` for real `k >= 0`, via compensated
/// floating summation (relative error well below 1e-9 at desk scale;
/// exact-integer `k` agrees with `moment_sum_exact`).
pub fn moment_sum(
    table: &SweepTable,
    g: u64,
    k: f64,
    column: Column,
    mode: DiscMode,
    x: u64,
) -> Result<f64> {
    if k.is_nan() || k < 0.0 {
        return Err(Error::InvalidParameter("k must be >= 0".into()));
    }
    table.check_coverage(1, x)?;
    let gi = table.g_index(g)?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for row in &table.rows {
        if table.magnitude(row, mode) < x {
            let term = (table.column_value(row, gi, column) as f64).powf(k);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    Ok(sum)
}

/// Moment mass over the dyadic range `[X, 2X)` restricted to rows with
/// `h_g` strictly above `floor_exclusive`.
pub fn moment_sum_tail_range(
    table: &SweepTable,
    g: u64,
    k: f64,
    column: Column,
    mode: DiscMode,
    x: u64,
    floor_exclusive: u64,
) -> Result<f64> {
    table.check_coverage(1, 2 * x)?;
    let gi = table.g_index(g)?;
    let mut sum = 0.0;
    for row in &table.rows {
        let m = table.magnitude(row, mode);
        if (x..2 * x).contains(&m) {
            let v = table.column_value(row, gi, column);
            if v > floor_exclusive {
                sum += (v as f64).powf(k);
            }
        }
    }
    Ok(sum)
}

/// `N_g(H; X)`: the number of `d` in `[X, 2X)` with `h_g(-d) > H`
/// (strict).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCount {
    pub g: u64,
    pub h_threshold: f64,
    pub x: u64,
    pub count: u64,
}

pub fn tail_count(
    table: &SweepTable,
    g: u64,
    h_threshold: f64,
    x: u64,
    column: Column,
    mode: DiscMode,
) -> Result<TailCount> {
    table.check_coverage(1, 2 * x)?;
    let gi = table.g_index(g)?;
    let count = table
        .rows
        .iter()
        .filter(|row| {
            let m = table.magnitude(row, mode);
            (x..2 * x).contains(&m) && (table.column_value(row, gi, column) as f64) > h_threshold
        })
        .count() as u64;
    Ok(TailCount {
        g,
        h_threshold,
        x,
        count,
    })
}

/// Tail counts at `H = 1, 2, 4, ...` up to the largest `h_g` in range.
pub fn dyadic_tails(
    table: &SweepTable,
    g: u64,
    x: u64,
    column: Column,
    mode: DiscMode,
) -> Result<Vec<TailCount>> {
    table.check_coverage(1, 2 * x)?;
    let gi = table.g_index(g)?;
    let max_h = table
        .rows
        .iter()
        .filter(|row| (x..2 * x).contains(&table.magnitude(row, mode)))
        .map(|row| table.column_value(row, gi, column))
        .max()
        .unwrap_or(1);
    let mut tails = Vec::new();
    let mut h = 1u64;
    loop {
        tails.push(tail_count(table, g, h as f64, x, column, mode)?);
        if 2 * h >= max_h {
            break;
        }
        h *= 2;
    }
    Ok(tails)
}

/// The dyadic majorant `sum_H N_g(H; X) (2H)^k` over the tail list.
pub fn dyadic_moment(tails: &[TailCount], k: f64) -> f64 {
    tails
        .iter()
        .map(|t| t.count as f64 * (2.0 * t.h_threshold).powf(k))
        .sum()
}

/// Which case of the moment-exponent formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentCase {
    Sigma1,
    Sigma2,
    Sigma3,
    /// `g = 3`, `1 <= k <= 4`: interpolation against the fourth moment.
    G3Moment,
    /// `g = 3`, `k >= 4`: the pointwise-bound regime.
    G3Pointwise,
}

impl std::fmt::Display for ExponentCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExponentCase::Sigma1 => "sigma1",
            ExponentCase::Sigma2 => "sigma2",
            ExponentCase::Sigma3 => "sigma3",
            ExponentCase::G3Moment => "g3_moment",
            ExponentCase::G3Pointwise => "g3_pointwise",
        })
    }
}

/// Theoretical exponent `sigma` with `sum_{0<d<X} h_g(-d)^k << X^{sigma + eps}`.
///
/// For `g >= 5`: `sigma = max(sigma1, sigma2, sigma3)` with
/// `sigma1 = 1 + k (g-2)/(2g+2)`, `sigma2 = 1 + (k-1)(g-1)/(2g)`,
/// `sigma3 = k/2`, the cases switching at `k = (g^2-1)/(2g-1)` and
/// `k = g + 1`. For `g = 3`: `(5k+13)/18` on `1 <= k <= 4` and
/// `(2k+3)/6` beyond.
pub fn theoretical_exponent(g: u64, k: f64) -> Result<(f64, ExponentCase)> {
    if g < 3 || g.is_multiple_of(2) || !crate::arith::is_prime_u64(g) {
        return Err(Error::NotOddPrime(g));
    }
    if k.is_nan() || k < 1.0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if g == 3 {
        return Ok(if k <= 4.0 {
            ((5.0 * k + 13.0) / 18.0, ExponentCase::G3Moment)
        } else {
            ((2.0 * k + 3.0) / 6.0, ExponentCase::G3Pointwise)
        });
    }
    let gf = g as f64;
    let sigma1 = 1.0 + k * (gf - 2.0) / (2.0 * gf + 2.0);
    let sigma2 = 1.0 + (k - 1.0) * (gf - 1.0) / (2.0 * gf);
    let sigma3 = k / 2.0;
    let k1 = (gf * gf - 1.0) / (2.0 * gf - 1.0);
    let k2 = gf + 1.0;
    let sigma = sigma1.max(sigma2).max(sigma3);
    let case = if k <= k1 {
        ExponentCase::Sigma1
    } else if k <= k2 {
        ExponentCase::Sigma2
    } else {
        ExponentCase::Sigma3
    };
    Ok((sigma, case))
}

/// The balancing choice `Z = X^{3/(2g+2)}`, rounded to an integer; the
/// two balanced terms `X^{3/2} Z^{-1}` and `Z^g` stay within a factor
/// `2^g` of each other.
pub fn optimal_z(x: u64, g: u64) -> Result<u64> {
    if g < 3 || g.is_multiple_of(2) || !crate::arith::is_prime_u64(g) {
        return Err(Error::NotOddPrime(g));
    }
    if x < 2 {
        return Err(Error::InvalidParameter("X must be >= 2".into()));
    }
    let z = (x as f64)
        .powf(3.0 / (2.0 * g as f64 + 2.0))
        .round()
        .max(1.0) as u64;
    let lhs = 1.5 * (x as f64).ln() - (z as f64).ln();
    let rhs = g as f64 * (z as f64).ln();
    debug_assert!(
        (lhs - rhs).abs() <= g as f64 * std::f64::consts::LN_2 + 1e-9,
        "balancing audit failed for X={x}, g={g}"
    );
    Ok(z)
}

/// Ordinary least squares of `ln S` against `ln X`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} points, need at least 3",
            points.len()
        )));
    }
    if points.iter().any(|&(x, s)| x <= 0.0 || s <= 0.0) {
        return Err(Error::DegenerateFit("coordinates must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, s)| (x.ln(), s.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx < 1e-18 {
        return Err(Error::DegenerateFit("all X values coincide".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_abs_residual,
    })
}

/// Average of the 3-torsion count over fundamental discriminants of
/// absolute value below `x`; tends to 2 from below as `x` grows.
pub fn dh_average(table: &SweepTable, x: u64) -> Result<f64> {
    if x < 100 {
        return Err(Error::InvalidParameter("X must be >= 100".into()));
    }
    table.check_coverage(1, x)?;
    let gi = table.g_index(3)?;
    let mut sum = 0u128;
    let mut count = 0u64;
    for row in &table.rows {
        if row.delta.unsigned_abs() < x {
            sum += row.gparts[gi].0 as u128;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::CoverageGap(
            "no fundamental discriminants below X".into(),
        ));
    }
    Ok(sum as f64 / count as f64)
}

/// A grid of moment sums with fitted and theoretical exponents.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentReport {
    pub g: u64,
    pub k: f64,
    pub column: String,
    pub mode: String,
    pub grid: Vec<u64>,
    pub sums: Vec<f64>,
    pub fitted_exponent: f64,
    pub max_abs_residual: f64,
    pub theoretical_exponent: f64,
    pub case: String,
}

pub fn moment_report(
    table: &SweepTable,
    g: u64,
    k: f64,
    column: Column,
    mode: DiscMode,
    grid: &[u64],
) -> Result<MomentReport> {
    if grid.len() < 3 {
        return Err(Error::DegenerateFit("grid needs at least 3 points".into()));
    }
    let mut sums = Vec::with_capacity(grid.len());
    for &x in grid {
        sums.push(moment_sum(table, g, k, column, mode, x)?);
    }
    let points: Vec<(f64, f64)> = grid
        .iter()
        .zip(&sums)
        .map(|(&x, &s)| (x as f64, s))
        .collect();
    let fit = fit_exponent(&points)?;
    let (sigma, case) = theoretical_exponent(g, k)?;
    Ok(MomentReport {
        g,
        k,
        column: column.to_string(),
        mode: mode.to_string(),
        grid: grid.to_vec(),
        sums,
        fitted_exponent: fit.slope,
        max_abs_residual: fit.max_abs_residual,
        theoretical_exponent: sigma,
        case: case.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_table() -> SweepTable {
        sweep(1, 200, &[3, 5], 0).unwrap()
    }

    #[test]
    fn sweep_examples() {
        let t = sweep(1, 11, &[3], 0).unwrap();
        assert_eq!(t.rows.len(), 7);
        assert_eq!(t.rows[0].d, 1);
        assert_eq!(t.rows[0].delta, -4);
        assert_eq!(t.rows[0].h, 1);
        assert_eq!(t.rows[0].gparts[0], (1, 1));

        let t = small_table();
        let row23 = t.rows.iter().find(|r| r.d == 23).unwrap();
        assert_eq!(row23.h, 3);
        assert_eq!(row23.gparts[0].0, 3);
        assert!(sweep(5, 5, &[3], 0).is_err());
        assert!(sweep(1, 10, &[4], 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = small_table();
        assert_eq!(
            t.csv_header(),
            "d,delta,h,h3_torsion,h3_sylow,h5_torsion,h5_sylow"
        );
        let dir = std::env::temp_dir().join("quadclass-test-csv");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sweep.csv");
        t.save_csv(&path).unwrap();
        let back = SweepTable::load_csv(&path).unwrap();
        assert_eq!(back.x_lo, t.x_lo);
        assert_eq!(back.x_hi, t.x_hi);
        assert_eq!(back.g_list, t.g_list);
        assert_eq!(back.rows, t.rows);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn sweep_resume_extends() {
        let dir = std::env::temp_dir().join("quadclass-test-resume");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sweep.csv");
        let _ = std::fs::remove_file(&path);
        let first = sweep_resume(&path, 1, 100, &[3], 0).unwrap();
        assert_eq!(first.x_hi, 100);
        let extended = sweep_resume(&path, 1, 200, &[3], 0).unwrap();
        assert_eq!(extended.x_hi, 200);
        let fresh = sweep(1, 200, &[3], 0).unwrap();
        assert_eq!(extended.rows, fresh.rows);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn moment_sum_basics() {
        let t = small_table();
        // k = 0 counts the square-free d
        let count = moment_sum(&t, 3, 0.0, Column::Torsion, DiscMode::SquarefreeD, 100).unwrap();
        let sf = sieve::squarefree_range(1, 100).unwrap().len() as f64;
        assert_eq!(count, sf);
        assert_eq!(sf as usize, 61);

        // k = 1 agrees with a direct hand sum
        let s1 = moment_sum(&t, 3, 1.0, Column::Torsion, DiscMode::SquarefreeD, 100).unwrap();
        let direct: u64 = t
            .rows
            .iter()
            .filter(|r| r.d < 100)
            .map(|r| r.gparts[0].0)
            .sum();
        assert_eq!(s1, direct as f64);
        let exact =
            moment_sum_exact(&t, 3, 1, Column::Torsion, DiscMode::SquarefreeD, 100).unwrap();
        assert_eq!(exact as f64, s1);

        // monotone in k when all h_g >= 1
        let s2 = moment_sum(&t, 3, 2.0, Column::Torsion, DiscMode::SquarefreeD, 100).unwrap();
        assert!(s2 >= s1);

        // coverage gap detection
        assert!(moment_sum(&t, 3, 1.0, Column::Torsion, DiscMode::SquarefreeD, 500).is_err());
        assert!(moment_sum(&t, 7, 1.0, Column::Torsion, DiscMode::SquarefreeD, 100).is_err());
        let mut broken = t.clone();
        broken.rows.remove(10);
        assert!(broken.check_coverage(1, 100).is_err());
    }

    #[test]
    fn moment_log_convexity() {
        let t = small_table();
        let s: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&k| moment_sum(&t, 3, k, Column::Torsion, DiscMode::SquarefreeD, 150).unwrap())
            .collect();
        // Cauchy-Schwarz on the empirical measure: S(2)^2 <= S(1) S(3)
        assert!(s[1] * s[1] <= s[0] * s[2] * (1.0 + 1e-12));
    }

    #[test]
    fn tail_counts_and_telescoping() {
        let t = small_table();
        let x = 100;
        // H >= max h_g empties the tail; H = 0 catches every row
        let max_h = t
            .rows
            .iter()
            .filter(|r| (x..2 * x).contains(&r.d))
            .map(|r| r.gparts[0].0)
            .max()
            .unwrap();
        let none = tail_count(
            &t,
            3,
            max_h as f64,
            x,
            Column::Torsion,
            DiscMode::SquarefreeD,
        )
        .unwrap();
        assert_eq!(none.count, 0);
        let all = tail_count(&t, 3, 0.0, x, Column::Torsion, DiscMode::SquarefreeD).unwrap();
        let sf_range = sieve::squarefree_range(x, 2 * x).unwrap().len() as u64;
        assert_eq!(all.count, sf_range);

        // H = 1 picks out exactly the d whose class number 3 divides
        let h1 = tail_count(&t, 3, 1.0, x, Column::Torsion, DiscMode::SquarefreeD).unwrap();
        let by_divisibility = t
            .rows
            .iter()
            .filter(|r| (x..2 * x).contains(&r.d) && r.h % 3 == 0)
            .count() as u64;
        assert_eq!(h1.count, by_divisibility);

        // monotone non-increasing in H
        let tails = dyadic_tails(&t, 3, x, Column::Torsion, DiscMode::SquarefreeD).unwrap();
        for pair in tails.windows(2) {
            assert!(pair[1].count <= pair[0].count);
        }
        // telescoping: sum over dyadic H of (N(H) - N(2H)) = #{h > 1}
        let mut telescoped = 0i64;
        for (i, tail) in tails.iter().enumerate() {
            let next = tails.get(i + 1).map(|t| t.count).unwrap_or(0);
            telescoped += tail.count as i64 - next as i64;
        }
        assert_eq!(telescoped as u64, tails[0].count);
        // k = 0 majorant equals sum of ceil(log2 h_g) over the range
        let k0 = dyadic_moment(&tails, 0.0);
        let expect: u64 = t
            .rows
            .iter()
            .filter(|r| (x..2 * x).contains(&r.d))
            .map(|r| (r.gparts[0].0 as f64).log2().ceil() as u64)
            .sum();
        assert_eq!(k0, expect as f64);
    }

    #[test]
    fn dyadic_sandwich_at_pinned_parameters() {
        let t = small_table();
        let x = 100;
        let k = 4.0;
        let tails = dyadic_tails(&t, 3, x, Column::Torsion, DiscMode::SquarefreeD).unwrap();
        let majorant = dyadic_moment(&tails, k);
        let restricted =
            moment_sum_tail_range(&t, 3, k, Column::Torsion, DiscMode::SquarefreeD, x, 1).unwrap();
        assert!(restricted <= majorant + 1e-9);
        assert!(majorant <= 2f64.powf(k) * restricted + 1e-9);
        // all-h=1 boundary: the majorant counts nothing, the h=1 mass is
        // exactly the discrepancy against the unrestricted sum
        let h1_mass: f64 = t
            .rows
            .iter()
            .filter(|r| (x..2 * x).contains(&r.d) && r.gparts[0].0 == 1)
            .count() as f64;
        let unrestricted =
            moment_sum_tail_range(&t, 3, k, Column::Torsion, DiscMode::SquarefreeD, x, 0).unwrap();
        assert_eq!(unrestricted - restricted, h1_mass);
    }

    #[test]
    fn theoretical_exponent_values() {
        let (s, c) = theoretical_exponent(5, 1.0).unwrap();
        assert!((s - 1.25).abs() < 1e-15);
        assert_eq!(c, ExponentCase::Sigma1);
        let (s, _) = theoretical_exponent(5, 2.0).unwrap();
        assert!((s - 1.5).abs() < 1e-15);
        let (s, _) = theoretical_exponent(7, 1.0).unwrap();
        assert!((s - 21.0 / 16.0).abs() < 1e-15);
        // g = 3 goes through the dedicated table
        let (s, c) = theoretical_exponent(3, 4.0).unwrap();
        assert!((s - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(c, ExponentCase::G3Moment);
        let (s, _) = theoretical_exponent(3, 2.0).unwrap();
        assert!((s - 23.0 / 18.0).abs() < 1e-15);
        assert!(theoretical_exponent(5, 0.5).is_err());
        assert!(theoretical_exponent(4, 2.0).is_err());
    }

    #[test]
    fn theoretical_exponent_continuity() {
        for g in [5u64, 7, 11] {
            let gf = g as f64;
            for k in [(gf * gf - 1.0) / (2.0 * gf - 1.0), gf + 1.0] {
                let eps = 1e-9;
                let (lo, _) = theoretical_exponent(g, k - eps).unwrap();
                let (hi, _) = theoretical_exponent(g, k + eps).unwrap();
                assert!((lo - hi).abs() < 1e-8, "g={g} k={k}");
                let (at, _) = theoretical_exponent(g, k).unwrap();
                assert!((at - lo).abs() < 1e-8);
            }
        }
        // g = 3 table is continuous at k = 4
        let (a, _) = theoretical_exponent(3, 4.0 - 1e-12).unwrap();
        let (b, _) = theoretical_exponent(3, 4.0 + 1e-12).unwrap();
        assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn optimal_z_examples() {
        assert_eq!(optimal_z(1 << 12, 5).unwrap(), 8);
        assert_eq!(optimal_z(1 << 8, 3).unwrap(), 8);
        assert_eq!(optimal_z(1_000_000, 7).unwrap(), 13);
        assert!(optimal_z(1, 3).is_err());
    }

    #[test]
    fn fit_exponent_examples() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&x| (x, x * x)).collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = [2.0, 8.0, 64.0].iter().map(|&x| (x, 5.0 * x)).collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!(fit_exponent(&pts[..2]).is_err());
        assert!(fit_exponent(&[(3.0, 1.0), (3.0, 2.0), (3.0, 4.0)]).is_err());
    }

    #[test]
    fn dh_average_restricted_to_h1_is_one() {
        let t = small_table();
        let gi = 0;
        let h1_rows: Vec<_> = t.rows.iter().filter(|r| r.h == 1).collect();
        assert!(!h1_rows.is_empty());
        for r in h1_rows {
            assert_eq!(r.gparts[gi].0, 1);
        }
        let avg = dh_average(&t, 150).unwrap();
        assert!((1.0..2.0).contains(&avg));
        assert!(dh_average(&t, 50).is_err());
    }

    #[test]
    fn moment_report_shape() {
        let t = sweep(1, 2000, &[3], 0).unwrap();
        let report = moment_report(
            &t,
            3,
            1.0,
            Column::Torsion,
            DiscMode::SquarefreeD,
            &[100, 400, 1600],
        )
        .unwrap();
        assert_eq!(report.sums.len(), 3);
        assert!(report.fitted_exponent > 0.5 && report.fitted_exponent < 1.5);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"fitted_exponent\""));
    }
}
