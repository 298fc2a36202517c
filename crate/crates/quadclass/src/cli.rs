//! Command-line surface over the library: class-group queries, sweeps,
//! representation counts, pair statistics, lattice tools, moment
//! reports, and the verification suite.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid parameters,
//! 3 work-budget exhaustion.

use crate::lattice::{self, Radius};
use crate::moments::{self, Column, DiscMode};
use crate::quadforms;
use crate::repcount;
use crate::verify;
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

/// An exact fraction argument (`k` and similar accept `p/q`).
#[derive(Debug, Clone, Copy)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let r: Radius = s.parse().map_err(|e: Error| e.to_string())?;
        Ok(Fraction {
            num: r.num,
            den: r.den,
        })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "quadclass",
    about = "Class groups of imaginary quadratic fields: g-parts, representation counts, lattices, and moment statistics",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for output artifacts (CSV/JSON).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for sweeps (0 = all available).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Work budget for quadratic-cost enumerations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Class group of the field with radicand -d: h, elementary
    /// divisors, and g-part columns.
    Classgroup {
        #[arg(long)]
        d: u64,
        /// Odd primes g to report, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        g: Vec<u64>,
    },
    /// Sweep class-group data for all square-free d in [from, to).
    Sweep {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        g: Vec<u64>,
        /// Resume from an existing CSV at the output path.
        #[arg(long, default_value_t = false)]
        resume: bool,
    },
    /// Representation pair count S_g(d; Z) with witnesses.
    Repcount {
        #[arg(long)]
        d: u64,
        #[arg(long = "Z")]
        z: u64,
        #[arg(long)]
        g: u64,
    },
    /// Pair-correlation sum T_g over [X, 2X) with stratifications.
    Tg {
        #[arg(long = "X")]
        x: u64,
        #[arg(long = "Z")]
        z: u64,
        #[arg(long, default_value_t = 3)]
        g: u64,
    },
    /// Congruence lattice tools: reduction, minima, disc point count.
    Lattice {
        #[arg(long, conflicts_with = "basis")]
        ell: Option<u64>,
        #[arg(long, conflicts_with = "basis")]
        b: Option<u64>,
        /// Explicit JSON basis `[[a,b],[c,d]]` instead of a congruence.
        #[arg(long)]
        basis: Option<String>,
        /// Radius, a decimal integer or exact fraction p/q.
        #[arg(long)]
        radius: Radius,
    },
    /// Moment report: sums of h_g^k over a grid with exponent fits.
    Moments {
        #[arg(long)]
        g: u64,
        /// Moment order k, a decimal integer or exact fraction p/q.
        #[arg(long)]
        k: Fraction,
        /// Grid of X values, comma separated; default 10^3..10^6.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<u64>>,
        #[arg(long, default_value = "torsion")]
        column: Column,
        #[arg(long, default_value = "squarefree")]
        mode: DiscMode,
    },
    /// Run the verification suite; exit 0 only if every criterion passes.
    Verify {
        /// Reduced-scale parameters for a fast smoke run.
        #[arg(long, default_value_t = false)]
        quick: bool,
    },
}

impl clap::builder::ValueParserFactory for Column {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| Column::from_str(s).map_err(|e| e.to_string()))
    }
}

impl clap::builder::ValueParserFactory for DiscMode {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| DiscMode::from_str(s).map_err(|e| e.to_string()))
    }
}

impl clap::builder::ValueParserFactory for Radius {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| Radius::from_str(s).map_err(|e| e.to_string()))
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::WorkBudgetExceeded { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn output_path(dir: &Option<PathBuf>, file: &str) -> Result<Option<PathBuf>> {
    match dir {
        None => Ok(None),
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Some(dir.join(file)))
        }
    }
}

/// Runs one parsed command, writing human/JSON output to `out`.
/// Returns the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Classgroup { d, g } => {
            let disc = quadforms::fundamental_discriminant(d)?;
            let group = quadforms::enumerate_class_group(disc.delta())?;
            write!(
                out,
                "d={} delta={} h={} divisors={:?}",
                d,
                disc.delta(),
                group.h,
                group.divisors
            )?;
            for &gp in &g {
                let part = group.g_part(gp)?;
                write!(
                    out,
                    " h{gp}_torsion={} h{gp}_sylow={}",
                    part.torsion_count, part.sylow_order
                )?;
            }
            writeln!(out)?;
            Ok(0)
        }
        Command::Sweep {
            from,
            to,
            g,
            resume,
        } => {
            let file = format!("sweep_{from}_{to}.csv");
            let path = output_path(&cli.output, &file)?.unwrap_or_else(|| PathBuf::from(&file));
            let table = if resume {
                moments::sweep_resume(&path, from, to, &g, cli.jobs)?
            } else {
                let t = moments::sweep(from, to, &g, cli.jobs)?;
                t.save_csv(&path)?;
                t
            };
            writeln!(
                out,
                "{}",
                json!({
                    "config": {"command": "sweep", "from": from, "to": to, "g": g, "jobs": cli.jobs, "resume": resume},
                    "rows": table.rows.len(),
                    "csv": path.display().to_string(),
                })
            )?;
            Ok(0)
        }
        Command::Repcount { d, z, g } => {
            let count = repcount::s_g_direct(d, z, g)?;
            if let Some(path) = output_path(&cli.output, &format!("witnesses_d{d}_z{z}_g{g}.csv"))?
            {
                let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
                writeln!(file, "d,p,p',u,v")?;
                for w in &count.witnesses {
                    writeln!(file, "{},{},{},{},{}", w.d, w.p, w.p_prime, w.u, w.v)?;
                }
            }
            writeln!(
                out,
                "{}",
                json!({
                    "config": {"command": "repcount", "d": d, "Z": z, "g": g},
                    "ordered_pairs": count.ordered_pairs,
                    "unordered_pairs": count.unordered_pairs,
                    "witnesses": count.witnesses.len(),
                    "convention": count.convention,
                })
            )?;
            Ok(0)
        }
        Command::Tg { x, z, g } => {
            let budget = cli.budget.unwrap_or(200_000_000);
            let report = repcount::t_g(x, z, g, budget)?;
            if let Some(path) = output_path(&cli.output, &format!("triples_x{x}_z{z}_g{g}.csv"))? {
                let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
                writeln!(file, "d,w,u,v")?;
                for t in &report.witnesses {
                    writeln!(file, "{},{},{},{}", t.d, t.w, t.u, t.v)?;
                }
            }
            let t_delta: Vec<(u64, u64)> = report
                .t_delta
                .iter()
                .map(|(&k, &v)| (k, v as u64))
                .collect();
            writeln!(
                out,
                "{}",
                json!({
                    "config": {"command": "tg", "X": x, "Z": z, "g": g, "budget": budget},
                    "sum_r": report.sum_r as u64,
                    "t_g": report.sum_rr1 as u64,
                    "pair_count": report.pair_count as u64,
                    "t0": report.t0 as u64,
                    "t_delta": t_delta,
                    "work_spent": report.work_spent,
                    "budget_exhausted": false,
                })
            )?;
            Ok(0)
        }
        Command::Lattice {
            ell,
            b,
            basis,
            radius,
        } => {
            let (lat, config) = match basis {
                Some(text) => {
                    let rows: [[i64; 2]; 2] = serde_json::from_str(&text).map_err(|e| {
                        Error::InvalidParameter(format!("basis must be JSON [[a,b],[c,d]]: {e}"))
                    })?;
                    let lat = lattice::Lattice2D::new(
                        (rows[0][0], rows[0][1]),
                        (rows[1][0], rows[1][1]),
                    )?;
                    (
                        lat,
                        json!({"command": "lattice", "basis": rows,
                                 "radius": format!("{}/{}", radius.num, radius.den)}),
                    )
                }
                None => {
                    let (ell, b) = match (ell, b) {
                        (Some(ell), Some(b)) => (ell, b),
                        _ => {
                            return Err(Error::InvalidParameter(
                                "provide either --ell and --b, or --basis".into(),
                            ))
                        }
                    };
                    let lat = lattice::lattice_from_congruence(ell, b)?;
                    (
                        lat,
                        json!({"command": "lattice", "ell": ell, "b": b,
                                 "radius": format!("{}/{}", radius.num, radius.den)}),
                    )
                }
            };
            let (reduced, minima) = lattice::gauss_reduce(&lat)?;
            let points = lattice::count_points(&lat, radius, cli.budget)?;
            writeln!(
                out,
                "{}",
                json!({
                    "config": config,
                    "det": lat.det(),
                    "reduced_basis": [reduced.b1, reduced.b2],
                    "lambda1": minima.lambda1,
                    "lambda2": minima.lambda2,
                    "minima_vectors": [minima.v1, minima.v2],
                    "points": points,
                })
            )?;
            Ok(0)
        }
        Command::Moments {
            g,
            k,
            grid,
            column,
            mode,
        } => {
            let grid = grid.unwrap_or_else(|| vec![1_000, 10_000, 100_000, 1_000_000]);
            let cap = grid.iter().max().copied().unwrap_or(0) + 1;
            let table = moments::sweep(1, cap, &[g], cli.jobs)?;
            let report = moments::moment_report(&table, g, k.as_f64(), column, mode, &grid)?;
            if let Some(path) = output_path(&cli.output, &format!("moments_g{g}.json"))? {
                std::fs::write(&path, serde_json::to_string_pretty(&report).unwrap())?;
            }
            let mut value = serde_json::to_value(&report).unwrap();
            value["config"] = json!({
                "command": "moments", "g": g, "k": format!("{}/{}", k.num, k.den),
                "column": column.to_string(), "mode": mode.to_string(), "grid": grid,
                "jobs": cli.jobs,
            });
            writeln!(out, "{value}")?;
            Ok(0)
        }
        Command::Verify { quick } => {
            let results = verify::run_all(quick, cli.jobs);
            let mut all_passed = true;
            for r in &results {
                writeln!(out, "{}", verify::format_line(r))?;
                all_passed &= r.passed;
            }
            writeln!(
                out,
                "{}",
                if all_passed {
                    "verification: PASS"
                } else {
                    "verification: FAIL"
                }
            )?;
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

/// Entry point used by the binary: parse, run, map errors to exit codes.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (Result<i32>, String) {
        let cli = Cli::try_parse_from(args).expect("parse");
        let mut buf = Vec::new();
        let code = execute(cli, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn classgroup_command() {
        let (code, text) = run(&["quadclass", "classgroup", "--d", "23"]);
        assert_eq!(code.unwrap(), 0);
        assert!(text.contains("h=3"));
        assert!(text.contains("divisors=[3]"));
        assert!(text.contains("h3_torsion=3"));
    }

    #[test]
    fn lattice_command_unit_disc() {
        let (code, text) = run(&[
            "quadclass",
            "lattice",
            "--ell",
            "1",
            "--b",
            "0",
            "--radius",
            "10",
        ]);
        assert_eq!(code.unwrap(), 0);
        assert!(text.contains("\"points\":317"), "{text}");
    }

    #[test]
    fn lattice_command_json_basis() {
        let (code, text) = run(&[
            "quadclass",
            "lattice",
            "--basis",
            "[[1,2],[0,5]]",
            "--radius",
            "10",
        ]);
        assert_eq!(code.unwrap(), 0);
        assert!(text.contains("\"det\":5"), "{text}");
        let (code, _) = run(&["quadclass", "lattice", "--radius", "10"]);
        assert!(code.is_err());
    }

    #[test]
    fn moments_command_small_grid() {
        let (code, text) = run(&[
            "quadclass",
            "moments",
            "--g",
            "3",
            "--k",
            "1",
            "--grid",
            "100,400,1600",
        ]);
        assert_eq!(code.unwrap(), 0);
        assert!(text.contains("fitted_exponent"), "{text}");
    }

    #[test]
    fn sweep_command_writes_csv() {
        let dir = std::env::temp_dir().join("quadclass-cli-sweep");
        let _ = std::fs::remove_dir_all(&dir);
        let (code, text) = run(&[
            "quadclass",
            "--output",
            dir.to_str().unwrap(),
            "sweep",
            "--from",
            "1",
            "--to",
            "50",
        ]);
        assert_eq!(code.unwrap(), 0);
        assert!(text.contains("\"rows\":"));
        let csv = dir.join("sweep_1_50.csv");
        let table = crate::moments::SweepTable::load_csv(&csv).unwrap();
        assert_eq!(table.x_hi, 50);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn repcount_rejects_non_squarefree() {
        let (code, _) = run(&["quadclass", "repcount", "--d", "12", "--Z", "5", "--g", "3"]);
        let err = code.unwrap_err();
        assert_eq!(exit_code_for(&err), 2);
    }

    #[test]
    fn tg_budget_exit_code() {
        let (code, _) = run(&[
            "quadclass",
            "--budget",
            "5",
            "tg",
            "--X",
            "1000",
            "--Z",
            "6",
        ]);
        let err = code.unwrap_err();
        assert_eq!(exit_code_for(&err), 3);
    }

    #[test]
    fn fraction_parsing() {
        let f: Fraction = "7/2".parse().unwrap();
        assert_eq!(f.as_f64(), 3.5);
        assert!("7/0".parse::<Fraction>().is_err());
    }
}
