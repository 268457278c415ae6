//! Command-line harness: multiplication drivers with operation counting and
//! CSV emission, algorithm verification, decomposition generators, exponent
//! calculators, the embedded exponent-history dataset, and binary
//! segmentation.
//!
//! Exit codes: 0 on success/PASS, 1 on verification or cross-check failure,
//! 2 on usage or input errors.

use clap::{Parser, Subcommand, ValueEnum};
use fastmm::aggregation::{aggregate_three, aggregate_two};
use fastmm::apa::apa_aggregate;
use fastmm::binseg;
use fastmm::catalog;
use fastmm::exponent::{apa_exponent, exponent_from_rank};
use fastmm::history::history_csv;
use fastmm::matrix::{mm_naive, Matrix, OpCounter};
use fastmm::ring::Ring;
use fastmm::textfmt::{parse_document, write_apa, write_trilinear, Document};
use fastmm::{apply_recursive, mm_fast, VerifyOutcome};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "fastmm",
    version,
    about = "fast matrix multiplication laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgChoice {
    Naive,
    Strassen,
    Winograd,
}

impl AlgChoice {
    fn id(self) -> &'static str {
        match self {
            AlgChoice::Naive => "naive",
            AlgChoice::Strassen => "strassen",
            AlgChoice::Winograd => "winograd",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RingChoice {
    Int,
    Rat,
    F64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggMode {
    Two,
    Three,
    Apa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BinsegOp {
    Inner,
    Sum,
    Conv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Multiply random matrices, cross-check exact rings against the
    /// straightforward algorithm, and append a benchmark row to a CSV.
    Multiply {
        #[arg(long, value_enum)]
        alg: AlgChoice,
        #[arg(long)]
        n: usize,
        /// Block size below which the recursion switches to the
        /// straightforward algorithm; defaults to 1 on exact rings
        /// (counting experiments) and 64 on f64 (benchmarking).
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum, default_value_t = RingChoice::Int)]
        ring: RingChoice,
        /// Defaults to FASTMM_SEED or 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Append `alg,n,cutoff,mults,adds,wall_ns,ratio` here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Verify an algorithm file or a builtin against its target tensor.
    Verify {
        #[arg(long, conflicts_with = "builtin")]
        file: Option<PathBuf>,
        /// One of: strassen, winograd, complex_mult.
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Exponent calculators and the embedded exponent-history dataset.
    Exponent {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Exponent from an algorithm of this rank for MM(m, k, n).
        #[arg(long)]
        rank: Option<usize>,
        /// Border-rank exponent 3*log_mkn(0.5*(mkn + mk + kn)).
        #[arg(long)]
        apa: bool,
        /// Dump the embedded history tables as CSV.
        #[arg(long)]
        history: bool,
    },
    /// Generate an aggregation decomposition and write it out.
    Aggregate {
        #[arg(long, value_enum)]
        mode: AggMode,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inner product, summation, or convolution by one long multiplication,
    /// cross-checked against the straightforward loop.
    Binseg {
        #[arg(long, value_enum)]
        op: BinsegOp,
        /// Whitespace-separated nonnegative integers, one vector per line
        /// (two lines for inner/conv, one for sum).
        #[arg(long, conflicts_with = "random")]
        file: Option<PathBuf>,
        /// n g h: vector length and the two entry bit-widths.
        #[arg(long, num_args = 3, value_names = ["N", "G", "H"])]
        random: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn default_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("FASTMM_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Multiply {
            alg,
            n,
            cutoff,
            ring,
            seed,
            csv,
        } => {
            let cutoff = cutoff.unwrap_or(if ring == RingChoice::F64 { 64 } else { 1 });
            cmd_multiply(alg, n, cutoff, ring, default_seed(seed), csv)
        }
        Cmd::Verify { file, builtin } => cmd_verify(file, builtin),
        Cmd::Exponent {
            m,
            k,
            n,
            rank,
            apa,
            history,
        } => cmd_exponent(m, k, n, rank, apa, history),
        Cmd::Aggregate { mode, m, k, n, out } => cmd_aggregate(mode, m, k, n, out),
        Cmd::Binseg {
            op,
            file,
            random,
            seed,
        } => cmd_binseg(op, file, random, default_seed(seed)),
    }
}

struct RunOutcome {
    ctr: OpCounter,
    wall_ns: u128,
    mismatch: Option<String>,
}

fn run_ring<R: Ring>(
    alg: AlgChoice,
    n: usize,
    cutoff: usize,
    seed: u64,
    check: bool,
) -> Result<RunOutcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Matrix::<R>::random(n, n, -9, 9, &mut rng);
    let b = Matrix::<R>::random(n, n, -9, 9, &mut rng);
    let mut ctr = OpCounter::new();
    let start = Instant::now();
    let got = match alg {
        AlgChoice::Naive => mm_naive(&a, &b, &mut ctr).map_err(|e| e.to_string())?,
        AlgChoice::Strassen | AlgChoice::Winograd => {
            let engine = if alg == AlgChoice::Strassen {
                catalog::strassen()
            } else {
                catalog::winograd_mm2()
            };
            if n.is_power_of_two() {
                apply_recursive(&engine, &a, &b, cutoff, &mut ctr).map_err(|e| e.to_string())?
            } else {
                mm_fast(&engine, &a, &b, cutoff, &mut ctr).map_err(|e| e.to_string())?
            }
        }
    };
    let wall_ns = start.elapsed().as_nanos();
    let mut mismatch = None;
    if check {
        let mut oracle_ctr = OpCounter::new();
        let want = mm_naive(&a, &b, &mut oracle_ctr).map_err(|e| e.to_string())?;
        if got != want {
            'outer: for r in 0..n {
                for c in 0..n {
                    if got.get(r, c) != want.get(r, c) {
                        mismatch = Some(format!(
                            "first mismatch at ({r}, {c}): got {}, want {}",
                            got.get(r, c),
                            want.get(r, c)
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(RunOutcome {
        ctr,
        wall_ns,
        mismatch,
    })
}

fn cmd_multiply(
    alg: AlgChoice,
    n: usize,
    cutoff: usize,
    ring: RingChoice,
    seed: u64,
    csv: Option<PathBuf>,
) -> Result<ExitCode, String> {
    if n == 0 {
        return Err("--n must be positive".into());
    }
    let outcome = match ring {
        RingChoice::Int => run_ring::<BigInt>(alg, n, cutoff, seed, true)?,
        RingChoice::Rat => run_ring::<BigRational>(alg, n, cutoff, seed, true)?,
        RingChoice::F64 => run_ring::<f64>(alg, n, cutoff, seed, false)?,
    };
    let ratio = outcome.ctr.multiplications as f64 / (n * n * n) as f64;
    println!(
        "alg={} n={n} cutoff={cutoff} mults={} adds={} wall_ns={} ratio={ratio:.6}",
        alg.id(),
        outcome.ctr.multiplications,
        outcome.ctr.additions,
        outcome.wall_ns
    );
    if let Some(path) = csv {
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
        if file.metadata().map(|m| m.len()).unwrap_or(0) == 0 {
            writeln!(file, "alg,n,cutoff,mults,adds,wall_ns,ratio").map_err(|e| e.to_string())?;
        }
        writeln!(
            file,
            "{},{n},{cutoff},{},{},{},{ratio:.6}",
            alg.id(),
            outcome.ctr.multiplications,
            outcome.ctr.additions,
            outcome.wall_ns
        )
        .map_err(|e| e.to_string())?;
    }
    if let Some(msg) = outcome.mismatch {
        eprintln!("cross-check FAILED: {msg}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(file: Option<PathBuf>, builtin: Option<String>) -> Result<ExitCode, String> {
    let outcome = match (file, builtin) {
        (Some(path), None) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            match parse_document(&text).map_err(|e| e.to_string())? {
                Document::Bilinear(mut alg) => {
                    println!("algorithm {} (rank {})", alg.name, alg.rank());
                    alg.verify()
                }
                Document::Trilinear(tri) => {
                    println!("decomposition {} (rank {})", tri.name, tri.rank());
                    tri.verify()
                }
                Document::Apa(alg) => {
                    // parsing re-runs the border verification, so reaching
                    // this point means the order-zero identity held
                    println!(
                        "apa {} (border rank {}, degree {})",
                        alg.name,
                        alg.border_rank(),
                        alg.degree
                    );
                    VerifyOutcome::Verified
                }
            }
        }
        (None, Some(name)) => {
            let mut alg =
                catalog::builtin(&name).ok_or_else(|| format!("unknown builtin `{name}`"))?;
            println!("algorithm {} (rank {})", alg.name, alg.rank());
            alg.verify()
        }
        _ => return Err("pass exactly one of --file or --builtin".into()),
    };
    match outcome {
        VerifyOutcome::Verified => {
            println!("PASS");
            Ok(ExitCode::SUCCESS)
        }
        VerifyOutcome::Violated(v) => {
            println!("FAIL {v}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_exponent(
    m: Option<usize>,
    k: Option<usize>,
    n: Option<usize>,
    rank: Option<usize>,
    apa: bool,
    history: bool,
) -> Result<ExitCode, String> {
    if history {
        print!("{}", history_csv());
        return Ok(ExitCode::SUCCESS);
    }
    let (m, k, n) = match (m, k, n) {
        (Some(m), Some(k), Some(n)) => (m, k, n),
        _ => return Err("pass --m, --k and --n (or --history)".into()),
    };
    let value = if apa {
        apa_exponent(m, k, n).map_err(|e| e.to_string())?
    } else {
        let rank = rank.ok_or("pass --rank for the exact exponent, or --apa")?;
        exponent_from_rank(m, k, n, rank).map_err(|e| e.to_string())?
    };
    println!("{value:.7}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_aggregate(
    mode: AggMode,
    m: usize,
    k: usize,
    n: usize,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let (text, summary) = match mode {
        AggMode::Two => {
            let tri = match aggregate_two(m, k, n) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(1));
                }
            };
            let summary = format!("rank {}", tri.rank());
            (write_trilinear(&tri), summary)
        }
        AggMode::Three => {
            if !(m == k && k == n) {
                return Err("--mode three is square: pass equal --m --k --n".into());
            }
            let agg = match aggregate_three(n) {
                Ok(a) => a,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(1));
                }
            };
            let summary = format!(
                "rank {} = {} aggregates + {} corrections",
                agg.decomposition.rank(),
                agg.aggregate_count,
                agg.correction_count
            );
            (write_trilinear(&agg.decomposition), summary)
        }
        AggMode::Apa => {
            let alg = match apa_aggregate(m, k, n) {
                Ok(a) => a,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(1));
                }
            };
            let summary = format!("border rank {} degree {}", alg.border_rank(), alg.degree);
            (write_apa(&alg), summary)
        }
    };
    if let Some(path) = out {
        fs::write(&path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        println!("{summary} -> {}", path.display());
    } else {
        println!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

fn read_vector_lines(path: &PathBuf, want: usize) -> Result<Vec<Vec<u64>>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let rows: Vec<Vec<u64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|_| format!("bad integer `{t}`")))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.len() != want {
        return Err(format!(
            "{} holds {} vector line(s), expected {want}",
            path.display(),
            rows.len()
        ));
    }
    Ok(rows)
}

fn bits_needed(v: &[u64]) -> usize {
    v.iter()
        .map(|&x| 64 - x.leading_zeros() as usize)
        .max()
        .unwrap_or(1)
        .max(1)
}

fn cmd_binseg(
    op: BinsegOp,
    file: Option<PathBuf>,
    random: Option<Vec<usize>>,
    seed: u64,
) -> Result<ExitCode, String> {
    let (a, b, ga, hb) = match (&file, &random) {
        (Some(path), None) => {
            let want = if op == BinsegOp::Sum { 1 } else { 2 };
            let mut rows = read_vector_lines(path, want)?;
            let b = if want == 2 {
                rows.pop().unwrap()
            } else {
                Vec::new()
            };
            let a = rows.pop().unwrap();
            let ga = bits_needed(&a);
            let hb = if want == 2 { bits_needed(&b) } else { 0 };
            (a, b, ga, hb)
        }
        (None, Some(params)) => {
            let (n, g, h) = (params[0], params[1], params[2]);
            if n == 0 || h == 0 || h > 32 || g > 32 {
                return Err(
                    "--random needs n >= 1, h in 1..=32, g in 0..=32 (g is ignored for sum)".into(),
                );
            }
            if op != BinsegOp::Sum && g == 0 {
                return Err("--random needs g >= 1 for inner/conv".into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut gen_vec = |bits: usize| -> Vec<u64> {
                (0..n).map(|_| rng.gen_range(0..(1u64 << bits))).collect()
            };
            let a = if op == BinsegOp::Sum {
                gen_vec(h)
            } else {
                gen_vec(g)
            };
            let b = if op == BinsegOp::Sum {
                Vec::new()
            } else {
                gen_vec(h)
            };
            let ga = if op == BinsegOp::Sum { h } else { g };
            (a, b, ga, h)
        }
        _ => return Err("pass exactly one of --file or --random".into()),
    };

    match op {
        BinsegOp::Sum => {
            let (got, report) = binseg::sum(&a, ga).map_err(|e| e.to_string())?;
            let want: u128 = a.iter().map(|&x| x as u128).sum();
            println!(
                "sum = {got} (one long multiplication, operands {} x {} bits, radix 2^{})",
                report.lhs_bits, report.rhs_bits, report.radix_bits
            );
            if got != want {
                eprintln!("cross-check FAILED: loop oracle says {want}");
                return Ok(ExitCode::from(1));
            }
        }
        BinsegOp::Inner => {
            if a.len() != b.len() {
                return Err("inner product needs equal lengths".into());
            }
            let (got, report) = binseg::inner_product(&a, &b, ga, hb).map_err(|e| e.to_string())?;
            let want: u128 = a.iter().zip(&b).map(|(&x, &y)| x as u128 * y as u128).sum();
            println!(
                "inner = {got} (one long multiplication, operands {} x {} bits, radix 2^{})",
                report.lhs_bits, report.rhs_bits, report.radix_bits
            );
            if got != want {
                eprintln!("cross-check FAILED: loop oracle says {want}");
                return Ok(ExitCode::from(1));
            }
        }
        BinsegOp::Conv => {
            let bound = ga.max(hb);
            let (got, report) =
                binseg::poly_mult_binseg(&a, &b, bound).map_err(|e| e.to_string())?;
            let mut want = vec![0u128; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    want[i + j] += x as u128 * y as u128;
                }
            }
            let joined = got
                .iter()
                .map(u128::to_string)
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "conv = {joined} (one long multiplication, operands {} x {} bits, radix 2^{})",
                report.lhs_bits, report.rhs_bits, report.radix_bits
            );
            if got != want {
                eprintln!("cross-check FAILED against the schoolbook convolution");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
