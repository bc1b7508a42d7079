//! `ncreal`: exact-rational sequence machinery on the command line.
//!
//! Output is line-oriented and exact (rationals print as `p/q`). Exit
//! status 0 means the computation ran (including a falsification check
//! that found violations — those are results, not failures); 1 means a
//! domain error, with the reason on stderr; 2 means the request was
//! malformed.

mod spec;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ncreal::coding::{kc_assign, lengths_from_weights};
use ncreal::compression::{anti_cauchy, Compression};
use ncreal::extraction::{decode_quaternary, embed_left_cut, locate};
use ncreal::harness::{brute_min_modulus, check_modulus, instances};
use ncreal::numeric::ball_code;
use ncreal::{CauchyReal, Error, Rational};
use spec::{parse_field_expr, parse_modulus, parse_probe, parse_sequence, rational_arg, CliError};

#[derive(Parser)]
#[command(name = "ncreal", version, about = "Exact-rational sequence machinery")]
struct Cli {
    /// Bound on every internal minimal search before it fails loudly
    #[arg(long, global = true, default_value_t = ncreal::DEFAULT_SEARCH_HORIZON)]
    horizon: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a sequence along a probe; prints `b j value` lines for the
    /// first COUNT indices, then `g n boundary` lines through LEVELS
    Compress {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        threshold: u64,
        #[arg(long)]
        probe: String,
        #[arg(long, default_value_t = 16)]
        count: u64,
        #[arg(long, default_value_t = 4)]
        levels: u64,
    },
    /// Stack one compression per probe over the naturals; prints
    /// `q j value` lines, then `g stage n boundary` lines per stage
    Diag {
        /// Comma-separated probe specs, applied in order
        #[arg(long)]
        probes: String,
        #[arg(long, default_value_t = 16)]
        count: u64,
        #[arg(long, default_value_t = 3)]
        levels: u64,
    },
    /// Assign prefix-free codewords to the requested lengths, one per line
    Kc {
        #[arg(required = true)]
        lengths: Vec<u64>,
    },
    /// Turn a positive weight stream into codeword lengths; prints
    /// `n length` lines
    #[command(name = "weights2lengths")]
    Weights2Lengths {
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Read one quaternary digit off a converging sequence; prints 0 or 1
    Decode4 {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        bit: u64,
        /// Window on which the modulus is falsified before decoding
        #[arg(long, default_value_t = 32)]
        validate: u64,
    },
    /// Embed a field expression as the quaternary value of its left cut;
    /// prints the included positions and the value
    Embed {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 8)]
        precision: u64,
        #[arg(long, default_value_t = 256)]
        budget: u64,
    },
    /// Bracket a real between labeled avoided balls; prints the midpoint
    Locate {
        /// Planted mode: locate this rational via synthetic shrinking
        /// balls around it
        #[arg(long, conflicts_with_all = ["seq", "modulus", "balls"])]
        target: Option<String>,
        /// Approximant sequence of the real (with --modulus and --balls)
        #[arg(long, requires = "modulus", requires = "balls")]
        seq: Option<String>,
        #[arg(long)]
        modulus: Option<String>,
        /// Comma-separated ball codes to consume in order
        #[arg(long)]
        balls: Option<String>,
        #[arg(long, default_value_t = 6)]
        precision: u64,
        /// Number of balls consumed before giving up
        #[arg(long, default_value_t = 64)]
        budget: u64,
    },
    /// Falsify a modulus for a sequence's increments along a probe;
    /// prints one `m n observed bound` line per violation (none = passed)
    Check {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        probe: String,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = ncreal::DEFAULT_CHECK_HORIZON)]
        window: u64,
    },
    /// Brute-force minimal modulus table on a window; prints `n entry`
    /// lines (an entry one past the window means unsatisfiable there)
    Oracle {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        probe: String,
        #[arg(long, default_value_t = 16)]
        window: u64,
    },
    /// Evaluate a field expression; prints the approximation at the
    /// requested refinement level (within 2^-LEVEL of the value)
    FieldEval {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 16)]
        level: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let horizon = cli.horizon;
    match cli.command {
        Command::Compress {
            seq,
            threshold,
            probe,
            count,
            levels,
        } => {
            let a = parse_sequence(&seq, horizon)?;
            let p = parse_probe(&probe)?;
            let c = Compression::new(a, threshold, p, horizon);
            let b = c.compressed();
            for j in 0..count {
                println!("b {j} {}", b.eval(j).map_err(CliError::Domain)?);
            }
            for n in 0..=levels {
                println!("g {n} {}", c.boundary(n).map_err(CliError::Domain)?);
            }
        }
        Command::Diag {
            probes,
            count,
            levels,
        } => {
            let parsed = probes
                .split(',')
                .map(|p| parse_probe(p.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let d = anti_cauchy(parsed, horizon);
            for j in 0..count {
                println!("q {j} {}", d.q().eval(j).map_err(CliError::Domain)?);
            }
            for (i, stage) in d.stages().iter().enumerate() {
                for n in 0..=levels {
                    println!(
                        "g {i} {n} {}",
                        stage.boundary(n).map_err(CliError::Domain)?
                    );
                }
            }
        }
        Command::Kc { lengths } => {
            for word in kc_assign(&lengths).map_err(CliError::Domain)? {
                println!("{word}");
            }
        }
        Command::Weights2Lengths { weights, count } => {
            let w = parse_sequence(&weights, horizon)?;
            let f = lengths_from_weights(&w);
            for n in 0..count {
                println!("{n} {}", f.eval(n).map_err(CliError::Domain)?);
            }
        }
        Command::Decode4 {
            seq,
            modulus,
            bit,
            validate,
        } => {
            let a = parse_sequence(&seq, horizon)?;
            let g = parse_modulus(&modulus, horizon)?;
            let included = decode_quaternary(&a, &g, bit, validate).map_err(CliError::Domain)?;
            println!("{}", if included { 1 } else { 0 });
        }
        Command::Embed {
            expr,
            precision,
            budget,
        } => {
            let x = parse_field_expr(&expr)?;
            let support = embed_left_cut(&x, precision, budget).map_err(CliError::Domain)?;
            let elements: Vec<String> =
                support.elements.iter().map(|e| e.to_string()).collect();
            println!("elements {}", elements.join(" "));
            println!("value {}", support.value);
        }
        Command::Locate {
            target,
            seq,
            modulus,
            balls,
            precision,
            budget,
        } => {
            let found = match (target, seq, modulus, balls) {
                (Some(t), None, None, None) => {
                    let goal = rational_arg(&t)?;
                    let x = instances::noisy_real(goal.clone(), 0);
                    let stream = move |n: u64| {
                        let j = n / 2 + 2;
                        let radius = ncreal::pow2(-(j as i64));
                        let three = Rational::from_integer(3.into());
                        let center = if n % 2 == 0 {
                            &goal - &three * &radius
                        } else {
                            &goal + &three * &radius
                        };
                        Ok(ball_code(&center, j))
                    };
                    locate(stream, &x, precision, budget).map_err(CliError::Domain)?
                }
                (None, Some(s), Some(m), Some(b)) => {
                    let a = parse_sequence(&s, horizon)?;
                    let g = parse_modulus(&m, horizon)?;
                    let x = CauchyReal::new(a, g);
                    let codes = b
                        .split(',')
                        .map(|c| {
                            c.trim().parse::<u64>().map_err(|_| {
                                CliError::Usage(format!("ball codes are naturals, got {c:?}"))
                            })
                        })
                        .collect::<Result<Vec<u64>, _>>()?;
                    let len = codes.len() as u64;
                    let stream = move |n: u64| {
                        codes
                            .get(n as usize)
                            .copied()
                            .ok_or(Error::TableExhausted { index: n, len })
                    };
                    locate(stream, &x, precision, budget).map_err(CliError::Domain)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "locate needs either --target, or --seq with --modulus and --balls"
                            .to_string(),
                    ))
                }
            };
            println!("{found}");
        }
        Command::Check {
            seq,
            probe,
            modulus,
            window,
        } => {
            let a = parse_sequence(&seq, horizon)?;
            let p = parse_probe(&probe)?;
            let g = parse_modulus(&modulus, horizon)?;
            for v in check_modulus(&a, &p, &g, window).map_err(CliError::Domain)? {
                println!("{} {} {} {}", v.m, v.n, v.observed, v.bound);
            }
        }
        Command::Oracle { seq, probe, window } => {
            let a = parse_sequence(&seq, horizon)?;
            let p = parse_probe(&probe)?;
            let table = brute_min_modulus(&a, &p, window).map_err(CliError::Domain)?;
            for (n, entry) in table.rows() {
                println!("{n} {entry}");
            }
        }
        Command::FieldEval { expr, level } => {
            let x = parse_field_expr(&expr)?;
            println!("{}", x.refine(level).map_err(CliError::Domain)?);
        }
    }
    Ok(())
}
