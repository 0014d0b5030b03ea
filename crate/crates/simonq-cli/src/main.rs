use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simonq::circuit::Circuit;
use simonq::circuits::{build_encryption_circuit, build_h_circuit_d2, build_key_expansion};
use simonq::cost::{
    attack_cost, qmks_pairs, remaining_key_bits, table_report, CostOptions, HSource, Mode,
    Technique, TABLE_IDS,
};
use simonq::decompose::{
    lower_circuit, lower_mcx, summarize_resources, LoweringScheme, McxAccounting, NotAccounting,
    ToffoliScheme,
};
use simonq::diff::{Catalog, HPlan};
use simonq::qaa::{
    build_phase1_iterator, build_phase2_iterator, build_qmks_iterator, simulate_qaa_aggregate,
    simulate_qaa_table, uniform, Reflection, MAX_TABLE_BITS,
};
use simonq::report::{attack_json, render_table, write_file, Format};
use simonq::simon::{decrypt, encrypt, key_schedule, Block, Variant};
use simonq::toy::{run_toy, ToyConfig};
use simonq::verify::{divergence_reason, run_criterion};

const EXIT_ERROR: u8 = 1;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(
    name = "simonq",
    version,
    about = "Quantum key-recovery circuits and cost estimates for SIMON"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Toffoli lowering.
    #[arg(long, global = true, default_value = "amy3")]
    toffoli: ToffoliScheme,
    /// MCX Toffoli accounting for circuit summaries.
    #[arg(long, global = true, default_value = "strict")]
    mcx_accounting: McxAccounting,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Relative output paths are placed here.
    #[arg(long, global = true, env = "SIMONQ_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classical cipher.
    Simon {
        #[command(subcommand)]
        op: SimonOp,
    },
    /// Build and export circuits.
    Circuit {
        #[command(subcommand)]
        op: CircuitOp,
    },
    /// Resource estimates.
    Estimate {
        #[command(subcommand)]
        op: EstimateOp,
    },
    /// Amplitude amplification simulation.
    Qaa {
        #[command(subcommand)]
        op: QaaOp,
    },
    /// End-to-end attacks at small scale.
    Attack {
        #[command(subcommand)]
        op: AttackOp,
    },
    /// Run acceptance suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum SimonOp {
    Encrypt {
        #[arg(long)]
        variant: Variant,
        /// Master key in hex, most significant word first.
        #[arg(long)]
        key: String,
        #[arg(long)]
        pt: String,
        #[arg(long)]
        rounds: Option<usize>,
    },
    Decrypt {
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        key: String,
        #[arg(long)]
        ct: String,
        #[arg(long)]
        rounds: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Enc,
    Keyexp,
    #[value(name = "h-d2")]
    HD2,
    Oracle,
    Phase1,
    Phase2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitFormat {
    Text,
    Qasm,
    Summary,
}

#[derive(Subcommand)]
enum CircuitOp {
    Build {
        #[arg(long, default_value = "32/64")]
        variant: Variant,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, value_enum, default_value = "enc")]
        part: Part,
        #[arg(long, value_enum, default_value = "text")]
        format: CircuitFormat,
        /// Expand MCX gates into Toffoli ladders (and Toffolis into Clifford+T for qasm).
        #[arg(long)]
        lower: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum EstimateOp {
    Table {
        #[arg(long, value_parser = table_id)]
        id: u32,
        #[arg(long, default_value = "paper")]
        mode: Mode,
        #[arg(long, default_value = "reference")]
        h_source: HSource,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Attack {
        #[arg(long)]
        variant: Variant,
        #[arg(long, default_value = "qmks")]
        technique: Technique,
        #[arg(long)]
        rounds: Option<u32>,
        #[arg(long, default_value = "paper")]
        mode: Mode,
        #[arg(long, default_value = "reference")]
        h_source: HSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QaaOp {
    Simulate {
        #[arg(long)]
        space_bits: u32,
        #[arg(long)]
        marked: u64,
        /// Defaults to the optimal count.
        #[arg(long)]
        iterations: Option<u64>,
    },
}

#[derive(Subcommand)]
enum AttackOp {
    Toy {
        #[arg(long, default_value_t = 12)]
        unknown_bits: usize,
        #[arg(long, default_value_t = 10)]
        index_bits: u32,
        #[arg(long, default_value_t = 8)]
        phase2_bits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    All,
    Simon,
    Circuits,
    Decompositions,
    Tables,
    Qaa,
    Filter,
    Toy,
    Complexity,
}

impl Suite {
    fn criteria(self) -> Vec<u8> {
        match self {
            Suite::All => (1..=9).collect(),
            Suite::Simon => vec![1],
            Suite::Circuits => vec![2],
            Suite::Decompositions => vec![3],
            Suite::Tables => vec![4, 5],
            Suite::Qaa => vec![6],
            Suite::Filter => vec![7],
            Suite::Toy => vec![8],
            Suite::Complexity => vec![9],
        }
    }
}

fn table_id(s: &str) -> std::result::Result<u32, String> {
    let id: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if TABLE_IDS.contains(&id) {
        Ok(id)
    } else {
        Err(format!("tables: {TABLE_IDS:?}"))
    }
}

fn parse_hex(s: &str) -> Result<u128> {
    let s: String = s
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect();
    let s = s.trim_start_matches("0x");
    u128::from_str_radix(s, 16).with_context(|| format!("bad hex `{s}`"))
}

fn resolve(g: &Global, p: &PathBuf) -> PathBuf {
    match &g.out_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.clone(),
    }
}

/// Stdout that tolerates a closed pipe.
fn say(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn emit(g: &Global, out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            let p = resolve(g, p);
            write_file(&p, text)?;
            eprintln!("wrote {}", p.display());
        }
        None => say(text.strip_suffix('\n').unwrap_or(text)),
    }
    Ok(())
}

fn known_pairs(v: Variant, rounds: usize, n: usize, seed: u64) -> Result<Vec<(Block, Block)>> {
    let p = v.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = rng.gen::<u128>() >> (128 - p.key_bits());
    let ks = key_schedule(&p, key)?;
    (0..n)
        .map(|_| {
            let m = Block::from_u128(&p, rng.gen());
            Ok((m, encrypt(&p, &ks, m, rounds)?))
        })
        .collect()
}

fn d2_plan() -> Result<HPlan> {
    let cat = Catalog::builtin();
    let v = Variant::Simon32_64;
    Ok(HPlan::derive(cat.differential(v, 2)?, cat.attack(v)?)?)
}

fn build_part(g: &Global, v: Variant, rounds: Option<usize>, part: Part) -> Result<Circuit> {
    let p = v.params();
    let attack_rounds =
        || -> Result<usize> { Ok(Catalog::builtin().attack(v)?.attack_rounds as usize) };
    let c = match part {
        Part::Enc => build_encryption_circuit(&p, rounds.unwrap_or(p.rounds as usize))?.0,
        Part::Keyexp => build_key_expansion(&p, rounds.unwrap_or(p.rounds as usize))?.0,
        Part::HD2 => {
            if v != Variant::Simon32_64 {
                bail!("the h circuit exists for 32/64 only");
            }
            build_h_circuit_d2()?.0
        }
        Part::Oracle => {
            let r = match rounds {
                Some(r) => r,
                None => attack_rounds()?,
            };
            build_qmks_iterator(&p, r, &known_pairs(v, r, qmks_pairs(v), g.seed)?)?.0
        }
        Part::Phase1 => {
            if v != Variant::Simon32_64 {
                bail!("the partial-key guessing iterator exists for 32/64 only");
            }
            build_phase1_iterator(&d2_plan()?, Reflection::Initial)?.0
        }
        Part::Phase2 => {
            let r = match rounds {
                Some(r) => r,
                None => attack_rounds()?,
            };
            let free = remaining_key_bits(v)? as usize;
            build_phase2_iterator(&p, r, &known_pairs(v, r, 2, g.seed)?, free)?.0
        }
    };
    Ok(c)
}

fn run(cli: Cli) -> Result<u8> {
    let g = cli.global.clone();
    let opts = |mode: Mode, h_source: HSource| CostOptions {
        mode,
        h_source,
        toffoli: g.toffoli,
    };
    match cli.cmd {
        Command::Simon { op } => {
            let (v, key, text, rounds, forward) = match op {
                SimonOp::Encrypt {
                    variant,
                    key,
                    pt,
                    rounds,
                } => (variant, key, pt, rounds, true),
                SimonOp::Decrypt {
                    variant,
                    key,
                    ct,
                    rounds,
                } => (variant, key, ct, rounds, false),
            };
            let p = v.params();
            let ks = key_schedule(&p, parse_hex(&key)?)?;
            let b = Block::from_u128(&p, parse_hex(&text)?);
            let r = rounds.unwrap_or(p.rounds as usize);
            let out = if forward {
                encrypt(&p, &ks, b, r)?
            } else {
                decrypt(&p, &ks, b, r)?
            };
            say(&out.to_hex(&p).to_uppercase());
        }
        Command::Circuit {
            op:
                CircuitOp::Build {
                    variant,
                    rounds,
                    part,
                    format,
                    lower,
                    out,
                },
        } => {
            let mut c = build_part(&g, variant, rounds, part)?;
            if lower {
                c = lower_mcx(&c)?;
            }
            let text = match format {
                CircuitFormat::Text => c.to_text(),
                CircuitFormat::Qasm => {
                    let c = if lower {
                        lower_circuit(&c, g.toffoli)?
                    } else {
                        c
                    };
                    c.to_qasm()?
                }
                CircuitFormat::Summary => {
                    let scheme = LoweringScheme {
                        toffoli: g.toffoli,
                        mcx: g.mcx_accounting,
                        nots: match g.mcx_accounting {
                            McxAccounting::Paper => NotAccounting::Paper,
                            McxAccounting::Strict => NotAccounting::Physical,
                        },
                    };
                    serde_json::to_string_pretty(&summarize_resources(&c, scheme)?)?
                }
            };
            emit(&g, &out, &text)?;
        }
        Command::Estimate { op } => match op {
            EstimateOp::Table {
                id,
                mode,
                h_source,
                format,
                out,
            } => {
                let t = table_report(id, &opts(mode, h_source))?;
                let f = match format {
                    OutFormat::Text => Format::Text,
                    OutFormat::Csv => Format::Csv,
                    OutFormat::Json => Format::Json,
                };
                emit(&g, &out, &render_table(&t, f)?)?;
            }
            EstimateOp::Attack {
                variant,
                technique,
                rounds,
                mode,
                h_source,
                out,
            } => {
                let row = attack_cost(variant, rounds, technique, &opts(mode, h_source))?;
                emit(&g, &out, &attack_json(&row)?)?;
            }
        },
        Command::Qaa {
            op:
                QaaOp::Simulate {
                    space_bits,
                    marked,
                    iterations,
                },
        } => {
            if space_bits > 127 || marked == 0 || (space_bits < 64 && marked > 1u64 << space_bits) {
                bail!("need 1 <= marked <= 2^space_bits");
            }
            let p = marked as f64 / (space_bits as f64).exp2();
            let agg = simulate_qaa_aggregate(p, iterations)?;
            let mut report = serde_json::json!({
                "space_bits": space_bits,
                "marked": marked,
                "p": p,
                "iterations": agg.iterations,
                "success": agg.success,
                "seed": g.seed,
            });
            if space_bits <= MAX_TABLE_BITS {
                let n = 1usize << space_bits;
                let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
                let mut set = vec![false; n];
                let mut left = marked;
                while left > 0 {
                    let i = rng.gen_range(0..n);
                    if !set[i] {
                        set[i] = true;
                        left -= 1;
                    }
                }
                let probs = simulate_qaa_table(&uniform(n), &set, agg.iterations)?;
                let table: f64 = probs
                    .iter()
                    .zip(&set)
                    .filter(|(_, &m)| m)
                    .map(|(p, _)| p)
                    .sum();
                report["table_success"] = table.into();
            }
            say(&serde_json::to_string_pretty(&report)?);
        }
        Command::Attack {
            op:
                AttackOp::Toy {
                    unknown_bits,
                    index_bits,
                    phase2_bits,
                    out,
                },
        } => {
            let cfg = ToyConfig {
                unknown_bits,
                index_bits,
                phase2_bits,
                seed: g.seed,
                ..ToyConfig::default()
            };
            let r = run_toy(&cfg)?;
            emit(&g, &out, &serde_json::to_string_pretty(&r)?)?;
            eprintln!(
                "planted {} recovered {}",
                r.planted_key,
                r.recovered_key.as_deref().unwrap_or("none")
            );
            if !r.recovered() {
                return Ok(EXIT_MISMATCH);
            }
        }
        Command::Verify { suite } => {
            let mut results = Vec::new();
            for id in suite.criteria() {
                let r = run_criterion(id)?;
                say(&r.line());
                for f in &r.failures {
                    say(&format!(
                        "    {f}: {}",
                        divergence_reason(f).unwrap_or("unexpected")
                    ));
                }
                results.push(r);
            }
            if let Some(dir) = &g.out_dir {
                let p = dir.join("verify.json");
                write_file(&p, &serde_json::to_string_pretty(&results)?)?;
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(EXIT_MISMATCH);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
