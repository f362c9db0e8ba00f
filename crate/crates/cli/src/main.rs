use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mbrr_cli::codec::{byte_params, decode_shards, encode_bytes, load_dir, repair_shard};
use mbrr_cli::{scenario, selftest};
use mbrr_core::{overhead_report, NodeId};

#[derive(Parser)]
#[command(name = "mbrr", version, about = "Rack-aware minimum-bandwidth regenerating codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate parameters and print the derived quantities.
    Params {
        n: usize,
        k: usize,
        u: usize,
        d: usize,
        /// Binary field degree (8 or 16); chosen automatically when omitted.
        #[arg(long)]
        field_m: Option<u32>,
    },
    /// Split a file into one shard per node.
    Encode {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        u: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        field_m: Option<u32>,
        #[arg(long)]
        systematic: bool,
    },
    /// Rebuild the original file from any k shards in a directory.
    Decode {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the shard of node (rack, slot) from the others.
    Repair {
        dir: PathBuf,
        rack: usize,
        slot: usize,
        /// Helper racks, comma separated; lowest available racks when omitted.
        #[arg(long, value_delimiter = ',')]
        helpers: Option<Vec<usize>>,
        /// Output directory; defaults to the shard directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a failure/repair scenario script on the in-memory cluster.
    Simulate { script: PathBuf },
    /// Run the built-in checks on the (12, 7, 3, 3) code.
    Selftest {
        #[arg(long, default_value_t = 10)]
        stripes: usize,
        #[arg(long)]
        inject_table_fault: bool,
    },
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Params { n, k, u, d, field_m } => {
            let p = byte_params(n, k, u, d, field_m)?;
            println!("n = {n}, k = {k}, u = {u}, d = {d}, racks = {}", p.racks());
            println!("k_bar = {}, u0 = {}", p.k_bar(), p.u0());
            println!("alpha = {}, beta = {}, B = {}", p.alpha(), p.beta(), p.b());
            println!("field = {}", p.field());
            println!("{}", overhead_report(&p));
        }
        Command::Encode { input, out, n, k, u, d, field_m, systematic } => {
            let p = byte_params(n, k, u, d, field_m)?;
            let data = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let shards = encode_bytes(&data, &p, systematic)?;
            fs::create_dir_all(&out)?;
            for s in &shards {
                s.write_atomic(&out)?;
            }
            println!(
                "wrote {} shards, {} stripes, field {} to {}",
                shards.len(),
                shards[0].info.stripe_count,
                p.field(),
                out.display()
            );
        }
        Command::Decode { dir, out } => {
            let data = decode_shards(&load_dir(&dir)?)?;
            let tmp = out.with_extension("partial");
            fs::write(&tmp, &data)?;
            fs::rename(&tmp, &out)?;
            println!("wrote {} bytes to {}", data.len(), out.display());
        }
        Command::Repair { dir, rack, slot, helpers, out } => {
            let failed = NodeId::new(rack, slot);
            let shards = load_dir(&dir)?;
            if shards.is_empty() {
                bail!("no shards in {}", dir.display());
            }
            let (shard, ledger) = repair_shard(&shards, failed, helpers.as_deref())?;
            let path = shard.write_atomic(out.as_ref().unwrap_or(&dir))?;
            let stripes = shard.info.stripe_count;
            println!("repaired node {failed} -> {}", path.display());
            println!(
                "cross_rack_symbols = {} ({} per stripe x {stripes} stripes)",
                ledger.cross_rack_symbols,
                ledger.cross_rack_symbols as u64 / stripes.max(1)
            );
            println!("intra_rack_symbols = {}", ledger.intra_rack_symbols);
            for (rack, n) in &ledger.per_helper {
                println!("  helper rack {rack}: {n}");
            }
        }
        Command::Simulate { script } => {
            let text = fs::read_to_string(&script).with_context(|| format!("reading {}", script.display()))?;
            let report = scenario::run_script(&text)?;
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Selftest { stripes, inject_table_fault } => {
            let s = selftest::run(selftest::Options { stripes, inject_table_fault, ..Default::default() });
            println!("{s}");
            if !s.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
