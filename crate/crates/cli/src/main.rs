use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

mod cache;
mod commands;

use cache::{Cache, Lookup};

/// Bott-Borel-Weil cohomology, jet-bundle invariants and holonomy screening
/// for homogeneous spaces of complex semisimple groups.
#[derive(Debug, Parser)]
#[command(name = "hololab", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Emit JSON instead of text (JSON-lines for `sweep`).
    #[arg(long, global = true)]
    json: bool,

    /// Directory for cached results.
    #[arg(long, global = true, env = "HOLOLAB_CACHE", value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Report cache activity on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cartan matrix and positive roots.
    Roots { system: String },
    /// Dimension of an irreducible module (of the Levi factor with --marking).
    Dim {
        system: String,
        weight: String,
        #[arg(long)]
        marking: Option<String>,
    },
    /// Decompose a tensor product of two irreducibles.
    Tensor { system: String, left: String, right: String },
    /// Decompose a symmetric power of an irreducible.
    Sym { system: String, weight: String, k: usize },
    /// Cohomology of an irreducible homogeneous bundle.
    Bbw { system: String, marking: String, weight: String },
    /// Graded pieces and cohomology of the cotangent bundle.
    Cotangent {
        system: String,
        marking: String,
        /// Use the tangent bundle instead.
        #[arg(long)]
        tangent: bool,
    },
    /// Graded pieces and cohomology of the first jet bundle of a line bundle.
    Jet {
        system: String,
        weight: String,
        #[arg(long)]
        marking: Option<String>,
    },
    /// Cohomology of L ⊗ S^k(J^1 L)^* for k = 1..=kmax.
    Legendre {
        system: String,
        weight: String,
        #[arg(long)]
        marking: Option<String>,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Obstructions for a complete family with normal bundle N.
    Kodaira {
        system: String,
        marking: String,
        /// Graded pieces of N, e.g. `2*[1]` or `[1,0]+[-1,1]`.
        pieces: String,
    },
    /// Torsion number of a G-structure.
    Torsion {
        #[arg(long = "dimM")]
        dim_m: u64,
        #[arg(long = "dimX")]
        dim_x: u64,
        /// Defaults to the rank attained by the flat model.
        #[arg(long = "rankD")]
        rank_d: Option<u64>,
    },
    /// Classify one irreducible representation.
    Screen {
        system: String,
        weight: String,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Dimensions of the holonomy table rows.
    Table,
    /// Screen every simple system and dominant weight in range.
    Sweep {
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        #[arg(long, default_value_t = 3)]
        max_level: u32,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Exit status for a failed command: 2 for input that does not parse, 1 for
/// input the engine rejects.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hololab_core::Error>() {
        Some(hololab_core::Error::Parse { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let GlobalOpts { json, cache_dir, verbose } = cli.global;
    if let Command::Sweep {
        max_rank,
        max_level,
        kmax,
        jobs,
    } = cli.command
    {
        let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let lines = commands::sweep(max_rank, max_level, kmax, jobs, json)?;
        let mut out = std::io::stdout().lock();
        for line in lines {
            writeln!(out, "{line}").context("writing output")?;
        }
        return Ok(());
    }
    let request = commands::Request::from_command(cli.command)?;
    let cache = cache_dir.as_deref().and_then(|d| Cache::open(d, verbose));
    let key = cache.as_ref().map(|c| c.key(request.op(), &request.inputs(), json));
    if let (Some(cache), Some(key)) = (&cache, &key) {
        match cache.get(key) {
            Lookup::Hit(body) => {
                cache.note(&format!("hit {key}"));
                print!("{body}");
                return Ok(());
            }
            Lookup::Miss => cache.note(&format!("miss {key}")),
            Lookup::Corrupt(why) => {
                eprintln!("warning: ignoring corrupt cache entry {key} ({why}); recomputing");
            }
        }
    }
    let output = request.execute()?;
    let body = if json { output.json_document() } else { output.text };
    if let (Some(cache), Some(key)) = (&cache, &key) {
        cache.put(key, &body);
    }
    print!("{body}");
    Ok(())
}
