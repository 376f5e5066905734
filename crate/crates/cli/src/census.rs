use std::time::Duration;

use clap::{Args, Subcommand, ValueEnum};
use revsynth::optimal::{build_library, BuildOptions, CircuitLibrary, LibrarySpec, SearchOptions};
use revsynth::oracle::{oracle_census, rom_census, xor_census};
use revsynth::{Exec, GateLibrary};

use crate::{CliError, CliResult};

/// First line of every CSV table; bumped whenever columns change.
pub const CSV_SCHEMA: &str = "# revsynth-census-csv 1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct CensusOpts {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Memory budget for library construction in MiB.
    #[arg(long)]
    budget_mb: Option<usize>,
    /// Wall-clock limit in seconds for each search.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum CensusCmd {
    /// Optimal sizes of all 3-wire permutations under eight gate libraries.
    Table1(CensusOpts),
    /// Optimal sizes of the 3-input predicate oracles on 4 wires.
    Table2 {
        #[command(flatten)]
        opts: CensusOpts,
        #[arg(long, default_value = "CNT")]
        gates: GateLibrary,
        /// Library depth; deeper costs are found by search.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Sizes of the PPRM-based construction with 3 ROM wires.
    Table3Xor(CensusOpts),
    /// Optimal sizes of `b ^= f(x)` with ROM wires and writable wires.
    Table3Opt {
        #[command(flatten)]
        opts: CensusOpts,
        #[arg(long, default_value_t = 3)]
        rom: usize,
        #[arg(long, default_value_t = 2)]
        writable: usize,
        /// Most ROM controls per gate (1 gives the Toffoli-restricted row).
        #[arg(long)]
        rom_controls: Option<u8>,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
    },
}

fn print_hist(title: &str, hist: &[usize], format: Format) {
    match format {
        Format::Csv => {
            println!("{CSV_SCHEMA}");
            println!("size,{title}");
            for (s, c) in hist.iter().enumerate() {
                println!("{s},{c}");
            }
        }
        Format::Text => {
            println!("{title}");
            for (s, c) in hist.iter().enumerate() {
                println!("{s:>4} {c:>8}");
            }
            println!("total {}", hist.iter().sum::<usize>());
        }
    }
}

fn build(
    spec: LibrarySpec,
    max_size: usize,
    opts: &CensusOpts,
    exec: Exec,
) -> CliResult<CircuitLibrary> {
    let lib = build_library(
        spec,
        &BuildOptions {
            max_size,
            budget_bytes: opts.budget_mb.map(|mb| mb << 20),
            exec,
        },
    )?;
    if lib.is_truncated() {
        eprintln!(
            "partial: library stopped at size {} by the memory budget",
            lib.max_size()
        );
    }
    Ok(lib)
}

fn search_opts(opts: &CensusOpts, exec: Exec) -> SearchOptions {
    SearchOptions {
        time_limit: opts.time_limit.map(Duration::from_secs_f64),
        exec,
        ..SearchOptions::default()
    }
}

fn table1(opts: &CensusOpts, exec: Exec) -> CliResult<()> {
    let mut columns = Vec::new();
    let mut partial = false;
    for (name, gl) in GateLibrary::TABLE1 {
        let lib = build(LibrarySpec::full(3, gl)?, usize::MAX, opts, exec)?;
        partial |= !lib.is_complete();
        columns.push((name, lib.bucket_sizes()));
    }
    let rows = columns.iter().map(|(_, h)| h.len()).max().unwrap_or(0);
    let cell = |h: &Vec<usize>, s: usize| h.get(s).copied().unwrap_or(0);
    let names: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
    match opts.format {
        Format::Csv => {
            println!("{CSV_SCHEMA}");
            println!("size,{}", names.join(","));
            for s in 0..rows {
                let row: Vec<String> = columns
                    .iter()
                    .map(|(_, h)| cell(h, s).to_string())
                    .collect();
                println!("{s},{}", row.join(","));
            }
        }
        Format::Text => {
            print!("size");
            for n in &names {
                print!(" {n:>6}");
            }
            println!();
            for s in 0..rows {
                print!("{s:>4}");
                for (_, h) in &columns {
                    print!(" {:>6}", cell(h, s));
                }
                println!();
            }
            print!("sum ");
            for (_, h) in &columns {
                print!(" {:>6}", h.iter().sum::<usize>());
            }
            println!();
        }
    }
    if partial {
        println!("# partial");
        return Err(CliError::Partial(
            "memory budget reached before every library closed".into(),
        ));
    }
    Ok(())
}

pub fn run(cmd: &CensusCmd, exec: Exec) -> CliResult<()> {
    match cmd {
        CensusCmd::Table1(opts) => table1(opts, exec),
        CensusCmd::Table2 {
            opts,
            gates,
            max_size,
        } => {
            let lib = build(LibrarySpec::full(4, *gates)?, *max_size, opts, exec)?;
            let hist = oracle_census(&lib, &search_opts(opts, exec))?;
            print_hist(&format!("{gates} oracles"), &hist, opts.format);
            Ok(())
        }
        CensusCmd::Table3Xor(opts) => {
            print_hist("xor construction", &xor_census(3)?, opts.format);
            Ok(())
        }
        CensusCmd::Table3Opt {
            opts,
            rom,
            writable,
            rom_controls,
            max_size,
        } => {
            let spec = LibrarySpec::rom(*rom, *writable, GateLibrary::CNT, *rom_controls)?;
            let lib = build(spec, *max_size, opts, exec)?;
            let hist = rom_census(&lib, &search_opts(opts, exec))?;
            let title = match rom_controls {
                Some(c) => format!("optimal {rom}+{writable}, ≤{c} ROM controls"),
                None => format!("optimal {rom}+{writable}"),
            };
            print_hist(&title, &hist, opts.format);
            Ok(())
        }
    }
}
