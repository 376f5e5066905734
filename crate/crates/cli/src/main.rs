//! `revsynth`: command-line front end for reversible circuit synthesis.
//!
//! Exit codes: 0 success, 1 `verify` found a difference, 2 usage or input
//! error, 3 not synthesizable, 4 resource limit (partial output may have
//! been printed), 5 corrupt library file.

mod census;
mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revsynth::constructive::{synth_n, synth_tctn, synth_with_ancilla, StagedCircuit};
use revsynth::gf2::{synth_linear, BitMatrix};
use revsynth::optimal::{
    build_library, find_optimal, load_library, save_library, BuildOptions, CircuitLibrary,
    LibrarySpec, SearchOptions,
};
use revsynth::rewrite::{cancel_adjacent, push_nots_right};
use revsynth::{Circuit, ErrorCategory, Exec, GateKind, GateLibrary};

use input::PermInput;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] revsynth::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Work stopped on a limit after printing partial results.
    #[error("partial result: {0}")]
    Partial(String),
    /// `verify` found the circuits different; the report is already printed.
    #[error("circuits differ")]
    Differ,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Differ => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Partial(_) => 4,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Usage => 2,
                ErrorCategory::Unsynthesizable => 3,
                ErrorCategory::ResourceLimit => 4,
                ErrorCategory::Corruption => 5,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "revsynth",
    version,
    about = "Reversible logic synthesis with NOT, CNOT, TOFFOLI and SWAP gates"
)]
struct Cli {
    /// Worker threads for parallel phases (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Run every phase sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constructive synthesis of a permutation.
    Synth(SynthArgs),
    /// Minimal-gate circuit via a circuit library and iterative deepening.
    Optimal(OptimalArgs),
    /// Build, inspect or validate library files.
    #[command(subcommand)]
    Library(LibraryCmd),
    /// Reproduce the size censuses.
    #[command(subcommand)]
    Census(census::CensusCmd),
    /// Simulate a circuit file.
    Sim(SimArgs),
    /// Check whether two circuit files compute the same permutation.
    Verify { a: PathBuf, b: PathBuf },
    /// Rewrite a circuit file.
    Rewrite(RewriteArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Toffoli | CNOT | Toffoli | NOT stages.
    Tctn,
    /// CNOT-only, for linear permutations.
    Linear,
    /// NOT-only, for XOR-mask permutations.
    NOnly,
    /// T|C|T|N on one extra wire, for odd permutations.
    Ancilla,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    perm: PermInput,
    #[arg(long, value_enum, default_value_t = Method::Tctn)]
    method: Method,
    /// Fall back to one extra wire when the permutation is odd.
    #[arg(long)]
    ancilla: bool,
    /// Write the circuit here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LimitArgs {
    /// Memory budget for library construction in MiB.
    #[arg(long)]
    budget_mb: Option<usize>,
    /// Wall-clock limit in seconds for search phases.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl LimitArgs {
    fn budget_bytes(&self) -> Option<usize> {
        self.budget_mb.map(|mb| mb << 20)
    }

    fn time_limit(&self) -> Option<Duration> {
        self.time_limit.map(Duration::from_secs_f64)
    }
}

#[derive(Args, Debug)]
struct OptimalArgs {
    #[command(flatten)]
    perm: PermInput,
    /// Library file; defaults to `<gates>-w<width>.rvlb` in $REVSYNTH_LIB_DIR
    /// when present, otherwise a library is built in memory.
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long, env = "REVSYNTH_LIB_DIR")]
    lib_dir: Option<PathBuf>,
    /// Gate library for an in-memory build.
    #[arg(long, default_value = "CNT")]
    gates: GateLibrary,
    /// Library depth for an in-memory build (default: 8 on ≤3 wires, 4 on 4).
    #[arg(long)]
    max_size: Option<usize>,
    /// Give up above this many gates.
    #[arg(long, default_value_t = 32)]
    ceiling: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum LibraryCmd {
    /// Build a library and save it.
    Build(LibraryBuildArgs),
    /// Print header fields and bucket sizes.
    Info { path: PathBuf },
    /// Load with full validation.
    Verify { path: PathBuf },
}

#[derive(Args, Debug)]
struct LibraryBuildArgs {
    #[arg(long, default_value = "CNT")]
    gates: GateLibrary,
    /// Total wire count.
    #[arg(long)]
    width: usize,
    /// Read-only low wires (ROM domain); 0 for the full domain.
    #[arg(long, default_value_t = 0)]
    rom: usize,
    /// Most ROM controls per gate in a ROM domain.
    #[arg(long)]
    rom_controls: Option<u8>,
    #[arg(long)]
    max_size: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SimArgs {
    circuit: PathBuf,
    /// Print only the image of this input.
    #[arg(long)]
    input: Option<u32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RewriteOp {
    /// Move every NOT gate to the end.
    PushNots,
    /// Remove adjacent identical gates.
    Cancel,
}

#[derive(Args, Debug)]
struct RewriteArgs {
    #[arg(value_enum)]
    op: RewriteOp,
    circuit: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_circuit(path: &Path) -> CliResult<Circuit> {
    Ok(read_file(path)?.parse::<Circuit>()?)
}

fn stage_report(s: &StagedCircuit) {
    for (label, c) in s.stages() {
        eprintln!("stage {label}: {} gates", c.len());
    }
}

fn cmd_synth(args: &SynthArgs) -> CliResult<()> {
    let p = args.perm.permutation()?;
    let n = p.width();
    let odd = !p.parity().is_even();
    let (text, verified) = match args.method {
        Method::Linear => {
            let c = synth_linear(&BitMatrix::of_permutation(&p)?)?;
            eprintln!("C gates: {} (bound n² = {})", c.len(), n * n);
            (c.to_string(), c.computes(&p))
        }
        Method::NOnly => {
            let c = synth_n(&p)?;
            eprintln!("N gates: {} (bound n = {n})", c.len());
            (c.to_string(), c.computes(&p))
        }
        Method::Tctn | Method::Ancilla => {
            let lift = args.method == Method::Ancilla || (args.ancilla && odd && n > 3);
            let staged = if lift {
                synth_with_ancilla(&p)?
            } else {
                synth_tctn(&p)?
            };
            stage_report(&staged);
            let w = staged.width();
            if w > 3 {
                eprintln!(
                    "bounds: T ≤ {}, C ≤ {}, N ≤ {w}",
                    3 * ((1usize << w) + w + 1) * (3 * w - 7),
                    w * w
                );
            }
            let flat = staged.flatten();
            let ok = if lift {
                flat.computes(&p.lift()?)
            } else {
                flat.computes(&p)
            };
            if lift {
                eprintln!("extra wire: {} (most significant), restored", w - 1);
            }
            (staged.to_string(), ok)
        }
    };
    if !verified {
        return Err(CliError::Usage(
            "internal error: circuit failed verification".into(),
        ));
    }
    eprintln!("verified: true");
    write_output(args.output.as_deref(), &text)
}

fn exec_of(cli: &Cli) -> Exec {
    if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn obtain_library(args: &OptimalArgs, width: usize, exec: Exec) -> CliResult<CircuitLibrary> {
    let from_dir = args
        .lib_dir
        .as_ref()
        .map(|d| d.join(format!("{}-w{width}.rvlb", args.gates)))
        .filter(|p| p.exists());
    if let Some(path) = args.library.as_ref().or(from_dir.as_ref()) {
        let lib = load_library(path)?;
        if lib.spec().width() != width || lib.spec().rom_wires() != 0 {
            return Err(revsynth::Error::LibraryMismatch(format!(
                "{} covers {} wires, permutation has {width}",
                path.display(),
                lib.spec().width()
            ))
            .into());
        }
        return Ok(lib);
    }
    let m = args.max_size.unwrap_or(if width <= 3 { 8 } else { 4 });
    let lib = build_library(
        LibrarySpec::full(width, args.gates)?,
        &BuildOptions {
            max_size: m,
            budget_bytes: args.limits.budget_bytes(),
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

fn cmd_optimal(args: &OptimalArgs, exec: Exec) -> CliResult<()> {
    let p = args.perm.permutation()?;
    let lib = obtain_library(args, p.width(), exec)?;
    let res = find_optimal(
        &p,
        &lib,
        &SearchOptions {
            ceiling: args.ceiling,
            time_limit: args.limits.time_limit(),
            exec,
        },
    )?;
    if !res.circuit.computes(&p) {
        return Err(CliError::Usage(
            "internal error: circuit failed verification".into(),
        ));
    }
    eprintln!(
        "cost {} (library depth {}, {} nodes, {:.3}s)",
        res.cost,
        lib.max_size(),
        res.nodes_expanded,
        res.wall_time.as_secs_f64()
    );
    write_output(args.output.as_deref(), &res.circuit.to_string())
}

fn describe(lib: &CircuitLibrary) -> String {
    let spec = lib.spec();
    let mut s = format!("gates: {}\nwidth: {}\n", spec.library(), spec.width());
    if spec.rom_wires() > 0 {
        s += &format!("rom wires: {}\n", spec.rom_wires());
        if let Some(c) = spec.max_rom_controls() {
            s += &format!("rom controls per gate: ≤ {c}\n");
        }
    }
    s += &format!(
        "max size: {}\ncomplete: {}\ntruncated: {}\nentries: {}\n",
        lib.max_size(),
        lib.is_complete(),
        lib.is_truncated(),
        lib.len()
    );
    s += "size,count\n";
    for (size, count) in lib.bucket_sizes().iter().enumerate() {
        s += &format!("{size},{count}\n");
    }
    s
}

fn cmd_library(cmd: &LibraryCmd, exec: Exec) -> CliResult<()> {
    match cmd {
        LibraryCmd::Build(a) => {
            let spec = if a.rom == 0 {
                LibrarySpec::full(a.width, a.gates)?
            } else {
                if a.rom >= a.width {
                    return Err(CliError::Usage("--rom must be smaller than --width".into()));
                }
                LibrarySpec::rom(a.rom, a.width - a.rom, a.gates, a.rom_controls)?
            };
            let lib = build_library(
                spec,
                &BuildOptions {
                    max_size: a.max_size,
                    budget_bytes: a.limits.budget_bytes(),
                    exec,
                },
            )?;
            save_library(&lib, &a.output)?;
            print!("{}", describe(&lib));
            if lib.is_truncated() {
                return Err(CliError::Partial(format!(
                    "memory budget reached; saved sizes up to {}",
                    lib.max_size()
                )));
            }
            Ok(())
        }
        LibraryCmd::Info { path } => {
            print!("{}", describe(&load_library(path)?));
            Ok(())
        }
        LibraryCmd::Verify { path } => {
            let lib = load_library(path)?;
            println!("ok: {} entries, sizes 0..={}", lib.len(), lib.max_size());
            Ok(())
        }
    }
}

fn cmd_sim(args: &SimArgs) -> CliResult<()> {
    let c = read_circuit(&args.circuit)?;
    match args.input {
        Some(x) => {
            if x >> c.width() != 0 {
                return Err(CliError::Usage(format!(
                    "input {x} does not fit {} wires",
                    c.width()
                )));
            }
            println!("{}", c.apply(x));
        }
        None => {
            let p = c.permutation();
            println!("{}", p.to_truth_table_string());
            println!("cycles: {}", p.cycles());
            println!(
                "parity: {}",
                if p.parity().is_even() { "even" } else { "odd" }
            );
        }
    }
    Ok(())
}

fn cmd_verify(a: &Path, b: &Path) -> CliResult<()> {
    let (ca, cb) = (read_circuit(a)?, read_circuit(b)?);
    if ca.width() != cb.width() {
        println!("unequal: widths {} and {}", ca.width(), cb.width());
        return Err(CliError::Differ);
    }
    match (0..1u32 << ca.width()).find(|&x| ca.apply(x) != cb.apply(x)) {
        None => {
            println!("equal");
            Ok(())
        }
        Some(x) => {
            println!(
                "unequal: input {x} maps to {} and {}",
                ca.apply(x),
                cb.apply(x)
            );
            Err(CliError::Differ)
        }
    }
}

fn cmd_rewrite(args: &RewriteArgs) -> CliResult<()> {
    let c = read_circuit(&args.circuit)?;
    let out = match args.op {
        RewriteOp::PushNots => push_nots_right(&c)?,
        RewriteOp::Cancel => cancel_adjacent(&c),
    };
    if !out.computes(&c.permutation()) {
        return Err(CliError::Usage(
            "internal error: rewrite changed the permutation".into(),
        ));
    }
    eprintln!(
        "{} gates -> {} gates ({} NOT)",
        c.len(),
        out.len(),
        out.count_kind(GateKind::N)
    );
    write_output(args.output.as_deref(), &out.to_string())
}

fn run(cli: &Cli) -> CliResult<()> {
    let exec = exec_of(cli);
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Optimal(a) => cmd_optimal(a, exec),
        Command::Library(c) => cmd_library(c, exec),
        Command::Census(c) => census::run(c, exec),
        Command::Sim(a) => cmd_sim(a),
        Command::Verify { a, b } => cmd_verify(a, b),
        Command::Rewrite(a) => cmd_rewrite(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Exec::with_jobs(cli.jobs, || run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Differ) {
                let category = match e.exit_code() {
                    2 => "usage",
                    3 => "unsynthesizable",
                    4 => "resource-limit",
                    5 => "corruption",
                    _ => "error",
                };
                eprintln!("error[{category}]: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_categories() {
        assert_eq!(CliError::Differ.exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::from(revsynth::Error::OddPermutation).exit_code(),
            3
        );
        assert_eq!(CliError::from(revsynth::Error::TimeLimit).exit_code(), 4);
        assert_eq!(CliError::Partial("x".into()).exit_code(), 4);
        assert_eq!(
            CliError::from(revsynth::Error::CorruptLibrary("x".into())).exit_code(),
            5
        );
    }

    #[test]
    fn command_line_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["revsynth", "--jobs", "2", "synth", "--images", "1 0 3 2"])
            .unwrap();
        assert_eq!(cli.jobs, 2);
        assert!(
            Cli::try_parse_from(["revsynth", "synth", "--images", "0 1", "--perm-file", "f"])
                .is_err()
        );
    }
}
