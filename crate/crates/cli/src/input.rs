use std::path::PathBuf;

use clap::Args;
use revsynth::oracle::{oracle_perm, BoolFunc};
use revsynth::{CycleNotation, Permutation};

use crate::{read_file, CliError, CliResult};

/// One way of naming the permutation to synthesize.
#[derive(Args, Debug)]
#[group(skip)]
pub struct PermInput {
    /// Cycle notation such as "(0,1,2)(3,4)"; needs --width.
    #[arg(long, requires = "width", group = "source")]
    cycles: Option<String>,
    /// Space-separated images of 0, 1, 2, ...
    #[arg(long, allow_hyphen_values = true, group = "source")]
    images: Option<String>,
    /// File holding the images in the same format; `#` starts a comment.
    #[arg(long, group = "source")]
    perm_file: Option<PathBuf>,
    /// Oracle `b ^= f(x)` of a predicate given as hex or minterms; the
    /// predicate has arity width − 1.
    #[arg(long, requires = "width", group = "source")]
    oracle: Option<String>,
    /// Wire count for --cycles and --oracle.
    #[arg(long)]
    width: Option<usize>,
}

impl PermInput {
    pub fn permutation(&self) -> CliResult<Permutation> {
        if let Some(text) = &self.cycles {
            let cycles: CycleNotation = text.parse()?;
            return Ok(Permutation::from_cycles(&cycles, self.width_or_usage()?)?);
        }
        if let Some(text) = &self.images {
            return Ok(Permutation::parse_truth_table(text)?);
        }
        if let Some(path) = &self.perm_file {
            return Ok(Permutation::parse_truth_table(&read_file(path)?)?);
        }
        if let Some(text) = &self.oracle {
            let w = self.width_or_usage()?;
            if w < 2 {
                return Err(CliError::Usage("--oracle needs at least 2 wires".into()));
            }
            return Ok(oracle_perm(&BoolFunc::parse(w - 1, text)?));
        }
        Err(CliError::Usage("no permutation given".into()))
    }

    fn width_or_usage(&self) -> CliResult<usize> {
        self.width
            .ok_or_else(|| CliError::Usage("--width is required".into()))
    }
}
