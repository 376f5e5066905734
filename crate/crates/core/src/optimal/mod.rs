//! Optimal synthesis: a level-ordered library of optimal circuits and
//! iterative-deepening search on top of it.
//!
//! Two domains are supported. A *full* domain covers every permutation of
//! up to 4 wires. A *ROM* domain has `r` read-only wires (the low wires)
//! that gates may control but never write, plus up to a few writable wires;
//! its states are the permutations that fix every ROM value.
//!
//! Both pack a state into a `u64` key: 4 bits per image for full domains,
//! the writable image bits per input for ROM domains.

mod library;
mod persist;
mod search;

pub use library::{build_library, BuildOptions, CircuitLibrary};
pub use persist::{load_library, save_library, FORMAT_VERSION, MAGIC};
pub use search::{find_optimal, SearchOptions, SearchResult};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::{Gate, GateLibrary};
use crate::perm::Permutation;

/// Images of every input, `len = 2^width ≤ 32` entries used.
pub(crate) type State = [u8; 32];

/// Which permutations and gates a library covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LibrarySpec {
    width: usize,
    library: GateLibrary,
    rom: usize,
    max_rom_controls: Option<u8>,
}

impl LibrarySpec {
    /// All permutations of `width ≤ 4` wires.
    pub fn full(width: usize, library: GateLibrary) -> Result<LibrarySpec> {
        if !(1..=4).contains(&width) {
            return Err(Error::WidthOutOfRange(width));
        }
        Ok(LibrarySpec {
            width,
            library,
            rom: 0,
            max_rom_controls: None,
        })
    }

    /// `rom` read-only low wires plus `writable` high wires. Gates never
    /// target ROM wires and use at most `max_rom_controls` ROM controls.
    pub fn rom(
        rom: usize,
        writable: usize,
        library: GateLibrary,
        max_rom_controls: Option<u8>,
    ) -> Result<LibrarySpec> {
        let width = rom + writable;
        if rom == 0 || writable == 0 || width > 5 || (writable << width) > 64 {
            return Err(Error::Precondition(format!(
                "ROM domain {rom}+{writable} does not pack into 64 bits"
            )));
        }
        Ok(LibrarySpec {
            width,
            library,
            rom,
            max_rom_controls,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn library(&self) -> GateLibrary {
        self.library
    }

    pub fn rom_wires(&self) -> usize {
        self.rom
    }

    pub fn max_rom_controls(&self) -> Option<u8> {
        self.max_rom_controls
    }

    pub(crate) fn len(&self) -> usize {
        1 << self.width
    }

    fn rom_mask(&self) -> u32 {
        (1 << self.rom) - 1
    }

    /// Gates of the domain in canonical order.
    pub fn gates(&self) -> Vec<Gate> {
        let rom = self.rom_mask();
        self.library
            .enumerate(self.width)
            .into_iter()
            .filter(|g| g.written() & rom == 0)
            .filter(|g| {
                let ctl = g.support() & !g.written() & rom;
                self.max_rom_controls
                    .is_none_or(|cap| ctl.count_ones() <= u32::from(cap))
            })
            .collect()
    }

    pub(crate) fn key(&self, st: &State) -> u64 {
        let len = self.len();
        if self.rom == 0 {
            (0..len).fold(0u64, |k, i| k | u64::from(st[i]) << (4 * i))
        } else {
            let w = self.width - self.rom;
            (0..len).fold(0u64, |k, i| k | u64::from(st[i] >> self.rom) << (w * i))
        }
    }

    pub(crate) fn state(&self, key: u64) -> State {
        let mut st = [0u8; 32];
        let len = self.len();
        if self.rom == 0 {
            for (i, v) in st.iter_mut().enumerate().take(len) {
                *v = (key >> (4 * i) & 0xF) as u8;
            }
        } else {
            let w = self.width - self.rom;
            let wmask = (1u64 << w) - 1;
            for (i, v) in st.iter_mut().enumerate().take(len) {
                let hi = (key >> (w * i) & wmask) as u8;
                *v = (i as u8 & self.rom_mask() as u8) | hi << self.rom;
            }
        }
        st
    }

    pub(crate) fn identity(&self) -> State {
        let mut st = [0u8; 32];
        for (i, v) in st.iter_mut().enumerate().take(self.len()) {
            *v = i as u8;
        }
        st
    }

    pub(crate) fn state_of(&self, p: &Permutation) -> Result<State> {
        if p.width() != self.width {
            return Err(Error::WidthMismatch(p.width(), self.width));
        }
        let rom = self.rom_mask();
        let mut st = [0u8; 32];
        for (x, v) in st.iter_mut().enumerate().take(self.len()) {
            let y = p.apply(x as u32);
            if y & rom != x as u32 & rom {
                return Err(Error::NotConstructible(format!(
                    "input {x} changes a read-only wire"
                )));
            }
            *v = y as u8;
        }
        Ok(st)
    }

    pub fn key_of(&self, p: &Permutation) -> Result<u64> {
        Ok(self.key(&self.state_of(p)?))
    }
}

/// Per-gate lookup tables over values `0..32`.
pub(crate) fn gate_tables(gates: &[Gate]) -> Vec<[u8; 32]> {
    gates
        .iter()
        .map(|g| std::array::from_fn(|v| g.apply(v as u32) as u8))
        .collect()
}

/// Optimal-size histogram of every permutation reachable with `library` on
/// `width` wires; index = size. Errors if `budget_bytes` runs out first.
pub fn size_distribution(
    library: GateLibrary,
    width: usize,
    exec: Exec,
    budget_bytes: Option<usize>,
) -> Result<Vec<usize>> {
    let spec = LibrarySpec::full(width, library)?;
    let lib = build_library(
        spec,
        &BuildOptions {
            max_size: usize::MAX,
            budget_bytes,
            exec,
        },
    )?;
    if !lib.is_complete() {
        return Err(Error::BudgetExceeded {
            reached: lib.max_size(),
        });
    }
    Ok(lib.bucket_sizes())
}

/// One histogram per gate library of the three-wire census, in the order
/// N, C, T, NC, CT, NT, CNT, CNTS.
pub fn table1(exec: Exec) -> Result<Vec<(&'static str, Vec<usize>)>> {
    GateLibrary::TABLE1
        .iter()
        .map(|&(name, lib)| Ok((name, size_distribution(lib, 3, exec, None)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_counts_per_domain() {
        let cnt = GateLibrary::CNT;
        assert_eq!(LibrarySpec::full(3, cnt).unwrap().gates().len(), 12);
        assert_eq!(LibrarySpec::full(4, cnt).unwrap().gates().len(), 28);
        assert_eq!(LibrarySpec::rom(3, 2, cnt, None).unwrap().gates().len(), 22);
        assert_eq!(
            LibrarySpec::rom(3, 2, cnt, Some(1)).unwrap().gates().len(),
            16
        );
        assert_eq!(
            LibrarySpec::rom(2, 2, cnt, None).unwrap().gates().len(),
            2 + 6 + 6
        );
        assert!(LibrarySpec::rom(4, 2, cnt, None).is_err());
        assert!(LibrarySpec::full(5, cnt).is_err());
    }

    #[test]
    fn keys_round_trip() {
        let p = Permutation::from_images(vec![3, 1, 0, 2, 7, 6, 4, 5]).unwrap();
        let spec = LibrarySpec::full(3, GateLibrary::CNT).unwrap();
        let st = spec.state_of(&p).unwrap();
        assert_eq!(spec.state(spec.key(&st)), st);

        let spec = LibrarySpec::rom(2, 2, GateLibrary::CNT, None).unwrap();
        let q = Gate::toffoli(0, 1, 3).permutation(4).unwrap();
        let st = spec.state_of(&q).unwrap();
        assert_eq!(spec.state(spec.key(&st)), st);
        assert!(spec
            .state_of(&Gate::not(0).permutation(4).unwrap())
            .is_err());
    }
}
