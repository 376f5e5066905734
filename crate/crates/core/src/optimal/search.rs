use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::library::CircuitLibrary;
use super::State;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::Circuit;
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Largest cost tried before giving up.
    pub ceiling: usize,
    pub time_limit: Option<Duration>,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            ceiling: 32,
            time_limit: None,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub circuit: Circuit,
    pub cost: usize,
    /// Library entries tried as circuit suffixes.
    pub nodes_expanded: u64,
    pub wall_time: Duration,
}

struct Ctx<'a> {
    lib: &'a CircuitLibrary,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    expired: AtomicBool,
}

impl Ctx<'_> {
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.expired.store(true, Ordering::Relaxed);
                }
            }
        }
        !self.expired.load(Ordering::Relaxed)
    }

    /// A circuit of at most `r` gates for `st`, assuming none shorter than
    /// `r` exists once `r` exceeds the library depth.
    ///
    /// With library depth `m`: for `r ≤ m` a lookup; for `m < r ≤ 2m` every
    /// stored circuit of size `r − m` is tried as a suffix and the remaining
    /// prefix looked up; beyond `2m` every size-`m` circuit is tried as a
    /// suffix and the prefix searched recursively at `r − m`.
    fn find_circ(&self, r: usize, st: &State, exec: Exec) -> Option<Vec<u8>> {
        let lib = self.lib;
        let m = lib.max_size();
        if r <= m {
            return lib
                .index
                .get(&lib.spec.key(st))
                .filter(|&&(s, _)| s as usize <= r)
                .map(|&(s, pos)| lib.buckets[s as usize].circuit(pos as usize).to_vec());
        }
        let (bucket, direct) = if r <= 2 * m {
            (&lib.buckets[r - m], true)
        } else {
            (&lib.buckets[m], false)
        };
        exec.find_map_first_index(bucket.len(), |pos| {
            if !self.tick() {
                return None;
            }
            let suffix = bucket.circuit(pos);
            let rest = lib.strip(st, suffix);
            let mut prefix = if direct {
                lib.lookup_key(lib.spec.key(&rest))?.to_vec()
            } else {
                self.find_circ(r - m, &rest, Exec::Sequential)?
            };
            prefix.extend_from_slice(suffix);
            Some(prefix)
        })
    }
}

/// Minimal-gate circuit for `p` over the library's gates.
///
/// Costs up to the library depth are answered by lookup. Beyond it the
/// cost bound grows one gate at a time, so the first circuit found is
/// optimal. Fails with `Unreachable` when the library is complete and lacks
/// `p`, or when `opts.ceiling` is passed.
pub fn find_optimal(
    p: &Permutation,
    lib: &CircuitLibrary,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let start = Instant::now();
    let st = lib.spec.state_of(p)?;
    let ctx = Ctx {
        lib,
        deadline: opts.time_limit.map(|t| start + t),
        nodes: AtomicU64::new(0),
        expired: AtomicBool::new(false),
    };
    let m = lib.max_size();
    let done = |idx: Vec<u8>, ctx: &Ctx| SearchResult {
        cost: idx.len(),
        circuit: lib.to_circuit(&idx),
        nodes_expanded: ctx.nodes.load(Ordering::Relaxed),
        wall_time: start.elapsed(),
    };
    if let Some(idx) = ctx.find_circ(m, &st, opts.exec) {
        return Ok(done(idx, &ctx));
    }
    if lib.is_complete() || m == 0 {
        return Err(Error::Unreachable(m));
    }
    for r in m + 1..=opts.ceiling {
        let found = ctx.find_circ(r, &st, opts.exec);
        if ctx.expired.load(Ordering::Relaxed) {
            return Err(Error::TimeLimit);
        }
        if let Some(idx) = found {
            let res = done(idx, &ctx);
            debug_assert!(res.circuit.computes(p));
            return Ok(res);
        }
    }
    Err(Error::Unreachable(opts.ceiling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{Gate, GateLibrary};
    use crate::optimal::{build_library, BuildOptions, LibrarySpec};
    use crate::perm::CycleNotation;

    fn lib(gl: GateLibrary, m: usize) -> CircuitLibrary {
        build_library(
            LibrarySpec::full(3, gl).unwrap(),
            &BuildOptions {
                max_size: m,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn lookup_and_deepening_examples() {
        let l = lib(GateLibrary::CNT, 2);
        let id = Permutation::identity(3).unwrap();
        let r = find_optimal(&id, &l, &SearchOptions::default()).unwrap();
        assert_eq!((r.cost, r.circuit.len()), (0, 0));

        let fig =
            Permutation::from_cycles(&"(2,3)(6,7)".parse::<CycleNotation>().unwrap(), 3).unwrap();
        let r = find_optimal(&fig, &l, &SearchOptions::default()).unwrap();
        assert_eq!(r.cost, 1);
        assert_eq!(r.circuit.gates(), &[Gate::cnot(1, 0)]);

        // A cost-4 permutation needs deepening past the depth-2 library.
        let deep = Circuit::from_gates(
            3,
            vec![
                Gate::toffoli(0, 1, 2),
                Gate::not(0),
                Gate::cnot(2, 1),
                Gate::toffoli(1, 2, 0),
            ],
        )
        .unwrap();
        let p = deep.permutation();
        let full = lib(GateLibrary::CNT, 20);
        let want = full.get(&p).unwrap().unwrap().len();
        let r = find_optimal(&p, &l, &SearchOptions::default()).unwrap();
        assert_eq!(r.cost, want);
        assert!(r.circuit.computes(&p));
        assert!(r.nodes_expanded > 0);
    }

    #[test]
    fn unreachable_cases() {
        let t = lib(GateLibrary::T, 20);
        assert!(t.is_complete());
        let odd = Permutation::xor_mask(3, 1).unwrap();
        assert!(matches!(
            find_optimal(&odd, &t, &SearchOptions::default()),
            Err(Error::Unreachable(_))
        ));
        let shallow = lib(GateLibrary::T, 1);
        let opts = SearchOptions {
            ceiling: 6,
            ..Default::default()
        };
        assert!(matches!(
            find_optimal(&odd, &shallow, &opts),
            Err(Error::Unreachable(6))
        ));
    }

    #[test]
    fn strategies_agree_on_circuits() {
        let l = lib(GateLibrary::CNT, 2);
        let full = lib(GateLibrary::CNT, 20);
        for (p, _) in full.entries(6).step_by(997) {
            let a = find_optimal(
                &p,
                &l,
                &SearchOptions {
                    exec: Exec::Sequential,
                    ..Default::default()
                },
            )
            .unwrap();
            let b = find_optimal(
                &p,
                &l,
                &SearchOptions {
                    exec: Exec::Parallel,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(a.circuit, b.circuit);
            assert_eq!(a.cost, 6);
        }
    }
}
