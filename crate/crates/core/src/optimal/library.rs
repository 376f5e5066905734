use rustc_hash::{FxHashMap, FxHashSet};

use super::{gate_tables, LibrarySpec, State};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::{Circuit, Gate};
use crate::perm::Permutation;

/// Rough heap cost of one stored entry besides its gate bytes: the key in
/// its bucket plus one hash-index slot.
const ENTRY_OVERHEAD: usize = 8 + 24;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Largest circuit size to store.
    pub max_size: usize,
    /// Stop before a level that would push estimated memory past this.
    pub budget_bytes: Option<usize>,
    pub exec: Exec,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_size: usize::MAX,
            budget_bytes: None,
            exec: Exec::default(),
        }
    }
}

/// Permutations of optimal cost exactly `size`, sorted by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bucket {
    pub(crate) size: usize,
    pub(crate) keys: Vec<u64>,
    /// `size` gate indices per entry, entry-major.
    pub(crate) gates: Vec<u8>,
}

impl Bucket {
    pub(crate) fn len(&self) -> usize {
        self.keys.len()
    }

    pub(crate) fn circuit(&self, pos: usize) -> &[u8] {
        &self.gates[pos * self.size..(pos + 1) * self.size]
    }
}

/// One optimal circuit for every permutation of cost at most
/// [`max_size`](CircuitLibrary::max_size), grouped by cost.
///
/// Invariants: bucket 0 holds only the identity; an entry in bucket `s` has
/// no circuit shorter than `s`; each key appears once.
#[derive(Debug, Clone)]
pub struct CircuitLibrary {
    pub(crate) spec: LibrarySpec,
    pub(crate) gates: Vec<Gate>,
    pub(crate) tables: Vec<[u8; 32]>,
    pub(crate) buckets: Vec<Bucket>,
    /// key -> (size, position in bucket)
    pub(crate) index: FxHashMap<u64, (u8, u32)>,
    pub(crate) complete: bool,
    pub(crate) truncated: bool,
}

impl CircuitLibrary {
    pub(crate) fn from_buckets(
        spec: LibrarySpec,
        buckets: Vec<Bucket>,
        complete: bool,
        truncated: bool,
    ) -> CircuitLibrary {
        let gates = spec.gates();
        let tables = gate_tables(&gates);
        let mut index = FxHashMap::default();
        index.reserve(buckets.iter().map(Bucket::len).sum());
        for b in &buckets {
            for (pos, &k) in b.keys.iter().enumerate() {
                index.insert(k, (b.size as u8, pos as u32));
            }
        }
        CircuitLibrary {
            spec,
            gates,
            tables,
            buckets,
            index,
            complete,
            truncated,
        }
    }

    pub fn spec(&self) -> &LibrarySpec {
        &self.spec
    }

    /// Largest stored size.
    pub fn max_size(&self) -> usize {
        self.buckets.len() - 1
    }

    /// Every reachable permutation is stored.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Building stopped early on the memory budget.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn bucket_sizes(&self) -> Vec<usize> {
        self.buckets.iter().map(Bucket::len).collect()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Estimated heap use in bytes.
    pub fn memory_bytes(&self) -> usize {
        self.buckets
            .iter()
            .map(|b| b.len() * (ENTRY_OVERHEAD + b.size))
            .sum()
    }

    pub(crate) fn lookup_key(&self, key: u64) -> Option<&[u8]> {
        self.index
            .get(&key)
            .map(|&(s, pos)| self.buckets[s as usize].circuit(pos as usize))
    }

    pub(crate) fn to_circuit(&self, idx: &[u8]) -> Circuit {
        let gates = idx.iter().map(|&i| self.gates[i as usize]).collect();
        Circuit::from_gates(self.spec.width(), gates).expect("library gates fit")
    }

    /// Stored optimal circuit for `p`, if its cost is at most `max_size`.
    pub fn get(&self, p: &Permutation) -> Result<Option<Circuit>> {
        let key = self.spec.key_of(p)?;
        Ok(self.lookup_key(key).map(|idx| self.to_circuit(idx)))
    }

    /// Stored circuits of size `s` as `(permutation, circuit)` pairs.
    pub fn entries(&self, s: usize) -> impl Iterator<Item = (Permutation, Circuit)> + '_ {
        let bucket = &self.buckets[s];
        (0..bucket.len()).map(move |pos| {
            let c = self.to_circuit(bucket.circuit(pos));
            (c.permutation(), c)
        })
    }

    /// Applies gates `idx` after the state.
    pub(crate) fn extend(&self, st: &State, idx: &[u8]) -> State {
        let mut out = *st;
        for v in out.iter_mut().take(self.spec.len()) {
            for &g in idx {
                *v = self.tables[g as usize][*v as usize];
            }
        }
        out
    }

    /// Undoes gates `idx` from the end of the state.
    pub(crate) fn strip(&self, st: &State, idx: &[u8]) -> State {
        let mut out = *st;
        for v in out.iter_mut().take(self.spec.len()) {
            for &g in idx.iter().rev() {
                *v = self.tables[g as usize][*v as usize];
            }
        }
        out
    }

    /// Checks that every stored circuit computes its key, that no key
    /// repeats, and that every proper prefix is itself stored at its length
    /// (each prefix of an optimal circuit is optimal).
    pub fn verify(&self) -> Result<()> {
        let id = self.spec.identity();
        if self.buckets[0].keys != [self.spec.key(&id)] {
            return Err(Error::CorruptLibrary("bucket 0 is not the identity".into()));
        }
        let mut seen = 0usize;
        for b in &self.buckets {
            if !b.keys.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::CorruptLibrary(format!(
                    "bucket {} keys not strictly sorted",
                    b.size
                )));
            }
            for pos in 0..b.len() {
                let idx = b.circuit(pos);
                if idx.iter().any(|&g| g as usize >= self.gates.len()) {
                    return Err(Error::LibraryMismatch(format!(
                        "gate index out of range in bucket {}",
                        b.size
                    )));
                }
                if self.spec.key(&self.extend(&id, idx)) != b.keys[pos] {
                    return Err(Error::LibraryMismatch(format!(
                        "circuit in bucket {} does not compute its key",
                        b.size
                    )));
                }
                if b.size > 0 {
                    let prefix = self.spec.key(&self.extend(&id, &idx[..b.size - 1]));
                    match self.index.get(&prefix) {
                        Some(&(s, _)) if s as usize == b.size - 1 => {}
                        _ => {
                            return Err(Error::CorruptLibrary(format!(
                                "prefix of an entry in bucket {} is not optimal",
                                b.size
                            )))
                        }
                    }
                }
            }
            seen += b.len();
        }
        if seen != self.index.len() {
            return Err(Error::CorruptLibrary(
                "duplicate keys across buckets".into(),
            ));
        }
        Ok(())
    }
}

/// Builds all optimal circuits up to `opts.max_size` gates, level by level.
///
/// Level `s + 1` extends every level-`s` entry (in key order) by every gate
/// (in canonical order) and keeps the first circuit found for each new
/// permutation. Candidate generation runs in parallel chunks; the merge is
/// sequential in chunk order, so the result does not depend on the strategy.
pub fn build_library(spec: LibrarySpec, opts: &BuildOptions) -> Result<CircuitLibrary> {
    let gates = spec.gates();
    if gates.len() > u8::MAX as usize {
        return Err(Error::Precondition(
            "too many gates for 8-bit indices".into(),
        ));
    }
    let tables = gate_tables(&gates);
    let len = spec.len();
    let id_key = spec.key(&spec.identity());
    let mut lib = CircuitLibrary::from_buckets(
        spec,
        vec![Bucket {
            size: 0,
            keys: vec![id_key],
            gates: vec![],
        }],
        false,
        false,
    );
    let mut used = ENTRY_OVERHEAD;
    let max_size = opts.max_size.min(u8::MAX as usize);
    while lib.max_size() < max_size {
        let s = lib.max_size();
        let prev = &lib.buckets[s];
        let ranges: Vec<(usize, usize)> = (0..prev.len())
            .step_by(CHUNK)
            .map(|lo| (lo, (lo + CHUNK).min(prev.len())))
            .collect();
        let index = &lib.index;
        let candidates: Vec<Vec<(u64, u32, u8)>> = opts.exec.map(&ranges, |&(lo, hi)| {
            let mut out = Vec::new();
            for pos in lo..hi {
                let st = spec.state(prev.keys[pos]);
                for (g, table) in tables.iter().enumerate() {
                    let mut next = st;
                    for v in next.iter_mut().take(len) {
                        *v = table[*v as usize];
                    }
                    let key = spec.key(&next);
                    if !index.contains_key(&key) {
                        out.push((key, pos as u32, g as u8));
                    }
                }
            }
            out
        });

        let mut fresh: Vec<(u64, u32, u8)> = Vec::new();
        let mut level: FxHashSet<u64> = FxHashSet::default();
        for (key, parent, g) in candidates.into_iter().flatten() {
            if level.insert(key) {
                fresh.push((key, parent, g));
            }
        }
        drop(level);
        if fresh.is_empty() {
            lib.complete = true;
            break;
        }
        let size = s + 1;
        let cost = fresh.len() * (ENTRY_OVERHEAD + size);
        if opts.budget_bytes.is_some_and(|b| used + cost > b) {
            lib.truncated = true;
            break;
        }
        used += cost;
        fresh.sort_unstable_by_key(|&(k, _, _)| k);
        let mut bucket = Bucket {
            size,
            keys: Vec::with_capacity(fresh.len()),
            gates: Vec::with_capacity(fresh.len() * size),
        };
        for &(key, parent, g) in &fresh {
            bucket.keys.push(key);
            bucket
                .gates
                .extend_from_slice(prev.circuit(parent as usize));
            bucket.gates.push(g);
        }
        lib.index.reserve(bucket.len());
        for (pos, &k) in bucket.keys.iter().enumerate() {
            lib.index.insert(k, (size as u8, pos as u32));
        }
        lib.buckets.push(bucket);
    }
    Ok(lib)
}
