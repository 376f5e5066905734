//! Permutations of the bit-strings `{0, …, 2ⁿ−1}`.
//!
//! Wire `j` carries bit `j` of an index, so wire 0 is the least-significant
//! bit. Composition reads left to right: `p.then(&q)` applies `p` first,
//! which is the order in which concatenated circuits act.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_even(self) -> bool {
        self == Parity::Even
    }
}

impl std::ops::BitXor for Parity {
    type Output = Parity;
    fn bitxor(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A bijection on `{0, …, 2^width − 1}` stored as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    width: usize,
    images: Vec<u32>,
}

pub(crate) fn check_width(width: usize) -> Result<()> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(Error::WidthOutOfRange(width))
    }
}

/// True for 0 and the powers of two: the indices no T-circuit can move.
pub fn is_basis_or_zero(x: u32) -> bool {
    x & x.wrapping_sub(1) == 0
}

impl Permutation {
    pub fn identity(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Permutation {
            width,
            images: (0..1u32 << width).collect(),
        })
    }

    /// Builds a permutation from its images; the width is inferred from the length.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let len = images.len();
        if !len.is_power_of_two() {
            return Err(Error::NotBijective);
        }
        let width = len.trailing_zeros() as usize;
        check_width(width)?;
        let mut seen = vec![false; len];
        for &y in &images {
            let y = y as usize;
            if y >= len || seen[y] {
                return Err(Error::NotBijective);
            }
            seen[y] = true;
        }
        Ok(Permutation { width, images })
    }

    /// Build from a closure; used internally where bijectivity is known.
    pub(crate) fn from_fn_unchecked(width: usize, f: impl Fn(u32) -> u32) -> Self {
        let images = (0..1u32 << width).map(f).collect();
        let p = Permutation { width, images };
        debug_assert!(Permutation::from_images(p.images.clone()).is_ok());
        p
    }

    /// `x ↦ x ⊕ mask`, the permutation of an N-circuit.
    pub fn xor_mask(width: usize, mask: u32) -> Result<Self> {
        check_width(width)?;
        if mask >> width != 0 {
            return Err(Error::IndexOutOfRange {
                index: mask as usize,
                width,
            });
        }
        Ok(Self::from_fn_unchecked(width, |x| x ^ mask))
    }

    pub fn from_cycles(cycles: &CycleNotation, width: usize) -> Result<Self> {
        let mut p = Self::identity(width)?;
        let len = p.images.len();
        let mut used = vec![false; len];
        for cycle in &cycles.cycles {
            for &x in cycle {
                let xi = x as usize;
                if xi >= len {
                    return Err(Error::IndexOutOfRange { index: xi, width });
                }
                if used[xi] {
                    return Err(Error::RepeatedIndex(xi));
                }
                used[xi] = true;
            }
            for (i, &x) in cycle.iter().enumerate() {
                p.images[x as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(p)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// `p.then(q)` maps `x` to `q(p(x))`.
    pub fn then(&self, q: &Permutation) -> Result<Permutation> {
        if self.width != q.width {
            return Err(Error::WidthMismatch(self.width, q.width));
        }
        Ok(Permutation {
            width: self.width,
            images: self.images.iter().map(|&y| q.images[y as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Permutation {
            width: self.width,
            images: inv,
        }
    }

    pub fn cycles(&self) -> CycleNotation {
        let mut seen = vec![false; self.images.len()];
        let mut cycles = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32);
                x = self.images[x] as usize;
            }
            cycles.push(cycle);
        }
        CycleNotation { cycles }
    }

    pub fn parity(&self) -> Parity {
        let transpositions: usize = self.cycles().cycles.iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Number of indices not fixed.
    pub fn moved(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &y)| i as u32 != y)
            .count()
    }

    /// Whether the permutation fixes 0 and every power of two.
    pub fn fixes_basis(&self) -> bool {
        self.apply(0) == 0 && (0..self.width).all(|i| self.apply(1 << i) == 1 << i)
    }

    /// The same permutation on `width + 1` wires, acting identically on both
    /// halves of the new most-significant wire.
    pub fn lift(&self) -> Result<Permutation> {
        check_width(self.width + 1)?;
        let half = self.images.len() as u32;
        Ok(Self::from_fn_unchecked(self.width + 1, |x| {
            (x & half) | self.images[(x & (half - 1)) as usize]
        }))
    }

    /// Writes the product of `pairs` (first pair applied first).
    pub fn from_pairs(pairs: &[TranspositionPair], width: usize) -> Result<Permutation> {
        let mut p = Self::identity(width)?;
        for tp in pairs {
            let q = Self::from_cycles(&tp.as_cycles(), width)?;
            p = p.then(&q)?;
        }
        Ok(p)
    }

    /// Splits an even permutation into a product of disjoint transposition
    /// pairs `(a,b)(c,d)`, at most `(moved + 1) / 2` of them.
    ///
    /// Long cycles lose `(x₀,x₁)(x_{k−1},x_k)` until a transposition or a
    /// 3-cycle is left; leftover transpositions are paired, 3-cycles are merged
    /// two at a time, and a final lone 3-cycle borrows two spare indices.
    /// Spare indices avoid 0 and powers of two whenever the width allows it.
    pub fn decompose_pairs(&self) -> Result<Vec<TranspositionPair>> {
        if !self.parity().is_even() {
            return Err(Error::OddPermutation);
        }
        let mut pairs = Vec::new();
        let mut transpositions = Vec::new();
        let mut three_cycles = Vec::new();
        for cycle in self.cycles().cycles {
            let mut rest = cycle;
            while rest.len() >= 4 {
                let k = rest.len() - 1;
                pairs.push(TranspositionPair::new(
                    rest[0],
                    rest[1],
                    rest[k - 1],
                    rest[k],
                ));
                let mut shorter = Vec::with_capacity(rest.len() - 2);
                shorter.push(rest[0]);
                shorter.extend_from_slice(&rest[2..k]);
                rest = shorter;
            }
            match rest.len() {
                2 => transpositions.push((rest[0], rest[1])),
                3 => three_cycles.push([rest[0], rest[1], rest[2]]),
                _ => unreachable!(),
            }
        }
        debug_assert!(transpositions.len() % 2 == 0);
        for t in transpositions.chunks(2) {
            pairs.push(TranspositionPair::new(t[0].0, t[0].1, t[1].0, t[1].1));
        }
        let mut threes = three_cycles.chunks_exact(2);
        for two in threes.by_ref() {
            let [a, b, c] = two[0];
            let [d, e, f] = two[1];
            pairs.push(TranspositionPair::new(a, b, d, e));
            pairs.push(TranspositionPair::new(a, c, d, f));
        }
        if let [[x, y, z]] = threes.remainder() {
            let (v, w) = self.spare_pair(&[*x, *y, *z])?;
            pairs.push(TranspositionPair::new(*x, *y, v, w));
            pairs.push(TranspositionPair::new(v, w, *x, *z));
        }
        Ok(pairs)
    }

    // Preference: unmoved non-basis, then moved non-basis, then anything else.
    fn spare_pair(&self, exclude: &[u32]) -> Result<(u32, u32)> {
        let candidates = (0..self.len() as u32).filter(|x| !exclude.contains(x));
        let mut ranked: Vec<(u8, u32)> = candidates
            .map(|x| {
                let rank = if is_basis_or_zero(x) {
                    2
                } else if self.apply(x) != x {
                    1
                } else {
                    0
                };
                (rank, x)
            })
            .collect();
        ranked.sort_unstable();
        match ranked.as_slice() {
            [(_, v), (_, w), ..] => Ok((*v, *w)),
            _ => Err(Error::NoSpareIndices(2)),
        }
    }

    pub fn to_truth_table_string(&self) -> String {
        let parts: Vec<String> = self.images.iter().map(|y| y.to_string()).collect();
        parts.join(" ")
    }

    /// Parses the one-line `0 1 3 2 …` image format.
    pub fn parse_truth_table(text: &str) -> Result<Permutation> {
        let images = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>().map_err(|e| Error::Parse {
                    line: 1,
                    msg: format!("bad image {tok:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_images(images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

/// Disjoint cycles, fixed points omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleNotation {
    pub cycles: Vec<Vec<u32>>,
}

impl CycleNotation {
    pub fn new(cycles: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &cycles {
            if c.len() < 2 {
                return Err(Error::Parse {
                    line: 1,
                    msg: "cycles must have at least two elements".into(),
                });
            }
            for &x in c {
                if !seen.insert(x) {
                    return Err(Error::RepeatedIndex(x as usize));
                }
            }
        }
        Ok(CycleNotation { cycles })
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

impl fmt::Display for CycleNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return write!(f, "()");
        }
        for c in &self.cycles {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for CycleNotation {
    type Err = Error;

    /// Accepts `(2,3)(6,7)`, whitespace anywhere, and `` / `()` for the identity.
    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body_start = rest
                .strip_prefix('(')
                .ok_or_else(|| err(format!("expected '(' at {rest:?}")))?;
            let close = body_start
                .find(')')
                .ok_or_else(|| err("unterminated cycle".into()))?;
            let body = body_start[..close].trim();
            if !body.is_empty() {
                let cycle = body
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|e| err(format!("bad index {:?}: {e}", t.trim())))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                // 1-cycles are fixed points
                if cycle.len() >= 2 {
                    cycles.push(cycle);
                }
            }
            rest = body_start[close + 1..].trim_start();
        }
        CycleNotation::new(cycles)
    }
}

/// `(a,b)(c,d)` with four distinct indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TranspositionPair {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl TranspositionPair {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        debug_assert!(a != b && a != c && a != d && b != c && b != d && c != d);
        TranspositionPair { a, b, c, d }
    }

    pub fn indices(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn as_cycles(&self) -> CycleNotation {
        CycleNotation {
            cycles: vec![vec![self.a, self.b], vec![self.c, self.d]],
        }
    }
}

impl fmt::Display for TranspositionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})({},{})", self.a, self.b, self.c, self.d)
    }
}
