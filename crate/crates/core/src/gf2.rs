//! Linear reversible functions as matrices over GF(2), and C-circuit
//! synthesis by row reduction.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::perm::{check_width, Permutation};

/// Square matrix over GF(2); `rows[i]` bit `j` is entry `(i, j)`.
///
/// For the matrix of a permutation, column `j` is the binary expansion of
/// `p(2^j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u32>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Result<BitMatrix> {
        check_width(n)?;
        Ok(BitMatrix {
            n,
            rows: (0..n).map(|i| 1 << i).collect(),
        })
    }

    pub fn from_rows(rows: Vec<u32>) -> Result<BitMatrix> {
        let n = rows.len();
        check_width(n)?;
        if rows.iter().any(|r| r >> n != 0) {
            return Err(Error::Precondition(format!("row wider than {n} columns")));
        }
        Ok(BitMatrix { n, rows })
    }

    /// Matrix whose column `j` is `cols[j]`.
    pub fn from_columns(cols: &[u32]) -> Result<BitMatrix> {
        let n = cols.len();
        check_width(n)?;
        let mut rows = vec![0u32; n];
        for (j, &col) in cols.iter().enumerate() {
            if col >> n != 0 {
                return Err(Error::Precondition(format!("column wider than {n} rows")));
            }
            for (i, row) in rows.iter_mut().enumerate() {
                *row |= (col >> i & 1) << j;
            }
        }
        Ok(BitMatrix { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn column(&self, j: usize) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| acc | (r >> j & 1) << i)
    }

    /// Matrix-vector product; `x` is a column vector packed as bits.
    pub fn apply(&self, x: u32) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| acc | ((r & x).count_ones() & 1) << i)
    }

    pub fn rank(&self) -> usize {
        rank_of(self.rows.clone())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn to_permutation(&self) -> Result<Permutation> {
        if !self.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(Permutation::from_fn_unchecked(self.n, |x| self.apply(x)))
    }

    /// Recovers the matrix of a linear permutation.
    pub fn of_permutation(p: &Permutation) -> Result<BitMatrix> {
        let n = p.width();
        let cols: Vec<u32> = (0..n).map(|j| p.apply(1 << j)).collect();
        let m = BitMatrix::from_columns(&cols)?;
        // A linear map is determined by the basis images; compare everywhere.
        let linear = (0..p.len() as u32).all(|x| m.apply(x) == p.apply(x));
        if linear {
            Ok(m)
        } else {
            Err(Error::NotLinear)
        }
    }
}

/// Rank over GF(2) of a set of row vectors.
pub fn rank_of(mut rows: Vec<u32>) -> usize {
    let mut rank = 0;
    for bit in 0..32 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= p;
            }
        }
        rank += 1;
    }
    rank
}

/// Whether the vectors are linearly independent over GF(2).
pub fn independent(vectors: &[u32]) -> bool {
    rank_of(vectors.to_vec()) == vectors.len()
}

/// C-circuit computing the linear permutation of `m`, at most `n²` gates.
///
/// Gauss–Jordan elimination with the lowest-index pivot; each row addition
/// `row t += row c` is one CNOT with control `c` and target `t`. The
/// reduction `E_r ⋯ E_1 M = I` gives `M = E_1 ⋯ E_r`, so the gates are
/// emitted in reverse order of the row operations.
pub fn synth_linear(m: &BitMatrix) -> Result<Circuit> {
    let n = m.n;
    let mut rows = m.rows.clone();
    let mut ops: Vec<(usize, usize)> = Vec::new();
    let mut add = |rows: &mut Vec<u32>, target: usize, control: usize| {
        rows[target] ^= rows[control];
        ops.push((control, target));
    };
    for col in 0..n {
        if rows[col] >> col & 1 == 0 {
            let pivot = (col + 1..n)
                .find(|&r| rows[r] >> col & 1 == 1)
                .ok_or(Error::SingularMatrix)?;
            add(&mut rows, col, pivot);
        }
        for r in 0..n {
            if r != col && rows[r] >> col & 1 == 1 {
                add(&mut rows, r, col);
            }
        }
    }
    debug_assert!(rows.iter().enumerate().all(|(i, &r)| r == 1 << i));
    let gates = ops
        .into_iter()
        .rev()
        .map(|(control, target)| Gate::cnot(control, target))
        .collect();
    Circuit::from_gates(n, gates)
}

/// Number of invertible `n×n` matrices over GF(2): `∏ (2ⁿ − 2ⁱ)`.
pub fn count_linear(n: usize) -> BigUint {
    let full = BigUint::from(1u8) << n;
    (0..n).fold(BigUint::from(1u8), |acc, i| {
        acc * (&full - (BigUint::from(1u8) << i))
    })
}

/// Whether `p` splits as T-gates followed by C-gates: `p(0) = 0` and the
/// images of the powers of two are linearly independent.
pub fn check_tc_constructible(p: &Permutation) -> bool {
    let images: Vec<u32> = (0..p.width()).map(|i| p.apply(1 << i)).collect();
    p.apply(0) == 0 && independent(&images)
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let line: String = (0..self.n)
                .map(|j| if r >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// `n` lines of `n` characters `0`/`1`, row-major.
    fn from_str(s: &str) -> Result<BitMatrix> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let n = lines.len();
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.iter().enumerate() {
            if line.chars().count() != n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {n} entries, got {}", line.len()),
                });
            }
            let mut row = 0u32;
            for (j, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row |= 1 << j,
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("unexpected {other:?}"),
                        })
                    }
                }
            }
            rows.push(row);
        }
        BitMatrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::CycleNotation;

    fn cyc(s: &str, width: usize) -> Permutation {
        Permutation::from_cycles(&s.parse::<CycleNotation>().unwrap(), width).unwrap()
    }

    #[test]
    fn matrix_examples() {
        let id = Permutation::identity(3).unwrap();
        assert_eq!(
            BitMatrix::of_permutation(&id).unwrap(),
            BitMatrix::identity(3).unwrap()
        );

        // CNOT control 1, target 0: x0 += x1, i.e. row 0 gains row 1.
        let c = Gate::cnot(1, 0).permutation(2).unwrap();
        let m = BitMatrix::of_permutation(&c).unwrap();
        assert_eq!(m.rows(), &[0b11, 0b10]);

        let fig2 = cyc("(2,3)(6,7)", 3);
        let m = BitMatrix::of_permutation(&fig2).unwrap();
        assert_eq!((m.column(0), m.column(1), m.column(2)), (1, 3, 4));

        assert!(matches!(
            BitMatrix::of_permutation(&cyc("(1,2,3)", 2).then(&cyc("(0,1)", 2)).unwrap()),
            Err(Error::NotLinear)
        ));
        assert!(matches!(
            BitMatrix::of_permutation(&cyc("(3,5)", 3)),
            Err(Error::NotLinear)
        ));
    }

    #[test]
    fn synth_small_cases() {
        assert!(synth_linear(&BitMatrix::identity(4).unwrap())
            .unwrap()
            .is_empty());
        for (c, t) in [(0, 1), (1, 0), (2, 0), (0, 2)] {
            let m = BitMatrix::of_permutation(&Gate::cnot(c, t).permutation(3).unwrap()).unwrap();
            let circ = synth_linear(&m).unwrap();
            assert_eq!(circ.gates(), &[Gate::cnot(c, t)]);
        }
        let singular = BitMatrix::from_rows(vec![0b11, 0b11]).unwrap();
        assert!(matches!(
            synth_linear(&singular),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn counts() {
        assert_eq!(count_linear(1), BigUint::from(1u32));
        assert_eq!(count_linear(2), BigUint::from(6u32));
        assert_eq!(count_linear(3), BigUint::from(168u32));
        assert_eq!(count_linear(4), BigUint::from(20160u32));
    }

    #[test]
    fn tc_examples() {
        assert!(!check_tc_constructible(&cyc("(2,6)(4,7)", 3)));
        assert!(check_tc_constructible(&Permutation::identity(3).unwrap()));
        assert!(!check_tc_constructible(
            &Permutation::xor_mask(3, 1).unwrap()
        ));
    }

    fn brute_det(rows: &[u32], n: usize) -> bool {
        // Leibniz expansion over GF(2): the permanent equals the determinant.
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k - 1);
                    out.push(q);
                }
            }
            out
        }
        perms(n)
            .iter()
            .filter(|s| s.iter().enumerate().all(|(i, &j)| rows[i] >> j & 1 == 1))
            .count()
            % 2
            == 1
    }

    #[test]
    fn invertibility_matches_brute_force_determinant() {
        for n in 1..=3 {
            for bits in 0u32..1 << (n * n) {
                let rows: Vec<u32> = (0..n).map(|i| bits >> (i * n) & ((1 << n) - 1)).collect();
                let m = BitMatrix::from_rows(rows.clone()).unwrap();
                assert_eq!(m.is_invertible(), brute_det(&rows, n));
            }
        }
        // Sampled for n = 4.
        for seed in 0u32..4000 {
            let bits = seed.wrapping_mul(2654435761);
            let rows: Vec<u32> = (0..4).map(|i| bits >> (i * 4) & 0xF).collect();
            let m = BitMatrix::from_rows(rows.clone()).unwrap();
            assert_eq!(m.is_invertible(), brute_det(&rows, 4));
        }
    }

    #[test]
    fn text_format() {
        let m: BitMatrix = "110\n010\n001\n".parse().unwrap();
        assert_eq!(m.rows(), &[0b011, 0b010, 0b100]);
        assert_eq!(m.to_string(), "110\n010\n001\n");
        assert!("10\n0".parse::<BitMatrix>().is_err());
        assert!("1x\n01".parse::<BitMatrix>().is_err());
    }
}
