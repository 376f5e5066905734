//! Grover oracles `(x, y) ↦ (x, y ⊕ f(x))` and ROM-based circuits, where
//! the input wires may only act as controls.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::{Circuit, Gate};
use crate::optimal::{find_optimal, CircuitLibrary, SearchOptions};
use crate::perm::Permutation;
use crate::rewrite::cancel_adjacent;

/// Boolean function of `arity` inputs; `table[x] = f(x)` with input bit `i`
/// the value of `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFunc {
    arity: usize,
    table: Vec<bool>,
}

impl BoolFunc {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<BoolFunc> {
        if !(1..=15).contains(&arity) {
            return Err(Error::Precondition(format!("arity {arity} outside 1..=15")));
        }
        if table.len() != 1 << arity {
            return Err(Error::Precondition(format!(
                "truth table of {} entries for arity {arity}",
                table.len()
            )));
        }
        Ok(BoolFunc { arity, table })
    }

    pub fn from_fn(arity: usize, f: impl Fn(u32) -> bool) -> Result<BoolFunc> {
        BoolFunc::new(arity, (0..1u32 << arity).map(f).collect())
    }

    /// Truth table whose bit `x` is `f(x)`; `bits` must fit in `2^arity` bits.
    pub fn from_bits(arity: usize, bits: u64) -> Result<BoolFunc> {
        if arity > 6 || (arity < 6 && bits >> (1u32 << arity) != 0) {
            return Err(Error::Precondition(format!(
                "{bits:#x} does not fit arity {arity}"
            )));
        }
        BoolFunc::from_fn(arity, |x| bits >> x & 1 == 1)
    }

    /// `0x96`-style hex truth table, least significant bit = `f(0)`.
    pub fn from_hex(arity: usize, text: &str) -> Result<BoolFunc> {
        let digits = text
            .trim()
            .strip_prefix("0x")
            .or_else(|| text.trim().strip_prefix("0X"))
            .unwrap_or(text.trim());
        let len = 1usize << arity;
        let mut table = vec![false; len];
        for (i, ch) in digits.chars().rev().enumerate() {
            let d = ch.to_digit(16).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("bad hex digit {ch:?}"),
            })?;
            for b in 0..4 {
                if d >> b & 1 == 1 {
                    let x = 4 * i + b;
                    if x >= len {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("{text} has more than {len} bits"),
                        });
                    }
                    table[x] = true;
                }
            }
        }
        BoolFunc::new(arity, table)
    }

    /// Minterm list such as `{1,2,4,7}`.
    pub fn from_minterms(arity: usize, text: &str) -> Result<BoolFunc> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: "minterm list must be enclosed in braces".into(),
            })?;
        let mut table = vec![false; 1 << arity];
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let x: usize = tok.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad minterm {tok:?}"),
            })?;
            if x >= table.len() {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    width: arity,
                });
            }
            table[x] = true;
        }
        BoolFunc::new(arity, table)
    }

    /// Hex or minterm form, chosen by the leading character.
    pub fn parse(arity: usize, text: &str) -> Result<BoolFunc> {
        if text.trim_start().starts_with('{') {
            BoolFunc::from_minterms(arity, text)
        } else {
            BoolFunc::from_hex(arity, text)
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: u32) -> bool {
        self.table[x as usize]
    }

    pub fn support_size(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    /// All `2^(2^arity)` functions of a small arity, in truth-table order.
    pub fn all(arity: usize) -> Result<Vec<BoolFunc>> {
        if arity > 4 {
            return Err(Error::Precondition(
                "enumerating all functions needs arity ≤ 4".into(),
            ));
        }
        (0..1u64 << (1u32 << arity))
            .map(|bits| BoolFunc::from_bits(arity, bits))
            .collect()
    }
}

impl fmt::Display for BoolFunc {
    /// Hex truth table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.table.len().div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let v = (0..4).fold(0u32, |acc, b| {
                let x = 4 * d + b;
                acc | (u32::from(x < self.table.len() && self.table[x])) << b
            });
            s.push(char::from_digit(v, 16).expect("nibble"));
        }
        write!(f, "0x{s}")
    }
}

/// Positive-polarity Reed–Muller form: XOR of monomials, each a set of
/// variable indices (bitmask; 0 is the constant 1). Sorted by degree, then
/// by the ascending list of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pprm {
    arity: usize,
    monomials: Vec<u32>,
}

fn monomial_order(m: u32) -> (u32, Vec<u32>) {
    (
        m.count_ones(),
        (0..32).filter(|i| m >> i & 1 == 1).collect(),
    )
}

impl Pprm {
    pub fn new(arity: usize, mut monomials: Vec<u32>) -> Pprm {
        monomials.sort_by_key(|&m| monomial_order(m));
        monomials.dedup();
        Pprm { arity, monomials }
    }

    pub fn monomials(&self) -> &[u32] {
        &self.monomials
    }

    pub fn degree(&self) -> u32 {
        self.monomials
            .iter()
            .map(|m| m.count_ones())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: u32) -> bool {
        self.monomials.iter().filter(|&&m| x & m == m).count() % 2 == 1
    }

    pub fn to_func(&self) -> BoolFunc {
        BoolFunc::from_fn(self.arity, |x| self.eval(x)).expect("arity already validated")
    }
}

impl fmt::Display for Pprm {
    /// `1 ^ x0 ^ x1x2`; `0` for the empty sum.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .monomials
            .iter()
            .map(|&m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    (0..32)
                        .filter(|i| m >> i & 1 == 1)
                        .map(|i| format!("x{i}"))
                        .collect()
                }
            })
            .collect();
        write!(f, "{}", terms.join(" ^ "))
    }
}

impl FromStr for Pprm {
    type Err = Error;

    /// Inverse of `Display`; the arity is the highest variable index + 1.
    fn from_str(s: &str) -> Result<Pprm> {
        let mut monos = Vec::new();
        let mut top = 0;
        for term in s.split('^').map(str::trim) {
            match term {
                "0" => {}
                "1" => monos.push(0),
                t => {
                    let mut m = 0u32;
                    for var in t.split('x').skip(1) {
                        let i: u32 = var.parse().map_err(|_| Error::Parse {
                            line: 0,
                            msg: format!("bad monomial {t:?}"),
                        })?;
                        if i >= 15 {
                            return Err(Error::Parse {
                                line: 0,
                                msg: format!("variable x{i} out of range"),
                            });
                        }
                        m |= 1 << i;
                        top = top.max(i as usize + 1);
                    }
                    if m == 0 || !t.starts_with('x') {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("bad monomial {t:?}"),
                        });
                    }
                    // Repeated terms cancel.
                    if let Some(pos) = monos.iter().position(|&x| x == m) {
                        monos.remove(pos);
                        continue;
                    }
                    monos.push(m);
                }
            }
        }
        Ok(Pprm::new(top.max(1), monos))
    }
}

/// Canonical PPRM of `f` by the Möbius (butterfly) transform.
pub fn pprm(f: &BoolFunc) -> Pprm {
    let mut coef = f.table.clone();
    for i in 0..f.arity {
        let bit = 1 << i;
        for x in 0..coef.len() {
            if x & bit != 0 {
                coef[x] ^= coef[x ^ bit];
            }
        }
    }
    let monos = (0..coef.len() as u32)
        .filter(|&m| coef[m as usize])
        .collect();
    Pprm::new(f.arity, monos)
}

/// `π_f` on `k + 1` wires, the oracle output on wire `k`.
pub fn oracle_perm(f: &BoolFunc) -> Permutation {
    let k = f.arity;
    let images = (0..1u32 << (k + 1))
        .map(|z| {
            let x = z & ((1 << k) - 1);
            z ^ (u32::from(f.eval(x)) << k)
        })
        .collect();
    Permutation::from_images(images).expect("xor with f(x) is a bijection")
}

/// `π_f` is odd exactly when `f` has odd support; then it needs one
/// extra wire on more than three wires.
pub fn oracle_needs_ancilla(f: &BoolFunc) -> bool {
    f.support_size() % 2 == 1
}

/// Circuit on `rom` read-only low wires and `writable` high wires. Output
/// wire `b` is wire `rom`; with two writable wires, wire `rom + 1` is the
/// work wire `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RomCircuit {
    pub rom_wires: usize,
    pub writable_wires: usize,
    pub circuit: Circuit,
}

impl RomCircuit {
    /// Target permutation: `b ^= f(x)`, everything else unchanged.
    pub fn target(f: &BoolFunc, writable: usize) -> Result<Permutation> {
        let k = f.arity;
        if !(1..=2).contains(&writable) || k + writable > 16 {
            return Err(Error::Precondition(format!(
                "{writable} writable wires unsupported"
            )));
        }
        let images = (0..1u32 << (k + writable))
            .map(|z| z ^ (u32::from(f.eval(z & ((1 << k) - 1))) << k))
            .collect();
        Permutation::from_images(images)
    }

    /// No gate writes a ROM wire and the circuit computes `b ^= f(x)`.
    pub fn computes(&self, f: &BoolFunc) -> bool {
        let rom = (1u32 << self.rom_wires) - 1;
        self.rom_wires == f.arity
            && self.circuit.gates().iter().all(|g| g.written() & rom == 0)
            && RomCircuit::target(f, self.writable_wires).is_ok_and(|p| self.circuit.computes(&p))
    }
}

/// Circuit for `target ^= ∏ vars` using `work` as a restored scratch wire;
/// `3·2^(l−1) − 2` gates for `l ≥ 1` variables.
fn product_circuit(vars: &[usize], target: usize, work: usize, out: &mut Vec<Gate>) {
    match vars {
        [] => out.push(Gate::not(target)),
        [v] => out.push(Gate::cnot(*v, target)),
        [rest @ .., last] => {
            let t = Gate::toffoli(*last, work, target);
            out.push(t);
            product_circuit(rest, work, target, out);
            out.push(t);
            product_circuit(rest, work, target, out);
        }
    }
}

/// Two-writable-wire ROM circuit for `f`, one product circuit per PPRM
/// term in term order, then adjacent-inverse cancellation.
pub fn rom2_synth_xor(f: &BoolFunc) -> Result<RomCircuit> {
    let k = f.arity;
    if k + 2 > 16 {
        return Err(Error::WidthOutOfRange(k + 2));
    }
    let (b, a) = (k, k + 1);
    let mut gates = Vec::new();
    for &m in pprm(f).monomials() {
        let vars: Vec<usize> = (0..k).filter(|i| m >> i & 1 == 1).collect();
        product_circuit(&vars, b, a, &mut gates);
    }
    let circuit = cancel_adjacent(&Circuit::from_gates(k + 2, gates)?);
    let rc = RomCircuit {
        rom_wires: k,
        writable_wires: 2,
        circuit,
    };
    debug_assert!(rc.computes(f));
    Ok(rc)
}

/// One-writable-wire ROM circuit, one gate per PPRM term, when every term
/// has degree at most 2 (N, C, T targeting the output wire).
///
/// Coefficients come from the inputs of weight at most 2; the circuit is
/// then checked on every input and `None` returned on mismatch.
pub fn rom1_synth(f: &BoolFunc) -> Option<RomCircuit> {
    let k = f.arity;
    let low: Vec<u32> = (0..1u32 << k).filter(|x| x.count_ones() <= 2).collect();
    let mut gates = Vec::new();
    for &m in &low {
        // Möbius inversion restricted to the subsets of m.
        let mut c = false;
        let mut s = m;
        loop {
            c ^= f.eval(s);
            if s == 0 {
                break;
            }
            s = (s - 1) & m;
        }
        if c {
            gates.push((
                m,
                Gate::Inv {
                    targets: 1 << k,
                    controls: m,
                },
            ));
        }
    }
    gates.sort_by_key(|&(m, _)| monomial_order(m));
    let circuit = Circuit::from_gates(k + 1, gates.into_iter().map(|(_, g)| g).collect()).ok()?;
    let rc = RomCircuit {
        rom_wires: k,
        writable_wires: 1,
        circuit,
    };
    rc.computes(f).then_some(rc)
}

/// Size histogram of [`rom2_synth_xor`] over all `2^(2^k)` functions.
pub fn xor_census(arity: usize) -> Result<Vec<usize>> {
    let mut hist = Vec::new();
    for f in BoolFunc::all(arity)? {
        let n = rom2_synth_xor(&f)?.circuit.len();
        if hist.len() <= n {
            hist.resize(n + 1, 0);
        }
        hist[n] += 1;
    }
    Ok(hist)
}

fn histogram(costs: &[usize]) -> Vec<usize> {
    let mut hist = vec![0; costs.iter().max().map_or(0, |m| m + 1)];
    for &c in costs {
        hist[c] += 1;
    }
    hist
}

/// Optimal-size histogram of `π_f` over the even-support predicates of
/// arity `width − 1`, searched in a full-domain library.
pub fn oracle_census(lib: &CircuitLibrary, opts: &SearchOptions) -> Result<Vec<usize>> {
    let k = lib.spec().width() - 1;
    let funcs: Vec<BoolFunc> = BoolFunc::all(k)?
        .into_iter()
        .filter(|f| !oracle_needs_ancilla(f))
        .collect();
    census(&funcs, lib, opts, oracle_perm)
}

/// Optimal-size histogram of `b ^= f(x)` over every predicate of the ROM
/// library's arity, searched in a ROM-domain library.
pub fn rom_census(lib: &CircuitLibrary, opts: &SearchOptions) -> Result<Vec<usize>> {
    let spec = lib.spec();
    let k = spec.rom_wires();
    if k == 0 {
        return Err(Error::Precondition(
            "ROM census needs a ROM-domain library".into(),
        ));
    }
    let writable = spec.width() - k;
    let funcs = BoolFunc::all(k)?;
    census(&funcs, lib, opts, |f| {
        RomCircuit::target(f, writable).expect("writable count validated by the library")
    })
}

fn census(
    funcs: &[BoolFunc],
    lib: &CircuitLibrary,
    opts: &SearchOptions,
    target: impl Fn(&BoolFunc) -> Permutation + Sync + Send,
) -> Result<Vec<usize>> {
    let inner = SearchOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let costs = opts
        .exec
        .map(funcs, |f| {
            find_optimal(&target(f), lib, &inner).map(|r| r.cost)
        })
        .into_iter()
        .collect::<Result<Vec<usize>>>()?;
    Ok(histogram(&costs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateKind;

    fn f3(bits: u64) -> BoolFunc {
        BoolFunc::from_bits(3, bits).unwrap()
    }

    #[test]
    fn parsing() {
        let f = BoolFunc::from_hex(3, "0x96").unwrap();
        assert_eq!(f, BoolFunc::from_minterms(3, "{1,2,4,7}").unwrap());
        assert_eq!(f.to_string(), "0x96");
        assert_eq!(BoolFunc::parse(3, "{ }").unwrap(), f3(0));
        assert!(BoolFunc::from_hex(3, "0x196").is_err());
        assert!(BoolFunc::from_minterms(3, "{8}").is_err());
        assert!(BoolFunc::from_hex(3, "0xg").is_err());
        assert_eq!(BoolFunc::from_hex(4, "0x8001").unwrap().support_size(), 2);
    }

    #[test]
    fn oracle_examples() {
        assert!(oracle_perm(&f3(0)).is_identity());
        let and12 = BoolFunc::from_fn(3, |x| x & 6 == 6).unwrap();
        assert_eq!(
            oracle_perm(&and12),
            Gate::toffoli(1, 2, 3).permutation(4).unwrap()
        );
        assert_eq!(oracle_perm(&f3(0xFF)), Gate::not(3).permutation(4).unwrap());
        assert!(!oracle_needs_ancilla(&f3(0)));
        assert!(oracle_needs_ancilla(&f3(1)));
        let even = BoolFunc::all(3)
            .unwrap()
            .iter()
            .filter(|f| !oracle_needs_ancilla(f))
            .count();
        assert_eq!(even, 128);
    }

    #[test]
    fn pprm_examples() {
        assert!(pprm(&f3(0)).monomials().is_empty());
        let f = BoolFunc::from_fn(3, |x| (x & 1 == 1) ^ (x & 6 == 6)).unwrap();
        assert_eq!(pprm(&f).monomials(), &[0b001, 0b110]);
        assert_eq!(pprm(&f).to_string(), "x0 ^ x1x2");
        let not = BoolFunc::from_fn(1, |x| x == 0).unwrap();
        assert_eq!(pprm(&not).monomials(), &[0, 1]);
        assert_eq!(pprm(&not).to_string(), "1 ^ x0");
        for f in BoolFunc::all(3).unwrap() {
            let p = pprm(&f);
            assert_eq!(p.to_func(), f);
            let back: Pprm = p.to_string().parse().unwrap();
            assert_eq!(back.monomials(), p.monomials());
        }
    }

    #[test]
    fn rom2_examples() {
        let and3 = f3(0x80);
        let rc = rom2_synth_xor(&and3).unwrap();
        assert_eq!(rc.circuit.len(), 10);
        assert!(rc.computes(&and3));
        let x0 = f3(0xAA);
        assert_eq!(rom2_synth_xor(&x0).unwrap().circuit.len(), 1);
        for k in 1..=4usize {
            for deg in 1..=k {
                let m = (1u32 << deg) - 1;
                let f = BoolFunc::from_fn(k, |x| x & m == m).unwrap();
                let rc = rom2_synth_xor(&f).unwrap();
                assert_eq!(rc.circuit.len(), 3 * (1 << (deg - 1)) - 2);
                assert!(rc.computes(&f));
            }
        }
    }

    #[test]
    fn rom1_examples() {
        let f = BoolFunc::from_fn(3, |x| (x & 1 == 1) ^ (x & 6 == 6)).unwrap();
        let rc = rom1_synth(&f).unwrap();
        assert_eq!(
            rc.circuit.gates(),
            &[Gate::cnot(0, 3), Gate::toffoli(1, 2, 3)]
        );
        assert!(rom1_synth(&f3(0x80)).is_none());
        assert!(rom1_synth(&f3(0)).unwrap().circuit.is_empty());
        let rc = rom1_synth(&f3(0xFF)).unwrap();
        assert_eq!(rc.circuit.count_kind(GateKind::N), 1);
    }

    #[test]
    fn rom1_matches_brute_force() {
        // Predicate contributions of the seven gates targeting the output wire.
        let monos: Vec<u32> = (0..8u32).filter(|m| m.count_ones() <= 2).collect();
        let mut reachable = std::collections::HashSet::new();
        for subset in 0u32..1 << monos.len() {
            let mut table = 0u64;
            for (i, &m) in monos.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    table ^= (0..8u32).filter(|x| x & m == m).fold(0, |t, x| t | 1 << x);
                }
            }
            reachable.insert(table);
        }
        for bits in 0..256u64 {
            assert_eq!(rom1_synth(&f3(bits)).is_some(), reachable.contains(&bits));
        }
    }
}
