//! Generalized controlled inverters, SWAP, circuits and their simulation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::{check_width, Permutation};

/// Gate kinds of the CNTS library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    N,
    C,
    T,
    S,
    /// A multi-target or many-control inverter outside CNTS.
    General,
}

impl GateKind {
    pub fn letter(self) -> char {
        match self {
            GateKind::N => 'N',
            GateKind::C => 'C',
            GateKind::T => 'T',
            GateKind::S => 'S',
            GateKind::General => 'G',
        }
    }
}

/// `Inv { targets: h, controls: k }` is the gate `N^h_k`: flip every wire in
/// `h` when every wire in `k` reads 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    Inv { targets: u32, controls: u32 },
    Swap { a: u8, b: u8 },
}

impl Gate {
    pub fn inv(targets: u32, controls: u32) -> Result<Gate> {
        if targets == 0 {
            return Err(Error::InvalidGate("empty target mask".into()));
        }
        if targets & controls != 0 {
            return Err(Error::InvalidGate(format!(
                "target mask {targets} overlaps control mask {controls}"
            )));
        }
        Ok(Gate::Inv { targets, controls })
    }

    pub fn not(target: usize) -> Gate {
        Gate::Inv {
            targets: 1 << target,
            controls: 0,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        assert_ne!(control, target);
        Gate::Inv {
            targets: 1 << target,
            controls: 1 << control,
        }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Gate {
        assert!(c1 != c2 && c1 != target && c2 != target);
        Gate::Inv {
            targets: 1 << target,
            controls: (1 << c1) | (1 << c2),
        }
    }

    pub fn swap(a: usize, b: usize) -> Result<Gate> {
        if a == b {
            return Err(Error::InvalidGate("swap of a wire with itself".into()));
        }
        let (a, b) = (a.min(b), a.max(b));
        Ok(Gate::Swap {
            a: a as u8,
            b: b as u8,
        })
    }

    pub fn kind(&self) -> GateKind {
        match *self {
            Gate::Swap { .. } => GateKind::S,
            Gate::Inv { targets, controls } => {
                if targets.count_ones() != 1 {
                    return GateKind::General;
                }
                match controls.count_ones() {
                    0 => GateKind::N,
                    1 => GateKind::C,
                    2 => GateKind::T,
                    _ => GateKind::General,
                }
            }
        }
    }

    /// Mask of every wire the gate touches.
    pub fn support(&self) -> u32 {
        match *self {
            Gate::Inv { targets, controls } => targets | controls,
            Gate::Swap { a, b } => (1 << a) | (1 << b),
        }
    }

    /// Mask of wires whose value the gate may change.
    pub fn written(&self) -> u32 {
        match *self {
            Gate::Inv { targets, .. } => targets,
            Gate::Swap { a, b } => (1 << a) | (1 << b),
        }
    }

    pub fn fits(&self, width: usize) -> bool {
        self.support() >> width == 0
    }

    /// Gate count under the CNTS cost model: one per inverted wire, one per swap.
    pub fn cost(&self) -> usize {
        match *self {
            Gate::Inv { targets, .. } => targets.count_ones() as usize,
            Gate::Swap { .. } => 1,
        }
    }

    /// Adds `extra` to the control mask (`V_j` applied to the gate).
    pub fn with_controls(&self, extra: u32) -> Gate {
        match *self {
            Gate::Inv { targets, controls } => {
                debug_assert_eq!(targets & extra, 0);
                Gate::Inv {
                    targets,
                    controls: controls | extra,
                }
            }
            Gate::Swap { .. } => panic!("swap gates carry no controls"),
        }
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        match *self {
            Gate::Inv { targets, controls } => {
                if x & controls == controls {
                    x ^ targets
                } else {
                    x
                }
            }
            Gate::Swap { a, b } => {
                let diff = ((x >> a) ^ (x >> b)) & 1;
                x ^ ((diff << a) | (diff << b))
            }
        }
    }

    pub fn apply_checked(&self, x: u32, width: usize) -> Result<u32> {
        if !self.fits(width) {
            return Err(Error::InvalidGate(format!("{self} exceeds {width} wires")));
        }
        if x >> width != 0 {
            return Err(Error::IndexOutOfRange {
                index: x as usize,
                width,
            });
        }
        Ok(self.apply(x))
    }

    pub fn permutation(&self, width: usize) -> Result<Permutation> {
        Circuit::from_gates(width, vec![*self]).map(|c| c.permutation())
    }
}

fn wires_of(mask: u32) -> impl Iterator<Item = u32> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (*self, self.kind()) {
            (Gate::Swap { a, b }, _) => write!(f, "s {a} {b}"),
            (Gate::Inv { targets, controls }, GateKind::General) => {
                write!(f, "g {targets} {controls}")
            }
            (Gate::Inv { targets, controls }, kind) => {
                let letter = kind.letter().to_ascii_lowercase();
                write!(f, "{letter}")?;
                for c in wires_of(controls) {
                    write!(f, " {c}")?;
                }
                write!(f, " {}", targets.trailing_zeros())
            }
        }
    }
}

/// Allowed gate kinds, a nonempty subset of CNTS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateLibrary {
    pub n: bool,
    pub c: bool,
    pub t: bool,
    pub s: bool,
}

impl GateLibrary {
    pub const CNT: GateLibrary = GateLibrary {
        n: true,
        c: true,
        t: true,
        s: false,
    };
    pub const CNTS: GateLibrary = GateLibrary {
        n: true,
        c: true,
        t: true,
        s: true,
    };

    pub const N: GateLibrary = GateLibrary::from_kinds(true, false, false, false);
    pub const C: GateLibrary = GateLibrary::from_kinds(false, true, false, false);
    pub const T: GateLibrary = GateLibrary::from_kinds(false, false, true, false);
    pub const NC: GateLibrary = GateLibrary::from_kinds(true, true, false, false);
    pub const CT: GateLibrary = GateLibrary::from_kinds(false, true, true, false);
    pub const NT: GateLibrary = GateLibrary::from_kinds(true, false, true, false);

    /// The eight libraries of the three-wire census, in column order.
    pub const TABLE1: [(&'static str, GateLibrary); 8] = [
        ("N", GateLibrary::N),
        ("C", GateLibrary::C),
        ("T", GateLibrary::T),
        ("NC", GateLibrary::NC),
        ("CT", GateLibrary::CT),
        ("NT", GateLibrary::NT),
        ("CNT", GateLibrary::CNT),
        ("CNTS", GateLibrary::CNTS),
    ];

    const fn from_kinds(n: bool, c: bool, t: bool, s: bool) -> GateLibrary {
        GateLibrary { n, c, t, s }
    }

    pub fn contains(&self, kind: GateKind) -> bool {
        match kind {
            GateKind::N => self.n,
            GateKind::C => self.c,
            GateKind::T => self.t,
            GateKind::S => self.s,
            GateKind::General => false,
        }
    }

    pub fn mask(&self) -> u8 {
        self.n as u8 | (self.c as u8) << 1 | (self.t as u8) << 2 | (self.s as u8) << 3
    }

    pub fn from_mask(mask: u8) -> Result<GateLibrary> {
        if mask == 0 || mask > 0xF {
            return Err(Error::Parse {
                line: 0,
                msg: format!("invalid gate library mask {mask}"),
            });
        }
        Ok(GateLibrary {
            n: mask & 1 != 0,
            c: mask & 2 != 0,
            t: mask & 4 != 0,
            s: mask & 8 != 0,
        })
    }

    /// Every placement of every allowed gate on `width` wires, sorted by
    /// kind, then target mask, then control mask.
    pub fn enumerate(&self, width: usize) -> Vec<Gate> {
        let mut gates = Vec::new();
        let w = width;
        if self.n {
            gates.extend((0..w).map(Gate::not));
        }
        if self.c {
            for t in 0..w {
                for c in (0..w).filter(|&c| c != t) {
                    gates.push(Gate::cnot(c, t));
                }
            }
        }
        if self.t {
            for t in 0..w {
                for c1 in (0..w).filter(|&c| c != t) {
                    for c2 in (c1 + 1..w).filter(|&c| c != t) {
                        gates.push(Gate::toffoli(c1, c2, t));
                    }
                }
            }
        }
        if self.s {
            for a in 0..w {
                for b in a + 1..w {
                    gates.push(Gate::Swap {
                        a: a as u8,
                        b: b as u8,
                    });
                }
            }
        }
        gates
    }
}

impl FromStr for GateLibrary {
    type Err = Error;

    fn from_str(s: &str) -> Result<GateLibrary> {
        let mut lib = GateLibrary {
            n: false,
            c: false,
            t: false,
            s: false,
        };
        for ch in s.trim().chars() {
            match ch.to_ascii_uppercase() {
                'N' => lib.n = true,
                'C' => lib.c = true,
                'T' => lib.t = true,
                'S' => lib.s = true,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown gate kind {ch:?} in library {s:?}"),
                    })
                }
            }
        }
        if lib.mask() == 0 {
            return Err(Error::Parse {
                line: 0,
                msg: "empty gate library".into(),
            });
        }
        Ok(lib)
    }
}

impl fmt::Display for GateLibrary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (on, ch) in [(self.c, 'C'), (self.n, 'N'), (self.t, 'T'), (self.s, 'S')] {
            if on {
                write!(f, "{ch}")?;
            }
        }
        Ok(())
    }
}

/// An ordered gate sequence; gates act left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Circuit> {
        check_width(width)?;
        Ok(Circuit {
            width,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Circuit> {
        check_width(width)?;
        if let Some(g) = gates.iter().find(|g| !g.fits(width)) {
            return Err(Error::InvalidGate(format!("{g} exceeds {width} wires")));
        }
        Ok(Circuit { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) {
        assert!(g.fits(self.width), "{g} exceeds {} wires", self.width);
        self.gates.push(g);
    }

    pub fn extend_from(&mut self, other: &Circuit) {
        assert_eq!(self.width, other.width);
        self.gates.extend_from_slice(&other.gates);
    }

    /// Total cost, counting a multi-target inverter once per target.
    pub fn cost(&self) -> usize {
        self.gates.iter().map(Gate::cost).sum()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    pub fn only_kinds(&self, kinds: &[GateKind]) -> bool {
        self.gates.iter().all(|g| kinds.contains(&g.kind()))
    }

    /// Reversed gate order; every library gate is its own inverse.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.gates.iter().fold(x, |v, g| g.apply(v))
    }

    pub fn permutation(&self) -> Permutation {
        Permutation::from_fn_unchecked(self.width, |x| self.apply(x))
    }

    pub fn computes(&self, p: &Permutation) -> bool {
        p.width() == self.width && (0..p.len() as u32).all(|x| self.apply(x) == p.apply(x))
    }

    /// Same gates on a wider circuit.
    pub fn widen(&self, width: usize) -> Result<Circuit> {
        Circuit::from_gates(width, self.gates.clone())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wires {}", self.width)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn parse_gate_line(line: &str, lineno: usize, width: Option<usize>) -> Result<Gate> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let mut toks = line.split_whitespace();
    let op = toks.next().ok_or_else(|| err("empty gate line".into()))?;
    let args = toks
        .map(|t| {
            t.parse::<u32>()
                .map_err(|e| err(format!("bad number {t:?}: {e}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let wire_limit = width.unwrap_or(crate::perm::MAX_WIDTH) as u32;
    let wire = |w: u32| -> Result<u32> {
        if w < wire_limit {
            Ok(w)
        } else {
            Err(err(format!("wire {w} out of range")))
        }
    };
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(format!(
                "'{op}' takes {n} arguments, got {}",
                args.len()
            )))
        }
    };
    let distinct = |ws: &[u32]| -> Result<()> {
        for i in 0..ws.len() {
            if ws[i + 1..].contains(&ws[i]) {
                return Err(err(format!("wire {} used twice", ws[i])));
            }
        }
        Ok(())
    };
    let gate = match op {
        "n" => {
            arity(1)?;
            Gate::not(wire(args[0])? as usize)
        }
        "c" => {
            arity(2)?;
            distinct(&args)?;
            Gate::cnot(wire(args[0])? as usize, wire(args[1])? as usize)
        }
        "t" => {
            arity(3)?;
            distinct(&args)?;
            Gate::toffoli(
                wire(args[0])? as usize,
                wire(args[1])? as usize,
                wire(args[2])? as usize,
            )
        }
        "s" => {
            arity(2)?;
            Gate::swap(wire(args[0])? as usize, wire(args[1])? as usize)
                .map_err(|e| err(e.to_string()))?
        }
        "g" => {
            arity(2)?;
            let g = Gate::inv(args[0], args[1]).map_err(|e| err(e.to_string()))?;
            if g.support() >> wire_limit != 0 {
                return Err(err(format!("gate {g} out of range")));
            }
            g
        }
        other => return Err(err(format!("unknown gate {other:?}"))),
    };
    Ok(gate)
}

impl FromStr for Circuit {
    type Err = Error;

    /// Parses the line format: `wires <n>` header, then `n t`, `c c t`,
    /// `t c1 c2 t`, `s a b` or `g <h> <k>`, with `#` comments.
    fn from_str(text: &str) -> Result<Circuit> {
        let mut width: Option<usize> = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("wires") {
                if width.is_some() || !gates.is_empty() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "'wires' header must come first".into(),
                    });
                }
                let w = rest.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad wire count: {e}"),
                })?;
                check_width(w).map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
                width = Some(w);
                continue;
            }
            gates.push(parse_gate_line(line, lineno, width)?);
        }
        // Without a header, use the smallest width that fits every gate.
        let width = match width {
            Some(w) => w,
            None => {
                let support = gates.iter().fold(0, |m, g| m | g.support());
                (32 - support.leading_zeros() as usize).max(1)
            }
        };
        Circuit::from_gates(width, gates)
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
    fn toffoli_examples() {
        // N^1_6: controls on wires 1 and 2, target wire 0.
        let g = Gate::inv(1, 6).unwrap();
        assert_eq!(g.kind(), GateKind::T);
        assert_eq!(g.apply(6), 7);
        assert_eq!(g.apply(7), 6);
        for x in 0..6 {
            assert_eq!(g.apply(x), x);
        }
        assert_eq!(Gate::inv(4, 3).unwrap().apply(3), 7);
        assert_eq!(g.permutation(3).unwrap(), cyc("(6,7)", 3));
        assert_eq!(
            Gate::inv(2, 5).unwrap().permutation(3).unwrap(),
            cyc("(5,7)", 3)
        );
        assert_eq!(
            Gate::inv(4, 3).unwrap().permutation(3).unwrap(),
            cyc("(3,7)", 3)
        );
    }

    #[test]
    fn invalid_gates() {
        assert!(Gate::inv(0, 3).is_err());
        assert!(Gate::inv(3, 1).is_err());
        assert!(Gate::swap(2, 2).is_err());
        assert!(Gate::not(3).apply_checked(0, 3).is_err());
        assert!(Gate::not(0).apply_checked(8, 3).is_err());
    }

    #[test]
    fn swap_exchanges_bits() {
        let s = Gate::swap(0, 2).unwrap();
        assert_eq!(s.apply(0b001), 0b100);
        assert_eq!(s.apply(0b101), 0b101);
        assert_eq!(s.apply(0b010), 0b010);
    }

    #[test]
    fn fig3_equivalence_under_lsb_convention() {
        let t = Gate::inv(4, 3).unwrap();
        let n = Gate::not(0);
        let c = Circuit::from_gates(3, vec![t, n, t, n]).unwrap();
        assert_eq!(
            c.permutation(),
            Gate::inv(4, 2).unwrap().permutation(3).unwrap()
        );
    }

    #[test]
    fn three_cnots_make_a_swap() {
        let c = Circuit::from_gates(
            3,
            vec![Gate::cnot(2, 1), Gate::cnot(1, 2), Gate::cnot(2, 1)],
        )
        .unwrap();
        assert_eq!(
            c.permutation(),
            Gate::swap(1, 2).unwrap().permutation(3).unwrap()
        );
    }

    #[test]
    fn enumerate_counts() {
        let count = |lib: &str, w| lib.parse::<GateLibrary>().unwrap().enumerate(w).len();
        assert_eq!(count("CNTS", 3), 15);
        assert_eq!(count("NT", 3), 6);
        assert_eq!(count("C", 3), 6);
        assert_eq!(count("N", 3), 3);
        assert_eq!(count("T", 3), 3);
        // n + n(n-1) + n*C(n-1,2) + C(n,2) on four wires.
        assert_eq!(count("CNTS", 4), 4 + 12 + 12 + 6);
        let gates = GateLibrary::CNTS.enumerate(4);
        let mut sorted = gates.clone();
        sorted.sort_by_key(|g| g.kind());
        assert_eq!(gates, sorted);
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert!(Circuit::new(3).unwrap().permutation().is_identity());
        let two_nots: Circuit = "n 0\nn 0".parse().unwrap();
        assert_eq!(two_nots.len(), 2);
        assert!(two_nots.permutation().is_identity());
    }

    #[test]
    fn parse_examples() {
        let c: Circuit = "wires 3\nt 1 2 0\n".parse().unwrap();
        assert_eq!(c.gates(), &[Gate::toffoli(1, 2, 0)]);
        let g: Circuit = "wires 4\ng 5 2 # two targets\n".parse().unwrap();
        assert_eq!(g.gates()[0], Gate::inv(5, 2).unwrap());
        assert_eq!(g.cost(), 2);
        assert!("wires 3\nc 0 3".parse::<Circuit>().is_err());
        assert!("wires 3\ng 3 1".parse::<Circuit>().is_err());
        assert!("wires 3\nx 1".parse::<Circuit>().is_err());
        assert!("wires 3\nt 1 1 0".parse::<Circuit>().is_err());
        assert!("n 0\nwires 3".parse::<Circuit>().is_err());
    }

    #[test]
    fn format_round_trips_golden_corpus() {
        let corpus = [
            "wires 3\nt 1 2 0\nn 0\nt 1 2 0\nn 0\n",
            "wires 4\nc 3 0\ns 1 2\ng 5 2\nt 0 3 1\n",
            "wires 2\n",
            "wires 5\ng 16 15\nn 4\n",
        ];
        for text in corpus {
            let c: Circuit = text.parse().unwrap();
            assert_eq!(c.to_string(), text);
        }
    }

    #[test]
    fn every_gate_is_an_involution() {
        for g in GateLibrary::CNTS.enumerate(4) {
            for x in 0..16 {
                assert_eq!(g.apply(g.apply(x)), x, "{g}");
            }
        }
    }

    #[test]
    fn sub_width_gates_are_even() {
        for w in 3..=4 {
            for g in GateLibrary::CNTS.enumerate(w) {
                let even = g.permutation(w).unwrap().parity().is_even();
                assert_eq!(even, (g.support().count_ones() as usize) < w, "{g} on {w}");
            }
        }
    }
}
