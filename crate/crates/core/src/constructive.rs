//! Constructive synthesis without temporary storage.
//!
//! Every even permutation (and every permutation on at most three wires) is
//! realized as a T|C|T|N circuit: Toffoli gates, then CNOTs, then Toffolis,
//! then NOTs. Odd permutations on more than three wires need one extra wire,
//! see [`synth_with_ancilla`].
//!
//! The T-only parts are built from disjoint transposition pairs: each pair
//! `(a,b)(c,d)` is a conjugate `π⁻¹ κ₀ π` of the fixed pair
//! `κ₀ = (2ⁿ−4, 2ⁿ−3)(2ⁿ−2, 2ⁿ−1)`, which is a single multi-controlled NOT
//! expanded into Toffolis on one borrowed wire.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate, GateKind};
use crate::gf2::{self, BitMatrix};
use crate::perm::{is_basis_or_zero, Permutation, TranspositionPair};
use crate::rewrite::cancel_adjacent;

/// A circuit split into labeled stages, e.g. `T1`, `C`, `T2`, `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagedCircuit {
    width: usize,
    stages: Vec<(String, Circuit)>,
}

impl StagedCircuit {
    pub fn new(width: usize) -> StagedCircuit {
        StagedCircuit {
            width,
            stages: Vec::new(),
        }
    }

    pub fn push(&mut self, label: &str, c: Circuit) {
        assert_eq!(c.width(), self.width);
        self.stages.push((label.to_string(), c));
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn stages(&self) -> &[(String, Circuit)] {
        &self.stages
    }

    pub fn stage(&self, label: &str) -> Option<&Circuit> {
        self.stages.iter().find(|(l, _)| l == label).map(|(_, c)| c)
    }

    /// Total gates in stages whose label starts with `prefix`.
    pub fn count_prefixed(&self, prefix: &str) -> usize {
        self.stages
            .iter()
            .filter(|(l, _)| l.starts_with(prefix))
            .map(|(_, c)| c.cost())
            .sum()
    }

    pub fn flatten(&self) -> Circuit {
        let mut out = Circuit::new(self.width).expect("width validated at construction");
        for (_, c) in &self.stages {
            out.extend_from(c);
        }
        out
    }

    /// Each stage holds only the gate kind named by its label's first letter.
    pub fn stages_pure(&self) -> bool {
        self.stages.iter().all(|(label, c)| {
            let kind = match label.chars().next() {
                Some('T') => GateKind::T,
                Some('C') => GateKind::C,
                Some('N') => GateKind::N,
                _ => return false,
            };
            c.only_kinds(&[kind])
        })
    }
}

impl fmt::Display for StagedCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wires {}", self.width)?;
        for (label, c) in &self.stages {
            writeln!(f, "# stage {label}")?;
            for g in c.gates() {
                writeln!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

/// `N^{p(0)}`: one NOT per set bit of `p(0)`, for `p(x) = x ⊕ p(0)`.
pub fn synth_n(p: &Permutation) -> Result<Circuit> {
    let mask = p.apply(0);
    if (0..p.len() as u32).any(|x| p.apply(x) != x ^ mask) {
        return Err(Error::NotNConstructible);
    }
    let gates = (0..p.width())
        .filter(|i| mask >> i & 1 == 1)
        .map(Gate::not)
        .collect();
    Circuit::from_gates(p.width(), gates)
}

fn toffoli_cost(controls: usize) -> usize {
    match controls {
        2 => 1,
        c => 4 * (c - 2),
    }
}

/// Multi-controlled NOT from Toffolis, using `borrowed` wires in any state
/// and restoring them; needs `controls.len() ≥ 2` and
/// `borrowed.len() ≥ controls.len() − 2`. Costs `4(m − 2)` gates for
/// `m ≥ 3` controls.
pub fn mcx_borrowed(controls: &[usize], target: usize, borrowed: &[usize]) -> Vec<Gate> {
    let m = controls.len();
    assert!(m >= 2, "need at least two controls");
    if m == 2 {
        return vec![Gate::toffoli(controls[0], controls[1], target)];
    }
    assert!(borrowed.len() >= m - 2, "not enough borrowed wires");
    let c = controls;
    let a = &borrowed[..m - 2];
    let mut half = Vec::with_capacity(2 * m - 4);
    half.push(Gate::toffoli(c[m - 1], a[m - 3], target));
    for i in (2..=m - 2).rev() {
        half.push(Gate::toffoli(c[i], a[i - 2], a[i - 1]));
    }
    half.push(Gate::toffoli(c[0], c[1], a[0]));
    for i in 2..=m - 2 {
        half.push(Gate::toffoli(c[i], a[i - 2], a[i - 1]));
    }
    let mut gates = half.clone();
    gates.extend(half);
    gates
}

/// Circuit for `κ₀ = (2ⁿ−4, 2ⁿ−3)(2ⁿ−2, 2ⁿ−1)`, i.e. NOT on wire 0
/// controlled by wires `2..n`.
///
/// For `n ≥ 5` the controls are split in two halves around the free wire 1:
/// `B·A·B·A` with `A` writing the first half's AND into wire 1 and `B`
/// controlled by the second half and wire 1. Gate counts: 1 (n = 4),
/// 4 (n = 5), 10 (n = 6), `8(n − 5)` for `n ≥ 7`. On three wires κ₀ moves
/// the power of two 4 and the result is the single CNOT `N^1_4`.
pub fn expand_kappa0(n: usize) -> Result<Circuit> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "κ₀ needs at least 3 wires, got {n}"
        )));
    }
    let controls: Vec<usize> = (2..n).collect();
    let gates = match n {
        3 => vec![Gate::cnot(2, 0)],
        4 => vec![Gate::toffoli(2, 3, 0)],
        _ => {
            let m = controls.len();
            // Split sizes: first part f ≥ 2 controls into wire 1, second part
            // (m − f) + 1 ≥ 2 controls into wire 0; borrowed wires must suffice.
            let f = (2..m)
                .filter(|&f| {
                    let r = m - f;
                    f - 2 <= r + 1 && (r + 1).saturating_sub(2) <= f
                })
                .min_by_key(|&f| (toffoli_cost(f) + toffoli_cost(m - f + 1), f))
                .expect("a valid split exists for n ≥ 5");
            let (first, rest) = controls.split_at(f);
            let mut a_borrow: Vec<usize> = rest.to_vec();
            a_borrow.push(0);
            let a = mcx_borrowed(first, 1, &a_borrow);
            let mut b_controls = rest.to_vec();
            b_controls.push(1);
            let b = mcx_borrowed(&b_controls, 0, first);
            let mut g = Vec::with_capacity(2 * (a.len() + b.len()));
            g.extend_from_slice(&b);
            g.extend_from_slice(&a);
            g.extend_from_slice(&b);
            g.extend_from_slice(&a);
            g
        }
    };
    Circuit::from_gates(n, gates)
}

fn kappa0_pairs(n: usize) -> [(u32, u32); 2] {
    let top = (1u32 << n) - 1;
    [(top - 3, top - 2), (top - 1, top)]
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

fn lowest_two(mask: u32) -> u32 {
    let lo = mask & mask.wrapping_neg();
    let rest = mask ^ lo;
    lo | (rest & rest.wrapping_neg())
}

/// Appends gates taking `value` to `want`: missing bits of `want` are set by
/// Toffolis controlled by `setters`, then surplus bits are cleared by
/// Toffolis controlled by `clear_by ⊆ want`.
fn route(gates: &mut Vec<Gate>, value: u32, setters: u32, want: u32, clear_by: u32) {
    debug_assert_eq!(setters.count_ones(), 2);
    debug_assert_eq!(value & setters, setters);
    debug_assert_eq!(clear_by.count_ones(), 2);
    debug_assert_eq!(want & clear_by, clear_by);
    for b in bits(want & !value) {
        gates.push(Gate::Inv {
            targets: 1 << b,
            controls: setters,
        });
    }
    for b in bits((value | want) & !want) {
        gates.push(Gate::Inv {
            targets: 1 << b,
            controls: clear_by,
        });
    }
}

fn check_heavy_distinct(idx: &[u32], n: usize) -> Result<()> {
    for (i, &x) in idx.iter().enumerate() {
        if x >> n != 0 {
            return Err(Error::IndexOutOfRange {
                index: x as usize,
                width: n,
            });
        }
        if is_basis_or_zero(x) {
            return Err(Error::Precondition(format!(
                "index {x} is 0 or a power of two and cannot be moved by Toffolis"
            )));
        }
        if idx[i + 1..].contains(&x) {
            return Err(Error::RepeatedIndex(x as usize));
        }
    }
    Ok(())
}

/// T-circuit of at most `5n − 2` gates computing some `π` with
/// `π(a) = 2ⁿ−4`, `π(b) = 2ⁿ−3`, `π(c) = 2ⁿ−2`, `π(d) = 2ⁿ−1`.
///
/// Five stages with `M = 2ⁿ⁻¹`: `a ↦ M+4`, `b ↦ M+1`, `c ↦ M+2`, `d ↦ M+7`,
/// each fixing the values already placed, then a fixed relabeling onto the
/// top four indices. Control pairs are the lowest qualifying bits.
pub fn synth_conjugator(a: u32, b: u32, c: u32, d: u32, n: usize) -> Result<Circuit> {
    if n <= 3 {
        return Err(Error::Precondition(format!(
            "conjugator needs n > 3, got {n}"
        )));
    }
    check_heavy_distinct(&[a, b, c, d], n)?;
    let top = (1u32 << n) - 1;
    if [a, b, c, d] == [top - 3, top - 2, top - 1, top] {
        return Circuit::new(n);
    }
    let hi = 1u32 << (n - 1);
    let mut gates: Vec<Gate> = Vec::new();
    let run = |gates: &[Gate], x: u32| gates.iter().fold(x, |v, g| g.apply(v));

    // a -> M+4
    let va = run(&gates, a);
    route(&mut gates, va, lowest_two(va), hi | 4, hi | 4);

    // b -> M+1, fixing M+4
    let vb = run(&gates, b);
    let x = vb & !(hi | 4);
    let x = x & x.wrapping_neg();
    let rest = vb & !x;
    let y = rest & rest.wrapping_neg();
    route(&mut gates, vb, x | y, hi | 1, hi | 1);

    // c -> M+2, fixing M+4 and M+1
    let vc = run(&gates, c);
    let x = vc & !(hi | 4);
    let x = x & x.wrapping_neg();
    let mut y = vc & !(hi | 1);
    y &= y.wrapping_neg();
    if x == y {
        let rest = vc & !x;
        y = rest & rest.wrapping_neg();
    }
    route(&mut gates, vc, x | y, hi | 2, hi | 2);

    // d -> M+7, fixing M+1, M+2, M+4
    let vd = run(&gates, d);
    let off_top = vd & !hi;
    let setters = if off_top.count_ones() >= 2 {
        lowest_two(off_top)
    } else {
        debug_assert!(off_top & 7 == 0);
        hi | off_top
    };
    route(&mut gates, vd, setters, hi | 7, 0b11);

    // M+4 -> 2M-4, M+1 -> 2M-3, M+2 -> 2M-2, M+7 -> 2M-1
    gates.push(Gate::Inv {
        targets: 4,
        controls: hi | 1,
    });
    gates.push(Gate::Inv {
        targets: 4,
        controls: hi | 2,
    });
    for bit in 3..n - 1 {
        gates.push(Gate::Inv {
            targets: 1 << bit,
            controls: hi | 4,
        });
    }
    let circ = Circuit::from_gates(n, gates)?;
    debug_assert_eq!(
        [a, b, c, d].map(|x| circ.apply(x)),
        [top - 3, top - 2, top - 1, top]
    );
    Ok(circ)
}

/// Optimal T-circuits on three wires; T gates there generate every
/// permutation of {3, 5, 6, 7}.
fn width3_t_table() -> &'static HashMap<Vec<u32>, Vec<Gate>> {
    static TABLE: OnceLock<HashMap<Vec<u32>, Vec<Gate>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let gens = [
            Gate::toffoli(1, 2, 0),
            Gate::toffoli(0, 2, 1),
            Gate::toffoli(0, 1, 2),
        ];
        let id: Vec<u32> = (0..8).collect();
        let mut table = HashMap::new();
        table.insert(id.clone(), Vec::new());
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            let circ = table[&p].clone();
            for g in gens {
                let next: Vec<u32> = p.iter().map(|&y| g.apply(y)).collect();
                if !table.contains_key(&next) {
                    let mut c: Vec<Gate> = circ.clone();
                    c.push(g);
                    table.insert(next.clone(), c);
                    queue.push_back(next);
                }
            }
        }
        debug_assert_eq!(table.len(), 24);
        table
    })
}

fn synth_t_width3(p: &Permutation) -> Result<Circuit> {
    let gates = width3_t_table()
        .get(p.images())
        .ok_or(Error::NotTConstructible("must fix 0 and powers of two"))?;
    Circuit::from_gates(3, gates.clone())
}

/// T-circuit computing exactly `(a,b)(c,d)`.
pub fn synth_pair(tp: &TranspositionPair, n: usize) -> Result<Circuit> {
    check_heavy_distinct(&tp.indices(), n)?;
    let target = Permutation::from_pairs(std::slice::from_ref(tp), n)?;
    if n == 3 {
        return synth_t_width3(&target);
    }
    let kappa = kappa0_pairs(n);
    let pair_set = |x: u32, y: u32| (x.min(y), x.max(y));
    let given = [pair_set(tp.a, tp.b), pair_set(tp.c, tp.d)];
    if given == kappa || given == [kappa[1], kappa[0]] {
        return expand_kappa0(n);
    }
    let conj = synth_conjugator(tp.a, tp.b, tp.c, tp.d, n)?;
    let mut circ = conj.clone();
    circ.extend_from(&expand_kappa0(n)?);
    circ.extend_from(&conj.inverse());
    debug_assert!(circ.computes(&target));
    Ok(circ)
}

/// T-circuit for a permutation fixing 0 and every `2^i` (and even when
/// `n > 3`). Uses at most `3(s+1)(3n−7)` gates for `s` moved indices.
pub fn synth_t(p: &Permutation) -> Result<Circuit> {
    let n = p.width();
    if n < 3 {
        return if p.is_identity() {
            Circuit::new(n)
        } else {
            Err(Error::NotTConstructible(
                "no Toffoli fits on fewer than 3 wires",
            ))
        };
    }
    if !p.fixes_basis() {
        return Err(Error::NotTConstructible("must fix 0 and powers of two"));
    }
    if n == 3 {
        return synth_t_width3(p);
    }
    if !p.parity().is_even() {
        return Err(Error::NotTConstructible(
            "odd permutation on more than 3 wires",
        ));
    }
    let mut circ = Circuit::new(n)?;
    for tp in p.decompose_pairs()? {
        circ.extend_from(&synth_pair(&tp, n)?);
    }
    let circ = cancel_adjacent(&circ);
    debug_assert!(circ.computes(p));
    Ok(circ)
}

/// Columns whose images are not powers of two get new images that make the
/// whole set of basis images linearly independent. Returns `(column, image)`.
fn independent_targets(images: &[u32], n: usize) -> Vec<(usize, u32)> {
    let basis_hits: u32 = images
        .iter()
        .filter(|v| v.count_ones() == 1)
        .fold(0, |m, v| m | v);
    let heavy_cols: Vec<usize> = (0..n).filter(|&j| images[j].count_ones() > 1).collect();
    let free: Vec<u32> = (0..n as u32)
        .filter(|i| basis_hits >> i & 1 == 0)
        .map(|i| 1 << i)
        .collect();
    let k = heavy_cols.len();
    debug_assert_eq!(free.len(), k);
    let spare = basis_hits & basis_hits.wrapping_neg();
    let targets: Vec<u32> = match k {
        0 => vec![],
        1 => vec![free[0] | spare],
        2 => vec![free[0] | free[1], free[1] | spare],
        _ => {
            // Invertible k×k pattern with at least two ones per column:
            // ones on the diagonal, first row and first column, corner set iff
            // k is odd.
            (0..k)
                .map(|col| {
                    if col == 0 {
                        let all: u32 = free.iter().fold(0, |m, f| m | f);
                        if k % 2 == 1 {
                            all
                        } else {
                            all & !free[0]
                        }
                    } else {
                        free[0] | free[col]
                    }
                })
                .collect()
        }
    };
    heavy_cols.into_iter().zip(targets).collect()
}

/// A permutation of the non-basis indices sending each `from[i]` to `to[i]`
/// and moving nothing else, made even on request by one extra transposition.
fn heavy_permutation(n: usize, from: &[u32], to: &[u32], even: bool) -> Result<Permutation> {
    let len = 1u32 << n;
    let mut images: Vec<u32> = (0..len).collect();
    for (&f, &t) in from.iter().zip(to) {
        images[f as usize] = t;
    }
    // Close the partial map: sources in `to \ from` take targets in `from \ to`.
    let sources: Vec<u32> = to.iter().copied().filter(|x| !from.contains(x)).collect();
    let targets: Vec<u32> = from.iter().copied().filter(|x| !to.contains(x)).collect();
    let mut sources = sources;
    sources.sort_unstable();
    let mut targets = targets;
    targets.sort_unstable();
    for (s, t) in sources.into_iter().zip(targets) {
        images[s as usize] = t;
    }
    let mut p = Permutation::from_images(images)?;
    if even && !p.parity().is_even() {
        let spare: Vec<u32> = (0..len)
            .filter(|&x| !is_basis_or_zero(x) && !to.contains(&x))
            .take(2)
            .collect();
        if spare.len() < 2 {
            return Err(Error::NoSpareIndices(2));
        }
        let swap =
            Permutation::from_cycles(&crate::perm::CycleNotation::new(vec![spare.clone()])?, n)?;
        p = p.then(&swap)?;
    }
    Ok(p)
}

/// T|C|T synthesis of a zero-fixing permutation (even when `n > 3`).
///
/// A T-constructible `σ` is chosen so that `σ ∘ p` sends the powers of two
/// to linearly independent values; then `σ ∘ p` is a T-circuit followed by
/// the C-circuit of that linear map, and `σ⁻¹` closes the circuit. Stage
/// bounds: at most `n²` C gates, at most `3(2ⁿ+n+1)(3n−7)` T gates.
pub fn synth_tct(p: &Permutation) -> Result<StagedCircuit> {
    let n = p.width();
    if p.apply(0) != 0 {
        return Err(Error::NotConstructible("T|C|T circuits fix 0".into()));
    }
    let mut staged = StagedCircuit::new(n);
    if n <= 2 {
        // Every zero-fixing permutation of 1 or 2 wires is linear.
        let m = BitMatrix::of_permutation(p)?;
        staged.push("T1", Circuit::new(n)?);
        staged.push("C", gf2::synth_linear(&m)?);
        staged.push("T2", Circuit::new(n)?);
        return Ok(staged);
    }
    if n > 3 && !p.parity().is_even() {
        return Err(Error::OddPermutation);
    }
    let images: Vec<u32> = (0..n).map(|i| p.apply(1 << i)).collect();
    let patch = if gf2::independent(&images) {
        Vec::new()
    } else {
        independent_targets(&images, n)
    };
    let from: Vec<u32> = patch.iter().map(|&(j, _)| images[j]).collect();
    let to: Vec<u32> = patch.iter().map(|&(_, t)| t).collect();
    let sigma = heavy_permutation(n, &from, &to, n > 3)?;
    let rho = p.then(&sigma)?;
    let cols: Vec<u32> = (0..n).map(|i| rho.apply(1 << i)).collect();
    let linear = BitMatrix::from_columns(&cols)?;
    if !linear.is_invertible() {
        return Err(Error::NotConstructible(
            "basis images remain dependent after patching".into(),
        ));
    }
    let t1 = rho.then(&linear.to_permutation()?.inverse())?;
    staged.push("T1", synth_t(&t1)?);
    staged.push("C", gf2::synth_linear(&linear)?);
    staged.push("T2", synth_t(&sigma.inverse())?);
    debug_assert!(staged.flatten().computes(p));
    Ok(staged)
}

/// T|C|T|N synthesis: any permutation on up to 3 wires, any even one beyond.
/// The N stage is always `N^{p(0)}`.
pub fn synth_tctn(p: &Permutation) -> Result<StagedCircuit> {
    let n = p.width();
    if n > 3 && !p.parity().is_even() {
        return Err(Error::OddPermutation);
    }
    let xor = Permutation::xor_mask(n, p.apply(0))?;
    let zero_fixing = p.then(&xor)?;
    let mut staged = synth_tct(&zero_fixing)?;
    staged.push("N", synth_n(&xor)?);
    debug_assert!(staged.flatten().computes(p));
    Ok(staged)
}

/// Circuit on `n + 1` wires mapping `(y, x) ↦ (y, p(x))`, with `y` the new
/// most-significant wire. Works for odd `p`, whose lift is even.
pub fn synth_with_ancilla(p: &Permutation) -> Result<StagedCircuit> {
    synth_tctn(&p.lift()?)
}
