//! Equivalence-preserving circuit rewrites.

use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate, GateKind};

/// `P · Q · P⁻¹ · Q⁻¹`, gates applied left to right.
pub fn commutator(p: &Circuit, q: &Circuit) -> Result<Circuit> {
    if p.width() != q.width() {
        return Err(Error::WidthMismatch(p.width(), q.width()));
    }
    let mut out = p.clone();
    out.extend_from(q);
    out.extend_from(&p.inverse());
    out.extend_from(&q.inverse());
    Ok(out)
}

/// Factors common controls out of a commutator of two controlled inverters
/// `g1 = V_h(G^i)` and `g2 = V_k(H^j)`.
///
/// Returns `(V_{h∩j}(G^i), V_{k∩i}(H^j), mask)` with
/// `mask = (h ∪ k) \ (i ∪ j)`. The commutator of the inputs equals the
/// commutator of the reduced gates with `mask` added to every control set.
pub fn lift_controls(g1: &Gate, g2: &Gate) -> Result<(Gate, Gate, u32)> {
    let (
        &Gate::Inv {
            targets: i,
            controls: h,
        },
        &Gate::Inv {
            targets: j,
            controls: k,
        },
    ) = (g1, g2)
    else {
        return Err(Error::Precondition(
            "control lifting needs controlled inverters".into(),
        ));
    };
    let mask = (h | k) & !(i | j);
    Ok((
        Gate::Inv {
            targets: i,
            controls: h & j,
        },
        Gate::Inv {
            targets: j,
            controls: k & i,
        },
        mask,
    ))
}

/// Moves every NOT gate to the end of the circuit.
///
/// A pending NOT mask is carried left to right. A gate whose controls `S`
/// are negated by the mask becomes the product over `U ⊆ S` of the gate with
/// controls `(k \ S) ∪ U`; an uncontrolled member toggles the mask instead.
/// Output: a NOT-free prefix followed by at most `n` NOTs in wire order,
/// with at most `3(l − 1) + n` gates for `l ≥ 1` input gates.
pub fn push_nots_right(c: &Circuit) -> Result<Circuit> {
    let mut out: Vec<Gate> = Vec::with_capacity(c.len());
    let mut pending = 0u32;
    for g in c.gates() {
        if !matches!(g.kind(), GateKind::N | GateKind::C | GateKind::T) {
            return Err(Error::NonCntGate);
        }
        let &Gate::Inv { targets, controls } = g else {
            return Err(Error::NonCntGate);
        };
        let negated = controls & pending;
        let fixed = controls & !negated;
        // Enumerate subsets U of `negated`, starting from the empty set.
        let mut u = 0u32;
        loop {
            let ctl = fixed | u;
            if ctl == 0 {
                pending ^= targets;
            } else {
                out.push(Gate::Inv {
                    targets,
                    controls: ctl,
                });
            }
            if u == negated {
                break;
            }
            u = (u.wrapping_sub(negated)) & negated;
        }
    }
    out.extend(
        (0..c.width())
            .filter(|b| pending >> b & 1 == 1)
            .map(Gate::not),
    );
    let result = Circuit::from_gates(c.width(), out)?;
    debug_assert!(result.computes(&c.permutation()));
    Ok(result)
}

/// Removes adjacent identical gates until none remain.
pub fn cancel_adjacent(c: &Circuit) -> Circuit {
    let mut stack: Vec<Gate> = Vec::with_capacity(c.len());
    for g in c.gates() {
        if stack.last() == Some(g) {
            stack.pop();
        } else {
            stack.push(*g);
        }
    }
    Circuit::from_gates(c.width(), stack).expect("gates already fit the width")
}

/// Two-wire commutator identities on wires `i ≠ j`, as
/// `(commutator, expected)` pairs:
/// `[N^i, N^j_i] = N^j`, `[N^i_j, N^j] = N^i`, `[N^i, N^j] = 1`.
///
/// Two opposing CNOTs have a 3-cycle as commutator, so no fourth identity
/// of this shape exists.
pub fn base_identities(width: usize, i: usize, j: usize) -> Result<Vec<(Circuit, Circuit)>> {
    if i == j || i >= width || j >= width {
        return Err(Error::Precondition(format!(
            "need distinct wires below {width}"
        )));
    }
    let one = |g: Gate| Circuit::from_gates(width, vec![g]);
    let cases = [
        (Gate::not(i), Gate::cnot(i, j), Some(Gate::not(j))),
        (Gate::cnot(j, i), Gate::not(j), Some(Gate::not(i))),
        (Gate::not(i), Gate::not(j), None),
    ];
    cases
        .into_iter()
        .map(|(p, q, rhs)| {
            let lhs = commutator(&one(p)?, &one(q)?)?;
            let rhs = match rhs {
                Some(g) => one(g)?,
                None => Circuit::new(width)?,
            };
            Ok((lhs, rhs))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn circ(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(width, gates).unwrap()
    }

    #[test]
    fn commutator_examples() {
        let c = circ(3, vec![Gate::toffoli(0, 1, 2), Gate::not(1)]);
        assert!(commutator(&c, &c).unwrap().permutation().is_identity());
        let got = commutator(
            &circ(2, vec![Gate::not(0)]),
            &circ(2, vec![Gate::cnot(0, 1)]),
        )
        .unwrap();
        assert_eq!(got.permutation(), Gate::not(1).permutation(2).unwrap());
        let got = commutator(&circ(2, vec![Gate::not(0)]), &circ(2, vec![Gate::not(1)])).unwrap();
        assert!(got.permutation().is_identity());
        assert!(commutator(&circ(2, vec![]), &circ(3, vec![])).is_err());
    }

    #[test]
    fn base_identities_hold() {
        for (i, j) in [(0, 1), (1, 0)] {
            for (lhs, rhs) in base_identities(2, i, j).unwrap() {
                assert_eq!(lhs.permutation(), rhs.permutation());
            }
        }
        let opposing = commutator(
            &circ(2, vec![Gate::cnot(1, 0)]),
            &circ(2, vec![Gate::cnot(0, 1)]),
        )
        .unwrap()
        .permutation();
        assert_eq!(opposing.cycles().to_string(), "(1,2,3)");
    }

    fn lifted_matches(g1: Gate, g2: Gate, width: usize) -> bool {
        let (a, b, mask) = lift_controls(&g1, &g2).unwrap();
        let lhs = commutator(&circ(width, vec![g1]), &circ(width, vec![g2])).unwrap();
        let inner = commutator(&circ(width, vec![a]), &circ(width, vec![b])).unwrap();
        let rhs = circ(
            width,
            inner
                .gates()
                .iter()
                .map(|g| g.with_controls(mask))
                .collect(),
        );
        lhs.permutation() == rhs.permutation()
    }

    #[test]
    fn lift_examples() {
        let g1 = Gate::inv(1, 6).unwrap();
        let g2 = Gate::inv(2, 5).unwrap();
        let (a, b, mask) = lift_controls(&g1, &g2).unwrap();
        assert_eq!(mask, 4);
        assert_eq!(a, Gate::cnot(1, 0));
        assert_eq!(b, Gate::cnot(0, 1));
        assert!(lifted_matches(g1, g2, 3));

        let (a, b, mask) = lift_controls(&Gate::not(0), &Gate::not(1)).unwrap();
        assert_eq!((a, b, mask), (Gate::not(0), Gate::not(1), 0));
        assert!(lift_controls(&Gate::swap(0, 1).unwrap(), &Gate::not(0)).is_err());
    }

    #[test]
    fn lift_exhaustive_t_pairs_width4() {
        let ts: Vec<Gate> = crate::gate::GateLibrary::CNT
            .enumerate(4)
            .into_iter()
            .filter(|g| g.kind() == GateKind::T)
            .collect();
        for &g1 in &ts {
            for &g2 in &ts {
                assert!(lifted_matches(g1, g2, 4), "{g1} {g2}");
            }
        }
    }

    #[test]
    fn push_nots_examples() {
        let all_n = circ(
            3,
            vec![Gate::not(0), Gate::not(2), Gate::not(0), Gate::not(1)],
        );
        let out = push_nots_right(&all_n).unwrap();
        assert_eq!(out.gates(), &[Gate::not(1), Gate::not(2)]);

        let fig = circ(
            3,
            vec![
                Gate::toffoli(0, 1, 2),
                Gate::not(0),
                Gate::toffoli(0, 1, 2),
                Gate::not(0),
            ],
        );
        let out = push_nots_right(&fig).unwrap();
        assert_eq!(out.permutation(), Gate::cnot(1, 2).permutation(3).unwrap());
        assert!(out.count_kind(GateKind::N) == 0);

        let both = circ(3, vec![Gate::not(0), Gate::not(1), Gate::toffoli(0, 1, 2)]);
        let out = push_nots_right(&both).unwrap();
        assert!(out.computes(&both.permutation()));
        assert!(out.len() <= 3 * 2 + 3);

        let bad = circ(2, vec![Gate::swap(0, 1).unwrap()]);
        assert!(matches!(push_nots_right(&bad), Err(Error::NonCntGate)));
    }

    #[test]
    fn cancel_examples() {
        let c = circ(2, vec![Gate::not(0), Gate::not(0)]);
        assert!(cancel_adjacent(&c).is_empty());
        let t = Gate::inv(1, 6).unwrap();
        let c = circ(3, vec![t, t, Gate::not(1)]);
        assert_eq!(cancel_adjacent(&c).gates(), &[Gate::not(1)]);
        let c = circ(3, vec![Gate::not(1), t, t, Gate::not(1), Gate::not(2)]);
        assert_eq!(cancel_adjacent(&c).gates(), &[Gate::not(2)]);
        let id = Permutation::identity(3).unwrap();
        assert!(cancel_adjacent(&circ(3, vec![t, Gate::not(0), Gate::not(0), t])).computes(&id));
    }
}
