use proptest::prelude::*;
use revsynth::constructive::{synth_tctn, synth_with_ancilla};
use revsynth::gf2::{synth_linear, BitMatrix};
use revsynth::rewrite::{cancel_adjacent, push_nots_right};
use revsynth::{Circuit, Gate, GateKind, Permutation};

fn perm(width: usize) -> impl Strategy<Value = Permutation> {
    Just((0..1u32 << width).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn cnt_gate(width: usize) -> impl Strategy<Value = Gate> {
    (0..width, 0..width, 0..width, 0..3u8).prop_filter_map("distinct wires", move |(a, b, t, k)| {
        match k {
            0 => Some(Gate::not(t)),
            1 if a != t => Some(Gate::cnot(a, t)),
            2 if a != b && a != t && b != t => Some(Gate::toffoli(a, b, t)),
            _ => None,
        }
    })
}

fn cnt_circuit(width: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(cnt_gate(width), 0..40)
        .prop_map(move |gs| Circuit::from_gates(width, gs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tctn_is_sound_on_four_wires(p in perm(4)) {
        let res = synth_tctn(&p);
        if p.parity().is_even() {
            let s = res.unwrap();
            prop_assert!(s.flatten().computes(&p));
            prop_assert!(s.stages_pure());
            prop_assert!(s.stage("C").unwrap().len() <= 16);
            prop_assert!(s.stage("N").unwrap().len() <= 4);
        } else {
            prop_assert!(res.is_err());
        }
    }

    #[test]
    fn tctn_is_sound_on_five_wires(p in perm(5)) {
        prop_assume!(p.parity().is_even());
        let s = synth_tctn(&p).unwrap();
        prop_assert!(s.flatten().computes(&p));
        prop_assert!(s.count_prefixed("T") <= 3 * (32 + 5 + 1) * 8);
    }

    #[test]
    fn ancilla_handles_any_parity(p in perm(4)) {
        let s = synth_with_ancilla(&p).unwrap();
        prop_assert_eq!(s.width(), 5);
        prop_assert!(s.flatten().computes(&p.lift().unwrap()));
    }

    #[test]
    fn three_wire_synthesis_covers_odd(p in perm(3)) {
        prop_assert!(synth_tctn(&p).unwrap().flatten().computes(&p));
    }

    #[test]
    fn inverse_then_circuit_is_identity(c in cnt_circuit(4)) {
        let mut both = c.clone();
        both.extend_from(&c.inverse());
        prop_assert!(both.permutation().is_identity());
        prop_assert_eq!(c.permutation().inverse(), c.inverse().permutation());
    }

    #[test]
    fn push_nots_preserves_function(c in cnt_circuit(5)) {
        let out = push_nots_right(&c).unwrap();
        prop_assert!(out.computes(&c.permutation()));
        let first_not = out.gates().iter().position(|g| g.kind() == GateKind::N).unwrap_or(out.len());
        prop_assert!(out.gates()[first_not..].iter().all(|g| g.kind() == GateKind::N));
        prop_assert!(out.count_kind(GateKind::N) <= 5);
    }

    #[test]
    fn cancel_adjacent_preserves_function(c in cnt_circuit(4)) {
        let out = cancel_adjacent(&c);
        prop_assert!(out.computes(&c.permutation()));
        prop_assert!(out.len() <= c.len());
        prop_assert!(out.gates().windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn circuit_text_round_trips(c in cnt_circuit(4)) {
        let back: Circuit = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn cycles_round_trip(p in perm(4)) {
        let cy = p.cycles();
        prop_assert_eq!(Permutation::from_cycles(&cy, 4).unwrap(), p.clone());
        let text = cy.to_string();
        prop_assert_eq!(Permutation::from_cycles(&text.parse().unwrap(), 4).unwrap(), p);
    }

    #[test]
    fn linear_synthesis_round_trips(cols in prop::collection::vec(1u32..64, 6)) {
        let m = BitMatrix::from_columns(&cols).unwrap();
        match synth_linear(&m) {
            Ok(c) => {
                prop_assert!(m.is_invertible());
                prop_assert!(c.len() <= 36);
                prop_assert!(c.only_kinds(&[GateKind::C]));
                prop_assert!(c.computes(&m.to_permutation().unwrap()));
            }
            Err(_) => prop_assert!(!m.is_invertible()),
        }
    }

    #[test]
    fn cnt_gates_on_four_wires_are_even(g in cnt_gate(4)) {
        prop_assert!(g.permutation(4).unwrap().parity().is_even());
    }
}
