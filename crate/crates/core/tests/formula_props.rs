use proptest::prelude::*;
use tcsm_core::formula::DEFAULT_ATOM_CAP;
use tcsm_core::{Formula, Signal, SignalSet};

const ATOMS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn formula(atoms: usize, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        6 => (0..atoms).prop_map(|i| Formula::var(ATOMS[i])),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
        ]
    })
}

fn subset(universe: &[Signal], mask: u32) -> SignalSet {
    universe
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| s.clone())
        .collect()
}

fn all_subsets(universe: &[Signal]) -> impl Iterator<Item = SignalSet> + '_ {
    (0..1u32 << universe.len()).map(move |m| subset(universe, m))
}

fn atoms() -> Vec<Signal> {
    ATOMS.iter().map(|a| Signal::new(a).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn reduction_fixes_outputs(w in formula(6, 4), out_mask in 0u32..64, x_mask in 0u32..64) {
        let all = atoms();
        let out = subset(&all, out_mask);
        let x = subset(&all, out_mask & x_mask);
        let reduced = w.reduce(&x, &out);
        let external: Vec<Signal> = w.signals().difference(&out).cloned().collect();
        for e in all_subsets(&external) {
            let with_x: SignalSet = e.union(&x).cloned().collect();
            prop_assert_eq!(reduced.eval(&e), w.eval(&with_x));
        }
    }

    #[test]
    fn reduction_is_idempotent(w in formula(6, 4), out_mask in 0u32..64, x_mask in 0u32..64) {
        let all = atoms();
        let out = subset(&all, out_mask);
        let x = subset(&all, out_mask & x_mask);
        let once = w.reduce(&x, &out);
        prop_assert_eq!(once.reduce(&x, &out), once);
    }

    #[test]
    fn reduction_purges_atoms(w in formula(6, 4), out_mask in 0u32..64, x_mask in 0u32..64) {
        let all = atoms();
        let out = subset(&all, out_mask);
        let x = subset(&all, out_mask & x_mask);
        let left = w.reduce(&x, &out).signals();
        prop_assert!(left.is_disjoint(&out));
        prop_assert!(left.is_disjoint(&x));
    }

    #[test]
    fn output_formula_characterizes_outputs(out_mask in 0u32..64, o_mask in 0u32..64) {
        let all = atoms();
        let out = subset(&all, out_mask);
        let o = subset(&all, out_mask & o_mask);
        let alpha = Formula::output_formula(&o, &out).unwrap();
        let mut universe: Vec<Signal> = out.iter().cloned().collect();
        universe.push(Signal::new("fresh").unwrap());
        for a in all_subsets(&universe) {
            let visible: SignalSet = a.intersection(&out).cloned().collect();
            prop_assert_eq!(alpha.eval(&a), visible == o);
        }
    }

    #[test]
    fn satisfiability_matches_truth_table(w in formula(4, 4)) {
        let sig: Vec<Signal> = w.signals().into_iter().collect();
        let brute = all_subsets(&sig).any(|a| w.eval(&a));
        prop_assert_eq!(w.is_unsatisfiable().unwrap(), !brute);
        let valid = all_subsets(&sig).all(|a| w.eval(&a));
        prop_assert_eq!(w.is_tautology().unwrap(), valid);
        if let Some(a) = w.find_assignment(true, DEFAULT_ATOM_CAP).unwrap() {
            prop_assert!(w.eval(&a));
        }
    }

    #[test]
    fn printing_round_trips(w in formula(6, 5)) {
        let text = w.to_string();
        let back: Formula = text.parse().unwrap();
        prop_assert!(back.equivalent(&w).unwrap(), "{} vs {}", text, back);
        prop_assert_eq!(back.to_string(), text);
    }
}
