use proptest::prelude::*;
use ttsat_core::fixture::example_instance;
use ttsat_core::{
    encode, gen_random_instance, parse_dimacs, parse_instance, write_dimacs, Clause, EncodeOptions, GenParams, Lit,
    WcnfFormula, Weight,
};

fn clause_strategy(n: u32) -> impl Strategy<Value = (Vec<Lit>, Option<u64>)> {
    let lits = proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 1..=(n as usize).min(4))
        .prop_flat_map(|vars| {
            let k = vars.len();
            (Just(vars), proptest::collection::vec(any::<bool>(), k))
        })
        .prop_map(|(vars, signs)| vars.into_iter().zip(signs).map(|(v, s)| Lit::new(v, s)).collect());
    (lits, proptest::option::of(1..1000u64))
}

fn formula_strategy() -> impl Strategy<Value = WcnfFormula> {
    (1..20u32)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(clause_strategy(n), 0..40)))
        .prop_map(|(n, clauses)| {
            let mut f = WcnfFormula::new(n);
            for (lits, w) in clauses {
                let weight = w.map_or(Weight::Hard, Weight::Soft);
                f.add(Clause::new(lits, weight).unwrap()).unwrap();
            }
            f
        })
}

proptest! {
    #[test]
    fn dimacs_write_parse_write_is_identity(f in formula_strategy()) {
        let text = write_dimacs(&f);
        let parsed = parse_dimacs(&text).unwrap();
        prop_assert_eq!(&parsed, &f);
        prop_assert_eq!(write_dimacs(&parsed), text);
    }

    #[test]
    fn generated_instances_survive_json(seed in any::<u64>(), courses in 1..6usize, rooms in 1..4usize) {
        let params = GenParams {
            days: 2,
            slots_per_day: 2,
            rooms,
            courses,
            curricula: courses.div_ceil(2),
            overlap_density: 0.4,
        };
        let i = gen_random_instance(seed, &params).unwrap();
        let back = parse_instance(&i.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), i.to_json());
        prop_assert_eq!(back, i);
    }
}

#[test]
fn example_encoding_round_trips() {
    let enc = encode(&example_instance(), &EncodeOptions::weighted()).unwrap();
    let text = write_dimacs(&enc.formula);
    assert!(text.starts_with("c ttsat "));
    let parsed = parse_dimacs(&text).unwrap();
    assert_eq!(write_dimacs(&parsed), text);
}

#[test]
fn example_json_round_trips() {
    let i = example_instance();
    assert_eq!(parse_instance(&i.to_json()).unwrap(), i);
}
