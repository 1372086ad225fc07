use levelcross::continuous::approximate_level_crossing;
use levelcross::discrete::{solve, SolveOptions};
use levelcross::functions;
use levelcross::gen::valid_labeling;
use levelcross::grid::GridShape;
use levelcross::io::{emit_witness, parse_labeling, serialize_labeling, WitnessRef};
use levelcross::steinhaus::{find_crossing, random_coloring};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn continuous_witness_is_byte_identical() {
    let f = functions::quadratic().unwrap();
    let a = emit_witness(WitnessRef::Continuous(
        &approximate_level_crossing(&f, 0.3).unwrap(),
    ));
    let b = emit_witness(WitnessRef::Continuous(
        &approximate_level_crossing(&f, 0.3).unwrap(),
    ));
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<&str> = doc
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    let mut expected = vec!["axis", "cells", "epsilon", "k", "kind", "n", "p"];
    expected.sort();
    let mut got = keys.clone();
    got.sort();
    assert_eq!(got, expected);
    assert!(a.starts_with(r#"{"kind":"continuous","n":2,"#));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chessboard_json_survives_reparse(seed in any::<u64>(), n in 1usize..4, k in 1usize..6) {
        let l = random_coloring(GridShape::new(n, k).unwrap(), n, &mut ChaCha8Rng::seed_from_u64(seed));
        let again = parse_labeling(&serialize_labeling(&l)).unwrap();
        prop_assert_eq!(&again, &l);
        let a = emit_witness(WitnessRef::Chessboard(&find_crossing(&l).unwrap(), l.shape()));
        let b = emit_witness(WitnessRef::Chessboard(&find_crossing(&again).unwrap(), again.shape()));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn discrete_json_survives_reparse(seed in any::<u64>(), k in 1usize..6, m in 0usize..3) {
        let shape = GridShape::new(3, k).unwrap();
        let l = valid_labeling(shape, m, &mut ChaCha8Rng::seed_from_u64(seed));
        let again = parse_labeling(&serialize_labeling(&l)).unwrap();
        let w1 = solve(&l, m, SolveOptions::default()).unwrap();
        let w2 = solve(&again, m, SolveOptions::default()).unwrap();
        prop_assert_eq!(
            emit_witness(WitnessRef::Discrete(&w1, shape)),
            emit_witness(WitnessRef::Discrete(&w2, shape))
        );
    }
}
