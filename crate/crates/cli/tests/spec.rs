use gwl4_cli::spec::{AmbientSpec, ShapeKind, ShapeSpec, SpecDoc};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn ambient() -> impl Strategy<Value = AmbientSpec> {
    prop_oneof![
        Just(AmbientSpec::Flat),
        (5usize..9).prop_map(AmbientSpec::RoundSphere),
        (5usize..9).prop_map(AmbientSpec::Hyperbolic),
        prop::sample::select(vec!["sin1", "quad", "mixed"]).prop_map(|s| AmbientSpec::ConformalFlat(s.into())),
    ]
}

fn shape() -> impl Strategy<Value = ShapeKind> {
    let product = prop::collection::vec((1usize..5, 0.1f64..10.0), 1..5).prop_map(ShapeKind::Product);
    let ellipsoid = prop::collection::vec(0.5f64..2.0, 5).prop_map(|axes| ShapeKind::Chart {
        family: "ellipsoid".into(),
        params: BTreeMap::from([("axes".to_string(), axes)]),
    });
    let wavy = (0.0f64..0.1, 1.0f64..4.0).prop_map(|(a, f)| ShapeKind::Chart {
        family: "wavy-sphere".into(),
        params: BTreeMap::from([("amp".to_string(), vec![a]), ("freq".to_string(), vec![f])]),
    });
    prop_oneof![product, ellipsoid, wavy]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn strings_and_documents_round_trip(shape in shape(), ambient in ambient()) {
        let spec = ShapeSpec::new(shape, ambient).unwrap();
        let text = spec.to_string();
        prop_assert_eq!(&text.parse::<ShapeSpec>().unwrap(), &spec);
        let doc = serde_json::to_string(&SpecDoc::from(&spec)).unwrap();
        let back: SpecDoc = serde_json::from_str(&doc).unwrap();
        prop_assert_eq!(back.into_spec().unwrap(), spec);
    }
}
