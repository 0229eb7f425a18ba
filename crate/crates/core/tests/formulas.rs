use std::collections::BTreeMap;

use ludics::formulas::{
    detect_petitio, detect_presupposition_gap, parse_formula, skeletonize, AtomPolicy,
    AtomTreatment, Domain, Domains, Evidence, Formula, FormulaError, Numbering, Term,
};
use ludics::scenarios;
use ludics::{
    design_equal, orthogonal, parse_source, validate_design, Library, Locus, Orthogonality,
    Polarity,
};
use proptest::prelude::*;

fn xi() -> Locus {
    Locus::new(vec![0])
}

fn domains() -> Domains {
    let mut d = BTreeMap::new();
    for (var, inds) in [("x", vec!["a", "b"]), ("y", vec!["c"])] {
        d.insert(
            var.to_string(),
            Domain {
                var: var.to_string(),
                individuals: inds.into_iter().map(String::from).collect(),
            },
        );
    }
    d
}

#[test]
fn compiled_dialogue_matches_the_hand_written_designs() {
    let f = parse_source(scenarios::PAPER_S25).unwrap();
    assert!(design_equal(
        f.design("SD").unwrap(),
        f.design("D").unwrap(),
        0,
        &f.library
    ));
    assert!(design_equal(
        f.design("SE").unwrap(),
        f.design("E").unwrap(),
        0,
        &f.library
    ));
    assert_eq!(
        orthogonal(
            f.design("SD").unwrap(),
            f.design("SE").unwrap(),
            &f.library,
            100
        )
        .unwrap(),
        Orthogonality::Yes
    );
}

#[test]
fn compact_numbering_and_policies() {
    let doms = domains();
    let f = parse_formula("&x (up L(x) -o +y (up A(y) * up P(x,y)))", &doms).unwrap();
    assert_eq!(f.polarity(), Polarity::Negative);
    for numbering in [Numbering::Compact, Numbering::Primes] {
        for t in [
            AtomTreatment::Fact,
            AtomTreatment::Daimon,
            AtomTreatment::Open,
        ] {
            let d = skeletonize("S", &f, &xi(), &AtomPolicy::uniform(t), numbering, &doms).unwrap();
            assert!(
                validate_design(&d, Library::empty()).is_ok(),
                "{t:?} {numbering:?}"
            );
            let e = skeletonize(
                "T",
                &f.dual(),
                &xi(),
                &AtomPolicy::uniform(t),
                numbering,
                &doms,
            )
            .unwrap();
            assert!(validate_design(&e, Library::empty()).is_ok());
            assert_eq!(d.polarity(), Polarity::Positive);
            assert_eq!(e.polarity(), Polarity::Negative);
        }
    }
    let d = skeletonize(
        "S",
        &f,
        &xi(),
        &AtomPolicy::uniform(AtomTreatment::Fact),
        Numbering::Compact,
        &doms,
    )
    .unwrap();
    // One negative entry per individual of x.
    match &d.root {
        ludics::Node::Positive { premises, .. } => match premises.get(&0) {
            Some(ludics::Node::Negative { directory, .. }) => assert_eq!(directory.len(), 2),
            other => panic!("{other:?}"),
        },
        other => panic!("{other:?}"),
    }
}

#[test]
fn formula_errors() {
    let doms = domains();
    assert!(matches!(
        parse_formula("&z P(z)", &doms),
        Err(FormulaError::UnboundVariable(_))
    ));
    assert!(matches!(
        parse_formula("P(a) * P(a,b)", &doms),
        Err(FormulaError::Arity { .. })
    ));
    assert!(matches!(
        parse_formula("P(a) * ", &doms),
        Err(FormulaError::Syntax { .. })
    ));
    assert!(matches!(
        parse_formula("P(a) $ Q", &doms),
        Err(FormulaError::Syntax { offset: 5, .. })
    ));
}

#[test]
fn circular_justification_is_found() {
    let f = parse_source(scenarios::AME).unwrap();
    let found = detect_petitio(f.design("AME").unwrap(), &f.library, 4);
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].thesis, xi());
    assert_eq!(found[0].justification, Locus::new(vec![0, 1, 1]));
    assert_eq!(
        found[0].evidence,
        Evidence::SelfReference { name: "AME".into() }
    );
    assert!(detect_petitio(f.design("CONTROL").unwrap(), &f.library, 4).is_empty());
    let twice = detect_petitio(f.design("TWICE").unwrap(), &f.library, 4);
    assert!(twice
        .iter()
        .any(|p| p.justification == Locus::new(vec![0, 1, 1, 1, 1])));
}

#[test]
fn finite_designs_never_restate_their_thesis() {
    let src = "design R : |- 0 = (+ 0 {1} (- 0.1 { {1} => (+ 0.1.1 {}) }))";
    let f = parse_source(src).unwrap();
    // A finite tree cannot contain a moved copy of itself.
    assert!(detect_petitio(f.design("R").unwrap(), &f.library, 4).is_empty());
    let src = "design R : 0 |- = (- 0 { {1} => (+ 0.1 {1} (- 0.1.1 {})) })";
    let f = parse_source(src).unwrap();
    assert!(detect_petitio(f.design("R").unwrap(), &f.library, 4).is_empty());
}

#[test]
fn hidden_presupposition_is_the_weakened_locus() {
    let f = parse_source(scenarios::MANY_QUESTIONS).unwrap();
    assert_eq!(
        detect_presupposition_gap(f.design("LOC1").unwrap(), &f.library),
        vec![Locus::new(vec![0, 0, 1])]
    );
    assert!(detect_presupposition_gap(f.design("COMPLIANT").unwrap(), &f.library).is_empty());
    let f = parse_source(scenarios::PAPER_S25).unwrap();
    assert_eq!(
        detect_presupposition_gap(f.design("D").unwrap(), &f.library),
        vec![Locus::new(vec![0, 0, 2])]
    );
}

fn atom() -> impl Strategy<Value = Formula> {
    (
        prop::sample::select(vec!["A", "B", "P"]),
        prop::sample::select(vec![vec![], vec!["a"], vec!["c"]]),
        any::<bool>(),
    )
        .prop_map(|(n, args, negated)| Formula::Atom {
            name: format!("{n}{}", args.len()),
            args: args
                .into_iter()
                .map(|a| Term::Const(a.to_string()))
                .collect(),
            negated,
        })
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Tensor(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Plus(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::With(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Par(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Formula::Up(Box::new(a))),
            inner.clone().prop_map(|a| Formula::Down(Box::new(a))),
            inner.clone().prop_map(|a| Formula::All {
                var: "x".into(),
                body: Box::new(a)
            }),
            inner.prop_map(|a| Formula::Some {
                var: "y".into(),
                body: Box::new(a)
            }),
        ]
    })
}

proptest! {
    #[test]
    fn dual_is_an_involution(f in formula()) {
        prop_assert_eq!(f.dual().dual(), f.clone());
        prop_assert_eq!(f.dual().polarity(), f.polarity().flip());
    }

    #[test]
    fn printed_formulas_parse_back(f in formula()) {
        let text = f.to_string();
        let g = parse_formula(&text, &domains()).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn skeletons_are_valid(f in formula(), t in prop::sample::select(vec![AtomTreatment::Fact, AtomTreatment::Daimon, AtomTreatment::Open])) {
        for g in [f.clone(), f.dual()] {
            let d = skeletonize("S", &g, &xi(), &AtomPolicy::uniform(t), Numbering::Compact, &domains()).unwrap();
            prop_assert!(validate_design(&d, Library::empty()).is_ok(), "{}", g);
        }
    }
}
