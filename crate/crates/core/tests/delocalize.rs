use ludics::delocalize::{
    approximates, check_fax_theorem, expand, fax, substitute_prefix, DelocError, FaxSpec, Universe,
};
use ludics::enumerate::{random_design, Bounds};
use ludics::scenarios;
use ludics::{
    design_equal, make_net, normalize, parse_source, Design, Fork, Library, Locus, Node, Verdict,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn loc(p: &[u32]) -> Locus {
    Locus::new(p.to_vec())
}

#[test]
fn worked_example_is_moved() {
    let f = parse_source(scenarios::DELOCALIZATION).unwrap();
    let d = f.design("D").unwrap();
    let check = check_fax_theorem(d, &loc(&[1]), 1000, &f.library).unwrap();
    assert!(check.holds, "{:?}", check.diagnostic);
    assert_eq!(
        ludics::serialize_design(&check.expected),
        "design D : |- 1 = (+ 1 {1,2} (- 1.1 { {1} => dai }) (- 1.2 { {} => dai {3} => (+ 1.2.3 {}) }))"
    );
}

#[test]
fn copy_cat_against_a_negative_design() {
    // A negative design on 0 |- cut against the copy-cat's tine.
    let src = "design N : 1 |- = (- 1 { {1} => (+ 1.1 {2} (- 1.1.2 {})) })";
    let f = parse_source(src).unwrap();
    let n = f.design("N").unwrap().clone();
    let copier = fax(&FaxSpec {
        from: loc(&[0]),
        to: loc(&[1]),
        depth_hint: 0,
    })
    .unwrap();
    let net = make_net(
        vec![copier, n],
        [loc(&[1])].into_iter().collect(),
        &f.library,
    )
    .unwrap();
    let t = normalize(&net, 100).unwrap();
    let Verdict::Converged { residual } = t.verdict else {
        panic!("{}", t.to_text());
    };
    assert_eq!(residual.base, Fork::negative(loc(&[0]), []));
    // Only the entry N answers survives, now at 0.
    match &residual.root {
        Node::Negative { focus, directory } => {
            assert_eq!(focus, &loc(&[0]));
            assert_eq!(directory.len(), 1);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn substitution_errors() {
    let f = parse_source(scenarios::DELOCALIZATION).unwrap();
    let d = f.design("D").unwrap();
    assert!(matches!(
        substitute_prefix(d, &loc(&[5]), &loc(&[1])),
        Err(DelocError::NotUnder { .. })
    ));
    let two = parse_source("design T : |- 0, 1 = (+ 0 {})").unwrap();
    assert!(matches!(
        substitute_prefix(two.design("T").unwrap(), &loc(&[0]), &loc(&[1, 4])),
        Err(DelocError::Clash { .. })
    ));
    assert!(matches!(
        fax(&FaxSpec {
            from: loc(&[0]),
            to: loc(&[0, 1]),
            depth_hint: 0
        }),
        Err(DelocError::FaxOverlap(..))
    ));
}

#[test]
fn expansion_unfolds_references() {
    let f = parse_source(scenarios::AME).unwrap();
    let ame = f.design("AME").unwrap();
    let e0 = expand(ame, 0, Universe::default(), &f.library);
    assert!(!e0.root.contains_lazy());
    assert!(ludics::syntax::serialize_node(&e0.root).contains("hole 0.1.1"));
    let e2 = expand(ame, 2, Universe::default(), &f.library);
    assert_eq!(e2.root.height(), 6);
    assert!(approximates(&e0.root, &e2.root));
    assert!(!approximates(&e2.root, &e0.root));
    let fx = fax(&FaxSpec {
        from: loc(&[0]),
        to: loc(&[1]),
        depth_hint: 0,
    })
    .unwrap();
    let x1 = expand(
        &fx,
        1,
        Universe {
            max_bias: 2,
            max_size: 1,
        },
        Library::empty(),
    );
    match &x1.root {
        Node::Negative { directory, .. } => assert_eq!(directory.len(), 3),
        other => panic!("{other:?}"),
    }
}

fn sample(seed: u64) -> Design {
    let mut rng = StdRng::seed_from_u64(seed);
    random_design(&Fork::positive([loc(&[0])]), Bounds::new(3, 3, 2), &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fax_moves_random_designs(seed in any::<u64>(), target in 1u32..5) {
        let d = sample(seed);
        let check = check_fax_theorem(&d, &loc(&[target]), 10_000, Library::empty()).unwrap();
        prop_assert!(check.holds, "{:?}", check.diagnostic);
    }

    #[test]
    fn substitution_round_trips(seed in any::<u64>(), target in prop::collection::vec(0u32..4, 1..4)) {
        let d = sample(seed);
        let rho = Locus::new(target);
        prop_assume!(!rho.comparable(&loc(&[0])));
        let there = substitute_prefix(&d, &loc(&[0]), &rho).unwrap();
        let back = substitute_prefix(&there, &rho, &loc(&[0])).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert!(ludics::validate_design(&there, Library::empty()).is_ok());
    }

    #[test]
    fn expansion_is_monotone(depth in 0usize..4) {
        let f = parse_source(scenarios::AME).unwrap();
        for name in ["AME", "TWICE", "WHY"] {
            let d = f.design(name).unwrap();
            let a = expand(d, depth, Universe::default(), &f.library);
            let b = expand(d, depth + 1, Universe::default(), &f.library);
            prop_assert!(approximates(&a.root, &b.root), "{}", name);
        }
    }

    #[test]
    fn finite_designs_are_left_alone_by_expansion(seed in any::<u64>(), depth in 0usize..3) {
        let d = sample(seed);
        let e = expand(&d, depth, Universe::default(), Library::empty());
        prop_assert!(design_equal(&d, &e, 0, Library::empty()));
    }
}
