use std::collections::{BTreeMap, BTreeSet};

use ludics::behaviour::{
    builtin, dual_pool, in_behaviour, odot, orthogonal_set, tensor_generators, BehaviourHandle,
};
use ludics::enumerate::{enumerate_designs, random_design, Bounds};
use ludics::syntax::serialize_node;
use ludics::{
    design_equal, orthogonal, parse_source, validate_design, Design, Fork, Library, Locus, Node,
    Orthogonality, Ramification,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn xi() -> Locus {
    Locus::new(vec![0])
}

fn lib() -> &'static Library {
    Library::empty()
}

/// A positive design on `⊢ <>` opening `ram`, with random premises.
fn rooted(name: &str, ram: &[u32], rng: &mut StdRng) -> Design {
    let premises: BTreeMap<u32, Node> = ram
        .iter()
        .map(|&i| {
            let d = random_design(
                &Fork::negative(Locus::new(vec![i]), []),
                Bounds::new(2, 2, 2),
                rng,
            );
            (i, d.root)
        })
        .collect();
    Design::new(
        name,
        Fork::positive([Locus::root()]),
        Node::Positive {
            focus: Locus::root(),
            ramification: ram.iter().copied().collect(),
            premises,
        },
    )
}

fn dai_root(name: &str) -> Design {
    Design::new(name, Fork::positive([Locus::root()]), Node::Daimon)
}

#[test]
fn elementary_orthogonality() {
    let dpos = builtin("daimon-pos", &xi()).unwrap();
    let dneg = builtin("daimon-neg", &xi()).unwrap();
    let sconse = builtin("sconse", &xi()).unwrap();
    let bomb = builtin("bomb-pos", &xi()).unwrap();
    assert_eq!(
        orthogonal(&bomb, &dneg, lib(), 10).unwrap(),
        Orthogonality::Yes
    );
    assert_eq!(
        orthogonal(&sconse, &dpos, lib(), 10).unwrap(),
        Orthogonality::Yes
    );
    assert_eq!(
        orthogonal(&sconse, &bomb, lib(), 10).unwrap(),
        Orthogonality::No
    );
    for d in [&dpos, &dneg, &sconse, &bomb] {
        assert!(validate_design(d, lib()).is_ok());
    }
}

#[test]
fn daimon_is_orthogonal_to_every_pool() {
    let dpos = builtin("daimon-pos", &xi()).unwrap();
    let pool = dual_pool(&dpos.base, 2, 2).unwrap();
    assert_eq!(pool.len(), 720);
    let set = orthogonal_set(&dpos, &pool, lib(), 100).unwrap();
    assert_eq!(set.members.len(), pool.len());
    assert!(set.unknown.is_empty());
}

#[test]
fn orthogonal_of_sconse_and_bomb() {
    let sconse = builtin("sconse", &xi()).unwrap();
    let pos = enumerate_designs(&Fork::positive([xi()]), Bounds::new(2, 2, 2))
        .unwrap()
        .to_vec();
    let set = orthogonal_set(&sconse, &pos, lib(), 100).unwrap();
    assert_eq!(set.members.len(), 1);
    assert_eq!(set.members[0].root, Node::Daimon);

    let bomb = builtin("bomb-pos", &xi()).unwrap();
    let neg = enumerate_designs(&Fork::negative(xi(), []), Bounds::new(2, 2, 2))
        .unwrap()
        .to_vec();
    let set = orthogonal_set(&bomb, &neg, lib(), 100).unwrap();
    let answers_empty_with_daimon = |d: &Design| match &d.root {
        Node::Negative { directory, .. } => {
            directory.get(&Ramification::empty()) == Some(&Node::Daimon)
        }
        _ => false,
    };
    assert!(!set.members.is_empty());
    assert!(set.members.iter().all(answers_empty_with_daimon));
    let expected = neg.iter().filter(|d| answers_empty_with_daimon(d)).count();
    assert_eq!(set.members.len(), expected);
    // The figure's negative daimon is among them.
    let dneg = builtin("daimon-neg", &xi()).unwrap();
    assert!(set.members.iter().any(|d| d.root == dneg.root));
}

#[test]
fn membership() {
    let bomb = builtin("bomb-pos", &xi()).unwrap();
    let dpos = builtin("daimon-pos", &xi()).unwrap();
    let pool = dual_pool(&bomb.base, 2, 2).unwrap();
    let h = BehaviourHandle::new(vec![bomb.clone()], pool, 100).unwrap();
    let m = in_behaviour(&bomb, &h, lib()).unwrap();
    assert_eq!(m.verdict, Orthogonality::Yes);
    assert!(m.pool_relative);
    assert_eq!(
        in_behaviour(&dpos, &h, lib()).unwrap().verdict,
        Orthogonality::Yes
    );
    let impostor = parse_source("design I : |- 0 = (+ 0 {0} (- 0.0 {}))").unwrap();
    let m = in_behaviour(impostor.design("I").unwrap(), &h, lib()).unwrap();
    assert_eq!(m.verdict, Orthogonality::No);
    assert!(m.witness.is_some());
    assert!(BehaviourHandle::new(vec![], vec![], 1).is_err());
    assert!(
        BehaviourHandle::new(vec![bomb, builtin("sconse", &xi()).unwrap()], vec![], 1).is_err()
    );
}

#[test]
fn odot_clauses() {
    let mut rng = StdRng::seed_from_u64(7);
    let u = rooted("U", &[1], &mut rng);
    let b = rooted("B", &[2], &mut rng);
    let clash = rooted("C", &[1, 3], &mut rng);
    assert_eq!(odot(&dai_root("D"), &b).unwrap().root, Node::Daimon);
    assert_eq!(odot(&u, &dai_root("D")).unwrap().root, Node::Daimon);
    assert_eq!(odot(&u, &clash).unwrap().root, Node::Daimon);
    let ub = odot(&u, &b).unwrap();
    assert!(validate_design(&ub, lib()).is_ok());
    match (&ub.root, &u.root, &b.root) {
        (
            Node::Positive {
                focus,
                ramification,
                premises,
            },
            Node::Positive { premises: pu, .. },
            Node::Positive { premises: pb, .. },
        ) => {
            assert!(focus.is_empty());
            assert_eq!(ramification, &Ramification::from([1, 2]));
            assert_eq!(premises.get(&1), pu.get(&1));
            assert_eq!(premises.get(&2), pb.get(&2));
        }
        other => panic!("{other:?}"),
    }
    let off_root = builtin("bomb-pos", &xi()).unwrap();
    assert!(odot(&off_root, &u).is_err());
}

#[test]
fn tensor_of_generator_sets() {
    let mut rng = StdRng::seed_from_u64(11);
    let f = BehaviourHandle::new(
        vec![
            rooted("A1", &[1], &mut rng),
            rooted("A2", &[1, 2], &mut rng),
        ],
        vec![],
        10,
    )
    .unwrap();
    let g = BehaviourHandle::new(vec![rooted("B1", &[3], &mut rng)], vec![], 10).unwrap();
    let fg = tensor_generators(&f, &g).unwrap();
    assert!(fg.approximate);
    let roots: BTreeSet<String> = fg
        .generators
        .iter()
        .map(|d| serialize_node(&d.root))
        .collect();
    let gf: BTreeSet<String> = tensor_generators(&g, &f)
        .unwrap()
        .generators
        .iter()
        .map(|d| serialize_node(&d.root))
        .collect();
    assert_eq!(roots, gf);
    assert!(roots.iter().any(|r| r.starts_with("(+ <> {1,3}")));
    assert!(roots.iter().any(|r| r.starts_with("(+ <> {1,2,3}")));

    let dai = BehaviourHandle::new(vec![dai_root("D")], vec![], 10).unwrap();
    let dg = tensor_generators(&dai, &g).unwrap();
    assert_eq!(dg.generators.len(), 1);
    assert_eq!(dg.generators[0].root, Node::Daimon);
}

/// Three random designs on `⊢ <>` with pairwise disjoint first ramifications.
fn disjoint_triple(seed: u64) -> (Design, Design, Design) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut biases: Vec<u32> = (0..7).collect();
    biases.shuffle(&mut rng);
    let mut parts: [Vec<u32>; 3] = Default::default();
    for b in biases {
        let k = rng.gen_range(0..4);
        if k < 3 && parts[k].len() < 2 {
            parts[k].push(b);
        }
    }
    let make = |name: &str, part: &[u32], rng: &mut StdRng| {
        if rng.gen_ratio(1, 8) {
            dai_root(name)
        } else {
            rooted(name, part, rng)
        }
    };
    (
        make("A", &parts[0], &mut rng),
        make("B", &parts[1], &mut rng),
        make("C", &parts[2], &mut rng),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn odot_commutes(seed in any::<u64>()) {
        let (a, b, _) = disjoint_triple(seed);
        let ab = odot(&a, &b).unwrap();
        let ba = odot(&b, &a).unwrap();
        prop_assert!(design_equal(&ab, &ba, 0, lib()));
        prop_assert!(validate_design(&ab, lib()).is_ok());
    }

    #[test]
    fn odot_associates(seed in any::<u64>()) {
        let (a, b, c) = disjoint_triple(seed);
        let left = odot(&odot(&a, &b).unwrap(), &c).unwrap();
        let right = odot(&a, &odot(&b, &c).unwrap()).unwrap();
        prop_assert!(design_equal(&left, &right, 0, lib()));
    }

    #[test]
    fn daimon_absorbs(seed in any::<u64>()) {
        let (a, _, _) = disjoint_triple(seed);
        prop_assert_eq!(odot(&a, &dai_root("D")).unwrap().root, Node::Daimon);
        prop_assert_eq!(odot(&dai_root("D"), &a).unwrap().root, Node::Daimon);
    }

    /// Enlarging the pool never turns a "no" for a generator into a "yes".
    #[test]
    fn generators_stay_members_as_pools_grow(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_design(&Fork::positive([xi()]), Bounds::new(2, 2, 2), &mut rng);
        let small = dual_pool(&g.base, 1, 2).unwrap();
        let large = dual_pool(&g.base, 2, 2).unwrap();
        for pool in [small, large] {
            let h = BehaviourHandle::new(vec![g.clone()], pool, 100).unwrap();
            prop_assert_eq!(in_behaviour(&g, &h, lib()).unwrap().verdict, Orthogonality::Yes);
        }
    }
}
