use proptest::prelude::*;

use super::*;

fn w(s: &str) -> GroupElement {
    GroupElement::word(s).unwrap()
}

fn z2() -> GroupSpec {
    GroupSpec::free_abelian(2).unwrap()
}

fn f2() -> GroupSpec {
    GroupSpec::free(2).unwrap()
}

#[test]
fn multiply_examples() {
    let p = multiply(&z2(), &GroupElement::vector(&[1, 2]), &GroupElement::vector(&[3, -1])).unwrap();
    assert_eq!(p, GroupElement::vector(&[4, 1]));

    let h = GroupSpec::heisenberg();
    let p = multiply(
        &h,
        &GroupElement::heisenberg(1, 0, 0),
        &GroupElement::heisenberg(0, 1, 0),
    )
    .unwrap();
    assert_eq!(p, GroupElement::heisenberg(1, 1, 1));

    let p = multiply(&f2(), &w("aB"), &w("ba")).unwrap();
    assert_eq!(p, w("aa"));
}

#[test]
fn multiply_rejects_foreign_elements() {
    assert!(matches!(
        multiply(&z2(), &GroupElement::vector(&[1]), &GroupElement::vector(&[1, 0])),
        Err(Error::KindMismatch { .. })
    ));
    assert!(multiply(&f2(), &w("c"), &w("a")).is_err());
    // Unreduced words are not canonical.
    assert!(multiply(&f2(), &w("aA"), &w("a")).is_err());
}

#[test]
fn inverse_examples() {
    let z = GroupSpec::integers();
    assert_eq!(
        inverse(&z, &GroupElement::vector(&[5])).unwrap(),
        GroupElement::vector(&[-5])
    );
    let h = GroupSpec::heisenberg();
    assert_eq!(
        inverse(&h, &GroupElement::heisenberg(1, 1, 1)).unwrap(),
        GroupElement::heisenberg(-1, -1, 0)
    );
    assert_eq!(inverse(&f2(), &w("ab")).unwrap(), w("BA"));
    let c = GroupSpec::cyclic(7).unwrap();
    assert_eq!(
        inverse(&c, &GroupElement::Residue(3)).unwrap(),
        GroupElement::Residue(4)
    );
}

#[test]
fn word_length_examples() {
    assert_eq!(word_length(&z2(), &GroupElement::vector(&[3, -2]), None).unwrap(), 5);
    assert_eq!(word_length(&f2(), &w("abab"), None).unwrap(), 4);
    let c = GroupSpec::cyclic(12).unwrap();
    assert_eq!(word_length(&c, &GroupElement::Residue(9), None).unwrap(), 3);

    let h = GroupSpec::heisenberg();
    let z = GroupElement::heisenberg(0, 0, 1);
    assert!(matches!(word_length(&h, &z, None), Err(Error::IndexRequired { .. })));
    let ix = enumerate_balls(&h, 4).unwrap();
    assert_eq!(word_length(&h, &z, Some(&ix)).unwrap(), 4);
    let small = enumerate_balls(&h, 3).unwrap();
    assert!(matches!(
        word_length(&h, &z, Some(&small)),
        Err(Error::OutsideIndex { radius: 3, .. })
    ));
}

#[test]
fn heisenberg_commutator_is_central_generator() {
    let h = GroupSpec::heisenberg();
    let x = GroupElement::heisenberg(1, 0, 0);
    let y = GroupElement::heisenberg(0, 1, 0);
    let c = [x.clone(), y.clone(), h.inv(&x), h.inv(&y)]
        .iter()
        .fold(h.identity(), |acc, g| h.mul(&acc, g));
    assert_eq!(c, GroupElement::heisenberg(0, 0, 1));
}

#[test]
fn enumerate_ball_examples() {
    let z = GroupSpec::integers();
    assert_eq!(enumerate_balls(&z, 4).unwrap().ball_sizes(), vec![1, 3, 5, 7, 9]);
    assert_eq!(enumerate_balls(&z2(), 3).unwrap().ball_sizes(), vec![1, 5, 13, 25]);
    let h = enumerate_balls(&GroupSpec::heisenberg(), 2).unwrap();
    assert_eq!(h.ball_sizes(), vec![1, 5, 17]);
    assert_eq!(enumerate_balls(&f2(), 3).unwrap().ball_sizes(), vec![1, 5, 17, 53]);
}

#[test]
fn heisenberg_ball_sizes_match_independent_bfs() {
    // Frozen from an independent BFS over the normal-form product rule.
    let ix = enumerate_balls(&GroupSpec::heisenberg(), 10).unwrap();
    assert_eq!(
        ix.ball_sizes(),
        vec![1, 5, 17, 53, 135, 299, 593, 1069, 1793, 2845, 4309]
    );
}

#[test]
fn cyclic_balls_saturate() {
    let c = GroupSpec::cyclic(5).unwrap();
    assert_eq!(enumerate_balls(&c, 6).unwrap().ball_sizes(), vec![1, 3, 5, 5, 5, 5, 5]);
    let c12 = GroupSpec::cyclic(12).unwrap();
    let ix = enumerate_balls(&c12, 8).unwrap();
    assert_eq!(*ix.ball_sizes().last().unwrap(), 12);
    assert_eq!(ix.sphere_sizes()[6], 1);
    let trivial = GroupSpec::cyclic(1).unwrap();
    assert!(trivial.generators().is_empty());
    assert_eq!(enumerate_balls(&trivial, 3).unwrap().ball_sizes(), vec![1, 1, 1, 1]);
}

#[test]
fn budget_exceeded_reports_radius() {
    match enumerate_balls_with_budget(&f2(), 10, 100) {
        Err(Error::BudgetExceeded {
            limit: 100, reached, ..
        }) => assert_eq!(reached, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn closed_form_spheres_match_bfs() {
    for (spec, n) in [
        (GroupSpec::integers(), 10),
        (z2(), 10),
        (GroupSpec::free_abelian(3).unwrap(), 6),
        (f2(), 6),
        (GroupSpec::free(3).unwrap(), 4),
        (GroupSpec::cyclic(12).unwrap(), 10),
        (GroupSpec::cyclic(5).unwrap(), 10),
        ("Z^1xF2".parse().unwrap(), 5),
        ("C3xZ^2".parse().unwrap(), 6),
    ] {
        let ix = enumerate_balls(&spec, n).unwrap();
        let bfs: Vec<u128> = ix.sphere_sizes().into_iter().map(u128::from).collect();
        assert_eq!(sphere_sizes(&spec, n, None).unwrap(), bfs, "{spec}");
    }
    let h = GroupSpec::heisenberg();
    assert!(sphere_sizes(&h, 3, None).is_err());
    let ix = enumerate_balls(&h, 3).unwrap();
    assert_eq!(ball_sizes(&h, 3, Some(&ix)).unwrap(), vec![1, 5, 17, 53]);
}

#[test]
fn descriptors_round_trip() {
    for d in ["Z^2", "H3", "F2", "C12", "Z^1xF2", "Z^3"] {
        let spec: GroupSpec = d.parse().unwrap();
        assert_eq!(spec.descriptor(), d);
    }
    assert_eq!("Z".parse::<GroupSpec>().unwrap().descriptor(), "Z^1");
    for bad in ["", "Q", "F0", "C0", "Z^0", "F27", "Z^x"] {
        assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
    }
}

#[test]
fn amenability_flag() {
    for (d, amenable) in [
        ("Z^2", true),
        ("H3", true),
        ("F1", true),
        ("F2", false),
        ("C12", true),
        ("Z^1xF2", false),
        ("C3xH3", true),
    ] {
        assert_eq!(d.parse::<GroupSpec>().unwrap().is_amenable(), amenable, "{d}");
    }
}

#[test]
fn keys_round_trip() {
    let spec: GroupSpec = "Z^1xF2".parse().unwrap();
    let g = GroupElement::Tuple(vec![GroupElement::vector(&[-3]), w("aB")]);
    assert_eq!(spec.key(&g), "-3;aB");
    assert_eq!(spec.parse_key("-3;aB").unwrap(), g);
    assert_eq!(z2().key(&GroupElement::vector(&[3, -2])), "3,-2");
    let h = GroupSpec::heisenberg();
    assert_eq!(h.parse_key("1,-2,5").unwrap(), GroupElement::heisenberg(1, -2, 5));
    assert_eq!(f2().parse_key("").unwrap(), f2().identity());
    assert!(f2().parse_key("aA").is_err());
    assert!(GroupSpec::cyclic(5).unwrap().parse_key("5").is_err());
}

#[test]
fn custom_generating_sets() {
    let kind = GroupKind::FreeAbelian { rank: 1 };
    let gens = vec![
        GroupElement::vector(&[1]),
        GroupElement::vector(&[-1]),
        GroupElement::vector(&[2]),
        GroupElement::vector(&[-2]),
    ];
    let spec = GroupSpec::with_generators(kind.clone(), gens).unwrap();
    assert!(!spec.is_standard());
    let ix = enumerate_balls(&spec, 2).unwrap();
    assert_eq!(ix.ball_sizes(), vec![1, 5, 9]);
    // Closed forms are only valid for standard generators.
    assert!(word_length(&spec, &GroupElement::vector(&[4]), None).is_err());
    assert_eq!(word_length(&spec, &GroupElement::vector(&[4]), Some(&ix)).unwrap(), 2);

    let asym = GroupSpec::with_generators(kind, vec![GroupElement::vector(&[1])]);
    assert!(matches!(asym, Err(Error::InvalidParameter(_))));
}

#[test]
fn embedding_examples() {
    let z = GroupSpec::integers();
    let e = Embedding::new(
        z.clone(),
        z2(),
        &[(GroupElement::vector(&[1]), GroupElement::vector(&[1, 0]))],
    )
    .unwrap();
    assert_eq!(
        e.push(&GroupElement::vector(&[7])).unwrap(),
        GroupElement::vector(&[7, 0])
    );
    assert_eq!(e.ambient_length(&GroupElement::vector(&[7]), None).unwrap(), 7);

    let e = Embedding::new(z.clone(), f2(), &[(GroupElement::vector(&[1]), w("a"))]).unwrap();
    assert_eq!(e.push(&GroupElement::vector(&[-3])).unwrap(), w("AAA"));
    assert_eq!(e.ambient_length(&GroupElement::vector(&[-3]), None).unwrap(), 3);

    let e = Embedding::new(
        z.clone(),
        z2(),
        &[(GroupElement::vector(&[1]), GroupElement::vector(&[1, 1]))],
    )
    .unwrap();
    assert_eq!(e.ambient_length(&GroupElement::vector(&[4]), None).unwrap(), 8);

    // Images given through the inverse generator.
    let e = Embedding::new(z, f2(), &[(GroupElement::vector(&[-1]), w("b"))]).unwrap();
    assert_eq!(e.push(&GroupElement::vector(&[2])).unwrap(), w("BB"));
}

#[test]
fn embedding_rejects_non_homomorphisms() {
    // Z^2 → F2 with commuting generators sent to free letters.
    let r = Embedding::new(
        z2(),
        f2(),
        &[
            (GroupElement::vector(&[1, 0]), w("a")),
            (GroupElement::vector(&[0, 1]), w("b")),
        ],
    );
    assert!(matches!(r, Err(Error::Homomorphism(_))));
    // Non-injective: both generators of Z^2 to the same element.
    let r = Embedding::new(
        z2(),
        z2(),
        &[
            (GroupElement::vector(&[1, 0]), GroupElement::vector(&[1, 0])),
            (GroupElement::vector(&[0, 1]), GroupElement::vector(&[1, 0])),
        ],
    );
    assert!(matches!(r, Err(Error::Homomorphism(_))));
    // C5 → Z is not a homomorphism onto anything nontrivial.
    let r = Embedding::new(
        GroupSpec::cyclic(5).unwrap(),
        GroupSpec::integers(),
        &[(GroupElement::Residue(1), GroupElement::vector(&[1]))],
    );
    assert!(r.is_err());
    // Missing image.
    assert!(Embedding::new(
        z2(),
        z2(),
        &[(GroupElement::vector(&[1, 0]), GroupElement::vector(&[1, 0]))]
    )
    .is_err());
}

#[test]
fn heisenberg_embeds_in_itself_via_power_map() {
    // x ↦ x², y ↦ y gives an injective endomorphism of H3.
    let h = GroupSpec::heisenberg();
    let e = Embedding::new(
        h.clone(),
        h.clone(),
        &[
            (GroupElement::heisenberg(1, 0, 0), GroupElement::heisenberg(2, 0, 0)),
            (GroupElement::heisenberg(0, 1, 0), GroupElement::heisenberg(0, 1, 0)),
        ],
    )
    .unwrap();
    assert_eq!(
        e.push(&GroupElement::heisenberg(0, 0, 1)).unwrap(),
        GroupElement::heisenberg(0, 0, 2)
    );
}

#[test]
fn trivial_subgroup_embeds() {
    let e = Embedding::new(GroupSpec::cyclic(1).unwrap(), z2(), &[]).unwrap();
    assert_eq!(e.push(&GroupElement::Residue(0)).unwrap(), z2().identity());
}

fn all_specs() -> Vec<(GroupSpec, u32)> {
    vec![
        (GroupSpec::integers(), 8),
        (z2(), 8),
        (GroupSpec::heisenberg(), 6),
        (f2(), 5),
        (GroupSpec::cyclic(12).unwrap(), 8),
        ("Z^1xF2".parse().unwrap(), 4),
    ]
}

#[test]
fn products_match_bfs_representatives() {
    // g, h in B_n: gh must be canonical and found in B_{2n} at length <= |g|+|h|.
    for (spec, n) in all_specs() {
        let half = n / 2;
        let ix = enumerate_balls(&spec, n).unwrap();
        let ball: Vec<_> = ix.ball(half).cloned().collect();
        for g in &ball {
            for h in &ball {
                let gh = multiply(&spec, g, h).unwrap();
                assert_eq!(spec.canonicalize(&gh).unwrap(), gh);
                let l = ix.length(&gh).expect("product inside B_2n");
                assert!(l <= ix.length(g).unwrap() + ix.length(h).unwrap());
            }
            assert_eq!(spec.mul(g, &spec.inv(g)), spec.identity());
            assert_eq!(ix.length(g), ix.length(&spec.inv(g)));
        }
    }
}

#[test]
fn closed_form_lengths_match_bfs() {
    for (spec, n) in [
        (GroupSpec::integers(), 10),
        (z2(), 10),
        (f2(), 7),
        (GroupSpec::cyclic(12).unwrap(), 10),
        ("Z^1xF2".parse().unwrap(), 5),
    ] {
        let ix = enumerate_balls(&spec, n).unwrap();
        for k in 0..=n {
            for g in ix.sphere(k) {
                assert_eq!(word_length(&spec, g, None).unwrap(), k, "{spec} {}", spec.key(g));
            }
        }
    }
}

#[test]
fn sphere_length_multisets_are_symmetric() {
    for (spec, n) in all_specs() {
        let ix = enumerate_balls(&spec, n).unwrap();
        for k in 0..=n {
            let mut inv: Vec<_> = ix.sphere(k).iter().map(|g| spec.inv(g)).collect();
            inv.sort();
            assert_eq!(inv, ix.sphere(k));
        }
        let b = ix.ball_sizes();
        if !spec.is_finite() {
            assert!(b.windows(2).all(|p| p[0] < p[1]), "{spec}");
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    for (spec, n) in all_specs() {
        let a = enumerate_balls(&spec, n).unwrap();
        let b = enumerate_balls(&spec, n).unwrap();
        assert_eq!(cache::serialize(&a), cache::serialize(&b));
    }
}

#[test]
fn cache_roundtrip_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("z2.ballcache");
    assert!(cache::roundtrip(&z2(), 10, &p).unwrap());
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("rdlab-ball-cache v1 | Z^2 | N=10\n"));
    assert_eq!(text.lines().count(), 1 + 221);
    assert_eq!(text.lines().nth(1), Some("0,0\t0"));

    let p = dir.path().join("f2.ballcache");
    assert!(cache::roundtrip(&f2(), 0, &p).unwrap());
    assert_eq!(
        std::fs::read_to_string(&p).unwrap(),
        "rdlab-ball-cache v1 | F2 | N=0\n\t0\n"
    );
}

#[test]
fn corrupted_cache_fails_digest_check() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f2.ballcache");
    cache::write(&enumerate_balls(&f2(), 3).unwrap(), &p).unwrap();
    assert!(cache::check(&f2(), &p).unwrap());
    let mut bytes = std::fs::read(&p).unwrap();
    let i = bytes.len() - 3;
    bytes[i] ^= 0x01;
    std::fs::write(&p, bytes).unwrap();
    assert!(matches!(cache::check(&f2(), &p), Err(Error::DigestMismatch { .. })));
}

#[test]
fn cache_parse_rejects_malformed_input() {
    let spec = GroupSpec::integers();
    assert!(cache::parse(&spec, "").is_err());
    assert!(cache::parse(&spec, "rdlab-ball-cache v1 | Z^2 | N=0\n0,0\t0\n").is_err());
    assert!(cache::parse(&spec, "rdlab-ball-cache v1 | Z^1 | N=1\n0\t0\n1\t1\n-1\t1\n").is_err());
    assert!(cache::parse(&spec, "rdlab-ball-cache v1 | Z^1 | N=1\n0\t0\n-1\t1\n1\t1\n").is_ok());
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(letters in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1), Just(2), Just(-2)], 0..20)) {
        let spec = f2();
        let g = spec.canonicalize(&GroupElement::Word(letters)).unwrap();
        prop_assert_eq!(spec.canonicalize(&g).unwrap(), g.clone());
        spec.check(&g).unwrap();
        prop_assert_eq!(spec.mul(&g, &spec.inv(&g)), spec.identity());
    }

    #[test]
    fn heisenberg_is_associative(v in proptest::collection::vec(-20i64..20, 9)) {
        let h = GroupSpec::heisenberg();
        let a = GroupElement::heisenberg(v[0], v[1], v[2]);
        let b = GroupElement::heisenberg(v[3], v[4], v[5]);
        let c = GroupElement::heisenberg(v[6], v[7], v[8]);
        prop_assert_eq!(h.mul(&h.mul(&a, &b), &c), h.mul(&a, &h.mul(&b, &c)));
        prop_assert_eq!(h.mul(&a, &h.inv(&a)), h.identity());
        prop_assert_eq!(h.mul(&h.inv(&a), &a), h.identity());
    }

    #[test]
    fn power_agrees_with_repeated_product(a in -5i64..5, b in -5i64..5, c in -5i64..5, n in -12i64..12) {
        let h = GroupSpec::heisenberg();
        let g = GroupElement::heisenberg(a, b, c);
        let step = if n < 0 { h.inv(&g) } else { g.clone() };
        let naive = (0..n.abs()).fold(h.identity(), |acc, _| h.mul(&acc, &step));
        prop_assert_eq!(power(&h, &g, n), naive);
    }
}
