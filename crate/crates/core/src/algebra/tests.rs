use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::groups::enumerate_balls;

fn v(x: &[i64]) -> GroupElement {
    GroupElement::vector(x)
}

fn ball(spec: &GroupSpec, n: u32, ix: &LengthIndex) -> AlgebraElement {
    AlgebraElement::characteristic(spec, &Shape::Ball(n), ix).unwrap()
}

fn sphere(spec: &GroupSpec, n: u32, ix: &LengthIndex) -> AlgebraElement {
    AlgebraElement::characteristic(spec, &Shape::Sphere(n), ix).unwrap()
}

/// Naive convolution straight from the definition, evaluated on every
/// element of `B_{ra+rb}`.
fn brute_convolve(a: &AlgebraElement, b: &AlgebraElement, ix: &LengthIndex) -> BTreeMap<GroupElement, f64> {
    let spec = a.spec();
    let mut out = BTreeMap::new();
    for h in ix.ball(a.support_radius() + b.support_radius()) {
        let mut s = 0.0;
        for (g, ag) in a.iter() {
            s += ag * b.coeff(&spec.mul(&spec.inv(g), h));
        }
        if s != 0.0 {
            out.insert(h.clone(), s);
        }
    }
    out
}

#[test]
fn characteristic_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 4).unwrap();
    let b1 = ball(&z, 1, &ix);
    assert_eq!(
        b1.coeffs().keys().cloned().collect::<Vec<_>>(),
        vec![v(&[-1]), v(&[0]), v(&[1])]
    );
    assert_eq!(b1.support_radius(), 1);

    let f2 = GroupSpec::free(2).unwrap();
    let fx = enumerate_balls(&f2, 2).unwrap();
    let s2 = sphere(&f2, 2, &fx);
    assert_eq!(s2.len(), 12);
    assert!(s2.iter().all(|(_, c)| c == 1.0));

    let e = AlgebraElement::characteristic(&f2, &Shape::Point(f2.identity()), &fx).unwrap();
    assert_eq!(e.convolve(&s2).unwrap(), s2);
    assert_eq!(s2.convolve(&e).unwrap(), s2);

    assert!(matches!(
        AlgebraElement::characteristic(&z, &Shape::Ball(5), &ix),
        Err(Error::IndexTooSmall {
            needed: 5,
            available: 4
        })
    ));
}

#[test]
fn convolution_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 4).unwrap();
    let b1 = ball(&z, 1, &ix);
    let p = b1.convolve(&b1).unwrap();
    let got: Vec<(i64, f64)> = p
        .iter()
        .map(|(g, c)| match g {
            GroupElement::Vector(x) => (x[0], c),
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(got, vec![(-2, 1.0), (-1, 2.0), (0, 3.0), (1, 2.0), (2, 1.0)]);
    assert_eq!(p.support_radius(), 2);

    let f2 = GroupSpec::free(2).unwrap();
    let fx = enumerate_balls(&f2, 2).unwrap();
    let s1 = sphere(&f2, 1, &fx);
    let expected = linear_combine(&[
        (1.0, &sphere(&f2, 2, &fx)),
        (4.0, &AlgebraElement::delta(&f2, f2.identity(), None).unwrap()),
    ])
    .unwrap();
    assert_eq!(s1.convolve(&s1).unwrap(), expected);

    let h = GroupSpec::heisenberg();
    let hx = enumerate_balls(&h, 4).unwrap();
    let g = GroupElement::heisenberg(1, 0, 0);
    let k = GroupElement::heisenberg(0, 1, 0);
    let dg = AlgebraElement::delta(&h, g.clone(), Some(&hx)).unwrap();
    let dk = AlgebraElement::delta(&h, k.clone(), Some(&hx)).unwrap();
    let p = dg.convolve(&dk).unwrap();
    assert_eq!(
        p.coeffs().keys().collect::<Vec<_>>(),
        vec![&GroupElement::heisenberg(1, 1, 1)]
    );
}

#[test]
fn convolution_matches_brute_force() {
    for (spec, n, m) in [
        (GroupSpec::free_abelian(2).unwrap(), 2, 3),
        (GroupSpec::heisenberg(), 2, 2),
        (GroupSpec::free(2).unwrap(), 2, 2),
        (GroupSpec::cyclic(7).unwrap(), 2, 3),
    ] {
        let ix = enumerate_balls(&spec, n + m).unwrap();
        let a = ball(&spec, n, &ix);
        let b = sphere(&spec, m, &ix);
        assert_eq!(a.convolve(&b).unwrap().coeffs(), &brute_convolve(&a, &b, &ix), "{spec}");
        assert_eq!(b.convolve(&a).unwrap().coeffs(), &brute_convolve(&b, &a, &ix), "{spec}");
    }
}

#[test]
fn parallel_convolution_matches_sequential_oracle() {
    // Large enough to take the threaded path.
    let spec = GroupSpec::heisenberg();
    let ix = enumerate_balls(&spec, 10).unwrap();
    let a = ball(&spec, 5, &ix);
    let b = ball(&spec, 5, &ix);
    assert!(a.len() * b.len() >= PARALLEL_PAIRS);
    let p = a.convolve(&b).unwrap();
    let q = a.convolve(&b).unwrap();
    assert_eq!(p, q);
    assert_eq!(p.coeffs(), &brute_convolve(&a, &b, &ix));
}

#[test]
fn convolution_budget_and_mismatch() {
    let f2 = GroupSpec::free(2).unwrap();
    let ix = enumerate_balls(&f2, 4).unwrap();
    let b2 = ball(&f2, 2, &ix);
    assert!(matches!(
        b2.convolve_with_budget(&b2, 50),
        Err(Error::BudgetExceeded { limit: 50, .. })
    ));
    assert!(b2.convolve_with_budget(&b2, 161).is_ok());
    let z = GroupSpec::integers();
    let zx = enumerate_balls(&z, 1).unwrap();
    assert!(matches!(
        b2.convolve(&ball(&z, 1, &zx)),
        Err(Error::SpecMismatch { .. })
    ));
}

#[test]
fn convolve_on_region_agrees_with_full_product() {
    let spec = GroupSpec::heisenberg();
    let ix = enumerate_balls(&spec, 6).unwrap();
    let a = ball(&spec, 2, &ix);
    let b = ball(&spec, 4, &ix);
    let full = a.convolve(&b).unwrap();
    let region: Vec<_> = ix.ball(2).cloned().collect();
    let part = a.convolve_on(&b, region.iter()).unwrap();
    for h in &region {
        assert_eq!(part.coeff(h), full.coeff(h));
    }
    assert_eq!(part.len(), region.len());
}

#[test]
fn adjoint_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 3).unwrap();
    let a = AlgebraElement::from_coeffs(&z, [(v(&[1]), 2.0), (v(&[3]), -1.0)], None).unwrap();
    let a_star = a.adjoint();
    assert_eq!(a_star.coeff(&v(&[-1])), 2.0);
    assert_eq!(a_star.coeff(&v(&[-3])), -1.0);
    assert_eq!(a_star.len(), 2);
    assert_eq!(a_star.adjoint(), a);
    assert_eq!(ball(&z, 3, &ix).adjoint(), ball(&z, 3, &ix));

    let f2 = GroupSpec::free(2).unwrap();
    let g = GroupElement::word("aB").unwrap();
    let d = AlgebraElement::delta(&f2, g.clone(), None).unwrap();
    assert_eq!(d.adjoint(), AlgebraElement::delta(&f2, f2.inv(&g), None).unwrap());
}

#[test]
fn norm_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 4).unwrap();
    let b4 = ball(&z, 4, &ix);
    assert_eq!(b4.norm(NormKind::L1, None).unwrap(), 9.0);
    assert_eq!(b4.norm(NormKind::L2, None).unwrap(), 3.0);
    assert_eq!(ball(&z, 1, &ix).norm(NormKind::L2s(1.0), None).unwrap(), 3.0);
    for s in [0.0, 0.5, 2.0] {
        let d = AlgebraElement::delta(&z, z.identity(), None).unwrap();
        assert_eq!(d.norm(NormKind::L2s(s), None).unwrap(), 1.0);
    }
    assert!(b4.norm(NormKind::L2s(-1.0), None).is_err());

    let h = GroupSpec::heisenberg();
    let hx = enumerate_balls(&h, 4).unwrap();
    let a = sphere(&h, 4, &hx);
    assert!(matches!(
        AlgebraElement::from_coeffs(&h, a.coeffs().clone(), None),
        Err(Error::IndexRequired { .. })
    ));
    let small = enumerate_balls(&h, 3).unwrap();
    assert!(matches!(
        a.norm(NormKind::L2s(1.0), Some(&small)),
        Err(Error::OutsideIndex { .. })
    ));
    assert_relative_eq!(
        a.norm(NormKind::L2s(1.0), Some(&hx)).unwrap(),
        5.0 * (a.len() as f64).sqrt(),
        max_relative = 1e-14
    );
}

#[test]
fn pointwise_geq_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 3).unwrap();
    let b1 = ball(&z, 1, &ix);
    let b2 = ball(&z, 2, &ix);
    assert_eq!(b2.pointwise_geq(&b1, None, None).unwrap(), (true, 0.0));
    assert_eq!(b1.pointwise_geq(&b1.scaled(2.0), None, None).unwrap(), (false, -1.0));
    let p = b1.convolve(&b2).unwrap();
    assert_eq!(p.pointwise_geq(&b1.scaled(3.0), Some(1), None).unwrap(), (true, 0.0));
    // Outside the region the product drops to 1 < 3.
    assert!(!p.pointwise_geq(&b2.scaled(3.0), None, None).unwrap().0);
    // Slack exactly at the tolerance still counts as nonnegative.
    let eps = AlgebraElement::from_coeffs(&z, [(v(&[0]), 1e-9)], None).unwrap();
    assert!(AlgebraElement::zero(&z).pointwise_geq(&eps, None, None).unwrap().0);
    let eps = AlgebraElement::from_coeffs(&z, [(v(&[0]), 2e-9)], None).unwrap();
    assert!(!AlgebraElement::zero(&z).pointwise_geq(&eps, None, None).unwrap().0);
}

#[test]
fn linear_combine_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 2).unwrap();
    let e = AlgebraElement::delta(&z, z.identity(), None).unwrap();
    let c = linear_combine(&[(1.0, &e), (-1.0, &e)]).unwrap();
    assert!(c.is_empty());
    assert_eq!(c.support_radius(), 0);

    let s1 = sphere(&z, 1, &ix);
    let c = linear_combine(&[(2.0, &s1), (1.0, &e)]).unwrap();
    assert_eq!(c.iter().map(|(_, x)| x).collect::<Vec<_>>(), vec![2.0, 1.0, 2.0]);

    let s2 = sphere(&z, 2, &ix);
    let a2 = linear_combine(&[(0.5, &s1), (1.0 / 3.0, &s2)]).unwrap();
    assert_eq!(a2.coeff(&v(&[1])), 0.5);
    assert_eq!(a2.coeff(&v(&[-2])), 1.0 / 3.0);
    assert_eq!(a2.support_radius(), 2);

    assert!(linear_combine(&[]).is_err());
    let f2 = GroupSpec::free(2).unwrap();
    let d = AlgebraElement::delta(&f2, f2.identity(), None).unwrap();
    assert!(linear_combine(&[(1.0, &e), (1.0, &d)]).is_err());
}

#[test]
fn annulus_examples() {
    let z = GroupSpec::integers();
    let ix = enumerate_balls(&z, 3).unwrap();
    let e = AlgebraElement::delta(&z, z.identity(), None).unwrap();
    assert_eq!(e.annulus_decompose(None).unwrap(), vec![e.clone()]);

    let b3 = ball(&z, 3, &ix);
    let pieces = b3.annulus_decompose(None).unwrap();
    let lengths: Vec<Vec<u32>> = pieces
        .iter()
        .map(|p| {
            let mut l: Vec<u32> = p.iter().map(|(g, _)| word_length(&z, g, None).unwrap()).collect();
            l.sort();
            l.dedup();
            l
        })
        .collect();
    assert_eq!(lengths, vec![vec![0], vec![1, 2], vec![3]]);
    let terms: Vec<(f64, &AlgebraElement)> = pieces.iter().map(|p| (1.0, p)).collect();
    assert_eq!(linear_combine(&terms).unwrap().coeffs(), b3.coeffs());

    assert_eq!((0..8).map(annulus_of).collect::<Vec<_>>(), vec![0, 1, 1, 2, 2, 2, 2, 3]);
}

#[test]
fn balls_convolve_onto_balls() {
    for (spec, n, m) in [
        (GroupSpec::integers(), 3, 4),
        (GroupSpec::free_abelian(2).unwrap(), 2, 3),
        (GroupSpec::free(2).unwrap(), 2, 2),
        (GroupSpec::free(3).unwrap(), 1, 2),
    ] {
        let ix = enumerate_balls(&spec, n + m).unwrap();
        let p = ball(&spec, n, &ix).convolve(&ball(&spec, m, &ix)).unwrap();
        assert_eq!(p.len(), ix.ball(n + m).count());
        assert!(p.iter().all(|(g, c)| c > 0.0 && ix.length(g).unwrap() <= n + m));
    }
}

#[test]
fn json_roundtrip_and_validation() {
    let f2 = GroupSpec::free(2).unwrap();
    let ix = enumerate_balls(&f2, 2).unwrap();
    let a = linear_combine(&[(2.5, &ball(&f2, 1, &ix)), (-1.0, &sphere(&f2, 2, &ix))]).unwrap();
    let text = a.to_json();
    assert!(text.starts_with("{\"group\":\"F2\",\"support_radius\":2,\"coeffs\":[[\"\",2.5],[\"A\",2.5]"));
    assert_eq!(AlgebraElement::from_json(&text, None).unwrap(), a);

    let bad = r#"{"group":"Z^1","support_radius":1,"coeffs":[["3",1.0]]}"#;
    assert!(AlgebraElement::from_json(bad, None).is_err());
    let h = r#"{"group":"H3","support_radius":4,"coeffs":[["0,0,1",1.0]]}"#;
    let he = AlgebraElement::from_json(h, None).unwrap();
    assert_eq!(he.support_radius(), 4);
}

fn arb_element(spec: GroupSpec, ix: LengthIndex, radius: u32) -> impl Strategy<Value = AlgebraElement> {
    let ball: Vec<GroupElement> = ix.ball(radius).cloned().collect();
    let n = ball.len();
    proptest::collection::vec((0..n, -3i32..=3), 1..12).prop_map(move |entries| {
        AlgebraElement::from_coeffs(
            &spec,
            entries.into_iter().map(|(i, c)| (ball[i].clone(), c as f64)),
            Some(&ix),
        )
        .unwrap()
    })
}

fn arb_group() -> impl Strategy<Value = (GroupSpec, LengthIndex)> {
    prop_oneof![
        Just(GroupSpec::integers()),
        Just(GroupSpec::free_abelian(2).unwrap()),
        Just(GroupSpec::heisenberg()),
        Just(GroupSpec::free(2).unwrap()),
        Just(GroupSpec::cyclic(6).unwrap()),
    ]
    .prop_map(|s| {
        let ix = enumerate_balls(&s, 3).unwrap();
        (s, ix)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_associative(
        (a, b, c) in arb_group().prop_flat_map(|(s, ix)| (
            arb_element(s.clone(), ix.clone(), 3),
            arb_element(s.clone(), ix.clone(), 3),
            arb_element(s, ix, 3),
        ))
    ) {
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        // Integer coefficients: both sides are exact.
        prop_assert_eq!(left.coeffs(), right.coeffs());
    }

    #[test]
    fn young_bound_and_adjoint_isometry(
        (a, b) in arb_group().prop_flat_map(|(s, ix)| (
            arb_element(s.clone(), ix.clone(), 3),
            arb_element(s, ix, 3),
        ))
    ) {
        let p = a.convolve(&b).unwrap();
        let l2 = |x: &AlgebraElement| x.norm(NormKind::L2, None).unwrap();
        prop_assert!(l2(&p) <= a.norm(NormKind::L1, None).unwrap() * l2(&b) * (1.0 + 1e-12));
        prop_assert_eq!(l2(&a.adjoint()), l2(&a));
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        prop_assert_eq!(p.adjoint(), b.adjoint().convolve(&a.adjoint()).unwrap());
    }

    #[test]
    fn unweighted_l2s_is_l2(a in arb_group().prop_flat_map(|(s, ix)| arb_element(s, ix, 3))) {
        let ix = enumerate_balls(a.spec(), 3).unwrap();
        prop_assert_eq!(a.norm(NormKind::L2s(0.0), Some(&ix)).unwrap(), a.norm(NormKind::L2, None).unwrap());
    }

    #[test]
    fn annuli_partition_the_support(a in arb_group().prop_flat_map(|(s, ix)| arb_element(s, ix, 3))) {
        let ix = enumerate_balls(a.spec(), 3).unwrap();
        let pieces = a.annulus_decompose(Some(&ix)).unwrap();
        let total: usize = pieces.iter().map(AlgebraElement::len).sum();
        prop_assert_eq!(total, a.len());
        let terms: Vec<(f64, &AlgebraElement)> = pieces.iter().map(|p| (1.0, p)).collect();
        let sum = linear_combine(&terms).unwrap();
        prop_assert_eq!(sum.coeffs(), a.coeffs());
        for (n, p) in pieces.iter().enumerate() {
            for (g, _) in p.iter() {
                prop_assert_eq!(annulus_of(ix.length(g).unwrap()) as usize, n);
            }
        }
    }
}
