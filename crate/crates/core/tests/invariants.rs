use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanbiset::biset::{bisets_isomorphic, Biset};
use spanbiset::composite::Composite;
use spanbiset::functor::shared;
use spanbiset::group::named_group;
use spanbiset::groupoid::Groupoid;
use spanbiset::gset::{gspan_compose, gspan_hom_basis, yoshida_matrix, GSet};
use spanbiset::linear::SpanWindow;
use spanbiset::pool::Pool;
use spanbiset::realization::realize_span;
use spanbiset::serial::{to_json, Workspace, Writer};
use spanbiset::span::{compose_spans, spans_isomorphic, Span};
use spanbiset::Rational;

fn pool() -> Pool {
    Pool::default_pool()
}

fn random_span(p: &Pool, a: usize, b: usize, rng: &mut ChaCha8Rng) -> Span {
    loop {
        if let Some(s) = Span::random(&p.groupoids[a], &p.groupoids[b], &p.groupoids, rng) {
            return s;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructions_are_groupoids(i in 0usize..8, j in 0usize..8) {
        let p = pool();
        let (a, b) = (&p.groupoids[i], &p.groupoids[j]);
        let prod = Groupoid::product(a, b);
        prop_assert!(prod.check_laws().is_ok());
        prop_assert_eq!(prod.num_morphisms(), a.num_morphisms() * b.num_morphisms());
        let sum = Groupoid::disjoint_union(a, b);
        prop_assert!(sum.check_laws().is_ok());
        prop_assert_eq!(sum.num_components(), a.num_components() + b.num_components());
    }

    #[test]
    fn random_bisets_are_lawful(seed: u64, i in 0usize..8, j in 0usize..8) {
        let p = pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Biset::random(&p.groupoids[i], &p.groupoids[j], &mut rng, 3);
        prop_assert!(u.check_laws().is_ok());
        let total: usize = u.orbits().iter().map(Vec::len).sum();
        prop_assert_eq!(total, u.len());
        // Composing with identities changes nothing up to isomorphism.
        let u = Arc::new(u);
        let left = Composite::new(vec![Arc::new(Biset::identity(u.target())), u.clone()]).unwrap();
        prop_assert!(bisets_isomorphic(left.biset(), &u).unwrap());
        let right = Composite::new(vec![u.clone(), Arc::new(Biset::identity(u.source()))]).unwrap();
        prop_assert!(bisets_isomorphic(right.biset(), &u).unwrap());
    }

    #[test]
    fn files_round_trip(seed: u64) {
        let p = pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (rng.gen_range(0..8), rng.gen_range(0..8));
        let s = random_span(&p, a, b, &mut rng);
        let u = Biset::random(&p.groupoids[b], &p.groupoids[a], &mut rng, 2);
        let mut w = Writer::new();
        w.span("s", &s);
        w.biset("u", &u);
        let text = to_json(&w.finish()).unwrap();
        let ws = Workspace::from_json(&text).unwrap();
        prop_assert!(spans_isomorphic(ws.only_span().unwrap().1, &s).unwrap());
        prop_assert!(bisets_isomorphic(ws.only_biset().unwrap().1, &u).unwrap());
    }

    #[test]
    fn realization_respects_composition(seed: u64) {
        let p = pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids: Vec<usize> = (0..3).map(|_| rng.gen_range(0..6)).collect();
        let s2 = random_span(&p, ids[0], ids[1], &mut rng);
        let s1 = random_span(&p, ids[1], ids[2], &mut rng);
        let composite = compose_spans(&s1, &s2).unwrap().span;
        let (r1, r2) = (realize_span(&s1).unwrap(), realize_span(&s2).unwrap());
        let chained = Composite::new(vec![Arc::new(r1.biset().clone()), Arc::new(r2.biset().clone())]).unwrap();
        let direct = realize_span(&composite).unwrap();
        prop_assert!(bisets_isomorphic(direct.biset(), chained.biset()).unwrap());
    }

    #[test]
    fn yoshida_is_functorial(g in prop::sample::select(vec!["C2", "C4", "V4", "S3", "D4"]), picks in prop::collection::vec(any::<prop::sample::Index>(), 5)) {
        let g = Arc::new(named_group(g).unwrap());
        let subs = g.subgroups();
        let sets: Vec<GSet> = (0..3).map(|k| GSet::cosets(&g, &subs[picks[k].index(subs.len())]).unwrap()).collect();
        let b1 = gspan_hom_basis(&sets[0], &sets[1]).unwrap();
        let b2 = gspan_hom_basis(&sets[1], &sets[2]).unwrap();
        let s = &b1.elements[picks[3].index(b1.len())];
        let t = &b2.elements[picks[4].index(b2.len())];
        let ts = gspan_compose(t, s).unwrap();
        let lhs = yoshida_matrix::<Rational>(&ts);
        let rhs = yoshida_matrix::<Rational>(t).mul(&yoshida_matrix::<Rational>(s));
        prop_assert_eq!(lhs, rhs);
    }
}

/// The realization matrices turn composition in the span window into
/// composition of bisets, checked on every composable basis pair.
#[test]
fn window_realization_preserves_composition() {
    let objects = ["1", "C2", "C3"]
        .iter()
        .map(|&n| {
            let g = if n == "1" { Groupoid::point() } else { Groupoid::from_group(&named_group(n).unwrap()) };
            (n.to_string(), shared(g))
        })
        .collect();
    let w = SpanWindow::new(objects, 4).unwrap();
    let n = w.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for outer in 0..w.span_basis(y, z).len() {
                    for inner in 0..w.span_basis(x, y).len() {
                        let Some(coords) = w.compose_basis(x, y, z, outer, inner).unwrap() else {
                            continue;
                        };
                        let s1 = &w.span_basis(y, z).elements[outer];
                        let s2 = &w.span_basis(x, y).elements[inner];
                        let composite = compose_spans(s1, s2).unwrap().span;
                        let direct = realize_span(&composite).unwrap();
                        let expected = w.biset_basis(x, z).coordinates(direct.biset()).unwrap();
                        let counts = w.realization_counts(x, z).unwrap();
                        let mut got = vec![0; expected.len()];
                        for (k, &c) in coords.iter().enumerate() {
                            for (i, g) in got.iter_mut().enumerate() {
                                *g += c * counts[k][i];
                            }
                        }
                        assert_eq!(got, expected, "{} after {}", w.hom_name(y, z), w.hom_name(x, y));
                    }
                }
            }
        }
    }
}
