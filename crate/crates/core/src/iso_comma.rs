//! Iso-comma squares `(a/b)` of a cospan `S → G ← T`.
//!
//! Objects are triples `(s, t, γ)` with `γ: a(s) → b(t)`; a morphism
//! `(s, t, γ) → (s', t', γ')` is a pair `(φ, ψ)` with `γ' a(φ) = b(ψ) γ`.
//! Given the source triple and the pair, the target triple is forced, so
//! morphisms are numbered by (source object, position of `φ` in `out(s)`,
//! position of `ψ` in `out(t)`).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functor::{Functor, NaturalIso};
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};

#[derive(Clone, Debug)]
pub struct IsoComma {
    pub apex: GroupoidRef,
    /// Projection to the source of `a`.
    pub p: Functor,
    /// Projection to the source of `b`.
    pub q: Functor,
    /// `a ∘ p ⇒ b ∘ q`, with component `γ` at `(s, t, γ)`.
    pub gamma: NaturalIso,
    objects: Vec<(usize, usize, usize)>,
    pair_offset: Vec<usize>,
    mor_offset: Vec<usize>,
    num_t: usize,
}

impl IsoComma {
    pub fn new(a: &Functor, b: &Functor) -> Result<Self> {
        if !same_groupoid(a.target(), b.target()) {
            return Err(Error::Mismatch("iso-comma legs have different targets".into()));
        }
        let (s, t, g) = (&**a.source(), &**b.source(), &**a.target());
        let num_t = t.num_objects();
        let mut objects = Vec::new();
        let mut pair_offset = Vec::with_capacity(s.num_objects() * num_t);
        for x in 0..s.num_objects() {
            for y in 0..num_t {
                pair_offset.push(objects.len());
                for &gamma in g.hom(a.obj(x), b.obj(y)) {
                    objects.push((x, y, gamma));
                }
            }
        }
        let mut mor_offset = Vec::with_capacity(objects.len() + 1);
        let mut total = 0;
        for &(x, y, _) in &objects {
            mor_offset.push(total);
            total += s.out(x).len() * t.out(y).len();
        }
        mor_offset.push(total);

        let mut comma = IsoComma {
            apex: Arc::new(Groupoid::empty()),
            p: Functor::identity(a.source()),
            q: Functor::identity(b.source()),
            gamma: NaturalIso::identity(a),
            objects,
            pair_offset,
            mor_offset,
            num_t,
        };

        let mut src = Vec::with_capacity(total);
        let mut tgt = Vec::with_capacity(total);
        let mut inverse = Vec::with_capacity(total);
        let mut phi_of = Vec::with_capacity(total);
        let mut psi_of = Vec::with_capacity(total);
        for (o, &(x, y, gamma)) in comma.objects.iter().enumerate() {
            for &phi in s.out(x) {
                for &psi in t.out(y) {
                    let gamma2 = g.compose_all(&[b.mor(psi), gamma, g.inv(a.mor(phi))]);
                    let o2 = comma.object_index(s.tgt(phi), t.tgt(psi), gamma2);
                    src.push(o);
                    tgt.push(o2);
                    phi_of.push(phi);
                    psi_of.push(psi);
                }
            }
        }
        for m in 0..total {
            inverse.push(comma.morphism_index(tgt[m], s.inv(phi_of[m]), t.inv(psi_of[m])));
        }
        let identity: Vec<usize> = (0..comma.objects.len())
            .map(|o| {
                let (x, y, _) = comma.objects[o];
                comma.morphism_index(o, s.id(x), t.id(y))
            })
            .collect();
        let apex = Groupoid::new(comma.objects.len(), src.clone(), tgt, identity, inverse, |m2, m1| {
            comma.morphism_index(src[m1], s.compose(phi_of[m2], phi_of[m1]), t.compose(psi_of[m2], psi_of[m1]))
        })?;
        let apex = Arc::new(apex);
        let obj_s: Vec<usize> = comma.objects.iter().map(|o| o.0).collect();
        let obj_t: Vec<usize> = comma.objects.iter().map(|o| o.1).collect();
        comma.p = Functor::new_unchecked(apex.clone(), a.source().clone(), obj_s, phi_of);
        comma.q = Functor::new_unchecked(apex.clone(), b.source().clone(), obj_t, psi_of);
        let ap = Functor::compose(a, &comma.p)?;
        let bq = Functor::compose(b, &comma.q)?;
        comma.gamma = NaturalIso::new_unchecked(ap, bq, comma.objects.iter().map(|o| o.2).collect());
        comma.apex = apex;
        debug_assert!(comma.gamma.check().is_ok());
        Ok(comma)
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    /// The triple `(s, t, γ)` of an apex object.
    pub fn object(&self, o: usize) -> (usize, usize, usize) {
        self.objects[o]
    }

    pub fn object_index(&self, s: usize, t: usize, gamma: usize) -> usize {
        let g = &**self.gamma.source().target();
        self.pair_offset[s * self.num_t + t] + g.hom_index(gamma)
    }

    /// The morphism `(φ, ψ)` out of apex object `o`.
    pub fn morphism_index(&self, o: usize, phi: usize, psi: usize) -> usize {
        let (s, t) = (&**self.p.target(), &**self.q.target());
        let (_, y, _) = self.objects[o];
        self.mor_offset[o] + s.out_pos(phi) * t.out(y).len() + t.out_pos(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{find_equivalence, shared};
    use crate::group::named_group;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    /// Independent count of apex objects and morphisms straight from the
    /// definition: triples, and pairs satisfying the square equation.
    fn brute_counts(a: &Functor, b: &Functor) -> (usize, usize) {
        let (s, t, g) = (&**a.source(), &**b.source(), &**a.target());
        let mut triples = Vec::new();
        for x in 0..s.num_objects() {
            for y in 0..t.num_objects() {
                for gamma in 0..g.num_morphisms() {
                    if g.src(gamma) == a.obj(x) && g.tgt(gamma) == b.obj(y) {
                        triples.push((x, y, gamma));
                    }
                }
            }
        }
        let mut pairs = 0;
        for &(x, y, gamma) in &triples {
            for &(x2, y2, gamma2) in &triples {
                for phi in s.hom(x, x2) {
                    for psi in t.hom(y, y2) {
                        if g.compose(gamma2, a.mor(*phi)) == g.compose(b.mor(*psi), gamma) {
                            pairs += 1;
                        }
                    }
                }
            }
        }
        (triples.len(), pairs)
    }

    #[test]
    fn identity_on_point() {
        let one = shared(Groupoid::point());
        let id = Functor::identity(&one);
        let c = IsoComma::new(&id, &id).unwrap();
        assert_eq!((c.apex.num_objects(), c.apex.num_morphisms()), (1, 1));
    }

    #[test]
    fn point_into_c2_twice_is_discrete() {
        let one = shared(Groupoid::point());
        let c2 = bg("C2");
        let u = Functor::constant(&one, &c2, 0);
        let c = IsoComma::new(&u, &u).unwrap();
        c.apex.check_laws().unwrap();
        assert_eq!((c.apex.num_objects(), c.apex.num_morphisms()), (2, 2));
        assert_eq!(c.apex.num_components(), 2);
        assert_eq!(brute_counts(&u, &u), (2, 2));
    }

    #[test]
    fn identity_on_c2() {
        let c2 = bg("C2");
        let id = Functor::identity(&c2);
        let c = IsoComma::new(&id, &id).unwrap();
        c.apex.check_laws().unwrap();
        c.gamma.check().unwrap();
        c.p.check().unwrap();
        c.q.check().unwrap();
        assert_eq!((c.apex.num_objects(), c.apex.num_morphisms()), (2, 8));
        assert!(c.apex.is_connected());
        assert_eq!(c.apex.hom(0, 0).len(), 2);
        assert_eq!(brute_counts(&id, &id), (2, 8));
        assert!(find_equivalence(&c2, &c.apex).is_some());
    }

    #[test]
    fn matches_brute_force_on_mixed_cospans() {
        let s3 = bg("S3");
        let c2 = bg("C2");
        let c3 = bg("C3");
        for a in Functor::all(&c2, &s3) {
            for b in Functor::all(&c3, &s3) {
                let c = IsoComma::new(&a, &b).unwrap();
                c.apex.check_laws().unwrap();
                c.gamma.check().unwrap();
                assert_eq!((c.apex.num_objects(), c.apex.num_morphisms()), brute_counts(&a, &b));
            }
        }
    }
}
