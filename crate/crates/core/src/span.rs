//! Spans of groupoid functors, their 2-cells, and composition by iso-comma
//! squares.
//!
//! A span `H ←b S →a G` is a 1-cell `H → G`. A 2-cell `[f, β, α]` from
//! `(b, a)` to `(b', a')` is a functor `f: S → S'` with natural isos
//! `β: b ⇒ b'f` and `α: a'f ⇒ a`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::functor::{Functor, NaturalIso};
use crate::group::FiniteGroup;
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};
use crate::iso_comma::IsoComma;

#[derive(Clone, Debug)]
pub struct Span {
    pub apex: GroupoidRef,
    /// `b: S → H`.
    pub left: Functor,
    /// `a: S → G`.
    pub right: Functor,
}

impl Span {
    pub fn new(left: Functor, right: Functor) -> Result<Self> {
        if !same_groupoid(left.source(), right.source()) {
            return Err(Error::Mismatch("span legs have different sources".into()));
        }
        Ok(Span {
            apex: left.source().clone(),
            left,
            right,
        })
    }

    /// `H`.
    pub fn source(&self) -> &GroupoidRef {
        self.left.target()
    }

    /// `G`.
    pub fn target(&self) -> &GroupoidRef {
        self.right.target()
    }

    pub fn identity(g: &GroupoidRef) -> Self {
        let id = Functor::identity(g);
        Span::new(id.clone(), id).expect("identity span")
    }

    /// `u_! = (S = S →u G)`.
    pub fn covariant(u: &Functor) -> Self {
        Span::new(Functor::identity(u.source()), u.clone()).expect("covariant embedding")
    }

    /// `u^* = (H ←u S = S)`.
    pub fn contravariant(u: &Functor) -> Self {
        Span::new(u.clone(), Functor::identity(u.source())).expect("contravariant embedding")
    }

    pub fn check(&self) -> Result<()> {
        self.apex.check_laws()?;
        self.left.check()?;
        self.right.check()
    }

    /// A span with a random apex from `apexes` and random legs.
    pub fn random(h: &GroupoidRef, g: &GroupoidRef, apexes: &[GroupoidRef], rng: &mut impl Rng) -> Option<Self> {
        let apex = apexes.choose(rng)?;
        let left = Functor::random(apex, h, rng)?;
        let right = Functor::random(apex, g, rng)?;
        Span::new(left, right).ok()
    }

    /// One span per connected component of the apex.
    pub fn decompose(&self) -> Vec<Span> {
        self.apex
            .components()
            .iter()
            .map(|objects| {
                let (sub, mors) = self.apex.full_subgroupoid(objects);
                let sub = Arc::new(sub);
                let restrict = |f: &Functor| {
                    Functor::new_unchecked(
                        sub.clone(),
                        f.target().clone(),
                        objects.iter().map(|&x| f.obj(x)).collect(),
                        mors.iter().map(|&m| f.mor(m)).collect(),
                    )
                };
                Span::new(restrict(&self.left), restrict(&self.right)).expect("restricted legs share the apex")
            })
            .collect()
    }

    /// Apex `S ⊔ S'` with the legs of both.
    pub fn disjoint_union(&self, other: &Span) -> Result<Span> {
        if !same_groupoid(self.source(), other.source()) || !same_groupoid(self.target(), other.target()) {
            return Err(Error::Mismatch("sum of non-parallel spans".into()));
        }
        let apex = Arc::new(Groupoid::disjoint_union(&self.apex, &other.apex));
        let (n, m) = (self.apex.num_objects(), self.apex.num_morphisms());
        let join = |f: &Functor, g: &Functor| {
            Functor::new_unchecked(
                apex.clone(),
                f.target().clone(),
                (0..apex.num_objects()).map(|x| if x < n { f.obj(x) } else { g.obj(x - n) }).collect(),
                (0..apex.num_morphisms()).map(|k| if k < m { f.mor(k) } else { g.mor(k - m) }).collect(),
            )
        };
        Span::new(join(&self.left, &other.left), join(&self.right, &other.right))
    }

    /// The empty span `H ← ∅ → G`.
    pub fn empty(h: &GroupoidRef, g: &GroupoidRef) -> Span {
        let apex = Arc::new(Groupoid::empty());
        Span::new(
            Functor::new_unchecked(apex.clone(), h.clone(), vec![], vec![]),
            Functor::new_unchecked(apex, g.clone(), vec![], vec![]),
        )
        .expect("empty span")
    }

    /// `s × s'` with product apex and legs.
    pub fn tensor(&self, other: &Span) -> Span {
        Span::new(Functor::product(&self.left, &other.left), Functor::product(&self.right, &other.right))
            .expect("product legs share the product apex")
    }
}

/// `s1 ∘ s2` for `s1: H → G`, `s2: K → H`, with the iso-comma square used.
#[derive(Clone, Debug)]
pub struct SpanComposite {
    pub span: Span,
    /// `(c / b)` where `c` is the right leg of `s2` and `b` the left leg of `s1`.
    pub comma: IsoComma,
}

/// Composite `s1 ∘ s2`: apex `(c/b)` with objects `(t, s, γ: c(t) → b(s))`,
/// legs `d∘p` and `a∘q`.
pub fn compose_spans(s1: &Span, s2: &Span) -> Result<SpanComposite> {
    if !same_groupoid(s1.source(), s2.target()) {
        return Err(Error::Mismatch("spans are not composable".into()));
    }
    let comma = IsoComma::new(&s2.right, &s1.left)?;
    let span = Span::new(Functor::compose(&s2.left, &comma.p)?, Functor::compose(&s1.right, &comma.q)?)?;
    Ok(SpanComposite { span, comma })
}

#[derive(Clone, Debug)]
pub struct SpanTwoCell {
    pub f: Functor,
    /// `b ⇒ b'f`.
    pub beta: NaturalIso,
    /// `a'f ⇒ a`.
    pub alpha: NaturalIso,
}

impl SpanTwoCell {
    /// Checks that this is a 2-cell from `s` to `t`.
    pub fn check(&self, s: &Span, t: &Span) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidTwoCell(msg.into()));
        if !same_groupoid(self.f.source(), &s.apex) || !same_groupoid(self.f.target(), &t.apex) {
            return bad("apex functor has the wrong endpoints");
        }
        self.f.check()?;
        let bf = Functor::compose(&t.left, &self.f)?;
        let af = Functor::compose(&t.right, &self.f)?;
        if *self.beta.source() != s.left || *self.beta.target() != bf {
            return bad("left component has the wrong boundary");
        }
        if *self.alpha.source() != af || *self.alpha.target() != s.right {
            return bad("right component has the wrong boundary");
        }
        self.beta.check()?;
        self.alpha.check()
    }

    pub fn identity(s: &Span) -> Self {
        SpanTwoCell {
            f: Functor::identity(&s.apex),
            beta: NaturalIso::identity(&s.left),
            alpha: NaturalIso::identity(&s.right),
        }
    }

    /// `second · self`: `[f'f, β'_f β, α α'_f]`.
    pub fn then(&self, second: &SpanTwoCell, t: &Span, u: &Span) -> Result<Self> {
        let f = Functor::compose(&second.f, &self.f)?;
        let h = &**t.source();
        let g = &**t.target();
        let n = self.f.source().num_objects();
        let beta = (0..n)
            .map(|x| h.compose(second.beta.component(self.f.obj(x)), self.beta.component(x)))
            .collect();
        let alpha = (0..n)
            .map(|x| g.compose(self.alpha.component(x), second.alpha.component(self.f.obj(x))))
            .collect();
        let left = self.beta.source().clone();
        let right = self.alpha.target().clone();
        Ok(SpanTwoCell {
            beta: NaturalIso::new(left, Functor::compose(&u.left, &f)?, beta)?,
            alpha: NaturalIso::new(Functor::compose(&u.right, &f)?, right, alpha)?,
            f,
        })
    }
}

/// Associator `(s1∘s2)∘s3 ⇒ s1∘(s2∘s3)`:
/// `(u, (t, s, γ), δ) ↦ ((u, t, δ), s, γ)` with identity components.
pub fn associator(s1: &Span, s2: &Span, s3: &Span) -> Result<(SpanComposite, SpanComposite, SpanTwoCell)> {
    let s12 = compose_spans(s1, s2)?;
    let s23 = compose_spans(s2, s3)?;
    let lhs = compose_spans(&s12.span, s3)?;
    let rhs = compose_spans(s1, &s23.span)?;
    let (x, y) = (&s12.comma, &s23.comma);
    let (lc, rc) = (&lhs.comma, &rhs.comma);
    let obj: Vec<usize> = (0..lc.num_objects())
        .map(|o| {
            let (u, xo, delta) = lc.object(o);
            let (t, s, gamma) = x.object(xo);
            rc.object_index(y.object_index(u, t, delta), s, gamma)
        })
        .collect();
    let apex = &*lhs.span.apex;
    let mor: Vec<usize> = (0..apex.num_morphisms())
        .map(|m| {
            let o = apex.src(m);
            let (omega, xm) = (lc.p.mor(m), lc.q.mor(m));
            let (psi, phi) = (x.p.mor(xm), x.q.mor(xm));
            let (u, xo, delta) = lc.object(o);
            let (t, _, _) = x.object(xo);
            let yo = y.object_index(u, t, delta);
            let ym = y.morphism_index(yo, omega, psi);
            rc.morphism_index(obj[o], ym, phi)
        })
        .collect();
    let f = Functor::new(lhs.span.apex.clone(), rhs.span.apex.clone(), obj, mor)?;
    let beta_target = Functor::compose(&rhs.span.left, &f)?;
    let alpha_source = Functor::compose(&rhs.span.right, &f)?;
    let h = &**s3.source();
    let g = &**s1.target();
    let beta = NaturalIso::new(
        lhs.span.left.clone(),
        beta_target,
        (0..apex.num_objects()).map(|o| h.id(lhs.span.left.obj(o))).collect(),
    )?;
    let alpha = NaturalIso::new(
        alpha_source,
        lhs.span.right.clone(),
        (0..apex.num_objects()).map(|o| g.id(lhs.span.right.obj(o))).collect(),
    )?;
    Ok((lhs, rhs, SpanTwoCell { f, beta, alpha }))
}

/// Left unitor `Id_G ∘ s ⇒ s`: `f = p`, `β = id`, `α_(s,g,γ) = γ`.
pub fn left_unitor(s: &Span) -> Result<(SpanComposite, SpanTwoCell)> {
    let c = compose_spans(&Span::identity(s.target()), s)?;
    let f = c.comma.p.clone();
    let beta = NaturalIso::identity(&c.span.left);
    let af = Functor::compose(&s.right, &f)?;
    let alpha = NaturalIso::new(af, c.span.right.clone(), c.comma.gamma.components().to_vec())?;
    Ok((c, SpanTwoCell { f, beta, alpha }))
}

/// Right unitor `s ∘ Id_H ⇒ s`: `f = q`, `β_(h,s,γ) = γ`, `α = id`.
pub fn right_unitor(s: &Span) -> Result<(SpanComposite, SpanTwoCell)> {
    let c = compose_spans(s, &Span::identity(s.source()))?;
    let f = c.comma.q.clone();
    let bf = Functor::compose(&s.left, &f)?;
    let beta = NaturalIso::new(c.span.left.clone(), bf, c.comma.gamma.components().to_vec())?;
    let alpha = NaturalIso::identity(&c.span.right);
    Ok((c, SpanTwoCell { f, beta, alpha }))
}

/// Skeletal data of one apex component: basepoint, vertex group with its
/// morphism ids, and generators.
struct ComponentData {
    objects: Vec<usize>,
    base: usize,
    group: FiniteGroup,
    elems: Vec<usize>,
    gens: Vec<usize>,
}

fn component_data(s: &Span) -> Vec<ComponentData> {
    s.apex
        .components()
        .iter()
        .map(|objects| {
            let base = objects[0];
            let (group, elems) = s.apex.vertex_group(base);
            let gens = group.generators();
            ComponentData {
                objects: objects.clone(),
                base,
                group,
                elems,
                gens,
            }
        })
        .collect()
}

/// Finds `(θ, h, g)` with `b'(θk) h = h b(k)` and `a(k) g = g a'(θk)` for an
/// isomorphism `θ` between the vertex groups of two connected components.
fn match_components(s: &Span, c: &ComponentData, t: &Span, d: &ComponentData) -> Option<(Vec<usize>, usize, usize)> {
    if c.group.order() != d.group.order() {
        return None;
    }
    let (hg, gg) = (&**s.source(), &**s.target());
    let (b0, b1) = (s.left.obj(c.base), t.left.obj(d.base));
    let (a0, a1) = (s.right.obj(c.base), t.right.obj(d.base));
    if hg.component_of(b0) != hg.component_of(b1) || gg.component_of(a0) != gg.component_of(a1) {
        return None;
    }
    let iso = c.group.isomorphism(&d.group)?;
    let autos = d.group.automorphisms();
    for auto in &autos {
        let theta: Vec<usize> = iso.iter().map(|&i| auto[i]).collect();
        let image = |k: usize| d.elems[theta[k]];
        let h = hg.hom(b0, b1).iter().copied().find(|&h| {
            c.gens.iter().all(|&k| {
                hg.compose(t.left.mor(image(k)), h) == hg.compose(h, s.left.mor(c.elems[k]))
            })
        });
        let Some(h) = h else { continue };
        let g = gg.hom(a1, a0).iter().copied().find(|&g| {
            c.gens.iter().all(|&k| {
                gg.compose(s.right.mor(c.elems[k]), g) == gg.compose(g, t.right.mor(image(k)))
            })
        });
        if let Some(g) = g {
            return Some((theta, h, g));
        }
    }
    None
}

/// Decides whether an invertible 2-cell `s ⇒ t` exists and returns one.
/// Components are matched greedily, which is sound because isomorphism of
/// connected spans is an equivalence relation and an invertible 2-cell
/// induces a bijection of apex components.
pub fn find_span_isomorphism(s: &Span, t: &Span) -> Result<Option<SpanTwoCell>> {
    if !same_groupoid(s.source(), t.source()) || !same_groupoid(s.target(), t.target()) {
        return Err(Error::Mismatch("spans are not parallel".into()));
    }
    let cs = component_data(s);
    let ds = component_data(t);
    if cs.len() != ds.len() {
        return Ok(None);
    }
    let mut used = vec![false; ds.len()];
    let mut matches = Vec::with_capacity(cs.len());
    for c in &cs {
        let found = ds
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .find_map(|(j, d)| match_components(s, c, t, d).map(|m| (j, m)));
        let Some((j, m)) = found else { return Ok(None) };
        used[j] = true;
        matches.push((j, m));
    }
    let (sa, ta) = (&*s.apex, &*t.apex);
    let (hg, gg) = (&**s.source(), &**s.target());
    let mut base_image = Vec::with_capacity(cs.len());
    let mut rho = Vec::with_capacity(cs.len());
    let mut links = vec![0; sa.num_objects()];
    let mut beta = vec![0; sa.num_objects()];
    let mut alpha = vec![0; sa.num_objects()];
    for (c, (j, (theta, h, g))) in cs.iter().zip(&matches) {
        let d = &ds[*j];
        base_image.push(d.base);
        rho.push(theta.iter().map(|&i| d.elems[i]).collect::<Vec<_>>());
        for &x in &c.objects {
            links[x] = ta.id(d.base);
            let tx = sa.tree(x);
            beta[x] = hg.compose(*h, hg.inv(s.left.mor(tx)));
            alpha[x] = gg.compose(s.right.mor(tx), *g);
        }
    }
    let f = Functor::from_skeleton(&s.apex, &t.apex, &base_image, &rho, &links);
    let cell = SpanTwoCell {
        beta: NaturalIso::new(s.left.clone(), Functor::compose(&t.left, &f)?, beta)?,
        alpha: NaturalIso::new(Functor::compose(&t.right, &f)?, s.right.clone(), alpha)?,
        f,
    };
    debug_assert!(cell.check(s, t).is_ok());
    Ok(Some(cell))
}

pub fn spans_isomorphic(s: &Span, t: &Span) -> Result<bool> {
    Ok(find_span_isomorphism(s, t)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{equivalent, shared};
    use crate::group::named_group;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    fn point() -> GroupoidRef {
        shared(Groupoid::point())
    }

    fn pool() -> Vec<GroupoidRef> {
        let one = Groupoid::point();
        let c2 = Groupoid::from_group(&named_group("C2").unwrap());
        vec![
            point(),
            bg("C2"),
            bg("C3"),
            bg("S3"),
            shared(Groupoid::disjoint_union(&one, &one)),
            shared(Groupoid::disjoint_union(&c2, &one)),
        ]
    }

    #[test]
    fn composite_apexes() {
        let one = point();
        let c2 = bg("C2");
        let t = Functor::constant(&c2, &one, 0);
        let s = Span::new(t.clone(), t.clone()).unwrap();
        let c = compose_spans(&s, &s).unwrap();
        assert_eq!((c.span.apex.num_objects(), c.span.apex.num_morphisms()), (1, 4));
        assert!(equivalent(&c.span.apex, &shared(Groupoid::from_group(&named_group("V4").unwrap()))));

        let u = Functor::constant(&one, &c2, 0);
        let c = compose_spans(&Span::contravariant(&u), &Span::covariant(&u)).unwrap();
        assert_eq!((c.span.apex.num_objects(), c.span.apex.num_morphisms()), (2, 2));
    }

    #[test]
    fn embeddings_and_identity() {
        let c2 = bg("C2");
        let id = Functor::identity(&c2);
        let s = Span::covariant(&id);
        assert!(spans_isomorphic(&s, &Span::identity(&c2)).unwrap());
        let one = point();
        let a = Span::new(Functor::identity(&one), Functor::identity(&one)).unwrap();
        let b = Span::new(Functor::constant(&c2, &one, 0), Functor::constant(&c2, &one, 0)).unwrap();
        assert!(!spans_isomorphic(&a, &b).unwrap());
        let idc = compose_spans(&Span::identity(&c2), &Span::identity(&c2)).unwrap();
        let cell = find_span_isomorphism(&Span::identity(&c2), &idc.span).unwrap().unwrap();
        cell.check(&Span::identity(&c2), &idc.span).unwrap();
    }

    #[test]
    fn decompose_into_components() {
        let one = point();
        let two = shared(Groupoid::discrete(2));
        let s = Span::new(Functor::constant(&two, &one, 0), Functor::constant(&two, &one, 0)).unwrap();
        let parts = s.decompose();
        assert_eq!(parts.len(), 2);
        assert!(spans_isomorphic(&parts[0], &Span::identity(&one)).unwrap());
        let mixed = shared(Groupoid::disjoint_union(&Groupoid::from_group(&named_group("C2").unwrap()), &Groupoid::point()));
        let s = Span::new(Functor::constant(&mixed, &one, 0), Functor::constant(&mixed, &one, 0)).unwrap();
        let parts = s.decompose();
        assert_eq!(parts.iter().map(|p| p.apex.num_morphisms()).collect::<Vec<_>>(), vec![2, 1]);
        let back = parts[0].disjoint_union(&parts[1]).unwrap();
        assert!(spans_isomorphic(&back, &s).unwrap());
    }

    #[test]
    fn unit_and_associativity_laws_up_to_iso() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pool = pool();
        for _ in 0..30 {
            let g: Vec<&GroupoidRef> = (0..4).map(|_| pool.choose(&mut rng).unwrap()).collect();
            let s1 = Span::random(g[1], g[0], &pool, &mut rng).unwrap();
            let s2 = Span::random(g[2], g[1], &pool, &mut rng).unwrap();
            let s3 = Span::random(g[3], g[2], &pool, &mut rng).unwrap();
            let (l, lam) = left_unitor(&s1).unwrap();
            lam.check(&l.span, &s1).unwrap();
            let (r, rho) = right_unitor(&s1).unwrap();
            rho.check(&r.span, &s1).unwrap();
            let (lhs, rhs, a) = associator(&s1, &s2, &s3).unwrap();
            a.check(&lhs.span, &rhs.span).unwrap();
            assert!(spans_isomorphic(&lhs.span, &rhs.span).unwrap());
            assert!(spans_isomorphic(&l.span, &s1).unwrap());
            // Every span is a_! ∘ b^* of its own legs.
            let ab = compose_spans(&Span::covariant(&s1.right), &Span::contravariant(&s1.left)).unwrap();
            assert!(spans_isomorphic(&ab.span, &s1).unwrap());
        }
    }

    #[test]
    fn vertical_composition_of_unitors() {
        let c2 = bg("C2");
        let s3 = bg("S3");
        for a in Functor::all(&c2, &s3).into_iter().take(3) {
            let s = Span::covariant(&a);
            let (l, lam) = left_unitor(&s).unwrap();
            let id = SpanTwoCell::identity(&l.span);
            let comp = id.then(&lam, &l.span, &s).unwrap();
            comp.check(&l.span, &s).unwrap();
        }
    }

    #[test]
    fn isomorphism_is_symmetric_on_random_spans() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pool = pool();
        for _ in 0..40 {
            let h = pool.choose(&mut rng).unwrap();
            let g = pool.choose(&mut rng).unwrap();
            let s = Span::random(h, g, &pool, &mut rng).unwrap();
            let t = Span::random(h, g, &pool, &mut rng).unwrap();
            assert_eq!(spans_isomorphic(&s, &t).unwrap(), spans_isomorphic(&t, &s).unwrap());
            assert!(spans_isomorphic(&s, &s).unwrap());
        }
    }
}
