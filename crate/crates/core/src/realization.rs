//! The realization pseudo-functor from spans to bisets.
//!
//! `R_!(u) = G(u-, -)` and `R^*(u) = G(-, u-)` are adjoint bisets; a span
//! `H ←b S →a G` goes to the composite `R_!(a) ∘ R^*(b)`. Every structural
//! map here is assembled from small cells (units, counits, the structure
//! isomorphisms of `R_!` and `R^*`, unitors, Beck–Chevalley mates) spliced
//! into longer chains with [`window_map`], and each construction that has a
//! closed formula is cross-checked against it.

use std::sync::Arc;

use crate::biset::{Biset, BisetMorphism, BisetRef};
use crate::composite::{chain_map, window_map, Composite};
use crate::error::{Error, Result};
use crate::functor::{Functor, NaturalIso};
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};
use crate::iso_comma::IsoComma;
use crate::span::{associator, compose_spans, left_unitor, right_unitor, Span, SpanComposite, SpanTwoCell};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// `R_!(u)` or `R^*(u)` with access to the `(h, ξ)` description of elements.
#[derive(Clone, Debug)]
pub struct Realized {
    pub functor: Functor,
    pub variance: Variance,
    pub biset: BisetRef,
    offset: Vec<usize>,
}

impl Realized {
    pub fn new(u: &Functor, variance: Variance) -> Self {
        let (h, g) = (&**u.source(), &**u.target());
        let mut offset = Vec::with_capacity(h.num_objects());
        let mut total = 0;
        for x in 0..h.num_objects() {
            offset.push(total);
            total += match variance {
                Variance::Covariant => g.out(u.obj(x)).len(),
                Variance::Contravariant => g.incoming(u.obj(x)).len(),
            };
        }
        let biset = match variance {
            Variance::Covariant => Biset::covariant(u),
            Variance::Contravariant => Biset::contravariant(u),
        };
        debug_assert_eq!(biset.len(), total);
        Realized {
            functor: u.clone(),
            variance,
            biset: Arc::new(biset),
            offset,
        }
    }

    pub fn covariant(u: &Functor) -> Self {
        Realized::new(u, Variance::Covariant)
    }

    pub fn contravariant(u: &Functor) -> Self {
        Realized::new(u, Variance::Contravariant)
    }

    fn target_groupoid(&self) -> &Groupoid {
        self.functor.target()
    }

    /// The object `h` of the functor's source that element `e` sits over.
    pub fn object(&self, e: usize) -> usize {
        match self.variance {
            Variance::Covariant => self.biset.src(e),
            Variance::Contravariant => self.biset.tgt(e),
        }
    }

    /// The morphism `ξ` of element `e`: `u(h) → g` or `g → u(h)`.
    pub fn morphism(&self, e: usize) -> usize {
        let h = self.object(e);
        let y = self.functor.obj(h);
        let g = self.target_groupoid();
        let i = e - self.offset[h];
        match self.variance {
            Variance::Covariant => g.out(y)[i],
            Variance::Contravariant => g.incoming(y)[i],
        }
    }

    /// Element `(h, ξ)`.
    pub fn element(&self, h: usize, xi: usize) -> usize {
        let g = self.target_groupoid();
        match self.variance {
            Variance::Covariant => {
                debug_assert_eq!(g.src(xi), self.functor.obj(h));
                self.offset[h] + g.out_pos(xi)
            }
            Variance::Contravariant => {
                debug_assert_eq!(g.tgt(xi), self.functor.obj(h));
                self.offset[h] + g.in_pos(xi)
            }
        }
    }
}

/// A morphism between two composites.
#[derive(Clone, Debug)]
pub struct Cell {
    pub domain: Composite,
    pub codomain: Composite,
    pub map: BisetMorphism,
}

impl Cell {
    pub fn from_formula(
        domain: Composite,
        codomain: Composite,
        formula: impl FnMut(&[usize], &mut Vec<usize>),
    ) -> Result<Self> {
        let map = chain_map(&domain, &codomain, formula)?;
        Ok(Cell { domain, codomain, map })
    }

    pub fn is_bijective(&self) -> bool {
        self.map.is_bijective(self.codomain.num_classes())
    }

    pub fn is_identity(&self) -> bool {
        self.map.map.iter().enumerate().all(|(i, &j)| i == j)
    }
}

fn single(u: &BisetRef) -> Composite {
    Composite::single(u.clone())
}

fn chain_of(factors: &[&BisetRef]) -> Result<Composite> {
    Composite::new(factors.iter().map(|&u| u.clone()).collect())
}

/// A running composite of cells, each applied to a window of the chain.
pub struct Path {
    start: Composite,
    current: Composite,
    map: BisetMorphism,
}

impl Path {
    pub fn new(start: Composite) -> Self {
        let map = BisetMorphism {
            map: (0..start.num_classes()).collect(),
        };
        Path {
            current: start.clone(),
            start,
            map,
        }
    }

    /// Applies `cell` to the factors `at..at + cell.domain.arity()`.
    pub fn step(&mut self, at: usize, cell: &Cell) -> Result<()> {
        let end = at + cell.domain.arity();
        if end > self.current.arity() {
            return Err(Error::Mismatch("cell does not fit the chain".into()));
        }
        let factors: Vec<BisetRef> = self.current.factors()[..at]
            .iter()
            .chain(cell.codomain.factors())
            .chain(&self.current.factors()[end..])
            .cloned()
            .collect();
        let next = Composite::new(factors)?;
        let m = window_map(&self.current, &next, at, &cell.domain, &cell.codomain, &cell.map)?;
        self.map = self.map.then(&m);
        self.current = next;
        Ok(())
    }

    pub fn current(&self) -> &Composite {
        &self.current
    }

    pub fn finish(self) -> Cell {
        Cell {
            domain: self.start,
            codomain: self.current,
            map: self.map,
        }
    }
}

/// `[Id_G, U] → U`, `[α, x] ↦ α·x`.
pub fn left_unitor_cell(u: &BisetRef) -> Result<Cell> {
    let id = Arc::new(Biset::identity(u.target()));
    let c = chain_of(&[&id, u])?;
    Cell::from_formula(c, single(u), |t, out| out.push(u.act_left(t[0], t[1])))
}

/// `U → [Id_G, U]`, `x ↦ [id, x]`.
pub fn left_unitor_inverse(u: &BisetRef) -> Result<Cell> {
    let id = Arc::new(Biset::identity(u.target()));
    let c = chain_of(&[&id, u])?;
    let g = u.target().clone();
    Cell::from_formula(single(u), c, |t, out| out.extend([g.id(u.tgt(t[0])), t[0]]))
}

/// `[U, Id_H] → U`, `[x, β] ↦ x·β`.
pub fn right_unitor_cell(u: &BisetRef) -> Result<Cell> {
    let id = Arc::new(Biset::identity(u.source()));
    let c = chain_of(&[u, &id])?;
    Cell::from_formula(c, single(u), |t, out| out.push(u.act_right(t[0], t[1])))
}

/// `U → [U, Id_H]`, `x ↦ [x, id]`.
pub fn right_unitor_inverse(u: &BisetRef) -> Result<Cell> {
    let id = Arc::new(Biset::identity(u.source()));
    let c = chain_of(&[u, &id])?;
    let h = u.source().clone();
    Cell::from_formula(single(u), c, |t, out| out.extend([t[0], h.id(u.src(t[0]))]))
}

/// The adjunction `R_!(u) ⊣ R^*(u)`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    pub shriek: Realized,
    pub star: Realized,
}

impl Adjunction {
    pub fn new(u: &Functor) -> Self {
        Adjunction {
            shriek: Realized::covariant(u),
            star: Realized::contravariant(u),
        }
    }

    pub fn from_parts(shriek: &Realized, star: &Realized) -> Result<Self> {
        if shriek.functor != star.functor || shriek.variance != Variance::Covariant || star.variance != Variance::Contravariant {
            return Err(Error::Mismatch("adjunction needs R_!(u) and R^*(u) of one functor".into()));
        }
        Ok(Adjunction {
            shriek: shriek.clone(),
            star: star.clone(),
        })
    }

    fn functor(&self) -> &Functor {
        &self.shriek.functor
    }

    /// `η: Id_H → R^*(u) ∘ R_!(u)`, `ζ ↦ [id, u(ζ)]`.
    pub fn unit(&self) -> Result<Cell> {
        let u = self.functor();
        let (h, g) = (u.source().clone(), u.target().clone());
        let id = Arc::new(Biset::identity(&h));
        let codomain = chain_of(&[&self.star.biset, &self.shriek.biset])?;
        Cell::from_formula(single(&id), codomain, |t, out| {
            let zeta = t[0];
            let y = h.tgt(zeta);
            out.push(self.star.element(y, g.id(u.obj(y))));
            out.push(self.shriek.element(h.src(zeta), u.mor(zeta)));
        })
    }

    /// `ε: R_!(u) ∘ R^*(u) → Id_G`, `[ξ', ξ] ↦ ξ'ξ`.
    pub fn counit(&self) -> Result<Cell> {
        let g = self.functor().target().clone();
        let id = Arc::new(Biset::identity(&g));
        let domain = chain_of(&[&self.shriek.biset, &self.star.biset])?;
        Cell::from_formula(domain, single(&id), |t, out| {
            out.push(g.compose(self.shriek.morphism(t[0]), self.star.morphism(t[1])));
        })
    }
}

/// `fun: R^*(v) ∘ R^*(u) → R^*(uv)`, `[ζ, ξ] ↦ u(ζ)ξ`, for `v: K → H`,
/// `u: H → G`.
pub fn star_structure(v: &Realized, u: &Realized, uv: &Realized) -> Result<Cell> {
    let (fu, g) = (&u.functor, u.functor.target().clone());
    let domain = chain_of(&[&v.biset, &u.biset])?;
    Cell::from_formula(domain, single(&uv.biset), |t, out| {
        let k = v.object(t[0]);
        out.push(uv.element(k, g.compose(fu.mor(v.morphism(t[0])), u.morphism(t[1]))));
    })
}

/// Inverse of [`star_structure`], `ξ ↦ [id, ξ]`.
pub fn star_structure_inverse(v: &Realized, u: &Realized, uv: &Realized) -> Result<Cell> {
    let (fv, h) = (&v.functor, v.functor.target().clone());
    let codomain = chain_of(&[&v.biset, &u.biset])?;
    Cell::from_formula(single(&uv.biset), codomain, |t, out| {
        let k = uv.object(t[0]);
        let vk = fv.obj(k);
        out.push(v.element(k, h.id(vk)));
        out.push(u.element(vk, uv.morphism(t[0])));
    })
}

/// `fun: R_!(u) ∘ R_!(v) → R_!(uv)`, `[ξ, ζ] ↦ ξ u(ζ)`.
pub fn shriek_structure(u: &Realized, v: &Realized, uv: &Realized) -> Result<Cell> {
    let (fu, g) = (&u.functor, u.functor.target().clone());
    let domain = chain_of(&[&u.biset, &v.biset])?;
    Cell::from_formula(domain, single(&uv.biset), |t, out| {
        let k = v.object(t[1]);
        out.push(uv.element(k, g.compose(u.morphism(t[0]), fu.mor(v.morphism(t[1])))));
    })
}

/// Inverse of [`shriek_structure`], `ξ ↦ [ξ, id]`.
pub fn shriek_structure_inverse(u: &Realized, v: &Realized, uv: &Realized) -> Result<Cell> {
    let (fv, h) = (&v.functor, v.functor.target().clone());
    let codomain = chain_of(&[&u.biset, &v.biset])?;
    Cell::from_formula(single(&uv.biset), codomain, |t, out| {
        let k = uv.object(t[0]);
        let vk = fv.obj(k);
        out.push(u.element(vk, uv.morphism(t[0])));
        out.push(v.element(k, h.id(vk)));
    })
}

/// `R^*(α): R^*(u) → R^*(v)` for `α: u ⇒ v`, `ξ ↦ α_h ξ`.
pub fn star_two_cell(alpha: &NaturalIso, u: &Realized, v: &Realized) -> Result<Cell> {
    let g = alpha.source().target().clone();
    Cell::from_formula(single(&u.biset), single(&v.biset), |t, out| {
        let h = u.object(t[0]);
        out.push(v.element(h, g.compose(alpha.component(h), u.morphism(t[0]))));
    })
}

/// `R_!(α): R_!(v) → R_!(u)` for `α: u ⇒ v`, `ξ ↦ ξ α_h`.
pub fn shriek_two_cell(alpha: &NaturalIso, u: &Realized, v: &Realized) -> Result<Cell> {
    let g = alpha.source().target().clone();
    Cell::from_formula(single(&v.biset), single(&u.biset), |t, out| {
        let h = v.object(t[0]);
        out.push(u.element(h, g.compose(v.morphism(t[0]), alpha.component(h))));
    })
}

/// Both zig-zag composites of the adjunction, checked to be identities.
pub fn check_zigzag(u: &Functor) -> Result<()> {
    let adj = Adjunction::new(u);
    let (sh, st) = (&adj.shriek.biset, &adj.star.biset);
    let (unit, counit) = (adj.unit()?, adj.counit()?);

    let mut p = Path::new(single(sh));
    p.step(0, &right_unitor_inverse(sh)?)?;
    p.step(1, &unit)?;
    p.step(0, &counit)?;
    p.step(0, &left_unitor_cell(sh)?)?;
    if !p.finish().is_identity() {
        return Err(Error::Mismatch("zig-zag through R_! is not the identity".into()));
    }

    let mut p = Path::new(single(st));
    p.step(0, &left_unitor_inverse(st)?)?;
    p.step(0, &unit)?;
    p.step(1, &counit)?;
    p.step(0, &right_unitor_cell(st)?)?;
    if !p.finish().is_identity() {
        return Err(Error::Mismatch("zig-zag through R^* is not the identity".into()));
    }
    Ok(())
}

/// The Beck–Chevalley mate of an iso-comma square, built from units,
/// counits and structure isomorphisms, with the closed formula for
/// comparison.
#[derive(Clone, Debug)]
pub struct BeckChevalley {
    /// `R_!(q) ∘ R^*(p) → R^*(b) ∘ R_!(a)`.
    pub mate: Cell,
    /// `[τ, σ]_i ↦ [b(τ) γ_i a(σ), id]`.
    pub formula: BisetMorphism,
    pub shriek_q: Realized,
    pub star_p: Realized,
}

impl BeckChevalley {
    pub fn is_bijective(&self) -> bool {
        self.mate.is_bijective()
    }

    pub fn agrees_with_formula(&self) -> bool {
        self.mate.map == self.formula
    }
}

pub fn beck_chevalley(a: &Functor, b: &Functor) -> Result<BeckChevalley> {
    let comma = IsoComma::new(a, b)?;
    beck_chevalley_with(&comma, &Realized::covariant(a), &Realized::contravariant(b))
}

/// The mate for a given iso-comma square of `(a / b)`, reusing `R_!(a)` and
/// `R^*(b)` so that the result composes with other cells built on them.
pub fn beck_chevalley_with(comma: &IsoComma, shriek_a: &Realized, star_b: &Realized) -> Result<BeckChevalley> {
    let (a, b) = (&shriek_a.functor, &star_b.functor);
    let (p, q) = (&comma.p, &comma.q);
    let gamma = &comma.gamma;
    let shriek_q = Realized::covariant(q);
    let star_p = Realized::contravariant(p);
    let star_a = Realized::contravariant(a);
    let shriek_q_adj = Adjunction::from_parts(&shriek_q, &Realized::contravariant(q))?;
    let star_ap = Realized::contravariant(gamma.source());
    let star_bq = Realized::contravariant(gamma.target());
    let adj_a = Adjunction::from_parts(shriek_a, &star_a)?;

    let start = chain_of(&[&shriek_q.biset, &star_p.biset])?;
    let mut path = Path::new(start.clone());
    path.step(1, &right_unitor_inverse(&star_p.biset)?)?;
    path.step(2, &adj_a.unit()?)?;
    path.step(1, &star_structure(&star_p, &star_a, &star_ap)?)?;
    path.step(1, &star_two_cell(gamma, &star_ap, &star_bq)?)?;
    path.step(1, &star_structure_inverse(&shriek_q_adj.star, star_b, &star_bq)?)?;
    path.step(0, &shriek_q_adj.counit()?)?;
    path.step(0, &left_unitor_cell(&star_b.biset)?)?;
    let mate = path.finish();

    let g = a.target().clone();
    let formula = chain_map(&start, &mate.codomain, |t, out| {
        let (tau, sigma) = (t[0], t[1]);
        let i = shriek_q.object(tau);
        let (tau_m, sigma_m) = (shriek_q.morphism(tau), star_p.morphism(sigma));
        let t_obj = q.target().tgt(tau_m);
        let s_obj = p.target().src(sigma_m);
        let xi = g.compose_all(&[b.mor(tau_m), gamma.component(i), a.mor(sigma_m)]);
        out.push(star_b.element(t_obj, xi));
        out.push(shriek_a.element(s_obj, g.id(a.obj(s_obj))));
    })?;
    Ok(BeckChevalley {
        mate,
        formula,
        shriek_q,
        star_p,
    })
}

/// `R(s) = R_!(a) ∘ R^*(b)`.
#[derive(Clone, Debug)]
pub struct SpanRealization {
    pub span: Span,
    pub shriek: Realized,
    pub star: Realized,
    pub composite: Composite,
}

impl SpanRealization {
    pub fn biset(&self) -> &Biset {
        self.composite.biset()
    }
}

pub fn realize_span(s: &Span) -> Result<SpanRealization> {
    let shriek = Realized::covariant(&s.right);
    let star = Realized::contravariant(&s.left);
    let composite = chain_of(&[&shriek.biset, &star.biset])?;
    Ok(SpanRealization {
        span: s.clone(),
        shriek,
        star,
        composite,
    })
}

/// `R([f, β, α]): R(s) → R(s')` by pasting `R^*(β)`, `R_!(α)`, the
/// structure isomorphisms and the counit of `f`; also returns the closed
/// formula `[ξ, ζ]_s ↦ [ξ α_s, β_s ζ]_{f(s)}`.
pub fn realize_two_cell(cell: &SpanTwoCell, rs: &SpanRealization, rt: &SpanRealization) -> Result<(Cell, BisetMorphism)> {
    cell.check(&rs.span, &rt.span)?;
    let f = &cell.f;
    let star_f = Realized::contravariant(f);
    let shriek_f = Realized::covariant(f);
    let adj_f = Adjunction::from_parts(&shriek_f, &star_f)?;
    let star_bf = Realized::contravariant(cell.beta.target());
    let shriek_af = Realized::covariant(cell.alpha.source());

    let mut path = Path::new(rs.composite.clone());
    path.step(1, &star_two_cell(&cell.beta, &rs.star, &star_bf)?)?;
    path.step(1, &star_structure_inverse(&star_f, &rt.star, &star_bf)?)?;
    path.step(0, &shriek_two_cell(&cell.alpha, &shriek_af, &rs.shriek)?)?;
    path.step(0, &shriek_structure_inverse(&rt.shriek, &shriek_f, &shriek_af)?)?;
    path.step(1, &adj_f.counit()?)?;
    path.step(0, &right_unitor_cell(&rt.shriek.biset)?)?;
    let pasted = path.finish();

    let (h, g) = (rs.span.source().clone(), rs.span.target().clone());
    let formula = chain_map(&rs.composite, &pasted.codomain, |t, out| {
        let x = rs.shriek.object(t[0]);
        let fx = f.obj(x);
        out.push(rt.shriek.element(fx, g.compose(rs.shriek.morphism(t[0]), cell.alpha.component(x))));
        out.push(rt.star.element(fx, h.compose(cell.beta.component(x), rs.star.morphism(t[1]))));
    })?;
    Ok((pasted, formula))
}

/// `φ: R(s1 ∘ s2) → R(s1) ∘ R(s2)`, from the structure isomorphisms and the
/// Beck–Chevalley mate of the middle square.
#[derive(Clone, Debug)]
pub struct Compositor {
    pub composite: SpanComposite,
    pub realization: SpanRealization,
    /// Lands in `[R_!(a), R^*(b), R_!(c), R^*(d)]`.
    pub cell: Cell,
    /// `[ξ, ζ]_i ↦ [ξ, γ_i, id, ζ]`.
    pub formula: BisetMorphism,
}

pub fn compositor(r1: &SpanRealization, r2: &SpanRealization) -> Result<Compositor> {
    let composite = compose_spans(&r1.span, &r2.span)?;
    let realization = realize_span(&composite.span)?;
    let comma = &composite.comma;
    let bc = beck_chevalley_with(comma, &r2.shriek, &r1.star)?;
    let star_d = &r2.star;
    let shriek_a = &r1.shriek;

    let mut path = Path::new(realization.composite.clone());
    path.step(1, &star_structure_inverse(&bc.star_p, star_d, &realization.star)?)?;
    path.step(0, &shriek_structure_inverse(shriek_a, &bc.shriek_q, &realization.shriek)?)?;
    path.step(1, &bc.mate)?;
    let cell = path.finish();

    let h = r1.span.source().clone();
    let formula = chain_map(&realization.composite, &cell.codomain, |t, out| {
        let i = realization.shriek.object(t[0]);
        let (pt, qs) = (comma.p.obj(i), comma.q.obj(i));
        out.push(shriek_a.element(qs, realization.shriek.morphism(t[0])));
        out.push(r1.star.element(qs, comma.gamma.component(i)));
        out.push(r2.shriek.element(pt, h.id(r2.span.right.obj(pt))));
        out.push(star_d.element(pt, realization.star.morphism(t[1])));
    })?;
    Ok(Compositor {
        composite,
        realization,
        cell,
        formula,
    })
}

/// Associativity coherence for `s1, s2, s3`: the two ways from
/// `R((s1∘s2)∘s3)` to the flat six-fold chain agree, one of them passing
/// through `R` of the span associator.
pub fn check_associativity(r1: &SpanRealization, r2: &SpanRealization, r3: &SpanRealization) -> Result<()> {
    let phi12 = compositor(r1, r2)?;
    let phi23 = compositor(r2, r3)?;
    let phi12_3 = compositor(&phi12.realization, r3)?;
    let phi1_23 = compositor(r1, &phi23.realization)?;
    let (_, _, assoc) = associator(&r1.span, &r2.span, &r3.span)?;

    let mut left = Path::new(phi12_3.realization.composite.clone());
    left.step(0, &phi12_3.cell)?;
    left.step(0, &phi12.cell)?;
    let left = left.finish();

    let (r_assoc, _) = realize_two_cell(&assoc, &phi12_3.realization, &phi1_23.realization)?;
    let mut right = Path::new(phi12_3.realization.composite.clone());
    right.step(0, &r_assoc)?;
    right.step(0, &phi1_23.cell)?;
    right.step(2, &phi23.cell)?;
    let right = right.finish();
    if left.map != right.map {
        return Err(Error::Mismatch("associativity coherence fails".into()));
    }
    Ok(())
}

/// Unit coherence: `R(λ)` equals `φ` followed by the counit of the
/// identity and the left unitor, and likewise on the right.
pub fn check_unitors(r: &SpanRealization) -> Result<()> {
    let s = &r.span;
    let (lc, lam) = left_unitor(s)?;
    let id_g = realize_span(&Span::identity(s.target()))?;
    let phi = compositor(&id_g, r)?;
    debug_assert!(same_groupoid(&lc.span.apex, &phi.composite.span.apex));
    let (r_lam, _) = realize_two_cell(&lam, &phi.realization, r)?;
    let adj = Adjunction::from_parts(&id_g.shriek, &id_g.star)?;
    let mut path = Path::new(phi.realization.composite.clone());
    path.step(0, &phi.cell)?;
    path.step(0, &adj.counit()?)?;
    path.step(0, &left_unitor_cell(&r.shriek.biset)?)?;
    if path.finish().map != r_lam.map {
        return Err(Error::Mismatch("left unit coherence fails".into()));
    }

    let (_, rho) = right_unitor(s)?;
    let id_h = realize_span(&Span::identity(s.source()))?;
    let phi = compositor(r, &id_h)?;
    let (r_rho, _) = realize_two_cell(&rho, &phi.realization, r)?;
    let adj = Adjunction::from_parts(&id_h.shriek, &id_h.star)?;
    let mut path = Path::new(phi.realization.composite.clone());
    path.step(0, &phi.cell)?;
    path.step(2, &adj.counit()?)?;
    path.step(1, &right_unitor_cell(&r.star.biset)?)?;
    if path.finish().map != r_rho.map {
        return Err(Error::Mismatch("right unit coherence fails".into()));
    }
    Ok(())
}

/// Mate compatibility for `α: u ⇒ v`: `R^*(α)` is the mate of `R_!(α)` and
/// vice versa.
pub fn check_mates(alpha: &NaturalIso) -> Result<()> {
    let (u, v) = (alpha.source(), alpha.target());
    let au = Adjunction::new(u);
    let av = Adjunction::from_parts(&Realized::covariant(v), &Realized::contravariant(v))?;
    let star = star_two_cell(alpha, &au.star, &av.star)?;
    let shriek = shriek_two_cell(alpha, &au.shriek, &av.shriek)?;

    let mut p = Path::new(single(&au.star.biset));
    p.step(0, &left_unitor_inverse(&au.star.biset)?)?;
    p.step(0, &av.unit()?)?;
    p.step(1, &shriek)?;
    p.step(1, &au.counit()?)?;
    p.step(0, &right_unitor_cell(&av.star.biset)?)?;
    if p.finish().map != star.map {
        return Err(Error::Mismatch("R^*(α) is not the mate of R_!(α)".into()));
    }

    let mut p = Path::new(single(&av.shriek.biset));
    p.step(0, &right_unitor_inverse(&av.shriek.biset)?)?;
    p.step(1, &au.unit()?)?;
    p.step(1, &star)?;
    p.step(0, &av.counit()?)?;
    p.step(0, &left_unitor_cell(&au.shriek.biset)?)?;
    if p.finish().map != shriek.map {
        return Err(Error::Mismatch("R_!(α) is not the mate of R^*(α)".into()));
    }
    Ok(())
}

/// The mate of `fun_{R_!}: R_!(u) R_!(v) → R_!(uv)` is the inverse of
/// `fun_{R^*}`.
pub fn check_structure_mate(u: &Functor, v: &Functor) -> Result<()> {
    let uv = Functor::compose(u, v)?;
    let (au, av, auv) = (Adjunction::new(u), Adjunction::new(v), Adjunction::new(&uv));
    let mut p = Path::new(single(&auv.star.biset));
    p.step(0, &left_unitor_inverse(&auv.star.biset)?)?;
    p.step(0, &av.unit()?)?;
    // Insert Id_H between R^*(v) and R_!(v).
    p.step(1, &left_unitor_inverse(&av.shriek.biset)?)?;
    p.step(1, &au.unit()?)?;
    p.step(2, &shriek_structure(&au.shriek, &av.shriek, &auv.shriek)?)?;
    p.step(2, &auv.counit()?)?;
    p.step(1, &right_unitor_cell(&au.star.biset)?)?;
    let mate = p.finish();
    let inverse = star_structure_inverse(&av.star, &au.star, &auv.star)?;
    if mate.map != inverse.map {
        return Err(Error::Mismatch("mate of fun_{R_!} is not fun_{R^*}^{-1}".into()));
    }
    Ok(())
}

/// The counit of `R_!(id) ⊣ R^*(id)` agrees with the left unitor of the
/// identity biset under `R_!(id) ≅ Id ≅ R^*(id)`.
pub fn check_identity_counit(g: &GroupoidRef) -> Result<()> {
    let adj = Adjunction::new(&Functor::identity(g));
    let id = Arc::new(Biset::identity(g));
    let counit = adj.counit()?;
    let unitor = left_unitor_cell(&id)?;
    let ids = chain_of(&[&id, &id])?;
    let transport = chain_map(&counit.domain, &ids, |t, out| {
        out.extend([adj.shriek.morphism(t[0]), adj.star.morphism(t[1])]);
    })?;
    if !transport.is_bijective(ids.num_classes()) || transport.then(&unitor.map) != counit.map {
        return Err(Error::Mismatch("counit of the identity differs from the unitor".into()));
    }
    Ok(())
}

/// The span `H ←q S(U) →p G` of elements of a biset, with the evaluation
/// `R(S(U)) → U`, `[α, β]_x ↦ α·x·β`.
#[derive(Clone, Debug)]
pub struct ElementSpan {
    pub realization: SpanRealization,
    pub evaluation: BisetMorphism,
}

impl ElementSpan {
    pub fn span(&self) -> &Span {
        &self.realization.span
    }

    pub fn is_bijective(&self, u: &Biset) -> bool {
        self.evaluation.is_bijective(u.len())
    }
}

/// The groupoid of elements: a morphism `x → x'` is a pair `(β: h → h',
/// α: g → g')` with `x' = α·x·β⁻¹`, numbered `base[x] + out_pos(β) *
/// |out(g)| + out_pos(α)`.
pub fn element_groupoid(u: &Biset) -> Result<(GroupoidRef, Functor, Functor)> {
    let (h, g) = (u.source().clone(), u.target().clone());
    let mut base = Vec::with_capacity(u.len() + 1);
    let mut total = 0;
    for x in 0..u.len() {
        base.push(total);
        total += h.out(u.src(x)).len() * g.out(u.tgt(x)).len();
    }
    let index = |x: usize, b: usize, a: usize| base[x] + h.out_pos(b) * g.out(u.tgt(x)).len() + g.out_pos(a);
    let mut src = Vec::with_capacity(total);
    let mut tgt = Vec::with_capacity(total);
    let mut beta = Vec::with_capacity(total);
    let mut alpha = Vec::with_capacity(total);
    for x in 0..u.len() {
        for &b in h.out(u.src(x)) {
            for &a in g.out(u.tgt(x)) {
                src.push(x);
                tgt.push(u.act_right(u.act_left(a, x), h.inv(b)));
                beta.push(b);
                alpha.push(a);
            }
        }
    }
    let identity = (0..u.len()).map(|x| index(x, h.id(u.src(x)), g.id(u.tgt(x)))).collect();
    let inverse = (0..total).map(|m| index(tgt[m], h.inv(beta[m]), g.inv(alpha[m]))).collect();
    let apex = Groupoid::new(u.len(), src.clone(), tgt.clone(), identity, inverse, |m2, m1| {
        index(src[m1], h.compose(beta[m2], beta[m1]), g.compose(alpha[m2], alpha[m1]))
    })?;
    let apex = Arc::new(apex);
    let q = Functor::new(apex.clone(), h.clone(), (0..u.len()).map(|x| u.src(x)).collect(), beta)?;
    let p = Functor::new(apex.clone(), g.clone(), (0..u.len()).map(|x| u.tgt(x)).collect(), alpha)?;
    Ok((apex, q, p))
}

pub fn span_from_biset(u: &BisetRef) -> Result<ElementSpan> {
    let (_, q, p) = element_groupoid(u)?;
    let span = Span::new(q, p)?;
    let realization = realize_span(&span)?;
    let evaluation = chain_map(&realization.composite, &single(u), |t, out| {
        let x = realization.shriek.object(t[0]);
        let (a, b) = (realization.shriek.morphism(t[0]), realization.star.morphism(t[1]));
        out.push(u.act_left(a, u.act_right(x, b)));
    })?;
    Ok(ElementSpan {
        realization,
        evaluation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biset::bisets_isomorphic;
    use crate::functor::{all_natural_isos, equivalent, find_equivalence, shared};
    use crate::group::named_group;
    use crate::span::find_span_isomorphism;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    fn point() -> GroupoidRef {
        shared(Groupoid::point())
    }

    #[test]
    fn realized_functors() {
        let c2 = bg("C2");
        let r = Realized::covariant(&Functor::identity(&c2));
        assert!(bisets_isomorphic(&r.biset, &Biset::identity(&c2)).unwrap());
        let u = Functor::constant(&point(), &c2, 0);
        let r = Realized::covariant(&u);
        assert_eq!(r.biset.len(), 2);
        for e in 0..r.biset.len() {
            assert_eq!(r.element(r.object(e), r.morphism(e)), e);
        }
    }

    #[test]
    fn structure_isos_are_inverse_bijections() {
        let c2 = bg("C2");
        let s3 = bg("S3");
        let v = Functor::constant(&point(), &c2, 0);
        for u in Functor::all(&c2, &s3) {
            let uv = Functor::compose(&u, &v).unwrap();
            let (sv, su, suv) = (Realized::contravariant(&v), Realized::contravariant(&u), Realized::contravariant(&uv));
            let fwd = star_structure(&sv, &su, &suv).unwrap();
            let back = star_structure_inverse(&sv, &su, &suv).unwrap();
            assert!(fwd.is_bijective());
            assert!(fwd.map.then(&back.map).map.iter().enumerate().all(|(i, &j)| i == j));
            let (hv, hu, huv) = (Realized::covariant(&v), Realized::covariant(&u), Realized::covariant(&uv));
            let fwd = shriek_structure(&hu, &hv, &huv).unwrap();
            let back = shriek_structure_inverse(&hu, &hv, &huv).unwrap();
            assert!(fwd.is_bijective());
            assert!(back.map.then(&fwd.map).map.iter().enumerate().all(|(i, &j)| i == j));
        }
    }

    #[test]
    fn adjunction_examples() {
        let c2 = bg("C2");
        let u = Functor::constant(&point(), &c2, 0);
        let adj = Adjunction::new(&u);
        let unit = adj.unit().unwrap();
        assert_eq!(unit.codomain.num_classes(), 2);
        let r = unit.codomain.representative(unit.map.map[0]).to_vec();
        assert_eq!(adj.star.morphism(r[0]), c2.id(0));
        assert_eq!(adj.shriek.morphism(r[1]), c2.id(0));
        let down = Functor::constant(&c2, &point(), 0);
        let counit = Adjunction::new(&down).counit().unwrap();
        assert_eq!(counit.codomain.num_classes(), 1);
        for g in [point(), c2.clone(), bg("S3")] {
            check_zigzag(&Functor::identity(&g)).unwrap();
            check_identity_counit(&g).unwrap();
        }
        check_zigzag(&u).unwrap();
        check_zigzag(&Functor::constant(&bg("S3"), &point(), 0)).unwrap();
    }

    #[test]
    fn beck_chevalley_examples() {
        let c2 = bg("C2");
        let id = Functor::identity(&c2);
        let bc = beck_chevalley(&id, &id).unwrap();
        assert!(bc.is_bijective() && bc.agrees_with_formula());
        let u = Functor::constant(&point(), &c2, 0);
        let bc = beck_chevalley(&u, &u).unwrap();
        assert_eq!(bc.mate.domain.num_classes(), 2);
        assert!(bc.is_bijective() && bc.agrees_with_formula());
        let s3 = bg("S3");
        let a = Functor::constant(&point(), &s3, 0);
        for b in Functor::all(&c2, &s3) {
            let bc = beck_chevalley(&a, &b).unwrap();
            assert!(bc.is_bijective() && bc.agrees_with_formula());
        }
    }

    #[test]
    fn span_realizations() {
        let c2 = bg("C2");
        let one = point();
        let r = realize_span(&Span::identity(&c2)).unwrap();
        assert!(bisets_isomorphic(r.biset(), &Biset::identity(&c2)).unwrap());
        let t = Functor::constant(&c2, &one, 0);
        let r = realize_span(&Span::new(t.clone(), t).unwrap()).unwrap();
        assert_eq!(r.biset().len(), 1);
        let u = Functor::constant(&one, &c2, 0);
        let r = realize_span(&Span::new(u.clone(), u).unwrap()).unwrap();
        assert_eq!(r.biset().len(), 4);
        assert!(r.biset().is_transitive());
    }

    #[test]
    fn two_cells_realize_to_the_formula() {
        let c2 = bg("C2");
        let s = Span::identity(&c2);
        let rs = realize_span(&s).unwrap();
        let (cell, formula) = realize_two_cell(&SpanTwoCell::identity(&s), &rs, &rs).unwrap();
        assert!(cell.is_identity());
        assert_eq!(cell.map, formula);
        let idc = compose_spans(&s, &s).unwrap();
        let rt = realize_span(&idc.span).unwrap();
        let iso = find_span_isomorphism(&s, &idc.span).unwrap().unwrap();
        let (cell, formula) = realize_two_cell(&iso, &rs, &rt).unwrap();
        assert!(cell.is_bijective());
        assert_eq!(cell.map, formula);
    }

    #[test]
    fn compositor_and_coherence_small() {
        let c2 = bg("C2");
        let one = point();
        let t = Functor::constant(&c2, &one, 0);
        let s = Span::new(t.clone(), t).unwrap();
        let r = realize_span(&s).unwrap();
        let phi = compositor(&r, &r).unwrap();
        assert!(phi.cell.is_bijective());
        assert_eq!(phi.cell.map, phi.formula);
        assert_eq!(phi.cell.codomain.num_classes(), 1);
        check_unitors(&r).unwrap();
        check_associativity(&r, &r, &r).unwrap();
        let s3 = bg("S3");
        for a in Functor::all(&c2, &s3).into_iter().take(2) {
            let s1 = Span::new(Functor::identity(&c2), a.clone()).unwrap();
            let s2 = Span::new(Functor::constant(&one, &one, 0), Functor::constant(&one, &c2, 0)).unwrap();
            let (r1, r2) = (realize_span(&s1).unwrap(), realize_span(&s2).unwrap());
            let phi = compositor(&r1, &r2).unwrap();
            assert!(phi.cell.is_bijective());
            assert_eq!(phi.cell.map, phi.formula);
            check_unitors(&r1).unwrap();
            let s0 = Span::new(a.clone(), Functor::identity(&c2)).unwrap();
            check_associativity(&realize_span(&s0).unwrap(), &r1, &r2).unwrap();
        }
    }

    #[test]
    fn mates_for_conjugations() {
        let c2 = bg("C2");
        let s3 = bg("S3");
        let incl = Functor::all(&c2, &s3);
        for u in &incl {
            for v in &incl {
                for alpha in all_natural_isos(u, v).unwrap() {
                    check_mates(&alpha).unwrap();
                }
            }
        }
        let v = Functor::constant(&point(), &c2, 0);
        for u in &incl {
            check_structure_mate(u, &v).unwrap();
        }
    }

    #[test]
    fn element_span_round_trip() {
        let one = point();
        let id1 = Arc::new(Biset::identity(&one));
        let e = span_from_biset(&id1).unwrap();
        assert!(e.is_bijective(&id1));
        let c2 = bg("C2");
        let id = Arc::new(Biset::identity(&c2));
        let e = span_from_biset(&id).unwrap();
        assert_eq!((e.span().apex.num_objects(), e.span().apex.num_morphisms()), (2, 8));
        assert!(equivalent(&e.span().apex, &c2));
        assert!(e.is_bijective(&id));
        let regular = Arc::new(Biset::transitive(&one, &c2, 0, 0, &[]).unwrap());
        let e = span_from_biset(&regular).unwrap();
        assert!(find_equivalence(&e.span().apex, &one).is_some());
        assert!(e.is_bijective(&regular));
    }
}
