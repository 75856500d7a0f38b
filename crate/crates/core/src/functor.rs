//! Functors, natural isomorphisms and equivalences between finite groupoids.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};

#[derive(Clone)]
pub struct Functor {
    source: GroupoidRef,
    target: GroupoidRef,
    obj: Vec<usize>,
    mor: Vec<usize>,
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functor").field("obj", &self.obj).field("mor", &self.mor).finish()
    }
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.obj == other.obj
            && self.mor == other.mor
            && same_groupoid(&self.source, &other.source)
            && same_groupoid(&self.target, &other.target)
    }
}

impl Eq for Functor {}

impl Functor {
    /// Builds and exhaustively validates a functor.
    pub fn new(source: GroupoidRef, target: GroupoidRef, obj: Vec<usize>, mor: Vec<usize>) -> Result<Self> {
        let f = Functor::new_unchecked(source, target, obj, mor);
        f.check()?;
        Ok(f)
    }

    pub(crate) fn new_unchecked(source: GroupoidRef, target: GroupoidRef, obj: Vec<usize>, mor: Vec<usize>) -> Self {
        Functor {
            source,
            target,
            obj,
            mor,
        }
    }

    /// Checks preservation of endpoints, identities and composition.
    pub fn check(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        let bad = |msg: String| Err(Error::InvalidFunctor(msg));
        if self.obj.len() != s.num_objects() || self.mor.len() != s.num_morphisms() {
            return bad("object or morphism map has the wrong length".into());
        }
        if self.obj.iter().any(|&y| y >= t.num_objects()) || self.mor.iter().any(|&g| g >= t.num_morphisms()) {
            return bad("image out of range".into());
        }
        for f in 0..s.num_morphisms() {
            let g = self.mor[f];
            if t.src(g) != self.obj[s.src(f)] || t.tgt(g) != self.obj[s.tgt(f)] {
                return bad(format!("morphism {f} is not sent between the images of its endpoints"));
            }
        }
        for x in 0..s.num_objects() {
            if self.mor[s.id(x)] != t.id(self.obj[x]) {
                return bad(format!("identity of object {x} is not preserved"));
            }
        }
        for f in 0..s.num_morphisms() {
            for &g in s.out(s.tgt(f)) {
                if self.mor[s.compose(g, f)] != t.compose(self.mor[g], self.mor[f]) {
                    return bad(format!("composite of {g} after {f} is not preserved"));
                }
            }
        }
        Ok(())
    }

    pub fn identity(g: &GroupoidRef) -> Self {
        Functor::new_unchecked(
            g.clone(),
            g.clone(),
            (0..g.num_objects()).collect(),
            (0..g.num_morphisms()).collect(),
        )
    }

    /// The functor sending everything to the identity of `object`.
    pub fn constant(source: &GroupoidRef, target: &GroupoidRef, object: usize) -> Self {
        Functor::new_unchecked(
            source.clone(),
            target.clone(),
            vec![object; source.num_objects()],
            vec![target.id(object); source.num_morphisms()],
        )
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Functor, inner: &Functor) -> Result<Self> {
        if !same_groupoid(&inner.target, &outer.source) {
            return Err(Error::Mismatch("functors are not composable".into()));
        }
        Ok(Functor::new_unchecked(
            inner.source.clone(),
            outer.target.clone(),
            inner.obj.iter().map(|&x| outer.obj[x]).collect(),
            inner.mor.iter().map(|&f| outer.mor[f]).collect(),
        ))
    }

    /// `f × g` between product groupoids numbered as in [`Groupoid::product`].
    pub fn product(f: &Functor, g: &Functor) -> Functor {
        let source = Arc::new(Groupoid::product(&f.source, &g.source));
        let target = Arc::new(Groupoid::product(&f.target, &g.target));
        let (no, mo) = (g.target.num_objects(), g.target.num_morphisms());
        let obj = (0..source.num_objects())
            .map(|x| f.obj[x / g.source.num_objects()] * no + g.obj[x % g.source.num_objects()])
            .collect();
        let mor = (0..source.num_morphisms())
            .map(|m| f.mor[m / g.source.num_morphisms()] * mo + g.mor[m % g.source.num_morphisms()])
            .collect();
        Functor::new_unchecked(source, target, obj, mor)
    }

    /// Builds a functor from skeletal data. For each source component `c`
    /// (in order), `base_image[c]` is the image of its basepoint, `rho[c]`
    /// maps the basepoint's vertex group (indexed as in
    /// [`Groupoid::vertex_group`]) to endomorphisms of that image, and
    /// `links[x]` is a morphism from the image of `x`'s basepoint to the
    /// image of `x` (ignored at basepoints).
    pub fn from_skeleton(
        source: &GroupoidRef,
        target: &GroupoidRef,
        base_image: &[usize],
        rho: &[Vec<usize>],
        links: &[usize],
    ) -> Self {
        let s = &**source;
        let t = &**target;
        let mut link = vec![0; s.num_objects()];
        let mut obj = vec![0; s.num_objects()];
        for (c, members) in s.components().iter().enumerate() {
            let b = members[0];
            for &x in members {
                link[x] = if x == b { t.id(base_image[c]) } else { links[x] };
                obj[x] = t.tgt(link[x]);
            }
        }
        let mor = (0..s.num_morphisms())
            .map(|f| {
                let (x, y) = (s.src(f), s.tgt(f));
                let c = s.component_of(x);
                let b = s.basepoint(c);
                let k = s.to_base(f);
                let idx = s.hom_index(k);
                debug_assert_eq!(s.hom(b, b)[idx], k);
                t.compose_all(&[link[y], rho[c][idx], t.inv(link[x])])
            })
            .collect();
        Functor::new_unchecked(source.clone(), target.clone(), obj, mor)
    }

    /// Every functor `source → target`, enumerated through skeletal data.
    pub fn all(source: &GroupoidRef, target: &GroupoidRef) -> Vec<Functor> {
        let s = &**source;
        let t = &**target;
        // Per component: list of (base image, rho, links for members).
        let mut per_component: Vec<Vec<(usize, Vec<usize>, Vec<(usize, usize)>)>> = Vec::new();
        for members in s.components() {
            let b = members[0];
            let (k, _) = s.vertex_group(b);
            let mut options = Vec::new();
            for y in 0..t.num_objects() {
                let (ty, ty_elems) = t.vertex_group(y);
                let others: Vec<usize> = members.iter().copied().filter(|&x| x != b).collect();
                for hom in k.homomorphisms(&ty) {
                    let rho: Vec<usize> = hom.iter().map(|&i| ty_elems[i]).collect();
                    // Every assignment of a morphism out of y to each other member.
                    let outs = t.out(y);
                    let mut choice = vec![0usize; others.len()];
                    loop {
                        let links = others.iter().zip(&choice).map(|(&x, &c)| (x, outs[c])).collect();
                        options.push((y, rho.clone(), links));
                        let mut i = 0;
                        while i < choice.len() {
                            choice[i] += 1;
                            if choice[i] < outs.len() {
                                break;
                            }
                            choice[i] = 0;
                            i += 1;
                        }
                        if i == choice.len() {
                            break;
                        }
                    }
                }
            }
            per_component.push(options);
        }
        let mut out = Vec::new();
        if per_component.iter().any(Vec::is_empty) {
            return out;
        }
        let mut choice = vec![0usize; per_component.len()];
        loop {
            let mut base_image = Vec::new();
            let mut rho = Vec::new();
            let mut links = vec![0; s.num_objects()];
            for (c, &i) in choice.iter().enumerate() {
                let (y, r, l) = &per_component[c][i];
                base_image.push(*y);
                rho.push(r.clone());
                for &(x, f) in l {
                    links[x] = f;
                }
            }
            out.push(Functor::from_skeleton(source, target, &base_image, &rho, &links));
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < per_component[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
        out
    }

    /// A uniformly chosen skeletal datum; not uniform over functors.
    pub fn random(source: &GroupoidRef, target: &GroupoidRef, rng: &mut impl Rng) -> Option<Functor> {
        let s = &**source;
        let t = &**target;
        if t.num_objects() == 0 && s.num_objects() > 0 {
            return None;
        }
        let mut base_image = Vec::new();
        let mut rho = Vec::new();
        let mut links = vec![0; s.num_objects()];
        for members in s.components() {
            let (k, _) = s.vertex_group(members[0]);
            let y = rng.gen_range(0..t.num_objects());
            let (ty, ty_elems) = t.vertex_group(y);
            let homs = k.homomorphisms(&ty);
            let hom = &homs[rng.gen_range(0..homs.len())];
            base_image.push(y);
            rho.push(hom.iter().map(|&i| ty_elems[i]).collect());
            for &x in &members[1..] {
                let outs = t.out(y);
                links[x] = outs[rng.gen_range(0..outs.len())];
            }
        }
        Some(Functor::from_skeleton(source, target, &base_image, &rho, &links))
    }

    pub fn source(&self) -> &GroupoidRef {
        &self.source
    }

    pub fn target(&self) -> &GroupoidRef {
        &self.target
    }

    #[inline]
    pub fn obj(&self, x: usize) -> usize {
        self.obj[x]
    }

    #[inline]
    pub fn mor(&self, f: usize) -> usize {
        self.mor[f]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.obj
    }

    pub fn morphism_map(&self) -> &[usize] {
        &self.mor
    }

    /// The induced homomorphism from the vertex group at the basepoint of
    /// component `c` to the vertex group at the basepoint of the target
    /// component, both indexed as in [`Groupoid::vertex_group`].
    pub fn skeletal_hom(&self, c: usize) -> Vec<usize> {
        let s = &*self.source;
        let t = &*self.target;
        let b = s.basepoint(c);
        let y = self.obj[b];
        let ty = t.tree(y);
        s.hom(b, b)
            .iter()
            .map(|&k| t.hom_index(t.compose_all(&[t.inv(ty), self.mor[k], ty])))
            .collect()
    }
}

/// A natural isomorphism between parallel functors: `component(x)` is a
/// morphism `source(x) → target(x)`.
#[derive(Clone, Debug)]
pub struct NaturalIso {
    source: Functor,
    target: Functor,
    components: Vec<usize>,
}

impl NaturalIso {
    pub fn new(source: Functor, target: Functor, components: Vec<usize>) -> Result<Self> {
        let n = NaturalIso {
            source,
            target,
            components,
        };
        n.check()?;
        Ok(n)
    }

    pub(crate) fn new_unchecked(source: Functor, target: Functor, components: Vec<usize>) -> Self {
        NaturalIso {
            source,
            target,
            components,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNaturalIso(msg));
        let (f1, f2) = (&self.source, &self.target);
        if !same_groupoid(&f1.source, &f2.source) || !same_groupoid(&f1.target, &f2.target) {
            return bad("functors are not parallel".into());
        }
        let (s, t) = (&*f1.source, &*f1.target);
        if self.components.len() != s.num_objects() {
            return bad("wrong number of components".into());
        }
        for x in 0..s.num_objects() {
            let a = self.components[x];
            if a >= t.num_morphisms() || t.src(a) != f1.obj[x] || t.tgt(a) != f2.obj[x] {
                return bad(format!("component at {x} has the wrong endpoints"));
            }
            // Invertible in a groupoid; still confirm the inverse table agrees.
            if t.compose(t.inv(a), a) != t.id(f1.obj[x]) {
                return bad(format!("component at {x} is not invertible"));
            }
        }
        for f in 0..s.num_morphisms() {
            let (x, y) = (s.src(f), s.tgt(f));
            if t.compose(self.components[y], f1.mor[f]) != t.compose(f2.mor[f], self.components[x]) {
                return bad(format!("naturality square at morphism {f} does not commute"));
            }
        }
        Ok(())
    }

    pub fn identity(f: &Functor) -> Self {
        let t = &*f.target;
        let components = f.obj.iter().map(|&y| t.id(y)).collect();
        NaturalIso::new_unchecked(f.clone(), f.clone(), components)
    }

    pub fn source(&self) -> &Functor {
        &self.source
    }

    pub fn target(&self) -> &Functor {
        &self.target
    }

    #[inline]
    pub fn component(&self, x: usize) -> usize {
        self.components[x]
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn inverse(&self) -> Self {
        let t = &*self.source.target;
        NaturalIso::new_unchecked(
            self.target.clone(),
            self.source.clone(),
            self.components.iter().map(|&a| t.inv(a)).collect(),
        )
    }

    /// Vertical composite `second · first`.
    pub fn then(&self, second: &NaturalIso) -> Result<Self> {
        if self.target != second.source {
            return Err(Error::Mismatch("natural isomorphisms are not composable".into()));
        }
        let t = &*self.source.target;
        Ok(NaturalIso::new_unchecked(
            self.source.clone(),
            second.target.clone(),
            self.components
                .iter()
                .zip(&second.components)
                .map(|(&a, &b)| t.compose(b, a))
                .collect(),
        ))
    }

    /// Whiskering `self ∘ h`: components `self(h(x))`.
    pub fn precompose(&self, h: &Functor) -> Result<Self> {
        Ok(NaturalIso::new_unchecked(
            Functor::compose(&self.source, h)?,
            Functor::compose(&self.target, h)?,
            h.obj.iter().map(|&y| self.components[y]).collect(),
        ))
    }

    /// Whiskering `k ∘ self`: components `k(self(x))`.
    pub fn postcompose(&self, k: &Functor) -> Result<Self> {
        Ok(NaturalIso::new_unchecked(
            Functor::compose(k, &self.source)?,
            Functor::compose(k, &self.target)?,
            self.components.iter().map(|&a| k.mor[a]).collect(),
        ))
    }
}

fn parallel(f1: &Functor, f2: &Functor) -> Result<()> {
    if same_groupoid(&f1.source, &f2.source) && same_groupoid(&f1.target, &f2.target) {
        Ok(())
    } else {
        Err(Error::Mismatch("functors are not parallel".into()))
    }
}

/// Candidate basepoint components per source component that extend to a
/// natural isomorphism `f1 ⇒ f2`.
fn natural_iso_choices(f1: &Functor, f2: &Functor) -> Vec<Vec<Vec<usize>>> {
    let (s, t) = (&*f1.source, &*f1.target);
    s.components()
        .iter()
        .map(|members| {
            let b = members[0];
            let mut valid = Vec::new();
            for &theta in t.hom(f1.obj[b], f2.obj[b]) {
                let mut comps = Vec::with_capacity(members.len());
                for &x in members {
                    let tx = s.tree(x);
                    comps.push(t.compose_all(&[f2.mor[tx], theta, t.inv(f1.mor[tx])]));
                }
                let natural = members.iter().all(|&x| {
                    s.out(x).iter().all(|&f| {
                        let y = s.tgt(f);
                        let iy = members.binary_search(&y).expect("same component");
                        let ix = members.binary_search(&x).expect("member");
                        t.compose(comps[iy], f1.mor[f]) == t.compose(f2.mor[f], comps[ix])
                    })
                });
                if natural {
                    valid.push(comps);
                }
            }
            valid
        })
        .collect()
}

fn assemble(f1: &Functor, f2: &Functor, choices: &[Vec<Vec<usize>>], pick: &[usize]) -> NaturalIso {
    let s = &*f1.source;
    let mut components = vec![0; s.num_objects()];
    for (c, members) in s.components().iter().enumerate() {
        for (i, &x) in members.iter().enumerate() {
            components[x] = choices[c][pick[c]][i];
        }
    }
    NaturalIso::new_unchecked(f1.clone(), f2.clone(), components)
}

/// Searches for a natural isomorphism `f1 ⇒ f2`, component by component.
pub fn find_natural_iso(f1: &Functor, f2: &Functor) -> Result<Option<NaturalIso>> {
    parallel(f1, f2)?;
    let choices = natural_iso_choices(f1, f2);
    if choices.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    Ok(Some(assemble(f1, f2, &choices, &vec![0; choices.len()])))
}

/// Every natural isomorphism `f1 ⇒ f2`.
pub fn all_natural_isos(f1: &Functor, f2: &Functor) -> Result<Vec<NaturalIso>> {
    parallel(f1, f2)?;
    let choices = natural_iso_choices(f1, f2);
    let mut out = Vec::new();
    if choices.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    let mut pick = vec![0usize; choices.len()];
    loop {
        out.push(assemble(f1, f2, &choices, &pick));
        let mut i = 0;
        while i < pick.len() {
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            break;
        }
    }
    Ok(out)
}

/// An adjoint equivalence datum between two groupoids.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub forward: Functor,
    pub backward: Functor,
    /// `Id ⇒ backward ∘ forward`.
    pub unit: NaturalIso,
    /// `forward ∘ backward ⇒ Id`.
    pub counit: NaturalIso,
}

/// Matches components with isomorphic vertex groups and returns the
/// isomorphisms `K_c → K'_{c'}` as element maps.
fn match_components(g1: &Groupoid, g2: &Groupoid) -> Option<Vec<(usize, Vec<usize>)>> {
    if g1.num_components() != g2.num_components() {
        return None;
    }
    let groups2: Vec<FiniteGroup> = g2.components().iter().map(|c| g2.vertex_group(c[0]).0).collect();
    let mut used = vec![false; groups2.len()];
    let mut out = Vec::new();
    for members in g1.components() {
        let (k, _) = g1.vertex_group(members[0]);
        let mut found = None;
        for (j, k2) in groups2.iter().enumerate() {
            if used[j] || k2.order() != k.order() {
                continue;
            }
            if let Some(iso) = k.isomorphism(k2) {
                found = Some((j, iso));
                break;
            }
        }
        let (j, iso) = found?;
        used[j] = true;
        out.push((j, iso));
    }
    Some(out)
}

/// Decides whether two groupoids are equivalent and, if so, returns a
/// skeletal equivalence. Equal groupoids get the identity equivalence.
pub fn find_equivalence(g1: &GroupoidRef, g2: &GroupoidRef) -> Option<Equivalence> {
    if same_groupoid(g1, g2) {
        let id = Functor::identity(g1);
        return Some(Equivalence {
            forward: id.clone(),
            backward: id.clone(),
            unit: NaturalIso::identity(&id),
            counit: NaturalIso::identity(&id),
        });
    }
    let matching = match_components(g1, g2)?;
    let mut inverse_matching = vec![(0usize, Vec::new()); matching.len()];
    for (c, (j, iso)) in matching.iter().enumerate() {
        let mut inv = vec![0; iso.len()];
        for (a, &b) in iso.iter().enumerate() {
            inv[b] = a;
        }
        inverse_matching[*j] = (c, inv);
    }
    let skeletal = |from: &GroupoidRef, to: &GroupoidRef, m: &[(usize, Vec<usize>)]| {
        let base_image: Vec<usize> = m.iter().map(|(j, _)| to.basepoint(*j)).collect();
        let rho: Vec<Vec<usize>> = m
            .iter()
            .map(|(j, iso)| {
                let b = to.basepoint(*j);
                let elems = to.hom(b, b);
                iso.iter().map(|&i| elems[i]).collect()
            })
            .collect();
        // Every object goes to the basepoint, linked by the identity.
        let links: Vec<usize> = (0..from.num_objects())
            .map(|x| to.id(base_image[from.component_of(x)]))
            .collect();
        Functor::from_skeleton(from, to, &base_image, &rho, &links)
    };
    let forward = skeletal(g1, g2, &matching);
    let backward = skeletal(g2, g1, &inverse_matching);
    let gf = Functor::compose(&backward, &forward).ok()?;
    let fg = Functor::compose(&forward, &backward).ok()?;
    let unit = NaturalIso::new_unchecked(
        Functor::identity(g1),
        gf,
        (0..g1.num_objects()).map(|x| g1.inv(g1.tree(x))).collect(),
    );
    let counit = NaturalIso::new_unchecked(fg, Functor::identity(g2), (0..g2.num_objects()).map(|x| g2.tree(x)).collect());
    debug_assert!(unit.check().is_ok() && counit.check().is_ok());
    Some(Equivalence {
        forward,
        backward,
        unit,
        counit,
    })
}

pub fn equivalent(g1: &GroupoidRef, g2: &GroupoidRef) -> bool {
    same_groupoid(g1, g2) || match_components(g1, g2).is_some()
}

/// Convenience: wrap a groupoid in a shared handle.
pub fn shared(g: Groupoid) -> GroupoidRef {
    Arc::new(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named_group;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    #[test]
    fn all_functors_are_valid_and_counted() {
        let s3 = bg("S3");
        let v4 = bg("V4");
        let fs = Functor::all(&v4, &s3);
        assert_eq!(fs.len(), 10);
        for f in &fs {
            f.check().unwrap();
        }
        let two = shared(Groupoid::discrete(2));
        // Functors 1⊔1 → BC2⊔1: each object picks one of two objects.
        let c2_1 = shared(Groupoid::disjoint_union(&Groupoid::from_group(&named_group("C2").unwrap()), &Groupoid::point()));
        assert_eq!(Functor::all(&two, &c2_1).len(), 4);
        assert_eq!(Functor::all(&c2_1, &two).len(), 4);
    }

    #[test]
    fn natural_iso_between_conjugate_inclusions() {
        let s3 = bg("S3");
        let c2 = bg("C2");
        let incls: Vec<Functor> = Functor::all(&c2, &s3)
            .into_iter()
            .filter(|f| f.mor(1) != s3.id(0))
            .collect();
        assert_eq!(incls.len(), 3);
        for a in &incls {
            for b in &incls {
                let n = find_natural_iso(a, b).unwrap().expect("conjugate inclusions");
                n.check().unwrap();
            }
        }
        let trivial = Functor::constant(&c2, &s3, 0);
        assert!(find_natural_iso(&trivial, &incls[0]).unwrap().is_none());
        let id = Functor::identity(&s3);
        let n = find_natural_iso(&id, &id).unwrap().unwrap();
        assert_eq!(n.component(0), s3.id(0));
        // Natural automorphisms of id_BS3 are the central elements.
        assert_eq!(all_natural_isos(&id, &id).unwrap().len(), 1);
    }

    #[test]
    fn equivalences() {
        let c2 = bg("C2");
        let c3 = bg("C3");
        assert!(find_equivalence(&c2, &c3).is_none());
        let two = shared(Groupoid::discrete(2));
        let one = shared(Groupoid::point());
        assert!(find_equivalence(&two, &one).is_none());
        let e = find_equivalence(&c2, &c2).unwrap();
        assert_eq!(e.forward, Functor::identity(&c2));
        let u = shared(Groupoid::product(&Groupoid::discrete(1), &Groupoid::from_group(&named_group("C2").unwrap())));
        let e = find_equivalence(&u, &c2).unwrap();
        e.unit.check().unwrap();
        e.counit.check().unwrap();
    }
}
