//! Bisets between finite groupoids and their morphisms.
//!
//! A biset `U: H → G` is a functor `H^op × G → set`. It is stored as one
//! flat element set; element `x` lies over `(src(x), tgt(x)) ∈ H × G`. The
//! left action of `α: g → g'` and the right action of `β: h' → h` are kept as
//! tables indexed by `out_pos(α)` and `in_pos(β)`. `U(β, α)(x) = α·x·β`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};

#[derive(Clone)]
pub struct Biset {
    source: GroupoidRef,
    target: GroupoidRef,
    src: Vec<usize>,
    tgt: Vec<usize>,
    left: Vec<Vec<usize>>,
    right: Vec<Vec<usize>>,
    fibers: Vec<Vec<usize>>,
    by_target: Vec<Vec<usize>>,
    target_rank: Vec<usize>,
}

impl fmt::Debug for Biset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Biset({} elements)", self.len())
    }
}

pub type BisetRef = Arc<Biset>;

impl Biset {
    /// Builds a biset from element endpoints and action closures
    /// `left(α, x) = α·x`, `right(x, β) = x·β`. Endpoints of the results are
    /// validated; functoriality is checked by [`Biset::check_laws`].
    pub fn from_actions(
        source: GroupoidRef,
        target: GroupoidRef,
        src: Vec<usize>,
        tgt: Vec<usize>,
        left: impl Fn(usize, usize) -> usize,
        right: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = src.len();
        let (h, g) = (&*source, &*target);
        let bad = |msg: String| Err(Error::InvalidBiset(msg));
        if tgt.len() != n {
            return bad("endpoint lists differ in length".into());
        }
        if src.iter().any(|&x| x >= h.num_objects()) || tgt.iter().any(|&y| y >= g.num_objects()) {
            return bad("element endpoint out of range".into());
        }
        let mut left_table = Vec::with_capacity(n);
        let mut right_table = Vec::with_capacity(n);
        for x in 0..n {
            let row: Vec<usize> = g.out(tgt[x]).iter().map(|&a| left(a, x)).collect();
            for (&a, &y) in g.out(tgt[x]).iter().zip(&row) {
                if y >= n || src[y] != src[x] || tgt[y] != g.tgt(a) {
                    return bad(format!("left action of {a} on {x} lands in the wrong fiber"));
                }
            }
            left_table.push(row);
            let row: Vec<usize> = h.incoming(src[x]).iter().map(|&b| right(x, b)).collect();
            for (&b, &y) in h.incoming(src[x]).iter().zip(&row) {
                if y >= n || src[y] != h.src(b) || tgt[y] != tgt[x] {
                    return bad(format!("right action of {b} on {x} lands in the wrong fiber"));
                }
            }
            right_table.push(row);
        }
        let mut fibers = vec![Vec::new(); h.num_objects() * g.num_objects()];
        let mut by_target = vec![Vec::new(); g.num_objects()];
        let mut target_rank = vec![0; n];
        for x in 0..n {
            fibers[src[x] * g.num_objects() + tgt[x]].push(x);
            target_rank[x] = by_target[tgt[x]].len();
            by_target[tgt[x]].push(x);
        }
        Ok(Biset {
            source,
            target,
            src,
            tgt,
            left: left_table,
            right: right_table,
            fibers,
            by_target,
            target_rank,
        })
    }

    /// Exhaustive functoriality check: identities act trivially, composites
    /// act as iterated actions, and the two actions commute.
    pub fn check_laws(&self) -> Result<()> {
        let (h, g) = (&*self.source, &*self.target);
        let bad = |msg: String| Err(Error::InvalidBiset(msg));
        for x in 0..self.len() {
            let (hx, gx) = (self.src[x], self.tgt[x]);
            if self.act_left(g.id(gx), x) != x || self.act_right(x, h.id(hx)) != x {
                return bad(format!("identities do not act trivially on {x}"));
            }
            for &a in g.out(gx) {
                let ax = self.act_left(a, x);
                for &a2 in g.out(g.tgt(a)) {
                    if self.act_left(a2, ax) != self.act_left(g.compose(a2, a), x) {
                        return bad(format!("left action is not functorial at {x}"));
                    }
                }
                for &b in h.incoming(hx) {
                    if self.act_right(ax, b) != self.act_left(a, self.act_right(x, b)) {
                        return bad(format!("actions do not commute at {x}"));
                    }
                }
            }
            for &b in h.incoming(hx) {
                let xb = self.act_right(x, b);
                for &b2 in h.incoming(h.src(b)) {
                    if self.act_right(xb, b2) != self.act_right(x, h.compose(b, b2)) {
                        return bad(format!("right action is not functorial at {x}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &GroupoidRef {
        &self.source
    }

    pub fn target(&self) -> &GroupoidRef {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.src.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    #[inline]
    pub fn src(&self, x: usize) -> usize {
        self.src[x]
    }

    #[inline]
    pub fn tgt(&self, x: usize) -> usize {
        self.tgt[x]
    }

    /// `α·x`.
    #[inline]
    pub fn act_left(&self, a: usize, x: usize) -> usize {
        debug_assert_eq!(self.target.src(a), self.tgt[x]);
        self.left[x][self.target.out_pos(a)]
    }

    /// `x·β`.
    #[inline]
    pub fn act_right(&self, x: usize, b: usize) -> usize {
        debug_assert_eq!(self.source.tgt(b), self.src[x]);
        self.right[x][self.source.in_pos(b)]
    }

    /// `U(β, α)(x) = α·x·β`.
    pub fn act(&self, b: usize, a: usize, x: usize) -> usize {
        self.act_left(a, self.act_right(x, b))
    }

    /// Elements over `(h, g)`.
    pub fn fiber(&self, h: usize, g: usize) -> &[usize] {
        &self.fibers[h * self.target.num_objects() + g]
    }

    /// Elements with target `g`, in increasing order.
    pub fn with_target(&self, g: usize) -> &[usize] {
        &self.by_target[g]
    }

    /// Position of `x` in [`Biset::with_target`].
    pub fn target_rank(&self, x: usize) -> usize {
        self.target_rank[x]
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    pub fn same_endpoints(&self, other: &Biset) -> bool {
        same_groupoid(&self.source, &other.source) && same_groupoid(&self.target, &other.target)
    }

    /// The hom biset `Id_G = G(-, -)`; elements are the morphisms of `G`.
    pub fn identity(g: &GroupoidRef) -> Self {
        let gr = &**g;
        let m = gr.num_morphisms();
        Biset::from_actions(
            g.clone(),
            g.clone(),
            (0..m).map(|f| gr.src(f)).collect(),
            (0..m).map(|f| gr.tgt(f)).collect(),
            |a, f| gr.compose(a, f),
            |f, b| gr.compose(f, b),
        )
        .expect("identity biset")
    }

    pub fn empty(source: &GroupoidRef, target: &GroupoidRef) -> Self {
        Biset::from_actions(source.clone(), target.clone(), vec![], vec![], |_, _| 0, |_, _| 0).expect("empty biset")
    }

    /// `R_!(u) = G(u-, -): H → G`. Element `(h, ξ: u(h) → g)` is numbered
    /// `offset[h] + out_pos(ξ)`.
    pub fn covariant(u: &Functor) -> Self {
        let (h, g) = (&**u.source(), &**u.target());
        let mut offset = Vec::with_capacity(h.num_objects());
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut xi = Vec::new();
        for x in 0..h.num_objects() {
            offset.push(src.len());
            for &f in g.out(u.obj(x)) {
                src.push(x);
                tgt.push(g.tgt(f));
                xi.push(f);
            }
        }
        let index = |x: usize, f: usize| offset[x] + g.out_pos(f);
        Biset::from_actions(
            u.source().clone(),
            u.target().clone(),
            src.clone(),
            tgt,
            |a, e| index(src[e], g.compose(a, xi[e])),
            |e, b| index(h.src(b), g.compose(xi[e], u.mor(b))),
        )
        .expect("covariant realization")
    }

    /// `R^*(u) = G(-, u-): G → H`. Element `(h, ξ: g → u(h))` is numbered
    /// `offset[h] + in_pos(ξ)`.
    pub fn contravariant(u: &Functor) -> Self {
        let (h, g) = (&**u.source(), &**u.target());
        let mut offset = Vec::with_capacity(h.num_objects());
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut xi = Vec::new();
        for x in 0..h.num_objects() {
            offset.push(src.len());
            for &f in g.incoming(u.obj(x)) {
                src.push(g.src(f));
                tgt.push(x);
                xi.push(f);
            }
        }
        let index = |x: usize, f: usize| offset[x] + g.in_pos(f);
        Biset::from_actions(
            u.target().clone(),
            u.source().clone(),
            src,
            tgt.clone(),
            |a, e| index(h.tgt(a), g.compose(u.mor(a), xi[e])),
            |e, b| index(tgt[e], g.compose(xi[e], b)),
        )
        .expect("contravariant realization")
    }

    /// Elements of `self` followed by those of `other`.
    pub fn disjoint_union(&self, other: &Biset) -> Result<Self> {
        if !self.same_endpoints(other) {
            return Err(Error::Mismatch("disjoint union of bisets with different endpoints".into()));
        }
        let n = self.len();
        Biset::from_actions(
            self.source.clone(),
            self.target.clone(),
            self.src.iter().chain(&other.src).copied().collect(),
            self.tgt.iter().chain(&other.tgt).copied().collect(),
            |a, x| if x < n { self.act_left(a, x) } else { other.act_left(a, x - n) + n },
            |x, b| if x < n { self.act_right(x, b) } else { other.act_right(x - n, b) + n },
        )
    }

    /// `U × U'`: element `(x, x')` is `x * |U'| + x'` over the product
    /// groupoids numbered as in [`Groupoid::product`].
    pub fn tensor(&self, other: &Biset) -> Self {
        let source = Arc::new(Groupoid::product(&self.source, &other.source));
        let target = Arc::new(Groupoid::product(&self.target, &other.target));
        let n2 = other.len();
        let (nh2, ng2) = (other.source.num_objects(), other.target.num_objects());
        let (mh2, mg2) = (other.source.num_morphisms(), other.target.num_morphisms());
        let mut src = Vec::with_capacity(self.len() * n2);
        let mut tgt = Vec::with_capacity(self.len() * n2);
        for x in 0..self.len() {
            for y in 0..n2 {
                src.push(self.src[x] * nh2 + other.src[y]);
                tgt.push(self.tgt[x] * ng2 + other.tgt[y]);
            }
        }
        Biset::from_actions(
            source,
            target,
            src,
            tgt,
            |a, e| self.act_left(a / mg2, e / n2) * n2 + other.act_left(a % mg2, e % n2),
            |e, b| self.act_right(e / n2, b / mh2) * n2 + other.act_right(e % n2, b % mh2),
        )
        .expect("tensor of bisets")
    }

    /// The transitive biset generated by a point over `(h0, g0)` whose
    /// stabilizer is the subgroup of `G(g0,g0) × H(h0,h0)` generated by
    /// `stabilizer` (pairs `(k, k')` with `k·x0·k'⁻¹ = x0`).
    ///
    /// Elements are classes of pairs `(α: g0 → g, β: h → h0)`, standing for
    /// `α·x0·β`, modulo `(α, β) ~ (αk, k'⁻¹β)`.
    pub fn transitive(
        source: &GroupoidRef,
        target: &GroupoidRef,
        h0: usize,
        g0: usize,
        stabilizer: &[(usize, usize)],
    ) -> Result<Self> {
        let (h, g) = (&**source, &**target);
        for &(k, k2) in stabilizer {
            if g.src(k) != g0 || g.tgt(k) != g0 || h.src(k2) != h0 || h.tgt(k2) != h0 {
                return Err(Error::NotASubgroup("stabilizer pair is not a pair of automorphisms".into()));
            }
        }
        let outs = g.out(g0);
        let ins = h.incoming(h0);
        let pair = |a: usize, b: usize| g.out_pos(a) * ins.len() + h.in_pos(b);
        let total = outs.len() * ins.len();
        let mut uf = UnionFind::<usize>::new(total);
        for &a in outs {
            for &b in ins {
                for &(k, k2) in stabilizer {
                    uf.union(pair(a, b), pair(g.compose(a, k), h.compose(h.inv(k2), b)));
                }
            }
        }
        let labels = uf.into_labeling();
        let mut class_of_root = vec![usize::MAX; total];
        let mut class = vec![0; total];
        let mut reps = Vec::new();
        for i in 0..total {
            let r = labels[i];
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = reps.len();
                reps.push((outs[i / ins.len()], ins[i % ins.len()]));
            }
            class[i] = class_of_root[r];
        }
        let src = reps.iter().map(|&(_, b)| h.src(b)).collect();
        let tgt = reps.iter().map(|&(a, _)| g.tgt(a)).collect();
        Biset::from_actions(
            source.clone(),
            target.clone(),
            src,
            tgt,
            |c, x| {
                let (a, b) = reps[x];
                class[pair(g.compose(c, a), b)]
            },
            |x, d| {
                let (a, b) = reps[x];
                class[pair(a, h.compose(b, d))]
            },
        )
    }

    /// A random biset: a disjoint union of up to `max_orbits` transitive
    /// bisets with random basepoints and random stabilizers generated by at
    /// most two pairs.
    pub fn random(source: &GroupoidRef, target: &GroupoidRef, rng: &mut impl Rng, max_orbits: usize) -> Self {
        let mut out = Biset::empty(source, target);
        if source.num_objects() == 0 || target.num_objects() == 0 {
            return out;
        }
        for _ in 0..rng.gen_range(1..=max_orbits.max(1)) {
            let h0 = rng.gen_range(0..source.num_objects());
            let g0 = rng.gen_range(0..target.num_objects());
            let gens: Vec<(usize, usize)> = (0..rng.gen_range(0..=2))
                .map(|_| {
                    let k = *target.hom(g0, g0).choose(rng).expect("identity exists");
                    let k2 = *source.hom(h0, h0).choose(rng).expect("identity exists");
                    (k, k2)
                })
                .collect();
            let t = Biset::transitive(source, target, h0, g0, &gens).expect("valid stabilizer");
            out = out.disjoint_union(&t).expect("parallel bisets");
        }
        out
    }

    /// Orbits of the combined action, each sorted, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(self.len());
        for x in 0..self.len() {
            for &y in self.left[x].iter().chain(&self.right[x]) {
                uf.union(x, y);
            }
        }
        let labels = uf.into_labeling();
        let mut orbit_of_root = vec![usize::MAX; self.len()];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.len() {
            let r = labels[x];
            if orbit_of_root[r] == usize::MAX {
                orbit_of_root[r] = orbits.len();
                orbits.push(Vec::new());
            }
            orbits[orbit_of_root[r]].push(x);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// Restriction to a union of orbits, renumbered in the given order.
    pub fn restrict(&self, elements: &[usize]) -> Result<Self> {
        let mut local = vec![usize::MAX; self.len()];
        for (i, &x) in elements.iter().enumerate() {
            local[x] = i;
        }
        let closed = elements
            .iter()
            .all(|&x| self.left[x].iter().chain(&self.right[x]).all(|&y| local[y] != usize::MAX));
        if !closed {
            return Err(Error::InvalidBiset("restriction to a subset that is not closed under the actions".into()));
        }
        Biset::from_actions(
            self.source.clone(),
            self.target.clone(),
            elements.iter().map(|&x| self.src[x]).collect(),
            elements.iter().map(|&x| self.tgt[x]).collect(),
            |a, i| local[self.act_left(a, elements[i])],
            |i, b| local[self.act_right(elements[i], b)],
        )
    }

    /// Transitive summands, one per orbit, with the embedding of each.
    pub fn decompose(&self) -> Vec<(Biset, Vec<usize>)> {
        self.orbits()
            .into_iter()
            .map(|o| (self.restrict(&o).expect("orbits are closed"), o))
            .collect()
    }

    /// The stabilizer of `x` in `G(g,g) × H(h,h)`, as pairs `(k, k')` with
    /// `k·x·k'⁻¹ = x`.
    pub fn stabilizer(&self, x: usize) -> Vec<(usize, usize)> {
        let (h, g) = (&*self.source, &*self.target);
        let (hx, gx) = (self.src[x], self.tgt[x]);
        let mut out = Vec::new();
        for &k in g.hom(gx, gx) {
            let kx = self.act_left(k, x);
            for &k2 in h.hom(hx, hx) {
                if self.act_right(kx, h.inv(k2)) == x {
                    out.push((k, k2));
                }
            }
        }
        out
    }
}

/// A natural map between parallel bisets, stored elementwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisetMorphism {
    pub map: Vec<usize>,
}

impl BisetMorphism {
    pub fn identity(u: &Biset) -> Self {
        BisetMorphism {
            map: (0..u.len()).collect(),
        }
    }

    /// Checks that the map preserves fibers and commutes with both actions.
    pub fn check(&self, domain: &Biset, codomain: &Biset) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidBisetMorphism(msg));
        if !domain.same_endpoints(codomain) {
            return bad("domain and codomain are not parallel".into());
        }
        if self.map.len() != domain.len() || self.map.iter().any(|&y| y >= codomain.len()) {
            return bad("map has the wrong shape".into());
        }
        let (h, g) = (&**domain.source(), &**domain.target());
        for x in 0..domain.len() {
            let y = self.map[x];
            if codomain.src(y) != domain.src(x) || codomain.tgt(y) != domain.tgt(x) {
                return bad(format!("element {x} changes fiber"));
            }
            for &a in g.out(domain.tgt(x)) {
                if self.map[domain.act_left(a, x)] != codomain.act_left(a, y) {
                    return bad(format!("left naturality fails at {x}"));
                }
            }
            for &b in h.incoming(domain.src(x)) {
                if self.map[domain.act_right(x, b)] != codomain.act_right(y, b) {
                    return bad(format!("right naturality fails at {x}"));
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective(&self, codomain_len: usize) -> bool {
        if self.map.len() != codomain_len {
            return false;
        }
        let mut seen = vec![false; codomain_len];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &BisetMorphism) -> BisetMorphism {
        BisetMorphism {
            map: self.map.iter().map(|&y| second.map[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Option<BisetMorphism> {
        let mut inv = vec![usize::MAX; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            if y >= inv.len() || inv[y] != usize::MAX {
                return None;
            }
            inv[y] = x;
        }
        Some(BisetMorphism { map: inv })
    }
}

/// Tries to extend `x0 ↦ y0` to an isomorphism from the orbit of `x0` onto
/// the orbit of `y0`, following the actions breadth first.
fn extend_from(u: &Biset, v: &Biset, x0: usize, y0: usize, map: &mut [usize], orbit_len: usize) -> bool {
    let (h, g) = (&**u.source(), &**u.target());
    let mut assigned = vec![x0];
    map[x0] = y0;
    let mut queue = VecDeque::from([x0]);
    let ok = 'search: loop {
        let Some(x) = queue.pop_front() else { break true };
        let y = map[x];
        let steps = g
            .out(u.tgt(x))
            .iter()
            .map(|&a| (u.act_left(a, x), v.act_left(a, y)))
            .chain(h.incoming(u.src(x)).iter().map(|&b| (u.act_right(x, b), v.act_right(y, b))));
        for (x2, y2) in steps {
            if map[x2] == usize::MAX {
                map[x2] = y2;
                assigned.push(x2);
                queue.push_back(x2);
            } else if map[x2] != y2 {
                break 'search false;
            }
        }
    };
    if ok && assigned.len() == orbit_len {
        return true;
    }
    for x in assigned {
        map[x] = usize::MAX;
    }
    false
}

/// Decides whether two parallel bisets are isomorphic, returning a natural
/// bijection if so. Orbits are matched greedily: isomorphism of transitive
/// bisets is an equivalence relation, so any valid match can be kept.
pub fn find_biset_isomorphism(u: &Biset, v: &Biset) -> Result<Option<BisetMorphism>> {
    if !u.same_endpoints(v) {
        return Err(Error::Mismatch("bisets are not parallel".into()));
    }
    if u.fiber_sizes() != v.fiber_sizes() {
        return Ok(None);
    }
    let vo = v.orbits();
    let profile = |b: &Biset, orbit: &[usize]| {
        let mut p: Vec<(usize, usize)> = orbit.iter().map(|&x| (b.src(x), b.tgt(x))).collect();
        p.sort_unstable();
        p
    };
    let v_profiles: Vec<_> = vo.iter().map(|o| profile(v, o)).collect();
    let mut used = vec![false; vo.len()];
    let mut map = vec![usize::MAX; u.len()];
    for orbit in u.orbits() {
        let p = profile(u, &orbit);
        let x0 = orbit[0];
        let mut matched = false;
        for (j, o2) in vo.iter().enumerate() {
            if used[j] || v_profiles[j] != p {
                continue;
            }
            for &y0 in o2 {
                if v.src(y0) == u.src(x0) && v.tgt(y0) == u.tgt(x0) && extend_from(u, v, x0, y0, &mut map, orbit.len()) {
                    matched = true;
                    break;
                }
            }
            if matched {
                used[j] = true;
                break;
            }
        }
        if !matched {
            return Ok(None);
        }
    }
    let m = BisetMorphism { map };
    debug_assert!(m.check(u, v).is_ok() && m.is_bijective(v.len()));
    Ok(Some(m))
}

pub fn bisets_isomorphic(u: &Biset, v: &Biset) -> Result<bool> {
    Ok(find_biset_isomorphism(u, v)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::shared;
    use crate::group::named_group;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    #[test]
    fn identity_bisets() {
        let one = shared(Groupoid::point());
        assert_eq!(Biset::identity(&one).len(), 1);
        let c2 = bg("C2");
        let id = Biset::identity(&c2);
        id.check_laws().unwrap();
        assert_eq!(id.len(), 2);
        assert!(id.is_transitive());
        let two = shared(Groupoid::discrete(2));
        let id2 = Biset::identity(&two);
        assert_eq!(id2.fiber_sizes(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn realizations_are_bisets() {
        let s3 = bg("S3");
        let c2 = bg("C2");
        for u in Functor::all(&c2, &s3) {
            let a = Biset::covariant(&u);
            a.check_laws().unwrap();
            assert_eq!(a.len(), 6);
            let b = Biset::contravariant(&u);
            b.check_laws().unwrap();
            assert_eq!(b.len(), 6);
        }
        let one = shared(Groupoid::point());
        let u = Functor::constant(&one, &c2, 0);
        let r = Biset::covariant(&u);
        assert_eq!(r.len(), 2);
        assert!(r.is_transitive());
        let id = Functor::identity(&c2);
        assert!(bisets_isomorphic(&Biset::covariant(&id), &Biset::identity(&c2)).unwrap());
    }

    #[test]
    fn transitive_bisets_have_index_size() {
        let c2 = bg("C2");
        let c2r = &*c2;
        // Stabilizers inside C2 × C2: trivial, the two factors, the diagonal, everything.
        let g = c2r.hom(0, 0).to_vec();
        let cases: Vec<(Vec<(usize, usize)>, usize)> = vec![
            (vec![], 4),
            (vec![(g[1], g[0])], 2),
            (vec![(g[0], g[1])], 2),
            (vec![(g[1], g[1])], 2),
            (vec![(g[1], g[0]), (g[0], g[1])], 1),
        ];
        for (stab, size) in cases {
            let u = Biset::transitive(&c2, &c2, 0, 0, &stab).unwrap();
            u.check_laws().unwrap();
            assert_eq!(u.len(), size);
            assert!(u.is_transitive());
            let mut found = u.stabilizer(0);
            found.sort_unstable();
            let expected = {
                let mut closure: Vec<(usize, usize)> = vec![(g[0], g[0])];
                closure.extend(stab.iter().copied());
                if stab.len() == 2 {
                    closure.push((g[1], g[1]));
                }
                closure.sort_unstable();
                closure.dedup();
                closure
            };
            assert_eq!(found, expected);
        }
        // The diagonal stabilizer gives the identity biset.
        let diag = Biset::transitive(&c2, &c2, 0, 0, &[(g[1], g[1])]).unwrap();
        assert!(bisets_isomorphic(&diag, &Biset::identity(&c2)).unwrap());
    }

    #[test]
    fn tensor_sizes_and_orbits() {
        let c2 = bg("C2");
        let id = Biset::identity(&c2);
        let t = id.tensor(&id);
        t.check_laws().unwrap();
        assert_eq!(t.len(), 4);
        // Free C2×C2-biset on four points: one orbit.
        assert_eq!(t.orbits().len(), 1);
        let one = shared(Groupoid::point());
        let unit = Biset::identity(&one);
        let t = id.tensor(&unit);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn isomorphism_search() {
        let s3 = bg("S3");
        let id = Biset::identity(&s3);
        let m = find_biset_isomorphism(&id, &id).unwrap().unwrap();
        m.check(&id, &id).unwrap();
        let two = id.disjoint_union(&id).unwrap();
        assert!(!bisets_isomorphic(&two, &id).unwrap());
        let c2 = bg("C2");
        let g = c2.hom(0, 0).to_vec();
        let left = Biset::transitive(&c2, &c2, 0, 0, &[(g[1], g[0])]).unwrap();
        let right = Biset::transitive(&c2, &c2, 0, 0, &[(g[0], g[1])]).unwrap();
        let diag = Biset::transitive(&c2, &c2, 0, 0, &[(g[1], g[1])]).unwrap();
        assert!(!bisets_isomorphic(&left, &right).unwrap());
        assert!(!bisets_isomorphic(&left, &diag).unwrap());
        let a = left.disjoint_union(&right).unwrap();
        let b = right.disjoint_union(&left).unwrap();
        let m = find_biset_isomorphism(&a, &b).unwrap().unwrap();
        m.check(&a, &b).unwrap();
    }
}
