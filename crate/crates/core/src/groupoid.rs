//! Finite groupoids stored as explicit composition tables.
//!
//! Objects and morphisms are dense integers. For every object we keep the
//! outgoing and incoming morphisms; outgoing lists are sorted by target so a
//! hom-set `G(x, y)` is a contiguous slice. Composition `g ∘ f` is looked up
//! as `after[f][out_pos[g]]`.
//!
//! Every connected component has a basepoint (its lowest object id) and a
//! chosen tree of morphisms `tree[x]: base → x` (the lowest-id morphism of
//! that hom-set). These give the skeletal normal form used by functors,
//! equivalences and span classification.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

pub struct Groupoid {
    src: Vec<usize>,
    tgt: Vec<usize>,
    identity: Vec<usize>,
    inverse: Vec<usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    out_pos: Vec<usize>,
    in_pos: Vec<usize>,
    after: Vec<Vec<usize>>,
    component: Vec<usize>,
    components: Vec<Vec<usize>>,
    tree: Vec<usize>,
}

impl fmt::Debug for Groupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Groupoid({} objects, {} morphisms, {} components)",
            self.num_objects(),
            self.num_morphisms(),
            self.components.len()
        )
    }
}

impl PartialEq for Groupoid {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.src == other.src
                && self.tgt == other.tgt
                && self.identity == other.identity
                && self.inverse == other.inverse
                && self.after == other.after)
    }
}

impl Eq for Groupoid {}

impl Groupoid {
    /// Assembles a groupoid from its structure maps. Shapes are validated;
    /// the category laws are not (see [`Groupoid::check_laws`]).
    pub fn new(
        num_objects: usize,
        src: Vec<usize>,
        tgt: Vec<usize>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let m = src.len();
        let bad = |msg: String| Err(Error::InvalidGroupoid(msg));
        if tgt.len() != m || inverse.len() != m || identity.len() != num_objects {
            return bad("structure maps have inconsistent lengths".into());
        }
        if src.iter().chain(&tgt).any(|&x| x >= num_objects) {
            return bad("morphism endpoint out of range".into());
        }
        for (x, &e) in identity.iter().enumerate() {
            if e >= m || src[e] != x || tgt[e] != x {
                return bad(format!("identity of object {x} is not an endomorphism of it"));
            }
        }
        for (f, &g) in inverse.iter().enumerate() {
            if g >= m || src[g] != tgt[f] || tgt[g] != src[f] {
                return bad(format!("inverse of morphism {f} has the wrong endpoints"));
            }
        }
        let mut out = vec![Vec::new(); num_objects];
        let mut inc = vec![Vec::new(); num_objects];
        for f in 0..m {
            out[src[f]].push(f);
            inc[tgt[f]].push(f);
        }
        for list in &mut out {
            list.sort_by_key(|&f| (tgt[f], f));
        }
        for list in &mut inc {
            list.sort_by_key(|&f| (src[f], f));
        }
        let mut out_pos = vec![0; m];
        let mut in_pos = vec![0; m];
        for list in &out {
            for (i, &f) in list.iter().enumerate() {
                out_pos[f] = i;
            }
        }
        for list in &inc {
            for (i, &f) in list.iter().enumerate() {
                in_pos[f] = i;
            }
        }
        let mut after = Vec::with_capacity(m);
        for f in 0..m {
            let row: Vec<usize> = out[tgt[f]].iter().map(|&g| compose(g, f)).collect();
            for (&g, &gf) in out[tgt[f]].iter().zip(&row) {
                if gf >= m || src[gf] != src[f] || tgt[gf] != tgt[g] {
                    return bad(format!("composite of {g} after {f} has the wrong endpoints"));
                }
            }
            after.push(row);
        }
        let mut g = Groupoid {
            src,
            tgt,
            identity,
            inverse,
            out,
            inc,
            out_pos,
            in_pos,
            after,
            component: Vec::new(),
            components: Vec::new(),
            tree: Vec::new(),
        };
        g.compute_components();
        Ok(g)
    }

    fn compute_components(&mut self) {
        let n = self.num_objects();
        self.component = vec![usize::MAX; n];
        self.tree = vec![usize::MAX; n];
        self.components.clear();
        for base in 0..n {
            if self.component[base] != usize::MAX {
                continue;
            }
            let c = self.components.len();
            let mut members = Vec::new();
            // Every object reachable from `base` is reached in one step.
            for &f in &self.out[base] {
                let y = self.tgt[f];
                if self.component[y] == usize::MAX {
                    self.component[y] = c;
                    self.tree[y] = f;
                    members.push(y);
                }
            }
            self.tree[base] = self.identity[base];
            members.sort_unstable();
            self.components.push(members);
        }
    }

    /// Checks associativity, identity and inverse laws on all tuples.
    pub fn check_laws(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGroupoid(msg));
        for f in 0..self.num_morphisms() {
            let (x, y) = (self.src[f], self.tgt[f]);
            if self.compose(f, self.identity[x]) != f || self.compose(self.identity[y], f) != f {
                return bad(format!("identity law fails at morphism {f}"));
            }
            let g = self.inverse[f];
            if self.compose(g, f) != self.identity[x] || self.compose(f, g) != self.identity[y] {
                return bad(format!("inverse law fails at morphism {f}"));
            }
            for &g in &self.out[y] {
                let gf = self.compose(g, f);
                for &h in &self.out[self.tgt[g]] {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return bad(format!("associativity fails at ({h}, {g}, {f})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn empty() -> Self {
        Groupoid::new(0, vec![], vec![], vec![], vec![], |_, _| 0).expect("empty groupoid")
    }

    /// The discrete groupoid on `n` objects.
    pub fn discrete(n: usize) -> Self {
        let ids: Vec<usize> = (0..n).collect();
        Groupoid::new(n, ids.clone(), ids.clone(), ids.clone(), ids, |g, _| g).expect("discrete groupoid")
    }

    /// The codiscrete groupoid on `n` objects: one morphism `x → y` for each
    /// pair, numbered `x * n + y`.
    pub fn codiscrete(n: usize) -> Self {
        let src = (0..n * n).map(|m| m / n).collect();
        let tgt = (0..n * n).map(|m| m % n).collect();
        let identity = (0..n).map(|x| x * n + x).collect();
        let inverse = (0..n * n).map(|m| (m % n) * n + m / n).collect();
        Groupoid::new(n, src, tgt, identity, inverse, |g, f| (f / n) * n + g % n).expect("codiscrete groupoid")
    }

    /// The terminal groupoid `1`.
    pub fn point() -> Self {
        Groupoid::discrete(1)
    }

    /// One-object groupoid whose morphisms are the group elements; `g ∘ f`
    /// is the product `g·f`.
    pub fn from_group(group: &FiniteGroup) -> Self {
        let n = group.order();
        let inverse = (0..n).map(|a| group.inv(a)).collect();
        Groupoid::new(1, vec![0; n], vec![0; n], vec![group.identity()], inverse, |g, f| group.mul(g, f))
            .expect("group groupoid")
    }

    /// Tagged disjoint union: objects and morphisms of `a` come first.
    pub fn disjoint_union(a: &Groupoid, b: &Groupoid) -> Self {
        let (na, ma) = (a.num_objects(), a.num_morphisms());
        let src = a.src.iter().copied().chain(b.src.iter().map(|x| x + na)).collect();
        let tgt = a.tgt.iter().copied().chain(b.tgt.iter().map(|x| x + na)).collect();
        let identity = a.identity.iter().copied().chain(b.identity.iter().map(|f| f + ma)).collect();
        let inverse = a.inverse.iter().copied().chain(b.inverse.iter().map(|f| f + ma)).collect();
        Groupoid::new(na + b.num_objects(), src, tgt, identity, inverse, |g, f| {
            if f < ma {
                a.compose(g, f)
            } else {
                b.compose(g - ma, f - ma) + ma
            }
        })
        .expect("disjoint union")
    }

    /// Cartesian product: object `(x, y)` is `x * |Obj b| + y`, morphism
    /// `(f, g)` is `f * |Mor b| + g`.
    pub fn product(a: &Groupoid, b: &Groupoid) -> Self {
        let (nb, mb) = (b.num_objects(), b.num_morphisms());
        let m = a.num_morphisms() * mb;
        let split = |f: usize| (f / mb, f % mb);
        let mut src = Vec::with_capacity(m);
        let mut tgt = Vec::with_capacity(m);
        let mut inverse = Vec::with_capacity(m);
        for f in 0..a.num_morphisms() {
            for g in 0..mb {
                src.push(a.src[f] * nb + b.src[g]);
                tgt.push(a.tgt[f] * nb + b.tgt[g]);
                inverse.push(a.inverse[f] * mb + b.inverse[g]);
            }
        }
        let mut identity = Vec::with_capacity(a.num_objects() * nb);
        for x in 0..a.num_objects() {
            for y in 0..nb {
                identity.push(a.identity[x] * mb + b.identity[y]);
            }
        }
        Groupoid::new(a.num_objects() * nb, src, tgt, identity, inverse, |g, f| {
            let ((g1, g2), (f1, f2)) = (split(g), split(f));
            a.compose(g1, f1) * mb + b.compose(g2, f2)
        })
        .expect("product groupoid")
    }

    /// The full subgroupoid on `objects` (renumbered in the given order),
    /// with the ids of its morphisms in `self`.
    pub fn full_subgroupoid(&self, objects: &[usize]) -> (Groupoid, Vec<usize>) {
        let mut local = vec![usize::MAX; self.num_objects()];
        for (i, &x) in objects.iter().enumerate() {
            local[x] = i;
        }
        let mors: Vec<usize> = (0..self.num_morphisms())
            .filter(|&f| local[self.src[f]] != usize::MAX && local[self.tgt[f]] != usize::MAX)
            .collect();
        let mut local_mor = vec![usize::MAX; self.num_morphisms()];
        for (i, &f) in mors.iter().enumerate() {
            local_mor[f] = i;
        }
        let sub = Groupoid::new(
            objects.len(),
            mors.iter().map(|&f| local[self.src[f]]).collect(),
            mors.iter().map(|&f| local[self.tgt[f]]).collect(),
            objects.iter().map(|&x| local_mor[self.identity[x]]).collect(),
            mors.iter().map(|&f| local_mor[self.inverse[f]]).collect(),
            |g, f| local_mor[self.compose(mors[g], mors[f])],
        )
        .expect("full subgroupoid");
        (sub, mors)
    }

    pub fn num_objects(&self) -> usize {
        self.identity.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.src.len()
    }

    #[inline]
    pub fn src(&self, f: usize) -> usize {
        self.src[f]
    }

    #[inline]
    pub fn tgt(&self, f: usize) -> usize {
        self.tgt[f]
    }

    #[inline]
    pub fn id(&self, x: usize) -> usize {
        self.identity[x]
    }

    #[inline]
    pub fn inv(&self, f: usize) -> usize {
        self.inverse[f]
    }

    /// `g ∘ f`; requires `tgt f = src g`.
    #[inline]
    pub fn compose(&self, g: usize, f: usize) -> usize {
        debug_assert_eq!(self.tgt[f], self.src[g], "composing non-composable morphisms");
        self.after[f][self.out_pos[g]]
    }

    /// Composite of a path given outermost first: `fs[0] ∘ fs[1] ∘ ...`.
    pub fn compose_all(&self, fs: &[usize]) -> usize {
        let mut iter = fs.iter().rev();
        let mut acc = *iter.next().expect("nonempty path");
        for &g in iter {
            acc = self.compose(g, acc);
        }
        acc
    }

    /// Morphisms out of `x`, sorted by target.
    pub fn out(&self, x: usize) -> &[usize] {
        &self.out[x]
    }

    /// Morphisms into `y`, sorted by source.
    pub fn incoming(&self, y: usize) -> &[usize] {
        &self.inc[y]
    }

    #[inline]
    pub fn out_pos(&self, f: usize) -> usize {
        self.out_pos[f]
    }

    #[inline]
    pub fn in_pos(&self, f: usize) -> usize {
        self.in_pos[f]
    }

    /// Offset of the hom-set `G(x, y)` inside `out(x)`.
    pub fn hom_start(&self, x: usize, y: usize) -> usize {
        let tgt = &self.tgt;
        self.out[x].partition_point(|&f| tgt[f] < y)
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        let start = self.hom_start(x, y);
        let tgt = &self.tgt;
        let len = self.out[x][start..].partition_point(|&f| tgt[f] == y);
        &self.out[x][start..start + len]
    }

    /// Position of `f` inside its hom-set.
    pub fn hom_index(&self, f: usize) -> usize {
        self.out_pos[f] - self.hom_start(self.src[f], self.tgt[f])
    }

    pub fn component_of(&self, x: usize) -> usize {
        self.component[x]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn basepoint(&self, component: usize) -> usize {
        self.components[component][0]
    }

    pub fn basepoint_of(&self, x: usize) -> usize {
        self.basepoint(self.component[x])
    }

    /// Chosen morphism from the basepoint of `x`'s component to `x`.
    pub fn tree(&self, x: usize) -> usize {
        self.tree[x]
    }

    /// Transports `f: x → y` to the vertex group of the basepoint:
    /// `tree(y)⁻¹ ∘ f ∘ tree(x)`.
    pub fn to_base(&self, f: usize) -> usize {
        let (x, y) = (self.src[f], self.tgt[f]);
        self.compose_all(&[self.inverse[self.tree[y]], f, self.tree[x]])
    }

    /// Inverse of [`Groupoid::to_base`] for prescribed endpoints.
    pub fn from_base(&self, k: usize, x: usize, y: usize) -> usize {
        self.compose_all(&[self.tree[y], k, self.inverse[self.tree[x]]])
    }

    /// The automorphism group of `x`; element `i` is `hom(x, x)[i]`.
    pub fn vertex_group(&self, x: usize) -> (FiniteGroup, Vec<usize>) {
        let elems = self.hom(x, x).to_vec();
        let start = self.hom_start(x, x);
        let group = FiniteGroup::from_fn(elems.len(), |a, b| {
            self.out_pos[self.compose(elems[a], elems[b])] - start
        });
        (group, elems)
    }

    /// One-line description, e.g. `1 object, 2 morphisms, connected`.
    pub fn summary(&self) -> String {
        let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
        let shape = if self.is_connected() {
            "connected".to_string()
        } else {
            plural(self.num_components(), "component")
        };
        format!(
            "{}, {}, {shape}",
            plural(self.num_objects(), "object"),
            plural(self.num_morphisms(), "morphism")
        )
    }

    /// Orders of the vertex groups, one per component, in component order.
    pub fn vertex_orders(&self) -> Vec<usize> {
        self.components.iter().map(|c| self.hom(c[0], c[0]).len()).collect()
    }
}

/// Shared handle; groupoids are immutable once built.
pub type GroupoidRef = Arc<Groupoid>;

/// Structural equality with a pointer fast path.
pub fn same_groupoid(a: &GroupoidRef, b: &GroupoidRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named_group;

    fn bg(name: &str) -> Groupoid {
        Groupoid::from_group(&named_group(name).unwrap())
    }

    #[test]
    fn group_groupoids_satisfy_laws() {
        for name in ["1", "C2", "S3", "V4", "Q8"] {
            let g = bg(name);
            g.check_laws().unwrap();
            assert_eq!(g.num_objects(), 1);
            assert!(g.is_connected());
        }
        assert_eq!(bg("S3").num_morphisms(), 6);
    }

    #[test]
    fn disjoint_union_counts() {
        let u = Groupoid::disjoint_union(&bg("C2"), &bg("C2"));
        u.check_laws().unwrap();
        assert_eq!((u.num_objects(), u.num_morphisms(), u.num_components()), (2, 4, 2));
        let u = Groupoid::disjoint_union(&Groupoid::point(), &bg("C2"));
        assert_eq!((u.num_objects(), u.num_morphisms()), (2, 3));
        let u = Groupoid::disjoint_union(&Groupoid::empty(), &bg("C3"));
        assert_eq!(u, bg("C3"));
    }

    #[test]
    fn product_counts() {
        let p = Groupoid::product(&bg("C2"), &bg("C2"));
        p.check_laws().unwrap();
        assert_eq!((p.num_objects(), p.num_morphisms()), (1, 4));
        assert!(p.vertex_group(0).0.is_isomorphic(&named_group("V4").unwrap()));
        let two = Groupoid::discrete(2);
        let p = Groupoid::product(&two, &bg("C2"));
        assert_eq!((p.num_objects(), p.num_components()), (2, 2));
        assert_eq!(p.hom(1, 1).len(), 2);
        assert_eq!(Groupoid::product(&Groupoid::point(), &bg("S3")), bg("S3"));
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(Groupoid::new(1, vec![0, 0], vec![0, 0], vec![0], vec![1, 1], |_, _| 5).is_err());
        let g = Groupoid::new(1, vec![0, 0], vec![0, 0], vec![0], vec![1, 1], |_, _| 0).unwrap();
        assert!(g.check_laws().is_err());
    }

    #[test]
    fn codiscrete_tree_and_normal_form() {
        // Indiscrete groupoid on 3 objects with vertex group C2: morphisms
        // (x, y, k) with id = (x * 3 + y) * 2 + k.
        let idx = |x: usize, y: usize, k: usize| (x * 3 + y) * 2 + k;
        let mut src = vec![];
        let mut tgt = vec![];
        let mut inverse = vec![];
        for x in 0..3 {
            for y in 0..3 {
                for k in 0..2 {
                    src.push(x);
                    tgt.push(y);
                    inverse.push(idx(y, x, k));
                }
            }
        }
        let identity = (0..3).map(|x| idx(x, x, 0)).collect();
        let g = Groupoid::new(3, src, tgt, identity, inverse, |g, f| {
            let (x, _, a) = (f / 6, (f / 2) % 3, f % 2);
            let (_, z, b) = (g / 6, (g / 2) % 3, g % 2);
            idx(x, z, (a + b) % 2)
        })
        .unwrap();
        g.check_laws().unwrap();
        assert!(g.is_connected());
        for f in 0..g.num_morphisms() {
            let k = g.to_base(f);
            assert_eq!((g.src(k), g.tgt(k)), (0, 0));
            assert_eq!(g.from_base(k, g.src(f), g.tgt(f)), f);
        }
        assert_eq!(g.hom(1, 2).len(), 2);
    }
}
