//! Composites of chains of bisets, computed as iterated coends.
//!
//! For a chain `[U_0, …, U_{n-1}]` with `U_i: G_{i+1} → G_i`, the composite
//! `U_0 ∘ ⋯ ∘ U_{n-1}` is the set of composable tuples `(x_0, …, x_{n-1})`
//! (`src x_i = tgt x_{i+1}`) modulo `(…, x·β, y, …) ~ (…, x, β·y, …)`.
//!
//! Tuples get a dense mixed-radix index: with `cnt[i][g]` the number of
//! partial tuples `(x_i, …)` starting at `tgt x_i = g`, the index of a tuple is
//! `base[tgt x_0] + Σ rank_i(x_i)` where `rank_i(x)` counts the partial tuples
//! that start with a smaller element of the same target. Lexicographic
//! enumeration visits tuples in increasing index order, so the first tuple
//! met in a class is its least member and serves as representative.

use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::biset::{Biset, BisetMorphism, BisetRef};
use crate::error::{Error, Result};
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};

#[derive(Clone, Debug)]
pub struct Composite {
    factors: Vec<BisetRef>,
    base: Vec<usize>,
    rank: Vec<Vec<usize>>,
    num_tuples: usize,
    class_of: Vec<usize>,
    reps: Vec<usize>,
    biset: Biset,
}

impl Composite {
    /// Builds the composite, checking that the quotient actions are well
    /// defined on every tuple.
    pub fn new(factors: Vec<BisetRef>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidCoend("empty chain; use the identity biset".into()));
        }
        for w in factors.windows(2) {
            if !same_groupoid(w[0].source(), w[1].target()) {
                return Err(Error::Mismatch("chain factors are not composable".into()));
            }
        }
        let n = factors.len();
        let mut cnt: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        cnt[n] = vec![1; factors[n - 1].source().num_objects()];
        let mut rank = vec![Vec::new(); n];
        for i in (0..n).rev() {
            let u = &factors[i];
            let mut c = vec![0; u.target().num_objects()];
            let mut r = vec![0; u.len()];
            for (g, slot) in c.iter_mut().enumerate() {
                for &x in u.with_target(g) {
                    r[x] = *slot;
                    *slot += cnt[i + 1][u.src(x)];
                }
            }
            cnt[i] = c;
            rank[i] = r;
        }
        let mut base = Vec::with_capacity(cnt[0].len());
        let mut num_tuples = 0;
        for &c in &cnt[0] {
            base.push(num_tuples);
            num_tuples += c;
        }

        let mut comp = Composite {
            factors,
            base,
            rank,
            num_tuples,
            class_of: Vec::new(),
            reps: Vec::new(),
            biset: Biset::empty(&Arc::new(Groupoid::empty()), &Arc::new(Groupoid::empty())),
        };
        comp.build_classes()?;
        Ok(comp)
    }

    /// A single biset viewed as a chain of length one; classes are elements.
    pub fn single(u: BisetRef) -> Self {
        Composite::new(vec![u]).expect("single-factor chain")
    }

    fn build_classes(&mut self) -> Result<()> {
        let n = self.factors.len();
        let mut uf = UnionFind::<usize>::new(self.num_tuples);
        if n > 1 {
            let mut partner = Vec::with_capacity(n);
            self.for_each_tuple(|t, idx| {
                for i in 0..n - 1 {
                    let (u, v) = (&self.factors[i], &self.factors[i + 1]);
                    let h = u.source();
                    for &b in h.incoming(u.src(t[i])) {
                        partner.clear();
                        partner.extend_from_slice(t);
                        partner[i] = u.act_right(t[i], b);
                        partner[i + 1] = v.act_left(h.inv(b), t[i + 1]);
                        uf.union(idx, self.index(&partner));
                    }
                }
            });
        }
        let labels = uf.into_labeling();
        let mut class_of_root = vec![usize::MAX; self.num_tuples];
        let mut class_of = vec![0; self.num_tuples];
        let mut reps: Vec<usize> = Vec::new();
        if n == 1 {
            // Keep element numbering so that a one-factor chain is its biset.
            let u = &self.factors[0];
            for x in 0..u.len() {
                class_of[self.base[u.tgt(x)] + self.rank[0][x]] = x;
                reps.push(x);
            }
        } else {
            let mut flat = Vec::new();
            self.for_each_tuple(|t, idx| {
                let r = labels[idx];
                if class_of_root[r] == usize::MAX {
                    class_of_root[r] = flat.len() / n;
                    flat.extend_from_slice(t);
                }
                class_of[idx] = class_of_root[r];
            });
            reps = flat;
        }
        self.class_of = class_of;
        self.reps = reps;

        let k = self.num_classes();
        let (first, last) = (&self.factors[0], &self.factors[n - 1]);
        let src: Vec<usize> = (0..k).map(|c| last.src(self.representative(c)[n - 1])).collect();
        let tgt: Vec<usize> = (0..k).map(|c| first.tgt(self.representative(c)[0])).collect();
        let mut buf = vec![0; n];
        let biset = Biset::from_actions(
            last.source().clone(),
            first.target().clone(),
            src,
            tgt,
            |a, c| {
                let mut t = self.representative(c).to_vec();
                t[0] = first.act_left(a, t[0]);
                self.class_of_tuple(&t)
            },
            |c, b| {
                let mut t = self.representative(c).to_vec();
                t[n - 1] = last.act_right(t[n - 1], b);
                self.class_of_tuple(&t)
            },
        )?;
        // The actions were read off representatives; check every member agrees.
        let mut bad = None;
        self.for_each_tuple(|t, idx| {
            if bad.is_some() {
                return;
            }
            let c = self.class_of[idx];
            buf.copy_from_slice(t);
            for &a in first.target().out(first.tgt(t[0])) {
                buf[0] = first.act_left(a, t[0]);
                if self.class_of_tuple(&buf) != biset.act_left(a, c) {
                    bad = Some(idx);
                    return;
                }
            }
            buf[0] = t[0];
            for &b in last.source().incoming(last.src(t[n - 1])) {
                buf[n - 1] = last.act_right(t[n - 1], b);
                if self.class_of_tuple(&buf) != biset.act_right(c, b) {
                    bad = Some(idx);
                    return;
                }
            }
        });
        if let Some(idx) = bad {
            return Err(Error::NotWellDefined(format!("composite action depends on the representative at tuple {idx}")));
        }
        self.biset = biset;
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[BisetRef] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Biset {
        &self.factors[i]
    }

    pub fn num_tuples(&self) -> usize {
        self.num_tuples
    }

    pub fn num_classes(&self) -> usize {
        self.reps.len() / if self.factors.len() == 1 { 1 } else { self.factors.len() }
    }

    /// The composite as a biset; element `c` is class `c`.
    pub fn biset(&self) -> &Biset {
        &self.biset
    }

    pub fn into_biset(self) -> Biset {
        self.biset
    }

    pub fn source(&self) -> &GroupoidRef {
        self.factors[self.factors.len() - 1].source()
    }

    pub fn target(&self) -> &GroupoidRef {
        self.factors[0].target()
    }

    /// Whether `t` is a composable tuple of this chain.
    pub fn is_tuple(&self, t: &[usize]) -> bool {
        t.len() == self.factors.len()
            && t.iter().zip(&self.factors).all(|(&x, u)| x < u.len())
            && (0..t.len().saturating_sub(1)).all(|i| self.factors[i].src(t[i]) == self.factors[i + 1].tgt(t[i + 1]))
    }

    /// Dense index of a composable tuple.
    #[inline]
    pub fn index(&self, t: &[usize]) -> usize {
        debug_assert!(self.is_tuple(t));
        let mut idx = self.base[self.factors[0].tgt(t[0])];
        for (i, &x) in t.iter().enumerate() {
            idx += self.rank[i][x];
        }
        idx
    }

    #[inline]
    pub fn class_of_tuple(&self, t: &[usize]) -> usize {
        self.class_of[self.index(t)]
    }

    /// Least tuple of class `c`.
    pub fn representative(&self, c: usize) -> &[usize] {
        let n = self.factors.len();
        if n == 1 {
            &self.reps[c..c + 1]
        } else {
            &self.reps[c * n..(c + 1) * n]
        }
    }

    /// Visits every composable tuple with its index, in increasing order.
    pub fn for_each_tuple(&self, mut f: impl FnMut(&[usize], usize)) {
        let n = self.factors.len();
        let mut t = vec![0; n];
        let mut idx = 0;
        for g in 0..self.factors[0].target().num_objects() {
            for &x in self.factors[0].with_target(g) {
                t[0] = x;
                self.descend(1, &mut t, &mut idx, &mut f);
            }
        }
        debug_assert_eq!(idx, self.num_tuples);
    }

    fn descend(&self, i: usize, t: &mut Vec<usize>, idx: &mut usize, f: &mut impl FnMut(&[usize], usize)) {
        if i == self.factors.len() {
            f(t, *idx);
            *idx += 1;
            return;
        }
        let h = self.factors[i - 1].src(t[i - 1]);
        for &x in self.factors[i].with_target(h) {
            t[i] = x;
            self.descend(i + 1, t, idx, f);
        }
    }
}

/// A morphism of composites given by a formula on tuples. The formula is
/// applied to every tuple of `domain`; the result must not depend on the
/// representative, and the induced class map must be natural.
pub fn chain_map(
    domain: &Composite,
    codomain: &Composite,
    mut formula: impl FnMut(&[usize], &mut Vec<usize>),
) -> Result<BisetMorphism> {
    if !same_groupoid(domain.source(), codomain.source()) || !same_groupoid(domain.target(), codomain.target()) {
        return Err(Error::Mismatch("chain map between non-parallel composites".into()));
    }
    let mut map = vec![usize::MAX; domain.num_classes()];
    let mut out = Vec::with_capacity(codomain.arity());
    let mut err = None;
    domain.for_each_tuple(|t, idx| {
        if err.is_some() {
            return;
        }
        out.clear();
        formula(t, &mut out);
        if !codomain.is_tuple(&out) {
            err = Some(Error::InvalidBisetMorphism(format!("formula sends tuple {t:?} to a non-composable tuple {out:?}")));
            return;
        }
        let c = domain.class_of[idx];
        let d = codomain.class_of_tuple(&out);
        if map[c] == usize::MAX {
            map[c] = d;
        } else if map[c] != d {
            err = Some(Error::NotWellDefined(format!("formula is not constant on the class of {t:?}")));
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let m = BisetMorphism { map };
    m.check(domain.biset(), codomain.biset())?;
    Ok(m)
}

/// Applies a morphism of one factor, leaving the others fixed.
pub fn whisker(domain: &Composite, codomain: &Composite, position: usize, m: &BisetMorphism) -> Result<BisetMorphism> {
    chain_map(domain, codomain, |t, out| {
        out.extend_from_slice(t);
        out[position] = m.map[t[position]];
    })
}

/// Applies a morphism `window → window_image` to the factors
/// `start..start + window.arity()` of each tuple, splicing in the
/// representative of the image class.
pub fn window_map(
    domain: &Composite,
    codomain: &Composite,
    start: usize,
    window: &Composite,
    window_image: &Composite,
    m: &BisetMorphism,
) -> Result<BisetMorphism> {
    let end = start + window.arity();
    if end > domain.arity() {
        return Err(Error::Mismatch("window runs past the end of the chain".into()));
    }
    chain_map(domain, codomain, |t, out| {
        out.extend_from_slice(&t[..start]);
        let c = window.class_of_tuple(&t[start..end]);
        out.extend_from_slice(window_image.representative(m.map[c]));
        out.extend_from_slice(&t[end..]);
    })
}

pub fn chain(factors: &[&BisetRef]) -> Result<Composite> {
    Composite::new(factors.iter().map(|&u| Arc::clone(u)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biset::bisets_isomorphic;
    use crate::functor::{shared, Functor};
    use crate::group::named_group;
    use crate::groupoid::Groupoid;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    #[test]
    fn identity_is_a_unit_for_composition() {
        let s3 = bg("S3");
        let c2 = bg("C2");
        let id_s3 = Arc::new(Biset::identity(&s3));
        let id_c2 = Arc::new(Biset::identity(&c2));
        for u in Functor::all(&c2, &s3) {
            let r = Arc::new(Biset::covariant(&u));
            let left = chain(&[&id_s3, &r]).unwrap();
            assert_eq!(left.num_tuples(), 36);
            assert!(bisets_isomorphic(left.biset(), &r).unwrap());
            let right = chain(&[&r, &id_c2]).unwrap();
            assert!(bisets_isomorphic(right.biset(), &r).unwrap());
            // The evaluation map is a natural bijection.
            let m = chain_map(&left, &Composite::single(r.clone()), |t, out| {
                out.push(left.factor(1).act_left(t[0], t[1]));
            })
            .unwrap();
            assert!(m.is_bijective(r.len()));
        }
    }

    #[test]
    fn index_is_dense_and_ordered() {
        let two = shared(Groupoid::codiscrete(2));
        let id = Arc::new(Biset::identity(&two));
        let c = chain(&[&id, &id, &id]).unwrap();
        let mut seen = 0;
        c.for_each_tuple(|t, idx| {
            assert_eq!(c.index(t), idx);
            seen += 1;
        });
        assert_eq!(seen, c.num_tuples());
        assert_eq!(c.num_classes(), 4);
        for k in 0..c.num_classes() {
            let r = c.representative(k).to_vec();
            assert_eq!(c.class_of_tuple(&r), k);
        }
    }

    #[test]
    fn contravariant_after_covariant_counts() {
        // R^*(u) R_!(u) for u: 1 → BC2 is C2 viewed as a 1-1 biset.
        let one = shared(Groupoid::point());
        let c2 = bg("C2");
        let u = Functor::constant(&one, &c2, 0);
        let a = Arc::new(Biset::covariant(&u));
        let b = Arc::new(Biset::contravariant(&u));
        let ba = chain(&[&b, &a]).unwrap();
        assert_eq!(ba.num_classes(), 2);
        let ab = chain(&[&a, &b]).unwrap();
        // No identification over the point: C2 × C2, free and transitive.
        assert_eq!(ab.num_classes(), 4);
        assert!(ab.biset().is_transitive());
    }

    #[test]
    fn rejects_non_constant_formula() {
        let c2 = bg("C2");
        let id = Arc::new(Biset::identity(&c2));
        let c = chain(&[&id, &id]).unwrap();
        let target = Composite::single(id.clone());
        // Taking the first factor alone is not well defined on the coend.
        assert!(chain_map(&c, &target, |t, out| out.push(t[0])).is_err());
    }
}
