//! Set-valued and linear coends over finite groupoids.
//!
//! A set problem is an endo-biset `U: C → C`, read as `H(c, c') = U(c, c')`
//! (first slot contravariant, second covariant). Its coend is the set of
//! diagonal elements modulo `y·α ~ α·y` for `y ∈ U(c, c')`, `α: c' → c`.
//! Because `C` is a groupoid the generated relation is already an
//! equivalence: each class is the conjugation orbit `{β·r·β⁻¹}` of any
//! member, and [`set_coend`] checks this.

use num_bigint::BigInt;
use num_traits::One;
use petgraph::unionfind::UnionFind;

use crate::biset::Biset;
use crate::error::{Error, Result};
use crate::groupoid::{same_groupoid, Groupoid, GroupoidRef};
use crate::matrix::{smith_invariants, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoendResult {
    /// Class of each element; `usize::MAX` off the diagonal.
    pub class_of: Vec<usize>,
    /// Least element of each class.
    pub representatives: Vec<usize>,
}

impl CoendResult {
    pub fn num_classes(&self) -> usize {
        self.representatives.len()
    }
}

fn require_endo(u: &Biset) -> Result<()> {
    if !same_groupoid(u.source(), u.target()) {
        return Err(Error::InvalidCoend("coend needs a biset from a groupoid to itself".into()));
    }
    Ok(())
}

/// Coend of an endo-biset, by union-find over the diagonal.
pub fn set_coend(u: &Biset) -> Result<CoendResult> {
    require_endo(u)?;
    u.check_laws()?;
    let c = &**u.source();
    let mut uf = UnionFind::<usize>::new(u.len());
    for y in 0..u.len() {
        for &a in c.hom(u.tgt(y), u.src(y)) {
            uf.union(u.act_right(y, a), u.act_left(a, y));
        }
    }
    let labels = uf.into_labeling();
    let mut class_of = vec![usize::MAX; u.len()];
    let mut class_of_root = vec![usize::MAX; u.len()];
    let mut representatives = Vec::new();
    for y in (0..u.len()).filter(|&y| u.src(y) == u.tgt(y)) {
        let r = labels[y];
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = representatives.len();
            representatives.push(y);
        }
        class_of[y] = class_of_root[r];
    }
    // Each class must be exactly the conjugation orbit of its representative.
    let mut orbit_size = vec![0usize; representatives.len()];
    for (k, &r) in representatives.iter().enumerate() {
        let mut members: Vec<usize> = c
            .out(u.src(r))
            .iter()
            .map(|&b| u.act_left(b, u.act_right(r, c.inv(b))))
            .collect();
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&m| class_of[m] != k) {
            return Err(Error::InvalidCoend("relation is not closed under conjugation".into()));
        }
        orbit_size[k] = members.len();
    }
    let mut class_size = vec![0usize; representatives.len()];
    for &k in class_of.iter().filter(|&&k| k != usize::MAX) {
        class_size[k] += 1;
    }
    if class_size != orbit_size {
        return Err(Error::InvalidCoend("a class is larger than one conjugation orbit".into()));
    }
    Ok(CoendResult {
        class_of,
        representatives,
    })
}

/// Sets an unset slot, or checks that a set slot already holds `value`.
pub(crate) fn assign(slot: &mut usize, value: usize) -> bool {
    if *slot == usize::MAX {
        *slot = value;
    }
    *slot == value
}

/// Which factor of a product groupoid a partial coend runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Partial coend of an endo-biset on `c1 × c2` over one factor, giving an
/// endo-biset on the other factor together with the class of every element
/// whose coordinates in the summed factor agree (`usize::MAX` otherwise).
pub fn partial_coend(u: &Biset, c1: &GroupoidRef, c2: &GroupoidRef, over: Factor) -> Result<(Biset, Vec<usize>)> {
    require_endo(u)?;
    let product = Groupoid::product(c1, c2);
    if **u.source() != product {
        return Err(Error::Mismatch("biset is not indexed by the given product".into()));
    }
    let (n2, m2) = (c2.num_objects(), c2.num_morphisms());
    let (kept, summed) = match over {
        Factor::First => (c2, c1),
        Factor::Second => (c1, c2),
    };
    // Coordinates in the kept and summed factor, and the product morphism
    // built from a kept and a summed morphism.
    let obj = |o: usize| match over {
        Factor::First => (o % n2, o / n2),
        Factor::Second => (o / n2, o % n2),
    };
    let mor = |k: usize, s: usize| match over {
        Factor::First => s * m2 + k,
        Factor::Second => k * m2 + s,
    };
    let p = &**u.source();
    let diagonal = |y: usize| obj(u.src(y)).1 == obj(u.tgt(y)).1;

    let mut uf = UnionFind::<usize>::new(u.len());
    for y in 0..u.len() {
        let (k1, s1) = obj(u.src(y));
        let (k2, s2) = obj(u.tgt(y));
        for &a in summed.hom(s2, s1) {
            let right = mor(kept.id(k1), a);
            let left = mor(kept.id(k2), a);
            debug_assert_eq!(p.tgt(right), u.src(y));
            uf.union(u.act_right(y, right), u.act_left(left, y));
        }
    }
    let labels = uf.into_labeling();
    let mut class_of = vec![usize::MAX; u.len()];
    let mut class_of_root = vec![usize::MAX; u.len()];
    let mut reps = Vec::new();
    for y in (0..u.len()).filter(|&y| diagonal(y)) {
        let r = labels[y];
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = reps.len();
            reps.push(y);
        }
        class_of[y] = class_of_root[r];
    }
    let kept_ref: GroupoidRef = kept.clone();
    let v = Biset::from_actions(
        kept_ref.clone(),
        kept_ref,
        reps.iter().map(|&y| obj(u.src(y)).0).collect(),
        reps.iter().map(|&y| obj(u.tgt(y)).0).collect(),
        |f, k| {
            let y = reps[k];
            class_of[u.act_left(mor(f, summed.id(obj(u.tgt(y)).1)), y)]
        },
        |k, g| {
            let y = reps[k];
            class_of[u.act_right(y, mor(g, summed.id(obj(u.src(y)).1)))]
        },
    )?;
    // Actions read off representatives must agree on every member.
    for y in (0..u.len()).filter(|&y| diagonal(y)) {
        let (k1, s1) = obj(u.src(y));
        let (k2, s2) = obj(u.tgt(y));
        for &f in kept.out(k2) {
            if class_of[u.act_left(mor(f, summed.id(s2)), y)] != v.act_left(f, class_of[y]) {
                return Err(Error::NotWellDefined("partial coend left action".into()));
            }
        }
        for &g in kept.incoming(k1) {
            if class_of[u.act_right(y, mor(g, summed.id(s1)))] != v.act_right(class_of[y], g) {
                return Err(Error::NotWellDefined("partial coend right action".into()));
            }
        }
    }
    v.check_laws()?;
    Ok((v, class_of))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FubiniReport {
    pub direct: usize,
    pub first_then_second: usize,
    pub second_then_first: usize,
}

/// Computes the coend of an endo-biset on `c1 × c2` directly and one
/// variable at a time in both orders, and checks that the maps between the
/// results induced by the identity on diagonal elements are bijections.
pub fn check_fubini(u: &Biset, c1: &GroupoidRef, c2: &GroupoidRef) -> Result<FubiniReport> {
    let direct = set_coend(u)?;
    let mut counts = Vec::new();
    for over in [Factor::Second, Factor::First] {
        let (v, partial) = partial_coend(u, c1, c2, over)?;
        let iterated = set_coend(&v)?;
        let mut forward = vec![usize::MAX; direct.num_classes()];
        let mut backward = vec![usize::MAX; iterated.num_classes()];
        for y in (0..u.len()).filter(|&y| u.src(y) == u.tgt(y)) {
            let d = direct.class_of[y];
            let i = iterated.class_of[partial[y]];
            if i == usize::MAX {
                return Err(Error::InvalidCoend("diagonal element left the diagonal".into()));
            }
            if !assign(&mut forward[d], i) {
                return Err(Error::NotWellDefined("direct class splits in the iterated coend".into()));
            }
            if !assign(&mut backward[i], d) {
                return Err(Error::NotWellDefined("iterated class splits in the direct coend".into()));
            }
        }
        if forward.contains(&usize::MAX) || backward.contains(&usize::MAX) {
            return Err(Error::InvalidCoend("comparison map is not bijective".into()));
        }
        counts.push(iterated.num_classes());
    }
    Ok(FubiniReport {
        direct: direct.num_classes(),
        first_then_second: counts[1],
        second_then_first: counts[0],
    })
}

/// The endo-biset `H(c, c') = C(c, x) × M(c')` for a biset `M: 1 → C`.
/// Element `(α, m)` is `i * |M| + m` where `α` is the `i`th morphism into `x`.
pub fn coyoneda_integrand(m: &Biset, x: usize) -> Result<Biset> {
    if m.source().num_objects() != 1 || m.source().num_morphisms() != 1 {
        return Err(Error::InvalidCoend("co-Yoneda needs a biset out of the point".into()));
    }
    let c: GroupoidRef = m.target().clone();
    let ins = c.incoming(x).to_vec();
    let n = m.len();
    let mut src = Vec::with_capacity(ins.len() * n);
    let mut tgt = Vec::with_capacity(ins.len() * n);
    for &a in &ins {
        for e in 0..n {
            src.push(c.src(a));
            tgt.push(m.tgt(e));
        }
    }
    Biset::from_actions(
        c.clone(),
        c.clone(),
        src,
        tgt,
        |g, e| (e / n) * n + m.act_left(g, e % n),
        |e, b| c.in_pos(c.compose(ins[e / n], b)) * n + e % n,
    )
}

/// Checks that evaluation `[α, m] ↦ α·m` is a bijection from the coend of
/// [`coyoneda_integrand`] onto `M(x)`, with inverse `m ↦ [id_x, m]`.
pub fn check_coyoneda(m: &Biset, x: usize) -> Result<usize> {
    let h = coyoneda_integrand(m, x)?;
    let co = set_coend(&h)?;
    let c = &**m.target();
    let n = m.len();
    let ins = c.incoming(x);
    let mut eval = vec![usize::MAX; co.num_classes()];
    for e in (0..h.len()).filter(|&e| h.src(e) == h.tgt(e)) {
        let v = m.act_left(ins[e / n], e % n);
        let k = co.class_of[e];
        if !assign(&mut eval[k], v) {
            return Err(Error::NotWellDefined("evaluation is not constant on a class".into()));
        }
    }
    let fiber = m.with_target(x);
    let id_pos = c.in_pos(c.id(x));
    for &v in fiber {
        let k = co.class_of[id_pos * n + v];
        if eval[k] != v {
            return Err(Error::InvalidCoend("evaluation after the inverse is not the identity".into()));
        }
    }
    for (k, &v) in eval.iter().enumerate() {
        if co.class_of[id_pos * n + v] != k {
            return Err(Error::InvalidCoend("the inverse after evaluation is not the identity".into()));
        }
    }
    if eval.len() != fiber.len() {
        return Err(Error::InvalidCoend("evaluation is not a bijection".into()));
    }
    Ok(eval.len())
}

/// A linear coend problem: free modules `V(c, c')` with actions as
/// matrices (columns are images of basis vectors).
#[derive(Clone, Debug)]
pub struct LinearCoendProblem<T> {
    pub index: GroupoidRef,
    /// `dims[c * n + c']`.
    pub dims: Vec<usize>,
    /// `first[β][c']: V(c, c') → V(d, c')` for `β: d → c`.
    pub first: Vec<Vec<Matrix<T>>>,
    /// `second[α][c]: V(c, c') → V(c, d')` for `α: c' → d'`.
    pub second: Vec<Vec<Matrix<T>>>,
}

#[derive(Clone, Debug)]
pub struct LinearCoendResult<T> {
    pub rank: usize,
    /// Ambient coordinates (in `⊕ V(c, c)`) of the basis of the quotient.
    pub basis: Vec<usize>,
    /// `rank × Σ dim V(c, c)`, sending each ambient vector to its class.
    pub projection: Matrix<T>,
    /// Start of `V(c, c)` inside the ambient space.
    pub offsets: Vec<usize>,
}

impl<T: Scalar> LinearCoendProblem<T> {
    fn dim(&self, c: usize, c2: usize) -> usize {
        self.dims[c * self.index.num_objects() + c2]
    }

    /// Shape, functoriality and commutation checks.
    pub fn check(&self) -> Result<()> {
        let g = &*self.index;
        let n = g.num_objects();
        let bad = |msg: &str| Err(Error::InvalidCoend(msg.into()));
        if self.dims.len() != n * n || self.first.len() != g.num_morphisms() || self.second.len() != g.num_morphisms() {
            return bad("problem has the wrong shape");
        }
        for f in 0..g.num_morphisms() {
            if self.first[f].len() != n || self.second[f].len() != n {
                return bad("action lists have the wrong length");
            }
            for c in 0..n {
                let m = &self.first[f][c];
                if (m.rows(), m.cols()) != (self.dim(g.src(f), c), self.dim(g.tgt(f), c)) {
                    return bad("first-slot action matrix has the wrong size");
                }
                let m = &self.second[f][c];
                if (m.rows(), m.cols()) != (self.dim(c, g.tgt(f)), self.dim(c, g.src(f))) {
                    return bad("second-slot action matrix has the wrong size");
                }
            }
        }
        for x in 0..n {
            for c in 0..n {
                let e = Matrix::identity(self.dim(x, c));
                if self.first[g.id(x)][c] != e {
                    return bad("identity acts nontrivially in the first slot");
                }
                let e = Matrix::identity(self.dim(c, x));
                if self.second[g.id(x)][c] != e {
                    return bad("identity acts nontrivially in the second slot");
                }
            }
        }
        for f in 0..g.num_morphisms() {
            for &f2 in g.out(g.tgt(f)) {
                let ff = g.compose(f2, f);
                for c in 0..n {
                    // Contravariant: (f2 f)^* = f^* f2^*.
                    if self.first[f][c].mul(&self.first[f2][c]) != self.first[ff][c] {
                        return bad("first-slot action is not functorial");
                    }
                    if self.second[f2][c].mul(&self.second[f][c]) != self.second[ff][c] {
                        return bad("second-slot action is not functorial");
                    }
                }
            }
            for a in 0..g.num_morphisms() {
                // β^* then α_* equals α_* then β^* on V(tgt f, src a).
                let lhs = self.second[a][g.src(f)].mul(&self.first[f][g.src(a)]);
                let rhs = self.first[f][g.tgt(a)].mul(&self.second[a][g.tgt(f)]);
                if lhs != rhs {
                    return bad("the two actions do not commute");
                }
            }
        }
        Ok(())
    }

    fn offsets(&self) -> (Vec<usize>, usize) {
        let n = self.index.num_objects();
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0;
        for c in 0..n {
            offsets.push(total);
            total += self.dim(c, c);
        }
        (offsets, total)
    }

    /// Relation vectors `β^* y − β_* y` in `⊕ V(c, c)` for `y ∈ V(c, c')`,
    /// `β: c' → c`.
    pub fn relations(&self) -> Vec<Vec<T>> {
        let g = &*self.index;
        let (offsets, total) = self.offsets();
        let mut rows = Vec::new();
        for b in 0..g.num_morphisms() {
            let (c2, c) = (g.src(b), g.tgt(b));
            let pull = &self.first[b][c2];
            let push = &self.second[b][c];
            for j in 0..self.dim(c, c2) {
                let mut v = vec![T::zero(); total];
                for i in 0..pull.rows() {
                    v[offsets[c2] + i] = v[offsets[c2] + i].clone() + pull[(i, j)].clone();
                }
                for i in 0..push.rows() {
                    v[offsets[c] + i] = v[offsets[c] + i].clone() - push[(i, j)].clone();
                }
                if v.iter().any(|x| !x.is_negligible()) {
                    rows.push(v);
                }
            }
        }
        rows
    }

    /// Linearization of a set problem: permutation matrices on fibers.
    pub fn linearize(u: &Biset) -> Result<Self> {
        require_endo(u)?;
        let g: GroupoidRef = u.source().clone();
        let n = g.num_objects();
        let dims: Vec<usize> = u.fiber_sizes();
        let pos = |y: usize| u.fiber(u.src(y), u.tgt(y)).iter().position(|&z| z == y).expect("element in fiber");
        let mut first = Vec::with_capacity(g.num_morphisms());
        let mut second = Vec::with_capacity(g.num_morphisms());
        for f in 0..g.num_morphisms() {
            let (s, t) = (g.src(f), g.tgt(f));
            let mut row_first = Vec::with_capacity(n);
            let mut row_second = Vec::with_capacity(n);
            for c in 0..n {
                let dom = u.fiber(t, c);
                let mut m = Matrix::zeros(dims[s * n + c], dom.len());
                for (j, &y) in dom.iter().enumerate() {
                    m[(pos(u.act_right(y, f)), j)] = T::one();
                }
                row_first.push(m);
                let dom = u.fiber(c, s);
                let mut m = Matrix::zeros(dims[c * n + t], dom.len());
                for (j, &y) in dom.iter().enumerate() {
                    m[(pos(u.act_left(f, y)), j)] = T::one();
                }
                row_second.push(m);
            }
            first.push(row_first);
            second.push(row_second);
        }
        Ok(LinearCoendProblem {
            index: g,
            dims,
            first,
            second,
        })
    }
}

/// Cokernel of the relation matrix by Gauss-Jordan elimination.
pub fn linear_coend<T: Scalar>(p: &LinearCoendProblem<T>) -> Result<LinearCoendResult<T>> {
    p.check()?;
    let (offsets, total) = p.offsets();
    let rel = p.relations();
    let mut r = Matrix::from_rows(rel, total);
    let pivots = r.rref();
    let mut pivot_row = vec![usize::MAX; total];
    for (row, &c) in pivots.iter().enumerate() {
        pivot_row[c] = row;
    }
    let basis: Vec<usize> = (0..total).filter(|&c| pivot_row[c] == usize::MAX).collect();
    let mut projection = Matrix::zeros(basis.len(), total);
    for (k, &b) in basis.iter().enumerate() {
        projection[(k, b)] = T::one();
    }
    // A pivot coordinate equals minus the free part of its reduced row.
    for (c, &row) in pivot_row.iter().enumerate() {
        if row == usize::MAX {
            continue;
        }
        for (k, &b) in basis.iter().enumerate() {
            projection[(k, c)] = -r[(row, b)].clone();
        }
    }
    let result = LinearCoendResult {
        rank: basis.len(),
        basis,
        projection,
        offsets,
    };
    verify_linear_coend(p, &result)?;
    Ok(result)
}

/// Projection has full row rank and its kernel is the span of the relations.
pub fn verify_linear_coend<T: Scalar>(p: &LinearCoendProblem<T>, r: &LinearCoendResult<T>) -> Result<()> {
    let (_, total) = p.offsets();
    let rel = p.relations();
    for v in &rel {
        if r.projection.apply(v).iter().any(|x| !x.is_negligible()) {
            return Err(Error::InvalidCoend("a relation survives the projection".into()));
        }
    }
    let rel_rank = Matrix::from_rows(rel, total).rank();
    if r.projection.rank() != r.rank || rel_rank + r.rank != total {
        return Err(Error::InvalidCoend("projection kernel differs from the relation span".into()));
    }
    Ok(())
}

/// Integer coend of a set problem: free rank and torsion invariants of the
/// cokernel of the integer relation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerCoend {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn integer_coend(u: &Biset) -> Result<IntegerCoend> {
    let p = LinearCoendProblem::<num_rational::BigRational>::linearize(u)?;
    p.check()?;
    let (_, total) = p.offsets();
    let rows: Vec<Vec<BigInt>> = p.relations().into_iter().map(|v| v.into_iter().map(|x| x.to_integer()).collect()).collect();
    let inv = smith_invariants(&Matrix::from_rows(rows, total));
    Ok(IntegerCoend {
        rank: total - inv.len(),
        torsion: inv.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::shared;
    use crate::group::named_group;
    use num_rational::BigRational;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bg(name: &str) -> GroupoidRef {
        shared(Groupoid::from_group(&named_group(name).unwrap()))
    }

    fn point() -> GroupoidRef {
        shared(Groupoid::point())
    }

    /// Naive closure of the generating relation: repeat until stable.
    fn naive_classes(u: &Biset) -> usize {
        let c = &**u.source();
        let diag: Vec<usize> = (0..u.len()).filter(|&y| u.src(y) == u.tgt(y)).collect();
        let mut label: Vec<usize> = (0..u.len()).collect();
        loop {
            let mut changed = false;
            for y in 0..u.len() {
                for &a in c.hom(u.tgt(y), u.src(y)) {
                    let (p, q) = (u.act_right(y, a), u.act_left(a, y));
                    let m = label[p].min(label[q]);
                    for z in 0..u.len() {
                        if (label[z] == label[p] || label[z] == label[q]) && label[z] != m {
                            label[z] = m;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut ls: Vec<usize> = diag.iter().map(|&y| label[y]).collect();
        ls.sort_unstable();
        ls.dedup();
        ls.len()
    }

    #[test]
    fn point_coend_is_the_set() {
        let one = point();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = Biset::random(&one, &one, &mut rng, 4);
        assert_eq!(set_coend(&u).unwrap().num_classes(), u.len());
    }

    #[test]
    fn identity_self_composite_on_c2() {
        // Four pairs, identified in two classes indexed by the product.
        let c2 = bg("C2");
        // The integrand C2(•,•) × C2(•,•) with translation actions.
        let g = &*c2;
        let h = Biset::from_actions(
            c2.clone(),
            c2.clone(),
            vec![0; 4],
            vec![0; 4],
            |a, e| g.compose(a, e / 2) * 2 + e % 2,
            |e, b| (e / 2) * 2 + g.compose(e % 2, b),
        )
        .unwrap();
        let co = set_coend(&h).unwrap();
        assert_eq!(co.num_classes(), 2);
        assert_eq!(naive_classes(&h), 2);
        for e in 0..4 {
            for e2 in 0..4 {
                let same = g.compose(e % 2, e / 2) == g.compose(e2 % 2, e2 / 2);
                assert_eq!(co.class_of[e] == co.class_of[e2], same);
            }
        }
    }

    #[test]
    fn discrete_diagonal() {
        let two = shared(Groupoid::discrete(2));
        let id = Biset::identity(&two);
        assert_eq!(set_coend(&id).unwrap().num_classes(), 2);
    }

    #[test]
    fn union_find_matches_naive_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in ["C2", "C3", "S3", "V4"] {
            let g = bg(name);
            let gg = shared(Groupoid::disjoint_union(&g, &Groupoid::codiscrete(2)));
            for _ in 0..10 {
                let u = Biset::random(&gg, &gg, &mut rng, 3);
                let co = set_coend(&u).unwrap();
                assert_eq!(co.num_classes(), naive_classes(&u));
            }
        }
    }

    #[test]
    fn fubini_on_small_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c2 = bg("C2");
        let one = point();
        let p = shared(Groupoid::product(&c2, &one));
        let u = Biset::identity(&p);
        let r = check_fubini(&u, &c2, &one).unwrap();
        assert_eq!((r.direct, r.first_then_second, r.second_then_first), (2, 2, 2));
        let two = shared(Groupoid::codiscrete(2));
        let c3 = bg("C3");
        let p = shared(Groupoid::product(&two, &c3));
        for _ in 0..10 {
            let u = Biset::random(&p, &p, &mut rng, 3);
            let r = check_fubini(&u, &two, &c3).unwrap();
            assert_eq!(r.direct, r.first_then_second);
            assert_eq!(r.direct, r.second_then_first);
        }
    }

    #[test]
    fn coyoneda_examples() {
        let c2 = bg("C2");
        let one = point();
        // Regular representation: M(•) = C2.
        let regular = Biset::transitive(&one, &c2, 0, 0, &[]).unwrap();
        assert_eq!(check_coyoneda(&regular, 0).unwrap(), 2);
        let trivial = Biset::transitive(&one, &c2, 0, 0, &[(1, 0)]).unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(check_coyoneda(&trivial, 0).unwrap(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gg = shared(Groupoid::disjoint_union(&bg("S3"), &Groupoid::codiscrete(2)));
        for _ in 0..10 {
            let m = Biset::random(&one, &gg, &mut rng, 3);
            for x in 0..gg.num_objects() {
                assert_eq!(check_coyoneda(&m, x).unwrap(), m.with_target(x).len());
            }
        }
    }

    #[test]
    fn linear_coend_of_linearization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gg = shared(Groupoid::disjoint_union(&bg("S3"), &Groupoid::codiscrete(2)));
        for _ in 0..5 {
            let u = Biset::random(&gg, &gg, &mut rng, 3);
            let p = LinearCoendProblem::<BigRational>::linearize(&u).unwrap();
            let r = linear_coend(&p).unwrap();
            assert_eq!(r.rank, set_coend(&u).unwrap().num_classes());
            let z = integer_coend(&u).unwrap();
            assert_eq!(z.rank, r.rank);
            assert!(z.torsion.is_empty());
            let pf = LinearCoendProblem::<f64>::linearize(&u).unwrap();
            assert_eq!(linear_coend(&pf).unwrap().rank, r.rank);
        }
    }

    #[test]
    fn swap_on_one_side_has_rank_one() {
        let c2 = bg("C2");
        let g = &*c2;
        let swap = Matrix::from_rows(vec![vec![BigRational::zero(), BigRational::one()], vec![BigRational::one(), BigRational::zero()]], 2);
        let id = Matrix::identity(2);
        let act = |f: usize| if f == g.id(0) { id.clone() } else { swap.clone() };
        let p = LinearCoendProblem {
            index: c2.clone(),
            dims: vec![2],
            first: (0..2).map(|f| vec![act(f)]).collect(),
            second: (0..2).map(|_| vec![id.clone()]).collect(),
        };
        assert_eq!(linear_coend(&p).unwrap().rank, 1);
        let zero = LinearCoendProblem::<BigRational> {
            index: c2.clone(),
            dims: vec![0],
            first: (0..2).map(|_| vec![Matrix::zeros(0, 0)]).collect(),
            second: (0..2).map(|_| vec![Matrix::zeros(0, 0)]).collect(),
        };
        assert_eq!(linear_coend(&zero).unwrap().rank, 0);
    }

    #[test]
    fn rejects_non_functorial_problem() {
        let c2 = bg("C2");
        let id = Matrix::<BigRational>::identity(1);
        let neg = Matrix::from_rows(vec![vec![-BigRational::one()]], 1);
        let p = LinearCoendProblem {
            index: c2.clone(),
            dims: vec![1],
            first: vec![vec![id.clone()], vec![id.clone()]],
            second: vec![vec![neg.clone()], vec![neg]],
        };
        assert!(linear_coend(&p).is_err());
    }
}
