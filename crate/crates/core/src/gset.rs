//! Finite G-sets, spans of G-maps and Yoshida's functor to permutation
//! modules.
//!
//! A span `X ←α S →β Y` goes to `Yo_*(β) ∘ Yo^*(α)`, the matrix sending the
//! basis vector of `x` to `Σ_{s ∈ α⁻¹(x)} β(s)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::linear::{saturate_ideal, BasedCategory, LinearHom};
use crate::matrix::{Matrix, RowSpace};
use crate::report::Report;
use crate::scalar::Scalar;

pub type GroupRef = Arc<FiniteGroup>;

fn same_group(a: &GroupRef, b: &GroupRef) -> bool {
    Arc::ptr_eq(a, b) || a.table() == b.table()
}

/// A finite left G-set; `g·x` is stored at `action[g * len + x]`.
#[derive(Clone, Debug)]
pub struct GSet {
    group: GroupRef,
    size: usize,
    action: Vec<usize>,
}

impl PartialEq for GSet {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.action == other.action && same_group(&self.group, &other.group)
    }
}

impl GSet {
    pub fn new(group: &GroupRef, size: usize, action: Vec<usize>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidGSet(m.into()));
        if action.len() != group.order() * size || action.iter().any(|&y| y >= size) {
            return bad("action table has the wrong shape");
        }
        let s = GSet {
            group: group.clone(),
            size,
            action,
        };
        let e = group.identity();
        for x in 0..size {
            if s.act(e, x) != x {
                return bad("identity does not act trivially");
            }
            for g in group.elements() {
                for h in group.elements() {
                    if s.act(g, s.act(h, x)) != s.act(group.mul(g, h), x) {
                        return bad("action is not compatible with multiplication");
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn from_fn(group: &GroupRef, size: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let action = group.elements().flat_map(|g| (0..size).map(move |x| (g, x))).map(|(g, x)| f(g, x)).collect();
        GSet::new(group, size, action)
    }

    pub fn point(group: &GroupRef) -> Self {
        GSet {
            group: group.clone(),
            size: 1,
            action: vec![0; group.order()],
        }
    }

    /// `G/H`; element `i` is the `i`-th left coset in the order of
    /// [`FiniteGroup::left_cosets`].
    pub fn cosets(group: &GroupRef, h: &[usize]) -> Result<Self> {
        if !group.is_subgroup(h) {
            return Err(Error::NotASubgroup(format!("{h:?}")));
        }
        let cosets = group.left_cosets(h);
        let mut coset_of = vec![0; group.order()];
        for (i, c) in cosets.iter().enumerate() {
            for &g in c {
                coset_of[g] = i;
            }
        }
        GSet::from_fn(group, cosets.len(), |g, i| coset_of[group.mul(g, cosets[i][0])])
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g * self.size + x]
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for x in 0..self.size {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = self.group.elements().map(|g| self.act(g, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        self.group.elements().filter(|&g| self.act(g, x) == x).collect()
    }

    pub fn fixed_points(&self, l: &[usize]) -> Vec<usize> {
        (0..self.size).filter(|&x| l.iter().all(|&g| self.act(g, x) == x)).collect()
    }

    /// The sub-G-set on a union of orbits; returns it with the inclusion.
    pub fn restrict(&self, elements: &[usize]) -> Result<(GSet, Vec<usize>)> {
        let mut position = HashMap::new();
        for (i, &x) in elements.iter().enumerate() {
            position.insert(x, i);
        }
        let mut action = Vec::with_capacity(self.group.order() * elements.len());
        for g in self.group.elements() {
            for &x in elements {
                let y = self.act(g, x);
                action.push(*position.get(&y).ok_or_else(|| Error::InvalidGSet("subset is not invariant".into()))?);
            }
        }
        Ok((
            GSet {
                group: self.group.clone(),
                size: elements.len(),
                action,
            },
            elements.to_vec(),
        ))
    }

    /// Permutation matrix of `g` on `k[X]`.
    pub fn permutation_matrix<T: Scalar>(&self, g: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(self.size, self.size);
        for x in 0..self.size {
            m[(self.act(g, x), x)] = T::one();
        }
        m
    }
}

pub fn is_equivariant(source: &GSet, target: &GSet, map: &[usize]) -> bool {
    map.len() == source.len()
        && map.iter().all(|&y| y < target.len())
        && source.group.elements().all(|g| (0..source.len()).all(|x| map[source.act(g, x)] == target.act(g, map[x])))
}

/// A span `X ←left S →right Y` of G-maps.
#[derive(Clone, Debug, PartialEq)]
pub struct GSpan {
    pub source: GSet,
    pub target: GSet,
    pub apex: GSet,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl GSpan {
    pub fn new(source: GSet, target: GSet, apex: GSet, left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if !same_group(&source.group, &target.group) || !same_group(&source.group, &apex.group) {
            return Err(Error::Mismatch("span legs over different groups".into()));
        }
        if !is_equivariant(&apex, &source, &left) || !is_equivariant(&apex, &target, &right) {
            return Err(Error::InvalidGSet("span leg is not a G-map".into()));
        }
        Ok(GSpan {
            source,
            target,
            apex,
            left,
            right,
        })
    }

    pub fn identity(x: &GSet) -> Self {
        let id: Vec<usize> = (0..x.len()).collect();
        GSpan {
            source: x.clone(),
            target: x.clone(),
            apex: x.clone(),
            left: id.clone(),
            right: id,
        }
    }

    pub fn empty(x: &GSet, y: &GSet) -> Self {
        GSpan {
            source: x.clone(),
            target: y.clone(),
            apex: GSet {
                group: x.group.clone(),
                size: 0,
                action: vec![],
            },
            left: vec![],
            right: vec![],
        }
    }

    /// `X ←id X →f Y`.
    pub fn covariant(x: &GSet, y: &GSet, f: Vec<usize>) -> Result<Self> {
        GSpan::new(x.clone(), y.clone(), x.clone(), (0..x.len()).collect(), f)
    }

    /// `Y ←f X →id X`.
    pub fn contravariant(x: &GSet, y: &GSet, f: Vec<usize>) -> Result<Self> {
        GSpan::new(y.clone(), x.clone(), x.clone(), f, (0..x.len()).collect())
    }

    /// One span per apex orbit.
    pub fn decompose(&self) -> Vec<GSpan> {
        self.apex
            .orbits()
            .into_iter()
            .map(|orbit| {
                let (apex, incl) = self.apex.restrict(&orbit).expect("orbits are invariant");
                GSpan {
                    source: self.source.clone(),
                    target: self.target.clone(),
                    apex,
                    left: incl.iter().map(|&s| self.left[s]).collect(),
                    right: incl.iter().map(|&s| self.right[s]).collect(),
                }
            })
            .collect()
    }
}

/// `t ∘ s` for `s: X → Y` and `t: Y → Z`; the apex is the fiber product
/// `S ×_Y T`, pairs `(a, b)` listed in lexicographic order.
pub fn gspan_compose(t: &GSpan, s: &GSpan) -> Result<GSpan> {
    if s.target != t.source {
        return Err(Error::Mismatch("middle G-sets differ".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..s.apex.len())
        .flat_map(|a| (0..t.apex.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| s.right[a] == t.left[b])
        .collect();
    let position: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let group = s.apex.group.clone();
    let apex = GSet::from_fn(&group, pairs.len(), |g, i| {
        let (a, b) = pairs[i];
        position[&(s.apex.act(g, a), t.apex.act(g, b))]
    })?;
    GSpan::new(
        s.source.clone(),
        t.target.clone(),
        apex,
        pairs.iter().map(|&(a, _)| s.left[a]).collect(),
        pairs.iter().map(|&(_, b)| t.right[b]).collect(),
    )
}

/// Tries to extend `s0 ↦ z` to an isomorphism of transitive spans.
fn transitive_iso(s: &GSpan, t: &GSpan, z: usize) -> bool {
    let g = &s.apex.group;
    let mut map = vec![usize::MAX; s.apex.len()];
    for h in g.elements() {
        let (x, y) = (s.apex.act(h, 0), t.apex.act(h, z));
        if map[x] == usize::MAX {
            map[x] = y;
        } else if map[x] != y {
            return false;
        }
    }
    let mut hit = vec![false; t.apex.len()];
    for (x, &y) in map.iter().enumerate() {
        if y == usize::MAX || hit[y] || s.left[x] != t.left[y] || s.right[x] != t.right[y] {
            return false;
        }
        hit[y] = true;
    }
    true
}

/// Exhaustive decision of span isomorphism: orbits are matched greedily and
/// each pair of transitive pieces is tested on every image of a base point.
pub fn gspans_isomorphic(s: &GSpan, t: &GSpan) -> bool {
    if s.source != t.source || s.target != t.target || s.apex.len() != t.apex.len() {
        return false;
    }
    let ps = s.decompose();
    let mut pt: Vec<Option<GSpan>> = t.decompose().into_iter().map(Some).collect();
    if ps.len() != pt.len() {
        return false;
    }
    for a in &ps {
        let found = pt.iter().position(|b| {
            b.as_ref()
                .is_some_and(|b| b.apex.len() == a.apex.len() && (0..b.apex.len()).any(|z| transitive_iso(a, b, z)))
        });
        match found {
            Some(j) => pt[j] = None,
            None => return false,
        }
    }
    true
}

/// Iso classes of spans `X → Y` with transitive apex: for each conjugacy
/// class of subgroups `L`, the `N(L)`-orbits on `(X × Y)^L`.
#[derive(Debug)]
pub struct GSpanBasis {
    pub source: GSet,
    pub target: GSet,
    pub elements: Vec<GSpan>,
    pub labels: Vec<String>,
    classes: Vec<Vec<Subgroup>>,
    normalizers: Vec<Subgroup>,
    index: HashMap<(usize, (usize, usize)), usize>,
}

fn canonical_fixed_pair(x: &GSet, y: &GSet, normalizer: &[usize], p: (usize, usize)) -> (usize, usize) {
    normalizer.iter().map(|&n| (x.act(n, p.0), y.act(n, p.1))).min().expect("normalizer contains 1")
}

pub fn gspan_hom_basis(x: &GSet, y: &GSet) -> Result<GSpanBasis> {
    if !same_group(&x.group, &y.group) {
        return Err(Error::Mismatch("G-sets over different groups".into()));
    }
    let group = x.group.clone();
    let classes = group.subgroup_classes();
    let normalizers: Vec<Subgroup> = classes.iter().map(|c| group.normalizer(&c[0])).collect();
    let mut basis = GSpanBasis {
        source: x.clone(),
        target: y.clone(),
        elements: Vec::new(),
        labels: Vec::new(),
        classes,
        normalizers,
        index: HashMap::new(),
    };
    for ci in 0..basis.classes.len() {
        let l = &basis.classes[ci][0];
        let apex = GSet::cosets(&group, l)?;
        let reps: Vec<usize> = group.left_cosets(l).iter().map(|c| c[0]).collect();
        for &a in &x.fixed_points(l) {
            for &b in &y.fixed_points(l) {
                let canon = canonical_fixed_pair(x, y, &basis.normalizers[ci], (a, b));
                if canon != (a, b) {
                    continue;
                }
                let span = GSpan::new(
                    x.clone(),
                    y.clone(),
                    apex.clone(),
                    reps.iter().map(|&r| x.act(r, a)).collect(),
                    reps.iter().map(|&r| y.act(r, b)).collect(),
                )?;
                basis.index.insert((ci, canon), basis.elements.len());
                basis.labels.push(format!("G/L |L|={} ({a},{b})", l.len()));
                basis.elements.push(span);
            }
        }
    }
    Ok(basis)
}

impl GSpanBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Basis index of a span with transitive apex.
    pub fn locate(&self, s: &GSpan) -> Result<usize> {
        let group = &self.source.group;
        let stab = s.apex.stabilizer(0);
        for (ci, class) in self.classes.iter().enumerate() {
            if class[0].len() != stab.len() || !class.contains(&stab) {
                continue;
            }
            let l = &class[0];
            let g = group
                .elements()
                .find(|&g| group.conjugate_subgroup(g, &stab) == *l)
                .expect("conjugate within the class");
            let s1 = s.apex.act(g, 0);
            let canon = canonical_fixed_pair(&self.source, &self.target, &self.normalizers[ci], (s.left[s1], s.right[s1]));
            return self
                .index
                .get(&(ci, canon))
                .copied()
                .ok_or_else(|| Error::Mismatch("span of G-sets missing from the basis".into()));
        }
        Err(Error::Mismatch("stabilizer is in no subgroup class".into()))
    }

    pub fn coordinates(&self, s: &GSpan) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.len()];
        for piece in s.decompose() {
            counts[self.locate(&piece)?] += 1;
        }
        Ok(counts)
    }
}

/// `Yo(s)`: rows index `Y`, columns index `X`.
pub fn yoshida_matrix<T: Scalar>(s: &GSpan) -> Matrix<T> {
    let mut m = Matrix::<T>::zeros(s.target.len(), s.source.len());
    for e in 0..s.apex.len() {
        let (r, c) = (s.right[e], s.left[e]);
        m[(r, c)] = m[(r, c)].clone() + T::one();
    }
    m
}

/// `Yo_*(f): k[A] → k[B]`.
pub fn pushforward_matrix<T: Scalar>(a: &GSet, b: &GSet, f: &[usize]) -> Matrix<T> {
    let mut m = Matrix::zeros(b.len(), a.len());
    for (x, &y) in f.iter().enumerate() {
        m[(y, x)] = T::one();
    }
    m
}

/// `Yo^*(f): k[B] → k[A]`, `b ↦ Σ_{f(a)=b} a`.
pub fn pullback_matrix<T: Scalar>(a: &GSet, b: &GSet, f: &[usize]) -> Matrix<T> {
    pushforward_matrix::<T>(a, b, f).transpose()
}

/// `M` commutes with the permutation actions on `k[X]` and `k[Y]`.
pub fn is_equivariant_matrix<T: Scalar>(m: &Matrix<T>, x: &GSet, y: &GSet) -> bool {
    x.group.elements().all(|g| {
        (0..y.len()).all(|r| (0..x.len()).all(|c| m[(y.act(g, r), x.act(g, c))] == m[(r, c)]))
    })
}

/// Dimension of the space of equivariant maps `k[X] → k[Y]`, by solving
/// `M[g·y][g·x] = M[y][x]` for the generators.
pub fn equivariant_hom_dim<T: Scalar>(x: &GSet, y: &GSet) -> usize {
    let n = x.len() * y.len();
    let gens = x.group.generators();
    let mut rows = Vec::with_capacity(gens.len() * n);
    for &g in &gens {
        for r in 0..y.len() {
            for c in 0..x.len() {
                let mut row = vec![T::zero(); n];
                let (a, b) = (y.act(g, r) * x.len() + x.act(g, c), r * x.len() + c);
                if a != b {
                    row[a] = T::one();
                    row[b] = -T::one();
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return n;
    }
    n - Matrix::from_rows(rows, n).rank()
}

fn flatten<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YoshidaRank {
    pub basis: usize,
    pub rank: usize,
    pub double_cosets: usize,
    pub hom_dim: usize,
}

impl YoshidaRank {
    pub fn holds(&self) -> bool {
        self.rank == self.double_cosets && self.rank == self.hom_dim
    }
}

/// Rank of the Yoshida image of `span(G/H, G/K)`, against `|H\G/K|` and the
/// dimension of the equivariant hom space.
pub fn yoshida_rank_check<T: Scalar>(group: &GroupRef, h: &[usize], k: &[usize]) -> Result<YoshidaRank> {
    let (x, y) = (GSet::cosets(group, h)?, GSet::cosets(group, k)?);
    let basis = gspan_hom_basis(&x, &y)?;
    let mut space = RowSpace::new(x.len() * y.len());
    for s in &basis.elements {
        let m = yoshida_matrix::<T>(s);
        if !is_equivariant_matrix(&m, &x, &y) {
            return Err(Error::Mismatch("Yoshida matrix is not equivariant".into()));
        }
        space.insert(&flatten(&m));
    }
    Ok(YoshidaRank {
        basis: basis.len(),
        rank: space.rank(),
        double_cosets: group.double_cosets(h, k).len(),
        hom_dim: equivariant_hom_dim::<T>(&x, &y),
    })
}

/// The category of transitive G-sets `G/H`, one per conjugacy class of
/// subgroups, with the spans of transitive apex as hom bases.
pub struct TransitiveSpans {
    pub group: GroupRef,
    pub subgroups: Vec<Subgroup>,
    pub objects: Vec<GSet>,
    bases: Vec<GSpanBasis>,
    cache: Mutex<HashMap<(usize, usize, usize, usize, usize), Vec<usize>>>,
}

impl TransitiveSpans {
    pub fn new(group: &GroupRef) -> Result<Self> {
        let subgroups: Vec<Subgroup> = group.subgroup_classes().into_iter().map(|c| c[0].clone()).collect();
        let objects = subgroups.iter().map(|h| GSet::cosets(group, h)).collect::<Result<Vec<_>>>()?;
        let n = objects.len();
        let bases = (0..n * n)
            .into_par_iter()
            .map(|i| gspan_hom_basis(&objects[i / n], &objects[i % n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransitiveSpans {
            group: group.clone(),
            subgroups,
            objects,
            bases,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn basis(&self, x: usize, y: usize) -> &GSpanBasis {
        &self.bases[x * self.objects.len() + y]
    }

    pub fn object_of(&self, h: &[usize]) -> Option<usize> {
        self.subgroups.iter().position(|s| s.as_slice() == h)
    }

    /// Yoshida images of the basis of hom `(x, y)` as columns.
    pub fn yoshida_columns<T: Scalar>(&self, x: usize, y: usize) -> Matrix<T> {
        let cols: Vec<Vec<T>> = self.basis(x, y).elements.iter().map(|s| flatten(&yoshida_matrix::<T>(s))).collect();
        Matrix::from_columns(&cols, self.objects[x].len() * self.objects[y].len())
    }
}

impl BasedCategory for TransitiveSpans {
    fn num_objects(&self) -> usize {
        self.objects.len()
    }

    fn hom_dim(&self, x: usize, y: usize) -> usize {
        self.basis(x, y).len()
    }

    fn compose_basis(&self, x: usize, y: usize, z: usize, outer: usize, inner: usize) -> Result<Option<Vec<usize>>> {
        let key = (x, y, z, outer, inner);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Some(hit.clone()));
        }
        let c = gspan_compose(&self.basis(y, z).elements[outer], &self.basis(x, y).elements[inner])?;
        let coords = self.basis(x, z).coordinates(&c)?;
        self.cache.lock().expect("cache lock").insert(key, coords.clone());
        Ok(Some(coords))
    }
}

/// The projection `G/L → G/H` for `L ≤ H`.
pub fn projection(group: &GroupRef, l: &[usize], h: &[usize]) -> Result<(GSet, GSet, Vec<usize>)> {
    if !l.iter().all(|a| h.contains(a)) {
        return Err(Error::NotASubgroup("L is not contained in H".into()));
    }
    let (gl, gh) = (GSet::cosets(group, l)?, GSet::cosets(group, h)?);
    let cosets_h = group.left_cosets(h);
    let map = group
        .left_cosets(l)
        .iter()
        .map(|c| cosets_h.iter().position(|d| d.contains(&c[0])).expect("cosets cover G"))
        .collect();
    Ok((gl, gh, map))
}

#[derive(Clone, Debug)]
pub struct CohomologicalHom {
    pub source: usize,
    pub target: usize,
    pub basis: usize,
    pub kernel_rank: usize,
    pub ideal_rank: usize,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct CohomologicalReport {
    /// `(|H|, |L|, Yo kills the relation)`.
    pub relations: Vec<(usize, usize, bool)>,
    pub homs: Vec<CohomologicalHom>,
}

impl CohomologicalReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| r.2) && self.homs.iter().all(|h| h.equal)
    }

    pub fn to_report(&self, name: &str) -> Report {
        let mut r = Report::new(format!("cohomological-kernel {name}"));
        for &(h, l, ok) in &self.relations {
            r.push(format!("ind res - index, |H|={h} |L|={l}"), ok, "");
        }
        for h in &self.homs {
            r.push(
                format!("hom {}->{}", h.source, h.target),
                h.equal,
                format!("basis {}, kernel {}, ideal {}", h.basis, h.kernel_rank, h.ideal_rank),
            );
        }
        r
    }
}

/// `[G/H ← G/L → G/H] − [H:L]·Id` is killed by Yoshida's functor, and on
/// every hom the kernel equals the ideal these relations generate.
pub fn cohomological_kernel_check<T: Scalar>(group: &GroupRef) -> Result<CohomologicalReport> {
    let cat = TransitiveSpans::new(group)?;
    let n = cat.objects.len();
    let all = group.subgroups();
    let mut relations = Vec::new();
    let mut generators: Vec<Vec<LinearHom<T>>> = vec![Vec::new(); n];
    for (x, h) in cat.subgroups.iter().enumerate() {
        let basis = cat.basis(x, x);
        let id = basis.locate(&GSpan::identity(&cat.objects[x]))?;
        for l in all.iter().filter(|l| l.iter().all(|a| h.contains(a)) && l.len() < h.len()) {
            let (gl, gh, p) = projection(group, l, h)?;
            let span = GSpan::new(gh.clone(), gh.clone(), gl, p.clone(), p)?;
            let index = T::from_i64((h.len() / l.len()) as i64);
            let yo = yoshida_matrix::<T>(&span);
            let killed = (0..gh.len()).all(|r| {
                (0..gh.len()).all(|c| {
                    let expected = if r == c { index.clone() } else { T::zero() };
                    yo[(r, c)] == expected
                })
            });
            relations.push((h.len(), l.len(), killed));
            let k = basis.locate(&span)?;
            generators[x].push(LinearHom::from_terms([(k, T::one()), (id, -index.clone())]));
        }
    }
    let ideal = saturate_ideal(&cat, &generators, None)?;
    let mut homs = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let yo = cat.yoshida_columns::<T>(x, y);
            let kernel = yo.nullspace();
            let space = &ideal[x * n + y];
            let inside = kernel.iter().all(|v| space.contains(v));
            let killed = space.basis().iter().all(|v| yo.apply(v).iter().all(Scalar::is_negligible));
            homs.push(CohomologicalHom {
                source: x,
                target: y,
                basis: cat.basis(x, y).len(),
                kernel_rank: kernel.len(),
                ideal_rank: space.rank(),
                equal: inside && killed,
            });
        }
    }
    Ok(CohomologicalReport { relations, homs })
}

#[derive(Clone, Debug)]
pub struct FixedPointValue {
    pub subgroup: Subgroup,
    pub fixed_rank: usize,
    pub hom_rank: usize,
}

/// A structure map of `FP` as a multiple of the orbit-sum bases.
#[derive(Clone, Debug)]
pub struct FixedPointMap<T> {
    pub kind: &'static str,
    pub from: Subgroup,
    pub to: Subgroup,
    pub coefficient: Option<T>,
    pub expected: T,
}

impl<T: Scalar> FixedPointMap<T> {
    pub fn holds(&self) -> bool {
        self.coefficient.as_ref() == Some(&self.expected)
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointFunctor<T> {
    pub values: Vec<FixedPointValue>,
    pub maps: Vec<FixedPointMap<T>>,
}

impl<T: Scalar> FixedPointFunctor<T> {
    pub fn passed(&self) -> bool {
        self.values.iter().all(|v| v.fixed_rank == 1 && v.hom_rank == 1) && self.maps.iter().all(FixedPointMap::holds)
    }

    pub fn to_report(&self, name: &str, integer_diagnostics: bool) -> Report {
        let mut r = Report::new(format!("fixed-point {name}"));
        for v in &self.values {
            r.push(
                format!("FP(|H|={}) rank", v.subgroup.len()),
                v.fixed_rank == 1 && v.hom_rank == 1,
                format!("fixed vectors {}, hom space {}", v.fixed_rank, v.hom_rank),
            );
        }
        for m in &self.maps {
            let got = m.coefficient.as_ref().map_or("none".to_string(), |c| c.to_string());
            r.push(
                format!("{} |{}|->|{}|", m.kind, m.from.len(), m.to.len()),
                m.holds(),
                format!("acts by {got}, expected {}", m.expected),
            );
            if integer_diagnostics && m.kind == "ind" && m.expected != T::one() {
                r.note(format!(
                    "ind |{}|->|{}| acts by {} and is not invertible over the integers",
                    m.from.len(),
                    m.to.len(),
                    m.expected
                ));
            }
        }
        r
    }
}

/// Coefficient `c` with `v = c·(1, …, 1)`, if any.
fn orbit_sum_multiple<T: Scalar>(v: &[T]) -> Option<T> {
    let c = v.first()?.clone();
    v.iter().all(|x| *x == c).then_some(c)
}

/// Fixed vectors of `k[X]`, as a basis of the common kernel of `P(g) − 1`.
pub fn fixed_vectors<T: Scalar>(x: &GSet) -> Vec<Vec<T>> {
    let mut rows = Vec::new();
    for g in x.group.generators() {
        for c in 0..x.len() {
            let d = x.act(g, c);
            if d != c {
                let mut row = vec![T::zero(); x.len()];
                row[d] = T::one();
                row[c] = -T::one();
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return (0..x.len()).map(|i| (0..x.len()).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    }
    Matrix::from_rows(rows, x.len()).nullspace()
}

/// `FP(H) = Hom(k, k[G/H])` with induction, restriction and conjugation
/// computed from Yoshida matrices.
pub fn fixed_point_functor<T: Scalar>(group: &GroupRef) -> Result<FixedPointFunctor<T>> {
    let subs = group.subgroups();
    let point = GSet::point(group);
    let mut values = Vec::new();
    for h in &subs {
        let x = GSet::cosets(group, h)?;
        let fixed = fixed_vectors::<T>(&x);
        let basis = gspan_hom_basis(&point, &x)?;
        let mut space = RowSpace::new(x.len());
        for s in &basis.elements {
            space.insert(&flatten(&yoshida_matrix::<T>(s)));
        }
        values.push(FixedPointValue {
            subgroup: h.clone(),
            fixed_rank: fixed.len(),
            hom_rank: space.rank(),
        });
    }
    let ones = |n: usize| vec![T::one(); n];
    let mut maps = Vec::new();
    for h in &subs {
        for l in subs.iter().filter(|l| l.iter().all(|a| h.contains(a)) && l.len() < h.len()) {
            let (gl, gh, p) = projection(group, l, h)?;
            let ind = yoshida_matrix::<T>(&GSpan::covariant(&gl, &gh, p.clone())?);
            maps.push(FixedPointMap {
                kind: "ind",
                from: l.clone(),
                to: h.clone(),
                coefficient: orbit_sum_multiple(&ind.apply(&ones(gl.len()))),
                expected: T::from_i64((h.len() / l.len()) as i64),
            });
            let res = yoshida_matrix::<T>(&GSpan::contravariant(&gl, &gh, p)?);
            maps.push(FixedPointMap {
                kind: "res",
                from: h.clone(),
                to: l.clone(),
                coefficient: orbit_sum_multiple(&res.apply(&ones(gh.len()))),
                expected: T::one(),
            });
        }
        for g in group.generators() {
            let conj = group.conjugate_subgroup(g, h);
            let (x, y) = (GSet::cosets(group, h)?, GSet::cosets(group, &conj)?);
            let (cx, cy) = (group.left_cosets(h), group.left_cosets(&conj));
            let map: Vec<usize> = cx
                .iter()
                .map(|c| {
                    let r = group.mul(c[0], group.inv(g));
                    cy.iter().position(|d| d.contains(&r)).expect("cosets cover G")
                })
                .collect();
            let m = yoshida_matrix::<T>(&GSpan::covariant(&x, &y, map)?);
            maps.push(FixedPointMap {
                kind: "conj",
                from: h.clone(),
                to: conj,
                coefficient: orbit_sum_multiple(&m.apply(&ones(x.len()))),
                expected: T::one(),
            });
        }
    }
    Ok(FixedPointFunctor { values, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named_group;
    use num_rational::BigRational;

    type Q = BigRational;

    fn grp(name: &str) -> GroupRef {
        Arc::new(named_group(name).unwrap())
    }

    fn whole(g: &GroupRef) -> Subgroup {
        g.elements().collect()
    }

    fn trivial(g: &GroupRef) -> Subgroup {
        vec![g.identity()]
    }

    /// `(12)` in the dihedral presentation of S3: any element of order 2.
    fn order_two(g: &GroupRef) -> Subgroup {
        let a = g.elements().find(|&a| g.element_order(a) == 2).unwrap();
        g.generate(&[a])
    }

    #[test]
    fn cosets_and_composition() {
        let c2 = grp("C2");
        let pt = GSet::cosets(&c2, &whole(&c2)).unwrap();
        let free = GSet::cosets(&c2, &trivial(&c2)).unwrap();
        assert_eq!((pt.len(), free.len()), (1, 2));
        assert!(free.is_transitive());
        let id = GSpan::identity(&free);
        assert!(gspans_isomorphic(&gspan_compose(&id, &id).unwrap(), &id));
        let res = GSpan::contravariant(&free, &pt, vec![0, 0]).unwrap();
        let ind = GSpan::covariant(&free, &pt, vec![0, 0]).unwrap();
        let c = gspan_compose(&res, &ind).unwrap();
        assert_eq!(c.apex.len(), 4);
        let empty = GSpan::empty(&pt, &pt);
        assert_eq!(gspan_compose(&empty, &GSpan::identity(&pt)).unwrap().apex.len(), 0);
        assert!(gspan_compose(&res, &res).is_err());
    }

    /// Exhaustive: every G-map from each `G/L` into `X × Y`, deduplicated
    /// by the isomorphism decider.
    fn brute_basis(x: &GSet, y: &GSet) -> usize {
        let g = x.group();
        let mut reps: Vec<GSpan> = Vec::new();
        for l in g.subgroups() {
            let apex = GSet::cosets(g, &l).unwrap();
            for a in 0..x.len() {
                for b in 0..y.len() {
                    let left: Vec<usize> = g.left_cosets(&l).iter().map(|c| x.act(c[0], a)).collect();
                    let right: Vec<usize> = g.left_cosets(&l).iter().map(|c| y.act(c[0], b)).collect();
                    let Ok(s) = GSpan::new(x.clone(), y.clone(), apex.clone(), left, right) else { continue };
                    if !reps.iter().any(|r| gspans_isomorphic(r, &s)) {
                        reps.push(s);
                    }
                }
            }
        }
        reps.len()
    }

    #[test]
    fn span_bases() {
        let c1 = grp("1");
        let p1 = GSet::point(&c1);
        assert_eq!(gspan_hom_basis(&p1, &p1).unwrap().len(), 1);
        let c2 = grp("C2");
        let p = GSet::point(&c2);
        assert_eq!(gspan_hom_basis(&p, &p).unwrap().len(), 2);
        let s3 = grp("S3");
        let x = GSet::cosets(&s3, &order_two(&s3)).unwrap();
        let b = gspan_hom_basis(&x, &x).unwrap();
        assert_eq!(b.len(), brute_basis(&x, &x));
        for (i, s) in b.elements.iter().enumerate() {
            assert_eq!(b.locate(s).unwrap(), i);
            for t in &b.elements[..i] {
                assert!(!gspans_isomorphic(s, t));
            }
        }
        let y = GSet::cosets(&s3, &trivial(&s3)).unwrap();
        assert_eq!(gspan_hom_basis(&x, &y).unwrap().len(), brute_basis(&x, &y));
    }

    #[test]
    fn yoshida_examples() {
        let c2 = grp("C2");
        let p = GSet::point(&c2);
        let free = GSet::cosets(&c2, &trivial(&c2)).unwrap();
        let s = GSpan::new(p.clone(), p.clone(), free, vec![0, 0], vec![0, 0]).unwrap();
        assert_eq!(yoshida_matrix::<Q>(&s), Matrix::from_rows(vec![vec![Q::from_i64(2)]], 1));
        assert_eq!(yoshida_matrix::<Q>(&GSpan::identity(&p)), Matrix::identity(1));
    }

    #[test]
    fn yoshida_ranks() {
        let c2 = grp("C2");
        let r = yoshida_rank_check::<Q>(&c2, &whole(&c2), &whole(&c2)).unwrap();
        assert!(r.holds() && r.rank == 1);
        let s3 = grp("S3");
        let t = order_two(&s3);
        let r = yoshida_rank_check::<Q>(&s3, &t, &t).unwrap();
        assert!(r.holds() && r.rank == 2);
        let a3 = s3.elements().filter(|&a| s3.element_order(a) != 2).collect::<Vec<_>>();
        let r = yoshida_rank_check::<Q>(&s3, &t, &a3).unwrap();
        assert!(r.holds() && r.rank == 1);
        let r3 = s3.elements().find(|&a| s3.element_order(a) == 3).unwrap();
        assert!(yoshida_rank_check::<Q>(&s3, &[s3.identity(), r3], &t).is_err());
    }

    #[test]
    fn cohomological_examples() {
        let c2 = grp("C2");
        let rep = cohomological_kernel_check::<Q>(&c2).unwrap();
        assert!(rep.passed());
        let top = rep.homs.iter().find(|h| h.source == 1 && h.target == 1).unwrap();
        assert_eq!(top.kernel_rank, 1);
        let rep = cohomological_kernel_check::<Q>(&grp("1")).unwrap();
        assert!(rep.homs.iter().all(|h| h.kernel_rank == 0) && rep.passed());
        assert!(cohomological_kernel_check::<Q>(&grp("S3")).unwrap().passed());
    }

    #[test]
    fn fixed_points() {
        let c2 = grp("C2");
        let fp = fixed_point_functor::<Q>(&c2).unwrap();
        assert!(fp.passed());
        let ind = fp.maps.iter().find(|m| m.kind == "ind").unwrap();
        assert_eq!(ind.coefficient, Some(Q::from_i64(2)));
        let s3 = grp("S3");
        let fp = fixed_point_functor::<Q>(&s3).unwrap();
        assert!(fp.passed());
        let ind = fp.maps.iter().find(|m| m.kind == "ind" && m.from.len() == 1 && m.to.len() == 3).unwrap();
        assert_eq!(ind.coefficient, Some(Q::from_i64(3)));
    }
}
