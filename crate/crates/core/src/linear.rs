//! Truncated linearizations of the span and biset categories.
//!
//! Hom monoids of `τ₁Span` and `τ₁Biset` are free on connected spans and
//! transitive bisets, so their group completions have these as bases. Span
//! homs are infinite, so they are cut off at an apex bound: a connected span
//! is kept when the vertex group of its apex has order at most the bound.
//! Every kernel statement made here is relative to that cut-off.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::biset::{Biset, BisetRef};
use crate::composite::Composite;
use crate::error::{Error, Result};
use crate::functor::{shared, Functor};
use crate::group::{catalog_up_to, FiniteGroup};
use crate::groupoid::{Groupoid, GroupoidRef};
use crate::matrix::{smith_invariants, Matrix, RowSpace};
use crate::realization::realize_span;
use crate::report::Report;
use crate::scalar::Scalar;
use crate::span::{compose_spans, spans_isomorphic, Span};

/// Largest apex order the group catalog covers.
pub const MAX_APEX_ORDER: usize = 12;

/// One skeletal apex `BK` per catalog group of bounded order.
#[derive(Debug)]
pub struct ApexCatalog {
    bound: usize,
    entries: Vec<ApexGroup>,
}

#[derive(Debug)]
struct ApexGroup {
    name: &'static str,
    group: FiniteGroup,
    apex: GroupoidRef,
    automorphisms: Vec<Vec<usize>>,
}

impl ApexCatalog {
    pub fn new(bound: usize) -> Result<Self> {
        if bound == 0 || bound > MAX_APEX_ORDER {
            return Err(Error::Config(format!("apex bound must lie in 1..={MAX_APEX_ORDER}, got {bound}")));
        }
        let entries = catalog_up_to(bound)
            .into_par_iter()
            .map(|(name, group)| ApexGroup {
                name,
                apex: shared(Groupoid::from_group(&group)),
                automorphisms: group.automorphisms(),
                group,
            })
            .collect();
        Ok(ApexCatalog { bound, entries })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    /// Catalog index of a group isomorphic to `k`, with an isomorphism
    /// from `k` to it.
    fn identify(&self, k: &FiniteGroup) -> Option<(usize, Vec<usize>)> {
        self.entries
            .iter()
            .enumerate()
            .find_map(|(i, e)| k.isomorphism(&e.group).map(|iso| (i, iso)))
    }
}

/// Basepoint and vertex group of one connected component.
#[derive(Clone, Debug)]
struct Vertex {
    base: usize,
    group: FiniteGroup,
}

fn vertices(g: &Groupoid) -> Vec<Vertex> {
    (0..g.num_components())
        .map(|c| {
            let base = g.basepoint(c);
            Vertex {
                base,
                group: g.vertex_group(base).0,
            }
        })
        .collect()
}

/// Index in the basepoint vertex group of the transport of an endomorphism.
fn vertex_index(g: &Groupoid, f: usize) -> usize {
    g.hom_index(g.to_base(f))
}

/// Smallest member of the orbit of `(b, a)` under `Aut(K) × V_H × V_G`.
fn canonical_pair(autos: &[Vec<usize>], vh: &FiniteGroup, vg: &FiniteGroup, b: &[usize], a: &[usize]) -> Vec<usize> {
    let n = b.len();
    let mut best: Option<Vec<usize>> = None;
    let mut cand = vec![0; 2 * n];
    for theta in autos {
        for x in vh.elements() {
            for k in 0..n {
                cand[k] = vh.conjugate(x, b[theta[k]]);
            }
            if let Some(best) = &best {
                if cand[..n] > best[..n] {
                    continue;
                }
            }
            for y in vg.elements() {
                for k in 0..n {
                    cand[n + k] = vg.conjugate(y, a[theta[k]]);
                }
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand.clone());
                }
            }
        }
    }
    best.expect("automorphism list contains the identity")
}

/// Orbit of `(b, a)`, as a set of concatenated image tables.
fn orbit_pairs(autos: &[Vec<usize>], vh: &FiniteGroup, vg: &FiniteGroup, b: &[usize], a: &[usize]) -> HashSet<Vec<usize>> {
    let n = b.len();
    let mut out = HashSet::new();
    for theta in autos {
        for x in vh.elements() {
            for y in vg.elements() {
                let mut v = Vec::with_capacity(2 * n);
                v.extend((0..n).map(|k| vh.conjugate(x, b[theta[k]])));
                v.extend((0..n).map(|k| vg.conjugate(y, a[theta[k]])));
                out.insert(v);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SpanClass {
    components: (usize, usize),
    apex: usize,
    canonical: Vec<usize>,
}

/// Iso classes of connected spans `H → G` with apex order at most the bound.
#[derive(Debug)]
pub struct SpanBasis {
    pub source: GroupoidRef,
    pub target: GroupoidRef,
    pub elements: Vec<Span>,
    pub labels: Vec<String>,
    catalog: Arc<ApexCatalog>,
    hv: Vec<Vertex>,
    gv: Vec<Vertex>,
    index: HashMap<SpanClass, usize>,
    parts: Vec<SpanClass>,
}

pub fn span_hom_basis(h: &GroupoidRef, g: &GroupoidRef, apex_bound: usize) -> Result<SpanBasis> {
    SpanBasis::new(h, g, Arc::new(ApexCatalog::new(apex_bound)?))
}

impl SpanBasis {
    pub fn new(h: &GroupoidRef, g: &GroupoidRef, catalog: Arc<ApexCatalog>) -> Result<Self> {
        let (hv, gv) = (vertices(h), vertices(g));
        let mut basis = SpanBasis {
            source: h.clone(),
            target: g.clone(),
            elements: Vec::new(),
            labels: Vec::new(),
            catalog: catalog.clone(),
            hv,
            gv,
            index: HashMap::new(),
            parts: Vec::new(),
        };
        for (ci, entry) in catalog.entries.iter().enumerate() {
            let k = &entry.group;
            for (ch, vh) in basis.hv.iter().enumerate() {
                let bs = k.homomorphisms(&vh.group);
                for (cg, vg) in basis.gv.iter().enumerate() {
                    let as_ = k.homomorphisms(&vg.group);
                    let mut seen: HashSet<Vec<usize>> = HashSet::new();
                    for b in &bs {
                        for a in &as_ {
                            let key: Vec<usize> = b.iter().chain(a).copied().collect();
                            if seen.contains(&key) {
                                continue;
                            }
                            let orbit = orbit_pairs(&entry.automorphisms, &vh.group, &vg.group, b, a);
                            let canonical = orbit.iter().min().expect("nonempty orbit").clone();
                            seen.extend(orbit);
                            let (cb, ca) = canonical.split_at(k.order());
                            let span = Span::new(
                                Functor::new(entry.apex.clone(), h.clone(), vec![vh.base], cb.iter().map(|&i| h.hom(vh.base, vh.base)[i]).collect())?,
                                Functor::new(entry.apex.clone(), g.clone(), vec![vg.base], ca.iter().map(|&i| g.hom(vg.base, vg.base)[i]).collect())?,
                            )?;
                            let kb = cb.iter().filter(|&&i| i == vh.group.identity()).count();
                            let ka = ca.iter().filter(|&&i| i == vg.group.identity()).count();
                            basis.labels.push(format!("B{} ({ch},{cg}) ker {kb},{ka} #{}", entry.name, basis.elements.len()));
                            let class = SpanClass {
                                components: (ch, cg),
                                apex: ci,
                                canonical: canonical.clone(),
                            };
                            basis.index.insert(class.clone(), basis.elements.len());
                            basis.parts.push(class);
                            basis.elements.push(span);
                        }
                    }
                }
            }
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn apex_bound(&self) -> usize {
        self.catalog.bound
    }

    /// Basis index of a connected span, or `None` when its apex exceeds the
    /// bound.
    pub fn locate(&self, s: &Span) -> Result<Option<usize>> {
        if s.apex.num_components() != 1 {
            return Err(Error::Mismatch("locate expects a connected span".into()));
        }
        let (h, g) = (&*self.source, &*self.target);
        let base = s.apex.basepoint(0);
        let (kx, elems) = s.apex.vertex_group(base);
        let (ch, cg) = (h.component_of(s.left.obj(base)), g.component_of(s.right.obj(base)));
        let b: Vec<usize> = elems.iter().map(|&f| vertex_index(h, s.left.mor(f))).collect();
        let a: Vec<usize> = elems.iter().map(|&f| vertex_index(g, s.right.mor(f))).collect();
        self.locate_group((ch, cg), &kx, &b, &a)
    }

    /// Basis index of the span `V_H ←b K →a V_G` between the vertex groups
    /// of components `ch` and `cg`, with the legs given as image tables.
    pub fn locate_group(&self, (ch, cg): (usize, usize), k: &FiniteGroup, b: &[usize], a: &[usize]) -> Result<Option<usize>> {
        if k.order() > self.catalog.bound {
            return Ok(None);
        }
        let (ci, iso) = self
            .catalog
            .identify(k)
            .ok_or_else(|| Error::Mismatch("apex vertex group missing from the catalog".into()))?;
        let mut inv = vec![0; iso.len()];
        for (x, &y) in iso.iter().enumerate() {
            inv[y] = x;
        }
        let b: Vec<usize> = inv.iter().map(|&x| b[x]).collect();
        let a: Vec<usize> = inv.iter().map(|&x| a[x]).collect();
        let entry = &self.catalog.entries[ci];
        let canonical = canonical_pair(&entry.automorphisms, &self.hv[ch].group, &self.gv[cg].group, &b, &a);
        let class = SpanClass {
            components: (ch, cg),
            apex: ci,
            canonical,
        };
        match self.index.get(&class) {
            Some(&i) => Ok(Some(i)),
            None => Err(Error::Mismatch("span basis is missing a class within the bound".into())),
        }
    }

    /// Multiplicities of the basis elements in `s`, or `None` when a
    /// component leaves the truncation.
    pub fn coordinates(&self, s: &Span) -> Result<Option<Vec<usize>>> {
        let mut counts = vec![0; self.len()];
        for c in s.decompose() {
            match self.locate(&c)? {
                Some(i) => counts[i] += 1,
                None => return Ok(None),
            }
        }
        Ok(Some(counts))
    }
}

/// Iso classes of transitive bisets `H → G`, one per conjugacy class of
/// subgroups of `V_G × V_H` for each pair of components.
#[derive(Debug)]
pub struct BisetBasis {
    pub source: GroupoidRef,
    pub target: GroupoidRef,
    pub elements: Vec<BisetRef>,
    pub labels: Vec<String>,
    hv: Vec<Vertex>,
    index: HashMap<((usize, usize), Vec<usize>), usize>,
}

pub fn biset_hom_basis(h: &GroupoidRef, g: &GroupoidRef) -> Result<BisetBasis> {
    let (hv, gv) = (vertices(h), vertices(g));
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    let mut index = HashMap::new();
    for (ch, vh) in hv.iter().enumerate() {
        for (cg, vg) in gv.iter().enumerate() {
            let nh = vh.group.order();
            let product = FiniteGroup::direct_product(&vg.group, &vh.group);
            for class in product.subgroup_classes() {
                let rep = &class[0];
                let pairs: Vec<(usize, usize)> = rep
                    .iter()
                    .map(|&e| (g.hom(vg.base, vg.base)[e / nh], h.hom(vh.base, vh.base)[e % nh]))
                    .collect();
                let u = Biset::transitive(h, g, vh.base, vg.base, &pairs)?;
                for member in &class {
                    index.insert(((ch, cg), member.clone()), elements.len());
                }
                labels.push(format!("({ch},{cg}) stabilizer order {} size {}", rep.len(), u.len()));
                elements.push(Arc::new(u));
            }
        }
    }
    Ok(BisetBasis {
        source: h.clone(),
        target: g.clone(),
        elements,
        labels,
        hv,
        index,
    })
}

impl BisetBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Basis index of the orbit of element `x` of `u`.
    pub fn locate_orbit(&self, u: &Biset, x: usize) -> Result<usize> {
        let (h, g) = (&**u.source(), &**u.target());
        let (ch, cg) = (h.component_of(u.src(x)), g.component_of(u.tgt(x)));
        let nh = self.hv[ch].group.order();
        let mut stab: Vec<usize> = u
            .stabilizer(x)
            .into_iter()
            .map(|(k, k2)| vertex_index(g, k) * nh + vertex_index(h, k2))
            .collect();
        stab.sort_unstable();
        self.index
            .get(&((ch, cg), stab))
            .copied()
            .ok_or_else(|| Error::Mismatch("stabilizer is not a subgroup of the expected product".into()))
    }

    pub fn coordinates(&self, u: &Biset) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.len()];
        for orbit in u.orbits() {
            counts[self.locate_orbit(u, orbit[0])?] += 1;
        }
        Ok(counts)
    }
}

/// A finite linear combination of basis elements of one hom.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearHom<T> {
    pub terms: BTreeMap<usize, T>,
}

impl<T: Scalar> LinearHom<T> {
    pub fn zero() -> Self {
        LinearHom { terms: BTreeMap::new() }
    }

    pub fn basis(i: usize) -> Self {
        LinearHom::from_terms([(i, T::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, T)>) -> Self {
        let mut out = LinearHom::zero();
        for (i, c) in terms {
            out.add_term(i, c);
        }
        out
    }

    pub fn from_counts(counts: &[usize]) -> Self {
        LinearHom::from_terms(counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i, T::from_i64(c as i64))))
    }

    pub fn from_dense(v: &[T]) -> Self {
        LinearHom::from_terms(v.iter().cloned().enumerate())
    }

    pub fn add_term(&mut self, i: usize, c: T) {
        if c.is_negligible() {
            return;
        }
        let slot = self.terms.entry(i).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_negligible() {
            self.terms.remove(&i);
        }
    }

    pub fn add(&self, other: &LinearHom<T>) -> Self {
        let mut out = self.clone();
        for (&i, c) in &other.terms {
            out.add_term(i, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        LinearHom::from_terms(self.terms.iter().map(|(&i, x)| (i, x.clone() * c.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dense(&self, dim: usize) -> Vec<T> {
        let mut v = vec![T::zero(); dim];
        for (&i, c) in &self.terms {
            v[i] = c.clone();
        }
        v
    }
}

/// The full subcategory of `τ₁Span` (truncated at the apex bound) and of
/// `τ₁Biset` on a window of groupoids. Hom `(x, y)` means `objects[x] →
/// objects[y]`.
pub struct SpanWindow {
    pub names: Vec<String>,
    pub objects: Vec<GroupoidRef>,
    catalog: Arc<ApexCatalog>,
    spans: Vec<SpanBasis>,
    bisets: Vec<BisetBasis>,
    cache: Mutex<HashMap<(usize, usize, usize, usize, usize), Option<Vec<usize>>>>,
    realized: Mutex<HashMap<(usize, usize), Arc<Vec<Vec<usize>>>>>,
}

type Composition = Option<Vec<usize>>;

impl SpanWindow {
    pub fn new(objects: Vec<(String, GroupoidRef)>, apex_bound: usize) -> Result<Self> {
        let catalog = Arc::new(ApexCatalog::new(apex_bound)?);
        let (names, objects): (Vec<String>, Vec<GroupoidRef>) = objects.into_iter().unzip();
        let n = objects.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
        let spans = pairs
            .par_iter()
            .map(|&(x, y)| SpanBasis::new(&objects[x], &objects[y], catalog.clone()))
            .collect::<Result<Vec<_>>>()?;
        let bisets = pairs
            .par_iter()
            .map(|&(x, y)| biset_hom_basis(&objects[x], &objects[y]))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpanWindow {
            names,
            objects,
            catalog,
            spans,
            bisets,
            cache: Mutex::new(HashMap::new()),
            realized: Mutex::new(HashMap::new()),
        })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn apex_bound(&self) -> usize {
        self.catalog.bound
    }

    pub fn span_basis(&self, x: usize, y: usize) -> &SpanBasis {
        &self.spans[x * self.len() + y]
    }

    pub fn biset_basis(&self, x: usize, y: usize) -> &BisetBasis {
        &self.bisets[x * self.len() + y]
    }

    pub fn hom_name(&self, x: usize, y: usize) -> String {
        format!("{}->{}", self.names[x], self.names[y])
    }

    /// `basis(y,z)[outer] ∘ basis(x,y)[inner]` as multiplicities in
    /// `basis(x,z)`, or `None` when it leaves the truncation.
    pub fn compose_basis(&self, x: usize, y: usize, z: usize, outer: usize, inner: usize) -> Result<Composition> {
        let key = (x, y, z, outer, inner);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let coords = self.compose_by_double_cosets(x, y, z, outer, inner)?;
        self.cache.lock().expect("cache lock").insert(key, coords.clone());
        Ok(coords)
    }

    /// Same as [`SpanWindow::compose_basis`], through the iso-comma apex and
    /// its component decomposition. Uncached.
    pub fn compose_basis_generic(&self, x: usize, y: usize, z: usize, outer: usize, inner: usize) -> Result<Composition> {
        let c = compose_spans(&self.span_basis(y, z).elements[outer], &self.span_basis(x, y).elements[inner])?;
        self.span_basis(x, z).coordinates(&c.span)
    }

    /// For `t = [V_Y ←b₂ K₂ →a₂ V_Z]` after `s = [V_X ←b₁ K₁ →a₁ V_Y]` the
    /// composite has one component per double coset `b₂(K₂) γ a₁(K₁)`, with
    /// apex `{(k₁, k₂) : a₁(k₁) = γ⁻¹ b₂(k₂) γ}`.
    fn compose_by_double_cosets(&self, x: usize, y: usize, z: usize, outer: usize, inner: usize) -> Result<Composition> {
        let (sb, tb) = (self.span_basis(x, y), self.span_basis(y, z));
        let (s, t) = (&sb.parts[inner], &tb.parts[outer]);
        let target = self.span_basis(x, z);
        let mut counts = vec![0; target.len()];
        if s.components.1 != t.components.0 {
            return Ok(Some(counts));
        }
        let v = &sb.gv[s.components.1].group;
        let (k1, k2) = (&self.catalog.entries[s.apex].group, &self.catalog.entries[t.apex].group);
        let (n1, n2) = (k1.order(), k2.order());
        let (b1, a1) = s.canonical.split_at(n1);
        let (b2, a2) = t.canonical.split_at(n2);
        for coset in v.double_cosets(&v.image(b2), &v.image(a1)) {
            let gi = v.inv(coset[0]);
            let pairs: Vec<(usize, usize)> = (0..n1)
                .flat_map(|p| (0..n2).map(move |q| (p, q)))
                .filter(|&(p, q)| a1[p] == v.conjugate(gi, b2[q]))
                .collect();
            if pairs.len() > self.catalog.bound {
                return Ok(None);
            }
            let mut position = vec![usize::MAX; n1 * n2];
            for (i, &(p, q)) in pairs.iter().enumerate() {
                position[p * n2 + q] = i;
            }
            let apex = FiniteGroup::from_fn(pairs.len(), |i, j| {
                let ((p1, q1), (p2, q2)) = (pairs[i], pairs[j]);
                position[k1.mul(p1, p2) * n2 + k2.mul(q1, q2)]
            });
            let left: Vec<usize> = pairs.iter().map(|&(p, _)| b1[p]).collect();
            let right: Vec<usize> = pairs.iter().map(|&(_, q)| a2[q]).collect();
            match target.locate_group((s.components.0, t.components.1), &apex, &left, &right)? {
                Some(i) => counts[i] += 1,
                None => return Ok(None),
            }
        }
        Ok(Some(counts))
    }

    pub fn compose<T: Scalar>(&self, x: usize, y: usize, z: usize, outer: &LinearHom<T>, inner: &LinearHom<T>) -> Result<Option<LinearHom<T>>> {
        compose_linear(self, (x, y, z), outer, inner)
    }

    /// Column `j` is the decomposition of `R(basis(x,y)[j])` into
    /// transitive bisets.
    pub fn realization_counts(&self, x: usize, y: usize) -> Result<Arc<Vec<Vec<usize>>>> {
        if let Some(hit) = self.realized.lock().expect("cache lock").get(&(x, y)) {
            return Ok(hit.clone());
        }
        let bb = self.biset_basis(x, y);
        let columns = self
            .span_basis(x, y)
            .elements
            .par_iter()
            .map(|s| bb.coordinates(realize_span(s)?.biset()))
            .collect::<Result<Vec<_>>>()?;
        let columns = Arc::new(columns);
        self.realized.lock().expect("cache lock").insert((x, y), columns.clone());
        Ok(columns)
    }

    /// `F = k τ₁ R` on hom `(x, y)`: rows index transitive bisets, columns
    /// index basis spans.
    pub fn realization_matrix<T: Scalar>(&self, x: usize, y: usize) -> Result<Matrix<T>> {
        let columns = self.realization_counts(x, y)?;
        let cols: Vec<Vec<T>> = columns.iter().map(|c| c.iter().map(|&v| T::from_i64(v as i64)).collect()).collect();
        Ok(Matrix::from_columns(&cols, self.biset_basis(x, y).len()))
    }

    /// `[X ←π BK →π X] − [X ←ι BQ →ι X]` for every surjection `π` from a
    /// catalog group onto the vertex group `Q` of a component of `X`.
    pub fn deflative_generators<T: Scalar>(&self, x: usize) -> Result<Vec<LinearHom<T>>> {
        let xg = &self.objects[x];
        let basis = self.span_basis(x, x);
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for v in vertices(xg) {
            let q = v.group.order();
            if q > self.catalog.bound {
                continue;
            }
            let endo = xg.hom(v.base, v.base);
            let (qg, qi) = (shared(Groupoid::from_group(&v.group)), endo.to_vec());
            let incl = Functor::new(qg, xg.clone(), vec![v.base], qi)?;
            let Some(id) = basis.locate(&Span::new(incl.clone(), incl)?)? else { continue };
            for entry in &self.catalog.entries {
                for pi in entry.group.homomorphisms(&v.group) {
                    if pi.iter().collect::<HashSet<_>>().len() != q {
                        continue;
                    }
                    let leg = Functor::new(entry.apex.clone(), xg.clone(), vec![v.base], pi.iter().map(|&i| endo[i]).collect())?;
                    let Some(k) = basis.locate(&Span::new(leg.clone(), leg)?)? else { continue };
                    if k != id && seen.insert(k) {
                        out.push(LinearHom::from_terms([(k, T::one()), (id, -T::one())]));
                    }
                }
            }
        }
        Ok(out)
    }
}

impl BasedCategory for SpanWindow {
    fn num_objects(&self) -> usize {
        self.len()
    }

    fn hom_dim(&self, x: usize, y: usize) -> usize {
        self.span_basis(x, y).len()
    }

    fn compose_basis(&self, x: usize, y: usize, z: usize, outer: usize, inner: usize) -> Result<Option<Vec<usize>>> {
        SpanWindow::compose_basis(self, x, y, z, outer, inner)
    }
}

/// Kernel of `F` against the saturated deflative ideal on one hom.
#[derive(Clone, Debug)]
pub struct HomKernel<T> {
    pub source: usize,
    pub target: usize,
    pub span_rank: usize,
    pub biset_rank: usize,
    pub image_rank: usize,
    pub kernel: Vec<Vec<T>>,
    pub ideal_rank: usize,
    pub contained: bool,
    /// Every ideal vector lies in the kernel.
    pub ideal_killed: bool,
    pub invariant_factors: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct DeflativeKernelReport<T> {
    pub homs: Vec<HomKernel<T>>,
    pub generators: usize,
    pub notes: Vec<String>,
}

impl<T: Scalar> DeflativeKernelReport<T> {
    pub fn contained(&self) -> bool {
        self.homs.iter().all(|h| h.contained && h.ideal_killed)
    }

    pub fn to_report(&self, window: &SpanWindow) -> Report {
        let mut r = Report::new("deflative-kernel");
        for h in &self.homs {
            let mut detail = format!(
                "spans {}, bisets {}, rank F {}, kernel {}, ideal {}",
                h.span_rank,
                h.biset_rank,
                h.image_rank,
                h.kernel.len(),
                h.ideal_rank
            );
            if let Some(f) = &h.invariant_factors {
                let f: Vec<String> = f.iter().map(|x| x.to_string()).collect();
                detail.push_str(&format!(", invariant factors [{}]", f.join(",")));
            }
            if !h.ideal_killed {
                detail.push_str(", ideal not killed by F");
            }
            r.push(format!("{} kernel in ideal", window.hom_name(h.source, h.target)), h.contained && h.ideal_killed, detail);
        }
        r.note(format!("{} deflative generators, apex bound {}", self.generators, window.apex_bound()));
        for n in &self.notes {
            r.note(n.clone());
        }
        r
    }
}

/// A linear category with finitely many objects and a chosen basis of
/// every hom, composed on basis elements.
pub trait BasedCategory: Sync {
    fn num_objects(&self) -> usize;

    fn hom_dim(&self, x: usize, y: usize) -> usize;

    /// `basis(y,z)[outer] ∘ basis(x,y)[inner]` as multiplicities, or `None`
    /// when the composite leaves the category.
    fn compose_basis(&self, x: usize, y: usize, z: usize, outer: usize, inner: usize) -> Result<Option<Vec<usize>>>;
}

/// Bilinear extension of [`BasedCategory::compose_basis`].
pub fn compose_linear<C: BasedCategory + ?Sized, T: Scalar>(
    c: &C,
    (x, y, z): (usize, usize, usize),
    outer: &LinearHom<T>,
    inner: &LinearHom<T>,
) -> Result<Option<LinearHom<T>>> {
    let mut out = LinearHom::zero();
    for (&j, cj) in &outer.terms {
        for (&i, ci) in &inner.terms {
            let Some(counts) = c.compose_basis(x, y, z, j, i)? else {
                return Ok(None);
            };
            out = out.add(&LinearHom::from_counts(&counts).scale(&(cj.clone() * ci.clone())));
        }
    }
    Ok(Some(out))
}

/// Saturates the ideal generated by `generators[x]` (living in hom
/// `(x, x)`) under pre- and post-composition with basis elements, keeping
/// only composites that stay in the category, until nothing new appears.
///
/// With `targets`, a hom whose rank reaches `targets[x * n + y]` is treated
/// as full: nothing more is inserted there and the search stops once every
/// hom is full. Callers pass the kernel ranks of a functor that kills the
/// generators, so a full hom already equals the kernel.
pub fn saturate_ideal<C: BasedCategory + ?Sized, T: Scalar>(
    c: &C,
    generators: &[Vec<LinearHom<T>>],
    targets: Option<&[usize]>,
) -> Result<Vec<RowSpace<T>>> {
    let n = c.num_objects();
    let mut ideal: Vec<RowSpace<T>> = (0..n * n).map(|i| RowSpace::new(c.hom_dim(i / n, i % n))).collect();
    let full = |ideal: &[RowSpace<T>], i: usize| targets.is_some_and(|t| ideal[i].rank() >= t[i]);
    let mut queue: VecDeque<(usize, usize, LinearHom<T>)> = VecDeque::new();
    for (x, gens) in generators.iter().enumerate() {
        for g in gens {
            if ideal[x * n + x].insert(&g.dense(c.hom_dim(x, x))) {
                queue.push_back((x, x, g.clone()));
            }
        }
    }
    while let Some((x, y, v)) = queue.pop_front() {
        if (0..n * n).all(|i| full(&ideal, i)) {
            break;
        }
        let mut jobs: Vec<(usize, usize, bool)> = Vec::new();
        for z in 0..n {
            if !full(&ideal, x * n + z) {
                jobs.extend((0..c.hom_dim(y, z)).map(|t| (z, t, true)));
            }
            if !full(&ideal, z * n + y) {
                jobs.extend((0..c.hom_dim(z, x)).map(|s| (z, s, false)));
            }
        }
        let products = jobs
            .par_iter()
            .map(|&(z, i, post)| {
                let e = LinearHom::basis(i);
                Ok(if post {
                    compose_linear(c, (x, y, z), &e, &v)?.map(|w| (x, z, w))
                } else {
                    compose_linear(c, (z, x, y), &v, &e)?.map(|w| (z, y, w))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for (a, b, w) in products.into_iter().flatten() {
            if !w.is_zero() && !full(&ideal, a * n + b) && ideal[a * n + b].insert(&w.dense(c.hom_dim(a, b))) {
                queue.push_back((a, b, w));
            }
        }
    }
    Ok(ideal)
}

/// `ker F ⊆ ⟨deflative relations⟩` on every hom of the window.
pub fn deflative_kernel_check<T: Scalar>(window: &SpanWindow, integer_diagnostics: bool) -> Result<DeflativeKernelReport<T>> {
    let n = window.len();
    let generators = (0..n).map(|x| window.deflative_generators::<T>(x)).collect::<Result<Vec<_>>>()?;
    let count = generators.iter().map(Vec::len).sum();
    let mut notes = Vec::new();
    if count == 0 {
        notes.push("no deflative element fits the window and bound".to_string());
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let kernels = pairs
        .par_iter()
        .map(|&(x, y)| {
            let f = window.realization_matrix::<T>(x, y)?;
            let kernel = f.nullspace();
            Ok((f, kernel))
        })
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<usize> = kernels.iter().map(|(_, k)| k.len()).collect();
    let ideal = saturate_ideal(window, &generators, Some(&targets))?;
    let mut homs = Vec::with_capacity(n * n);
    for (&(x, y), (f, kernel)) in pairs.iter().zip(kernels) {
        let space = &ideal[x * n + y];
        let inside = kernel.iter().all(|v| space.contains(v));
        let killed = space.basis().iter().all(|v| f.apply(v).iter().all(Scalar::is_negligible));
        let invariant_factors = if integer_diagnostics {
            let counts = window.realization_counts(x, y)?;
            let m = Matrix::from_columns(
                &counts.iter().map(|c| c.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                window.biset_basis(x, y).len(),
            );
            Some(smith_invariants(&m))
        } else {
            None
        };
        homs.push(HomKernel {
            source: x,
            target: y,
            span_rank: window.span_basis(x, y).len(),
            biset_rank: window.biset_basis(x, y).len(),
            image_rank: f.rank(),
            kernel,
            ideal_rank: space.rank(),
            contained: inside,
            ideal_killed: killed,
            invariant_factors,
        });
    }
    Ok(DeflativeKernelReport {
        homs,
        generators: count,
        notes,
    })
}

/// The Burnside functor `A = biset_k(1, −)` on the window, with the action
/// of spans by composition with their realizations.
pub struct BurnsideFunctor {
    pub point: GroupoidRef,
    pub values: Vec<BisetBasis>,
}

impl BurnsideFunctor {
    pub fn new(objects: &[GroupoidRef]) -> Result<Self> {
        let point = shared(Groupoid::point());
        let values = objects.iter().map(|g| biset_hom_basis(&point, g)).collect::<Result<Vec<_>>>()?;
        Ok(BurnsideFunctor { point, values })
    }

    pub fn rank(&self, x: usize) -> usize {
        self.values[x].len()
    }

    /// Matrix of `A(s): A(x) → A(y)`; column `i` decomposes `R(s) ∘ X_i`.
    pub fn action<T: Scalar>(&self, s: &Span, x: usize, y: usize) -> Result<Matrix<T>> {
        let r = realize_span(s)?;
        let (from, to) = (&self.values[x], &self.values[y]);
        let cols = from
            .elements
            .iter()
            .map(|xi| {
                let c = Composite::new(vec![r.shriek.biset.clone(), r.star.biset.clone(), xi.clone()])?;
                Ok(to.coordinates(c.biset())?.into_iter().map(|v| T::from_i64(v as i64)).collect())
            })
            .collect::<Result<Vec<Vec<T>>>>()?;
        Ok(Matrix::from_columns(&cols, to.len()))
    }
}

fn injection(part: &GroupoidRef, sum: &GroupoidRef, object_offset: usize, morphism_offset: usize) -> Result<Functor> {
    Functor::new(
        part.clone(),
        sum.clone(),
        (0..part.num_objects()).map(|x| x + object_offset).collect(),
        (0..part.num_morphisms()).map(|f| f + morphism_offset).collect(),
    )
}

fn compose_realized(outer: &Span, inner: &Span) -> Result<Biset> {
    let (r1, r2) = (realize_span(outer)?, realize_span(inner)?);
    Ok(Composite::new(vec![r1.shriek.biset, r1.star.biset, r2.shriek.biset, r2.star.biset])?.into_biset())
}

/// Biproduct equations for `G1 ⊔ G2` with the injections `i_k` and
/// projections `(i_k)^*`, in `τ₁Span` and, after realization, in
/// `τ₁Biset`.
pub fn verify_semiadditive(g1: &GroupoidRef, g2: &GroupoidRef) -> Result<Report> {
    use crate::biset::bisets_isomorphic;
    let sum = shared(Groupoid::disjoint_union(g1, g2));
    let i1 = injection(g1, &sum, 0, 0)?;
    let i2 = injection(g2, &sum, g1.num_objects(), g1.num_morphisms())?;
    let parts = [(g1, &i1), (g2, &i2)];
    let mut r = Report::new("semiadditive");
    for (a, (ga, ia)) in parts.iter().enumerate() {
        for (b, (gb, ib)) in parts.iter().enumerate() {
            let inj = Span::covariant(ia);
            let proj = Span::contravariant(ib);
            let c = compose_spans(&proj, &inj)?.span;
            let expected = if a == b { Span::identity(ga) } else { Span::empty(ga, gb) };
            r.push(format!("span: p{} i{}", b + 1, a + 1), spans_isomorphic(&c, &expected)?, "");
            let rb = compose_realized(&proj, &inj)?;
            let eb = if a == b { Biset::identity(ga) } else { Biset::empty(ga, gb) };
            r.push(format!("biset: p{} i{}", b + 1, a + 1), bisets_isomorphic(&rb, &eb)?, "");
        }
    }
    let e1 = compose_spans(&Span::covariant(&i1), &Span::contravariant(&i1))?.span;
    let e2 = compose_spans(&Span::covariant(&i2), &Span::contravariant(&i2))?.span;
    r.push("span: i1 p1 + i2 p2 = id", spans_isomorphic(&e1.disjoint_union(&e2)?, &Span::identity(&sum))?, "");
    let b1 = compose_realized(&Span::covariant(&i1), &Span::contravariant(&i1))?;
    let b2 = compose_realized(&Span::covariant(&i2), &Span::contravariant(&i2))?;
    r.push("biset: i1 p1 + i2 p2 = id", bisets_isomorphic(&b1.disjoint_union(&b2)?, &Biset::identity(&sum))?, "");
    Ok(r)
}

/// `R(s ⊗ t) ≅ R(s) ⊗ R(t)`.
pub fn verify_tensor(s: &Span, t: &Span) -> Result<bool> {
    use crate::biset::bisets_isomorphic;
    let lhs = realize_span(&s.tensor(t))?;
    let (rs, rt) = (realize_span(s)?, realize_span(t)?);
    bisets_isomorphic(lhs.biset(), &rs.biset().tensor(rt.biset()))
}

/// The unit: `R(Id_1)` is the one-element biset on the point.
pub fn verify_tensor_unit() -> Result<bool> {
    let point = shared(Groupoid::point());
    let r = realize_span(&Span::identity(&point))?;
    Ok(r.biset().len() == 1 && r.composite.num_tuples() == 1)
}
