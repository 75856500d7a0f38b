//! Finite groups given by multiplication tables.
//!
//! Groups are small (at most a few hundred elements) so everything here is
//! exhaustive: subgroup lattices by joining cyclic subgroups, homomorphisms by
//! assigning images to a generating set and propagating along the Cayley
//! graph.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    identity: usize,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {})", self.order)
    }
}

/// A sorted list of group elements closed under the group law.
pub type Subgroup = Vec<usize>;

impl FiniteGroup {
    /// Validates a multiplication table `table[a][b] = a*b`.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has length {}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidGroup(format!("entry {v} out of range")));
                }
            }
            flat.extend_from_slice(row);
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| flat[e * n + a] == a && flat[a * n + e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| flat[a * n + b] == identity && flat[b * n + a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverse[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = flat[a * n + b];
                for c in 0..n {
                    if flat[ab * n + c] != flat[a * n + flat[b * n + c]] {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            table: flat,
            inverse,
            identity,
        })
    }

    /// Builds a group from a product closure known to satisfy the axioms.
    pub(crate) fn from_fn(order: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(mul(a, b));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| table[e * order + a] == a))
            .expect("group identity");
        let mut inverse = vec![0; order];
        for a in 0..order {
            inverse[a] = (0..order)
                .find(|&b| table[a * order + b] == identity)
                .expect("group inverse");
        }
        let g = FiniteGroup {
            order,
            table,
            inverse,
            identity,
        };
        debug_assert!(g.check_axioms());
        g
    }

    /// Group generated by permutations of `0..degree`, composed as functions
    /// (`(p*q)(i) = p(q(i))`). Element 0 is the identity permutation.
    pub fn from_permutations(generators: &[Vec<usize>]) -> Result<Self> {
        let degree = generators.first().map_or(0, Vec::len);
        for p in generators {
            let mut seen = vec![false; degree];
            if p.len() != degree || p.iter().any(|&i| i >= degree || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidGroup("generator is not a permutation".into()));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let p: Vec<usize> = elements[i].iter().map(|&k| g[k]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let n = elements.len();
        Ok(FiniteGroup::from_fn(n, |a, b| {
            let p: Vec<usize> = elements[b].iter().map(|&k| elements[a][k]).collect();
            index[&p]
        }))
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        FiniteGroup::from_fn(n, |a, b| (a + b) % n)
    }

    /// Element `(a, b)` of the product has index `a * |right| + b`.
    pub fn direct_product(left: &FiniteGroup, right: &FiniteGroup) -> Self {
        let m = right.order;
        FiniteGroup::from_fn(left.order * right.order, |x, y| {
            left.mul(x / m, y / m) * m + right.mul(x % m, y % m)
        })
    }

    /// `C_n ⋊ C_m` where the generator of `C_m` acts by `x ↦ r·x`.
    pub fn semidirect_cyclic(n: usize, m: usize, r: usize) -> Self {
        assert!(pow_mod(r, m, n) == 1 % n, "r^m must be 1 mod n");
        FiniteGroup::from_fn(n * m, |a, b| {
            let (x1, y1) = (a % n, a / n);
            let (x2, y2) = (b % n, b / n);
            let x = (x1 + pow_mod(r, y1, n) * x2) % n;
            let y = (y1 + y2) % m;
            y * n + x
        })
    }

    pub fn dihedral(n: usize) -> Self {
        FiniteGroup::semidirect_cyclic(n, 2, n - 1)
    }

    pub fn quaternion() -> Self {
        // Units 1, i, j, k with signs; element index = 4 * sign + unit.
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        FiniteGroup::from_fn(8, |a, b| {
            let (s, u) = UNIT[a % 4][b % 4];
            ((a / 4 + b / 4 + s) % 2) * 4 + u
        })
    }

    pub fn symmetric(n: usize) -> Self {
        if n < 2 {
            return FiniteGroup::trivial();
        }
        let mut cycle: Vec<usize> = (1..n).collect();
        cycle.push(0);
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        FiniteGroup::from_permutations(&[swap, cycle]).expect("permutations")
    }

    pub fn alternating4() -> Self {
        FiniteGroup::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).expect("permutations")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn check_axioms(&self) -> bool {
        FiniteGroup::from_table(&self.table()).is_ok()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted multiset of element orders, an isomorphism invariant.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements().map(|a| self.element_order(a)).collect();
        v.sort_unstable();
        v
    }

    /// Smallest subgroup containing `gens`, as a sorted element list.
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut out = vec![self.identity];
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        if elements.is_empty() || elements.iter().any(|&x| x >= self.order) {
            return false;
        }
        let set: HashSet<usize> = elements.iter().copied().collect();
        set.contains(&self.identity)
            && elements
                .iter()
                .all(|&a| elements.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// A small generating set, chosen greedily by decreasing element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = self.elements().collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for a in by_order {
            if span.len() == self.order {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.generate(&gens);
            }
        }
        gens
    }

    /// All subgroups, ordered by size and then lexicographically.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut cyclic: Vec<Subgroup> = self
            .elements()
            .map(|a| self.generate(&[a]))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        cyclic.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut found: HashSet<Subgroup> = cyclic.iter().cloned().collect();
        let mut queue: VecDeque<Subgroup> = cyclic.iter().cloned().collect();
        while let Some(h) = queue.pop_front() {
            for c in &cyclic {
                if c.iter().all(|x| h.binary_search(x).is_ok()) {
                    continue;
                }
                let mut gens = h.clone();
                gens.extend_from_slice(c);
                let joined = self.generate(&gens);
                if found.insert(joined.clone()) {
                    queue.push_back(joined);
                }
            }
        }
        let mut all: Vec<Subgroup> = found.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    pub fn conjugate_subgroup(&self, g: usize, h: &[usize]) -> Subgroup {
        let mut v: Vec<usize> = h.iter().map(|&x| self.conjugate(g, x)).collect();
        v.sort_unstable();
        v
    }

    /// Subgroups grouped into conjugacy classes; each class lists its members
    /// in the order of [`FiniteGroup::subgroups`], the first being the
    /// representative.
    pub fn subgroup_classes(&self) -> Vec<Vec<Subgroup>> {
        let subs = self.subgroups();
        let position: HashMap<&Subgroup, usize> = subs.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut class_of = vec![usize::MAX; subs.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..subs.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = BTreeSet::new();
            for g in self.elements() {
                let conj = self.conjugate_subgroup(g, &subs[i]);
                members.insert(position[&conj]);
            }
            for &m in &members {
                class_of[m] = c;
            }
            classes.push(members.into_iter().collect());
        }
        classes
            .into_iter()
            .map(|c| c.into_iter().map(|i| subs[i].clone()).collect())
            .collect()
    }

    pub fn normalizer(&self, h: &[usize]) -> Subgroup {
        self.elements()
            .filter(|&g| self.conjugate_subgroup(g, h) == h)
            .collect()
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        self.normalizer(h).len() == self.order
    }

    /// Double cosets `H g K`, each sorted, listed by smallest element.
    pub fn double_cosets(&self, h: &[usize], k: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            let mut coset = BTreeSet::new();
            for &a in h {
                let ag = self.mul(a, g);
                for &b in k {
                    coset.insert(self.mul(ag, b));
                }
            }
            for &x in &coset {
                seen[x] = true;
            }
            out.push(coset.into_iter().collect());
        }
        out
    }

    /// Left cosets `gH`, listed by smallest element.
    pub fn left_cosets(&self, h: &[usize]) -> Vec<Vec<usize>> {
        self.double_cosets(&[self.identity], h)
    }

    /// All homomorphisms `self → target`, each as an image table.
    pub fn homomorphisms(&self, target: &FiniteGroup) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.search_homs(target, false, &mut |h| {
            out.push(h.to_vec());
            true
        });
        out
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.search_homs(self, true, &mut |h| {
            out.push(h.to_vec());
            true
        });
        out
    }

    pub fn isomorphism(&self, target: &FiniteGroup) -> Option<Vec<usize>> {
        if self.order != target.order || self.order_profile() != target.order_profile() {
            return None;
        }
        let mut found = None;
        self.search_homs(target, true, &mut |h| {
            found = Some(h.to_vec());
            false
        });
        found
    }

    pub fn is_isomorphic(&self, target: &FiniteGroup) -> bool {
        self.isomorphism(target).is_some()
    }

    pub fn is_homomorphism(&self, target: &FiniteGroup, map: &[usize]) -> bool {
        map.len() == self.order
            && map.iter().all(|&x| x < target.order)
            && self
                .elements()
                .all(|a| self.elements().all(|b| map[self.mul(a, b)] == target.mul(map[a], map[b])))
    }

    pub fn image(&self, map: &[usize]) -> Subgroup {
        let set: BTreeSet<usize> = map.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn kernel(&self, target: &FiniteGroup, map: &[usize]) -> Subgroup {
        self.elements().filter(|&a| map[a] == target.identity).collect()
    }

    /// Enumerates homomorphisms, calling `visit` until it returns false.
    /// With `bijective`, only isomorphisms are produced.
    fn search_homs(&self, target: &FiniteGroup, bijective: bool, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let gens = self.generators();
        let gen_orders: Vec<usize> = gens.iter().map(|&g| self.element_order(g)).collect();
        let candidates: Vec<Vec<usize>> = gen_orders
            .iter()
            .map(|&o| {
                target
                    .elements()
                    .filter(|&t| {
                        let to = target.element_order(t);
                        if bijective {
                            to == o
                        } else {
                            o % to == 0
                        }
                    })
                    .collect()
            })
            .collect();
        let mut choice = vec![0usize; gens.len()];
        let mut images = vec![0usize; gens.len()];
        let mut map = vec![usize::MAX; self.order];
        if gens.is_empty() {
            map[self.identity] = target.identity;
            visit(&map);
            return;
        }
        if candidates.iter().any(Vec::is_empty) {
            return;
        }
        loop {
            for (i, &c) in choice.iter().enumerate() {
                images[i] = candidates[i][c];
            }
            if self.extend_hom(target, &gens, &images, &mut map)
                && (!bijective || is_injective(&map, target.order))
                && !visit(&map)
            {
                return;
            }
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return;
                }
                choice[i] += 1;
                if choice[i] < candidates[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn extend_hom(&self, target: &FiniteGroup, gens: &[usize], images: &[usize], map: &mut [usize]) -> bool {
        map.fill(usize::MAX);
        map[self.identity] = target.identity;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (&g, &t) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let v = target.mul(map[x], t);
                if map[y] == usize::MAX {
                    map[y] = v;
                    queue.push_back(y);
                } else if map[y] != v {
                    return false;
                }
            }
        }
        true
    }
}

fn is_injective(map: &[usize], codomain: usize) -> bool {
    let mut seen = vec![false; codomain];
    map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
}

fn pow_mod(base: usize, exp: usize, modulus: usize) -> usize {
    let mut r = 1 % modulus;
    for _ in 0..exp {
        r = r * base % modulus;
    }
    r
}

/// Names of the catalog groups: every group of order at most 12, once each.
pub const CATALOG: &[&str] = &[
    "1", "C2", "C3", "C4", "V4", "C5", "C6", "S3", "C7", "C8", "C4xC2", "C2^3", "D4", "Q8", "C9",
    "C3xC3", "C10", "D5", "C11", "C12", "C6xC2", "A4", "D6", "Dic3",
];

/// Looks up a group by catalog name (or a few aliases, or `Cn` for any n).
pub fn named_group(name: &str) -> Option<FiniteGroup> {
    let g = match name {
        "1" | "C1" | "trivial" => FiniteGroup::trivial(),
        "V4" | "C2xC2" | "K4" => FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)),
        "S3" | "D3" => FiniteGroup::dihedral(3),
        "C4xC2" | "C2xC4" => FiniteGroup::direct_product(&FiniteGroup::cyclic(4), &FiniteGroup::cyclic(2)),
        "C2^3" | "C2xC2xC2" => FiniteGroup::direct_product(
            &FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)),
            &FiniteGroup::cyclic(2),
        ),
        "D4" => FiniteGroup::dihedral(4),
        "Q8" => FiniteGroup::quaternion(),
        "C3xC3" => FiniteGroup::direct_product(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(3)),
        "D5" => FiniteGroup::dihedral(5),
        "C6xC2" | "C2xC6" => FiniteGroup::direct_product(&FiniteGroup::cyclic(6), &FiniteGroup::cyclic(2)),
        "A4" => FiniteGroup::alternating4(),
        "D6" => FiniteGroup::dihedral(6),
        "Dic3" => FiniteGroup::semidirect_cyclic(3, 4, 2),
        "S4" => FiniteGroup::symmetric(4),
        other => {
            let n: usize = other.strip_prefix('C')?.parse().ok()?;
            if n == 0 || n > 64 {
                return None;
            }
            FiniteGroup::cyclic(n)
        }
    };
    Some(g)
}

/// Catalog groups of order at most `bound`, with their names.
pub fn catalog_up_to(bound: usize) -> Vec<(&'static str, FiniteGroup)> {
    CATALOG
        .iter()
        .map(|&n| (n, named_group(n).expect("catalog name")))
        .filter(|(_, g)| g.order() <= bound)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subgroup_count(g: &FiniteGroup) -> usize {
        // Independent oracle: test every subset for closure.
        let n = g.order();
        assert!(n <= 16);
        (1u32..(1 << n))
            .filter(|mask| {
                let elems: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                g.is_subgroup(&elems)
            })
            .count()
    }

    #[test]
    fn catalog_groups_are_groups_with_expected_orders() {
        let orders = [1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8, 9, 9, 10, 10, 11, 12, 12, 12, 12, 12];
        for (name, expected) in CATALOG.iter().zip(orders) {
            let g = named_group(name).unwrap();
            assert_eq!(g.order(), expected, "{name}");
            assert!(g.check_axioms(), "{name}");
        }
    }

    #[test]
    fn catalog_groups_are_pairwise_non_isomorphic() {
        let groups: Vec<_> = catalog_up_to(12);
        for (i, (a, ga)) in groups.iter().enumerate() {
            for (b, gb) in &groups[i + 1..] {
                assert!(!ga.is_isomorphic(gb), "{a} ~ {b}");
            }
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(&[vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(&[vec![0, 1], vec![0]]).is_err());
        // Latin square without associativity.
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(&t).is_err());
    }

    #[test]
    fn subgroup_counts_match_subset_oracle() {
        for name in ["C2", "V4", "C4", "S3", "Q8", "D4", "C2^3", "C6"] {
            let g = named_group(name).unwrap();
            assert_eq!(g.subgroups().len(), brute_subgroup_count(&g), "{name}");
        }
    }

    #[test]
    fn conjugacy_classes_of_subgroups() {
        let s3 = named_group("S3").unwrap();
        let classes = s3.subgroup_classes();
        let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 3, 1, 1]);
        let v4xv4 = FiniteGroup::direct_product(&named_group("C2").unwrap(), &named_group("C2").unwrap());
        assert_eq!(v4xv4.subgroup_classes().len(), 5);
    }

    #[test]
    fn homomorphism_counts() {
        let c2 = FiniteGroup::cyclic(2);
        let s3 = named_group("S3").unwrap();
        let v4 = named_group("V4").unwrap();
        assert_eq!(s3.homomorphisms(&s3).len(), 10);
        assert_eq!(v4.homomorphisms(&s3).len(), 10);
        assert_eq!(v4.homomorphisms(&c2).len(), 4);
        assert_eq!(s3.automorphisms().len(), 6);
        assert_eq!(v4.automorphisms().len(), 6);
        for h in v4.homomorphisms(&s3) {
            assert!(v4.is_homomorphism(&s3, &h));
        }
    }

    #[test]
    fn double_cosets_partition() {
        let s3 = named_group("S3").unwrap();
        let subs = s3.subgroups();
        for h in &subs {
            for k in &subs {
                let dc = s3.double_cosets(h, k);
                let total: usize = dc.iter().map(Vec::len).sum();
                assert_eq!(total, 6);
            }
        }
        let t = subs.iter().find(|s| s.len() == 2).unwrap();
        assert_eq!(s3.double_cosets(t, t).len(), 2);
    }

    #[test]
    fn permutation_groups() {
        assert_eq!(FiniteGroup::symmetric(4).order(), 24);
        assert_eq!(FiniteGroup::alternating4().order(), 12);
        assert!(FiniteGroup::from_permutations(&[vec![0, 0]]).is_err());
    }
}
