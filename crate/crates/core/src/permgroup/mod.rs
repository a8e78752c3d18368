//! Permutation groups small enough to enumerate: closure, orbitals,
//! conjugacy classes, group schemes, double cosets and coset actions.
//!
//! Permutations act on the right: `x^(gh) = (x^g)^h`, and `g.then(h)` is the
//! product `gh`.

pub mod linear;

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::scheme::{AssociationScheme, SchemeError};
use crate::unionfind::{canonical_relabel, UnionFind};

/// Default bound on |G| during closure.
pub const DEFAULT_ORDER_CAP: usize = 200_000;

/// Default bound on materialized relation entries (n²).
pub const DEFAULT_RELATION_CAP: usize = 300_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("image list is not a bijection on 0..{0}")]
    NotABijection(usize),
    #[error("generators have different degrees")]
    DegreeMismatch,
    #[error("empty generator list")]
    NoGenerators,
    #[error("group order exceeds cap {0}")]
    CapExceeded(usize),
    #[error("group elements have not been enumerated")]
    NotEnumerated,
    #[error("group is not transitive on {0} points")]
    NotTransitive(usize),
    #[error("subset is not a subgroup")]
    NotSubgroup,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Field(#[from] crate::gf::GfError),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree || touched[x] {
                    return Err(PermError::NotABijection(degree));
                }
                touched[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()] as u32;
            }
        }
        Permutation::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    /// The product `self · other`: apply `self` first.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &x)| *i == x as usize).count()
    }
}

/// A group given by generators, optionally with its full element list.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Option<Vec<Permutation>>,
    lookup: BTreeMap<Vec<u32>, u32>,
}

impl PermutationGroup {
    /// Generators only; no enumeration.
    pub fn from_generators(generators: Vec<Permutation>) -> Result<Self, PermError> {
        let degree = generators.first().ok_or(PermError::NoGenerators)?.degree();
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch);
        }
        Ok(PermutationGroup { degree, generators, elements: None, lookup: BTreeMap::new() })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_enumerated(&self) -> bool {
        self.elements.is_some()
    }

    pub fn elements(&self) -> Result<&[Permutation], PermError> {
        self.elements.as_deref().ok_or(PermError::NotEnumerated)
    }

    pub fn order(&self) -> Result<usize, PermError> {
        Ok(self.elements()?.len())
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements.as_ref().expect("enumerated group")[i]
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.lookup.get(&g.images).map(|&i| i as usize)
    }

    /// Index of the product of elements `i` and `j`.
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        let g = self.element(i).then(self.element(j));
        self.index_of(&g).expect("closed under multiplication")
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.index_of(&self.element(i).inverse()).expect("closed under inversion")
    }

    /// Row-major Cayley table `t[i·|G| + j] = index(g_i g_j)`.
    pub fn cayley_table(&self) -> Result<Vec<u32>, PermError> {
        let n = self.order()?;
        let mut t = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                t[i * n + j] = self.mul_index(i, j) as u32;
            }
        }
        Ok(t)
    }

    /// Orbit of `x` under the generators, in discovery order.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![x];
        seen[x] = true;
        let mut k = 0;
        while k < orbit.len() {
            let y = orbit[k];
            for g in &self.generators {
                let z = g.apply(y);
                if !seen[z] {
                    seen[z] = true;
                    orbit.push(z);
                }
            }
            k += 1;
        }
        orbit
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Elements fixing `point`.
    pub fn stabilizer(&self, point: usize) -> Result<Vec<usize>, PermError> {
        Ok(self.elements()?.iter().enumerate().filter(|(_, g)| g.apply(point) == point).map(|(i, _)| i).collect())
    }

    /// Elements mapping the set `points` onto itself.
    pub fn set_stabilizer(&self, points: &[usize]) -> Result<Vec<usize>, PermError> {
        Ok(self
            .elements()?
            .iter()
            .enumerate()
            .filter(|(_, g)| points.iter().all(|&x| points.contains(&g.apply(x))))
            .map(|(i, _)| i)
            .collect())
    }
}

/// Breadth-first closure: identity first, then discovery order under right
/// multiplication by the generators.
pub fn closure(generators: Vec<Permutation>, cap: usize) -> Result<PermutationGroup, PermError> {
    let mut group = PermutationGroup::from_generators(generators)?;
    let id = Permutation::identity(group.degree);
    let mut elements = vec![id.clone()];
    let mut lookup = BTreeMap::new();
    lookup.insert(id.images, 0u32);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in &group.generators {
            let g = elements[i].then(s);
            if !lookup.contains_key(&g.images) {
                if elements.len() == cap {
                    return Err(PermError::CapExceeded(cap));
                }
                lookup.insert(g.images.clone(), elements.len() as u32);
                queue.push_back(elements.len());
                elements.push(g);
            }
        }
    }
    group.elements = Some(elements);
    group.lookup = lookup;
    Ok(group)
}

/// Orbitals of a transitive group on `[0, n)`, by union-find over the
/// generators acting diagonally on pairs. Class 0 is the diagonal; the rest
/// are ordered by (size, smallest pair index).
pub fn orbitals(g: &PermutationGroup, n: usize, cap: usize) -> Result<AssociationScheme, PermError> {
    check_orbital_input(g, n, cap)?;
    let mut uf = UnionFind::new(n * n);
    for s in g.generators() {
        union_generator(&mut uf, s, n, 0..n);
    }
    orbitals_from_partition(n, &mut uf)
}

/// Preconditions shared by serial and parallel orbital enumeration.
pub fn check_orbital_input(g: &PermutationGroup, n: usize, cap: usize) -> Result<(), PermError> {
    if g.degree() != n || !g.is_transitive() {
        return Err(PermError::NotTransitive(n));
    }
    if n * n > cap {
        return Err(SchemeError::CapExceeded { needed: n * n, cap }.into());
    }
    Ok(())
}

/// Unions `(x, y)` with `(x^s, y^s)` for rows `x` in `rows`.
pub fn union_generator(uf: &mut UnionFind, s: &Permutation, n: usize, rows: core::ops::Range<usize>) {
    for x in rows {
        let sx = s.apply(x);
        for y in 0..n {
            uf.union(x * n + y, sx * n + s.apply(y));
        }
    }
}

/// Canonical orbital scheme from a pair partition of `n × n`.
pub fn orbitals_from_partition(n: usize, uf: &mut UnionFind) -> Result<AssociationScheme, PermError> {
    let labels = uf.labels();
    let (labels, count) = canonical_relabel(&labels, 0);
    if count > 256 {
        return Err(SchemeError::TooManyClasses(count).into());
    }
    let m: Vec<u8> = labels.iter().map(|&l| l as u8).collect();
    if (1..n).any(|x| m[x * n + x] != 0) {
        return Err(PermError::NotTransitive(n));
    }
    Ok(AssociationScheme::from_matrix(n, m)?)
}

/// Conjugacy classes as a class-of map plus member lists. Class 0 is the
/// identity; the rest are ordered by (size, smallest element index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClasses {
    pub class_of: Vec<u32>,
    pub classes: Vec<Vec<usize>>,
}

impl ConjugacyClasses {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

fn blocks_from_labels(labels: &[u32], count: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); count];
    for (x, &l) in labels.iter().enumerate() {
        blocks[l as usize].push(x);
    }
    blocks
}

/// Orbits of `g ↦ s⁻¹ g s` over the generators `s`.
pub fn conjugacy_classes(g: &PermutationGroup) -> Result<ConjugacyClasses, PermError> {
    let elements = g.elements()?;
    let mut uf = UnionFind::new(elements.len());
    let invs: Vec<Permutation> = g.generators().iter().map(Permutation::inverse).collect();
    for (i, e) in elements.iter().enumerate() {
        for (s, si) in g.generators().iter().zip(&invs) {
            let c = si.then(e).then(s);
            uf.union(i, g.index_of(&c).expect("closed under conjugation"));
        }
    }
    let (class_of, count) = canonical_relabel(&uf.labels(), 0);
    let classes = blocks_from_labels(&class_of, count);
    Ok(ConjugacyClasses { class_of, classes })
}

/// Group scheme on the elements of `g`: `(x, y) ∈ R_i` iff `y x⁻¹ ∈ C_i`.
pub fn group_scheme(g: &PermutationGroup, cap: usize) -> Result<AssociationScheme, PermError> {
    let classes = conjugacy_classes(g)?;
    group_scheme_with_classes(g, &classes, cap)
}

pub fn group_scheme_with_classes(
    g: &PermutationGroup,
    classes: &ConjugacyClasses,
    cap: usize,
) -> Result<AssociationScheme, PermError> {
    let n = g.order()?;
    if n * n > cap {
        return Err(SchemeError::CapExceeded { needed: n * n, cap }.into());
    }
    if classes.len() > 256 {
        return Err(SchemeError::TooManyClasses(classes.len()).into());
    }
    let inv: Vec<usize> = (0..n).map(|i| g.inverse_index(i)).collect();
    let mut m = vec![0u8; n * n];
    for x in 0..n {
        for y in 0..n {
            m[x * n + y] = classes.class_of[g.mul_index(y, inv[x])] as u8;
        }
    }
    Ok(AssociationScheme::from_matrix(n, m)?)
}

/// Checks that `h` (element indices) is a subgroup of `g`.
pub fn check_subgroup(g: &PermutationGroup, h: &[usize]) -> Result<(), PermError> {
    let n = g.order()?;
    let mut member = vec![false; n];
    for &x in h {
        if x >= n {
            return Err(PermError::NotSubgroup);
        }
        member[x] = true;
    }
    if !member.first().copied().unwrap_or(false) {
        return Err(PermError::NotSubgroup);
    }
    for &a in h {
        for &b in h {
            if !member[g.mul_index(a, b)] {
                return Err(PermError::NotSubgroup);
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCosetDecomposition {
    pub subgroup: Vec<usize>,
    /// Part 0 is H; the rest are ordered by (size, smallest element index).
    pub parts: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub part_of: Vec<u32>,
}

pub fn double_cosets(g: &PermutationGroup, h: &[usize]) -> Result<DoubleCosetDecomposition, PermError> {
    check_subgroup(g, h)?;
    let n = g.order()?;
    let mut labels = vec![u32::MAX; n];
    let mut next = 0u32;
    for x in 0..n {
        if labels[x] != u32::MAX {
            continue;
        }
        for &a in h {
            let ax = g.mul_index(a, x);
            for &b in h {
                labels[g.mul_index(ax, b)] = next;
            }
        }
        next += 1;
    }
    let (part_of, count) = canonical_relabel(&labels, 0);
    let parts = blocks_from_labels(&part_of, count);
    let representatives = parts.iter().map(|p| p[0]).collect();
    let mut subgroup = h.to_vec();
    subgroup.sort_unstable();
    Ok(DoubleCosetDecomposition { subgroup, parts, representatives, part_of })
}

/// Right cosets `Hx`, numbered by their smallest element index.
pub fn right_cosets(g: &PermutationGroup, h: &[usize]) -> Result<Vec<u32>, PermError> {
    check_subgroup(g, h)?;
    let n = g.order()?;
    let mut coset_of = vec![u32::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if coset_of[x] == u32::MAX {
            for &a in h {
                coset_of[g.mul_index(a, x)] = next;
            }
            next += 1;
        }
    }
    Ok(coset_of)
}

/// Action of the generators of `g` on the right cosets of `h`:
/// `Hx ↦ Hxs`.
pub fn coset_action(g: &PermutationGroup, h: &[usize]) -> Result<PermutationGroup, PermError> {
    let coset_of = right_cosets(g, h)?;
    let degree = coset_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut rep = vec![usize::MAX; degree];
    for (x, &c) in coset_of.iter().enumerate() {
        if rep[c as usize] == usize::MAX {
            rep[c as usize] = x;
        }
    }
    let gens = g
        .generators()
        .iter()
        .map(|s| {
            let si = g.index_of(s).expect("generator is an element");
            let images = rep.iter().map(|&x| coset_of[g.mul_index(x, si)]).collect();
            Permutation::new(images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    PermutationGroup::from_generators(gens)
}

/// Number of right cosets fixed by each element: `#{Hx : x g x⁻¹ ∈ H}`.
pub fn permutation_character(g: &PermutationGroup, h: &[usize]) -> Result<Vec<usize>, PermError> {
    let coset_of = right_cosets(g, h)?;
    let n = g.order()?;
    Ok((0..n)
        .map(|e| {
            let mut fixed = 0;
            let mut counted = vec![false; n];
            for x in 0..n {
                let c = coset_of[x] as usize;
                if counted[c] {
                    continue;
                }
                counted[c] = true;
                if coset_of[g.mul_index(x, e)] as usize == c {
                    fixed += 1;
                }
            }
            fixed
        })
        .collect())
}

/// Convenience: the cyclic group `Z_n` generated by an `n`-cycle.
pub fn cyclic_group(n: usize) -> Result<PermutationGroup, PermError> {
    let cycle = Permutation::new((0..n as u32).map(|i| (i + 1) % n as u32).collect())?;
    closure(vec![cycle], DEFAULT_ORDER_CAP)
}

/// Convenience: the symmetric group on `n` points.
pub fn symmetric_group(n: usize) -> Result<PermutationGroup, PermError> {
    let cycle = Permutation::new((0..n as u32).map(|i| (i + 1) % n as u32).collect())?;
    let mut gens = vec![cycle];
    if n > 2 {
        gens.push(Permutation::from_cycles(n, &[vec![0, 1]])?);
    }
    closure(gens, DEFAULT_ORDER_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> PermutationGroup {
        let c = Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        let t = Permutation::from_cycles(3, &[vec![0, 1]]).unwrap();
        closure(vec![c, t], DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn permutation_basics() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        let p = Permutation::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(p.images(), &[1, 2, 0, 3]);
        assert!(p.then(&p.inverse()).is_identity());
        assert_eq!(alloc::format!("{p}"), "(0 1 2)");
        assert_eq!(alloc::format!("{}", Permutation::identity(2)), "()");
    }

    #[test]
    fn closure_examples() {
        let trivial = closure(vec![Permutation::identity(4)], 10).unwrap();
        assert_eq!(trivial.order().unwrap(), 1);
        assert_eq!(s3().order().unwrap(), 6);
        assert!(s3().element(0).is_identity());
        assert_eq!(closure(s3().generators().to_vec(), 5).unwrap_err(), PermError::CapExceeded(5));
        assert_eq!(
            PermutationGroup::from_generators(vec![Permutation::identity(2), Permutation::identity(3)]).unwrap_err(),
            PermError::DegreeMismatch
        );
    }

    #[test]
    fn orbitals_examples() {
        let g = s3();
        let s = orbitals(&g, 3, DEFAULT_RELATION_CAP).unwrap();
        assert_eq!(s.valencies(), &[1, 2]);

        let z3 = cyclic_group(3).unwrap();
        let s = orbitals(&z3, 3, DEFAULT_RELATION_CAP).unwrap();
        assert_eq!(s.valencies(), &[1, 1, 1]);

        let trivial = PermutationGroup::from_generators(vec![Permutation::identity(2)]).unwrap();
        assert_eq!(orbitals(&trivial, 2, DEFAULT_RELATION_CAP).unwrap_err(), PermError::NotTransitive(2));
    }

    #[test]
    fn conjugacy_examples() {
        let z5 = cyclic_group(5).unwrap();
        assert_eq!(conjugacy_classes(&z5).unwrap().sizes(), vec![1; 5]);
        let mut sizes = conjugacy_classes(&s3()).unwrap().sizes();
        assert_eq!(sizes, vec![1, 2, 3]);
        sizes.sort_unstable();
        assert_eq!(sizes.iter().sum::<usize>(), 6);
        let gens_only = PermutationGroup::from_generators(s3().generators().to_vec()).unwrap();
        assert_eq!(conjugacy_classes(&gens_only).unwrap_err(), PermError::NotEnumerated);
    }

    #[test]
    fn group_scheme_examples() {
        let z3 = group_scheme(&cyclic_group(3).unwrap(), DEFAULT_RELATION_CAP).unwrap();
        assert_eq!(z3.valencies(), &[1, 1, 1]);
        let s = group_scheme(&s3(), DEFAULT_RELATION_CAP).unwrap();
        assert_eq!(s.valencies(), &[1, 2, 3]);
    }

    #[test]
    fn double_coset_examples() {
        let g = s3();
        let all: Vec<usize> = (0..6).collect();
        let d = double_cosets(&g, &all).unwrap();
        assert_eq!(d.parts.len(), 1);
        let d = double_cosets(&g, &[0]).unwrap();
        assert_eq!(d.parts.len(), 6);

        let t = g.index_of(&Permutation::from_cycles(3, &[vec![0, 1]]).unwrap()).unwrap();
        let d = double_cosets(&g, &[0, t]).unwrap();
        let sizes: Vec<usize> = d.parts.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 4]);
        let mut h = vec![0, t];
        h.sort_unstable();
        assert_eq!(d.parts[0], h);

        let c = g.index_of(&Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap()).unwrap();
        assert_eq!(double_cosets(&g, &[0, c]).unwrap_err(), PermError::NotSubgroup);
    }

    #[test]
    fn coset_action_examples() {
        let g = s3();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(coset_action(&g, &all).unwrap().degree(), 1);

        let t = g.index_of(&Permutation::from_cycles(3, &[vec![0, 1]]).unwrap()).unwrap();
        let a = coset_action(&g, &[0, t]).unwrap();
        assert_eq!(a.degree(), 3);
        assert!(a.is_transitive());
        assert_eq!(closure(a.generators().to_vec(), 100).unwrap().order().unwrap(), 6);
    }

    #[test]
    fn permutation_character_of_natural_action() {
        let g = s3();
        let t = g.index_of(&Permutation::from_cycles(3, &[vec![0, 1]]).unwrap()).unwrap();
        let chi = permutation_character(&g, &[0, t]).unwrap();
        for (i, e) in g.elements().unwrap().iter().enumerate() {
            assert_eq!(chi[i], e.fixed_points());
        }
    }
}
