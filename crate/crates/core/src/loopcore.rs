//! Finite loops: Latin-square and Moufang checks, the multiplication group
//! Gr(Q), inner-mapping orbits and the loop association scheme.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::permgroup::{PermError, Permutation, PermutationGroup};
use crate::scheme::{verify_scheme_axioms, AssociationScheme, SchemeError};
use crate::unionfind::{canonical_relabel, UnionFind};

/// Default seed for randomized inner-orbit sampling.
pub const DEFAULT_SEED: u64 = 0xA55C;

/// Largest loop accepted by exhaustive Moufang checking.
pub const EXHAUSTIVE_MOUFANG_LIMIT: usize = 150;

/// Largest loop accepted by the exact inner-orbit policy.
pub const EXACT_ORBIT_LIMIT: usize = 2000;

pub const DEFAULT_MAX_ROUNDS: usize = 10;

/// Fresh inner mappings applied to every point when certifying a partition.
const CERTIFY_MAPPINGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("table is not a loop: {0:?}")]
    NotALoop(QuasigroupViolation),
    #[error("loop of order {size} exceeds the limit {limit} for this operation")]
    TooLarge { size: usize, limit: usize },
    #[error("inner-orbit partition failed certification after {0} rounds")]
    CertificationFailed(usize),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A finite set with a binary operation on indices `0..size`.
pub trait Magma {
    fn size(&self) -> usize;
    fn mul(&self, x: usize, y: usize) -> usize;
}

/// A loop with identity 0 and both divisions.
pub trait Loop {
    fn size(&self) -> usize;
    fn mul(&self, x: usize, y: usize) -> usize;
    /// `u \ v`: the unique `z` with `u z = v`.
    fn left_div(&self, u: usize, v: usize) -> usize;
    /// `v / u`: the unique `z` with `z u = v`.
    fn right_div(&self, v: usize, u: usize) -> usize;
}

impl<L: Loop + ?Sized> Loop for Arc<L> {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        (**self).mul(x, y)
    }
    fn left_div(&self, u: usize, v: usize) -> usize {
        (**self).left_div(u, v)
    }
    fn right_div(&self, v: usize, u: usize) -> usize {
        (**self).right_div(v, u)
    }
}

/// An unchecked square table, `table[x·n + y] = x·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    pub n: usize,
    pub table: Vec<u32>,
}

impl Magma for CayleyTable {
    fn size(&self) -> usize {
        self.n
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }
}

struct AsMagma<'a, L: ?Sized>(&'a L);

impl<L: Loop + ?Sized> Magma for AsMagma<'_, L> {
    fn size(&self) -> usize {
        self.0.size()
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        self.0.mul(x, y)
    }
}

/// A table-backed loop with precomputed division tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableLoop {
    n: usize,
    table: Vec<u32>,
    ldiv: Vec<u32>,
    rdiv: Vec<u32>,
}

impl TableLoop {
    /// Validates the Latin-square property and the identity at index 0.
    pub fn new(n: usize, table: Vec<u32>) -> Result<Self, LoopError> {
        let raw = CayleyTable { n, table };
        if let Some(v) = quasigroup_check(&raw).violation {
            return Err(LoopError::NotALoop(v));
        }
        let table = raw.table;
        let mut ldiv = vec![0u32; n * n];
        let mut rdiv = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let z = table[x * n + y] as usize;
                ldiv[x * n + z] = y as u32;
                rdiv[z * n + y] = x as u32;
            }
        }
        Ok(TableLoop { n, table, ldiv, rdiv })
    }

    /// Cayley table of an enumerated permutation group.
    pub fn from_group(g: &PermutationGroup) -> Result<Self, LoopError> {
        let n = g.order()?;
        TableLoop::new(n, g.cayley_table()?)
    }

    /// Copies the multiplication of any loop into a table.
    pub fn from_loop<L: Loop + ?Sized>(lp: &L) -> Result<Self, LoopError> {
        let n = lp.size();
        let table = (0..n * n).map(|e| lp.mul(e / n, e % n) as u32).collect();
        TableLoop::new(n, table)
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }
}

impl Loop for TableLoop {
    fn size(&self) -> usize {
        self.n
    }
    #[inline]
    fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }
    #[inline]
    fn left_div(&self, u: usize, v: usize) -> usize {
        self.ldiv[u * self.n + v] as usize
    }
    #[inline]
    fn right_div(&self, v: usize, u: usize) -> usize {
        self.rdiv[v * self.n + u] as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuasigroupViolation {
    OutOfRange { x: usize, y: usize, value: usize },
    /// `x·y1 = x·y2` with `y1 < y2`.
    RowRepeat { x: usize, y1: usize, y2: usize },
    /// `x1·y = x2·y` with `x1 < x2`.
    ColumnRepeat { x1: usize, x2: usize, y: usize },
    /// `0·x ≠ x` or `x·0 ≠ x`.
    Identity { x: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasigroupReport {
    pub passed: bool,
    pub violation: Option<QuasigroupViolation>,
}

/// Latin-square property plus a two-sided identity at index 0.
pub fn quasigroup_check<M: Magma + ?Sized>(m: &M) -> QuasigroupReport {
    let violation = find_quasigroup_violation(m);
    QuasigroupReport { passed: violation.is_none(), violation }
}

pub fn quasigroup_check_loop<L: Loop + ?Sized>(lp: &L) -> QuasigroupReport {
    quasigroup_check(&AsMagma(lp))
}

fn find_quasigroup_violation<M: Magma + ?Sized>(m: &M) -> Option<QuasigroupViolation> {
    let n = m.size();
    let mut row_seen = vec![usize::MAX; n];
    let mut col_seen = vec![usize::MAX; n * n];
    for x in 0..n {
        row_seen.iter_mut().for_each(|s| *s = usize::MAX);
        for y in 0..n {
            let v = m.mul(x, y);
            if v >= n {
                return Some(QuasigroupViolation::OutOfRange { x, y, value: v });
            }
            if row_seen[v] != usize::MAX {
                return Some(QuasigroupViolation::RowRepeat { x, y1: row_seen[v], y2: y });
            }
            row_seen[v] = y;
            let slot = &mut col_seen[y * n + v];
            if *slot != usize::MAX {
                return Some(QuasigroupViolation::ColumnRepeat { x1: *slot, x2: x, y });
            }
            *slot = x;
        }
    }
    (0..n).find(|&x| m.mul(0, x) != x || m.mul(x, 0) != x).map(|x| QuasigroupViolation::Identity { x })
}

/// The four Moufang identities.
pub const MOUFANG_IDENTITIES: [&str; 4] = [
    "((xy)x)z = x(y(xz))",
    "x(y(zy)) = ((xy)z)y",
    "(xy)(zx) = x((yz)x)",
    "(xy)(zx) = (x(yz))x",
];

#[inline]
fn moufang_holds<M: Magma + ?Sized>(m: &M, which: usize, x: usize, y: usize, z: usize) -> bool {
    let p = |a, b| m.mul(a, b);
    match which {
        0 => p(p(p(x, y), x), z) == p(x, p(y, p(x, z))),
        1 => p(x, p(y, p(z, y))) == p(p(p(x, y), z), y),
        2 => p(p(x, y), p(z, x)) == p(x, p(p(y, z), x)),
        _ => p(p(x, y), p(z, x)) == p(p(x, p(y, z)), x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoufangReport {
    pub triples: usize,
    pub identities: Vec<IdentityResult>,
}

impl MoufangReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|r| r.passed)
    }
}

fn for_each_triple(n: usize, mode: CheckMode, mut f: impl FnMut(usize, usize, usize)) -> Result<usize, LoopError> {
    match mode {
        CheckMode::Exhaustive => {
            if n > EXHAUSTIVE_MOUFANG_LIMIT {
                return Err(LoopError::TooLarge { size: n, limit: EXHAUSTIVE_MOUFANG_LIMIT });
            }
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        f(x, y, z);
                    }
                }
            }
            Ok(n * n * n)
        }
        CheckMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                f(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            }
            Ok(count)
        }
    }
}

/// Checks all four Moufang identities, recording the first failing triple of
/// each.
pub fn moufang_check<M: Magma + ?Sized>(m: &M, mode: CheckMode) -> Result<MoufangReport, LoopError> {
    let mut witness: [Option<(usize, usize, usize)>; 4] = [None; 4];
    let triples = for_each_triple(m.size(), mode, |x, y, z| {
        for (k, w) in witness.iter_mut().enumerate() {
            if w.is_none() && !moufang_holds(m, k, x, y, z) {
                *w = Some((x, y, z));
            }
        }
    })?;
    let identities = MOUFANG_IDENTITIES
        .iter()
        .zip(witness)
        .map(|(&name, w)| IdentityResult { name, passed: w.is_none(), witness: w })
        .collect();
    Ok(MoufangReport { triples, identities })
}

pub fn moufang_check_loop<L: Loop + ?Sized>(lp: &L, mode: CheckMode) -> Result<MoufangReport, LoopError> {
    moufang_check(&AsMagma(lp), mode)
}

/// First triple with `(xy)z ≠ x(yz)`, if any.
pub fn associativity_witness<L: Loop + ?Sized>(lp: &L, mode: CheckMode) -> Result<Option<(usize, usize, usize)>, LoopError> {
    let mut found = None;
    for_each_triple(lp.size(), mode, |x, y, z| {
        if found.is_none() && lp.mul(lp.mul(x, y), z) != lp.mul(x, lp.mul(y, z)) {
            found = Some((x, y, z));
        }
    })?;
    Ok(found)
}

/// `L(x): y ↦ xy` for every `x`, followed by `R(x): y ↦ yx`.
pub fn multiplication_group_generators<L: Loop + ?Sized>(lp: &L) -> Vec<Permutation> {
    let n = lp.size();
    let left = (0..n).map(|x| (0..n).map(|y| lp.mul(x, y) as u32).collect::<Vec<_>>());
    let right = (0..n).map(|x| (0..n).map(|y| lp.mul(y, x) as u32).collect::<Vec<_>>());
    left.chain(right).map(|images| Permutation::new(images).expect("Latin rows are bijections")).collect()
}

/// Loop analogue of conjugacy classes: orbits of the inner mapping group
/// (the stabilizer of 1 in Gr(Q)). Class 0 is `{1}`; the rest are ordered by
/// (size, smallest index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerOrbitPartition {
    pub class_of: Vec<u32>,
    pub class_count: usize,
}

impl InnerOrbitPartition {
    pub fn from_labels(labels: &[u32]) -> Self {
        let (class_of, class_count) = canonical_relabel(labels, 0);
        InnerOrbitPartition { class_of, class_count }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitPolicy {
    /// Union-find over Gr(Q) acting on Q × Q.
    Exact,
    /// Sampled inner mappings, certified by the scheme axioms.
    Randomized { seed: u64, max_rounds: usize },
}

impl OrbitPolicy {
    pub fn randomized(seed: u64) -> Self {
        OrbitPolicy::Randomized { seed, max_rounds: DEFAULT_MAX_ROUNDS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMapping {
    /// `T(x) = L(x)⁻¹R(x)`: `z ↦ x \ (zx)`.
    T(usize),
    /// `L(xy)⁻¹L(x)L(y)`: `z ↦ (xy) \ (x(yz))`.
    L(usize, usize),
    /// `R(xy)⁻¹R(y)R(x)`: `z ↦ ((zx)y) / (xy)`.
    R(usize, usize),
}

impl InnerMapping {
    #[inline]
    pub fn apply<L: Loop + ?Sized>(self, lp: &L, z: usize) -> usize {
        match self {
            InnerMapping::T(x) => lp.left_div(x, lp.mul(z, x)),
            InnerMapping::L(x, y) => lp.left_div(lp.mul(x, y), lp.mul(x, lp.mul(y, z))),
            InnerMapping::R(x, y) => lp.right_div(lp.mul(lp.mul(z, x), y), lp.mul(x, y)),
        }
    }

    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match rng.gen_range(0..3) {
            0 => InnerMapping::T(x),
            1 => InnerMapping::L(x, y),
            _ => InnerMapping::R(x, y),
        }
    }
}

pub fn inner_orbits<L>(lp: &Arc<L>, policy: OrbitPolicy) -> Result<InnerOrbitPartition, LoopError>
where
    L: Loop + Send + Sync + 'static,
{
    match policy {
        OrbitPolicy::Exact => exact_inner_orbits(&**lp),
        OrbitPolicy::Randomized { seed, max_rounds } => randomized_inner_orbits(lp, seed, max_rounds),
    }
}

fn exact_inner_orbits<L: Loop + ?Sized>(lp: &L) -> Result<InnerOrbitPartition, LoopError> {
    let n = lp.size();
    if n > EXACT_ORBIT_LIMIT {
        return Err(LoopError::TooLarge { size: n, limit: EXACT_ORBIT_LIMIT });
    }
    let mut uf = UnionFind::new(n * n);
    for g in multiplication_group_generators(lp) {
        for u in 0..n {
            let gu = g.apply(u);
            for v in 0..n {
                uf.union(u * n + v, gu * n + g.apply(v));
            }
        }
    }
    let labels: Vec<u32> = (0..n).map(|z| uf.find(z) as u32).collect();
    Ok(InnerOrbitPartition::from_labels(&labels))
}

fn randomized_inner_orbits<L>(lp: &Arc<L>, seed: u64, max_rounds: usize) -> Result<InnerOrbitPartition, LoopError>
where
    L: Loop + Send + Sync + 'static,
{
    let n = lp.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uf = UnionFind::new(n);
    let window = 3 * n;
    for _ in 0..max_rounds {
        // Refine until 3|Q| consecutive point applications merge nothing.
        let mut quiet = 0;
        'sample: loop {
            let phi = InnerMapping::random(&mut rng, n);
            for z in 0..n {
                if uf.union(z, phi.apply(&**lp, z)) {
                    quiet = 0;
                } else {
                    quiet += 1;
                    if quiet >= window {
                        break 'sample;
                    }
                }
            }
        }

        let partition = InnerOrbitPartition::from_labels(&uf.labels());
        let mut invariant = true;
        for _ in 0..CERTIFY_MAPPINGS {
            let phi = InnerMapping::random(&mut rng, n);
            for z in 0..n {
                let w = phi.apply(&**lp, z);
                if partition.class_of[z] != partition.class_of[w] {
                    uf.union(z, w);
                    invariant = false;
                }
            }
        }
        if !invariant {
            continue;
        }
        let scheme = loop_scheme(lp.clone(), &partition)?;
        if verify_scheme_axioms(&scheme).passed {
            return Ok(partition);
        }
    }
    Err(LoopError::CertificationFailed(max_rounds))
}

/// Scheme on Q with `(u, v) ∈ R_i` iff `v / u` lies in class `i`.
pub fn loop_scheme<L>(lp: Arc<L>, classes: &InnerOrbitPartition) -> Result<AssociationScheme, LoopError>
where
    L: Loop + Send + Sync + 'static,
{
    let n = lp.size();
    let class_of = Arc::new(classes.class_of.clone());
    let f = Arc::new(move |u: usize, v: usize| class_of[lp.right_div(v, u)] as usize);
    Ok(AssociationScheme::from_fn_auto(n, classes.class_count, f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::{conjugacy_classes, cyclic_group, symmetric_group};

    #[test]
    fn bad_tables_are_reported() {
        let t = CayleyTable { n: 3, table: vec![0, 1, 2, 1, 1, 0, 2, 0, 1] };
        let r = quasigroup_check(&t);
        assert!(!r.passed);
        assert_eq!(r.violation, Some(QuasigroupViolation::RowRepeat { x: 1, y1: 0, y2: 1 }));

        let no_identity = CayleyTable { n: 2, table: vec![1, 0, 0, 1] };
        assert_eq!(quasigroup_check(&no_identity).violation, Some(QuasigroupViolation::Identity { x: 0 }));
        assert!(TableLoop::new(2, vec![1, 0, 0, 1]).is_err());
    }

    #[test]
    fn group_tables_pass() {
        let s3 = TableLoop::from_group(&symmetric_group(3).unwrap()).unwrap();
        assert!(quasigroup_check_loop(&s3).passed);
        assert!(moufang_check_loop(&s3, CheckMode::Exhaustive).unwrap().passed());
        assert_eq!(associativity_witness(&s3, CheckMode::Exhaustive).unwrap(), None);
    }

    #[test]
    fn divisions_invert_multiplication() {
        let s3 = TableLoop::from_group(&symmetric_group(3).unwrap()).unwrap();
        for u in 0..6 {
            for v in 0..6 {
                assert_eq!(s3.mul(s3.right_div(v, u), u), v);
                assert_eq!(s3.mul(u, s3.left_div(u, v)), v);
            }
        }
    }

    #[test]
    fn translations() {
        let z4 = TableLoop::from_group(&cyclic_group(4).unwrap()).unwrap();
        let gens = multiplication_group_generators(&z4);
        assert_eq!(gens.len(), 8);
        assert!(gens[0].is_identity() && gens[4].is_identity());
        for x in 0..4 {
            assert_eq!(gens[x], gens[4 + x]);
        }
    }

    #[test]
    fn group_inner_orbits_are_conjugacy_classes() {
        for g in [symmetric_group(3).unwrap(), cyclic_group(4).unwrap(), symmetric_group(4).unwrap()] {
            let lp = Arc::new(TableLoop::from_group(&g).unwrap());
            let cc = conjugacy_classes(&g).unwrap();
            let exact = inner_orbits(&lp, OrbitPolicy::Exact).unwrap();
            let sampled = inner_orbits(&lp, OrbitPolicy::randomized(DEFAULT_SEED)).unwrap();
            assert_eq!(exact.class_of, cc.class_of);
            assert_eq!(sampled, exact);
        }
    }

    #[test]
    fn loop_scheme_relation_basics() {
        let g = symmetric_group(3).unwrap();
        let lp = Arc::new(TableLoop::from_group(&g).unwrap());
        let classes = inner_orbits(&lp, OrbitPolicy::Exact).unwrap();
        let s = loop_scheme(lp.clone(), &classes).unwrap();
        for u in 0..6 {
            assert_eq!(s.relation(u, u), 0);
            assert_eq!(s.relation(0, u), classes.class_of[u] as usize);
        }
    }

    #[test]
    fn exhaustive_limit() {
        let big = TableLoop::from_group(&cyclic_group(151).unwrap()).unwrap();
        assert_eq!(
            moufang_check_loop(&big, CheckMode::Exhaustive).unwrap_err(),
            LoopError::TooLarge { size: 151, limit: EXHAUSTIVE_MOUFANG_LIMIT }
        );
    }
}
