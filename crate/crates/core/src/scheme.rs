//! Association schemes: relation storage, intersection numbers, axiom checks
//! and fusion.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Schemes up to this many points keep a dense byte matrix when built from a
/// relation function.
pub const DENSE_LIMIT: usize = 4096;

/// Below this size intersection numbers are counted from every pair.
pub const EXHAUSTIVE_LIMIT: usize = 300;

/// Default number of representative pairs per class for larger schemes.
pub const DEFAULT_REPS: usize = 3;

/// Rows checked for regularity on function-backed schemes.
const SAMPLED_ROWS: usize = 16;

pub type RelationFn = Arc<dyn Fn(usize, usize) -> usize + Send + Sync>;

#[derive(Clone)]
pub enum Relation {
    /// Row-major `n × n` class indices.
    Matrix(Arc<Vec<u8>>),
    Computed(RelationFn),
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Matrix(m) => write!(f, "Matrix({} entries)", m.len()),
            Relation::Computed(_) => f.write_str("Computed"),
        }
    }
}

/// Where a scheme came from; enough to rebuild function-backed schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Explicit,
    /// Loop scheme of M*(q), inner orbits sampled with `seed`.
    Paige { q: u32, seed: u64 },
    Fusion { base: Box<Provenance>, cells: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `relation(x, y)` is 0 off the diagonal or nonzero on it.
    Diagonal { x: usize, y: usize, class: usize },
    /// A class index that does not occur in row 0.
    EmptyClass { class: usize },
    /// `relation(y, x)` is not the transpose of `relation(x, y)`.
    Transpose { x: usize, y: usize },
    RowRegularity { row: usize, class: usize, count: usize, expected: usize },
    /// Two representatives of class `h` disagree on `p_ij^h`.
    Intersection { i: usize, j: usize, h: usize, first: (usize, usize, u64), second: (usize, usize, u64) },
    /// An identity such as `Σ_j p_ij^h = k_i` fails.
    Parameters { i: usize, j: usize, h: usize },
    IdentityCell,
    TransposeCell { cell: usize },
    NotAPartition,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Diagonal { x, y, class } => write!(f, "diagonal violation at ({x}, {y}) with class {class}"),
            Violation::EmptyClass { class } => write!(f, "class {class} does not occur in row 0"),
            Violation::Transpose { x, y } => write!(f, "transpose mismatch at ({x}, {y})"),
            Violation::RowRegularity { row, class, count, expected } => {
                write!(f, "row {row} has {count} entries of class {class}, expected {expected}")
            }
            Violation::Intersection { i, j, h, first, second } => write!(
                f,
                "p_{i}{j}^{h} = {} at ({}, {}) but {} at ({}, {})",
                first.2, first.0, first.1, second.2, second.0, second.1
            ),
            Violation::Parameters { i, j, h } => write!(f, "parameter identity fails at (i, j, h) = ({i}, {j}, {h})"),
            Violation::IdentityCell => f.write_str("the cell containing class 0 must be {0}"),
            Violation::TransposeCell { cell } => write!(f, "cell {cell} is not closed under transposition"),
            Violation::NotAPartition => f.write_str("cells do not partition the class indices"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("not an association scheme: {0}")]
    NotAScheme(Violation),
    #[error("invalid fusion: {0}")]
    InvalidFusion(Violation),
    #[error("{needed} relation entries exceed cap {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("{0} classes exceed the byte-matrix limit of 256")]
    TooManyClasses(usize),
}

#[derive(Debug, Clone)]
pub struct AssociationScheme {
    n: usize,
    classes: usize,
    relation: Relation,
    valencies: Vec<usize>,
    transpose: Vec<usize>,
    provenance: Provenance,
}

impl AssociationScheme {
    /// Wraps a row-major class matrix. Valencies are read off row 0.
    pub fn from_matrix(n: usize, matrix: Vec<u8>) -> Result<Self, SchemeError> {
        assert_eq!(matrix.len(), n * n, "matrix must be n × n");
        let classes = matrix.iter().map(|&c| c as usize + 1).max().unwrap_or(1);
        Self::build(n, classes, Relation::Matrix(Arc::new(matrix)))
    }

    /// Function-backed scheme with `classes` relation indices.
    pub fn from_fn(n: usize, classes: usize, f: RelationFn) -> Result<Self, SchemeError> {
        Self::build(n, classes, Relation::Computed(f))
    }

    /// Materializes `f` into a byte matrix when `n` is small, otherwise keeps
    /// it function-backed.
    pub fn from_fn_auto(n: usize, classes: usize, f: RelationFn) -> Result<Self, SchemeError> {
        if n <= DENSE_LIMIT && classes <= 256 {
            let mut m = vec![0u8; n * n];
            for x in 0..n {
                for y in 0..n {
                    m[x * n + y] = f(x, y) as u8;
                }
            }
            Self::build(n, classes, Relation::Matrix(Arc::new(m)))
        } else {
            Self::from_fn(n, classes, f)
        }
    }

    fn build(n: usize, classes: usize, relation: Relation) -> Result<Self, SchemeError> {
        if classes > 256 {
            if let Relation::Matrix(_) = relation {
                return Err(SchemeError::TooManyClasses(classes));
            }
        }
        let mut s = AssociationScheme {
            n,
            classes,
            relation,
            valencies: vec![0; classes],
            transpose: vec![0; classes],
            provenance: Provenance::Explicit,
        };
        if n == 0 {
            return Err(SchemeError::NotAScheme(Violation::EmptyClass { class: 0 }));
        }
        let mut witness = vec![usize::MAX; classes];
        for y in 0..n {
            let c = s.relation(0, y);
            if c >= classes {
                return Err(SchemeError::NotAScheme(Violation::EmptyClass { class: c }));
            }
            if (c == 0) != (y == 0) {
                return Err(SchemeError::NotAScheme(Violation::Diagonal { x: 0, y, class: c }));
            }
            s.valencies[c] += 1;
            if witness[c] == usize::MAX {
                witness[c] = y;
            }
        }
        for (c, &y) in witness.iter().enumerate() {
            if y == usize::MAX {
                return Err(SchemeError::NotAScheme(Violation::EmptyClass { class: c }));
            }
            s.transpose[c] = s.relation(y, 0);
        }
        Ok(s)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Number of points |X|.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of relations d + 1.
    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn d(&self) -> usize {
        self.classes - 1
    }

    #[inline]
    pub fn relation(&self, x: usize, y: usize) -> usize {
        match &self.relation {
            Relation::Matrix(m) => m[x * self.n + y] as usize,
            Relation::Computed(f) => f(x, y),
        }
    }

    pub fn relation_store(&self) -> &Relation {
        &self.relation
    }

    pub fn matrix(&self) -> Option<&[u8]> {
        match &self.relation {
            Relation::Matrix(m) => Some(m),
            Relation::Computed(_) => None,
        }
    }

    pub fn valencies(&self) -> &[usize] {
        &self.valencies
    }

    /// `i ↦ i'` with `R_{i'} = R_i^T`.
    pub fn transpose_map(&self) -> &[usize] {
        &self.transpose
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// Dense copy of the relation, subject to `cap` entries.
    pub fn materialize(&self, cap: usize) -> Result<AssociationScheme, SchemeError> {
        if self.matrix().is_some() {
            return Ok(self.clone());
        }
        let needed = self.n * self.n;
        if needed > cap {
            return Err(SchemeError::CapExceeded { needed, cap });
        }
        if self.classes > 256 {
            return Err(SchemeError::TooManyClasses(self.classes));
        }
        let mut m = vec![0u8; needed];
        for x in 0..self.n {
            for y in 0..self.n {
                m[x * self.n + y] = self.relation(x, y) as u8;
            }
        }
        Ok(AssociationScheme { relation: Relation::Matrix(Arc::new(m)), ..self.clone() })
    }

    /// Rows used for sampled checks: all rows for dense schemes, otherwise a
    /// spread of [`SAMPLED_ROWS`] rows including 0.
    pub fn check_rows(&self) -> Vec<usize> {
        if self.matrix().is_some() || self.n <= SAMPLED_ROWS {
            (0..self.n).collect()
        } else {
            spread(self.n, SAMPLED_ROWS)
        }
    }
}

fn spread(n: usize, count: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..count).map(|r| r * n / count).collect();
    rows.dedup();
    rows
}

/// How many representative pairs of each class to count from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepPolicy {
    /// Every pair when `n ≤ 300`, otherwise [`DEFAULT_REPS`].
    Default,
    PerClass(usize),
    AllPairs,
}

/// `p_ij^h` for a scheme with `c = d + 1` classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionNumbers {
    classes: usize,
    p: Vec<u64>,
    valencies: Vec<usize>,
    transpose: Vec<usize>,
}

impl IntersectionNumbers {
    /// From a `c × c × c` array indexed `[i][j][h]`.
    pub fn from_array(classes: usize, p: Vec<u64>) -> Self {
        assert_eq!(p.len(), classes * classes * classes);
        let idx = |i: usize, j: usize, h: usize| (i * classes + j) * classes + h;
        let mut transpose = vec![0; classes];
        let mut valencies = vec![0; classes];
        for i in 0..classes {
            if let Some(j) = (0..classes).find(|&j| p[idx(i, j, 0)] != 0) {
                transpose[i] = j;
                valencies[i] = p[idx(i, j, 0)] as usize;
            }
        }
        IntersectionNumbers { classes, p, valencies, transpose }
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, h: usize) -> u64 {
        self.p[(i * self.classes + j) * self.classes + h]
    }

    pub fn as_array(&self) -> &[u64] {
        &self.p
    }

    /// `k_i = p_{ii'}^0`.
    pub fn valencies(&self) -> &[usize] {
        &self.valencies
    }

    pub fn transpose_map(&self) -> &[usize] {
        &self.transpose
    }

    pub fn point_count(&self) -> usize {
        self.valencies.iter().sum()
    }

    /// Row-major `B_i` with `(B_i)[h][j] = p_ij^h`.
    pub fn b_matrix(&self, i: usize) -> Vec<i64> {
        let c = self.classes;
        let mut b = vec![0i64; c * c];
        for h in 0..c {
            for j in 0..c {
                b[h * c + j] = self.get(i, j, h) as i64;
            }
        }
        b
    }

    /// Exact check that `B_i B_j = B_j B_i` for all `i, j`.
    pub fn is_commutative(&self) -> bool {
        let c = self.classes;
        let bs: Vec<Vec<i64>> = (0..c).map(|i| self.b_matrix(i)).collect();
        let mul = |a: &[i64], b: &[i64]| {
            let mut out = vec![0i64; c * c];
            for r in 0..c {
                for k in 0..c {
                    let x = a[r * c + k];
                    if x != 0 {
                        for s in 0..c {
                            out[r * c + s] += x * b[k * c + s];
                        }
                    }
                }
            }
            out
        };
        (0..c).all(|i| (i + 1..c).all(|j| mul(&bs[i], &bs[j]) == mul(&bs[j], &bs[i])))
    }

    /// `p_ij^0 = k_i δ_{j i'}`, `Σ_j p_ij^h = k_i`, `Σ_h p_ij^h k_h = k_i k_j`
    /// and `B_0 = I`.
    pub fn check_identities(&self) -> Result<(), Violation> {
        let c = self.classes;
        let k = &self.valencies;
        for i in 0..c {
            for j in 0..c {
                let expect0 = if j == self.transpose[i] { k[i] as u64 } else { 0 };
                if self.get(i, j, 0) != expect0 {
                    return Err(Violation::Parameters { i, j, h: 0 });
                }
                let weighted: u64 = (0..c).map(|h| self.get(i, j, h) * k[h] as u64).sum();
                if weighted != (k[i] * k[j]) as u64 {
                    return Err(Violation::Parameters { i, j, h: usize::MAX });
                }
                for h in 0..c {
                    let expect = u64::from(j == h);
                    if self.get(0, j, h) != expect {
                        return Err(Violation::Parameters { i: 0, j, h });
                    }
                }
            }
            for h in 0..c {
                let row: u64 = (0..c).map(|j| self.get(i, j, h)).sum();
                if row != k[i] as u64 {
                    return Err(Violation::Parameters { i, j: usize::MAX, h });
                }
            }
        }
        Ok(())
    }
}

fn count_pair(s: &AssociationScheme, row_x: &[u8], x: usize, y: usize, counts: &mut [u64]) {
    let c = s.classes;
    counts.iter_mut().for_each(|v| *v = 0);
    for z in 0..s.n {
        let i = if row_x.is_empty() { s.relation(x, z) } else { row_x[z] as usize };
        let j = s.relation(z, y);
        counts[i * c + j] += 1;
    }
}

/// Counts `p_ij^h = #{z : (x,z) ∈ R_i, (z,y) ∈ R_j}` over representative
/// pairs `(x, y) ∈ R_h`. Disagreement between representatives means the
/// relation partition is not a scheme.
pub fn intersection_numbers(s: &AssociationScheme, policy: RepPolicy) -> Result<IntersectionNumbers, SchemeError> {
    let c = s.classes;
    let n = s.n;
    let all_pairs = match policy {
        RepPolicy::AllPairs => true,
        RepPolicy::Default => n <= EXHAUSTIVE_LIMIT,
        RepPolicy::PerClass(_) => false,
    };
    let local;
    let s = if all_pairs && s.matrix().is_none() && n * n <= 1 << 24 {
        local = s.materialize(usize::MAX)?;
        &local
    } else {
        s
    };

    let mut p = vec![0u64; c * c * c];
    let mut seen: Vec<Option<(usize, usize)>> = vec![None; c];
    let mut counts = vec![0u64; c * c];
    let mut row_buf = Vec::new();

    let mut record = |h: usize, x: usize, y: usize, counts: &[u64], p: &mut [u64]| -> Result<(), SchemeError> {
        match seen[h] {
            None => {
                seen[h] = Some((x, y));
                for i in 0..c {
                    for j in 0..c {
                        p[(i * c + j) * c + h] = counts[i * c + j];
                    }
                }
            }
            Some((x0, y0)) => {
                for i in 0..c {
                    for j in 0..c {
                        let old = p[(i * c + j) * c + h];
                        let new = counts[i * c + j];
                        if old != new {
                            return Err(SchemeError::NotAScheme(Violation::Intersection {
                                i,
                                j,
                                h,
                                first: (x0, y0, old),
                                second: (x, y, new),
                            }));
                        }
                    }
                }
            }
        }
        Ok(())
    };

    if all_pairs {
        for x in 0..n {
            row_buf.clear();
            row_buf.extend((0..n).map(|z| s.relation(x, z) as u8));
            for y in 0..n {
                let h = row_buf[y] as usize;
                count_pair(s, &row_buf, x, y, &mut counts);
                record(h, x, y, &counts, &mut p)?;
            }
        }
    } else {
        let reps = match policy {
            RepPolicy::PerClass(r) => r.max(1),
            _ => DEFAULT_REPS,
        };
        for x in spread(n, reps) {
            let row: Vec<u8> = if c <= 256 { (0..n).map(|z| s.relation(x, z) as u8).collect() } else { Vec::new() };
            let mut first_y = vec![usize::MAX; c];
            for y in 0..n {
                let h = if row.is_empty() { s.relation(x, y) } else { row[y] as usize };
                if first_y[h] == usize::MAX {
                    first_y[h] = y;
                }
            }
            for (h, &y) in first_y.iter().enumerate() {
                if y == usize::MAX {
                    return Err(SchemeError::NotAScheme(Violation::RowRegularity {
                        row: x,
                        class: h,
                        count: 0,
                        expected: s.valencies[h],
                    }));
                }
                count_pair(s, &row, x, y, &mut counts);
                record(h, x, y, &counts, &mut p)?;
            }
        }
    }
    Ok(IntersectionNumbers::from_array(c, p))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeReport {
    pub passed: bool,
    pub commutative: bool,
    pub violations: Vec<Violation>,
}

/// Checks the diagonal class, transpose closure, row-regularity and
/// representative-independence of the intersection numbers.
pub fn verify_scheme_axioms(s: &AssociationScheme) -> SchemeReport {
    let mut violations = Vec::new();
    let rows = s.check_rows();

    'diag: for &x in &rows {
        for y in 0..s.n {
            let c = s.relation(x, y);
            if (c == 0) != (x == y) {
                violations.push(Violation::Diagonal { x, y, class: c });
                break 'diag;
            }
        }
    }

    'tr: for &x in &rows {
        for y in 0..s.n {
            if s.relation(y, x) != s.transpose[s.relation(x, y)] {
                violations.push(Violation::Transpose { x, y });
                break 'tr;
            }
        }
    }

    let mut counts = vec![0usize; s.classes];
    'reg: for &x in &rows {
        counts.iter_mut().for_each(|v| *v = 0);
        for y in 0..s.n {
            counts[s.relation(x, y)] += 1;
        }
        for (class, (&count, &expected)) in counts.iter().zip(&s.valencies).enumerate() {
            if count != expected {
                violations.push(Violation::RowRegularity { row: x, class, count, expected });
                break 'reg;
            }
        }
    }

    let mut commutative = false;
    if violations.is_empty() {
        match intersection_numbers(s, RepPolicy::Default) {
            Ok(pn) => {
                if let Err(v) = pn.check_identities() {
                    violations.push(v);
                }
                commutative = pn.is_commutative();
            }
            Err(SchemeError::NotAScheme(v)) => violations.push(v),
            Err(_) => {}
        }
    }
    SchemeReport { passed: violations.is_empty(), commutative, violations }
}

/// Merges relation classes along `cells`. The fused classes are numbered by
/// their smallest member.
pub fn fuse(s: &AssociationScheme, cells: &[Vec<usize>]) -> Result<AssociationScheme, SchemeError> {
    let c = s.classes;
    let mut cell_of = vec![usize::MAX; c];
    let mut sorted: Vec<Vec<usize>> = cells
        .iter()
        .map(|cell| {
            let mut v = cell.clone();
            v.sort_unstable();
            v
        })
        .collect();
    sorted.sort_by_key(|cell| cell.first().copied().unwrap_or(usize::MAX));
    for (ci, cell) in sorted.iter().enumerate() {
        if cell.is_empty() {
            return Err(SchemeError::InvalidFusion(Violation::NotAPartition));
        }
        for &i in cell {
            if i >= c || cell_of[i] != usize::MAX {
                return Err(SchemeError::InvalidFusion(Violation::NotAPartition));
            }
            cell_of[i] = ci;
        }
    }
    if cell_of.contains(&usize::MAX) {
        return Err(SchemeError::InvalidFusion(Violation::NotAPartition));
    }
    if sorted[0] != [0] {
        return Err(SchemeError::InvalidFusion(Violation::IdentityCell));
    }
    for (ci, cell) in sorted.iter().enumerate() {
        let mut t: Vec<usize> = cell.iter().map(|&i| s.transpose[i]).collect();
        t.sort_unstable();
        if !sorted.contains(&t) {
            return Err(SchemeError::InvalidFusion(Violation::TransposeCell { cell: ci }));
        }
    }

    let classes = sorted.len();
    let fused = match &s.relation {
        Relation::Matrix(m) => {
            let mm: Vec<u8> = m.iter().map(|&x| cell_of[x as usize] as u8).collect();
            AssociationScheme::build(s.n, classes, Relation::Matrix(Arc::new(mm)))
        }
        Relation::Computed(f) => {
            let f = f.clone();
            let map = cell_of.clone();
            AssociationScheme::build(s.n, classes, Relation::Computed(Arc::new(move |x, y| map[f(x, y)])))
        }
    }
    .map_err(|e| match e {
        SchemeError::NotAScheme(v) => SchemeError::InvalidFusion(v),
        other => other,
    })?
    .with_provenance(Provenance::Fusion { base: Box::new(s.provenance.clone()), cells: sorted });

    let report = verify_scheme_axioms(&fused);
    if let Some(v) = report.violations.into_iter().next() {
        return Err(SchemeError::InvalidFusion(v));
    }
    Ok(fused)
}

/// Cyclic group scheme on `Z_n`: `relation(x, y) = (y − x) mod n`.
pub fn cyclic_scheme(n: usize) -> Result<AssociationScheme, SchemeError> {
    let m = (0..n * n).map(|e| ((e % n + n - e / n) % n) as u8).collect();
    AssociationScheme::from_matrix(n, m)
}

/// The complete-graph scheme `K_n` with classes {diagonal, off-diagonal}.
pub fn complete_scheme(n: usize) -> Result<AssociationScheme, SchemeError> {
    let m = (0..n * n).map(|e| u8::from(e / n != e % n)).collect();
    AssociationScheme::from_matrix(n, m)
}
