//! Character tables of commutative association schemes.
//!
//! `P[i][j] = p_j(i)` is the eigenvalue of `A_j` on the `i`-th primitive
//! idempotent. Row 0 is always the valency row and column 0 is all ones.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eigen::{eig, CMatrix, EigenError};
use crate::permgroup::{
    conjugacy_classes, coset_action, double_cosets, orbitals, permutation_character, ConjugacyClasses, PermError,
    PermutationGroup, DEFAULT_RELATION_CAP,
};
use crate::scheme::{intersection_numbers, AssociationScheme, IntersectionNumbers, RepPolicy, SchemeError};

/// Largest supported class count `d + 1`.
pub const MAX_CLASSES: usize = 64;
/// Attempts at a random combination with a simple spectrum.
pub const MAX_RETRIES: usize = 20;
/// Eigenvalues closer than this count as colliding.
pub const COLLISION_GAP: f64 = 1e-6;
/// Eigenpair residual bound, relative to `‖M‖·‖v‖`.
pub const EIGEN_TOL: f64 = 1e-10;
/// Default entrywise tolerance for table comparison.
pub const COMPARE_TOL: f64 = 1e-8;
/// Tolerance for multiplicities being perfect squares.
pub const SQUARE_TOL: f64 = 1e-6;

/// Tolerance used when ordering rows and grouping equal valencies.
const ORDER_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ChartabError {
    #[error("intersection matrices do not commute")]
    NonCommutative,
    #[error("no combination with a simple spectrum after {0} attempts")]
    DegenerateCombination(usize),
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("{0} classes exceed the limit of {MAX_CLASSES}")]
    TooManyClasses(usize),
    #[error("row {row} gives a non-positive multiplicity")]
    NonPositiveMultiplicity { row: usize },
    #[error("table shape: {0}")]
    Shape(String),
    #[error("closed form needs an even field order, got q = {0}")]
    UnsupportedQ(u64),
    #[error("multiplicity {m} of row {row} is not a perfect square")]
    NotGroupScheme { row: usize, m: f64 },
    #[error("permutation character is not multiplicity-free")]
    NotMultiplicityFree,
    #[error("double-coset table disagrees with the orbital table (max deviation {max_diff:e})")]
    MismatchWithOrbitalTable { max_diff: f64 },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl From<EigenError> for ChartabError {
    fn from(e: EigenError) -> Self {
        ChartabError::EigensolverFailure(alloc::format!("{e}"))
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigenvalue matrix of a commutative scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub d: usize,
    pub n: u64,
    /// Row-major, `p[i][j] = p_j(i)`.
    pub p: Vec<Vec<Complex64>>,
    pub valencies: Vec<u64>,
    pub multiplicities: Vec<f64>,
}

impl CharacterTable {
    /// Builds a table from its entries, deriving the multiplicities.
    pub fn new(p: Vec<Vec<Complex64>>, valencies: Vec<u64>, n: u64) -> Result<Self, ChartabError> {
        let m = multiplicities(&p, &valencies, n)?;
        Ok(CharacterTable { d: p.len().saturating_sub(1), n, p, valencies, multiplicities: m })
    }

    pub fn class_count(&self) -> usize {
        self.d + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.p[i][j]
    }

    /// Moves column `j` to position `cols[j]` (e.g. the `cols` of a
    /// [`TableMatching`]), so the table follows another table's class order.
    pub fn permute_columns(&self, cols: &[usize]) -> CharacterTable {
        let size = self.class_count();
        let mut p = vec![vec![c(0.0); size]; self.p.len()];
        let mut valencies = vec![0; size];
        for (j, &to) in cols.iter().enumerate() {
            valencies[to] = self.valencies[j];
            for (i, row) in self.p.iter().enumerate() {
                p[i][to] = row[j];
            }
        }
        CharacterTable { d: self.d, n: self.n, p, valencies, multiplicities: self.multiplicities.clone() }
    }

    /// Largest `|Im p_j(i)|`.
    pub fn max_imag(&self) -> f64 {
        self.p.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Puts the valency row first and sorts the rest lexicographically by
    /// (real, imaginary) entries, carrying multiplicities along.
    pub fn canonicalize_rows(&mut self) {
        let k = &self.valencies;
        let head = (0..self.p.len())
            .min_by(|&a, &b| {
                let da = row_distance(&self.p[a], k);
                let db = row_distance(&self.p[b], k);
                da.partial_cmp(&db).unwrap_or(Ordering::Equal)
            })
            .unwrap_or(0);
        let mut order: Vec<usize> = (0..self.p.len()).filter(|&i| i != head).collect();
        order.sort_by(|&a, &b| lex_rows(&self.p[a], &self.p[b]));
        order.insert(0, head);
        self.p = order.iter().map(|&i| self.p[i].clone()).collect();
        if self.multiplicities.len() == order.len() {
            self.multiplicities = order.iter().map(|&i| self.multiplicities[i]).collect();
        }
    }
}

fn row_distance(row: &[Complex64], k: &[u64]) -> f64 {
    row.iter().zip(k).map(|(z, &kj)| (z - c(kj as f64)).norm()).sum()
}

fn lex_rows(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        for (u, v) in [(x.re, y.re), (x.im, y.im)] {
            if (u - v).abs() > ORDER_TOL {
                return u.partial_cmp(&v).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}

fn check_shape(p: &[Vec<Complex64>], k: &[u64]) -> Result<(), ChartabError> {
    let c_ = k.len();
    if p.len() != c_ || p.iter().any(|r| r.len() != c_) {
        return Err(ChartabError::Shape(alloc::format!("expected a {c_} × {c_} table")));
    }
    Ok(())
}

/// `m_i = n / Σ_l |p_l(i)|² / k_l`.
pub fn multiplicities(p: &[Vec<Complex64>], k: &[u64], n: u64) -> Result<Vec<f64>, ChartabError> {
    check_shape(p, k)?;
    if k.contains(&0) {
        return Err(ChartabError::Shape("zero valency".into()));
    }
    p.iter()
        .enumerate()
        .map(|(i, row)| {
            let s: f64 = row.iter().zip(k).map(|(z, &kl)| z.norm_sqr() / kl as f64).sum();
            let m = n as f64 / s;
            if s > 0.0 && m.is_finite() && m > 0.0 {
                Ok(m)
            } else {
                Err(ChartabError::NonPositiveMultiplicity { row: i })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    /// Max deviation in the row relation `Σ_l p_l(i) conj(p_l(j)) / k_l = (n / m_i) δ_ij`.
    pub row_residual: f64,
    /// Max deviation in the column relation `Σ_i m_i p_j(i) conj(p_l(i)) = n k_j δ_jl`.
    pub column_residual: f64,
    pub passed: bool,
}

impl OrthogonalityReport {
    pub fn max_residual(&self) -> f64 {
        self.row_residual.max(self.column_residual)
    }
}

/// Both orthogonality relations, evaluated on the normalized matrix
/// `U[i][l] = √(m_i/n) · p_l(i) / √k_l`; the relations say `U` is unitary,
/// so the residuals are scale-free.
pub fn verify_orthogonality(p: &[Vec<Complex64>], k: &[u64], m: &[f64], n: u64, tol: f64) -> OrthogonalityReport {
    let size = k.len();
    let bad = OrthogonalityReport { row_residual: f64::INFINITY, column_residual: f64::INFINITY, passed: false };
    if check_shape(p, k).is_err() || m.len() != size || k.contains(&0) || m.iter().any(|&x| !(x > 0.0)) {
        return bad;
    }
    let nf = n as f64;
    let u: Vec<Vec<Complex64>> = (0..size)
        .map(|i| (0..size).map(|l| p[i][l] * (libm::sqrt(m[i] / nf) / libm::sqrt(k[l] as f64))).collect())
        .collect();
    let mut row_residual: f64 = 0.0;
    let mut column_residual: f64 = 0.0;
    for a in 0..size {
        for b in 0..size {
            let delta = c(if a == b { 1.0 } else { 0.0 });
            let row: Complex64 = (0..size).map(|l| u[a][l] * u[b][l].conj()).sum();
            let col: Complex64 = (0..size).map(|i| u[i][a] * u[i][b].conj()).sum();
            row_residual = row_residual.max((row - delta).norm());
            column_residual = column_residual.max((col - delta).norm());
        }
    }
    let passed = row_residual <= tol && column_residual <= tol;
    OrthogonalityReport { row_residual, column_residual, passed }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    /// Max relative deviation in `Σ_h p_ij^h p_h(r) = p_i(r) p_j(r)`.
    pub eigen_residual: f64,
    /// Max relative deviation of row 0 from the valencies and of column 0
    /// from ones.
    pub shape_residual: f64,
    pub orthogonality: Option<OrthogonalityReport>,
    pub passed: bool,
    pub failure: Option<String>,
}

/// Full certification of a candidate table against intersection numbers:
/// shape, the eigenvalue relation for every `(i, j, r)`, and both
/// orthogonality relations with multiplicities derived from the table.
pub fn verify_candidate_table(p: &[Vec<Complex64>], b: &IntersectionNumbers, tol: f64) -> CandidateReport {
    let size = b.class_count();
    let k: Vec<u64> = b.valencies().iter().map(|&x| x as u64).collect();
    let n = b.point_count() as u64;
    let fail = |msg: String, eigen_residual, shape_residual| CandidateReport {
        eigen_residual,
        shape_residual,
        orthogonality: None,
        passed: false,
        failure: Some(msg),
    };
    if check_shape(p, &k).is_err() {
        return fail(alloc::format!("table is not {size} × {size}"), f64::INFINITY, f64::INFINITY);
    }
    let mut shape_residual: f64 = 0.0;
    for j in 0..size {
        let kj = k[j] as f64;
        shape_residual = shape_residual.max((p[0][j] - c(kj)).norm() / kj.max(1.0));
        shape_residual = shape_residual.max((p[j][0] - c(1.0)).norm());
    }
    let mut eigen_residual: f64 = 0.0;
    for r in 0..size {
        for i in 0..size {
            for j in 0..size {
                let mut lhs = c(0.0);
                let mut scale: f64 = 1.0;
                let mut abs_sum = 0.0;
                for h in 0..size {
                    let x = b.get(i, j, h) as f64;
                    if x != 0.0 {
                        lhs += p[r][h] * x;
                        abs_sum += x * p[r][h].norm();
                    }
                }
                let rhs = p[r][i] * p[r][j];
                scale = scale.max(abs_sum).max(rhs.norm());
                eigen_residual = eigen_residual.max((lhs - rhs).norm() / scale);
            }
        }
    }
    if shape_residual > tol {
        return fail(alloc::format!("shape residual {shape_residual:e}"), eigen_residual, shape_residual);
    }
    if eigen_residual > tol {
        return fail(alloc::format!("eigenvalue relation residual {eigen_residual:e}"), eigen_residual, shape_residual);
    }
    let m = match multiplicities(p, &k, n) {
        Ok(m) => m,
        Err(e) => return fail(alloc::format!("{e}"), eigen_residual, shape_residual),
    };
    let orth = verify_orthogonality(p, &k, &m, n, tol);
    CandidateReport {
        eigen_residual,
        shape_residual,
        orthogonality: Some(orth),
        passed: orth.passed,
        failure: (!orth.passed).then(|| alloc::format!("orthogonality residual {:e}", orth.max_residual())),
    }
}

/// Character table by simultaneous diagonalization of the intersection
/// matrices `B_j` (`(B_j)[h][l] = p_jl^h`) through one random combination
/// `M = Σ c_j B_j` with `c_j ∈ [1, 2]`.
pub fn compute_character_table(b: &IntersectionNumbers, seed: u64) -> Result<CharacterTable, ChartabError> {
    compute_character_table_with(b, seed, EIGEN_TOL)
}

/// As [`compute_character_table`] with an explicit eigenpair residual bound.
pub fn compute_character_table_with(
    b: &IntersectionNumbers,
    seed: u64,
    eigen_tol: f64,
) -> Result<CharacterTable, ChartabError> {
    let size = b.class_count();
    if size > MAX_CLASSES {
        return Err(ChartabError::TooManyClasses(size));
    }
    if !b.is_commutative() {
        return Err(ChartabError::NonCommutative);
    }
    let k: Vec<u64> = b.valencies().iter().map(|&x| x as u64).collect();
    let n = b.point_count() as u64;
    let bs: Vec<Vec<f64>> = (0..size).map(|j| b.b_matrix(j).iter().map(|&x| x as f64).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..MAX_RETRIES {
        let coeffs: Vec<f64> = (0..size).map(|_| rng.gen_range(1.0..=2.0)).collect();
        let mut mdata = vec![0.0; size * size];
        for (bj, &cj) in bs.iter().zip(&coeffs) {
            for (x, &y) in mdata.iter_mut().zip(bj) {
                *x += cj * y;
            }
        }
        let m = CMatrix::from_real(size, &mdata);
        let e = eig(&m)?;
        let collision = (0..size).any(|a| (a + 1..size).any(|bb| (e.values[a] - e.values[bb]).norm() < COLLISION_GAP));
        if collision {
            continue;
        }
        let mnorm = m.norm();
        if e.max_residual(&m) > eigen_tol * mnorm.max(1.0) {
            return Err(ChartabError::EigensolverFailure(alloc::format!(
                "eigenpair residual {:e} exceeds bound",
                e.max_residual(&m)
            )));
        }
        let mut rows = Vec::with_capacity(size);
        for v in &e.vectors {
            let v0 = v[0];
            if v0.norm() < 1e-12 {
                return Err(ChartabError::EigensolverFailure("eigenvector vanishes at coordinate 0".into()));
            }
            let v: Vec<Complex64> = v.iter().map(|z| z / v0).collect();
            let row: Vec<Complex64> = bs
                .iter()
                .map(|bj| (0..size).map(|h| v[h] * bj[h]).sum::<Complex64>())
                .collect();
            rows.push(row);
        }
        let mut table = CharacterTable::new(rows, k.clone(), n)?;
        table.canonicalize_rows();
        return Ok(table);
    }
    Err(ChartabError::DegenerateCombination(MAX_RETRIES))
}

/// Intersection numbers and character table of a scheme.
pub fn scheme_character_table(
    s: &AssociationScheme,
    seed: u64,
) -> Result<(IntersectionNumbers, CharacterTable), ChartabError> {
    scheme_character_table_with(s, seed, EIGEN_TOL)
}

pub fn scheme_character_table_with(
    s: &AssociationScheme,
    seed: u64,
    eigen_tol: f64,
) -> Result<(IntersectionNumbers, CharacterTable), ChartabError> {
    let b = intersection_numbers(s, RepPolicy::Default)?;
    let t = compute_character_table_with(&b, seed, eigen_tol)?;
    Ok((b, t))
}

/// Roots of unity and the derived blocks of the closed-form tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormParams {
    pub q: u64,
    pub sigma: Complex64,
    pub rho: Complex64,
    /// `a[k-1][l-1] = −q(σ^{kl} + σ^{−kl})`, `1 ≤ k, l ≤ q/2`.
    pub a: Vec<Vec<Complex64>>,
    /// `b[m-1][n-1] = q(ρ^{mn} + ρ^{−mn})`, `1 ≤ m, n ≤ (q−2)/2`.
    pub b: Vec<Vec<Complex64>>,
}

impl ClosedFormParams {
    pub fn new(q: u64) -> Result<Self, ChartabError> {
        if q < 2 || !q.is_power_of_two() {
            return Err(ChartabError::UnsupportedQ(q));
        }
        let qf = q as f64;
        let sigma = Complex64::from_polar(1.0, 2.0 * PI / (qf + 1.0));
        let rho = Complex64::from_polar(1.0, 2.0 * PI / (qf - 1.0));
        // σ^e + σ^{−e} = 2 cos(2πe/(q+1)), evaluated directly for accuracy
        let two_cos = |e: u64, modulus: u64| 2.0 * libm::cos(2.0 * PI * (e % modulus) as f64 / modulus as f64);
        let half = (q / 2) as usize;
        let a = (1..=half as u64)
            .map(|kk| (1..=half as u64).map(|l| c(-qf * two_cos(kk * l, q + 1))).collect())
            .collect();
        let bsz = ((q - 2) / 2) as usize;
        let b = (1..=bsz as u64)
            .map(|mm| (1..=bsz as u64).map(|nn| c(qf * two_cos(mm * nn, q - 1))).collect())
            .collect();
        Ok(ClosedFormParams { q, sigma, rho, a, b })
    }
}

/// Assembles the common block layout: valency row, second row, then the
/// `a`-block rows and `b`-block rows.
fn assemble(
    params: &ClosedFormParams,
    valency: [f64; 4],
    second: [f64; 4],
    a_col1: f64,
    b_col1: f64,
    block_scale: f64,
    n: u64,
) -> Result<CharacterTable, ChartabError> {
    let half = params.a.len();
    let bsz = params.b.len();
    let row = |first: [f64; 4]| -> Vec<Complex64> {
        let mut r = vec![c(first[0]), c(first[1])];
        r.extend(core::iter::repeat_n(c(first[2]), half));
        r.extend(core::iter::repeat_n(c(first[3]), bsz));
        r
    };
    let mut p = vec![row(valency), row(second)];
    for a_row in &params.a {
        let mut r = vec![c(1.0), c(a_col1)];
        r.extend(a_row.iter().map(|z| z * block_scale));
        r.extend(core::iter::repeat_n(c(0.0), bsz));
        p.push(r);
    }
    for b_row in &params.b {
        let mut r = vec![c(1.0), c(b_col1)];
        r.extend(core::iter::repeat_n(c(0.0), half));
        r.extend(b_row.iter().map(|z| z * block_scale));
        p.push(r);
    }
    let k: Vec<u64> = p[0].iter().map(|z| z.re as u64).collect();
    CharacterTable::new(p, k, n)
}

/// Closed-form table of the Paige loop scheme for `q = 2^r`.
pub fn closed_form_mstar(q: u64) -> Result<CharacterTable, ChartabError> {
    let params = ClosedFormParams::new(q)?;
    let qf = q as f64;
    let (q2, q3, q6) = (qf * qf, qf * qf * qf, qf * qf * qf * qf * qf * qf);
    let n = q * q * q * (q * q * q * q - 1);
    assemble(&params, [1.0, q6 - 1.0, q6 - q3, q6 + q3], [1.0, q2 - 1.0, -q3 + q2, q3 + q2], -q3 - 1.0, q3 - 1.0, q2, n)
}

/// Closed-form table of the group scheme of `PSL(2, q)` for `q = 2^r`.
pub fn closed_form_psl2(q: u64) -> Result<CharacterTable, ChartabError> {
    let params = ClosedFormParams::new(q)?;
    let qf = q as f64;
    let q2 = qf * qf;
    let n = q * (q * q - 1);
    assemble(&params, [1.0, q2 - 1.0, q2 - qf, q2 + qf], [1.0, 0.0, -qf + 1.0, qf + 1.0], -qf - 1.0, qf - 1.0, 1.0, n)
}

/// Ordinary character table obtained from a group scheme's table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCharacterTable {
    /// `t[i][j]` is the value of the `i`-th irreducible character on class `j`.
    pub t: Vec<Vec<Complex64>>,
    pub degrees: Vec<u64>,
    pub class_sizes: Vec<u64>,
}

impl GroupCharacterTable {
    pub fn group_order(&self) -> u64 {
        self.class_sizes.iter().sum()
    }

    /// Max deviations, relative to `|G|`, in the row relation
    /// `Σ_j k_j T[i][j] conj(T[i'][j]) = |G| δ` and the column relation
    /// `Σ_i T[i][j] conj(T[i][l]) = (|G| / k_j) δ`.
    pub fn orthogonality_residuals(&self) -> (f64, f64) {
        let g = self.group_order() as f64;
        let size = self.t.len();
        let mut row: f64 = 0.0;
        let mut col: f64 = 0.0;
        for a in 0..size {
            for b in 0..size {
                let r: Complex64 =
                    (0..size).map(|j| self.t[a][j] * self.t[b][j].conj() * self.class_sizes[j] as f64).sum();
                let expect = if a == b { g } else { 0.0 };
                row = row.max((r - c(expect)).norm() / g);
                let s: Complex64 = (0..size).map(|i| self.t[i][a] * self.t[i][b].conj()).sum();
                let expect = if a == b { g / self.class_sizes[a] as f64 } else { 0.0 };
                col = col.max((s - c(expect)).norm() * self.class_sizes[a].max(self.class_sizes[b]) as f64 / g);
            }
        }
        (row, col)
    }
}

/// `T = diag(f) · P · diag(1/k)` with `f_i = √m_i`.
pub fn transfer_to_group_table(table: &CharacterTable) -> Result<GroupCharacterTable, ChartabError> {
    let mut degrees = Vec::with_capacity(table.multiplicities.len());
    for (row, &m) in table.multiplicities.iter().enumerate() {
        let f = libm::round(libm::sqrt(m));
        if f < 1.0 || (m - f * f).abs() > SQUARE_TOL * m.max(1.0) {
            return Err(ChartabError::NotGroupScheme { row, m });
        }
        degrees.push(f as u64);
    }
    let t = table
        .p
        .iter()
        .zip(&degrees)
        .map(|(row, &f)| row.iter().zip(&table.valencies).map(|(z, &kj)| z * (f as f64 / kj as f64)).collect())
        .collect();
    Ok(GroupCharacterTable { t, degrees, class_sizes: table.valencies.clone() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GelfandReport {
    /// `⟨θ, ρ_i⟩` for every row of the group table.
    pub inner_products: Vec<Complex64>,
    /// Rows with inner product 1.
    pub constituents: Vec<usize>,
    pub multiplicity_free: bool,
}

/// Decomposes the permutation character on `H\G` against the rows of `t`,
/// whose columns follow `classes`.
pub fn gelfand_check(
    g: &PermutationGroup,
    h: &[usize],
    classes: &ConjugacyClasses,
    t: &GroupCharacterTable,
) -> Result<GelfandReport, ChartabError> {
    let order = g.order()? as f64;
    let theta = permutation_character(g, h)?;
    let reps = classes.representatives();
    if t.t.first().map_or(0, Vec::len) != reps.len() {
        return Err(ChartabError::Shape("group table does not match the class list".into()));
    }
    let inner_products: Vec<Complex64> = t
        .t
        .iter()
        .map(|row| {
            reps.iter().enumerate().map(|(j, &r)| row[j].conj() * (classes.classes[j].len() as f64 * theta[r] as f64)).sum::<Complex64>()
                / order
        })
        .collect();
    let mut multiplicity_free = true;
    let mut constituents = Vec::new();
    for (i, ip) in inner_products.iter().enumerate() {
        let r = libm::round(ip.re);
        if (ip - c(r)).norm() > SQUARE_TOL || !(0.0..=1.0).contains(&r) {
            multiplicity_free = false;
        } else if r == 1.0 {
            constituents.push(i);
        }
    }
    Ok(GelfandReport { inner_products, constituents, multiplicity_free })
}

/// Table of the coset scheme of a Gelfand pair from double cosets and the
/// group's characters: `p_j(i) = (1/|H|) Σ_k |H g_j H ∩ C_k| ρ_i(c_k)`,
/// where `ρ_i` runs over the constituents of the permutation character.
pub fn double_coset_table(
    g: &PermutationGroup,
    h: &[usize],
    classes: &ConjugacyClasses,
    t: &GroupCharacterTable,
) -> Result<CharacterTable, ChartabError> {
    let report = gelfand_check(g, h, classes, t)?;
    if !report.multiplicity_free {
        return Err(ChartabError::NotMultiplicityFree);
    }
    let dc = double_cosets(g, h)?;
    let hsize = dc.subgroup.len();
    if report.constituents.len() != dc.parts.len() {
        return Err(ChartabError::NotMultiplicityFree);
    }
    let nclass = classes.len();
    // |D_j ∩ C_k|
    let counts: Vec<Vec<usize>> = dc
        .parts
        .iter()
        .map(|part| {
            let mut row = vec![0; nclass];
            for &x in part {
                row[classes.class_of[x] as usize] += 1;
            }
            row
        })
        .collect();
    let p = report
        .constituents
        .iter()
        .map(|&i| {
            counts
                .iter()
                .map(|row| row.iter().enumerate().map(|(kk, &cnt)| t.t[i][kk] * cnt as f64).sum::<Complex64>() / hsize as f64)
                .collect()
        })
        .collect();
    let valencies = dc.parts.iter().map(|part| (part.len() / hsize) as u64).collect();
    let n = (g.order()? / hsize) as u64;
    let mut table = CharacterTable::new(p, valencies, n)?;
    table.canonicalize_rows();
    Ok(table)
}

/// Group table of `g` with the class list its columns follow.
pub fn group_character_table(
    g: &PermutationGroup,
    seed: u64,
) -> Result<(ConjugacyClasses, CharacterTable, GroupCharacterTable), ChartabError> {
    let classes = conjugacy_classes(g)?;
    let s = crate::permgroup::group_scheme_with_classes(g, &classes, DEFAULT_RELATION_CAP)?;
    let (_, table) = scheme_character_table(&s, seed)?;
    let t = transfer_to_group_table(&table)?;
    Ok((classes, table, t))
}

/// [`double_coset_table`] cross-checked against the orbital table of the
/// coset action; disagreement is an error, never silently resolved.
pub fn double_coset_table_checked(
    g: &PermutationGroup,
    h: &[usize],
    seed: u64,
    tol: f64,
) -> Result<(CharacterTable, CharacterTable, TableMatching), ChartabError> {
    let (classes, _, t) = group_character_table(g, seed)?;
    let dct = double_coset_table(g, h, &classes, &t)?;
    let action = coset_action(g, h)?;
    let s = orbitals(&action, action.degree(), DEFAULT_RELATION_CAP)?;
    let (_, orbital) = scheme_character_table(&s, seed)?;
    match compare_tables(&dct, &orbital, tol) {
        Ok(m) => Ok((dct, orbital, m)),
        Err(mismatch) => Err(ChartabError::MismatchWithOrbitalTable { max_diff: mismatch.max_diff }),
    }
}

/// Row and column permutations taking the first table onto the second:
/// `p2[rows[i]][cols[j]] ≈ p1[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMatching {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub max_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableMismatch {
    pub reason: String,
    /// Smallest entrywise deviation reached by any alignment tried (∞ when
    /// shapes differ).
    pub max_diff: f64,
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Searches for row and column permutations making two tables entrywise
/// equal within `tol`. Columns may only move within equal valencies and
/// rows within equal multiplicities; column 0 and row 0 stay in place.
pub fn compare_tables(t1: &CharacterTable, t2: &CharacterTable, tol: f64) -> Result<TableMatching, TableMismatch> {
    let size = t1.class_count();
    if size != t2.class_count() || t1.p.len() != t2.p.len() || t1.n != t2.n {
        return Err(TableMismatch { reason: "dimensions differ".into(), max_diff: f64::INFINITY });
    }
    let mut k1 = t1.valencies.clone();
    let mut k2 = t2.valencies.clone();
    k1.sort_unstable();
    k2.sort_unstable();
    if k1 != k2 {
        return Err(TableMismatch { reason: "valency multisets differ".into(), max_diff: f64::INFINITY });
    }
    let mult_ok = |i: usize, r: usize| {
        let (a, b) = (t1.multiplicities[i], t2.multiplicities[r]);
        (a - b).abs() <= ORDER_TOL * a.abs().max(1.0)
    };
    let mut search = Search {
        t1,
        t2,
        tol,
        mult_ok: &mult_ok,
        cols: vec![usize::MAX; size],
        used: vec![false; size],
        best: f64::INFINITY,
    };
    if let Some(rows) = search.assign_col(0) {
        let cols = search.cols.clone();
        let max_diff = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .map(|(i, j)| (t1.p[i][j] - t2.p[rows[i]][cols[j]]).norm())
            .fold(0.0, f64::max);
        return Ok(TableMatching { rows, cols, max_diff });
    }
    let best = search.best;
    Err(TableMismatch { reason: "no row/column matching within tolerance".into(), max_diff: best })
}

struct Search<'a, F: Fn(usize, usize) -> bool> {
    t1: &'a CharacterTable,
    t2: &'a CharacterTable,
    tol: f64,
    mult_ok: &'a F,
    cols: Vec<usize>,
    used: Vec<bool>,
    best: f64,
}

impl<F: Fn(usize, usize) -> bool> Search<'_, F> {
    /// Row `i` of `t1` is compatible with row `r` of `t2` on the columns
    /// assigned so far.
    fn rows_compatible(&self, i: usize, r: usize, upto: usize) -> bool {
        (self.mult_ok)(i, r) && (0..upto).all(|j| close(self.t1.p[i][j], self.t2.p[r][self.cols[j]], self.tol))
    }

    fn deviation(&self, upto: usize) -> f64 {
        // best alignment per row, used only for mismatch reports
        (0..self.t1.p.len())
            .map(|i| {
                (0..self.t2.p.len())
                    .map(|r| (0..upto).map(|j| (self.t1.p[i][j] - self.t2.p[r][self.cols[j]]).norm()).fold(0.0, f64::max))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    fn assign_col(&mut self, j: usize) -> Option<Vec<usize>> {
        let size = self.t1.class_count();
        if j == size {
            return self.match_rows();
        }
        for cand in 0..size {
            if self.used[cand] || self.t1.valencies[j] != self.t2.valencies[cand] || (j == 0) != (cand == 0) {
                continue;
            }
            self.cols[j] = cand;
            self.used[cand] = true;
            let feasible = (0..size).all(|i| (0..size).any(|r| self.rows_compatible(i, r, j + 1)));
            if feasible {
                if let Some(rows) = self.assign_col(j + 1) {
                    return Some(rows);
                }
            } else {
                self.best = self.best.min(self.deviation(j + 1));
            }
            self.used[cand] = false;
            self.cols[j] = usize::MAX;
        }
        None
    }

    /// Bipartite matching of rows by augmenting paths.
    fn match_rows(&mut self) -> Option<Vec<usize>> {
        let size = self.t1.class_count();
        let adj: Vec<Vec<usize>> =
            (0..size).map(|i| (0..size).filter(|&r| (i == 0) == (r == 0) && self.rows_compatible(i, r, size)).collect()).collect();
        let mut owner = vec![usize::MAX; size];
        fn augment(i: usize, adj: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
            for &r in &adj[i] {
                if !seen[r] {
                    seen[r] = true;
                    if owner[r] == usize::MAX || augment(owner[r], adj, owner, seen) {
                        owner[r] = i;
                        return true;
                    }
                }
            }
            false
        }
        for i in 0..size {
            let mut seen = vec![false; size];
            if !augment(i, &adj, &mut owner, &mut seen) {
                self.best = self.best.min(self.deviation(size));
                return None;
            }
        }
        let mut rows = vec![0; size];
        for (r, &i) in owner.iter().enumerate() {
            rows[i] = r;
        }
        self.best = 0.0;
        Some(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::{cyclic_group, symmetric_group};
    use crate::scheme::{complete_scheme, cyclic_scheme};

    fn real_rows(t: &CharacterTable) -> Vec<Vec<f64>> {
        t.p.iter().map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    fn table_of(s: &AssociationScheme) -> CharacterTable {
        scheme_character_table(s, 0xA55C).unwrap().1
    }

    #[test]
    fn complete_graph() {
        let t = table_of(&complete_scheme(7).unwrap());
        let r = real_rows(&t);
        assert!((r[0][1] - 6.0).abs() < 1e-10 && (r[1][1] + 1.0).abs() < 1e-10);
        assert!((t.multiplicities[1] - 6.0).abs() < 1e-10);
    }

    #[test]
    fn one_point_scheme() {
        let t = CharacterTable::new(vec![vec![c(1.0)]], vec![1], 1).unwrap();
        assert_eq!(t.multiplicities, vec![1.0]);
        let g = transfer_to_group_table(&t).unwrap();
        assert_eq!(g.t, vec![vec![c(1.0)]]);
    }

    #[test]
    fn mstar2_oracle_values() {
        let t = closed_form_mstar(2).unwrap();
        let expect = [[1.0, 63.0, 56.0], [1.0, 3.0, -4.0], [1.0, -9.0, 8.0]];
        for (row, e) in t.p.iter().zip(expect) {
            for (z, x) in row.iter().zip(e) {
                assert!((z - c(x)).norm() < 1e-12);
            }
        }
        // 120 / (10/7) and 120 / (24/7)
        for (m, e) in t.multiplicities.iter().zip([1.0, 84.0, 35.0]) {
            assert!((m - e).abs() < 1e-9);
        }
        let o = verify_orthogonality(&t.p, &t.valencies, &t.multiplicities, t.n, 1e-12);
        assert!(o.passed, "{o:?}");
    }

    #[test]
    fn oracles_reject_odd_q() {
        assert!(matches!(closed_form_mstar(3), Err(ChartabError::UnsupportedQ(3))));
        assert!(matches!(closed_form_psl2(5), Err(ChartabError::UnsupportedQ(5))));
    }

    #[test]
    fn psl2_oracle_small() {
        let t = closed_form_psl2(2).unwrap();
        let expect = [[1.0, 3.0, 2.0], [1.0, 0.0, -1.0], [1.0, -3.0, 2.0]];
        for (row, e) in real_rows(&t).iter().zip(expect) {
            for (x, y) in row.iter().zip(e) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let t4 = closed_form_psl2(4).unwrap();
        assert_eq!(t4.valencies, vec![1, 15, 12, 12, 20]);
        let mut f = transfer_to_group_table(&t4).unwrap().degrees;
        f.sort_unstable();
        assert_eq!(f, vec![1, 3, 3, 4, 5]);
    }

    #[test]
    fn perturbation_breaks_orthogonality() {
        let mut t = closed_form_mstar(2).unwrap();
        t.p[1][1] += c(0.01);
        assert!(!verify_orthogonality(&t.p, &t.valencies, &t.multiplicities, t.n, 1e-8).passed);
    }

    #[test]
    fn swapped_rows_fail() {
        let mut t = closed_form_mstar(2).unwrap();
        t.p.swap(1, 2);
        assert!(!verify_orthogonality(&t.p, &t.valencies, &t.multiplicities, t.n, 1e-8).passed);
    }

    #[test]
    fn s3_pipeline_and_transfer() {
        let g = symmetric_group(3).unwrap();
        let (_, table, t) = group_character_table(&g, 1).unwrap();
        assert_eq!(table.valencies, vec![1, 2, 3]);
        let mut f = t.degrees.clone();
        f.sort_unstable();
        assert_eq!(f, vec![1, 1, 2]);
        let (r, col) = t.orthogonality_residuals();
        assert!(r < 1e-10 && col < 1e-10);
        let oracle = closed_form_psl2(2).unwrap();
        assert!(compare_tables(&table, &oracle, 1e-8).is_ok());
    }

    #[test]
    fn cyclic_has_roots_of_unity() {
        let t = table_of(&cyclic_scheme(5).unwrap());
        for row in &t.p {
            for z in row {
                assert!((z.norm() - 1.0).abs() < 1e-10);
            }
        }
        assert!(t.multiplicities.iter().all(|m| (m - 1.0).abs() < 1e-9));
    }

    #[test]
    fn gelfand_examples() {
        let g = symmetric_group(3).unwrap();
        let (classes, _, t) = group_character_table(&g, 3).unwrap();
        let transposition = (0..6).find(|&i| g.element(i).fixed_points() == 1).unwrap();
        let h = vec![0, transposition];
        let r = gelfand_check(&g, &h, &classes, &t).unwrap();
        assert!(r.multiplicity_free);
        assert_eq!(r.constituents.len(), 2);
        let r = gelfand_check(&g, &[0], &classes, &t).unwrap();
        assert!(!r.multiplicity_free);
    }

    #[test]
    fn double_coset_s3() {
        let g = symmetric_group(3).unwrap();
        let transposition = (0..6).find(|&i| g.element(i).fixed_points() == 1).unwrap();
        let (table, _, _) = double_coset_table_checked(&g, &[0, transposition], 5, 1e-8).unwrap();
        assert_eq!(table.valencies, vec![1, 2]);
        assert!((table.p[1][1] + c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn double_coset_whole_group_and_regular() {
        let g = symmetric_group(3).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let (t, _, _) = double_coset_table_checked(&g, &all, 5, 1e-8).unwrap();
        assert_eq!(t.p, vec![vec![c(1.0)]]);

        let z3 = cyclic_group(3).unwrap();
        let (t, _, _) = double_coset_table_checked(&z3, &[0], 5, 1e-8).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        // rows are {ω^{ij}} up to ordering
        for row in &t.p[1..] {
            let s = row[1];
            assert!((s - w).norm() < 1e-10 || (s - w.conj()).norm() < 1e-10);
            assert!((row[2] - s.conj()).norm() < 1e-10 || (row[2] - s).norm() < 1e-10);
        }
    }

    #[test]
    fn compare_detects_mismatch() {
        let a = closed_form_mstar(2).unwrap();
        let b = closed_form_psl2(2).unwrap();
        assert!(compare_tables(&a, &b, 1e-8).is_err());
        let m = compare_tables(&a, &a, 1e-8).unwrap();
        assert_eq!(m.rows, vec![0, 1, 2]);
        assert_eq!(m.cols, vec![0, 1, 2]);
    }
}
