//! Zorn vector matrices over GF(q) and Paige's simple Moufang loop M*(q).
//!
//! A Zorn matrix `[a α; β b]` is stored as the 8-tuple
//! `(a, αx, αy, αz, βx, βy, βz, b)` of field reps. The product is
//!
//! ```text
//! [a α; β b][c γ; δ d] = [ac + α·δ,  aγ + dα − β×δ;  cβ + bδ + α×γ,  β·γ + bd]
//! ```
//!
//! and `det [a α; β b] = ab − α·β` is multiplicative. The det-1 matrices form
//! a Moufang loop M whose center is `{I}` in characteristic 2 and `{I, −I}`
//! otherwise; M*(q) = M/Z(M).

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::gf::{cross_rep, dot_rep, FieldElement, FieldId, GaloisField, GfError, Vec3};
use crate::loopcore::Loop;

/// Default bound on |M*(q)| for [`PaigeLoop::build`].
pub const DEFAULT_ELEMENT_CAP: usize = 50_000;

/// Loops up to this order keep a full multiplication table.
pub const TABLE_CACHE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZornError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("matrix is singular (det = 0)")]
    SingularMatrix,
    #[error("loop order {order} exceeds element cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("element index {index} out of range for loop of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
}

pub type Comps = [u8; 8];

pub const IDENTITY: Comps = [1, 0, 0, 0, 0, 0, 0, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZornMatrix {
    comps: Comps,
    field: FieldId,
}

impl ZornMatrix {
    pub fn new(field: &GaloisField, a: FieldElement, alpha: Vec3, beta: Vec3, b: FieldElement) -> Result<Self, ZornError> {
        let id = field.id();
        let all = [a, alpha.x, alpha.y, alpha.z, beta.x, beta.y, beta.z, b];
        if all.iter().any(|e| e.field_id() != id) {
            return Err(GfError::SpecMismatch.into());
        }
        Ok(ZornMatrix { comps: all.map(|e| e.rep()), field: id })
    }

    /// From the 8-tuple `(a, αx, αy, αz, βx, βy, βz, b)`.
    pub fn from_reps(field: &GaloisField, reps: [u32; 8]) -> Result<Self, ZornError> {
        let mut comps = [0u8; 8];
        for (c, &r) in comps.iter_mut().zip(reps.iter()) {
            *c = field.element(r)?.rep();
        }
        Ok(ZornMatrix { comps, field: field.id() })
    }

    pub fn identity(field: &GaloisField) -> Self {
        ZornMatrix { comps: IDENTITY, field: field.id() }
    }

    pub fn comps(&self) -> Comps {
        self.comps
    }

    pub fn field_id(&self) -> FieldId {
        self.field
    }

    fn checked(&self, field: &GaloisField) -> Result<&Comps, ZornError> {
        if self.field == field.id() {
            Ok(&self.comps)
        } else {
            Err(GfError::SpecMismatch.into())
        }
    }
}

#[inline]
fn split(m: &Comps) -> (u8, [u8; 3], [u8; 3], u8) {
    (m[0], [m[1], m[2], m[3]], [m[4], m[5], m[6]], m[7])
}

#[inline]
fn join(a: u8, alpha: [u8; 3], beta: [u8; 3], b: u8) -> Comps {
    [a, alpha[0], alpha[1], alpha[2], beta[0], beta[1], beta[2], b]
}

/// Zorn product on raw components.
#[inline]
pub fn mul_comps(f: &GaloisField, m: &Comps, n: &Comps) -> Comps {
    let (a, alpha, beta, b) = split(m);
    let (c, gamma, delta, d) = split(n);

    let top_left = f.add_rep(f.mul_rep(a, c), dot_rep(f, &alpha, &delta));
    let bottom_right = f.add_rep(dot_rep(f, &beta, &gamma), f.mul_rep(b, d));

    let bd = cross_rep(f, &beta, &delta);
    let ag = cross_rep(f, &alpha, &gamma);
    let mut top_right = [0u8; 3];
    let mut bottom_left = [0u8; 3];
    for i in 0..3 {
        let s = f.add_rep(f.mul_rep(a, gamma[i]), f.mul_rep(d, alpha[i]));
        top_right[i] = f.sub_rep(s, bd[i]);
        let t = f.add_rep(f.mul_rep(c, beta[i]), f.mul_rep(b, delta[i]));
        bottom_left[i] = f.add_rep(t, ag[i]);
    }
    join(top_left, top_right, bottom_left, bottom_right)
}

#[inline]
pub fn det_comps(f: &GaloisField, m: &Comps) -> u8 {
    let (a, alpha, beta, b) = split(m);
    f.sub_rep(f.mul_rep(a, b), dot_rep(f, &alpha, &beta))
}

/// `det(M)^{-1} [b, −α; −β, a]`.
pub fn inv_comps(f: &GaloisField, m: &Comps) -> Option<Comps> {
    let s = f.inv_rep(det_comps(f, m))?;
    let (a, alpha, beta, b) = split(m);
    let neg_scaled = |v: [u8; 3]| v.map(|c| f.neg_rep(f.mul_rep(s, c)));
    Some(join(f.mul_rep(s, b), neg_scaled(alpha), neg_scaled(beta), f.mul_rep(s, a)))
}

pub fn zorn_mul(field: &GaloisField, m: &ZornMatrix, n: &ZornMatrix) -> Result<ZornMatrix, ZornError> {
    let comps = mul_comps(field, m.checked(field)?, n.checked(field)?);
    Ok(ZornMatrix { comps, field: field.id() })
}

pub fn zorn_det(field: &GaloisField, m: &ZornMatrix) -> Result<FieldElement, ZornError> {
    Ok(field.element(det_comps(field, m.checked(field)?) as u32)?)
}

pub fn zorn_inv(field: &GaloisField, m: &ZornMatrix) -> Result<ZornMatrix, ZornError> {
    let comps = inv_comps(field, m.checked(field)?).ok_or(ZornError::SingularMatrix)?;
    Ok(ZornMatrix { comps, field: field.id() })
}

/// |M*(q)| = q³(q⁴−1)/gcd(q−1, 2).
pub fn paige_order(q: u64) -> u64 {
    let g = if (q - 1).is_multiple_of(2) { 2 } else { 1 };
    q.pow(3) * (q.pow(4) - 1) / g
}

/// Paige's loop M*(q) with elements indexed canonically: index 0 is the
/// identity, the rest follow in lexicographic order of their 8-tuples.
/// For odd q the coset `{M, −M}` is represented by its smaller member.
#[derive(Debug, Clone)]
pub struct PaigeLoop {
    field: GaloisField,
    elements: Vec<Comps>,
    /// Dense lookup from the base-q code of a canonical tuple to its index.
    index: Vec<u32>,
    inverse: Vec<u32>,
    table: Option<Vec<u16>>,
    odd: bool,
}

const NO_INDEX: u32 = u32::MAX;

/// Bound on `q⁸`, the size of the dense tuple lookup (q ≤ 8).
const MAX_INDEX_SPACE: usize = 1 << 24;

impl PaigeLoop {
    /// Builds M*(q) from the built-in field of order `q`.
    pub fn build(q: u32, cap: usize) -> Result<Self, ZornError> {
        Self::with_field(GaloisField::with_order(q)?, cap)
    }

    pub fn with_field(field: GaloisField, cap: usize) -> Result<Self, ZornError> {
        let q = field.order();
        let order = paige_order(q as u64) as usize;
        if order > cap {
            return Err(ZornError::CapExceeded { order, cap });
        }
        let odd = field.characteristic() != 2;
        let total = q.pow(8);
        if total > MAX_INDEX_SPACE {
            return Err(ZornError::CapExceeded { order: total, cap: MAX_INDEX_SPACE });
        }

        let mut elements = Vec::with_capacity(order);
        elements.push(IDENTITY);
        let mut comps = [0u8; 8];
        for _ in 0..total {
            if det_comps(&field, &comps) == 1 && comps != IDENTITY && canonical(&field, odd, &comps) == comps {
                elements.push(comps);
            }
            // odometer increment, last component fastest
            for c in comps.iter_mut().rev() {
                *c += 1;
                if (*c as usize) < q {
                    break;
                }
                *c = 0;
            }
        }
        debug_assert_eq!(elements.len(), order);

        let mut index = vec![NO_INDEX; total];
        for (i, e) in elements.iter().enumerate() {
            index[code(q, e)] = i as u32;
        }

        let mut lp = PaigeLoop { field, elements, index, inverse: Vec::new(), table: None, odd };
        lp.inverse = (0..order)
            .map(|i| {
                let inv = inv_comps(&lp.field, &lp.elements[i]).expect("det 1");
                lp.lookup(&inv) as u32
            })
            .collect();
        if order <= TABLE_CACHE_LIMIT {
            let mut table = vec![0u16; order * order];
            for i in 0..order {
                for j in 0..order {
                    table[i * order + j] = lp.mul_direct(i, j) as u16;
                }
            }
            lp.table = Some(table);
        }
        Ok(lp)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Comps] {
        &self.elements
    }

    pub fn is_table_backed(&self) -> bool {
        self.table.is_some()
    }

    pub fn representative(&self, i: usize) -> ZornMatrix {
        ZornMatrix { comps: self.elements[i], field: self.field.id() }
    }

    /// Index of the class of `m` modulo the center. `m` must have det 1.
    pub fn index_of(&self, m: &ZornMatrix) -> Result<usize, ZornError> {
        let c = m.checked(&self.field)?;
        if det_comps(&self.field, c) != 1 {
            return Err(ZornError::SingularMatrix);
        }
        Ok(self.lookup(c))
    }

    #[inline]
    fn lookup(&self, m: &Comps) -> usize {
        let c = canonical(&self.field, self.odd, m);
        let i = self.index[code(self.q(), &c)];
        debug_assert_ne!(i, NO_INDEX);
        i as usize
    }

    #[inline]
    fn mul_direct(&self, i: usize, j: usize) -> usize {
        self.lookup(&mul_comps(&self.field, &self.elements[i], &self.elements[j]))
    }

    /// Checked product in M*(q).
    pub fn paige_mul(&self, i: usize, j: usize) -> Result<usize, ZornError> {
        let order = self.order();
        for index in [i, j] {
            if index >= order {
                return Err(ZornError::IndexOutOfRange { index, order });
            }
        }
        Ok(self.mul(i, j))
    }

    #[inline]
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }
}

impl Loop for PaigeLoop {
    fn size(&self) -> usize {
        self.order()
    }

    #[inline]
    fn mul(&self, x: usize, y: usize) -> usize {
        match &self.table {
            Some(t) => t[x * self.order() + y] as usize,
            None => self.mul_direct(x, y),
        }
    }

    // M*(q) has the inverse property: u⁻¹(uv) = v = (vu)u⁻¹.
    #[inline]
    fn left_div(&self, u: usize, v: usize) -> usize {
        self.mul(self.inverse(u), v)
    }

    #[inline]
    fn right_div(&self, v: usize, u: usize) -> usize {
        self.mul(v, self.inverse(u))
    }
}

#[inline]
fn code(q: usize, m: &Comps) -> usize {
    m.iter().fold(0usize, |acc, &c| acc * q + c as usize)
}

#[inline]
fn canonical(f: &GaloisField, odd: bool, m: &Comps) -> Comps {
    if !odd {
        return *m;
    }
    let neg = m.map(|c| f.neg_rep(c));
    if neg < *m {
        neg
    } else {
        *m
    }
}
