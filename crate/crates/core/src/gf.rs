//! Exact arithmetic in GF(p^r) for q = p^r ≤ 256.
//!
//! Elements are encoded as base-p integers in `[0, q)`: the polynomial
//! `c0 + c1 x + ... + c_{r-1} x^{r-1}` has rep `c0 + c1 p + ... `. All
//! arithmetic goes through tables built once per field.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("unsupported field: {0}")]
    UnsupportedField(&'static str),
    #[error("modulus polynomial is reducible over GF(p)")]
    Reducible,
    #[error("element rep {rep} out of range for q = {q}")]
    OutOfRange { rep: u32, q: u32 },
}

/// Conway polynomials, coefficients low to high, for the built-in orders.
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (3, 1, &[1, 1]),
    (5, 1, &[3, 1]),
    (7, 1, &[4, 1]),
    (11, 1, &[9, 1]),
    (13, 1, &[11, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (5, 2, &[2, 4, 1]),
    (3, 3, &[1, 2, 0, 1]),
];

/// Orders that have a built-in modulus.
pub fn builtin_orders() -> Vec<u32> {
    let mut qs: Vec<u32> = BUILTIN_MODULI.iter().map(|(p, r, _)| p.pow(*r)).collect();
    qs.sort_unstable();
    qs
}

/// Splits `q` into `(p, r)` with `p` prime, or `None`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut r = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `(p, r, modulus)` describing a field. The modulus is monic of degree `r`,
/// coefficients listed from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u32, r: u32, modulus: Vec<u32>) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::UnsupportedField("characteristic is not prime"));
        }
        if !(1..=8).contains(&r) {
            return Err(GfError::UnsupportedField("degree must be in 1..=8"));
        }
        if p.checked_pow(r).is_none_or(|q| q > MAX_ORDER) {
            return Err(GfError::UnsupportedField("order exceeds 256"));
        }
        if modulus.len() != r as usize + 1 || modulus[r as usize] != 1 {
            return Err(GfError::UnsupportedField("modulus must be monic of degree r"));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(GfError::UnsupportedField("modulus coefficient out of range"));
        }
        if !poly::is_irreducible(&modulus, p) {
            return Err(GfError::Reducible);
        }
        Ok(FieldSpec { p, r, modulus })
    }

    /// Built-in Conway modulus for `q`.
    pub fn builtin(q: u32) -> Result<Self, GfError> {
        let (p, r, m) = BUILTIN_MODULI
            .iter()
            .find(|(p, r, _)| p.pow(*r) == q)
            .ok_or(GfError::UnsupportedField("no built-in modulus for this order"))?;
        FieldSpec::new(*p, *r, m.to_vec())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.r)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Stable fingerprint used to tag elements of this field.
    pub fn id(&self) -> FieldId {
        // FNV-1a over (p, r, modulus).
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u32| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.p);
        eat(self.r);
        for &c in &self.modulus {
            eat(c);
        }
        FieldId(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldId(pub u64);

/// An element tagged with the field it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    rep: u8,
    field: FieldId,
}

impl FieldElement {
    pub fn rep(self) -> u8 {
        self.rep
    }

    pub fn field_id(self) -> FieldId {
        self.field
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
    /// Exponent taken from the second operand's rep.
    Pow,
}

/// A field with precomputed add/neg tables and log/antilog tables.
#[derive(Debug, Clone)]
pub struct GaloisField {
    spec: FieldSpec,
    id: FieldId,
    q: usize,
    add: Vec<u8>,
    neg: Vec<u8>,
    mul: Vec<u8>,
    log: Vec<u16>,
    exp: Vec<u8>,
    generator: u8,
}

impl GaloisField {
    pub fn new(spec: FieldSpec) -> Self {
        let p = spec.p as usize;
        let r = spec.r as usize;
        let q = spec.q() as usize;

        let digits = |mut v: usize| {
            let mut d = vec![0u32; r];
            for c in d.iter_mut() {
                *c = (v % p) as u32;
                v /= p;
            }
            d
        };

        let mut add = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        for a in 0..q {
            let da = digits(a);
            let mut n = 0usize;
            for i in (0..r).rev() {
                n = n * p + ((p as u32 - da[i]) % p as u32) as usize;
            }
            neg[a] = n as u8;
            for b in 0..q {
                let db = digits(b);
                let mut s = 0usize;
                for i in (0..r).rev() {
                    s = s * p + ((da[i] + db[i]) % p as u32) as usize;
                }
                add[a * q + b] = s as u8;
            }
        }

        let mulmod = |a: usize, b: usize| -> usize {
            let prod = poly::mul_mod(&digits(a), &digits(b), &spec.modulus, spec.p);
            prod.iter().rev().fold(0usize, |acc, &c| acc * p + c as usize)
        };

        // Smallest element of multiplicative order q - 1.
        let generator = if q == 2 {
            1
        } else {
            (2..q)
                .find(|&g| {
                    let mut x = g;
                    let mut order = 1;
                    while x != 1 {
                        x = mulmod(x, g);
                        order += 1;
                    }
                    order == q - 1
                })
                .expect("multiplicative group of a finite field is cyclic")
        };

        let mut exp = vec![0u8; 2 * (q - 1)];
        let mut log = vec![0u16; q];
        let mut x = 1usize;
        for i in 0..q - 1 {
            exp[i] = x as u8;
            exp[i + q - 1] = x as u8;
            log[x] = i as u16;
            x = mulmod(x, generator);
        }

        let mut mul = vec![0u8; q * q];
        for a in 1..q {
            for b in 1..q {
                mul[a * q + b] = exp[log[a] as usize + log[b] as usize];
            }
        }

        GaloisField { id: spec.id(), spec, q, add, neg, mul, log, exp, generator: generator as u8 }
    }

    /// Field of order `q` with its built-in modulus.
    pub fn with_order(q: u32) -> Result<Self, GfError> {
        Ok(GaloisField::new(FieldSpec::builtin(q)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn id(&self) -> FieldId {
        self.id
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    /// Rep of the primitive element used for the log tables.
    pub fn generator(&self) -> u8 {
        self.generator
    }

    pub fn element(&self, rep: u32) -> Result<FieldElement, GfError> {
        if rep as usize >= self.q {
            return Err(GfError::OutOfRange { rep, q: self.q as u32 });
        }
        Ok(FieldElement { rep: rep as u8, field: self.id })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { rep: 0, field: self.id }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { rep: 1, field: self.id }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |r| FieldElement { rep: r as u8, field: self.id })
    }

    fn check(&self, a: FieldElement) -> Result<u8, GfError> {
        if a.field == self.id {
            Ok(a.rep)
        } else {
            Err(GfError::SpecMismatch)
        }
    }

    fn wrap(&self, rep: u8) -> FieldElement {
        FieldElement { rep, field: self.id }
    }

    /// Checked dispatch over [`FieldOp`]. Unary ops ignore `b` apart from its
    /// field tag.
    pub fn apply(&self, op: FieldOp, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        let rep = match op {
            FieldOp::Add => self.add_rep(x, y),
            FieldOp::Sub => self.sub_rep(x, y),
            FieldOp::Mul => self.mul_rep(x, y),
            FieldOp::Div => self.mul_rep(x, self.inv_rep(y).ok_or(GfError::DivisionByZero)?),
            FieldOp::Inv => self.inv_rep(x).ok_or(GfError::DivisionByZero)?,
            FieldOp::Neg => self.neg_rep(x),
            FieldOp::Pow => self.pow_rep(x, y as u64),
        };
        Ok(self.wrap(rep))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.apply(FieldOp::Add, a, b)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.apply(FieldOp::Sub, a, b)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.apply(FieldOp::Mul, a, b)
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.apply(FieldOp::Div, a, b)
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        self.apply(FieldOp::Neg, a, a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        self.apply(FieldOp::Inv, a, a)
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement, GfError> {
        Ok(self.wrap(self.pow_rep(self.check(a)?, e)))
    }

    // Unchecked rep-level arithmetic, used by the hot loops in `zorn`.

    #[inline]
    pub fn add_rep(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub_rep(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + self.neg[b as usize] as usize]
    }

    #[inline]
    pub fn neg_rep(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul_rep(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn inv_rep(&self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize] as usize;
        Some(self.exp[(self.q - 1 - l) % (self.q - 1)])
    }

    pub fn pow_rep(&self, a: u8, e: u64) -> u8 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % (self.q as u64 - 1));
        self.exp[(l % (self.q as u64 - 1)) as usize]
    }
}

/// A vector in GF(q)^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vec3 {
    pub x: FieldElement,
    pub y: FieldElement,
    pub z: FieldElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vec3Op {
    Dot,
    Cross,
    Add,
    /// Scale the second operand by the first operand's x coordinate.
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vec3Value {
    Scalar(FieldElement),
    Vector(Vec3),
}

impl Vec3 {
    pub fn new(field: &GaloisField, x: u32, y: u32, z: u32) -> Result<Self, GfError> {
        Ok(Vec3 { x: field.element(x)?, y: field.element(y)?, z: field.element(z)? })
    }

    pub fn reps(&self) -> [u8; 3] {
        [self.x.rep, self.y.rep, self.z.rep]
    }

    fn checked_reps(&self, field: &GaloisField) -> Result<[u8; 3], GfError> {
        Ok([field.check(self.x)?, field.check(self.y)?, field.check(self.z)?])
    }

    fn from_reps(field: &GaloisField, r: [u8; 3]) -> Self {
        Vec3 { x: field.wrap(r[0]), y: field.wrap(r[1]), z: field.wrap(r[2]) }
    }

    pub fn dot(&self, field: &GaloisField, other: &Vec3) -> Result<FieldElement, GfError> {
        Ok(field.wrap(dot_rep(field, &self.checked_reps(field)?, &other.checked_reps(field)?)))
    }

    pub fn cross(&self, field: &GaloisField, other: &Vec3) -> Result<Vec3, GfError> {
        let c = cross_rep(field, &self.checked_reps(field)?, &other.checked_reps(field)?);
        Ok(Vec3::from_reps(field, c))
    }

    pub fn add(&self, field: &GaloisField, other: &Vec3) -> Result<Vec3, GfError> {
        let (a, b) = (self.checked_reps(field)?, other.checked_reps(field)?);
        Ok(Vec3::from_reps(field, [0, 1, 2].map(|i| field.add_rep(a[i], b[i]))))
    }

    pub fn scale(&self, field: &GaloisField, s: FieldElement) -> Result<Vec3, GfError> {
        let s = field.check(s)?;
        let a = self.checked_reps(field)?;
        Ok(Vec3::from_reps(field, a.map(|c| field.mul_rep(s, c))))
    }
}

/// Checked dispatch over [`Vec3Op`].
pub fn vec3_apply(field: &GaloisField, op: Vec3Op, a: &Vec3, b: &Vec3) -> Result<Vec3Value, GfError> {
    Ok(match op {
        Vec3Op::Dot => Vec3Value::Scalar(a.dot(field, b)?),
        Vec3Op::Cross => Vec3Value::Vector(a.cross(field, b)?),
        Vec3Op::Add => Vec3Value::Vector(a.add(field, b)?),
        Vec3Op::Scale => Vec3Value::Vector(b.scale(field, a.x)?),
    })
}

#[inline]
pub(crate) fn dot_rep(f: &GaloisField, a: &[u8; 3], b: &[u8; 3]) -> u8 {
    let s = f.add_rep(f.mul_rep(a[0], b[0]), f.mul_rep(a[1], b[1]));
    f.add_rep(s, f.mul_rep(a[2], b[2]))
}

#[inline]
pub(crate) fn cross_rep(f: &GaloisField, a: &[u8; 3], b: &[u8; 3]) -> [u8; 3] {
    [
        f.sub_rep(f.mul_rep(a[1], b[2]), f.mul_rep(a[2], b[1])),
        f.sub_rep(f.mul_rep(a[2], b[0]), f.mul_rep(a[0], b[2])),
        f.sub_rep(f.mul_rep(a[0], b[1]), f.mul_rep(a[1], b[0])),
    ]
}

/// Dense polynomials over GF(p), coefficients low to high.
pub mod poly {
    use alloc::vec;
    use alloc::vec::Vec;

    fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    fn inv_mod_p(a: u32, p: u32) -> u32 {
        (1..p).find(|x| (a * x) % p == 1).expect("nonzero residue mod prime")
    }

    /// Remainder of `a` modulo nonzero `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
            let shift = r.len() - 1 - dm;
            let c = (r[r.len() - 1] * lead_inv) % p;
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * mc % p) % p;
            }
            r = trim(r);
            if r.len() - 1 < dm {
                break;
            }
        }
        r
    }

    /// Product of `a` and `b` reduced by `m`, padded to `deg m` coefficients.
    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut prod = vec![0u32; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = rem(&prod, m, p);
        r.resize(m.len() - 1, 0);
        r
    }

    /// Trial division by every monic polynomial of degree 1..=deg/2.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for low in 0..count {
                let mut divisor = vec![0u32; d + 1];
                let mut v = low;
                for c in divisor.iter_mut().take(d) {
                    *c = v % p;
                    v /= p;
                }
                divisor[d] = 1;
                let r = rem(m, &divisor, p);
                if r.iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }
}
