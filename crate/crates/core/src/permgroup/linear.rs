//! SL(2,q) and PSL(2,q) as permutation groups.

use alloc::vec;
use alloc::vec::Vec;

use super::{closure, PermError, Permutation, PermutationGroup, DEFAULT_ORDER_CAP};
use crate::gf::GaloisField;

/// `[[a, b], [c, d]]` stored row-major as field reps.
pub type Mat2 = [u8; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearAction {
    /// Points of the projective line; `0..q` are field reps, `q` is ∞.
    ProjectiveLine,
    /// The group acting on its own elements by right multiplication.
    RightRegular,
    /// Nonzero row vectors of GF(q)²; faithful for SL(2,q).
    Vectors,
}

fn mat_mul(f: &GaloisField, m: &Mat2, n: &Mat2) -> Mat2 {
    let e = |a: u8, b: u8, c: u8, d: u8| f.add_rep(f.mul_rep(a, b), f.mul_rep(c, d));
    [
        e(m[0], n[0], m[1], n[2]),
        e(m[0], n[1], m[1], n[3]),
        e(m[2], n[0], m[3], n[2]),
        e(m[2], n[1], m[3], n[3]),
    ]
}

fn det(f: &GaloisField, m: &Mat2) -> u8 {
    f.sub_rep(f.mul_rep(m[0], m[3]), f.mul_rep(m[1], m[2]))
}

/// Standard generators of SL(2,q): a transvection, the Weyl element and a
/// diagonal torus generator.
pub fn sl2_generators(f: &GaloisField) -> Vec<Mat2> {
    let g = f.generator();
    let gi = f.inv_rep(g).expect("generator is nonzero");
    vec![[1, 1, 0, 1], [0, 1, f.neg_rep(1), 0], [g, 0, 0, gi]]
}

/// All of SL(2,q) (or PSL(2,q) when `projective`), lexicographic with the
/// identity first. For PSL each coset `{M, −M}` keeps its smaller member.
pub fn enumerate_matrices(f: &GaloisField, projective: bool) -> Vec<Mat2> {
    let q = f.order();
    let mut out = vec![[1, 0, 0, 1]];
    for code in 0..q.pow(4) {
        let m: Mat2 = [code / (q * q * q), code / (q * q) % q, code / q % q, code % q].map(|c| c as u8);
        if m == [1, 0, 0, 1] || det(f, &m) != 1 {
            continue;
        }
        if projective && canonical(f, &m) != m {
            continue;
        }
        out.push(m);
    }
    out
}

fn canonical(f: &GaloisField, m: &Mat2) -> Mat2 {
    let neg = m.map(|c| f.neg_rep(c));
    if neg < *m {
        neg
    } else {
        *m
    }
}

fn projective_image(f: &GaloisField, point: usize, m: &Mat2) -> usize {
    let q = f.order();
    // (x, y) · M with x/y the point, ∞ = (1, 0)
    let (x, y) = if point == q { (1u8, 0u8) } else { (point as u8, 1u8) };
    let nx = f.add_rep(f.mul_rep(x, m[0]), f.mul_rep(y, m[2]));
    let ny = f.add_rep(f.mul_rep(x, m[1]), f.mul_rep(y, m[3]));
    match f.inv_rep(ny) {
        None => q,
        Some(inv) => f.mul_rep(nx, inv) as usize,
    }
}

fn vector_image(f: &GaloisField, point: usize, m: &Mat2) -> usize {
    let q = f.order();
    let v = point + 1;
    let (x, y) = ((v / q) as u8, (v % q) as u8);
    let nx = f.add_rep(f.mul_rep(x, m[0]), f.mul_rep(y, m[2]));
    let ny = f.add_rep(f.mul_rep(x, m[1]), f.mul_rep(y, m[3]));
    nx as usize * q + ny as usize - 1
}

fn regular_generators(f: &GaloisField, projective: bool) -> Result<Vec<Permutation>, PermError> {
    let q = f.order();
    let elements = enumerate_matrices(f, projective);
    let mut index = vec![u32::MAX; q.pow(4)];
    let code = |m: &Mat2| m.iter().fold(0usize, |acc, &c| acc * q + c as usize);
    for (i, m) in elements.iter().enumerate() {
        index[code(m)] = i as u32;
    }
    sl2_generators(f)
        .iter()
        .map(|s| {
            let images = elements
                .iter()
                .map(|m| {
                    let p = mat_mul(f, m, s);
                    let p = if projective { canonical(f, &p) } else { p };
                    index[code(&p)]
                })
                .collect();
            Permutation::new(images)
        })
        .collect()
}

fn generators(q: u32, action: LinearAction, projective: bool) -> Result<Vec<Permutation>, PermError> {
    let f = GaloisField::with_order(q)?;
    let n = f.order();
    match action {
        LinearAction::RightRegular => regular_generators(&f, projective),
        LinearAction::ProjectiveLine => sl2_generators(&f)
            .iter()
            .map(|m| Permutation::new((0..=n).map(|x| projective_image(&f, x, m) as u32).collect()))
            .collect(),
        LinearAction::Vectors => sl2_generators(&f)
            .iter()
            .map(|m| Permutation::new((0..n * n - 1).map(|x| vector_image(&f, x, m) as u32).collect()))
            .collect(),
    }
}

/// PSL(2,q), enumerated. `Vectors` is rejected for odd q, where −I acts
/// nontrivially on vectors.
pub fn psl2(q: u32, action: LinearAction) -> Result<PermutationGroup, PermError> {
    if action == LinearAction::Vectors && q % 2 == 1 {
        return Err(PermError::NotSubgroup);
    }
    closure(generators(q, action, true)?, DEFAULT_ORDER_CAP)
}

/// SL(2,q), enumerated. The projective line action is not faithful for odd
/// q and is rejected there.
pub fn sl2(q: u32, action: LinearAction) -> Result<PermutationGroup, PermError> {
    if action == LinearAction::ProjectiveLine && q % 2 == 1 {
        return Err(PermError::NotSubgroup);
    }
    closure(generators(q, action, false)?, DEFAULT_ORDER_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(psl2(4, LinearAction::RightRegular).unwrap().order().unwrap(), 60);
        assert_eq!(psl2(4, LinearAction::ProjectiveLine).unwrap().order().unwrap(), 60);
        assert_eq!(psl2(5, LinearAction::ProjectiveLine).unwrap().order().unwrap(), 60);
        assert_eq!(psl2(2, LinearAction::ProjectiveLine).unwrap().order().unwrap(), 6);
        assert_eq!(psl2(7, LinearAction::ProjectiveLine).unwrap().order().unwrap(), 168);
        assert_eq!(psl2(8, LinearAction::ProjectiveLine).unwrap().order().unwrap(), 504);
        assert_eq!(sl2(3, LinearAction::Vectors).unwrap().order().unwrap(), 24);
        assert_eq!(sl2(5, LinearAction::RightRegular).unwrap().order().unwrap(), 120);
    }

    #[test]
    fn enumeration_counts() {
        let f = GaloisField::with_order(5).unwrap();
        assert_eq!(enumerate_matrices(&f, false).len(), 120);
        assert_eq!(enumerate_matrices(&f, true).len(), 60);
        assert_eq!(enumerate_matrices(&f, true)[0], [1, 0, 0, 1]);
    }
}
