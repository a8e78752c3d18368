//! Dense complex eigensolver for small matrices: Householder reduction to
//! Hessenberg form, single-shift QR to complex Schur form, then eigenvectors
//! by back substitution.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EigenError {
    #[error("QR iteration did not converge")]
    NoConvergence,
}

/// Square row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(n: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n * n);
        CMatrix { n, data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues with unit-norm right eigenvectors (`vectors[k]` belongs to
/// `values[k]`).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Eigen {
    /// Largest `‖A v − λ v‖` over all pairs.
    pub fn max_residual(&self, a: &CMatrix) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&l, v)| {
                let av = a.mul_vec(v);
                libm::sqrt(av.iter().zip(v).map(|(x, y)| (x - l * y).norm_sqr()).sum())
            })
            .fold(0.0, f64::max)
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Reduces `a` in place to upper Hessenberg form, returning the unitary `q`
/// with `A = Q H Qᴴ`.
fn hessenberg(a: &mut CMatrix) -> CMatrix {
    let n = a.n;
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return q;
    }
    for k in 0..n - 2 {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let alpha = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if alpha == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        v[0] += phase * alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let scale = 2.0 / vv;
        // (I − 2vvᴴ/vᴴv) A
        for j in 0..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * a[(i, j)]).sum();
            for i in k + 1..n {
                a[(i, j)] -= v[i - k - 1] * s * scale;
            }
        }
        // A (I − 2vvᴴ/vᴴv), and the same on Q
        for m in [&mut *a, &mut q] {
            for i in 0..n {
                let s: Complex64 = (k + 1..n).map(|j| m[(i, j)] * v[j - k - 1]).sum();
                for j in k + 1..n {
                    m[(i, j)] -= s * v[j - k - 1].conj() * scale;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = zero();
        }
    }
    q
}

/// Unitary `G = [[c, s], [−s̄, c]]` with `G [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, zero());
    }
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let nu = libm::hypot(na, nb);
    (na / nu, (a / na) * b.conj() / nu)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition `A = Z T Zᴴ` with `T` upper triangular.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix), EigenError> {
    let n = a.n;
    let mut t = a.clone();
    let mut z = hessenberg(&mut t);
    if n < 2 {
        return Ok((t, z));
    }
    let norm = t.norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(4);

    while hi > 0 {
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let diag = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let thresh = if diag == 0.0 { eps * norm } else { eps * diag };
            if sub <= thresh {
                t[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(EigenError::NoConvergence);
        }

        let mu = if iter % 11 == 10 {
            // exceptional shift
            t[(hi, hi)] + Complex64::new(t[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        for i in lo..=hi {
            t[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
            t[(k + 1, k)] = zero();
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let x = t[(i, k)];
                let y = t[(i, k + 1)];
                t[(i, k)] = x * c + y * s.conj();
                t[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            t[(i, i)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = zero();
        }
    }
    Ok((t, z))
}

/// All eigenpairs of `a`.
pub fn eig(a: &CMatrix) -> Result<Eigen, EigenError> {
    let n = a.n;
    let (t, z) = schur(a)?;
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![zero(); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut den = t[(i, i)] - lambda;
            if den.norm() < small {
                den = Complex64::new(small, 0.0);
            }
            y[i] = -s / den;
        }
        let mut v = z.mul_vec(&y);
        let nv = libm::sqrt(v.iter().map(|c| c.norm_sqr()).sum());
        v.iter_mut().for_each(|c| *c /= nv);
        values.push(lambda);
        vectors.push(v);
    }
    Ok(Eigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_triangular() {
        let a = CMatrix::from_real(3, &[2.0, 1.0, 0.0, 0.0, 3.0, 4.0, 0.0, 0.0, -1.0]);
        let e = eig(&a).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|v| v.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12 && (vals[2] - 3.0).abs() < 1e-12);
        assert!(e.max_residual(&a) < 1e-12);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = CMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]);
        let e = eig(&a).unwrap();
        let mut ims: Vec<f64> = e.values.iter().map(|v| v.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);
        assert!(e.max_residual(&a) < 1e-12);
    }

    #[test]
    fn cyclic_shift() {
        // eigenvalues are the 5th roots of unity
        let n = 5;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            d[i * n + (i + 1) % n] = 1.0;
        }
        let a = CMatrix::from_real(n, &d);
        let e = eig(&a).unwrap();
        for v in &e.values {
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!((v.powu(5) - Complex64::new(1.0, 0.0)).norm() < 1e-11);
        }
        assert!(e.max_residual(&a) < 1e-12);
    }
}
