//! Reference matrix functions that share no code with the library kernels.
//!
//! A Hermitian H = A + iB is embedded as the real symmetric matrix
//! M = [[A, −B], [B, A]]. For real f, f(M) = [[Re f(H), −Im f(H)],
//! [Im f(H), Re f(H)]], so f(H) can be read off the left block column of
//! f(M). M is diagonalized with cyclic Jacobi rotations.

#![allow(dead_code)]

use fwlab::dirac::CMatrix;
use num_complex::Complex64;

/// Real symmetric matrix in row-major storage.
struct Sym {
    n: usize,
    a: Vec<f64>,
}

impl Sym {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }
}

/// Eigenvalues and row-major eigenvector matrix (columns are vectors).
fn jacobi(mut m: Sym) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = m.a.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m.at(i, j).powi(2);
                }
            }
        }
        if off <= 1e-34 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.a[k * n + p];
                    let akq = m.a[k * n + q];
                    m.a[k * n + p] = c * akp - s * akq;
                    m.a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m.a[p * n + k];
                    let aqk = m.a[q * n + k];
                    m.a[p * n + k] = c * apk - s * aqk;
                    m.a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m.at(i, i)).collect();
    (values, v)
}

fn embed(h: &CMatrix) -> Sym {
    let n = h.nrows();
    let m2 = 2 * n;
    let mut a = vec![0.0; m2 * m2];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize on the way in; the oracle only sees the Hermitian part.
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i * m2 + j] = z.re;
            a[(i + n) * m2 + (j + n)] = z.re;
            a[i * m2 + (j + n)] = -z.im;
            a[(i + n) * m2 + j] = z.im;
        }
    }
    Sym { n: m2, a }
}

/// f(H) for Hermitian H.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = h.nrows();
    let (w, v) = jacobi(embed(h));
    let m2 = 2 * n;
    let fw: Vec<f64> = w.iter().map(|&x| f(x)).collect();
    // f(M)[r][c] = Σ_k V[r][k] f(w_k) V[c][k]; only the left block column is needed.
    CMatrix::from_fn(n, n, |i, j| {
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..m2 {
            let vjk = v[j * m2 + k] * fw[k];
            re += v[i * m2 + k] * vjk;
            im += v[(i + n) * m2 + k] * vjk;
        }
        Complex64::new(re, im)
    })
}

/// Sorted eigenvalues of Hermitian H (each appears twice in the embedding).
pub fn eigenvalues(h: &CMatrix) -> Vec<f64> {
    let (mut w, _) = jacobi(embed(h));
    w.sort_by(f64::total_cmp);
    w.into_iter().step_by(2).collect()
}

pub fn sqrt(h: &CMatrix) -> CMatrix {
    hermitian_function(h, |x| x.max(0.0).sqrt())
}

pub fn inv_sqrt(h: &CMatrix) -> CMatrix {
    hermitian_function(h, |x| 1.0 / x.sqrt())
}

pub fn sign(h: &CMatrix) -> CMatrix {
    hermitian_function(h, f64::signum)
}

/// Projector onto the positive spectral subspace of H.
pub fn positive_projector(h: &CMatrix) -> CMatrix {
    hermitian_function(h, |x| if x > 0.0 { 1.0 } else { 0.0 })
}

/// exp(A) by scaling and squaring a truncated Taylor series.
pub fn expm_taylor(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.map(|z| z * 2f64.powi(-squarings));
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    frob(&(a - b)) / frob(b).max(1e-300)
}
