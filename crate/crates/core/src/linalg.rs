//! Fixed-size complex linear algebra for 2×2, 2×4 and 4×4 matrices.
//!
//! Every matrix in this crate is tiny, so plain arrays with closed-form
//! formulas are both faster and more accurate than a general dense backend.

use num_complex::Complex64 as C64;

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];
/// 2×4 complex matrix, row-major.
pub type Mat24 = [[C64; 4]; 2];
/// 4×4 complex matrix, row-major.
pub type Mat4 = [[C64; 4]; 4];

/// Zero complex scalar.
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
/// Unit complex scalar.
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Shorthand constructor for a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real scalar as a complex number.
#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The zero 2×4 matrix.
pub fn zeros24() -> Mat24 {
    [[ZERO; 4]; 2]
}

/// The 2×2 identity.
pub fn eye2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// Determinant of a 2×2 matrix.
#[inline]
pub fn det2(m: &Mat2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Inverse of a 2×2 matrix, `None` when the determinant is exactly zero.
pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let d = det2(m);
    if d == ZERO {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

/// Product of two 2×2 matrices.
pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Conjugate transpose of a 2×2 matrix.
pub fn adj2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Entrywise sum of 2×2 matrices.
pub fn add2(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

/// Largest entry modulus of a 2×2 matrix.
pub fn max_abs2(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Product `G · M` of a 2×2 and a 2×4 matrix.
pub fn mul2_24(g: &Mat2, m: &Mat24) -> Mat24 {
    let mut out = zeros24();
    for i in 0..2 {
        for j in 0..4 {
            out[i][j] = g[i][0] * m[0][j] + g[i][1] * m[1][j];
        }
    }
    out
}

/// Product of a 2×4 matrix with a 4-vector.
pub fn mul24_v(m: &Mat24, v: &[C64; 4]) -> [C64; 2] {
    let mut out = [ZERO; 2];
    for i in 0..2 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
    }
    out
}

/// `M Q M*` for a 2×4 matrix `M` and a 4×4 matrix `Q`.
pub fn sandwich24(m: &Mat24, q: &Mat4) -> Mat2 {
    let mut mq = zeros24();
    for i in 0..2 {
        for j in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += m[i][k] * q[k][j];
            }
            mq[i][j] = acc;
        }
    }
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += mq[i][k] * m[j][k].conj();
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Product of two 4×4 matrices.
pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Frobenius norm of a 2×4 matrix.
pub fn frob24(m: &Mat24) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus of a 2×4 matrix.
pub fn max_abs24(m: &Mat24) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The 2×2 minor of a 2×4 matrix built from columns `i` and `j`.
#[inline]
pub fn minor24(m: &Mat24, i: usize, j: usize) -> C64 {
    m[0][i] * m[1][j] - m[0][j] * m[1][i]
}

/// Singular values `(σ_max, σ_min)` of a 2×4 matrix.
///
/// `σ_max σ_min = √det(M M*)` and `det(M M*)` is the sum of the squared
/// moduli of the six 2×2 minors (Cauchy–Binet), which keeps `σ_min`
/// accurate even when it is many orders below `σ_max`.
pub fn singular_values24(m: &Mat24) -> (f64, f64) {
    let f2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let mut d = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            d += minor24(m, i, j).norm_sqr();
        }
    }
    singular_from_invariants(f2, d)
}

/// Singular values `(σ_max, σ_min)` of a 2×2 matrix, computed stably.
pub fn singular_values2(m: &Mat2) -> (f64, f64) {
    let f2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    singular_from_invariants(f2, det2(m).norm_sqr())
}

fn singular_from_invariants(f2: f64, d: f64) -> (f64, f64) {
    if f2 <= 0.0 {
        return (0.0, 0.0);
    }
    let disc = (f2 * f2 - 4.0 * d).max(0.0).sqrt();
    let smax2 = 0.5 * (f2 + disc);
    let smax = smax2.sqrt();
    let smin = if smax > 0.0 { d.sqrt() / smax } else { 0.0 };
    (smax, smin)
}

/// Euclidean norm of a complex 2-vector.
#[inline]
pub fn norm2(v: &[C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Euclidean norm of a complex 4-vector.
#[inline]
pub fn norm4(v: &[C64; 4]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Golden-section minimisation on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = [[c(1.0, 2.0), c(0.5, -1.0)], [c(-3.0, 0.0), c(0.0, 1.0)]];
        let p = mul2(&m, &inv2(&m).unwrap());
        assert!((p[0][0] - ONE).norm() < 1e-14 && p[0][1].norm() < 1e-14);
        assert!((p[1][1] - ONE).norm() < 1e-14 && p[1][0].norm() < 1e-14);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let mut m = zeros24();
        m[0][0] = r(3.0);
        m[1][2] = r(1e-12);
        let (smax, smin) = singular_values24(&m);
        assert!((smax - 3.0).abs() < 1e-14);
        assert!((smin - 1e-12).abs() < 1e-26);
    }

    #[test]
    fn singular_values_2x2_rank_one() {
        let m = [[r(1.0), r(2.0)], [r(2.0), r(4.0)]];
        let (smax, smin) = singular_values2(&m);
        assert!((smax - 5.0).abs() < 1e-13);
        assert!(smin < 1e-15);
    }
}
