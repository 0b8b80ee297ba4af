//! Complex generalized Schur (QZ) decomposition.
//!
//! For square `A`, `B` this computes unitary `Q`, `Z` with `Q^H A Z = S` and
//! `Q^H B Z = T` both upper triangular. The generalized eigenvalues are the
//! ratios `S_jj / T_jj`. The transformations are returned so that other
//! matrices sharing the eigenvectors of the pencil can be brought to the same
//! triangular form.
//!
//! Reduction to Hessenberg-triangular form and the single-shift iteration use
//! Givens rotations throughout.

use faer::{c64, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, one, zero, CMat};

pub struct GeneralizedSchur {
    pub s: CMat,
    pub t: CMat,
    pub q: CMat,
    pub z: CMat,
}

impl GeneralizedSchur {
    pub fn alpha(&self) -> Vec<c64> {
        (0..self.s.nrows()).map(|i| self.s[(i, i)]).collect()
    }

    pub fn beta(&self) -> Vec<c64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: c64,
}

impl Rotation {
    /// Rotation with `[c s; -conj(s) c] [f; g] = [r; 0]`.
    fn zeroing(f: c64, g: c64) -> Rotation {
        if g == zero() {
            return Rotation { c: 1.0, s: zero() };
        }
        if f == zero() {
            return Rotation {
                c: 0.0,
                s: g.conj() / g.norm(),
            };
        }
        let fa = f.norm();
        let n = fa.hypot(g.norm());
        Rotation {
            c: fa / n,
            s: (f / fa) * g.conj() / n,
        }
    }

    /// Rows `i`, `k` of `x` over columns `cols`: `x <- G x`.
    fn rows(&self, x: &mut CMat, i: usize, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = x[(i, j)];
            let b = x[(k, j)];
            x[(i, j)] = a * self.c + self.s * b;
            x[(k, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `i`, `k` of `x` over rows `rows`: `x <- x G`.
    fn cols(&self, x: &mut CMat, i: usize, k: usize, rows: std::ops::Range<usize>) {
        for r in rows {
            let a = x[(r, i)];
            let b = x[(r, k)];
            x[(r, i)] = a * self.c - b * self.s.conj();
            x[(r, k)] = a * self.s + b * self.c;
        }
    }

    /// Columns `i`, `k` of `x` over all rows: `x <- x G^H`.
    fn cols_adjoint(&self, x: &mut CMat, i: usize, k: usize) {
        for r in 0..x.nrows() {
            let a = x[(r, i)];
            let b = x[(r, k)];
            x[(r, i)] = a * self.c + b * self.s.conj();
            x[(r, k)] = -a * self.s + b * self.c;
        }
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Generalized Schur decomposition of the pencil `(a, b)`.
pub fn qz(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<GeneralizedSchur> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pencil {}x{} / {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let mut s = a.to_owned();
    let mut t = b.to_owned();
    let mut q = CMat::identity(n, n);
    let mut z = CMat::identity(n, n);
    if n == 0 {
        return Ok(GeneralizedSchur { s, t, q, z });
    }

    // B = Q R
    for j in 0..n {
        for i in (j + 1..n).rev() {
            let g = Rotation::zeroing(t[(i - 1, j)], t[(i, j)]);
            g.rows(&mut t, i - 1, i, j..n);
            g.rows(&mut s, i - 1, i, 0..n);
            g.cols_adjoint(&mut q, i - 1, i);
            t[(i, j)] = zero();
        }
    }

    // Hessenberg-triangular
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            let g = Rotation::zeroing(s[(i - 1, j)], s[(i, j)]);
            g.rows(&mut s, i - 1, i, j..n);
            g.rows(&mut t, i - 1, i, i - 1..n);
            g.cols_adjoint(&mut q, i - 1, i);
            s[(i, j)] = zero();

            let h = Rotation::zeroing(t[(i, i)], t[(i, i - 1)]);
            h.cols(&mut t, i - 1, i, 0..i + 1);
            h.cols(&mut s, i - 1, i, 0..n);
            h.cols(&mut z, i - 1, i, 0..n);
            t[(i, i - 1)] = zero();
        }
    }

    let ulp = f64::EPSILON;
    let norm_a = frobenius(s.as_ref()).max(f64::MIN_POSITIVE);
    let norm_b = frobenius(t.as_ref()).max(f64::MIN_POSITIVE);
    let b_small = ulp * norm_b;

    let mut hi = n - 1;
    let mut iterations = 0usize;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // find the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = s[(lo, lo - 1)].norm();
            let diag = s[(lo - 1, lo - 1)].norm() + s[(lo, lo)].norm();
            if sub <= ulp * diag || sub <= ulp * norm_a {
                s[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        // zero on the diagonal of T: chase it to the bottom and deflate an
        // infinite eigenvalue
        if let Some(j) = (lo..=hi).find(|&j| t[(j, j)].norm() <= b_small) {
            t[(j, j)] = zero();
            for k in j..hi {
                let g = Rotation::zeroing(t[(k, k + 1)], t[(k + 1, k + 1)]);
                g.rows(&mut t, k, k + 1, k + 1..n);
                g.rows(&mut s, k, k + 1, k.saturating_sub(1)..n);
                g.cols_adjoint(&mut q, k, k + 1);
                t[(k + 1, k + 1)] = zero();
                if k > lo {
                    let h = Rotation::zeroing(s[(k + 1, k)], s[(k + 1, k - 1)]);
                    h.cols(&mut s, k - 1, k, 0..k + 2);
                    h.cols(&mut t, k - 1, k, 0..k + 1);
                    h.cols(&mut z, k - 1, k, 0..n);
                    s[(k + 1, k - 1)] = zero();
                }
            }
            let h = Rotation::zeroing(s[(hi, hi)], s[(hi, hi - 1)]);
            h.cols(&mut s, hi - 1, hi, 0..hi + 1);
            h.cols(&mut t, hi - 1, hi, 0..hi + 1);
            h.cols(&mut z, hi - 1, hi, 0..n);
            s[(hi, hi - 1)] = zero();
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        iterations += 1;
        since_deflation += 1;
        if iterations > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::Linalg("QZ iteration did not converge".into()));
        }

        let shift = if since_deflation.is_multiple_of(10) {
            // exceptional shift
            s[(hi, hi)] / t[(hi, hi)] + c64::new(s[(hi, hi - 1)].norm() / t[(hi - 1, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&s, &t, hi)
        };

        let g = Rotation::zeroing(s[(lo, lo)] - shift * t[(lo, lo)], s[(lo + 1, lo)]);
        g.rows(&mut s, lo, lo + 1, lo..n);
        g.rows(&mut t, lo, lo + 1, lo..n);
        g.cols_adjoint(&mut q, lo, lo + 1);
        for k in lo..hi {
            let h = Rotation::zeroing(t[(k + 1, k + 1)], t[(k + 1, k)]);
            h.cols(&mut t, k, k + 1, 0..k + 2);
            h.cols(&mut s, k, k + 1, 0..(k + 3).min(hi + 1).max(k + 2));
            h.cols(&mut z, k, k + 1, 0..n);
            t[(k + 1, k)] = zero();
            if k + 2 <= hi {
                let g = Rotation::zeroing(s[(k + 1, k)], s[(k + 2, k)]);
                g.rows(&mut s, k + 1, k + 2, k..n);
                g.rows(&mut t, k + 1, k + 2, k + 1..n);
                g.cols_adjoint(&mut q, k + 1, k + 2);
                s[(k + 2, k)] = zero();
            }
        }
    }

    Ok(GeneralizedSchur { s, t, q, z })
}

/// Eigenvalue of the trailing 2x2 pencil closest to the last diagonal ratio.
fn wilkinson_shift(s: &CMat, t: &CMat, hi: usize) -> c64 {
    let (i, j) = (hi - 1, hi);
    // M = S2 * inv(T2), T2 upper triangular
    let t00 = t[(i, i)];
    let t01 = t[(i, j)];
    let t11 = t[(j, j)];
    let inv00 = one() / t00;
    let inv11 = one() / t11;
    let inv01 = -t01 * inv00 * inv11;
    let (s00, s01, s10, s11) = (s[(i, i)], s[(i, j)], s[(j, i)], s[(j, j)]);
    let m00 = s00 * inv00;
    let m01 = s00 * inv01 + s01 * inv11;
    let m10 = s10 * inv00;
    let m11 = s10 * inv01 + s11 * inv11;
    let half_tr = (m00 + m11) * 0.5;
    let det = m00 * m11 - m01 * m10;
    let disc = (half_tr * half_tr - det).sqrt();
    let e1 = half_tr + disc;
    let e2 = half_tr - disc;
    let target = s11 / t11;
    if (e1 - target).norm() <= (e2 - target).norm() {
        e1
    } else {
        e2
    }
}
