//! Dense complex helpers on top of faer.

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

pub fn zero() -> c64 {
    c64::new(0.0, 0.0)
}

pub fn one() -> c64 {
    c64::new(1.0, 0.0)
}

/// Singular values in non-increasing order.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| Error::Linalg(format!("singular values: {e:?}")))
}

/// Number of singular values strictly above `threshold`.
pub fn rank_above(sigma: &[f64], threshold: f64) -> usize {
    sigma.iter().filter(|&&s| s > threshold).count()
}

/// Fails when a singular value sits within a factor ten of `threshold`.
pub fn check_unambiguous(sigma: &[f64], threshold: f64) -> Result<()> {
    for (i, &s) in sigma.iter().enumerate() {
        if s >= threshold / 10.0 && s <= threshold * 10.0 {
            let above = sigma[..i].iter().rev().copied().find(|&v| v > threshold * 10.0);
            let below = sigma[i + 1..].iter().copied().find(|&v| v < threshold / 10.0);
            return Err(Error::RankAmbiguous {
                sigma: s,
                threshold,
                above: above.unwrap_or(f64::INFINITY),
                below: below.unwrap_or(0.0),
            });
        }
    }
    Ok(())
}

/// Result of a numerical null-space computation.
pub struct NullSpace {
    /// Orthonormal basis, one column per null vector.
    pub basis: CMat,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

/// Orthonormal basis of the numerical right null space of `a`.
///
/// Singular values at or below `tol * sigma_max` are treated as zero.
pub fn null_space(a: MatRef<'_, c64>, tol: f64, strict: bool) -> Result<NullSpace> {
    let (p, q) = (a.nrows(), a.ncols());
    if p == 0 || q == 0 {
        return Ok(NullSpace {
            basis: CMat::identity(q, q),
            singular_values: Vec::new(),
            threshold: 0.0,
        });
    }
    // tall inputs go through their triangular factor, which has the same
    // singular values and right singular vectors but keeps the SVD workspace at q x q
    let svd = if p > q {
        let r = a.qr().thin_R().to_owned();
        r.svd()
    } else {
        a.svd()
    }
    .map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|s| s.re).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(NullSpace {
            basis: CMat::identity(q, q),
            singular_values: sigma,
            threshold: 0.0,
        });
    }
    let threshold = tol * smax;
    if strict {
        check_unambiguous(&sigma, threshold)?;
    }
    let rank = rank_above(&sigma, threshold);
    let v = svd.V();
    let basis = v.subcols(rank, q - rank).to_owned();
    Ok(NullSpace {
        basis,
        singular_values: sigma,
        threshold,
    })
}

/// Left singular vectors belonging to the `count` largest singular values.
pub fn leading_left_singular_vectors(a: MatRef<'_, c64>, count: usize) -> Result<CMat> {
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
    Ok(svd.U().subcols(0, count).to_owned())
}

/// Largest principal angle (radians) between the column spans of `a` and `b`.
///
/// Both spans are orthonormalized first; spans of different dimension give
/// `pi / 2`.
pub fn max_principal_angle(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<f64> {
    let qa = orthonormal_columns(a)?;
    let qb = orthonormal_columns(b)?;
    if qa.ncols() != qb.ncols() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if qa.ncols() == 0 {
        return Ok(0.0);
    }
    // sine of the largest angle from the part of b outside span(a); this stays
    // accurate for tiny angles where the cosine route does not
    let residual = &qb - &qa * (qa.adjoint() * &qb);
    let sigma = singular_values(residual.as_ref())?;
    let largest = sigma.first().copied().unwrap_or(0.0).min(1.0);
    Ok(largest.asin())
}

/// Orthonormal basis of the column span (rank decided at `1e-10` relative).
pub fn orthonormal_columns(a: MatRef<'_, c64>) -> Result<CMat> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(CMat::zeros(a.nrows(), 0));
    }
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|s| s.re).collect();
    let rank = rank_above(&sigma, 1e-10 * sigma[0]);
    Ok(svd.U().subcols(0, rank).to_owned())
}

pub fn frobenius(a: MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Copy of the rows `rows` of `a`, in the given order.
pub fn select_rows(a: MatRef<'_, c64>, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), a.ncols(), |i, j| a[(rows[i], j)])
}

/// Copy of the columns `cols` of `a`, in the given order.
pub fn select_cols(a: MatRef<'_, c64>, cols: &[usize]) -> CMat {
    CMat::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

/// Householder QR driven one column at a time, in any column order.
///
/// Eliminated columns get a pivot row; all other columns, including the ones
/// never eliminated, receive every reflector, so after a sequence of
/// eliminations rows `rank..` of a column hold its component orthogonal to the
/// span of the eliminated columns.
pub struct ColumnReducer {
    w: CMat,
    done: Vec<bool>,
    pivot_row: Vec<Option<usize>>,
    rank: usize,
    v: Vec<c64>,
}

impl ColumnReducer {
    pub fn new(a: CMat) -> Self {
        let (p, q) = (a.nrows(), a.ncols());
        ColumnReducer {
            w: a,
            done: vec![false; q],
            pivot_row: vec![None; q],
            rank: 0,
            v: vec![zero(); p],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn reduced(&self) -> &CMat {
        &self.w
    }

    pub fn pivot_row(&self, j: usize) -> Option<usize> {
        self.pivot_row[j]
    }

    /// Norm of column `j` below the rows already used as pivots.
    pub fn residual_norm(&self, j: usize) -> f64 {
        let col = self.w.col_as_slice(j);
        col[self.rank.min(col.len())..]
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Residual rows of the columns `cols`.
    pub fn residual_block(&self, cols: &[usize]) -> CMat {
        let p = self.w.nrows();
        let r = self.rank.min(p);
        CMat::from_fn(p - r, cols.len(), |i, j| self.w[(r + i, cols[j])])
    }

    /// Eliminates column `j` below its new pivot row; returns `false` if the
    /// column has nothing left to eliminate.
    pub fn eliminate(&mut self, j: usize) -> bool {
        let p = self.w.nrows();
        let r = self.rank;
        if r >= p || self.done[j] {
            return false;
        }
        let norm = self.residual_norm(j);
        if norm == 0.0 {
            return false;
        }
        let x0 = self.w[(r, j)];
        let phase = if x0.norm() == 0.0 { one() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        {
            let col = self.w.col_as_slice(j);
            self.v[r..p].copy_from_slice(&col[r..p]);
        }
        self.v[r] -= alpha;
        let vnorm_sq: f64 = self.v[r..p].iter().map(|v| v.norm_sqr()).sum();
        let v = &self.v[r..p];
        for k in 0..self.w.ncols() {
            if self.done[k] || k == j {
                continue;
            }
            let col = &mut self.w.col_as_slice_mut(k)[r..p];
            let mut dot = zero();
            for (vi, wi) in v.iter().zip(col.iter()) {
                dot += vi.conj() * wi;
            }
            if dot == zero() {
                continue;
            }
            let f = dot * (2.0 / vnorm_sq);
            for (vi, wi) in v.iter().zip(col.iter_mut()) {
                *wi -= vi * f;
            }
        }
        let col = self.w.col_as_slice_mut(j);
        col[r] = alpha;
        for c in &mut col[r + 1..p] {
            *c = zero();
        }
        self.done[j] = true;
        self.pivot_row[j] = Some(r);
        self.rank += 1;
        true
    }

    pub fn into_reduced(self) -> CMat {
        self.w
    }
}

/// Outcome of a left-to-right Householder sweep that skips dependent columns.
pub struct DependencySweep {
    /// Transformed matrix `Q^H A`.
    pub reduced: CMat,
    /// `true` for columns that were dependent on the columns processed before.
    pub dependent: Vec<bool>,
    /// Pivot row assigned to each independent column.
    pub pivot_row: Vec<Option<usize>>,
    pub rank: usize,
}

/// Processes the columns of `a` left to right; a column whose residual norm is
/// at most `threshold` is flagged dependent and consumes no reflector.
pub fn dependency_sweep(a: MatRef<'_, c64>, threshold: f64) -> DependencySweep {
    let q = a.ncols();
    let mut red = ColumnReducer::new(a.to_owned());
    let mut dependent = vec![false; q];
    for (j, dep) in dependent.iter_mut().enumerate() {
        if red.residual_norm(j) <= threshold || !red.eliminate(j) {
            *dep = true;
        }
    }
    let pivot_row = (0..q).map(|j| red.pivot_row(j)).collect();
    let rank = red.rank();
    DependencySweep {
        reduced: red.into_reduced(),
        dependent,
        pivot_row,
        rank,
    }
}

/// Greedy top-to-bottom row selection by Gram-Schmidt with reorthogonalization.
///
/// Returns, for each row of `a` in order, whether its residual against the
/// rows accepted so far exceeds `threshold` together with that residual norm.
#[derive(Clone)]
pub struct RowSweep {
    basis: Vec<Vec<c64>>,
    threshold: f64,
}

impl RowSweep {
    pub fn new(threshold: f64) -> Self {
        RowSweep {
            basis: Vec::new(),
            threshold,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Residual of `row` against the accepted rows.
    pub fn residual(&self, row: &[c64]) -> Vec<c64> {
        let mut res = row.to_vec();
        for _ in 0..2 {
            for b in &self.basis {
                let dot: c64 = b.iter().zip(&res).map(|(bi, ri)| bi.conj() * ri).sum();
                for (ri, bi) in res.iter_mut().zip(b) {
                    *ri -= dot * bi;
                }
            }
        }
        res
    }

    /// Accepts `row` if independent; returns whether it was accepted.
    pub fn offer(&mut self, row: &[c64]) -> bool {
        let res = self.residual(row);
        let norm = res.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > self.threshold {
            self.basis.push(res.into_iter().map(|v| v / norm).collect());
            true
        } else {
            false
        }
    }

    /// Accepts `row` unconditionally (it must be nonzero after projection).
    pub fn force(&mut self, row: &[c64]) {
        let res = self.residual(row);
        let norm = res.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            self.basis.push(res.into_iter().map(|v| v / norm).collect());
        }
    }

    pub fn residual_norm(&self, row: &[c64]) -> f64 {
        self.residual(row)
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Solves `r x = b` for upper-triangular `r` by back substitution.
pub fn solve_upper(r: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<CMat> {
    let n = r.nrows();
    if r.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "triangular solve {}x{} with {}x{}",
            r.nrows(),
            r.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let mut x = b.to_owned();
    for col in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, col)];
            for k in i + 1..n {
                acc -= r[(i, k)] * x[(k, col)];
            }
            let d = r[(i, i)];
            if d == zero() {
                return Err(Error::Linalg("singular triangular factor".into()));
            }
            x[(i, col)] = acc / d;
        }
    }
    Ok(x)
}
