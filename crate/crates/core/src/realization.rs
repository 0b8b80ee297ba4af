//! Shift relations on the solution subspace and their eigenvalue problems.

use faer::c64;
use rand::Rng;

use crate::basis::{BasisRule, Exponent, MonomialTable};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, one, select_rows, solve_upper, zero, CMat, ColumnReducer};
use crate::macaulay::MacaulayMatrix;
use crate::qz::qz;
use crate::subspace::RankStructure;

/// Linear polynomial `constant + sum_i coefficients[i] * x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearShift {
    pub constant: c64,
    pub coefficients: Vec<c64>,
}

impl LinearShift {
    /// Coefficients drawn uniformly from the complex unit disc.
    pub fn random<R: Rng>(m: usize, rng: &mut R) -> Self {
        let mut draw = || loop {
            let re = 2.0 * rng.random::<f64>() - 1.0;
            let im = 2.0 * rng.random::<f64>() - 1.0;
            if re * re + im * im <= 1.0 {
                return c64::new(re, im);
            }
        };
        let constant = draw();
        let coefficients = (0..m).map(|_| draw()).collect();
        LinearShift {
            constant,
            coefficients,
        }
    }

    /// The coordinate function `x_var`.
    pub fn variable(m: usize, var: usize) -> Self {
        let mut coefficients = vec![zero(); m];
        coefficients[var] = one();
        LinearShift {
            constant: zero(),
            coefficients,
        }
    }

    pub fn constant(m: usize, value: c64) -> Self {
        LinearShift {
            constant: value,
            coefficients: vec![zero(); m],
        }
    }

    pub fn evaluate(&self, x: &[c64]) -> c64 {
        self.constant + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<c64>()
    }
}

/// Sparse linear combination of subspace rows.
pub type RowCombination = Vec<(usize, c64)>;

/// Base rows and, for each of them, the rows of its product with the shift.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftMaps {
    pub base_rows: Vec<usize>,
    pub action: Vec<RowCombination>,
}

/// Expresses `g * row` for every standard row as a combination of rows.
pub fn build_shift_maps(
    rs: &RankStructure,
    g: &LinearShift,
    basis: BasisRule,
    table: &MonomialTable,
    l: usize,
) -> Result<ShiftMaps> {
    if rs.gap_degree.is_none() {
        return Err(Error::GapMissing);
    }
    let m = g.coefficients.len();
    let mut action = Vec::with_capacity(rs.standard_rows.len());
    for &row in &rs.standard_rows {
        let (t, c) = (row / l, row % l);
        let e = table.exponent(t);
        let mut comb: RowCombination = Vec::new();
        let mut push = |target: usize, w: c64| {
            if w == zero() {
                return;
            }
            match comb.iter_mut().find(|(r, _)| *r == target) {
                Some(entry) => entry.1 += w,
                None => comb.push((target, w)),
            }
        };
        push(row, g.constant);
        for (var, &coef) in g.coefficients.iter().enumerate() {
            if coef == zero() {
                continue;
            }
            for (w, image) in basis.shift_rule(&Exponent::unit(m, var), e) {
                let target = table
                    .index_of(&image)
                    .map(|ti| ti * l + c)
                    .filter(|&r| r < rs.nrows)
                    .ok_or(Error::ShiftEscapesSubspace { row, nrows: rs.nrows })?;
                push(target, coef * w);
            }
        }
        action.push(comb);
    }
    Ok(ShiftMaps {
        base_rows: rs.standard_rows.clone(),
        action,
    })
}

/// Applies a row action to `w`: row `i` of the result is `action[i]` applied
/// to the rows of `w`.
pub fn apply_action(action: &[RowCombination], w: &CMat) -> CMat {
    let mut out = CMat::zeros(action.len(), w.ncols());
    for (i, comb) in action.iter().enumerate() {
        for &(r, coef) in comb {
            for j in 0..w.ncols() {
                out[(i, j)] += coef * w[(r, j)];
            }
        }
    }
    out
}

/// Generalized eigenvalue problem `A v = lambda B v` for one shift.
#[derive(Debug, Clone)]
pub struct ShiftPencil {
    pub a: CMat,
    pub b: CMat,
    pub shift: LinearShift,
}

/// Pencil on the compressed null space: `B` holds the base rows, `A` the
/// shifted ones.
pub fn build_pencil_null(w11: &CMat, maps: &ShiftMaps, shift: &LinearShift) -> Result<ShiftPencil> {
    if maps.base_rows.len() != w11.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} base rows for a compressed basis with {} columns",
            maps.base_rows.len(),
            w11.ncols()
        )));
    }
    if let Some(&r) = maps.base_rows.iter().chain(maps.action.iter().flatten().map(|(r, _)| r)).find(|&&r| r >= w11.nrows()) {
        return Err(Error::DimensionMismatch(format!(
            "row {r} outside a compressed basis with {} rows",
            w11.nrows()
        )));
    }
    Ok(ShiftPencil {
        a: apply_action(&maps.action, w11),
        b: select_rows(w11.as_ref(), &maps.base_rows),
        shift: shift.clone(),
    })
}

/// Pencils for several shifts straight from the columns of the Macaulay
/// matrix, sharing one backward QR factorization.
///
/// For every null vector `v`, the entries at the shifted columns outside the
/// standard set are a fixed linear function `X` of the entries at the
/// standard columns. With `G0`, `Gr` the parts of a shift action on standard
/// and on the other shifted columns, `g * v0 = (G0 + Gr X) v0` holds for the
/// affine Vandermonde vectors, so `A = G0 + Gr X` and `B = I`.
pub fn build_pencils_column(
    m: &MacaulayMatrix,
    rs: &RankStructure,
    shifts: &[LinearShift],
    tol: f64,
) -> Result<Vec<ShiftPencil>> {
    let l = m.problem().l();
    let maps = shifts
        .iter()
        .map(|g| build_shift_maps(rs, g, m.basis(), m.table(), l))
        .collect::<Result<Vec<_>>>()?;
    let q = m.ncols();
    let base = &rs.standard_rows;
    let n0 = base.len();
    let mut role = vec![Role::Other; q];
    for (i, &c) in base.iter().enumerate() {
        role[c] = Role::Base(i);
    }
    let mut shifted: Vec<usize> = maps
        .iter()
        .flat_map(|mp| mp.action.iter().flatten().map(|&(r, _)| r))
        .filter(|&r| matches!(role[r], Role::Other))
        .collect();
    shifted.sort_unstable();
    shifted.dedup();
    for (i, &c) in shifted.iter().enumerate() {
        role[c] = Role::Shifted(i);
    }

    let dense = m.to_dense();
    let threshold = tol * frobenius(dense.as_ref());
    let mut red = ColumnReducer::new(dense);
    for c in (0..q).rev() {
        if matches!(role[c], Role::Other) && red.residual_norm(c) > threshold {
            red.eliminate(c);
        }
    }
    let mut pivots = Vec::with_capacity(shifted.len());
    for &c in shifted.iter().rev() {
        let norm = red.residual_norm(c);
        if norm <= threshold || !red.eliminate(c) {
            return Err(Error::RankAmbiguous {
                sigma: norm,
                threshold,
                above: f64::INFINITY,
                below: 0.0,
            });
        }
        pivots.push(red.pivot_row(c).expect("eliminated column"));
    }
    pivots.reverse();
    // processing order was descending, so the triangular factor is indexed
    // by the reversed shifted list
    let nr = shifted.len();
    let reduced = red.reduced();
    let rr = CMat::from_fn(nr, nr, |i, j| {
        let (ri, cj) = (pivots[nr - 1 - i], shifted[nr - 1 - j]);
        reduced[(ri, cj)]
    });
    let r0 = CMat::from_fn(nr, n0, |i, j| -reduced[(pivots[nr - 1 - i], base[j])]);
    let x_rev = solve_upper(rr.as_ref(), r0.as_ref())?;
    // row `k` of `x_rev` belongs to shifted[nr - 1 - k]
    let mut pencils = Vec::with_capacity(shifts.len());
    for (mp, g) in maps.iter().zip(shifts) {
        let mut a = CMat::zeros(n0, n0);
        for (i, comb) in mp.action.iter().enumerate() {
            for &(r, w) in comb {
                match role[r] {
                    Role::Base(j) => a[(i, j)] += w,
                    Role::Shifted(s) => {
                        let k = nr - 1 - s;
                        for j in 0..n0 {
                            a[(i, j)] += w * x_rev[(k, j)];
                        }
                    }
                    Role::Other => unreachable!("shift images are base or shifted columns"),
                }
            }
        }
        pencils.push(ShiftPencil {
            a,
            b: CMat::identity(n0, n0),
            shift: g.clone(),
        });
    }
    Ok(pencils)
}

#[derive(Debug, Clone, Copy)]
enum Role {
    Other,
    Base(usize),
    Shifted(usize),
}

/// Eigenvalues of all shift pencils, aligned by one generalized Schur form.
#[derive(Debug, Clone)]
pub struct MultishiftResult {
    pub points: Vec<Vec<c64>>,
    pub g_values: Vec<c64>,
    /// Indices dropped as infinite eigenvalues.
    pub infinite: usize,
    /// Indices rejected because both diagonal entries vanished.
    pub singular: usize,
    /// Largest relative strictly-lower part of the transformed variable pencils.
    pub lower_residual: f64,
}

/// Triangularizes the first pencil (the random shift) and reads every
/// coordinate pencil off the same unitary equivalence.
///
/// `pencils[0]` is the random shift, `pencils[1..]` are `x_1, .., x_m`, all
/// with the same `B`.
pub fn solve_multishift(pencils: &[ShiftPencil]) -> Result<MultishiftResult> {
    let (first, coords) = pencils
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("no pencils".into()))?;
    let n = first.a.nrows();
    for p in pencils {
        if p.a.nrows() != n || p.a.ncols() != n || p.b.nrows() != n || p.b.ncols() != n {
            return Err(Error::DimensionMismatch("pencils of unequal size".into()));
        }
    }
    if n == 0 {
        return Ok(MultishiftResult {
            points: Vec::new(),
            g_values: Vec::new(),
            infinite: 0,
            singular: 0,
            lower_residual: 0.0,
        });
    }
    let schur = qz(first.a.as_ref(), first.b.as_ref())?;
    let qh = schur.q.adjoint().to_owned();
    let transformed: Vec<CMat> = coords.iter().map(|p| &qh * &p.a * &schur.z).collect();
    let mut lower_residual: f64 = 0.0;
    for t in &transformed {
        let total = frobenius(t.as_ref());
        let lower: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| t[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if total > 0.0 {
            lower_residual = lower_residual.max(lower / total);
        }
    }
    let a_norm = frobenius(first.a.as_ref());
    let b_norm = frobenius(first.b.as_ref());
    let mut out = MultishiftResult {
        points: Vec::new(),
        g_values: Vec::new(),
        infinite: 0,
        singular: 0,
        lower_residual,
    };
    for j in 0..n {
        let beta = schur.t[(j, j)];
        let alpha = schur.s[(j, j)];
        if beta.norm() < 1e-12 * b_norm {
            if alpha.norm() < 1e-12 * a_norm {
                out.singular += 1;
            } else {
                out.infinite += 1;
            }
            continue;
        }
        out.g_values.push(alpha / beta);
        out.points.push(transformed.iter().map(|t| t[(j, j)] / beta).collect());
    }
    Ok(out)
}

/// Groups of eigen-tuples whose shift values coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    /// Cluster index of every tuple.
    pub assignments: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub centers: Vec<Vec<c64>>,
}

/// Single-linkage clustering of the shift values at distance
/// `ctol * max_j |g_j|`; each center is the component-wise mean.
pub fn cluster(points: &[Vec<c64>], g_values: &[c64], ctol: f64) -> ClusterSet {
    let n = points.len();
    let scale = g_values.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut i = i;
        while parent[i] != r {
            let next = parent[i];
            parent[i] = r;
            i = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (g_values[i] - g_values[j]).norm() <= ctol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut assignments = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut root_id = vec![usize::MAX; n];
    for (i, slot) in assignments.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        if root_id[r] == usize::MAX {
            root_id[r] = members.len();
            members.push(Vec::new());
        }
        *slot = root_id[r];
        members[root_id[r]].push(i);
    }
    let centers = members
        .iter()
        .map(|mem| {
            if mem.len() == 1 {
                return points[mem[0]].clone();
            }
            let dim = points[mem[0]].len();
            (0..dim)
                .map(|k| mem.iter().map(|&i| points[i][k]).sum::<c64>() / mem.len() as f64)
                .collect()
        })
        .collect();
    ClusterSet {
        assignments,
        members,
        centers,
    }
}

/// Block Vandermonde matrix: column `s` holds `phi_t(x_s) * y_s[c]` at row
/// `t * l + c` for the rows `0..nrows`.
pub fn vandermonde(
    table: &MonomialTable,
    basis: BasisRule,
    nrows: usize,
    points: &[Vec<c64>],
    vectors: &[Vec<c64>],
) -> CMat {
    let l = vectors.first().map(|v| v.len()).unwrap_or(1);
    CMat::from_fn(nrows, points.len(), |i, s| {
        basis.evaluate(table.exponent(i / l), &points[s]) * vectors[s][i % l]
    })
}
