//! Solution subspace of the Macaulay matrix and its degree-block rank
//! structure.
//!
//! Rows of a null-space basis and columns of the Macaulay matrix share one
//! index space: scalar index `t * l + c` for basis function `t` and vector
//! component `c`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use faer::c64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    check_unambiguous, dependency_sweep, frobenius, leading_left_singular_vectors, null_space, rank_above,
    singular_values, CMat, ColumnReducer, RowSweep,
};
use crate::macaulay::MacaulayMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    #[default]
    Null,
    Column,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Null => "null",
            Route::Column => "column",
        })
    }
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "null" => Ok(Route::Null),
            "column" => Ok(Route::Column),
            other => Err(Error::InvalidOption(format!("unknown route '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    #[default]
    Block,
    Row,
}

impl fmt::Display for RankMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankMode::Block => "block",
            RankMode::Row => "row",
        })
    }
}

impl FromStr for RankMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block" => Ok(RankMode::Block),
            "row" => Ok(RankMode::Row),
            other => Err(Error::InvalidOption(format!("unknown rank mode '{other}'"))),
        }
    }
}

/// Orthonormal basis of the numerical null space of `M(d)`.
#[derive(Debug, Clone)]
pub struct NullBasis {
    pub z: CMat,
    pub degree: usize,
    /// Singular value threshold used for the last rank decision.
    pub threshold: f64,
}

impl NullBasis {
    pub fn nullity(&self) -> usize {
        self.z.ncols()
    }
}

/// Null space of the full matrix from one SVD.
pub fn nullspace(m: &MacaulayMatrix, tol: f64, strict: bool) -> Result<NullBasis> {
    let ns = null_space(m.to_dense().as_ref(), tol, strict)?;
    Ok(NullBasis {
        z: ns.basis,
        degree: m.degree(),
        threshold: ns.threshold,
    })
}

/// Null space of `m` obtained from the null space of its leading part at
/// degree `m.degree() - 1`.
///
/// The previous basis, padded with the identity on the new columns, already
/// contains the new null space; only the new rows have to be annihilated
/// inside it.
pub fn nullspace_recursive(prev: &NullBasis, m: &MacaulayMatrix, tol: f64, strict: bool) -> Result<NullBasis> {
    if m.degree() != prev.degree + 1 {
        return Err(Error::DegreeSkip {
            from: prev.degree,
            to: m.degree(),
        });
    }
    let q_prev = prev.z.nrows();
    let q = m.ncols();
    let n_prev = prev.z.ncols();
    let added = q - q_prev;
    let rows = m.rows_after(prev.degree);
    let width = n_prev + added;

    let mut k = CMat::zeros(rows.len(), width);
    for (i, r) in rows.clone().enumerate() {
        for &(c, v) in &m.rows()[r] {
            if c < q_prev {
                for j in 0..n_prev {
                    k[(i, j)] += v * prev.z[(c, j)];
                }
            } else {
                k[(i, n_prev + c - q_prev)] += v;
            }
        }
    }
    let ns = null_space(k.as_ref(), tol, strict)?;
    let n = ns.basis.ncols();
    let top = prev.z.as_ref() * ns.basis.subrows(0, n_prev);
    let mut z = CMat::zeros(q, n);
    for j in 0..n {
        for i in 0..q_prev {
            z[(i, j)] = top[(i, j)];
        }
        for i in 0..added {
            z[(q_prev + i, j)] = ns.basis[(n_prev + i, j)];
        }
    }
    Ok(NullBasis {
        z,
        degree: m.degree(),
        threshold: ns.threshold,
    })
}

/// Degree-block rank structure of the solution subspace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankStructure {
    pub nullity: usize,
    /// New independent null-space rows (dependent columns) per degree block.
    pub increments: Vec<usize>,
    /// Standard rows below the gap, increasing.
    pub standard_rows: Vec<usize>,
    pub gap_degree: Option<usize>,
    /// Affine solution count: standard rows before the gap.
    pub m_a: usize,
    /// Rows up to and including the gap block.
    pub nrows: usize,
}

impl RankStructure {
    fn assemble(
        increments: Vec<usize>,
        standard_rows: Vec<usize>,
        block_rows: &[Range<usize>],
        nullity: usize,
    ) -> RankStructure {
        let gap = increments.iter().position(|&v| v == 0);
        let (m_a, nrows) = match gap {
            Some(g) => (increments[..g].iter().sum(), block_rows[g].end),
            None => (0, 0),
        };
        let standard_rows = match gap {
            Some(_) => standard_rows.into_iter().filter(|&r| r < nrows).collect(),
            None => Vec::new(),
        };
        RankStructure {
            nullity,
            increments,
            standard_rows,
            gap_degree: gap,
            m_a,
            nrows,
        }
    }

    pub fn require_gap(self, degree: usize) -> Result<RankStructure> {
        if self.gap_degree.is_none() {
            return Err(Error::NoGap { degree });
        }
        Ok(self)
    }
}

fn block_rows(m: &MacaulayMatrix) -> Vec<Range<usize>> {
    (0..=m.degree()).map(|dd| m.col_block(dd)).collect()
}

/// Rank structure of a null-space basis, read from its rows top to bottom.
///
/// Rank decisions use the absolute threshold `tol`, the basis having unit
/// norm. The sweep over the rows stops after the first block without new
/// independent rows.
pub fn analyze_null(z: &NullBasis, m: &MacaulayMatrix, mode: RankMode, tol: f64, strict: bool) -> Result<RankStructure> {
    let blocks = block_rows(m);
    if z.z.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "basis with {} rows for a matrix with {} columns",
            z.z.nrows(),
            m.ncols()
        )));
    }
    let n = z.nullity();
    let row = |i: usize| -> Vec<c64> { (0..n).map(|j| z.z[(i, j)]).collect() };
    let mut increments = Vec::with_capacity(blocks.len());
    let mut standard = Vec::new();
    let mut sweep = RowSweep::new(tol);
    match mode {
        RankMode::Row => {
            let mut gap_seen = false;
            for b in &blocks {
                let mut inc = 0;
                for i in b.clone() {
                    if sweep.offer(&row(i)) {
                        inc += 1;
                        if !gap_seen {
                            standard.push(i);
                        }
                    }
                }
                gap_seen |= inc == 0;
                increments.push(inc);
            }
        }
        RankMode::Block => {
            let mut prev_rank = 0;
            let mut gap_seen = false;
            for b in &blocks {
                let slice = z.z.subrows(0, b.end);
                let sigma = singular_values(slice)?;
                if strict {
                    check_unambiguous(&sigma, tol)?;
                }
                let rank = rank_above(&sigma, tol);
                let inc = rank.saturating_sub(prev_rank);
                prev_rank = prev_rank.max(rank);
                increments.push(inc);
                if gap_seen {
                    continue;
                }
                if inc == 0 {
                    gap_seen = true;
                    continue;
                }
                // top-to-bottom selection inside the block, falling back to
                // largest residuals when it disagrees with the block rank
                let before = sweep.clone();
                let mut picked = Vec::new();
                for i in b.clone() {
                    if sweep.offer(&row(i)) {
                        picked.push(i);
                    }
                }
                if picked.len() != inc {
                    sweep = before;
                    picked.clear();
                    for _ in 0..inc {
                        let best = b
                            .clone()
                            .filter(|i| !picked.contains(i))
                            .max_by(|&a, &c| sweep.residual_norm(&row(a)).total_cmp(&sweep.residual_norm(&row(c))))
                            .expect("block has rows");
                        sweep.force(&row(best));
                        picked.push(best);
                    }
                    picked.sort_unstable();
                }
                standard.extend(picked);
            }
        }
    }
    Ok(RankStructure::assemble(increments, standard, &blocks, n))
}

/// Rank structure read from the columns of the Macaulay matrix: a column that
/// depends on the columns to its right corresponds to an independent row of
/// the null space.
pub fn analyze_columns(m: &MacaulayMatrix, mode: RankMode, tol: f64, strict: bool) -> Result<RankStructure> {
    let blocks = block_rows(m);
    let dense = m.to_dense();
    let threshold = tol * frobenius(dense.as_ref());
    let q = m.ncols();
    let mut dependent = vec![false; q];
    let mut increments = vec![0; blocks.len()];
    match mode {
        RankMode::Row => {
            let reversed = CMat::from_fn(dense.nrows(), q, |i, j| dense[(i, q - 1 - j)]);
            let sweep = dependency_sweep(reversed.as_ref(), threshold);
            for (j, &dep) in sweep.dependent.iter().enumerate() {
                dependent[q - 1 - j] = dep;
            }
        }
        RankMode::Block => {
            let mut red = ColumnReducer::new(dense);
            for b in blocks.iter().rev() {
                let cols: Vec<usize> = b.clone().rev().collect();
                let residual = red.residual_block(&cols);
                let sigma = singular_values(residual.as_ref())?;
                if strict {
                    check_unambiguous(&sigma, threshold)?;
                }
                let rho = rank_above(&sigma, threshold);
                let local = dependency_sweep(residual.as_ref(), threshold);
                let chosen: Vec<usize> = if local.rank == rho {
                    (0..cols.len()).filter(|&i| !local.dependent[i]).collect()
                } else {
                    greedy_columns(residual, rho)
                };
                let mut is_chosen = vec![false; cols.len()];
                for &i in &chosen {
                    is_chosen[i] = true;
                    red.eliminate(cols[i]);
                }
                for (i, &c) in cols.iter().enumerate() {
                    dependent[c] = !is_chosen[i];
                }
            }
        }
    }
    let mut standard = Vec::new();
    for (dd, b) in blocks.iter().enumerate() {
        for c in b.clone() {
            if dependent[c] {
                increments[dd] += 1;
                standard.push(c);
            }
        }
    }
    let nullity = dependent.iter().filter(|&&d| d).count();
    // standard rows beyond the gap are not part of the affine zone
    let gap = increments.iter().position(|&v| v == 0);
    if let Some(g) = gap {
        standard.retain(|&c| c < blocks[g].end);
    }
    Ok(RankStructure::assemble(increments, standard, &blocks, nullity))
}

/// `count` columns picked one at a time by largest residual norm.
fn greedy_columns(a: CMat, count: usize) -> Vec<usize> {
    let q = a.ncols();
    let mut red = ColumnReducer::new(a);
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count {
        let best = (0..q)
            .filter(|j| !chosen.contains(j))
            .max_by(|&a, &b| red.residual_norm(a).total_cmp(&red.residual_norm(b)));
        match best {
            Some(j) => {
                red.eliminate(j);
                chosen.push(j);
            }
            None => break,
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Whether the nullity has stopped growing: the last two entries agree.
/// With `posdim` the structure is inspected at every degree regardless.
pub fn stabilized(history: &[usize], posdim: bool) -> bool {
    if posdim {
        return true;
    }
    matches!(history, [.., a, b] if a == b)
}

/// Orthonormal basis of the affine part: the leading `m_a` left singular
/// vectors of the rows of `z` up to and including the gap block.
pub fn column_compress(z: &NullBasis, rs: &RankStructure) -> Result<CMat> {
    if rs.gap_degree.is_none() {
        return Err(Error::GapMissing);
    }
    if rs.m_a == 0 {
        return Ok(CMat::zeros(rs.nrows, 0));
    }
    let top = z.z.subrows(0, rs.nrows);
    leading_left_singular_vectors(top, rs.m_a)
}

/// Per-degree diagnostic table as CSV.
pub fn history_csv(rows: &[DegreeRecord]) -> String {
    let mut out = String::from("d,p,q,nullity,increments,gap\n");
    for r in rows {
        let inc: Vec<String> = r.increments.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.degree,
            r.p,
            r.q,
            r.nullity,
            inc.join(" "),
            r.gap.map(|g| g.to_string()).unwrap_or_default()
        ));
    }
    out
}

/// One line of the per-degree diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRecord {
    pub degree: usize,
    pub p: usize,
    pub q: usize,
    pub nullity: usize,
    pub increments: Vec<usize>,
    pub gap: Option<usize>,
}
