//! Sparse (block) Macaulay matrix.
//!
//! Block column `t` holds the `l` scalar columns of the `t`-th basis function
//! in the chosen order. Rows are grouped by row degree `deg(shift) + d_j`,
//! then by equation, then by shift exponent in the chosen order, so the matrix
//! at degree `d - 1` is a leading row block of the matrix at degree `d`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use faer::c64;

use crate::basis::{cumulative_size, BasisRule, Exponent, MonomialTable, OrderId, OrderRule};
use crate::error::{Error, Result};
use crate::linalg::{zero, CMat};
use crate::problem::Problem;

/// Scalar row as sorted `(column, value)` pairs.
pub type SparseRow = Vec<(usize, c64)>;

/// One equation multiplied by one basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct RowBlock {
    pub equation: usize,
    pub shift: Exponent,
    /// First scalar row; the block spans `k` rows.
    pub start: usize,
}

#[derive(Debug, Clone)]
pub struct MacaulayMatrix {
    problem: Problem,
    basis: BasisRule,
    table: MonomialTable,
    degree: usize,
    rows: Vec<SparseRow>,
    row_blocks: Vec<RowBlock>,
    /// `degree_starts[D]` is the first scalar row of row degree `D`.
    degree_starts: Vec<usize>,
}

impl MacaulayMatrix {
    pub fn build(problem: &Problem, degree: usize, order: OrderId) -> Result<Self> {
        let minimum = problem.max_degree();
        if degree < minimum {
            return Err(Error::DegreeTooSmall {
                requested: degree,
                minimum,
            });
        }
        cumulative_size(problem.m(), degree)?;
        let rule = OrderRule::new(order, problem.m());
        let mut mat = MacaulayMatrix {
            problem: problem.clone(),
            basis: BasisRule::new(problem.basis()),
            table: MonomialTable::new(rule, degree),
            degree: 0,
            rows: Vec::new(),
            row_blocks: Vec::new(),
            degree_starts: vec![0],
        };
        for dd in 0..=degree {
            mat.append_degree(dd);
        }
        Ok(mat)
    }

    /// The matrix at degree `to`, which must be one more than the current one.
    pub fn enlarge(&self, to: usize) -> Result<Self> {
        let mut out = self.clone();
        out.enlarge_in_place(to)?;
        Ok(out)
    }

    pub fn enlarge_in_place(&mut self, to: usize) -> Result<()> {
        if to != self.degree + 1 {
            return Err(Error::DegreeSkip {
                from: self.degree,
                to,
            });
        }
        cumulative_size(self.problem.m(), to)?;
        self.table.extend_to(to);
        self.append_degree(to);
        Ok(())
    }

    /// Appends all rows of row degree `dd`.
    fn append_degree(&mut self, dd: usize) {
        let degrees = self.problem.degrees();
        let (k, l) = (self.problem.k(), self.problem.l());
        for (j, eq) in self.problem.equations().iter().enumerate() {
            if degrees[j] > dd {
                continue;
            }
            let shift_degree = dd - degrees[j];
            for idx in self.table.block(shift_degree) {
                let shift = self.table.exponent(idx).clone();
                let mut acc: Vec<BTreeMap<usize, c64>> = vec![BTreeMap::new(); k];
                for term in eq {
                    for (w, e) in self.basis.shift_rule(&shift, &term.support) {
                        let t = self
                            .table
                            .index_of(&e)
                            .expect("shifted support within the table");
                        for (r, row) in acc.iter_mut().enumerate() {
                            for c in 0..l {
                                let v = term.coefficient[r * l + c] * w;
                                if v != zero() {
                                    *row.entry(t * l + c).or_insert(zero()) += v;
                                }
                            }
                        }
                    }
                }
                self.row_blocks.push(RowBlock {
                    equation: j,
                    shift,
                    start: self.rows.len(),
                });
                for row in acc {
                    self.rows
                        .push(row.into_iter().filter(|(_, v)| *v != zero()).collect());
                }
            }
        }
        self.degree = dd;
        self.degree_starts.push(self.rows.len());
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> OrderRule {
        self.table.order()
    }

    pub fn basis(&self) -> BasisRule {
        self.basis
    }

    pub fn table(&self) -> &MonomialTable {
        &self.table
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.problem.l() * self.table.count_up_to(self.degree)
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row_blocks(&self) -> &[RowBlock] {
        &self.row_blocks
    }

    /// Scalar columns belonging to basis functions of degree exactly `dd`.
    pub fn col_block(&self, dd: usize) -> Range<usize> {
        let l = self.problem.l();
        let b = self.table.block(dd);
        b.start * l..b.end * l
    }

    /// Number of scalar columns of degree at most `dd`.
    pub fn cols_up_to(&self, dd: usize) -> usize {
        self.problem.l() * self.table.count_up_to(dd)
    }

    /// Degree of the basis function behind scalar column (or null-space row) `i`.
    pub fn degree_of_col(&self, i: usize) -> usize {
        self.table.exponent(i / self.problem.l()).degree()
    }

    /// Rows of row degree at most `dd`, i.e. the rows of the matrix at degree `dd`.
    pub fn rows_up_to(&self, dd: usize) -> usize {
        self.degree_starts[(dd + 1).min(self.degree_starts.len() - 1)]
    }

    /// Rows added when going from degree `dd` to the current degree.
    pub fn rows_after(&self, dd: usize) -> Range<usize> {
        self.rows_up_to(dd)..self.rows.len()
    }

    pub fn to_dense(&self) -> CMat {
        self.dense_rows(0..self.rows.len(), self.ncols())
    }

    /// Dense copy of a row range, padded or truncated to `ncols` columns.
    pub fn dense_rows(&self, range: Range<usize>, ncols: usize) -> CMat {
        let mut out = CMat::zeros(range.len(), ncols);
        for (i, r) in range.enumerate() {
            for &(c, v) in &self.rows[r] {
                if c < ncols {
                    out[(i, c)] = v;
                }
            }
        }
        out
    }

    /// Product with a dense matrix whose row count equals `ncols()`.
    pub fn mul_dense(&self, range: Range<usize>, z: &CMat) -> CMat {
        let mut out = CMat::zeros(range.len(), z.ncols());
        for (i, r) in range.enumerate() {
            for &(c, v) in &self.rows[r] {
                if c < z.nrows() {
                    for j in 0..z.ncols() {
                        out[(i, j)] += v * z[(c, j)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Exact equality of structure and values, down to the bit pattern.
    pub fn bitwise_eq(&self, other: &MacaulayMatrix) -> bool {
        self.degree == other.degree
            && self.row_blocks == other.row_blocks
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.len() == b.len()
                    && a.iter().zip(b).all(|((ca, va), (cb, vb))| {
                        ca == cb && va.re.to_bits() == vb.re.to_bits() && va.im.to_bits() == vb.im.to_bits()
                    })
            })
    }

    /// Coordinate listing `row col re im`, 1-based indices, one entry per line.
    pub fn triplets(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                let _ = writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, c + 1, v.re, v.im);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisId;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn r(v: f64) -> c64 {
        c64::new(v, 0.0)
    }

    /// Two dense bivariate quadrics with distinct nonzero coefficients.
    fn quadrics() -> Problem {
        let supports = [[2, 0], [1, 1], [0, 2], [1, 0], [0, 1], [0, 0]];
        let eq = |off: f64| {
            supports
                .iter()
                .enumerate()
                .map(|(i, s)| (s.to_vec(), r(off + i as f64 + 1.0)))
                .collect::<Vec<_>>()
        };
        Problem::system(vec![eq(0.0), eq(10.0)], 2, BasisId::Monomial).unwrap()
    }

    #[test]
    fn quadrics_at_degree_three_have_the_expected_pattern() {
        let m = MacaulayMatrix::build(&quadrics(), 3, OrderId::Grevlex).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (6, 10));
        // grevlex columns: 1, x2, x1, x2^2, x1x2, x1^2, x2^3, x1x2^2, x1^2x2, x1^3
        let mask: Vec<Vec<usize>> = m.rows().iter().map(|row| row.iter().map(|(c, _)| *c).collect()).collect();
        assert_eq!(mask[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(mask[1], vec![0, 1, 2, 3, 4, 5]);
        // shifts by x2 come before shifts by x1
        assert_eq!(mask[2], vec![1, 3, 4, 6, 7, 8]);
        assert_eq!(mask[3], vec![2, 4, 5, 7, 8, 9]);
        assert_eq!(mask[4], mask[2]);
        assert_eq!(mask[5], mask[3]);
        // coefficient of x2^2 in x2 * f1 is the x2 coefficient of f1
        assert_eq!(m.rows()[2].iter().find(|(c, _)| *c == 3).unwrap().1, r(5.0));
        let blocks: Vec<(usize, String)> = m.row_blocks().iter().map(|b| (b.equation, b.shift.to_string())).collect();
        assert_eq!(
            blocks,
            vec![
                (0, "(0,0)".into()),
                (1, "(0,0)".into()),
                (0, "(0,1)".into()),
                (0, "(1,0)".into()),
                (1, "(0,1)".into()),
                (1, "(1,0)".into()),
            ]
        );
    }

    #[test]
    fn no_shifts_at_the_problem_degree() {
        let m = MacaulayMatrix::build(&quadrics(), 2, OrderId::Grevlex).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 6));
        assert!(matches!(
            MacaulayMatrix::build(&quadrics(), 1, OrderId::Grevlex),
            Err(Error::DegreeTooSmall { requested: 1, minimum: 2 })
        ));
    }

    #[test]
    fn block_dimensions_follow_the_counting_formula() {
        let a: Vec<c64> = (0..6).map(|i| r(i as f64 + 1.0)).collect();
        let supports = [[2, 0], [1, 1], [0, 2], [1, 0], [0, 1], [0, 0]];
        let p = Problem::mep(
            supports.iter().map(|s| (s.to_vec(), a.clone())).collect(),
            3,
            2,
            2,
            BasisId::Monomial,
        )
        .unwrap();
        let m = MacaulayMatrix::build(&p, 3, OrderId::Grevlex).unwrap();
        // independent enumeration of the shifts: exponents of degree <= 1 in two variables
        let shifts = (0..=1u32).flat_map(|a| (0..=1u32).map(move |b| (a, b))).filter(|(a, b)| a + b <= 1).count();
        assert_eq!(m.nrows(), 3 * shifts);
        assert_eq!((m.nrows(), m.ncols()), (9, 20));
        for d in 2..7 {
            let m = MacaulayMatrix::build(&p, d, OrderId::Grlex).unwrap();
            assert_eq!(m.nrows(), 3 * binom(2 + d - 2, 2));
            assert_eq!(m.ncols(), 2 * binom(2 + d, 2));
        }
    }

    #[test]
    fn enlarge_matches_direct_build() {
        let p = quadrics();
        let m3 = MacaulayMatrix::build(&p, 3, OrderId::Grinvlex).unwrap();
        let m4 = MacaulayMatrix::build(&p, 4, OrderId::Grinvlex).unwrap();
        assert!(m3.enlarge(4).unwrap().bitwise_eq(&m4));
        assert!(matches!(m3.enlarge(5), Err(Error::DegreeSkip { from: 3, to: 5 })));
        assert_eq!(m4.rows_up_to(3), m3.nrows());
        assert_eq!(m4.rows_after(3), m3.nrows()..m4.nrows());
    }

    #[test]
    fn vandermonde_vectors_are_annihilated() {
        // (x1 - 1)(x2 + 2) and x1 + x2 - 0.5 share the root (1, -0.5)
        let p = Problem::system(
            vec![
                vec![(vec![1, 1], r(1.0)), (vec![1, 0], r(2.0)), (vec![0, 1], r(-1.0)), (vec![0, 0], r(-2.0))],
                vec![(vec![1, 0], r(1.0)), (vec![0, 1], r(1.0)), (vec![0, 0], r(-0.5))],
            ],
            2,
            BasisId::Chebyshev,
        )
        .unwrap();
        // only T0 and T1 occur, so the Chebyshev reading is the same polynomial
        let x = [r(1.0), r(-0.5)];
        let rule = BasisRule::new(BasisId::Chebyshev);
        for d in 2..7 {
            let m = MacaulayMatrix::build(&p, d, OrderId::Grevlex).unwrap();
            let v = CMat::from_fn(m.ncols(), 1, |i, _| rule.evaluate(m.table().exponent(i), &x));
            let mv = m.mul_dense(0..m.nrows(), &v);
            let vn = crate::linalg::frobenius(v.as_ref());
            assert!(crate::linalg::frobenius(mv.as_ref()) <= 1e-10 * m.frobenius_norm() * vn);
        }
    }

    #[test]
    fn triplet_export() {
        let p = Problem::system(vec![vec![(vec![1], r(1.0)), (vec![0], r(-1.0))]], 1, BasisId::Monomial).unwrap();
        let m = MacaulayMatrix::build(&p, 2, OrderId::Grevlex).unwrap();
        let text = m.triplets();
        let first = text.lines().next().unwrap();
        assert_eq!(first, format!("1 1 {:.16e} {:.16e}", -1.0, 0.0));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(m.to_dense()[(1, 2)], r(1.0));
    }
}
