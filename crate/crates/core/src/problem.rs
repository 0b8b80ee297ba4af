//! Unified representation of polynomial systems and rectangular
//! multiparameter eigenvalue problems.
//!
//! Both are `P_j(x) y = 0` for `j = 1..s`, with `k x l` coefficient matrices.
//! A polynomial system has `k = l = 1` (and `y = 1`), an eigenvalue problem has
//! a single equation with `k >= l + m - 1`.

use std::fmt;

use faer::c64;
use serde::Serialize;

use crate::basis::{power_in_chebyshev, BasisId, BasisRule, Exponent};
use crate::error::{Error, Result};
use crate::linalg::{zero, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    System,
    Mep,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::System => "system",
            ProblemKind::Mep => "mep",
        })
    }
}

/// One coefficient matrix together with the basis function it multiplies.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub support: Exponent,
    /// Row-major `k x l` entries.
    pub coefficient: Vec<c64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    kind: ProblemKind,
    m: usize,
    k: usize,
    l: usize,
    basis: BasisId,
    equations: Vec<Vec<Term>>,
}

impl Problem {
    /// Polynomial system from scalar term lists `(support, coefficient)`.
    ///
    /// Terms sharing a support within one equation are summed.
    pub fn system(equations: Vec<Vec<(Vec<u32>, c64)>>, m: usize, basis: BasisId) -> Result<Self> {
        let mut merged = Vec::with_capacity(equations.len());
        for (j, eq) in equations.into_iter().enumerate() {
            if eq.is_empty() {
                return Err(Error::EmptyEquation { equation: j + 1 });
            }
            let mut terms: Vec<Term> = Vec::with_capacity(eq.len());
            for (support, coef) in eq {
                if support.len() != m {
                    return Err(Error::SupportLengthMismatch {
                        equation: j + 1,
                        expected: m,
                        found: support.len(),
                    });
                }
                let support = Exponent::new(support);
                match terms.iter_mut().find(|t| t.support == support) {
                    Some(t) => t.coefficient[0] += coef,
                    None => terms.push(Term {
                        support,
                        coefficient: vec![coef],
                    }),
                }
            }
            merged.push(terms);
        }
        if merged.is_empty() {
            return Err(Error::EmptyEquation { equation: 1 });
        }
        Ok(Problem {
            kind: ProblemKind::System,
            m,
            k: 1,
            l: 1,
            basis,
            equations: merged,
        })
    }

    /// Rectangular multiparameter eigenvalue problem from `k x l` matrices
    /// given row-major.
    pub fn mep(
        terms: Vec<(Vec<u32>, Vec<c64>)>,
        k: usize,
        l: usize,
        m: usize,
        basis: BasisId,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyEquation { equation: 1 });
        }
        if k < l + m - 1 {
            return Err(Error::UnderDetermined { k, l, m });
        }
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for (support, coef) in terms {
            if support.len() != m {
                return Err(Error::SupportLengthMismatch {
                    equation: 1,
                    expected: m,
                    found: support.len(),
                });
            }
            if coef.len() != k * l {
                return Err(Error::ShapeMismatch {
                    expected: (k, l),
                    found: (coef.len() / l.max(1), l),
                });
            }
            let support = Exponent::new(support);
            match merged.iter_mut().find(|t| t.support == support) {
                Some(t) => {
                    for (a, b) in t.coefficient.iter_mut().zip(&coef) {
                        *a += b;
                    }
                }
                None => merged.push(Term {
                    support,
                    coefficient: coef,
                }),
            }
        }
        Ok(Problem {
            kind: ProblemKind::Mep,
            m,
            k,
            l,
            basis,
            equations: vec![merged],
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// Number of variables.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn equations(&self) -> &[Vec<Term>] {
        &self.equations
    }

    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    /// Total degree of every equation.
    pub fn degrees(&self) -> Vec<usize> {
        self.equations
            .iter()
            .map(|eq| eq.iter().map(|t| t.support.degree()).max().unwrap_or(0))
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Copy with every coefficient multiplied by `alpha`.
    pub fn scaled(&self, alpha: c64) -> Problem {
        let mut out = self.clone();
        for eq in &mut out.equations {
            for t in eq {
                for c in &mut t.coefficient {
                    *c *= alpha;
                }
            }
        }
        out
    }

    /// Stacked evaluation: an `(s k) x l` matrix, `P_1(x)` on top.
    pub fn evaluate(&self, x: &[c64]) -> CMat {
        assert_eq!(x.len(), self.m, "point dimension");
        let rule = BasisRule::new(self.basis);
        let (k, l) = (self.k, self.l);
        let mut out = CMat::zeros(self.equations.len() * k, l);
        for (j, eq) in self.equations.iter().enumerate() {
            for t in eq {
                let phi = rule.evaluate(&t.support, x);
                for r in 0..k {
                    for c in 0..l {
                        out[(j * k + r, c)] += t.coefficient[r * l + c] * phi;
                    }
                }
            }
        }
        out
    }

    /// Sum of the absolute values of all coefficient entries.
    pub fn coefficient_norm(&self) -> f64 {
        self.equations
            .iter()
            .flatten()
            .flat_map(|t| t.coefficient.iter())
            .map(|c| c.norm())
            .sum()
    }

    /// Absolute residual, relative residual and eigenvector at `x`.
    ///
    /// The absolute residual is the smallest singular value of the stacked
    /// evaluation and `y` its right singular vector; for a system this is the
    /// 2-norm of the vector of polynomial values and `y = 1`.
    pub fn residual(&self, x: &[c64]) -> Result<Residual> {
        let value = self.evaluate(x);
        let (abs, y) = if self.l == 1 {
            let norm = (0..value.nrows())
                .map(|i| value[(i, 0)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            (norm, vec![c64::new(1.0, 0.0)])
        } else {
            let svd = value
                .svd()
                .map_err(|e| Error::Linalg(format!("residual svd: {e:?}")))?;
            let sigma = svd.S().column_vector();
            let l = self.l;
            let smallest = if value.nrows() >= l { sigma[l - 1].re } else { 0.0 };
            let v = svd.V();
            let mut y: Vec<c64> = (0..l).map(|i| v[(i, l - 1)]).collect();
            // fix the phase: largest entry real and positive
            if let Some(big) = y.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
                if big.norm() > 0.0 {
                    let phase = big.conj() / big.norm();
                    for yi in &mut y {
                        *yi *= phase;
                    }
                }
            }
            (smallest, y)
        };
        let denom = self.coefficient_norm();
        let rel = if denom > 0.0 { abs / denom } else { abs };
        Ok(Residual { abs, rel, y })
    }

    /// The same problem with its coefficients rewritten in another basis.
    ///
    /// Only monomial → Chebyshev and the identity are supported.
    pub fn to_basis(&self, target: BasisId) -> Result<Problem> {
        if target == self.basis {
            return Ok(self.clone());
        }
        if self.basis != BasisId::Monomial || target != BasisId::Chebyshev {
            return Err(Error::InvalidOption(format!(
                "conversion from {} to {} is not supported",
                self.basis, target
            )));
        }
        let kl = self.k * self.l;
        let mut out = self.clone();
        out.basis = target;
        for (eq_out, eq) in out.equations.iter_mut().zip(&self.equations) {
            let mut converted: Vec<Term> = Vec::new();
            for t in eq {
                // x^e = prod_i sum_k c_{e_i,k} T_k(x_i)
                let mut expansion: Vec<(f64, Vec<u32>)> = vec![(1.0, Vec::new())];
                for &p in t.support.as_slice() {
                    let coeffs = power_in_chebyshev(p);
                    let mut next = Vec::new();
                    for (w, e) in &expansion {
                        for (kdeg, &c) in coeffs.iter().enumerate() {
                            if c != 0.0 {
                                let mut f = e.clone();
                                f.push(kdeg as u32);
                                next.push((w * c, f));
                            }
                        }
                    }
                    expansion = next;
                }
                for (w, e) in expansion {
                    let e = Exponent::new(e);
                    let slot = match converted.iter().position(|c| c.support == e) {
                        Some(i) => i,
                        None => {
                            converted.push(Term {
                                support: e,
                                coefficient: vec![zero(); kl],
                            });
                            converted.len() - 1
                        }
                    };
                    for (a, b) in converted[slot].coefficient.iter_mut().zip(&t.coefficient) {
                        *a += b * w;
                    }
                }
            }
            *eq_out = converted;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub rel: f64,
    pub y: Vec<c64>,
}
