//! The full solve: enlarge, check the rank structure, realize, cluster and
//! evaluate residuals.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use faer::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{BasisId, OrderId};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::macaulay::MacaulayMatrix;
use crate::problem::Problem;
use crate::realization::{
    build_pencil_null, build_pencils_column, build_shift_maps, cluster, solve_multishift, LinearShift,
    MultishiftResult, ShiftPencil,
};
use crate::subspace::{
    analyze_columns, analyze_null, column_compress, nullspace, nullspace_recursive, stabilized, DegreeRecord,
    NullBasis, RankMode, RankStructure, Route,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Enlarge {
    Iterative,
    #[default]
    Recursive,
}

impl fmt::Display for Enlarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Enlarge::Iterative => "iterative",
            Enlarge::Recursive => "recursive",
        })
    }
}

impl FromStr for Enlarge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iterative" => Ok(Enlarge::Iterative),
            "recursive" => Ok(Enlarge::Recursive),
            other => Err(Error::InvalidOption(format!("unknown enlargement '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub route: Route,
    pub enlarge: Enlarge,
    pub rank_mode: RankMode,
    pub posdim: bool,
    pub cluster: bool,
    pub tol: f64,
    pub ctol: f64,
    pub maxdeg: usize,
    pub seed: u64,
    /// Basis to solve in; the problem is converted when it differs.
    pub basis: Option<BasisId>,
    pub order: OrderId,
    /// Surface singular values close to the threshold as errors.
    pub strict: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            route: Route::Null,
            enlarge: Enlarge::Recursive,
            rank_mode: RankMode::Block,
            posdim: false,
            cluster: true,
            tol: 1e-10,
            ctol: 1e-6,
            maxdeg: 25,
            seed: 42,
            basis: None,
            order: OrderId::Grevlex,
            strict: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidOption(format!("tol must be positive, got {}", self.tol)));
        }
        if self.ctol.is_nan() || self.ctol <= 0.0 {
            return Err(Error::InvalidOption(format!("ctol must be positive, got {}", self.ctol)));
        }
        if self.maxdeg < 1 {
            return Err(Error::InvalidOption("maxdeg must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub subspace_s: f64,
    pub realization_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub final_degree: usize,
    pub nullity: usize,
    /// Total solution count, known once the nullity has stabilized.
    pub m_b: Option<usize>,
    pub m_a: usize,
    pub gap_degree: usize,
    pub route: Route,
    pub enlarge: Enlarge,
    pub rank_mode: RankMode,
    pub basis: String,
    pub order: String,
    pub posdim: bool,
    pub seed: u64,
    /// Random shift as `[re, im]` pairs: constant first.
    pub shift: Vec<[f64; 2]>,
    pub infinite_dropped: usize,
    pub singular_rejected: usize,
    pub lower_residual: f64,
    pub history: Vec<DegreeRecord>,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    /// One tuple per affine eigenvalue; members of a cluster carry its center.
    pub points: Vec<Vec<c64>>,
    /// Tuples as read off the pencils, before clustering.
    pub raw_points: Vec<Vec<c64>>,
    pub g_values: Vec<c64>,
    pub eigenvectors: Vec<Vec<c64>>,
    pub residual_abs: Vec<f64>,
    pub residual_rel: Vec<f64>,
    /// Partition of the point indices.
    pub clusters: Vec<Vec<usize>>,
    pub cluster_id: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One point per cluster.
    pub fn distinct_points(&self) -> Vec<Vec<c64>> {
        self.clusters.iter().map(|c| self.points[c[0]].clone()).collect()
    }
}

enum Subspace {
    Null(NullBasis),
    Column,
}

/// Finds all affine solutions of `problem`.
pub fn solve(problem: &Problem, opts: &SolverOptions) -> Result<SolutionSet> {
    opts.validate()?;
    let start = Instant::now();
    let working = match opts.basis {
        Some(b) => problem.to_basis(b)?,
        None => problem.clone(),
    };
    let m = working.m();
    let d0 = working.max_degree().max(1);
    if d0 > opts.maxdeg {
        return Err(Error::DegreeCapExceeded { maxdeg: opts.maxdeg });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let g = LinearShift::random(m, &mut rng);
    let mut shifts = vec![g.clone()];
    shifts.extend((0..m).map(|i| LinearShift::variable(m, i)));

    let mut history: Vec<usize> = Vec::new();
    let mut records: Vec<DegreeRecord> = Vec::new();
    let mut previous_ma: Option<usize> = None;
    let mut mac = MacaulayMatrix::build(&working, d0, opts.order)?;
    let mut null: Option<NullBasis> = None;

    for d in d0..=opts.maxdeg {
        if d > d0 {
            match opts.enlarge {
                Enlarge::Iterative => mac = MacaulayMatrix::build(&working, d, opts.order)?,
                Enlarge::Recursive => mac.enlarge_in_place(d)?,
            }
        }
        let (subspace, nullity, column_rs) = match opts.route {
            Route::Null => {
                let z = match (opts.enlarge, null.take()) {
                    (Enlarge::Recursive, Some(prev)) => nullspace_recursive(&prev, &mac, opts.tol, opts.strict)?,
                    _ => nullspace(&mac, opts.tol, opts.strict)?,
                };
                let n = z.nullity();
                null = Some(z.clone());
                (Subspace::Null(z), n, None)
            }
            Route::Column => {
                let rs = analyze_columns(&mac, opts.rank_mode, opts.tol, opts.strict)?;
                (Subspace::Column, rs.nullity, Some(rs))
            }
        };
        history.push(nullity);
        let mut record = DegreeRecord {
            degree: d,
            p: mac.nrows(),
            q: mac.ncols(),
            nullity,
            increments: Vec::new(),
            gap: None,
        };
        if !stabilized(&history, opts.posdim) {
            records.push(record);
            continue;
        }
        let rs = match (&subspace, column_rs) {
            (Subspace::Null(z), _) => analyze_null(z, &mac, opts.rank_mode, opts.tol, opts.strict)?,
            (Subspace::Column, Some(rs)) => rs,
            (Subspace::Column, None) => unreachable!("column route always analyzes"),
        };
        record.increments = rs.increments.clone();
        record.gap = rs.gap_degree;
        records.push(record);
        if rs.gap_degree.is_none() {
            previous_ma = None;
            continue;
        }
        if opts.posdim && previous_ma != Some(rs.m_a) {
            previous_ma = Some(rs.m_a);
            continue;
        }
        let subspace_s = start.elapsed().as_secs_f64();
        let stage = Instant::now();
        let pencils = match &subspace {
            Subspace::Null(z) => null_pencils(z, &rs, &mac, &shifts)?,
            Subspace::Column => build_pencils_column(&mac, &rs, &shifts, opts.tol)?,
        };
        let result = solve_multishift(&pencils)?;
        let realization_s = stage.elapsed().as_secs_f64();
        let stable = matches!(history.as_slice(), [.., a, b] if a == b);
        let diagnostics = Diagnostics {
            final_degree: d,
            nullity,
            m_b: stable.then_some(nullity),
            m_a: rs.m_a,
            gap_degree: rs.gap_degree.unwrap_or(0),
            route: opts.route,
            enlarge: opts.enlarge,
            rank_mode: opts.rank_mode,
            basis: working.basis().to_string(),
            order: opts.order.to_string(),
            posdim: opts.posdim,
            seed: opts.seed,
            shift: std::iter::once(g.constant)
                .chain(g.coefficients.iter().copied())
                .map(|c| [c.re, c.im])
                .collect(),
            infinite_dropped: result.infinite,
            singular_rejected: result.singular,
            lower_residual: result.lower_residual,
            history: records,
            timings: Timings {
                subspace_s,
                realization_s,
                total_s: 0.0,
            },
        };
        let mut set = assemble(problem, result, opts, diagnostics)?;
        set.diagnostics.timings.total_s = start.elapsed().as_secs_f64();
        return Ok(set);
    }
    // growth over at least three degrees without ever settling; anything less
    // is just a cap set too low
    let ever_stable = history.windows(2).any(|w| w[0] == w[1]);
    if !ever_stable && history.len() >= 3 && !opts.posdim {
        Err(Error::PositiveDimensionalAffine { maxdeg: opts.maxdeg })
    } else {
        Err(Error::DegreeCapExceeded { maxdeg: opts.maxdeg })
    }
}

fn null_pencils(z: &NullBasis, rs: &RankStructure, mac: &MacaulayMatrix, shifts: &[LinearShift]) -> Result<Vec<ShiftPencil>> {
    let w11: CMat = column_compress(z, rs)?;
    let l = mac.problem().l();
    shifts
        .iter()
        .map(|s| {
            let maps = build_shift_maps(rs, s, mac.basis(), mac.table(), l)?;
            build_pencil_null(&w11, &maps, s)
        })
        .collect()
}

fn assemble(problem: &Problem, result: MultishiftResult, opts: &SolverOptions, diagnostics: Diagnostics) -> Result<SolutionSet> {
    let raw_points = result.points;
    let g_values = result.g_values;
    let (clusters, cluster_id, points) = if opts.cluster {
        let cs = cluster(&raw_points, &g_values, opts.ctol);
        let points = cs.assignments.iter().map(|&c| cs.centers[c].clone()).collect();
        (cs.members, cs.assignments, points)
    } else {
        let n = raw_points.len();
        ((0..n).map(|i| vec![i]).collect(), (0..n).collect(), raw_points.clone())
    };
    let mut eigenvectors = Vec::with_capacity(points.len());
    let mut residual_abs = Vec::with_capacity(points.len());
    let mut residual_rel = Vec::with_capacity(points.len());
    for x in &points {
        let res = problem.residual(x)?;
        eigenvectors.push(res.y);
        residual_abs.push(res.abs);
        residual_rel.push(res.rel);
    }
    Ok(SolutionSet {
        points,
        raw_points,
        g_values,
        eigenvectors,
        residual_abs,
        residual_rel,
        clusters,
        cluster_id,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> c64 {
        c64::new(v, 0.0)
    }

    fn circle_line() -> Problem {
        Problem::system(
            vec![
                vec![(vec![2, 0], r(1.0)), (vec![0, 2], r(1.0)), (vec![0, 0], r(-1.0))],
                vec![(vec![1, 0], r(1.0)), (vec![0, 1], r(-1.0))],
            ],
            2,
            BasisId::Monomial,
        )
        .unwrap()
    }

    #[test]
    fn circle_and_diagonal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for route in [Route::Null, Route::Column] {
            for enlarge in [Enlarge::Iterative, Enlarge::Recursive] {
                let opts = SolverOptions {
                    route,
                    enlarge,
                    ..Default::default()
                };
                let sol = solve(&circle_line(), &opts).unwrap();
                assert_eq!(sol.len(), 2);
                assert_eq!(sol.diagnostics.m_a, 2);
                for x in &sol.points {
                    assert!((x[0].re.abs() - h).abs() < 1e-10 && (x[0] - x[1]).norm() < 1e-10);
                }
                assert!(sol.residual_abs.iter().all(|&v| v < 1e-12));
                assert_eq!(sol.eigenvectors, vec![vec![r(1.0)]; 2]);
            }
        }
    }

    #[test]
    fn univariate_roots() {
        // (x - 1)(x - 2)(x + 3)
        let p = Problem::system(
            vec![vec![(vec![3], r(1.0)), (vec![1], r(-7.0)), (vec![0], r(6.0))]],
            1,
            BasisId::Monomial,
        )
        .unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        let mut xs: Vec<f64> = sol.points.iter().map(|x| x[0].re).collect();
        xs.sort_by(f64::total_cmp);
        for (a, b) in xs.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_options_are_rejected() {
        let bad = SolverOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(solve(&circle_line(), &bad), Err(Error::InvalidOption(_))));
    }

    #[test]
    fn positive_dimensional_problem_is_detected() {
        // x1 * x2 = 0 twice: a union of two lines
        let eq = vec![(vec![1, 1], r(1.0))];
        let p = Problem::system(vec![eq.clone(), eq], 2, BasisId::Monomial).unwrap();
        let opts = SolverOptions {
            maxdeg: 6,
            ..Default::default()
        };
        assert_eq!(solve(&p, &opts), Err(Error::PositiveDimensionalAffine { maxdeg: 6 }));
    }

    #[test]
    fn degree_cap_below_problem_degree() {
        let opts = SolverOptions {
            maxdeg: 1,
            ..Default::default()
        };
        assert_eq!(solve(&circle_line(), &opts), Err(Error::DegreeCapExceeded { maxdeg: 1 }));
    }
}
