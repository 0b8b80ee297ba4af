//! Small embedded problem collection.

use faer::c64;
use serde::Serialize;

use crate::basis::BasisId;
use crate::error::{Error, Result};
use crate::generate;
use crate::problem::{Problem, ProblemKind};

/// Catalogue entry; the solution counts are reference values where known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: ProblemKind,
    /// Equation count (systems) or 1 (eigenvalue problems).
    pub s: usize,
    pub k: usize,
    pub l: usize,
    pub d: usize,
    pub m: usize,
    pub m_b: Option<usize>,
    pub m_a: Option<usize>,
}

const NAMES: &[&str] = &[
    "noon3",
    "noon4",
    "cyclic5",
    "katsura2",
    "katsura3",
    "katsura4",
    "katsura5",
    "katsura6",
    "katsura7",
    "conics",
    "double-root",
    "planted-mep",
    "hkp2-random",
];

pub fn names() -> &'static [&'static str] {
    NAMES
}

pub fn list() -> Vec<Entry> {
    NAMES.iter().map(|n| show(n).expect("listed problem exists")).collect()
}

pub fn show(name: &str) -> Result<Entry> {
    let p = load(name)?;
    let (m_b, m_a, description) = reference(name);
    let degrees = p.degrees();
    Ok(Entry {
        name: NAMES.iter().find(|n| **n == name).copied().expect("known name"),
        description,
        kind: p.kind(),
        s: p.num_equations(),
        k: p.k(),
        l: p.l(),
        d: degrees.into_iter().max().unwrap_or(0),
        m: p.m(),
        m_b,
        m_a,
    })
}

fn reference(name: &str) -> (Option<usize>, Option<usize>, &'static str) {
    match name {
        "noon3" => (Some(27), Some(21), "Noonburg neural network model, 3 neurons"),
        "noon4" => (Some(81), Some(73), "Noonburg neural network model, 4 neurons"),
        "cyclic5" => (Some(120), Some(70), "cyclic 5-roots"),
        "katsura2" => (Some(4), Some(4), "Katsura magnetism model, n = 2"),
        "katsura3" => (Some(8), Some(8), "Katsura magnetism model, n = 3"),
        "katsura4" => (Some(16), Some(16), "Katsura magnetism model, n = 4"),
        "katsura5" => (Some(32), Some(32), "Katsura magnetism model, n = 5"),
        "katsura6" => (Some(64), Some(64), "Katsura magnetism model, n = 6"),
        "katsura7" => (Some(128), Some(128), "Katsura magnetism model, n = 7"),
        "conics" => (Some(4), Some(4), "two generic real conics (seed 7)"),
        "double-root" => (Some(3), Some(3), "planted double root at (0.5, 0.25) and a simple root"),
        "planted-mep" => (
            None,
            Some(3),
            "2 x 1 two-parameter eigenvalue problem with three planted eigenvalues (seed 11)",
        ),
        "hkp2-random" => (Some(12), Some(12), "random quadratic 3 x 2 two-parameter eigenvalue problem (seed 5)"),
        _ => (None, None, ""),
    }
}

pub fn load(name: &str) -> Result<Problem> {
    let p = match name {
        "noon3" => noon(3),
        "noon4" => noon(4),
        "cyclic5" => cyclic(5),
        "conics" => generate::random_system(2, &[2, 2], &mut generate::rng(7), false),
        "double-root" => generate::planted_double_root(0.5, -1.0, 0.25, 2.0),
        "planted-mep" => {
            let pts = generate::random_points(3, &mut generate::rng(11));
            generate::stack_as_mep(&generate::planted_bivariate(&pts))
        }
        "hkp2-random" => generate::random_mep(2, 2, 3, 2, &mut generate::rng(5)),
        other => match other.strip_prefix("katsura").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if (2..=7).contains(&n) => katsura(n),
            _ => return Err(Error::UnknownProblem(name.to_string())),
        },
    };
    Ok(p)
}

fn r(v: f64) -> c64 {
    c64::new(v, 0.0)
}

fn unit(m: usize, i: usize, power: u32) -> Vec<u32> {
    let mut e = vec![0; m];
    e[i] = power;
    e
}

/// `x_i * sum_{j != i} x_j^2 - 1.1 x_i + 1 = 0` for every `i`.
pub fn noon(n: usize) -> Problem {
    let equations = (0..n)
        .map(|i| {
            let mut eq: Vec<(Vec<u32>, c64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let mut e = vec![0; n];
                    e[i] += 1;
                    e[j] += 2;
                    (e, r(1.0))
                })
                .collect();
            eq.push((unit(n, i, 1), r(-1.1)));
            eq.push((vec![0; n], r(1.0)));
            eq
        })
        .collect();
    Problem::system(equations, n, BasisId::Monomial).expect("valid system")
}

/// Elementary cyclic sums of length 1..n-1 and `x_1 ... x_n - 1`.
pub fn cyclic(n: usize) -> Problem {
    let mut equations = Vec::with_capacity(n);
    for len in 1..n {
        let eq = (0..n)
            .map(|start| {
                let mut e = vec![0; n];
                for t in 0..len {
                    e[(start + t) % n] += 1;
                }
                (e, r(1.0))
            })
            .collect();
        equations.push(eq);
    }
    equations.push(vec![(vec![1; n], r(1.0)), (vec![0; n], r(-1.0))]);
    Problem::system(equations, n, BasisId::Monomial).expect("valid system")
}

/// Katsura system in the `n + 1` unknowns `u_0, .., u_n`.
pub fn katsura(n: usize) -> Problem {
    let m = n + 1;
    // u_{-i} = u_i and u_i = 0 for i > n
    let index = |i: isize| -> Option<usize> {
        let a = i.unsigned_abs();
        (a <= n).then_some(a)
    };
    let mut equations = Vec::with_capacity(m);
    let mut linear: Vec<(Vec<u32>, c64)> = (0..m).map(|i| (unit(m, i, 1), r(if i == 0 { 1.0 } else { 2.0 }))).collect();
    linear.push((vec![0; m], r(-1.0)));
    equations.push(linear);
    for k in 0..n as isize {
        let mut eq: Vec<(Vec<u32>, c64)> = Vec::new();
        for l in -(n as isize)..=(n as isize) {
            if let (Some(a), Some(b)) = (index(l), index(k - l)) {
                let mut e = vec![0; m];
                e[a] += 1;
                e[b] += 1;
                eq.push((e, r(1.0)));
            }
        }
        eq.push((unit(m, k as usize, 1), r(-1.0)));
        equations.push(eq);
    }
    Problem::system(equations, m, BasisId::Monomial).expect("valid system")
}
