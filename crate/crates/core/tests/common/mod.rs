#![allow(dead_code)]

use std::collections::BTreeMap;

use faer::{c64, Mat};
use macaulay::{BasisId, Problem};

pub fn zero() -> c64 {
    c64::new(0.0, 0.0)
}

fn distance(a: &[c64], b: &[c64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Largest distance after pairing every point of `a` with its nearest unused
/// point of `b`, closest pairs first; `None` when the sizes differ.
pub fn pairing_distance(a: &[Vec<c64>], b: &[Vec<c64>]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push((distance(x, y), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    Some(worst)
}

/// Ascending coefficient vectors.
pub fn poly_mul(a: &[c64], b: &[c64]) -> Vec<c64> {
    let mut out = vec![zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_sub(a: &[c64], b: &[c64]) -> Vec<c64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(zero()) - b.get(i).copied().unwrap_or(zero()))
        .collect()
}

pub fn poly_eval(p: &[c64], x: c64) -> c64 {
    p.iter().rev().fold(zero(), |acc, c| acc * x + c)
}

/// Roots as eigenvalues of the companion matrix.
pub fn poly_roots(p: &[c64]) -> Vec<c64> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    let n = p.len() - 1;
    let lead = p[n];
    let companion = Mat::<c64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -p[i] / lead
        } else if i == j + 1 {
            c64::new(1.0, 0.0)
        } else {
            zero()
        }
    });
    companion.eigenvalues().expect("companion eigenvalues")
}

/// Common roots of two conics by eliminating `x2` with the resultant of two
/// quadratics, then recovering `x2` from the equation linear in it.
pub fn conic_roots(p: &Problem) -> Vec<Vec<c64>> {
    assert_eq!((p.num_equations(), p.m()), (2, 2));
    let coef = |j: usize, e: [u32; 2]| {
        p.equations()[j]
            .iter()
            .find(|t| t.support.as_slice() == e)
            .map_or(zero(), |t| t.coefficient[0])
    };
    // f_j = a_j x2^2 + b_j(x1) x2 + c_j(x1)
    let a: Vec<Vec<c64>> = (0..2).map(|j| vec![coef(j, [0, 2])]).collect();
    let b: Vec<Vec<c64>> = (0..2).map(|j| vec![coef(j, [0, 1]), coef(j, [1, 1])]).collect();
    let c: Vec<Vec<c64>> = (0..2).map(|j| vec![coef(j, [0, 0]), coef(j, [1, 0]), coef(j, [2, 0])]).collect();
    let ac = poly_sub(&poly_mul(&a[0], &c[1]), &poly_mul(&a[1], &c[0]));
    let ab = poly_sub(&poly_mul(&a[0], &b[1]), &poly_mul(&a[1], &b[0]));
    let bc = poly_sub(&poly_mul(&b[0], &c[1]), &poly_mul(&b[1], &c[0]));
    let resultant = poly_sub(&poly_mul(&ac, &ac), &poly_mul(&ab, &bc));
    poly_roots(&resultant)
        .into_iter()
        .map(|x1| {
            // a_2 f_1 - a_1 f_2 = -(ab x2 + ac) is linear in x2
            let x2 = -poly_eval(&ac, x1) / poly_eval(&ab, x1);
            vec![x1, x2]
        })
        .collect()
}

type Poly = BTreeMap<Vec<u32>, c64>;

fn sparse_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(zero()) += ca * cb;
        }
    }
    out
}

/// The system of all maximal (`l x l`, here `2 x 2`) minors of a `k x 2`
/// monomial-basis matrix polynomial; it vanishes exactly where the matrix
/// loses rank.
pub fn two_column_minors(p: &Problem) -> Problem {
    assert_eq!(p.l(), 2);
    assert_eq!(p.basis(), BasisId::Monomial);
    let k = p.k();
    let entry = |r: usize, c: usize| -> Poly {
        p.equations()[0]
            .iter()
            .map(|t| (t.support.as_slice().to_vec(), t.coefficient[r * 2 + c]))
            .collect()
    };
    let mut equations = Vec::new();
    for r1 in 0..k {
        for r2 in r1 + 1..k {
            let mut minor = sparse_mul(&entry(r1, 0), &entry(r2, 1));
            for (e, v) in sparse_mul(&entry(r1, 1), &entry(r2, 0)) {
                *minor.entry(e).or_insert(zero()) -= v;
            }
            equations.push(minor.into_iter().collect());
        }
    }
    Problem::system(equations, p.m(), BasisId::Monomial).expect("minor system")
}
