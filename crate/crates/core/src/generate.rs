//! Seeded random and planted test problems.

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{BasisId, OrderId, OrderRule};
use crate::problem::Problem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[-1, 1]`.
pub fn real<R: Rng>(rng: &mut R) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

/// Real and imaginary parts uniform on `[-1, 1]`.
pub fn complex<R: Rng>(rng: &mut R) -> c64 {
    c64::new(real(rng), real(rng))
}

/// Every exponent of total degree at most `d` in `m` variables.
pub fn dense_support(m: usize, d: usize) -> Vec<Vec<u32>> {
    let order = OrderRule::new(OrderId::Grevlex, m);
    (0..=d)
        .flat_map(|k| order.exponents_of_degree(k))
        .map(|e| e.as_slice().to_vec())
        .collect()
}

/// Dense system with one equation per entry of `degrees` and uniform random
/// coefficients.
pub fn random_system<R: Rng>(m: usize, degrees: &[usize], rng: &mut R, complex_coefficients: bool) -> Problem {
    let equations = degrees
        .iter()
        .map(|&d| {
            dense_support(m, d)
                .into_iter()
                .map(|s| {
                    let c = if complex_coefficients {
                        complex(rng)
                    } else {
                        c64::new(real(rng), 0.0)
                    };
                    (s, c)
                })
                .collect()
        })
        .collect();
    Problem::system(equations, m, BasisId::Monomial).expect("valid random system")
}

/// Dense matrix polynomial of total degree `d` with random `k x l` coefficients.
pub fn random_mep<R: Rng>(m: usize, d: usize, k: usize, l: usize, rng: &mut R) -> Problem {
    let terms = dense_support(m, d)
        .into_iter()
        .map(|s| (s, (0..k * l).map(|_| complex(rng)).collect()))
        .collect();
    Problem::mep(terms, k, l, m, BasisId::Monomial).expect("valid random eigenvalue problem")
}

/// Polynomial in one variable with the given roots, as ascending coefficients.
pub fn poly_from_roots(roots: &[c64]) -> Vec<c64> {
    let mut coef = vec![c64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![c64::new(0.0, 0.0); coef.len() + 1];
        for (i, &c) in coef.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        coef = next;
    }
    coef
}

/// Ascending coefficients of the interpolating polynomial through `(a_i, b_i)`.
pub fn interpolate(a: &[c64], b: &[c64]) -> Vec<c64> {
    let n = a.len();
    let mut out = vec![c64::new(0.0, 0.0); n];
    for i in 0..n {
        let others: Vec<c64> = (0..n).filter(|&j| j != i).map(|j| a[j]).collect();
        let basis = poly_from_roots(&others);
        let denom: c64 = others.iter().map(|&aj| a[i] - aj).product();
        for (k, c) in basis.iter().enumerate() {
            out[k] += c * b[i] / denom;
        }
    }
    out
}

/// Bivariate system `prod (x1 - a_i) = 0`, `x2 = L(x1)` with `L(a_i) = b_i`.
///
/// Its affine solutions are exactly the points `(a_i, b_i)`; for three or
/// more points the remaining solutions lie at infinity.
pub fn planted_bivariate(points: &[[c64; 2]]) -> Problem {
    let a: Vec<c64> = points.iter().map(|p| p[0]).collect();
    let b: Vec<c64> = points.iter().map(|p| p[1]).collect();
    let first = poly_from_roots(&a)
        .into_iter()
        .enumerate()
        .map(|(k, c)| (vec![k as u32, 0], c))
        .collect();
    let mut second: Vec<(Vec<u32>, c64)> = vec![(vec![0, 1], c64::new(1.0, 0.0))];
    second.extend(
        interpolate(&a, &b)
            .into_iter()
            .enumerate()
            .map(|(k, c)| (vec![k as u32, 0], -c)),
    );
    Problem::system(vec![first, second], 2, BasisId::Monomial).expect("valid planted system")
}

/// Random planted points with well separated first coordinates.
pub fn random_points<R: Rng>(count: usize, rng: &mut R) -> Vec<[c64; 2]> {
    let mut pts: Vec<[c64; 2]> = Vec::with_capacity(count);
    while pts.len() < count {
        let p = [complex(rng), complex(rng)];
        if pts.iter().all(|q| (q[0] - p[0]).norm() > 0.2) {
            pts.push(p);
        }
    }
    pts
}

/// `(x1 - a)^2 (x1 - a') = 0`, `x2 = b + gamma (x1 - a)`: a double root at
/// `(a, b)` and a simple one at `(a', b + gamma (a' - a))`.
pub fn planted_double_root(a: f64, a2: f64, b: f64, gamma: f64) -> Problem {
    let r = |v: f64| c64::new(v, 0.0);
    let cubic = poly_from_roots(&[r(a), r(a), r(a2)])
        .into_iter()
        .enumerate()
        .map(|(k, c)| (vec![k as u32, 0], c))
        .collect();
    let line = vec![
        (vec![0, 1], r(1.0)),
        (vec![1, 0], r(-gamma)),
        (vec![0, 0], r(gamma * a - b)),
    ];
    Problem::system(vec![cubic, line], 2, BasisId::Monomial).expect("valid planted system")
}

/// The `s` equations of a system stacked into an `s x 1` matrix polynomial.
pub fn stack_as_mep(system: &Problem) -> Problem {
    let eqs = system.equations();
    let s = eqs.len();
    let mut terms: Vec<(Vec<u32>, Vec<c64>)> = Vec::new();
    for (j, eq) in eqs.iter().enumerate() {
        for t in eq {
            let support = t.support.as_slice().to_vec();
            let slot = match terms.iter().position(|(s2, _)| *s2 == support) {
                Some(i) => i,
                None => {
                    terms.push((support, vec![c64::new(0.0, 0.0); s]));
                    terms.len() - 1
                }
            };
            terms[slot].1[j] += t.coefficient[0];
        }
    }
    Problem::mep(terms, s, 1, system.m(), system.basis()).expect("stacked system is well determined")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_points_are_roots() {
        let mut g = rng(4);
        let pts = random_points(3, &mut g);
        let p = planted_bivariate(&pts);
        assert_eq!(p.degrees(), vec![3, 2]);
        for pt in &pts {
            assert!(p.residual(pt).unwrap().abs < 1e-12);
        }
    }

    #[test]
    fn double_root_construction() {
        let p = planted_double_root(0.5, -1.0, 0.25, 2.0);
        let r = |v: f64| c64::new(v, 0.0);
        assert!(p.residual(&[r(0.5), r(0.25)]).unwrap().abs < 1e-14);
        assert!(p.residual(&[r(-1.0), r(0.25 - 3.0)]).unwrap().abs < 1e-14);
    }

    #[test]
    fn stacked_system_keeps_roots() {
        let pts = random_points(2, &mut rng(8));
        let mep = stack_as_mep(&planted_bivariate(&pts));
        assert_eq!((mep.k(), mep.l()), (2, 1));
        for pt in &pts {
            assert!(mep.residual(pt).unwrap().abs < 1e-12);
        }
    }

    #[test]
    fn dense_counts() {
        assert_eq!(dense_support(2, 2).len(), 6);
        let p = random_system(2, &[2, 3], &mut rng(1), false);
        assert_eq!(p.equations()[1].len(), 10);
        let mep = random_mep(2, 2, 3, 2, &mut rng(1));
        assert_eq!(mep.equations()[0].len(), 6);
    }
}
