//! Monomial orders and polynomial bases.
//!
//! Every other module asks an [`OrderRule`] where a basis function sits and a
//! [`BasisRule`] what the product of two basis functions expands to. Swapping
//! either one changes the layout and the fill of the Macaulay matrix, never the
//! algorithm that consumes it.
//!
//! All orders here are graded: lower total degree precedes higher degree, and
//! positions are 1-based. Inside one degree block, monomials are listed in
//! ascending order of the respective comparator:
//!
//! * `grlex`: lexicographic with `x1 > x2 > ... > xm`.
//! * `grevlex`: reverse lexicographic, `a > b` iff the last nonzero entry of
//!   `a - b` is negative.
//! * `grinvlex`: inverse lexicographic, `a > b` iff the last nonzero entry of
//!   `a - b` is positive (lexicographic with the variables reversed).
//! * `grnlex`: negative lexicographic, `a > b` iff the first nonzero entry of
//!   `a - b` is negative.
//!
//! For two variables `x1^2 x2` lands at position 8 under `grinvlex` and at 9
//! under `grevlex`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use faer::c64;

use crate::error::{Error, Result};

/// Multi-index of powers, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(powers: Vec<u32>) -> Self {
        Exponent(powers)
    }

    pub fn zero(m: usize) -> Self {
        Exponent(vec![0; m])
    }

    /// The exponent of the single variable `x_{var+1}`.
    pub fn unit(m: usize, var: usize) -> Self {
        let mut e = vec![0; m];
        e[var] = 1;
        Exponent(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.len(), other.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

impl From<&[u32]> for Exponent {
    fn from(v: &[u32]) -> Self {
        Exponent(v.to_vec())
    }
}

impl std::ops::Index<usize> for Exponent {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn binomial(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return Err(Error::Overflow { n, k });
        }
    }
    Ok(acc as usize)
}

/// Number of exponents in `m` variables of total degree exactly `d`.
pub fn block_size(m: usize, d: usize) -> Result<usize> {
    assert!(m >= 1, "at least one variable");
    binomial(m + d - 1, m - 1)
}

/// Number of exponents in `m` variables of total degree at most `d`.
pub fn cumulative_size(m: usize, d: usize) -> Result<usize> {
    assert!(m >= 1, "at least one variable");
    binomial(m + d, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderId {
    #[default]
    Grevlex,
    Grlex,
    Grinvlex,
    Grnlex,
}

impl OrderId {
    pub const ALL: [OrderId; 4] = [
        OrderId::Grevlex,
        OrderId::Grlex,
        OrderId::Grinvlex,
        OrderId::Grnlex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderId::Grevlex => "grevlex",
            OrderId::Grlex => "grlex",
            OrderId::Grinvlex => "grinvlex",
            OrderId::Grnlex => "grnlex",
        }
    }
}

impl fmt::Display for OrderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grevlex" => Ok(OrderId::Grevlex),
            "grlex" => Ok(OrderId::Grlex),
            "grinvlex" => Ok(OrderId::Grinvlex),
            "grnlex" => Ok(OrderId::Grnlex),
            other => Err(Error::InvalidOption(format!("unknown order '{other}'"))),
        }
    }
}

/// A graded monomial order on exponents in `m` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderRule {
    pub id: OrderId,
    pub m: usize,
}

impl OrderRule {
    pub fn new(id: OrderId, m: usize) -> Self {
        assert!(m >= 1, "at least one variable");
        OrderRule { id, m }
    }

    /// Total order: degree first, then the order-specific tie break.
    pub fn compare(&self, a: &Exponent, b: &Exponent) -> Ordering {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| self.compare_same_degree(a.as_slice(), b.as_slice()))
    }

    fn compare_same_degree(&self, a: &[u32], b: &[u32]) -> Ordering {
        let diffs = a.iter().zip(b).map(|(&x, &y)| x as i64 - y as i64);
        match self.id {
            OrderId::Grlex => match diffs.into_iter().find(|&v| v != 0) {
                Some(v) if v > 0 => Ordering::Greater,
                Some(_) => Ordering::Less,
                None => Ordering::Equal,
            },
            OrderId::Grnlex => match diffs.into_iter().find(|&v| v != 0) {
                Some(v) if v < 0 => Ordering::Greater,
                Some(_) => Ordering::Less,
                None => Ordering::Equal,
            },
            OrderId::Grevlex => match diffs.rev().find(|&v| v != 0) {
                Some(v) if v < 0 => Ordering::Greater,
                Some(_) => Ordering::Less,
                None => Ordering::Equal,
            },
            OrderId::Grinvlex => match diffs.rev().find(|&v| v != 0) {
                Some(v) if v > 0 => Ordering::Greater,
                Some(_) => Ordering::Less,
                None => Ordering::Equal,
            },
        }
    }

    /// All exponents of total degree `d`, in ascending order.
    pub fn exponents_of_degree(&self, d: usize) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.m];
        compositions(d as u32, 0, &mut cur, &mut out);
        out.sort_by(|a, b| self.compare_same_degree(a.as_slice(), b.as_slice()));
        out
    }

    /// 1-based position of `e`.
    pub fn position(&self, e: &Exponent) -> Result<usize> {
        if e.len() != self.m {
            return Err(Error::SupportLengthMismatch {
                equation: 0,
                expected: self.m,
                found: e.len(),
            });
        }
        let d = e.degree();
        let before = if d == 0 {
            0
        } else {
            cumulative_size(self.m, d - 1)?
        };
        let mut cur = vec![0u32; self.m];
        let mut block = Vec::new();
        compositions(d as u32, 0, &mut cur, &mut block);
        let smaller = block
            .iter()
            .filter(|f| self.compare_same_degree(f.as_slice(), e.as_slice()) == Ordering::Less)
            .count();
        Ok(before + smaller + 1)
    }

    /// Inverse of [`OrderRule::position`].
    pub fn exponent_at(&self, index: usize) -> Result<Exponent> {
        if index < 1 {
            return Err(Error::IndexOutOfRange { index });
        }
        let mut d = 0;
        let mut before = 0;
        loop {
            let size = block_size(self.m, d)?;
            if index <= before + size {
                let block = self.exponents_of_degree(d);
                return Ok(block[index - before - 1].clone());
            }
            before += size;
            d += 1;
        }
    }
}

fn compositions(remaining: u32, var: usize, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
    if var + 1 == cur.len() {
        cur[var] = remaining;
        out.push(Exponent(cur.clone()));
        return;
    }
    for p in 0..=remaining {
        cur[var] = p;
        compositions(remaining - p, var + 1, cur, out);
    }
    cur[var] = 0;
}

/// Precomputed exponent ↔ position lookup up to some degree.
///
/// Indices handed out by the table are 0-based.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    order: OrderRule,
    exponents: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    block_starts: Vec<usize>,
}

impl MonomialTable {
    pub fn new(order: OrderRule, max_degree: usize) -> Self {
        let mut table = MonomialTable {
            order,
            exponents: Vec::new(),
            index: HashMap::new(),
            block_starts: vec![0],
        };
        table.extend_to(max_degree);
        table
    }

    pub fn order(&self) -> OrderRule {
        self.order
    }

    pub fn max_degree(&self) -> usize {
        self.block_starts.len() - 2
    }

    pub fn extend_to(&mut self, max_degree: usize) {
        let mut d = self.block_starts.len() - 1;
        while self.block_starts.len() < max_degree + 2 {
            for e in self.order.exponents_of_degree(d) {
                self.index.insert(e.clone(), self.exponents.len());
                self.exponents.push(e);
            }
            self.block_starts.push(self.exponents.len());
            d += 1;
        }
    }

    /// 0-based index, or `None` when the exponent is beyond the table.
    pub fn index_of(&self, e: &Exponent) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn exponent(&self, idx: usize) -> &Exponent {
        &self.exponents[idx]
    }

    /// Number of exponents of degree at most `d`.
    pub fn count_up_to(&self, d: usize) -> usize {
        self.block_starts[d + 1]
    }

    /// Index range of the exponents of degree exactly `d`.
    pub fn block(&self, d: usize) -> std::ops::Range<usize> {
        self.block_starts[d]..self.block_starts[d + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BasisId {
    #[default]
    Monomial,
    Chebyshev,
}

impl BasisId {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisId::Monomial => "monomial",
            BasisId::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BasisId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(BasisId::Monomial),
            "chebyshev" => Ok(BasisId::Chebyshev),
            other => Err(Error::InvalidOption(format!("unknown basis '{other}'"))),
        }
    }
}

/// Product rule and pointwise evaluation of a tensor-product polynomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisRule {
    pub id: BasisId,
}

impl BasisRule {
    pub fn new(id: BasisId) -> Self {
        BasisRule { id }
    }

    /// Expansion of `phi_a * phi_c` in the basis, duplicates merged, in
    /// first-occurrence order.
    pub fn shift_rule(&self, a: &Exponent, c: &Exponent) -> Vec<(f64, Exponent)> {
        assert_eq!(a.len(), c.len(), "exponent lengths differ");
        match self.id {
            BasisId::Monomial => vec![(1.0, a.add(c))],
            BasisId::Chebyshev => {
                // T_i T_j = (T_{i+j} + T_{|i-j|}) / 2, applied per variable.
                let mut terms: Vec<(f64, Vec<u32>)> = vec![(1.0, Vec::with_capacity(a.len()))];
                for (&i, &j) in a.as_slice().iter().zip(c.as_slice()) {
                    if i == 0 || j == 0 {
                        for t in &mut terms {
                            t.1.push(i + j);
                        }
                        continue;
                    }
                    let mut next = Vec::with_capacity(terms.len() * 2);
                    for (w, e) in terms {
                        let mut hi = e.clone();
                        hi.push(i + j);
                        let mut lo = e;
                        lo.push(i.abs_diff(j));
                        next.push((0.5 * w, hi));
                        next.push((0.5 * w, lo));
                    }
                    terms = next;
                }
                let mut merged: Vec<(f64, Exponent)> = Vec::with_capacity(terms.len());
                for (w, e) in terms {
                    let e = Exponent(e);
                    match merged.iter_mut().find(|(_, f)| *f == e) {
                        Some(slot) => slot.0 += w,
                        None => merged.push((w, e)),
                    }
                }
                merged
            }
        }
    }

    /// Value of the basis function `phi_e` at `x`.
    pub fn evaluate(&self, e: &Exponent, x: &[c64]) -> c64 {
        assert_eq!(e.len(), x.len());
        let mut acc = c64::new(1.0, 0.0);
        for (&p, &xi) in e.as_slice().iter().zip(x) {
            acc *= match self.id {
                BasisId::Monomial => xi.powu(p),
                BasisId::Chebyshev => chebyshev_t(p, xi),
            };
        }
        acc
    }
}

/// First-kind Chebyshev polynomial `T_n(x)` via the three-term recurrence.
pub fn chebyshev_t(n: u32, x: c64) -> c64 {
    let mut prev = c64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for _ in 1..n {
        let next = x * cur * 2.0 - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients `c_k` with `x^n = sum_k c_k T_k(x)`.
pub fn power_in_chebyshev(n: u32) -> Vec<f64> {
    let mut coef = vec![0.0; n as usize + 1];
    coef[0] = 1.0;
    for deg in 0..n as usize {
        // multiply by x = T_1: x T_0 = T_1, x T_k = (T_{k+1} + T_{k-1}) / 2
        let mut next = vec![0.0; n as usize + 1];
        for k in 0..=deg {
            let c = coef[k];
            if c == 0.0 {
                continue;
            }
            if k == 0 {
                next[1] += c;
            } else {
                next[k + 1] += 0.5 * c;
                next[k - 1] += 0.5 * c;
            }
        }
        coef = next;
    }
    coef
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent::from(v)
    }

    #[test]
    fn anchor_positions() {
        assert_eq!(OrderRule::new(OrderId::Grinvlex, 2).position(&e(&[2, 1])).unwrap(), 8);
        assert_eq!(OrderRule::new(OrderId::Grevlex, 2).position(&e(&[2, 1])).unwrap(), 9);
        for id in OrderId::ALL {
            assert_eq!(OrderRule::new(id, 4).position(&Exponent::zero(4)).unwrap(), 1);
        }
    }

    #[test]
    fn grevlex_three_variables_matches_enumeration() {
        // Oracle: list all 20 exponents of degree <= 3 and sort with an
        // explicit grevlex key, independent of compare_same_degree.
        let mut all = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                for c in 0..=3u32 {
                    if a + b + c <= 3 {
                        all.push([a, b, c]);
                    }
                }
            }
        }
        assert_eq!(all.len(), 20);
        // ascending grevlex: degree, then smaller last power is larger
        all.sort_by_key(|v| {
            let deg = v.iter().sum::<u32>();
            (deg, std::cmp::Reverse(v[2]), std::cmp::Reverse(v[1]))
        });
        let expected = all.iter().position(|v| *v == [1, 1, 1]).unwrap() + 1;
        let order = OrderRule::new(OrderId::Grevlex, 3);
        assert_eq!(order.position(&e(&[1, 1, 1])).unwrap(), expected);
        assert_eq!(expected, 15);
    }

    #[test]
    fn grinvlex_and_grnlex_differ_in_three_variables() {
        let inv = OrderRule::new(OrderId::Grinvlex, 3);
        let neg = OrderRule::new(OrderId::Grnlex, 3);
        let a = e(&[1, 0, 1]);
        let b = e(&[0, 2, 0]);
        assert_eq!(inv.compare(&a, &b), Ordering::Greater);
        assert_eq!(neg.compare(&a, &b), Ordering::Less);
    }

    #[test]
    fn exponent_at_rejects_zero() {
        let order = OrderRule::new(OrderId::Grlex, 2);
        assert_eq!(order.exponent_at(0), Err(Error::IndexOutOfRange { index: 0 }));
    }

    #[test]
    fn block_counts() {
        assert_eq!(cumulative_size(2, 3).unwrap(), 10);
        assert_eq!(block_size(1, 7).unwrap(), 1);
        assert_eq!(cumulative_size(1, 7).unwrap(), 8);
        let order = OrderRule::new(OrderId::Grevlex, 3);
        let enumerated: usize = (0..=4).map(|d| order.exponents_of_degree(d).len()).sum();
        assert_eq!(cumulative_size(3, 4).unwrap(), enumerated);
        assert_eq!(enumerated, 35);
        assert!(matches!(cumulative_size(200, 200), Err(Error::Overflow { .. })));
    }

    #[test]
    fn shift_rule_examples() {
        let mono = BasisRule::new(BasisId::Monomial);
        assert_eq!(mono.shift_rule(&e(&[1, 1]), &e(&[1, 0])), vec![(1.0, e(&[2, 1]))]);
        let cheb = BasisRule::new(BasisId::Chebyshev);
        assert_eq!(
            cheb.shift_rule(&e(&[1, 1]), &e(&[1, 0])),
            vec![(0.5, e(&[2, 1])), (0.5, e(&[0, 1]))]
        );
        assert_eq!(cheb.shift_rule(&e(&[0, 0]), &e(&[3, 2])), vec![(1.0, e(&[3, 2]))]);
        // T_1 T_1 = (T_2 + T_0)/2
        assert_eq!(cheb.shift_rule(&e(&[1]), &e(&[1])), vec![(0.5, e(&[2])), (0.5, e(&[0]))]);
    }

    #[test]
    fn chebyshev_values() {
        let v = chebyshev_t(2, c64::new(0.5, 0.0));
        assert!((v - c64::new(-0.5, 0.0)).norm() < 1e-15);
        let cheb = BasisRule::new(BasisId::Chebyshev);
        // phi'_21 = (2 x1^2 - 1) x2
        let x = [c64::new(0.3, 0.1), c64::new(-0.7, 0.2)];
        let direct = (x[0] * x[0] * 2.0 - 1.0) * x[1];
        assert!((cheb.evaluate(&e(&[2, 1]), &x) - direct).norm() < 1e-14);
    }

    #[test]
    fn power_conversion() {
        // x^3 = (3 T_1 + T_3) / 4
        assert_eq!(power_in_chebyshev(3), vec![0.0, 0.75, 0.0, 0.25]);
        assert_eq!(power_in_chebyshev(0), vec![1.0]);
    }

    #[test]
    fn table_agrees_with_position() {
        for id in OrderId::ALL {
            let order = OrderRule::new(id, 3);
            let table = MonomialTable::new(order, 4);
            for idx in 0..table.count_up_to(4) {
                let ex = table.exponent(idx);
                assert_eq!(order.position(ex).unwrap(), idx + 1);
                assert_eq!(table.index_of(ex), Some(idx));
            }
            assert_eq!(table.block(2), 4..10);
        }
    }

    fn arb_exponent(m: usize, max: u32) -> impl Strategy<Value = Exponent> {
        proptest::collection::vec(0..=max, m).prop_map(Exponent::new)
    }

    fn arb_order() -> impl Strategy<Value = OrderId> {
        prop::sample::select(OrderId::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn position_round_trip(id in arb_order(), ex in arb_exponent(3, 4)) {
            let order = OrderRule::new(id, 3);
            let pos = order.position(&ex).unwrap();
            prop_assert_eq!(order.exponent_at(pos).unwrap(), ex);
        }

        #[test]
        fn graded(id in arb_order(), a in arb_exponent(3, 3), b in arb_exponent(3, 3)) {
            let order = OrderRule::new(id, 3);
            if a.degree() < b.degree() {
                prop_assert!(order.position(&a).unwrap() < order.position(&b).unwrap());
            }
        }

        #[test]
        fn chebyshev_product_matches_pointwise(
            a in arb_exponent(2, 4),
            c in arb_exponent(2, 4),
            xs in proptest::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 2),
        ) {
            let cheb = BasisRule::new(BasisId::Chebyshev);
            let x: Vec<c64> = xs.iter().map(|&(r, i)| c64::new(r, i)).collect();
            let expansion: c64 = cheb
                .shift_rule(&a, &c)
                .iter()
                .map(|(w, f)| cheb.evaluate(f, &x) * *w)
                .sum();
            let product = cheb.evaluate(&a, &x) * cheb.evaluate(&c, &x);
            prop_assert!((expansion - product).norm() <= 1e-12 * (1.0 + product.norm()));
            let total: f64 = cheb.shift_rule(&a, &c).iter().map(|(w, _)| w.abs()).sum();
            prop_assert!((total - 1.0).abs() < 1e-15);
        }

        #[test]
        fn monomial_shift_associative(
            a in arb_exponent(3, 3), b in arb_exponent(3, 3), c in arb_exponent(3, 3),
        ) {
            let mono = BasisRule::new(BasisId::Monomial);
            let left = mono.shift_rule(&mono.shift_rule(&a, &b)[0].1, &c);
            let right = mono.shift_rule(&a, &mono.shift_rule(&b, &c)[0].1);
            prop_assert_eq!(left, right);
        }
    }
}
