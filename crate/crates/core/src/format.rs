//! Line-oriented text format for problems (`.mlp`).
//!
//! ```text
//! mlp 1
//! kind system
//! vars 2
//! basis monomial
//! eqs 1
//! poly 1 terms 2
//! 1 0 1.0 0.0
//! 0 0 -1.0 0.0
//! ```
//!
//! An eigenvalue problem replaces the equation section by `size k l`,
//! `terms t` and, per term, `support i_1 .. i_m` followed by `k` rows of `l`
//! `(re,im)` pairs.

use std::fmt::Write as _;

use faer::c64;

use crate::basis::BasisId;
use crate::error::{Error, Result};
use crate::problem::{Problem, ProblemKind};
use crate::solver::SolutionSet;

const VERSION: u32 = 1;

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a problem; coefficients carry 17 significant digits so parsing the
/// text reproduces them exactly.
pub fn serialize_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mlp {VERSION}");
    let _ = writeln!(out, "kind {}", p.kind());
    let _ = writeln!(out, "vars {}", p.m());
    let _ = writeln!(out, "basis {}", p.basis());
    match p.kind() {
        ProblemKind::System => {
            let _ = writeln!(out, "eqs {}", p.num_equations());
            for (j, eq) in p.equations().iter().enumerate() {
                let _ = writeln!(out, "poly {} terms {}", j + 1, eq.len());
                for t in eq {
                    let support: Vec<String> = t.support.as_slice().iter().map(|v| v.to_string()).collect();
                    let c = t.coefficient[0];
                    let _ = writeln!(out, "{} {} {}", support.join(" "), fmt_real(c.re), fmt_real(c.im));
                }
            }
        }
        ProblemKind::Mep => {
            let (k, l) = (p.k(), p.l());
            let eq = &p.equations()[0];
            let _ = writeln!(out, "size {k} {l}");
            let _ = writeln!(out, "terms {}", eq.len());
            for t in eq {
                let support: Vec<String> = t.support.as_slice().iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "support {}", support.join(" "));
                for r in 0..k {
                    let row: Vec<String> = (0..l)
                        .map(|c| {
                            let v = t.coefficient[r * l + c];
                            format!("({},{})", fmt_real(v.re), fmt_real(v.im))
                        })
                        .collect();
                    let _ = writeln!(out, "{}", row.join(" "));
                }
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Lines {
            inner: it.peekable(),
            last: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l.split_whitespace().collect()))
            }
            None => Err(Error::Format {
                line: self.last + 1,
                message: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    /// Next line must be `<keyword> <value...>`; returns the values.
    fn keyword(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>)> {
        let (n, toks) = self.next(keyword)?;
        if toks.first() != Some(&keyword) {
            return Err(bad(n, format!("expected '{keyword}', found '{}'", toks.join(" "))));
        }
        Ok((n, toks[1..].to_vec()))
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn one<'a>(line: usize, toks: &[&'a str], what: &str) -> Result<&'a str> {
    match toks {
        [v] => Ok(v),
        _ => Err(bad(line, format!("expected a single {what}"))),
    }
}

fn int(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| bad(line, format!("invalid integer '{tok}'")))
}

fn real(line: usize, tok: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| bad(line, format!("invalid number '{tok}'")))
}

fn pair(line: usize, tok: &str) -> Result<c64> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| bad(line, format!("expected (re,im), found '{tok}'")))?;
    let (re, im) = inner
        .split_once(',')
        .ok_or_else(|| bad(line, format!("expected (re,im), found '{tok}'")))?;
    Ok(c64::new(real(line, re.trim())?, real(line, im.trim())?))
}

/// Parse the `.mlp` text format.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut lines = Lines::new(text);
    let (n, v) = lines.keyword("mlp")?;
    let version = one(n, &v, "version")?;
    if version.parse::<u32>() != Ok(VERSION) {
        return Err(Error::Version {
            found: version.to_string(),
        });
    }
    let (n, v) = lines.keyword("kind")?;
    let kind = match one(n, &v, "kind")? {
        "system" => ProblemKind::System,
        "mep" => ProblemKind::Mep,
        other => return Err(bad(n, format!("unknown kind '{other}'"))),
    };
    let (n, v) = lines.keyword("vars")?;
    let m = int(n, one(n, &v, "variable count")?)?;
    if m == 0 {
        return Err(bad(n, "at least one variable is required"));
    }
    let (n, v) = lines.keyword("basis")?;
    let basis: BasisId = one(n, &v, "basis")?
        .parse()
        .map_err(|e: Error| bad(n, e.to_string()))?;

    let problem = match kind {
        ProblemKind::System => {
            let (n, v) = lines.keyword("eqs")?;
            let s = int(n, one(n, &v, "equation count")?)?;
            let mut equations = Vec::with_capacity(s);
            for j in 1..=s {
                let (n, v) = lines.keyword("poly")?;
                if v.len() != 3 || v[1] != "terms" {
                    return Err(bad(n, "expected 'poly <j> terms <t>'"));
                }
                if int(n, v[0])? != j {
                    return Err(bad(n, format!("expected equation {j}")));
                }
                let t = int(n, v[2])?;
                let mut terms = Vec::with_capacity(t);
                for _ in 0..t {
                    let (n, toks) = lines.next("term")?;
                    if toks.len() != m + 2 {
                        return Err(bad(n, format!("expected {m} exponents and a complex coefficient")));
                    }
                    let support = toks[..m]
                        .iter()
                        .map(|t| int(n, t).map(|v| v as u32))
                        .collect::<Result<Vec<u32>>>()?;
                    let c = c64::new(real(n, toks[m])?, real(n, toks[m + 1])?);
                    terms.push((support, c));
                }
                equations.push(terms);
            }
            let last = lines.last;
            Problem::system(equations, m, basis).map_err(|e| bad(last, e.to_string()))?
        }
        ProblemKind::Mep => {
            let (n, v) = lines.keyword("size")?;
            if v.len() != 2 {
                return Err(bad(n, "expected 'size <k> <l>'"));
            }
            let (k, l) = (int(n, v[0])?, int(n, v[1])?);
            if k == 0 || l == 0 {
                return Err(bad(n, "matrix dimensions must be positive"));
            }
            let size_line = n;
            let (n, v) = lines.keyword("terms")?;
            let t = int(n, one(n, &v, "term count")?)?;
            let mut terms = Vec::with_capacity(t);
            for _ in 0..t {
                let (n, v) = lines.keyword("support")?;
                if v.len() != m {
                    return Err(bad(n, format!("expected {m} exponents")));
                }
                let support = v
                    .iter()
                    .map(|t| int(n, t).map(|v| v as u32))
                    .collect::<Result<Vec<u32>>>()?;
                let mut coef = Vec::with_capacity(k * l);
                for _ in 0..k {
                    let (n, toks) = lines.next("matrix row")?;
                    if toks.len() != l {
                        return Err(bad(n, format!("expected {l} (re,im) entries")));
                    }
                    for tok in toks {
                        coef.push(pair(n, tok)?);
                    }
                }
                terms.push((support, coef));
            }
            Problem::mep(terms, k, l, m, basis).map_err(|e| bad(size_line, e.to_string()))?
        }
    };
    if let Some((n, _)) = lines.inner.next() {
        return Err(bad(n, "trailing content after the last term"));
    }
    Ok(problem)
}

/// Solution table: one row per point, columns
/// `re_x1,im_x1,..,re_xm,im_xm,res_abs,res_rel,cluster_id` (cluster ids from 1).
pub fn solutions_csv(set: &SolutionSet, m: usize) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = (1..=m).flat_map(|i| [format!("re_x{i}"), format!("im_x{i}")]).collect();
    header.extend(["res_abs".into(), "res_rel".into(), "cluster_id".into()]);
    let _ = writeln!(out, "{}", header.join(","));
    for (i, x) in set.points.iter().enumerate() {
        let mut row: Vec<String> = x.iter().flat_map(|c| [fmt_real(c.re), fmt_real(c.im)]).collect();
        row.push(fmt_real(set.residual_abs[i]));
        row.push(fmt_real(set.residual_rel[i]));
        row.push((set.cluster_id[i] + 1).to_string());
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Exponent;

    fn r(v: f64) -> c64 {
        c64::new(v, 0.0)
    }

    #[allow(clippy::excessive_precision)]
    fn conics() -> Problem {
        Problem::system(
            vec![
                vec![
                    (vec![2, 0], r(0.1234567890123456789)),
                    (vec![1, 1], r(-1.0 / 3.0)),
                    (vec![0, 2], c64::new(2.5, 1e-300)),
                    (vec![1, 0], r(7.0)),
                    (vec![0, 1], r(-0.0)),
                    (vec![0, 0], r(f64::MIN_POSITIVE)),
                ],
                vec![(vec![2, 0], r(1.0)), (vec![0, 2], r(1.0)), (vec![0, 0], r(-1.0))],
            ],
            2,
            BasisId::Monomial,
        )
        .unwrap()
    }

    fn bitwise_equal(a: &Problem, b: &Problem) -> bool {
        a.equations().iter().zip(b.equations()).all(|(x, y)| {
            x.len() == y.len()
                && x.iter().zip(y).all(|(s, t)| {
                    s.support == t.support
                        && s.coefficient.iter().zip(&t.coefficient).all(|(u, v)| {
                            u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()
                        })
                })
        })
    }

    #[test]
    fn system_round_trip() {
        let p = conics();
        let text = serialize_problem(&p);
        let q = parse_problem(&text).unwrap();
        assert_eq!(p, q);
        assert!(bitwise_equal(&p, &q));
        assert_eq!(serialize_problem(&q), text);
    }

    #[test]
    fn mep_round_trip() {
        let a: Vec<c64> = (0..6).map(|i| c64::new(i as f64 / 7.0, -(i as f64) / 11.0)).collect();
        let p = Problem::mep(
            vec![(vec![2, 0], a.clone()), (vec![0, 1], a.iter().map(|v| v * 3.0).collect()), (vec![0, 0], a)],
            3,
            2,
            2,
            BasisId::Chebyshev,
        )
        .unwrap();
        let text = serialize_problem(&p);
        let q = parse_problem(&text).unwrap();
        assert!(bitwise_equal(&p, &q));
        assert_eq!(q.basis(), BasisId::Chebyshev);
        assert_eq!((q.k(), q.l()), (3, 2));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\nmlp 1\n\nkind system # trailing\nvars 1\nbasis monomial\neqs 1\npoly 1 terms 2\n1 1.0 0\n0 -1 0\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.equations()[0][0].support, Exponent::new(vec![1]));
    }

    #[test]
    fn version_and_format_errors() {
        assert_eq!(parse_problem("mlp 2\n"), Err(Error::Version { found: "2".into() }));
        let err = parse_problem("mlp 1\nkind system\nvars 2\nbasis monomial\neqs 1\npoly 1 terms 1\n1 0 abc 0\n").unwrap_err();
        assert_eq!(
            err,
            Error::Format {
                line: 7,
                message: "invalid number 'abc'".into()
            }
        );
        let err = parse_problem("mlp 1\nkind system\nvars 2\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 4, .. }));
    }

    #[test]
    fn underdetermined_mep_is_a_format_error() {
        let text = "mlp 1\nkind mep\nvars 2\nbasis monomial\nsize 2 2\nterms 1\nsupport 0 0\n(1,0) (0,0)\n(0,0) (1,0)\n";
        match parse_problem(text) {
            Err(Error::Format { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("k = 2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solution_table_layout() {
        let line = vec![(vec![1, 0], r(1.0)), (vec![0, 1], r(-1.0))];
        let circle = vec![(vec![2, 0], r(1.0)), (vec![0, 2], r(1.0)), (vec![0, 0], r(-1.0))];
        let p = Problem::system(vec![circle, line], 2, BasisId::Monomial).unwrap();
        let set = crate::solver::solve(&p, &Default::default()).unwrap();
        let csv = solutions_csv(&set, 2);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re_x1,im_x1,re_x2,im_x2,res_abs,res_rel,cluster_id");
        assert_eq!(lines.len(), 3);
        for row in &lines[1..] {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields.len(), 7);
            let x1: f64 = fields[0].parse().unwrap();
            assert!((x1.abs() - 0.5f64.sqrt()).abs() < 1e-10);
            assert!(fields[4].parse::<f64>().unwrap() < 1e-10);
        }
        assert_eq!(csv, solutions_csv(&crate::solver::solve(&p, &Default::default()).unwrap(), 2));
    }
}
