//! Performance profiles over a problems x solvers table of run times.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const DEFAULT_TAU_MAX: f64 = 64.0;
pub const DEFAULT_GRID_POINTS: usize = 61;

/// `None` marks a failed run (timeout or solver error).
pub type Times = Vec<Vec<Option<f64>>>;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub times: Times,
    /// Time over the best time of the same problem; infinite for failures.
    /// Rows where every solver failed are left out.
    pub ratios: Vec<Vec<f64>>,
    /// Input rows that were dropped because no solver finished them.
    pub excluded: Vec<usize>,
    pub warnings: Vec<Error>,
    pub tau: Vec<f64>,
    /// `curves[j][t]` is the profile of solver `j` at `tau[t]`.
    pub curves: Vec<Vec<f64>>,
}

/// `points` log-spaced values from 1 to `tau_max`, both included.
pub fn tau_grid(tau_max: f64, points: usize) -> Vec<f64> {
    if points < 2 || tau_max <= 1.0 {
        return vec![1.0];
    }
    let top = tau_max.log2();
    (0..points)
        .map(|k| {
            if k + 1 == points {
                tau_max
            } else {
                (top * k as f64 / (points - 1) as f64).exp2()
            }
        })
        .collect()
}

pub fn performance_profile(times: &[Vec<Option<f64>>], tau_max: f64, points: usize) -> Result<ProfileTable> {
    let solvers = times.first().map_or(0, |r| r.len());
    if solvers == 0 {
        return Err(Error::DimensionMismatch("timing table has no solver columns".into()));
    }
    if tau_max.is_nan() || tau_max < 1.0 {
        return Err(Error::InvalidOption(format!("tau_max must be at least 1, got {tau_max}")));
    }
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for (i, row) in times.iter().enumerate() {
        if row.len() != solvers {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {solvers}",
                i + 1,
                row.len()
            )));
        }
        if let Some(t) = row.iter().flatten().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidOption(format!("row {}: time {t} is not a positive number", i + 1)));
        }
        let best = row.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        if best.is_infinite() {
            excluded.push(i);
            warnings.push(Error::AllFailRow { row: i + 1 });
            continue;
        }
        ratios.push(row.iter().map(|t| t.map_or(f64::INFINITY, |t| t / best)).collect());
    }
    let tau = tau_grid(tau_max, points);
    let curves = (0..solvers).map(|j| tau.iter().map(|&t| fraction(&ratios, j, t)).collect()).collect();
    Ok(ProfileTable {
        times: times.to_vec(),
        ratios,
        excluded,
        warnings,
        tau,
        curves,
    })
}

fn fraction(ratios: &[Vec<f64>], j: usize, tau: f64) -> f64 {
    if ratios.is_empty() {
        return 0.0;
    }
    ratios.iter().filter(|r| r[j] <= tau).count() as f64 / ratios.len() as f64
}

impl ProfileTable {
    pub fn solvers(&self) -> usize {
        self.curves.len()
    }

    /// Profile of solver `j` at an arbitrary `tau`.
    pub fn rho(&self, j: usize, tau: f64) -> f64 {
        fraction(&self.ratios, j, tau)
    }

    /// `tau,<name_1>,..` followed by one row per grid point.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("tau");
        for j in 0..self.solvers() {
            out.push(',');
            out.push_str(names.get(j).map_or("", |s| s.as_str()));
        }
        out.push('\n');
        for (t, tau) in self.tau.iter().enumerate() {
            let _ = write!(out, "{tau:.6}");
            for curve in &self.curves {
                let _ = write!(out, ",{:.6}", curve[t]);
            }
            out.push('\n');
        }
        out
    }
}

/// Reads `problem,<solver>,..` with one row per problem; cells hold a time in
/// seconds or `FAIL`.
pub fn parse_times_csv(text: &str) -> Result<(Vec<String>, Vec<String>, Times)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or(Error::Format {
        line: 1,
        message: "empty timing table".into(),
    })?;
    let solvers: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
    if solvers.is_empty() {
        return Err(Error::Format {
            line: 1,
            message: "header names no solver".into(),
        });
    }
    let mut problems = Vec::new();
    let mut times = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if fields.len() != solvers.len() + 1 {
            return Err(Error::Format {
                line,
                message: format!("expected {} fields, found {}", solvers.len() + 1, fields.len()),
            });
        }
        problems.push(fields[0].to_string());
        let row = fields[1..]
            .iter()
            .map(|f| {
                if f.eq_ignore_ascii_case("fail") {
                    Ok(None)
                } else {
                    f.parse::<f64>().map(Some).map_err(|_| Error::Format {
                        line,
                        message: format!("bad time '{f}'"),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        times.push(row);
    }
    Ok((solvers, problems, times))
}

/// Inverse of [`parse_times_csv`].
pub fn times_csv(solvers: &[String], problems: &[String], times: &[Vec<Option<f64>>]) -> String {
    let mut out = format!("problem,{}\n", solvers.join(","));
    for (name, row) in problems.iter().zip(times) {
        out.push_str(name);
        for t in row {
            match t {
                Some(t) => {
                    let _ = write!(out, ",{t:.6e}");
                }
                None => out.push_str(",FAIL"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(rows: &[&[f64]]) -> Times {
        rows.iter()
            .map(|r| r.iter().map(|&t| if t.is_nan() { None } else { Some(t) }).collect())
            .collect()
    }

    #[test]
    fn two_by_two() {
        let p = performance_profile(&table(&[&[1.0, 2.0], &[2.0, 1.0]]), DEFAULT_TAU_MAX, DEFAULT_GRID_POINTS).unwrap();
        assert_eq!(p.rho(0, 1.0), 0.5);
        assert_eq!(p.rho(0, 2.0), 1.0);
        assert_eq!(p.rho(1, 1.0), 0.5);
        assert_eq!(p.rho(1, 2.0), 1.0);
        assert_eq!(p.ratios, vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        // 2 is on the default grid
        let at2 = p.tau.iter().position(|&t| t == 2.0).unwrap();
        assert_eq!(p.curves[0][at2], 1.0);
        assert_eq!(p.curves[0][0], 0.5);
    }

    #[test]
    fn failure_plateau() {
        let nan = f64::NAN;
        let t = table(&[&[1.0, 1.5], &[1.0, nan], &[3.0, 1.0], &[1.0, 1.0]]);
        let p = performance_profile(&t, 64.0, 61).unwrap();
        assert_eq!(*p.curves[1].last().unwrap(), 0.75);
        assert_eq!(*p.curves[0].last().unwrap(), 1.0);
    }

    #[test]
    fn single_solver() {
        let nan = f64::NAN;
        let p = performance_profile(&table(&[&[2.0], &[nan], &[5.0], &[1.0]]), 64.0, 10).unwrap();
        // the failed row is excluded, every other row is solved at ratio 1
        assert!(p.curves[0].iter().all(|&r| r == 1.0));
        assert_eq!(p.excluded, vec![1]);
    }

    #[test]
    fn all_fail_row_warns() {
        let nan = f64::NAN;
        let p = performance_profile(&table(&[&[nan, nan], &[1.0, 2.0]]), 64.0, 5).unwrap();
        assert_eq!(p.excluded, vec![0]);
        assert_eq!(p.warnings, vec![Error::AllFailRow { row: 1 }]);
        assert_eq!(p.ratios.len(), 1);
        assert_eq!(p.rho(1, 1.0), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(performance_profile(&table(&[&[1.0, 2.0], &[1.0]]), 64.0, 5).is_err());
        assert!(performance_profile(&table(&[&[-1.0]]), 64.0, 5).is_err());
        assert!(performance_profile(&[], 64.0, 5).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = tau_grid(64.0, 61);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), 64.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g[10], 2.0);
    }

    #[test]
    fn csv_round_trip() {
        let text = "problem,a,b\n# comment\nnoon3,1.5,FAIL\ncyclic5, 2 ,3\n";
        let (solvers, problems, times) = parse_times_csv(text).unwrap();
        assert_eq!(solvers, vec!["a", "b"]);
        assert_eq!(problems, vec!["noon3", "cyclic5"]);
        assert_eq!(times, vec![vec![Some(1.5), None], vec![Some(2.0), Some(3.0)]]);
        let again = parse_times_csv(&times_csv(&solvers, &problems, &times)).unwrap();
        assert_eq!(again, (solvers, problems, times));
        match parse_times_csv("problem,a\nx,zz\n") {
            Err(Error::Format { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_csv_shape() {
        let p = performance_profile(&table(&[&[1.0, 2.0]]), 4.0, 3).unwrap();
        let csv = p.to_csv(&["a".into(), "b".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tau,a,b");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "4.000000,1.000000,1.000000");
    }

    fn cell() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![1 => Just(None), 4 => (1e-3f64..1e3).prop_map(Some)]
    }

    proptest! {
        #[test]
        fn curves_are_monotone_fractions(
            (rows, cols) in (1usize..8, 1usize..5),
            seed in proptest::collection::vec(cell(), 40),
        ) {
            let times: Times = (0..rows).map(|i| (0..cols).map(|j| seed[(i * cols + j) % seed.len()]).collect()).collect();
            let p = performance_profile(&times, 64.0, 33).unwrap();
            let kept = rows - p.excluded.len();
            for (j, curve) in p.curves.iter().enumerate() {
                prop_assert!(curve.iter().all(|&r| (0.0..=1.0).contains(&r)));
                prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
                if kept > 0 {
                    let solved = p.ratios.iter().filter(|r| r[j].is_finite()).count() as f64 / kept as f64;
                    prop_assert!(*curve.last().unwrap() <= solved + 1e-15);
                }
            }
            if kept > 0 {
                let at_one: f64 = p.curves.iter().map(|c| c[0]).sum();
                prop_assert!(at_one >= 1.0 - 1e-12);
            }
        }
    }
}
