//! Wall-clock comparison of solver configurations over a problem set.

use std::fmt::Write as _;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::profile::{self, ProfileTable};
use crate::solver::{solve, SolverOptions};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub label: String,
    pub options: SolverOptions,
}

impl BenchConfig {
    /// Parses `key=value` pairs separated by commas on top of `base`, e.g.
    /// `route=null,enlarge=iterative,posdim`. The label joins the items with `+`
    /// so it can serve as a CSV header.
    pub fn parse(spec: &str, base: &SolverOptions) -> Result<BenchConfig> {
        let mut options = base.clone();
        let items: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        for &item in &items {
            let (key, value) = item.split_once('=').unwrap_or((item, ""));
            let bad = || Error::InvalidOption(format!("bad configuration item '{item}'"));
            match key {
                "route" => options.route = value.parse().map_err(|_| bad())?,
                "enlarge" => options.enlarge = value.parse().map_err(|_| bad())?,
                "rank" => options.rank_mode = value.parse().map_err(|_| bad())?,
                "posdim" => options.posdim = value.is_empty() || value == "true",
                "cluster" => options.cluster = value.is_empty() || value == "true",
                _ => return Err(bad()),
            }
        }
        options.validate()?;
        Ok(BenchConfig {
            label: items.join("+"),
            options,
        })
    }
}

/// Column route, and the null route with both enlargement strategies.
pub fn default_configs(base: &SolverOptions) -> Vec<BenchConfig> {
    ["route=column", "route=null,enlarge=iterative", "route=null,enlarge=recursive"]
        .iter()
        .map(|s| BenchConfig::parse(s, base).expect("built-in configuration is valid"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Solved { seconds: f64, count: usize },
    Failed(String),
    TimedOut,
}

impl Outcome {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            Outcome::Solved { seconds, .. } => Some(*seconds),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchSettings {
    pub timeout: Duration,
    /// Run once before timing and discard the result.
    pub warmup: bool,
    /// Run distinct problems on separate threads; the configurations of one
    /// problem always run one after another.
    pub parallel: bool,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            timeout: DEFAULT_TIMEOUT,
            warmup: true,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub problems: Vec<String>,
    pub configs: Vec<String>,
    pub cells: Vec<Vec<Outcome>>,
}

/// A run that outlives the timeout keeps its thread; the result is discarded.
fn timed_solve(problem: &Problem, options: &SolverOptions, timeout: Duration) -> Outcome {
    let (tx, rx) = mpsc::channel();
    let (p, o) = (problem.clone(), options.clone());
    thread::spawn(move || {
        let start = Instant::now();
        let result = solve(&p, &o);
        let _ = tx.send((start.elapsed().as_secs_f64(), result));
    });
    match rx.recv_timeout(timeout) {
        Ok((seconds, Ok(set))) => Outcome::Solved {
            seconds,
            count: set.len(),
        },
        Ok((_, Err(e))) => Outcome::Failed(e.name().to_string()),
        Err(_) => Outcome::TimedOut,
    }
}

fn run_row(problem: &Problem, configs: &[BenchConfig], settings: &BenchSettings) -> Vec<Outcome> {
    configs
        .iter()
        .map(|c| {
            if settings.warmup {
                let first = timed_solve(problem, &c.options, settings.timeout);
                if first.seconds().is_none() {
                    return first;
                }
            }
            timed_solve(problem, &c.options, settings.timeout)
        })
        .collect()
}

pub fn run(problems: &[(String, Problem)], configs: &[BenchConfig], settings: &BenchSettings) -> BenchReport {
    let cells = if settings.parallel {
        thread::scope(|scope| {
            let handles: Vec<_> = problems
                .iter()
                .map(|(_, p)| scope.spawn(move || run_row(p, configs, settings)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("benchmark row panicked")).collect()
        })
    } else {
        problems.iter().map(|(_, p)| run_row(p, configs, settings)).collect()
    };
    BenchReport {
        problems: problems.iter().map(|(n, _)| n.clone()).collect(),
        configs: configs.iter().map(|c| c.label.clone()).collect(),
        cells,
    }
}

impl BenchReport {
    pub fn times(&self) -> profile::Times {
        self.cells.iter().map(|r| r.iter().map(Outcome::seconds).collect()).collect()
    }

    /// Times divided by the slowest finished configuration of the same problem.
    pub fn relative(&self) -> profile::Times {
        relative_to_slowest(&self.times())
    }

    pub fn profile(&self, tau_max: f64, points: usize) -> Result<ProfileTable> {
        profile::performance_profile(&self.times(), tau_max, points)
    }

    pub fn times_csv(&self) -> String {
        profile::times_csv(&self.configs, &self.problems, &self.times())
    }

    /// `problem,<config>,..` with relative times, `FAIL` or `TIMEOUT`.
    pub fn relative_csv(&self) -> String {
        let rel = self.relative();
        let mut out = format!("problem,{}\n", self.configs.join(","));
        for (i, name) in self.problems.iter().enumerate() {
            out.push_str(name);
            for (j, cell) in self.cells[i].iter().enumerate() {
                match (cell, rel[i][j]) {
                    (_, Some(r)) => {
                        let _ = write!(out, ",{r:.4}");
                    }
                    (Outcome::TimedOut, None) => out.push_str(",TIMEOUT"),
                    _ => out.push_str(",FAIL"),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn relative_to_slowest(times: &[Vec<Option<f64>>]) -> profile::Times {
    times
        .iter()
        .map(|row| {
            let slowest = row.iter().flatten().copied().fold(0.0, f64::max);
            row.iter().map(|t| t.map(|t| t / slowest)).collect()
        })
        .collect()
}
