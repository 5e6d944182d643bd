//! Batch benchmark harness: runs every problem in a directory against one
//! algorithm with a per-problem timeout, optionally cross-checking each
//! formula against its negation, and renders CSV/JSON records plus a
//! summary.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::engine::{run, Algorithm, QeReport};
use crate::formula::Formula;
use crate::frontend::{format_for_path, parse_problem, Answer, Problem, RunRecord};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: crate::frontend::ParseError,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub algorithm: Algorithm,
    pub timeout: Duration,
    pub check_negation: bool,
}

/// Consistency of a problem's answer with its negation's answer. For a
/// closed formula F, `sat F` must pair with `unsat (not F)` and vice
/// versa; two equal decided answers are contradictory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegationCheck {
    Consistent,
    Contradictory,
    Undecided,
}

#[derive(Debug, Clone)]
pub struct ProblemResult {
    pub record: RunRecord,
    pub expected: Option<bool>,
    pub negation_answer: Option<Answer>,
    pub negation_check: Option<NegationCheck>,
}

#[derive(Debug, Default)]
pub struct BenchOutcome {
    pub results: Vec<ProblemResult>,
}

impl BenchOutcome {
    pub fn solved(&self) -> usize {
        self.results
            .iter()
            .filter(|r| r.record.answer != Answer::Unknown)
            .count()
    }

    /// Total time spent on solved problems (the cumulative-time metric).
    pub fn cumulative_solved_ms(&self) -> u128 {
        self.results
            .iter()
            .filter(|r| r.record.answer != Answer::Unknown)
            .map(|r| r.record.ms)
            .sum()
    }

    pub fn contradictions(&self) -> Vec<&str> {
        self.results
            .iter()
            .filter(|r| r.negation_check == Some(NegationCheck::Contradictory))
            .map(|r| r.record.name.as_str())
            .collect()
    }

    /// Problems whose decided answer disagrees with the input's declared
    /// expected status.
    pub fn expected_mismatches(&self) -> Vec<&str> {
        self.results
            .iter()
            .filter(|r| match (r.expected, r.record.answer) {
                (Some(true), Answer::Unsat) | (Some(false), Answer::Sat) => true,
                _ => false,
            })
            .map(|r| r.record.name.as_str())
            .collect()
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("name,algorithm,answer,ms,residual_nodes\n");
        for r in &self.results {
            let residual = r
                .record
                .residual_nodes
                .map(|n| n.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.record.name, r.record.algorithm, r.record.answer, r.record.ms, residual
            ));
        }
        out
    }

    pub fn json(&self) -> String {
        let records: Vec<&RunRecord> = self.results.iter().map(|r| &r.record).collect();
        serde_json::to_string_pretty(&records).expect("serializable records")
    }

    pub fn summary(&self) -> String {
        let total = self.results.len();
        let solved = self.solved();
        let mut out = format!(
            "solved {solved}/{total}, cumulative time of solved {} ms",
            self.cumulative_solved_ms()
        );
        let contradictions = self.contradictions();
        if self.results.iter().any(|r| r.negation_check.is_some()) {
            let consistent = self
                .results
                .iter()
                .filter(|r| r.negation_check == Some(NegationCheck::Consistent))
                .count();
            out.push_str(&format!(
                "\nnegation check: {consistent} consistent, {} contradictory",
                contradictions.len()
            ));
            for name in &contradictions {
                out.push_str(&format!("\ncontradiction: {name}"));
            }
        }
        for name in self.expected_mismatches() {
            out.push_str(&format!("\nexpected-status mismatch: {name}"));
        }
        out
    }
}

/// Runs one problem against the deadline and records the verdict.
pub fn run_problem(problem: &Problem, algorithm: Algorithm, timeout: Duration) -> (RunRecord, QeReport) {
    let deadline = Some(Instant::now() + timeout);
    let report = run(algorithm, &problem.formula, deadline);
    let answer = Answer::from_decided(report.decided);
    let record = RunRecord {
        name: problem.name.clone(),
        algorithm: report.algorithm.clone(),
        answer,
        ms: report.duration_ms,
        residual_nodes: match answer {
            Answer::Unknown => Some(report.result.node_count()),
            _ => None,
        },
    };
    (record, report)
}

fn negation_consistency(a: Answer, b: Answer) -> NegationCheck {
    match (a, b) {
        (Answer::Sat, Answer::Unsat) | (Answer::Unsat, Answer::Sat) => NegationCheck::Consistent,
        (Answer::Sat, Answer::Sat) | (Answer::Unsat, Answer::Unsat) => {
            NegationCheck::Contradictory
        }
        _ => NegationCheck::Undecided,
    }
}

/// Runs a single already-parsed problem, with the negation cross-check if
/// requested.
pub fn run_one(problem: &Problem, opts: &BenchOptions) -> ProblemResult {
    let (record, _) = run_problem(problem, opts.algorithm, opts.timeout);
    let (negation_answer, negation_check) = if opts.check_negation {
        let negated = Problem {
            name: format!("{}!neg", problem.name),
            formula: Formula::neg(problem.formula.clone()),
            expected: problem.expected.map(|e| !e),
            source_format: problem.source_format,
        };
        let (neg_record, _) = run_problem(&negated, opts.algorithm, opts.timeout);
        (
            Some(neg_record.answer),
            Some(negation_consistency(record.answer, neg_record.answer)),
        )
    } else {
        (None, None)
    };
    ProblemResult {
        record,
        expected: problem.expected,
        negation_answer,
        negation_check,
    }
}

/// Problem files in a directory: `.smt2` and `.vs`, sorted by name for
/// deterministic output.
pub fn problem_files(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| BenchError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("smt2") | Some("vs")
            )
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Loads and runs every problem file in `dir`.
pub fn run_dir(dir: &Path, opts: &BenchOptions) -> Result<BenchOutcome, BenchError> {
    let mut outcome = BenchOutcome::default();
    for path in problem_files(dir)? {
        let text = std::fs::read_to_string(&path).map_err(|source| BenchError::Io {
            path: path.clone(),
            source,
        })?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("problem")
            .to_string();
        let problem = parse_problem(&name, &text, format_for_path(&path)).map_err(|source| {
            BenchError::Parse {
                path: path.clone(),
                source,
            }
        })?;
        outcome.results.push(run_one(&problem, opts));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Rel;
    use crate::frontend::SourceFormat;
    use crate::polyarith::Polynomial;

    fn problem(name: &str, f: Formula) -> Problem {
        Problem {
            name: name.to_string(),
            formula: f,
            expected: None,
            source_format: SourceFormat::Native,
        }
    }

    #[test]
    fn run_one_decides_and_cross_checks() {
        let f = Formula::exq(Formula::atom(
            Rel::Eq,
            Polynomial::var(0).pow(2) - Polynomial::from_int(2),
        ));
        let opts = BenchOptions {
            algorithm: Algorithm::Leg,
            timeout: Duration::from_secs(5),
            check_negation: true,
        };
        let r = run_one(&problem("sqrt2", f), &opts);
        assert_eq!(r.record.answer, Answer::Sat);
        assert_eq!(r.negation_answer, Some(Answer::Unsat));
        assert_eq!(r.negation_check, Some(NegationCheck::Consistent));
        assert_eq!(r.record.residual_nodes, None);
    }

    #[test]
    fn unknown_records_residual_size() {
        // degree 3, VS-ineligible
        let f = Formula::exq(Formula::atom(
            Rel::Eq,
            Polynomial::var(0).pow(3) + Polynomial::var(0) - Polynomial::one(),
        ));
        let opts = BenchOptions {
            algorithm: Algorithm::Leg,
            timeout: Duration::from_secs(5),
            check_negation: false,
        };
        let r = run_one(&problem("cubic", f), &opts);
        assert_eq!(r.record.answer, Answer::Unknown);
        assert!(r.record.residual_nodes.is_some());
    }

    #[test]
    fn csv_and_summary_shape() {
        let f = Formula::exq(Formula::atom(Rel::Eq, Polynomial::var(0)));
        let opts = BenchOptions {
            algorithm: Algorithm::Equality,
            timeout: Duration::from_secs(5),
            check_negation: false,
        };
        let mut outcome = BenchOutcome::default();
        outcome.results.push(run_one(&problem("zero", f), &opts));
        let csv = outcome.csv();
        assert!(csv.starts_with("name,algorithm,answer,ms,residual_nodes\n"));
        assert!(csv.contains("zero,equality,sat,"));
        assert!(outcome.summary().starts_with("solved 1/1"));
        let json = outcome.json();
        assert!(json.contains("\"answer\": \"sat\""));
    }
}
