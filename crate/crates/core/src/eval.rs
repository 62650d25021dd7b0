//! Generation accuracy on held-out examples and program size.

use std::fmt;

use rayon::prelude::*;

use crate::background::BackgroundKB;
use crate::dataset::Example;
use crate::induction::{LearnMode, LearnedProgram};
use crate::logic::Term;
use crate::solver::{answer_output, first_answer, output_goal, SolveBudget};

/// What the program produced for one test input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    WrongOutput(Term),
    /// No answer, or the solve budget ran out first.
    NoOutput,
    NongroundOutput(Term),
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        matches!(self, Verdict::Correct)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Correct => f.write_str("correct"),
            Verdict::WrongOutput(t) => write!(
                f,
                "wrong_output({})",
                t.as_word().unwrap_or_else(|| t.to_string())
            ),
            Verdict::NoOutput => f.write_str("no_output"),
            Verdict::NongroundOutput(t) => write!(f, "nonground_output({t})"),
        }
    }
}

/// Rule and literal counts over the rule segment; exception facts are
/// counted separately.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Complexity {
    pub rule_count: usize,
    pub literal_count: usize,
    pub memorized_count: usize,
}

pub fn complexity(program: &LearnedProgram) -> Complexity {
    Complexity {
        rule_count: program.rules.len(),
        literal_count: program.rules.iter().map(|r| r.body.len()).sum(),
        memorized_count: program.exception_facts.len(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub n_test: usize,
    pub n_correct: usize,
    pub accuracy: f64,
    pub verdicts: Vec<(Example, Verdict)>,
    pub rule_count: usize,
    pub literal_count: usize,
    pub memorized_count: usize,
    /// One line per query whose budget ran out.
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn complexity(&self) -> Complexity {
        Complexity {
            rule_count: self.rule_count,
            literal_count: self.literal_count,
            memorized_count: self.memorized_count,
        }
    }
}

/// Poses each test input as an output query and compares the first answer
/// with the reference output.
pub fn evaluate(
    program: &LearnedProgram,
    kb: &BackgroundKB,
    test: &[Example],
    budget: SolveBudget,
) -> EvalReport {
    let full = program.to_program(kb);
    let results: Vec<(Verdict, bool)> = test
        .par_iter()
        .map(|ex| {
            let first = first_answer(&full, &output_goal(&program.target, ex), budget);
            let verdict = match first.answer.map(|a| answer_output(&a)) {
                None => Verdict::NoOutput,
                Some(o) if !o.is_ground() => Verdict::NongroundOutput(o),
                Some(o) if o == ex.output => Verdict::Correct,
                Some(o) => Verdict::WrongOutput(o),
            };
            (verdict, first.budget_exhausted)
        })
        .collect();
    let mut verdicts = Vec::with_capacity(test.len());
    let mut warnings = Vec::new();
    for (ex, (verdict, exhausted)) in test.iter().zip(results) {
        if exhausted {
            warnings.push(format!("solve budget exhausted for {}", ex.input_text()));
        }
        verdicts.push((ex.clone(), verdict));
    }
    let n_correct = verdicts.iter().filter(|(_, v)| v.is_correct()).count();
    let c = complexity(program);
    EvalReport {
        n_test: test.len(),
        n_correct,
        accuracy: if test.is_empty() {
            0.0
        } else {
            n_correct as f64 / test.len() as f64
        },
        verdicts,
        rule_count: c.rule_count,
        literal_count: c.literal_count,
        memorized_count: c.memorized_count,
        warnings,
    }
}

pub const CSV_HEADER: &str = "trial,train_size,mode,accuracy,rules,literals,memorized,wall_seconds";

/// One learning-curve measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub trial: usize,
    pub train_size: usize,
    pub mode: LearnMode,
    pub accuracy: f64,
    pub complexity: Complexity,
    /// `None` writes an empty field, for output that must not depend on
    /// timing.
    pub wall_seconds: Option<f64>,
}

impl CsvRow {
    pub fn new(
        trial: usize,
        train_size: usize,
        mode: LearnMode,
        report: &EvalReport,
        wall_seconds: Option<f64>,
    ) -> Self {
        CsvRow {
            trial,
            train_size,
            mode,
            accuracy: report.accuracy,
            complexity: report.complexity(),
            wall_seconds,
        }
    }
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{:.6},{},{},{},",
            self.trial,
            self.train_size,
            self.mode,
            self.accuracy,
            self.complexity.rule_count,
            self.complexity.literal_count,
            self.complexity.memorized_count
        )?;
        match self.wall_seconds {
            Some(s) => write!(f, "{s:.3}"),
            None => Ok(()),
        }
    }
}
