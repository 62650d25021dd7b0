use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::logic::Term;

/// A ground input/output pair, e.g. `act -> acted`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Example {
    pub input: Term,
    pub output: Term,
}

impl Example {
    pub fn new(input: Term, output: Term) -> Self {
        Example { input, output }
    }

    /// Both words become lists of one-letter constants.
    pub fn from_words(input: &str, output: &str) -> Self {
        Example {
            input: Term::word(input),
            output: Term::word(output),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.input.is_ground() && self.output.is_ground()
    }

    /// Input as plain text, falling back to term syntax for non-words.
    pub fn input_text(&self) -> String {
        self.input
            .as_word()
            .unwrap_or_else(|| self.input.to_string())
    }

    pub fn output_text(&self) -> String {
        self.output
            .as_word()
            .unwrap_or_else(|| self.output.to_string())
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.input_text(), self.output_text())
    }
}

impl fmt::Debug for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: '{input}' maps to both '{first}' and '{second}'")]
    Conflict {
        line: usize,
        input: String,
        first: String,
        second: String,
    },
    #[error("line {line}: character {ch:?} is not in the alphabet")]
    Alphabet { line: usize, ch: char },
    #[error("{0}")]
    Size(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

const ALPHABET_DIRECTIVE: &str = "# alphabet:";

/// Lines that are not pairs, kept so that saving reproduces the file.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Passthrough {
    before_example: usize,
    text: String,
}

/// An ordered collection of word pairs.
///
/// File format: one `base<TAB>past` pair per line, `#` starts a comment
/// line. A `# alphabet: abc...` line declares the letters allowed; without
/// it the alphabet is `a`-`z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    examples: Vec<Example>,
    alphabet: BTreeSet<char>,
    passthrough: Vec<Passthrough>,
    unterminated: bool,
}

pub fn default_alphabet() -> BTreeSet<char> {
    ('a'..='z').collect()
}

impl Corpus {
    /// Builds a corpus over the default alphabet, checking that inputs
    /// determine outputs.
    pub fn new(examples: Vec<Example>) -> Result<Self, CorpusError> {
        Self::with_alphabet(examples, default_alphabet())
    }

    pub fn with_alphabet(
        examples: Vec<Example>,
        alphabet: BTreeSet<char>,
    ) -> Result<Self, CorpusError> {
        let mut seen: HashMap<&Term, &Term> = HashMap::new();
        for (i, ex) in examples.iter().enumerate() {
            if !ex.is_ground() {
                return Err(CorpusError::Malformed {
                    line: i + 1,
                    message: format!("non-ground example {ex}"),
                });
            }
            for ch in ex.input_text().chars().chain(ex.output_text().chars()) {
                if !alphabet.contains(&ch) {
                    return Err(CorpusError::Alphabet { line: i + 1, ch });
                }
            }
            if let Some(prev) = seen.insert(&ex.input, &ex.output) {
                if prev != &ex.output {
                    return Err(CorpusError::Conflict {
                        line: i + 1,
                        input: ex.input_text(),
                        first: prev.as_word().unwrap_or_default(),
                        second: ex.output_text(),
                    });
                }
            }
        }
        Ok(Corpus {
            examples,
            alphabet,
            passthrough: Vec::new(),
            unterminated: false,
        })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn into_examples(self) -> Vec<Example> {
        self.examples
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Attaches a leading comment line, e.g. where the data came from.
    pub fn with_note(mut self, note: &str) -> Self {
        for line in note.lines().rev() {
            self.passthrough.insert(
                0,
                Passthrough {
                    before_example: 0,
                    text: format!("# {line}"),
                },
            );
        }
        self
    }

    pub fn parse(src: &str) -> Result<Self, CorpusError> {
        let mut alphabet = default_alphabet();
        let mut passthrough = Vec::new();
        let mut examples = Vec::new();
        let mut lines = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                if let Some(rest) = trimmed.strip_prefix(ALPHABET_DIRECTIVE) {
                    alphabet = rest.trim().chars().filter(|c| !c.is_whitespace()).collect();
                    if alphabet.is_empty() {
                        return Err(CorpusError::Malformed {
                            line: line_no,
                            message: "empty alphabet".into(),
                        });
                    }
                }
                passthrough.push(Passthrough {
                    before_example: examples.len(),
                    text: raw.to_string(),
                });
                continue;
            }
            let mut fields = raw.split('\t');
            let (Some(base), Some(past), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(CorpusError::Malformed {
                    line: line_no,
                    message: "expected `base<TAB>past`".into(),
                });
            };
            if base.is_empty() || past.is_empty() || base != base.trim() || past != past.trim() {
                return Err(CorpusError::Malformed {
                    line: line_no,
                    message: "empty or padded word".into(),
                });
            }
            lines.push(line_no);
            examples.push(Example::from_words(base, past));
        }
        let mut corpus = Corpus::with_alphabet(examples, alphabet).map_err(|e| match e {
            // Report the file line rather than the example index.
            CorpusError::Alphabet { line, ch } => CorpusError::Alphabet {
                line: lines[line - 1],
                ch,
            },
            CorpusError::Conflict {
                line,
                input,
                first,
                second,
            } => CorpusError::Conflict {
                line: lines[line - 1],
                input,
                first,
                second,
            },
            CorpusError::Malformed { line, message } => CorpusError::Malformed {
                line: lines[line - 1],
                message,
            },
            other => other,
        })?;
        corpus.passthrough = passthrough;
        corpus.unterminated = !src.is_empty() && !src.ends_with('\n');
        Ok(corpus)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut extra = self.passthrough.iter().peekable();
        let declared = self
            .passthrough
            .iter()
            .any(|p| p.text.trim().starts_with(ALPHABET_DIRECTIVE));
        if !declared && self.alphabet != default_alphabet() {
            out.push_str(ALPHABET_DIRECTIVE);
            out.push(' ');
            out.extend(self.alphabet.iter());
            out.push('\n');
        }
        for (i, ex) in self.examples.iter().enumerate() {
            while let Some(p) = extra.next_if(|p| p.before_example <= i) {
                out.push_str(&p.text);
                out.push('\n');
            }
            out.push_str(&ex.input_text());
            out.push('\t');
            out.push_str(&ex.output_text());
            out.push('\n');
        }
        for p in extra {
            out.push_str(&p.text);
            out.push('\n');
        }
        if self.unterminated {
            out.pop();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
