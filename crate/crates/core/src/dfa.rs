//! Complete deterministic automata, words, and their text and DOT forms.
//!
//! The text grammar is line based; `#` starts a comment line:
//!
//! ```text
//! dfa 2
//! a: 1 1
//! b: 2 2
//! ```
//!
//! The first line gives the number of states, then each letter line lists the
//! 1-based images of states `1..=n` under that letter. Letter order is the
//! file order, and every tie-break downstream follows it.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::limits::MAX_STATES;
use crate::state::StateSet;
use crate::transform::Transformation;

/// A finite word, stored as letter indices of the owning automaton.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letter(index: usize) -> Self {
        Word(vec![index])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: usize) {
        self.0.push(letter);
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `self` followed by `count` copies of `letter`.
    pub fn with_power(&self, letter: usize, count: usize) -> Word {
        let mut letters = self.0.clone();
        letters.extend(std::iter::repeat_n(letter, count));
        Word(letters)
    }
}

impl From<Vec<usize>> for Word {
    fn from(letters: Vec<usize>) -> Self {
        Word(letters)
    }
}

/// A named input letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    name: String,
}

impl Letter {
    pub fn name(&self) -> &str {
        &self.name
    }
}

fn validate_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(':') || name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidLetterName(name.to_string()));
    }
    Ok(())
}

/// A complete DFA `⟨Q, Σ⟩` with `Q = 1..=n`, one total transformation per letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    n: usize,
    letters: Vec<Letter>,
    actions: Vec<Transformation>,
}

impl Dfa {
    /// Build from `(name, action)` pairs in letter order.
    ///
    /// The alphabet may be empty: the one-leaf tree yields a one-state
    /// automaton without letters.
    pub fn new<S: Into<String>>(n: usize, letters: Vec<(S, Transformation)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("an automaton needs at least one state"));
        }
        if n > MAX_STATES {
            return Err(Error::CapExceeded {
                what: "state count",
                limit: MAX_STATES,
                requested: n,
            });
        }
        let mut seen = HashSet::new();
        let mut names = Vec::with_capacity(letters.len());
        let mut actions = Vec::with_capacity(letters.len());
        for (name, action) in letters {
            let name = name.into();
            validate_name(&name)?;
            if action.n() != n {
                return Err(Error::StateCountMismatch {
                    left: n,
                    right: action.n(),
                });
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateLetter(name));
            }
            names.push(Letter { name });
            actions.push(action);
        }
        Ok(Dfa {
            n,
            letters: names,
            actions,
        })
    }

    /// Convenience constructor from 1-based image tables.
    pub fn from_tables<S: Into<String>>(n: usize, tables: Vec<(S, Vec<usize>)>) -> Result<Self> {
        let letters = tables
            .into_iter()
            .map(|(name, images)| {
                if images.len() != n {
                    return Err(Error::StateCountMismatch {
                        left: n,
                        right: images.len(),
                    });
                }
                Ok((name, Transformation::from_images(&images)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Dfa::new(n, letters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter_name(&self, index: usize) -> &str {
        &self.letters[index].name
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l.name == name)
    }

    pub fn action(&self, index: usize) -> &Transformation {
        &self.actions[index]
    }

    pub fn actions(&self) -> &[Transformation] {
        &self.actions
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|&&a| a >= self.num_letters()) {
            Some(&index) => Err(Error::LetterOutOfRange {
                index,
                m: self.num_letters(),
            }),
            None => Ok(()),
        }
    }

    /// Transformation induced by `w`; the empty word gives the identity.
    pub fn word_action(&self, w: &Word) -> Result<Transformation> {
        self.check_word(w)?;
        Ok(w.letters()
            .iter()
            .fold(Transformation::identity(self.n), |t, &a| {
                t.then(&self.actions[a])
            }))
    }

    /// `Q·w`.
    pub fn image_of_word(&self, w: &Word) -> Result<StateSet> {
        self.apply_word(&StateSet::full(self.n), w)
    }

    /// `P·w`.
    pub fn apply_word(&self, p: &StateSet, w: &Word) -> Result<StateSet> {
        self.check_word(w)?;
        let bits = w
            .letters()
            .iter()
            .fold(p.bits(), |bits, &a| self.actions[a].apply_bits(bits));
        Ok(StateSet::from_bits_unchecked(self.n, bits))
    }

    /// Parse the text grammar described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            });
        let (header_line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing `dfa <n>` header"))?;
        let n = parse_header(header_line, header, "dfa")?;
        if n == 0 {
            return Err(Error::parse(header_line, 5, "state count must be positive"));
        }
        if n > MAX_STATES {
            return Err(Error::CapExceeded {
                what: "state count",
                limit: MAX_STATES,
                requested: n,
            });
        }
        let mut letters = Vec::new();
        let mut seen = HashSet::new();
        for (line_no, line) in lines {
            let (name, images) = parse_letter_line(line_no, line, n)?;
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateLetter(name));
            }
            letters.push((name, Transformation::from_images(&images)?));
        }
        Dfa::new(n, letters)
    }

    /// Canonical text form; `Dfa::parse(&d.to_text())` returns `d`.
    pub fn to_text(&self) -> String {
        let mut out = format!("dfa {}\n", self.n);
        for (letter, action) in self.letters.iter().zip(&self.actions) {
            let images: Vec<String> = action.images().iter().map(|q| q.to_string()).collect();
            let _ = writeln!(out, "{}: {}", letter.name, images.join(" "));
        }
        out
    }

    /// Graphviz rendering; parallel transitions share one edge with a
    /// comma-joined label.
    pub fn to_dot(&self) -> String {
        let mut edges: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
        for (letter, action) in self.letters.iter().zip(&self.actions) {
            for (q, p) in action.images().into_iter().enumerate() {
                edges.entry((q + 1, p)).or_default().push(&letter.name);
            }
        }
        let mut out = String::from("digraph dfa {\n");
        for q in 1..=self.n {
            let _ = writeln!(out, "  {q} [label=\"{q}\"];");
        }
        for ((q, p), names) in edges {
            let _ = writeln!(out, "  {q} -> {p} [label=\"{}\"];", names.join(","));
        }
        out.push_str("}\n");
        out
    }

    /// Render a word with this automaton's letter names.
    ///
    /// Names are concatenated when all are single characters and joined with
    /// `·` otherwise. With `powers`, runs of a repeated letter are written
    /// `b^5`. The empty word renders as `ε`.
    pub fn render_word(&self, w: &Word, powers: bool) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let compact = self.letters.iter().all(|l| l.name.chars().count() == 1);
        let mut pieces = Vec::new();
        let mut i = 0;
        let letters = w.letters();
        while i < letters.len() {
            let a = letters[i];
            let mut run = 1;
            if powers {
                while i + run < letters.len() && letters[i + run] == a {
                    run += 1;
                }
            }
            let name = self
                .letters
                .get(a)
                .map(|l| l.name.clone())
                .unwrap_or_else(|| format!("#{a}"));
            pieces.push(if run > 1 {
                format!("{name}^{run}")
            } else {
                name
            });
            i += run;
        }
        pieces.join(if compact { "" } else { "·" })
    }

    /// Parse a word written as letter names separated by whitespace or `·`,
    /// or, when every name is one character, as a bare concatenation.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        let compact = self.letters.iter().all(|l| l.name.chars().count() == 1);
        let tokens: Vec<String> = if compact && !text.contains(['·', ' ']) {
            text.chars().map(|c| c.to_string()).collect()
        } else {
            text.split(|c: char| c == '·' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect()
        };
        let mut word = Word::empty();
        for (i, token) in tokens.iter().enumerate() {
            let index = self
                .letter_index(token)
                .ok_or_else(|| Error::parse(1, i + 1, format!("unknown letter `{token}`")))?;
            word.push(index);
        }
        Ok(word)
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parse `<keyword> <n>`.
pub(crate) fn parse_header(line_no: usize, line: &str, keyword: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    match parts.next() {
        Some(k) if k == keyword => {}
        _ => {
            return Err(Error::parse(
                line_no,
                column_of(line, line.trim_start()),
                format!("expected `{keyword} <n>` header"),
            ))
        }
    }
    let count = parts
        .next()
        .ok_or_else(|| Error::parse(line_no, line.len() + 1, "missing count"))?;
    let value = count.parse::<usize>().map_err(|_| {
        Error::parse(
            line_no,
            column_of(line, count),
            format!("`{count}` is not a non-negative integer"),
        )
    })?;
    if let Some(extra) = parts.next() {
        return Err(Error::parse(
            line_no,
            column_of(line, extra),
            format!("unexpected token `{extra}`"),
        ));
    }
    Ok(value)
}

/// Parse `<name>: <img_1> ... <img_n>`.
pub(crate) fn parse_letter_line(
    line_no: usize,
    line: &str,
    n: usize,
) -> Result<(String, Vec<usize>)> {
    let colon = line
        .find(':')
        .ok_or_else(|| Error::parse(line_no, 1, "expected `<letter>: <images>`"))?;
    let name = line[..colon].trim();
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::parse(
            line_no,
            column_of(line, line.trim_start()),
            format!("invalid letter name `{name}`"),
        ));
    }
    let rest = &line[colon + 1..];
    let mut images = Vec::with_capacity(n);
    for token in rest.split_whitespace() {
        let column = column_of(line, token);
        let q: usize = token.parse().map_err(|_| {
            Error::parse(line_no, column, format!("`{token}` is not a state number"))
        })?;
        if q == 0 || q > n {
            return Err(Error::parse(
                line_no,
                column,
                format!("image {q} out of range 1..={n}"),
            ));
        }
        images.push(q);
    }
    if images.len() != n {
        return Err(Error::parse(
            line_no,
            line.len() + 1,
            format!(
                "letter `{name}` lists {} images, expected {n}",
                images.len()
            ),
        ));
    }
    Ok((name.to_string(), images))
}

/// 1-based column of `part`, which must be a subslice of `line`.
fn column_of(line: &str, part: &str) -> usize {
    let offset = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}
