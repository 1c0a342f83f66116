//! Words over a generator alphabet: signed letters, free reduction, and the
//! text format shared by every file the toolkit reads or writes.

use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Exponent sign of a single letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One signed generator occurrence inside a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    /// Index into the owning presentation's generator list.
    pub gen: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: usize, sign: Sign) -> Letter {
        Letter { gen, sign }
    }

    pub fn positive(gen: usize) -> Letter {
        Letter::new(gen, Sign::Plus)
    }

    pub fn negative(gen: usize) -> Letter {
        Letter::new(gen, Sign::Minus)
    }

    pub fn inverse(self) -> Letter {
        Letter::new(self.gen, self.sign.flip())
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }
}

/// A word: an ordered (possibly empty) sequence of signed letters.
///
/// Words are plain sequences; nothing forces them reduced. Use
/// [`Word::freely_reduced`] to obtain the unique reduced form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// The unique freely reduced word equal to `self` in the free group.
    ///
    /// Single left-to-right pass with a stack; cascading cancellations fall
    /// out of popping.
    pub fn freely_reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &letter in &self.0 {
            match out.last() {
                Some(&top) if top.cancels(letter) => {
                    out.pop();
                }
                _ => out.push(letter),
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// Reversed letters with flipped signs: `w^{-1}`.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn repeat(&self, times: usize) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() * times);
        for _ in 0..times {
            letters.extend_from_slice(&self.0);
        }
        Word(letters)
    }

    /// Product of all words in order (not reduced).
    pub fn product<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut letters = Vec::new();
        for w in words {
            letters.extend_from_slice(&w.0);
        }
        Word(letters)
    }
}

/// `[a,b] = a b a^{-1} b^{-1}`, freely reduced.
pub fn commutator(a: &Word, b: &Word) -> Word {
    Word::product([a, b, &a.inverse(), &b.inverse()]).freely_reduced()
}

/// `w` conjugated by `g`: `g^{-1} w g`, freely reduced.
pub fn conjugate(w: &Word, g: &Word) -> Word {
    Word::product([&g.inverse(), w, g]).freely_reduced()
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{name}` at position {pos}")]
    UnknownGenerator { name: String, pos: usize },
    #[error("malformed exponent `{text}` at position {pos}")]
    MalformedExponent { text: String, pos: usize },
    #[error("invalid token `{text}` at position {pos}")]
    InvalidToken { text: String, pos: usize },
    #[error("generator name `{0}` is not of the form [a-z][a-z0-9]*")]
    BadGeneratorName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("a presentation needs at least one generator")]
    NoGenerators,
    #[error("random words must have length at least 1")]
    ZeroLength,
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

/// The ordered, named generator alphabet of a presentation.
///
/// Owns the name/index correspondence, so word parsing and printing live
/// here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    names: Vec<String>,
}

impl Generators {
    pub fn new(names: Vec<String>) -> Result<Generators, WordError> {
        if names.is_empty() {
            return Err(WordError::NoGenerators);
        }
        for (i, name) in names.iter().enumerate() {
            if !is_valid_name(name) {
                return Err(WordError::BadGeneratorName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(WordError::DuplicateGenerator(name.clone()));
            }
        }
        Ok(Generators { names })
    }

    /// `s1 s2 ... sk` style alphabet.
    pub fn numbered(prefix: &str, count: usize) -> Generators {
        let names = (1..=count).map(|i| format!("{prefix}{i}")).collect();
        Generators::new(names).expect("numbered names are always valid")
    }

    pub fn count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses the word grammar: `word := ε | term (SP term)*`,
    /// `term := name | name "^" integer` with a nonzero integer.
    ///
    /// Exponents expand to letter runs, so `s1^2` parses identically to
    /// `s1 s1`. Errors carry the byte position of the offending token.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        let mut pos = 0;
        for token in text.split(' ') {
            if token.is_empty() {
                // split(' ') yields one empty token for "" and for runs of
                // spaces; treat both as nothing-here.
                pos += 1;
                continue;
            }
            let (name, exponent) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, exp_text)) => {
                    let exp: i64 = exp_text.parse().map_err(|_| WordError::MalformedExponent {
                        text: token.to_string(),
                        pos: pos + name.len() + 1,
                    })?;
                    if exp == 0 {
                        return Err(WordError::MalformedExponent {
                            text: token.to_string(),
                            pos: pos + name.len() + 1,
                        });
                    }
                    (name, exp)
                }
            };
            if !is_valid_name(name) {
                return Err(WordError::InvalidToken {
                    text: token.to_string(),
                    pos,
                });
            }
            let gen = self
                .index_of(name)
                .ok_or_else(|| WordError::UnknownGenerator {
                    name: name.to_string(),
                    pos,
                })?;
            let sign = if exponent > 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..exponent.unsigned_abs() {
                letters.push(Letter::new(gen, sign));
            }
            pos += token.len() + 1;
        }
        Ok(Word::from_letters(letters))
    }

    /// Canonical text form: maximal equal-letter runs in exponent notation,
    /// single spaces, no trailing whitespace. `parse_word` reproduces the
    /// word exactly.
    pub fn format_word(&self, word: &Word) -> String {
        let mut terms: Vec<String> = Vec::new();
        let letters = word.letters();
        let mut i = 0;
        while i < letters.len() {
            let letter = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == letter {
                run += 1;
            }
            let name = self.name(letter.gen);
            let term = match (letter.sign, run) {
                (Sign::Plus, 1) => name.to_string(),
                (Sign::Plus, e) => format!("{name}^{e}"),
                (Sign::Minus, e) => format!("{name}^-{e}"),
            };
            terms.push(term);
            i += run;
        }
        terms.join(" ")
    }

    /// Display adapter so words print through `format!` machinery.
    pub fn display<'a>(&'a self, word: &'a Word) -> WordDisplay<'a> {
        WordDisplay { gens: self, word }
    }
}

pub struct WordDisplay<'a> {
    gens: &'a Generators,
    word: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.gens.format_word(self.word))
    }
}

/// Uniform freely reduced word of exactly `target_length` letters: the first
/// letter is uniform over all `2k` signed letters, each later letter uniform
/// over the `2k - 1` choices that do not cancel its predecessor.
pub fn random_word(
    gens: &Generators,
    target_length: usize,
    rng: &mut impl Rng,
) -> Result<Word, WordError> {
    if target_length == 0 {
        return Err(WordError::ZeroLength);
    }
    let k = gens.count();
    let signed = |code: usize| {
        let sign = if code % 2 == 0 { Sign::Plus } else { Sign::Minus };
        Letter::new(code / 2, sign)
    };
    let mut letters = Vec::with_capacity(target_length);
    letters.push(signed(rng.random_range(0..2 * k)));
    while letters.len() < target_length {
        let forbidden = letters.last().unwrap().inverse();
        let forbidden_code = forbidden.gen * 2 + if forbidden.sign == Sign::Plus { 0 } else { 1 };
        // Draw from 2k-1 codes and shift past the forbidden one.
        let mut code = rng.random_range(0..2 * k - 1);
        if code >= forbidden_code {
            code += 1;
        }
        letters.push(signed(code));
    }
    Ok(Word::from_letters(letters))
}
