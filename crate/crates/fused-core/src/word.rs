use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Orientation of a classical crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    /// +1 or -1.
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// One letter of a braid word. `index` is 1-based: the letter acts on
/// positions `index`, `index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Sigma { index: u32, sign: Sign },
    Tau { index: u32 },
}

impl Generator {
    pub fn sigma(index: u32, sign: Sign) -> Generator {
        Generator::Sigma { index, sign }
    }

    pub fn positive(index: u32) -> Generator {
        Generator::Sigma { index, sign: Sign::Pos }
    }

    pub fn negative(index: u32) -> Generator {
        Generator::Sigma { index, sign: Sign::Neg }
    }

    pub fn tau(index: u32) -> Generator {
        Generator::Tau { index }
    }

    pub fn index(self) -> u32 {
        match self {
            Generator::Sigma { index, .. } | Generator::Tau { index } => index,
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(self, Generator::Sigma { .. })
    }

    pub fn inverse(self) -> Generator {
        match self {
            Generator::Sigma { index, sign } => Generator::Sigma { index, sign: sign.flip() },
            Generator::Tau { index } => Generator::Tau { index },
        }
    }

    pub fn is_inverse_of(self, other: Generator) -> bool {
        self.inverse() == other
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Sigma { index, sign: Sign::Pos } => write!(f, "s{index}"),
            Generator::Sigma { index, sign: Sign::Neg } => write!(f, "S{index}"),
            Generator::Tau { index } => write!(f, "t{index}"),
        }
    }
}

/// A word in the virtual braid monoid on a fixed number of strands.
///
/// Every letter index fits: `index + 1 <= strands`. Words are value types;
/// all operations return new words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: u32,
    letters: Vec<Generator>,
}

impl BraidWord {
    /// Word with an explicit strand count. Fails if a letter needs more
    /// strands than declared.
    pub fn new(strands: u32, letters: Vec<Generator>) -> Result<BraidWord, Error> {
        if strands == 0 {
            return Err(Error::InvalidArgument("strand count must be at least 1".into()));
        }
        for letter in &letters {
            if letter.index() + 1 > strands {
                return Err(Error::IndexOutOfRange { index: letter.index(), strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Word on the minimal strand count its letters allow.
    pub fn from_letters(letters: Vec<Generator>) -> BraidWord {
        let strands = letters.iter().map(|g| g.index() + 1).max().unwrap_or(1);
        BraidWord { strands, letters }
    }

    /// Empty word on `strands` strands.
    pub fn identity(strands: u32) -> BraidWord {
        BraidWord { strands: strands.max(1), letters: Vec::new() }
    }

    pub fn strands(&self) -> u32 {
        self.strands
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest letter index, or 0 for the empty word.
    pub fn max_index(&self) -> u32 {
        self.letters.iter().map(|g| g.index()).max().unwrap_or(0)
    }

    pub fn is_classical(&self) -> bool {
        self.letters.iter().all(|g| g.is_classical())
    }

    /// Position (1-based) of the first virtual letter, if any.
    pub fn first_virtual_position(&self) -> Option<usize> {
        self.letters.iter().position(|g| !g.is_classical()).map(|i| i + 1)
    }

    /// Same letters on a larger strand count.
    pub fn widened(&self, strands: u32) -> Result<BraidWord, Error> {
        if strands < self.strands {
            return Err(Error::StrandCountTooSmall {
                declared: strands,
                required: self.strands,
            });
        }
        Ok(BraidWord { strands, letters: self.letters.clone() })
    }

    pub fn inverse(&self) -> BraidWord {
        let letters = self.letters.iter().rev().map(|g| g.inverse()).collect();
        BraidWord { strands: self.strands, letters }
    }

    /// Concatenation; the result lives on the larger of the two strand counts.
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands.max(other.strands), letters }
    }

    /// Free reduction: repeatedly cancel adjacent inverse pairs.
    pub fn free_reduce(&self) -> BraidWord {
        let mut stack: Vec<Generator> = Vec::with_capacity(self.letters.len());
        for &g in &self.letters {
            if stack.last().is_some_and(|&top| top.is_inverse_of(g)) {
                stack.pop();
            } else {
                stack.push(g);
            }
        }
        BraidWord { strands: self.strands, letters: stack }
    }

    /// Literal `k`-th power; negative exponents repeat the inverse.
    pub fn pow(&self, k: i64) -> BraidWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(self.letters.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord { strands: self.strands, letters }
    }

    /// Moves the first `k` letters to the end: `uv -> vu` with `|u| = k`.
    pub fn rotate_left(&self, k: usize) -> BraidWord {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut letters = Vec::with_capacity(self.letters.len());
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        BraidWord { strands: self.strands, letters }
    }

    /// Grammar text for this word. Emits the strand-count header only when
    /// the letters alone would understate it.
    pub fn format(&self) -> String {
        let needs_header = self.strands > self.max_index() + 1;
        let mut parts: Vec<String> = Vec::with_capacity(self.letters.len() + 1);
        if needs_header {
            parts.push(format!("n={}", self.strands));
        }
        parts.extend(self.letters.iter().map(|g| g.to_string()));
        parts.join(" ")
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<BraidWord, Error> {
        parse_word(s)
    }
}

impl Serialize for BraidWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.format())
    }
}

impl<'de> Deserialize<'de> for BraidWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<BraidWord, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_word(&text).map_err(D::Error::custom)
    }
}

fn parse_index(token: &str, offset: usize) -> Result<u32, Error> {
    let digits = &token[1..];
    if digits.is_empty() {
        return Err(Error::Parse { offset, msg: format!("token '{token}' is missing an index") });
    }
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse {
            offset,
            msg: format!("token '{token}' has a non-decimal index"),
        });
    }
    let value: u32 = digits.parse().map_err(|_| Error::Parse {
        offset,
        msg: format!("index in '{token}' is out of range"),
    })?;
    if value == 0 {
        return Err(Error::Parse { offset, msg: format!("index in '{token}' must be at least 1") });
    }
    Ok(value)
}

/// Parses the word grammar: whitespace-separated letter tokens `s<k>`,
/// `S<k>`, `t<k>` with 1-based decimal indices, preceded by an optional
/// `n=<m>` strand-count header.
pub fn parse_word(input: &str) -> Result<BraidWord, Error> {
    let mut declared: Option<u32> = None;
    let mut letters: Vec<Generator> = Vec::new();
    let mut pos = 0usize;
    let bytes = input.as_bytes();
    while pos < bytes.len() {
        if bytes[pos].is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let token = &input[start..pos];
        if let Some(rest) = token.strip_prefix("n=") {
            if declared.is_some() {
                return Err(Error::Parse {
                    offset: start,
                    msg: "duplicate strand-count header".into(),
                });
            }
            if !letters.is_empty() {
                return Err(Error::Parse {
                    offset: start,
                    msg: "strand-count header must be the first token".into(),
                });
            }
            if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse {
                    offset: start,
                    msg: format!("malformed strand-count header '{token}'"),
                });
            }
            let count: u32 = rest.parse().map_err(|_| Error::Parse {
                offset: start,
                msg: format!("strand count in '{token}' is out of range"),
            })?;
            if count == 0 {
                return Err(Error::Parse {
                    offset: start,
                    msg: "strand count must be at least 1".into(),
                });
            }
            declared = Some(count);
            continue;
        }
        let letter = match token.as_bytes()[0] {
            b's' => Generator::positive(parse_index(token, start)?),
            b'S' => Generator::negative(parse_index(token, start)?),
            b't' => Generator::tau(parse_index(token, start)?),
            _ => {
                return Err(Error::Parse {
                    offset: start,
                    msg: format!("unrecognized token '{token}'"),
                })
            }
        };
        letters.push(letter);
    }
    let required = letters.iter().map(|g| g.index() + 1).max().unwrap_or(1);
    let strands = match declared {
        Some(m) if m < required => {
            return Err(Error::StrandCountTooSmall { declared: m, required })
        }
        Some(m) => m,
        None => required,
    };
    Ok(BraidWord { strands, letters })
}
