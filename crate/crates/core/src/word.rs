//! Words over the three self-inverse generators `0`, `1`, `2`.
//!
//! Two forms are used throughout: [`Word`] is a flat letter sequence, and
//! [`WordExpr`] keeps parenthesised powers such as `((10)^2 12)^4` unexpanded
//! so that group elements can be raised to powers by repeated squaring.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default ceiling on the length of a fully expanded word.
pub const MAX_EXPANDED_LEN: u128 = 50_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l > 2) {
            return Err(Error::InvalidLetter(char::from(b'0'.wrapping_add(bad))));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: u8) {
        assert!(letter <= 2, "generator letter out of range");
        self.0.push(letter);
    }

    /// The inverse word: letters are involutions, so this is the reversal.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn to_expr(&self) -> WordExpr {
        WordExpr::Seq(self.0.iter().map(|&l| WordExpr::Letter(l)).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)?.expand(MAX_EXPANDED_LEN)
    }
}

/// A word with unexpanded powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordExpr {
    Letter(u8),
    Seq(Vec<WordExpr>),
    Pow(Box<WordExpr>, u64),
}

/// Something a word can be evaluated into: a monoid with three generators.
pub trait WordAction {
    type Value: Clone;

    fn identity(&self) -> Self::Value;
    fn letter(&self, letter: u8) -> Self::Value;
    /// `first` followed by `second` (words are read left to right).
    fn then(&self, first: &Self::Value, second: &Self::Value) -> Self::Value;

    fn power(&self, base: &Self::Value, mut exp: u64) -> Self::Value {
        let mut acc = self.identity();
        let mut sq = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.then(&acc, &sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = self.then(&sq, &sq);
            }
        }
        acc
    }
}

impl WordExpr {
    /// Length of the expanded word.
    pub fn expanded_len(&self) -> u128 {
        match self {
            WordExpr::Letter(_) => 1,
            WordExpr::Seq(items) => items.iter().map(|e| e.expanded_len()).sum(),
            WordExpr::Pow(inner, k) => inner.expanded_len().saturating_mul(*k as u128),
        }
    }

    pub fn expand(&self, max_len: u128) -> Result<Word> {
        let len = self.expanded_len();
        if len > max_len {
            return Err(Error::MalformedWord(format!(
                "expanded length {} exceeds limit {}",
                len, max_len
            )));
        }
        let mut out = Vec::with_capacity(len as usize);
        self.expand_into(&mut out);
        Ok(Word(out))
    }

    fn expand_into(&self, out: &mut Vec<u8>) {
        match self {
            WordExpr::Letter(l) => out.push(*l),
            WordExpr::Seq(items) => items.iter().for_each(|e| e.expand_into(out)),
            WordExpr::Pow(inner, k) => {
                let start = out.len();
                inner.expand_into(out);
                let end = out.len();
                for _ in 1..*k {
                    out.extend_from_within(start..end);
                }
            }
        }
    }

    pub fn evaluate<A: WordAction>(&self, action: &A) -> A::Value {
        match self {
            WordExpr::Letter(l) => action.letter(*l),
            WordExpr::Seq(items) => items
                .iter()
                .fold(action.identity(), |acc, e| action.then(&acc, &e.evaluate(action))),
            WordExpr::Pow(inner, k) => action.power(&inner.evaluate(action), *k),
        }
    }

    pub fn pow(self, k: u64) -> WordExpr {
        WordExpr::Pow(Box::new(self), k)
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Letter(l) => write!(f, "{}", l),
            WordExpr::Seq(items) => {
                for e in items {
                    write!(f, "{}", e)?;
                }
                Ok(())
            }
            WordExpr::Pow(inner, k) => write!(f, "({})^{}", inner, k),
        }
    }
}

impl FromStr for WordExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

/// Parses digits `0`/`1`/`2`, parenthesised groups and `^k` powers.
/// Whitespace separates tokens and is otherwise ignored, so `(10)^2 12` has
/// exponent 2. A power binds to the preceding letter or group.
pub fn parse_word(input: &str) -> Result<WordExpr> {
    let chars: Vec<char> = input.chars().collect();
    let mut pos = 0;
    let expr = parse_seq(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(Error::MalformedWord(format!(
            "unexpected {:?} at position {}",
            chars[pos], pos
        )));
    }
    Ok(expr)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_seq(chars: &[char], pos: &mut usize) -> Result<WordExpr> {
    let mut items = Vec::new();
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() {
            break;
        }
        let atom = match chars[*pos] {
            c @ '0'..='2' => {
                *pos += 1;
                WordExpr::Letter(c as u8 - b'0')
            }
            '(' => {
                *pos += 1;
                let inner = parse_seq(chars, pos)?;
                skip_ws(chars, pos);
                if chars.get(*pos) != Some(&')') {
                    return Err(Error::MalformedWord("unbalanced '('".into()));
                }
                *pos += 1;
                inner
            }
            ')' => break,
            '^' => return Err(Error::MalformedWord("'^' without a base".into())),
            c => return Err(Error::InvalidLetter(c)),
        };
        skip_ws(chars, pos);
        let atom = if chars.get(*pos) == Some(&'^') {
            *pos += 1;
            skip_ws(chars, pos);
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if start == *pos {
                return Err(Error::MalformedWord("'^' must be followed by an exponent".into()));
            }
            let digits: String = chars[start..*pos].iter().collect();
            let k: u64 = digits
                .parse()
                .map_err(|_| Error::MalformedWord(format!("bad exponent {}", digits)))?;
            atom.pow(k)
        } else {
            atom
        };
        items.push(atom);
    }
    Ok(if items.len() == 1 {
        items.pop().unwrap()
    } else {
        WordExpr::Seq(items)
    })
}
