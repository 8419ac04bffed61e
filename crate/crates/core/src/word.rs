//! Words in free groups.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("symbol {0} outside alphabet of size {1}")]
    OutOfAlphabet(u32, usize),
}

/// Index of a generator in some alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub symbol: Symbol,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: Symbol, exponent: i32) -> Letter {
        debug_assert!(exponent == 1 || exponent == -1);
        Letter { symbol, inverse: exponent < 0 }
    }

    pub fn pos(symbol: Symbol) -> Letter {
        Letter { symbol, inverse: false }
    }

    pub fn neg(symbol: Symbol) -> Letter {
        Letter { symbol, inverse: true }
    }

    pub fn exponent(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Letter {
        Letter { symbol: self.symbol, inverse: !self.inverse }
    }
}

/// Names for symbols, plus the component each symbol belongs to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Alphabet
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut a = Alphabet::default();
        for n in names {
            a.push(n.into());
        }
        a
    }

    pub fn push(&mut self, name: String) -> Symbol {
        let s = Symbol(self.names.len() as u32);
        self.lookup.insert(name.clone(), s);
        self.names.push(name);
        s
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn check(&self, w: &FreeWord) -> Result<(), WordError> {
        for l in &w.letters {
            if l.symbol.0 as usize >= self.names.len() {
                return Err(WordError::OutOfAlphabet(l.symbol.0, self.names.len()));
            }
        }
        Ok(())
    }

    /// Renders `A B^-1 A`.
    pub fn render(&self, w: &FreeWord) -> String {
        self.render_with(w, " ", "^-1")
    }

    /// Renders `A*B^-1*A`, used inside group presentations.
    pub fn render_gap(&self, w: &FreeWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        self.render_with(w, "*", "^-1")
    }

    fn render_with(&self, w: &FreeWord, sep: &str, inv: &str) -> String {
        let mut out = String::new();
        for (k, l) in w.letters.iter().enumerate() {
            if k > 0 {
                out.push_str(sep);
            }
            out.push_str(self.name(l.symbol));
            if l.inverse {
                out.push_str(inv);
            }
        }
        out
    }

    /// Parses whitespace separated tokens `A`, `A^-1`, `A^1`.
    pub fn parse(&self, text: &str) -> Result<FreeWord, WordError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                None => (tok, 1),
                Some((n, "-1")) => (n, -1),
                Some((n, "1")) => (n, 1),
                Some(_) => return Err(WordError::MalformedToken(tok.to_string())),
            };
            let s = self
                .symbol(name)
                .ok_or_else(|| WordError::UnknownSymbol(name.to_string()))?;
            letters.push(Letter::new(s, exp));
        }
        Ok(FreeWord { letters })
    }
}

/// A word in a free group, not necessarily reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    pub letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> FreeWord {
        FreeWord::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> FreeWord {
        FreeWord { letters }
    }

    pub fn generator(s: Symbol) -> FreeWord {
        FreeWord { letters: vec![Letter::pos(s)] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1].inv())
    }

    pub fn reduce(&self) -> FreeWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            push_reduced(&mut out, l);
        }
        FreeWord { letters: out }
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        FreeWord { letters }
    }

    /// Reduced product. Inputs are assumed reduced.
    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        FreeWord { letters: out }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `b^-1 a b`.
    pub fn conjugate(&self, by: &FreeWord) -> FreeWord {
        by.inverse().mul(self).mul(by)
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(a: &FreeWord, b: &FreeWord) -> FreeWord {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    pub fn exponent_sum<F: Fn(Symbol) -> bool>(&self, filter: F) -> i64 {
        self.letters
            .iter()
            .filter(|l| filter(l.symbol))
            .map(|l| l.exponent())
            .sum()
    }

    /// Replaces each symbol by a word.
    pub fn substitute<F: FnMut(Symbol) -> FreeWord>(&self, mut image: F) -> FreeWord {
        let mut out = Vec::new();
        for l in &self.letters {
            let img = image(l.symbol);
            if l.inverse {
                for m in img.letters.iter().rev() {
                    push_reduced(&mut out, m.inv());
                }
            } else {
                for &m in &img.letters {
                    push_reduced(&mut out, m);
                }
            }
        }
        FreeWord { letters: out }
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inv()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "s{}", l.symbol.0)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn letter() -> impl Strategy<Value = Letter> {
        (0u32..3, any::<bool>()).prop_map(|(s, inverse)| Letter { symbol: Symbol(s), inverse })
    }

    fn word() -> impl Strategy<Value = FreeWord> {
        prop::collection::vec(letter(), 0..24).prop_map(FreeWord::from_letters)
    }

    #[test]
    fn parse_and_render() {
        let a = Alphabet::new(["A", "B"]);
        let w = a.parse("A B^-1 A").unwrap();
        assert_eq!(a.render(&w), "A B^-1 A");
        assert_eq!(a.render_gap(&w), "A*B^-1*A");
        assert!(matches!(a.parse("C"), Err(WordError::UnknownSymbol(_))));
        assert!(matches!(a.parse("A^2"), Err(WordError::MalformedToken(_))));
    }

    #[test]
    fn commutator_shape() {
        let a = FreeWord::generator(Symbol(0));
        let b = FreeWord::generator(Symbol(1));
        let c = FreeWord::commutator(&a, &b);
        let expect = vec![
            Letter::neg(Symbol(0)),
            Letter::neg(Symbol(1)),
            Letter::pos(Symbol(0)),
            Letter::pos(Symbol(1)),
        ];
        assert_eq!(c.letters, expect);
        assert_eq!(a.conjugate(&b).letters, vec![Letter::neg(Symbol(1)), Letter::pos(Symbol(0)), Letter::pos(Symbol(1))]);
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(w in word()) {
            let r = w.reduce();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.reduce(), r.clone());
        }

        #[test]
        fn inverse_cancels(w in word()) {
            let r = w.reduce();
            prop_assert!(r.mul(&r.inverse()).is_empty());
            prop_assert!(r.inverse().mul(&r).is_empty());
        }

        #[test]
        fn product_is_associative(a in word(), b in word(), c in word()) {
            let (a, b, c) = (a.reduce(), b.reduce(), c.reduce());
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn reduce_respects_concat(a in word(), b in word()) {
            prop_assert_eq!(a.concat(&b).reduce(), a.reduce().mul(&b.reduce()));
        }

        #[test]
        fn exponent_sum_survives_reduction(w in word()) {
            let f = |s: Symbol| s.0 != 1;
            prop_assert_eq!(w.exponent_sum(f), w.reduce().exponent_sum(f));
        }
    }
}
