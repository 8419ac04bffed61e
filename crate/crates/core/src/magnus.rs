//! Truncated Magnus expansions in noncommuting variables X1..Xn.
//!
//! A monomial `X_{j1} ... X_{jk}` is stored under the key
//! `j1 n^(k-1) + ... + jk` in the bucket for degree `k`, so sorting keys
//! inside a bucket gives lexicographic order.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::int::Coeff;
use crate::word::{FreeWord, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MagnusError {
    #[error("truncation degrees differ ({0} vs {1})")]
    TruncationMismatch(usize, usize),
    #[error("variable counts differ ({0} vs {1})")]
    VariableMismatch(usize, usize),
    #[error("constant term is not a unit")]
    NotInvertible,
    #[error("variable index {0} out of range for {1} variables")]
    IndexOutOfRange(usize, usize),
    #[error("sequence of length {0} exceeds truncation degree {1}")]
    SequenceTooLong(usize, usize),
    #[error("no series assigned to symbol {0}")]
    Unassigned(u32),
    #[error("{0} variables to degree {1} do not fit a packed key")]
    TooLarge(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusSeries {
    vars: usize,
    degree: usize,
    terms: Vec<Vec<(u64, Coeff)>>,
}

fn check_size(vars: usize, degree: usize) -> Result<(), MagnusError> {
    if vars == 0 {
        return Ok(());
    }
    match (vars as u64).checked_pow(degree as u32 + 1) {
        Some(_) => Ok(()),
        None => Err(MagnusError::TooLarge(vars, degree)),
    }
}

fn pack(seq: &[usize], vars: usize) -> u64 {
    seq.iter().fold(0u64, |k, &j| k * vars as u64 + j as u64)
}

fn unpack(mut key: u64, deg: usize, vars: usize) -> Vec<usize> {
    let mut out = vec![0; deg];
    for slot in out.iter_mut().rev() {
        *slot = (key % vars as u64) as usize;
        key /= vars as u64;
    }
    out
}

impl MagnusSeries {
    pub fn zero(vars: usize, degree: usize) -> Result<MagnusSeries, MagnusError> {
        check_size(vars, degree)?;
        Ok(MagnusSeries { vars, degree, terms: vec![Vec::new(); degree + 1] })
    }

    pub fn one(vars: usize, degree: usize) -> Result<MagnusSeries, MagnusError> {
        let mut s = MagnusSeries::zero(vars, degree)?;
        s.terms[0].push((0, Coeff::Small(1)));
        Ok(s)
    }

    /// Image of a generator: `1 + X_i` for sign +1, `1 - X_i + X_i^2 - ...` for -1.
    pub fn generator(vars: usize, i: usize, sign: i32, degree: usize) -> Result<MagnusSeries, MagnusError> {
        if i >= vars {
            return Err(MagnusError::IndexOutOfRange(i, vars));
        }
        let mut s = MagnusSeries::one(vars, degree)?;
        let mut key = 0u64;
        for k in 1..=degree {
            key = key * vars as u64 + i as u64;
            let c = if sign > 0 {
                if k > 1 {
                    break;
                }
                1
            } else if k % 2 == 0 {
                1
            } else {
                -1
            };
            s.terms[k].push((key, Coeff::Small(c)));
        }
        Ok(s)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn compatible(&self, other: &MagnusSeries) -> Result<(), MagnusError> {
        if self.degree != other.degree {
            return Err(MagnusError::TruncationMismatch(self.degree, other.degree));
        }
        if self.vars != other.vars {
            return Err(MagnusError::VariableMismatch(self.vars, other.vars));
        }
        Ok(())
    }

    pub fn constant(&self) -> BigInt {
        self.terms[0].first().map(|(_, c)| c.to_big()).unwrap_or_else(BigInt::zero)
    }

    pub fn is_one(&self) -> bool {
        self.terms[0].len() == 1 && self.terms[0][0].1.is_one() && self.terms[1..].iter().all(|t| t.is_empty())
    }

    /// Coefficient of `X_{I_1} ... X_{I_k}`, indices 0-based.
    pub fn coefficient(&self, seq: &[usize]) -> Result<BigInt, MagnusError> {
        if seq.len() > self.degree {
            return Err(MagnusError::SequenceTooLong(seq.len(), self.degree));
        }
        if let Some(&j) = seq.iter().find(|&&j| j >= self.vars) {
            return Err(MagnusError::IndexOutOfRange(j, self.vars));
        }
        let key = pack(seq, self.vars);
        let bucket = &self.terms[seq.len()];
        Ok(match bucket.binary_search_by_key(&key, |(k, _)| *k) {
            Ok(p) => bucket[p].1.to_big(),
            Err(_) => BigInt::zero(),
        })
    }

    /// Nonzero terms in degree-then-lex order.
    pub fn terms(&self) -> Vec<(Vec<usize>, BigInt)> {
        let mut out = Vec::new();
        for (k, bucket) in self.terms.iter().enumerate() {
            for (key, c) in bucket {
                out.push((unpack(*key, k, self.vars), c.to_big()));
            }
        }
        out
    }

    /// Smallest k >= 1 with a nonzero degree-k term, `None` when there is none.
    pub fn lcs_degree(&self) -> Option<usize> {
        (1..=self.degree).find(|&k| !self.terms[k].is_empty())
    }

    pub fn add(&self, other: &MagnusSeries) -> Result<MagnusSeries, MagnusError> {
        self.compatible(other)?;
        let mut out = MagnusSeries::zero(self.vars, self.degree)?;
        for k in 0..=self.degree {
            out.terms[k] = merge(&self.terms[k], &other.terms[k], false);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MagnusSeries) -> Result<MagnusSeries, MagnusError> {
        self.compatible(other)?;
        let mut out = MagnusSeries::zero(self.vars, self.degree)?;
        for k in 0..=self.degree {
            out.terms[k] = merge(&self.terms[k], &other.terms[k], true);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MagnusSeries {
        let mut out = self.clone();
        for bucket in out.terms.iter_mut() {
            for (_, c) in bucket.iter_mut() {
                *c = c.neg();
            }
        }
        out
    }

    pub fn scale(&self, by: &BigInt) -> MagnusSeries {
        let f = Coeff::from_big(by.clone());
        let mut out = self.clone();
        for bucket in out.terms.iter_mut() {
            for (_, c) in bucket.iter_mut() {
                *c = c.mul(&f);
            }
            bucket.retain(|(_, c)| !c.is_zero());
        }
        out
    }

    pub fn mul(&self, other: &MagnusSeries) -> Result<MagnusSeries, MagnusError> {
        self.compatible(other)?;
        let n = self.vars as u64;
        let d = self.degree;
        let mut out = MagnusSeries::zero(self.vars, d)?;
        let mut powers = vec![1u64; d + 1];
        for b in 1..=d {
            powers[b] = powers[b - 1] * n;
        }
        for target in 0..=d {
            let mut acc = Accumulator::new(powers[target]);
            for a in 0..=target {
                let b = target - a;
                let (left, right) = (&self.terms[a], &other.terms[b]);
                if left.is_empty() || right.is_empty() {
                    continue;
                }
                for (i, x) in left {
                    let base = i * powers[b];
                    for (j, y) in right {
                        acc.add_mul(base + j, x, y);
                    }
                }
            }
            out.terms[target] = acc.finish();
        }
        Ok(out)
    }

    /// `X_i * self`.
    pub fn left_var(&self, i: usize) -> Result<MagnusSeries, MagnusError> {
        self.shift(i, true)
    }

    /// `self * X_i`.
    pub fn right_var(&self, i: usize) -> Result<MagnusSeries, MagnusError> {
        self.shift(i, false)
    }

    fn shift(&self, i: usize, left: bool) -> Result<MagnusSeries, MagnusError> {
        if i >= self.vars {
            return Err(MagnusError::IndexOutOfRange(i, self.vars));
        }
        let n = self.vars as u64;
        let mut out = MagnusSeries::zero(self.vars, self.degree)?;
        let mut pw = 1u64;
        for k in 0..self.degree {
            let mut bucket: Vec<(u64, Coeff)> = self.terms[k]
                .iter()
                .map(|(key, c)| {
                    let nk = if left { i as u64 * pw + key } else { key * n + i as u64 };
                    (nk, c.clone())
                })
                .collect();
            if !left {
                bucket.sort_by_key(|(k, _)| *k);
            }
            out.terms[k + 1] = bucket;
            pw *= n;
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<MagnusSeries, MagnusError> {
        let c = self.constant();
        if !(c.is_one() || (-&c).is_one()) {
            return Err(MagnusError::NotInvertible);
        }
        // self = c (1 + n) with n of positive degree; inverse is c (1 - n + n^2 - ...).
        let scaled = self.scale(&c);
        let mut nil = scaled.clone();
        nil.terms[0].clear();
        let minus = nil.neg();
        let mut out = MagnusSeries::one(self.vars, self.degree)?;
        let mut power = out.clone();
        for _ in 0..self.degree {
            power = power.mul(&minus)?;
            out = out.add(&power)?;
        }
        Ok(out.scale(&c))
    }

    /// Drops terms above `degree`.
    pub fn truncate(&self, degree: usize) -> MagnusSeries {
        let degree = degree.min(self.degree);
        MagnusSeries { vars: self.vars, degree, terms: self.terms[..=degree].to_vec() }
    }

    /// Series of the word under `symbol -> 1 + X_{index(symbol)}`.
    pub fn of_word<F>(word: &FreeWord, vars: usize, degree: usize, index: F) -> Result<MagnusSeries, MagnusError>
    where
        F: Fn(Symbol) -> Option<usize>,
    {
        let mut out = MagnusSeries::one(vars, degree)?;
        for l in &word.letters {
            let i = index(l.symbol).ok_or(MagnusError::Unassigned(l.symbol.0))?;
            let g = MagnusSeries::generator(vars, i, if l.inverse { -1 } else { 1 }, degree)?;
            out = out.mul(&g)?;
        }
        Ok(out)
    }
}

enum Accumulator {
    Dense(Vec<Coeff>),
    Sparse(HashMap<u64, Coeff>),
}

impl Accumulator {
    fn new(size: u64) -> Accumulator {
        if size <= 1 << 16 {
            Accumulator::Dense(vec![Coeff::Small(0); size as usize])
        } else {
            Accumulator::Sparse(HashMap::new())
        }
    }

    fn add_mul(&mut self, key: u64, x: &Coeff, y: &Coeff) {
        match self {
            Accumulator::Dense(v) => v[key as usize].add_mul(x, y),
            Accumulator::Sparse(m) => m.entry(key).or_default().add_mul(x, y),
        }
    }

    fn finish(self) -> Vec<(u64, Coeff)> {
        match self {
            Accumulator::Dense(v) => v
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as u64, c))
                .collect(),
            Accumulator::Sparse(m) => {
                let mut out: Vec<(u64, Coeff)> = m.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                out.sort_by_key(|(k, _)| *k);
                out
            }
        }
    }
}

fn merge(a: &[(u64, Coeff)], b: &[(u64, Coeff)], negate_b: bool) -> Vec<(u64, Coeff)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let take_b = |c: &Coeff| if negate_b { c.neg() } else { c.clone() };
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, take_b(&b[j].1)));
            j += 1;
        } else {
            let mut c = a[i].1.clone();
            c.add_assign(&take_b(&b[j].1));
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Assigns a series (and its inverse) to each symbol of an alphabet.
#[derive(Debug, Clone)]
pub struct Substitution {
    vars: usize,
    degree: usize,
    images: Vec<Option<(MagnusSeries, MagnusSeries)>>,
}

impl Substitution {
    pub fn new(vars: usize, degree: usize, symbols: usize) -> Substitution {
        Substitution { vars, degree, images: vec![None; symbols] }
    }

    pub fn set(&mut self, s: Symbol, image: MagnusSeries, inverse: MagnusSeries) -> Result<(), MagnusError> {
        if image.degree != self.degree || inverse.degree != self.degree {
            return Err(MagnusError::TruncationMismatch(image.degree, self.degree));
        }
        if s.0 as usize >= self.images.len() {
            self.images.resize(s.0 as usize + 1, None);
        }
        self.images[s.0 as usize] = Some((image, inverse));
        Ok(())
    }

    pub fn image(&self, s: Symbol) -> Option<&MagnusSeries> {
        self.images.get(s.0 as usize).and_then(|o| o.as_ref()).map(|p| &p.0)
    }

    pub fn evaluate(&self, word: &FreeWord) -> Result<MagnusSeries, MagnusError> {
        let mut out = MagnusSeries::one(self.vars, self.degree)?;
        for l in &word.letters {
            let (img, inv) = self
                .images
                .get(l.symbol.0 as usize)
                .and_then(|o| o.as_ref())
                .ok_or(MagnusError::Unassigned(l.symbol.0))?;
            out = out.mul(if l.inverse { inv } else { img })?;
        }
        Ok(out)
    }
}

fn var_name(j: usize, vars: usize) -> String {
    if vars <= 9 {
        format!("X{}", j + 1)
    } else {
        format!("X({})", j + 1)
    }
}

impl fmt::Display for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (seq, c)) in terms.iter().enumerate() {
            let mag = c.abs();
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono: String = seq.iter().map(|&j| var_name(j, self.vars)).collect();
            if seq.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}·{}", mag, mono)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Letter;
    use proptest::prelude::*;

    /// Expands a word letter by letter into a dense map, no truncation tricks.
    fn naive(word: &FreeWord, vars: usize, degree: usize) -> HashMap<Vec<usize>, BigInt> {
        let mut cur: HashMap<Vec<usize>, BigInt> = HashMap::new();
        cur.insert(vec![], BigInt::one());
        for l in &word.letters {
            let i = l.symbol.0 as usize;
            let mut factor: Vec<(Vec<usize>, BigInt)> = vec![(vec![], BigInt::one())];
            for k in 1..=degree {
                let c = if !l.inverse {
                    if k > 1 {
                        break;
                    }
                    1
                } else if k % 2 == 0 {
                    1
                } else {
                    -1
                };
                factor.push((vec![i; k], BigInt::from(c)));
            }
            let mut next: HashMap<Vec<usize>, BigInt> = HashMap::new();
            for (m, c) in &cur {
                for (fm, fc) in &factor {
                    if m.len() + fm.len() > degree {
                        continue;
                    }
                    let mut key = m.clone();
                    key.extend(fm);
                    *next.entry(key).or_insert_with(BigInt::zero) += c * fc;
                }
            }
            next.retain(|_, c| !c.is_zero());
            cur = next;
        }
        let _ = vars;
        cur
    }

    fn word(vars: u32) -> impl Strategy<Value = FreeWord> {
        prop::collection::vec((0..vars, any::<bool>()), 0..14).prop_map(|v| {
            FreeWord::from_letters(v.into_iter().map(|(s, inverse)| Letter { symbol: Symbol(s), inverse }).collect())
        })
    }

    fn expand(w: &FreeWord, vars: usize, degree: usize) -> MagnusSeries {
        MagnusSeries::of_word(w, vars, degree, |s| Some(s.0 as usize)).unwrap()
    }

    #[test]
    fn commutator_expansion() {
        let a = FreeWord::generator(Symbol(0));
        let b = FreeWord::generator(Symbol(1));
        let c = FreeWord::commutator(&a, &b);
        let s = expand(&c, 2, 2);
        assert_eq!(s.coefficient(&[0, 1]).unwrap(), BigInt::one());
        assert_eq!(s.coefficient(&[1, 0]).unwrap(), -BigInt::one());
        assert_eq!(s.coefficient(&[0]).unwrap(), BigInt::zero());
        assert_eq!(s.lcs_degree(), Some(2));
        assert_eq!(s.to_string(), "1 + X1X2 - X2X1");
    }

    #[test]
    fn generator_inverse_series() {
        let g = MagnusSeries::generator(1, 0, -1, 4).unwrap();
        assert_eq!(g.to_string(), "1 - X1 + X1X1 - X1X1X1 + X1X1X1X1");
        let p = g.mul(&MagnusSeries::generator(1, 0, 1, 4).unwrap()).unwrap();
        assert!(p.is_one());
    }

    #[test]
    fn errors() {
        let a = MagnusSeries::one(2, 3).unwrap();
        let b = MagnusSeries::one(2, 4).unwrap();
        assert_eq!(a.mul(&b), Err(MagnusError::TruncationMismatch(3, 4)));
        assert!(matches!(a.coefficient(&[0, 0, 0, 0]), Err(MagnusError::SequenceTooLong(4, 3))));
        assert!(matches!(a.coefficient(&[2]), Err(MagnusError::IndexOutOfRange(2, 2))));
        let z = MagnusSeries::zero(2, 3).unwrap();
        assert_eq!(z.inverse(), Err(MagnusError::NotInvertible));
        assert!(matches!(MagnusSeries::one(1000, 12), Err(MagnusError::TooLarge(_, _))));
    }

    proptest! {
        #[test]
        fn matches_naive_expansion(w in word(3)) {
            let s = expand(&w, 3, 4);
            let n = naive(&w, 3, 4);
            let got: HashMap<Vec<usize>, BigInt> = s.terms().into_iter().collect();
            prop_assert_eq!(got, n);
        }

        #[test]
        fn expansion_is_multiplicative(a in word(3), b in word(3)) {
            let lhs = expand(&a.concat(&b), 3, 4);
            let rhs = expand(&a, 3, 4).mul(&expand(&b, 3, 4)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn expansion_ignores_reduction(w in word(2)) {
            prop_assert_eq!(expand(&w, 2, 5), expand(&w.reduce(), 2, 5));
        }

        #[test]
        fn inverse_matches_inverse_word(w in word(3)) {
            let inv = expand(&w, 3, 4).inverse().unwrap();
            prop_assert_eq!(inv, expand(&w.inverse(), 3, 4));
        }

        #[test]
        fn shifts_match_mul(w in word(3), i in 0usize..3) {
            let s = expand(&w, 3, 4);
            let x = MagnusSeries::generator(3, i, 1, 4).unwrap().sub(&MagnusSeries::one(3, 4).unwrap()).unwrap();
            prop_assert_eq!(s.left_var(i).unwrap(), x.mul(&s).unwrap());
            prop_assert_eq!(s.right_var(i).unwrap(), s.mul(&x).unwrap());
        }

        #[test]
        fn commutators_start_in_degree_two(a in word(3), b in word(3)) {
            let c = FreeWord::commutator(&a.reduce(), &b.reduce());
            let s = expand(&c, 3, 4);
            prop_assert!(s.lcs_degree().map_or(true, |d| d >= 2));
        }
    }
}
