//! Finite words over the alphabet, their maps and cylinder intervals, and the
//! derived subsystems built from level-`n` words.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::{family_interval, family_matrices, require_positive_parameter};
use crate::moebius::{IfsInstance, Interval, Matrix2, MoebiusMap};
use crate::rational::Rational;

/// A finite word; symbols are 1-based indices into a list of maps.
///
/// Serialized as a plain digit string (`"123"`); the empty word is `""`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn repeat(symbol: u8, count: usize) -> Self {
        Word(vec![symbol; count])
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut s = self.0.clone();
        s.extend_from_slice(&other.0);
        Word(s)
    }

    pub fn push(&self, symbol: u8) -> Word {
        let mut s = self.0.clone();
        s.push(symbol);
        Word(s)
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.0.contains(&symbol)
    }

    /// Cuts the word after every 3. Returns the pieces (each ending in its
    /// only 3) and the trailing remainder that contains no 3.
    pub fn split_after_threes(&self) -> (Vec<Word>, Word) {
        let mut pieces = Vec::new();
        let mut current = Vec::new();
        for &s in &self.0 {
            current.push(s);
            if s == 3 {
                pieces.push(Word(std::mem::take(&mut current)));
            }
        }
        (pieces, Word(current))
    }

    /// Zero-based map indices.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&s| s as usize - 1)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d >= 1 => Ok(d as u8),
                _ => Err(Error::Parse(format!("bad symbol {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Streams all words of length `n` over `alphabet` in lexicographic order
/// (first symbol most significant, smaller symbols first).
#[derive(Debug, Clone)]
pub struct Words {
    alphabet: Vec<u8>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Words {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let word = Word(self.digits.iter().map(|&i| self.alphabet[i]).collect());
        // odometer increment from the right
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.alphabet.len() {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(word)
    }
}

pub fn enumerate(alphabet: &[u8], n: usize) -> Words {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    Words {
        done: alphabet.is_empty() && n > 0,
        alphabet,
        digits: vec![0; n],
    }
}

/// Order on `{1,2}^k` with `1^k < 21^(k-1) < 121^(k-2) < ... < 12^(k-1) < 2^k`.
///
/// The last symbol is the most significant one, so the successor of
/// `2^m 1 u` is `1^m 2 u`.
pub fn lex_compare(v: &Word, w: &Word) -> Result<Ordering> {
    if v.len() != w.len() {
        return Err(Error::Domain(format!("words {v} and {w} differ in length")));
    }
    if let Some(bad) = v.0.iter().chain(&w.0).find(|&&s| s != 1 && s != 2) {
        return Err(Error::Domain(format!("symbol {bad} outside {{1,2}}")));
    }
    Ok(v.0.iter().rev().cmp(w.0.iter().rev()))
}

/// `{1,2}^k` sorted by [`lex_compare`].
pub fn lex_sorted_binary_words(k: usize) -> Vec<Word> {
    let mut words: Vec<Word> = enumerate(&[1, 2], k).collect();
    words.sort_by(|v, w| lex_compare(v, w).unwrap());
    words
}

/// Matrix of `f_u` for the maps with matrices `gens` (symbol `i` is `gens[i-1]`).
pub fn matrix_of_word_in(u: &Word, gens: &[Matrix2]) -> Result<Matrix2> {
    let mut m = Matrix2::identity();
    for i in u.indices() {
        let g = gens
            .get(i)
            .ok_or_else(|| Error::Domain(format!("symbol {} outside alphabet of {}", i + 1, gens.len())))?;
        m = &m * g;
    }
    Ok(m)
}

/// `f_u = f_{u1} o ... o f_{un}` for the family at parameter `t`.
pub fn map_of_word(u: &Word, t: &Rational) -> Result<MoebiusMap> {
    require_positive_parameter(t)?;
    Ok(MoebiusMap::new(matrix_of_word_in(u, &family_matrices(t))?))
}

/// Cylinder interval `I_u = f_u(I_t)`.
pub fn cylinder(u: &Word, t: &Rational) -> Result<Interval> {
    map_of_word(u, t)?.image_interval(&family_interval(t))
}

/// Cylinder of `u` in an arbitrary system.
pub fn cylinder_in(u: &Word, ifs: &IfsInstance) -> Result<Interval> {
    MoebiusMap::new(matrix_of_word_in(u, &ifs.matrices())?).image_interval(&ifs.invariant_interval)
}

/// Calls `visit` with the zero-based indices and matrix of every word of
/// length exactly `n`, in lexicographic order, sharing prefix products.
pub fn for_each_product<F>(gens: &[Matrix2], n: usize, mut visit: F)
where
    F: FnMut(&[usize], &Matrix2),
{
    walk(gens, n, n, &mut Vec::with_capacity(n), &Matrix2::identity(), &mut |w, m| {
        visit(w, m)
    });
}

/// Like [`for_each_product`] but visits every word of length `1..=n`
/// (depth-first: a word is visited before its extensions).
pub fn for_each_product_upto<F>(gens: &[Matrix2], n: usize, mut visit: F)
where
    F: FnMut(&[usize], &Matrix2),
{
    walk(gens, n, 1, &mut Vec::with_capacity(n), &Matrix2::identity(), &mut |w, m| {
        visit(w, m)
    });
}

fn walk(
    gens: &[Matrix2],
    depth: usize,
    min_visit: usize,
    prefix: &mut Vec<usize>,
    m: &Matrix2,
    visit: &mut dyn FnMut(&[usize], &Matrix2),
) {
    if prefix.len() >= min_visit {
        visit(prefix, m);
    }
    if prefix.len() == depth {
        return;
    }
    for (i, g) in gens.iter().enumerate() {
        prefix.push(i);
        let next = m * g;
        walk(gens, depth, min_visit, prefix, &next, visit);
        prefix.pop();
    }
}

/// Maps every level-`n` product through `f` and returns the results in
/// lexicographic word order. With the `parallel` feature the work is split by
/// first symbol; the output order does not depend on scheduling.
pub fn map_level<T, F>(gens: &[Matrix2], n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[usize], &Matrix2) -> T + Sync,
{
    if n == 0 {
        return vec![f(&[], &Matrix2::identity())];
    }
    let branch = |first: usize| {
        let mut out = Vec::new();
        let mut prefix = vec![first];
        walk(gens, n, n, &mut prefix, &gens[first], &mut |w, m| out.push(f(w, m)));
        out
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<T>> = {
        use rayon::prelude::*;
        (0..gens.len()).into_par_iter().map(branch).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<T>> = (0..gens.len()).map(branch).collect();
    parts.into_iter().flatten().collect()
}

pub fn word_from_indices(indices: &[usize]) -> Word {
    Word(indices.iter().map(|&i| (i + 1) as u8).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubsystemVariant {
    /// All `u` in `{1,2,3}^n` containing at least one 3.
    FullLevelNContaining3,
    /// All `u = v3` with `v` in `{1,2}*` and `|u| <= n`.
    TildeV3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemSpec {
    pub t: Rational,
    pub level: usize,
    pub variant: SubsystemVariant,
}

impl SubsystemSpec {
    pub fn full(t: Rational, level: usize) -> Self {
        SubsystemSpec { t, level, variant: SubsystemVariant::FullLevelNContaining3 }
    }

    pub fn tilde(t: Rational, level: usize) -> Self {
        SubsystemSpec { t, level, variant: SubsystemVariant::TildeV3 }
    }

    /// The words making up the subsystem, in deterministic order.
    pub fn words(&self) -> Result<Vec<Word>> {
        if self.level == 0 {
            return Err(Error::Domain("subsystem level must be at least 1".into()));
        }
        Ok(match self.variant {
            SubsystemVariant::FullLevelNContaining3 => {
                enumerate(&[1, 2, 3], self.level).filter(|u| u.contains(3)).collect()
            }
            SubsystemVariant::TildeV3 => tilde_words(self.level),
        })
    }
}

/// `{v3 : v in {1,2}^j, 0 <= j < n}`, shortest first, lexicographic within a length.
pub fn tilde_words(n: usize) -> Vec<Word> {
    (0..n).flat_map(|j| enumerate(&[1, 2], j).map(|v| v.push(3))).collect()
}

/// A derived system together with the words of the base family realizing its maps.
#[derive(Debug, Clone)]
pub struct Subsystem {
    pub spec: SubsystemSpec,
    pub words: Vec<Word>,
    pub ifs: IfsInstance,
}

pub fn build_subsystem(spec: &SubsystemSpec) -> Result<Subsystem> {
    require_positive_parameter(&spec.t)?;
    let words = spec.words()?;
    let gens = family_matrices(&spec.t);
    let maps = words
        .iter()
        .map(|u| matrix_of_word_in(u, &gens).map(MoebiusMap::new))
        .collect::<Result<Vec<_>>>()?;
    let ifs = IfsInstance::new(maps, family_interval(&spec.t))?;
    Ok(Subsystem { spec: spec.clone(), words, ifs })
}
