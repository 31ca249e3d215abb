use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Signed generator index: `k` is the k-th generator, `-k` its inverse.
pub type Letter = i8;

/// Freely reduced word.  Lowercase letters are generators, capitals their
/// inverses (`a` = 1, `A` = -1, `b` = 2, ...).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

/// Position of a letter in the fixed generator order `a, A, b, B, ...`.
#[inline]
pub fn letter_rank(l: Letter) -> u8 {
    ((l.unsigned_abs() - 1) << 1) | u8::from(l < 0)
}

pub fn letter_char(l: Letter) -> char {
    let c = (b'a' + l.unsigned_abs() - 1) as char;
    if l < 0 {
        c.to_ascii_uppercase()
    } else {
        c
    }
}

pub fn char_letter(c: char) -> Option<Letter> {
    if c.is_ascii_lowercase() {
        Some((c as u8 - b'a' + 1) as Letter)
    } else if c.is_ascii_uppercase() {
        Some(-((c as u8 - b'A' + 1) as Letter))
    } else {
        None
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn generator(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Appends one letter, cancelling if it inverts the last one.
    pub fn push(&mut self, l: Letter) {
        debug_assert!(l != 0);
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
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

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    /// Free product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let common = self
            .0
            .iter()
            .rev()
            .zip(&other.0)
            .take_while(|(a, b)| **a == -**b)
            .count();
        let mut v = Vec::with_capacity(self.len() + other.len() - 2 * common);
        v.extend_from_slice(&self.0[..self.len() - common]);
        v.extend_from_slice(&other.0[common..]);
        Word(v)
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Splits `self = u · c · u⁻¹` with `c` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == -self.0[n - 1 - k] {
            k += 1;
        }
        (Word(self.0[..k].to_vec()), Word(self.0[k..n - k].to_vec()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() < 2 || self.0[0] != -self.0[self.len() - 1]
    }

    /// Rotation starting at position `i` (for cyclically reduced words).
    pub fn rotate(&self, i: usize) -> Word {
        let mut v = self.0[i..].to_vec();
        v.extend_from_slice(&self.0[..i]);
        Word(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k..].to_vec())
    }

    /// Length of the longest common prefix.
    pub fn common_prefix(&self, other: &Word) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }

    /// Free-group distance `|self⁻¹ · other|`.
    pub fn distance(&self, other: &Word) -> usize {
        self.len() + other.len() - 2 * self.common_prefix(other)
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> u8 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    /// Shortlex order with generators ordered `a, A, b, B, ...`.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                let c = letter_rank(*a).cmp(&letter_rank(*b));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }

    pub(crate) fn from_raw(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for &l in &self.0 {
            write!(f, "{}", letter_char(l))?;
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

    /// Parses `abAB`; `1` or the empty string is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity());
        }
        let letters = s
            .chars()
            .map(|c| char_letter(c).ok_or_else(|| Error::Invalid(format!("bad letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::new(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn free_reduction() {
        assert!(w("a").mul(&w("A")).is_identity());
        assert_eq!(w("ab").mul(&w("Ba")), w("aa"));
        assert_eq!(w("abBA"), Word::identity());
        assert_eq!(w("abc").inverse(), w("CBA"));
    }

    #[test]
    fn cyclic_reduction_of_conjugates() {
        let (u, c) = w("abA").cyclic_reduction();
        assert_eq!((u, c), (w("a"), w("b")));
        let (u, c) = w("aabAB").cyclic_reduction();
        assert_eq!(u.len() * 2 + c.len(), 5);
        assert!(c.is_cyclically_reduced());
    }

    #[test]
    fn shortlex_uses_generator_order() {
        let mut v = vec![w("b"), w("A"), w("a"), w("B"), w("aa")];
        v.sort();
        assert_eq!(v, vec![w("a"), w("A"), w("b"), w("B"), w("aa")]);
    }

    #[test]
    fn display_round_trip() {
        for s in ["1", "abAB", "ccA"] {
            assert_eq!(w(s).to_string(), s);
        }
    }
}
