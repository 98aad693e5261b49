use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Generator `a_k` or its inverse; stored as `+k` / `-k` with `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i8);

impl Letter {
    /// Letter for generator `index` (zero-based).
    pub fn new(index: usize, inverse: bool) -> Self {
        assert!(index < 26, "at most 26 generators");
        let k = index as i8 + 1;
        Letter(if inverse { -k } else { k })
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        if c.is_ascii_lowercase() {
            Ok(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Ok(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            Err(Error::InvalidInput(format!("invalid letter {c:?} in word")))
        }
    }
}

/// Reduced word in a free group: a vertex of the Cayley tree, or the
/// isometry acting on it by left multiplication.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl FreeWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Freely reduces the given letters.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Self { letters: out }
    }

    pub fn letter(l: Letter) -> Self {
        Self { letters: vec![l] }
    }

    /// Generator `index` (zero-based) as a one-letter word.
    pub fn generator(index: usize) -> Self {
        Self::letter(Letter::new(index, false))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Largest generator index used, plus one.
    pub fn rank_used(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.generator() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.letters.clone();
        for &l in &rhs.letters {
            push_reduced(&mut out, l);
        }
        Self { letters: out }
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Writes `self = u c u^{-1}` with `c` cyclically reduced and no
    /// cancellation in the product; returns `(u, c)`.
    pub fn cyclic_reduction(&self) -> (FreeWord, FreeWord) {
        let w = &self.letters;
        let n = w.len();
        let mut k = 0;
        while 2 * k + 1 < n && w[k] == w[n - 1 - k].inverse() {
            k += 1;
        }
        (
            FreeWord {
                letters: w[..k].to_vec(),
            },
            FreeWord {
                letters: w[k..n - k].to_vec(),
            },
        )
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Self) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Shortest period `p` with `self = p^k`.
    pub fn primitive_root(&self) -> FreeWord {
        let n = self.len();
        for p in 1..=n {
            if n % p == 0 && (p..n).all(|i| self.letters[i] == self.letters[i - p]) {
                return FreeWord {
                    letters: self.letters[..p].to_vec(),
                };
            }
        }
        self.clone()
    }

    pub(crate) fn rotate_left(&self, j: usize) -> FreeWord {
        let mut v = self.letters.clone();
        if !v.is_empty() {
            let n = v.len();
            v.rotate_left(j % n);
        }
        FreeWord { letters: v }
    }

    pub(crate) fn pop(&mut self) -> Option<Letter> {
        self.letters.pop()
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    /// Letters `a, b, ...` are generators and `A, B, ...` their inverses;
    /// `""` and `"1"` denote the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Self::identity());
        }
        let letters = s
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_letters(letters))
    }
}

/// Eventually periodic reduced infinite word `prefix · period^∞`, a point
/// of the boundary of the Cayley tree.
///
/// Always canonical: `period` is primitive and cyclically reduced, and the
/// prefix is as short as possible, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeRay {
    prefix: FreeWord,
    period: FreeWord,
}

impl TreeRay {
    /// The ray `prefix · period^∞`; the period may be any nontrivial word.
    pub fn new(prefix: FreeWord, period: FreeWord) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput(
                "ray period must be a nontrivial word".into(),
            ));
        }
        let (u, c) = period.cyclic_reduction();
        let base = TreeRay {
            prefix: FreeWord::identity(),
            period: c.primitive_root(),
        };
        Ok(base.act(&prefix.mul(&u)))
    }

    /// `w^∞` for a nontrivial word `w`: the attracting end of `w`.
    pub fn power_ray(w: &FreeWord) -> Result<Self> {
        Self::new(FreeWord::identity(), w.clone())
    }

    /// The ray continuing `w` by repeating its last letter.
    pub fn extend_by_last(w: &FreeWord) -> Result<Self> {
        match w.last() {
            Some(l) => Self::new(w.clone(), FreeWord::letter(l)),
            None => Err(Error::InvalidInput("cannot extend the empty word".into())),
        }
    }

    pub fn prefix(&self) -> &FreeWord {
        &self.prefix
    }

    pub fn period(&self) -> &FreeWord {
        &self.period
    }

    /// Letter at position `i` of the infinite word.
    pub fn letter_at(&self, i: usize) -> Letter {
        let p = self.prefix.len();
        if i < p {
            self.prefix.letters[i]
        } else {
            self.period.letters[(i - p) % self.period.len()]
        }
    }

    /// First `n` letters.
    pub fn truncate(&self, n: usize) -> FreeWord {
        FreeWord {
            letters: (0..n).map(|i| self.letter_at(i)).collect(),
        }
    }

    /// Length of the common prefix with another ray; `None` when equal.
    pub fn common_prefix_len(&self, other: &TreeRay) -> Option<usize> {
        let bound =
            self.prefix.len().max(other.prefix.len()) + self.period.len() + other.period.len();
        (0..bound).find(|&i| self.letter_at(i) != other.letter_at(i))
    }

    /// Length of the common prefix with a finite word.
    pub fn common_prefix_with_word(&self, w: &FreeWord) -> usize {
        (0..w.len())
            .take_while(|&i| self.letter_at(i) == w.letters[i])
            .count()
    }

    /// Left multiplication `g · self`.
    pub fn act(&self, g: &FreeWord) -> TreeRay {
        let mut w = g.mul(&self.prefix);
        let n = self.period.len();
        let mut j = 0usize;
        while let Some(l) = w.last() {
            if l == self.period.letters[j % n].inverse() {
                w.pop();
                j += 1;
            } else {
                break;
            }
        }
        let mut prefix = w;
        let mut period = self.period.rotate_left(j % n);
        while prefix.last().is_some() && prefix.last() == period.last() {
            prefix.pop();
            period = period.rotate_left(n - 1);
        }
        TreeRay { prefix, period }
    }
}

impl fmt::Display for TreeRay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "{}", self.prefix)?;
        }
        write!(f, "({})", self.period)
    }
}

impl FromStr for TreeRay {
    type Err = Error;

    /// `"ab(c)"` denotes `a b c c c ...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::InvalidInput(format!("ray {s:?} lacks a (period)")))?;
        if !s.ends_with(')') {
            return Err(Error::InvalidInput(format!("ray {s:?} must end with ')'")));
        }
        let prefix: FreeWord = s[..open].parse()?;
        let period: FreeWord = s[open + 1..s.len() - 1].parse()?;
        TreeRay::new(prefix, period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    fn ray(s: &str) -> TreeRay {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_and_display() {
        assert_eq!(w("abBa").to_string(), "aa");
        assert_eq!(w("aA").to_string(), "1");
        assert_eq!(w("ab").inverse().to_string(), "BA");
    }

    #[test]
    fn cyclic_reduction_splits_conjugator() {
        let (u, c) = w("abA").cyclic_reduction();
        assert_eq!((u.to_string(), c.to_string()), ("a".into(), "b".into()));
        let (u, c) = w("ab").cyclic_reduction();
        assert!(u.is_empty());
        assert_eq!(c, w("ab"));
    }

    #[test]
    fn canonical_rays() {
        assert_eq!(ray("a(a)"), ray("(a)"));
        assert_eq!(ray("(abab)"), ray("(ab)"));
        assert_eq!(ray("b(ab)"), ray("(ba)"));
        assert_eq!(ray("(bAB)"), ray("b(A)"));
        assert_eq!(ray("(a)").act(&w("A")), ray("(a)"));
        assert_eq!(ray("(a)").act(&w("bA")), ray("b(a)"));
        assert_eq!(ray("a(b)").act(&w("A")), ray("(b)"));
    }

    #[test]
    fn common_prefixes() {
        assert_eq!(ray("(a)").common_prefix_len(&ray("a(b)")), Some(1));
        assert_eq!(ray("(a)").common_prefix_len(&ray("(a)")), None);
        assert_eq!(ray("(ab)").common_prefix_len(&ray("(aba)")), Some(3));
    }
}
