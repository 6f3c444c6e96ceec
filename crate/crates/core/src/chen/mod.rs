//! Word combinatorics and truncated tensor-series algebra for the basic
//! iterated integrals: the index set `U/m^{K+1}`, the shuffle product used
//! to test integral identities, and the concatenation product under which
//! the integral-valued series of a cycle is group-like.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_CAPACITY: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChenError {
    #[error("word basis needs {needed} entries, capacity is {limit}")]
    CapacityExceeded { needed: usize, limit: usize },
    #[error("series defined over different word bases")]
    BasisMismatch,
    #[error("shuffle result length {len} exceeds basis truncation {max}")]
    ShuffleOverflow { len: usize, max: usize },
}

/// A word in the letters `1..=N` indexing one basic iterated integral.
/// The empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(letter: u16) -> Self {
        Word(vec![letter])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", l)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// All words of length at most `K` over `N = n^2` letters, ordered by length
/// then lexicographically. Index 0 is the empty word and the length-k block
/// is contiguous with `N^k` entries.
#[derive(Clone, Debug)]
pub struct WordBasis {
    pub n: usize,
    pub k_max: usize,
    pub n_letters: usize,
    words: Vec<Word>,
    /// Start index of each length block; `block_start[k]` is where length-k
    /// words begin, with a final sentinel equal to the total count.
    block_start: Vec<usize>,
}

impl WordBasis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, idx: usize) -> &Word {
        &self.words[idx]
    }

    pub fn block_range(&self, k: usize) -> std::ops::Range<usize> {
        self.block_start[k]..self.block_start[k + 1]
    }

    /// Index of a word; `None` if letters are out of range or it is too long.
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        let k = w.len();
        if k > self.k_max {
            return None;
        }
        let mut val = 0usize;
        for &l in w.letters() {
            if l == 0 || l as usize > self.n_letters {
                return None;
            }
            val = val * self.n_letters + (l as usize - 1);
        }
        Some(self.block_start[k] + val)
    }

    /// Rebuilds the word list after deserialization.
    pub fn rebuild(&mut self) {
        *self = enumerate_words_with_capacity(self.n, self.k_max, usize::MAX)
            .expect("rebuild within capacity");
    }
}

/// Enumerates the word basis for `N = n^2` letters truncated at length `K`.
pub fn enumerate_words(n: usize, k_max: usize) -> Result<Arc<WordBasis>, ChenError> {
    enumerate_words_with_capacity(n, k_max, DEFAULT_CAPACITY).map(Arc::new)
}

pub fn enumerate_words_with_capacity(
    n: usize,
    k_max: usize,
    limit: usize,
) -> Result<WordBasis, ChenError> {
    assert!(n >= 1, "need n >= 1");
    let n_letters = n * n;
    let mut total = 1usize;
    let mut block = 1usize;
    let mut block_start = vec![0usize];
    for _ in 1..=k_max {
        block_start.push(total);
        block = block
            .checked_mul(n_letters)
            .ok_or(ChenError::CapacityExceeded {
                needed: usize::MAX,
                limit,
            })?;
        total = total
            .checked_add(block)
            .ok_or(ChenError::CapacityExceeded {
                needed: usize::MAX,
                limit,
            })?;
        if total > limit {
            return Err(ChenError::CapacityExceeded {
                needed: total,
                limit,
            });
        }
    }
    block_start.push(total);
    if total > limit {
        return Err(ChenError::CapacityExceeded {
            needed: total,
            limit,
        });
    }

    let mut words = Vec::with_capacity(total);
    words.push(Word::empty());
    for k in 1..=k_max {
        let mut current = vec![1u16; k];
        'block: loop {
            words.push(Word(current.clone()));
            // Odometer increment, rightmost letter fastest.
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                if (current[pos] as usize) < n_letters {
                    current[pos] += 1;
                    for c in current.iter_mut().skip(pos + 1) {
                        *c = 1;
                    }
                    continue 'block;
                }
            }
            break;
        }
    }
    assert_eq!(words.len(), total);
    Ok(WordBasis {
        n,
        k_max,
        n_letters,
        words,
        block_start,
    })
}

/// All `(|u|, |v|)`-shuffles of `u` and `v`, with multiplicity.
pub fn shuffle(u: &Word, v: &Word) -> Vec<Word> {
    fn go(u: &[u16], v: &[u16], prefix: &mut Vec<u16>, out: &mut Vec<Word>) {
        if u.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(v);
            out.push(Word(w));
            return;
        }
        if v.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(u);
            out.push(Word(w));
            return;
        }
        prefix.push(u[0]);
        go(&u[1..], v, prefix, out);
        prefix.pop();
        prefix.push(v[0]);
        go(u, &v[1..], prefix, out);
        prefix.pop();
    }
    let mut out = Vec::new();
    go(u.letters(), v.letters(), &mut Vec::new(), &mut out);
    out
}

/// Scalar for the truncated tensor algebra: the same machinery is used over
/// `f64`/complex (numeric series of a cycle) and over rational functions
/// (symbolic connection assembly).
pub trait SeriesScalar: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn is_zero_scalar(&self) -> bool;
}

impl SeriesScalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero_scalar(&self) -> bool {
        *self == 0.0
    }
}

impl SeriesScalar for num_complex::Complex64 {
    fn zero_like(&self) -> Self {
        Self::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Self::new(1.0, 0.0)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero_scalar(&self) -> bool {
        self.norm_sqr() == 0.0
    }
}

impl SeriesScalar for crate::algebra::RationalFunction {
    fn zero_like(&self) -> Self {
        Self::zero(self.var())
    }
    fn one_like(&self) -> Self {
        Self::one(self.var())
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero_scalar(&self) -> bool {
        self.is_zero()
    }
}

/// An element of the truncated semigroup algebra: one coefficient per word.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<S: SeriesScalar> {
    pub basis: Arc<WordBasis>,
    pub coeffs: Vec<S>,
}

impl<S: SeriesScalar> TruncatedSeries<S> {
    /// The unit series `e`.
    pub fn unit(basis: Arc<WordBasis>, one: S) -> Self {
        let zero = one.zero_like();
        let mut coeffs = vec![zero; basis.len()];
        coeffs[0] = one;
        Self { basis, coeffs }
    }

    pub fn from_coeffs(basis: Arc<WordBasis>, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), basis.len());
        Self { basis, coeffs }
    }

    pub fn coeff(&self, w: &Word) -> Option<&S> {
        self.basis.index_of(w).map(|i| &self.coeffs[i])
    }

    /// Concatenation product truncated at length `K`: the coefficient of a
    /// word is the sum over its splittings `w = u·v` of `a(u)·b(v)`.
    pub fn truncated_product(&self, other: &Self) -> Result<Self, ChenError> {
        if !Arc::ptr_eq(&self.basis, &other.basis)
            && (self.basis.n_letters != other.basis.n_letters
                || self.basis.k_max != other.basis.k_max)
        {
            return Err(ChenError::BasisMismatch);
        }
        let basis = &self.basis;
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; basis.len()];
        for (idx, w) in basis.words().iter().enumerate() {
            let letters = w.letters();
            let mut acc = self.coeffs[0].zero_like();
            for split in 0..=letters.len() {
                let u = Word(letters[..split].to_vec());
                let v = Word(letters[split..].to_vec());
                let iu = basis.index_of(&u).expect("subword in basis");
                let iv = basis.index_of(&v).expect("subword in basis");
                acc = acc.add_ref(&self.coeffs[iu].mul_ref(&other.coeffs[iv]));
            }
            out[idx] = acc;
        }
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: out,
        })
    }

    /// Truncated inverse of a series with unit constant term: the geometric
    /// series `e - m + m^2 - ...` in `m = a - e`, exact at the coefficient
    /// level after `K` terms.
    pub fn group_inverse(&self) -> Self {
        let one = self.coeffs[0].one_like();
        let unit = Self::unit(self.basis.clone(), one);
        // m = a - e
        let mut m = self.clone();
        m.coeffs[0] = m.coeffs[0].sub_ref(&unit.coeffs[0]);
        let mut acc = unit.clone();
        let mut power = unit.clone();
        let mut sign_neg = true;
        for _ in 1..=self.basis.k_max {
            power = power.truncated_product(&m).expect("same basis");
            for (a, p) in acc.coeffs.iter_mut().zip(&power.coeffs) {
                *a = if sign_neg { a.sub_ref(p) } else { a.add_ref(p) };
            }
            sign_neg = !sign_neg;
        }
        acc
    }
}
