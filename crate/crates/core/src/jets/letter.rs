use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// One of the vector fields `Z_α`, `Z_ᾱ` or `∂_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexLetter {
    Holo(u8),
    Anti(u8),
    T,
}

/// Letters in order of application: the first letter acts first.
pub type Word = SmallVec<[IndexLetter; 4]>;

impl IndexLetter {
    fn sort_key(self) -> (u8, u8) {
        match self {
            IndexLetter::Holo(a) => (0, a),
            IndexLetter::Anti(a) => (1, a),
            IndexLetter::T => (2, 0),
        }
    }

    pub fn bar(self) -> IndexLetter {
        match self {
            IndexLetter::Holo(a) => IndexLetter::Anti(a),
            IndexLetter::Anti(a) => IndexLetter::Holo(a),
            IndexLetter::T => IndexLetter::T,
        }
    }

    pub fn index(self) -> Option<u8> {
        match self {
            IndexLetter::Holo(a) | IndexLetter::Anti(a) => Some(a),
            IndexLetter::T => None,
        }
    }

    pub fn is_valid_for(self, n: usize) -> bool {
        self.index().is_none_or(|a| a >= 1 && (a as usize) <= n)
    }

    /// All `2n + 1` letters in canonical order.
    pub fn all(n: usize) -> Vec<IndexLetter> {
        let mut v: Vec<IndexLetter> = (1..=n as u8).map(IndexLetter::Holo).collect();
        v.extend((1..=n as u8).map(IndexLetter::Anti));
        v.push(IndexLetter::T);
        v
    }
}

impl Ord for IndexLetter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for IndexLetter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexLetter::Holo(a) => write!(f, "{a}"),
            IndexLetter::Anti(a) => write!(f, "{a}\u{0304}"),
            IndexLetter::T => write!(f, "0"),
        }
    }
}

pub fn word_to_string(word: &[IndexLetter]) -> String {
    word.iter().map(|l| l.to_string()).collect()
}

pub fn is_canonical(word: &[IndexLetter]) -> bool {
    word.windows(2).all(|w| w[0] <= w[1])
}

/// Every canonical word of the given length over the `2n + 1` letters, in lexicographic order.
pub fn canonical_words(n: usize, len: usize) -> Vec<Word> {
    fn rec(letters: &[IndexLetter], start: usize, len: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..letters.len() {
            cur.push(letters[i]);
            rec(letters, i, len, cur, out);
            cur.pop();
        }
    }
    let letters = IndexLetter::all(n);
    let mut out = Vec::new();
    rec(&letters, 0, len, &mut Word::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_word_counts() {
        // multisets of size k from 2n+1 letters
        assert_eq!(canonical_words(2, 2).len(), 15);
        assert_eq!(canonical_words(3, 3).len(), 84);
        assert!(canonical_words(2, 3).iter().all(|w| is_canonical(w)));
    }

    #[test]
    fn bar_is_an_involution() {
        for l in IndexLetter::all(3) {
            assert_eq!(l.bar().bar(), l);
        }
        assert_eq!(IndexLetter::T.bar(), IndexLetter::T);
    }
}
