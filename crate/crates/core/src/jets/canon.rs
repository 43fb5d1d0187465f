//! Reordering words with the Heisenberg commutator.

use std::collections::BTreeMap;

use crate::algebra::GaussianRational;

use super::letter::{IndexLetter, Word};

/// Rewrite a word as a combination of canonical words.
///
/// Canonical order is holomorphic letters ascending, then antiholomorphic ascending, then
/// `0`s. The only nonzero commutator is `[Z_α, Z_ᾱ] = −2i ∂_t`, and `∂_t` is central, so
/// moving an `α` applied after `ᾱ` in front of it costs `−2i` times the word with the pair
/// replaced by `0`.
pub fn canonicalize_letters(word: &[IndexLetter]) -> BTreeMap<Word, GaussianRational> {
    let mut out = BTreeMap::new();
    accumulate(word, GaussianRational::one(), &mut out);
    out.retain(|_, c| !c.is_zero());
    out
}

fn accumulate(word: &[IndexLetter], coeff: GaussianRational, out: &mut BTreeMap<Word, GaussianRational>) {
    let pos = word.windows(2).position(|w| w[0] > w[1]);
    let Some(j) = pos else {
        *out.entry(Word::from_slice(word)).or_insert_with(GaussianRational::zero) += &coeff;
        return;
    };
    let mut swapped = Word::from_slice(word);
    swapped.swap(j, j + 1);
    accumulate(&swapped, coeff.clone(), out);
    // f_{..a b..} = Z_b Z_a f_.. = Z_a Z_b f_.. + [Z_b, Z_a] f_..
    if let (IndexLetter::Anti(a), IndexLetter::Holo(b)) = (word[j], word[j + 1]) {
        if a == b {
            let mut reduced = Word::from_slice(&word[..j]);
            reduced.push(IndexLetter::T);
            reduced.extend_from_slice(&word[j + 2..]);
            let c = &coeff * &GaussianRational::int(-2).mul_i();
            accumulate(&reduced, c, out);
        }
    }
}
