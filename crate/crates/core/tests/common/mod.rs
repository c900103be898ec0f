//! Naive reference implementations used as oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::Zero;
use superpoints::grassmann::monomial_indices;
use superpoints::{GrassmannElement, Rational};

/// Multiplies two generator words by bubble-sorting their concatenation and
/// counting transpositions; a repeated generator kills the word.
pub fn word_product(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut word: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut swaps = 0usize;
    for i in 0..word.len() {
        for j in 0..word.len() - 1 - i {
            if word[j] > word[j + 1] {
                word.swap(j, j + 1);
                swaps += 1;
            } else if word[j] == word[j + 1] {
                return None;
            }
        }
    }
    if word.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((word, swaps % 2 == 1))
}

pub type Words = BTreeMap<Vec<usize>, Rational>;

pub fn words(a: &GrassmannElement) -> Words {
    a.terms().map(|(m, c)| (monomial_indices(m), c.clone())).collect()
}

pub fn naive_mul(a: &Words, b: &Words) -> Words {
    let mut out = Words::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if let Some((w, negative)) = word_product(wa, wb) {
                let c = ca * cb;
                let slot = out.entry(w).or_insert_with(Rational::zero);
                if negative {
                    *slot -= c;
                } else {
                    *slot += c;
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn naive_add(a: &Words, b: &Words) -> Words {
    let mut out = a.clone();
    for (w, c) in b {
        *out.entry(w.clone()).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}
