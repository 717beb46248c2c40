//! Lysenok's L-presentation of the first Grigorchuk group: the substitution
//! `a → aca, b → d, c → b, d → c`, the generated relator sets, and their
//! verification against the group realized by tree automorphisms.

use crate::error::{Error, Result};
use crate::groups::{parse_word, word_string, Gen, GroupContext};
use crate::word::is_identity;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Letter-by-letter substitution on words over `{a, b, c, d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    rules: [Vec<Gen>; 4],
}

impl Default for Substitution {
    fn default() -> Self {
        Substitution::lysenok()
    }
}

impl Substitution {
    pub fn lysenok() -> Self {
        use Gen::*;
        Substitution {
            rules: [vec![A, C, A], vec![D], vec![B], vec![C]],
        }
    }

    pub fn image(&self, g: Gen) -> &[Gen] {
        &self.rules[g as usize]
    }

    pub fn apply(&self, word: &[Gen]) -> Vec<Gen> {
        word.iter()
            .flat_map(|&g| self.rules[g as usize].iter().copied())
            .collect()
    }

    /// `times`-fold application.
    pub fn apply_times(&self, word: &[Gen], times: usize) -> Vec<Gen> {
        let mut w = word.to_vec();
        for _ in 0..times {
            w = self.apply(&w);
        }
        w
    }
}

pub fn apply_substitution(word: &[Gen], times: usize) -> Vec<Gen> {
    Substitution::lysenok().apply_times(word, times)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relator {
    /// `None` for the base relators, `Some(k)` for `σ^k` images.
    pub level: Option<usize>,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorSet {
    pub max_level: usize,
    relators: Vec<(Option<usize>, Vec<Gen>)>,
}

/// Words longer than this are refused by [`generate_relators`].
pub const DEFAULT_MAX_RELATOR_LENGTH: usize = 1 << 22;

impl RelatorSet {
    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &[Gen]> {
        self.relators.iter().map(|(_, w)| w.as_slice())
    }

    pub fn relators(&self) -> Vec<Relator> {
        self.relators
            .iter()
            .map(|(level, w)| Relator {
                level: *level,
                word: word_string(w),
            })
            .collect()
    }

    pub fn max_length(&self) -> usize {
        self.words().map(<[Gen]>::len).max().unwrap_or(0)
    }

    /// One relator per line.
    pub fn to_text(&self) -> String {
        self.words().map(|w| word_string(w) + "\n").collect()
    }

    pub fn from_text(text: &str) -> Result<Vec<Vec<Gen>>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(parse_word)
            .collect()
    }
}

pub fn generate_relators(max_level: usize) -> Result<RelatorSet> {
    generate_relators_with(max_level, DEFAULT_MAX_RELATOR_LENGTH)
}

pub fn generate_relators_with(max_level: usize, max_length: usize) -> Result<RelatorSet> {
    let bound = 3usize
        .checked_pow(max_level as u32)
        .and_then(|p| p.checked_mul(24));
    if bound.is_none_or(|b| b > max_length) {
        return Err(Error::ResourceCap(format!(
            "σ^{max_level} relators may exceed {max_length} letters"
        )));
    }
    let sigma = Substitution::lysenok();
    let mut relators: Vec<(Option<usize>, Vec<Gen>)> = ["aa", "bb", "cc", "dd", "bcd"]
        .iter()
        .map(|w| (None, parse_word(w).unwrap()))
        .collect();
    for base in ["adadadad", "adacacadacacadacacadacac"] {
        let mut w = parse_word(base).unwrap();
        for k in 0..=max_level {
            relators.push((Some(k), w.clone()));
            w = sigma.apply(&w);
        }
    }
    relators.sort_by_key(|(level, w)| (level.map_or(0, |k| k + 1), w.len()));
    Ok(RelatorSet {
        max_level,
        relators,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorReport {
    pub checked: usize,
    pub max_length: usize,
}

/// Checks every relator with the exact word problem; the first failure (in
/// set order) is returned as an error.
pub fn verify_relators(ctx: &GroupContext, set: &RelatorSet) -> Result<RelatorReport> {
    let failures: Vec<bool> = set
        .relators
        .par_iter()
        .map(|(_, w)| !is_identity(ctx, w))
        .collect();
    if let Some(i) = failures.iter().position(|&f| f) {
        return Err(Error::RelatorFailed(word_string(&set.relators[i].1)));
    }
    Ok(RelatorReport {
        checked: set.len(),
        max_length: set.max_length(),
    })
}
