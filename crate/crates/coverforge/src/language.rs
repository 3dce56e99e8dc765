//! Per-length factor sets of a subshift, the raw material for Rauzy graphs.

use std::collections::BTreeSet;

use thiserror::Error;

/// For each `n <= n_max`, the set `L_n` of admitted length-`n` words over a
/// finite alphabet of single-character letters. `L_0` is the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageOracle {
    alphabet: Vec<char>,
    factors: Vec<BTreeSet<String>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("factor closure violated: {word} is admitted but its factor {factor} is not")]
    NotFactorClosed { word: String, factor: String },
    #[error("extendability violated: {word} has no {side} extension in the next length")]
    NotExtendable { word: String, side: &'static str },
    #[error("word {word} uses a letter outside the alphabet")]
    LetterOutsideAlphabet { word: String },
    #[error("oracle only covers lengths up to {have}, need {want}")]
    LengthUnavailable { have: usize, want: usize },
}

impl LanguageOracle {
    /// Builds an oracle from explicit factor sets (`factors[n]` = `L_n`,
    /// `factors[0]` must be `{""}`) and validates consistency.
    pub fn new(alphabet: Vec<char>, factors: Vec<BTreeSet<String>>) -> Result<Self, OracleError> {
        let oracle = LanguageOracle { alphabet, factors };
        oracle.validate()?;
        Ok(oracle)
    }

    /// Factors of a finite word, up to length `n_max`. The result describes
    /// the language of the word's factors; extendability holds as long as
    /// the word is long enough that boundary factors also occur inside.
    pub fn from_word(word: &str, n_max: usize) -> Result<Self, OracleError> {
        let mut alphabet: Vec<char> = word.chars().collect::<BTreeSet<_>>().into_iter().collect();
        alphabet.sort_unstable();
        let chars: Vec<char> = word.chars().collect();
        let mut factors = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut set = BTreeSet::new();
            if n == 0 {
                set.insert(String::new());
            } else {
                for w in chars.windows(n) {
                    set.insert(w.iter().collect());
                }
            }
            factors.push(set);
        }
        LanguageOracle::new(alphabet, factors)
    }

    /// The full shift: every word over the alphabet is admitted.
    pub fn full_shift(alphabet_size: usize, n_max: usize) -> Self {
        assert!((1..=10).contains(&alphabet_size));
        let alphabet: Vec<char> = (0..alphabet_size)
            .map(|i| char::from_digit(i as u32, 10).unwrap())
            .collect();
        let mut factors = vec![BTreeSet::from([String::new()])];
        for n in 1..=n_max {
            let mut set = BTreeSet::new();
            for prev in &factors[n - 1] {
                for &c in &alphabet {
                    let mut w = prev.clone();
                    w.push(c);
                    set.insert(w);
                }
            }
            factors.push(set);
        }
        LanguageOracle { alphabet, factors }
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn n_max(&self) -> usize {
        self.factors.len() - 1
    }

    pub fn factors(&self, n: usize) -> Result<&BTreeSet<String>, OracleError> {
        self.factors.get(n).ok_or(OracleError::LengthUnavailable {
            have: self.n_max(),
            want: n,
        })
    }

    pub fn count(&self, n: usize) -> usize {
        self.factors[n].len()
    }

    pub fn admits(&self, word: &str) -> bool {
        word.chars().count() <= self.n_max() && self.factors[word.chars().count()].contains(word)
    }

    /// Factor closure plus left/right extendability within the covered range.
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.factors.is_empty() || self.factors[0] != BTreeSet::from([String::new()]) {
            return Err(OracleError::NotFactorClosed {
                word: String::new(),
                factor: String::new(),
            });
        }
        for n in 1..self.factors.len() {
            for w in &self.factors[n] {
                if !w.chars().all(|c| self.alphabet.contains(&c)) {
                    return Err(OracleError::LetterOutsideAlphabet { word: w.clone() });
                }
                let chars: Vec<char> = w.chars().collect();
                for f in [&chars[..n - 1], &chars[1..]] {
                    let fs: String = f.iter().collect();
                    if !self.factors[n - 1].contains(&fs) {
                        return Err(OracleError::NotFactorClosed {
                            word: w.clone(),
                            factor: fs,
                        });
                    }
                }
            }
            // Every shorter word must extend on both sides.
            for w in &self.factors[n - 1] {
                let right = self.factors[n]
                    .iter()
                    .any(|x| x.len() >= w.len() && x.starts_with(w.as_str()));
                if !right {
                    return Err(OracleError::NotExtendable {
                        word: w.clone(),
                        side: "right",
                    });
                }
                let left = self.factors[n]
                    .iter()
                    .any(|x| x.len() >= w.len() && x.ends_with(w.as_str()));
                if !left {
                    return Err(OracleError::NotExtendable {
                        word: w.clone(),
                        side: "left",
                    });
                }
            }
        }
        Ok(())
    }
}
