//! Substitutions between finite alphabets and S-adic systems.

use std::fmt;

use thiserror::Error;

/// A substitution `chi : A -> B*` sending each domain letter to a nonempty
/// word over the codomain alphabet. Letters are named; images are stored as
/// codomain letter indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    domain: Vec<String>,
    codomain: Vec<String>,
    images: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstitutionError {
    #[error("letter {letter} has an empty image")]
    EmptyImage { letter: String },
    #[error("image of {letter} uses codomain index {index} out of range")]
    IndexOutOfRange { letter: String, index: usize },
    #[error("expected one image per domain letter: {have} images for {want} letters")]
    ImageArity { have: usize, want: usize },
    #[error("unknown letter {0}")]
    UnknownLetter(String),
    #[error("substitution {position}: domain does not match the previous codomain")]
    AlphabetMismatch { position: usize },
}

impl Substitution {
    pub fn new(
        domain: Vec<String>,
        codomain: Vec<String>,
        images: Vec<Vec<usize>>,
    ) -> Result<Self, SubstitutionError> {
        if images.len() != domain.len() {
            return Err(SubstitutionError::ImageArity {
                have: images.len(),
                want: domain.len(),
            });
        }
        for (l, img) in domain.iter().zip(&images) {
            if img.is_empty() {
                return Err(SubstitutionError::EmptyImage { letter: l.clone() });
            }
            for &i in img {
                if i >= codomain.len() {
                    return Err(SubstitutionError::IndexOutOfRange {
                        letter: l.clone(),
                        index: i,
                    });
                }
            }
        }
        Ok(Substitution {
            domain,
            codomain,
            images,
        })
    }

    /// Substitution on a single alphabet, with images given as words of
    /// letter names.
    pub fn on_alphabet(
        letters: &[&str],
        rules: &[(&str, &[&str])],
    ) -> Result<Self, SubstitutionError> {
        let alphabet: Vec<String> = letters.iter().map(|s| s.to_string()).collect();
        let index = |name: &str| -> Result<usize, SubstitutionError> {
            alphabet
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| SubstitutionError::UnknownLetter(name.to_owned()))
        };
        let mut images = vec![Vec::new(); alphabet.len()];
        for (l, word) in rules {
            let i = index(l)?;
            images[i] = word
                .iter()
                .map(|w| index(w))
                .collect::<Result<Vec<_>, _>>()?;
        }
        Substitution::new(alphabet.clone(), alphabet, images)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn image(&self, letter: usize) -> &[usize] {
        &self.images[letter]
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    /// Applies the substitution to a word of domain letter indices.
    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&l| self.images[l].clone()).collect()
    }

    /// Abelianization: entry `(a, b)` counts occurrences of codomain letter
    /// `b` in the image of domain letter `a`.
    pub fn associated_matrix(&self) -> crate::tower::WindingMatrix {
        let mut m = crate::tower::WindingMatrix::zero(self.domain.len(), self.codomain.len());
        for (a, img) in self.images.iter().enumerate() {
            for &b in img {
                let v = m.get(a, b) + 1;
                m.set(a, b, v);
            }
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.images.iter().enumerate().all(|(i, img)| img == &[i])
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, img) in self.domain.iter().zip(&self.images) {
            let word: Vec<&str> = img.iter().map(|&i| self.codomain[i].as_str()).collect();
            writeln!(f, "{l} -> {}", word.join(" "))?;
        }
        Ok(())
    }
}

/// A finite sequence of substitutions `chi_1, ..., chi_N` with
/// `chi_n : A_n -> A_{n-1}*`, so consecutive alphabets must match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SAdicSystem {
    substitutions: Vec<Substitution>,
}

impl SAdicSystem {
    pub fn new(substitutions: Vec<Substitution>) -> Result<Self, SubstitutionError> {
        for k in 1..substitutions.len() {
            if substitutions[k].codomain() != substitutions[k - 1].domain() {
                return Err(SubstitutionError::AlphabetMismatch { position: k });
            }
        }
        Ok(SAdicSystem { substitutions })
    }

    /// The stationary system repeating one substitution `depth` times.
    pub fn stationary(chi: Substitution, depth: usize) -> Self {
        SAdicSystem {
            substitutions: vec![chi; depth],
        }
    }

    pub fn len(&self) -> usize {
        self.substitutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.substitutions.is_empty()
    }

    pub fn substitution(&self, n: usize) -> &Substitution {
        &self.substitutions[n - 1]
    }

    pub fn substitutions(&self) -> &[Substitution] {
        &self.substitutions
    }

    /// Alphabet at level `n` (`A_0` is the deepest codomain).
    pub fn alphabet(&self, n: usize) -> &[String] {
        if n == 0 {
            self.substitutions[0].codomain()
        } else {
            self.substitutions[n - 1].domain()
        }
    }
}
