use std::fmt;

use crate::error::Error;
use crate::word::{BraidWord, Generator, Sign};

/// One letter of a free-group word: `x_index` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeLetter {
    pub index: u32,
    pub sign: Sign,
}

impl FreeLetter {
    pub fn positive(index: u32) -> FreeLetter {
        FreeLetter { index, sign: Sign::Pos }
    }

    pub fn inverse(self) -> FreeLetter {
        FreeLetter { index: self.index, sign: self.sign.flip() }
    }

    pub fn is_inverse_of(self, other: FreeLetter) -> bool {
        self.inverse() == other
    }
}

impl fmt::Display for FreeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "x{}", self.index),
            Sign::Neg => write!(f, "X{}", self.index),
        }
    }
}

/// A reduced word in a free group. Reduction is maintained by every
/// constructor and operation, so equality is plain structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeWord {
    letters: Vec<FreeLetter>,
}

impl FreeWord {
    pub fn identity() -> FreeWord {
        FreeWord { letters: Vec::new() }
    }

    pub fn generator(index: u32) -> FreeWord {
        FreeWord { letters: vec![FreeLetter::positive(index)] }
    }

    /// Builds a word, freely reducing the given letters.
    pub fn from_letters(letters: impl IntoIterator<Item = FreeLetter>) -> FreeWord {
        let mut word = FreeWord::identity();
        for letter in letters {
            word.push(letter);
        }
        word
    }

    fn push(&mut self, letter: FreeLetter) {
        if self.letters.last().is_some_and(|&top| top.is_inverse_of(letter)) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn letters(&self) -> &[FreeLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut word = self.clone();
        for &letter in &other.letters {
            word.push(letter);
        }
        word
    }

    /// Splits a conjugate of a positive generator: `self = c x_k c^-1`,
    /// returned as `(k, c)`. A reduced word of that form is symmetric around
    /// its middle letter, so the shape is recognized structurally.
    pub fn as_conjugate_of_generator(&self) -> Option<(u32, FreeWord)> {
        if self.letters.len().is_multiple_of(2) {
            return None;
        }
        let mid = self.letters.len() / 2;
        let core = self.letters[mid];
        if core.sign != Sign::Pos {
            return None;
        }
        for offset in 0..mid {
            if self.letters[mid + 1 + offset] != self.letters[mid - 1 - offset].inverse() {
                return None;
            }
        }
        Some((core.index, FreeWord { letters: self.letters[..mid].to_vec() }))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

/// An endomorphism of a free group of fixed rank, given by the images of its
/// generators. `images[j - 1]` is the image of `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeGroupEndo {
    images: Vec<FreeWord>,
}

impl FreeGroupEndo {
    pub fn identity(rank: u32) -> FreeGroupEndo {
        FreeGroupEndo { images: (1..=rank).map(FreeWord::generator).collect() }
    }

    pub fn rank(&self) -> u32 {
        self.images.len() as u32
    }

    /// Image of `x_j`, 1-based.
    pub fn image(&self, j: u32) -> &FreeWord {
        &self.images[j as usize - 1]
    }

    /// Extends the endomorphism to an arbitrary word by substitution.
    pub fn apply_word(&self, word: &FreeWord) -> FreeWord {
        let mut out = FreeWord::identity();
        for &letter in word.letters() {
            let image = &self.images[letter.index as usize - 1];
            match letter.sign {
                Sign::Pos => {
                    for &l in image.letters() {
                        out.push(l);
                    }
                }
                Sign::Neg => {
                    for &l in image.letters().iter().rev() {
                        out.push(l.inverse());
                    }
                }
            }
        }
        out
    }

    /// `self` first, `then` second.
    pub fn and_then(&self, then: &FreeGroupEndo) -> FreeGroupEndo {
        FreeGroupEndo { images: self.images.iter().map(|w| then.apply_word(w)).collect() }
    }
}

fn letter_images(letter: Generator) -> [(u32, FreeWord); 2] {
    let i = letter.index();
    let xi = FreeWord::generator(i);
    let xj = FreeWord::generator(i + 1);
    match letter {
        Generator::Sigma { sign: Sign::Pos, .. } => {
            // x_i -> x_i x_{i+1} x_i^-1, x_{i+1} -> x_i
            let conj = xi.concat(&xj).concat(&xi.inverse());
            [(i, conj), (i + 1, xi)]
        }
        Generator::Sigma { sign: Sign::Neg, .. } => {
            // x_i -> x_{i+1}, x_{i+1} -> x_{i+1}^-1 x_i x_{i+1}
            let conj = xj.inverse().concat(&xi).concat(&xj);
            [(i, xj), (i + 1, conj)]
        }
        Generator::Tau { .. } => [(i, xj), (i + 1, xi)],
    }
}

/// The free-group action of a braid word: each letter's substitution applied
/// left to right. The image of each generator is a reduced word; for any
/// input it is a conjugate of a positive generator, with the core generator
/// given by the word's permutation.
pub fn artin_image(word: &BraidWord) -> FreeGroupEndo {
    let rank = word.strands();
    let mut images: Vec<FreeWord> = (1..=rank).map(FreeWord::generator).collect();
    for &letter in word.letters() {
        let mut step = FreeGroupEndo::identity(rank);
        for (index, image) in letter_images(letter) {
            step.images[index as usize - 1] = image;
        }
        for image in images.iter_mut() {
            *image = step.apply_word(image);
        }
    }
    FreeGroupEndo { images }
}

/// Structural equality of two endomorphisms of the same rank.
pub fn endo_equal(a: &FreeGroupEndo, b: &FreeGroupEndo) -> Result<bool, Error> {
    if a.rank() != b.rank() {
        return Err(Error::SizeMismatch { left: a.rank() as usize, right: b.rank() as usize });
    }
    Ok(a == b)
}

/// Deletes the last generator: drops its image and erases every occurrence
/// of it from the remaining images. For the action of a word fixing its last
/// position, this is the action of the word with that strand deleted.
pub fn kill_last_strand(endo: &FreeGroupEndo) -> Result<FreeGroupEndo, Error> {
    let rank = endo.rank();
    if rank == 0 {
        return Err(Error::InvalidArgument("cannot delete a generator of rank 0".into()));
    }
    let images = endo.images[..rank as usize - 1]
        .iter()
        .map(|w| {
            FreeWord::from_letters(w.letters().iter().copied().filter(|l| l.index != rank))
        })
        .collect();
    Ok(FreeGroupEndo { images })
}
