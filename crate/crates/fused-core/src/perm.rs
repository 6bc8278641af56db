use crate::error::Error;
use crate::word::BraidWord;

/// A permutation of `{1, ..., m}`. Maps a strand's start position to its end
/// position. Stored 0-based internally; the public API is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(m: u32) -> Permutation {
        Permutation { images: (0..m).collect() }
    }

    /// Builds from 1-based images. Fails unless the images are a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Permutation, Error> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &q in &images {
            if q == 0 || q as usize > m || seen[q as usize - 1] {
                return Err(Error::InvalidArgument(format!(
                    "images {images:?} are not a permutation of 1..={m}"
                )));
            }
            seen[q as usize - 1] = true;
        }
        Ok(Permutation { images: images.into_iter().map(|q| q - 1).collect() })
    }

    /// Permutation of a word: every letter swaps the occupants of its two
    /// positions, classical or virtual alike.
    pub fn of_word(word: &BraidWord) -> Permutation {
        let m = word.strands() as usize;
        // occupant[p] = strand currently at position p
        let mut occupant: Vec<u32> = (0..m as u32).collect();
        for letter in word.letters() {
            let i = letter.index() as usize - 1;
            occupant.swap(i, i + 1);
        }
        let mut images = vec![0u32; m];
        for (position, &strand) in occupant.iter().enumerate() {
            images[strand as usize] = position as u32;
        }
        Permutation { images }
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    /// 1-based image of a 1-based position.
    pub fn apply(&self, p: u32) -> u32 {
        self.images[p as usize - 1] + 1
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (p, &q) in self.images.iter().enumerate() {
            images[q as usize] = p as u32;
        }
        Permutation { images }
    }

    /// `self` first, `then` second: the permutation of a concatenation.
    pub fn compose(&self, then: &Permutation) -> Permutation {
        let images = self.images.iter().map(|&q| then.images[q as usize]).collect();
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(p, &q)| p as u32 == q)
    }

    /// Smallest 1-based non-fixed point, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|&(p, &q)| p as u32 != q)
            .map(|(p, _)| p as u32 + 1)
    }

    /// Largest 1-based non-fixed point, if any.
    pub fn last_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .rev()
            .find(|&(p, &q)| p as u32 != q)
            .map(|(p, _)| p as u32 + 1)
    }

    /// 1-based images as a vector.
    pub fn images(&self) -> Vec<u32> {
        self.images.iter().map(|&q| q + 1).collect()
    }
}
