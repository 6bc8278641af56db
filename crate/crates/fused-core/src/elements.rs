use crate::error::Error;
use crate::word::{BraidWord, Generator};

/// Shape of a band generator word: conjugate the core crossing from the left
/// or from the right side of the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AForm {
    Left,
    Right,
}

fn check_range(i: u32, j: u32, m: u32, what: &str) -> Result<(), Error> {
    if i == 0 || i > j || j > m {
        return Err(Error::InvalidArgument(format!(
            "{what} needs 1 <= i <= j <= m, got i={i}, j={j}, m={m}"
        )));
    }
    Ok(())
}

/// Descending positive run `s(j-1) s(j-2) ... s(i)` on `m` strands. Its
/// permutation cycles positions `i..=j` downward: `p -> p + 1` for
/// `i <= p < j` and `j -> i`. Empty when `i == j`.
pub fn build_b(i: u32, j: u32, m: u32) -> Result<BraidWord, Error> {
    check_range(i, j, m, "band conjugator")?;
    let letters = (i..j).rev().map(Generator::positive).collect();
    BraidWord::new(m, letters)
}

/// Band generator: strand `j` lassoes strand `i` once. Pure, with all
/// pairwise linking numbers zero except `(i, j)`, which is 1. Needs `i < j`.
///
/// The two forms are the same element written differently:
/// `Left` is `s(j-1) .. s(i+1) s(i) s(i) S(i+1) .. S(j-1)`,
/// `Right` is `S(i) .. S(j-2) s(j-1) s(j-1) s(j-2) .. s(i)`.
pub fn build_a(i: u32, j: u32, m: u32, form: AForm) -> Result<BraidWord, Error> {
    check_range(i, j, m, "band generator")?;
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "band generator needs i < j, got i={i}, j={j}"
        )));
    }
    let word = match form {
        AForm::Left => {
            let mut letters: Vec<Generator> = ((i + 1)..j).rev().map(Generator::positive).collect();
            letters.push(Generator::positive(i));
            letters.push(Generator::positive(i));
            letters.extend(((i + 1)..j).map(Generator::negative));
            BraidWord::new(m, letters)?
        }
        AForm::Right => {
            let conjugator = build_b(i, j - 1, m)?;
            let core = BraidWord::new(
                m,
                vec![Generator::positive(j - 1), Generator::positive(j - 1)],
            )?;
            conjugator.inverse().concat(&core).concat(&conjugator)
        }
    };
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::links::pair_linking;
    use crate::perm::Permutation;
    use crate::word::parse_word;

    #[test]
    fn conjugator_words_are_descending_runs() {
        assert_eq!(build_b(1, 3, 3).unwrap(), parse_word("s2 s1").unwrap());
        assert_eq!(build_b(2, 5, 6).unwrap(), parse_word("n=6 s4 s3 s2").unwrap());
        assert!(build_b(2, 2, 4).unwrap().is_empty());
        assert!(build_b(0, 1, 3).is_err());
        assert!(build_b(2, 5, 4).is_err());
    }

    #[test]
    fn conjugator_permutation_cycles_its_range() {
        let b = build_b(2, 5, 6).unwrap();
        let p = Permutation::of_word(&b);
        assert_eq!(p.images(), vec![1, 3, 4, 5, 2, 6]);
    }

    #[test]
    fn band_generator_words_match_both_forms() {
        assert_eq!(build_a(1, 3, 3, AForm::Left).unwrap(), parse_word("s2 s1 s1 S2").unwrap());
        assert_eq!(build_a(1, 3, 3, AForm::Right).unwrap(), parse_word("S1 s2 s2 s1").unwrap());
        assert_eq!(build_a(2, 3, 4, AForm::Left).unwrap(), parse_word("n=4 s2 s2").unwrap());
        assert_eq!(
            build_a(2, 3, 4, AForm::Left).unwrap(),
            build_a(2, 3, 4, AForm::Right).unwrap()
        );
        assert!(build_a(2, 2, 4, AForm::Left).is_err());
    }

    #[test]
    fn right_form_is_a_literal_conjugate_of_the_top_crossing() {
        for (i, j, m) in [(1, 3, 3), (1, 4, 5), (2, 5, 5)] {
            let b = build_b(i, j - 1, m).unwrap();
            let core = build_a(j - 1, j, m, AForm::Left).unwrap();
            let expected = b.inverse().concat(&core).concat(&b);
            assert_eq!(build_a(i, j, m, AForm::Right).unwrap(), expected);
        }
    }

    #[test]
    fn band_generators_are_pure_and_link_exactly_their_pair() {
        for form in [AForm::Left, AForm::Right] {
            for (i, j, m) in [(1, 2, 2), (1, 3, 3), (2, 4, 5), (1, 4, 4)] {
                let a = build_a(i, j, m, form).unwrap();
                assert!(Permutation::of_word(&a).is_identity());
                for x in 1..=m {
                    for y in (x + 1)..=m {
                        let expected = if (x, y) == (i, j) { 1 } else { 0 };
                        assert_eq!(pair_linking(&a, x, y).unwrap(), expected, "{i} {j} {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_of_right_form_keeps_the_conjugator_shape() {
        let a = build_a(1, 3, 3, AForm::Right).unwrap();
        assert_eq!(a.inverse(), parse_word("S1 S2 S2 s1").unwrap());
    }
}
