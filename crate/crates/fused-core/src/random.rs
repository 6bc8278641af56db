//! Seeded generators for words and moves, plus the property sweep behind
//! randomized testing. Everything is driven by a caller-supplied RNG, so a
//! fixed seed reproduces a run bit for bit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::artin::{artin_image, endo_equal, kill_last_strand};
use crate::links::{closure_components, linking_matrix, relabel_minimal, strand_pair_crossings};
use crate::perm::Permutation;
use crate::reduce::{canonical_form, check_certificate, comb_last_strand, fused_equivalent};
use crate::rewrite::{applicable_moves, apply_move, Level, MoveApplication, MoveKind};
use crate::word::{BraidWord, Generator, Sign};

/// Which letters a random move may introduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovePalette {
    /// Crossing letters only; a classical word stays classical.
    Classical,
    /// The whole catalog, virtual letters included.
    Full,
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.gen::<bool>() {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// Uniformly random classical word.
pub fn random_classical_word(rng: &mut impl Rng, strands: u32, len: usize) -> BraidWord {
    assert!(strands >= 2, "letters need at least two strands");
    let letters = (0..len)
        .map(|_| Generator::sigma(rng.gen_range(1..strands), random_sign(rng)))
        .collect();
    BraidWord::new(strands, letters).expect("indexes are drawn in range")
}

/// Random word mixing crossings and virtual letters.
pub fn random_word(rng: &mut impl Rng, strands: u32, len: usize) -> BraidWord {
    assert!(strands >= 2, "letters need at least two strands");
    let letters = (0..len)
        .map(|_| {
            let index = rng.gen_range(1..strands);
            if rng.gen_range(0..3) == 0 {
                Generator::tau(index)
            } else {
                Generator::sigma(index, random_sign(rng))
            }
        })
        .collect();
    BraidWord::new(strands, letters).expect("indexes are drawn in range")
}

/// Random classical word whose closure has one component. Starts from a
/// random word and merges components by appending crossings where two
/// components sit side by side.
pub fn random_one_component_word(rng: &mut impl Rng, strands: u32, len: usize) -> BraidWord {
    let mut word = random_classical_word(rng, strands, len);
    loop {
        let components = closure_components(&word);
        if components.count() == 1 {
            return word;
        }
        let boundary = (1..strands)
            .find(|&i| components.component_of(i) != components.component_of(i + 1))
            .expect("several components must meet somewhere");
        let merge = BraidWord::new(
            strands,
            vec![Generator::sigma(boundary, random_sign(rng))],
        )
        .expect("index is in range");
        word = word.concat(&merge);
    }
}

/// Samples one applicable move. Enumerable moves come from the catalog;
/// pair insertions and conjugations, whose parameter spaces are open, are
/// synthesized. Returns nothing only when no move fits, which cannot happen
/// for a word with at least two strands.
pub fn random_move(
    rng: &mut impl Rng,
    word: &BraidWord,
    level: Level,
    palette: MovePalette,
) -> Option<MoveApplication> {
    let m = word.strands();
    let mut candidates: Vec<MoveApplication> = applicable_moves(word, level)
        .into_iter()
        .filter(|app| palette == MovePalette::Full || app.kind != MoveKind::StabV)
        .collect();
    if m >= 2 {
        let pos = rng.gen_range(1..=word.len() + 1);
        let index = rng.gen_range(1..m);
        candidates.push(MoveApplication::insert_sigma(pos, index, random_sign(rng)));
        if palette == MovePalette::Full {
            let pos = rng.gen_range(1..=word.len() + 1);
            candidates.push(MoveApplication::insert_tau(pos, rng.gen_range(1..m)));
        }
        if level == Level::Closure {
            let index = rng.gen_range(1..m);
            let letter = match palette {
                MovePalette::Classical => Generator::sigma(index, random_sign(rng)),
                MovePalette::Full if rng.gen_range(0..3) == 0 => Generator::tau(index),
                MovePalette::Full => Generator::sigma(index, random_sign(rng)),
            };
            let conjugator =
                BraidWord::new(m, vec![letter]).expect("index is in range");
            candidates.push(MoveApplication::conj(conjugator));
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let pick = rng.gen_range(0..candidates.len());
    Some(candidates.swap_remove(pick))
}

/// Applies `steps` random moves in sequence.
pub fn random_walk(
    rng: &mut impl Rng,
    word: &BraidWord,
    level: Level,
    palette: MovePalette,
    steps: usize,
) -> Result<BraidWord, crate::error::Error> {
    let mut current = word.clone();
    for _ in 0..steps {
        let Some(app) = random_move(rng, &current, level, palette) else {
            break;
        };
        current = apply_move(&current, &app)?;
    }
    Ok(current)
}

/// Outcome of a seeded property sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub iterations: usize,
    /// Individual property checks performed.
    pub checks: usize,
    /// Human-readable descriptions of failed checks, empty on success.
    pub violations: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs the randomized property sweep: grammar round trips, move
/// invariance at both levels, action invariance under action-preserving
/// moves, decomposition round trips, and full pipeline checks on small
/// words. Deterministic for a fixed seed.
pub fn sweep(seed: u64, iterations: usize) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0usize;
    let mut violations = Vec::new();
    let mut record = |ok: bool, checks: &mut usize, what: String| {
        *checks += 1;
        if !ok {
            violations.push(what);
        }
    };

    for iteration in 0..iterations {
        let strands = rng.gen_range(2..=6u32);
        let len = rng.gen_range(0..=20usize);
        let word = random_word(&mut rng, strands, len);

        // grammar round trip
        let reparsed: Result<BraidWord, _> = word.to_string().parse();
        record(
            reparsed.as_ref() == Ok(&word),
            &mut checks,
            format!("iteration {iteration}: reparsing `{word}` changed the word"),
        );

        // closure moves keep the component count and doubled crossing sums
        if let Some(app) = random_move(&mut rng, &word, Level::Closure, MovePalette::Full) {
            match apply_move(&word, &app) {
                Ok(moved) => {
                    let before = closure_components(&word).count();
                    let after = closure_components(&moved).count();
                    record(
                        before == after,
                        &mut checks,
                        format!(
                            "iteration {iteration}: a closure move changed the component count \
                             of `{word}`"
                        ),
                    );
                }
                Err(e) => record(
                    false,
                    &mut checks,
                    format!("iteration {iteration}: an enumerated move failed to apply: {e}"),
                ),
            }
        }

        // word moves keep the permutation and every pairwise count
        if let Some(app) = random_move(&mut rng, &word, Level::Word, MovePalette::Full) {
            match apply_move(&word, &app) {
                Ok(moved) => record(
                    Permutation::of_word(&word) == Permutation::of_word(&moved)
                        && strand_pair_crossings(&word) == strand_pair_crossings(&moved),
                    &mut checks,
                    format!(
                        "iteration {iteration}: a word move changed the invariants of `{word}`"
                    ),
                ),
                Err(e) => record(
                    false,
                    &mut checks,
                    format!("iteration {iteration}: an enumerated move failed to apply: {e}"),
                ),
            }
        }

        // action-preserving moves keep the free-group action
        if let Some(app) = random_move(&mut rng, &word, Level::Word, MovePalette::Full) {
            if app.kind.preserves_action() {
                match apply_move(&word, &app) {
                    Ok(moved) => record(
                        endo_equal(&artin_image(&word), &artin_image(&moved)) == Ok(true),
                        &mut checks,
                        format!(
                            "iteration {iteration}: an action-preserving move changed the \
                             action on `{word}`"
                        ),
                    ),
                    Err(e) => record(
                        false,
                        &mut checks,
                        format!("iteration {iteration}: an enumerated move failed to apply: {e}"),
                    ),
                }
            }
        }

        // classical-only properties
        let classical = random_classical_word(&mut rng, strands, len.max(1));

        let comb_ok = match comb_last_strand(&classical) {
            Ok(comb) => {
                let recomposed = comb.combed.concat(&comb.tail);
                let deletion_matches = match kill_last_strand(&artin_image(&comb.combed)) {
                    Ok(killed) => endo_equal(&artin_image(&comb.kept), &killed) == Ok(true),
                    Err(_) => false,
                };
                Permutation::of_word(&recomposed) == Permutation::of_word(&classical)
                    && strand_pair_crossings(&recomposed)
                        == strand_pair_crossings(&classical)
                    && deletion_matches
            }
            Err(_) => false,
        };
        record(
            comb_ok,
            &mut checks,
            format!("iteration {iteration}: combing `{classical}` failed to round trip"),
        );

        // equivalence is invariant along random classical closure moves
        match random_walk(&mut rng, &classical, Level::Closure, MovePalette::Classical, 4) {
            Ok(walked) => record(
                fused_equivalent(&classical, &walked) == Ok(true),
                &mut checks,
                format!(
                    "iteration {iteration}: classical closure moves separated `{classical}` \
                     from `{walked}`"
                ),
            ),
            Err(e) => record(
                false,
                &mut checks,
                format!("iteration {iteration}: a classical walk failed: {e}"),
            ),
        }

        // full pipeline on a small word
        let small_strands = rng.gen_range(2..=4u32);
        let small_len = rng.gen_range(0..=8usize);
        let small = random_classical_word(&mut rng, small_strands, small_len);
        let pipeline_ok = match canonical_form(&small) {
            Ok((form, certificate)) => {
                let (components, lambda) = linking_matrix(&small).expect("classical word");
                form.n as usize == components.count()
                    && form.lambda == relabel_minimal(&lambda).0
                    && check_certificate(&certificate).is_ok()
            }
            Err(_) => false,
        };
        record(
            pipeline_ok,
            &mut checks,
            format!("iteration {iteration}: the pipeline misclassified `{small}`"),
        );
    }

    SweepReport {
        seed,
        iterations,
        checks,
        violations,
    }
}
