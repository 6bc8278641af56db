//! Acceptance gate. Each criterion prints one pass or fail line; runtime
//! bounds and sample counts are pinned here as constants.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fused_core::{
    applicable_moves, apply_move, artin_image, bfs_equivalent, canonical_form, check_central,
    check_central_base, check_certificate, check_kernel_commute, check_tau_slide,
    closure_components, comb_last_strand, endo_equal, fused_equivalent, kill_last_strand,
    linking_matrix, random_classical_word, random_move, random_one_component_word, random_walk,
    random_word, reduce_to_pure, relabel_minimal, run_suite, strand_pair_crossings, BraidWord,
    Budget, Certificate, Error, Generator, Level, LinkingMatrix, MovePalette, MoveKind,
    Permutation, Sign,
};

const UNKNOT_SAMPLES: usize = 200;
const UNKNOT_BOUND: Duration = Duration::from_secs(10);
const SOUNDNESS_SAMPLES: usize = 10_000;
const SOUNDNESS_BOUND: Duration = Duration::from_secs(30);
const COMPLETENESS_PAIRS: usize = 200;
const COMPLETENESS_BOUND: Duration = Duration::from_secs(60);
const LEMMA_MAX_STRANDS: u32 = 6;
const LEMMA_INSTANCES: usize = 85;
const LEMMA_BOUND: Duration = Duration::from_secs(120);
const ORACLE_SAMPLES: usize = 10_000;
const TAMPER_SAMPLES: usize = 100;
const ROUND_TRIP_SAMPLES: usize = 1_000;
const ROUND_TRIP_BOUND: Duration = Duration::from_secs(30);

fn report(number: u32, name: &str, bound: Option<Duration>, run: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let within = bound.is_none_or(|b| elapsed <= b);
    let verdict = if outcome.is_ok() && within { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {name}: {verdict} ({elapsed:.2?})");
    if let Err(e) = outcome {
        panic!("criterion {number:02} {name}: {e}");
    }
    if !within {
        panic!(
            "criterion {number:02} {name}: took {elapsed:?}, bound {:?}",
            bound.unwrap()
        );
    }
}

/// Closure data computable for any word: component count and the
/// relabel-minimal matrix of doubled between-component crossing sums.
fn closure_data(word: &BraidWord) -> (usize, LinkingMatrix) {
    let components = closure_components(word);
    let per_strand = strand_pair_crossings(word);
    let n = components.count();
    let mut sums = vec![vec![0i64; n]; n];
    let m = word.strands();
    for a in 1..=m {
        for b in (a + 1)..=m {
            let ca = components.component_of(a) as usize - 1;
            let cb = components.component_of(b) as usize - 1;
            if ca != cb {
                let count = per_strand[a as usize - 1][b as usize - 1];
                sums[ca][cb] += count;
                sums[cb][ca] += count;
            }
        }
    }
    let matrix = LinkingMatrix::from_entries(sums).expect("sums are symmetric");
    (n, relabel_minimal(&matrix).0)
}

#[test]
fn criterion_01_unknotting() {
    report(1, "unknotting", Some(UNKNOT_BOUND), || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for k in 0..UNKNOT_SAMPLES {
            let strands = rng.gen_range(2..=5u32);
            let len = rng.gen_range(0..=20usize);
            let word = random_one_component_word(&mut rng, strands, len);
            if word.len() > 25 {
                return Err(format!("sample {k} exceeds the length budget"));
            }
            let (form, certificate) =
                canonical_form(&word).map_err(|e| format!("sample {k} `{word}`: {e}"))?;
            if form.n != 1 || !form.beta.is_empty() || form.beta.strands() != 1 {
                return Err(format!("sample {k} `{word}` did not reduce to the unknot"));
            }
            check_certificate(&certificate)
                .map_err(|e| format!("sample {k} certificate: {e}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_02_move_soundness() {
    report(2, "move soundness", Some(SOUNDNESS_BOUND), || {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let mut checked = 0usize;
        while checked < SOUNDNESS_SAMPLES {
            let strands = rng.gen_range(2..=6u32);
            let len = rng.gen_range(0..=20usize);
            let word = random_word(&mut rng, strands, len);
            let Some(app) = random_move(&mut rng, &word, Level::Closure, MovePalette::Full)
            else {
                continue;
            };
            let moved = apply_move(&word, &app)
                .map_err(|e| format!("enumerated move failed on `{word}`: {e}"))?;
            if closure_data(&word) != closure_data(&moved) {
                return Err(format!(
                    "a {:?} move changed the closure data of `{word}`",
                    app.kind
                ));
            }
            checked += 1;
        }
        Ok(())
    });
}

#[test]
fn criterion_03_completeness_at_desk_scale() {
    report(3, "completeness", Some(COMPLETENESS_BOUND), || {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        for pair in 0..COMPLETENESS_PAIRS {
            let strands = rng.gen_range(2..=4u32);
            let len = rng.gen_range(0..=10usize);
            let seed_word = random_classical_word(&mut rng, strands, len);
            let a = random_walk(&mut rng, &seed_word, Level::Closure, MovePalette::Classical, 8)
                .map_err(|e| format!("pair {pair}: walk failed: {e}"))?;
            let b = random_walk(&mut rng, &seed_word, Level::Closure, MovePalette::Classical, 8)
                .map_err(|e| format!("pair {pair}: walk failed: {e}"))?;
            if closure_data(&a) != closure_data(&b) {
                return Err(format!("pair {pair}: the generator broke the closure data"));
            }
            if !fused_equivalent(&a, &b).map_err(|e| e.to_string())? {
                return Err(format!("pair {pair}: `{a}` vs `{b}` judged inequivalent"));
            }
            let (form_a, cert_a) =
                canonical_form(&a).map_err(|e| format!("pair {pair}: {e}"))?;
            let (form_b, cert_b) =
                canonical_form(&b).map_err(|e| format!("pair {pair}: {e}"))?;
            if form_a.beta != form_b.beta || form_a.lambda != form_b.lambda || form_a.n != form_b.n
            {
                return Err(format!(
                    "pair {pair}: canonical forms differ, `{}` vs `{}`",
                    form_a.beta, form_b.beta
                ));
            }
            check_certificate(&cert_a).map_err(|e| format!("pair {pair}: {e}"))?;
            check_certificate(&cert_b).map_err(|e| format!("pair {pair}: {e}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_04_borromean_collapse() {
    report(4, "borromean collapse", None, || {
        let borromean: BraidWord = "s1 S2 s1 S2 s1 S2".parse().map_err(|e| format!("{e}"))?;
        let (form, certificate) = canonical_form(&borromean).map_err(|e| e.to_string())?;
        if form.n != 3 {
            return Err(format!("expected 3 components, got {}", form.n));
        }
        for a in 1..=3 {
            for b in 1..=3 {
                if form.lambda.entry(a, b) != 0 {
                    return Err(format!("lambda({a},{b}) nonzero"));
                }
            }
        }
        if !form.beta.is_empty() || form.beta.strands() != 3 {
            return Err(format!("canonical word `{}` is not the 3-strand unlink", form.beta));
        }
        check_certificate(&certificate).map_err(|e| e.to_string())?;
        let empty: BraidWord = "n=3".parse().map_err(|e| format!("{e}"))?;
        if !fused_equivalent(&borromean, &empty).map_err(|e| e.to_string())? {
            return Err("borromean word judged inequivalent to the unlink".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_05_hopf_separation() {
    report(5, "hopf separation", None, || {
        let hopf: BraidWord = "s1 s1".parse().map_err(|e| format!("{e}"))?;
        let empty: BraidWord = "n=2".parse().map_err(|e| format!("{e}"))?;
        if fused_equivalent(&hopf, &empty).map_err(|e| e.to_string())? {
            return Err("hopf word judged equivalent to the unlink".into());
        }
        let lk_hopf = linking_matrix(&hopf).map_err(|e| e.to_string())?.1.entry(1, 2);
        let lk_empty = linking_matrix(&empty).map_err(|e| e.to_string())?.1.entry(1, 2);
        if lk_hopf != 1 || lk_empty != 0 {
            return Err(format!("linking entries {lk_hopf} vs {lk_empty}, expected 1 vs 0"));
        }
        Ok(())
    });
}

#[test]
fn criterion_06_lemma_suite() {
    report(6, "lemma suite", Some(LEMMA_BOUND), || {
        let suite = run_suite(LEMMA_MAX_STRANDS);
        if !suite.passed() {
            return Err(format!("suite failures: {:?}", suite.failures));
        }
        if suite.checked != LEMMA_INSTANCES {
            return Err(format!(
                "expected {LEMMA_INSTANCES} instances, checked {}",
                suite.checked
            ));
        }
        // the smallest instance of each identity is independently confirmed
        // by search within the default budget
        let smallest = [
            ("central base", check_central_base(2, 3)),
            ("centrality", check_central(1, 2, 3)),
            ("kernel commutation", check_kernel_commute(1, 2, 2, 3)),
            ("virtual slide", check_tau_slide(1, 2, 3)),
        ];
        for (label, result) in smallest {
            let lemma = result.map_err(|e| format!("{label}: {e}"))?;
            let budget = Budget::default();
            let found = bfs_equivalent(&lemma.start, &lemma.end, Level::Word, &budget)
                .map_err(|e| format!("{label}: search failed: {e}"))?;
            if found.is_none() {
                return Err(format!(
                    "{label}: search did not connect `{}` to `{}`",
                    lemma.start, lemma.end
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_07_oracle_discipline() {
    report(7, "oracle discipline", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut checked = 0usize;
        while checked < ORACLE_SAMPLES {
            let strands = rng.gen_range(2..=5u32);
            let len = rng.gen_range(0..=16usize);
            let word = random_word(&mut rng, strands, len);
            let Some(app) = random_move(&mut rng, &word, Level::Word, MovePalette::Full) else {
                continue;
            };
            if !app.kind.preserves_action() {
                continue;
            }
            let moved = apply_move(&word, &app)
                .map_err(|e| format!("enumerated move failed on `{word}`: {e}"))?;
            if endo_equal(&artin_image(&word), &artin_image(&moved)) != Ok(true) {
                return Err(format!(
                    "a {:?} move changed the action on `{word}`",
                    app.kind
                ));
            }
            checked += 1;
        }

        // the under-move slide changes the action on a pinned instance
        let word: BraidWord = "S1 t2 s1".parse().map_err(|e| format!("{e}"))?;
        let slide = applicable_moves(&word, Level::Word)
            .into_iter()
            .find(|app| app.kind == MoveKind::FU)
            .ok_or("no under-move slide applies to the pinned word")?;
        let moved = apply_move(&word, &slide).map_err(|e| e.to_string())?;
        if endo_equal(&artin_image(&word), &artin_image(&moved)) != Ok(false) {
            return Err("the pinned under-move slide preserved the action".into());
        }

        // each identity that needs both forbidden moves changes the action
        let fused_only = [
            ("central base", check_central_base(2, 3)),
            ("centrality", check_central(1, 2, 3)),
            ("kernel commutation", check_kernel_commute(1, 2, 3, 4)),
        ];
        for (label, result) in fused_only {
            let lemma = result.map_err(|e| format!("{label}: {e}"))?;
            if endo_equal(&artin_image(&lemma.start), &artin_image(&lemma.end)) != Ok(false) {
                return Err(format!("{label}: endpoints share the action"));
            }
        }
        Ok(())
    });
}

fn tamper(certificate: &Certificate, mode: usize, rng: &mut ChaCha8Rng) -> Option<Certificate> {
    let mut bad = certificate.clone();
    match mode {
        // flip a letter inside a non-final step output
        0 => {
            let candidates: Vec<usize> = (0..bad.steps.len().saturating_sub(1))
                .filter(|&i| !bad.steps[i].output.is_empty())
                .collect();
            if candidates.is_empty() {
                return None;
            }
            let i = candidates[rng.gen_range(0..candidates.len())];
            let step = &mut bad.steps[i];
            let mut letters = step.output.letters().to_vec();
            let j = rng.gen_range(0..letters.len());
            letters[j] = match letters[j] {
                Generator::Sigma { .. } => letters[j].inverse(),
                Generator::Tau { index } => Generator::sigma(index, Sign::Pos),
            };
            step.output = BraidWord::new(step.output.strands(), letters).ok()?;
        }
        // drop the last move of a recorded trace; a rotation that happens to
        // fix the word would leave the certificate valid, so only moves that
        // change the word qualify
        1 => {
            let last_move_changes = |i: usize| {
                let step = &bad.steps[i];
                let trace = step.trace.as_ref()?;
                let mut prev = step.input.clone();
                let mut cur = step.input.clone();
                for mv in &trace.moves {
                    prev = cur.clone();
                    cur = apply_move(&cur, mv).ok()?;
                }
                Some(!trace.moves.is_empty() && prev != cur)
            };
            let candidates: Vec<usize> = (0..bad.steps.len())
                .filter(|&i| last_move_changes(i) == Some(true))
                .collect();
            if candidates.is_empty() {
                return None;
            }
            let i = candidates[rng.gen_range(0..candidates.len())];
            bad.steps[i].trace.as_mut().unwrap().moves.pop();
        }
        // alter the final word
        _ => {
            let extra = BraidWord::new(bad.output.strands().max(2), vec![Generator::sigma(1, Sign::Pos)])
                .expect("two strands fit the letter");
            bad.output = bad.output.concat(&extra);
        }
    }
    Some(bad)
}

#[test]
fn criterion_08_certificate_integrity() {
    report(8, "certificate integrity", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        let mut certificates = Vec::new();
        for text in ["s1 s1 s1", "s1 s2 s2", "S1 s2 s2 s1 s2", "s1 s2 s3", "s2 s1 s1 s2"] {
            let word: BraidWord = text.parse().map_err(|e| format!("{e}"))?;
            let (_, cert) = canonical_form(&word).map_err(|e| format!("`{text}`: {e}"))?;
            certificates.push(cert);
        }
        while certificates.len() < 20 {
            let strands = rng.gen_range(2..=5u32);
            let len = rng.gen_range(1..=18usize);
            let word = random_one_component_word(&mut rng, strands, len);
            let (_, cert) = canonical_form(&word).map_err(|e| format!("`{word}`: {e}"))?;
            if cert.steps.len() >= 2 {
                certificates.push(cert);
            }
        }
        for (k, cert) in certificates.iter().enumerate() {
            check_certificate(cert).map_err(|e| format!("certificate {k} rejected: {e}"))?;
        }

        let mut tampered = 0usize;
        let mut source = 0usize;
        while tampered < TAMPER_SAMPLES {
            let cert = &certificates[source % certificates.len()];
            source += 1;
            let mode = tampered % 3;
            let Some(bad) = tamper(cert, mode, &mut rng) else {
                continue;
            };
            match check_certificate(&bad) {
                Err(Error::CertificateInvalid { step, reason }) => {
                    if step > bad.steps.len() || reason.is_empty() {
                        return Err(format!(
                            "tamper {tampered} (mode {mode}): error not localized"
                        ));
                    }
                    tampered += 1;
                }
                Err(e) => {
                    return Err(format!("tamper {tampered} (mode {mode}): unexpected error {e}"))
                }
                Ok(_) => {
                    return Err(format!("tamper {tampered} (mode {mode}) was accepted"))
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_09_decomposition_round_trip() {
    report(9, "decomposition round trip", Some(ROUND_TRIP_BOUND), || {
        let mut rng = ChaCha8Rng::seed_from_u64(909);
        for k in 0..ROUND_TRIP_SAMPLES {
            let strands = rng.gen_range(2..=6u32);
            let len = rng.gen_range(0..=40usize);
            let word = random_classical_word(&mut rng, strands, len);
            let comb = comb_last_strand(&word).map_err(|e| format!("sample {k}: {e}"))?;
            let recomposed = comb.combed.concat(&comb.tail);
            if Permutation::of_word(&recomposed) != Permutation::of_word(&word) {
                return Err(format!("sample {k}: recomposition changed the permutation"));
            }
            let (components, lambda) =
                linking_matrix(&word).map_err(|e| format!("sample {k}: {e}"))?;
            let (re_components, re_lambda) =
                linking_matrix(&recomposed).map_err(|e| format!("sample {k}: {e}"))?;
            if components.count() != re_components.count() || lambda != re_lambda {
                return Err(format!("sample {k}: recomposition changed the linking data"));
            }
            let killed = kill_last_strand(&artin_image(&comb.combed))
                .map_err(|e| format!("sample {k}: {e}"))?;
            if endo_equal(&artin_image(&comb.kept), &killed) != Ok(true) {
                return Err(format!(
                    "sample {k}: strand deletion disagrees with the action oracle"
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_10_non_classical_guard() {
    report(10, "non-classical guard", None, || {
        let classical: BraidWord = "s1 s1".parse().map_err(|e| format!("{e}"))?;
        for text in ["t1", "s1 t1 S1 t1", "s1 t2 s1", "n=4 t3"] {
            let word: BraidWord = text.parse().map_err(|e| format!("{e}"))?;
            if !matches!(canonical_form(&word), Err(Error::NonClassicalInput { .. })) {
                return Err(format!("canonical form answered on `{text}`"));
            }
            if !matches!(reduce_to_pure(&word), Err(Error::NonClassicalInput { .. })) {
                return Err(format!("reduction answered on `{text}`"));
            }
            if !matches!(
                fused_equivalent(&word, &classical),
                Err(Error::NonClassicalInput { .. })
            ) {
                return Err(format!("equivalence answered on `{text}`"));
            }
            if !matches!(
                fused_equivalent(&classical, &word),
                Err(Error::NonClassicalInput { .. })
            ) {
                return Err(format!("equivalence answered on swapped `{text}`"));
            }
        }
        Ok(())
    });
}
