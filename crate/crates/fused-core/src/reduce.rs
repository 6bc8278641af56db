//! Strand reduction and canonical forms for classical closures.
//!
//! A classical word whose permutation is not the identity carries a strand
//! that can be removed without changing the closure's class: conjugate the
//! word so that strand interacts last, comb it off, trade its odd crossing
//! run for a single virtual crossing, slide that crossing to the end, and
//! destabilize. Iterating reaches a pure word on one strand per component,
//! which abelianizes to a product of bands determined by the linking matrix.
//!
//! Every stage records a [`CertStep`]; the chained [`Certificate`] can be
//! revalidated from scratch by [`check_certificate`] without trusting the
//! code that produced it. Steps with elementary traces are replayed letter
//! by letter. The two steps that are not elementary, the fiber rewrite
//! ([`StepKind::NormalForm`]) and the crossing-run virtualization
//! ([`StepKind::Virtualize`]), are checked against the invariants that
//! justify them: the former preserves the permutation and every pairwise
//! crossing count, the latter is a literal odd-run substitution that
//! preserves the closure data.

use serde::{Deserialize, Serialize};

use crate::elements::{build_a, build_b, AForm};
use crate::error::Error;
use crate::lemmas::slide_tau_through_band;
use crate::links::{
    component_pair_sums, linking_matrix, relabel_minimal, strand_deleted, strand_pair_crossings,
    LinkingMatrix,
};
use crate::perm::Permutation;
use crate::rewrite::{
    bfs_equivalent, replay, Budget, Level, MoveApplication, MoveKind, RewriteTrace, TraceBuilder,
};
use crate::word::{BraidWord, Generator, Sign};

/// Stage of the reduction pipeline a certificate step belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    /// Conjugation bringing the acting strand to the last position.
    Conjugate,
    /// Fiber rewrite of the combed word into band normal form.
    NormalForm,
    /// Odd crossing run replaced by one virtual crossing.
    Virtualize,
    /// Virtual crossing slid leftward through the band factors.
    TauSlide,
    /// Cyclic rotation of the closure.
    CyclicShift,
    /// Removal of a trailing virtual crossing and its strand.
    DestabilizeVirtual,
    /// Final rewrite of the pure word into the canonical band product.
    FinalAbelianize,
}

/// One certified rewrite with the data needed to revalidate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStep {
    pub kind: StepKind,
    pub input: BraidWord,
    pub output: BraidWord,
    /// Conjugating word, for [`StepKind::Conjugate`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<BraidWord>,
    /// End position of the removed strand, for [`StepKind::NormalForm`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u32>,
    /// Halved crossing counts of the removed strand, position indexed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residues: Option<Vec<i64>>,
    /// Rotation amount, for [`StepKind::CyclicShift`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
    /// Elementary moves realizing the step, when the step is elementary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<RewriteTrace>,
}

/// Chain of certified steps from an input word to an output word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub input: BraidWord,
    pub steps: Vec<CertStep>,
    pub output: BraidWord,
}

/// How one step survived revalidation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepVerdict {
    /// The recorded elementary trace replayed to the claimed output.
    Replayed,
    /// The step is a literal odd-run virtualization.
    ShapeChecked,
    /// Permutation or closure invariants vouch for the step.
    InvariantChecked,
}

/// Outcome of revalidating a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertReport {
    pub steps: usize,
    pub verdicts: Vec<StepVerdict>,
}

/// A word split around its last strand: `word` is freely equal to
/// `combed` followed by `tail`, where `combed` fixes the last position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LastStrandDecomposition {
    /// Word fixing the last position.
    pub combed: BraidWord,
    /// Descending run carrying the last strand to its end position.
    pub tail: BraidWord,
    /// End position of the strand starting last.
    pub target: u32,
    /// Half the signed crossings between the last strand and the strand
    /// ending at position `i`, indexed `i = 1..m-1`.
    pub residues: Vec<i64>,
    /// `combed` with the last strand deleted.
    pub kept: BraidWord,
}

/// Canonical classification data for a classical closure: component count,
/// relabel-minimal linking matrix, the canonical pure word realizing it, and
/// the component relabeling that minimized the matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: u32,
    pub lambda: LinkingMatrix,
    pub beta: BraidWord,
    /// `labeling[k-1]` is the reduced word's component given canonical
    /// label `k`.
    pub labeling: Vec<u32>,
}

fn require_classical(word: &BraidWord) -> Result<(), Error> {
    match word.first_virtual_position() {
        Some(position) => Err(Error::NonClassicalInput { position }),
        None => Ok(()),
    }
}

/// Component count plus the relabel-minimal doubled crossing matrix, the
/// closure data every certified step must preserve.
fn closure_class(word: &BraidWord) -> (usize, LinkingMatrix) {
    let (assignment, sums) = component_pair_sums(word);
    let matrix =
        LinkingMatrix::from_entries(sums).expect("pair sums are symmetric with zero diagonal");
    (assignment.count(), relabel_minimal(&matrix).0)
}

/// Splits off the last strand of a classical word.
///
/// The word is freely equal to `combed · tail` where `tail` returns the last
/// strand to its end position and `combed` fixes the last position. Each
/// crossing count between the last strand and another is even; the halves
/// come back as position-indexed residues.
pub fn comb_last_strand(word: &BraidWord) -> Result<LastStrandDecomposition, Error> {
    require_classical(word)?;
    let m = word.strands();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "combing needs at least two strands".into(),
        ));
    }
    let target = Permutation::of_word(word).apply(m);
    let tail = build_b(target, m, m)?;
    let combed = word.concat(&tail.inverse()).free_reduce();
    let perm = Permutation::of_word(&combed);
    assert_eq!(perm.apply(m), m, "combed word must fix the last position");
    let counts = strand_pair_crossings(&combed);
    let inverse = perm.inverse();
    let mut residues = Vec::with_capacity(m as usize - 1);
    for i in 1..m {
        let label = inverse.apply(i);
        let count = counts[m as usize - 1][label as usize - 1];
        assert_eq!(count.rem_euclid(2), 0, "a returning strand crosses evenly");
        residues.push(count / 2);
    }
    let kept = strand_deleted(&combed, m)?;
    Ok(LastStrandDecomposition {
        combed,
        tail,
        target,
        residues,
        kept,
    })
}

/// Conjugates a non-pure word so its permutation moves the last position.
///
/// Returns the conjugated word and the conjugator `c`; the result is the
/// free reduction of `c^-1 · word · c`, and `c` is empty when the last
/// position already moves.
pub fn bring_strand_last(word: &BraidWord) -> Result<(BraidWord, BraidWord), Error> {
    let m = word.strands();
    let perm = Permutation::of_word(word);
    let Some(s) = perm.last_moved() else {
        return Err(Error::InvalidArgument(
            "every position is fixed; no strand to bring last".into(),
        ));
    };
    if s == m {
        return Ok((word.clone(), BraidWord::identity(m)));
    }
    // conjugating by the full descending run shifts the moved positions up
    let c = build_b(1, m, m)?.pow(i64::from(m - s));
    let conjugated = c.inverse().concat(word).concat(&c).free_reduce();
    assert!(
        Permutation::of_word(&conjugated).apply(m) != m,
        "conjugation must expose the last strand"
    );
    Ok((conjugated, c))
}

/// One strand-removal round on a classical word whose permutation is not the
/// identity. Returns the word on one strand fewer together with the
/// certificate steps realizing the round.
pub fn reduce_step(word: &BraidWord) -> Result<(BraidWord, Vec<CertStep>), Error> {
    require_classical(word)?;
    let m = word.strands();
    if Permutation::of_word(word).is_identity() {
        return Err(Error::InvalidArgument("the word is already pure".into()));
    }
    let mut steps = Vec::new();
    let mut current = word.clone();

    let (conjugated, c) = bring_strand_last(&current)?;
    if !c.is_empty() {
        let mut builder = TraceBuilder::new(current.clone());
        builder.push(MoveApplication::conj(c.clone()))?;
        builder.reduce()?;
        assert_eq!(builder.current(), &conjugated, "trace must land on the conjugate");
        steps.push(CertStep {
            kind: StepKind::Conjugate,
            input: current,
            output: conjugated.clone(),
            conjugator: Some(c),
            target: None,
            residues: None,
            shift: None,
            trace: Some(builder.finish()),
        });
        current = conjugated;
    }

    let comb = comb_last_strand(&current)?;
    let target = comb.target;
    let residues = &comb.residues;

    // band normal form: the kept word, wide band factors for each low
    // residue, the odd crossing run, and the descending return tail
    let iota = comb.kept.widened(m)?;
    let mut band = BraidWord::identity(m);
    for i in 1..=m.saturating_sub(2) {
        band = band.concat(&build_a(i, m, m, AForm::Right)?.pow(residues[i as usize - 1]));
    }
    let last_residue = residues[m as usize - 2];
    let run_exponent = 2 * last_residue + 1;
    let run_sign = if run_exponent >= 0 { Sign::Pos } else { Sign::Neg };
    let run = BraidWord::new(
        m,
        vec![Generator::sigma(m - 1, run_sign); run_exponent.unsigned_abs() as usize],
    )?;
    let return_tail = build_b(target, m - 1, m)?;
    let normal = iota.concat(&band).concat(&run).concat(&return_tail);
    assert_eq!(
        Permutation::of_word(&current),
        Permutation::of_word(&normal),
        "the normal form keeps the permutation"
    );
    assert_eq!(
        strand_pair_crossings(&current),
        strand_pair_crossings(&normal),
        "the normal form keeps every pairwise crossing count"
    );
    steps.push(CertStep {
        kind: StepKind::NormalForm,
        input: current.clone(),
        output: normal.clone(),
        conjugator: None,
        target: Some(target),
        residues: Some(residues.clone()),
        shift: None,
        trace: None,
    });
    current = normal;

    // the odd run closes a strand that crosses its own component; trade it
    // for a single virtual crossing
    let tau = BraidWord::new(m, vec![Generator::tau(m - 1)])?;
    let virtualized = iota.concat(&band).concat(&tau).concat(&return_tail);
    assert_eq!(
        closure_class(&current),
        closure_class(&virtualized),
        "virtualization keeps the closure data"
    );
    steps.push(CertStep {
        kind: StepKind::Virtualize,
        input: current.clone(),
        output: virtualized.clone(),
        conjugator: None,
        target: None,
        residues: None,
        shift: None,
        trace: None,
    });
    current = virtualized;

    // slide the virtual crossing left through the band, rightmost factor
    // first; each slide narrows one wide factor
    let mut factors = Vec::new();
    for i in 1..=m.saturating_sub(2) {
        let r = residues[i as usize - 1];
        let sign = if r >= 0 { Sign::Pos } else { Sign::Neg };
        for _ in 0..r.unsigned_abs() {
            factors.push((i, sign));
        }
    }
    let mut narrow = BraidWord::identity(m);
    for i in 1..=m.saturating_sub(2) {
        narrow = narrow.concat(&build_a(i, m - 1, m, AForm::Right)?.pow(residues[i as usize - 1]));
    }
    if !factors.is_empty() {
        let lengths: Vec<usize> = factors.iter().map(|&(i, _)| 2 * (m - i) as usize).collect();
        let mut builder = TraceBuilder::new(current.clone());
        for idx in (0..factors.len()).rev() {
            let offset = iota.len() + lengths[..idx].iter().sum::<usize>();
            let (i, sign) = factors[idx];
            builder.extend(slide_tau_through_band(i, m - 1, m, sign, offset)?)?;
        }
        let slid = builder.current().clone();
        assert_eq!(
            slid,
            iota.concat(&tau).concat(&narrow).concat(&return_tail),
            "slides must carry the virtual crossing through the band"
        );
        steps.push(CertStep {
            kind: StepKind::TauSlide,
            input: current.clone(),
            output: slid.clone(),
            conjugator: None,
            target: None,
            residues: None,
            shift: None,
            trace: Some(builder.finish()),
        });
        current = slid;
    }

    // rotate the prefix behind the virtual crossing to the back
    let shift = iota.len() + 1;
    if shift < current.len() {
        let mut builder = TraceBuilder::new(current.clone());
        builder.push(MoveApplication::cyclic(shift))?;
        let rotated = builder.current().clone();
        steps.push(CertStep {
            kind: StepKind::CyclicShift,
            input: current.clone(),
            output: rotated.clone(),
            conjugator: None,
            target: None,
            residues: None,
            shift: Some(shift),
            trace: Some(builder.finish()),
        });
        current = rotated;
    }

    // the virtual crossing now trails; remove it and its strand
    {
        let mut builder = TraceBuilder::new(current.clone());
        builder.push(MoveApplication::stab(
            MoveKind::DestabV,
            current.len(),
            None,
        ))?;
        let destabilized = builder.current().clone();
        steps.push(CertStep {
            kind: StepKind::DestabilizeVirtual,
            input: current.clone(),
            output: destabilized.clone(),
            conjugator: None,
            target: None,
            residues: None,
            shift: None,
            trace: Some(builder.finish()),
        });
        current = destabilized;
    }

    // rotate back so the kept word leads again
    let back = current.len() - iota.len();
    if back > 0 && back < current.len() {
        let mut builder = TraceBuilder::new(current.clone());
        builder.push(MoveApplication::cyclic(back))?;
        let rotated = builder.current().clone();
        steps.push(CertStep {
            kind: StepKind::CyclicShift,
            input: current.clone(),
            output: rotated.clone(),
            conjugator: None,
            target: None,
            residues: None,
            shift: Some(back),
            trace: Some(builder.finish()),
        });
        current = rotated;
    }

    let mut expected = comb.kept.clone();
    for i in 1..=m.saturating_sub(2) {
        expected =
            expected.concat(&build_a(i, m - 1, m - 1, AForm::Right)?.pow(residues[i as usize - 1]));
    }
    expected = expected.concat(&build_b(target, m - 1, m - 1)?);
    assert_eq!(current, expected, "the round must end in the narrowed word");
    Ok((current, steps))
}

/// Removes strands until the permutation is the identity, accumulating one
/// certificate for the whole descent.
pub fn reduce_to_pure(word: &BraidWord) -> Result<(BraidWord, Certificate), Error> {
    require_classical(word)?;
    let mut current = word.clone();
    let mut steps = Vec::new();
    while !Permutation::of_word(&current).is_identity() {
        let (next, round) = reduce_step(&current)?;
        steps.extend(round);
        current = next;
    }
    let certificate = Certificate {
        input: word.clone(),
        steps,
        output: current.clone(),
    };
    Ok((current, certificate))
}

/// The canonical pure word for a linking matrix: ascending bands with the
/// matrix entries as exponents.
fn canonical_word(lambda: &LinkingMatrix) -> Result<BraidWord, Error> {
    let n = lambda.n() as u32;
    let mut beta = BraidWord::identity(n.max(1));
    for k in 2..=n {
        for i in 1..k {
            let e = lambda.entry(i, k);
            if e != 0 {
                beta = beta.concat(&build_a(i, k, n, AForm::Left)?.pow(e));
            }
        }
    }
    Ok(beta)
}

/// Classifies a classical closure: reduces to a pure word, minimizes the
/// linking matrix over component relabelings, and rewrites to the canonical
/// band product. The certificate covers the whole chain.
pub fn canonical_form(word: &BraidWord) -> Result<(CanonicalForm, Certificate), Error> {
    let (pure, mut certificate) = reduce_to_pure(word)?;
    let (_, lambda) = linking_matrix(&pure)?;
    let (minimal, labeling) = relabel_minimal(&lambda);
    let beta = canonical_word(&minimal)?;
    assert_eq!(
        linking_matrix(&beta)?.1,
        minimal,
        "the canonical word must realize the minimal matrix"
    );
    let form = CanonicalForm {
        n: minimal.n() as u32,
        lambda: minimal,
        beta: beta.clone(),
        labeling,
    };
    if pure != beta {
        assert_eq!(
            closure_class(&pure),
            closure_class(&beta),
            "the canonical word must keep the closure data"
        );
        // small instances get an explicit elementary witness
        let trace = if form.n <= 3 && pure.len().max(beta.len()) <= 10 {
            let budget = Budget {
                max_states: 20_000,
                ..Budget::default()
            };
            match bfs_equivalent(&pure, &beta, Level::Closure, &budget) {
                Ok(found) => found,
                Err(Error::BudgetExhausted(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        certificate.steps.push(CertStep {
            kind: StepKind::FinalAbelianize,
            input: pure,
            output: beta.clone(),
            conjugator: None,
            target: None,
            residues: None,
            shift: None,
            trace,
        });
        certificate.output = beta;
    }
    Ok((form, certificate))
}

/// Whether two classical words have closures in the same class. Complete:
/// the verdict depends only on component counts and minimized linking
/// matrices.
pub fn fused_equivalent(a: &BraidWord, b: &BraidWord) -> Result<bool, Error> {
    require_classical(a)?;
    require_classical(b)?;
    let (components_a, lambda_a) = linking_matrix(a)?;
    let (components_b, lambda_b) = linking_matrix(b)?;
    if components_a.count() != components_b.count() {
        return Ok(false);
    }
    Ok(relabel_minimal(&lambda_a).0 == relabel_minimal(&lambda_b).0)
}

fn check_virtualize_shape(input: &BraidWord, output: &BraidWord) -> Result<(), String> {
    if input.strands() != output.strands() {
        return Err("virtualization changes the strand count".into());
    }
    if input.first_virtual_position().is_some() {
        return Err("virtualization input must be classical".into());
    }
    let from = input.letters();
    let to = output.letters();
    let taus: Vec<usize> = to
        .iter()
        .enumerate()
        .filter(|(_, g)| matches!(g, Generator::Tau { .. }))
        .map(|(p, _)| p)
        .collect();
    let [p] = taus[..] else {
        return Err("output must contain exactly one virtual crossing".into());
    };
    let Generator::Tau { index } = to[p] else {
        unreachable!()
    };
    if from.len() < to.len() {
        return Err("virtualization cannot lengthen the word".into());
    }
    let run = from.len() - to.len() + 1;
    if run.is_multiple_of(2) {
        return Err("the replaced crossing run must have odd length".into());
    }
    if from[..p] != to[..p] || from[p + run..] != to[p + 1..] {
        return Err("the words must agree outside the replaced run".into());
    }
    let Generator::Sigma { sign, .. } = from[p] else {
        unreachable!("classical input")
    };
    let expected = Generator::sigma(index, sign);
    if from[p..p + run].iter().any(|&g| g != expected) {
        return Err("the replaced run must repeat one crossing".into());
    }
    Ok(())
}

/// Revalidates a certificate from scratch: the steps must chain between the
/// declared endpoints, every step must preserve the closure data, and each
/// step must carry evidence matching its kind.
pub fn check_certificate(certificate: &Certificate) -> Result<CertReport, Error> {
    let invalid = |step: usize, reason: String| Error::CertificateInvalid { step, reason };
    if certificate.steps.is_empty() {
        if certificate.input != certificate.output {
            return Err(invalid(0, "no steps, but the endpoints differ".into()));
        }
        return Ok(CertReport {
            steps: 0,
            verdicts: Vec::new(),
        });
    }
    if certificate.steps[0].input != certificate.input {
        return Err(invalid(
            1,
            "the first step does not start at the certificate input".into(),
        ));
    }
    let mut verdicts = Vec::with_capacity(certificate.steps.len());
    for (idx, step) in certificate.steps.iter().enumerate() {
        let number = idx + 1;
        if idx > 0 && step.input != certificate.steps[idx - 1].output {
            return Err(invalid(
                number,
                "the step does not continue the previous output".into(),
            ));
        }
        if closure_class(&step.input) != closure_class(&step.output) {
            return Err(invalid(number, "the step changes the closure data".into()));
        }
        let replayed = |trace: &Option<RewriteTrace>| -> Result<StepVerdict, Error> {
            let trace = trace
                .as_ref()
                .ok_or_else(|| invalid(number, "the step carries no trace".into()))?;
            if trace.start != step.input || trace.end != step.output {
                return Err(invalid(
                    number,
                    "the trace endpoints disagree with the step".into(),
                ));
            }
            replay(trace).map_err(|e| invalid(number, e.to_string()))?;
            Ok(StepVerdict::Replayed)
        };
        let verdict = match step.kind {
            StepKind::Conjugate
            | StepKind::TauSlide
            | StepKind::CyclicShift
            | StepKind::DestabilizeVirtual => replayed(&step.trace)?,
            StepKind::NormalForm => {
                if step.input.strands() != step.output.strands() {
                    return Err(invalid(number, "the rewrite changes the strand count".into()));
                }
                if Permutation::of_word(&step.input) != Permutation::of_word(&step.output) {
                    return Err(invalid(number, "the rewrite changes the permutation".into()));
                }
                if strand_pair_crossings(&step.input) != strand_pair_crossings(&step.output) {
                    return Err(invalid(
                        number,
                        "the rewrite changes a pairwise crossing count".into(),
                    ));
                }
                StepVerdict::InvariantChecked
            }
            StepKind::Virtualize => {
                check_virtualize_shape(&step.input, &step.output)
                    .map_err(|reason| invalid(number, reason))?;
                StepVerdict::ShapeChecked
            }
            StepKind::FinalAbelianize => {
                if step.trace.is_some() {
                    replayed(&step.trace)?
                } else {
                    if !Permutation::of_word(&step.input).is_identity()
                        || !Permutation::of_word(&step.output).is_identity()
                    {
                        return Err(invalid(
                            number,
                            "the final rewrite must connect pure words".into(),
                        ));
                    }
                    StepVerdict::InvariantChecked
                }
            }
        };
        verdicts.push(verdict);
    }
    let last = certificate.steps.last().expect("steps are nonempty");
    if last.output != certificate.output {
        return Err(invalid(
            certificate.steps.len(),
            "the last step does not end at the certificate output".into(),
        ));
    }
    Ok(CertReport {
        steps: verdicts.len(),
        verdicts,
    })
}
