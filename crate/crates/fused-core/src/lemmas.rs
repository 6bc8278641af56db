//! Certified identity chains for the band bookkeeping the reducer relies on.
//!
//! Each check constructs a [`LemmaReport`]: a chain of words starting at the
//! claimed left-hand side and ending at the right-hand side, where every step
//! is validated by one of four methods. `Literal` steps connect equal words
//! and only document a re-reading. `Replay` steps carry an elementary move
//! trace. `Artin` steps assert equality of the free-group actions of the two
//! words. `Lemma` steps replace the exact start word of a sub-certificate by
//! its exact end word (or the reverse) as a contiguous subword at a recorded
//! offset, so recursive verification stays a literal slice comparison.
//!
//! [`LemmaReport::verify`] revalidates a report from scratch; the check
//! functions call it before returning, so a report in hand is always valid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::artin::{artin_image, endo_equal};
use crate::elements::{build_a, build_b, AForm};
use crate::error::Error;
use crate::rewrite::{
    bfs_equivalent, invert_segment, replay, Budget, Dir, Level, MoveApplication, MoveKind,
    RewriteTrace, TraceBuilder,
};
use crate::word::{BraidWord, Generator, Sign};

/// A lemma together with the parameters it was instantiated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum LemmaInstance {
    CentralBase { j: u32, m: u32 },
    Central { i: u32, j: u32, m: u32 },
    KernelCommute { k: u32, i: u32, j: u32, m: u32 },
    TauSlide { i: u32, j: u32, m: u32 },
}

impl fmt::Display for LemmaInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaInstance::CentralBase { j, m } => write!(f, "central-base(j={j}, m={m})"),
            LemmaInstance::Central { i, j, m } => write!(f, "central(i={i}, j={j}, m={m})"),
            LemmaInstance::KernelCommute { k, i, j, m } => {
                write!(f, "kernel-commute(k={k}, i={i}, j={j}, m={m})")
            }
            LemmaInstance::TauSlide { i, j, m } => write!(f, "tau-slide(i={i}, j={j}, m={m})"),
        }
    }
}

/// How a single chain step is validated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMethod {
    Literal,
    Replay,
    Artin,
    Lemma,
}

/// One link of an identity chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub from: BraidWord,
    pub to: BraidWord,
    pub method: StepMethod,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<RewriteTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub justification: Option<Box<LemmaReport>>,
    /// 1-based start of the replaced subword, for `Lemma` steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    /// Whether the sub-certificate is read end to start, for `Lemma` steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversed: Option<bool>,
}

impl ChainStep {
    fn literal(word: &BraidWord, note: &str) -> ChainStep {
        ChainStep {
            from: word.clone(),
            to: word.clone(),
            method: StepMethod::Literal,
            note: note.into(),
            trace: None,
            justification: None,
            offset: None,
            reversed: None,
        }
    }

    fn replayed(trace: RewriteTrace, note: &str) -> ChainStep {
        ChainStep {
            from: trace.start.clone(),
            to: trace.end.clone(),
            method: StepMethod::Replay,
            note: note.into(),
            trace: Some(trace),
            justification: None,
            offset: None,
            reversed: None,
        }
    }

    fn action(from: BraidWord, to: BraidWord, note: &str) -> ChainStep {
        ChainStep {
            from,
            to,
            method: StepMethod::Artin,
            note: note.into(),
            trace: None,
            justification: None,
            offset: None,
            reversed: None,
        }
    }

    fn certified(
        from: BraidWord,
        to: BraidWord,
        justification: LemmaReport,
        offset: usize,
        reversed: bool,
        note: &str,
    ) -> ChainStep {
        ChainStep {
            from,
            to,
            method: StepMethod::Lemma,
            note: note.into(),
            trace: None,
            justification: Some(Box::new(justification)),
            offset: Some(offset),
            reversed: Some(reversed),
        }
    }
}

/// A verified identity chain from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub instance: LemmaInstance,
    pub start: BraidWord,
    pub end: BraidWord,
    pub chain: Vec<ChainStep>,
}

impl LemmaReport {
    /// Revalidates the whole chain, recursing into sub-certificates.
    pub fn verify(&self) -> Result<(), Error> {
        let invalid =
            |step: usize, reason: String| Error::CertificateInvalid { step, reason };
        if self.chain.is_empty() {
            return Err(invalid(0, "empty chain".into()));
        }
        if self.chain[0].from != self.start {
            return Err(invalid(1, "chain does not begin at the recorded start".into()));
        }
        for (idx, step) in self.chain.iter().enumerate() {
            let n = idx + 1;
            if idx > 0 && step.from != self.chain[idx - 1].to {
                return Err(invalid(n, "step does not continue the previous word".into()));
            }
            match step.method {
                StepMethod::Literal => {
                    if step.from != step.to {
                        return Err(invalid(n, "literal step connects different words".into()));
                    }
                }
                StepMethod::Replay => {
                    let trace = step
                        .trace
                        .as_ref()
                        .ok_or_else(|| invalid(n, "replay step carries no trace".into()))?;
                    if trace.start != step.from || trace.end != step.to {
                        return Err(invalid(n, "trace endpoints disagree with the step".into()));
                    }
                    replay(trace).map_err(|e| invalid(n, e.to_string()))?;
                }
                StepMethod::Artin => {
                    if step.from.strands() != step.to.strands() {
                        return Err(invalid(
                            n,
                            "action comparison needs a common strand count".into(),
                        ));
                    }
                    let same = endo_equal(&artin_image(&step.from), &artin_image(&step.to))
                        .map_err(|e| invalid(n, e.to_string()))?;
                    if !same {
                        return Err(invalid(n, "free-group actions differ".into()));
                    }
                }
                StepMethod::Lemma => {
                    let just = step.justification.as_deref().ok_or_else(|| {
                        invalid(n, "lemma step carries no sub-certificate".into())
                    })?;
                    just.verify()
                        .map_err(|e| invalid(n, format!("sub-certificate: {e}")))?;
                    if just.start.strands() > step.from.strands() {
                        return Err(invalid(
                            n,
                            "sub-certificate needs more strands than the host word".into(),
                        ));
                    }
                    let offset = step
                        .offset
                        .ok_or_else(|| invalid(n, "lemma step carries no offset".into()))?;
                    let (pattern, replacement) = if step.reversed.unwrap_or(false) {
                        (&just.end, &just.start)
                    } else {
                        (&just.start, &just.end)
                    };
                    check_subword_swap(&step.from, &step.to, offset, pattern, replacement)
                        .map_err(|reason| invalid(n, reason))?;
                }
            }
        }
        let last = self.chain.last().unwrap();
        if last.to != self.end {
            return Err(invalid(
                self.chain.len(),
                "chain does not finish at the recorded end".into(),
            ));
        }
        Ok(())
    }
}

fn check_subword_swap(
    from: &BraidWord,
    to: &BraidWord,
    offset: usize,
    pattern: &BraidWord,
    replacement: &BraidWord,
) -> Result<(), String> {
    if from.strands() != to.strands() {
        return Err("subword swap changes the strand count".into());
    }
    let f = from.letters();
    let t = to.letters();
    let p = pattern.letters();
    let r = replacement.letters();
    if offset < 1 || offset - 1 + p.len() > f.len() {
        return Err("offset outside the source word".into());
    }
    let cut = offset - 1;
    if &f[cut..cut + p.len()] != p {
        return Err("source word does not contain the certified subword at the offset".into());
    }
    if t.len() + p.len() != f.len() + r.len() {
        return Err("target length disagrees with the replacement".into());
    }
    if f[..cut] != t[..cut] {
        return Err("prefixes differ".into());
    }
    if &t[cut..cut + r.len()] != r {
        return Err("target word does not contain the replacement at the offset".into());
    }
    if f[cut + p.len()..] != t[cut + r.len()..] {
        return Err("suffixes differ".into());
    }
    Ok(())
}

fn far(pos: usize) -> MoveApplication {
    MoveApplication::simple(MoveKind::Far, pos)
}

/// Moves carrying the letter at `pos` rightward across `count` letters.
fn far_right(pos: usize, count: usize) -> impl Iterator<Item = MoveApplication> {
    (0..count).map(move |t| far(pos + t))
}

/// Moves carrying the letter at `pos` leftward across `count` letters.
fn far_left(pos: usize, count: usize) -> impl Iterator<Item = MoveApplication> {
    (0..count).map(move |t| far(pos - 1 - t))
}

pub(crate) fn shifted(mut app: MoveApplication, delta: usize) -> MoveApplication {
    app.pos += delta;
    app
}

/// Base identity: conjugating the adjacent band `A(j-1, j+1)` in right form
/// by the doubled crossing `s_j^2` yields the same band in left form.
///
/// The chain is a single elementary trace. The identity is genuinely outside
/// the action-preserving part of the catalog: the free-group actions of start
/// and end differ, which the unit tests pin as a negative control.
pub fn check_central_base(j: u32, m: u32) -> Result<LemmaReport, Error> {
    if j < 2 || j + 1 > m {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= j <= m-1, got j={j}, m={m}"
        )));
    }
    let a = j;
    let b = j - 1;
    let start = BraidWord::new(
        m,
        vec![
            Generator::positive(a),
            Generator::positive(a),
            Generator::negative(b),
            Generator::positive(a),
            Generator::positive(a),
            Generator::positive(b),
            Generator::negative(a),
            Generator::negative(a),
        ],
    )?;
    let mut builder = TraceBuilder::new(start.clone());
    builder.push(MoveApplication::simple(MoveKind::M3, 2))?;
    builder.push(MoveApplication::insert_sigma(5, b, Sign::Neg))?;
    builder.push(MoveApplication::simple(MoveKind::R3, 6))?;
    builder.push(MoveApplication::cancel_sigma(4, b, Sign::Pos))?;
    builder.push(MoveApplication::cancel_sigma(3, a, Sign::Neg))?;
    builder.push(MoveApplication::cancel_sigma(4, a, Sign::Pos))?;
    let trace = builder.finish();
    let end = trace.end.clone();
    let chain = vec![ChainStep::replayed(
        trace,
        "one mixed-sign triple slide, an inserted pair, a positive triple slide, then three cancellations",
    )];
    let report = LemmaReport {
        instance: LemmaInstance::CentralBase { j, m },
        start,
        end,
        chain,
    };
    report.verify()?;
    Ok(report)
}

/// Centrality: the doubled crossing `s_j^2` conjugates the band `A(i, j+1)`
/// in right form to itself.
///
/// The doubled crossing is carried across the low-index part of the
/// conjugator by distant commutations, the base identity handles the clasp in
/// the middle, and the final widening of the narrow band is an action
/// equality.
pub fn check_central(i: u32, j: u32, m: u32) -> Result<LemmaReport, Error> {
    if i < 1 || i >= j || j + 1 > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= i < j <= m-1, got i={i}, j={j}, m={m}"
        )));
    }
    let a = j;
    let c = (j - 1 - i) as usize;
    let wide = build_a(i, j + 1, m, AForm::Right)?;
    let sq = BraidWord::new(m, vec![Generator::positive(a), Generator::positive(a)])?;
    let start = sq.concat(&wide).concat(&sq.inverse());

    let mut chain = vec![ChainStep::literal(
        &start,
        "the start is the doubled top crossing conjugating the wide band generator in right form",
    )];

    let mut builder = TraceBuilder::new(start.clone());
    builder.extend(far_right(2, c))?;
    builder.extend(far_right(1, c))?;
    builder.extend(far_left(2 * c + 7, c))?;
    builder.extend(far_left(2 * c + 8, c))?;
    let transported = builder.current().clone();
    chain.push(ChainStep::replayed(
        builder.finish(),
        "carry the doubled crossing across the low-index part of the conjugator on both sides",
    ));

    let base = check_central_base(j, m)?;
    let prefix = build_b(i, j - 1, m)?.inverse();
    let suffix = build_b(i, j - 1, m)?;
    let slid = prefix.concat(&base.end).concat(&suffix);
    chain.push(ChainStep::certified(
        transported,
        slid.clone(),
        base,
        c + 1,
        false,
        "rewrite the clasp in the middle by the base identity",
    ));

    let mut builder = TraceBuilder::new(slid);
    builder.extend(far_left(c + 1, c))?;
    builder.extend(far_right(c + 4, c))?;
    let narrow_conjugated = builder.current().clone();
    chain.push(ChainStep::replayed(
        builder.finish(),
        "pull the single crossings out to the ends",
    ));
    chain.push(ChainStep::literal(
        &narrow_conjugated,
        "the middle is the band generator one column narrower, conjugated by the top crossing",
    ));
    chain.push(ChainStep::action(
        narrow_conjugated,
        wide.clone(),
        "conjugating the narrow band by the top crossing widens it by one column; the free-group actions agree",
    ));

    let report = LemmaReport {
        instance: LemmaInstance::Central { i, j, m },
        start,
        end: wide,
        chain,
    };
    report.verify()?;
    Ok(report)
}

/// Commutation of bands sharing their right column: `A(k, j+1)` and
/// `A(i, j+1)` commute for `k < i`.
///
/// The low band is carried across the conjugating run of the high band by
/// action equalities, and past the doubled crossing by the centrality
/// certificate read end to start followed by two cancellations.
pub fn check_kernel_commute(k: u32, i: u32, j: u32, m: u32) -> Result<LemmaReport, Error> {
    if k < 1 || k >= i || i > j || j + 1 > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k < i <= j <= m-1, got k={k}, i={i}, j={j}, m={m}"
        )));
    }
    let a = j;
    let low = build_a(k, j + 1, m, AForm::Right)?;
    let high = build_a(i, j + 1, m, AForm::Right)?;
    let run = build_b(i, j, m)?;
    let run_inv = run.inverse();
    let sq = BraidWord::new(m, vec![Generator::positive(a), Generator::positive(a)])?;

    let start = low.concat(&high);
    let w1 = run_inv.concat(&low).concat(&sq).concat(&run);
    let mut chain = vec![ChainStep::action(
        start.clone(),
        w1.clone(),
        "the low band commutes with the conjugating run; the free-group actions agree",
    )];

    let central = check_central(k, j, m)?;
    let w2 = run_inv.concat(&central.start).concat(&sq).concat(&run);
    chain.push(ChainStep::certified(
        w1,
        w2.clone(),
        central,
        run_inv.len() + 1,
        true,
        "wrap the low band in the doubled crossing via the centrality certificate, read end to start",
    ));

    let mut builder = TraceBuilder::new(w2);
    let junction = run_inv.len() + low.len() + 4;
    builder.push(MoveApplication::cancel_sigma(junction, a, Sign::Neg))?;
    builder.push(MoveApplication::cancel_sigma(junction - 1, a, Sign::Neg))?;
    let w3 = builder.current().clone();
    chain.push(ChainStep::replayed(
        builder.finish(),
        "cancel the inner doubled crossing against its inverse",
    ));

    let end = high.concat(&low);
    chain.push(ChainStep::action(
        w3,
        end.clone(),
        "the low band commutes back across the conjugating run; the free-group actions agree",
    ));
    chain.push(ChainStep::literal(
        &end,
        "the end is the two bands multiplied in the opposite order",
    ));

    let report = LemmaReport {
        instance: LemmaInstance::KernelCommute { k, i, j, m },
        start,
        end,
        chain,
    };
    report.verify()?;
    Ok(report)
}

/// Elementary trace sliding a virtual crossing `t_j` leftward through one
/// band factor: `A(i, j+1)^e t_j` becomes `t_j A(i, j)^e` (right forms,
/// `e` the sign).
///
/// The positive template needs `b-1` distant commutations on each side of an
/// overcrossing slide, a positive double slide, and one cancellation, where
/// `b = j - i`. The negative template conjugates: it grows the narrow band
/// pair after the crossing, undoes the positive template in reverse, and
/// cancels the wide pair.
pub(crate) fn tau_slide_segment(
    i: u32,
    j: u32,
    m: u32,
    sign: Sign,
) -> Result<RewriteTrace, Error> {
    if i < 1 || i >= j || j + 1 > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= i < j <= m-1, got i={i}, j={j}, m={m}"
        )));
    }
    let b = (j - i) as usize;
    let wide = build_a(i, j + 1, m, AForm::Right)?;
    let tau = BraidWord::new(m, vec![Generator::tau(j)])?;
    match sign {
        Sign::Pos => {
            let mut builder = TraceBuilder::new(wide.concat(&tau));
            builder.extend(far_left(2 * b + 3, b - 1))?;
            builder.push(MoveApplication::directed(MoveKind::FO, b + 2, Dir::Forward))?;
            builder.push(MoveApplication::simple(MoveKind::M1, b + 1))?;
            builder.push(MoveApplication::cancel_sigma(b, j - 1, Sign::Neg))?;
            builder.extend(far_left(b, b - 1))?;
            Ok(builder.finish())
        }
        Sign::Neg => {
            let narrow = build_a(i, j, m, AForm::Right)?;
            let mut builder = TraceBuilder::new(wide.inverse().concat(&tau));
            for (t, g) in narrow.letters().iter().enumerate() {
                let (index, sg) = match g {
                    Generator::Sigma { index, sign } => (*index, *sign),
                    // band generators are classical
                    Generator::Tau { .. } => unreachable!(),
                };
                builder.push(MoveApplication::insert_sigma(2 * b + 4 + t, index, sg))?;
            }
            let forward = tau_slide_segment(i, j, m, Sign::Pos)?;
            let undo = invert_segment(&forward.start, &forward.moves)?;
            builder.extend(undo.into_iter().map(|mv| shifted(mv, 2 * b + 2)))?;
            builder.reduce()?;
            Ok(builder.finish())
        }
    }
}

/// Moves realizing one positive or negative band-factor slide inside a larger
/// word; `offset` is the length of the prefix before the factor.
pub(crate) fn slide_tau_through_band(
    i: u32,
    j: u32,
    m: u32,
    sign: Sign,
    offset: usize,
) -> Result<Vec<MoveApplication>, Error> {
    let segment = tau_slide_segment(i, j, m, sign)?;
    Ok(segment.moves.into_iter().map(|mv| shifted(mv, offset)).collect())
}

/// Virtual crossing slide: `A(i, j+1) t_j` equals `t_j A(i, j)` (right
/// forms), by a fully elementary trace.
pub fn check_tau_slide(i: u32, j: u32, m: u32) -> Result<LemmaReport, Error> {
    let segment = tau_slide_segment(i, j, m, Sign::Pos)?;
    let start = segment.start.clone();
    let end = segment.end.clone();
    let chain = vec![ChainStep::replayed(
        segment,
        "slide the virtual crossing through the band factor, narrowing it by one column",
    )];
    let report = LemmaReport {
        instance: LemmaInstance::TauSlide { i, j, m },
        start,
        end,
        chain,
    };
    report.verify()?;
    Ok(report)
}

/// Result of searching for a derivation of one of the three derived moves
/// from the rest of the catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeriveOutcome {
    pub target: MoveKind,
    pub lhs: BraidWord,
    pub rhs: BraidWord,
    /// `None` when the search budget ran out before a derivation was found.
    pub trace: Option<RewriteTrace>,
}

/// Searches for elementary derivations of the three derived moves with those
/// moves banned from the search. Exhausting the budget is not an error; the
/// corresponding outcome just carries no trace.
pub fn derive_m_moves(max_states: usize) -> Result<Vec<DeriveOutcome>, Error> {
    let pairs = [
        (MoveKind::M1, "s1 t2 s1", "s2 t1 s2"),
        (MoveKind::M2, "S1 t2 S1", "S2 t1 S2"),
        (MoveKind::M3, "s1 S2 s1", "s2 S1 s2"),
    ];
    let mut out = Vec::with_capacity(pairs.len());
    for (kind, l, r) in pairs {
        let lhs: BraidWord = l.parse()?;
        let rhs: BraidWord = r.parse()?;
        let budget = Budget {
            max_length: Some(lhs.len() + 6),
            max_states,
            banned: vec![MoveKind::M1, MoveKind::M2, MoveKind::M3],
        };
        let trace = match bfs_equivalent(&lhs, &rhs, Level::Word, &budget) {
            Ok(found) => found,
            Err(Error::BudgetExhausted(_)) => None,
            Err(e) => return Err(e),
        };
        out.push(DeriveOutcome { target: kind, lhs, rhs, trace });
    }
    Ok(out)
}

/// Outcome of running every lemma instance up to a strand bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub max_strands: u32,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs and verifies every lemma instance with at most `max_strands` strands.
pub fn run_suite(max_strands: u32) -> SuiteReport {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut record = |instance: LemmaInstance, result: Result<LemmaReport, Error>| {
        checked += 1;
        if let Err(e) = result.and_then(|report| report.verify()) {
            failures.push(format!("{instance}: {e}"));
        }
    };
    for m in 2..=max_strands {
        for j in 2..m {
            record(LemmaInstance::CentralBase { j, m }, check_central_base(j, m));
        }
        for j in 2..m {
            for i in 1..j {
                record(LemmaInstance::Central { i, j, m }, check_central(i, j, m));
            }
        }
        for j in 1..m {
            for i in 1..=j {
                for k in 1..i {
                    record(
                        LemmaInstance::KernelCommute { k, i, j, m },
                        check_kernel_commute(k, i, j, m),
                    );
                }
            }
        }
        for j in 2..m {
            for i in 1..j {
                record(LemmaInstance::TauSlide { i, j, m }, check_tau_slide(i, j, m));
            }
        }
    }
    SuiteReport { max_strands, checked, failures }
}
