use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::links::{component_pair_sums, relabel_minimal, strand_pair_crossings, LinkingMatrix};
use crate::perm::Permutation;
use crate::word::{BraidWord, Generator, Sign};

/// Scope of a rewrite search. `Word` keeps the braid element fixed;
/// `Closure` adds the moves that change the word but not its closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Word,
    Closure,
}

/// Direction for the two rewrites whose sides have different letter shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Forward,
    Reverse,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Reverse,
            Dir::Reverse => Dir::Forward,
        }
    }
}

/// The move catalog.
///
/// In-place rewrites, all at a 1-based letter position:
/// * `R2Insert`/`R2Cancel`: `[] <-> [s(k)^e s(k)^-e]`
/// * `V2Insert`/`V2Cancel`: `[] <-> [t(k) t(k)]`
/// * `R3`: `[s(x)+ s(y)+ s(x)+] -> [s(y)+ s(x)+ s(y)+]`, `|x - y| = 1`
/// * `Far`: `[g(x) h(y)] -> [h(y) g(x)]`, `|x - y| >= 2`
/// * `V3`: `[t(x) t(y) t(x)] -> [t(y) t(x) t(y)]`, `|x - y| = 1`
/// * `Mixed`: `[t(x) t(y) s(x)^e] <-> [s(y)^e t(x) t(y)]`, `|x - y| = 1`
/// * `FO`: `[s(c+1)+ s(c)+ t(c+1)] <-> [t(c) s(c+1)+ s(c)+]`
/// * `FU`: `[s(x)^-e t(y) s(x)^e] -> [s(y)^e t(x) s(y)^-e]`, `|x - y| = 1`
/// * `M1`: `[s(x)+ t(y) s(x)+] -> [s(y)+ t(x) s(y)+]`, `|x - y| = 1`
/// * `M2`: the negative-sign version of `M1`
/// * `M3`: `[s(x)+ s(y)- s(x)+] -> [s(y)+ s(x)- s(y)+]`, `|x - y| = 1`
///
/// Closure-level moves:
/// * `Cyclic`: rotate the first `shift` letters to the end
/// * `Conj`: `w -> c^-1 w c` for a conjugator word `c`
/// * `StabC`/`DestabC`: append or remove a trailing `s(m)^e` while growing
///   or shrinking the strand count
/// * `StabV`/`DestabV`: the `t(m)` version
///
/// Every move preserves the permutation and the per-strand-pair signed
/// crossing counts; the closure-level moves preserve the closure's component
/// count and linking data instead of the word's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "r2-insert")]
    R2Insert,
    #[serde(rename = "r2-cancel")]
    R2Cancel,
    #[serde(rename = "v2-insert")]
    V2Insert,
    #[serde(rename = "v2-cancel")]
    V2Cancel,
    #[serde(rename = "r3")]
    R3,
    #[serde(rename = "far")]
    Far,
    #[serde(rename = "v3")]
    V3,
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "fo")]
    FO,
    #[serde(rename = "fu")]
    FU,
    #[serde(rename = "m1")]
    M1,
    #[serde(rename = "m2")]
    M2,
    #[serde(rename = "m3")]
    M3,
    #[serde(rename = "cyclic")]
    Cyclic,
    #[serde(rename = "conj")]
    Conj,
    #[serde(rename = "stab-c")]
    StabC,
    #[serde(rename = "destab-c")]
    DestabC,
    #[serde(rename = "stab-v")]
    StabV,
    #[serde(rename = "destab-v")]
    DestabV,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::R2Insert => "r2-insert",
            MoveKind::R2Cancel => "r2-cancel",
            MoveKind::V2Insert => "v2-insert",
            MoveKind::V2Cancel => "v2-cancel",
            MoveKind::R3 => "r3",
            MoveKind::Far => "far",
            MoveKind::V3 => "v3",
            MoveKind::Mixed => "mixed",
            MoveKind::FO => "fo",
            MoveKind::FU => "fu",
            MoveKind::M1 => "m1",
            MoveKind::M2 => "m2",
            MoveKind::M3 => "m3",
            MoveKind::Cyclic => "cyclic",
            MoveKind::Conj => "conj",
            MoveKind::StabC => "stab-c",
            MoveKind::DestabC => "destab-c",
            MoveKind::StabV => "stab-v",
            MoveKind::DestabV => "destab-v",
        }
    }

    pub fn is_word_level(self) -> bool {
        !matches!(
            self,
            MoveKind::Cyclic
                | MoveKind::Conj
                | MoveKind::StabC
                | MoveKind::DestabC
                | MoveKind::StabV
                | MoveKind::DestabV
        )
    }

    /// Whether the rewrite always fixes the free-group action of the word.
    /// A false report gives no guarantee either way: one `FU` orientation
    /// happens to preserve the action, and the closure-level moves keep the
    /// closure rather than the word's action.
    pub fn preserves_action(self) -> bool {
        matches!(
            self,
            MoveKind::R2Insert
                | MoveKind::R2Cancel
                | MoveKind::V2Insert
                | MoveKind::V2Cancel
                | MoveKind::R3
                | MoveKind::Far
                | MoveKind::V3
                | MoveKind::Mixed
                | MoveKind::FO
        )
    }
}

/// Optional payload of a move application. Unused fields stay `None` and are
/// omitted from serialized traces.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub index: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign: Option<Sign>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dir: Option<Dir>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shift: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conjugator: Option<BraidWord>,
}

/// One move applied at one position of one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveApplication {
    pub kind: MoveKind,
    pub pos: usize,
    #[serde(flatten)]
    pub params: MoveParams,
}

impl MoveApplication {
    pub fn simple(kind: MoveKind, pos: usize) -> MoveApplication {
        MoveApplication { kind, pos, params: MoveParams::default() }
    }

    pub fn directed(kind: MoveKind, pos: usize, dir: Dir) -> MoveApplication {
        MoveApplication {
            kind,
            pos,
            params: MoveParams { dir: Some(dir), ..MoveParams::default() },
        }
    }

    pub fn insert_sigma(pos: usize, index: u32, sign: Sign) -> MoveApplication {
        MoveApplication {
            kind: MoveKind::R2Insert,
            pos,
            params: MoveParams { index: Some(index), sign: Some(sign), ..MoveParams::default() },
        }
    }

    pub fn insert_tau(pos: usize, index: u32) -> MoveApplication {
        MoveApplication {
            kind: MoveKind::V2Insert,
            pos,
            params: MoveParams { index: Some(index), ..MoveParams::default() },
        }
    }

    pub fn cancel_sigma(pos: usize, index: u32, sign: Sign) -> MoveApplication {
        MoveApplication {
            kind: MoveKind::R2Cancel,
            pos,
            params: MoveParams { index: Some(index), sign: Some(sign), ..MoveParams::default() },
        }
    }

    pub fn cancel_tau(pos: usize, index: u32) -> MoveApplication {
        MoveApplication {
            kind: MoveKind::V2Cancel,
            pos,
            params: MoveParams { index: Some(index), ..MoveParams::default() },
        }
    }

    pub fn cyclic(shift: usize) -> MoveApplication {
        MoveApplication {
            kind: MoveKind::Cyclic,
            pos: 1,
            params: MoveParams { shift: Some(shift), ..MoveParams::default() },
        }
    }

    pub fn conj(conjugator: BraidWord) -> MoveApplication {
        MoveApplication {
            kind: MoveKind::Conj,
            pos: 1,
            params: MoveParams { conjugator: Some(conjugator), ..MoveParams::default() },
        }
    }

    pub fn stab(kind: MoveKind, pos: usize, sign: Option<Sign>) -> MoveApplication {
        MoveApplication { kind, pos, params: MoveParams { sign, ..MoveParams::default() } }
    }
}

/// A recorded run of moves from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub start: BraidWord,
    pub moves: Vec<MoveApplication>,
    pub end: BraidWord,
}

/// Applies every move of the trace in order and checks the recorded end.
pub fn replay(trace: &RewriteTrace) -> Result<BraidWord, Error> {
    let mut current = trace.start.clone();
    for (i, app) in trace.moves.iter().enumerate() {
        current = apply_move(&current, app)
            .map_err(|e| Error::ReplayFailed { step: i + 1, reason: e.to_string() })?;
    }
    if current != trace.end {
        return Err(Error::ReplayFailed {
            step: trace.moves.len(),
            reason: format!("end mismatch: replay gives '{current}', trace claims '{}'", trace.end),
        });
    }
    Ok(current)
}

/// Incrementally applies and records moves; used to construct traces that
/// are valid by construction.
#[derive(Debug, Clone)]
pub(crate) struct TraceBuilder {
    start: BraidWord,
    current: BraidWord,
    moves: Vec<MoveApplication>,
}

impl TraceBuilder {
    pub(crate) fn new(start: BraidWord) -> TraceBuilder {
        TraceBuilder { current: start.clone(), start, moves: Vec::new() }
    }

    pub(crate) fn current(&self) -> &BraidWord {
        &self.current
    }

    pub(crate) fn push(&mut self, app: MoveApplication) -> Result<(), Error> {
        self.current = apply_move(&self.current, &app)?;
        self.moves.push(app);
        Ok(())
    }

    pub(crate) fn extend(
        &mut self,
        apps: impl IntoIterator<Item = MoveApplication>,
    ) -> Result<(), Error> {
        for app in apps {
            self.push(app)?;
        }
        Ok(())
    }

    /// Cancels inverse pairs leftmost-first, recording each cancellation.
    pub(crate) fn reduce(&mut self) -> Result<(), Error> {
        let (_, moves) = reduce_with_moves(&self.current);
        self.extend(moves)
    }

    pub(crate) fn finish(self) -> RewriteTrace {
        RewriteTrace { start: self.start, moves: self.moves, end: self.current }
    }
}

fn sigma_parts(g: Generator) -> Option<(u32, Sign)> {
    match g {
        Generator::Sigma { index, sign } => Some((index, sign)),
        Generator::Tau { .. } => None,
    }
}

fn tau_index(g: Generator) -> Option<u32> {
    match g {
        Generator::Tau { index } => Some(index),
        Generator::Sigma { .. } => None,
    }
}

fn adjacent(x: u32, y: u32) -> bool {
    x.abs_diff(y) == 1
}

/// Replacement for a three-letter rewrite at a window, if its pattern
/// matches. Also reports the direction for the two asymmetric rewrites.
fn window_rewrite(kind: MoveKind, w: &[Generator]) -> Option<(Vec<Generator>, Option<Dir>)> {
    let [a, b, c] = [w[0], w[1], w[2]];
    match kind {
        MoveKind::R3 => {
            let (x, sx) = sigma_parts(a)?;
            let (y, sy) = sigma_parts(b)?;
            let (x2, sx2) = sigma_parts(c)?;
            if x == x2
                && adjacent(x, y)
                && sx == Sign::Pos
                && sy == Sign::Pos
                && sx2 == Sign::Pos
            {
                let r = vec![
                    Generator::positive(y),
                    Generator::positive(x),
                    Generator::positive(y),
                ];
                return Some((r, None));
            }
            None
        }
        MoveKind::V3 => {
            let x = tau_index(a)?;
            let y = tau_index(b)?;
            let x2 = tau_index(c)?;
            if x == x2 && adjacent(x, y) {
                let r = vec![Generator::tau(y), Generator::tau(x), Generator::tau(y)];
                return Some((r, None));
            }
            None
        }
        MoveKind::Mixed => {
            if let (Some(x), Some(y), Some((x2, e))) =
                (tau_index(a), tau_index(b), sigma_parts(c))
            {
                if x == x2 && adjacent(x, y) {
                    let r = vec![Generator::sigma(y, e), Generator::tau(x), Generator::tau(y)];
                    return Some((r, Some(Dir::Forward)));
                }
            }
            if let (Some((y, e)), Some(x), Some(y2)) =
                (sigma_parts(a), tau_index(b), tau_index(c))
            {
                if y == y2 && adjacent(x, y) {
                    let r = vec![Generator::tau(x), Generator::tau(y), Generator::sigma(x, e)];
                    return Some((r, Some(Dir::Reverse)));
                }
            }
            None
        }
        MoveKind::FO => {
            if let (Some((a1, s1)), Some((b1, s2)), Some(c1)) =
                (sigma_parts(a), sigma_parts(b), tau_index(c))
            {
                if s1 == Sign::Pos && s2 == Sign::Pos && a1 == c1 && a1 == b1 + 1 {
                    let r = vec![
                        Generator::tau(b1),
                        Generator::positive(a1),
                        Generator::positive(b1),
                    ];
                    return Some((r, Some(Dir::Forward)));
                }
            }
            if let (Some(a1), Some((b1, s1)), Some((c1, s2))) =
                (tau_index(a), sigma_parts(b), sigma_parts(c))
            {
                if s1 == Sign::Pos && s2 == Sign::Pos && a1 == c1 && b1 == a1 + 1 {
                    let r = vec![
                        Generator::positive(b1),
                        Generator::positive(c1),
                        Generator::tau(b1),
                    ];
                    return Some((r, Some(Dir::Reverse)));
                }
            }
            None
        }
        MoveKind::FU | MoveKind::M1 | MoveKind::M2 => {
            let (x, s1) = sigma_parts(a)?;
            let y = tau_index(b)?;
            let (x2, s2) = sigma_parts(c)?;
            if x != x2 || !adjacent(x, y) {
                return None;
            }
            let matches = match kind {
                MoveKind::FU => s1 != s2,
                MoveKind::M1 => s1 == Sign::Pos && s2 == Sign::Pos,
                MoveKind::M2 => s1 == Sign::Neg && s2 == Sign::Neg,
                _ => unreachable!(),
            };
            if !matches {
                return None;
            }
            // the outgoing signs swap ends for FU and stay put for M1/M2
            let r = vec![Generator::sigma(y, s2), Generator::tau(x), Generator::sigma(y, s1)];
            Some((r, None))
        }
        MoveKind::M3 => {
            let (x, s1) = sigma_parts(a)?;
            let (y, s2) = sigma_parts(b)?;
            let (x2, s3) = sigma_parts(c)?;
            if x == x2
                && adjacent(x, y)
                && s1 == Sign::Pos
                && s2 == Sign::Neg
                && s3 == Sign::Pos
            {
                let r = vec![
                    Generator::positive(y),
                    Generator::negative(x),
                    Generator::positive(y),
                ];
                return Some((r, None));
            }
            None
        }
        _ => None,
    }
}

fn mismatch(kind: MoveKind, pos: usize) -> Error {
    Error::PatternMismatch { what: kind.name().to_string(), position: pos }
}

/// Applies one move literally. No implicit reduction: the output letters are
/// exactly the input with the move's local change, so traces replay exactly.
pub fn apply_move(word: &BraidWord, app: &MoveApplication) -> Result<BraidWord, Error> {
    let letters = word.letters();
    let n = letters.len();
    let m = word.strands();
    let pos = app.pos;
    match app.kind {
        MoveKind::R2Insert | MoveKind::V2Insert => {
            if pos == 0 || pos > n + 1 {
                return Err(mismatch(app.kind, pos));
            }
            let index = app
                .params
                .index
                .ok_or_else(|| Error::InvalidArgument("insert needs an index".into()))?;
            if index + 1 > m {
                return Err(Error::IndexOutOfRange { index, strands: m });
            }
            let pair = match app.kind {
                MoveKind::R2Insert => {
                    let sign = app
                        .params
                        .sign
                        .ok_or_else(|| Error::InvalidArgument("insert needs a sign".into()))?;
                    [Generator::sigma(index, sign), Generator::sigma(index, sign.flip())]
                }
                _ => [Generator::tau(index), Generator::tau(index)],
            };
            let mut out = letters[..pos - 1].to_vec();
            out.extend_from_slice(&pair);
            out.extend_from_slice(&letters[pos - 1..]);
            BraidWord::new(m, out)
        }
        MoveKind::R2Cancel | MoveKind::V2Cancel => {
            if pos == 0 || pos + 1 > n {
                return Err(mismatch(app.kind, pos));
            }
            let (a, b) = (letters[pos - 1], letters[pos]);
            let fits = match app.kind {
                MoveKind::R2Cancel => {
                    matches!(a, Generator::Sigma { .. }) && a.is_inverse_of(b)
                }
                _ => matches!(a, Generator::Tau { .. }) && a == b,
            };
            if !fits {
                return Err(mismatch(app.kind, pos));
            }
            if let Some(index) = app.params.index {
                if index != a.index() {
                    return Err(mismatch(app.kind, pos));
                }
            }
            if let (Some(sign), Generator::Sigma { sign: actual, .. }) = (app.params.sign, a) {
                if sign != actual {
                    return Err(mismatch(app.kind, pos));
                }
            }
            let mut out = letters[..pos - 1].to_vec();
            out.extend_from_slice(&letters[pos + 1..]);
            BraidWord::new(m, out)
        }
        MoveKind::Far => {
            if pos == 0 || pos + 1 > n {
                return Err(mismatch(app.kind, pos));
            }
            let (a, b) = (letters[pos - 1], letters[pos]);
            if a.index().abs_diff(b.index()) < 2 {
                return Err(mismatch(app.kind, pos));
            }
            let mut out = letters.to_vec();
            out.swap(pos - 1, pos);
            BraidWord::new(m, out)
        }
        MoveKind::R3
        | MoveKind::V3
        | MoveKind::Mixed
        | MoveKind::FO
        | MoveKind::FU
        | MoveKind::M1
        | MoveKind::M2
        | MoveKind::M3 => {
            if pos == 0 || pos + 2 > n {
                return Err(mismatch(app.kind, pos));
            }
            let window = &letters[pos - 1..pos + 2];
            let (replacement, dir) =
                window_rewrite(app.kind, window).ok_or_else(|| mismatch(app.kind, pos))?;
            if app.params.dir.is_some() && app.params.dir != dir {
                return Err(mismatch(app.kind, pos));
            }
            let mut out = letters.to_vec();
            out[pos - 1..pos + 2].copy_from_slice(&replacement);
            BraidWord::new(m, out)
        }
        MoveKind::Cyclic => {
            let shift = app
                .params
                .shift
                .ok_or_else(|| Error::InvalidArgument("cyclic needs a shift".into()))?;
            Ok(word.rotate_left(shift))
        }
        MoveKind::Conj => {
            let c = app
                .params
                .conjugator
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("conj needs a conjugator".into()))?;
            Ok(c.inverse().concat(word).concat(c))
        }
        MoveKind::StabC | MoveKind::StabV => {
            let mut out = letters.to_vec();
            out.push(match app.kind {
                MoveKind::StabC => {
                    let sign = app
                        .params
                        .sign
                        .ok_or_else(|| Error::InvalidArgument("stab needs a sign".into()))?;
                    Generator::sigma(m, sign)
                }
                _ => Generator::tau(m),
            });
            BraidWord::new(m + 1, out)
        }
        MoveKind::DestabC | MoveKind::DestabV => {
            if m < 2 || n == 0 {
                return Err(mismatch(app.kind, pos));
            }
            let last = letters[n - 1];
            let fits = match (app.kind, last) {
                (MoveKind::DestabC, Generator::Sigma { index, sign }) => {
                    index == m - 1 && app.params.sign.is_none_or(|s| s == sign)
                }
                (MoveKind::DestabV, Generator::Tau { index }) => index == m - 1,
                _ => false,
            };
            if !fits {
                return Err(mismatch(app.kind, pos));
            }
            let rest = &letters[..n - 1];
            if rest.iter().any(|g| g.index() + 1 >= m) {
                return Err(mismatch(app.kind, pos));
            }
            BraidWord::new(m - 1, rest.to_vec())
        }
    }
}

/// The inverse application: applied at the same position of the move's
/// output, it restores the input. `pre` and `post` are that input and
/// output.
pub fn invert_application(
    app: &MoveApplication,
    pre: &BraidWord,
    post: &BraidWord,
) -> MoveApplication {
    match app.kind {
        MoveKind::R2Insert => MoveApplication { kind: MoveKind::R2Cancel, ..app.clone() },
        MoveKind::R2Cancel => MoveApplication { kind: MoveKind::R2Insert, ..app.clone() },
        MoveKind::V2Insert => MoveApplication { kind: MoveKind::V2Cancel, ..app.clone() },
        MoveKind::V2Cancel => MoveApplication { kind: MoveKind::V2Insert, ..app.clone() },
        MoveKind::R3
        | MoveKind::V3
        | MoveKind::FU
        | MoveKind::M1
        | MoveKind::M2
        | MoveKind::M3
        | MoveKind::Far => app.clone(),
        MoveKind::Mixed | MoveKind::FO => {
            let dir = app.params.dir.or_else(|| {
                let window = &pre.letters()[app.pos - 1..app.pos + 2];
                window_rewrite(app.kind, window).and_then(|(_, d)| d)
            });
            let mut inverted = app.clone();
            inverted.params.dir = dir.map(Dir::flip);
            inverted
        }
        MoveKind::Cyclic => {
            let n = post.len();
            let shift = app.params.shift.unwrap_or(0);
            let back = if n == 0 { 0 } else { (n - shift % n) % n };
            MoveApplication::cyclic(back)
        }
        MoveKind::Conj => {
            let c = app.params.conjugator.clone().unwrap_or_else(|| BraidWord::identity(1));
            MoveApplication::conj(c.inverse())
        }
        MoveKind::StabC => MoveApplication { kind: MoveKind::DestabC, ..app.clone() },
        MoveKind::DestabC => MoveApplication { kind: MoveKind::StabC, ..app.clone() },
        MoveKind::StabV => MoveApplication { kind: MoveKind::DestabV, ..app.clone() },
        MoveKind::DestabV => MoveApplication { kind: MoveKind::StabV, ..app.clone() },
    }
}

/// Replays a move list from `start` and returns the inverse list, which runs
/// from the original end back to `start`.
pub(crate) fn invert_segment(
    start: &BraidWord,
    moves: &[MoveApplication],
) -> Result<Vec<MoveApplication>, Error> {
    let mut current = start.clone();
    let mut stages: Vec<(BraidWord, MoveApplication, BraidWord)> = Vec::with_capacity(moves.len());
    for app in moves {
        let next = apply_move(&current, app)?;
        stages.push((current, app.clone(), next.clone()));
        current = next;
    }
    Ok(stages
        .iter()
        .rev()
        .map(|(pre, app, post)| invert_application(app, pre, post))
        .collect())
}

/// All pattern matches of catalog moves on the word: cancellations and
/// in-place rewrites, plus the closure-level moves when asked. Standalone
/// insertions and conjugations are not enumerated; their instances are
/// unbounded. Deterministic order: position ascending, catalog order within
/// a position, closure moves last.
pub fn applicable_moves(word: &BraidWord, level: Level) -> Vec<MoveApplication> {
    let letters = word.letters();
    let n = letters.len();
    let m = word.strands();
    let mut out = Vec::new();
    const WINDOW_KINDS: [MoveKind; 9] = [
        MoveKind::R3,
        MoveKind::Far,
        MoveKind::V3,
        MoveKind::Mixed,
        MoveKind::FO,
        MoveKind::FU,
        MoveKind::M1,
        MoveKind::M2,
        MoveKind::M3,
    ];
    for pos in 1..=n {
        if pos < n {
            let (a, b) = (letters[pos - 1], letters[pos]);
            if matches!(a, Generator::Sigma { .. }) && a.is_inverse_of(b) {
                if let Generator::Sigma { index, sign } = a {
                    out.push(MoveApplication::cancel_sigma(pos, index, sign));
                }
            }
            if matches!(a, Generator::Tau { .. }) && a == b {
                out.push(MoveApplication::cancel_tau(pos, a.index()));
            }
        }
        for kind in WINDOW_KINDS {
            let fits = match kind {
                MoveKind::Far => {
                    pos < n && letters[pos - 1].index().abs_diff(letters[pos].index()) >= 2
                }
                _ => {
                    pos + 2 <= n
                        && window_rewrite(kind, &letters[pos - 1..pos + 2]).is_some()
                }
            };
            if fits {
                let dir = if pos + 2 <= n && !matches!(kind, MoveKind::Far) {
                    window_rewrite(kind, &letters[pos - 1..pos + 2]).and_then(|(_, d)| d)
                } else {
                    None
                };
                out.push(match dir {
                    Some(d) => MoveApplication::directed(kind, pos, d),
                    None => MoveApplication::simple(kind, pos),
                });
            }
        }
    }
    if level == Level::Closure {
        for shift in 1..n {
            out.push(MoveApplication::cyclic(shift));
        }
        out.push(MoveApplication::stab(MoveKind::StabC, n + 1, Some(Sign::Pos)));
        out.push(MoveApplication::stab(MoveKind::StabC, n + 1, Some(Sign::Neg)));
        out.push(MoveApplication::stab(MoveKind::StabV, n + 1, None));
        if n > 0 && m >= 2 && letters[..n - 1].iter().all(|g| g.index() + 1 < m) {
            match letters[n - 1] {
                Generator::Sigma { index, sign } if index == m - 1 => {
                    out.push(MoveApplication::stab(MoveKind::DestabC, n, Some(sign)));
                }
                Generator::Tau { index } if index == m - 1 => {
                    out.push(MoveApplication::stab(MoveKind::DestabV, n, None));
                }
                _ => {}
            }
        }
    }
    out
}

/// Cancels inverse pairs leftmost-first until none remain, recording every
/// cancellation. The result equals `free_reduce`.
pub fn reduce_with_moves(word: &BraidWord) -> (BraidWord, Vec<MoveApplication>) {
    let mut current = word.clone();
    let mut moves = Vec::new();
    loop {
        let letters = current.letters();
        let found = (1..letters.len()).find_map(|pos| {
            let (a, b) = (letters[pos - 1], letters[pos]);
            match a {
                Generator::Sigma { index, sign } if a.is_inverse_of(b) => {
                    Some(MoveApplication::cancel_sigma(pos, index, sign))
                }
                Generator::Tau { index } if a == b => {
                    Some(MoveApplication::cancel_tau(pos, index))
                }
                _ => None,
            }
        });
        match found {
            Some(app) => {
                current = apply_move(&current, &app).expect("matched cancellation applies");
                moves.push(app);
            }
            None => break,
        }
    }
    debug_assert_eq!(current, word.free_reduce());
    (current, moves)
}

/// Search limits for `bfs_equivalent`.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Longest stored word; `None` means `max(|a|, |b|) + 6`.
    pub max_length: Option<usize>,
    /// Total states across both search sides.
    pub max_states: usize,
    /// Move kinds the search must not use.
    pub banned: Vec<MoveKind>,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_length: None, max_states: 2_000_000, banned: Vec::new() }
    }
}

type Parent = Option<(BraidWord, Vec<MoveApplication>)>;

struct SearchSide {
    visited: HashMap<BraidWord, Parent>,
    queue: VecDeque<BraidWord>,
}

impl SearchSide {
    fn new(root: BraidWord) -> SearchSide {
        let mut visited = HashMap::new();
        visited.insert(root.clone(), None);
        let mut queue = VecDeque::new();
        queue.push_back(root);
        SearchSide { visited, queue }
    }

    /// Edges from root to `word`, following parent links.
    fn path_to(&self, word: &BraidWord) -> Vec<(BraidWord, Vec<MoveApplication>, BraidWord)> {
        let mut edges = Vec::new();
        let mut current = word.clone();
        while let Some(Some((parent, moves))) = self.visited.get(&current) {
            edges.push((parent.clone(), moves.clone(), current.clone()));
            current = parent.clone();
        }
        edges.reverse();
        edges
    }
}

/// Composite-edge second stage: the rewrites an insertion can enable.
const ENABLED_KINDS: [MoveKind; 8] = [
    MoveKind::R3,
    MoveKind::V3,
    MoveKind::Mixed,
    MoveKind::FO,
    MoveKind::FU,
    MoveKind::M1,
    MoveKind::M2,
    MoveKind::M3,
];

fn neighbors(
    word: &BraidWord,
    level: Level,
    max_length: usize,
    banned: &[MoveKind],
) -> Vec<(BraidWord, Vec<MoveApplication>)> {
    let mut out = Vec::new();
    let mut push = |state: BraidWord, moves: Vec<MoveApplication>| {
        if state.len() <= max_length {
            out.push((state, moves));
        }
    };
    // plain edges: one catalog match, then reduce
    for app in applicable_moves(word, level) {
        if banned.contains(&app.kind) {
            continue;
        }
        let raw = apply_move(word, &app).expect("enumerated move applies");
        let (reduced, cancels) = reduce_with_moves(&raw);
        let mut moves = vec![app];
        moves.extend(cancels);
        push(reduced, moves);
    }
    // composite edges: an inverse-pair insertion immediately enabling an
    // overlapping rewrite; a bare insertion reduces straight back, so this
    // is the only productive way in
    let n = word.len();
    let m = word.strands();
    let mut inserts: Vec<MoveApplication> = Vec::new();
    for pos in 1..=n + 1 {
        inserts.clear();
        if !banned.contains(&MoveKind::R2Insert) {
            for index in 1..m {
                inserts.push(MoveApplication::insert_sigma(pos, index, Sign::Pos));
                inserts.push(MoveApplication::insert_sigma(pos, index, Sign::Neg));
            }
        }
        if !banned.contains(&MoveKind::V2Insert) {
            for index in 1..m {
                inserts.push(MoveApplication::insert_tau(pos, index));
            }
        }
        for insert in &inserts {
            let inserted = apply_move(word, insert).expect("insertion applies");
            let letters = inserted.letters();
            let lo = pos.saturating_sub(2).max(1);
            let hi = (pos + 1).min(n);
            for q in lo..=hi {
                for kind in ENABLED_KINDS {
                    if banned.contains(&kind) {
                        continue;
                    }
                    if let Some((_, dir)) = window_rewrite(kind, &letters[q - 1..q + 2]) {
                        let app = match dir {
                            Some(d) => MoveApplication::directed(kind, q, d),
                            None => MoveApplication::simple(kind, q),
                        };
                        let rewritten = apply_move(&inserted, &app).expect("matched rewrite");
                        let (reduced, cancels) = reduce_with_moves(&rewritten);
                        if reduced == *word {
                            continue;
                        }
                        let mut moves = vec![insert.clone(), app];
                        moves.extend(cancels);
                        push(reduced, moves);
                    }
                }
            }
        }
    }
    out
}

fn invariants_allow(a: &BraidWord, b: &BraidWord, level: Level) -> bool {
    match level {
        Level::Word => {
            a.strands() == b.strands()
                && Permutation::of_word(a) == Permutation::of_word(b)
                && strand_pair_crossings(a) == strand_pair_crossings(b)
        }
        Level::Closure => {
            let (ca, sums_a) = component_pair_sums(a);
            let (cb, sums_b) = component_pair_sums(b);
            if ca.count() != cb.count() {
                return false;
            }
            let la = LinkingMatrix::from_entries(sums_a).expect("symmetric sums");
            let lb = LinkingMatrix::from_entries(sums_b).expect("symmetric sums");
            relabel_minimal(&la).0 == relabel_minimal(&lb).0
        }
    }
}

/// Bidirectional search for a move sequence taking `a` to `b`.
///
/// `Ok(Some(trace))` holds a replayable run from `a` to `b`. `Ok(None)`
/// means the words are provably inequivalent at this level: an invariant
/// every catalog move preserves separates them. Exhausting the budget
/// without an answer is an error, not a verdict.
///
/// States are freely reduced words; every edge is one catalog move, or an
/// insertion plus the overlapping rewrite it enables, followed by recorded
/// cancellations.
pub fn bfs_equivalent(
    a: &BraidWord,
    b: &BraidWord,
    level: Level,
    budget: &Budget,
) -> Result<Option<RewriteTrace>, Error> {
    if !invariants_allow(a, b, level) {
        return Ok(None);
    }
    let max_length = budget.max_length.unwrap_or(a.len().max(b.len()) + 6);
    let (a0, moves_a) = reduce_with_moves(a);
    let (b0, moves_b) = reduce_with_moves(b);

    let assemble = |forward: Vec<(BraidWord, Vec<MoveApplication>, BraidWord)>,
                    backward: Vec<(BraidWord, Vec<MoveApplication>, BraidWord)>|
     -> Result<RewriteTrace, Error> {
        let mut moves = moves_a.clone();
        for (_, edge_moves, _) in &forward {
            moves.extend(edge_moves.iter().cloned());
        }
        for (parent, edge_moves, _) in backward.iter().rev() {
            moves.extend(invert_segment(parent, edge_moves)?);
        }
        moves.extend(invert_segment(b, &moves_b)?);
        let trace = RewriteTrace { start: a.clone(), moves, end: b.clone() };
        replay(&trace)?;
        Ok(trace)
    };

    if a0 == b0 {
        return Ok(Some(assemble(Vec::new(), Vec::new())?));
    }

    let mut side_a = SearchSide::new(a0);
    let mut side_b = SearchSide::new(b0);
    loop {
        if side_a.queue.is_empty() && side_b.queue.is_empty() {
            return Err(Error::BudgetExhausted(format!(
                "no connection within length {max_length}"
            )));
        }
        let expand_a = !side_a.queue.is_empty()
            && (side_b.queue.is_empty() || side_a.queue.len() <= side_b.queue.len());
        let mut met: Option<BraidWord> = None;
        {
            let (this, other) = if expand_a {
                (&mut side_a, &side_b)
            } else {
                (&mut side_b, &side_a)
            };
            // expand one full layer of the smaller frontier
            let layer: Vec<BraidWord> = this.queue.drain(..).collect();
            'layer: for state in layer {
                for (next, edge_moves) in neighbors(&state, level, max_length, &budget.banned) {
                    if this.visited.contains_key(&next) {
                        continue;
                    }
                    this.visited.insert(next.clone(), Some((state.clone(), edge_moves)));
                    this.queue.push_back(next.clone());
                    if this.visited.len() + other.visited.len() > budget.max_states {
                        return Err(Error::BudgetExhausted(format!(
                            "state limit {} reached",
                            budget.max_states
                        )));
                    }
                    if other.visited.contains_key(&next) {
                        met = Some(next);
                        break 'layer;
                    }
                }
            }
        }
        if let Some(meet) = met {
            let path_a = side_a.path_to(&meet);
            let path_b = side_b.path_to(&meet);
            return Ok(Some(assemble(path_a, path_b)?));
        }
    }
}
