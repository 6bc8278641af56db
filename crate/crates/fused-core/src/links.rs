use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::perm::Permutation;
use crate::word::{BraidWord, Generator};

/// Which closure component each strand belongs to. Components are numbered
/// 1.. in order of their smallest strand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentAssignment {
    of_strand: Vec<u32>,
    count: usize,
}

impl ComponentAssignment {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn strands(&self) -> u32 {
        self.of_strand.len() as u32
    }

    /// 1-based component id of a 1-based strand.
    pub fn component_of(&self, strand: u32) -> u32 {
        self.of_strand[strand as usize - 1]
    }

    /// Strands of component `c`, ascending.
    pub fn members(&self, c: u32) -> Vec<u32> {
        (1..=self.strands()).filter(|&s| self.component_of(s) == c).collect()
    }
}

/// Components of the braid closure: cycles of the word's permutation.
pub fn closure_components(word: &BraidWord) -> ComponentAssignment {
    let perm = Permutation::of_word(word);
    let m = word.strands();
    let mut of_strand = vec![0u32; m as usize];
    let mut count = 0usize;
    for start in 1..=m {
        if of_strand[start as usize - 1] != 0 {
            continue;
        }
        count += 1;
        let mut s = start;
        loop {
            of_strand[s as usize - 1] = count as u32;
            s = perm.apply(s);
            if s == start {
                break;
            }
        }
    }
    ComponentAssignment { of_strand, count }
}

/// Signed classical crossing counts per unordered strand pair. Entry `[a][b]`
/// (0-based) is the signed number of classical letters whose two positions
/// are occupied by strands `a + 1` and `b + 1`. Symmetric, zero diagonal.
/// Virtual letters contribute nothing but still swap occupants.
pub fn strand_pair_crossings(word: &BraidWord) -> Vec<Vec<i64>> {
    let m = word.strands() as usize;
    let mut matrix = vec![vec![0i64; m]; m];
    let mut occupant: Vec<usize> = (0..m).collect();
    for letter in word.letters() {
        let i = letter.index() as usize - 1;
        if let Generator::Sigma { sign, .. } = letter {
            let (a, b) = (occupant[i], occupant[i + 1]);
            matrix[a][b] += sign.value();
            matrix[b][a] += sign.value();
        }
        occupant.swap(i, i + 1);
    }
    matrix
}

/// Signed classical crossing sums aggregated per component pair of the
/// closure. Full sums, not halved; always integral. Symmetric, zero diagonal.
pub(crate) fn component_pair_sums(word: &BraidWord) -> (ComponentAssignment, Vec<Vec<i64>>) {
    let components = closure_components(word);
    let n = components.count();
    let per_strand = strand_pair_crossings(word);
    let mut sums = vec![vec![0i64; n]; n];
    for (a, row) in per_strand.iter().enumerate() {
        for (b, &count) in row.iter().enumerate().skip(a + 1) {
            let ca = components.of_strand[a] as usize - 1;
            let cb = components.of_strand[b] as usize - 1;
            if ca != cb {
                sums[ca][cb] += count;
                sums[cb][ca] += count;
            }
        }
    }
    (components, sums)
}

/// Pairwise linking numbers of the closure components. Symmetric with zero
/// diagonal; entry `(a, b)` is half the signed sum of classical crossings
/// between the strands of components `a` and `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkingMatrix {
    entries: Vec<Vec<i64>>,
}

impl LinkingMatrix {
    pub fn from_entries(entries: Vec<Vec<i64>>) -> Result<LinkingMatrix, Error> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::SizeMismatch { left: row.len(), right: n });
            }
        }
        for (a, row) in entries.iter().enumerate() {
            if row[a] != 0 {
                return Err(Error::InvalidArgument("diagonal must be zero".into()));
            }
            for (b, &value) in row.iter().enumerate().take(a) {
                if value != entries[b][a] {
                    return Err(Error::InvalidArgument("matrix must be symmetric".into()));
                }
            }
        }
        Ok(LinkingMatrix { entries })
    }

    /// Number of components.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Entry for 1-based component ids.
    pub fn entry(&self, a: u32, b: u32) -> i64 {
        self.entries[a as usize - 1][b as usize - 1]
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }
}

/// Linking matrix of the closure of `word`, together with the component
/// assignment that numbers its rows.
///
/// For a classical word every component pair bounds an even crossing sum, so
/// the halved entries are exact. A virtual word whose closure violates that
/// is rejected rather than rounded.
pub fn linking_matrix(word: &BraidWord) -> Result<(ComponentAssignment, LinkingMatrix), Error> {
    let (components, sums) = component_pair_sums(word);
    let n = components.count();
    let mut entries = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in 0..n {
            if sums[a][b] % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "components {} and {} cross an odd number of times",
                    a + 1,
                    b + 1
                )));
            }
            entries[a][b] = sums[a][b] / 2;
        }
    }
    Ok((components, LinkingMatrix { entries }))
}

/// Linking number of the closure strands `i` and `j` of a pure classical
/// word: half their signed crossing sum.
pub fn pair_linking(word: &BraidWord, i: u32, j: u32) -> Result<i64, Error> {
    if let Some(position) = word.first_virtual_position() {
        return Err(Error::NonClassicalInput { position });
    }
    let perm = Permutation::of_word(word);
    if let Some(strand) = perm.first_moved() {
        return Err(Error::NotPure { strand });
    }
    let m = word.strands();
    if i == 0 || j == 0 || i > m || j > m || i == j {
        return Err(Error::InvalidArgument(format!(
            "strand pair ({i}, {j}) is not a pair of distinct strands of a {m}-strand word"
        )));
    }
    let sums = strand_pair_crossings(word);
    let sum = sums[i as usize - 1][j as usize - 1];
    // a pure classical pair restores its order, so the sum is even
    assert!(sum % 2 == 0, "pure classical pair with odd crossing sum");
    Ok(sum / 2)
}

/// Relabels components to minimize the row-major reading of the matrix.
/// Returns the minimal matrix and the labeling: `labeling[a - 1]` is the old
/// 1-based id carrying new label `a`. Ties pick the lexicographically
/// smallest labeling. Exhaustive over labelings; component counts are small.
pub fn relabel_minimal(matrix: &LinkingMatrix) -> (LinkingMatrix, Vec<u32>) {
    let n = matrix.n();
    if n <= 1 {
        return (matrix.clone(), (1..=n as u32).collect());
    }
    let apply = |labeling: &[usize]| -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; n]; n];
        for a in 0..n {
            for b in 0..n {
                out[a][b] = matrix.entries[labeling[a]][labeling[b]];
            }
        }
        out
    };
    let mut best: Option<(Vec<Vec<i64>>, Vec<usize>)> = None;
    let mut labeling: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    // ascending choice enumerates labelings in lex order; replacing only on
    // strict improvement keeps the lex-smallest among ties
    fn descend(
        n: usize,
        labeling: &mut Vec<usize>,
        used: &mut Vec<bool>,
        apply: &dyn Fn(&[usize]) -> Vec<Vec<i64>>,
        best: &mut Option<(Vec<Vec<i64>>, Vec<usize>)>,
    ) {
        if labeling.len() == n {
            let candidate = apply(labeling);
            let better = match best {
                None => true,
                Some((b, _)) => candidate < *b,
            };
            if better {
                *best = Some((candidate, labeling.clone()));
            }
            return;
        }
        for old in 0..n {
            if !used[old] {
                used[old] = true;
                labeling.push(old);
                descend(n, labeling, used, apply, best);
                labeling.pop();
                used[old] = false;
            }
        }
    }
    descend(n, &mut labeling, &mut used, &apply, &mut best);
    let (entries, labeling) = best.expect("at least one labeling");
    (
        LinkingMatrix { entries },
        labeling.into_iter().map(|old| old as u32 + 1).collect(),
    )
}

/// Removes the strand starting at `start_position` from the word. Letters
/// crossing that strand are dropped; letters wholly above its current
/// position shift down one index. The result has one strand fewer.
pub fn strand_deleted(word: &BraidWord, start_position: u32) -> Result<BraidWord, Error> {
    let m = word.strands();
    if m < 2 || start_position == 0 || start_position > m {
        return Err(Error::InvalidArgument(format!(
            "cannot delete strand {start_position} from a {m}-strand word"
        )));
    }
    let mut p = start_position;
    let mut letters: Vec<Generator> = Vec::with_capacity(word.len());
    for &g in word.letters() {
        let i = g.index();
        if p == i {
            p = i + 1;
        } else if p == i + 1 {
            p = i;
        } else if p < i {
            letters.push(match g {
                Generator::Sigma { sign, .. } => Generator::Sigma { index: i - 1, sign },
                Generator::Tau { .. } => Generator::Tau { index: i - 1 },
            });
        } else {
            letters.push(g);
        }
    }
    BraidWord::new(m - 1, letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;

    fn w(text: &str) -> BraidWord {
        parse_word(text).unwrap()
    }

    #[test]
    fn components_follow_permutation_cycles() {
        let trefoil = w("s1 s1 s1");
        let c = closure_components(&trefoil);
        assert_eq!(c.count(), 1);

        let hopf = w("s1 s1");
        let c = closure_components(&hopf);
        assert_eq!(c.count(), 2);
        assert_eq!(c.component_of(1), 1);
        assert_eq!(c.component_of(2), 2);

        let unlink = w("n=3");
        assert_eq!(closure_components(&unlink).count(), 3);

        let c = closure_components(&w("n=4 s1 s3"));
        assert_eq!(c.members(1), vec![1, 2]);
        assert_eq!(c.members(2), vec![3, 4]);
    }

    #[test]
    fn crossings_track_occupants_not_positions() {
        // s1 crosses strands 1,2; afterwards s1 crosses them again swapped
        let m = strand_pair_crossings(&w("s1 s1"));
        assert_eq!(m[0][1], 2);
        // the virtual letter moves strand 3 into position 2 first
        let m = strand_pair_crossings(&w("t2 s2"));
        assert_eq!(m[1][2], 1);
        assert_eq!(m[0][1], 0);
        let m = strand_pair_crossings(&w("s1 S1"));
        assert_eq!(m[0][1], 0);
    }

    #[test]
    fn hopf_and_torus_linking() {
        let (c, lk) = linking_matrix(&w("s1 s1")).unwrap();
        assert_eq!(c.count(), 2);
        assert_eq!(lk.entry(1, 2), 1);
        let (_, lk) = linking_matrix(&w("s1 s1 s1 s1")).unwrap();
        assert_eq!(lk.entry(1, 2), 2);
        let (_, lk) = linking_matrix(&w("S1 S1")).unwrap();
        assert_eq!(lk.entry(1, 2), -1);
    }

    #[test]
    fn borromean_rings_have_zero_linking() {
        let (c, lk) = linking_matrix(&w("s1 S2 s1 S2 s1 S2")).unwrap();
        assert_eq!(c.count(), 3);
        for a in 1..=3u32 {
            for b in 1..=3u32 {
                assert_eq!(lk.entry(a, b), 0);
            }
        }
    }

    #[test]
    fn knot_closure_has_trivial_matrix() {
        let (c, lk) = linking_matrix(&w("s1")).unwrap();
        assert_eq!(c.count(), 1);
        assert_eq!(lk.n(), 1);
        assert_eq!(lk.entry(1, 1), 0);
    }

    #[test]
    fn odd_virtual_crossing_sum_is_rejected() {
        // one classical crossing between two closure components
        assert!(linking_matrix(&w("s1 t1")).is_err());
    }

    #[test]
    fn pair_linking_guards_its_domain() {
        assert_eq!(pair_linking(&w("s1 s1 s1 s1"), 1, 2), Ok(2));
        assert_eq!(pair_linking(&w("s1 s1 s1 s1"), 2, 1), Ok(2));
        assert!(matches!(
            pair_linking(&w("t1 t1"), 1, 2),
            Err(Error::NonClassicalInput { position: 1 })
        ));
        assert!(matches!(pair_linking(&w("s1"), 1, 2), Err(Error::NotPure { strand: 1 })));
        assert!(pair_linking(&w("s1 s1"), 1, 1).is_err());
        assert!(pair_linking(&w("s1 s1"), 1, 3).is_err());
    }

    #[test]
    fn relabeling_minimizes_row_major_order() {
        let matrix =
            LinkingMatrix::from_entries(vec![vec![0, 5, 1], vec![5, 0, 2], vec![1, 2, 0]])
                .unwrap();
        let (minimal, labeling) = relabel_minimal(&matrix);
        assert_eq!(labeling, vec![3, 1, 2]);
        assert_eq!(
            minimal.entries(),
            &[vec![0, 1, 2], vec![1, 0, 5], vec![2, 5, 0]]
        );
    }

    #[test]
    fn relabeling_ties_pick_lex_smallest_labeling() {
        let matrix =
            LinkingMatrix::from_entries(vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0]])
                .unwrap();
        let (minimal, labeling) = relabel_minimal(&matrix);
        assert_eq!(labeling, vec![1, 2, 3]);
        assert_eq!(minimal, matrix);
    }

    #[test]
    fn relabeling_is_invariant_under_input_relabeling() {
        let a = LinkingMatrix::from_entries(vec![
            vec![0, 3, 0, 1],
            vec![3, 0, 2, 0],
            vec![0, 2, 0, 0],
            vec![1, 0, 0, 0],
        ])
        .unwrap();
        // swap components 1 and 4 of `a`
        let b = LinkingMatrix::from_entries(vec![
            vec![0, 0, 0, 1],
            vec![0, 0, 2, 3],
            vec![0, 2, 0, 0],
            vec![1, 3, 0, 0],
        ])
        .unwrap();
        assert_eq!(relabel_minimal(&a).0, relabel_minimal(&b).0);
    }

    #[test]
    fn strand_deletion_drops_its_crossings() {
        // strand 3 starts and ends at position 3
        let word = w("s1 s2 s2");
        let deleted = strand_deleted(&word, 3).unwrap();
        assert_eq!(deleted, w("s1"));

        // deleting the moving strand of s1 leaves the identity
        assert_eq!(strand_deleted(&w("s1"), 1).unwrap(), BraidWord::identity(1));
        assert!(strand_deleted(&w("s1"), 3).is_err());
    }

    #[test]
    fn strand_deletion_reindexes_letters_below_the_gap() {
        // strand 1 never crosses anything after its first two letters cancel out
        let word = w("s1 S1 s2 t2");
        let deleted = strand_deleted(&word, 1).unwrap();
        assert_eq!(deleted, w("s1 t1"));
    }

    #[test]
    fn component_sums_are_doubled_linking_numbers() {
        let (c, sums) = component_pair_sums(&w("s1 s1 s1 s1"));
        assert_eq!(c.count(), 2);
        assert_eq!(sums[0][1], 4);
    }
}
