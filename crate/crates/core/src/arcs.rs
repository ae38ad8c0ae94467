//! Combinatorial realization of transition matrices by nested arc systems.
//!
//! Picture the punctured disk `U` as a horizontal strip. Its arcs
//! `ℓ_1..ℓ_r` are vertical segments, and the dual path `e_1..e_r` runs
//! left to right crossing them. Subdividing `e_i` gives one vertical
//! strand per sub-edge; a new arc `ℓ_j` of the larger disk `V` is the union
//! of its strands (passes), caps joining consecutive passes in the annulus
//! `V \ U`, and two tails running out to `∂V`.
//!
//! Cutting the annulus at the left end of the strip turns it into a disk
//! whose boundary reads: top of `∂U` left to right, bottom of `∂U` right to
//! left, then `∂V` in the opposite sense. Caps and tails are chords of that
//! disk, so disjointness is a bracket check.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::chord::{ChordDiagram, ChordError, NonCrossing, PathViolation};
use crate::{Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArcError {
    #[error("entry ({row}, {col}) = {value} is not a positive odd integer")]
    NotPositiveOdd { row: usize, col: usize, value: Rational },
    #[error("entry ({row}, {col}) is too large to subdivide")]
    TooLarge { row: usize, col: usize },
    #[error("stage has {found} arcs but the matrix has {expected} rows")]
    ArcCount { expected: usize, found: usize },
    #[error("dual tree of the stage is not a path: arc {middle} does not separate arcs {low} and {high}", middle = .0.middle + 1, low = .0.low + 1, high = .0.high + 1)]
    NotPath(PathViolation),
    #[error("edge {edge}: labels {from} and {to} are not adjacent")]
    LabelJump { edge: usize, from: usize, to: usize },
    #[error("edge {edge} starts at label {found}, but the previous edge ends at {expected}")]
    Discontinuous { edge: usize, expected: usize, found: usize },
    #[error("edge {edge} has no labels")]
    EmptyEdge { edge: usize },
    #[error("labels start at 1; edge {edge} uses 0")]
    ZeroLabel { edge: usize },
    #[error("traversal word has {found} arcs, expected {expected}")]
    WordArity { expected: usize, found: usize },
    #[error("arc {arc}, pass {pass}: edge {edge} is outside 1..={edges}")]
    EdgeOutOfRange { arc: usize, pass: usize, edge: usize, edges: usize },
    #[error("arc {arc}: pass {pass} does not reverse direction")]
    NotAlternating { arc: usize, pass: usize },
    #[error("region structure is inconsistent: {0}")]
    Regions(String),
    #[error(transparent)]
    Chord(#[from] ChordError),
}

/// One sub-edge of the subdivided dual path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubEdge {
    /// 0-based original edge.
    pub edge: usize,
    /// 0-based index within the edge.
    pub index: usize,
    /// 0-based position along the whole path.
    pub position: usize,
    /// Smaller endpoint label `j`; the sub-edge is labeled `{j, j+1}`.
    pub low: usize,
    /// Labels increase along the path direction.
    pub ascending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPath {
    edges: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityViolation {
    pub label: usize,
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

impl LabeledPath {
    /// Vertex labels per edge; consecutive edges share their common vertex.
    pub fn from_labels(edges: Vec<Vec<usize>>) -> Result<Self, ArcError> {
        let mut previous_end: Option<usize> = None;
        for (i, labels) in edges.iter().enumerate() {
            let edge = i + 1;
            let (&first, &last) = labels.first().zip(labels.last()).ok_or(ArcError::EmptyEdge { edge })?;
            if labels.contains(&0) {
                return Err(ArcError::ZeroLabel { edge });
            }
            if let Some(expected) = previous_end.filter(|&e| e != first) {
                return Err(ArcError::Discontinuous { edge, expected, found: first });
            }
            if let Some(w) = labels.windows(2).find(|w| w[0].abs_diff(w[1]) != 1) {
                return Err(ArcError::LabelJump { edge, from: w[0], to: w[1] });
            }
            previous_end = Some(last);
        }
        Ok(Self { edges })
    }

    /// Alternating labeling for a matrix of positive odd integers: odd edges
    /// run through blocks `1..s`, even edges back through `s..1`, and block
    /// `j` of edge `i` zig-zags between `j` and `j+1` for `a_ij` steps.
    pub fn from_odd_matrix(a: &[Vec<u64>]) -> Self {
        let s = a.first().map_or(0, Vec::len);
        let mut current = 1;
        let edges = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut labels = vec![current];
                let blocks: Vec<usize> = if i % 2 == 0 { (0..s).collect() } else { (0..s).rev().collect() };
                for j in blocks {
                    let (lo, hi) = (j + 1, j + 2);
                    for _ in 0..row[j] {
                        current = if current == lo { hi } else { lo };
                        labels.push(current);
                    }
                }
                labels
            })
            .collect();
        Self { edges }
    }

    /// Edge `e_i` labeled `i, i-1, …, 1, 2, …, i, i+1`.
    pub fn triangular(n: usize) -> Self {
        let edges = (1..=n).map(|i| (1..=i).rev().chain(2..=i + 1).collect()).collect();
        Self { edges }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self, edge: usize) -> &[usize] {
        &self.edges[edge]
    }

    pub fn all_labels(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.len() - 1).collect()
    }

    pub fn sub_edges(&self) -> Vec<SubEdge> {
        let mut position = 0;
        let mut out = Vec::new();
        for (edge, labels) in self.edges.iter().enumerate() {
            for (index, w) in labels.windows(2).enumerate() {
                out.push(SubEdge { edge, index, position, low: w[0].min(w[1]), ascending: w[1] > w[0] });
                position += 1;
            }
        }
        out
    }

    /// `counts[i][j-1]` = number of sub-edges of `e_{i+1}` labeled `{j, j+1}`.
    pub fn pair_counts(&self, s: usize) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0; s]; self.edges.len()];
        for e in self.sub_edges() {
            if e.low <= s {
                counts[e.edge][e.low - 1] += 1;
            }
        }
        counts
    }

    /// Between consecutive `{j, j+1}` sub-edges there must be an even
    /// number of `{j+1, j+2}` sub-edges.
    pub fn parity_violations(&self) -> Vec<ParityViolation> {
        let subs = self.sub_edges();
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in &subs {
            by_label.entry(e.low).or_default().push(e.position);
        }
        let mut out = Vec::new();
        for (&label, positions) in &by_label {
            for w in positions.windows(2) {
                let count = subs[w[0] + 1..w[1]].iter().filter(|e| e.low == label + 1).count();
                if count % 2 == 1 {
                    out.push(ParityViolation { label, from: w[0], to: w[1], count });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pass {
    /// 1-based original arc (path edge) crossed.
    pub edge: usize,
    /// 1-based sub-edge within that edge.
    pub sub_edge: usize,
    /// 0-based position along the subdivided path.
    pub position: usize,
    /// Top of `U` to bottom.
    pub downward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalWord {
    pub arcs: Vec<Vec<Pass>>,
}

impl TraversalWord {
    /// Routes `ℓ_j` through every `{j, j+1}` sub-edge in path order, starting
    /// downward and alternating. Starting at label 1, the first `{j, j+1}`
    /// sub-edge met is ascending, and afterwards ascending and descending
    /// ones alternate, so `downward` coincides with `ascending`.
    pub fn route(path: &LabeledPath, s: usize) -> Self {
        let mut arcs = vec![Vec::new(); s];
        for e in path.sub_edges() {
            if let Some(passes) = arcs.get_mut(e.low - 1) {
                let downward = passes.len() % 2 == 0;
                debug_assert_eq!(downward, e.ascending);
                passes.push(Pass { edge: e.edge + 1, sub_edge: e.index + 1, position: e.position, downward });
            }
        }
        Self { arcs }
    }

    pub fn pass_count(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }
}

/// Entry `(i, j)` counts the passes of `ℓ_j` through sub-edges of `e_i`.
pub fn induced_matrix(word: &TraversalWord, r: usize, s: usize) -> Result<RationalMatrix, ArcError> {
    if word.arcs.len() != s {
        return Err(ArcError::WordArity { expected: s, found: word.arcs.len() });
    }
    let mut counts = vec![vec![0u64; s]; r];
    for (j, passes) in word.arcs.iter().enumerate() {
        for (k, pass) in passes.iter().enumerate() {
            if pass.edge == 0 || pass.edge > r {
                return Err(ArcError::EdgeOutOfRange { arc: j + 1, pass: k + 1, edge: pass.edge, edges: r });
            }
            if k > 0 && passes[k - 1].downward == pass.downward {
                return Err(ArcError::NotAlternating { arc: j + 1, pass: k + 1 });
            }
            counts[pass.edge - 1][j] += 1;
        }
    }
    Ok(RationalMatrix::from_fn(r, s, |i, j| Rational::from_integer(counts[i][j].into())))
}

/// An arc system on a disk whose arcs are chords with a path as dual tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSystemStage {
    pub arc_count: usize,
    /// Arc endpoints on the boundary circle; chord `j` is arc `ℓ_{j+1}`.
    pub boundary: ChordDiagram,
    /// Punctures in each complementary region, in path order (the region
    /// before `ℓ_1`, between `ℓ_1` and `ℓ_2`, …, after `ℓ_r`).
    pub region_punctures: Vec<usize>,
}

impl ArcSystemStage {
    /// `r` parallel arcs with one puncture in each of the `r + 1` regions.
    pub fn initial(r: usize) -> Self {
        let names = (1..=r).map(|j| j.to_string()).collect();
        let word = (0..r).chain((0..r).rev()).collect();
        Self {
            arc_count: r,
            boundary: ChordDiagram::new(names, word).expect("each arc twice"),
            region_punctures: vec![1; r + 1],
        }
    }

    pub fn check_path(&self) -> Result<(), PathViolation> {
        self.boundary.check_path(&(0..self.arc_count).collect::<Vec<_>>())
    }

    pub fn is_path(&self) -> bool {
        self.check_path().is_ok()
    }

    /// Region of each gap of the boundary word, see [`gap_regions`].
    pub fn gap_regions(&self) -> Vec<usize> {
        gap_regions(self.boundary.word(), self.arc_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Top(usize),
    Bottom(usize),
    Outer,
}

/// Everything built for one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcRealization {
    pub path: LabeledPath,
    pub word: TraversalWord,
    /// Caps and tails in the cut-open annulus.
    pub annulus: ChordDiagram,
    /// Punctures added, one per complementary region of the annulus.
    pub annulus_punctures: usize,
    pub next: ArcSystemStage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTripReport {
    pub induced: RationalMatrix,
    pub matches: bool,
    pub label_counts_match: bool,
    pub annulus: NonCrossing,
    pub next_is_path: bool,
    pub parity_violations: usize,
    pub every_region_punctured: bool,
}

impl RoundTripReport {
    pub fn ok(&self) -> bool {
        self.matches
            && self.label_counts_match
            && self.annulus.ok
            && self.next_is_path
            && self.parity_violations == 0
            && self.every_region_punctured
    }
}

impl ArcRealization {
    pub fn verify(&self, expected: &RationalMatrix) -> Result<RoundTripReport, ArcError> {
        let (r, s) = expected.shape();
        let induced = induced_matrix(&self.word, r, s)?;
        let counts = self.path.pair_counts(s);
        let label_counts_match =
            (0..r).all(|i| (0..s).all(|j| Rational::from_integer(counts[i][j].into()) == *expected.get(i, j)));
        Ok(RoundTripReport {
            matches: induced == *expected,
            induced,
            label_counts_match,
            annulus: self.annulus.check_noncrossing(),
            next_is_path: self.next.is_path(),
            parity_violations: self.path.parity_violations().len(),
            every_region_punctured: self.next.region_punctures.len() == s + 1
                && self.next.region_punctures.iter().all(|&p| p > 0),
        })
    }
}

fn odd_entries(pi: &RationalMatrix) -> Result<Vec<Vec<u64>>, ArcError> {
    (0..pi.rows())
        .map(|i| {
            (0..pi.cols())
                .map(|j| {
                    let x = pi.get(i, j);
                    let bad = || ArcError::NotPositiveOdd { row: i + 1, col: j + 1, value: x.clone() };
                    if !x.is_integer() || *x <= Rational::zero() {
                        return Err(bad());
                    }
                    let v = x.to_integer().to_u64().ok_or(ArcError::TooLarge { row: i + 1, col: j + 1 })?;
                    if v % 2 == 0 {
                        return Err(bad());
                    }
                    Ok(v)
                })
                .collect()
        })
        .collect()
}

/// Realizes a matrix of positive odd integers as the transition from the
/// arcs of `stage` to a new arc system on a larger disk.
pub fn realize_arcs_odd(stage: &ArcSystemStage, pi: &RationalMatrix) -> Result<ArcRealization, ArcError> {
    if stage.arc_count != pi.rows() {
        return Err(ArcError::ArcCount { expected: pi.rows(), found: stage.arc_count });
    }
    stage.check_path().map_err(ArcError::NotPath)?;
    let entries = odd_entries(pi)?;
    let path = LabeledPath::from_odd_matrix(&entries);
    build(path, pi.cols())
}

/// Stage `n` of the lower-triangular family: `n` arcs, edge `e_i` cut into
/// `2i - 1` sub-edges, and a new arc `ℓ_{n+1}` that misses `U` entirely.
pub fn realize_arcs_triangular(n: usize) -> Result<ArcRealization, ArcError> {
    build(LabeledPath::triangular(n), n + 1)
}

fn build(path: LabeledPath, s: usize) -> Result<ArcRealization, ArcError> {
    let word = TraversalWord::route(&path, s);
    let strands = path.sub_edges().iter().filter(|e| e.low <= s).count();

    // Chords of the cut annulus: caps, then in/out tails, then arcs with no passes.
    let mut names: Vec<String> = Vec::new();
    let mut top: BTreeMap<usize, usize> = BTreeMap::new();
    let mut bottom: BTreeMap<usize, usize> = BTreeMap::new();
    let mut outer_top: Vec<(usize, usize, usize)> = Vec::new();
    let mut outer_bottom: Vec<(usize, usize, usize)> = Vec::new();
    let mut unused: Vec<(usize, usize)> = Vec::new();
    let mut new_chord = |name: String| {
        names.push(name);
        names.len() - 1
    };
    for (j, passes) in word.arcs.iter().enumerate() {
        let arc = j + 1;
        let m = passes.len();
        if m == 0 {
            unused.push((j, new_chord(format!("l{arc}"))));
            continue;
        }
        let caps: Vec<usize> = (1..m).map(|k| new_chord(format!("l{arc}.cap{k}"))).collect();
        let tail_in = new_chord(format!("l{arc}.in"));
        let tail_out = new_chord(format!("l{arc}.out"));
        for (k, pass) in passes.iter().enumerate() {
            let back = if k == 0 { tail_in } else { caps[k - 1] };
            let forward = if k + 1 == m { tail_out } else { caps[k] };
            let (t, b) = if pass.downward { (back, forward) } else { (forward, back) };
            top.insert(pass.position, t);
            bottom.insert(pass.position, b);
        }
        outer_top.push((passes[0].position, j, tail_in));
        let last = passes[m - 1];
        if last.downward {
            outer_bottom.push((last.position, j, tail_out));
        } else {
            outer_top.push((last.position, j, tail_out));
        }
    }
    outer_top.sort_unstable();
    outer_bottom.sort_unstable_by(|a, b| b.cmp(a));

    // ∂V order: top tails left to right, unused arcs nested at the far
    // right (higher index outermost), bottom tails right to left.
    let mut outer: Vec<(usize, usize)> = outer_top.iter().map(|&(_, j, c)| (j, c)).collect();
    outer.extend(unused.iter().rev().copied());
    outer.extend(unused.iter().copied());
    outer.extend(outer_bottom.iter().map(|&(_, j, c)| (j, c)));

    let mut tokens: Vec<(usize, Place)> = top.iter().map(|(&p, &c)| (c, Place::Top(p))).collect();
    tokens.extend(bottom.iter().rev().map(|(&p, &c)| (c, Place::Bottom(p))));
    tokens.extend(outer.iter().rev().map(|&(_, c)| (c, Place::Outer)));
    let annulus = ChordDiagram::new(names, tokens.iter().map(|&(c, _)| c).collect())?;

    let boundary_names = (1..=s).map(|j| j.to_string()).collect();
    let boundary = ChordDiagram::new(boundary_names, outer.iter().map(|&(j, _)| j).collect())?;

    let (annulus_punctures, region_punctures) = if annulus.check_noncrossing().ok {
        count_regions(&annulus, &tokens, &boundary, strands, s)?
    } else {
        (0, Vec::new())
    };
    Ok(ArcRealization {
        path,
        word,
        annulus,
        annulus_punctures,
        next: ArcSystemStage { arc_count: s, boundary, region_punctures },
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let parent = self.0[x];
        if parent == x {
            return x;
        }
        let root = self.find(parent);
        self.0[x] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Places one puncture in each region of the annulus and counts how many
/// land in each complementary region of the new arcs.
///
/// Regions of `V` minus the new arcs are unions of annulus faces and the
/// slabs of `U` between consecutive strands, glued along `∂U`. Each is
/// identified through the stretch of `∂V` it touches.
fn count_regions(
    annulus: &ChordDiagram,
    tokens: &[(usize, Place)],
    boundary: &ChordDiagram,
    strands: usize,
    s: usize,
) -> Result<(usize, Vec<usize>), ArcError> {
    let seg_face = annulus.segment_faces();
    let face_count = seg_face.iter().copied().max().map_or(1, |m| m + 1);
    let slabs = strands + 1;
    let mut uf = UnionFind((0..face_count + slabs).collect());
    let slab = |k: usize| face_count + k;

    // The stretch before the first token is face 0, next to slab 0 and the cut.
    uf.union(0, slab(0));
    let mut top_seen = 0;
    let mut bottom_seen = 0;
    let mut last_bottom_face = 0;
    for (t, &(_, place)) in tokens.iter().enumerate() {
        match place {
            Place::Top(_) => {
                top_seen += 1;
                uf.union(seg_face[t], slab(top_seen));
            }
            Place::Bottom(_) => {
                bottom_seen += 1;
                uf.union(seg_face[t], slab(strands - bottom_seen));
                last_bottom_face = seg_face[t];
            }
            Place::Outer => {}
        }
    }
    // Both sides of the cut are the same stretch of annulus.
    uf.union(0, last_bottom_face);

    let mut annulus_faces: Vec<usize> = (0..face_count).collect();
    let mut glued = UnionFind((0..face_count).collect());
    glued.union(0, last_bottom_face);
    annulus_faces.retain(|&f| glued.find(f) == f);

    // Region index of each stretch of ∂V, in path order.
    let outer_start = tokens.iter().position(|(_, p)| *p == Place::Outer).unwrap_or(tokens.len());
    let reading: Vec<usize> = boundary.word().iter().rev().copied().collect();
    let gaps = gap_regions(&reading, s);
    let mut root_region: BTreeMap<usize, usize> = BTreeMap::new();
    for t in -1..reading.len() as isize {
        let segment = if t < 0 { outer_start as isize - 1 } else { outer_start as isize + t };
        let face = if segment < 0 { 0 } else { seg_face[segment as usize] };
        let root = uf.find(face);
        let region = if t < 0 { gaps.last().copied().unwrap_or(0) } else { gaps[t as usize] };
        if let Some(&seen) = root_region.get(&root) {
            if seen != region {
                return Err(ArcError::Regions(format!("one region meets ∂V in regions {seen} and {region}")));
            }
        }
        root_region.insert(root, region);
    }
    let mut counts = vec![0; s + 1];
    for &f in &annulus_faces {
        let root = uf.find(f);
        let region = *root_region
            .get(&root)
            .ok_or_else(|| ArcError::Regions("an annulus face lies in a region away from ∂V".into()))?;
        counts[region] += 1;
    }
    if root_region.len() != s + 1 {
        return Err(ArcError::Regions(format!("{} regions for {s} arcs", root_region.len())));
    }
    Ok((annulus_faces.len(), counts))
}

/// Path-order region of each boundary gap of a word whose chords `0..s`
/// form a path. Entry `t` is the gap after token `t`; the last entry also
/// covers the gap before the first token.
///
/// The gap lies in region `k` when it is on the far side (away from
/// `ℓ_{j-1}`, or towards `ℓ_2` for `j = 1`) of exactly `k` chords.
pub fn gap_regions(word: &[usize], s: usize) -> Vec<usize> {
    let mut ends = vec![Vec::with_capacity(2); s];
    for (i, &c) in word.iter().enumerate() {
        if c < s {
            ends[c].push(i);
        }
    }
    let span = |c: usize| (ends[c][0], ends[c][1]);
    let encloses = |c: usize, p: usize| {
        let (a, b) = span(c);
        a < p && p < b
    };
    let far_inside: Vec<bool> = (0..s)
        .map(|j| match j {
            0 if s > 1 => encloses(0, span(1).0),
            0 => true,
            _ => !encloses(j, span(j - 1).0),
        })
        .collect();
    (0..word.len())
        .map(|t| {
            (0..s)
                .filter(|&j| {
                    let (a, b) = span(j);
                    (a <= t && t < b) == far_inside[j]
                })
                .count()
        })
        .collect()
}
