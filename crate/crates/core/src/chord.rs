//! Chord diagrams on a circle: a cyclic word in which every chord name
//! occurs exactly twice.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChordError {
    #[error("token {position} refers to chord {chord}, but only {count} chords are named")]
    UnknownChord { position: usize, chord: usize, count: usize },
    #[error("chord {name:?} has {found} endpoints, expected 2")]
    EndpointCount { name: String, found: usize },
}

/// Result of the interleaving check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonCrossing {
    pub ok: bool,
    /// Names of the first two chords found to interleave.
    pub first_interleaving: Option<(String, String)>,
}

/// Path condition failure: `middle` does not separate `low` from `high`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathViolation {
    pub low: usize,
    pub middle: usize,
    pub high: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordDiagram {
    names: Vec<String>,
    word: Vec<usize>,
    ends: Vec<(usize, usize)>,
}

impl ChordDiagram {
    pub fn new(names: Vec<String>, word: Vec<usize>) -> Result<Self, ChordError> {
        let mut seen: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
        for (position, &chord) in word.iter().enumerate() {
            seen.get_mut(chord).ok_or(ChordError::UnknownChord { position, chord, count: names.len() })?.push(position);
        }
        let ends = seen
            .iter()
            .zip(&names)
            .map(|(s, name)| match s.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(ChordError::EndpointCount { name: name.clone(), found: s.len() }),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { names, word, ends })
    }

    /// Builds a diagram from chord labels, e.g. `["a", "b", "b", "a"]`.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self, ChordError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::new();
        let word = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                *index.entry(l).or_insert_with(|| {
                    names.push(l.to_string());
                    names.len() - 1
                })
            })
            .collect();
        Self::new(names, word)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, chord: usize) -> &str {
        &self.names[chord]
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn labels(&self) -> Vec<&str> {
        self.word.iter().map(|&c| self.name(c)).collect()
    }

    pub fn chord_count(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Word positions of the two endpoints, in increasing order.
    pub fn endpoints(&self, chord: usize) -> (usize, usize) {
        self.ends[chord]
    }

    /// Two chords cross iff their endpoints interleave; on a linear reading
    /// of the cyclic word that is a failed bracket match.
    pub fn check_noncrossing(&self) -> NonCrossing {
        let mut open: Vec<usize> = Vec::new();
        for (position, &chord) in self.word.iter().enumerate() {
            if self.ends[chord].0 == position {
                open.push(chord);
                continue;
            }
            let top = open.pop().expect("closing endpoint has a matching opening");
            if top != chord {
                return NonCrossing {
                    ok: false,
                    first_interleaving: Some((self.names[chord].clone(), self.names[top].clone())),
                };
            }
        }
        NonCrossing { ok: true, first_interleaving: None }
    }

    /// Whether word position `p` lies strictly between the endpoints of `chord`.
    pub fn encloses(&self, chord: usize, p: usize) -> bool {
        let (a, b) = self.ends[chord];
        a < p && p < b
    }

    /// `middle` separates `a` from `b` when each of them lies entirely on
    /// its own side of `middle`.
    pub fn separates(&self, middle: usize, a: usize, b: usize) -> bool {
        let side = |c: usize| {
            let (x, y) = self.ends[c];
            let (ix, iy) = (self.encloses(middle, x), self.encloses(middle, y));
            (ix == iy).then_some(ix)
        };
        matches!((side(a), side(b)), (Some(sa), Some(sb)) if sa != sb)
    }

    /// Checks that chord `order[k]` separates `order[i]` from `order[l]`
    /// whenever `i < k < l`, i.e. the dual tree is a path in that order.
    pub fn check_path(&self, order: &[usize]) -> Result<(), PathViolation> {
        for (k, &middle) in order.iter().enumerate() {
            for &low in &order[..k] {
                for &high in &order[k + 1..] {
                    if !self.separates(middle, low, high) {
                        return Err(PathViolation { low, middle, high });
                    }
                }
            }
        }
        Ok(())
    }

    /// Face id of each boundary segment for a non-crossing diagram.
    /// Segment `t` follows token `t`; the last one wraps round to the first
    /// token and shares face 0 with the stretch before it.
    pub fn segment_faces(&self) -> Vec<usize> {
        let mut stack = Vec::new();
        let mut current = 0;
        let mut next_face = 1;
        self.word
            .iter()
            .enumerate()
            .map(|(position, &chord)| {
                if self.ends[chord].0 == position {
                    stack.push(current);
                    current = next_face;
                    next_face += 1;
                } else {
                    current = stack.pop().unwrap_or(0);
                }
                current
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nested_and_interleaved() {
        let nested = ChordDiagram::from_labels(&["a", "b", "b", "a"]).unwrap();
        assert!(nested.check_noncrossing().ok);
        let crossed = ChordDiagram::from_labels(&["a", "b", "a", "b"]).unwrap();
        let result = crossed.check_noncrossing();
        assert!(!result.ok);
        assert_eq!(result.first_interleaving, Some(("a".into(), "b".into())));
    }

    #[test]
    fn cyclic_rotation_does_not_matter() {
        let d = ChordDiagram::from_labels(&["b", "a", "a", "c", "c", "b"]).unwrap();
        assert!(d.check_noncrossing().ok);
        let rotated = ChordDiagram::from_labels(&["a", "a", "c", "c", "b", "b"]).unwrap();
        assert!(rotated.check_noncrossing().ok);
    }

    #[test]
    fn malformed_matchings() {
        assert!(matches!(ChordDiagram::from_labels(&["a", "b", "a"]), Err(ChordError::EndpointCount { found: 1, .. })));
        assert!(matches!(
            ChordDiagram::new(vec!["a".into()], vec![0, 1]),
            Err(ChordError::UnknownChord { position: 1, .. })
        ));
        assert!(matches!(ChordDiagram::from_labels(&["a", "a", "a"]), Err(ChordError::EndpointCount { found: 3, .. })));
    }

    #[test]
    fn path_detection() {
        let parallel = ChordDiagram::from_labels(&["1", "2", "3", "3", "2", "1"]).unwrap();
        assert_eq!(parallel.check_path(&[0, 1, 2]), Ok(()));
        let star = ChordDiagram::from_labels(&["1", "1", "2", "2", "3", "3"]).unwrap();
        assert!(star.check_path(&[0, 1, 2]).is_err());
        assert_eq!(star.check_path(&[0]), Ok(()));
    }

    #[test]
    fn faces_of_parallel_chords() {
        let d = ChordDiagram::from_labels(&["1", "2", "2", "1"]).unwrap();
        assert_eq!(d.segment_faces(), vec![1, 2, 1, 0]);
    }

    fn brute_crossing(word: &[usize], chords: usize) -> bool {
        let pos: Vec<Vec<usize>> =
            (0..chords).map(|c| word.iter().enumerate().filter(|(_, &x)| x == c).map(|(i, _)| i).collect()).collect();
        (0..chords).any(|a| {
            (0..chords).any(|b| a != b && pos[a][0] < pos[b][0] && pos[b][0] < pos[a][1] && pos[a][1] < pos[b][1])
        })
    }

    proptest! {
        #[test]
        fn stack_check_matches_pairwise(perm in Just((0..6).flat_map(|c| [c, c]).collect::<Vec<usize>>()).prop_shuffle()) {
            let names = (0..6).map(|c| c.to_string()).collect();
            let d = ChordDiagram::new(names, perm.clone()).unwrap();
            prop_assert_eq!(d.check_noncrossing().ok, !brute_crossing(&perm, 6));
        }

        #[test]
        fn noncrossing_diagrams_have_one_more_face_than_chords(perm in Just((0..5).flat_map(|c| [c, c]).collect::<Vec<usize>>()).prop_shuffle()) {
            let names = (0..5).map(|c| c.to_string()).collect();
            let d = ChordDiagram::new(names, perm).unwrap();
            if d.check_noncrossing().ok {
                let mut faces = d.segment_faces();
                faces.sort_unstable();
                faces.dedup();
                prop_assert_eq!(faces.len(), 6);
            }
        }
    }
}
