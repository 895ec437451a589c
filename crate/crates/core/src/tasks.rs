//! The cyclic task list used by the faithful schedule.
//!
//! Slots are kept lazily: a segment remembers the stage it was created at and
//! its members are forwarded to the current stage only when popped. The
//! segment of sets that are new at some stage is an enumerator, since a stage
//! with N worlds has 2^N sets.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::algebra::StageSet;

#[derive(Debug, Clone)]
pub(crate) enum Segment {
    /// Complement pairs laid out as consecutive slots.
    Explicit(VecDeque<StageSet>),
    Fresh(FreshPairs),
}

impl Segment {
    fn slot_count(&self) -> BigUint {
        match self {
            Segment::Explicit(v) => BigUint::from(v.len()),
            Segment::Fresh(f) => f.remaining_slots(),
        }
    }

    fn is_exhausted(&mut self) -> bool {
        match self {
            Segment::Explicit(v) => v.is_empty(),
            Segment::Fresh(f) => f.peek().is_none(),
        }
    }
}

/// Enumerates the complement pairs of a stage that are not images of the
/// previous stage, in canonical order: smaller member cardinality first, then
/// lexicographic on sorted world indices; within a pair the smaller member
/// (or, on a cardinality tie, the lexicographically smaller one) comes first.
#[derive(Debug, Clone)]
pub(crate) struct FreshPairs {
    stage: usize,
    len: usize,
    /// Left component of each world, when the stage is a pair stage.
    group: Option<Vec<u32>>,
    group_size: Vec<u32>,
    combo: Vec<usize>,
    started: bool,
    done: bool,
    lookahead: Option<Vec<usize>>,
    emitted_pairs: BigUint,
    total_pairs: BigUint,
}

impl FreshPairs {
    pub(crate) fn new(stage: usize, len: usize, left: Option<Vec<u32>>, previous_len: usize) -> Self {
        let mut group_size = Vec::new();
        if let Some(g) = &left {
            group_size = vec![0; previous_len];
            for &l in g {
                group_size[l as usize] += 1;
            }
        }
        let all = BigUint::one() << len;
        let total_slots = if left.is_some() {
            all - (BigUint::one() << previous_len)
        } else {
            all - BigUint::from(2u32)
        };
        FreshPairs {
            stage,
            len,
            group: left,
            group_size,
            combo: Vec::new(),
            started: false,
            done: len < 2,
            lookahead: None,
            emitted_pairs: BigUint::zero(),
            total_pairs: total_slots / BigUint::from(2u32),
        }
    }

    fn remaining_slots(&self) -> BigUint {
        (&self.total_pairs - &self.emitted_pairs) * BigUint::from(2u32)
    }

    fn advance_combo(&mut self) -> bool {
        let n = self.len;
        if !self.started {
            self.started = true;
            self.combo = vec![0];
            return true;
        }
        let k = self.combo.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.combo[i] < n - k + i {
                self.combo[i] += 1;
                for j in i + 1..k {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return true;
            }
        }
        if 2 * (k + 1) > n {
            return false;
        }
        self.combo = (0..k + 1).collect();
        true
    }

    fn representable(&self, combo: &[usize]) -> bool {
        let Some(group) = &self.group else { return false };
        let mut hits: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        for &w in combo {
            *hits.entry(group[w]).or_insert(0) += 1;
        }
        hits.iter().all(|(g, c)| self.group_size[*g as usize] == *c)
    }

    fn peek(&mut self) -> Option<&Vec<usize>> {
        if self.lookahead.is_none() && !self.done {
            loop {
                if !self.advance_combo() {
                    self.done = true;
                    break;
                }
                let k = self.combo.len();
                if 2 * k == self.len && self.combo[0] != 0 {
                    continue;
                }
                if self.representable(&self.combo) {
                    continue;
                }
                self.lookahead = Some(self.combo.clone());
                break;
            }
        }
        self.lookahead.as_ref()
    }

    fn next_pair(&mut self) -> Option<(StageSet, StageSet)> {
        self.peek()?;
        let combo = self.lookahead.take()?;
        self.emitted_pairs += 1u32;
        let first = StageSet::from_indices(self.stage, self.len, combo);
        let second = first.complement();
        Some((first, second))
    }
}

/// `Λ`: a start cursor and the ordered slots from the cursor on.
#[derive(Debug, Clone)]
pub struct TaskList {
    start: usize,
    segments: VecDeque<Segment>,
}

impl TaskList {
    pub(crate) fn new(first: Segment) -> Self {
        let mut segments = VecDeque::new();
        segments.push_back(first);
        TaskList { start: 0, segments }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Index one past the last slot.
    pub fn end(&self) -> BigUint {
        let mut total = BigUint::from(self.start);
        for s in &self.segments {
            total += s.slot_count();
        }
        total
    }

    /// Removes the front complement pair, as sets of their native stage.
    pub(crate) fn pop_pair(&mut self) -> Option<(StageSet, StageSet)> {
        loop {
            let front = self.segments.front_mut()?;
            if front.is_exhausted() {
                self.segments.pop_front();
                continue;
            }
            let pair = match front {
                Segment::Explicit(v) => {
                    let a = v.pop_front()?;
                    let b = v.pop_front()?;
                    (a, b)
                }
                Segment::Fresh(f) => f.next_pair()?,
            };
            self.start += 2;
            return Some(pair);
        }
    }

    pub(crate) fn push(&mut self, seg: Segment) {
        self.segments.push_back(seg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drain(f: &mut FreshPairs) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        while let Some((a, b)) = f.next_pair() {
            out.push(a.indices());
            out.push(b.indices());
        }
        out
    }

    #[test]
    fn one_atom_cube() {
        let mut f = FreshPairs::new(0, 2, None, 0);
        assert_eq!(drain(&mut f), vec![vec![0], vec![1]]);
    }

    #[test]
    fn two_atom_cube_has_fourteen_slots() {
        let mut f = FreshPairs::new(0, 4, None, 0);
        assert_eq!(f.remaining_slots(), BigUint::from(14u32));
        let slots = drain(&mut f);
        assert_eq!(slots.len(), 14);
        assert_eq!(slots[0], vec![0]);
        assert_eq!(slots[1], vec![1, 2, 3]);
        // size-two pairs only with world 0 leading
        assert_eq!(slots[8], vec![0, 1]);
        assert_eq!(slots[9], vec![2, 3]);
        for pair in slots.chunks(2) {
            let mut all: Vec<usize> = pair[0].iter().chain(pair[1].iter()).copied().collect();
            all.sort();
            assert_eq!(all, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn images_are_skipped() {
        // four worlds, left components 0,1,2,2 over a three-world stage
        let mut f = FreshPairs::new(1, 4, Some(vec![0, 1, 2, 2]), 3);
        let slots = drain(&mut f);
        assert_eq!(slots.len(), 8);
        assert_eq!(BigUint::from(slots.len()), BigUint::from(16u32 - 8));
        assert!(!slots.contains(&vec![0]));
        assert!(!slots.contains(&vec![2, 3]));
        assert!(slots.contains(&vec![2]));
    }

    #[test]
    fn pop_walks_segments() {
        let mut t = TaskList::new(Segment::Fresh(FreshPairs::new(0, 2, None, 0)));
        t.push(Segment::Explicit(VecDeque::from(vec![
            StageSet::singleton(0, 2, 1),
            StageSet::singleton(0, 2, 0),
        ])));
        assert_eq!(t.end(), BigUint::from(4u32));
        assert_eq!(t.pop_pair().unwrap().0.indices(), vec![0]);
        assert_eq!(t.pop_pair().unwrap().0.indices(), vec![1]);
        assert_eq!(t.start(), 4);
        assert!(t.pop_pair().is_none());
    }
}
