//! Per-stage world tables and the finite Boolean algebra of world sets.

use fixedbitset::FixedBitSet;

use crate::error::ModelError;
use crate::formula::AtomContext;

/// A set of worlds of one construction stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StageSet {
    stage: usize,
    bits: FixedBitSet,
}

impl StageSet {
    pub fn empty(stage: usize, len: usize) -> Self {
        StageSet { stage, bits: FixedBitSet::with_capacity(len) }
    }

    pub fn full(stage: usize, len: usize) -> Self {
        let mut s = StageSet::empty(stage, len);
        s.bits.insert_range(..);
        s
    }

    pub fn singleton(stage: usize, len: usize, world: usize) -> Self {
        let mut s = StageSet::empty(stage, len);
        s.bits.insert(world);
        s
    }

    pub fn from_indices(stage: usize, len: usize, worlds: impl IntoIterator<Item = usize>) -> Self {
        let mut s = StageSet::empty(stage, len);
        for w in worlds {
            assert!(w < len, "world {w} out of range for a stage of {len} worlds");
            s.bits.insert(w);
        }
        s
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Number of worlds in the stage, not in the set.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn contains(&self, world: usize) -> bool {
        self.bits.contains(world)
    }

    pub fn insert(&mut self, world: usize) {
        self.bits.insert(world);
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn is_trivial(&self) -> bool {
        self.is_empty() || self.is_full()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn complement(&self) -> StageSet {
        let mut s = self.clone();
        s.bits.toggle_range(..);
        s
    }

    fn same_stage(&self, other: &StageSet) {
        assert!(
            self.stage == other.stage && self.bits.len() == other.bits.len(),
            "set operation across stages {} and {}",
            self.stage,
            other.stage
        );
    }

    pub fn union(&self, other: &StageSet) -> StageSet {
        self.same_stage(other);
        let mut s = self.clone();
        s.bits.union_with(&other.bits);
        s
    }

    pub fn intersection(&self, other: &StageSet) -> StageSet {
        self.same_stage(other);
        let mut s = self.clone();
        s.bits.intersect_with(&other.bits);
        s
    }

    pub fn difference(&self, other: &StageSet) -> StageSet {
        self.same_stage(other);
        let mut s = self.clone();
        s.bits.difference_with(&other.bits);
        s
    }

    pub fn is_subset(&self, other: &StageSet) -> bool {
        self.same_stage(other);
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &StageSet) -> bool {
        self.same_stage(other);
        self.bits.is_disjoint(&other.bits)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Stage 0 worlds carry a label; later worlds are ordered pairs of
/// previous-stage worlds together with the index of their mirror pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorldTable {
    Base { labels: Vec<String> },
    Pairs { left: Vec<u32>, right: Vec<u32>, swap: Vec<u32> },
}

impl WorldTable {
    pub fn len(&self) -> usize {
        match self {
            WorldTable::Base { labels } => labels.len(),
            WorldTable::Pairs { left, .. } => left.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn left(&self, world: usize) -> Option<usize> {
        match self {
            WorldTable::Base { .. } => None,
            WorldTable::Pairs { left, .. } => Some(left[world] as usize),
        }
    }

    pub fn right(&self, world: usize) -> Option<usize> {
        match self {
            WorldTable::Base { .. } => None,
            WorldTable::Pairs { right, .. } => Some(right[world] as usize),
        }
    }

    pub fn partner(&self, world: usize) -> Option<usize> {
        match self {
            WorldTable::Base { .. } => None,
            WorldTable::Pairs { swap, .. } => Some(swap[world] as usize),
        }
    }

    /// Builds a pair table, pairing each `(x, y)` with `(y, x)`.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<WorldTable, ModelError> {
        let index: std::collections::HashMap<(u32, u32), u32> =
            pairs.iter().enumerate().map(|(i, p)| (*p, i as u32)).collect();
        if index.len() != pairs.len() {
            return Err(ModelError::Internal("duplicate pair world".into()));
        }
        let mut swap = Vec::with_capacity(pairs.len());
        for &(x, y) in pairs {
            match index.get(&(y, x)) {
                Some(&j) => swap.push(j),
                None => return Err(ModelError::Internal(format!("pair ({x},{y}) has no mirror"))),
            }
        }
        Ok(WorldTable::Pairs {
            left: pairs.iter().map(|p| p.0).collect(),
            right: pairs.iter().map(|p| p.1).collect(),
            swap,
        })
    }
}

/// `T` applied to each member of a set of pairs.
pub fn swap_image(table: &WorldTable, s: &StageSet) -> Result<StageSet, ModelError> {
    let mut out = StageSet::empty(s.stage(), s.universe());
    for w in s.iter() {
        match table.partner(w) {
            Some(p) => out.insert(p),
            None => return Err(ModelError::Internal(format!("world {w} has no swap partner"))),
        }
    }
    Ok(out)
}

/// `(id ∪ T)(s)`.
pub fn swap_closure(table: &WorldTable, s: &StageSet) -> Result<StageSet, ModelError> {
    Ok(s.union(&swap_image(table, s)?))
}

/// Image of each stage-n world under the embedding into stage n+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardRecord {
    pub source_stage: usize,
    pub target_len: usize,
    pub images: Vec<Vec<u32>>,
}

impl ForwardRecord {
    /// A pair world lies in the image of its left component.
    pub fn from_table(source_stage: usize, source_len: usize, next: &WorldTable) -> ForwardRecord {
        let mut images = vec![Vec::new(); source_len];
        for w in 0..next.len() {
            let l = next.left(w).expect("pair table");
            images[l].push(w as u32);
        }
        ForwardRecord { source_stage, target_len: next.len(), images }
    }

    pub fn forward(&self, s: &StageSet) -> Result<StageSet, ModelError> {
        if s.stage() != self.source_stage {
            return Err(ModelError::StageMismatch { expected: self.source_stage, found: s.stage() });
        }
        let mut out = StageSet::empty(self.source_stage + 1, self.target_len);
        for w in s.iter() {
            for &v in &self.images[w] {
                out.insert(v as usize);
            }
        }
        Ok(out)
    }

    /// The unique preimage, if `s` is the image of some set.
    pub fn pullback(&self, s: &StageSet) -> Option<StageSet> {
        assert_eq!(s.stage(), self.source_stage + 1);
        let mut out = StageSet::empty(self.source_stage, self.images.len());
        for (w, img) in self.images.iter().enumerate() {
            let hit = img.iter().filter(|&&v| s.contains(v as usize)).count();
            if hit == img.len() && hit > 0 {
                out.insert(w);
            } else if hit != 0 {
                return None;
            }
        }
        Some(out)
    }
}

/// Index of the stage-0 world in a standard table.
///
/// World `i` makes atom `j` true iff bit `k-1-j` of `i` is clear, so
/// index 0 is the all-true valuation and labels read like truth-table rows.
pub fn valuation_holds(atom_count: usize, world: usize, atom: usize) -> bool {
    (world >> (atom_count - 1 - atom)) & 1 == 0
}

pub fn valuation_label(atom_count: usize, world: usize) -> String {
    (0..atom_count)
        .map(|j| if valuation_holds(atom_count, world, j) { '1' } else { '0' })
        .collect()
}

pub fn world_of_label(atom_count: usize, label: &str) -> Option<usize> {
    if label.len() != atom_count {
        return None;
    }
    let mut idx = 0;
    for (j, c) in label.chars().enumerate() {
        match c {
            '1' => {}
            '0' => idx |= 1 << (atom_count - 1 - j),
            _ => return None,
        }
    }
    Some(idx)
}

/// Worlds of the valuation cube where `atom` holds.
pub fn minterm_set(ctx: &AtomContext, atom: &str) -> Result<StageSet, ModelError> {
    let j = ctx.index_of(atom).ok_or_else(|| ModelError::UnknownAtom(atom.to_string()))?;
    let k = ctx.len();
    let n = 1usize << k;
    Ok(StageSet::from_indices(0, n, (0..n).filter(|&w| valuation_holds(k, w, j))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_world_stage1() -> (ForwardRecord, WorldTable) {
        // a=0, b=1, c=2; worlds (a,c),(b,c),(c,a),(c,b)
        let t = WorldTable::from_pairs(&[(0, 2), (1, 2), (2, 0), (2, 1)]).unwrap();
        (ForwardRecord::from_table(0, 3, &t), t)
    }

    #[test]
    fn complement_basics() {
        assert!(StageSet::empty(2, 5).complement().is_full());
        assert!(StageSet::full(2, 5).complement().is_empty());
        let ab = StageSet::from_indices(0, 3, [0, 1]);
        assert_eq!(ab.complement(), StageSet::singleton(0, 3, 2));
    }

    #[test]
    fn swap_examples() {
        let (_, t) = three_world_stage1();
        let ac = StageSet::singleton(1, 4, 0);
        assert_eq!(swap_image(&t, &ac).unwrap(), StageSet::singleton(1, 4, 2));
        assert!(swap_image(&t, &StageSet::empty(1, 4)).unwrap().is_empty());
        let c_side = StageSet::from_indices(1, 4, [2, 3]);
        assert_eq!(swap_image(&t, &c_side).unwrap(), StageSet::from_indices(1, 4, [0, 1]));
        assert!(swap_closure(&t, &c_side).unwrap().is_full());
        let base = WorldTable::Base { labels: vec!["a".into()] };
        assert!(swap_image(&base, &StageSet::singleton(0, 1, 0)).is_err());
    }

    #[test]
    fn forward_examples() {
        let (rec, _) = three_world_stage1();
        let a = StageSet::singleton(0, 3, 0);
        let c = StageSet::singleton(0, 3, 2);
        assert_eq!(rec.forward(&a).unwrap(), StageSet::singleton(1, 4, 0));
        assert_eq!(rec.forward(&c).unwrap(), StageSet::from_indices(1, 4, [2, 3]));
        assert!(rec.forward(&StageSet::full(0, 3)).unwrap().is_full());
        assert!(rec.forward(&StageSet::full(1, 4)).is_err());
        assert_eq!(rec.pullback(&StageSet::from_indices(1, 4, [2, 3])), Some(c));
        assert_eq!(rec.pullback(&StageSet::singleton(1, 4, 2)), None);
    }

    #[test]
    fn minterms() {
        let c1 = AtomContext::new(&["p"]).unwrap();
        assert_eq!(minterm_set(&c1, "p").unwrap(), StageSet::singleton(0, 2, 0));
        let c2 = AtomContext::new(&["p", "q"]).unwrap();
        let hp = minterm_set(&c2, "p").unwrap();
        let hq = minterm_set(&c2, "q").unwrap();
        assert_eq!(hp.count(), 2);
        assert_eq!(hq.count(), 2);
        assert_eq!(hp.intersection(&hq).count(), 1);
        assert_ne!(hp, hq);
        assert!(minterm_set(&c2, "r").is_err());
        assert_eq!(valuation_label(2, 0), "11");
        assert_eq!(valuation_label(2, 1), "10");
        assert_eq!(world_of_label(2, "01"), Some(2));
    }
}
