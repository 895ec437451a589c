//! The staged construction of the free conditional model.
//!
//! Stage 0 is a finite set of labeled worlds. Each step picks a base set `b`
//! of the current stage, splits it into blocks `Π_i ⊆ b`, `Γ_i ⊆ ∼b`, and
//! builds the next stage out of the pairs `Π_i × Γ_i` and `Γ_i × Π_i`. A set
//! `A` moves forward as the pairs whose left component lies in `A`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{minterm_set, swap_closure, valuation_label, ForwardRecord, StageSet, WorldTable};
use crate::error::ModelError;
use crate::formula::{AtomContext, Formula};
use crate::prob::AttachedMeasure;
use crate::tasks::{FreshPairs, Segment, TaskList};

pub const DEFAULT_MAX_WORLDS: usize = 100_000;

/// Upper bound on task-list steps spent resolving one conditional.
pub const FAITHFUL_STEP_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Process exactly the bases that queries need.
    #[default]
    Query,
    /// Walk the cyclic task list.
    Faithful,
}

impl FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "query" => Ok(Schedule::Query),
            "faithful" => Ok(Schedule::Faithful),
            other => Err(format!("unknown schedule `{other}` (expected query or faithful)")),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Query => "query",
            Schedule::Faithful => "faithful",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub schedule: Schedule,
    pub max_worlds: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { schedule: Schedule::Query, max_worlds: DEFAULT_MAX_WORLDS }
    }
}

/// Whether a base is conditioned on for the first time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// One block: `Π = b`, `Γ = ∼b`.
    Fresh,
    /// The base was processed before, latest at step `previous`; blocks are
    /// indexed by pairs of worlds of the stage that step produced.
    Revisit { previous: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockIndex {
    Base,
    /// `(ω, ω′)` with `ω` in the earlier image of the base and `ω′` outside it.
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub index: BlockIndex,
    pub pi: StageSet,
    pub gamma: StageSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessingRecord {
    pub step: usize,
    pub base: StageSet,
    pub case: Case,
    pub blocks: Vec<Block>,
    /// Union of the `Π × Γ` blocks; equals the image of the base.
    pub pi_gamma: StageSet,
    /// Union of the `Γ × Π` blocks.
    pub gamma_pi: StageSet,
    /// Block of each new world.
    pub world_block: Vec<u32>,
    pub from_task_list: bool,
}

impl ProcessingRecord {
    /// `f(C, image of base)` (or of its complement) at the stage this step built.
    pub fn conditional(&self, table: &WorldTable, c: &StageSet, positive: bool) -> Result<StageSet, ModelError> {
        let block = if positive { &self.pi_gamma } else { &self.gamma_pi };
        swap_closure(table, &c.intersection(block))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialWorlds {
    /// All valuations of the atoms.
    Valuations(AtomContext),
    /// Named worlds; each label doubles as an atom true at that world only.
    Labeled(AtomContext),
}

#[derive(Debug, Clone)]
pub struct ModelState {
    pub(crate) initial: InitialWorlds,
    pub(crate) tables: Vec<WorldTable>,
    pub(crate) forwards: Vec<ForwardRecord>,
    pub(crate) records: Vec<ProcessingRecord>,
    /// Base of each record carried forward to the current stage.
    pub(crate) live_bases: Vec<StageSet>,
    pub(crate) atom_sets: Vec<StageSet>,
    pub(crate) tasks: Option<TaskList>,
    pub(crate) initial_tasks: Option<Vec<StageSet>>,
    pub(crate) config: ModelConfig,
    pub(crate) measure: Option<AttachedMeasure>,
    pub(crate) cache: HashMap<Formula, StageSet>,
    pub(crate) peak_worlds: usize,
}

impl ModelState {
    /// Stage 0 is the valuation cube over `ctx`.
    pub fn new(ctx: AtomContext, config: ModelConfig) -> Result<Self, ModelError> {
        let k = ctx.len();
        if k == 0 {
            return Err(ModelError::EmptyContext);
        }
        if k >= usize::BITS as usize - 1 || (1usize << k) > config.max_worlds {
            return Err(ModelError::Guard { needed: 1usize.checked_shl(k as u32).unwrap_or(usize::MAX), max: config.max_worlds });
        }
        let n = 1usize << k;
        let labels = (0..n).map(|w| valuation_label(k, w)).collect();
        let atom_sets = ctx.names().iter().map(|a| minterm_set(&ctx, a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::assemble(InitialWorlds::Valuations(ctx), labels, atom_sets, None, config))
    }

    /// Stage 0 is a list of named worlds. `tasks`, when given, replaces the
    /// canonical initial task list and must list complement pairs.
    pub fn generalized(
        labels: &[&str],
        tasks: Option<Vec<StageSet>>,
        config: ModelConfig,
    ) -> Result<Self, ModelError> {
        if labels.len() < 2 {
            return Err(ModelError::TooFewWorlds);
        }
        if labels.len() > config.max_worlds {
            return Err(ModelError::Guard { needed: labels.len(), max: config.max_worlds });
        }
        let ctx = AtomContext::new(labels)?;
        let n = labels.len();
        if let Some(t) = &tasks {
            check_task_pairs(t, n)?;
        }
        let atom_sets = (0..n).map(|w| StageSet::singleton(0, n, w)).collect();
        let labels = labels.iter().map(|s| s.to_string()).collect();
        Ok(Self::assemble(InitialWorlds::Labeled(ctx), labels, atom_sets, tasks, config))
    }

    fn assemble(
        initial: InitialWorlds,
        labels: Vec<String>,
        atom_sets: Vec<StageSet>,
        initial_tasks: Option<Vec<StageSet>>,
        config: ModelConfig,
    ) -> Self {
        let n = labels.len();
        let tasks = match config.schedule {
            Schedule::Query => None,
            Schedule::Faithful => Some(match &initial_tasks {
                Some(t) => TaskList::new(Segment::Explicit(t.iter().cloned().collect())),
                None => TaskList::new(Segment::Fresh(FreshPairs::new(0, n, None, 0))),
            }),
        };
        ModelState {
            initial,
            tables: vec![WorldTable::Base { labels }],
            forwards: Vec::new(),
            records: Vec::new(),
            live_bases: Vec::new(),
            atom_sets,
            tasks,
            initial_tasks,
            config,
            measure: None,
            cache: HashMap::new(),
            peak_worlds: n,
        }
    }

    pub fn context(&self) -> &AtomContext {
        match &self.initial {
            InitialWorlds::Valuations(c) | InitialWorlds::Labeled(c) => c,
        }
    }

    pub fn initial_worlds(&self) -> &InitialWorlds {
        &self.initial
    }

    pub fn is_generalized(&self) -> bool {
        matches!(self.initial, InitialWorlds::Labeled(_))
    }

    pub fn config(&self) -> ModelConfig {
        self.config
    }

    pub fn stage(&self) -> usize {
        self.tables.len() - 1
    }

    pub fn world_count(&self) -> usize {
        self.tables[self.stage()].len()
    }

    pub fn stage_len(&self, stage: usize) -> usize {
        self.tables[stage].len()
    }

    pub fn peak_worlds(&self) -> usize {
        self.peak_worlds
    }

    pub fn table(&self, stage: usize) -> &WorldTable {
        &self.tables[stage]
    }

    pub fn forward_record(&self, step: usize) -> &ForwardRecord {
        &self.forwards[step]
    }

    pub fn records(&self) -> &[ProcessingRecord] {
        &self.records
    }

    pub fn tasks(&self) -> Option<&TaskList> {
        self.tasks.as_ref()
    }

    /// The next `limit` task-list slots as current-stage sets.
    pub fn task_slots(&self, limit: usize) -> Vec<StageSet> {
        let Some(tasks) = &self.tasks else { return Vec::new() };
        let mut probe = tasks.clone();
        let mut out = Vec::new();
        while out.len() < limit {
            let Some((a, b)) = probe.pop_pair() else { break };
            out.push(self.forward_to_current(&a));
            out.push(self.forward_to_current(&b));
        }
        out.truncate(limit);
        out
    }

    pub fn measure_ref(&self) -> Option<&AttachedMeasure> {
        self.measure.as_ref()
    }

    pub fn full(&self) -> StageSet {
        StageSet::full(self.stage(), self.world_count())
    }

    pub fn empty(&self) -> StageSet {
        StageSet::empty(self.stage(), self.world_count())
    }

    /// `h(atom)` at the current stage.
    pub fn atom_set(&self, name: &str) -> Result<StageSet, ModelError> {
        let i = self.context().index_of(name).ok_or_else(|| ModelError::UnknownAtom(name.to_string()))?;
        Ok(self.atom_sets[i].clone())
    }

    /// Label of a world as a nested pair expression over stage-0 labels.
    pub fn world_label(&self, stage: usize, world: usize) -> String {
        match &self.tables[stage] {
            WorldTable::Base { labels } => labels[world].clone(),
            WorldTable::Pairs { left, right, .. } => format!(
                "({},{})",
                self.world_label(stage - 1, left[world] as usize),
                self.world_label(stage - 1, right[world] as usize)
            ),
        }
    }

    pub fn set_labels(&self, s: &StageSet) -> Vec<String> {
        s.iter().map(|w| self.world_label(s.stage(), w)).collect()
    }

    /// Carries a set forward to `stage`.
    pub fn forward_to(&self, s: &StageSet, stage: usize) -> StageSet {
        assert!(s.stage() <= stage && stage <= self.stage(), "cannot forward stage {} to {}", s.stage(), stage);
        let mut cur = s.clone();
        while cur.stage() < stage {
            cur = self.forwards[cur.stage()].forward(&cur).expect("stage checked");
        }
        cur
    }

    pub fn forward_to_current(&self, s: &StageSet) -> StageSet {
        self.forward_to(s, self.stage())
    }

    /// The set at `stage` whose forward image is `s`, if there is one.
    pub fn pullback_to(&self, s: &StageSet, stage: usize) -> Option<StageSet> {
        let mut cur = s.clone();
        while cur.stage() > stage {
            cur = self.forwards[cur.stage() - 1].pullback(&cur)?;
        }
        Some(cur)
    }

    /// The stage-`target` world a world descends from.
    pub fn ancestor(&self, stage: usize, world: usize, target: usize) -> usize {
        let mut s = stage;
        let mut w = world;
        while s > target {
            w = self.tables[s].left(w).expect("pair stage");
            s -= 1;
        }
        w
    }

    /// Latest step whose base, carried forward, is `a` (`true`) or `∼a` (`false`).
    pub fn latest_record_for(&self, a: &StageSet) -> Option<(usize, bool)> {
        let comp = a.complement();
        (0..self.records.len()).rev().find_map(|k| {
            let b = &self.live_bases[k];
            if b == a {
                Some((k, true))
            } else if *b == comp {
                Some((k, false))
            } else {
                None
            }
        })
    }

    /// `f(B, A)` at the current stage.
    pub fn lookup_f(&self, b: &StageSet, a: &StageSet) -> Result<StageSet, ModelError> {
        self.check_current(b)?;
        self.check_current(a)?;
        if a.is_trivial() {
            return Ok(b.clone());
        }
        let (k, positive) = self.latest_record_for(a).ok_or(ModelError::Undefined)?;
        let c = self.pullback_to(b, k + 1).ok_or(ModelError::Undefined)?;
        let value = self.records[k].conditional(&self.tables[k + 1], &c, positive)?;
        Ok(self.forward_to_current(&value))
    }

    fn check_current(&self, s: &StageSet) -> Result<(), ModelError> {
        if s.stage() != self.stage() {
            return Err(ModelError::StageMismatch { expected: self.stage(), found: s.stage() });
        }
        Ok(())
    }

    pub fn classify_case(&self, base: &StageSet) -> Result<Case, ModelError> {
        self.check_current(base)?;
        if base.is_trivial() {
            return Err(ModelError::TrivialBase);
        }
        Ok(match self.latest_record_for(base) {
            Some((k, _)) => Case::Revisit { previous: k },
            None => Case::Fresh,
        })
    }

    /// True when `f(·, base)` is defined on every current-stage set.
    pub fn is_conditioned(&self, base: &StageSet) -> bool {
        if base.is_trivial() {
            return true;
        }
        match self.latest_record_for(base) {
            Some((k, _)) => self.tables[k + 1].len() == self.world_count(),
            None => false,
        }
    }

    pub fn ensure_conditioned(&mut self, base: &StageSet) -> Result<(), ModelError> {
        self.check_current(base)?;
        if self.is_conditioned(base) {
            return Ok(());
        }
        match self.config.schedule {
            Schedule::Query => self.process_base(base).map(|_| ()),
            Schedule::Faithful => {
                for _ in 0..FAITHFUL_STEP_CAP {
                    self.faithful_step()?;
                    if self.is_conditioned(&self.forward_to_current(base)) {
                        return Ok(());
                    }
                }
                Err(ModelError::StepCap(FAITHFUL_STEP_CAP))
            }
        }
    }

    /// One step of the construction on `base`. The faithful schedule only
    /// processes bases through [`ModelState::faithful_step`].
    pub fn process_base(&mut self, base: &StageSet) -> Result<&ProcessingRecord, ModelError> {
        if self.config.schedule == Schedule::Faithful {
            return Err(ModelError::Internal("the faithful schedule processes bases from its task list only".into()));
        }
        self.process(base, false)
    }

    /// Pops the front pair of the task list and processes it.
    pub fn faithful_step(&mut self) -> Result<&ProcessingRecord, ModelError> {
        let tasks = self.tasks.as_ref().ok_or(ModelError::EmptyTaskList)?;
        let mut probe = tasks.clone();
        let (first, _) = probe.pop_pair().ok_or(ModelError::EmptyTaskList)?;
        let base = self.forward_to_current(&first);
        self.process(&base, true)?;
        let n = self.records.len() - 1;
        Ok(&self.records[n])
    }

    fn process(&mut self, base: &StageSet, from_task_list: bool) -> Result<&ProcessingRecord, ModelError> {
        let case = self.classify_case(base)?;
        let n = self.stage();
        let (base, blocks) = match case {
            Case::Fresh => {
                let b = base.clone();
                let block = Block { index: BlockIndex::Base, pi: b.clone(), gamma: b.complement() };
                (b, vec![block])
            }
            Case::Revisit { previous } => {
                // Orient along the earlier processing: b_n = b_ν carried forward.
                let b = self.live_bases[previous].clone();
                let blocks = self.revisit_blocks(previous, &b)?;
                (b, blocks)
            }
        };

        let mut needed: u128 = 0;
        for blk in &blocks {
            needed += 2 * blk.pi.count() as u128 * blk.gamma.count() as u128;
        }
        if needed > self.config.max_worlds as u128 {
            return Err(ModelError::Guard {
                needed: usize::try_from(needed).unwrap_or(usize::MAX),
                max: self.config.max_worlds,
            });
        }

        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(needed as usize);
        let mut world_block: Vec<u32> = Vec::with_capacity(needed as usize);
        for (i, blk) in blocks.iter().enumerate() {
            for x in blk.pi.iter() {
                for y in blk.gamma.iter() {
                    pairs.push((x as u32, y as u32));
                    world_block.push(i as u32);
                }
            }
        }
        let half = pairs.len();
        for (i, blk) in blocks.iter().enumerate() {
            for y in blk.gamma.iter() {
                for x in blk.pi.iter() {
                    pairs.push((y as u32, x as u32));
                    world_block.push(i as u32);
                }
            }
        }
        let total = pairs.len();
        let table = WorldTable::from_pairs(&pairs)?;
        let forward = ForwardRecord::from_table(n, self.world_count(), &table);
        let pi_gamma = StageSet::from_indices(n + 1, total, 0..half);
        let gamma_pi = pi_gamma.complement();
        let record = ProcessingRecord {
            step: n,
            base: base.clone(),
            case,
            blocks,
            pi_gamma,
            gamma_pi,
            world_block,
            from_task_list,
        };

        let new_measure = match &self.measure {
            Some(m) => Some(m.extended(&record, &self.tables[n], &table)?),
            None => None,
        };

        // Everything below is infallible; the state changes only here.
        if let (Some(m), Some(stage)) = (self.measure.as_mut(), new_measure) {
            m.push_stage(stage);
        }
        let image_of_base = record.pi_gamma.clone();
        self.tables.push(table);
        self.forwards.push(forward);
        for b in self.live_bases.iter_mut() {
            *b = self.forwards[n].forward(b).expect("current stage");
        }
        self.live_bases.push(image_of_base.clone());
        for h in self.atom_sets.iter_mut() {
            *h = self.forwards[n].forward(h).expect("current stage");
        }
        self.peak_worlds = self.peak_worlds.max(total);
        if let Some(tasks) = self.tasks.as_mut() {
            if from_task_list {
                tasks.pop_pair();
            }
            let left = match &self.tables[n + 1] {
                WorldTable::Pairs { left, .. } => left.clone(),
                WorldTable::Base { .. } => unreachable!(),
            };
            tasks.push(Segment::Fresh(FreshPairs::new(n + 1, total, Some(left), self.tables[n].len())));
            tasks.push(Segment::Explicit(VecDeque::from(vec![image_of_base.clone(), image_of_base.complement()])));
        }
        self.records.push(record);
        Ok(&self.records[n])
    }

    /// Blocks for a base processed before, latest at step `previous`.
    ///
    /// `Π(ω,ω′) = f(ω′, ∼b) ∩ ω` and `Γ(ω,ω′) = f(ω, b) ∩ ω′` for `ω` in the
    /// image of the base at the stage `previous` built and `ω′` outside it,
    /// both carried forward. Pairs whose blocks are empty add no worlds and
    /// are dropped.
    fn revisit_blocks(&self, previous: usize, base: &StageSet) -> Result<Vec<Block>, ModelError> {
        let n = self.stage();
        let anchor = previous + 1;
        let anchor_len = self.tables[anchor].len();
        let rec = &self.records[previous];
        let not_base = base.complement();
        let mut pieces: BTreeMap<(usize, usize), (StageSet, StageSet)> = BTreeMap::new();
        let empty = StageSet::empty(n, self.world_count());

        for omega_out in rec.gamma_pi.iter() {
            let single = self.forward_to_current(&StageSet::singleton(anchor, anchor_len, omega_out));
            let f = self.lookup_f(&single, &not_base).map_err(|e| internal_lookup(e, "Π"))?;
            for w in f.intersection(base).iter() {
                let omega_in = self.ancestor(n, w, anchor);
                pieces.entry((omega_in, omega_out)).or_insert_with(|| (empty.clone(), empty.clone())).0.insert(w);
            }
        }
        for omega_in in rec.pi_gamma.iter() {
            let single = self.forward_to_current(&StageSet::singleton(anchor, anchor_len, omega_in));
            let f = self.lookup_f(&single, base).map_err(|e| internal_lookup(e, "Γ"))?;
            for w in f.intersection(&not_base).iter() {
                let omega_out = self.ancestor(n, w, anchor);
                pieces.entry((omega_in, omega_out)).or_insert_with(|| (empty.clone(), empty.clone())).1.insert(w);
            }
        }
        let mut blocks = Vec::with_capacity(pieces.len());
        for ((i, j), (pi, gamma)) in pieces {
            if pi.is_empty() || gamma.is_empty() {
                return Err(ModelError::Internal(format!(
                    "revisit block ({i},{j}) has exactly one empty side"
                )));
            }
            blocks.push(Block { index: BlockIndex::Pair(i, j), pi, gamma });
        }
        Ok(blocks)
    }

    /// Current-stage value of a cached subformula.
    pub(crate) fn cached(&mut self, f: &Formula) -> Option<StageSet> {
        let s = self.cache.get(f)?;
        if s.stage() == self.stage() {
            return Some(s.clone());
        }
        let fwd = self.forward_to_current(s);
        self.cache.insert(f.clone(), fwd.clone());
        Some(fwd)
    }

    pub(crate) fn remember(&mut self, f: &Formula, s: &StageSet) {
        self.cache.insert(f.clone(), s.clone());
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }
}

fn internal_lookup(e: ModelError, side: &str) -> ModelError {
    ModelError::Internal(format!("unresolvable {side} lookup while revisiting a base: {e}"))
}

fn check_task_pairs(tasks: &[StageSet], n: usize) -> Result<(), ModelError> {
    if !tasks.len().is_multiple_of(2) {
        return Err(ModelError::BadTaskList);
    }
    for pair in tasks.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.stage() != 0 || a.universe() != n || b.universe() != n || a.is_trivial() || *b != a.complement() {
            return Err(ModelError::BadTaskList);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_atom() -> ModelState {
        ModelState::new(AtomContext::new(&["p"]).unwrap(), ModelConfig::default()).unwrap()
    }

    fn three_world() -> ModelState {
        let tasks = vec![
            StageSet::from_indices(0, 3, [0, 1]),
            StageSet::from_indices(0, 3, [2]),
            StageSet::from_indices(0, 3, [1, 2]),
            StageSet::from_indices(0, 3, [0]),
            StageSet::from_indices(0, 3, [2, 0]),
            StageSet::from_indices(0, 3, [1]),
        ];
        let cfg = ModelConfig { schedule: Schedule::Faithful, ..ModelConfig::default() };
        ModelState::generalized(&["a", "b", "c"], Some(tasks), cfg).unwrap()
    }

    #[test]
    fn initial_stage() {
        let m = one_atom();
        assert_eq!(m.world_count(), 2);
        let ctx2 = AtomContext::new(&["p", "q"]).unwrap();
        let cfg = ModelConfig { schedule: Schedule::Faithful, ..ModelConfig::default() };
        let m2 = ModelState::new(ctx2, cfg).unwrap();
        assert_eq!(m2.world_count(), 4);
        assert_eq!(m2.tasks().unwrap().end(), 14u32.into());
        let small = ModelConfig { max_worlds: 3, ..ModelConfig::default() };
        assert!(ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), small).is_err());
        assert!(ModelState::generalized(&["a"], None, ModelConfig::default()).is_err());
    }

    #[test]
    fn fresh_then_revisit() {
        let mut m = one_atom();
        let hp = m.atom_set("p").unwrap();
        assert_eq!(m.classify_case(&hp).unwrap(), Case::Fresh);
        m.process_base(&hp).unwrap();
        assert_eq!(m.world_count(), 2);
        let hp1 = m.atom_set("p").unwrap();
        assert_eq!(m.classify_case(&hp1).unwrap(), Case::Revisit { previous: 0 });
        assert_eq!(m.classify_case(&hp1.complement()).unwrap(), Case::Revisit { previous: 0 });
        assert!(m.classify_case(&m.full()).is_err());
    }

    #[test]
    fn size_law_two_atoms() {
        let mut m = ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), ModelConfig::default()).unwrap();
        let hq = m.atom_set("q").unwrap();
        assert!(!m.is_conditioned(&hq));
        m.ensure_conditioned(&hq).unwrap();
        assert_eq!(m.world_count(), 8);
        let hq = m.atom_set("q").unwrap();
        m.ensure_conditioned(&hq).unwrap();
        assert_eq!(m.world_count(), 8);
        m.ensure_conditioned(&m.full()).unwrap();
        assert_eq!(m.records().len(), 1);
    }

    #[test]
    fn three_world_first_step() {
        let mut m = three_world();
        m.faithful_step().unwrap();
        let labels: Vec<String> = (0..m.world_count()).map(|w| m.world_label(1, w)).collect();
        assert_eq!(labels, ["(a,c)", "(b,c)", "(c,a)", "(c,b)"]);
        let a = m.atom_set("a").unwrap();
        let ab = m.atom_set("a").unwrap().union(&m.atom_set("b").unwrap());
        assert_eq!(m.set_labels(&m.lookup_f(&a, &ab).unwrap()), ["(a,c)", "(c,a)"]);
        let c = m.atom_set("c").unwrap();
        assert!(m.lookup_f(&c, &c).unwrap().is_full());
        let other = m.atom_set("a").unwrap().union(&c);
        assert_eq!(m.lookup_f(&a, &other), Err(ModelError::Undefined));
        assert_eq!(m.lookup_f(&a, &m.full()).unwrap(), a);
    }

    #[test]
    fn guard_leaves_state_untouched() {
        let cfg = ModelConfig { max_worlds: 6, ..ModelConfig::default() };
        let mut m = ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), cfg).unwrap();
        let hq = m.atom_set("q").unwrap();
        assert_eq!(m.process_base(&hq).unwrap_err(), ModelError::Guard { needed: 8, max: 6 });
        assert_eq!(m.stage(), 0);
        assert!(m.records().is_empty());
    }
}
