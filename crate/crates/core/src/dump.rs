//! Line-oriented text dump of a model, and loading by verified replay.
//!
//! ```text
//! dmbl-model v1
//! schedule query
//! max-worlds 100000
//! atoms p q                 (or: worlds a b c)
//! task0 0,1 | 2 | ...       (custom initial task list, optional)
//! step 0 source query case fresh base 0,1
//! block 0,1 | 2             (revisits: block i j pi | gamma)
//! stage 1 (a,c) (b,c) (c,a) (c,b)
//! f 0 + 0 : 0,2             (f of a singleton of the stage the step built)
//! measure exact             (or: measure smoothed)
//! dist a 1/5
//! m 1 0 1/5                 (current-stage masses, exact only)
//! end
//! ```
//! Index lists are comma-separated world indices, `-` for the empty set.

use crate::algebra::StageSet;
use crate::error::DumpError;
use crate::model::{BlockIndex, Case, InitialWorlds, ModelConfig, ModelState, Schedule};
use crate::prob::{AttachedMeasure, DistKind, Distribution};
use crate::ratfn::{fmt_rational, parse_rational, Rational};

const HEADER: &str = "dmbl-model v1";

fn indices(s: &StageSet) -> String {
    let v: Vec<String> = s.iter().map(|w| w.to_string()).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(",")
    }
}

/// Serializes stages, steps, conditional entries and the attached measure.
/// A smoothed measure is stored as its seed distribution.
pub fn dump(state: &ModelState, dist: Option<&Distribution>) -> String {
    let mut out = vec![HEADER.to_string()];
    let cfg = state.config();
    out.push(format!("schedule {}", cfg.schedule));
    out.push(format!("max-worlds {}", cfg.max_worlds));
    match state.initial_worlds() {
        InitialWorlds::Valuations(ctx) => out.push(format!("atoms {}", ctx.names().join(" "))),
        InitialWorlds::Labeled(ctx) => out.push(format!("worlds {}", ctx.names().join(" "))),
    }
    if let Some(t) = &state.initial_tasks {
        let parts: Vec<String> = t.iter().map(indices).collect();
        out.push(format!("task0 {}", parts.join(" | ")));
    }
    for rec in state.records() {
        let k = rec.step;
        let case = match rec.case {
            Case::Fresh => "fresh".to_string(),
            Case::Revisit { previous } => format!("revisit {previous}"),
        };
        let source = if rec.from_task_list { "task" } else { "query" };
        out.push(format!("step {k} source {source} case {case} base {}", indices(&rec.base)));
        for b in &rec.blocks {
            match b.index {
                BlockIndex::Base => out.push(format!("block {} | {}", indices(&b.pi), indices(&b.gamma))),
                BlockIndex::Pair(i, j) => {
                    out.push(format!("block {i} {j} {} | {}", indices(&b.pi), indices(&b.gamma)))
                }
            }
        }
        let labels: Vec<String> = (0..state.stage_len(k + 1)).map(|w| state.world_label(k + 1, w)).collect();
        out.push(format!("stage {} {}", k + 1, labels.join(" ")));
        let len = state.stage_len(k + 1);
        for w in 0..len {
            for (sign, positive) in [("+", true), ("-", false)] {
                let v = rec
                    .conditional(state.table(k + 1), &StageSet::singleton(k + 1, len, w), positive)
                    .expect("pair stage");
                out.push(format!("f {k} {sign} {w} : {}", indices(&v)));
            }
        }
    }
    if let (Some(m), Some(d)) = (state.measure_ref(), dist) {
        out.push(format!("measure {}", if m.is_exact() { "exact" } else { "smoothed" }));
        for (label, w) in d.labels().iter().zip(&d.weights) {
            out.push(format!("dist {label} {}", fmt_rational(w)));
        }
        if let AttachedMeasure::Exact(sm) = m {
            let stage = state.stage();
            for (w, mass) in sm.stages[stage].iter().enumerate() {
                out.push(format!("m {stage} {w} {}", fmt_rational(mass)));
            }
        }
    }
    out.push("end".into());
    let mut s = out.join("\n");
    s.push('\n');
    s
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let last_line = text.lines().count();
        Cursor { lines, pos: 0, last_line }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(usize, &'a str), DumpError> {
        let l = self.peek().ok_or(DumpError::Truncated { line: self.last_line + 1 })?;
        self.pos += 1;
        Ok(l)
    }

    fn keyword(&mut self, kw: &str) -> Result<(usize, &'a str), DumpError> {
        let (n, l) = self.next()?;
        match l.strip_prefix(kw) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((n, rest.trim())),
            _ => Err(malformed(n, format!("expected `{kw}`"))),
        }
    }
}

fn malformed(line: usize, message: impl Into<String>) -> DumpError {
    DumpError::Malformed { line, message: message.into() }
}

fn mismatch(line: usize, message: impl Into<String>) -> DumpError {
    DumpError::Mismatch { line, message: message.into() }
}

fn parse_indices(line: usize, text: &str, stage: usize, len: usize) -> Result<StageSet, DumpError> {
    let text = text.trim();
    if text == "-" {
        return Ok(StageSet::empty(stage, len));
    }
    let mut out = StageSet::empty(stage, len);
    for part in text.split(',') {
        let w: usize = part.trim().parse().map_err(|_| malformed(line, format!("bad world index `{part}`")))?;
        if w >= len {
            return Err(malformed(line, format!("world {w} out of range")));
        }
        out.insert(w);
    }
    Ok(out)
}

fn parse_num(line: usize, text: &str) -> Result<usize, DumpError> {
    text.parse().map_err(|_| malformed(line, format!("expected a number, got `{text}`")))
}

/// Rebuilds a model from a dump by replaying its steps, checking every
/// stored item against the replay.
pub fn load(text: &str) -> Result<(ModelState, Option<Distribution>), DumpError> {
    let mut cur = Cursor::new(text);
    let (_, header) = cur.next()?;
    if header != HEADER {
        return Err(DumpError::Version(header.to_string()));
    }
    let (n, sched) = cur.keyword("schedule")?;
    let schedule: Schedule = sched.parse().map_err(|e: String| malformed(n, e))?;
    let (n, mw) = cur.keyword("max-worlds")?;
    let config = ModelConfig { schedule, max_worlds: parse_num(n, mw)? };

    let (n, first) = cur.next()?;
    let (kind, names) = first.split_once(' ').ok_or_else(|| malformed(n, "expected `atoms` or `worlds`"))?;
    let names: Vec<&str> = names.split_whitespace().collect();
    let mut state = match kind {
        "atoms" => {
            let ctx = crate::formula::AtomContext::new(&names)?;
            ModelState::new(ctx, config)?
        }
        "worlds" => {
            let tasks = match cur.peek() {
                Some((tn, l)) if l.starts_with("task0") => {
                    cur.pos += 1;
                    let body = l["task0".len()..].trim();
                    let sets = body
                        .split('|')
                        .map(|p| parse_indices(tn, p, 0, names.len()))
                        .collect::<Result<Vec<_>, _>>()?;
                    Some(sets)
                }
                _ => None,
            };
            ModelState::generalized(&names, tasks, config)?
        }
        _ => return Err(malformed(n, "expected `atoms` or `worlds`")),
    };

    while let Some((n, l)) = cur.peek() {
        if !l.starts_with("step ") {
            break;
        }
        cur.pos += 1;
        replay_step(&mut state, &mut cur, n, l)?;
    }

    let mut dist = None;
    if let Some((n, l)) = cur.peek() {
        if let Some(kind) = l.strip_prefix("measure ") {
            cur.pos += 1;
            let mut weights: Vec<Rational> = Vec::new();
            while let Some((dn, dl)) = cur.peek() {
                let Some(rest) = dl.strip_prefix("dist ") else { break };
                cur.pos += 1;
                let (_, value) = rest.split_once(' ').ok_or_else(|| malformed(dn, "expected `dist <world> <p/q>`"))?;
                weights.push(parse_rational(value).ok_or_else(|| malformed(dn, "bad rational"))?);
            }
            let dk = match state.initial_worlds() {
                InitialWorlds::Valuations(c) => DistKind::Atoms(c.names().to_vec()),
                InitialWorlds::Labeled(c) => DistKind::Worlds(c.names().to_vec()),
            };
            let d = Distribution::new(dk, weights).map_err(|e| malformed(n, e.to_string()))?;
            match kind.trim() {
                "exact" => state.attach_measure(&d)?,
                "smoothed" => state.attach_smoothed(&d)?,
                other => return Err(malformed(n, format!("unknown measure kind `{other}`"))),
            }
            while let Some((mn, ml)) = cur.peek() {
                let Some(rest) = ml.strip_prefix("m ") else { break };
                cur.pos += 1;
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(malformed(mn, "expected `m <stage> <world> <p/q>`"));
                }
                let (s, w) = (parse_num(mn, parts[0])?, parse_num(mn, parts[1])?);
                let v = parse_rational(parts[2]).ok_or_else(|| malformed(mn, "bad rational"))?;
                if s != state.stage() || w >= state.world_count() {
                    return Err(malformed(mn, "mass for a world outside the current stage"));
                }
                let got = crate::prob::measure(&state, &StageSet::singleton(s, state.world_count(), w))?;
                if got != v {
                    return Err(mismatch(mn, format!("mass of world {w} is {}", fmt_rational(&got))));
                }
            }
            dist = Some(d);
        }
    }
    let (n, l) = cur.next()?;
    if l != "end" {
        return Err(malformed(n, "expected `end`"));
    }
    Ok((state, dist))
}

fn replay_step(state: &mut ModelState, cur: &mut Cursor<'_>, n: usize, line: &str) -> Result<(), DumpError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    // step K source S case C [P] base IDX
    let bad = || malformed(n, "expected `step <k> source <task|query> case <fresh|revisit k> base <set>`");
    if parts.len() < 8 || parts[2] != "source" || parts[4] != "case" {
        return Err(bad());
    }
    let k = parse_num(n, parts[1])?;
    if k != state.stage() {
        return Err(malformed(n, format!("step {k} out of order")));
    }
    let from_task = match parts[3] {
        "task" => true,
        "query" => false,
        _ => return Err(bad()),
    };
    let (case, rest) = match parts[5] {
        "fresh" => (Case::Fresh, &parts[6..]),
        "revisit" => (Case::Revisit { previous: parse_num(n, parts[6])? }, &parts[7..]),
        _ => return Err(bad()),
    };
    if rest.len() != 2 || rest[0] != "base" {
        return Err(bad());
    }
    let base = parse_indices(n, rest[1], k, state.world_count())?;
    let rec = if from_task { state.faithful_step()? } else { state.process_base(&base)? }.clone();
    if rec.base != base {
        return Err(mismatch(n, "processed base differs"));
    }
    if rec.case != case {
        return Err(mismatch(n, "case differs"));
    }
    for blk in &rec.blocks {
        let (bn, bl) = cur.keyword("block")?;
        let (head, gamma) = bl.split_once('|').ok_or_else(|| malformed(bn, "expected `|` in block"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let (index, pi_text) = match head.as_slice() {
            [pi] => (BlockIndex::Base, *pi),
            [i, j, pi] => (BlockIndex::Pair(parse_num(bn, i)?, parse_num(bn, j)?), *pi),
            _ => return Err(malformed(bn, "bad block line")),
        };
        let pi = parse_indices(bn, pi_text, k, blk.pi.universe())?;
        let gamma = parse_indices(bn, gamma, k, blk.gamma.universe())?;
        if index != blk.index || pi != blk.pi || gamma != blk.gamma {
            return Err(mismatch(bn, "block differs"));
        }
    }
    let (sn, sl) = cur.keyword("stage")?;
    let mut it = sl.split_whitespace();
    if it.next().map(|s| parse_num(sn, s)).transpose()? != Some(k + 1) {
        return Err(malformed(sn, "stage number"));
    }
    let labels: Vec<&str> = it.collect();
    let len = state.stage_len(k + 1);
    if labels.len() != len || labels.iter().enumerate().any(|(w, l)| *l != state.world_label(k + 1, w)) {
        return Err(mismatch(sn, "world listing differs"));
    }
    for w in 0..len {
        for (sign, positive) in [("+", true), ("-", false)] {
            let (fn_, fl) = cur.keyword("f")?;
            let (lhs, rhs) = fl.split_once(':').ok_or_else(|| malformed(fn_, "expected `:`"))?;
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            if lhs.len() != 3 || parse_num(fn_, lhs[0])? != k || lhs[1] != sign || parse_num(fn_, lhs[2])? != w {
                return Err(malformed(fn_, format!("expected entry `f {k} {sign} {w}`")));
            }
            let want = parse_indices(fn_, rhs, k + 1, len)?;
            let got = rec
                .conditional(state.table(k + 1), &StageSet::singleton(k + 1, len, w), positive)?;
            if want != got {
                return Err(mismatch(fn_, "conditional entry differs"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, AtomContext};
    use crate::prob::load_distribution;

    #[test]
    fn fresh_model_round_trip() {
        let m = ModelState::new(AtomContext::new(&["p"]).unwrap(), ModelConfig::default()).unwrap();
        let text = dump(&m, None);
        let (back, _) = load(&text).unwrap();
        assert_eq!(back.world_count(), 2);
        assert_eq!(dump(&back, None), text);
    }

    #[test]
    fn round_trip_with_measure() {
        let mut m = ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), ModelConfig::default()).unwrap();
        let d = load_distribution("atoms: p q\n11 1/6\n10 1/3\n01 1/4\n00 1/4\n").unwrap();
        m.attach_measure(&d).unwrap();
        let f = parse("((q | p) | q)", m.context()).unwrap();
        crate::eval::evaluate(&mut m, &f).unwrap();
        let text = dump(&m, Some(&d));
        let (back, bd) = load(&text).unwrap();
        assert_eq!(bd.as_ref(), Some(&d));
        assert_eq!(dump(&back, bd.as_ref()), text);
    }

    #[test]
    fn truncated_and_bad_headers() {
        let mut m = ModelState::new(AtomContext::new(&["p"]).unwrap(), ModelConfig::default()).unwrap();
        let hp = m.atom_set("p").unwrap();
        m.process_base(&hp).unwrap();
        let text = dump(&m, None);
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert_eq!(load(&cut).unwrap_err(), DumpError::Truncated { line: 6 });
        assert!(matches!(load("dmbl-model v9\n"), Err(DumpError::Version(_))));
        let tampered = text.replace("f 0 + 0 : 0,1", "f 0 + 0 : 0");
        assert!(matches!(load(&tampered), Err(DumpError::Mismatch { .. })));
    }
}
