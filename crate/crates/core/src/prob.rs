//! Probabilities: distributions over stage-0 worlds, their exact extension
//! through construction steps, and the smoothed extension for distributions
//! with zero-weight worlds.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{StageSet, WorldTable};
use crate::error::{DistError, ModelError};
use crate::eval::{conditional, evaluate};
use crate::formula::Formula;
use crate::model::{InitialWorlds, ModelState, ProcessingRecord};
use crate::ratfn::{fmt_rational, limit_at_zero, parse_rational, Poly, Rational, RationalFn};

/// Mass carrier: exact rationals, or rational functions of the smoothing parameter.
pub trait Weight: Clone + PartialEq + fmt::Debug {
    fn zero_weight() -> Self;
    fn unit_weight() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn over(&self, other: &Self) -> Result<Self, ModelError>;
    fn is_zero(&self) -> bool;

    fn sum<'a>(items: impl Iterator<Item = &'a Self>) -> Self
    where
        Self: 'a,
    {
        items.fold(Self::zero_weight(), |acc, w| acc.plus(w))
    }
}

impl Weight for Rational {
    fn zero_weight() -> Self {
        Zero::zero()
    }
    fn unit_weight() -> Self {
        One::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Result<Self, ModelError> {
        if Zero::is_zero(other) {
            Err(ModelError::ZeroMass)
        } else {
            Ok(self / other)
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    // Masses share few denominators, so numerators are added per
    // denominator and only the group totals are reduced.
    fn sum<'a>(items: impl Iterator<Item = &'a Self>) -> Self {
        let mut groups: HashMap<&num_bigint::BigInt, num_bigint::BigInt> = HashMap::new();
        for r in items {
            *groups.entry(r.denom()).or_default() += r.numer();
        }
        groups.into_iter().map(|(d, n)| Rational::new(n, d.clone())).sum()
    }
}

impl Weight for RationalFn {
    fn zero_weight() -> Self {
        RationalFn::constant(Zero::zero())
    }
    fn unit_weight() -> Self {
        RationalFn::constant(One::one())
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn over(&self, other: &Self) -> Result<Self, ModelError> {
        self.div(other)
    }
    fn is_zero(&self) -> bool {
        RationalFn::is_zero(self)
    }
    fn sum<'a>(items: impl Iterator<Item = &'a Self>) -> Self {
        let mut groups: HashMap<&Poly, Poly> = HashMap::new();
        for r in items {
            let slot = groups.entry(r.denom()).or_insert_with(Poly::zero);
            *slot = slot.add(r.numer());
        }
        groups.into_iter().fold(Self::zero_weight(), |acc, (d, n)| {
            acc.add(&RationalFn::new(n, d.clone()).expect("denominators are nonzero"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistKind {
    /// Weights on valuations of these atoms.
    Atoms(Vec<String>),
    /// Weights on named worlds.
    Worlds(Vec<String>),
}

/// Weights indexed by stage-0 world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub kind: DistKind,
    pub weights: Vec<Rational>,
}

impl Distribution {
    pub fn new(kind: DistKind, weights: Vec<Rational>) -> Result<Self, DistError> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(DistError::Negative { line: 0 });
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(DistError::BadTotal(fmt_rational(&total)));
        }
        Ok(Distribution { kind, weights })
    }

    pub fn uniform(kind: DistKind) -> Self {
        let n = world_labels(&kind).len();
        let w = Rational::new(1.into(), (n as i64).into());
        Distribution { kind, weights: vec![w; n] }
    }

    pub fn strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    pub fn labels(&self) -> Vec<String> {
        world_labels(&self.kind)
    }

    pub fn to_text(&self) -> String {
        let mut out = match &self.kind {
            DistKind::Atoms(a) => format!("atoms: {}\n", a.join(" ")),
            DistKind::Worlds(w) => format!("worlds: {}\n", w.join(" ")),
        };
        for (label, w) in self.labels().iter().zip(&self.weights) {
            out.push_str(&format!("{label} {}\n", fmt_rational(w)));
        }
        out
    }

    /// Whether this distribution lives on the model's stage-0 worlds.
    pub fn matches(&self, state: &ModelState) -> bool {
        match (&self.kind, state.initial_worlds()) {
            (DistKind::Atoms(a), InitialWorlds::Valuations(ctx)) => a.as_slice() == ctx.names(),
            (DistKind::Worlds(w), InitialWorlds::Labeled(ctx)) => w.as_slice() == ctx.names(),
            _ => false,
        }
    }

    /// `π_e = e/N + (1-e)π`, as polynomials in `e`.
    pub fn smoothed(&self) -> Vec<RationalFn> {
        let n = Rational::new(1.into(), (self.weights.len() as i64).into());
        self.weights
            .iter()
            .map(|w| RationalFn::poly(Poly::new(vec![w.clone(), &n - w])))
            .collect()
    }
}

fn world_labels(kind: &DistKind) -> Vec<String> {
    match kind {
        DistKind::Atoms(a) => {
            let k = a.len();
            (0..1usize << k).map(|w| crate::algebra::valuation_label(k, w)).collect()
        }
        DistKind::Worlds(w) => w.clone(),
    }
}

/// Reads `atoms: p q` or `worlds: a b c`, then `<label> <num>/<den>` lines.
/// Worlds without a line get weight 0.
pub fn load_distribution(text: &str) -> Result<Distribution, DistError> {
    let mut kind: Option<DistKind> = None;
    let mut weights: Vec<Option<Rational>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |m: &str| DistError::Malformed { line: line_no, message: m.to_string() };
        if kind.is_none() {
            let (head, rest) = line.split_once(':').ok_or_else(|| malformed("expected `atoms:` or `worlds:`"))?;
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if names.is_empty() {
                return Err(malformed("no names given"));
            }
            for (j, n) in names.iter().enumerate() {
                if names[..j].contains(n) {
                    return Err(DistError::DuplicateWorld { line: line_no, label: n.clone() });
                }
            }
            let k = match head.trim() {
                "atoms" => {
                    if names.len() > 20 {
                        return Err(malformed("too many atoms"));
                    }
                    DistKind::Atoms(names)
                }
                "worlds" => DistKind::Worlds(names),
                _ => return Err(malformed("expected `atoms:` or `worlds:`")),
            };
            labels = world_labels(&k);
            weights = vec![None; labels.len()];
            kind = Some(k);
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(label), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed("expected `<world> <num>/<den>`"));
        };
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| DistError::UnknownWorld { line: line_no, label: label.to_string() })?;
        let w = parse_rational(value).ok_or_else(|| malformed("bad rational"))?;
        if w.is_negative() {
            return Err(DistError::Negative { line: line_no });
        }
        if weights[idx].is_some() {
            return Err(DistError::DuplicateWorld { line: line_no, label: label.to_string() });
        }
        weights[idx] = Some(w);
    }
    let kind = kind.ok_or(DistError::Malformed { line: 1, message: "empty distribution".into() })?;
    let weights: Vec<Rational> = weights.into_iter().map(|w| w.unwrap_or_else(Rational::zero)).collect();
    Distribution::new(kind, weights)
}

/// Masses of every world of every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMeasure<W> {
    pub stages: Vec<Vec<W>>,
}

impl<W: Weight> StageMeasure<W> {
    pub fn mass(&self, s: &StageSet) -> W {
        let masses = &self.stages[s.stage()];
        W::sum(s.iter().map(|w| &masses[w]))
    }

    /// Masses of the stage built by `rec`: `(x,y)` in `Π_i × Γ_i` gets
    /// `P(x)P(y)/P(Γ_i)`, the mirrored `(y,x)` gets `P(y)P(x)/P(Π_i)`.
    pub fn next_stage(&self, rec: &ProcessingRecord, next: &WorldTable) -> Result<Vec<W>, ModelError> {
        let masses = &self.stages[rec.step];
        let sums: Vec<(W, W)> = rec.blocks.iter().map(|b| (self.mass(&b.pi), self.mass(&b.gamma))).collect();
        let mut out = Vec::with_capacity(next.len());
        for w in 0..next.len() {
            let x = next.left(w).expect("pair stage");
            let y = next.right(w).expect("pair stage");
            let (pi_mass, gamma_mass) = &sums[rec.world_block[w] as usize];
            let divisor = if rec.pi_gamma.contains(w) { gamma_mass } else { pi_mass };
            out.push(masses[x].times(&masses[y]).over(divisor)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttachedMeasure {
    Exact(StageMeasure<Rational>),
    Smoothed(StageMeasure<RationalFn>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureStage {
    Exact(Vec<Rational>),
    Smoothed(Vec<RationalFn>),
}

impl AttachedMeasure {
    pub(crate) fn extended(
        &self,
        rec: &ProcessingRecord,
        _current: &WorldTable,
        next: &WorldTable,
    ) -> Result<MeasureStage, ModelError> {
        Ok(match self {
            AttachedMeasure::Exact(m) => MeasureStage::Exact(m.next_stage(rec, next)?),
            AttachedMeasure::Smoothed(m) => MeasureStage::Smoothed(m.next_stage(rec, next)?),
        })
    }

    pub(crate) fn push_stage(&mut self, stage: MeasureStage) {
        match (self, stage) {
            (AttachedMeasure::Exact(m), MeasureStage::Exact(v)) => m.stages.push(v),
            (AttachedMeasure::Smoothed(m), MeasureStage::Smoothed(v)) => m.stages.push(v),
            _ => unreachable!("measure kind is fixed at attachment"),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AttachedMeasure::Exact(_))
    }
}

impl ModelState {
    /// Attaches a strictly positive distribution, replaying every step so far.
    pub fn attach_measure(&mut self, dist: &Distribution) -> Result<(), ModelError> {
        if !dist.matches(self) {
            return Err(ModelError::DistributionMismatch);
        }
        if !dist.strictly_positive() {
            return Err(ModelError::Degenerate);
        }
        let mut m = StageMeasure { stages: vec![dist.weights.clone()] };
        for rec in &self.records {
            let next = m.next_stage(rec, &self.tables[rec.step + 1])?;
            m.stages.push(next);
        }
        self.measure = Some(AttachedMeasure::Exact(m));
        Ok(())
    }

    /// Attaches the smoothed distribution `e/N + (1-e)π`; zero weights are fine.
    pub fn attach_smoothed(&mut self, dist: &Distribution) -> Result<(), ModelError> {
        if !dist.matches(self) {
            return Err(ModelError::DistributionMismatch);
        }
        let mut m = StageMeasure { stages: vec![dist.smoothed()] };
        for rec in &self.records {
            let next = m.next_stage(rec, &self.tables[rec.step + 1])?;
            m.stages.push(next);
        }
        self.measure = Some(AttachedMeasure::Smoothed(m));
        Ok(())
    }

    pub fn detach_measure(&mut self) {
        self.measure = None;
    }
}

/// `P(s)` under the attached exact measure.
pub fn measure(state: &ModelState, s: &StageSet) -> Result<Rational, ModelError> {
    match &state.measure {
        Some(AttachedMeasure::Exact(m)) => Ok(m.mass(s)),
        _ => Err(ModelError::NoMeasure),
    }
}

/// `P_e(s)` under the attached smoothed measure.
pub fn smoothed_measure(state: &ModelState, s: &StageSet) -> Result<RationalFn, ModelError> {
    match &state.measure {
        Some(AttachedMeasure::Smoothed(m)) => Ok(m.mass(s)),
        _ => Err(ModelError::NoMeasure),
    }
}

/// Probability of a formula: the mass of its set.
pub fn prob(state: &mut ModelState, f: &Formula) -> Result<Rational, ModelError> {
    if !matches!(state.measure, Some(AttachedMeasure::Exact(_))) {
        return Err(ModelError::NoMeasure);
    }
    let s = evaluate(state, f)?;
    measure(state, &s)
}

/// The rational function `R_f(e)` under the attached smoothed measure.
pub fn smoothed_prob(state: &mut ModelState, f: &Formula) -> Result<RationalFn, ModelError> {
    if !matches!(state.measure, Some(AttachedMeasure::Smoothed(_))) {
        return Err(ModelError::NoMeasure);
    }
    let s = evaluate(state, f)?;
    smoothed_measure(state, &s)
}

/// `lim_{e→0+} R_f(e)` under the attached smoothed measure.
pub fn epsilon_prob(state: &mut ModelState, f: &Formula) -> Result<Rational, ModelError> {
    limit_at_zero(&smoothed_prob(state, f)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BayesReport {
    /// `P((ψ|φ))`.
    pub conditional: Rational,
    /// `P(φ)`.
    pub antecedent: Rational,
    /// `P(φ ∧ ψ)`.
    pub joint: Rational,
    pub product: Rational,
    pub equal: bool,
}

/// Compares `P((ψ|φ))·P(φ)` with `P(φ ∧ ψ)`.
pub fn bayes_check(state: &mut ModelState, psi: &Formula, phi: &Formula) -> Result<BayesReport, ModelError> {
    let cond = prob(state, &Formula::cond(psi.clone(), phi.clone()))?;
    let ante = prob(state, phi)?;
    let joint = prob(state, &Formula::and(phi.clone(), psi.clone()))?;
    let product = &cond * &ante;
    let equal = product == joint;
    Ok(BayesReport { conditional: cond, antecedent: ante, joint, product, equal })
}

/// `P(A ∩ B) = P(A)·P(f(B, A))` for the current-stage sets.
pub fn fundamental_identity(state: &mut ModelState, b: &StageSet, a: &StageSet) -> Result<bool, ModelError> {
    let f = conditional(state, b, a)?;
    let a = state.forward_to_current(a);
    let b = state.forward_to_current(b);
    Ok(measure(state, &a.intersection(&b))? == measure(state, &a)? * measure(state, &f)?)
}
