//! The Δ operator on normalized names and the set of derivated words of a
//! fixed point, each certified by a morphism name.

mod strategy;

use serde::Serialize;
use thiserror::Error;

use crate::morphism::{is_primitive, MorphismError};
use crate::name::{apply_f, is_normalized, normalize_letters, Letter, MorphismName, NameError};

pub use strategy::{
    certificate_fixed_point, DerSetStrategy, GeneralStrategy, SquaredExchangeStrategy, StandardExchangeStrategy,
    StrategyRegistry, TwoFixedPointsStrategy,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerSetError {
    #[error(transparent)]
    Name(#[from] NameError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("delta is undefined for {name}: {reason}")]
    DeltaDomain { name: String, reason: String },
    #[error("{0} has no fixed point")]
    NoFixedPoint(String),
    #[error("{0} has two fixed points; a start letter (0 or 1) is required")]
    MissingStart(String),
    #[error("no repetition in the delta orbit of {name} within {max_iter} steps")]
    NoRepetition { name: String, max_iter: usize },
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("class {class} does not apply to {name}")]
    ClassMismatch { class: String, name: String },
}

fn delta_domain(name: &MorphismName, reason: &str) -> DerSetError {
    DerSetError::DeltaDomain { name: name.to_string(), reason: reason.to_string() }
}

fn check_delta_domain(w: &MorphismName) -> Result<(), DerSetError> {
    if w.has_exchange() {
        return Err(delta_domain(w, "name carries the exchange suffix"));
    }
    if w.is_empty() {
        return Err(delta_domain(w, "empty name"));
    }
    if !is_primitive(w)? {
        return Err(delta_domain(w, "morphism is not primitive"));
    }
    if w.within(&[Letter::A, Letter::Alpha]) {
        return Err(delta_domain(w, "name lies in {a, α}*"));
    }
    Ok(())
}

/// `Δ(a^k β w') = N(w' a^k β)` and `Δ(α^k b w') = N(w' α^k b)`.
pub fn delta(w: &MorphismName) -> Result<MorphismName, DerSetError> {
    check_delta_domain(w)?;
    if !is_normalized(w.letters()) {
        return Err(delta_domain(w, "name is not normalized"));
    }
    delta_unchecked(w.letters()).ok_or_else(|| delta_domain(w, "no a^k β or α^k b prefix"))
}

fn delta_unchecked(letters: &[Letter]) -> Option<MorphismName> {
    let lead = letters[0];
    let closing = match lead {
        Letter::A => Letter::Beta,
        Letter::Alpha => Letter::B,
        Letter::B | Letter::Beta => lead,
    };
    let k = if lead == closing { 0 } else { letters.iter().take_while(|&&l| l == lead).count() };
    if letters.get(k) != Some(&closing) {
        return None;
    }
    let mut rotated = letters[k + 1..].to_vec();
    rotated.extend_from_slice(&letters[..=k]);
    Some(MorphismName::plain(normalize_letters(&rotated)))
}

/// The eventually periodic sequence `Δ¹(w), Δ²(w), …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaOrbit {
    pub seed: MorphismName,
    /// `Δ¹ … Δ^(preperiod + period)`, all distinct.
    pub elements: Vec<MorphismName>,
    pub preperiod: usize,
    pub period: usize,
    /// Orbit order, keeping the first of `v` and `F(v)`.
    pub distinct_mod_f: Vec<MorphismName>,
}

impl DeltaOrbit {
    /// `Δ^k(seed)` for `k >= 1`.
    pub fn nth(&self, k: usize) -> &MorphismName {
        assert!(k >= 1, "orbit is indexed from 1");
        let i = if k <= self.elements.len() { k - 1 } else { self.preperiod + (k - 1 - self.preperiod) % self.period };
        &self.elements[i]
    }

    pub fn cycle(&self) -> &[MorphismName] {
        &self.elements[self.preperiod..]
    }

    /// True when the seed itself lies on the cycle.
    pub fn seed_recurs(&self) -> bool {
        self.cycle().contains(&self.seed)
    }
}

pub fn default_max_iter(w: &MorphismName) -> usize {
    3 * w.len() + 2
}

pub fn delta_orbit(w: &MorphismName, max_iter: usize) -> Result<DeltaOrbit, DerSetError> {
    check_delta_domain(w)?;
    let seed = MorphismName::plain(normalize_letters(w.letters()));
    let mut elements: Vec<MorphismName> = Vec::new();
    let mut current = seed.clone();
    for _ in 0..max_iter {
        current = delta(&current)?;
        if let Some(i) = elements.iter().position(|e| *e == current) {
            let period = elements.len() - i;
            let distinct_mod_f = distinct_mod_f(&elements);
            return Ok(DeltaOrbit { seed, elements, preperiod: i, period, distinct_mod_f });
        }
        elements.push(current.clone());
    }
    Err(DerSetError::NoRepetition { name: seed.to_string(), max_iter })
}

/// Keeps the first of every pair `{v, F(v)}`, preserving order.
pub fn distinct_mod_f(names: &[MorphismName]) -> Vec<MorphismName> {
    let mut kept: Vec<MorphismName> = Vec::new();
    for v in names {
        let fv = apply_f(v);
        if !kept.iter().any(|k| k == v || *k == fv) {
            kept.push(v.clone());
        }
    }
    kept
}

/// `(1, 3|w| - 4)`.
pub fn count_bounds(w: &MorphismName) -> Result<(usize, usize), DerSetError> {
    check_delta_domain(w)?;
    Ok((1, 3 * w.len() - 4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerClass {
    General,
    TwoFixedPoints,
    StandardExchange,
    SquaredExchange,
}

impl DerClass {
    pub const ALL: [DerClass; 4] =
        [DerClass::General, DerClass::TwoFixedPoints, DerClass::StandardExchange, DerClass::SquaredExchange];

    pub fn as_str(self) -> &'static str {
        match self {
            DerClass::General => "general",
            DerClass::TwoFixedPoints => "two_fixed_points",
            DerClass::StandardExchange => "standard_exchange",
            DerClass::SquaredExchange => "squared_exchange",
        }
    }

    pub fn parse(s: &str) -> Result<DerClass, DerSetError> {
        DerClass::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| DerSetError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerSetReport {
    pub input: MorphismName,
    pub class: DerClass,
    pub start: Option<u8>,
    pub certificates: Vec<MorphismName>,
    pub count: usize,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
}

/// Normalizes the letters of `w` (the exchange suffix is kept) and rejects
/// non-primitive morphisms.
pub(crate) fn prepare(w: &MorphismName) -> Result<MorphismName, DerSetError> {
    if w.is_empty() && !w.has_exchange() {
        return Err(MorphismError::Empty.into());
    }
    let name = MorphismName::new(normalize_letters(w.letters()), w.has_exchange());
    if !is_primitive(&name)? {
        return Err(MorphismError::NotPrimitive(name.to_string()).into());
    }
    Ok(name)
}

/// Derivated words of the fixed point of `w`, certified by morphism names.
///
/// `start` selects the fixed point when `w` has two of them.
pub fn der_set(w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError> {
    StrategyRegistry::global().der_set(w, start)
}

/// Closed-form number of derivated words for non-power names, when one is
/// known: `|w|` for standard names (with or without exchange),
/// `1 + |w|_α` or `1 + |w|_a` for names with two fixed points.
pub fn closed_form_count(w: &MorphismName, start: Option<u8>) -> Option<usize> {
    let standard = w.within(&[Letter::B, Letter::Beta]);
    let two = !w.has_exchange() && w.within(&[Letter::A, Letter::Alpha]);
    if standard && !w.is_empty() {
        Some(w.len())
    } else if two {
        match start? {
            0 => Some(1 + w.count(Letter::Alpha)),
            _ => Some(1 + w.count(Letter::A)),
        }
    } else {
        None
    }
}
