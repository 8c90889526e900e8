use std::sync::OnceLock;

use crate::morphism::{fixed_point_starts, fixed_point_with_budget, square_name};
use crate::name::{apply_f, cyc, cyc_f, normalize, Letter, MorphismName};
use crate::stream::{equal_up_to_exchange, WordStream};

use super::{default_max_iter, delta_orbit, distinct_mod_f, prepare, DerClass, DerSetError, DerSetReport};

/// Prefix length used to tell certificate fixed points apart.
const DEDUP_PREFIX: usize = 200;

/// One way of computing the derivated words of a fixed point.
pub trait DerSetStrategy: Send + Sync {
    fn class(&self) -> DerClass;

    fn name(&self) -> &'static str {
        self.class().as_str()
    }

    /// Whether `w` (letters normalized, primitive) falls in this class.
    fn applies(&self, w: &MorphismName) -> bool;

    fn compute(&self, w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError>;
}

fn in_a_alpha(w: &MorphismName) -> bool {
    w.within(&[Letter::A, Letter::Alpha])
}

fn check_start(w: &MorphismName, start: Option<u8>) -> Result<(), DerSetError> {
    if let Some(s) = start {
        if !fixed_point_starts(w)?.contains(&s) {
            return Err(crate::morphism::MorphismError::InvalidStart { name: w.to_string(), start: s }.into());
        }
    }
    Ok(())
}

/// The fixed point a certificate stands for. Certificates always have a
/// single fixed point.
pub fn certificate_fixed_point(name: &MorphismName, budget: usize) -> Result<WordStream, DerSetError> {
    let start = *fixed_point_starts(name)?.first().ok_or_else(|| DerSetError::NoFixedPoint(name.to_string()))?;
    Ok(fixed_point_with_budget(name, start, budget)?)
}

pub struct GeneralStrategy;

impl DerSetStrategy for GeneralStrategy {
    fn class(&self) -> DerClass {
        DerClass::General
    }

    fn applies(&self, w: &MorphismName) -> bool {
        !w.has_exchange() && !in_a_alpha(w)
    }

    fn compute(&self, w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError> {
        check_start(w, start)?;
        let orbit = delta_orbit(w, default_max_iter(w))?;
        Ok(DerSetReport {
            input: w.clone(),
            class: DerClass::General,
            start: None,
            count: orbit.distinct_mod_f.len(),
            certificates: orbit.distinct_mod_f,
            preperiod: Some(orbit.preperiod),
            period: Some(orbit.period),
        })
    }
}

pub struct TwoFixedPointsStrategy;

impl TwoFixedPointsStrategy {
    fn certificates(w: &MorphismName, start: u8) -> Result<Vec<MorphismName>, DerSetError> {
        if w.letters()[0] == Letter::Alpha {
            let mirrored = Self::certificates(&apply_f(w), 1 - start)?;
            return Ok(mirrored.iter().map(apply_f).collect());
        }
        if start == 1 {
            return Self::certificates(&cyc(w)?, 1);
        }
        let wb = normalize(&w.concat(&MorphismName::plain(vec![Letter::B])))?;
        let v = MorphismName::plain(wb.letters()[1..].to_vec());
        let mut all = vec![v.clone()];
        all.extend(GeneralStrategy.compute(&v, None)?.certificates);
        Ok(distinct_mod_f(&all))
    }
}

impl DerSetStrategy for TwoFixedPointsStrategy {
    fn class(&self) -> DerClass {
        DerClass::TwoFixedPoints
    }

    fn applies(&self, w: &MorphismName) -> bool {
        !w.has_exchange() && in_a_alpha(w)
    }

    fn compute(&self, w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError> {
        let start = start.ok_or_else(|| DerSetError::MissingStart(w.to_string()))?;
        check_start(w, Some(start))?;
        let certificates = Self::certificates(w, start)?;
        Ok(DerSetReport {
            input: w.clone(),
            class: DerClass::TwoFixedPoints,
            start: Some(start),
            count: certificates.len(),
            certificates,
            preperiod: None,
            period: None,
        })
    }
}

pub struct StandardExchangeStrategy;

impl DerSetStrategy for StandardExchangeStrategy {
    fn class(&self) -> DerClass {
        DerClass::StandardExchange
    }

    fn applies(&self, w: &MorphismName) -> bool {
        w.has_exchange() && !w.is_empty() && w.within(&[Letter::B, Letter::Beta])
    }

    fn compute(&self, w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError> {
        check_start(w, start)?;
        let mut certificates: Vec<MorphismName> = Vec::new();
        let mut prefixes: Vec<Vec<u8>> = Vec::new();
        let mut v = w.clone();
        for _ in 0..w.len() {
            let mut stream = certificate_fixed_point(&v, DEDUP_PREFIX)?;
            let prefix = stream.prefix(DEDUP_PREFIX).map_err(|_| DerSetError::NoFixedPoint(v.to_string()))?;
            if !prefixes.iter().any(|p| equal_up_to_exchange(p, prefix)) {
                prefixes.push(prefix.to_vec());
                certificates.push(v.clone());
            }
            v = cyc_f(&v)?;
        }
        Ok(DerSetReport {
            input: w.clone(),
            class: DerClass::StandardExchange,
            start: None,
            count: certificates.len(),
            certificates,
            preperiod: None,
            period: None,
        })
    }
}

pub struct SquaredExchangeStrategy;

impl DerSetStrategy for SquaredExchangeStrategy {
    fn class(&self) -> DerClass {
        DerClass::SquaredExchange
    }

    fn applies(&self, w: &MorphismName) -> bool {
        w.has_exchange() && !in_a_alpha(w) && !w.within(&[Letter::B, Letter::Beta])
    }

    fn compute(&self, w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError> {
        check_start(w, start)?;
        let square = normalize(&square_name(w))?;
        let mut report = GeneralStrategy.compute(&square, None)?;
        report.input = w.clone();
        report.class = DerClass::SquaredExchange;
        Ok(report)
    }
}

/// Strategies keyed by class name, tried in registration order.
pub struct StrategyRegistry {
    strategies: Vec<Box<dyn DerSetStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { strategies: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut reg = StrategyRegistry::empty();
        reg.register(Box::new(GeneralStrategy));
        reg.register(Box::new(TwoFixedPointsStrategy));
        reg.register(Box::new(StandardExchangeStrategy));
        reg.register(Box::new(SquaredExchangeStrategy));
        reg
    }

    pub fn global() -> &'static StrategyRegistry {
        static REGISTRY: OnceLock<StrategyRegistry> = OnceLock::new();
        REGISTRY.get_or_init(StrategyRegistry::with_defaults)
    }

    /// Adds a strategy, replacing any earlier one with the same name.
    pub fn register(&mut self, strategy: Box<dyn DerSetStrategy>) {
        self.strategies.retain(|s| s.name() != strategy.name());
        self.strategies.push(strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn DerSetStrategy> {
        self.strategies.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn select(&self, w: &MorphismName) -> Option<&dyn DerSetStrategy> {
        self.strategies.iter().find(|s| s.applies(w)).map(|s| s.as_ref())
    }

    pub fn der_set(&self, w: &MorphismName, start: Option<u8>) -> Result<DerSetReport, DerSetError> {
        self.der_set_with(w, start, None)
    }

    /// Like [`StrategyRegistry::der_set`] with an optional forced class.
    pub fn der_set_with(
        &self,
        w: &MorphismName,
        start: Option<u8>,
        class: Option<DerClass>,
    ) -> Result<DerSetReport, DerSetError> {
        let name = prepare(w)?;
        if name.has_exchange() && in_a_alpha(&name) {
            return Err(DerSetError::NoFixedPoint(name.to_string()));
        }
        let strategy = match class {
            Some(c) => {
                let s = self.get(c.as_str()).ok_or_else(|| DerSetError::UnknownClass(c.as_str().to_string()))?;
                if !s.applies(&name) {
                    return Err(DerSetError::ClassMismatch { class: c.as_str().to_string(), name: name.to_string() });
                }
                s
            }
            None => self.select(&name).ok_or_else(|| DerSetError::NoFixedPoint(name.to_string()))?,
        };
        strategy.compute(&name, start)
    }
}
