use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{MechanicalError, QuadraticNumber};

/// `[0; a_1, …, a_m, (a_{m+1}, …, a_{m+p})]` with an optional repeating
/// block; every partial quotient is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContinuedFraction {
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self, MechanicalError> {
        if preperiod.iter().chain(&period).any(|&a| a == 0) {
            return Err(MechanicalError::Domain("partial quotients must be positive".into()));
        }
        if preperiod.is_empty() && period.is_empty() {
            return Err(MechanicalError::Domain("empty continued fraction".into()));
        }
        Ok(Self::canonical(preperiod, period))
    }

    pub fn periodic(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self, MechanicalError> {
        if period.is_empty() {
            return Err(MechanicalError::Domain("period must be nonempty".into()));
        }
        Self::new(preperiod, period)
    }

    /// Shortest period, rolled back into the preperiod as far as possible.
    /// Finite expansions never end in 1 (unless that is the only term).
    fn canonical(mut pre: Vec<u64>, mut period: Vec<u64>) -> Self {
        if period.is_empty() {
            if pre.len() >= 2 && pre[pre.len() - 1] == 1 {
                pre.pop();
                *pre.last_mut().unwrap() += 1;
            }
            return ContinuedFraction { preperiod: pre, period };
        }
        let n = period.len();
        if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| period[i] == period[i - p])) {
            period.truncate(p);
        }
        while pre.last().is_some() && pre.last() == period.last() {
            pre.pop();
            period.rotate_right(1);
        }
        ContinuedFraction { preperiod: pre, period }
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn is_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// `a_k` for `k >= 1`; `None` past the end of a finite expansion.
    pub fn term(&self, k: usize) -> Option<u64> {
        assert!(k >= 1, "partial quotients are indexed from 1");
        let i = k - 1;
        if i < self.preperiod.len() {
            return Some(self.preperiod[i]);
        }
        if self.period.is_empty() {
            return None;
        }
        Some(self.period[(i - self.preperiod.len()) % self.period.len()])
    }

    /// The expansion from `a_k` on: `[0; a_k, a_{k+1}, …]`.
    pub fn tail(&self, k: usize) -> Option<ContinuedFraction> {
        assert!(k >= 1);
        let i = k - 1;
        if i < self.preperiod.len() {
            return Some(Self::canonical(self.preperiod[i..].to_vec(), self.period.clone()));
        }
        if self.period.is_empty() {
            return None;
        }
        let mut period = self.period.clone();
        let shift = (i - self.preperiod.len()) % period.len();
        period.rotate_left(shift);
        Some(Self::canonical(Vec::new(), period))
    }

    /// Replaces the first partial quotient.
    pub fn with_first(&self, first: u64) -> Result<ContinuedFraction, MechanicalError> {
        let rest = self.tail(2);
        match rest {
            Some(t) => {
                let mut pre = vec![first];
                pre.extend_from_slice(&t.preperiod);
                ContinuedFraction::new(pre, t.period)
            }
            None => ContinuedFraction::new(vec![first], Vec::new()),
        }
    }

    /// Exact value in `(0, 1]`.
    pub fn value(&self) -> Result<QuadraticNumber, MechanicalError> {
        let mut x = if self.period.is_empty() {
            None
        } else {
            // y = [p_1; p_2, …, p_n, y] = (A y + B) / (C y + D)
            let (mut a, mut b, mut c, mut d) = (1i128, 0i128, 0i128, 1i128);
            for &p in &self.period {
                let p = p as i128;
                (a, b, c, d) = (a * p + b, a, c * p + d, c);
            }
            // C y² + (D - A) y - B = 0, positive root
            let disc = (d - a) * (d - a) + 4 * b * c;
            Some(QuadraticNumber::new(a - d, 1, disc, 2 * c)?)
        };
        for &p in self.preperiod.iter().rev() {
            let term = QuadraticNumber::integer(p as i128);
            x = Some(match x {
                None => term,
                Some(y) => term.checked_add(&y.recip()?)?,
            });
        }
        x.expect("nonempty expansion").recip()
    }

    /// Expansion of a value in `(0, 1)`; periodic when the value is a
    /// quadratic irrational, finite when rational.
    pub fn expand(x: &QuadraticNumber) -> Result<ContinuedFraction, MechanicalError> {
        let zero = QuadraticNumber::integer(0);
        let one = QuadraticNumber::integer(1);
        if x.compare(&zero)? != std::cmp::Ordering::Greater || x.compare(&one)? != std::cmp::Ordering::Less {
            return Err(MechanicalError::Domain(format!("{x} is not in (0, 1)")));
        }
        let mut terms: Vec<u64> = Vec::new();
        let mut seen: HashMap<QuadraticNumber, usize> = HashMap::new();
        let mut y = x.recip()?;
        for _ in 0..10_000 {
            if let Some(&start) = seen.get(&y) {
                let period = terms[start..].to_vec();
                terms.truncate(start);
                return ContinuedFraction::new(terms, period);
            }
            seen.insert(y, terms.len());
            let a = y.floor();
            terms.push(a as u64);
            let frac = y.checked_sub(&QuadraticNumber::integer(a))?;
            if frac.signum() == 0 {
                return ContinuedFraction::new(terms, Vec::new());
            }
            y = frac.recip()?;
        }
        Err(MechanicalError::Domain(format!("no period found in the expansion of {x}")))
    }

    /// Expansion of `1 - γ`: `[0; a_1, …]` with `a_1 >= 2` maps to
    /// `[0; 1, a_1 - 1, …]` and back.
    pub fn complement(&self) -> Result<ContinuedFraction, MechanicalError> {
        let a1 = self.term(1).expect("nonempty expansion");
        if a1 >= 2 {
            let rest = self.with_first(a1 - 1)?;
            let mut pre = vec![1];
            pre.extend_from_slice(&rest.preperiod);
            return ContinuedFraction::new(pre, rest.period);
        }
        match (self.term(2), self.tail(2)) {
            (Some(a2), Some(rest)) => rest.with_first(a2 + 1),
            _ => Err(MechanicalError::Domain("1 - 1 = 0 has no expansion in (0, 1)".into())),
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.preperiod.iter().map(u64::to_string).collect();
        if !self.period.is_empty() {
            let inner: Vec<String> = self.period.iter().map(u64::to_string).collect();
            parts.push(format!("({})", inner.join(", ")));
        }
        write!(f, "[0; {}]", parts.join(", "))
    }
}

impl FromStr for ContinuedFraction {
    type Err = MechanicalError;

    /// `[0; 2, (1)]`, `[0; 3, 1, (2, 5)]`, `[0; (2)]`, `[0; 3, 7]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MechanicalError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = compact.strip_prefix("[0;").and_then(|b| b.strip_suffix(']')).ok_or_else(bad)?;
        let (pre_text, period_text) = match body.find('(') {
            Some(open) => {
                let inner = body[open..].strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
                (body[..open].trim_end_matches(','), Some(inner))
            }
            None => (body, None),
        };
        let numbers = |text: &str| -> Result<Vec<u64>, MechanicalError> {
            if text.is_empty() {
                return Ok(Vec::new());
            }
            text.split(',').map(|t| t.parse::<u64>().map_err(|_| bad())).collect()
        };
        let pre = numbers(pre_text)?;
        let period = match period_text {
            Some(t) => {
                let p = numbers(t)?;
                if p.is_empty() {
                    return Err(bad());
                }
                p
            }
            None => Vec::new(),
        };
        ContinuedFraction::new(pre, period)
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
