//! Mechanical and characteristic words with exact quadratic slopes.

mod cf;
mod quadratic;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::morphism::{from_name, is_primitive};
use crate::name::MorphismName;
use crate::stream::{Generator, IndexedGenerator, StreamError, WordStream};

pub use cf::ContinuedFraction;
pub use quadratic::QuadraticNumber;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanicalError {
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("values over sqrt({0}) and sqrt({1}) cannot be combined")]
    MixedRadicals(i128, i128),
}

/// `s(γ, ρ)`: letter `n` is `⌊(n+1)γ + ρ⌋ - ⌊nγ + ρ⌋` (ceilings when
/// `upper`).
pub fn mechanical_word(
    gamma: &QuadraticNumber,
    rho: &QuadraticNumber,
    upper: bool,
) -> Result<WordStream, MechanicalError> {
    let zero = QuadraticNumber::integer(0);
    let one = QuadraticNumber::integer(1);
    if gamma.is_rational() {
        return Err(MechanicalError::Domain(format!("slope {gamma} is rational")));
    }
    if gamma.compare(&zero)?.is_le() || gamma.compare(&one)?.is_ge() {
        return Err(MechanicalError::Domain(format!("slope {gamma} is not in (0, 1)")));
    }
    if rho.compare(&zero)?.is_lt() || rho.compare(&one)?.is_ge() {
        return Err(MechanicalError::Domain(format!("intercept {rho} is not in [0, 1)")));
    }
    gamma.checked_add(rho)?;
    let (gamma, rho) = (*gamma, *rho);
    let round = move |n: usize| {
        let x = gamma * QuadraticNumber::integer(n as i128) + rho;
        if upper {
            x.ceil()
        } else {
            x.floor()
        }
    };
    let kind = if upper { "upper" } else { "lower" };
    let label = format!("s_{kind}({gamma},{rho})");
    Ok(WordStream::new(Box::new(IndexedGenerator::new(label, move |n| (round(n + 1) - round(n)) as u8))))
}

/// `c(γ)` from the standard pairs `s_k = s_{k-1}^{d_k} s_{k-2}`, with
/// `s_{-1} = 1`, `s_0 = 0`, `d_1 = a_1 - 1` and `d_k = a_k` afterwards.
pub fn characteristic_word(gamma: &ContinuedFraction) -> Result<WordStream, MechanicalError> {
    if !gamma.is_periodic() {
        return Err(MechanicalError::Domain(format!("{gamma} is rational")));
    }
    Ok(WordStream::new(Box::new(StandardPairs { cf: gamma.clone(), k: 0, previous: vec![1] })))
}

#[derive(Clone)]
struct StandardPairs {
    cf: ContinuedFraction,
    /// Index of the pair held in the output buffer (`s_k`) and `previous`
    /// (`s_{k-1}`).
    k: usize,
    previous: Vec<u8>,
}

impl Generator for StandardPairs {
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError> {
        if self.k == 0 {
            buf.clear();
            buf.push(0);
        }
        // s_1 may be the single letter 1, which is not a prefix of s_0
        while buf.len() < target || self.k < 2 {
            self.k += 1;
            let a = self.cf.term(self.k).expect("periodic expansion") as usize;
            let d = if self.k == 1 { a - 1 } else { a };
            let current = buf.clone();
            buf.clear();
            for _ in 0..d {
                buf.extend_from_slice(&current);
            }
            buf.extend_from_slice(&self.previous);
            self.previous = current;
        }
        Ok(())
    }

    fn label(&self) -> String {
        format!("c({})", self.cf)
    }

    fn box_clone(&self) -> Box<dyn Generator> {
        Box::new(self.clone())
    }
}

/// Continued fractions of the slopes of the derivated words of `c(γ)`:
/// `[0; c_k + 1 - i, a_{k+1}, a_{k+2}, …]` for `0 <= i < c_k`,
/// `(k, i) != (1, 0)`, where `c_1 = a_1 - 1` and `c_k = a_k` for `k >= 2`.
pub fn cf_der_set(gamma: &ContinuedFraction) -> Result<BTreeSet<ContinuedFraction>, MechanicalError> {
    if !gamma.is_periodic() {
        return Err(MechanicalError::Domain(format!("{gamma} is not eventually periodic")));
    }
    let a1 = gamma.term(1).unwrap();
    if a1 < 2 {
        return Err(MechanicalError::Domain(format!("{gamma} exceeds 1/2; use its complement")));
    }
    let mut out = BTreeSet::new();
    let last = gamma.preperiod().len().max(1) + gamma.period().len();
    for k in 1..=last {
        let c = if k == 1 { a1 - 1 } else { gamma.term(k).unwrap() };
        let tail = gamma.tail(k + 1).unwrap();
        for i in 0..c {
            if k == 1 && i == 0 {
                continue;
            }
            let mut pre = vec![c + 1 - i];
            pre.extend_from_slice(tail.preperiod());
            out.insert(ContinuedFraction::periodic(pre, tail.period().to_vec())?);
        }
    }
    Ok(out)
}

/// Frequency of the letter 1 in the fixed point of `w`, from the Perron
/// eigenvector of its incidence matrix.
pub fn slope_of_fixed_point(w: &MorphismName) -> Result<QuadraticNumber, MechanicalError> {
    if w.is_empty() || !is_primitive(w).unwrap_or(false) {
        return Err(MechanicalError::Domain(format!("{w} is not primitive")));
    }
    let m = from_name(w).matrix();
    let (tr, det) = (m.trace(), m.determinant());
    // λ = (tr + √(tr² - 4 det)) / 2; eigenvector (m01, λ - m00)
    let lambda = QuadraticNumber::new(tr, 1, tr * tr - 4 * det, 2)?;
    let m00 = QuadraticNumber::integer(m.0[0][0] as i128);
    let m01 = QuadraticNumber::integer(m.0[0][1] as i128);
    let v1 = lambda.checked_sub(&m00)?;
    v1.checked_div(&v1.checked_add(&m01)?)
}
