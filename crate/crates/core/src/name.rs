//! Names of morphisms in the special Sturmian monoid.
//!
//! A name is a word over the four generators `a`, `b`, `α`, `β`, optionally
//! followed by the letter exchange `E` composed on the right. Two names denote
//! the same morphism exactly when one can be rewritten into the other with
//!
//! ```text
//!   α a^k β  <->  β b^k α        a α^k b  <->  b β^k a        (k >= 0)
//! ```
//!
//! The rules never move a letter between the Latin (`a`, `b`) and Greek
//! (`α`, `β`) positions, so comparisons are made position by position within
//! each class with `a < b` and `α < β`. Latin and Greek letters are never
//! compared with each other.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("invalid morphism name {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("name {0} carries an exchange suffix; operation acts on plain names only")]
    ExchangeSuffix(String),
    #[error("operation needs a nonempty name")]
    Empty,
}

/// One of the four elementary Sturmian morphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    Alpha,
    Beta,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::Alpha, Letter::Beta];

    pub fn is_latin(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    pub fn is_greek(self) -> bool {
        !self.is_latin()
    }

    /// Rank within the letter's own class: `a`, `α` -> 0 and `b`, `β` -> 1.
    pub fn rank(self) -> u8 {
        match self {
            Letter::A | Letter::Alpha => 0,
            Letter::B | Letter::Beta => 1,
        }
    }

    /// Letter of the given class and rank.
    pub fn from_class_rank(latin: bool, rank: u8) -> Letter {
        match (latin, rank) {
            (true, 0) => Letter::A,
            (true, _) => Letter::B,
            (false, 0) => Letter::Alpha,
            (false, _) => Letter::Beta,
        }
    }

    /// The involution `a <-> α`, `b <-> β`.
    pub fn flip(self) -> Letter {
        match self {
            Letter::A => Letter::Alpha,
            Letter::Alpha => Letter::A,
            Letter::B => Letter::Beta,
            Letter::Beta => Letter::B,
        }
    }

    pub fn ascii(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::Alpha => 'A',
            Letter::Beta => 'B',
        }
    }

    pub fn unicode(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::Alpha => 'α',
            Letter::Beta => 'β',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'A' | 'α' => Some(Letter::Alpha),
            'B' | 'β' => Some(Letter::Beta),
            _ => None,
        }
    }
}

/// Output alphabet for rendering names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Ascii,
    Unicode,
}

/// Symbolic identity of a Sturmian morphism: `φ_{u_0} ∘ … ∘ φ_{u_{n-1}}`,
/// composed with `E` on the right when `exchange` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphismName {
    letters: Vec<Letter>,
    exchange: bool,
}

impl MorphismName {
    pub fn new(letters: Vec<Letter>, exchange: bool) -> MorphismName {
        MorphismName { letters, exchange }
    }

    pub fn plain(letters: Vec<Letter>) -> MorphismName {
        MorphismName::new(letters, false)
    }

    /// The letter exchange `E` on its own.
    pub fn exchange_only() -> MorphismName {
        MorphismName::new(Vec::new(), true)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn has_exchange(&self) -> bool {
        self.exchange
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn with_exchange(&self, exchange: bool) -> MorphismName {
        MorphismName::new(self.letters.clone(), exchange)
    }

    /// Name of the composition `self ∘ other` for plain names.
    pub fn concat(&self, other: &MorphismName) -> MorphismName {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        MorphismName::new(letters, other.exchange)
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    /// True when every letter is in `set`.
    pub fn within(&self, set: &[Letter]) -> bool {
        self.letters.iter().all(|l| set.contains(l))
    }

    pub fn has_latin(&self) -> bool {
        self.letters.iter().any(|l| l.is_latin())
    }

    pub fn has_greek(&self) -> bool {
        self.letters.iter().any(|l| l.is_greek())
    }

    pub fn repeat(&self, times: usize) -> MorphismName {
        MorphismName::new(self.letters.repeat(times), self.exchange)
    }

    pub fn render(&self, style: Style) -> String {
        if self.letters.is_empty() && self.exchange {
            return "E".to_string();
        }
        let mut out: String = self
            .letters
            .iter()
            .map(|&l| match style {
                Style::Ascii => l.ascii(),
                Style::Unicode => l.unicode(),
            })
            .collect();
        if self.exchange {
            out.push_str(".E");
        }
        out
    }

    fn require_plain(&self) -> Result<(), NameError> {
        if self.exchange {
            Err(NameError::ExchangeSuffix(self.to_string()))
        } else {
            Ok(())
        }
    }

    fn require_nonempty(&self) -> Result<(), NameError> {
        if self.letters.is_empty() {
            Err(NameError::Empty)
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for MorphismName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Ascii))
    }
}

impl FromStr for MorphismName {
    type Err = NameError;

    /// Accepts `[abABαβ]+` with an optional `.E` suffix, and the bare `E`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| NameError::Parse { input: s.to_string(), reason: reason.to_string() };
        if s == "E" {
            return Ok(MorphismName::exchange_only());
        }
        let (body, exchange) = match s.strip_suffix(".E") {
            Some(body) => (body, true),
            None => (s, false),
        };
        if body.is_empty() {
            return Err(err("no generator letters"));
        }
        let letters = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| err(&format!("unexpected character {c:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MorphismName::new(letters, exchange))
    }
}

impl Serialize for MorphismName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MorphismName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which rule family a rewrite used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    /// `α a^k β -> β b^k α`
    GreekOuter,
    /// `a α^k b -> b β^k a`
    LatinOuter,
}

/// One upward rewrite applied at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteStep {
    pub position: usize,
    pub rule: RuleFamily,
    pub k: usize,
}

/// Leftmost occurrence of `α a^k β` or `a α^k b`.
pub fn find_redex(letters: &[Letter]) -> Option<RewriteStep> {
    for (i, &first) in letters.iter().enumerate() {
        let (inner, last, rule) = match first {
            Letter::Alpha => (Letter::A, Letter::Beta, RuleFamily::GreekOuter),
            Letter::A => (Letter::Alpha, Letter::B, RuleFamily::LatinOuter),
            _ => continue,
        };
        let k = letters[i + 1..].iter().take_while(|&&l| l == inner).count();
        if letters.get(i + 1 + k) == Some(&last) {
            return Some(RewriteStep { position: i, rule, k });
        }
    }
    None
}

/// Rewrites a redex in place; `step` must come from [`find_redex`].
pub fn apply_step(letters: &mut [Letter], step: RewriteStep) {
    let (outer_first, inner, outer_last) = match step.rule {
        RuleFamily::GreekOuter => (Letter::Beta, Letter::B, Letter::Alpha),
        RuleFamily::LatinOuter => (Letter::B, Letter::Beta, Letter::A),
    };
    let i = step.position;
    letters[i] = outer_first;
    for l in &mut letters[i + 1..=i + step.k] {
        *l = inner;
    }
    letters[i + step.k + 1] = outer_last;
}

/// Normal form `N(w)`: the greatest name in the rewrite class of `w`.
///
/// Each rewrite raises the first letter it touches, so the loop climbs the
/// positionwise order and stops at the unique word without a redex.
pub fn normalize(name: &MorphismName) -> Result<MorphismName, NameError> {
    name.require_plain()?;
    Ok(MorphismName::plain(normalize_letters(name.letters())))
}

pub fn normalize_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut out = letters.to_vec();
    while let Some(step) = find_redex(&out) {
        apply_step(&mut out, step);
    }
    out
}

pub fn is_normalized(letters: &[Letter]) -> bool {
    find_redex(letters).is_none()
}

pub fn names_equal_as_morphisms(w: &MorphismName, v: &MorphismName) -> Result<bool, NameError> {
    Ok(normalize(w)? == normalize(v)?)
}

/// Letterwise `a <-> α`, `b <-> β`; the exchange suffix is kept.
pub fn apply_f(name: &MorphismName) -> MorphismName {
    MorphismName::new(name.letters.iter().map(|l| l.flip()).collect(), name.exchange)
}

/// Left cyclic shift `u_1 … u_{n-1} u_0`.
pub fn cyc(name: &MorphismName) -> Result<MorphismName, NameError> {
    name.require_nonempty()?;
    let mut letters = name.letters.clone();
    letters.rotate_left(1);
    Ok(MorphismName::new(letters, name.exchange))
}

/// Left cyclic shift that applies `F` to the letter moved to the end.
pub fn cyc_f(name: &MorphismName) -> Result<MorphismName, NameError> {
    let mut shifted = cyc(name)?;
    if let Some(last) = shifted.letters.last_mut() {
        *last = last.flip();
    }
    Ok(shifted)
}

/// How a morphism decomposes as a proper power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Power {
    NotPower,
    /// `φ_w = (φ_root)^exponent`, exponent >= 2.
    Pure {
        root: MorphismName,
        exponent: usize,
    },
    /// `φ_w` (or `φ_w ∘ E`) equals `(φ_root ∘ E)^exponent`, exponent >= 2.
    Exchange {
        root: MorphismName,
        exponent: usize,
    },
}

impl Power {
    pub fn is_power(&self) -> bool {
        !matches!(self, Power::NotPower)
    }
}

/// Decides whether the morphism named by `name` is a proper power of another
/// Sturmian morphism. Candidate roots are compared up to morphism equality.
///
/// Plain names are tested against `u^ℓ` (ℓ >= 2) and `(uF(u))^k` (k >= 1);
/// names with the exchange suffix against `(uF(u))^ℓ u` (ℓ >= 1).
pub fn is_power(name: &MorphismName) -> Power {
    let n = name.len();
    if n == 0 {
        return Power::NotPower;
    }
    let target = normalize_letters(name.letters());
    let pattern: Vec<bool> = name.letters().iter().map(|l| l.is_latin()).collect();

    let matches_word = |letters: &[Letter]| normalize_letters(letters) == target;

    if !name.has_exchange() {
        for exponent in 2..=n {
            if !n.is_multiple_of(exponent) {
                continue;
            }
            let root_len = n / exponent;
            let found = search_roots(&pattern[..root_len], |u| {
                let candidate: Vec<Letter> = u.repeat(exponent);
                shape_of(&candidate) == pattern && matches_word(&candidate)
            });
            if let Some(root) = found {
                return Power::Pure { root, exponent };
            }
        }
        for k in 1..=n / 2 {
            if !n.is_multiple_of(2 * k) {
                continue;
            }
            let root_len = n / (2 * k);
            let found = search_roots(&pattern[..root_len], |u| {
                let candidate = exchange_square(u).repeat(k);
                shape_of(&candidate) == pattern && matches_word(&candidate)
            });
            if let Some(root) = found {
                return Power::Exchange { root, exponent: 2 * k };
            }
        }
    } else {
        for l in 1..=n / 2 {
            if !n.is_multiple_of(2 * l + 1) {
                continue;
            }
            let root_len = n / (2 * l + 1);
            let found = search_roots(&pattern[..root_len], |u| {
                let mut candidate = exchange_square(u).repeat(l);
                candidate.extend_from_slice(u);
                shape_of(&candidate) == pattern && matches_word(&candidate)
            });
            if let Some(root) = found {
                return Power::Exchange { root, exponent: 2 * l + 1 };
            }
        }
    }
    Power::NotPower
}

fn shape_of(letters: &[Letter]) -> Vec<bool> {
    letters.iter().map(|l| l.is_latin()).collect()
}

fn exchange_square(u: &[Letter]) -> Vec<Letter> {
    u.iter().copied().chain(u.iter().map(|l| l.flip())).collect()
}

/// Tries every word with the given Latin/Greek shape; returns the normal form
/// of the first accepted one.
fn search_roots(shape: &[bool], mut accept: impl FnMut(&[Letter]) -> bool) -> Option<MorphismName> {
    let len = shape.len();
    let mut word = vec![Letter::A; len];
    for mask in 0u64..(1u64 << len) {
        for (i, &latin) in shape.iter().enumerate() {
            word[i] = Letter::from_class_rank(latin, ((mask >> (len - 1 - i)) & 1) as u8);
        }
        if accept(&word) {
            return Some(MorphismName::plain(normalize_letters(&word)));
        }
    }
    None
}

/// All words over the four generators of length `len`, in lexicographic
/// order of the ASCII rendering.
pub fn all_words(len: usize) -> impl Iterator<Item = Vec<Letter>> {
    let total = 4usize.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut word = vec![Letter::A; len];
        for slot in word.iter_mut().rev() {
            *slot = [Letter::Alpha, Letter::Beta, Letter::A, Letter::B][code % 4];
            code /= 4;
        }
        word
    })
}
