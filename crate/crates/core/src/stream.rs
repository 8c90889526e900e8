//! Lazily extended prefixes of infinite binary words.
//!
//! A [`WordStream`] owns the letters generated so far and a boxed
//! [`Generator`] that knows how to append more. Letters are the bytes `0` and
//! `1`. Every stream has a length cap; asking for more than the cap is a
//! budget error rather than an unbounded computation.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default cap on generated letters per stream.
pub const DEFAULT_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("stream {label} needs {requested} letters but its budget is {budget}")]
    Budget { label: String, requested: usize, budget: usize },
    #[error("stream {label} ended after {len} letters")]
    Exhausted { label: String, len: usize },
    #[error("prefix of length {prefix_len} has a third return word {word} (input is not Sturmian)")]
    ThirdReturnWord { prefix_len: usize, word: String },
    #[error("stream is not in the image of {generator} (position {position})")]
    NotInImage { generator: String, position: usize },
}

/// Source of letters for a [`WordStream`].
///
/// `extend` sees the letters already generated and must append until `buf`
/// holds at least `target` letters, or fail.
pub trait Generator: Send {
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError>;
    fn label(&self) -> String;
    fn box_clone(&self) -> Box<dyn Generator>;
}

pub struct WordStream {
    buf: Vec<u8>,
    generator: Box<dyn Generator>,
    budget: usize,
}

impl WordStream {
    pub fn new(generator: Box<dyn Generator>) -> WordStream {
        WordStream::with_budget(generator, DEFAULT_BUDGET)
    }

    pub fn with_budget(generator: Box<dyn Generator>, budget: usize) -> WordStream {
        WordStream { buf: Vec::new(), generator, budget }
    }

    /// Starts from letters that are already known to be a prefix.
    pub fn seeded(generator: Box<dyn Generator>, seed: Vec<u8>, budget: usize) -> WordStream {
        WordStream { buf: seed, generator, budget }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
    }

    pub fn label(&self) -> String {
        self.generator.label()
    }

    /// Letters generated so far.
    pub fn generated(&self) -> &[u8] {
        &self.buf
    }

    pub fn ensure(&mut self, len: usize) -> Result<(), StreamError> {
        if self.buf.len() >= len {
            return Ok(());
        }
        if len > self.budget {
            return Err(StreamError::Budget { label: self.label(), requested: len, budget: self.budget });
        }
        self.generator.extend(&mut self.buf, len)?;
        debug_assert!(self.buf.len() >= len);
        Ok(())
    }

    pub fn prefix(&mut self, len: usize) -> Result<&[u8], StreamError> {
        self.ensure(len)?;
        Ok(&self.buf[..len])
    }

    pub fn letter(&mut self, index: usize) -> Result<u8, StreamError> {
        self.ensure(index + 1)?;
        Ok(self.buf[index])
    }

    /// Grows the buffer geometrically toward `len`, stopping at the budget.
    /// Returns the number of letters available afterwards.
    pub fn grow_toward(&mut self, len: usize) -> Result<usize, StreamError> {
        let target = len.min(self.budget);
        self.ensure(target)?;
        Ok(self.buf.len())
    }
}

impl Clone for WordStream {
    fn clone(&self) -> Self {
        WordStream { buf: self.buf.clone(), generator: self.generator.box_clone(), budget: self.budget }
    }
}

impl fmt::Debug for WordStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordStream")
            .field("label", &self.label())
            .field("generated", &self.buf.len())
            .field("budget", &self.budget)
            .finish()
    }
}

/// Renders letters as a `0`/`1` string.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Parses a `0`/`1` string.
pub fn parse_bits(s: &str) -> Option<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

pub fn exchange_bits(bits: &[u8]) -> Vec<u8> {
    bits.iter().map(|&b| 1 - b).collect()
}

/// True when `x` equals `y` or its letter exchange.
pub fn equal_up_to_exchange(x: &[u8], y: &[u8]) -> bool {
    x.len() == y.len() && (x == y || x.iter().zip(y).all(|(a, b)| a != b))
}

/// Letters produced by a function of the index.
#[derive(Clone)]
pub struct IndexedGenerator {
    label: String,
    letter: Arc<dyn Fn(usize) -> u8 + Send + Sync>,
}

impl IndexedGenerator {
    pub fn new(label: impl Into<String>, letter: impl Fn(usize) -> u8 + Send + Sync + 'static) -> Self {
        IndexedGenerator { label: label.into(), letter: Arc::new(letter) }
    }
}

impl Generator for IndexedGenerator {
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError> {
        while buf.len() < target {
            let i = buf.len();
            buf.push((self.letter)(i));
        }
        Ok(())
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn box_clone(&self) -> Box<dyn Generator> {
        Box::new(self.clone())
    }
}

/// `prefix` followed by `period` repeated forever.
pub fn eventually_periodic(prefix: Vec<u8>, period: Vec<u8>) -> WordStream {
    assert!(!period.is_empty(), "period must be nonempty");
    let label = format!("{}({})^w", bits_to_string(&prefix), bits_to_string(&period));
    WordStream::new(Box::new(IndexedGenerator::new(label, move |i| {
        if i < prefix.len() {
            prefix[i]
        } else {
            period[(i - prefix.len()) % period.len()]
        }
    })))
}

/// Image of a stream under a binary morphism given by its two letter images.
#[derive(Clone)]
pub struct ImageGenerator {
    images: [Vec<u8>; 2],
    source: WordStream,
    consumed: usize,
    label: String,
}

impl ImageGenerator {
    pub fn new(images: [Vec<u8>; 2], source: WordStream, label: impl Into<String>) -> Self {
        assert!(!images[0].is_empty() && !images[1].is_empty(), "erasing morphism");
        ImageGenerator { images, source, consumed: 0, label: label.into() }
    }
}

impl Generator for ImageGenerator {
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError> {
        while buf.len() < target {
            let x = self.source.letter(self.consumed)?;
            self.consumed += 1;
            buf.extend_from_slice(&self.images[x as usize]);
        }
        Ok(())
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn box_clone(&self) -> Box<dyn Generator> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_stream_and_budget() {
        let mut s = eventually_periodic(vec![1, 1], vec![0]);
        assert_eq!(s.prefix(5).unwrap(), &[1, 1, 0, 0, 0]);
        s.set_budget(10);
        assert!(matches!(s.ensure(11), Err(StreamError::Budget { .. })));
        assert_eq!(s.grow_toward(1000).unwrap(), 10);
    }

    #[test]
    fn image_of_stream() {
        let src = eventually_periodic(vec![], vec![0, 1]);
        let mut img = WordStream::new(Box::new(ImageGenerator::new([vec![0], vec![0, 1]], src, "b(01^w)")));
        assert_eq!(bits_to_string(img.prefix(6).unwrap()), "001001");
        let mut copy = img.clone();
        assert_eq!(copy.prefix(9).unwrap(), img.prefix(9).unwrap());
    }

    #[test]
    fn exchange_helpers() {
        assert!(equal_up_to_exchange(&[0, 1, 1], &[1, 0, 0]));
        assert!(equal_up_to_exchange(&[0, 1, 1], &[0, 1, 1]));
        assert!(!equal_up_to_exchange(&[0, 1, 1], &[1, 0, 1]));
        assert_eq!(parse_bits("0110"), Some(vec![0, 1, 1, 0]));
        assert_eq!(parse_bits("012"), None);
    }
}
