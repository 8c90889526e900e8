//! Return words, derivated words and related statistics of infinite words.
//!
//! Codings follow the first-occurrence convention: the return word that
//! appears first is coded `0`, so every derivated word starts with `0`.
//! Derivated words are compared up to the letter exchange elsewhere in the
//! crate.

use std::collections::HashSet;

use thiserror::Error;

use crate::morphism::BinaryMorphism;
use crate::name::{Letter, MorphismName};
use crate::stream::{bits_to_string, Generator, StreamError, WordStream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordsError {
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("prefix length must be at least 1")]
    EmptyPrefix,
    #[error("stream is not in the image of phi_{generator} (first failure at source position {position})")]
    NotInImage { generator: char, position: usize },
}

/// All `i <= horizon - |w|` with `stream[i..i+|w|) == w`.
pub fn occurrences(stream: &mut WordStream, w: &[u8], horizon: usize) -> Result<Vec<usize>, WordsError> {
    let text = stream.prefix(horizon)?;
    if w.len() > text.len() {
        return Ok(Vec::new());
    }
    Ok((0..=text.len() - w.len()).filter(|&i| &text[i..i + w.len()] == w).collect())
}

/// First occurrence of `pattern` at a position `>= from`, growing the stream
/// geometrically as needed.
pub(crate) fn find_from(stream: &mut WordStream, pattern: &[u8], from: usize) -> Result<usize, StreamError> {
    let len = pattern.len();
    let mut i = from;
    loop {
        let avail = stream.generated().len();
        if i + len > avail {
            let want = (avail * 2).max(i + len).max(64);
            let got = stream.grow_toward(want)?;
            if got < i + len {
                return Err(StreamError::Budget { label: stream.label(), requested: i + len, budget: stream.budget() });
            }
            continue;
        }
        let buf = stream.generated();
        while i + len <= buf.len() {
            if &buf[i..i + len] == pattern {
                return Ok(i);
            }
            i += 1;
        }
    }
}

/// The prefix, its return words in order of first occurrence, and the
/// coding of a prefix of the stream by those return words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnDecomposition {
    pub prefix: Vec<u8>,
    pub return_words: [Vec<u8>; 2],
    pub coding: Vec<u8>,
    /// Occurrences of the prefix; `occurrences.len() == coding.len() + 1`.
    pub occurrences: Vec<usize>,
}

impl ReturnDecomposition {
    /// Concatenation of the coded return words.
    pub fn reconstruct(&self) -> Vec<u8> {
        self.coding.iter().flat_map(|&s| self.return_words[s as usize].iter().copied()).collect()
    }
}

/// Assigns codes to return words in order of first appearance.
#[derive(Debug, Clone, Default)]
struct ReturnTable {
    words: Vec<Vec<u8>>,
}

impl ReturnTable {
    fn code(&mut self, word: &[u8], prefix_len: usize) -> Result<u8, StreamError> {
        if let Some(i) = self.words.iter().position(|r| r == word) {
            return Ok(i as u8);
        }
        if self.words.len() == 2 {
            return Err(StreamError::ThirdReturnWord { prefix_len, word: bits_to_string(word) });
        }
        self.words.push(word.to_vec());
        Ok((self.words.len() - 1) as u8)
    }
}

/// Codes at least `min_slots` return words of the prefix of length
/// `prefix_len`, continuing until both return words have been seen.
pub fn decompose(
    stream: &mut WordStream,
    prefix_len: usize,
    min_slots: usize,
) -> Result<ReturnDecomposition, WordsError> {
    if prefix_len == 0 {
        return Err(WordsError::EmptyPrefix);
    }
    let prefix = stream.prefix(prefix_len)?.to_vec();
    let mut table = ReturnTable::default();
    let mut coding = Vec::with_capacity(min_slots);
    let mut occ = vec![0usize];
    while coding.len() < min_slots || table.words.len() < 2 {
        let last = *occ.last().unwrap();
        let next = find_from(stream, &prefix, last + 1)?;
        let code = table.code(&stream.generated()[last..next], prefix_len)?;
        coding.push(code);
        occ.push(next);
    }
    let mut words = table.words.into_iter();
    let return_words = [words.next().unwrap(), words.next().unwrap()];
    Ok(ReturnDecomposition { prefix, return_words, coding, occurrences: occ })
}

/// A derivated word together with the decomposition that produced it.
#[derive(Debug, Clone)]
pub struct DerivationRecord {
    pub source: String,
    pub decomposition: ReturnDecomposition,
    /// The derivated word; extends by parsing further into a copy of the source.
    pub derivated: WordStream,
    pub certificate: Option<MorphismName>,
}

impl DerivationRecord {
    pub fn with_certificate(mut self, name: MorphismName) -> Self {
        self.certificate = Some(name);
        self
    }
}

/// Derivated word of `stream` with respect to its prefix of length
/// `prefix_len`; at least `out_len` letters are coded eagerly.
pub fn derivate(stream: &mut WordStream, prefix_len: usize, out_len: usize) -> Result<DerivationRecord, WordsError> {
    let decomposition = decompose(stream, prefix_len, out_len)?;
    let generator = DerivatedGenerator {
        source: stream.clone(),
        prefix: decomposition.prefix.clone(),
        table: ReturnTable { words: decomposition.return_words.to_vec() },
        position: *decomposition.occurrences.last().unwrap(),
    };
    let derivated = WordStream::seeded(Box::new(generator), decomposition.coding.clone(), stream.budget());
    Ok(DerivationRecord { source: stream.label(), decomposition, derivated, certificate: None })
}

#[derive(Clone)]
struct DerivatedGenerator {
    source: WordStream,
    prefix: Vec<u8>,
    table: ReturnTable,
    position: usize,
}

impl Generator for DerivatedGenerator {
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError> {
        while buf.len() < target {
            let next = find_from(&mut self.source, &self.prefix, self.position + 1)?;
            let code = self.table.code(&self.source.generated()[self.position..next], self.prefix.len())?;
            buf.push(code);
            self.position = next;
        }
        Ok(())
    }

    fn label(&self) -> String {
        format!("der({},{})", self.source.label(), self.prefix.len())
    }

    fn box_clone(&self) -> Box<dyn Generator> {
        Box::new(self.clone())
    }
}

/// Return words of a prefix: both of them, or the only one seen before the
/// stream budget ran out.
fn return_words_of_prefix(stream: &mut WordStream, prefix_len: usize) -> Result<Vec<Vec<u8>>, WordsError> {
    let prefix = stream.prefix(prefix_len)?.to_vec();
    let mut table = ReturnTable::default();
    let mut last = 0;
    while table.words.len() < 2 {
        let next = match find_from(stream, &prefix, last + 1) {
            Ok(next) => next,
            Err(StreamError::Budget { .. }) if !table.words.is_empty() => break,
            Err(e) => return Err(e.into()),
        };
        table.code(&stream.generated()[last..next], prefix_len)?;
        last = next;
    }
    Ok(table.words)
}

/// Letter following the prefix when the occurrence starts return word `r`:
/// `(r · prefix)[|prefix|]`.
fn letter_after(r: &[u8], prefix: &[u8]) -> u8 {
    let l = prefix.len();
    if l < r.len() {
        r[l]
    } else {
        prefix[l - r.len()]
    }
}

/// Lengths `1 <= l <= max_len` whose prefix is right special.
///
/// A prefix is followed, at each of its occurrences, by a letter fixed by the
/// return word starting there, so with exactly two return words the test is
/// exact. Occurrences only change at right special lengths, which lets the
/// return words be reused in between.
pub fn right_special_prefixes(stream: &mut WordStream, max_len: usize) -> Result<Vec<usize>, WordsError> {
    let mut found = Vec::new();
    let mut cached: Option<Vec<Vec<u8>>> = None;
    for len in 1..=max_len {
        let returns = match cached.take() {
            Some(r) => r,
            None => match return_words_of_prefix(stream, len) {
                Ok(r) => r,
                Err(WordsError::Stream(StreamError::ThirdReturnWord { .. })) => {
                    return right_special_by_window(stream, len, max_len, found);
                }
                Err(e) => return Err(e),
            },
        };
        let prefix = stream.prefix(len)?;
        let special = returns.len() == 2 && letter_after(&returns[0], prefix) != letter_after(&returns[1], prefix);
        if special {
            found.push(len);
        } else {
            cached = Some(returns);
        }
    }
    Ok(found)
}

/// Window test for words with more than two return words: both `p0` and
/// `p1` must occur inside a generated prefix.
fn right_special_by_window(
    stream: &mut WordStream,
    from: usize,
    max_len: usize,
    mut found: Vec<usize>,
) -> Result<Vec<usize>, WordsError> {
    let window = stream.grow_toward(1 << 16)?;
    let text = stream.generated()[..window].to_vec();
    for len in from..=max_len {
        let prefix = &text[..len];
        let mut seen = [false; 2];
        for i in 0..window.saturating_sub(len) {
            if &text[i..i + len] == prefix {
                seen[text[i + len] as usize] = true;
            }
        }
        if seen[0] && seen[1] {
            found.push(len);
        }
    }
    Ok(found)
}

fn distinct_factor_counts(text: &[u8], max_n: usize) -> Vec<usize> {
    (0..=max_n)
        .map(|n| {
            if n > text.len() {
                return 0;
            }
            text.windows(n.max(1))
                .take(if n == 0 { 1 } else { usize::MAX })
                .map(|w| if n == 0 { &w[..0] } else { w })
                .collect::<HashSet<_>>()
                .len()
        })
        .collect()
}

/// Number of distinct factors of each length `0..=max_n`.
///
/// Counted on a prefix of length at least `4·(max_n + g)`, `g` the longest
/// return word of the prefix of length `max_n`; the window is doubled until
/// the counts stop changing.
pub fn factor_complexity(stream: &mut WordStream, max_n: usize) -> Result<Vec<usize>, WordsError> {
    let longest_return = match return_words_of_prefix(stream, max_n.max(1)) {
        Ok(r) => r.iter().map(Vec::len).max().unwrap_or(1),
        Err(WordsError::Stream(StreamError::ThirdReturnWord { .. })) => 64,
        Err(e) => return Err(e),
    };
    let mut window = (4 * (max_n + longest_return)).max(64);
    loop {
        let small = stream.grow_toward(window)?;
        let counts = distinct_factor_counts(&stream.generated()[..small], max_n);
        let large = stream.grow_toward(2 * window)?;
        if large == small {
            return Ok(counts);
        }
        let counts_large = distinct_factor_counts(&stream.generated()[..large], max_n);
        if counts == counts_large {
            return Ok(counts);
        }
        window *= 2;
    }
}

/// The preimage `u'` with `stream = φ_generator(u')`.
///
/// Membership in the image is checked on the first `probe` letters of the
/// source; later failures surface as stream errors when the preimage is
/// extended.
pub fn desubstitute(stream: &WordStream, generator: Letter) -> Result<WordStream, WordsError> {
    desubstitute_checked(stream, generator, 256)
}

pub fn desubstitute_checked(stream: &WordStream, generator: Letter, probe: usize) -> Result<WordStream, WordsError> {
    let mut gen = DesubstitutionGenerator {
        source: stream.clone(),
        morphism: BinaryMorphism::generator(generator),
        letter: generator,
        position: 0,
    };
    let mut check = gen.clone();
    let mut buf = Vec::new();
    let avail = check.source.grow_toward(probe)?;
    // leave one letter of lookahead inside the probed prefix
    while check.position + 1 < avail {
        let target = buf.len() + 1;
        match check.extend(&mut buf, target) {
            Ok(()) => {}
            Err(StreamError::NotInImage { position, .. }) => {
                return Err(WordsError::NotInImage { generator: generator.unicode(), position });
            }
            Err(e) => return Err(e.into()),
        }
    }
    gen.position = check.position;
    Ok(WordStream::seeded(Box::new(gen), buf, stream.budget()))
}

#[derive(Clone)]
struct DesubstitutionGenerator {
    source: WordStream,
    morphism: BinaryMorphism,
    letter: Letter,
    position: usize,
}

impl DesubstitutionGenerator {
    fn matches_at(&mut self, image: &[u8]) -> Result<bool, StreamError> {
        for (k, &x) in image.iter().enumerate() {
            if self.source.letter(self.position + k)? != x {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Generator for DesubstitutionGenerator {
    /// Longest-match parsing; for the four generators the images form a code
    /// in which the longer image wins whenever both match.
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError> {
        while buf.len() < target {
            let (long, short) =
                if self.morphism.image0.len() >= self.morphism.image1.len() { (0u8, 1u8) } else { (1, 0) };
            let long_image = self.morphism.image(long).to_vec();
            let short_image = self.morphism.image(short).to_vec();
            if self.matches_at(&long_image)? {
                buf.push(long);
                self.position += long_image.len();
            } else if self.matches_at(&short_image)? {
                buf.push(short);
                self.position += short_image.len();
            } else {
                return Err(StreamError::NotInImage {
                    generator: self.letter.unicode().to_string(),
                    position: self.position,
                });
            }
        }
        Ok(())
    }

    fn label(&self) -> String {
        format!("desub_{}({})", self.letter.ascii(), self.source.label())
    }

    fn box_clone(&self) -> Box<dyn Generator> {
        Box::new(self.clone())
    }
}
