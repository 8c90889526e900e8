//! Concrete binary morphisms built from names.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::name::{apply_f, Letter, MorphismName};
use crate::stream::{bits_to_string, Generator, StreamError, WordStream, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("morphism {0} is not primitive")]
    NotPrimitive(String),
    #[error("operation needs a nonempty name")]
    Empty,
    #[error("{name} has no fixed point starting with {start}")]
    InvalidStart { name: String, start: u8 },
}

/// A morphism on `{0,1}*` given by the images of `0` and `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMorphism {
    pub image0: Vec<u8>,
    pub image1: Vec<u8>,
}

/// Column `x` counts the letters of the image of `x`: `m[l][x] = |φ(x)|_l`.
///
/// With this orientation `matrix(f ∘ g) = matrix(f) · matrix(g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncidenceMatrix(pub [[u64; 2]; 2]);

impl IncidenceMatrix {
    pub fn mul(&self, other: &IncidenceMatrix) -> IncidenceMatrix {
        let (a, b) = (self.0, other.0);
        let mut out = [[0u64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        IncidenceMatrix(out)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().flatten().all(|&x| x > 0)
    }

    /// A nonnegative 2×2 matrix is primitive iff its square is positive.
    pub fn is_primitive(&self) -> bool {
        self.mul(self).is_positive()
    }

    pub fn trace(&self) -> i128 {
        (self.0[0][0] + self.0[1][1]) as i128
    }

    pub fn determinant(&self) -> i128 {
        self.0[0][0] as i128 * self.0[1][1] as i128 - self.0[0][1] as i128 * self.0[1][0] as i128
    }
}

impl BinaryMorphism {
    pub fn new(image0: Vec<u8>, image1: Vec<u8>) -> BinaryMorphism {
        BinaryMorphism { image0, image1 }
    }

    pub fn identity() -> BinaryMorphism {
        BinaryMorphism::new(vec![0], vec![1])
    }

    pub fn exchange() -> BinaryMorphism {
        BinaryMorphism::new(vec![1], vec![0])
    }

    pub fn generator(letter: Letter) -> BinaryMorphism {
        match letter {
            Letter::A => BinaryMorphism::new(vec![0], vec![1, 0]),
            Letter::B => BinaryMorphism::new(vec![0], vec![0, 1]),
            Letter::Alpha => BinaryMorphism::new(vec![0, 1], vec![1]),
            Letter::Beta => BinaryMorphism::new(vec![1, 0], vec![1]),
        }
    }

    pub fn image(&self, letter: u8) -> &[u8] {
        if letter == 0 {
            &self.image0
        } else {
            &self.image1
        }
    }

    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len() * 2);
        for &x in word {
            out.extend_from_slice(self.image(x));
        }
        out
    }

    pub fn matrix(&self) -> IncidenceMatrix {
        let count = |w: &[u8], l: u8| w.iter().filter(|&&x| x == l).count() as u64;
        IncidenceMatrix([
            [count(&self.image0, 0), count(&self.image1, 0)],
            [count(&self.image0, 1), count(&self.image1, 1)],
        ])
    }

    pub fn images(&self) -> [Vec<u8>; 2] {
        [self.image0.clone(), self.image1.clone()]
    }
}

impl fmt::Display for BinaryMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0->{}, 1->{}", bits_to_string(&self.image0), bits_to_string(&self.image1))
    }
}

/// `(f ∘ g)(x) = f(g(x))`.
pub fn compose(f: &BinaryMorphism, g: &BinaryMorphism) -> BinaryMorphism {
    BinaryMorphism::new(f.apply(&g.image0), f.apply(&g.image1))
}

/// `φ_{u_0} ∘ φ_{u_1} ∘ … ∘ φ_{u_{n-1}}`, then `∘ E` for the exchange suffix.
pub fn from_name(name: &MorphismName) -> BinaryMorphism {
    let mut acc = BinaryMorphism::identity();
    for &letter in name.letters() {
        acc = compose(&acc, &BinaryMorphism::generator(letter));
    }
    if name.has_exchange() {
        acc = compose(&acc, &BinaryMorphism::exchange());
    }
    acc
}

/// The plain name whose morphism is the square of `name`'s.
pub fn square_name(name: &MorphismName) -> MorphismName {
    if name.has_exchange() {
        name.with_exchange(false).concat(&apply_f(&name.with_exchange(false)))
    } else {
        name.concat(name)
    }
}

/// Primitive iff the letters contain both a Latin and a Greek generator.
/// Names with the exchange suffix are judged by their square `wF(w)`.
pub fn is_primitive(name: &MorphismName) -> Result<bool, MorphismError> {
    if name.has_exchange() {
        let sq = square_name(name);
        return Ok(sq.has_latin() && sq.has_greek());
    }
    if name.is_empty() {
        return Err(MorphismError::Empty);
    }
    Ok(name.has_latin() && name.has_greek())
}

/// Letters `x` such that the fixed point of `name` starting with `x` exists.
pub fn fixed_point_starts(name: &MorphismName) -> Result<BTreeSet<u8>, MorphismError> {
    if !is_primitive(name)? {
        return Err(MorphismError::NotPrimitive(name.to_string()));
    }
    let two_fixed = name.within(&[Letter::A, Letter::Alpha]);
    if name.has_exchange() && two_fixed {
        return Ok(BTreeSet::new());
    }
    if !name.has_exchange() && two_fixed {
        return Ok([0, 1].into_iter().collect());
    }
    let m = from_name(name);
    Ok([0u8, 1].into_iter().filter(|&x| m.image(x).first() == Some(&x)).collect())
}

/// The fixed point of `name` that starts with `start`.
pub fn fixed_point(name: &MorphismName, start: u8) -> Result<WordStream, MorphismError> {
    fixed_point_with_budget(name, start, DEFAULT_BUDGET)
}

pub fn fixed_point_with_budget(name: &MorphismName, start: u8, budget: usize) -> Result<WordStream, MorphismError> {
    if !fixed_point_starts(name)?.contains(&start) {
        return Err(MorphismError::InvalidStart { name: name.to_string(), start });
    }
    let label = format!("fix({name},{start})");
    Ok(WordStream::with_budget(Box::new(FixedPointGenerator::new(from_name(name), start, label)), budget))
}

/// Expands `u = φ(u_0) φ(u_1) …` letter by letter.
#[derive(Clone)]
pub struct FixedPointGenerator {
    morphism: BinaryMorphism,
    start: u8,
    expanded: usize,
    label: String,
}

impl FixedPointGenerator {
    /// `morphism(start)` must begin with `start`; a length-one image is
    /// replaced by a power of the morphism.
    pub fn new(morphism: BinaryMorphism, start: u8, label: String) -> Self {
        let mut m = morphism;
        let mut guard = 0;
        while m.image(start).len() < 2 && guard < 8 {
            m = compose(&m, &m);
            guard += 1;
        }
        FixedPointGenerator { morphism: m, start, expanded: 0, label }
    }
}

impl Generator for FixedPointGenerator {
    fn extend(&mut self, buf: &mut Vec<u8>, target: usize) -> Result<(), StreamError> {
        if buf.is_empty() {
            buf.extend_from_slice(self.morphism.image(self.start));
            self.expanded = 1;
        }
        while buf.len() < target {
            if self.expanded >= buf.len() {
                return Err(StreamError::Exhausted { label: self.label.clone(), len: buf.len() });
            }
            let x = buf[self.expanded];
            self.expanded += 1;
            let image = self.morphism.image(x).to_vec();
            buf.extend_from_slice(&image);
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
    use crate::name::all_words;

    fn n(s: &str) -> MorphismName {
        s.parse().unwrap()
    }

    fn bm(a: &str, b: &str) -> BinaryMorphism {
        let p = |s: &str| crate::stream::parse_bits(s).unwrap();
        BinaryMorphism::new(p(a), p(b))
    }

    #[test]
    fn from_name_examples() {
        assert_eq!(from_name(&n("bB")), bm("010", "01"));
        assert_eq!(from_name(&n("b.E")), bm("01", "0"));
        assert_eq!(from_name(&n("a")), bm("0", "10"));
        assert_eq!(from_name(&n("E")), BinaryMorphism::exchange());
    }

    #[test]
    fn compose_examples() {
        let b = BinaryMorphism::generator(Letter::B);
        let beta = BinaryMorphism::generator(Letter::Beta);
        assert_eq!(compose(&b, &beta), bm("010", "01"));
        assert_eq!(compose(&BinaryMorphism::identity(), &b), b);
        let e = BinaryMorphism::exchange();
        assert_eq!(compose(&e, &e), BinaryMorphism::identity());
    }

    #[test]
    fn greek_generators_are_exchange_conjugates() {
        let e = BinaryMorphism::exchange();
        for (greek, latin) in [(Letter::Alpha, Letter::A), (Letter::Beta, Letter::B)] {
            let conj = compose(&e, &compose(&BinaryMorphism::generator(latin), &e));
            assert_eq!(BinaryMorphism::generator(greek), conj);
        }
    }

    #[test]
    fn exchange_relations_on_short_names() {
        let e = BinaryMorphism::exchange();
        for len in 1..=5 {
            for w in all_words(len) {
                let name = MorphismName::plain(w);
                let phi = from_name(&name);
                assert_eq!(compose(&e, &compose(&phi, &e)), from_name(&apply_f(&name)));
                let tau = from_name(&name.with_exchange(true));
                assert_eq!(compose(&tau, &tau), from_name(&square_name(&name.with_exchange(true))));
            }
        }
    }

    #[test]
    fn conjugacy_of_a_and_b() {
        let a = BinaryMorphism::generator(Letter::A);
        let b = BinaryMorphism::generator(Letter::B);
        let alpha = BinaryMorphism::generator(Letter::Alpha);
        let beta = BinaryMorphism::generator(Letter::Beta);
        for len in 0..=12usize {
            for code in 0..(1u32 << len) {
                let x: Vec<u8> = (0..len).map(|i| ((code >> i) & 1) as u8).collect();
                let mut left = vec![0];
                left.extend(a.apply(&x));
                let mut right = b.apply(&x);
                right.push(0);
                assert_eq!(left, right);
                let mut left = vec![1];
                left.extend(alpha.apply(&x));
                let mut right = beta.apply(&x);
                right.push(1);
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn primitivity_examples_and_matrix_agreement() {
        assert!(is_primitive(&n("BAaaA")).unwrap());
        assert!(!is_primitive(&n("aaa")).unwrap());
        assert!(is_primitive(&n("bB")).unwrap());
        assert!(is_primitive(&n("b.E")).unwrap());
        assert!(!is_primitive(&n("E")).unwrap());
        assert_eq!(is_primitive(&MorphismName::plain(vec![])), Err(MorphismError::Empty));
        for len in 1..=6 {
            for w in all_words(len) {
                let name = MorphismName::plain(w);
                assert_eq!(is_primitive(&name).unwrap(), from_name(&name).matrix().is_primitive(), "{name}");
            }
        }
    }

    #[test]
    fn fixed_point_starts_examples() {
        assert_eq!(fixed_point_starts(&n("aA")).unwrap(), [0, 1].into_iter().collect());
        assert_eq!(fixed_point_starts(&n("bbBa")).unwrap(), [0].into_iter().collect());
        assert!(fixed_point_starts(&n("aA.E")).unwrap().is_empty());
        assert!(matches!(fixed_point_starts(&n("ab")), Err(MorphismError::NotPrimitive(_))));
    }

    #[test]
    fn fixed_point_examples() {
        let mut fib = fixed_point(&n("b.E"), 0).unwrap();
        assert_eq!(bits_to_string(fib.prefix(13).unwrap()), "0100101001001");
        let mut sq = fixed_point(&n("bB"), 0).unwrap();
        assert_eq!(bits_to_string(sq.prefix(6).unwrap()), "010010");
        let mut u0 = fixed_point(&n("aA"), 0).unwrap();
        let mut u1 = fixed_point(&n("aA"), 1).unwrap();
        assert_ne!(u0.prefix(20).unwrap(), u1.prefix(20).unwrap());
        assert!(matches!(fixed_point(&n("bbBa"), 1), Err(MorphismError::InvalidStart { .. })));
    }

    #[test]
    fn fixed_points_are_fixed() {
        for len in 1..=5 {
            for w in all_words(len) {
                let name = MorphismName::plain(w);
                if !is_primitive(&name).unwrap() {
                    continue;
                }
                let m = from_name(&name);
                for start in fixed_point_starts(&name).unwrap() {
                    let mut s = fixed_point(&name, start).unwrap();
                    let head = s.prefix(200).unwrap().to_vec();
                    let image = m.apply(&head);
                    let longer = s.prefix(image.len()).unwrap();
                    assert_eq!(image, longer, "{name} from {start}");
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn matrix_is_a_homomorphism(
                f in prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..8),
                g in prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..8),
                fe in any::<bool>(),
                ge in any::<bool>(),
            ) {
                let f = from_name(&MorphismName::new(f, fe));
                let g = from_name(&MorphismName::new(g, ge));
                prop_assert_eq!(compose(&f, &g).matrix(), f.matrix().mul(&g.matrix()));
            }

            #[test]
            fn composition_is_associative(
                f in prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..6),
                g in prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..6),
                h in prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..6),
            ) {
                let (f, g, h) = (
                    from_name(&MorphismName::plain(f)),
                    from_name(&MorphismName::plain(g)),
                    from_name(&MorphismName::plain(h)),
                );
                prop_assert_eq!(compose(&f, &compose(&g, &h)), compose(&compose(&f, &g), &h));
            }
        }
    }
}
