use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_integer::Integer;
use regex::Regex;
use serde::{Serialize, Serializer};

use super::MechanicalError;

/// `(p + q√d) / r` with integer `p, q, r` and square-free `d`.
///
/// Canonical form: `r > 0`, `gcd(p, q, r) = 1`, `d` square-free, and
/// rational values stored with `q = 0, d = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    p: i128,
    q: i128,
    r: i128,
    d: i128,
}

/// Largest `s` with `s² | d`.
fn square_part(d: i128) -> i128 {
    let (mut s, mut rest, mut k) = (1, d, 2);
    while k * k <= rest {
        while rest % (k * k) == 0 {
            rest /= k * k;
            s *= k;
        }
        k += 1;
    }
    s
}

impl QuadraticNumber {
    pub fn new(p: i128, q: i128, d: i128, r: i128) -> Result<Self, MechanicalError> {
        if r == 0 {
            return Err(MechanicalError::Domain("zero denominator".into()));
        }
        if d < 0 || (d == 0 && q != 0) {
            return Err(MechanicalError::Domain(format!("cannot take sqrt({d})")));
        }
        Ok(Self::canonical(p, q, d, r))
    }

    pub fn integer(n: i128) -> Self {
        QuadraticNumber { p: n, q: 0, r: 1, d: 1 }
    }

    pub fn rational(p: i128, r: i128) -> Result<Self, MechanicalError> {
        Self::new(p, 0, 1, r)
    }

    fn canonical(mut p: i128, mut q: i128, mut d: i128, mut r: i128) -> Self {
        if q != 0 && d > 1 {
            let s = square_part(d);
            q *= s;
            d /= s * s;
        }
        if q == 0 || d <= 1 {
            p += if d == 1 { q } else { 0 };
            q = 0;
            d = 1;
        }
        if r < 0 {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if g > 1 {
            p /= g;
            q /= g;
            r /= g;
        }
        QuadraticNumber { p, q, r, d }
    }

    pub fn parts(&self) -> (i128, i128, i128, i128) {
        (self.p, self.q, self.d, self.r)
    }

    pub fn is_rational(&self) -> bool {
        self.q == 0
    }

    pub fn radicand(&self) -> Option<i128> {
        (!self.is_rational()).then_some(self.d)
    }

    fn common_radicand(&self, other: &Self) -> Result<i128, MechanicalError> {
        match (self.radicand(), other.radicand()) {
            (Some(a), Some(b)) if a != b => Err(MechanicalError::MixedRadicals(a, b)),
            (Some(a), _) | (_, Some(a)) => Ok(a),
            (None, None) => Ok(1),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, MechanicalError> {
        let d = self.common_radicand(o)?;
        Ok(Self::canonical(self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, d, self.r * o.r))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, MechanicalError> {
        self.checked_add(&-*o)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, MechanicalError> {
        let d = self.common_radicand(o)?;
        Ok(Self::canonical(self.p * o.p + self.q * o.q * d, self.p * o.q + self.q * o.p, d, self.r * o.r))
    }

    pub fn recip(&self) -> Result<Self, MechanicalError> {
        let norm = self.p * self.p - self.q * self.q * self.d;
        if norm == 0 {
            return Err(MechanicalError::Domain("division by zero".into()));
        }
        // r / (p + q√d) = r (p - q√d) / (p² - q² d)
        Ok(Self::canonical(self.r * self.p, -self.r * self.q, self.d, norm))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, MechanicalError> {
        self.checked_mul(&o.recip()?)
    }

    pub fn signum(&self) -> i128 {
        let sp = self.p.signum();
        let sq = self.q.signum();
        if sq == 0 || sp == sq {
            return if sp != 0 { sp } else { sq };
        }
        if sp == 0 {
            return sq;
        }
        // opposite signs: compare p² with q² d
        match (self.p * self.p).cmp(&(self.q * self.q * self.d)) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison; fails on distinct radicands.
    pub fn compare(&self, o: &Self) -> Result<Ordering, MechanicalError> {
        Ok(self.checked_sub(o)?.signum().cmp(&0))
    }

    /// `⌊(p + q√d) / r⌋`, computed as `⌊⌊p + q√d⌋ / r⌋`.
    pub fn floor(&self) -> i128 {
        let numerator_floor = if self.q == 0 {
            self.p
        } else {
            let s = (self.q * self.q * self.d).isqrt();
            if self.q > 0 {
                self.p + s
            } else {
                self.p - s - 1
            }
        };
        numerator_floor.div_euclid(self.r)
    }

    pub fn ceil(&self) -> i128 {
        -(-*self).floor()
    }

    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / self.r as f64
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;

    fn neg(self) -> Self {
        QuadraticNumber { p: -self.p, q: -self.q, ..self }
    }
}

/// Operator forms panic on mixed radicands; use the `checked_` methods when
/// inputs are not known to share one.
impl Add for QuadraticNumber {
    type Output = QuadraticNumber;

    fn add(self, o: Self) -> Self {
        self.checked_add(&o).expect("mixed radicands")
    }
}

impl Sub for QuadraticNumber {
    type Output = QuadraticNumber;

    fn sub(self, o: Self) -> Self {
        self.checked_sub(&o).expect("mixed radicands")
    }
}

impl Mul for QuadraticNumber {
    type Output = QuadraticNumber;

    fn mul(self, o: Self) -> Self {
        self.checked_mul(&o).expect("mixed radicands")
    }
}

impl Div for QuadraticNumber {
    type Output = QuadraticNumber;

    fn div(self, o: Self) -> Self {
        self.checked_div(&o).expect("mixed radicands or division by zero")
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.compare(o).ok()
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 {
            return if self.r == 1 { write!(f, "{}", self.p) } else { write!(f, "{}/{}", self.p, self.r) };
        }
        let sign = if self.q < 0 { "-" } else { "+" };
        let coeff = if self.q.abs() == 1 { String::new() } else { format!("{}*", self.q.abs()) };
        write!(f, "({}{}{}sqrt({}))/{}", self.p, sign, coeff, self.d, self.r)
    }
}

impl FromStr for QuadraticNumber {
    type Err = MechanicalError;

    /// Accepts `(p+q*sqrt(d))/r` and its shortenings: the coefficient `q`,
    /// the term `p`, the parentheses and `/r` may be omitted, as in
    /// `(3-sqrt(5))/2`, `sqrt(2)-1` or `2/7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        static RE: OnceLock<Regex> = OnceLock::new();
        let re = RE.get_or_init(|| {
            Regex::new(
                r"^\(?(?P<p>[+-]?\d+)?(?:(?P<sign>[+-])?(?:(?P<q>\d+)\*)?sqrt\((?P<d>\d+)\))?(?:(?P<p2>[+-]\d+))?\)?(?:/(?P<r>[+-]?\d+))?$",
            )
            .unwrap()
        });
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || MechanicalError::Parse(s.to_string());
        let caps = re.captures(&compact).ok_or_else(bad)?;
        let num = |name: &str| -> Result<Option<i128>, MechanicalError> {
            caps.name(name).map(|m| m.as_str().parse::<i128>().map_err(|_| bad())).transpose()
        };
        let has_sqrt = caps.name("d").is_some();
        if !has_sqrt && caps.name("p").is_none() {
            return Err(bad());
        }
        if caps.name("p").is_some() && caps.name("p2").is_some() {
            return Err(bad());
        }
        if has_sqrt && caps.name("p").is_some() && caps.name("sign").is_none() {
            return Err(bad());
        }
        let p = num("p")?.or(num("p2")?).unwrap_or(0);
        let (q, d) = if has_sqrt {
            let magnitude = num("q")?.unwrap_or(1);
            let sign = if caps.name("sign").map(|m| m.as_str()) == Some("-") { -1 } else { 1 };
            (sign * magnitude, num("d")?.unwrap())
        } else {
            (0, 1)
        };
        let r = num("r")?.unwrap_or(1);
        QuadraticNumber::new(p, q, d, r)
    }
}

impl Serialize for QuadraticNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
