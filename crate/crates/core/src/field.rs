//! Exact scalar fields: GF(p), GF(p^2) and the rationals.
//!
//! Elements carry their modulus so that arithmetic needs no external context.
//! Mixing elements of different fields is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported prime. Residues stay below 2^31 so every product of two
/// residues fits in a `u64` without reduction.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// A field descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    /// GF(p) with p >= 5.
    Prime { p: u32 },
    /// GF(p^2) = GF(p)[a] / (a^2 - nonresidue).
    Quadratic { p: u32, nonresidue: u32 },
    /// The rational numbers.
    Rational,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<u32> {
    if p == 2 || p == 3 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_PRIME {
        return Err(Error::ModulusTooLarge(p));
    }
    Ok(p as u32)
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn smallest_nonresidue(p: u32) -> u32 {
    let p = p as u64;
    (2..p)
        .find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1)
        .expect("odd primes have non-residues") as u32
}

impl Field {
    /// GF(p). Rejects p in {2, 3}, composites, and moduli above [`MAX_PRIME`].
    pub fn prime(p: u64) -> Result<Field> {
        Ok(Field::Prime { p: check_prime(p)? })
    }

    /// GF(p^2), built on the smallest quadratic non-residue mod p.
    pub fn quadratic(p: u64) -> Result<Field> {
        let p = check_prime(p)?;
        Ok(Field::Quadratic {
            p,
            nonresidue: smallest_nonresidue(p),
        })
    }

    pub fn rational() -> Field {
        Field::Rational
    }

    /// Field from (characteristic, extension degree); characteristic 0 means QQ.
    pub fn from_parts(characteristic: u64, degree: u32) -> Result<Field> {
        match (characteristic, degree) {
            (0, 1) => Ok(Field::Rational),
            (0, d) => Err(Error::InvalidArgument(format!(
                "extension degree {d} over the rationals"
            ))),
            (p, 1) => Field::prime(p),
            (p, 2) => Field::quadratic(p),
            (_, d) => Err(Error::InvalidArgument(format!(
                "extension degree {d} is not supported"
            ))),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match *self {
            Field::Prime { p } | Field::Quadratic { p, .. } => p as u64,
            Field::Rational => 0,
        }
    }

    pub fn extension_degree(&self) -> u32 {
        match self {
            Field::Quadratic { .. } => 2,
            _ => 1,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match *self {
            Field::Prime { p } => Some(p as u64),
            Field::Quadratic { p, .. } => Some(p as u64 * p as u64),
            Field::Rational => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn require_finite(&self) -> Result<u64> {
        self.order().ok_or(Error::InfiniteField)
    }

    /// The prime subfield (GF(p) for finite fields, QQ otherwise).
    pub fn prime_subfield(&self) -> Field {
        match *self {
            Field::Quadratic { p, .. } => Field::Prime { p },
            other => other,
        }
    }

    /// GF(p^2) for GF(p); GF(p^2) is returned unchanged.
    pub fn quadratic_extension(&self) -> Result<Field> {
        match *self {
            Field::Prime { p } => Field::quadratic(p as u64),
            q @ Field::Quadratic { .. } => Ok(q),
            Field::Rational => Err(Error::InfiniteField),
        }
    }

    /// True when elements of `sub` embed canonically into `self`.
    pub fn contains(&self, sub: &Field) -> bool {
        self == sub || (self.extension_degree() == 2 && sub.extension_degree() == 1 && self.characteristic() == sub.characteristic() && sub.is_finite())
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        match *self {
            Field::Prime { p } => FieldElement::Fp {
                value: v.rem_euclid(p as i64) as u32,
                p,
            },
            Field::Quadratic { p, nonresidue } => FieldElement::Fp2 {
                re: v.rem_euclid(p as i64) as u32,
                im: 0,
                p,
                nr: nonresidue,
            },
            Field::Rational => FieldElement::Rational(Box::new(BigRational::from_integer(v.into()))),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElement {
        match *self {
            Field::Rational => FieldElement::Rational(Box::new(BigRational::from_integer(v.clone()))),
            _ => {
                let p = BigInt::from(self.characteristic());
                let r = v.mod_floor(&p).to_i64().expect("residue fits");
                self.from_i64(r)
            }
        }
    }

    /// Reduce a rational number into this field.
    pub fn from_rational(&self, v: &BigRational) -> Result<FieldElement> {
        let num = self.from_bigint(v.numer());
        let den = self.from_bigint(v.denom());
        num.div(&den)
    }

    /// The generator `a` of GF(p^2) (with a^2 = nonresidue).
    pub fn generator(&self) -> Option<FieldElement> {
        match *self {
            Field::Quadratic { p, nonresidue } => Some(FieldElement::Fp2 {
                re: 0,
                im: 1,
                p,
                nr: nonresidue,
            }),
            _ => None,
        }
    }

    /// The element with canonical enumeration index `index` (finite fields).
    ///
    /// GF(p): index = value. GF(p^2): index = re + p * im.
    pub fn element(&self, index: u64) -> FieldElement {
        match *self {
            Field::Prime { p } => {
                assert!(index < p as u64, "index out of range");
                FieldElement::Fp {
                    value: index as u32,
                    p,
                }
            }
            Field::Quadratic { p, nonresidue } => {
                let pp = p as u64;
                assert!(index < pp * pp, "index out of range");
                FieldElement::Fp2 {
                    re: (index % pp) as u32,
                    im: (index / pp) as u32,
                    p,
                    nr: nonresidue,
                }
            }
            Field::Rational => panic!("the rationals have no finite enumeration"),
        }
    }

    /// All elements in canonical index order (finite fields only).
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement> + '_> {
        let q = self.require_finite()?;
        Ok((0..q).map(move |i| self.element(i)))
    }

    /// Map an element of a subfield into this field.
    pub fn embed(&self, x: &FieldElement) -> Result<FieldElement> {
        let src = x.field();
        if src == *self {
            return Ok(x.clone());
        }
        match (self, x) {
            (Field::Quadratic { p, nonresidue }, FieldElement::Fp { value, p: q }) if p == q => {
                Ok(FieldElement::Fp2 {
                    re: *value,
                    im: 0,
                    p: *p,
                    nr: *nonresidue,
                })
            }
            (_, FieldElement::Rational(r)) if self.is_finite() => self.from_rational(r),
            _ => Err(Error::FieldMismatch {
                expected: self.to_string(),
                found: src.to_string(),
            }),
        }
    }

    /// Parse a coefficient string: integers, fractions `n/d`, and for GF(p^2)
    /// linear expressions in the generator such as `a+2` or `3a-1`.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |m: &str| Error::Parse {
            line: 0,
            column: 0,
            message: format!("{m}: {text:?}"),
        };
        if s.is_empty() {
            return Err(bad("empty coefficient"));
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && current.is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(bad("dangling sign"));
        }
        terms.push((negative, current));

        let mut acc = self.zero();
        for (neg, term) in terms {
            let (coeff_text, uses_generator) = if let Some(stripped) = term.strip_suffix('a') {
                (stripped.trim_end_matches('*').to_string(), true)
            } else {
                (term.clone(), false)
            };
            let coeff_text = if coeff_text.is_empty() { "1".to_string() } else { coeff_text };
            let value: BigRational = if let Some((n, d)) = coeff_text.split_once('/') {
                let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
                let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                BigRational::new(n, d)
            } else {
                BigRational::from_integer(coeff_text.parse().map_err(|_| bad("bad integer"))?)
            };
            let mut term_value = self.from_rational(&value).map_err(|_| bad("denominator vanishes in the field"))?;
            if uses_generator {
                let g = self.generator().ok_or_else(|| bad("generator `a` only exists in GF(p^2)"))?;
                term_value = &term_value * &g;
            }
            acc = if neg { &acc - &term_value } else { &acc + &term_value };
        }
        Ok(acc)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime { p } => write!(f, "GF({p})"),
            Field::Quadratic { p, .. } => write!(f, "GF({p}^2)"),
            Field::Rational => write!(f, "QQ"),
        }
    }
}

/// An element of one of the supported fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Fp { value: u32, p: u32 },
    Fp2 { re: u32, im: u32, p: u32, nr: u32 },
    Rational(Box<BigRational>),
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match *self {
            FieldElement::Fp { p, .. } => Field::Prime { p },
            FieldElement::Fp2 { p, nr, .. } => Field::Quadratic { p, nonresidue: nr },
            FieldElement::Rational(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Fp { value, .. } => *value == 0,
            FieldElement::Fp2 { re, im, .. } => *re == 0 && *im == 0,
            FieldElement::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Fp { value, .. } => *value == 1,
            FieldElement::Fp2 { re, im, .. } => *re == 1 && *im == 0,
            FieldElement::Rational(r) => r.is_one(),
        }
    }

    /// Canonical enumeration index (finite fields).
    pub fn index(&self) -> u64 {
        match *self {
            FieldElement::Fp { value, .. } => value as u64,
            FieldElement::Fp2 { re, im, p, .. } => re as u64 + p as u64 * im as u64,
            FieldElement::Rational(_) => panic!("rationals have no enumeration index"),
        }
    }

    /// Residue of a GF(p) element.
    pub fn residue(&self) -> Option<u32> {
        match *self {
            FieldElement::Fp { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// True when the element lies in the prime subfield.
    pub fn in_prime_subfield(&self) -> bool {
        !matches!(self, FieldElement::Fp2 { im, .. } if *im != 0)
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(match self {
            FieldElement::Fp { value, p } => FieldElement::Fp {
                value: pow_mod(*value as u64, *p as u64 - 2, *p as u64) as u32,
                p: *p,
            },
            FieldElement::Fp2 { re, im, p, nr } => {
                let pp = *p as u64;
                let (a, b) = (*re as u64, *im as u64);
                // (a + b t)^-1 = (a - b t) / (a^2 - nr b^2)
                let norm = (a * a % pp + pp - (b * b % pp) * (*nr as u64) % pp) % pp;
                let inv = pow_mod(norm, pp - 2, pp);
                FieldElement::Fp2 {
                    re: (a * inv % pp) as u32,
                    im: ((pp - b) % pp * inv % pp) as u32,
                    p: *p,
                    nr: *nr,
                }
            }
            FieldElement::Rational(r) => FieldElement::Rational(Box::new(r.recip())),
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// A square root in the same field, if one exists.
    pub fn sqrt(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.clone());
        }
        match self {
            FieldElement::Rational(r) => {
                if r.is_negative() {
                    return None;
                }
                let n = r.numer().sqrt();
                let d = r.denom().sqrt();
                let cand = BigRational::new(n, d);
                (&cand * &cand == **r).then(|| FieldElement::Rational(Box::new(cand)))
            }
            _ => {
                let field = self.field();
                let q = field.order().expect("finite");
                let one = field.one();
                if self.pow((q - 1) / 2) != one {
                    return None;
                }
                // Tonelli-Shanks over GF(q)
                let mut t = q - 1;
                let mut s = 0u32;
                while t.is_multiple_of(2) {
                    t /= 2;
                    s += 1;
                }
                let z = (1..q)
                    .map(|i| field.element(i))
                    .find(|z| z.pow((q - 1) / 2) != one)
                    .expect("non-residue exists");
                let mut m = s;
                let mut c = z.pow(t);
                let mut x = self.pow(t.div_ceil(2));
                let mut b = self.pow(t);
                while !b.is_one() {
                    let mut i = 0;
                    let mut probe = b.clone();
                    while !probe.is_one() {
                        probe = &probe * &probe;
                        i += 1;
                    }
                    let mut g = c.clone();
                    for _ in 0..(m - i - 1) {
                        g = &g * &g;
                    }
                    x = &x * &g;
                    c = &g * &g;
                    b = &b * &c;
                    m = i;
                }
                Some(x)
            }
        }
    }

    fn mismatch(&self, other: &FieldElement) -> ! {
        panic!("field mismatch: {} vs {}", self.field(), other.field())
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Fp { value: a, p }, FieldElement::Fp { value: b, p: q }) if p == q => FieldElement::Fp {
                value: ((*a as u64 + *b as u64) % *p as u64) as u32,
                p: *p,
            },
            (
                FieldElement::Fp2 { re: a, im: b, p, nr },
                FieldElement::Fp2 { re: c, im: d, p: q, .. },
            ) if p == q => {
                let pp = *p as u64;
                FieldElement::Fp2 {
                    re: ((*a as u64 + *c as u64) % pp) as u32,
                    im: ((*b as u64 + *d as u64) % pp) as u32,
                    p: *p,
                    nr: *nr,
                }
            }
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(Box::new(&**a + &**b)),
            _ => self.mismatch(rhs),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Fp { value, p } => FieldElement::Fp {
                value: ((*p - *value) % *p),
                p: *p,
            },
            FieldElement::Fp2 { re, im, p, nr } => FieldElement::Fp2 {
                re: (*p - *re) % *p,
                im: (*p - *im) % *p,
                p: *p,
                nr: *nr,
            },
            FieldElement::Rational(r) => FieldElement::Rational(Box::new(-&**r)),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Fp { value: a, p }, FieldElement::Fp { value: b, p: q }) if p == q => FieldElement::Fp {
                value: (*a as u64 * *b as u64 % *p as u64) as u32,
                p: *p,
            },
            (
                FieldElement::Fp2 { re: a, im: b, p, nr },
                FieldElement::Fp2 { re: c, im: d, p: q, .. },
            ) if p == q => {
                let pp = *p as u64;
                let (a, b, c, d) = (*a as u64, *b as u64, *c as u64, *d as u64);
                let re = (a * c % pp + (b * d % pp) * (*nr as u64)) % pp;
                let im = (a * d + b * c) % pp;
                FieldElement::Fp2 {
                    re: re as u32,
                    im: im as u32,
                    p: *p,
                    nr: *nr,
                }
            }
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(Box::new(&**a * &**b)),
            _ => self.mismatch(rhs),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical total order: finite-field elements by enumeration index,
/// rationals by value.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldElement::Fp { value: a, p }, FieldElement::Fp { value: b, p: q }) => (p, a).cmp(&(q, b)),
            (FieldElement::Fp2 { re: a, im: b, p, .. }, FieldElement::Fp2 { re: c, im: d, p: q, .. }) => {
                (p, b, a).cmp(&(q, d, c))
            }
            (FieldElement::Rational(a), FieldElement::Rational(b)) => a.cmp(b),
            _ => {
                let rank = |x: &FieldElement| match x {
                    FieldElement::Fp { .. } => 0,
                    FieldElement::Fp2 { .. } => 1,
                    FieldElement::Rational(_) => 2,
                };
                rank(self).cmp(&rank(other))
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Fp { value, .. } => write!(f, "{value}"),
            FieldElement::Fp2 { re, im, .. } => match (*re, *im) {
                (r, 0) => write!(f, "{r}"),
                (0, 1) => write!(f, "a"),
                (0, i) => write!(f, "{i}a"),
                (r, 1) => write!(f, "a+{r}"),
                (r, i) => write!(f, "{i}a+{r}"),
            },
            FieldElement::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

/// A uniformly random element (finite fields) or a small random integer
/// in [-9, 9] (rationals).
pub fn random_element<R: rand::Rng + ?Sized>(field: Field, rng: &mut R) -> FieldElement {
    match field.order() {
        Some(q) => field.element(rng.gen_range(0..q)),
        None => field.from_i64(rng.gen_range(-9..=9)),
    }
}

/// A uniformly random nonzero element (finite fields) or a nonzero small integer.
pub fn random_nonzero<R: rand::Rng + ?Sized>(field: Field, rng: &mut R) -> FieldElement {
    loop {
        let x = random_element(field, rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Dot product of two equal-length vectors (the field is taken from `a[0]`).
pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    assert_eq!(a.len(), b.len(), "dot product of unequal lengths");
    let mut acc = a.first().expect("non-empty vectors").field().zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

/// Scale a projective vector so its first nonzero entry is 1.
pub fn normalize_projective(v: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let lead = v.iter().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let inv = lead.inverse()?;
    Ok(v.iter().map(|x| x * &inv).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.from_i64(3).inverse().unwrap(), f.from_i64(5));
        assert_eq!(f.one().inverse().unwrap(), f.one());
        let q = Field::rational();
        let two_thirds = q.parse_element("2/3").unwrap();
        assert_eq!(two_thirds.inverse().unwrap(), q.parse_element("3/2").unwrap());
        assert_eq!(f.zero().inverse(), Err(Error::ZeroInverse));
    }

    #[test]
    fn small_characteristics_rejected() {
        assert_eq!(Field::prime(2), Err(Error::UnsupportedCharacteristic(2)));
        assert_eq!(Field::prime(3), Err(Error::UnsupportedCharacteristic(3)));
        assert_eq!(Field::prime(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn quadratic_extension_arithmetic() {
        let f = Field::quadratic(7).unwrap();
        let a = f.generator().unwrap();
        // 3 is the smallest non-residue mod 7
        assert_eq!(&a * &a, f.from_i64(3));
        for x in f.elements().unwrap().skip(1) {
            assert!((&x * &x.inverse().unwrap()).is_one());
        }
        assert_eq!(f.parse_element("a+2").unwrap().to_string(), "a+2");
        assert_eq!(f.parse_element("2+a").unwrap().to_string(), "a+2");
        assert_eq!(f.parse_element("-a").unwrap().to_string(), "6a");
    }

    #[test]
    fn square_roots() {
        for field in [Field::prime(7).unwrap(), Field::prime(13).unwrap(), Field::quadratic(7).unwrap()] {
            let squares: Vec<_> = field.elements().unwrap().map(|x| &x * &x).collect();
            for x in field.elements().unwrap() {
                match x.sqrt() {
                    Some(r) => assert_eq!(&r * &r, x),
                    None => assert!(!squares.contains(&x)),
                }
            }
        }
        // every element of GF(p) is a square in GF(p^2)
        let f2 = Field::quadratic(11).unwrap();
        for v in 0..11 {
            assert!(f2.from_i64(v).sqrt().is_some());
        }
        let q = Field::rational();
        assert_eq!(q.parse_element("9/4").unwrap().sqrt(), Some(q.parse_element("3/2").unwrap()));
        assert_eq!(q.parse_element("2").unwrap().sqrt(), None);
    }

    #[test]
    fn parse_rational_into_prime_field() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.parse_element("1/2").unwrap(), f.from_i64(4));
        assert!(f.parse_element("1/7").is_err());
        assert!(f.parse_element("a").is_err());
    }
}
