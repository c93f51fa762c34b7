//! Exact arithmetic in F_q (q prime) and in the extension F_{q^l}.
//!
//! An element of F_{q^l} is stored as a packed base-q integer whose digit `i`
//! is the coefficient of `w^i` in the power basis of the modulus, `w` being a
//! root of the modulus. Reading the digits off is the fixed F_q-linear
//! isomorphism F_q^l -> F_{q^l} used everywhere else in the crate, so the
//! same value doubles as a length-`l` vector over the base field.
//!
//! The modulus is the lexicographically smallest monic irreducible polynomial
//! of degree `l`, coefficients compared from the constant term upwards. The
//! context is therefore a pure function of `(q, l)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported base prime.
pub const MAX_CHARACTERISTIC: u32 = 1 << 16;
/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 16;
/// Largest field that [`ExtField::elements`] will list.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// An element of F_{q^l}, meaningful only together with its [`ExtField`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fel(u32);

impl Fel {
    pub const ZERO: Fel = Fel(0);

    /// Packed base-q representation.
    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The field F_{q^l} together with its power-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtField {
    q: u32,
    l: usize,
    /// `l + 1` coefficients, constant term first, leading coefficient 1.
    modulus: Vec<u32>,
    order: u64,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.q, self.l, self.modulus)
    }
}

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl ExtField {
    /// Builds F_{q^l}. `l = 1` yields F_q itself (modulus `x`).
    pub fn new(q: u32, l: usize) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::Parameter(format!("q = {q} is not prime")));
        }
        if q > MAX_CHARACTERISTIC {
            return Err(Error::Parameter(format!(
                "q = {q} exceeds the supported limit {MAX_CHARACTERISTIC}"
            )));
        }
        if l == 0 || l > MAX_DEGREE {
            return Err(Error::Parameter(format!(
                "extension degree l = {l} outside 1..={MAX_DEGREE}"
            )));
        }
        let order = (q as u64)
            .checked_pow(l as u32)
            .filter(|&o| o <= u32::MAX as u64)
            .ok_or_else(|| {
                Error::Parameter(format!("field of order {q}^{l} does not fit the packed representation"))
            })?;
        let modulus = smallest_irreducible(q, l).ok_or_else(|| {
            Error::Internal(format!("no monic irreducible of degree {l} over F_{q}"))
        })?;
        Ok(Self { q, l, modulus, order })
    }

    /// The prime subfield F_q of this field, as a field in its own right.
    pub fn base_field(&self) -> ExtField {
        ExtField::new(self.q, 1).expect("q was validated on construction")
    }

    pub fn characteristic(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.l
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// q^l.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn zero(&self) -> Fel {
        Fel(0)
    }

    pub fn one(&self) -> Fel {
        Fel(1)
    }

    /// Embeds a base-field scalar (reduced mod q) as a constant.
    pub fn from_base(&self, alpha: u32) -> Fel {
        Fel(alpha % self.q)
    }

    /// True iff `a` lies in the prime subfield.
    pub fn is_base(&self, a: Fel) -> bool {
        a.0 < self.q
    }

    /// Checks that a raw packed value denotes an element of this field.
    pub fn element(&self, raw: u32) -> Result<Fel> {
        if (raw as u64) < self.order {
            Ok(Fel(raw))
        } else {
            Err(Error::Parameter(format!(
                "{raw} is not an element of a field of order {}",
                self.order
            )))
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(0..self.order) as u32)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(1..self.order) as u32)
    }

    fn digits(&self, a: Fel) -> [u64; MAX_DEGREE] {
        let mut out = [0u64; MAX_DEGREE];
        let mut x = a.0 as u64;
        let q = self.q as u64;
        for d in out.iter_mut().take(self.l) {
            *d = x % q;
            x /= q;
        }
        out
    }

    fn pack(&self, digits: &[u64]) -> Fel {
        let q = self.q as u64;
        let packed = digits[..self.l]
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * q + d % q);
        Fel(packed as u32)
    }

    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        if self.q == 2 {
            return Fel(a.0 ^ b.0);
        }
        if self.l == 1 {
            return Fel(((a.0 as u64 + b.0 as u64) % self.q as u64) as u32);
        }
        let q = self.q as u64;
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.l {
            out += ((x % q + y % q) % q) * place;
            x /= q;
            y /= q;
            place *= q;
        }
        Fel(out as u32)
    }

    pub fn neg(&self, a: Fel) -> Fel {
        if self.q == 2 {
            return a;
        }
        let q = self.q as u64;
        let (mut x, mut out, mut place) = (a.0 as u64, 0u64, 1u64);
        for _ in 0..self.l {
            out += ((q - x % q) % q) * place;
            x /= q;
            place *= q;
        }
        Fel(out as u32)
    }

    pub fn sub(&self, a: Fel, b: Fel) -> Fel {
        self.add(a, self.neg(b))
    }

    /// Multiplies by a base-field scalar.
    pub fn scale(&self, alpha: u32, a: Fel) -> Fel {
        let alpha = (alpha % self.q) as u64;
        let mut d = self.digits(a);
        for x in d.iter_mut().take(self.l) {
            *x = *x * alpha % self.q as u64;
        }
        self.pack(&d)
    }

    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        let q = self.q as u64;
        if self.l == 1 {
            return Fel((a.0 as u64 * b.0 as u64 % q) as u32);
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let l = self.l;
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..l {
            if x[i] == 0 {
                continue;
            }
            for j in 0..l {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % q;
            }
        }
        // w^l = -(m_0 + m_1 w + ... + m_{l-1} w^{l-1})
        for deg in (l..2 * l - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for i in 0..l {
                let m = self.modulus[i] as u64;
                prod[deg - l + i] = (prod[deg - l + i] + (q - m) % q * c) % q;
            }
        }
        self.pack(&prod)
    }

    pub fn pow(&self, a: Fel, mut e: u64) -> Fel {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fel) -> Result<Fel> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order - 2))
    }

    pub fn div(&self, a: Fel, b: Fel) -> Result<Fel> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^(q^i)`, by repeated application of the q-power map.
    pub fn frobenius(&self, a: Fel, i: u64) -> Fel {
        let steps = i % self.l as u64;
        (0..steps).fold(a, |x, _| self.pow(x, self.q as u64))
    }

    /// Power-basis coordinates of `a`, constant coordinate first.
    pub fn to_vector(&self, a: Fel) -> Vec<u32> {
        self.digits(a)[..self.l].iter().map(|&d| d as u32).collect()
    }

    /// Inverse of [`ExtField::to_vector`].
    pub fn from_vector(&self, coords: &[u32]) -> Result<Fel> {
        if coords.len() != self.l {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                self.l,
                coords.len()
            )));
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.q) {
            return Err(Error::Parameter(format!("coordinate {bad} not reduced mod {}", self.q)));
        }
        let digits: Vec<u64> = coords.iter().map(|&c| c as u64).collect();
        Ok(self.pack(&digits))
    }

    /// Every element exactly once, in increasing packed order starting at zero.
    pub fn elements(&self) -> Result<Vec<Fel>> {
        if self.order > ENUMERATION_LIMIT {
            return Err(Error::Resource(format!(
                "refusing to enumerate {} elements (limit {ENUMERATION_LIMIT})",
                self.order
            )));
        }
        Ok((0..self.order as u32).map(Fel).collect())
    }

    /// Evaluates `sum_j coeffs[j] x^j` by Horner's rule.
    pub fn eval_poly(&self, coeffs: &[Fel], x: Fel) -> Fel {
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn sum<I: IntoIterator<Item = Fel>>(&self, items: I) -> Fel {
        items.into_iter().fold(self.zero(), |acc, x| self.add(acc, x))
    }
}

/// Remainder of `a` modulo the monic polynomial `b` over F_q (constant term first).
fn poly_rem_monic(a: &[u32], b: &[u32], q: u32) -> Vec<u32> {
    let q = q as u64;
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.pop().unwrap() % q;
        let shift = r.len() - db;
        if lead != 0 {
            for (i, &bi) in b[..db].iter().enumerate() {
                r[shift + i] = (r[shift + i] + (q - lead) * bi as u64) % q;
            }
        }
    }
    r.into_iter().map(|x| x as u32).collect()
}

/// Monic polynomial of degree `deg` whose low coefficients are the base-q digits of `idx`,
/// the constant term being the most significant digit.
fn monic_from_index(mut idx: u64, deg: usize, q: u32) -> Vec<u32> {
    let mut p = vec![0u32; deg + 1];
    p[deg] = 1;
    for i in (0..deg).rev() {
        p[i] = (idx % q as u64) as u32;
        idx /= q as u64;
    }
    p
}

pub(crate) fn is_irreducible(poly: &[u32], q: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (q as u64).pow(d as u32);
        for idx in 0..count {
            let divisor = monic_from_index(idx, d, q);
            if poly_rem_monic(poly, &divisor, q).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(q: u32, l: usize) -> Option<Vec<u32>> {
    let count = (q as u64).checked_pow(l as u32)?;
    (0..count)
        .map(|idx| monic_from_index(idx, l, q))
        .find(|p| is_irreducible(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> ExtField {
        ExtField::new(2, 2).unwrap()
    }

    #[test]
    fn degree_one_is_the_prime_field() {
        let f = ExtField::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.mul(Fel(1), Fel(1)), Fel(1));
    }

    #[test]
    fn moduli_match_root_search() {
        // Every monic quadratic over F_2 and F_3, tested for roots by brute force.
        for (q, expected) in [(2u32, vec![1u32, 1, 1]), (3, vec![1, 0, 1])] {
            let mut first = None;
            'outer: for c0 in 0..q {
                for c1 in 0..q {
                    let has_root = (0..q).any(|x| (x * x + c1 * x + c0) % q == 0);
                    if !has_root {
                        first = Some(vec![c0, c1, 1]);
                        break 'outer;
                    }
                }
            }
            assert_eq!(first.unwrap(), expected);
            assert_eq!(ExtField::new(q, 2).unwrap().modulus(), expected.as_slice());
        }
    }

    #[test]
    fn cubic_modulus_over_f2() {
        // (1,0,1) precedes (1,1,0) when compared from the constant term.
        assert_eq!(ExtField::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(ExtField::new(4, 2), Err(Error::Parameter(_))));
        assert!(matches!(ExtField::new(1, 1), Err(Error::Parameter(_))));
        assert!(matches!(ExtField::new(2, 0), Err(Error::Parameter(_))));
        assert!(matches!(ExtField::new(65537, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn w_squared_in_f4() {
        let f = f4();
        let w = f.from_vector(&[0, 1]).unwrap();
        let w_plus_1 = f.from_vector(&[1, 1]).unwrap();
        assert_eq!(f.mul(w, w), w_plus_1);
        assert_eq!(f.frobenius(w, 1), w_plus_1);
        assert_eq!(f.frobenius(w, 2), w);
        assert_eq!(f.to_vector(w_plus_1), vec![1, 1]);
    }

    #[test]
    fn inverse_in_f3() {
        let f = ExtField::new(3, 1).unwrap();
        assert_eq!(f.inv(Fel(2)).unwrap(), Fel(2));
        assert_eq!(f.inv(Fel(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn additive_identity() {
        let f = ExtField::new(5, 2).unwrap();
        for a in f.elements().unwrap() {
            assert_eq!(f.add(a, f.zero()), a);
            assert_eq!(f.sub(a, a), f.zero());
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(ExtField::new(2, 1).unwrap().elements().unwrap(), vec![Fel(0), Fel(1)]);
        let e4 = f4().elements().unwrap();
        assert_eq!(e4.len(), 4);
        assert_eq!(e4[0], Fel::ZERO);
        let e9 = ExtField::new(3, 2).unwrap().elements().unwrap();
        let set: std::collections::HashSet<_> = e9.iter().collect();
        assert_eq!(set.len(), 9);
        assert!(matches!(
            ExtField::new(2, 16).unwrap().elements(),
            Ok(v) if v.len() == 65536
        ));
        assert!(matches!(ExtField::new(3, 13).unwrap().elements(), Err(Error::Resource(_))));
    }

    #[test]
    fn vector_shape_errors() {
        let f = f4();
        assert!(matches!(f.from_vector(&[1]), Err(Error::Shape(_))));
        assert!(matches!(f.from_vector(&[2, 0]), Err(Error::Parameter(_))));
        assert_eq!(f.to_vector(f.zero()), vec![0, 0]);
    }

    #[test]
    fn every_nonzero_element_of_small_fields_has_an_inverse() {
        for (q, l) in [(2, 3), (3, 2), (5, 2), (7, 1), (2, 4)] {
            let f = ExtField::new(q, l).unwrap();
            for a in f.elements().unwrap().into_iter().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one(), "{f:?} a={a:?}");
            }
        }
    }
}
