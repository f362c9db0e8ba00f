//! Finite-field arithmetic backed by log/antilog tables.
//!
//! Two families are supported: binary extension fields GF(2^m) for
//! `1 <= m <= 16`, and prime fields GF(p) for odd primes `p <= 65537`.
//! Prime fields are needed whenever the rack size `u` is even, since
//! `2^m - 1` is always odd.
//!
//! Binary fields use a fixed primitive polynomial per degree:
//!
//! | m | poly    | m  | poly    |
//! |---|---------|----|---------|
//! | 1 | 0x3     | 9  | 0x211   |
//! | 2 | 0x7     | 10 | 0x409   |
//! | 3 | 0xB     | 11 | 0x805   |
//! | 4 | 0x13    | 12 | 0x1053  |
//! | 5 | 0x25    | 13 | 0x201B  |
//! | 6 | 0x43    | 14 | 0x4443  |
//! | 7 | 0x89    | 15 | 0x8003  |
//! | 8 | 0x11D   | 16 | 0x1100B |
//!
//! The canonical primitive element is the root of the polynomial (value
//! `0x2`, or `1` in GF(2)). For GF(p) it is the smallest primitive root.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Primitive polynomials indexed by extension degree.
pub const PRIMITIVE_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B,
    0x4443, 0x8003, 0x1100B,
];

pub const MAX_PRIME: u32 = 65537;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Binary { m: u32, poly: u32 },
    Prime { p: u32 },
}

/// A field element. Only meaningful together with the [`Field`] it came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// Wraps a raw value without a range check; see [`Field::elem`].
    pub const fn from_raw(value: u32) -> Self {
        Elem(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

struct Tables {
    kind: FieldKind,
    q: u32,
    /// `exp[i] = xi^i`, stored twice over so products of logs need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// An immutable, cheaply clonable finite field.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind {
            FieldKind::Binary { m, poly } => write!(f, "GF(2^{m})/{poly:#x}"),
            FieldKind::Prime { p } => write!(f, "GF({p})"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl Eq for Field {}

fn binary_step(x: u32, q: u32, poly: u32) -> u32 {
    let y = x << 1;
    if y & q != 0 {
        y ^ poly
    } else {
        y
    }
}

fn mod_mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn mod_pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, a, p);
        }
        a = mod_mul(a, a, p);
        e >>= 1;
    }
    r
}

fn prime_factors(mut x: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

pub(crate) fn is_prime(x: u32) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Field {
    /// GF(2^m) with the fixed primitive polynomial for `m`.
    pub fn binary(m: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::FieldDegree(m));
        }
        Self::binary_with_poly(m, PRIMITIVE_POLYS[m as usize])
    }

    /// GF(2^m) with an explicit polynomial, rejected unless it is primitive.
    pub fn binary_with_poly(m: u32, poly: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::FieldDegree(m));
        }
        let q = 1u32 << m;
        if poly >> m != 1 {
            return Err(Error::FieldTable(format!("polynomial {poly:#x} is not of degree {m}")));
        }
        let order = q - 1;
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut x = 1u32;
        for _ in 0..order {
            exp.push(x);
            x = binary_step(x, q, poly);
        }
        Self::finish(FieldKind::Binary { m, poly }, q, exp)
    }

    /// GF(p) for an odd prime `p <= 65537`.
    pub fn prime(p: u32) -> Result<Self> {
        if p <= 2 || p > MAX_PRIME || !is_prime(p) {
            return Err(Error::PrimeModulus(p));
        }
        let order = p - 1;
        let factors = prime_factors(order);
        let g = (2..p)
            .find(|&g| factors.iter().all(|&r| mod_pow(g, (order / r) as u64, p) != 1))
            .expect("every prime field has a primitive root");
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut x = 1u32;
        for _ in 0..order {
            exp.push(x);
            x = mod_mul(x, g, p);
        }
        Self::finish(FieldKind::Prime { p }, p, exp)
    }

    pub fn from_kind(kind: FieldKind) -> Result<Self> {
        match kind {
            FieldKind::Binary { m, poly } => Self::binary_with_poly(m, poly),
            FieldKind::Prime { p } => Self::prime(p),
        }
    }

    fn finish(kind: FieldKind, q: u32, mut exp: Vec<u32>) -> Result<Self> {
        let order = (q - 1) as usize;
        let mut log = vec![u32::MAX; q as usize];
        for (i, &x) in exp.iter().enumerate() {
            if x == 0 || log[x as usize] != u32::MAX {
                return Err(Error::FieldTable(format!(
                    "generator of {kind:?} has order {i}, not {order}"
                )));
            }
            log[x as usize] = i as u32;
        }
        log[0] = 0;
        exp.extend_from_within(..order);
        let field = Field(Arc::new(Tables { kind, q, exp, log }));
        field.validate()?;
        Ok(field)
    }

    /// Recomputes every table entry from scratch and compares.
    pub fn validate(&self) -> Result<()> {
        let t = &*self.0;
        let order = (t.q - 1) as usize;
        if t.exp.len() != 2 * order || t.log.len() != t.q as usize {
            return Err(Error::FieldTable("table sizes".into()));
        }
        let mut x = 1u32;
        let g = t.exp[1 % order.max(1)];
        for i in 0..order {
            if t.exp[i] != x || t.exp[i + order] != x {
                return Err(Error::FieldTable(format!("exp[{i}] = {}, expected {x}", t.exp[i])));
            }
            if t.log[x as usize] as usize != i {
                return Err(Error::FieldTable(format!("log[{x}] inconsistent")));
            }
            x = match t.kind {
                FieldKind::Binary { poly, .. } => binary_step(x, t.q, poly),
                FieldKind::Prime { p } => mod_mul(x, g, p),
            };
        }
        if x != 1 {
            return Err(Error::FieldTable("generator order".into()));
        }
        Ok(())
    }

    /// Returns a copy of this field with one antilog entry flipped. Test hook
    /// for checking that [`Field::validate`] catches table corruption.
    #[doc(hidden)]
    pub fn with_corrupted_exp(&self, index: usize) -> Field {
        let t = &*self.0;
        let mut exp = t.exp.clone();
        let i = index % exp.len();
        exp[i] ^= 1;
        Field(Arc::new(Tables { kind: t.kind, q: t.q, exp, log: t.log.clone() }))
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Bits needed to hold any element.
    pub fn bits(&self) -> u32 {
        32 - (self.0.q - 1).leading_zeros()
    }

    pub fn elem(&self, value: u32) -> Result<Elem> {
        if value < self.0.q {
            Ok(Elem(value))
        } else {
            Err(Error::NotInField { value, q: self.0.q })
        }
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        self.elem(a.0)
    }

    /// All elements in ascending value order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.0.kind {
            FieldKind::Binary { .. } => Elem(a.0 ^ b.0),
            FieldKind::Prime { p } => {
                let s = a.0 + b.0;
                Elem(if s >= p { s - p } else { s })
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        match self.0.kind {
            FieldKind::Binary { .. } => Elem(a.0 ^ b.0),
            FieldKind::Prime { p } => Elem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 }),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(Elem::ZERO, a)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let t = &*self.0;
        Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    /// `acc + a * b`
    #[inline]
    pub fn mul_add(&self, acc: Elem, a: Elem, b: Elem) -> Elem {
        self.add(acc, self.mul(a, b))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let t = &*self.0;
        let order = t.q - 1;
        Ok(Elem(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem> {
        if a.0 == 0 {
            return match e {
                0 => Ok(Elem::ONE),
                e if e > 0 => Ok(Elem::ZERO),
                e => Err(Error::ZeroNegativePower(e)),
            };
        }
        let t = &*self.0;
        let order = (t.q - 1) as i128;
        let idx = (t.log[a.0 as usize] as i128 * e as i128).rem_euclid(order);
        Ok(Elem(t.exp[idx as usize]))
    }

    /// Infallible power for a nonnegative exponent.
    #[inline]
    pub fn pow_u(&self, a: Elem, e: usize) -> Elem {
        if a.0 == 0 {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let t = &*self.0;
        let order = (t.q - 1) as u64;
        let idx = (t.log[a.0 as usize] as u64 * (e as u64 % order)) % order;
        Elem(t.exp[idx as usize])
    }

    /// The canonical generator of the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        let order = (self.0.q - 1) as usize;
        Elem(self.0.exp[1 % order])
    }

    /// `xi^((q-1)/u)`, an element of multiplicative order exactly `u`.
    pub fn element_of_order(&self, u: u32) -> Result<Elem> {
        let order = self.0.q - 1;
        if u == 0 || !order.is_multiple_of(u) {
            return Err(Error::OrderNotDivisor { u, q_minus_1: order });
        }
        Ok(self.pow_u(self.primitive_element(), (order / u) as usize))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> Result<u32> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let order = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        Ok((order / gcd(l, order)) as u32)
    }

    pub fn sum(&self, it: impl IntoIterator<Item = Elem>) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| self.mul_add(acc, x, y))
    }
}
