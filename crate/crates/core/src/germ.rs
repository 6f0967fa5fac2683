//! Sparse bivariate polynomials in `z1`, `z2` over `Q(i)`, standing in for
//! holomorphic germs at the origin of `C²`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::gaussian::GaussianRational;

/// Exponents of the monomial `z1^e1 · z2^e2`.
///
/// Ordered graded-lexicographically with `z1 > z2`: first by total degree,
/// then by the exponent of `z1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExponentPair {
    pub e1: u32,
    pub e2: u32,
}

impl ExponentPair {
    pub const fn new(e1: u32, e2: u32) -> Self {
        Self { e1, e2 }
    }

    pub const fn degree(self) -> u32 {
        self.e1 + self.e2
    }

    pub fn divides(self, other: ExponentPair) -> bool {
        self.e1 <= other.e1 && self.e2 <= other.e2
    }

    pub fn checked_mul(self, other: ExponentPair) -> Option<ExponentPair> {
        Some(ExponentPair::new(
            self.e1.checked_add(other.e1)?,
            self.e2.checked_add(other.e2)?,
        ))
    }

    /// All monomials of total degree exactly `d`, in descending order.
    pub fn of_degree(d: u32) -> impl DoubleEndedIterator<Item = ExponentPair> {
        (0..=d).rev().map(move |e1| ExponentPair::new(e1, d - e1))
    }

    /// All monomials of total degree `< k`, in descending order.
    pub fn below_degree(k: u32) -> Vec<ExponentPair> {
        (0..k).rev().flat_map(ExponentPair::of_degree).collect()
    }
}

impl Ord for ExponentPair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.e1.cmp(&other.e1))
    }
}

impl PartialOrd for ExponentPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of vanishing at the origin; the zero germ vanishes to infinite order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(d) => Some(d),
            Order::Infinite => None,
        }
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(d) => write!(f, "{d}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Which of the two coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    Z1,
    Z2,
}

/// A polynomial in `z1, z2` with Gaussian-rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Germ {
    terms: BTreeMap<ExponentPair, GaussianRational>,
}

impl Germ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::term(ExponentPair::new(0, 0), c)
    }

    pub fn term(e: ExponentPair, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn monomial(e1: u32, e2: u32) -> Self {
        Self::term(ExponentPair::new(e1, e2), GaussianRational::one())
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::Z1 => Self::monomial(1, 0),
            Var::Z2 => Self::monomial(0, 1),
        }
    }

    /// Builds a germ from `(e1, e2, coefficient)` triples, summing repeats.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentPair, GaussianRational)>,
    {
        let mut out = Germ::zero();
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    /// Convenience constructor with integer coefficients.
    pub fn from_int_terms(terms: &[(i64, u32, u32)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(c, e1, e2)| (ExponentPair::new(e1, e2), GaussianRational::from_integer(c))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&ExponentPair::new(0, 0))
                .is_some_and(One::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentPair, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: ExponentPair) -> GaussianRational {
        self.terms.get(&e).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(ExponentPair::new(0, 0))
    }

    /// True when the germ does not vanish at the origin.
    pub fn is_unit(&self) -> bool {
        self.terms.contains_key(&ExponentPair::new(0, 0))
    }

    pub fn add_term(&mut self, e: ExponentPair, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    /// Greatest monomial and its coefficient.
    pub fn leading_term(&self) -> Option<(ExponentPair, &GaussianRational)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    pub fn leading_coeff(&self) -> Option<&GaussianRational> {
        self.terms.values().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|e| e.degree())
    }

    pub fn order(&self) -> Order {
        self.terms
            .keys()
            .next()
            .map_or(Order::Infinite, |e| Order::Finite(e.degree()))
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| match v {
                Var::Z1 => e.e1,
                Var::Z2 => e.e2,
            })
            .max()
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Germ {
        Germ {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Drops every term of total degree `>= k` (reduction modulo `m^k`).
    pub fn truncate_below(&self, k: u32) -> Germ {
        Germ {
            terms: self
                .terms
                .iter()
                .take_while(|(e, _)| e.degree() < k)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Germ {
        if c.is_zero() {
            return Germ::zero();
        }
        Germ {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
        }
    }

    /// Multiplies by the monomial `e`.
    pub fn shift(&self, e: ExponentPair) -> Germ {
        Germ {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.checked_mul(e).expect("exponent overflow"), c.clone()))
                .collect(),
        }
    }

    pub fn mul_term(&self, e: ExponentPair, c: &GaussianRational) -> Germ {
        self.shift(e).scale(c)
    }

    /// Product truncated modulo `m^k`.
    pub fn mul_truncated(&self, other: &Germ, k: u32) -> Germ {
        let mut out = Germ::zero();
        for (ea, ca) in &self.terms {
            if ea.degree() >= k {
                break;
            }
            for (eb, cb) in &other.terms {
                if ea.degree() + eb.degree() >= k {
                    break;
                }
                out.add_term(ExponentPair::new(ea.e1 + eb.e1, ea.e2 + eb.e2), &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Germ {
        let mut base = self.clone();
        let mut acc = Germ::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rescales so that the leading coefficient is `1`; zero stays zero.
    pub fn monic(&self) -> Germ {
        match self.leading_coeff() {
            Some(c) if !c.is_one() => self.scale(&c.inv().expect("nonzero leading coefficient")),
            _ => self.clone(),
        }
    }

    /// Formal partial derivative.
    pub fn differentiate(&self, v: Var) -> Germ {
        let mut out = Germ::zero();
        for (e, c) in &self.terms {
            let (k, d) = match v {
                Var::Z1 if e.e1 > 0 => (e.e1, ExponentPair::new(e.e1 - 1, e.e2)),
                Var::Z2 if e.e2 > 0 => (e.e2, ExponentPair::new(e.e1, e.e2 - 1)),
                _ => continue,
            };
            out.add_term(d, &(c * &GaussianRational::from_integer(i64::from(k))));
        }
        out
    }

    pub fn gradient(&self) -> (Germ, Germ) {
        (self.differentiate(Var::Z1), self.differentiate(Var::Z2))
    }

    /// Value at `z1 = 0` as a univariate polynomial in `z2` (coefficients by degree).
    pub fn restrict_z1_zero(&self) -> Vec<GaussianRational> {
        let deg = self
            .terms
            .keys()
            .filter(|e| e.e1 == 0)
            .map(|e| e.e2)
            .max();
        let Some(deg) = deg else {
            return Vec::new();
        };
        let mut out = vec![GaussianRational::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            if e.e1 == 0 {
                out[e.e2 as usize] = c.clone();
            }
        }
        out
    }

    /// Substitutes `z1 ↦ a·z1 + b·z2`, `z2 ↦ c·z1 + d·z2`.
    pub fn linear_substitute(
        &self,
        a: &GaussianRational,
        b: &GaussianRational,
        c: &GaussianRational,
        d: &GaussianRational,
    ) -> Germ {
        let l1 = Germ::from_terms([(ExponentPair::new(1, 0), a.clone()), (ExponentPair::new(0, 1), b.clone())]);
        let l2 = Germ::from_terms([(ExponentPair::new(1, 0), c.clone()), (ExponentPair::new(0, 1), d.clone())]);
        let max1 = self.degree_in(Var::Z1).unwrap_or(0) as usize;
        let max2 = self.degree_in(Var::Z2).unwrap_or(0) as usize;
        let mut p1 = vec![Germ::one()];
        for i in 0..max1 {
            p1.push(&p1[i] * &l1);
        }
        let mut p2 = vec![Germ::one()];
        for i in 0..max2 {
            p2.push(&p2[i] * &l2);
        }
        let mut out = Germ::zero();
        for (e, coef) in &self.terms {
            let t = (&p1[e.e1 as usize] * &p2[e.e2 as usize]).scale(coef);
            out = &out + &t;
        }
        out
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(GaussianRational::bit_size).max().unwrap_or(0)
    }
}

/// `∂f/∂z1 · ∂g/∂z2 − ∂f/∂z2 · ∂g/∂z1`
pub fn jacobian_det(f: &Germ, g: &Germ) -> Germ {
    let (f1, f2) = f.gradient();
    let (g1, g2) = g.gradient();
    &(&f1 * &g2) - &(&f2 * &g1)
}

impl<'a> Add<&'a Germ> for &'a Germ {
    type Output = Germ;
    fn add(self, rhs: &Germ) -> Germ {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl<'a> Sub<&'a Germ> for &'a Germ {
    type Output = Germ;
    fn sub(self, rhs: &Germ) -> Germ {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Germ> for &'a Germ {
    type Output = Germ;
    fn mul(self, rhs: &Germ) -> Germ {
        let mut out = Germ::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.checked_mul(*eb).expect("exponent overflow"), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Germ {
    type Output = Germ;
    fn neg(self) -> Germ {
        Germ {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Add for Germ {
    type Output = Germ;
    fn add(self, rhs: Germ) -> Germ {
        &self + &rhs
    }
}

impl Sub for Germ {
    type Output = Germ;
    fn sub(self, rhs: Germ) -> Germ {
        &self - &rhs
    }
}

impl Mul for Germ {
    type Output = Germ;
    fn mul(self, rhs: Germ) -> Germ {
        &self * &rhs
    }
}

impl Neg for Germ {
    type Output = Germ;
    fn neg(self) -> Germ {
        -&self
    }
}

impl PartialOrd for Germ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but deterministic total order, used for sorting generator lists.
impl Ord for Germ {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.terms.iter().rev();
        let b = other.terms.iter().rev();
        for ((ea, ca), (eb, cb)) in a.zip(b) {
            let o = ea
                .cmp(eb)
                .then_with(|| ca.re.cmp(&cb.re))
                .then_with(|| ca.im.cmp(&cb.im));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

fn fmt_monomial(e: ExponentPair) -> String {
    let mut parts = Vec::new();
    for (name, k) in [("z1", e.e1), ("z2", e.e2)] {
        match k {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

/// Prints terms in descending monomial order using the germ grammar, so the
/// output parses back to the same germ.
impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = (c.im.is_zero() && c.re < num_traits::zero())
                || (c.re.is_zero() && c.im < num_traits::zero());
            let mag = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = fmt_monomial(*e);
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Germ({self})")
    }
}
