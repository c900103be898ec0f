//! Finitely generated Grassmann algebras `Λ_n` over the rationals and the
//! category `Gr` of their parity preserving algebra morphisms.
//!
//! A monomial `θ_{i1}⋯θ_{ik}` with `i1 < … < ik` is stored as the bitmask with
//! bit `i - 1` set for every generator index `i`, so at most
//! [`MAX_GENERATORS`] generators are supported.
//!
//! Product sign: for monomials `A` and `B` with `A ∩ B = ∅`,
//! `θ_A θ_B = (-1)^s θ_{A ∪ B}` where `s` counts the pairs `(a, b)` with
//! `a ∈ A`, `b ∈ B` and `a > b`. Any shared generator gives zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const MAX_GENERATORS: usize = 64;

/// Bitmask of a monomial.
pub type Monomial = u64;

/// Mask covering the generators of `Λ_n`.
pub fn full_mask(n: usize) -> Monomial {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Sign and support of `θ_a θ_b`; `None` when the monomials share a generator.
pub fn monomial_product(a: Monomial, b: Monomial) -> Option<(Monomial, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += a.checked_shr(j + 1).unwrap_or(0).count_ones();
        rest &= rest - 1;
    }
    Some((a | b, swaps % 2 == 1))
}

/// 1-based generator indices of a monomial, ascending.
pub fn monomial_indices(mask: Monomial) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize + 1);
        rest &= rest - 1;
    }
    out
}

/// Monomial from 1-based indices; they must be strictly increasing.
pub fn monomial_from_indices(indices: &[usize], n: usize) -> Result<Monomial> {
    let mut mask = 0u64;
    let mut last = 0usize;
    for &i in indices {
        if i == 0 || i > n || i > MAX_GENERATORS {
            return Err(Error::GeneratorRange { index: i, n });
        }
        if i <= last {
            return Err(Error::Invalid(format!(
                "monomial indices must be strictly increasing, got {indices:?}"
            )));
        }
        last = i;
        mask |= 1u64 << (i - 1);
    }
    Ok(mask)
}

/// Parity of an element of a super vector space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Indefinite,
    Zero,
}

impl Parity {
    /// True when an element of this parity may sit in a slot of parity `odd`.
    pub fn fits(self, odd: bool) -> bool {
        match self {
            Parity::Zero => true,
            Parity::Even => !odd,
            Parity::Odd => odd,
            Parity::Indefinite => false,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Indefinite => "indefinite",
            Parity::Zero => "zero",
        })
    }
}

/// An element of `Λ_n` in canonical sparse form (no zero coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl GrassmannElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        GrassmannElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn constant(n: usize, value: Rational) -> Self {
        let mut e = Self::zero(n);
        e.add_term(0, value);
        e
    }

    /// The generator `θ_index` (1-based).
    pub fn generator(n: usize, index: usize) -> Result<Self> {
        let mask = monomial_from_indices(&[index], n)?;
        Ok(Self::monomial(n, mask, Rational::one()))
    }

    /// `coeff · θ_mask`. Panics if the mask uses generators beyond `n`.
    pub fn monomial(n: usize, mask: Monomial, coeff: Rational) -> Self {
        assert!(mask & !full_mask(n) == 0, "monomial outside Λ_{n}");
        let mut e = Self::zero(n);
        e.add_term(mask, coeff);
        e
    }

    /// Builds an element from `(mask, coeff)` pairs, summing repeated masks.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        if n > MAX_GENERATORS {
            return Err(Error::Invalid(format!("at most {MAX_GENERATORS} generators")));
        }
        let mut e = Self::zero(n);
        for (mask, c) in terms {
            if mask & !full_mask(n) != 0 {
                let index = 64 - mask.leading_zeros() as usize;
                return Err(Error::GeneratorRange { index, n });
            }
            e.add_term(mask, c);
        }
        Ok(e)
    }

    fn add_term(&mut self, mask: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Terms in increasing bitmask order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mask: Monomial) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "elements of Λ_{} and Λ_{}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Supercommutative product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = monomial_product(*ma, *mb) {
                    let c = ca * cb;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GrassmannElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.n);
        }
        GrassmannElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, c * r)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (false, false) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Indefinite,
        }
    }

    /// Coefficient of the empty monomial, i.e. the image under `ε: Λ_n → K`.
    pub fn body(&self) -> Rational {
        self.coeff(0)
    }

    /// Everything but the body; lies in the nilpotent ideal.
    pub fn nil_part(&self) -> Self {
        self.filter(|m| m != 0)
    }

    pub fn even_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    fn filter(&self, keep: impl Fn(Monomial) -> bool) -> Self {
        GrassmannElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Inverse `b⁻¹ Σ_{k=0..n} (-c b⁻¹)^k` with `b` the body and `c` the
    /// nilpotent part; the series is exact because `c^{n+1} = 0`.
    pub fn inv(&self) -> Result<Self> {
        let b = self.body();
        if b.is_zero() {
            return Err(Error::NotInvertible("zero body".into()));
        }
        let b_inv = b.recip();
        let x = self.nil_part().scale(&-b_inv.clone());
        let mut sum = Self::one(self.n);
        let mut power = Self::one(self.n);
        for _ in 0..self.n {
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&b_inv))
    }

    /// Λ_{n'} copy with the same terms; `n'` must cover every used generator.
    pub fn with_generators(&self, n: usize) -> Result<Self> {
        Self::from_terms(n, self.terms.iter().map(|(m, c)| (*m, c.clone())))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&GrassmannElement> for &GrassmannElement {
            type Output = GrassmannElement;

            /// Panics if the generator counts differ; use the `try_` form on untrusted input.
            fn $method(self, rhs: &GrassmannElement) -> GrassmannElement {
                self.$checked(rhs).expect("Grassmann generator counts differ")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &GrassmannElement {
    type Output = GrassmannElement;

    fn neg(self) -> GrassmannElement {
        GrassmannElement::neg(self)
    }
}

impl fmt::Display for GrassmannElement {
    /// Canonical text, e.g. `3 - 1/2*t1 + t1*t2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().map(|(m, c)| {
            let factors: Vec<String> =
                monomial_indices(*m).into_iter().map(|i| format!("t{i}")).collect();
            (c.clone(), factors)
        });
        f.write_str(&crate::expr::render_terms(terms))
    }
}

/// A parity preserving algebra morphism `Λ_src → Λ_dst`, fixed by the odd
/// images of the generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrassmannMorphism {
    src: usize,
    dst: usize,
    images: Vec<GrassmannElement>,
}

impl GrassmannMorphism {
    pub fn new(src: usize, dst: usize, images: Vec<GrassmannElement>) -> Result<Self> {
        if src > MAX_GENERATORS || dst > MAX_GENERATORS {
            return Err(Error::Invalid(format!("at most {MAX_GENERATORS} generators")));
        }
        if images.len() != src {
            return Err(Error::Dimension(format!(
                "morphism from Λ_{src} needs {src} images, got {}",
                images.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if img.n() != dst {
                return Err(Error::Dimension(format!(
                    "image of θ{} lies in Λ_{}, expected Λ_{dst}",
                    i + 1,
                    img.n()
                )));
            }
            if !img.parity().fits(true) {
                return Err(Error::Parity(format!(
                    "image of θ{} is {} ({img}), must be odd",
                    i + 1,
                    img.parity()
                )));
            }
        }
        Ok(GrassmannMorphism { src, dst, images })
    }

    pub fn identity(n: usize) -> Self {
        let images = (1..=n).map(|i| GrassmannElement::generator(n, i).unwrap()).collect();
        GrassmannMorphism { src: n, dst: n, images }
    }

    /// `ε: Λ_n → Λ_0`, removing all generators.
    pub fn terminal(n: usize) -> Self {
        GrassmannMorphism { src: n, dst: 0, images: vec![GrassmannElement::zero(0); n] }
    }

    /// `c: Λ_0 → Λ_m`.
    pub fn initial(m: usize) -> Self {
        GrassmannMorphism { src: 0, dst: m, images: Vec::new() }
    }

    /// `θ_i ↦ θ_i` from `Λ_n` into `Λ_m`, `n ≤ m`.
    pub fn inclusion(n: usize, m: usize) -> Result<Self> {
        if n > m {
            return Err(Error::Dimension(format!("cannot include Λ_{n} into Λ_{m}")));
        }
        let images = (1..=n).map(|i| GrassmannElement::generator(m, i)).collect::<Result<_>>()?;
        Ok(GrassmannMorphism { src: n, dst: m, images })
    }

    /// `φ_l`: sends `θ_l` to zero and fixes the other generators.
    pub fn kill_generator(n: usize, l: usize) -> Result<Self> {
        if l == 0 || l > n {
            return Err(Error::GeneratorRange { index: l, n });
        }
        let images = (1..=n)
            .map(|i| {
                if i == l {
                    GrassmannElement::zero(n)
                } else {
                    GrassmannElement::generator(n, i).unwrap()
                }
            })
            .collect();
        Ok(GrassmannMorphism { src: n, dst: n, images })
    }

    /// `Λ_1 → Λ_m`, `θ ↦ image`.
    pub fn from_odd(image: GrassmannElement) -> Result<Self> {
        let dst = image.n();
        Self::new(1, dst, vec![image])
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn images(&self) -> &[GrassmannElement] {
        &self.images
    }

    /// Image of a single monomial: product of generator images in order.
    fn apply_monomial(&self, mask: Monomial) -> GrassmannElement {
        monomial_indices(mask)
            .into_iter()
            .fold(GrassmannElement::one(self.dst), |acc, i| &acc * &self.images[i - 1])
    }

    pub fn apply(&self, a: &GrassmannElement) -> Result<GrassmannElement> {
        if a.n() != self.src {
            return Err(Error::Dimension(format!(
                "morphism from Λ_{} applied to an element of Λ_{}",
                self.src,
                a.n()
            )));
        }
        let mut out = GrassmannElement::zero(self.dst);
        for (m, c) in a.terms() {
            let img = self.apply_monomial(m);
            out = &out + &img.scale(c);
        }
        Ok(out)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &GrassmannMorphism) -> Result<GrassmannMorphism> {
        if first.dst != self.src {
            return Err(Error::Dimension(format!(
                "cannot compose Λ_{}→Λ_{} after Λ_{}→Λ_{}",
                self.src, self.dst, first.src, first.dst
            )));
        }
        let images = first.images.iter().map(|img| self.apply(img)).collect::<Result<_>>()?;
        Ok(GrassmannMorphism { src: first.src, dst: self.dst, images })
    }
}

impl fmt::Display for GrassmannMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ_{} → Λ_{} [", self.src, self.dst)?;
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "t{} ↦ {img}", i + 1)?;
        }
        f.write_str("]")
    }
}

/// Convenience for tests and examples: the element `Σ c·θ_idx` from 1-based index lists.
pub fn element(n: usize, terms: &[(&[usize], Rational)]) -> Result<GrassmannElement> {
    let mut pairs = Vec::with_capacity(terms.len());
    for (idx, c) in terms {
        pairs.push((monomial_from_indices(idx, n)?, c.clone()));
    }
    GrassmannElement::from_terms(n, pairs)
}
