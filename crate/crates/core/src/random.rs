//! Seeded samplers for property tests, group checks and demo inputs.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::grassmann::{full_mask, GrassmannElement, GrassmannMorphism};
use crate::points::LambdaPoint;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::skeleton::{Skeleton, Superfunction};
use crate::superlinear::{MultilinearMap, SuperSpace};
use crate::supermatrix::SuperMatrix;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Small rationals, mostly integers in `[-3, 3]`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    let num = rng.gen_range(-3i64..=3);
    let den = if rng.gen_bool(0.2) { rng.gen_range(2i64..=3) } else { 1 };
    Rational::new(num.into(), den.into())
}

fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = rational(rng);
        if r != Rational::from_integer(0.into()) {
            return r;
        }
    }
}

/// An element of `Λ_n` whose monomials are kept with probability `density`;
/// `odd` restricts to one parity.
pub fn element_with<R: Rng>(rng: &mut R, n: usize, odd: Option<bool>, density: f64) -> GrassmannElement {
    let mut terms = Vec::new();
    for m in 0..=full_mask(n) {
        if odd.is_none_or(|o| (m.count_ones() % 2 == 1) == o) && rng.gen_bool(density) {
            terms.push((m, nonzero_rational(rng)));
        }
    }
    GrassmannElement::from_terms(n, terms).expect("masks within n generators")
}

pub fn element<R: Rng>(rng: &mut R, n: usize) -> GrassmannElement {
    element_with(rng, n, None, 0.5)
}

pub fn even_element<R: Rng>(rng: &mut R, n: usize) -> GrassmannElement {
    element_with(rng, n, Some(false), 0.5)
}

pub fn odd_element<R: Rng>(rng: &mut R, n: usize) -> GrassmannElement {
    element_with(rng, n, Some(true), 0.5)
}

pub fn morphism<R: Rng>(rng: &mut R, n: usize, m: usize) -> GrassmannMorphism {
    let images = (0..n).map(|_| odd_element(rng, m)).collect();
    GrassmannMorphism::new(n, m, images).expect("odd images")
}

pub fn point<R: Rng>(rng: &mut R, space: SuperSpace, n: usize) -> LambdaPoint {
    let coords = (0..space.dim())
        .map(|i| element_with(rng, n, Some(space.is_odd(i)), 0.5))
        .collect();
    LambdaPoint::new(space, n, coords).expect("parities match")
}

/// An even multilinear map with about half of the allowed entries set.
pub fn multilinear<R: Rng>(rng: &mut R, domains: Vec<SuperSpace>, codomain: SuperSpace) -> MultilinearMap {
    let mut f = MultilinearMap::zero(domains.clone(), codomain);
    for tuple in crate::points::basis_tuples(&domains) {
        let parity = f.input_parity(&tuple);
        for out in (0..codomain.dim()).filter(|&o| codomain.is_odd(o) == parity) {
            if rng.gen_bool(0.5) {
                f.set(&tuple, out, nonzero_rational(rng)).expect("parity respected");
            }
        }
    }
    f
}

pub fn supermatrix<R: Rng>(rng: &mut R, space: SuperSpace, n: usize) -> SuperMatrix {
    let d = space.dim();
    let entries = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| element_with(rng, n, Some(space.is_odd(i) != space.is_odd(j)), 0.5))
                .collect()
        })
        .collect();
    SuperMatrix::new(space, n, entries).expect("block parities")
}

/// Resamples until both body blocks are invertible.
pub fn invertible_supermatrix<R: Rng>(rng: &mut R, space: SuperSpace, n: usize) -> SuperMatrix {
    loop {
        let a = supermatrix(rng, space, n);
        if a.is_invertible() {
            return a;
        }
    }
}

pub fn poly<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32) -> Poly {
    let count = rng.gen_range(0..=3);
    let terms = (0..count)
        .map(|_| {
            let mut budget = rng.gen_range(0..=max_degree);
            let exps = (0..nvars)
                .map(|_| {
                    let k = rng.gen_range(0..=budget);
                    budget -= k;
                    k
                })
                .collect();
            (exps, nonzero_rational(rng))
        })
        .collect::<Vec<_>>();
    Poly::from_terms(nvars, terms).expect("exponent vectors match")
}

pub fn superfunction<R: Rng>(rng: &mut R, p: usize, q: usize, max_degree: u32) -> Superfunction {
    let mut terms = Vec::new();
    for m in 0..=full_mask(q) {
        if rng.gen_bool(0.6) {
            terms.push((m, poly(rng, p, max_degree)));
        }
    }
    Superfunction::from_terms(p, q, terms).expect("masks within q")
}

pub fn skeleton<R: Rng>(rng: &mut R, domain: SuperSpace, codomain: SuperSpace, max_degree: u32) -> Skeleton {
    let mut s = Skeleton::new(domain, codomain, None).expect("no box");
    for mask in 0..=full_mask(domain.q) {
        for out in 0..codomain.dim() {
            if codomain.is_odd(out) == (mask.count_ones() % 2 == 1) && rng.gen_bool(0.5) {
                s.set(mask, out, poly(rng, domain.p, max_degree)).expect("parity slot");
            }
        }
    }
    s
}
