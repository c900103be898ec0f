//! Standard super vector spaces `K^{p|q}`, even multilinear maps and the
//! braiding `v ⊗ w ↦ (-1)^{p(v)p(w)} w ⊗ v`.
//!
//! Basis indices are 0-based in the API: `0..p` even, `p..p+q` odd. JSON
//! formats use 1-based indices.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SuperSpace {
    pub p: usize,
    pub q: usize,
}

impl SuperSpace {
    pub const fn new(p: usize, q: usize) -> Self {
        SuperSpace { p, q }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Parity of basis vector `i`: odd iff `i >= p`.
    pub fn is_odd(&self, i: usize) -> bool {
        i >= self.p
    }

    pub fn odd_indices(&self) -> std::ops::Range<usize> {
        self.p..self.p + self.q
    }
}

impl std::fmt::Display for SuperSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K^{{{}|{}}}", self.p, self.q)
    }
}

/// `Π(V)`: swaps the even and odd dimensions.
pub fn pi_reverse(v: SuperSpace) -> SuperSpace {
    SuperSpace::new(v.q, v.p)
}

/// `V* = V_0* ⊕ Π(V_1*)`; the dual basis vector `e^j` has the parity of `e_j`.
pub fn dual_space(v: SuperSpace) -> SuperSpace {
    SuperSpace::new(v.p, v.q)
}

/// Matrix of `e^j(e_i) = δ_i^j`, rows indexed by `j`.
pub fn dual_pairing(v: SuperSpace) -> Vec<Vec<Rational>> {
    (0..v.dim())
        .map(|j| {
            (0..v.dim())
                .map(|i| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// An element `v ∈ V` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperVector {
    space: SuperSpace,
    coords: Vec<Rational>,
}

impl SuperVector {
    pub fn new(space: SuperSpace, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} coordinates for {space}",
                coords.len()
            )));
        }
        Ok(SuperVector { space, coords })
    }

    pub fn zero(space: SuperSpace) -> Self {
        SuperVector { space, coords: vec![Rational::zero(); space.dim()] }
    }

    pub fn basis(space: SuperSpace, i: usize) -> Self {
        let mut v = Self::zero(space);
        v.coords[i] = Rational::one();
        v
    }

    pub fn space(&self) -> SuperSpace {
        self.space
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// True when all odd coordinates vanish.
    pub fn is_even(&self) -> bool {
        self.coords[self.space.p..].iter().all(Zero::is_zero)
    }
}

type EntryKey = (Vec<usize>, usize);

/// An even multilinear map `V_1 × … × V_k → W`, stored as the coefficients of
/// `f(e_{i1}, …, e_{ik})` along the codomain basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultilinearMap {
    domains: Vec<SuperSpace>,
    codomain: SuperSpace,
    entries: BTreeMap<EntryKey, Rational>,
}

impl MultilinearMap {
    pub fn zero(domains: Vec<SuperSpace>, codomain: SuperSpace) -> Self {
        MultilinearMap { domains, codomain, entries: BTreeMap::new() }
    }

    pub fn identity(v: SuperSpace) -> Self {
        let mut f = Self::zero(vec![v], v);
        for i in 0..v.dim() {
            f.set(&[i], i, Rational::one()).expect("identity is even");
        }
        f
    }

    pub fn domains(&self) -> &[SuperSpace] {
        &self.domains
    }

    pub fn codomain(&self) -> SuperSpace {
        self.codomain
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize], usize, &Rational)> + '_ {
        self.entries.iter().map(|((i, o), c)| (i.as_slice(), *o, c))
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Parity of the input tuple: sum of basis parities mod 2.
    pub fn input_parity(&self, inputs: &[usize]) -> bool {
        inputs
            .iter()
            .zip(&self.domains)
            .fold(false, |acc, (i, d)| acc ^ d.is_odd(*i))
    }

    fn check_key(&self, inputs: &[usize], out: usize) -> Result<()> {
        if inputs.len() != self.domains.len() {
            return Err(Error::Dimension(format!(
                "{} inputs for a {}-linear map",
                inputs.len(),
                self.domains.len()
            )));
        }
        for (k, (i, d)) in inputs.iter().zip(&self.domains).enumerate() {
            if *i >= d.dim() {
                return Err(Error::Dimension(format!(
                    "basis index {} out of range for argument {} in {d}",
                    i + 1,
                    k + 1
                )));
            }
        }
        if out >= self.codomain.dim() {
            return Err(Error::Dimension(format!(
                "output index {} out of range for {}",
                out + 1,
                self.codomain
            )));
        }
        Ok(())
    }

    /// Sets `f(e_inputs)` along `e_out`. Entries that would make `f` odd are rejected.
    pub fn set(&mut self, inputs: &[usize], out: usize, coeff: Rational) -> Result<()> {
        self.check_key(inputs, out)?;
        let key = (inputs.to_vec(), out);
        if coeff.is_zero() {
            self.entries.remove(&key);
            return Ok(());
        }
        if self.input_parity(inputs) != self.codomain.is_odd(out) {
            return Err(Error::Parity(format!(
                "entry {inputs:?} -> {out} would make the map odd"
            )));
        }
        self.entries.insert(key, coeff);
        Ok(())
    }

    pub fn get(&self, inputs: &[usize], out: usize) -> Rational {
        self.entries
            .get(&(inputs.to_vec(), out))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Checks every stored entry against the even-parity constraint.
    pub fn validate_even(&self) -> Result<()> {
        for (inputs, out) in self.entries.keys() {
            self.check_key(inputs, *out)?;
            if self.input_parity(inputs) != self.codomain.is_odd(*out) {
                return Err(Error::Parity(format!("entry {inputs:?} -> {out} is odd")));
            }
        }
        Ok(())
    }

    /// `K`-multilinear evaluation on plain vectors.
    pub fn evaluate(&self, args: &[SuperVector]) -> Result<SuperVector> {
        if args.len() != self.domains.len() {
            return Err(Error::Dimension(format!(
                "{} arguments for a {}-linear map",
                args.len(),
                self.domains.len()
            )));
        }
        for (a, d) in args.iter().zip(&self.domains) {
            if a.space != *d {
                return Err(Error::Dimension(format!("argument in {} expected {d}", a.space)));
            }
        }
        let mut out = SuperVector::zero(self.codomain);
        for ((inputs, o), c) in &self.entries {
            let w = inputs
                .iter()
                .zip(args)
                .fold(c.clone(), |acc, (i, a)| acc * &a.coords[*i]);
            out.coords[*o] += w;
        }
        Ok(out)
    }
}

/// A tensor in `V_1 ⊗ … ⊗ V_k` in the product basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    factors: Vec<SuperSpace>,
    coeffs: BTreeMap<Vec<usize>, Rational>,
}

impl Tensor {
    pub fn new<I>(factors: Vec<SuperSpace>, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut t = Tensor { factors, coeffs: BTreeMap::new() };
        for (idx, c) in coeffs {
            if idx.len() != t.factors.len() || idx.iter().zip(&t.factors).any(|(i, f)| *i >= f.dim())
            {
                return Err(Error::Dimension(format!("tensor index {idx:?} out of range")));
            }
            if !c.is_zero() {
                *t.coeffs.entry(idx).or_insert_with(Rational::zero) += c;
            }
        }
        t.coeffs.retain(|_, c| !c.is_zero());
        Ok(t)
    }

    pub fn factors(&self) -> &[SuperSpace] {
        &self.factors
    }

    pub fn coeff(&self, idx: &[usize]) -> Rational {
        self.coeffs.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&[usize], &Rational)> + '_ {
        self.coeffs.iter().map(|(i, c)| (i.as_slice(), c))
    }

    /// Braids factors `pos` and `pos + 1` with the sign rule.
    pub fn braid_adjacent(&self, pos: usize) -> Result<Tensor> {
        if pos + 1 >= self.factors.len() {
            return Err(Error::Dimension(format!(
                "no factors {pos} and {} to braid",
                pos + 1
            )));
        }
        let mut factors = self.factors.clone();
        factors.swap(pos, pos + 1);
        let (v, w) = (self.factors[pos], self.factors[pos + 1]);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(idx, c)| {
                let mut swapped = idx.clone();
                swapped.swap(pos, pos + 1);
                let negative = v.is_odd(idx[pos]) && w.is_odd(idx[pos + 1]);
                (swapped, if negative { -c } else { c.clone() })
            })
            .collect();
        Ok(Tensor { factors, coeffs })
    }
}

/// `c_{V,W}: V ⊗ W → W ⊗ V`.
pub fn braid_swap(v: SuperSpace, w: SuperSpace, t: &Tensor) -> Result<Tensor> {
    if t.factors != [v, w] {
        return Err(Error::Dimension(format!(
            "tensor over {:?} is not in {v} ⊗ {w}",
            t.factors
        )));
    }
    t.braid_adjacent(0)
}

/// True iff `f` is invariant under the braided action of adjacent
/// transpositions on its arguments. On purely odd arguments this is the
/// alternating condition. Maps whose domains differ are never supersymmetric.
pub fn symmetrize_check(f: &MultilinearMap) -> bool {
    let Some(first) = f.domains.first() else {
        return true;
    };
    if f.domains.iter().any(|d| d != first) {
        return false;
    }
    let v = *first;
    for pos in 0..f.arity().saturating_sub(1) {
        for ((inputs, out), c) in &f.entries {
            let mut swapped = inputs.clone();
            swapped.swap(pos, pos + 1);
            let sign = v.is_odd(inputs[pos]) && v.is_odd(inputs[pos + 1]);
            let expected = if sign { -c } else { c.clone() };
            if f.get(&swapped, *out) != expected {
                return false;
            }
        }
    }
    true
}

/// Dimension of the space of supersymmetric `degree`-linear even maps
/// `V^degree → W`, counted orbit by orbit under adjacent braidings.
///
/// An orbit of input tuples supports one free coefficient per codomain basis
/// vector of matching parity, unless following the braiding signs around the
/// orbit forces the coefficient to equal its own negative.
pub fn supersymmetric_dimension(v: SuperSpace, degree: usize, w: SuperSpace) -> usize {
    if degree == 0 {
        return w.p;
    }
    let dim = v.dim();
    if dim == 0 {
        return 0;
    }
    let mut seen: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut total = 0;
    let mut tuple = vec![0usize; degree];
    loop {
        if !seen.contains_key(&tuple) {
            let mut consistent = true;
            let mut queue = VecDeque::from([(tuple.clone(), false)]);
            seen.insert(tuple.clone(), false);
            while let Some((t, negative)) = queue.pop_front() {
                for pos in 0..degree - 1 {
                    let mut s = t.clone();
                    s.swap(pos, pos + 1);
                    let flip = v.is_odd(t[pos]) && v.is_odd(t[pos + 1]);
                    let sign = negative ^ flip;
                    match seen.get(&s) {
                        Some(prev) if *prev != sign => consistent = false,
                        Some(_) => {}
                        None => {
                            seen.insert(s.clone(), sign);
                            queue.push_back((s, sign));
                        }
                    }
                }
            }
            if consistent {
                let odd = tuple.iter().fold(false, |acc, i| acc ^ v.is_odd(*i));
                total += if odd { w.q } else { w.p };
            }
        }
        // next tuple in [dim]^degree
        let mut k = degree;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < dim {
                break;
            }
            tuple[k] = 0;
        }
    }
}
