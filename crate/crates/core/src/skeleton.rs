//! Supersmooth maps between superdomains `K^{p|q} → K^{p'|q'}` given by their
//! skeletons: polynomial coefficient maps `f_m(x)` on the `m`-th exterior
//! power of the odd directions.
//!
//! A component is stored on increasing odd index sets `I = {i_1 < … < i_m}`
//! as `f_m(x)(e_{i_1}, …, e_{i_m})`. Evaluation at a point with body `u`, even
//! nilpotent part `v_0` and odd part `v_1` is the terminating Taylor series
//!
//! ```text
//! Σ_{k,m} 1/(k! m!) · D^k f_m(u)(v_0, …, v_0, v_1, …, v_1)
//! ```
//!
//! lifted with the reversed Grassmann order. The `m!` orderings of each odd
//! index set contribute equal terms, so a superfunction term `p_I(x) θ_I`
//! corresponds to `f_m(e_I) = (-1)^{m(m-1)/2} p_I` with no factorial.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr;
use crate::grassmann::{full_mask, monomial_indices, monomial_product, GrassmannElement, GrassmannMorphism, Monomial};
use crate::linalg::{self, Solution};
use crate::points::{self, LambdaPoint, PointFamily};
use crate::poly::{self, factor_strings, Poly};
use crate::random;
use crate::rational::{factorial, int, sign, Rational};
use crate::superlinear::{MultilinearMap, SuperSpace};

/// Closed rational box `Π [lo_i, hi_i]` constraining the body of the even coordinates.
pub type DomBox = Vec<(Rational, Rational)>;

/// Largest polynomial degree probed by the adaptive degree detection.
pub const MAX_LINE_DEGREE: usize = 12;

fn reorder_sign(m: usize) -> Rational {
    sign(m * m.saturating_sub(1) / 2 % 2 == 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    domain: SuperSpace,
    codomain: SuperSpace,
    dom_box: Option<DomBox>,
    maps: BTreeMap<(Monomial, usize), Poly>,
}

impl Skeleton {
    pub fn new(domain: SuperSpace, codomain: SuperSpace, dom_box: Option<DomBox>) -> Result<Self> {
        if let Some(b) = &dom_box {
            if b.len() != domain.p {
                return Err(Error::Dimension(format!(
                    "a box for {domain} needs {} intervals, got {}",
                    domain.p,
                    b.len()
                )));
            }
            if let Some((lo, hi)) = b.iter().find(|(lo, hi)| lo > hi) {
                return Err(Error::Invalid(format!("empty interval [{lo}, {hi}]")));
            }
        }
        Ok(Skeleton { domain, codomain, dom_box, maps: BTreeMap::new() })
    }

    /// `id_V`: `f_0 = (x_1, …, x_p)` and `f_1(e_j) = e_{p+j}`.
    pub fn identity(v: SuperSpace) -> Self {
        let mut s = Skeleton::new(v, v, None).expect("no box");
        for i in 0..v.p {
            s.set(0, i, Poly::var(v.p, i + 1).expect("in range")).expect("even slot");
        }
        for j in 0..v.q {
            s.set(1 << j, v.p + j, Poly::one(v.p)).expect("odd slot");
        }
        s
    }

    /// Sets `f_{|I|}(e_I)` in output slot `out` (both 0-based; `I` a bitmask over odd directions).
    pub fn set(&mut self, odd: Monomial, out: usize, poly: Poly) -> Result<()> {
        if odd & !full_mask(self.domain.q) != 0 {
            return Err(Error::Dimension(format!(
                "odd index set {:?} outside {}",
                monomial_indices(odd),
                self.domain
            )));
        }
        if out >= self.codomain.dim() {
            return Err(Error::Dimension(format!("output {} outside {}", out + 1, self.codomain)));
        }
        if poly.nvars() != self.domain.p {
            return Err(Error::Dimension(format!(
                "coefficient in {} variables on {}",
                poly.nvars(),
                self.domain
            )));
        }
        if poly.is_zero() {
            self.maps.remove(&(odd, out));
            return Ok(());
        }
        if (odd.count_ones() % 2 == 1) != self.codomain.is_odd(out) {
            return Err(Error::Parity(format!(
                "f_{} cannot take values in the {} slot {}",
                odd.count_ones(),
                if self.codomain.is_odd(out) { "odd" } else { "even" },
                out + 1
            )));
        }
        self.maps.insert((odd, out), poly);
        Ok(())
    }

    pub fn get(&self, odd: Monomial, out: usize) -> Poly {
        self.maps.get(&(odd, out)).cloned().unwrap_or_else(|| Poly::zero(self.domain.p))
    }

    pub fn domain(&self) -> SuperSpace {
        self.domain
    }

    pub fn codomain(&self) -> SuperSpace {
        self.codomain
    }

    pub fn dom_box(&self) -> Option<&[(Rational, Rational)]> {
        self.dom_box.as_deref()
    }

    pub fn with_dom_box(mut self, dom_box: Option<DomBox>) -> Result<Self> {
        let checked = Skeleton::new(self.domain, self.codomain, dom_box)?;
        self.dom_box = checked.dom_box;
        Ok(self)
    }

    /// Components `(odd index set, output slot, coefficient)`, ascending.
    pub fn components(&self) -> impl Iterator<Item = (Monomial, usize, &Poly)> + '_ {
        self.maps.iter().map(|((m, o), p)| (*m, *o, p))
    }

    pub fn degree(&self) -> usize {
        self.maps.values().map(|p| p.degree() as usize).max().unwrap_or(0)
    }

    pub fn contains_body(&self, body: &[Rational]) -> bool {
        match &self.dom_box {
            None => true,
            Some(b) => b.iter().zip(body).all(|((lo, hi), x)| lo <= x && x <= hi),
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.domain, self.codomain)?;
        for ((mask, out), poly) in &self.maps {
            let idx: Vec<String> = monomial_indices(*mask).iter().map(|i| i.to_string()).collect();
            write!(
                f,
                "\n  f_{}({}) -> e{}: {poly}",
                mask.count_ones(),
                idx.join(","),
                out + 1
            )?;
        }
        Ok(())
    }
}

/// All orderings of `items` with the sign of the permutation.
fn signed_permutations(items: &[usize]) -> Vec<(Vec<usize>, bool)> {
    if items.is_empty() {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (pos, &first) in items.iter().enumerate() {
        let rest: Vec<usize> = items.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, v)| *v).collect();
        for (mut tail, odd) in signed_permutations(&rest) {
            tail.insert(0, first);
            out.push((tail, odd != (pos % 2 == 1)));
        }
    }
    out
}

fn tuples(range: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..range).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Evaluates the skeleton at a `Λ`-point.
pub fn skeleton_eval(f: &Skeleton, x: &LambdaPoint) -> Result<LambdaPoint> {
    if x.space() != f.domain {
        return Err(Error::Dimension(format!(
            "point of {} for a map on {}",
            x.space(),
            f.domain
        )));
    }
    let n = x.n();
    let (body, nil) = x.decompose();
    let u = &body.coords()[..f.domain.p];
    if !f.contains_body(u) {
        let shown: Vec<String> = u.iter().map(ToString::to_string).collect();
        return Err(Error::Domain(format!("body ({}) is not in the domain box", shown.join(", "))));
    }
    let v0 = nil.even_coords();
    let v1 = nil.odd_coords();
    let mut coords = vec![GrassmannElement::zero(n); f.codomain.dim()];

    // Even increments: the products λ_{a_k} ⋯ λ_{a_1}, nonzero only for 2k ≤ n.
    let mut even_terms: Vec<(Vec<usize>, GrassmannElement)> = Vec::new();
    for k in 0..=n / 2 {
        for a in tuples(f.domain.p, k) {
            let prod = a
                .iter()
                .rev()
                .fold(GrassmannElement::one(n), |acc, &i| &acc * &v0[i]);
            if !prod.is_zero() {
                even_terms.push((a, prod));
            }
        }
    }

    for ((mask, out), poly) in &f.maps {
        let odd_idx: Vec<usize> = monomial_indices(*mask).iter().map(|i| i - 1).collect();
        let m = odd_idx.len();
        // Σ over orderings b of I of f_m(e_b) μ_{b_m} ⋯ μ_{b_1}, with f_m(e_b) = sgn · f_m(e_I).
        let mut odd_sum = GrassmannElement::zero(n);
        for (order, negative) in signed_permutations(&odd_idx) {
            let prod = order.iter().rev().fold(GrassmannElement::one(n), |acc, &b| &acc * &v1[b]);
            odd_sum = if negative { &odd_sum - &prod } else { &odd_sum + &prod };
        }
        if odd_sum.is_zero() {
            continue;
        }
        let inv_m = factorial(m).recip();
        for (a, even_prod) in &even_terms {
            let k = a.len();
            if k > poly.degree() as usize {
                continue;
            }
            let coeff = poly.derivatives(a).eval(u);
            if coeff.is_zero() {
                continue;
            }
            let scale = coeff * &inv_m / factorial(k);
            // λ_{a_k} ⋯ λ_{a_1} stands to the right of the odd factors.
            let term = (&odd_sum * even_prod).scale(&scale);
            coords[*out] = &coords[*out] + &term;
        }
    }
    LambdaPoint::new(f.codomain, n, coords)
}

/// A skeleton seen as a point family on its domain.
#[derive(Clone, Debug)]
pub struct SkeletonFamily {
    pub skeleton: Skeleton,
    pub max_n: usize,
    domains: [SuperSpace; 1],
}

impl SkeletonFamily {
    pub fn new(skeleton: Skeleton, max_n: usize) -> Self {
        let domains = [skeleton.domain()];
        SkeletonFamily { skeleton, max_n, domains }
    }
}

impl PointFamily for SkeletonFamily {
    fn domains(&self) -> &[SuperSpace] {
        &self.domains
    }

    fn codomain(&self) -> SuperSpace {
        self.skeleton.codomain()
    }

    fn max_n(&self) -> usize {
        self.max_n
    }

    fn eval(&self, args: &[LambdaPoint]) -> Result<LambdaPoint> {
        match args {
            [x] if x.n() <= self.max_n => skeleton_eval(&self.skeleton, x),
            [x] => Err(Error::Domain(format!("family stops at Λ_{}, got Λ_{}", self.max_n, x.n()))),
            _ => Err(Error::Dimension(format!("{} arguments for a map of one argument", args.len()))),
        }
    }
}

/// `(b | θ_1, …, θ_q)` over `Λ_q`.
fn probe_point(domain: SuperSpace, body: &[Rational]) -> LambdaPoint {
    let q = domain.q;
    let coords = (0..domain.dim())
        .map(|i| {
            if i < domain.p {
                GrassmannElement::constant(q, body[i].clone())
            } else {
                GrassmannElement::generator(q, i - domain.p + 1).expect("in range")
            }
        })
        .collect();
    LambdaPoint::new(domain, q, coords).expect("valid probe")
}

fn grid_nodes(interval: Option<&(Rational, Rational)>, degree: usize) -> Result<Vec<Rational>> {
    match interval {
        None => Ok((0..=degree).map(|i| int(i as i64)).collect()),
        Some((lo, hi)) if degree == 0 => Ok(vec![(lo + hi) / int(2)]),
        Some((lo, hi)) if lo == hi => Err(Error::Reconstruction(format!(
            "the degenerate interval [{lo}, {hi}] cannot carry a degree {degree} interpolation"
        ))),
        Some((lo, hi)) => {
            let step = (hi - lo) / int(degree as i64);
            Ok((0..=degree).map(|i| lo + &step * int(i as i64)).collect())
        }
    }
}

type Oracle<'a> = dyn Fn(&LambdaPoint) -> Result<LambdaPoint> + 'a;

/// Reads a skeleton off an evaluation oracle: at `(b | θ_1, …, θ_q)` the
/// coefficient of `θ_I` in slot `out` is `(-1)^{m(m-1)/2} f_m(b)(e_I)`, and
/// each coefficient is interpolated on a tensor grid that resolves every
/// polynomial of degree at most `degree` in each variable.
fn skeleton_from_oracle(
    domain: SuperSpace,
    codomain: SuperSpace,
    dom_box: Option<&[(Rational, Rational)]>,
    degree: usize,
    oracle: &Oracle<'_>,
) -> Result<Skeleton> {
    let nodes: Vec<Vec<Rational>> = (0..domain.p)
        .map(|i| grid_nodes(dom_box.map(|b| &b[i]), degree))
        .collect::<Result<_>>()?;
    let size = poly::grid_size(&nodes);
    let mut values: BTreeMap<(Monomial, usize), Vec<Rational>> = BTreeMap::new();
    for flat in 0..size {
        let body: Vec<Rational> = poly::grid_index(&nodes, flat)
            .iter()
            .enumerate()
            .map(|(v, i)| nodes[v][*i].clone())
            .collect();
        let y = oracle(&probe_point(domain, &body))?;
        if y.space() != codomain {
            return Err(Error::Dimension(format!("oracle returned a point of {}", y.space())));
        }
        for (out, c) in y.coords().iter().enumerate() {
            for (mask, v) in c.terms() {
                let slot = values.entry((mask, out)).or_insert_with(|| vec![Rational::zero(); size]);
                slot[flat] = reorder_sign(mask.count_ones() as usize) * v;
            }
        }
    }
    let mut s = Skeleton::new(domain, codomain, dom_box.map(<[_]>::to_vec))?;
    for ((mask, out), vals) in values {
        s.set(mask, out, poly::interpolate_grid(&nodes, &vals))?;
    }
    Ok(s)
}

/// Points over `Λ_{q+4}` with off-grid bodies, two even nilpotent pairs and
/// cross terms, on which a reconstructed skeleton is compared with its source.
fn padded_probes(domain: SuperSpace, dom_box: Option<&[(Rational, Rational)]>) -> Vec<LambdaPoint> {
    let q = domain.q;
    let n = q + 4;
    let gen = |i: usize| GrassmannElement::generator(n, i).expect("in range");
    let pair_a = &gen(q + 1) * &gen(q + 2);
    let pair_b = &gen(q + 3) * &gen(q + 4);
    (0..3usize)
        .map(|t| {
            let coords = (0..domain.dim())
                .map(|i| {
                    if i < domain.p {
                        let body = match dom_box {
                            Some(b) => {
                                let (lo, hi) = &b[i];
                                lo + (hi - lo) * Rational::new((2 * t + 1).into(), 7.into())
                            }
                            None => Rational::new((7 * t + 2 * i + 3).into(), 5.into()),
                        };
                        let mut c = GrassmannElement::constant(n, body);
                        if i % 2 == t % 2 {
                            c = &c + &pair_a;
                        }
                        if i == t % domain.p.max(1) {
                            c = &c + &pair_b.scale(&int(t as i64 + 1));
                        }
                        if q >= 2 && i == 0 {
                            c = &c + &(&gen(1) * &gen(2));
                        }
                        c
                    } else {
                        let j = i - domain.p + 1;
                        let mut c = gen(j).scale(&int(t as i64 + 1));
                        if j == 1 {
                            c = &c + &(&pair_a * &gen(q + 3));
                        }
                        if j == q {
                            c = &c + &gen(q + 4);
                        }
                        c
                    }
                })
                .collect();
            LambdaPoint::new(domain, n, coords).expect("valid probe")
        })
        .collect()
}

fn validate(candidate: &Skeleton, oracle: &Oracle<'_>, what: &str) -> Result<()> {
    for x in padded_probes(candidate.domain, candidate.dom_box()) {
        let expected = oracle(&x)?;
        let got = skeleton_eval(candidate, &x)?;
        if got != expected {
            return Err(Error::Reconstruction(format!(
                "{what}: reconstructed skeleton gives {got} at {x}, expected {expected}"
            )));
        }
    }
    Ok(())
}

/// The skeleton of `g ∘ f`, read off from evaluations of the composite.
///
/// Coefficients of the composite have degree at most
/// `(deg g + q) · max(deg f, 1)` in each variable, where `q` is the odd
/// dimension of `f`'s domain. The result keeps `f`'s domain box.
pub fn skeleton_compose(g: &Skeleton, f: &Skeleton) -> Result<Skeleton> {
    if f.codomain != g.domain {
        return Err(Error::Dimension(format!(
            "cannot compose a map on {} after a map into {}",
            g.domain, f.codomain
        )));
    }
    let degree = (g.degree() + f.domain.q) * f.degree().max(1);
    let oracle = |x: &LambdaPoint| skeleton_eval(g, &skeleton_eval(f, x)?);
    let s = skeleton_from_oracle(f.domain, g.codomain, f.dom_box(), degree, &oracle)?;
    validate(&s, &oracle, "composition")?;
    Ok(s)
}

/// Elements `p_I(x) θ_I` of `Q[x_1, …, x_p] ⊗ Λ(θ_1, …, θ_q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superfunction {
    p: usize,
    q: usize,
    terms: BTreeMap<Monomial, Poly>,
}

impl Superfunction {
    pub fn zero(p: usize, q: usize) -> Self {
        Superfunction { p, q, terms: BTreeMap::new() }
    }

    pub fn constant(p: usize, q: usize, c: Rational) -> Self {
        Self::from_poly(q, 0, Poly::constant(p, c))
    }

    fn from_poly(q: usize, mask: Monomial, poly: Poly) -> Self {
        let mut s = Superfunction::zero(poly.nvars(), q);
        if !poly.is_zero() {
            s.terms.insert(mask, poly);
        }
        s
    }

    /// `x_index` (1-based).
    pub fn even_coordinate(p: usize, q: usize, index: usize) -> Result<Self> {
        Ok(Self::from_poly(q, 0, Poly::var(p, index)?))
    }

    /// `θ_index` (1-based).
    pub fn odd_coordinate(p: usize, q: usize, index: usize) -> Result<Self> {
        if index == 0 || index > q {
            return Err(Error::GeneratorRange { index, n: q });
        }
        Ok(Self::from_poly(q, 1 << (index - 1), Poly::one(p)))
    }

    pub fn from_terms<I>(p: usize, q: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Poly)>,
    {
        let mut s = Superfunction::zero(p, q);
        for (mask, poly) in terms {
            if mask & !full_mask(q) != 0 {
                return Err(Error::GeneratorRange {
                    index: monomial_indices(mask).last().copied().unwrap_or(0),
                    n: q,
                });
            }
            if poly.nvars() != p {
                return Err(Error::Dimension(format!("coefficient in {} variables, expected {p}", poly.nvars())));
            }
            s = s.try_add(&Self::from_poly(q, mask, poly))?;
        }
        Ok(s)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Poly)> + '_ {
        self.terms.iter().map(|(m, p)| (*m, p))
    }

    pub fn term(&self, mask: Monomial) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Poly::zero(self.p))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::Dimension(format!(
                "superfunctions on K^{{{}|{}}} and K^{{{}|{}}}",
                self.p, self.q, other.p, other.q
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (m, poly) in &other.terms {
            let sum = match terms.get(m) {
                Some(existing) => existing + poly,
                None => poly.clone(),
            };
            if sum.is_zero() {
                terms.remove(m);
            } else {
                terms.insert(*m, sum);
            }
        }
        Ok(Superfunction { p: self.p, q: self.q, terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, p)| (*m, p.scale(r)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        Superfunction { p: self.p, q: self.q, terms }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Superfunction::zero(self.p, self.q);
        for (a, pa) in &self.terms {
            for (b, pb) in &other.terms {
                if let Some((mask, negative)) = monomial_product(*a, *b) {
                    let mut prod = pa * pb;
                    if negative {
                        prod = prod.scale(&-Rational::one());
                    }
                    out = out.try_add(&Self::from_poly(self.q, mask, prod))?;
                }
            }
        }
        Ok(out)
    }

    pub fn parity(&self) -> crate::grassmann::Parity {
        use crate::grassmann::Parity;
        let odd = self.terms.keys().any(|m| m.count_ones() % 2 == 1);
        let even = self.terms.keys().any(|m| m.count_ones() % 2 == 0);
        match (even, odd) {
            (false, false) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Indefinite,
        }
    }

    /// `Σ_I p_I(x_0) · μ_{i_1} ⋯ μ_{i_m}` at a point `(x_0 | μ)` of `K^{p|q}`.
    pub fn eval(&self, x: &LambdaPoint) -> Result<GrassmannElement> {
        if x.space() != SuperSpace::new(self.p, self.q) {
            return Err(Error::Dimension(format!(
                "point of {} for a superfunction on K^{{{}|{}}}",
                x.space(),
                self.p,
                self.q
            )));
        }
        let n = x.n();
        let mut out = GrassmannElement::zero(n);
        for (mask, poly) in &self.terms {
            let mut term = poly.eval_grassmann(x.even_coords(), n)?;
            for i in monomial_indices(*mask) {
                term = &term * &x.odd_coords()[i - 1];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// The skeleton of the corresponding map into `K^{1|1}`.
    pub fn to_skeleton(&self) -> Skeleton {
        let mut s = Skeleton::new(SuperSpace::new(self.p, self.q), SuperSpace::new(1, 1), None)
            .expect("no box");
        for (mask, poly) in &self.terms {
            let m = mask.count_ones() as usize;
            s.set(*mask, m % 2, poly.scale(&reorder_sign(m))).expect("parity slot");
        }
        s
    }

    pub fn from_skeleton(f: &Skeleton) -> Result<Self> {
        if f.codomain != SuperSpace::new(1, 1) {
            return Err(Error::Dimension(format!(
                "superfunctions are maps into K^{{1|1}}, not {}",
                f.codomain
            )));
        }
        let terms = f.maps.iter().map(|((mask, _), poly)| {
            (*mask, poly.scale(&reorder_sign(mask.count_ones() as usize)))
        });
        Superfunction::from_terms(f.domain.p, f.domain.q, terms.collect::<Vec<_>>())
    }
}

impl fmt::Display for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().flat_map(|(mask, poly)| {
            let odd: Vec<String> = monomial_indices(*mask).iter().map(|i| format!("t{i}")).collect();
            poly.terms().map(move |(e, c)| {
                let mut factors = factor_strings(e);
                factors.extend(odd.iter().cloned());
                (c.clone(), factors)
            })
        });
        f.write_str(&expr::render_terms(terms.collect::<Vec<_>>()))
    }
}

pub fn skeleton_to_superfunction(f: &Skeleton) -> Result<Superfunction> {
    Superfunction::from_skeleton(f)
}

pub fn superfunction_to_skeleton(f: &Superfunction) -> Skeleton {
    f.to_skeleton()
}

pub fn superfunction_mul(f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
    f.try_mul(g)
}

/// Outcome of [`check_supersmooth`], criterion by criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersmoothVerdict {
    /// Components are polynomial along lines (parity slots are enforced by [`LambdaPoint`]).
    pub polynomial: bool,
    /// The derivative commutes with even scalars.
    pub even_linear: bool,
    pub natural: bool,
    pub skeleton: Option<Skeleton>,
    pub diagnostics: Vec<String>,
}

impl SupersmoothVerdict {
    pub fn passed(&self) -> bool {
        self.polynomial && self.even_linear && self.natural && self.skeleton.is_some()
    }
}

/// Samples of `s ↦ F(x + s·w)` at `s = 0, 1, …` and the smallest degree that
/// explains them, checked at two extra nodes.
struct Line {
    nodes: Vec<Rational>,
    values: Vec<LambdaPoint>,
    degree: usize,
}

fn along_line(f: &Oracle<'_>, x: &LambdaPoint, w: &LambdaPoint) -> Result<Option<Line>> {
    let nodes: Vec<Rational> = (0..=MAX_LINE_DEGREE + 2).map(|s| int(s as i64)).collect();
    let values = nodes
        .iter()
        .map(|s| f(&x.try_add(&w.scale(s))?))
        .collect::<Result<Vec<_>>>()?;
    let flat: Vec<Vec<Rational>> = values.iter().map(LambdaPoint::flatten).collect();
    for degree in 0..=MAX_LINE_DEGREE {
        let fits = (degree + 1..=degree + 2).all(|extra| {
            let w = poly::lagrange_weights(&nodes[..=degree], &nodes[extra]);
            (0..flat[extra].len()).all(|c| {
                let predicted = w
                    .iter()
                    .zip(&flat)
                    .fold(Rational::zero(), |acc, (wi, v)| acc + wi * &v[c]);
                predicted == flat[extra][c]
            })
        });
        if fits {
            return Ok(Some(Line { nodes, values, degree }));
        }
    }
    Ok(None)
}

/// `d/ds F(x + s·w)` at `s = 0`.
fn line_derivative(line: &Line) -> LambdaPoint {
    let xs = &line.nodes[..=line.degree];
    let weights = poly::lagrange_derivative_weights(xs, &Rational::zero());
    let mut acc = LambdaPoint::zero(line.values[0].space(), line.values[0].n());
    for (w, v) in weights.iter().zip(&line.values) {
        acc = acc.try_add(&v.scale(w)).expect("same space");
    }
    acc
}

/// Verifies that a family on a superdomain is supersmooth: polynomial along
/// lines, with `Λ_0`-linear derivative, and natural in `Λ`. On success the
/// skeleton is reconstructed and checked against further evaluations.
pub fn check_supersmooth(family: &dyn PointFamily, seed: u64) -> SupersmoothVerdict {
    let mut verdict = SupersmoothVerdict {
        polynomial: true,
        even_linear: true,
        natural: true,
        skeleton: None,
        diagnostics: Vec::new(),
    };
    let [domain] = family.domains() else {
        verdict.polynomial = false;
        verdict.diagnostics.push("a supersmooth map has exactly one argument".into());
        return verdict;
    };
    let domain = *domain;
    let oracle = |x: &LambdaPoint| family.eval(std::slice::from_ref(x));
    let n = family.max_n().min(4);
    let mut rng = random::rng(seed);
    let bases: Vec<LambdaPoint> = (0..3)
        .map(|_| {
            let x = random::point(&mut rng, domain, n);
            let shift = points::one_point(domain, n, &vec![Rational::one(); domain.p]);
            x.try_add(&shift).expect("same space")
        })
        .collect();

    let gen = |i: usize| GrassmannElement::generator(n, i).expect("in range");
    let mut directions = Vec::new();
    for i in 0..domain.dim() {
        if domain.is_odd(i) {
            for g in [1, n].into_iter().filter(|&g| g >= 1 && g <= n) {
                directions.push(LambdaPoint::basis(domain, n, i, gen(g)).expect("odd"));
            }
        } else {
            directions.push(LambdaPoint::basis(domain, n, i, GrassmannElement::one(n)).expect("even"));
        }
    }
    directions.dedup();
    let mut scalars = vec![GrassmannElement::constant(n, int(3))];
    if n >= 2 {
        scalars.push(&gen(1) * &gen(2));
        scalars.push(&GrassmannElement::constant(n, int(2)) + &(&gen(1) * &gen(2)));
        scalars.push(&gen(n - 1) * &gen(n));
    }

    'outer: for u in &bases {
        for w in &directions {
            let line = match along_line(&oracle, u, w) {
                Ok(Some(line)) => line,
                Ok(None) => {
                    verdict.polynomial = false;
                    verdict.diagnostics.push(format!(
                        "(1) not polynomial of degree ≤ {MAX_LINE_DEGREE} along {u} + s·{w}"
                    ));
                    break 'outer;
                }
                Err(e) => {
                    verdict.polynomial = false;
                    verdict.diagnostics.push(format!("(1) evaluation failed near {u}: {e}"));
                    break 'outer;
                }
            };
            let dw = line_derivative(&line);
            for lambda in &scalars {
                let lw = w.scale_even(lambda).expect("even scalar");
                let scaled = match along_line(&oracle, u, &lw) {
                    Ok(Some(l)) => line_derivative(&l),
                    _ => {
                        verdict.polynomial = false;
                        verdict.diagnostics.push(format!("(1) not polynomial along {u} + s·{lw}"));
                        break 'outer;
                    }
                };
                let expected = dw.scale_even(lambda).expect("even scalar");
                if scaled != expected {
                    verdict.even_linear = false;
                    verdict.diagnostics.push(format!(
                        "(2) DF({u})({lambda} · {w}) = {scaled} but ({lambda}) · DF({u})({w}) = {expected}"
                    ));
                    break 'outer;
                }
            }
        }
    }

    let mut morphisms = vec![GrassmannMorphism::terminal(n)];
    morphisms.extend((1..=n).map(|l| GrassmannMorphism::kill_generator(n, l).expect("in range")));
    if n < family.max_n() {
        morphisms.push(GrassmannMorphism::inclusion(n, n + 1).expect("n ≤ n + 1"));
    }
    if n >= 3 {
        let mut images: Vec<GrassmannElement> = (1..=n).map(gen).collect();
        images.swap(0, 1);
        images[2] = &images[2] + &(&(&gen(1) * &gen(2)) * &gen(3));
        morphisms.push(GrassmannMorphism::new(n, n, images).expect("odd images"));
    }
    morphisms.push(random::morphism(&mut rng, n, n));
    let samples: Vec<Vec<LambdaPoint>> = bases.iter().map(|b| vec![b.clone()]).collect();
    for phi in &morphisms {
        let report = points::check_naturality(family, phi, &samples);
        if let Some(v) = report.violations.first() {
            verdict.natural = false;
            verdict.diagnostics.push(format!(
                "(3) not natural under {}: {} vs {}",
                v.morphism, v.lhs, v.rhs
            ));
            break;
        }
        if let Some(e) = report.errors.first() {
            verdict.natural = false;
            verdict.diagnostics.push(format!("(3) {e}"));
            break;
        }
    }

    if verdict.polynomial && verdict.even_linear && verdict.natural {
        match reconstruct_skeleton(family) {
            Ok(s) => verdict.skeleton = Some(s),
            Err(e) => verdict.diagnostics.push(format!("skeleton reconstruction failed: {e}")),
        }
    }
    verdict
}

/// Recovers the skeleton of a supersmooth family, detecting the degree
/// along the coordinate axes of the body.
pub fn reconstruct_skeleton(family: &dyn PointFamily) -> Result<Skeleton> {
    let [domain] = family.domains() else {
        return Err(Error::Dimension("a skeleton needs a family of one argument".into()));
    };
    let domain = *domain;
    if domain.q + 4 > family.max_n() {
        return Err(Error::Reconstruction(format!(
            "family must be given up to Λ_{} to be probed",
            domain.q + 4
        )));
    }
    let oracle = |x: &LambdaPoint| family.eval(std::slice::from_ref(x));
    let generic: Vec<Rational> =
        (0..domain.p).map(|i| Rational::new((2 * i as i64 + 1).into(), 3.into())).collect();
    let base = probe_point(domain, &generic);
    let mut degree = 0;
    for a in 0..domain.p {
        let dir = LambdaPoint::basis(domain, domain.q, a, GrassmannElement::one(domain.q))?;
        match along_line(&oracle, &base, &dir)? {
            Some(line) => degree = degree.max(line.degree),
            None => {
                return Err(Error::Reconstruction(format!(
                    "coefficients exceed degree {MAX_LINE_DEGREE} along x{}",
                    a + 1
                )))
            }
        }
    }
    let s = skeleton_from_oracle(domain, family.codomain(), None, degree, &oracle)?;
    validate(&s, &oracle, "supersmooth family")?;
    Ok(s)
}

/// The product of `C^s = K^{1|1}` as an even bilinear map, solved from the
/// requirement that its lift to `Λ_2`-points is the product of `Λ_2` under
/// `(a | b) ↦ a + b`.
pub fn cs_structure() -> Result<MultilinearMap> {
    let n = 2;
    let v = SuperSpace::new(1, 1);
    let unknown = |a: usize, b: usize, c: usize| 4 * a + 2 * b + c;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for l1 in 0..=full_mask(n) {
        for l2 in 0..=full_mask(n) {
            let (a, b) = ((l1.count_ones() % 2) as usize, (l2.count_ones() % 2) as usize);
            // lift(μ)(λ_1 ⊗ e_a, λ_2 ⊗ e_b) = Σ_c λ_2 λ_1 μ(a, b)_c ⊗ e_c
            let Some((m, negative)) = monomial_product(l2, l1) else {
                continue;
            };
            let s = sign(negative);
            let target = match monomial_product(l1, l2) {
                Some((tm, tneg)) if tm == m => sign(tneg),
                _ => Rational::zero(),
            };
            let odd = m.count_ones() % 2 == 1;
            for c in 0..2 {
                if (c == 1) != odd {
                    // the coordinate would have the wrong parity
                    let mut row = vec![Rational::zero(); 8];
                    row[unknown(a, b, c)] = s.clone();
                    rows.push(row);
                    rhs.push(Rational::zero());
                }
            }
            let mut row = vec![Rational::zero(); 8];
            for c in 0..2 {
                row[unknown(a, b, c)] = s.clone();
            }
            rows.push(row);
            rhs.push(target);
        }
    }
    let Solution::Unique(mu) = linalg::solve(&rows, &rhs) else {
        return Err(Error::Reconstruction("the product of C^s is not determined uniquely".into()));
    };
    let mut map = MultilinearMap::zero(vec![v, v], v);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let coeff = mu[unknown(a, b, c)].clone();
                if !coeff.is_zero() {
                    map.set(&[a, b], c, coeff)?;
                }
            }
        }
    }
    Ok(map)
}

/// Identification `𝔯(Λ) = Λ`: the point `(even part | odd part)` of `K^{1|1}`.
pub fn element_to_cs_point(a: &GrassmannElement) -> LambdaPoint {
    LambdaPoint::new(SuperSpace::new(1, 1), a.n(), vec![a.even_part(), a.odd_part()])
        .expect("parts have the right parity")
}

pub fn cs_point_to_element(x: &LambdaPoint) -> GrassmannElement {
    x.coords().iter().fold(GrassmannElement::zero(x.n()), |acc, c| &acc + c)
}

/// Compares the lifted `C^s` product with the product of `Λ_n` on all pairs of
/// basis monomials; returns the first mismatch.
pub fn cs_matches_grassmann(mu: &MultilinearMap, n: usize) -> Result<Option<(GrassmannElement, GrassmannElement)>> {
    for l1 in 0..=full_mask(n) {
        for l2 in 0..=full_mask(n) {
            let a = GrassmannElement::monomial(n, l1, Rational::one());
            let b = GrassmannElement::monomial(n, l2, Rational::one());
            let lifted = points::lift_multilinear(mu, &[element_to_cs_point(&a), element_to_cs_point(&b)])?;
            if cs_point_to_element(&lifted) != &a * &b {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// `(a + bθ)(c + dθ)` in `C^s` with coefficients in any polynomial ring.
pub fn cs_product(mu: &MultilinearMap, x: &[Poly; 2], y: &[Poly; 2]) -> [Poly; 2] {
    let nvars = x[0].nvars();
    let mut out = [Poly::zero(nvars), Poly::zero(nvars)];
    for (inputs, c, coeff) in mu.entries() {
        let term = (&x[inputs[0]] * &y[inputs[1]]).scale(coeff);
        out[c] = &out[c] + &term;
    }
    out
}

/// `(a + bθ)⁻¹ = (a − bθ)/(a² + b²)`.
pub fn cs_inverse(x: &[Rational; 2]) -> Result<[Rational; 2]> {
    let norm = &x[0] * &x[0] + &x[1] * &x[1];
    if norm.is_zero() {
        return Err(Error::NotInvertible("zero element of C^s".into()));
    }
    Ok([&x[0] / &norm, -&x[1] / &norm])
}

pub fn cs_table_text(mu: &MultilinearMap) -> String {
    let name = |i: usize| if i == 0 { "1" } else { "theta" };
    let mut lines = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let terms = (0..2).map(|c| {
                let factors = if c == 0 { vec![] } else { vec!["theta".to_string()] };
                (mu.get(&[a, b], c), factors)
            });
            lines.push(format!("mu({}, {}) = {}", name(a), name(b), expr::render_terms(terms.collect::<Vec<_>>())));
        }
    }
    lines.join("\n")
}
