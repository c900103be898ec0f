//! Multivariate polynomials with rational coefficients in the even
//! coordinates `x1..xp` of a superdomain.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::rational::{int, Rational};

/// Exponent vector, ordered by total degree and then with `x1` powers first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents(vec![0; nvars]), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate `x_index` (1-based).
    pub fn var(nvars: usize, index: usize) -> Result<Self> {
        if index == 0 || index > nvars {
            return Err(Error::VariableRange { index, p: nvars });
        }
        let mut e = vec![0; nvars];
        e[index - 1] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(Exponents(e), Rational::one());
        Ok(p)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent vector of length {} in {nvars} variables",
                    e.len()
                )));
            }
            p.add_term(Exponents(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> + '_ {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponents::degree).max().unwrap_or(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                out.add_term(Exponents(e), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect(),
        }
    }

    /// Exact partial derivative in `x_{var+1}` (0-based `var`).
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[var] -= 1;
            out.add_term(Exponents(d), c * int(k as i64));
        }
        out
    }

    /// Mixed partial derivative along the listed 0-based variables.
    pub fn derivatives(&self, vars: &[usize]) -> Self {
        vars.iter().fold(self.clone(), |p, &v| p.derivative(v))
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars, "point dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.0.iter().zip(x).fold(c.clone(), |acc, (k, xi)| acc * pow_rational(xi, *k))
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Substitutes commuting (even) Grassmann elements for the variables.
    pub fn eval_grassmann(&self, x: &[GrassmannElement], n: usize) -> Result<GrassmannElement> {
        if x.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "{} values for {} variables",
                x.len(),
                self.nvars
            )));
        }
        let mut out = GrassmannElement::zero(n);
        for (e, c) in &self.terms {
            let mut term = GrassmannElement::constant(n, c.clone());
            for (k, xi) in e.0.iter().zip(x) {
                term = term.try_mul(&xi.pow(*k))?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }
}

fn pow_rational(x: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("polynomial variable counts differ")
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_add(&rhs.scale(&-Rational::one())).expect("polynomial variable counts differ")
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial variable counts differ")
    }
}

/// Factor strings for one exponent vector, e.g. `["x1^2", "x3"]`.
pub(crate) fn factor_strings(e: &[u32]) -> Vec<String> {
    e.iter()
        .enumerate()
        .filter(|(_, k)| **k > 0)
        .map(|(i, k)| if *k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
        .collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().map(|(e, c)| (c.clone(), factor_strings(&e.0)));
        f.write_str(&crate::expr::render_terms(terms))
    }
}

/// Univariate Lagrange basis weights at `at` for the nodes `xs`.
pub fn lagrange_weights(xs: &[Rational], at: &Rational) -> Vec<Rational> {
    (0..xs.len())
        .map(|i| {
            let mut w = Rational::one();
            for (j, xj) in xs.iter().enumerate() {
                if i != j {
                    w *= (at - xj) / (&xs[i] - xj);
                }
            }
            w
        })
        .collect()
}

/// Weights `L_i'(at)` of the derivative of the interpolating polynomial.
pub fn lagrange_derivative_weights(xs: &[Rational], at: &Rational) -> Vec<Rational> {
    let k = xs.len();
    (0..k)
        .map(|i| {
            let denom = (0..k)
                .filter(|&j| j != i)
                .fold(Rational::one(), |acc, j| acc * (&xs[i] - &xs[j]));
            let mut sum = Rational::zero();
            for skip in (0..k).filter(|&j| j != i) {
                let prod = (0..k)
                    .filter(|&j| j != i && j != skip)
                    .fold(Rational::one(), |acc, j| acc * (at - &xs[j]));
                sum += prod;
            }
            sum / denom
        })
        .collect()
}

/// Univariate Lagrange basis polynomial `L_i` in variable `var` of `nvars`.
fn lagrange_basis(xs: &[Rational], i: usize, var: usize, nvars: usize) -> Poly {
    let x = Poly::var(nvars, var + 1).expect("variable in range");
    let mut out = Poly::one(nvars);
    for (j, xj) in xs.iter().enumerate() {
        if j != i {
            let lin = &x - &Poly::constant(nvars, xj.clone());
            out = (&out * &lin).scale(&(&xs[i] - xj).recip());
        }
    }
    out
}

/// Interpolates on the tensor grid `nodes[0] × … × nodes[p-1]`; `values` is
/// indexed in row-major order with the last variable fastest.
pub fn interpolate_grid(nodes: &[Vec<Rational>], values: &[Rational]) -> Poly {
    let nvars = nodes.len();
    let bases: Vec<Vec<Poly>> = nodes
        .iter()
        .enumerate()
        .map(|(v, xs)| (0..xs.len()).map(|i| lagrange_basis(xs, i, v, nvars)).collect())
        .collect();
    let mut out = Poly::zero(nvars);
    for (flat, value) in values.iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        let idx = grid_index(nodes, flat);
        let mut term = Poly::constant(nvars, value.clone());
        for (v, i) in idx.iter().enumerate() {
            term = &term * &bases[v][*i];
        }
        out = &out + &term;
    }
    out
}

/// Multi-index of a flat grid position (last variable fastest).
pub fn grid_index(nodes: &[Vec<Rational>], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; nodes.len()];
    for v in (0..nodes.len()).rev() {
        idx[v] = flat % nodes[v].len();
        flat /= nodes[v].len();
    }
    idx
}

pub fn grid_size(nodes: &[Vec<Rational>]) -> usize {
    nodes.iter().map(Vec::len).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;
    use crate::rational::frac;

    #[test]
    fn derivatives_are_exact() {
        let p = parse_poly("x1^3*x2 + 2*x2^2 - 7", 2).unwrap();
        assert_eq!(p.derivative(0), parse_poly("3*x1^2*x2", 2).unwrap());
        assert_eq!(p.derivative(1), parse_poly("x1^3 + 4*x2", 2).unwrap());
        assert_eq!(p.derivatives(&[0, 0, 0, 0]), Poly::zero(2));
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn evaluation() {
        let p = parse_poly("x1^2 - x1*x2 + 1/2", 2).unwrap();
        assert_eq!(p.eval(&[int(3), int(2)]), frac(7, 2));
    }

    #[test]
    fn display_order() {
        let p = parse_poly("x2^2 + x1*x2 + x1^2 + x2 + x1 + 1", 2).unwrap();
        assert_eq!(p.to_string(), "1 + x1 + x2 + x1^2 + x1*x2 + x2^2");
        assert_eq!(parse_poly("-x1^2", 1).unwrap().to_string(), "-x1^2");
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = parse_poly("x1^2*x2 - 3*x2 + 1/3", 2).unwrap();
        let nodes = vec![(0..3).map(int).collect::<Vec<_>>(), (0..2).map(int).collect()];
        let values: Vec<Rational> = (0..grid_size(&nodes))
            .map(|f| {
                let idx = grid_index(&nodes, f);
                p.eval(&[nodes[0][idx[0]].clone(), nodes[1][idx[1]].clone()])
            })
            .collect();
        assert_eq!(interpolate_grid(&nodes, &values), p);
    }

    #[test]
    fn derivative_weights() {
        // f(s) = s^3 on nodes 0..3, f'(1) = 3.
        let xs: Vec<Rational> = (0..4).map(int).collect();
        let w = lagrange_derivative_weights(&xs, &int(1));
        let d: Rational = xs.iter().zip(&w).map(|(x, w)| x * x * x * w).sum();
        assert_eq!(d, int(3));
        let l = lagrange_weights(&xs, &frac(1, 2));
        let v: Rational = xs.iter().zip(&l).map(|(x, w)| x * x * x * w).sum();
        assert_eq!(v, frac(1, 8));
    }
}
