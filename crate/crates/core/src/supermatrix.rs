//! `Λ`-points of `End(V)`: block supermatrices with even diagonal blocks and
//! odd off-diagonal blocks, their supertrace, and inversion in `GL(V)(Λ)`.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, GrassmannMorphism};
use crate::linalg::{self, Matrix};
use crate::random;
use crate::rational::Rational;
use crate::superlinear::{braid_swap, dual_pairing, dual_space, SuperSpace, Tensor};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperMatrix {
    space: SuperSpace,
    n: usize,
    entries: Vec<Vec<GrassmannElement>>,
}

impl SuperMatrix {
    pub fn new(space: SuperSpace, n: usize, entries: Vec<Vec<GrassmannElement>>) -> Result<Self> {
        let d = space.dim();
        if entries.len() != d || entries.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!("a supermatrix on {space} must be {d}×{d}")));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.n() != n {
                    return Err(Error::Dimension(format!(
                        "entry ({}, {}) lies in Λ_{}, expected Λ_{n}",
                        i + 1,
                        j + 1,
                        a.n()
                    )));
                }
                let odd = space.is_odd(i) != space.is_odd(j);
                if !a.parity().fits(odd) {
                    return Err(Error::Parity(format!(
                        "entry ({}, {}) = {a} must be {}",
                        i + 1,
                        j + 1,
                        if odd { "odd" } else { "even" }
                    )));
                }
            }
        }
        Ok(SuperMatrix { space, n, entries })
    }

    pub fn zero(space: SuperSpace, n: usize) -> Self {
        let d = space.dim();
        SuperMatrix { space, n, entries: vec![vec![GrassmannElement::zero(n); d]; d] }
    }

    pub fn identity(space: SuperSpace, n: usize) -> Self {
        let mut m = Self::zero(space, n);
        for i in 0..space.dim() {
            m.entries[i][i] = GrassmannElement::one(n);
        }
        m
    }

    /// A rational matrix seen over `Λ_n`; it must be block diagonal.
    pub fn from_rational(space: SuperSpace, n: usize, a: &Matrix) -> Result<Self> {
        let entries = a
            .iter()
            .map(|row| row.iter().map(|c| GrassmannElement::constant(n, c.clone())).collect())
            .collect();
        Self::new(space, n, entries)
    }

    pub fn space(&self) -> SuperSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<GrassmannElement>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &GrassmannElement {
        &self.entries[i][j]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.n != other.n {
            return Err(Error::Dimension(format!(
                "supermatrices on {} over Λ_{} and on {} over Λ_{}",
                self.space, self.n, other.space, other.n
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.space.dim();
        let mut out = Self::zero(self.space, self.n);
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let prod = a * &other.entries[k][j];
                    out.entries[i][j] = &out.entries[i][j] + &prod;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&GrassmannElement, &GrassmannElement) -> GrassmannElement,
    ) -> Result<Self> {
        self.check_same(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect())
            .collect();
        Ok(SuperMatrix { space: self.space, n: self.n, entries })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let entries =
            self.entries.iter().map(|row| row.iter().map(|a| a.scale(r)).collect()).collect();
        SuperMatrix { space: self.space, n: self.n, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.space, self.n)
    }

    /// `Σ_i (-1)^{p(e_i)} A_ii`.
    pub fn supertrace(&self) -> GrassmannElement {
        (0..self.space.dim()).fold(GrassmannElement::zero(self.n), |acc, i| {
            if self.space.is_odd(i) {
                &acc - &self.entries[i][i]
            } else {
                &acc + &self.entries[i][i]
            }
        })
    }

    /// The trace as the composite `V ⊗ V* → V* ⊗ V → K`: write `A = Σ A_ij e_i ⊗ e^j`,
    /// braid, then evaluate `e^j(e_i)`. Only defined over `Λ_0`.
    pub fn supertrace_via_braiding(&self) -> Result<Rational> {
        if self.n != 0 {
            return Err(Error::Domain(format!(
                "the braided trace is computed for endomorphisms of V, not points over Λ_{}",
                self.n
            )));
        }
        let v = self.space;
        let vd = dual_space(v);
        let coeffs = self.entries.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, a)| (vec![i, j], a.body()))
        });
        let t = Tensor::new(vec![v, vd], coeffs)?;
        let braided = braid_swap(v, vd, &t)?;
        let pairing = dual_pairing(v);
        Ok(braided
            .coeffs()
            .fold(Rational::zero(), |acc, (idx, c)| acc + c * &pairing[idx[0]][idx[1]]))
    }

    pub fn body_matrix(&self) -> Matrix {
        self.entries.iter().map(|row| row.iter().map(GrassmannElement::body).collect()).collect()
    }

    /// Invertible iff both diagonal blocks of the body are.
    pub fn is_invertible(&self) -> bool {
        let (p, body) = (self.space.p, self.body_matrix());
        let block = |r: std::ops::Range<usize>| -> Matrix {
            body[r.clone()].iter().map(|row| row[r.clone()].to_vec()).collect()
        };
        let even = block(0..p);
        let odd = block(p..self.space.dim());
        !linalg::determinant(&even).is_zero() && !linalg::determinant(&odd).is_zero()
    }

    /// `A⁻¹ = a⁻¹ Σ_{k=0}^{n} (-1)^k (c a⁻¹)^k` with `a` the body and `c = A - a`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible("singular body block".into()));
        }
        let a_inv = linalg::inverse(&self.body_matrix())
            .ok_or_else(|| Error::NotInvertible("singular body block".into()))?;
        let a_inv = Self::from_rational(self.space, self.n, &a_inv)?;
        let a = Self::from_rational(self.space, self.n, &self.body_matrix())?;
        let c = self.try_sub(&a)?;
        let step = c.try_mul(&a_inv)?.scale(&-Rational::one());
        let mut power = Self::identity(self.space, self.n);
        let mut sum = power.clone();
        for _ in 1..=self.n {
            power = power.try_mul(&step)?;
            sum = sum.try_add(&power)?;
        }
        a_inv.try_mul(&sum)
    }

    pub fn base_change(&self, phi: &GrassmannMorphism) -> Result<Self> {
        if phi.src() != self.n {
            return Err(Error::Dimension(format!(
                "matrix over Λ_{} pushed along a morphism from Λ_{}",
                self.n,
                phi.src()
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|a| phi.apply(a)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(SuperMatrix { space: self.space, n: phi.dst(), entries })
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn mat_mul(a: &SuperMatrix, b: &SuperMatrix) -> Result<SuperMatrix> {
    a.try_mul(b)
}

pub fn mat_add(a: &SuperMatrix, b: &SuperMatrix) -> Result<SuperMatrix> {
    a.try_add(b)
}

pub fn supertrace(a: &SuperMatrix) -> GrassmannElement {
    a.supertrace()
}

pub fn mat_inv(a: &SuperMatrix) -> Result<SuperMatrix> {
    a.inverse()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupReport {
    pub trials: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples invertible matrices in `GL(K^{p|q})(Λ_n)` and checks the group laws
/// and that base change is a group homomorphism.
pub fn gl_group_check(n: usize, p: usize, q: usize, trials: usize, seed: u64) -> GroupReport {
    let space = SuperSpace::new(p, q);
    let mut rng = random::rng(seed);
    let mut report = GroupReport { trials, ..Default::default() };
    let id = SuperMatrix::identity(space, n);
    for trial in 0..trials {
        let a = random::invertible_supermatrix(&mut rng, space, n);
        let b = random::invertible_supermatrix(&mut rng, space, n);
        let c = random::invertible_supermatrix(&mut rng, space, n);
        let m = rng.gen_range(0..=n + 1);
        let phi = if trial % 3 == 0 {
            GrassmannMorphism::terminal(n)
        } else {
            random::morphism(&mut rng, n, m)
        };
        let mut check = |ok: Result<bool>, what: &str| {
            report.checks += 1;
            match ok {
                Ok(true) => {}
                Ok(false) => report.violations.push(format!("trial {trial}: {what} fails for A = {a}")),
                Err(e) => report.violations.push(format!("trial {trial}: {what}: {e}")),
            }
        };
        let ab = a.try_mul(&b);
        check(ab.as_ref().map(SuperMatrix::is_invertible).map_err(Clone::clone), "closure");
        check(
            (|| Ok(ab.clone()?.try_mul(&c)? == a.try_mul(&b.try_mul(&c)?)?))(),
            "associativity",
        );
        check((|| Ok(id.try_mul(&a)? == a && a.try_mul(&id)? == a))(), "unit");
        check(
            (|| {
                let inv = a.inverse()?;
                Ok(a.try_mul(&inv)?.is_identity() && inv.try_mul(&a)?.is_identity())
            })(),
            "inverse",
        );
        check(
            (|| {
                let lhs = ab.clone()?.base_change(&phi)?;
                Ok(lhs == a.base_change(&phi)?.try_mul(&b.base_change(&phi)?)?)
            })(),
            "base change of products",
        );
        check(
            (|| Ok(a.inverse()?.base_change(&phi)? == a.base_change(&phi)?.inverse()?))(),
            "base change of inverses",
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_element;
    use crate::rational::{frac, int};

    fn matrix(space: SuperSpace, n: usize, rows: &[&[&str]]) -> SuperMatrix {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_element(s, n).unwrap()).collect())
            .collect();
        SuperMatrix::new(space, n, entries).unwrap()
    }

    #[test]
    fn parity_of_blocks_is_enforced() {
        let v = SuperSpace::new(1, 1);
        let entries = |s: [&str; 4]| {
            vec![
                vec![parse_element(s[0], 2).unwrap(), parse_element(s[1], 2).unwrap()],
                vec![parse_element(s[2], 2).unwrap(), parse_element(s[3], 2).unwrap()],
            ]
        };
        assert!(SuperMatrix::new(v, 2, entries(["1", "t1", "t2", "1"])).is_ok());
        assert!(matches!(
            SuperMatrix::new(v, 2, entries(["1", "1", "0", "1"])),
            Err(Error::Parity(_))
        ));
        assert!(matches!(
            SuperMatrix::new(v, 2, entries(["t1", "0", "0", "1"])),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn supertrace_of_identity() {
        for p in 0..=4 {
            for q in 0..=4 {
                let st = SuperMatrix::identity(SuperSpace::new(p, q), 2).supertrace();
                assert_eq!(st, GrassmannElement::constant(2, int(p as i64 - q as i64)));
            }
        }
    }

    #[test]
    fn braided_trace_examples() {
        let v = SuperSpace::new(1, 1);
        assert_eq!(SuperMatrix::identity(v, 0).supertrace_via_braiding().unwrap(), int(0));
        let e11 = matrix(v, 0, &[&["1", "0"], &["0", "0"]]);
        assert_eq!(e11.supertrace_via_braiding().unwrap(), int(1));
        let e22 = matrix(v, 0, &[&["0", "0"], &["0", "1"]]);
        assert_eq!(e22.supertrace_via_braiding().unwrap(), int(-1));
        assert!(SuperMatrix::identity(v, 1).supertrace_via_braiding().is_err());
    }

    #[test]
    fn inverse_examples() {
        let v = SuperSpace::new(1, 1);
        let a = matrix(v, 2, &[&["1 + t1*t2", "t1"], &["t2", "1"]]);
        let inv = a.inverse().unwrap();
        assert!(a.try_mul(&inv).unwrap().is_identity());
        assert!(inv.try_mul(&a).unwrap().is_identity());

        let d = matrix(v, 0, &[&["2", "0"], &["0", "3"]]);
        let expected = SuperMatrix::from_rational(
            v,
            0,
            &vec![vec![frac(1, 2), int(0)], vec![int(0), frac(1, 3)]],
        )
        .unwrap();
        assert_eq!(d.inverse().unwrap(), expected);

        let b = matrix(v, 1, &[&["1", "t1"], &["t1", "1"]]);
        assert!(b.try_mul(&b.inverse().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn singular_body_is_rejected() {
        let v = SuperSpace::new(2, 1);
        let a = matrix(v, 2, &[&["0", "0", "t1"], &["1", "1", "0"], &["t2", "0", "1"]]);
        assert!(!a.is_invertible());
        assert!(matches!(a.inverse(), Err(Error::NotInvertible(_))));
        let unit = matrix(v, 2, &[&["1 + t1*t2", "0", "t1"], &["0", "1", "0"], &["t2", "0", "1"]]);
        assert!(unit.is_invertible());
    }

    #[test]
    fn group_laws_hold() {
        let report = gl_group_check(2, 1, 1, 50, 7);
        assert!(report.passed(), "{:?}", report.violations);
        let report = gl_group_check(0, 2, 1, 20, 8);
        assert!(report.passed(), "{:?}", report.violations);
    }
}
