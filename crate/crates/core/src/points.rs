//! The functor of points: `V̄(Λ) = (Λ ⊗ V)_0`, base change along Grassmann
//! morphisms, lifting of even multilinear maps and their reconstruction.
//!
//! Sign convention for lifts: on decomposable arguments
//!
//! ```text
//! f̄(λ_1 ⊗ v_1, …, λ_k ⊗ v_k) = λ_k ⋯ λ_1 ⊗ f(v_1, …, v_k)
//! ```
//!
//! with the Grassmann factors in reversed order. Reconstruction probes with
//! `θ_r ⊗ v` for the `r`-th odd argument in `Λ_j` and reads the result as
//! `θ_j ⋯ θ_1 ⊗ g(v_1, …, v_k)`. Since `θ_j ⋯ θ_1 = (-1)^{j(j-1)/2} θ_1 ⋯ θ_j`,
//! the coefficient of the canonical top monomial is multiplied by that sign:
//!
//! | j | 0 | 1 | 2 | 3 | 4 | 5 |
//! |---|---|---|---|---|---|---|
//! | sign | + | + | − | − | + | + |

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{self, Expr, GrassmannContext};
use crate::grassmann::{full_mask, GrassmannElement, GrassmannMorphism, Monomial};
use crate::linalg;
use crate::rational::{sign, Rational};
use crate::superlinear::{MultilinearMap, SuperSpace, SuperVector};

/// Default largest Grassmann algebra used by exhaustive grids.
pub const DEFAULT_MAX_N: usize = 6;

/// A point of `V̄(Λ_n)`: `p` even elements followed by `q` odd elements of `Λ_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaPoint {
    space: SuperSpace,
    n: usize,
    coords: Vec<GrassmannElement>,
}

impl LambdaPoint {
    pub fn new(space: SuperSpace, n: usize, coords: Vec<GrassmannElement>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} coordinates for a point of {space}",
                coords.len()
            )));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.n() != n {
                return Err(Error::Dimension(format!(
                    "coordinate {} lies in Λ_{}, expected Λ_{n}",
                    i + 1,
                    c.n()
                )));
            }
            let odd = space.is_odd(i);
            if !c.parity().fits(odd) {
                return Err(Error::Parity(format!(
                    "coordinate {} must be {} but is {} ({c})",
                    i + 1,
                    if odd { "odd" } else { "even" },
                    c.parity()
                )));
            }
        }
        Ok(LambdaPoint { space, n, coords })
    }

    pub fn zero(space: SuperSpace, n: usize) -> Self {
        LambdaPoint { space, n, coords: vec![GrassmannElement::zero(n); space.dim()] }
    }

    /// `λ ⊗ e_i`.
    pub fn basis(space: SuperSpace, n: usize, i: usize, lambda: GrassmannElement) -> Result<Self> {
        if i >= space.dim() {
            return Err(Error::Dimension(format!("basis index {} outside {space}", i + 1)));
        }
        let mut coords = vec![GrassmannElement::zero(n); space.dim()];
        coords[i] = lambda;
        Self::new(space, n, coords)
    }

    /// A plain vector of `V_0` seen as a point over `Λ_n`.
    pub fn from_vector(v: &SuperVector, n: usize) -> Result<Self> {
        if !v.is_even() {
            return Err(Error::Parity("only even vectors are Λ-points".into()));
        }
        let coords = v.coords().iter().map(|c| GrassmannElement::constant(n, c.clone())).collect();
        Self::new(v.space(), n, coords)
    }

    pub fn space(&self) -> SuperSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[GrassmannElement] {
        &self.coords
    }

    pub fn even_coords(&self) -> &[GrassmannElement] {
        &self.coords[..self.space.p]
    }

    pub fn odd_coords(&self) -> &[GrassmannElement] {
        &self.coords[self.space.p..]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(GrassmannElement::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.n != other.n {
            return Err(Error::Dimension(format!(
                "points of {} over Λ_{} and {} over Λ_{}",
                self.space, self.n, other.space, other.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(LambdaPoint { space: self.space, n: self.n, coords })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(LambdaPoint { space: self.space, n: self.n, coords })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        LambdaPoint {
            space: self.space,
            n: self.n,
            coords: self.coords.iter().map(|c| c.scale(r)).collect(),
        }
    }

    /// The `Λ_0`-module action `λ · x` for an even `λ ∈ Λ_n`.
    pub fn scale_even(&self, lambda: &GrassmannElement) -> Result<Self> {
        if !lambda.parity().fits(false) {
            return Err(Error::Parity(format!("scalar {lambda} is not even")));
        }
        let coords = self.coords.iter().map(|c| lambda.try_mul(c)).collect::<Result<_>>()?;
        Ok(LambdaPoint { space: self.space, n: self.n, coords })
    }

    /// Body and nilpotent parts.
    pub fn decompose(&self) -> (SuperVector, LambdaPoint) {
        let body = self.coords.iter().map(GrassmannElement::body).collect();
        let nil = self.coords.iter().map(GrassmannElement::nil_part).collect();
        (
            SuperVector::new(self.space, body).expect("same dimension"),
            LambdaPoint { space: self.space, n: self.n, coords: nil },
        )
    }

    /// Coefficients in the `K`-basis `(coordinate, monomial)` of `Λ_n ⊗ V`.
    pub fn flatten(&self) -> Vec<Rational> {
        let width = 1usize << self.n;
        let mut out = vec![Rational::zero(); self.coords.len() * width];
        for (i, c) in self.coords.iter().enumerate() {
            for (m, v) in c.terms() {
                out[i * width + m as usize] = v.clone();
            }
        }
        out
    }
}

impl fmt::Display for LambdaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |cs: &[GrassmannElement]| {
            cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        };
        write!(f, "({} | {})", join(self.even_coords()), join(self.odd_coords()))
    }
}

/// `V̄(φ) = (φ ⊗ id_V)` restricted to even points.
pub fn base_change(phi: &GrassmannMorphism, x: &LambdaPoint) -> Result<LambdaPoint> {
    if x.n != phi.src() {
        return Err(Error::Dimension(format!(
            "point over Λ_{} pushed along a morphism from Λ_{}",
            x.n,
            phi.src()
        )));
    }
    let coords = x.coords.iter().map(|c| phi.apply(c)).collect::<Result<_>>()?;
    Ok(LambdaPoint { space: x.space, n: phi.dst(), coords })
}

/// `V̄(Λ) = V_0 ⊕ V̄^nil(Λ)`.
pub fn decompose_point(x: &LambdaPoint) -> (SuperVector, LambdaPoint) {
    x.decompose()
}

/// `f̄_Λ`: the `Λ_0`-multilinear extension of `f` to `Λ`-points.
pub fn lift_multilinear(f: &MultilinearMap, args: &[LambdaPoint]) -> Result<LambdaPoint> {
    if args.len() != f.arity() {
        return Err(Error::Dimension(format!(
            "{} arguments for a {}-linear map",
            args.len(),
            f.arity()
        )));
    }
    let n = match args.first() {
        Some(a) => a.n,
        None => 0,
    };
    for (k, (a, d)) in args.iter().zip(f.domains()).enumerate() {
        if a.space != *d {
            return Err(Error::Dimension(format!(
                "argument {} is a point of {}, expected {d}",
                k + 1,
                a.space
            )));
        }
        if a.n != n {
            return Err(Error::Dimension("arguments over different Grassmann algebras".into()));
        }
    }
    let mut coords = vec![GrassmannElement::zero(n); f.codomain().dim()];
    for (inputs, out, c) in f.entries() {
        // λ_k ⋯ λ_1
        let mut prod = GrassmannElement::constant(n, c.clone());
        for (a, &i) in args.iter().zip(inputs).rev() {
            prod = &prod * &a.coords[i];
            if prod.is_zero() {
                break;
            }
        }
        coords[out] = &coords[out] + &prod;
    }
    LambdaPoint::new(f.codomain(), n, coords)
}

/// A candidate functor morphism `V̄_1 × … × V̄_k → W̄`, given by its components
/// over `Λ_n` for `n ≤ max_n`.
pub trait PointFamily {
    fn domains(&self) -> &[SuperSpace];
    fn codomain(&self) -> SuperSpace;
    fn max_n(&self) -> usize;
    /// The component over `Λ_n`, where `n` is the generator count of the arguments.
    fn eval(&self, args: &[LambdaPoint]) -> Result<LambdaPoint>;
}

fn check_args(domains: &[SuperSpace], max_n: usize, args: &[LambdaPoint]) -> Result<usize> {
    if args.len() != domains.len() {
        return Err(Error::Dimension(format!(
            "{} arguments for a family on {} spaces",
            args.len(),
            domains.len()
        )));
    }
    let n = args.first().map_or(0, LambdaPoint::n);
    for (a, d) in args.iter().zip(domains) {
        if a.space() != *d || a.n() != n {
            return Err(Error::Dimension(format!(
                "argument {a} does not lie in {d} over Λ_{n}"
            )));
        }
    }
    if n > max_n {
        return Err(Error::Domain(format!("family is only given up to Λ_{max_n}, not Λ_{n}")));
    }
    Ok(n)
}

/// The lift `f̄` as a point family.
#[derive(Clone, Debug)]
pub struct LiftedFamily {
    pub map: MultilinearMap,
    pub max_n: usize,
}

impl LiftedFamily {
    pub fn new(map: MultilinearMap) -> Self {
        LiftedFamily { map, max_n: DEFAULT_MAX_N }
    }
}

impl PointFamily for LiftedFamily {
    fn domains(&self) -> &[SuperSpace] {
        self.map.domains()
    }

    fn codomain(&self) -> SuperSpace {
        self.map.codomain()
    }

    fn max_n(&self) -> usize {
        self.max_n
    }

    fn eval(&self, args: &[LambdaPoint]) -> Result<LambdaPoint> {
        check_args(self.domains(), self.max_n, args)?;
        lift_multilinear(&self.map, args)
    }
}

/// A family given by a closure, mostly for tests and counterexamples.
pub struct FnFamily<F> {
    domains: Vec<SuperSpace>,
    codomain: SuperSpace,
    max_n: usize,
    f: F,
}

impl<F> FnFamily<F>
where
    F: Fn(&[LambdaPoint]) -> Result<LambdaPoint>,
{
    pub fn new(domains: Vec<SuperSpace>, codomain: SuperSpace, max_n: usize, f: F) -> Self {
        FnFamily { domains, codomain, max_n, f }
    }
}

impl<F> PointFamily for FnFamily<F>
where
    F: Fn(&[LambdaPoint]) -> Result<LambdaPoint>,
{
    fn domains(&self) -> &[SuperSpace] {
        &self.domains
    }

    fn codomain(&self) -> SuperSpace {
        self.codomain
    }

    fn max_n(&self) -> usize {
        self.max_n
    }

    fn eval(&self, args: &[LambdaPoint]) -> Result<LambdaPoint> {
        check_args(&self.domains, self.max_n, args)?;
        let y = (self.f)(args)?;
        if y.space() != self.codomain {
            return Err(Error::Dimension(format!(
                "family returned a point of {}, expected {}",
                y.space(),
                self.codomain
            )));
        }
        Ok(y)
    }
}

/// A family whose components are polynomial expressions in the argument
/// coordinates. `x<k>` refers to the `k`-th coordinate of the concatenated
/// arguments and `t<k>` to a generator of the current `Λ_n`, which allows
/// `Λ`-dependent constants. Components for a specific `n` override the default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprFamily {
    domains: Vec<SuperSpace>,
    codomain: SuperSpace,
    max_n: usize,
    default: Vec<String>,
    overrides: BTreeMap<usize, Vec<String>>,
    parsed_default: Vec<Expr>,
    parsed_overrides: BTreeMap<usize, Vec<Expr>>,
}

impl ExprFamily {
    pub fn new(
        domains: Vec<SuperSpace>,
        codomain: SuperSpace,
        max_n: usize,
        default: Vec<String>,
        overrides: BTreeMap<usize, Vec<String>>,
    ) -> Result<Self> {
        let parse_all = |outputs: &[String]| -> Result<Vec<Expr>> {
            if outputs.len() != codomain.dim() {
                return Err(Error::Dimension(format!(
                    "{} component expressions for {codomain}",
                    outputs.len()
                )));
            }
            let parsed = outputs.iter().map(|s| expr::parse(s)).collect::<Result<Vec<_>>>()?;
            let p: usize = domains.iter().map(|v| v.dim()).sum();
            match parsed.iter().map(Expr::max_variable).max() {
                Some(index) if index > p => Err(Error::VariableRange { index, p }),
                _ => Ok(parsed),
            }
        };
        let parsed_default = parse_all(&default)?;
        let parsed_overrides =
            overrides.iter().map(|(n, o)| Ok((*n, parse_all(o)?))).collect::<Result<_>>()?;
        Ok(ExprFamily {
            domains,
            codomain,
            max_n,
            default,
            overrides,
            parsed_default,
            parsed_overrides,
        })
    }

    pub fn default_outputs(&self) -> &[String] {
        &self.default
    }

    pub fn overrides(&self) -> &BTreeMap<usize, Vec<String>> {
        &self.overrides
    }
}

impl PointFamily for ExprFamily {
    fn domains(&self) -> &[SuperSpace] {
        &self.domains
    }

    fn codomain(&self) -> SuperSpace {
        self.codomain
    }

    fn max_n(&self) -> usize {
        self.max_n
    }

    fn eval(&self, args: &[LambdaPoint]) -> Result<LambdaPoint> {
        let n = check_args(&self.domains, self.max_n, args)?;
        let vars: Vec<GrassmannElement> =
            args.iter().flat_map(|a| a.coords().iter().cloned()).collect();
        let ctx = GrassmannContext { n, vars: &vars };
        let exprs = self.parsed_overrides.get(&n).unwrap_or(&self.parsed_default);
        let coords = exprs
            .iter()
            .map(|e| {
                e.eval(&ctx).map_err(|err| match err {
                    Error::GeneratorRange { index, n } => {
                        Error::Domain(format!("t{index} is not a generator of Λ_{n}"))
                    }
                    other => other,
                })
            })
            .collect::<Result<_>>()?;
        LambdaPoint::new(self.codomain, n, coords)
    }
}

/// Identity family on a single space.
pub fn identity_family(v: SuperSpace, max_n: usize) -> LiftedFamily {
    LiftedFamily { map: MultilinearMap::identity(v), max_n }
}

/// All basis tuples `(i_1, …, i_k)` with `i_r < dim(V_r)`.
pub(crate) fn basis_tuples(domains: &[SuperSpace]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d.dim()).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Recovers the unique even multilinear `g` with `ḡ = F`.
///
/// For every basis tuple with `j` odd entries the family is evaluated in
/// `Λ_j` at `θ_r ⊗ e` (the `r`-th odd argument) and `1 ⊗ e` (even
/// arguments). Anything besides the top monomial is a non-natural remainder,
/// and the result must also commute with the morphisms `φ_l` that kill one
/// generator. Either failure is reported with a witness.
pub fn reconstruct_multilinear(family: &dyn PointFamily) -> Result<MultilinearMap> {
    let domains = family.domains().to_vec();
    let codomain = family.codomain();
    let mut g = MultilinearMap::zero(domains.clone(), codomain);
    for tuple in basis_tuples(&domains) {
        let j = tuple.iter().zip(&domains).filter(|(i, d)| d.is_odd(**i)).count();
        if j > family.max_n() {
            return Err(Error::Reconstruction(format!(
                "probe {tuple:?} needs Λ_{j}, the family stops at Λ_{}",
                family.max_n()
            )));
        }
        let mut r = 0;
        let args = tuple
            .iter()
            .zip(&domains)
            .map(|(&i, d)| {
                let lambda = if d.is_odd(i) {
                    r += 1;
                    GrassmannElement::generator(j, r)?
                } else {
                    GrassmannElement::one(j)
                };
                LambdaPoint::basis(*d, j, i, lambda)
            })
            .collect::<Result<Vec<_>>>()?;
        let y = family.eval(&args)?;
        let top: Monomial = full_mask(j);
        let reorder = sign(j * (j.saturating_sub(1)) / 2 % 2 == 1);
        for (out, coord) in y.coords().iter().enumerate() {
            if let Some((m, c)) = coord.terms().find(|(m, _)| *m != top) {
                let stray = GrassmannElement::monomial(j, m, c.clone());
                return Err(Error::Reconstruction(format!(
                    "probe {} gives the stray term {stray} in output {} (value {y})",
                    describe_tuple(&tuple),
                    out + 1
                )));
            }
            let value = &reorder * coord.coeff(top);
            if !value.is_zero() {
                g.set(&tuple, out, value).map_err(|e| {
                    Error::Reconstruction(format!(
                        "probe {} does not give an even map: {e}",
                        describe_tuple(&tuple)
                    ))
                })?;
            }
        }
        for l in 1..=j {
            let phi = GrassmannMorphism::kill_generator(j, l)?;
            let moved = args.iter().map(|a| base_change(&phi, a)).collect::<Result<Vec<_>>>()?;
            let lhs = family.eval(&moved)?;
            let rhs = base_change(&phi, &y)?;
            if lhs != rhs {
                return Err(Error::Reconstruction(format!(
                    "not natural: at probe {} the morphism {phi} gives {lhs} but pushing the value forward gives {rhs}",
                    describe_tuple(&tuple)
                )));
            }
        }
    }
    verify_lift(family, &g)?;
    Ok(g)
}

const VERIFY_MAX_N: usize = 4;
const VERIFY_TUPLES: usize = 512;

/// Compares the family with the lift of `g` on basis samples over small `Λ_n`.
/// Probes only see `Λ_j` for `j` up to the arity, so a family that departs
/// from the lift over larger algebras is caught here.
fn verify_lift(family: &dyn PointFamily, g: &MultilinearMap) -> Result<()> {
    for n in 0..=family.max_n().min(VERIFY_MAX_N) {
        let per_arg: Vec<Vec<LambdaPoint>> =
            family.domains().iter().map(|d| basis_samples(*d, n)).collect();
        let total: usize = per_arg.iter().map(Vec::len).product();
        let stride = total.div_ceil(VERIFY_TUPLES).max(1);
        for flat in (0..total).step_by(stride) {
            let mut rest = flat;
            let args: Vec<LambdaPoint> = per_arg
                .iter()
                .map(|pts| {
                    let x = pts[rest % pts.len()].clone();
                    rest /= pts.len();
                    x
                })
                .collect();
            let lhs = family.eval(&args)?;
            let rhs = lift_multilinear(g, &args)?;
            if lhs != rhs {
                return Err(Error::Reconstruction(format!(
                    "not natural: at {} over Λ_{n} the family gives {lhs} but the lift of the recovered map gives {rhs}",
                    args.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
                )));
            }
        }
    }
    Ok(())
}

fn describe_tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|i| format!("e{}", i + 1)).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityViolation {
    pub morphism: GrassmannMorphism,
    pub sample: Vec<LambdaPoint>,
    /// `F_{Λ'}(V̄(φ) x)`
    pub lhs: LambdaPoint,
    /// `W̄(φ) F_Λ(x)`
    pub rhs: LambdaPoint,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NaturalityReport {
    pub checked: usize,
    pub violations: Vec<NaturalityViolation>,
    /// Samples on which the family could not be evaluated at all.
    pub errors: Vec<String>,
}

impl NaturalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }

    pub fn merge(&mut self, other: NaturalityReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self.errors.extend(other.errors);
    }
}

/// Checks the square `F_{Λ'} ∘ V̄(φ) = W̄(φ) ∘ F_Λ` on every sample tuple.
pub fn check_naturality(
    family: &dyn PointFamily,
    phi: &GrassmannMorphism,
    samples: &[Vec<LambdaPoint>],
) -> NaturalityReport {
    let mut report = NaturalityReport::default();
    for sample in samples {
        report.checked += 1;
        let outcome = (|| -> Result<Option<NaturalityViolation>> {
            let moved = sample.iter().map(|a| base_change(phi, a)).collect::<Result<Vec<_>>>()?;
            let lhs = family.eval(&moved)?;
            let rhs = base_change(phi, &family.eval(sample)?)?;
            Ok((lhs != rhs).then(|| NaturalityViolation {
                morphism: phi.clone(),
                sample: sample.clone(),
                lhs,
                rhs,
            }))
        })();
        match outcome {
            Ok(Some(v)) => report.violations.push(v),
            Ok(None) => {}
            Err(e) => report.errors.push(format!("sample {}: {e}", describe_sample(sample))),
        }
    }
    report
}

fn describe_sample(sample: &[LambdaPoint]) -> String {
    sample.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// `Hom_Gr(Λ_n, Λ_m) ≅ K^{0|n}(Λ_m)`: the point whose odd coordinates are the
/// generator images.
pub fn morphism_to_point(phi: &GrassmannMorphism) -> LambdaPoint {
    LambdaPoint::new(SuperSpace::new(0, phi.src()), phi.dst(), phi.images().to_vec())
        .expect("generator images are odd")
}

pub fn point_to_morphism(x: &LambdaPoint) -> Result<GrassmannMorphism> {
    if x.space().p != 0 {
        return Err(Error::Dimension(format!(
            "superpoints are points of K^{{0|n}}, got {}",
            x.space()
        )));
    }
    GrassmannMorphism::new(x.space().q, x.n(), x.coords().to_vec())
}

/// A `K̄`-module given as a subfunctor of some `W̄`: a spanning set of its
/// points over each `Λ_n`, with base change inherited from `W̄`.
pub trait ModuleFamily {
    fn ambient(&self) -> SuperSpace;
    fn max_n(&self) -> usize;
    fn spanning_set(&self, n: usize) -> Vec<LambdaPoint>;
    fn name(&self) -> String;
}

/// Monomials of `Λ_n` of the given parity, ascending.
pub fn monomials_of_parity(n: usize, odd: bool) -> Vec<Monomial> {
    (0..=full_mask(n)).filter(|m| (m.count_ones() % 2 == 1) == odd).collect()
}

fn points_spanning(v: SuperSpace, n: usize, nil_only: bool) -> Vec<LambdaPoint> {
    let mut out = Vec::new();
    for i in 0..v.dim() {
        for m in monomials_of_parity(n, v.is_odd(i)) {
            if nil_only && m == 0 {
                continue;
            }
            let lambda = GrassmannElement::monomial(n, m, Rational::one());
            out.push(LambdaPoint::basis(v, n, i, lambda).expect("parity matches"));
        }
    }
    out
}

/// `V̄` itself.
#[derive(Clone, Copy, Debug)]
pub struct FullPoints {
    pub space: SuperSpace,
    pub max_n: usize,
}

impl ModuleFamily for FullPoints {
    fn ambient(&self) -> SuperSpace {
        self.space
    }

    fn max_n(&self) -> usize {
        self.max_n
    }

    fn spanning_set(&self, n: usize) -> Vec<LambdaPoint> {
        points_spanning(self.space, n, false)
    }

    fn name(&self) -> String {
        format!("points of {}", self.space)
    }
}

/// `V̄^nil(Λ) = (Λ^nil ⊗ V)_0`.
#[derive(Clone, Copy, Debug)]
pub struct NilPoints {
    pub space: SuperSpace,
    pub max_n: usize,
}

impl ModuleFamily for NilPoints {
    fn ambient(&self) -> SuperSpace {
        self.space
    }

    fn max_n(&self) -> usize {
        self.max_n
    }

    fn spanning_set(&self, n: usize) -> Vec<LambdaPoint> {
        points_spanning(self.space, n, true)
    }

    fn name(&self) -> String {
        format!("nilpotent points of {}", self.space)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperrepVerdict {
    pub representable: bool,
    /// `dim F(K) | dim ker F(ε_{Λ_1})`, reported when representable.
    pub format: Option<SuperSpace>,
    /// `(n, dim F(Λ_n), dim of the candidate's points over Λ_n)`.
    pub dimensions: Vec<(usize, usize, usize)>,
    pub reasons: Vec<String>,
}

fn in_span(basis_rank: usize, basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let mut rows = basis.to_vec();
    rows.push(v.to_vec());
    linalg::rank(&rows) == basis_rank
}

/// Superrepresentability test: `F(ε_{Λ_1})` must be onto `F(K)`, and `F` must
/// be isomorphic to the points of `U = F(K) ⊕ Π(ker F(ε_{Λ_1}))`.
///
/// The comparison map sends `λ ⊗ u` (even `λ`, `u ∈ F(K)`) to `λ · F(c)(u)` and
/// `λ ⊗ k` (odd `λ`, `k` in the kernel) to `F(θ ↦ λ)(k)`; it is natural by
/// construction, so the check is that it is bijective onto `F(Λ_n)` for
/// every `n ≤ max_n`. Closure of `F` under the kill-one-generator and
/// terminal morphisms is checked as well.
pub fn superrep_check(module: &dyn ModuleFamily) -> SuperrepVerdict {
    let mut reasons = Vec::new();
    let flat = |pts: &[LambdaPoint]| pts.iter().map(LambdaPoint::flatten).collect::<Vec<_>>();

    let s0 = module.spanning_set(0);
    let s0_flat = flat(&s0);
    let b0: Vec<LambdaPoint> =
        linalg::independent_subset(&s0_flat).into_iter().map(|i| s0[i].clone()).collect();
    let dim0 = b0.len();

    let s1 = module.spanning_set(1);
    let b1: Vec<LambdaPoint> =
        linalg::independent_subset(&flat(&s1)).into_iter().map(|i| s1[i].clone()).collect();
    let eps = GrassmannMorphism::terminal(1);
    let images: Vec<LambdaPoint> =
        b1.iter().map(|x| base_change(&eps, x).expect("Λ_1 point")).collect();
    let images_flat = flat(&images);
    let image_rank = linalg::rank(&images_flat);
    if images_flat.iter().any(|v| !in_span(dim0, &flat(&b0), v)) {
        reasons.push("F(ε) does not land in F(K)".to_string());
    }
    if image_rank != dim0 {
        reasons.push(format!(
            "F(ε_Λ1): F(Λ_1) → F(K) is not surjective (rank {image_rank}, dim F(K) = {dim0})"
        ));
    }
    let kernel: Vec<LambdaPoint> = linalg::left_nullspace(&images_flat)
        .into_iter()
        .map(|c| {
            b1.iter().zip(&c).fold(LambdaPoint::zero(module.ambient(), 1), |acc, (b, ci)| {
                acc.try_add(&b.scale(ci)).expect("same space")
            })
        })
        .collect();
    let (p, q) = (dim0, kernel.len());

    let mut dimensions = Vec::new();
    for n in 0..=module.max_n() {
        let sn = module.spanning_set(n);
        let sn_flat = flat(&sn);
        let dim_f = linalg::rank(&sn_flat);
        let mut candidate = Vec::new();
        for m in monomials_of_parity(n, false) {
            let lambda = GrassmannElement::monomial(n, m, Rational::one());
            for u in &b0 {
                let embedded = base_change(&GrassmannMorphism::initial(n), u).expect("Λ_0 point");
                candidate.push(embedded.scale_even(&lambda).expect("even scalar"));
            }
        }
        for m in monomials_of_parity(n, true) {
            let lambda = GrassmannElement::monomial(n, m, Rational::one());
            let eta = GrassmannMorphism::from_odd(lambda).expect("odd image");
            for k in &kernel {
                candidate.push(base_change(&eta, k).expect("Λ_1 point"));
            }
        }
        let cand_flat = flat(&candidate);
        let cand_rank = linalg::rank(&cand_flat);
        dimensions.push((n, dim_f, candidate.len()));
        if cand_rank != candidate.len() {
            reasons.push(format!("comparison map is not injective over Λ_{n}"));
        }
        if cand_flat.iter().any(|v| !in_span(dim_f, &sn_flat, v)) {
            reasons.push(format!("comparison map leaves F(Λ_{n})"));
        }
        if dim_f != candidate.len() {
            reasons.push(format!(
                "F(Λ_{n}) has dimension {dim_f} but the points of K^{{{p}|{q}}} over Λ_{n} have dimension {}",
                candidate.len()
            ));
        }
        if n >= 1 {
            let mut morphisms = vec![GrassmannMorphism::terminal(n)];
            morphisms.extend((1..=n).map(|l| GrassmannMorphism::kill_generator(n, l).unwrap()));
            for phi in morphisms {
                let target_n = phi.dst();
                let target = flat(&module.spanning_set(target_n));
                let target_rank = linalg::rank(&target);
                for x in &sn {
                    let y = base_change(&phi, x).expect("matching algebra");
                    if !in_span(target_rank, &target, &y.flatten()) {
                        reasons.push(format!("F is not closed under {phi}: {x} ↦ {y}"));
                        break;
                    }
                }
            }
        }
    }
    reasons.dedup();
    let representable = reasons.is_empty();
    SuperrepVerdict {
        representable,
        format: representable.then(|| SuperSpace::new(p, q)),
        dimensions,
        reasons,
    }
}

/// Canonical samples: every `λ ⊗ e_i` with `λ` a monomial of matching parity.
pub fn basis_samples(v: SuperSpace, n: usize) -> Vec<LambdaPoint> {
    points_spanning(v, n, false)
}

pub(crate) fn one_point(space: SuperSpace, n: usize, values: &[Rational]) -> LambdaPoint {
    let coords = (0..space.dim())
        .map(|i| {
            if space.is_odd(i) {
                GrassmannElement::zero(n)
            } else {
                GrassmannElement::constant(n, values.get(i).cloned().unwrap_or_else(Rational::one))
            }
        })
        .collect();
    LambdaPoint { space, n, coords }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::element;
    use crate::rational::int;

    fn t(n: usize, i: usize) -> GrassmannElement {
        GrassmannElement::generator(n, i).unwrap()
    }

    fn point(space: SuperSpace, n: usize, coords: &[&str]) -> LambdaPoint {
        let cs = coords.iter().map(|s| expr::parse_element(s, n).unwrap()).collect();
        LambdaPoint::new(space, n, cs).unwrap()
    }

    #[test]
    fn rejects_wrong_parity_coordinates() {
        let v = SuperSpace::new(1, 1);
        let bad = LambdaPoint::new(v, 2, vec![t(2, 1), t(2, 2)]);
        assert!(matches!(bad, Err(Error::Parity(_))));
        let bad = LambdaPoint::new(v, 2, vec![GrassmannElement::one(2), GrassmannElement::one(2)]);
        assert!(matches!(bad, Err(Error::Parity(_))));
    }

    #[test]
    fn base_change_examples() {
        let v = SuperSpace::new(1, 1);
        let x = point(v, 2, &["3 + t1*t2", "t1 + 2*t2"]);
        assert_eq!(base_change(&GrassmannMorphism::identity(2), &x).unwrap(), x);
        let at_body = base_change(&GrassmannMorphism::terminal(2), &x).unwrap();
        assert_eq!(at_body, point(v, 0, &["3", "0"]));
    }

    #[test]
    fn decomposition() {
        let v = SuperSpace::new(1, 1);
        let x = point(v, 2, &["3 + t1*t2", "t1"]);
        let (body, nil) = decompose_point(&x);
        assert_eq!(body.coords(), &[int(3), int(0)]);
        assert_eq!(nil, point(v, 2, &["t1*t2", "t1"]));
        assert_eq!(LambdaPoint::from_vector(&body, 2).unwrap().try_add(&nil).unwrap(), x);
    }

    #[test]
    fn lift_reverses_grassmann_factors() {
        let v = SuperSpace::new(0, 1);
        let k = SuperSpace::new(1, 0);
        let mut b = MultilinearMap::zero(vec![v, v], k);
        b.set(&[0, 0], 0, int(1)).unwrap();
        let x1 = LambdaPoint::basis(v, 2, 0, t(2, 1)).unwrap();
        let x2 = LambdaPoint::basis(v, 2, 0, t(2, 2)).unwrap();
        let y = lift_multilinear(&b, &[x1, x2]).unwrap();
        // θ2θ1 ⊗ b(v, v) = -θ1θ2
        assert_eq!(y.coords()[0], element(2, &[(&[1, 2], int(-1))]).unwrap());
    }

    #[test]
    fn lift_of_identity() {
        let v = SuperSpace::new(2, 1);
        let x = point(v, 3, &["1 + t1*t2", "t2*t3", "t3"]);
        assert_eq!(lift_multilinear(&MultilinearMap::identity(v), std::slice::from_ref(&x)).unwrap(), x);
    }

    #[test]
    fn reconstruction_sign_table() {
        for j in 0..6usize {
            let expected = if matches!(j % 4, 2 | 3) { -1 } else { 1 };
            assert_eq!(sign(j * j.saturating_sub(1) / 2 % 2 == 1), int(expected), "j={j}");
        }
    }

    #[test]
    fn reconstruct_round_trip_small() {
        let v = SuperSpace::new(1, 1);
        let mut f = MultilinearMap::zero(vec![v, v, v], v);
        f.set(&[1, 1, 1], 1, int(3)).unwrap();
        f.set(&[1, 0, 1], 0, int(-2)).unwrap();
        f.set(&[0, 0, 0], 0, int(5)).unwrap();
        f.set(&[0, 1, 0], 1, int(7)).unwrap();
        let g = reconstruct_multilinear(&LiftedFamily::new(f.clone())).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn zero_family_reconstructs_to_zero() {
        let v = SuperSpace::new(1, 2);
        let f = MultilinearMap::zero(vec![v, v], v);
        assert_eq!(reconstruct_multilinear(&LiftedFamily::new(f.clone())).unwrap(), f);
    }

    #[test]
    fn injected_constant_is_rejected() {
        let v = SuperSpace::new(0, 1);
        let k = SuperSpace::new(1, 0);
        let mut f = MultilinearMap::zero(vec![v, v], k);
        f.set(&[0, 0], 0, int(1)).unwrap();
        let lifted = LiftedFamily::new(f);
        let family = FnFamily::new(vec![v, v], k, 6, |args: &[LambdaPoint]| {
            let y = lifted.eval(args)?;
            let n = y.n();
            if n < 2 {
                return Ok(y);
            }
            let bump = &t(n, 1) * &t(n, 2);
            LambdaPoint::new(k, n, vec![&y.coords()[0] + &bump])
        });
        let err = reconstruct_multilinear(&family).unwrap_err();
        assert!(matches!(err, Error::Reconstruction(ref m) if m.contains("not natural")), "{err}");
    }

    #[test]
    fn naturality_of_identity_and_counterexample() {
        let v = SuperSpace::new(1, 1);
        let samples: Vec<Vec<LambdaPoint>> =
            basis_samples(v, 3).into_iter().map(|x| vec![x]).collect();
        let kill = GrassmannMorphism::kill_generator(3, 1).unwrap();
        let id = identity_family(v, 6);
        assert!(check_naturality(&id, &kill, &samples).passed());

        let family = FnFamily::new(vec![v], v, 6, |args: &[LambdaPoint]| {
            let x = &args[0];
            let n = x.n();
            if n < 2 {
                return Ok(x.clone());
            }
            let bump = LambdaPoint::basis(v, n, 0, &t(n, 1) * &t(n, 2))?;
            x.try_add(&bump)
        });
        let report = check_naturality(&family, &kill, &samples);
        assert!(!report.violations.is_empty());
        assert_eq!(report.violations[0].morphism, kill);
    }

    #[test]
    fn superpoints() {
        let img = expr::parse_element("t1*t2*t3 + t2", 3).unwrap();
        let phi = GrassmannMorphism::new(1, 3, vec![img.clone()]).unwrap();
        let x = morphism_to_point(&phi);
        assert_eq!(x.coords(), &[img]);
        assert_eq!(point_to_morphism(&x).unwrap(), phi);
        let eps = morphism_to_point(&GrassmannMorphism::terminal(2));
        assert!(eps.is_zero());
        assert_eq!(eps.space(), SuperSpace::new(0, 2));
        assert_eq!(eps.n(), 0);
    }

    #[test]
    fn superrepresentability() {
        let v = SuperSpace::new(1, 2);
        let verdict = superrep_check(&FullPoints { space: v, max_n: 4 });
        assert!(verdict.representable, "{:?}", verdict.reasons);
        assert_eq!(verdict.format, Some(v));

        let nil_even = superrep_check(&NilPoints { space: SuperSpace::new(1, 0), max_n: 4 });
        assert!(!nil_even.representable);
        assert!(nil_even.reasons.iter().any(|r| r.contains("Λ_2")), "{:?}", nil_even.reasons);

        let nil_odd = superrep_check(&NilPoints { space: SuperSpace::new(0, 1), max_n: 4 });
        assert!(nil_odd.representable, "{:?}", nil_odd.reasons);
        assert_eq!(nil_odd.format, Some(SuperSpace::new(0, 1)));
    }

    #[test]
    fn expr_family_components() {
        let v = SuperSpace::new(1, 1);
        let mut overrides = BTreeMap::new();
        overrides.insert(2, vec!["x1 + t1*t2".to_string(), "x2".to_string()]);
        let fam =
            ExprFamily::new(vec![v], v, 4, vec!["x1".into(), "x2".into()], overrides).unwrap();
        let x = point(v, 2, &["2", "t1"]);
        assert_eq!(fam.eval(&[x]).unwrap(), point(v, 2, &["2 + t1*t2", "t1"]));
        let odd_out = ExprFamily::new(vec![v], v, 4, vec!["x2".into(), "x1".into()], BTreeMap::new())
            .unwrap();
        assert!(matches!(odd_out.eval(&[point(v, 1, &["1", "t1"])]), Err(Error::Parity(_))));
    }

    #[test]
    fn reconstruction_sees_beyond_probe_algebras() {
        let v = SuperSpace::new(1, 1);
        let plain = vec!["x1".to_string(), "x2".to_string()];
        let overrides = [(0, plain.clone()), (1, plain)].into_iter().collect();
        let family = ExprFamily::new(vec![v], v, 4, vec!["x1 + t1*t2".into(), "x2".into()], overrides).unwrap();
        let err = reconstruct_multilinear(&family).unwrap_err();
        assert!(err.to_string().contains("not natural"), "{err}");
    }
}
