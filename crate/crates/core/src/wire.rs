//! JSON encodings. Basis, generator and slot indices are 1-based on the wire;
//! rationals are strings `"p"` or `"p/q"`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr;
use crate::grassmann::{monomial_from_indices, monomial_indices, GrassmannElement, GrassmannMorphism};
use crate::points::{ExprFamily, LambdaPoint, NaturalityViolation, SuperrepVerdict};
use crate::rational::{self, Rational};
use crate::skeleton::{Skeleton, Superfunction};
use crate::superlinear::{MultilinearMap, SuperSpace};
use crate::supermatrix::SuperMatrix;

mod text {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(D::Error::custom)
    }
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

fn zero_based(indices: &[usize], what: &str) -> Result<Vec<usize>> {
    indices
        .iter()
        .map(|&i| i.checked_sub(1).ok_or_else(|| Error::Invalid(format!("{what} indices start at 1"))))
        .collect()
}

fn odd_mask(idx: &[usize], n: usize) -> Result<u64> {
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(format!("index list {idx:?} must be strictly increasing")));
    }
    monomial_from_indices(idx, n)
}

macro_rules! via_wire {
    ($ty:ty, $wire:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                <$wire>::from(self).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                <$wire>::deserialize(d)?.into_value().map_err(D::Error::custom)
            }
        }
    };
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    idx: Vec<usize>,
    #[serde(with = "text")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementWire {
    n: usize,
    terms: Vec<TermWire>,
}

impl From<&GrassmannElement> for ElementWire {
    fn from(a: &GrassmannElement) -> Self {
        let terms = a
            .terms()
            .map(|(m, c)| TermWire { idx: monomial_indices(m), coeff: c.clone() })
            .collect();
        ElementWire { n: a.n(), terms }
    }
}

impl ElementWire {
    fn into_value(self) -> Result<GrassmannElement> {
        let n = self.n;
        let mut seen = std::collections::BTreeSet::new();
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let m = odd_mask(&t.idx, n)?;
                if !seen.insert(m) {
                    return Err(Error::Invalid(format!("monomial {:?} listed twice", t.idx)));
                }
                Ok((m, t.coeff))
            })
            .collect::<Result<Vec<_>>>()?;
        GrassmannElement::from_terms(n, terms)
    }
}

via_wire!(GrassmannElement, ElementWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismWire {
    src: usize,
    dst: usize,
    images: Vec<GrassmannElement>,
}

impl From<&GrassmannMorphism> for MorphismWire {
    fn from(phi: &GrassmannMorphism) -> Self {
        MorphismWire { src: phi.src(), dst: phi.dst(), images: phi.images().to_vec() }
    }
}

impl MorphismWire {
    fn into_value(self) -> Result<GrassmannMorphism> {
        GrassmannMorphism::new(self.src, self.dst, self.images)
    }
}

via_wire!(GrassmannMorphism, MorphismWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryWire {
    #[serde(rename = "in")]
    inputs: Vec<usize>,
    out: usize,
    #[serde(with = "text")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultilinearWire {
    domains: Vec<SuperSpace>,
    codomain: SuperSpace,
    entries: Vec<EntryWire>,
}

impl From<&MultilinearMap> for MultilinearWire {
    fn from(f: &MultilinearMap) -> Self {
        let entries = f
            .entries()
            .map(|(i, o, c)| EntryWire { inputs: one_based(i), out: o + 1, coeff: c.clone() })
            .collect();
        MultilinearWire { domains: f.domains().to_vec(), codomain: f.codomain(), entries }
    }
}

impl MultilinearWire {
    fn into_value(self) -> Result<MultilinearMap> {
        let mut f = MultilinearMap::zero(self.domains, self.codomain);
        for e in self.entries {
            let inputs = zero_based(&e.inputs, "basis")?;
            let out = zero_based(&[e.out], "output")?[0];
            if !f.get(&inputs, out).is_zero() {
                return Err(Error::Invalid(format!("entry {:?} -> {} listed twice", e.inputs, e.out)));
            }
            f.set(&inputs, out, e.coeff)?;
        }
        Ok(f)
    }
}

via_wire!(MultilinearMap, MultilinearWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointWire {
    space: SuperSpace,
    n: usize,
    coords: Vec<GrassmannElement>,
}

impl From<&LambdaPoint> for PointWire {
    fn from(x: &LambdaPoint) -> Self {
        PointWire { space: x.space(), n: x.n(), coords: x.coords().to_vec() }
    }
}

impl PointWire {
    fn into_value(self) -> Result<LambdaPoint> {
        LambdaPoint::new(self.space, self.n, self.coords)
    }
}

via_wire!(LambdaPoint, PointWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixWire {
    space: SuperSpace,
    n: usize,
    entries: Vec<Vec<GrassmannElement>>,
}

impl From<&SuperMatrix> for MatrixWire {
    fn from(a: &SuperMatrix) -> Self {
        MatrixWire { space: a.space(), n: a.n(), entries: a.entries().to_vec() }
    }
}

impl MatrixWire {
    fn into_value(self) -> Result<SuperMatrix> {
        SuperMatrix::new(self.space, self.n, self.entries)
    }
}

via_wire!(SuperMatrix, MatrixWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormEntryWire {
    odd_idx: Vec<usize>,
    out: usize,
    poly: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormWire {
    k: usize,
    entries: Vec<FormEntryWire>,
}

#[derive(Serialize, Deserialize)]
struct Interval(#[serde(with = "text")] Rational, #[serde(with = "text")] Rational);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonWire {
    domain: SuperSpace,
    codomain: SuperSpace,
    dom_box: Option<Vec<Interval>>,
    maps: Vec<FormWire>,
}

impl From<&Skeleton> for SkeletonWire {
    fn from(s: &Skeleton) -> Self {
        let mut forms: BTreeMap<usize, Vec<FormEntryWire>> = BTreeMap::new();
        for (mask, out, poly) in s.components() {
            forms.entry(mask.count_ones() as usize).or_default().push(FormEntryWire {
                odd_idx: monomial_indices(mask),
                out: out + 1,
                poly: poly.to_string(),
            });
        }
        SkeletonWire {
            domain: s.domain(),
            codomain: s.codomain(),
            dom_box: s
                .dom_box()
                .map(|b| b.iter().map(|(lo, hi)| Interval(lo.clone(), hi.clone())).collect()),
            maps: forms.into_iter().map(|(k, entries)| FormWire { k, entries }).collect(),
        }
    }
}

impl SkeletonWire {
    fn into_value(self) -> Result<Skeleton> {
        let dom_box = self.dom_box.map(|b| b.into_iter().map(|Interval(lo, hi)| (lo, hi)).collect());
        let mut s = Skeleton::new(self.domain, self.codomain, dom_box)?;
        for form in self.maps {
            for e in form.entries {
                if e.odd_idx.len() != form.k {
                    return Err(Error::Invalid(format!(
                        "odd_idx {:?} listed under k = {}",
                        e.odd_idx, form.k
                    )));
                }
                let mask = odd_mask(&e.odd_idx, self.domain.q)?;
                let out = zero_based(&[e.out], "output")?[0];
                if !s.get(mask, out).is_zero() {
                    return Err(Error::Invalid(format!("component {:?} -> {} listed twice", e.odd_idx, e.out)));
                }
                s.set(mask, out, expr::parse_poly(&e.poly, self.domain.p)?)?;
            }
        }
        Ok(s)
    }
}

via_wire!(Skeleton, SkeletonWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SfTermWire {
    odd_idx: Vec<usize>,
    poly: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuperfunctionWire {
    p: usize,
    q: usize,
    terms: Vec<SfTermWire>,
}

impl From<&Superfunction> for SuperfunctionWire {
    fn from(f: &Superfunction) -> Self {
        let terms = f
            .terms()
            .map(|(m, poly)| SfTermWire { odd_idx: monomial_indices(m), poly: poly.to_string() })
            .collect();
        SuperfunctionWire { p: f.p(), q: f.q(), terms }
    }
}

impl SuperfunctionWire {
    fn into_value(self) -> Result<Superfunction> {
        let mut seen = std::collections::BTreeSet::new();
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let m = odd_mask(&t.odd_idx, self.q)?;
                if !seen.insert(m) {
                    return Err(Error::Invalid(format!("term {:?} listed twice", t.odd_idx)));
                }
                Ok((m, expr::parse_poly(&t.poly, self.p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Superfunction::from_terms(self.p, self.q, terms)
    }
}

via_wire!(Superfunction, SuperfunctionWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ViolationWire {
    morphism: GrassmannMorphism,
    sample: Vec<LambdaPoint>,
    lhs: LambdaPoint,
    rhs: LambdaPoint,
}

impl From<&NaturalityViolation> for ViolationWire {
    fn from(v: &NaturalityViolation) -> Self {
        ViolationWire {
            morphism: v.morphism.clone(),
            sample: v.sample.clone(),
            lhs: v.lhs.clone(),
            rhs: v.rhs.clone(),
        }
    }
}

impl ViolationWire {
    fn into_value(self) -> Result<NaturalityViolation> {
        Ok(NaturalityViolation { morphism: self.morphism, sample: self.sample, lhs: self.lhs, rhs: self.rhs })
    }
}

via_wire!(NaturalityViolation, ViolationWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideWire {
    n: usize,
    components: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprFamilyWire {
    domains: Vec<SuperSpace>,
    codomain: SuperSpace,
    #[serde(default = "default_max_n")]
    max_n: usize,
    components: Vec<String>,
    #[serde(default)]
    overrides: Vec<OverrideWire>,
}

fn default_max_n() -> usize {
    crate::points::DEFAULT_MAX_N
}

impl From<&ExprFamily> for ExprFamilyWire {
    fn from(f: &ExprFamily) -> Self {
        use crate::points::PointFamily;
        ExprFamilyWire {
            domains: f.domains().to_vec(),
            codomain: f.codomain(),
            max_n: f.max_n(),
            components: f.default_outputs().to_vec(),
            overrides: f
                .overrides()
                .iter()
                .map(|(n, c)| OverrideWire { n: *n, components: c.clone() })
                .collect(),
        }
    }
}

impl ExprFamilyWire {
    fn into_value(self) -> Result<ExprFamily> {
        let overrides = self.overrides.into_iter().map(|o| (o.n, o.components)).collect();
        ExprFamily::new(self.domains, self.codomain, self.max_n, self.components, overrides)
    }
}

via_wire!(ExprFamily, ExprFamilyWire);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionWire {
    n: usize,
    dim: usize,
    expected: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerdictWire {
    representable: bool,
    format: Option<SuperSpace>,
    dimensions: Vec<DimensionWire>,
    reasons: Vec<String>,
}

impl From<&SuperrepVerdict> for VerdictWire {
    fn from(v: &SuperrepVerdict) -> Self {
        VerdictWire {
            representable: v.representable,
            format: v.format,
            dimensions: v
                .dimensions
                .iter()
                .map(|&(n, dim, expected)| DimensionWire { n, dim, expected })
                .collect(),
            reasons: v.reasons.clone(),
        }
    }
}

impl VerdictWire {
    fn into_value(self) -> Result<SuperrepVerdict> {
        Ok(SuperrepVerdict {
            representable: self.representable,
            format: self.format,
            dimensions: self.dimensions.into_iter().map(|d| (d.n, d.dim, d.expected)).collect(),
            reasons: self.reasons,
        })
    }
}

via_wire!(SuperrepVerdict, VerdictWire);
