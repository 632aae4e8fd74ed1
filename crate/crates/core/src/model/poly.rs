//! Truncated polynomial models F[[z]] (x) exterior generators, with the
//! operators that act on them: the derivative d/dz of degree -2, ring
//! endomorphisms z -> z + mu for a square-zero degree-2 element mu, and
//! fiber integrations that strip exterior generators.
//!
//! The generator z has degree 2 and is truncated at z^N; u, v, vhat have
//! degree 1 and w has degree 2 with w^2 = 0. Monomials are kept in the fixed
//! normal order u < v < vhat < w with Koszul signs, so basis labels are
//! deterministic and serialization is bit-stable. Multiplication past the
//! z-truncation is an error, never a silent drop.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::modules::CoefficientRing;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Exterior generators in normal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtGen {
    U,
    V,
    VHat,
    W,
}

impl ExtGen {
    pub const ALL: [ExtGen; 4] = [ExtGen::U, ExtGen::V, ExtGen::VHat, ExtGen::W];

    pub fn degree(self) -> i32 {
        match self {
            ExtGen::U | ExtGen::V | ExtGen::VHat => 1,
            ExtGen::W => 2,
        }
    }

    fn bit(self) -> u8 {
        match self {
            ExtGen::U => 1,
            ExtGen::V => 2,
            ExtGen::VHat => 4,
            ExtGen::W => 8,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            ExtGen::U => "u",
            ExtGen::V => "v",
            ExtGen::VHat => "v^",
            ExtGen::W => "w",
        }
    }
}

/// A normal-ordered monomial z^k * (subset of exterior generators).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub z_pow: usize,
    ext: u8,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { z_pow: 0, ext: 0 }
    }

    pub fn z_power(k: usize) -> Self {
        Monomial { z_pow: k, ext: 0 }
    }

    pub fn from_parts(z_pow: usize, gens: &[ExtGen]) -> Self {
        let mut ext = 0;
        for g in gens {
            assert_eq!(ext & g.bit(), 0, "repeated exterior generator");
            ext |= g.bit();
        }
        Monomial { z_pow, ext }
    }

    pub fn has(&self, g: ExtGen) -> bool {
        self.ext & g.bit() != 0
    }

    pub fn gens(&self) -> Vec<ExtGen> {
        ExtGen::ALL.iter().copied().filter(|g| self.has(*g)).collect()
    }

    pub fn degree(&self) -> i32 {
        2 * self.z_pow as i32 + self.gens().iter().map(|g| g.degree()).sum::<i32>()
    }

    fn odd_gens(&self) -> Vec<ExtGen> {
        self.gens().into_iter().filter(|g| g.degree() % 2 == 1).collect()
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        match self.z_pow {
            0 => {}
            1 => parts.push("z".to_string()),
            k => parts.push(format!("z^{k}")),
        }
        for g in self.gens() {
            parts.push(g.symbol().to_string());
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Normal-ordered product of two monomials: None when an exterior generator
/// repeats (square-zero), otherwise the Koszul sign and the merged monomial.
/// The z-truncation check belongs to the model, not to the raw product.
pub fn monomial_product(a: &Monomial, b: &Monomial) -> Option<(i32, Monomial)> {
    if a.ext & b.ext != 0 {
        return None;
    }
    // Koszul sign: each odd generator of b moves left past the odd
    // generators of a that come later in the normal order.
    let mut sign = 1;
    for gb in b.odd_gens() {
        let crossings = a
            .odd_gens()
            .into_iter()
            .filter(|ga| *ga > gb)
            .count();
        if crossings % 2 == 1 {
            sign = -sign;
        }
    }
    Some((
        sign,
        Monomial {
            z_pow: a.z_pow + b.z_pow,
            ext: a.ext | b.ext,
        },
    ))
}

/// A truncated graded model with a labeled monomial basis per degree.
#[derive(Debug, Clone)]
pub struct PolyModel {
    pub ring: CoefficientRing,
    pub z_truncation: usize,
    pub exterior: Vec<ExtGen>,
    basis: BTreeMap<i32, Vec<Monomial>>,
    position: BTreeMap<Monomial, (i32, usize)>,
}

impl PolyModel {
    fn build(ring: CoefficientRing, z_truncation: usize, exterior: Vec<ExtGen>) -> Result<Self> {
        ring.validate()?;
        let mut basis: BTreeMap<i32, Vec<Monomial>> = BTreeMap::new();
        let masks = subsets(&exterior);
        for k in 0..=z_truncation {
            for gens in &masks {
                let m = Monomial::from_parts(k, gens);
                basis.entry(m.degree()).or_default().push(m);
            }
        }
        for mons in basis.values_mut() {
            mons.sort();
        }
        let mut position = BTreeMap::new();
        for (deg, mons) in &basis {
            for (i, m) in mons.iter().enumerate() {
                position.insert(*m, (*deg, i));
            }
        }
        Ok(PolyModel {
            ring,
            z_truncation,
            exterior,
            basis,
            position,
        })
    }

    pub fn rank(&self, degree: i32) -> usize {
        self.basis.get(&degree).map_or(0, |v| v.len())
    }

    pub fn basis_at(&self, degree: i32) -> &[Monomial] {
        self.basis.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.basis.keys().copied().collect()
    }

    pub fn max_degree(&self) -> i32 {
        self.basis.keys().next_back().copied().unwrap_or(0)
    }

    pub fn index_of(&self, m: &Monomial) -> Option<(i32, usize)> {
        self.position.get(m).copied()
    }

    pub fn labels_at(&self, degree: i32) -> Vec<String> {
        self.basis_at(degree).iter().map(|m| m.label()).collect()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.position.contains_key(m)
    }

    /// Multiply basis monomials inside the model; exceeding the z-truncation
    /// is an error by design.
    pub fn multiply(&self, a: &Monomial, b: &Monomial) -> Result<Option<(i32, Monomial)>> {
        match monomial_product(a, b) {
            None => Ok(None),
            Some((sign, m)) => {
                if m.z_pow > self.z_truncation {
                    return Err(Error::TruncationOverflow {
                        exponent: m.z_pow,
                        bound: self.z_truncation,
                    });
                }
                Ok(Some((sign, m)))
            }
        }
    }

    /// JSON dump with labels, degrees, and ranks; deterministic ordering.
    pub fn to_json(&self) -> serde_json::Value {
        let degrees: Vec<serde_json::Value> = self
            .basis
            .iter()
            .map(|(deg, mons)| {
                serde_json::json!({
                    "degree": deg,
                    "labels": mons.iter().map(|m| m.label()).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "ring": self.ring.to_string(),
            "z_truncation": self.z_truncation,
            "exterior": self.exterior.iter().map(|g| g.symbol()).collect::<Vec<_>>(),
            "basis": degrees,
        })
    }
}

fn subsets(gens: &[ExtGen]) -> Vec<Vec<ExtGen>> {
    let mut out = vec![Vec::new()];
    for g in gens {
        let mut more = Vec::new();
        for s in &out {
            let mut t = s.clone();
            t.push(*g);
            more.push(t);
        }
        out.extend(more);
    }
    // normal order within each subset
    for s in &mut out {
        s.sort();
    }
    out.sort_by_key(|s| (s.len(), s.clone()));
    out
}

/// Linear combination of monomials with integer coefficients.
pub type Element = BTreeMap<Monomial, BigInt>;

pub fn element_from(m: Monomial) -> Element {
    let mut e = Element::new();
    e.insert(m, BigInt::from(1));
    e
}

pub fn element_add(a: &Element, b: &Element) -> Element {
    let mut out = a.clone();
    for (m, c) in b {
        let e = out.entry(*m).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            out.remove(m);
        }
    }
    out
}

/// Product of elements inside a model; truncation overflow is an error.
pub fn element_mul(model: &PolyModel, a: &Element, b: &Element) -> Result<Element> {
    let mut out = Element::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some((sign, m)) = model.multiply(ma, mb)? {
                let e = out.entry(m).or_insert_with(BigInt::zero);
                *e += BigInt::from(sign) * ca * cb;
                if e.is_zero() {
                    out.remove(&m);
                }
            }
        }
    }
    Ok(out)
}

/// A degree-homogeneous linear operator between models, stored as one integer
/// matrix per source degree.
#[derive(Debug, Clone)]
pub struct GradedOperator {
    pub name: String,
    pub degree: i32,
    pub source: PolyModel,
    pub target: PolyModel,
    blocks: BTreeMap<i32, IntMatrix>,
}

impl GradedOperator {
    /// Build from a monomial-level rule; the rule returns the image as a
    /// list of (coefficient, monomial) pairs in the target model.
    pub fn from_rule(
        name: &str,
        source: &PolyModel,
        target: &PolyModel,
        degree: i32,
        rule: impl Fn(&Monomial) -> Result<Vec<(BigInt, Monomial)>>,
    ) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for &k in source.degrees().iter() {
            let src = source.basis_at(k);
            let tgt_rank = target.rank(k + degree);
            let mut m = IntMatrix::zero(tgt_rank, src.len());
            for (j, mon) in src.iter().enumerate() {
                for (coef, image) in rule(mon)? {
                    if coef.is_zero() {
                        continue;
                    }
                    let (deg, idx) = target.index_of(&image).ok_or_else(|| {
                        Error::InvalidComplex(format!(
                            "operator {name}: image monomial {image} not in target"
                        ))
                    })?;
                    if deg != k + degree {
                        return Err(Error::InvalidComplex(format!(
                            "operator {name}: image {image} has degree {deg}, expected {}",
                            k + degree
                        )));
                    }
                    let cur = m.at(idx, j).clone();
                    m.set(idx, j, cur + coef);
                }
            }
            if !m.is_zero() || tgt_rank * src.len() > 0 {
                blocks.insert(k, m);
            }
        }
        Ok(GradedOperator {
            name: name.to_string(),
            degree,
            source: source.clone(),
            target: target.clone(),
            blocks,
        })
    }

    pub fn block(&self, source_degree: i32) -> IntMatrix {
        match self.blocks.get(&source_degree) {
            Some(m) => m.clone(),
            None => IntMatrix::zero(
                self.target.rank(source_degree + self.degree),
                self.source.rank(source_degree),
            ),
        }
    }

    /// Apply to an element of the source model.
    pub fn apply(&self, e: &Element) -> Result<Element> {
        let mut out = Element::new();
        for (m, c) in e {
            let (deg, idx) = self.source.index_of(m).ok_or_else(|| {
                Error::InvalidComplex(format!("element monomial {m} not in source model"))
            })?;
            let block = self.block(deg);
            let tgt = self.target.basis_at(deg + self.degree);
            for (i, image_mon) in tgt.iter().enumerate() {
                let coef = block.at(i, idx);
                if !coef.is_zero() {
                    let e2 = out.entry(*image_mon).or_insert_with(BigInt::zero);
                    *e2 += coef * c;
                    if e2.is_zero() {
                        out.remove(image_mon);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact blockwise equality against another operator of the same shape.
    pub fn same_matrices(&self, other: &GradedOperator) -> bool {
        if self.degree != other.degree {
            return false;
        }
        let mut keys: Vec<i32> = self.blocks.keys().copied().collect();
        keys.extend(other.blocks.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().all(|k| self.block(k) == other.block(k))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .blocks
            .iter()
            .map(|(k, m)| {
                serde_json::json!({
                    "source_degree": k,
                    "matrix": m.to_string_rows(),
                })
            })
            .collect();
        serde_json::json!({
            "name": self.name,
            "degree": self.degree,
            "blocks": blocks,
        })
    }
}

/// Composite g after f.
pub fn compose_operators(g: &GradedOperator, f: &GradedOperator) -> Result<GradedOperator> {
    let mut blocks = BTreeMap::new();
    for &k in f.source.degrees().iter() {
        let m = g.block(k + f.degree).mul(&f.block(k))?;
        blocks.insert(k, m);
    }
    Ok(GradedOperator {
        name: format!("{}.{}", g.name, f.name),
        degree: f.degree + g.degree,
        source: f.source.clone(),
        target: g.target.clone(),
        blocks,
    })
}

/// The model F[[z]]_{<=N} with zero differential; basis z^0..z^N in even
/// degrees.
pub fn build_z_model(ring: CoefficientRing, n: usize) -> Result<PolyModel> {
    PolyModel::build(ring, n, vec![])
}

/// Extend a z-model by the torus generators u, v of degree 1.
pub fn torus_extend(model: &PolyModel) -> Result<PolyModel> {
    PolyModel::build(
        model.ring.clone(),
        model.z_truncation,
        vec![ExtGen::U, ExtGen::V],
    )
}

/// The S^2-base model with w of degree 2, w^2 = 0.
pub fn build_s2_model(ring: CoefficientRing, n: usize) -> Result<PolyModel> {
    PolyModel::build(ring, n, vec![ExtGen::W])
}

/// The circle T-duality model with v, vhat of degree 1.
pub fn build_tduality_base(ring: CoefficientRing, n: usize) -> Result<PolyModel> {
    PolyModel::build(ring, n, vec![ExtGen::V, ExtGen::VHat])
}

/// d/dz: z^k eps -> k z^{k-1} eps, of degree -2; exterior factors ride along.
pub fn d_dz(model: &PolyModel) -> Result<GradedOperator> {
    GradedOperator::from_rule("d/dz", model, model, -2, |m| {
        if m.z_pow == 0 {
            return Ok(vec![]);
        }
        Ok(vec![(
            BigInt::from(m.z_pow),
            Monomial { z_pow: m.z_pow - 1, ..*m },
        )])
    })
}

/// The degree-0 ring endomorphism z -> z + mu, extended multiplicatively,
/// for a square-zero monomial mu of degree 2. Concretely
/// z^k eps -> z^k eps + k z^{k-1} (mu * eps).
pub fn ring_shift_endomorphism(
    name: &str,
    model: &PolyModel,
    mu: Monomial,
    sign: i32,
) -> Result<GradedOperator> {
    if mu.degree() != 2 {
        return Err(Error::InvalidComplex(format!(
            "shift element {mu} must have degree 2"
        )));
    }
    GradedOperator::from_rule(name, model, model, 0, move |m| {
        let mut out = vec![(BigInt::from(1), *m)];
        if m.z_pow > 0 {
            let lower = Monomial { z_pow: m.z_pow - 1, ..*m };
            // mu * eps with eps the exterior part; z-powers commute freely
            let eps = Monomial { z_pow: 0, ..lower };
            if let Some((s, prod)) = monomial_product(&mu, &eps) {
                let image = Monomial {
                    z_pow: lower.z_pow + prod.z_pow,
                    ..prod
                };
                out.push((BigInt::from(m.z_pow as i64 * s as i64 * sign as i64), image));
            }
        }
        Ok(out)
    })
}

/// phi^*: z -> z + u v on the torus-extended model; invertible with inverse
/// z -> z - u v.
pub fn phi_star(extended: &PolyModel) -> Result<GradedOperator> {
    ring_shift_endomorphism(
        "phi*",
        extended,
        Monomial::from_parts(0, &[ExtGen::U, ExtGen::V]),
        1,
    )
}

pub fn phi_star_inverse(extended: &PolyModel) -> Result<GradedOperator> {
    ring_shift_endomorphism(
        "phi*^{-1}",
        extended,
        Monomial::from_parts(0, &[ExtGen::U, ExtGen::V]),
        -1,
    )
}

/// Fiber integration over the two-torus: takes the coefficient at u v.
/// u v z^k -> z^k; monomials without the full u v factor die. Degree -2.
pub fn fiber_integrate_t2(extended: &PolyModel, target: &PolyModel) -> Result<GradedOperator> {
    GradedOperator::from_rule("int_T2", extended, target, -2, |m| {
        if m.has(ExtGen::U) && m.has(ExtGen::V) {
            let mut rest = *m;
            rest.ext &= !(ExtGen::U.bit() | ExtGen::V.bit());
            // u and v are the first two generators in normal order, so the
            // front contraction carries no sign
            Ok(vec![(BigInt::from(1), rest)])
        } else {
            Ok(vec![])
        }
    })
}

/// Inclusion of the z-model into an extension (monomial-wise identity).
pub fn inclusion(model: &PolyModel, extended: &PolyModel) -> Result<GradedOperator> {
    GradedOperator::from_rule("incl", model, extended, 0, |m| {
        Ok(vec![(BigInt::from(1), *m)])
    })
}

/// Projection of an extension onto the z-model span (kills exterior parts).
pub fn projection_to_z(extended: &PolyModel, model: &PolyModel) -> Result<GradedOperator> {
    GradedOperator::from_rule("proj", extended, model, 0, |m| {
        if m.ext == 0 {
            Ok(vec![(BigInt::from(1), *m)])
        } else {
            Ok(vec![])
        }
    })
}

/// The composite integration . phi^* . inclusion restricted to the z-model.
/// This is the explicit model of the degree -2 transformation and must equal
/// d/dz matrix-for-matrix.
pub fn compose_d(model: &PolyModel) -> Result<GradedOperator> {
    let extended = torus_extend(model)?;
    let inc = inclusion(model, &extended)?;
    let phi = phi_star(&extended)?;
    let int = fiber_integrate_t2(&extended, model)?;
    let mut op = compose_operators(&int, &compose_operators(&phi, &inc)?)?;
    op.name = "int.phi*.incl".to_string();
    Ok(op)
}

/// The S^2 automorphism action z -> z + w, w -> w on Z[w]/(w^2) (x) F[[z]].
pub fn s2_phi_action(model: &PolyModel) -> Result<GradedOperator> {
    if !model.exterior.contains(&ExtGen::W) {
        return Err(Error::InvalidComplex("S^2 action needs the w generator".into()));
    }
    ring_shift_endomorphism("phi*_S2", model, Monomial::from_parts(0, &[ExtGen::W]), 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> CoefficientRing {
        CoefficientRing::Rat
    }

    #[test]
    fn z_model_shapes() {
        let m = build_z_model(CoefficientRing::Int, 0).unwrap();
        assert_eq!(m.rank(0), 1);
        assert_eq!(m.max_degree(), 0);

        let m = build_z_model(q(), 3).unwrap();
        for k in 0..=3 {
            assert_eq!(m.rank(2 * k), 1, "degree {}", 2 * k);
        }
        assert_eq!(m.rank(1), 0);

        let m = build_z_model(CoefficientRing::Mod(6), 2).unwrap();
        let total: usize = m.degrees().iter().map(|d| m.rank(*d)).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn d_dz_power_rule() {
        let m = build_z_model(q(), 4).unwrap();
        let d = d_dz(&m).unwrap();
        let z = element_from(Monomial::z_power(1));
        let one = element_from(Monomial::one());
        assert_eq!(d.apply(&z).unwrap(), one);

        let z3 = element_from(Monomial::z_power(3));
        let image = d.apply(&z3).unwrap();
        let expect: Element = [(Monomial::z_power(2), BigInt::from(3))].into_iter().collect();
        assert_eq!(image, expect);

        assert!(d.apply(&one).unwrap().is_empty());
    }

    #[test]
    fn torus_phi_star_action() {
        let m = build_z_model(q(), 4).unwrap();
        let ext = torus_extend(&m).unwrap();
        let phi = phi_star(&ext).unwrap();

        // z -> z + uv
        let z = element_from(Monomial::z_power(1));
        let image = phi.apply(&z).unwrap();
        let uv = Monomial::from_parts(0, &[ExtGen::U, ExtGen::V]);
        let expect: Element = [
            (Monomial::z_power(1), BigInt::from(1)),
            (uv, BigInt::from(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(image, expect);

        // z^2 -> z^2 + 2 z uv, cross-checked by squaring phi(z) in the model
        let z2 = element_from(Monomial::z_power(2));
        let image2 = phi.apply(&z2).unwrap();
        let squared = element_mul(&ext, &image, &image).unwrap();
        assert_eq!(image2, squared);

        // u -> u
        let u = element_from(Monomial::from_parts(0, &[ExtGen::U]));
        assert_eq!(phi.apply(&u).unwrap(), u);
    }

    #[test]
    fn phi_star_is_ring_homomorphism() {
        let m = build_z_model(q(), 8).unwrap();
        let ext = torus_extend(&m).unwrap();
        let phi = phi_star(&ext).unwrap();
        let degrees = ext.degrees();
        for &da in &degrees {
            for &db in &degrees {
                for a in ext.basis_at(da) {
                    for b in ext.basis_at(db) {
                        if a.z_pow + b.z_pow > ext.z_truncation {
                            continue;
                        }
                        let ea = element_from(*a);
                        let eb = element_from(*b);
                        let prod = element_mul(&ext, &ea, &eb).unwrap();
                        let lhs = phi.apply(&prod).unwrap();
                        let rhs = element_mul(
                            &ext,
                            &phi.apply(&ea).unwrap(),
                            &phi.apply(&eb).unwrap(),
                        )
                        .unwrap();
                        assert_eq!(lhs, rhs, "phi*({a} * {b})");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_star_invertible() {
        let m = build_z_model(q(), 6).unwrap();
        let ext = torus_extend(&m).unwrap();
        let phi = phi_star(&ext).unwrap();
        let inv = phi_star_inverse(&ext).unwrap();
        let id = GradedOperator::from_rule("id", &ext, &ext, 0, |m| {
            Ok(vec![(BigInt::from(1), *m)])
        })
        .unwrap();
        assert!(compose_operators(&inv, &phi).unwrap().same_matrices(&id));
        assert!(compose_operators(&phi, &inv).unwrap().same_matrices(&id));
    }

    #[test]
    fn fiber_integration_takes_uv_coefficient() {
        let m = build_z_model(q(), 3).unwrap();
        let ext = torus_extend(&m).unwrap();
        let int = fiber_integrate_t2(&ext, &m).unwrap();

        let uv = element_from(Monomial::from_parts(0, &[ExtGen::U, ExtGen::V]));
        assert_eq!(int.apply(&uv).unwrap(), element_from(Monomial::one()));

        let zk = element_from(Monomial::z_power(2));
        assert!(int.apply(&zk).unwrap().is_empty());

        let uz = element_from(Monomial::from_parts(1, &[ExtGen::U]));
        assert!(int.apply(&uz).unwrap().is_empty());
    }

    #[test]
    fn composite_equals_derivative() {
        for ring in [
            CoefficientRing::Int,
            q(),
            CoefficientRing::Mod(2),
            CoefficientRing::Mod(12),
            CoefficientRing::RatModInt,
        ] {
            for n in [0usize, 1, 3, 8] {
                let m = build_z_model(ring.clone(), n).unwrap();
                let composite = compose_d(&m).unwrap();
                let derivative = d_dz(&m).unwrap();
                assert!(
                    composite.same_matrices(&derivative),
                    "ring {ring}, truncation {n}"
                );
            }
        }
    }

    #[test]
    fn s2_action() {
        let m = build_s2_model(q(), 4).unwrap();
        let phi = s2_phi_action(&m).unwrap();
        // z -> z + w
        let z = element_from(Monomial::z_power(1));
        let expect: Element = [
            (Monomial::z_power(1), BigInt::from(1)),
            (Monomial::from_parts(0, &[ExtGen::W]), BigInt::from(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(phi.apply(&z).unwrap(), expect);

        // w z -> w z: the w^2 term dies
        let wz = element_from(Monomial::from_parts(1, &[ExtGen::W]));
        assert_eq!(phi.apply(&wz).unwrap(), wz);
    }

    #[test]
    fn truncation_overflow_is_loud() {
        let m = build_z_model(q(), 2).unwrap();
        let a = element_from(Monomial::z_power(2));
        let err = element_mul(&m, &a, &a);
        assert!(matches!(err, Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn koszul_signs() {
        // v * u = -u v
        let v = Monomial::from_parts(0, &[ExtGen::V]);
        let u = Monomial::from_parts(0, &[ExtGen::U]);
        let (sign, m) = monomial_product(&v, &u).unwrap();
        assert_eq!(sign, -1);
        assert_eq!(m, Monomial::from_parts(0, &[ExtGen::U, ExtGen::V]));
        // u * v = +uv
        let (sign, _) = monomial_product(&u, &v).unwrap();
        assert_eq!(sign, 1);
        // u * u = 0
        assert!(monomial_product(&u, &u).is_none());
        // w commutes with v
        let w = Monomial::from_parts(0, &[ExtGen::W]);
        let (s1, _) = monomial_product(&w, &v).unwrap();
        let (s2, _) = monomial_product(&v, &w).unwrap();
        assert_eq!(s1, 1);
        assert_eq!(s2, 1);
    }

    #[test]
    fn labels_are_deterministic() {
        let m = build_tduality_base(q(), 2).unwrap();
        assert_eq!(m.labels_at(0), vec!["1"]);
        assert_eq!(m.labels_at(1), vec!["v", "v^"]);
        assert_eq!(m.labels_at(2), vec!["v*v^", "z"]);
        // 12 monomials total for N = 2: 3 z-powers x 4 exterior
        let total: usize = m.degrees().iter().map(|d| m.rank(*d)).sum();
        assert_eq!(total, 12);
    }
}
