//! Module maps F^a -> F^b presented by integer matrices, for F one of
//! Z, Q, Z/n, Q/Z, together with their kernels, cokernels and isomorphism
//! classes.
//!
//! Z/n is never given its own normal-form algorithm: everything is routed
//! through integer Smith normal form of an augmented relation matrix, so one
//! audited kernel serves all four rings. Q/Z is handled symbolically through
//! the Smith form; no element of Q/Z is ever enumerated outside of tests.

use crate::error::{Error, Result};
use crate::matrix::{self, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The four coefficient rings of the calculations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientRing {
    /// The integers Z.
    Int,
    /// The rationals Q.
    Rat,
    /// Z/n for n >= 2.
    Mod(u64),
    /// The divisible torsion group Q/Z.
    RatModInt,
}

impl CoefficientRing {
    pub fn modulus(&self) -> Option<BigInt> {
        match self {
            CoefficientRing::Mod(n) => Some(BigInt::from(*n)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let CoefficientRing::Mod(n) = self {
            if *n < 2 {
                return Err(Error::InvalidRing(format!("Z/{n} needs n >= 2")));
            }
        }
        Ok(())
    }

    fn expect_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::RingMismatch(self.to_string(), other.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Int => write!(f, "Z"),
            CoefficientRing::Rat => write!(f, "Q"),
            CoefficientRing::Mod(n) => write!(f, "Z/{n}"),
            CoefficientRing::RatModInt => write!(f, "Q/Z"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(CoefficientRing::Int),
            "Q" => Ok(CoefficientRing::Rat),
            "Q/Z" => Ok(CoefficientRing::RatModInt),
            other => {
                if let Some(n) = other.strip_prefix("Z/") {
                    let n: u64 = n
                        .parse()
                        .map_err(|_| Error::InvalidRing(other.to_string()))?;
                    let ring = CoefficientRing::Mod(n);
                    ring.validate()?;
                    Ok(ring)
                } else {
                    Err(Error::InvalidRing(other.to_string()))
                }
            }
        }
    }
}

/// A map F^source_rank -> F^target_rank given by entrywise integer action.
#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub ring: CoefficientRing,
    pub source_rank: usize,
    pub target_rank: usize,
    pub matrix: IntMatrix,
}

impl ModuleMap {
    pub fn new(ring: CoefficientRing, matrix: IntMatrix) -> Result<Self> {
        ring.validate()?;
        Ok(ModuleMap {
            source_rank: matrix.cols(),
            target_rank: matrix.rows(),
            ring,
            matrix,
        })
    }

    pub fn identity(ring: CoefficientRing, rank: usize) -> Self {
        ModuleMap {
            ring,
            source_rank: rank,
            target_rank: rank,
            matrix: IntMatrix::identity(rank),
        }
    }

    pub fn zero(ring: CoefficientRing, source_rank: usize, target_rank: usize) -> Self {
        ModuleMap {
            ring,
            source_rank,
            target_rank,
            matrix: IntMatrix::zero(target_rank, source_rank),
        }
    }
}

/// Isomorphism class of a subquotient of F^k: divisible copies (Q or Q/Z),
/// free rank (Z), and cyclic invariants with a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleClass {
    pub ring: CoefficientRing,
    pub divisible_copies: usize,
    pub free_rank: usize,
    pub cyclic_invariants: Vec<BigInt>,
}

impl ModuleClass {
    /// Canonicalizes the cyclic part into an invariant-factor chain, merging
    /// coprime cyclic factors, and validates the shape against the ring.
    pub fn new(
        ring: CoefficientRing,
        divisible_copies: usize,
        free_rank: usize,
        cyclics: Vec<BigInt>,
    ) -> Result<Self> {
        ring.validate()?;
        match &ring {
            CoefficientRing::Int => {
                if divisible_copies != 0 {
                    return Err(Error::InvalidRing(
                        "Z-module class cannot have divisible copies".into(),
                    ));
                }
            }
            CoefficientRing::Rat => {
                if free_rank != 0 || !cyclics.is_empty() {
                    return Err(Error::InvalidRing(
                        "Q-module class has divisible copies only".into(),
                    ));
                }
            }
            CoefficientRing::Mod(n) => {
                if divisible_copies != 0 || free_rank != 0 {
                    return Err(Error::InvalidRing(format!(
                        "Z/{n}-module class has cyclic invariants only"
                    )));
                }
            }
            CoefficientRing::RatModInt => {
                if free_rank != 0 {
                    return Err(Error::InvalidRing(
                        "Q/Z-module class cannot have free rank".into(),
                    ));
                }
            }
        }
        let cyclic_invariants = canonical_invariant_chain(&cyclics)?;
        if let CoefficientRing::Mod(n) = &ring {
            let n = BigInt::from(*n);
            for d in &cyclic_invariants {
                if !(&n % d).is_zero() {
                    return Err(Error::InvalidRing(format!(
                        "cyclic invariant {d} does not divide the modulus {n}"
                    )));
                }
            }
        }
        Ok(ModuleClass {
            ring,
            divisible_copies,
            free_rank,
            cyclic_invariants,
        })
    }

    pub fn zero(ring: CoefficientRing) -> Self {
        ModuleClass {
            ring,
            divisible_copies: 0,
            free_rank: 0,
            cyclic_invariants: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.divisible_copies == 0 && self.free_rank == 0 && self.cyclic_invariants.is_empty()
    }

    /// Cardinality when finite (no free or divisible part).
    pub fn cardinality(&self) -> Option<BigInt> {
        if self.divisible_copies != 0 || self.free_rank != 0 {
            return None;
        }
        Some(
            self.cyclic_invariants
                .iter()
                .fold(BigInt::one(), |acc, d| acc * d),
        )
    }

    pub fn torsion_cardinality(&self) -> BigInt {
        self.cyclic_invariants
            .iter()
            .fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.ring.expect_same(&other.ring)?;
        let mut cyclics = self.cyclic_invariants.clone();
        cyclics.extend(other.cyclic_invariants.iter().cloned());
        ModuleClass::new(
            self.ring.clone(),
            self.divisible_copies + other.divisible_copies,
            self.free_rank + other.free_rank,
            cyclics,
        )
    }

    /// Canonical serialization, e.g. "Z^2 + Z/2 + Z/4", "Q^1",
    /// "(Q/Z)^1 + Z/3", "0". Bit-exact across runs.
    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        if self.divisible_copies > 0 {
            let base = match self.ring {
                CoefficientRing::Rat => "Q",
                CoefficientRing::RatModInt => "(Q/Z)",
                _ => unreachable!("divisible copies only over Q and Q/Z"),
            };
            parts.push(format!("{}^{}", base, self.divisible_copies));
        }
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.cyclic_invariants {
            parts.push(format!("Z/{d}"));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for ModuleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

/// Rebuild an invariant-factor chain d_1 | d_2 | ... from an arbitrary list of
/// cyclic orders, via prime factorization. Factors of 1 are dropped.
fn canonical_invariant_chain(cyclics: &[BigInt]) -> Result<Vec<BigInt>> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
    for d in cyclics {
        if d.is_one() {
            continue;
        }
        if d < &BigInt::from(2) {
            return Err(Error::InvalidRing(format!("cyclic invariant {d} < 2")));
        }
        for (p, e) in trial_factor(d) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let mut slots = 0;
    for exps in by_prime.values_mut() {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        slots = slots.max(exps.len());
    }
    // slot 0 collects the largest prime powers => the last invariant factor
    let mut chain = vec![BigInt::one(); slots];
    for (p, exps) in &by_prime {
        for (slot, e) in exps.iter().enumerate() {
            chain[slot] *= p.pow(*e);
        }
    }
    chain.reverse();
    Ok(chain)
}

fn trial_factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut e = 0;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// Kernel generators in source coordinates. Columns of `matrix` divided by
/// the matching `denominators` entry; denominators are 1 except for the
/// torsion generators of a Q/Z kernel. Divisible summands of a Q/Z kernel
/// carry no generator columns.
#[derive(Debug, Clone)]
pub struct KernelGenerators {
    pub matrix: IntMatrix,
    pub denominators: Vec<BigInt>,
}

/// Kernel of a module map as (isomorphism class, generators).
pub fn kernel(m: &ModuleMap) -> Result<(ModuleClass, KernelGenerators)> {
    let a = &m.matrix;
    match &m.ring {
        CoefficientRing::Int | CoefficientRing::Rat => {
            let basis = matrix::kernel_basis(a);
            let dim = basis.cols();
            let class = match m.ring {
                CoefficientRing::Int => ModuleClass::new(m.ring.clone(), 0, dim, vec![])?,
                _ => ModuleClass::new(m.ring.clone(), dim, 0, vec![])?,
            };
            let denominators = vec![BigInt::one(); dim];
            Ok((
                class,
                KernelGenerators {
                    matrix: basis,
                    denominators,
                },
            ))
        }
        CoefficientRing::Mod(n) => {
            let n = BigInt::from(*n);
            // L = { x : A x = 0 mod n }, a full-rank sublattice of Z^a
            // containing n Z^a; the kernel over Z/n is L / n Z^a.
            let aug = a.hconcat(&IntMatrix::identity(a.rows()).scale(&n))?;
            let full = matrix::kernel_basis(&aug);
            let b = IntMatrix::from_fn(a.cols(), full.cols(), |r, c| full.at(r, c).clone());
            debug_assert_eq!(b.cols(), a.cols(), "relation lattice must be full rank");
            let (class, gens) = lattice_quotient_class(&m.ring, &b, &n)?;
            Ok((class, gens))
        }
        CoefficientRing::RatModInt => {
            // After the unimodular change of basis V the map is diagonal
            // d_1, ..., d_r, 0, ...; the kernel of x -> d x on Q/Z is Z/d,
            // and unconstrained coordinates contribute full Q/Z copies.
            let snf = smith_normal_form(a);
            let r = snf.rank();
            let divisible = a.cols() - r;
            let mut cyclics = Vec::new();
            let mut gen_cols = Vec::new();
            let mut dens = Vec::new();
            for i in 0..r {
                let d = snf.invariant_factors[i].clone();
                if d.is_one() {
                    continue;
                }
                cyclics.push(d.clone());
                gen_cols.push(snf.v.column(i));
                dens.push(d);
            }
            let gens = IntMatrix::from_fn(a.cols(), gen_cols.len(), |r_, c| {
                gen_cols[c][r_].clone()
            });
            let class = ModuleClass::new(m.ring.clone(), divisible, 0, cyclics)?;
            Ok((
                class,
                KernelGenerators {
                    matrix: gens,
                    denominators: dens,
                },
            ))
        }
    }
}

/// Isomorphism class of the cokernel F^b / im(M).
pub fn cokernel(m: &ModuleMap) -> Result<ModuleClass> {
    let a = &m.matrix;
    match &m.ring {
        CoefficientRing::Int => {
            let snf = smith_normal_form(a);
            let r = snf.rank();
            let cyclics: Vec<BigInt> = snf.invariant_factors[..r]
                .iter()
                .filter(|d| !d.is_one())
                .cloned()
                .collect();
            ModuleClass::new(m.ring.clone(), 0, a.rows() - r, cyclics)
        }
        CoefficientRing::Rat => {
            let r = matrix::rational_rank(a);
            ModuleClass::new(m.ring.clone(), a.rows() - r, 0, vec![])
        }
        CoefficientRing::Mod(n) => {
            // coker over Z/n = Z^b / (im A + n Z^b), via the augmented form.
            let n = BigInt::from(*n);
            let aug = a.hconcat(&IntMatrix::identity(a.rows()).scale(&n))?;
            let snf = smith_normal_form(&aug);
            let r = snf.rank();
            debug_assert_eq!(r, a.rows(), "augmented matrix has full row rank");
            let cyclics: Vec<BigInt> = snf.invariant_factors[..r]
                .iter()
                .filter(|d| !d.is_one())
                .cloned()
                .collect();
            ModuleClass::new(m.ring.clone(), 0, 0, cyclics)
        }
        CoefficientRing::RatModInt => {
            // Divisible quotients by d != 0 vanish; only rank-deficient
            // target coordinates survive.
            let r = matrix::rational_rank(a);
            ModuleClass::new(m.ring.clone(), a.rows() - r, 0, vec![])
        }
    }
}

/// Class of the image of a module map inside F^target_rank.
pub fn image_class(m: &ModuleMap) -> Result<ModuleClass> {
    let a = &m.matrix;
    match &m.ring {
        CoefficientRing::Int => {
            ModuleClass::new(m.ring.clone(), 0, matrix::rational_rank(a), vec![])
        }
        CoefficientRing::Rat => {
            ModuleClass::new(m.ring.clone(), matrix::rational_rank(a), 0, vec![])
        }
        CoefficientRing::Mod(n) => {
            let n = BigInt::from(*n);
            // image = (A Z^a + n Z^b) / n Z^b
            let aug = a.hconcat(&IntMatrix::identity(a.rows()).scale(&n))?;
            let snf = smith_normal_form(&aug);
            let r = snf.rank();
            debug_assert_eq!(r, a.rows());
            // Basis of A Z^a + n Z^b: U^{-1} D restricted to nonzero columns.
            let uinv = snf.u.inverse_unimodular()?;
            let b = IntMatrix::from_fn(a.rows(), r, |row, col| {
                (uinv.at(row, col) * snf.d.at(col, col)).clone()
            });
            let (class, _) = lattice_quotient_class(&m.ring, &b, &n)?;
            Ok(class)
        }
        CoefficientRing::RatModInt => {
            ModuleClass::new(m.ring.clone(), matrix::rational_rank(a), 0, vec![])
        }
    }
}

/// Class of L / n Z^b for a full-rank lattice L (columns of `b`) containing
/// n Z^b, together with generators of the cyclic summands in the ambient
/// coordinates.
fn lattice_quotient_class(
    ring: &CoefficientRing,
    b: &IntMatrix,
    n: &BigInt,
) -> Result<(ModuleClass, KernelGenerators)> {
    let dim = b.rows();
    // Express n Z^dim in the basis B: solve B C = n I columnwise.
    let mut c = IntMatrix::zero(b.cols(), dim);
    for j in 0..dim {
        let mut rhs = vec![BigInt::zero(); dim];
        rhs[j] = n.clone();
        let x = matrix::solve_integer(b, &rhs)?
            .expect("n Z^b is contained in the relation lattice");
        for i in 0..b.cols() {
            c.set(i, j, x[i].clone());
        }
    }
    let snf = smith_normal_form(&c);
    // Quotient Z^k / C Z^k with invariant factors e_i; generators are the
    // columns of B * U^{-1}.
    let uinv = snf.u.inverse_unimodular()?;
    let ambient = b.mul(&uinv)?;
    let mut cyclics = Vec::new();
    let mut gen_cols = Vec::new();
    for (i, e) in snf.invariant_factors.iter().enumerate() {
        if e.is_one() {
            continue;
        }
        debug_assert!(!e.is_zero(), "quotient by full-rank sublattice is finite");
        cyclics.push(e.clone());
        gen_cols.push(ambient.column(i));
    }
    let gens = IntMatrix::from_fn(dim, gen_cols.len(), |r, c_| gen_cols[c_][r].clone());
    let dens = vec![BigInt::one(); gens.cols()];
    let class = ModuleClass::new(ring.clone(), 0, 0, cyclics)?;
    Ok((
        class,
        KernelGenerators {
            matrix: gens,
            denominators: dens,
        },
    ))
}

/// Composite M2 after M1.
pub fn compose(m2: &ModuleMap, m1: &ModuleMap) -> Result<ModuleMap> {
    m2.ring.expect_same(&m1.ring)?;
    if m1.target_rank != m2.source_rank {
        return Err(Error::DimensionMismatch {
            context: "module map compose",
            expected: m2.source_rank,
            found: m1.target_rank,
        });
    }
    ModuleMap::new(m2.ring.clone(), m2.matrix.mul(&m1.matrix)?)
}

/// Equality of isomorphism classes after canonicalization.
pub fn module_class_equal(a: &ModuleClass, b: &ModuleClass) -> Result<bool> {
    a.ring.expect_same(&b.ring)?;
    Ok(a == b)
}
