//! Inverse systems of module maps with truncated lim/lim^1, Mittag-Leffler
//! classification, and a registry of symbolically known limit families.
//!
//! Depth-N truncation keeps levels G_0..G_N and the N equations that involve
//! no level beyond N: the equalizer map Phi sends (x_0, ..., x_N) to
//! (x_i - t_i(x_{i+1}))_{i<N}. Its kernel and cokernel are the depth-N lim
//! and lim^1. Symbolic answers come only from the registry of recognized
//! families; everything else is reported as finite-depth data.

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};
use crate::modules::{self, CoefficientRing, KernelGenerators, ModuleClass, ModuleMap};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;

/// An inverse system G_0 <- G_1 <- ... <- G_N of free F-modules with integer
/// transition matrices t_i : G_{i+1} -> G_i.
#[derive(Debug, Clone)]
pub struct Tower {
    pub ring: CoefficientRing,
    pub levels: Vec<usize>,
    pub transitions: Vec<IntMatrix>,
}

impl Tower {
    pub fn new(
        ring: CoefficientRing,
        levels: Vec<usize>,
        transitions: Vec<IntMatrix>,
    ) -> Result<Self> {
        ring.validate()?;
        if transitions.len() + 1 != levels.len() {
            return Err(Error::DimensionMismatch {
                context: "tower transitions",
                expected: levels.len().saturating_sub(1),
                found: transitions.len(),
            });
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.rows() != levels[i] || t.cols() != levels[i + 1] {
                return Err(Error::DimensionMismatch {
                    context: "tower transition shape",
                    expected: levels[i],
                    found: t.rows(),
                });
            }
        }
        Ok(Tower {
            ring,
            levels,
            transitions,
        })
    }

    /// Rank-1 tower with scalar transitions x c_i.
    pub fn scalar(ring: CoefficientRing, scalars: &[i64]) -> Self {
        let levels = vec![1usize; scalars.len() + 1];
        let transitions = scalars
            .iter()
            .map(|c| IntMatrix::from_rows_i64(&[vec![*c]]))
            .collect();
        Tower {
            ring,
            levels,
            transitions,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Composite transition G_hi -> G_lo.
    pub fn composite(&self, lo: usize, hi: usize) -> IntMatrix {
        assert!(lo <= hi && hi <= self.depth());
        let mut m = IntMatrix::identity(self.levels[lo]);
        for i in lo..hi {
            m = m.mul(&self.transitions[i]).expect("tower shapes are validated");
        }
        m
    }

    /// The equalizer map Phi : G_0 + ... + G_N -> G_0 + ... + G_{N-1},
    /// (x_i) -> (x_i - t_i(x_{i+1}))_{i<N}.
    pub fn equalizer_map(&self) -> ModuleMap {
        let n = self.depth();
        let src_sizes = self.levels.clone();
        let tgt_sizes: Vec<usize> = self.levels[..n].to_vec();
        let identities: Vec<IntMatrix> =
            tgt_sizes.iter().map(|r| IntMatrix::identity(*r)).collect();
        let negs: Vec<IntMatrix> = self.transitions.iter().map(|t| t.neg()).collect();
        let blocks: Vec<Vec<Option<&IntMatrix>>> = (0..n)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        if j == i {
                            Some(&identities[i])
                        } else if j == i + 1 {
                            Some(&negs[i])
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        let matrix = IntMatrix::from_blocks(&tgt_sizes, &src_sizes, &blocks);
        ModuleMap::new(self.ring.clone(), matrix).expect("validated shapes")
    }
}

/// Limit/obstruction classification for the tower.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Images of composite transitions stabilize from the given index on.
    MittagLeffler { stabilization_index: usize },
    /// The tower matches a registered symbolic family.
    Registered,
    /// No finite certificate; only finite-depth data is reported.
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::MittagLeffler {
                stabilization_index,
            } => write!(f, "MITTAG_LEFFLER({stabilization_index})"),
            Classification::Registered => write!(f, "REGISTERED"),
            Classification::Unclassified => write!(f, "UNCLASSIFIED"),
        }
    }
}

/// Symbolic value of a limit or lim^1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LimitSymbol {
    Zero,
    QGroup,
    FiniteAdeles,
    FiniteAdelesModQ,
    Constant(ModuleClass),
}

impl fmt::Display for LimitSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitSymbol::Zero => write!(f, "ZERO"),
            LimitSymbol::QGroup => write!(f, "Q_GROUP"),
            LimitSymbol::FiniteAdeles => write!(f, "FINITE_ADELES"),
            LimitSymbol::FiniteAdelesModQ => write!(f, "FINITE_ADELES_MOD_Q"),
            LimitSymbol::Constant(c) => write!(f, "CONSTANT({})", c.canonical_string()),
        }
    }
}

impl LimitSymbol {
    /// Label used in the two-column tables: zero and constant values print
    /// as module classes, the symbolic limits by their fixed names.
    pub fn table_label(&self) -> String {
        match self {
            LimitSymbol::Zero => "0".to_string(),
            LimitSymbol::QGroup => "Q".to_string(),
            LimitSymbol::FiniteAdeles => "FINITE_ADELES".to_string(),
            LimitSymbol::FiniteAdelesModQ => "FINITE_ADELES_MOD_Q".to_string(),
            LimitSymbol::Constant(c) => c.canonical_string(),
        }
    }
}

/// Finite-depth data plus classification for one tower.
#[derive(Debug, Clone)]
pub struct TowerLimitReport {
    pub depth: usize,
    pub finite_lim: ModuleClass,
    pub finite_lim1: ModuleClass,
    pub classification: Classification,
    pub lim_symbol: Option<LimitSymbol>,
    pub lim1_symbol: Option<LimitSymbol>,
}

impl TowerLimitReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "depth": self.depth,
            "lim": self.finite_lim.canonical_string(),
            "lim1": self.finite_lim1.canonical_string(),
            "classification": self.classification.to_string(),
            "symbol": {
                "lim": self.lim_symbol.as_ref().map(|s| s.to_string()),
                "lim1": self.lim1_symbol.as_ref().map(|s| s.to_string()),
            },
        })
    }
}

/// Depth-N lim and lim^1 as kernel and cokernel of the equalizer map.
pub fn truncated_lim_lim1(tower: &Tower) -> Result<(ModuleClass, ModuleClass)> {
    if tower.depth() < 1 {
        return Err(Error::DepthTooSmall {
            depth: tower.depth(),
            need: 1,
        });
    }
    let phi = tower.equalizer_map();
    let (lim, _) = modules::kernel(&phi)?;
    let lim1 = modules::cokernel(&phi)?;
    Ok((lim, lim1))
}

/// Kernel generators of the equalizer map, for finite-stage witnesses.
pub fn truncated_lim_generators(tower: &Tower) -> Result<KernelGenerators> {
    let phi = tower.equalizer_map();
    Ok(modules::kernel(&phi)?.1)
}

/// Image of the composite G_{i+k} -> G_i as a module map into G_i.
fn composite_image(tower: &Tower, i: usize, k: usize) -> ModuleMap {
    let m = tower.composite(i, i + k);
    ModuleMap::new(tower.ring.clone(), m).expect("validated shapes")
}

/// Equality of image subgroups im(A) = im(B) inside F^r.
fn images_equal(ring: &CoefficientRing, a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    match ring {
        CoefficientRing::Int => Ok(lattice_contains(a, b)? && lattice_contains(b, a)?),
        CoefficientRing::Rat | CoefficientRing::RatModInt => {
            // Q-spans coincide; for Q/Z the image is determined by the span.
            let ra = matrix::rational_rank(a);
            let rb = matrix::rational_rank(b);
            if ra != rb {
                return Ok(false);
            }
            Ok(matrix::rational_rank(&a.hconcat(b)?) == ra)
        }
        CoefficientRing::Mod(n) => {
            let n = BigInt::from(*n);
            Ok(mod_contains(a, b, &n)? && mod_contains(b, a, &n)?)
        }
    }
}

/// Every column of b lies in the integer column span of a.
fn lattice_contains(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    for j in 0..b.cols() {
        if matrix::solve_integer(a, &b.column(j))?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn mod_contains(a: &IntMatrix, b: &IntMatrix, n: &BigInt) -> Result<bool> {
    for j in 0..b.cols() {
        if matrix::solve_mod(a, &b.column(j), n)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mittag-Leffler probe: for each level i <= probe_depth, the images
/// im(G_{i+k} -> G_i) must become constant inside the window, with at least
/// one repeated observation at the stable value.
pub fn mittag_leffler_classify(tower: &Tower, probe_depth: usize) -> Result<Classification> {
    if probe_depth > tower.depth() {
        return Err(Error::DepthTooSmall {
            depth: tower.depth(),
            need: probe_depth,
        });
    }
    let mut stabilization = 0usize;
    for i in 0..=probe_depth {
        let max_k = tower.depth() - i;
        if max_k < 2 {
            // cannot observe a repetition
            return Ok(Classification::Unclassified);
        }
        let mut stable_from = None;
        let mut prev = composite_image(tower, i, 1).matrix;
        for k in 2..=max_k {
            let cur = composite_image(tower, i, k).matrix;
            if images_equal(&tower.ring, &prev, &cur)? {
                if stable_from.is_none() {
                    stable_from = Some(k - 1);
                }
            } else {
                stable_from = None;
            }
            prev = cur;
        }
        match stable_from {
            Some(s) => stabilization = stabilization.max(s),
            None => return Ok(Classification::Unclassified),
        }
    }
    Ok(Classification::MittagLeffler {
        stabilization_index: stabilization,
    })
}

/// Scalar transition sequence of a rank-1 tower, skipping leading zero-rank
/// levels; None when any surviving level has rank != 1.
fn scalar_sequence(tower: &Tower) -> Option<Vec<BigInt>> {
    let first = tower.levels.iter().position(|r| *r > 0)?;
    if tower.levels[..first].iter().any(|r| *r != 0) {
        return None;
    }
    if tower.levels[first..].iter().any(|r| *r != 1) {
        return None;
    }
    Some(
        tower.transitions[first..]
            .iter()
            .map(|t| t.at(0, 0).clone())
            .collect(),
    )
}

/// Consecutive ascending positive integers c, c+1, c+2, ...?
fn is_consecutive_ascending(scalars: &[BigInt]) -> bool {
    if scalars.is_empty() {
        return false;
    }
    if !scalars[0].is_positive() {
        return false;
    }
    scalars
        .windows(2)
        .all(|w| w[1] == &w[0] + BigInt::one())
}

/// Running products divisible by arbitrarily large factorials, probed up to
/// the horizon: every prime power q <= horizon must divide some running
/// product within the window.
fn has_factorial_divisibility(scalars: &[BigInt], horizon: u64) -> bool {
    if scalars.iter().any(|c| !c.is_positive()) {
        return false;
    }
    let mut products = Vec::with_capacity(scalars.len());
    let mut p = BigInt::one();
    for c in scalars {
        p *= c;
        products.push(p.clone());
    }
    let mut q = 2u64;
    while q <= horizon {
        if is_prime_power(q) {
            let qq = BigInt::from(q);
            if !products.iter().any(|p| (p % &qq).is_zero()) {
                return false;
            }
        }
        q += 1;
    }
    true
}

fn is_prime_power(n: u64) -> bool {
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += 1;
    }
    n > 1
}

/// Default horizon for the factorial-divisibility pattern test.
pub const FACTORIAL_HORIZON: u64 = 20;

/// Symbolic classification of the known limit families, falling back to
/// Mittag-Leffler data and plain finite-depth reporting.
///
/// The registered families are the rank-1 towers whose transitions are the
/// consecutive integers c, c+1, c+2, ... (any start c >= 1; a cofinal
/// reindexing of the factorial system), or whose explicit transitions pass
/// the factorial-divisibility probe:
///   over Q:    lim = Q,        lim^1 = 0   (surjective transitions)
///   over Q/Z:  lim = A_f(Q),   lim^1 = 0   (the finite-adele limit)
///   over Z:    lim = 0,        lim^1 = A_f(Q)/Q
///   over Z/n:  lim = 0,        lim^1 = 0   (every window of n consecutive
///              coefficients contains one divisible by n, so backwards
///              induction solves the system uniquely segment by segment)
pub fn symbolic_limit(tower: &Tower) -> Result<TowerLimitReport> {
    let depth = tower.depth();
    let (finite_lim, finite_lim1) = truncated_lim_lim1(tower)?;

    if let Some(scalars) = scalar_sequence(tower) {
        let registered = is_consecutive_ascending(&scalars)
            || (scalars.len() as u64 >= FACTORIAL_HORIZON
                && has_factorial_divisibility(&scalars, FACTORIAL_HORIZON));
        if registered {
            let (lim, lim1) = match &tower.ring {
                CoefficientRing::Rat => (LimitSymbol::QGroup, LimitSymbol::Zero),
                CoefficientRing::RatModInt => (LimitSymbol::FiniteAdeles, LimitSymbol::Zero),
                CoefficientRing::Int => (LimitSymbol::Zero, LimitSymbol::FiniteAdelesModQ),
                CoefficientRing::Mod(_) => (LimitSymbol::Zero, LimitSymbol::Zero),
            };
            return Ok(TowerLimitReport {
                depth,
                finite_lim,
                finite_lim1,
                classification: Classification::Registered,
                lim_symbol: Some(lim),
                lim1_symbol: Some(lim1),
            });
        }
    }

    // identity towers are constant
    if tower
        .transitions
        .iter()
        .all(|t| t.rows() == t.cols() && *t == IntMatrix::identity(t.rows()))
    {
        let g = constant_level_class(&tower.ring, tower.levels[0])?;
        return Ok(TowerLimitReport {
            depth,
            finite_lim,
            finite_lim1,
            classification: Classification::MittagLeffler {
                stabilization_index: 0,
            },
            lim_symbol: Some(LimitSymbol::Constant(g)),
            lim1_symbol: Some(LimitSymbol::Zero),
        });
    }

    // Search for the largest probe depth the window can certify.
    let mut found: Option<(usize, usize)> = None;
    for probe in (0..=depth.saturating_sub(2)).rev() {
        if let Classification::MittagLeffler {
            stabilization_index,
        } = mittag_leffler_classify(tower, probe)?
        {
            found = Some((probe, stabilization_index));
            break;
        }
    }
    match found {
        Some((probe, stabilization_index)) => {
            let lim_symbol = stable_subtower_limit(tower, probe)?;
            Ok(TowerLimitReport {
                depth,
                finite_lim,
                finite_lim1,
                classification: Classification::MittagLeffler {
                    stabilization_index,
                },
                lim_symbol,
                lim1_symbol: Some(LimitSymbol::Zero),
            })
        }
        None => Ok(TowerLimitReport {
            depth,
            finite_lim,
            finite_lim1,
            classification: Classification::Unclassified,
            lim_symbol: None,
            lim1_symbol: None,
        }),
    }
}

fn constant_level_class(ring: &CoefficientRing, rank: usize) -> Result<ModuleClass> {
    match ring {
        CoefficientRing::Int => ModuleClass::new(ring.clone(), 0, rank, vec![]),
        CoefficientRing::Rat | CoefficientRing::RatModInt => {
            ModuleClass::new(ring.clone(), rank, 0, vec![])
        }
        CoefficientRing::Mod(n) => ModuleClass::new(
            ring.clone(),
            0,
            0,
            vec![BigInt::from(*n); rank],
        ),
    }
}

/// For a Mittag-Leffler tower whose stable images form an eventually
/// iso-constant subtower, the limit equals the stable class. Only attempted
/// for rings with finitely generated level values; divisible towers are
/// left to the registry.
fn stable_subtower_limit(tower: &Tower, probe: usize) -> Result<Option<LimitSymbol>> {
    if matches!(tower.ring, CoefficientRing::RatModInt) {
        return Ok(None);
    }
    // The stable image at level i is the deepest available composite image;
    // the ML certificate guarantees it has stopped moving for i <= probe.
    let depth = tower.depth();
    if depth < 2 {
        return Ok(None);
    }
    let mut classes = Vec::new();
    for i in 0..=probe {
        let img = composite_image(tower, i, depth - i);
        classes.push(modules::image_class(&img)?);
    }
    if classes.is_empty() {
        return Ok(None);
    }
    // the transitions restrict to surjections between stable images; with
    // equal classes they are isomorphisms and the limit is the stable class
    let all_equal = classes.windows(2).all(|w| w[0] == w[1]);
    if all_equal {
        Ok(Some(LimitSymbol::Constant(classes[0].clone())))
    } else {
        Ok(None)
    }
}

/// Parse the tower input format: header "ring depth", then depth transition
/// matrices, each in the plain-text matrix format. Level ranks are inferred
/// from the matrix shapes.
pub fn parse_tower(input: &str) -> Result<Tower> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty tower file".into()))?;
    let mut parts = header.split_whitespace();
    let ring: CoefficientRing = parts
        .next()
        .ok_or_else(|| Error::Parse("missing ring in tower header".into()))?
        .parse()?;
    let depth: usize = parts
        .next()
        .ok_or_else(|| Error::Parse("missing depth in tower header".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad depth: {e}")))?;
    let rest = lines.collect::<Vec<&str>>().join("\n");
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let mut pos = 0usize;
    let mut next_token = |pos: &mut usize| -> Result<&str> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| Error::Parse("truncated tower file".into()))?;
        *pos += 1;
        Ok(t)
    };
    let mut transitions = Vec::new();
    for _ in 0..depth {
        let r: usize = next_token(&mut pos)?
            .parse()
            .map_err(|e| Error::Parse(format!("bad matrix rows: {e}")))?;
        let c: usize = next_token(&mut pos)?
            .parse()
            .map_err(|e| Error::Parse(format!("bad matrix cols: {e}")))?;
        let mut text = format!("{r} {c}");
        for _ in 0..r * c {
            text.push(' ');
            text.push_str(next_token(&mut pos)?);
        }
        transitions.push(IntMatrix::parse_text(&text)?);
    }
    if transitions.is_empty() {
        return Err(Error::DepthTooSmall { depth: 0, need: 1 });
    }
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(transitions[0].rows());
    for t in &transitions {
        levels.push(t.cols());
    }
    Tower::new(ring, levels, transitions)
}
