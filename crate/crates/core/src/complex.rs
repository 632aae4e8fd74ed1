//! Cochain complexes of free modules on a finite degree window, with shifts,
//! chain maps, mapping cones, chain homotopies, and cohomology.
//!
//! Grading is cohomological: differentials raise degree by 1. The cone of a
//! shift-0 chain map f: S -> T is T^k + S^{k+1} with differential
//! [[d_T, f], [0, -d_S]]. Degrees outside the window have rank 0; nothing is
//! silently truncated.

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};
use crate::modules::{CoefficientRing, ModuleClass};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A cochain complex of free F-modules supported on [deg_min, deg_max].
#[derive(Debug, Clone)]
pub struct CochainComplex {
    pub ring: CoefficientRing,
    deg_min: i32,
    deg_max: i32,
    ranks: BTreeMap<i32, usize>,
    /// d^k : rank(k) -> rank(k+1), stored where both sides can be nonzero.
    diffs: BTreeMap<i32, IntMatrix>,
    labels: BTreeMap<i32, Vec<String>>,
}

impl CochainComplex {
    /// Build and validate: dimensions must match and d . d = 0.
    pub fn new(
        ring: CoefficientRing,
        deg_min: i32,
        ranks_list: Vec<usize>,
        diffs_list: Vec<IntMatrix>,
        labels_list: Option<Vec<Vec<String>>>,
    ) -> Result<Self> {
        ring.validate()?;
        let deg_max = deg_min + ranks_list.len().max(1) as i32 - 1;
        let mut ranks = BTreeMap::new();
        for (i, r) in ranks_list.iter().enumerate() {
            if *r > 0 {
                ranks.insert(deg_min + i as i32, *r);
            }
        }
        let mut labels = BTreeMap::new();
        match labels_list {
            Some(ls) => {
                if ls.len() != ranks_list.len() {
                    return Err(Error::InvalidComplex(
                        "label list length must match rank list".into(),
                    ));
                }
                for (i, l) in ls.into_iter().enumerate() {
                    let k = deg_min + i as i32;
                    if l.len() != ranks_list[i] {
                        return Err(Error::InvalidComplex(format!(
                            "labels at degree {k} have length {} but rank is {}",
                            l.len(),
                            ranks_list[i]
                        )));
                    }
                    if !l.is_empty() {
                        labels.insert(k, l);
                    }
                }
            }
            None => {
                for (k, r) in &ranks {
                    labels.insert(*k, (0..*r).map(|j| format!("e{k}_{j}")).collect());
                }
            }
        }
        let mut diffs = BTreeMap::new();
        for (i, d) in diffs_list.into_iter().enumerate() {
            let k = deg_min + i as i32;
            let src = ranks.get(&k).copied().unwrap_or(0);
            let tgt = ranks.get(&(k + 1)).copied().unwrap_or(0);
            if d.cols() != src || d.rows() != tgt {
                return Err(Error::InvalidComplex(format!(
                    "differential at degree {k} is {}x{}, expected {tgt}x{src}",
                    d.rows(),
                    d.cols()
                )));
            }
            if !d.is_zero() {
                diffs.insert(k, d);
            }
        }
        let complex = CochainComplex {
            ring,
            deg_min,
            deg_max,
            ranks,
            diffs,
            labels,
        };
        complex.check_dd_zero()?;
        Ok(complex)
    }

    fn check_dd_zero(&self) -> Result<()> {
        // Over Z/n the entrywise action only sees residues, so d.d = 0 is
        // checked modulo n; the other rings need the exact identity.
        let modulus = self.ring.modulus();
        for k in self.deg_min..self.deg_max {
            let dd = self.differential(k + 1).mul(&self.differential(k))?;
            let vanishes = match &modulus {
                Some(n) => {
                    let mut ok = true;
                    'outer: for r in 0..dd.rows() {
                        for c in 0..dd.cols() {
                            if !(dd.at(r, c) % n).is_zero() {
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                    ok
                }
                None => dd.is_zero(),
            };
            if !vanishes {
                return Err(Error::InvalidComplex(format!(
                    "d.d != 0 between degrees {k} and {}",
                    k + 2
                )));
            }
        }
        Ok(())
    }

    /// A complex concentrated in one degree with zero differential.
    pub fn concentrated(ring: CoefficientRing, degree: i32, rank: usize) -> Self {
        CochainComplex::new(ring, degree, vec![rank], vec![], None)
            .expect("single-degree complex is always valid")
    }

    pub fn deg_min(&self) -> i32 {
        self.deg_min
    }

    pub fn deg_max(&self) -> i32 {
        self.deg_max
    }

    pub fn rank(&self, k: i32) -> usize {
        self.ranks.get(&k).copied().unwrap_or(0)
    }

    pub fn labels(&self, k: i32) -> Vec<String> {
        self.labels.get(&k).cloned().unwrap_or_default()
    }

    /// The differential d^k : rank(k) -> rank(k+1); zero-sized outside the
    /// window.
    pub fn differential(&self, k: i32) -> IntMatrix {
        match self.diffs.get(&k) {
            Some(d) => d.clone(),
            None => IntMatrix::zero(self.rank(k + 1), self.rank(k)),
        }
    }

    /// Shifted complex C[s] with C[s]^k = C^{k+s} and differential (-1)^s d.
    pub fn shift(&self, s: i32) -> CochainComplex {
        let sign = if s.rem_euclid(2) == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let ranks: BTreeMap<i32, usize> =
            self.ranks.iter().map(|(k, r)| (k - s, *r)).collect();
        let diffs: BTreeMap<i32, IntMatrix> = self
            .diffs
            .iter()
            .map(|(k, d)| (k - s, d.scale(&sign)))
            .collect();
        let labels: BTreeMap<i32, Vec<String>> = self
            .labels
            .iter()
            .map(|(k, l)| (k - s, l.clone()))
            .collect();
        CochainComplex {
            ring: self.ring.clone(),
            deg_min: self.deg_min - s,
            deg_max: self.deg_max - s,
            ranks,
            diffs,
            labels,
        }
    }

    /// All degrees with nonzero rank, ascending.
    pub fn support(&self) -> Vec<i32> {
        self.ranks.keys().copied().collect()
    }

    /// Serialization with ranks and differentials as nested decimal strings;
    /// round-trip stable.
    pub fn to_json(&self) -> serde_json::Value {
        let dto = ComplexDto {
            ring: self.ring.clone(),
            window: [self.deg_min, self.deg_max],
            ranks: (self.deg_min..=self.deg_max).map(|k| self.rank(k)).collect(),
            differentials: (self.deg_min..=self.deg_max)
                .map(|k| self.differential(k).to_string_rows())
                .collect(),
            labels: (self.deg_min..=self.deg_max).map(|k| self.labels(k)).collect(),
        };
        serde_json::to_value(dto).expect("complex serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let dto: ComplexDto = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("complex json: {e}")))?;
        let deg_min = dto.window[0];
        let ranks = dto.ranks.clone();
        let mut diffs = Vec::new();
        for (i, rows) in dto.differentials.iter().enumerate() {
            let k = i;
            let tgt = if k + 1 < ranks.len() { ranks[k + 1] } else { 0 };
            let src = ranks[k];
            let mut m = IntMatrix::zero(tgt, src);
            for (r, row) in rows.iter().enumerate() {
                for (c, ent) in row.iter().enumerate() {
                    let v: BigInt = ent
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad entry {ent:?}")))?;
                    m.set(r, c, v);
                }
            }
            diffs.push(m);
        }
        CochainComplex::new(dto.ring, deg_min, ranks, diffs, Some(dto.labels))
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexDto {
    ring: CoefficientRing,
    window: [i32; 2],
    ranks: Vec<usize>,
    differentials: Vec<Vec<Vec<String>>>,
    labels: Vec<Vec<String>>,
}

/// Cohomology of the two-step presentation  prev: * -> F^n,  next: F^n -> *.
pub fn cohomology_of_presentation(
    ring: &CoefficientRing,
    prev: &IntMatrix,
    next: &IntMatrix,
) -> Result<ModuleClass> {
    match ring {
        CoefficientRing::Int => integer_cohomology(prev, next),
        CoefficientRing::Rat => {
            let n = next.cols();
            let dim_ker = n - matrix::rational_rank(next);
            let rank_im = matrix::rational_rank(prev);
            ModuleClass::new(ring.clone(), dim_ker - rank_im, 0, vec![])
        }
        CoefficientRing::Mod(nn) => {
            let n = BigInt::from(*nn);
            let dim = next.cols();
            // relation lattice L = { x : next x = 0 mod n }
            let aug = next.hconcat(&IntMatrix::identity(next.rows()).scale(&n))?;
            let full = matrix::kernel_basis(&aug);
            let b = IntMatrix::from_fn(dim, full.cols(), |r, c| full.at(r, c).clone());
            // quotient by im(prev) + n Z^dim, both inside L
            let relations = prev.hconcat(&IntMatrix::identity(dim).scale(&n))?;
            let mut y = IntMatrix::zero(b.cols(), relations.cols());
            for j in 0..relations.cols() {
                let rhs = relations.column(j);
                let x = matrix::solve_integer(&b, &rhs)?.ok_or_else(|| {
                    Error::InvalidComplex(
                        "image does not lie in the kernel lattice (d.d != 0 mod n?)".into(),
                    )
                })?;
                for i in 0..b.cols() {
                    y.set(i, j, x[i].clone());
                }
            }
            let snf = matrix::smith_normal_form(&y);
            let r = snf.rank();
            if r < b.cols() {
                return Err(Error::InvalidComplex(
                    "mod-n cohomology must be killed by n".into(),
                ));
            }
            let cyclics: Vec<BigInt> = snf.invariant_factors[..r]
                .iter()
                .filter(|d| !d.is_one())
                .map(|d| d.gcd_with(&n))
                .collect();
            ModuleClass::new(ring.clone(), 0, 0, cyclics)
        }
        CoefficientRing::RatModInt => {
            // Universal coefficients for tensoring a free integer complex
            // with Q/Z: H^k(X x Q/Z) = H^k(X) x Q/Z + tor(H^{k+1}(X)), i.e.
            // divisible copies from the free rank at k and the torsion of the
            // next integer cohomology group. `next_after` is not available in
            // a two-step presentation, so the caller-facing entry point for
            // Q/Z complexes is `CochainComplex::cohomology`, which routes
            // through `rat_mod_int_cohomology` below with the full complex.
            Err(Error::InvalidComplex(
                "Q/Z cohomology needs the full complex context".into(),
            ))
        }
    }
}

trait GcdWith {
    fn gcd_with(&self, other: &BigInt) -> BigInt;
}

impl GcdWith for BigInt {
    fn gcd_with(&self, other: &BigInt) -> BigInt {
        use num_integer::Integer;
        self.gcd(other)
    }
}

fn integer_cohomology(prev: &IntMatrix, next: &IntMatrix) -> Result<ModuleClass> {
    // kernel basis of next, saturated
    let kb = matrix::kernel_basis(next);
    // express im(prev) in the kernel basis
    let mut y = IntMatrix::zero(kb.cols(), prev.cols());
    for j in 0..prev.cols() {
        let rhs = prev.column(j);
        let x = matrix::solve_integer(&kb, &rhs)?.ok_or_else(|| {
            Error::InvalidComplex("image does not lie in the kernel (d.d != 0?)".into())
        })?;
        for i in 0..kb.cols() {
            y.set(i, j, x[i].clone());
        }
    }
    let snf = matrix::smith_normal_form(&y);
    let r = snf.rank();
    let cyclics: Vec<BigInt> = snf.invariant_factors[..r]
        .iter()
        .filter(|d| !d.is_one())
        .cloned()
        .collect();
    ModuleClass::new(CoefficientRing::Int, 0, kb.cols() - r, cyclics)
}

impl CochainComplex {
    /// Integer cohomology of the underlying integer complex; used by the
    /// universal-coefficients route for Q/Z.
    fn integer_view_cohomology(&self, k: i32) -> Result<ModuleClass> {
        integer_cohomology(&self.differential(k - 1), &self.differential(k))
    }
}

/// Cohomology dispatch that knows the full complex (needed for Q/Z).
pub fn cohomology(complex: &CochainComplex, k: i32) -> Result<ModuleClass> {
    match &complex.ring {
        CoefficientRing::RatModInt => {
            let h_k = complex.integer_view_cohomology(k)?;
            let h_next = complex.integer_view_cohomology(k + 1)?;
            ModuleClass::new(
                CoefficientRing::RatModInt,
                h_k.free_rank,
                0,
                h_next.cyclic_invariants,
            )
        }
        ring => cohomology_of_presentation(ring, &complex.differential(k - 1), &complex.differential(k)),
    }
}

impl CochainComplex {
    /// Per-ring cohomology at degree k.
    pub fn cohomology_at(&self, k: i32) -> Result<ModuleClass> {
        cohomology(self, k)
    }
}

/// A degree-s map of complexes f^k : source^k -> target^{k+s}, commuting with
/// the differentials up to the sign (-1)^s.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: CochainComplex,
    pub target: CochainComplex,
    pub shift: i32,
    maps: BTreeMap<i32, IntMatrix>,
}

impl ChainMap {
    pub fn new(
        source: CochainComplex,
        target: CochainComplex,
        shift: i32,
        maps: BTreeMap<i32, IntMatrix>,
    ) -> Result<Self> {
        source.ring.clone().validate()?;
        if source.ring != target.ring {
            return Err(Error::RingMismatch(
                source.ring.to_string(),
                target.ring.to_string(),
            ));
        }
        for (k, m) in &maps {
            let src = source.rank(*k);
            let tgt = target.rank(*k + shift);
            if m.cols() != src || m.rows() != tgt {
                return Err(Error::InvalidChainMap(format!(
                    "component at degree {k} is {}x{}, expected {tgt}x{src}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(ChainMap {
            source,
            target,
            shift,
            maps,
        })
    }

    pub fn identity(c: &CochainComplex) -> Self {
        let maps = c
            .support()
            .into_iter()
            .map(|k| (k, IntMatrix::identity(c.rank(k))))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            shift: 0,
            maps,
        }
    }

    pub fn zero(source: &CochainComplex, target: &CochainComplex, shift: i32) -> Self {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            shift,
            maps: BTreeMap::new(),
        }
    }

    pub fn component(&self, k: i32) -> IntMatrix {
        match self.maps.get(&k) {
            Some(m) => m.clone(),
            None => IntMatrix::zero(self.target.rank(k + self.shift), self.source.rank(k)),
        }
    }

    pub fn set_component(&mut self, k: i32, m: IntMatrix) {
        self.maps.insert(k, m);
    }

    /// Degrees where either endpoint has a nonzero component.
    fn relevant_degrees(&self) -> Vec<i32> {
        let lo = self.source.deg_min().min(self.target.deg_min() - self.shift) - 1;
        let hi = self.source.deg_max().max(self.target.deg_max() - self.shift) + 1;
        (lo..=hi).collect()
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.shift != other.shift {
            return Err(Error::InvalidChainMap("shift mismatch in add".into()));
        }
        let mut maps = BTreeMap::new();
        for k in self.relevant_degrees() {
            let s = self.component(k).add(&other.component(k))?;
            if !s.is_zero() {
                maps.insert(k, s);
            }
        }
        ChainMap::new(self.source.clone(), self.target.clone(), self.shift, maps)
    }

    pub fn negate(&self) -> ChainMap {
        let maps = self.maps.iter().map(|(k, m)| (*k, m.neg())).collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            shift: self.shift,
            maps,
        }
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.add(&other.negate())
    }
}

/// Composite g after f; shifts add.
pub fn compose_maps(g: &ChainMap, f: &ChainMap) -> Result<ChainMap> {
    let mut maps = BTreeMap::new();
    for k in f.relevant_degrees() {
        let m = g.component(k + f.shift).mul(&f.component(k))?;
        if !m.is_zero() {
            maps.insert(k, m);
        }
    }
    ChainMap::new(
        f.source.clone(),
        g.target.clone(),
        f.shift + g.shift,
        maps,
    )
}

/// Exact degreewise check of f d = (-1)^s d f.
pub fn verify_chain_map(f: &ChainMap) -> Result<bool> {
    let sign = if f.shift.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    for k in f.relevant_degrees() {
        let lhs = f.component(k + 1).mul(&f.source.differential(k))?;
        let rhs = f
            .target
            .differential(k + f.shift)
            .mul(&f.component(k))?
            .scale(&sign);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mapping cone of a shift-0 chain map: cone^k = target^k + source^{k+1},
/// differential [[d_T, f], [0, -d_S]].
pub fn mapping_cone(f: &ChainMap) -> Result<CochainComplex> {
    if f.shift != 0 {
        return Err(Error::InvalidChainMap("cone needs a shift-0 map".into()));
    }
    if !verify_chain_map(f)? {
        return Err(Error::InvalidChainMap(
            "cone input does not commute with differentials".into(),
        ));
    }
    let t = &f.target;
    let s = &f.source;
    let deg_min = t.deg_min().min(s.deg_min() - 1);
    let deg_max = t.deg_max().max(s.deg_max() - 1);
    let mut ranks = Vec::new();
    let mut labels = Vec::new();
    for k in deg_min..=deg_max {
        ranks.push(t.rank(k) + s.rank(k + 1));
        let mut l: Vec<String> = t.labels(k).iter().map(|x| format!("t:{x}")).collect();
        l.extend(s.labels(k + 1).iter().map(|x| format!("s:{x}")));
        labels.push(l);
    }
    let mut diffs = Vec::new();
    for k in deg_min..deg_max {
        let dt = t.differential(k);
        let fk = f.component(k + 1);
        let ds = s.differential(k + 1).neg();
        let block = IntMatrix::from_blocks(
            &[t.rank(k + 1), s.rank(k + 2)],
            &[t.rank(k), s.rank(k + 1)],
            &[
                vec![Some(&dt), Some(&fk)],
                vec![None, Some(&ds)],
            ],
        );
        diffs.push(block);
    }
    CochainComplex::new(f.source.ring.clone(), deg_min, ranks, diffs, Some(labels))
}

/// A chain homotopy between two maps of equal shift s: blocks of degree s-1
/// with a common denominator, witnessing den*(f - g) = delta J + J delta.
#[derive(Debug, Clone)]
pub struct Homotopy {
    pub f: ChainMap,
    pub g: ChainMap,
    pub blocks: BTreeMap<i32, IntMatrix>,
    pub denominator: BigInt,
}

impl Homotopy {
    pub fn block(&self, k: i32) -> IntMatrix {
        match self.blocks.get(&k) {
            Some(m) => m.clone(),
            None => IntMatrix::zero(
                self.f.target.rank(k + self.f.shift - 1),
                self.f.source.rank(k),
            ),
        }
    }
}

/// Exact degreewise verification of den*(f - g) = delta J + J delta.
pub fn verify_homotopy(h: &Homotopy) -> Result<bool> {
    if h.f.shift != h.g.shift {
        return Err(Error::InvalidChainMap("homotopy endpoints shift mismatch".into()));
    }
    let s = h.f.shift;
    for k in h.f.relevant_degrees() {
        let diff = h
            .f
            .component(k)
            .sub(&h.g.component(k))?
            .scale(&h.denominator);
        let dj = h.f.target.differential(k + s - 1).mul(&h.block(k))?;
        let jd = h.block(k + 1).mul(&h.f.source.differential(k))?;
        if diff != dj.add(&jd)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search for a homotopy J with f - g = delta J + J delta, by stacking the
/// degreewise identities into one linear system. Integral solutions are
/// preferred; over Q a rational solution is returned with a cleared
/// denominator.
pub fn find_homotopy(f: &ChainMap, g: &ChainMap) -> Result<Option<Homotopy>> {
    if f.shift != g.shift {
        return Err(Error::InvalidChainMap("find_homotopy endpoint shift mismatch".into()));
    }
    let s = f.shift;
    let degrees = f.relevant_degrees();
    // Unknown blocks J^k : source^k -> target^{k+s-1}
    let mut offsets = BTreeMap::new();
    let mut total_unknowns = 0usize;
    for &k in &degrees {
        let rows = f.target.rank(k + s - 1);
        let cols = f.source.rank(k);
        offsets.insert(k, (total_unknowns, rows, cols));
        total_unknowns += rows * cols;
    }
    // Equations: for each degree k, entrywise
    //   d_T^{k+s-1} J^k + J^{k+1} d_S^k = (f - g)^k
    let mut eq_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    for &k in &degrees {
        let target_rows = f.target.rank(k + s);
        let source_cols = f.source.rank(k);
        if target_rows == 0 || source_cols == 0 {
            continue;
        }
        let dt = f.target.differential(k + s - 1);
        let ds = f.source.differential(k);
        let want = f.component(k).sub(&g.component(k))?;
        for r in 0..target_rows {
            for c in 0..source_cols {
                let mut row = vec![BigInt::zero(); total_unknowns];
                // (d_T J^k)[r][c] = sum_m d_T[r][m] J^k[m][c]
                if let Some((off, jrows, jcols)) = offsets.get(&k).copied() {
                    for m in 0..jrows {
                        let coef = dt.at(r, m).clone();
                        if !coef.is_zero() {
                            row[off + m * jcols + c] += coef;
                        }
                    }
                }
                // (J^{k+1} d_S)[r][c] = sum_m J^{k+1}[r][m] d_S[m][c]
                if let Some((off, _jrows, jcols)) = offsets.get(&(k + 1)).copied() {
                    for m in 0..jcols {
                        let coef = ds.at(m, c).clone();
                        if !coef.is_zero() {
                            row[off + r * jcols + m] += coef;
                        }
                    }
                }
                eq_rows.push(row);
                rhs.push(want.at(r, c).clone());
            }
        }
    }
    let system = IntMatrix::from_fn(eq_rows.len(), total_unknowns, |r, c| eq_rows[r][c].clone());

    let solution: Option<(Vec<BigInt>, BigInt)> = match &f.source.ring {
        CoefficientRing::Int => {
            matrix::solve_integer(&system, &rhs)?.map(|x| (x, BigInt::one()))
        }
        CoefficientRing::Mod(n) => {
            matrix::solve_mod(&system, &rhs, &BigInt::from(*n))?.map(|x| (x, BigInt::one()))
        }
        CoefficientRing::Rat => {
            matrix::solve_rational(&system, &matrix::rationals(&rhs))?.map(|x| {
                let den = x
                    .iter()
                    .fold(BigInt::one(), |acc, q| lcm_big(&acc, q.denom()));
                let ints: Vec<BigInt> = x
                    .iter()
                    .map(|q| (q * BigRational::from(den.clone())).to_integer())
                    .collect();
                (ints, den)
            })
        }
        // Integral solvability is a sufficient witness over Q/Z.
        CoefficientRing::RatModInt => {
            matrix::solve_integer(&system, &rhs)?.map(|x| (x, BigInt::one()))
        }
    };
    let Some((flat, denominator)) = solution else {
        return Ok(None);
    };
    let mut blocks = BTreeMap::new();
    for (&k, &(off, rows, cols)) in &offsets {
        if rows * cols == 0 {
            continue;
        }
        let m = IntMatrix::from_fn(rows, cols, |r, c| flat[off + r * cols + c].clone());
        if !m.is_zero() {
            blocks.insert(k, m);
        }
    }
    let h = Homotopy {
        f: f.clone(),
        g: g.clone(),
        blocks,
        denominator,
    };
    debug_assert!(verify_homotopy(&h)?);
    Ok(Some(h))
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// A rational basis of cohomology at one degree: cycle columns extending a
/// boundary basis, so class coordinates are canonical.
#[derive(Debug, Clone)]
pub struct RationalCohomologyBasis {
    /// Columns representing a basis of H^k (cycles, independent mod
    /// boundaries).
    pub class_columns: IntMatrix,
    /// Independent boundary columns spanning im(d^{k-1}) over Q.
    pub boundary_columns: IntMatrix,
}

/// Basis of H^k over Q for a complex: boundary columns first, then cycle
/// columns completing them to a basis of the cycle space.
pub fn rational_cohomology_basis(c: &CochainComplex, k: i32) -> RationalCohomologyBasis {
    let cycles = matrix::kernel_basis(&c.differential(k));
    let boundaries = c.differential(k - 1);
    let mut picked: Vec<Vec<BigInt>> = Vec::new();
    let mut boundary_cols = Vec::new();
    let mut class_cols = Vec::new();
    let n = cycles.rows();
    let mut try_col = |col: Vec<BigInt>, picked: &mut Vec<Vec<BigInt>>| -> bool {
        // independent over Q from the picked set?
        let m = IntMatrix::from_fn(n, picked.len() + 1, |r, c_| {
            if c_ < picked.len() {
                picked[c_][r].clone()
            } else {
                col[r].clone()
            }
        });
        if matrix::rational_rank(&m) == picked.len() + 1 {
            picked.push(col);
            true
        } else {
            false
        }
    };
    for j in 0..boundaries.cols() {
        let col = boundaries.column(j);
        if try_col(col.clone(), &mut picked) {
            boundary_cols.push(col);
        }
    }
    for j in 0..cycles.cols() {
        let col = cycles.column(j);
        if try_col(col.clone(), &mut picked) {
            class_cols.push(col);
        }
    }
    RationalCohomologyBasis {
        class_columns: IntMatrix::from_fn(n, class_cols.len(), |r, c_| class_cols[c_][r].clone()),
        boundary_columns: IntMatrix::from_fn(n, boundary_cols.len(), |r, c_| {
            boundary_cols[c_][r].clone()
        }),
    }
}

/// Coordinates of a cycle's class in a rational cohomology basis.
pub fn class_coordinates(
    basis: &RationalCohomologyBasis,
    cycle: &[BigRational],
) -> Result<Vec<BigRational>> {
    let span = basis.class_columns.hconcat(&basis.boundary_columns)?;
    let modulus: Vec<BigRational> = cycle.to_vec();
    let sol = matrix::solve_rational(&span, &modulus)?
        .ok_or_else(|| Error::InvalidChainMap("vector is not a cycle class".into()))?;
    Ok(sol[..basis.class_columns.cols()].to_vec())
}

/// Induced map on rational cohomology: the matrix of f on canonical class
/// coordinates at degree k. Only valid over Q; used to compare homotopic maps
/// and to act on periodized classes.
pub fn induced_map_on_rational_cohomology(
    f: &ChainMap,
    k: i32,
) -> Result<Vec<Vec<BigRational>>> {
    if f.source.ring != CoefficientRing::Rat {
        return Err(Error::RingMismatch(
            f.source.ring.to_string(),
            CoefficientRing::Rat.to_string(),
        ));
    }
    let src = rational_cohomology_basis(&f.source, k);
    let tgt = rational_cohomology_basis(&f.target, k + f.shift);
    let mut out = Vec::new();
    for j in 0..src.class_columns.cols() {
        let v = f.component(k).mul_vec(&src.class_columns.column(j))?;
        out.push(class_coordinates(&tgt, &matrix::rationals(&v))?);
    }
    // columns indexed by the source class basis
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows)
    }

    fn two_step(ring: CoefficientRing, d: i64) -> CochainComplex {
        CochainComplex::new(ring, 0, vec![1, 1], vec![ints(&[vec![d]])], None).unwrap()
    }

    #[test]
    fn shift_involution_and_ranks() {
        let c = two_step(CoefficientRing::Int, 2);
        let c0 = c.shift(0);
        assert_eq!(c0.rank(0), 1);
        assert_eq!(c0.differential(0), c.differential(0));

        let back = c.shift(1).shift(-1);
        assert_eq!(back.rank(0), c.rank(0));
        assert_eq!(back.differential(0), c.differential(0));

        let z0 = CochainComplex::concentrated(CoefficientRing::Int, 0, 1);
        let shifted = z0.shift(2);
        assert_eq!(shifted.rank(-2), 1);
        assert_eq!(shifted.rank(0), 0);
    }

    #[test]
    fn dd_zero_enforced() {
        let bad = CochainComplex::new(
            CoefficientRing::Int,
            0,
            vec![1, 1, 1],
            vec![ints(&[vec![1]]), ints(&[vec![1]])],
            None,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let z = CochainComplex::concentrated(CoefficientRing::Int, 0, 1);
        let f = ChainMap::identity(&z);
        let cone = mapping_cone(&f).unwrap();
        for k in -2..=2 {
            assert!(cone.cohomology_at(k).unwrap().is_zero(), "H^{k}");
        }
    }

    #[test]
    fn cone_of_times_two() {
        let z = CochainComplex::concentrated(CoefficientRing::Int, 0, 1);
        let mut f = ChainMap::zero(&z, &z, 0);
        f.set_component(0, ints(&[vec![2]]));
        let cone = mapping_cone(&f).unwrap();
        // Z --2--> Z in degrees -1, 0
        assert_eq!(cone.rank(-1), 1);
        assert_eq!(cone.rank(0), 1);
        assert!(cone.cohomology_at(-1).unwrap().is_zero());
        assert_eq!(cone.cohomology_at(0).unwrap().canonical_string(), "Z/2");
    }

    #[test]
    fn cone_of_zero_is_direct_sum() {
        let s = two_step(CoefficientRing::Int, 3);
        let t = two_step(CoefficientRing::Int, 5);
        let f = ChainMap::zero(&s, &t, 0);
        let cone = mapping_cone(&f).unwrap();
        for k in -2..=2 {
            let expect = t
                .cohomology_at(k)
                .unwrap()
                .direct_sum(&s.shift(1).cohomology_at(k).unwrap())
                .unwrap();
            assert_eq!(cone.cohomology_at(k).unwrap(), expect, "degree {k}");
        }
    }

    #[test]
    fn cohomology_examples() {
        let c = two_step(CoefficientRing::Int, 2);
        assert!(c.cohomology_at(0).unwrap().is_zero());
        assert_eq!(c.cohomology_at(1).unwrap().canonical_string(), "Z/2");

        let zero_diff = CochainComplex::new(
            CoefficientRing::Mod(4),
            0,
            vec![2, 3],
            vec![IntMatrix::zero(3, 2)],
            None,
        )
        .unwrap();
        assert_eq!(zero_diff.cohomology_at(0).unwrap().canonical_string(), "Z/4 + Z/4");
        assert_eq!(
            zero_diff.cohomology_at(1).unwrap().canonical_string(),
            "Z/4 + Z/4 + Z/4"
        );
    }

    #[test]
    fn qz_cohomology_universal_coefficients() {
        // Z --2--> Z over Q/Z: H^0 = Z/2 (torsion of integer H^1), H^1 = 0
        let c = two_step(CoefficientRing::RatModInt, 2);
        assert_eq!(c.cohomology_at(0).unwrap().canonical_string(), "Z/2");
        assert!(c.cohomology_at(1).unwrap().is_zero());

        // zero differential: full Q/Z in each degree
        let z = CochainComplex::new(
            CoefficientRing::RatModInt,
            0,
            vec![1, 1],
            vec![IntMatrix::zero(1, 1)],
            None,
        )
        .unwrap();
        assert_eq!(z.cohomology_at(0).unwrap().canonical_string(), "(Q/Z)^1");
        assert_eq!(z.cohomology_at(1).unwrap().canonical_string(), "(Q/Z)^1");
    }

    #[test]
    fn chain_map_verification() {
        let s = two_step(CoefficientRing::Int, 2);
        let t = two_step(CoefficientRing::Int, 2);
        let mut f = ChainMap::zero(&s, &t, 0);
        f.set_component(0, ints(&[vec![1]]));
        f.set_component(1, ints(&[vec![1]]));
        assert!(verify_chain_map(&f).unwrap());

        let mut bad = ChainMap::zero(&s, &t, 0);
        bad.set_component(0, ints(&[vec![1]]));
        bad.set_component(1, ints(&[vec![2]]));
        assert!(!verify_chain_map(&bad).unwrap());
    }

    #[test]
    fn homotopy_identities() {
        // On the cone of x2, the identity is homotopic to ... itself via 0.
        let z = CochainComplex::concentrated(CoefficientRing::Int, 0, 1);
        let mut f = ChainMap::zero(&z, &z, 0);
        f.set_component(0, ints(&[vec![2]]));
        let cone = mapping_cone(&f).unwrap();
        let id = ChainMap::identity(&cone);
        let h = Homotopy {
            f: id.clone(),
            g: id.clone(),
            blocks: BTreeMap::new(),
            denominator: BigInt::one(),
        };
        assert!(verify_homotopy(&h).unwrap());

        let found = find_homotopy(&id, &id).unwrap().unwrap();
        assert!(verify_homotopy(&found).unwrap());
    }

    #[test]
    fn find_homotopy_nullhomotopic_map() {
        // S = Z in degree 0, T = (Z --1--> Z) in degrees 0, 1: any map
        // S -> T[0] factoring through d is nullhomotopic... use the cone
        // of the identity, which is contractible, so id ~ 0.
        let z = CochainComplex::concentrated(CoefficientRing::Int, 0, 1);
        let idz = ChainMap::identity(&z);
        let cone = mapping_cone(&idz).unwrap();
        let id = ChainMap::identity(&cone);
        let zero = ChainMap::zero(&cone, &cone, 0);
        let h = find_homotopy(&id, &zero).unwrap().expect("contractible");
        assert!(verify_homotopy(&h).unwrap());
    }

    #[test]
    fn no_homotopy_between_cohomologically_different_maps() {
        // On Z in degree 0 (zero differential), id and 0 act differently on
        // H^0, so no homotopy exists.
        let z = CochainComplex::concentrated(CoefficientRing::Int, 0, 1);
        let id = ChainMap::identity(&z);
        let zero = ChainMap::zero(&z, &z, 0);
        assert!(find_homotopy(&id, &zero).unwrap().is_none());
    }

    #[test]
    fn homotopic_maps_agree_on_cohomology() {
        // over Q: f and f + (delta J + J delta) induce the same map on H
        let c = CochainComplex::new(
            CoefficientRing::Rat,
            0,
            vec![2, 2],
            vec![ints(&[vec![0, 1], vec![0, 0]])],
            None,
        )
        .unwrap();
        let id = ChainMap::identity(&c);
        // build g = id + delta J + J delta for a random-ish J of degree -1
        let mut j = ChainMap::zero(&c, &c, -1);
        j.set_component(1, ints(&[vec![3, 1], vec![2, 5]]));
        let dj = compose_maps(
            &ChainMap::new(c.clone(), c.clone(), 1, {
                let mut m = BTreeMap::new();
                m.insert(0, c.differential(0));
                m
            })
            .unwrap(),
            &j,
        )
        .unwrap();
        let jd = compose_maps(
            &j,
            &ChainMap::new(c.clone(), c.clone(), 1, {
                let mut m = BTreeMap::new();
                m.insert(0, c.differential(0));
                m
            })
            .unwrap(),
        )
        .unwrap();
        let g = id.add(&dj.add(&jd).unwrap()).unwrap();
        assert!(verify_chain_map(&g).unwrap());
        for k in 0..=1 {
            let a = induced_map_on_rational_cohomology(&id, k).unwrap();
            let b = induced_map_on_rational_cohomology(&g, k).unwrap();
            assert_eq!(a, b, "degree {k}");
        }
    }

    #[test]
    fn json_round_trip() {
        let c = CochainComplex::new(
            CoefficientRing::Mod(3),
            -1,
            vec![2, 1, 2],
            vec![ints(&[vec![1, 2]]), ints(&[vec![0], vec![3]])],
            None,
        )
        .unwrap();
        let v = c.to_json();
        let c2 = CochainComplex::from_json(&v).unwrap();
        assert_eq!(c2.to_json(), v);
        assert_eq!(c2.rank(-1), 2);
        assert_eq!(c2.differential(-1), c.differential(-1));
    }
}
