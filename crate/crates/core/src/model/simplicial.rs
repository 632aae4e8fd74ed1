//! Finite simplicial sets: the standard circle model with two nondegenerate
//! simplices, constant simplicial sets, products, normalized cochain
//! complexes, pullbacks along simplicial maps, and the signed fiber
//! integration over the circle factor.

use crate::complex::{ChainMap, CochainComplex};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::modules::CoefficientRing;
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// A simplicial set stored through a finite level window with explicit face
/// and degeneracy tables.
#[derive(Debug, Clone)]
pub struct FiniteSimplicialSet {
    pub name: String,
    /// counts[n] = number of n-simplices, 0 <= n <= top_level
    pub counts: Vec<usize>,
    /// faces[n][i][s] = d_i(s) for 1 <= n <= top_level, 0 <= i <= n
    faces: Vec<Vec<Vec<usize>>>,
    /// degeneracies[n][i][s] = s_i(s) for 0 <= n < top_level, 0 <= i <= n
    degeneracies: Vec<Vec<Vec<usize>>>,
    labels: Vec<Vec<String>>,
}

impl FiniteSimplicialSet {
    pub fn top_level(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn face(&self, n: usize, i: usize, s: usize) -> usize {
        self.faces[n][i][s]
    }

    pub fn degeneracy(&self, n: usize, i: usize, s: usize) -> usize {
        self.degeneracies[n][i][s]
    }

    pub fn label(&self, n: usize, s: usize) -> &str {
        &self.labels[n][s]
    }

    /// Degenerate markers per level: a simplex is degenerate iff it is in the
    /// image of some degeneracy.
    pub fn degenerate_masks(&self) -> Vec<Vec<bool>> {
        let mut masks: Vec<Vec<bool>> = self.counts.iter().map(|c| vec![false; *c]).collect();
        for n in 0..self.top_level() {
            for i in 0..=n {
                for s in 0..self.counts[n] {
                    masks[n + 1][self.degeneracies[n][i][s]] = true;
                }
            }
        }
        masks
    }

    /// Indices of nondegenerate simplices per level.
    pub fn nondegenerate(&self) -> Vec<Vec<usize>> {
        self.degenerate_masks()
            .iter()
            .map(|mask| {
                mask.iter()
                    .enumerate()
                    .filter(|(_, d)| !**d)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }

    /// Validate the simplicial identities on the stored window.
    pub fn check_identities(&self) -> Result<()> {
        let top = self.top_level();
        for n in 2..=top {
            for j in 0..=n {
                for i in 0..j {
                    for s in 0..self.counts[n] {
                        let a = self.face(n - 1, i, self.face(n, j, s));
                        let b = self.face(n - 1, j - 1, self.face(n, i, s));
                        if a != b {
                            return Err(Error::InvalidComplex(format!(
                                "{}: d_{i} d_{j} != d_{} d_{i} at level {n}",
                                self.name,
                                j - 1
                            )));
                        }
                    }
                }
            }
        }
        for n in 0..top {
            for i in 0..=n {
                for s in 0..self.counts[n] {
                    let t = self.degeneracy(n, i, s);
                    if self.face(n + 1, i, t) != s || self.face(n + 1, i + 1, t) != s {
                        return Err(Error::InvalidComplex(format!(
                            "{}: face/degeneracy identity fails at level {n}",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Normalized cochain complex over F up to degree top_level - 1 (the top
    /// stored level provides the final differential).
    pub fn normalized_cochain_complex(&self, ring: CoefficientRing) -> Result<CochainComplex> {
        let nondeg = self.nondegenerate();
        let top = self.top_level();
        let mut ranks = Vec::new();
        let mut labels = Vec::new();
        for (n, nd) in nondeg.iter().enumerate() {
            ranks.push(nd.len());
            labels.push(nd.iter().map(|s| self.labels[n][*s].clone()).collect());
        }
        let mut diffs = Vec::new();
        for n in 0..top {
            let rows = nondeg[n + 1].len();
            let cols = nondeg[n].len();
            let col_index: BTreeMap<usize, usize> = nondeg[n]
                .iter()
                .enumerate()
                .map(|(j, s)| (*s, j))
                .collect();
            let mut d = IntMatrix::zero(rows, cols);
            for (r, &simplex) in nondeg[n + 1].iter().enumerate() {
                for i in 0..=n + 1 {
                    let f = self.face(n + 1, i, simplex);
                    if let Some(&c) = col_index.get(&f) {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        let cur = d.at(r, c).clone();
                        d.set(r, c, cur + BigInt::from(sign));
                    }
                }
            }
            diffs.push(d);
        }
        CochainComplex::new(ring, 0, ranks, diffs, Some(labels))
    }
}

/// The standard simplicial circle: one nondegenerate simplex in degree 0 and
/// one in degree 1. Internally an n-simplex is a monotone 0/1 vector of
/// length n+1 modulo collapsing the two constant vectors to the base point;
/// index 0 is the (degenerate) point, index k = 1..n is the jump-at-k
/// simplex.
pub fn circle(top_level: usize) -> FiniteSimplicialSet {
    let mut counts = Vec::new();
    let mut labels = Vec::new();
    for n in 0..=top_level {
        counts.push(n + 1);
        let mut l = vec!["pt".to_string()];
        for k in 1..=n {
            l.push(format!("jump@{k}"));
        }
        labels.push(l);
    }
    // value vector of simplex (n, idx): idx = 0 -> constant 0; idx = k ->
    // 0 for j < k, 1 for j >= k
    let simplex_of_vector = |vals: &[bool]| -> usize {
        match vals.iter().position(|b| *b) {
            None => 0,
            Some(k) if vals[k..].iter().all(|b| *b) => {
                if k == 0 {
                    0 // constant 1 collapses to the base point
                } else {
                    k
                }
            }
            Some(_) => unreachable!("vectors stay monotone under faces"),
        }
    };
    let vector_of_simplex = |n: usize, idx: usize| -> Vec<bool> {
        (0..=n).map(|j| idx != 0 && j >= idx).collect()
    };
    let mut faces = vec![Vec::new()];
    for n in 1..=top_level {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let mut row = Vec::new();
            for idx in 0..counts[n] {
                let mut vals = vector_of_simplex(n, idx);
                vals.remove(i);
                row.push(simplex_of_vector(&vals));
            }
            per_i.push(row);
        }
        faces.push(per_i);
    }
    let mut degeneracies = Vec::new();
    for n in 0..top_level {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let mut row = Vec::new();
            for idx in 0..counts[n] {
                let mut vals = vector_of_simplex(n, idx);
                let dup = vals[i];
                vals.insert(i, dup);
                row.push(simplex_of_vector(&vals));
            }
            per_i.push(row);
        }
        degeneracies.push(per_i);
    }
    FiniteSimplicialSet {
        name: "S1".to_string(),
        counts,
        faces,
        degeneracies,
        labels,
    }
}

/// The constant simplicial set on a finite set of points.
pub fn constant(name: &str, points: usize, top_level: usize) -> FiniteSimplicialSet {
    let counts = vec![points; top_level + 1];
    let labels = (0..=top_level)
        .map(|_| (0..points).map(|p| format!("{name}{p}")).collect())
        .collect();
    let faces = std::iter::once(Vec::new())
        .chain((1..=top_level).map(|n| vec![(0..points).collect::<Vec<usize>>(); n + 1]))
        .collect();
    let degeneracies = (0..top_level)
        .map(|n| vec![(0..points).collect::<Vec<usize>>(); n + 1])
        .collect();
    FiniteSimplicialSet {
        name: name.to_string(),
        counts,
        faces,
        degeneracies,
        labels,
    }
}

/// The point.
pub fn point(top_level: usize) -> FiniteSimplicialSet {
    constant("pt", 1, top_level)
}

/// Bar classifying object of Z/m as a finite simplicial set (levels Gamma^n,
/// including degenerate tuples). Level sizes grow as m^n.
pub fn classifying_space(m: u64, top_level: usize) -> Result<FiniteSimplicialSet> {
    use super::bar::BarComplex;
    let bar = BarComplex::new(m, top_level)?;
    let mut tuples_per_level: Vec<Vec<Vec<u64>>> = Vec::new();
    for n in 0..=top_level {
        let mut tuples = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for t in &tuples {
                for g in 0..m {
                    let mut t2 = t.clone();
                    t2.push(g);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        if tuples.len() > 100_000 {
            return Err(Error::RankLimit {
                rank: tuples.len(),
                limit: 100_000,
            });
        }
        tuples_per_level.push(tuples);
    }
    let index: Vec<BTreeMap<&[u64], usize>> = tuples_per_level
        .iter()
        .map(|ts| {
            ts.iter()
                .enumerate()
                .map(|(i, t)| (t.as_slice(), i))
                .collect()
        })
        .collect();
    let counts: Vec<usize> = tuples_per_level.iter().map(|t| t.len()).collect();
    let labels: Vec<Vec<String>> = tuples_per_level
        .iter()
        .map(|ts| {
            ts.iter()
                .map(|t| {
                    let parts: Vec<String> = t.iter().map(|g| g.to_string()).collect();
                    format!("[{}]", parts.join("|"))
                })
                .collect()
        })
        .collect();
    let mut faces = vec![Vec::new()];
    for n in 1..=top_level {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let row: Vec<usize> = tuples_per_level[n]
                .iter()
                .map(|t| index[n - 1][bar.face(t, i).as_slice()])
                .collect();
            per_i.push(row);
        }
        faces.push(per_i);
    }
    let mut degeneracies = Vec::new();
    for n in 0..top_level {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let row: Vec<usize> = tuples_per_level[n]
                .iter()
                .map(|t| index[n + 1][bar.degeneracy(t, i).as_slice()])
                .collect();
            per_i.push(row);
        }
        degeneracies.push(per_i);
    }
    Ok(FiniteSimplicialSet {
        name: format!("B(Z/{m})"),
        counts,
        faces,
        degeneracies,
        labels,
    })
}

/// Levelwise product with componentwise faces and degeneracies.
pub fn product(x: &FiniteSimplicialSet, y: &FiniteSimplicialSet) -> FiniteSimplicialSet {
    let top = x.top_level().min(y.top_level());
    let pair_index = |n: usize, a: usize, b: usize, y: &FiniteSimplicialSet| -> usize {
        a * y.counts[n] + b
    };
    let counts: Vec<usize> = (0..=top).map(|n| x.counts[n] * y.counts[n]).collect();
    let labels: Vec<Vec<String>> = (0..=top)
        .map(|n| {
            let mut l = Vec::with_capacity(counts[n]);
            for a in 0..x.counts[n] {
                for b in 0..y.counts[n] {
                    l.push(format!("({},{})", x.labels[n][a], y.labels[n][b]));
                }
            }
            l
        })
        .collect();
    let mut faces = vec![Vec::new()];
    for n in 1..=top {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let mut row = Vec::with_capacity(counts[n]);
            for a in 0..x.counts[n] {
                for b in 0..y.counts[n] {
                    row.push(pair_index(
                        n - 1,
                        x.face(n, i, a),
                        y.face(n, i, b),
                        y,
                    ));
                }
            }
            per_i.push(row);
        }
        faces.push(per_i);
    }
    let mut degeneracies = Vec::new();
    for n in 0..top {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let mut row = Vec::with_capacity(counts[n]);
            for a in 0..x.counts[n] {
                for b in 0..y.counts[n] {
                    row.push(pair_index(
                        n + 1,
                        x.degeneracy(n, i, a),
                        y.degeneracy(n, i, b),
                        y,
                    ));
                }
            }
            per_i.push(row);
        }
        degeneracies.push(per_i);
    }
    FiniteSimplicialSet {
        name: format!("{}x{}", x.name, y.name),
        counts,
        faces,
        degeneracies,
        labels,
    }
}

/// A levelwise simplicial map, stored as index tables.
#[derive(Debug, Clone)]
pub struct SimplicialMap {
    pub name: String,
    /// tables[n][s] = image of simplex s at level n
    pub tables: Vec<Vec<usize>>,
}

impl SimplicialMap {
    /// Check commutation with faces and degeneracies.
    pub fn verify(&self, source: &FiniteSimplicialSet, target: &FiniteSimplicialSet) -> Result<()> {
        let top = self.tables.len() - 1;
        for n in 1..=top {
            for i in 0..=n {
                for s in 0..source.counts[n] {
                    let a = target.face(n, i, self.tables[n][s]);
                    let b = self.tables[n - 1][source.face(n, i, s)];
                    if a != b {
                        return Err(Error::InvalidComplex(format!(
                            "{}: face commutation fails at level {n}",
                            self.name
                        )));
                    }
                }
            }
        }
        for n in 0..top {
            for i in 0..=n {
                for s in 0..source.counts[n] {
                    let a = target.degeneracy(n, i, self.tables[n][s]);
                    let b = self.tables[n + 1][source.degeneracy(n, i, s)];
                    if a != b {
                        return Err(Error::InvalidComplex(format!(
                            "{}: degeneracy commutation fails at level {n}",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Pullback on normalized cochains as a shift-0 chain map.
    pub fn pullback(
        &self,
        source: &FiniteSimplicialSet,
        target: &FiniteSimplicialSet,
        ring: CoefficientRing,
    ) -> Result<ChainMap> {
        let cx = source.normalized_cochain_complex(ring.clone())?;
        let cy = target.normalized_cochain_complex(ring)?;
        let nondeg_x = source.nondegenerate();
        let nondeg_y = target.nondegenerate();
        let mut maps = BTreeMap::new();
        let top = self.tables.len() - 1;
        for n in 0..=top {
            let rows = nondeg_x[n].len();
            let cols = nondeg_y[n].len();
            let col_index: BTreeMap<usize, usize> = nondeg_y[n]
                .iter()
                .enumerate()
                .map(|(j, s)| (*s, j))
                .collect();
            let mut m = IntMatrix::zero(rows, cols);
            for (r, &s) in nondeg_x[n].iter().enumerate() {
                let image = self.tables[n][s];
                if let Some(&c) = col_index.get(&image) {
                    m.set(r, c, BigInt::from(1));
                }
            }
            maps.insert(n as i32, m);
        }
        ChainMap::new(cy, cx, 0, maps)
    }
}

/// The projection S1 x M -> M.
pub fn projection_to_second(
    product_set: &FiniteSimplicialSet,
    circle_counts: &[usize],
    m_set: &FiniteSimplicialSet,
) -> SimplicialMap {
    let top = product_set.top_level();
    let tables = (0..=top)
        .map(|n| {
            let mut row = Vec::with_capacity(product_set.counts[n]);
            for a in 0..circle_counts[n] {
                for b in 0..m_set.counts[n] {
                    let _ = a;
                    row.push(b);
                }
            }
            row
        })
        .collect();
    SimplicialMap {
        name: "pr_M".to_string(),
        tables,
    }
}

/// Fiber integration over the circle factor: the degree -1 map
/// C^{n+1}(S1 x M) -> C^n(M) given by the signed sum over the jump simplices
/// paired with the matching degeneracy of M. The sign convention makes the
/// fundamental 1-cochain of the circle integrate to +1.
pub fn simplicial_integration(
    m_set: &FiniteSimplicialSet,
    ring: CoefficientRing,
) -> Result<ChainMap> {
    let top = m_set.top_level();
    let s1 = circle(top);
    let prod = product(&s1, m_set);
    let c_total = prod.normalized_cochain_complex(ring.clone())?;
    let c_m = m_set.normalized_cochain_complex(ring)?;
    let nondeg_prod = prod.nondegenerate();
    let nondeg_m = m_set.nondegenerate();

    let mut maps = BTreeMap::new();
    for n in 0..top {
        // rows: nondegenerate n-simplices of M; cols: nondegenerate
        // (n+1)-simplices of S1 x M
        let rows = nondeg_m[n].len();
        let cols = nondeg_prod[n + 1].len();
        let col_index: BTreeMap<usize, usize> = nondeg_prod[n + 1]
            .iter()
            .enumerate()
            .map(|(j, s)| (*s, j))
            .collect();
        let mut mat = IntMatrix::zero(rows, cols);
        for (r, &ms) in nondeg_m[n].iter().enumerate() {
            for k in 1..=n + 1 {
                // pair jump@k with the degeneracy s_{k-1} of m
                let m_degen = m_set.degeneracy(n, k - 1, ms);
                let pair = k * m_set.counts[n + 1] + m_degen;
                if let Some(&c) = col_index.get(&pair) {
                    let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
                    let cur = mat.at(r, c).clone();
                    mat.set(r, c, cur + BigInt::from(sign));
                }
            }
        }
        maps.insert((n + 1) as i32, mat);
    }
    ChainMap::new(c_total, c_m, -1, maps)
}

/// The two-case circle-times-group map into the classifying object: the
/// degenerate point goes to the base point, and the jump-at-k simplex paired
/// with gamma goes to the tuple with gamma in slot k and identities
/// elsewhere.
pub fn c_map(m: u64, top_level: usize) -> Result<(FiniteSimplicialSet, FiniteSimplicialSet, SimplicialMap)> {
    let s1 = circle(top_level);
    let gamma = constant("g", m as usize, top_level);
    let source = product(&s1, &gamma);
    let target = classifying_space(m, top_level)?;
    // tuple index in the classifying space at level n (base-m digits)
    let tuple_index = |t: &[u64]| -> usize {
        t.iter().fold(0usize, |acc, g| acc * m as usize + *g as usize)
    };
    let mut tables = Vec::new();
    for n in 0..=top_level {
        let mut row = Vec::with_capacity(source.counts[n]);
        for a in 0..s1.counts[n] {
            for g in 0..m {
                let tuple: Vec<u64> = if a == 0 {
                    vec![0; n]
                } else {
                    (1..=n).map(|slot| if slot == a { g } else { 0 }).collect()
                };
                row.push(tuple_index(&tuple));
            }
        }
        tables.push(row);
    }
    let map = SimplicialMap {
        name: "c".to_string(),
        tables,
    };
    Ok((source, target, map))
}
