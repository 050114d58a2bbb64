//! Brute-force noncontextual hidden-variable bounds.
//!
//! Two models are searched exhaustively over the 13 Yu–Oh observables:
//!
//! * unrestricted ±1 assignments `a_i`, scored by
//!   `Σ a_i − ¼ Σ_⟨i,j⟩ a_i a_j` (ordered compatible pairs), whose maximum is 8;
//! * KS colorings `b_i ∈ {0,1}`, where no two compatible rays are both 1 and
//!   every complete orthogonal triple holds exactly one 1. This is how the
//!   "algebraic structure preserved for compatible observables" assumption is
//!   operationalized; under it `Σ_α b_{h_α} ≤ 1`.
//!
//! Assignments are enumerated in lexicographic order over the canonical labels
//! z1…h3 with `+1` (resp. `0`) before `−1` (resp. `1`).

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::qutrit::{CompatibilityGraph, YuOh};

const N: usize = YuOh::COUNT;
const SPACE: u32 = 1 << N;
const CHUNK: u32 = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("graph has {0} nodes; the oracle expects 13")]
    WrongSize(usize),
}

/// A value stored exactly as an integer number of quarters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quarters(pub i64);

impl Quarters {
    pub fn from_integer(n: i64) -> Self {
        Quarters(4 * n)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 4.0
    }
}

impl fmt::Display for Quarters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = match self.0 {
            q if q % 4 == 0 => return write!(f, "{}", q / 4),
            q if q % 2 == 0 => (q / 2, 2),
            q => (q, 4),
        };
        write!(f, "{num}/{den}")
    }
}

impl Serialize for Quarters {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A ±1 value for each of the 13 observables, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: [i8; N],
}

impl Assignment {
    pub fn new(values: [i8; N]) -> Option<Self> {
        values
            .iter()
            .all(|v| *v == 1 || *v == -1)
            .then_some(Self { values })
    }

    pub fn constant(v: i8) -> Self {
        Self::new([v; N]).expect("constant must be ±1")
    }

    /// Decodes enumeration index `mask`: bit `12 − k` set means `a_k = −1`.
    pub fn from_mask(mask: u32) -> Self {
        let mut values = [1i8; N];
        for (k, v) in values.iter_mut().enumerate() {
            if (mask >> (N - 1 - k)) & 1 == 1 {
                *v = -1;
            }
        }
        Self { values }
    }

    pub fn values(&self) -> &[i8; N] {
        &self.values
    }

    pub fn get(&self, y: YuOh) -> i8 {
        self.values[y.index()]
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(
            YuOh::ALL
                .iter()
                .map(|y| (y.label(), self.values[y.index()])),
        )
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<YuOh, i8>::deserialize(d)?;
        if map.len() != N {
            return Err(D::Error::custom("assignment needs all 13 labels"));
        }
        let mut values = [0i8; N];
        for (y, v) in map {
            values[y.index()] = v;
        }
        Assignment::new(values).ok_or_else(|| D::Error::custom("values must be ±1"))
    }
}

/// A 0/1 value for each observable satisfying the KS exclusivity and
/// completeness rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KsColoring {
    values: [u8; N],
}

impl KsColoring {
    pub fn values(&self) -> &[u8; N] {
        &self.values
    }

    pub fn get(&self, y: YuOh) -> u8 {
        self.values[y.index()]
    }

    pub fn h_sum(&self) -> u32 {
        YuOh::H_RAYS.iter().map(|h| self.get(*h) as u32).sum()
    }

    /// Re-checks both rules against `g`.
    pub fn is_valid(&self, g: &CompatibilityGraph) -> bool {
        is_ks_coloring(&self.values, g)
    }
}

impl Serialize for KsColoring {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(
            YuOh::ALL
                .iter()
                .map(|y| (y.label(), self.values[y.index()])),
        )
    }
}

pub fn is_ks_coloring(values: &[u8; N], g: &CompatibilityGraph) -> bool {
    g.edges().iter().all(|&(i, j)| values[i] + values[j] <= 1)
        && g.triples()
            .iter()
            .all(|t| t.iter().map(|&k| values[k]).sum::<u8>() == 1)
}

fn check_size(g: &CompatibilityGraph) -> Result<(), OracleError> {
    if g.len() == N {
        Ok(())
    } else {
        Err(OracleError::WrongSize(g.len()))
    }
}

/// `Σ a_i − ¼ Σ_⟨i,j⟩ a_i a_j` over ordered compatible pairs, exactly.
pub fn classical_value(a: &Assignment, g: &CompatibilityGraph) -> Result<Quarters, OracleError> {
    check_size(g)?;
    Ok(quarters_unchecked(&a.values, g))
}

fn quarters_unchecked(a: &[i8; N], g: &CompatibilityGraph) -> Quarters {
    let singles: i64 = a.iter().map(|&v| v as i64).sum();
    // Each unordered edge stands for two ordered pairs of weight ¼.
    let pairs: i64 = g
        .edges()
        .iter()
        .map(|&(i, j)| (a[i] as i64) * (a[j] as i64))
        .sum();
    Quarters(4 * singles - 2 * pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalMaximum {
    pub value: Quarters,
    pub argmax: Vec<Assignment>,
}

/// Enumerates all 2^13 assignments and returns the maximum with every
/// maximizer in enumeration order.
pub fn max_classical_value(g: &CompatibilityGraph) -> Result<ClassicalMaximum, OracleError> {
    check_size(g)?;
    let chunk_results: Vec<(Quarters, Vec<u32>)> = (0..SPACE / CHUNK)
        .into_par_iter()
        .map(|c| {
            let mut best = Quarters(i64::MIN);
            let mut masks = Vec::new();
            for mask in c * CHUNK..(c + 1) * CHUNK {
                let v = quarters_unchecked(&Assignment::from_mask(mask).values, g);
                if v > best {
                    best = v;
                    masks.clear();
                }
                if v == best {
                    masks.push(mask);
                }
            }
            (best, masks)
        })
        .collect();
    let (value, masks) = chunk_results.into_iter().fold(
        (Quarters(i64::MIN), Vec::new()),
        |(best, mut acc), (v, m)| {
            if v > best {
                (v, m)
            } else {
                if v == best {
                    acc.extend(m);
                }
                (best, acc)
            }
        },
    );
    Ok(ClassicalMaximum {
        value,
        argmax: masks.into_iter().map(Assignment::from_mask).collect(),
    })
}

/// All KS colorings, by depth-first search with edge and triple pruning.
pub fn enumerate_ks_colorings(g: &CompatibilityGraph) -> Result<Vec<KsColoring>, OracleError> {
    check_size(g)?;
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); N];
    for &(i, j) in g.edges() {
        neighbours[i].push(j);
        neighbours[j].push(i);
    }
    let mut triples_of: Vec<Vec<[usize; 3]>> = vec![Vec::new(); N];
    for t in g.triples() {
        for &k in t {
            triples_of[k].push(*t);
        }
    }
    let mut out = Vec::new();
    let mut values = [0u8; N];
    search(0, &mut values, &neighbours, &triples_of, &mut out);
    debug_assert!(out.iter().all(|c| c.is_valid(g)));
    Ok(out)
}

fn search(
    k: usize,
    values: &mut [u8; N],
    neighbours: &[Vec<usize>],
    triples_of: &[Vec<[usize; 3]>],
    out: &mut Vec<KsColoring>,
) {
    if k == N {
        out.push(KsColoring { values: *values });
        return;
    }
    for v in [0u8, 1] {
        values[k] = v;
        if v == 1 && neighbours[k].iter().any(|&n| n < k && values[n] == 1) {
            continue;
        }
        // Members after k are still unassigned; a triple is settled once its
        // largest index has been assigned.
        let triples_ok = triples_of[k].iter().all(|t| {
            let assigned = t.iter().filter(|&&m| m <= k);
            let ones: u8 = assigned.clone().map(|&m| values[m]).sum();
            let open = t.iter().any(|&m| m > k);
            if open {
                ones <= 1
            } else {
                ones == 1
            }
        });
        if triples_ok {
            search(k + 1, values, neighbours, triples_of, out);
        }
    }
    values[k] = 0;
}

/// Largest `Σ_α b_{h_α}` over the given colorings; `None` if there are none.
pub fn max_h_sum(colorings: &[KsColoring]) -> Option<u32> {
    colorings.iter().map(KsColoring::h_sum).max()
}

pub fn min_h_sum(colorings: &[KsColoring]) -> Option<u32> {
    colorings.iter().map(KsColoring::h_sum).min()
}

/// Everything the `oracle` subcommand reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub classical_maximum: Quarters,
    pub quantum_value: String,
    pub argmax_count: usize,
    pub argmax: Vec<Assignment>,
    pub ks_coloring_count: usize,
    pub max_h_sum: Option<u32>,
    pub min_h_sum: Option<u32>,
    pub quantum_h_sum: String,
}

pub fn summarize(g: &CompatibilityGraph) -> Result<OracleSummary, OracleError> {
    let max = max_classical_value(g)?;
    let colorings = enumerate_ks_colorings(g)?;
    Ok(OracleSummary {
        classical_maximum: max.value,
        quantum_value: "25/3".into(),
        argmax_count: max.argmax.len(),
        argmax: max.argmax,
        ks_coloring_count: colorings.len(),
        max_h_sum: max_h_sum(&colorings),
        min_h_sum: min_h_sum(&colorings),
        quantum_h_sum: "4/3".into(),
    })
}

impl OracleSummary {
    /// Plain-text table: one row per maximizing assignment.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "classical maximum of Σa_i − ¼Σa_ia_j : {} (quantum {})\n",
            self.classical_maximum, self.quantum_value
        ));
        s.push_str(&format!(
            "maximizing assignments            : {}\n",
            self.argmax_count
        ));
        s.push_str(&format!(
            "KS colorings                      : {}\n",
            self.ks_coloring_count
        ));
        let fmt_opt = |v: Option<u32>| v.map_or_else(|| "n/a".to_string(), |x| x.to_string());
        s.push_str(&format!(
            "max Σ b_h over colorings          : {} (quantum {})\n\n",
            fmt_opt(self.max_h_sum),
            self.quantum_h_sum
        ));
        let header: Vec<String> = YuOh::ALL
            .iter()
            .map(|y| format!("{:>4}", y.label()))
            .collect();
        s.push_str(&header.join(""));
        s.push('\n');
        for a in &self.argmax {
            let row: Vec<String> = a.values().iter().map(|v| format!("{v:>4}")).collect();
            s.push_str(&row.join(""));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qutrit::{compatibility, yu_oh_graph, yu_oh_rays, Ray};

    #[test]
    fn constant_assignments() {
        let g = yu_oh_graph();
        // 13 − ¼·48 = 1 and −13 − 12 = −25.
        assert_eq!(
            classical_value(&Assignment::constant(1), &g).unwrap(),
            Quarters(4)
        );
        assert_eq!(
            classical_value(&Assignment::constant(-1), &g).unwrap(),
            Quarters(-100)
        );
    }

    #[test]
    fn maximum_is_exactly_eight() {
        let g = yu_oh_graph();
        let max = max_classical_value(&g).unwrap();
        assert_eq!(max.value, Quarters::from_integer(8));
        assert_eq!(max.value.to_string(), "8");
        for a in &max.argmax {
            assert_eq!(classical_value(a, &g).unwrap(), max.value);
        }
    }

    #[test]
    fn argmax_count_regression() {
        assert_eq!(
            max_classical_value(&yu_oh_graph()).unwrap().argmax.len(),
            28
        );
    }

    #[test]
    fn argmax_in_enumeration_order() {
        let max = max_classical_value(&yu_oh_graph()).unwrap();
        let masks: Vec<u32> = max
            .argmax
            .iter()
            .map(|a| {
                a.values()
                    .iter()
                    .fold(0u32, |m, v| (m << 1) | u32::from(*v == -1))
            })
            .collect();
        assert!(masks.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ks_colorings() {
        let g = yu_oh_graph();
        let cs = enumerate_ks_colorings(&g).unwrap();
        assert_eq!(cs.len(), 24);
        for c in &cs {
            assert!(c.is_valid(&g));
            let zs = c.get(YuOh::Z1) + c.get(YuOh::Z2) + c.get(YuOh::Z3);
            assert_eq!(zs, 1);
            assert!(!(c.get(YuOh::Z1) == 1 && c.get(YuOh::Y1Plus) == 1));
        }
        assert_eq!(max_h_sum(&cs), Some(1));
        assert_eq!(min_h_sum(&cs), Some(0));
        assert!(cs.iter().any(|c| c.h_sum() == 0));
    }

    #[test]
    fn colorings_match_unpruned_filter() {
        let g = yu_oh_graph();
        let pruned = enumerate_ks_colorings(&g).unwrap();
        let brute: Vec<[u8; 13]> = (0..SPACE)
            .map(|m| {
                let mut v = [0u8; 13];
                for (k, x) in v.iter_mut().enumerate() {
                    *x = ((m >> (12 - k)) & 1) as u8;
                }
                v
            })
            .filter(|v| is_ks_coloring(v, &g))
            .collect();
        let got: Vec<[u8; 13]> = pruned.iter().map(|c| *c.values()).collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn deterministic() {
        let g = yu_oh_graph();
        assert_eq!(
            max_classical_value(&g).unwrap(),
            max_classical_value(&g).unwrap()
        );
        assert_eq!(
            enumerate_ks_colorings(&g).unwrap(),
            enumerate_ks_colorings(&g).unwrap()
        );
    }

    #[test]
    fn wrong_size_graph() {
        let g = compatibility(&yu_oh_rays()[..12]);
        assert_eq!(
            max_classical_value(&g).unwrap_err(),
            OracleError::WrongSize(12)
        );
    }

    #[test]
    fn perturbed_graph_changes_bounds() {
        let mut rays = yu_oh_rays();
        rays[YuOh::H0.index()] = Ray::new("h0", [1, 1, 0]);
        let g = compatibility(&rays);
        assert_ne!(g.edges().len(), 24);
    }

    #[test]
    fn quarters_display() {
        assert_eq!(Quarters(33).to_string(), "33/4");
        assert_eq!(Quarters(-6).to_string(), "-3/2");
        assert_eq!(Quarters(-8).to_string(), "-2");
    }

    #[test]
    fn assignment_json_round_trip() {
        let a = Assignment::from_mask(0b1010101010101);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with("{\"z1\":-1,\"z2\":1"));
        let back: Assignment = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
