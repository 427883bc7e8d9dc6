//! Root systems of the simple series (and block-diagonal products of them),
//! integral weights in fundamental-weight coordinates, and the Weyl-chamber
//! walk used by Bott-Borel-Weil.
//!
//! Conventions: nodes are numbered as in Bourbaki (0-based in code), and the
//! Cartan matrix is stored as `cartan[i][j] = <alpha_i^vee, alpha_j>`, so the
//! simple root `alpha_j` written in fundamental coordinates is column `j`.
//! The symmetrizer `d_i = (alpha_i, alpha_i) / 2` is normalised so that short
//! roots have `d = 1`, which keeps every inner product used here integral.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Series> {
        Some(match c.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            _ => return None,
        })
    }
}

/// One simple factor: a series letter together with its rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimpleType {
    pub series: Series,
    pub rank: usize,
}

impl SimpleType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let bad = |constraint| Error::InvalidSystem {
            series: series.letter(),
            rank,
            constraint,
        };
        match series {
            Series::A if rank < 1 => return Err(bad("series A requires rank >= 1")),
            Series::B if rank < 2 => return Err(bad("series B requires rank >= 2")),
            Series::C if rank < 2 => return Err(bad("series C requires rank >= 2")),
            Series::D if rank < 3 => return Err(bad("series D requires rank >= 3")),
            Series::E if !(6..=8).contains(&rank) => {
                return Err(bad("series E exists only in ranks 6, 7 and 8"))
            }
            Series::F if rank != 4 => return Err(bad("series F exists only in rank 4")),
            Series::G if rank != 2 => return Err(bad("series G exists only in rank 2")),
            _ => {}
        }
        Ok(SimpleType { series, rank })
    }

    fn cartan(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.series {
            Series::A | Series::B | Series::C => {
                for i in 0..n - 1 {
                    link(i, i + 1);
                }
            }
            Series::D => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            Series::E => {
                // Bourbaki: 1-3-4-5-6(-7-8) with 2 attached to 4.
                link(0, 2);
                link(1, 3);
                for i in 2..n - 1 {
                    link(i, i + 1);
                }
            }
            Series::F | Series::G => {
                for i in 0..n - 1 {
                    link(i, i + 1);
                }
            }
        }
        match self.series {
            // alpha_n short
            Series::B => a[n - 1][n - 2] = -2,
            // alpha_n long
            Series::C => a[n - 2][n - 1] = -2,
            // alpha_1, alpha_2 long; alpha_3, alpha_4 short
            Series::F => a[2][1] = -2,
            // alpha_1 short, alpha_2 long
            Series::G => a[0][1] = -3,
            _ => {}
        }
        a
    }

    fn symmetrizer(&self) -> Vec<i64> {
        let n = self.rank;
        match self.series {
            Series::A | Series::D | Series::E => vec![1; n],
            Series::B => {
                let mut d = vec![2; n];
                d[n - 1] = 1;
                d
            }
            Series::C => {
                let mut d = vec![1; n];
                d[n - 1] = 2;
                d
            }
            Series::F => vec![2, 2, 1, 1],
            Series::G => vec![1, 3],
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

/// An integral weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn new(coords: Vec<i64>) -> Self {
        Weight(coords)
    }

    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The fundamental weight `omega_i` (0-based).
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Weight(c)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Dominance restricted to the nodes where `mask` is true.
    pub fn is_dominant_on(&self, mask: &[bool]) -> bool {
        self.0.iter().zip(mask).all(|(&c, &m)| !m || c >= 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> Weight {
        self.scale(-1)
    }

    /// Indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0).collect()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Parses `[a,b,...]`; whitespace around entries is allowed.
    fn from_str(s: &str) -> Result<Weight> {
        crate::notation::parse_weight_at(s, 0)
    }
}

/// Outcome of walking a weight into the dominant chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chamber {
    Regular {
        dominant: Weight,
        /// Simple reflections applied, in order.
        word: Vec<usize>,
    },
    Singular,
}

impl Chamber {
    pub fn length(&self) -> Option<usize> {
        match self {
            Chamber::Regular { word, .. } => Some(word.len()),
            Chamber::Singular => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    components: Vec<SimpleType>,
    cartan: Vec<Vec<i64>>,
    symmetrizer: Vec<i64>,
    positive_roots: Vec<Vec<i64>>,
    root_weights: Vec<Weight>,
    root_norms: Vec<i64>,
    inverse_cartan: Vec<Vec<Rational64>>,
    height_functional: Vec<i64>,
}

impl RootSystem {
    /// Builds the simple root system of the given series and rank.
    pub fn build(series: Series, rank: usize) -> Result<RootSystem> {
        Self::from_components(vec![SimpleType::new(series, rank)?])
    }

    /// Builds a semisimple system with a block-diagonal Cartan matrix.
    pub fn from_components(components: Vec<SimpleType>) -> Result<RootSystem> {
        if components.is_empty() {
            return Err(Error::InvalidSystem {
                series: '?',
                rank: 0,
                constraint: "a root system needs at least one simple factor",
            });
        }
        let rank: usize = components.iter().map(|c| c.rank).sum();
        let mut cartan = vec![vec![0i64; rank]; rank];
        let mut symmetrizer = Vec::with_capacity(rank);
        let mut offset = 0;
        for comp in &components {
            let block = comp.cartan();
            for i in 0..comp.rank {
                for j in 0..comp.rank {
                    cartan[offset + i][offset + j] = block[i][j];
                }
            }
            symmetrizer.extend(comp.symmetrizer());
            offset += comp.rank;
        }
        let positive_roots = generate_positive_roots(&cartan);
        let root_weights = positive_roots
            .iter()
            .map(|c| root_to_weight(&cartan, c))
            .collect();
        let root_norms = positive_roots
            .iter()
            .map(|c| {
                let mut s = 0;
                for i in 0..rank {
                    for j in 0..rank {
                        s += c[i] * c[j] * symmetrizer[i] * cartan[i][j];
                    }
                }
                s / 2
            })
            .collect();
        let inverse_cartan = invert(&cartan);
        let height_functional = scaled_column_sums(&inverse_cartan);
        Ok(RootSystem {
            components,
            cartan,
            symmetrizer,
            positive_roots,
            root_weights,
            root_norms,
            inverse_cartan,
            height_functional,
        })
    }

    pub fn components(&self) -> &[SimpleType] {
        &self.components
    }

    /// The single simple type, when the system is simple.
    pub fn simple_type(&self) -> Option<SimpleType> {
        match self.components.as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    /// Positive roots in simple-root coordinates, ordered by height.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    /// Positive roots in fundamental-weight coordinates (same order).
    pub fn positive_root_weights(&self) -> &[Weight] {
        &self.root_weights
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    /// Dimension of the Lie algebra: number of roots plus rank.
    pub fn dim_algebra(&self) -> usize {
        2 * self.num_positive_roots() + self.rank()
    }

    /// Highest root of a simple system (the unique maximal positive root).
    pub fn highest_root(&self) -> Option<&[i64]> {
        self.simple_type()?;
        self.positive_roots.last().map(|r| r.as_slice())
    }

    pub fn simple_root(&self, i: usize) -> Weight {
        Weight((0..self.rank()).map(|r| self.cartan[r][i]).collect())
    }

    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank()])
    }

    pub fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch {
                weight: w.to_string(),
                got: w.rank(),
                expected: self.rank(),
            });
        }
        Ok(())
    }

    /// `<w, alpha^vee>` for the positive root with the given index.
    pub fn pairing(&self, w: &Weight, root: usize) -> Result<i64> {
        self.check_weight(w)?;
        if root >= self.positive_roots.len() {
            return Err(Error::RootIndex {
                index: root,
                count: self.positive_roots.len(),
            });
        }
        Ok(self.pairing_unchecked(w, root))
    }

    pub(crate) fn pairing_unchecked(&self, w: &Weight, root: usize) -> i64 {
        let c = &self.positive_roots[root];
        let num: i64 = (0..self.rank())
            .map(|j| c[j] * self.symmetrizer[j] * w.0[j])
            .sum();
        num / self.root_norms[root]
    }

    /// Inner product `(sum_i c_i alpha_i, w)` of a root-lattice element given in
    /// simple-root coordinates with a weight.
    pub fn root_weight_product(&self, root_coords: &[i64], w: &Weight) -> i64 {
        (0..self.rank())
            .map(|j| root_coords[j] * self.symmetrizer[j] * w.0[j])
            .sum()
    }

    /// Coordinates of a weight on the basis of simple roots.
    pub fn root_coords(&self, w: &Weight) -> Vec<Rational64> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                (0..n).fold(Rational64::zero(), |acc, j| {
                    acc + self.inverse_cartan[i][j] * Rational64::from(w.0[j])
                })
            })
            .collect()
    }

    /// Integer functional on weights that is a positive multiple of the height
    /// on the root lattice; used to pick highest weights.
    pub fn height(&self, w: &Weight) -> i64 {
        self.height_functional
            .iter()
            .zip(&w.0)
            .map(|(h, c)| h * c)
            .sum()
    }

    /// Simple reflection `s_i(w) = w - <w, alpha_i^vee> alpha_i`.
    pub fn reflect(&self, w: &Weight, i: usize) -> Weight {
        let k = w.0[i];
        Weight(
            (0..self.rank())
                .map(|r| w.0[r] - k * self.cartan[r][i])
                .collect(),
        )
    }

    /// Walks `w` into the dominant chamber, always reflecting at the
    /// lowest-index node with negative coordinate.
    pub fn to_dominant_chamber(&self, w: &Weight) -> Result<Chamber> {
        self.check_weight(w)?;
        Ok(self.walk(w, &vec![true; self.rank()]))
    }

    /// Chamber walk for the Weyl group generated by the masked nodes.
    pub(crate) fn walk(&self, w: &Weight, mask: &[bool]) -> Chamber {
        let mut cur = w.clone();
        let mut word = Vec::new();
        loop {
            let neg = (0..self.rank()).find(|&i| mask[i] && cur.0[i] < 0);
            match neg {
                Some(i) => {
                    cur = self.reflect(&cur, i);
                    word.push(i);
                }
                None => break,
            }
        }
        if (0..self.rank()).any(|i| mask[i] && cur.0[i] == 0) {
            Chamber::Singular
        } else {
            Chamber::Regular {
                dominant: cur,
                word,
            }
        }
    }

    /// Image of `w` under the longest element of the Weyl group of the masked
    /// nodes: walk to the anti-dominant chamber.
    pub(crate) fn longest_element_image(&self, w: &Weight, mask: &[bool]) -> Weight {
        let mut cur = w.clone();
        while let Some(i) = (0..self.rank()).find(|&i| mask[i] && cur.0[i] > 0) {
            cur = self.reflect(&cur, i);
        }
        cur
    }

    /// Short textual name, e.g. `A2` or `A1xA1`.
    pub fn label(&self) -> String {
        self.components
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Node indices belonging to each simple factor.
    pub fn component_nodes(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for c in &self.components {
            out.push((offset..offset + c.rank).collect());
            offset += c.rank;
        }
        out
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for RootSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<RootSystem> {
        crate::notation::parse_system_at(s, 0)
    }
}

fn root_to_weight(cartan: &[Vec<i64>], c: &[i64]) -> Weight {
    let n = cartan.len();
    Weight(
        (0..n)
            .map(|r| (0..n).map(|j| c[j] * cartan[r][j]).sum())
            .collect(),
    )
}

/// Positive roots by root-string closure from the simple roots.
fn generate_positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let mut known: HashSet<Vec<i64>> = HashSet::new();
    let mut layer: BTreeSet<Vec<i64>> = BTreeSet::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        layer.insert(e);
    }
    let mut roots = Vec::new();
    while !layer.is_empty() {
        for r in &layer {
            known.insert(r.clone());
        }
        let mut next = BTreeSet::new();
        for beta in &layer {
            for i in 0..n {
                // p = largest p with beta - p alpha_i a root
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if known.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..n).map(|j| beta[j] * cartan[i][j]).sum();
                let q = p - pairing;
                if q > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !known.contains(&up) {
                        next.insert(up);
                    }
                }
            }
        }
        roots.extend(layer);
        layer = next;
    }
    roots
}

fn scaled_column_sums(inv: &[Vec<Rational64>]) -> Vec<i64> {
    let n = inv.len();
    let sums: Vec<Rational64> = (0..n)
        .map(|j| (0..n).fold(Rational64::zero(), |acc, i| acc + inv[i][j]))
        .collect();
    let denom = sums
        .iter()
        .fold(1i64, |acc, s| num_integer::lcm(acc, *s.denom()));
    sums.iter()
        .map(|s| (s * Rational64::from(denom)).to_integer())
        .collect()
}

fn invert(m: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .map(|row| row.iter().map(|&x| Rational64::from(x)).collect())
        .collect();
    let mut inv: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational64::one() } else { Rational64::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrices are nonsingular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * x;
                    inv[r][j] -= f * y;
                }
            }
        }
    }
    inv
}
