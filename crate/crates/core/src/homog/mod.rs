//! Generalized flag varieties `G/P` and homogeneous vector bundles on them.
//!
//! A homogeneous bundle is recorded through the graded pieces of its
//! P-module filtration: Levi-irreducible weights with multiplicities. The
//! crossed coordinates of a piece are the line-bundle twist it carries.

mod engine;
mod sections;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::notation::format_marking_mask;
use crate::repthy::{self, Budget, Character, LeviContext};
use crate::rootsys::{Chamber, RootSystem, Weight};

pub use engine::{
    bbw_irreducible, bbw_module, cohomology, cohomology_with, graded_report, CohomologyEntry,
    CohomologyReport, Tier,
};

/// Crossed nodes of a Dynkin diagram, i.e. a parabolic subgroup `P`.
#[derive(Debug, Clone)]
pub struct ParabolicMarking {
    system: Arc<RootSystem>,
    crossed: Vec<bool>,
    levi: LeviContext,
    nilradical: Vec<usize>,
}

impl PartialEq for ParabolicMarking {
    fn eq(&self, other: &Self) -> bool {
        self.system.label() == other.system.label() && self.crossed == other.crossed
    }
}

impl ParabolicMarking {
    pub fn new(system: Arc<RootSystem>, crossed: Vec<bool>) -> Result<Self> {
        if crossed.len() != system.rank() {
            return Err(Error::InvalidMarking(format!(
                "{} nodes given for {} of rank {}",
                crossed.len(),
                system.label(),
                system.rank()
            )));
        }
        if !crossed.iter().any(|&c| c) {
            return Err(Error::InvalidMarking(
                "at least one node must be crossed (P must be proper)".into(),
            ));
        }
        let uncrossed: Vec<bool> = crossed.iter().map(|&c| !c).collect();
        let levi = LeviContext::new(system.clone(), uncrossed)?;
        let nilradical = system
            .positive_roots()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().zip(&crossed).any(|(&x, &m)| m && x > 0))
            .map(|(i, _)| i)
            .collect();
        Ok(ParabolicMarking {
            system,
            crossed,
            levi,
            nilradical,
        })
    }

    /// Marking given by 0-based crossed node indices.
    pub fn from_nodes(system: Arc<RootSystem>, nodes: &[usize]) -> Result<Self> {
        let mut crossed = vec![false; system.rank()];
        for &i in nodes {
            if i >= crossed.len() {
                return Err(Error::InvalidMarking(format!(
                    "node {} out of range 1..={}",
                    i + 1,
                    crossed.len()
                )));
            }
            crossed[i] = true;
        }
        Self::new(system, crossed)
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    pub fn crossed(&self) -> &[bool] {
        &self.crossed
    }

    pub fn levi(&self) -> &LeviContext {
        &self.levi
    }

    /// Indices of the positive roots in the nilradical of `P`.
    pub fn nilradical(&self) -> &[usize] {
        &self.nilradical
    }

    pub fn dim_flag(&self) -> usize {
        self.nilradical.len()
    }

    /// Weight of the canonical bundle: minus the sum of the nilradical roots.
    pub fn canonical_weight(&self) -> Weight {
        let weights = self.system.positive_root_weights();
        self.nilradical
            .iter()
            .fold(Weight::zero(self.system.rank()), |acc, &i| acc.sub(&weights[i]))
    }

    /// True when `w` vanishes on every uncrossed node, i.e. is a character of `P`.
    pub fn is_line_weight(&self, w: &Weight) -> bool {
        w.coords().iter().zip(&self.crossed).all(|(&c, &x)| x || c == 0)
    }

    /// Grading of a weight by the crossed simple roots (sum of its crossed
    /// simple-root coordinates).
    pub fn crossed_level(&self, w: &Weight) -> Rational64 {
        self.system
            .root_coords(w)
            .into_iter()
            .zip(&self.crossed)
            .filter(|(_, &x)| x)
            .fold(Rational64::zero(), |a, (c, _)| a + c)
    }

    /// `xo` form of the marking.
    pub fn code(&self) -> String {
        format_marking_mask(&self.crossed)
    }
}

impl fmt::Display for ParabolicMarking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.system.label(), self.code())
    }
}

impl Serialize for ParabolicMarking {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ParabolicMarking", 3)?;
        st.serialize_field("system", &self.system.label())?;
        st.serialize_field("crossed", &self.code())?;
        st.serialize_field("dim_flag", &self.dim_flag())?;
        st.end()
    }
}

/// One graded piece: a Levi-irreducible with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub weight: Weight,
    pub multiplicity: u64,
    #[serde(with = "crate::serde_int")]
    pub dimension: BigInt,
}

/// How a bundle was built; the engine's structural tiers key off this.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Irreducible,
    Cotangent,
    Tangent,
    /// `J^1 L` for the line bundle with the given weight.
    Jet { line: Weight },
    /// `twist ⊗ S^k(J^1 L)` or, when `dual`, `twist ⊗ S^k((J^1 L)^*)`.
    SymOfJet {
        line: Weight,
        k: usize,
        dual: bool,
        twist: Weight,
    },
    Tensor,
    Custom,
}

/// A homogeneous bundle described by its graded pieces.
#[derive(Debug, Clone, Serialize)]
pub struct FilteredBundle {
    marking: Arc<ParabolicMarking>,
    pieces: Vec<Piece>,
    provenance: Provenance,
}

impl PartialEq for FilteredBundle {
    fn eq(&self, other: &Self) -> bool {
        self.marking == other.marking
            && self.pieces == other.pieces
            && self.provenance == other.provenance
    }
}

impl FilteredBundle {
    /// Builds a bundle from raw `(weight, multiplicity)` pieces. Equal weights
    /// are merged and the pieces sorted by crossed level.
    pub fn new(
        marking: Arc<ParabolicMarking>,
        pieces: Vec<(Weight, u64)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut merged: std::collections::BTreeMap<Weight, u64> = Default::default();
        for (w, m) in pieces {
            if m == 0 {
                continue;
            }
            marking.levi.check_dominant(&w).map_err(|e| match e {
                Error::NotDominant { weight, scope } => Error::InvalidBundle(format!(
                    "piece {weight} is not dominant on {scope}"
                )),
                e => e,
            })?;
            *merged.entry(w).or_insert(0) += m;
        }
        if merged.is_empty() {
            return Err(Error::InvalidBundle("a bundle needs positive rank".into()));
        }
        let mut out = Vec::with_capacity(merged.len());
        for (weight, multiplicity) in merged {
            out.push(Piece {
                dimension: repthy::levi_dim(&marking.levi, &weight)?,
                weight,
                multiplicity,
            });
        }
        out.sort_by(|a, b| {
            marking
                .crossed_level(&a.weight)
                .cmp(&marking.crossed_level(&b.weight))
                .then_with(|| a.weight.cmp(&b.weight))
        });
        Ok(FilteredBundle {
            marking,
            pieces: out,
            provenance,
        })
    }

    fn from_character(
        marking: &Arc<ParabolicMarking>,
        ch: Character,
        provenance: Provenance,
    ) -> Result<Self> {
        let dec = repthy::decompose(&marking.levi, ch)?;
        let pieces = dec
            .terms
            .into_iter()
            .map(|t| (t.weight, t.multiplicity))
            .collect();
        Self::new(marking.clone(), pieces, provenance)
    }

    pub fn marking(&self) -> &Arc<ParabolicMarking> {
        &self.marking
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn rank(&self) -> BigInt {
        self.pieces
            .iter()
            .map(|p| &p.dimension * BigInt::from(p.multiplicity))
            .sum()
    }

    /// Weight character of the associated graded Levi module.
    pub fn character(&self) -> Result<Character> {
        let terms: Vec<(Weight, u64)> = self
            .pieces
            .iter()
            .map(|p| (p.weight.clone(), p.multiplicity))
            .collect();
        repthy::character_of(&self.marking.levi, &terms)
    }

    fn check_fiber(&self, what: &str, dim: Option<u64>, budget: &Budget) -> Result<()> {
        match dim {
            Some(d) if d <= budget.max_fiber_dim => Ok(()),
            _ => Err(Error::Budget(format!(
                "{what} of a rank {} bundle exceeds the fiber budget {}",
                self.rank(),
                budget.max_fiber_dim
            ))),
        }
    }
}

fn same_marking(a: &FilteredBundle, b: &FilteredBundle) -> Result<()> {
    if a.marking != b.marking {
        return Err(Error::InvalidBundle(format!(
            "bundles live on different flag varieties ({} and {})",
            a.marking, b.marking
        )));
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// The line bundle, or Levi-irreducible bundle, with the given weight.
pub fn irreducible_bundle(marking: &Arc<ParabolicMarking>, w: &Weight) -> Result<FilteredBundle> {
    FilteredBundle::new(marking.clone(), vec![(w.clone(), 1)], Provenance::Irreducible)
}

/// Bundle from explicit pieces, e.g. a direct sum of line bundles.
pub fn custom_bundle(
    marking: &Arc<ParabolicMarking>,
    pieces: Vec<(Weight, u64)>,
) -> Result<FilteredBundle> {
    FilteredBundle::new(marking.clone(), pieces, Provenance::Custom)
}

fn nilradical_bundle(marking: &Arc<ParabolicMarking>, sign: i64, prov: Provenance) -> Result<FilteredBundle> {
    let weights = marking.system.positive_root_weights();
    let mut ch = Character::new();
    for &i in &marking.nilradical {
        *ch.entry(weights[i].scale(sign)).or_insert(0) += 1;
    }
    FilteredBundle::from_character(marking, ch, prov)
}

/// `Ω¹X`: Levi decomposition of the negated nilradical roots.
pub fn cotangent_bundle(marking: &Arc<ParabolicMarking>) -> Result<FilteredBundle> {
    nilradical_bundle(marking, -1, Provenance::Cotangent)
}

/// `TX`: Levi decomposition of the nilradical roots.
pub fn tangent_bundle(marking: &Arc<ParabolicMarking>) -> Result<FilteredBundle> {
    nilradical_bundle(marking, 1, Provenance::Tangent)
}

pub fn tensor_bundle(a: &FilteredBundle, b: &FilteredBundle, budget: &Budget) -> Result<FilteredBundle> {
    same_marking(a, b)?;
    let dim = a.rank() * b.rank();
    a.check_fiber("tensor product", dim.try_into().ok(), budget)?;
    let ch = repthy::tensor_character(&a.character()?, &b.character()?)?;
    FilteredBundle::from_character(&a.marking, ch, Provenance::Tensor)
}

/// `S^k F`; the graded pieces are `S^k` of the associated graded.
pub fn sym_bundle(f: &FilteredBundle, k: usize, budget: &Budget) -> Result<FilteredBundle> {
    if k == 0 {
        return irreducible_bundle(&f.marking, &Weight::zero(f.marking.system.rank()));
    }
    if k as u64 > budget.max_k as u64 {
        return Err(Error::Budget(format!(
            "symmetric power degree {k} exceeds the configured maximum {}",
            budget.max_k
        )));
    }
    let n: Option<u64> = f.rank().try_into().ok();
    f.check_fiber(
        &format!("S^{k}"),
        n.and_then(|n| binomial(n + k as u64 - 1, k as u64)),
        budget,
    )?;
    let ch = repthy::sym_character(&f.character()?, k)?;
    let prov = match &f.provenance {
        Provenance::Jet { line } => Provenance::SymOfJet {
            line: line.clone(),
            k,
            dual: false,
            twist: Weight::zero(line.rank()),
        },
        Provenance::SymOfJet { line, k: 1, dual, twist } if twist.is_zero() => Provenance::SymOfJet {
            line: line.clone(),
            k,
            dual: *dual,
            twist: twist.clone(),
        },
        _ => Provenance::Tensor,
    };
    FilteredBundle::from_character(&f.marking, ch, prov)
}

/// `Λ^k F`.
pub fn exterior_bundle(f: &FilteredBundle, k: usize, budget: &Budget) -> Result<FilteredBundle> {
    let n: Option<u64> = f.rank().try_into().ok();
    f.check_fiber(&format!("Λ^{k}"), n.and_then(|n| binomial(n, k as u64)), budget)?;
    let ch = repthy::ext_character(&f.character()?, k)?;
    if ch.is_empty() {
        return Err(Error::InvalidBundle(format!(
            "Λ^{k} of a rank {} bundle is zero",
            f.rank()
        )));
    }
    FilteredBundle::from_character(&f.marking, ch, Provenance::Tensor)
}

/// `F^*`: piecewise Levi duals.
pub fn dual_bundle(f: &FilteredBundle) -> Result<FilteredBundle> {
    let mut pieces = Vec::with_capacity(f.pieces.len());
    for p in &f.pieces {
        pieces.push((repthy::levi_dual(&f.marking.levi, &p.weight)?, p.multiplicity));
    }
    let prov = match &f.provenance {
        Provenance::Irreducible => Provenance::Irreducible,
        Provenance::Cotangent => Provenance::Tangent,
        Provenance::Tangent => Provenance::Cotangent,
        Provenance::Jet { line } => Provenance::SymOfJet {
            line: line.clone(),
            k: 1,
            dual: true,
            twist: Weight::zero(line.rank()),
        },
        Provenance::SymOfJet { line, k, dual, twist } if twist.is_zero() => {
            if *k == 1 && *dual {
                Provenance::Jet { line: line.clone() }
            } else {
                Provenance::SymOfJet {
                    line: line.clone(),
                    k: *k,
                    dual: !dual,
                    twist: twist.clone(),
                }
            }
        }
        Provenance::Custom => Provenance::Custom,
        _ => Provenance::Tensor,
    };
    FilteredBundle::new(f.marking.clone(), pieces, prov)
}

/// `F ⊗ O(line)`; the weight must be a character of `P`.
pub fn twist(f: &FilteredBundle, line: &Weight) -> Result<FilteredBundle> {
    f.marking.system.check_weight(line)?;
    if !f.marking.is_line_weight(line) {
        return Err(Error::InvalidBundle(format!(
            "{line} is not a line-bundle weight on {}: it must vanish on uncrossed nodes",
            f.marking
        )));
    }
    let pieces = f
        .pieces
        .iter()
        .map(|p| (p.weight.add(line), p.multiplicity))
        .collect();
    let prov = match &f.provenance {
        Provenance::Irreducible => Provenance::Irreducible,
        Provenance::Jet { line: l } => Provenance::SymOfJet {
            line: l.clone(),
            k: 1,
            dual: false,
            twist: line.clone(),
        },
        Provenance::SymOfJet { line: l, k, dual, twist } => Provenance::SymOfJet {
            line: l.clone(),
            k: *k,
            dual: *dual,
            twist: twist.add(line),
        },
        Provenance::Custom => Provenance::Custom,
        _ => Provenance::Tensor,
    };
    FilteredBundle::new(f.marking.clone(), pieces, prov)
}

/// `J¹L`: `Ω¹X ⊗ L` followed by `L`.
pub fn jet_bundle_of(marking: &Arc<ParabolicMarking>, line: &Weight) -> Result<FilteredBundle> {
    let omega = twist(&cotangent_bundle(marking)?, line)?;
    let mut pieces: Vec<(Weight, u64)> = omega
        .pieces
        .iter()
        .map(|p| (p.weight.clone(), p.multiplicity))
        .collect();
    pieces.push((line.clone(), 1));
    FilteredBundle::new(marking.clone(), pieces, Provenance::Jet { line: line.clone() })
}

/// Levi pieces of the trivial bundle `V_λ ⊗ O` for dominant `λ`.
pub(crate) fn module_bundle_pieces(marking: &ParabolicMarking, lambda: &Weight) -> Result<Character> {
    let full = LeviContext::full(marking.system.clone());
    let ch = repthy::weight_multiset(&full, lambda)?;
    let dec = repthy::decompose(&marking.levi, (*ch).clone())?;
    Ok(dec.as_multiset().into_iter().collect())
}

/// Chamber data for a shifted weight: degree and G-highest weight of the
/// only nonvanishing cohomology, if any.
pub(crate) fn bbw_data(system: &RootSystem, w: &Weight) -> Option<(usize, Weight)> {
    let mu = w.add(&system.rho());
    match system.walk(&mu, &vec![true; system.rank()]) {
        Chamber::Singular => None,
        Chamber::Regular { dominant, word } => Some((word.len(), dominant.sub(&system.rho()))),
    }
}
