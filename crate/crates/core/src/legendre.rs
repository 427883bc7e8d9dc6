//! Invariants of a Legendre pair `X = G/P` with very ample `L_X`: the jet
//! bundle, the cohomology of `L ⊗ S^k (J^1 L)^*`, Kodaira obstructions for a
//! normal bundle, and the torsion number.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homog::{
    self, cohomology_with, CohomologyEntry, CohomologyReport, FilteredBundle, ParabolicMarking,
};
use crate::repthy::{self, Budget};
use crate::rootsys::Weight;

/// A flag variety together with the weight of `L_X`.
#[derive(Debug, Clone, Serialize)]
pub struct LegendreDatum {
    marking: Arc<ParabolicMarking>,
    line_weight: Weight,
}

impl LegendreDatum {
    /// The weight must be positive on crossed nodes and zero elsewhere.
    pub fn new(marking: Arc<ParabolicMarking>, line_weight: Weight) -> Result<Self> {
        marking.system().check_weight(&line_weight)?;
        for (i, (&c, &x)) in line_weight.coords().iter().zip(marking.crossed()).enumerate() {
            if x && c <= 0 {
                return Err(Error::InvalidDatum(format!(
                    "{line_weight} must be positive on crossed node {} for L to be very ample",
                    i + 1
                )));
            }
            if !x && c != 0 {
                return Err(Error::InvalidDatum(format!(
                    "{line_weight} must vanish on uncrossed node {}",
                    i + 1
                )));
            }
        }
        Ok(LegendreDatum {
            marking,
            line_weight,
        })
    }

    /// `X = G/P_λ` with `L = O(λ)`, for a nonzero dominant `λ`.
    pub fn from_weight(system: Arc<crate::RootSystem>, lambda: Weight) -> Result<Self> {
        let marking = crate::screener::stabilizer_marking(&system, &lambda)?;
        Self::new(Arc::new(marking), lambda)
    }

    pub fn marking(&self) -> &Arc<ParabolicMarking> {
        &self.marking
    }

    pub fn line_weight(&self) -> &Weight {
        &self.line_weight
    }
}

pub fn jet_bundle(d: &LegendreDatum) -> Result<FilteredBundle> {
    homog::jet_bundle_of(&d.marking, &d.line_weight)
}

/// `L ⊗ S^k (J^1 L)^*`.
pub fn legendre_bundle(d: &LegendreDatum, k: usize, budget: &Budget) -> Result<FilteredBundle> {
    let dual = homog::dual_bundle(&jet_bundle(d)?)?;
    homog::twist(&homog::sym_bundle(&dual, k, budget)?, &d.line_weight)
}

/// One symmetric-power level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub k: usize,
    pub report: CohomologyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegendreAnalysis {
    #[serde(rename = "dim_M", with = "crate::serde_int")]
    pub dim_m: BigInt,
    pub dim_x: usize,
    /// `h^0(L ⊗ (J^1 L)^*)`.
    pub g_ind_dim: Option<CohomologyEntry>,
    /// `h^0(L ⊗ S^2 (J^1 L)^*)`.
    pub conn_space_dim: Option<CohomologyEntry>,
    /// `h^1(L ⊗ S^2 (J^1 L)^*)`.
    pub torsion_obstruction: Option<CohomologyEntry>,
    /// `h^1(L ⊗ S^3 (J^1 L)^*)`.
    pub curvature_space: Option<CohomologyEntry>,
    pub higher: Vec<LevelReport>,
    pub kmax: usize,
    /// Set when a level could not be computed; levels below it are complete.
    pub incomplete: Option<String>,
}

impl LegendreAnalysis {
    pub fn level(&self, k: usize) -> Option<&CohomologyReport> {
        self.higher.iter().find(|l| l.k == k).map(|l| &l.report)
    }

    /// `h^1` at every completed level.
    pub fn h1(&self) -> impl Iterator<Item = (usize, CohomologyEntry)> + '_ {
        self.higher.iter().map(|l| (l.k, l.report.get(1)))
    }
}

pub fn legendre_analyze(d: &LegendreDatum, kmax: usize) -> Result<LegendreAnalysis> {
    legendre_analyze_with(d, kmax, &Budget::default())
}

pub fn legendre_analyze_with(d: &LegendreDatum, kmax: usize, budget: &Budget) -> Result<LegendreAnalysis> {
    if kmax < 1 {
        return Err(Error::InvalidDatum("kmax must be at least 1".into()));
    }
    let system = d.marking.system();
    let dim_m = repthy::weyl_dim(system, &d.line_weight)?;
    let h0 = homog::bbw_irreducible(&d.marking, &d.line_weight)?.get(0);
    if h0.exact() != Some(&dim_m) {
        return Err(Error::Inconsistent(format!(
            "dim V = {dim_m} but h^0(L) = {h0}"
        )));
    }
    let mut higher = Vec::new();
    let mut incomplete = None;
    for k in 1..=kmax {
        let step = legendre_bundle(d, k, budget).and_then(|f| cohomology_with(&f, budget));
        match step {
            Ok(report) => higher.push(LevelReport { k, report }),
            Err(e) if e.is_budget() => {
                incomplete = Some(format!("level {k}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let entry = |k: usize, q: usize| higher.iter().find(|l| l.k == k).map(|l| l.report.get(q));
    Ok(LegendreAnalysis {
        dim_x: d.marking.dim_flag(),
        g_ind_dim: entry(1, 0),
        conn_space_dim: entry(2, 0),
        torsion_obstruction: entry(2, 1),
        curvature_space: entry(3, 1),
        dim_m,
        higher,
        kmax,
        incomplete,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KodairaVerdict {
    OneFlatStructure,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KodairaAnalysis {
    #[serde(rename = "h1_N")]
    pub h1_n: CohomologyEntry,
    #[serde(rename = "h0_N")]
    pub h0_n: CohomologyEntry,
    /// `h^1(N ⊗ S^2 N^*)`.
    pub obstruction1: CohomologyEntry,
    /// `h^1(N^* ⊗ TX)`.
    pub obstruction2: CohomologyEntry,
    /// `h^0(N ⊗ N^*) + h^0(TX)`.
    pub g_dim: CohomologyEntry,
    pub verdict: KodairaVerdict,
}

pub fn kodaira_analyze(marking: &Arc<ParabolicMarking>, n: &FilteredBundle) -> Result<KodairaAnalysis> {
    kodaira_analyze_with(marking, n, &Budget::default())
}

pub fn kodaira_analyze_with(
    marking: &Arc<ParabolicMarking>,
    n: &FilteredBundle,
    budget: &Budget,
) -> Result<KodairaAnalysis> {
    if n.marking() != marking {
        return Err(Error::InvalidBundle(format!(
            "N lives on {} but the analysis is over {marking}",
            n.marking()
        )));
    }
    let n_dual = homog::dual_bundle(n)?;
    let tx = homog::tangent_bundle(marking)?;
    let base = cohomology_with(n, budget)?;
    let obs1 = cohomology_with(&homog::tensor_bundle(n, &homog::sym_bundle(&n_dual, 2, budget)?, budget)?, budget)?;
    let obs2 = cohomology_with(&homog::tensor_bundle(&n_dual, &tx, budget)?, budget)?;
    let end = cohomology_with(&homog::tensor_bundle(n, &n_dual, budget)?, budget)?;
    let aut = cohomology_with(&tx, budget)?;
    let (h1_n, obstruction1, obstruction2) = (base.get(1), obs1.get(1), obs2.get(1));
    let verdict = if h1_n.is_exact_zero() && obstruction1.is_exact_zero() && obstruction2.is_exact_zero() {
        KodairaVerdict::OneFlatStructure
    } else {
        KodairaVerdict::Inconclusive
    };
    Ok(KodairaAnalysis {
        h0_n: base.get(0),
        h1_n,
        obstruction1,
        obstruction2,
        g_dim: end.get(0).plus(&aut.get(0)),
        verdict,
    })
}

/// Largest rank of the distribution `D`, attained by the flat model.
pub fn flat_rank_d(dim_m: u64, dim_x: u64) -> Result<u64> {
    dim_m.checked_sub(dim_x + 1).ok_or_else(|| {
        Error::Torsion(format!("dim M = {dim_m} must exceed dim X = {dim_x}"))
    })
}

/// `l = (dim M - dim X - rank D - 1) / 2`.
pub fn torsion_number(dim_m: u64, dim_x: u64, rank_d: u64) -> Result<u64> {
    let num = dim_m as i128 - dim_x as i128 - rank_d as i128 - 1;
    if num < 0 {
        return Err(Error::Torsion(format!(
            "dim M - dim X - rank D - 1 = {num} is negative; the torsion number is a non-negative integer"
        )));
    }
    if num % 2 != 0 {
        return Err(Error::Torsion(format!(
            "dim M - dim X - rank D - 1 = {num} is odd; the torsion number is an integer"
        )));
    }
    Ok((num / 2) as u64)
}
