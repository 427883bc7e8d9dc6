//! Screening irreducible representations as candidate holonomies.
//!
//! A dominant weight `λ` of a semisimple `G` gives `X = G/P_λ` (the orbit of
//! the highest weight line) and `L_X = O(λ)`. The Legendre analysis of that
//! pair is then sorted into a proxy classification:
//!
//! 1. `enlargement` when `h^0(L ⊗ (J^1 L)^*) > dim G + 1`;
//! 2. `very_little_torsion_candidate` when `h^1(L ⊗ S^2 (J^1 L)^*) > 0`;
//! 3. `flat_only` when every computed `h^1` vanishes;
//! 4. `torsion_free_with_curvature` when `h^1(L ⊗ S^3 (J^1 L)^*) > 0`;
//! 5. `torsion_free_rigid` when `h^0(L ⊗ S^2 (J^1 L)^*) = 0`;
//! 6. `torsion_free_with_curvature` otherwise.
//!
//! Each rule reads only exact entries. If a rule needs an entry that is an
//! interval, the verdict is `undecided`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homog::{CohomologyEntry, ParabolicMarking};
use crate::legendre::{legendre_analyze_with, LegendreAnalysis, LegendreDatum};
use crate::repthy::{self, Budget};
use crate::rootsys::{RootSystem, Series, SimpleType, Weight};

/// The parabolic fixing the highest weight line: its crossed nodes are the
/// support of the weight.
pub fn stabilizer_marking(system: &Arc<RootSystem>, highest_weight: &Weight) -> Result<ParabolicMarking> {
    system.check_weight(highest_weight)?;
    if !highest_weight.is_dominant() {
        return Err(Error::NotDominant {
            weight: highest_weight.to_string(),
            scope: "all nodes".into(),
        });
    }
    if highest_weight.is_zero() {
        return Err(Error::TrivialWeight);
    }
    ParabolicMarking::from_nodes(system.clone(), &highest_weight.support())
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    #[serde(serialize_with = "system_label")]
    pub system: Arc<RootSystem>,
    pub highest_weight: Weight,
    #[serde(serialize_with = "marking_code")]
    pub marking: Arc<ParabolicMarking>,
    #[serde(with = "crate::serde_int")]
    pub dim_rep: BigInt,
}

fn system_label<S: serde::Serializer>(s: &Arc<RootSystem>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&s.label())
}

fn marking_code<S: serde::Serializer>(m: &Arc<ParabolicMarking>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&m.code())
}

impl Candidate {
    pub fn new(system: Arc<RootSystem>, highest_weight: Weight) -> Result<Self> {
        let marking = Arc::new(stabilizer_marking(&system, &highest_weight)?);
        let dim_rep = repthy::weyl_dim(&system, &highest_weight)?;
        Ok(Candidate {
            system,
            highest_weight,
            marking,
            dim_rep,
        })
    }

    /// `dim G`: number of roots plus rank.
    pub fn dim_group(&self) -> usize {
        self.system.dim_algebra()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    FlatOnly,
    TorsionFreeRigid,
    TorsionFreeWithCurvature,
    VeryLittleTorsionCandidate,
    Enlargement,
    Undecided,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::FlatOnly => "flat_only",
            Classification::TorsionFreeRigid => "torsion_free_rigid",
            Classification::TorsionFreeWithCurvature => "torsion_free_with_curvature",
            Classification::VeryLittleTorsionCandidate => "very_little_torsion_candidate",
            Classification::Enlargement => "enlargement",
            Classification::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreenVerdict {
    pub candidate: Candidate,
    pub dim_group: usize,
    pub analysis: Option<LegendreAnalysis>,
    pub classification: Classification,
    #[serde(with = "opt_int")]
    pub enlargement_target_dim: Option<BigInt>,
    pub diagnostics: Vec<String>,
}

mod opt_int {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => crate::serde_int::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}

/// Outcome of the classification rules on one analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub classification: Classification,
    pub enlargement_target_dim: Option<BigInt>,
    pub diagnostics: Vec<String>,
}

fn undecided(why: String) -> Decision {
    Decision {
        classification: Classification::Undecided,
        enlargement_target_dim: None,
        diagnostics: vec![why],
    }
}

fn need<'a>(entry: &'a Option<CohomologyEntry>, name: &str) -> std::result::Result<&'a BigInt, Decision> {
    match entry {
        None => Err(undecided(format!("{name} was not computed"))),
        Some(CohomologyEntry::Exact(v)) => Ok(v),
        Some(e) => Err(undecided(format!("{name} is only known to lie in {e}"))),
    }
}

/// Applies the classification rules to an analysis.
pub fn classify(analysis: &LegendreAnalysis, dim_group: usize) -> Decision {
    match classify_inner(analysis, dim_group) {
        Ok(d) | Err(d) => d,
    }
}

fn classify_inner(a: &LegendreAnalysis, dim_group: usize) -> std::result::Result<Decision, Decision> {
    let done = |c: Classification| Decision {
        classification: c,
        enlargement_target_dim: None,
        diagnostics: Vec::new(),
    };
    let g = need(&a.g_ind_dim, "g_ind_dim")?;
    if *g > BigInt::from(dim_group + 1) {
        return Ok(Decision {
            classification: Classification::Enlargement,
            enlargement_target_dim: Some(g.clone()),
            diagnostics: Vec::new(),
        });
    }
    if !need(&a.torsion_obstruction, "torsion_obstruction")?.is_zero() {
        return Ok(done(Classification::VeryLittleTorsionCandidate));
    }
    let mut nonzero = false;
    let mut open = None;
    for (k, e) in a.h1() {
        match e.exact() {
            Some(v) if !v.is_zero() => nonzero = true,
            Some(_) => {}
            None => open = Some(format!("h^1 at level {k} is only known to lie in {e}")),
        }
    }
    if !nonzero {
        if let Some(why) = open {
            return Err(undecided(why));
        }
        if let Some(why) = &a.incomplete {
            return Err(undecided(why.clone()));
        }
        return Ok(done(Classification::FlatOnly));
    }
    if !need(&a.curvature_space, "curvature_space")?.is_zero() {
        return Ok(done(Classification::TorsionFreeWithCurvature));
    }
    if need(&a.conn_space_dim, "conn_space_dim")?.is_zero() {
        return Ok(done(Classification::TorsionFreeRigid));
    }
    Ok(done(Classification::TorsionFreeWithCurvature))
}

pub fn screen(candidate: &Candidate, kmax: usize) -> ScreenVerdict {
    screen_with(candidate, kmax, &Budget::default())
}

pub fn screen_with(candidate: &Candidate, kmax: usize, budget: &Budget) -> ScreenVerdict {
    let dim_group = candidate.dim_group();
    let analysis = LegendreDatum::new(candidate.marking.clone(), candidate.highest_weight.clone())
        .and_then(|d| legendre_analyze_with(&d, kmax, budget));
    match analysis {
        Ok(a) => {
            let d = classify(&a, dim_group);
            ScreenVerdict {
                candidate: candidate.clone(),
                dim_group,
                analysis: Some(a),
                classification: d.classification,
                enlargement_target_dim: d.enlargement_target_dim,
                diagnostics: d.diagnostics,
            }
        }
        Err(e) => ScreenVerdict {
            candidate: candidate.clone(),
            dim_group,
            analysis: None,
            classification: Classification::Undecided,
            enlargement_target_dim: None,
            diagnostics: vec![e.to_string()],
        },
    }
}

/// How a printed table row compares with the computed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Match,
    /// The printed dimension disagrees with the printed label.
    Mismatch,
    /// The label is printed identically on rows with different dimensions.
    AmbiguousLabel,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub group: &'static str,
    pub system: String,
    /// Node labels as printed, left to right.
    pub printed_label: Vec<i64>,
    /// The label translated to Bourbaki numbering.
    pub weight: Weight,
    #[serde(with = "crate::serde_int")]
    pub dimension: BigInt,
    #[serde(with = "crate::serde_int")]
    pub printed_dimension: BigInt,
    pub status: RowStatus,
}

struct PrintedRow {
    label: Vec<i64>,
    dim: BigInt,
}

/// Node permutation under which every printed label has its printed
/// dimension, found by trying all permutations of the nodes.
pub fn convention_map(system: &RootSystem, rows: &[(Vec<i64>, BigInt)]) -> Option<Vec<usize>> {
    let n = system.rank();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let fits = rows.iter().all(|(label, dim)| {
            let w = apply_map(&perm, label);
            repthy::weyl_dim(system, &w).ok().as_ref() == Some(dim)
        });
        if fits {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn apply_map(perm: &[usize], label: &[i64]) -> Weight {
    let mut c = vec![0; label.len()];
    for (i, &p) in perm.iter().enumerate() {
        c[p] = label[i];
    }
    Weight::new(c)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Sample values of `k` at which the symbolic rows are evaluated.
const SL2_LEVELS: std::ops::RangeInclusive<i64> = 4..=7;
const SL2_SL2_LEVELS: std::ops::RangeInclusive<i64> = 2..=5;

/// Dimensions of the representations in the holonomy table.
pub fn table_dims() -> Result<Vec<TableRow>> {
    let mut out = Vec::new();
    let fixed: [(&'static str, Series, Vec<PrintedRow>); 3] = [
        (
            "SL(3)",
            Series::A,
            vec![
                PrintedRow { label: vec![1, 1], dim: 8.into() },
                PrintedRow { label: vec![1, 2], dim: 15.into() },
            ],
        ),
        (
            "Sp(4)",
            Series::C,
            vec![
                PrintedRow { label: vec![1, 1], dim: 16.into() },
                PrintedRow { label: vec![2, 0], dim: 14.into() },
                PrintedRow { label: vec![3, 0], dim: 30.into() },
            ],
        ),
        (
            "G2",
            Series::G,
            vec![
                PrintedRow { label: vec![0, 2], dim: 27.into() },
                PrintedRow { label: vec![0, 3], dim: 77.into() },
            ],
        ),
    ];
    for (group, series, rows) in fixed {
        let system = RootSystem::build(series, 2)?;
        let pairs: Vec<(Vec<i64>, BigInt)> = rows.iter().map(|r| (r.label.clone(), r.dim.clone())).collect();
        let perm = convention_map(&system, &pairs).unwrap_or_else(|| vec![0, 1]);
        for r in rows {
            let weight = apply_map(&perm, &r.label);
            let dimension = repthy::weyl_dim(&system, &weight)?;
            let status = if dimension == r.dim { RowStatus::Match } else { RowStatus::Mismatch };
            out.push(TableRow {
                group,
                system: system.label(),
                printed_label: r.label,
                weight,
                dimension,
                printed_dimension: r.dim,
                status,
            });
        }
    }
    let a1 = RootSystem::build(Series::A, 1)?;
    for k in SL2_LEVELS {
        let weight = Weight::new(vec![k]);
        let dimension = repthy::weyl_dim(&a1, &weight)?;
        let printed = BigInt::from(k * (k + 1) / 2);
        out.push(TableRow {
            group: "SL(2)",
            system: a1.label(),
            printed_label: vec![k],
            status: if dimension == printed { RowStatus::Match } else { RowStatus::Mismatch },
            weight,
            dimension,
            printed_dimension: printed,
        });
    }
    let a1a1 = RootSystem::from_components(vec![SimpleType::new(Series::A, 1)?; 2])?;
    for k in SL2_SL2_LEVELS {
        let weight = Weight::new(vec![1, k]);
        let dimension = repthy::weyl_dim(&a1a1, &weight)?;
        // Both rows print the label 1 ⊗ k.
        for printed in [BigInt::from(2 * k + 2), BigInt::from(3 * k + 3)] {
            let status = if dimension == printed { RowStatus::AmbiguousLabel } else { RowStatus::Mismatch };
            out.push(TableRow {
                group: "SL(2)xSL(2)",
                system: a1a1.label(),
                printed_label: vec![1, k],
                weight: weight.clone(),
                dimension: dimension.clone(),
                printed_dimension: printed,
                status,
            });
        }
    }
    Ok(out)
}

/// Every simple type the builder accepts, of rank at most `max_rank`.
pub fn simple_types(max_rank: usize) -> Vec<SimpleType> {
    let mut out = Vec::new();
    for series in [Series::A, Series::B, Series::C, Series::D, Series::E, Series::F, Series::G] {
        for rank in 1..=max_rank {
            if let Ok(t) = SimpleType::new(series, rank) {
                out.push(t);
            }
        }
    }
    out.sort();
    out
}

/// Nonzero dominant weights with coordinate sum at most `max_level`, in
/// lexicographic order.
pub fn dominant_weights(rank: usize, max_level: u32) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if i == cur.len() {
            if cur.iter().any(|&c| c > 0) {
                out.push(Weight::new(cur.clone()));
            }
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_level as i64, &mut cur, &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub max_rank: usize,
    pub max_level: u32,
    pub kmax: usize,
    pub jobs: usize,
    pub budget: Budget,
}

/// Screens every candidate in range; output order is independent of `jobs`.
pub fn sweep(config: &SweepConfig) -> Result<Vec<ScreenVerdict>> {
    use rayon::prelude::*;
    let mut work: Vec<(Arc<RootSystem>, Weight)> = Vec::new();
    for t in simple_types(config.max_rank) {
        let system = Arc::new(RootSystem::from_components(vec![t])?);
        for w in dominant_weights(t.rank, config.max_level) {
            work.push((system.clone(), w));
        }
    }
    let run = |(system, w): &(Arc<RootSystem>, Weight)| match Candidate::new(system.clone(), w.clone()) {
        Ok(c) => screen_with(&c, config.kmax, &config.budget),
        Err(e) => unreachable!("enumerated weights are dominant and nonzero: {e}"),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::Budget(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| work.par_iter().map(run).collect()))
}
