//! Tiered cohomology engine for filtered homogeneous bundles.
//!
//! Every bundle is first reduced to the Bott-Borel-Weil data of its graded
//! pieces. The spectral sequence of the filtration then bounds each
//! G-isotypic component: a differential can only cancel equal isotypes in
//! adjacent degrees. For symmetric powers of jet bundles a second spectral
//! sequence, coming from the Koszul resolution of the evaluation sequence
//! `0 -> K -> H^0(L) ⊗ O -> J^1 L -> 0`, bounds the same components, and the
//! two are intersected until nothing moves.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{bbw_data, sections, jet_bundle_of, module_bundle_pieces, FilteredBundle, ParabolicMarking, Provenance};
use crate::error::{Error, Result};
use crate::repthy::{self, Budget, Character, LeviContext};
use crate::rootsys::{RootSystem, Series, Weight};

/// A cohomology dimension: exact, or certified to lie in a closed interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CohomologyEntry {
    Exact(#[serde(with = "crate::serde_int")] BigInt),
    Interval(#[serde(with = "crate::serde_int::pair")] (BigInt, BigInt)),
}

impl CohomologyEntry {
    pub fn from_bounds(lo: BigInt, hi: BigInt) -> Self {
        if lo == hi {
            CohomologyEntry::Exact(lo)
        } else {
            CohomologyEntry::Interval((lo, hi))
        }
    }

    pub fn zero() -> Self {
        CohomologyEntry::Exact(BigInt::zero())
    }

    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            CohomologyEntry::Exact(v) => Some(v),
            CohomologyEntry::Interval(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact().is_some()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact().is_some_and(|v| v.is_zero())
    }

    pub fn lower(&self) -> &BigInt {
        match self {
            CohomologyEntry::Exact(v) => v,
            CohomologyEntry::Interval((lo, _)) => lo,
        }
    }

    pub fn upper(&self) -> &BigInt {
        match self {
            CohomologyEntry::Exact(v) => v,
            CohomologyEntry::Interval((_, hi)) => hi,
        }
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        self.lower() <= v && v <= self.upper()
    }

    /// Interval sum.
    pub fn plus(&self, other: &CohomologyEntry) -> CohomologyEntry {
        Self::from_bounds(self.lower() + other.lower(), self.upper() + other.upper())
    }
}

impl fmt::Display for CohomologyEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohomologyEntry::Exact(v) => write!(f, "{v}"),
            CohomologyEntry::Interval((lo, hi)) => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// Which part of the engine certified a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// Bott-Borel-Weil on a single Levi-irreducible.
    Exact,
    /// Graded-piece bounds only.
    Graded,
    /// All pieces with cohomology share one degree.
    Concentrated,
    /// Equivariant cancellation bounds close on every isotype.
    Isotypic,
    /// Splitting of jet bundles on the projective line.
    P1Jet,
    /// `J^1 L` is trivial.
    TrivialJet,
    /// Koszul resolution of the evaluation sequence.
    Koszul,
    /// Explicit global sections of the fiber, with Serre duality.
    Sections,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tier::Exact => "exact",
            Tier::Graded => "graded",
            Tier::Concentrated => "concentrated",
            Tier::Isotypic => "isotypic",
            Tier::P1Jet => "p1_jet",
            Tier::TrivialJet => "trivial_jet",
            Tier::Koszul => "koszul",
            Tier::Sections => "sections",
        };
        f.write_str(s)
    }
}

/// Dimensions of `H^q(X, F)` for `q = 0..=dim X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub h: BTreeMap<usize, CohomologyEntry>,
    #[serde(with = "crate::serde_int")]
    pub euler: BigInt,
    pub tier: Tier,
}

impl CohomologyReport {
    fn from_exact(dims: Vec<BigInt>, tier: Tier) -> Self {
        let euler = alternating(&dims);
        CohomologyReport {
            h: dims
                .into_iter()
                .enumerate()
                .map(|(q, d)| (q, CohomologyEntry::Exact(d)))
                .collect(),
            euler,
            tier,
        }
    }

    /// `h^q`; degrees beyond `dim X` are exactly zero.
    pub fn get(&self, q: usize) -> CohomologyEntry {
        self.h.get(&q).cloned().unwrap_or_else(CohomologyEntry::zero)
    }

    pub fn is_exact(&self) -> bool {
        self.h.values().all(|e| e.is_exact())
    }

    /// Exact dimensions, when every degree is exact.
    pub fn exact_dims(&self) -> Option<Vec<BigInt>> {
        self.h.values().map(|e| e.exact().cloned()).collect()
    }
}

impl fmt::Display for CohomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, e) in &self.h {
            write!(f, "h^{q} = {e}  ")?;
        }
        write!(f, "euler = {}  tier = {}", self.euler, self.tier)
    }
}

fn alternating(dims: &[BigInt]) -> BigInt {
    dims.iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (q, d)| if q % 2 == 0 { acc + d } else { acc - d })
}

/// Degree and G-highest weight of the cohomology of one Levi-irreducible.
pub fn bbw_module(marking: &ParabolicMarking, w: &Weight) -> Result<Option<(usize, Weight)>> {
    marking.levi().check_dominant(w)?;
    Ok(bbw_data(marking.system(), w))
}

pub fn bbw_irreducible(marking: &ParabolicMarking, w: &Weight) -> Result<CohomologyReport> {
    let n = marking.dim_flag();
    let mut dims = vec![BigInt::zero(); n + 1];
    if let Some((q, mu)) = bbw_module(marking, w)? {
        dims[q] = repthy::weyl_dim(marking.system(), &mu)?;
    }
    Ok(CohomologyReport::from_exact(dims, Tier::Exact))
}

/// The graded-piece report: per-degree sums of piece cohomology as upper
/// bounds, tightened by the exact Euler characteristic.
pub fn graded_report(f: &FilteredBundle) -> Result<CohomologyReport> {
    let marking = f.marking();
    let n = marking.dim_flag();
    let mut hi = vec![BigInt::zero(); n + 1];
    for p in f.pieces() {
        if let Some((q, mu)) = bbw_data(marking.system(), &p.weight) {
            hi[q] += repthy::weyl_dim(marking.system(), &mu)? * BigInt::from(p.multiplicity);
        }
    }
    let euler = alternating(&hi);
    let mut lo = vec![BigInt::zero(); n + 1];
    euler_tighten(&euler, &mut lo, &mut hi)?;
    Ok(CohomologyReport {
        h: (0..=n)
            .map(|q| (q, CohomologyEntry::from_bounds(lo[q].clone(), hi[q].clone())))
            .collect(),
        euler,
        tier: Tier::Graded,
    })
}

fn euler_tighten(euler: &BigInt, lo: &mut [BigInt], hi: &mut [BigInt]) -> Result<()> {
    loop {
        let mut changed = false;
        for q in 0..lo.len() {
            // (-1)^q h_q = euler - sum_{p != q} (-1)^p h_p
            let (mut rest_lo, mut rest_hi) = (BigInt::zero(), BigInt::zero());
            for p in (0..lo.len()).filter(|&p| p != q) {
                if p % 2 == 0 {
                    rest_lo += &lo[p];
                    rest_hi += &hi[p];
                } else {
                    rest_lo -= &hi[p];
                    rest_hi -= &lo[p];
                }
            }
            let (new_lo, new_hi) = if q % 2 == 0 {
                (euler - rest_hi, euler - rest_lo)
            } else {
                (rest_lo - euler, rest_hi - euler)
            };
            if new_lo > lo[q] {
                lo[q] = new_lo;
                changed = true;
            }
            if new_hi < hi[q] {
                hi[q] = new_hi;
                changed = true;
            }
            if lo[q] > hi[q] {
                return Err(Error::Inconsistent(format!(
                    "degree {q}: Euler characteristic {euler} is incompatible with the graded bounds"
                )));
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Tightens bounds on `h_t = n_t - r_{t-1} - r_t`, where the `r_t >= 0` are
/// ranks of maps between consecutive positions and `r_{-1} = r_last = 0`.
/// A forward and a backward pass make the chain arc consistent, so the
/// returned bounds are the exact projections. Returns whether anything moved.
fn chain_bounds(n: &[i64], lo: &mut [i64], hi: &mut [i64]) -> Result<bool> {
    let len = n.len();
    let m = len.saturating_sub(1);
    let mut rlo = vec![0i64; m];
    let mut rhi: Vec<i64> = (0..m).map(|t| n[t].min(n[t + 1])).collect();
    let av: Vec<i64> = (0..len).map(|t| n[t] - hi[t]).collect();
    let bv: Vec<i64> = (0..len).map(|t| n[t] - lo[t]).collect();
    let a = |t: usize| av[t];
    let b = |t: usize| bv[t];
    let clash = |t: usize| Error::Inconsistent(format!("rank constraints at position {t} have no solution"));
    for t in 0..m {
        let (plo, phi) = if t == 0 { (0, 0) } else { (rlo[t - 1], rhi[t - 1]) };
        rlo[t] = rlo[t].max(a(t) - phi);
        rhi[t] = rhi[t].min(b(t) - plo);
        if rlo[t] > rhi[t] {
            return Err(clash(t));
        }
    }
    for t in (1..len).rev() {
        let (nlo, nhi) = if t < m { (rlo[t], rhi[t]) } else { (0, 0) };
        rlo[t - 1] = rlo[t - 1].max(a(t) - nhi);
        rhi[t - 1] = rhi[t - 1].min(b(t) - nlo);
        if rlo[t - 1] > rhi[t - 1] {
            return Err(clash(t));
        }
    }
    let mut changed = false;
    for t in 0..len {
        let (plo, phi) = if t == 0 { (0, 0) } else { (rlo[t - 1], rhi[t - 1]) };
        let (nlo, nhi) = if t < m { (rlo[t], rhi[t]) } else { (0, 0) };
        let smin = a(t).max(plo + nlo);
        let smax = b(t).min(phi + nhi);
        if smin > smax {
            return Err(clash(t));
        }
        let (new_lo, new_hi) = (n[t] - smax, n[t] - smin);
        if new_lo > lo[t] {
            lo[t] = new_lo;
            changed = true;
        }
        if new_hi < hi[t] {
            hi[t] = new_hi;
            changed = true;
        }
    }
    Ok(changed)
}

/// Per-isotype bounds for one bundle.
#[derive(Debug, Clone)]
struct IsoRow {
    /// Graded-piece counts per degree.
    n: Vec<i64>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IsoRow {
    fn empty(len: usize) -> Self {
        IsoRow {
            n: vec![0; len],
            lo: vec![0; len],
            hi: vec![0; len],
        }
    }

    fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

#[derive(Debug, Clone)]
struct IsoTable {
    rows: BTreeMap<Weight, IsoRow>,
    /// Degrees occupied by pieces with nonzero cohomology.
    degrees: BTreeSet<usize>,
}

fn to_i64(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Budget("multiplicity exceeds 64-bit range".into()))
}

fn iso_table(marking: &ParabolicMarking, pieces: &[(Weight, u64)]) -> Result<IsoTable> {
    let len = marking.dim_flag() + 1;
    let mut rows: BTreeMap<Weight, IsoRow> = BTreeMap::new();
    let mut degrees = BTreeSet::new();
    for (w, m) in pieces {
        if let Some((q, mu)) = bbw_data(marking.system(), w) {
            let row = rows.entry(mu).or_insert_with(|| IsoRow::empty(len));
            row.n[q] += to_i64(*m)?;
            degrees.insert(q);
        }
    }
    for row in rows.values_mut() {
        row.hi = row.n.clone();
        chain_bounds(&row.n, &mut row.lo, &mut row.hi)?;
    }
    Ok(IsoTable { rows, degrees })
}

fn raw_pieces(f: &FilteredBundle) -> Vec<(Weight, u64)> {
    f.pieces()
        .iter()
        .map(|p| (p.weight.clone(), p.multiplicity))
        .collect()
}

fn dimension_report(
    system: &RootSystem,
    table: &IsoTable,
    len: usize,
    euler: BigInt,
    tier: Tier,
) -> Result<CohomologyReport> {
    let mut lo = vec![BigInt::zero(); len];
    let mut hi = vec![BigInt::zero(); len];
    for (mu, row) in &table.rows {
        let d = repthy::weyl_dim(system, mu)?;
        for q in 0..len {
            lo[q] += &d * BigInt::from(row.lo[q]);
            hi[q] += &d * BigInt::from(row.hi[q]);
        }
    }
    Ok(CohomologyReport {
        h: (0..len)
            .map(|q| (q, CohomologyEntry::from_bounds(lo[q].clone(), hi[q].clone())))
            .collect(),
        euler,
        tier,
    })
}

/// Intersects a report with the graded-piece intervals.
fn meet(report: &mut CohomologyReport, graded: &CohomologyReport) -> Result<()> {
    for (q, e) in report.h.iter_mut() {
        let g = graded.get(*q);
        let lo = e.lower().max(g.lower()).clone();
        let hi = e.upper().min(g.upper()).clone();
        if lo > hi {
            return Err(Error::Inconsistent(format!("degree {q}: tier bounds do not overlap")));
        }
        *e = CohomologyEntry::from_bounds(lo, hi);
    }
    Ok(())
}

pub fn cohomology(f: &FilteredBundle) -> Result<CohomologyReport> {
    cohomology_with(f, &Budget::default())
}

/// Best certified report for `f`.
pub fn cohomology_with(f: &FilteredBundle, budget: &Budget) -> Result<CohomologyReport> {
    let graded = graded_report(f)?;
    let marking = f.marking();
    if let Provenance::Jet { line } = f.provenance() {
        let zero = Weight::zero(line.rank());
        if let Some(r) = structural(marking, line, 1, false, &zero, budget)? {
            return Ok(r);
        }
    }
    if let Provenance::SymOfJet { line, k, dual, twist } = f.provenance() {
        if let Some(r) = structural(marking, line, *k, *dual, twist, budget)? {
            return Ok(r);
        }
    }
    if f.pieces().len() == 1 && f.pieces()[0].multiplicity == 1 {
        return bbw_irreducible(marking, &f.pieces()[0].weight);
    }
    let len = marking.dim_flag() + 1;
    let mut table = iso_table(marking, &raw_pieces(f))?;
    if table.degrees.len() <= 1 {
        return dimension_report(marking.system(), &table, len, graded.euler, Tier::Concentrated);
    }
    let mut tier = Tier::Isotypic;
    if !table.rows.values().all(IsoRow::is_exact) {
        tier = Tier::Graded;
        let jet = match f.provenance() {
            Provenance::SymOfJet { line, k, dual, twist } => Some((line.clone(), *k, *dual, twist.clone())),
            Provenance::Jet { line } => Some((line.clone(), 1, false, Weight::zero(line.rank()))),
            _ => None,
        };
        if let Some((line, k, dual, twist)) = jet {
            if refine_with_sections(marking, &mut table, &line, k, dual, &twist, budget)?
                && table.rows.values().all(IsoRow::is_exact)
            {
                tier = Tier::Sections;
            } else if let Some(counts) = koszul_counts(marking, &line, k, dual, &twist, budget)? {
                refine_with_koszul(&mut table, &counts, len)?;
                if table.rows.values().all(IsoRow::is_exact) {
                    tier = Tier::Koszul;
                }
            }
        }
    }
    let mut report = dimension_report(marking.system(), &table, len, graded.euler.clone(), tier)?;
    meet(&mut report, &graded)?;
    Ok(report)
}

fn is_projective_line(marking: &ParabolicMarking) -> bool {
    matches!(
        marking.system().simple_type(),
        Some(t) if t.series == Series::A && t.rank == 1
    )
}

/// Closed forms: jets on the projective line and trivial jet bundles.
fn structural(
    marking: &ParabolicMarking,
    line: &Weight,
    k: usize,
    dual: bool,
    twist: &Weight,
    budget: &Budget,
) -> Result<Option<CohomologyReport>> {
    if !marking.is_line_weight(line) || !marking.is_line_weight(twist) {
        return Ok(None);
    }
    let sign = if dual { -1 } else { 1 };
    if is_projective_line(marking) {
        let a = line.coords()[0];
        // J^1 O(a) = O(a-1)^2 for a != 0, and O ⊕ O(-2) for a = 0.
        let (x, y) = if a == 0 { (0, -2) } else { (a - 1, a - 1) };
        let (x, y) = (sign * x, sign * y);
        let mut dims = vec![BigInt::zero(); 2];
        for i in 0..=k as i64 {
            let d = i * x + (k as i64 - i) * y + twist.coords()[0];
            if d >= 0 {
                dims[0] += d + 1;
            } else if d <= -2 {
                dims[1] += -d - 1;
            }
        }
        return Ok(Some(CohomologyReport::from_exact(dims, Tier::P1Jet)));
    }
    if !line.is_dominant() {
        return Ok(None);
    }
    let v_dim = repthy::weyl_dim(marking.system(), line)?;
    if v_dim != BigInt::from(marking.dim_flag() + 1) {
        return Ok(None);
    }
    // J^1 L = H^0(L) ⊗ O, so the bundle is S^k H^0(L)^(*) ⊗ O(twist).
    let base = bbw_irreducible(marking, twist)?;
    let n = v_dim.to_u64().unwrap_or(u64::MAX);
    let sym = binomial_big(n + k as u64 - 1, k as u64);
    if sym > BigInt::from(budget.max_fiber_dim) * 1000 {
        return Ok(None);
    }
    let dims = base
        .exact_dims()
        .expect("line bundle cohomology is exact")
        .into_iter()
        .map(|d| d * &sym)
        .collect();
    Ok(Some(CohomologyReport::from_exact(dims, Tier::TrivialJet)))
}

fn binomial_big(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// E1 counts of the Koszul spectral sequence, per G-isotype, indexed by total
/// degree offset by `j` (position `d + j` holds total degree `d`). `None` for
/// an isotype means some auxiliary contribution was only an interval.
type KoszulCounts = BTreeMap<Weight, Option<Vec<i64>>>;

const TENSOR_BUDGET_FACTOR: u64 = 50;

fn koszul_counts(
    marking: &ParabolicMarking,
    line: &Weight,
    j: usize,
    dual: bool,
    twist: &Weight,
    budget: &Budget,
) -> Result<Option<(KoszulCounts, usize)>> {
    match koszul_counts_inner(marking, line, j, dual, twist, budget) {
        Err(e) if e.is_budget() => Ok(None),
        other => other,
    }
}

fn koszul_counts_inner(
    marking: &ParabolicMarking,
    line: &Weight,
    j: usize,
    dual: bool,
    twist: &Weight,
    budget: &Budget,
) -> Result<Option<(KoszulCounts, usize)>> {
    let system = marking.system();
    let positive_on_crossed = line
        .coords()
        .iter()
        .zip(marking.crossed())
        .all(|(&c, &x)| if x { c > 0 } else { c == 0 });
    if j == 0 || !positive_on_crossed || !marking.is_line_weight(twist) {
        return Ok(None);
    }
    let levi = marking.levi();
    let full = LeviContext::full(system.clone());
    let v_dim = repthy::weyl_dim(system, line)?;
    let v_dim_u = v_dim
        .to_u64()
        .filter(|&d| d <= budget.max_fiber_dim)
        .ok_or_else(|| Error::Budget("H^0(L) too large for the Koszul chase".into()))?;

    // gr K = gr V - gr J^1 L
    let mut k_pieces = module_bundle_pieces(marking, line)?;
    for p in jet_bundle_of(&std::sync::Arc::new(marking.clone()), line)?.pieces() {
        let slot = k_pieces.get_mut(&p.weight);
        match slot {
            Some(m) if *m >= p.multiplicity => *m -= p.multiplicity,
            _ => return Ok(None),
        }
    }
    k_pieces.retain(|_, m| *m > 0);
    let k_pieces: Vec<(Weight, u64)> = k_pieces
        .into_iter()
        .map(|(w, m)| {
            if dual {
                repthy::levi_dual(levi, &w).map(|d| (d, m))
            } else {
                Ok((w, m))
            }
        })
        .collect::<Result<_>>()?;
    let k_char = repthy::character_of(levi, &k_pieces)?;
    let k_rank = repthy::character_dim(&k_char);

    let v_char = repthy::weight_multiset(&full, line)?;
    let v_char: Character = if dual {
        v_char.iter().map(|(w, m)| (w.neg(), *m)).collect()
    } else {
        (*v_char).clone()
    };

    let len = marking.dim_flag() + 1;
    // total degrees run over -j..=dim X + j
    let width = len + 2 * j;
    let mut lo: BTreeMap<Weight, Vec<i64>> = BTreeMap::new();
    let mut hi: BTreeMap<Weight, Vec<i64>> = BTreeMap::new();
    for i in 0..=j {
        if i as u64 > k_rank {
            break;
        }
        let ext_dim = binomial_big(k_rank, i as u64);
        if ext_dim > BigInt::from(budget.max_fiber_dim) {
            return Err(Error::Budget(format!("Λ^{i} K exceeds the fiber budget")));
        }
        let ext = repthy::ext_character(&k_char, i)?;
        let shifted: Character = ext.iter().map(|(w, m)| (w.add(twist), *m)).collect();
        let aux = repthy::decompose(levi, shifted)?;
        let aux_pieces: Vec<(Weight, u64)> = aux.terms.into_iter().map(|t| (t.weight, t.multiplicity)).collect();
        let aux_table = iso_table(marking, &aux_pieces)?;

        let s = j - i;
        let sym_dim = binomial_big(v_dim_u + s as u64 - 1, s as u64);
        if sym_dim > BigInt::from(budget.max_fiber_dim) {
            return Err(Error::Budget(format!("S^{s} H^0(L) exceeds the fiber budget")));
        }
        let sym = if s == 0 {
            std::iter::once((Weight::zero(system.rank()), 1)).collect()
        } else {
            repthy::sym_character(&v_char, s)?
        };
        let position = if dual { i as i64 } else { -(i as i64) };
        let mut cache: HashMap<Weight, BTreeMap<Weight, u64>> = HashMap::new();
        for (rho, row) in &aux_table.rows {
            if row.hi.iter().all(|&h| h == 0) {
                continue;
            }
            if !cache.contains_key(rho) {
                let rho_dim = repthy::weyl_dim(system, rho)?;
                if &sym_dim * &rho_dim > BigInt::from(budget.max_fiber_dim * TENSOR_BUDGET_FACTOR) {
                    return Err(Error::Budget("Koszul term exceeds the tensor budget".into()));
                }
                let prod = repthy::tensor_character(&sym, &*repthy::weight_multiset(&full, rho)?)?;
                cache.insert(rho.clone(), repthy::decompose(&full, prod)?.as_multiset());
            }
            for (nu, c) in &cache[rho] {
                let c = to_i64(*c)?;
                let l = lo.entry(nu.clone()).or_insert_with(|| vec![0; width]);
                let h = hi.entry(nu.clone()).or_insert_with(|| vec![0; width]);
                for q in 0..len {
                    let slot = (position + q as i64 + j as i64) as usize;
                    l[slot] += c * row.lo[q];
                    h[slot] += c * row.hi[q];
                }
            }
        }
    }
    let counts = lo
        .into_iter()
        .map(|(nu, l)| {
            let exact = hi[&nu] == l;
            (nu, exact.then_some(l))
        })
        .collect();
    Ok(Some((counts, j)))
}

/// Pins `H^0` and, through Serre duality, `H^top` of every ambiguous isotype
/// by computing invariants in the explicit fiber. Returns whether it ran.
fn refine_with_sections(
    marking: &ParabolicMarking,
    table: &mut IsoTable,
    line: &Weight,
    k: usize,
    dual: bool,
    twist: &Weight,
    budget: &Budget,
) -> Result<bool> {
    match refine_with_sections_inner(marking, table, line, k, dual, twist, budget) {
        Err(e) if e.is_budget() => Ok(false),
        other => other,
    }
}

fn refine_with_sections_inner(
    marking: &ParabolicMarking,
    table: &mut IsoTable,
    line: &Weight,
    k: usize,
    dual: bool,
    twist: &Weight,
    budget: &Budget,
) -> Result<bool> {
    let very_ample = line
        .coords()
        .iter()
        .zip(marking.crossed())
        .all(|(&c, &x)| if x { c > 0 } else { c == 0 });
    if !very_ample || !marking.is_line_weight(twist) {
        return Ok(false);
    }
    let top = marking.dim_flag();
    let pending = |row: &IsoRow, q: usize| row.n[q] > 0 && row.lo[q] < row.hi[q];
    if !table.rows.values().any(|r| pending(r, 0) || pending(r, top)) {
        return Ok(false);
    }
    let jet_dual = sections::dual_jet_fiber(marking, line, budget.max_fiber_dim)?;
    let jet = jet_dual.dual();
    let (fiber, serre_fiber) = if dual { (jet_dual, jet) } else { (jet, jet_dual) };
    let max_terms = budget.max_fiber_dim * TENSOR_BUDGET_FACTOR;
    let direct = sections::SymFiber::new(fiber, k, twist, max_terms)?;
    let serre_twist = marking.canonical_weight().sub(twist);
    let serre = sections::SymFiber::new(serre_fiber, k, &serre_twist, max_terms)?;
    let system = marking.system();
    for (mu, row) in table.rows.iter_mut() {
        if pending(row, 0) {
            pin(mu, row, 0, direct.sections(mu, marking.crossed()))?;
        }
        if pending(row, top) {
            let mu_star = repthy::dual_weight(system, mu)?;
            pin(mu, row, top, serre.sections(&mu_star, marking.crossed()))?;
        }
        chain_bounds(&row.n, &mut row.lo, &mut row.hi)?;
    }
    Ok(true)
}

fn pin(mu: &Weight, row: &mut IsoRow, q: usize, h: usize) -> Result<()> {
    let h = h as i64;
    if h < row.lo[q] || h > row.hi[q] {
        return Err(Error::Inconsistent(format!(
            "explicit sections of isotype {mu} in degree {q} fall outside [{}, {}]",
            row.lo[q], row.hi[q]
        )));
    }
    row.lo[q] = h;
    row.hi[q] = h;
    Ok(())
}

fn refine_with_koszul(table: &mut IsoTable, koszul: &(KoszulCounts, usize), len: usize) -> Result<()> {
    let (counts, j) = koszul;
    let width = len + 2 * j;
    for (nu, n) in counts {
        if n.is_some() && !table.rows.contains_key(nu) {
            table.rows.insert(nu.clone(), IsoRow::empty(len));
        }
    }
    let zero = vec![0i64; width];
    for (nu, row) in table.rows.iter_mut() {
        let kn = match counts.get(nu) {
            Some(Some(n)) => n,
            Some(None) => continue,
            None => &zero,
        };
        loop {
            let mut klo = vec![0i64; width];
            let mut khi = vec![0i64; width];
            klo[*j..*j + len].copy_from_slice(&row.lo);
            khi[*j..*j + len].copy_from_slice(&row.hi);
            let moved_k = chain_bounds(kn, &mut klo, &mut khi)?;
            if klo[..*j].iter().chain(&klo[*j + len..]).any(|&x| x != 0) {
                return Err(Error::Inconsistent("Koszul chase leaves cohomology outside 0..=dim X".into()));
            }
            row.lo.copy_from_slice(&klo[*j..*j + len]);
            row.hi.copy_from_slice(&khi[*j..*j + len]);
            let moved_f = chain_bounds(&row.n, &mut row.lo, &mut row.hi)?;
            if !moved_k && !moved_f {
                break;
            }
        }
    }
    Ok(())
}
