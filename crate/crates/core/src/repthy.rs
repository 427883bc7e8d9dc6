//! Finite-dimensional representations of the Levi factor of a parabolic
//! (the full group when nothing is crossed): Weyl dimensions, Freudenthal
//! weight multiplicities, and decompositions of tensor, symmetric and
//! exterior powers by highest-weight extraction.
//!
//! Coordinates on crossed nodes are central characters of the Levi; they are
//! carried along additively and never contribute to dimensions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Weight};

/// Formal character: weight -> multiplicity.
pub type Character = BTreeMap<Weight, u64>;

/// Resource limits guarding plethysm blowup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest fiber dimension a symmetric or exterior power may reach.
    pub max_fiber_dim: u64,
    /// Largest symmetric-power degree.
    pub max_k: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_fiber_dim: 5000,
            max_k: 6,
        }
    }
}

/// The reductive Levi factor: the semisimple part spanned by the uncrossed
/// nodes plus a central torus for the crossed ones.
#[derive(Debug, Clone)]
pub struct LeviContext {
    system: Arc<RootSystem>,
    uncrossed: Vec<bool>,
    levi_roots: Vec<usize>,
}

impl PartialEq for LeviContext {
    fn eq(&self, other: &Self) -> bool {
        self.system.label() == other.system.label() && self.uncrossed == other.uncrossed
    }
}

impl LeviContext {
    pub fn new(system: Arc<RootSystem>, uncrossed: Vec<bool>) -> Result<Self> {
        if uncrossed.len() != system.rank() {
            return Err(Error::InvalidMarking(format!(
                "node mask has {} entries for a rank {} system",
                uncrossed.len(),
                system.rank()
            )));
        }
        let levi_roots = system
            .positive_roots()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().zip(&uncrossed).all(|(&x, &u)| u || x == 0))
            .map(|(i, _)| i)
            .collect();
        Ok(LeviContext {
            system,
            uncrossed,
            levi_roots,
        })
    }

    /// Context for the whole group.
    pub fn full(system: Arc<RootSystem>) -> Self {
        let n = system.rank();
        Self::new(system, vec![true; n]).expect("mask length matches rank")
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    pub fn uncrossed(&self) -> &[bool] {
        &self.uncrossed
    }

    pub fn is_full(&self) -> bool {
        self.uncrossed.iter().all(|&u| u)
    }

    /// Indices (into the positive roots) of the Levi positive roots.
    pub fn levi_roots(&self) -> &[usize] {
        &self.levi_roots
    }

    pub fn check_dominant(&self, w: &Weight) -> Result<()> {
        self.system.check_weight(w)?;
        if !w.is_dominant_on(&self.uncrossed) {
            let scope = if self.is_full() {
                "all nodes".to_string()
            } else {
                let nodes: Vec<String> = (0..self.uncrossed.len())
                    .filter(|&i| self.uncrossed[i])
                    .map(|i| (i + 1).to_string())
                    .collect();
                format!("the uncrossed nodes {{{}}}", nodes.join(","))
            };
            return Err(Error::NotDominant {
                weight: w.to_string(),
                scope,
            });
        }
        Ok(())
    }

    /// Zeroes the crossed coordinates; weights differing only there have
    /// translated weight diagrams.
    fn semisimple_part(&self, w: &Weight) -> Weight {
        Weight::new(
            w.coords()
                .iter()
                .zip(&self.uncrossed)
                .map(|(&c, &u)| if u { c } else { 0 })
                .collect(),
        )
    }

    fn cache_key(&self, w: &Weight) -> (String, Vec<bool>, Weight) {
        (self.system.label(), self.uncrossed.clone(), w.clone())
    }
}

/// Weyl dimension formula over the given positive roots.
fn dimension_over(system: &RootSystem, w: &Weight, roots: &[usize]) -> BigInt {
    let rho = system.rho();
    let shifted = w.add(&rho);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for &r in roots {
        num *= system.pairing_unchecked(&shifted, r);
        den *= system.pairing_unchecked(&rho, r);
    }
    let (q, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    q
}

/// Dimension of the irreducible module with dominant highest weight `w`.
pub fn weyl_dim(system: &RootSystem, w: &Weight) -> Result<BigInt> {
    system.check_weight(w)?;
    if !w.is_dominant() {
        return Err(Error::NotDominant {
            weight: w.to_string(),
            scope: "all nodes".into(),
        });
    }
    let all: Vec<usize> = (0..system.num_positive_roots()).collect();
    Ok(dimension_over(system, w, &all))
}

/// Dimension of the Levi-irreducible module with highest weight `w`.
pub fn levi_dim(ctx: &LeviContext, w: &Weight) -> Result<BigInt> {
    ctx.check_dominant(w)?;
    Ok(dimension_over(&ctx.system, w, &ctx.levi_roots))
}

fn levi_dim_u64(ctx: &LeviContext, w: &Weight) -> Result<u64> {
    levi_dim(ctx, w)?
        .to_u64()
        .ok_or_else(|| Error::Budget(format!("dimension of {w} exceeds 64 bits")))
}

type MultisetCache = RwLock<HashMap<(String, Vec<bool>, Weight), Arc<Character>>>;

fn multiset_cache() -> &'static MultisetCache {
    static CACHE: OnceLock<MultisetCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Full weight diagram, with multiplicities, of the Levi-irreducible module
/// with highest weight `w` (Freudenthal's recursion).
pub fn weight_multiset(ctx: &LeviContext, w: &Weight) -> Result<Arc<Character>> {
    ctx.check_dominant(w)?;
    let ss = ctx.semisimple_part(w);
    let shift = w.sub(&ss);
    let key = ctx.cache_key(&ss);
    let cached = multiset_cache()
        .read()
        .expect("multiset cache poisoned")
        .get(&key)
        .cloned();
    let base = match cached {
        Some(c) => c,
        None => {
            let computed = Arc::new(freudenthal(ctx, &ss));
            multiset_cache()
                .write()
                .expect("multiset cache poisoned")
                .entry(key)
                .or_insert(computed)
                .clone()
        }
    };
    if shift.is_zero() {
        Ok(base)
    } else {
        Ok(Arc::new(
            base.iter().map(|(mu, &m)| (mu.add(&shift), m)).collect(),
        ))
    }
}

fn freudenthal(ctx: &LeviContext, top: &Weight) -> Character {
    let sys = &ctx.system;
    let n = sys.rank();
    let d = sys.symmetrizer();
    let roots: Vec<(&[i64], &Weight)> = ctx
        .levi_roots
        .iter()
        .map(|&r| {
            (
                sys.positive_roots()[r].as_slice(),
                &sys.positive_root_weights()[r],
            )
        })
        .collect();
    let top_plus_2rho = top.add(&sys.rho().scale(2));
    let simple: Vec<usize> = (0..n).filter(|&i| ctx.uncrossed[i]).collect();

    let mut mult: HashMap<Weight, u64> = HashMap::new();
    mult.insert(top.clone(), 1);
    let mut level: Vec<(Weight, Vec<i64>)> = vec![(top.clone(), vec![0; n])];
    while !level.is_empty() {
        let mut candidates: BTreeMap<Weight, Vec<i64>> = BTreeMap::new();
        for (mu, depth) in &level {
            for &i in &simple {
                let nu = mu.sub(&sys.simple_root(i));
                candidates.entry(nu).or_insert_with(|| {
                    let mut dd = depth.clone();
                    dd[i] += 1;
                    dd
                });
            }
        }
        let mut next = Vec::new();
        for (nu, depth) in candidates {
            // (top - nu, top + nu + 2 rho)
            let sum = top_plus_2rho.add(&nu);
            let den: i64 = (0..n).map(|i| depth[i] * d[i] * sum.coords()[i]).sum();
            if den <= 0 {
                continue;
            }
            let mut num: i64 = 0;
            for (rc, rw) in &roots {
                let mut j = 1i64;
                loop {
                    // stay within the cone below the highest weight
                    if (0..n).any(|i| depth[i] - j * rc[i] < 0) {
                        break;
                    }
                    let above = nu.add(&rw.scale(j));
                    if let Some(&m) = mult.get(&above) {
                        num += sys.root_weight_product(rc, &above) * m as i64;
                    }
                    j += 1;
                }
            }
            let num = 2 * num;
            debug_assert_eq!(num % den, 0, "Freudenthal quotient must be integral");
            let m = num / den;
            if m > 0 {
                mult.insert(nu.clone(), m as u64);
                next.push((nu, depth));
            }
        }
        level = next;
    }
    mult.into_iter().collect()
}

/// One summand of a decomposition, as serialized in JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleTerm {
    pub weight: Weight,
    pub multiplicity: u64,
    #[serde(with = "crate::serde_int")]
    pub dimension: BigInt,
}

/// Multiset of irreducible summands in a given Levi context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModuleDecomposition {
    pub terms: Vec<ModuleTerm>,
}

impl ModuleDecomposition {
    pub fn total_dimension(&self) -> BigInt {
        self.terms
            .iter()
            .map(|t| &t.dimension * BigInt::from(t.multiplicity))
            .sum()
    }

    /// `(highest weight, multiplicity)` pairs, sorted by weight.
    pub fn as_multiset(&self) -> BTreeMap<Weight, u64> {
        let mut m = BTreeMap::new();
        for t in &self.terms {
            *m.entry(t.weight.clone()).or_insert(0) += t.multiplicity;
        }
        m
    }
}

/// Character of a multiset of Levi-irreducibles.
pub fn character_of(ctx: &LeviContext, terms: &[(Weight, u64)]) -> Result<Character> {
    let mut ch = Character::new();
    for (w, m) in terms {
        for (mu, k) in weight_multiset(ctx, w)?.iter() {
            *ch.entry(mu.clone()).or_insert(0) += k * m;
        }
    }
    Ok(ch)
}

/// Splits a Weyl-invariant character into Levi-irreducibles, always
/// extracting the highest remaining weight (ties broken lexicographically).
pub fn decompose(ctx: &LeviContext, mut ch: Character) -> Result<ModuleDecomposition> {
    let sys = ctx.system.clone();
    ch.retain(|_, m| *m > 0);
    let mut terms = Vec::new();
    while !ch.is_empty() {
        let top = ch
            .keys()
            .max_by(|a, b| sys.height(a).cmp(&sys.height(b)).then_with(|| a.cmp(b)))
            .cloned()
            .expect("nonempty");
        let m = ch[&top];
        if !top.is_dominant_on(&ctx.uncrossed) {
            return Err(Error::Inconsistent(format!(
                "character is not Weyl-invariant: top weight {top} is not dominant"
            )));
        }
        for (mu, k) in weight_multiset(ctx, &top)?.iter() {
            let entry = ch.get_mut(mu).ok_or_else(|| {
                Error::Inconsistent(format!("weight {mu} of {top} missing from character"))
            })?;
            *entry = entry.checked_sub(k * m).ok_or_else(|| {
                Error::Inconsistent(format!("negative multiplicity at {mu}"))
            })?;
            if *entry == 0 {
                ch.remove(mu);
            }
        }
        terms.push(ModuleTerm {
            dimension: levi_dim(ctx, &top)?,
            weight: top,
            multiplicity: m,
        });
    }
    Ok(ModuleDecomposition { terms })
}

pub fn tensor_character(a: &Character, b: &Character) -> Result<Character> {
    let mut out = Character::new();
    for (u, m) in a {
        for (v, k) in b {
            let p = m
                .checked_mul(*k)
                .ok_or_else(|| Error::Budget("tensor multiplicity overflow".into()))?;
            *out.entry(u.add(v)).or_insert(0) += p;
        }
    }
    Ok(out)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Shared dynamic program for symmetric and exterior powers: each weight of
/// multiplicity `m` contributes `t` copies in `ways(m, t)` ways.
fn power_character(ch: &Character, k: usize, ways: impl Fn(u64, u64) -> Option<u64>) -> Result<Character> {
    let rank = ch.keys().next().map(|w| w.rank()).unwrap_or(0);
    let mut dp: Vec<HashMap<Weight, u64>> = vec![HashMap::new(); k + 1];
    dp[0].insert(Weight::zero(rank), 1);
    let overflow = || Error::Budget("power multiplicity overflow".into());
    for (w, &m) in ch {
        let mut next: Vec<HashMap<Weight, u64>> = vec![HashMap::new(); k + 1];
        for (j, layer) in dp.iter().enumerate() {
            for (base, &count) in layer {
                for t in 0..=(k - j) as u64 {
                    let c = ways(m, t).ok_or_else(overflow)?;
                    if c == 0 {
                        break;
                    }
                    let wt = base.add(&w.scale(t as i64));
                    let add = count.checked_mul(c).ok_or_else(overflow)?;
                    let slot = next[j + t as usize].entry(wt).or_insert(0);
                    *slot = slot.checked_add(add).ok_or_else(overflow)?;
                }
            }
        }
        dp = next;
    }
    Ok(dp.pop().unwrap_or_default().into_iter().collect())
}

/// Character of the k-th symmetric power (unordered k-selections of weights).
pub fn sym_character(ch: &Character, k: usize) -> Result<Character> {
    power_character(ch, k, |m, t| binomial(m + t - 1, t))
}

/// Character of the k-th exterior power.
pub fn ext_character(ch: &Character, k: usize) -> Result<Character> {
    power_character(ch, k, binomial)
}

pub fn character_dim(ch: &Character) -> u64 {
    ch.values().sum()
}

pub fn tensor_decompose(ctx: &LeviContext, v: &Weight, w: &Weight) -> Result<ModuleDecomposition> {
    ctx.check_dominant(v)?;
    ctx.check_dominant(w)?;
    let a = weight_multiset(ctx, v)?;
    let b = weight_multiset(ctx, w)?;
    decompose(ctx, tensor_character(&a, &b)?)
}

fn check_power_budget(ctx: &LeviContext, v: &Weight, k: usize, budget: &Budget, sym: bool) -> Result<()> {
    if k as u64 > budget.max_k as u64 {
        return Err(Error::Budget(format!(
            "power degree {k} exceeds the configured maximum {}",
            budget.max_k
        )));
    }
    let n = levi_dim_u64(ctx, v)?;
    let dim = if sym { binomial(n + k as u64 - 1, k as u64) } else { binomial(n, k as u64) };
    match dim {
        Some(d) if d <= budget.max_fiber_dim => Ok(()),
        _ => Err(Error::Budget(format!(
            "power of degree {k} of a {n}-dimensional module exceeds the fiber budget {}",
            budget.max_fiber_dim
        ))),
    }
}

/// Decomposition of `S^k` of the Levi-irreducible with highest weight `v`.
pub fn sym_power(ctx: &LeviContext, v: &Weight, k: usize, budget: &Budget) -> Result<ModuleDecomposition> {
    ctx.check_dominant(v)?;
    if k == 0 {
        return Err(Error::Budget("symmetric power degree must be at least 1".into()));
    }
    check_power_budget(ctx, v, k, budget, true)?;
    let ch = weight_multiset(ctx, v)?;
    decompose(ctx, sym_character(&ch, k)?)
}

/// Decomposition of `Λ^k` of the Levi-irreducible with highest weight `v`.
pub fn exterior_power(ctx: &LeviContext, v: &Weight, k: usize, budget: &Budget) -> Result<ModuleDecomposition> {
    ctx.check_dominant(v)?;
    check_power_budget(ctx, v, k, budget, false)?;
    let ch = weight_multiset(ctx, v)?;
    decompose(ctx, ext_character(&ch, k)?)
}

/// Highest weight of the dual module, `-w0(w)`.
pub fn dual_weight(system: &RootSystem, w: &Weight) -> Result<Weight> {
    system.check_weight(w)?;
    if !w.is_dominant() {
        return Err(Error::NotDominant {
            weight: w.to_string(),
            scope: "all nodes".into(),
        });
    }
    Ok(system.longest_element_image(w, &vec![true; system.rank()]).neg())
}

/// Highest weight of the dual of a Levi-irreducible, `-w0_L(w)`.
pub fn levi_dual(ctx: &LeviContext, w: &Weight) -> Result<Weight> {
    ctx.check_dominant(w)?;
    Ok(ctx.system.longest_element_image(w, &ctx.uncrossed).neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn full(s: &str) -> LeviContext {
        LeviContext::full(Arc::new(s.parse().unwrap()))
    }

    fn w(c: &[i64]) -> Weight {
        Weight::new(c.to_vec())
    }

    fn multiset(d: &ModuleDecomposition) -> Vec<(Vec<i64>, u64)> {
        d.as_multiset()
            .into_iter()
            .map(|(w, m)| (w.coords().to_vec(), m))
            .collect()
    }

    /// Number of semistandard Young tableaux of the given shape with entries
    /// in 1..=n: the dimension of the GL(n) module, by brute force.
    fn count_ssyt(shape: &[usize], n: usize) -> u64 {
        let cells: Vec<(usize, usize)> = shape
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
            .collect();
        let mut fill = vec![vec![0usize; shape.first().copied().unwrap_or(0)]; shape.len()];
        fn rec(i: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, n: usize) -> u64 {
            if i == cells.len() {
                return 1;
            }
            let (r, c) = cells[i];
            let mut lo = 1;
            if c > 0 {
                lo = lo.max(fill[r][c - 1]);
            }
            if r > 0 {
                lo = lo.max(fill[r - 1][c] + 1);
            }
            let mut total = 0;
            for v in lo..=n {
                fill[r][c] = v;
                total += rec(i + 1, cells, fill, n);
            }
            total
        }
        rec(0, &cells, &mut fill, n)
    }

    #[test]
    fn weyl_dim_examples() {
        let a2 = full("A2");
        assert_eq!(weyl_dim(a2.system(), &w(&[1, 1])).unwrap(), 8.into());
        assert_eq!(weyl_dim(a2.system(), &w(&[1, 2])).unwrap(), 15.into());
        let c2 = full("C2");
        assert_eq!(weyl_dim(c2.system(), &w(&[1, 1])).unwrap(), 16.into());
        for s in ["A1", "B3", "G2", "E8"] {
            let r = full(s);
            let z = Weight::zero(r.system().rank());
            assert_eq!(weyl_dim(r.system(), &z).unwrap(), 1.into());
        }
        assert!(weyl_dim(a2.system(), &w(&[-1, 1])).is_err());
    }

    #[test]
    fn weyl_dim_matches_tableaux_in_type_a() {
        // A_{n-1} weight (a_1..a_{n-1}) <-> partition with a_i columns of height i
        for n in 2..=4usize {
            let r = full(&format!("A{}", n - 1));
            let mut coords = vec![0i64; n - 1];
            loop {
                let mut shape = Vec::new();
                for row in 0..n - 1 {
                    let len: i64 = coords[row..].iter().sum();
                    if len > 0 {
                        shape.push(len as usize);
                    }
                }
                let expected = count_ssyt(&shape, n);
                let wt = Weight::new(coords.clone());
                assert_eq!(weyl_dim(r.system(), &wt).unwrap(), expected.into(), "{wt}");
                let mut k = 0;
                while k < n - 1 {
                    coords[k] += 1;
                    if coords[k] <= 3 {
                        break;
                    }
                    coords[k] = 0;
                    k += 1;
                }
                if k == n - 1 {
                    break;
                }
            }
        }
    }

    #[test]
    fn exceptional_fundamental_dims() {
        let g2 = full("G2");
        assert_eq!(weyl_dim(g2.system(), &w(&[1, 0])).unwrap(), 7.into());
        assert_eq!(weyl_dim(g2.system(), &w(&[0, 1])).unwrap(), 14.into());
        let f4 = full("F4");
        assert_eq!(weyl_dim(f4.system(), &w(&[0, 0, 0, 1])).unwrap(), 26.into());
        let e8 = full("E8");
        assert_eq!(weyl_dim(e8.system(), &w(&[0, 0, 0, 0, 0, 0, 0, 1])).unwrap(), 248.into());
    }

    #[test]
    fn levi_dim_examples() {
        let a2: Arc<RootSystem> = Arc::new("A2".parse().unwrap());
        let ctx = LeviContext::new(a2, vec![false, true]).unwrap();
        assert_eq!(levi_dim(&ctx, &w(&[-2, 1])).unwrap(), 2.into());
        assert_eq!(levi_dim(&ctx, &w(&[0, 0])).unwrap(), 1.into());
        assert!(levi_dim(&ctx, &w(&[0, -1])).is_err());
        let a3: Arc<RootSystem> = Arc::new("A3".parse().unwrap());
        let ctx = LeviContext::new(a3, vec![false, true, true]).unwrap();
        for k in -4..=4 {
            assert_eq!(levi_dim(&ctx, &w(&[k, 1, 0])).unwrap(), 3.into());
        }
    }

    #[test]
    fn weight_multiset_examples() {
        let a1 = full("A1");
        let m = weight_multiset(&a1, &w(&[2])).unwrap();
        assert_eq!(
            m.iter().map(|(k, v)| (k.coords()[0], *v)).collect::<Vec<_>>(),
            vec![(-2, 1), (0, 1), (2, 1)]
        );
        let a2 = full("A2");
        let m = weight_multiset(&a2, &w(&[1, 0])).unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.values().all(|&v| v == 1));
        let m = weight_multiset(&a2, &w(&[1, 1])).unwrap();
        assert_eq!(m.len(), 7);
        assert_eq!(m[&w(&[0, 0])], 2);
        assert_eq!(m.values().filter(|&&v| v == 1).count(), 6);
    }

    #[test]
    fn tensor_examples() {
        let a1 = full("A1");
        assert_eq!(
            multiset(&tensor_decompose(&a1, &w(&[1]), &w(&[1])).unwrap()),
            vec![(vec![0], 1), (vec![2], 1)]
        );
        let a2 = full("A2");
        assert_eq!(
            multiset(&tensor_decompose(&a2, &w(&[1, 0]), &w(&[0, 1])).unwrap()),
            vec![(vec![0, 0], 1), (vec![1, 1], 1)]
        );
        let g2 = full("G2");
        let v = w(&[1, 2]);
        let d = tensor_decompose(&g2, &v, &w(&[0, 0])).unwrap();
        assert_eq!(multiset(&d), vec![(vec![1, 2], 1)]);
    }

    #[test]
    fn sym_examples() {
        let a1 = full("A1");
        let b = Budget::default();
        assert_eq!(multiset(&sym_power(&a1, &w(&[1]), 2, &b).unwrap()), vec![(vec![2], 1)]);
        assert_eq!(
            multiset(&sym_power(&a1, &w(&[2]), 2, &b).unwrap()),
            vec![(vec![0], 1), (vec![4], 1)]
        );
        assert_eq!(multiset(&sym_power(&a1, &w(&[1]), 3, &b).unwrap()), vec![(vec![3], 1)]);
        let err = sym_power(&a1, &w(&[1]), 7, &b).unwrap_err();
        assert!(err.is_budget());
        let tight = Budget { max_fiber_dim: 3, max_k: 6 };
        assert!(sym_power(&a1, &w(&[1]), 3, &tight).unwrap_err().is_budget());
    }

    /// Brute-force S^k for sl2: enumerate unordered k-selections of basis
    /// vectors and peel highest weights off the resulting weight list.
    fn sl2_sym_oracle(top: i64, k: usize) -> Vec<(i64, u64)> {
        let basis: Vec<i64> = (0..=top).map(|i| top - 2 * i).collect();
        let mut weights = BTreeMap::new();
        fn rec(start: usize, left: usize, acc: i64, basis: &[i64], out: &mut BTreeMap<i64, u64>) {
            if left == 0 {
                *out.entry(acc).or_insert(0) += 1;
                return;
            }
            for i in start..basis.len() {
                rec(i, left - 1, acc + basis[i], basis, out);
            }
        }
        rec(0, k, 0, &basis, &mut weights);
        let mut out = Vec::new();
        while let Some((&hi, _)) = weights.iter().rev().find(|(_, &m)| m > 0) {
            let m = weights[&hi];
            let mut x = hi;
            while x >= -hi {
                *weights.get_mut(&x).unwrap() -= m;
                x -= 2;
            }
            out.push((hi, m));
            weights.retain(|_, v| *v > 0);
        }
        out.sort();
        out
    }

    #[test]
    fn sl2_plethysm_matches_brute_force() {
        let a1 = full("A1");
        let b = Budget::default();
        for top in 0..=4 {
            for k in 1..=4 {
                let d = sym_power(&a1, &w(&[top]), k, &b).unwrap();
                let got: Vec<(i64, u64)> = multiset(&d).into_iter().map(|(c, m)| (c[0], m)).collect();
                assert_eq!(got, sl2_sym_oracle(top, k), "S^{k}({top})");
            }
        }
    }

    #[test]
    fn dual_examples() {
        let a1 = full("A1");
        for k in 0..5 {
            assert_eq!(dual_weight(a1.system(), &w(&[k])).unwrap(), w(&[k]));
        }
        let a2 = full("A2");
        assert_eq!(dual_weight(a2.system(), &w(&[1, 0])).unwrap(), w(&[0, 1]));
        let c2 = full("C2");
        for a in 0..4 {
            for b2 in 0..4 {
                assert_eq!(dual_weight(c2.system(), &w(&[a, b2])).unwrap(), w(&[a, b2]));
            }
        }
        let e6 = full("E6");
        assert_eq!(
            dual_weight(e6.system(), &w(&[1, 0, 0, 0, 0, 0])).unwrap(),
            w(&[0, 0, 0, 0, 0, 1])
        );
    }

    #[test]
    fn levi_dual_of_cotangent_piece() {
        let a2: Arc<RootSystem> = Arc::new("A2".parse().unwrap());
        let ctx = LeviContext::new(a2, vec![false, true]).unwrap();
        assert_eq!(levi_dual(&ctx, &w(&[-2, 1])).unwrap(), w(&[1, 1]));
    }

    fn dominant_weights(rank: usize, max_sum: i64) -> Vec<Weight> {
        let mut out = Vec::new();
        let mut c = vec![0i64; rank];
        loop {
            if c.iter().sum::<i64>() <= max_sum {
                out.push(Weight::new(c.clone()));
            }
            let mut k = 0;
            while k < rank {
                c[k] += 1;
                if c[k] <= max_sum {
                    break;
                }
                c[k] = 0;
                k += 1;
            }
            if k == rank {
                return out;
            }
        }
    }

    #[test]
    fn exhaustive_dual_and_multiset_invariants() {
        for s in ["A1", "A2", "B2", "C2", "G2", "A3", "B3", "C3", "A4", "D4"] {
            let ctx = full(s);
            let sys = ctx.system().clone();
            let max = if sys.rank() >= 4 { 3 } else { 6 };
            for v in dominant_weights(sys.rank(), max) {
                let dv = dual_weight(&sys, &v).unwrap();
                assert_eq!(dual_weight(&sys, &dv).unwrap(), v);
                assert_eq!(weyl_dim(&sys, &v).unwrap(), weyl_dim(&sys, &dv).unwrap());
                if sys.rank() <= 3 && v.coords().iter().sum::<i64>() <= 4 {
                    let m = weight_multiset(&ctx, &v).unwrap();
                    assert_eq!(BigInt::from(character_dim(&m)), weyl_dim(&sys, &v).unwrap());
                    for (mu, k) in m.iter() {
                        for i in 0..sys.rank() {
                            assert_eq!(m.get(&sys.reflect(mu, i)), Some(k), "{s} {v} {mu}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_conservation_rank_le_3() {
        let b = Budget::default();
        for s in ["A1", "A2", "B2", "G2", "A3", "B3", "C3"] {
            let ctx = full(s);
            let sys = ctx.system().clone();
            let ws = dominant_weights(sys.rank(), 2);
            for v in &ws {
                let dv = weyl_dim(&sys, v).unwrap();
                for u in &ws {
                    let t = tensor_decompose(&ctx, v, u).unwrap();
                    assert_eq!(t.total_dimension(), &dv * weyl_dim(&sys, u).unwrap());
                    let t2 = tensor_decompose(&ctx, u, v).unwrap();
                    assert_eq!(t.as_multiset(), t2.as_multiset());
                }
                let n = dv.to_u64().unwrap();
                for k in 1..=3usize {
                    if binomial(n + k as u64 - 1, k as u64).unwrap() > b.max_fiber_dim {
                        continue;
                    }
                    let sp = sym_power(&ctx, v, k, &b).unwrap();
                    assert_eq!(sp.total_dimension(), binomial(n + k as u64 - 1, k as u64).unwrap().into());
                }
                let one = sym_power(&ctx, v, 1, &b).unwrap();
                assert_eq!(multiset(&one), vec![(v.coords().to_vec(), 1)]);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn crossed_coordinates_ride_along(shift in -5i64..5, a in 0i64..3, b2 in 0i64..3) {
            let a3: Arc<RootSystem> = Arc::new("A3".parse().unwrap());
            let ctx = LeviContext::new(a3, vec![false, true, true]).unwrap();
            let base = weight_multiset(&ctx, &w(&[0, a, b2])).unwrap();
            let moved = weight_multiset(&ctx, &w(&[shift, a, b2])).unwrap();
            prop_assert_eq!(base.len(), moved.len());
            for (mu, m) in base.iter() {
                prop_assert_eq!(moved.get(&mu.add(&w(&[shift, 0, 0]))), Some(m));
            }
        }
    }
}
