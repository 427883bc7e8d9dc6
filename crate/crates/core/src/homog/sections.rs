//! Global sections by Frobenius reciprocity.
//!
//! For a homogeneous bundle with fiber `E` over `G/P`, the multiplicity of
//! `V_μ` in `H^0` is the dimension of
//! `{ e ∈ E_μ : e_i e = 0 for uncrossed i, f_i^(μ_i + 1) e = 0 for all i }`.
//! The fiber of `(J^1 L)^*` is the span of the evaluation functional and its
//! first derivatives inside `H^0(L)^*`, so everything reduces to explicit
//! matrices for one irreducible module, built here from the Cartan matrix.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::ParabolicMarking;
use crate::error::{Error, Result};
use crate::linalg::{self, Echelon, Q};
use crate::repthy::{self, LeviContext};
use crate::rootsys::{RootSystem, Weight};

type Mat = Vec<Vec<Q>>;

fn zero_vec(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

fn unit(n: usize, t: usize) -> Vec<Q> {
    let mut v = zero_vec(n);
    v[t] = Q::from_integer(BigInt::from(1));
    v
}

fn mat_vec(m: &Mat, v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(Q::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

/// `-(φ ∘ m)` for a row vector `φ`.
fn neg_row_mat(phi: &[Q], m: &Mat, cols: usize) -> Vec<Q> {
    let mut out = zero_vec(cols);
    for (p, row) in phi.iter().zip(m) {
        if p.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            if !x.is_zero() {
                *o -= p * x;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Space {
    dim: usize,
    /// `e_j : V_ν -> V_{ν+α_j}`.
    e: Vec<Option<Mat>>,
    /// `f_i : V_{ν+α_i} -> V_ν`.
    f_from_above: Vec<Option<Mat>>,
}

/// Irreducible highest-weight module with explicit Chevalley generators.
///
/// Below the top, a vector is determined by its images under the raising
/// operators, so each weight space is built from the ones above it.
#[derive(Debug, Clone)]
pub(crate) struct HighestWeightModule {
    highest: Weight,
    spaces: Vec<Space>,
    index: HashMap<Weight, usize>,
    simple: Vec<Weight>,
}

impl HighestWeightModule {
    pub fn build(system: &std::sync::Arc<RootSystem>, highest: &Weight, max_dim: u64) -> Result<Self> {
        let d = repthy::weyl_dim(system, highest)?;
        if d > BigInt::from(max_dim) {
            return Err(Error::Budget(format!("module of dimension {d} exceeds the fiber budget")));
        }
        let rank = system.rank();
        let ch = repthy::weight_multiset(&LeviContext::full(system.clone()), highest)?;
        let mut order: Vec<(i64, Weight, usize)> = ch
            .iter()
            .map(|(w, m)| {
                let depth: i64 = system
                    .root_coords(&highest.sub(w))
                    .iter()
                    .map(|c| c.to_integer())
                    .sum();
                (depth, w.clone(), *m as usize)
            })
            .collect();
        order.sort();
        let simple: Vec<Weight> = (0..rank).map(|i| system.simple_root(i)).collect();
        let mut module = HighestWeightModule {
            highest: highest.clone(),
            spaces: Vec::with_capacity(order.len()),
            index: HashMap::new(),
            simple,
        };
        for (_, nu, mult) in order {
            module.add_space(nu, mult)?;
        }
        Ok(module)
    }

    fn space(&self, w: &Weight) -> Option<&Space> {
        self.index.get(w).map(|&i| &self.spaces[i])
    }

    fn up(&self, w: &Weight, i: usize) -> Weight {
        w.add(&self.simple[i])
    }

    fn down(&self, w: &Weight, i: usize) -> Weight {
        w.sub(&self.simple[i])
    }

    fn add_space(&mut self, nu: Weight, mult: usize) -> Result<()> {
        let rank = self.simple.len();
        let ups: Vec<Option<usize>> = (0..rank)
            .map(|j| self.space(&self.up(&nu, j)).map(|s| s.dim))
            .collect();
        if nu == self.highest {
            let mut s = Space {
                dim: 1,
                e: vec![None; rank],
                f_from_above: vec![None; rank],
            };
            s.e = ups.iter().map(|u| u.map(|d| vec![zero_vec(1); d])).collect();
            self.index.insert(nu, self.spaces.len());
            self.spaces.push(s);
            return Ok(());
        }
        let offsets: Vec<usize> = ups
            .iter()
            .scan(0, |acc, u| {
                let o = *acc;
                *acc += u.unwrap_or(0);
                Some(o)
            })
            .collect();
        let total: usize = ups.iter().map(|u| u.unwrap_or(0)).sum();
        // e-images of f_i w for every basis vector w of V_{ν+α_i}
        let mut candidates: Vec<(usize, usize, Vec<Q>)> = Vec::new();
        for i in 0..rank {
            let Some(di) = ups[i] else { continue };
            let up_i = self.up(&nu, i);
            let s_i = self.space(&up_i).expect("weight space present");
            for t in 0..di {
                let w = unit(di, t);
                let mut image = zero_vec(total);
                for j in 0..rank {
                    let Some(dj) = ups[j] else { continue };
                    let up_j = self.up(&nu, j);
                    let mut block = zero_vec(dj);
                    if let (Some(ej), Some(fi)) = (
                        s_i.e[j].as_ref(),
                        self.space(&up_j).and_then(|s| s.f_from_above[i].as_ref()),
                    ) {
                        block = mat_vec(fi, &mat_vec(ej, &w));
                    }
                    if i == j {
                        let h = Q::from_integer(BigInt::from(up_i.coords()[i]));
                        block[t] += h;
                    }
                    image[offsets[j]..offsets[j] + dj].clone_from_slice(&block);
                }
                candidates.push((i, t, image));
            }
        }
        let mut ech = Echelon::new();
        let mut basis: Vec<Vec<Q>> = Vec::with_capacity(mult);
        for (_, _, image) in &candidates {
            if basis.len() == mult {
                break;
            }
            if ech.insert(image.clone()) {
                basis.push(image.clone());
            }
        }
        if basis.len() != mult {
            return Err(Error::Inconsistent(format!(
                "weight space {nu} spans {} of {mult} dimensions",
                basis.len()
            )));
        }
        let e: Vec<Option<Mat>> = (0..rank)
            .map(|j| {
                ups[j].map(|dj| {
                    (0..dj)
                        .map(|r| basis.iter().map(|b| b[offsets[j] + r].clone()).collect())
                        .collect()
                })
            })
            .collect();
        let mut f_from_above: Vec<Option<Mat>> = vec![None; rank];
        for i in 0..rank {
            let Some(di) = ups[i] else { continue };
            let mut m: Mat = vec![zero_vec(di); mult];
            for (ci, t, image) in &candidates {
                if *ci != i {
                    continue;
                }
                let x = linalg::solve(&basis, image)
                    .ok_or_else(|| Error::Inconsistent(format!("lowering into {nu} left the module")))?;
                for (r, v) in x.into_iter().enumerate() {
                    m[r][*t] = v;
                }
            }
            f_from_above[i] = Some(m);
        }
        self.index.insert(nu, self.spaces.len());
        self.spaces.push(Space {
            dim: mult,
            e,
            f_from_above,
        });
        Ok(())
    }

    #[cfg(test)]
    fn dim(&self) -> usize {
        self.spaces.iter().map(|s| s.dim).sum()
    }

    /// `e_i` on the dual module, for a functional on `V_ν`.
    fn dual_raise(&self, i: usize, phi: &Functional) -> Option<Functional> {
        let below = self.down(&phi.nu, i);
        let s = self.space(&below)?;
        let m = s.e[i].as_ref()?;
        Functional::nonzero(below, neg_row_mat(&phi.v, m, s.dim))
    }

    /// `f_i` on the dual module, for a functional on `V_ν`.
    fn dual_lower(&self, i: usize, phi: &Functional) -> Option<Functional> {
        let above = self.up(&phi.nu, i);
        let s = self.space(&above)?;
        let m = self.space(&phi.nu)?.f_from_above[i].as_ref()?;
        Functional::nonzero(above, neg_row_mat(&phi.v, m, s.dim))
    }
}

/// A functional on the weight space `V_ν`, i.e. a vector of weight `-ν` in
/// the dual module.
#[derive(Debug, Clone, PartialEq)]
struct Functional {
    nu: Weight,
    v: Vec<Q>,
}

impl Functional {
    fn nonzero(nu: Weight, v: Vec<Q>) -> Option<Self> {
        v.iter().any(|x| !x.is_zero()).then_some(Functional { nu, v })
    }

    fn sub(a: Option<Functional>, b: Option<Functional>) -> Option<Functional> {
        match (a, b) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(Functional {
                v: b.v.iter().map(|x| -x).collect(),
                nu: b.nu,
            }),
            (Some(a), Some(b)) => {
                let v = a.v.iter().zip(&b.v).map(|(x, y)| x - y).collect();
                Functional::nonzero(a.nu, v)
            }
        }
    }
}

/// Weight module in which every weight has multiplicity one, with the
/// lowering operators and the raising operators of the Levi factor.
#[derive(Debug, Clone)]
pub(crate) struct SmallModule {
    weights: Vec<Weight>,
    lower: Vec<Vec<Option<(usize, Q)>>>,
    raise: Vec<Vec<Option<(usize, Q)>>>,
}

impl SmallModule {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn dual(&self) -> SmallModule {
        let n = self.dim();
        let flip = |ops: &Vec<Vec<Option<(usize, Q)>>>| -> Vec<Vec<Option<(usize, Q)>>> {
            ops.iter()
                .map(|op| {
                    let mut out = vec![None; n];
                    for (k, img) in op.iter().enumerate() {
                        if let Some((k2, c)) = img {
                            out[*k2] = Some((k, -c.clone()));
                        }
                    }
                    out
                })
                .collect()
        };
        SmallModule {
            weights: self.weights.iter().map(Weight::neg).collect(),
            lower: flip(&self.lower),
            raise: flip(&self.raise),
        }
    }
}

/// Simple-root decomposition used to build root vectors as nested brackets:
/// `e_β = [e_i, e_{β - α_i}]`.
fn root_paths(system: &RootSystem) -> Vec<Vec<usize>> {
    let roots = system.positive_roots();
    let mut paths: Vec<Vec<usize>> = Vec::with_capacity(roots.len());
    let mut known: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut by_height: Vec<&Vec<i64>> = roots.iter().collect();
    by_height.sort_by_key(|c| c.iter().sum::<i64>());
    for c in by_height {
        let path = if c.iter().sum::<i64>() == 1 {
            vec![c.iter().position(|&x| x == 1).expect("simple root")]
        } else {
            let mut found = None;
            for i in 0..c.len() {
                if c[i] == 0 {
                    continue;
                }
                let mut rest = c.clone();
                rest[i] -= 1;
                if let Some(p) = known.get(&rest) {
                    let mut p2 = vec![i];
                    p2.extend(p);
                    found = Some(p2);
                    break;
                }
            }
            found.expect("every positive root extends a smaller one")
        };
        known.insert(c.clone(), path);
    }
    for c in roots {
        paths.push(known[c].clone());
    }
    paths
}

/// `e_β φ` with `e_β = [e_{p0}, [e_{p1}, ...]]`.
fn apply_root(m: &HighestWeightModule, path: &[usize], phi: &Functional) -> Option<Functional> {
    match path {
        [] => Some(phi.clone()),
        [i] => m.dual_raise(*i, phi),
        [i, rest @ ..] => {
            let a = apply_root(m, rest, phi).and_then(|x| m.dual_raise(*i, &x));
            let b = m.dual_raise(*i, phi).and_then(|x| apply_root(m, rest, &x));
            Functional::sub(a, b)
        }
    }
}

const MAX_ROOT_HEIGHT: usize = 14;

/// Fiber of `(J^1 L)^*` as a module over the parabolic.
pub(crate) fn dual_jet_fiber(marking: &ParabolicMarking, line: &Weight, max_dim: u64) -> Result<SmallModule> {
    let system = marking.system();
    let module = HighestWeightModule::build(system, line, max_dim)?;
    let rank = system.rank();
    let ev = Functional {
        nu: line.clone(),
        v: unit(1, 0),
    };
    let mut basis = vec![ev.clone()];
    for path in root_paths(system) {
        if path.len() > MAX_ROOT_HEIGHT {
            return Err(Error::Budget("root too high for nested brackets".into()));
        }
        if let Some(x) = apply_root(&module, &path, &ev) {
            basis.push(x);
        }
    }
    if basis.len() != marking.dim_flag() + 1 {
        return Err(Error::Inconsistent(format!(
            "first-order functionals span {} dimensions, expected {}",
            basis.len(),
            marking.dim_flag() + 1
        )));
    }
    let pos: HashMap<Weight, usize> = basis.iter().enumerate().map(|(k, b)| (b.nu.clone(), k)).collect();
    let locate = |img: Option<Functional>| -> Result<Option<(usize, Q)>> {
        let Some(img) = img else { return Ok(None) };
        let k = *pos
            .get(&img.nu)
            .ok_or_else(|| Error::Inconsistent("jet fiber is not stable".into()))?;
        let b = &basis[k];
        let p = b.v.iter().position(|x| !x.is_zero()).expect("basis vectors are nonzero");
        let c = &img.v[p] / &b.v[p];
        if img.v.iter().zip(&b.v).any(|(x, y)| *x != &c * y) {
            return Err(Error::Inconsistent("jet fiber is not stable".into()));
        }
        Ok(Some((k, c)))
    };
    let mut lower = Vec::with_capacity(rank);
    let mut raise = Vec::with_capacity(rank);
    for i in 0..rank {
        lower.push(basis.iter().map(|b| locate(module.dual_lower(i, b))).collect::<Result<Vec<_>>>()?);
        if marking.crossed()[i] {
            raise.push(vec![None; basis.len()]);
        } else {
            raise.push(basis.iter().map(|b| locate(module.dual_raise(i, b))).collect::<Result<Vec<_>>>()?);
        }
    }
    Ok(SmallModule {
        weights: basis.iter().map(|b| b.nu.neg()).collect(),
        lower,
        raise,
    })
}

type Mono = Vec<u16>;
type Vector = BTreeMap<Mono, Q>;

fn act(op: &[Option<(usize, Q)>], v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (m, c) in v {
        for t in 0..m.len() {
            if t > 0 && m[t] == m[t - 1] {
                continue;
            }
            let Some((k2, a)) = &op[m[t] as usize] else { continue };
            let reps = m.iter().filter(|&&x| x == m[t]).count();
            let mut m2 = m.clone();
            m2[t] = *k2 as u16;
            m2.sort_unstable();
            let coef = c * a * Q::from_integer(BigInt::from(reps));
            let slot = out.entry(m2).or_insert_with(Q::zero);
            *slot += coef;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `S^k` of a small module twisted by a character, with monomials grouped
/// by weight.
pub(crate) struct SymFiber {
    module: SmallModule,
    by_weight: HashMap<Weight, Vec<Mono>>,
}

impl SymFiber {
    pub fn new(module: SmallModule, k: usize, twist: &Weight, max_terms: u64) -> Result<Self> {
        let n = module.dim();
        let count = binomial(n as u64 + k as u64 - 1, k as u64);
        if count.is_none_or(|c| c > max_terms) {
            return Err(Error::Budget(format!("S^{k} of a rank {n} fiber exceeds the budget")));
        }
        let mut by_weight: HashMap<Weight, Vec<Mono>> = HashMap::new();
        let mut cur: Vec<u16> = Vec::with_capacity(k);
        fn rec(
            start: usize,
            left: usize,
            n: usize,
            cur: &mut Vec<u16>,
            w: Weight,
            module: &SmallModule,
            out: &mut HashMap<Weight, Vec<Mono>>,
        ) {
            if left == 0 {
                out.entry(w).or_default().push(cur.clone());
                return;
            }
            for a in start..n {
                cur.push(a as u16);
                rec(a, left - 1, n, cur, w.add(&module.weights[a]), module, out);
                cur.pop();
            }
        }
        rec(0, k, n, &mut cur, twist.clone(), &module, &mut by_weight);
        Ok(SymFiber {
            module,
            by_weight,
        })
    }

    /// Multiplicity of `V_μ` in `H^0` of the bundle with this fiber.
    pub fn sections(&self, mu: &Weight, crossed: &[bool]) -> usize {
        let Some(monos) = self.by_weight.get(mu) else { return 0 };
        let mut rows: HashMap<(usize, Mono), usize> = HashMap::new();
        let mut entries: Vec<Vec<(usize, Q)>> = Vec::new();
        for (col, m) in monos.iter().enumerate() {
            let start: Vector = std::iter::once((m.clone(), Q::from_integer(BigInt::from(1)))).collect();
            let mut images: Vec<(usize, Vector)> = Vec::new();
            for (i, &x) in crossed.iter().enumerate() {
                if !x {
                    images.push((2 * i, act(&self.module.raise[i], &start)));
                }
                let mut v = start.clone();
                for _ in 0..=mu.coords()[i] {
                    v = act(&self.module.lower[i], &v);
                    if v.is_empty() {
                        break;
                    }
                }
                images.push((2 * i + 1, v));
            }
            for (cond, v) in images {
                for (out, c) in v {
                    let next = rows.len();
                    let r = *rows.entry((cond, out)).or_insert(next);
                    if r == entries.len() {
                        entries.push(Vec::new());
                    }
                    entries[r].push((col, c));
                }
            }
        }
        let n = monos.len();
        let dense = entries.into_iter().map(|row| {
            let mut v = zero_vec(n);
            for (c, x) in row {
                v[c] += x;
            }
            v
        });
        n - linalg::rank(dense)
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    acc.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Series;
    use std::sync::Arc;

    fn sys(s: Series, r: usize) -> Arc<RootSystem> {
        Arc::new(RootSystem::build(s, r).unwrap())
    }

    fn check_relations(m: &HighestWeightModule) {
        let rank = m.simple.len();
        for (weight, &idx) in &m.index {
            let s = &m.spaces[idx];
            for i in 0..rank {
                for j in 0..rank {
                    for t in 0..s.dim {
                        let w = unit(s.dim, t);
                        // e_j f_i w - f_i e_j w = δ_ij h_i w
                        let down = m.down(weight, i);
                        let fi_w = m
                            .space(&down)
                            .and_then(|d| d.f_from_above[i].as_ref().map(|f| (d, mat_vec(f, &w))));
                        let lhs = fi_w
                            .and_then(|(d, v)| d.e[j].as_ref().map(|e| mat_vec(e, &v)));
                        let up = m.up(weight, j);
                        let rhs = s.e[j].as_ref().and_then(|e| {
                            let v = mat_vec(e, &w);
                            let target = m.down(&up, i);
                            m.space(&target)
                                .and_then(|d| d.f_from_above[i].as_ref())
                                .map(|f| mat_vec(f, &v))
                        });
                        let target = m.down(&up, i);
                        let dim_t = m.space(&target).map_or(0, |d| d.dim);
                        let lhs = lhs.unwrap_or_else(|| zero_vec(dim_t));
                        let rhs = rhs.unwrap_or_else(|| zero_vec(dim_t));
                        let mut diff: Vec<Q> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                        if i == j {
                            diff[t] -= Q::from_integer(BigInt::from(weight.coords()[i]));
                        }
                        assert!(diff.iter().all(Zero::is_zero), "relation fails at {weight} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_modules_satisfy_relations() {
        for (s, r, w) in [
            (Series::A, 1, vec![3]),
            (Series::A, 2, vec![1, 1]),
            (Series::B, 2, vec![1, 1]),
            (Series::C, 3, vec![0, 1, 0]),
            (Series::G, 2, vec![1, 0]),
            (Series::G, 2, vec![0, 1]),
        ] {
            let system = sys(s, r);
            let w = Weight::new(w);
            let m = HighestWeightModule::build(&system, &w, 10_000).unwrap();
            assert_eq!(BigInt::from(m.dim()), repthy::weyl_dim(&system, &w).unwrap());
            check_relations(&m);
        }
    }

    #[test]
    fn dual_jet_fiber_has_the_right_weights() {
        let system = sys(Series::B, 2);
        let marking = ParabolicMarking::from_nodes(system.clone(), &[0]).unwrap();
        let line = Weight::new(vec![1, 0]);
        let j = dual_jet_fiber(&marking, &line, 1000).unwrap();
        assert_eq!(j.dim(), 4);
        assert!(j.weights.contains(&line.neg()));
        assert_eq!(j.dual().dim(), 4);
    }

    #[test]
    fn sections_of_line_bundles() {
        // S^0 of the fiber is the trivial module: H^0(L) = V_λ.
        let system = sys(Series::A, 2);
        let marking = ParabolicMarking::from_nodes(system.clone(), &[0]).unwrap();
        let line = Weight::new(vec![1, 0]);
        let j = dual_jet_fiber(&marking, &line, 1000).unwrap();
        let fiber = SymFiber::new(j, 0, &Weight::new(vec![2, 0]), 1000).unwrap();
        assert_eq!(fiber.sections(&Weight::new(vec![2, 0]), marking.crossed()), 1);
        assert_eq!(fiber.sections(&Weight::new(vec![1, 0]), marking.crossed()), 0);
    }
}
