//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line with the observed values.
//!
//! Every quantity is an exact integer, so the tolerance is equality.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hololab_core::homog::{
    self, bbw_irreducible, cohomology, custom_bundle, graded_report, CohomologyEntry, ParabolicMarking,
};
use hololab_core::legendre::{
    flat_rank_d, kodaira_analyze, legendre_analyze, torsion_number, KodairaVerdict, LegendreDatum,
};
use hololab_core::repthy::{self, Budget, LeviContext};
use hololab_core::screener::{screen, sweep, table_dims, Candidate, Classification, RowStatus, SweepConfig};
use hololab_core::{RootSystem, Weight};

/// Wall-clock ceiling for any single listed run.
const RUN_LIMIT: Duration = Duration::from_secs(10);

fn system(label: &str) -> Arc<RootSystem> {
    Arc::new(label.parse().expect("valid system label"))
}

fn exact(v: i64) -> CohomologyEntry {
    CohomologyEntry::Exact(BigInt::from(v))
}

fn show(e: &Option<CohomologyEntry>) -> String {
    e.as_ref().map_or_else(|| "missing".to_string(), ToString::to_string)
}

fn report(n: u32, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {n}: PASS");
    } else {
        println!("criterion {n}: FAIL ({})", failures.join("; "));
    }
    assert!(failures.is_empty(), "criterion {n} failed: {failures:?}");
}

fn timed<T>(label: &str, failures: &mut Vec<String>, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    if elapsed > RUN_LIMIT {
        failures.push(format!("{label} took {elapsed:?}"));
    }
    out
}

#[test]
fn criterion_1_table_dimensions() {
    let mut failures = Vec::new();
    let a2 = system("A2");
    let c2 = system("C2");
    for (sys, w, want) in [(&a2, vec![1, 1], 8), (&a2, vec![1, 2], 15), (&c2, vec![1, 1], 16)] {
        let got = repthy::weyl_dim(sys, &Weight::new(w.clone())).unwrap();
        if got != BigInt::from(want) {
            failures.push(format!("dim {} {w:?} = {got}, want {want}", sys.label()));
        }
    }
    let rows = table_dims().unwrap();
    for (group, label, want) in [
        ("SL(3)", vec![1, 1], 8),
        ("SL(3)", vec![1, 2], 15),
        ("Sp(4)", vec![1, 1], 16),
        ("Sp(4)", vec![2, 0], 14),
        ("Sp(4)", vec![3, 0], 30),
        ("G2", vec![0, 2], 27),
        ("G2", vec![0, 3], 77),
    ] {
        match rows.iter().find(|r| r.group == group && r.printed_label == label) {
            Some(r) if r.status == RowStatus::Match && r.dimension == BigInt::from(want) => {}
            Some(r) => failures.push(format!("{group} {label:?}: {} ({:?})", r.dimension, r.status)),
            None => failures.push(format!("{group} {label:?}: row missing")),
        }
    }
    let family: Vec<_> = rows.iter().filter(|r| r.group.starts_with("SL(2)")).collect();
    if family.is_empty() {
        failures.push("no SL(2) family rows".into());
    }
    for r in family {
        if r.status == RowStatus::Match {
            failures.push(format!("{} {:?} is not flagged", r.group, r.printed_label));
        }
    }
    report(1, &failures);
}

#[test]
fn criterion_2_projective_space_is_flat() {
    let mut failures = Vec::new();
    for m in 2..=6usize {
        let sys = system(&format!("A{}", m - 1));
        let mut w = vec![0; m - 1];
        w[0] = 1;
        let d = LegendreDatum::from_weight(sys, Weight::new(w)).unwrap();
        let a = timed(&format!("m={m}"), &mut failures, || legendre_analyze(&d, 4).unwrap());
        if a.g_ind_dim != Some(exact((m * m) as i64)) {
            failures.push(format!("m={m}: g_ind_dim = {}", show(&a.g_ind_dim)));
        }
        if a.higher.len() != 4 {
            failures.push(format!("m={m}: {} levels computed", a.higher.len()));
        }
        for (k, h1) in a.h1() {
            if h1 != exact(0) {
                failures.push(format!("m={m}: h^1 at level {k} = {h1}"));
            }
        }
    }
    report(2, &failures);
}

/// Dimension of the space of algebraic Weyl tensors in dimension `d`.
fn weyl_tensor_dim(d: i64) -> i64 {
    d * d * (d * d - 1) / 12 - d * (d + 1) / 2
}

#[test]
fn criterion_3_conformal_quadrics() {
    let mut failures = Vec::new();
    for (n, label, w) in [(3i64, "B2", vec![1, 0]), (4, "D3", vec![1, 0, 0]), (5, "B3", vec![1, 0, 0])] {
        let d = LegendreDatum::from_weight(system(label), Weight::new(w)).unwrap();
        let a = timed(&format!("n={n}"), &mut failures, || legendre_analyze(&d, 3).unwrap());
        let dim = n + 2;
        let checks = [
            ("g_ind_dim", &a.g_ind_dim, (n + 3) * (n + 4) / 2),
            ("torsion_obstruction", &a.torsion_obstruction, 0),
            ("conn_space_dim", &a.conn_space_dim, dim),
            ("curvature_space", &a.curvature_space, weyl_tensor_dim(dim)),
        ];
        if a.dim_m != BigInt::from(dim) {
            failures.push(format!("n={n}: dim_M = {}", a.dim_m));
        }
        for (name, got, want) in checks {
            if got.as_ref() != Some(&exact(want)) {
                failures.push(format!("n={n}: {name} = {}, want {want}", show(got)));
            }
        }
    }
    report(3, &failures);
}

#[test]
fn criterion_4_twisted_cubic() {
    let mut failures = Vec::new();
    let d = LegendreDatum::from_weight(system("A1"), Weight::new(vec![3])).unwrap();
    let a = timed("A1 [3]", &mut failures, || legendre_analyze(&d, 3).unwrap());
    if a.dim_m != BigInt::from(4) {
        failures.push(format!("dim_M = {}", a.dim_m));
    }
    for (name, got, want) in [
        ("g_ind_dim", &a.g_ind_dim, 4),
        ("conn_space_dim", &a.conn_space_dim, 0),
        ("torsion_obstruction", &a.torsion_obstruction, 0),
        ("curvature_space", &a.curvature_space, 8),
    ] {
        if got.as_ref() != Some(&exact(want)) {
            failures.push(format!("{name} = {}, want {want}", show(got)));
        }
    }
    report(4, &failures);
}

#[test]
fn criterion_5_enlargements() {
    let mut failures = Vec::new();
    for (label, w, want) in [
        ("C2", vec![1, 0], 16),
        ("C3", vec![1, 0, 0], 36),
        ("G2", vec![1, 0], 22),
        ("B3", vec![0, 0, 1], 29),
    ] {
        let c = Candidate::new(system(label), Weight::new(w.clone())).unwrap();
        let v = timed(label, &mut failures, || screen(&c, 3));
        let ok = v.classification == Classification::Enlargement
            && v.enlargement_target_dim == Some(BigInt::from(want));
        if !ok {
            failures.push(format!(
                "{label} {w:?}: {} target {:?}, want enlargement {want}",
                v.classification, v.enlargement_target_dim
            ));
        }
    }
    report(5, &failures);
}

#[test]
fn criterion_6_quaternionic_kodaira() {
    let mut failures = Vec::new();
    let marking = Arc::new(ParabolicMarking::from_nodes(system("A1"), &[0]).unwrap());
    for k in 1..=3i64 {
        let n = custom_bundle(&marking, vec![(Weight::new(vec![1]), 2 * k as u64)]).unwrap();
        let a = timed(&format!("k={k}"), &mut failures, || kodaira_analyze(&marking, &n).unwrap());
        if a.obstruction1 != exact(0) || a.obstruction2 != exact(0) {
            failures.push(format!("k={k}: obstructions {} and {}", a.obstruction1, a.obstruction2));
        }
        if a.g_dim != exact(4 * k * k + 3) {
            failures.push(format!("k={k}: g_dim = {}", a.g_dim));
        }
        if a.verdict != KodairaVerdict::OneFlatStructure {
            failures.push(format!("k={k}: verdict {:?}", a.verdict));
        }
    }
    report(6, &failures);
}

fn serre_pairs(failures: &mut Vec<String>, marking: &ParabolicMarking, weights: impl Iterator<Item = Weight>) {
    let top = marking.dim_flag();
    let canonical = marking.canonical_weight();
    for w in weights {
        let a = bbw_irreducible(marking, &w).unwrap();
        let b = bbw_irreducible(marking, &canonical.sub(&w)).unwrap();
        for q in 0..=top {
            if a.get(q) != b.get(top - q) {
                failures.push(format!("Serre duality fails for {w} in degree {q}"));
            }
        }
    }
}

/// Number of positive roots on which `w + ρ` is negative: the Bruhat length
/// of the chamber walk, computed without walking.
fn inversions(sys: &RootSystem, w: &Weight) -> usize {
    let shifted = w.add(&sys.rho());
    sys.positive_roots()
        .iter()
        .filter(|c| sys.root_weight_product(c, &shifted) < 0)
        .count()
}

fn regular(sys: &RootSystem, w: &Weight) -> bool {
    let shifted = w.add(&sys.rho());
    sys.positive_roots()
        .iter()
        .all(|c| sys.root_weight_product(c, &shifted) != 0)
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn dominant_range(rank: usize, max_sum: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if i == cur.len() {
            out.push(Weight::new(cur.clone()));
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_sum, &mut cur, &mut out);
    out
}

#[test]
fn criterion_7_property_suites() {
    let mut failures = Vec::new();

    // Serre duality on P^1 and Q_5.
    let p1 = ParabolicMarking::from_nodes(system("A1"), &[0]).unwrap();
    serre_pairs(&mut failures, &p1, (-6..=6).map(|a| Weight::new(vec![a])));
    let q5 = ParabolicMarking::from_nodes(system("B3"), &[0]).unwrap();
    serre_pairs(&mut failures, &q5, (-6..=6).map(|a| Weight::new(vec![a, 0, 0])));

    // Riemann-Roch on P^1.
    for k in -6..=6i64 {
        let r = bbw_irreducible(&p1, &Weight::new(vec![k])).unwrap();
        if r.euler != BigInt::from(k + 1) {
            failures.push(format!("euler of O({k}) = {}", r.euler));
        }
    }

    // Bott-Borel-Weil on full flag varieties: one nonzero degree, equal to
    // the inversion count, holding the Weyl dimension of the dominant weight.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let labels = ["A1", "A2", "B2", "G2", "A3", "B3", "C3", "A4", "B4", "C4", "D4", "F4"];
    let mut tested = 0;
    while tested < 500 {
        let sys = system(labels[rng.gen_range(0..labels.len())]);
        let w = Weight::new((0..sys.rank()).map(|_| rng.gen_range(-5..=5)).collect());
        if !regular(&sys, &w) {
            continue;
        }
        tested += 1;
        let all: Vec<usize> = (0..sys.rank()).collect();
        let borel = ParabolicMarking::from_nodes(sys.clone(), &all).unwrap();
        let r = bbw_irreducible(&borel, &w).unwrap();
        let nonzero: Vec<usize> = (0..=borel.dim_flag()).filter(|&q| !r.get(q).is_exact_zero()).collect();
        let degree = inversions(&sys, &w);
        let dominant = match sys.to_dominant_chamber(&w.add(&sys.rho())).unwrap() {
            hololab_core::Chamber::Regular { dominant, .. } => dominant.sub(&sys.rho()),
            hololab_core::Chamber::Singular => unreachable!("weight is regular"),
        };
        let want = repthy::weyl_dim(&sys, &dominant).unwrap();
        if nonzero != vec![degree] || r.get(degree) != CohomologyEntry::Exact(want.clone()) {
            failures.push(format!("{} {w}: degrees {nonzero:?}, want {degree} with {want}", sys.label()));
        }
    }

    // Dimension conservation on every simple type of rank <= 3.
    let budget = Budget::default();
    for t in hololab_core::screener::simple_types(3) {
        let sys = Arc::new(RootSystem::from_components(vec![t]).unwrap());
        let ctx = LeviContext::full(sys.clone());
        let weights = dominant_range(sys.rank(), 2);
        for v in &weights {
            let dv = repthy::weyl_dim(&sys, v).unwrap();
            for w in &weights {
                let dw = repthy::weyl_dim(&sys, w).unwrap();
                let t = repthy::tensor_decompose(&ctx, v, w).unwrap();
                if t.total_dimension() != &dv * &dw {
                    failures.push(format!("{}: {v} ⊗ {w} loses dimension", sys.label()));
                }
            }
            let n = dv.to_string().parse::<u64>().unwrap();
            for k in 1..=3 {
                match repthy::sym_power(&ctx, v, k, &budget) {
                    Ok(s) if s.total_dimension() == binomial(n + k as u64 - 1, k as u64) => {}
                    Ok(_) => failures.push(format!("{}: S^{k} {v} loses dimension", sys.label())),
                    Err(e) if e.is_budget() => {}
                    Err(e) => failures.push(format!("{}: S^{k} {v}: {e}", sys.label())),
                }
            }
        }
    }

    // Torsion number of flat models.
    for m in 2..=50u64 {
        for dim_x in 1..m {
            let rank_d = flat_rank_d(m, dim_x).unwrap();
            if torsion_number(m, dim_x, rank_d).unwrap() != 0 {
                failures.push(format!("torsion number of the flat model ({m}, {dim_x}) is nonzero"));
            }
        }
    }

    // Tier consistency: refined values lie inside the graded intervals.
    let mut bundles = Vec::new();
    for (label, w) in [
        ("A1", vec![3]),
        ("A2", vec![1, 0]),
        ("B2", vec![1, 0]),
        ("D3", vec![1, 0, 0]),
        ("B3", vec![1, 0, 0]),
        ("G2", vec![1, 0]),
        ("C2", vec![1, 0]),
    ] {
        let d = LegendreDatum::from_weight(system(label), Weight::new(w)).unwrap();
        for k in 1..=3 {
            bundles.push(hololab_core::legendre::legendre_bundle(&d, k, &budget).unwrap());
        }
        bundles.push(hololab_core::legendre::jet_bundle(&d).unwrap());
    }
    for label in ["A2", "B2", "A3"] {
        let sys = system(label);
        let all: Vec<usize> = (0..sys.rank()).collect();
        for nodes in [vec![0], all] {
            let m = Arc::new(ParabolicMarking::from_nodes(sys.clone(), &nodes).unwrap());
            let omega = homog::cotangent_bundle(&m).unwrap();
            bundles.push(homog::sym_bundle(&omega, 2, &budget).unwrap());
            bundles.push(homog::tensor_bundle(&omega, &homog::tangent_bundle(&m).unwrap(), &budget).unwrap());
        }
    }
    for f in &bundles {
        let graded = graded_report(f).unwrap();
        let refined = cohomology(f).unwrap();
        if refined.euler != graded.euler {
            failures.push(format!("euler mismatch on {:?}", f.provenance()));
        }
        for q in 0..=f.marking().dim_flag() {
            let (r, g) = (refined.get(q), graded.get(q));
            if r.lower() < g.lower() || r.upper() > g.upper() {
                failures.push(format!("{:?} degree {q}: {r} escapes {g}", f.provenance()));
            }
        }
    }
    report(7, &failures);
}

#[test]
fn criterion_8_sweep_is_deterministic() {
    let mut failures = Vec::new();
    let run = |jobs: usize, failures: &mut Vec<String>| -> Vec<String> {
        let config = SweepConfig {
            max_rank: 2,
            max_level: 3,
            kmax: 3,
            jobs,
            budget: Budget::default(),
        };
        let verdicts = timed(&format!("jobs={jobs}"), failures, || sweep(&config).unwrap());
        let mut lines: Vec<String> = verdicts.iter().map(|v| serde_json::to_string(v).unwrap()).collect();
        lines.sort();
        lines
    };
    let serial = run(1, &mut failures);
    let parallel = run(4, &mut failures);
    if serial.is_empty() {
        failures.push("sweep produced nothing".into());
    }
    if serial.join("\n").as_bytes() != parallel.join("\n").as_bytes() {
        failures.push("outputs differ between jobs=1 and jobs=4".into());
    }
    report(8, &failures);
}
