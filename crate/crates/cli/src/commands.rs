//! Argument normalization and rendering for each subcommand.

use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use hololab_core::homog::{self, CohomologyReport, FilteredBundle, ParabolicMarking};
use hololab_core::legendre::{self, KodairaAnalysis, LegendreAnalysis, LegendreDatum};
use hololab_core::notation::{parse_marking_mask, parse_pieces, parse_weight_for};
use hololab_core::repthy::{self, Budget, LeviContext, ModuleDecomposition};
use hololab_core::screener::{self, ScreenVerdict, SweepConfig};
use hololab_core::{Dim, RootSystem, Weight};

use crate::Command;

/// Rendered result in both output modes.
pub struct Output {
    pub text: String,
    json: String,
}

impl Output {
    fn new(text: String, value: &impl Serialize) -> Result<Self> {
        let json = serde_json::to_string_pretty(value).context("serializing output")?;
        Ok(Output { text, json })
    }

    pub fn json_document(&self) -> String {
        format!("{}\n", self.json)
    }
}

fn system(s: &str) -> Result<Arc<RootSystem>> {
    let sys: RootSystem = s.parse().with_context(|| format!("SYSTEM `{s}`"))?;
    Ok(Arc::new(sys))
}

fn weight(sys: &RootSystem, s: &str, name: &str) -> Result<Weight> {
    parse_weight_for(sys, s).with_context(|| format!("{name} `{s}`"))
}

fn marking(sys: &Arc<RootSystem>, s: &str) -> Result<Arc<ParabolicMarking>> {
    let mask = parse_marking_mask(sys.rank(), s).with_context(|| format!("MARKING `{s}`"))?;
    Ok(Arc::new(ParabolicMarking::new(sys.clone(), mask)?))
}

fn datum(sys: Arc<RootSystem>, w: Weight, m: Option<&str>) -> Result<LegendreDatum> {
    Ok(match m {
        Some(m) => LegendreDatum::new(marking(&sys, m)?, w)?,
        None => LegendreDatum::from_weight(sys, w)?,
    })
}

/// A parsed and normalized invocation.
pub enum Request {
    Roots(Arc<RootSystem>),
    Dim {
        system: Arc<RootSystem>,
        weight: Weight,
        marking: Option<Arc<ParabolicMarking>>,
    },
    Tensor {
        system: Arc<RootSystem>,
        left: Weight,
        right: Weight,
    },
    Sym {
        system: Arc<RootSystem>,
        weight: Weight,
        k: usize,
    },
    Bbw {
        marking: Arc<ParabolicMarking>,
        weight: Weight,
    },
    Cotangent {
        marking: Arc<ParabolicMarking>,
        tangent: bool,
    },
    Jet(LegendreDatum),
    Legendre {
        datum: LegendreDatum,
        kmax: usize,
    },
    Kodaira {
        marking: Arc<ParabolicMarking>,
        pieces: Vec<(Weight, u64)>,
    },
    Torsion {
        dim_m: u64,
        dim_x: u64,
        rank_d: Option<u64>,
    },
    Screen {
        system: Arc<RootSystem>,
        weight: Weight,
        kmax: usize,
    },
    Table,
}

impl Request {
    pub fn from_command(cmd: Command) -> Result<Request> {
        Ok(match cmd {
            Command::Roots { system: s } => Request::Roots(system(&s)?),
            Command::Dim {
                system: s,
                weight: w,
                marking: m,
            } => {
                let sys = system(&s)?;
                let weight = weight(&sys, &w, "WEIGHT")?;
                let marking = m.map(|m| marking(&sys, &m)).transpose()?;
                Request::Dim {
                    system: sys,
                    weight,
                    marking,
                }
            }
            Command::Tensor { system: s, left, right } => {
                let sys = system(&s)?;
                Request::Tensor {
                    left: weight(&sys, &left, "LEFT")?,
                    right: weight(&sys, &right, "RIGHT")?,
                    system: sys,
                }
            }
            Command::Sym { system: s, weight: w, k } => {
                let sys = system(&s)?;
                Request::Sym {
                    weight: weight(&sys, &w, "WEIGHT")?,
                    system: sys,
                    k,
                }
            }
            Command::Bbw {
                system: s,
                marking: m,
                weight: w,
            } => {
                let sys = system(&s)?;
                Request::Bbw {
                    marking: marking(&sys, &m)?,
                    weight: weight(&sys, &w, "WEIGHT")?,
                }
            }
            Command::Cotangent {
                system: s,
                marking: m,
                tangent,
            } => {
                let sys = system(&s)?;
                Request::Cotangent {
                    marking: marking(&sys, &m)?,
                    tangent,
                }
            }
            Command::Jet {
                system: s,
                weight: w,
                marking: m,
            } => {
                let sys = system(&s)?;
                let w = weight(&sys, &w, "WEIGHT")?;
                Request::Jet(datum(sys, w, m.as_deref())?)
            }
            Command::Legendre {
                system: s,
                weight: w,
                marking: m,
                kmax,
            } => {
                let sys = system(&s)?;
                let w = weight(&sys, &w, "WEIGHT")?;
                Request::Legendre {
                    datum: datum(sys, w, m.as_deref())?,
                    kmax,
                }
            }
            Command::Kodaira {
                system: s,
                marking: m,
                pieces,
            } => {
                let sys = system(&s)?;
                let parsed = parse_pieces(&sys, &pieces).with_context(|| format!("PIECES `{pieces}`"))?;
                Request::Kodaira {
                    marking: marking(&sys, &m)?,
                    pieces: parsed,
                }
            }
            Command::Torsion { dim_m, dim_x, rank_d } => Request::Torsion { dim_m, dim_x, rank_d },
            Command::Screen {
                system: s,
                weight: w,
                kmax,
            } => {
                let sys = system(&s)?;
                Request::Screen {
                    weight: weight(&sys, &w, "WEIGHT")?,
                    system: sys,
                    kmax,
                }
            }
            Command::Table => Request::Table,
            Command::Sweep { .. } => unreachable!("sweep streams its output"),
        })
    }

    pub fn op(&self) -> &'static str {
        match self {
            Request::Roots(_) => "roots",
            Request::Dim { .. } => "dim",
            Request::Tensor { .. } => "tensor",
            Request::Sym { .. } => "sym",
            Request::Bbw { .. } => "bbw",
            Request::Cotangent { .. } => "cotangent",
            Request::Jet(_) => "jet",
            Request::Legendre { .. } => "legendre",
            Request::Kodaira { .. } => "kodaira",
            Request::Torsion { .. } => "torsion",
            Request::Screen { .. } => "screen",
            Request::Table => "table",
        }
    }

    /// Canonical form of the inputs, used as cache key material.
    pub fn inputs(&self) -> serde_json::Value {
        let code = |m: &ParabolicMarking| m.to_string();
        match self {
            Request::Roots(s) => json!({ "system": s.label() }),
            Request::Dim { system, weight, marking } => json!({
                "system": system.label(),
                "weight": weight.to_string(),
                "marking": marking.as_deref().map(code),
            }),
            Request::Tensor { system, left, right } => json!({
                "system": system.label(),
                "left": left.to_string(),
                "right": right.to_string(),
            }),
            Request::Sym { system, weight, k } => json!({
                "system": system.label(),
                "weight": weight.to_string(),
                "k": k,
            }),
            Request::Bbw { marking, weight } => json!({
                "marking": code(marking),
                "weight": weight.to_string(),
            }),
            Request::Cotangent { marking, tangent } => json!({ "marking": code(marking), "tangent": tangent }),
            Request::Jet(d) => json!({
                "marking": code(d.marking()),
                "weight": d.line_weight().to_string(),
            }),
            Request::Legendre { datum, kmax } => json!({
                "marking": code(datum.marking()),
                "weight": datum.line_weight().to_string(),
                "kmax": kmax,
            }),
            Request::Kodaira { marking, pieces } => json!({
                "marking": code(marking),
                "pieces": pieces.iter().map(|(w, m)| format!("{m}*{w}")).collect::<Vec<_>>(),
            }),
            Request::Torsion { dim_m, dim_x, rank_d } => json!({
                "dim_M": dim_m,
                "dim_X": dim_x,
                "rank_D": rank_d,
            }),
            Request::Screen { system, weight, kmax } => json!({
                "system": system.label(),
                "weight": weight.to_string(),
                "kmax": kmax,
            }),
            Request::Table => json!({}),
        }
    }

    pub fn execute(&self) -> Result<Output> {
        let budget = Budget::default();
        match self {
            Request::Roots(s) => roots(s),
            Request::Dim { system, weight, marking } => {
                let dimension = match marking {
                    Some(m) => repthy::levi_dim(m.levi(), weight)?,
                    None => repthy::weyl_dim(system, weight)?,
                };
                #[derive(Serialize)]
                struct Doc<'a> {
                    system: String,
                    weight: &'a Weight,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    marking: Option<String>,
                    #[serde(with = "hololab_core::serde_int")]
                    dimension: Dim,
                }
                let text = format!("{dimension}\n");
                let doc = Doc {
                    system: system.label(),
                    weight,
                    marking: marking.as_ref().map(|m| m.code()),
                    dimension,
                };
                Output::new(text, &doc)
            }
            Request::Tensor { system, left, right } => {
                let ctx = LeviContext::full(system.clone());
                decomposition(repthy::tensor_decompose(&ctx, left, right)?)
            }
            Request::Sym { system, weight, k } => {
                let ctx = LeviContext::full(system.clone());
                decomposition(repthy::sym_power(&ctx, weight, *k, &budget)?)
            }
            Request::Bbw { marking, weight } => {
                let report = homog::bbw_irreducible(marking, weight)?;
                Output::new(report_text(&report), &report)
            }
            Request::Cotangent { marking, tangent } => {
                let bundle = if *tangent {
                    homog::tangent_bundle(marking)?
                } else {
                    homog::cotangent_bundle(marking)?
                };
                bundle_output(&bundle, &budget)
            }
            Request::Jet(d) => bundle_output(&legendre::jet_bundle(d)?, &budget),
            Request::Legendre { datum, kmax } => {
                let a = legendre::legendre_analyze_with(datum, *kmax, &budget)?;
                let text = legendre_text(datum, &a);
                Output::new(text, &a)
            }
            Request::Kodaira { marking, pieces } => {
                let n = homog::custom_bundle(marking, pieces.clone())?;
                let a = legendre::kodaira_analyze_with(marking, &n, &budget)?;
                Output::new(kodaira_text(&a), &a)
            }
            Request::Torsion { dim_m, dim_x, rank_d } => {
                let rank_d = match rank_d {
                    Some(r) => *r,
                    None => legendre::flat_rank_d(*dim_m, *dim_x)?,
                };
                let l = legendre::torsion_number(*dim_m, *dim_x, rank_d)?;
                let doc = json!({
                    "dim_M": dim_m,
                    "dim_X": dim_x,
                    "rank_D": rank_d,
                    "torsion_number": l,
                });
                Output::new(format!("{l}\n"), &doc)
            }
            Request::Screen { system, weight, kmax } => {
                let c = screener::Candidate::new(system.clone(), weight.clone())?;
                let v = screener::screen_with(&c, *kmax, &budget);
                Output::new(screen_text(&v), &v)
            }
            Request::Table => {
                let rows = screener::table_dims()?;
                let mut text = String::new();
                for r in &rows {
                    let label: Vec<String> = r.printed_label.iter().map(ToString::to_string).collect();
                    let _ = writeln!(
                        text,
                        "{:<12} ({:<5}) -> {} {:<7} dim {:<4} printed {:<4} {}",
                        r.group,
                        label.join(","),
                        r.system,
                        r.weight.to_string(),
                        r.dimension,
                        r.printed_dimension,
                        serde_json::to_value(r.status)?.as_str().unwrap_or_default(),
                    );
                }
                Output::new(text, &rows)
            }
        }
    }
}

fn roots(s: &RootSystem) -> Result<Output> {
    #[derive(Serialize)]
    struct Root<'a> {
        coords: &'a [i64],
        weight: &'a Weight,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        system: String,
        rank: usize,
        dim_algebra: usize,
        cartan: &'a [Vec<i64>],
        symmetrizer: &'a [i64],
        highest_root: Option<&'a [i64]>,
        positive_roots: Vec<Root<'a>>,
    }
    let doc = Doc {
        system: s.label(),
        rank: s.rank(),
        dim_algebra: s.dim_algebra(),
        cartan: s.cartan(),
        symmetrizer: s.symmetrizer(),
        highest_root: s.highest_root(),
        positive_roots: s
            .positive_roots()
            .iter()
            .zip(s.positive_root_weights())
            .map(|(c, w)| Root { coords: c, weight: w })
            .collect(),
    };
    let mut text = format!("{}  rank {}  dim {}\ncartan\n", doc.system, doc.rank, doc.dim_algebra);
    for row in s.cartan() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
        let _ = writeln!(text, "{}", cells.join(""));
    }
    let _ = writeln!(text, "positive roots ({})", s.num_positive_roots());
    for r in &doc.positive_roots {
        let _ = writeln!(text, "  {} -> {}", Weight::new(r.coords.to_vec()), r.weight);
    }
    Output::new(text, &doc)
}

fn decomposition(d: ModuleDecomposition) -> Result<Output> {
    #[derive(Serialize)]
    struct Doc<'a> {
        terms: &'a ModuleDecomposition,
        #[serde(with = "hololab_core::serde_int")]
        total_dimension: Dim,
    }
    let mut text = String::new();
    for t in &d.terms {
        let _ = writeln!(text, "{} x{} dim {}", t.weight, t.multiplicity, t.dimension);
    }
    let total = d.total_dimension();
    let _ = writeln!(text, "total {total}");
    Output::new(
        text,
        &Doc {
            terms: &d,
            total_dimension: total.clone(),
        },
    )
}

fn report_text(r: &CohomologyReport) -> String {
    let mut text = String::new();
    for (q, e) in &r.h {
        let _ = writeln!(text, "h^{q} = {e}");
    }
    let _ = writeln!(text, "euler = {}", r.euler);
    let _ = writeln!(text, "tier = {}", r.tier);
    text
}

fn bundle_output(f: &FilteredBundle, budget: &Budget) -> Result<Output> {
    let report = homog::cohomology_with(f, budget)?;
    let mut text = format!("{}  rank {}\n", f.marking(), f.rank());
    for p in f.pieces() {
        let _ = writeln!(text, "  {} x{} dim {}", p.weight, p.multiplicity, p.dimension);
    }
    text.push_str(&report_text(&report));
    Output::new(text, &json!({ "bundle": f, "cohomology": report }))
}

fn entry(e: &Option<homog::CohomologyEntry>) -> String {
    e.as_ref().map_or_else(|| "-".to_string(), ToString::to_string)
}

fn legendre_text(d: &LegendreDatum, a: &LegendreAnalysis) -> String {
    let mut text = format!(
        "X = {}  dim X = {}  L = {}\n",
        d.marking(),
        a.dim_x,
        d.line_weight()
    );
    let _ = writeln!(text, "dim_M = {}", a.dim_m);
    let _ = writeln!(text, "g_ind_dim = {}", entry(&a.g_ind_dim));
    let _ = writeln!(text, "conn_space_dim = {}", entry(&a.conn_space_dim));
    let _ = writeln!(text, "torsion_obstruction = {}", entry(&a.torsion_obstruction));
    let _ = writeln!(text, "curvature_space = {}", entry(&a.curvature_space));
    for l in &a.higher {
        let degrees: Vec<String> = l.report.h.iter().map(|(q, e)| format!("h^{q} = {e}")).collect();
        let _ = writeln!(
            text,
            "k = {}: {}  euler = {}  tier = {}",
            l.k,
            degrees.join("  "),
            l.report.euler,
            l.report.tier
        );
    }
    if let Some(why) = &a.incomplete {
        let _ = writeln!(text, "incomplete: {why}");
    }
    text
}

fn kodaira_text(a: &KodairaAnalysis) -> String {
    format!(
        "h0_N = {}\nh1_N = {}\nobstruction1 = {}\nobstruction2 = {}\ng_dim = {}\nverdict = {}\n",
        a.h0_n,
        a.h1_n,
        a.obstruction1,
        a.obstruction2,
        a.g_dim,
        serde_json::to_value(a.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    )
}

fn screen_text(v: &ScreenVerdict) -> String {
    let c = &v.candidate;
    let mut text = format!(
        "{} {}  dim_rep = {}  X = {}  dim_G = {}\n",
        c.system.label(),
        c.highest_weight,
        c.dim_rep,
        c.marking,
        v.dim_group
    );
    let _ = writeln!(text, "classification = {}", v.classification);
    if let Some(t) = &v.enlargement_target_dim {
        let _ = writeln!(text, "enlargement_target_dim = {t}");
    }
    if let Some(a) = &v.analysis {
        let _ = writeln!(text, "g_ind_dim = {}", entry(&a.g_ind_dim));
        let _ = writeln!(text, "conn_space_dim = {}", entry(&a.conn_space_dim));
        let _ = writeln!(text, "torsion_obstruction = {}", entry(&a.torsion_obstruction));
        let _ = writeln!(text, "curvature_space = {}", entry(&a.curvature_space));
    }
    for d in &v.diagnostics {
        let _ = writeln!(text, "note: {d}");
    }
    text
}

fn sweep_line(v: &ScreenVerdict) -> String {
    let c = &v.candidate;
    let g = v
        .analysis
        .as_ref()
        .map_or_else(|| "-".to_string(), |a| entry(&a.g_ind_dim));
    format!(
        "{} {} dim_rep = {} dim_G = {} g_ind_dim = {} classification = {}",
        c.system.label(),
        c.highest_weight,
        c.dim_rep,
        v.dim_group,
        g,
        v.classification
    )
}

pub fn sweep(max_rank: usize, max_level: u32, kmax: usize, jobs: usize, json: bool) -> Result<Vec<String>> {
    let config = SweepConfig {
        max_rank,
        max_level,
        kmax,
        jobs,
        budget: Budget::default(),
    };
    let verdicts = screener::sweep(&config)?;
    verdicts
        .iter()
        .map(|v| {
            if json {
                serde_json::to_string(v).context("serializing verdict")
            } else {
                Ok(sweep_line(v))
            }
        })
        .collect()
}
