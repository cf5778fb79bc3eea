use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use entroscope::census::{
    count_words, default_tail, entropy_gap_report, spectral_entropy_reachable, GapOptions,
    WordCensus,
};
use entroscope::chain::{
    certified_gap_bound, h_transform, harmonic_vector, k_step_restricted_rowsum_check,
    rho_estimate, spectral_rho, spectral_rho_between, transform_identity_check,
    transition_probabilities, CertificateInputs, HarmonicOptions, IdentityMethod, Truncation,
    WeightedChain,
};
use entroscope::factor::{estimate_denseness_constant, ProductGraph};
use entroscope::graph::{estimate_connectivity_constant, forward_ball, materialize, Window};
use entroscope::schreier::{
    growth_sensitivity_report, CosetAction, Family, Free2ModCyclic, GridZ2, LineZ, SchreierGraph,
    SensitivityOptions, SensitivityReport,
};
use entroscope::{Budget, Error, ForbiddenSet, LabelledGraph, Result, VertexId};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{Outcome, Table};
use crate::source::{
    forbidden_set, require_forbidden, vertex, with_graph, ForbidArgs, GraphArgs, Source,
};

fn counts_table(plain: &WordCensus, restricted: Option<&WordCensus>) -> Table {
    let mut t = Table::new(&["n", "c_n", "c_n_F"]);
    for (n, c) in plain.counts.iter().enumerate() {
        let cf = restricted
            .map(|r| r.counts[n].to_string())
            .unwrap_or_default();
        t.push(vec![n.to_string(), c.to_string(), cf]);
    }
    t
}

/// Whole reachable part for finite graphs, a ball of `radius` otherwise.
fn inspection_window<G: LabelledGraph>(
    g: &G,
    x: &G::Vertex,
    finite: bool,
    radius: usize,
    budget: Budget,
) -> Result<Window<G::Vertex>> {
    let r = if finite {
        materialize(g, std::slice::from_ref(x), budget)?.len()
    } else {
        radius
    };
    forward_ball(g, x, r, budget)
}

const WINDOW_CAVEAT: &str =
    "the graph is infinite: denseness and connectedness were checked on a finite window only";

#[derive(Args, Clone, Debug, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub forbid: ForbidArgs,
    /// Largest word length counted.
    #[arg(long)]
    pub depth: usize,
}

pub fn count(args: &CountArgs, budget: Budget) -> Result<(Value, Outcome)> {
    if args.depth < 1 {
        return Err(Error::ParameterOutOfRange(
            "--depth must be at least 1".into(),
        ));
    }
    let source = Source::load(&args.graph)?;
    let words = source.forbidden_words(&args.forbid);
    with_graph!(&source, |g| {
        let x = vertex(g, args.graph.x.as_deref())?;
        let y = vertex(g, args.graph.y.as_deref())?;
        let f = forbidden_set(g, &words)?;
        let plain = count_words(g, &x, &y, args.depth, None, budget)?;
        let restricted = f
            .as_ref()
            .map(|f| count_words(g, &x, &y, args.depth, Some(f), budget))
            .transpose()?;
        let config = json!({
            "source": args.graph, "x": x.canonical(), "y": y.canonical(), "depth": args.depth,
            "forbidden": words, "budget": budget.0,
        });
        let mut out = Outcome::new(json!({ "census": plain, "census_forbidden": restricted }));
        out.table = Some(counts_table(&plain, restricted.as_ref()));
        Ok((config, out))
    })
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub forbid: ForbidArgs,
    /// Largest word length counted.
    #[arg(long)]
    pub depth: usize,
    /// Points in the tail fit; half the depth by default.
    #[arg(long)]
    pub tail: Option<usize>,
    /// Edge-probability floor for the certificate; 1/|alphabet| by default.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Denseness constant; certified on the window when omitted.
    #[arg(long = "D")]
    pub d: Option<usize>,
    /// Connectivity constant; declared or measured when omitted.
    #[arg(long)]
    pub conn_k: Option<usize>,
    /// Spectral radius of the uniform chain; declared or computed when omitted.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Use the bound for stochastic chains.
    #[arg(long)]
    pub stochastic: bool,
    /// Radius of the inspection window on infinite graphs.
    #[arg(long, default_value_t = 4)]
    pub window_radius: usize,
    /// Largest denseness constant tried.
    #[arg(long, default_value_t = 4)]
    pub d_max: usize,
}

pub fn analyze(args: &AnalyzeArgs, budget: Budget) -> Result<(Value, Outcome)> {
    let source = Source::load(&args.graph)?;
    let words = source.forbidden_words(&args.forbid);
    let finite = source.is_finite();
    with_graph!(&source, |g| analyze_on(g, finite, args, &words, budget))
}

fn analyze_on<G: LabelledGraph>(
    g: &G,
    finite: bool,
    args: &AnalyzeArgs,
    words: &[String],
    budget: Budget,
) -> Result<(Value, Outcome)> {
    let x = vertex(g, args.graph.x.as_deref())?;
    let y = vertex(g, args.graph.y.as_deref())?;
    let f = require_forbidden(g, words)?;
    let tail = args.tail.unwrap_or_else(|| default_tail(args.depth));
    let window = inspection_window(g, &x, finite, args.window_radius, budget)?;
    let mut warnings = Vec::new();
    if !finite {
        warnings.push(WINDOW_CAVEAT.to_string());
    }

    let d = match args.d {
        Some(d) => Some(d),
        None => estimate_denseness_constant(g, &f, &window, args.d_max, budget)?,
    };
    let conn_k = match args.conn_k.or(g.declared().conn_k) {
        Some(k) => Some(k),
        None if finite => estimate_connectivity_constant(g, &window, window.len().max(1), budget)?,
        None => None,
    };
    let rho = match args.rho.or(g.declared().rho) {
        Some(r) => Some(r),
        None if finite => Some(
            spectral_rho(
                &WeightedChain::uniform(g),
                std::slice::from_ref(&x),
                None,
                budget,
            )?
            .value,
        ),
        None => None,
    };
    let alpha = args.alpha.unwrap_or(1.0 / g.alphabet().len() as f64);
    let inputs = match (d, conn_k, rho) {
        (None, ..) => {
            warnings.push(format!(
                "F is not relatively dense with D <= {} on the window",
                args.d_max
            ));
            None
        }
        (Some(d), Some(k), Some(rho)) if !args.stochastic => {
            Some(CertificateInputs::general(alpha, d, f.max_len(), k, rho))
        }
        (Some(d), ..) => {
            if !args.stochastic {
                warnings.push("conn_K or rho unknown; using the stochastic bound".to_string());
            }
            Some(CertificateInputs::stochastic(alpha, d, f.max_len()))
        }
    }
    .map(|i| i.with_sigma(g.alphabet().len()));

    let opts = GapOptions {
        tail: Some(tail),
        budget,
        certificate: inputs.clone(),
        witness_radius: args.window_radius,
    };
    let report = entropy_gap_report(g, &x, &y, &f, args.depth, &opts)?;
    let spectral = if finite {
        let h = spectral_entropy_reachable(g, std::slice::from_ref(&x), budget)?;
        let p = ProductGraph::with_forbidden(g, &f)?;
        let hf = spectral_entropy_reachable(&p, &[p.start(x.clone())], budget)?;
        Some(json!({ "h": h, "h_forbidden": hf }))
    } else {
        None
    };
    warnings.extend(report.warnings.iter().cloned());

    let config = json!({
        "source": args.graph, "x": x.canonical(), "y": y.canonical(), "depth": args.depth, "tail": tail,
        "forbidden": f.to_strings(), "alpha": alpha, "D": d, "conn_K": conn_k, "rho": rho,
        "stochastic": args.stochastic, "window_radius": window.radius(), "d_max": args.d_max, "budget": budget.0,
    });
    let mut out = Outcome::new(json!({
        "h": report.h, "h_forbidden": report.h_forbidden, "gap": report.gap,
        "certificate": report.certificate, "certificate_inputs": inputs, "spectral": spectral,
        "census": report.census, "census_forbidden": report.census_forbidden,
    }));
    out.table = Some(counts_table(&report.census, Some(&report.census_forbidden)));
    out.certification_failed = report.certificate.is_none();
    out.warnings = warnings;
    Ok((config, out))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct BoundArgs {
    /// Edge-probability floor.
    #[arg(long)]
    pub alpha: f64,
    /// Denseness constant.
    #[arg(long = "D")]
    pub d: usize,
    /// Longest forbidden word; taken from --forbid when omitted.
    #[arg(long = "R")]
    pub r: Option<usize>,
    /// Use the bound for stochastic chains.
    #[arg(long)]
    pub stochastic: bool,
    /// Connectivity constant; declared by the graph when omitted.
    #[arg(long)]
    pub conn_k: Option<usize>,
    /// Spectral radius of the chain; required by the general bound unless
    /// the graph declares it.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Alphabet size, for the entropy form of the bound.
    #[arg(long)]
    pub sigma: Option<usize>,
    /// Check the k-step restricted row sums on this graph.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<std::path::PathBuf>,
    /// Check the row sums on a built-in family instead.
    #[arg(long)]
    pub family: Option<Family>,
    /// Vertex whose rows are checked; the first root by default.
    #[arg(long)]
    pub x: Option<String>,
    #[command(flatten)]
    pub forbid: ForbidArgs,
    /// Radius of the inspection window on infinite graphs.
    #[arg(long, default_value_t = 4)]
    pub window_radius: usize,
    /// Compare row sums in exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

pub fn bound(args: &BoundArgs, budget: Budget) -> Result<(Value, Outcome)> {
    let graph_args = GraphArgs {
        graph: args.graph.clone(),
        family: args.family,
        x: args.x.clone(),
        y: None,
    };
    let source = if args.graph.is_some() || args.family.is_some() {
        Some(Source::load(&graph_args)?)
    } else {
        None
    };
    let words = match &source {
        Some(s) => s.forbidden_words(&args.forbid),
        None => args.forbid.forbid.clone(),
    };
    let r = match (args.r, words.iter().map(|w| w.chars().count()).max()) {
        (Some(r), _) | (None, Some(r)) => r,
        (None, None) => return Err(Error::Parse("pass --R or --forbid".into())),
    };
    let declared = match &source {
        Some(source) => with_graph!(source, |g| g.declared()),
        None => Default::default(),
    };
    let mut inputs = if args.stochastic {
        CertificateInputs::stochastic(args.alpha, args.d, r)
    } else {
        let k = args.conn_k.or(declared.conn_k).ok_or(Error::MissingConnK)?;
        let rho = args
            .rho
            .or(declared.rho)
            .ok_or_else(|| Error::Parse("the general bound needs --rho".into()))?;
        CertificateInputs::general(args.alpha, args.d, r, k, rho)
    };
    if let Some(s) = args.sigma {
        inputs = inputs.with_sigma(s);
    }
    let certificate = certified_gap_bound(&inputs)?;

    let mut warnings = Vec::new();
    let rowsums = match &source {
        None => None,
        Some(source) => {
            if !source.is_finite() {
                warnings.push(WINDOW_CAVEAT.to_string());
            }
            let finite = source.is_finite();
            Some(with_graph!(source, |g| {
                let chain = WeightedChain::uniform(g);
                if (chain.alpha() - args.alpha).abs() > 1e-15 {
                    warnings.push(format!(
                        "row sums use the uniform chain with alpha = {}",
                        chain.alpha()
                    ));
                }
                let x = vertex(g, args.x.as_deref())?;
                let f = require_forbidden(g, &words)?;
                let w = inspection_window(g, &x, finite, args.window_radius, budget)?;
                k_step_restricted_rowsum_check(
                    &chain,
                    &f,
                    args.d,
                    args.d + f.max_len(),
                    &w,
                    args.exact,
                    budget,
                )
            })?)
        }
    };
    let config = json!({
        "inputs": inputs, "forbidden": words, "source": graph_args, "window_radius": args.window_radius,
        "exact": args.exact, "budget": budget.0,
    });
    let failed = rowsums.as_ref().is_some_and(|r| !r.is_ok());
    let mut out = Outcome::new(json!({ "certificate": certificate, "rowsum_check": rowsums }));
    out.certification_failed = failed;
    out.warnings = warnings;
    Ok((config, out))
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationArg {
    #[default]
    Reflecting,
    Absorbing,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct RhoArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub forbid: ForbidArgs,
    /// Horizon of the probability table (at least 10).
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
    /// Points in the tail fit; half the depth by default.
    #[arg(long)]
    pub tail: Option<usize>,
    /// Print the table in exact rationals.
    #[arg(long)]
    pub exact: bool,
    /// Also build a harmonic vector and check the h-transform identity.
    #[arg(long)]
    pub identity: bool,
    /// Radius of the harmonic-vector window on infinite graphs.
    #[arg(long, default_value_t = 8)]
    pub radius: usize,
    /// Boundary treatment of the harmonic-vector window.
    #[arg(long, value_enum, default_value_t)]
    pub truncation: TruncationArg,
    /// Largest accepted harmonic residual.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Largest accepted identity discrepancy; 1e-6 on finite graphs, 0.05 otherwise.
    #[arg(long)]
    pub threshold: Option<f64>,
}

pub fn rho(args: &RhoArgs, budget: Budget) -> Result<(Value, Outcome)> {
    let source = Source::load(&args.graph)?;
    let words = source.forbidden_words(&args.forbid);
    let finite = source.is_finite();
    with_graph!(&source, |g| rho_on(g, finite, args, &words, budget))
}

fn probability_column<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    x: &G::Vertex,
    y: &G::Vertex,
    n: usize,
    f: Option<&ForbiddenSet>,
    exact: bool,
    budget: Budget,
) -> Result<Vec<String>> {
    Ok(if exact {
        transition_probabilities::<G, BigRational>(chain, x, y, n, f, budget)?
            .iter()
            .map(|p| p.to_string())
            .collect()
    } else {
        transition_probabilities::<G, f64>(chain, x, y, n, f, budget)?
            .iter()
            .map(|p| format!("{p:e}"))
            .collect()
    })
}

fn rho_on<G: LabelledGraph>(
    g: &G,
    finite: bool,
    args: &RhoArgs,
    words: &[String],
    budget: Budget,
) -> Result<(Value, Outcome)> {
    let x = vertex(g, args.graph.x.as_deref())?;
    let y = vertex(g, args.graph.y.as_deref())?;
    let f = forbidden_set(g, words)?;
    let chain = WeightedChain::uniform(g);
    let tail = args.tail.unwrap_or(args.depth / 2);
    let plain = rho_estimate(&chain, &x, &y, args.depth, None, Some(tail), budget)?;
    let restricted = f
        .as_ref()
        .map(|f| rho_estimate(&chain, &x, &y, args.depth, Some(f), Some(tail), budget))
        .transpose()?;
    let spectral = if finite {
        let p = spectral_rho_between(&chain, &x, &y, None, budget)?;
        let pf = f
            .as_ref()
            .map(|f| spectral_rho_between(&chain, &x, &y, Some(f), budget))
            .transpose()?;
        Some(json!({ "rho": p.value, "rho_forbidden": pf.map(|s| s.value) }))
    } else {
        None
    };

    let mut table = Table::new(&["n", "p_n", "p_n_F"]);
    let pcol = probability_column(&chain, &x, &y, args.depth, None, args.exact, budget)?;
    let fcol = match &f {
        Some(f) => probability_column(&chain, &x, &y, args.depth, Some(f), args.exact, budget)?,
        None => vec![String::new(); pcol.len()],
    };
    for (n, (p, q)) in pcol.into_iter().zip(fcol).enumerate() {
        table.push(vec![n.to_string(), p, q]);
    }

    let mut warnings = Vec::new();
    let mut failed = false;
    let threshold = args.threshold.unwrap_or(if finite { 1e-6 } else { 0.05 });
    let radius = if finite {
        materialize(g, std::slice::from_ref(&x), budget)?
            .len()
            .max(2)
    } else {
        args.radius
    };
    let identity = if args.identity {
        let f = f
            .as_ref()
            .ok_or_else(|| Error::Parse("--identity needs --forbid".into()))?;
        let opts = HarmonicOptions {
            truncation: match args.truncation {
                TruncationArg::Reflecting => Truncation::Reflecting,
                TruncationArg::Absorbing => Truncation::Absorbing,
            },
            tolerance: args.tolerance,
            budget,
            ..Default::default()
        };
        let hv = harmonic_vector(&chain, &x, radius, &opts)?;
        let method = if finite {
            IdentityMethod::Spectral
        } else {
            IdentityMethod::TailSlope {
                horizon: args.depth,
            }
        };
        let check = transform_identity_check(&chain, &hv, f, &x, &y, method, threshold, budget)?;
        failed = !check.passed;
        let conn_k = match g.declared().conn_k {
            Some(k) => Some(k),
            None if finite => {
                let w = forward_ball(g, &x, radius, budget)?;
                estimate_connectivity_constant(g, &w, radius, budget)?
            }
            None => None,
        };
        let transform = match h_transform(&chain, &hv, conn_k) {
            Ok(t) => Some(json!({
                "alpha_bar": t.alpha_bar, "conn_K": t.conn_k, "min_weight": t.min_weight,
                "max_row_deviation": t.max_row_deviation, "dropped_edges": t.dropped_edges,
            })),
            Err(e) => {
                warnings.push(format!("no h-transform: {e}"));
                None
            }
        };
        let values: BTreeMap<String, f64> =
            hv.values.iter().map(|(v, h)| (v.canonical(), *h)).collect();
        Some(json!({ "harmonic": hv, "values": values, "transform": transform, "check": check }))
    } else {
        None
    };
    if !finite && args.identity {
        warnings.push("harmonic vector computed on a truncated window".to_string());
    }

    let config = json!({
        "source": args.graph, "x": x.canonical(), "y": y.canonical(), "depth": args.depth, "tail": tail,
        "forbidden": words, "exact": args.exact, "identity": args.identity, "radius": radius,
        "truncation": args.truncation, "tolerance": args.tolerance, "threshold": threshold, "budget": budget.0,
    });
    let mut out = Outcome::new(json!({
        "rho": plain, "rho_forbidden": restricted, "spectral": spectral, "identity": identity,
    }));
    out.table = Some(table);
    out.warnings = warnings;
    out.certification_failed = failed;
    Ok((config, out))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SchreierArgs {
    /// Built-in family: line_Z, grid_Z2 or free2_mod_cyclic.
    #[arg(long)]
    pub family: Family,
    #[command(flatten)]
    pub forbid: ForbidArgs,
    /// Largest word length counted.
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
    /// Points in the tail fit; half the depth by default.
    #[arg(long)]
    pub tail: Option<usize>,
    /// Radius of the inspection window.
    #[arg(long, default_value_t = 4)]
    pub window_radius: usize,
    /// Largest denseness constant tried.
    #[arg(long, default_value_t = 3)]
    pub d_max: usize,
}

fn sensitivity<A: CosetAction>(
    g: SchreierGraph<A>,
    words: &[String],
    depth: usize,
    opts: &SensitivityOptions,
) -> Result<SensitivityReport> {
    let f = require_forbidden(&g, words)?;
    growth_sensitivity_report(&g, &f, depth, opts)
}

pub fn schreier(args: &SchreierArgs, budget: Budget) -> Result<(Value, Outcome)> {
    let tail = args.tail.unwrap_or_else(|| default_tail(args.depth));
    let opts = SensitivityOptions {
        tail: Some(tail),
        window_radius: args.window_radius,
        d_max: args.d_max,
        budget,
    };
    let run = |words: &[String]| -> Result<SensitivityReport> {
        match args.family {
            Family::LineZ => sensitivity(SchreierGraph::new(LineZ), words, args.depth, &opts),
            Family::GridZ2 => sensitivity(SchreierGraph::new(GridZ2), words, args.depth, &opts),
            Family::Free2ModCyclic => {
                sensitivity(SchreierGraph::new(Free2ModCyclic), words, args.depth, &opts)
            }
        }
    };
    let report = run(&args.forbid.forbid)?;
    let config = json!({
        "family": args.family, "forbidden": report.forbidden, "depth": args.depth, "tail": tail,
        "window_radius": args.window_radius, "d_max": args.d_max, "budget": budget.0,
    });
    let mut warnings = vec![WINDOW_CAVEAT.to_string()];
    warnings.extend(report.report.warnings.iter().cloned());
    let mut out = Outcome::new(&report);
    out.table = Some(counts_table(
        &report.report.census,
        Some(&report.report.census_forbidden),
    ));
    out.certification_failed = !report.is_certified();
    out.warnings = warnings;
    Ok((config, out))
}
