//! `une pipeline`: certify the big graph, obtain a verified gadget, build the
//! routed product and audit small sets of the result.
//!
//! Stage failures exit with `NOT_RAMANUJAN`, `GADGET_FAILED`,
//! `PRODUCT_FAILED` or `AUDIT_FAILED`. The error detail carries every stage
//! report collected up to the failure.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use une::bigraph::{BipartiteMultigraph, VertexSet};
use une::gadget::{
    sample_gadget, verify_unique_neighbour_upto, GadgetCertificate, GadgetParams, VerifyOptions,
    VerifyStatus,
};
use une::io::{read_graph, write_graph};
use une::params::theorem2_bound;
use une::product::{
    gadget_copies_check, inheritance_check, port_set, routed_product, write_pcm, Inheritance,
    ProductError, RoutedProduct,
};
use une::spectral::spectrum_with_tolerance;

use crate::commands::{to_value, Output};
use crate::error::{code, CliError};
use crate::Global;

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// Big (c,d)-biregular graph.
    #[arg(long)]
    pub big: PathBuf,
    /// Gadget file; when absent a gadget is sampled from `--c0` and `--r0` or `--alpha`.
    #[arg(long)]
    pub gadget: Option<PathBuf>,
    /// Left degree of a sampled gadget.
    #[arg(long)]
    pub c0: Option<usize>,
    /// Right side size of a sampled gadget.
    #[arg(long, conflicts_with = "alpha")]
    pub r0: Option<usize>,
    /// Product right degree over product left degree; fixes `R0` for sampling.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Size up to which the gadget must have unique neighbours.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sampling attempts, at seeds `seed, seed+1, ...`.
    #[arg(long, default_value_t = 16)]
    pub retries: u64,
    /// Largest audited set size.
    #[arg(long, default_value_t = 3)]
    pub audit_size: usize,
    /// Sets per size; sizes with fewer subsets are enumerated exhaustively.
    #[arg(long, default_value_t = 1000)]
    pub audit_samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub export_pcm: Option<PathBuf>,
}

struct Stages {
    reports: Map<String, Value>,
}

impl Stages {
    fn fail(
        &self,
        code: u8,
        kind: &'static str,
        stage: &str,
        message: impl Into<String>,
    ) -> CliError {
        let mut detail = self.reports.clone();
        detail.insert("failed_stage".into(), json!(stage));
        CliError::new(code, kind, message).with_detail(Value::Object(detail))
    }

    fn record(&mut self, stage: &str, report: Value) {
        self.reports.insert(stage.into(), report);
    }
}

/// `⌊1 + √((d−1)/(c−1))⌋`, the small-set right-degree bound at `ε = 0`.
fn default_k(c: usize, d: usize) -> usize {
    if c < 2 {
        return d;
    }
    theorem2_bound(c, d, 0.0).floor() as usize
}

pub fn run(g: &Global, args: &PipelineArgs) -> Result<Output, CliError> {
    let mut stages = Stages {
        reports: Map::new(),
    };

    let big = read_graph(&args.big)?;
    let spec = spectrum_with_tolerance(&big, g.tolerance)
        .map_err(|e| stages.fail(code::NOT_RAMANUJAN, "spectrum", "spectrum", e.to_string()))?;
    let (c, d) = (spec.c, spec.d);
    let ramanujan = spec.ramanujan;
    stages.record("spectrum", to_value(&spec));
    if !ramanujan {
        return Err(stages.fail(
            code::NOT_RAMANUJAN,
            "not-ramanujan",
            "spectrum",
            "big graph is not bipartite Ramanujan",
        ));
    }

    let k = args.k.unwrap_or_else(|| default_k(c, d));
    let opts = VerifyOptions {
        budget: g.budget,
        ..VerifyOptions::default()
    };
    let start = Instant::now();
    let (gadget, cert, source) = match &args.gadget {
        Some(path) => {
            let gadget = read_graph(path)?;
            if gadget.n_left() != d {
                let e = ProductError::PortMismatch {
                    gadget_left: gadget.n_left(),
                    d,
                };
                return Err(stages.fail(
                    code::PRODUCT_FAILED,
                    "port-mismatch",
                    "product",
                    e.to_string(),
                ));
            }
            let cert = verify_unique_neighbour_upto(&gadget, k, opts)
                .map_err(|e| stages.fail(code::GADGET_FAILED, "gadget", "gadget", e.to_string()))?;
            (gadget, cert, json!({ "file": path.display().to_string() }))
        }
        None => sample_verified(g, args, d, k, opts, &stages)?,
    };
    let mut gadget_report = to_value(&cert);
    gadget_report["source"] = source;
    gadget_report["biregularity"] = json!(gadget.biregularity());
    gadget_report["wall_time"] = json!(start.elapsed().as_secs_f64());
    stages.record("gadget", gadget_report);
    match cert.status {
        VerifyStatus::Verified => {}
        VerifyStatus::BudgetExceeded => {
            return Err(stages.fail(
                code::BUDGET,
                "budget",
                "gadget",
                "subset budget exhausted before k was reached",
            ));
        }
        VerifyStatus::Refuted => {
            return Err(stages.fail(
                code::GADGET_FAILED,
                "gadget-refuted",
                "gadget",
                format!(
                    "gadget has unique neighbours only up to k = {}, need {k}",
                    cert.verified_k
                ),
            ));
        }
    }

    let rp = routed_product(&big, &gadget).map_err(|e| {
        let kind = match e {
            ProductError::PortMismatch { .. } => "port-mismatch",
            _ => "product",
        };
        stages.fail(code::PRODUCT_FAILED, kind, "product", e.to_string())
    })?;
    let copies = gadget_copies_check(&rp);
    let degrees_ok = rp.product.biregularity() == rp.expected_degrees();
    let edges_ok = rp.product.n_edges() == big.n_right() * gadget.n_edges();
    stages.record(
        "product",
        json!({
            "n_left": rp.product.n_left(),
            "n_right": rp.product.n_right(),
            "edges": rp.product.n_edges(),
            "biregularity": rp.product.biregularity(),
            "degree_law": degrees_ok,
            "edge_count_law": edges_ok,
            "gadget_copies": copies.is_ok(),
        }),
    );
    if !(degrees_ok && edges_ok && copies.is_ok()) {
        return Err(stages.fail(
            code::PRODUCT_FAILED,
            "product-laws",
            "product",
            "product violates a structural law",
        ));
    }
    if let Some(path) = &args.out {
        write_graph(&rp.product, path)?;
    }
    if let Some(path) = &args.export_pcm {
        write_pcm(&rp.product, path)?;
    }

    let audit = audit(&rp, cert.verified_k, args, g.seed).map_err(CliError::from)?;
    let passed = audit.failures.is_empty();
    stages.record("audit", audit.to_json());
    if !passed {
        return Err(stages.fail(
            code::AUDIT_FAILED,
            "audit",
            "audit",
            format!("{} audited sets failed", audit.failures.len()),
        ));
    }

    let summary = format!(
        "pipeline passed: ({c}, {d}) big graph, gadget verified to k = {}, {} sets audited",
        cert.verified_k, audit.sets
    );
    let mut json = Value::Object(stages.reports);
    json["passed"] = json!(true);
    Ok(Output {
        json,
        summary: Some(summary),
        code: 0,
    })
}

fn sample_verified(
    g: &Global,
    args: &PipelineArgs,
    d: usize,
    k: usize,
    opts: VerifyOptions,
    stages: &Stages,
) -> Result<(BipartiteMultigraph, GadgetCertificate, Value), CliError> {
    let c0 = args
        .c0
        .ok_or_else(|| CliError::usage("give --gadget or --c0 with --r0 or --alpha"))?;
    let l = d;
    let r = match (args.r0, args.alpha) {
        (Some(r), _) => r,
        (None, Some(alpha)) => {
            // d0 = α·c·c0 and R0 = L·c0/d0.
            let c = stages.reports["spectrum"]["c"].as_u64().unwrap_or(0) as f64;
            let r = l as f64 / (alpha * c);
            if !(r.is_finite() && r >= 1.0 && (r - r.round()).abs() < 1e-9) {
                return Err(CliError::usage(format!(
                    "alpha = {alpha} gives non-integral R0 = {r}"
                )));
            }
            r.round() as usize
        }
        (None, None) => return Err(CliError::usage("sampling needs --r0 or --alpha")),
    };
    if r == 0 || (l * c0) % r != 0 {
        return Err(CliError::usage(format!(
            "L*c0 = {} is not divisible by R0 = {r}",
            l * c0
        )));
    }
    let mut attempts = Vec::new();
    let mut last = None;
    for t in 0..args.retries.max(1) {
        let params = GadgetParams {
            l,
            r,
            c: c0,
            d: l * c0 / r,
            seed: g.seed.wrapping_add(t),
        };
        let gadget = sample_gadget(&params)
            .map_err(|e| stages.fail(code::GADGET_FAILED, "gadget", "gadget", e.to_string()))?;
        let cert = verify_unique_neighbour_upto(&gadget, k, opts)
            .map_err(|e| stages.fail(code::GADGET_FAILED, "gadget", "gadget", e.to_string()))?;
        attempts.push(json!({ "seed": params.seed, "verified_k": cert.verified_k }));
        let done = cert.status != VerifyStatus::Refuted;
        last = Some((gadget, cert, params));
        if done {
            break;
        }
    }
    let (gadget, cert, params) = last.expect("at least one attempt");
    Ok((
        gadget,
        cert,
        json!({ "sampled": params, "attempts": attempts }),
    ))
}

struct Audit {
    sets: usize,
    exhaustive_sizes: Vec<usize>,
    covered: usize,
    with_unique_neighbour: usize,
    lifted: usize,
    failures: Vec<Value>,
}

impl Audit {
    fn to_json(&self) -> Value {
        json!({
            "sets": self.sets,
            "exhaustive_sizes": self.exhaustive_sizes,
            "covered": self.covered,
            "with_unique_neighbour": self.with_unique_neighbour,
            "lifted_unique_neighbours": self.lifted,
            "failures": self.failures,
        })
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k as u128).fold(1u128, |acc, i| acc.saturating_mul(n as u128 - i) / (i + 1))
}

/// Lexicographic `k`-subsets of `0..n`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A set is covered when some big right vertex sees it through at most `k`
/// ports. The verified gadget then gives that port set a unique neighbour,
/// and inheritance must carry it to the product.
fn audit(
    rp: &RoutedProduct,
    k: usize,
    args: &PipelineArgs,
    seed: u64,
) -> Result<Audit, ProductError> {
    let n = rp.big.n_left();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Audit {
        sets: 0,
        exhaustive_sizes: Vec::new(),
        covered: 0,
        with_unique_neighbour: 0,
        lifted: 0,
        failures: Vec::new(),
    };
    let check = |members: &[usize], out: &mut Audit| -> Result<(), ProductError> {
        let s = VertexSet::left(members.iter().copied());
        out.sets += 1;
        let mut covered = false;
        for &v in rp.big.neighbourhood(&s)?.members() {
            if port_set(&rp.big, v, &s)?.len() > k {
                continue;
            }
            covered = true;
            match inheritance_check(rp, &s, v)? {
                Inheritance::Pass { lifted: 0 } => {
                    out.failures.push(
                        json!({ "set": members, "v": v, "reason": "no-gadget-unique-neighbour" }),
                    );
                }
                Inheritance::Pass { lifted } => out.lifted += lifted,
                Inheritance::Counterexample { v, j } => {
                    out.failures
                        .push(json!({ "set": members, "v": v, "j": j, "reason": "not-inherited" }));
                }
            }
        }
        let unique = rp.product.has_unique_neighbour(&s)?;
        out.covered += usize::from(covered);
        out.with_unique_neighbour += usize::from(unique);
        if covered && !unique {
            out.failures
                .push(json!({ "set": members, "reason": "no-product-unique-neighbour" }));
        }
        Ok(())
    };
    for size in 1..=args.audit_size.min(n) {
        if binomial(n, size) <= args.audit_samples as u128 {
            out.exhaustive_sizes.push(size);
            let mut result = Ok(());
            for_each_subset(n, size, |m| {
                if result.is_ok() {
                    result = check(m, &mut out);
                }
            });
            result?;
        } else {
            for _ in 0..args.audit_samples {
                let mut m = sample(&mut rng, n, size).into_vec();
                m.sort_unstable();
                check(&m, &mut out)?;
            }
        }
    }
    Ok(out)
}
