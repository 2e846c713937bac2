use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use une::bigraph::VertexSet;
use une::gadget::{
    sample_gadget, verify_unique_neighbour_upto, GadgetParams, VerifyOptions, VerifyStatus,
};
use une::io::{read_graph, read_regular_graph, write_graph};
use une::nbwalk::{
    build_nb_operators, char_roots, count_nb_paths_bruteforce, count_nb_paths_operator,
    lemma6_bound_check_with, lemma8_upper_check, lemma9_lower_check_upto, p_polynomial,
    theorem2_chain, verify_operator_polynomial_identity, IntMatrix, NbError, PathMode,
};
use une::params::{
    eml_bound, qhat, theorem1_wiring_with, theorem2_bound, theorem2_constants, Domain,
    Interpretation, QhatOptions, Strictness,
};
use une::precise::digits_to_bits;
use une::product::{gadget_copies_check, routed_product, write_pcm};
use une::spectral::{
    incidence_graph, incidence_spectrum_identity_check, kahale_bound, spectrum_with_tolerance,
};

use crate::error::{code, CliError};
use crate::{BoundCheck, Cli, Command, CountMethod, DomainArg, GadgetCommand, Global};

/// What a successful command prints and the status it exits with.
pub struct Output {
    pub json: Value,
    pub summary: Option<String>,
    pub code: u8,
}

impl Output {
    fn ok(json: Value, summary: impl Into<String>) -> Self {
        Output {
            json,
            summary: Some(summary.into()),
            code: 0,
        }
    }

    /// A check ran to completion and its result is `passed`.
    fn check(json: Value, passed: bool, summary: impl Into<String>) -> Self {
        Output {
            json,
            summary: Some(summary.into()),
            code: if passed { 0 } else { code::CHECK_FAILED },
        }
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// A `BigInt` as a JSON number with every digit kept.
pub fn big_number(x: &BigInt) -> Value {
    serde_json::from_str(&x.to_string()).expect("integer literal")
}

fn int_matrix(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(big_number).collect()))
            .collect(),
    )
}

/// Parses `"0,3,5"` into a left vertex set. Whitespace is ignored and the
/// empty string is the empty set.
pub fn parse_set(text: &str) -> Result<VertexSet, CliError> {
    let mut members = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v = part
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("bad vertex '{part}' in --set")))?;
        members.push(v);
    }
    Ok(VertexSet::left(members))
}

fn verify_options(global: &Global, no_prune: bool, audit: bool) -> VerifyOptions {
    VerifyOptions {
        budget: global.budget,
        prune: !no_prune,
        audit,
    }
}

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::usage(format!("{name} must be finite, got {x}")))
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    finite("--tolerance", g.tolerance)?;
    if g.digits() == 0 {
        return Err(CliError::usage("precision must be at least one digit"));
    }
    match &cli.command {
        Command::Spectrum { input } => cmd_spectrum(g, input),
        Command::Incidence { input, out } => cmd_incidence(g, input, out.as_deref()),
        Command::Nbops { input, max_len } => {
            let graph = read_graph(input)?;
            let ops = build_nb_operators(&graph, *max_len)?;
            let lens = 0..=*max_len;
            let json = json!({
                "c": ops.c,
                "d": ops.d,
                "max_len": max_len,
                "LL": lens.clone().map(|l| int_matrix(ops.ll(l))).collect::<Vec<_>>(),
                "RL": lens.clone().map(|l| int_matrix(ops.rl(l))).collect::<Vec<_>>(),
                "LR": lens.clone().map(|l| int_matrix(ops.lr(l))).collect::<Vec<_>>(),
                "RR": lens.map(|l| int_matrix(ops.rr(l))).collect::<Vec<_>>(),
            });
            Ok(Output::ok(
                json,
                format!("operators up to length {max_len}"),
            ))
        }
        Command::Nbcount {
            input,
            set,
            len,
            method,
        } => {
            let graph = read_graph(input)?;
            let s = parse_set(set)?;
            let count = match method {
                CountMethod::Operator => {
                    let ops = build_nb_operators(&graph, *len)?;
                    count_nb_paths_operator(&ops, &s, *len)?
                }
                CountMethod::AllInS => {
                    count_nb_paths_bruteforce(&graph, &s, *len, PathMode::AllInS)?.into()
                }
                CountMethod::EndpointsInS => {
                    count_nb_paths_bruteforce(&graph, &s, *len, PathMode::EndpointsInS)?.into()
                }
            };
            let json = json!({
                "set": s.members(),
                "len": len,
                "method": method_name(*method),
                "count": big_number(&count),
            });
            Ok(Output::ok(json, format!("{count} paths")))
        }
        Command::Poly { c, d, n, at } => {
            let p = p_polynomial(*c, *d, *n)?;
            let mut json = json!({
                "c": c,
                "d": d,
                "n": n,
                "coefficients": p,
                "polynomial": p.to_string(),
            });
            if let Some(x) = at {
                let x = finite("--at", *x)?;
                let roots = char_roots(*c, *d, x);
                let closed = roots.eval(*n as u32);
                json["at"] = json!({
                    "x": x,
                    "value": p.eval_f64(x),
                    "closed_form": [closed.re, closed.im],
                    "roots": roots,
                });
            }
            Ok(Output::ok(json, format!("p_{n}(x) = {p}")))
        }
        Command::Boundcheck { check } => cmd_boundcheck(g, check),
        Command::Gadget { action } => cmd_gadget(g, action),
        Command::Product {
            big,
            gadget,
            out,
            export_pcm,
        } => {
            let big = read_graph(big)?;
            let gadget = read_graph(gadget)?;
            let rp = routed_product(&big, &gadget)?;
            write_graph(&rp.product, out)?;
            if let Some(path) = export_pcm {
                write_pcm(&rp.product, path)?;
            }
            let copies = gadget_copies_check(&rp);
            let json = json!({
                "n_left": rp.product.n_left(),
                "n_right": rp.product.n_right(),
                "edges": rp.product.n_edges(),
                "biregularity": rp.product.biregularity(),
                "expected_degrees": rp.expected_degrees(),
                "gadget_copies": match copies {
                    Ok(()) => json!({ "result": "pass" }),
                    Err((v, j)) => json!({ "result": "mismatch", "v": v, "j": j }),
                },
            });
            let summary = format!(
                "product: {} left, {} right, {} edges",
                rp.product.n_left(),
                rp.product.n_right(),
                rp.product.n_edges()
            );
            if copies.is_err() {
                return Err(
                    CliError::new(code::PRODUCT_FAILED, "gadget-copy-mismatch", summary)
                        .with_detail(json),
                );
            }
            Ok(Output::ok(json, summary))
        }
        Command::Qhat {
            c0,
            alpha,
            interpretation,
            strict,
            scan_margin,
            q,
        } => {
            let alpha = finite("--alpha", *alpha)?;
            let interp = Interpretation {
                domain: match interpretation {
                    DomainArg::AllIntegers => Domain::AllIntegers,
                    DomainArg::PrimePowers => Domain::PrimePowers,
                },
                strictness: if *strict {
                    Strictness::Strict
                } else {
                    Strictness::NonStrict
                },
            };
            let opts = QhatOptions {
                scan_margin: *scan_margin,
                digits: g.digits(),
                ..QhatOptions::default()
            };
            let report = qhat(*c0, alpha, interp, &opts)?;
            let mut json = to_value(&report);
            let mut summary = format!("q_hat({c0}, {alpha}) = {}", report.q_hat);
            if let Some(q) = q {
                let sheet = theorem1_wiring_with(*c0, alpha, *q, &opts)?;
                summary.push_str(&format!(
                    "; q = {q} gives degrees ({}, {})",
                    sheet.product_left_degree, sheet.product_right_degree
                ));
                json["wiring"] = to_value(&sheet);
            }
            Ok(Output::ok(json, summary))
        }
        Command::Constants { c, d, eps } => {
            let k = theorem2_constants(*c, *d, finite("--eps", *eps)?)?;
            let summary = format!("ell = {}, delta = 2^{}", k.ell, k.log2_delta);
            Ok(Output::ok(to_value(&k), summary))
        }
        Command::Bounds { c, d, eps } => {
            let eps = finite("--eps", *eps)?;
            let eml = eml_bound(*c, *d, eps)?;
            let t2 = theorem2_bound(*c, *d, eps);
            let kahale = kahale_bound(*d, eps)?;
            let json = json!({
                "c": c,
                "d": d,
                "eps": eps,
                "small_set": t2,
                "mixing_lemma": eml,
                "vertex_expansion_regular": kahale,
                "small_set_below_mixing": t2 < eml.bound,
            });
            let summary = format!("small-set {t2:.6} vs mixing {:.6}", eml.bound);
            Ok(Output::check(json, t2 < eml.bound, summary))
        }
        Command::Pipeline(args) => crate::pipeline::run(g, args),
    }
}

fn method_name(m: CountMethod) -> &'static str {
    match m {
        CountMethod::Operator => "operator",
        CountMethod::AllInS => "all-in-s",
        CountMethod::EndpointsInS => "endpoints-in-s",
    }
}

fn cmd_spectrum(g: &Global, input: &Path) -> Result<Output, CliError> {
    let graph = read_graph(input)?;
    let report = spectrum_with_tolerance(&graph, g.tolerance)?;
    let summary = format!(
        "({}, {})-biregular, ramanujan = {}",
        report.c, report.d, report.ramanujan
    );
    let code = if report.ramanujan {
        0
    } else {
        code::NOT_RAMANUJAN
    };
    Ok(Output {
        json: to_value(&report),
        summary: Some(summary),
        code,
    })
}

fn cmd_incidence(g: &Global, input: &Path, out: Option<&Path>) -> Result<Output, CliError> {
    let base = read_regular_graph(input)?;
    let inc = incidence_graph(&base);
    if let Some(path) = out {
        write_graph(&inc, path)?;
    }
    let identity = incidence_spectrum_identity_check(&base)?;
    let report = spectrum_with_tolerance(&inc, g.tolerance)?;
    let passed = report.ramanujan && identity.exact_identity;
    let json = json!({
        "n_left": inc.n_left(),
        "n_right": inc.n_right(),
        "identity": identity,
        "spectrum": report,
    });
    let summary = format!(
        "incidence graph ramanujan = {}, residual {:.2e}",
        report.ramanujan, identity.max_residual
    );
    Ok(Output {
        json,
        summary: Some(summary),
        code: if passed { 0 } else { code::NOT_RAMANUJAN },
    })
}

fn cmd_boundcheck(g: &Global, check: &BoundCheck) -> Result<Output, CliError> {
    match check {
        BoundCheck::Lemma6 { c, d, ell, samples } => {
            let r = lemma6_bound_check_with(*c, *d, *ell, *samples, digits_to_bits(g.digits()))?;
            let summary = format!(
                "{} violations, worst ratio {:.4} (ell_min {})",
                r.violations.len(),
                r.worst.ratio,
                r.ell_min
            );
            Ok(Output::check(to_value(&r), r.holds(), summary))
        }
        BoundCheck::Lemma8 { input, set, ell } => {
            let graph = read_graph(input)?;
            let r = lemma8_upper_check(&graph, &parse_set(set)?, *ell).map_err(not_ramanujan)?;
            let summary = format!("{} <= {:.3}: {}", r.count, r.rhs, r.holds);
            Ok(Output::check(to_value(&r), r.holds, summary))
        }
        BoundCheck::Lemma9 { input, max_len } => {
            let graph = read_graph(input)?;
            let r = lemma9_lower_check_upto(&graph, *max_len)?;
            let failed = r.entries.iter().filter(|e| !e.holds).count();
            let summary = format!("{} lengths, {failed} failures", r.entries.len());
            Ok(Output::check(to_value(&r), r.holds(), summary))
        }
        BoundCheck::Chain { input, set, ell } => {
            let graph = read_graph(input)?;
            let r = theorem2_chain(&graph, &parse_set(set)?, *ell).map_err(not_ramanujan)?;
            let summary = format!(
                "{:.3} <= {} <= {} <= {:.3}: {}",
                r.lower, r.inner, r.outer, r.upper, r.holds
            );
            Ok(Output::check(to_value(&r), r.holds, summary))
        }
        BoundCheck::Identity { input, n } => {
            let graph = read_graph(input)?;
            match verify_operator_polynomial_identity(&graph, *n) {
                Ok(mismatches) => Ok(Output::ok(
                    json!({ "n": n, "mismatches": mismatches }),
                    format!("A_{} = p_{n}(MMᵀ) holds", 2 * n),
                )),
                Err(NbError::IdentityMismatch(m)) => {
                    let json = json!({ "n": n, "mismatches": 1, "first": m });
                    Ok(Output::check(json, false, "operator identity fails"))
                }
                Err(e) => Err(e.into()),
            }
        }
        BoundCheck::Kahale { d, eps } => {
            let b = kahale_bound(*d, finite("--eps", *eps)?)?;
            Ok(Output::ok(
                json!({ "d": d, "eps": eps, "bound": b }),
                format!("{b}"),
            ))
        }
        BoundCheck::Roots { c, d, x } => {
            if *c < 2 || *d < 2 {
                return Err(NbError::InvalidDegrees { c: *c, d: *d }.into());
            }
            let r = char_roots(*c, *d, finite("--x", *x)?);
            let product = ((c - 1) * (d - 1)) as f64;
            let json = json!({
                "roots": r,
                "lambda1_norm_sqr": r.lambda1.norm_sqr(),
                "target": product,
            });
            Ok(Output::ok(
                json,
                format!("lambda1 = {}, lambda2 = {}", r.lambda1, r.lambda2),
            ))
        }
    }
}

/// Non-Ramanujan inputs get their own exit status.
fn not_ramanujan(e: NbError) -> CliError {
    match e {
        NbError::NotRamanujan => CliError::new(code::NOT_RAMANUJAN, "not-ramanujan", e.to_string()),
        other => other.into(),
    }
}

fn cmd_gadget(g: &Global, action: &GadgetCommand) -> Result<Output, CliError> {
    match action {
        GadgetCommand::Sample { l, r, c, d, out } => {
            let params = GadgetParams {
                l: *l,
                r: *r,
                c: *c,
                d: *d,
                seed: g.seed,
            };
            let graph = sample_gadget(&params)?;
            write_graph(&graph, out)?;
            let json = json!({
                "params": params,
                "edges": graph.n_edges(),
                "biregularity": graph.biregularity(),
                "generator": "chacha8",
            });
            Ok(Output::ok(
                json,
                format!("sampled {l}x{r} gadget with seed {}", g.seed),
            ))
        }
        GadgetCommand::Verify {
            input,
            k,
            no_prune,
            audit,
        } => {
            let graph = read_graph(input)?;
            let start = Instant::now();
            let cert =
                verify_unique_neighbour_upto(&graph, *k, verify_options(g, *no_prune, *audit))?;
            let mut json = to_value(&cert);
            json["wall_time"] = json!(start.elapsed().as_secs_f64());
            let summary = format!(
                "{:?}: verified to k = {} after {} subsets",
                cert.status, cert.verified_k, cert.subsets_checked
            );
            let audit_failed = cert.audit.as_ref().is_some_and(|a| a.counterexamples > 0);
            let code = match cert.status {
                VerifyStatus::BudgetExceeded => code::BUDGET,
                VerifyStatus::Refuted => code::CHECK_FAILED,
                VerifyStatus::Verified if audit_failed => code::CHECK_FAILED,
                VerifyStatus::Verified => 0,
            };
            Ok(Output {
                json,
                summary: Some(summary),
                code,
            })
        }
    }
}
