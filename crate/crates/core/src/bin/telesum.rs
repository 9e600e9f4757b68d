//! Command-line surface: catalog proofs, ad-hoc telescoping, series
//! evaluation, and certificate verification, with human-readable and JSON
//! reports.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use telesum::catalog::{
    proof_task, proof_tasks, series_entries, series_entry, z_task, z_tasks, ProofTask,
};
use telesum::error::{Error, Result};
use telesum::hyperterm::{parse_term, HyperTerm};
use telesum::mpoly::MPoly;
use telesum::numeric::{eval_series, eval_term_series, eval_weighted_series, matched_digits_vs};
use telesum::prover::{
    prove_and_validate, prove_pair, verify_z_identity, ProofReport, ProofStatus,
};
use telesum::rat::{parse_rat, render_rat, Rat};
use telesum::ratfunc::RatFunc;
use telesum::telescope::{find_telescoper, verify_certificate, Telescoper};

#[derive(Parser)]
#[command(
    name = "telesum",
    about = "Creative-telescoping proofs and rigorous evaluation of series for 1/pi",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a paired-kernel proof task (catalog example or task file).
    Prove(ProveArgs),
    /// Find a telescoping operator and certificate for one kernel.
    Telescope(TelescopeArgs),
    /// Evaluate a series to high precision and compare to its closed form.
    Eval(EvalArgs),
    /// Re-verify a telescoper + certificate emitted by `telescope --json`.
    VerifyCert(VerifyCertArgs),
    /// List the built-in catalog.
    List(ListArgs),
}

#[derive(Args)]
struct ProveArgs {
    /// Catalog example number (1-5).
    #[arg(long, conflicts_with = "task")]
    example: Option<u32>,
    /// Task file (metadata lines plus [a]/[b] kernel sections).
    #[arg(long)]
    task: Option<String>,
    #[arg(long, default_value_t = 60)]
    digits: u32,
    #[arg(long, default_value_t = 6)]
    max_order: usize,
    /// Boundary-check range for the recurrence variable, as A..B.
    #[arg(long, default_value = "0..20")]
    k_range: String,
    #[arg(long)]
    json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct TelescopeArgs {
    /// Term file in the kernel DSL.
    #[arg(long, conflicts_with = "example")]
    term: Option<String>,
    /// Catalog example number (1-5); use --side to pick the kernel.
    #[arg(long)]
    example: Option<u32>,
    /// Which kernel of the example: a/left or b/right.
    #[arg(long, default_value = "a")]
    side: String,
    #[arg(long, default_value_t = 6)]
    max_order: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// Catalog series id (e.g. 65-8, anchor).
    series: Option<String>,
    /// Term file in the kernel DSL instead of a catalog id.
    #[arg(long, conflicts_with = "series")]
    term: Option<String>,
    /// Apply a + b*theta at z = z0: three values A B Z0.
    #[arg(long, num_args = 3, value_names = ["A", "B", "Z0"])]
    weighted: Option<Vec<String>>,
    #[arg(long, default_value_t = 60)]
    digits: u32,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyCertArgs {
    /// Term file in the kernel DSL.
    #[arg(long)]
    term: String,
    /// Telescoper JSON as emitted by `telescope --json`.
    #[arg(long)]
    cert: String,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ListArgs {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Prove(a) => cmd_prove(&a),
        Command::Telescope(a) => cmd_telescope(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::VerifyCert(a) => cmd_verify_cert(&a),
        Command::List(a) => cmd_list(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 1 = verification failure, 2 = usage error, 3 = internal error.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Divergent(_) => 1,
        Error::Internal(_) | Error::Inconsistent => 3,
        _ => 2,
    }
}

fn parse_k_range(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Usage(format!("bad k-range `{s}`, expected A..B")))?;
    let lo: i64 = a
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("bad k-range bound `{a}`")))?;
    let hi: i64 = b
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("bad k-range bound `{b}`")))?;
    if lo > hi {
        return Err(Error::Usage(format!("empty k-range `{s}`")));
    }
    Ok((lo, hi))
}

fn emit(text: String, out: &Option<String>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| Error::Internal(format!("cannot write {path}: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// JSON rendering of exact objects
// ---------------------------------------------------------------------------

/// Nested dense coefficient lists, innermost entries "p/q" strings; the outer
/// level runs over powers of vars[0].
fn mpoly_json(p: &MPoly, vars: &[String]) -> Value {
    match vars.split_first() {
        None => Value::String(render_rat(
            &p.as_constant().unwrap_or_else(|| Rat::from_integer(0.into())),
        )),
        Some((v, rest)) => Value::Array(
            p.as_upoly(v)
                .iter()
                .map(|c| mpoly_json(c, rest))
                .collect(),
        ),
    }
}

fn mpoly_from_json(v: &Value, var_names: &[String]) -> Result<MPoly> {
    match var_names.split_first() {
        None => {
            let s = v
                .as_str()
                .ok_or_else(|| Error::Usage("expected rational string in certificate".into()))?;
            Ok(MPoly::constant(parse_rat(s)?))
        }
        Some((name, rest)) => {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Usage("expected coefficient array in certificate".into()))?;
            let coeffs = arr
                .iter()
                .map(|c| mpoly_from_json(c, rest))
                .collect::<Result<Vec<_>>>()?;
            Ok(MPoly::from_upoly(name, &coeffs))
        }
    }
}

fn telescoper_json(t: &Telescoper, extra_vars: &[String]) -> Value {
    let mut coeff_vars = vec![t.rec_var.clone()];
    coeff_vars.extend(extra_vars.iter().cloned());
    let mut cert_vars = vec![t.sum_var.clone(), t.rec_var.clone()];
    cert_vars.extend(extra_vars.iter().cloned());
    json!({
        "order": t.order,
        "coeffs": t.coeffs.iter().map(|c| mpoly_json(c, &coeff_vars)).collect::<Value>(),
        "certificate": {
            "vars": cert_vars,
            "num": mpoly_json(t.certificate.num(), &cert_vars),
            "den": mpoly_json(t.certificate.den(), &cert_vars),
        },
        "sumVar": t.sum_var,
        "recVar": t.rec_var,
    })
}

fn telescoper_from_json(v: &Value) -> Result<Telescoper> {
    let get = |k: &str| {
        v.get(k)
            .ok_or_else(|| Error::Usage(format!("certificate JSON missing `{k}`")))
    };
    let order = get("order")?
        .as_u64()
        .ok_or_else(|| Error::Usage("bad `order`".into()))? as usize;
    let sum_var = get("sumVar")?
        .as_str()
        .ok_or_else(|| Error::Usage("bad `sumVar`".into()))?
        .to_string();
    let rec_var = get("recVar")?
        .as_str()
        .ok_or_else(|| Error::Usage("bad `recVar`".into()))?
        .to_string();
    let cert = get("certificate")?;
    let cert_vars: Vec<String> = cert
        .get("vars")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Usage("bad certificate `vars`".into()))?
        .iter()
        .map(|x| x.as_str().unwrap_or_default().to_string())
        .collect();
    let coeff_vars: Vec<String> = std::iter::once(rec_var.clone())
        .chain(cert_vars.iter().filter(|v| **v != sum_var && **v != rec_var).cloned())
        .collect();
    let coeffs = get("coeffs")?
        .as_array()
        .ok_or_else(|| Error::Usage("bad `coeffs`".into()))?
        .iter()
        .map(|c| mpoly_from_json(c, &coeff_vars))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() != order + 1 {
        return Err(Error::Usage("coeffs length does not match order".into()));
    }
    let num = mpoly_from_json(
        cert.get("num")
            .ok_or_else(|| Error::Usage("certificate missing `num`".into()))?,
        &cert_vars,
    )?;
    let den = mpoly_from_json(
        cert.get("den")
            .ok_or_else(|| Error::Usage("certificate missing `den`".into()))?,
        &cert_vars,
    )?;
    if den.is_zero() {
        return Err(Error::Usage("certificate denominator is zero".into()));
    }
    let certificate = RatFunc::from_poly(num).div(&RatFunc::from_poly(den));
    Ok(Telescoper {
        order,
        coeffs,
        certificate,
        sum_var,
        rec_var,
    })
}

fn proof_report_json(rep: &ProofReport, extra_vars: &[String]) -> Value {
    let telescopers: Vec<Value> = [&rep.telescoper_a, &rep.telescoper_b]
        .iter()
        .filter_map(|t| t.as_ref())
        .map(|t| telescoper_json(t, extra_vars))
        .collect();
    let cert_check = |c: &Option<telesum::telescope::CertificateCheckReport>| match c {
        None => Value::Null,
        Some(c) => json!({
            "identityHolds": c.identity_holds,
            "boundaryAtZero": c.boundary_at_zero,
            "tailVanishes": c.tail_vanishes,
        }),
    };
    json!({
        "task": rep.task_id,
        "telescopers": telescopers,
        "certificateChecks": [cert_check(&rep.certificate_a), cert_check(&rep.certificate_b)],
        "operatorsEqual": rep.operators_equal,
        "initialValues": rep.initial_values.iter().map(|iv| json!({
            "k": iv.k,
            "r": render_rat(&iv.r),
            "s": render_rat(&iv.s),
            "equal": iv.equal,
        })).collect::<Value>(),
        "leadingCoeffNonvanishing": rep.leading_coeff_nonvanishing,
        "carlson": {
            "note": rep.carlson_note,
            "samples": rep.carlson_samples.iter().map(|(k, d)| json!({
                "k": render_rat(k),
                "digitsMatched": d,
            })).collect::<Value>(),
        },
        "specialization": match rep.specialization_digits {
            Some(d) => json!({ "digitsMatched": d }),
            None => Value::Null,
        },
        "status": rep.status.label(),
    })
}

fn proof_report_text(rep: &ProofReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("task: {}\n", rep.task_id));
    if let (Some(a), Some(b)) = (&rep.telescoper_a, &rep.telescoper_b) {
        s.push_str(&format!(
            "telescopers: order {} / order {}, operators equal: {}\n",
            a.order, b.order, rep.operators_equal
        ));
    }
    for iv in &rep.initial_values {
        s.push_str(&format!(
            "  k={}: r={} s={} {}\n",
            iv.k,
            render_rat(&iv.r),
            render_rat(&iv.s),
            if iv.equal { "ok" } else { "MISMATCH" }
        ));
    }
    for (k, d) in &rep.carlson_samples {
        s.push_str(&format!(
            "carlson sample k={}: {} digits agreement\n",
            render_rat(k),
            d
        ));
    }
    if let Some(d) = rep.specialization_digits {
        s.push_str(&format!("specialization matched {d} digits\n"));
    }
    s.push_str(&format!("status: {}", rep.status.label()));
    s
}

// ---------------------------------------------------------------------------
// task files
// ---------------------------------------------------------------------------

/// Owned task parsed from a file; leaks strings to satisfy the catalog
/// struct's 'static source fields (a handful of small allocations per run).
fn parse_task_file(path: &str) -> Result<ProofTask> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read task file {path}: {e}")))?;
    let mut meta: BTreeMap<String, String> = BTreeMap::new();
    let mut section: Option<char> = None;
    let mut a_src = String::new();
    let mut b_src = String::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[a]" => {
                section = Some('a');
                continue;
            }
            "[b]" => {
                section = Some('b');
                continue;
            }
            _ => {}
        }
        match section {
            None => {
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::Usage(format!("bad task line `{line}`, expected key = value"))
                })?;
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            Some('a') => {
                a_src.push_str(raw);
                a_src.push('\n');
            }
            _ => {
                b_src.push_str(raw);
                b_src.push('\n');
            }
        }
    }
    if a_src.is_empty() || b_src.is_empty() {
        return Err(Error::Usage(
            "task file needs both [a] and [b] kernel sections".into(),
        ));
    }
    // validate the kernels up front so malformed files fail as usage errors
    parse_term(&a_src)?;
    parse_term(&b_src)?;
    let leak = |s: String| -> &'static str { Box::leak(s.into_boxed_str()) };
    let id = leak(meta.remove("id").unwrap_or_else(|| "task".to_string()));
    let sum_var = leak(meta.remove("sum_var").unwrap_or_else(|| "n".to_string()));
    let rec_var = leak(meta.remove("rec_var").unwrap_or_else(|| "k".to_string()));
    let k_star = match meta.remove("k_star") {
        Some(s) => parse_rat(&s)?,
        None => Rat::from_integer(0.into()),
    };
    let series_id = match meta.remove("series") {
        Some(s) => {
            if series_entry(&s).is_none() {
                return Err(Error::Usage(format!("unknown catalog series `{s}`")));
            }
            leak(s)
        }
        None => "",
    };
    let scale = match meta.remove("scale") {
        Some(s) => parse_rat(&s)?,
        None => Rat::from_integer(1.into()),
    };
    let radicand: u64 = match meta.remove("scale_radicand") {
        Some(s) => s
            .parse()
            .map_err(|_| Error::Usage(format!("bad scale_radicand `{s}`")))?,
        None => 1,
    };
    if let Some(k) = meta.keys().next() {
        return Err(Error::Usage(format!("unknown task key `{k}`")));
    }
    if !series_id.is_empty() && k_star.is_integer() {
        return Err(Error::Usage(
            "a task with a `series` specialization needs a non-integer k_star".into(),
        ));
    }
    Ok(ProofTask {
        id,
        a_source: leak(a_src),
        b_source: leak(b_src),
        sum_var,
        rec_var,
        initial_range: 3,
        k_star,
        series_id,
        specialization_scale: telesum::bigfloat::AlgebraicConstant::new(scale, radicand, 0),
        anchor_id: None,
    })
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_prove(args: &ProveArgs) -> Result<u8> {
    if args.digits == 0 {
        return Err(Error::Usage("--digits must be positive".into()));
    }
    let k_range = parse_k_range(&args.k_range)?;
    match (args.example, &args.task) {
        (Some(n @ 1..=3), None) => {
            let task = proof_task(&format!("example-{n}")).expect("catalog id");
            let rep = prove_and_validate(&task, args.max_order, task.initial_range, k_range, args.digits)?;
            let text = if args.json {
                proof_report_json(&rep, &[]).to_string()
            } else {
                proof_report_text(&rep)
            };
            emit(text, &args.out)?;
            Ok(if rep.status == ProofStatus::FullyValidated { 0 } else { 1 })
        }
        (Some(n @ 4..=5), None) => {
            let task = z_task(&format!("example-{n}")).expect("catalog id");
            let ks: Vec<i64> = (0..=6).collect();
            let rep = verify_z_identity(
                &task.left()?,
                &task.right()?,
                &ks,
                true,
                args.max_order,
            )?;
            let tel = rep.telescope.as_ref().expect("telescoping requested");
            let ok = rep.all_equal
                && tel.certificates_hold
                && tel.operators_equal
                && tel.initial_values_equal;
            let status = if ok { "verified" } else { "failed" };
            let text = if args.json {
                json!({
                    "task": task.id,
                    "perK": rep.per_k.iter().map(|(k, e)| json!({"k": k, "equal": e})).collect::<Value>(),
                    "telescope": {
                        "orderLeft": tel.order_left,
                        "orderRight": tel.order_right,
                        "certificatesHold": tel.certificates_hold,
                        "operatorsEqual": tel.operators_equal,
                        "initialValuesEqual": tel.initial_values_equal,
                    },
                    "status": status,
                })
                .to_string()
            } else {
                format!(
                    "task: {}\nexact in z for k = 0..6: {}\ntelescoping orders {} / {}, operators equal: {}, initial values equal: {}\nstatus: {}",
                    task.id,
                    rep.all_equal,
                    tel.order_left,
                    tel.order_right,
                    tel.operators_equal,
                    tel.initial_values_equal,
                    status
                )
            };
            emit(text, &args.out)?;
            Ok(if ok { 0 } else { 1 })
        }
        (Some(n), None) => Err(Error::Usage(format!("--example must be 1..5, got {n}"))),
        (None, Some(path)) => {
            let task = parse_task_file(path)?;
            let has_specialization = !task.series_id.is_empty();
            let rep = if has_specialization {
                prove_and_validate(&task, args.max_order, task.initial_range, k_range, args.digits)?
            } else {
                prove_pair(&task, args.max_order, task.initial_range, k_range)?
            };
            let text = if args.json {
                proof_report_json(&rep, &[]).to_string()
            } else {
                proof_report_text(&rep)
            };
            emit(text, &args.out)?;
            let ok = if has_specialization {
                rep.status == ProofStatus::FullyValidated
            } else {
                rep.status == ProofStatus::ProvedForIntegers
            };
            Ok(if ok { 0 } else { 1 })
        }
        _ => Err(Error::Usage(
            "exactly one of --example N or --task FILE is required".into(),
        )),
    }
}

fn load_telescope_term(args: &TelescopeArgs) -> Result<(String, HyperTerm)> {
    match (&args.term, args.example) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read term file {path}: {e}")))?;
            Ok((path.clone(), parse_term(&text)?))
        }
        (None, Some(n @ 1..=3)) => {
            let task = proof_task(&format!("example-{n}")).expect("catalog id");
            match args.side.as_str() {
                "a" | "left" => Ok((format!("example-{n}/a"), task.a()?)),
                "b" | "right" => Ok((format!("example-{n}/b"), task.b()?)),
                s => Err(Error::Usage(format!("bad --side `{s}`"))),
            }
        }
        (None, Some(n @ 4..=5)) => {
            let task = z_task(&format!("example-{n}")).expect("catalog id");
            match args.side.as_str() {
                "a" | "left" => Ok((format!("example-{n}/left"), task.left()?)),
                "b" | "right" => Ok((format!("example-{n}/right"), task.right()?)),
                s => Err(Error::Usage(format!("bad --side `{s}`"))),
            }
        }
        (None, Some(n)) => Err(Error::Usage(format!("--example must be 1..5, got {n}"))),
        _ => Err(Error::Usage(
            "exactly one of --term FILE or --example N is required".into(),
        )),
    }
}

fn cmd_telescope(args: &TelescopeArgs) -> Result<u8> {
    let (label, term) = load_telescope_term(args)?;
    let vars = term.vars.clone();
    if vars.len() < 2 {
        return Err(Error::Usage(
            "telescoping needs a summation variable and a recurrence variable".into(),
        ));
    }
    let sum_var = vars[0].clone();
    let rec_var = vars[1].clone();
    let extra: Vec<String> = vars[2..].to_vec();
    let Some(t) = find_telescoper(&term, &sum_var, &rec_var, args.max_order)? else {
        emit(
            format!("{label}: no telescoper up to order {}", args.max_order),
            &args.out,
        )?;
        return Ok(1);
    };
    let check = verify_certificate(&term, &t)?;
    let text = if args.json {
        let mut v = telescoper_json(&t, &extra);
        v.as_object_mut()
            .expect("object")
            .insert("identityHolds".to_string(), json!(check.identity_holds));
        v.to_string()
    } else {
        let coeffs: Vec<String> = t.coeffs.iter().map(|c| c.render()).collect();
        format!(
            "{label}: order {} telescoper\ncoeffs (by power of the shift): [{}]\ncertificate R = {}\ncertificate identity holds: {}",
            t.order,
            coeffs.join(", "),
            t.certificate.render(),
            check.identity_holds
        )
    };
    emit(text, &args.out)?;
    Ok(if check.identity_holds { 0 } else { 1 })
}

fn cmd_eval(args: &EvalArgs) -> Result<u8> {
    if args.digits == 0 {
        return Err(Error::Usage("--digits must be positive".into()));
    }
    let weighted = match &args.weighted {
        None => None,
        Some(w) => Some((parse_rat(&w[0])?, parse_rat(&w[1])?, parse_rat(&w[2])?)),
    };
    let (label, ev, closed) = match (&args.series, &args.term) {
        (Some(id), None) => {
            let entry = series_entry(id)
                .ok_or_else(|| Error::Usage(format!("unknown catalog series `{id}`")))?;
            let ev = match &weighted {
                None => eval_series(&entry, args.digits)?,
                Some((a, b, z0)) => eval_weighted_series(&entry.kernel()?, a, b, z0, args.digits)?,
            };
            // the catalog closed form describes the unweighted sum only
            let closed = if weighted.is_none() {
                Some(entry.closed_form.clone())
            } else {
                None
            };
            (id.clone(), ev, closed)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read term file {path}: {e}")))?;
            let term = parse_term(&text)?;
            let ev = match &weighted {
                None => eval_term_series(&term, &BTreeMap::new(), args.digits)?,
                Some((a, b, z0)) => eval_weighted_series(&term, a, b, z0, args.digits)?,
            };
            (path.clone(), ev, None)
        }
        _ => {
            return Err(Error::Usage(
                "exactly one of a series id or --term FILE is required".into(),
            ))
        }
    };
    let value = ev.total();
    let decimal = value.to_decimal(args.digits);
    let matched = match &closed {
        Some(cf) => {
            let target = cf.value(args.digits)?;
            Some((cf.render(), matched_digits_vs(&ev, &target)))
        }
        None => None,
    };
    let text = if args.json {
        json!({
            "input": label,
            "digits": args.digits,
            "value": decimal,
            "termsUsed": ev.terms_used,
            "closedForm": match &matched {
                Some((cf, d)) => json!({ "form": cf, "digitsMatched": d }),
                None => Value::Null,
            },
        })
        .to_string()
    } else {
        let mut s = format!("{label} at {} digits:\n{decimal}\n({} terms summed)", args.digits, ev.terms_used);
        if let Some((cf, d)) = &matched {
            s.push_str(&format!("\nmatched {d} digits vs {cf}"));
        }
        s
    };
    emit(text, &args.out)?;
    Ok(0)
}

fn cmd_verify_cert(args: &VerifyCertArgs) -> Result<u8> {
    let term_text = fs::read_to_string(&args.term)
        .map_err(|e| Error::Usage(format!("cannot read term file {}: {e}", args.term)))?;
    let term = parse_term(&term_text)?;
    let cert_text = fs::read_to_string(&args.cert)
        .map_err(|e| Error::Usage(format!("cannot read certificate file {}: {e}", args.cert)))?;
    let v: Value = serde_json::from_str(&cert_text)
        .map_err(|e| Error::Usage(format!("bad certificate JSON: {e}")))?;
    let t = telescoper_from_json(&v)?;
    let check = verify_certificate(&term, &t)?;
    let text = if args.json {
        json!({
            "term": args.term,
            "order": t.order,
            "identityHolds": check.identity_holds,
        })
        .to_string()
    } else {
        format!(
            "order {} certificate: identity {}",
            t.order,
            if check.identity_holds { "holds" } else { "FAILS" }
        )
    };
    emit(text, &args.out)?;
    Ok(if check.identity_holds { 0 } else { 1 })
}

fn cmd_list(args: &ListArgs) -> Result<u8> {
    let text = if args.json {
        json!({
            "series": series_entries().iter().map(|e| json!({
                "id": e.id,
                "closedForm": e.closed_form.render(),
                "note": e.note,
            })).collect::<Value>(),
            "proofTasks": proof_tasks().iter().map(|t| json!({
                "id": t.id,
                "kStar": render_rat(&t.k_star),
                "series": t.series_id,
            })).collect::<Value>(),
            "zIdentities": z_tasks().iter().map(|t| json!({
                "id": t.id,
                "note": t.note,
            })).collect::<Value>(),
        })
        .to_string()
    } else {
        let mut s = String::from("series:\n");
        for e in series_entries() {
            s.push_str(&format!("  {:8} = {}  ({})\n", e.id, e.closed_form.render(), e.note));
        }
        s.push_str("proof tasks:\n");
        for t in proof_tasks() {
            s.push_str(&format!(
                "  {}  (k* = {}, specializes to {})\n",
                t.id,
                render_rat(&t.k_star),
                t.series_id
            ));
        }
        s.push_str("z-identities:\n");
        for t in z_tasks() {
            s.push_str(&format!("  {}  ({})\n", t.id, t.note));
        }
        s.pop();
        s
    };
    emit(text, &args.out)?;
    Ok(0)
}
