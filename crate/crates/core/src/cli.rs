//! Batch command-line surface: one binary, subcommand per operation.
//!
//! Human-readable summaries go to standard output; JSON artifacts are
//! written only to files named with `--output`, so machine output never
//! mixes with progress text. Exit codes are a stable contract:
//!
//! * 0 — success, every requested claim or check holds;
//! * 1 — a claim or verification check failed;
//! * 2 — unreadable or malformed input (including usage errors);
//! * 3 — a configured resource cap was exceeded.

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::charcore::CharacteristicQuotient;
use crate::error::{Error, Result};
use crate::group::{Element, GroupDescriptor};
use crate::matrix::smith_normal_form;
use crate::pipeline::{
    construct_certificate, verify_certificate, Certificate, PipelineOptions,
};
use crate::separation::{separate, FiniteIndexWitness};
use crate::serial;
use crate::shifts::{
    equivariance_check, finext_embed, recode_report, rule_sweep, surjunctivity_check,
    CellularAutomaton, FiniteGroupTable, RecodingData, DEFAULT_MAX_CONFIGS,
};

#[derive(Parser)]
#[command(
    name = "finquot",
    version,
    about = "Finite-kernel quotients of semidirect products, with re-checkable certificates, \
             plus exhaustive finite shift-space checks"
)]
struct Cli {
    /// Worker threads for exhaustive sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a finite-kernel quotient certificate from a group and a seed set.
    Construct(ConstructArgs),
    /// Re-check every claim of a certificate from its own data.
    Verify(VerifyArgs),
    /// Exhaustive checks on shift spaces over finite groups.
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Find a finite-quotient witness separating the given kernel elements.
    Separate(SeparateArgs),
    /// Compute the automorphism-stable finite quotient determined by a witness.
    Core(CoreArgs),
    /// Smith normal form of an integer matrix.
    Snf(SnfArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Input document: group descriptor plus seed set.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the certificate JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also compute the finite kernel's order and the quotient's index.
    #[arg(long)]
    order: bool,
    /// Cap on the number of finite-symmetric-group homomorphisms enumerated.
    #[arg(long)]
    max_homs: Option<u64>,
    /// Cap on permutation degrees handled by order computations.
    #[arg(long)]
    max_degree: Option<usize>,
    /// Seed for the recorded random multiplicativity sample.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate to re-check.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the verification report JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap on permutation degrees handled by order re-computations.
    #[arg(long)]
    max_degree: Option<usize>,
}

#[derive(Subcommand)]
enum ShiftCommand {
    /// Sweep cellular automata for injectivity and surjectivity.
    Check(ShiftCheckArgs),
    /// Recode a shift over a group as a shift of its subgroup on blocks.
    Recode(ShiftRecodeArgs),
    /// Embed a finite group with a retracting subgroup into Sym(cosets) x subgroup.
    Embed(ShiftEmbedArgs),
}

#[derive(Args)]
struct ShiftCheckArgs {
    /// Input document: finite group, alphabet, memory set, optional rule.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the sweep report JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap on the configuration-space size.
    #[arg(long)]
    max_configs: Option<u64>,
}

#[derive(Args)]
struct ShiftRecodeArgs {
    /// Input document: finite group, alphabet, subgroup element list.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the recoding report JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap on the configuration-space size.
    #[arg(long)]
    max_configs: Option<u64>,
}

#[derive(Args)]
struct ShiftEmbedArgs {
    /// Input document: finite group, subgroup element list, retraction table.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the embedding report JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SeparateArgs {
    /// Input document: kernel group descriptor and nontrivial elements.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the witness JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CoreArgs {
    /// Witness document to derive the quotient from.
    #[arg(long, conflicts_with = "free")]
    input: Option<PathBuf>,
    /// Use the full finite-symmetric-group quotient of a free group instead.
    #[arg(long, requires = "rank", requires = "degree")]
    free: bool,
    /// Free rank for --free.
    #[arg(short = 'k', long)]
    rank: Option<usize>,
    /// Symmetric-group degree for --free.
    #[arg(short = 'd', long)]
    degree: Option<usize>,
    /// Cap on the number of homomorphisms enumerated.
    #[arg(long)]
    max_homs: Option<u64>,
    /// Cap on permutation degrees handled by the order computation.
    #[arg(long)]
    max_degree: Option<usize>,
    /// Where to write the quotient report JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SnfArgs {
    /// Input document: integer matrix.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the decomposition JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        // Ignore a second initialization (tests may call run() repeatedly).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Shift(ShiftCommand::Check(args)) => cmd_shift_check(args),
        Command::Shift(ShiftCommand::Recode(args)) => cmd_shift_recode(args),
        Command::Shift(ShiftCommand::Embed(args)) => cmd_shift_embed(args),
        Command::Separate(args) => cmd_separate(args),
        Command::Core(args) => cmd_core(args),
        Command::Snf(args) => cmd_snf(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------------------
// Input documents specific to the command line
// ---------------------------------------------------------------------------

/// Read the construct input: a semidirect descriptor plus a seed set given
/// either explicitly, as a ball radius in the whole group, or as a ball
/// radius in the kernel (kernel elements paired with the trivial quotient
/// part).
fn read_construct_input(path: &Path) -> Result<(GroupDescriptor, Vec<Element>)> {
    let doc = serial::read_document(path)?;
    serial::check_document(&doc, Some("construct"))?;
    let group = serial::descriptor_from_value(field(&doc, "group")?)?;
    let seed_v = field(&doc, "seed")?;
    let seed = if let Some(els) = opt_field(seed_v, "elements") {
        els.as_array()
            .ok_or_else(|| Error::Malformed("\"elements\" must be an array".into()))?
            .iter()
            .map(serial::element_from_value)
            .collect::<Result<Vec<_>>>()?
    } else if let Some(r) = opt_field(seed_v, "ball_radius") {
        crate::group::ball(&group, serial::as_usize(r)?)?
    } else if let Some(r) = opt_field(seed_v, "kernel_ball_radius") {
        let sd = match &group {
            GroupDescriptor::Semidirect(sd) => sd,
            _ => {
                return Err(Error::Malformed(
                    "kernel_ball_radius requires a semidirect group".into(),
                ))
            }
        };
        let q_identity = sd.quotient.identity();
        crate::group::ball(&sd.kernel, serial::as_usize(r)?)?
            .into_iter()
            .map(|k| Element::pair(k, q_identity.clone()))
            .collect()
    } else {
        return Err(Error::Malformed(
            "seed needs \"elements\", \"ball_radius\", or \"kernel_ball_radius\"".into(),
        ));
    };
    Ok((group, seed))
}

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.as_object()
        .ok_or_else(|| Error::Malformed("expected a JSON object".into()))?
        .get(key)
        .ok_or_else(|| Error::Malformed(format!("missing field \"{}\"", key)))
}

fn opt_field<'v>(v: &'v Value, key: &str) -> Option<&'v Value> {
    v.as_object().and_then(|o| o.get(key)).filter(|x| !x.is_null())
}

/// Finite groups for the shift commands: compact shorthand for cyclic
/// groups and products, a raw multiplication table, or any finite group
/// descriptor.
fn finite_group_from_value(v: &Value) -> Result<FiniteGroupTable> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Malformed("group \"kind\" must be a string".into()))?;
    match kind {
        "cyclic" => FiniteGroupTable::cyclic(serial::as_usize(field(v, "order")?)?),
        "cyclic_product" => {
            let orders: Vec<usize> = field(v, "orders")?
                .as_array()
                .ok_or_else(|| Error::Malformed("\"orders\" must be an array".into()))?
                .iter()
                .map(serial::as_usize)
                .collect::<Result<_>>()?;
            FiniteGroupTable::cyclic_product(&orders)
        }
        "table" => {
            let rows: Vec<Vec<usize>> = field(v, "table")?
                .as_array()
                .ok_or_else(|| Error::Malformed("\"table\" must be an array".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::Malformed("table rows must be arrays".into()))?
                        .iter()
                        .map(serial::as_usize)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            FiniteGroupTable::new(rows)
        }
        _ => {
            let desc = serial::descriptor_from_value(v)?;
            Ok(FiniteGroupTable::from_descriptor(&desc)?.0)
        }
    }
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| Error::Malformed(format!("\"{}\" must be an array", what)))?
        .iter()
        .map(serial::as_usize)
        .collect()
}

// ---------------------------------------------------------------------------
// Descriptions for summaries
// ---------------------------------------------------------------------------

fn describe_group(desc: &GroupDescriptor) -> String {
    match desc {
        GroupDescriptor::Free { rank } => format!("free group of rank {}", rank),
        GroupDescriptor::FreeAbelian { rank } => format!("free abelian group of rank {}", rank),
        GroupDescriptor::FinitePerm { degree, generators } => format!(
            "permutation group on {} points ({} generators)",
            degree,
            generators.len()
        ),
        GroupDescriptor::Semidirect(sd) => format!(
            "({}) acted on by ({}), action {}",
            describe_group(&sd.kernel),
            describe_group(&sd.quotient),
            sd.verification.as_str()
        ),
    }
}

fn describe_witness(w: &FiniteIndexWitness) -> String {
    match w {
        FiniteIndexWitness::PermImages { rank, degree, .. } => format!(
            "{} generator images in the symmetric group on {} points",
            rank, degree
        ),
        FiniteIndexWitness::Modulus { rank, modulus } => {
            format!("coordinate reduction modulo {} on rank {}", modulus, rank)
        }
        FiniteIndexWitness::Identity { degree, .. } => {
            format!("identity embedding at degree {}", degree)
        }
    }
}

fn describe_core(core: &CharacteristicQuotient) -> String {
    match core {
        CharacteristicQuotient::Free { rank, symmetric_degree } => format!(
            "joint quotient over all rank-{} homomorphisms to the symmetric group on {} points",
            rank, symmetric_degree
        ),
        CharacteristicQuotient::Abelian { rank, modulus } => {
            format!("rank-{} lattice reduced modulo {}", rank, modulus)
        }
        CharacteristicQuotient::Finite { degree, .. } => {
            format!("finite kernel kept whole at degree {}", degree)
        }
    }
}

fn claim_word(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "FAILED"
    }
}

fn print_certificate_summary(cert: &Certificate) {
    println!(
        "group: {}",
        describe_group(&GroupDescriptor::Semidirect(Box::new(cert.group.clone())))
    );
    println!("seed elements: {}", cert.seed.len());
    println!("kernel differences to keep alive: {}", cert.kernel_differences.len());
    println!("witness: {}", describe_witness(&cert.witness));
    println!("quotient: {}", describe_core(&cert.core));
    match (&cert.kernel_order, &cert.index) {
        (Some(order), Some(index)) => {
            println!("finite kernel order: {}", order);
            println!("index of the acting group in the quotient: {}", index);
        }
        _ => println!("finite kernel order: not requested (pass --order)"),
    }
    println!("claim quotient-map: {}", claim_word(cert.claims.quotient_map));
    println!("claim seed-injects: {}", claim_word(cert.claims.seed_injects));
    match cert.claims.finite_index {
        Some(b) => println!("claim finite-index: {}", claim_word(b)),
        None => println!("claim finite-index: not evaluated"),
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_construct(args: ConstructArgs) -> Result<i32> {
    let (group, seed) = read_construct_input(&args.input)?;
    let mut options = PipelineOptions {
        compute_order: args.order,
        ..PipelineOptions::default()
    };
    if let Some(m) = args.max_homs {
        options.max_homs = m;
    }
    if let Some(d) = args.max_degree {
        options.max_degree = d;
    }
    if let Some(s) = args.seed {
        options.sample_seed = s;
    }
    let cert = construct_certificate(&group, &seed, &options)?;
    print_certificate_summary(&cert);
    if let Some(out) = &args.output {
        serial::write_document(out, &serial::certificate_to_value(&cert))?;
        println!("certificate written to {}", out.display());
    }
    Ok(if cert.all_claims_hold() { 0 } else { 1 })
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let doc = serial::read_document(&args.input)?;
    let cert = serial::certificate_from_value(&doc)?;
    let report = verify_certificate(&cert)?;
    for check in &report.checks {
        if check.passed {
            println!("check {}: pass", check.name);
        } else {
            println!("check {}: FAIL ({})", check.name, check.detail);
        }
    }
    let _ = args.max_degree; // order re-checks use the certificate's own cap
    if let Some(out) = &args.output {
        serial::write_document(out, &serial::report_to_value(&report))?;
        println!("report written to {}", out.display());
    }
    if report.passed() {
        println!("all {} checks passed", report.checks.len());
        Ok(0)
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        println!("{} of {} checks failed", failed, report.checks.len());
        Ok(1)
    }
}

fn cmd_shift_check(args: ShiftCheckArgs) -> Result<i32> {
    let doc = serial::read_document(&args.input)?;
    serial::check_document(&doc, Some("shift_check"))?;
    let gt = finite_group_from_value(field(&doc, "group")?)?;
    let alphabet = serial::as_usize(field(&doc, "alphabet")?)?;
    let memory = usize_list(field(&doc, "memory")?, "memory")?;
    let max_configs = args.max_configs.unwrap_or(DEFAULT_MAX_CONFIGS);
    let results: Vec<(Option<u64>, crate::shifts::SurjunctivityReport)> =
        if let Some(rule_v) = opt_field(&doc, "rule") {
            let rule = usize_list(rule_v, "rule")?;
            let ca = CellularAutomaton::new(alphabet, memory, rule)?;
            let pairs = equivariance_check(&gt, &ca, max_configs)?;
            println!(
                "translation-equivariance verified on {} (element, configuration) pairs",
                pairs
            );
            vec![(None, surjunctivity_check(&gt, &ca, max_configs)?)]
        } else {
            rule_sweep(&gt, alphabet, &memory, max_configs)?
                .into_iter()
                .map(|(i, r)| (Some(i), r))
                .collect()
        };
    for (rule_index, report) in &results {
        let label = match rule_index {
            Some(i) => format!("rule {}", i),
            None => "given rule".to_string(),
        };
        println!(
            "{}: {} configurations, injective {}, surjective {}, collisions {}, missed {}",
            label,
            report.config_count,
            report.injective,
            report.surjective,
            report.collision_count,
            report.missed_count
        );
    }
    if results
        .iter()
        .all(|(_, r)| !(r.injective && !r.surjective))
    {
        println!("no injective-non-surjective map found");
    }
    if let Some(out) = &args.output {
        let encoded: Vec<Value> = results
            .iter()
            .map(|(rule_index, report)| {
                let mut v = serde_json::to_value(report)?;
                if let Some(i) = rule_index {
                    v.as_object_mut()
                        .expect("report is an object")
                        .insert("rule_index".into(), Value::from(*i));
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        let doc = serial::document("shift_check_report", vec![("results", Value::Array(encoded))]);
        serial::write_document(out, &doc)?;
        println!("report written to {}", out.display());
    }
    Ok(0)
}

fn cmd_shift_recode(args: ShiftRecodeArgs) -> Result<i32> {
    let doc = serial::read_document(&args.input)?;
    serial::check_document(&doc, Some("shift_recode"))?;
    let gt = finite_group_from_value(field(&doc, "group")?)?;
    let alphabet = serial::as_usize(field(&doc, "alphabet")?)?;
    let subgroup = usize_list(field(&doc, "subgroup")?, "subgroup")?;
    let max_configs = args.max_configs.unwrap_or(DEFAULT_MAX_CONFIGS);
    let rd = RecodingData::new(gt, &subgroup)?;
    let report = recode_report(&rd, alphabet, max_configs)?;
    println!(
        "subgroup order {}, transversal size {}, block alphabet {}^{}",
        report.subgroup_order, report.transversal_size, alphabet, report.transversal_size
    );
    println!(
        "recoded {} configurations: bijective {}, equivariant {} ({} pairs)",
        report.config_count, report.bijective, report.equivariant, report.equivariance_pairs
    );
    if let Some(out) = &args.output {
        let doc = serial::document("recode_report", vec![("report", serde_json::to_value(&report)?)]);
        serial::write_document(out, &doc)?;
        println!("report written to {}", out.display());
    }
    Ok(if report.bijective && report.equivariant { 0 } else { 1 })
}

fn cmd_shift_embed(args: ShiftEmbedArgs) -> Result<i32> {
    let doc = serial::read_document(&args.input)?;
    serial::check_document(&doc, Some("shift_embed"))?;
    let gt = finite_group_from_value(field(&doc, "group")?)?;
    let subgroup = usize_list(field(&doc, "subgroup")?, "subgroup")?;
    let retraction = usize_list(field(&doc, "retraction")?, "retraction")?;
    let report = finext_embed(&gt, &subgroup, &retraction)?;
    println!(
        "{} cosets; embedding injective {}, multiplicative {} (all pairs)",
        report.coset_count, report.injective, report.homomorphism
    );
    println!("index of the image in Sym(cosets) x subgroup: {}", report.index);
    if let Some(out) = &args.output {
        let images: Vec<Value> = report
            .images
            .iter()
            .map(|(perm, retract)| {
                serde_json::json!({
                    "coset_permutation": perm.images(),
                    "retract": retract,
                })
            })
            .collect();
        let doc = serial::document(
            "embedding_report",
            vec![
                ("coset_count", serial::usize_value(report.coset_count)),
                ("homomorphism", Value::Bool(report.homomorphism)),
                ("images", Value::Array(images)),
                (
                    "index",
                    serial::biguint_value(&num_bigint::BigUint::from(report.index)),
                ),
                ("injective", Value::Bool(report.injective)),
            ],
        );
        serial::write_document(out, &doc)?;
        println!("report written to {}", out.display());
    }
    Ok(if report.injective && report.homomorphism { 0 } else { 1 })
}

fn cmd_separate(args: SeparateArgs) -> Result<i32> {
    let doc = serial::read_document(&args.input)?;
    serial::check_document(&doc, Some("separate"))?;
    let group = serial::descriptor_from_value(field(&doc, "group")?)?;
    let elements = field(&doc, "elements")?
        .as_array()
        .ok_or_else(|| Error::Malformed("\"elements\" must be an array".into()))?
        .iter()
        .map(serial::element_from_value)
        .collect::<Result<Vec<_>>>()?;
    let witness = separate(&group, &elements)?;
    // Soundness is re-checked right here, element by element.
    let mut sound = true;
    for el in &elements {
        if !witness.separates(el)? {
            sound = false;
        }
    }
    println!("group: {}", describe_group(&group));
    println!("elements separated: {}", elements.len());
    println!("witness: {}", describe_witness(&witness));
    println!("soundness re-check: {}", if sound { "pass" } else { "FAIL" });
    if let Some(out) = &args.output {
        let doc = serial::document(
            "witness",
            vec![
                ("sound", Value::Bool(sound)),
                ("witness", serial::witness_to_value(&witness)),
            ],
        );
        serial::write_document(out, &doc)?;
        println!("witness written to {}", out.display());
    }
    Ok(if sound { 0 } else { 1 })
}

fn cmd_core(args: CoreArgs) -> Result<i32> {
    let max_homs = args.max_homs.unwrap_or(crate::charcore::DEFAULT_MAX_HOMS);
    let max_degree = args.max_degree.unwrap_or(crate::charcore::DEFAULT_MAX_DEGREE);
    let (core, evidence) = if args.free {
        // Direct construction at exactly the requested degree; the order
        // computation below still enforces the joint-degree cap.
        let core = CharacteristicQuotient::Free {
            rank: args.rank.expect("clap enforces --rank with --free"),
            symmetric_degree: args.degree.expect("clap enforces --degree with --free"),
        };
        (core, None)
    } else {
        let path = args.input.ok_or_else(|| {
            Error::InvalidInput("pass either --input <witness.json> or --free -k .. -d ..".into())
        })?;
        let doc = serial::read_document(&path)?;
        serial::check_document(&doc, Some("witness"))?;
        let witness = serial::witness_from_value(field(&doc, "witness")?)?;
        CharacteristicQuotient::from_witness(&witness, max_homs)?
    };
    println!("quotient: {}", describe_core(&core));
    if let Some(ev) = &evidence {
        println!(
            "witness block retained at index {} of the joint product",
            ev.block_index
        );
    }
    let order = core.order(max_homs, max_degree)?;
    println!("quotient order: {}", order);
    if let Some(out) = &args.output {
        let ev_value = match &evidence {
            Some(ev) => {
                let mut m = serde_json::Map::new();
                m.insert("block_index".into(), serial::biguint_value(&ev.block_index));
                Value::Object(m)
            }
            None => Value::Null,
        };
        let doc = serial::document(
            "core_report",
            vec![
                ("core", serial::core_to_value(&core)),
                ("evidence", ev_value),
                ("order", serial::biguint_value(&order)),
            ],
        );
        serial::write_document(out, &doc)?;
        println!("report written to {}", out.display());
    }
    Ok(0)
}

fn cmd_snf(args: SnfArgs) -> Result<i32> {
    let doc = serial::read_document(&args.input)?;
    serial::check_document(&doc, Some("matrix"))?;
    let a = serial::matrix_from_value(field(&doc, "rows")?)?;
    let dec = smith_normal_form(&a);
    let product = dec.u.mul(&a)?.mul(&dec.v)?;
    let exact = product == dec.s;
    let det_u = dec.u.determinant()?;
    let det_v = dec.v.determinant()?;
    let unimodular = is_unit(&det_u) && is_unit(&det_v);
    let diag: Vec<_> = (0..a.rows().min(a.cols()))
        .map(|i| dec.s.row(i)[i].clone())
        .collect();
    let mut chain = true;
    for w in diag.windows(2) {
        use num_traits::Zero;
        if w[0].is_zero() {
            // Zeros may only trail the nonzero invariant factors.
            chain = chain && w[1].is_zero();
        } else {
            chain = chain && (&w[1] % &w[0]).is_zero();
        }
    }
    println!("matrix: {} x {}", a.rows(), a.cols());
    println!(
        "invariant factors: [{}]",
        diag.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
    );
    println!("transform identity U*A*V = S: {}", if exact { "pass" } else { "FAIL" });
    println!(
        "unimodular transforms (det U = {}, det V = {}): {}",
        det_u,
        det_v,
        if unimodular { "pass" } else { "FAIL" }
    );
    println!("divisibility chain: {}", if chain { "pass" } else { "FAIL" });
    if let Some(out) = &args.output {
        let doc = serial::document(
            "snf",
            vec![
                (
                    "diagonal",
                    Value::Array(diag.iter().map(serial::bigint_value).collect()),
                ),
                ("s", serial::matrix_to_value(&dec.s)),
                ("u", serial::matrix_to_value(&dec.u)),
                ("v", serial::matrix_to_value(&dec.v)),
            ],
        );
        serial::write_document(out, &doc)?;
        println!("decomposition written to {}", out.display());
    }
    Ok(if exact && unimodular && chain { 0 } else { 1 })
}

fn is_unit(b: &num_bigint::BigInt) -> bool {
    use num_traits::One;
    b.magnitude().is_one()
}
