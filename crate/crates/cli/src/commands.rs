//! Subcommand driver; reports are versioned structured-text documents with
//! exact rationals printed as `p/q` and log quantities in bits.
//!
//! Exit codes: 0 ok, 1 usage, 2 parse, 3 data violation, 4 internal
//! assertion.

use crate::gen::{generate_instance, GenKind, GenParams};
use crate::ingest::{ingest_csv, Interner};
use crate::query_file::{parse_query_file, QueryFile, QueryKind};
use pandaq_core::bounds::{
    agm_bound, integral_edge_cover_bound, size_bound_report, vertex_bound, BoundReport,
    Certificate,
};
use pandaq_core::engine::{
    eval_boolean_fhtw, eval_boolean_subw, eval_full_wco, greedy_model,
};
use pandaq_core::error::Error as CoreError;
use pandaq_core::panda::{panda_run, PandaOptions};
use pandaq_core::proofseq::{
    construct_flownet, construct_inductive, verify_proof_sequence, ProofCheck,
};
use pandaq_core::relalg::Relation;
use pandaq_core::rule::FunctionClass;
use pandaq_core::widths::{classic_width, da_maximin_width, da_minimax_width, WidthKind};
use std::fs;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

fn usage() -> String {
    "usage:\n\
     pandaq bound --kind {vb|iec|agm|poly} [--class {mod|poly|sa}] FILE\n\
     pandaq width --kind {tw|ghtw|fhtw|dafhtw|dasubw} FILE\n\
     pandaq prove [--flownet] FILE\n\
     pandaq eval --data DIR --strategy {wco|fhtw|subw} [--trace] FILE\n\
     pandaq model --data DIR [--greedy] FILE\n\
     pandaq gen KIND --out DIR [--n N] [--d D] [--m M] [--k K]\n"
        .to_string()
}

fn core_exit(e: &CoreError) -> i32 {
    match e {
        CoreError::DataViolation(_) => EXIT_DATA,
        CoreError::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

struct Args {
    positional: Vec<String>,
    flags: Vec<(String, Option<String>)>,
}

impl Args {
    fn parse(argv: &[String]) -> Args {
        let mut positional = Vec::new();
        let mut flags = Vec::new();
        let mut i = 0;
        while i < argv.len() {
            let a = &argv[i];
            if let Some(name) = a.strip_prefix("--") {
                let value = if i + 1 < argv.len() && !argv[i + 1].starts_with("--") {
                    i += 1;
                    Some(argv[i].clone())
                } else {
                    None
                };
                flags.push((name.to_string(), value));
            } else {
                positional.push(a.clone());
            }
            i += 1;
        }
        Args { positional, flags }
    }

    fn flag(&self, name: &str) -> Option<&str> {
        self.flags
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| v.as_deref())
    }

    fn has(&self, name: &str) -> bool {
        self.flags.iter().any(|(n, _)| n == name)
    }
}

fn load_query(path: &str) -> Result<QueryFile, (i32, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| (EXIT_USAGE, format!("cannot read {path}: {e}")))?;
    parse_query_file(&text).map_err(|e| (EXIT_PARSE, format!("{path}: {e}")))
}

fn render_bound_report(qf: &QueryFile, name: &str, report: &BoundReport) -> String {
    let mut out = String::new();
    out.push_str("pandaq report v1\n");
    out.push_str("command bound\n");
    out.push_str(&format!("kind {name}\n"));
    if let Some(class) = report.class {
        out.push_str(&format!("class {class}\n"));
    }
    out.push_str(&format!("value_bits {}\n", report.log_value.bits()));
    match &report.certificate {
        Certificate::Trivial => out.push_str("certificate trivial\n"),
        Certificate::Cover(ids) => {
            let names: Vec<&str> = ids
                .iter()
                .filter_map(|id| {
                    qf.relations
                        .iter()
                        .find(|r| r.id == *id)
                        .map(|r| r.name.as_str())
                })
                .collect();
            out.push_str(&format!("certificate cover {}\n", names.join(",")));
        }
        Certificate::FractionalCover(weights) => {
            out.push_str("certificate fractional-cover\n");
            for (id, w) in weights {
                let name = qf
                    .relations
                    .iter()
                    .find(|r| r.id == *id)
                    .map(|r| r.name.as_str())
                    .unwrap_or("?");
                out.push_str(&format!("  weight {name} {w}\n"));
            }
        }
        Certificate::FlowWitness { lambda, ineq } => {
            out.push_str("certificate flow-witness\n");
            for (b, w) in lambda {
                out.push_str(&format!("  lambda {} {w}\n", qf.attr_set_names(*b)));
            }
            for (p, w) in &ineq.delta {
                out.push_str(&format!(
                    "  delta {}|{} {w}\n",
                    qf.attr_set_names(p.y),
                    qf.attr_set_names(p.x)
                ));
            }
            for ((i, j), w) in &ineq.sigma {
                out.push_str(&format!(
                    "  sigma {} {} {w}\n",
                    qf.attr_set_names(*i),
                    qf.attr_set_names(*j)
                ));
            }
            for (p, w) in &ineq.mu {
                out.push_str(&format!(
                    "  mu {} {} {w}\n",
                    qf.attr_set_names(p.x),
                    qf.attr_set_names(p.y)
                ));
            }
        }
    }
    out
}

fn cmd_bound(args: &Args) -> Result<String, (i32, String)> {
    let file = args
        .positional
        .first()
        .ok_or((EXIT_USAGE, usage()))?;
    let qf = load_query(file)?;
    let kind = args.flag("kind").unwrap_or("poly");
    let report = match kind {
        "vb" => vertex_bound(&qf.rule),
        "iec" => integral_edge_cover_bound(&qf.rule),
        "agm" => agm_bound(&qf.rule),
        "poly" => {
            let class = match args.flag("class").unwrap_or("poly") {
                "mod" => FunctionClass::Modular,
                "poly" => FunctionClass::Polymatroid,
                "sa" => FunctionClass::Subadditive,
                other => return Err((EXIT_USAGE, format!("unknown class `{other}`"))),
            };
            size_bound_report(class, &qf.rule)
        }
        other => return Err((EXIT_USAGE, format!("unknown bound kind `{other}`"))),
    }
    .map_err(|e| (core_exit(&e), e.to_string()))?;
    Ok(render_bound_report(&qf, kind, &report))
}

fn cmd_width(args: &Args) -> Result<String, (i32, String)> {
    let file = args.positional.first().ok_or((EXIT_USAGE, usage()))?;
    let qf = load_query(file)?;
    let kind = args.flag("kind").ok_or((EXIT_USAGE, usage()))?;
    let mut out = String::new();
    out.push_str("pandaq report v1\n");
    out.push_str("command width\n");
    out.push_str(&format!("kind {kind}\n"));
    let describe_td = |td: &pandaq_core::widths::TreeDecomposition| {
        let bags: Vec<String> = td.bag_set().iter().map(|b| qf.attr_set_names(*b)).collect();
        bags.join(" ; ")
    };
    match kind {
        "tw" | "ghtw" | "fhtw" => {
            let wk = match kind {
                "tw" => WidthKind::Treewidth,
                "ghtw" => WidthKind::GeneralizedHypertree,
                _ => WidthKind::FractionalHypertree,
            };
            let (value, td) = classic_width(&qf.rule.hypergraph, wk)
                .map_err(|e| (core_exit(&e), e.to_string()))?;
            out.push_str(&format!("value {value}\n"));
            out.push_str(&format!("decomposition {}\n", describe_td(&td)));
        }
        "dafhtw" => {
            let (value, td) = da_minimax_width(&qf.rule, FunctionClass::Polymatroid)
                .map_err(|e| (core_exit(&e), e.to_string()))?;
            out.push_str(&format!("value_bits {value}\n"));
            out.push_str(&format!("decomposition {}\n", describe_td(&td)));
        }
        "dasubw" => {
            let (value, targets, sb) = da_maximin_width(&qf.rule, FunctionClass::Polymatroid)
                .map_err(|e| (core_exit(&e), e.to_string()))?;
            out.push_str(&format!("value_bits {value}\n"));
            let names: Vec<String> = targets.iter().map(|b| qf.attr_set_names(*b)).collect();
            out.push_str(&format!("targets {}\n", names.join(" ; ")));
            for (b, w) in &sb.lambda {
                out.push_str(&format!("  lambda {} {w}\n", qf.attr_set_names(*b)));
            }
        }
        other => return Err((EXIT_USAGE, format!("unknown width kind `{other}`"))),
    }
    Ok(out)
}

fn cmd_prove(args: &Args) -> Result<String, (i32, String)> {
    let file = args.positional.first().ok_or((EXIT_USAGE, usage()))?;
    let qf = load_query(file)?;
    let sb = pandaq_core::bounds::size_bound(FunctionClass::Polymatroid, &qf.rule)
        .map_err(|e| (core_exit(&e), e.to_string()))?;
    let seq = if args.has("flownet") {
        construct_flownet(&sb.ineq)
    } else {
        construct_inductive(&sb.ineq)
    }
    .map_err(|e| (core_exit(&e), e.to_string()))?;
    let check = verify_proof_sequence(&sb.ineq, &seq);
    if check != ProofCheck::Valid {
        return Err((
            EXIT_INTERNAL,
            format!("constructed sequence failed verification: {check:?}"),
        ));
    }
    let mut out = String::new();
    out.push_str("pandaq report v1\n");
    out.push_str("command prove\n");
    out.push_str(&format!("bound_bits {}\n", sb.objective));
    out.push_str(&format!("steps {}\n", seq.len()));
    out.push_str("verified true\n");
    for step in &seq.steps {
        use pandaq_core::proofseq::StepKind;
        let (kind, a, b) = match step.kind {
            StepKind::Submodularity { i, j } => ("sub", i, j),
            StepKind::Monotonicity { x, y } => ("mono", x, y),
            StepKind::Composition { x, y } => ("comp", x, y),
            StepKind::Decomposition { y, x } => ("decomp", y, x),
        };
        out.push_str(&format!(
            "{kind} {} {} {}\n",
            qf.attr_set_names(a),
            qf.attr_set_names(b),
            step.weight
        ));
    }
    Ok(out)
}

fn emit_csv(qf: &QueryFile, interner: &Interner, rel: &Relation) -> String {
    let mut out = String::new();
    let header: Vec<&str> = rel
        .schema()
        .iter()
        .map(|&v| qf.attr_names[v].as_str())
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rel.tuples() {
        let cells: Vec<&str> = row.iter().map(|&v| interner.resolve(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cmd_eval(args: &Args) -> Result<String, (i32, String)> {
    let file = args.positional.first().ok_or((EXIT_USAGE, usage()))?;
    let qf = load_query(file)?;
    let dir = args.flag("data").ok_or((EXIT_USAGE, usage()))?;
    let strategy = args.flag("strategy").unwrap_or("wco");
    let trust = args.has("trust");
    let (data, interner) = ingest_csv(PathBuf::from(dir).as_path(), &qf, trust)
        .map_err(|e| (EXIT_DATA, e.to_string()))?;
    let mut out = String::new();
    out.push_str("pandaq report v1\n");
    out.push_str("command eval\n");
    out.push_str(&format!("strategy {strategy}\n"));
    match strategy {
        "wco" => {
            if qf.kind == QueryKind::Boolean {
                return Err((
                    EXIT_USAGE,
                    "strategy wco needs a full query head".to_string(),
                ));
            }
            let rel = eval_full_wco(&qf.rule, &data)
                .map_err(|e| (core_exit(&e), e.to_string()))?;
            out.push_str(&format!("rows {}\n", rel.len()));
            out.push_str(&emit_csv(&qf, &interner, &rel));
        }
        "fhtw" => {
            let verdict = eval_boolean_fhtw(&qf.rule, &data)
                .map_err(|e| (core_exit(&e), e.to_string()))?;
            out.push_str(&format!("verdict {verdict}\n"));
        }
        "subw" => {
            let verdict = eval_boolean_subw(&qf.rule, &data)
                .map_err(|e| (core_exit(&e), e.to_string()))?;
            out.push_str(&format!("verdict {verdict}\n"));
        }
        other => return Err((EXIT_USAGE, format!("unknown strategy `{other}`"))),
    }
    Ok(out)
}

fn cmd_model(args: &Args) -> Result<String, (i32, String)> {
    let file = args.positional.first().ok_or((EXIT_USAGE, usage()))?;
    let qf = load_query(file)?;
    let dir = args.flag("data").ok_or((EXIT_USAGE, usage()))?;
    let (data, interner) = ingest_csv(PathBuf::from(dir).as_path(), &qf, args.has("trust"))
        .map_err(|e| (EXIT_DATA, e.to_string()))?;
    let mut out = String::new();
    out.push_str("pandaq report v1\n");
    out.push_str("command model\n");
    if args.has("greedy") {
        let model = greedy_model(&qf.rule, &data)
            .map_err(|e| (core_exit(&e), e.to_string()))?;
        out.push_str("algorithm greedy\n");
        for (b, rel) in &model {
            out.push_str(&format!(
                "target {} rows {}\n",
                qf.attr_set_names(*b),
                rel.len()
            ));
            out.push_str(&emit_csv(&qf, &interner, rel));
        }
    } else {
        let options = PandaOptions {
            trace: args.has("trace"),
        };
        let report = panda_run(&qf.rule, &data, options)
            .map_err(|e| (core_exit(&e), e.to_string()))?;
        out.push_str("algorithm panda\n");
        out.push_str(&format!("obj_bits {}\n", report.obj));
        out.push_str(&format!("max_intermediate {}\n", report.max_intermediate));
        out.push_str(&format!("branches {}\n", report.branch_count));
        out.push_str(&format!("restarts {}\n", report.restarts));
        for (b, rel) in &report.model {
            out.push_str(&format!(
                "target {} rows {}\n",
                qf.attr_set_names(*b),
                rel.len()
            ));
            out.push_str(&emit_csv(&qf, &interner, rel));
        }
        if let Some(trace) = &report.trace {
            for line in trace {
                out.push_str(&format!("trace {line}\n"));
            }
        }
    }
    Ok(out)
}

fn cmd_gen(args: &Args) -> Result<String, (i32, String)> {
    let kind_name = args.positional.first().ok_or((EXIT_USAGE, usage()))?;
    let kind = GenKind::parse(kind_name)
        .ok_or((EXIT_USAGE, format!("unknown generator `{kind_name}`")))?;
    let out_dir = args.flag("out").ok_or((EXIT_USAGE, usage()))?;
    let mut params = GenParams::default();
    if let Some(n) = args.flag("n") {
        params.n = n.parse().map_err(|_| (EXIT_USAGE, format!("bad N `{n}`")))?;
    }
    if let Some(d) = args.flag("d") {
        params.d = d.parse().map_err(|_| (EXIT_USAGE, format!("bad D `{d}`")))?;
    }
    if let Some(m) = args.flag("m") {
        params.m = m.parse().map_err(|_| (EXIT_USAGE, format!("bad m `{m}`")))?;
    }
    if let Some(k) = args.flag("k") {
        params.k = k.parse().map_err(|_| (EXIT_USAGE, format!("bad k `{k}`")))?;
    }
    let ddl = generate_instance(kind, params, PathBuf::from(out_dir).as_path())
        .map_err(|e| (EXIT_USAGE, e))?;
    Ok(format!(
        "pandaq report v1\ncommand gen\nkind {kind_name}\nquery_file {}\n",
        ddl.display()
    ))
}

/// Runs one subcommand; prints the report to stdout or the error to
/// stderr, returning the exit status.
pub fn run_subcommand(argv: &[String]) -> i32 {
    let Some(command) = argv.first() else {
        eprintln!("{}", usage());
        return EXIT_USAGE;
    };
    let args = Args::parse(&argv[1..]);
    let result = match command.as_str() {
        "bound" => cmd_bound(&args),
        "width" => cmd_width(&args),
        "prove" => cmd_prove(&args),
        "eval" => cmd_eval(&args),
        "model" => cmd_model(&args),
        "gen" => cmd_gen(&args),
        _ => Err((EXIT_USAGE, usage())),
    };
    match result {
        Ok(report) => {
            print!("{report}");
            EXIT_OK
        }
        Err((code, message)) => {
            eprintln!("error: {message}");
            code
        }
    }
}
