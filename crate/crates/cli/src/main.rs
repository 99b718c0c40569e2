#[macro_use]
mod schemes;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use plslab::constructions::{
    build_path_stp, build_regular_glue, build_wrapper_fakes, directed_cycle, paired_cycle, ConstructionError,
};
use plslab::oracles::{
    dedup_isomorphic, min_rejections, mst_corruption_corpus, nonmember_corpus, sensitivity_sweep, st_corruption_corpus,
    strong_local_stability_probe, CorpusItem, OracleError, SearchConfig, SensitivityReport,
};
use plslab::pls::{PlsError, ProveError};
use plslab::schemes::{AcyclicScheme, StPScheme, UniversalScheme, WrappedScheme};
use plslab::{
    decide_membership, edit_distance_to_language, parse_instance, run_typed, run_verifier, serialize_instance, Budget,
    CertificateMap, GraphError, LabeledGraph, LanguageError, LanguageId, Params, Scheme,
};
use serde_json::json;

use schemes::{Searchable, SchemeSpec};

/// Experiments with proof-labeling schemes: membership and distance checks,
/// verifier runs, adversarial certificate search and stability probes.
#[derive(Parser)]
#[command(name = "plslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArg {
    /// Step budget for exact oracles and certificate searches.
    #[arg(long, default_value_t = Budget::default().max_steps)]
    budget: u64,
}

#[derive(Args)]
struct SchemeArg {
    /// acyclic, st, stp, mst, universal, or wrapped-<one of these>.
    #[arg(long)]
    scheme: String,
    /// Language for the universal scheme; otherwise must match the scheme.
    #[arg(long)]
    lang: Option<LanguageId>,
}

#[derive(Subcommand)]
enum Command {
    /// Membership and exact edit distance of an instance.
    Check {
        instance: PathBuf,
        #[arg(long)]
        lang: LanguageId,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Runs the verifier on given certificates, or on the prover's.
    Verify {
        instance: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        /// Certificate file; the prover is used when absent.
        #[arg(long)]
        certs: Option<PathBuf>,
        /// Write the verdict as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prover certificates for a member instance.
    Prove {
        instance: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        /// Certificate file to write; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes an adversarial instance and its certificates.
    Construct {
        #[command(subcommand)]
        which: Construction,
        /// Output directory for instance.json and certs.json.
        #[arg(long, global = true, default_value = ".")]
        out: PathBuf,
    },
    /// Fewest rejecting nodes over the scheme's bounded certificate space.
    Attack {
        instance: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        /// Extra starting certificates for the search.
        #[arg(long)]
        certs: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArg,
        /// Output directory for attack.json and witness.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance against fewest rejections over a corpus of nonmembers.
    Sensitivity {
        #[command(flatten)]
        scheme: SchemeArg,
        /// `exhaustive` (every nonmember labeling) or `corrupted` (seeded
        /// corruptions of random trees, ST_L and MST_L only). Defaults to
        /// `corrupted` for tree languages.
        #[arg(long)]
        corpus: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Number of corrupted instances.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Keep one instance per isomorphism class of the exhaustive corpus.
        #[arg(long)]
        dedup: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArg,
        /// Output directory for report.csv, summary.json and witnesses/.
        #[arg(long)]
        out: PathBuf,
    },
    /// Searches for pastings of legal labelings far from the language.
    Probe {
        #[arg(long)]
        lang: LanguageId,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Candidate stability parameters.
        #[arg(long = "beta", default_values_t = [1u32])]
        betas: Vec<u32>,
        #[command(flatten)]
        budget: BudgetArg,
        /// Write the outcome as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Construction {
    /// Path whose halves point away from each other, with spliced
    /// certificates from the two honest orientations.
    PathSplice {
        #[arg(long)]
        n: usize,
    },
    /// Two regular graphs of different degrees glued together, with
    /// universal certificates copied from doubled copies of each.
    RegularGlue {
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        d2: usize,
        #[arg(long)]
        m2: usize,
    },
    /// Directed cycle with wrapped acyclic certificates whose booleans are
    /// faked bottom-up.
    WrapperCycle {
        #[arg(long)]
        n: usize,
    },
    /// Cycle of mutual pointer pairs, with wrapped acyclic fakes.
    PairedCycle {
        #[arg(long)]
        n: usize,
    },
}

/// Failure classes with their exit codes.
#[derive(Debug)]
enum Failure {
    /// Bad input or a violated precondition: exit code 2.
    Precondition(String),
    /// An oracle ran out of steps: exit code 3.
    Budget(String),
    /// Reading or writing files: exit code 1.
    Io(anyhow::Error),
}

impl Failure {
    fn pre(e: impl Display) -> Failure {
        Failure::Precondition(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<LanguageError> for Failure {
    fn from(e: LanguageError) -> Self {
        match e {
            LanguageError::Budget(b) => Failure::Budget(b.to_string()),
            other => Failure::pre(other),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget(b) => Failure::Budget(b.to_string()),
            OracleError::Language(l) => l.into(),
            other => Failure::pre(other),
        }
    }
}

impl From<ProveError> for Failure {
    fn from(e: ProveError) -> Self {
        match e {
            ProveError::Language(l) => l.into(),
            other => Failure::pre(other),
        }
    }
}

impl From<PlsError> for Failure {
    fn from(e: PlsError) -> Self {
        match e {
            PlsError::Language(l) => l.into(),
            PlsError::Prove(p) => p.into(),
            other => Failure::pre(other),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::pre(e)
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        Failure::pre(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn write(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(fs::write(path, text).with_context(|| format!("writing {}", path.display()))?)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write(path, &text)
}

fn load_instance(path: &Path) -> Outcome<LabeledGraph> {
    parse_instance(&read(path)?).map_err(|e| Failure::pre(format!("{}: {e}", path.display())))
}

fn load_certs(path: &Path) -> Outcome<CertificateMap> {
    CertificateMap::from_json(&read(path)?)
        .map(|(certs, _)| certs)
        .map_err(|e| Failure::pre(format!("{}: {e}", path.display())))
}

/// Decodes a certificate file into typed certificates, if every node has a
/// decodable one.
fn decode_all<S: Scheme>(scheme: &S, inst: &LabeledGraph, certs: &CertificateMap) -> Option<Vec<S::Cert>> {
    let params = Params::of(inst);
    inst.graph()
        .ids()
        .iter()
        .map(|id| certs.get(*id).and_then(|c| scheme.decode(c, &params)))
        .collect()
}

fn check(path: &Path, lang: LanguageId, budget: Budget) -> Outcome {
    let inst = load_instance(path)?;
    if decide_membership(lang, &inst)? {
        println!("member, distance 0");
    } else {
        let d = edit_distance_to_language(lang, &inst, budget)?;
        println!("nonmember, distance {d}");
    }
    Ok(())
}

fn verify<S: Scheme>(scheme: &S, path: &Path, certs: Option<&Path>, out: Option<&Path>) -> Outcome {
    let inst = load_instance(path)?;
    let certs = match certs {
        Some(p) => load_certs(p)?,
        None => plslab::pls::prove_map(scheme, &inst)?,
    };
    let verdict = run_verifier(scheme, &inst, &certs)?;
    let bound = scheme.size_bound(&Params::of(&inst));
    let mut nodes = Vec::new();
    for (id, ok) in verdict.ids.iter().zip(&verdict.accepted) {
        let bits = certs.get(*id).map_or(0, |c| c.len());
        println!("{id} {} {bits} bits", if *ok { "accept" } else { "reject" });
        nodes.push(json!({ "id": id.0, "accept": ok, "bits": bits }));
    }
    println!("k = {}", verdict.k);
    if let Some(out) = out {
        write_json(
            out,
            &json!({ "scheme": scheme.name(), "k": verdict.k, "size_bound": bound, "nodes": nodes }),
        )?;
    }
    Ok(())
}

fn prove<S: Scheme>(scheme: &S, path: &Path, out: Option<&Path>) -> Outcome {
    let inst = load_instance(path)?;
    let text = plslab::pls::prove_map(scheme, &inst)?.to_json(Some(&scheme.name()));
    match out {
        Some(out) => write(out, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit<S: Scheme>(scheme: &S, inst: &LabeledGraph, certs: &[S::Cert], dir: &Path) -> Outcome {
    write(&dir.join("instance.json"), &serialize_instance(inst))?;
    let map = CertificateMap::encode_all(scheme, inst, certs);
    write(&dir.join("certs.json"), &map.to_json(Some(&scheme.name())))?;
    let v = run_typed(scheme, inst, certs);
    println!("n = {}, scheme {}, k = {}", inst.n(), scheme.name(), v.k);
    Ok(())
}

fn construct(which: &Construction, dir: &Path) -> Outcome {
    match *which {
        Construction::PathSplice { n } => {
            let (inst, certs) = build_path_stp(n)?;
            emit(&StPScheme, &inst, &certs, dir)
        }
        Construction::RegularGlue { d1, m1, d2, m2 } => {
            let glue = build_regular_glue(d1, m1, d2, m2)?;
            emit(&UniversalScheme::new(LanguageId::Regular), &glue.instance, &glue.certs, dir)
        }
        Construction::WrapperCycle { n } => {
            let inst = directed_cycle(n)?;
            let scheme = WrappedScheme::new(AcyclicScheme);
            emit(&scheme, &inst, &build_wrapper_fakes(&scheme, &inst, None), dir)
        }
        Construction::PairedCycle { n } => {
            let inst = paired_cycle(n)?;
            let scheme = WrappedScheme::new(AcyclicScheme);
            emit(&scheme, &inst, &build_wrapper_fakes(&scheme, &inst, None), dir)
        }
    }
}

fn attack<S: Searchable>(
    scheme: &S,
    path: &Path,
    certs: Option<&Path>,
    seed: u64,
    budget: Budget,
    out: Option<&Path>,
) -> Outcome {
    let inst = load_instance(path)?;
    let lang = scheme.language();
    let item = CorpusItem {
        id: "instance".into(),
        instance: inst.clone(),
        origin: None,
    };
    let mut seeds = scheme.seeds(&item, budget);
    if let Some(p) = certs {
        let map = load_certs(p)?;
        let typed = decode_all(scheme, &inst, &map)
            .ok_or_else(|| Failure::pre(format!("{}: not decodable as {} certificates", p.display(), scheme.name())))?;
        seeds.push(typed);
    }
    let distance = edit_distance_to_language(lang, &inst, budget)?;
    let space = scheme.space(&inst, budget)?;
    let config = SearchConfig {
        budget,
        seed,
        ..SearchConfig::default()
    };
    let r = min_rejections(scheme, &inst, &space, &seeds, &config)?;
    println!("distance {distance}, k_min {} ({})", r.k, if r.exhaustive { "exhaustive" } else { "upper bound" });
    if let Some(dir) = out {
        let witness = CertificateMap::encode_all(scheme, &inst, &r.witness);
        write(&dir.join("witness.json"), &witness.to_json(Some(&scheme.name())))?;
        let rejecting: Vec<u64> = run_typed(scheme, &inst, &r.witness).rejecting().iter().map(|id| id.0).collect();
        write_json(
            &dir.join("attack.json"),
            &json!({
                "scheme": scheme.name(),
                "language": lang.name(),
                "distance": distance,
                "k_min": r.k,
                "exhaustive": r.exhaustive,
                "rejecting": rejecting,
                "witness_file": "witness.json",
            }),
        )?;
    }
    Ok(())
}

struct SweepArgs<'a> {
    corpus: Option<&'a str>,
    max_n: usize,
    count: usize,
    dedup: bool,
    seed: u64,
    budget: Budget,
    out: &'a Path,
}

fn corpus_for(lang: LanguageId, args: &SweepArgs<'_>) -> Outcome<Vec<CorpusItem>> {
    let tree_lang = matches!(lang, LanguageId::StL | LanguageId::MstL);
    let kind = args.corpus.unwrap_or(if tree_lang { "corrupted" } else { "exhaustive" });
    match (kind, lang) {
        ("exhaustive", _) => {
            let all = nonmember_corpus(lang, args.max_n, args.budget)?;
            Ok(if args.dedup { dedup_isomorphic(all) } else { all })
        }
        ("corrupted", LanguageId::StL) => Ok(st_corruption_corpus(args.seed, args.count, args.max_n)?),
        ("corrupted", LanguageId::MstL) => Ok(mst_corruption_corpus(args.seed, args.count, args.max_n)?),
        ("corrupted", other) => Err(Failure::pre(format!("no corrupted corpus for {other}"))),
        (other, _) => Err(Failure::pre(format!("unknown corpus {other:?}"))),
    }
}

fn sensitivity<S: Searchable>(scheme: &S, args: &SweepArgs<'_>) -> Outcome {
    let corpus = corpus_for(scheme.language(), args)?;
    let config = SearchConfig {
        budget: args.budget,
        seed: args.seed,
        ..SearchConfig::default()
    };
    let report: SensitivityReport = sensitivity_sweep(
        scheme,
        &corpus,
        |inst| scheme.space(inst, args.budget),
        |item| scheme.seeds(item, args.budget),
        &config,
    )?;
    write(&args.out.join("report.csv"), &report.to_csv())?;
    for row in &report.rows {
        let file = args.out.join(SensitivityReport::witness_file(row));
        write(&file, &row.witness.to_json(Some(&scheme.name())))?;
    }
    let summary = report.summary_json();
    write_json(&args.out.join("summary.json"), &summary)?;
    println!(
        "{} instances ({} exhaustive), min k/d {}, max d/k {}",
        report.rows.len(),
        report.exhaustive_rows(),
        summary["min_ratio"],
        summary["max_distance_per_rejection"]
    );
    Ok(())
}

fn probe(lang: LanguageId, max_n: usize, betas: &[u32], budget: Budget, out: Option<&Path>) -> Outcome {
    let outcome = strong_local_stability_probe(lang, max_n, betas, budget)?;
    let instance_json = |inst: &LabeledGraph| -> serde_json::Value {
        serde_json::from_str(&serialize_instance(inst)).expect("serialized instances are JSON")
    };
    let mut results = Vec::new();
    for (beta, witness) in &outcome.results {
        match witness {
            None => {
                println!("beta {beta}: none up to n = {max_n}");
                results.push(json!({ "beta": beta, "witness": null }));
            }
            Some(w) => {
                println!(
                    "beta {beta}: violation on n = {}, boundary {}, distance {}",
                    w.g.n(),
                    w.boundary,
                    w.distance
                );
                results.push(json!({
                    "beta": beta,
                    "witness": {
                        "g": instance_json(&w.g),
                        "g_prime": instance_json(&w.g_prime),
                        "h_nodes": w.h_nodes.iter().map(|id| id.0).collect::<Vec<_>>(),
                        "pasted": instance_json(&w.pasted),
                        "boundary": w.boundary,
                        "distance": w.distance,
                    }
                }));
            }
        }
    }
    println!("{} pastes checked", outcome.pastes_checked);
    if let Some(out) = out {
        write_json(
            out,
            &json!({
                "language": lang.name(),
                "max_n": max_n,
                "pastes_checked": outcome.pastes_checked,
                "results": results,
            }),
        )?;
    }
    Ok(())
}

fn spec(arg: &SchemeArg) -> Outcome<SchemeSpec> {
    SchemeSpec::parse(&arg.scheme, arg.lang).map_err(Failure::Precondition)
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Check { instance, lang, budget } => check(instance, *lang, Budget::new(budget.budget)),
        Command::Verify {
            instance,
            scheme,
            certs,
            out,
        } => dispatch!(spec(scheme)?, |s| verify(s, instance, certs.as_deref(), out.as_deref())),
        Command::Prove { instance, scheme, out } => dispatch!(spec(scheme)?, |s| prove(s, instance, out.as_deref())),
        Command::Construct { which, out } => construct(which, out),
        Command::Attack {
            instance,
            scheme,
            certs,
            seed,
            budget,
            out,
        } => dispatch!(spec(scheme)?, |s| attack(
            s,
            instance,
            certs.as_deref(),
            *seed,
            Budget::new(budget.budget),
            out.as_deref()
        )),
        Command::Sensitivity {
            scheme,
            corpus,
            max_n,
            count,
            dedup,
            seed,
            budget,
            out,
        } => {
            let args = SweepArgs {
                corpus: corpus.as_deref(),
                max_n: *max_n,
                count: *count,
                dedup: *dedup,
                seed: *seed,
                budget: Budget::new(budget.budget),
                out,
            };
            dispatch!(spec(scheme)?, |s| sensitivity(s, &args))
        }
        Command::Probe {
            lang,
            max_n,
            betas,
            budget,
            out,
        } => probe(*lang, *max_n, betas, Budget::new(budget.budget), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("PLSLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(e) => eprintln!("error: {e:#}"),
                Failure::Precondition(m) => eprintln!("error: {m}"),
                Failure::Budget(m) => eprintln!("budget exceeded: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
