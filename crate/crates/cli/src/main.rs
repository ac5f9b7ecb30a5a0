use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crauto::binary::analyze_binary;
use crauto::coloring::{search_colorings, ColoringPredicate, OutDigraph};
use crauto::families::{self, product_accepts, reduce_fai, FaiInstance};
use crauto::gamma1::{
    build_gamma1, certify_strong_connectivity, don_collection_search, don_coprime_check, hunt,
    witness_for_subset, Certificate, DonCoprime, DonSearch, Generator,
};
use crauto::monoid::{is_full_transformation_monoid, syntactic_complexity, MonoidSize};
use crauto::reach::{self, Reachability};
use crauto::t2a::{automaton_of_tree, verify_minimal_cra};
use crauto::trees::{count_respectful, enumerate_respectful_trees, FullBinaryTree};
use crauto::{Dfa, Limits, StateId, StateSet, Word};

#[derive(Parser)]
#[command(
    name = "crauto",
    version,
    about = "Complete reachability of finite automata"
)]
struct Cli {
    /// Re-apply every printed witness word and fail if it misses its target
    #[arg(long, global = true)]
    verify_witness: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide complete reachability, cheapest method first
    Check { dfa: PathBuf },
    /// Certify complete reachability by strong connectivity of the defect-1 graph
    Certify {
        dfa: PathBuf,
        /// Build a word reaching this subset (e.g. `1,3`)
        #[arg(long, value_name = "P")]
        witness: Option<String>,
    },
    /// Print the defect-1 graph and its strong components
    Gamma1 {
        dfa: PathBuf,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Polynomial test for automata with two letters
    Binary {
        dfa: PathBuf,
        /// Print every level of candidate words
        #[arg(long)]
        trace: bool,
        /// Write repeated letters as powers (`ab^5a`)
        #[arg(long)]
        powers: bool,
    },
    /// Search for defect-1 words whose state map is a cyclic permutation
    Don { dfa: PathBuf },
    /// Coprimality test for a defect-1 letter and a cyclic letter
    DonCoprime { dfa: PathBuf },
    /// Shortest word reaching a subset
    Reach { dfa: PathBuf, subset: String },
    /// Shortest reset word
    Reset { dfa: PathBuf },
    /// Size of the transition monoid
    Monoid {
        dfa: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// Decide whether the monoid is the full transformation monoid
        #[arg(long)]
        full: bool,
    },
    /// Respectful binary trees
    Trees {
        /// Print counts for 1..=N leaves
        #[arg(
            long,
            value_name = "N",
            conflicts_with = "list",
            required_unless_present = "list"
        )]
        count: Option<usize>,
        /// List the respectful trees with N leaves
        #[arg(long, value_name = "N")]
        list: Option<usize>,
    },
    /// Automaton of a respectful tree
    T2a {
        tree: PathBuf,
        /// Check complete reachability and the monoid size 2^n - 1
        #[arg(long)]
        verify: bool,
    },
    /// Print a named automaton
    Gen {
        #[arg(value_enum)]
        family: Family,
        /// State count, for `cerny`
        n: Option<usize>,
    },
    /// Intersection of automata
    Fai {
        #[arg(value_enum)]
        action: FaiAction,
        file: PathBuf,
    },
    /// Search the colorings of a graph with M letters
    Colorings {
        graph: PathBuf,
        m: usize,
        #[arg(long, value_enum)]
        predicate: Predicate,
    },
    /// Random search for automata separating the defect-1 criteria from complete reachability
    Hunt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cerny,
    Flipflop,
    E3,
    E6,
    E6prime,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaiAction {
    Reduce,
    Solve,
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    Cr,
    Sync,
}

/// Exit status of a command that ran to completion.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

enum Failure {
    Input(String),
    Cap(String),
    Internal(String),
}

impl From<crauto::Error> for Failure {
    fn from(e: crauto::Error) -> Self {
        if e.is_resource() {
            Failure::Cap(e.to_string())
        } else if e.is_input() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

type CmdResult = Result<Verdict, Failure>;

struct Ctx {
    limits: Limits,
    verify_witness: bool,
    out: String,
}

impl Ctx {
    fn line(&mut self, text: impl AsRef<str>) {
        self.out.push_str(text.as_ref());
        self.out.push('\n');
    }

    /// Check `Q·w = target` when witness verification is on.
    fn replay(&self, dfa: &Dfa, w: &Word, target: &StateSet) -> Result<(), Failure> {
        if !self.verify_witness {
            return Ok(());
        }
        let image = dfa.image_of_word(w)?;
        if &image != target {
            return Err(Failure::Internal(format!(
                "witness {} reaches {image}, not {target}",
                dfa.render_word(w, false)
            )));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_dfa(path: &Path) -> Result<Dfa, Failure> {
    Dfa::parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn components_line(parts: &[StateSet]) -> String {
    let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    format!("components: {}", parts.join(" "))
}

fn check(ctx: &mut Ctx, path: &Path) -> CmdResult {
    let dfa = load_dfa(path)?;
    if dfa.num_letters() == 2 {
        let r = analyze_binary(&dfa, &ctx.limits)?;
        if let Some(cr) = r.completely_reachable {
            ctx.line(format!("completely reachable: {}", yes_no(cr)));
            ctx.line("method: binary algorithm");
            return Ok(Verdict::from_bool(cr));
        }
    } else if build_gamma1(&dfa, &ctx.limits)?.is_strongly_connected() {
        ctx.line("completely reachable: yes");
        ctx.line("method: defect-1 graph");
        return Ok(Verdict::Holds);
    }
    let verdict = reach::is_completely_reachable(&dfa, &ctx.limits)?;
    ctx.line(format!(
        "completely reachable: {}",
        yes_no(verdict.is_complete())
    ));
    ctx.line("method: powerset search");
    if let Reachability::Incomplete { first_missing } = verdict {
        ctx.line(format!("unreachable subset: {first_missing}"));
        return Ok(Verdict::Fails);
    }
    Ok(Verdict::Holds)
}

fn certify(ctx: &mut Ctx, path: &Path, witness: Option<&str>) -> CmdResult {
    let dfa = load_dfa(path)?;
    let certified = match certify_strong_connectivity(&dfa, &ctx.limits)? {
        Certificate::CertifiedCr => {
            ctx.line("strongly connected: yes");
            ctx.line("completely reachable: yes");
            true
        }
        Certificate::Inconclusive(parts) => {
            ctx.line("strongly connected: no");
            ctx.line(components_line(&parts));
            ctx.line("completely reachable: undecided");
            false
        }
    };
    let Some(literal) = witness else {
        return Ok(Verdict::from_bool(certified));
    };
    let target = StateSet::parse(literal, dfa.n())?;
    let g = build_gamma1(&dfa, &ctx.limits)?;
    match witness_for_subset(&g, &dfa, &target) {
        Ok(w) => {
            ctx.replay(&dfa, &w.word, &target)?;
            ctx.line(format!("witness: {}", dfa.render_word(&w.word, false)));
            let cuts: Vec<String> = w
                .cut_edges
                .iter()
                .map(|(q, p)| format!("{q}->{p}"))
                .collect();
            ctx.line(format!("cut edges: {}", cuts.join(" ")));
            Ok(Verdict::Holds)
        }
        Err(crauto::Error::Precondition(msg)) => {
            ctx.line(format!("no witness: {msg}"));
            Ok(Verdict::Fails)
        }
        Err(e) => Err(e.into()),
    }
}

fn gamma1(ctx: &mut Ctx, path: &Path, dot: Option<&Path>) -> CmdResult {
    let dfa = load_dfa(path)?;
    let g = build_gamma1(&dfa, &ctx.limits)?;
    for (s, t, w) in g.edges() {
        if ctx.verify_witness {
            let action = dfa.word_action(w)?;
            if action.excl_dupl()? != (s, t) {
                return Err(Failure::Internal(format!(
                    "edge {s} -> {t} has a wrong witness"
                )));
            }
        }
        ctx.line(format!("{s} -> {t} {}", dfa.render_word(w, false)));
    }
    ctx.line(components_line(&g.components()));
    ctx.line(format!(
        "strongly connected: {}",
        yes_no(g.is_strongly_connected())
    ));
    if let Some(file) = dot {
        write(file, &g.to_dot(&dfa))?;
    }
    Ok(Verdict::from_bool(g.is_strongly_connected()))
}

fn binary(ctx: &mut Ctx, path: &Path, trace: bool, powers: bool) -> CmdResult {
    let dfa = load_dfa(path)?;
    let r = analyze_binary(&dfa, &ctx.limits)?;
    if trace {
        ctx.out.push_str(&r.render(&dfa, powers));
    } else {
        ctx.line(format!("case: {:?}", r.case));
        ctx.line(format!(
            "strongly connected: {}",
            yes_no(r.strongly_connected)
        ));
        ctx.line(format!(
            "completely reachable: {}",
            r.completely_reachable.map_or("undecided", yes_no)
        ));
    }
    Ok(Verdict::from_bool(r.strongly_connected))
}

fn don(ctx: &mut Ctx, path: &Path) -> CmdResult {
    let dfa = load_dfa(path)?;
    match don_collection_search(&dfa, &ctx.limits)? {
        DonSearch::Found(c) => {
            ctx.line(format!("state map: {}", c.state_map));
            for (q, w) in c.words.iter().enumerate() {
                let mut target = StateSet::full(dfa.n());
                target.remove(StateId::new(q + 1));
                ctx.replay(&dfa, w, &target)?;
                ctx.line(format!("{}: {}", q + 1, dfa.render_word(w, false)));
            }
            Ok(Verdict::Holds)
        }
        DonSearch::UnreachableSubset(p) => {
            ctx.line(format!("no defect-1 word reaches {p}"));
            Ok(Verdict::Fails)
        }
        DonSearch::NoCyclicMap => {
            ctx.line("no collection has a cyclic state map");
            Ok(Verdict::Fails)
        }
    }
}

fn don_coprime(ctx: &mut Ctx, path: &Path) -> CmdResult {
    let dfa = load_dfa(path)?;
    match don_coprime_check(&dfa) {
        DonCoprime::Applies { a, b, d } => {
            ctx.line(format!(
                "applies: a = {}, b = {}, d = {d}",
                dfa.letter_name(a),
                dfa.letter_name(b)
            ));
            Ok(Verdict::Holds)
        }
        DonCoprime::NotApplicable { reason, d } => {
            ctx.line(format!("not applicable: {reason}"));
            if let Some(d) = d {
                ctx.line(format!("d = {d}"));
            }
            Ok(Verdict::Fails)
        }
    }
}

fn reach_subset(ctx: &mut Ctx, path: &Path, literal: &str) -> CmdResult {
    let dfa = load_dfa(path)?;
    let target = StateSet::parse(literal, dfa.n())?;
    match reach::is_reachable(&dfa, &target, &ctx.limits)? {
        Some(w) => {
            ctx.replay(&dfa, &w, &target)?;
            ctx.line(dfa.render_word(&w, false));
            Ok(Verdict::Holds)
        }
        None => {
            ctx.line("unreachable");
            Ok(Verdict::Fails)
        }
    }
}

fn reset(ctx: &mut Ctx, path: &Path) -> CmdResult {
    let dfa = load_dfa(path)?;
    match reach::shortest_reset_word(&dfa, &ctx.limits)? {
        Some(w) => {
            let image = dfa.image_of_word(&w)?;
            if ctx.verify_witness && image.len() != 1 {
                return Err(Failure::Internal(format!("reset word reaches {image}")));
            }
            ctx.line(format!(
                "{} (length {})",
                dfa.render_word(&w, false),
                w.len()
            ));
            Ok(Verdict::Holds)
        }
        None => {
            ctx.line("not synchronizing");
            Ok(Verdict::Fails)
        }
    }
}

fn monoid(ctx: &mut Ctx, path: &Path, cap: usize, full: bool) -> CmdResult {
    let dfa = load_dfa(path)?;
    if full {
        let holds = is_full_transformation_monoid(&dfa, &ctx.limits)?;
        ctx.line(format!("full transformation monoid: {}", yes_no(holds)));
        return Ok(Verdict::from_bool(holds));
    }
    match syntactic_complexity(&dfa, cap) {
        MonoidSize::Exact(size) => {
            ctx.line(format!("size: {size}"));
            Ok(Verdict::Holds)
        }
        MonoidSize::AtLeast(size) => Err(Failure::Cap(format!(
            "monoid has more than {size} elements (raise --cap)"
        ))),
    }
}

fn trees(ctx: &mut Ctx, count: Option<usize>, list: Option<usize>) -> CmdResult {
    if let Some(n) = count {
        for k in 1..=n {
            let c = count_respectful(k)?;
            ctx.line(format!("{k} {c}"));
        }
    } else if let Some(n) = list {
        for t in enumerate_respectful_trees(n)? {
            ctx.line(t.to_string());
        }
    }
    Ok(Verdict::Holds)
}

fn t2a(ctx: &mut Ctx, path: &Path, verify: bool) -> CmdResult {
    let text = read(path)?;
    let tree = FullBinaryTree::parse(&text)?;
    let automaton = automaton_of_tree(&tree)?;
    ctx.out.push_str(&automaton.dfa.to_text());
    if !verify {
        return Ok(Verdict::Holds);
    }
    let report = verify_minimal_cra(&automaton.dfa, &ctx.limits)?;
    ctx.line(format!(
        "# completely reachable: {}",
        yes_no(report.completely_reachable)
    ));
    let size = match report.monoid_size {
        MonoidSize::Exact(s) => s.to_string(),
        MonoidSize::AtLeast(s) => format!("more than {s}"),
    };
    ctx.line(format!(
        "# monoid size: {size} (2^{} - 1 = {})",
        report.n,
        (1usize << report.n) - 1
    ));
    Ok(Verdict::from_bool(report.passes()))
}

fn generate(ctx: &mut Ctx, family: Family, n: Option<usize>) -> CmdResult {
    let dfa = match family {
        Family::Cerny => {
            let n = n.ok_or_else(|| Failure::Input("cerny needs a state count".into()))?;
            families::cerny(n)?
        }
        Family::Flipflop => families::flip_flop(),
        Family::E3 => families::e3(),
        Family::E6 => families::e6(),
        Family::E6prime => families::e6_prime(),
    };
    ctx.out.push_str(&dfa.to_text());
    Ok(Verdict::Holds)
}

fn fai(ctx: &mut Ctx, action: FaiAction, path: &Path) -> CmdResult {
    let inst = FaiInstance::parse(&read(path)?)?;
    let (dfa, target) = reduce_fai(&inst)?;
    match action {
        FaiAction::Reduce => {
            ctx.out.push_str(&dfa.to_text());
            ctx.line(format!("# target: {}", target.to_literal()));
            Ok(Verdict::Holds)
        }
        FaiAction::Solve => match product_accepts(&inst, &ctx.limits)? {
            Some(w) => {
                let rho = dfa.letter_index("rho").expect("reduction adds rho");
                ctx.replay(&dfa, &Word::letter(rho).concat(&w), &target)?;
                let names: Vec<&str> = w
                    .letters()
                    .iter()
                    .map(|&a| inst.alphabet[a].as_str())
                    .collect();
                let compact = inst.alphabet.iter().all(|n| n.chars().count() == 1);
                ctx.line(if names.is_empty() {
                    "ε".to_string()
                } else {
                    names.join(if compact { "" } else { "·" })
                });
                Ok(Verdict::Holds)
            }
            None => {
                ctx.line("no common word");
                Ok(Verdict::Fails)
            }
        },
    }
}

fn colorings(ctx: &mut Ctx, path: &Path, m: usize, predicate: Predicate) -> CmdResult {
    let g = OutDigraph::parse(&read(path)?)?;
    let predicate = match predicate {
        Predicate::Cr => ColoringPredicate::CompletelyReachable,
        Predicate::Sync => ColoringPredicate::Synchronizing,
    };
    let r = search_colorings(&g, m, predicate, &ctx.limits)?;
    ctx.line(format!("colorings: {}", r.total));
    ctx.line(format!("matching: {}", r.count));
    if let Some(c) = &r.first {
        ctx.line("first:");
        ctx.out.push_str(&c.render(&g));
        if !ctx.out.ends_with('\n') {
            ctx.out.push('\n');
        }
        ctx.out.push_str(&c.to_dfa(&g)?.to_text());
    }
    Ok(Verdict::from_bool(r.count > 0))
}

fn run_hunt(ctx: &mut Ctx, n: usize, m: usize, seed: u64, count: u64) -> CmdResult {
    let report = hunt(n, m, seed, count, Generator::Uniform, &ctx.limits)?;
    ctx.line(format!("examined: {}", report.examined));
    ctx.line(format!("strongly connected: {}", report.strongly_connected));
    ctx.line(format!(
        "completely reachable: {}",
        report.completely_reachable
    ));
    ctx.line(format!("defect-1 reachable: {}", report.hypothesis_holds));
    ctx.line(format!("cyclic collections: {}", report.don_found));
    let mut refuted = false;
    for f in &report.findings {
        refuted |=
            f.kind.is_violation() || f.kind == crauto::gamma1::FindingKind::ConverseCounterexample;
        let _ = writeln!(
            ctx.out,
            "seed {}: {:?} {}",
            f.seed,
            f.kind,
            components_line(&f.components)
        );
        for line in f.dfa.to_text().lines() {
            let _ = writeln!(ctx.out, "  {line}");
        }
    }
    Ok(Verdict::from_bool(!refuted))
}

fn run(cli: Cli) -> (String, CmdResult) {
    let limits = match Limits::from_env() {
        Ok(l) => l,
        Err(e) => return (String::new(), Err(e.into())),
    };
    let mut ctx = Ctx {
        limits,
        verify_witness: cli.verify_witness,
        out: String::new(),
    };
    let result = match &cli.command {
        Command::Check { dfa } => check(&mut ctx, dfa),
        Command::Certify { dfa, witness } => certify(&mut ctx, dfa, witness.as_deref()),
        Command::Gamma1 { dfa, dot } => gamma1(&mut ctx, dfa, dot.as_deref()),
        Command::Binary { dfa, trace, powers } => binary(&mut ctx, dfa, *trace, *powers),
        Command::Don { dfa } => don(&mut ctx, dfa),
        Command::DonCoprime { dfa } => don_coprime(&mut ctx, dfa),
        Command::Reach { dfa, subset } => reach_subset(&mut ctx, dfa, subset),
        Command::Reset { dfa } => reset(&mut ctx, dfa),
        Command::Monoid { dfa, cap, full } => monoid(&mut ctx, dfa, *cap, *full),
        Command::Trees { count, list } => trees(&mut ctx, *count, *list),
        Command::T2a { tree, verify } => t2a(&mut ctx, tree, *verify),
        Command::Gen { family, n } => generate(&mut ctx, *family, *n),
        Command::Fai { action, file } => fai(&mut ctx, *action, file),
        Command::Colorings {
            graph,
            m,
            predicate,
        } => colorings(&mut ctx, graph, *m, *predicate),
        Command::Hunt { n, m, seed, count } => run_hunt(&mut ctx, *n, *m, *seed, *count),
    };
    (ctx.out, result)
}

fn main() -> ExitCode {
    let (out, result) = run(Cli::parse());
    print!("{out}");
    match result {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Fails) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}
