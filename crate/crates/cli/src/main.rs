use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use upoly_core::canon::{canonicalize_free, canonicalize_rooted, is_rooted_isomorphic};
use upoly_core::hanging::{alpha_vector, shapes};
use upoly_core::partitions::{count_partitions, designated_part_census};
use upoly_core::situations::{enumerate_situations, m_count_with_stats, occurrence_count_oracle};
use upoly_core::{
    check_good, good_decode, good_encode, is_isomorphic, parse_documents, run_census, u_polynomial, CensusMode,
    CensusParams, ContainmentTable, Error, EvalMode, Expression, GoodEmbedding, PottsParams, Procedure1, Situation,
    TreeDocument, UMode, Weight, WeightedTree,
};

#[derive(Parser)]
#[command(name = "upoly", version, about = "Exact U-polynomial tools for vertex-weighted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical code of each tree (rooted codes for documents with a root)
    Canon { file: PathBuf },
    /// Exit 0 if the two trees are isomorphic, 1 if not
    Iso { first: PathBuf, second: PathBuf },
    /// Expression-count table of each tree
    Upoly {
        file: PathBuf,
        /// Enumerate every edge subset instead of running the tree DP
        #[arg(long)]
        brute: bool,
    },
    /// Shapes (sides of an edge with 2..n-2 vertices)
    Shapes { file: PathBuf },
    /// Distinct shape weights, increasing
    Alpha { file: PathBuf },
    /// Embed each tree into the good class
    Encode { file: PathBuf },
    /// Recover the source tree of each embedding
    Decode { file: PathBuf },
    /// Check the good-set axioms on all trees of all files; exit 1 on failure
    CheckGood {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Designated, shaped and non-shaped j-partition counts for an expression
    Count {
        #[arg(long)]
        j: Weight,
        /// Parts of the expression, e.g. "2,2,1"
        #[arg(long)]
        expr: Expression,
        /// Count by enumerating every connected partition
        #[arg(long, conflicts_with = "check")]
        oracle: bool,
        /// Run both methods and exit 4 if they disagree
        #[arg(long)]
        check: bool,
        file: PathBuf,
    },
    /// Situations of a given weight built from the tree's hanging subtrees
    Situations {
        #[arg(long)]
        weight: Weight,
        file: PathBuf,
    },
    /// Occurrences of a situation, e.g. --situation "1;1(1)"
    MCount {
        #[arg(long)]
        situation: Situation,
        #[arg(long, conflicts_with = "check")]
        oracle: bool,
        #[arg(long)]
        check: bool,
        file: PathBuf,
    },
    /// Evaluate M, B or Br at integer parameters
    Eval {
        #[arg(ignore_case = true)]
        invariant: Invariant,
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, default_value_t = 2)]
        y: u32,
        #[arg(long, value_enum, default_value_t = Mode::Subsets)]
        mode: Mode,
    },
    /// Fingerprint census; exit 1 if two non-isomorphic trees collide
    Census {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = CensusKind::Stanley)]
        mode: CensusKind,
        #[arg(long, default_value_t = 8)]
        weight_bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random source trees in goodset mode
        #[arg(long, default_value_t = 30)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Invariant {
    M,
    B,
    Br,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Subsets,
    Colourings,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusKind {
    Stanley,
    Goodset,
}

enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Core(Error::Resource(_)) => 3,
            Failure::Core(Error::Internal(_) | Error::MissingTableEntry(_)) => 4,
            Failure::Core(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_documents(path: &Path) -> Result<Vec<TreeDocument>, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(parse_documents(&text)?)
}

fn read_one(path: &Path) -> Result<TreeDocument, Failure> {
    let mut docs = read_documents(path)?;
    if docs.len() != 1 {
        return Err(Failure::Input(format!("{}: expected one tree, found {}", path.display(), docs.len())));
    }
    Ok(docs.remove(0))
}

fn read_tree(path: &Path) -> Result<WeightedTree, Failure> {
    Ok(read_one(path)?.to_tree()?)
}

fn canon(file: &Path) -> Outcome {
    for doc in read_documents(file)? {
        let code = match doc.root {
            Some(_) => canonicalize_rooted(&doc.to_rooted()?),
            None => canonicalize_free(&doc.to_tree()?),
        };
        println!("{code}");
    }
    Ok(0)
}

fn iso(first: &Path, second: &Path) -> Outcome {
    let (a, b) = (read_one(first)?, read_one(second)?);
    let same = match (a.root, b.root) {
        (Some(_), Some(_)) => is_rooted_isomorphic(&a.to_rooted()?, &b.to_rooted()?),
        _ => is_isomorphic(&a.to_tree()?, &b.to_tree()?),
    };
    println!("{}", if same { "isomorphic" } else { "not isomorphic" });
    Ok(if same { 0 } else { 1 })
}

fn upoly(file: &Path, brute: bool) -> Outcome {
    let mode = if brute { UMode::Brute } else { UMode::Dp };
    for (i, doc) in read_documents(file)?.iter().enumerate() {
        if i > 0 {
            println!();
        }
        print!("{}", u_polynomial(&doc.to_tree()?, mode)?.fingerprint());
    }
    Ok(0)
}

fn list_shapes(file: &Path) -> Outcome {
    let t = read_tree(file)?;
    let mut all = shapes(&t);
    all.sort_by(|a, b| a.weight.cmp(&b.weight).then_with(|| a.code.cmp(&b.code)).then(a.detach_edge.cmp(&b.detach_edge)));
    println!("weight\tshape\tedge");
    for s in all {
        println!("{}\t{}\t{}-{}", s.weight, s.component, s.detach_edge.0, s.detach_edge.1);
    }
    Ok(0)
}

fn alpha(file: &Path) -> Outcome {
    let a: Vec<String> = alpha_vector(&read_tree(file)?).iter().map(ToString::to_string).collect();
    println!("{}", a.join(","));
    Ok(0)
}

fn encode(file: &Path) -> Outcome {
    for doc in read_documents(file)? {
        let g = good_encode(&doc.to_tree()?)?;
        let mut out = TreeDocument::from_tree(&g.t_prime);
        out.root = Some(g.root);
        println!("{}", out.to_json());
    }
    Ok(0)
}

fn decode(file: &Path) -> Outcome {
    for doc in read_documents(file)? {
        let g = GoodEmbedding::from_t_prime(doc.to_tree()?)?;
        if doc.root.is_some_and(|r| r != g.root) {
            return Err(Error::MalformedEmbedding("the document's root is not the heaviest vertex".into()).into());
        }
        println!("{}", TreeDocument::from_tree(&good_decode(&g)?).to_json());
    }
    Ok(0)
}

fn check_good_files(files: &[PathBuf]) -> Outcome {
    let mut trees = Vec::new();
    for f in files {
        for doc in read_documents(f)? {
            trees.push(doc.to_tree()?);
        }
    }
    let report = check_good(&trees);
    let verdict = |w: Option<usize>| w.map_or("pass".to_string(), |v| format!("FAIL at vertex {v}"));
    for (i, t) in report.trees.iter().enumerate() {
        println!(
            "tree {i}: leaf structure {}, leaf weights {}",
            verdict(t.structure_witness),
            verdict(t.leaf_weight_witness)
        );
    }
    match &report.shape_violation {
        None => println!("shapes: pass ({} light shapes)", report.shapes_checked),
        Some((a, b)) => println!(
            "shapes: FAIL (tree {} edge {}-{} and tree {} edge {}-{} share a weight multiset)",
            a.tree, a.detach_edge.0, a.detach_edge.1, b.tree, b.detach_edge.0, b.detach_edge.1
        ),
    }
    Ok(if report.is_good() { 0 } else { 1 })
}

fn count(j: &Weight, e: &Expression, oracle: bool, check: bool, file: &Path) -> Outcome {
    let t = read_tree(file)?;
    let partitions = count_partitions(&t, e);
    let (shaped, nonshaped) = if oracle {
        designated_part_census(&t, j, e)?
    } else {
        let c = Procedure1::new(&t)?.counts(j, e)?;
        if check {
            let slow = designated_part_census(&t, j, e)?;
            if slow != (c.shaped.clone(), c.nonshaped.clone()) {
                return Err(Error::Internal(format!(
                    "procedure gave shaped {} / non-shaped {}, enumeration {} / {}",
                    c.shaped, c.nonshaped, slow.0, slow.1
                ))
                .into());
            }
        }
        (c.shaped, c.nonshaped)
    };
    println!("partitions: {partitions}");
    println!("designated: {}", &shaped + &nonshaped);
    println!("nonshaped: {nonshaped}");
    println!("shaped: {shaped}");
    Ok(0)
}

fn situations(weight: &Weight, file: &Path) -> Outcome {
    for s in enumerate_situations(&read_tree(file)?, weight)? {
        println!("{s}");
    }
    Ok(0)
}

fn m_count(s: &Situation, oracle: bool, check: bool, file: &Path) -> Outcome {
    let t = read_tree(file)?;
    if oracle {
        println!("m: {}", occurrence_count_oracle(&t, s)?);
        return Ok(0);
    }
    let tbl = ContainmentTable::for_situation(&t, s)?;
    let (m, stats) = m_count_with_stats(&t, s, &tbl)?;
    if check {
        let slow = occurrence_count_oracle(&t, s)?;
        if slow != m {
            return Err(Error::Internal(format!("inclusion–exclusion gave {m}, enumeration {slow}")).into());
        }
    }
    println!("m: {m}");
    println!("lambda0: {}", stats.lambda0);
    println!("forests: {}", stats.forests);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn eval(invariant: Invariant, file: &Path, k: u32, q: u32, r: u32, x: i64, y: u32, mode: Mode) -> Outcome {
    let t = read_tree(file)?;
    let p = PottsParams { k, q, r, x, y };
    let mode = match mode {
        Mode::Subsets => EvalMode::Subsets,
        Mode::Colourings => EvalMode::Colourings,
    };
    let value = match invariant {
        Invariant::M => p.m(&t, mode)?,
        Invariant::B => p.b(&t)?,
        Invariant::Br => p.br(&t, mode)?,
    };
    println!("{value}");
    Ok(0)
}

fn census(max_n: usize, mode: CensusKind, weight_bound: u64, seed: u64, samples: usize) -> Outcome {
    let mode = match mode {
        CensusKind::Stanley => CensusMode::Stanley,
        CensusKind::Goodset => CensusMode::GoodSet,
    };
    let report = run_census(&CensusParams { max_n, mode, weight_bound, seed, samples })?;
    print!("{}", report.render());
    eprintln!("elapsed: {:.3}s", report.elapsed.as_secs_f64());
    Ok(if report.holds() { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Canon { file } => canon(&file),
        Command::Iso { first, second } => iso(&first, &second),
        Command::Upoly { file, brute } => upoly(&file, brute),
        Command::Shapes { file } => list_shapes(&file),
        Command::Alpha { file } => alpha(&file),
        Command::Encode { file } => encode(&file),
        Command::Decode { file } => decode(&file),
        Command::CheckGood { files } => check_good_files(&files),
        Command::Count { j, expr, oracle, check, file } => count(&j, &expr, oracle, check, &file),
        Command::Situations { weight, file } => situations(&weight, &file),
        Command::MCount { situation, oracle, check, file } => m_count(&situation, oracle, check, &file),
        Command::Eval { invariant, file, k, q, r, x, y, mode } => eval(invariant, &file, k, q, r, x, y, mode),
        Command::Census { max_n, mode, weight_bound, seed, samples } => {
            census(max_n, mode, weight_bound, seed, samples)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("upoly: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
