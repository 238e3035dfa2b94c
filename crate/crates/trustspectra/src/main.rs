//! Command-line surface over the trustspectra library.

use std::fs::File;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use trustspectra::concepts::{
    concept_spectrum, decompose_edge, qualified_matrix, similarity_preserving_matrix,
};
use trustspectra::error::{Error, Result};
use trustspectra::fixture::TABLE1_WIDE_CSV;
use trustspectra::mat::Mat;
use trustspectra::model::{
    extract_block, greedy_complete_block, ingest_scores, DenseTrustMatrix, InputFormat,
    ScoreTable,
};
use trustspectra::recommend::{rank_trustees, refine_query};
use trustspectra::similarity::{
    induced_map, morphism_violation_report, ray_similarity, similarity_map_f, Ray,
};
use trustspectra::spectral::{svd, top_singular_pair, truncate, SpectralDecomposition, SvdMethod};

#[derive(Parser)]
#[command(name = "trustspectra", version, about = "Mine trust concepts from trust-score matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    WideCsv,
    LongCsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    GolubKahan,
    Jacobi,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct InputOpts {
    /// Score-table file; defaults to the built-in fixture
    /// (or `$TRUSTSPECTRA_FIXTURES/table1.csv` when that variable is set).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct BlockOpts {
    /// Trustee (row) ids, comma-separated; both --rows and --cols select an
    /// explicit block, neither selects the largest complete block greedily.
    #[arg(long, value_delimiter = ',')]
    rows: Vec<String>,
    /// Trustor (column) ids, comma-separated.
    #[arg(long, value_delimiter = ',')]
    cols: Vec<String>,
}

#[derive(Args)]
struct DecompOpts {
    /// Rank-cut tolerance; 0 means the automatic machine-precision threshold.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    #[arg(long, value_enum, default_value = "golub-kahan")]
    method: MethodArg,
    /// Optional rank cap applied after the tolerance cut.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct OutputOpts {
    #[arg(long, value_enum, default_value = "table")]
    output: OutputArg,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a score table and summarize it.
    Ingest {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Extract a complete block as a dense matrix.
    Block {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Decompose a block into its concept spectrum factors.
    Decompose {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// List the concepts of a block: singular weights and paired rays.
    Concepts {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Print the rank-1 qualified matrix of one concept (or all of them).
    Qualify {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        /// 1-based concept index; omitted means every concept.
        #[arg(long)]
        concept: Option<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Split one trust rating into per-concept contributions.
    Edge {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        object: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Rank all trustees for a subject under one concept.
    Recommend {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        concept: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Restrict a ranking to given outlets and report the best one.
    Refine {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        concept: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        outlets: Vec<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Report whether the induced map and its spectral repair preserve
    /// ray similarity on sampled pairs.
    Check {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        block: BlockOpts,
        #[command(flatten)]
        decomp: DecompOpts,
        /// Number of seeded random ray pairs per report.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Run the built-in fixture checks and print one line per check.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest { input, out } => {
            let table = load_table(&input)?;
            print_summary(&table, out.output);
            Ok(())
        }
        Command::Block { input, block, out } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            print_matrix(m.row_ids(), m.col_ids(), m.values(), out.output);
            Ok(())
        }
        Command::Decompose {
            input,
            block,
            decomp,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            match out.output {
                OutputArg::Json => println!("{}", d.to_json()),
                OutputArg::Csv => {
                    println!("concept,lambda");
                    for (i, l) in d.lambdas().iter().enumerate() {
                        println!("{},{}", i + 1, fmt(*l));
                    }
                }
                OutputArg::Table => {
                    println!("rank {}  (tol {})", d.rank(), d.tol());
                    println!("lambdas: {}", join(d.lambdas()));
                    print_matrix(m.col_ids(), &concept_labels(d.rank()), d.u(), OutputArg::Table);
                    print_matrix(m.row_ids(), &concept_labels(d.rank()), d.v(), OutputArg::Table);
                }
            }
            Ok(())
        }
        Command::Concepts {
            input,
            block,
            decomp,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            let spectrum = concept_spectrum(&d, &m)?;
            match out.output {
                OutputArg::Json => {
                    println!("{}", serde_json::to_string_pretty(&spectrum)?)
                }
                _ => {
                    for c in &spectrum {
                        let flag = if c.degenerate { "  [degenerate]" } else { "" };
                        println!("concept {}  lambda {}{}", c.index, fmt(c.lambda), flag);
                        println!("  subjects: {}", join(c.subject_ray.direction()));
                        println!("  objects:  {}", join(c.object_ray.direction()));
                    }
                }
            }
            Ok(())
        }
        Command::Qualify {
            input,
            block,
            decomp,
            concept,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            let spectrum = concept_spectrum(&d, &m)?;
            let wanted: Vec<_> = match concept {
                Some(k) => {
                    let c = spectrum
                        .iter()
                        .find(|c| c.index == k)
                        .ok_or(Error::RankOutOfRange {
                            index: k,
                            rank: d.rank(),
                        })?;
                    vec![c]
                }
                None => spectrum.iter().collect(),
            };
            for c in wanted {
                let q = qualified_matrix(c);
                if !matches!(out.output, OutputArg::Csv) {
                    println!("F_{}", q.concept_index);
                }
                print_matrix(m.row_ids(), m.col_ids(), &q.values, out.output);
            }
            Ok(())
        }
        Command::Edge {
            input,
            block,
            decomp,
            subject,
            object,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            let edge = decompose_edge(&d, &subject, &object)?;
            match out.output {
                OutputArg::Json => println!("{}", serde_json::to_string_pretty(&edge)?),
                OutputArg::Csv => {
                    println!("concept,r");
                    for c in &edge.components {
                        println!("{},{}", c.concept, fmt(c.r));
                    }
                }
                OutputArg::Table => {
                    println!("edge ({}, {})  total {}", subject, object, fmt(edge.total));
                    for c in &edge.components {
                        let flag = if c.degenerate { "  [degenerate]" } else { "" };
                        println!("  concept {}: {}{}", c.concept, fmt(c.r), flag);
                    }
                }
            }
            Ok(())
        }
        Command::Recommend {
            input,
            block,
            decomp,
            subject,
            concept,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            let rec = rank_trustees(&d, &subject, concept)?;
            match out.output {
                OutputArg::Json => println!("{}", serde_json::to_string_pretty(&rec)?),
                OutputArg::Csv => {
                    println!("object,rating");
                    for e in &rec.ranking {
                        println!("{},{}", e.object, fmt(e.rating));
                    }
                }
                OutputArg::Table => {
                    let flag = if rec.negative_affinity {
                        "  [negative affinity]"
                    } else {
                        ""
                    };
                    println!("subject {} under concept {}{}", subject, concept, flag);
                    for e in &rec.ranking {
                        println!("  {}: {}", e.object, fmt(e.rating));
                    }
                }
            }
            Ok(())
        }
        Command::Refine {
            input,
            block,
            decomp,
            subject,
            concept,
            outlets,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            let r = refine_query(&d, &subject, &outlets, concept)?;
            match out.output {
                OutputArg::Json => println!("{}", serde_json::to_string_pretty(&r)?),
                OutputArg::Csv => {
                    println!("object,rating");
                    for e in &r.ratings {
                        println!("{},{}", e.object, fmt(e.rating));
                    }
                }
                OutputArg::Table => {
                    println!("best for {} under concept {}: {}", subject, concept, r.best);
                    for e in &r.ratings {
                        println!("  {}: {}", e.object, fmt(e.rating));
                    }
                }
            }
            Ok(())
        }
        Command::Check {
            input,
            block,
            decomp,
            samples,
            out,
        } => {
            let table = load_table(&input)?;
            let m = select_block(&table, &block)?;
            let d = decompose(&m, &decomp)?;
            cmd_check(&m, &d, samples, decomp.seed, out.output)
        }
        Command::Selftest { seed } => selftest(seed),
    }
}

// ---- input handling ----

fn load_table(opts: &InputOpts) -> Result<ScoreTable> {
    match &opts.input {
        Some(path) => {
            let format = opts.format.map(to_format).unwrap_or_else(|| infer(path));
            let file = File::open(path)?;
            ingest_scores(file, format)
        }
        None => {
            if let Ok(dir) = std::env::var("TRUSTSPECTRA_FIXTURES") {
                let path = PathBuf::from(dir).join("table1.csv");
                let mut text = String::new();
                File::open(&path)?.read_to_string(&mut text)?;
                ingest_scores(text.as_bytes(), InputFormat::WideCsv)
            } else {
                ingest_scores(TABLE1_WIDE_CSV.as_bytes(), InputFormat::WideCsv)
            }
        }
    }
}

fn to_format(f: FormatArg) -> InputFormat {
    match f {
        FormatArg::WideCsv => InputFormat::WideCsv,
        FormatArg::LongCsv => InputFormat::LongCsv,
        FormatArg::Json => InputFormat::Json,
    }
}

fn infer(path: &std::path::Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => InputFormat::Json,
        _ => InputFormat::WideCsv,
    }
}

fn select_block(table: &ScoreTable, opts: &BlockOpts) -> Result<DenseTrustMatrix> {
    match (opts.rows.is_empty(), opts.cols.is_empty()) {
        (false, false) => extract_block(table, &opts.rows, &opts.cols),
        (true, true) => {
            let (rows, cols) = greedy_complete_block(table)?;
            extract_block(table, &rows, &cols)
        }
        _ => Err(Error::InvalidArgument(
            "--rows and --cols must be given together".into(),
        )),
    }
}

fn decompose(m: &DenseTrustMatrix, opts: &DecompOpts) -> Result<SpectralDecomposition> {
    let d = match opts.method {
        MethodArg::GolubKahan => svd(m, opts.tol, SvdMethod::GolubKahan)?,
        MethodArg::Jacobi => svd(m, opts.tol, SvdMethod::Jacobi)?,
        MethodArg::Power => {
            let n = m.row_ids().len().max(m.col_ids().len());
            let (lambda, u, v) = top_singular_pair(m, 100 * n, 1e-12, opts.seed)?;
            // repackage the single triple through the decomposition schema
            let wire = json!({
                "row_ids": m.row_ids(),
                "col_ids": m.col_ids(),
                "lambdas": [lambda],
                "u": u.iter().map(|x| vec![*x]).collect::<Vec<_>>(),
                "v": v.iter().map(|x| vec![*x]).collect::<Vec<_>>(),
                "tol": opts.tol,
                "rank": 1,
            });
            SpectralDecomposition::from_json(&wire.to_string())?
        }
    };
    match opts.rank {
        Some(k) if k < d.rank() => truncate(&d, k),
        Some(0) => Err(Error::InvalidArgument("rank cap must be at least 1".into())),
        _ => Ok(d),
    }
}

// ---- check / selftest ----

fn random_ray(rng: &mut ChaCha8Rng, dim: usize) -> Ray {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        if let Ok(r) = Ray::new(&v) {
            return r;
        }
    }
}

fn span_ray(rng: &mut ChaCha8Rng, d: &SpectralDecomposition) -> Ray {
    loop {
        let coords: Vec<f64> = (0..d.rank()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        if let Ok(r) = Ray::new(&d.u().matvec(&coords)) {
            return r;
        }
    }
}

fn cmd_check(
    m: &DenseTrustMatrix,
    d: &SpectralDecomposition,
    samples: usize,
    seed: u64,
    output: OutputArg,
) -> Result<()> {
    let dim = m.col_ids().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut pairs: Vec<(Ray, Ray)> = Vec::new();
    if dim == 4 {
        // the known similarity-breaking pair for the built-in fixture block
        pairs.push((
            Ray::new(&[0.0, 0.5, 0.3, -0.8])?,
            Ray::new(&[0.25, 0.5, 0.4, -0.15])?,
        ));
    }
    for _ in 0..samples {
        pairs.push((random_ray(&mut rng, dim), random_ray(&mut rng, dim)));
    }
    let induced = morphism_violation_report(m, &pairs)?;
    let induced_violations = induced.iter().filter(|r| r.violated).count();

    // the spectral repair, sampled on the subject-side concept span
    let mut span_pairs = Vec::new();
    for _ in 0..samples {
        span_pairs.push((span_ray(&mut rng, d), span_ray(&mut rng, d)));
    }
    let mut span_records = Vec::new();
    let mut span_violations = 0usize;
    for (i, (p, q)) in span_pairs.iter().enumerate() {
        let s_before = ray_similarity(p, q)?;
        let s_after = ray_similarity(&similarity_map_f(d, p)?, &similarity_map_f(d, q)?)?;
        let violated = (s_after - s_before).abs() > 1e-10;
        if violated {
            span_violations += 1;
        }
        span_records.push(json!({
            "pair": i,
            "s_before": s_before,
            "s_after": s_after,
            "violated": violated,
        }));
    }

    match output {
        OutputArg::Json => {
            let doc = json!({
                "induced_map": {
                    "pairs": induced,
                    "violations": induced_violations,
                },
                "similarity_map": {
                    "pairs": span_records,
                    "violations": span_violations,
                },
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        _ => {
            for r in &induced {
                if r.violated {
                    println!(
                        "induced map pair {}: {} -> {}  VIOLATION",
                        r.pair,
                        fmt(r.s_before),
                        fmt(r.s_after)
                    );
                }
            }
            println!(
                "induced map: {} violation(s) over {} pair(s)",
                induced_violations,
                induced.len()
            );
            println!(
                "similarity-preserving map on concept span: {} violation(s) over {} pair(s)",
                span_violations,
                span_pairs.len()
            );
        }
    }
    Ok(())
}

fn selftest(seed: u64) -> Result<()> {
    use trustspectra::fixture::{fixture_decomposition, fixture_block, FIXTURE_RANK_TOL};

    let m = fixture_block();
    let d = fixture_decomposition(SvdMethod::GolubKahan);
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("{} ... {}", name, if pass { "ok" } else { "FAIL" });
        ok &= pass;
    };

    check(
        "fixture weights near (3, 1)",
        d.rank() == 2
            && (d.lambdas()[0] - 3.0).abs() <= 0.02
            && (d.lambdas()[1] - 1.0).abs() <= 0.02,
    );

    let spectrum = concept_spectrum(&d, &m)?;
    let sum = spectrum
        .iter()
        .map(|c| qualified_matrix(c).values)
        .fold(Mat::zeros(3, 4), |acc, x| acc.add(&x));
    check(
        "qualified matrices sum to V*U^T",
        sum.sub(&similarity_preserving_matrix(&d)).max_abs() <= 1e-12,
    );

    let edge_ci = decompose_edge(&d, "c", "i")?;
    let edge_dk = decompose_edge(&d, "d", "k")?;
    check(
        "edge (c, i) components near (1.245, -0.12)",
        (edge_ci.components[0].r - 1.245).abs() <= 0.02
            && (edge_ci.components[1].r + 0.12).abs() <= 0.02,
    );
    check(
        "edge (d, k) components near (0, -0.56)",
        edge_dk.components[0].r.abs() <= 0.02 && (edge_dk.components[1].r + 0.56).abs() <= 0.02,
    );

    let phi = Ray::new(&[0.0, 0.5, 0.3, -0.8])?;
    let psi = Ray::new(&[0.25, 0.5, 0.4, -0.15])?;
    let s_before = ray_similarity(&phi, &psi)?;
    let s_after = ray_similarity(&induced_map(&m, &phi)?, &induced_map(&m, &psi)?)?;
    check(
        "induced map breaks the known pair by >= 0.3",
        s_before - s_after >= 0.3,
    );

    let rec_food = rank_trustees(&d, "b", 2)?;
    let rec_guns = rank_trustees(&d, "b", 1)?;
    check(
        "recommendations pick k (concept 2) and i (concept 1) for b",
        rec_food.ranking[0].object == "k" && rec_guns.ranking[0].object == "i",
    );

    let back = SpectralDecomposition::from_json(&d.to_json())?;
    check(
        "decomposition JSON round-trip preserves reconstruction",
        back.reconstruct().sub(&d.reconstruct()).max_abs() <= 1e-12,
    );

    let (lambda, _, _) = top_singular_pair(&m, 400, 1e-12, seed)?;
    check(
        "power iteration matches top weight within 1e-6",
        (lambda - svd(&m, FIXTURE_RANK_TOL, SvdMethod::GolubKahan)?.lambdas()[0]).abs() <= 1e-6,
    );

    if ok {
        println!("selftest passed");
        Ok(())
    } else {
        Err(Error::InvalidArgument("selftest failed".into()))
    }
}

// ---- output helpers ----

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join("  ")
}

fn concept_labels(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("c{i}")).collect()
}

fn print_matrix(row_ids: &[String], col_ids: &[String], m: &Mat, output: OutputArg) {
    match output {
        OutputArg::Json => {
            let doc = json!({
                "row_ids": row_ids,
                "col_ids": col_ids,
                "values": m.to_nested(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        OutputArg::Csv => {
            println!(",{}", col_ids.join(","));
            for (i, id) in row_ids.iter().enumerate() {
                let vals: Vec<String> = m.row(i).iter().map(|x| fmt(*x)).collect();
                println!("{},{}", id, vals.join(","));
            }
        }
        OutputArg::Table => {
            let width = 12;
            print!("{:>6}", "");
            for c in col_ids {
                print!("{c:>width$}");
            }
            println!();
            for (i, id) in row_ids.iter().enumerate() {
                print!("{id:>6}");
                for x in m.row(i) {
                    print!("{:>width$}", fmt(*x));
                }
                println!();
            }
        }
    }
}

fn print_summary(table: &ScoreTable, output: OutputArg) {
    let missing: Vec<(String, String)> = table
        .rows()
        .iter()
        .flat_map(|r| {
            table
                .cols()
                .iter()
                .filter(|c| table.get(r, c).is_none())
                .map(|c| (r.clone(), c.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    match output {
        OutputArg::Json => {
            let doc = json!({
                "trustees": table.rows(),
                "trustors": table.cols(),
                "filled": table.filled(),
                "missing": missing,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        _ => {
            println!(
                "{} trustees x {} trustors, {} of {} cells filled",
                table.rows().len(),
                table.cols().len(),
                table.filled(),
                table.rows().len() * table.cols().len()
            );
            for (r, c) in &missing {
                println!("  missing ({r}, {c})");
            }
        }
    }
}
