//! The `sgm` command line.
//!
//! [`run`] parses arguments, executes one subcommand against a
//! disk-backed [`CatalogCache`] and returns the process exit code:
//! 0 on success, 1 when a checked identity fails, 2 for usage or domain
//! errors and 3 for I/O errors.

pub mod store;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use sgm_core::duality::{dotted_expand_direct, duality_map, verify_duality_sum, verify_involution};
use sgm_core::euler::{euler_table, harer_zagier_assignment};
use sgm_core::feynman::{graph_sum_forward, graph_sum_inverse, FeynmanAssignment};
use sgm_core::gaussian::{compare_with_graph_sums, gaussian_roundtrip};
use sgm_core::poset::check_identities;
use sgm_core::rational::{format_rational, parse_rational, Rational};
use sgm_core::{CatalogCache, GraphCatalog, StableGraph};

use store::{DiskStore, VERSION};

#[derive(Debug, Parser)]
#[command(name = "sgm", version, about = "Stable graphs, contraction posets and their graph sums")]
pub struct Cli {
    /// Do not print the version banner on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Skip the on-disk catalog cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the connected stable graphs of genus g with n legs.
    Enumerate {
        g: u32,
        n: u32,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Show the contraction poset.
    Poset {
        g: u32,
        n: u32,
        /// Print the covering relations.
        #[arg(long)]
        hasse: bool,
        /// Print the Hasse diagram as a Graphviz digraph.
        #[arg(long)]
        dot: bool,
        /// Check the zeta/Möbius identities.
        #[arg(long)]
        check_mobius: bool,
    },
    /// Tabulate orbifold Euler characteristics of M_{g,n} and its compactification.
    Euler {
        #[arg(long = "max-chi")]
        max_chi: u32,
        /// Report the open-closed roundtrip per entry.
        #[arg(long)]
        roundtrip: bool,
        /// Write the table to this file (JSON if it ends in .json, CSV otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the duality map and check its properties.
    Duality {
        g: u32,
        n: u32,
        #[arg(long)]
        check_involution: bool,
        #[arg(long)]
        check_sum: bool,
        /// Compare with the explicit dotted-vertex gluing.
        #[arg(long)]
        oracle: bool,
    },
    /// Forward and inverse graph sums for user-supplied values of F_{g,n}.
    Invert {
        /// JSON object mapping "(g,n)" to "p/q".
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "1")]
        kappa: String,
    },
    /// Compare the Wick-expansion oracle with the graph sums.
    Gaussian {
        #[arg(long = "max-chi")]
        max_chi: u32,
        /// JSON object mapping "(g,n)" to "p/q"; Harer-Zagier values if absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        kappa: String,
    },
}

#[derive(Debug)]
pub enum Failure {
    Check(String),
    Usage(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

impl From<sgm_core::Error> for Failure {
    fn from(e: sgm_core::Error) -> Self {
        match e {
            sgm_core::Error::Io(_) => Failure::Io(e.to_string()),
            sgm_core::Error::Inconsistent(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return 2;
            }
            let _ = out.write_all(text.as_bytes());
            return 0;
        }
    };
    if !cli.quiet {
        let _ = writeln!(err, "sgm {VERSION}");
    }
    let result = open_cache(cli.no_cache).and_then(|cache| dispatch(&cli.command, &cache, out));
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn open_cache(no_cache: bool) -> Result<CatalogCache, Failure> {
    if no_cache {
        return Ok(CatalogCache::new());
    }
    let store = DiskStore::new(DiskStore::default_dir()?)?;
    Ok(CatalogCache::with_store(Box::new(store)))
}

fn dispatch(command: &Command, cache: &CatalogCache, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Enumerate { g, n, format } => enumerate(*g, *n, *format, cache, out),
        Command::Poset { g, n, hasse, dot, check_mobius } => poset(*g, *n, *hasse, *dot, *check_mobius, cache, out),
        Command::Euler { max_chi, roundtrip, out: path } => euler(*max_chi, *roundtrip, path.as_ref(), cache, out),
        Command::Duality { g, n, check_involution, check_sum, oracle } => {
            duality(*g, *n, *check_involution, *check_sum, *oracle, cache, out)
        }
        Command::Invert { input, kappa } => invert(input, kappa, cache, out),
        Command::Gaussian { max_chi, input, kappa } => gaussian(*max_chi, input.as_ref(), kappa, cache, out),
    }
}

fn key_prefix(catalog: &GraphCatalog, i: usize) -> String {
    let hex = catalog.key(i).to_hex();
    hex[..hex.len().min(12)].to_string()
}

fn enumerate(g: u32, n: u32, format: Format, cache: &CatalogCache, out: &mut dyn Write) -> Outcome {
    let cat = cache.catalog(g, n)?;
    let text = match format {
        Format::Table => {
            let mut s = format!("{:>4}  {:>3}  {:>6}  {:<12}  signature\n", "#", "|E|", "|Aut|", "key");
            for i in 0..cat.len() {
                let _ = writeln!(
                    s,
                    "{i:>4}  {:>3}  {:>6}  {:<12}  {}",
                    cat.num_edges(i),
                    cat.aut(i),
                    key_prefix(&cat, i),
                    cat.graph(i).signature()
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = (0..cat.len())
                .map(|i| {
                    serde_json::json!({
                        "key": cat.key(i).to_hex(),
                        "signature": cat.graph(i).signature(),
                        "edges": cat.num_edges(i),
                        "aut": cat.aut(i).to_string(),
                        "graph": cat.graph(i).to_json(),
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).map_err(sgm_core::Error::from)?;
            s.push('\n');
            s
        }
        Format::Dot => catalog_dot(&cat),
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// One cluster per graph: vertices are labeled by genus, legs are points.
fn catalog_dot(cat: &GraphCatalog) -> String {
    let mut s = format!("graph \"G_{}_{}\" {{\n  node [shape=circle];\n", cat.genus(), cat.legs());
    for i in 0..cat.len() {
        let graph: &StableGraph = cat.graph(i);
        let _ = writeln!(s, "  subgraph cluster_{i} {{");
        let _ = writeln!(s, "    label=\"{} |Aut|={}\";", key_prefix(cat, i), cat.aut(i));
        for (v, vert) in graph.vertices().iter().enumerate() {
            let _ = writeln!(s, "    g{i}v{v} [label=\"{}\"];", vert.genus);
            for leg in 0..vert.ext {
                let _ = writeln!(s, "    g{i}v{v}l{leg} [shape=point];");
                let _ = writeln!(s, "    g{i}v{v} -- g{i}v{v}l{leg};");
            }
        }
        for &(u, v) in graph.edges() {
            let _ = writeln!(s, "    g{i}v{u} -- g{i}v{v};");
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

fn poset(g: u32, n: u32, hasse: bool, dot: bool, check: bool, cache: &CatalogCache, out: &mut dyn Write) -> Outcome {
    let p = cache.poset(g, n)?;
    let cat = p.catalog();
    let mut s = String::new();
    if dot {
        s.push_str(&p.to_dot());
    }
    if hasse {
        let mut covers: Vec<(usize, usize)> = p.covers().iter().map(|&(lo, hi)| (hi, lo)).collect();
        covers.sort_unstable();
        for (hi, lo) in covers {
            let _ = writeln!(s, "{hi} > {lo}    {}  >  {}", cat.graph(hi).signature(), cat.graph(lo).signature());
        }
    }
    if !dot && !hasse && !check {
        for i in 0..p.len() {
            let below: Vec<String> = (0..p.len()).filter(|&j| j != i && p.leq(j, i)).map(|j| j.to_string()).collect();
            let _ = writeln!(s, "{i}  {}  below=[{}]", cat.graph(i).signature(), below.join(","));
        }
    }
    let mut failed = Vec::new();
    if check {
        for c in check_identities(&p)? {
            let _ = writeln!(s, "{} {}", if c.holds { "ok  " } else { "FAIL" }, c.name);
            if !c.holds {
                failed.push(c.name);
            }
        }
    }
    out.write_all(s.as_bytes())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("identities failed on ({g},{n}): {}", failed.join("; "))))
    }
}

fn euler(max_chi: u32, roundtrip: bool, path: Option<&PathBuf>, cache: &CatalogCache, out: &mut dyn Write) -> Outcome {
    let table = euler_table(max_chi, cache)?;
    let csv = table.to_csv();
    out.write_all(csv.as_bytes())?;
    if roundtrip {
        writeln!(out, "roundtrip: {} entries recovered exactly", table.entries.len())?;
    }
    if let Some(path) = path {
        let body = if path.extension().is_some_and(|e| e == "json") {
            let mut s = serde_json::to_string_pretty(&table.to_json()).map_err(sgm_core::Error::from)?;
            s.push('\n');
            s
        } else {
            csv
        };
        std::fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn duality(
    g: u32,
    n: u32,
    check_involution: bool,
    check_sum: bool,
    oracle: bool,
    cache: &CatalogCache,
    out: &mut dyn Write,
) -> Outcome {
    let p = cache.poset(g, n)?;
    let mut s = String::new();
    let mut failed = Vec::new();
    if !check_involution && !check_sum && !oracle {
        for i in 0..p.len() {
            let terms: Vec<String> = duality_map(&p, i)
                .terms()
                .map(|(j, q)| format!("{}*[{j}]", format_rational(q)))
                .collect();
            let _ = writeln!(s, "phi([{i}]) = {}", terms.join(" + "));
        }
    }
    if check_involution {
        let report = verify_involution(&p);
        let _ = writeln!(s, "{} phi^2 = id on {} graphs", status(report.holds()), report.size);
        if !report.holds() {
            failed.push("involution");
        }
    }
    if check_sum {
        let report = verify_duality_sum(&p);
        let _ = writeln!(s, "{} sum (-1)^|E| g^(G)/|Aut G| = Ver/n!", status(report.holds()));
        if !report.holds() {
            failed.push("duality sum");
        }
    }
    if oracle {
        let mut all = true;
        for i in 0..p.len() {
            let direct = dotted_expand_direct(p.catalog().graph(i), cache)?;
            if direct != duality_map(&p, i) {
                all = false;
                let _ = writeln!(s, "FAIL phi([{i}]) differs from the gluing construction");
            }
        }
        let _ = writeln!(s, "{} poset formula agrees with gluing on {} graphs", status(all), p.len());
        if !all {
            failed.push("oracle");
        }
    }
    out.write_all(s.as_bytes())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("duality checks failed on ({g},{n}): {}", failed.join(", "))))
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok  "
    } else {
        "FAIL"
    }
}

fn read_values(path: &PathBuf) -> Result<BTreeMap<(u32, u32), Rational>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let json: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(FeynmanAssignment::values_from_json(&json)?)
}

fn invert(input: &PathBuf, kappa: &str, cache: &CatalogCache, out: &mut dyn Write) -> Outcome {
    let kappa = parse_rational(kappa)?;
    let values = read_values(input)?;
    let original = FeynmanAssignment::new(values.clone(), kappa.clone());
    let mut tilde = BTreeMap::new();
    for &(g, n) in values.keys() {
        tilde.insert((g, n), graph_sum_forward(&*cache.catalog(g, n)?).evaluate(&original)?);
    }
    let transformed = FeynmanAssignment::new(tilde, kappa);
    let mut s = String::from("g,n,F,F_tilde,F_recovered\n");
    let mut mismatched = Vec::new();
    for (&(g, n), f) in &values {
        let recovered = graph_sum_inverse(&*cache.catalog(g, n)?).evaluate(&transformed)?;
        if &recovered != f {
            mismatched.push(format!("({g},{n})"));
        }
        let _ = writeln!(
            s,
            "{g},{n},{},{},{}",
            format_rational(f),
            format_rational(transformed.value(g, n)?),
            format_rational(&recovered)
        );
    }
    out.write_all(s.as_bytes())?;
    if mismatched.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("inversion did not recover {}", mismatched.join(" "))))
    }
}

fn gaussian(max_chi: u32, input: Option<&PathBuf>, kappa: &str, cache: &CatalogCache, out: &mut dyn Write) -> Outcome {
    let assignment = match input {
        Some(path) => FeynmanAssignment::new(read_values(path)?, parse_rational(kappa)?),
        None => {
            let mut a = harer_zagier_assignment(max_chi)?;
            a.kappa = parse_rational(kappa)?;
            a
        }
    };
    let oracle = compare_with_graph_sums(&assignment, max_chi, cache)?;
    let roundtrip = gaussian_roundtrip(&assignment, max_chi)?;
    let report = serde_json::json!({
        "max_chi": max_chi,
        "kappa": format_rational(&assignment.kappa),
        "oracle": oracle.entries,
        "roundtrip": { "holds": roundtrip.holds(), "entries": roundtrip.entries },
    });
    let mut s = serde_json::to_string_pretty(&report).map_err(sgm_core::Error::from)?;
    s.push('\n');
    out.write_all(s.as_bytes())?;
    match (oracle.holds(), roundtrip.holds()) {
        (true, true) => Ok(()),
        (false, _) => Err(Failure::Check("Gaussian oracle disagrees with the graph sums".into())),
        (_, false) => Err(Failure::Check("Gaussian roundtrip did not recover the input".into())),
    }
}
