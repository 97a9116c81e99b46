//! Command line front end: one subcommand per library operation, graph
//! JSON in, JSON on stdout, a one-line summary on stderr under --verbose.
//!
//! Exit codes are stable for scripting: 0 success, 2 invalid input,
//! 3 bounded-search exhaustion, 4 verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use modhom::csp::{self, TableCsp};
use modhom::dichotomy::{self, ZDecomposition};
use modhom::graph::Graph;
use modhom::json::{self, GraphDoc};
use modhom::mobius::{self, IndistVerdict};
use modhom::modp::Prime;
use modhom::products::{self, ProductKind};
use modhom::reduction;
use modhom::{hom, Error, PinnedGraph};
use serde_json::json;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "modhom", version, about = "Graph homomorphism counting, modular reductions, products, and the tractability classifier")]
struct Cli {
    /// Print a one-line human summary to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductArg {
    Direct,
    Cartesian,
    Diamond,
    Disjoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum FactorArg {
    Cartesian,
    Diamond,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact homomorphism count from g into h.
    Count {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Homomorphism count from g into h modulo a prime.
    CountMod {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Injective homomorphism count between pinned graphs.
    Inj {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Automorphism count of h via inversion over the partition lattice.
    Aut {
        #[arg(long)]
        h: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_bell: usize,
    },
    /// p-reduced form of h: fixed points of order-p automorphisms, repeated.
    Preduce {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Tractability verdict for counting into h modulo p, with witness.
    Classify {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Closed-form count into a target whose components are all easy shapes.
    CountTractable {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Injective count via inversion; pins allowed on both sides.
    MobiusInj {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_bell: usize,
    },
    /// Decide whether two vertices of h are indistinguishable modulo p.
    Indist {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        p: u64,
        /// Largest pinned source tried when searching for a separator.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Binary product of two graphs.
    Products {
        #[arg(long)]
        kind: ProductArg,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Boolean square: join vertices sharing a neighbor.
    Square {
        #[arg(long)]
        g: PathBuf,
    },
    /// Cartesian skeleton: the square minus loops and dispensable edges.
    Skeleton {
        #[arg(long)]
        g: PathBuf,
    },
    /// Prime factorization under the chosen product.
    Factor {
        #[arg(long)]
        kind: FactorArg,
        #[arg(long)]
        g: PathBuf,
    },
    /// Search h for a thick Z-subgraph.
    Zgraph {
        #[arg(long)]
        h: PathBuf,
    },
    /// Derive a full Z-decomposition: thick Z plus verified gadgets.
    Gadgets {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
        /// Largest gadget size tried.
        #[arg(long, default_value_t = 2)]
        max_n: usize,
    },
    /// Weighted independent-set sum with weight alpha per left vertex and
    /// beta per right vertex.
    Bis {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        alpha: u64,
        #[arg(long)]
        beta: u64,
        #[arg(long)]
        p: u64,
    },
    /// Build the replacement instance G' for a source, deriving the
    /// decomposition of h first.
    ReduceBis {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
        /// Largest gadget size tried.
        #[arg(long, default_value_t = 2)]
        max_n: usize,
    },
    /// Check the replacement congruence end to end; unequal sides exit 4.
    VerifyBis {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
        /// Largest gadget size tried.
        #[arg(long, default_value_t = 2)]
        max_n: usize,
    },
    /// Evaluate the relation a pinned gadget defines on h modulo p.
    MppEval {
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Glue a gadget with itself until every extension count is 1 mod p.
    Strictify {
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Count pinned solutions using only pin-free oracle calls.
    ConstantsReduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 10)]
        max_bell: usize,
        /// Write each oracle call as a JSON line to this file.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::SearchExhausted { .. } => 3,
            Error::WitnessMismatch | Error::GadgetVerificationFailed { .. } => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Display) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

struct Outcome {
    json: String,
    note: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            println!("{}", out.json);
            if cli.verbose {
                eprintln!("{}", out.note);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(json::graph_from_str(&read_file(path)?)?)
}

fn read_pinned(path: &Path) -> Result<PinnedGraph, Failure> {
    Ok(json::pinned_from_str(&read_file(path)?)?)
}

fn read_csp(path: &Path) -> Result<TableCsp, Failure> {
    Ok(TableCsp::from_str_json(&read_file(path)?)?)
}

fn prime(v: u64) -> Result<Prime, Failure> {
    Ok(Prime::new(v)?)
}

fn shape(g: &Graph) -> String {
    format!("{} vertices, {} edges", g.n(), g.edges().len())
}

/// Thick Z plus gadgets for h, shared by the bis reduction commands. A
/// target with no thick Z (complete bipartite) cannot host the reduction
/// at all, which is an input error; a failed gadget search within the
/// size bound is exhaustion.
fn derive_decomposition(h: &Graph, p: Prime, max_n: usize) -> Result<ZDecomposition, Failure> {
    let z = dichotomy::find_thick_z(h)?.ok_or_else(|| {
        invalid("target is complete bipartite, so it has no thick Z to reduce through")
    })?;
    dichotomy::find_gadgets(h, &z, p, max_n)?.ok_or(Failure {
        code: 3,
        message: format!("no gadget pair with at most {max_n} vertices; retry with a larger --max-n"),
    })
}

fn run(cmd: &Cmd) -> Result<Outcome, Failure> {
    match cmd {
        Cmd::Count { g, h } => {
            let (g, h) = (read_graph(g)?, read_graph(h)?);
            let c = hom::count_hom(&g, &h)?;
            Ok(Outcome {
                json: json!({ "count": c.to_string() }).to_string(),
                note: format!("{} into {}: {c} maps", shape(&g), shape(&h)),
            })
        }
        Cmd::CountMod { g, h, p } => {
            let (g, h, p) = (read_graph(g)?, read_graph(h)?, prime(*p)?);
            let r = hom::count_hom_mod(&g, &h, p)?;
            Ok(Outcome {
                json: json!({ "residue": r.value() }).to_string(),
                note: format!(
                    "{} into {}: {} maps mod {}",
                    shape(&g),
                    shape(&h),
                    r.value(),
                    p.get()
                ),
            })
        }
        Cmd::Inj { g, h } => {
            let (g, h) = (read_pinned(g)?, read_pinned(h)?);
            let c = hom::count_inj(&g, &h)?;
            Ok(Outcome {
                json: json!({ "count": c.to_string() }).to_string(),
                note: format!("{c} injective maps"),
            })
        }
        Cmd::Aut { h, max_bell } => {
            let h = read_graph(h)?;
            let c = mobius::aut_order(&h, *max_bell)?;
            Ok(Outcome {
                json: json!({ "count": c.to_string() }).to_string(),
                note: format!("{}: automorphism group of order {c}", shape(&h)),
            })
        }
        Cmd::Preduce { h, p } => {
            let (h, p) = (read_graph(h)?, prime(*p)?);
            let reduced = reduction::p_reduce(&h, p);
            Ok(Outcome {
                note: format!("{} reduced to {} mod {}", shape(&h), shape(&reduced), p.get()),
                json: json::graph_to_string(&reduced),
            })
        }
        Cmd::Classify { h, p } => {
            let (h, p) = (read_graph(h)?, prime(*p)?);
            let v = dichotomy::classify(&h, p);
            Ok(Outcome {
                json: json!({
                    "verdict": v.verdict,
                    "reduced_target": GraphDoc::from_graph(&v.reduced_target),
                    "witness": v.witness,
                })
                .to_string(),
                note: format!("{} mod {}: {:?}", shape(&h), p.get(), v.verdict),
            })
        }
        Cmd::CountTractable { g, h } => {
            let (g, h) = (read_graph(g)?, read_graph(h)?);
            let c = dichotomy::count_tractable(&g, &h)?;
            Ok(Outcome {
                json: json!({ "count": c.to_string() }).to_string(),
                note: format!("{c} maps by closed form"),
            })
        }
        Cmd::MobiusInj { g, h, max_bell } => {
            let (g, h) = (read_pinned(g)?, read_pinned(h)?);
            let c = mobius::inj_via_inversion(&g, &h, *max_bell)?;
            Ok(Outcome {
                json: json!({ "count": c.to_string() }).to_string(),
                note: format!("{c} injective maps via inversion"),
            })
        }
        Cmd::Indist { h, a, b, p, max_n } => {
            let (h, p) = (read_graph(h)?, prime(*p)?);
            match mobius::indistinguishable(&h, *a, *b, p, *max_n)? {
                IndistVerdict::Isomorphic { witness } => Ok(Outcome {
                    json: json!({ "verdict": "isomorphic", "witness": witness }).to_string(),
                    note: format!("an automorphism carries {a} to {b}"),
                }),
                IndistVerdict::Distinguished { source, pin, counts } => Ok(Outcome {
                    json: json!({
                        "verdict": "distinguished",
                        "source": GraphDoc::from_graph(&source),
                        "pin": pin,
                        "counts": [counts.0, counts.1],
                    })
                    .to_string(),
                    note: format!(
                        "a {}-vertex source separates {a} from {b}: {} vs {} mod {}",
                        source.n(),
                        counts.0,
                        counts.1,
                        p.get()
                    ),
                }),
                IndistVerdict::Inconclusive { bound } => Err(Failure {
                    code: 3,
                    message: format!(
                        "no automorphism found and no source with at most {bound} vertices separates {a} from {b}; retry with a larger --max-n"
                    ),
                }),
            }
        }
        Cmd::Products { kind, g, h } => {
            let (g, h) = (read_graph(g)?, read_graph(h)?);
            let prod = match kind {
                ProductArg::Direct => products::direct_product(&g, &h),
                ProductArg::Cartesian => products::cartesian_product(&g, &h),
                ProductArg::Diamond => products::diamond_product(&g, &h)?,
                ProductArg::Disjoint => products::disjoint_union(&g, &h),
            };
            Ok(Outcome {
                note: format!("product has {}", shape(&prod)),
                json: json::graph_to_string(&prod),
            })
        }
        Cmd::Square { g } => {
            let g = read_graph(g)?;
            let sq = products::boolean_square(&g);
            Ok(Outcome {
                note: format!("square has {}", shape(&sq)),
                json: json::graph_to_string(&sq),
            })
        }
        Cmd::Skeleton { g } => {
            let g = read_graph(g)?;
            let s = products::cartesian_skeleton(&g);
            Ok(Outcome {
                note: format!("skeleton has {}", shape(&s)),
                json: json::graph_to_string(&s),
            })
        }
        Cmd::Factor { kind, g } => {
            let g = read_graph(g)?;
            let f = match kind {
                FactorArg::Cartesian => products::cartesian_prime_factorization(&g)?,
                FactorArg::Diamond => products::diamond_prime_factorization(&g)?,
            };
            let kind_name = match f.kind {
                ProductKind::Direct => "direct",
                ProductKind::Cartesian => "cartesian",
                ProductKind::Diamond => "diamond",
            };
            Ok(Outcome {
                json: json!({
                    "kind": kind_name,
                    "factors": f.factors.iter().map(GraphDoc::from_graph).collect::<Vec<_>>(),
                    "witness": f.witness,
                })
                .to_string(),
                note: format!("{} prime factors", f.factors.len()),
            })
        }
        Cmd::Zgraph { h } => {
            let h = read_graph(h)?;
            match dichotomy::find_thick_z(&h)? {
                Some(z) => Ok(Outcome {
                    json: json!({
                        "found": true,
                        "a": z.a, "b": z.b, "c": z.c, "d": z.d,
                    })
                    .to_string(),
                    note: format!(
                        "thick Z with part sizes {}/{}/{}/{}",
                        z.a.len(),
                        z.b.len(),
                        z.c.len(),
                        z.d.len()
                    ),
                }),
                None => Ok(Outcome {
                    json: json!({ "found": false }).to_string(),
                    note: "complete bipartite: no thick Z exists".into(),
                }),
            }
        }
        Cmd::Gadgets { h, p, max_n } => {
            let (h, p) = (read_graph(h)?, prime(*p)?);
            let dec = derive_decomposition(&h, p, *max_n)?;
            Ok(Outcome {
                json: decomposition_json(&dec),
                note: format!(
                    "gadgets with {} and {} vertices",
                    dec.gadget_l.graph.n(),
                    dec.gadget_r.graph.n()
                ),
            })
        }
        Cmd::Bis { g, alpha, beta, p } => {
            let (g, p) = (read_graph(g)?, prime(*p)?);
            let r = dichotomy::zbis_value(
                &g,
                modhom::Residue::new(*alpha, p),
                modhom::Residue::new(*beta, p),
            )?;
            Ok(Outcome {
                json: json!({ "residue": r.value() }).to_string(),
                note: format!("weighted independent-set sum {} mod {}", r.value(), p.get()),
            })
        }
        Cmd::ReduceBis { g, h, p, max_n } => {
            let (g, h, p) = (read_graph(g)?, read_graph(h)?, prime(*p)?);
            let dec = derive_decomposition(&h, p, *max_n)?;
            let built = dichotomy::build_bis_reduction(&g, &h, &dec)?;
            Ok(Outcome {
                note: format!("replacement instance has {}", shape(&built)),
                json: json::graph_to_string(&built),
            })
        }
        Cmd::VerifyBis { g, h, p, max_n } => {
            let (g, h, p) = (read_graph(g)?, read_graph(h)?, prime(*p)?);
            let dec = derive_decomposition(&h, p, *max_n)?;
            let report = dichotomy::verify_reduction(&g, &h, &dec, p)?;
            let note = format!(
                "lhs {} rhs {} mod {}: {}",
                report.lhs.value(),
                report.rhs.value(),
                p.get(),
                if report.equal() { "equal" } else { "NOT EQUAL" }
            );
            if report.equal() {
                Ok(Outcome { json: report.to_json(), note })
            } else {
                eprintln!("{}", report.to_json());
                Err(Failure { code: 4, message: note })
            }
        }
        Cmd::MppEval { gadget, h, p } => {
            let (gadget, h, p) = (read_pinned(gadget)?, read_graph(h)?, prime(*p)?);
            let rel = reduction::mpp_eval(&gadget, &h, p)?;
            Ok(Outcome {
                json: json!({
                    "arity": rel.arity,
                    "tuples": rel.tuples,
                    "strict": rel.strict,
                })
                .to_string(),
                note: format!(
                    "{} tuples of arity {}, {}",
                    rel.tuples.len(),
                    rel.arity,
                    if rel.strict { "strict" } else { "not strict" }
                ),
            })
        }
        Cmd::Strictify { gadget, p } => {
            let (gadget, p) = (read_pinned(gadget)?, prime(*p)?);
            let out = reduction::strictify(&gadget, p)?;
            Ok(Outcome {
                note: format!("strictified gadget has {}", shape(&out.graph)),
                json: json::pinned_to_string(&out),
            })
        }
        Cmd::ConstantsReduce { instance, h, p, max_bell, transcript } => {
            let (instance, h, p) = (read_csp(instance)?, read_graph(h)?, prime(*p)?);
            let mut lines: Vec<String> = Vec::new();
            let mut oracle = |c: &TableCsp| {
                let r = csp::count_csp_mod(c, p).expect("internally built instances are valid");
                let doc: serde_json::Value = serde_json::from_str(&c.to_string_json())
                    .expect("emitted instance JSON parses");
                lines.push(json!({ "instance": doc, "residue": r.value() }).to_string());
                r
            };
            let r = reduction::constants_reduce(&instance, &h, p, &mut oracle, *max_bell)?;
            let calls = lines.len();
            if let Some(path) = transcript {
                let body =
                    if lines.is_empty() { String::new() } else { lines.join("\n") + "\n" };
                fs::write(path, body).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            }
            Ok(Outcome {
                json: json!({ "residue": r.value() }).to_string(),
                note: format!("{} mod {} after {calls} oracle calls", r.value(), p.get()),
            })
        }
    }
}

fn decomposition_json(dec: &ZDecomposition) -> String {
    json!({
        "found": true,
        "parts": {
            "a": dec.parts.a, "b": dec.parts.b, "c": dec.parts.c, "d": dec.parts.d,
        },
        "gadget_l": GraphDoc::from_pinned(&dec.gadget_l),
        "gadget_r": GraphDoc::from_pinned(&dec.gadget_r),
        "alpha1": dec.alpha1.value(),
        "alpha2": dec.alpha2.value(),
        "beta1": dec.beta1.value(),
        "beta2": dec.beta2.value(),
    })
    .to_string()
}
