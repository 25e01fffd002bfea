use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sqci::cactus::{analyze_cactus, CactusType};
use sqci::classifier::{classify_qi, out_finite, GroupDescriptor, Relation};
use sqci::development::{
    ball_raag_capped, check_local_pattern, development_gog_capped, DevelopmentBall, DEFAULT_ELEMENT_CAP,
};
use sqci::graph::{graph_isomorphic, is_triangle_free, parse_graph, serialize_graph, SimplicialGraph};
use sqci::join::{
    build_ri_d2, build_ri_raag, build_ri_braid, components_and_switch, spine_d2_betti1, validate_cjoin,
    ComponentKind, JoinComplex,
};
use sqci::products::enumeration_cap;
use sqci::semiiso::{semi_isomorphic, Options};
use sqci::square::{betti1, build_d2, hyperplanes, npc_check};
use sqci::words::{normal_form, parse_word, FactorLength};

const EXIT_USAGE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "sqci", version, about = "Intersection complexes of RAAGs and of 2-point graph braid groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering to this file, where one exists.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Enumeration cap: vertex count for product search, element count for balls.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Recorded in sweep output; every command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    All,
    Raag,
    Pb2,
}

#[derive(Args)]
#[command(group(ArgGroup::new("family").args(["raag", "braid", "pb2"])))]
struct FamilyFlag {
    /// Salvetti complex of the RAAG (default).
    #[arg(long)]
    raag: bool,
    /// D2 of a special cactus.
    #[arg(long)]
    braid: bool,
    /// D2 of any graph, by exhaustive product search if needed.
    #[arg(long)]
    pb2: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a graph file and print it back with basic invariants.
    Parse { file: PathBuf },
    /// Build D2 of the graph.
    D2 { file: PathBuf },
    /// Check the link condition on D2 (exit 3 on failure).
    Npc { file: PathBuf },
    /// Hyperplanes of D2.
    Hyperplanes { file: PathBuf },
    /// Reduced intersection complex.
    Ri {
        #[command(flatten)]
        family: FamilyFlag,
        file: PathBuf,
    },
    /// Components of the braid intersection complex and their M/S types.
    Components { file: PathBuf },
    /// Quasi-isometry verdict for two groups (exit 3 on NOT_QI).
    Classify {
        /// RAAG on the graph in FILE.
        #[arg(long, value_name = "FILE")]
        raag: Vec<PathBuf>,
        /// PB2 of the graph in FILE.
        #[arg(long, value_name = "FILE")]
        pb2: Vec<PathBuf>,
    },
    /// Search for a semi-isomorphism between two complexes (exit 3 if none).
    Semiiso {
        #[arg(long, value_name = "FILE")]
        raag: Vec<PathBuf>,
        #[arg(long, value_name = "FILE")]
        pb2: Vec<PathBuf>,
        /// Also preserve rank pairs.
        #[arg(long)]
        strict_ranks: bool,
    },
    /// Ball in the development of the RAAG complex.
    Ball {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 3)]
        word_bound: usize,
    },
    /// Ball in the development of the braid complex of a special cactus.
    Develop {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        word_bound: usize,
    },
    /// Join length (or star length) of a word in the RAAG.
    Joinlen {
        file: PathBuf,
        /// Letters separated by spaces, inverses written `a^-1`.
        word: String,
        #[arg(long)]
        star: bool,
    },
    /// Check the defining properties of the intersection complex (exit 2 on failure).
    Validate {
        #[command(flatten)]
        family: FamilyFlag,
        file: PathBuf,
    },
    /// Run the pipeline over every graph in a directory.
    Sweep {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
    },
}

#[derive(Debug)]
struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }
    fn error(msg: impl Into<String>) -> Self {
        Self { code: EXIT_ERROR, msg: msg.into() }
    }
}

impl From<sqci::error::Error> for Fail {
    fn from(e: sqci::error::Error) -> Self {
        Fail::error(e.to_string())
    }
}

struct Output {
    text: String,
    json: Value,
    dot: Option<String>,
    code: u8,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Self { text, json, dot: None, code: 0 }
    }
    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }
    fn code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

fn main() -> ExitCode {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let order = group_order(&matches);
    match run(&cli, &order).and_then(|o| emit(&cli, o)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

/// `--raag`/`--pb2` arguments in command-line order.
fn group_order(m: &clap::ArgMatches) -> Vec<(bool, PathBuf)> {
    let Some((_, sub)) = m.subcommand() else { return Vec::new() };
    let mut out = Vec::new();
    for (id, is_raag) in [("raag", true), ("pb2", false)] {
        // Unknown ids (other subcommands) come back as errors.
        if let Ok(Some(vals)) = sub.try_get_many::<PathBuf>(id) {
            let idx = sub.indices_of(id).into_iter().flatten();
            out.extend(idx.zip(vals).map(|(i, p)| (i, is_raag, p.clone())));
        }
    }
    out.sort_by_key(|t| t.0);
    out.into_iter().map(|(_, r, p)| (r, p)).collect()
}

fn emit(cli: &Cli, o: Output) -> Result<u8, Fail> {
    if let Some(path) = &cli.out {
        write_file(path, &pretty(&o.json))?;
    }
    if let Some(path) = &cli.dot {
        let dot = o.dot.as_ref().ok_or_else(|| Fail::usage("no dot rendering for this command"))?;
        write_file(path, dot)?;
    }
    match cli.format {
        Format::Text => print!("{}", o.text),
        Format::Json => println!("{}", pretty(&o.json)),
        Format::Dot => print!("{}", o.dot.as_ref().ok_or_else(|| Fail::usage("no dot rendering for this command"))?),
    }
    Ok(o.code)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn write_file(path: &Path, s: &str) -> Result<(), Fail> {
    fs::write(path, s).map_err(|e| Fail::error(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SimplicialGraph, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::error(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Fail::error(format!("{}: {e}", path.display())))
}

fn product_cap(cli: &Cli) -> usize {
    cli.cap.unwrap_or_else(enumeration_cap)
}

fn run(cli: &Cli, order: &[(bool, PathBuf)]) -> Result<Output, Fail> {
    match &cli.cmd {
        Cmd::Parse { file } => cmd_parse(&load(file)?),
        Cmd::D2 { file } => cmd_d2(&load(file)?),
        Cmd::Npc { file } => cmd_npc(&load(file)?),
        Cmd::Hyperplanes { file } => cmd_hyperplanes(&load(file)?),
        Cmd::Ri { family, file } => {
            let jc = build_ri(cli, family, &load(file)?)?;
            Ok(ri_output(&jc))
        }
        Cmd::Components { file } => cmd_components(&load(file)?),
        Cmd::Classify { .. } => cmd_classify(cli, order),
        Cmd::Semiiso { strict_ranks, .. } => cmd_semiiso(cli, order, *strict_ranks),
        Cmd::Ball { file, radius, word_bound } => {
            let g = load(file)?;
            let b = ball_raag_capped(&g, *radius, *word_bound, cli.cap.unwrap_or(DEFAULT_ELEMENT_CAP))?;
            Ok(ball_output(&b))
        }
        Cmd::Develop { file, radius, word_bound } => {
            let g = load(file)?;
            let a = analyze_cactus(&g)?;
            if !a.is_special {
                return Err(Fail::error("develop needs a special cactus"));
            }
            let jc = build_ri_braid(&a)?;
            let b = development_gog_capped(&jc, *radius, *word_bound, cli.cap.unwrap_or(DEFAULT_ELEMENT_CAP))?;
            Ok(ball_output(&b))
        }
        Cmd::Joinlen { file, word, star } => cmd_joinlen(&load(file)?, word, *star),
        Cmd::Validate { family, file } => {
            let jc = build_ri(cli, family, &load(file)?)?;
            Ok(validate_output(&jc))
        }
        Cmd::Sweep { dir, mode } => cmd_sweep(cli, dir, *mode),
    }
}

fn cmd_parse(g: &SimplicialGraph) -> Result<Output, Fail> {
    let cactus = analyze_cactus(g).ok().map(|a| {
        json!({
            "is_cactus": a.is_cactus,
            "is_special": a.is_special,
            "type": a.cactus_type,
            "cycles": a.cycles.len(),
        })
    });
    let json = json!({
        "vertices": g.names(),
        "edges": g.edges().map(|(a, b)| [g.name(a), g.name(b)]).collect::<Vec<_>>(),
        "triangle_free": is_triangle_free(g),
        "connected": g.is_connected(),
        "cactus": cactus,
    });
    let mut text = serialize_graph(g);
    let _ = writeln!(
        text,
        "# {} vertices, {} edges, triangle-free {}, connected {}",
        g.n(),
        g.edge_count(),
        is_triangle_free(g),
        g.is_connected()
    );
    Ok(Output::new(text, json))
}

fn cmd_d2(g: &SimplicialGraph) -> Result<Output, Fail> {
    let d2 = build_d2(g)?;
    let c = &d2.complex;
    let b = betti1(c);
    let npc = npc_check(c).passed();
    let mut json = c.to_json();
    json["betti1"] = json!(b);
    json["npc"] = json!(npc);
    let text = format!(
        "vertices {} edges {} squares {}\nbetti1 {} (components {}{})\nnpc {}\n",
        c.vertices.len(),
        c.edges.len(),
        c.squares.len(),
        b.b1,
        b.components,
        if b.restricted { ", largest measured" } else { "" },
        if npc { "pass" } else { "fail" }
    );
    Ok(Output::new(text, json).with_dot(c.to_dot()))
}

fn cmd_npc(g: &SimplicialGraph) -> Result<Output, Fail> {
    let d2 = build_d2(g)?;
    let r = npc_check(&d2.complex);
    let mut text = String::new();
    for v in &r.violations {
        let _ = writeln!(text, "{}: {:?}", d2.complex.vertices[v.vertex], v.kind);
    }
    let _ = writeln!(text, "npc {}", if r.passed() { "pass" } else { "fail" });
    let code = if r.passed() { 0 } else { EXIT_NEGATIVE };
    Ok(Output::new(text, json!({ "passed": r.passed(), "violations": r.violations })).code(code))
}

fn cmd_hyperplanes(g: &SimplicialGraph) -> Result<Output, Fail> {
    let d2 = build_d2(g)?;
    let hs = hyperplanes(&d2.complex);
    let mut text = String::new();
    for (i, h) in hs.iter().enumerate() {
        let mut flags = Vec::new();
        if h.self_intersecting {
            flags.push("self-intersecting");
        }
        if h.self_osculating {
            flags.push("self-osculating");
        }
        if h.one_sided {
            flags.push("one-sided");
        }
        let _ = writeln!(text, "h{i}: {} edges {}", h.edge_class.len(), flags.join(" "));
    }
    let _ = writeln!(text, "{} hyperplanes", hs.len());
    Ok(Output::new(text, json!({ "hyperplanes": hs })))
}

fn build_ri(cli: &Cli, f: &FamilyFlag, g: &SimplicialGraph) -> Result<JoinComplex, Fail> {
    if f.braid {
        let a = analyze_cactus(g)?;
        if !a.is_special {
            return Err(Fail::error("--braid needs a special cactus; use --pb2"));
        }
        Ok(build_ri_braid(&a)?)
    } else if f.pb2 {
        Ok(build_ri_d2(g, product_cap(cli))?)
    } else {
        Ok(build_ri_raag(g)?)
    }
}

fn ri_output(jc: &JoinComplex) -> Output {
    let mut text = String::new();
    for i in 0..jc.n_vertices {
        let _ = writeln!(text, "v{i} {} {}", jc.simplices[i].name, jc.qi_type(i).as_str());
    }
    for i in jc.n_vertices..jc.simplices.len() {
        if jc.is_maximal(i) {
            let s = &jc.simplices[i];
            let _ = writeln!(text, "max {:?} {}", s.verts, s.name);
        }
    }
    let _ = writeln!(
        text,
        "dim {} components {} betti1 {}",
        jc.dim(),
        jc.components().len(),
        jc.betti1()
    );
    let mut json = jc.to_json();
    json["betti1"] = json!(jc.betti1());
    Output::new(text, json).with_dot(jc.to_dot())
}

fn cmd_components(g: &SimplicialGraph) -> Result<Output, Fail> {
    let jc = build_ri_d2(g, enumeration_cap())?;
    let r = components_and_switch(&jc)?;
    let mut text = String::new();
    let mut comps = Vec::new();
    for (c, vs) in r.components.iter().enumerate() {
        let kind = match r.kinds[c] {
            ComponentKind::M => "M".to_string(),
            ComponentKind::S(t) => format!("S(switches to {t})"),
        };
        let names: Vec<&str> = vs.iter().map(|&v| jc.simplices[v].name.as_str()).collect();
        let _ = writeln!(text, "component {c} {kind}: {}", names.join(", "));
        comps.push(json!({ "kind": r.kinds[c], "vertices": names }));
    }
    let _ = writeln!(text, "M {} S {}", r.count(true), r.count(false));
    let json = json!({ "components": comps, "m": r.count(true), "s": r.count(false), "switch": r.switch });
    Ok(Output::new(text, json))
}

fn descriptors(cli: &Cli, order: &[(bool, PathBuf)]) -> Result<Vec<(String, GroupDescriptor)>, Fail> {
    if order.len() != 2 {
        return Err(Fail::usage("give exactly two groups with --raag FILE / --pb2 FILE"));
    }
    order
        .iter()
        .map(|(is_raag, path)| {
            let g = load(path)?;
            let name = format!("{}:{}", if *is_raag { "raag" } else { "pb2" }, path.display());
            let d = if *is_raag { GroupDescriptor::raag(g) } else { GroupDescriptor::pb2(g, product_cap(cli))? };
            Ok((name, d))
        })
        .collect()
}

fn cmd_classify(cli: &Cli, order: &[(bool, PathBuf)]) -> Result<Output, Fail> {
    let ds = descriptors(cli, order)?;
    let v = classify_qi(&ds[0].1, &ds[1].1);
    let code = if v.relation == Relation::NotQi { EXIT_NEGATIVE } else { 0 };
    let text = format!("{} vs {}\n{}\n", ds[0].0, ds[1].0, v.report());
    let mut json = v.to_json();
    json["groups"] = json!([ds[0].0, ds[1].0]);
    Ok(Output::new(text, json).code(code))
}

fn cmd_semiiso(cli: &Cli, order: &[(bool, PathBuf)], strict_ranks: bool) -> Result<Output, Fail> {
    let ds = descriptors(cli, order)?;
    let ri = |i: usize| {
        ds[i].1.ri.as_ref().ok_or_else(|| {
            Fail::error(format!("{}: {}", ds[i].0, ds[i].1.ri_note.clone().unwrap_or_default()))
        })
    };
    let (a, b) = (ri(0)?, ri(1)?);
    match semi_isomorphic(a, b, Options { strict_ranks })? {
        Some(w) => {
            let json = w.to_json(a, b);
            let mut text = String::from("semi-isomorphic\n");
            for (i, &j) in w.vertex_map.iter().enumerate() {
                let _ = writeln!(text, "{} -> {}", a.simplices[i].name, b.simplices[j].name);
            }
            Ok(Output::new(text, json!({ "semi_isomorphic": true, "witness": json })))
        }
        None => Ok(Output::new("not semi-isomorphic\n".into(), json!({ "semi_isomorphic": false }))
            .code(EXIT_NEGATIVE)),
    }
}

fn ball_output(b: &DevelopmentBall) -> Output {
    let r = check_local_pattern(b);
    let mut json = b.to_json();
    json["local_pattern"] = json!(r);
    json["alternating"] = json!(r.alternating());
    let text = format!(
        "vertices {} simplices {} elements {} boundary {}\ncomponents {} betti1 {}\nlocal pattern {} ({} interior vertices checked), alternating {}\n",
        b.vertices.len(),
        b.simplices.len(),
        b.elements,
        b.boundary.len(),
        b.components(),
        b.betti1(),
        if r.ok() { "ok" } else { "violated" },
        r.checked,
        r.alternating()
    );
    Output::new(text, json).with_dot(b.to_dot())
}

fn cmd_joinlen(g: &SimplicialGraph, word: &str, star: bool) -> Result<Output, Fail> {
    let nf = normal_form(g, &parse_word(g, word)?);
    let mut fl = if star { FactorLength::stars(g) } else { FactorLength::joins(g)? };
    let r = fl.length(&nf);
    let mut text = format!("normal form {}\nlength {}\n", nf.display(g), r.length);
    let mut factors = Vec::new();
    for (f, k) in &r.factorization {
        let supp: Vec<&str> = fl.supports[*k].iter().map(|&v| g.name(v)).collect();
        let _ = writeln!(text, "{{{}}}: {}", supp.join(","), f.display(g));
        factors.push(json!({ "support": supp, "factor": f.display(g) }));
    }
    let json = json!({
        "normal_form": nf.display(g),
        "kind": if star { "star" } else { "join" },
        "length": r.length,
        "factorization": factors,
    });
    Ok(Output::new(text, json))
}

fn validate_output(jc: &JoinComplex) -> Output {
    let vs = validate_cjoin(jc);
    let failed = vs.iter().any(|v| !v.warning);
    let mut text = String::new();
    for v in &vs {
        let _ = writeln!(
            text,
            "({}) {}: {}",
            v.property,
            if v.warning { "warning" } else { "violation" },
            v.message
        );
    }
    let _ = writeln!(text, "{}", if failed { "invalid" } else { "valid" });
    Output::new(text, json!({ "valid": !failed, "violations": vs })).code(if failed { EXIT_ERROR } else { 0 })
}

struct SweepItem {
    file: String,
    families: Vec<bool>,
}

fn sweep_items(dir: &Path, mode: Mode) -> Result<Vec<SweepItem>, Fail> {
    let allow = |raag: bool| match mode {
        Mode::All => true,
        Mode::Raag => raag,
        Mode::Pb2 => !raag,
    };
    let manifest = dir.join("manifest.json");
    let mut items = Vec::new();
    if manifest.exists() {
        let text = fs::read_to_string(&manifest).map_err(|e| Fail::error(format!("{}: {e}", manifest.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Fail::error(format!("{}: {e}", manifest.display())))?;
        let list = v["graphs"].as_array().ok_or_else(|| Fail::error("manifest needs a `graphs` array"))?;
        for e in list {
            let file = e["file"].as_str().ok_or_else(|| Fail::error("manifest entry without `file`"))?;
            let fams: Vec<bool> = match e["families"].as_array() {
                Some(a) => a
                    .iter()
                    .map(|f| match f.as_str() {
                        Some("raag") => Ok(true),
                        Some("pb2") => Ok(false),
                        _ => Err(Fail::error(format!("{file}: unknown family {f}"))),
                    })
                    .collect::<Result<_, _>>()?,
                None => vec![true, false],
            };
            items.push(SweepItem { file: file.to_string(), families: fams.into_iter().filter(|&r| allow(r)).collect() });
        }
    } else {
        let rd = fs::read_dir(dir).map_err(|e| Fail::error(format!("{}: {e}", dir.display())))?;
        let mut files: Vec<String> = rd
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(".graph"))
            .collect();
        files.sort();
        for file in files {
            items.push(SweepItem { file, families: [true, false].into_iter().filter(|&r| allow(r)).collect() });
        }
    }
    Ok(items)
}

fn sweep_file(g: &SimplicialGraph) -> Value {
    let d2 = build_d2(g).map(|d2| {
        let b = betti1(&d2.complex);
        json!({
            "vertices": d2.complex.vertices.len(),
            "edges": d2.complex.edges.len(),
            "squares": d2.complex.squares.len(),
            "npc": npc_check(&d2.complex).passed(),
            "betti1": b.b1,
            "components": b.components,
        })
    });
    let cactus = analyze_cactus(g).ok().filter(|a| a.is_cactus).map(|a| {
        let mut v = json!({
            "special": a.is_special,
            "type": a.cactus_type,
            "cycles": a.cycles.len(),
            "redundant": a.redundant.len(),
        });
        v["braid_regular"] = json!(a.is_braid_regular());
        if a.is_braid_regular() {
            if let (Ok(jc), Ok(sp)) = (build_ri_braid(&a), spine_d2_betti1(&a)) {
                let ri = jc.betti1();
                v["ri_betti1"] = json!(ri);
                v["spine_betti1"] = json!(sp);
                v["betti1_agree"] = json!(ri == sp && (a.cactus_type != CactusType::S || ri == 0));
                if let Ok(r) = components_and_switch(&jc) {
                    v["m_components"] = json!(r.count(true));
                    v["s_components"] = json!(r.count(false));
                }
            }
        }
        v
    });
    let out = (is_triangle_free(g) && g.is_connected()).then(|| out_finite(g).finite);
    json!({
        "vertices": g.n(),
        "edges": g.edge_count(),
        "triangle_free": is_triangle_free(g),
        "connected": g.is_connected(),
        "d2": d2.unwrap_or_else(|e| json!({ "error": e.to_string() })),
        "cactus": cactus,
        "out_finite": out,
    })
}

fn cmd_sweep(cli: &Cli, dir: &Path, mode: Mode) -> Result<Output, Fail> {
    let items = sweep_items(dir, mode)?;
    let mut files = BTreeMap::new();
    let mut groups: Vec<(String, GroupDescriptor)> = Vec::new();
    let mut text = String::new();
    let mut errors = 0;
    for it in &items {
        let g = match load(&dir.join(&it.file)) {
            Ok(g) => g,
            Err(f) => {
                errors += 1;
                let _ = writeln!(text, "{}: error: {}", it.file, f.msg);
                files.insert(it.file.clone(), json!({ "error": f.msg }));
                continue;
            }
        };
        let v = sweep_file(&g);
        let _ = writeln!(
            text,
            "{}: n={} m={} d2_betti1={} cactus={}",
            it.file,
            g.n(),
            g.edge_count(),
            v["d2"]["betti1"],
            match &v["cactus"] {
                Value::Null => "no".to_string(),
                c => format!(
                    "{} special={} agree={} M={} S={}",
                    c["type"].as_str().unwrap_or("?"),
                    c["special"],
                    c.get("betti1_agree").unwrap_or(&Value::Null),
                    c.get("m_components").unwrap_or(&Value::Null),
                    c.get("s_components").unwrap_or(&Value::Null)
                ),
            }
        );
        files.insert(it.file.clone(), v);
        for &raag in &it.families {
            if raag {
                groups.push((format!("raag:{}", it.file), GroupDescriptor::raag(g.clone())));
            } else if g.is_connected() {
                if let Ok(d) = GroupDescriptor::pb2(g.clone(), product_cap(cli)) {
                    groups.push((format!("pb2:{}", it.file), d));
                }
            }
        }
    }
    let mut pairs = Vec::new();
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let (na, a) = &groups[i];
            let (nb, b) = &groups[j];
            let iso = a.family == b.family && graph_isomorphic(&a.graph, &b.graph).is_some();
            let semi = match (&a.ri, &b.ri) {
                (Some(x), Some(y)) => semi_isomorphic(x, y, Options::default()).ok().map(|w| w.is_some()),
                _ => None,
            };
            let v = classify_qi(a, b);
            *tally.entry(v.relation.as_str()).or_default() += 1;
            let _ = writeln!(
                text,
                "{na} {nb} iso={iso} semiiso={} {} {}",
                semi.map_or("n/a".to_string(), |s| s.to_string()),
                v.relation.as_str(),
                v.rule
            );
            pairs.push(json!({
                "a": na,
                "b": nb,
                "isomorphic": iso,
                "semi_isomorphic": semi,
                "relation": v.relation,
                "rule": v.rule,
            }));
        }
    }
    let _ = writeln!(
        text,
        "{} files, {} groups, {} pairs, {} errors",
        items.len(),
        groups.len(),
        pairs.len(),
        errors
    );
    let json = json!({
        "seed": cli.seed,
        "files": files,
        "pairs": pairs,
        "summary": { "files": items.len(), "groups": groups.len(), "pairs": pairs.len(), "errors": errors, "relations": tally },
    });
    Ok(Output::new(text, json))
}
