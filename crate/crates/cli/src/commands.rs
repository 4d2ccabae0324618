use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use contwalk_core::experiments::{
    emit_report, length_grid, oracle_check, parse_config, run_sweep, ExperimentError,
    LengthSetting, Metric, SweepSpec,
};
use contwalk_core::graph::{build_routing, read_edge_list, write_edge_list};
use contwalk_core::rng::{stream, Purpose};
use contwalk_core::walk::continuous::{degree_proportional_sources, write_request_log};
use contwalk_core::{
    generate as generate_graph, naive_walk, Capacity, ContinuousConfig, ContinuousWalker,
    CostRecord, GeneratorSpec, Graph, GraphError, Network, WalkError,
};
use thiserror::Error;

use crate::{ContinuousArgs, DistCheckArgs, GenerateArgs, GraphArgs, SweepArgs, WalkArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("i/o: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::CheckFailed(_) => 2,
            CliError::Io { .. } | CliError::Output(_) => 3,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(_) => CliError::Output(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io(_) | ExperimentError::Csv(_) => CliError::Output(e.to_string()),
            ExperimentError::Graph(g) => g.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// `# `-prefixed header shared by stdout and every written file.
struct Provenance(Vec<String>);

impl Provenance {
    fn new(command: &str, seed: u64) -> Self {
        Self(vec![
            format!("contwalk {} build {}", env!("CARGO_PKG_VERSION"), env!("CONTWALK_BUILD_ID")),
            format!("command={command} seed={seed}"),
        ])
    }

    fn push(&mut self, line: impl Into<String>) {
        self.0.push(line.into());
    }

    fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for line in &self.0 {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }

    fn print(&self) {
        let _ = self.write_to(std::io::stdout().lock());
    }
}

fn load_graph(args: &GraphArgs, seed: u64, prov: &mut Provenance) -> Result<Graph, CliError> {
    if let Some(path) = &args.graph {
        let file = File::open(path).map_err(io_error(path))?;
        let g = read_edge_list(BufReader::new(file))?;
        prov.push(format!("graph={} n={} m={}", path.display(), g.node_count(), g.edge_count()));
        return Ok(g);
    }
    let spec = GeneratorSpec {
        family: args.family,
        n: args.n,
        p: args.p,
        alpha: args.alpha,
        r: args.r,
        seed,
    };
    let generated = generate_graph(&spec)?;
    let g = generated.graph;
    let mut line = format!(
        "family={} n={} effective_n={} m={}",
        args.family,
        args.n,
        g.node_count(),
        g.edge_count()
    );
    for (key, value) in [("p", args.p), ("r", args.r)] {
        if let Some(v) = value {
            line += &format!(" {key}={v}");
        }
    }
    if generated.meta.kept_largest_component {
        line += &format!(" dropped_nodes={}", generated.meta.dropped_nodes);
    }
    prov.push(line);
    Ok(g)
}

fn check_source(g: &Graph, source: u32) -> Result<(), CliError> {
    if source as usize >= g.node_count() {
        return Err(CliError::Usage(format!(
            "source {source} is not a node of a {}-node graph",
            g.node_count()
        )));
    }
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_error(dir))
}

fn print_cost(label: &str, cost: CostRecord) {
    println!("{label}rounds={} {label}messages={}", cost.total_rounds(), cost.total_messages());
}

pub fn generate(args: &GenerateArgs, out_dir: &Path) -> Result<(), CliError> {
    if args.graph.graph.is_some() {
        return Err(CliError::Usage("generate does not take --graph".into()));
    }
    let mut prov = Provenance::new("generate", args.seed);
    let g = load_graph(&args.graph, args.seed, &mut prov)?;
    let path = match &args.output {
        Some(p) => p.clone(),
        None => {
            create_dir(out_dir)?;
            out_dir.join(format!("{}-n{}-s{}.edges", args.graph.family, args.graph.n, args.seed))
        }
    };
    let mut out = BufWriter::new(File::create(&path).map_err(io_error(&path))?);
    prov.write_to(&mut out).map_err(io_error(&path))?;
    write_edge_list(&g, out)?;
    prov.print();
    println!("wrote {} nodes={} edges={}", path.display(), g.node_count(), g.edge_count());
    Ok(())
}

pub fn walk(args: &WalkArgs) -> Result<(), CliError> {
    let mut prov = Provenance::new("walk", args.seed);
    let g = load_graph(&args.graph, args.seed, &mut prov)?;
    check_source(&g, args.source)?;
    let mut rng = stream(args.seed, Purpose::Walk, &[]);
    if args.naive {
        prov.push(format!("mode=naive l={} source={}", args.l, args.source));
        prov.print();
        let mut net = Network::new(&g, args.algo.capacity).map_err(WalkError::from)?;
        let r = naive_walk(&mut net, args.source, args.l, &mut rng)?;
        println!("destination={}", r.destination.expect("naive walks always finish"));
        print_cost("", r.cost);
        return Ok(());
    }
    let oracle = build_routing(&g, args.algo.routing);
    let config = ContinuousConfig {
        eta: args.algo.eta,
        lambda: args.algo.lambda,
        capacity: args.algo.capacity,
        ..ContinuousConfig::new(args.l)
    };
    let mut walker = ContinuousWalker::new(&g, &oracle, config, rng)?;
    prov.push(format!(
        "mode=stitched l={} source={} eta={} lambda={} routing={} capacity={} diameter={}",
        args.l,
        args.source,
        args.algo.eta,
        walker.lambda(),
        args.algo.routing,
        args.algo.capacity,
        oracle.diameter()
    ));
    prov.print();
    let r = walker.serve(args.source)?;
    let preprocess =
        walker.epochs().iter().fold(CostRecord::default(), |acc, e| acc + e.preprocess_cost);
    let failed: CostRecord =
        walker.epochs().iter().fold(CostRecord::default(), |acc, e| acc + e.request_cost) - r.cost;
    println!("destination={}", r.destination.expect("served walks finish"));
    println!("stitches={} tail_steps={}", r.stitches(), r.tail_steps);
    print_cost("", r.cost);
    print_cost("preprocessing_", preprocess);
    if walker.epochs().len() > 1 {
        println!("tables_built={}", walker.epochs().len());
        print_cost("failed_attempts_", failed);
    }
    Ok(())
}

pub fn continuous(args: &ContinuousArgs, out_dir: &Path) -> Result<(), CliError> {
    let mut prov = Provenance::new("continuous", args.seed);
    let g = load_graph(&args.graph, args.seed, &mut prov)?;
    let oracle = build_routing(&g, args.algo.routing);
    let config = ContinuousConfig {
        eta: args.algo.eta,
        lambda: args.algo.lambda,
        capacity: args.algo.capacity,
        notify_source: args.notify_source,
        ..ContinuousConfig::new(args.l)
    };
    let mut walker =
        ContinuousWalker::new(&g, &oracle, config, stream(args.seed, Purpose::Walk, &[]))?;
    prov.push(format!(
        "l={} requests={} eta={} lambda={} routing={} capacity={} notify_source={} diameter={}",
        args.l,
        args.requests,
        args.algo.eta,
        walker.lambda(),
        args.algo.routing,
        args.algo.capacity,
        args.notify_source,
        oracle.diameter()
    ));
    prov.print();
    let sources = degree_proportional_sources(&g, stream(args.seed, Purpose::Sources, &[]));
    for s in sources.take(args.requests) {
        walker.serve(s)?;
    }

    create_dir(out_dir)?;
    let requests_path = out_dir.join("continuous-requests.csv");
    let mut out = BufWriter::new(File::create(&requests_path).map_err(io_error(&requests_path))?);
    prov.write_to(&mut out).map_err(io_error(&requests_path))?;
    write_request_log(walker.request_log(), out).map_err(|e| CliError::Output(e.to_string()))?;

    let epochs_path = out_dir.join("continuous-epochs.csv");
    let mut out = BufWriter::new(File::create(&epochs_path).map_err(io_error(&epochs_path))?);
    prov.write_to(&mut out).map_err(io_error(&epochs_path))?;
    writeln!(
        out,
        "epoch,lambda,total_entries,used_entries,kappa,walks_served,failed_requests,\
         preprocess_rounds,preprocess_messages,request_rounds,request_messages,amortized_messages,closed"
    )
    .map_err(io_error(&epochs_path))?;
    for e in walker.epochs() {
        writeln!(
            out,
            "{},{},{},{},{:.6},{},{},{},{},{},{},{:.3},{}",
            e.epoch,
            e.lambda,
            e.total_entries,
            e.used_entries,
            e.kappa,
            e.walks_served,
            e.failed_requests,
            e.preprocess_cost.total_rounds(),
            e.preprocess_cost.total_messages(),
            e.request_cost.total_rounds(),
            e.request_cost.total_messages(),
            e.amortized_messages(),
            e.closed
        )
        .map_err(io_error(&epochs_path))?;
    }
    out.flush().map_err(io_error(&epochs_path))?;

    let epochs = walker.epochs();
    let closed: Vec<_> = epochs.iter().filter(|e| e.closed).collect();
    let total = epochs.iter().fold(CostRecord::default(), |acc, e| acc + e.total_cost());
    println!("walks={} tables_built={}", args.requests, epochs.len());
    if !closed.is_empty() {
        let kappa = closed.iter().map(|e| e.kappa).sum::<f64>() / closed.len() as f64;
        println!("mean_kappa={kappa:.4} over {} closed table(s)", closed.len());
    }
    println!(
        "amortized_rounds={:.2} amortized_messages={:.2}",
        total.total_rounds() as f64 / args.requests.max(1) as f64,
        total.total_messages() as f64 / args.requests.max(1) as f64
    );
    println!("wrote {} and {}", requests_path.display(), epochs_path.display());
    Ok(())
}

fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_error(path))?;
            parse_config(&text)?
        }
        None => {
            let param = args
                .param
                .ok_or_else(|| CliError::Usage("--param is required without --config".into()))?;
            SweepSpec::new(param, Vec::new())
        }
    };
    if let Some(p) = args.param {
        spec.param = p;
    }
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(l) = &args.l {
        spec.length = if l == "n" {
            LengthSetting::EqualsN
        } else {
            LengthSetting::Fixed(
                l.parse().map_err(|_| CliError::Usage(format!("--l: not an integer: {l:?}")))?,
            )
        };
    }
    if let Some(eta) = args.eta {
        spec.eta = eta;
    }
    if let Some(lambda) = args.lambda {
        spec.lambda = lambda;
    }
    if let Some(families) = &args.families {
        spec.families = families.clone();
    }
    if let Some(r) = args.replicas {
        spec.replicas = r;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(c) = args.capacity {
        spec.capacity = c;
    }
    if let Some(r) = args.routing {
        spec.routing = r;
    }
    if let Some(values) = &args.values {
        spec.values = values.clone();
    }
    if let Some(exponents) = &args.exponents {
        if spec.param != contwalk_core::experiments::SweptParam::Length {
            return Err(CliError::Usage("--exponents only applies to an l sweep".into()));
        }
        spec.values = length_grid(spec.n, exponents);
    }
    spec.validate()?;
    Ok(spec)
}

pub fn sweep(args: &SweepArgs, out_dir: &Path, name: &str, metric: Metric) -> Result<(), CliError> {
    let spec = sweep_spec(args)?;
    let mut prov = Provenance::new(name, spec.seed);
    let length = match spec.length {
        LengthSetting::EqualsN => "n".to_string(),
        LengthSetting::Fixed(l) => l.to_string(),
    };
    let families: Vec<String> = spec.families.iter().map(|f| f.to_string()).collect();
    let values: Vec<String> = spec.values.iter().map(|v| v.to_string()).collect();
    prov.push(format!(
        "param={} values={} n={} l={} eta={} lambda={} replicas={} capacity={} routing={}",
        spec.param,
        values.join(","),
        spec.n,
        length,
        spec.eta,
        spec.lambda,
        spec.replicas,
        spec.capacity,
        spec.routing
    ));
    prov.push(format!("families={}", families.join(",")));
    prov.print();

    let records = run_sweep(&spec)?;
    for r in &records {
        let value = match metric {
            Metric::Kappa => format!("kappa={:.4} (sd {:.4})", r.kappa_mean, r.kappa_std),
            Metric::AmortizedMessages => {
                format!("messages={:.1} (sd {:.1})", r.messages_mean, r.messages_std)
            }
            Metric::AmortizedRounds => {
                format!("rounds={:.1} (sd {:.1})", r.rounds_mean, r.rounds_std)
            }
        };
        println!("{} {}={} {value}", r.family, spec.param, r.value);
        for e in r.errors() {
            eprintln!("warning: {} {}={}: {e}", r.family, spec.param, r.value);
        }
    }
    let stem = format!("{name}-{}", spec.param);
    let plot = (!args.no_plot).then_some(metric);
    let written = emit_report(&records, out_dir, &stem, plot, &prov.0)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn dist_check(args: &DistCheckArgs) -> Result<(), CliError> {
    let mut prov = Provenance::new("dist-check", args.seed);
    let g = load_graph(&args.graph, args.seed, &mut prov)?;
    check_source(&g, args.source)?;
    prov.push(format!(
        "l={} source={} samples={} eta={} lambda={} tolerance={}",
        args.l, args.source, args.samples, args.eta, args.lambda, args.tolerance
    ));
    prov.print();
    let check = oracle_check(
        &g,
        args.source,
        args.l,
        args.samples,
        args.eta,
        args.lambda,
        Capacity::default(),
        args.seed,
    )?;
    println!("tv={:.6} samples={} tolerance={}", check.tv, check.samples, args.tolerance);
    if check.tv > args.tolerance {
        return Err(CliError::CheckFailed(format!(
            "tv {:.6} exceeds tolerance {}",
            check.tv, args.tolerance
        )));
    }
    println!("pass");
    Ok(())
}
