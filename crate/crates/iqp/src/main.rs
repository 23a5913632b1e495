//! `iqp`: generate Postnikov-diagram quivers with potential and run the
//! verification suites. Exit status 0 iff every check of the command passes.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iqp::formats::{self, ExchangeGraphRow};
use iqp::{export, suites};
use iqp_core::postnikov::{initial_diagram, Variant};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "iqp", version, about = "Iced quivers with potentials of Postnikov diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Subcommand, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Write the initial diagram of Gr(k, n) and its IQP.
    Init,
    /// Compare geometric exchange with IQP mutation on random sequences.
    VerifyCompat,
    /// Graded dimensions of the Jacobian algebra over caps 6..=cap.
    Jacobian,
    /// Rigidity certificate at the given cap.
    Rigidity,
    /// Breadth-first exchange-graph enumeration.
    ExchangeGraph,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Type1,
    Type2,
    Type3,
    Bkm,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Type1 => Variant::TypeI,
            VariantArg::Type2 => Variant::TypeII,
            VariantArg::Type3 => Variant::TypeIII,
            VariantArg::Bkm => Variant::Bkm,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize)]
struct RunConfig {
    #[arg(long, global = true, default_value_t = 3)]
    k: u32,
    #[arg(long, global = true, default_value_t = 6)]
    n: u32,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Type3)]
    variant: VariantArg,
    /// Truncation cap N (at least 4).
    #[arg(long, global = true, default_value_t = 12)]
    cap: u32,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Upper bound on random exchange-sequence lengths.
    #[arg(long, global = true, default_value_t = 6)]
    len: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    max_seeds: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the machine-readable report instead of the table.
    #[arg(long, global = true)]
    json: bool,
    /// Output directory (init) or report file (`.csv` for exchange-graph rows).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// A finished command: pass flag, the property it checks, result fields and
/// table lines.
struct Report {
    pass: bool,
    property: &'static str,
    result: Value,
    lines: Vec<String>,
}

type CmdResult = Result<Report, Box<dyn std::error::Error>>;

fn init(c: &RunConfig) -> CmdResult {
    let fd = initial_diagram(c.k, c.n)?;
    let p = fd.iqp(c.variant.into(), c.cap.max(suites::DIAGRAM_CAP))?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let variant = format!("{:?}", c.variant).to_lowercase();
    let files = [
        (dir.join(format!("gr{}_{}.facediagram.json", c.k, c.n)), serde_json::to_string_pretty(&formats::facediagram_to_json(&fd))?),
        (dir.join(format!("gr{}_{}_{variant}.iqp.json", c.k, c.n)), serde_json::to_string_pretty(&formats::iqp_to_json(&p))?),
        (dir.join(format!("gr{}_{}.dot", c.k, c.n)), export::diagram_dot(&fd)),
        (dir.join(format!("gr{}_{}.tex", c.k, c.n)), export::diagram_tikz(&fd)),
    ];
    let mut written = Vec::new();
    for (path, body) in &files {
        fs::write(path, body)?;
        written.push(path.display().to_string());
    }
    let q = p.quiver();
    let valid = fd.validate().is_valid();
    Ok(Report {
        pass: valid,
        property: "initial diagram is a valid Postnikov diagram",
        result: json!({
            "files": written,
            "vertices": q.n_vertices(),
            "arrows": q.arrows().len(),
            "potential_terms": p.potential().len(),
            "valid": valid,
        }),
        lines: vec![
            format!("vertices        {} ({} frozen)", q.n_vertices(), q.n_frozen()),
            format!("arrows          {}", q.arrows().len()),
            format!("potential terms {}", p.potential().len()),
            format!("valid           {valid}"),
            format!("wrote           {}", written.join(", ")),
        ],
    })
}

fn verify_compat(c: &RunConfig) -> CmdResult {
    let r = suites::verify_compat(c.k, c.n, c.trials, c.len, c.seed, false)?;
    let mut lines = vec![
        format!("trials      {}", r.trials),
        format!("steps       {}", r.steps),
        format!("mismatches  {}", r.witnesses.len()),
    ];
    lines.extend(r.witnesses.iter().map(|w| format!("witness     trial {} sequence {:?} step {}: {}", w.trial, w.sequence, w.step, w.reason)));
    Ok(Report {
        pass: r.pass(),
        property: "geometric exchange is compatible with IQP mutation",
        result: serde_json::to_value(&r)?,
        lines,
    })
}

fn check_cap(c: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    if c.cap < 4 {
        return Err(format!("cap must be at least 4, got {}", c.cap).into());
    }
    Ok(())
}

fn jacobian(c: &RunConfig) -> CmdResult {
    check_cap(c)?;
    let caps: Vec<u32> = (6.min(c.cap)..=c.cap).collect();
    let r = suites::jacobian(c.k, c.n, c.variant.into(), &caps)?;
    let mut lines = vec![format!("surviving per degree {:?}", r.surviving)];
    lines.extend(r.dimensions.iter().map(|(n, d, s)| format!("cap {n:>3}  dim {d:>6}  certified {s}")));
    lines.push(match r.dimension() {
        Some(d) => format!("verdict Stabilized({d}), killed degree {}", r.killed_degree.unwrap_or_default()),
        None => format!("verdict GrowingThrough({})", r.cap),
    });
    Ok(Report {
        pass: r.dimension().is_some(),
        property: "Jacobian algebra is finite dimensional",
        result: serde_json::to_value(&r)?,
        lines,
    })
}

fn rigidity(c: &RunConfig) -> CmdResult {
    check_cap(c)?;
    let r = suites::rigidity(c.k, c.n, c.variant.into(), c.cap)?;
    let witnesses: Vec<Value> = r
        .report
        .witnesses
        .iter()
        .zip(&r.fundamental_witnesses)
        .map(|(w, f)| json!({"cycle": w.arrows(), "fundamental": f}))
        .collect();
    let mut lines = vec![
        format!("rigid up to cap {}  {}", r.report.cap, r.report.rigid_up_to_cap),
        format!("stabilized          {}", r.report.stabilized),
        format!("witnesses           {}", r.report.witnesses.len()),
    ];
    let shown = r.fundamental_witnesses.iter().position(|&f| f).or((!r.report.witnesses.is_empty()).then_some(0));
    if let Some(i) = shown {
        lines.push(format!("witness             {} (fundamental cycle: {})", r.report.witnesses[i], r.fundamental_witnesses[i]));
    }
    Ok(Report {
        pass: r.report.is_certified_rigid(),
        property: "IQP is rigid",
        result: json!({
            "cap": r.report.cap,
            "rigid_up_to_cap": r.report.rigid_up_to_cap,
            "stabilized": r.report.stabilized,
            "witnesses": witnesses,
        }),
        lines,
    })
}

fn exchange_graph(c: &RunConfig) -> CmdResult {
    let r = suites::exchange_graph(c.k, c.n, c.max_seeds)?;
    let row = ExchangeGraphRow {
        k: c.k,
        n: c.n,
        max_seeds: c.max_seeds,
        seed_count: r.seed_count,
        cluster_variables: r.cluster_variables,
        max_depth: r.max_depth,
        quiver_classes: r.quiver_classes,
    };
    Ok(Report {
        pass: r.seed_count.is_some(),
        property: "exchange graph is finite within the bound",
        result: serde_json::to_value(&row)?,
        lines: vec![
            format!("seeds              {}", r.seed_count.map_or(format!("> {}", c.max_seeds), |s| s.to_string())),
            format!("cluster variables  {}", r.cluster_variables),
            format!("max depth          {}", r.max_depth),
            format!("quiver classes     {}", r.quiver_classes),
        ],
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.config;
    let outcome = match cli.command {
        Command::Init => init(c),
        Command::VerifyCompat => verify_compat(c),
        Command::Jacobian => jacobian(c),
        Command::Rigidity => rigidity(c),
        Command::ExchangeGraph => exchange_graph(c),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = json!({
        "tool": "iqp",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command,
        "property": report.property,
        "config": c,
        "pass": report.pass,
        "result": report.result,
    });
    if let (Some(path), false) = (&c.out, matches!(cli.command, Command::Init)) {
        let body = if path.extension().is_some_and(|e| e == "csv") {
            serde_json::from_value::<ExchangeGraphRow>(doc["result"].clone())
                .ok()
                .and_then(|row| formats::exchange_graph_csv(&[row]).ok())
                .unwrap_or_default()
        } else {
            serde_json::to_string_pretty(&doc).expect("report serializes")
        };
        if let Err(e) = fs::write(path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if c.json {
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        println!("iqp {}  {:?}  Gr({},{})  seed {}", env!("CARGO_PKG_VERSION"), cli.command, c.k, c.n, c.seed);
        println!("property: {}", report.property);
        for l in &report.lines {
            println!("  {l}");
        }
        println!("{}", if report.pass { "PASS" } else { "FAIL" });
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
