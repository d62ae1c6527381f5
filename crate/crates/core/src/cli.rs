//! Batch front-end. Every subcommand reads its inputs, runs one library
//! routine and writes one output file (plus a JSON sidecar where noted)
//! through a temporary file and rename.
//!
//! A `--config FILE` of `key = value` lines supplies defaults; flags given on
//! the command line take precedence. The effective configuration is echoed
//! into every output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::bmo::{ball_family, bmo_norm, dyadic_cubes, dyadic_radii, strichartz, Difference};
use crate::carleson::{carleson_constant, comparability_experiment, ExperimentConfig};
use crate::coeffs::{coefficient_matrix, CoefficientKind, Order, ScaleLadder};
use crate::corpus::{generate, load_field, save_field, CorpusSpec, Family, LoadedField};
use crate::error::{Error, ErrorClass, Result};
use crate::field::{Grid, SampledField};
use crate::geometry::{beta2k, graph_beta_vs_nu1, parse_cloud};
use crate::report::{self, fmt_f64, write_atomic, Metadata};
use crate::spectral::{calibrate_pv, fractional_derivative, riesz_potential};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "iabmo", version, about, args_override_self = true)]
struct Cli {
    /// File of `key = value` defaults; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a corpus field to a field file.
    Generate(GenerateArgs),
    /// Coefficient matrix over strided centres and a dyadic ladder (CSV).
    Coeffs(CoeffsArgs),
    /// Normalised square-function integrals and their maximum (CSV + JSON).
    Sqfn(SqfnArgs),
    /// Mean oscillation over balls, optionally of `D_α f` (CSV).
    Bmo(BmoArgs),
    /// Strichartz difference functional over dyadic cubes (CSV).
    Strichartz(StrichartzArgs),
    /// Apply `D_α`, `I_α` or the calibrated p.v. quadrature (field file).
    Fracderiv(FracderivArgs),
    /// Carleson constant against squared BMO norm of `D_α f` (JSON).
    Compare(CompareArgs),
    /// β numbers of a point cloud, or of a field's graph next to ν₁ (CSV).
    Beta(BetaArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    frequency: Option<u32>,
    #[arg(long)]
    max_frequency: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize, Clone)]
struct LadderArgs {
    /// Largest radius; defaults to an eighth of the period.
    #[arg(long)]
    ladder_top: Option<f64>,
    /// Number of dyadic radii; defaults to every radius down to 4h.
    #[arg(long)]
    ladder_levels: Option<usize>,
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

impl LadderArgs {
    fn ladder(&self, grid: &Grid) -> Result<ScaleLadder> {
        let top = self.ladder_top.unwrap_or(grid.period() / 8.0);
        match self.ladder_levels {
            Some(levels) => ScaleLadder::new(grid, top, levels),
            None => ScaleLadder::fit(grid, top),
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct CoeffsArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    kind: CoefficientKind,
    #[command(flatten)]
    #[serde(flatten)]
    ladder: LadderArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum CoefficientFamily {
    Nu,
    NuBar,
    NuTilde,
}

impl CoefficientFamily {
    fn kind(self, alpha: f64) -> CoefficientKind {
        let base = match self {
            CoefficientFamily::Nu => CoefficientKind::Nu0,
            CoefficientFamily::NuBar => CoefficientKind::Nu0Bar,
            CoefficientFamily::NuTilde => CoefficientKind::Nu0Tilde,
        };
        base.with_order(Order::for_alpha(alpha))
    }
}

#[derive(Debug, Args, Serialize)]
struct SqfnArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    alpha: f64,
    /// Coefficient family; the order follows α unless `--kind` is given.
    #[arg(long, value_enum, default_value_t = CoefficientFamily::Nu)]
    family: CoefficientFamily,
    #[arg(long)]
    kind: Option<CoefficientKind>,
    /// Number of ladder radii used as Carleson window radii.
    #[arg(long, default_value_t = 3)]
    tops: usize,
    #[command(flatten)]
    #[serde(flatten)]
    ladder: LadderArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct BmoArgs {
    #[arg(long)]
    field: PathBuf,
    /// Take the oscillation of `D_α f` instead of `f`.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    top: Option<f64>,
    /// Smallest radius; defaults to 4h.
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum DifferenceArg {
    First,
    Second,
}

#[derive(Debug, Args, Serialize)]
struct StrichartzArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum)]
    difference: DifferenceArg,
    /// Largest cube side; defaults to a quarter of the period.
    #[arg(long)]
    largest: Option<f64>,
    /// Smallest cube side; defaults to 4h.
    #[arg(long)]
    smallest: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Operator {
    Derivative,
    Potential,
    Pv,
}

#[derive(Debug, Args, Serialize)]
struct FracderivArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Operator::Derivative)]
    operator: Operator,
    /// Calibration frequency for `--operator pv`.
    #[arg(long, default_value_t = 1)]
    calibration_frequency: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct CompareArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = CoefficientFamily::Nu)]
    family: CoefficientFamily,
    #[arg(long, default_value_t = 3)]
    tops: usize,
    #[arg(long, default_value_t = 1)]
    bmo_stride: usize,
    #[command(flatten)]
    #[serde(flatten)]
    ladder: LadderArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct BetaArgs {
    /// Point cloud: whitespace-separated coordinates, optional weight column.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    cloud: Option<PathBuf>,
    /// Field file whose graph is measured instead of a cloud.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of coordinate columns in the cloud; otherwise every column is one.
    #[arg(long)]
    ambient_dim: Option<usize>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Ball radii for cloud mode.
    #[arg(long, value_delimiter = ',')]
    radii: Vec<f64>,
    /// Ball centre for cloud mode, comma-separated; repeatable. Defaults to
    /// every `stride`-th cloud point.
    #[arg(long)]
    center: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    ladder: LadderArgs,
    #[arg(long)]
    out: PathBuf,
}

fn flag_name(key: &str) -> String {
    format!("--{}", key.trim().replace('_', "-"))
}

/// `key = value` lines; blank lines and `#` comments are skipped.
fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason: format!("`{line}` is not key = value"),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Inserts config-file flags right after the subcommand so that later
/// command-line occurrences override them.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(sub)) = (config, sub) else {
        return Ok(args);
    };
    let mut merged: Vec<OsString> = args[..=sub].to_vec();
    for (k, v) in read_config(&path)? {
        merged.push(format!("{}={v}", flag_name(&k)).into());
    }
    merged.extend_from_slice(&args[sub + 1..]);
    Ok(merged)
}

fn value_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if n.is_f64() => fmt_f64(f),
            _ => n.to_string(),
        }),
        Value::Bool(b) => Some(b.to_string()),
        Value::Array(items) => Some(items.iter().filter_map(value_text).collect::<Vec<_>>().join(",")),
        Value::Object(_) => Some(v.to_string()),
    }
}

fn metadata(command: &str, args: &impl Serialize, config: Option<&Path>) -> Result<Metadata> {
    let mut meta = Metadata::new();
    meta.push("command", command);
    if let Some(p) = config {
        meta.push("config", p.display());
    }
    if let Value::Object(map) = serde_json::to_value(args)? {
        for (k, v) in &map {
            if let Some(text) = value_text(v) {
                meta.push(k.as_str(), text);
            }
        }
    }
    Ok(meta)
}

fn describe_input(meta: &mut Metadata, loaded: &LoadedField) {
    let grid = loaded.field.grid();
    meta.push("input.dim", grid.dim());
    meta.push("input.n", grid.n());
    meta.push("input.period", fmt_f64(grid.period()));
    for (k, v) in &loaded.header {
        if !matches!(k.as_str(), "dim" | "n" | "period") {
            meta.push(format!("input.{k}"), v);
        }
    }
}

fn describe_ladder(meta: &mut Metadata, ladder: &ScaleLadder) {
    meta.push("ladder.top", fmt_f64(ladder.top()));
    meta.push("ladder.levels", ladder.levels());
    meta.push(
        "ladder.smallest",
        fmt_f64(*ladder.radii().last().expect("nonempty ladder")),
    );
}

fn json_bytes(value: &Value) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn cmd_generate(args: &GenerateArgs, config: Option<&Path>) -> Result<String> {
    let value = serde_json::to_value(args)?;
    let mut pairs = BTreeMap::new();
    for (k, v) in value.as_object().expect("struct serialises to an object") {
        if matches!(k.as_str(), "n" | "dim" | "period" | "out") {
            continue;
        }
        if let Some(text) = value_text(v) {
            pairs.insert(k.clone(), text);
        }
    }
    let family = Family::from_pairs(&pairs)?;
    let grid = Grid::new(args.dim, args.n, args.period)?;
    let spec = CorpusSpec::new(family, grid)?;
    let field = generate(&spec)?;
    let mut header = spec.family.pairs();
    if let Some(p) = config {
        header.push(("config".into(), p.display().to_string().replace(char::is_whitespace, "_")));
    }
    save_field(&args.out, &field, &header)?;
    Ok(format!("wrote {} values to {}", field.values().len(), args.out.display()))
}

fn cmd_coeffs(args: &CoeffsArgs, config: Option<&Path>) -> Result<String> {
    let loaded = load_field(&args.field)?;
    let ladder = args.ladder.ladder(loaded.field.grid())?;
    let matrix = coefficient_matrix(&loaded.field, &ladder, args.kind, args.ladder.stride)?;
    let mut meta = metadata("coeffs", args, config)?;
    describe_input(&mut meta, &loaded);
    describe_ladder(&mut meta, &ladder);
    write_atomic(&args.out, matrix.csv(&meta).as_bytes())?;
    write_atomic(&sidecar(&args.out), &json_bytes(&matrix.json(&meta))?)?;
    Ok(format!(
        "wrote {} rows to {}",
        matrix.centers.len() * matrix.levels(),
        args.out.display()
    ))
}

fn cmd_sqfn(args: &SqfnArgs, config: Option<&Path>) -> Result<String> {
    let loaded = load_field(&args.field)?;
    let ladder = args.ladder.ladder(loaded.field.grid())?;
    if args.tops == 0 || args.tops > ladder.levels() {
        return Err(Error::param(
            "tops",
            format!("{} is outside 1..={}", args.tops, ladder.levels()),
        ));
    }
    let kind = args.kind.unwrap_or_else(|| args.family.kind(args.alpha));
    let matrix = coefficient_matrix(&loaded.field, &ladder, kind, args.ladder.stride)?;
    let tops = ladder.radii()[..args.tops].to_vec();
    let report = carleson_constant(&matrix, args.alpha, &matrix.centers, &tops)?;
    let mut meta = metadata("sqfn", args, config)?;
    describe_input(&mut meta, &loaded);
    describe_ladder(&mut meta, &ladder);
    write_atomic(&args.out, report.csv(&meta).as_bytes())?;
    write_atomic(&sidecar(&args.out), &json_bytes(&report.json(&meta)?)?)?;
    Ok(format!("constant {} written to {}", fmt_f64(report.constant), args.out.display()))
}

fn cmd_bmo(args: &BmoArgs, config: Option<&Path>) -> Result<String> {
    let loaded = load_field(&args.field)?;
    let grid = loaded.field.grid().clone();
    let target = match args.alpha {
        Some(a) => fractional_derivative(&loaded.field, a)?,
        None => loaded.field.clone(),
    };
    let top = args.top.unwrap_or(grid.period() / 8.0);
    let floor = args.floor.unwrap_or(4.0 * grid.spacing());
    let radii = dyadic_radii(top, floor);
    if radii.is_empty() {
        return Err(Error::param("floor", format!("{floor} exceeds top {top}")));
    }
    crate::coeffs::check_stride(&grid, args.stride)?;
    let report = bmo_norm(&target, &ball_family(&grid, &radii, args.stride)?)?;
    let mut meta = metadata("bmo", args, config)?;
    describe_input(&mut meta, &loaded);
    let mut out = meta.csv_header();
    let _ = writeln!(out, "# norm={}", fmt_f64(report.norm));
    out.push_str(columns(grid.dim(), &["radius", "oscillation"]).as_str());
    for w in &report.per_window {
        let _ = writeln!(out, "{}{},{}", point_cells(&w.center), fmt_f64(w.radius), fmt_f64(w.oscillation));
    }
    write_atomic(&args.out, out.as_bytes())?;
    Ok(format!("norm {} written to {}", fmt_f64(report.norm), args.out.display()))
}

fn columns(dim: usize, rest: &[&str]) -> String {
    let lead = if dim == 1 { "center_i" } else { "center_i,center_j" };
    format!("{lead},{}\n", rest.join(","))
}

fn point_cells(point: &[usize]) -> String {
    point.iter().map(|p| format!("{p},")).collect()
}

fn cmd_strichartz(args: &StrichartzArgs, config: Option<&Path>) -> Result<String> {
    let loaded = load_field(&args.field)?;
    let grid = loaded.field.grid();
    let largest = args.largest.unwrap_or(grid.period() / 4.0);
    let smallest = args.smallest.unwrap_or(4.0 * grid.spacing());
    let cubes = dyadic_cubes(grid, largest, smallest);
    if cubes.is_empty() {
        return Err(Error::param("smallest", format!("{smallest} exceeds largest {largest}")));
    }
    let difference = match args.difference {
        DifferenceArg::First => Difference::First,
        DifferenceArg::Second => Difference::Second,
    };
    let report = strichartz(&loaded.field, args.alpha, difference, &cubes)?;
    let mut meta = metadata("strichartz", args, config)?;
    describe_input(&mut meta, &loaded);
    let mut out = meta.csv_header();
    let _ = writeln!(out, "# b={}", fmt_f64(report.b));
    out.push_str(&columns(grid.dim(), &["side", "value"]));
    for c in &report.per_cube {
        let _ = writeln!(out, "{}{},{}", point_cells(&c.center), fmt_f64(c.side), fmt_f64(c.value));
    }
    write_atomic(&args.out, out.as_bytes())?;
    Ok(format!("b {} written to {}", fmt_f64(report.b), args.out.display()))
}

fn cmd_fracderiv(args: &FracderivArgs, config: Option<&Path>) -> Result<String> {
    let loaded = load_field(&args.field)?;
    let field = &loaded.field;
    let result: SampledField = match args.operator {
        Operator::Derivative => fractional_derivative(field, args.alpha)?,
        Operator::Potential => riesz_potential(field, args.alpha)?,
        Operator::Pv => {
            calibrate_pv(field.grid(), args.alpha, args.calibration_frequency)?.derivative_by_quadrature(field)?
        }
    };
    let meta = metadata("fracderiv", args, config)?;
    let mut header: Vec<(String, String)> = vec![("family".into(), "derived".into())];
    for (k, v) in meta.entries() {
        if k == "family" {
            continue;
        }
        header.push((k.clone(), v.replace(char::is_whitespace, "_")));
    }
    for (k, v) in &loaded.header {
        if !matches!(k.as_str(), "dim" | "n" | "period") {
            header.push((format!("input.{k}"), v.clone()));
        }
    }
    save_field(&args.out, &result, &header)?;
    Ok(format!("wrote {}", args.out.display()))
}

fn cmd_compare(args: &CompareArgs, config: Option<&Path>) -> Result<String> {
    let loaded = load_field(&args.field)?;
    let grid = loaded.field.grid();
    let ladder = args.ladder.ladder(grid)?;
    let experiment = ExperimentConfig {
        family: args.family.kind(0.5),
        ladder_top: Some(ladder.top()),
        tops: args.tops,
        stride: args.ladder.stride,
        bmo_stride: args.bmo_stride,
    };
    if ladder.levels() != experiment.ladder(grid)?.levels() {
        return Err(Error::param(
            "ladder_levels",
            "the comparison uses every ladder radius down to 4h",
        ));
    }
    let mut records = Vec::with_capacity(args.alphas.len());
    for &alpha in &args.alphas {
        records.push(comparability_experiment(&loaded.field, alpha, &experiment)?);
    }
    let mut meta = metadata("compare", args, config)?;
    describe_input(&mut meta, &loaded);
    describe_ladder(&mut meta, &ladder);
    let value = serde_json::json!({
        "format": report::FORMAT_VERSION,
        "config": meta.json(),
        "records": records,
    });
    write_atomic(&args.out, &json_bytes(&value)?)?;
    Ok(format!("{} records written to {}", records.len(), args.out.display()))
}

fn cmd_beta(args: &BetaArgs, config: Option<&Path>) -> Result<String> {
    let mut meta = metadata("beta", args, config)?;
    if let Some(path) = &args.graph {
        let loaded = load_field(path)?;
        let ladder = args.ladder.ladder(loaded.field.grid())?;
        let cmp = graph_beta_vs_nu1(&loaded.field, &ladder, args.ladder.stride)?;
        describe_input(&mut meta, &loaded);
        describe_ladder(&mut meta, &ladder);
        meta.push("mode", "graph");
        let grid = loaded.field.grid();
        let mut out = meta.csv_header();
        let _ = writeln!(out, "# lipschitz={}", fmt_f64(cmp.lipschitz));
        out.push_str(&columns(grid.dim(), &["radius", "beta", "nu1", "ratio"]));
        let levels = ladder.levels();
        for (ci, &flat) in cmp.beta.centers.iter().enumerate() {
            let point = point_cells(&grid.point(flat));
            for (j, &r) in ladder.radii().iter().enumerate() {
                let ratio = cmp.ratio[ci * levels + j].map(fmt_f64).unwrap_or_else(|| "nan".into());
                let _ = writeln!(
                    out,
                    "{point}{},{},{},{ratio}",
                    fmt_f64(r),
                    fmt_f64(cmp.beta.value(ci, j)),
                    fmt_f64(cmp.nu1.value(ci, j)),
                );
            }
        }
        write_atomic(&args.out, out.as_bytes())?;
        return Ok(format!("wrote {}", args.out.display()));
    }
    let path = args.cloud.as_ref().ok_or_else(|| Error::param("cloud", "missing --cloud or --graph"))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_cloud(&text, args.ambient_dim, path)?;
    let cloud = &parsed.cloud;
    if args.radii.is_empty() {
        return Err(Error::param("radii", "cloud mode needs at least one radius"));
    }
    if args.ladder.stride == 0 {
        return Err(Error::param("stride", "must be positive"));
    }
    let d = cloud.ambient_dim();
    let centers: Vec<Vec<f64>> = if args.center.is_empty() {
        cloud.points().iter().step_by(args.ladder.stride).cloned().collect()
    } else {
        args.center
            .iter()
            .map(|c| {
                c.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::param("center", format!("`{c}` is not a list of numbers")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?
    };
    meta.push("mode", "cloud");
    meta.push("points", cloud.len());
    meta.push(
        "weights",
        if parsed.unit_weights { "unit (no weight column)" } else { "from file" },
    );
    let mut out = meta.csv_header();
    let lead: Vec<String> = (0..d).map(|i| format!("center_{i}")).collect();
    let _ = writeln!(out, "{},radius,beta", lead.join(","));
    for c in &centers {
        for &r in &args.radii {
            let (b, _) = beta2k(cloud, c, r, args.k)?;
            let coords: Vec<String> = c.iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(out, "{},{},{}", coords.join(","), fmt_f64(r), fmt_f64(b));
        }
    }
    write_atomic(&args.out, out.as_bytes())?;
    Ok(format!("wrote {}", args.out.display()))
}

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Usage => EXIT_USAGE,
        ErrorClass::Data => EXIT_DATA,
        ErrorClass::Numeric => EXIT_NUMERIC,
    }
}

fn class_name(class: ErrorClass) -> &'static str {
    match class {
        ErrorClass::Usage => "usage",
        ErrorClass::Data => "data",
        ErrorClass::Numeric => "numeric",
    }
}

fn one_line(message: &str) -> String {
    message.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs the front-end on `args` (program name first), writing the status line
/// to `stdout` and any error, on one line, to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let merged = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {}", class_name(ErrorClass::Usage), one_line(&e.to_string()));
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "error[usage]: {}", one_line(first));
            return EXIT_USAGE;
        }
    };
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, config),
        Command::Coeffs(a) => cmd_coeffs(a, config),
        Command::Sqfn(a) => cmd_sqfn(a, config),
        Command::Bmo(a) => cmd_bmo(a, config),
        Command::Strichartz(a) => cmd_strichartz(a, config),
        Command::Fracderiv(a) => cmd_fracderiv(a, config),
        Command::Compare(a) => cmd_compare(a, config),
        Command::Beta(a) => cmd_beta(a, config),
    };
    match result {
        Ok(status) => {
            let _ = writeln!(stdout, "{status}");
            EXIT_OK
        }
        Err(e) => {
            let class = e.class();
            let message = match &e {
                Error::InvalidParameter { name, reason } => {
                    format!("invalid value for {}: {reason}", flag_name(name))
                }
                other => other.to_string(),
            };
            let _ = writeln!(stderr, "error[{}]: {}", class_name(class), one_line(&message));
            exit_code(class)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["iabmo"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_family_names_flag() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.fld");
        let (code, _, err) = call(&["generate", "--family", "nope", "--n", "64", "--out", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--family"), "{err}");
        assert_eq!(err.lines().count(), 1);
        assert!(!out.exists());
    }

    #[test]
    fn missing_flag_is_usage_error() {
        let (code, _, err) = call(&["generate", "--family", "smooth_bump"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn config_file_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        let out = dir.path().join("s.fld");
        std::fs::write(
            &cfg,
            format!("# defaults\nfamily = sinusoid\nfrequency = 2\nn = 32\nout = {}\n", out.display()),
        )
        .unwrap();
        let (code, _, err) = call(&["generate", "--config", cfg.to_str().unwrap(), "--n", "16"]);
        assert_eq!(code, 0, "{err}");
        let loaded = load_field(&out).unwrap();
        assert_eq!(loaded.field.grid().n(), 16);
        assert_eq!(loaded.header["frequency"], "2");
    }

    #[test]
    fn merge_places_config_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c");
        std::fs::write(&cfg, "max_frequency=3\n").unwrap();
        let args: Vec<OsString> = ["iabmo", "--config", cfg.to_str().unwrap(), "generate", "--n", "8"]
            .iter()
            .map(OsString::from)
            .collect();
        let merged = merge_config(args).unwrap();
        let text: Vec<String> = merged.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(text[3], "generate");
        assert_eq!(text[4], "--max-frequency=3");
        assert_eq!(text[5], "--n");
    }

    #[test]
    fn data_error_exit_code() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("bad.fld");
        std::fs::write(&f, "iabmo-field v1 dim=3 n=8 period=1\n").unwrap();
        let out = dir.path().join("o.csv");
        let (code, _, err) = call(&["coeffs", "--field", f.to_str().unwrap(), "--kind", "nu0", "--out", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_DATA, "{err}");
        assert!(err.starts_with("error[data]"));
    }
}
