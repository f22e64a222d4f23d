//! `higgslab <command> --config c.json [--out r.json] [--seed N] [--parallel]`
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails
//! (the report carries the witness), 2 for unreadable or invalid input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use higgslab::census::{census_grid, gothen_counts, CensusRanges, CensusRow};
use higgslab::charclass::{evaluate, whitney_additivity_check, Bits, CharclassInput};
use higgslab::exact::{Field, PolyMat};
use higgslab::higgs::{
    cayley_symplectic, cayley_triple, kernel_quadratic, pushforward_trivial, upp_quotient, verify_so,
    verify_sp, weight_string, CayleyTriple, CayleyTripleJson, OrthHiggsChart, OrthHiggsChartJson, SpChart,
};
use higgslab::langlands::{
    build_extension, canonical_tau, equivariant_lift, force_extension, invariant_direct_image,
    quadratic_certificate, stability_check, tau_conversion, torsor_sweep, EquivariantBundle,
    EquivariantBundleJson, ExtensionData, ExtensionDataJson, QuadraticBundle, QuadraticBundleJson,
};
use higgslab::random::{random_regular, random_signs, rng_from_seed, InstanceShape};
use higgslab::report::Verdicts;
use higgslab::selftest::run_selftest;
use higgslab::spectral::{SpectralCoeffs, SpectralCoeffsJson};
use higgslab::split::{b_invariant, build_split, SplitSpec, SplitSpecJson};
use higgslab::Error;

#[derive(Parser)]
#[command(name = "higgslab", version, about = "Exact spectral data for SO(p+q,p) Higgs bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// SO(p+1,p) bundle from coefficients and a sign per zero of a_p
    ConstructSplit(Common),
    /// Reconstruct V from a Cayley triple, (V_0, Q_0) and extension data
    BuildExtension(Common),
    /// Check an orthogonal or symplectic chart
    Verify(Common),
    /// Kernel bundle, quotient and Cayley triple of an orthogonal chart
    Cayley(Common),
    /// Invariant direct image of an equivariant bundle, or the lift of (V_0, Q_0)
    DirectImage(Common),
    /// Stiefel-Whitney classes in the GF(2) model
    Charclass(Common),
    /// Closed-form counts over a (p, q, g) grid
    Census(Common),
    /// Golden corpus and property suites
    Selftest(Common),
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Scenario config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Full report path (JSON); without it the report goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random instances
    #[arg(long)]
    seed: Option<u64>,
    /// Fan out independent items over threads; output order is unchanged
    #[arg(long)]
    parallel: bool,
    /// CSV table path (census only)
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ConstructSplit(_) => "construct-split",
            Command::BuildExtension(_) => "build-extension",
            Command::Verify(_) => "verify",
            Command::Cayley(_) => "cayley",
            Command::DirectImage(_) => "direct-image",
            Command::Charclass(_) => "charclass",
            Command::Census(_) => "census",
            Command::Selftest(_) => "selftest",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::ConstructSplit(c)
            | Command::BuildExtension(c)
            | Command::Verify(c)
            | Command::Cayley(c)
            | Command::DirectImage(c)
            | Command::Charclass(c)
            | Command::Census(c)
            | Command::Selftest(c) => c,
        }
    }
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FieldConfig {
    #[default]
    Default,
    Prime {
        modulus: u64,
    },
    Rational,
}

impl FieldConfig {
    fn field(self) -> higgslab::Result<Field> {
        match self {
            FieldConfig::Default => Ok(Field::default()),
            FieldConfig::Prime { modulus } => Field::prime(modulus),
            FieldConfig::Rational => Ok(Field::Rational),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tool_version: &'static str,
    seed: u64,
    passed: bool,
    verdicts: Verdicts,
    artifacts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorReport>,
}

/// Failure of a run before or during the computation.
enum Failure {
    Input(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Math(e)
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("config: {e}"))
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(format!("{e:#}"))
    }
}

#[derive(Default)]
struct Outcome {
    verdicts: Verdicts,
    artifacts: BTreeMap<String, Value>,
}

impl Outcome {
    fn put(&mut self, key: &str, v: impl Serialize) {
        self.artifacts.insert(key.to_string(), serde_json::to_value(v).expect("artifact serializes"));
    }
}

fn take<T: for<'de> Deserialize<'de>>(cfg: &Value, key: &str) -> Result<T, Failure> {
    let v = cfg.get(key).ok_or_else(|| Failure::Input(format!("config is missing \"{key}\"")))?;
    serde_json::from_value(v.clone()).map_err(|e| Failure::Input(format!("config \"{key}\": {e}")))
}

fn take_opt<T: for<'de> Deserialize<'de>>(cfg: &Value, key: &str) -> Result<Option<T>, Failure> {
    match cfg.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => take(cfg, key).map(Some),
    }
}

fn spectral(cfg: &Value, field: Field) -> Result<SpectralCoeffs, Failure> {
    Ok(SpectralCoeffs::from_json(field, &take::<SpectralCoeffsJson>(cfg, "sc")?)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomSplit {
    p: usize,
    #[serde(default = "two")]
    g: u32,
    max_ap_degree: usize,
    #[serde(default = "two")]
    max_coeff_degree: usize,
}

fn two<T: From<u8>>() -> T {
    T::from(2)
}

fn construct_split(cfg: &Value, field: Field, seed: u64, out: &mut Outcome) -> Result<(), Failure> {
    let spec = match take_opt::<RandomSplit>(cfg, "random")? {
        Some(r) => {
            let mut rng = rng_from_seed(seed);
            let shape = InstanceShape {
                p: r.p,
                q: 1,
                g: r.g,
                max_ap_degree: r.max_ap_degree,
                max_coeff_degree: r.max_coeff_degree,
            };
            let sc = random_regular(field, shape, &mut rng)?;
            let n = sc.branch_points()?.len();
            SplitSpec::new(sc, random_signs(n, &mut rng))?
        }
        None => SplitSpec::from_json(field, &take::<SplitSpecJson>(cfg, "split")?)?,
    };
    out.put("split", spec.to_json());
    let census = cfg.get("census_mode").and_then(Value::as_bool).unwrap_or(false);
    out.put("b", b_invariant(&spec, census)?.to_string());
    out.put("b_plus", spec.b_plus());
    out.put("b_minus", spec.b_minus());
    let built = build_split(&spec)?;
    out.put("s_plus", built.s_plus.to_strings());
    out.put("s_minus", built.s_minus.to_strings());
    out.put("chart", built.chart.to_json());
    out.put("closed_form_chart", built.closed_form.to_json());
    out.put("summand_weights", &built.weights);
    out.put("char_poly", built.chart.phi().char_poly()?.to_strings());
    out.verdicts.extend_prefixed("split", built.verdicts);
    Ok(())
}

fn build_ext(cfg: &Value, field: Field, parallel: bool, out: &mut Outcome) -> Result<(), Failure> {
    let sc = spectral(cfg, field)?;
    let ct = match take_opt::<CayleyTripleJson>(cfg, "cayley")? {
        Some(j) => CayleyTriple::from_json(field, &j)?,
        None => pushforward_trivial(&sc),
    };
    let v0 = match take_opt::<QuadraticBundleJson>(cfg, "V0")? {
        Some(j) => QuadraticBundle::from_json(field, &j)?,
        None => QuadraticBundle::with_trivial_part(&sc, sc.q().max(1)),
    };
    let sc = sc.with_q(v0.q());
    out.verdicts.extend_prefixed("cayley", ct.verify(&sc));
    out.verdicts.extend_prefixed("V0", v0.verify(&sc));
    if cfg.get("sweep").and_then(Value::as_bool).unwrap_or(false) {
        let entries = torsor_sweep(&ct, &v0, &sc, parallel)?;
        let classes: std::collections::BTreeSet<_> = entries.iter().map(|e| e.canonical_key.clone()).collect();
        out.put("sweep", &entries);
        out.put("distinct_classes", classes.len());
        out.verdicts.check("sweep.all_verified", entries.iter().all(|e| e.verified), || "a build failed".into());
        return Ok(());
    }
    let ext = ExtensionData::from_json(&sc, &take::<ExtensionDataJson>(cfg, "extension")?)?;
    out.put("extension", ext.to_json());
    if let Ok(tau) = tau_conversion(&ext, &ct, &sc) {
        out.put("tau", &tau);
        out.put("tau_canonical", canonical_tau(&tau));
    }
    if cfg.get("forced").and_then(Value::as_bool).unwrap_or(false) {
        let forced = force_extension(&ct, &v0, &ext, &sc)?;
        out.put(
            "forced",
            json!({
                "QV": forced.qv.row_vecs().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect::<Vec<Vec<String>>>(),
                "det_QV": forced.det_qv().to_string(),
                "polynomial": forced.is_polynomial(),
                "QV_unimodular": forced.qv_unimodular(),
            }),
        );
    }
    let e = build_extension(&ct, &v0, &ext, &sc)?;
    out.put("chart", e.chart.to_json());
    out.put(
        "module_basis",
        json!({"denominator": e.basis.denominator.to_strings(), "numerators": e.basis.numerators.to_strings()}),
    );
    out.put("char_poly", e.chart.phi().char_poly()?.to_strings());
    out.verdicts.extend_prefixed("build", e.verdicts);
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpChartJson {
    #[serde(rename = "omega_V")]
    omega_v: Vec<Vec<Vec<String>>>,
    #[serde(rename = "omega_W")]
    omega_w: Vec<Vec<Vec<String>>>,
    beta: Vec<Vec<Vec<String>>>,
}

fn verify(cfg: &Value, field: Field, out: &mut Outcome) -> Result<(), Failure> {
    let sc = take_opt::<SpectralCoeffsJson>(cfg, "sc")?
        .map(|j| SpectralCoeffs::from_json(field, &j))
        .transpose()?;
    if let Some(sp) = take_opt::<SpChartJson>(cfg, "sp_chart")? {
        let chart = SpChart::new(
            PolyMat::parse(field, &sp.omega_v)?,
            PolyMat::parse(field, &sp.omega_w)?,
            PolyMat::parse(field, &sp.beta)?,
        )?;
        let (v, cp) = verify_sp(&chart, sc.as_ref());
        if let Some(cp) = cp {
            out.put("char_poly", cp.to_strings());
        }
        out.verdicts.extend_prefixed("sp", v);
        return Ok(());
    }
    let sc = sc.ok_or_else(|| Failure::Input("config is missing \"sc\"".into()))?;
    let chart = OrthHiggsChart::from_json(field, &take::<OrthHiggsChartJson>(cfg, "chart")?)?;
    let sc = sc.with_q(chart.q());
    out.verdicts.extend_prefixed("so", verify_so(&chart, &sc));
    out.put("regularity", sc.regularity_check().failures());
    out.verdicts.check("regular", sc.regularity_check().passed(), || sc.regularity_check().failures().join("; "));
    Ok(())
}

fn cayley(cfg: &Value, field: Field, out: &mut Outcome) -> Result<(), Failure> {
    let sc = spectral(cfg, field)?;
    let chart = OrthHiggsChart::from_json(field, &take::<OrthHiggsChartJson>(cfg, "chart")?)?;
    let sc = sc.with_q(chart.q());
    out.verdicts.extend_prefixed("so", verify_so(&chart, &sc));
    let kq = kernel_quadratic(&chart, &sc)?;
    out.put("V0", kq.bundle.to_json());
    out.put("V0_basis", kq.basis.to_strings());
    out.verdicts.extend_prefixed("V0", kq.bundle.verify(&sc));
    let (uq, v) = upp_quotient(&chart, &sc)?;
    out.verdicts.extend_prefixed("quotient", v);
    let (sp, v) = cayley_symplectic(&uq, &chart.qw, &chart.w_weights);
    out.put(
        "symplectic",
        json!({
            "F_weights": sp.f_weights.iter().map(weight_string).collect::<Vec<_>>(),
            "Phi_F": sp.phi_f.to_strings(),
            "omega_F": sp.omega_f.to_strings(),
        }),
    );
    out.verdicts.extend_prefixed("symplectic", v);
    let (ct, v) = cayley_triple(&chart, &uq, &sc);
    out.put("cayley", ct.to_json());
    out.verdicts.extend_prefixed("cayley", v);
    Ok(())
}

fn direct_image(cfg: &Value, field: Field, out: &mut Outcome) -> Result<(), Failure> {
    let sc = spectral(cfg, field)?;
    if let Some(mj) = take_opt::<EquivariantBundleJson>(cfg, "M")? {
        let m = EquivariantBundle::from_json(field, &mj)?;
        let sc = sc.with_q(m.q());
        let (v0, local) = invariant_direct_image(&m, &sc)?;
        out.put("V0", v0.to_json());
        out.put("certificate_M", m.certificate());
        out.put("certificate_V0", quadratic_certificate(&v0, &sc)?);
        out.verdicts.extend_prefixed("local_model", local);
        let lift = equivariant_lift(&v0, &sc)?;
        out.verdicts.check("round_trip_certificate", lift.bundle.certificate() == m.certificate(), || {
            format!("{:?} vs {:?}", lift.bundle.certificate(), m.certificate())
        });
        match stability_check(&m) {
            Ok(st) => {
                out.verdicts.check("stable", st.stable, || format!("{:?}", st.invariant_isotropic));
                out.put("stability", st);
            }
            Err(e) => out.put("stability", e.to_string()),
        }
        return Ok(());
    }
    let v0 = QuadraticBundle::from_json(field, &take::<QuadraticBundleJson>(cfg, "V0")?)?;
    let sc = sc.with_q(v0.q());
    let lift = equivariant_lift(&v0, &sc)?;
    out.put("M", lift.bundle.to_json());
    out.put("frame", lift.frame.to_strings());
    out.put("certificate_M", lift.bundle.certificate());
    out.put("certificate_V0", quadratic_certificate(&v0, &sc)?);
    out.verdicts.check(
        "certificates_agree",
        lift.bundle.certificate() == quadratic_certificate(&v0, &sc)?,
        || "certificates differ".into(),
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WhitneyInput {
    w1_v: Bits,
    w2_v: u8,
    w1_w: Bits,
    w2_w: u8,
}

fn charclass(cfg: &Value, out: &mut Outcome) -> Result<(), Failure> {
    let inputs: Vec<CharclassInput> = match cfg.get("charclass") {
        Some(Value::Array(_)) => take(cfg, "charclass")?,
        _ => vec![take(cfg, "charclass")?],
    };
    let mut results = vec![];
    for (k, input) in inputs.iter().enumerate() {
        let r = evaluate(input)?;
        out.verdicts.check(format!("norm_adjoint[{k}]"), r.norm_adjoint, || "Nm is not adjoint to the pullback".into());
        results.push(r);
    }
    out.put("classes", results);
    if let Some(w) = take_opt::<WhitneyInput>(cfg, "whitney")? {
        let s = whitney_additivity_check(&w.w1_v, w.w2_v, &w.w1_w, w.w2_w)?;
        out.put("w2_sum", s);
    }
    Ok(())
}

const CSV_HEADER: [&str; 16] = [
    "p",
    "q",
    "g",
    "deg_l",
    "g_s",
    "g_sbar",
    "g_c",
    "riemann_hurwitz",
    "stack_dim",
    "fiber_exponent",
    "fiber_order",
    "prym_dim",
    "torsor_exponent",
    "torsor_order",
    "exponent_identity",
    "consistent",
];

fn write_csv(path: &Path, rows: &[CensusRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(CSV_HEADER)?;
    let opt = |o: Option<u64>| o.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.p.to_string(),
            r.q.to_string(),
            r.g.to_string(),
            r.deg_l.to_string(),
            r.g_s.to_string(),
            r.g_sbar.to_string(),
            r.g_c.to_string(),
            r.riemann_hurwitz.to_string(),
            r.stack_dim.to_string(),
            opt(r.fiber_exponent),
            r.fiber_order.clone().unwrap_or_default(),
            opt(r.prym_dim),
            r.torsor_exponent.to_string(),
            r.torsor_order.clone(),
            r.exponent_identity.to_string(),
            r.consistent.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn census(cfg: &Value, common: &Common, out: &mut Outcome) -> Result<(), Failure> {
    let ranges: CensusRanges = take(cfg, "ranges")?;
    let rows = census_grid(&ranges, common.parallel)?;
    for r in &rows {
        out.verdicts.check(format!("row({},{},{})", r.p, r.q, r.g), r.consistent, || format!("{r:?}"));
    }
    let gothen: Vec<_> = (ranges.g[0]..=ranges.g[1]).map(|g| (g, gothen_counts(g))).collect();
    for (g, c) in &gothen {
        out.verdicts.check(format!("gothen({g})"), c.parts_sum, || format!("{c:?}"));
    }
    out.put("rows", &rows);
    out.put("gothen", gothen.into_iter().map(|(g, c)| json!({"g": g, "counts": c})).collect::<Vec<_>>());
    if let Some(path) = &common.csv {
        write_csv(path, &rows)?;
    }
    Ok(())
}

fn load_config(path: Option<&Path>, required: bool) -> Result<Value, Failure> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
            Ok(serde_json::from_str(&text)?)
        }
        None if required => Err(Failure::Input("--config is required".into())),
        None => Ok(json!({})),
    }
}

fn execute(cmd: &Command, common: &Common, seed: &mut u64, out: &mut Outcome) -> Result<(), Failure> {
    let required = !matches!(cmd, Command::Selftest(_));
    let cfg = load_config(common.config.as_deref(), required)?;
    if !cfg.is_object() {
        return Err(Failure::Input("config must be a JSON object".into()));
    }
    *seed = common.seed.or_else(|| cfg.get("seed").and_then(Value::as_u64)).unwrap_or(0);
    let field = take_opt::<FieldConfig>(&cfg, "field")?.unwrap_or_default().field()?;
    match cmd {
        Command::ConstructSplit(_) => construct_split(&cfg, field, *seed, out)?,
        Command::BuildExtension(_) => build_ext(&cfg, field, common.parallel, out)?,
        Command::Verify(_) => verify(&cfg, field, out)?,
        Command::Cayley(_) => cayley(&cfg, field, out)?,
        Command::DirectImage(_) => direct_image(&cfg, field, out)?,
        Command::Charclass(_) => charclass(&cfg, out)?,
        Command::Census(_) => census(&cfg, common, out)?,
        Command::Selftest(_) => {
            let r = run_selftest(*seed, common.parallel);
            for (name, v) in r.sections {
                out.verdicts.extend_prefixed(&name, v);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cmd = Cli::parse().command;
    let common = cmd.common().clone();
    let start = Instant::now();
    let mut seed = 0;
    let mut outcome = Outcome::default();
    let result = execute(&cmd, &common, &mut seed, &mut outcome);
    let (error, code) = match result {
        Ok(()) => (None, if outcome.verdicts.all_passed() { 0 } else { 1 }),
        Err(Failure::Math(e)) => (
            Some(ErrorReport {
                kind: e.kind(),
                message: e.to_string(),
            }),
            1,
        ),
        Err(Failure::Input(m)) => (
            Some(ErrorReport {
                kind: "InputError",
                message: m,
            }),
            2,
        ),
    };
    let report = Report {
        command: cmd.name(),
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        passed: code == 0,
        verdicts: outcome.verdicts,
        artifacts: outcome.artifacts,
        error,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let failed: Vec<_> = report.verdicts.failures().iter().map(|c| c.name.clone()).collect();
    println!(
        "{}: {} ({} checks, {} failed, {:.1} ms)",
        report.command,
        if code == 0 { "pass" } else { "FAIL" },
        report.verdicts.len(),
        failed.len(),
        start.elapsed().as_secs_f64() * 1e3
    );
    for name in failed.iter().take(20) {
        println!("  failed: {name}");
    }
    if let Some(e) = &report.error {
        println!("  {}: {}", e.kind, e.message);
    }
    if common.out.is_none() {
        print!("{text}");
    }
    ExitCode::from(code)
}
