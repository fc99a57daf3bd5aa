//! Command dispatch: parse the input files, run the requested computation,
//! assemble the output document, and map failures to exit codes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use okb_core::body::BodyKind;
use okb_core::exactgeom::format_rational;
use okb_core::json::{
    from_json_str, to_json_string, BodyDoc, ClassDoc, DivisorDoc, FanDoc, FlagDoc, ModelDoc,
    OrbitConeDoc, SurfaceBodyDoc, SurfaceFlagDoc, ValuationSetDoc,
};
use okb_core::toric::IitakaDim;
use okb_core::{bridge, semigroup, surface, toric, Error, Result};

use crate::svg::render_svg;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CommandKind {
    Validate,
    ToricBody,
    ToricBaseloci,
    ToricCertify,
    SurfaceZariski,
    SurfaceBody,
    SurfaceVolplus,
    SemigroupBody,
    Xcheck,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Validate => "validate",
            CommandKind::ToricBody => "toric-body",
            CommandKind::ToricBaseloci => "toric-baseloci",
            CommandKind::ToricCertify => "toric-certify",
            CommandKind::SurfaceZariski => "surface-zariski",
            CommandKind::SurfaceBody => "surface-body",
            CommandKind::SurfaceVolplus => "surface-volplus",
            CommandKind::SemigroupBody => "semigroup-body",
            CommandKind::Xcheck => "xcheck",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BodyKindArg {
    Valuative,
    Limiting,
}

impl BodyKindArg {
    fn to_kind(self) -> BodyKind {
        match self {
            BodyKindArg::Valuative => BodyKind::Valuative,
            BodyKindArg::Limiting => BodyKind::Limiting,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: PathBuf,
    pub divisor: Option<PathBuf>,
    pub flag: Option<PathBuf>,
    pub cone: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub kind: BodyKindArg,
    pub jobs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputDocument {
    pub schema_version: String,
    pub command: String,
    pub result: Value,
    pub diagnostics: Vec<String>,
}

impl OutputDocument {
    fn new(command: CommandKind, result: Value, diagnostics: Vec<String>) -> Self {
        OutputDocument {
            schema_version: SCHEMA_VERSION.into(),
            command: command.as_str().into(),
            result,
            diagnostics,
        }
    }

    pub fn render(&self) -> String {
        // Round-tripping through Value sorts every object key, so output
        // bytes depend only on content.
        let value = serde_json::to_value(self).expect("output documents always serialize");
        to_json_string(&value).expect("output documents always serialize")
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Json(format!("cannot read {}: {e}", path.display())))
}

fn load<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T> {
    from_json_str(&read_file(path)?)
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Schema(format!("this command requires --{what} <file>")))
}

/// Executes the configured command. Returns the exit code and the document.
pub fn run(config: &RunConfig) -> (i32, OutputDocument) {
    match execute(config) {
        Ok(doc) => (0, doc),
        Err(err) => {
            let code = if err.is_input_error() { 1 } else { 2 };
            let doc = OutputDocument::new(
                config.command,
                json!({ "error": err.to_string() }),
                vec![],
            );
            (code, doc)
        }
    }
}

fn execute(config: &RunConfig) -> Result<OutputDocument> {
    let mut doc = match config.command {
        CommandKind::Validate => cmd_validate(config)?,
        CommandKind::ToricBody => cmd_toric_body(config)?,
        CommandKind::ToricBaseloci => cmd_toric_baseloci(config)?,
        CommandKind::ToricCertify => cmd_toric_certify(config)?,
        CommandKind::SurfaceZariski => cmd_surface_zariski(config)?,
        CommandKind::SurfaceBody => cmd_surface_body(config)?,
        CommandKind::SurfaceVolplus => cmd_surface_volplus(config)?,
        CommandKind::SemigroupBody => cmd_semigroup_body(config)?,
        CommandKind::Xcheck => cmd_xcheck(config)?,
    };
    if let Some(out_path) = &config.out {
        if config.command == CommandKind::Xcheck && config.input.is_dir() {
            // Batch mode writes per-fixture files; nothing extra here.
        } else {
            std::fs::write(out_path, doc.render())
                .map_err(|e| Error::Json(format!("cannot write {}: {e}", out_path.display())))?;
            doc.diagnostics
                .push(format!("result written to {}", out_path.display()));
        }
    }
    Ok(doc)
}

/// Renders the body to the configured SVG path, if any.
fn maybe_svg(config: &RunConfig, body: &okb_core::ConvexBody, doc: &mut OutputDocument) -> Result<()> {
    if let Some(svg_path) = &config.svg {
        let text = render_svg(body)?;
        std::fs::write(svg_path, text)
            .map_err(|e| Error::Json(format!("cannot write {}: {e}", svg_path.display())))?;
        doc.diagnostics
            .push(format!("svg written to {}", svg_path.display()));
    }
    Ok(())
}

fn no_svg_here(config: &RunConfig) -> Result<()> {
    if config.svg.is_some() {
        return Err(Error::Schema(format!(
            "--svg is not supported for `{}`",
            config.command.as_str()
        )));
    }
    Ok(())
}

fn iitaka_value(dim: IitakaDim) -> Value {
    match dim {
        IitakaDim::NegativeInfinity => json!("-infinity"),
        IitakaDim::Dim(d) => json!(d),
    }
}

fn cmd_validate(config: &RunConfig) -> Result<OutputDocument> {
    no_svg_here(config)?;
    let text = read_file(&config.input)?;
    let raw: Value = from_json_str(&text)?;
    let result = if raw.get("rays").is_some() {
        let fan = from_json_str::<FanDoc>(&text)?.to_fan()?;
        let report = fan.validate();
        json!({
            "target": "fan",
            "valid": report.is_valid(),
            "smooth": report.smooth,
            "complete": report.complete,
            "faces_compatible": report.faces_compatible,
            "issues": report.issues,
        })
    } else if raw.get("form").is_some() {
        let model = from_json_str::<ModelDoc>(&text)?.to_model()?;
        let report = model.validate();
        json!({
            "target": "model",
            "valid": report.is_valid(),
            "signature_ok": report.signature_ok,
            "ample_ok": report.ample_ok,
            "negative_generators_listed": report.negative_generators_listed,
            "curves_negative": report.curves_negative,
            "issues": report.issues,
        })
    } else {
        return Err(Error::Schema(
            "input is neither a fan (no `rays`) nor a model (no `form`)".into(),
        ));
    };
    Ok(OutputDocument::new(config.command, result, vec![]))
}

fn cmd_toric_body(config: &RunConfig) -> Result<OutputDocument> {
    let fan = load::<FanDoc>(&config.input)?.to_fan()?;
    let divisor = load::<DivisorDoc>(required(&config.divisor, "divisor")?)?.to_divisor()?;
    let flag = load::<FlagDoc>(required(&config.flag, "flag")?)?.to_flag();
    let body = toric::okounkov_body(&fan, &divisor, &flag, config.kind.to_kind())?;
    let kappa = toric::iitaka_dim(&fan, &divisor)?;
    let volume = if body.is_empty() {
        Value::Null
    } else {
        json!(body.polytope.euclidean_volume()?.to_string())
    };
    // The numerical Iitaka dimension coincides with the usual one on
    // complete toric inputs; both are echoed for downstream consumers.
    let result = json!({
        "body": BodyDoc::from_body(&body),
        "iitaka_dimension": iitaka_value(kappa),
        "numerical_iitaka_dimension": iitaka_value(kappa),
        "euclidean_volume": volume,
    });
    let mut doc = OutputDocument::new(config.command, result, vec![]);
    if body.is_empty() && config.svg.is_some() {
        return Err(Error::EmptyBody);
    }
    maybe_svg(config, &body, &mut doc)?;
    Ok(doc)
}

fn cmd_toric_baseloci(config: &RunConfig) -> Result<OutputDocument> {
    no_svg_here(config)?;
    let fan = load::<FanDoc>(&config.input)?.to_fan()?;
    let divisor = load::<DivisorDoc>(required(&config.divisor, "divisor")?)?.to_divisor()?;
    let report = toric::base_loci(&fan, &divisor)?;
    let cones = |list: &[toric::OrbitCone]| -> Vec<OrbitConeDoc> {
        list.iter().map(OrbitConeDoc::from_cone).collect()
    };
    let result = json!({
        "stable": cones(&report.stable),
        "restricted": cones(&report.restricted),
        "augmented": cones(&report.augmented),
        "restricted_divisorial_rays": report.restricted_divisorial,
        "restricted_epsilon": format_rational(&report.restricted_epsilon),
        "augmented_epsilon": format_rational(&report.augmented_epsilon),
    });
    Ok(OutputDocument::new(config.command, result, vec![]))
}

fn certification_value(c: &toric::Certification) -> Value {
    json!({
        "holds": c.holds,
        "reason": c.reason,
        "witness": c
            .witness_vectors
            .iter()
            .map(|v| v.coords().iter().map(format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn cmd_toric_certify(config: &RunConfig) -> Result<OutputDocument> {
    no_svg_here(config)?;
    let fan = load::<FanDoc>(&config.input)?.to_fan()?;
    let divisor = load::<DivisorDoc>(required(&config.divisor, "divisor")?)?.to_divisor()?;
    let cone = load::<OrbitConeDoc>(required(&config.cone, "cone")?)?.to_cone();
    let nakayama = toric::is_nakayama(&fan, &divisor, &cone)?;
    let positive = toric::is_positive_volume(&fan, &divisor, &cone)?;
    let result = json!({
        "cone": OrbitConeDoc::from_cone(&cone),
        "subvariety_dimension": fan.dim() - cone.ray_indices.len(),
        "nakayama": certification_value(&nakayama),
        "positive_volume": certification_value(&positive),
    });
    Ok(OutputDocument::new(config.command, result, vec![]))
}

fn cmd_surface_zariski(config: &RunConfig) -> Result<OutputDocument> {
    no_svg_here(config)?;
    let model = load::<ModelDoc>(&config.input)?.to_model()?;
    let class = load::<ClassDoc>(required(&config.divisor, "divisor")?)?.to_class()?;
    let pair = surface::zariski_decompose(&model, &class)?;
    let support: Vec<Value> = pair
        .negative_support
        .iter()
        .map(|(i, c)| {
            json!({
                "curve": model.curves()[*i].name,
                "coefficient": format_rational(c),
            })
        })
        .collect();
    let volume = model.pair(&pair.positive, &pair.positive);
    let result = json!({
        "positive": ClassDoc::from_class(&pair.positive),
        "negative_support": support,
        "volume": format_rational(&volume),
    });
    Ok(OutputDocument::new(config.command, result, vec![]))
}

fn cmd_surface_body(config: &RunConfig) -> Result<OutputDocument> {
    let model = load::<ModelDoc>(&config.input)?.to_model()?;
    let class = load::<ClassDoc>(required(&config.divisor, "divisor")?)?.to_class()?;
    let flag = load::<SurfaceFlagDoc>(required(&config.flag, "flag")?)?.to_flag(&model)?;
    let out = surface::limiting_body(&model, &class, &flag)?;
    let diagnostics = out.diagnostics.clone();
    let result = serde_json::to_value(SurfaceBodyDoc::from_surface_body(&out))
        .map_err(|e| Error::Json(e.to_string()))?;
    let mut doc = OutputDocument::new(config.command, result, diagnostics);
    if out.body.is_empty() && config.svg.is_some() {
        return Err(Error::EmptyBody);
    }
    maybe_svg(config, &out.body, &mut doc)?;
    Ok(doc)
}

fn cmd_surface_volplus(config: &RunConfig) -> Result<OutputDocument> {
    no_svg_here(config)?;
    let model = load::<ModelDoc>(&config.input)?.to_model()?;
    let class = load::<ClassDoc>(required(&config.divisor, "divisor")?)?.to_class()?;
    let flag = load::<SurfaceFlagDoc>(required(&config.flag, "flag")?)?.to_flag(&model)?;
    let (curve_class, _, label) = model.resolve_flag_curve(&flag.curve)?;
    let value = surface::restricted_vol_plus(&model, &class, &curve_class)?;
    let result = json!({
        "curve": label,
        "value": format_rational(&value),
    });
    Ok(OutputDocument::new(config.command, result, vec![]))
}

fn cmd_semigroup_body(config: &RunConfig) -> Result<OutputDocument> {
    let data = load::<ValuationSetDoc>(&config.input)?.to_set()?;
    let body = semigroup::body_from_valuations(&data)?;
    let report = if data.is_empty() {
        Vec::new()
    } else {
        semigroup::truncation_report(&data)?
    };
    let report_value: Vec<Value> = report
        .iter()
        .map(|(level, distance)| {
            json!({
                "level": level,
                "distance": distance.to_string(),
                "distance_squared": format_rational(&distance.squared()),
            })
        })
        .collect();
    let result = json!({
        "body": BodyDoc::from_body(&body),
        "truncation_report": report_value,
    });
    let mut doc = OutputDocument::new(config.command, result, vec![]);
    if config.svg.is_some() {
        if body.is_empty() {
            return Err(Error::EmptyBody);
        }
        maybe_svg(config, &body, &mut doc)?;
    }
    Ok(doc)
}

/// Compares the polytope pipeline against the decomposition pipeline on a
/// single (fan, divisor, flag) triple.
fn xcheck_triple(
    fan: &toric::Fan,
    divisor: &toric::TorusDivisor,
    flag: &toric::InvariantFlag,
) -> Result<(Value, bool)> {
    let toric_body = toric::okounkov_body(fan, divisor, flag, BodyKind::Limiting)?;
    let link = bridge::surface_model_of_fan(fan)?;
    let class = link.divisor_class(fan, divisor);
    let surface_flag = link.surface_flag(flag)?;
    let surface_out = surface::limiting_body(&link.model, &class, &surface_flag)?;
    let equal = toric_body.polytope == surface_out.body.polytope;
    let value = json!({
        "verdict": if equal { "EQUAL" } else { "DIFFER" },
        "toric_body": BodyDoc::from_body(&toric_body),
        "surface_body": BodyDoc::from_body(&surface_out.body),
    });
    Ok((value, equal))
}

fn cmd_xcheck(config: &RunConfig) -> Result<OutputDocument> {
    no_svg_here(config)?;
    if config.input.is_dir() {
        return cmd_xcheck_batch(config);
    }
    let fan = load::<FanDoc>(&config.input)?.to_fan()?;
    let divisor = load::<DivisorDoc>(required(&config.divisor, "divisor")?)?.to_divisor()?;
    let flag = load::<FlagDoc>(required(&config.flag, "flag")?)?.to_flag();
    let (value, _) = xcheck_triple(&fan, &divisor, &flag)?;
    Ok(OutputDocument::new(config.command, value, vec![]))
}

/// Batch mode: every `<name>.fan.json` in the input directory with sibling
/// `<name>.divisor.json` and `<name>.flag.json` is checked; results go to
/// `<name>.xcheck.json` in the output directory, fanned out over threads.
fn cmd_xcheck_batch(config: &RunConfig) -> Result<OutputDocument> {
    let out_dir = required(&config.out, "out")?;
    if !out_dir.is_dir() {
        return Err(Error::Schema(format!(
            "--out must be a directory in batch mode, got {}",
            out_dir.display()
        )));
    }
    let mut names = Vec::new();
    let entries = std::fs::read_dir(&config.input)
        .map_err(|e| Error::Json(format!("cannot list {}: {e}", config.input.display())))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::Json(e.to_string()))?;
        let file_name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = file_name.strip_suffix(".fan.json") {
            names.push(stem.to_string());
        }
    }
    names.sort();
    let jobs = config.jobs.max(1);
    let dir = config.input.clone();
    let results: BTreeMap<String, Result<(Value, bool)>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in names.chunks(names.len().div_ceil(jobs).max(1)) {
            let dir = dir.clone();
            let chunk: Vec<String> = chunk.to_vec();
            handles.push(scope.spawn(move || {
                let mut acc = BTreeMap::new();
                for name in chunk {
                    let outcome = (|| {
                        let fan =
                            load::<FanDoc>(&dir.join(format!("{name}.fan.json")))?.to_fan()?;
                        let divisor =
                            load::<DivisorDoc>(&dir.join(format!("{name}.divisor.json")))?
                                .to_divisor()?;
                        let flag =
                            load::<FlagDoc>(&dir.join(format!("{name}.flag.json")))?.to_flag();
                        xcheck_triple(&fan, &divisor, &flag)
                    })();
                    acc.insert(name, outcome);
                }
                acc
            }));
        }
        let mut merged = BTreeMap::new();
        for handle in handles {
            merged.extend(handle.join().expect("xcheck worker panicked"));
        }
        merged
    });
    let mut summary = Vec::new();
    for (name, outcome) in results {
        match outcome {
            Ok((value, equal)) => {
                let doc = OutputDocument::new(config.command, value, vec![]);
                std::fs::write(out_dir.join(format!("{name}.xcheck.json")), doc.render())
                    .map_err(|e| Error::Json(e.to_string()))?;
                summary.push(json!({
                    "fixture": name,
                    "verdict": if equal { "EQUAL" } else { "DIFFER" },
                }));
            }
            Err(err) => {
                summary.push(json!({ "fixture": name, "error": err.to_string() }));
            }
        }
    }
    Ok(OutputDocument::new(
        config.command,
        json!({ "fixtures": summary, "jobs": jobs }),
        vec![],
    ))
}
