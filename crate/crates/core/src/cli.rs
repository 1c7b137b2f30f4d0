//! File-based experiment commands behind the `netlogic` binary.
//!
//! Each command writes its outputs plus a `run.json` manifest (command,
//! parameters, seed) into the output directory. Outputs depend only on
//! the inputs and parameters, so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::approximation::{
    alias_classes, approximate_with, write_approx_csv, ApproxOptions, Embedding,
};
use crate::error::{Error, Result};
use crate::expressiveness::{
    exhaust_capacity, find_indistinguishable_pair, write_capacity_csv, CapacityRecord,
};
use crate::logic::{Predicate, PredicateFamily, MAX_ATOMS};
use crate::net_compiler::{compile_net, verify_compilation, QuantizedNet};
use crate::pipeline::{null_space_report, run, write_summary_csv, write_trace_jsonl, PipelineFile};

/// How a command finished when it did not error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Ran to completion, but a result contradicts the predicted behaviour.
    Violation(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Violation(_) => 2,
        }
    }
}

pub const EXIT_CONFIG_ERROR: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Capacity,
    Compile,
    Pipeline,
    Metaphor,
}

/// Experiment description read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandName,
    #[serde(default)]
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityParams {
    pub w: usize,
    pub n_max: usize,
    /// Record wall-clock time per row (breaks byte-identical reruns).
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileParams {
    pub weights: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineParams {
    pub config: PathBuf,
    pub steps: usize,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaphorParams {
    pub targets: PathBuf,
    pub basis: PathBuf,
    #[serde(default = "default_true")]
    pub affine: bool,
    #[serde(default)]
    pub embedding: Embedding,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Capacity(CapacityParams),
    Compile(CompileParams),
    Pipeline(PipelineParams),
    Metaphor(MetaphorParams),
}

impl Command {
    pub fn name(&self) -> CommandName {
        match self {
            Command::Capacity(_) => CommandName::Capacity,
            Command::Compile(_) => CommandName::Compile,
            Command::Pipeline(_) => CommandName::Pipeline,
            Command::Metaphor(_) => CommandName::Metaphor,
        }
    }

    fn parameters(&self) -> serde_json::Value {
        match self {
            Command::Capacity(p) => json!(p),
            Command::Compile(p) => json!(p),
            Command::Pipeline(p) => json!(p),
            Command::Metaphor(p) => json!(p),
        }
    }

    /// Makes relative input paths relative to `base`.
    fn rebase(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self {
            Command::Capacity(_) => {}
            Command::Compile(p) => fix(&mut p.weights),
            Command::Pipeline(p) => fix(&mut p.config),
            Command::Metaphor(p) => {
                fix(&mut p.targets);
                fix(&mut p.basis);
            }
        }
        self
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("experiment config: {e}")))
    }

    /// Typed command; unknown or missing parameters are config errors.
    pub fn command(&self) -> Result<Command> {
        let params = serde_json::Value::Object(self.parameters.clone());
        let bad =
            |e: serde_json::Error| Error::Config(format!("{:?} parameters: {e}", self.command));
        Ok(match self.command {
            CommandName::Capacity => {
                Command::Capacity(serde_json::from_value(params).map_err(bad)?)
            }
            CommandName::Compile => Command::Compile(serde_json::from_value(params).map_err(bad)?),
            CommandName::Pipeline => {
                Command::Pipeline(serde_json::from_value(params).map_err(bad)?)
            }
            CommandName::Metaphor => {
                Command::Metaphor(serde_json::from_value(params).map_err(bad)?)
            }
        })
    }

    /// Loads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<(Self, Command)> {
        let text = fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        let cmd = cfg.command()?.rebase(base);
        Ok((cfg, cmd))
    }
}

pub fn execute(cmd: &Command, out: &Path, seed: u64) -> Result<Outcome> {
    fs::create_dir_all(out)?;
    let manifest = json!({
        "command": cmd.name(),
        "parameters": cmd.parameters(),
        "seed": seed,
    });
    fs::write(
        out.join("run.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    match cmd {
        Command::Capacity(p) => cmd_capacity(p, out),
        Command::Compile(p) => cmd_compile(p, out),
        Command::Pipeline(p) => cmd_pipeline(p, out),
        Command::Metaphor(p) => cmd_metaphor(p, out),
    }
}

/// Capacity rows for `n = w + 1 ..= n_max`; a violation if any row is
/// representable.
pub fn cmd_capacity(p: &CapacityParams, out: &Path) -> Result<Outcome> {
    if p.w == 0 {
        return Err(Error::Config("w must be at least 1".into()));
    }
    if p.n_max > MAX_ATOMS {
        return Err(Error::Config(format!(
            "n_max = {} exceeds {MAX_ATOMS}",
            p.n_max
        )));
    }
    if p.n_max < p.w + 1 {
        return Err(Error::Config(format!(
            "n_max = {} leaves no rows: n >= w + 1 = {} is required",
            p.n_max,
            p.w + 1
        )));
    }
    let records: Vec<CapacityRecord> = (p.w + 1..=p.n_max)
        .map(|n| exhaust_capacity(p.w, n).map(|r| r.record(p.timing)))
        .collect::<Result<_>>()?;
    let mut csv_bytes = Vec::new();
    write_capacity_csv(&records, &mut csv_bytes)?;
    fs::write(out.join("capacity.csv"), csv_bytes)?;
    fs::write(
        out.join("capacity.json"),
        serde_json::to_string_pretty(&records)? + "\n",
    )?;
    let bad: Vec<usize> = records
        .iter()
        .filter(|r| r.representable)
        .map(|r| r.n)
        .collect();
    Ok(if bad.is_empty() {
        Outcome::Success
    } else {
        Outcome::Violation(format!("counting predicate representable at n = {bad:?}"))
    })
}

pub fn cmd_compile(p: &CompileParams, out: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(&p.weights)?;
    let net = QuantizedNet::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", p.weights.display())),
        other => other,
    })?;
    let circuit = compile_net(&net)?;
    let check = verify_compilation(&circuit);
    let collision = find_indistinguishable_pair(&circuit);
    fs::write(out.join("circuit.jsonl"), circuit.export_jsonl())?;
    let outputs: Vec<_> = circuit
        .outputs()
        .iter()
        .map(|(y, pred)| json!({"y": y, "inputs": pred.count_true()}))
        .collect();
    let report = json!({
        "verified": check.verified,
        "first_mismatch": check.first_mismatch.as_ref().map(|m| json!({"input": m.input, "location": m.location})),
        "input_bits": net.input_bits(),
        "trace_bits": net.trace_bits(),
        "depth": net.depth(),
        "width": net.width(),
        "outputs": outputs,
        "collision": collision.map(|(x, y)| [x, y]),
    });
    fs::write(
        out.join("verification.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    if !check.verified {
        return Ok(Outcome::Violation(
            "compiled circuit disagrees with the network".into(),
        ));
    }
    if net.trace_bits() < net.input_bits() && collision.is_none() {
        return Ok(Outcome::Violation(
            "trace space smaller than input space but no collision".into(),
        ));
    }
    Ok(Outcome::Success)
}

pub fn cmd_pipeline(p: &PipelineParams, out: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(&p.config)?;
    let (cfg, seed) = PipelineFile::<f64>::from_json(&text)?.into_config()?;
    if p.steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    let traces = run(&cfg, &seed, p.steps)?;
    let mut jsonl = Vec::new();
    write_trace_jsonl(&traces, &mut jsonl)?;
    fs::write(out.join("trace.jsonl"), jsonl)?;
    let mut summary = Vec::new();
    write_summary_csv(&traces, &mut summary)?;
    fs::write(out.join("summary.csv"), summary)?;
    let report = null_space_report(&cfg);
    fs::write(
        out.join("null_space.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    Ok(Outcome::Success)
}

/// Reads one predicate record per nonblank line.
pub fn read_predicates(path: &Path) -> Result<Vec<Predicate>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            Predicate::from_json(l)
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn cmd_metaphor(p: &MetaphorParams, out: &Path) -> Result<Outcome> {
    let cfg_err = |e: Error| Error::Config(e.to_string());
    let targets = PredicateFamily::new("targets", read_predicates(&p.targets)?).map_err(cfg_err)?;
    let basis = PredicateFamily::new("basis", read_predicates(&p.basis)?).map_err(cfg_err)?;
    if targets.universe() != basis.universe() {
        return Err(Error::Config(format!(
            "targets have {} atoms, basis has {}",
            targets.universe().n_atoms(),
            basis.universe().n_atoms()
        )));
    }
    let opts = ApproxOptions {
        affine: p.affine,
        embedding: p.embedding,
    };
    let reports = targets
        .members()
        .iter()
        .map(|t| approximate_with::<f64>(t, &basis, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut csv_bytes = Vec::new();
    write_approx_csv(&reports, &mut csv_bytes)?;
    fs::write(out.join("metaphor.csv"), csv_bytes)?;
    fs::write(
        out.join("metaphor.json"),
        serde_json::to_string_pretty(&reports)? + "\n",
    )?;
    let classes = alias_classes(&basis, &targets, opts)?;
    fs::write(
        out.join("alias_classes.json"),
        serde_json::to_string_pretty(&classes)? + "\n",
    )?;
    Ok(Outcome::Success)
}
