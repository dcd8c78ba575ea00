//! The `popa` command line. Every command writes one JSON object to
//! standard output (see `schemas/report.schema.json`) and exits with 0 on
//! pass, 1 on a failed verification and 2 on usage, domain or schema errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::apps::{
    evt_a, evt_e, fit_e, gev_cdf, gev_type, haar_invariance_check, haar_measure_mc, read_evt_csv, EvtParams,
    FitOptions, HaarJob, Side,
};
use crate::error::{Error, Result};
use crate::group::{Point, PopaGroup, RealGroup};
use crate::grv::{grv_eta, grv_g, grv_kernel, GrvProblem};
use crate::homs::{hom_residual_sweep, hom_validate, ClassifyOptions, Hom, HomSpec};
use crate::numerics::rel_dev;
use crate::radial::sum_witness;
use crate::report::Report;
use crate::scalar::{parse_list, Rational, Scalar};
use crate::scalar_homs::{bo_eval, BoMap, ExtParam};
use crate::schema::{parse_homspec, validate_report};
use crate::suite::{round_trip, run_criterion, run_suite, Criterion};

#[derive(Debug, Parser)]
#[command(name = "popa", version, about = "Popa circle groups: arithmetic, homomorphisms and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Seed for every random draw; defaults to $POPA_SEED, then 0.
    #[arg(long, env = "POPA_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvalOp {
    Circle,
    Inverse,
    Eta,
    Member,
    Power,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group arithmetic: x o y, inverses, eta, membership, powers.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[arg(long, value_enum, default_value = "circle")]
        op: EvalOp,
        /// Exponent for `--op power`.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Exact arithmetic; coordinates may be written `p/q`.
        #[arg(long)]
        rational: bool,
    },
    /// Validate a HomSpec and sweep the homomorphism residual.
    VerifyHom {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Classify a HomSpec from its evaluation map alone and compare.
    Classify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        probes: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Two-letter circle word reproducing u + v.
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        rational: bool,
    },
    /// Evaluate a scalar homomorphism from the 3x3 table. Parameters are
    /// `0`, a positive real, or `inf`.
    Bo {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Kernel limit K(x), g(x) and eta for a builtin problem.
    Grv {
        #[arg(long)]
        problem: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Extreme-value kernels, the GEV CDF and fitting.
    Evt {
        #[command(subcommand)]
        command: EvtCommand,
    },
    /// Monte Carlo Haar measure of a box, optionally with an invariance check.
    Haar {
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
        #[arg(long, default_value = "right")]
        side: Side,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Compare mu(B) with the measure of B translated by this element.
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[command(flatten)]
        seed: SeedArg,
        /// Emit a single JSON document instead of a summary.
        #[arg(long)]
        json: bool,
        /// Also load and validate this HomSpec file.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Run only these criteria (1 to 9).
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u32>,
    },
}

#[derive(Debug, Subcommand)]
enum EvtCommand {
    /// E(t) and A(t).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long)]
        t: f64,
    },
    /// GEV CDF and type.
    Gev {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Fit (kappa, gamma) to a two-column CSV `t,E_obs` with a header.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = -10.0)]
        gamma_lo: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 10.0)]
        gamma_hi: f64,
        /// Optional acceptance bound on the RMS residual.
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// What a command run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Body {
    passed: bool,
    fields: Map<String, Value>,
}

impl Body {
    fn new(passed: bool) -> Self {
        Body { passed, fields: Map::new() }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.fields.insert(key.to_string(), value);
        self
    }

    fn report(self, r: &Report) -> Self {
        let passed = self.passed && r.passed;
        let mut b = self.with("report", serde_json::to_value(r).expect("report serializes"));
        b.passed = passed;
        b
    }
}

/// Hash of the arguments and of every input file read.
struct Inputs(Sha256);

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.0.update(path.as_os_str().as_encoded_bytes());
        self.0.update([0]);
        self.0.update(text.as_bytes());
        Ok(text)
    }
}

/// Run with `args[0]` the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let (stdout, stderr) = if code == 0 { (e.to_string(), String::new()) } else { (String::new(), e.to_string()) };
            return Outcome { code, stdout, stderr };
        }
    };
    let mut inputs = Inputs(Sha256::new());
    for a in args.iter().skip(1) {
        inputs.0.update(a.as_encoded_bytes());
        inputs.0.update([0]);
    }
    let (name, seed) = describe(&cli.command);
    let text_summary = matches!(cli.command, Command::Selftest { json: false, .. });
    let result = dispatch(cli.command, &mut inputs);

    let mut envelope = Map::new();
    envelope.insert("command".into(), json!(name));
    envelope.insert("inputs_digest".into(), json!(hex::encode(inputs.0.finalize())));
    envelope.insert("seed".into(), json!(seed));
    let (code, mut stderr) = match result {
        Ok(body) => {
            envelope.insert("passed".into(), json!(body.passed));
            envelope.extend(body.fields);
            (if body.passed { 0 } else { 1 }, String::new())
        }
        Err(e) => {
            envelope.insert("passed".into(), json!(false));
            envelope.insert("error".into(), json!(e.to_string()));
            (2, format!("popa {name}: {e}\n"))
        }
    };
    envelope.insert("wall_time_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    let value = Value::Object(envelope);
    if let Err(e) = validate_report(&value) {
        return Outcome { code: 2, stdout: String::new(), stderr: format!("popa {name}: internal report error: {e}\n") };
    }
    let stdout = if text_summary && code != 2 {
        summary_text(&value)
    } else {
        format!("{}\n", serde_json::to_string(&value).expect("json serializes"))
    };
    if code == 1 {
        stderr.push_str(&format!("popa {name}: verification failed\n"));
    }
    Outcome { code, stdout, stderr }
}

fn describe(c: &Command) -> (&'static str, Option<u64>) {
    match c {
        Command::Eval { .. } => ("eval", None),
        Command::VerifyHom { seed, .. } => ("verify-hom", Some(seed.seed)),
        Command::Classify { seed, .. } => ("classify", Some(seed.seed)),
        Command::Witness { .. } => ("witness", None),
        Command::Bo { .. } => ("bo", None),
        Command::Grv { .. } => ("grv", None),
        Command::Evt { command } => match command {
            EvtCommand::Eval { .. } => ("evt eval", None),
            EvtCommand::Gev { .. } => ("evt gev", None),
            EvtCommand::Fit { .. } => ("evt fit", None),
        },
        Command::Haar { seed, .. } => ("haar", Some(seed.seed)),
        Command::Selftest { seed, .. } => ("selftest", Some(seed.seed)),
    }
}

fn dispatch(c: Command, inputs: &mut Inputs) -> Result<Body> {
    match c {
        Command::Eval { rho, x, y, op, n, rational } => {
            if rational {
                eval_cmd::<Rational>(&rho, &x, y.as_deref(), op, n)
            } else {
                eval_cmd::<f64>(&rho, &x, y.as_deref(), op, n)
            }
        }
        Command::VerifyHom { spec, pairs, seed, tol } => verify_hom(&load_spec(inputs, &spec)?, pairs, seed.seed, tol),
        Command::Classify { spec, probes, seed, tol } => {
            let spec = load_spec(inputs, &spec)?;
            let opts = ClassifyOptions { probes, seed: seed.seed, ..ClassifyOptions::default() };
            let rt = round_trip(&spec, &opts)?;
            let passed = rt.same_family && rt.deviation <= tol;
            Ok(Body::new(passed)
                .with("family", json!(rt.classified.family.to_string()))
                .with("spec", serde_json::to_value(&rt.classified.spec).expect("spec serializes"))
                .with("canonical", serde_json::to_value(&rt.canonical).expect("spec serializes"))
                .with("fit_residual", json!(rt.classified.fit_residual))
                .with("parameter_deviation", json!(finite_or_null(rt.deviation))))
        }
        Command::Witness { rho, u, v, rational } => {
            if rational {
                witness_cmd::<Rational>(&rho, &u, &v, 0.0)
            } else {
                witness_cmd::<f64>(&rho, &u, &v, 1e-12)
            }
        }
        Command::Bo { rho, sigma, kappa, t } => {
            let m = BoMap::new(ExtParam::parse(&rho)?, ExtParam::parse(&sigma)?, kappa);
            Ok(Body::new(true).with("psi", json!(bo_eval(&m, t)?)))
        }
        Command::Grv { problem, x } => {
            let p = GrvProblem::builtin(&problem)?;
            let x: Vec<f64> = parse_list(&x)?;
            let k = grv_kernel(&p, &x)?;
            let g = grv_g(&p, &x)?;
            let mut body = Body::new(k.converged && g.converged)
                .with("kernel", json!(k.value))
                .with("g", json!(g.scalar()))
                .with("steps", json!(k.steps))
                .with("t_final", json!(k.t_final));
            if p.dim == 1 {
                let eta = grv_eta(&*p.phi, &[1.0], x[0], &p.schedule)?;
                body = body.with("eta", json!(eta.scalar()));
            }
            if let Some(a) = &p.analytic {
                body = body.with("analytic", json!({"kernel": (a.kernel)(&x), "g": (a.g)(&x), "eta": (a.eta)(&x)}));
            }
            Ok(body)
        }
        Command::Evt { command } => evt_cmd(command, inputs),
        Command::Haar { rho, lo, hi, side, n, seed, translate } => {
            let g = RealGroup::real(&parse_list::<f64>(&rho)?)?;
            let job = HaarJob::new(g, parse_list(&lo)?, parse_list(&hi)?, side, n, seed.seed)?;
            let e = haar_measure_mc(&job);
            let body = Body::new(true).with("estimate", json!(e.estimate)).with("std_error", json!(e.std_error));
            match translate {
                Some(a) => Ok(body.report(&haar_invariance_check(&job, &parse_list::<f64>(&a)?)?)),
                None => Ok(body),
            }
        }
        Command::Selftest { seed, spec, criterion, .. } => {
            if let Some(path) = spec {
                let spec = load_spec(inputs, &path)?;
                Hom::new(spec)?;
            }
            let criteria: Vec<Criterion> = if criterion.is_empty() {
                run_suite(seed.seed)?.criteria
            } else {
                criterion.iter().map(|&id| run_criterion(seed.seed, id)).collect::<Result<_>>()?
            };
            let passed = criteria.iter().all(|c| c.passed);
            let summary: Vec<Value> = criteria
                .iter()
                .map(|c| json!({"id": c.id, "name": c.name, "passed": c.passed}))
                .collect();
            let reports: Vec<&Report> = criteria.iter().flat_map(|c| &c.reports).collect();
            Ok(Body::new(passed)
                .with("criteria", Value::Array(summary))
                .with("reports", serde_json::to_value(reports).expect("reports serialize")))
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn load_spec(inputs: &mut Inputs, path: &Path) -> Result<HomSpec> {
    let text = inputs.read(path)?;
    parse_homspec(&text).map_err(|e| match e {
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn points<S: Scalar>(rho: &str, list: &[&str]) -> Result<(PopaGroup<S>, Vec<Point<S>>)> {
    let g = PopaGroup::from_coeffs(parse_list::<S>(rho)?)?;
    let pts = list.iter().map(|s| Point::new(parse_list::<S>(s)?)).collect::<Result<Vec<_>>>()?;
    for p in &pts {
        g.check_dim(p)?;
    }
    Ok((g, pts))
}

/// Integral floats print as integers (`[7,10]`, not `[7.0,10.0]`).
fn tidy(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => json!(f as i64),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(tidy).collect()),
        other => other,
    }
}

fn eval_cmd<S: Scalar>(rho: &str, x: &str, y: Option<&str>, op: EvalOp, n: usize) -> Result<Body> {
    let (g, pts) = points::<S>(rho, &[x])?;
    let x = &pts[0];
    let result = match op {
        EvalOp::Circle => {
            let y = y.ok_or_else(|| Error::InvalidInput("--op circle needs --y".into()))?;
            let (_, ys) = points::<S>(rho, &[y])?;
            g.circle(x, &ys[0])?.to_json()
        }
        EvalOp::Inverse => g.inverse(x)?.to_json(),
        EvalOp::Eta => g.eta(x)?.to_json(),
        EvalOp::Member => json!(g.is_member(x)?),
        EvalOp::Power => g.power(x, n)?.to_json(),
    };
    Ok(Body::new(true).with("result", tidy(result)))
}

fn witness_cmd<S: Scalar>(rho: &str, u: &str, v: &str, tol: f64) -> Result<Body> {
    let (g, pts) = points::<S>(rho, &[u, v])?;
    let w = sum_witness(&g, &pts[0], &pts[1])?;
    let value = w.evaluate(&g)?;
    let dev = if value == w.target { 0.0 } else { rel_dev(&value.to_f64(), &w.target.to_f64()) };
    let mut r = Report::new("witness_reproduces_sum", tol);
    r.observe(dev, 0);
    Ok(Body::new(true).with("witness", w.to_json()).with("value", value.to_json()).report(&r.finish()))
}

fn verify_hom(spec: &HomSpec, pairs: usize, seed: u64, tol: f64) -> Result<Body> {
    let v = hom_validate(spec);
    if !v.passed {
        return Ok(Body::new(false).report(&v));
    }
    let hom = Hom::new(spec.clone())?;
    let mut r = hom_residual_sweep(&|x: &[f64]| hom.apply(x), hom.domain(), hom.codomain(), pairs, seed, tol);
    r.label = format!("hom_residual[{}]", spec.tag());
    Ok(Body::new(true).with("family", json!(spec.tag().to_string())).report(&r.with_seed(seed)))
}

fn evt_cmd(c: EvtCommand, inputs: &mut Inputs) -> Result<Body> {
    match c {
        EvtCommand::Eval { kappa, gamma, t } => {
            let p = EvtParams { kappa, gamma };
            Ok(Body::new(true).with("e", json!(evt_e(&p, t)?)).with("a", json!(evt_a(gamma, t)?)))
        }
        EvtCommand::Gev { gamma, x } => Ok(Body::new(true)
            .with("cdf", json!(gev_cdf(gamma, x)))
            .with("type", serde_json::to_value(gev_type(gamma)).expect("type serializes"))),
        EvtCommand::Fit { csv, gamma_lo, gamma_hi, tol } => {
            let text = inputs.read(&csv)?;
            let samples = read_evt_csv(text.as_bytes())?;
            let opts = FitOptions { gamma_lo, gamma_hi, ..FitOptions::default() };
            let fit = fit_e(&samples, &opts)?;
            let passed = tol.is_none_or(|t| fit.residual <= t);
            Ok(Body::new(passed)
                .with("kappa", json!(fit.params.kappa))
                .with("gamma", json!(fit.params.gamma))
                .with("residual", json!(fit.residual))
                .with("samples", json!(samples.len())))
        }
    }
}

fn summary_text(v: &Value) -> String {
    let mut out = String::new();
    if let Some(criteria) = v["criteria"].as_array() {
        for c in criteria {
            let mark = if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            out.push_str(&format!("criterion {}: {mark}  {}\n", c["id"], c["name"].as_str().unwrap_or("")));
        }
    }
    if let Some(reports) = v["reports"].as_array() {
        for r in reports.iter().filter(|r| r["passed"].as_bool() != Some(true)) {
            out.push_str(&format!(
                "  failed {}: max deviation {} > {} {}\n",
                r["label"].as_str().unwrap_or(""),
                r["max_deviation"],
                r["tolerance"],
                r["failures"]
            ));
        }
    }
    let ok = v["passed"].as_bool() == Some(true);
    out.push_str(&format!("selftest seed {}: {}\n", v["seed"], if ok { "PASS" } else { "FAIL" }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, Value) {
        let mut argv = vec!["popa"];
        argv.extend_from_slice(args);
        let out = run(argv);
        let v = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
        (out.code, v)
    }

    #[test]
    fn eval_example() {
        let (code, v) = go(&["eval", "--rho", "1,0", "--x", "1,2", "--y", "3,4"]);
        assert_eq!(code, 0);
        assert_eq!(v["result"], json!([7, 10]));
        assert_eq!(v["seed"], Value::Null);
        let (_, v) = go(&["eval", "--rational", "--rho", "1/2", "--x", "1/3", "--y", "-1/4"]);
        assert_eq!(v["result"], json!(["1/24"]));
    }

    #[test]
    fn bo_example() {
        let (code, v) = go(&["bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "3"]);
        assert_eq!(code, 0);
        assert_eq!(v["psi"], json!(3.0));
    }

    #[test]
    fn usage_and_domain_errors_exit_2() {
        assert_eq!(go(&["nonsense"]).0, 2);
        let (code, v) = go(&["eval", "--rho", "1", "--x", "-2", "--op", "inverse"]);
        assert_eq!(code, 2);
        assert!(v["error"].is_string());
        assert_eq!(go(&["bo", "--rho", "1", "--sigma", "1", "--kappa", "1", "--t", "-5"]).0, 2);
    }

    #[test]
    fn witness_fixed_case() {
        let (code, v) = go(&["witness", "--rational", "--rho", "1,0", "--u", "4,0", "--v", "-3,0"]);
        assert_eq!(code, 0);
        assert_eq!(v["value"], json!(["1", "0"]));
        assert_eq!(v["witness"]["case"], json!("case2"));
        assert_eq!(v["witness"]["delta"], json!("4/5"));
    }
}
