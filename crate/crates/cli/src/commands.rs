//! One function per subcommand. Each returns a finished report; `main` only
//! prints it and exits with its code.

use std::path::{Path, PathBuf};

use compat_core::classical::{
    check_equimarginal, check_theorem2, check_theorem3, check_wigner, reconstruct_joint, ClassicalVerdict,
    MarginalFamily,
};
use compat_core::linalg::{partial_trace, DensityMatrix};
use compat_core::lp::check_feasible;
use compat_core::quantum::{
    check_bell_wigner, check_family_equimarginal, check_q_equimarginal, counterexample_n4, gen_delta,
    probe_sufficiency, sample_density, ProbeOptions, ProbeStatus, ReducedFamily3, TOL_EQ,
};
use compat_core::spectra::{check_bravyi, check_coleman, check_higuchi, check_hzg, check_polygon, Spectrum};
use compat_core::Error;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Command, Criterion, Method};
use crate::formats::{
    self, density_json, joint_json, matrix_json, quantum3_json, spectrum, state_json, subset_json, Instance,
};
use crate::report::{classical_verdict_json, quantum_verdict_json, violation_json, Finished, Report};
use crate::{CliError, EXIT_INCOMPATIBLE, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, EXIT_UNDETERMINED};

type Result<T> = std::result::Result<T, CliError>;

/// Largest qubit count accepted by `sample`.
pub const MAX_SAMPLE_QUBITS: usize = 6;

/// Required agreement of the counterexample with its closed form.
const COUNTEREXAMPLE_EIG_TOL: f64 = 1e-9;
const COUNTEREXAMPLE_RESIDUAL_TOL: f64 = 1e-12;

pub fn run(cmd: &Command) -> Finished {
    let name = command_name(cmd);
    let mut report = Report::new(name);
    let result = match cmd {
        Command::CheckClassical { path, method } => check_classical(&mut report, path, *method),
        Command::Reconstruct { path, out } => reconstruct(&mut report, path, out.as_deref()),
        Command::CheckQuantum3 { path } => check_quantum3(&mut report, path),
        Command::Probe { path, max_iter, tol, seed, out } => {
            probe(&mut report, path, *max_iter, *tol, *seed, out.as_deref())
        }
        Command::CounterexampleN4 => counterexample(&mut report),
        Command::CheckSpectra { path, criterion, fermions } => check_spectra(&mut report, path, *criterion, *fermions),
        Command::Sample { qubits, rank, seed, count, out } => sample(&mut report, *qubits, *rank, *seed, *count, out),
        Command::GenDelta { path, subset } => run_gen_delta(&mut report, path, subset),
    };
    match result {
        Ok((verdict, code)) => report.finish(verdict, code),
        Err(e) => report.fail(&e),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::CheckClassical { .. } => "check-classical",
        Command::Reconstruct { .. } => "reconstruct",
        Command::CheckQuantum3 { .. } => "check-quantum3",
        Command::Probe { .. } => "probe",
        Command::CounterexampleN4 => "counterexample-n4",
        Command::CheckSpectra { .. } => "check-spectra",
        Command::Sample { .. } => "sample",
        Command::GenDelta { .. } => "gen-delta",
    }
}

type Verdict = (&'static str, u8);

fn compatible(ok: bool) -> Verdict {
    if ok {
        ("compatible", EXIT_OK)
    } else {
        ("incompatible", EXIT_INCOMPATIBLE)
    }
}

fn load_instance(report: &mut Report, path: &Path) -> Result<Instance> {
    let loaded = formats::load(path)?;
    report.set("input", path.display().to_string());
    report.set("input_digest", loaded.digest.clone());
    formats::parse_instance(&loaded.value)
}

fn wrong_kind(expected: &str, got: &Instance) -> CliError {
    CliError::Format(format!("expected a {expected} file, got {}", got.kind()))
}

fn load_classical(report: &mut Report, path: &Path) -> Result<MarginalFamily> {
    match load_instance(report, path)? {
        Instance::Classical(f) => Ok(f),
        other => Err(wrong_kind("classical_family", &other)),
    }
}

fn load_quantum3(report: &mut Report, path: &Path) -> Result<ReducedFamily3> {
    match load_instance(report, path)? {
        Instance::Quantum3(f) => Ok(f),
        other => Err(wrong_kind("quantum_family3", &other)),
    }
}

fn is_pairwise3(f: &MarginalFamily) -> bool {
    f.n() == 3 && f.len() == 3 && f.subsets().all(|s| s.len() == 2)
}

fn check_classical(report: &mut Report, path: &Path, method: Method) -> Result<Verdict> {
    let f = load_classical(report, path)?;
    check_equimarginal(&f).map_err(Error::NotEquimarginal)?;
    report.set("n", f.n());
    report.set("subsets", f.subsets().map(subset_json).collect::<Vec<_>>());

    let methods: Vec<Method> = match method {
        Method::All if is_pairwise3(&f) => vec![Method::Theorem2, Method::Theorem3, Method::Wigner, Method::Oracle],
        Method::All => vec![Method::Theorem2, Method::Theorem3, Method::Oracle],
        m => vec![m],
    };
    let mut checks = serde_json::Map::new();
    let mut verdicts = Vec::new();
    for m in methods {
        let (name, v) = match m {
            Method::Theorem2 => ("theorem2", classical_verdict_json(&check_theorem2(&f)?)),
            Method::Theorem3 => ("theorem3", classical_verdict_json(&check_theorem3(&f)?)),
            Method::Wigner => ("wigner", classical_verdict_json(&check_wigner(&f)?)),
            Method::Oracle => {
                let o = check_feasible(&f)?;
                let v = ClassicalVerdict { compatible: o.feasible, witness: None, certificate: o.solution };
                ("oracle", classical_verdict_json(&v))
            }
            Method::All => unreachable!("expanded above"),
        };
        verdicts.push(v["compatible"].as_bool().expect("verdicts carry a flag"));
        checks.insert(name.into(), v);
    }
    report.set("checks", Value::Object(checks));
    let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
    report.set("agree", agree);
    if !agree {
        return Ok(("mismatch", EXIT_MISMATCH));
    }
    Ok(compatible(verdicts[0]))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn reconstruct(report: &mut Report, path: &Path, out: Option<&Path>) -> Result<Verdict> {
    let f = load_classical(report, path)?;
    check_equimarginal(&f).map_err(Error::NotEquimarginal)?;
    let r = reconstruct_joint(&f)?;
    report.set("c_n_interval", json!([r.lower.to_string(), r.upper.to_string()]));
    report.set("top_coefficient", r.top_coefficient.to_string());
    report.set("joint", joint_json(&r.joint));

    // Round trip: every input table must be a marginal of the joint.
    let mut mismatched = Vec::new();
    for t in f.tables() {
        if r.joint.marginalize(t.subset())? != *t {
            mismatched.push(subset_json(t.subset()));
        }
    }
    report.set("round_trip", json!({ "verified": mismatched.is_empty(), "mismatched": mismatched }));
    if !mismatched.is_empty() {
        return Err(CliError::Mismatch("reconstructed joint does not reproduce the input marginals".into()));
    }
    if let Some(out) = out {
        write_json(out, &joint_json(&r.joint))?;
        report.set("out", out.display().to_string());
    }
    Ok(("compatible", EXIT_OK))
}

fn check_quantum3(report: &mut Report, path: &Path) -> Result<Verdict> {
    let f = load_quantum3(report, path)?;
    let eq = check_q_equimarginal(&f);
    report.set("equimarginality", json!({ "equimarginal": eq.equimarginal, "max_deviation": eq.max_deviation }));
    if !eq.equimarginal {
        report.set("error", format!("reduced states are not equimarginal (max deviation {:e})", eq.max_deviation));
        return Ok(("not_equimarginal", EXIT_INPUT));
    }
    let v = check_bell_wigner(&f)?;
    report.set("bell_wigner", quantum_verdict_json(&v));
    Ok(if v.passes { ("passes", EXIT_OK) } else { ("fails", EXIT_INCOMPATIBLE) })
}

/// `<dir>/<stem>.candidate.json` for input `<dir>/<stem>.json`.
pub fn default_candidate_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "probe".into());
    input.with_file_name(format!("{stem}.candidate.json"))
}

/// Largest entrywise gap between the reductions of `rho` and the family.
pub fn reduction_mismatch(rho: &DensityMatrix, f: &ReducedFamily3) -> Result<f64> {
    let mut worst = 0.0f64;
    for (s, r) in f.members() {
        worst = worst.max(partial_trace(rho, s)?.matrix().max_abs_diff(r.matrix()));
    }
    Ok(worst)
}

fn probe(
    report: &mut Report,
    path: &Path,
    max_iter: usize,
    tol: f64,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<Verdict> {
    if max_iter == 0 {
        return Err(CliError::Format("--max-iter must be positive".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Format(format!("--tol must be a positive number, got {tol}")));
    }
    report.set("seed", seed);
    report.set("max_iter", max_iter);
    report.set("tol", tol);
    let f = load_quantum3(report, path)?;
    let r = probe_sufficiency(&f, &ProbeOptions { max_iter, tol, seed })?;
    report.set("status", r.status.name());
    report.set("iterations", r.iterations);
    report.set("residual", r.residual);
    match (r.status, r.candidate) {
        (ProbeStatus::Reconstructed, Some(rho)) => {
            report.set("candidate_reduction_mismatch", reduction_mismatch(&rho, &f)?);
            let target = out.map(Path::to_path_buf).unwrap_or_else(|| default_candidate_path(path));
            write_json(&target, &density_json(&rho))?;
            report.set("candidate", target.display().to_string());
            Ok(("reconstructed", EXIT_OK))
        }
        _ => Ok(("undetermined", EXIT_UNDETERMINED)),
    }
}

fn counterexample(report: &mut Report) -> Result<Verdict> {
    let c = counterexample_n4()?;
    report.set("state", state_json(&c.state));
    report.set("delta1", matrix_json(&c.delta1));
    report.set("min_eig", c.min_eig);
    report.set("eigenvector", state_json(&c.eigenvector));
    report.set("overlap", c.overlap);
    report.set("closed_form_residual", c.closed_form_residual);
    let checks = json!({
        "min_eig": (c.min_eig + 0.5).abs() <= COUNTEREXAMPLE_EIG_TOL,
        "overlap": c.overlap >= 1.0 - COUNTEREXAMPLE_EIG_TOL,
        "closed_form": c.closed_form_residual < COUNTEREXAMPLE_RESIDUAL_TOL,
    });
    let ok = checks.as_object().expect("object").values().all(|v| v == &Value::Bool(true));
    report.set("self_checks", checks);
    Ok(if ok { ("negative_eigenvalue", EXIT_OK) } else { ("mismatch", EXIT_MISMATCH) })
}

/// A qubit spectrum given either as its smaller eigenvalue `[λ]` or in
/// full as `[λ, 1 - λ]`.
fn smaller_eigenvalue(s: &[f64]) -> Result<f64> {
    match s {
        [l] => Ok(*l),
        [_, _] => Ok(spectrum(s, true)?.values()[0]),
        _ => Err(CliError::Format(format!("qubit spectrum {s:?} must have one or two entries"))),
    }
}

fn check_spectra(
    report: &mut Report,
    path: &Path,
    flag: Option<Criterion>,
    fermions_flag: Option<usize>,
) -> Result<Verdict> {
    let (file_criterion, spectra, file_fermions) = match load_instance(report, path)? {
        Instance::Spectra { criterion, spectra, fermions } => (criterion, spectra, fermions),
        other => return Err(wrong_kind("spectra", &other)),
    };
    let criterion = match (flag, file_criterion.as_deref()) {
        (Some(c), Some(f)) if c.name() != f => {
            return Err(CliError::Format(format!("--criterion {} conflicts with file criterion {f:?}", c.name())))
        }
        (Some(c), _) => c,
        (None, Some(f)) => Criterion::from_str_name(f)?,
        (None, None) => return Err(CliError::Format("no criterion given in the file or by --criterion".into())),
    };
    report.set("criterion", criterion.name());
    let count = |k: usize| {
        if spectra.len() == k {
            Ok(())
        } else {
            Err(CliError::Format(format!("{} needs {k} spectra, got {}", criterion.name(), spectra.len())))
        }
    };
    let (ok, failed) = match criterion {
        Criterion::Polygon => {
            let lams = spectra.iter().map(|s| smaller_eigenvalue(s)).collect::<Result<Vec<_>>>()?;
            let v = check_polygon(&lams)?;
            (v.compatible, v.failed_inequality)
        }
        Criterion::Higuchi => {
            count(3)?;
            let s = spectra.iter().map(|s| spectrum(s, true)).collect::<Result<Vec<_>>>()?;
            let v = check_higuchi(&s[0], &s[1], &s[2])?;
            (v.compatible, v.failed_inequality)
        }
        Criterion::Bravyi => {
            count(3)?;
            let v = check_bravyi(
                smaller_eigenvalue(&spectra[0])?,
                smaller_eigenvalue(&spectra[1])?,
                &spectrum(&spectra[2], true)?,
            )?;
            (v.compatible, v.failed_inequality)
        }
        Criterion::Hzg => {
            let m = spectra[0].len();
            let s = spectra.iter().map(|s| spectrum(s, true)).collect::<Result<Vec<Spectrum>>>()?;
            report.set("necessary_only", true);
            report.set("m", m);
            let v = check_hzg(&s, m)?;
            report.set("consistent_with_necessity", v.consistent_with_necessity);
            (v.consistent_with_necessity, v.failed_inequality)
        }
        Criterion::Coleman => {
            count(1)?;
            let n = fermions_flag
                .or(file_fermions)
                .ok_or_else(|| CliError::Format("coleman needs --fermions or a \"fermions\" field".into()))?;
            report.set("fermions", n);
            let v = check_coleman(&spectrum(&spectra[0], true)?, n)?;
            (v.compatible, v.failed_inequality)
        }
    };
    report.set("compatible", ok);
    report.set("failed_inequality", failed.as_ref().map(violation_json));
    if criterion == Criterion::Hzg && ok {
        return Ok(("consistent_with_necessity", EXIT_OK));
    }
    Ok(compatible(ok))
}

impl Criterion {
    fn from_str_name(s: &str) -> Result<Self> {
        <Criterion as clap::ValueEnum>::from_str(s, false)
            .map_err(|_| CliError::Format(format!("unknown criterion {s:?}")))
    }
}

/// Worker pool honoring `MC_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Format(format!("MC_THREADS={v:?} is not a positive integer")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Io(format!("thread pool: {e}")))
}

/// Per-sample seeds: consecutive outputs of ChaCha8 seeded with `seed`.
pub fn sample_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

struct SampleOutput {
    state_file: String,
    family_file: Option<String>,
    min_eig: Option<f64>,
    max_eig: Option<f64>,
    passes: Option<bool>,
}

fn sample(report: &mut Report, n: usize, rank: Option<usize>, seed: u64, count: usize, out: &Path) -> Result<Verdict> {
    report.set("seed", seed);
    if n == 0 || n > MAX_SAMPLE_QUBITS {
        return Err(CliError::Format(format!("--qubits must be in 1..={MAX_SAMPLE_QUBITS}, got {n}")));
    }
    if count == 0 {
        return Err(CliError::Format("--count must be positive".into()));
    }
    let rank = rank.unwrap_or(1 << n);
    report.set("qubits", n);
    report.set("rank", rank);
    report.set("count", count);
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    report.set("out", out.display().to_string());

    let seeds = sample_seeds(seed, count);
    let results: Vec<Result<SampleOutput>> = thread_pool()?.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(k, s)| {
                let rho = sample_density(n, rank, *s)?;
                let state_file = format!("state_{k:04}.json");
                write_json(&out.join(&state_file), &density_json(&rho))?;
                if n != 3 {
                    return Ok(SampleOutput {
                        state_file,
                        family_file: None,
                        min_eig: None,
                        max_eig: None,
                        passes: None,
                    });
                }
                let fam = ReducedFamily3::from_state(&rho)?;
                let family_file = format!("family_{k:04}.json");
                write_json(&out.join(&family_file), &quantum3_json(&fam))?;
                let v = check_bell_wigner(&fam)?;
                Ok(SampleOutput {
                    state_file,
                    family_file: Some(family_file),
                    min_eig: Some(v.min_eig),
                    max_eig: Some(v.max_eig),
                    passes: Some(v.passes),
                })
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    report.set(
        "files",
        results
            .iter()
            .map(|r| json!({ "state": r.state_file, "family": r.family_file, "delta_min_eig": r.min_eig, "delta_max_eig": r.max_eig }))
            .collect::<Vec<_>>(),
    );
    if n != 3 {
        return Ok(("written", EXIT_OK));
    }
    let failed = results.iter().filter(|r| r.passes == Some(false)).count();
    let lo = results.iter().filter_map(|r| r.min_eig).fold(f64::INFINITY, f64::min);
    let hi = results.iter().filter_map(|r| r.max_eig).fold(f64::NEG_INFINITY, f64::max);
    report.set(
        "bell_wigner_summary",
        json!({ "passed": count - failed, "failed": failed, "min_eig": lo, "max_eig": hi }),
    );
    // Reductions of a genuine state must pass; a failure is a defect.
    Ok(if failed == 0 { ("passes", EXIT_OK) } else { ("mismatch", EXIT_MISMATCH) })
}

fn run_gen_delta(report: &mut Report, path: &Path, subset: &[usize]) -> Result<Verdict> {
    let (n, states) = match load_instance(report, path)? {
        Instance::QuantumN { n, states } => (n, states),
        other => return Err(wrong_kind("quantum_family_n", &other)),
    };
    let a = formats::parse_subset(&json!(subset), n)?;
    report.set("n", n);
    report.set("subset", subset_json(a));
    let dev = check_family_equimarginal(&states)?;
    report.set("equimarginality", json!({ "equimarginal": dev <= TOL_EQ, "max_deviation": dev }));
    let d = gen_delta(&states, a, n)?;
    report.set("min_eig", d.min_eig);
    report.set("max_eig", d.max_eig);
    report.set("operator", matrix_json(&d.operator));
    Ok(("computed", EXIT_OK))
}
