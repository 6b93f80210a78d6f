use serde_json::{json, Map, Value};
use tlchan_core::channels::{QuantumChannel, TlChannel, Traced};
use tlchan_core::infoquant::{
    bistochastic_deviation, capacity_bounds, coherent_information, min_output_entropy, moe_theory_lower,
    q1_witness_ensemble, MoeStrategy,
};
use tlchan_core::linalg::{hermitian_eigenvalues, singular_values};
use tlchan_core::recoupling::{spectrum_mismatch, tensor_output_spectrum_bruteforce, tensor_output_spectrum_formula};
use tlchan_core::structure::{
    ebt_submatrix_witness, ebt_witness_vectors, haar_average_state, ppt_check, verify_degrading_identity, PptVerdict,
    PPT_ACCEPT, PPT_REJECT,
};
use tlchan_core::verify::{choi_theorem_distance, run_suite, Budget, Status, SUITES};
use tlchan_core::{AdmissibleTriple, Error, Result, TlRep};

use crate::output::{emit, json_text, spectrum_csv, Envelope, Format};
use crate::{Command, Common, Failed, Outcome, Source, Strategy, TracedArg};

const CHOI_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-8;
const SPECTRUM_TOL: f64 = 1e-8;
const DEGRADE_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-6;

pub fn run(command: Command) -> Result<Outcome> {
    let common = match &command {
        Command::Info(c) | Command::Choi(c) | Command::Ppt(c) | Command::Capacity(c) => c,
        Command::HaarSep(c) | Command::DegradeCheck(c) => c,
        Command::Moe { common, .. } | Command::TensorSpectrum { common, .. } | Command::Verify { common, .. } => common,
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match command {
        Command::Info(c) => info(&c),
        Command::Choi(c) => choi(&c),
        Command::Ppt(c) => ppt(&c),
        Command::Moe {
            common,
            strategy,
            iters,
        } => moe(&common, strategy, iters),
        Command::Capacity(c) => capacity(&c),
        Command::TensorSpectrum {
            common,
            second,
            i,
            source,
        } => tensor_spectrum(&common, second, i, source),
        Command::HaarSep(c) => haar_sep(&c),
        Command::DegradeCheck(c) => degrade_check(&c),
        Command::Verify {
            common,
            suite,
            max_label,
        } => verify(&common, &suite, max_label),
    }
}

impl Common {
    fn rep(&self) -> TlRep {
        TlRep::with_max_ambient(self.group, self.max_ambient)
    }

    fn triple(&self) -> Result<AdmissibleTriple> {
        let (k, l, m) = self
            .triple
            .ok_or_else(|| Error::InvalidArgument("--triple k,l,m is required".into()))?;
        AdmissibleTriple::new(k, l, m)
    }

    fn traced(&self) -> Traced {
        match self.traced {
            TracedArg::Left => Traced::Left,
            TracedArg::Right => Traced::Right,
        }
    }

    fn channel(&self, rep: &TlRep) -> Result<TlChannel> {
        TlChannel::build(rep, self.triple()?, self.traced())
    }

    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument("--seed is required for sampling commands".into()))
    }

    /// Multiplier applied to entropies before printing.
    fn unit(&self) -> f64 {
        if self.bits {
            1.0 / std::f64::consts::LN_2
        } else {
            1.0
        }
    }

    fn units(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    fn json_only(&self) -> Result<()> {
        match self.format {
            Format::Json => Ok(()),
            Format::Csv => Err(Error::InvalidArgument(
                "CSV output is only available for spectra (tensor-spectrum)".into(),
            )),
        }
    }

    fn envelope<'a>(&'a self, operation: &'a str, seed: Option<u64>, tolerances: &[(&str, f64)]) -> Envelope<'a> {
        Envelope {
            group: &self.group,
            triple: self.triple,
            traced: Some(match self.traced {
                TracedArg::Left => "left",
                TracedArg::Right => "right",
            }),
            operation,
            seed,
            tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), json!(v))).collect(),
        }
    }

    fn write(&self, envelope: Envelope<'_>, result: Value) -> Result<()> {
        emit(&json_text(&envelope.wrap(result)), self.out.as_deref())
    }
}

fn done(failure: Option<String>) -> Outcome {
    match failure {
        Some(why) => Outcome::Failed(Failed(why)),
        None => Outcome::Done,
    }
}

fn scale_fields(v: &mut Value, keys: &[&str], unit: f64) {
    for key in keys {
        if let Some(x) = v.get_mut(*key) {
            if let Some(f) = x.as_f64() {
                *x = json!(f * unit);
            } else if let Some(arr) = x.as_array_mut() {
                for y in arr {
                    if let Some(f) = y.as_f64() {
                        *y = json!(f * unit);
                    }
                }
            }
        }
    }
}

fn info(c: &Common) -> Result<Outcome> {
    c.json_only()?;
    let rep = c.rep();
    let ch = c.channel(&rep)?;
    let g = c.group;
    let t = ch.triple;
    let mut cap = serde_json::to_value(capacity_bounds(&ch)?).expect("serializable");
    scale_fields(&mut cap, &["q1_lower", "c_upper_list", "c_upper"], c.unit());
    let result = json!({
        "channel": ch.name(),
        "d_A": ch.d_a,
        "d_B": ch.d_b,
        "d_E": ch.d_e,
        "q": g.q,
        "theta": g.theta(t),
        "quantum_dimension_k": g.quantum_integer(t.k + 1),
        "capacity": cap,
        "moe_theory_lower": moe_theory_lower(&ch) * c.unit(),
        "units": c.units(),
    });
    c.write(c.envelope("info", None, &[]), result)?;
    Ok(Outcome::Done)
}

fn choi(c: &Common) -> Result<Outcome> {
    c.json_only()?;
    let rep = c.rep();
    let ch = c.channel(&rep)?;
    let tol = c.tol.unwrap_or(CHOI_TOL);
    let distance = choi_theorem_distance(&rep, &ch)?;
    let sv = singular_values(&ch.choi_factor());
    let nonzero: Vec<f64> = sv
        .iter()
        .filter(|s| **s > RANK_TOL)
        .map(|s| s * s / ch.d_a as f64)
        .collect();
    let rank = nonzero.len();
    let min = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
    let max = nonzero.iter().copied().fold(0.0, f64::max);
    let holds = distance <= tol && rank == ch.d_e;
    let result = json!({
        "distance": distance,
        "rank": rank,
        "d_env": ch.d_e,
        "eigenvalue_min": min,
        "eigenvalue_max": max,
        "expected_eigenvalue": 1.0 / ch.d_e as f64,
        "holds": holds,
    });
    c.write(
        c.envelope("choi", None, &[("distance", tol), ("rank", RANK_TOL)]),
        result,
    )?;
    Ok(done((!holds).then(|| {
        format!("Choi distance {distance:e}, rank {rank} vs {}", ch.d_e)
    })))
}

fn ppt(c: &Common) -> Result<Outcome> {
    c.json_only()?;
    let rep = c.rep();
    let ch = c.channel(&rep)?;
    let tol = c.tol.unwrap_or(PPT_ACCEPT);
    let report = ppt_check(&ch, tol)?;
    let verdict = report.verdict();
    let witness = match (verdict, ebt_witness_vectors(&ch)) {
        (PptVerdict::NotPpt, Ok(Some((v1, v2)))) => Some(ebt_submatrix_witness(&ch, &v1, &v2)?),
        _ => None,
    };
    let result = json!({
        "is_ppt": report.is_ppt,
        "verdict": match verdict {
            PptVerdict::Ppt => "ppt",
            PptVerdict::NotPpt => "not_ppt",
            PptVerdict::Indeterminate => "indeterminate",
        },
        "min_eigenvalue": report.min_eigenvalue,
        "witness_det": witness,
    });
    c.write(
        c.envelope("ppt", None, &[("accept", tol), ("reject", PPT_REJECT)]),
        result,
    )?;
    Ok(done((verdict == PptVerdict::Indeterminate).then(|| {
        format!("min eigenvalue {:e} falls in the dead band", report.min_eigenvalue)
    })))
}

fn moe(c: &Common, strategy: Strategy, iters: usize) -> Result<Outcome> {
    c.json_only()?;
    let rep = c.rep();
    let ch = c.channel(&rep)?;
    let (strategy, seed) = match strategy {
        Strategy::Witness => {
            let seed = c.seed.unwrap_or(0);
            (MoeStrategy::Witness { seed }, seed)
        }
        Strategy::Random => {
            let seed = c.seed()?;
            (
                MoeStrategy::RandomPure {
                    samples: c.samples,
                    seed,
                },
                seed,
            )
        }
        Strategy::Descent => {
            let seed = c.seed()?;
            (
                MoeStrategy::Descent {
                    iters,
                    samples: c.samples,
                    seed,
                },
                seed,
            )
        }
    };
    let report = min_output_entropy(&rep, &ch, strategy)?;
    let mut result = serde_json::to_value(&report).expect("serializable");
    scale_fields(
        &mut result,
        &["best_entropy", "theory_lower", "theory_upper_hint"],
        c.unit(),
    );
    result["units"] = json!(c.units());
    c.write(c.envelope("moe", Some(seed), &[("certify", 1e-8)]), result)?;
    Ok(Outcome::Done)
}

fn capacity(c: &Common) -> Result<Outcome> {
    c.json_only()?;
    let rep = c.rep();
    let ch = c.channel(&rep)?;
    let mut bounds = serde_json::to_value(capacity_bounds(&ch)?).expect("serializable");
    scale_fields(&mut bounds, &["q1_lower", "c_upper_list", "c_upper"], c.unit());
    let q1_witness = match q1_witness_ensemble(&rep, &ch) {
        Ok(rho) => Some(coherent_information(&ch, &rho)? * c.unit()),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let result = json!({
        "bounds": bounds,
        "bistochastic_deviation": bistochastic_deviation(&ch)?,
        "complement_bistochastic_deviation": bistochastic_deviation(&ch.complementary())?,
        "moe_theory_lower": moe_theory_lower(&ch) * c.unit(),
        "coherent_information_at_witness": q1_witness,
        "units": c.units(),
    });
    c.write(c.envelope("capacity", None, &[("bistochastic", 1e-10)]), result)?;
    Ok(Outcome::Done)
}

fn tensor_spectrum(c: &Common, second: (usize, usize, usize), i: usize, source: Source) -> Result<Outcome> {
    let rep = c.rep();
    let t1 = c.triple()?;
    let t2 = AdmissibleTriple::new(second.0, second.1, second.2)?;
    let tol = c.tol.unwrap_or(SPECTRUM_TOL);
    let formula = tensor_output_spectrum_formula(&rep, i, t1, t2)?;
    let brute = tensor_output_spectrum_bruteforce(&rep, i, t1, t2)?;
    let mismatch = spectrum_mismatch(&formula, &brute)?;
    let failure = if brute.flagged {
        Some("eigenvalue clusters do not match the irreducible summands".to_string())
    } else if mismatch > tol {
        Some(format!("formula and brute force differ by {mismatch:e}"))
    } else {
        None
    };
    match c.format {
        Format::Csv => emit(
            &spectrum_csv(match source {
                Source::Formula => &formula,
                Source::Bruteforce => &brute,
            }),
            c.out.as_deref(),
        )?,
        Format::Json => {
            let result = json!({
                "i": i,
                "second": [t2.k, t2.l, t2.m],
                "formula": formula,
                "bruteforce": brute,
                "mismatch": mismatch,
                "entropy": formula.entropy()? * c.unit(),
                "units": c.units(),
            });
            let mut env = c.envelope("tensor-spectrum", None, &[("mismatch", tol), ("cluster_gap", 1e-7)]);
            // the first factor is always left-traced and the second right-traced
            env.traced = None;
            c.write(env, result)?;
        }
    }
    Ok(done(failure))
}

fn haar_sep(c: &Common) -> Result<Outcome> {
    c.json_only()?;
    let t = c.triple()?;
    if t.k + t.m != t.l {
        return Err(Error::InvalidArgument(format!("haar-sep needs k = l - m, got {t}")));
    }
    let seed = c.seed()?;
    let rep = c.rep();
    let avg = haar_average_state(&rep, t.l, t.m, c.samples, seed)?;
    let min_ev = hermitian_eigenvalues(&avg.state)[0];
    let result = json!({
        "distance": avg.distance,
        "samples": avg.samples,
        "min_eigenvalue": min_ev,
    });
    c.write(c.envelope("haar-sep", Some(seed), &[("psd", PSD_TOL)]), result)?;
    Ok(done(
        (min_ev < -PSD_TOL).then(|| format!("average has eigenvalue {min_ev:e}")),
    ))
}

fn degrade_check(c: &Common) -> Result<Outcome> {
    c.json_only()?;
    let t = c.triple()?;
    if t.k != t.l + t.m {
        return Err(Error::InvalidArgument(format!(
            "degrade-check needs k = l + m, got {t}"
        )));
    }
    let tol = c.tol.unwrap_or(DEGRADE_TOL);
    let deviation = verify_degrading_identity(&c.rep(), t.l, t.m)?;
    let holds = deviation <= tol;
    c.write(
        c.envelope("degrade-check", None, &[("deviation", tol)]),
        json!({ "deviation": deviation, "holds": holds }),
    )?;
    Ok(done(
        (!holds).then(|| format!("degrading identity deviates by {deviation:e}")),
    ))
}

fn verify(c: &Common, suites: &[String], max_label: usize) -> Result<Outcome> {
    c.json_only()?;
    let names: Vec<String> = if suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        suites.to_vec()
    };
    let budget = Budget {
        max_label,
        max_ambient: c.max_ambient,
    };
    let mut lines = String::new();
    let (mut pass, mut fail, mut skip) = (0, 0, 0);
    for name in &names {
        for check in run_suite(name, c.group, &budget)? {
            match check.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::Skipped => skip += 1,
            }
            let mut v = serde_json::to_value(&check).expect("serializable");
            let mut row = Map::new();
            row.insert("group".into(), json!(c.group.label()));
            if let Value::Object(fields) = &mut v {
                row.append(fields);
            }
            lines.push_str(&serde_json::to_string(&Value::Object(row)).expect("serializable"));
            lines.push('\n');
        }
    }
    emit(&lines, c.out.as_deref())?;
    eprintln!("{pass} passed, {fail} failed, {skip} skipped");
    Ok(done((fail > 0).then(|| format!("{fail} checks failed"))))
}
