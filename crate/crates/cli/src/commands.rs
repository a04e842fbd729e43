//! Subcommand implementations.

use crate::instance::{brute_force_witness, load_instance, load_qip, InstanceKind};
use crate::summary::{num, write_file, write_summary};
use crate::CliError;
use rayon::prelude::*;
use std::path::Path;
use xzlab_core::clock::{compile, history_state_labeled, ClockBundle};
use xzlab_core::commit::{delta_estimate, logged_real_experiment, make_strategy, tv_experiment};
use xzlab_core::flatten::flatten;
use xzlab_core::mf::{run_vmf_trial, wrapper_law, MfSampler};
use xzlab_core::pauli::{parse_hamiltonian, write_hamiltonian, Hamiltonian, Metadata};
use xzlab_core::protocol::{
    analytic_acceptance, good_set_experiment, make_prover, run_repeated, run_session,
    wrong_state_for, SessionConfig,
};
use xzlab_core::seeds::{child_seed, rng_from};
use xzlab_core::sim::{
    expectation, parse_state_dump, write_circuit, write_state_dump, BasisString, ProductState,
    RealStateVector,
};
use xzlab_core::stats::{binomial_z_score, wilson_interval};

use rand::Rng;

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Internal(format!("reading {}: {e}", path.display())))
}

fn load_and_compile(
    instance_dir: &Path,
) -> Result<(crate::instance::InstanceBundle, ClockBundle), CliError> {
    let instance = load_instance(instance_dir)?;
    let bundle = compile(&instance.circuit).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((instance, bundle))
}

// ---------------------------------------------------------------------------
// compile-hamiltonian
// ---------------------------------------------------------------------------

pub fn cmd_compile(instance_dir: &Path, out_dir: &Path) -> Result<i32, CliError> {
    let (_, bundle) = load_and_compile(instance_dir)?;
    let base_meta = |component: &str| -> Metadata {
        let mut m = Metadata::new();
        m.insert("ell".into(), bundle.data_qubits().to_string());
        m.insert("ancillas".into(), bundle.ancilla_count().to_string());
        m.insert("clockT".into(), bundle.clock_qubits().to_string());
        m.insert("component".into(), component.into());
        m
    };
    let parts: [(&str, &Hamiltonian); 5] = [
        ("h_init", bundle.h_init()),
        ("h_clock", bundle.h_clock()),
        ("h_prop", bundle.h_prop()),
        ("h_final", bundle.h_final()),
        ("h_total", bundle.h_total()),
    ];
    println!(
        "compiled: ell = {}, ancillas = {}, T = {}, pre-expansion terms = {}",
        bundle.data_qubits(),
        bundle.ancilla_count(),
        bundle.clock_qubits(),
        bundle.pre_expansion_terms()
    );
    for (name, h) in parts {
        let text = write_hamiltonian(h, &base_meta(name.trim_start_matches("h_")));
        write_file(&out_dir.join(format!("{name}.ham")), &text)?;
        println!(
            "  {name}: {} Pauli terms, one-norm {:.6}",
            h.num_terms(),
            h.one_norm()
        );
    }
    println!(
        "  one-norm bound {:.1}, total one-norm {:.6}",
        bundle.one_norm_bound(),
        bundle.h_total().one_norm()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// witness
// ---------------------------------------------------------------------------

pub fn cmd_witness(instance_dir: &Path, out_dir: &Path) -> Result<i32, CliError> {
    let instance = load_instance(instance_dir)?;
    let (witness, acceptance) = brute_force_witness(&instance.circuit)?;
    write_file(&out_dir.join("witness.state"), &write_state_dump(&witness))?;
    println!(
        "best witness on {} qubit(s): acceptance probability {acceptance:.12}",
        witness.num_qubits()
    );
    write_summary(
        out_dir,
        "witness",
        &[
            ("type", "witness".into()),
            ("n", "1".into()),
            ("rate", num(acceptance)),
            ("qubits", witness.num_qubits().to_string()),
        ],
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// history-state
// ---------------------------------------------------------------------------

pub fn cmd_history_state(
    instance_dir: &Path,
    witness_file: Option<&Path>,
    out_dir: &Path,
) -> Result<i32, CliError> {
    let instance = load_instance(instance_dir)?;
    let (witness, label) = match witness_file {
        Some(path) => (
            parse_state_dump(&read_to_string(path)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
            path.display().to_string(),
        ),
        None => {
            let (w, _) = instance.resolve_witness()?;
            (w, "resolved witness".to_string())
        }
    };
    let circuit = &instance.circuit;
    let input = if circuit.ancilla_count() == 0 {
        witness
    } else {
        witness
            .tensor(&RealStateVector::zero_state(circuit.ancilla_count()).map_err(internal)?)
            .map_err(internal)?
    };
    let hs = history_state_labeled(circuit, &input, &label).map_err(internal)?;
    write_file(
        &out_dir.join("history.state"),
        &write_state_dump(hs.state()),
    )?;
    println!(
        "history state over {} time steps on {} qubits ({label})",
        hs.clock_qubits() + 1,
        hs.state().num_qubits()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// mf-run
// ---------------------------------------------------------------------------

pub fn cmd_mf_run(
    hamiltonian_path: &Path,
    state_path: &Path,
    trials: u64,
    locality: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<i32, CliError> {
    let (h, _) = parse_hamiltonian(&read_to_string(hamiltonian_path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", hamiltonian_path.display())))?;
    let state = parse_state_dump(&read_to_string(state_path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", state_path.display())))?;
    let sampler = MfSampler::new(&h, locality).map_err(|e| CliError::Usage(e.to_string()))?;

    let energy =
        expectation(&state, sampler.hamiltonian()).map_err(|e| CliError::Usage(e.to_string()))?;
    let predicted = wrapper_law(energy, sampler.hamiltonian().one_norm(), sampler.locality());

    // First trial serially to surface errors, then parallel counting.
    run_vmf_trial(&sampler, &state, child_seed(seed, "mf-trial", 0)).map_err(internal)?;
    let accepts: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            run_vmf_trial(&sampler, &state, child_seed(seed, "mf-trial", i))
                .expect("validated trial") as u64
        })
        .sum();

    let rate = accepts as f64 / trials as f64;
    let z = binomial_z_score(accepts, trials, predicted);
    let (lo, hi) = wilson_interval(accepts, trials, 1.96);
    println!("trials        {trials}");
    println!("accepts       {accepts}");
    println!("rate          {rate:.6}  (95% Wilson [{lo:.6}, {hi:.6}])");
    println!("analytic      {predicted:.6}  (energy {energy:.6})");
    println!("z-score       {z:+.3}");
    write_summary(
        out_dir,
        "mf-run",
        &[
            ("type", "mf-run".into()),
            ("n", trials.to_string()),
            ("accepts", accepts.to_string()),
            ("rate", num(rate)),
            ("predicted", num(predicted)),
            ("z", format!("{z:.4}")),
            ("energy", num(energy)),
        ],
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

pub fn cmd_flatten(instance_dir: &Path, out_dir: &Path) -> Result<i32, CliError> {
    let instance = load_instance(instance_dir)?;
    if instance.kind != InstanceKind::Qip {
        return Err(CliError::Usage(
            "flatten needs an instance of kind 'qip'".into(),
        ));
    }
    // Re-load the raw bundle so the written circuit is the unpadded fold.
    let manifest = read_to_string(&instance_dir.join("manifest.txt"))?;
    let qip_rel = manifest
        .lines()
        .filter_map(|l| l.trim().strip_prefix("qip "))
        .next()
        .ok_or_else(|| CliError::Usage("manifest missing 'qip' entry".into()))?;
    let qip = load_qip(&instance_dir.join(qip_rel.trim()))?;
    let flat = flatten(&qip).map_err(internal)?;
    write_file(
        &out_dir.join("flattened.circ"),
        &write_circuit(flat.circuit()),
    )?;
    println!(
        "flattened verifier: {} witness qubit(s) [A={} B={} C={}], {} ancilla(s) [R={} D={} O=1], {} gates",
        flat.witness_qubits(),
        qip.reg_a(),
        qip.reg_b(),
        qip.reg_c(),
        flat.ancilla_qubits(),
        qip.rand_len(),
        qip.reg_d(),
        flat.circuit().num_gates()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// binding-exp
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn cmd_binding_exp(
    strategy: &str,
    qubits: usize,
    state_file: Option<&Path>,
    bases_spec: Option<&str>,
    samples: u64,
    pairs: u64,
    seed: u64,
    out_dir: &Path,
) -> Result<i32, CliError> {
    let state = match state_file {
        Some(path) => parse_state_dump(&read_to_string(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut rng = rng_from(child_seed(seed, "sigma", 0));
            let amps: Vec<f64> = (0..(1usize << qubits))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            RealStateVector::from_amplitudes_normalized(amps).map_err(internal)?
        }
    };
    let n = state.num_qubits();
    let bits: Vec<bool> = match bases_spec {
        Some(spec) => {
            if spec.len() != n || spec.chars().any(|c| c != '0' && c != '1') {
                return Err(CliError::Usage(format!(
                    "--bases must be {n} characters of 0 (Z) / 1 (X)"
                )));
            }
            spec.chars().map(|c| c == '1').collect()
        }
        None => {
            let mut rng = rng_from(child_seed(seed, "bases", 0));
            (0..n).map(|_| rng.random()).collect()
        }
    };
    let basis = BasisString::from_bits(&bits);
    let sigma = ProductState::single(state);

    // Validate the name once up front.
    make_strategy(strategy).map_err(|e| CliError::Usage(e.to_string()))?;
    let factory = || make_strategy(strategy).expect("validated strategy");

    // A couple of fully logged sessions for inspection.
    for i in 0..2u64 {
        let mut s = factory();
        let (_, log) =
            logged_real_experiment(&mut *s, 16, &basis, &sigma, child_seed(seed, "logged", i))
                .map_err(internal)?;
        write_file(
            &out_dir.join(format!("binding-{strategy}-session-{i}.log")),
            &log.serialize(),
        )?;
    }

    let delta = delta_estimate(
        factory,
        16,
        &basis,
        &sigma,
        samples,
        child_seed(seed, "delta", 0),
    )
    .map_err(internal)?;
    let tv = tv_experiment(
        factory,
        16,
        &basis,
        &sigma,
        pairs,
        child_seed(seed, "tv", 0),
    )
    .map_err(internal)?;

    // Calibrated bound shape TV <= C sqrt(delta), with a Monte Carlo floor
    // for the delta = 0 regime.
    let bound_c = 2.0;
    let bound = (bound_c * delta.delta_hat.sqrt()).max(0.01);
    let within = tv.tv <= bound;

    println!("strategy      {strategy}");
    println!("basis         {basis}");
    for (label, rejections, nn, (lo, hi)) in &delta.per_basis {
        println!("reject[{label:>5}] {rejections}/{nn}  (95% Wilson [{lo:.4}, {hi:.4}])");
    }
    println!("delta-hat     {:.4}", delta.delta_hat);
    println!("tv(real,ideal) {:.4}  over {} pairs", tv.tv, tv.pairs);
    println!(
        "bound         {bound:.4} = max({bound_c} * sqrt(delta), 0.01)  -> {}",
        if within { "within" } else { "VIOLATED" }
    );
    write_summary(
        out_dir,
        &format!("binding-{strategy}"),
        &[
            ("type", "binding-exp".into()),
            ("strategy", strategy.into()),
            ("n", pairs.to_string()),
            ("rate", num(tv.tv)),
            ("predicted", num(bound)),
            (
                "z",
                if within {
                    "ok".into()
                } else {
                    "violated".into()
                },
            ),
            ("delta", num(delta.delta_hat)),
        ],
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// protocol-run
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn cmd_protocol_run(
    instance_dir: &Path,
    prover_name: &str,
    lambda: usize,
    reps: usize,
    sessions: u64,
    good_set: bool,
    copy_cap: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<i32, CliError> {
    let (instance, bundle) = load_and_compile(instance_dir)?;
    let (witness, witness_acceptance) = instance.resolve_witness()?;
    let circuit = &instance.circuit;
    let input = if circuit.ancilla_count() == 0 {
        witness.clone()
    } else {
        witness
            .tensor(&RealStateVector::zero_state(circuit.ancilla_count()).map_err(internal)?)
            .map_err(internal)?
    };
    let per_copy = history_state_labeled(circuit, &input, "instance witness")
        .map_err(internal)?
        .into_state();
    let config = SessionConfig::new(
        &bundle,
        lambda,
        instance.declared_c,
        instance.declared_s,
        copy_cap,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    // Analytic prediction for the provers whose committed state we know.
    let predicted = match prover_name {
        "honest" => Some(analytic_acceptance(&config, &per_copy).map_err(internal)?),
        "wrong-state" => {
            Some(analytic_acceptance(&config, &wrong_state_for(&bundle)).map_err(internal)?)
        }
        _ => None,
    };

    println!(
        "instance      {} ({:?}, label {:?})",
        instance_dir.display(),
        instance.kind,
        instance.label
    );
    println!(
        "parameters    lambda {lambda}, copies {}, threshold {:.6}, l = {} qubits",
        config.copies(),
        config.threshold(),
        config.total_qubits()
    );
    println!("witness       acceptance {witness_acceptance:.6}");
    if let Some(a) = &predicted {
        println!(
            "analytic      per-copy {:.6} (energy {:.6}), session {:.6}",
            a.per_copy_accept, a.per_copy_energy, a.session_accept
        );
    }

    // Sequential repetition with transcripts.
    let mut prover = make_prover(prover_name, &bundle, &per_copy, config.copies())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let (outcomes, all_accept) = run_repeated(
        &config,
        &mut *prover,
        reps,
        child_seed(seed, "prover", 0),
        child_seed(seed, "verifier", 0),
    )
    .map_err(internal)?;
    for (i, outcome) in outcomes.iter().enumerate() {
        write_file(
            &out_dir.join(format!("transcript-rep-{i:03}.log")),
            &outcome.transcript.serialize(),
        )?;
    }
    let rep_accepts = outcomes.iter().filter(|o| o.accepted).count();
    println!(
        "repetition    {rep_accepts}/{reps} sessions accepted, conjunction {}",
        if all_accept { "ACCEPT" } else { "REJECT" }
    );

    // Optional independent-session statistics.
    let mut stats_fields: Vec<(&str, String)> = vec![
        ("type", "protocol-run".into()),
        ("prover", prover_name.into()),
        ("lambda", lambda.to_string()),
        ("copies", config.copies().to_string()),
        ("reps", reps.to_string()),
        ("rep_accepts", rep_accepts.to_string()),
        (
            "verdict",
            if all_accept {
                "accept".into()
            } else {
                "reject".into()
            },
        ),
    ];
    if sessions > 0 {
        let accepts: u64 = (0..sessions)
            .into_par_iter()
            .map(|i| {
                let mut p = make_prover(prover_name, &bundle, &per_copy, config.copies())
                    .expect("validated prover");
                run_session(
                    &config,
                    &mut *p,
                    child_seed(seed, "stat-p", i),
                    child_seed(seed, "stat-v", i),
                )
                .expect("session")
                .accepted as u64
            })
            .sum();
        let rate = accepts as f64 / sessions as f64;
        let (lo, hi) = wilson_interval(accepts, sessions, 1.96);
        println!(
            "sessions      {accepts}/{sessions} accepted, rate {rate:.4} (95% Wilson [{lo:.4}, {hi:.4}])"
        );
        stats_fields.push(("n", sessions.to_string()));
        stats_fields.push(("rate", num(rate)));
        if let Some(a) = &predicted {
            let z = binomial_z_score(accepts, sessions, a.session_accept);
            println!(
                "z-score       {z:+.3} against analytic {:.4}",
                a.session_accept
            );
            stats_fields.push(("predicted", num(a.session_accept)));
            stats_fields.push(("z", format!("{z:.4}")));
        }
    } else {
        stats_fields.push(("n", reps.to_string()));
        stats_fields.push(("rate", num(rep_accepts as f64 / reps as f64)));
        if let Some(a) = &predicted {
            stats_fields.push(("predicted", num(a.session_accept)));
        }
    }
    write_summary(out_dir, &format!("protocol-{prover_name}"), &stats_fields)?;

    if good_set {
        let report = good_set_experiment(
            &config,
            || {
                make_prover(prover_name, &bundle, &per_copy, config.copies())
                    .expect("validated prover")
            },
            16,
            32,
            128,
            child_seed(seed, "good-set", 0),
        )
        .map_err(internal)?;
        println!(
            "good-set      fraction {:.4} (threshold {:.4}, delta-hat {:.4}, Markov bound {:.4})",
            report.good_fraction, report.threshold, report.delta_hat, report.markov_bound
        );
        for (i, (accepts, n, (lo, hi))) in report.per_s1.iter().enumerate() {
            println!("  s1[{i:02}]      {accepts}/{n}  (95% Wilson [{lo:.4}, {hi:.4}])");
        }
        write_summary(
            out_dir,
            &format!("good-set-{prover_name}"),
            &[
                ("type", "good-set".into()),
                ("prover", prover_name.into()),
                ("n", report.per_s1.len().to_string()),
                ("rate", num(report.good_fraction)),
                ("predicted", num(report.markov_bound)),
                ("delta", num(report.delta_hat)),
            ],
        )?;
    }

    // Exit code 1 signals a rejected conjunction (NO-path runs).
    Ok(if all_accept { 0 } else { 1 })
}
