//! Instance bundles: a directory with a manifest plus either a raw circuit
//! or a proof bundle to flatten.
//!
//! Manifest (`manifest.txt`), one `key value` pair per line:
//!
//! ```text
//! kind circuit          # or: qip
//! label YES             # YES or NO
//! c 0.9921875           # declared per-copy completeness target
//! s 0.988               # declared per-copy soundness target
//! witness brute-force   # or: witness file <relative path>
//! circuit circuit.circ  # circuit kind
//! qip qip               # qip kind: subdirectory with u1/u2/v2 + manifest
//! ```
//!
//! A proof bundle directory holds `u1.circ`, `u2.circ`, `v2.circ`, and
//! `qip.manifest` with `reg_a`, `reg_b`, `reg_c`, `reg_d`, `rand_len`.

use crate::CliError;
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use xzlab_core::flatten::{flatten, PublicCoinQip};
use xzlab_core::sim::{parse_circuit, parse_state_dump, QuantumCircuit, RealStateVector};

pub const MAX_BRUTE_FORCE_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Circuit,
    Qip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Yes,
    No,
}

#[derive(Debug, Clone)]
pub enum WitnessSource {
    BruteForce,
    File(PathBuf),
}

/// A loaded instance: manifest fields plus the verifier circuit (flattened
/// when the instance is a proof bundle).
pub struct InstanceBundle {
    pub kind: InstanceKind,
    pub label: Label,
    pub declared_c: f64,
    pub declared_s: f64,
    pub witness: WitnessSource,
    pub circuit: QuantumCircuit,
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Internal(format!("reading {}: {e}", path.display())))
}

fn parse_kv(text: &str) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once(char::is_whitespace) {
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    map
}

fn required<'a>(
    map: &'a BTreeMap<String, String>,
    key: &str,
    ctx: &Path,
) -> Result<&'a str, CliError> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::Usage(format!("manifest {} missing '{key}'", ctx.display())))
}

fn parse_f64(value: &str, key: &str) -> Result<f64, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("bad value '{value}' for '{key}'")))
}

fn parse_usize(value: &str, key: &str) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("bad value '{value}' for '{key}'")))
}

/// Load a proof bundle directory into a [`PublicCoinQip`].
pub fn load_qip(dir: &Path) -> Result<PublicCoinQip, CliError> {
    let manifest = parse_kv(&read_to_string(&dir.join("qip.manifest"))?);
    let reg_a = parse_usize(required(&manifest, "reg_a", dir)?, "reg_a")?;
    let reg_b = parse_usize(required(&manifest, "reg_b", dir)?, "reg_b")?;
    let reg_c = parse_usize(required(&manifest, "reg_c", dir)?, "reg_c")?;
    let reg_d = parse_usize(required(&manifest, "reg_d", dir)?, "reg_d")?;
    let rand_len = parse_usize(required(&manifest, "rand_len", dir)?, "rand_len")?;
    let u1 = parse_circuit(&read_to_string(&dir.join("u1.circ"))?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.join("u1.circ").display())))?;
    let u2 = parse_circuit(&read_to_string(&dir.join("u2.circ"))?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.join("u2.circ").display())))?;
    let v2 = parse_circuit(&read_to_string(&dir.join("v2.circ"))?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.join("v2.circ").display())))?;
    PublicCoinQip::new(reg_a, reg_b, reg_c, reg_d, rand_len, u1, u2, v2)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))
}

/// Load an instance directory.
pub fn load_instance(dir: &Path) -> Result<InstanceBundle, CliError> {
    let manifest_path = dir.join("manifest.txt");
    let manifest = parse_kv(&read_to_string(&manifest_path)?);

    let kind = match required(&manifest, "kind", &manifest_path)? {
        "circuit" => InstanceKind::Circuit,
        "qip" => InstanceKind::Qip,
        other => {
            return Err(CliError::Usage(format!("unknown instance kind '{other}'")));
        }
    };
    let label = match required(&manifest, "label", &manifest_path)? {
        "YES" => Label::Yes,
        "NO" => Label::No,
        other => return Err(CliError::Usage(format!("unknown label '{other}'"))),
    };
    let declared_c = parse_f64(required(&manifest, "c", &manifest_path)?, "c")?;
    let declared_s = parse_f64(required(&manifest, "s", &manifest_path)?, "s")?;
    let witness = match required(&manifest, "witness", &manifest_path)? {
        "brute-force" => WitnessSource::BruteForce,
        spec => match spec.strip_prefix("file ") {
            Some(rel) => WitnessSource::File(dir.join(rel.trim())),
            None => {
                return Err(CliError::Usage(format!(
                    "witness must be 'brute-force' or 'file <path>', got '{spec}'"
                )))
            }
        },
    };

    let circuit = match kind {
        InstanceKind::Circuit => {
            let rel = required(&manifest, "circuit", &manifest_path)?;
            parse_circuit(&read_to_string(&dir.join(rel))?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", dir.join(rel).display())))?
        }
        InstanceKind::Qip => {
            let rel = required(&manifest, "qip", &manifest_path)?;
            let qip = load_qip(&dir.join(rel))?;
            flatten(&qip)
                .map_err(|e| CliError::Internal(format!("flatten: {e}")))?
                .into_circuit()
        }
    };
    // The clock compiler needs at least two gates; padding with a
    // self-inverse pair leaves the unitary unchanged.
    let circuit = circuit
        .padded_to_min_gates(2)
        .map_err(|e| CliError::Internal(e.to_string()))?;

    if matches!(witness, WitnessSource::BruteForce)
        && circuit.witness_qubits() > MAX_BRUTE_FORCE_QUBITS
    {
        return Err(CliError::Usage(format!(
            "brute-force witness supports at most {MAX_BRUTE_FORCE_QUBITS} witness qubits, instance has {}",
            circuit.witness_qubits()
        )));
    }

    Ok(InstanceBundle {
        kind,
        label,
        declared_c,
        declared_s,
        witness,
        circuit,
    })
}

impl InstanceBundle {
    /// Resolve the witness: load from file, or brute-force the top
    /// eigenvector of the acceptance operator.
    pub fn resolve_witness(&self) -> Result<(RealStateVector, f64), CliError> {
        match &self.witness {
            WitnessSource::File(path) => {
                let state = parse_state_dump(&read_to_string(path)?)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let p = self
                    .circuit
                    .acceptance_probability(&state)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                Ok((state, p))
            }
            WitnessSource::BruteForce => brute_force_witness(&self.circuit),
        }
    }
}

/// Top eigenpair of the acceptance operator
/// `A[x][y] = <out_x| Pi_1 |out_y>` over basis witness inputs with zeroed
/// ancillas. Returns the best witness and its acceptance probability.
pub fn brute_force_witness(circuit: &QuantumCircuit) -> Result<(RealStateVector, f64), CliError> {
    let w = circuit.witness_qubits();
    if w > MAX_BRUTE_FORCE_QUBITS {
        return Err(CliError::Usage(format!(
            "brute-force witness supports at most {MAX_BRUTE_FORCE_QUBITS} qubits, got {w}"
        )));
    }
    let dim = 1usize << w;
    let mut outs = Vec::with_capacity(dim);
    for x in 0..dim {
        let witness = RealStateVector::basis_state(w, x as u64)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let input = if circuit.ancilla_count() == 0 {
            witness
        } else {
            witness
                .tensor(
                    &RealStateVector::zero_state(circuit.ancilla_count())
                        .map_err(|e| CliError::Internal(e.to_string()))?,
                )
                .map_err(|e| CliError::Internal(e.to_string()))?
        };
        outs.push(
            circuit
                .run(&input)
                .map_err(|e| CliError::Internal(e.to_string()))?,
        );
    }
    let out_bit = 1usize << (circuit.num_qubits() - circuit.output_qubit());
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let mut acc = 0.0;
            for (idx, (&ai, &aj)) in outs[i]
                .amplitudes()
                .iter()
                .zip(outs[j].amplitudes())
                .enumerate()
            {
                if idx & out_bit != 0 {
                    acc += ai * aj;
                }
            }
            a[(i, j)] = acc;
            a[(j, i)] = acc;
        }
    }
    let eig = a.symmetric_eigen();
    let (mut best, mut best_idx) = (f64::NEG_INFINITY, 0);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    let vec: Vec<f64> = eig.eigenvectors.column(best_idx).iter().copied().collect();
    let witness = RealStateVector::from_amplitudes_normalized(vec)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok((witness, best.clamp(0.0, 1.0)))
}
