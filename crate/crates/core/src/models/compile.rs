//! Lowering of Trotter gates to CNOTs and single-qubit gates.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::qsim::{Block2, Gate, Pauli, PauliString};

/// `exp(-i angle/2 P)` as basis changes, a CNOT ladder and one Rz.
pub fn lower_rotation(generator: &PauliString, angle: f64) -> Result<Vec<Gate>> {
    let sign = generator.sign().ok_or(Error::NonRealPhase)?;
    let n = generator.n_qubits();
    let support = generator.support();
    if support.len() <= 1 {
        return Ok(vec![Gate::rotation(generator.clone(), angle)?]);
    }
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for &q in &support {
        match generator.get(q) {
            Pauli::X => {
                pre.push(Gate::hadamard(q));
                post.push(Gate::hadamard(q));
            }
            Pauli::Y => {
                pre.push(Gate::s_dagger(q));
                pre.push(Gate::hadamard(q));
                post.push(Gate::hadamard(q));
                post.push(Gate::s(q));
            }
            _ => {}
        }
    }
    let ladder: Vec<Gate> =
        support.windows(2).map(|w| Gate::Cnot { control: w[0], target: w[1] }).collect();
    let mut out = pre;
    out.extend(ladder.iter().cloned());
    out.push(Gate::rz(n, *support.last().unwrap(), sign * angle)?);
    out.extend(ladder.into_iter().rev());
    out.extend(post);
    Ok(out)
}

fn angle_of(block: &Block2, a: Pauli, b: Pauli) -> Option<f64> {
    let [qa, qb] = block.qubits();
    let mut found = None;
    for (p, theta) in block.rotations() {
        if p.get(qa) == a && p.get(qb) == b && p.weight() == 2 {
            if found.is_some() {
                return None;
            }
            found = Some(theta * p.sign()?);
        }
    }
    found
}

fn has_only(block: &Block2, labels: &[Pauli]) -> bool {
    let [qa, qb] = block.qubits();
    block.rotations().len() == labels.len()
        && block.rotations().iter().all(|(p, _)| p.weight() == 2 && p.get(qa) == p.get(qb) && labels.contains(&p.get(qa)))
}

/// Native circuit for a fused two-qubit block.
///
/// An XX+YY+ZZ block uses the 3-CNOT circuit (equal to the block times
/// the global phase `e^{iπ/4}`); an XX+YY block with equal angles uses the
/// 2-CNOT circuit; anything else is lowered rotation by rotation.
pub fn compile_block(block: &Block2, n_qubits: usize) -> Result<Vec<Gate>> {
    if block.rotations().is_empty() {
        return Err(Error::UnsupportedTerm("block has no rotation decomposition".into()));
    }
    let [a, b] = block.qubits();
    let cx = Gate::Cnot { control: a, target: b };
    if has_only(block, &[Pauli::X, Pauli::Y, Pauli::Z]) {
        let gx = angle_of(block, Pauli::X, Pauli::X);
        let gy = angle_of(block, Pauli::Y, Pauli::Y);
        let gz = angle_of(block, Pauli::Z, Pauli::Z);
        if let (Some(gx), Some(gy), Some(gz)) = (gx, gy, gz) {
            return Ok(vec![
                cx.clone(),
                Gate::rx(n_qubits, a, gx - FRAC_PI_2)?,
                Gate::hadamard(a),
                Gate::rz(n_qubits, b, gz)?,
                cx.clone(),
                Gate::hadamard(a),
                Gate::rz(n_qubits, b, -gy)?,
                cx,
                Gate::rx(n_qubits, a, FRAC_PI_2)?,
                Gate::rx(n_qubits, b, -FRAC_PI_2)?,
            ]);
        }
    }
    if has_only(block, &[Pauli::X, Pauli::Y]) {
        let gx = angle_of(block, Pauli::X, Pauli::X);
        let gy = angle_of(block, Pauli::Y, Pauli::Y);
        if let (Some(gx), Some(gy)) = (gx, gy) {
            if (gx - gy).abs() <= 1e-15 * gx.abs().max(1.0) {
                return Ok(vec![
                    Gate::rx(n_qubits, a, FRAC_PI_2)?,
                    Gate::rx(n_qubits, b, FRAC_PI_2)?,
                    cx.clone(),
                    Gate::rx(n_qubits, a, gx)?,
                    Gate::rz(n_qubits, b, gx)?,
                    cx,
                    Gate::rx(n_qubits, a, -FRAC_PI_2)?,
                    Gate::rx(n_qubits, b, -FRAC_PI_2)?,
                ]);
            }
        }
    }
    let mut out = Vec::new();
    for (p, theta) in block.rotations() {
        out.extend(lower_rotation(p, *theta)?);
    }
    Ok(out)
}

/// Lowers a circuit to CNOTs and single-qubit gates.
pub fn compile_native(gates: &[Gate], n_qubits: usize) -> Result<Vec<Gate>> {
    let mut out = Vec::new();
    for g in gates {
        g.validate(n_qubits)?;
        match g {
            Gate::PauliRotation { generator, angle } => out.extend(lower_rotation(generator, *angle)?),
            Gate::Unitary2(b) => out.extend(compile_block(b, n_qubits)?),
            other => out.push(other.clone()),
        }
    }
    Ok(out)
}

/// Lowers only Pauli rotations acting on three or more qubits, leaving
/// one- and two-qubit gates intact.
pub fn lower_wide_rotations(gates: &[Gate], n_qubits: usize) -> Result<Vec<Gate>> {
    let mut out = Vec::new();
    for g in gates {
        g.validate(n_qubits)?;
        match g {
            Gate::PauliRotation { generator, angle } if generator.weight() >= 3 => {
                out.extend(lower_rotation(generator, *angle)?)
            }
            other => out.push(other.clone()),
        }
    }
    Ok(out)
}

/// Number of CNOTs in a gate list.
pub fn cnot_count(gates: &[Gate]) -> usize {
    gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
}
