//! Plain-text netlist: one gate per line, `#` comments.
//!
//! ```text
//! # qkt netlist
//! # kappa = 2.5000000000000000e0
//! # p = 1.5707963267948966e0
//! # n_kicks = 100
//! # level = IBMQ
//! # gates = 26 (cnot = 8, single-qubit = 18)
//! U1 1 -2.9376126440092953e0
//! CNOT 0 1
//! U3 1 1.0000000000000000e0 0.0000000000000000e0 2.0000000000000000e0
//! ```
//!
//! Angles are written with 17 significant digits so parsing reproduces the
//! exact `f64` values.

use std::fmt::Write as _;

use super::{Gate, GateSequence, Level};
use crate::error::{QktError, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NetlistHeader {
    pub kappa: Option<f64>,
    pub p: Option<f64>,
    pub n_kicks: Option<u64>,
    pub level: Option<Level>,
}

pub fn write_netlist(seq: &GateSequence, header: &NetlistHeader) -> String {
    let mut out = String::new();
    out.push_str("# qkt netlist\n");
    if let Some(k) = header.kappa {
        let _ = writeln!(out, "# kappa = {k:.16e}");
    }
    if let Some(p) = header.p {
        let _ = writeln!(out, "# p = {p:.16e}");
    }
    if let Some(n) = header.n_kicks {
        let _ = writeln!(out, "# n_kicks = {n}");
    }
    let _ = writeln!(out, "# level = {}", header.level.unwrap_or(seq.level));
    let _ = writeln!(
        out,
        "# gates = {} (cnot = {}, single-qubit = {})",
        seq.len(),
        seq.cnot_count(),
        seq.single_qubit_count()
    );
    for g in &seq.gates {
        let _ = writeln!(out, "{g}");
    }
    out
}

pub fn parse_netlist(text: &str) -> Result<(GateSequence, NetlistHeader)> {
    let mut header = NetlistHeader::default();
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            parse_header_line(comment.trim(), &mut header, line_no)?;
            continue;
        }
        let gate = parse_gate(line).map_err(|msg| QktError::Netlist { line: line_no, msg })?;
        gate.validate()
            .map_err(|e| QktError::Netlist { line: line_no, msg: e.to_string() })?;
        gates.push(gate);
    }
    let level = header.level.unwrap_or_else(|| infer_level(&gates));
    let seq = GateSequence { gates, level };
    seq.validate()?;
    Ok((seq, header))
}

fn infer_level(gates: &[Gate]) -> Level {
    if gates.iter().any(|g| matches!(g, Gate::U1(..) | Gate::U3 { .. })) {
        Level::Ibmq
    } else {
        Level::Rotation
    }
}

fn parse_header_line(comment: &str, header: &mut NetlistHeader, line: usize) -> Result<()> {
    let Some((key, value)) = comment.split_once('=') else {
        return Ok(());
    };
    let value = value.trim();
    let bad = |msg: String| QktError::Netlist { line, msg };
    match key.trim() {
        "kappa" => header.kappa = Some(value.parse().map_err(|e| bad(format!("kappa: {e}")))?),
        "p" => header.p = Some(value.parse().map_err(|e| bad(format!("p: {e}")))?),
        "n_kicks" => header.n_kicks = Some(value.parse().map_err(|e| bad(format!("n_kicks: {e}")))?),
        "level" => header.level = Some(value.parse().map_err(|e: QktError| bad(e.to_string()))?),
        _ => {}
    }
    Ok(())
}

fn parse_gate(line: &str) -> std::result::Result<Gate, String> {
    let mut parts = line.split_whitespace();
    let name = parts.next().ok_or("empty line")?;
    let args: Vec<&str> = parts.collect();
    let qubit = |s: &str| s.parse::<usize>().map_err(|e| format!("bad qubit {s:?}: {e}"));
    let angle = |s: &str| s.parse::<f64>().map_err(|e| format!("bad angle {s:?}: {e}"));
    let expect = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{name} takes {n} arguments, got {}", args.len()))
        }
    };
    match name.to_ascii_uppercase().as_str() {
        "CNOT" => {
            expect(2)?;
            Ok(Gate::Cnot { control: qubit(args[0])?, target: qubit(args[1])? })
        }
        "X" => {
            expect(1)?;
            Ok(Gate::X(qubit(args[0])?))
        }
        "RZ" => {
            expect(2)?;
            Ok(Gate::Rz(qubit(args[0])?, angle(args[1])?))
        }
        "RY" => {
            expect(2)?;
            Ok(Gate::Ry(qubit(args[0])?, angle(args[1])?))
        }
        "U1" => {
            expect(2)?;
            Ok(Gate::U1(qubit(args[0])?, angle(args[1])?))
        }
        "U3" => {
            expect(4)?;
            Ok(Gate::U3 {
                qubit: qubit(args[0])?,
                theta: angle(args[1])?,
                phi: angle(args[2])?,
                lambda: angle(args[3])?,
            })
        }
        other => Err(format!("unknown gate {other:?}")),
    }
}
