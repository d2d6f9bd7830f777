use std::fmt::Write as _;

use serde::Serialize;

use crate::error::DrError;
use crate::gate::{eval, DelayModel, GateKind};
use crate::value::DrValue;

pub type NetId = usize;
pub type GateId = usize;

/// A gate input: a net, optionally rail-swapped at zero cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Pin {
    pub net: NetId,
    pub inverted: bool,
}

impl Pin {
    pub fn inverted(self) -> Self {
        Self { inverted: !self.inverted, ..self }
    }
}

impl From<NetId> for Pin {
    fn from(net: NetId) -> Self {
        Self { net, inverted: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<Pin>,
    pub outputs: Vec<NetId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Net {
    pub name: String,
    pub driver: Option<GateId>,
    /// Gates reading this net, without duplicates.
    pub fanout: Vec<GateId>,
}

/// A validated combinational dual-rail netlist. Gates are stored in
/// topological order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrNetlist {
    name: String,
    nets: Vec<Net>,
    gates: Vec<Gate>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
}

impl DrNetlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.nets.iter().position(|n| n.name == name)
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Steady-state value of every net for `inputs`, which may contain spacers.
    pub fn evaluate(&self, inputs: &[DrValue]) -> Vec<DrValue> {
        assert_eq!(inputs.len(), self.inputs.len(), "one value per primary input");
        let mut values = vec![DrValue::SPACER; self.nets.len()];
        for (&net, &v) in self.inputs.iter().zip(inputs) {
            values[net] = v;
        }
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for g in &self.gates {
            ins.clear();
            ins.extend(g.inputs.iter().map(|p| if p.inverted { values[p.net].inverted() } else { values[p.net] }));
            outs.clear();
            outs.resize(g.outputs.len(), DrValue::SPACER);
            eval(g.kind, &ins, &mut outs);
            for (&o, &v) in g.outputs.iter().zip(&outs) {
                values[o] = v;
            }
        }
        values
    }

    /// Steady-state primary output values for `inputs`.
    pub fn evaluate_outputs(&self, inputs: &[DrValue]) -> Vec<DrValue> {
        let values = self.evaluate(inputs);
        self.outputs.iter().map(|&o| values[o]).collect()
    }

    /// Longest input-to-output path delay, an upper bound on any latency.
    pub fn critical_path(&self, delays: &DelayModel) -> f64 {
        let mut arrival = vec![0.0f64; self.nets.len()];
        for g in &self.gates {
            let t = g.inputs.iter().map(|p| arrival[p.net]).fold(0.0, f64::max)
                + delays.delay(g.kind);
            for &o in &g.outputs {
                arrival[o] = t;
            }
        }
        self.outputs.iter().map(|&o| arrival[o]).fold(0.0, f64::max)
    }

    /// Line-oriented listing: `input`/`output` headers, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names = |ids: &[NetId]| ids.iter().map(|&n| self.nets[n].name.as_str()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "netlist {}", self.name);
        let _ = writeln!(out, "input {}", names(&self.inputs));
        let _ = writeln!(out, "output {}", names(&self.outputs));
        for (i, g) in self.gates.iter().enumerate() {
            let ins: Vec<String> = g
                .inputs
                .iter()
                .map(|p| format!("{}{}", if p.inverted { "!" } else { "" }, self.nets[p.net].name))
                .collect();
            let _ = writeln!(out, "g{i} {} {} -> {}", g.kind, ins.join(" "), names(&g.outputs));
        }
        out
    }
}

/// Incremental netlist construction; [`NetlistBuilder::build`] validates.
#[derive(Debug, Clone, Default)]
pub struct NetlistBuilder {
    name: String,
    names: Vec<String>,
    gates: Vec<Gate>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn net(&mut self, name: impl Into<String>) -> NetId {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn input(&mut self, name: impl Into<String>) -> NetId {
        let id = self.net(name);
        self.inputs.push(id);
        id
    }

    pub fn is_input(&self, net: NetId) -> bool {
        self.inputs.contains(&net)
    }

    pub fn output(&mut self, net: NetId) {
        self.outputs.push(net);
    }

    /// Adds a gate driving freshly created nets and returns them.
    pub fn gate(&mut self, kind: GateKind, inputs: &[Pin]) -> Vec<NetId> {
        let g = self.gates.len();
        let outputs: Vec<NetId> = (0..kind.output_arity()).map(|k| self.net(format!("g{g}.{k}"))).collect();
        self.gates.push(Gate { kind, inputs: inputs.to_vec(), outputs: outputs.clone() });
        outputs
    }

    /// Single-output convenience wrapper around [`NetlistBuilder::gate`].
    pub fn gate1(&mut self, kind: GateKind, inputs: &[Pin]) -> NetId {
        self.gate(kind, inputs)[0]
    }

    /// Adds a gate driving existing nets. Nothing is checked until `build`.
    pub fn gate_into(&mut self, kind: GateKind, inputs: &[Pin], outputs: &[NetId]) {
        self.gates.push(Gate { kind, inputs: inputs.to_vec(), outputs: outputs.to_vec() });
    }

    pub fn rename(&mut self, net: NetId, name: impl Into<String>) {
        self.names[net] = name.into();
    }

    pub fn build(self) -> Result<DrNetlist, DrError> {
        let n = self.names.len();
        let mut driver: Vec<Option<GateId>> = vec![None; n];
        for &i in &self.inputs {
            if driver[i].is_some() || self.inputs.iter().filter(|&&x| x == i).count() > 1 {
                return Err(DrError::MultipleDrivers(self.names[i].clone()));
            }
            driver[i] = Some(usize::MAX);
        }
        for (gi, g) in self.gates.iter().enumerate() {
            let arity_ok = match g.kind.input_arity() {
                Some(a) => g.inputs.len() == a,
                None => !g.inputs.is_empty(),
            };
            if !arity_ok || g.outputs.len() != g.kind.output_arity() {
                return Err(DrError::Arity { gate: gi, kind: g.kind });
            }
            for p in &g.inputs {
                if p.net >= n {
                    return Err(DrError::UnknownNet(p.net));
                }
            }
            for &o in &g.outputs {
                if o >= n {
                    return Err(DrError::UnknownNet(o));
                }
                if driver[o].is_some() {
                    return Err(DrError::MultipleDrivers(self.names[o].clone()));
                }
                driver[o] = Some(gi);
            }
        }
        for g in &self.gates {
            for p in &g.inputs {
                if driver[p.net].is_none() {
                    return Err(DrError::Undriven(self.names[p.net].clone()));
                }
            }
        }
        for &o in &self.outputs {
            if o >= n {
                return Err(DrError::UnknownNet(o));
            }
            if driver[o].is_none() {
                return Err(DrError::Undriven(self.names[o].clone()));
            }
        }

        // Kahn's algorithm over gates.
        let gate_driver = |net: NetId| driver[net].filter(|&d| d != usize::MAX);
        let mut pending: Vec<usize> = self
            .gates
            .iter()
            .map(|g| g.inputs.iter().filter(|p| gate_driver(p.net).is_some()).count())
            .collect();
        let mut readers: Vec<Vec<GateId>> = vec![Vec::new(); n];
        for (gi, g) in self.gates.iter().enumerate() {
            for p in &g.inputs {
                readers[p.net].push(gi);
            }
        }
        let mut order: Vec<GateId> = (0..self.gates.len()).filter(|&g| pending[g] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let g = order[head];
            head += 1;
            for &o in &self.gates[g].outputs {
                for &r in &readers[o] {
                    pending[r] -= 1;
                    if pending[r] == 0 {
                        order.push(r);
                    }
                }
            }
        }
        if order.len() != self.gates.len() {
            let stuck = (0..self.gates.len()).find(|&g| pending[g] > 0).unwrap_or(0);
            return Err(DrError::Cycle(stuck));
        }

        let mut new_index = vec![0; self.gates.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut gates: Vec<Option<Gate>> = self.gates.into_iter().map(Some).collect();
        let gates: Vec<Gate> = order.iter().map(|&g| gates[g].take().expect("each gate once")).collect();
        let mut nets: Vec<Net> = self
            .names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Net { name, driver: gate_driver(i).map(|g| new_index[g]), fanout: Vec::new() })
            .collect();
        for (gi, g) in gates.iter().enumerate() {
            for p in &g.inputs {
                if !nets[p.net].fanout.contains(&gi) {
                    nets[p.net].fanout.push(gi);
                }
            }
        }
        Ok(DrNetlist { name: self.name, nets, gates, inputs: self.inputs, outputs: self.outputs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_driver_rejected() {
        let mut b = NetlistBuilder::new("bad");
        let a = b.input("a");
        let y = b.gate1(GateKind::Spinv, &[a.into()]);
        b.gate_into(GateKind::Spinv, &[a.into()], &[y]);
        assert!(matches!(b.build(), Err(DrError::MultipleDrivers(_))));
    }

    #[test]
    fn cycle_rejected() {
        let mut b = NetlistBuilder::new("loop");
        let a = b.input("a");
        let x = b.net("x");
        let y = b.gate1(GateKind::And2, &[a.into(), x.into()]);
        b.gate_into(GateKind::Spinv, &[y.into()], &[x]);
        b.output(y);
        assert!(matches!(b.build(), Err(DrError::Cycle(_))));
    }

    #[test]
    fn undriven_and_arity_rejected() {
        let mut b = NetlistBuilder::new("u");
        let x = b.net("floating");
        b.gate(GateKind::Spinv, &[x.into()]);
        assert!(matches!(b.build(), Err(DrError::Undriven(_))));

        let mut b = NetlistBuilder::new("a");
        let a = b.input("a");
        b.gate_into(GateKind::And2, &[a.into()], &[]);
        assert!(matches!(b.build(), Err(DrError::Arity { .. })));
    }

    #[test]
    fn gates_sorted_topologically_and_listed() {
        let mut b = NetlistBuilder::new("t");
        let a = b.input("a");
        let late = b.net("late");
        let y = b.gate1(GateKind::And2, &[a.into(), Pin::from(late).inverted()]);
        b.gate_into(GateKind::Spinv, &[a.into()], &[late]);
        b.rename(y, "y");
        b.output(y);
        let n = b.build().unwrap();
        assert_eq!(n.gates()[0].kind, GateKind::Spinv);
        assert_eq!(n.critical_path(&DelayModel::unit()), 2.0);
        let text = n.to_text();
        assert!(text.contains("input a"));
        assert!(text.contains("AND2 a !late -> y"), "{text}");
    }
}
