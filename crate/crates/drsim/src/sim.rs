//! Event-driven simulation of one return-to-zero cycle.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::DrError;
use crate::gate::{eval, DelayModel, GateKind};
use crate::netlist::{DrNetlist, GateId, NetId};
use crate::value::DrValue;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    /// Time from applying the codeword until every primary output is valid.
    pub latency_s2c: f64,
    /// Time from returning the inputs to spacer until every primary output is spacer.
    pub latency_c2s: f64,
    pub output_values: Vec<DrValue>,
    /// First-valid time of each primary output.
    pub output_valid_times: Vec<f64>,
    /// Net value changes applied over both phases.
    pub events_fired: u64,
    /// Per gate (netlist order): did any output leave spacer during evaluation.
    pub activated: Vec<bool>,
}

impl SimResult {
    pub fn activated_count(&self, netlist: &DrNetlist, kind: GateKind) -> usize {
        netlist.gates().iter().zip(&self.activated).filter(|(g, &a)| a && g.kind == kind).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Event {
    time_bits: u64,
    seq: u64,
    net: NetId,
    value: DrValue,
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time_bits, self.seq).cmp(&(other.time_bits, other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable simulation state for one netlist. Single-threaded; clone one per worker.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    netlist: &'a DrNetlist,
    delays: DelayModel,
    event_budget: u64,
    values: Vec<DrValue>,
    projected: Vec<DrValue>,
    first_valid: Vec<f64>,
    last_change: Vec<f64>,
    activated: Vec<bool>,
    queue: BinaryHeap<Reverse<Event>>,
    seq: u64,
    fired: u64,
    in_buf: Vec<DrValue>,
    out_buf: Vec<DrValue>,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a DrNetlist, delays: DelayModel) -> Self {
        let nets = netlist.nets().len();
        Self {
            netlist,
            delays,
            event_budget: 64 * (nets as u64 + 16),
            values: vec![DrValue::SPACER; nets],
            projected: vec![DrValue::SPACER; nets],
            first_valid: vec![f64::NAN; nets],
            last_change: vec![0.0; nets],
            activated: vec![false; netlist.gates().len()],
            queue: BinaryHeap::new(),
            seq: 0,
            fired: 0,
            in_buf: Vec::new(),
            out_buf: Vec::new(),
        }
    }

    pub fn with_event_budget(mut self, budget: u64) -> Self {
        self.event_budget = budget;
        self
    }

    pub fn netlist(&self) -> &'a DrNetlist {
        self.netlist
    }

    /// First-valid time of `net` in the last evaluate phase, `None` if it stayed spacer.
    pub fn valid_time(&self, net: NetId) -> Option<f64> {
        let t = self.first_valid[net];
        (!t.is_nan()).then_some(t)
    }

    pub fn gate_activated(&self, gate: GateId) -> bool {
        self.activated[gate]
    }

    /// Runs spacer → `inputs` → spacer and reports both latencies.
    pub fn simulate_cycle(&mut self, inputs: &[DrValue]) -> Result<SimResult, DrError> {
        let pis = self.netlist.primary_inputs();
        if inputs.len() != pis.len() {
            return Err(DrError::InputCount { expected: pis.len(), got: inputs.len() });
        }
        if let Some(i) = inputs.iter().position(|v| !v.is_valid()) {
            return Err(DrError::IllegalInput(i));
        }
        self.first_valid.fill(f64::NAN);
        self.activated.fill(false);
        self.fired = 0;

        let result = self.evaluate_then_reset(inputs);
        if result.is_err() {
            self.values.fill(DrValue::SPACER);
            self.projected.fill(DrValue::SPACER);
            self.queue.clear();
        }
        result
    }

    fn evaluate_then_reset(&mut self, inputs: &[DrValue]) -> Result<SimResult, DrError> {
        let pis = self.netlist.primary_inputs();
        let pos = self.netlist.primary_outputs();
        for (&net, &v) in pis.iter().zip(inputs) {
            self.schedule(0.0, net, v);
        }
        self.run(true)?;
        let mut output_valid_times = Vec::with_capacity(pos.len());
        for &o in pos {
            match self.valid_time(o) {
                Some(t) => output_valid_times.push(t),
                None => return Err(DrError::Incomplete(self.netlist.nets()[o].name.clone())),
            }
        }
        let output_values: Vec<DrValue> = pos.iter().map(|&o| self.values[o]).collect();
        let latency_s2c = output_valid_times.iter().copied().fold(0.0, f64::max);

        self.last_change.fill(0.0);
        for &net in pis {
            self.schedule(0.0, net, DrValue::SPACER);
        }
        self.run(false)?;
        if let Some(net) = self.values.iter().position(|v| !v.is_spacer()) {
            return Err(DrError::NotReset(self.netlist.nets()[net].name.clone()));
        }
        let latency_c2s = pos.iter().map(|&o| self.last_change[o]).fold(0.0, f64::max);

        Ok(SimResult {
            latency_s2c,
            latency_c2s,
            output_values,
            output_valid_times,
            events_fired: self.fired,
            activated: self.activated.clone(),
        })
    }

    fn schedule(&mut self, time: f64, net: NetId, value: DrValue) {
        if self.projected[net] == value {
            return;
        }
        self.projected[net] = value;
        self.seq += 1;
        self.queue.push(Reverse(Event { time_bits: time.to_bits(), seq: self.seq, net, value }));
    }

    fn run(&mut self, evaluating: bool) -> Result<(), DrError> {
        let netlist = self.netlist;
        while let Some(Reverse(ev)) = self.queue.pop() {
            let t = f64::from_bits(ev.time_bits);
            if self.values[ev.net] == ev.value {
                continue;
            }
            self.fired += 1;
            if self.fired > self.event_budget {
                return Err(DrError::NonQuiescent(self.event_budget));
            }
            self.values[ev.net] = ev.value;
            if ev.value.is_illegal() {
                return Err(DrError::IllegalState { net: netlist.nets()[ev.net].name.clone(), time: t });
            }
            let driver = netlist.nets()[ev.net].driver;
            if evaluating {
                if ev.value.is_valid() && self.first_valid[ev.net].is_nan() {
                    self.first_valid[ev.net] = t;
                }
                if let Some(g) = driver {
                    self.activated[g] |= !ev.value.is_spacer();
                }
            } else {
                self.last_change[ev.net] = t;
            }
            for &g in &netlist.nets()[ev.net].fanout {
                let gate = &netlist.gates()[g];
                self.in_buf.clear();
                self.in_buf.extend(gate.inputs.iter().map(|p| {
                    let v = self.values[p.net];
                    if p.inverted {
                        v.inverted()
                    } else {
                        v
                    }
                }));
                self.out_buf.clear();
                self.out_buf.resize(gate.outputs.len(), DrValue::SPACER);
                eval(gate.kind, &self.in_buf, &mut self.out_buf);
                let at = t + self.delays.delay(gate.kind);
                for k in 0..gate.outputs.len() {
                    let v = self.out_buf[k];
                    self.schedule(at, gate.outputs[k], v);
                }
            }
        }
        Ok(())
    }
}

/// One-shot convenience wrapper around [`Simulator::simulate_cycle`].
pub fn simulate_cycle(
    netlist: &DrNetlist,
    inputs: &[DrValue],
    delays: &DelayModel,
) -> Result<SimResult, DrError> {
    Simulator::new(netlist, *delays).simulate_cycle(inputs)
}
