//! Netlist generators for the inference datapath: clause, population count,
//! magnitude comparator and their composition.

use serde::{Deserialize, Serialize};

use crate::gate::GateKind;
use crate::netlist::{DrNetlist, NetId, NetlistBuilder, Pin};
use crate::value::{encode_unsigned, DrValue};
use crate::DrError;

/// How partial clauses are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    /// Feature rows feed one AND stage each, in row order.
    #[default]
    Chain,
    /// Pairwise AND reduction of depth `ceil(log2 n)`.
    Balanced,
}

impl std::str::FromStr for Combiner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Self::Chain),
            "balanced" => Ok(Self::Balanced),
            other => Err(format!("unknown combiner `{other}` (expected chain|balanced)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClauseOptions {
    pub combiner: Combiner,
    /// Force the output to 0 when every literal is excluded (inference semantics).
    pub empty_is_zero: bool,
}

fn reduce(b: &mut NetlistBuilder, kind: GateKind, pins: &[Pin], combiner: Combiner) -> Pin {
    assert!(!pins.is_empty());
    match combiner {
        Combiner::Chain => pins[1..]
            .iter()
            .fold(pins[0], |acc, &p| b.gate1(kind, &[acc, p]).into()),
        Combiner::Balanced => {
            let mut level = pins.to_vec();
            while level.len() > 1 {
                level = level
                    .chunks(2)
                    .map(|c| if c.len() == 2 { b.gate1(kind, c).into() } else { c[0] })
                    .collect();
            }
            level[0]
        }
    }
}

/// Adds one clause: per feature `(e0 ∨ f) ∧ (e1 ∨ ¬f)`, then the combiner.
pub fn add_clause(b: &mut NetlistBuilder, f: &[Pin], e0: &[Pin], e1: &[Pin], opts: ClauseOptions) -> NetId {
    assert!(!f.is_empty() && f.len() == e0.len() && f.len() == e1.len());
    let partials: Vec<Pin> = (0..f.len())
        .map(|i| {
            let pos = b.gate1(GateKind::Or2, &[e0[i], f[i]]);
            let neg = b.gate1(GateKind::Or2, &[e1[i], f[i].inverted()]);
            b.gate1(GateKind::And2, &[pos.into(), neg.into()]).into()
        })
        .collect();
    let conj = reduce(b, GateKind::And2, &partials, opts.combiner);
    let out = if opts.empty_is_zero {
        let included: Vec<Pin> = e0.iter().chain(e1).map(|p| p.inverted()).collect();
        let nonempty = reduce(b, GateKind::Or2, &included, Combiner::Balanced);
        b.gate1(GateKind::And2, &[conj, nonempty]).into()
    } else {
        conj
    };
    debug_assert!(!out.inverted);
    out.net
}

/// Clause inputs in netlist order: `f[0..n]`, `e0[0..n]`, `e1[0..n]`.
///
/// `exclude` has `2n` entries, features then complements, so `e0[i] =
/// exclude[i]` masks literal `f[i]` and `e1[i] = exclude[n + i]` masks `¬f[i]`.
pub fn clause_codeword(features: &[bool], exclude: &[bool]) -> Vec<DrValue> {
    let n = features.len();
    assert_eq!(exclude.len(), 2 * n, "exclude mask must cover both literal polarities");
    features.iter().chain(exclude).map(|&b| DrValue::bit(b)).collect()
}

/// Input making every partial clause evaluate to 1 through the positive rails.
pub fn clause_worst_case(num_features: usize) -> Vec<DrValue> {
    let exclude: Vec<bool> = (0..2 * num_features).map(|l| l >= num_features).collect();
    clause_codeword(&vec![true; num_features], &exclude)
}

pub fn build_clause_netlist(num_features: usize) -> Result<DrNetlist, DrError> {
    build_clause_netlist_with(num_features, ClauseOptions::default())
}

pub fn build_clause_netlist_with(num_features: usize, opts: ClauseOptions) -> Result<DrNetlist, DrError> {
    if num_features == 0 {
        return Err(DrError::Config("a clause needs at least one feature".into()));
    }
    let mut b = NetlistBuilder::new(format!("clause{num_features}"));
    let f: Vec<Pin> = (0..num_features).map(|i| b.input(format!("f{i}")).into()).collect();
    let e0: Vec<Pin> = (0..num_features).map(|i| b.input(format!("e0_{i}")).into()).collect();
    let e1: Vec<Pin> = (0..num_features).map(|i| b.input(format!("e1_{i}")).into()).collect();
    let c = add_clause(&mut b, &f, &e0, &e1, opts);
    b.rename(c, "c");
    b.output(c);
    b.build()
}

/// Bits needed to hold `0..=max`.
pub fn width_for(max: u64) -> usize {
    (u64::BITS - max.leading_zeros()).max(1) as usize
}

struct Number {
    bits: Vec<Pin>,
    max: u64,
}

/// Four inputs: two half-adder layers, then the two weight-2 carries are
/// merged by an OR since they can never both be 1. Bit 0 passes a spacer
/// inverter (undone by a pin inversion downstream) so all three bits leave
/// the group one gate apart at most.
fn count4(b: &mut NetlistBuilder, x: &[Pin]) -> Number {
    let h1 = b.gate(GateKind::Ha, &[x[0], x[1]]);
    let h2 = b.gate(GateKind::Ha, &[x[2], x[3]]);
    let h3 = b.gate(GateKind::Ha, &[h1[0].into(), h2[0].into()]);
    let h4 = b.gate(GateKind::Ha, &[h1[1].into(), h2[1].into()]);
    let b1 = b.gate1(GateKind::Or2, &[h4[0].into(), h3[1].into()]);
    let b0 = b.gate1(GateKind::Spinv, &[h3[0].into()]);
    Number { bits: vec![Pin::from(b0).inverted(), b1.into(), h4[1].into()], max: 4 }
}

/// Ripple-carry sum of two numbers plus an optional carry-in bit.
fn add(b: &mut NetlistBuilder, x: &Number, y: &Number, cin: Option<Pin>) -> Number {
    let max = x.max + y.max + u64::from(cin.is_some());
    let width = width_for(max);
    let mut carry = cin;
    let mut bits = Vec::with_capacity(width);
    for i in 0..width {
        let mut ins: Vec<Pin> = [x.bits.get(i), y.bits.get(i)].into_iter().flatten().copied().collect();
        ins.extend(carry.take());
        match ins.len() {
            0 => break,
            1 => bits.push(ins[0]),
            2 | 3 => {
                let kind = if ins.len() == 2 { GateKind::Ha } else { GateKind::Fa };
                let out = b.gate(kind, &ins);
                bits.push(out[0].into());
                carry = (i + 1 < width).then_some(out[1].into());
            }
            _ => unreachable!(),
        }
    }
    Number { bits, max }
}

/// Adds a population count over `inputs`, returning little-endian sum bits of
/// width `ceil(log2(n + 1))`.
pub fn add_popcount(b: &mut NetlistBuilder, inputs: &[Pin]) -> Vec<NetId> {
    assert!(inputs.len() >= 2, "population count needs at least two inputs");
    let mut numbers: Vec<Number> = Vec::new();
    let chunks = inputs.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        numbers.push(count4(b, c));
    }
    let mut cin = None;
    match rest.len() {
        1 if numbers.is_empty() => unreachable!(),
        1 => cin = Some(rest[0]),
        2 => {
            let h = b.gate(GateKind::Ha, rest);
            numbers.push(Number { bits: vec![h[0].into(), h[1].into()], max: 2 });
        }
        3 => {
            let f = b.gate(GateKind::Fa, rest);
            numbers.push(Number { bits: vec![f[0].into(), f[1].into()], max: 3 });
        }
        _ => {}
    }
    while numbers.len() > 1 {
        let mut next = Vec::with_capacity(numbers.len().div_ceil(2));
        let mut it = numbers.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(add(b, &x, &y, cin.take())),
                None => next.push(x),
            }
        }
        numbers = next;
    }
    let mut total = numbers.pop().expect("at least one partial sum");
    if let Some(c) = cin {
        total = add(b, &total, &Number { bits: Vec::new(), max: 0 }, Some(c));
    }
    debug_assert_eq!(total.max, inputs.len() as u64);
    total
        .bits
        .into_iter()
        .map(|p| if p.inverted || b.is_input(p.net) { b.gate1(GateKind::Spinv, &[p.inverted()]) } else { p.net })
        .collect()
}

pub fn build_popcount_netlist(num_inputs: usize) -> Result<DrNetlist, DrError> {
    if num_inputs < 2 {
        return Err(DrError::Config("population count needs at least two inputs".into()));
    }
    let mut b = NetlistBuilder::new(format!("popcount{num_inputs}"));
    let x: Vec<Pin> = (0..num_inputs).map(|i| b.input(format!("x{i}")).into()).collect();
    for (k, y) in add_popcount(&mut b, &x).into_iter().enumerate() {
        b.rename(y, format!("y{k}"));
        b.output(y);
    }
    b.build()
}

/// MSB-first comparator chain computing `a >= b`. `a` and `b` are
/// little-endian; cell nets are named `{prefix}en{k}` and `{prefix}dec{k}`.
pub fn add_comparator(b: &mut NetlistBuilder, go: Pin, a: &[Pin], rhs: &[Pin], prefix: &str) -> NetId {
    assert!(!a.is_empty() && a.len() == rhs.len());
    let mut en = go;
    let mut merge_in = Vec::with_capacity(a.len() + 1);
    for k in (0..a.len()).rev() {
        let out = b.gate(GateKind::Comp1, &[en, a[k], rhs[k]]);
        b.rename(out[0], format!("{prefix}en{k}"));
        b.rename(out[1], format!("{prefix}dec{k}"));
        merge_in.push(out[1].into());
        en = out[0].into();
    }
    merge_in.push(en);
    b.gate1(GateKind::Merge, &merge_in)
}

pub fn build_comparator_netlist(width: usize) -> Result<DrNetlist, DrError> {
    if width == 0 {
        return Err(DrError::Config("comparator width must be at least 1".into()));
    }
    let mut b = NetlistBuilder::new(format!("comparator{width}"));
    let go = b.input("go");
    let a: Vec<Pin> = (0..width).map(|i| b.input(format!("a{i}")).into()).collect();
    let rhs: Vec<Pin> = (0..width).map(|i| b.input(format!("b{i}")).into()).collect();
    let y = add_comparator(&mut b, go.into(), &a, &rhs, "");
    b.rename(y, "y");
    b.output(y);
    b.build()
}

/// Comparator inputs in netlist order: `go`, `a` bits, `b` bits.
pub fn comparator_codeword(a: u64, rhs: u64, width: usize) -> Vec<DrValue> {
    let mut v = vec![DrValue::ONE];
    v.extend(encode_unsigned(a, width));
    v.extend(encode_unsigned(rhs, width));
    v
}

/// Equal operands force every cell to evaluate.
pub fn comparator_worst_case(width: usize) -> Vec<DrValue> {
    comparator_codeword(0, 0, width)
}

/// A complete single-class inference datapath.
#[derive(Debug, Clone)]
pub struct Datapath {
    pub netlist: DrNetlist,
    pub num_features: usize,
    pub negative: Vec<bool>,
    pub popcount_width: usize,
    /// Constant the popcount is compared against: the number of negative clauses.
    pub threshold: u64,
    pub clause_options: ClauseOptions,
}

/// Clauses share the feature inputs. Negative clause outputs are rail-swapped
/// so the popcount sees `P + (N_neg - Q)`, which reaches `N_neg` exactly when
/// the vote sum `P - Q` is non-negative.
pub fn build_datapath(num_features: usize, negative: &[bool], clause_options: ClauseOptions) -> Result<Datapath, DrError> {
    if num_features == 0 {
        return Err(DrError::Config("datapath needs at least one feature".into()));
    }
    if negative.len() < 2 {
        return Err(DrError::Config("datapath needs at least two clauses".into()));
    }
    let n = num_features;
    let mut b = NetlistBuilder::new(format!("datapath{}x{n}", negative.len()));
    let f: Vec<Pin> = (0..n).map(|i| b.input(format!("f{i}")).into()).collect();
    let mut votes = Vec::with_capacity(negative.len());
    for (j, &neg) in negative.iter().enumerate() {
        let e0: Vec<Pin> = (0..n).map(|i| b.input(format!("c{j}.e0_{i}")).into()).collect();
        let e1: Vec<Pin> = (0..n).map(|i| b.input(format!("c{j}.e1_{i}")).into()).collect();
        let c = add_clause(&mut b, &f, &e0, &e1, clause_options);
        b.rename(c, format!("clause{j}"));
        votes.push(if neg { Pin::from(c).inverted() } else { c.into() });
    }
    let go = b.input("go");
    let threshold = negative.iter().filter(|&&x| x).count() as u64;
    let width = width_for(negative.len() as u64);
    let rhs: Vec<Pin> = (0..width).map(|k| b.input(format!("t{k}")).into()).collect();
    let count = add_popcount(&mut b, &votes);
    for (k, &y) in count.iter().enumerate() {
        b.rename(y, format!("sum{k}"));
    }
    let count: Vec<Pin> = count.into_iter().map(Pin::from).collect();
    let y = add_comparator(&mut b, go.into(), &count, &rhs, "cmp.");
    b.rename(y, "y");
    b.output(y);
    Ok(Datapath {
        netlist: b.build()?,
        num_features: n,
        negative: negative.to_vec(),
        popcount_width: width,
        threshold,
        clause_options,
    })
}

impl Datapath {
    pub fn num_clauses(&self) -> usize {
        self.negative.len()
    }

    /// Inputs in netlist order: features, per-clause `e0`/`e1`, `go`, threshold bits.
    pub fn codeword(&self, features: &[bool], exclude: &[Vec<bool>]) -> Result<Vec<DrValue>, DrError> {
        let n = self.num_features;
        if features.len() != n {
            return Err(DrError::InputCount { expected: n, got: features.len() });
        }
        if exclude.len() != self.num_clauses() {
            return Err(DrError::InputCount { expected: self.num_clauses(), got: exclude.len() });
        }
        let mut v: Vec<DrValue> = features.iter().map(|&b| DrValue::bit(b)).collect();
        for ex in exclude {
            if ex.len() != 2 * n {
                return Err(DrError::InputCount { expected: 2 * n, got: ex.len() });
            }
            v.extend(ex.iter().map(|&b| DrValue::bit(b)));
        }
        v.push(DrValue::ONE);
        v.extend(encode_unsigned(self.threshold, self.popcount_width));
        Ok(v)
    }

    /// Every clause fires through its positive rails and the vote ties, so
    /// the comparator walks its full chain.
    pub fn worst_case(&self) -> Vec<DrValue> {
        let n = self.num_features;
        let exclude: Vec<bool> = (0..2 * n).map(|l| l >= n).collect();
        let all = vec![exclude; self.num_clauses()];
        self.codeword(&vec![true; n], &all).expect("shapes match by construction")
    }
}
