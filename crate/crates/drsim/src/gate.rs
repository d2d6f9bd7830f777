//! Dual-rail gate library. Every output rail is a monotone function of the
//! input rails, so outputs only rise while inputs rise (evaluate) and only
//! fall while inputs fall (reset).

use serde::{Deserialize, Serialize};

use crate::value::DrValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    /// `a ∧ b`; a single 0 input decides the output.
    And2,
    /// `a ∨ b`; a single 1 input decides the output.
    Or2,
    /// Half adder, outputs `[sum, carry]`.
    Ha,
    /// Full adder, outputs `[sum, carry]`; the carry is a majority vote and
    /// resolves as soon as two inputs agree.
    Fa,
    /// Buffered rail swap.
    Spinv,
    /// Comparator cell with inputs `[en, a, b]` and outputs `[en_next, dec]`.
    /// `en` is active on its positive rail only. When enabled, equal bits raise
    /// `en_next`; differing bits produce `dec = (a > b)`. A disabled cell stays
    /// in spacer.
    Comp1,
    /// Rail-wise OR of mutually exclusive dual-rail signals.
    Merge,
}

impl GateKind {
    pub const ALL: [GateKind; 7] =
        [Self::And2, Self::Or2, Self::Ha, Self::Fa, Self::Spinv, Self::Comp1, Self::Merge];

    /// Expected input count, `None` for variadic kinds.
    pub fn input_arity(self) -> Option<usize> {
        match self {
            Self::And2 | Self::Or2 | Self::Ha => Some(2),
            Self::Fa | Self::Comp1 => Some(3),
            Self::Spinv => Some(1),
            Self::Merge => None,
        }
    }

    pub fn output_arity(self) -> usize {
        match self {
            Self::Ha | Self::Fa | Self::Comp1 => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::And2 => "AND2",
            Self::Or2 => "OR2",
            Self::Ha => "HA",
            Self::Fa => "FA",
            Self::Spinv => "SPINV",
            Self::Comp1 => "COMP1",
            Self::Merge => "MERGE",
        }
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown gate kind `{s}`"))
    }
}

fn and2(a: DrValue, b: DrValue) -> DrValue {
    DrValue { p: a.p && b.p, n: a.n || b.n }
}

fn or2(a: DrValue, b: DrValue) -> DrValue {
    DrValue { p: a.p || b.p, n: a.n && b.n }
}

fn xor2(a: DrValue, b: DrValue) -> DrValue {
    DrValue { p: a.p && b.n || a.n && b.p, n: a.p && b.p || a.n && b.n }
}

fn majority(a: bool, b: bool, c: bool) -> bool {
    a && b || a && c || b && c
}

/// Evaluates `kind` on `inputs` into `out` (length [`GateKind::output_arity`]).
pub fn eval(kind: GateKind, inputs: &[DrValue], out: &mut [DrValue]) {
    match kind {
        GateKind::And2 => out[0] = and2(inputs[0], inputs[1]),
        GateKind::Or2 => out[0] = or2(inputs[0], inputs[1]),
        GateKind::Spinv => out[0] = inputs[0].inverted(),
        GateKind::Ha => {
            out[0] = xor2(inputs[0], inputs[1]);
            out[1] = and2(inputs[0], inputs[1]);
        }
        GateKind::Fa => {
            let (a, b, c) = (inputs[0], inputs[1], inputs[2]);
            out[0] = xor2(xor2(a, b), c);
            out[1] = DrValue { p: majority(a.p, b.p, c.p), n: majority(a.n, b.n, c.n) };
        }
        GateKind::Comp1 => {
            let (en, a, b) = (inputs[0].p, inputs[1], inputs[2]);
            let equal = a.p && b.p || a.n && b.n;
            out[0] = DrValue { p: en && equal, n: false };
            out[1] = DrValue { p: en && a.p && b.n, n: en && a.n && b.p };
        }
        GateKind::Merge => {
            out[0] = inputs
                .iter()
                .fold(DrValue::SPACER, |acc, v| DrValue { p: acc.p || v.p, n: acc.n || v.n })
        }
    }
}

/// Gate delay per kind, in abstract time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelayModel {
    pub and2: f64,
    pub or2: f64,
    pub ha: f64,
    pub fa: f64,
    pub spinv: f64,
    pub comp1: f64,
    pub merge: f64,
}

impl Default for DelayModel {
    fn default() -> Self {
        Self::unit()
    }
}

impl DelayModel {
    pub fn unit() -> Self {
        Self { and2: 1.0, or2: 1.0, ha: 1.0, fa: 1.0, spinv: 1.0, comp1: 1.0, merge: 1.0 }
    }

    pub fn delay(&self, kind: GateKind) -> f64 {
        match kind {
            GateKind::And2 => self.and2,
            GateKind::Or2 => self.or2,
            GateKind::Ha => self.ha,
            GateKind::Fa => self.fa,
            GateKind::Spinv => self.spinv,
            GateKind::Comp1 => self.comp1,
            GateKind::Merge => self.merge,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for kind in GateKind::ALL {
            let d = self.delay(kind);
            if !(d.is_finite() && d > 0.0) {
                return Err(format!("{kind} delay must be positive and finite, got {d}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DrValue as V;

    fn one(kind: GateKind, inputs: &[DrValue]) -> Vec<DrValue> {
        let mut out = vec![V::SPACER; kind.output_arity()];
        eval(kind, inputs, &mut out);
        out
    }

    #[test]
    fn and_propagates_zero_early() {
        assert_eq!(one(GateKind::And2, &[V::ONE, V::ZERO]), [V::ZERO]);
        assert_eq!(one(GateKind::And2, &[V::SPACER, V::ZERO]), [V::ZERO]);
        assert_eq!(one(GateKind::And2, &[V::SPACER, V::ONE]), [V::SPACER]);
    }

    #[test]
    fn or_propagates_one_early() {
        assert_eq!(one(GateKind::Or2, &[V::SPACER, V::ONE]), [V::ONE]);
        assert_eq!(one(GateKind::Or2, &[V::ZERO, V::SPACER]), [V::SPACER]);
    }

    #[test]
    fn adders_match_arithmetic_on_valid_inputs() {
        for bits in 0..8u32 {
            let v: Vec<_> = (0..3).map(|i| V::bit(bits >> i & 1 == 1)).collect();
            let count = bits.count_ones();
            let fa = one(GateKind::Fa, &v);
            assert_eq!(fa[0].value(), Some(count & 1 == 1));
            assert_eq!(fa[1].value(), Some(count >= 2));
            let ha = one(GateKind::Ha, &v[..2]);
            let c2 = (bits & 3).count_ones();
            assert_eq!(ha[0].value(), Some(c2 & 1 == 1));
            assert_eq!(ha[1].value(), Some(c2 == 2));
        }
    }

    #[test]
    fn full_adder_carry_resolves_on_two_agreeing_inputs() {
        let out = one(GateKind::Fa, &[V::ONE, V::ONE, V::SPACER]);
        assert_eq!(out, [V::SPACER, V::ONE]);
    }

    #[test]
    fn comparator_cell() {
        let en = V::ONE;
        assert_eq!(one(GateKind::Comp1, &[en, V::ONE, V::ZERO]), [V::SPACER, V::ONE]);
        assert_eq!(one(GateKind::Comp1, &[en, V::ZERO, V::ONE]), [V::SPACER, V::ZERO]);
        assert_eq!(one(GateKind::Comp1, &[en, V::ONE, V::ONE]), [V::ONE, V::SPACER]);
        assert_eq!(one(GateKind::Comp1, &[V::SPACER, V::ONE, V::ZERO]), [V::SPACER, V::SPACER]);
    }

    #[test]
    fn kinds_parse_by_name() {
        for k in GateKind::ALL {
            assert_eq!(k.name().parse::<GateKind>().unwrap(), k);
        }
    }

    #[test]
    fn delay_validation() {
        assert!(DelayModel::unit().validate().is_ok());
        assert!(DelayModel { fa: 0.0, ..DelayModel::unit() }.validate().is_err());
    }
}
