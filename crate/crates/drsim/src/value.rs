use serde::{Deserialize, Serialize};

/// A dual-rail signal: `(0,0)` spacer, `(1,0)` logic-1, `(0,1)` logic-0, `(1,1)` illegal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DrValue {
    pub p: bool,
    pub n: bool,
}

impl DrValue {
    pub const SPACER: DrValue = DrValue { p: false, n: false };
    pub const ONE: DrValue = DrValue { p: true, n: false };
    pub const ZERO: DrValue = DrValue { p: false, n: true };
    pub const ILLEGAL: DrValue = DrValue { p: true, n: true };

    pub fn bit(b: bool) -> Self {
        if b {
            Self::ONE
        } else {
            Self::ZERO
        }
    }

    pub fn is_spacer(self) -> bool {
        !self.p && !self.n
    }

    pub fn is_valid(self) -> bool {
        self.p != self.n
    }

    pub fn is_illegal(self) -> bool {
        self.p && self.n
    }

    /// Decoded logic value, `None` for spacer or illegal.
    pub fn value(self) -> Option<bool> {
        self.is_valid().then_some(self.p)
    }

    /// Rail swap, the dual-rail inverter.
    pub fn inverted(self) -> Self {
        Self { p: self.n, n: self.p }
    }
}

impl std::fmt::Display for DrValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match (self.p, self.n) {
            (false, false) => "S",
            (true, false) => "1",
            (false, true) => "0",
            (true, true) => "X",
        })
    }
}

/// Little-endian dual-rail encoding of `value` on `width` bits.
pub fn encode_unsigned(value: u64, width: usize) -> Vec<DrValue> {
    (0..width).map(|i| DrValue::bit(value >> i & 1 == 1)).collect()
}

/// Inverse of [`encode_unsigned`]; `None` if any bit is not a valid codeword.
pub fn decode_unsigned(bits: &[DrValue]) -> Option<u64> {
    bits.iter()
        .enumerate()
        .try_fold(0u64, |acc, (i, b)| b.value().map(|v| acc | (u64::from(v) << i)))
}
