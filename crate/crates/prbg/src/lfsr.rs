use serde::{Deserialize, Serialize};

use crate::PrbgError;

/// 8-bit Fibonacci LFSR with feedback polynomial `x^8 + x^6 + x^5 + x^4 + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lfsr8 {
    state: u8,
}

impl Lfsr8 {
    pub const TAPS: [u8; 4] = [8, 6, 5, 4];

    pub fn new(seed: u8) -> Result<Self, PrbgError> {
        if seed == 0 {
            return Err(PrbgError::ZeroState);
        }
        Ok(Self { state: seed })
    }

    pub fn state(self) -> u8 {
        self.state
    }

    /// Shifts once and returns the bit shifted out.
    pub fn next_bit(&mut self) -> Result<bool, PrbgError> {
        let s = self.state;
        if s == 0 {
            return Err(PrbgError::ZeroState);
        }
        let feedback = (s ^ s >> 2 ^ s >> 3 ^ s >> 4) & 1;
        self.state = s >> 1 | feedback << 7;
        Ok(s & 1 == 1)
    }
}

/// `(next state, output bit)`.
pub fn lfsr_next(lfsr: Lfsr8) -> Result<(Lfsr8, bool), PrbgError> {
    let mut l = lfsr;
    let bit = l.next_bit()?;
    Ok((l, bit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_seed_rejected() {
        assert_eq!(Lfsr8::new(0), Err(PrbgError::ZeroState));
    }

    #[test]
    fn next_is_pure() {
        let l = Lfsr8::new(0x5a).unwrap();
        assert_eq!(lfsr_next(l).unwrap(), lfsr_next(l).unwrap());
    }
}
