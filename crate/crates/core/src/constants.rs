use std::f64::consts::LN_2;

/// Boltzmann constant in J/K, at the precision used by the reference parameter set.
pub const BOLTZMANN: f64 = 1.38e-23;

/// Entropy carried by one bit of freedom, `k_B ln 2`, in J/K.
pub const BIT_FACTOR: f64 = BOLTZMANN * LN_2;

/// Physical constants used throughout the model.
///
/// Every operation reads [`BOLTZMANN`] and [`BIT_FACTOR`]; this type exists so
/// callers can report which constants a result was computed with.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub boltzmann: f64,
    pub bit_factor: f64,
}

impl PhysicalConstants {
    pub const TABLE1: PhysicalConstants = PhysicalConstants {
        boltzmann: BOLTZMANN,
        bit_factor: BIT_FACTOR,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::TABLE1
    }
}

/// Minimum energy dissipated per transmitted bit at noise-pool temperature `t_lo`.
pub fn landauer_floor(t_lo: f64) -> f64 {
    BIT_FACTOR * t_lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_factor_is_kb_ln2() {
        let c = PhysicalConstants::default();
        assert_eq!(c.boltzmann, 1.38e-23);
        assert_eq!(c.bit_factor, 1.38e-23 * 2f64.ln());
    }

    #[test]
    fn floor_at_room_temperature() {
        let floor = landauer_floor(298.15);
        assert!((floor - 2.852e-21).abs() / 2.852e-21 < 1e-3);
    }
}
