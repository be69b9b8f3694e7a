//! First-order radio energy model.
//!
//! Transmitting `k` bits over `d` metres costs `k·E_elec_tx + k·E_amp·d²`,
//! receiving costs `k·E_elec_rx`, and a cluster head fusing `s` signals of
//! `k` bits pays `s·k·E_da`. A single free-space exponent is used at every
//! distance because only one amplifier constant (per m²) is configured.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EnergyError {
    #[error("distance must be a finite non-negative number of metres, got {0}")]
    InvalidDistance(f64),
}

/// Radio constants. Energies are in joules per bit (amplifier: per bit per m²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams<S> {
    pub e_elec_tx: S,
    pub e_elec_rx: S,
    pub e_amp: S,
    pub e_da: S,
    pub packet_bits: u32,
}

impl<S: Scalar> RadioParams<S> {
    /// 50 nJ/bit electronics, 100 pJ/bit/m² amplifier, 50 pJ/bit aggregation,
    /// 200-bit packets.
    pub fn reference() -> Self {
        Self {
            e_elec_tx: S::lit(50e-9),
            e_elec_rx: S::lit(50e-9),
            e_amp: S::lit(100e-12),
            e_da: S::lit(50e-12),
            packet_bits: 200,
        }
    }

    /// Returns the name of the first field that is not strictly positive.
    pub fn first_non_positive(&self) -> Option<&'static str> {
        let fields = [
            ("e_elec_tx", self.e_elec_tx),
            ("e_elec_rx", self.e_elec_rx),
            ("e_amp", self.e_amp),
            ("e_da", self.e_da),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !(*v > S::zero() && v.is_finite())) {
            return Some(name);
        }
        (self.packet_bits == 0).then_some("packet_bits")
    }
}

impl<S: Scalar> Default for RadioParams<S> {
    fn default() -> Self {
        Self::reference()
    }
}

pub fn tx_energy<S: Scalar>(params: &RadioParams<S>, bits: u64, distance: S) -> Result<S, EnergyError> {
    if !(distance >= S::zero() && distance.is_finite()) {
        return Err(EnergyError::InvalidDistance(distance.as_f64()));
    }
    let k = S::from_u64(bits).expect("bit count representable");
    Ok(k * params.e_elec_tx + k * params.e_amp * distance * distance)
}

pub fn rx_energy<S: Scalar>(params: &RadioParams<S>, bits: u64) -> S {
    S::from_u64(bits).expect("bit count representable") * params.e_elec_rx
}

/// Cost of fusing `signals` incoming signals of `bits` each.
pub fn aggregation_energy<S: Scalar>(params: &RadioParams<S>, bits: u64, signals: u64) -> S {
    let k = S::from_u64(bits).expect("bit count representable");
    let s = S::from_u64(signals).expect("signal count representable");
    s * k * params.e_da
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 + 1e-12 * b.abs()
    }

    #[test]
    fn tx_examples() {
        let p = RadioParams::<f64>::reference();
        // 200·50e-9 + 200·100e-12·10² = 1.0e-5 + 2.0e-6
        assert!(close(tx_energy(&p, 200, 10.0).unwrap(), 1.2e-5));
        assert_eq!(tx_energy(&p, 0, 50.0).unwrap(), 0.0);
        assert!(close(tx_energy(&p, 200, 0.0).unwrap(), 1.0e-5));
    }

    #[test]
    fn tx_rejects_bad_distance() {
        let p = RadioParams::<f64>::reference();
        assert_eq!(tx_energy(&p, 200, -1.0), Err(EnergyError::InvalidDistance(-1.0)));
        assert!(tx_energy(&p, 200, f64::NAN).is_err());
        assert!(tx_energy(&p, 200, f64::INFINITY).is_err());
    }

    #[test]
    fn rx_examples() {
        let p = RadioParams::<f64>::reference();
        assert!(close(rx_energy(&p, 200), 1.0e-5));
        assert_eq!(rx_energy(&p, 0), 0.0);
        let q = RadioParams { e_elec_rx: 1e-9, ..p };
        assert!(close(rx_energy(&q, 1000), 1e-6));
    }

    #[test]
    fn aggregation_examples() {
        let p = RadioParams::<f64>::reference();
        assert!(close(aggregation_energy(&p, 200, 5), 5.0e-8));
        assert_eq!(aggregation_energy(&p, 200, 0), 0.0);
        assert_eq!(aggregation_energy(&p, 0, 7), 0.0);
    }

    #[test]
    fn f32_matches_f64_to_single_precision() {
        let p32 = RadioParams::<f32>::reference();
        let p64 = RadioParams::<f64>::reference();
        let a = tx_energy(&p32, 200, 37.5_f32).unwrap() as f64;
        let b = tx_energy(&p64, 200, 37.5).unwrap();
        assert!((a - b).abs() / b < 1e-6);
    }

    #[test]
    fn validation_names_field() {
        let mut p = RadioParams::<f64>::reference();
        assert_eq!(p.first_non_positive(), None);
        p.e_amp = 0.0;
        assert_eq!(p.first_non_positive(), Some("e_amp"));
        let q = RadioParams::<f64> {
            packet_bits: 0,
            ..RadioParams::reference()
        };
        assert_eq!(q.first_non_positive(), Some("packet_bits"));
    }

    proptest! {
        #[test]
        fn tx_monotone(b1 in 0u64..10_000, db in 0u64..10_000, d1 in 0.0f64..500.0, dd in 0.0f64..500.0) {
            let p = RadioParams::<f64>::reference();
            let base = tx_energy(&p, b1, d1).unwrap();
            prop_assert!(tx_energy(&p, b1 + db, d1).unwrap() >= base);
            prop_assert!(tx_energy(&p, b1, d1 + dd).unwrap() >= base);
            prop_assert!(base >= b1 as f64 * p.e_elec_tx);
            prop_assert_eq!(base.to_bits(), tx_energy(&p, b1, d1).unwrap().to_bits());
        }
    }
}
