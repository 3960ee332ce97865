//! Backhaul capacity and energy-efficiency arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// How the embodied share of BS energy is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EmbodiedBasis {
    /// `E_EM = f·E`, so `E = E_OP / (1 - f)`.
    #[default]
    FractionOfTotal,
    /// `E_EM = f·E_OP`, so `E = E_OP·(1 + f)`.
    FractionOfOperating,
}

/// Which per-BS rate drives transmission power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThroughputBasis {
    /// `Y·W/n`: every relayed transmission counts.
    #[default]
    Transmitted,
    /// `capacity/n`: only end-to-end delivered traffic counts.
    Delivered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Slope of the operating-power model.
    pub a: f64,
    /// Offset of the operating-power model, Watts.
    pub b: f64,
    /// Transmission power at the normalization throughput, Watts.
    pub p_norm: f64,
    /// Normalization throughput, bits/second.
    pub th0: f64,
    /// BS lifetime, seconds.
    pub lifetime: f64,
    pub embodied_fraction: f64,
    pub embodied_basis: EmbodiedBasis,
    pub throughput_basis: ThroughputBasis,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            a: 7.85,
            b: 71.5,
            p_norm: 1.0,
            th0: 1e9,
            lifetime: 5.0 * SECONDS_PER_YEAR,
            embodied_fraction: 0.2,
            embodied_basis: EmbodiedBasis::FractionOfTotal,
            throughput_basis: ThroughputBasis::Transmitted,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.a) {
            return Err(SimError::invalid("a", "must be > 0"));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(SimError::invalid("b", "must be >= 0"));
        }
        if !positive(self.p_norm) {
            return Err(SimError::invalid("p_norm", "must be > 0"));
        }
        if !positive(self.th0) {
            return Err(SimError::invalid("th0", "must be > 0"));
        }
        if !positive(self.lifetime) {
            return Err(SimError::invalid("lifetime", "must be > 0"));
        }
        if !(0.0..1.0).contains(&self.embodied_fraction) {
            return Err(SimError::invalid(
                "embodied_fraction",
                "must be >= 0 and < 1",
            ));
        }
        Ok(())
    }
}

/// `Y·W/k`
pub fn backhaul_capacity(
    mean_concurrency: f64,
    link_rate: f64,
    mean_hops: Option<f64>,
) -> Result<f64> {
    let k = mean_hops.ok_or(SimError::NoConnectedBs)?;
    Ok(mean_concurrency * link_rate / k)
}

/// `Y·W/n`
pub fn average_bs_throughput(mean_concurrency: f64, link_rate: f64, n: usize) -> f64 {
    mean_concurrency * link_rate / n as f64
}

/// `P_Norm·Th_Avg/Th_0`
pub fn transmission_power(th_avg: f64, params: &EnergyParams) -> f64 {
    params.p_norm * th_avg / params.th0
}

/// `a·P_TX + b`
pub fn operating_power(p_tx: f64, params: &EnergyParams) -> f64 {
    params.a * p_tx + params.b
}

/// Lifetime energy of one BS: operating energy plus its embodied share.
pub fn bs_energy(p_op: f64, params: &EnergyParams) -> Result<f64> {
    let f = params.embodied_fraction;
    if !(0.0..1.0).contains(&f) {
        return Err(SimError::invalid(
            "embodied_fraction",
            "must be >= 0 and < 1",
        ));
    }
    let e_op = p_op * params.lifetime;
    Ok(match params.embodied_basis {
        EmbodiedBasis::FractionOfTotal => e_op / (1.0 - f),
        EmbodiedBasis::FractionOfOperating => e_op * (1.0 + f),
    })
}

/// `capacity / (n·E_BS)` in (bits/s)/J.
pub fn backhaul_energy_efficiency(capacity: f64, n: usize, e_bs: f64) -> Result<f64> {
    if !(e_bs > 0.0) {
        return Err(SimError::invalid("e_bs", "BS energy must be > 0"));
    }
    if n == 0 {
        return Err(SimError::invalid("n", "must be >= 1"));
    }
    Ok(capacity / (n as f64 * e_bs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub n: usize,
    pub connected_count: usize,
    pub slots: usize,
    pub k_n: f64,
    pub y_n: f64,
    pub capacity: f64,
    /// Per-BS throughput on the configured basis; drives `p_tx`.
    pub th_avg: f64,
    /// `Y·W/n`
    pub th_transmitted: f64,
    /// `capacity/n`
    pub th_delivered: f64,
    pub p_tx: f64,
    pub p_op: f64,
    pub e_bs: f64,
    pub energy_efficiency: f64,
    /// `energy_efficiency·T_Lifetime`, bits per Joule.
    pub ee_bits_per_joule: f64,
}

impl TrialMetrics {
    /// Derives every metric from the schedule summary `(Y, k)` of one trial.
    pub fn compute(
        n: usize,
        connected_count: usize,
        slots: usize,
        y_n: f64,
        k_n: Option<f64>,
        link_rate: f64,
        params: &EnergyParams,
    ) -> Result<Self> {
        let capacity = backhaul_capacity(y_n, link_rate, k_n)?;
        let k_n = k_n.expect("checked by backhaul_capacity");
        let th_transmitted = average_bs_throughput(y_n, link_rate, n);
        let th_delivered = capacity / n as f64;
        let th_avg = match params.throughput_basis {
            ThroughputBasis::Transmitted => th_transmitted,
            ThroughputBasis::Delivered => th_delivered,
        };
        let p_tx = transmission_power(th_avg, params);
        let p_op = operating_power(p_tx, params);
        let e_bs = bs_energy(p_op, params)?;
        let energy_efficiency = backhaul_energy_efficiency(capacity, n, e_bs)?;
        Ok(Self {
            n,
            connected_count,
            slots,
            k_n,
            y_n,
            capacity,
            th_avg,
            th_transmitted,
            th_delivered,
            p_tx,
            p_op,
            e_bs,
            energy_efficiency,
            ee_bits_per_joule: energy_efficiency * params.lifetime,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(backhaul_capacity(1.0, 1e9, Some(1.0)).unwrap(), 1e9);
        assert!(rel_close(
            backhaul_capacity(29.0, 1e9, Some(3.625)).unwrap(),
            8e9,
            1e-12
        ));
        assert!(rel_close(
            backhaul_capacity(19.0, 1e9, Some(2.0)).unwrap(),
            9.5e9,
            1e-12
        ));
        assert_eq!(
            backhaul_capacity(3.0, 1e9, None),
            Err(SimError::NoConnectedBs)
        );
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(average_bs_throughput(1.0, 1e9, 1), 1e9);
        assert!(rel_close(
            average_bs_throughput(29.0, 1e9, 58),
            0.5e9,
            1e-12
        ));
        assert_eq!(average_bs_throughput(0.0, 1e9, 10), 0.0);
    }

    #[test]
    fn power_examples() {
        let p = EnergyParams::default();
        assert_eq!(transmission_power(p.th0, &p), 1.0);
        assert_eq!(transmission_power(0.0, &p), 0.0);
        assert_eq!(transmission_power(0.5e9, &p), 0.5);
        assert!(rel_close(operating_power(1.0, &p), 79.35, 1e-12));
        assert_eq!(operating_power(0.0, &p), 71.5);
        assert!(rel_close(operating_power(0.5, &p), 75.425, 1e-12));
    }

    #[test]
    fn energy_examples() {
        let p = EnergyParams::default();
        assert_eq!(p.lifetime, 157_788_000.0);
        let e = bs_energy(79.35, &p).unwrap();
        assert!(rel_close(79.35 * p.lifetime, 1.25205e10, 1e-5));
        assert!(rel_close(e, 1.56506e10, 1e-4), "{e}");
        let no_embodied = EnergyParams {
            embodied_fraction: 0.0,
            ..p
        };
        assert_eq!(bs_energy(79.35, &no_embodied).unwrap(), 79.35 * p.lifetime);
        assert_eq!(bs_energy(0.0, &p).unwrap(), 0.0);
        let of_operating = EnergyParams {
            embodied_basis: EmbodiedBasis::FractionOfOperating,
            ..p
        };
        assert!(rel_close(
            bs_energy(79.35, &of_operating).unwrap(),
            79.35 * p.lifetime * 1.2,
            1e-12
        ));
        let bad = EnergyParams {
            embodied_fraction: 1.0,
            ..p
        };
        assert!(bs_energy(1.0, &bad).is_err());
        assert!(bad.validate().is_err());
    }

    #[test]
    fn efficiency_examples() {
        let ee = backhaul_energy_efficiency(1e9, 1, 1.56506e10).unwrap();
        assert!(rel_close(ee, 6.3895e-2, 1e-4), "{ee}");
        // bits/J = W·T·(1 - f)/(P_OP·T) = 0.8e9/79.35, independent of T.
        let bits_per_joule = ee * 157_788_000.0;
        assert!(
            rel_close(bits_per_joule, 0.8e9 / 79.35, 1e-5),
            "{bits_per_joule}"
        );
        assert!(rel_close(bits_per_joule, 1.0083e7, 2e-4));
        assert_eq!(backhaul_energy_efficiency(0.0, 4, 1e10).unwrap(), 0.0);
        let one = backhaul_energy_efficiency(5e9, 10, 2e10).unwrap();
        let two = backhaul_energy_efficiency(5e9, 20, 2e10).unwrap();
        assert_eq!(one, 2.0 * two);
        assert!(backhaul_energy_efficiency(1e9, 1, 0.0).is_err());
    }

    #[test]
    fn scaling_rates_together_leaves_tx_power_unchanged() {
        let p = EnergyParams::default();
        let scaled = EnergyParams {
            th0: p.th0 * 1000.0,
            ..p
        };
        let th = average_bs_throughput(7.0, 1e9, 30);
        let th_scaled = average_bs_throughput(7.0, 1e12, 30);
        assert!(rel_close(
            transmission_power(th, &p),
            transmission_power(th_scaled, &scaled),
            1e-12
        ));
    }

    #[test]
    fn trial_record_recomputes_from_scratch() {
        let p = EnergyParams::default();
        let m = TrialMetrics::compute(40, 12, 9, 2.5, Some(1.875), 1e9, &p).unwrap();
        let cap = backhaul_capacity(2.5, 1e9, Some(1.875)).unwrap();
        let e = bs_energy(
            operating_power(transmission_power(2.5e9 / 40.0, &p), &p),
            &p,
        )
        .unwrap();
        assert_eq!(m.capacity, cap);
        assert_eq!(
            m.energy_efficiency,
            backhaul_energy_efficiency(cap, 40, e).unwrap()
        );
        assert!(m.capacity <= 12.0 * 1e9);
    }

    proptest::proptest! {
        #[test]
        fn monotone_and_nonnegative(p1 in 0.0f64..100.0, dp in 1e-6f64..100.0, n in 1usize..500) {
            let p = EnergyParams::default();
            proptest::prop_assert!(operating_power(p1 + dp, &p) > operating_power(p1, &p));
            let e1 = bs_energy(operating_power(p1, &p), &p).unwrap();
            let e2 = bs_energy(operating_power(p1 + dp, &p), &p).unwrap();
            proptest::prop_assert!(e2 > e1);
            let a = backhaul_energy_efficiency(3e9, n, e1).unwrap();
            let b = backhaul_energy_efficiency(3e9, n + 1, e1).unwrap();
            proptest::prop_assert!(a > b && b >= 0.0 && a.is_finite());
        }
    }
}
