//! End-to-end checks of the channel, surface and rate models against
//! independent simulations.

use fasaris::channel::{
    dbm_to_watts, derive_params, stream_rng, ChannelSampler, DerivedParams, SystemConfig,
};
use fasaris::corrmodel::{bdma_partition, BlockPartition};
use fasaris::ctrl::{cascade, nb_transform, optimal_phases};
use fasaris::mcsim::{max_snr_with, mc_outage, snr_per_port, McEstimate, SimMode};
use fasaris::outage::{outage_iae, QuadratureSpec};
use fasaris::ratemax::{optimize_rate, throughput, RateSearchOptions};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

fn defaults_at(p_dbm: f64) -> (SystemConfig, DerivedParams, BlockPartition) {
    let cfg = SystemConfig {
        tx_power: dbm_to_watts(p_dbm),
        ..SystemConfig::default()
    };
    let params = derive_params(&cfg).unwrap();
    let part = bdma_partition(&cfg.correlation_spec()).unwrap();
    (cfg, params, part)
}

fn cn<R: Rng>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

#[test]
fn intra_block_correlation_is_mu_sq() {
    let cfg = SystemConfig {
        n_ports: 10,
        m_elements: 2,
        ..SystemConfig::default()
    };
    let params = derive_params(&cfg).unwrap();
    let part = BlockPartition::new(vec![5, 5]).unwrap();
    let s = ChannelSampler::new(&cfg, &params, &part).unwrap();
    let k = cfg.rician_k;
    let mean: Vec<Complex64> = s
        .h_bar()
        .iter()
        .map(|z| z * (params.alpha * k / (k + 1.0)).sqrt())
        .collect();
    let mut rng = stream_rng(7, 0);
    let (mut same, mut cross, mut var) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
    let n = 100_000;
    for _ in 0..n {
        let x = s.sample(&mut rng);
        let d = |k: usize| x.h_ports[k][0] - mean[0];
        same += d(0) * d(3).conj();
        cross += d(0) * d(7).conj();
        var += d(0).norm_sqr();
    }
    let (same, cross) = (same.re / var, cross.re / var);
    assert!((same - cfg.mu_sq).abs() < 0.01, "{same}");
    assert!(cross.abs() < 0.01, "{cross}");
}

#[test]
fn snr_matches_signal_level_simulation() {
    let (cfg, params, part) = defaults_at(10.0);
    let s = ChannelSampler::new(&cfg, &params, &part).unwrap();
    let x = s.sample(&mut stream_rng(3, 0));
    let theta = optimal_phases(&x.h_bar, &x.g).unwrap();
    let want = snr_per_port(&x, &params, SimMode::FasAris).unwrap();
    let p = params.effective_power();
    let rho = params.rho_star;
    let mut rng = stream_rng(3, 1);
    for k in [0usize, 42, 99] {
        let h = &x.h_ports[k];
        let signal = p * (rho * cascade(h, &theta, &x.g)).norm_sqr();
        // y = sqrt(P) rho h^H Phi (g s + n) + n0
        let trials = 100_000;
        let mut noise = 0.0;
        for _ in 0..trials {
            let n: Vec<Complex64> = (0..cfg.m_elements)
                .map(|_| cn(&mut rng, cfg.noise_aris))
                .collect();
            let mut z = cn(&mut rng, cfg.noise_mu);
            for m in 0..cfg.m_elements {
                z += rho * h[m].conj() * Complex64::from_polar(1.0, theta[m]) * n[m];
            }
            noise += z.norm_sqr();
        }
        let got = signal / (noise / trials as f64);
        assert!(
            (got / want[k] - 1.0).abs() < 0.01,
            "port {k}: {got} vs {}",
            want[k]
        );
    }
}

#[test]
fn iae_matches_simulated_identical_ports() {
    let (cfg, params, part) = defaults_at(10.0);
    let q = QuadratureSpec::default();
    let s = ChannelSampler::with_mu_sq(cfg.m_elements, cfg.rician_k, 1.0, &params, &part).unwrap();
    let v = max_snr_with(&s, &params, SimMode::FasAris, 1_000_000, 2).unwrap();
    for rate in [2.0, 4.0] {
        let mc = McEstimate::outage_from(&v, rate).value;
        let iae = outage_iae(&cfg, &params, &part, rate, &q).unwrap();
        assert!((mc - iae).abs() <= 0.01, "R={rate}: mc {mc} iae {iae}");
    }
}

#[test]
fn more_bs_antennas_help() {
    let cfg = SystemConfig {
        m_elements: 2,
        tx_power: dbm_to_watts(6.0),
        ..SystemConfig::default()
    };
    let params = derive_params(&cfg).unwrap();
    let part = bdma_partition(&cfg.correlation_spec()).unwrap();
    let two = nb_transform(&params, &cfg, 2).unwrap();
    let q = QuadratureSpec::default();
    let one = mc_outage(&cfg, &params, &part, 3.0, SimMode::FasAris, 20_000, 4).unwrap();
    let dbl = mc_outage(&cfg, &two, &part, 3.0, SimMode::FasAris, 20_000, 4).unwrap();
    assert!(dbl.value <= one.value);
    assert!(
        outage_iae(&cfg, &two, &part, 3.0, &q).unwrap()
            <= outage_iae(&cfg, &params, &part, 3.0, &q).unwrap()
    );
}

#[test]
fn throughput_is_unimodal_and_region_three_wins() {
    let (cfg, params, part) = defaults_at(10.0);
    let q = QuadratureSpec::default();
    let grid: Vec<f64> = (0..400)
        .map(|i| throughput(12.0 * i as f64 / 399.0, &cfg, &params, &part, &q).unwrap())
        .collect();
    let peaks = grid
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2])
        .count();
    assert_eq!(peaks, 1);
    assert!(
        throughput(20.0, &cfg, &params, &part, &q).unwrap()
            < grid.iter().cloned().fold(0.0, f64::max) / 100.0
    );

    let res = optimize_rate(&cfg, &params, &part, &RateSearchOptions::default()).unwrap();
    let best = grid.iter().cloned().fold(0.0, f64::max);
    let t3 = throughput(res.r_star3, &cfg, &params, &part, &q).unwrap();
    assert!(t3 >= best * (1.0 - 1e-4), "{t3} vs {best}");
    assert_eq!(res.r_final, res.r_star3);
    let lo = (1.0 + res.lambda0).log2();
    let hi = (1.0 + res.lambda1).log2();
    assert!((lo..=hi).contains(&res.r_final));
}

#[test]
fn outage_falls_with_power_for_every_mode() {
    for mode in SimMode::ALL {
        let mut last = f64::INFINITY;
        for p_dbm in [6.0, 10.0, 14.0] {
            let (cfg, params, part) = defaults_at(p_dbm);
            let o = mc_outage(&cfg, &params, &part, 4.5, mode, 5_000, 8).unwrap();
            assert!(
                o.value <= last + 3.0 * o.std_err + 1e-12,
                "{mode} at {p_dbm}"
            );
            last = o.value;
        }
    }
}
