//! Randomized property batteries for the coherence and discord measures.
//!
//! Each property reports how many samples were checked, how many violated
//! it, and the worst slack, where slack is `allowed − observed` and a
//! violation is a negative slack.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{
    self, apply_kraus, apply_local, ecpo_to_channel, measure_ensemble, projective_povm,
    random_commuting_bipartite_sio_with, random_sio_with, sio_to_kraus, DephasingChannel, EcpoSpec,
    KrausChannel,
};
use crate::coherence::{c0_is_finite, coherence_qubit_closed_form, crb_bound, max_coherence, qfi_dephasing};
use crate::discord::{conversion_check, discord, discord_qubit_a_grid, OptimizerConfig};
use crate::error::{Error, Result};
use crate::estimation::simulate_estimation;
use crate::linalg;
use crate::qstate::{
    bloch_from_qubit, cq_state, maximally_coherent, maximally_entangled, random_density_with,
    random_pure_with, random_unitary_with, seeded_rng, BipartiteState, DensityMatrix, Subsystem, Unitary,
};

/// Values at or below this count as zero coherence.
pub const ZERO_TOL: f64 = 1e-12;
pub const COHERENCE_TOL: f64 = 1e-8;
pub const DISCORD_CQ_TOL: f64 = 1e-7;
pub const DISCORD_MONOTONE_TOL: f64 = 1e-5;
pub const DISCORD_PURE_TOL: f64 = 1e-6;
pub const DISCORD_POSITIVE_FLOOR: f64 = 1e-3;
pub const CONVERSION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Coherence,
    Discord,
    Conversion,
    Estimation,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherence" => Ok(Suite::Coherence),
            "discord" => Ok(Suite::Discord),
            "conversion" => Ok(Suite::Conversion),
            "estimation" => Ok(Suite::Estimation),
            "all" => Ok(Suite::All),
            other => Err(Error::param(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    pub worst_slack: f64,
}

impl PropertyReport {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), checked: 0, violations: 0, worst_slack: f64::INFINITY }
    }

    fn record(&mut self, slack: f64) {
        self.checked += 1;
        if !(slack >= 0.0) {
            self.violations += 1;
        }
        if slack < self.worst_slack || slack.is_nan() {
            self.worst_slack = slack;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} checked={} violations={} worst_slack={:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.violations,
            self.worst_slack
        )
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyReport::passed)
    }
}

pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(match suite {
        Suite::Coherence => vec![coherence_suite(samples, seed)?],
        Suite::Discord => vec![discord_suite(samples, seed)?],
        Suite::Conversion => vec![conversion_suite(samples, seed)?],
        Suite::Estimation => vec![estimation_suite(samples, seed)?],
        Suite::All => vec![
            coherence_suite(samples, seed)?,
            discord_suite(samples, seed)?,
            conversion_suite(samples, seed)?,
            estimation_suite(samples, seed)?,
        ],
    })
}

fn random_p(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.05..=1.0)
}

fn random_dim(rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(2..=4)
}

fn coherence_of(rho: &DensityMatrix, p: f64) -> Result<f64> {
    Ok(qfi_dephasing(rho, &DephasingChannel::computational(rho.dim(), p)?)?.value)
}

/// Random states of random rank, some of them explicitly incoherent.
fn faithfulness_samples(samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<DensityMatrix>> {
    let mut states = Vec::with_capacity(samples + samples / 4);
    for _ in 0..samples {
        let d = random_dim(rng);
        let rank = rng.random_range(1..=d);
        states.push(random_density_with(d, rank, rng)?);
    }
    for _ in 0..(samples / 4).max(1) {
        let d = random_dim(rng);
        let rho = random_density_with(d, d, rng)?;
        states.push(channels::dephase(&rho, &Unitary::identity(d))?);
    }
    Ok(states)
}

pub fn coherence_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded_rng(seed);
    let mut c1 = PropertyReport::new("C1 faithfulness");
    let mut c2 = PropertyReport::new("C2 SIO monotonicity");
    let mut c2e = PropertyReport::new("C2 ensemble monotonicity");
    let mut c3 = PropertyReport::new("C3 convexity");
    let mut closed = PropertyReport::new("qubit closed form");
    let mut extremal = PropertyReport::new("pure-state maximum");
    let mut distill = PropertyReport::new("no pure-state distillation");

    for rho in faithfulness_samples(samples, &mut rng)? {
        let p = random_p(&mut rng);
        let value = coherence_of(&rho, p)?;
        let offdiag = linalg::frobenius(&(channels::dephase(&rho, &Unitary::identity(rho.dim()))?.matrix() - rho.matrix()));
        let slack = if offdiag <= 1e-9 { ZERO_TOL - value } else { value - ZERO_TOL };
        c1.record(slack);
    }

    for _ in 0..samples {
        let d = random_dim(&mut rng);
        let rho = random_density_with(d, rng.random_range(1..=d), &mut rng)?;
        let p = random_p(&mut rng);
        let ch = sio_to_kraus(&random_sio_with(d, d, &mut rng)?);
        let before = coherence_of(&rho, p)?;
        c2.record(before + COHERENCE_TOL - coherence_of(&apply_kraus(&rho, &ch)?, p)?);
        let mut avg = 0.0;
        for (prob, branch) in measure_ensemble(&rho, &ch)? {
            avg += prob * coherence_of(&branch, p)?;
        }
        c2e.record(before + COHERENCE_TOL - avg);
    }

    for _ in 0..samples {
        let d = random_dim(&mut rng);
        let p = random_p(&mut rng);
        let states = (0..3)
            .map(|_| {
                let rank = rng.random_range(1..=d);
                random_density_with(d, rank, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut w: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let mix = DensityMatrix::mixture(&w, &states)?;
        let mut avg = 0.0;
        for (wk, s) in w.iter().zip(&states) {
            avg += wk * coherence_of(s, p)?;
        }
        c3.record(avg + COHERENCE_TOL - coherence_of(&mix, p)?);
    }

    for _ in 0..samples {
        let rho = random_density_with(2, rng.random_range(1..=2), &mut rng)?;
        let v = bloch_from_qubit(&rho)?;
        for k in 1..=9 {
            let p = k as f64 / 10.0;
            let diff = (coherence_of(&rho, p)? - coherence_qubit_closed_form(&v, p)?).abs();
            closed.record(COHERENCE_TOL - diff);
        }
    }

    for _ in 0..samples {
        let d = random_dim(&mut rng);
        let p = random_p(&mut rng);
        let bound = max_coherence(d, p)?;
        extremal.record(bound + COHERENCE_TOL - coherence_of(&random_pure_with(d, &mut rng)?, p)?);
        let phases: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let at_max = coherence_of(&maximally_coherent(d, &phases)?, p)?;
        extremal.record(COHERENCE_TOL - (at_max - bound).abs());
    }

    for _ in 0..samples {
        let d = random_dim(&mut rng);
        let rho = random_density_with(d, d, &mut rng)?;
        let id = Unitary::identity(d);
        if !c0_is_finite(&rho, &id)? {
            distill.record(-1.0);
            continue;
        }
        let ch = sio_to_kraus(&random_sio_with(d, d, &mut rng)?);
        let ok = measure_ensemble(&rho, &ch)?
            .iter()
            .map(|(_, branch)| c0_is_finite(branch, &id))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        distill.record(if ok { 0.0 } else { -1.0 });
    }

    Ok(SuiteReport { suite: "coherence", properties: vec![c1, c2, c2e, c3, closed, extremal, distill] })
}

fn random_cq(rng: &mut ChaCha8Rng, db: usize) -> Result<BipartiteState> {
    let u = random_unitary_with(2, rng)?;
    let q: f64 = rng.random();
    let conds = [random_density_with(db, db, rng)?, random_density_with(db, rng.random_range(1..=db), rng)?];
    cq_state(&[q, 1.0 - q], &u, &conds)
}

fn random_two_qubit(rng: &mut ChaCha8Rng) -> Result<BipartiteState> {
    BipartiteState::new(random_density_with(4, 4, rng)?, (2, 2))
}

pub fn discord_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded_rng(seed.wrapping_add(1));
    let cfg = OptimizerConfig::default().with_seed(seed);
    let mut d1_zero = PropertyReport::new("D1 CQ states have zero discord");
    let mut d1_pos = PropertyReport::new("D1 non-CQ states have positive discord");
    let mut d2 = PropertyReport::new("D2 monotonicity under channels on B");
    let mut d4 = PropertyReport::new("D4 monotonicity under isotropic ECPO on A");
    let mut d4s = PropertyReport::new("D4 semiclassical ECPO destroys discord");
    let mut d3 = PropertyReport::new("D3 pure states bounded by maximally entangled");
    let mut lu = PropertyReport::new("local unitary invariance");

    let bell_value = discord(&maximally_entangled(2), 0.5, &cfg)?.value;
    for _ in 0..samples {
        let p = random_p(&mut rng);
        let db = rng.random_range(2..=3);
        let cq = random_cq(&mut rng, db)?;
        d1_zero.record(DISCORD_CQ_TOL - discord(&cq, p, &cfg)?.value);

        let rho = random_two_qubit(&mut rng)?;
        if discord_qubit_a_grid(&rho, p)?.value > 2.0 * DISCORD_POSITIVE_FLOOR {
            d1_pos.record(discord(&rho, p, &cfg)?.value - DISCORD_POSITIVE_FLOOR);
        }

        let before = discord(&rho, p, &cfg)?.value;
        let ch_b = sio_to_kraus(&random_sio_with(2, 2, &mut rng)?);
        let ch_b = if rng.random_bool(0.5) {
            ch_b
        } else {
            let u = random_unitary_with(2, &mut rng)?;
            let t = rng.random();
            ecpo_to_channel(&EcpoSpec::isotropic(t, u)?, 2)?
        };
        let after = discord(&apply_local(&rho, &ch_b, Subsystem::B)?, p, &cfg)?.value;
        d2.record(before + DISCORD_MONOTONE_TOL - after);

        for t in [0.0, 0.3, 0.7, 1.0] {
            let u = random_unitary_with(2, &mut rng)?;
            let ch = ecpo_to_channel(&EcpoSpec::isotropic(t, u)?, 2)?;
            let after = discord(&apply_local(&rho, &ch, Subsystem::A)?, p, &cfg)?.value;
            d4.record(before + DISCORD_MONOTONE_TOL - after);
        }
        let povm = projective_povm(&random_unitary_with(2, &mut rng)?);
        let semi = ecpo_to_channel(&EcpoSpec::semiclassical(povm, random_unitary_with(2, &mut rng)?)?, 2)?;
        d4s.record(DISCORD_CQ_TOL - discord(&apply_local(&rho, &semi, Subsystem::A)?, 0.5, &cfg)?.value);

        let ua = random_unitary_with(2, &mut rng)?;
        let vb = random_unitary_with(2, &mut rng)?;
        let rotated = discord(&rho.local_unitary(&ua, &vb)?, p, &cfg)?.value;
        lu.record(DISCORD_MONOTONE_TOL - (rotated - before).abs());

        let pure = BipartiteState::new(random_pure_with(4, &mut rng)?, (2, 2))?;
        d3.record(bell_value + DISCORD_PURE_TOL - discord(&pure, 0.5, &cfg)?.value);
    }

    Ok(SuiteReport { suite: "discord", properties: vec![d1_zero, d1_pos, d2, d4, d4s, d3, lu] })
}

pub fn conversion_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded_rng(seed.wrapping_add(2));
    let cfg = OptimizerConfig::default().with_seed(seed);
    let mut bound = PropertyReport::new("discord created ≤ initial coherence");
    let mut saturation = PropertyReport::new("CNOT saturates the bound");

    let plus = maximally_coherent(2, &[0.0, 0.0])?;
    let zero = DensityMatrix::basis_state(2, 0);
    let r = conversion_check(&plus, &zero, &KrausChannel::cnot(), 0.5, &cfg)?;
    saturation.record(1e-5 - r.slack.abs());

    for _ in 0..samples {
        let db = rng.random_range(2..=3);
        let rank = rng.random_range(1..=2);
        let rho_a = random_density_with(2, rank, &mut rng)?;
        let mut probs: Vec<f64> = (0..db).map(|_| rng.random::<f64>()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|x| *x /= total);
        let sigma_b = DensityMatrix::diagonal(&probs)?;
        let num_kraus = rng.random_range(1..=2 * db);
        let e = random_commuting_bipartite_sio_with(2, db, num_kraus, &mut rng)?;
        let p = random_p(&mut rng);
        let r = conversion_check(&rho_a, &sigma_b, &e, p, &cfg)?;
        bound.record(r.slack + CONVERSION_TOL);
    }
    Ok(SuiteReport { suite: "conversion", properties: vec![bound, saturation] })
}

pub fn estimation_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut band = PropertyReport::new("variance within [0.8, 1.3] x CRB");
    let mut unbiased = PropertyReport::new("mean within 3 standard errors");
    let mut bounded = PropertyReport::new("estimates in [0, 1]");

    let plus = maximally_coherent(2, &[0.0, 0.0])?;
    let povm = projective_povm(&Unitary::hadamard());
    let mu = 10_000;
    let runs = samples.div_ceil(100).max(1);
    for k in 0..runs {
        let p_true = [0.5, 0.3, 0.7, 0.2, 0.8][k % 5];
        let run = simulate_estimation(&plus, &Unitary::identity(2), p_true, mu, 200, &povm, seed.wrapping_add(k as u64))?;
        let f = coherence_of(&plus, p_true)?;
        let ratio = run.variance / crb_bound(f, mu)?;
        band.record((ratio - 0.8).min(1.3 - ratio));
        unbiased.record(3.0 * run.standard_error() - (run.mean - p_true).abs());
        for e in &run.estimates {
            bounded.record(e.min(1.0 - e));
        }
    }
    Ok(SuiteReport { suite: "estimation", properties: vec![band, unbiased, bounded] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_bookkeeping() {
        let mut r = PropertyReport::new("x");
        r.record(0.5);
        r.record(0.0);
        assert!(r.passed());
        assert_eq!(r.worst_slack, 0.0);
        r.record(-1e-9);
        r.record(f64::NAN);
        assert_eq!((r.checked, r.violations), (4, 2));
        assert!(r.worst_slack.is_nan());
        assert!(r.to_string().starts_with("FAIL x checked=4 violations=2"));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert_eq!("conversion".parse::<Suite>().unwrap(), Suite::Conversion);
        assert!("Coherence".parse::<Suite>().is_err());
    }

    #[test]
    fn small_runs_are_deterministic() {
        let a = coherence_suite(5, 9).unwrap();
        let b = coherence_suite(5, 9).unwrap();
        let worst = |s: &SuiteReport| s.properties.iter().map(|p| p.worst_slack).collect::<Vec<_>>();
        assert_eq!(worst(&a), worst(&b));
        assert!(a.passed());
    }
}
