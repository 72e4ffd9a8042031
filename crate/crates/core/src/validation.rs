//! Acceptance suite: twelve numbered checks of the rate pipeline, the
//! moment dynamics and the exact oracle against closed forms and each other.
//!
//! Every check returns a [`CriterionReport`] rather than panicking, so the
//! suite can be run from the command line and from tests alike.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bath::{psd, BathEnvironment, Sign, TlsBath, TlsParams};
use crate::dynamics::MomentSystem;
use crate::error::{Error, Result};
use crate::limits::{
    low_drive_limits, mollow_sideband, optimal_detuning, resonant_closed_form, saturated_big_gamma,
};
use crate::oracle::{bloch_correlator_numeric, steady_state_auto, OracleModel, DEFAULT_DIM_CAP};
use crate::presets::default_setup;
use crate::rates::SingleModeSetup;
use crate::scalar::c;

pub const CRITERION_COUNT: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "PASS"),
            Status::Fail => write!(f, "FAIL"),
            Status::Skipped(_) => write!(f, "SKIP"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    /// Headline measured quantity; its meaning is given in `detail`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    pub runtime: Duration,
    pub budget: Option<Duration>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let mut s = format!(
            "[{}] {:>2} {}: measured {:.6e}, tolerance {:.3e}, {:.3} s",
            self.status,
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.runtime.as_secs_f64()
        );
        if let Status::Skipped(reason) = &self.status {
            s.push_str(&format!(" ({reason})"));
        }
        if !self.detail.is_empty() {
            s.push_str(" | ");
            s.push_str(&self.detail);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Hilbert-space dimension cap handed to the exact oracle.
    pub oracle_dim_cap: usize,
    /// Seed for the randomized criteria.
    pub seed: u64,
    /// Treat exceeded runtime budgets as failures.
    pub enforce_budgets: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            oracle_dim_cap: DEFAULT_DIM_CAP,
            seed: 0x5eed_7157,
            enforce_budgets: true,
        }
    }
}

struct Outcome {
    passed: bool,
    measured: f64,
    tolerance: f64,
    detail: String,
}

const NAMES: [&str; CRITERION_COUNT] = [
    "zero-drive collapse",
    "low-drive decay limit",
    "saturation limit",
    "closed-form equivalence",
    "driving-rate structure",
    "Mollow sidebands",
    "amplification window",
    "stability map",
    "squeezing",
    "oracle equivalence",
    "correlator resolvent vs quadrature",
    "physicality",
];

const BUDGETS_MS: [Option<u64>; CRITERION_COUNT] = [
    Some(1_000),
    Some(1_000),
    None,
    Some(5_000),
    None,
    None,
    None,
    Some(30_000),
    None,
    Some(60_000),
    Some(10_000),
    None,
];

pub fn criterion_name(id: usize) -> Option<&'static str> {
    NAMES.get(id.wrapping_sub(1)).copied()
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, opts: &ValidationOptions) -> Result<CriterionReport> {
    let name =
        criterion_name(id).ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    let budget = BUDGETS_MS[id - 1].map(Duration::from_millis);
    let start = Instant::now();
    let result = match id {
        1 => zero_drive_collapse(),
        2 => low_drive_limit(),
        3 => saturation_limit(),
        4 => closed_form_equivalence(),
        5 => driving_rate_structure(),
        6 => mollow_sidebands(),
        7 => amplification_window(),
        8 => stability_map(),
        9 => squeezing(),
        10 => oracle_equivalence(opts),
        11 => correlator_quadrature(opts),
        _ => physicality(opts),
    };
    let runtime = start.elapsed();
    let mut report = CriterionReport {
        id,
        name,
        status: Status::Fail,
        measured: f64::NAN,
        tolerance: f64::NAN,
        detail: String::new(),
        runtime,
        budget,
    };
    match result {
        Ok(o) => {
            report.measured = o.measured;
            report.tolerance = o.tolerance;
            report.detail = o.detail;
            report.status = if o.passed { Status::Pass } else { Status::Fail };
            if let Some(b) = budget {
                if opts.enforce_budgets && runtime > b && report.status == Status::Pass {
                    report.status = Status::Fail;
                    report
                        .detail
                        .push_str(&format!("; runtime over budget of {} s", b.as_secs_f64()));
                }
            }
        }
        Err(Error::DimensionCap { dim, cap }) => {
            report.status = Status::Skipped(format!("oracle dimension {dim} exceeds cap {cap}"));
        }
        Err(e) => report.detail = format!("error: {e}"),
    }
    Ok(report)
}

/// Runs every criterion in order.
pub fn validate_all(opts: &ValidationOptions) -> Vec<CriterionReport> {
    (1..=CRITERION_COUNT)
        .map(|id| run_criterion(id, opts).expect("criterion ids are in range"))
        .collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

fn resonant_at_saturation(s: f64) -> SingleModeSetup {
    let base = default_setup();
    let drive = base.drive_for_saturation(s);
    base.with_drive(c(drive, 0.0))
}

/// Interior strict local maxima of a sampled curve.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len() - 1)
        .filter(|&k| y[k] > y[k - 1] && y[k] >= y[k + 1])
        .collect()
}

fn zero_drive_collapse() -> Result<Outcome> {
    let tol = 1e-14;
    let mut worst = 0.0f64;
    for temperature in [0.0, 0.3] {
        for d0 in [0.0, 3e-5, -1e-3] {
            let mut setup = default_setup().with_delta_0(d0);
            setup.env.temperature = temperature;
            setup.mode.drive = c(1e-6, -2e-7);
            let r = setup.rates()?;
            worst = worst
                .max(r.g.norm())
                .max(r.big_gamma.norm())
                .max((r.omega_prime - setup.mode.drive).norm());
        }
    }
    Ok(Outcome {
        passed: worst < tol,
        measured: worst,
        tolerance: tol,
        detail: "max of |g|, |Γ|, |Ω'-Ω0| at zero TLS drive".into(),
    })
}

fn low_drive_limit() -> Result<Outcome> {
    let setup = resonant_at_saturation(1e-6);
    let r = setup.rates()?;
    let n = setup.count as f64;
    let expected = 2.0 * n * setup.coupling().norm_sqr() / setup.kappa_t();
    let dev = (r.gamma - expected).abs() / expected;
    Ok(Outcome {
        passed: dev < 1e-2,
        measured: dev,
        tolerance: 1e-2,
        detail: format!("γ = {:.6e}, 2N|G|²/κt = {expected:.6e}", r.gamma),
    })
}

fn saturation_limit() -> Result<Outcome> {
    let strong = resonant_at_saturation(1e6);
    let kt = strong.kappa_t();
    let n = strong.count as f64;
    let r = strong.rates()?;
    let expected = saturated_big_gamma(n, strong.coupling(), kt, 0.0);
    let dev = rel(r.big_gamma, expected);

    // γ and δ against their weak-drive values; δ vanishes on resonance, so
    // both are also compared one linewidth off resonance
    let (gamma_low, _) = low_drive_limits(n, strong.coupling(), kt, 0.0, strong.tls.omega_b, 0.0);
    let mut ratio = r.gamma.abs() / gamma_low;
    let off = strong.clone().with_delta_0(kt);
    let r_off = off.rates()?;
    let (gamma_low_off, delta_low_off) =
        low_drive_limits(n, off.coupling(), kt, kt, off.tls.omega_b, 0.0);
    ratio = ratio
        .max(r_off.gamma.abs() / gamma_low_off)
        .max(r_off.delta.abs() / delta_low_off.abs());
    Ok(Outcome {
        passed: dev < 1e-3 && ratio < 1e-4,
        measured: dev,
        tolerance: 1e-3,
        detail: format!(
            "Γ = {:.6e}; max |γ|,|δ| over weak-drive values {ratio:.3e} (tolerance 1e-4)",
            r.big_gamma.re
        ),
    })
}

fn closed_form_equivalence() -> Result<Outcome> {
    let base = default_setup();
    let k1 = base.tls.kappa1;
    let n = base.count as f64;
    let mut worst = 0.0f64;
    for s in [1e-2, 1.0, 1e2] {
        let setup = resonant_at_saturation(s);
        for d0 in linspace(-1e3 * k1, 1e3 * k1, 1001) {
            let r = setup.clone().with_delta_0(d0).rates()?;
            let (g, big_gamma) = resonant_closed_form(n, setup.coupling(), k1, s, d0);
            worst = worst.max(rel(r.g, g)).max(rel(r.big_gamma, big_gamma));
        }
    }
    Ok(Outcome {
        passed: worst < 1e-10,
        measured: worst,
        tolerance: 1e-10,
        detail: "max relative deviation of g and Γ over 3×1001 points".into(),
    })
}

fn golden_section_max(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > width {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn driving_rate_structure() -> Result<Outcome> {
    let drive_at =
        |u: f64| -> Result<f64> { Ok(resonant_at_saturation(u.exp()).rates()?.omega_prime.norm()) };
    let s_max = golden_section_max(drive_at, 1e-2f64.ln(), 1e2f64.ln(), 1e-10)?.exp();
    let s_dev = (s_max - 1.0).abs();

    let base = default_setup();
    let kt = base.kappa_t();
    let mut worst_steps = 0.0f64;
    let mut shape_ok = true;
    for factor in [2.0, 4.0] {
        let drive = factor * kt;
        let target = optimal_detuning(drive, kt)?;
        let grid = linspace(-3.0 * drive, 3.0 * drive, 2001);
        let step = grid[1] - grid[0];
        let curve = grid
            .iter()
            .map(|&db| {
                Ok(base
                    .clone()
                    .with_drive(c(drive, 0.0))
                    .with_delta_b(db)
                    .rates()?
                    .omega_prime
                    .norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        let peaks = local_maxima(&curve);
        if peaks.len() != 2 {
            shape_ok = false;
            continue;
        }
        for (&k, sign) in peaks.iter().zip([-1.0, 1.0]) {
            worst_steps = worst_steps.max((grid[k] - sign * target).abs() / step);
        }
    }
    Ok(Outcome {
        passed: s_dev < 1e-6 && shape_ok && worst_steps <= 1.0,
        measured: s_dev,
        tolerance: 1e-6,
        detail: format!(
            "argmax_s |Ω'| = {s_max:.9}; double peaks {} with worst offset {worst_steps:.3} grid steps (tolerance 1)",
            if shape_ok { "found" } else { "missing" }
        ),
    })
}

fn mollow_sidebands() -> Result<Outcome> {
    let base = default_setup();
    let kt = base.kappa_t();
    let drive = 100.0 * kt;
    let setup = base.with_drive(c(drive, 0.0));
    let target = mollow_sideband(drive, kt)?;
    let grid = linspace(-2.0 * drive, 2.0 * drive, 2001);
    let step = grid[1] - grid[0];
    let curve = grid
        .iter()
        .map(|&d0| Ok(setup.clone().with_delta_0(d0).rates()?.big_gamma.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let side: Vec<usize> = local_maxima(&curve)
        .into_iter()
        .filter(|&k| grid[k].abs() > drive / 2.0)
        .collect();
    let neg = side.iter().filter(|&&k| grid[k] < 0.0).count();
    let pos = side.len() - neg;
    let worst = side
        .iter()
        .map(|&k| (grid[k].abs() - target).abs() / step)
        .fold(0.0f64, f64::max);
    Ok(Outcome {
        passed: neg == 1 && pos == 1 && worst <= 1.0,
        measured: worst,
        tolerance: 1.0,
        detail: format!(
            "{} sideband maxima, offset from √(Ω²-κt²/4) in grid steps",
            side.len()
        ),
    })
}

fn amplification_window() -> Result<Outcome> {
    let base = default_setup();
    let kt = base.kappa_t();
    let drive = 100.0 * kt;
    let setup = base.with_drive(c(drive, 0.0));
    let gamma_at = |d0: f64| -> Result<f64> { Ok(setup.clone().with_delta_0(d0).rates()?.gamma) };
    let mut violations = 0usize;
    let mut inside = 0usize;
    let mut outside = 0usize;
    for d0 in linspace(-2.5 * drive, 2.5 * drive, 1000) {
        let a = d0.abs();
        let g = gamma_at(d0)?;
        if a >= kt && a <= (1.0 - 1e-3) * drive {
            inside += 1;
            violations += usize::from(g >= 0.0);
        } else if a >= drive {
            outside += 1;
            violations += usize::from(g <= 0.0);
        }
    }
    let centre = gamma_at(0.0)?;
    violations += usize::from(centre <= 0.0);
    Ok(Outcome {
        passed: violations == 0 && inside > 0 && outside > 0,
        measured: violations as f64,
        tolerance: 0.0,
        detail: format!(
            "sign violations over {inside} window and {outside} outer grid points plus Δ0 = 0"
        ),
    })
}

fn stability_map() -> Result<Outcome> {
    let base = default_setup();
    let drives = logspace(1e-6, 1e-2, 100);
    let mut gammas = logspace(1e-8, 1e-5, 100);
    gammas.push(3e-8);
    let rates = drives
        .iter()
        .map(|&d| base.clone().with_drive(c(d, 0.0)).rates())
        .collect::<Result<Vec<_>>>()?;
    let mut mismatches = 0usize;
    let mut unstable_low = 0usize;
    let mut unstable_high = 0usize;
    for &g0 in &gammas {
        for r in &rates {
            let st = MomentSystem::new(r, g0, 0.0, 0.0).stability()?;
            mismatches += usize::from(st.stable != st.criterion);
            if !st.stable {
                if g0 == 3e-8 {
                    unstable_low += 1;
                }
                if g0 >= 1e-6 {
                    unstable_high += 1;
                }
            }
        }
    }
    Ok(Outcome {
        passed: mismatches == 0 && unstable_low > 0 && unstable_high == 0,
        measured: mismatches as f64,
        tolerance: 0.0,
        detail: format!(
            "eigenvalue/criterion mismatches; {unstable_low} unstable points at γ0 = 3e-8, {unstable_high} at γ0 ≥ 1e-6"
        ),
    })
}

fn squeezing() -> Result<Outcome> {
    let base = default_setup();
    let drives = logspace(1e-6, 1e-2, 400);
    let mut s_values = Vec::with_capacity(drives.len());
    let mut full = Vec::with_capacity(drives.len());
    let mut no_g = Vec::with_capacity(drives.len());
    for &d in &drives {
        let setup = base.clone().with_drive(c(d, 0.0));
        let ms = MomentSystem::from_setup(&setup)?;
        s_values.push(setup.saturation());
        full.push(ms.steady_state().map(|r| r.xi).unwrap_or(f64::NAN));
        no_g.push(
            ms.without_coherent_squeezing()
                .steady_state()
                .map(|r| r.xi)
                .unwrap_or(f64::NAN),
        );
    }
    let squeezed: Vec<usize> = (0..full.len()).filter(|&k| full[k] > 1.0).collect();
    let contiguous = squeezed.windows(2).all(|w| w[1] == w[0] + 1);
    let near_tenth = (0..s_values.len())
        .min_by(|&a, &b| {
            (s_values[a].ln() - 0.1f64.ln())
                .abs()
                .total_cmp(&(s_values[b].ln() - 0.1f64.ln()).abs())
        })
        .expect("grid");
    let max_full = full
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let max_no_g = no_g
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let differ = full.iter().zip(&no_g).any(|(a, b)| (a - b).abs() > 1e-6);
    let passed = !squeezed.is_empty()
        && contiguous
        && squeezed.contains(&near_tenth)
        && differ
        && max_full < max_no_g;
    let range = if squeezed.is_empty() {
        "none".to_string()
    } else {
        format!(
            "s ∈ [{:.3e}, {:.3e}]",
            s_values[squeezed[0]],
            s_values[*squeezed.last().expect("nonempty")]
        )
    };
    Ok(Outcome {
        passed,
        measured: max_full,
        tolerance: max_no_g,
        detail: format!("max ξ with both mechanisms vs max ξ with g = 0; squeezed for {range}"),
    })
}

fn oracle_setup(ratio: f64) -> SingleModeSetup {
    let mut setup = default_setup().with_gamma_0(3e-6);
    setup.count = 1;
    let kt = setup.kappa_t();
    setup.tls.couplings = vec![c(ratio * kt, 0.0)];
    let drive = setup.drive_for_saturation(1.0);
    setup.with_drive(c(drive, 0.0))
}

fn oracle_equivalence(opts: &ValidationOptions) -> Result<Outcome> {
    let mut deviations = Vec::new();
    for ratio in [1e-1, 3e-2, 1e-2] {
        let setup = oracle_setup(ratio);
        let eff = MomentSystem::from_setup(&setup)?.steady_state()?.v_ss;
        let exact = steady_state_auto(&OracleModel::literal(&setup), 8, opts.oracle_dim_cap)?;
        let m = exact.expectations.moments();
        let dev = [0, 1, 3]
            .iter()
            .map(|&k| rel(eff[k], m[k]))
            .fold(0.0f64, f64::max);
        deviations.push(dev);
    }
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    let last = deviations[2];
    Ok(Outcome {
        passed: last < 0.05 && monotone,
        measured: last,
        tolerance: 0.05,
        detail: format!(
            "max relative moment deviation at G/κt = 0.1, 0.03, 0.01: {:.3e}, {:.3e}, {:.3e}",
            deviations[0], deviations[1], deviations[2]
        ),
    })
}

fn random_tls(rng: &mut ChaCha8Rng) -> (TlsParams, BathEnvironment, f64) {
    let omega_b = 10.0;
    let delta_b = rng.gen_range(-3.0..3.0);
    let drive = Complex64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(0.0..2.0 * PI));
    let coupling = Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..2.0 * PI));
    let p = TlsParams {
        omega_b,
        kappa1: 1.0,
        kappa2: rng.gen_range(0.0..1.0),
        drive,
        couplings: vec![coupling],
    };
    let env = BathEnvironment {
        temperature: if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..10.0)
        },
        omega_d: omega_b - delta_b,
    };
    (p, env, rng.gen_range(-5.0..5.0))
}

fn correlator_quadrature(opts: &ValidationOptions) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (p, env, delta_m) = random_tls(&mut rng);
        let g = p.couplings[0];
        let bath = TlsBath::identical(1, p.clone());
        for alpha in Sign::BOTH {
            for beta in Sign::BOTH {
                let resolvent = psd(&bath, &env, &[delta_m], alpha, beta, 0, 0)?;
                let quad = alpha.apply(g)
                    * beta.apply(g)
                    * bloch_correlator_numeric(&p, &env, alpha, beta, delta_m)?;
                worst = worst.max((resolvent - quad).norm());
            }
        }
    }
    Ok(Outcome {
        passed: worst < 1e-8,
        measured: worst,
        tolerance: 1e-8,
        detail: "max absolute PSD deviation over 50 random TLS and all sign pairs".into(),
    })
}

fn physicality(opts: &ValidationOptions) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let log_uniform =
        |rng: &mut ChaCha8Rng, lo: f64, hi: f64| rng.gen_range(lo.ln()..hi.ln()).exp();
    let mut worst = f64::INFINITY;
    let mut stable = 0usize;
    let mut bad = 0usize;
    for _ in 0..1000 {
        let drive = Complex64::from_polar(
            log_uniform(&mut rng, 1e-7, 1e-2),
            rng.gen_range(0.0..2.0 * PI),
        );
        let mut setup = default_setup()
            .with_drive(drive)
            .with_delta_b(rng.gen_range(-5e-4..5e-4))
            .with_delta_0(rng.gen_range(-5e-4..5e-4))
            .with_gamma_0(log_uniform(&mut rng, 1e-8, 1e-5));
        setup.tls.kappa2 = rng.gen_range(0.0..5e-5);
        if rng.gen_bool(0.5) {
            setup.env.temperature = rng.gen_range(0.0..0.3);
        }
        let report = match MomentSystem::from_setup(&setup)?.steady_state() {
            Ok(r) => r,
            Err(Error::Unstable { .. }) => continue,
            Err(e) => return Err(e),
        };
        stable += 1;
        bad += usize::from(!report.physical);
        worst = worst
            .min(report.covariance.det() - 0.25)
            .min(report.centered_occupation);
    }
    Ok(Outcome {
        passed: bad == 0 && stable > 0,
        measured: worst,
        tolerance: -1e-9,
        detail: format!("min of det σ - 1/4 and centered occupation over {stable} stable points; {bad} unphysical"),
    })
}
