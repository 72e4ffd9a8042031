//! Named scenarios. Each evaluates one quantity family over the configured
//! sweep and returns a [`Table`] with the sweep value(s) in the leading
//! column(s).

use rayon::prelude::*;
use tlsbath::dynamics::{approx_steady_state, default_tau_grid, MomentSystem, SteadyStateReport};
use tlsbath::oracle::{steady_state_auto, OracleModel};
use tlsbath::rates::SingleModeSetup;
use tlsbath::{Complex64, Error};

use crate::config::{apply, Config, Spacing, Sweep, SweepVariable};
use crate::error::CliError;
use crate::output::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// Every single-mode rate.
    Rates,
    /// Effective coherent drive `Ω'`.
    Driving,
    /// Squeezing-type dissipation `Γ`.
    GammaRate,
    /// Coherent squeezing rate `g`.
    SqueezeRate,
    /// Decay rate `γ` with its gain and loss parts.
    DecayRate,
    /// Frequency shift `δ`.
    FreqShift,
    /// Steady-state moments, exact and approximate.
    SteadyState,
    /// First-order coherence `g¹(τ)`.
    Coherence,
    /// Stability verdicts on a two-dimensional grid.
    StabilityMap,
    /// Squeezing parameter with and without `g`.
    Squeezing,
    /// Effective moments against the exact density-matrix model.
    OracleValidate,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Rates => "rates",
            Scenario::Driving => "driving",
            Scenario::GammaRate => "gamma-rate",
            Scenario::SqueezeRate => "squeeze-rate",
            Scenario::DecayRate => "decay-rate",
            Scenario::FreqShift => "freq-shift",
            Scenario::SteadyState => "steady-state",
            Scenario::Coherence => "coherence",
            Scenario::StabilityMap => "stability-map",
            Scenario::Squeezing => "squeezing",
            Scenario::OracleValidate => "oracle-validate",
        }
    }

    fn columns(self) -> Vec<&'static str> {
        match self {
            Scenario::Rates => vec![
                "Omega_prime_re",
                "Omega_prime_im",
                "delta",
                "g_re",
                "g_im",
                "gamma_plus",
                "gamma_minus",
                "gamma",
                "Gamma_re",
                "Gamma_im",
                "s",
            ],
            Scenario::Driving => vec!["Omega_prime_re", "Omega_prime_im", "Omega_prime_abs", "s"],
            Scenario::GammaRate => vec!["Gamma_re", "Gamma_im", "Gamma_abs"],
            Scenario::SqueezeRate => vec!["g_re", "g_im", "g_abs"],
            Scenario::DecayRate => vec!["gamma", "gamma_plus", "gamma_minus"],
            Scenario::FreqShift => vec!["delta"],
            Scenario::SteadyState => vec![
                "stable",
                "n",
                "s_re",
                "s_im",
                "s2_re",
                "s2_im",
                "n_approx",
                "s_approx_re",
                "s_approx_im",
                "xi",
            ],
            Scenario::Coherence => vec!["g1_re", "g1_im", "g1_abs"],
            Scenario::StabilityMap => vec!["stable", "criterion", "max_re"],
            Scenario::Squeezing => vec!["stable", "xi", "xi_without_g"],
            Scenario::OracleValidate => vec![
                "n_eff",
                "n_exact",
                "n_rel_err",
                "s_eff_re",
                "s_eff_im",
                "s_exact_re",
                "s_exact_im",
                "s_rel_err",
                "s2_eff_re",
                "s2_eff_im",
                "s2_exact_re",
                "s2_exact_im",
                "s2_rel_err",
                "fock_dim",
            ],
        }
    }
}

/// Default axes of the stability map when none are configured.
pub fn default_map_axes() -> (Sweep, Sweep) {
    (
        Sweep::new(SweepVariable::OmegaB, 1e-6, 1e-2, 100, Spacing::Log),
        Sweep::new(SweepVariable::Gamma0, 1e-8, 1e-5, 100, Spacing::Log),
    )
}

pub fn run(scenario: Scenario, config: &Config, jobs: Option<usize>) -> Result<Table, CliError> {
    let base = config.setup();
    let axes = axes(scenario, config, &base)?;

    let mut columns: Vec<String> = axes.iter().map(|(v, _)| v.to_string()).collect();
    columns.extend(scenario.columns().into_iter().map(String::from));
    let mut table = Table::new(columns);

    if scenario == Scenario::Coherence {
        for row in coherence(&base, &axes[0].1)? {
            table.push(row);
        }
        return Ok(table);
    }

    let points: Vec<Vec<f64>> = match axes.as_slice() {
        [] => vec![vec![]],
        [(_, xs)] => xs.iter().map(|&x| vec![x]).collect(),
        [(_, xs), (_, ys)] => ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| vec![x, y]))
            .collect(),
        _ => unreachable!("at most two axes"),
    };
    let vars: Vec<SweepVariable> = axes.iter().map(|(v, _)| *v).collect();
    let evaluate = |p: &Vec<f64>| -> Result<Vec<Cell>, CliError> {
        let setup = vars
            .iter()
            .zip(p)
            .fold(base.clone(), |s, (&v, &x)| apply(&s, v, x));
        let mut row: Vec<Cell> = p.iter().map(|&x| Cell::Num(x)).collect();
        row.extend(point(scenario, &setup, config)?);
        Ok(row)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config("--jobs", e.to_string()))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(evaluate)
            .collect::<Result<Vec<_>, _>>()
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

type Axes = Vec<(SweepVariable, Vec<f64>)>;

fn axes(scenario: Scenario, config: &Config, base: &SingleModeSetup) -> Result<Axes, CliError> {
    let tau_axis = config
        .sweep
        .as_ref()
        .is_some_and(|s| s.variable == SweepVariable::Tau);
    match scenario {
        Scenario::Coherence => {
            if config.sweep_y.is_some() {
                return Err(CliError::config(
                    "sweep_y",
                    "coherence takes a single tau axis".into(),
                ));
            }
            match &config.sweep {
                Some(s) if tau_axis => Ok(vec![(SweepVariable::Tau, s.values())]),
                Some(_) => Err(CliError::config(
                    "sweep.variable",
                    "coherence sweeps must use tau".into(),
                )),
                None => {
                    let ms = MomentSystem::from_setup(base)?;
                    Ok(vec![(SweepVariable::Tau, default_tau_grid(ms.gamma_total))])
                }
            }
        }
        _ if tau_axis => Err(CliError::config(
            "sweep.variable",
            format!("tau is only valid for coherence, not {}", scenario.name()),
        )),
        Scenario::StabilityMap => {
            let (dx, dy) = default_map_axes();
            let x = config.sweep.clone().unwrap_or(dx);
            let y = config.sweep_y.clone().unwrap_or(dy);
            if x.variable == y.variable {
                return Err(CliError::config(
                    "sweep_y.variable",
                    "must differ from sweep.variable".into(),
                ));
            }
            Ok(vec![(x.variable, x.values()), (y.variable, y.values())])
        }
        _ => {
            if config.sweep_y.is_some() {
                return Err(CliError::config(
                    "sweep_y",
                    format!(
                        "only stability-map takes a second axis, not {}",
                        scenario.name()
                    ),
                ));
            }
            Ok(config
                .sweep
                .iter()
                .map(|s| (s.variable, s.values()))
                .collect())
        }
    }
}

fn complex(z: Complex64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

/// `Ok(None)` when the point has no steady state.
fn steady(ms: &MomentSystem) -> Result<Option<SteadyStateReport>, CliError> {
    match ms.steady_state() {
        Ok(r) => Ok(Some(r)),
        Err(Error::Unstable { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Symmetric relative error, zero when both values vanish.
fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn point(
    scenario: Scenario,
    setup: &SingleModeSetup,
    config: &Config,
) -> Result<Vec<Cell>, CliError> {
    let width = scenario.columns().len();
    let cells = match scenario {
        Scenario::Rates => {
            let r = setup.rates()?;
            let mut v = complex(r.omega_prime).to_vec();
            v.push(Cell::Num(r.delta));
            v.extend(complex(r.g));
            v.extend([
                Cell::Num(r.gamma_plus),
                Cell::Num(r.gamma_minus),
                Cell::Num(r.gamma),
            ]);
            v.extend(complex(r.big_gamma));
            v.push(Cell::Num(setup.saturation()));
            v
        }
        Scenario::Driving => {
            let w = setup.rates()?.omega_prime;
            vec![
                Cell::Num(w.re),
                Cell::Num(w.im),
                Cell::Num(w.norm()),
                Cell::Num(setup.saturation()),
            ]
        }
        Scenario::GammaRate => {
            let b = setup.rates()?.big_gamma;
            vec![Cell::Num(b.re), Cell::Num(b.im), Cell::Num(b.norm())]
        }
        Scenario::SqueezeRate => {
            let g = setup.rates()?.g;
            vec![Cell::Num(g.re), Cell::Num(g.im), Cell::Num(g.norm())]
        }
        Scenario::DecayRate => {
            let r = setup.rates()?;
            vec![
                Cell::Num(r.gamma),
                Cell::Num(r.gamma_plus),
                Cell::Num(r.gamma_minus),
            ]
        }
        Scenario::FreqShift => vec![Cell::Num(setup.rates()?.delta)],
        Scenario::SteadyState => {
            let ms = MomentSystem::from_setup(setup)?;
            match steady(&ms)? {
                None => unstable_row(width),
                Some(r) => {
                    let v = &r.v_ss;
                    let mut out = vec![Cell::Bool(true), Cell::Num(v[0].re)];
                    // v[2] is ⟨s†⟩, so ⟨s⟩ is its conjugate
                    out.extend(complex(v[2].conj()));
                    out.extend(complex(v[4].conj()));
                    match approx_steady_state(&ms.rates, ms.gamma_0, ms.nbar_0) {
                        Ok((n, s_dag)) => {
                            out.push(Cell::Num(n));
                            out.extend(complex(s_dag.conj()));
                        }
                        Err(_) => out.extend([Cell::Unstable, Cell::Unstable, Cell::Unstable]),
                    }
                    out.push(Cell::Num(r.xi));
                    out
                }
            }
        }
        Scenario::StabilityMap => {
            let st = MomentSystem::from_setup(setup)?.stability()?;
            vec![
                Cell::Bool(st.stable),
                Cell::Bool(st.criterion),
                Cell::Num(st.max_re),
            ]
        }
        Scenario::Squeezing => {
            let ms = MomentSystem::from_setup(setup)?;
            match steady(&ms)? {
                None => unstable_row(width),
                Some(r) => {
                    let without = match steady(&ms.without_coherent_squeezing())? {
                        Some(w) => Cell::Num(w.xi),
                        None => Cell::Unstable,
                    };
                    vec![Cell::Bool(true), Cell::Num(r.xi), without]
                }
            }
        }
        Scenario::OracleValidate => {
            let ms = MomentSystem::from_setup(setup)?;
            match steady(&ms)? {
                None => unstable_row(width),
                Some(r) => {
                    let model = OracleModel::rescaled(setup, config.oracle.n_tls);
                    let exact =
                        steady_state_auto(&model, config.oracle.fock_start, config.oracle.dim_cap)?;
                    let m = exact.expectations.moments();
                    let v = &r.v_ss;
                    let pairs = [
                        (v[0], m[0]),
                        (v[2].conj(), m[2].conj()),
                        (v[4].conj(), m[4].conj()),
                    ];
                    let mut out = vec![
                        Cell::Num(v[0].re),
                        Cell::Num(m[0].re),
                        Cell::Num(rel_err(pairs[0].0, pairs[0].1)),
                    ];
                    for (eff, ex) in &pairs[1..] {
                        out.extend(complex(*eff));
                        out.extend(complex(*ex));
                        out.push(Cell::Num(rel_err(*eff, *ex)));
                    }
                    out.push(Cell::Int(exact.spec.fock_dim as i64));
                    out
                }
            }
        }
        Scenario::Coherence => unreachable!("handled by coherence()"),
    };
    debug_assert_eq!(cells.len(), width);
    Ok(cells)
}

fn unstable_row(width: usize) -> Vec<Cell> {
    let mut row = vec![Cell::Bool(false)];
    row.resize(width, Cell::Unstable);
    row
}

fn coherence(setup: &SingleModeSetup, tau: &[f64]) -> Result<Vec<Vec<Cell>>, CliError> {
    let ms = MomentSystem::from_setup(setup)?;
    let Some(r) = steady(&ms)? else {
        return Ok(tau
            .iter()
            .map(|&t| vec![Cell::Num(t), Cell::Unstable, Cell::Unstable, Cell::Unstable])
            .collect());
    };
    let series = ms.coherence_g1(&r.v_ss, tau)?;
    Ok(series
        .tau
        .iter()
        .zip(&series.g1)
        .map(|(&t, g)| {
            vec![
                Cell::Num(t),
                Cell::Num(g.re),
                Cell::Num(g.im),
                Cell::Num(g.norm()),
            ]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(overrides: &[&str]) -> Config {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        Config::load(None, &o).unwrap()
    }

    #[test]
    fn single_point_without_sweep() {
        let t = run(Scenario::Rates, &config(&["tls.Omega_B=1e-5"]), Some(1)).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.columns.len(), Scenario::Rates.columns().len());
    }

    #[test]
    fn rows_follow_sweep_order_for_any_pool_size() {
        let c = config(&[
            "sweep.variable=\"Delta_0\"",
            "sweep.min=-1e-3",
            "sweep.max=1e-3",
            "sweep.count=17",
        ]);
        let one = run(Scenario::DecayRate, &c, Some(1)).unwrap();
        let four = run(Scenario::DecayRate, &c, Some(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.rows[0][0], Cell::Num(-1e-3));
        assert_eq!(one.rows[16][0], Cell::Num(1e-3));
    }

    #[test]
    fn unstable_points_carry_the_sentinel() {
        // resonant, weakly damped mode at intermediate drive
        let c = config(&["mode.gamma_0=3e-8", "tls.Omega_B=1.2e-4"]);
        assert!(
            !MomentSystem::from_setup(&c.setup())
                .unwrap()
                .stability()
                .unwrap()
                .stable
        );
        let t = run(Scenario::SteadyState, &c, None).unwrap();
        assert_eq!(t.rows[0][0], Cell::Bool(false));
        assert!(t.rows[0][1..].iter().all(|x| *x == Cell::Unstable));
    }

    #[test]
    fn tau_axis_rejected_outside_coherence() {
        let c = config(&[
            "sweep.variable=\"tau\"",
            "sweep.min=0",
            "sweep.max=1",
            "sweep.count=3",
        ]);
        match run(Scenario::Driving, &c, None) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "sweep.variable"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coherence_uses_default_grid() {
        let t = run(Scenario::Coherence, &config(&["tls.Omega_B=1e-6"]), None).unwrap();
        assert_eq!(t.rows.len(), tlsbath::dynamics::DEFAULT_TAU_POINTS);
        assert_eq!(t.rows[0][1], Cell::Num(1.0));
    }
}
