//! Moving-mesh P1 finite-element solver for the coupled (u, w) system on
//! evolving intervals and axisymmetric surfaces of revolution.
//!
//! Time discretization is implicit Euler with the transport-consistent
//! pairing M(t+dt) u(t+dt) - M(t) u(t), which conserves the discrete mass
//! exactly. The quartic nonlinearity uses a convex-concave splitting; the
//! logarithmic one a damped full Newton iteration.

use crate::geometry::MovingDomain;
use crate::linalg::{BandedMatrix, LinalgError};
use crate::model::{
    mobility, potential_derivative, potential_second_derivative, potential_value, ModelError,
    ModelParams, PotentialKind,
};

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    #[error("mesh tangled at t = {t}: nodes {i} and {next} crossed", next = i + 1)]
    MeshTangled { t: f64, i: usize },
    #[error("Newton did not converge at t = {t}: residual {residual:.3e} after {iters} iterations")]
    NewtonDiverged { t: f64, residual: f64, iters: usize },
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Lagrangian mesh: fixed reference labels and their current images.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    pub reference: Vec<f64>,
    pub nodes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DiscreteState {
    pub mesh: Mesh1D,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub mobility_floor: f64,
    pub mass_lumping: bool,
    pub output_times: Vec<f64>,
}

impl SolverConfig {
    /// Layer-resolving defaults: dt = min(1e-3, eps^2/4), floor 1e-12 mbar.
    pub fn defaults(params: &ModelParams, t_end: f64) -> Self {
        Self {
            dt: (params.epsilon * params.epsilon / 4.0).min(1e-3),
            t_end,
            newton_tol: 1e-10,
            newton_max_iters: 30,
            mobility_floor: 1e-12 * params.mbar,
            mass_lumping: true,
            output_times: Vec::new(),
        }
    }
}

/// Default cell count: at least 16 cells per interfacial layer.
pub fn default_n_cells(domain: &MovingDomain, epsilon: f64, t_end: f64) -> usize {
    let l = domain.max_length(t_end);
    ((16.0 * l / epsilon).ceil() as usize).max(64)
}

/// Initial phase-field profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Constant(f64),
    /// offset + amp * tanh(rate * (x - center))
    ScaledTanh {
        offset: f64,
        amp: f64,
        rate: f64,
        center: f64,
    },
    /// Two polar caps of the upper phase: tanh((theta1 - x)/(eps sqrt 2))
    /// for x < split, else tanh((x - theta2)/(eps sqrt 2)).
    TwoCaps {
        theta1: f64,
        theta2: f64,
        split: f64,
    },
}

impl ProfileSpec {
    fn eval(&self, x: f64, epsilon: f64) -> f64 {
        match *self {
            ProfileSpec::Constant(c) => c,
            ProfileSpec::ScaledTanh {
                offset,
                amp,
                rate,
                center,
            } => offset + amp * (rate * (x - center)).tanh(),
            ProfileSpec::TwoCaps {
                theta1,
                theta2,
                split,
            } => {
                let s = epsilon * std::f64::consts::SQRT_2;
                if x < split {
                    ((theta1 - x) / s).tanh()
                } else {
                    ((x - theta2) / s).tanh()
                }
            }
        }
    }
}

/// Lumped mass weights m_i (interval: hat-function integrals; surface:
/// weighted by 2 pi rho g at the node).
fn lumped_mass(domain: &MovingDomain, t: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut m = vec![0.0; n];
    for e in 0..n - 1 {
        let h = nodes[e + 1] - nodes[e];
        if domain.is_surface() {
            let (g0, r0) = domain.metric_factors(nodes[e], t);
            let (g1, r1) = domain.metric_factors(nodes[e + 1], t);
            let tau = std::f64::consts::TAU;
            m[e] += 0.5 * h * tau * r0 * g0;
            m[e + 1] += 0.5 * h * tau * r1 * g1;
        } else {
            m[e] += 0.5 * h;
            m[e + 1] += 0.5 * h;
        }
    }
    m
}

/// Per-element stiffness coefficients s_e / h_e so that
/// (A u)_i = sum over adjacent elements of s_e (u_i - u_other) / h_e.
/// The surface weight 2 pi rho / g is integrated with two-point Gauss.
fn stiffness_coeffs(domain: &MovingDomain, t: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut se = vec![0.0; n - 1];
    for e in 0..n - 1 {
        let h = nodes[e + 1] - nodes[e];
        let s = if domain.is_surface() {
            let mid = 0.5 * (nodes[e] + nodes[e + 1]);
            let off = 0.5 * h / 3.0f64.sqrt();
            let val = |x: f64| {
                let (g, r) = domain.metric_factors(x, t);
                std::f64::consts::TAU * r / g
            };
            0.5 * (val(mid - off) + val(mid + off))
        } else {
            1.0
        };
        se[e] = s / h;
    }
    se
}

/// Apply the stiffness operator defined by element coefficients.
fn apply_stiffness(se: &[f64], x: &[f64], y: &mut [f64]) {
    let n = x.len();
    y[..n].fill(0.0);
    for e in 0..n - 1 {
        let flux = se[e] * (x[e] - x[e + 1]);
        y[e] += flux;
        y[e + 1] -= flux;
    }
}

pub fn initialize(
    domain: &MovingDomain,
    params: &ModelParams,
    profile: &ProfileSpec,
    n_cells: usize,
) -> Result<DiscreteState, SolverError> {
    if n_cells < 8 {
        return Err(SolverError::InvalidSetup("need at least 8 cells".into()));
    }
    params.validate()?;
    let nodes: Vec<f64> = if domain.is_surface() {
        // Cell-centred in the polar angle: no node at the poles, so the
        // vanishing weight enforces the natural boundary condition.
        let h = std::f64::consts::PI / n_cells as f64;
        (0..n_cells).map(|j| (j as f64 + 0.5) * h).collect()
    } else {
        let l = domain.length(0.0);
        (0..=n_cells).map(|j| l * j as f64 / n_cells as f64).collect()
    };
    let u: Vec<f64> = nodes
        .iter()
        .map(|&x| profile.eval(x, params.epsilon))
        .collect();
    if params.potential == PotentialKind::Logarithmic {
        for &ui in &u {
            if ui <= params.alpha || ui >= params.beta {
                return Err(SolverError::InvalidSetup(format!(
                    "initial value {ui} outside logarithmic bounds"
                )));
            }
        }
    }
    // w from the discrete chemical-potential relation.
    let m = lumped_mass(domain, 0.0, &nodes);
    let se = stiffness_coeffs(domain, 0.0, &nodes);
    let mut au = vec![0.0; nodes.len()];
    apply_stiffness(&se, &u, &mut au);
    let mut w = vec![0.0; nodes.len()];
    for i in 0..nodes.len() {
        w[i] = params.epsilon * au[i] / m[i] + potential_derivative(params, u[i])? / params.epsilon;
    }
    Ok(DiscreteState {
        mesh: Mesh1D {
            reference: nodes.clone(),
            nodes,
        },
        u,
        w,
        t: 0.0,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub newton_iters: usize,
    pub residual: f64,
}

/// Mobility element coefficients: M(u at element midpoint), floored, times
/// the stiffness coefficient.
fn mobility_coeffs(
    domain: &MovingDomain,
    t: f64,
    nodes: &[f64],
    u: &[f64],
    params: &ModelParams,
    floor: f64,
) -> Vec<f64> {
    let se = stiffness_coeffs(domain, t, nodes);
    se.iter()
        .enumerate()
        .map(|(e, &s)| {
            let um = 0.5 * (u[e] + u[e + 1]);
            s * mobility(params, um).max(floor)
        })
        .collect()
}

/// One implicit Euler step on the advected mesh.
pub fn step(
    state: &mut DiscreteState,
    domain: &MovingDomain,
    params: &ModelParams,
    config: &SolverConfig,
) -> Result<StepInfo, SolverError> {
    let n = state.u.len();
    let dt = config.dt;
    let t_new = state.t + dt;
    let m_old = lumped_mass(domain, state.t, &state.mesh.nodes);

    let mut nodes = state.mesh.nodes.clone();
    domain.advance_nodes(&mut nodes, state.t, dt);
    for i in 0..n - 1 {
        if nodes[i + 1] <= nodes[i] {
            return Err(SolverError::MeshTangled { t: t_new, i });
        }
    }
    let m_new = lumped_mass(domain, t_new, &nodes);
    let se = stiffness_coeffs(domain, t_new, &nodes);

    // Convex-concave splitting shift for the quartic; zero means the full
    // nonlinearity is implicit (logarithmic).
    let split_c = match params.potential {
        PotentialKind::Quartic => {
            let d = params.u_b - params.u_a;
            0.5 * d * d
        }
        PotentialKind::Logarithmic => 0.0,
    };
    let eps = params.epsilon;
    let u_old = state.u.clone();

    let mut u = state.u.clone();
    let mut w = state.w.clone();
    let mut au = vec![0.0; n];
    let mut amw = vec![0.0; n];
    let mut r = vec![0.0; 2 * n];

    // Row-normalized sup residual; fi = f(u) + c (u - u_old) implicit part.
    let eval_residual = |u: &[f64],
                             w: &[f64],
                             ame: &[f64],
                             au: &mut [f64],
                             amw: &mut [f64],
                             r: &mut [f64]|
     -> Result<f64, SolverError> {
        apply_stiffness(&se, u, au);
        apply_stiffness(ame, w, amw);
        let mut sup = 0.0f64;
        for i in 0..n {
            let fi = potential_derivative(params, u[i])? + split_c * (u[i] - u_old[i]);
            let r1 = m_new[i] * u[i] - m_old[i] * u_old[i] + dt * amw[i];
            let r2 = m_new[i] * w[i] - eps * au[i] - m_new[i] / eps * fi;
            r[2 * i] = r1;
            r[2 * i + 1] = r2;
            sup = sup.max((r1 / m_new[i]).abs()).max((r2 / m_new[i]).abs());
        }
        Ok(sup)
    };

    let mut ame = mobility_coeffs(domain, t_new, &nodes, &u, params, config.mobility_floor);
    let mut rnorm = eval_residual(&u, &w, &ame, &mut au, &mut amw, &mut r)?;
    let mut iters = 0;
    while rnorm > config.newton_tol {
        if iters >= config.newton_max_iters {
            return Err(SolverError::NewtonDiverged {
                t: t_new,
                residual: rnorm,
                iters,
            });
        }
        iters += 1;
        // Interleaved unknowns (u_0, w_0, u_1, w_1, ...): bandwidth 3.
        let mut jac = BandedMatrix::zeros(2 * n, 3, 3);
        for i in 0..n {
            let ru = 2 * i;
            let rw = 2 * i + 1;
            // d r1 / d u_i and d r1 / d w_*.
            jac.set(ru, 2 * i, m_new[i]);
            let mut wdiag = 0.0;
            if i > 0 {
                wdiag += ame[i - 1];
                jac.set(ru, 2 * i - 1, -dt * ame[i - 1]);
            }
            if i < n - 1 {
                wdiag += ame[i];
                jac.set(ru, 2 * i + 3, -dt * ame[i]);
            }
            jac.set(ru, 2 * i + 1, dt * wdiag);
            // d r2 / d w_i and d r2 / d u_*.
            jac.set(rw, 2 * i + 1, m_new[i]);
            let fip = potential_second_derivative(params, u[i])? + split_c;
            let mut udiag = -m_new[i] / eps * fip;
            if i > 0 {
                udiag -= eps * se[i - 1];
                jac.set(rw, 2 * i - 2, eps * se[i - 1]);
            }
            if i < n - 1 {
                udiag -= eps * se[i];
                jac.set(rw, 2 * i + 2, eps * se[i]);
            }
            jac.add(rw, 2 * i, udiag);
        }
        let lu = jac.factor()?;
        let mut delta: Vec<f64> = r.iter().map(|&v| -v).collect();
        lu.solve(&mut delta);

        let mut damping = 1.0;
        loop {
            let mut u_try = u.clone();
            let mut w_try = w.clone();
            let mut inside = true;
            for i in 0..n {
                u_try[i] += damping * delta[2 * i];
                w_try[i] += damping * delta[2 * i + 1];
                if params.potential == PotentialKind::Logarithmic
                    && (u_try[i] <= params.alpha || u_try[i] >= params.beta)
                {
                    inside = false;
                    break;
                }
            }
            if inside {
                let ame_try = mobility_coeffs(
                    domain,
                    t_new,
                    &nodes,
                    &u_try,
                    params,
                    config.mobility_floor,
                );
                let rn = eval_residual(&u_try, &w_try, &ame_try, &mut au, &mut amw, &mut r)?;
                if rn < rnorm || damping <= 0.25 {
                    u = u_try;
                    w = w_try;
                    ame = ame_try;
                    rnorm = rn;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-8 {
                return Err(SolverError::NewtonDiverged {
                    t: t_new,
                    residual: rnorm,
                    iters,
                });
            }
        }
    }

    state.mesh.nodes = nodes;
    state.u = u;
    state.w = w;
    state.t = t_new;
    Ok(StepInfo {
        newton_iters: iters,
        residual: rnorm,
    })
}

/// Ginzburg-Landau energy on the current mesh (lumped potential term).
pub fn energy(
    state: &DiscreteState,
    domain: &MovingDomain,
    params: &ModelParams,
) -> Result<f64, ModelError> {
    let nodes = &state.mesh.nodes;
    let m = lumped_mass(domain, state.t, nodes);
    let se = stiffness_coeffs(domain, state.t, nodes);
    let mut grad = 0.0;
    for e in 0..nodes.len() - 1 {
        let d = state.u[e + 1] - state.u[e];
        grad += se[e] * d * d;
    }
    let mut pot = 0.0;
    for i in 0..nodes.len() {
        pot += m[i] * potential_value(params, state.u[i])?;
    }
    Ok(0.5 * params.epsilon * grad + pot / params.epsilon)
}

pub fn total_mass(state: &DiscreteState, domain: &MovingDomain) -> f64 {
    let m = lumped_mass(domain, state.t, &state.mesh.nodes);
    m.iter().zip(&state.u).map(|(mi, ui)| mi * ui).sum()
}

/// Linear-interpolation crossings of the mid-level (u_a + u_b)/2, sorted.
pub fn locate_interfaces(state: &DiscreteState, params: &ModelParams) -> Vec<f64> {
    let mid = 0.5 * (params.u_a + params.u_b);
    let mut out = Vec::new();
    let x = &state.mesh.nodes;
    let u = &state.u;
    for i in 0..u.len() - 1 {
        let a = u[i] - mid;
        let b = u[i + 1] - mid;
        if a == 0.0 {
            out.push(x[i]);
        } else if a * b < 0.0 {
            out.push(x[i] + (x[i + 1] - x[i]) * a / (a - b));
        }
    }
    if *u.last().unwrap() == mid {
        out.push(*x.last().unwrap());
    }
    out
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub t: f64,
    pub energy: f64,
    pub mass: f64,
    pub interfaces: Vec<f64>,
}

#[derive(Debug)]
pub struct RunResult {
    pub trace: Vec<TraceRow>,
    pub snapshots: Vec<(f64, DiscreteState)>,
}

/// Step from t to t_end, shortening steps to land exactly on output times,
/// recording the per-step trace and the requested snapshots.
pub fn run(
    domain: &MovingDomain,
    params: &ModelParams,
    config: &SolverConfig,
    mut state: DiscreteState,
) -> Result<RunResult, SolverError> {
    let mut outputs: Vec<f64> = config
        .output_times
        .iter()
        .copied()
        .filter(|&t| t > state.t && t <= config.t_end)
        .collect();
    outputs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    let record =
        |state: &DiscreteState, trace: &mut Vec<TraceRow>| -> Result<(), SolverError> {
            trace.push(TraceRow {
                t: state.t,
                energy: energy(state, domain, params)?,
                mass: total_mass(state, domain),
                interfaces: locate_interfaces(state, params),
            });
            Ok(())
        };
    record(&state, &mut trace)?;
    if config.output_times.contains(&state.t) {
        snapshots.push((state.t, state.clone()));
    }

    let mut next_out = 0usize;
    while state.t < config.t_end - 1e-12 {
        let mut dt = config.dt.min(config.t_end - state.t);
        if next_out < outputs.len() {
            dt = dt.min(outputs[next_out] - state.t);
        }
        let stepped = SolverConfig {
            dt,
            ..config.clone()
        };
        step(&mut state, domain, params, &stepped)?;
        record(&state, &mut trace)?;
        if next_out < outputs.len() && (state.t - outputs[next_out]).abs() < 1e-10 {
            snapshots.push((outputs[next_out], state.clone()));
            next_out += 1;
        }
    }
    Ok(RunResult { trace, snapshots })
}
