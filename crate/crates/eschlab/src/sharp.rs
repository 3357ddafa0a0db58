//! Sharp-interface companion solvers: the rotationally symmetric two-cap
//! system on the unit sphere and the 1D interval free boundary problem, both
//! obtained from the phase-field model in the thin-interface limit.

use crate::geometry::MovingDomain;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpCapState {
    pub theta1: f64,
    pub theta2: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Lower phase u_a on the left subinterval.
    MinusPlus,
    /// Upper phase u_b on the left subinterval.
    PlusMinus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpIntervalState {
    pub lambda: f64,
    pub t: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereModelParams {
    pub vbar: f64,
    pub mbar: f64,
    pub s_const: f64,
    pub u_a: f64,
    pub u_b: f64,
}

impl SphereModelParams {
    /// Quartic +-1 wells with S = sqrt(2)/3.
    pub fn quartic_pm1(vbar: f64, mbar: f64) -> Self {
        Self {
            vbar,
            mbar,
            s_const: std::f64::consts::SQRT_2 / 3.0,
            u_a: -1.0,
            u_b: 1.0,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SharpError {
    #[error("degenerate cap configuration: log tan(theta/2) coincide at {0}")]
    DegenerateCaps(f64),
    #[error("state invariant violated: {0}")]
    InvalidState(String),
    #[error("angle {theta} lies outside region {region:?}")]
    RegionMismatch { theta: f64, region: CapRegion },
    #[error("step size underflow near the singular event at t = {0}")]
    StepUnderflow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapRegion {
    B1,
    A,
    B2,
}

#[derive(Debug, Clone, Copy)]
pub struct CapCoefficients {
    pub c1a: f64,
    pub c2a: f64,
    pub c2b1: f64,
    pub c2b2: f64,
}

fn log_tan_half(theta: f64) -> f64 {
    (theta / 2.0).tan().ln()
}

fn check_caps(state: &SharpCapState) -> Result<(), SharpError> {
    if !(0.0 < state.theta1 && state.theta1 < state.theta2 && state.theta2 < std::f64::consts::PI)
    {
        return Err(SharpError::InvalidState(format!(
            "need 0 < theta1 < theta2 < pi, got {} and {}",
            state.theta1, state.theta2
        )));
    }
    Ok(())
}

/// Coefficients of the piecewise potential W. The band coefficients
/// (c1a, c2a) are obtained from the 2x2 linear system expressing the
/// Gibbs-Thomson values at both interfaces; `cap_coefficients_formula`
/// provides the independent closed-form c1a for cross-checking.
pub fn cap_coefficients(
    state: &SharpCapState,
    p: &SphereModelParams,
) -> Result<CapCoefficients, SharpError> {
    check_caps(state)?;
    let (t1, t2) = (state.theta1, state.theta2);
    let l1 = log_tan_half(t1);
    let l2 = log_tan_half(t2);
    if (l1 - l2).abs() < 1e-14 {
        return Err(SharpError::DegenerateCaps(l1));
    }
    let s = p.s_const;
    let va = p.vbar / p.mbar;
    // Gibbs-Thomson boundary values of W in the band region.
    let gt1 = s * t1.cos() / t1.sin();
    let gt2 = -s * t2.cos() / t2.sin();
    // c1a l_k - (u_a vbar/mbar) cos(theta_k) + c2a = gt_k, k = 1, 2.
    let b1 = gt1 + va * p.u_a * t1.cos();
    let b2 = gt2 + va * p.u_a * t2.cos();
    let c1a = (b1 - b2) / (l1 - l2);
    let c2a = b1 - c1a * l1;
    let c2b1 = s * t1.cos() / t1.sin() + va * p.u_b * t1.cos();
    let c2b2 = -s * t2.cos() / t2.sin() + va * p.u_b * t2.cos();
    Ok(CapCoefficients {
        c1a,
        c2a,
        c2b1,
        c2b2,
    })
}

/// Closed-form c1a, used as an independent oracle for `cap_coefficients`.
pub fn cap_c1a_formula(state: &SharpCapState, p: &SphereModelParams) -> Result<f64, SharpError> {
    check_caps(state)?;
    let (t1, t2) = (state.theta1, state.theta2);
    let l1 = log_tan_half(t1);
    let l2 = log_tan_half(t2);
    if (l1 - l2).abs() < 1e-14 {
        return Err(SharpError::DegenerateCaps(l1));
    }
    let num = p.s_const * (t1.cos() / t1.sin() + t2.cos() / t2.sin())
        + p.vbar / p.mbar * p.u_a * (t1.cos() - t2.cos());
    Ok(num / (l1 - l2))
}

/// Evaluate the piecewise chemical potential W at `theta`.
pub fn cap_potential(
    theta: f64,
    region: CapRegion,
    state: &SharpCapState,
    p: &SphereModelParams,
) -> Result<f64, SharpError> {
    let ok = match region {
        CapRegion::B1 => theta > 0.0 && theta <= state.theta1,
        CapRegion::A => theta >= state.theta1 && theta <= state.theta2,
        CapRegion::B2 => theta >= state.theta2 && theta < std::f64::consts::PI,
    };
    if !ok {
        return Err(SharpError::RegionMismatch { theta, region });
    }
    let c = cap_coefficients(state, p)?;
    let va = p.vbar / p.mbar;
    Ok(match region {
        CapRegion::B1 => -p.u_b * va * theta.cos() + c.c2b1,
        CapRegion::A => c.c1a * log_tan_half(theta) - p.u_a * va * theta.cos() + c.c2a,
        CapRegion::B2 => -p.u_b * va * theta.cos() + c.c2b2,
    })
}

/// Right-hand sides of the two cap-angle ODEs.
pub fn cap_rhs(state: &SharpCapState, p: &SphereModelParams) -> Result<(f64, f64), SharpError> {
    let c = cap_coefficients(state, p)?;
    let scale = p.mbar * c.c1a / (p.u_b - p.u_a);
    Ok((scale / state.theta1.sin(), scale / state.theta2.sin()))
}

/// Sharp-interface energy 2 S length(Lambda) for the quartic S = sqrt(2)/3.
pub fn sharp_energy(state: &SharpCapState) -> f64 {
    4.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI / 3.0
        * (state.theta1.sin() + state.theta2.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// theta1 reached the north pole.
    NorthPole,
    /// theta2 reached the south pole.
    SouthPole,
    /// The two interfaces collided.
    Collision,
    /// Interval interface reached x = 0.
    LeftEnd,
    /// Interval interface reached x = L(t).
    RightEnd,
}

#[derive(Debug, Clone, Copy)]
pub struct SingularEvent {
    pub time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone)]
pub struct CapTrajectory {
    pub rows: Vec<SharpCapState>,
    pub event: Option<SingularEvent>,
}

const EVENT_MARGIN: f64 = 1e-3;
const EVENT_TIME_TOL: f64 = 1e-6;

fn cap_event(state: &SharpCapState) -> Option<EventKind> {
    let gaps = [
        (state.theta1, EventKind::NorthPole),
        (std::f64::consts::PI - state.theta2, EventKind::SouthPole),
        (state.theta2 - state.theta1, EventKind::Collision),
    ];
    gaps.iter()
        .filter(|(g, _)| *g < EVENT_MARGIN)
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .map(|&(_, k)| k)
}

fn cap_rk4(state: &SharpCapState, p: &SphereModelParams, dt: f64) -> Option<SharpCapState> {
    let f = |s: &SharpCapState| cap_rhs(s, p).ok();
    let at = |s: &SharpCapState, k: (f64, f64), h: f64| SharpCapState {
        theta1: s.theta1 + h * k.0,
        theta2: s.theta2 + h * k.1,
        t: s.t + h,
    };
    let k1 = f(state)?;
    let k2 = f(&at(state, k1, 0.5 * dt))?;
    let k3 = f(&at(state, k2, 0.5 * dt))?;
    let k4 = f(&at(state, k3, dt))?;
    Some(SharpCapState {
        theta1: state.theta1 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        theta2: state.theta2 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        t: state.t + dt,
    })
}

fn cap_step_hits_event(state: &SharpCapState, p: &SphereModelParams, dt: f64) -> bool {
    match cap_rk4(state, p, dt) {
        Some(next) => cap_event(&next).is_some() || check_caps(&next).is_err(),
        None => true,
    }
}

/// RK4 trajectory with singular-event detection; the event time is refined
/// by bisection on the final step size.
pub fn integrate_caps(
    initial: SharpCapState,
    p: &SphereModelParams,
    t_end: f64,
    dt: f64,
) -> Result<CapTrajectory, SharpError> {
    check_caps(&initial)?;
    let mut rows = vec![initial];
    let mut state = initial;
    while state.t < t_end - 1e-12 {
        let step = dt.min(t_end - state.t);
        if cap_step_hits_event(&state, p, step) {
            // Bisect the step size down to the event-time tolerance.
            let mut lo = 0.0f64;
            let mut hi = step;
            while hi - lo > EVENT_TIME_TOL {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if cap_step_hits_event(&state, p, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let kind = cap_rk4(&state, p, hi)
                .as_ref()
                .and_then(cap_event)
                .unwrap_or(EventKind::SouthPole);
            if lo > 0.0 {
                if let Some(last) = cap_rk4(&state, p, lo) {
                    if check_caps(&last).is_ok() {
                        rows.push(last);
                    }
                }
            }
            return Ok(CapTrajectory {
                rows,
                event: Some(SingularEvent {
                    time: state.t + hi,
                    kind,
                }),
            });
        }
        state = cap_rk4(&state, p, step).ok_or(SharpError::StepUnderflow(state.t))?;
        rows.push(state);
    }
    Ok(CapTrajectory { rows, event: None })
}

/// Interface speed on the interval, from the closed-form solution of the
/// two-sided bulk problem (constant mobility): M w'(x) = u_i (v(x) - v(end))
/// in each subinterval, so the flux jump needs only endpoint velocities.
pub fn interval_rhs(
    state: &SharpIntervalState,
    domain: &MovingDomain,
    params: &ModelParams,
) -> f64 {
    let l = domain.length(state.t);
    let v_lam = domain.coordinate_velocity(state.lambda, state.t);
    let v_0 = domain.coordinate_velocity(0.0, state.t);
    let v_l = domain.coordinate_velocity(l, state.t);
    let (u_left, u_right) = match state.orientation {
        Orientation::MinusPlus => (params.u_a, params.u_b),
        Orientation::PlusMinus => (params.u_b, params.u_a),
    };
    let jump = u_right * (v_lam - v_l) - u_left * (v_lam - v_0);
    v_lam - jump / (params.u_b - params.u_a)
}

#[derive(Debug, Clone)]
pub struct IntervalTrajectory {
    pub rows: Vec<SharpIntervalState>,
    pub event: Option<SingularEvent>,
}

pub fn integrate_interval(
    initial: SharpIntervalState,
    domain: &MovingDomain,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
) -> Result<IntervalTrajectory, SharpError> {
    if initial.lambda <= 0.0 || initial.lambda >= domain.length(initial.t) {
        return Err(SharpError::InvalidState(format!(
            "interface {} outside (0, {})",
            initial.lambda,
            domain.length(initial.t)
        )));
    }
    let rk4 = |s: &SharpIntervalState, h: f64| -> SharpIntervalState {
        // Keep all stage evaluations strictly inside the current smooth
        // piece of the velocity law (steps never cross a breakpoint).
        let cap = match domain.next_breakpoint(s.t) {
            Some(b) if b - s.t > 1e-12 => b - 1e-12,
            _ => f64::INFINITY,
        };
        let f = |s: &SharpIntervalState| {
            let clamped = SharpIntervalState {
                t: s.t.min(cap),
                ..*s
            };
            interval_rhs(&clamped, domain, params)
        };
        let at = |s: &SharpIntervalState, k: f64, h: f64| SharpIntervalState {
            lambda: s.lambda + h * k,
            t: s.t + h,
            orientation: s.orientation,
        };
        let k1 = f(s);
        let k2 = f(&at(s, k1, 0.5 * h));
        let k3 = f(&at(s, k2, 0.5 * h));
        let k4 = f(&at(s, k3, h));
        at(s, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h)
    };
    let hits = |s: &SharpIntervalState, h: f64| -> Option<EventKind> {
        let n = rk4(s, h);
        if n.lambda < EVENT_MARGIN {
            Some(EventKind::LeftEnd)
        } else if n.lambda > domain.length(n.t) - EVENT_MARGIN {
            Some(EventKind::RightEnd)
        } else {
            None
        }
    };
    let mut rows = vec![initial];
    let mut state = initial;
    while state.t < t_end - 1e-12 {
        if let Some(b) = domain.next_breakpoint(state.t) {
            // Snap onto the breakpoint so the next piece starts cleanly.
            if b - state.t <= 1e-12 {
                state.t = b;
            }
        }
        let mut step = dt.min(t_end - state.t);
        if let Some(b) = domain.next_breakpoint(state.t) {
            step = step.min(b - state.t);
        }
        if let Some(mut kind) = hits(&state, step) {
            let mut lo = 0.0f64;
            let mut hi = step;
            while hi - lo > EVENT_TIME_TOL {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                match hits(&state, mid) {
                    Some(k) => {
                        kind = k;
                        hi = mid;
                    }
                    None => lo = mid,
                }
            }
            if lo > 0.0 {
                rows.push(rk4(&state, lo));
            }
            return Ok(IntervalTrajectory {
                rows,
                event: Some(SingularEvent {
                    time: state.t + hi,
                    kind,
                }),
            });
        }
        state = rk4(&state, step);
        rows.push(state);
    }
    Ok(IntervalTrajectory { rows, event: None })
}
