//! Double-well potentials, mobilities, the 1D equilibrium profile BVP, and
//! the calibration constants S(U0) and T(U0) entering the interface
//! conditions of the limiting free boundary problem.

use crate::linalg::{BandedMatrix, LinalgError};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Quartic,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobilityKind {
    Constant,
    Degenerate,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ModelError {
    #[error("u = {u} outside the logarithmic domain ({alpha}, {beta})")]
    OutOfDomain { u: f64, alpha: f64, beta: f64 },
    #[error("closed-form profile is only available for the quartic potential")]
    UnsupportedPotential,
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("profile solve did not converge: residual {residual:.3e} after {iters} iterations")]
    NoConvergence { residual: f64, iters: usize },
    #[error("correction BVP is numerically singular: {0}")]
    SingularSystem(#[from] LinalgError),
}

/// Potential and mobility parameters. For the quartic potential the
/// logarithmic fields are inert; `alpha`/`beta` still bound the degenerate
/// mobility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub potential: PotentialKind,
    pub mobility: MobilityKind,
    pub u_a: f64,
    pub u_b: f64,
    pub epsilon: f64,
    pub mbar: f64,
    pub theta: f64,
    pub theta_c: f64,
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn quartic(u_a: f64, u_b: f64, epsilon: f64, mbar: f64) -> Self {
        Self {
            potential: PotentialKind::Quartic,
            mobility: MobilityKind::Constant,
            u_a,
            u_b,
            epsilon,
            mbar,
            theta: 0.0,
            theta_c: 0.0,
            k1: 1.0,
            k2: 1.0,
            alpha: u_a - 1.0,
            beta: u_b + 1.0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn logarithmic(
        u_a: f64,
        u_b: f64,
        epsilon: f64,
        mbar: f64,
        theta: f64,
        theta_c: f64,
        k1: f64,
        k2: f64,
        alpha: f64,
        beta: f64,
    ) -> Self {
        Self {
            potential: PotentialKind::Logarithmic,
            mobility: MobilityKind::Degenerate,
            u_a,
            u_b,
            epsilon,
            mbar,
            theta,
            theta_c,
            k1,
            k2,
            alpha,
            beta,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.u_a < self.u_b) {
            return Err(ModelError::InvalidParams(format!(
                "wells must satisfy u_a < u_b, got {} and {}",
                self.u_a, self.u_b
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(ModelError::InvalidParams("epsilon must be positive".into()));
        }
        if !(self.mbar > 0.0) {
            return Err(ModelError::InvalidParams("mbar must be positive".into()));
        }
        if self.potential == PotentialKind::Logarithmic {
            if !(self.alpha < self.u_a && self.u_b < self.beta) {
                return Err(ModelError::InvalidParams(
                    "logarithmic bounds must satisfy alpha < u_a < u_b < beta".into(),
                ));
            }
            if !(self.theta > 0.0 && self.theta_c > 0.0 && self.k1 > 0.0 && self.k2 > 0.0) {
                return Err(ModelError::InvalidParams(
                    "logarithmic parameters theta, theta_c, k1, k2 must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    fn check_log_domain(&self, u: f64) -> Result<(), ModelError> {
        if u <= self.alpha || u >= self.beta {
            Err(ModelError::OutOfDomain {
                u,
                alpha: self.alpha,
                beta: self.beta,
            })
        } else {
            Ok(())
        }
    }
}

/// Double-well energy density F(u).
pub fn potential_value(params: &ModelParams, u: f64) -> Result<f64, ModelError> {
    match params.potential {
        PotentialKind::Quartic => {
            let p = u - params.u_a;
            let q = params.u_b - u;
            Ok(0.25 * q * q * p * p)
        }
        PotentialKind::Logarithmic => {
            params.check_log_domain(u)?;
            let p = u - params.alpha;
            let q = params.beta - u;
            Ok(params.theta / (2.0 * params.k1) * (q * q.ln() + p * p.ln())
                + params.theta_c / (2.0 * params.k2) * q * p)
        }
    }
}

/// f(u) = F'(u).
pub fn potential_derivative(params: &ModelParams, u: f64) -> Result<f64, ModelError> {
    match params.potential {
        PotentialKind::Quartic => {
            let p = u - params.u_a;
            let q = params.u_b - u;
            Ok(0.5 * q * p * (q - p))
        }
        PotentialKind::Logarithmic => {
            params.check_log_domain(u)?;
            let p = u - params.alpha;
            let q = params.beta - u;
            Ok(params.theta / (2.0 * params.k1) * (p.ln() - q.ln())
                + params.theta_c / (2.0 * params.k2) * (params.alpha + params.beta - 2.0 * u))
        }
    }
}

/// f'(u) = F''(u); used by the Newton solves and the correction BVP.
pub fn potential_second_derivative(params: &ModelParams, u: f64) -> Result<f64, ModelError> {
    match params.potential {
        PotentialKind::Quartic => {
            let d = 2.0 * u - params.u_a - params.u_b;
            Ok(0.5 * d * d - (u - params.u_a) * (params.u_b - u))
        }
        PotentialKind::Logarithmic => {
            params.check_log_domain(u)?;
            let p = u - params.alpha;
            let q = params.beta - u;
            Ok(params.theta / (2.0 * params.k1) * (1.0 / p + 1.0 / q)
                - params.theta_c / params.k2)
        }
    }
}

/// Mobility M(u): constant, or degenerate vanishing at the bounds.
pub fn mobility(params: &ModelParams, u: f64) -> f64 {
    match params.mobility {
        MobilityKind::Constant => params.mbar,
        MobilityKind::Degenerate => (params.mbar * (u - params.alpha) * (params.beta - u)).abs(),
    }
}

/// Affine rescaling constants mapping the wells to -1 and +1.
pub fn to_dimensionless(params: &ModelParams) -> (f64, f64) {
    (
        0.5 * (params.u_b + params.u_a),
        0.5 * (params.u_b - params.u_a),
    )
}

/// Closed-form equilibrium interface profile (quartic potential only).
pub fn equilibrium_profile(params: &ModelParams, y: f64) -> Result<f64, ModelError> {
    if params.potential != PotentialKind::Quartic {
        return Err(ModelError::UnsupportedPotential);
    }
    let (c1, c2) = to_dimensionless(params);
    Ok(c1 + c2 * (c2 * y / (SQRT2 * params.epsilon)).tanh())
}

/// Discrete solution of the stretched-coordinate profile BVP on a truncated
/// domain, plus the calibration constant S(U0).
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub z_nodes: Vec<f64>,
    pub u_values: Vec<f64>,
    pub s_constant: f64,
    pub t_constant: Option<f64>,
}

/// 4th-order first derivative on a uniform grid (5-point interior stencil,
/// 2nd-order one-sided at the edges where the profile tails are flat).
fn deriv4(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            let im = if i == 0 { 0 } else { i - 1 };
            let ip = (i + 1).min(n - 1);
            d[i] = (values[ip] - values[im]) / ((ip - im) as f64 * h);
        }
        return d;
    }
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[1] = (values[2] - values[0]) / (2.0 * h);
    for i in 2..n - 2 {
        d[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2])
            / (12.0 * h);
    }
    d[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    d
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut s = 0.5 * (values[0] + values[n - 1]);
    for &v in &values[1..n - 1] {
        s += v;
    }
    s * h
}

/// Solve 0 = -U'' + f(U) on [-truncation, truncation] with the well values as
/// boundary data, by a Numerov discretisation and damped Newton.
pub fn solve_profile(
    params: &ModelParams,
    truncation: f64,
    n: usize,
) -> Result<ProfileSolution, ModelError> {
    params.validate()?;
    if n < 5 {
        return Err(ModelError::InvalidParams("need n >= 5 profile nodes".into()));
    }
    // The grid must contain z = 0, where the phase condition
    // U(0) = (u_a + u_b)/2 pins the translation mode of the profile.
    let n = if n % 2 == 0 { n + 1 } else { n };
    let h = 2.0 * truncation / (n - 1) as f64;
    let z_nodes: Vec<f64> = (0..n).map(|i| -truncation + i as f64 * h).collect();

    // tanh ansatz as the starting iterate (exact for the quartic).
    let (c1, c2) = to_dimensionless(params);
    let mut u: Vec<f64> = z_nodes
        .iter()
        .map(|&z| c1 + c2 * (c2 * z / SQRT2).tanh())
        .collect();
    u[0] = params.u_a;
    u[n - 1] = params.u_b;

    let f_of = |u: f64| potential_derivative(params, u);
    let fp_of = |u: f64| potential_second_derivative(params, u);

    // Numerov residual over the interior nodes.
    let residual = |u: &[f64]| -> Result<Vec<f64>, ModelError> {
        let mut r = vec![0.0; n - 2];
        let c = h * h / 12.0;
        let mut f_prev = f_of(u[0])?;
        let mut f_here = f_of(u[1])?;
        for i in 1..n - 1 {
            let f_next = f_of(u[i + 1])?;
            r[i - 1] = u[i - 1] - 2.0 * u[i] + u[i + 1] - c * (f_prev + 10.0 * f_here + f_next);
            f_prev = f_here;
            f_here = f_next;
        }
        Ok(r)
    };

    let sup = |r: &[f64]| r.iter().fold(0.0f64, |m, &v| m.max(v.abs()));

    // The residual is in h^2-scaled units, so drive Newton to stagnation
    // near roundoff rather than to a fixed absolute tolerance; `tol_accept`
    // is the worst residual still considered converged at stagnation.
    let tol_target = 1e-16;
    let tol_accept = 1e-12;
    let max_iters = 50;
    let mut r = residual(&u)?;
    let mut rnorm = sup(&r);
    let mut iters = 0;
    'newton: while rnorm > tol_target {
        if iters >= max_iters {
            if rnorm < tol_accept {
                break;
            }
            return Err(ModelError::NoConvergence {
                residual: rnorm,
                iters,
            });
        }
        iters += 1;
        let c = h * h / 12.0;
        let mut jac = BandedMatrix::zeros(n - 2, 1, 1);
        for i in 1..n - 1 {
            let row = i - 1;
            jac.set(row, row, -2.0 - 10.0 * c * fp_of(u[i])?);
            if i > 1 {
                jac.set(row, row - 1, 1.0 - c * fp_of(u[i - 1])?);
            }
            if i < n - 2 {
                jac.set(row, row + 1, 1.0 - c * fp_of(u[i + 1])?);
            }
        }
        let lu = jac.factor()?;
        // Bordered step: the truncated-Dirichlet operator is nearly singular
        // along the translation mode, so combine the plain Newton direction
        // with a kernel solve so the midpoint stays pinned at c1. The kernel
        // blow-up cancels between the two solves.
        let mut x: Vec<f64> = r.iter().map(|&v| -v).collect();
        lu.solve(&mut x);
        let mut y: Vec<f64> = (1..n - 1)
            .map(|i| (u[i + 1] - u[i - 1]) / (2.0 * h))
            .collect();
        lu.solve(&mut y);
        let mid = n / 2;
        let g = u[mid] - c1;
        let tau = if y[mid - 1].abs() > 0.0 {
            -(g + x[mid - 1]) / y[mid - 1]
        } else {
            0.0
        };
        let step: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| xi + tau * yi)
            .collect();
        // Damped update; for the logarithmic potential also keep the iterate
        // strictly inside (alpha, beta).
        let mut damping = 1.0;
        loop {
            let mut trial = u.clone();
            let mut inside = true;
            for i in 1..n - 1 {
                trial[i] += damping * step[i - 1];
                if params.potential == PotentialKind::Logarithmic
                    && (trial[i] <= params.alpha || trial[i] >= params.beta)
                {
                    inside = false;
                    break;
                }
            }
            if inside {
                let r_trial = residual(&trial)?;
                let rn_trial = sup(&r_trial);
                if rn_trial < rnorm {
                    u = trial;
                    r = r_trial;
                    rnorm = rn_trial;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-12 {
                // Stagnated at the roundoff floor.
                if rnorm < tol_accept {
                    break 'newton;
                }
                return Err(ModelError::NoConvergence {
                    residual: rnorm,
                    iters,
                });
            }
        }
    }

    let mut solution = ProfileSolution {
        z_nodes,
        u_values: u,
        s_constant: 0.0,
        t_constant: None,
    };
    solution.s_constant = surface_tension_from(&solution, params);
    Ok(solution)
}

fn surface_tension_from(profile: &ProfileSolution, params: &ModelParams) -> f64 {
    let h = profile.z_nodes[1] - profile.z_nodes[0];
    let du = deriv4(&profile.u_values, h);
    let sq: Vec<f64> = du.iter().map(|&d| d * d).collect();
    trapezoid(&sq, h) / (params.u_b - params.u_a)
}

/// S(U0): quadrature of (dU0/dz)^2 over the truncated domain, divided by the
/// well separation.
pub fn surface_tension_constant(profile: &ProfileSolution, params: &ModelParams) -> f64 {
    surface_tension_from(profile, params)
}

/// Solve the linear correction BVP -t'' + f'(U0) t = rhs with zero-flux ends.
///
/// The operator has the translation mode dU0/dz in its kernel, so the system
/// is solved in the orthogonal complement (projected preconditioned CG with a
/// 4th-order deferred correction); the component of `rhs` along the kernel is
/// discarded, which fixes the solvability defect of the stated right-hand
/// side, and the returned solution is orthogonal to the kernel mode.
fn solve_correction_bvp(
    profile: &ProfileSolution,
    params: &ModelParams,
    rhs: &[f64],
) -> Result<Vec<f64>, ModelError> {
    let n = profile.u_values.len();
    let h = profile.z_nodes[1] - profile.z_nodes[0];
    let a: Vec<f64> = profile
        .u_values
        .iter()
        .map(|&u| potential_second_derivative(params, u))
        .collect::<Result<_, _>>()?;
    let kernel = deriv4(&profile.u_values, h);
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let knorm2 = dot(&kernel, &kernel);
    let project = |v: &mut [f64]| {
        let c = dot(v, &kernel) / knorm2;
        for (vi, ki) in v.iter_mut().zip(&kernel) {
            *vi -= c * ki;
        }
    };

    // Symmetric 2nd-order operator with zero-flux end rows.
    let apply = |x: &[f64], y: &mut [f64]| {
        let inv_h2 = 1.0 / (h * h);
        y[0] = (x[0] - x[1]) * inv_h2 + a[0] * x[0];
        for i in 1..n - 1 {
            y[i] = (-x[i - 1] + 2.0 * x[i] - x[i + 1]) * inv_h2 + a[i] * x[i];
        }
        y[n - 1] = (x[n - 1] - x[n - 2]) * inv_h2 + a[n - 1] * x[n - 1];
    };

    let mut b: Vec<f64> = rhs.to_vec();
    project(&mut b);
    let bnorm = dot(&b, &b).sqrt().max(1e-300);

    // Jacobi-preconditioned CG restricted to the complement of the kernel.
    let pcg = |b: &[f64]| -> Result<Vec<f64>, ModelError> {
        let inv_h2 = 1.0 / (h * h);
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let d = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
                (d * inv_h2 + a[i]).max(1e-12)
            })
            .collect();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        project(&mut r);
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
        project(&mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        let tol = 1e-13 * bnorm;
        let max_iters = 20 * n;
        for iters in 0..max_iters {
            let rn = dot(&r, &r).sqrt();
            if rn <= tol {
                return Ok(x);
            }
            apply(&p, &mut ap);
            project(&mut ap);
            let alpha = rz / dot(&p, &ap);
            if !alpha.is_finite() {
                return Err(ModelError::SingularSystem(LinalgError::NoConvergence {
                    residual: rn,
                    iters,
                }));
            }
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            project(&mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(ModelError::SingularSystem(LinalgError::NoConvergence {
            residual: dot(&r, &r).sqrt(),
            iters: max_iters,
        }))
    };

    let mut t = pcg(&b)?;

    // Two rounds of deferred correction against a 4th-order defect.
    for _ in 0..2 {
        let tzz = second_derivative_4th(&t, h);
        let mut defect = vec![0.0; n];
        for i in 0..n {
            defect[i] = b[i] - (-tzz[i] + a[i] * t[i]);
        }
        // Edge rows stay on the 2nd-order form (tails are flat).
        for i in [0usize, 1, n - 2, n - 1] {
            defect[i] = 0.0;
        }
        project(&mut defect);
        let e = pcg(&defect)?;
        for i in 0..n {
            t[i] += e[i];
        }
    }
    project(&mut t);
    Ok(t)
}

/// 4th-order second derivative (5-point interior; 2nd-order near the edges).
fn second_derivative_4th(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    let inv_h2 = 1.0 / (h * h);
    for i in 0..n {
        if i >= 2 && i + 2 < n {
            d[i] = (-values[i - 2] + 16.0 * values[i - 1] - 30.0 * values[i]
                + 16.0 * values[i + 1]
                - values[i + 2])
                * inv_h2
                / 12.0;
        } else if i >= 1 && i + 1 < n {
            d[i] = (values[i - 1] - 2.0 * values[i] + values[i + 1]) * inv_h2;
        }
    }
    d
}

/// T(U0): solves the correction BVP and evaluates the quadrature
/// (1/(u_b-u_a)) * integral of [t' U0' - (t^2/2) d/dz f'(U0)].
pub fn correction_constant(
    profile: &ProfileSolution,
    params: &ModelParams,
) -> Result<f64, ModelError> {
    let n = profile.u_values.len();
    let h = profile.z_nodes[1] - profile.z_nodes[0];
    let du = deriv4(&profile.u_values, h);
    let s = profile.s_constant;
    let rhs: Vec<f64> = du.iter().map(|&d| s + d).collect();
    let t = solve_correction_bvp(profile, params, &rhs)?;
    let dt = deriv4(&t, h);
    let mut integrand = vec![0.0; n];
    for i in 0..n {
        let fpp = potential_second_derivative_prime(params, profile.u_values[i])?;
        integrand[i] = dt[i] * du[i] - 0.5 * t[i] * t[i] * fpp * du[i];
    }
    Ok(trapezoid(&integrand, h) / (params.u_b - params.u_a))
}

/// f''(u), for the chain rule d/dz f'(U0) = f''(U0) dU0/dz.
fn potential_second_derivative_prime(params: &ModelParams, u: f64) -> Result<f64, ModelError> {
    match params.potential {
        PotentialKind::Quartic => Ok(3.0 * (2.0 * u - params.u_a - params.u_b)),
        PotentialKind::Logarithmic => {
            params.check_log_domain(u)?;
            let p = u - params.alpha;
            let q = params.beta - u;
            Ok(params.theta / (2.0 * params.k1) * (1.0 / (q * q) - 1.0 / (p * p)))
        }
    }
}

/// Symmetric well positions of the logarithmic potential with bounds
/// (-beta, beta): the nonzero roots of f(u) = 0, found by bisection.
/// Requires the subcritical regime where a double well exists.
pub fn symmetric_log_wells(
    theta: f64,
    theta_c: f64,
    k1: f64,
    k2: f64,
    beta: f64,
) -> Result<(f64, f64), ModelError> {
    let f = |u: f64| {
        theta / (2.0 * k1) * (((u + beta) / (beta - u)).ln()) - theta_c / k2 * u
    };
    // Double well requires f'(0) < 0, i.e. theta/(k1*beta) < theta_c/k2.
    if theta / (k1 * beta) >= theta_c / k2 {
        return Err(ModelError::InvalidParams(
            "no double well: theta too large relative to theta_c".into(),
        ));
    }
    let mut lo = beta * 1e-6;
    let mut hi = beta * (1.0 - 1e-12);
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return Err(ModelError::InvalidParams(
            "failed to bracket the well position".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ub = 0.5 * (lo + hi);
    Ok((-ub, ub))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic_pm1() -> ModelParams {
        ModelParams::quartic(-1.0, 1.0, 1.0, 1.0)
    }

    #[test]
    fn quartic_potential_values() {
        let p = quartic_pm1();
        assert_eq!(potential_value(&p, -1.0).unwrap(), 0.0);
        assert_eq!(potential_value(&p, 0.0).unwrap(), 0.25);
        let p2 = ModelParams::quartic(0.2, 0.8, 1.0, 1.0);
        // Oracle: 0.25 * (0.8-0.5)^2 * (0.5-0.2)^2 = 0.002025.
        assert!((potential_value(&p2, 0.5).unwrap() - 0.002025).abs() < 1e-15);
    }

    #[test]
    fn quartic_derivative_values() {
        let p = quartic_pm1();
        assert_eq!(potential_derivative(&p, 1.0).unwrap(), 0.0);
        assert_eq!(potential_derivative(&p, 0.0).unwrap(), 0.0);
        // Oracle f(u) = u^3 - u for F = (u^2-1)^2/4: f(0.5) = -0.375.
        assert!((potential_derivative(&p, 0.5).unwrap() - (-0.375)).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference_of_potential() {
        let p = ModelParams::quartic(0.2, 0.8, 1.0, 1.0);
        let mut seed = 42u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for h in [1e-4, 1e-5] {
            for _ in 0..100 {
                let u = (p.u_a - 0.5) + next() * (p.u_b - p.u_a + 1.0);
                let fd = (potential_value(&p, u + h).unwrap()
                    - potential_value(&p, u - h).unwrap())
                    / (2.0 * h);
                let f = potential_derivative(&p, u).unwrap();
                assert!(
                    (f - fd).abs() < 10.0 * h * h,
                    "u={u} h={h}: f={f} fd={fd}"
                );
            }
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        for p in [quartic_pm1(), log_params()] {
            for u in [-0.6, -0.2, 0.0, 0.3, 0.7] {
                let h = 1e-5;
                let fd = (potential_derivative(&p, u + h).unwrap()
                    - potential_derivative(&p, u - h).unwrap())
                    / (2.0 * h);
                let fp = potential_second_derivative(&p, u).unwrap();
                assert!((fp - fd).abs() < 1e-6 * (1.0 + fp.abs()), "u={u}: {fp} vs {fd}");
            }
        }
    }

    #[test]
    fn mobility_values() {
        let mut p = ModelParams::quartic(-1.0, 1.0, 1.0, 5.0);
        assert_eq!(mobility(&p, 0.3), 5.0);
        p.mobility = MobilityKind::Degenerate;
        p.mbar = 1.0;
        p.alpha = -1.0;
        p.beta = 1.0;
        assert_eq!(mobility(&p, 1.0), 0.0);
        assert_eq!(mobility(&p, -1.0), 0.0);
        assert_eq!(mobility(&p, 0.0), 1.0);
    }

    fn log_params() -> ModelParams {
        let (ua, ub) = symmetric_log_wells(0.6, 1.0, 1.0, 1.0, 1.0).unwrap();
        ModelParams::logarithmic(ua, ub, 1.0, 1.0, 0.6, 1.0, 1.0, 1.0, -1.0, 1.0)
    }

    #[test]
    fn log_wells_are_stationary_double_well() {
        let p = log_params();
        assert!(p.u_a < 0.0 && p.u_b > 0.0);
        assert!(potential_derivative(&p, p.u_b).unwrap().abs() < 1e-10);
        assert!(potential_derivative(&p, p.u_a).unwrap().abs() < 1e-10);
        // Non-degenerate minima.
        assert!(potential_second_derivative(&p, p.u_b).unwrap() > 0.0);
        // Equal depth by symmetry.
        let fa = potential_value(&p, p.u_a).unwrap();
        let fb = potential_value(&p, p.u_b).unwrap();
        assert!((fa - fb).abs() < 1e-12);
    }

    #[test]
    fn log_potential_domain_error() {
        let p = log_params();
        assert!(matches!(
            potential_value(&p, 1.5),
            Err(ModelError::OutOfDomain { .. })
        ));
        assert!(matches!(
            potential_derivative(&p, -1.0),
            Err(ModelError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn equilibrium_profile_values() {
        let p = quartic_pm1();
        assert_eq!(equilibrium_profile(&p, 0.0).unwrap(), 0.0);
        assert!((equilibrium_profile(&p, 1e3).unwrap() - 1.0).abs() < 1e-12);
        let v = equilibrium_profile(&p, SQRT2).unwrap();
        assert!((v - 1.0f64.tanh()).abs() < 1e-12);
        let asym = ModelParams::quartic(0.2, 0.8, 1.0, 1.0);
        assert!((equilibrium_profile(&asym, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            equilibrium_profile(&log_params(), 0.0),
            Err(ModelError::UnsupportedPotential)
        ));
    }

    #[test]
    fn to_dimensionless_values() {
        assert_eq!(to_dimensionless(&quartic_pm1()), (0.0, 1.0));
        let p = ModelParams::quartic(0.2, 0.8, 1.0, 1.0);
        let (c1, c2) = to_dimensionless(&p);
        assert!((c1 - 0.5).abs() < 1e-15 && (c2 - 0.3).abs() < 1e-15);
        let p = ModelParams::quartic(0.0, 2.0, 1.0, 1.0);
        assert_eq!(to_dimensionless(&p), (1.0, 1.0));
    }

    #[test]
    fn profile_matches_tanh_closed_form() {
        let p = quartic_pm1();
        let sol = solve_profile(&p, 20.0, 4001).unwrap();
        let mut max_err = 0.0f64;
        for (z, u) in sol.z_nodes.iter().zip(&sol.u_values) {
            max_err = max_err.max((u - (z / SQRT2).tanh()).abs());
        }
        assert!(max_err < 1e-8, "max profile error {max_err:.3e}");
        // Midpoint symmetry.
        let mid = sol.u_values[sol.u_values.len() / 2];
        assert!(mid.abs() < 1e-10);
    }

    #[test]
    fn profile_first_integral() {
        let p = quartic_pm1();
        let sol = solve_profile(&p, 20.0, 4001).unwrap();
        let h = sol.z_nodes[1] - sol.z_nodes[0];
        let du = deriv4(&sol.u_values, h);
        let f_a = potential_value(&p, p.u_a).unwrap();
        for i in 0..sol.u_values.len() {
            let lhs = 0.5 * du[i] * du[i];
            let rhs = potential_value(&p, sol.u_values[i]).unwrap() - f_a;
            assert!((lhs - rhs).abs() < 1e-6, "node {i}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn profile_slope_asymmetric_wells() {
        // The interface width scales like 1/c2^2, so the truncated domain
        // must be wider than for the unit wells.
        let p = ModelParams::quartic(0.2, 0.8, 1.0, 1.0);
        let sol = solve_profile(&p, 80.0, 16001).unwrap();
        let h = sol.z_nodes[1] - sol.z_nodes[0];
        let du = deriv4(&sol.u_values, h);
        let mid = du[du.len() / 2];
        // Closed form: U0'(0) = c2^2 / sqrt(2) with c2 = 0.3.
        let exact = 0.09 / SQRT2;
        assert!((mid - exact).abs() < 1e-8, "slope {mid} vs {exact}");
    }

    #[test]
    fn logarithmic_profile_solves() {
        let p = log_params();
        let sol = solve_profile(&p, 30.0, 3001).unwrap();
        // Monotone from u_a to u_b.
        for w in sol.u_values.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!(sol.s_constant > 0.0);
    }

    #[test]
    fn surface_tension_quartic_pm1() {
        let p = quartic_pm1();
        let sol = solve_profile(&p, 20.0, 4001).unwrap();
        let s = surface_tension_constant(&sol, &p);
        assert!((s - SQRT2 / 3.0).abs() < 1e-6, "S = {s}");
    }

    #[test]
    fn surface_tension_scales_with_well_separation() {
        let p = ModelParams::quartic(0.2, 0.8, 1.0, 1.0);
        let sol = solve_profile(&p, 40.0, 8001).unwrap();
        let s = surface_tension_constant(&sol, &p);
        let exact = SQRT2 / 3.0 * 0.09;
        assert!((s - exact).abs() < 1e-7, "S = {s} vs {exact}");
    }

    #[test]
    fn surface_tension_zero_for_flat_profile() {
        let p = quartic_pm1();
        let n = 101;
        let sol = ProfileSolution {
            z_nodes: (0..n).map(|i| i as f64).collect(),
            u_values: vec![0.3; n],
            s_constant: 0.0,
            t_constant: None,
        };
        assert!(surface_tension_constant(&sol, &p).abs() < 1e-30);
    }

    #[test]
    fn surface_tension_invariant_under_refinement() {
        let p = quartic_pm1();
        let s1 = solve_profile(&p, 20.0, 4001).unwrap().s_constant;
        let s2 = solve_profile(&p, 40.0, 16001).unwrap().s_constant;
        assert!((s1 - s2).abs() < 1e-8, "{s1} vs {s2}");
    }

    #[test]
    fn correction_zero_rhs_gives_zero() {
        let p = quartic_pm1();
        let sol = solve_profile(&p, 20.0, 2001).unwrap();
        let rhs = vec![0.0; sol.u_values.len()];
        let t = solve_correction_bvp(&sol, &p, &rhs).unwrap();
        let max = t.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(max < 1e-12, "max |t| = {max:.3e}");
    }

    #[test]
    fn correction_constant_grid_consistency() {
        let p = quartic_pm1();
        let t1 = correction_constant(&solve_profile(&p, 20.0, 2001).unwrap(), &p).unwrap();
        let t2 = correction_constant(&solve_profile(&p, 20.0, 4001).unwrap(), &p).unwrap();
        assert!(t1.is_finite() && t2.is_finite());
        assert!((t1 - t2).abs() < 1e-6, "T(2001) = {t1}, T(4001) = {t2}");
    }

    #[test]
    fn correction_constant_truncation_insensitive() {
        let p = quartic_pm1();
        let t1 = correction_constant(&solve_profile(&p, 20.0, 4001).unwrap(), &p).unwrap();
        let t2 = correction_constant(&solve_profile(&p, 40.0, 8001).unwrap(), &p).unwrap();
        assert!((t1 - t2).abs() < 1e-8, "T(L=20) = {t1}, T(L=40) = {t2}");
    }

    #[test]
    fn invalid_params_rejected() {
        let p = ModelParams::quartic(1.0, -1.0, 1.0, 1.0);
        assert!(p.validate().is_err());
        let p = ModelParams::quartic(-1.0, 1.0, 0.0, 1.0);
        assert!(p.validate().is_err());
    }
}
