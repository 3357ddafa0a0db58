//! Evolving domains: moving 1D intervals and axisymmetric surfaces of
//! revolution, described by a coordinate chart (x on the interval, the polar
//! angle theta on a surface) together with the material velocity of points.

/// One of the built-in evolving domains.
///
/// Intervals carry a prescribed tangential velocity field v(x, t) whose value
/// at the endpoints matches dL/dt, so material nodes advected by v tile the
/// interval [0, L(t)] at all times. Surfaces are charts over theta in (0, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MovingDomain {
    /// [0, 1+t] until L = 3 at t = 2, then frozen; v = x/(1+t).
    StretchThenStop,
    /// [0, 3/(1+t)] until L = 1 at t = 2, then frozen; v = -x/(1+t).
    CompressThenStop,
    /// Fixed [0, 1] with the internal bulk flow v = sin(pi x).
    FixedUnit,
    /// L(t) = arccot(1.83 - t) + 1/2; v = sin^2(x - 1/2) for x >= 1/2.
    CotangentGrowth,
    /// Static unit sphere with the tangential flow v = vbar sin(theta) e_theta.
    UnitSphereTangential { vbar: f64 },
    /// Sphere deforming radially into a wavy shape over t in [0, 0.05],
    /// then frozen; material points keep their polar angle.
    DeformingSphere,
}

/// End of the motion for the interval presets that stop.
const STOP_TIME: f64 = 2.0;
/// End of the radial deformation of `DeformingSphere`.
pub const DEFORM_TIME: f64 = 0.05;

fn arccot(s: f64) -> f64 {
    // Branch in (0, pi), continuous through s = 0.
    f64::atan2(1.0, s)
}

/// Radial shape factor of the deforming sphere as a function of the axial
/// coordinate x = cos(theta).
fn wavy(x: f64) -> f64 {
    let c = (2.0 * std::f64::consts::PI * x).cos();
    1.0 - 0.5 * c * c
}

fn wavy_prime(x: f64) -> f64 {
    std::f64::consts::PI * (4.0 * std::f64::consts::PI * x).sin()
}

/// Radial scale s(theta, t) of the deforming sphere.
fn deform_scale(theta: f64, t: f64) -> f64 {
    let tt = t.clamp(0.0, DEFORM_TIME);
    (1.0 - tt) + tt * wavy(theta.cos())
}

impl MovingDomain {
    pub fn is_surface(&self) -> bool {
        matches!(
            self,
            MovingDomain::UnitSphereTangential { .. } | MovingDomain::DeformingSphere
        )
    }

    /// Coordinate extent at time t: the interval length L(t), or pi for the
    /// surface charts.
    pub fn length(&self, t: f64) -> f64 {
        match self {
            MovingDomain::StretchThenStop => 1.0 + t.min(STOP_TIME),
            MovingDomain::CompressThenStop => 3.0 / (1.0 + t.min(STOP_TIME)),
            MovingDomain::FixedUnit => 1.0,
            MovingDomain::CotangentGrowth => arccot(1.83 - t) + 0.5,
            _ => std::f64::consts::PI,
        }
    }

    /// Largest coordinate extent over [0, t_end]; sizes the mesh.
    pub fn max_length(&self, t_end: f64) -> f64 {
        // All built-in motions are monotone in time.
        self.length(0.0).max(self.length(t_end))
    }

    /// Material velocity of the point at coordinate x (an interval position
    /// or, on a surface, the rate of change of the polar angle).
    pub fn coordinate_velocity(&self, x: f64, t: f64) -> f64 {
        match self {
            MovingDomain::StretchThenStop => {
                if t < STOP_TIME {
                    x / (1.0 + t)
                } else {
                    0.0
                }
            }
            MovingDomain::CompressThenStop => {
                if t < STOP_TIME {
                    -x / (1.0 + t)
                } else {
                    0.0
                }
            }
            MovingDomain::FixedUnit => (std::f64::consts::PI * x).sin(),
            MovingDomain::CotangentGrowth => {
                if x >= 0.5 {
                    let s = (x - 0.5).sin();
                    s * s
                } else {
                    0.0
                }
            }
            MovingDomain::UnitSphereTangential { vbar } => vbar * x.sin(),
            MovingDomain::DeformingSphere => 0.0,
        }
    }

    /// Surface divergence of the material velocity at coordinate x.
    pub fn surface_divergence(&self, x: f64, t: f64) -> f64 {
        match self {
            MovingDomain::StretchThenStop => {
                if t < STOP_TIME {
                    1.0 / (1.0 + t)
                } else {
                    0.0
                }
            }
            MovingDomain::CompressThenStop => {
                if t < STOP_TIME {
                    -1.0 / (1.0 + t)
                } else {
                    0.0
                }
            }
            MovingDomain::FixedUnit => {
                std::f64::consts::PI * (std::f64::consts::PI * x).cos()
            }
            MovingDomain::CotangentGrowth => {
                if x >= 0.5 {
                    (2.0 * (x - 0.5)).sin()
                } else {
                    0.0
                }
            }
            MovingDomain::UnitSphereTangential { vbar } => 2.0 * vbar * x.cos(),
            MovingDomain::DeformingSphere => {
                // d/dt log(g * rho) at fixed theta, by central differences in
                // time (one-sided against the kink at t = DEFORM_TIME and 0).
                if t >= DEFORM_TIME {
                    return 0.0;
                }
                let dt = 1e-6;
                let lo = (t - dt).max(0.0);
                let hi = (t + dt).min(DEFORM_TIME);
                let m = |tau: f64| {
                    let (g, rho) = self.metric_factors(x, tau);
                    (g * rho).ln()
                };
                (m(hi) - m(lo)) / (hi - lo)
            }
        }
    }

    /// Embedding of the chart point: (axial coordinate, circumferential
    /// radius) for surfaces, (x, 0) for intervals.
    pub fn embedding(&self, x: f64, t: f64) -> (f64, f64) {
        match self {
            MovingDomain::UnitSphereTangential { .. } => (x.cos(), x.sin()),
            MovingDomain::DeformingSphere => (x.cos(), deform_scale(x, t) * x.sin()),
            _ => (x, 0.0),
        }
    }

    /// Metric factors (g, rho): g dtheta is the arclength element of the
    /// generating curve and rho the circumferential radius. Intervals return
    /// (1, 1), so quadrature weights specialise correctly.
    pub fn metric_factors(&self, x: f64, t: f64) -> (f64, f64) {
        match self {
            MovingDomain::UnitSphereTangential { .. } => (1.0, x.sin()),
            MovingDomain::DeformingSphere => {
                let s = deform_scale(x, t);
                let tt = t.clamp(0.0, DEFORM_TIME);
                // d/dtheta of rho = s(theta, t) sin(theta).
                let ds = -tt * wavy_prime(x.cos()) * x.sin();
                let drho = ds * x.sin() + s * x.cos();
                // Axial coordinate is cos(theta), so d(axial)/dtheta = -sin.
                let g = (x.sin() * x.sin() + drho * drho).sqrt();
                (g, s * x.sin())
            }
            _ => (1.0, 1.0),
        }
    }

    /// Geodesic curvature of the latitude circle through x (surfaces only;
    /// zero on intervals, where interfaces are points).
    pub fn geodesic_curvature_latitude(&self, x: f64, t: f64) -> f64 {
        match self {
            MovingDomain::UnitSphereTangential { .. } => x.cos() / x.sin(),
            MovingDomain::DeformingSphere => {
                // kappa = (d rho / d arclength) / rho.
                let h = 1e-6;
                let (_, r_plus) = self.metric_factors(x + h, t);
                let (_, r_minus) = self.metric_factors(x - h, t);
                let (g, rho) = self.metric_factors(x, t);
                (r_plus - r_minus) / (2.0 * h) / (g * rho)
            }
            _ => 0.0,
        }
    }

    /// Next time at which the velocity law switches branches, if any; ODE
    /// integrators split steps there to keep their full order.
    pub fn next_breakpoint(&self, t: f64) -> Option<f64> {
        let b = match self {
            MovingDomain::StretchThenStop | MovingDomain::CompressThenStop => STOP_TIME,
            MovingDomain::DeformingSphere => DEFORM_TIME,
            _ => return None,
        };
        (t < b).then_some(b)
    }

    /// Advance material node coordinates over [t, t + dt] with one RK4 step.
    pub fn advance_nodes(&self, nodes: &mut [f64], t: f64, dt: f64) {
        for x in nodes.iter_mut() {
            let k1 = self.coordinate_velocity(*x, t);
            let k2 = self.coordinate_velocity(*x + 0.5 * dt * k1, t + 0.5 * dt);
            let k3 = self.coordinate_velocity(*x + 0.5 * dt * k2, t + 0.5 * dt);
            let k4 = self.coordinate_velocity(*x + dt * k3, t + dt);
            *x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
}
