//! Built-in experiment presets: domain, model parameters, initial data,
//! horizons, output times, epsilon sweeps, and sharp-interface companions.

use crate::geometry::MovingDomain;
use crate::model::{ModelParams, SQRT2};
use crate::sharp::Orientation;
use crate::solver::ProfileSpec;

/// Initial condition, possibly depending on the interface width.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Fixed(ProfileSpec),
    /// offset + amp * tanh((x - center)/eps): layer width tied to epsilon.
    TanhLayer { offset: f64, amp: f64, center: f64 },
}

impl InitialCondition {
    pub fn profile(&self, epsilon: f64) -> ProfileSpec {
        match *self {
            InitialCondition::Fixed(ref p) => p.clone(),
            InitialCondition::TanhLayer {
                offset,
                amp,
                center,
            } => ProfileSpec::ScaledTanh {
                offset,
                amp,
                rate: 1.0 / epsilon,
                center,
            },
        }
    }
}

/// Which sharp-interface companion problem accompanies the run.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    None,
    SharpInterval {
        lambda0: f64,
        orientation: Orientation,
    },
    SharpCaps {
        theta1: f64,
        theta2: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: String,
    pub domain: MovingDomain,
    pub params: ModelParams,
    pub initial: InitialCondition,
    pub t_end: f64,
    pub output_times: Vec<f64>,
    pub epsilon_list: Vec<f64>,
    /// Extra mobility values: the run repeats for each (used by
    /// mobility-scaling, which contrasts two magnitudes).
    pub mbar_list: Vec<f64>,
    pub comparison: Comparison,
    pub dt: Option<f64>,
    /// Couple the default step size to the interface width (dt = eps^2/4
    /// without the global cap), so time errors shrink with epsilon in sweeps.
    pub dt_layer_scaled: bool,
    pub n_cells: Option<usize>,
    pub out_dir: String,
}

pub const PRESET_NAMES: [&str; 11] = [
    "stretch",
    "compress",
    "stretch-positive",
    "genesis",
    "bulk-motion",
    "sphere-coarsen",
    "sphere-reverse",
    "sphere-energy",
    "mobility-scaling",
    "sharp-caps",
    "sharp-interval",
];

fn base(name: &str, domain: MovingDomain, params: ModelParams) -> ExperimentPreset {
    ExperimentPreset {
        name: name.into(),
        domain,
        params,
        initial: InitialCondition::Fixed(ProfileSpec::Constant(0.0)),
        t_end: 1.0,
        output_times: Vec::new(),
        epsilon_list: Vec::new(),
        mbar_list: Vec::new(),
        comparison: Comparison::None,
        dt: None,
        dt_layer_scaled: false,
        n_cells: None,
        out_dir: format!("out/{name}"),
    }
}

/// Look up a built-in preset by name.
pub fn preset(name: &str) -> Option<ExperimentPreset> {
    let pm1 = |eps| ModelParams::quartic(-1.0, 1.0, eps, 1.0);
    let pos = |eps| ModelParams::quartic(0.2, 0.8, eps, 1.0);
    Some(match name {
        "stretch" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::ScaledTanh {
                offset: 0.0,
                amp: 0.9,
                rate: 10.0,
                center: 0.5,
            }),
            t_end: 10.0,
            output_times: vec![0.25, 1.0, 2.0, 10.0],
            epsilon_list: vec![0.4, 0.1, 0.025],
            comparison: Comparison::SharpInterval {
                lambda0: 0.5,
                orientation: Orientation::MinusPlus,
            },
            dt_layer_scaled: true,
            ..base("stretch", MovingDomain::StretchThenStop, pm1(0.1))
        },
        "compress" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::ScaledTanh {
                offset: 0.0,
                amp: 0.9,
                rate: 10.0,
                center: 1.5,
            }),
            t_end: 10.0,
            output_times: vec![0.25, 1.0, 2.0, 10.0],
            epsilon_list: vec![0.4, 0.1, 0.025],
            comparison: Comparison::SharpInterval {
                lambda0: 1.5,
                orientation: Orientation::MinusPlus,
            },
            dt_layer_scaled: true,
            ..base("compress", MovingDomain::CompressThenStop, pm1(0.1))
        },
        "stretch-positive" => ExperimentPreset {
            initial: InitialCondition::TanhLayer {
                offset: 0.5,
                amp: 0.3,
                center: 0.5,
            },
            t_end: 2.0,
            output_times: vec![0.25, 0.5, 1.0, 2.0],
            epsilon_list: vec![0.4, 0.1, 0.025],
            ..base("stretch-positive", MovingDomain::StretchThenStop, pos(0.1))
        },
        "genesis" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::Constant(0.5)),
            t_end: 0.2,
            output_times: vec![0.0, 0.066, 0.099, 0.198],
            epsilon_list: vec![0.033],
            ..base("genesis", MovingDomain::FixedUnit, pos(0.033))
        },
        "bulk-motion" => ExperimentPreset {
            initial: InitialCondition::TanhLayer {
                offset: 0.0,
                amp: 1.0,
                center: 0.25,
            },
            t_end: 2.0,
            output_times: vec![0.5, 1.0, 1.8, 2.0],
            epsilon_list: vec![0.01],
            comparison: Comparison::SharpInterval {
                lambda0: 0.25,
                orientation: Orientation::MinusPlus,
            },
            ..base("bulk-motion", MovingDomain::CotangentGrowth, pm1(0.01))
        },
        "sphere-coarsen" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::TwoCaps {
                theta1: 0.8,
                theta2: 2.1,
                split: 1.45,
            }),
            // The smaller cap only closes around t = 0.33, so the horizon
            // extends past it to capture the coarsened two-region state.
            t_end: 0.45,
            output_times: vec![0.05, 0.1, 0.15, 0.45],
            epsilon_list: vec![0.1],
            dt: Some(1e-4),
            ..base(
                "sphere-coarsen",
                MovingDomain::UnitSphereTangential { vbar: 0.0 },
                ModelParams::quartic(-1.0, 1.0, 0.1, 5.0),
            )
        },
        "sphere-reverse" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::TwoCaps {
                theta1: 0.8,
                theta2: 2.1,
                split: 1.45,
            }),
            t_end: 0.15,
            output_times: vec![0.05, 0.1, 0.15],
            epsilon_list: vec![0.1],
            dt: Some(2e-5),
            ..base(
                "sphere-reverse",
                MovingDomain::UnitSphereTangential { vbar: 10.0 },
                ModelParams::quartic(-1.0, 1.0, 0.1, 5.0),
            )
        },
        "sphere-energy" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::TwoCaps {
                theta1: 0.8,
                theta2: 2.1,
                split: 1.45,
            }),
            t_end: 0.05,
            output_times: vec![0.05],
            epsilon_list: vec![0.2, 0.1, 0.05],
            comparison: Comparison::SharpCaps {
                theta1: 0.8,
                theta2: 2.1,
            },
            dt: Some(2e-5),
            ..base(
                "sphere-energy",
                MovingDomain::UnitSphereTangential { vbar: 10.0 },
                ModelParams::quartic(-1.0, 1.0, 0.1, 5.0),
            )
        },
        "mobility-scaling" => ExperimentPreset {
            initial: InitialCondition::Fixed(ProfileSpec::TwoCaps {
                theta1: 1.0,
                theta2: 2.1,
                split: 1.55,
            }),
            t_end: 0.2,
            output_times: vec![0.1, 0.2],
            epsilon_list: vec![0.1],
            mbar_list: vec![5.0, 50.0],
            // The fast-mobility interface outruns the convex-splitting
            // damping unless the steps are well below the layer timescale.
            dt: Some(1e-5),
            ..base(
                "mobility-scaling",
                MovingDomain::DeformingSphere,
                ModelParams::quartic(-1.0, 1.0, 0.1, 5.0),
            )
        },
        "sharp-caps" => ExperimentPreset {
            t_end: 0.15,
            comparison: Comparison::SharpCaps {
                theta1: 0.8,
                theta2: 2.1,
            },
            dt: Some(1e-4),
            ..base(
                "sharp-caps",
                MovingDomain::UnitSphereTangential { vbar: 10.0 },
                ModelParams::quartic(-1.0, 1.0, 0.1, 5.0),
            )
        },
        "sharp-interval" => ExperimentPreset {
            t_end: 10.0,
            comparison: Comparison::SharpInterval {
                lambda0: 0.5,
                orientation: Orientation::MinusPlus,
            },
            dt: Some(1e-3),
            ..base("sharp-interval", MovingDomain::StretchThenStop, pm1(0.1))
        },
        _ => return None,
    })
}

/// Surface-tension constant for the preset's wells (exact for quartic).
pub fn preset_s_constant(params: &ModelParams) -> f64 {
    let c2 = 0.5 * (params.u_b - params.u_a);
    SQRT2 / 3.0 * c2 * c2
}
