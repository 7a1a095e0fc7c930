//! Trial functions, regularised curvature, `G_ε` and `G₀`, expansion fits
//! and the Γ-trend experiment.

pub mod fit;
pub mod functionals;
pub mod gamma;
pub mod profile;
pub mod smoothing;
pub mod trial;

pub use fit::{fit_expansion, CurveMeta, ExpansionFit, FitModel};
pub use functionals::{g_eps, g_eps_with, g_zero, g_zero_line, open_curve_norm, OpenNorm};
pub use gamma::{gamma_experiment, GammaEntry, GammaReport, Normalisation, Perturbation};
pub use profile::{zeta_profile, ProfileKind, TrialProfile};
pub use smoothing::{smooth_curvature, smooth_curvature_values, solve_screened, SmoothedCurvature};
pub use trial::{trial_lower_bound, trial_upper_profile, LowerBound};
