//! Test-function families that bracket Paneitz constants: concentrating
//! bubbles, cutoffs around a point, connected-sum splittings and cylinder
//! necks.

pub mod bubble;
pub mod connected_sum;
pub mod cutoff;
pub mod cylinder;

pub use bubble::{
    bubble, bubble_quotient, bubble_sweep, euclidean_bubble_mass, euclidean_bubble_quotient,
    sphere_constant_intrinsic, BubbleParams, BubbleProfile, BubbleReport, BubbleSweep, Smoothing,
};
pub use connected_sum::{
    combine_sum_form, connected_sum_quotient, disjoint_union_constant, epsilon_split, Certificate,
    ConnectedSumInput, ConnectedSumReport, ConnectedSumSide, DisjointUnion, SideSummary,
};
pub use cutoff::{
    cut_quotient, cutoff_family, cutoff_jet, cutoff_sweep, radial_cutoff_constants,
    trig_base_quotient, CutoffField, CutoffParams, CutoffPoint, CutoffSweep,
};
pub use cylinder::{
    cylinder_energy_profile, cylinder_positivity, extend_over_collar, extend_over_collar_numeric,
    length_sweep, slice_finder, CylinderPositivity, LengthSweepPoint, Slice,
};
