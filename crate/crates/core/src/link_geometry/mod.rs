//! Geometry of links in S³.

pub mod curve;
pub mod flux;
pub mod frame;
pub mod hopf;
pub mod linking;
pub mod metric;
pub mod phase;
pub mod s3;
pub mod tubular;

pub use curve::{arclength_reparametrize, CurveJet, GreatCircle, KnotCurve, ParametrizedCurve, TorusCurve};
pub use flux::{flux_distance, Flux, FluxVector};
pub use frame::{seifert_frame, ConstantNormal, FrameField, FrameSample, NormalField, TorusNormal};
pub use hopf::{fiber_disk_normal, hopf_map, hopf_preimage, s2_from_angles, S2Point};
pub use linking::linking_number;
pub use metric::{dist_config, dist_submanifold, Interval, SeifertComponent, SphericalCap, SubmanifoldSample};
pub use phase::{phase_jump_multi, phase_jump_single, slope_c_k, Crossing, Cut, DiskSurface};
pub use s3::{exp_geodesic, geodesic_distance, Point4};
pub use tubular::{delta_bound, TubeCoords, TubularChart};
