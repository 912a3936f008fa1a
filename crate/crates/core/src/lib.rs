pub mod cli_reports;
pub mod error;
pub mod exact;
pub mod hyp_geom;
pub mod linalg_core;
pub mod orbit_enum;
pub mod twisted_topology;
pub mod zeta_engine;
