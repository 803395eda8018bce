//! Input tables, run configuration, synthetic hard-sphere data and the
//! column-format output catalog.

mod config;
mod hard_sphere;
mod noise;
mod output;
mod table;

pub use config::{parse_run_config, parse_run_config_str, CamWindow, Emit3d, Overrides, RunConfig};
pub use hard_sphere::{
    generate_hard_sphere_tables, generate_hard_sphere_tables_with, hard_core_s_matrix,
    potential_s_matrices, HardSphereParams,
};
pub use noise::add_noise;
pub use output::{write_column_file, OutputKey};
pub use table::{
    parse_energy_file, parse_energy_str, write_energy_file, ReconstructionParams, SMatrixTable,
};
