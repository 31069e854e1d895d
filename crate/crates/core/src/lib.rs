//! Thermodynamic model of a massive-MIMO link.
//!
//! Signals, noise and decoded outputs are described by energy, temperature,
//! entropy and degrees of freedom tied together by `H = U/T = k_B M ln 2`.
//! On top of that bookkeeping the crate computes the detector temperature,
//! the Carnot efficiency of decoding, the energy dissipated per bit, and a
//! thermodynamic channel capacity with lower and upper bounds that reduces to
//! the Shannon capacity when noise carries many more degrees of freedom than
//! the signal.
//!
//! ```
//! use thermimo::{scenario_to_link_spec, thermo_capacity, Scenario};
//!
//! let link = scenario_to_link_spec(&Scenario::table1()).unwrap();
//! let c = thermo_capacity(&link).unwrap();
//! assert!(c.lower_bound <= c.thermo_capacity && c.thermo_capacity <= c.upper_bound);
//! assert!(c.thermo_capacity < c.shannon_reference);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod constants;
pub mod error;
pub mod sweep;
pub mod thermo;

pub use capacity::{
    capacity_bounds, degenerate_capacity, noise_sink_rate, shannon_capacity, thermo_capacity,
    thermo_capacity_with, BranchTerm, CapacityBounds, CapacityOptions, CapacityResult, LinkSpec,
    Warning,
};
pub use channel::{
    eigenmode_gains, generate_channel, link_spec_with_gains, scenario_to_link_spec, ChannelMatrix,
    ChannelMode, Modulation, Scenario,
};
pub use constants::{landauer_floor, PhysicalConstants, BIT_FACTOR, BOLTZMANN};
pub use error::{Error, Result};
pub use sweep::{
    fig4_spec, fig4_sweep, fig5_spec, fig5_sweep, run_sweep, run_sweep_serial, SweepError,
    SweepOutput, SweepRecord, SweepSpec, SweepVariable,
};
pub use thermo::{
    balanced_outputs, carnot_efficiency, decode_entropy_balance, detector_temperature,
    detector_temperature_limits, energy_per_bit, gibbs_entropy, received_quantity,
    sequence_entropy, thermo_quantity, total_noise_dof, total_send_dof, BranchParams,
    DecodeBalance, DecodeBranch, EnergyPerBit, SymbolDistribution, TemperatureLimits,
    ThermoQuantity,
};
