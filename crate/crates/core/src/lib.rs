//! Simulator and analysis toolkit for the state-independent Kochen–Specker
//! test on a single photonic qutrit.
//!
//! * [`qutrit`]: states, the 13 Yu–Oh rays, projectors, compatibility graph
//!   and the exact quantum values of both inequalities.
//! * [`oracle`]: brute-force noncontextual bounds (8 and 1).
//! * [`optics`]: Jones-calculus model of the preparation and measurement
//!   optics, including wave-plate angle solvers.
//! * [`counting`]: Monte Carlo photon counting, estimators and error bars.
//! * [`campaign`]: end-to-end runs over many input states and table output.

pub mod campaign;
pub mod counting;
pub mod optics;
pub mod oracle;
pub mod qutrit;
