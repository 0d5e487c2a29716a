//! Flight-safety simulation library for a nuisance-free automatic ground
//! collision avoidance system (Auto-GCAS).
//!
//! The stack, bottom to top:
//!
//! - [`airframe`]: 6-DoF rigid-body flight dynamics with polynomial
//!   aerodynamics, first-order actuators, and a fixed-step RK4 integrator.
//! - [`flight_control`]: angular-rate control augmentation via nonlinear
//!   dynamic inversion (NDI) plus incremental control allocation onto five
//!   surfaces through a Moore-Penrose pseudo-inverse.
//! - [`gcas`]: the ground-collision safety filter. Decomposes the altitude
//!   dynamics to isolate pitch rate, evaluates an exponential control
//!   barrier function (ECBF) constraint, and solves the resulting 1-D QP in
//!   closed form.
//! - [`gain_designer`]: offline multi-objective optimization that produces
//!   the adaptive ECBF gain schedule over a (bank, pitch, airspeed) grid of
//!   dive conditions.
//! - [`fep`]: flight envelope protection. CBF filters for angle of attack /
//!   load factor (supervising the GCAS pitch command) and bank angle
//!   (bank-to-level roll command).
//! - [`terrain`]: synthetic and gridded terrain elevation plus the forward
//!   rectangular scan that feeds the filter's terrain height input.
//! - [`harness`]: scenario execution, closed-loop wiring, nuisance metrics
//!   (including dynamic time warping), and Monte Carlo campaigns.
//!
//! Units are SI with angles in radians everywhere inside the library;
//! degrees appear only at configuration and CLI boundaries.

pub mod airframe;
pub mod error;
pub mod fep;
pub mod flight_control;
pub mod gain_designer;
pub mod gcas;
pub mod harness;
pub mod terrain;

pub use error::{Error, Result};
