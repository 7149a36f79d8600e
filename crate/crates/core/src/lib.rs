//! Online orienteering with time windows and release delays.
//!
//! A single unit-speed vehicle moves in a geodesic space of diameter 2 while
//! weighted requests appear online, each servable during a window of length 2,
//! with consecutive releases separated by at least a delay `T`. This crate holds
//! the continuous-time game engine, the online policies, the adaptive adversary
//! constructions, an exact offline optimum, and the numeric machinery behind the
//! known performance and competitive-ratio values.
//!
//! The crate is `no_std` and only needs `alloc`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adversaries;
pub mod duel;
mod error;
pub mod game;
pub mod metric;
pub mod numerics;
pub mod offline;
pub mod policies;

pub use crate::error::{Error, Result};
pub use crate::game::{
    competitive_ratio, performance, run_game, scale_weights, GameConfig, GameTrace, Instance,
    Request, RequestSpec,
};
pub use crate::metric::{MetricSpace, Point, SpaceKind};

/// Default comparison tolerance for times and coordinates.
pub const DEFAULT_TOL: f64 = 1e-9;
