#![allow(clippy::needless_range_loop, clippy::should_implement_trait)]

pub mod assume;
pub mod catalog;
pub mod contact;
pub mod curvature;
pub mod eta_einstein;
pub mod frame;
mod linsolve;
pub mod scalar;
pub mod sugra6;
