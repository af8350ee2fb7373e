pub mod classify;
pub mod compare;
pub mod nv;
pub mod rank;
pub mod sweep;
