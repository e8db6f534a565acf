//! Exact lumping of ODE systems and reaction networks.

pub mod cli;
pub mod encode;
pub mod ir;
pub mod lump;
pub mod parser;
pub mod sim;
pub mod symbolic;
