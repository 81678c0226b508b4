//! Companion tooling for `snlevy-core`: model configuration files, the
//! cross-module identity-check suite, and the Monte Carlo validation
//! oracle behind the `snlevy` command-line interface.

pub mod checks;
pub mod config;
pub mod mc;

/// Formats a numeric CSV field with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}
