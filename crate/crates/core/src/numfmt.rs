//! Float formatting for text outputs.

/// Formats with 17 significant digits, enough for an exact f64 round-trip.
pub fn float_repr(x: f64) -> String {
    format!("{x:.16e}")
}

/// Four-decimal display form used in report tables.
pub fn display_4(x: f64) -> String {
    format!("{x:.4}")
}
