//! Built-in lifetime datasets used by the worked examples and the CLI.

/// Intervals in hours between successive failures of the air conditioning
/// system of plane 7912 (Proschan's fleet data), 30 values.
pub const PLANE_7912: [f64; 30] = [
    1.0, 3.0, 5.0, 7.0, 11.0, 11.0, 11.0, 12.0, 14.0, 14.0, 14.0, 16.0, 16.0, 20.0, 21.0, 23.0,
    42.0, 47.0, 52.0, 62.0, 71.0, 71.0, 87.0, 90.0, 95.0, 120.0, 120.0, 225.0, 246.0, 261.0,
];

/// Fatigue life in millions of revolutions of 23 deep-groove ball bearings
/// (Lieblein-Zelen endurance test). Some transcriptions print the seventh
/// value as 48.40; the fitted parameters frozen in the tests assume the
/// 48.80 reading, so keep the two in sync.
pub const BEARINGS: [f64; 23] = [
    17.88, 28.92, 33.00, 41.52, 42.12, 45.60, 48.80, 51.84, 51.96, 54.12, 55.56, 67.80, 68.64,
    68.64, 68.88, 84.12, 93.12, 98.64, 105.12, 105.84, 127.92, 128.04, 173.40,
];
