//! Process-wide enumeration bound.

use std::sync::LazyLock;

pub const DEFAULT_MAX_ENUM: u128 = 1 << 20;

/// Environment variable that overrides [`DEFAULT_MAX_ENUM`].
pub const MAX_ENUM_ENV: &str = "RELCRYPT_MAX_ENUM";

static MAX_ENUM: LazyLock<u128> = LazyLock::new(|| {
    std::env::var(MAX_ENUM_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|v| *v > 0)
        .unwrap_or(DEFAULT_MAX_ENUM)
});

/// Largest number of input assignments, joint seeds or strategies any exhaustive
/// enumeration may visit.
pub fn max_enum() -> u128 {
    *MAX_ENUM
}
