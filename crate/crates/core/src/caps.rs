use crate::error::{Error, Result};

/// Size limit for tensor-shaped intermediates (|G|^n tensors, 2^T pattern
/// tables, lag-by-column coefficient matrices). One knob covers them all;
/// the CLI exposes it as `--max-cells` with the `SCENERY_MAX_CELLS`
/// environment variable as a default override.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub max_cells: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_cells: 1 << 24,
        }
    }
}

impl Caps {
    pub fn with_max_cells(max_cells: u64) -> Self {
        Caps { max_cells }
    }

    /// Errors out when an allocation of `needed` cells would exceed the cap.
    pub fn check(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_cells as u128 {
            return Err(Error::CapExceeded {
                what,
                needed,
                cap: self.max_cells,
            });
        }
        Ok(())
    }
}

/// |G|^n as a u128 so cap checks never overflow on adversarial inputs.
pub fn pow_u128(base: usize, exp: usize) -> u128 {
    (base as u128).saturating_pow(exp as u32)
}
