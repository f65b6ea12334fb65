use serde::{Deserialize, Serialize};

use crate::error::{cap_exceeded, Result};

/// Upper bounds on carrier sizes for the exponential constructions
/// (lowersets, uppersets, powersets). Exceeding a cap is an error; nothing is
/// ever silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest carrier whose lowersets are enumerated for `dagger`, the
    /// Yoneda unit, the monad multiplication and the elementhood relation.
    pub lowerset_input: usize,
    /// Largest argument of a single Low/Up/powerset layer of a functor.
    pub layer_input: usize,
    /// Largest argument of a functor expression with two nested layers.
    pub nested_input: usize,
    /// Largest carrier any functor application may produce.
    pub max_carrier: usize,
}

/// Subsets are encoded as `u64` masks, so no layer can ever see more than this.
pub const MASK_BITS: usize = 63;

impl Default for Caps {
    fn default() -> Self {
        Caps {
            lowerset_input: 16,
            layer_input: 14,
            nested_input: 6,
            max_carrier: 1 << 14,
        }
    }
}

impl Caps {
    /// Uniform cap on every layer input, keeping the default output cap.
    pub fn with_layer_input(n: usize) -> Self {
        Caps {
            lowerset_input: n,
            layer_input: n,
            nested_input: n,
            ..Caps::default()
        }
    }

    pub(crate) fn check_lowerset(&self, what: &str, size: usize) -> Result<()> {
        let cap = self.lowerset_input.min(MASK_BITS);
        if size > cap {
            return Err(cap_exceeded(what, size, cap));
        }
        Ok(())
    }

    pub(crate) fn check_layer(&self, what: &str, size: usize) -> Result<()> {
        let cap = self.layer_input.min(MASK_BITS);
        if size > cap {
            return Err(cap_exceeded(what, size, cap));
        }
        Ok(())
    }

    pub(crate) fn check_nested(&self, what: &str, size: usize) -> Result<()> {
        if size > self.nested_input {
            return Err(cap_exceeded(what, size, self.nested_input));
        }
        Ok(())
    }

    pub(crate) fn check_output(&self, what: &str, size: usize) -> Result<()> {
        if size > self.max_carrier {
            return Err(cap_exceeded(what, size, self.max_carrier));
        }
        Ok(())
    }
}
