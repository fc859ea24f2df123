//! Fixed code fixtures for golden tests and quick CLI runs.

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::field::Fq;

/// Parameters a preset pins down: the code itself plus a default radius.
pub struct Preset {
    pub name: &'static str,
    pub code: LinearCode,
    pub t: usize,
}

/// The length-3 binary repetition code, t = 1. Unique decoding, zero
/// collision excess.
pub fn repetition3() -> Preset {
    let f2 = Fq::new(2).expect("prime");
    let g = f2.matrix(1, 3, &[1, 1, 1]).expect("shape");
    Preset {
        name: "repetition3",
        code: LinearCode::from_generator(g).expect("full rank"),
        t: 1,
    }
}

/// A fixed [6,3,3] binary code, t = 1.
pub fn hamming6() -> Preset {
    let f2 = Fq::new(2).expect("prime");
    let g = f2
        .matrix(3, 6, &[1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 1])
        .expect("shape");
    Preset {
        name: "hamming6",
        code: LinearCode::from_generator(g).expect("full rank"),
        t: 1,
    }
}

/// The [4,2,3] tetracode over F_3, t = 1.
pub fn ternary() -> Preset {
    let f3 = Fq::new(3).expect("prime");
    let g = f3.matrix(2, 4, &[1, 0, 1, 1, 0, 1, 1, 2]).expect("shape");
    Preset {
        name: "ternary",
        code: LinearCode::from_generator(g).expect("full rank"),
        t: 1,
    }
}

pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        "repetition3" => Ok(repetition3()),
        "hamming6" => Ok(hamming6()),
        "ternary" => Ok(ternary()),
        other => Err(Error::InvalidParameter(format!(
            "unknown preset '{other}' (expected repetition3, hamming6 or ternary)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::DEFAULT_BUDGET;

    #[test]
    fn presets_have_expected_minimum_distances() {
        for (preset, dmin) in [(repetition3(), 3), (hamming6(), 3), (ternary(), 3)] {
            assert_eq!(preset.code.min_distance(DEFAULT_BUDGET).unwrap(), dmin);
            // t=1 is within unique decoding for all three
            assert!(preset.t <= (dmin - 1) / 2);
        }
        assert!(by_name("nope").is_err());
    }
}
