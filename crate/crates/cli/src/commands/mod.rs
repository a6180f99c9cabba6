pub mod bench;
pub mod blocks;
pub mod shadows;
pub mod sweep;
pub mod verify;

use schursim::WeightVector;

use crate::error::{config, CliResult};

/// Fills every unset flag from the config file.
macro_rules! merge_from_file {
    ($flags:ident, $file:ident; $($field:ident),+ $(,)?) => {
        $(
            if $flags.$field.is_none() {
                $flags.$field = $file.$field;
            }
        )+
    };
}
pub(crate) use merge_from_file;

pub fn parse_kvec(s: &str) -> CliResult<WeightVector> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| config(format!("invalid weight vector {s:?}, expected x,y,z")))?;
    match parts.as_slice() {
        &[x, y, z] => Ok(WeightVector::new(x, y, z)),
        _ => Err(config(format!("invalid weight vector {s:?}, expected x,y,z"))),
    }
}
