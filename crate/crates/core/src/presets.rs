//! Built-in study matrices, one per published convergence table.
//!
//! Tables 1 to 6 are density-wave studies over N = 2..5 and the three Mach
//! presets; 7 to 9 use the manufactured solution. `ms` runs 7, 8 and 9.

use crate::config::{CaseSpec, RunSettings, StudyMatrix};
use crate::dg::VolumeMode;
use crate::error::DgError;
use crate::flux::FluxKind;
use crate::physics::GasParams;
use crate::spectral::NodeFamily;
use crate::verification::MachPreset;

pub const TABLE_NAMES: [&str; 10] = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "ms"];

pub const DEGREES: [usize; 4] = [2, 3, 4, 5];

fn matrix(name: &str, nodes: NodeFamily, volume: VolumeMode, fluxes: &[FluxKind], manufactured: bool) -> StudyMatrix {
    let cases = if manufactured {
        vec![CaseSpec::Manufactured]
    } else {
        MachPreset::ALL.into_iter().map(CaseSpec::preset).collect()
    };
    StudyMatrix {
        name: name.to_string(),
        nodes,
        volume,
        gas: GasParams::default(),
        fluxes: fluxes.to_vec(),
        degrees: DEGREES.to_vec(),
        cases,
        settings: RunSettings::default(),
    }
}

/// The study matrices of a named table.
pub fn table(name: &str) -> Result<Vec<StudyMatrix>, DgError> {
    use FluxKind::*;
    use NodeFamily::{Gauss, Lgl};
    use VolumeMode::{Split, Standard};
    let key = name.trim().to_ascii_lowercase();
    let one = |m: StudyMatrix| Ok(vec![m]);
    match key.as_str() {
        "1" => one(matrix("table1", Gauss, Standard, &[Hll, Roe], false)),
        "2" => one(matrix("table2", Lgl, Standard, &[Hll, Roe], false)),
        "3" => one(matrix("table3", Lgl, Split, &[Eckep, Hll, EckepRoe], false)),
        "4" => one(matrix("table4", Gauss, Standard, &[Llf, Hllc], false)),
        "5" => one(matrix("table5", Lgl, Standard, &[Llf, Hllc], false)),
        "6" => one(matrix("table6", Lgl, Split, &[Llf, EckepLlf], false)),
        "7" => one(matrix("table7", Gauss, Standard, &[Llf, Hll, Hllc, Roe], true)),
        "8" => one(matrix("table8", Lgl, Standard, &[Llf, Hll, Hllc, Roe], true)),
        "9" => one(matrix("table9", Lgl, Split, &[Eckep, Llf, EckepLlf, Hll, EckepRoe], true)),
        "ms" => Ok([table("7")?, table("8")?, table("9")?].concat()),
        _ => Err(DgError::Config(format!(
            "unknown table `{name}`; valid tables: {}",
            TABLE_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_is_valid() {
        for name in TABLE_NAMES {
            for m in table(name).unwrap() {
                m.validate().unwrap();
                assert!(!m.runs().unwrap().is_empty());
            }
        }
        assert!(table("10").is_err());
    }

    #[test]
    fn run_counts() {
        let count = |n: &str| table(n).unwrap().iter().map(|m| m.runs().unwrap().len()).sum::<usize>();
        assert_eq!(count("1"), 2 * 4 * 3);
        assert_eq!(count("3"), 3 * 4 * 3);
        assert_eq!(count("7"), 4 * 4);
        assert_eq!(count("ms"), (4 + 4 + 5) * 4);
    }
}
