//! Bundled example families with their expected Kuo verdicts.

use crate::poly::MapGerm;
use crate::regularity::{build_family, DeformationFamily, RegularityError, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteFamily {
    pub name: &'static str,
    pub nvars: usize,
    pub f: &'static [&'static str],
    pub g: &'static [&'static str],
    pub r: u32,
    pub expected_kuo: Verdict,
    /// `F = 0` has no points off the axis near the origin.
    pub empty_y: bool,
}

impl SuiteFamily {
    pub fn germs(&self) -> Result<(MapGerm, MapGerm), RegularityError> {
        Ok((
            MapGerm::parse(self.nvars, self.f)?,
            MapGerm::parse(self.nvars, self.g)?,
        ))
    }

    pub fn family(&self) -> Result<DeformationFamily, RegularityError> {
        let (f, g) = self.germs()?;
        build_family(&f, &g, self.r)
    }
}

pub fn bundled() -> Vec<SuiteFamily> {
    vec![
        SuiteFamily {
            name: "linear",
            nvars: 2,
            f: &["x1"],
            g: &["x1 + x2^2"],
            r: 1,
            expected_kuo: Verdict::Holds,
            empty_y: false,
        },
        SuiteFamily {
            name: "saddle_degenerate",
            nvars: 2,
            f: &["x1^2 - x2^2"],
            g: &["x1^2 - x2^2"],
            r: 2,
            expected_kuo: Verdict::Holds,
            empty_y: false,
        },
        SuiteFamily {
            name: "definite_empty_y",
            nvars: 2,
            f: &["x1^2 + x2^2"],
            g: &["x1^2 + x2^2 + x1^3"],
            r: 2,
            expected_kuo: Verdict::Holds,
            empty_y: true,
        },
        SuiteFamily {
            name: "saddle_cubic",
            nvars: 2,
            f: &["x1^2 - x2^2"],
            g: &["x1^2 - x2^2 + x1^3"],
            r: 2,
            expected_kuo: Verdict::Holds,
            empty_y: false,
        },
        SuiteFamily {
            name: "double_line",
            nvars: 2,
            f: &["x1^2"],
            g: &["x1^2"],
            r: 2,
            expected_kuo: Verdict::Fails,
            empty_y: false,
        },
        SuiteFamily {
            name: "double_line_cubic",
            nvars: 2,
            f: &["x1^2"],
            g: &["x1^2 + x1^3"],
            r: 2,
            expected_kuo: Verdict::Fails,
            empty_y: false,
        },
        SuiteFamily {
            name: "plane_curve_pair",
            nvars: 3,
            f: &["x1", "x2^2 - x3^2"],
            g: &["x1", "x2^2 - x3^2 + x2^3"],
            r: 2,
            expected_kuo: Verdict::Holds,
            empty_y: false,
        },
        SuiteFamily {
            name: "cone_cubic",
            nvars: 3,
            f: &["x1^2 + x2^2 - x3^2"],
            g: &["x1^2 + x2^2 - x3^2 + x1^3"],
            r: 2,
            expected_kuo: Verdict::Holds,
            empty_y: false,
        },
    ]
}

pub fn by_name(name: &str) -> Option<SuiteFamily> {
    bundled().into_iter().find(|s| s.name == name)
}
