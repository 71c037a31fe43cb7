//! Reference elements, quadrature and DOF maps for the three mixed pairs.

pub mod basis;
pub mod dofmap;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use basis::{BasisValues, Family, ReferenceBasis, Tabulation};
pub use dofmap::{build_dofmap, DofMap};
pub use quadrature::{quadrature_rule, QuadratureRule};

use crate::error::Error;

/// Quadrature degree used for every norm evaluation.
pub const NORM_QUADRATURE_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementPair {
    /// P2 velocity, P1 pressure.
    TaylorHood,
    /// P1 plus cubic bubble velocity, P1 pressure.
    Mini,
    /// Equal-order P1/P1 with the local projection stabilization.
    #[serde(rename = "p1p1-stab")]
    P1P1Stab,
}

impl ElementPair {
    pub const ALL: [ElementPair; 3] = [ElementPair::TaylorHood, ElementPair::Mini, ElementPair::P1P1Stab];

    pub fn velocity_family(self) -> Family {
        match self {
            ElementPair::TaylorHood => Family::P2,
            ElementPair::Mini => Family::P1Bubble,
            ElementPair::P1P1Stab => Family::P1,
        }
    }

    pub fn pressure_family(self) -> Family {
        Family::P1
    }

    pub fn is_stabilized(self) -> bool {
        self == ElementPair::P1P1Stab
    }

    /// Default assembly quadrature degree. Mini convection terms reach
    /// degree 7 and are slightly under-integrated at 6; see
    /// [`ElementPair::strict_quadrature_degree`].
    pub fn quadrature_degree(self) -> usize {
        match self {
            ElementPair::TaylorHood | ElementPair::Mini => 6,
            ElementPair::P1P1Stab => 4,
        }
    }

    pub fn strict_quadrature_degree(self) -> usize {
        match self {
            ElementPair::Mini => 8,
            other => other.quadrature_degree(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementPair::TaylorHood => "taylor-hood",
            ElementPair::Mini => "mini",
            ElementPair::P1P1Stab => "p1p1-stab",
        }
    }
}

impl fmt::Display for ElementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementPair::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown element pair `{s}`")))
    }
}
