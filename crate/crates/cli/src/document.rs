//! Map documents: `{"degree": d, "numerator": [[re, im], ...], "denominator": [...]}`
//! with coefficients ascending in the power of `X`.

use multspec_core::{Cplx, HomForm2, RationalMap};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub degree: usize,
    pub numerator: Vec<[f64; 2]>,
    pub denominator: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MapDocument {
    pub fn from_map(f: &RationalMap, label: Option<String>) -> Self {
        let pairs = |h: &HomForm2<f64>| h.coeffs().iter().map(|z| [z.re, z.im]).collect();
        MapDocument { degree: f.degree(), numerator: pairs(f.numerator()), denominator: pairs(f.denominator()), label }
    }

    pub fn to_map(&self) -> Result<RationalMap, CliError> {
        for (name, side) in [("numerator", &self.numerator), ("denominator", &self.denominator)] {
            if side.len() != self.degree + 1 {
                return Err(CliError::Shape(format!(
                    "{name} has {} coefficients, degree {} needs {}",
                    side.len(),
                    self.degree,
                    self.degree + 1
                )));
            }
        }
        let form =
            |v: &[[f64; 2]]| HomForm2::new(v.iter().map(|&[re, im]| Complex::new(re, im)).collect::<Vec<Cplx<f64>>>());
        Ok(RationalMap::new(form(&self.numerator), form(&self.denominator))?)
    }
}

pub fn parse_map_document(text: &[u8]) -> Result<RationalMap, CliError> {
    let text = std::str::from_utf8(text).map_err(|e| CliError::Parse(format!("not UTF-8: {e}")))?;
    let doc: MapDocument = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    doc.to_map()
}

/// Canonical bytes of a map document.
pub fn serialize_map(f: &RationalMap, label: Option<String>) -> Vec<u8> {
    let value = serde_json::to_value(MapDocument::from_map(f, label)).expect("map documents serialize");
    crate::report::canonical_bytes(&value)
}
