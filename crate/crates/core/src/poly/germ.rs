use serde::{Deserialize, Serialize};

use super::{parse, PolyError, Polynomial};

/// A polynomial map-germ `(R^n, 0) -> (R^p, 0)`.
///
/// Every component has an exactly absent constant term and `n >= p >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapGerm {
    components: Vec<Polynomial>,
    nvars: usize,
}

/// On-disk representation: `{"nvars": n, "components": ["...", ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GermFile {
    pub nvars: usize,
    pub components: Vec<String>,
}

impl MapGerm {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, PolyError> {
        let nvars = components.first().map(Polynomial::nvars).unwrap_or(0);
        let ncomps = components.len();
        if ncomps == 0 || nvars < ncomps {
            return Err(PolyError::GermShape { nvars, ncomps });
        }
        for (j, c) in components.iter().enumerate() {
            if c.nvars() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    got: c.nvars(),
                });
            }
            if c.constant_term() != 0.0 {
                return Err(PolyError::NotAGerm { component: j });
            }
        }
        Ok(MapGerm { components, nvars })
    }

    /// Parses each component string in `x1..x<nvars>`.
    pub fn parse(nvars: usize, components: &[&str]) -> Result<Self, PolyError> {
        let polys = components
            .iter()
            .map(|s| parse(s, nvars))
            .collect::<Result<Vec<_>, _>>()?;
        if polys.is_empty() {
            return Err(PolyError::GermShape { nvars, ncomps: 0 });
        }
        Self::new(polys)
    }

    pub fn from_file(file: &GermFile) -> Result<Self, PolyError> {
        let refs: Vec<&str> = file.components.iter().map(String::as_str).collect();
        Self::parse(file.nvars, &refs)
    }

    pub fn from_json(text: &str) -> Result<Self, PolyError> {
        let file: GermFile =
            serde_json::from_str(text).map_err(|e| PolyError::File(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> GermFile {
        GermFile {
            nvars: self.nvars,
            components: self.components.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ncomps(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.eval_unchecked(x))
            .collect()
    }

    /// Symbolic gradients, one row of `n` partials per component.
    pub fn gradients(&self) -> Vec<Vec<Polynomial>> {
        self.components.iter().map(Polynomial::gradient).collect()
    }

    /// Componentwise difference; both germs must share `n` and `p`.
    pub fn sub(&self, other: &MapGerm) -> Result<MapGerm, PolyError> {
        self.check_shape(other)?;
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a - b)
            .collect();
        Ok(MapGerm {
            components: comps,
            nvars: self.nvars,
        })
    }

    fn check_shape(&self, other: &MapGerm) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        if self.ncomps() != other.ncomps() {
            return Err(PolyError::DimensionMismatch {
                expected: self.ncomps(),
                got: other.ncomps(),
            });
        }
        Ok(())
    }

    /// Checks `j^order g(0) = j^order f(0)` exactly, term by term.
    pub fn check_jet_match(&self, other: &MapGerm, order: u32) -> Result<(), PolyError> {
        self.check_shape(other)?;
        for (j, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            let diff = (a - b).filter_degree(|d| d <= order);
            let first = diff.terms().next().map(|(e, c)| (e.to_vec(), c));
            if let Some((exps, c)) = first {
                let mono = Polynomial::from_terms(self.nvars, [(exps, c)]).expect("shape checked");
                return Err(PolyError::JetMismatch {
                    order,
                    component: j,
                    monomial: mono.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for MapGerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.components.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Truncation to total degree `<= r`: the polynomial representative of the r-jet.
pub fn jet(f: &MapGerm, r: u32) -> MapGerm {
    assert!(r >= 1, "jet order must be at least 1");
    MapGerm {
        components: f
            .components
            .iter()
            .map(|c| c.filter_degree(|d| d <= r))
            .collect(),
        nvars: f.nvars,
    }
}

/// Splits `f = z + q` and `g = z + rres` where `z = jet(f, r)`.
pub fn residuals(f: &MapGerm, g: &MapGerm, r: u32) -> Result<(MapGerm, MapGerm), PolyError> {
    f.check_jet_match(g, r)?;
    let z = jet(f, r);
    Ok((f.sub(&z)?, g.sub(&z)?))
}
