//! Matrix descriptors of the form `gallery:grcar:6`, `file:west0067.mtx` or
//! `json:{"n":2,"entries":[...]}`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gallery;
use crate::linalg::{CMatrix, C64};
use crate::mtx;
use crate::subspace::{self, CompanionForm, StructureSubspace};

/// A named test matrix with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GallerySpec {
    Grcar { n: usize, k: usize },
    Kahan { n: usize, theta: Option<f64>, pert: f64 },
    Russians1,
    Russians2,
    DiagOneZero,
    CompanionExample,
    Companion { form: CompanionForm, coeffs: Vec<C64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Gallery(GallerySpec),
    File(PathBuf),
    /// Inline `{n, entries}` JSON text.
    Json(String),
}

/// Inline matrix format: `n` and `n²` row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineMatrix {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl InlineMatrix {
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("inline matrices are square, got {:?}", m.shape())));
        }
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n == 0 || self.entries.len() != self.n * self.n {
            return Err(Error::Dimension(format!(
                "inline matrix with n = {} needs {} entries, got {}",
                self.n,
                self.n * self.n,
                self.entries.len()
            )));
        }
        Ok(CMatrix::from_row_iterator(
            self.n,
            self.n,
            self.entries.iter().map(|e| C64::new(e[0], e[1])),
        ))
    }
}

fn parse_num<T: FromStr>(what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parameter(format!("cannot parse {what} from {s:?}")))
}

fn parse_gallery(rest: &str) -> Result<GallerySpec> {
    let parts: Vec<&str> = rest.split(':').collect();
    let arity = |lo: usize, hi: usize| -> Result<()> {
        if parts.len() < lo || parts.len() > hi {
            Err(Error::Parameter(format!("gallery:{rest}: wrong number of parameters")))
        } else {
            Ok(())
        }
    };
    match parts[0] {
        "grcar" => {
            arity(2, 3)?;
            let n = parse_num("n", parts[1])?;
            let k = parts.get(2).map_or(Ok(3), |k| parse_num("k", k))?;
            Ok(GallerySpec::Grcar { n, k })
        }
        "kahan" => {
            arity(2, 4)?;
            let n = parse_num("n", parts[1])?;
            let theta = parts
                .get(2)
                .filter(|t| **t != "default")
                .map(|t| parse_num("θ", t))
                .transpose()?;
            let pert = parts.get(3).map_or(Ok(25.0), |p| parse_num("pert", p))?;
            Ok(GallerySpec::Kahan { n, theta, pert })
        }
        "russians1" => arity(1, 1).map(|_| GallerySpec::Russians1),
        "russians2" => arity(1, 1).map(|_| GallerySpec::Russians2),
        "diag10" => arity(1, 1).map(|_| GallerySpec::DiagOneZero),
        "companion-example" => arity(1, 1).map(|_| GallerySpec::CompanionExample),
        "companion" => {
            if parts.len() < 4 {
                return Err(Error::Parameter(
                    "gallery:companion:<form>:a0:a1:... needs at least two coefficients".into(),
                ));
            }
            let form = parts[1].parse()?;
            let coeffs = parts[2..]
                .iter()
                .map(|c| parse_num("coefficient", c))
                .collect::<Result<Vec<C64>>>()?;
            Ok(GallerySpec::Companion { form, coeffs })
        }
        other => Err(Error::Parameter(format!("unknown gallery matrix {other:?}"))),
    }
}

impl FromStr for MatrixSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (scheme, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("matrix descriptor {s:?} has no scheme")))?;
        match scheme {
            "gallery" => parse_gallery(rest).map(MatrixSource::Gallery),
            "file" if !rest.is_empty() => Ok(MatrixSource::File(PathBuf::from(rest))),
            "json" if !rest.is_empty() => Ok(MatrixSource::Json(rest.to_string())),
            _ => Err(Error::Parameter(format!(
                "matrix descriptor {s:?}: expected gallery:, file: or json:"
            ))),
        }
    }
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSource::File(p) => write!(f, "file:{}", p.display()),
            MatrixSource::Json(t) => write!(f, "json:{t}"),
            MatrixSource::Gallery(g) => match g {
                GallerySpec::Grcar { n, k } => write!(f, "gallery:grcar:{n}:{k}"),
                GallerySpec::Kahan { n, theta: None, pert } => write!(f, "gallery:kahan:{n}:default:{pert}"),
                GallerySpec::Kahan { n, theta: Some(t), pert } => write!(f, "gallery:kahan:{n}:{t}:{pert}"),
                GallerySpec::Russians1 => f.write_str("gallery:russians1"),
                GallerySpec::Russians2 => f.write_str("gallery:russians2"),
                GallerySpec::DiagOneZero => f.write_str("gallery:diag10"),
                GallerySpec::CompanionExample => f.write_str("gallery:companion-example"),
                GallerySpec::Companion { form, coeffs } => {
                    let form = serde_json::to_value(form).map_err(|_| fmt::Error)?;
                    write!(f, "gallery:companion:{}", form.as_str().unwrap_or_default())?;
                    coeffs.iter().try_for_each(|c| {
                        if c.im == 0.0 {
                            write!(f, ":{}", c.re)
                        } else {
                            write!(f, ":{c}")
                        }
                    })
                }
            },
        }
    }
}

impl MatrixSource {
    /// Build the matrix; every source must yield a square matrix with `n ≥ 2`.
    pub fn load(&self) -> Result<CMatrix> {
        let m = match self {
            MatrixSource::Gallery(g) => match g {
                GallerySpec::Grcar { n, k } => gallery::grcar(*n, *k)?,
                GallerySpec::Kahan { n, theta, pert } => {
                    let theta = theta.unwrap_or_else(|| gallery::kahan_default_theta(*n));
                    gallery::kahan(*n, theta, *pert)?
                }
                GallerySpec::Russians1 => gallery::russians_example1(),
                GallerySpec::Russians2 => gallery::russians_example2(),
                GallerySpec::DiagOneZero => gallery::diag_one_zero(),
                GallerySpec::CompanionExample => gallery::companion_example(),
                GallerySpec::Companion { form, coeffs } => gallery::companion_from_poly(coeffs, *form)?,
            },
            MatrixSource::File(p) => mtx::read_matrix_market(p)?,
            MatrixSource::Json(text) => serde_json::from_str::<InlineMatrix>(text)?.to_matrix()?,
        };
        if !m.is_square() || m.nrows() < 2 {
            return Err(Error::Dimension(format!("need a square matrix with n ≥ 2, got {:?}", m.shape())));
        }
        Ok(m)
    }
}

/// Structure selector: `full`, `pattern`, `toeplitz`, `toeplitz-pattern`,
/// `companion:<form>` or `basis:<file>`. Patterns are taken from the nonzeros
/// of `A`.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureSpec {
    Full,
    Pattern,
    Toeplitz,
    ToeplitzPattern,
    Companion(CompanionForm),
    Basis(PathBuf),
}

impl FromStr for StructureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "pattern" => Ok(Self::Pattern),
            "toeplitz" => Ok(Self::Toeplitz),
            "toeplitz-pattern" => Ok(Self::ToeplitzPattern),
            _ => match s.split_once(':') {
                Some(("companion", form)) => Ok(Self::Companion(form.parse()?)),
                Some(("basis", path)) if !path.is_empty() => Ok(Self::Basis(PathBuf::from(path))),
                _ => Err(Error::Parameter(format!("unknown structure {s:?}"))),
            },
        }
    }
}

impl StructureSpec {
    pub fn build(&self, a: &CMatrix) -> Result<StructureSubspace> {
        let n = a.nrows();
        let s = match self {
            Self::Full => subspace::full_space(n)?,
            Self::Pattern => subspace::pattern_space(&subspace::nonzero_mask(a))?,
            Self::Toeplitz => subspace::toeplitz_space(n)?,
            Self::ToeplitzPattern => subspace::toeplitz_pattern_space(&subspace::nonzero_mask(a))?,
            Self::Companion(form) => subspace::companion_space(n, *form)?,
            Self::Basis(path) => subspace::custom_space_from_json(&std::fs::read_to_string(path)?)?,
        };
        if s.n() != n {
            return Err(Error::Dimension(format!("structure is for n = {}, A is {n}×{n}", s.n())));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gallery_descriptors() {
        let m: MatrixSource = "gallery:grcar:6".parse().unwrap();
        assert_eq!(m, MatrixSource::Gallery(GallerySpec::Grcar { n: 6, k: 3 }));
        assert_eq!(m.load().unwrap(), gallery::grcar(6, 3).unwrap());
        let m: MatrixSource = "gallery:kahan:6".parse().unwrap();
        assert_eq!(m.load().unwrap(), gallery::kahan(6, gallery::kahan_default_theta(6), 25.0).unwrap());
        let m: MatrixSource = "gallery:companion:first-row:1:-2:0".parse().unwrap();
        assert_eq!(m.load().unwrap().nrows(), 3);
        for bad in ["grcar:6", "gallery:grcar", "gallery:grcar:x", "gallery:nope", "gallery:grcar:1", "file:"] {
            let r = bad.parse::<MatrixSource>().and_then(|m| m.load());
            assert!(r.is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for d in [
            "gallery:grcar:15:3",
            "gallery:kahan:6:default:25",
            "gallery:russians2",
            "gallery:companion:last-row:91:55:13",
            "file:data/west0067.mtx",
        ] {
            let m: MatrixSource = d.parse().unwrap();
            assert_eq!(m.to_string(), d);
        }
    }

    #[test]
    fn inline_json() {
        let m: MatrixSource = r#"json:{"n":2,"entries":[[1,0],[0,2],[3,0],[0,0]]}"#.parse().unwrap();
        let a = m.load().unwrap();
        assert_eq!(a[(0, 1)], C64::new(0.0, 2.0));
        assert_eq!(a[(1, 0)], C64::new(3.0, 0.0));
        let back = InlineMatrix::from_matrix(&a).unwrap().to_matrix().unwrap();
        assert_eq!(back, a);
        let short: MatrixSource = r#"json:{"n":2,"entries":[[1,0]]}"#.parse().unwrap();
        assert!(matches!(short.load(), Err(Error::Dimension(_))));
    }

    #[test]
    fn structure_selectors() {
        let a = gallery::grcar(6, 3).unwrap();
        let dims = [("full", 36), ("pattern", 23), ("toeplitz", 11), ("toeplitz-pattern", 5), ("companion:first-row", 6)];
        for (name, dim) in dims {
            let s: StructureSpec = name.parse().unwrap();
            assert_eq!(s.build(&a).unwrap().dim(), dim, "{name}");
        }
        for bad in ["", "toeplitz-", "companion:middle", "basis:"] {
            assert!(bad.parse::<StructureSpec>().is_err(), "{bad}");
        }
        let missing: StructureSpec = "basis:/nonexistent/basis.json".parse().unwrap();
        assert!(matches!(missing.build(&a), Err(Error::Io(_))));
    }
}
