//! Spectrum reports and number formatting shared by the subcommands.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dense::{vec_norm_inf, CMatrix, C64};
use crate::join::{GeneralizedChain, JoinSpec, SpectralDecomposition};
use crate::smalldense::EigenSettings;

/// Real number with 17 significant digits, locale-free.
pub fn format_real(x: f64) -> String {
    // adding +0.0 turns -0.0 into 0.0
    format!("{:.16e}", x + 0.0)
}

/// Complex number as `re+imi` / `re-imi`.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(z.im.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueRow {
    pub value: String,
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub eigenvalue: String,
    pub provenance: String,
    /// `vectors[0]` is the eigenvector, `vectors[r]` satisfies
    /// `(A - λI) vectors[r] = vectors[r-1]`.
    pub vectors: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharPolyRow {
    /// Ascending powers of `X`.
    pub coefficients: Vec<String>,
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub d: usize,
    pub sizes: Vec<usize>,
    pub diagonalizable: bool,
    pub eigenvalues: Vec<EigenvalueRow>,
    pub reduced_char_poly: CharPolyRow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<ChainRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub eigenvectors: bool,
    pub verify: bool,
    pub settings: EigenSettings,
    pub residual_factor: f64,
    pub cap: usize,
}

/// A chain whose dense residual exceeded the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationFailure {
    pub eigenvalue: C64,
    pub provenance: String,
    pub residual: f64,
    pub tolerance: f64,
}

pub enum ReportError {
    Library(crate::error::Error),
    Verification(VerificationFailure),
}

impl From<crate::error::Error> for ReportError {
    fn from(e: crate::error::Error) -> Self {
        ReportError::Library(e)
    }
}

/// Largest chain residual against the dense matrix, together with the chain
/// that produced it.
pub fn max_chain_residual<'a>(a: &CMatrix, chains: &'a [GeneralizedChain]) -> (f64, Option<&'a GeneralizedChain>) {
    let mut worst = (0.0, None);
    for chain in chains {
        let shifted = a.shifted(chain.eigenvalue);
        for (r, u) in chain.vectors.iter().enumerate() {
            let mut img = shifted.mul_vec(u);
            if r > 0 {
                for (x, p) in img.iter_mut().zip(&chain.vectors[r - 1]) {
                    *x -= p;
                }
            }
            let res = vec_norm_inf(&img);
            if worst.1.is_none() || res > worst.0 {
                worst = (res, Some(chain));
            }
        }
    }
    worst
}

pub fn build_report(spec: &JoinSpec, opts: &ReportOptions) -> std::result::Result<SpectrumReport, ReportError> {
    let dec = spec.full_spectrum_with(&opts.settings)?;
    let mut report = summarize(spec, &dec);
    let chains = if opts.eigenvectors || opts.verify { Some(dec.chains()) } else { None };
    if opts.verify {
        let chains = chains.as_ref().expect("computed above");
        let a = spec.to_dense_capped(opts.cap)?;
        let tol = opts.residual_factor * (1.0 + a.norm_inf());
        let (res, worst) = max_chain_residual(&a, chains);
        if res.is_nan() || res > tol {
            let worst = worst.expect("a nonempty join has chains");
            return Err(ReportError::Verification(VerificationFailure {
                eigenvalue: worst.eigenvalue,
                provenance: worst.provenance.to_string(),
                residual: res,
                tolerance: tol,
            }));
        }
        report.max_residual = Some(res);
        report.residual_tolerance = Some(tol);
    }
    if opts.eigenvectors {
        report.eigenvectors = chains.map(|cs| {
            cs.iter()
                .map(|c| ChainRow {
                    eigenvalue: format_complex(c.eigenvalue),
                    provenance: c.provenance.to_string(),
                    vectors: c.vectors.iter().map(|v| v.iter().map(|&z| format_complex(z)).collect()).collect(),
                })
                .collect()
        });
    }
    Ok(report)
}

fn summarize(spec: &JoinSpec, dec: &SpectralDecomposition) -> SpectrumReport {
    let poly = spec.reduced_char_poly();
    SpectrumReport {
        n: spec.n(),
        d: spec.d(),
        sizes: spec.sizes(),
        diagonalizable: dec.is_diagonalizable(),
        eigenvalues: dec
            .entries()
            .into_iter()
            .map(|e| EigenvalueRow {
                value: format_complex(e.value),
                re: e.value.re,
                im: e.value.im,
                multiplicity: e.multiplicity,
                provenance: e.provenance.to_string(),
            })
            .collect(),
        reduced_char_poly: CharPolyRow {
            coefficients: poly.coefficients().iter().map(|&z| format_complex(z)).collect(),
            display: poly.to_string(),
        },
        eigenvectors: None,
        max_residual: None,
        residual_tolerance: None,
    }
}

impl SpectrumReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per distinct eigenvalue; eigenvectors, when present, follow
    /// after a blank line as one row per chain vector.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,multiplicity,provenance\n");
        for e in &self.eigenvalues {
            writeln!(out, "{},{},{}", e.value, e.multiplicity, e.provenance).expect("write to string");
        }
        if let Some(chains) = &self.eigenvectors {
            out.push_str("\nchain,position,eigenvalue,provenance");
            for i in 0..self.n {
                write!(out, ",x{i}").expect("write to string");
            }
            out.push('\n');
            for (c, chain) in chains.iter().enumerate() {
                for (r, v) in chain.vectors.iter().enumerate() {
                    write!(out, "{c},{r},{},{}", chain.eigenvalue, chain.provenance).expect("write to string");
                    for z in v {
                        write!(out, ",{z}").expect("write to string");
                    }
                    out.push('\n');
                }
            }
        }
        if let Some(r) = self.max_residual {
            write!(out, "\nmax_residual\n{}\n", format_real(r)).expect("write to string");
        }
        out
    }
}
