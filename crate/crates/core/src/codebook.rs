//! Structured quantization codebook: `M` independent Haar sub-codebooks of
//! `N_t` orthonormal codewords each.
//!
//! Codewords are addressed either by `(sub, beam)` or by the zero-based flat
//! index `sub * n_t + beam`; the flat index is what a feedback user sends
//! back (`log2 N` bits).
//!
//! Text format:
//!
//! ```text
//! n_t m
//! re im re im ...   <- one codeword per line, N = m * n_t lines
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::channel::norm_sqr;
use crate::haar::haar_columns;
use crate::{Error, Result, Scalar};

/// Generated codebooks with a smaller minimum distance are redrawn once.
pub const MIN_DISTANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    n_t: usize,
    m: usize,
    vectors: Vec<Vec<Complex<T>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodebookStats<T> {
    pub min_distance: T,
    /// Flat indices of the closest pair; `None` when the codebook has one codeword.
    pub argmin_pair: Option<(usize, usize)>,
}

fn inner<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

impl<T: Scalar> Codebook<T> {
    /// Builds a codebook from flat-indexed codewords and checks its invariants.
    pub fn from_vectors(n_t: usize, m: usize, vectors: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let cb = Self { n_t, m, vectors };
        cb.validate()?;
        Ok(cb)
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_total(&self) -> usize {
        self.m * self.n_t
    }

    pub fn vectors(&self) -> &[Vec<Complex<T>>] {
        &self.vectors
    }

    pub fn flat_index(&self, sub: usize, beam: usize) -> usize {
        sub * self.n_t + beam
    }

    pub fn split_index(&self, flat: usize) -> (usize, usize) {
        (flat / self.n_t, flat % self.n_t)
    }

    pub fn vector(&self, sub: usize, beam: usize) -> &[Complex<T>] {
        &self.vectors[self.flat_index(sub, beam)]
    }

    pub fn sub_codebook(&self, sub: usize) -> &[Vec<Complex<T>>] {
        &self.vectors[sub * self.n_t..(sub + 1) * self.n_t]
    }

    /// Unit norms, within-sub-codebook orthogonality and shape.
    pub fn validate(&self) -> Result<()> {
        if self.n_t == 0 || self.m == 0 {
            return Err(Error::Validation(format!(
                "n_t and m must be >= 1 (got n_t={}, m={})",
                self.n_t, self.m
            )));
        }
        if self.vectors.len() != self.n_total() {
            return Err(Error::Validation(format!(
                "expected {} codewords, found {}",
                self.n_total(),
                self.vectors.len()
            )));
        }
        for (idx, v) in self.vectors.iter().enumerate() {
            if v.len() != self.n_t {
                return Err(Error::Validation(format!(
                    "codeword {idx} has {} entries, expected {}",
                    v.len(),
                    self.n_t
                )));
            }
            let dev = (norm_sqr(v).sqrt() - T::one()).abs().to_f64_lossy();
            if !(dev <= T::NORM_TOL) {
                return Err(Error::Validation(format!(
                    "codeword {idx} is not unit norm (|‖f‖ - 1| = {dev:e})"
                )));
            }
        }
        for sub in 0..self.m {
            for a in 0..self.n_t {
                for b in (a + 1)..self.n_t {
                    let ip = inner(self.vector(sub, a), self.vector(sub, b)).norm().to_f64_lossy();
                    if !(ip < T::ORTHO_TOL) {
                        return Err(Error::Validation(format!(
                            "codewords {} and {} of sub-codebook {sub} are not orthogonal (|f_a'f_b| = {ip:e})",
                            self.flat_index(sub, a),
                            self.flat_index(sub, b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let digits = T::TEXT_DIGITS - 1;
        let mut out = format!("{} {}\n", self.n_t, self.m);
        for v in &self.vectors {
            let mut first = true;
            for z in v {
                for part in [z.re, z.im] {
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    let _ = write!(out, "{:.*e}", digits, part);
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header `n_t m`".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: hline,
                message: format!("header must be `n_t m`, found {} fields", dims.len()),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: hline,
                message: format!("bad dimension {s:?}: {e}"),
            })
        };
        let n_t = parse_dim(dims[0])?;
        let m = parse_dim(dims[1])?;
        if n_t == 0 || m == 0 {
            return Err(Error::Parse {
                line: hline,
                message: "n_t and m must be >= 1".into(),
            });
        }

        let mut vectors = Vec::with_capacity(n_t * m);
        for (line, body) in lines {
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 2 * n_t {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} columns, found {}", 2 * n_t, fields.len()),
                });
            }
            let mut parts = Vec::with_capacity(fields.len());
            for f in fields {
                let x: T = f.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("not a number: {f:?}"),
                })?;
                parts.push(x);
            }
            vectors.push(
                parts
                    .chunks_exact(2)
                    .map(|p| Complex::new(p[0], p[1]))
                    .collect(),
            );
        }
        if vectors.len() != n_t * m {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("expected {} codewords, found {}", n_t * m, vectors.len()),
            });
        }
        Self::from_vectors(n_t, m, vectors)
    }
}

fn draw<T: Scalar, R: Rng + ?Sized>(n_t: usize, m: usize, rng: &mut R) -> Codebook<T> {
    let vectors = (0..m).flat_map(|_| haar_columns(rng, n_t)).collect();
    Codebook { n_t, m, vectors }
}

pub fn generate_codebook<T: Scalar, R: Rng + ?Sized>(
    n_t: usize,
    m: usize,
    rng: &mut R,
) -> Result<Codebook<T>> {
    if n_t == 0 || m == 0 {
        return Err(Error::InvalidDimension(format!(
            "codebook needs n_t >= 1 and m >= 1 (got n_t={n_t}, m={m})"
        )));
    }
    for _ in 0..2 {
        let cb: Codebook<T> = draw(n_t, m, rng);
        if min_distance(&cb).min_distance.to_f64_lossy() >= MIN_DISTANCE_FLOOR {
            cb.validate()?;
            return Ok(cb);
        }
    }
    Err(Error::Generation(format!(
        "minimum distance below {MIN_DISTANCE_FLOOR:e} after a redraw"
    )))
}

/// Exhaustive minimum of `1 - |f_a' f_b|²` over distinct codeword pairs.
pub fn min_distance<T: Scalar>(cb: &Codebook<T>) -> CodebookStats<T> {
    let mut best = CodebookStats {
        min_distance: T::one(),
        argmin_pair: None,
    };
    let n = cb.vectors.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let d = T::one() - inner(&cb.vectors[a], &cb.vectors[b]).norm_sqr();
            if best.argmin_pair.is_none() || d < best.min_distance {
                best = CodebookStats {
                    min_distance: d,
                    argmin_pair: Some((a, b)),
                };
            }
        }
    }
    best
}

pub fn save_codebook<T: Scalar>(cb: &Codebook<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, cb.to_text())?;
    Ok(())
}

pub fn load_codebook<T: Scalar>(path: impl AsRef<Path>) -> Result<Codebook<T>> {
    Codebook::parse(&fs::read_to_string(path)?)
}
