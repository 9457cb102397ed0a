//! Codebooks of unit-norm complex vectors: isotropic random generation,
//! max-min chordal distance design and a plain-text file format.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::labels;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookKind {
    RandomIsotropic,
    Designed,
}

impl CodebookKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CodebookKind::RandomIsotropic => "random_isotropic",
            CodebookKind::Designed => "designed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    pub vectors: Vec<Vec<Complex64>>,
    pub kind: CodebookKind,
    pub seed: u64,
    /// Smallest pairwise chordal distance; 1 for a single codeword.
    pub min_chordal: f64,
}

impl Codebook {
    /// Wraps `vectors` (normalized here) and caches the chordal distance.
    pub fn new(n: usize, vectors: Vec<Vec<Complex64>>, kind: CodebookKind, seed: u64) -> Result<Self> {
        if n == 0 || vectors.is_empty() {
            return Err(Error::domain("a codebook needs n >= 1 and at least one vector"));
        }
        let mut vectors = vectors;
        for v in &mut vectors {
            if v.len() != n {
                return Err(Error::domain(format!(
                    "codeword of length {} in dimension {n}",
                    v.len()
                )));
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::domain("codeword with zero or non-finite norm"));
            }
            v.iter_mut().for_each(|z| *z /= norm);
        }
        let mut cb = Codebook {
            n,
            vectors,
            kind,
            seed,
            min_chordal: 1.0,
        };
        cb.min_chordal = chordal_of(&cb.matrix());
        Ok(cb)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `n x K` matrix with the codewords as columns.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.len(), |i, k| self.vectors[k][i])
    }

    fn from_matrix(v: &DMatrix<Complex64>, kind: CodebookKind, seed: u64) -> Self {
        let vectors = (0..v.ncols()).map(|k| v.column(k).iter().copied().collect()).collect();
        Codebook {
            n: v.nrows(),
            vectors,
            kind,
            seed,
            min_chordal: chordal_of(v),
        }
    }

    /// Text form: a header of `key value` lines followed by one line per
    /// codeword holding `2n` interleaved real and imaginary parts.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "K {}", self.len());
        let _ = writeln!(s, "kind {}", self.kind.as_str());
        let _ = writeln!(s, "seed {}", self.seed);
        let _ = writeln!(s, "min_chordal {:.16e}", self.min_chordal);
        for v in &self.vectors {
            let line: Vec<String> = v
                .iter()
                .flat_map(|z| [format!("{:.16e}", z.re), format!("{:.16e}", z.im)])
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses [`Codebook::to_text`] output. Values are taken as written, so
    /// a round trip is bit-exact.
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::domain(format!("malformed codebook file: {what}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(&format!("missing {key}")))?;
            let (k, v) = line.trim().split_once(' ').ok_or_else(|| bad(line))?;
            if k != key {
                return Err(bad(&format!("expected {key}, found {k}")));
            }
            Ok(v.trim().to_string())
        };
        let n: usize = field("n")?.parse().map_err(|_| bad("n"))?;
        let k: usize = field("K")?.parse().map_err(|_| bad("K"))?;
        let kind = match field("kind")?.as_str() {
            "random_isotropic" => CodebookKind::RandomIsotropic,
            "designed" => CodebookKind::Designed,
            other => return Err(bad(&format!("kind {other}"))),
        };
        let seed: u64 = field("seed")?.parse().map_err(|_| bad("seed"))?;
        let min_chordal: f64 = field("min_chordal")?.parse().map_err(|_| bad("min_chordal"))?;
        let mut vectors = Vec::with_capacity(k);
        for line in lines {
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("codeword entry"))?;
            if vals.len() != 2 * n {
                return Err(bad(&format!("codeword with {} values, expected {}", vals.len(), 2 * n)));
            }
            vectors.push(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
        }
        if vectors.len() != k || n == 0 || k == 0 {
            return Err(bad(&format!("{} codewords, header says {k}", vectors.len())));
        }
        Ok(Codebook {
            n,
            vectors,
            kind,
            seed,
            min_chordal,
        })
    }
}

/// Smallest `sqrt(1 - |u^† v|^2)` over distinct columns; 1 for one column.
fn chordal_of(v: &DMatrix<Complex64>) -> f64 {
    let g = v.adjoint() * v;
    let k = v.ncols();
    let mut worst: f64 = 0.0;
    for j in 0..k {
        for i in 0..j {
            worst = worst.max(g[(i, j)].norm_sqr());
        }
    }
    if k < 2 {
        1.0
    } else {
        (1.0 - worst).max(0.0).sqrt()
    }
}

pub fn min_chordal_distance(cb: &Codebook) -> Result<f64> {
    if cb.len() < 2 {
        return Err(Error::domain(format!(
            "the chordal distance needs at least two codewords, got {}",
            cb.len()
        )));
    }
    Ok(chordal_of(&cb.matrix()))
}

/// Isotropic unit vector `z / ||z||` with `z ~ CN(0, I_n)`.
pub(crate) fn isotropic_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..n).map(|_| rng::complex_normal(rng)).collect();
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return z.into_iter().map(|c| c / norm).collect();
        }
    }
}

pub(crate) fn isotropic_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n, k);
    for j in 0..k {
        let v = isotropic_vector(rng, n);
        m.column_mut(j).iter_mut().zip(v).for_each(|(d, s)| *d = s);
    }
    m
}

pub fn random_codebook(n: usize, k: usize, seed: u64) -> Result<Codebook> {
    if n == 0 || k == 0 {
        return Err(Error::domain(format!("n and K must be positive, got n={n}, K={k}")));
    }
    let mut r = rng::labelled_substream(seed, labels::CODEBOOK, 0);
    Ok(Codebook::from_matrix(
        &isotropic_matrix(&mut r, n, k),
        CodebookKind::RandomIsotropic,
        seed,
    ))
}

/// Locally optimized codebook of `K` lines in `C^n`.
///
/// Minimizes the soft maximum `(1/tau) log sum_{j<k} exp(tau |v_j^† v_k|^2)`
/// by projected gradient steps on the unit spheres with backtracking, while
/// `tau` rises geometrically. Restart 0 starts from
/// `random_codebook(n, K, seed)`, seven more from fresh isotropic draws. The
/// codebook with the largest true minimum chordal distance seen anywhere,
/// initial points included, is returned. For `K <= n` the result is an
/// orthonormal set.
pub fn design_codebook(n: usize, k: usize, seed: u64, iterations: usize) -> Result<Codebook> {
    const RESTARTS: u64 = 8;
    if iterations == 0 {
        return Err(Error::domain("design needs at least one iteration"));
    }
    let start = random_codebook(n, k, seed)?;
    if k == 1 {
        return Ok(Codebook {
            kind: CodebookKind::Designed,
            ..start
        });
    }
    if k <= n {
        let q = orthonormalize(&start.matrix());
        return Ok(Codebook::from_matrix(&q, CodebookKind::Designed, seed));
    }
    let mut best = start.matrix();
    let mut best_d = start.min_chordal;
    for restart in 0..RESTARTS {
        let init = if restart == 0 {
            start.matrix()
        } else {
            let mut r = rng::labelled_substream(seed, labels::DESIGN, restart);
            isotropic_matrix(&mut r, n, k)
        };
        let (v, d) = descend(init, iterations);
        if d > best_d {
            best = v;
            best_d = d;
        }
    }
    Ok(Codebook::from_matrix(&best, CodebookKind::Designed, seed))
}

fn orthonormalize(v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut q = v.clone();
    for j in 0..q.ncols() {
        // modified Gram-Schmidt, twice for stability
        for _ in 0..2 {
            for i in 0..j {
                let c = q.column(i).dotc(&q.column(j));
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-c, &qi, Complex64::new(1.0, 0.0));
            }
        }
        let nrm = q.column(j).norm();
        q.column_mut(j).unscale_mut(nrm);
    }
    q
}

fn soft_max(g: &DMatrix<Complex64>, tau: f64) -> (f64, f64) {
    let k = g.ncols();
    let mut top: f64 = 0.0;
    for j in 0..k {
        for i in 0..j {
            top = top.max(g[(i, j)].norm_sqr());
        }
    }
    let mut s = 0.0;
    for j in 0..k {
        for i in 0..j {
            s += (tau * (g[(i, j)].norm_sqr() - top)).exp();
        }
    }
    (top + s.ln() / tau, top)
}

fn normalize_columns(v: &mut DMatrix<Complex64>) {
    for mut c in v.column_iter_mut() {
        let nrm = c.norm();
        c.unscale_mut(nrm);
    }
}

fn descend(mut v: DMatrix<Complex64>, iterations: usize) -> (DMatrix<Complex64>, f64) {
    const TAU_START: f64 = 10.0;
    const TAU_END: f64 = 2000.0;
    let k = v.ncols();
    let mut best = v.clone();
    let mut g = v.adjoint() * &v;
    let (_, top) = soft_max(&g, TAU_START);
    let mut best_top = top;
    let mut step = 0.1;
    for it in 0..iterations {
        let frac = if iterations > 1 {
            it as f64 / (iterations - 1) as f64
        } else {
            1.0
        };
        let tau = TAU_START * (TAU_END / TAU_START).powf(frac);
        let (obj, top) = soft_max(&g, tau);
        // softmax weights on off-diagonal coherences
        let mut w = DMatrix::<Complex64>::zeros(k, k);
        let mut z = 0.0;
        for j in 0..k {
            for i in 0..k {
                if i != j {
                    let e = (tau * (g[(i, j)].norm_sqr() - top)).exp();
                    w[(i, j)] = g[(i, j)] * e;
                    z += if i < j { e } else { 0.0 };
                }
            }
        }
        w.unscale_mut(z);
        let mut grad = &v * w;
        // project onto the tangent space of each sphere
        for j in 0..k {
            let c = v.column(j).dotc(&grad.column(j));
            let vj = v.column(j).clone_owned();
            grad.column_mut(j).axpy(-c, &vj, Complex64::new(1.0, 0.0));
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = &v - grad.scale(step);
            normalize_columns(&mut trial);
            let gt = trial.adjoint() * &trial;
            let (o, t) = soft_max(&gt, tau);
            if o < obj {
                v = trial;
                g = gt;
                step *= 1.5;
                accepted = true;
                if t < best_top {
                    best_top = t;
                    best = v.clone();
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            step = 0.1;
        }
    }
    let d = chordal_of(&best);
    (best, d)
}
