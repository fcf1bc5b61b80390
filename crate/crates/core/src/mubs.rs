//! Mutually unbiased bases.
//!
//! Prime `d` gets a complete set of `d + 1` bases: the computational basis
//! followed by the quadratic-phase bases `w^(b j^2 + k j) / sqrt(d)` for odd
//! primes, or the X and Y eigenbases for `d = 2`. Any other `d` gets the
//! computational and Fourier bases only, marked as a partial family.

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, C64};
use crate::weyl::RootsOfUnity;

pub const ORTHONORMAL_TOL: f64 = 1e-12;
pub const UNBIASED_TOL: f64 = 1e-10;

pub type Basis = Vec<Vec<C64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct MubFamily {
    d: usize,
    bases: Vec<Basis>,
    partial: bool,
}

impl MubFamily {
    /// Wraps user-supplied bases. No unbiasedness check is made here; see
    /// [`verify_mub`].
    pub fn new(d: usize, bases: Vec<Basis>, partial: bool) -> Result<Self> {
        for basis in &bases {
            if basis.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: basis.len(),
                });
            }
            if let Some(v) = basis.iter().find(|v| v.len() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
        }
        Ok(Self { d, bases, partial })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn count(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// True when fewer than `d + 1` bases were constructed on purpose.
    pub fn is_partial(&self) -> bool {
        self.partial
    }

    /// Whether basis `b` is the standard basis up to phases and ordering.
    pub fn is_computational(&self, b: usize) -> bool {
        self.bases[b].iter().all(|v| {
            let big = v.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-12).count();
            let small = v.iter().filter(|z| z.norm() < 1e-12).count();
            big == 1 && small == self.d - 1
        })
    }

    /// Validates `(basis, first, second)` against this family.
    pub fn pair(&self, basis: usize, first: usize, second: usize) -> Result<MubPair<'_>> {
        if basis >= self.count() || first >= self.d || second >= self.d || first == second {
            return Err(Error::InvalidPair {
                basis,
                first,
                second,
                dim: self.d,
            });
        }
        Ok(MubPair {
            id: PairId {
                basis,
                first,
                second,
            },
            first: &self.bases[basis][first],
            second: &self.bases[basis][second],
            computational: self.is_computational(basis),
        })
    }
}

/// Names two vectors of one basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairId {
    pub basis: usize,
    pub first: usize,
    pub second: usize,
}

impl std::fmt::Display for PairId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.basis, self.first, self.second)
    }
}

impl std::str::FromStr for PairId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("pair must look like BASIS:I:J, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: Vec<usize> = parts
            .iter()
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Ok(Self {
            basis: n[0],
            first: n[1],
            second: n[2],
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MubPair<'a> {
    pub id: PairId,
    pub first: &'a [C64],
    pub second: &'a [C64],
    pub computational: bool,
}

impl MubPair<'_> {
    pub fn states(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        Ok((DensityMatrix::pure(self.first)?, DensityMatrix::pure(self.second)?))
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

fn computational(d: usize) -> Basis {
    (0..d)
        .map(|k| {
            (0..d)
                .map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

/// Vector `k` has components `w^(b j^2 + k j) / sqrt(d)`; `b = 0` is Fourier.
fn quadratic_phase(w: &RootsOfUnity, b: usize) -> Basis {
    let d = w.dim();
    let norm = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|k| {
            (0..d)
                .map(|j| w.pow((b * j * j + k * j) as i64) * norm)
                .collect()
        })
        .collect()
}

fn qubit_bases() -> Vec<Basis> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |re: f64, im: f64| C64::new(re * s, im * s);
    vec![
        computational(2),
        vec![vec![r(1.0, 0.0), r(1.0, 0.0)], vec![r(1.0, 0.0), r(-1.0, 0.0)]],
        vec![vec![r(1.0, 0.0), r(0.0, 1.0)], vec![r(1.0, 0.0), r(0.0, -1.0)]],
    ]
}

pub fn mub_family(d: usize) -> Result<MubFamily> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "[2, inf)",
        });
    }
    if d == 2 {
        return MubFamily::new(2, qubit_bases(), false);
    }
    let w = RootsOfUnity::new(d);
    let mut bases = vec![computational(d)];
    if is_prime(d) {
        bases.extend((0..d).map(|b| quadratic_phase(&w, b)));
        MubFamily::new(d, bases, false)
    } else {
        bases.push(quadratic_phase(&w, 0));
        MubFamily::new(d, bases, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubCheck {
    pub valid: bool,
    /// Largest of the orthonormality and unbiasedness deviations.
    pub worst_deviation: f64,
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn verify_mub(fam: &MubFamily) -> MubCheck {
    let d = fam.d;
    let mut ortho: f64 = 0.0;
    let mut unbiased: f64 = 0.0;
    for (bi, basis) in fam.bases.iter().enumerate() {
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((inner(u, v) - C64::new(expect, 0.0)).norm());
            }
            for other in &fam.bases[bi + 1..] {
                for v in other {
                    unbiased = unbiased.max((inner(u, v).norm_sqr() - 1.0 / d as f64).abs());
                }
            }
        }
    }
    MubCheck {
        valid: ortho <= ORTHONORMAL_TOL && unbiased <= UNBIASED_TOL && fam.count() <= d + 1,
        worst_deviation: ortho.max(unbiased),
    }
}

/// All unordered same-basis pairs `(i < j)`, optionally skipping
/// computational bases.
pub fn pair_iterator(
    fam: &MubFamily,
    exclude_computational: bool,
) -> impl Iterator<Item = MubPair<'_>> + '_ {
    let d = fam.d;
    (0..fam.count())
        .filter(move |&b| !(exclude_computational && fam.is_computational(b)))
        .flat_map(move |b| {
            (0..d).flat_map(move |i| {
                (i + 1..d).map(move |j| fam.pair(b, i, j).expect("indices in range"))
            })
        })
}
