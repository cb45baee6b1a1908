//! Topology of the long-range interacting cycle `G(N, m)`.
//!
//! Nodes are labelled `1..=N` at every public boundary; internal storage is
//! 0-based. A spec is valid when `N >= 5` and `2 <= m <= floor((N-1)/2)`,
//! which is exactly the range where the four bonds `j±1`, `j±m` of every
//! node are distinct.

use std::fmt;
use std::io::{self, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(N, m)` of a long-range interacting cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleSpec {
    n: usize,
    m: usize,
}

impl CycleSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        validate_spec(n, m)
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Long-range bond distance.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Largest admissible `m` for a ring of `n` nodes.
    pub fn max_range(n: usize) -> usize {
        n.saturating_sub(1) / 2
    }

    /// The four neighbours of node `j` (1-based), ordered `j+1, j-1, j+m, j-m`.
    pub fn neighbors(&self, j: usize) -> Result<[usize; 4]> {
        self.check_node(j)?;
        let (n, m) = (self.n, self.m);
        let j0 = j - 1;
        Ok([
            (j0 + 1) % n + 1,
            (j0 + n - 1) % n + 1,
            (j0 + m) % n + 1,
            (j0 + n - m) % n + 1,
        ])
    }

    pub(crate) fn check_node(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n {
            return Err(Error::NodeOutOfRange { index: j, n: self.n });
        }
        Ok(())
    }

    /// Displacement `(k - j) mod N` between two 1-based node labels.
    pub fn displacement(&self, j: usize, k: usize) -> Result<usize> {
        self.check_node(j)?;
        self.check_node(k)?;
        Ok((k + self.n - j) % self.n)
    }
}

impl fmt::Display for CycleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({}, {})", self.n, self.m)
    }
}

/// Check `(n, m)` against the degree-4 requirement.
pub fn validate_spec(n: usize, m: usize) -> Result<CycleSpec> {
    if n < 5 {
        return Err(Error::TooFewNodes { n });
    }
    if m < 2 {
        return Err(Error::RangeTooShort { m });
    }
    if 2 * m == n {
        return Err(Error::DegenerateAntipode { n, m });
    }
    let max = CycleSpec::max_range(n);
    if m > max {
        return Err(Error::RangeTooLong { n, m, max });
    }
    Ok(CycleSpec { n, m })
}

/// Dense graph Laplacian of `G(N, m)` with unit bond strength, which is
/// also the tight-binding Hamiltonian of the quantum walk.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    spec: CycleSpec,
    matrix: Array2<f64>,
}

impl Hamiltonian {
    pub fn spec(&self) -> CycleSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.n
    }

    /// 0-based dense matrix.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.matrix
    }

    /// Entry `H[i][j]` for 1-based node labels.
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        self.spec.check_node(i)?;
        self.spec.check_node(j)?;
        Ok(self.matrix[[i - 1, j - 1]])
    }

    /// `N` lines of `N` comma-separated integers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for row in self.matrix.rows() {
            let line: Vec<String> = row.iter().map(|&v| format!("{}", v as i64)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// `H[i][i] = 4`, `H[i][j] = -1` when `(i - j) mod N` is `1`, `N-1`, `m` or
/// `N-m`, zero otherwise.
pub fn build_hamiltonian(spec: CycleSpec) -> Hamiltonian {
    let n = spec.n;
    let mut matrix = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        matrix[[i, i]] = 4.0;
        for offset in [1, n - 1, spec.m, n - spec.m] {
            matrix[[i, (i + offset) % n]] = -1.0;
        }
    }
    Hamiltonian { spec, matrix }
}
