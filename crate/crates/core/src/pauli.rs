//! Local Pauli operators and Pauli strings.
//!
//! Qubit labels are indexed `0..4` as I, X, Y, Z. Qutrit labels are indexed
//! `3a + b` for the Weyl operator `X^a Z^b` with `X|s> = |s+1 mod 3>` and
//! `Z|s> = w^s |s>`, `w = exp(2 pi i / 3)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::{C64, ONE, ZERO};

/// Number of local Pauli labels, `d^2`.
pub fn num_labels(d: usize) -> usize {
    d * d
}

/// Row-major `d x d` matrix of local Pauli label `alpha`.
pub fn local_pauli(d: usize, alpha: usize) -> Vec<C64> {
    assert!(alpha < d * d, "Pauli label {alpha} out of range for d={d}");
    match d {
        2 => {
            let i = C64::new(0.0, 1.0);
            match alpha {
                0 => vec![ONE, ZERO, ZERO, ONE],
                1 => vec![ZERO, ONE, ONE, ZERO],
                2 => vec![ZERO, -i, i, ZERO],
                _ => vec![ONE, ZERO, ZERO, -ONE],
            }
        }
        _ => weyl(d, alpha / d, alpha % d),
    }
}

/// Weyl operator `X^a Z^b` on a `d`-level system.
pub fn weyl(d: usize, a: usize, b: usize) -> Vec<C64> {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    let mut m = vec![ZERO; d * d];
    for s in 0..d {
        // X^a Z^b |s> = w^{b s} |s + a>
        m[((s + a) % d) * d + s] = C64::from_polar(1.0, w * ((b * s) % d) as f64);
    }
    m
}

fn qubit_symbol(alpha: usize) -> char {
    ['I', 'X', 'Y', 'Z'][alpha]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    d: usize,
    ops: BTreeMap<usize, usize>,
}

impl PauliString {
    pub fn identity(d: usize) -> Self {
        Self { d, ops: BTreeMap::new() }
    }

    /// Builds a string from `(site, label)` pairs with 0-based sites; identity labels are dropped.
    pub fn new(d: usize, ops: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (site, label) in ops {
            if label >= d * d {
                return Err(Error::LocalDim(format!("label {label} for d={d}")));
            }
            if map.insert(site, label).is_some() {
                return Err(Error::DuplicateSite(site));
            }
        }
        map.retain(|_, l| *l != 0);
        Ok(Self { d, ops: map })
    }

    /// Qubit string from `(site, symbol)` pairs, e.g. `[(0, 'Z'), (1, 'X')]`.
    pub fn qubit(ops: &[(usize, char)]) -> Result<Self> {
        let mut v = Vec::with_capacity(ops.len());
        for &(site, c) in ops {
            let l = match c.to_ascii_uppercase() {
                'I' => 0,
                'X' => 1,
                'Y' => 2,
                'Z' => 3,
                other => return Err(Error::Parse(format!("unknown Pauli symbol {other:?}"))),
            };
            v.push((site, l));
        }
        Self::new(2, v)
    }

    /// Dense label vector of length `len` (identity where unlisted).
    pub fn labels(&self, len: usize) -> Result<Vec<usize>> {
        let mut v = vec![0; len];
        for (&s, &l) in &self.ops {
            if s >= len {
                return Err(Error::SiteOutOfRange { site: s, len });
            }
            v[s] = l;
        }
        Ok(v)
    }

    pub fn from_labels(d: usize, labels: &[usize]) -> Result<Self> {
        Self::new(d, labels.iter().copied().enumerate())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ops(&self) -> &BTreeMap<usize, usize> {
        &self.ops
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }
}

/// 1-based text form: qubits as `Z1 X2 Z3`, qutrits as `W12:5` for `X^1 Z^2` on site 5.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .ops
            .iter()
            .map(|(&s, &l)| {
                if self.d == 2 {
                    format!("{}{}", qubit_symbol(l), s + 1)
                } else {
                    format!("W{}{}:{}", l / self.d, l % self.d, s + 1)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "I" || s.is_empty() {
            return Ok(Self::identity(2));
        }
        let mut d = 2;
        let mut ops = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || Error::Parse(format!("bad Pauli token {tok:?}"));
            let site1 = |t: &str| -> Result<usize> {
                let n: usize = t.parse().map_err(|_| bad())?;
                n.checked_sub(1).ok_or_else(bad)
            };
            if let Some(rest) = tok.strip_prefix('W') {
                let (ab, site) = rest.split_once(':').ok_or_else(bad)?;
                let digits: Vec<usize> = ab.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect::<Option<_>>().ok_or_else(bad)?;
                if digits.len() != 2 || digits.iter().any(|&x| x > 2) {
                    return Err(bad());
                }
                d = 3;
                ops.push((site1(site)?, 3 * digits[0] + digits[1]));
            } else {
                let mut chars = tok.chars();
                let c = chars.next().ok_or_else(bad)?;
                let l = match c {
                    'I' => 0,
                    'X' => 1,
                    'Y' => 2,
                    'Z' => 3,
                    _ => return Err(bad()),
                };
                ops.push((site1(chars.as_str())?, l));
            }
        }
        if d == 3 && s.split_whitespace().any(|t| !t.starts_with('W')) {
            return Err(Error::Parse(format!("mixed qubit and qutrit labels in {s:?}")));
        }
        Self::new(d, ops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(d: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut c = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    c[i * d + j] += a[i * d + k] * b[k * d + j];
                }
            }
        }
        c
    }

    #[test]
    fn paulis_are_unitary_and_trace_orthogonal() {
        for d in [2, 3] {
            for a in 0..d * d {
                for b in 0..d * d {
                    let pa = local_pauli(d, a);
                    let pb = local_pauli(d, b);
                    let tr: C64 = (0..d)
                        .map(|i| (0..d).map(|k| pa[k * d + i].conj() * pb[k * d + i]).sum::<C64>())
                        .sum();
                    let expect = if a == b { d as f64 } else { 0.0 };
                    assert!((tr - expect).norm() < 1e-12, "d={d} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn qubit_algebra() {
        let x = local_pauli(2, 1);
        let y = local_pauli(2, 2);
        let z = local_pauli(2, 3);
        let xz = mul(2, &x, &z);
        // XZ = -iY
        for k in 0..4 {
            assert!((xz[k] + C64::new(0.0, 1.0) * y[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn weyl_commutation() {
        let d = 3;
        let x = weyl(d, 1, 0);
        let z = weyl(d, 0, 1);
        let zx = mul(d, &z, &x);
        let xz = mul(d, &x, &z);
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        for k in 0..9 {
            assert!((zx[k] - w * xz[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn text_round_trip() {
        let p: PauliString = "Z5 X6 Z7".parse().unwrap();
        assert_eq!(p.ops().get(&4), Some(&3));
        assert_eq!(p.to_string(), "Z5 X6 Z7");
        let q: PauliString = "W12:1 W20:3".parse().unwrap();
        assert_eq!(q.d(), 3);
        assert_eq!(q.to_string(), "W12:1 W20:3");
        assert!("Q1".parse::<PauliString>().is_err());
        assert!("X0".parse::<PauliString>().is_err());
        assert!(matches!("X1 Z1".parse::<PauliString>(), Err(Error::DuplicateSite(0))));
    }
}
