//! Closed-form reference values for the stabilizer fixed points, the doped
//! tri-critical Ising chain at L=8, and the edge-mode string correlator.

use std::fmt;

use crate::error::{Error, Result};
use crate::mps::MatrixProductState;
use crate::partition::Geometry;
use crate::pauli::PauliString;

/// `log2(4/3)`, the magic of one T gate on a stabilizer eigenstate.
pub fn log2_four_thirds() -> f64 {
    (4.0f64 / 3.0).log2()
}

/// Full-state `M_2` of the GHZ state with a phase `theta` on every site.
pub fn ghz_doped_sre(len: usize, theta: f64) -> f64 {
    let a = len as f64 * theta;
    -((1.0 + a.cos().powi(4) + a.sin().powi(4)) / 2.0).log2()
}

/// `(full, subsystem)` `M_2` of `|+>^L` with a phase `theta` on every site,
/// the subsystem being any `len_k` sites.
pub fn product_doped_sre(len: usize, len_k: usize, theta: f64) -> (f64, f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let q = 1.0 + c.powi(4) + s.powi(4);
    let full = -(len as f64) * (q / 2.0).log2();
    let sub = -(len_k as f64) * (q / (1.0 + c * c + s * s)).log2();
    (full, sub)
}

/// Full-state `M_2` of the fully T-doped cluster state.
pub fn cluster_doped_sre(len: usize) -> f64 {
    let k = if len % 2 == 0 { len } else { len.saturating_sub(2) };
    k as f64 * log2_four_thirds()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPoint {
    Paramagnet,
    Ferromagnet,
    Cluster,
}

impl FixedPoint {
    pub const ALL: [FixedPoint; 3] = [FixedPoint::Paramagnet, FixedPoint::Ferromagnet, FixedPoint::Cluster];

    pub fn label(self) -> &'static str {
        match self {
            FixedPoint::Paramagnet => "PM",
            FixedPoint::Ferromagnet => "FM",
            FixedPoint::Cluster => "CL",
        }
    }
}

/// Number of T gates in a table row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TDoping {
    None,
    One,
    All,
}

impl TDoping {
    /// Sites doped on a chain of length `len`. The single gate sits in the bulk,
    /// away from the edge modes of the cluster state.
    pub fn sites(self, len: usize) -> Vec<usize> {
        match self {
            TDoping::None => Vec::new(),
            TDoping::One => vec![len / 2],
            TDoping::All => (0..len).collect(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TDoping::None => "0",
            TDoping::One => "1",
            TDoping::All => "L",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Topological entanglement entropy.
    Entanglement,
    /// Topological SRE at the given doping.
    Magic(TDoping),
}

/// Parity of `L` an entry applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Any,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, len: usize) -> bool {
        match self {
            Parity::Any => true,
            Parity::Even => len % 2 == 0,
            Parity::Odd => len % 2 == 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableEntry {
    pub geometry: Geometry,
    pub quantity: Quantity,
    pub state: FixedPoint,
    pub parity: Parity,
    /// Exact value in bits.
    pub value: f64,
    /// Human-readable form of the value.
    pub exact: &'static str,
}

impl fmt::Display for TableEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.quantity {
            Quantity::Entanglement => "S_topo".to_string(),
            Quantity::Magic(n) => format!("M_topo(N_T={})", n.label()),
        };
        let p = match self.parity {
            Parity::Any => "",
            Parity::Even => " [L even]",
            Parity::Odd => " [L odd]",
        };
        write!(f, "{} {} {}{}", self.geometry, q, self.state.label(), p)
    }
}

/// Exact topological entanglement and magic of the three fixed-point states
/// for both geometries.
pub fn fixed_point_tables() -> Vec<TableEntry> {
    let t = log2_four_thirds();
    let mut out = Vec::new();
    for geometry in [Geometry::Quad, Geometry::Tri] {
        for state in FixedPoint::ALL {
            let mut push = |quantity, parity, value, exact| {
                out.push(TableEntry { geometry, quantity, state, parity, value, exact });
            };
            let (s, s_txt) = match (geometry, state) {
                (_, FixedPoint::Paramagnet) | (Geometry::Quad, FixedPoint::Ferromagnet) => (0.0, "0"),
                (Geometry::Tri, FixedPoint::Ferromagnet) => (1.0, "log2(2)"),
                (_, FixedPoint::Cluster) => (2.0, "2log2(2)"),
            };
            push(Quantity::Entanglement, Parity::Any, s, s_txt);
            push(Quantity::Magic(TDoping::None), Parity::Any, 0.0, "0");
            match (geometry, state) {
                (Geometry::Tri, FixedPoint::Ferromagnet) => {
                    push(Quantity::Magic(TDoping::One), Parity::Any, t, "log2(4/3)");
                    push(Quantity::Magic(TDoping::All), Parity::Odd, t, "log2(4/3)");
                    push(Quantity::Magic(TDoping::All), Parity::Even, 0.0, "0");
                }
                (Geometry::Quad, FixedPoint::Cluster) => {
                    push(Quantity::Magic(TDoping::One), Parity::Any, 0.0, "0");
                    push(Quantity::Magic(TDoping::All), Parity::Any, 2.0 * t, "2log2(4/3)");
                }
                (Geometry::Tri, FixedPoint::Cluster) => {
                    // the full doped chain carries L-2 units of log2(4/3) for odd L, L for even L
                    push(Quantity::Magic(TDoping::One), Parity::Any, 0.0, "0");
                    push(Quantity::Magic(TDoping::All), Parity::Even, 2.0 * t, "2log2(4/3)");
                    push(Quantity::Magic(TDoping::All), Parity::Odd, 0.0, "0");
                }
                _ => {
                    push(Quantity::Magic(TDoping::One), Parity::Any, 0.0, "0");
                    push(Quantity::Magic(TDoping::All), Parity::Any, 0.0, "0");
                }
            }
        }
    }
    out
}

/// The tables as CSV with header `geometry,quantity,state,parity,value,exact`.
pub fn fixed_point_tables_csv() -> String {
    let mut s = String::from("geometry,quantity,state,parity,value,exact\n");
    for e in fixed_point_tables() {
        let q = match e.quantity {
            Quantity::Entanglement => "S_topo".to_string(),
            Quantity::Magic(n) => format!("M_topo_NT_{}", n.label()),
        };
        let p = match e.parity {
            Parity::Any => "any",
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        s.push_str(&format!("{},{},{},{},{:.15},{}\n", e.geometry, q, e.state.label(), p, e.value, e.exact));
    }
    s
}

// Error-free transformations for compensated Horner evaluation.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated Horner evaluation of `sum_k c[k] x^k`.
pub fn horner_compensated(coefs: &[f64], x: f64) -> f64 {
    let mut r = 0.0;
    let mut err = 0.0;
    for &c in coefs.iter().rev() {
        let (p, ep) = two_prod(r, x);
        let (s, es) = two_sum(p, c);
        r = s;
        err = err * x + (ep + es);
    }
    r + err
}

fn dense(pairs: &[(usize, f64)], degree: usize) -> Vec<f64> {
    let mut c = vec![0.0; degree + 1];
    for &(k, v) in pairs {
        c[k] += v;
    }
    c
}

/// Coefficients of a palindromic degree-16 polynomial from its lower half.
fn palindrome16(low: &[(usize, f64)], mid: f64) -> Vec<f64> {
    let mut c = vec![0.0; 17];
    for &(k, v) in low {
        c[k] = v;
        c[16 - k] = v;
    }
    c[8] = mid;
    c
}

/// Coefficients of `1 + g^32 + sum_k a_k g^k (1 + g^(32-2k)) + m g^16`.
fn palindrome32(terms: &[(usize, f64)], mid: f64) -> Vec<f64> {
    let mut c = vec![0.0; 33];
    c[0] = 1.0;
    c[32] = 1.0;
    for &(k, v) in terms {
        c[k] += v;
        c[32 - k] += v;
    }
    c[16] += mid;
    c
}

/// The eight polynomials `xi_1 .. xi_8` of the doped L=8 tri-critical Ising state
/// (index 0 holds `xi_1`).
pub fn tci_l8_xi(g: f64) -> [f64; 8] {
    let xi1 = palindrome16(
        &[(0, 1.0), (2, 50.0), (3, 88.0), (4, 1008.0), (5, 1400.0), (6, 4974.0), (7, 4656.0)],
        8414.0,
    );
    let xi2 = palindrome32(
        &[
            (2, 12.0),
            (4, 512.0),
            (5, 512.0),
            (6, 12404.0),
            (7, 12416.0),
            (8, 180748.0),
            (9, 173184.0),
            (10, 1474140.0),
            (11, 1244160.0),
            (12, 6675904.0),
            (13, 4386304.0),
            (14, 15864100.0),
            (15, 7454464.0),
        ],
        20593766.0,
    );
    let xi3 = palindrome16(
        &[(0, 1.0), (2, 42.0), (3, 120.0), (4, 960.0), (5, 1432.0), (6, 4982.0), (7, 4592.0)],
        8510.0,
    );
    let xi4 = palindrome32(
        &[
            (2, 40.0),
            (4, 1152.0),
            (5, 704.0),
            (6, 26312.0),
            (7, 27200.0),
            (8, 372940.0),
            (9, 361280.0),
            (10, 2860472.0),
            (11, 2354624.0),
            (12, 12046912.0),
            (13, 7656320.0),
            (14, 27796312.0),
            (15, 13192832.0),
        ],
        36475110.0,
    );
    let xi5 = dense(
        &[
            (0, 1.0),
            (4, 280.0),
            (6, 5376.0),
            (8, 75292.0),
            (10, 596736.0),
            (12, 2743720.0),
            (14, 6193152.0),
            (16, 7644742.0),
            (18, 6193152.0),
            (20, 2743720.0),
            (22, 596736.0),
            (24, 75292.0),
            (26, 5376.0),
            (28, 280.0),
            (32, 1.0),
        ],
        32,
    );
    let xi6 = palindrome16(
        &[(0, 1.0), (2, 24.0), (3, 64.0), (4, 612.0), (5, 1536.0), (6, 4232.0), (7, 6080.0)],
        7670.0,
    );
    let xi7 = palindrome32(
        &[
            (2, 24.0),
            (4, 992.0),
            (5, 384.0),
            (6, 20104.0),
            (7, 20608.0),
            (8, 266540.0),
            (9, 350848.0),
            (10, 2111960.0),
            (11, 2838400.0),
            (12, 9530464.0),
            (13, 10729216.0),
            (14, 23263112.0),
            (15, 20139264.0),
        ],
        31325478.0,
    );
    let xi8 = palindrome32(
        &[
            (2, 84.0),
            (4, 3104.0),
            (5, 512.0),
            (6, 66428.0),
            (7, 34432.0),
            (8, 836588.0),
            (9, 588416.0),
            (10, 5723540.0),
            (11, 4027392.0),
            (12, 22005536.0),
            (13, 13395456.0),
            (14, 48727708.0),
            (15, 23896832.0),
        ],
        63377830.0,
    );
    [xi1, xi2, xi3, xi4, xi5, xi6, xi7, xi8].map(|c| horner_compensated(&c, g))
}

/// `N_m` of the tri-critical Ising MPS on a chain of length `len`.
pub fn tci_nm(len: usize, g: f64) -> f64 {
    ((1.0 + g).powi(len as i32) + (1.0 - g).powi(len as i32)) / 2.0
}

/// Closed-form subsystem SREs `[AB, BC, B, ABC]` of the fully doped L=8
/// tri-critical Ising state. The tripartition uses windows of 2, 4 and 2 sites.
pub fn tci_l8_regions(g: f64, geometry: Geometry) -> Result<[f64; 4]> {
    if !g.is_finite() || !(-1.0..=1.0).contains(&g) {
        return Err(Error::Parameter(format!("g = {g} outside [-1, 1]")));
    }
    let x = tci_l8_xi(g);
    let nm2 = tci_nm(8, g).powi(2);
    let r = |a: f64, b: f64| (nm2 * a / b).log2();
    Ok(match geometry {
        Geometry::Quad => [r(x[2], x[3]), r(x[5], x[6]), r(x[0], x[7]), r(x[0], x[1])],
        Geometry::Tri => {
            let ab = r(x[0], x[1]);
            [ab, ab, r(x[2], x[3]), (nm2 * nm2 / x[4]).log2()]
        }
    })
}

/// Closed-form topological SRE of the fully doped L=8 tri-critical Ising state.
pub fn tci_l8_closed_form(g: f64, geometry: Geometry) -> Result<f64> {
    let [ab, bc, b, abc] = tci_l8_regions(g, geometry)?;
    Ok(-(ab + bc - b - abc))
}

/// Boundary-to-boundary string `Z1 Y2 X3 ... X(L-2) Y(L-1) Z(L)`: the product of
/// all `Z X Z` cluster stabilizers up to a phase.
pub fn default_edge_string(len: usize) -> Result<PauliString> {
    if len < 4 {
        return Err(Error::ChainLength { len, reason: "edge correlator needs L >= 4".into() });
    }
    let mut ops = vec![(0, 'Z'), (1, 'Y')];
    ops.extend((2..len - 2).map(|k| (k, 'X')));
    ops.extend([(len - 2, 'Y'), (len - 1, 'Z')]);
    PauliString::qubit(&ops)
}

/// Real part of the expectation of `string` (default: [`default_edge_string`]).
pub fn edge_correlator(psi: &MatrixProductState, string: Option<&PauliString>) -> Result<f64> {
    let owned;
    let p = match string {
        Some(p) => p,
        None => {
            owned = default_edge_string(psi.len())?;
            &owned
        }
    };
    Ok(psi.expect_pauli(p)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        let t = log2_four_thirds();
        assert_eq!(ghz_doped_sre(6, 0.0), 0.0);
        assert!((ghz_doped_sre(7, std::f64::consts::FRAC_PI_4) - t).abs() < 1e-14);
        let (f, s) = product_doped_sre(5, 2, std::f64::consts::FRAC_PI_2);
        assert!(f.abs() < 1e-14 && s.abs() < 1e-14);
        assert!((cluster_doped_sre(7) - 5.0 * t).abs() < 1e-14);
    }

    #[test]
    fn tci_closed_form_special_points() {
        let t = log2_four_thirds();
        for geo in [Geometry::Quad, Geometry::Tri] {
            assert!((tci_l8_closed_form(-1.0, geo).unwrap() - 2.0 * t).abs() < 1e-10);
            assert!(tci_l8_closed_form(0.0, geo).unwrap().abs() < 1e-10);
            assert!(tci_l8_closed_form(1.0, geo).unwrap().abs() < 1e-10);
        }
        assert!(tci_l8_closed_form(1.5, Geometry::Quad).is_err());
    }

    #[test]
    fn compensated_horner_matches_naive_on_small_input() {
        let c = [1.0, -3.0, 2.0, 0.5];
        let x = 0.3f64;
        let naive = 1.0 - 3.0 * x + 2.0 * x * x + 0.5 * x * x * x;
        assert!((horner_compensated(&c, x) - naive).abs() < 1e-15);
    }

    #[test]
    fn table_shape() {
        let t = fixed_point_tables();
        assert_eq!(t.len(), 26);
        assert!(fixed_point_tables_csv().lines().count() == 27);
    }
}
