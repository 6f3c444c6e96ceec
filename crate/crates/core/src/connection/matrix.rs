//! The connection matrix `Ω_K(p)` and its structural checks.

use super::reduce::reduce_iterated;
use super::ConnectionError;
use crate::algebra::{exterior_derivative, parse_unipoly, RationalFunction, UniPoly, Var};
use crate::chen::{enumerate_words, WordBasis};
use crate::numeric::eig::C64;
use crate::numeric::LinearSystem;
use crate::petrov::{gl_numerator, Hamiltonian};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SingularPoint {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

/// `N_K × N_K` matrix of rational functions of `p`: the coefficients of
/// `dv/dp = Ω(p)·v` for the vector of basic iterated integrals over the
/// nest oval based at `(0, p)`.
#[derive(Clone, Debug)]
pub struct ConnectionMatrix {
    pub basis: Arc<WordBasis>,
    pub n: usize,
    pub k_max: usize,
    /// Row-major entries.
    pub entries: Vec<Vec<RationalFunction>>,
    /// Common denominator per row (lcm of entry denominators).
    pub row_denoms: Vec<UniPoly>,
    pub singular_locus: Vec<SingularPoint>,
}

fn poly_lcm(a: &UniPoly, b: &UniPoly) -> UniPoly {
    if a.is_zero() || b.is_zero() {
        return UniPoly::zero(a.var());
    }
    let g = a.gcd(b);
    let (q, _) = a.divrem(&g);
    (&q * b).monic()
}

impl ConnectionMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &RationalFunction {
        &self.entries[row][col]
    }

    /// Measured degree: sum over nonzero entries of num+den degrees.
    pub fn measured_degree(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .map(|e| if e.is_zero() { 0 } else { e.degree() })
            .sum()
    }

    pub fn measured_size(&self) -> crate::algebra::Rat {
        use num_traits::Zero;
        self.entries
            .iter()
            .flatten()
            .filter(|e| !e.is_zero())
            .fold(crate::algebra::Rat::zero(), |acc, e| acc + e.size())
    }

    /// Numeric evaluator with per-row common denominators.
    pub fn compiled(&self) -> CompiledConnection {
        let n_k = self.dim();
        let mut rows = Vec::with_capacity(n_k);
        for (r, den) in self.row_denoms.iter().enumerate() {
            let mut cols = Vec::new();
            for c in 0..n_k {
                let e = &self.entries[r][c];
                if e.is_zero() {
                    continue;
                }
                // numerator against the row denominator: num * (den / e.den)
                let (q, rem) = den.divrem(e.den());
                debug_assert!(rem.is_zero(), "row denominator is an lcm");
                cols.push((c, (e.num() * &q).coeffs_f64()));
            }
            rows.push(cols);
        }
        CompiledConnection {
            n_k,
            row_den: self.row_denoms.iter().map(|d| d.coeffs_f64()).collect(),
            rows,
            singular: self
                .singular_locus
                .iter()
                .map(|s| C64::new(s.re, s.im))
                .collect(),
        }
    }

    /// Serializes to the versioned JSON document (entries in the polynomial
    /// grammar; bit-exact round-trip).
    pub fn to_json(&self) -> String {
        let doc = ConnectionDoc {
            schema: SCHEMA.into(),
            n: self.n,
            k: self.k_max,
            words: self.basis.words().iter().map(|w| w.0.clone()).collect(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect(),
            singular_locus: self.singular_locus.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("connection serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, ConnectionError> {
        let doc: ConnectionDoc =
            serde_json::from_str(s).map_err(|e| ConnectionError::Malformed(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(ConnectionError::Malformed(format!(
                "schema {} (expected {})",
                doc.schema, SCHEMA
            )));
        }
        let basis = enumerate_words(doc.n, doc.k)?;
        if basis.words().len() != doc.words.len()
            || basis.words().iter().zip(&doc.words).any(|(a, b)| &a.0 != b)
        {
            return Err(ConnectionError::Malformed("word basis mismatch".into()));
        }
        let mut entries = Vec::with_capacity(doc.entries.len());
        for row in &doc.entries {
            if row.len() != basis.len() {
                return Err(ConnectionError::Malformed("ragged entry matrix".into()));
            }
            let mut out = Vec::with_capacity(row.len());
            for s in row {
                out.push(parse_ratfunc(s).map_err(|e| ConnectionError::Malformed(e))?);
            }
            entries.push(out);
        }
        if entries.len() != basis.len() {
            return Err(ConnectionError::Malformed(
                "entry row count mismatch".into(),
            ));
        }
        let row_denoms = compute_row_denoms(&entries);
        Ok(Self {
            basis,
            n: doc.n,
            k_max: doc.k,
            entries,
            row_denoms,
            singular_locus: doc.singular_locus,
        })
    }
}

const SCHEMA: &str = "nestpf.connection/1";

#[derive(Serialize, Deserialize)]
struct ConnectionDoc {
    schema: String,
    n: usize,
    k: usize,
    words: Vec<Vec<u16>>,
    entries: Vec<Vec<String>>,
    singular_locus: Vec<SingularPoint>,
}

/// Parses `num`, or `(num)/(den)`, in the variable `p`.
fn parse_ratfunc(s: &str) -> Result<RationalFunction, String> {
    let s = s.trim();
    if let Some(stripped) = s.strip_prefix('(') {
        if let Some(idx) = stripped.find(")/(") {
            let num = &stripped[..idx];
            let den = stripped[idx + 3..]
                .strip_suffix(')')
                .ok_or_else(|| format!("missing closing paren in {s:?}"))?;
            let n = parse_unipoly(num, Var::P).map_err(|e| e.to_string())?;
            let d = parse_unipoly(den, Var::P).map_err(|e| e.to_string())?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            return Ok(RationalFunction::new(n, d));
        }
    }
    Ok(RationalFunction::from_poly(
        parse_unipoly(s, Var::P).map_err(|e| e.to_string())?,
    ))
}

fn compute_row_denoms(entries: &[Vec<RationalFunction>]) -> Vec<UniPoly> {
    entries
        .iter()
        .map(|row| {
            row.iter()
                .filter(|e| !e.is_zero())
                .fold(UniPoly::one(Var::P), |acc, e| poly_lcm(&acc, e.den()))
        })
        .collect()
}

/// Numeric form of the connection for continuation: sparse rows with a
/// common denominator each.
pub struct CompiledConnection {
    n_k: usize,
    row_den: Vec<Vec<f64>>,
    /// Per row: list of (column, numerator coefficients ascending).
    rows: Vec<Vec<(usize, Vec<f64>)>>,
    singular: Vec<C64>,
}

fn horner_c(coeffs: &[f64], p: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * p + c;
    }
    acc
}

impl LinearSystem for CompiledConnection {
    fn dim(&self) -> usize {
        self.n_k
    }

    fn apply(&self, p: C64, v: &[C64], out: &mut [C64]) {
        for (r, cols) in self.rows.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, num) in cols {
                acc += horner_c(num, p) * v[*c];
            }
            let den = horner_c(&self.row_den[r], p);
            out[r] = acc / den;
        }
    }

    fn singular_points(&self) -> Vec<C64> {
        self.singular.clone()
    }
}

/// Builds `Ω_K(p)` for a certified Hamiltonian.
///
/// For a word `w` the level derivative inserts the Gelfand-Leray numerator
/// `η_{w_i}` of each letter in turn and reduces; the chain rule
/// `dt = H_y(0,p)·dp` and the factor `1/m(t(p))` scale every row.
pub fn build_connection(
    ham: &Arc<Hamiltonian>,
    k_max: usize,
) -> Result<ConnectionMatrix, ConnectionError> {
    ham.require_basis_ok()?;
    let basis = enumerate_words(ham.n(), k_max)?;
    let n_k = basis.len();

    // η_l = gl_numerator(dω_l) per basic letter, computed once.
    let etas: Vec<_> = ham
        .basic_forms()
        .iter()
        .map(|w| gl_numerator(&exterior_derivative(w), ham))
        .collect();

    // Row scale: H_y(0,p) / m(t(p)).
    let scale = RationalFunction::new(ham.hy_of_p().clone(), ham.m_of_p());

    let mut entries = vec![vec![RationalFunction::zero(Var::P); n_k]; n_k];
    for (row, w) in basis.words().iter().enumerate() {
        if w.is_empty() {
            continue; // constants have zero derivative
        }
        let letters = w.letters();
        let mut combo = super::reduce::ReducedCombination::zero(basis.clone());
        for i in 0..letters.len() {
            let mut tuple: Vec<_> = letters.iter().map(|&l| ham.basic_form(l).clone()).collect();
            tuple[i] = etas[(letters[i] - 1) as usize].clone();
            let red = reduce_iterated(&tuple, ham, &basis)?;
            combo.add_scaled(&red, &RationalFunction::one(Var::P));
        }
        for (w2, c) in combo.coeffs {
            let col = basis.index_of(&w2).expect("reduced word in basis");
            entries[row][col] = &c * &scale;
        }
    }

    let row_denoms = compute_row_denoms(&entries);
    let singular_locus = singular_points_from_denoms(&row_denoms);
    Ok(ConnectionMatrix {
        basis,
        n: ham.n(),
        k_max,
        entries,
        row_denoms,
        singular_locus,
    })
}

fn singular_points_from_denoms(denoms: &[UniPoly]) -> Vec<SingularPoint> {
    let total = denoms
        .iter()
        .filter(|d| !d.is_zero())
        .fold(UniPoly::one(Var::P), |acc, d| poly_lcm(&acc, d));
    let roots = crate::numeric::roots::unipoly_roots(&total);
    // Cluster within tolerance to recover multiplicities.
    let tol = 1e-8 * roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for z in roots {
        if let Some(c) = clusters.iter_mut().find(|(c, _)| (*c - z).norm() < tol) {
            c.1 += 1;
        } else {
            clusters.push((z, 1));
        }
    }
    clusters.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    clusters
        .into_iter()
        .map(|(z, m)| SingularPoint {
            re: z.re,
            im: z.im,
            multiplicity: m,
        })
        .collect()
}

/// One diagonal block of the connection (integrals of a fixed length).
#[derive(Clone, Debug)]
pub struct Block {
    pub length: usize,
    /// Row-major `N^k × N^k` entries.
    pub entries: Vec<Vec<RationalFunction>>,
}

/// Extracts the diagonal blocks by word length; errors if any entry above
/// the block diagonal is not identically zero.
pub fn block_structure(omega: &ConnectionMatrix) -> Result<Vec<Block>, ConnectionError> {
    let basis = &omega.basis;
    for (r, w) in basis.words().iter().enumerate() {
        for (c, w2) in basis.words().iter().enumerate() {
            if w2.len() > w.len() && !omega.entries[r][c].is_zero() {
                return Err(ConnectionError::StructureViolation { row: r, col: c });
            }
        }
    }
    let mut blocks = Vec::new();
    for k in 0..=basis.k_max {
        let range = basis.block_range(k);
        let entries: Vec<Vec<RationalFunction>> = range
            .clone()
            .map(|r| range.clone().map(|c| omega.entries[r][c].clone()).collect())
            .collect();
        blocks.push(Block { length: k, entries });
    }
    Ok(blocks)
}

/// `⊕^k Θ` under the natural tensor identification of length-k words.
pub fn kronecker_sum(theta11: &Block, k: usize) -> Block {
    let n = theta11.entries.len();
    let dim = n.pow(k as u32);
    let zero = RationalFunction::zero(Var::P);
    let mut entries = vec![vec![zero; dim]; dim];
    // Multi-index digits, leftmost most significant.
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; k];
        for slot in (0..k).rev() {
            d[slot] = idx % n;
            idx /= n;
        }
        d
    };
    for r in 0..dim {
        let dr = digits(r);
        for (slot, &ri) in dr.iter().enumerate() {
            for ci in 0..n {
                if theta11.entries[ri][ci].is_zero() {
                    continue;
                }
                let mut dc = dr.clone();
                dc[slot] = ci;
                let c = dc.iter().fold(0usize, |acc, &d| acc * n + d);
                let v = &entries[r][c] + &theta11.entries[ri][ci];
                entries[r][c] = v;
            }
        }
    }
    Block { length: k, entries }
}

#[derive(Clone, Debug)]
pub enum KroneckerOutcome {
    /// The identifying permutation of the word basis (as a mapping from
    /// tensor index to block index; identity under the natural ordering).
    Match { permutation: Vec<usize> },
    Mismatch {
        row: usize,
        col: usize,
        expected: RationalFunction,
        got: RationalFunction,
    },
}

/// Checks `Θ_kk = P (⊕^k Θ_11) P^{-1}` with exact rational-function entries;
/// the natural length-lex word order realizes the permutation as the
/// identity, so that is what is certified.
pub fn kronecker_check(theta11: &Block, theta_kk: &Block, k: usize) -> KroneckerOutcome {
    let expect = kronecker_sum(theta11, k);
    let dim = theta_kk.entries.len();
    debug_assert_eq!(expect.entries.len(), dim);
    for r in 0..dim {
        for c in 0..dim {
            if expect.entries[r][c] != theta_kk.entries[r][c] {
                return KroneckerOutcome::Mismatch {
                    row: r,
                    col: c,
                    expected: expect.entries[r][c].clone(),
                    got: theta_kk.entries[r][c].clone(),
                };
            }
        }
    }
    KroneckerOutcome::Match {
        permutation: (0..dim).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_bivar;
    use crate::petrov::certify;

    fn circle() -> Arc<Hamiltonian> {
        certify(&parse_bivar("1/2*x^2 + 1/2*y^2").unwrap()).unwrap()
    }

    #[test]
    fn circle_connection_k1() {
        // Basis (e, (1)): the only nonzero entry is dI/dp = (2/p)·I.
        let ham = circle();
        let omega = build_connection(&ham, 1).unwrap();
        assert_eq!(omega.dim(), 2);
        assert!(omega.entries[0][0].is_zero());
        assert!(omega.entries[0][1].is_zero());
        assert!(omega.entries[1][0].is_zero());
        assert_eq!(omega.entries[1][1].to_string(), "(2)/(p)");
        assert_eq!(omega.singular_locus.len(), 1);
        assert!(omega.singular_locus[0].re.abs() < 1e-12);
    }

    #[test]
    fn circle_connection_k2_diagonal() {
        let ham = circle();
        let omega = build_connection(&ham, 2).unwrap();
        assert_eq!(omega.dim(), 3);
        assert_eq!(omega.entries[1][1].to_string(), "(2)/(p)");
        assert_eq!(omega.entries[2][2].to_string(), "(4)/(p)");
        // everything else identically zero
        for (r, row) in omega.entries.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                if (r, c) != (1, 1) && (r, c) != (2, 2) {
                    assert!(e.is_zero(), "entry ({r},{c}) = {e}");
                }
            }
        }
    }

    #[test]
    fn k0_connection_is_zero() {
        let ham = circle();
        let omega = build_connection(&ham, 0).unwrap();
        assert_eq!(omega.dim(), 1);
        assert!(omega.entries[0][0].is_zero());
    }

    #[test]
    fn blocks_and_kronecker_for_circle() {
        let ham = circle();
        let omega = build_connection(&ham, 2).unwrap();
        let blocks = block_structure(&omega).unwrap();
        assert_eq!(blocks.len(), 3);
        match kronecker_check(&blocks[1], &blocks[2], 2) {
            KroneckerOutcome::Match { permutation } => assert_eq!(permutation, vec![0]),
            KroneckerOutcome::Mismatch {
                row,
                col,
                expected,
                got,
            } => {
                panic!("mismatch at ({row},{col}): {expected} vs {got}")
            }
        }
    }

    #[test]
    fn structure_violation_is_detected() {
        let ham = circle();
        let mut omega = build_connection(&ham, 1).unwrap();
        omega.entries[0][1] = RationalFunction::one(Var::P);
        assert!(matches!(
            block_structure(&omega),
            Err(ConnectionError::StructureViolation { row: 0, col: 1 })
        ));
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let ham = circle();
        let omega = build_connection(&ham, 2).unwrap();
        let json = omega.to_json();
        let back = ConnectionMatrix::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        for (r1, r2) in omega.entries.iter().zip(&back.entries) {
            for (a, b) in r1.iter().zip(r2) {
                assert_eq!(a, b);
            }
        }
    }
}
