//! The Chen–Skriganov code: polynomials of degree `< n` encoded by Hasse
//! derivatives at `2d^2` distinct field points, its dual, and weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{checked_count, PrimeBase, Polynomial};
use crate::linalg::{self, Span};
use crate::net::{generate_points, GeneratingMatrices, PointSet};

/// Construction parameters; `n = 2 d w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CSParams {
    #[serde(rename = "b")]
    pub base: PrimeBase,
    pub d: usize,
    pub w: usize,
    /// `betas[i][nu]` for coordinate `i`, `nu < 2d`.
    pub betas: Vec<Vec<u32>>,
}

/// `beta_{i,nu} = (i-1) 2d + (nu-1)`.
pub fn default_betas(base: PrimeBase, d: usize) -> Result<Vec<Vec<u32>>> {
    let need = 2 * d * d;
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be >= 1".into()));
    }
    if (base.get() as usize) < need {
        return Err(Error::BaseTooSmall { b: base.get(), d, need });
    }
    Ok((0..d)
        .map(|i| (0..2 * d).map(|nu| (i * 2 * d + nu) as u32).collect())
        .collect())
}

impl CSParams {
    pub fn new(base: PrimeBase, d: usize, w: usize) -> Result<Self> {
        let betas = default_betas(base, d)?;
        Self::with_betas(base, d, w, betas)
    }

    pub fn with_betas(base: PrimeBase, d: usize, w: usize, betas: Vec<Vec<u32>>) -> Result<Self> {
        let p = CSParams { base, d, w, betas };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let need = 2 * self.d * self.d;
        if self.d == 0 || self.w == 0 {
            return Err(Error::InvalidParams("d and w must be >= 1".into()));
        }
        if (self.base.get() as usize) < need {
            return Err(Error::BaseTooSmall { b: self.base.get(), d: self.d, need });
        }
        if self.betas.len() != self.d || self.betas.iter().any(|r| r.len() != 2 * self.d) {
            return Err(Error::InvalidParams(format!("betas must be {}x{}", self.d, 2 * self.d)));
        }
        let mut seen = vec![false; self.base.get() as usize];
        for &v in self.betas.iter().flatten() {
            if v >= self.base.get() {
                return Err(Error::InvalidParams(format!("beta {v} outside F_{}", self.base)));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidParams(format!("beta {v} repeated")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        2 * self.d * self.w
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: CSParams =
            serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        p.validate()?;
        Ok(p)
    }
}

/// An element of `F_b^{dn}` split into `d` blocks of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeWord {
    pub blocks: Vec<Vec<u32>>,
}

impl CodeWord {
    pub fn from_flat(flat: &[u32], n: usize) -> Self {
        let blocks = if n == 0 {
            Vec::new()
        } else {
            flat.chunks(n).map(|c| c.to_vec()).collect()
        };
        CodeWord { blocks }
    }

    pub fn flat(&self) -> Vec<u32> {
        self.blocks.concat()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(|&v| v == 0)
    }
}

/// Block `i` holds `d^{lambda-1} f(beta_{i,nu})` at position `(nu-1) w + lambda`.
pub fn encode_poly(f: &Polynomial, params: &CSParams) -> Result<CodeWord> {
    let n = params.n();
    if f.degree() >= n as i64 {
        return Err(Error::DegreeTooLarge { degree: f.degree(), bound: n });
    }
    if f.base() != params.base {
        return Err(Error::BaseMismatch { left: f.base().get(), right: params.base.get() });
    }
    let derivs: Vec<Polynomial> = (0..params.w).map(|lam| f.hasse_derivative(lam)).collect();
    let blocks = params
        .betas
        .iter()
        .map(|row| {
            let mut block = Vec::with_capacity(n);
            for &beta in row {
                block.extend(derivs.iter().map(|g| g.eval_residue(beta)));
            }
            block
        })
        .collect();
    Ok(CodeWord { blocks })
}

/// Column `k` of `C_i` is block `i` of the encoding of `z^k`.
pub fn cs_generating_matrices(params: &CSParams) -> Result<GeneratingMatrices> {
    params.validate()?;
    let n = params.n();
    let columns: Vec<CodeWord> = (0..n)
        .map(|k| encode_poly(&Polynomial::monomial(params.base, k, 1), params))
        .collect::<Result<_>>()?;
    let mats = (0..params.d)
        .map(|i| {
            (0..n)
                .map(|row| (0..n).map(|k| columns[k].blocks[i][row]).collect())
                .collect()
        })
        .collect();
    GeneratingMatrices::new(params.base, n, mats)
}

pub fn cs_point_set(params: &CSParams) -> Result<PointSet> {
    let g = cs_generating_matrices(params)?;
    checked_count(params.base, params.n() as u32, "Chen-Skriganov point set")?;
    generate_points(&g)
}

/// A linear subspace of `F_b^{dn}` kept as a reduced row basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpace {
    pub base: PrimeBase,
    pub d: usize,
    pub n: usize,
    pub basis: Vec<Vec<u32>>,
}

impl CodeSpace {
    /// Row space of `rows`; the basis is stored in reduced echelon form.
    pub fn from_rows(base: PrimeBase, d: usize, n: usize, rows: &[Vec<u32>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != d * n) {
            return Err(Error::InvalidParams(format!("code rows must have length {}", d * n)));
        }
        let (basis, _) = linalg::rref(base, rows, d * n);
        Ok(CodeSpace { base, d, n, basis })
    }

    pub fn zero(base: PrimeBase, d: usize, n: usize) -> Self {
        CodeSpace { base, d, n, basis: Vec::new() }
    }

    pub fn full(base: PrimeBase, d: usize, n: usize) -> Self {
        let len = d * n;
        let basis = (0..len).map(|i| (0..len).map(|k| (i == k) as u32).collect()).collect();
        CodeSpace { base, d, n, basis }
    }

    /// `C_n` spanned by the encodings of `1, z, .., z^{n-1}`.
    pub fn chen_skriganov(params: &CSParams) -> Result<Self> {
        params.validate()?;
        let n = params.n();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|k| encode_poly(&Polynomial::monomial(params.base, k, 1), params).map(|w| w.flat()))
            .collect::<Result<_>>()?;
        Self::from_rows(params.base, params.d, n, &rows)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn len_total(&self) -> usize {
        self.d * self.n
    }

    /// `#C = b^dim`, subject to the enumeration limit.
    pub fn cardinality(&self) -> Result<u64> {
        checked_count(self.base, self.dim() as u32, "code space")
    }

    pub fn contains(&self, word: &[u32]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(word.to_vec());
        linalg::rank(self.base, &rows, self.len_total()) == self.dim()
    }

    /// Every element, zero first.
    pub fn elements(&self) -> Result<Span<'_>> {
        Span::new(self.base, &self.basis, self.len_total())
    }

    /// Equality as row spaces.
    pub fn same_space(&self, other: &CodeSpace) -> bool {
        self.base == other.base && self.len_total() == other.len_total() && self.basis == other.basis
    }
}

/// Orthogonal complement under the standard inner product.
pub fn dual_code(c: &CodeSpace) -> CodeSpace {
    let len = c.len_total();
    let basis = if c.basis.is_empty() {
        CodeSpace::full(c.base, c.d, c.n).basis
    } else {
        linalg::null_space(c.base, &c.basis, len)
    };
    let (basis, _) = linalg::rref(c.base, &basis, len);
    CodeSpace { base: c.base, d: c.d, n: c.n, basis }
}

/// NRT weight `rho(alpha)`: the number of base-b digits of `alpha`.
pub fn nrt_weight(base: PrimeBase, mut alpha: u64) -> u32 {
    let b = base.get() as u64;
    let mut h = 0;
    while alpha > 0 {
        alpha /= b;
        h += 1;
    }
    h
}

/// Hamming weight `kappa(alpha)`: nonzero base-b digits of `alpha`.
pub fn hamming_weight(base: PrimeBase, mut alpha: u64) -> u32 {
    let b = base.get() as u64;
    let mut k = 0;
    while alpha > 0 {
        k += (alpha % b != 0) as u32;
        alpha /= b;
    }
    k
}

/// `v_n(a)`: largest 1-based position with a nonzero digit, 0 for `a = 0`.
pub fn v_n(a: &[u32]) -> usize {
    a.iter().rposition(|&x| x != 0).map_or(0, |p| p + 1)
}

pub fn kappa_n(a: &[u32]) -> usize {
    a.iter().filter(|&&x| x != 0).count()
}

pub fn nrt_weight_d(base: PrimeBase, alpha: &[u64]) -> u32 {
    alpha.iter().map(|&a| nrt_weight(base, a)).sum()
}

pub fn hamming_weight_d(base: PrimeBase, alpha: &[u64]) -> u32 {
    alpha.iter().map(|&a| hamming_weight(base, a)).sum()
}

/// `v_n^d` of a flat word of `d` blocks of length `n`.
pub fn v_n_d(word: &[u32], n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    word.chunks(n).map(v_n).sum()
}

pub fn kappa_n_d(word: &[u32]) -> usize {
    kappa_n(word)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntWeights {
    pub rho: u32,
    pub kappa: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WordWeights {
    pub v: usize,
    pub kappa: usize,
}

pub fn int_weights(base: PrimeBase, alpha: u64) -> IntWeights {
    IntWeights { rho: nrt_weight(base, alpha), kappa: hamming_weight(base, alpha) }
}

pub fn word_weights(word: &CodeWord) -> WordWeights {
    WordWeights {
        v: word.blocks.iter().map(|a| v_n(a)).sum(),
        kappa: word.blocks.iter().map(|a| kappa_n(a)).sum(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualProperties {
    pub kappa_min: usize,
    pub delta_min: usize,
    pub words: u64,
    pub pass: bool,
}

/// Exact minima of `kappa_n^d` and `v_n^d` over the nonzero words.
/// Both minima of the zero code are `d n + 1`.
pub fn verify_dual_properties(c_dual: &CodeSpace, d: usize, n: usize) -> Result<DualProperties> {
    let mut kappa_min = d * n + 1;
    let mut delta_min = d * n + 1;
    let mut span = c_dual.elements()?;
    let mut words = 0u64;
    span.next_ref();
    while let Some(w) = span.next_ref() {
        words += 1;
        kappa_min = kappa_min.min(kappa_n_d(w));
        delta_min = delta_min.min(v_n_d(w, n));
    }
    Ok(DualProperties {
        kappa_min,
        delta_min,
        words,
        pass: kappa_min > 2 * d && delta_min > n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{is_net, phi_map_d};
    use crate::field::poly_space_iter;
    use proptest::prelude::*;

    fn b(v: u64) -> PrimeBase {
        PrimeBase::new(v).unwrap()
    }

    #[test]
    fn default_beta_examples() {
        assert_eq!(default_betas(b(2), 1).unwrap(), vec![vec![0, 1]]);
        let bs = default_betas(b(11), 2).unwrap();
        assert_eq!(bs.concat(), (0..8).collect::<Vec<u32>>());
        assert_eq!(default_betas(b(17), 3), Err(Error::BaseTooSmall { b: 17, d: 3, need: 18 }));
    }

    #[test]
    fn encode_examples() {
        let p = CSParams::new(b(2), 1, 1).unwrap();
        let z = Polynomial::monomial(b(2), 1, 1);
        assert_eq!(encode_poly(&z, &p).unwrap().blocks, vec![vec![0, 1]]);
        assert!(encode_poly(&Polynomial::zero(b(2)), &p).unwrap().is_zero());
        let big = Polynomial::monomial(b(2), 2, 1);
        assert!(matches!(encode_poly(&big, &p), Err(Error::DegreeTooLarge { degree: 2, bound: 2 })));

        let p = CSParams::new(b(11), 2, 2).unwrap();
        let one = Polynomial::new(b(11), &[1]);
        let w = encode_poly(&one, &p).unwrap();
        for block in &w.blocks {
            for nu in block.chunks(2) {
                assert_eq!(nu, &[1, 0]);
            }
        }
    }

    #[test]
    fn small_generating_matrix() {
        let p = CSParams::new(b(2), 1, 1).unwrap();
        let g = cs_generating_matrices(&p).unwrap();
        // columns encode(1) = (1,1), encode(z) = (0,1)
        assert_eq!(g.mats[0], vec![vec![1, 0], vec![1, 1]]);
        let pts = cs_point_set(&p).unwrap();
        assert!(is_net(&pts).unwrap().is_net());
    }

    #[test]
    fn cs_points_match_encoded_polynomials() {
        let p = CSParams::new(b(11), 2, 1).unwrap();
        let pts = cs_point_set(&p).unwrap();
        assert_eq!(pts.len(), 14641);
        assert_eq!(pts.points[0].numerators, vec![0, 0]);
        let mut from_points: Vec<Vec<u64>> = pts.points.iter().map(|q| q.numerators.clone()).collect();
        let mut from_code: Vec<Vec<u64>> = poly_space_iter(4, b(11))
            .unwrap()
            .map(|f| phi_map_d(b(11), &encode_poly(&f, &p).unwrap().flat(), 4))
            .collect();
        from_points.sort();
        from_code.sort();
        from_code.dedup();
        assert_eq!(from_code.len(), 14641);
        assert_eq!(from_points, from_code);
    }

    #[test]
    fn dual_code_examples() {
        let zero = CodeSpace::zero(b(3), 2, 2);
        assert_eq!(dual_code(&zero).dim(), 4);
        let full = CodeSpace::full(b(3), 2, 2);
        assert_eq!(dual_code(&full).dim(), 0);
        let p = CSParams::new(b(11), 2, 1).unwrap();
        let c = CodeSpace::chen_skriganov(&p).unwrap();
        assert_eq!(c.dim(), 4);
        let dual = dual_code(&c);
        assert_eq!(dual.dim(), 4);
        assert!(dual_code(&dual).same_space(&c));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(int_weights(b(2), 0), IntWeights { rho: 0, kappa: 0 });
        assert_eq!(int_weights(b(2), 4), IntWeights { rho: 3, kappa: 1 });
        assert_eq!(v_n(&[0, 0, 0]), 0);
        assert_eq!(v_n(&[0, 3, 0, 2]), 4);
        assert_eq!(kappa_n(&[0, 3, 0, 2]), 2);
        let w = CodeWord { blocks: vec![vec![0, 3, 0, 2], vec![1, 0, 0, 0]] };
        assert_eq!(word_weights(&w), WordWeights { v: 5, kappa: 3 });
    }

    #[test]
    fn dual_properties_examples() {
        let zero = CodeSpace::zero(b(5), 2, 3);
        let r = verify_dual_properties(&zero, 2, 3).unwrap();
        assert_eq!((r.delta_min, r.pass), (7, true));
        let single = CodeSpace::from_rows(b(5), 2, 3, &[vec![0, 0, 1, 0, 0, 0]]).unwrap();
        let r = verify_dual_properties(&single, 2, 3).unwrap();
        assert_eq!(r.kappa_min, 1);
        assert!(!r.pass);
    }

    #[test]
    fn cs_dual_small_instance() {
        // d = 1 needs b >= 2, n = 2w
        for (p, w) in [(2u64, 1usize), (3, 1), (5, 2)] {
            let params = CSParams::new(b(p), 1, w).unwrap();
            let dual = dual_code(&CodeSpace::chen_skriganov(&params).unwrap());
            let r = verify_dual_properties(&dual, 1, params.n()).unwrap();
            assert!(r.pass, "b={p} w={w}: {r:?}");
        }
    }

    #[test]
    fn params_json_round_trip() {
        let p = CSParams::new(b(11), 2, 1).unwrap();
        let s = p.to_json();
        assert!(s.contains("\"b\":11"));
        assert_eq!(CSParams::from_json(&s).unwrap(), p);
        let dup = r#"{"b":11,"d":1,"w":1,"betas":[[3,3]]}"#;
        assert!(CSParams::from_json(dup).is_err());
    }

    proptest! {
        #[test]
        fn encode_is_linear(f in prop::collection::vec(0u64..11, 4), g in prop::collection::vec(0u64..11, 4)) {
            let p = CSParams::new(b(11), 2, 1).unwrap();
            let (f, g) = (Polynomial::new(b(11), &f), Polynomial::new(b(11), &g));
            let sum = encode_poly(&f.add(&g).unwrap(), &p).unwrap().flat();
            let ef = encode_poly(&f, &p).unwrap().flat();
            let eg = encode_poly(&g, &p).unwrap().flat();
            let expect: Vec<u32> = ef.iter().zip(&eg).map(|(&x, &y)| b(11).add(x, y)).collect();
            prop_assert_eq!(sum, expect);
        }

        #[test]
        fn weight_inequalities(alpha in 0u64..1_000_000, word in prop::collection::vec(0u32..5, 8)) {
            prop_assert!(nrt_weight(b(5), alpha) >= hamming_weight(b(5), alpha));
            prop_assert!(v_n_d(&word, 4) >= kappa_n_d(&word));
        }
    }
}
