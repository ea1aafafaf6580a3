//! Exact level-2 machinery for irreducible stochastic matrices.
//!
//! The level-2 action sends a symmetric matrix X to AXA*. On the
//! pair-coordinate space (upper-triangle entries in lexicographic order)
//! that action is the matrix `sym_square(A)`, whose entries are the
//! permanents of the 2x2 submatrices of A. Periodicity of the chain shows
//! up as `det(I - sym_square(A)) = 0`, and the nullspace recovers the
//! periodic partition through its common zeros.
//!
//! Everything here is exact rational arithmetic; no floating point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::digraph::{row_normalized_matrix, Digraph, Partition};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rat, RationalMatrix};

/// Square rational matrix with nonnegative entries and unit row sums.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StochasticMatrix {
    m: RationalMatrix,
}

impl StochasticMatrix {
    pub fn new(m: RationalMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::NotStochastic("matrix must be square and nonempty".into()));
        }
        for i in 0..m.rows() {
            let mut sum = Rat::zero();
            for j in 0..m.cols() {
                if m.at(i, j).is_negative() {
                    return Err(Error::NotStochastic(format!(
                        "entry ({},{}) = {} is negative",
                        i + 1,
                        j + 1,
                        m.at(i, j)
                    )));
                }
                sum += m.at(i, j);
            }
            if !sum.is_one() {
                return Err(Error::NotStochastic(format!(
                    "row {} sums to {}, expected 1",
                    i + 1,
                    sum
                )));
            }
        }
        Ok(StochasticMatrix { m })
    }

    /// Uniform out-edge probabilities: adjacency divided through by the
    /// out-degree, row by row.
    pub fn from_digraph(g: &Digraph) -> Self {
        StochasticMatrix { m: row_normalized_matrix(g) }
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.m
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        self.m.at(i, j)
    }

    /// Digraph on the positive entries.
    pub fn support_digraph(&self) -> Result<Digraph> {
        let n = self.n();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(!self.m.at(i, j).is_zero())).collect())
            .collect();
        Digraph::from_adjacency(rows)
    }

    pub fn is_irreducible(&self) -> bool {
        self.support_digraph().map(|g| g.is_strongly_connected()).unwrap_or(false)
    }

    fn require_irreducible(&self) -> Result<Digraph> {
        let g = self.support_digraph()?;
        if !g.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        Ok(g)
    }

    /// Parses a CSV matrix of exact rational tokens.
    pub fn from_csv(input: &str) -> Result<Self> {
        let rows: Vec<Vec<Rat>> = input
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|line| line.split(',').map(parse_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        Self::new(RationalMatrix::from_rows(rows)?)
    }

    /// Parses a JSON array-of-arrays (or `{"rows": [...]}`). Entries must
    /// be `"p/q"` strings or exact integers; float literals are rejected.
    pub fn from_json(input: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(input).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
        let rows_v = match &value {
            serde_json::Value::Array(a) => a.clone(),
            serde_json::Value::Object(o) => match o.get("rows") {
                Some(serde_json::Value::Array(a)) => a.clone(),
                _ => return Err(Error::Parse("matrix JSON must be rows or {\"rows\": ...}".into())),
            },
            _ => return Err(Error::Parse("matrix JSON must be an array of rows".into())),
        };
        let mut rows = Vec::with_capacity(rows_v.len());
        for row in rows_v {
            let serde_json::Value::Array(entries) = row else {
                return Err(Error::Parse("matrix row must be an array".into()));
            };
            let mut out = Vec::with_capacity(entries.len());
            for e in entries {
                match e {
                    serde_json::Value::String(s) => out.push(parse_rational(&s)?),
                    serde_json::Value::Number(x) => {
                        if let Some(i) = x.as_i64() {
                            out.push(Rat::from_integer(BigInt::from(i)));
                        } else {
                            return Err(Error::FloatRejected(x.to_string()));
                        }
                    }
                    other => return Err(Error::Parse(format!("bad matrix entry: {other}"))),
                }
            }
            rows.push(out);
        }
        Self::new(RationalMatrix::from_rows(rows)?)
    }

    /// Parses CSV or JSON, sniffing JSON by the leading `{` or `[`.
    pub fn parse(input: &str) -> Result<Self> {
        let head = input.trim_start();
        if head.starts_with('{') || head.starts_with('[') {
            Self::from_json(input)
        } else {
            Self::from_csv(input)
        }
    }
}

/// Number of vertex pairs `(i,j)`, `i < j`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Lexicographic index of the pair `(i,j)`, `i < j`, within `0..pair_count(n)`.
pub fn pair_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i,j)`, `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Vector on the pair-coordinate space: the upper triangle of a symmetric
/// zero-diagonal matrix, pairs in lexicographic order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairVector {
    n: usize,
    coords: Vec<Rat>,
}

impl PairVector {
    pub fn new(n: usize, coords: Vec<Rat>) -> Result<Self> {
        if coords.len() != pair_count(n) {
            return Err(Error::Parse(format!(
                "pair vector for n={n} needs {} coordinates, got {}",
                pair_count(n),
                coords.len()
            )));
        }
        Ok(PairVector { n, coords })
    }

    pub fn zero(n: usize) -> Self {
        PairVector { n, coords: vec![Rat::zero(); pair_count(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn at_pair(&self, i: usize, j: usize) -> &Rat {
        &self.coords[pair_index(i.min(j), i.max(j), self.n)]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coords.iter().all(|v| !v.is_negative())
    }

    /// Symmetric zero-diagonal matrix with these upper-triangle entries.
    pub fn mat(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                Rat::zero()
            } else {
                self.at_pair(i, j).clone()
            }
        })
    }

    /// Upper triangle of a symmetric zero-diagonal matrix as a pair vector.
    pub fn from_mat(m: &RationalMatrix) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(Error::Parse("matrix is not symmetric".into()));
        }
        if (0..m.rows()).any(|i| !m.at(i, i).is_zero()) {
            return Err(Error::Parse("matrix has nonzero diagonal".into()));
        }
        let n = m.rows();
        let coords = pairs(n).into_iter().map(|(i, j)| m.at(i, j).clone()).collect();
        Ok(PairVector { n, coords })
    }
}

/// Circular distance between the partition classes of two vertices:
/// `min(|s1-s2|, t-|s1-s2|)`, in `0..=t/2`.
///
/// The partition must be cyclic.
pub fn dist(i: usize, j: usize, p: &Partition) -> usize {
    assert!(p.is_cyclic(), "dist needs a cyclic partition");
    let t = p.num_blocks();
    let idx = p.block_indices();
    let d = idx[i].abs_diff(idx[j]);
    d.min(t - d)
}

/// 0-1 matrix marking the vertex pairs at circular class distance `delta`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndicatorMatrix {
    delta: usize,
    mat: RationalMatrix,
}

impl IndicatorMatrix {
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.mat
    }

    /// tr(X^2), the number of marked (ordered) entries of a 0-1 symmetric X.
    pub fn ones_count(&self) -> Rat {
        self.mat.mul(&self.mat).trace()
    }
}

/// Indicator matrix X^(delta) of a cyclic partition: entry (i,j) is 1 when
/// dist(i,j) = delta. X^(0) has unit diagonal; all others have zero diagonal.
pub fn indicator(delta: usize, p: &Partition, n: usize) -> Result<IndicatorMatrix> {
    assert!(p.is_cyclic(), "indicator needs a cyclic partition");
    assert_eq!(p.n(), n);
    let t = p.num_blocks();
    let max = t / 2;
    if delta > max {
        return Err(Error::BadDelta { delta, max });
    }
    let idx = p.block_indices();
    let mat = RationalMatrix::from_fn(n, n, |i, j| {
        let d = idx[i].abs_diff(idx[j]);
        if d.min(t - d) == delta {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    Ok(IndicatorMatrix { delta, mat })
}

/// All indicator matrices of a cyclic partition, delta = 0..=t/2.
pub fn all_indicators(p: &Partition, n: usize) -> Result<Vec<IndicatorMatrix>> {
    (0..=p.num_blocks() / 2).map(|d| indicator(d, p, n)).collect()
}

/// Checks A X A* = X exactly.
pub fn verify_indicator_fixed(a: &StochasticMatrix, x: &IndicatorMatrix) -> bool {
    conjugate(a.matrix(), x.matrix()) == *x.matrix()
}

/// The level-2 action on a symmetric matrix: A X A*.
pub fn conjugate(a: &RationalMatrix, x: &RationalMatrix) -> RationalMatrix {
    a.mul(x).mul(&a.transpose())
}

/// Matrix of the level-2 action on the pair-coordinate space. Entry at row
/// (i,j), column (l,m) is `A[i][l] A[j][m] + A[i][m] A[j][l]`, the permanent
/// of the corresponding 2x2 submatrix of A.
pub fn sym_square(a: &RationalMatrix) -> RationalMatrix {
    assert!(a.is_square());
    let n = a.rows();
    let ps = pairs(n);
    let c = ps.len();
    let mut out = RationalMatrix::zeros(c, c);
    for (r, &(i, j)) in ps.iter().enumerate() {
        for (col, &(l, m)) in ps.iter().enumerate() {
            let v = a.at(i, l) * a.at(j, m) + a.at(i, m) * a.at(j, l);
            if !v.is_zero() {
                out.set(r, col, v);
            }
        }
    }
    out
}

/// Consistency data for the pair-space action against the matrix action.
///
/// `d` is the diagonal correction `A Mat(x) A* - Mat(sym_square(A) x)`;
/// the boolean holds when every identity checks out: the correction is
/// diagonal with trace equal to tr(A Mat(x) A*), it is entrywise
/// nonnegative (vanishing only with its trace) for nonnegative x, and
/// whenever Mat(x) is fixed by the matrix action the pair vector is fixed
/// by `sym_square(A)`.
pub fn action_consistency(a: &StochasticMatrix, x: &PairVector) -> (RationalMatrix, bool) {
    let n = a.n();
    let sq = sym_square(a.matrix());
    let image = sq.right_mul(x.coords());
    let image_mat = PairVector::new(n, image.clone()).expect("size preserved").mat();
    let conj = conjugate(a.matrix(), &x.mat());
    let d = conj.sub(&image_mat);
    let mut ok = d.is_diagonal();
    ok &= d.trace() == conj.trace();
    if x.is_nonnegative() {
        ok &= d.is_nonnegative();
        if d.trace().is_zero() {
            ok &= d.is_zero();
        }
    }
    if conj == x.mat() {
        ok &= image == x.coords();
    }
    (d, ok)
}

/// Determinant periodicity test: `det(I - sym_square(A)) = 0` exactly when
/// the chain is periodic (t >= 2).
///
/// The periodic direction always holds; the aperiodic direction is
/// cross-validated against the cycle-gcd oracle on the support graph.
pub fn periodicity_test(a: &StochasticMatrix) -> Result<bool> {
    a.require_irreducible()?;
    let sq = sym_square(a.matrix());
    let i = RationalMatrix::identity(sq.rows());
    Ok(i.sub(&sq).det().is_zero())
}

/// Exact value of `det(I - sym_square(A))`.
pub fn periodicity_determinant(a: &StochasticMatrix) -> Result<Rat> {
    a.require_irreducible()?;
    let sq = sym_square(a.matrix());
    let i = RationalMatrix::identity(sq.rows());
    Ok(i.sub(&sq).det())
}

/// Exact basis of the fixed space `{x : sym_square(A) x = x}` on pair
/// coordinates, in reduced echelon form with deterministic pivot order.
pub fn fixed_space(a: &StochasticMatrix) -> Result<Vec<PairVector>> {
    a.require_irreducible()?;
    let sq = sym_square(a.matrix());
    let i = RationalMatrix::identity(sq.rows());
    i.sub(&sq)
        .nullspace()
        .into_iter()
        .map(|v| PairVector::new(a.n(), v))
        .collect()
}

/// Recovers the periodic partition from a fixed-space basis: vertices i and
/// j share a class exactly when the (i,j) coordinate vanishes in every
/// basis vector. The empty basis merges everything (aperiodic, t = 1).
///
/// The result is unordered; cyclic order comes from the support graph.
pub fn partition_from_fixed_space(basis: &[PairVector], n: usize) -> Partition {
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let root = find(parent, parent[v]);
            parent[v] = root;
        }
        parent[v]
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j) in pairs(n) {
        if basis.iter().all(|b| b.at_pair(i, j).is_zero()) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        blocks.entry(r).or_default().push(v);
    }
    Partition::new(blocks.into_values().collect(), n).expect("union-find yields a partition")
}

/// Decomposes a nonnegative symmetric fixed point of X -> AXA* over the
/// indicator matrices of the cyclic partition:
/// `c_delta = tr(X X^(delta)) / tr((X^(delta))^2)`.
///
/// Returns the coefficients for delta = 0..=t/2. Fails with
/// `NotAFixedPoint` when AXA* != X and with `DecompositionResidual` when
/// the reconstruction is not exact or a coefficient is negative.
pub fn decompose_fixed_point(
    a: &StochasticMatrix,
    x: &RationalMatrix,
    p: &Partition,
) -> Result<Vec<Rat>> {
    if !x.is_symmetric() || !x.is_nonnegative() {
        return Err(Error::PropertyViolated(
            "decomposition input must be symmetric and nonnegative".into(),
        ));
    }
    if conjugate(a.matrix(), x) != *x {
        return Err(Error::NotAFixedPoint);
    }
    let indicators = all_indicators(p, a.n())?;
    let mut coeffs = Vec::with_capacity(indicators.len());
    let mut reconstructed = RationalMatrix::zeros(a.n(), a.n());
    for ind in &indicators {
        let c = x.mul(ind.matrix()).trace() / ind.ones_count();
        if c.is_negative() {
            return Err(Error::DecompositionResidual(format!(
                "negative coefficient {} at distance {}",
                c,
                ind.delta()
            )));
        }
        reconstructed = reconstructed.add(&ind.matrix().scale(&c));
        coeffs.push(c);
    }
    if reconstructed != *x {
        let residual = x.sub(&reconstructed);
        return Err(Error::DecompositionResidual(format!(
            "nonzero residual:\n{residual}"
        )));
    }
    Ok(coeffs)
}

/// The unique stationary distribution: pi A = pi, pi > 0, sum pi = 1.
pub fn invariant_measure(a: &StochasticMatrix) -> Result<Vec<Rat>> {
    a.require_irreducible()?;
    let n = a.n();
    // left eigenvector at 1 <=> right nullspace of (A^T - I)
    let m = RationalMatrix::from_fn(n, n, |i, j| {
        let mut v = a.at(j, i).clone();
        if i == j {
            v -= Rat::one();
        }
        v
    });
    let ns = m.nullspace();
    if ns.len() != 1 {
        return Err(Error::Internal(format!(
            "stationary eigenspace has dimension {}, expected 1",
            ns.len()
        )));
    }
    let total: Rat = ns[0].iter().sum();
    if total.is_zero() {
        return Err(Error::Internal("stationary eigenvector sums to zero".into()));
    }
    let pi: Vec<Rat> = ns[0].iter().map(|v| v / &total).collect();
    if pi.iter().any(|v| !v.is_positive()) {
        return Err(Error::Internal("stationary distribution is not positive".into()));
    }
    Ok(pi)
}

/// Verified probability structure of the periodic classes.
#[derive(Clone, Debug)]
pub struct ClassProbabilityReport {
    /// Number of classes t; every class has probability exactly 1/t.
    pub t: usize,
    /// Probability of each class, in cyclic order.
    pub class_probabilities: Vec<Rat>,
    /// For each delta > 0: (delta, c0) where pi X^(delta) = (c0/t) 1, with
    /// c0 = 1 exactly for even t at delta = t/2, else 2.
    pub delta_factors: Vec<(usize, u32)>,
}

/// Verifies that the stationary distribution spreads mass equally across
/// the periodic classes, that pi X^(delta) is the predicted constant
/// vector for every distance, and that the per-distance masses total
/// (t-1)/t.
pub fn class_probability_report(pi: &[Rat], p: &Partition) -> Result<ClassProbabilityReport> {
    let n = p.n();
    if pi.len() != n {
        return Err(Error::PropertyViolated("measure length differs from vertex count".into()));
    }
    let t = p.num_blocks();
    let expected = Rat::new(BigInt::one(), BigInt::from(t));
    let mut class_probabilities = Vec::with_capacity(t);
    for block in p.blocks() {
        let mass: Rat = block.iter().map(|&v| &pi[v]).sum();
        if mass != expected {
            return Err(Error::PropertyViolated(format!(
                "class {{{}}} has probability {}, expected 1/{}",
                block.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(","),
                mass,
                t
            )));
        }
        class_probabilities.push(mass);
    }
    let mut delta_factors = Vec::new();
    for delta in 1..=t / 2 {
        let c0: u32 = if t % 2 == 0 && delta == t / 2 { 1 } else { 2 };
        let ind = indicator(delta, p, n)?;
        let prod = ind.matrix().left_mul(pi);
        let expected_entry = Rat::new(BigInt::from(c0), BigInt::from(t));
        if prod.iter().any(|v| *v != expected_entry) {
            return Err(Error::PropertyViolated(format!(
                "pi X^({delta}) is not the constant vector {c0}/{t}"
            )));
        }
        delta_factors.push((delta, c0));
    }
    // mass accounting over the distances away from a fixed class
    let away: Rat = delta_factors
        .iter()
        .map(|(_, c0)| Rat::new(BigInt::from(*c0), BigInt::from(t)))
        .sum();
    let expected_away = Rat::new(BigInt::from(t as i64 - 1), BigInt::from(t));
    if away != expected_away {
        return Err(Error::PropertyViolated(format!(
            "distance mass totals {} instead of (t-1)/t = {}",
            away, expected_away
        )));
    }
    Ok(ClassProbabilityReport { t, class_probabilities, delta_factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    /// The worked 5-state example: 1->2, 2->{3,4} with probability 1/2
    /// each, 3->5, 4->5, 5->1.
    fn example5() -> StochasticMatrix {
        StochasticMatrix::from_csv(
            "0,1,0,0,0\n0,0,1/2,1/2,0\n0,0,0,0,1\n0,0,0,0,1\n1,0,0,0,0\n",
        )
        .unwrap()
    }

    fn example5_partition() -> Partition {
        Partition::new_cyclic(vec![vec![0], vec![1], vec![2, 3], vec![4]], 5).unwrap()
    }

    /// Aperiodic 3-state chain with a self-loop at state 1.
    fn aperiodic3() -> StochasticMatrix {
        StochasticMatrix::from_csv("1/2,1/2,0\n0,0,1\n1,0,0\n").unwrap()
    }

    fn cycle_chain(n: usize) -> StochasticMatrix {
        let g = crate::digraph::Digraph::from_out_lists(
            &(0..n).map(|v| vec![(v + 1) % n]).collect::<Vec<_>>(),
        )
        .unwrap();
        StochasticMatrix::from_digraph(&g)
    }

    #[test]
    fn stochastic_validation() {
        assert!(matches!(
            StochasticMatrix::from_csv("1/2,1/3\n1,0\n"),
            Err(Error::NotStochastic(_))
        ));
        assert!(matches!(
            StochasticMatrix::from_csv("3/2,-1/2\n1,0\n"),
            Err(Error::NotStochastic(_))
        ));
        assert!(matches!(
            StochasticMatrix::from_csv("0.5,0.5\n1,0\n"),
            Err(Error::FloatRejected(_))
        ));
    }

    #[test]
    fn json_matrix_parsing() {
        let a = StochasticMatrix::from_json(r#"[["1/2","1/2"],["1","0"]]"#).unwrap();
        assert_eq!(*a.at(0, 0), rat(1, 2));
        let b = StochasticMatrix::from_json(r#"{"rows":[[0,1],["1/2","1/2"]]}"#).unwrap();
        assert_eq!(*b.at(1, 0), rat(1, 2));
        assert!(matches!(
            StochasticMatrix::from_json(r#"[[0.5,0.5],[1,0]]"#),
            Err(Error::FloatRejected(_))
        ));
        assert!(StochasticMatrix::parse(r#"[["1","0"],["0","1"]]"#).is_ok());
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        assert_eq!(pairs(4), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (k, (i, j)) in pairs(6).into_iter().enumerate() {
            assert_eq!(pair_index(i, j, 6), k);
        }
        assert_eq!(pair_count(1), 0);
    }

    #[test]
    fn dist_on_example_partition() {
        let p = example5_partition();
        assert_eq!(dist(2, 3, &p), 0);
        assert_eq!(dist(0, 2, &p), 2);
        assert_eq!(dist(0, 4, &p), 1); // wraparound: classes 1 and 4 of t=4
        assert_eq!(dist(0, 1, &p), 1);
    }

    #[test]
    fn indicator_matrices_of_example() {
        let p = example5_partition();
        let x0 = indicator(0, &p, 5).unwrap();
        // block diagonal ones on {1},{2},{3,4},{5}
        let mut expected = RationalMatrix::identity(5);
        expected.set(2, 3, rat_int(1));
        expected.set(3, 2, rat_int(1));
        assert_eq!(*x0.matrix(), expected);

        // delta=1 marks the w2 positions of the worked example's solution
        let x1 = indicator(1, &p, 5).unwrap();
        let w2_pairs = [(0, 1), (0, 4), (1, 2), (1, 3), (2, 4), (3, 4)];
        for (i, j) in pairs(5) {
            let expected = w2_pairs.contains(&(i, j));
            assert_eq!(!x1.matrix().at(i, j).is_zero(), expected, "pair ({i},{j})");
        }

        // delta=2 marks the w1 positions
        let x2 = indicator(2, &p, 5).unwrap();
        let w1_pairs = [(0, 2), (0, 3), (1, 4)];
        for (i, j) in pairs(5) {
            let expected = w1_pairs.contains(&(i, j));
            assert_eq!(!x2.matrix().at(i, j).is_zero(), expected, "pair ({i},{j})");
        }

        assert!(matches!(indicator(3, &p, 5), Err(Error::BadDelta { delta: 3, max: 2 })));
    }

    #[test]
    fn indicators_are_orthogonal_and_sum_to_ones() {
        let p = example5_partition();
        let inds = all_indicators(&p, 5).unwrap();
        let mut sum = RationalMatrix::zeros(5, 5);
        for (i, a) in inds.iter().enumerate() {
            for (j, b) in inds.iter().enumerate() {
                let tr = a.matrix().mul(b.matrix()).trace();
                assert_eq!(tr.is_zero(), i != j);
            }
            sum = sum.add(a.matrix());
        }
        let ones = RationalMatrix::from_fn(5, 5, |_, _| rat_int(1));
        assert_eq!(sum, ones);
    }

    #[test]
    fn indicators_are_fixed_points_of_example() {
        let a = example5();
        let p = example5_partition();
        for ind in all_indicators(&p, 5).unwrap() {
            assert!(verify_indicator_fixed(&a, &ind), "delta {}", ind.delta());
        }
    }

    #[test]
    fn identity_fixes_everything_aperiodic_fixes_nothing() {
        let id = StochasticMatrix::new(RationalMatrix::identity(3)).unwrap();
        let p = Partition::new_cyclic(vec![vec![0, 1, 2]], 3).unwrap();
        let x0 = indicator(0, &p, 3).unwrap();
        assert!(verify_indicator_fixed(&id, &x0));

        // no nonzero zero-diagonal symmetric candidate survives an
        // aperiodic chain: test the whole pair basis
        let a = aperiodic3();
        for (i, j) in pairs(3) {
            let mut m = RationalMatrix::zeros(3, 3);
            m.set(i, j, rat_int(1));
            m.set(j, i, rat_int(1));
            let cand = IndicatorMatrix { delta: 1, mat: m };
            assert!(!verify_indicator_fixed(&a, &cand));
        }
    }

    #[test]
    fn sym_square_matches_printed_example() {
        let a = example5();
        let sq = sym_square(a.matrix());
        let rows: Vec<Vec<&str>> = vec![
            vec!["0", "0", "0", "0", "1/2", "1/2", "0", "0", "0", "0"],
            vec!["0", "0", "0", "0", "0", "0", "1", "0", "0", "0"],
            vec!["0", "0", "0", "0", "0", "0", "1", "0", "0", "0"],
            vec!["1", "0", "0", "0", "0", "0", "0", "0", "0", "0"],
            vec!["0", "0", "0", "0", "0", "0", "0", "0", "1/2", "1/2"],
            vec!["0", "0", "0", "0", "0", "0", "0", "0", "1/2", "1/2"],
            vec!["0", "1/2", "1/2", "0", "0", "0", "0", "0", "0", "0"],
            vec!["0", "0", "0", "0", "0", "0", "0", "0", "0", "0"],
            vec!["0", "0", "0", "1", "0", "0", "0", "0", "0", "0"],
            vec!["0", "0", "0", "1", "0", "0", "0", "0", "0", "0"],
        ];
        let expected = RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(sq, expected);
    }

    #[test]
    fn sym_square_degenerate_cases() {
        assert_eq!(sym_square(&RationalMatrix::identity(4)), RationalMatrix::identity(6));
        let half = RationalMatrix::from_fn(2, 2, |_, _| rat(1, 2));
        let sq = sym_square(&half);
        assert_eq!(sq.rows(), 1);
        assert_eq!(*sq.at(0, 0), rat(1, 2));
    }

    #[test]
    fn action_consistency_checks() {
        let a = example5();
        // zero vector: trivially consistent
        let (d, ok) = action_consistency(&a, &PairVector::zero(5));
        assert!(ok && d.is_zero());
        // the delta=1 indicator is a fixed vector of the pair action
        let p = example5_partition();
        let x1 = PairVector::from_mat(indicator(1, &p, 5).unwrap().matrix()).unwrap();
        let sq = sym_square(a.matrix());
        assert_eq!(sq.right_mul(x1.coords()), x1.coords());
        let (_, ok) = action_consistency(&a, &x1);
        assert!(ok);
    }

    #[test]
    fn periodicity_test_on_known_chains() {
        assert!(periodicity_test(&example5()).unwrap());
        assert!(!periodicity_test(&aperiodic3()).unwrap());
        assert!(periodicity_test(&cycle_chain(2)).unwrap());
        // 1x1 chain: empty pair space, det over the empty matrix is 1
        let one = StochasticMatrix::from_csv("1\n").unwrap();
        assert!(!periodicity_test(&one).unwrap());
        assert_eq!(periodicity_determinant(&example5()).unwrap(), Rat::zero());
    }

    #[test]
    fn periodicity_requires_irreducibility() {
        let reducible = StochasticMatrix::from_csv("1,0\n1/2,1/2\n").unwrap();
        assert!(matches!(periodicity_test(&reducible), Err(Error::NotIrreducible)));
    }

    #[test]
    fn fixed_space_of_example_is_the_indicator_span() {
        let a = example5();
        let basis = fixed_space(&a).unwrap();
        assert_eq!(basis.len(), 2);
        let p = example5_partition();
        let x1 = PairVector::from_mat(indicator(1, &p, 5).unwrap().matrix()).unwrap();
        let x2 = PairVector::from_mat(indicator(2, &p, 5).unwrap().matrix()).unwrap();
        assert!(basis.contains(&x1));
        assert!(basis.contains(&x2));
    }

    #[test]
    fn fixed_space_dimensions() {
        assert!(fixed_space(&aperiodic3()).unwrap().is_empty());
        for n in 3..=5 {
            let basis = fixed_space(&cycle_chain(n)).unwrap();
            assert_eq!(basis.len(), n / 2, "cycle of length {n}");
            // each basis vector really is fixed
            let sq = sym_square(cycle_chain(n).matrix());
            for b in &basis {
                assert_eq!(sq.right_mul(b.coords()), b.coords());
            }
        }
    }

    #[test]
    fn partition_recovery() {
        let a = example5();
        let basis = fixed_space(&a).unwrap();
        let p = partition_from_fixed_space(&basis, 5);
        assert!(p.same_blocks(&example5_partition()));
        // aperiodic: empty basis, single class
        let p = partition_from_fixed_space(&[], 3);
        assert!(p.is_single_block());
        // 4-cycle: four singletons
        let basis = fixed_space(&cycle_chain(4)).unwrap();
        let p = partition_from_fixed_space(&basis, 4);
        assert!(p.is_discrete());
    }

    #[test]
    fn decomposition_of_known_fixed_points() {
        let a = example5();
        let p = example5_partition();
        let x1 = indicator(1, &p, 5).unwrap();
        let c = decompose_fixed_point(&a, x1.matrix(), &p).unwrap();
        assert_eq!(c, vec![rat_int(0), rat_int(1), rat_int(0)]);

        let ones = RationalMatrix::from_fn(5, 5, |_, _| rat_int(1));
        let c = decompose_fixed_point(&a, &ones, &p).unwrap();
        assert_eq!(c, vec![rat_int(1), rat_int(1), rat_int(1)]);

        // w1 = 2, w2 = 3, plus 5 X^(0)
        let x = indicator(0, &p, 5)
            .unwrap()
            .matrix()
            .scale(&rat_int(5))
            .add(&indicator(1, &p, 5).unwrap().matrix().scale(&rat_int(3)))
            .add(&indicator(2, &p, 5).unwrap().matrix().scale(&rat_int(2)));
        let c = decompose_fixed_point(&a, &x, &p).unwrap();
        assert_eq!(c, vec![rat_int(5), rat_int(3), rat_int(2)]);
    }

    #[test]
    fn decomposition_rejects_non_fixed_points() {
        let a = example5();
        let p = example5_partition();
        let mut not_fixed = RationalMatrix::zeros(5, 5);
        not_fixed.set(0, 1, rat_int(1));
        not_fixed.set(1, 0, rat_int(1));
        assert!(matches!(
            decompose_fixed_point(&a, &not_fixed, &p),
            Err(Error::NotAFixedPoint)
        ));
    }

    #[test]
    fn invariant_measure_of_example() {
        let pi = invariant_measure(&example5()).unwrap();
        assert_eq!(pi, vec![rat(1, 4), rat(1, 4), rat(1, 8), rat(1, 8), rat(1, 4)]);
    }

    #[test]
    fn invariant_measure_uniform_cases() {
        // doubly stochastic: uniform
        let a = StochasticMatrix::from_csv("1/2,1/2\n1/2,1/2\n").unwrap();
        assert_eq!(invariant_measure(&a).unwrap(), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(
            invariant_measure(&cycle_chain(3)).unwrap(),
            vec![rat(1, 3), rat(1, 3), rat(1, 3)]
        );
    }

    #[test]
    fn class_probability_structure() {
        let pi = invariant_measure(&example5()).unwrap();
        let p = example5_partition();
        let report = class_probability_report(&pi, &p).unwrap();
        assert_eq!(report.t, 4);
        assert!(report.class_probabilities.iter().all(|c| *c == rat(1, 4)));
        assert_eq!(report.delta_factors, vec![(1, 2), (2, 1)]);

        // 3-cycle: t odd, single delta with c0 = 2
        let pi = invariant_measure(&cycle_chain(3)).unwrap();
        let p = cycle_chain(3).support_digraph().unwrap().periodic_partition().unwrap();
        let report = class_probability_report(&pi, &p).unwrap();
        assert_eq!(report.delta_factors, vec![(1, 2)]);

        // t = 1: single class of probability 1, no deltas
        let pi = invariant_measure(&aperiodic3()).unwrap();
        let p = Partition::new_cyclic(vec![vec![0, 1, 2]], 3).unwrap();
        let report = class_probability_report(&pi, &p).unwrap();
        assert_eq!(report.t, 1);
        assert_eq!(report.class_probabilities, vec![rat_int(1)]);
        assert!(report.delta_factors.is_empty());
    }

    #[test]
    fn support_digraph_and_irreducibility() {
        let a = example5();
        let g = a.support_digraph().unwrap();
        assert_eq!(g.period().unwrap(), 4);
        assert!(a.is_irreducible());
        let reducible = StochasticMatrix::from_csv("1,0\n1/2,1/2\n").unwrap();
        assert!(!reducible.is_irreducible());
    }
}
