//! Linear-algebra statements about a commuting pair `(g, h)` acting on a
//! finite-dimensional vector space, checked by exact rank computations.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactfield::{Field, Matrix, Rational};

const ORDER_BOUND: usize = 1024;

fn matrix_order<F: Field>(g: &Matrix<F>) -> Result<usize> {
    let id = Matrix::identity(g.ctx(), g.rows());
    let mut p = g.clone();
    for k in 1..=ORDER_BOUND {
        if p == id {
            return Ok(k);
        }
        p = p.mul(g);
    }
    Err(Error::OrderBound(ORDER_BOUND))
}

fn check_pair<F: Field>(g: &Matrix<F>, h: &Matrix<F>) -> Result<()> {
    if !g.is_square() || g.rows() != h.rows() || !h.is_square() {
        return Err(Error::DimensionMismatch("g and h must be square of equal size".into()));
    }
    if g.mul(h) != h.mul(g) {
        return Err(Error::NonCommuting("g".into(), "h".into()));
    }
    Ok(())
}

fn constant<F: Field>(ctx: &F::Ctx, num: i64, den: i64) -> F {
    F::from_rational(ctx, &Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// `(1/m) Σ gⁱ` for `g` of order `m`.
pub(crate) fn average<F: Field>(g: &Matrix<F>) -> Result<Matrix<F>> {
    let m = matrix_order(g)?;
    let ctx = g.ctx();
    let mut acc = Matrix::zeros(ctx, g.rows(), g.cols());
    let mut p = Matrix::identity(ctx, g.rows());
    for _ in 0..m {
        acc = acc.add(&p);
        p = p.mul(g);
    }
    Ok(acc.scale(&constant(ctx, 1, m as i64)))
}

/// `Σ ((m-1)/(2m) - i/m) gⁱ`, which satisfies `S (1 - g) = 1 - avg_g`.
fn homotopy<F: Field>(g: &Matrix<F>) -> Result<Matrix<F>> {
    let m = matrix_order(g)? as i64;
    let ctx = g.ctx();
    let mut acc = Matrix::zeros(ctx, g.rows(), g.cols());
    let mut p = Matrix::identity(ctx, g.rows());
    for i in 0..m {
        acc = acc.add(&p.scale(&constant(ctx, m - 1 - 2 * i, 2 * m)));
        p = p.mul(g);
    }
    Ok(acc)
}

fn fixed_basis<F: Field>(g: &Matrix<F>) -> Vec<Vec<F>> {
    g.sub(&Matrix::identity(g.ctx(), g.rows())).kernel_basis()
}

/// Rows form a basis of the annihilator of the span of `cols`, so the matrix
/// realizes `V → V/span(cols)`.
fn quotient_map<F: Field>(ctx: &F::Ctx, d: usize, cols: &[Vec<F>]) -> Matrix<F> {
    if cols.is_empty() {
        return Matrix::identity(ctx, d);
    }
    let w = Matrix::from_columns(ctx, d, cols);
    let ann = w.transpose().kernel_basis();
    Matrix::from_columns(ctx, d, &ann).transpose()
}

fn span_dim<F: Field>(ctx: &F::Ctx, d: usize, cols: &[Vec<F>]) -> usize {
    if cols.is_empty() {
        0
    } else {
        Matrix::from_columns(ctx, d, cols).rank()
    }
}

fn block<F: Field>(ctx: &F::Ctx, rows: usize, cols: usize, parts: &[(usize, usize, &Matrix<F>)]) -> Matrix<F> {
    let mut m = Matrix::zeros(ctx, rows, cols);
    for &(r0, c0, b) in parts {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct QuotientDecomposition<F: Field> {
    pub dim_v: usize,
    pub dim_vg: usize,
    pub dim_vh: usize,
    pub r: usize,
    /// `4d - rank(relations)`.
    pub dim_quotient: usize,
    /// The map `V⁴ → V ⊕ V ⊕ V/(V^g+V^h)` inducing the isomorphism.
    pub map: Matrix<F>,
    pub kills_relations: bool,
    pub image_rank: usize,
}

impl<F: Field> QuotientDecomposition<F> {
    pub fn expected_dim(&self) -> usize {
        self.dim_vg + self.dim_vh + self.r
    }

    pub fn is_isomorphism(&self) -> bool {
        self.kills_relations && self.image_rank == self.dim_quotient && self.dim_quotient == self.expected_dim()
    }
}

/// The quotient of `V⊕V⊕V⊕V` by `(v,v,v,v)`, `(v,gv,0,0)`, `(0,0,v,hv)`
/// together with the map
/// `[v1..v4] ↦ (avg_g(v1-v2), avg_h(v3-v4), [(v1-v3) - S_g(v1-v2) + S_h(v3-v4)])`.
pub fn quotient_decomposition<F: Field>(g: &Matrix<F>, h: &Matrix<F>) -> Result<QuotientDecomposition<F>> {
    check_pair(g, h)?;
    let ctx = g.ctx();
    let d = g.rows();
    let id = Matrix::identity(ctx, d);
    let neg = |m: &Matrix<F>| m.scale(&F::one_in(ctx).negated());

    let relations = block(ctx, 4 * d, 3 * d, &[
        (0, 0, &id), (d, 0, &id), (2 * d, 0, &id), (3 * d, 0, &id),
        (0, d, &id), (d, d, g),
        (2 * d, 2 * d, &id), (3 * d, 2 * d, h),
    ]);
    let dim_quotient = 4 * d - relations.rank();

    let vg = fixed_basis(g);
    let vh = fixed_basis(h);
    let sum: Vec<Vec<F>> = vg.iter().chain(&vh).cloned().collect();
    let r = d - span_dim(ctx, d, &sum);
    let q = quotient_map(ctx, d, &sum);

    let avg_g = average(g)?;
    let avg_h = average(h)?;
    let s_g = homotopy(g)?;
    let s_h = homotopy(h)?;
    // third component: v1 - v3 - S_g v1 + S_g v2 + S_h v3 - S_h v4
    let t1 = q.mul(&id.sub(&s_g));
    let t2 = q.mul(&s_g);
    let t3 = q.mul(&neg(&id).add(&s_h));
    let t4 = q.mul(&neg(&s_h));
    let map = block(ctx, 2 * d + r, 4 * d, &[
        (0, 0, &avg_g), (0, d, &neg(&avg_g)),
        (d, 2 * d, &avg_h), (d, 3 * d, &neg(&avg_h)),
        (2 * d, 0, &t1), (2 * d, d, &t2), (2 * d, 2 * d, &t3), (2 * d, 3 * d, &t4),
    ]);
    let kills_relations = map.mul(&relations).is_zero();
    let image_rank = map.rank();
    Ok(QuotientDecomposition {
        dim_v: d,
        dim_vg: vg.len(),
        dim_vh: vh.len(),
        r,
        dim_quotient,
        map,
        kills_relations,
        image_rank,
    })
}

#[derive(Clone, Debug)]
pub struct AveragingSplit<F: Field> {
    pub passed: bool,
    /// Matrix of `avg_h : V/V^g → V^h/(V^g ∩ V^h)` in the chosen bases.
    pub splitting: Matrix<F>,
    pub witness: Option<String>,
}

/// Checks that `avg_h` splits `0 → V^h/(V^g∩V^h) → V/V^g → V/(V^g+V^h) → 0`.
pub fn averaging_split_check<F: Field>(g: &Matrix<F>, h: &Matrix<F>) -> Result<AveragingSplit<F>> {
    check_pair(g, h)?;
    let ctx = g.ctx();
    let d = g.rows();
    let vg = fixed_basis(g);
    let vh = fixed_basis(h);
    let avg_h = average(h)?;
    let fail = |msg: &str, splitting: Matrix<F>| AveragingSplit { passed: false, splitting, witness: Some(msg.to_string()) };

    let pg = quotient_map(ctx, d, &vg);
    let cod = pg.rows();
    if !vg.is_empty() && !pg.mul(&avg_h).mul(&Matrix::from_columns(ctx, d, &vg)).is_zero() {
        return Ok(fail("avg_h does not preserve V^g", Matrix::zeros(ctx, 0, cod)));
    }
    let lift = pg.solve_matrix(&Matrix::identity(ctx, cod)).expect("quotient map is surjective");

    // image of V^h in V/V^g, with a basis extracted by pivot columns
    let sub_cols: Vec<Vec<F>> = vh.iter().map(|v| pg.mul_vec(v)).collect();
    let sub = if sub_cols.is_empty() {
        Matrix::zeros(ctx, cod, 0)
    } else {
        let all = Matrix::from_columns(ctx, cod, &sub_cols);
        let (_, piv) = all.rref();
        Matrix::from_columns(ctx, cod, &piv.iter().map(|&c| all.column(c)).collect::<Vec<_>>())
    };
    let s = sub.cols();

    let sum: Vec<Vec<F>> = vg.iter().chain(&vh).cloned().collect();
    let r = d - span_dim(ctx, d, &sum);
    if cod - s != r {
        return Ok(fail("sequence is not exact", Matrix::zeros(ctx, s, cod)));
    }

    let full = pg.mul(&avg_h).mul(&lift);
    let splitting = if s == 0 {
        if !full.is_zero() {
            return Ok(fail("avg_h has image outside V^h", Matrix::zeros(ctx, 0, cod)));
        }
        Matrix::zeros(ctx, 0, cod)
    } else {
        match sub.solve_matrix(&full) {
            Some(x) => x,
            None => return Ok(fail("avg_h has image outside V^h", Matrix::zeros(ctx, s, cod))),
        }
    };
    if !splitting.mul(&sub).is_identity() && s > 0 {
        return Ok(fail("splitting composed with inclusion is not the identity", splitting));
    }
    Ok(AveragingSplit { passed: true, splitting, witness: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentCohomology {
    pub h0: usize,
    pub h1: usize,
    pub dim_vgh: usize,
    pub dim_vg: usize,
    pub dim_vh: usize,
    pub r: usize,
}

impl TangentCohomology {
    pub fn matches(&self) -> bool {
        self.h0 == self.dim_vgh && self.h1 == self.dim_vg + self.dim_vh + self.r
    }
}

/// Cohomology of `V³ → (V⊕V)³ → V⊕V` with
/// `(v1,v2,v3) ↦ (ι₁v1 - ι₂v2, ι₂v2 - ι₃v3, ι₃v3 - ι₁v1)` and `(a,b,c) ↦ a+b+c`,
/// where `ι₁v = (v,v)`, `ι₂v = (v,gv)`, `ι₃v = (v,hv)`.
pub fn tangent_complex_cohomology<F: Field>(g: &Matrix<F>, h: &Matrix<F>) -> Result<TangentCohomology> {
    check_pair(g, h)?;
    let ctx = g.ctx();
    let d = g.rows();
    let id = Matrix::identity(ctx, d);
    let neg = |m: &Matrix<F>| m.scale(&F::one_in(ctx).negated());
    let graph = |m: &Matrix<F>| id.vstack(m);
    let (i1, i2, i3) = (graph(&id), graph(g), graph(h));

    let d0 = block(ctx, 6 * d, 3 * d, &[
        (0, 0, &i1), (0, d, &neg(&i2)),
        (2 * d, d, &i2), (2 * d, 2 * d, &neg(&i3)),
        (4 * d, 0, &neg(&i1)), (4 * d, 2 * d, &i3),
    ]);
    let id2 = Matrix::identity(ctx, 2 * d);
    let d1 = block(ctx, 2 * d, 6 * d, &[(0, 0, &id2), (0, 2 * d, &id2), (0, 4 * d, &id2)]);
    assert!(d1.mul(&d0).is_zero(), "not a complex");
    let rank0 = d0.rank();
    let rank1 = d1.rank();

    let vg = fixed_basis(g);
    let vh = fixed_basis(h);
    let vgh = g.sub(&id).vstack(&h.sub(&id)).kernel_basis();
    let sum: Vec<Vec<F>> = vg.iter().chain(&vh).cloned().collect();
    Ok(TangentCohomology {
        h0: 3 * d - rank0,
        h1: (6 * d - rank1) - rank0,
        dim_vgh: vgh.len(),
        dim_vg: vg.len(),
        dim_vh: vh.len(),
        r: d - span_dim(ctx, d, &sum),
    })
}
