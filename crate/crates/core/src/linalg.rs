//! Exact linear algebra over the rationals: reduced row echelon form,
//! nullspaces, affine system solving, and Fourier–Motzkin feasibility with
//! witness extraction. Everything is small and dense; desk-scale inputs
//! only.

use crate::scalars::Rational;

pub type Vector = Vec<Rational>;

pub fn zeros(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn scale(v: &[Rational], s: &Rational) -> Vector {
    v.iter().map(|x| x * s).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Vector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// columns. Zero rows sink to the bottom and are truncated away.
pub fn rref(rows: &mut Vec<Vector>) -> Vec<usize> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(src) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].recip().expect("pivot is nonzero");
        rows[pivot_row] = scale(&rows[pivot_row], &inv);
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                rows[r] = sub_vec(&rows[r], &scale(&rows[pivot_row], &factor));
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    pivots
}

pub fn rank(rows: &[Vector]) -> usize {
    let mut copy = rows.to_vec();
    rref(&mut copy);
    copy.len()
}

/// A canonical basis (RREF rows) for the solution space of `rows · x = 0`.
pub fn nullspace(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let mut reduced = rows.to_vec();
    let pivots = rref(&mut reduced);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = zeros(ncols);
        v[f] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -&reduced[i][f];
        }
        basis.push(v);
    }
    // The construction already yields an echelon-like basis; canonicalize it
    // anyway so equal spaces compare equal.
    rref(&mut basis);
    basis
}

/// The general solution of `A x = b`: a particular solution plus a nullspace
/// basis, or `None` when inconsistent.
pub fn affine_solutions(a: &[Vector], b: &[Rational]) -> Option<(Vector, Vec<Vector>)> {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return Some((Vec::new(), Vec::new()));
    }
    let ncols = a[0].len();
    let mut aug: Vec<Vector> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return None; // a row reduced to 0 = 1
    }
    let mut particular = zeros(ncols);
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = aug[i][ncols].clone();
    }
    let coeff_rows: Vec<Vector> = aug.iter().map(|r| r[..ncols].to_vec()).collect();
    let basis = nullspace(&coeff_rows, ncols);
    Some((particular, basis))
}

/// Solves `A x = b` expecting a unique solution; `None` when inconsistent or
/// underdetermined.
pub fn solve_unique(a: &[Vector], b: &[Rational]) -> Option<Vector> {
    let (p, basis) = affine_solutions(a, b)?;
    basis.is_empty().then_some(p)
}

/// Linear constraint `coeffs · x REL rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Ge,
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinCon {
    pub coeffs: Vector,
    pub rel: Rel,
    pub rhs: Rational,
}

impl LinCon {
    pub fn eq(coeffs: Vector, rhs: Rational) -> Self {
        LinCon { coeffs, rel: Rel::Eq, rhs }
    }
    pub fn ge(coeffs: Vector, rhs: Rational) -> Self {
        LinCon { coeffs, rel: Rel::Ge, rhs }
    }
    pub fn gt(coeffs: Vector, rhs: Rational) -> Self {
        LinCon { coeffs, rel: Rel::Gt, rhs }
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.rel {
            Rel::Eq => lhs == self.rhs,
            Rel::Ge => lhs >= self.rhs,
            Rel::Gt => lhs > self.rhs,
        }
    }
}

/// `coeffs · x ≥ rhs`, strict when `strict` is set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct GeRow {
    coeffs: Vector,
    rhs: Rational,
    strict: bool,
}

impl GeRow {
    /// Scales so the first nonzero coefficient has absolute value one; keeps
    /// logically identical rows textually identical for deduplication.
    fn normalized(mut self) -> Self {
        if let Some(first) = self.coeffs.iter().find(|c| !c.is_zero()) {
            let s = first.abs().recip().expect("nonzero");
            self.coeffs = scale(&self.coeffs, &s);
            self.rhs = &self.rhs * &s;
        }
        self
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// For a constant row, whether `0 ≥ rhs` holds.
    fn constant_holds(&self) -> bool {
        if self.strict {
            self.rhs < Rational::zero()
        } else {
            self.rhs <= Rational::zero()
        }
    }
}

/// Decides feasibility of a rational linear system and, when feasible,
/// returns a witness point. Equalities are eliminated by row reduction
/// first; the remaining inequalities go through Fourier–Motzkin.
pub fn feasible_point(cons: &[LinCon], nvars: usize) -> Option<Vector> {
    // Split off the equalities and parametrize their solution space.
    let eqs: Vec<&LinCon> = cons.iter().filter(|c| c.rel == Rel::Eq).collect();
    let (particular, basis) = if eqs.is_empty() {
        (zeros(nvars), (0..nvars)
            .map(|i| {
                let mut v = zeros(nvars);
                v[i] = Rational::one();
                v
            })
            .collect::<Vec<_>>())
    } else {
        let a: Vec<Vector> = eqs.iter().map(|c| c.coeffs.clone()).collect();
        let b: Vec<Rational> = eqs.iter().map(|c| c.rhs.clone()).collect();
        affine_solutions(&a, &b)?
    };

    // Substitute x = particular + Σ t_i basis_i into the inequalities.
    let k = basis.len();
    let mut rows: Vec<GeRow> = Vec::new();
    for c in cons {
        let strict = match c.rel {
            Rel::Eq => continue,
            Rel::Ge => false,
            Rel::Gt => true,
        };
        let mut coeffs = zeros(k);
        for (i, bvec) in basis.iter().enumerate() {
            coeffs[i] = dot(&c.coeffs, bvec);
        }
        let rhs = &c.rhs - &dot(&c.coeffs, &particular);
        rows.push(GeRow { coeffs, rhs, strict }.normalized());
    }

    let t = fm_feasible(rows, k)?;
    let mut x = particular;
    for (i, bvec) in basis.iter().enumerate() {
        x = add_vec(&x, &scale(bvec, &t[i]));
    }
    debug_assert!(cons.iter().all(|c| c.satisfied_by(&x)));
    Some(x)
}

fn fm_feasible(rows: Vec<GeRow>, nvars: usize) -> Option<Vector> {
    let mut rows: Vec<GeRow> = rows.into_iter().map(GeRow::normalized).collect();
    rows.sort();
    rows.dedup();
    for r in rows.iter().filter(|r| r.is_constant()) {
        if !r.constant_holds() {
            return None;
        }
    }
    if nvars == 0 {
        return Some(Vec::new());
    }

    // Pick the variable with the cheapest pos*neg combination count.
    let var = (0..nvars)
        .min_by_key(|&j| {
            let pos = rows.iter().filter(|r| r.coeffs[j] > Rational::zero()).count();
            let neg = rows.iter().filter(|r| r.coeffs[j] < Rational::zero()).count();
            pos * neg + pos + neg
        })
        .unwrap();

    let mut lowers = Vec::new(); // x_var ≥ bound(rest)
    let mut uppers = Vec::new(); // x_var ≤ bound(rest)
    let mut rest_rows = Vec::new();
    for r in rows.iter() {
        let c = r.coeffs[var].clone();
        if c.is_zero() {
            let mut rr = r.clone();
            rr.coeffs.remove(var);
            rest_rows.push(rr);
        } else {
            // a·x + c·x_var ≥ b  ⇒  x_var ≥ (b − a·x)/c  (c > 0)
            //                      x_var ≤ (b − a·x)/c  (c < 0)
            let inv = c.recip().unwrap();
            let mut coeffs: Vector = r.coeffs.clone();
            coeffs.remove(var);
            let coeffs = scale(&coeffs, &(-&inv));
            let rhs_term = &r.rhs * &inv;
            let bound = Bound { coeffs, constant: rhs_term, strict: r.strict };
            if c > Rational::zero() {
                lowers.push(bound);
            } else {
                uppers.push(bound);
            }
        }
    }

    // Each lower/upper pair becomes a constraint on the remaining variables:
    // lower ≤ upper, i.e. (upper − lower) ≥ 0.
    for lo in &lowers {
        for hi in &uppers {
            let coeffs = sub_vec(&hi.coeffs, &lo.coeffs);
            let rhs = &lo.constant - &hi.constant;
            let strict = lo.strict || hi.strict;
            rest_rows.push(GeRow { coeffs, rhs, strict }.normalized());
        }
    }

    let rest = fm_feasible(rest_rows, nvars - 1)?;

    // Back-substitute: evaluate the bounds at the partial solution.
    let mut lo_val: Option<(Rational, bool)> = None;
    for b in &lowers {
        let v = b.eval(&rest);
        if lo_val.as_ref().is_none_or(|(cur, cur_strict)| v > *cur || (v == *cur && b.strict && !cur_strict)) {
            lo_val = Some((v, b.strict));
        }
    }
    let mut hi_val: Option<(Rational, bool)> = None;
    for b in &uppers {
        let v = b.eval(&rest);
        if hi_val.as_ref().is_none_or(|(cur, cur_strict)| v < *cur || (v == *cur && b.strict && !cur_strict)) {
            hi_val = Some((v, b.strict));
        }
    }
    let value = match (&lo_val, &hi_val) {
        (None, None) => Rational::zero(),
        (Some((lo, strict)), None) => {
            if *strict {
                lo + &Rational::one()
            } else {
                lo.clone()
            }
        }
        (None, Some((hi, strict))) => {
            if *strict {
                hi - &Rational::one()
            } else {
                hi.clone()
            }
        }
        (Some((lo, lo_strict)), Some((hi, hi_strict))) => {
            if lo == hi {
                debug_assert!(!lo_strict && !hi_strict, "FM left an empty interval");
                lo.clone()
            } else {
                debug_assert!(lo < hi);
                if *lo_strict || *hi_strict {
                    (lo + hi) * Rational::new(1, 2)
                } else {
                    lo.clone()
                }
            }
        }
    };

    let mut full = rest;
    full.insert(var, value);
    Some(full)
}

/// An affine bound `constant + coeffs · rest` on an eliminated variable.
struct Bound {
    coeffs: Vector,
    constant: Rational,
    strict: bool,
}

impl Bound {
    fn eval(&self, rest: &[Rational]) -> Rational {
        &self.constant + &dot(&self.coeffs, rest)
    }
}
