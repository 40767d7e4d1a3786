//! Finite exact linear algebra over `Z/3^K` and over `Z_(3)`:
//! Smith normal form with recorded transforms, kernel and cokernel
//! presentations of labeled matrices, and a brute-force oracle for
//! validating both on small inputs.
//!
//! Presentation semantics: a [`PresentedGroup`] is
//! `(direct sum of Z/3^e or Z_(3) on the listed generators) / <relations>`.
//! Pivoting is deterministic: minimal valuation first, then smallest row,
//! then smallest column.

use std::collections::BTreeMap;
use std::fmt;

use num::BigInt;

use crate::error::{Q2Error, Result};
use crate::local::{Local3, Val3};
use crate::rings::GenLabel;

/// Additive order of a summand or row: free, or cyclic of order `3^e`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum SummandOrder {
    Tors(u32),
    Free,
}

impl fmt::Display for SummandOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummandOrder::Tors(e) => write!(f, "3^{e}"),
            SummandOrder::Free => write!(f, "free"),
        }
    }
}

/// A labeled matrix over `Z_(3)` whose rows may carry cyclic orders.
/// Entries are exact; reductions happen inside the algorithms.
#[derive(Clone, Debug)]
pub struct LocalMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Local3>,
    pub row_orders: Vec<SummandOrder>,
    pub row_labels: Vec<GenLabel>,
    pub col_labels: Vec<GenLabel>,
}

impl LocalMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        row_orders: Vec<SummandOrder>,
        row_labels: Vec<GenLabel>,
        col_labels: Vec<GenLabel>,
    ) -> Self {
        assert_eq!(row_orders.len(), rows);
        assert_eq!(row_labels.len(), rows);
        assert_eq!(col_labels.len(), cols);
        LocalMatrix {
            rows,
            cols,
            entries: vec![Local3::zero(); rows * cols],
            row_orders,
            row_labels,
            col_labels,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Local3 {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Local3) {
        self.entries[i * self.cols + j] = v;
    }

    /// Uniform torsion exponent of the rows, when there is one.
    pub fn uniform_order_exp(&self) -> Option<u32> {
        let mut exp = None;
        for o in &self.row_orders {
            match (*o, exp) {
                (SummandOrder::Free, _) => return None,
                (SummandOrder::Tors(e), None) => exp = Some(e),
                (SummandOrder::Tors(e), Some(f)) if e == f => {}
                _ => return None,
            }
        }
        exp
    }

    fn all_free(&self) -> bool {
        self.row_orders.iter().all(|o| *o == SummandOrder::Free)
    }
}

/// Dense residue matrix mod `3^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMat {
    pub rows: usize,
    pub cols: usize,
    pub k: u32,
    data: Vec<u64>,
}

impl ModMat {
    pub fn zero(rows: usize, cols: usize, k: u32) -> Self {
        ModMat {
            rows,
            cols,
            k,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, k: u32) -> Self {
        let mut m = Self::zero(n, n, k);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        3u64.pow(self.k)
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus();
    }

    pub fn mul(&self, rhs: &ModMat) -> ModMat {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.k, rhs.k);
        let m = self.modulus() as u128;
        let mut out = ModMat::zero(self.rows, rhs.cols, self.k);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.at(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.at(i, j) as u128;
                    out.data[i * rhs.cols + j] =
                        ((cur + a as u128 * rhs.at(l, j) as u128) % m) as u64;
                }
            }
        }
        out
    }

    /// Determinant mod `3^k` by valuation-pivot elimination.
    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let m = self.modulus();
        let mut w = self.clone();
        let mut det: u64 = 1;
        let mut sign_neg = false;
        for p in 0..w.rows {
            let mut best: Option<(u32, usize)> = None;
            for i in p..w.rows {
                let v = val3_u64(w.at(i, p), w.k);
                if best.map(|(bv, _)| v < bv).unwrap_or(true) {
                    best = Some((v, i));
                }
            }
            let (_, pr) = best.unwrap();
            if pr != p {
                for j in 0..w.cols {
                    let a = w.at(p, j);
                    let b = w.at(pr, j);
                    w.set(p, j, b);
                    w.set(pr, j, a);
                }
                sign_neg = !sign_neg;
            }
            let piv = w.at(p, p);
            if piv == 0 {
                return 0;
            }
            det = ((det as u128 * piv as u128) % m as u128) as u64;
            let sigma = val3_u64(piv, w.k);
            let unit = piv / 3u64.pow(sigma);
            let unit_inv = inv_mod_3k(unit, w.k);
            for i in (p + 1)..w.rows {
                let e = w.at(i, p);
                if e == 0 {
                    continue;
                }
                if val3_u64(e, w.k) < sigma {
                    // cannot eliminate; determinant has at least this valuation
                    return 0;
                }
                let f = mulmod(e / 3u64.pow(sigma), unit_inv, m);
                for j in 0..w.cols {
                    let sub = mulmod(f, w.at(p, j), m);
                    let cur = w.at(i, j);
                    w.set(i, j, (cur + m - sub) % m);
                }
            }
        }
        if sign_neg {
            (m - det) % m
        } else {
            det
        }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn val3_u64(x: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut x = x;
    let mut v = 0;
    while x % 3 == 0 {
        x /= 3;
        v += 1;
    }
    v
}

fn inv_mod_3k(u: u64, k: u32) -> u64 {
    let m = BigInt::from(3u64.pow(k));
    let e = num::Integer::extended_gcd(&BigInt::from(u), &m);
    assert!(num::One::is_one(&e.gcd), "inverse of a non-unit mod 3^{k}");
    use num::ToPrimitive;
    num::Integer::mod_floor(&e.x, &m).to_u64().unwrap()
}

/// Smith decomposition mod `3^k`: `u * input * v = d` with `u`, `v`
/// invertible and `d` diagonal of 3-powers in ascending valuation.
pub struct SnfMod {
    pub k: u32,
    /// Valuations of the diagonal entries, one per `min(rows, cols)` slot;
    /// `k` encodes a vanishing diagonal entry.
    pub diag: Vec<u32>,
    pub u: ModMat,
    pub v: ModMat,
    pub d: ModMat,
}

pub fn smith_normal_form_mod(m: &LocalMatrix, k: u32) -> SnfMod {
    let mut w = ModMat::zero(m.rows, m.cols, k);
    for i in 0..m.rows {
        for j in 0..m.cols {
            w.set(i, j, m.at(i, j).reduce_mod(k).value());
        }
    }
    smith_of_modmat(w)
}

pub fn smith_of_modmat(mut w: ModMat) -> SnfMod {
    let k = w.k;
    let m = w.modulus();
    let (rows, cols) = (w.rows, w.cols);
    let mut u = ModMat::identity(rows, k);
    let mut v = ModMat::identity(cols, k);
    let mut diag = Vec::new();
    let steps = rows.min(cols);
    for p in 0..steps {
        // minimal valuation, then smallest row, then smallest column
        let mut best: Option<(u32, usize, usize)> = None;
        for i in p..rows {
            for j in p..cols {
                let val = val3_u64(w.at(i, j), k);
                if val < k && best.map(|(bv, _, _)| val < bv).unwrap_or(true) {
                    best = Some((val, i, j));
                }
            }
        }
        let Some((sigma, pi, pj)) = best else {
            break;
        };
        swap_rows(&mut w, &mut u, p, pi);
        swap_cols(&mut w, &mut v, p, pj);
        // normalize the pivot to 3^sigma
        let unit = w.at(p, p) / 3u64.pow(sigma);
        let unit_inv = inv_mod_3k(unit, k);
        for j in 0..cols {
            w.set(p, j, mulmod(w.at(p, j), unit_inv, m));
        }
        for j in 0..rows {
            u.set(p, j, mulmod(u.at(p, j), unit_inv, m));
        }
        // clear the pivot column with row operations
        for i in 0..rows {
            if i == p {
                continue;
            }
            let e = w.at(i, p);
            if e == 0 {
                continue;
            }
            let f = e / 3u64.pow(sigma);
            for j in 0..cols {
                let sub = mulmod(f, w.at(p, j), m);
                w.set(i, j, (w.at(i, j) + m - sub) % m);
            }
            for j in 0..rows {
                let sub = mulmod(f, u.at(p, j), m);
                u.set(i, j, (u.at(i, j) + m - sub) % m);
            }
        }
        // clear the pivot row with column operations
        for j in 0..cols {
            if j == p {
                continue;
            }
            let e = w.at(p, j);
            if e == 0 {
                continue;
            }
            let f = e / 3u64.pow(sigma);
            for i in 0..rows {
                let sub = mulmod(f, w.at(i, p), m);
                w.set(i, j, (w.at(i, j) + m - sub) % m);
            }
            for i in 0..cols {
                let sub = mulmod(f, v.at(i, p), m);
                v.set(i, j, (v.at(i, j) + m - sub) % m);
            }
        }
        diag.push(sigma);
    }
    diag.resize(steps, k);
    SnfMod {
        k,
        diag,
        u,
        v,
        d: w,
    }
}

fn swap_rows(w: &mut ModMat, u: &mut ModMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..w.cols {
        let (x, y) = (w.at(a, j), w.at(b, j));
        w.set(a, j, y);
        w.set(b, j, x);
    }
    for j in 0..u.cols {
        let (x, y) = (u.at(a, j), u.at(b, j));
        u.set(a, j, y);
        u.set(b, j, x);
    }
}

fn swap_cols(w: &mut ModMat, v: &mut ModMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..w.rows {
        let (x, y) = (w.at(i, a), w.at(i, b));
        w.set(i, a, y);
        w.set(i, b, x);
    }
    for i in 0..v.rows {
        let (x, y) = (v.at(i, a), v.at(i, b));
        v.set(i, a, y);
        v.set(i, b, x);
    }
}

/// Exact Smith decomposition over `Z_(3)`: diagonal `3^sigma` entries with
/// unit-normalized transforms, pivoting on minimal valuation.
pub struct SnfExact {
    pub diag: Vec<Val3>,
    pub u: Vec<Vec<Local3>>,
    pub v: Vec<Vec<Local3>>,
}

pub fn smith_normal_form_exact(m: &LocalMatrix) -> SnfExact {
    let (rows, cols) = (m.rows, m.cols);
    let mut w: Vec<Vec<Local3>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.at(i, j).clone()).collect())
        .collect();
    let mut u: Vec<Vec<Local3>> = identity_local(rows);
    let mut v: Vec<Vec<Local3>> = identity_local(cols);
    let mut diag = Vec::new();
    for p in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in p..rows {
            for j in p..cols {
                if let Val3::Finite(val) = w[i][j].val3() {
                    if best.map(|(bv, _, _)| val < bv).unwrap_or(true) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((sigma, pi, pj)) = best else {
            break;
        };
        w.swap(p, pi);
        u.swap(p, pi);
        if pj != p {
            for row in w.iter_mut() {
                row.swap(p, pj);
            }
            for row in v.iter_mut() {
                row.swap(p, pj);
            }
        }
        let three_sigma = Local3::from_int(3).pow(sigma);
        let unit_inv = w[p][p].try_div(&three_sigma).unwrap().inv().unwrap();
        for j in 0..cols {
            w[p][j] = &w[p][j] * &unit_inv;
        }
        for j in 0..rows {
            u[p][j] = &u[p][j] * &unit_inv;
        }
        for i in 0..rows {
            if i == p || w[i][p].is_zero() {
                continue;
            }
            let f = w[i][p].try_div(&three_sigma).unwrap();
            for j in 0..cols {
                let sub = &f * &w[p][j];
                w[i][j] = &w[i][j] - &sub;
            }
            for j in 0..rows {
                let sub = &f * &u[p][j];
                u[i][j] = &u[i][j] - &sub;
            }
        }
        for j in 0..cols {
            if j == p || w[p][j].is_zero() {
                continue;
            }
            let f = w[p][j].try_div(&three_sigma).unwrap();
            for i in 0..rows {
                let sub = &f * &w[i][p];
                w[i][j] = &w[i][j] - &sub;
            }
            for i in 0..cols {
                let sub = &f * &v[i][p];
                v[i][j] = &v[i][j] - &sub;
            }
        }
        diag.push(Val3::Finite(sigma));
    }
    diag.resize(rows.min(cols), Val3::Infinity);
    SnfExact { diag, u, v }
}

fn identity_local(n: usize) -> Vec<Vec<Local3>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Local3::one()
                    } else {
                        Local3::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// A finite presentation of a `Z_(3)`-module: labeled cyclic/free summands
/// plus relation vectors on those generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub order: SummandOrder,
    pub gen: Vec<(GenLabel, Local3)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PresentedGroup {
    pub summands: Vec<Summand>,
    pub relations: Vec<Vec<(GenLabel, Local3)>>,
}

impl PresentedGroup {
    pub fn is_trivial(&self) -> bool {
        self.summands.is_empty()
    }

    /// Canonical multiset of cyclic invariants: the orders of a direct-sum
    /// decomposition, computed by SNF of the relation presentation. Used for
    /// window-stability comparison and the independence check.
    pub fn cyclic_orders(&self) -> Vec<SummandOrder> {
        if self.relations.is_empty() {
            let mut out: Vec<_> = self.summands.iter().map(|s| s.order).collect();
            out.sort();
            return out;
        }
        // rows = summand generators; columns = diag(3^e) plus relations
        let n = self.summands.len();
        let mut max_e = 1;
        for s in &self.summands {
            if let SummandOrder::Tors(e) = s.order {
                max_e = max_e.max(e);
            }
        }
        let k = max_e + 2;
        let m = 3u64.pow(k);
        let index: BTreeMap<_, _> = self
            .summands
            .iter()
            .enumerate()
            .map(|(i, s)| (gen_key(&s.gen), i))
            .collect();
        let mut cols: Vec<Vec<u64>> = Vec::new();
        for (i, s) in self.summands.iter().enumerate() {
            if let SummandOrder::Tors(e) = s.order {
                let mut c = vec![0u64; n];
                c[i] = 3u64.pow(e) % m;
                cols.push(c);
            }
        }
        for rel in &self.relations {
            let mut c = vec![0u64; n];
            for (lab, coef) in rel {
                let i = *index
                    .get(&lab.to_string())
                    .expect("relation references a presentation generator");
                c[i] = coef.reduce_mod(k).value();
            }
            cols.push(c);
        }
        let mut w = ModMat::zero(n, cols.len(), k);
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                w.set(i, j, *x);
            }
        }
        let snf = smith_of_modmat(w);
        let mut out = Vec::new();
        for i in 0..n {
            let sigma = snf.diag.get(i).copied().unwrap_or(k);
            if sigma == 0 {
                continue;
            }
            if sigma >= k {
                out.push(SummandOrder::Free);
            } else {
                out.push(SummandOrder::Tors(sigma));
            }
        }
        out.sort();
        out
    }

    /// Total size as a power of 3, `None` when free summands make it infinite.
    pub fn size_exp(&self) -> Option<u64> {
        let mut total = 0u64;
        for o in self.cyclic_orders() {
            match o {
                SummandOrder::Free => return None,
                SummandOrder::Tors(e) => total += e as u64,
            }
        }
        Some(total)
    }
}

fn gen_key(gen: &[(GenLabel, Local3)]) -> String {
    fmt_vector(gen)
}

/// Renders a labeled vector as `-27*D[13,3]+D[13,4]`.
pub fn fmt_vector(v: &[(GenLabel, Local3)]) -> String {
    let mut out = String::new();
    for (lab, c) in v {
        if c.is_zero() {
            continue;
        }
        let c_str = format!("{c}");
        if out.is_empty() {
            if c_str == "1" {
                out.push_str(&lab.to_string());
            } else if c_str == "-1" {
                out.push_str(&format!("-{lab}"));
            } else {
                out.push_str(&format!("{c_str}*{lab}"));
            }
        } else if c_str == "1" {
            out.push_str(&format!("+{lab}"));
        } else if c_str == "-1" {
            out.push_str(&format!("-{lab}"));
        } else if c_str.starts_with('-') {
            out.push_str(&format!("{c_str}*{lab}"));
        } else {
            out.push_str(&format!("+{c_str}*{lab}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for PresentedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|s| format!("{}<{}>", order_prefix(s.order), fmt_vector(&s.gen)))
            .collect();
        write!(f, "{}", parts.join(" + "))?;
        if !self.relations.is_empty() {
            let rels: Vec<String> = self.relations.iter().map(|r| fmt_vector(r)).collect();
            write!(f, " / ({} = 0)", rels.join(" = 0, "))?;
        }
        Ok(())
    }
}

fn order_prefix(o: SummandOrder) -> String {
    match o {
        SummandOrder::Free => "Z".into(),
        SummandOrder::Tors(e) => format!("Z/{}", 3u64.pow(e)),
    }
}

/// Kernel of the map defined by a labeled matrix, as a presented group on
/// the column labels. Torsion rows use the working modulus
/// `K = max row exponent + slack` with results capped back; free rows run
/// the exact decomposition.
pub fn kernel_presentation(m: &LocalMatrix, slack: u32) -> PresentedGroup {
    if m.all_free() {
        let snf = smith_normal_form_exact(m);
        let mut summands = Vec::new();
        for j in 0..m.cols {
            let in_kernel = match snf.diag.get(j) {
                None => true,
                Some(Val3::Infinity) => true,
                Some(Val3::Finite(_)) => false,
            };
            if in_kernel {
                let gen: Vec<(GenLabel, Local3)> = (0..m.cols)
                    .filter(|i| !snf.v[*i][j].is_zero())
                    .map(|i| (m.col_labels[i].clone(), snf.v[i][j].clone()))
                    .collect();
                summands.push(Summand {
                    order: SummandOrder::Free,
                    gen,
                });
            }
        }
        return PresentedGroup {
            summands,
            relations: Vec::new(),
        };
    }
    let e_src = m
        .row_orders
        .iter()
        .map(|o| match o {
            SummandOrder::Tors(e) => *e,
            SummandOrder::Free => unreachable!("mixed free/torsion rows unsupported"),
        })
        .max()
        .unwrap_or(1);
    let k = e_src + slack;
    let big_m = 3u64.pow(k);
    // embed each row of order 3^e by the scale 3^{K-e}
    let mut w = ModMat::zero(m.rows, m.cols, k);
    for i in 0..m.rows {
        let SummandOrder::Tors(e) = m.row_orders[i] else {
            unreachable!()
        };
        let scale = 3u64.pow(k - e);
        for j in 0..m.cols {
            w.set(i, j, mulmod(m.at(i, j).reduce_mod(k).value(), scale, big_m));
        }
    }
    let snf = smith_of_modmat(w);
    let mut summands = Vec::new();
    for j in 0..m.cols {
        let sigma = snf.diag.get(j).copied().unwrap_or(k);
        if sigma <= k - e_src {
            continue;
        }
        let order = sigma - (k - e_src);
        let lift = 3u64.pow(k - sigma);
        let cap = 3u64.pow(e_src);
        let gen: Vec<(GenLabel, Local3)> = (0..m.cols)
            .filter_map(|i| {
                let coef = mulmod(snf.v.at(i, j), lift, big_m) % cap;
                if coef == 0 {
                    None
                } else {
                    Some((m.col_labels[i].clone(), Local3::from_int(coef as i64)))
                }
            })
            .collect();
        summands.push(Summand {
            order: SummandOrder::Tors(order),
            gen,
        });
    }
    PresentedGroup {
        summands,
        relations: Vec::new(),
    }
}

/// Column-Howell reduction state: canonical generators of the column span,
/// keyed by pivot row (pivot = bottom-most nonzero entry).
struct Howell {
    k: u32,
    row_exps: Vec<u32>,
    /// pivot row -> (pivot valuation, column)
    pivots: BTreeMap<usize, (u32, Vec<u64>)>,
}

impl Howell {
    fn new(row_exps: Vec<u32>, k: u32) -> Self {
        Howell {
            k,
            row_exps,
            pivots: BTreeMap::new(),
        }
    }

    fn row_modulus(&self, i: usize) -> u64 {
        3u64.pow(self.row_exps[i])
    }

    fn reduce_col(&self, col: &mut [u64]) {
        for (i, x) in col.iter_mut().enumerate() {
            *x %= self.row_modulus(i);
        }
    }

    fn insert(&mut self, mut col: Vec<u64>) {
        let mut queue = vec![];
        self.reduce_col(&mut col);
        loop {
            let Some(prow) = col.iter().rposition(|x| *x != 0) else {
                match queue.pop() {
                    Some(c) => {
                        col = c;
                        continue;
                    }
                    None => return,
                }
            };
            let pval = val3_u64(col[prow], self.row_exps[prow]);
            enum Action {
                Reduce(u32, Vec<u64>),
                Swap,
                Place,
            }
            let action = match self.pivots.get(&prow) {
                Some((qval, qcol)) if *qval <= pval => Action::Reduce(*qval, qcol.clone()),
                Some(_) => Action::Swap,
                None => Action::Place,
            };
            match action {
                Action::Reduce(qval, qcol) => {
                    let qpiv = qcol[prow] / 3u64.pow(qval);
                    let f = mulmod(
                        col[prow] / 3u64.pow(qval),
                        inv_mod_3k(qpiv, self.k),
                        3u64.pow(self.k),
                    );
                    for i in 0..col.len() {
                        let mi = self.row_modulus(i);
                        let sub = mulmod(f % mi, qcol[i], mi);
                        col[i] = (col[i] + mi - sub) % mi;
                    }
                }
                Action::Swap => {
                    // this column has the shallower valuation: swap roles
                    let (_, old) = self.pivots.remove(&prow).unwrap();
                    self.place(prow, pval, col, &mut queue);
                    col = old;
                }
                Action::Place => {
                    self.place(prow, pval, col, &mut queue);
                    match queue.pop() {
                        Some(c) => col = c,
                        None => return,
                    }
                }
            }
        }
    }

    fn place(&mut self, prow: usize, pval: u32, mut col: Vec<u64>, queue: &mut Vec<Vec<u64>>) {
        // normalize the pivot entry to 3^pval
        let unit = col[prow] / 3u64.pow(pval);
        let uinv = inv_mod_3k(unit, self.k);
        for (i, x) in col.iter_mut().enumerate() {
            let mi = self.row_modulus(i);
            *x = mulmod(*x, uinv % mi, mi);
        }
        // Howell closure: the 3^{e_p - pval} multiple has a shallower pivot
        if pval > 0 {
            let scale = 3u64.pow(self.row_exps[prow] - pval);
            let mut closure = col.clone();
            for (i, x) in closure.iter_mut().enumerate() {
                let mi = self.row_modulus(i);
                *x = mulmod(*x, scale % mi, mi);
            }
            if closure.iter().any(|x| *x != 0) {
                queue.push(closure);
            }
        }
        self.pivots.insert(prow, (pval, col));
    }

    /// Clears entries sitting in unit-pivot rows of all other columns.
    fn normalize(&mut self) {
        let unit_rows: Vec<usize> = self
            .pivots
            .iter()
            .filter(|(_, (v, _))| *v == 0)
            .map(|(r, _)| *r)
            .collect();
        for &p in &unit_rows {
            let (_, pcol) = self.pivots.get(&p).unwrap().clone();
            for (r, (_, col)) in self.pivots.iter_mut() {
                if *r == p || col[p] == 0 {
                    continue;
                }
                let f = col[p];
                for i in 0..col.len() {
                    let mi = 3u64.pow(self.row_exps[i]);
                    let sub = mulmod(f % mi, pcol[i], mi);
                    col[i] = (col[i] + mi - sub) % mi;
                }
            }
        }
    }

    /// True iff the target vector lies in the span of the inserted columns.
    fn contains(&self, target: &[u64]) -> bool {
        let mut t: Vec<u64> = target
            .iter()
            .enumerate()
            .map(|(i, x)| *x % self.row_modulus(i))
            .collect();
        loop {
            let Some(prow) = t.iter().rposition(|x| *x != 0) else {
                return true;
            };
            let Some((pval, pcol)) = self.pivots.get(&prow) else {
                return false;
            };
            let tval = val3_u64(t[prow], self.row_exps[prow]);
            if tval < *pval {
                return false;
            }
            let ppiv = pcol[prow] / 3u64.pow(*pval);
            let f = mulmod(
                t[prow] / 3u64.pow(*pval),
                inv_mod_3k(ppiv, self.k),
                3u64.pow(self.k),
            );
            for i in 0..t.len() {
                let mi = self.row_modulus(i);
                let sub = mulmod(f % mi, pcol[i], mi);
                t[i] = (t[i] + mi - sub) % mi;
            }
        }
    }
}

fn howell_of(m: &LocalMatrix) -> Howell {
    let row_exps: Vec<u32> = m
        .row_orders
        .iter()
        .map(|o| match o {
            SummandOrder::Tors(e) => *e,
            SummandOrder::Free => panic!("torsion cokernel path needs torsion rows"),
        })
        .collect();
    let k = row_exps.iter().copied().max().unwrap_or(1);
    let mut h = Howell::new(row_exps, k);
    for j in 0..m.cols {
        let col: Vec<u64> = (0..m.rows)
            .map(|i| m.at(i, j).reduce_mod(h.row_exps[i]).value())
            .collect();
        h.insert(col);
    }
    h.normalize();
    h
}

/// Cokernel of the map defined by a labeled matrix: the target modulo the
/// column span, presented on the row labels. Unit pivots eliminate their
/// rows; a residual single-entry pivot `3^sigma` lowers its generator's
/// order; residual multi-entry columns are emitted as relations.
pub fn cokernel_presentation(m: &LocalMatrix) -> PresentedGroup {
    if m.all_free() {
        return cokernel_presentation_free(m);
    }
    let h = howell_of(m);
    let mut eliminated = vec![false; m.rows];
    let mut lowered: BTreeMap<usize, u32> = BTreeMap::new();
    let mut relations = Vec::new();
    for (&prow, (pval, col)) in &h.pivots {
        if *pval == 0 {
            eliminated[prow] = true;
            continue;
        }
        let support: Vec<usize> = (0..m.rows).filter(|i| col[*i] != 0).collect();
        if support == [prow] {
            lowered.insert(prow, *pval);
        } else {
            let rel: Vec<(GenLabel, Local3)> = support
                .iter()
                .map(|&i| (m.row_labels[i].clone(), Local3::from_int(col[i] as i64)))
                .collect();
            relations.push(rel);
        }
    }
    let mut summands = Vec::new();
    for i in 0..m.rows {
        if eliminated[i] {
            continue;
        }
        let SummandOrder::Tors(e) = m.row_orders[i] else {
            unreachable!()
        };
        let order = lowered.get(&i).copied().unwrap_or(e);
        summands.push(Summand {
            order: SummandOrder::Tors(order),
            gen: vec![(m.row_labels[i].clone(), Local3::one())],
        });
    }
    PresentedGroup {
        summands,
        relations,
    }
}

/// Free-target cokernel via exact bottom-pivot column echelon; pivots in our
/// uses are units, which split the quotient on the complementary rows.
fn cokernel_presentation_free(m: &LocalMatrix) -> PresentedGroup {
    let mut cols: Vec<Vec<Local3>> = (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m.at(i, j).clone()).collect())
        .collect();
    let mut pivots: BTreeMap<usize, Vec<Local3>> = BTreeMap::new();
    let mut torsion: BTreeMap<usize, u32> = BTreeMap::new();
    while let Some(mut col) = cols.pop() {
        loop {
            let Some(prow) = col.iter().rposition(|x| !x.is_zero()) else {
                break;
            };
            if let Some(pcol) = pivots.get(&prow) {
                let f = col[prow].try_div(&pcol[prow]);
                match f {
                    Ok(f) => {
                        for i in 0..col.len() {
                            let sub = &f * &pcol[i];
                            col[i] = &col[i] - &sub;
                        }
                    }
                    Err(_) => {
                        // non-unit pivot conflict does not arise for the
                        // connecting maps; keep the smaller-valuation column
                        let old = pivots.remove(&prow).unwrap();
                        pivots.insert(prow, col);
                        col = old;
                    }
                }
            } else {
                match col[prow].val3() {
                    Val3::Finite(0) => {
                        pivots.insert(prow, col);
                    }
                    Val3::Finite(sigma) => {
                        torsion.insert(prow, sigma);
                        pivots.insert(prow, col);
                    }
                    Val3::Infinity => unreachable!(),
                }
                break;
            }
        }
    }
    let mut summands = Vec::new();
    for i in 0..m.rows {
        match (pivots.contains_key(&i), torsion.get(&i)) {
            (true, None) => {} // unit pivot: eliminated
            (true, Some(sigma)) => summands.push(Summand {
                order: SummandOrder::Tors(*sigma),
                gen: vec![(m.row_labels[i].clone(), Local3::one())],
            }),
            (false, _) => summands.push(Summand {
                order: SummandOrder::Free,
                gen: vec![(m.row_labels[i].clone(), Local3::one())],
            }),
        }
    }
    PresentedGroup {
        summands,
        relations: Vec::new(),
    }
}

/// True iff `target` (exact coordinates in the row basis) lies in the
/// column span of the matrix, respecting row orders.
pub fn image_contains(m: &LocalMatrix, target: &[Local3]) -> bool {
    assert_eq!(target.len(), m.rows);
    let h = howell_of(m);
    let t: Vec<u64> = target
        .iter()
        .enumerate()
        .map(|(i, x)| x.reduce_mod(h.row_exps[i]).value())
        .collect();
    h.contains(&t)
}

/// Kernel and cokernel cardinalities (as powers of 3) of a matrix acting
/// `(Z/3^k)^cols -> (Z/3^k)^rows`, derived from the Smith form.
pub fn snf_cardinalities(m: &LocalMatrix, k: u32) -> (u64, u64) {
    let snf = smith_normal_form_mod(m, k);
    let mut kernel = 0u64;
    for j in 0..m.cols {
        let sigma = snf.diag.get(j).copied().unwrap_or(k);
        kernel += sigma as u64;
    }
    let mut coker = 0u64;
    for i in 0..m.rows {
        let sigma = snf.diag.get(i).copied().unwrap_or(k).min(k);
        coker += sigma as u64;
    }
    (kernel, coker)
}

/// Exhaustive kernel/cokernel counter for small matrices mod `3^k`;
/// the validation oracle for [`snf_cardinalities`].
pub fn brute_force_oracle(m: &LocalMatrix, k: u32) -> Result<(u64, u64)> {
    let states = 3u128.pow(k).checked_pow(m.cols as u32).unwrap_or(u128::MAX);
    if states > 600_000 {
        return Err(Q2Error::SizeLimitExceeded(format!(
            "{} source vectors exceeds the oracle budget",
            states
        )));
    }
    let md = 3u64.pow(k);
    let entries: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| m.at(i, j).reduce_mod(k).value())
                .collect()
        })
        .collect();
    let mut kernel_count = 0u64;
    let mut image = std::collections::HashSet::new();
    let mut vec_state = vec![0u64; m.cols];
    loop {
        let mut img = vec![0u64; m.rows];
        for i in 0..m.rows {
            let mut acc = 0u128;
            for j in 0..m.cols {
                acc += entries[i][j] as u128 * vec_state[j] as u128;
            }
            img[i] = (acc % md as u128) as u64;
        }
        if img.iter().all(|x| *x == 0) {
            kernel_count += 1;
        }
        image.insert(img);
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == m.cols {
                let total_target = (md as u128).pow(m.rows as u32);
                let coker = (total_target / image.len() as u128) as u64;
                return Ok((kernel_count, coker));
            }
            vec_state[pos] += 1;
            if vec_state[pos] < md {
                break;
            }
            vec_state[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Family;
    use rand::{Rng, SeedableRng};

    fn anon_labels(n: usize, fam: Family) -> Vec<GenLabel> {
        (0..n).map(|i| GenLabel::Gen(fam, 0, i as i64)).collect()
    }

    fn mat_from(rows: usize, cols: usize, e: u32, data: &[i64]) -> LocalMatrix {
        let mut m = LocalMatrix::new(
            rows,
            cols,
            vec![SummandOrder::Tors(e); rows],
            anon_labels(rows, Family::B),
            anon_labels(cols, Family::D),
        );
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, Local3::from_int(data[i * cols + j]));
            }
        }
        m
    }

    #[test]
    fn snf_diag_examples() {
        // diag(3,1) mod 9 sorts to diag(1,3)
        let m = mat_from(2, 2, 2, &[3, 0, 0, 1]);
        let snf = smith_normal_form_mod(&m, 2);
        assert_eq!(snf.diag, vec![0, 1]);
        // the zero 1x1 matrix stays zero
        let z = mat_from(1, 1, 2, &[0]);
        assert_eq!(smith_normal_form_mod(&z, 2).diag, vec![2]);
        // [[8,78],[80,21]] mod 81: det has valuation 1, so D = diag(1, 3)
        let m = mat_from(2, 2, 4, &[8, 78, 80, 21]);
        let snf = smith_normal_form_mod(&m, 4);
        assert_eq!(snf.diag, vec![0, 1]);
    }

    #[test]
    fn snf_transform_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let k = rng.gen_range(1..4u32);
            let data: Vec<i64> = (0..rows * cols)
                .map(|_| rng.gen_range(0..3i64.pow(k)))
                .collect();
            let m = mat_from(rows, cols, k, &data);
            let snf = smith_normal_form_mod(&m, k);
            let mut w = ModMat::zero(rows, cols, k);
            for i in 0..rows {
                for j in 0..cols {
                    w.set(i, j, m.at(i, j).reduce_mod(k).value());
                }
            }
            let umv = snf.u.mul(&w).mul(&snf.v);
            assert_eq!(umv, snf.d);
            // diagonal of 3-powers, ascending valuation, zero off-diagonal
            for i in 0..rows {
                for j in 0..cols {
                    if i != j {
                        assert_eq!(snf.d.at(i, j), 0);
                    }
                }
            }
            let vals = snf.diag.clone();
            for w in vals.windows(2) {
                assert!(w[0] <= w[1]);
            }
            // transforms invertible: unit determinants
            assert_eq!(val3_u64(snf.u.det(), k), 0);
            assert_eq!(val3_u64(snf.v.det(), k), 0);
        }
    }

    #[test]
    fn oracle_examples() {
        // [[3]] mod 9: kernel 3, cokernel 3
        let m = mat_from(1, 1, 2, &[3]);
        assert_eq!(brute_force_oracle(&m, 2).unwrap(), (3, 3));
        // [[1,1],[0,3]] mod 9: cokernel size 3
        let m = mat_from(2, 2, 2, &[1, 1, 0, 3]);
        let (_, coker) = brute_force_oracle(&m, 2).unwrap();
        assert_eq!(coker, 3);
        // oversize input rejected
        let m = mat_from(1, 14, 3, &[1; 14]);
        assert!(matches!(
            brute_force_oracle(&m, 3),
            Err(Q2Error::SizeLimitExceeded(_))
        ));
    }

    #[test]
    fn snf_matches_oracle_sampled() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let rows = rng.gen_range(1..4);
            let cols = rng.gen_range(1..4);
            let k = rng.gen_range(1..4u32);
            let data: Vec<i64> = (0..rows * cols)
                .map(|_| rng.gen_range(0..3i64.pow(k)))
                .collect();
            let m = mat_from(rows, cols, k, &data);
            let (kern, coker) = brute_force_oracle(&m, k).unwrap();
            let (ke, ce) = snf_cardinalities(&m, k);
            assert_eq!(3u64.pow(ke as u32), kern, "kernel of {data:?} mod 3^{k}");
            assert_eq!(3u64.pow(ce as u32), coker, "cokernel of {data:?} mod 3^{k}");
        }
    }

    #[test]
    fn kernel_presentation_examples() {
        // zero 3x3 over Z/27 rows: three order-27 generators
        let m = mat_from(3, 3, 3, &[0; 9]);
        let p = kernel_presentation(&m, 2);
        assert_eq!(p.summands.len(), 3);
        for s in &p.summands {
            assert_eq!(s.order, SummandOrder::Tors(3));
        }
        // single column [3] over a Z/9 row: kernel generated by 3 * e_0
        let m = mat_from(1, 1, 2, &[3]);
        let p = kernel_presentation(&m, 2);
        assert_eq!(p.summands.len(), 1);
        assert_eq!(p.summands[0].order, SummandOrder::Tors(1));
        let (_, c) = &p.summands[0].gen[0];
        assert_eq!(c.reduce_mod(2).val3(), 1);
    }

    #[test]
    fn kernel_order_claims_hold() {
        // per presentation: 3^e kills each generator, 3^{e-1} does not
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let rows = rng.gen_range(1..4);
            let cols = rng.gen_range(1..4);
            let k = rng.gen_range(1..4u32);
            let data: Vec<i64> = (0..rows * cols)
                .map(|_| rng.gen_range(0..3i64.pow(k)))
                .collect();
            let m = mat_from(rows, cols, k, &data);
            let p = kernel_presentation(&m, 2);
            let cap = 3i64.pow(k);
            for s in &p.summands {
                let SummandOrder::Tors(e) = s.order else {
                    panic!()
                };
                // the generator's additive order in the source is exactly 3^e
                let min_val = s
                    .gen
                    .iter()
                    .map(|(_, c)| c.reduce_mod(k).val3())
                    .min()
                    .unwrap();
                assert_eq!(k - min_val, e);
                // and it really is in the kernel
                for i in 0..rows {
                    let mut acc = Local3::zero();
                    for (lab, c) in &s.gen {
                        let j = m.col_labels.iter().position(|l| l == lab).unwrap();
                        acc += &(c * m.at(i, j));
                    }
                    assert_eq!(acc.reduce_mod(k).value() % cap as u64, 0);
                }
            }
        }
    }

    #[test]
    fn cokernel_presentation_identity_and_relations() {
        // identity: trivial cokernel
        let m = mat_from(2, 2, 2, &[1, 0, 0, 1]);
        assert!(cokernel_presentation(&m).is_trivial());
        // single column (1, -3) over Z/81: quotient is cyclic of order 81;
        // the presentation carries the relation and the lowered order
        let m = mat_from(2, 1, 4, &[1, -3]);
        let p = cokernel_presentation(&m);
        assert_eq!(p.cyclic_orders(), vec![SummandOrder::Tors(4)]);
        assert_eq!(p.relations.len(), 1);
        let rel = fmt_vector(&p.relations[0]);
        assert!(rel.contains("B[0,0]") && rel.contains("B[0,1]"), "{rel}");
    }

    #[test]
    fn cokernel_matches_snf_sizes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let rows = rng.gen_range(1..4);
            let cols = rng.gen_range(1..4);
            let k = rng.gen_range(1..4u32);
            let data: Vec<i64> = (0..rows * cols)
                .map(|_| rng.gen_range(0..3i64.pow(k)))
                .collect();
            let m = mat_from(rows, cols, k, &data);
            let p = cokernel_presentation(&m);
            let (_, ce) = snf_cardinalities(&m, k);
            assert_eq!(
                p.size_exp(),
                Some(ce),
                "presentation size for {data:?} mod 3^{k}"
            );
        }
    }

    #[test]
    fn image_membership() {
        let m = mat_from(2, 1, 4, &[1, -3]);
        assert!(image_contains(&m, &[Local3::from_int(27), Local3::zero()]));
        assert!(!image_contains(&m, &[Local3::from_int(9), Local3::zero()]));
        assert!(image_contains(&m, &[Local3::zero(), Local3::zero()]));
    }

    #[test]
    fn exact_snf_on_free_rows() {
        let mut m = LocalMatrix::new(
            2,
            2,
            vec![SummandOrder::Free; 2],
            anon_labels(2, Family::A),
            anon_labels(2, Family::C),
        );
        m.set(0, 0, Local3::from_int(2));
        m.set(0, 1, Local3::from_int(4));
        m.set(1, 0, Local3::from_int(1));
        m.set(1, 1, Local3::from_int(2));
        // rank 1: one free kernel generator
        let p = kernel_presentation(&m, 0);
        assert_eq!(p.summands.len(), 1);
        assert_eq!(p.summands[0].order, SummandOrder::Free);
        let snf = smith_normal_form_exact(&m);
        assert_eq!(snf.diag[0], Val3::Finite(0));
        assert_eq!(snf.diag[1], Val3::Infinity);
    }

    #[test]
    fn presented_group_display() {
        let g = PresentedGroup {
            summands: vec![
                Summand {
                    order: SummandOrder::Tors(4),
                    gen: vec![(GenLabel::Gen(Family::B, 13, 0), Local3::one())],
                },
                Summand {
                    order: SummandOrder::Tors(4),
                    gen: vec![
                        (GenLabel::Gen(Family::D, 13, 3), Local3::from_int(-27)),
                        (GenLabel::Gen(Family::D, 13, 4), Local3::one()),
                    ],
                },
            ],
            relations: vec![],
        };
        let s = g.to_string();
        assert!(s.contains("Z/81<B[13,0]>"));
        assert!(s.contains("-27*D[13,3]+D[13,4]"));
    }
}
