//! Tensor products of highest-weight modules under the iterated coproduct,
//! the involution Psi, the partial order on pure tensors, the diamond
//! (canonical) basis, transition matrices, the standard flag-class basis,
//! and the tensor contravariant form.
//!
//! Conventions, validated by the relation and intertwining test suites:
//!   Delta(F_i) = F_i (x) K_i^-1 + 1 (x) F_i
//!   Delta(E_i) = E_i (x) 1 + K_i (x) E_i
//!   Delta(K_i) = K_i (x) K_i

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::arith::{qfact, LaurentPoly, RationalFunc};
use crate::cartan::{CartanDatum, DimVector, WeightAnchor};
use crate::error::{Error, Result};
use crate::falgebra::{FAlgebra, FlagWord};
use crate::hwmodule::{freudenthal_dims, positive_roots, HWModule, ModuleVector};
use crate::linalg::Matrix;

/// Per-factor (weight-space degree, pivot index) coordinates.
pub type TensorIndex = Vec<(DimVector, usize)>;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TensorVector {
    pub coords: BTreeMap<TensorIndex, RationalFunc>,
}

impl TensorVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(idx: TensorIndex) -> Self {
        let mut v = Self::zero();
        v.add_term(idx, RationalFunc::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add_term(&mut self, idx: TensorIndex, c: RationalFunc) {
        if c.is_zero() {
            return;
        }
        let e = self.coords.entry(idx.clone()).or_insert_with(RationalFunc::zero);
        *e = e.add(&c);
        if e.is_zero() {
            self.coords.remove(&idx);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.coords {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&RationalFunc::from_int(-1)))
    }

    pub fn scale(&self, c: &RationalFunc) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TensorVector {
            coords: self
                .coords
                .iter()
                .map(|(i, x)| (i.clone(), x.mul(c)))
                .collect(),
        }
    }

    /// Factorwise bar: coefficientwise, since every pivot is an F-word image.
    pub fn bar(&self) -> Self {
        TensorVector {
            coords: self
                .coords
                .iter()
                .map(|(i, x)| (i.clone(), x.bar()))
                .collect(),
        }
    }

    pub fn total_degree(idx: &TensorIndex) -> DimVector {
        let mut t = DimVector::zero();
        for (d, _) in idx {
            t = t.add(d);
        }
        t
    }
}

/// Componentwise maximal degree `nu` with `dim L(Lambda)_{Lambda-nu} > 0`,
/// found by escalating a Freudenthal box until the support is strictly
/// inside it.
pub fn support_extent(datum: &CartanDatum, anchor: &WeightAnchor) -> Result<DimVector> {
    for k in 1u32..=64 {
        let cs: Vec<u32> = vec![k; datum.rank()];
        let bbox = DimVector::from_coords(&cs);
        if positive_roots(datum, &bbox).is_err() {
            continue;
        }
        let dims = freudenthal_dims(datum, anchor, &bbox)?;
        let mut extent = DimVector::zero();
        for nu in dims.keys() {
            for (i, c) in nu.iter() {
                if c > extent.get(i) {
                    extent.set(i, c);
                }
            }
        }
        if (0..datum.rank()).all(|i| extent.get(i) < k) {
            return Ok(extent);
        }
    }
    Err(Error::Depth("support extent search exceeded the box limit".into()))
}

/// An ordered tensor product of highest-weight modules over one Cartan
/// datum, factors listed left to right in tensor order.
#[derive(Clone)]
pub struct TensorModule {
    datum: CartanDatum,
    falg: Rc<FAlgebra>,
    factors: Vec<Rc<HWModule>>,
}

impl TensorModule {
    pub fn new(falg: Rc<FAlgebra>, factors: Vec<Rc<HWModule>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("tensor module needs at least one factor".into()));
        }
        let datum = falg.datum().clone();
        for f in &factors {
            if f.datum() != &datum {
                return Err(Error::Config("tensor factors over different Cartan data".into()));
            }
        }
        Ok(TensorModule { datum, falg, factors })
    }

    /// Build factors with depth box = support extent + 1 in each coordinate,
    /// which is exactly enough for all single-letter operator transients.
    pub fn build(falg: Rc<FAlgebra>, weights: &[WeightAnchor]) -> Result<Self> {
        let datum = falg.datum().clone();
        let mut factors = Vec::new();
        for w in weights {
            let extent = support_extent(&datum, w)?;
            let ones: Vec<u32> = vec![1; datum.rank()];
            let bbox = extent.add(&DimVector::from_coords(&ones));
            factors.push(Rc::new(HWModule::build(&datum, w, &bbox)?));
        }
        Self::new(falg, factors)
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn falg(&self) -> &Rc<FAlgebra> {
        &self.falg
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, f: usize) -> &HWModule {
        &self.factors[f]
    }

    pub fn factor_rc(&self, f: usize) -> Rc<HWModule> {
        self.factors[f].clone()
    }

    /// The module on the first `n` factors, sharing the factor data.
    pub fn prefix_module(&self, n: usize) -> Result<TensorModule> {
        Self::new(self.falg.clone(), self.factors[..n].to_vec())
    }

    pub fn highest_vector(&self) -> TensorVector {
        TensorVector::unit(vec![(DimVector::zero(), 0); self.factors.len()])
    }

    /// All tensor basis indices, sorted.
    pub fn enumerate_indices(&self) -> Vec<TensorIndex> {
        let mut out: Vec<TensorIndex> = vec![vec![]];
        for f in &self.factors {
            let mut next = Vec::new();
            for base in &out {
                for (nu, s) in f.spaces() {
                    for k in 0..s.dim() {
                        let mut idx = base.clone();
                        idx.push((nu.clone(), k));
                        next.push(idx);
                    }
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Basis indices grouped by total degree.
    pub fn blocks(&self) -> BTreeMap<DimVector, Vec<TensorIndex>> {
        let mut map: BTreeMap<DimVector, Vec<TensorIndex>> = BTreeMap::new();
        for idx in self.enumerate_indices() {
            map.entry(TensorVector::total_degree(&idx)).or_default().push(idx);
        }
        map
    }

    /// Apply a factor-local operator at position `pos`.
    fn apply_at(
        &self,
        pos: usize,
        x: &TensorVector,
        op: impl Fn(&HWModule, &ModuleVector) -> Result<ModuleVector>,
    ) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (idx, c) in &x.coords {
            let (nu, k) = &idx[pos];
            let m = &self.factors[pos];
            let mv = m.basis_vector(nu, *k);
            let res = op(m, &mv)?;
            for (nu2, vec) in &res.coords {
                for (k2, c2) in vec.iter().enumerate() {
                    if c2.is_zero() {
                        continue;
                    }
                    let mut idx2 = idx.clone();
                    idx2[pos] = (nu2.clone(), k2);
                    out.add_term(idx2, c.mul(c2));
                }
            }
        }
        Ok(out)
    }

    pub fn act_f_at(&self, pos: usize, i: usize, x: &TensorVector) -> Result<TensorVector> {
        self.apply_at(pos, x, |m, v| m.act_f(i, 1, v))
    }

    pub fn act_e_at(&self, pos: usize, i: usize, x: &TensorVector) -> Result<TensorVector> {
        self.apply_at(pos, x, |m, v| m.act_e(i, 1, v))
    }

    /// Multiply each coordinate by `v^{s <lambda_pos, alpha_i^vee>}`.
    pub fn scale_by_factor_weight(
        &self,
        pos: usize,
        i: usize,
        s: i64,
        x: &TensorVector,
    ) -> TensorVector {
        let mut out = TensorVector::zero();
        for (idx, c) in &x.coords {
            let p = self.factors[pos].weight_pairing(&idx[pos].0, i);
            out.add_term(idx.clone(), c.mul(&RationalFunc::v_pow(s * p)));
        }
        out
    }

    /// Single `F_i` through the iterated coproduct on the first `upto`
    /// factors: `F` at position k < upto, `K^-1` at positions k+1..upto.
    pub fn act_f_single_prefix(&self, i: usize, upto: usize, x: &TensorVector) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (idx, c) in &x.coords {
            for k in 0..upto {
                let mut twist = 0i64;
                for (l, entry) in idx.iter().enumerate().take(upto).skip(k + 1) {
                    twist -= self.factors[l].weight_pairing(&entry.0, i);
                }
                let single = TensorVector::unit(idx.clone()).scale(&c.mul(&RationalFunc::v_pow(twist)));
                out = out.add(&self.act_f_at(k, i, &single)?);
            }
        }
        Ok(out)
    }

    pub fn act_f_single(&self, i: usize, x: &TensorVector) -> Result<TensorVector> {
        self.act_f_single_prefix(i, self.factors.len(), x)
    }

    /// Single `E_i`: `E` at position k, `K` at positions < k.
    pub fn act_e_single(&self, i: usize, x: &TensorVector) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (idx, c) in &x.coords {
            for k in 0..self.factors.len() {
                let mut twist = 0i64;
                for (l, entry) in idx.iter().enumerate().take(k) {
                    twist += self.factors[l].weight_pairing(&entry.0, i);
                }
                let single = TensorVector::unit(idx.clone()).scale(&c.mul(&RationalFunc::v_pow(twist)));
                out = out.add(&self.act_e_at(k, i, &single)?);
            }
        }
        Ok(out)
    }

    pub fn act_k(&self, i: usize, s: i64, x: &TensorVector) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (idx, c) in &x.coords {
            let mut p = 0i64;
            for (l, entry) in idx.iter().enumerate() {
                p += self.factors[l].weight_pairing(&entry.0, i);
            }
            out.add_term(idx.clone(), c.mul(&RationalFunc::v_pow(s * p)));
        }
        Ok(out)
    }

    /// Divided power `F_i^{(a)}` on a factor prefix: `a` single steps with
    /// exact division by `[a]!`.
    pub fn act_f_dp_prefix(&self, i: usize, a: u32, upto: usize, x: &TensorVector) -> Result<TensorVector> {
        let mut y = x.clone();
        for _ in 0..a {
            y = self.act_f_single_prefix(i, upto, &y)?;
        }
        if a > 1 {
            let inv = RationalFunc::new(LaurentPoly::one(), qfact(a as i64)?)?;
            y = y.scale(&inv);
        }
        Ok(y)
    }

    pub fn act_f_dp(&self, i: usize, a: u32, x: &TensorVector) -> Result<TensorVector> {
        self.act_f_dp_prefix(i, a, self.factors.len(), x)
    }

    pub fn act_e_dp(&self, i: usize, a: u32, x: &TensorVector) -> Result<TensorVector> {
        let mut y = x.clone();
        for _ in 0..a {
            y = self.act_e_single(i, &y)?;
        }
        if a > 1 {
            let inv = RationalFunc::new(LaurentPoly::one(), qfact(a as i64)?)?;
            y = y.scale(&inv);
        }
        Ok(y)
    }

    /// The involution `Psi = Theta o (bar (x) ... (x) bar)`, defined
    /// recursively on the number of factors.
    pub fn psi(&self, x: &TensorVector) -> Result<TensorVector> {
        let n = self.factors.len();
        if n == 1 {
            return Ok(x.bar());
        }
        let prefix = self.prefix_module(n - 1)?;
        // group by the last factor's index, recurse on the prefix
        let mut grouped: BTreeMap<(DimVector, usize), TensorVector> = BTreeMap::new();
        for (idx, c) in &x.coords {
            let last = idx[n - 1].clone();
            let mut pre = idx.clone();
            pre.pop();
            grouped
                .entry(last)
                .or_insert_with(TensorVector::zero)
                .add_term(pre, c.clone());
        }
        let mut y = TensorVector::zero();
        let mut max_last = DimVector::zero();
        for (last, pv) in grouped {
            for (i, c) in last.0.iter() {
                if c > max_last.get(i) {
                    max_last.set(i, c);
                }
            }
            let mapped = prefix.psi(&pv)?;
            for (pre, c) in mapped.coords {
                let mut idx = pre;
                idx.push(last.clone());
                y.add_term(idx, c);
            }
        }
        let comps = crate::theta::theta_components_upto(&self.falg, &max_last)?;
        crate::theta::apply_theta(self, &comps, &y)
    }

    /// Contravariant form: product of factor Shapovalov forms.
    pub fn tensor_form(&self, x: &TensorVector, y: &TensorVector) -> RationalFunc {
        let mut acc = RationalFunc::zero();
        for (ia, ca) in &x.coords {
            for (ib, cb) in &y.coords {
                let mut term = ca.mul(cb);
                let mut ok = true;
                for (f, m) in self.factors.iter().enumerate() {
                    let (da, ka) = &ia[f];
                    let (db, kb) = &ib[f];
                    if da != db {
                        ok = false;
                        break;
                    }
                    let space = m.space(da).expect("indexed space exists");
                    term = term.mul(space.pivot_gram.at(*ka, *kb));
                }
                if ok {
                    acc = acc.add(&term);
                }
            }
        }
        acc
    }

    /// Canonical basis elements of each factor with their single degrees.
    pub fn factor_cbs(&self) -> Result<Vec<Vec<(DimVector, ModuleVector)>>> {
        let mut out = Vec::new();
        for m in &self.factors {
            let cb = m.factor_cb(&self.falg)?;
            let mut list = Vec::new();
            for el in cb {
                let mut keys = el.coords.keys();
                let d = keys.next().expect("cb element nonzero").clone();
                if keys.next().is_some() {
                    return Err(Error::Math("factor cb element not weight-homogeneous".into()));
                }
                list.push((d, el));
            }
            out.push(list);
        }
        Ok(out)
    }

    /// Outer product of per-factor vectors.
    pub fn outer_product(&self, parts: &[ModuleVector]) -> TensorVector {
        let mut out = TensorVector::unit(vec![]);
        for p in parts {
            let mut next = TensorVector::zero();
            for (idx, c) in &out.coords {
                for (nu, vec) in &p.coords {
                    for (k, c2) in vec.iter().enumerate() {
                        if c2.is_zero() {
                            continue;
                        }
                        let mut idx2 = idx.clone();
                        idx2.push((nu.clone(), k));
                        next.add_term(idx2, c.mul(c2));
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Nested standard-basis vector: `words[N-1]` acts inside the leftmost
    /// factor, each earlier word through the coproduct on a longer prefix,
    /// `words[0]` on the full tensor last.
    pub fn flag_class(&self, words: &[FlagWord]) -> Result<TensorVector> {
        let n = self.factors.len();
        if words.len() != n {
            return Err(Error::Config(format!(
                "flag class needs {n} words, got {}",
                words.len()
            )));
        }
        let mut x = self.highest_vector();
        for j in (0..n).rev() {
            let upto = n - j;
            for &(i, a) in words[j].letters().iter().rev() {
                x = self.act_f_dp_prefix(i, a, upto, &x)?;
            }
        }
        Ok(x)
    }

    /// The pure tensor whose slot-j word acts inside its own factor; the
    /// leading term of the corresponding flag class.
    pub fn leading_pure_tensor(&self, words: &[FlagWord]) -> Result<TensorVector> {
        let n = self.factors.len();
        let mut parts = Vec::with_capacity(n);
        for (f, m) in self.factors.iter().enumerate() {
            let w = &words[n - 1 - f];
            parts.push(m.flag_word_image(w)?);
        }
        Ok(self.outer_product(&parts))
    }

    pub fn diamond_basis(&self) -> Result<DiamondBasis> {
        if self.factors.len() != 2 {
            return Err(Error::Config("diamond_basis expects exactly two factors".into()));
        }
        self.compute_diamond()
    }

    pub fn nfold_diamond(&self) -> Result<DiamondBasis> {
        if self.factors.len() < 3 {
            return Err(Error::Config("nfold_diamond expects at least three factors".into()));
        }
        self.compute_diamond()
    }

    fn compute_diamond(&self) -> Result<DiamondBasis> {
        let cbs = self.factor_cbs()?;
        let n = self.factors.len();
        // all pure tensor indices, grouped by total degree
        let mut all: Vec<PureTensorIndex> = vec![PureTensorIndex {
            elems: vec![],
            degrees: vec![],
        }];
        for list in cbs.iter() {
            let mut next = Vec::new();
            for base in &all {
                for (e, (d, _)) in list.iter().enumerate() {
                    let mut t = base.clone();
                    t.elems.push(e);
                    t.degrees.push(d.clone());
                    next.push(t);
                }
            }
            all = next;
        }
        let mut grouped: BTreeMap<DimVector, Vec<PureTensorIndex>> = BTreeMap::new();
        for t in all {
            grouped.entry(t.total()).or_default().push(t);
        }
        let block_rows = self.blocks();
        let mut blocks = Vec::new();
        let mut keys: Vec<DimVector> = grouped.keys().cloned().collect();
        keys.sort_by_key(|d| (d.tr(), d.clone()));
        for total in keys {
            let mut indices = grouped.remove(&total).unwrap();
            indices.sort_by_key(|t| (t.order_key(), t.elems.clone()));
            let rows = block_rows.get(&total).cloned().unwrap_or_default();
            let dim = rows.len();
            if dim != indices.len() {
                return Err(Error::Math(format!(
                    "pure tensor count {} disagrees with block dimension {dim} at {total:?}",
                    indices.len()
                )));
            }
            let pure: Vec<TensorVector> = indices
                .iter()
                .map(|t| {
                    let parts: Vec<ModuleVector> = (0..n)
                        .map(|f| cbs[f][t.elems[f]].1.clone())
                        .collect();
                    self.outer_product(&parts)
                })
                .collect();
            let to_col = |x: &TensorVector| -> Vec<RationalFunc> {
                rows.iter()
                    .map(|r| x.coords.get(r).cloned().unwrap_or_else(RationalFunc::zero))
                    .collect()
            };
            let mut p = Matrix::zeros(dim, dim);
            for (c, t) in pure.iter().enumerate() {
                for (r, val) in to_col(t).into_iter().enumerate() {
                    *p.at_mut(r, c) = val;
                }
            }
            let pinv = if dim > 0 { p.invert()? } else { Matrix::zeros(0, 0) };
            // rho[r][c]: coefficient of pure r in Psi(pure c)
            let mut rho = Matrix::zeros(dim, dim);
            for (c, t) in pure.iter().enumerate() {
                let img = self.psi(t)?;
                let col = pinv.mul_vec(&to_col(&img));
                for (r, val) in col.into_iter().enumerate() {
                    *rho.at_mut(r, c) = val;
                }
            }
            // triangularity of Psi against the order refinement
            for r in 0..dim {
                for c in 0..dim {
                    let val = rho.at(r, c);
                    if r == c {
                        if !val.is_one() {
                            return Err(Error::Math(format!(
                                "Psi is not unitriangular at {total:?}: diagonal entry {val}"
                            )));
                        }
                    } else if !val.is_zero() && indices[r].order_key() <= indices[c].order_key() {
                        return Err(Error::Math(format!(
                            "Psi violates the pure-tensor order at {total:?} ({r} vs {c})"
                        )));
                    }
                }
            }
            // bar-invariant correction: column by column, ascending rows
            let mut pi = Matrix::identity(dim);
            for c in 0..dim {
                for r in (c + 1)..dim {
                    let mut rval = RationalFunc::zero();
                    for u in c..r {
                        if !pi.at(u, c).is_zero() && !rho.at(r, u).is_zero() {
                            rval = rval.add(&pi.at(u, c).bar().mul(rho.at(r, u)));
                        }
                    }
                    if rval.is_zero() {
                        continue;
                    }
                    let rl = rval.as_laurent().ok_or_else(|| {
                        Error::Math(format!(
                            "diamond correction at {total:?} left the Laurent ring: {rval}"
                        ))
                    })?;
                    // solve pi - bar(pi) = r with pi in v^-1 Z[v^-1]
                    let neg: Vec<(i64, i64)> = vec![];
                    let mut part = LaurentPoly::from_terms(&neg);
                    for (e, coeff) in rl.terms() {
                        if *e < 0 {
                            part = part.add(&LaurentPoly::monomial(*e, coeff.clone()));
                        }
                    }
                    if part.sub(&part.bar()) != rl {
                        return Err(Error::Math(format!(
                            "diamond correction at {total:?} has no solution in v^-1 Z[v^-1]: {rl}"
                        )));
                    }
                    *pi.at_mut(r, c) = RationalFunc::from_laurent(part);
                }
            }
            let diamond: Vec<TensorVector> = (0..dim)
                .map(|c| {
                    let mut acc = TensorVector::zero();
                    for r in 0..dim {
                        if !pi.at(r, c).is_zero() {
                            acc = acc.add(&pure[r].scale(pi.at(r, c)));
                        }
                    }
                    acc
                })
                .collect();
            blocks.push(DiamondBlock {
                total,
                indices,
                pure,
                diamond,
                pi,
            });
        }
        Ok(DiamondBasis { blocks })
    }

    /// Per weight block: rank of all flag classes must equal the block
    /// dimension, and each flag class must equal its leading pure tensor
    /// plus strictly order-larger terms.
    pub fn span_check(&self) -> Result<SpanReport> {
        let n = self.factors.len();
        let mut blocks = Vec::new();
        let mut pass = true;
        for (total, rows) in self.blocks() {
            let splits = enumerate_splits(&total, n);
            let mut vectors = Vec::new();
            let mut leading_ok = true;
            for split in &splits {
                let word_lists: Vec<Vec<FlagWord>> =
                    split.iter().map(|d| self.falg.enumerate_words(d)).collect();
                let mut choice = vec![0usize; n];
                loop {
                    let words: Vec<FlagWord> = (0..n)
                        .map(|j| word_lists[j][choice[j]].clone())
                        .collect();
                    // Words whose per-factor degree leaves the factor box are
                    // not adapted to the product; their classes live in lower
                    // strata and carry no leading term to check.
                    let adapted = (|| -> Result<(TensorVector, TensorVector)> {
                        let fc = self.flag_class(&words)?;
                        let lead = self.leading_pure_tensor(&words)?;
                        Ok((fc, lead))
                    })();
                    match adapted {
                        Ok((fc, lead)) => {
                            if !lead.is_zero() {
                                let lead_key: Vec<u32> = (0..n - 1)
                                    .map(|f| words[n - 1 - f].degree().tr())
                                    .collect();
                                let diff = fc.sub(&lead);
                                for idx in diff.coords.keys() {
                                    let key: Vec<u32> =
                                        (0..n - 1).map(|f| idx[f].0.tr()).collect();
                                    if key <= lead_key {
                                        leading_ok = false;
                                    }
                                }
                            }
                            if !fc.is_zero() {
                                vectors.push(fc);
                            }
                        }
                        Err(Error::Depth(_)) => {}
                        Err(e) => return Err(e),
                    }
                    // advance the mixed-radix word choice
                    let mut j = 0;
                    loop {
                        if j == n {
                            break;
                        }
                        choice[j] += 1;
                        if choice[j] < word_lists[j].len() {
                            break;
                        }
                        choice[j] = 0;
                        j += 1;
                    }
                    if j == n {
                        break;
                    }
                }
            }
            let dim = rows.len();
            let mut m = Matrix::zeros(dim, vectors.len());
            for (c, vct) in vectors.iter().enumerate() {
                for (r, row) in rows.iter().enumerate() {
                    if let Some(val) = vct.coords.get(row) {
                        *m.at_mut(r, c) = val.clone();
                    }
                }
            }
            let rank = m.rank();
            if rank != dim || !leading_ok {
                pass = false;
            }
            blocks.push(SpanBlock {
                total,
                dim,
                rank,
                leading_ok,
            });
        }
        Ok(SpanReport { blocks, pass })
    }
}

/// All ways to split `total` into an ordered sum of `n` degrees.
pub fn enumerate_splits(total: &DimVector, n: usize) -> Vec<Vec<DimVector>> {
    if n == 1 {
        return vec![vec![total.clone()]];
    }
    let mut out = Vec::new();
    for first in total.sub_degrees() {
        let rest = total.checked_sub(&first).expect("sub-degree");
        for mut tail in enumerate_splits(&rest, n - 1) {
            let mut split = vec![first.clone()];
            split.append(&mut tail);
            out.push(split);
        }
    }
    out
}

/// A pure tensor of factor canonical-basis elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PureTensorIndex {
    /// Per-factor index into the factor's canonical basis list.
    pub elems: Vec<usize>,
    /// Per-factor degrees of those elements.
    pub degrees: Vec<DimVector>,
}

impl PureTensorIndex {
    pub fn total(&self) -> DimVector {
        let mut t = DimVector::zero();
        for d in &self.degrees {
            t = t.add(d);
        }
        t
    }

    /// Lexicographic refinement of the depth order: factor depths left to
    /// right, omitting the last (it is determined by the total).
    pub fn order_key(&self) -> Vec<u32> {
        self.degrees[..self.degrees.len() - 1]
            .iter()
            .map(|d| d.tr())
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrderRel {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// The partial order on pure tensors: comparable only at equal total
/// degree, ordered by factor depths.
pub fn order_leq(t: &PureTensorIndex, u: &PureTensorIndex) -> OrderRel {
    if t.total() != u.total() {
        return OrderRel::Incomparable;
    }
    if t == u {
        return OrderRel::Equal;
    }
    match t.order_key().cmp(&u.order_key()) {
        std::cmp::Ordering::Less => OrderRel::Less,
        std::cmp::Ordering::Greater => OrderRel::Greater,
        std::cmp::Ordering::Equal => OrderRel::Incomparable,
    }
}

pub struct DiamondBlock {
    pub total: DimVector,
    pub indices: Vec<PureTensorIndex>,
    pub pure: Vec<TensorVector>,
    pub diamond: Vec<TensorVector>,
    /// pi[r][c] = coefficient of pure r in diamond c; unit diagonal.
    pub pi: Matrix,
}

pub struct DiamondBasis {
    pub blocks: Vec<DiamondBlock>,
}

impl DiamondBasis {
    /// True when every transition entry lies in N[v^-1].
    pub fn positivity(&self) -> bool {
        self.blocks.iter().all(|b| {
            let n = b.indices.len();
            (0..n).all(|r| {
                (0..n).all(|c| {
                    let val = b.pi.at(r, c);
                    match val.as_laurent() {
                        Some(p) => p.coeffs_nonnegative(),
                        None => false,
                    }
                })
            })
        })
    }

    /// True when every off-diagonal entry lies in v^-1 Z[v^-1].
    pub fn off_diagonal_in_v_inverse(&self) -> bool {
        self.blocks.iter().all(|b| {
            let n = b.indices.len();
            (0..n).all(|r| {
                (0..n).all(|c| {
                    if r == c {
                        return b.pi.at(r, c).is_one();
                    }
                    match b.pi.at(r, c).as_laurent() {
                        Some(p) => p.in_v_inverse_lattice(),
                        None => false,
                    }
                })
            })
        })
    }
}

pub struct SpanBlock {
    pub total: DimVector,
    pub dim: usize,
    pub rank: usize,
    pub leading_ok: bool,
}

pub struct SpanReport {
    pub blocks: Vec<SpanBlock>,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1_pair(n1: i64, n2: i64) -> TensorModule {
        let falg = Rc::new(FAlgebra::new(CartanDatum::a1()));
        TensorModule::build(
            falg,
            &[WeightAnchor::new(vec![n1]), WeightAnchor::new(vec![n2])],
        )
        .unwrap()
    }

    fn idx(parts: &[(&[u32], usize)]) -> TensorIndex {
        parts
            .iter()
            .map(|(d, k)| (DimVector::from_coords(d), *k))
            .collect()
    }

    #[test]
    fn coproduct_f_on_top() {
        // F(v0 (x) v0) = v^-1 v1 (x) v0 + v0 (x) v1
        let tm = a1_pair(1, 1);
        let top = tm.highest_vector();
        let fx = tm.act_f_single(0, &top).unwrap();
        let mut expect = TensorVector::zero();
        expect.add_term(idx(&[(&[1], 0), (&[], 0)]), RationalFunc::v_pow(-1));
        expect.add_term(idx(&[(&[], 0), (&[1], 0)]), RationalFunc::one());
        assert_eq!(fx, expect);
    }

    #[test]
    fn coproduct_e_on_mixed() {
        // E(v0 (x) v1) = v * v0 (x) v0
        let tm = a1_pair(1, 1);
        let x = TensorVector::unit(idx(&[(&[], 0), (&[1], 0)]));
        let ex = tm.act_e_single(0, &x).unwrap();
        assert_eq!(ex, tm.highest_vector().scale(&RationalFunc::v_pow(1)));
    }

    #[test]
    fn k_grouplike() {
        let tm = a1_pair(1, 2);
        let top = tm.highest_vector();
        assert_eq!(
            tm.act_k(0, 1, &top).unwrap(),
            top.scale(&RationalFunc::v_pow(3))
        );
    }

    #[test]
    fn coproduct_is_algebra_map_ef() {
        // [E, F] = [<lambda, alpha^vee>] on tensor vectors
        let tm = a1_pair(2, 1);
        for x in tm.enumerate_indices().into_iter().map(TensorVector::unit) {
            let ef = tm.act_e_single(0, &tm.act_f_single(0, &x).unwrap()).unwrap();
            let fe = tm.act_f_single(0, &tm.act_e_single(0, &x).unwrap()).unwrap();
            let kp = tm.act_k(0, 1, &x).unwrap();
            let km = tm.act_k(0, -1, &x).unwrap();
            let denom = RationalFunc::v_pow(1).sub(&RationalFunc::v_pow(-1));
            let rhs = kp.sub(&km).scale(&denom.inv().unwrap());
            assert_eq!(ef.sub(&fe), rhs);
        }
    }

    #[test]
    fn flag_class_examples() {
        let tm = a1_pair(1, 1);
        let empty = FlagWord::empty();
        let one = FlagWord::from_pairs(&[(0, 1)]);
        // all words empty
        assert_eq!(
            tm.flag_class(&[empty.clone(), empty.clone()]).unwrap(),
            tm.highest_vector()
        );
        // outer word only: equals F(top)
        let fc = tm.flag_class(&[one.clone(), empty.clone()]).unwrap();
        assert_eq!(fc, tm.act_f_single(0, &tm.highest_vector()).unwrap());
        // inner word only: v1 (x) v0
        let fc = tm.flag_class(&[empty, one]).unwrap();
        assert_eq!(fc, TensorVector::unit(idx(&[(&[1], 0), (&[], 0)])));
    }

    #[test]
    fn psi_examples() {
        let tm = a1_pair(1, 1);
        // Psi fixes the highest vector and any F-image of it
        let top = tm.highest_vector();
        assert_eq!(tm.psi(&top).unwrap(), top);
        // Psi(v0 (x) v1) = v0 (x) v1 + (v^-1 - v) v1 (x) v0
        let x = TensorVector::unit(idx(&[(&[], 0), (&[1], 0)]));
        let mut expect = x.clone();
        expect.add_term(
            idx(&[(&[1], 0), (&[], 0)]),
            RationalFunc::v_pow(-1).sub(&RationalFunc::v_pow(1)),
        );
        assert_eq!(tm.psi(&x).unwrap(), expect);
        // Psi^2 = id on every basis vector
        for b in tm.enumerate_indices().into_iter().map(TensorVector::unit) {
            assert_eq!(tm.psi(&tm.psi(&b).unwrap()).unwrap(), b);
        }
    }

    #[test]
    fn psi_squared_three_factors() {
        let falg = Rc::new(FAlgebra::new(CartanDatum::a1()));
        let tm = TensorModule::build(falg, &vec![WeightAnchor::new(vec![1]); 3]).unwrap();
        for b in tm.enumerate_indices().into_iter().map(TensorVector::unit) {
            assert_eq!(tm.psi(&tm.psi(&b).unwrap()).unwrap(), b);
        }
    }

    #[test]
    fn diamond_v1v1() {
        let tm = a1_pair(1, 1);
        let d = tm.diamond_basis().unwrap();
        assert!(d.off_diagonal_in_v_inverse());
        assert!(d.positivity());
        // middle block: single off-diagonal entry v^-1
        let mid = d
            .blocks
            .iter()
            .find(|b| b.total == DimVector::from_coords(&[1]))
            .unwrap();
        assert_eq!(mid.indices.len(), 2);
        assert_eq!(*mid.pi.at(0, 1), RationalFunc::zero());
        assert_eq!(*mid.pi.at(1, 0), RationalFunc::v_pow(-1));
        // the canonical element: v0 (x) v1 + v^-1 v1 (x) v0
        let c = &mid.diamond[0];
        let mut expect = TensorVector::unit(idx(&[(&[], 0), (&[1], 0)]));
        expect.add_term(idx(&[(&[1], 0), (&[], 0)]), RationalFunc::v_pow(-1));
        assert_eq!(c, &expect);
        // deepest block is a single pure tensor fixed as-is
        let bot = d
            .blocks
            .iter()
            .find(|b| b.total == DimVector::from_coords(&[2]))
            .unwrap();
        assert_eq!(bot.indices.len(), 1);
        assert!(bot.pi.at(0, 0).is_one());
    }

    #[test]
    fn tensor_form_basics() {
        let tm = a1_pair(1, 1);
        let top = tm.highest_vector();
        assert!(tm.tensor_form(&top, &top).is_one());
        // contravariance (F x, y) = (x, v K^-1 E y)
        let x = TensorVector::unit(idx(&[(&[], 0), (&[1], 0)]));
        let y = TensorVector::unit(idx(&[(&[1], 0), (&[1], 0)]));
        let lhs = tm.tensor_form(&tm.act_f_single(0, &x).unwrap(), &y);
        let rhs = tm.tensor_form(
            &x,
            &tm.act_k(0, -1, &tm.act_e_single(0, &y).unwrap())
                .unwrap()
                .scale(&RationalFunc::v_pow(1)),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn order_relation() {
        let t = PureTensorIndex {
            elems: vec![0, 1],
            degrees: vec![DimVector::zero(), DimVector::from_coords(&[1])],
        };
        let u = PureTensorIndex {
            elems: vec![1, 0],
            degrees: vec![DimVector::from_coords(&[1]), DimVector::zero()],
        };
        assert_eq!(order_leq(&t, &u), OrderRel::Less);
        assert_eq!(order_leq(&u, &t), OrderRel::Greater);
        assert_eq!(order_leq(&t, &t), OrderRel::Equal);
        let w = PureTensorIndex {
            elems: vec![0, 0],
            degrees: vec![DimVector::zero(), DimVector::zero()],
        };
        assert_eq!(order_leq(&t, &w), OrderRel::Incomparable);
    }

    #[test]
    fn span_check_v1v1() {
        let tm = a1_pair(1, 1);
        let rep = tm.span_check().unwrap();
        assert!(rep.pass);
        let mid = rep
            .blocks
            .iter()
            .find(|b| b.total == DimVector::from_coords(&[1]))
            .unwrap();
        assert_eq!(mid.dim, 2);
        assert_eq!(mid.rank, 2);
        assert!(mid.leading_ok);
    }

    #[test]
    fn support_extents() {
        let a2 = CartanDatum::a2();
        assert_eq!(
            support_extent(&a2, &WeightAnchor::new(vec![1, 0])).unwrap(),
            DimVector::from_coords(&[1, 1])
        );
        assert_eq!(
            support_extent(&a2, &WeightAnchor::new(vec![1, 1])).unwrap(),
            DimVector::from_coords(&[2, 2])
        );
        assert_eq!(
            support_extent(&CartanDatum::a1(), &WeightAnchor::new(vec![3])).unwrap(),
            DimVector::from_coords(&[3])
        );
    }
}
